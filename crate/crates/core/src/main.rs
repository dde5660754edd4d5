//! Command-line front end. Results print to stdout as exact rationals
//! (`<num>/<den>`, or a bare integer when the denominator is 1); errors go
//! to stderr. Exit codes: 0 success, 1 domain error (no strong ordering,
//! budget exhausted, mismatched inputs), 2 usage or file-parse error.

use clap::{Args, Parser, Subcommand, ValueEnum};
use iscount::circuit::{parse_circuit, Circuit};
use iscount::cliquewidth::{count_cw, parse_cw, realize, CwExpression};
use iscount::graph::{parse_graph, Graph};
use iscount::ordering::{find_strong_ordering, verify_strong_ordering, StrongOrdering, Verdict};
use iscount::rat::format_rational;
use iscount::socount::{
    build_counting_circuit, count_by_size_with_budget, count_so_with_budget, CountError,
};
use iscount::softfloat::{eval_soft, plan_precision, recover_exact};
use iscount::testkit::{generate, Generated, InstanceSpec};
use iscount::weight::{parse_weights, WeightFunction};
use num_bigint::BigUint;
use num_integer::Integer;
use num_rational::BigRational;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

const DEFAULT_BUDGET: u64 = 1_000_000;

#[derive(Parser)]
#[command(
    name = "iscount",
    about = "Exact weighted independent-set counting on strongly orderable graphs and clique-width expressions"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    /// Peel-and-reweight with exact rationals.
    So,
    /// Compile to a positive circuit, evaluate exactly.
    CircuitExact,
    /// Compile to a positive circuit, evaluate in certified soft floats,
    /// recover the exact value by rounding.
    CircuitFloat,
    /// Clique-width dynamic program (requires --expr).
    Cwd,
    /// Brute-force enumeration (small graphs).
    Oracle,
}

#[derive(Subcommand)]
enum Cmd {
    /// Count weighted independent sets of a graph.
    Count {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        weights: Option<PathBuf>,
        /// Strong-ordering file; searched for when absent.
        #[arg(long)]
        order: Option<PathBuf>,
        #[arg(long, value_enum)]
        method: Method,
        /// Clique-width expression file (for --method cwd).
        #[arg(long)]
        expr: Option<PathBuf>,
        /// Node budget for the strong-ordering search.
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
    },
    /// Independent-set counts by size (space separated, size 0 first).
    Coeffs {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        order: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
    },
    /// Check whether an ordering is a strong ordering.
    VerifyOrder {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        order: PathBuf,
    },
    /// Search for a strong ordering.
    FindOrder {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
    },
    /// Counting-circuit operations.
    Circuit {
        #[command(subcommand)]
        sub: CircuitCmd,
    },
    /// Clique-width expression operations.
    Cwd {
        #[command(subcommand)]
        sub: CwdCmd,
    },
    /// Generate a deterministic test instance.
    Gen {
        /// tree | chain_graph | cograph | bipartite_permutation |
        /// complete_bipartite | random_cw_expr
        #[arg(long)]
        kind: String,
        #[arg(long)]
        size: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Subcommand)]
enum CircuitCmd {
    /// Compile the counting circuit for a graph and ordering.
    Build {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        order: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Evaluate a circuit file on a weight vector (input i reads the weight
    /// of vertex i+1).
    Eval {
        #[arg(long)]
        circuit: PathBuf,
        #[arg(long)]
        weights: PathBuf,
        #[command(flatten)]
        mode: EvalMode,
    },
}

#[derive(Args)]
#[group(multiple = false)]
struct EvalMode {
    /// Exact rational evaluation (default).
    #[arg(long)]
    exact: bool,
    /// Certified soft-float evaluation plus exact recovery.
    #[arg(long)]
    float: bool,
}

#[derive(Subcommand)]
enum CwdCmd {
    /// Count weighted independent sets of the graph an expression realizes.
    Count {
        #[arg(long)]
        expr: PathBuf,
        #[arg(long)]
        weights: Option<PathBuf>,
    },
}

enum CliError {
    Usage(String),
    Domain(String),
}

impl CliError {
    fn usage(e: impl std::fmt::Display) -> Self {
        CliError::Usage(e.to_string())
    }

    fn domain(e: impl std::fmt::Display) -> Self {
        CliError::Domain(e.to_string())
    }
}

impl From<CountError> for CliError {
    fn from(e: CountError) -> Self {
        CliError::Domain(e.to_string())
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))
}

fn load_graph(path: &Path) -> Result<Graph, CliError> {
    parse_graph(&read(path)?).map_err(CliError::usage)
}

fn load_weights(path: Option<&PathBuf>) -> Result<WeightFunction, CliError> {
    match path {
        None => Ok(WeightFunction::unit()),
        Some(p) => parse_weights(&read(p)?).map_err(CliError::usage),
    }
}

fn load_order(path: &Path) -> Result<StrongOrdering, CliError> {
    StrongOrdering::parse(&read(path)?).map_err(CliError::usage)
}

fn load_expr(path: &Path) -> Result<CwExpression, CliError> {
    parse_cw(&read(path)?).map_err(CliError::usage)
}

fn weight_vector(g: &Graph, w: &WeightFunction) -> Vec<BigRational> {
    g.vertices().map(|v| w.get(v).clone()).collect()
}

/// `n_b` (bit bound) and `D` (denominator lcm) for a weight vector.
fn input_bounds(xs: &[BigRational]) -> (u64, BigUint) {
    let mut n_b = 1u64;
    let mut lcm = BigUint::from(1u8);
    for x in xs {
        n_b = n_b
            .max(x.numer().magnitude().bits())
            .max(x.denom().magnitude().bits());
        lcm = lcm.lcm(x.denom().magnitude());
    }
    (n_b, lcm)
}

fn eval_circuit_float(c: &Circuit, xs: &[BigRational]) -> Result<BigRational, CliError> {
    let (n_b, lcm) = input_bounds(xs);
    let plan = plan_precision(c, n_b, c.n_inputs() as u64, lcm).map_err(CliError::domain)?;
    let outs = eval_soft(c, xs, &plan).map_err(CliError::domain)?;
    match outs.first() {
        Some(y) => Ok(recover_exact(y, &plan)),
        None => Err(CliError::Domain("circuit has no output".into())),
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.cmd {
        Cmd::Count {
            graph,
            weights,
            order,
            method,
            expr,
            budget,
        } => {
            let g = load_graph(&graph)?;
            let w = load_weights(weights.as_ref())?;
            let pi = order.as_ref().map(|p| load_order(p)).transpose()?;
            let value = match method {
                Method::So => count_so_with_budget(&g, &w, pi.as_ref(), budget)?,
                Method::CircuitExact | Method::CircuitFloat => {
                    let pi = match pi {
                        Some(p) => p,
                        None => find_strong_ordering(&g, budget)
                            .map_err(CliError::domain)?
                            .ok_or_else(|| CliError::Domain("graph has no strong ordering".into()))?,
                    };
                    let c = build_counting_circuit(&g, &pi)?;
                    let xs = weight_vector(&g, &w);
                    if method == Method::CircuitExact {
                        c.eval_exact_single(&xs).map_err(CliError::domain)?
                    } else {
                        eval_circuit_float(&c, &xs)?
                    }
                }
                Method::Cwd => {
                    let path = expr.ok_or_else(|| {
                        CliError::Usage("--method cwd requires --expr".into())
                    })?;
                    let e = load_expr(&path)?;
                    let lg = realize(&e);
                    if lg.graph != g {
                        return Err(CliError::Domain(
                            "expression does not realize the given graph".into(),
                        ));
                    }
                    count_cw(&e, &w)
                }
                Method::Oracle => {
                    iscount::testkit::oracle_count(&g, &w).map_err(CliError::domain)?
                }
            };
            println!("{}", format_rational(&value));
        }
        Cmd::Coeffs { graph, order, budget } => {
            let g = load_graph(&graph)?;
            let pi = order.as_ref().map(|p| load_order(p)).transpose()?;
            let coeffs = count_by_size_with_budget(&g, pi.as_ref(), budget)?;
            let words: Vec<String> = coeffs.iter().map(|c| c.to_string()).collect();
            println!("{}", words.join(" "));
        }
        Cmd::VerifyOrder { graph, order } => {
            let g = load_graph(&graph)?;
            let pi = load_order(&order)?;
            match verify_strong_ordering(&g, &pi).map_err(CliError::usage)? {
                Verdict::Valid => println!("valid"),
                Verdict::Invalid(v) => {
                    println!("invalid {} {} {} {}", v.vi, v.vj, v.vk, v.vl);
                    return Err(CliError::Domain(
                        "ordering is not a strong ordering".into(),
                    ));
                }
            }
        }
        Cmd::FindOrder { graph, budget } => {
            let g = load_graph(&graph)?;
            match find_strong_ordering(&g, budget).map_err(CliError::domain)? {
                Some(pi) => println!("{pi}"),
                None => return Err(CliError::Domain("graph has no strong ordering".into())),
            }
        }
        Cmd::Circuit { sub } => match sub {
            CircuitCmd::Build { graph, order, out } => {
                let g = load_graph(&graph)?;
                let pi = load_order(&order)?;
                let c = build_counting_circuit(&g, &pi)?;
                std::fs::write(&out, c.serialize())
                    .map_err(|e| CliError::Usage(format!("cannot write {}: {e}", out.display())))?;
            }
            CircuitCmd::Eval { circuit, weights, mode } => {
                let c = parse_circuit(&read(&circuit)?).map_err(CliError::usage)?;
                let w = parse_weights(&read(&weights)?).map_err(CliError::usage)?;
                let xs: Vec<BigRational> = (0..c.n_inputs()).map(|i| w.get(i + 1).clone()).collect();
                let value = if mode.float {
                    eval_circuit_float(&c, &xs)?
                } else {
                    c.eval_exact_single(&xs).map_err(CliError::domain)?
                };
                println!("{}", format_rational(&value));
            }
        },
        Cmd::Cwd { sub } => match sub {
            CwdCmd::Count { expr, weights } => {
                let e = load_expr(&expr)?;
                let w = load_weights(weights.as_ref())?;
                println!("{}", format_rational(&count_cw(&e, &w)));
            }
        },
        Cmd::Gen { kind, size, seed, out } => {
            let kind = iscount::testkit::InstanceKind::from_str(&kind).map_err(CliError::Usage)?;
            let spec = InstanceSpec { kind, size, seed };
            let text = match generate(&spec).map_err(CliError::usage)? {
                Generated::Graph(g) => g.serialize(),
                Generated::Expression(e) => e.serialize(),
            };
            std::fs::write(&out, text)
                .map_err(|e| CliError::Usage(format!("cannot write {}: {e}", out.display())))?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Domain(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
