//! Arithmetic circuits: a DAG of input/const/add/sub/mul/div gates with
//! backward references, exact rational evaluation, a positivity predicate,
//! bit-exact file I/O, and Newton interpolation for reading per-size counts
//! off evaluations of the independence polynomial.
//!
//! Circuit file format (line oriented):
//! `g<k> input <i>` | `g<k> const <num>/<den>` | `g<k> add g<a> g<b>` (same
//! for `sub`/`mul`/`div`) | `output g<k>`. Gate ids are dense and strictly
//! increasing from 0; gate references point strictly backward.

use crate::rat;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use std::fmt;
use thiserror::Error;

pub type GateId = usize;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Gate {
    Input(usize),
    Const(BigRational),
    Add(GateId, GateId),
    Sub(GateId, GateId),
    Mul(GateId, GateId),
    Div(GateId, GateId),
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CircuitError {
    #[error("expected {expected} inputs, got {got}")]
    InputArity { expected: usize, got: usize },
    #[error("division by zero at gate g{gate}")]
    DivisionByZero { gate: GateId },
    #[error("circuit has no output")]
    NoOutput,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CircuitParseError {
    #[error("line {line}: malformed gate line")]
    Malformed { line: usize },
    #[error("line {line}: gate ids must be dense and increasing (expected g{expected})")]
    BadGateId { line: usize, expected: usize },
    #[error("line {line}: reference g{referenced} does not point backward")]
    ForwardReference { line: usize, referenced: usize },
    #[error("line {line}: {source}")]
    BadConstant {
        line: usize,
        source: rat::RatParseError,
    },
}

/// An arithmetic circuit. Acyclicity is enforced structurally: every gate may
/// only reference earlier gates. `n_inputs` is the length of the expected
/// input vector; input gates carry an index into it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Circuit {
    n_inputs: usize,
    gates: Vec<Gate>,
    outputs: Vec<GateId>,
}

impl Circuit {
    pub fn new(n_inputs: usize) -> Self {
        Circuit {
            n_inputs,
            gates: Vec::new(),
            outputs: Vec::new(),
        }
    }

    /// Appends a gate and returns its id.
    ///
    /// Panics if the gate references a later or nonexistent gate, or an input
    /// index out of range; those are construction bugs, not data errors.
    pub fn push(&mut self, gate: Gate) -> GateId {
        let id = self.gates.len();
        match &gate {
            Gate::Input(i) => assert!(*i < self.n_inputs, "input index {i} out of range"),
            Gate::Const(_) => {}
            Gate::Add(a, b) | Gate::Sub(a, b) | Gate::Mul(a, b) | Gate::Div(a, b) => {
                assert!(*a < id && *b < id, "gate g{id} must reference backward");
            }
        }
        self.gates.push(gate);
        id
    }

    pub fn input(&mut self, i: usize) -> GateId {
        self.push(Gate::Input(i))
    }

    pub fn constant(&mut self, r: BigRational) -> GateId {
        self.push(Gate::Const(r))
    }

    pub fn add(&mut self, a: GateId, b: GateId) -> GateId {
        self.push(Gate::Add(a, b))
    }

    pub fn sub(&mut self, a: GateId, b: GateId) -> GateId {
        self.push(Gate::Sub(a, b))
    }

    pub fn mul(&mut self, a: GateId, b: GateId) -> GateId {
        self.push(Gate::Mul(a, b))
    }

    pub fn div(&mut self, a: GateId, b: GateId) -> GateId {
        self.push(Gate::Div(a, b))
    }

    pub fn mark_output(&mut self, id: GateId) {
        assert!(id < self.gates.len());
        self.outputs.push(id);
    }

    /// Number of gates, written `|C|`.
    pub fn size(&self) -> usize {
        self.gates.len()
    }

    pub fn n_inputs(&self) -> usize {
        self.n_inputs
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn outputs(&self) -> &[GateId] {
        &self.outputs
    }

    /// True iff the circuit contains no subtraction gate and no negative
    /// constant (division is allowed).
    pub fn check_positive(&self) -> bool {
        self.gates.iter().all(|g| match g {
            Gate::Sub(_, _) => false,
            Gate::Const(c) => !c.is_negative(),
            _ => true,
        })
    }

    /// Exact rational value of every gate, in topological order.
    pub fn eval_exact_gates(&self, xs: &[BigRational]) -> Result<Vec<BigRational>, CircuitError> {
        if xs.len() != self.n_inputs {
            return Err(CircuitError::InputArity {
                expected: self.n_inputs,
                got: xs.len(),
            });
        }
        let mut vals: Vec<BigRational> = Vec::with_capacity(self.gates.len());
        for (id, gate) in self.gates.iter().enumerate() {
            let v = match gate {
                Gate::Input(i) => xs[*i].clone(),
                Gate::Const(c) => c.clone(),
                Gate::Add(a, b) => &vals[*a] + &vals[*b],
                Gate::Sub(a, b) => &vals[*a] - &vals[*b],
                Gate::Mul(a, b) => &vals[*a] * &vals[*b],
                Gate::Div(a, b) => {
                    if vals[*b].is_zero() {
                        return Err(CircuitError::DivisionByZero { gate: id });
                    }
                    &vals[*a] / &vals[*b]
                }
            };
            vals.push(v);
        }
        Ok(vals)
    }

    /// Exact rational evaluation, one value per output gate.
    pub fn eval_exact(&self, xs: &[BigRational]) -> Result<Vec<BigRational>, CircuitError> {
        let vals = self.eval_exact_gates(xs)?;
        Ok(self.outputs.iter().map(|&o| vals[o].clone()).collect())
    }

    /// The single output value; errors if the circuit has no output.
    pub fn eval_exact_single(&self, xs: &[BigRational]) -> Result<BigRational, CircuitError> {
        self.eval_exact(xs)?
            .into_iter()
            .next()
            .ok_or(CircuitError::NoOutput)
    }

    /// Canonical text form; `parse_circuit(serialize(c))` reproduces the gate
    /// list, outputs and (inferred) input count bit-exactly.
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        for (id, gate) in self.gates.iter().enumerate() {
            match gate {
                Gate::Input(i) => out.push_str(&format!("g{id} input {i}\n")),
                Gate::Const(c) => {
                    out.push_str(&format!("g{id} const {}/{}\n", c.numer(), c.denom()))
                }
                Gate::Add(a, b) => out.push_str(&format!("g{id} add g{a} g{b}\n")),
                Gate::Sub(a, b) => out.push_str(&format!("g{id} sub g{a} g{b}\n")),
                Gate::Mul(a, b) => out.push_str(&format!("g{id} mul g{a} g{b}\n")),
                Gate::Div(a, b) => out.push_str(&format!("g{id} div g{a} g{b}\n")),
            }
        }
        for o in &self.outputs {
            out.push_str(&format!("output g{o}\n"));
        }
        out
    }
}

impl fmt::Display for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.serialize())
    }
}

fn parse_gate_ref(tok: &str, line: usize, current: usize) -> Result<GateId, CircuitParseError> {
    let id: usize = tok
        .strip_prefix('g')
        .and_then(|s| s.parse().ok())
        .ok_or(CircuitParseError::Malformed { line })?;
    if id >= current {
        return Err(CircuitParseError::ForwardReference {
            line,
            referenced: id,
        });
    }
    Ok(id)
}

/// Parses the circuit file format. The input count is inferred as one past
/// the largest input index (zero when there are no input gates).
pub fn parse_circuit(text: &str) -> Result<Circuit, CircuitParseError> {
    let mut gates: Vec<Gate> = Vec::new();
    let mut outputs: Vec<GateId> = Vec::new();
    let mut max_input: Option<usize> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('c') {
            continue;
        }
        let fields: Vec<&str> = trimmed.split_whitespace().collect();
        if fields[0] == "output" {
            if fields.len() != 2 {
                return Err(CircuitParseError::Malformed { line });
            }
            outputs.push(parse_gate_ref(fields[1], line, gates.len())?);
            continue;
        }
        let id: usize = fields[0]
            .strip_prefix('g')
            .and_then(|s| s.parse().ok())
            .ok_or(CircuitParseError::Malformed { line })?;
        if id != gates.len() {
            return Err(CircuitParseError::BadGateId {
                line,
                expected: gates.len(),
            });
        }
        let gate = match (fields.get(1).copied(), fields.len()) {
            (Some("input"), 3) => {
                let i: usize = fields[2]
                    .parse()
                    .map_err(|_| CircuitParseError::Malformed { line })?;
                max_input = Some(max_input.map_or(i, |m: usize| m.max(i)));
                Gate::Input(i)
            }
            (Some("const"), 3) => {
                let c = rat::parse_rational(fields[2])
                    .map_err(|source| CircuitParseError::BadConstant { line, source })?;
                Gate::Const(c)
            }
            (Some(op @ ("add" | "sub" | "mul" | "div")), 4) => {
                let a = parse_gate_ref(fields[2], line, id)?;
                let b = parse_gate_ref(fields[3], line, id)?;
                match op {
                    "add" => Gate::Add(a, b),
                    "sub" => Gate::Sub(a, b),
                    "mul" => Gate::Mul(a, b),
                    _ => Gate::Div(a, b),
                }
            }
            _ => return Err(CircuitParseError::Malformed { line }),
        };
        gates.push(gate);
    }
    Ok(Circuit {
        n_inputs: max_input.map_or(0, |m| m + 1),
        gates,
        outputs,
    })
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum InterpolationError {
    #[error("need at least {needed} points for degree {degree}, got {got}")]
    TooFewPoints {
        needed: usize,
        degree: usize,
        got: usize,
    },
    #[error("duplicate interpolation abscissa {0}")]
    DuplicateAbscissa(String),
    #[error("points are not on a single polynomial of degree <= {0}")]
    Inconsistent(usize),
}

/// The unique polynomial of degree <= `d` through the given points, as
/// coefficients of `λ^0..λ^d` (computed in Newton form with exact rational
/// arithmetic). Extra points beyond `d + 1` must lie on the same polynomial.
pub fn interpolate_coeffs(
    points: &[(BigRational, BigRational)],
    d: usize,
) -> Result<Vec<BigRational>, InterpolationError> {
    if points.len() < d + 1 {
        return Err(InterpolationError::TooFewPoints {
            needed: d + 1,
            degree: d,
            got: points.len(),
        });
    }
    for (i, (xi, _)) in points.iter().enumerate() {
        for (xj, _) in &points[..i] {
            if xi == xj {
                return Err(InterpolationError::DuplicateAbscissa(rat::format_rational(xi)));
            }
        }
    }
    let base = &points[..d + 1];
    // Newton divided differences.
    let mut table: Vec<BigRational> = base.iter().map(|(_, y)| y.clone()).collect();
    for level in 1..=d {
        for i in (level..=d).rev() {
            let dx = &base[i].0 - &base[i - level].0;
            table[i] = (&table[i] - &table[i - 1]) / dx;
        }
    }
    // Expand Newton form into monomial coefficients.
    let mut coeffs = vec![BigRational::zero(); d + 1];
    for i in (0..=d).rev() {
        // coeffs <- coeffs * (λ - x_i) + table[i]
        for k in (1..=d).rev() {
            let lower = coeffs[k - 1].clone();
            coeffs[k] = lower - &coeffs[k] * &base[i].0;
        }
        // k = 0 term
        let c0 = coeffs[0].clone();
        coeffs[0] = &table[i] - c0 * &base[i].0;
    }
    // Any extra points must be consistent with the fit.
    for (x, y) in &points[d + 1..] {
        let mut acc = BigRational::zero();
        for c in coeffs.iter().rev() {
            acc = acc * x + c;
        }
        if acc != *y {
            return Err(InterpolationError::Inconsistent(d));
        }
    }
    Ok(coeffs)
}
