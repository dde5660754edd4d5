//! Brute-force oracles and deterministic instance generators.
//!
//! The oracles enumerate independent sets directly (branch on the lowest-id
//! vertex, delete the closed neighbourhood on inclusion) and are the ground
//! truth every other counting route is checked against. The generators are
//! deterministic in `(kind, size, seed)` and produce strongly orderable
//! graph families plus random clique-width expressions.

use crate::cliquewidth::{CwExpression, CwNode, Label};
use crate::cograph::Cotree;
use crate::graph::{Graph, Vertex};
use crate::ordering::{verify_strong_ordering, StrongOrdering};
use crate::weight::WeightFunction;
use fixedbitset::FixedBitSet;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand_chacha::ChaCha8Rng;
use rand::{Rng, SeedableRng};
use std::str::FromStr;
use thiserror::Error;

/// Enumeration budget for `oracle_count`/`oracle_coeffs`.
pub const ORACLE_MAX_N: usize = 25;
/// Permutation budget for `oracle_orderings`.
pub const ORDERINGS_MAX_N: usize = 8;
/// Generator size cap.
pub const GENERATE_MAX_N: usize = 10_000;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TestkitError {
    #[error("oracle budget exceeded: n = {n} > {max}")]
    BudgetExceeded { n: usize, max: usize },
    #[error("instance size {0} out of range 1..={GENERATE_MAX_N}")]
    BadSize(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InstanceKind {
    Tree,
    ChainGraph,
    Cograph,
    BipartitePermutation,
    CompleteBipartite,
    RandomCwExpr,
}

impl InstanceKind {
    pub const ALL_GRAPH_KINDS: [InstanceKind; 5] = [
        InstanceKind::Tree,
        InstanceKind::ChainGraph,
        InstanceKind::Cograph,
        InstanceKind::BipartitePermutation,
        InstanceKind::CompleteBipartite,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            InstanceKind::Tree => "tree",
            InstanceKind::ChainGraph => "chain_graph",
            InstanceKind::Cograph => "cograph",
            InstanceKind::BipartitePermutation => "bipartite_permutation",
            InstanceKind::CompleteBipartite => "complete_bipartite",
            InstanceKind::RandomCwExpr => "random_cw_expr",
        }
    }
}

impl FromStr for InstanceKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "tree" => Ok(InstanceKind::Tree),
            "chain_graph" => Ok(InstanceKind::ChainGraph),
            "cograph" => Ok(InstanceKind::Cograph),
            "bipartite_permutation" => Ok(InstanceKind::BipartitePermutation),
            "complete_bipartite" => Ok(InstanceKind::CompleteBipartite),
            "random_cw_expr" => Ok(InstanceKind::RandomCwExpr),
            other => Err(format!("unknown instance kind `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InstanceSpec {
    pub kind: InstanceKind,
    pub size: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Generated {
    Graph(Graph),
    Expression(CwExpression),
}

fn rng_for(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Exact `nbwis(g, w)` by enumeration; `n <= 25` enforced.
pub fn oracle_count(g: &Graph, w: &WeightFunction) -> Result<BigRational, TestkitError> {
    let n = g.vertex_count();
    if n > ORACLE_MAX_N {
        return Err(TestkitError::BudgetExceeded { n, max: ORACLE_MAX_N });
    }
    Ok(count_rec(g, w, g.vertex_set().clone()))
}

fn is_edgeless_within(g: &Graph, remaining: &FixedBitSet) -> bool {
    remaining
        .ones()
        .all(|v| g.neighbor_set(v).is_disjoint(remaining))
}

fn count_rec(g: &Graph, w: &WeightFunction, remaining: FixedBitSet) -> BigRational {
    if is_edgeless_within(g, &remaining) {
        let mut acc = BigRational::one();
        for v in remaining.ones() {
            acc *= BigRational::one() + w.get(v);
        }
        return acc;
    }
    let v = remaining.ones().next().unwrap();
    let mut without = remaining;
    without.remove(v);
    let mut incl_set = without.clone();
    incl_set.difference_with(g.neighbor_set(v));
    let excl = count_rec(g, w, without);
    let incl = count_rec(g, w, incl_set);
    excl + w.get(v) * incl
}

/// Independent-set counts by size: entry `k` counts the sets of size `k`.
/// The vector ends at the maximum independent-set size.
pub fn oracle_coeffs(g: &Graph) -> Result<Vec<BigInt>, TestkitError> {
    let n = g.vertex_count();
    if n > ORACLE_MAX_N {
        return Err(TestkitError::BudgetExceeded { n, max: ORACLE_MAX_N });
    }
    Ok(coeffs_rec(g, g.vertex_set().clone()))
}

fn coeffs_rec(g: &Graph, remaining: FixedBitSet) -> Vec<BigInt> {
    if is_edgeless_within(g, &remaining) {
        // all subsets are independent: binomial coefficients
        let m = remaining.count_ones(..);
        let mut row = vec![BigInt::one()];
        for _ in 0..m {
            let mut next = vec![BigInt::zero(); row.len() + 1];
            for (k, val) in row.iter().enumerate() {
                next[k] += val;
                next[k + 1] += val;
            }
            row = next;
        }
        return row;
    }
    let v = remaining.ones().next().unwrap();
    let mut without = remaining;
    without.remove(v);
    let mut incl_set = without.clone();
    incl_set.difference_with(g.neighbor_set(v));
    let excl = coeffs_rec(g, without);
    let incl = coeffs_rec(g, incl_set);
    let mut out = vec![BigInt::zero(); excl.len().max(incl.len() + 1)];
    for (k, val) in excl.into_iter().enumerate() {
        out[k] += val;
    }
    for (k, val) in incl.into_iter().enumerate() {
        out[k + 1] += val;
    }
    out
}

/// All strong orderings of `g` by exhaustive permutation filtering
/// (`n <= 8`). Empty result certifies the graph is not strongly orderable.
pub fn oracle_orderings(g: &Graph) -> Result<Vec<StrongOrdering>, TestkitError> {
    let n = g.vertex_count();
    if n > ORDERINGS_MAX_N {
        return Err(TestkitError::BudgetExceeded { n, max: ORDERINGS_MAX_N });
    }
    let mut verts: Vec<Vertex> = g.vertices().collect();
    let mut out = Vec::new();
    permute(&mut verts, 0, &mut |perm| {
        let pi = StrongOrdering::new(perm.to_vec()).unwrap();
        if verify_strong_ordering(g, &pi).unwrap().is_valid() {
            out.push(pi);
        }
    });
    Ok(out)
}

fn permute(items: &mut [Vertex], k: usize, visit: &mut impl FnMut(&[Vertex])) {
    if k == items.len() {
        visit(items);
        return;
    }
    for i in k..items.len() {
        items.swap(k, i);
        permute(items, k + 1, visit);
        items.swap(k, i);
    }
}

/// Deterministic instance generation.
pub fn generate(spec: &InstanceSpec) -> Result<Generated, TestkitError> {
    if spec.size == 0 || spec.size > GENERATE_MAX_N {
        return Err(TestkitError::BadSize(spec.size));
    }
    let n = spec.size;
    let mut rng = rng_for(spec.seed);
    let g = match spec.kind {
        InstanceKind::Tree => {
            let mut edges = Vec::new();
            for v in 2..=n {
                edges.push((rng.random_range(1..v), v));
            }
            Graph::from_edges(n, &edges).unwrap()
        }
        InstanceKind::ChainGraph => {
            if n == 1 {
                Graph::new(1)
            } else {
                let p = rng.random_range(1..n);
                let q = n - p;
                let mut thresholds: Vec<usize> =
                    (0..p).map(|_| rng.random_range(0..=q)).collect();
                thresholds.sort_unstable();
                let mut edges = Vec::new();
                for (i, &b) in thresholds.iter().enumerate() {
                    for j in 1..=b {
                        edges.push((i + 1, p + j));
                    }
                }
                Graph::from_edges(n, &edges).unwrap()
            }
        }
        InstanceKind::Cograph => {
            let mut next_id = 1;
            let t = trivially_perfect_cotree(n, &mut rng, &mut next_id);
            t.realize()
        }
        InstanceKind::BipartitePermutation => {
            if n == 1 {
                Graph::new(1)
            } else {
                let p = rng.random_range(1..n);
                let q = n - p;
                let mut starts: Vec<usize> = (0..p).map(|_| rng.random_range(1..=q)).collect();
                starts.sort_unstable();
                let mut edges = Vec::new();
                let mut prev_end = 0usize;
                for (i, &a) in starts.iter().enumerate() {
                    let end = (a + rng.random_range(0..=q - a)).max(prev_end);
                    prev_end = end;
                    for j in a..=end {
                        edges.push((i + 1, p + j));
                    }
                }
                Graph::from_edges(n, &edges).unwrap()
            }
        }
        InstanceKind::CompleteBipartite => {
            if n == 1 {
                Graph::new(1)
            } else {
                let p = rng.random_range(1..n);
                let mut edges = Vec::new();
                for u in 1..=p {
                    for v in (p + 1)..=n {
                        edges.push((u, v));
                    }
                }
                Graph::from_edges(n, &edges).unwrap()
            }
        }
        InstanceKind::RandomCwExpr => {
            return Ok(Generated::Expression(random_cw_expr(n, spec.seed)));
        }
    };
    Ok(Generated::Graph(g))
}

/// As [`generate`] for graph kinds, unwrapping the graph.
pub fn generate_graph(kind: InstanceKind, size: usize, seed: u64) -> Graph {
    match generate(&InstanceSpec { kind, size, seed }).expect("valid spec") {
        Generated::Graph(g) => g,
        Generated::Expression(_) => panic!("{} is not a graph kind", kind.name()),
    }
}

fn split_sizes(n: usize, parts: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let mut sizes = vec![1usize; parts];
    for _ in 0..n - parts {
        let i = rng.random_range(0..parts);
        sizes[i] += 1;
    }
    sizes
}

/// Random cotree restricted to disjoint unions and universal-vertex joins.
/// The realized graphs are trivially perfect, hence strongly orderable; the
/// unrestricted shape (see [`random_cotree`]) can realize graphs that have
/// no strong ordering at all.
fn trivially_perfect_cotree(n: usize, rng: &mut ChaCha8Rng, next_id: &mut Vertex) -> Cotree {
    if n == 1 {
        let leaf = Cotree::Leaf(*next_id);
        *next_id += 1;
        return leaf;
    }
    if rng.random_bool(0.5) {
        let leaf = Cotree::Leaf(*next_id);
        *next_id += 1;
        let rest = trivially_perfect_cotree(n - 1, rng, next_id);
        Cotree::Join(vec![leaf, rest])
    } else {
        let parts = rng.random_range(2..=n.min(4));
        let children = split_sizes(n, parts, rng)
            .into_iter()
            .map(|s| trivially_perfect_cotree(s, rng, next_id))
            .collect();
        Cotree::Union(children)
    }
}

/// Unrestricted random cotree with `n` leaves labelled `1..=n`.
pub fn random_cotree(n: usize, seed: u64) -> Cotree {
    assert!(n >= 1);
    let mut rng = rng_for(seed);
    let mut next_id = 1;
    random_cotree_rec(n, &mut rng, &mut next_id)
}

fn random_cotree_rec(n: usize, rng: &mut ChaCha8Rng, next_id: &mut Vertex) -> Cotree {
    if n == 1 {
        let leaf = Cotree::Leaf(*next_id);
        *next_id += 1;
        return leaf;
    }
    let parts = rng.random_range(2..=n.min(4));
    let children: Vec<Cotree> = split_sizes(n, parts, rng)
        .into_iter()
        .map(|s| random_cotree_rec(s, rng, next_id))
        .collect();
    if rng.random_bool(0.5) {
        Cotree::Union(children)
    } else {
        Cotree::Join(children)
    }
}

/// Random well-formed expression with `n` create-leaves and 2 to 4 labels.
pub fn random_cw_expr(n: usize, seed: u64) -> CwExpression {
    assert!(n >= 1);
    let mut rng = rng_for(seed);
    let labels: Label = rng.random_range(2..=4);
    let mut next_id = 1;
    let root = random_cw_rec(n, labels, &mut rng, &mut next_id);
    CwExpression::new(labels, root).expect("generator emits valid expressions")
}

fn random_cw_rec(n: usize, labels: Label, rng: &mut ChaCha8Rng, next_id: &mut Vertex) -> CwNode {
    let mut node = if n == 1 {
        let v = *next_id;
        *next_id += 1;
        CwNode::Create {
            label: rng.random_range(1..=labels),
            vertex: v,
        }
    } else {
        let left = rng.random_range(1..n);
        let a = random_cw_rec(left, labels, rng, next_id);
        let b = random_cw_rec(n - left, labels, rng, next_id);
        CwNode::Union(Box::new(a), Box::new(b))
    };
    for _ in 0..rng.random_range(0..=2) {
        let i = rng.random_range(1..=labels);
        let mut j = rng.random_range(1..=labels);
        while j == i {
            j = rng.random_range(1..=labels);
        }
        node = if rng.random_bool(0.6) {
            CwNode::AddEdges { i, j, child: Box::new(node) }
        } else {
            CwNode::Relabel { i, j, child: Box::new(node) }
        };
    }
    node
}

/// Erdős–Rényi-style random graph on `1..=n` (density varies with the seed).
pub fn random_graph(n: usize, seed: u64) -> Graph {
    let mut rng = rng_for(seed);
    let p: f64 = rng.random_range(0.15..0.75);
    let mut edges = Vec::new();
    for u in 1..=n {
        for v in (u + 1)..=n {
            if rng.random_bool(p) {
                edges.push((u, v));
            }
        }
    }
    Graph::from_edges(n, &edges).unwrap()
}

/// Strictly positive random weights with numerators and denominators in
/// `1..=bound`.
pub fn random_positive_weights(g: &Graph, seed: u64, bound: u32) -> WeightFunction {
    let mut rng = rng_for(seed);
    let mut w = WeightFunction::unit();
    for v in g.vertices() {
        let num = rng.random_range(1..=bound) as i64;
        let den = rng.random_range(1..=bound) as i64;
        w.set(v, BigRational::new(num.into(), den.into())).unwrap();
    }
    w
}

/// Weights drawn uniformly from a fixed palette (zero allowed).
pub fn weights_from_choices(g: &Graph, seed: u64, choices: &[BigRational]) -> WeightFunction {
    assert!(!choices.is_empty());
    let mut rng = rng_for(seed);
    let mut w = WeightFunction::unit();
    for v in g.vertices() {
        let pick = choices[rng.random_range(0..choices.len())].clone();
        w.set(v, pick).unwrap();
    }
    w
}

/// Vertices reachable from `start`.
#[cfg(test)]
pub(crate) fn component_of(g: &Graph, start: Vertex) -> Vec<Vertex> {
    let mut seen = std::collections::BTreeSet::new();
    let mut stack = vec![start];
    seen.insert(start);
    while let Some(u) = stack.pop() {
        for v in g.neighbors(u) {
            if seen.insert(v) {
                stack.push(v);
            }
        }
    }
    seen.into_iter().collect()
}
