//! Counting weighted independent sets on strongly orderable graphs by
//! peel-and-reweight.
//!
//! Let `v` be the first vertex of a strong ordering and `v_1..v_k` its
//! neighbourhood in ordering position. With `G_i` the subgraph induced by
//! `{v_1..v_{i-1}} \ N(v_i)` (always a cograph here), the weights of the
//! neighbours are adjusted to
//!
//! ```text
//! w'(v_i) = w(v_i) · nbwis(G_i, w) / ((1 + w(v)) · nbwis(G_i, w'))
//! ```
//!
//! and all other weights kept, which gives the peel identity
//! `nbwis(G, w) = (1 + w(v)) · nbwis(G \ v, w')`. Iterating until the graph
//! is empty multiplies out the full count. The same recursion can instead be
//! emitted as a positive arithmetic circuit over the vertex weights (the
//! cograph counts become subcircuits and each reweight a mul/mul/div), and
//! per-size counts fall out of evaluating at uniform weights `λ = 1..n+1`
//! and interpolating.

use crate::circuit::{interpolate_coeffs, Circuit, GateId};
use crate::cograph::{build_cotree, cograph_count, emit_nonempty_count};
use crate::graph::{Graph, Vertex};
use crate::ordering::{
    chain_order, find_strong_ordering, verify_strong_ordering, OrderingError, StrongOrdering,
    Verdict, Violation, DEFAULT_SEARCH_BUDGET,
};
use crate::rat::rat;
use crate::weight::WeightFunction;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CountError {
    #[error("vertex {0} has a non-positive weight; this algorithm requires w > 0")]
    NonPositiveWeight(Vertex),
    #[error("graph has no strong ordering")]
    NoStrongOrdering,
    #[error("supplied ordering is not a strong ordering (violating quadruple {0:?})")]
    InvalidOrdering(Violation),
    #[error("cannot peel an empty graph")]
    EmptyGraph,
    #[error(transparent)]
    Ordering(#[from] OrderingError),
}

/// One peel step: the removed vertex, its chain-ordered neighbourhood, the
/// cograph pieces `G_i`, the factor `1 + w(v)`, and the reweighted function
/// on the remaining graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReweightStep {
    pub peeled: Vertex,
    pub factor: BigRational,
    pub chain: Vec<Vertex>,
    pub cograph_parts: Vec<Vec<Vertex>>,
    pub next_weights: WeightFunction,
}

fn check_positive(g: &Graph, w: &WeightFunction) -> Result<(), CountError> {
    match g.vertices().find(|&v| !w.get(v).is_positive()) {
        Some(v) => Err(CountError::NonPositiveWeight(v)),
        None => Ok(()),
    }
}

/// `nbwis(G_i, ·)` for a chain prefix piece, via its cotree. The piece is an
/// induced subgraph of the first vertex's neighbourhood, which a verified
/// strong ordering guarantees to be a cograph.
fn part_count(g: &Graph, part: &[Vertex], w: &WeightFunction) -> BigRational {
    if part.is_empty() {
        return rat(1);
    }
    let sub = g
        .induced_subgraph(part.iter().copied())
        .expect("chain vertices are in the graph");
    let t = build_cotree(&sub)
        .expect("neighbourhood of the first vertex of a strong ordering induces a cograph");
    cograph_count(&t, w)
}

/// Performs one reweight step at the first vertex of `pi`.
///
/// Preconditions: `pi` is a verified strong ordering of `g` and `w > 0` on
/// all vertices; positivity is checked, the ordering only cheaply.
pub fn reweight_first(
    g: &Graph,
    pi: &StrongOrdering,
    w: &WeightFunction,
) -> Result<ReweightStep, CountError> {
    if !pi.matches_graph(g) {
        return Err(OrderingError::NotAPermutation.into());
    }
    check_positive(g, w)?;
    let v = pi.first().ok_or(CountError::EmptyGraph)?;
    let chain = chain_order(g, pi, v)?;
    debug_assert!(chain_is_nested(g, v, &chain), "chain property violated");
    let factor = rat(1) + w.get(v);
    let mut next = w.clone();
    let mut parts = Vec::with_capacity(chain.len());
    for (i, &vi) in chain.iter().enumerate() {
        let part: Vec<Vertex> = chain[..i]
            .iter()
            .copied()
            .filter(|&u| !g.has_edge(u, vi))
            .collect();
        let numer = part_count(g, &part, w);
        let denom = part_count(g, &part, &next);
        let wi = w.get(vi) * numer / (&factor * denom);
        debug_assert!(wi.is_positive());
        next.set(vi, wi).expect("reweighted values stay positive");
        parts.push(part);
    }
    Ok(ReweightStep {
        peeled: v,
        factor,
        chain,
        cograph_parts: parts,
        next_weights: next,
    })
}

/// Nested-neighbourhood check in `H = G[N(v), N²(v)]` along the chain.
#[allow(dead_code)]
fn chain_is_nested(g: &Graph, v: Vertex, chain: &[Vertex]) -> bool {
    let Ok((_, n2)) = g.neighborhoods(v) else {
        return false;
    };
    let n2set: std::collections::BTreeSet<Vertex> = n2.into_iter().collect();
    chain.windows(2).all(|pair| {
        g.neighbors(pair[0])
            .filter(|u| n2set.contains(u))
            .all(|u| g.has_edge(pair[1], u))
    })
}

fn resolve_ordering(
    g: &Graph,
    pi: Option<&StrongOrdering>,
    budget: u64,
) -> Result<StrongOrdering, CountError> {
    match pi {
        Some(p) => match verify_strong_ordering(g, p)? {
            Verdict::Valid => Ok(p.clone()),
            Verdict::Invalid(violation) => Err(CountError::InvalidOrdering(violation)),
        },
        None => find_strong_ordering(g, budget)?.ok_or(CountError::NoStrongOrdering),
    }
}

/// Shared peel loop; `on_step` sees the state before each peel. The ordering
/// must already be verified: restricting a strong ordering to an induced
/// subgraph keeps it strong, which the debug assertion re-checks per step.
fn peel_loop(
    g: &Graph,
    w: &WeightFunction,
    pi: &StrongOrdering,
    mut on_step: impl FnMut(&Graph, &StrongOrdering, &ReweightStep),
) -> Result<BigRational, CountError> {
    let mut cur_g = g.clone();
    let mut cur_pi = pi.clone();
    let mut cur_w = w.clone();
    let mut total = rat(1);
    while !cur_g.is_empty() {
        debug_assert!(
            verify_strong_ordering(&cur_g, &cur_pi).unwrap().is_valid(),
            "restriction of a strong ordering stopped being strong"
        );
        let step = reweight_first(&cur_g, &cur_pi, &cur_w)?;
        on_step(&cur_g, &cur_pi, &step);
        total *= &step.factor;
        cur_g = cur_g.remove_vertex(step.peeled);
        cur_pi = cur_pi.restrict(cur_g.vertex_set());
        cur_w = step.next_weights;
    }
    Ok(total)
}

/// `nbwis(g, w)` for a strongly orderable graph and strictly positive
/// weights, with the default search budget when no ordering is supplied.
pub fn count_so(
    g: &Graph,
    w: &WeightFunction,
    pi: Option<&StrongOrdering>,
) -> Result<BigRational, CountError> {
    count_so_with_budget(g, w, pi, DEFAULT_SEARCH_BUDGET)
}

pub fn count_so_with_budget(
    g: &Graph,
    w: &WeightFunction,
    pi: Option<&StrongOrdering>,
    budget: u64,
) -> Result<BigRational, CountError> {
    check_positive(g, w)?;
    if g.is_empty() {
        return Ok(rat(1));
    }
    let pi = resolve_ordering(g, pi, budget)?;
    peel_loop(g, w, &pi, |_, _, _| {})
}

/// State captured before one peel.
#[derive(Debug, Clone)]
pub struct PeelRecord {
    pub graph: Graph,
    pub ordering: StrongOrdering,
    pub step: ReweightStep,
}

/// The full peel sequence (for inspection and the property tests), together
/// with the resulting count.
pub fn peel_trace(
    g: &Graph,
    w: &WeightFunction,
    pi: &StrongOrdering,
) -> Result<(BigRational, Vec<PeelRecord>), CountError> {
    let verified = resolve_ordering(g, Some(pi), 0)?;
    let mut records = Vec::new();
    let total = peel_loop(g, w, &verified, |graph, ordering, step| {
        records.push(PeelRecord {
            graph: graph.clone(),
            ordering: ordering.clone(),
            step: step.clone(),
        });
    })?;
    Ok((total, records))
}

/// Compiles the peel recursion into a positive circuit with one input per
/// vertex (inputs indexed by ascending vertex id): the output equals
/// `count_so(g, ·, pi)` for every strictly positive weight vector.
pub fn build_counting_circuit(g: &Graph, pi: &StrongOrdering) -> Result<Circuit, CountError> {
    let pi = resolve_ordering(g, Some(pi), 0)?;
    let mut c = Circuit::new(g.vertex_count());
    let mut wgate: BTreeMap<Vertex, GateId> = BTreeMap::new();
    for (idx, v) in g.vertices().enumerate() {
        let gate = c.input(idx);
        wgate.insert(v, gate);
    }
    let one = c.constant(rat(1));
    let mut acc: Option<GateId> = None;
    let mut cur_g = g.clone();
    let mut cur_pi = pi;
    while !cur_g.is_empty() {
        let v = cur_pi.first().unwrap();
        let factor = c.add(one, wgate[&v]);
        let chain = chain_order(&cur_g, &cur_pi, v)?;
        let old_gates = wgate.clone();
        for (i, &vi) in chain.iter().enumerate() {
            let part: Vec<Vertex> = chain[..i]
                .iter()
                .copied()
                .filter(|&u| !cur_g.has_edge(u, vi))
                .collect();
            let (p_old, p_new) = if part.is_empty() {
                (one, one)
            } else {
                let sub = cur_g.induced_subgraph(part.iter().copied()).unwrap();
                let t = build_cotree(&sub).expect(
                    "neighbourhood of the first vertex of a strong ordering induces a cograph",
                );
                let q_old = emit_nonempty_count(&mut c, &t, &old_gates)
                    .expect("all vertices have weight gates");
                let p_old = c.add(q_old, one);
                let q_new =
                    emit_nonempty_count(&mut c, &t, &wgate).expect("all vertices have weight gates");
                let p_new = c.add(q_new, one);
                (p_old, p_new)
            };
            let numer = c.mul(old_gates[&vi], p_old);
            let denom = c.mul(factor, p_new);
            let updated = c.div(numer, denom);
            wgate.insert(vi, updated);
        }
        acc = Some(match acc {
            None => factor,
            Some(a) => c.mul(a, factor),
        });
        cur_g = cur_g.remove_vertex(v);
        cur_pi = cur_pi.restrict(cur_g.vertex_set());
    }
    let out = acc.unwrap_or(one);
    c.mark_output(out);
    debug_assert!(c.check_positive());
    Ok(c)
}

/// Number of independent sets of each size, by evaluating the weighted count
/// at uniform weights `λ = 1..n+1` and interpolating the degree-`n`
/// polynomial. Trailing zero entries are trimmed.
pub fn count_by_size(g: &Graph, pi: Option<&StrongOrdering>) -> Result<Vec<BigInt>, CountError> {
    count_by_size_with_budget(g, pi, DEFAULT_SEARCH_BUDGET)
}

pub fn count_by_size_with_budget(
    g: &Graph,
    pi: Option<&StrongOrdering>,
    budget: u64,
) -> Result<Vec<BigInt>, CountError> {
    let n = g.vertex_count();
    if n == 0 {
        return Ok(vec![BigInt::one()]);
    }
    let pi = resolve_ordering(g, pi, budget)?;
    let mut points = Vec::with_capacity(n + 1);
    for lambda in 1..=(n as i64 + 1) {
        let w = WeightFunction::uniform(g, &rat(lambda));
        let value = peel_loop(g, &w, &pi, |_, _, _| {})?;
        points.push((rat(lambda), value));
    }
    let coeffs = interpolate_coeffs(&points, n).expect("distinct abscissas, n+1 points");
    let mut out: Vec<BigInt> = coeffs
        .into_iter()
        .map(|c| {
            assert!(c.is_integer() && !c.is_negative(), "per-size counts must be naturals");
            c.to_integer()
        })
        .collect();
    while out.len() > 1 && out.last().map(BigInt::is_zero) == Some(true) {
        out.pop();
    }
    Ok(out)
}
