//! Strong orderings: verification, search, and the structural checks on the
//! first vertex (cograph neighbourhood, chain second neighbourhood).
//!
//! An ordering `v_1..v_n` is *strong* when for all positions `i < j` and
//! `k < l`, if `v_i v_k`, `v_i v_l` and `v_k v_j` are edges then `v_j v_l` is
//! an edge too. Graphs admitting one are strongly orderable. The verifier is
//! a direct transliteration of that condition; the finder is a pruned
//! backtracking search behind a node budget, preceded by a handful of cheap
//! candidate orders that cover the structured graph families (paths, chain
//! graphs, staircase bigraphs) without any search at all.

use crate::graph::{two_coloring, Graph, Vertex};
use fixedbitset::FixedBitSet;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OrderingError {
    #[error("duplicate vertex {0} in ordering")]
    DuplicateVertex(Vertex),
    #[error("ordering is not a permutation of the graph's vertices")]
    NotAPermutation,
    #[error("unknown vertex {0}")]
    UnknownVertex(Vertex),
    #[error("search budget exhausted after {explored} nodes")]
    BudgetExceeded { explored: u64 },
    #[error("malformed ordering file: {0}")]
    MalformedFile(String),
}

/// A vertex permutation intended as a strong ordering. Construction only
/// checks that it is duplicate-free; pair it with a graph via
/// [`verify_strong_ordering`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StrongOrdering {
    order: Vec<Vertex>,
}

impl StrongOrdering {
    pub fn new(order: Vec<Vertex>) -> Result<Self, OrderingError> {
        let mut seen = std::collections::BTreeSet::new();
        for &v in &order {
            if v == 0 {
                return Err(OrderingError::UnknownVertex(0));
            }
            if !seen.insert(v) {
                return Err(OrderingError::DuplicateVertex(v));
            }
        }
        Ok(StrongOrdering { order })
    }

    pub fn order(&self) -> &[Vertex] {
        &self.order
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn first(&self) -> Option<Vertex> {
        self.order.first().copied()
    }

    /// True iff the ordering is a permutation of `g`'s vertex set.
    pub fn matches_graph(&self, g: &Graph) -> bool {
        self.order.len() == g.vertex_count() && self.order.iter().all(|&v| g.contains_vertex(v))
    }

    /// Keeps only the vertices in `keep`, preserving relative order.
    pub fn restrict(&self, keep: &FixedBitSet) -> StrongOrdering {
        StrongOrdering {
            order: self
                .order
                .iter()
                .copied()
                .filter(|&v| v < keep.len() && keep.contains(v))
                .collect(),
        }
    }

    /// Position lookup table sized for ids `< cap`; absent ids map to
    /// `usize::MAX`.
    pub(crate) fn position_table(&self, cap: usize) -> Vec<usize> {
        let mut pos = vec![usize::MAX; cap];
        for (i, &v) in self.order.iter().enumerate() {
            if v < cap {
                pos[v] = i;
            }
        }
        pos
    }

    /// Parses the ordering file format: one line of space-separated ids.
    pub fn parse(text: &str) -> Result<Self, OrderingError> {
        let mut order = Vec::new();
        for tok in text.split_whitespace() {
            let v: Vertex = tok
                .parse()
                .map_err(|_| OrderingError::MalformedFile(format!("bad vertex id `{tok}`")))?;
            order.push(v);
        }
        StrongOrdering::new(order)
    }
}

// Display is a single space-joined line, matching the ordering file format.
impl fmt::Display for StrongOrdering {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let strs: Vec<String> = self.order.iter().map(|v| v.to_string()).collect();
        write!(f, "{}", strs.join(" "))
    }
}

/// A quadruple witnessing that an ordering is not strong: `vi vk`, `vi vl`,
/// `vk vj` are edges with `pos(vi) < pos(vj)` and `pos(vk) < pos(vl)`, but
/// `vj vl` is not an edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Violation {
    pub vi: Vertex,
    pub vj: Vertex,
    pub vk: Vertex,
    pub vl: Vertex,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Valid,
    Invalid(Violation),
}

impl Verdict {
    pub fn is_valid(&self) -> bool {
        matches!(self, Verdict::Valid)
    }
}

/// Checks the strong-ordering condition on every applicable quadruple,
/// returning the first violation found (scanning in position order).
pub fn verify_strong_ordering(g: &Graph, pi: &StrongOrdering) -> Result<Verdict, OrderingError> {
    if !pi.matches_graph(g) {
        return Err(OrderingError::NotAPermutation);
    }
    let cap = pi.order.iter().copied().max().unwrap_or(0) + 1;
    let pos = pi.position_table(cap);
    for &vi in &pi.order {
        let i = pos[vi];
        // Neighbours of vi sorted by position: candidate (vk, vl) pairs.
        let mut nbrs: Vec<Vertex> = g.neighbors(vi).collect();
        nbrs.sort_by_key(|&v| pos[v]);
        for (a, &vk) in nbrs.iter().enumerate() {
            for &vl in &nbrs[a + 1..] {
                for vj in g.neighbors(vk) {
                    if pos[vj] > i && vj != vl && !g.has_edge(vj, vl) {
                        return Ok(Verdict::Invalid(Violation { vi, vj, vk, vl }));
                    }
                }
            }
        }
    }
    Ok(Verdict::Valid)
}

/// Default node budget for [`find_strong_ordering`].
pub const DEFAULT_SEARCH_BUDGET: u64 = 1_000_000;

/// Finds a strong ordering if one exists. Tries a few verified candidate
/// orders first, then falls back to an exhaustive backtracking search over
/// prefixes; a prefix is pruned as soon as some quadruple is violated in
/// every completion. `Ok(None)` means the search space was exhausted, i.e.
/// the graph is certified not strongly orderable.
pub fn find_strong_ordering(
    g: &Graph,
    budget: u64,
) -> Result<Option<StrongOrdering>, OrderingError> {
    let n = g.vertex_count();
    if n == 0 {
        return Ok(Some(StrongOrdering { order: vec![] }));
    }

    for cand in candidate_orders(g) {
        let pi = StrongOrdering { order: cand };
        if verify_strong_ordering(g, &pi)?.is_valid() {
            return Ok(Some(pi));
        }
    }

    let cap = g.vertices().max().unwrap() + 1;
    // Static branch order: low degree first.
    let mut branch: Vec<Vertex> = g.vertices().collect();
    branch.sort_by_key(|&v| (g.degree(v), v));

    let mut st = Search {
        g,
        pos: vec![usize::MAX; cap],
        placed: FixedBitSet::with_capacity(cap),
        prefix: Vec::with_capacity(n),
        branch,
        nodes: 0,
        budget,
    };
    match st.dfs() {
        SearchOutcome::Found => {
            let pi = StrongOrdering { order: st.prefix };
            debug_assert!(verify_strong_ordering(g, &pi).unwrap().is_valid());
            Ok(Some(pi))
        }
        SearchOutcome::Exhausted => Ok(None),
        SearchOutcome::OutOfBudget => Err(OrderingError::BudgetExceeded { explored: st.nodes }),
    }
}

fn candidate_orders(g: &Graph) -> Vec<Vec<Vertex>> {
    let mut out = Vec::new();
    let ids: Vec<Vertex> = g.vertices().collect();
    out.push(ids.clone());
    let mut by_degree = ids.clone();
    by_degree.sort_by_key(|&v| (g.degree(v), v));
    out.push(by_degree);
    if let Some((a, b)) = two_coloring(g) {
        let mut ab = a.clone();
        ab.extend(&b);
        let mut ba = b.clone();
        ba.extend(&a);
        out.push(ab);
        out.push(ba);
        let deg_sort = |side: &[Vertex]| {
            let mut s = side.to_vec();
            s.sort_by_key(|&v| (g.degree(v), v));
            s
        };
        let (da, db) = (deg_sort(&a), deg_sort(&b));
        let mut dab = da.clone();
        dab.extend(&db);
        let mut dba = db;
        dba.extend(&da);
        out.push(dab);
        out.push(dba);
    }
    out
}

enum SearchOutcome {
    Found,
    Exhausted,
    OutOfBudget,
}

struct Search<'a> {
    g: &'a Graph,
    pos: Vec<usize>,
    placed: FixedBitSet,
    prefix: Vec<Vertex>,
    branch: Vec<Vertex>,
    nodes: u64,
    budget: u64,
}

impl Search<'_> {
    fn dfs(&mut self) -> SearchOutcome {
        if self.prefix.len() == self.branch.len() {
            // The incremental pruning should have caught every violation;
            // verify as a safety net and treat an invalid leaf as dead.
            let pi = StrongOrdering {
                order: self.prefix.clone(),
            };
            return if verify_strong_ordering(self.g, &pi).unwrap().is_valid() {
                SearchOutcome::Found
            } else {
                SearchOutcome::Exhausted
            };
        }
        for idx in 0..self.branch.len() {
            let u = self.branch[idx];
            if self.placed.contains(u) {
                continue;
            }
            self.nodes += 1;
            if self.nodes > self.budget {
                return SearchOutcome::OutOfBudget;
            }
            self.pos[u] = self.prefix.len();
            self.placed.insert(u);
            self.prefix.push(u);
            if self.prefix_consistent(u) {
                match self.dfs() {
                    SearchOutcome::Exhausted => {}
                    other => return other,
                }
            }
            self.prefix.pop();
            self.placed.remove(u);
            self.pos[u] = usize::MAX;
        }
        SearchOutcome::Exhausted
    }

    /// After placing `u` last, checks whether some quadruple is now violated
    /// in every completion of the prefix. New violations must use `u` as
    /// either `v_i` or `v_k`: the roles `v_j`/`v_l` of an unplaced vertex
    /// already satisfy their position constraints, so placing `u` at the end
    /// cannot newly decide them.
    fn prefix_consistent(&self, u: Vertex) -> bool {
        let g = self.g;
        // u as v_i: v_j must be unplaced; v_k placed; v_l unplaced or after v_k.
        for c in g.neighbors(u) {
            if !self.placed.contains(c) {
                continue;
            }
            for b in g.neighbors(c) {
                if self.placed.contains(b) {
                    continue;
                }
                for d in g.neighbors(u) {
                    if d != b
                        && (!self.placed.contains(d) || self.pos[d] > self.pos[c])
                        && !g.has_edge(b, d)
                    {
                        return false;
                    }
                }
            }
        }
        // u as v_k: v_l must be unplaced; v_i placed; v_j unplaced or after v_i.
        for a in g.neighbors(u) {
            if !self.placed.contains(a) {
                continue;
            }
            for b in g.neighbors(u) {
                if self.placed.contains(b) && self.pos[b] <= self.pos[a] {
                    continue;
                }
                for d in g.neighbors(a) {
                    if !self.placed.contains(d) && d != b && !g.has_edge(b, d) {
                        return false;
                    }
                }
            }
        }
        true
    }
}

/// Neighbours of `v` sorted by their position in `pi`. For a verified
/// ordering with `v` first, this is a chain order of `N(v)` in
/// `G[N(v), N²(v)]` (nested neighbourhoods).
pub fn chain_order(g: &Graph, pi: &StrongOrdering, v: Vertex) -> Result<Vec<Vertex>, OrderingError> {
    if !g.contains_vertex(v) {
        return Err(OrderingError::UnknownVertex(v));
    }
    if !pi.matches_graph(g) {
        return Err(OrderingError::NotAPermutation);
    }
    let cap = pi.order.iter().copied().max().unwrap_or(0) + 1;
    let pos = pi.position_table(cap);
    let mut nbrs: Vec<Vertex> = g.neighbors(v).collect();
    nbrs.sort_by_key(|&u| pos[u]);
    Ok(nbrs)
}

/// True iff the neighbourhoods of the `u_class` vertices in the bipartite
/// graph `h` are totally ordered by inclusion along `order`
/// (`N(order[i]) ⊆ N(order[i+1])`).
pub fn verify_chain(h: &Graph, u_class: &[Vertex], order: &[Vertex]) -> Result<bool, OrderingError> {
    let class: std::collections::BTreeSet<Vertex> = u_class.iter().copied().collect();
    let given: std::collections::BTreeSet<Vertex> = order.iter().copied().collect();
    if order.len() != u_class.len() || class != given {
        return Err(OrderingError::NotAPermutation);
    }
    for w in order.windows(2) {
        if !h.neighbor_set(w[0]).is_subset(h.neighbor_set(w[1])) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Structural report on the first vertex `u` of a verified strong ordering:
/// `G[N(u)]` should induce a cograph and `G[N(u), N²(u)]` a chain graph
/// along the chain order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FirstVertexReport {
    pub cograph_ok: bool,
    pub chain_ok: bool,
}

pub fn verify_first_vertex_properties(
    g: &Graph,
    pi: &StrongOrdering,
) -> Result<FirstVertexReport, OrderingError> {
    if !pi.matches_graph(g) {
        return Err(OrderingError::NotAPermutation);
    }
    let Some(u) = pi.first() else {
        return Ok(FirstVertexReport {
            cograph_ok: true,
            chain_ok: true,
        });
    };
    let (n1, n2) = g.neighborhoods(u).expect("first vertex is in the graph");
    let induced = g.induced_subgraph(n1.iter().copied()).unwrap();
    let cograph_ok = crate::cograph::find_induced_p4(&induced).is_none();
    let h = g.bipartite_between(&n1, &n2).unwrap();
    let order = chain_order(g, pi, u)?;
    let chain_ok = verify_chain(&h, &n1, &order)?;
    Ok(FirstVertexReport { cograph_ok, chain_ok })
}
