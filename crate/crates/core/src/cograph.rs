//! Cographs: cotree construction by recursive union/co-union partitioning,
//! P4 witnesses, and the weighted independent-set count of a cograph as a
//! closed rational computation or as a positive circuit of `O(n)` gates.
//!
//! The count uses the shifted quantity `Q = P - 1` (weighted non-empty
//! independent sets): `Q = w(v)` at a leaf, `Q = Q₁Q₂ + Q₁ + Q₂` across a
//! disjoint union, `Q = Q₁ + Q₂` across a complete join, and the final
//! result is `Q + 1` at the root.

use crate::circuit::{Circuit, GateId};
use crate::graph::{Graph, Vertex};
use crate::rat::rat;
use crate::weight::WeightFunction;
use fixedbitset::FixedBitSet;
use num_rational::BigRational;
use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CographError {
    #[error("graph induces a P4 on vertices {0:?}")]
    NotCograph([Vertex; 4]),
    #[error("cannot build a cotree for the empty graph")]
    EmptyGraph,
    #[error("variable map is missing leaf vertex {0}")]
    MissingVar(Vertex),
    #[error("variable map assigns input {0} twice")]
    DuplicateVar(usize),
}

/// Union/join decomposition tree of a cograph. Internal nodes are k-ary with
/// at least two children; leaves biject with the vertices of the source.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Cotree {
    Leaf(Vertex),
    Union(Vec<Cotree>),
    Join(Vec<Cotree>),
}

impl Cotree {
    pub fn leaves(&self) -> Vec<Vertex> {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves(&self, out: &mut Vec<Vertex>) {
        match self {
            Cotree::Leaf(v) => out.push(*v),
            Cotree::Union(cs) | Cotree::Join(cs) => {
                for c in cs {
                    c.collect_leaves(out);
                }
            }
        }
    }

    pub fn vertex_count(&self) -> usize {
        match self {
            Cotree::Leaf(_) => 1,
            Cotree::Union(cs) | Cotree::Join(cs) => cs.iter().map(Cotree::vertex_count).sum(),
        }
    }

    /// The graph this cotree describes: unions are disjoint unions, joins add
    /// all cross edges.
    pub fn realize(&self) -> Graph {
        let mut g = Graph::with_vertices(self.leaves()).expect("cotree leaves are valid ids");
        self.add_edges(&mut g);
        g
    }

    fn add_edges(&self, g: &mut Graph) {
        match self {
            Cotree::Leaf(_) => {}
            Cotree::Union(cs) => {
                for c in cs {
                    c.add_edges(g);
                }
            }
            Cotree::Join(cs) => {
                for c in cs {
                    c.add_edges(g);
                }
                for (i, a) in cs.iter().enumerate() {
                    let la = a.leaves();
                    for b in &cs[i + 1..] {
                        for &u in &la {
                            for v in b.leaves() {
                                g.insert_edge(u, v).expect("distinct leaves");
                            }
                        }
                    }
                }
            }
        }
    }
}

// Debug s-expression form, e.g. `(u 1 (j 2 3))`. Not a contractual format.
impl fmt::Display for Cotree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cotree::Leaf(v) => write!(f, "{v}"),
            Cotree::Union(cs) | Cotree::Join(cs) => {
                write!(f, "({}", if matches!(self, Cotree::Union(_)) { "u" } else { "j" })?;
                for c in cs {
                    write!(f, " {c}")?;
                }
                write!(f, ")")
            }
        }
    }
}

/// Finds the vertices of an induced P4 `a-b-c-d` (returned in path order),
/// or `None` if the graph is a cograph. Quartet scan, fine at test scale.
pub fn find_induced_p4(g: &Graph) -> Option<[Vertex; 4]> {
    let vs: Vec<Vertex> = g.vertices().collect();
    let n = vs.len();
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                for d in c + 1..n {
                    let quad = [vs[a], vs[b], vs[c], vs[d]];
                    if let Some(path) = as_path(g, quad) {
                        return Some(path);
                    }
                }
            }
        }
    }
    None
}

fn as_path(g: &Graph, quad: [Vertex; 4]) -> Option<[Vertex; 4]> {
    let mut deg = [0usize; 4];
    let mut edges = 0;
    for i in 0..4 {
        for j in i + 1..4 {
            if g.has_edge(quad[i], quad[j]) {
                deg[i] += 1;
                deg[j] += 1;
                edges += 1;
            }
        }
    }
    let mut sorted = deg;
    sorted.sort_unstable();
    if edges != 3 || sorted != [1, 1, 2, 2] {
        return None;
    }
    // Walk from one endpoint.
    let start = (0..4).find(|&i| deg[i] == 1).unwrap();
    let mut path = vec![quad[start]];
    let mut prev = None;
    while path.len() < 4 {
        let cur = *path.last().unwrap();
        let next = quad
            .iter()
            .copied()
            .find(|&v| v != cur && Some(v) != prev && g.has_edge(cur, v))
            .unwrap();
        prev = Some(cur);
        path.push(next);
    }
    Some([path[0], path[1], path[2], path[3]])
}

fn components_of(g: &Graph, complemented: bool) -> Vec<FixedBitSet> {
    let cap = g.vertex_set().len();
    let mut seen = FixedBitSet::with_capacity(cap);
    let mut out = Vec::new();
    for start in g.vertices() {
        if seen.contains(start) {
            continue;
        }
        let mut comp = FixedBitSet::with_capacity(cap);
        let mut stack = vec![start];
        seen.insert(start);
        comp.insert(start);
        while let Some(u) = stack.pop() {
            let nbrs: Vec<Vertex> = if complemented {
                let mut row = g.vertex_set().clone();
                row.difference_with(g.neighbor_set(u));
                row.remove(u);
                row.ones().collect()
            } else {
                g.neighbors(u).collect()
            };
            for v in nbrs {
                if !seen.contains(v) {
                    seen.insert(v);
                    comp.insert(v);
                    stack.push(v);
                }
            }
        }
        out.push(comp);
    }
    out
}

/// Builds the cotree of `g`, or returns an induced P4 as the witness that
/// `g` is not a cograph. Recursive partition: a disconnected graph is the
/// union of its components, a co-disconnected graph the join of its
/// co-components; a graph that is neither (with `n >= 2`) contains a P4.
pub fn build_cotree(g: &Graph) -> Result<Cotree, CographError> {
    let n = g.vertex_count();
    if n == 0 {
        return Err(CographError::EmptyGraph);
    }
    if n == 1 {
        return Ok(Cotree::Leaf(g.vertices().next().unwrap()));
    }
    let comps = components_of(g, false);
    if comps.len() > 1 {
        let children = comps
            .iter()
            .map(|c| build_cotree(&g.induced_by_set(c)))
            .collect::<Result<Vec<_>, _>>()?;
        return Ok(Cotree::Union(children));
    }
    let cocomps = components_of(g, true);
    if cocomps.len() > 1 {
        let children = cocomps
            .iter()
            .map(|c| build_cotree(&g.induced_by_set(c)))
            .collect::<Result<Vec<_>, _>>()?;
        return Ok(Cotree::Join(children));
    }
    let p4 = find_induced_p4(g).expect("connected co-connected graph with n >= 2 has a P4");
    Err(CographError::NotCograph(p4))
}

fn quantity(t: &Cotree, w: &WeightFunction) -> BigRational {
    match t {
        Cotree::Leaf(v) => w.get(*v).clone(),
        Cotree::Union(cs) => {
            let mut iter = cs.iter().map(|c| quantity(c, w));
            let mut acc = iter.next().expect("internal nodes have children");
            for q in iter {
                acc = &acc + &q + acc.clone() * q;
            }
            acc
        }
        Cotree::Join(cs) => cs.iter().map(|c| quantity(c, w)).sum(),
    }
}

/// `nbwis` of the realized cograph: the weighted count of independent sets,
/// including the empty set.
pub fn cograph_count(t: &Cotree, w: &WeightFunction) -> BigRational {
    quantity(t, w) + rat(1)
}

/// Emits gates computing the weighted count of *non-empty* independent sets
/// of `t` into `c`, reading each leaf's weight from `leaf_gates`. Folds
/// children left to right: 3 gates per union fold, 1 per join fold.
pub(crate) fn emit_nonempty_count(
    c: &mut Circuit,
    t: &Cotree,
    leaf_gates: &BTreeMap<Vertex, GateId>,
) -> Result<GateId, CographError> {
    match t {
        Cotree::Leaf(v) => leaf_gates
            .get(v)
            .copied()
            .ok_or(CographError::MissingVar(*v)),
        Cotree::Union(cs) => {
            let mut acc = emit_nonempty_count(c, &cs[0], leaf_gates)?;
            for child in &cs[1..] {
                let q = emit_nonempty_count(c, child, leaf_gates)?;
                let prod = c.mul(acc, q);
                let sum = c.add(acc, q);
                acc = c.add(sum, prod);
            }
            Ok(acc)
        }
        Cotree::Join(cs) => {
            let mut acc = emit_nonempty_count(c, &cs[0], leaf_gates)?;
            for child in &cs[1..] {
                let q = emit_nonempty_count(c, child, leaf_gates)?;
                acc = c.add(acc, q);
            }
            Ok(acc)
        }
    }
}

/// Positive circuit with one input per leaf (indices from `varmap`) whose
/// single output equals `cograph_count(t, ·)`. Gate count is linear in the
/// number of leaves (at most `6n + 1`).
pub fn cograph_circuit(
    t: &Cotree,
    varmap: &BTreeMap<Vertex, usize>,
) -> Result<Circuit, CographError> {
    let leaves = t.leaves();
    let mut used = std::collections::BTreeSet::new();
    for v in &leaves {
        let idx = varmap.get(v).ok_or(CographError::MissingVar(*v))?;
        if !used.insert(*idx) {
            return Err(CographError::DuplicateVar(*idx));
        }
    }
    let n_inputs = varmap.values().copied().max().map_or(0, |m| m + 1);
    let mut c = Circuit::new(n_inputs);
    let mut leaf_gates = BTreeMap::new();
    for &v in &leaves {
        let g = c.input(varmap[&v]);
        leaf_gates.insert(v, g);
    }
    let q = emit_nonempty_count(&mut c, t, &leaf_gates)?;
    let one = c.constant(rat(1));
    let out = c.add(q, one);
    c.mark_output(out);
    Ok(c)
}
