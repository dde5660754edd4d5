//! Clique-width expressions and the label-subset dynamic program.
//!
//! An expression over labels `1..=l` builds a labelled graph with four
//! operations: create a labelled vertex, disjoint union, add all edges
//! between two labels, and relabel. For every subexpression `σ` and label
//! subset `Γ` the DP computes `c(σ, Γ)`: the weighted independent-set count
//! of the subgraph of `σ`'s graph induced by the vertices labelled in `Γ`.
//! The root value at the full label set is the count for the whole graph.
//! Runtime is `O(2^l)` entries per AST node, exact rational arithmetic
//! throughout (the add-edges rule subtracts, but results stay >= 1).
//!
//! Expression file format: header line `labels <l>`, then one s-expression
//! `expr := (v <label> <vertex>) | (u <expr> <expr>) | (e <i> <j> <expr>)
//! | (r <i> <j> <expr>)`, where `e` adds the edges between labels `i` and
//! `j` and `r` relabels `i` to `j`.

use crate::graph::{Graph, Vertex};
use crate::weight::WeightFunction;
use num_rational::BigRational;
use num_traits::One;
use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

/// Hard cap on the label count: `Γ` iterates over `2^l` subsets.
pub const MAX_LABELS: u8 = 16;

pub type Label = u8;
pub type LabelSet = u32;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CwError {
    #[error("label count must be between 1 and {MAX_LABELS}, got {0}")]
    BadLabelCount(usize),
    #[error("label {label} out of range 1..={max}")]
    LabelOutOfRange { label: Label, max: Label },
    #[error("labels must differ in add-edges/relabel, got {0} twice")]
    EqualLabels(Label),
    #[error("vertex {0} created twice")]
    DuplicateVertex(Vertex),
    #[error("vertex ids must be >= 1")]
    ZeroVertex,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CwParseError {
    #[error("missing `labels <l>` header")]
    MissingHeader,
    #[error("byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error(transparent)]
    Invalid(#[from] CwError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CwNode {
    Create { label: Label, vertex: Vertex },
    Union(Box<CwNode>, Box<CwNode>),
    AddEdges { i: Label, j: Label, child: Box<CwNode> },
    Relabel { i: Label, j: Label, child: Box<CwNode> },
}

/// A validated expression: labels in range, `i != j` in add-edges/relabel,
/// create-vertices pairwise distinct.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CwExpression {
    num_labels: Label,
    root: CwNode,
}

impl CwExpression {
    pub fn new(num_labels: Label, root: CwNode) -> Result<Self, CwError> {
        if num_labels == 0 || num_labels > MAX_LABELS {
            return Err(CwError::BadLabelCount(num_labels as usize));
        }
        let mut seen = std::collections::BTreeSet::new();
        validate(&root, num_labels, &mut seen)?;
        Ok(CwExpression { num_labels, root })
    }

    pub fn num_labels(&self) -> Label {
        self.num_labels
    }

    pub fn root(&self) -> &CwNode {
        &self.root
    }

    /// Number of AST nodes.
    pub fn size(&self) -> usize {
        fn sz(n: &CwNode) -> usize {
            match n {
                CwNode::Create { .. } => 1,
                CwNode::Union(a, b) => 1 + sz(a) + sz(b),
                CwNode::AddEdges { child, .. } | CwNode::Relabel { child, .. } => 1 + sz(child),
            }
        }
        sz(&self.root)
    }

    /// Create-vertices in creation (left-to-right) order.
    pub fn vertices(&self) -> Vec<Vertex> {
        fn walk(n: &CwNode, out: &mut Vec<Vertex>) {
            match n {
                CwNode::Create { vertex, .. } => out.push(*vertex),
                CwNode::Union(a, b) => {
                    walk(a, out);
                    walk(b, out);
                }
                CwNode::AddEdges { child, .. } | CwNode::Relabel { child, .. } => walk(child, out),
            }
        }
        let mut out = Vec::new();
        walk(&self.root, &mut out);
        out
    }

    pub fn full_label_set(&self) -> LabelSet {
        (1u32 << self.num_labels) - 1
    }

    pub fn serialize(&self) -> String {
        format!("labels {}\n{}\n", self.num_labels, render(&self.root))
    }
}

impl fmt::Display for CwExpression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.serialize())
    }
}

fn validate(
    node: &CwNode,
    max: Label,
    seen: &mut std::collections::BTreeSet<Vertex>,
) -> Result<(), CwError> {
    let check_label = |l: Label| {
        if l == 0 || l > max {
            Err(CwError::LabelOutOfRange { label: l, max })
        } else {
            Ok(())
        }
    };
    match node {
        CwNode::Create { label, vertex } => {
            check_label(*label)?;
            if *vertex == 0 {
                return Err(CwError::ZeroVertex);
            }
            if !seen.insert(*vertex) {
                return Err(CwError::DuplicateVertex(*vertex));
            }
            Ok(())
        }
        CwNode::Union(a, b) => {
            validate(a, max, seen)?;
            validate(b, max, seen)
        }
        CwNode::AddEdges { i, j, child } | CwNode::Relabel { i, j, child } => {
            check_label(*i)?;
            check_label(*j)?;
            if i == j {
                return Err(CwError::EqualLabels(*i));
            }
            validate(child, max, seen)
        }
    }
}

fn render(node: &CwNode) -> String {
    match node {
        CwNode::Create { label, vertex } => format!("(v {label} {vertex})"),
        CwNode::Union(a, b) => format!("(u {} {})", render(a), render(b)),
        CwNode::AddEdges { i, j, child } => format!("(e {i} {j} {})", render(child)),
        CwNode::Relabel { i, j, child } => format!("(r {i} {j} {})", render(child)),
    }
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn expect(&mut self, ch: u8) -> Result<(), CwParseError> {
        self.skip_ws();
        if self.pos < self.bytes.len() && self.bytes[self.pos] == ch {
            self.pos += 1;
            Ok(())
        } else {
            Err(CwParseError::Syntax {
                pos: self.pos,
                msg: format!("expected `{}`", ch as char),
            })
        }
    }

    fn token(&mut self) -> Result<&'a str, CwParseError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.bytes.len()
            && !self.bytes[self.pos].is_ascii_whitespace()
            && self.bytes[self.pos] != b'('
            && self.bytes[self.pos] != b')'
        {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(CwParseError::Syntax {
                pos: self.pos,
                msg: "expected a token".into(),
            });
        }
        Ok(std::str::from_utf8(&self.bytes[start..self.pos]).expect("ascii input"))
    }

    fn number<T: std::str::FromStr>(&mut self, what: &str) -> Result<T, CwParseError> {
        let at = self.pos;
        let tok = self.token()?;
        tok.parse().map_err(|_| CwParseError::Syntax {
            pos: at,
            msg: format!("expected {what}, got `{tok}`"),
        })
    }

    fn parse_expr(&mut self) -> Result<CwNode, CwParseError> {
        self.expect(b'(')?;
        let at = self.pos;
        let op = self.token()?;
        let node = match op {
            "v" => {
                let label: Label = self.number("a label")?;
                let vertex: Vertex = self.number("a vertex id")?;
                CwNode::Create { label, vertex }
            }
            "u" => {
                let a = self.parse_expr()?;
                let b = self.parse_expr()?;
                CwNode::Union(Box::new(a), Box::new(b))
            }
            "e" | "r" => {
                let i: Label = self.number("a label")?;
                let j: Label = self.number("a label")?;
                let child = Box::new(self.parse_expr()?);
                if op == "e" {
                    CwNode::AddEdges { i, j, child }
                } else {
                    CwNode::Relabel { i, j, child }
                }
            }
            other => {
                return Err(CwParseError::Syntax {
                    pos: at,
                    msg: format!("unknown operation `{other}`"),
                })
            }
        };
        self.expect(b')')?;
        Ok(node)
    }
}

/// Parses the expression file format (header plus one s-expression).
pub fn parse_cw(text: &str) -> Result<CwExpression, CwParseError> {
    let mut cur = Cursor {
        bytes: text.as_bytes(),
        pos: 0,
    };
    cur.skip_ws();
    let header_at = cur.pos;
    let kw = cur.token().map_err(|_| CwParseError::MissingHeader)?;
    if kw != "labels" {
        return Err(CwParseError::MissingHeader);
    }
    let num: usize = cur.number("a label count").map_err(|_| CwParseError::Syntax {
        pos: header_at,
        msg: "expected `labels <l>`".into(),
    })?;
    if num == 0 || num > MAX_LABELS as usize {
        return Err(CwError::BadLabelCount(num).into());
    }
    let root = cur.parse_expr()?;
    cur.skip_ws();
    if cur.pos != cur.bytes.len() {
        return Err(CwParseError::Syntax {
            pos: cur.pos,
            msg: "trailing input after expression".into(),
        });
    }
    Ok(CwExpression::new(num as Label, root)?)
}

/// A graph together with a total labelling of its vertices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledGraph {
    pub graph: Graph,
    pub labels: BTreeMap<Vertex, Label>,
}

/// Builds the labelled graph an expression describes.
pub fn realize(expr: &CwExpression) -> LabeledGraph {
    let mut graph = Graph::with_vertices(expr.vertices()).expect("validated vertex ids");
    let mut labels = BTreeMap::new();
    walk_realize(&expr.root, &mut graph, &mut labels);
    LabeledGraph { graph, labels }
}

fn walk_realize(
    node: &CwNode,
    g: &mut Graph,
    labels: &mut BTreeMap<Vertex, Label>,
) -> Vec<Vertex> {
    match node {
        CwNode::Create { label, vertex } => {
            labels.insert(*vertex, *label);
            vec![*vertex]
        }
        CwNode::Union(a, b) => {
            let mut va = walk_realize(a, g, labels);
            va.extend(walk_realize(b, g, labels));
            va
        }
        CwNode::AddEdges { i, j, child } => {
            let vs = walk_realize(child, g, labels);
            let with_i: Vec<Vertex> = vs.iter().copied().filter(|v| labels[v] == *i).collect();
            let with_j: Vec<Vertex> = vs.iter().copied().filter(|v| labels[v] == *j).collect();
            for &u in &with_i {
                for &v in &with_j {
                    g.insert_edge(u, v).expect("cross-label vertices are distinct");
                }
            }
            vs
        }
        CwNode::Relabel { i, j, child } => {
            let vs = walk_realize(child, g, labels);
            for v in &vs {
                if labels[v] == *i {
                    labels.insert(*v, *j);
                }
            }
            vs
        }
    }
}

/// The full DP table: one row of `2^l` exact rationals per AST node
/// (post-order indexing, root last).
#[derive(Debug, Clone)]
pub struct DpTable {
    num_labels: Label,
    tables: Vec<Vec<BigRational>>,
    evaluations: u64,
}

impl DpTable {
    /// `c(node, gamma)`: weighted independent-set count of the node's graph
    /// restricted to the vertices labelled in `gamma`.
    pub fn value(&self, node: usize, gamma: LabelSet) -> &BigRational {
        &self.tables[node][gamma as usize]
    }

    pub fn node_count(&self) -> usize {
        self.tables.len()
    }

    pub fn root_node(&self) -> usize {
        self.tables.len() - 1
    }

    pub fn num_labels(&self) -> Label {
        self.num_labels
    }

    /// Number of `(node, Γ)` entries evaluated; bounded by
    /// `2^l * node_count`.
    pub fn evaluations(&self) -> u64 {
        self.evaluations
    }
}

/// `nbwis(realize(expr), w)` by the label-subset DP.
pub fn count_cw(expr: &CwExpression, w: &WeightFunction) -> BigRational {
    let (value, _) = count_cw_table(expr, w);
    value
}

/// As [`count_cw`], also returning the full table.
pub fn count_cw_table(expr: &CwExpression, w: &WeightFunction) -> (BigRational, DpTable) {
    let masks = 1usize << expr.num_labels;
    let mut tables: Vec<Vec<BigRational>> = Vec::new();
    let mut evaluations = 0u64;
    fill(&expr.root, w, masks, &mut tables, &mut evaluations);
    let table = DpTable {
        num_labels: expr.num_labels,
        tables,
        evaluations,
    };
    debug_assert!(table.evaluations <= (masks as u64) * table.node_count() as u64);
    let value = table.value(table.root_node(), expr.full_label_set()).clone();
    (value, table)
}

fn label_bit(l: Label) -> LabelSet {
    1u32 << (l - 1)
}

/// Computes the node's row (children first) and returns its index.
fn fill(
    node: &CwNode,
    w: &WeightFunction,
    masks: usize,
    tables: &mut Vec<Vec<BigRational>>,
    evaluations: &mut u64,
) -> usize {
    let row: Vec<BigRational> = match node {
        CwNode::Create { label, vertex } => {
            let bit = label_bit(*label);
            let shifted = BigRational::one() + w.get(*vertex);
            (0..masks)
                .map(|m| {
                    *evaluations += 1;
                    if m as LabelSet & bit != 0 {
                        shifted.clone()
                    } else {
                        BigRational::one()
                    }
                })
                .collect()
        }
        CwNode::Union(a, b) => {
            let ia = fill(a, w, masks, tables, evaluations);
            let ib = fill(b, w, masks, tables, evaluations);
            (0..masks)
                .map(|m| {
                    *evaluations += 1;
                    &tables[ia][m] * &tables[ib][m]
                })
                .collect()
        }
        CwNode::AddEdges { i, j, child } => {
            let ic = fill(child, w, masks, tables, evaluations);
            let (bi, bj) = (label_bit(*i), label_bit(*j));
            (0..masks)
                .map(|m| {
                    *evaluations += 1;
                    let m = m as LabelSet;
                    let c = &tables[ic];
                    &c[(m & !bi) as usize] + &c[(m & !bj) as usize]
                        - &c[(m & !bi & !bj) as usize]
                })
                .collect()
        }
        CwNode::Relabel { i, j, child } => {
            let ic = fill(child, w, masks, tables, evaluations);
            let (bi, bj) = (label_bit(*i), label_bit(*j));
            (0..masks)
                .map(|m| {
                    *evaluations += 1;
                    let m = m as LabelSet;
                    let c = &tables[ic];
                    if m & bj != 0 {
                        c[(m | bi) as usize].clone()
                    } else {
                        c[(m & !bi) as usize].clone()
                    }
                })
                .collect()
        }
    };
    debug_assert!(row.iter().all(|v| *v >= BigRational::one()));
    tables.push(row);
    tables.len() - 1
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;
    use crate::rat::{rat, ratio};
    use crate::testkit;

    /// A 3-label expression for the path 1-2-3-4.
    pub(crate) fn p4_expression() -> CwExpression {
        parse_cw(
            "labels 3\n(e 1 2 (u (r 2 3 (e 1 2 (u (r 1 3 (e 1 2 (u (v 1 1) (v 2 2)))) (v 1 3)))) (v 2 4)))\n",
        )
        .unwrap()
    }

    #[test]
    fn parse_create() {
        let e = parse_cw("labels 1\n(v 1 1)\n").unwrap();
        assert_eq!(
            *e.root(),
            CwNode::Create { label: 1, vertex: 1 }
        );
    }

    #[test]
    fn parse_k2() {
        let e = parse_cw("labels 2\n(e 1 2 (u (v 1 1) (v 2 2)))\n").unwrap();
        let lg = realize(&e);
        assert_eq!(lg.graph.edges(), vec![(1, 2)]);
        assert_eq!(lg.labels[&1], 1);
        assert_eq!(lg.labels[&2], 2);
    }

    #[test]
    fn parse_rejects_equal_labels() {
        assert_eq!(
            parse_cw("labels 2\n(e 1 1 (v 1 1))\n"),
            Err(CwParseError::Invalid(CwError::EqualLabels(1)))
        );
    }

    #[test]
    fn parse_rejects_duplicate_vertex_and_bad_label() {
        assert_eq!(
            parse_cw("labels 2\n(u (v 1 1) (v 2 1))\n"),
            Err(CwParseError::Invalid(CwError::DuplicateVertex(1)))
        );
        assert_eq!(
            parse_cw("labels 2\n(v 3 1)\n"),
            Err(CwParseError::Invalid(CwError::LabelOutOfRange {
                label: 3,
                max: 2
            }))
        );
    }

    #[test]
    fn parse_reports_positions() {
        match parse_cw("labels 2\n(x 1 1)\n") {
            Err(CwParseError::Syntax { pos, .. }) => assert_eq!(pos, 10),
            other => panic!("expected syntax error, got {other:?}"),
        }
        assert!(matches!(
            parse_cw("(v 1 1)"),
            Err(CwParseError::MissingHeader)
        ));
    }

    #[test]
    fn realize_single_vertex() {
        let e = parse_cw("labels 3\n(v 3 7)\n").unwrap();
        let lg = realize(&e);
        assert_eq!(lg.graph.vertices().collect::<Vec<_>>(), vec![7]);
        assert!(lg.graph.edges().is_empty());
        assert_eq!(lg.labels[&7], 3);
    }

    #[test]
    fn realize_p4_expression() {
        let e = p4_expression();
        let lg = realize(&e);
        let p4 = Graph::from_edges(4, &[(1, 2), (2, 3), (3, 4)]).unwrap();
        assert_eq!(lg.graph, p4);
    }

    #[test]
    fn count_single_vertex_both_label_sets() {
        let e = parse_cw("labels 1\n(v 1 1)\n").unwrap();
        let (value, table) = count_cw_table(&e, &WeightFunction::unit());
        assert_eq!(value, rat(2));
        assert_eq!(*table.value(table.root_node(), 0), rat(1));
    }

    #[test]
    fn count_k2_unit() {
        let e = parse_cw("labels 2\n(e 1 2 (u (v 1 1) (v 2 2)))\n").unwrap();
        assert_eq!(count_cw(&e, &WeightFunction::unit()), rat(3));
    }

    #[test]
    fn count_p4_is_eight() {
        assert_eq!(count_cw(&p4_expression(), &WeightFunction::unit()), rat(8));
    }

    #[test]
    fn empty_label_subset_is_one_at_every_node() {
        for seed in 0..20u64 {
            let e = testkit::random_cw_expr(1 + (seed as usize) % 10, seed);
            let (_, table) = count_cw_table(&e, &WeightFunction::unit());
            for node in 0..table.node_count() {
                assert_eq!(*table.value(node, 0), rat(1));
            }
        }
    }

    #[test]
    fn matches_oracle_on_random_expressions() {
        for seed in 0..40u64 {
            let n = 1 + (seed as usize * 3) % 12;
            let e = testkit::random_cw_expr(n, seed.wrapping_mul(7));
            let lg = realize(&e);
            let w = testkit::weights_from_choices(
                &lg.graph,
                seed,
                &[rat(0), ratio(1, 2), rat(1), rat(2), rat(3)],
            );
            assert_eq!(
                count_cw(&e, &w),
                testkit::oracle_count(&lg.graph, &w).unwrap(),
                "expr {e}"
            );
        }
    }

    #[test]
    fn monotone_in_label_subset() {
        for seed in [3u64, 17, 40] {
            let e = testkit::random_cw_expr(8, seed);
            let (_, table) = count_cw_table(&e, &WeightFunction::unit());
            let full = e.full_label_set();
            for node in 0..table.node_count() {
                for m in 0..=full {
                    // compare each Γ against Γ plus one label
                    for l in 1..=e.num_labels() {
                        let with = m | label_bit(l);
                        assert!(table.value(node, m) <= table.value(node, with));
                    }
                }
            }
        }
    }

    #[test]
    fn redundant_add_edges_is_idempotent() {
        let inner = p4_expression();
        let doubled = CwExpression::new(
            inner.num_labels(),
            CwNode::AddEdges {
                i: 1,
                j: 2,
                child: Box::new(inner.root().clone()),
            },
        )
        .unwrap();
        let w = WeightFunction::unit();
        assert_eq!(count_cw(&inner, &w), count_cw(&doubled, &w));
        assert_eq!(realize(&inner).graph, realize(&doubled).graph);
    }

    #[test]
    fn evaluation_count_is_bounded() {
        let e = p4_expression();
        let (_, table) = count_cw_table(&e, &WeightFunction::unit());
        assert!(table.evaluations() <= (1u64 << e.num_labels()) * e.size() as u64);
    }

    #[test]
    fn cograph_expressions_agree_with_cotree_count() {
        // Translate random cotrees into l = 2 expressions.
        for seed in 0..15u64 {
            let n = 1 + (seed as usize) % 10;
            let t = testkit::random_cotree(n, seed.wrapping_mul(13).wrapping_add(1));
            let expr = CwExpression::new(2, cotree_to_cw(&t)).unwrap();
            let w = testkit::random_positive_weights(&t.realize(), seed, 6);
            assert_eq!(
                count_cw(&expr, &w),
                crate::cograph::cograph_count(&t, &w),
                "cotree {t}"
            );
        }
    }

    /// Cograph as an `l = 2` expression: children are built with every
    /// vertex labelled 1; a join adds edges via a temporary relabel to 2.
    fn cotree_to_cw(t: &crate::cograph::Cotree) -> CwNode {
        use crate::cograph::Cotree;
        match t {
            Cotree::Leaf(v) => CwNode::Create { label: 1, vertex: *v },
            Cotree::Union(cs) => cs
                .iter()
                .map(cotree_to_cw)
                .reduce(|a, b| CwNode::Union(Box::new(a), Box::new(b)))
                .unwrap(),
            Cotree::Join(cs) => {
                let mut acc = cotree_to_cw(&cs[0]);
                for c in &cs[1..] {
                    // move accumulated part to label 2, union, connect, merge back
                    let moved = CwNode::Relabel { i: 1, j: 2, child: Box::new(acc) };
                    let joined = CwNode::Union(Box::new(moved), Box::new(cotree_to_cw(c)));
                    let edged = CwNode::AddEdges { i: 1, j: 2, child: Box::new(joined) };
                    acc = CwNode::Relabel { i: 2, j: 1, child: Box::new(edged) };
                }
                acc
            }
        }
    }
}
