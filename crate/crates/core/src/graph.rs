//! Simple undirected graphs with stable vertex identities.
//!
//! Vertices are dense integer ids `1..=n` when a graph is first created;
//! induced subgraphs keep the original ids, so a subgraph's vertex set is an
//! arbitrary subset of the parent's id range. Adjacency is stored as one bit
//! row per id, which keeps edge queries O(1) and set operations cheap.
//!
//! File format (line oriented, ASCII): header `p is <n> <m>`, then `m` lines
//! `e <u> <v>` with `1 <= u,v <= n`, `u != v`; lines starting with `c` are
//! comments. Duplicate edges are tolerated and deduplicated; loops are
//! rejected.

use fixedbitset::FixedBitSet;
use std::fmt;
use thiserror::Error;

pub type Vertex = usize;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("line {line}: malformed header (expected `p is <n> <m>`)")]
    MalformedHeader { line: usize },
    #[error("line {line}: malformed edge (expected `e <u> <v>`)")]
    MalformedEdge { line: usize },
    #[error("line {line}: vertex id {v} out of range 1..={n}")]
    VertexOutOfRange { line: usize, v: usize, n: usize },
    #[error("line {line}: loop edge at vertex {v}")]
    LoopEdge { line: usize, v: usize },
    #[error("header declares {declared} edges but file has {found} edge lines")]
    EdgeCountMismatch { declared: usize, found: usize },
    #[error("missing `p is` header")]
    MissingHeader,
    #[error("unknown vertex {0}")]
    UnknownVertex(Vertex),
    #[error("relabelling maps two vertices to {0}")]
    RelabelCollision(Vertex),
    #[error("vertex {0} appears in both colour classes")]
    OverlappingClasses(Vertex),
    #[error("loop edge at vertex {0}")]
    Loop(Vertex),
}

/// An undirected simple graph. Equality compares vertex sets and edge sets,
/// ignoring the internal id capacity.
#[derive(Debug, Clone)]
pub struct Graph {
    cap: usize,
    verts: FixedBitSet,
    adj: Vec<FixedBitSet>,
}

impl Graph {
    /// Graph with vertices `1..=n` and no edges.
    pub fn new(n: usize) -> Self {
        let cap = n + 1;
        let mut verts = FixedBitSet::with_capacity(cap);
        for v in 1..=n {
            verts.insert(v);
        }
        Graph {
            cap,
            verts,
            adj: vec![FixedBitSet::with_capacity(cap); cap],
        }
    }

    /// Graph with an explicit (possibly non-dense) vertex set and no edges.
    pub fn with_vertices<I: IntoIterator<Item = Vertex>>(ids: I) -> Result<Self, GraphError> {
        let ids: Vec<Vertex> = ids.into_iter().collect();
        let cap = ids.iter().copied().max().unwrap_or(0) + 1;
        let mut verts = FixedBitSet::with_capacity(cap);
        for &v in &ids {
            if v == 0 {
                return Err(GraphError::UnknownVertex(0));
            }
            verts.insert(v);
        }
        Ok(Graph {
            cap,
            verts,
            adj: vec![FixedBitSet::with_capacity(cap); cap],
        })
    }

    /// Inserts an edge between two existing vertices (idempotent).
    pub fn insert_edge(&mut self, u: Vertex, v: Vertex) -> Result<(), GraphError> {
        if u == v {
            return Err(GraphError::Loop(u));
        }
        for w in [u, v] {
            if !self.contains_vertex(w) {
                return Err(GraphError::UnknownVertex(w));
            }
        }
        self.adj[u].insert(v);
        self.adj[v].insert(u);
        Ok(())
    }

    /// Graph with vertices `1..=n` and the given edges (deduplicated).
    /// Rejects loops and out-of-range endpoints.
    pub fn from_edges(n: usize, edges: &[(Vertex, Vertex)]) -> Result<Self, GraphError> {
        let mut g = Graph::new(n);
        for &(u, v) in edges {
            if u == v {
                return Err(GraphError::Loop(u));
            }
            for w in [u, v] {
                if w == 0 || w > n {
                    return Err(GraphError::UnknownVertex(w));
                }
            }
            g.adj[u].insert(v);
            g.adj[v].insert(u);
        }
        Ok(g)
    }

    pub fn vertex_count(&self) -> usize {
        self.verts.count_ones(..)
    }

    pub fn edge_count(&self) -> usize {
        self.verts.ones().map(|v| self.adj[v].count_ones(..)).sum::<usize>() / 2
    }

    pub fn is_empty(&self) -> bool {
        self.vertex_count() == 0
    }

    /// Ascending iterator over vertex ids.
    pub fn vertices(&self) -> impl Iterator<Item = Vertex> + '_ {
        self.verts.ones()
    }

    pub fn vertex_set(&self) -> &FixedBitSet {
        &self.verts
    }

    pub fn contains_vertex(&self, v: Vertex) -> bool {
        v < self.cap && self.verts.contains(v)
    }

    pub fn has_edge(&self, u: Vertex, v: Vertex) -> bool {
        u < self.cap && v < self.cap && self.adj[u].contains(v)
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.adj[v].count_ones(..)
    }

    /// Ascending iterator over the neighbours of `v`.
    pub fn neighbors(&self, v: Vertex) -> impl Iterator<Item = Vertex> + '_ {
        self.adj[v].ones()
    }

    pub fn neighbor_set(&self, v: Vertex) -> &FixedBitSet {
        &self.adj[v]
    }

    /// Edges as ordered pairs `(u, v)` with `u < v`, ascending.
    pub fn edges(&self) -> Vec<(Vertex, Vertex)> {
        let mut out = Vec::new();
        for u in self.verts.ones() {
            for v in self.adj[u].ones() {
                if u < v {
                    out.push((u, v));
                }
            }
        }
        out
    }

    /// Subgraph induced by `keep`, with original vertex identities.
    pub fn induced_subgraph<I>(&self, keep: I) -> Result<Graph, GraphError>
    where
        I: IntoIterator<Item = Vertex>,
    {
        let mut set = FixedBitSet::with_capacity(self.cap);
        for v in keep {
            if !self.contains_vertex(v) {
                return Err(GraphError::UnknownVertex(v));
            }
            set.insert(v);
        }
        Ok(self.induced_by_set(&set))
    }

    /// As `induced_subgraph`, but from an already-validated bit set.
    pub fn induced_by_set(&self, keep: &FixedBitSet) -> Graph {
        let mut verts = keep.clone();
        verts.grow(self.cap);
        verts.intersect_with(&self.verts);
        let mut adj = vec![FixedBitSet::with_capacity(self.cap); self.cap];
        for v in verts.ones() {
            let mut row = self.adj[v].clone();
            row.intersect_with(&verts);
            adj[v] = row;
        }
        Graph {
            cap: self.cap,
            verts,
            adj,
        }
    }

    /// The graph with `v` deleted.
    pub fn remove_vertex(&self, v: Vertex) -> Graph {
        let mut keep = self.verts.clone();
        keep.remove(v);
        self.induced_by_set(&keep)
    }

    /// Neighbours and vertices at distance exactly two from `v`, both
    /// ascending; the two sets are disjoint and exclude `v`.
    pub fn neighborhoods(&self, v: Vertex) -> Result<(Vec<Vertex>, Vec<Vertex>), GraphError> {
        if !self.contains_vertex(v) {
            return Err(GraphError::UnknownVertex(v));
        }
        let n1 = &self.adj[v];
        let mut n2 = FixedBitSet::with_capacity(self.cap);
        for u in n1.ones() {
            n2.union_with(&self.adj[u]);
        }
        n2.difference_with(n1);
        n2.remove(v);
        Ok((n1.ones().collect(), n2.ones().collect()))
    }

    /// Bipartite graph with colour classes `U` and `W`: vertex set `U ∪ W`,
    /// keeping only the edges with one endpoint in each class.
    pub fn bipartite_between(&self, u_class: &[Vertex], w_class: &[Vertex]) -> Result<Graph, GraphError> {
        let mut u_set = FixedBitSet::with_capacity(self.cap);
        let mut w_set = FixedBitSet::with_capacity(self.cap);
        for &v in u_class {
            if !self.contains_vertex(v) {
                return Err(GraphError::UnknownVertex(v));
            }
            u_set.insert(v);
        }
        for &v in w_class {
            if !self.contains_vertex(v) {
                return Err(GraphError::UnknownVertex(v));
            }
            if u_set.contains(v) {
                return Err(GraphError::OverlappingClasses(v));
            }
            w_set.insert(v);
        }
        let mut verts = u_set.clone();
        verts.union_with(&w_set);
        let mut adj = vec![FixedBitSet::with_capacity(self.cap); self.cap];
        for v in u_set.ones() {
            let mut row = self.adj[v].clone();
            row.intersect_with(&w_set);
            adj[v] = row;
        }
        for v in w_set.ones() {
            let mut row = self.adj[v].clone();
            row.intersect_with(&u_set);
            adj[v] = row;
        }
        Ok(Graph {
            cap: self.cap,
            verts,
            adj,
        })
    }

    /// Applies a vertex relabelling given as `map[old] = new`; ids outside the
    /// map are rejected. The result is defined on the same id universe.
    pub fn relabel(&self, map: &dyn Fn(Vertex) -> Vertex) -> Result<Graph, GraphError> {
        let n_max = self.verts.ones().map(&map).max().unwrap_or(0);
        let cap = n_max.max(self.cap - 1) + 1;
        let mut verts = FixedBitSet::with_capacity(cap);
        let mut adj = vec![FixedBitSet::with_capacity(cap); cap];
        for v in self.verts.ones() {
            let nv = map(v);
            if nv == 0 {
                return Err(GraphError::UnknownVertex(nv));
            }
            if verts.contains(nv) {
                return Err(GraphError::RelabelCollision(nv));
            }
            verts.insert(nv);
        }
        for (u, v) in self.edges() {
            let (nu, nv) = (map(u), map(v));
            adj[nu].insert(nv);
            adj[nv].insert(nu);
        }
        Ok(Graph { cap, verts, adj })
    }

    /// Canonical text form; requires dense ids `1..=n` (as produced by
    /// `new`/`from_edges`/the parser).
    pub fn serialize(&self) -> String {
        let n = self.vertex_count();
        assert!(
            self.vertices().zip(1..=n).all(|(v, i)| v == i),
            "serialize requires dense vertex ids 1..=n"
        );
        let edges = self.edges();
        let mut out = format!("p is {} {}\n", n, edges.len());
        for (u, v) in edges {
            out.push_str(&format!("e {} {}\n", u, v));
        }
        out
    }
}

impl PartialEq for Graph {
    fn eq(&self, other: &Self) -> bool {
        self.vertices().eq(other.vertices()) && self.edges() == other.edges()
    }
}

impl Eq for Graph {}

impl fmt::Display for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.serialize())
    }
}

/// Parses the graph file format. Edge multiset is deduplicated; loops and
/// out-of-range ids are reported with their line number.
pub fn parse_graph(text: &str) -> Result<Graph, GraphError> {
    let mut header: Option<(usize, usize)> = None;
    let mut g: Option<Graph> = None;
    let mut edge_lines = 0usize;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('c') {
            continue;
        }
        let fields: Vec<&str> = trimmed.split_whitespace().collect();
        match fields[0] {
            "p" => {
                if header.is_some()
                    || fields.len() != 4
                    || fields[1] != "is"
                    || fields[2].parse::<usize>().is_err()
                    || fields[3].parse::<usize>().is_err()
                {
                    return Err(GraphError::MalformedHeader { line });
                }
                let n = fields[2].parse().unwrap();
                let m = fields[3].parse().unwrap();
                header = Some((n, m));
                g = Some(Graph::new(n));
            }
            "e" => {
                let (n, _) = header.ok_or(GraphError::MissingHeader)?;
                if fields.len() != 3 {
                    return Err(GraphError::MalformedEdge { line });
                }
                let u: usize = fields[1]
                    .parse()
                    .map_err(|_| GraphError::MalformedEdge { line })?;
                let v: usize = fields[2]
                    .parse()
                    .map_err(|_| GraphError::MalformedEdge { line })?;
                for w in [u, v] {
                    if w == 0 || w > n {
                        return Err(GraphError::VertexOutOfRange { line, v: w, n });
                    }
                }
                if u == v {
                    return Err(GraphError::LoopEdge { line, v: u });
                }
                let g = g.as_mut().unwrap();
                g.adj[u].insert(v);
                g.adj[v].insert(u);
                edge_lines += 1;
            }
            _ => return Err(GraphError::MalformedEdge { line }),
        }
    }
    let (_, m) = header.ok_or(GraphError::MissingHeader)?;
    if edge_lines != m {
        return Err(GraphError::EdgeCountMismatch {
            declared: m,
            found: edge_lines,
        });
    }
    Ok(g.unwrap())
}

/// Proper 2-colouring via BFS, if the graph is bipartite. Each returned
/// class is ascending; vertex 1's component lands in the first class.
pub fn two_coloring(g: &Graph) -> Option<(Vec<Vertex>, Vec<Vertex>)> {
    let mut color: Vec<Option<bool>> = vec![None; g.cap];
    let mut queue = std::collections::VecDeque::new();
    for start in g.vertices() {
        if color[start].is_some() {
            continue;
        }
        color[start] = Some(false);
        queue.push_back(start);
        while let Some(u) = queue.pop_front() {
            let cu = color[u].unwrap();
            for v in g.neighbors(u) {
                match color[v] {
                    None => {
                        color[v] = Some(!cu);
                        queue.push_back(v);
                    }
                    Some(cv) if cv == cu => return None,
                    _ => {}
                }
            }
        }
    }
    let mut a = Vec::new();
    let mut b = Vec::new();
    for v in g.vertices() {
        if color[v] == Some(false) {
            a.push(v);
        } else {
            b.push(v);
        }
    }
    Some((a, b))
}

/// Path on `n` vertices `1-2-...-n`.
pub fn path_graph(n: usize) -> Graph {
    let edges: Vec<_> = (1..n).map(|i| (i, i + 1)).collect();
    Graph::from_edges(n, &edges).unwrap()
}

/// Cycle on `n >= 3` vertices.
pub fn cycle_graph(n: usize) -> Graph {
    let mut edges: Vec<_> = (1..n).map(|i| (i, i + 1)).collect();
    edges.push((n, 1));
    Graph::from_edges(n, &edges).unwrap()
}

/// Complete graph on `n` vertices.
pub fn complete_graph(n: usize) -> Graph {
    let mut edges = Vec::new();
    for u in 1..=n {
        for v in (u + 1)..=n {
            edges.push((u, v));
        }
    }
    Graph::from_edges(n, &edges).unwrap()
}
