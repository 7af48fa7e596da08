//! Simple graphs, digraphs, separations and g-separations.
//!
//! Vertex ids are dense 0-based naturals. All values are immutable after
//! construction and every operation is a pure function.

use crate::error::{Error, Result};
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt::Write as _;

/// Set of vertex ids. BTreeSet keeps every traversal deterministic.
pub type VertexSet = BTreeSet<u32>;

/// Undirected edge, stored with `0 <= e.0 < e.1`.
pub type Edge = (u32, u32);

/// Normalizes an endpoint pair into the canonical edge form.
pub fn edge(u: u32, v: u32) -> Edge {
    if u < v {
        (u, v)
    } else {
        (v, u)
    }
}

/// Simple undirected graph: no loops, no parallel edges.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Graph {
    n: u32,
    edges: BTreeSet<Edge>,
}

impl Graph {
    /// Builds a graph, validating the simple-graph invariants.
    pub fn new(n: u32, edge_list: impl IntoIterator<Item = (u32, u32)>) -> Result<Self> {
        let mut edges = BTreeSet::new();
        for (u, v) in edge_list {
            if u == v {
                return Err(Error::domain(format!("loop edge at vertex {u}")));
            }
            if u >= n || v >= n {
                return Err(Error::domain(format!(
                    "edge ({u},{v}) has an endpoint >= n = {n}"
                )));
            }
            edges.insert(edge(u, v));
        }
        Ok(Graph { n, edges })
    }

    /// Graph with `n` vertices and no edges.
    pub fn edgeless(n: u32) -> Self {
        Graph {
            n,
            edges: BTreeSet::new(),
        }
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.edges.iter().copied()
    }

    pub fn edge_set(&self) -> &BTreeSet<Edge> {
        &self.edges
    }

    pub fn has_edge(&self, u: u32, v: u32) -> bool {
        u != v && self.edges.contains(&edge(u, v))
    }

    pub fn vertices(&self) -> impl Iterator<Item = u32> {
        0..self.n
    }

    pub fn vertex_set(&self) -> VertexSet {
        (0..self.n).collect()
    }

    /// Adjacency lists, sorted.
    pub fn adjacency(&self) -> Vec<Vec<u32>> {
        let mut adj = vec![Vec::new(); self.n as usize];
        for &(u, v) in &self.edges {
            adj[u as usize].push(v);
            adj[v as usize].push(u);
        }
        adj
    }

    /// Adjacency bitmasks; only valid for graphs with at most 64 vertices.
    pub fn adjacency_masks(&self) -> Result<Vec<u64>> {
        if self.n > 64 {
            return Err(Error::capability(format!(
                "bitmask adjacency needs n <= 64, got {}",
                self.n
            )));
        }
        let mut adj = vec![0u64; self.n as usize];
        for &(u, v) in &self.edges {
            adj[u as usize] |= 1 << v;
            adj[v as usize] |= 1 << u;
        }
        Ok(adj)
    }

    /// Canonical text form: header line, then edges sorted lexicographically.
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "n {}", self.n);
        for &(u, v) in &self.edges {
            let _ = writeln!(out, "{u} {v}");
        }
        out
    }
}

/// Induced subgraph together with the map back to the parent graph's ids.
///
/// `old_ids[i]` is the parent-graph vertex that became vertex `i`.
#[derive(Debug, Clone)]
pub struct Induced {
    pub graph: Graph,
    pub old_ids: Vec<u32>,
}

impl Induced {
    /// Lifts a vertex set of the induced graph back to parent ids.
    pub fn lift(&self, local: &VertexSet) -> VertexSet {
        local.iter().map(|&v| self.old_ids[v as usize]).collect()
    }
}

/// Parses the line-oriented edge-list format.
///
/// Lines starting with `#` are comments. An optional `n <count>` header fixes
/// the vertex count (so trailing isolated vertices survive); otherwise the
/// count is one past the largest id seen. Edge lines are `u v`.
pub fn parse_edge_list(text: &str) -> Result<Graph> {
    let mut header: Option<u32> = None;
    let mut edges: Vec<(u32, u32)> = Vec::new();
    let mut max_id: Option<u32> = None;
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut tokens = line.split_whitespace();
        let first = tokens.next().expect("non-empty line has a token");
        if first == "n" {
            if header.is_some() {
                return Err(Error::parse(format!("line {line_no}: duplicate header")));
            }
            let count = tokens
                .next()
                .ok_or_else(|| Error::parse(format!("line {line_no}: header missing count")))?;
            let count: u32 = count
                .parse()
                .map_err(|_| Error::parse(format!("line {line_no}: bad count {count:?}")))?;
            if tokens.next().is_some() {
                return Err(Error::parse(format!(
                    "line {line_no}: trailing tokens after header"
                )));
            }
            header = Some(count);
            continue;
        }
        let u: u32 = first
            .parse()
            .map_err(|_| Error::parse(format!("line {line_no}: bad vertex id {first:?}")))?;
        let second = tokens
            .next()
            .ok_or_else(|| Error::parse(format!("line {line_no}: missing second endpoint")))?;
        let v: u32 = second
            .parse()
            .map_err(|_| Error::parse(format!("line {line_no}: bad vertex id {second:?}")))?;
        if tokens.next().is_some() {
            return Err(Error::parse(format!(
                "line {line_no}: trailing tokens after edge"
            )));
        }
        if u == v {
            return Err(Error::domain(format!("line {line_no}: loop edge {u} {u}")));
        }
        max_id = Some(max_id.unwrap_or(0).max(u).max(v));
        edges.push((u, v));
    }
    let implied = max_id.map_or(0, |m| m + 1);
    let n = match header {
        Some(h) if h < implied => {
            return Err(Error::parse(format!(
                "header n {h} smaller than largest vertex id {}",
                implied - 1
            )))
        }
        Some(h) => h,
        None => implied,
    };
    Graph::new(n, edges)
}

/// Returns the subgraph of `g` induced on `s`, reindexed densely.
pub fn induced_subgraph(g: &Graph, s: &VertexSet) -> Result<Induced> {
    for &v in s {
        if v >= g.n {
            return Err(Error::domain(format!("vertex {v} not in graph of size {}", g.n)));
        }
    }
    let old_ids: Vec<u32> = s.iter().copied().collect();
    let index: BTreeMap<u32, u32> = old_ids
        .iter()
        .enumerate()
        .map(|(i, &v)| (v, i as u32))
        .collect();
    let mut edges = Vec::new();
    for &(u, v) in &g.edges {
        if let (Some(&iu), Some(&iv)) = (index.get(&u), index.get(&v)) {
            edges.push((iu, iv));
        }
    }
    Ok(Induced {
        graph: Graph::new(old_ids.len() as u32, edges)?,
        old_ids,
    })
}

/// Connected components as vertex sets, sorted by minimum vertex id.
pub fn components(g: &Graph) -> Vec<VertexSet> {
    let adj = g.adjacency();
    let mut seen = vec![false; g.n as usize];
    let mut out = Vec::new();
    for start in 0..g.n {
        if seen[start as usize] {
            continue;
        }
        let mut comp = VertexSet::new();
        let mut stack = vec![start];
        seen[start as usize] = true;
        while let Some(v) = stack.pop() {
            comp.insert(v);
            for &w in &adj[v as usize] {
                if !seen[w as usize] {
                    seen[w as usize] = true;
                    stack.push(w);
                }
            }
        }
        out.push(comp);
    }
    out
}

/// Vertex-set pair (A, B); a separation once validated against a graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Separation {
    pub a: VertexSet,
    pub b: VertexSet,
}

impl Separation {
    pub fn new(a: VertexSet, b: VertexSet) -> Self {
        Separation { a, b }
    }

    /// |A ∩ B|.
    pub fn order(&self) -> usize {
        self.a.intersection(&self.b).count()
    }

    pub fn flipped(&self) -> Separation {
        Separation {
            a: self.b.clone(),
            b: self.a.clone(),
        }
    }
}

/// Outcome of validating a separation against a graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SeparationReport {
    pub valid: bool,
    pub order: usize,
    pub balanced: bool,
}

/// Checks validity, order and balance of `(A, B)` in `g`.
///
/// Valid means `A ∪ B = V(G)` and no edge joins `A∖B` to `B∖A`. Balanced
/// additionally requires `|A∖B| ≤ 2n/3` and `|B∖A| ≤ 2n/3`, compared in
/// integers as `3·|side| ≤ 2n`.
pub fn check_separation(g: &Graph, sep: &Separation) -> Result<SeparationReport> {
    for &v in sep.a.iter().chain(sep.b.iter()) {
        if v >= g.n {
            return Err(Error::domain(format!("vertex {v} out of range (n = {})", g.n)));
        }
    }
    let order = sep.order();
    let covers = sep.a.union(&sep.b).count() == g.n as usize;
    let mut crossing = false;
    if covers {
        for &(u, v) in &g.edges {
            let u_a_only = sep.a.contains(&u) && !sep.b.contains(&u);
            let u_b_only = sep.b.contains(&u) && !sep.a.contains(&u);
            let v_a_only = sep.a.contains(&v) && !sep.b.contains(&v);
            let v_b_only = sep.b.contains(&v) && !sep.a.contains(&v);
            if (u_a_only && v_b_only) || (u_b_only && v_a_only) {
                crossing = true;
                break;
            }
        }
    }
    let valid = covers && !crossing;
    let a_only = sep.a.difference(&sep.b).count();
    let b_only = sep.b.difference(&sep.a).count();
    let two_n = 2 * g.n as usize;
    let balanced = valid && 3 * a_only <= two_n && 3 * b_only <= two_n;
    Ok(SeparationReport {
        valid,
        order,
        balanced,
    })
}

/// Subgraph given by an explicit vertex and edge set.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Subgraph {
    pub verts: VertexSet,
    pub edges: BTreeSet<Edge>,
}

impl Subgraph {
    pub fn new(verts: VertexSet, edges: impl IntoIterator<Item = (u32, u32)>) -> Self {
        Subgraph {
            verts,
            edges: edges.into_iter().map(|(u, v)| edge(u, v)).collect(),
        }
    }

    pub fn empty() -> Self {
        Subgraph {
            verts: VertexSet::new(),
            edges: BTreeSet::new(),
        }
    }

    /// Is this a subgraph of `g`, with every edge endpoint inside `verts`?
    pub fn contained_in(&self, g: &Graph) -> bool {
        self.verts.iter().all(|&v| v < g.n)
            && self
                .edges
                .iter()
                .all(|&(u, v)| g.has_edge(u, v) && self.verts.contains(&u) && self.verts.contains(&v))
    }
}

/// Pair of subgraphs (A, B); a g-separation once validated.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct GSeparation {
    pub a: Subgraph,
    pub b: Subgraph,
}

impl GSeparation {
    pub fn new(a: Subgraph, b: Subgraph) -> Self {
        GSeparation { a, b }
    }

    /// |V(A) ∩ V(B)|.
    pub fn order(&self) -> usize {
        self.a.verts.intersection(&self.b.verts).count()
    }

    pub fn flipped(&self) -> GSeparation {
        GSeparation {
            a: self.b.clone(),
            b: self.a.clone(),
        }
    }

    /// Canonical representative of the unordered pair {A, B}:
    /// the orientation whose (vertex set, edge set) key is smaller.
    pub fn canonical(&self) -> GSeparation {
        if self.a <= self.b {
            self.clone()
        } else {
            self.flipped()
        }
    }
}

/// Outcome of validating a g-separation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GSeparationReport {
    pub valid: bool,
    pub order: usize,
}

/// Checks `A ∪ B = G` and `E(A) ∩ E(B) = ∅`.
pub fn check_g_separation(g: &Graph, gs: &GSeparation) -> Result<GSeparationReport> {
    if !gs.a.contained_in(g) || !gs.b.contained_in(g) {
        return Err(Error::domain("subgraph not contained in host graph"));
    }
    let verts_cover = gs.a.verts.union(&gs.b.verts).count() == g.n as usize;
    let edges_cover = gs
        .a
        .edges
        .union(&gs.b.edges)
        .count()
        == g.edges.len();
    let edges_disjoint = gs.a.edges.intersection(&gs.b.edges).next().is_none();
    Ok(GSeparationReport {
        valid: verts_cover && edges_cover && edges_disjoint,
        order: gs.order(),
    })
}

/// The g-separation `(G[A], G[B] − E(G[A∩B]))` induced by a separation.
pub fn separation_to_g_separation(g: &Graph, sep: &Separation) -> GSeparation {
    let in_a = |u: u32, v: u32| sep.a.contains(&u) && sep.a.contains(&v);
    let in_b = |u: u32, v: u32| sep.b.contains(&u) && sep.b.contains(&v);
    let mut ea = BTreeSet::new();
    let mut eb = BTreeSet::new();
    for &(u, v) in &g.edges {
        if in_a(u, v) {
            ea.insert((u, v));
        } else if in_b(u, v) {
            eb.insert((u, v));
        }
    }
    GSeparation {
        a: Subgraph {
            verts: sep.a.clone(),
            edges: ea,
        },
        b: Subgraph {
            verts: sep.b.clone(),
            edges: eb,
        },
    }
}

/// Directed graph with dense vertex ids and no duplicate arcs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Digraph {
    n: u32,
    arcs: BTreeSet<(u32, u32)>,
}

impl Digraph {
    pub fn new(n: u32, arc_list: impl IntoIterator<Item = (u32, u32)>) -> Result<Self> {
        let mut arcs = BTreeSet::new();
        for (u, v) in arc_list {
            if u >= n || v >= n {
                return Err(Error::domain(format!(
                    "arc ({u},{v}) has an endpoint >= n = {n}"
                )));
            }
            arcs.insert((u, v));
        }
        Ok(Digraph { n, arcs })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn arcs(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.arcs.iter().copied()
    }

    pub fn arc_count(&self) -> usize {
        self.arcs.len()
    }

    pub fn has_arc(&self, u: u32, v: u32) -> bool {
        self.arcs.contains(&(u, v))
    }

    pub fn out_neighbors(&self, v: u32) -> impl Iterator<Item = u32> + '_ {
        self.arcs
            .range((v, 0)..=(v, u32::MAX))
            .map(|&(_, w)| w)
    }
}
