//! Edge-colored multigraphs, their color-class projections, and the ECG text
//! format.
//!
//! Vertices are stored 0-based. Edge ids are 1-based positions in the edge
//! list; every witness set in this crate is a set of such ids.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use thiserror::Error;

/// 1-based position of an edge in its graph's edge list.
pub type EdgeId = usize;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("color {color} out of range 1..={alpha}")]
    ColorOutOfRange { color: usize, alpha: usize },
    #[error("unknown edge id {0}")]
    UnknownEdge(EdgeId),
    #[error("vertex {vertex} out of range 1..={n}")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("edge has an empty color set")]
    EmptyColors,
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// A nonempty, strictly ascending set of 1-based colors.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ColorSet(Vec<usize>);

impl ColorSet {
    pub fn new(colors: impl IntoIterator<Item = usize>) -> Self {
        let set: BTreeSet<usize> = colors.into_iter().collect();
        ColorSet(set.into_iter().collect())
    }

    pub fn single(color: usize) -> Self {
        ColorSet(vec![color])
    }

    pub fn full(alpha: usize) -> Self {
        ColorSet((1..=alpha).collect())
    }

    pub fn contains(&self, color: usize) -> bool {
        self.0.binary_search(&color).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn remove(&mut self, color: usize) -> bool {
        match self.0.binary_search(&color) {
            Ok(i) => {
                self.0.remove(i);
                true
            }
            Err(_) => false,
        }
    }

    pub fn max(&self) -> Option<usize> {
        self.0.last().copied()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub colors: ColorSet,
}

impl Edge {
    pub fn is_loop(&self) -> bool {
        self.u == self.v
    }

    pub fn other(&self, x: usize) -> usize {
        if self.u == x {
            self.v
        } else {
            self.u
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EdgeColoredGraph {
    n: usize,
    alpha: usize,
    edges: Vec<Edge>,
}

/// Uncolored multigraph whose edges remember the id of the edge they came
/// from in a parent [`EdgeColoredGraph`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Multigraph {
    pub n: usize,
    pub edges: Vec<(usize, usize, EdgeId)>,
}

impl EdgeColoredGraph {
    pub fn new(n: usize, alpha: usize) -> Self {
        EdgeColoredGraph {
            n,
            alpha,
            edges: Vec::new(),
        }
    }

    /// Appends an edge between 0-based vertices and returns its id.
    pub fn add_edge(&mut self, u: usize, v: usize, colors: ColorSet) -> Result<EdgeId, GraphError> {
        for x in [u, v] {
            if x >= self.n {
                return Err(GraphError::VertexOutOfRange {
                    vertex: x + 1,
                    n: self.n,
                });
            }
        }
        if colors.is_empty() {
            return Err(GraphError::EmptyColors);
        }
        if let Some(c) = colors.iter().find(|&c| c == 0 || c > self.alpha) {
            return Err(GraphError::ColorOutOfRange {
                color: c,
                alpha: self.alpha,
            });
        }
        self.edges.push(Edge { u, v, colors });
        Ok(self.edges.len())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn alpha(&self) -> usize {
        self.alpha
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, id: EdgeId) -> Result<&Edge, GraphError> {
        id.checked_sub(1)
            .and_then(|i| self.edges.get(i))
            .ok_or(GraphError::UnknownEdge(id))
    }

    pub fn edge_ids(&self) -> impl Iterator<Item = EdgeId> {
        1..=self.edges.len()
    }

    fn check_color(&self, color: usize) -> Result<(), GraphError> {
        if color == 0 || color > self.alpha {
            Err(GraphError::ColorOutOfRange {
                color,
                alpha: self.alpha,
            })
        } else {
            Ok(())
        }
    }

    /// The color-`color` graph `G_i`: all vertices, and the edges whose color
    /// set contains `color`.
    pub fn color_subgraph(&self, color: usize) -> Result<Multigraph, GraphError> {
        self.check_color(color)?;
        Ok(Multigraph {
            n: self.n,
            edges: self
                .edges
                .iter()
                .enumerate()
                .filter(|(_, e)| e.colors.contains(color))
                .map(|(i, e)| (e.u, e.v, i + 1))
                .collect(),
        })
    }

    /// Number of edges of `G_i`.
    pub fn color_size(&self, color: usize) -> usize {
        self.edges.iter().filter(|e| e.colors.contains(color)).count()
    }

    /// `|E(G_i)| - n + components(G_i)`: the fewest deletions making `G_i`
    /// acyclic.
    pub fn excess(&self, color: usize) -> Result<usize, GraphError> {
        let h = self.color_subgraph(color)?;
        Ok(h.edges.len() + h.components() - self.n)
    }

    /// The graph with the given edges removed. Edge ids of the result refer to
    /// the result, not to `self`; the second component maps them back.
    pub fn without_edges(&self, removed: &BTreeSet<EdgeId>) -> Result<(EdgeColoredGraph, Vec<EdgeId>), GraphError> {
        for &id in removed {
            self.edge(id)?;
        }
        let mut g = EdgeColoredGraph::new(self.n, self.alpha);
        let mut back = Vec::new();
        for (i, e) in self.edges.iter().enumerate() {
            if !removed.contains(&(i + 1)) {
                g.edges.push(e.clone());
                back.push(i + 1);
            }
        }
        Ok((g, back))
    }

    /// Whether deleting `deleted` leaves every color class acyclic.
    pub fn verify_sfes(&self, deleted: &BTreeSet<EdgeId>) -> Result<bool, GraphError> {
        for &id in deleted {
            self.edge(id)?;
        }
        for color in 1..=self.alpha {
            let h = Multigraph {
                n: self.n,
                edges: self
                    .edges
                    .iter()
                    .enumerate()
                    .filter(|(i, e)| e.colors.contains(color) && !deleted.contains(&(i + 1)))
                    .map(|(i, e)| (e.u, e.v, i + 1))
                    .collect(),
            };
            if !h.is_acyclic() {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Whether the kept edge set induces a forest in every color class.
    pub fn is_simultaneous_forest(&self, kept: &BTreeSet<EdgeId>) -> Result<bool, GraphError> {
        let deleted: BTreeSet<EdgeId> = self.edge_ids().filter(|id| !kept.contains(id)).collect();
        for &id in kept {
            self.edge(id)?;
        }
        self.verify_sfes(&deleted)
    }

    /// Sum over colors of the color-class degree; a loop counts twice.
    pub fn total_degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.n];
        for e in &self.edges {
            deg[e.u] += e.colors.len();
            deg[e.v] += e.colors.len();
        }
        deg
    }
}

impl Multigraph {
    pub fn components(&self) -> usize {
        let mut uf = UnionFind::new(self.n);
        let mut count = self.n;
        for &(u, v, _) in &self.edges {
            if uf.union(u, v) {
                count -= 1;
            }
        }
        count
    }

    /// Loops and parallel pairs count as cycles.
    pub fn is_acyclic(&self) -> bool {
        let mut uf = UnionFind::new(self.n);
        self.edges.iter().all(|&(u, v, _)| uf.union(u, v))
    }

    /// Edges lying on at least one cycle: loops and all non-bridges.
    pub fn cycle_edges(&self) -> BTreeSet<EdgeId> {
        let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); self.n];
        let mut out = BTreeSet::new();
        for (slot, &(u, v, id)) in self.edges.iter().enumerate() {
            if u == v {
                out.insert(id);
            } else {
                adj[u].push((v, slot));
                adj[v].push((u, slot));
            }
        }
        let mut is_bridge = vec![false; self.edges.len()];
        let mut disc = vec![usize::MAX; self.n];
        let mut low = vec![0; self.n];
        let mut timer = 0;
        // iterative lowlink: (vertex, slot of the edge used to enter, next adjacency index)
        for root in 0..self.n {
            if disc[root] != usize::MAX {
                continue;
            }
            disc[root] = timer;
            low[root] = timer;
            timer += 1;
            let mut stack = vec![(root, usize::MAX, 0usize)];
            while let Some(top) = stack.last_mut() {
                let (x, via, idx) = *top;
                if idx < adj[x].len() {
                    top.2 += 1;
                    let (y, slot) = adj[x][idx];
                    if slot == via {
                        continue;
                    }
                    if disc[y] == usize::MAX {
                        disc[y] = timer;
                        low[y] = timer;
                        timer += 1;
                        stack.push((y, slot, 0));
                    } else {
                        low[x] = low[x].min(disc[y]);
                    }
                } else {
                    stack.pop();
                    if let Some(&(parent, _, _)) = stack.last() {
                        low[parent] = low[parent].min(low[x]);
                        if low[x] > disc[parent] {
                            is_bridge[via] = true;
                        }
                    }
                }
            }
        }
        for (slot, &(u, v, id)) in self.edges.iter().enumerate() {
            if u != v && !is_bridge[slot] {
                out.insert(id);
            }
        }
        out
    }
}

/// Disjoint-set forest with path halving and union by size.
#[derive(Debug, Clone)]
pub struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns `false` if `a` and `b` were already connected.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut a, mut b) = (self.find(a), self.find(b));
        if a == b {
            return false;
        }
        if self.size[a] < self.size[b] {
            std::mem::swap(&mut a, &mut b);
        }
        self.parent[b] = a;
        self.size[a] += self.size[b];
        true
    }
}

fn parse_usize(tok: Option<&str>, line: usize, what: &str) -> Result<usize, GraphError> {
    let tok = tok.ok_or_else(|| GraphError::Parse {
        line,
        msg: format!("missing {what}"),
    })?;
    tok.parse().map_err(|_| GraphError::Parse {
        line,
        msg: format!("invalid {what} `{tok}`"),
    })
}

/// Parses the line-oriented ECG format.
///
/// ```text
/// c comment lines start with `c` or `#`
/// p ecg <n> <m> <alpha>
/// e <u> <v> <c1,c2,...>
/// ```
pub fn parse_ecg(text: &str) -> Result<EdgeColoredGraph, GraphError> {
    let mut graph: Option<(EdgeColoredGraph, usize)> = None;
    let mut last_line = 0;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        last_line = line;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') || trimmed == "c" || trimmed.starts_with("c ") {
            continue;
        }
        let mut toks = trimmed.split_whitespace();
        match toks.next() {
            Some("p") => {
                if graph.is_some() {
                    return Err(GraphError::Parse {
                        line,
                        msg: "duplicate header".into(),
                    });
                }
                if toks.next() != Some("ecg") {
                    return Err(GraphError::Parse {
                        line,
                        msg: "expected `p ecg <n> <m> <alpha>`".into(),
                    });
                }
                let n = parse_usize(toks.next(), line, "vertex count")?;
                let m = parse_usize(toks.next(), line, "edge count")?;
                let alpha = parse_usize(toks.next(), line, "color count")?;
                if toks.next().is_some() {
                    return Err(GraphError::Parse {
                        line,
                        msg: "trailing tokens in header".into(),
                    });
                }
                graph = Some((EdgeColoredGraph::new(n, alpha), m));
            }
            Some("e") => {
                let Some((g, m)) = graph.as_mut() else {
                    return Err(GraphError::Parse {
                        line,
                        msg: "edge before header".into(),
                    });
                };
                if g.m() == *m {
                    return Err(GraphError::Parse {
                        line,
                        msg: format!("more than {m} edge lines"),
                    });
                }
                let u = parse_usize(toks.next(), line, "endpoint")?;
                let v = parse_usize(toks.next(), line, "endpoint")?;
                let list = toks.next().ok_or_else(|| GraphError::Parse {
                    line,
                    msg: "empty color list".into(),
                })?;
                if toks.next().is_some() {
                    return Err(GraphError::Parse {
                        line,
                        msg: "trailing tokens in edge line".into(),
                    });
                }
                let mut colors = Vec::new();
                for c in list.split(',') {
                    let c: usize = c.parse().map_err(|_| GraphError::Parse {
                        line,
                        msg: format!("invalid color `{c}`"),
                    })?;
                    if c == 0 || c > g.alpha() {
                        return Err(GraphError::Parse {
                            line,
                            msg: format!("color {c} out of range 1..={}", g.alpha()),
                        });
                    }
                    if colors.last().is_some_and(|&prev| prev >= c) {
                        return Err(GraphError::Parse {
                            line,
                            msg: "colors must be strictly ascending".into(),
                        });
                    }
                    colors.push(c);
                }
                for x in [u, v] {
                    if x == 0 || x > g.n() {
                        return Err(GraphError::Parse {
                            line,
                            msg: format!("vertex {x} out of range 1..={}", g.n()),
                        });
                    }
                }
                g.add_edge(u - 1, v - 1, ColorSet(colors))
                    .map_err(|e| GraphError::Parse {
                        line,
                        msg: e.to_string(),
                    })?;
            }
            Some(other) => {
                return Err(GraphError::Parse {
                    line,
                    msg: format!("unknown line type `{other}`"),
                })
            }
            None => unreachable!(),
        }
    }
    let (g, m) = graph.ok_or(GraphError::Parse {
        line: last_line.max(1),
        msg: "missing `p ecg` header".into(),
    })?;
    if g.m() != m {
        return Err(GraphError::Parse {
            line: last_line.max(1),
            msg: format!("expected {m} edge lines, found {}", g.m()),
        });
    }
    Ok(g)
}

pub fn write_ecg(g: &EdgeColoredGraph) -> String {
    write_ecg_with_comments(g, &[])
}

/// Writes ECG text, emitting each comment line as `c <line>` before the header.
pub fn write_ecg_with_comments(g: &EdgeColoredGraph, comments: &[String]) -> String {
    let mut out = String::new();
    for c in comments {
        let _ = writeln!(out, "c {c}");
    }
    let _ = writeln!(out, "p ecg {} {} {}", g.n, g.m(), g.alpha);
    for e in &g.edges {
        let colors: Vec<String> = e.colors.iter().map(|c| c.to_string()).collect();
        let _ = writeln!(out, "e {} {} {}", e.u + 1, e.v + 1, colors.join(","));
    }
    out
}

/// Solver output: `YES`/`NO`, then `d <edge-id>` lines in ascending order.
pub fn write_answer(answer: bool, edges: &BTreeSet<EdgeId>) -> String {
    let mut out = String::from(if answer { "YES\n" } else { "NO\n" });
    if answer {
        for id in edges {
            let _ = writeln!(out, "d {id}");
        }
    }
    out
}

/// Reads `d <edge-id>` lines; a leading `YES` line and comments are skipped.
pub fn parse_witness(text: &str) -> Result<BTreeSet<EdgeId>, GraphError> {
    let mut out = BTreeSet::new();
    for (idx, raw) in text.lines().enumerate() {
        let t = raw.trim();
        if t.is_empty() || t == "YES" || t.starts_with('#') || t == "c" || t.starts_with("c ") {
            continue;
        }
        let mut toks = t.split_whitespace();
        if toks.next() != Some("d") {
            return Err(GraphError::Parse {
                line: idx + 1,
                msg: format!("expected `d <edge-id>`, got `{t}`"),
            });
        }
        out.insert(parse_usize(toks.next(), idx + 1, "edge id")?);
    }
    Ok(out)
}
