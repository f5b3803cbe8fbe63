//! Polynomial-time preprocessing for Sim-FES.
//!
//! [`apply_rules`] runs the six reduction rules to a fixed point, restarting
//! from the first rule after every change:
//!
//! 1. `k < 0`: no-instance.
//! 2. every color class is a forest: yes-instance.
//! 3. a loop must be deleted: delete it and decrement `k`.
//! 4. drop isolated vertices.
//! 5. strip color `i` from edges on no cycle of `G_i`; drop edges left with
//!    no color.
//! 6. suppress a vertex of total degree two: its two edges then carry the
//!    same single color and are replaced by one edge between its neighbors.
//!
//! [`signature_reduce`] then removes vertices that are interchangeable with
//! another vertex lying on exactly the same degree-two paths of every color
//! class.
//!
//! Every kernel edge remembers one original edge (its representative).
//! Deleting the representative in the input breaks every cycle that the
//! kernel edge breaks, which is how kernel witnesses are lifted back.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::ecg::{ColorSet, EdgeColoredGraph, EdgeId, Multigraph, UnionFind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Rule {
    NegativeBudget,
    AllForests,
    Loop,
    Isolated,
    Acyclic,
    DegreeTwo,
    ExcessBound,
    Signature,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Rule::NegativeBudget => "rule1",
            Rule::AllForests => "rule2",
            Rule::Loop => "rule3",
            Rule::Isolated => "rule4",
            Rule::Acyclic => "rule5",
            Rule::DegreeTwo => "rule6",
            Rule::ExcessBound => "excess",
            Rule::Signature => "signature",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceStep {
    pub rule: Rule,
    pub detail: String,
}

impl fmt::Display for TraceStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.rule, self.detail)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelVerdict {
    Yes,
    No,
    Reduced,
}

/// Result of kernelization: the reduced instance plus what is needed to map
/// its solutions back to the input.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Kernel {
    pub verdict: KernelVerdict,
    pub graph: EdgeColoredGraph,
    pub k: i64,
    pub trace: Vec<TraceStep>,
    /// Input edge represented by each kernel edge (index = kernel id - 1).
    pub lift: Vec<EdgeId>,
    /// Input edges the rules already deleted.
    pub forced: BTreeSet<EdgeId>,
    /// Input vertex (0-based) of each kernel vertex.
    pub vertex_map: Vec<usize>,
}

impl Kernel {
    /// Maps a solution of the kernel to a candidate solution of the input.
    pub fn lift_witness(&self, kernel_witness: &BTreeSet<EdgeId>) -> BTreeSet<EdgeId> {
        let mut out = self.forced.clone();
        out.extend(kernel_witness.iter().map(|&id| self.lift[id - 1]));
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KernelOptions {
    pub signatures: bool,
    /// Cap on signature collapses, as a guard against cycling.
    pub max_collapses: usize,
}

impl Default for KernelOptions {
    fn default() -> Self {
        KernelOptions {
            signatures: true,
            max_collapses: 10_000,
        }
    }
}

#[derive(Debug, Clone)]
struct WEdge {
    u: usize,
    v: usize,
    colors: ColorSet,
    rep: EdgeId,
}

#[derive(Debug, Clone)]
struct Work {
    alpha: usize,
    alive: Vec<bool>,
    orig_vertex: Vec<usize>,
    edges: Vec<WEdge>,
    k: i64,
    forced: BTreeSet<EdgeId>,
    trace: Vec<TraceStep>,
}

enum Step {
    Applied,
    Done(KernelVerdict),
    Fixpoint,
}

impl Work {
    fn from_graph(g: &EdgeColoredGraph, k: i64) -> Self {
        Work {
            alpha: g.alpha(),
            alive: vec![true; g.n()],
            orig_vertex: (0..g.n()).collect(),
            edges: g
                .edges()
                .iter()
                .enumerate()
                .map(|(i, e)| WEdge {
                    u: e.u,
                    v: e.v,
                    colors: e.colors.clone(),
                    rep: i + 1,
                })
                .collect(),
            k,
            forced: BTreeSet::new(),
            trace: Vec::new(),
        }
    }

    fn from_kernel(kernel: &Kernel) -> Self {
        let mut w = Work::from_graph(&kernel.graph, kernel.k);
        for e in &mut w.edges {
            e.rep = kernel.lift[e.rep - 1];
        }
        w.orig_vertex = kernel.vertex_map.clone();
        w.forced = kernel.forced.clone();
        w.trace = kernel.trace.clone();
        w
    }

    fn log(&mut self, rule: Rule, detail: String) {
        self.trace.push(TraceStep { rule, detail });
    }

    fn name(&self, v: usize) -> usize {
        self.orig_vertex[v] + 1
    }

    fn color_graph(&self, color: usize) -> Multigraph {
        Multigraph {
            n: self.alive.len(),
            edges: self
                .edges
                .iter()
                .enumerate()
                .filter(|(_, e)| e.colors.contains(color))
                .map(|(i, e)| (e.u, e.v, i + 1))
                .collect(),
        }
    }

    fn total_degree(&self) -> Vec<usize> {
        let mut deg = vec![0; self.alive.len()];
        for e in &self.edges {
            deg[e.u] += e.colors.len();
            deg[e.v] += e.colors.len();
        }
        deg
    }

    fn step(&mut self) -> Step {
        if self.k < 0 {
            self.log(Rule::NegativeBudget, format!("k={}", self.k));
            return Step::Done(KernelVerdict::No);
        }
        if (1..=self.alpha).all(|c| self.color_graph(c).is_acyclic()) {
            self.log(Rule::AllForests, format!("k={}", self.k));
            return Step::Done(KernelVerdict::Yes);
        }
        if let Some(i) = self.edges.iter().position(|e| e.u == e.v) {
            let e = self.edges.remove(i);
            self.forced.insert(e.rep);
            self.k -= 1;
            let detail = format!(
                "deleted loop at vertex {} (input edge {}), k={}",
                self.name(e.u),
                e.rep,
                self.k
            );
            self.log(Rule::Loop, detail);
            return Step::Applied;
        }
        let deg = self.total_degree();
        if let Some(v) = (0..self.alive.len()).find(|&v| self.alive[v] && deg[v] == 0) {
            self.alive[v] = false;
            let detail = format!("removed isolated vertex {}", self.name(v));
            self.log(Rule::Isolated, detail);
            return Step::Applied;
        }
        if self.strip_acyclic_colors() {
            return Step::Applied;
        }
        if let Some(v) = (0..self.alive.len()).find(|&v| self.alive[v] && deg[v] == 2) {
            self.suppress(v);
            return Step::Applied;
        }
        Step::Fixpoint
    }

    fn strip_acyclic_colors(&mut self) -> bool {
        let mut stripped = Vec::new();
        for color in 1..=self.alpha {
            let on_cycle = self.color_graph(color).cycle_edges();
            for (i, e) in self.edges.iter().enumerate() {
                if e.colors.contains(color) && !on_cycle.contains(&(i + 1)) {
                    stripped.push((i, color));
                }
            }
        }
        if stripped.is_empty() {
            return false;
        }
        let mut parts = Vec::new();
        for &(i, color) in &stripped {
            self.edges[i].colors.remove(color);
            parts.push(format!("{}:{}", self.edges[i].rep, color));
        }
        let before = self.edges.len();
        self.edges.retain(|e| !e.colors.is_empty());
        let dropped = before - self.edges.len();
        self.log(
            Rule::Acyclic,
            format!("stripped edge:color {} ({} edges dropped)", parts.join(" "), dropped),
        );
        true
    }

    fn suppress(&mut self, v: usize) {
        let incident: Vec<usize> = (0..self.edges.len())
            .filter(|&i| self.edges[i].u == v || self.edges[i].v == v)
            .collect();
        assert_eq!(
            incident.len(),
            2,
            "total degree two after rule 5 means two single-colored edges"
        );
        let (a, b) = (&self.edges[incident[0]], &self.edges[incident[1]]);
        assert_eq!(a.colors, b.colors, "edges at a suppressed vertex carry the same colors");
        assert_eq!(a.colors.len(), 1);
        let (x, y) = (if a.u == v { a.v } else { a.u }, if b.u == v { b.v } else { b.u });
        let merged = WEdge {
            u: x.min(y),
            v: x.max(y),
            colors: a.colors.clone(),
            rep: a.rep,
        };
        let detail = format!(
            "suppressed vertex {}: input edges {} and {} -> edge {}-{} colors {:?}",
            self.name(v),
            a.rep,
            b.rep,
            self.name(merged.u),
            self.name(merged.v),
            merged.colors.as_slice()
        );
        self.edges.remove(incident[1]);
        self.edges.remove(incident[0]);
        self.edges.push(merged);
        self.alive[v] = false;
        self.log(Rule::DegreeTwo, detail);
    }

    fn run_rules(&mut self) -> KernelVerdict {
        loop {
            match self.step() {
                Step::Applied => continue,
                Step::Done(v) => return v,
                Step::Fixpoint => return KernelVerdict::Reduced,
            }
        }
    }

    fn to_graph(&self) -> (EdgeColoredGraph, Vec<usize>, Vec<usize>) {
        let mut new_id = vec![usize::MAX; self.alive.len()];
        let mut vertex_map = Vec::new();
        for (v, &alive) in self.alive.iter().enumerate() {
            if alive {
                new_id[v] = vertex_map.len();
                vertex_map.push(self.orig_vertex[v]);
            }
        }
        let mut g = EdgeColoredGraph::new(vertex_map.len(), self.alpha);
        let mut lift = Vec::with_capacity(self.edges.len());
        for e in &self.edges {
            g.add_edge(new_id[e.u], new_id[e.v], e.colors.clone())
                .expect("kernel edges join live vertices");
            lift.push(e.rep);
        }
        (g, lift, vertex_map)
    }

    fn finish(self, verdict: KernelVerdict) -> Kernel {
        let (graph, lift, vertex_map) = self.to_graph();
        Kernel {
            verdict,
            graph,
            k: self.k,
            trace: self.trace,
            lift,
            forced: self.forced,
            vertex_map,
        }
    }
}

/// Applies rules 1-6 exhaustively.
pub fn apply_rules(g: &EdgeColoredGraph, k: i64) -> Kernel {
    let mut w = Work::from_graph(g, k);
    let verdict = w.run_rules();
    w.finish(verdict)
}

/// Spanning forests, excess edges, degree-two vertices and path systems of
/// the color classes of a graph at the rules' fixed point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KernelStructure {
    /// `F_i`: edge ids of a spanning forest of `G_i`, chosen in id order.
    pub forests: Vec<BTreeSet<EdgeId>>,
    /// `X_i = E(G_i) \ F_i`.
    pub excess_edges: Vec<BTreeSet<EdgeId>>,
    /// `U`: endpoints of edges in `X = ∪ X_i`.
    pub endpoints: BTreeSet<usize>,
    /// `T`: vertices of degree 1 or at least 3 in some `G_i`.
    pub branch_or_leaf: BTreeSet<usize>,
    /// `D_i`: degree-2 vertices of `G_i` outside `T ∪ U`.
    pub degree_two: Vec<BTreeSet<usize>>,
    /// `P_i`: maximal paths of `G_i` with all internal vertices in `D_i`,
    /// as edge-id lists. Only paths with at least one internal vertex are
    /// listed.
    pub paths: Vec<Vec<Vec<EdgeId>>>,
}

impl KernelStructure {
    pub fn of(g: &EdgeColoredGraph) -> Self {
        let alpha = g.alpha();
        let n = g.n();
        let mut forests = Vec::with_capacity(alpha);
        let mut excess_edges = Vec::with_capacity(alpha);
        let mut endpoints = BTreeSet::new();
        let mut branch_or_leaf = BTreeSet::new();
        let mut degrees = Vec::with_capacity(alpha);
        for color in 1..=alpha {
            let mut uf = UnionFind::new(n);
            let mut forest = BTreeSet::new();
            let mut extra = BTreeSet::new();
            let mut deg = vec![0usize; n];
            for (i, e) in g.edges().iter().enumerate() {
                if !e.colors.contains(color) {
                    continue;
                }
                deg[e.u] += 1;
                deg[e.v] += 1;
                if uf.union(e.u, e.v) {
                    forest.insert(i + 1);
                } else {
                    extra.insert(i + 1);
                    endpoints.insert(e.u);
                    endpoints.insert(e.v);
                }
            }
            branch_or_leaf.extend((0..n).filter(|&v| deg[v] == 1 || deg[v] >= 3));
            forests.push(forest);
            excess_edges.push(extra);
            degrees.push(deg);
        }
        let degree_two: Vec<BTreeSet<usize>> = degrees
            .iter()
            .map(|deg| {
                (0..n)
                    .filter(|&v| deg[v] == 2 && !branch_or_leaf.contains(&v) && !endpoints.contains(&v))
                    .collect()
            })
            .collect();
        let paths = (1..=alpha)
            .map(|color| color_paths(g, color, &degree_two[color - 1]))
            .collect();
        KernelStructure {
            forests,
            excess_edges,
            endpoints,
            branch_or_leaf,
            degree_two,
            paths,
        }
    }

    /// `D = ∪ D_i`.
    pub fn all_degree_two(&self) -> BTreeSet<usize> {
        self.degree_two.iter().flatten().copied().collect()
    }
}

fn color_paths(g: &EdgeColoredGraph, color: usize, internal: &BTreeSet<usize>) -> Vec<Vec<EdgeId>> {
    let mut adj: Vec<Vec<(usize, EdgeId)>> = vec![Vec::new(); g.n()];
    for (i, e) in g.edges().iter().enumerate() {
        if e.colors.contains(color) {
            adj[e.u].push((e.v, i + 1));
            adj[e.v].push((e.u, i + 1));
        }
    }
    let mut used: BTreeSet<EdgeId> = BTreeSet::new();
    let mut paths = Vec::new();
    for &start in internal {
        let (_, first) = adj[start][0];
        if used.contains(&first) {
            continue;
        }
        // walk each way from `start` until leaving the internal set
        let mut halves = Vec::new();
        for &(next, edge) in &adj[start] {
            let mut half = vec![edge];
            let (mut prev_edge, mut cur) = (edge, next);
            while internal.contains(&cur) && cur != start {
                let &(nxt, e2) = adj[cur]
                    .iter()
                    .find(|&&(_, e)| e != prev_edge)
                    .expect("internal vertices have degree two");
                half.push(e2);
                prev_edge = e2;
                cur = nxt;
            }
            halves.push(half);
            if cur == start {
                // closed walk: the whole cycle is internal
                halves.truncate(1);
                break;
            }
        }
        let mut path: Vec<EdgeId> = halves[0].iter().rev().copied().collect();
        if let Some(second) = halves.get(1) {
            path.extend(second.iter().copied());
        }
        used.extend(path.iter().copied());
        paths.push(path);
    }
    paths
}

/// For every edge, the sorted `(color, path index)` pairs of the paths in
/// `P` that contain it.
fn path_membership(g: &EdgeColoredGraph, s: &KernelStructure) -> Vec<Vec<(usize, usize)>> {
    let mut out = vec![Vec::new(); g.m()];
    for (ci, paths) in s.paths.iter().enumerate() {
        for (pi, path) in paths.iter().enumerate() {
            for &e in path {
                out[e - 1].push((ci + 1, pi));
            }
        }
    }
    for v in &mut out {
        v.sort_unstable();
    }
    out
}

type Signature = Vec<Vec<(usize, usize)>>;

/// Collapses one interchangeable vertex if possible. Returns whether the
/// graph changed.
fn collapse_once(w: &mut Work) -> Result<bool, KernelVerdict> {
    debug_assert!(w.alive.iter().all(|&a| a));
    let (g, lift, _) = w.to_graph();
    let s = KernelStructure::of(&g);
    if let Some((i, x)) = s.excess_edges.iter().enumerate().find(|(_, x)| x.len() as i64 > w.k) {
        w.log(
            Rule::ExcessBound,
            format!("color {} has {} non-forest edges > k={}", i + 1, x.len(), w.k),
        );
        return Err(KernelVerdict::No);
    }
    let d = s.all_degree_two();
    if d.is_empty() {
        return Ok(false);
    }
    let membership = path_membership(&g, &s);
    let mut incident: Vec<Vec<EdgeId>> = vec![Vec::new(); g.n()];
    for (i, e) in g.edges().iter().enumerate() {
        incident[e.u].push(i + 1);
        if e.v != e.u {
            incident[e.v].push(i + 1);
        }
    }
    let mut classes: BTreeMap<Signature, Vec<usize>> = BTreeMap::new();
    for &v in &d {
        let mut sig: Signature = incident[v].iter().map(|&e| membership[e - 1].clone()).collect();
        sig.sort();
        classes.entry(sig).or_default().push(v);
    }
    let adjacent = |a: usize, b: usize| incident[a].iter().any(|&e| g.edges()[e - 1].other(a) == b);
    let mut skipped = 0;
    for members in classes.values().filter(|c| c.len() >= 3) {
        let pair = members
            .iter()
            .enumerate()
            .flat_map(|(i, &a)| members[i + 1..].iter().map(move |&b| (a, b)))
            .find(|&(a, b)| !adjacent(a, b));
        let Some((keep, remove)) = pair else {
            skipped += 1;
            continue;
        };
        // bijection between the incident edges with equal path sets
        let mut ev = incident[remove].clone();
        let mut eu = incident[keep].clone();
        ev.sort_by(|a, b| membership[a - 1].cmp(&membership[b - 1]));
        eu.sort_by(|a, b| membership[a - 1].cmp(&membership[b - 1]));
        let partner: BTreeMap<EdgeId, EdgeId> = ev.iter().copied().zip(eu.iter().copied()).collect();

        let mut added = Vec::new();
        for color in 1..=g.alpha() {
            let at: Vec<EdgeId> = ev
                .iter()
                .copied()
                .filter(|&e| g.edges()[e - 1].colors.contains(color))
                .collect();
            if at.is_empty() {
                continue;
            }
            debug_assert_eq!(at.len(), 2, "vertices of D have degree 0 or 2 per color");
            let x = g.edges()[at[0] - 1].other(remove);
            let y = g.edges()[at[1] - 1].other(remove);
            added.push(WEdge {
                u: x.min(y),
                v: x.max(y),
                colors: ColorSet::single(color),
                rep: lift[partner[&at[0]] - 1],
            });
        }
        // `g` and `w` share vertex indices; kernel edge ids index `w.edges`
        let removed_ids: BTreeSet<usize> = ev.iter().map(|e| e - 1).collect();
        let detail = format!(
            "removed vertex {} (twin of {}), added {} single-colored edges",
            w.name(remove),
            w.name(keep),
            added.len()
        );
        let mut idx = 0;
        w.edges.retain(|_| {
            let keep_edge = !removed_ids.contains(&idx);
            idx += 1;
            keep_edge
        });
        w.edges.extend(added);
        w.alive[remove] = false;
        w.log(Rule::Signature, detail);
        return Ok(true);
    }
    if skipped > 0 {
        w.log(
            Rule::Signature,
            format!("skipped {skipped} signature classes with no non-adjacent pair"),
        );
    }
    Ok(false)
}

/// Signature-based vertex removal on an instance at the rules' fixed point,
/// interleaved with the rules until neither changes anything.
pub fn signature_reduce(kernel: Kernel) -> Kernel {
    signature_reduce_with(kernel, KernelOptions::default().max_collapses)
}

fn signature_reduce_with(kernel: Kernel, max_collapses: usize) -> Kernel {
    if kernel.verdict != KernelVerdict::Reduced {
        return kernel;
    }
    let mut w = Work::from_kernel(&kernel);
    for _ in 0..max_collapses {
        // collapse_once indexes vertices of the compacted graph
        if w.alive.iter().any(|&a| !a) {
            w = Work::from_kernel(&w.finish(KernelVerdict::Reduced));
        }
        match collapse_once(&mut w) {
            Err(verdict) => return w.finish(verdict),
            Ok(false) => return w.finish(KernelVerdict::Reduced),
            Ok(true) => {
                let verdict = w.run_rules();
                if verdict != KernelVerdict::Reduced {
                    return w.finish(verdict);
                }
            }
        }
    }
    w.finish(KernelVerdict::Reduced)
}

/// Rules 1-6, then (optionally) signature reduction.
pub fn kernelize(g: &EdgeColoredGraph, k: i64, opts: &KernelOptions) -> Kernel {
    let kernel = apply_rules(g, k);
    if opts.signatures {
        signature_reduce_with(kernel, opts.max_collapses)
    } else {
        kernel
    }
}
