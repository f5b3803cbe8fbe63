//! Instance generators: reductions from Vertex Cover on cubic graphs,
//! Hitting Set and Partitioned Hitting Set, each with a brute-force solver
//! for the source problem, plus a seeded random fuzzer.

use std::collections::BTreeSet;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ecg::{ColorSet, EdgeColoredGraph, GraphError};
use crate::rng;

/// Largest source instance the brute-force solvers accept (bits of search).
const BRUTE_LIMIT_BITS: usize = 24;

#[derive(Debug, Error)]
pub enum GenError {
    #[error("graph is not cubic: vertex {vertex} has degree {degree}")]
    NotCubic { vertex: usize, degree: usize },
    #[error("bad vertex cover instance: {0}")]
    BadGraph(String),
    #[error("set of size < 2 unsupported")]
    SmallSet,
    #[error("element {element} out of range 1..={universe}")]
    ElementOutOfRange { element: usize, universe: usize },
    #[error("sets {first} and {second} of family {family} overlap")]
    Overlap { family: usize, first: usize, second: usize },
    #[error("instance too large for brute force")]
    TooLarge,
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Vertex Cover: graph on `n` vertices with 1-based edges, budget `k`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VcInstance {
    pub n: usize,
    pub edges: Vec<(usize, usize)>,
    pub k: usize,
}

/// Hitting Set over elements `1..=universe`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HsInstance {
    pub universe: usize,
    pub sets: Vec<Vec<usize>>,
    pub k: usize,
}

/// Partitioned Hitting Set: each family consists of pairwise disjoint sets.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhsInstance {
    pub universe: usize,
    pub families: Vec<Vec<Vec<usize>>>,
    pub k: usize,
}

/// A generated Sim-FES instance with a human-readable vertex map.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Generated {
    pub graph: EdgeColoredGraph,
    pub k: usize,
    /// One line per vertex naming its role in the construction.
    pub vertex_names: Vec<String>,
}

impl Generated {
    pub fn comments(&self) -> Vec<String> {
        self.vertex_names
            .iter()
            .enumerate()
            .map(|(i, name)| format!("vertex {} = {}", i + 1, name))
            .collect()
    }
}

/// The reduction from Vertex Cover on cubic graphs (three colors).
///
/// Every edge of `G` is subdivided twice, giving `Ĝ`, whose edges split into
/// three matchings `M_1..M_3`. `G'` holds `Ĝ`, a mirror copy `Ĝ*`, spine
/// edges `{w, w*}` colored `{1,2,3}`, and each `Ĝ`-edge of `M_i` together
/// with its mirror colored `{i}`. The cycles of color class `i` are then
/// disjoint 4-cycles `a - b - b* - a*`, one per edge of `M_i`; the remaining
/// spine edges of that color are bridges. `G` has a vertex
/// cover of size `k` iff `G'` has a simultaneous feedback edge set of size
/// `k + |E(G)|`.
pub fn gen_vc3(inst: &VcInstance) -> Result<Generated, GenError> {
    let n = inst.n;
    let mut nbrs: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut seen = BTreeSet::new();
    for &(a, b) in &inst.edges {
        if a == 0 || b == 0 || a > n || b > n {
            return Err(GenError::BadGraph(format!("edge {a}-{b} outside 1..={n}")));
        }
        if a == b {
            return Err(GenError::BadGraph(format!("loop at {a}")));
        }
        if !seen.insert((a.min(b), a.max(b))) {
            return Err(GenError::BadGraph(format!("parallel edge {a}-{b}")));
        }
        nbrs[a - 1].push(b - 1);
        nbrs[b - 1].push(a - 1);
    }
    if let Some(v) = (0..n).find(|&v| nbrs[v].len() != 3) {
        return Err(GenError::NotCubic {
            vertex: v + 1,
            degree: nbrs[v].len(),
        });
    }
    if inst.k > n {
        return Err(GenError::BadGraph(format!("k = {} exceeds n = {n}", inst.k)));
    }

    // Ĝ: originals, then x_{v,u}, x_{u,v} per edge in edge order
    let m = inst.edges.len();
    let hat_n = n + 2 * m;
    let stub_vertex = |j: usize, from: usize| -> usize {
        let (a, _) = inst.edges[j];
        if from == a - 1 {
            n + 2 * j
        } else {
            n + 2 * j + 1
        }
    };
    // stub color per (edge, endpoint side)
    let mut stub_color = vec![[0usize; 2]; m];
    for v in 0..n {
        let mut incident: Vec<(usize, usize)> = inst
            .edges
            .iter()
            .enumerate()
            .filter_map(|(j, &(a, b))| {
                if a - 1 == v {
                    Some((b - 1, j))
                } else if b - 1 == v {
                    Some((a - 1, j))
                } else {
                    None
                }
            })
            .collect();
        incident.sort_unstable();
        for (c, &(_, j)) in incident.iter().enumerate() {
            let side = usize::from(inst.edges[j].0 - 1 != v);
            stub_color[j][side] = c + 1;
        }
    }
    let mut hat_edges: Vec<(usize, usize, usize)> = Vec::with_capacity(3 * m);
    for (j, &(a, b)) in inst.edges.iter().enumerate() {
        let (xa, xb) = (stub_vertex(j, a - 1), stub_vertex(j, b - 1));
        let [ca, cb] = stub_color[j];
        let middle = (1..=3)
            .find(|&c| c != ca && c != cb)
            .expect("two stubs leave a color free");
        hat_edges.push((a - 1, xa, ca));
        hat_edges.push((xa, xb, middle));
        hat_edges.push((xb, b - 1, cb));
    }

    let mut g = EdgeColoredGraph::new(2 * hat_n, 3);
    for w in 0..hat_n {
        g.add_edge(w, w + hat_n, ColorSet::full(3))?;
    }
    for &(a, b, c) in &hat_edges {
        g.add_edge(a, b, ColorSet::single(c))?;
        g.add_edge(a + hat_n, b + hat_n, ColorSet::single(c))?;
    }

    let mut names: Vec<String> = (1..=n).map(|v| format!("v{v}")).collect();
    for &(a, b) in &inst.edges {
        names.push(format!("x({a},{b})"));
        names.push(format!("x({b},{a})"));
    }
    let starred: Vec<String> = names.iter().map(|s| format!("{s}*")).collect();
    names.extend(starred);
    Ok(Generated {
        graph: g,
        k: inst.k + m,
        vertex_names: names,
    })
}

fn check_set(set: &[usize], universe: usize) -> Result<Vec<usize>, GenError> {
    if let Some(&e) = set.iter().find(|&&e| e == 0 || e > universe) {
        return Err(GenError::ElementOutOfRange { element: e, universe });
    }
    let sorted: BTreeSet<usize> = set.iter().copied().collect();
    if sorted.len() < 2 {
        return Err(GenError::SmallSet);
    }
    Ok(sorted.into_iter().collect())
}

/// Shared construction: element edges `{v_i, w_i}` carrying the colors of
/// the cycles through them, then one cycle per `(set, color)` visiting the
/// element edges in index order and closing from the largest element back to
/// the smallest, with a connector vertex between consecutive elements.
fn build_cycles(universe: usize, alpha: usize, cycles: &[(Vec<usize>, usize)]) -> Result<Generated, GenError> {
    let mut colors: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); universe + 1];
    for (set, color) in cycles {
        for &e in set {
            colors[e].insert(*color);
        }
    }
    let connectors: usize = cycles.iter().map(|(s, _)| s.len()).sum();
    let mut g = EdgeColoredGraph::new(2 * universe + connectors, alpha);
    let mut names = Vec::new();
    for i in 1..=universe {
        names.push(format!("v{i}"));
        names.push(format!("w{i}"));
    }
    for (i, cs) in colors.iter().enumerate().skip(1) {
        if !cs.is_empty() {
            g.add_edge(2 * (i - 1), 2 * (i - 1) + 1, ColorSet::new(cs.iter().copied()))?;
        }
    }
    let mut next = 2 * universe;
    for (set, color) in cycles {
        for (pos, &from) in set.iter().enumerate() {
            let to = set[(pos + 1) % set.len()];
            let s = next;
            next += 1;
            names.push(format!("s({from},{to},{color})"));
            g.add_edge(2 * (from - 1) + 1, s, ColorSet::single(*color))?;
            g.add_edge(s, 2 * (to - 1), ColorSet::single(*color))?;
        }
    }
    Ok(Generated {
        graph: g,
        k: 0,
        vertex_names: names,
    })
}

/// The reduction from Hitting Set: color `t` is a single cycle through the
/// element edges of set `F_t`.
pub fn gen_hs(inst: &HsInstance) -> Result<Generated, GenError> {
    let cycles = inst
        .sets
        .iter()
        .enumerate()
        .map(|(t, s)| Ok((check_set(s, inst.universe)?, t + 1)))
        .collect::<Result<Vec<_>, GenError>>()?;
    let mut out = build_cycles(inst.universe, inst.sets.len(), &cycles)?;
    out.k = inst.k;
    Ok(out)
}

/// The reduction from Partitioned Hitting Set: family `t` becomes color `t`,
/// with one vertex-disjoint cycle per set of the family.
pub fn gen_phs(inst: &PhsInstance) -> Result<Generated, GenError> {
    let mut cycles = Vec::new();
    for (t, family) in inst.families.iter().enumerate() {
        let mut owner: Vec<Option<usize>> = vec![None; inst.universe + 1];
        for (si, set) in family.iter().enumerate() {
            let set = check_set(set, inst.universe)?;
            for &e in &set {
                if let Some(first) = owner[e] {
                    return Err(GenError::Overlap {
                        family: t + 1,
                        first: first + 1,
                        second: si + 1,
                    });
                }
                owner[e] = Some(si);
            }
            cycles.push((set, t + 1));
        }
    }
    let mut out = build_cycles(inst.universe, inst.families.len(), &cycles)?;
    out.k = inst.k;
    Ok(out)
}

/// Uniform random multigraph with loops and nonempty random color sets.
pub fn gen_random(n: usize, m: usize, alpha: usize, seed: u64) -> Result<EdgeColoredGraph, GenError> {
    if m > 0 && (n == 0 || alpha == 0) {
        return Err(GenError::BadGraph(
            "edges need at least one vertex and one color".into(),
        ));
    }
    if alpha >= 64 {
        return Err(GenError::BadGraph(format!("alpha = {alpha} too large")));
    }
    let mut r = rng::stream(seed, &[]);
    let mut g = EdgeColoredGraph::new(n, alpha);
    for _ in 0..m {
        let u = r.gen_range(0..n);
        let v = r.gen_range(0..n);
        let mask: u64 = r.gen_range(1..1u64 << alpha);
        let colors = ColorSet::new((0..alpha).filter(|c| mask >> c & 1 == 1).map(|c| c + 1));
        g.add_edge(u, v, colors)?;
    }
    Ok(g)
}

/// Size of a minimum vertex cover, by exhaustive search.
pub fn brute_vertex_cover(inst: &VcInstance) -> Result<usize, GenError> {
    if inst.n > BRUTE_LIMIT_BITS {
        return Err(GenError::TooLarge);
    }
    let best = (0u32..1 << inst.n)
        .filter(|mask| {
            inst.edges
                .iter()
                .all(|&(a, b)| mask >> (a - 1) & 1 == 1 || mask >> (b - 1) & 1 == 1)
        })
        .map(u32::count_ones)
        .min()
        .unwrap_or(0);
    Ok(best as usize)
}

/// Size of a minimum hitting set of the given sets over `1..=universe`, or
/// `None` when some set is empty.
pub fn brute_hitting_set(universe: usize, sets: &[Vec<usize>]) -> Result<Option<usize>, GenError> {
    if universe > BRUTE_LIMIT_BITS {
        return Err(GenError::TooLarge);
    }
    let masks: Vec<u32> = sets
        .iter()
        .map(|s| s.iter().fold(0u32, |m, &e| m | 1 << (e - 1)))
        .collect();
    Ok((0u32..1 << universe)
        .filter(|h| masks.iter().all(|&s| s & h != 0))
        .map(u32::count_ones)
        .min()
        .map(|c| c as usize))
}

pub fn brute_hs(inst: &HsInstance) -> Result<bool, GenError> {
    Ok(brute_hitting_set(inst.universe, &inst.sets)?.is_some_and(|c| c <= inst.k))
}

pub fn brute_phs(inst: &PhsInstance) -> Result<bool, GenError> {
    let sets: Vec<Vec<usize>> = inst.families.iter().flatten().cloned().collect();
    Ok(brute_hitting_set(inst.universe, &sets)?.is_some_and(|c| c <= inst.k))
}

/// Small connected and disconnected cubic graphs, by name.
pub fn cubic_graphs() -> Vec<(&'static str, VcInstance)> {
    let g = |n: usize, edges: &[(usize, usize)]| VcInstance {
        n,
        edges: edges.to_vec(),
        k: 0,
    };
    vec![
        ("K4", g(4, &[(1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4)])),
        (
            "K33",
            g(
                6,
                &[(1, 4), (1, 5), (1, 6), (2, 4), (2, 5), (2, 6), (3, 4), (3, 5), (3, 6)],
            ),
        ),
        (
            "prism",
            g(
                6,
                &[(1, 2), (2, 3), (3, 1), (4, 5), (5, 6), (6, 4), (1, 4), (2, 5), (3, 6)],
            ),
        ),
        (
            "cube",
            g(
                8,
                &[
                    (1, 2),
                    (2, 3),
                    (3, 4),
                    (4, 1),
                    (5, 6),
                    (6, 7),
                    (7, 8),
                    (8, 5),
                    (1, 5),
                    (2, 6),
                    (3, 7),
                    (4, 8),
                ],
            ),
        ),
        (
            "wagner",
            g(
                8,
                &[
                    (1, 2),
                    (2, 3),
                    (3, 4),
                    (4, 5),
                    (5, 6),
                    (6, 7),
                    (7, 8),
                    (8, 1),
                    (1, 5),
                    (2, 6),
                    (3, 7),
                    (4, 8),
                ],
            ),
        ),
        (
            "2K4",
            g(
                8,
                &[
                    (1, 2),
                    (1, 3),
                    (1, 4),
                    (2, 3),
                    (2, 4),
                    (3, 4),
                    (5, 6),
                    (5, 7),
                    (5, 8),
                    (6, 7),
                    (6, 8),
                    (7, 8),
                ],
            ),
        ),
    ]
}
