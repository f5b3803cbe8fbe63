#![allow(dead_code)]

use std::collections::BTreeSet;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use simfes::ecg::{ColorSet, EdgeColoredGraph, EdgeId};
use simfes::PrimeField;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random multigraph with loops and parallel edges; when `connected`, the
/// first `n - 1` edges form a random spanning tree.
pub fn random_graph<R: Rng>(r: &mut R, n: usize, m: usize, alpha: usize, connected: bool) -> EdgeColoredGraph {
    let mut g = EdgeColoredGraph::new(n, alpha);
    for i in 0..m {
        let (u, v) = if connected && i + 1 < n {
            (i + 1, r.gen_range(0..=i))
        } else {
            (r.gen_range(0..n), r.gen_range(0..n))
        };
        let mask: u32 = r.gen_range(1..1 << alpha);
        let colors = ColorSet::new((0..alpha).filter(|c| mask >> c & 1 == 1).map(|c| c + 1));
        g.add_edge(u, v, colors).unwrap();
    }
    g
}

/// Whether the listed edges (pairs of 0-based vertices) contain a cycle, by
/// depth-first search; loops and repeated pairs are cycles.
pub fn has_cycle(n: usize, edges: &[(usize, usize)]) -> bool {
    let mut adj = vec![Vec::new(); n];
    for (i, &(u, v)) in edges.iter().enumerate() {
        if u == v {
            return true;
        }
        adj[u].push((v, i));
        adj[v].push((u, i));
    }
    let mut seen = vec![false; n];
    for s in 0..n {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        let mut stack = vec![(s, usize::MAX)];
        while let Some((x, via)) = stack.pop() {
            for &(y, e) in &adj[x] {
                if e == via {
                    continue;
                }
                if seen[y] {
                    return true;
                }
                seen[y] = true;
                stack.push((y, e));
            }
        }
    }
    false
}

pub fn count_components(n: usize, edges: &[(usize, usize)]) -> usize {
    let mut adj = vec![Vec::new(); n];
    for &(u, v) in edges {
        adj[u].push(v);
        adj[v].push(u);
    }
    let mut seen = vec![false; n];
    let mut count = 0;
    for s in 0..n {
        if seen[s] {
            continue;
        }
        count += 1;
        seen[s] = true;
        let mut stack = vec![s];
        while let Some(x) = stack.pop() {
            for &y in &adj[x] {
                if !seen[y] {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
    }
    count
}

/// Whether deleting `deleted` leaves every color class acyclic, checked
/// color by color with [`has_cycle`].
pub fn is_sfes(g: &EdgeColoredGraph, deleted: &BTreeSet<EdgeId>) -> bool {
    (1..=g.alpha()).all(|c| {
        let edges: Vec<(usize, usize)> = g
            .edges()
            .iter()
            .enumerate()
            .filter(|(i, e)| e.colors.contains(c) && !deleted.contains(&(i + 1)))
            .map(|(_, e)| (e.u, e.v))
            .collect();
        !has_cycle(g.n(), &edges)
    })
}

/// Determinant by Laplace expansion along the first row.
pub fn laplace_det(f: &PrimeField, m: &[Vec<u64>]) -> u64 {
    let n = m.len();
    if n == 0 {
        return 1;
    }
    let mut acc = 0;
    for j in 0..n {
        if m[0][j] == 0 {
            continue;
        }
        let minor: Vec<Vec<u64>> = m[1..]
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|&(c, _)| c != j)
                    .map(|(_, &x)| x)
                    .collect()
            })
            .collect();
        let term = f.mul(m[0][j], laplace_det(f, &minor));
        acc = if j % 2 == 0 { f.add(acc, term) } else { f.sub(acc, term) };
    }
    acc
}

pub fn subsets(n: usize) -> impl Iterator<Item = Vec<usize>> {
    (0u32..1 << n).map(move |mask| (0..n).filter(|i| mask >> i & 1 == 1).collect())
}

/// Rank as the largest nonvanishing minor.
pub fn minor_rank(f: &PrimeField, m: &[Vec<u64>]) -> usize {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut best = 0;
    for rs in subsets(rows) {
        for cs in subsets(cols) {
            if rs.len() != cs.len() || rs.len() <= best {
                continue;
            }
            let sub: Vec<Vec<u64>> = rs.iter().map(|&r| cs.iter().map(|&c| m[r][c]).collect()).collect();
            if laplace_det(f, &sub) != 0 {
                best = rs.len();
            }
        }
    }
    best
}
