//! Maximum simultaneous acyclic subgraph.
//!
//! A set of `q` edges is a simultaneous forest iff the `q` blocks of copies
//! are independent in the direct sum of the graphic matroids of the color
//! classes and a free matroid on the fake copies. The free part never
//! constrains anything, so the solver drops the fake copies and solves parity
//! with blocks of varying size (one original copy per color of the edge)
//! over the graphic part alone.
//!
//! The graphic part has rank `Σ (n - η_i)`, which can exceed what wedge
//! vectors support. Only sets of at most `q·α` copies matter, so above a
//! threshold the representation is randomly truncated to that rank; below it
//! the solver is deterministic.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::ecg::{EdgeColoredGraph, EdgeId, GraphError};
use crate::ffield::{lex_subsets, FMatrix, PrimeField};
use crate::matroids::{direct_sum, LinearMatroid, MatroidError};
use crate::parity::{
    binomial, solve_parity_with, ParityBudget, ParityError, ParityInstance, ParityOutcome, ORACLE_LIMIT,
};
use crate::rng;
use crate::simfes::{CopyKind, CopyLabel};

/// Ranks up to this are used as is; larger ones are truncated.
pub const TRUNCATE_ABOVE: usize = 24;

#[derive(Debug, Error)]
pub enum MaxSimError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Matroid(#[from] MatroidError),
    #[error(transparent)]
    Parity(#[from] ParityError),
    #[error("instance too large for oracle")]
    TooLargeForOracle,
    #[error("solution failed verification: {0:?}")]
    Unverified(BTreeSet<EdgeId>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MaxSimOptions {
    pub seed: u64,
    /// Attempts when the representation is truncated; a NO from an
    /// untruncated run is exact and never retried.
    pub trials: usize,
    pub field: PrimeField,
    pub budget: ParityBudget,
}

impl Default for MaxSimOptions {
    fn default() -> Self {
        MaxSimOptions {
            seed: 0,
            trials: 3,
            field: PrimeField::default(),
            budget: ParityBudget::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MaxSimVerdict {
    pub yes: bool,
    /// `q` edges forming a simultaneous forest, on YES.
    pub witness: BTreeSet<EdgeId>,
    /// Whether the representation was truncated (randomized).
    pub truncated: bool,
}

impl MaxSimVerdict {
    fn no(truncated: bool) -> Self {
        MaxSimVerdict {
            yes: false,
            witness: BTreeSet::new(),
            truncated,
        }
    }
}

/// Whether `f` induces a forest in every color class.
pub fn simultaneous_forest_check(g: &EdgeColoredGraph, f: &BTreeSet<EdgeId>) -> Result<bool, GraphError> {
    g.is_simultaneous_forest(f)
}

/// `Σ_i (n - η_i)`: no simultaneous forest is larger.
pub fn forest_bound(g: &EdgeColoredGraph) -> Result<usize, GraphError> {
    (1..=g.alpha())
        .map(|c| Ok(g.n() - g.color_subgraph(c)?.components()))
        .sum()
}

/// Direct sum of the graphic matroids of the color classes, labeled by
/// original copies, together with one block per edge.
pub fn build_maxsim_instance(
    g: &EdgeColoredGraph,
    q: usize,
    field: PrimeField,
) -> Result<ParityInstance<CopyLabel>, MaxSimError> {
    let mut parts = Vec::with_capacity(g.alpha());
    for slot in 1..=g.alpha() {
        let graphic = LinearMatroid::graphic(&g.color_subgraph(slot)?, field)?;
        parts.push(graphic.relabel(|&edge| CopyLabel {
            edge,
            slot,
            kind: CopyKind::Original,
        })?);
    }
    let matroid = if parts.is_empty() {
        LinearMatroid::from_matrix(field, &FMatrix::zeros(0, 0), Vec::new())?
    } else {
        direct_sum(&parts)?
    };
    let blocks = g
        .edges()
        .iter()
        .enumerate()
        .map(|(i, e)| {
            e.colors
                .iter()
                .map(|slot| CopyLabel {
                    edge: i + 1,
                    slot,
                    kind: CopyKind::Original,
                })
                .collect()
        })
        .collect();
    Ok(ParityInstance::with_ragged_blocks(matroid, blocks, q)?)
}

/// Decides whether `g` has a simultaneous forest with `q` edges.
pub fn solve_maxsim(g: &EdgeColoredGraph, q: usize, opts: &MaxSimOptions) -> Result<MaxSimVerdict, MaxSimError> {
    if q == 0 {
        return Ok(MaxSimVerdict {
            yes: true,
            witness: BTreeSet::new(),
            truncated: false,
        });
    }
    if q > g.m() || q > forest_bound(g)? {
        return Ok(MaxSimVerdict::no(false));
    }
    let inst = build_maxsim_instance(g, q, opts.field)?;
    let rank = inst.matroid().rank();
    let widest: usize = {
        let mut sizes: Vec<usize> = inst.blocks().iter().map(Vec::len).collect();
        sizes.sort_unstable_by(|a, b| b.cmp(a));
        sizes[..q].iter().sum()
    };
    let horizon = widest.min(rank);
    let truncated = rank > TRUNCATE_ABOVE && horizon < rank;
    let attempts = if truncated { opts.trials.max(1) } else { 1 };
    for trial in 0..attempts {
        let outcome = if truncated {
            let mut r = rng::stream(opts.seed, &[trial as u64]);
            let m = inst.matroid().truncation(horizon, &mut r)?;
            let t = ParityInstance::with_ragged_blocks(m, inst.blocks().to_vec(), q)?;
            solve_parity_with(&t, &opts.budget)?
        } else {
            solve_parity_with(&inst, &opts.budget)?
        };
        if let ParityOutcome::Found(ids) = outcome {
            let witness: BTreeSet<EdgeId> = ids.into_iter().map(|b| b + 1).collect();
            if !simultaneous_forest_check(g, &witness)? {
                return Err(MaxSimError::Unverified(witness));
            }
            return Ok(MaxSimVerdict {
                yes: true,
                witness,
                truncated,
            });
        }
    }
    Ok(MaxSimVerdict::no(truncated))
}

/// Largest simultaneous forest, by binary search over the decision version.
pub fn max_simultaneous_forest(
    g: &EdgeColoredGraph,
    opts: &MaxSimOptions,
) -> Result<(usize, BTreeSet<EdgeId>), MaxSimError> {
    let (mut lo, mut hi) = (0, g.m().min(forest_bound(g)?));
    let mut best = BTreeSet::new();
    while lo < hi {
        let mid = lo + (hi - lo).div_ceil(2);
        let v = solve_maxsim(g, mid, opts)?;
        if v.yes {
            lo = mid;
            best = v.witness;
        } else {
            hi = mid - 1;
        }
    }
    Ok((lo, best))
}

/// Exhaustive search over `q`-subsets of edges in lexicographic order.
pub fn brute_maxsim(g: &EdgeColoredGraph, q: usize) -> Result<MaxSimVerdict, MaxSimError> {
    if q > g.m() {
        return Ok(MaxSimVerdict::no(false));
    }
    if binomial(g.m() as u128, q as u128) > ORACLE_LIMIT {
        return Err(MaxSimError::TooLargeForOracle);
    }
    for set in lex_subsets(g.m(), q) {
        let f: BTreeSet<EdgeId> = set.into_iter().map(|i| i + 1).collect();
        if simultaneous_forest_check(g, &f)? {
            return Ok(MaxSimVerdict {
                yes: true,
                witness: f,
                truncated: false,
            });
        }
    }
    Ok(MaxSimVerdict::no(false))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ecg::parse_ecg;

    fn opts() -> MaxSimOptions {
        MaxSimOptions::default()
    }

    #[test]
    fn single_edge() {
        let g = parse_ecg("p ecg 2 1 1\ne 1 2 1\n").unwrap();
        let v = solve_maxsim(&g, 1, &opts()).unwrap();
        assert!(v.yes);
        assert_eq!(v.witness, BTreeSet::from([1]));
    }

    #[test]
    fn triangle() {
        let g = parse_ecg("p ecg 3 3 1\ne 1 2 1\ne 2 3 1\ne 3 1 1\n").unwrap();
        assert!(solve_maxsim(&g, 2, &opts()).unwrap().yes);
        assert!(!solve_maxsim(&g, 3, &opts()).unwrap().yes);
        let v = solve_maxsim(&g, 0, &opts()).unwrap();
        assert!(v.yes && v.witness.is_empty());
        assert_eq!(max_simultaneous_forest(&g, &opts()).unwrap().0, 2);
    }

    #[test]
    fn forest_check() {
        let g = parse_ecg("p ecg 3 3 1\ne 1 2 1\ne 2 3 1\ne 3 1 1\n").unwrap();
        assert!(simultaneous_forest_check(&g, &BTreeSet::from([1, 2])).unwrap());
        assert!(!simultaneous_forest_check(&g, &BTreeSet::from([1, 2, 3])).unwrap());
        assert!(simultaneous_forest_check(&g, &BTreeSet::new()).unwrap());
    }

    #[test]
    fn colors_interact() {
        // edges 1,2 parallel in color 1 only through edge 2's color set
        let g = parse_ecg("p ecg 3 4 2\ne 1 2 1\ne 1 2 1,2\ne 2 3 2\ne 3 1 2\n").unwrap();
        for q in 0..=4 {
            assert_eq!(
                solve_maxsim(&g, q, &opts()).unwrap().yes,
                brute_maxsim(&g, q).unwrap().yes,
                "q={q}"
            );
        }
    }

    #[test]
    fn truncation_path() {
        // a long single-color cycle plus chords: rank above the threshold
        let n = 30;
        let mut text = format!("p ecg {n} {} 1\n", n + 2);
        for i in 1..=n {
            text.push_str(&format!("e {} {} 1\n", i, i % n + 1));
        }
        text.push_str("e 1 15 1\ne 2 20 1\n");
        let g = parse_ecg(&text).unwrap();
        let v = solve_maxsim(&g, 3, &opts()).unwrap();
        assert!(v.yes && v.truncated);
        assert!(!solve_maxsim(&g, n, &opts()).unwrap().yes);
    }
}
