//! α-Matroid Parity: find `q` blocks whose union is independent.
//!
//! The solver is a dynamic program over representative families. Level `j`
//! holds unions of `j` blocks, each tagged with its block ids; every level is
//! extended by one unused block and then pruned to a representative
//! subfamily through [`crate::repfam`]. Each level stays representative for
//! the rest of an optimal solution, so the last level is nonempty iff the
//! instance is a yes-instance.

use std::collections::BTreeSet;
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};

use thiserror::Error;

use crate::ffield::lex_subsets;
use crate::matroids::{Label, LinearMatroid, MatroidError};
use crate::par;
use crate::repfam::{select_spanning, sparse_columns, RepFamError, SparseColumn, Wedge};

pub const ORACLE_LIMIT: u128 = 1_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParityError {
    #[error("malformed blocks: {0}")]
    MalformedBlocks(String),
    #[error("instance too large for oracle")]
    TooLargeForOracle,
    #[error("level {level} exceeded the work budget ({what} over {limit})")]
    BudgetExceeded {
        level: usize,
        what: &'static str,
        limit: usize,
    },
    #[error(transparent)]
    Matroid(#[from] MatroidError),
    #[error(transparent)]
    RepFam(#[from] RepFamError),
}

#[derive(Debug, Clone)]
pub struct ParityInstance<L> {
    matroid: LinearMatroid<L>,
    blocks: Vec<Vec<L>>,
    block_columns: Vec<Vec<usize>>,
    q: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParityOutcome {
    /// Ids (indices into the block list) of `q` blocks with independent union.
    Found(BTreeSet<usize>),
    /// No solution. `empty_level` is the first DP level that came out empty,
    /// or 0 when a size argument ruled the instance out before the DP ran.
    NotFound { empty_level: usize },
}

impl ParityOutcome {
    pub fn is_found(&self) -> bool {
        matches!(self, ParityOutcome::Found(_))
    }

    pub fn blocks(&self) -> Option<&BTreeSet<usize>> {
        match self {
            ParityOutcome::Found(b) => Some(b),
            ParityOutcome::NotFound { .. } => None,
        }
    }
}

/// Work limit for the DP. Before pruning, a level may hold at most
/// `max_candidates` extended sets whose wedge vectors have at most
/// `max_terms` nonzero coordinates in total.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ParityBudget {
    pub max_candidates: usize,
    pub max_terms: usize,
}

impl ParityBudget {
    pub fn unlimited() -> Self {
        ParityBudget {
            max_candidates: usize::MAX,
            max_terms: usize::MAX,
        }
    }
}

impl Default for ParityBudget {
    /// About half a gigabyte of wedge coordinates per level.
    fn default() -> Self {
        ParityBudget {
            max_candidates: usize::MAX,
            max_terms: 1 << 25,
        }
    }
}

impl<L: Label> ParityInstance<L> {
    /// Blocks must be pairwise disjoint and all of the same size.
    pub fn new(matroid: LinearMatroid<L>, blocks: Vec<Vec<L>>, q: usize) -> Result<Self, ParityError> {
        if let Some(first) = blocks.first() {
            if blocks.iter().any(|b| b.len() != first.len()) {
                return Err(ParityError::MalformedBlocks("blocks differ in size".into()));
            }
        }
        Self::with_ragged_blocks(matroid, blocks, q)
    }

    /// Like [`ParityInstance::new`] but blocks may have different (nonzero)
    /// sizes.
    pub fn with_ragged_blocks(matroid: LinearMatroid<L>, blocks: Vec<Vec<L>>, q: usize) -> Result<Self, ParityError> {
        let mut seen = BTreeSet::new();
        let mut block_columns = Vec::with_capacity(blocks.len());
        for (i, b) in blocks.iter().enumerate() {
            if b.is_empty() {
                return Err(ParityError::MalformedBlocks(format!("block {i} is empty")));
            }
            let cols = matroid.columns_of(b)?;
            for &c in &cols {
                if !seen.insert(c) {
                    return Err(ParityError::MalformedBlocks(format!(
                        "label {:?} appears in more than one block",
                        matroid.labels()[c]
                    )));
                }
            }
            block_columns.push(cols);
        }
        Ok(ParityInstance {
            matroid,
            blocks,
            block_columns,
            q,
        })
    }

    pub fn matroid(&self) -> &LinearMatroid<L> {
        &self.matroid
    }

    pub fn blocks(&self) -> &[Vec<L>] {
        &self.blocks
    }

    pub fn q(&self) -> usize {
        self.q
    }

    /// Whether the union of the given blocks is independent.
    pub fn union_is_independent(&self, ids: &BTreeSet<usize>) -> Result<bool, ParityError> {
        let mut labels = Vec::new();
        for &id in ids {
            let b = self
                .blocks
                .get(id)
                .ok_or_else(|| ParityError::MalformedBlocks(format!("unknown block {id}")))?;
            labels.extend(b.iter().cloned());
        }
        Ok(self.matroid.is_independent(&labels)?)
    }

    /// Smallest possible size of a union of `q` blocks.
    fn min_union_size(&self) -> Option<usize> {
        if self.q > self.blocks.len() {
            return None;
        }
        let mut sizes: Vec<usize> = self.blocks.iter().map(Vec::len).collect();
        sizes.sort_unstable();
        Some(sizes[..self.q].iter().sum())
    }
}

struct State {
    witness: Vec<usize>,
    wedge: Wedge,
}

pub fn solve_parity<L: Label>(inst: &ParityInstance<L>) -> Result<ParityOutcome, ParityError> {
    solve_parity_with(inst, &ParityBudget::default())
}

pub fn solve_parity_with<L: Label>(
    inst: &ParityInstance<L>,
    budget: &ParityBudget,
) -> Result<ParityOutcome, ParityError> {
    match inst.min_union_size() {
        Some(s) if s <= inst.matroid.rank() => {}
        _ => return Ok(ParityOutcome::NotFound { empty_level: 0 }),
    }
    if inst.q == 0 {
        return Ok(ParityOutcome::Found(BTreeSet::new()));
    }
    let field = *inst.matroid.field();
    let cols: Vec<SparseColumn> = sparse_columns(&inst.matroid)?;
    let blocks = &inst.block_columns;

    let mut level = vec![State {
        witness: Vec::new(),
        wedge: Wedge::unit(),
    }];
    for j in 1..=inst.q {
        let terms = AtomicUsize::new(0);
        let count = AtomicUsize::new(0);
        let over = AtomicBool::new(false);
        let mut candidates: Vec<State> = par::flat_map(&level, |st| {
            let mut out = Vec::new();
            for (b, block) in blocks.iter().enumerate() {
                if over.load(Ordering::Relaxed) {
                    break;
                }
                if st.witness.contains(&b) {
                    continue;
                }
                let mut w = st.wedge.clone();
                for &c in block {
                    w = w.extend(&field, &cols[c]);
                    if w.is_zero() {
                        break;
                    }
                }
                if w.is_zero() {
                    continue;
                }
                let t = terms.fetch_add(w.terms().len(), Ordering::Relaxed) + w.terms().len();
                let c = count.fetch_add(1, Ordering::Relaxed) + 1;
                if t > budget.max_terms || c > budget.max_candidates {
                    over.store(true, Ordering::Relaxed);
                    break;
                }
                let mut witness = st.witness.clone();
                let pos = witness.partition_point(|&x| x < b);
                witness.insert(pos, b);
                out.push(State { witness, wedge: w });
            }
            out
        });
        if over.load(Ordering::Relaxed) {
            let (what, limit) = if count.load(Ordering::Relaxed) > budget.max_candidates {
                ("candidates", budget.max_candidates)
            } else {
                ("wedge terms", budget.max_terms)
            };
            return Err(ParityError::BudgetExceeded { level: j, what, limit });
        }
        candidates.sort_by(|a, b| a.witness.cmp(&b.witness));
        candidates.dedup_by(|a, b| a.witness == b.witness);
        let wedges: Vec<Wedge> = candidates.iter().map(|s| s.wedge.clone()).collect();
        let keep = select_spanning(&field, &wedges);
        let mut keep_iter = keep.into_iter().peekable();
        level = candidates
            .into_iter()
            .enumerate()
            .filter_map(|(i, s)| {
                if keep_iter.peek() == Some(&i) {
                    keep_iter.next();
                    Some(s)
                } else {
                    None
                }
            })
            .collect();
        if level.is_empty() {
            return Ok(ParityOutcome::NotFound { empty_level: j });
        }
    }
    Ok(ParityOutcome::Found(level.swap_remove(0).witness.into_iter().collect()))
}

/// Exhaustive search over `q`-subsets of blocks in lexicographic order.
pub fn brute_parity<L: Label>(inst: &ParityInstance<L>) -> Result<ParityOutcome, ParityError> {
    let nb = inst.blocks.len();
    if binomial(nb as u128, inst.q as u128) > ORACLE_LIMIT {
        return Err(ParityError::TooLargeForOracle);
    }
    for ids in lex_subsets(nb, inst.q) {
        let ids: BTreeSet<usize> = ids.into_iter().collect();
        if inst.union_is_independent(&ids)? {
            return Ok(ParityOutcome::Found(ids));
        }
    }
    Ok(ParityOutcome::NotFound { empty_level: 0 })
}

pub(crate) fn binomial(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
        if acc > u64::MAX as u128 {
            return u128::MAX;
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ecg::Multigraph;
    use crate::ffield::{FMatrix, PrimeField};

    fn f() -> PrimeField {
        PrimeField::default()
    }

    fn triangle_instance(q: usize) -> ParityInstance<usize> {
        let tri = Multigraph {
            n: 3,
            edges: vec![(0, 1, 1), (1, 2, 2), (2, 0, 3)],
        };
        let m = LinearMatroid::graphic(&tri, f()).unwrap();
        ParityInstance::new(m, vec![vec![1], vec![2], vec![3]], q).unwrap()
    }

    #[test]
    fn graphic_triangle() {
        for solve in [solve_parity::<usize>, brute_parity::<usize>] {
            let inst = triangle_instance(2);
            let out = solve(&inst).unwrap();
            let ids = out.blocks().unwrap();
            assert_eq!(ids.len(), 2);
            assert!(inst.union_is_independent(ids).unwrap());
            assert!(!solve(&triangle_instance(3)).unwrap().is_found());
        }
        assert_eq!(
            solve_parity(&triangle_instance(3)).unwrap(),
            ParityOutcome::NotFound { empty_level: 0 }
        );
    }

    #[test]
    fn free_pairs() {
        let m = LinearMatroid::free(4, f());
        let inst = ParityInstance::new(m, vec![vec![0, 1], vec![2, 3]], 2).unwrap();
        for solve in [solve_parity::<usize>, brute_parity::<usize>] {
            assert_eq!(solve(&inst).unwrap(), ParityOutcome::Found([0, 1].into()));
        }
    }

    #[test]
    fn repeated_directions_fail() {
        let a = FMatrix::from_rows(&f(), &[vec![1, 0, 1, 0], vec![0, 1, 0, 1]]).unwrap();
        let m = LinearMatroid::from_matrix(f(), &a, vec![0usize, 1, 2, 3]).unwrap();
        let inst = ParityInstance::new(m, vec![vec![0, 1], vec![2, 3]], 2).unwrap();
        assert!(!solve_parity(&inst).unwrap().is_found());
        assert!(!brute_parity(&inst).unwrap().is_found());
    }

    #[test]
    fn malformed_blocks_rejected() {
        let m = LinearMatroid::free(4, f());
        assert!(matches!(
            ParityInstance::new(m.clone(), vec![vec![0, 1], vec![1, 2]], 1),
            Err(ParityError::MalformedBlocks(_))
        ));
        assert!(matches!(
            ParityInstance::new(m.clone(), vec![vec![0, 1], vec![2]], 1),
            Err(ParityError::MalformedBlocks(_))
        ));
        assert!(matches!(
            ParityInstance::new(m, vec![vec![9]], 1),
            Err(ParityError::Matroid(_))
        ));
    }

    #[test]
    fn q_zero_is_trivial() {
        assert_eq!(
            solve_parity(&triangle_instance(0)).unwrap(),
            ParityOutcome::Found(BTreeSet::new())
        );
    }

    #[test]
    fn oracle_guard() {
        let m = LinearMatroid::free(40, f());
        let blocks = (0..40).map(|i| vec![i]).collect();
        let inst = ParityInstance::new(m, blocks, 20).unwrap();
        assert_eq!(brute_parity(&inst), Err(ParityError::TooLargeForOracle));
    }

    #[test]
    fn budget_is_enforced() {
        let m = LinearMatroid::free(6, f());
        let blocks = (0..6).map(|i| vec![i]).collect();
        let inst = ParityInstance::new(m, blocks, 3).unwrap();
        let budget = ParityBudget {
            max_candidates: 3,
            ..ParityBudget::unlimited()
        };
        assert!(matches!(
            solve_parity_with(&inst, &budget),
            Err(ParityError::BudgetExceeded { level: 1, .. })
        ));
    }

    #[test]
    fn ragged_blocks() {
        let m = LinearMatroid::free(3, f());
        let inst = ParityInstance::with_ragged_blocks(m, vec![vec![0, 1], vec![2]], 2).unwrap();
        assert_eq!(solve_parity(&inst).unwrap(), ParityOutcome::Found([0, 1].into()));
    }
}
