//! Linear matroid representations: graphic, cographic, uniform, elongation
//! and direct sum, all over one prime field.

use std::collections::{HashMap, HashSet};
use std::fmt::Debug;
use std::hash::Hash;

use rand::Rng;
use thiserror::Error;

use crate::ecg::{EdgeId, Multigraph};
use crate::ffield::{FMatrix, FieldError, PrimeField};

/// How many times a rank-deficient random elongation is resampled.
const ELONGATION_ATTEMPTS: usize = 5;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MatroidError {
    #[error("unknown label {0}")]
    UnknownLabel(String),
    #[error("duplicate label {0}")]
    DuplicateLabel(String),
    #[error("matroids are over different fields")]
    FieldMismatch,
    #[error("elongation length {len} outside [{rank}, {ground}]")]
    ElongationRange { len: usize, rank: usize, ground: usize },
    #[error("elongation sampling failed")]
    ElongationFailed,
    #[error("uniform matroid U({ground},{rank}) needs rank <= ground < p = {p}")]
    Uniform { ground: usize, rank: usize, p: u64 },
    #[error(transparent)]
    Field(#[from] FieldError),
}

pub trait Label: Clone + Eq + Hash + Ord + Debug + Send + Sync {}
impl<T: Clone + Eq + Hash + Ord + Debug + Send + Sync> Label for T {}

/// A matroid given by a full-row-rank matrix, one labeled column per ground
/// element.
#[derive(Debug, Clone)]
pub struct LinearMatroid<L> {
    field: PrimeField,
    matrix: FMatrix,
    labels: Vec<L>,
    index: HashMap<L, usize>,
}

impl<L: Label> PartialEq for LinearMatroid<L> {
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field && self.matrix == other.matrix && self.labels == other.labels
    }
}

impl<L: Label> Eq for LinearMatroid<L> {}

impl<L: Label> LinearMatroid<L> {
    /// Wraps an arbitrary matrix, row-reducing it to full row rank.
    pub fn from_matrix(field: PrimeField, matrix: &FMatrix, labels: Vec<L>) -> Result<Self, MatroidError> {
        if labels.len() != matrix.cols() {
            return Err(FieldError::Dimension(format!("{} labels for {} columns", labels.len(), matrix.cols())).into());
        }
        let (reduced, _) = matrix.standard_form(&field);
        Self::from_parts(field, reduced, labels)
    }

    fn from_parts(field: PrimeField, matrix: FMatrix, labels: Vec<L>) -> Result<Self, MatroidError> {
        let mut index = HashMap::with_capacity(labels.len());
        for (i, l) in labels.iter().enumerate() {
            if index.insert(l.clone(), i).is_some() {
                return Err(MatroidError::DuplicateLabel(format!("{l:?}")));
            }
        }
        Ok(LinearMatroid {
            field,
            matrix,
            labels,
            index,
        })
    }

    pub fn field(&self) -> &PrimeField {
        &self.field
    }

    pub fn matrix(&self) -> &FMatrix {
        &self.matrix
    }

    pub fn labels(&self) -> &[L] {
        &self.labels
    }

    pub fn rank(&self) -> usize {
        self.matrix.rows()
    }

    pub fn ground_size(&self) -> usize {
        self.labels.len()
    }

    pub fn column_of(&self, label: &L) -> Result<usize, MatroidError> {
        self.index
            .get(label)
            .copied()
            .ok_or_else(|| MatroidError::UnknownLabel(format!("{label:?}")))
    }

    pub fn columns_of(&self, labels: &[L]) -> Result<Vec<usize>, MatroidError> {
        labels.iter().map(|l| self.column_of(l)).collect()
    }

    /// Whether the columns of `set` are linearly independent.
    pub fn is_independent(&self, set: &[L]) -> Result<bool, MatroidError> {
        let mut cols = self.columns_of(set)?;
        cols.sort_unstable();
        cols.dedup();
        if cols.len() > self.rank() {
            return Ok(false);
        }
        Ok(self.matrix.select_columns(&cols).rank(&self.field) == cols.len())
    }

    pub fn relabel<M: Label>(&self, f: impl Fn(&L) -> M) -> Result<LinearMatroid<M>, MatroidError> {
        LinearMatroid::from_parts(self.field, self.matrix.clone(), self.labels.iter().map(f).collect())
    }

    /// The dual matroid, with columns kept in their original order.
    pub fn dual(&self) -> LinearMatroid<L> {
        let f = &self.field;
        let n = self.ground_size();
        let (rref, pivots) = self.matrix.standard_form(f);
        let r = pivots.len();
        let is_pivot: HashSet<usize> = pivots.iter().copied().collect();
        let free: Vec<usize> = (0..n).filter(|c| !is_pivot.contains(c)).collect();
        let mut dual = FMatrix::zeros(n - r, n);
        for (j, &c) in free.iter().enumerate() {
            dual.set(j, c, 1);
            for (i, &pc) in pivots.iter().enumerate() {
                dual.set(j, pc, f.neg(rref.get(i, c)));
            }
        }
        LinearMatroid::from_parts(self.field, dual, self.labels.clone()).expect("labels were already distinct")
    }

    /// Stacks `len - rank` uniformly random rows under the representation.
    ///
    /// A set that is independent in the true elongation may, with
    /// probability at most `len / p` per set, be represented as dependent.
    /// The converse error cannot happen.
    pub fn elongation<R: Rng + ?Sized>(&self, len: usize, rng: &mut R) -> Result<LinearMatroid<L>, MatroidError> {
        let (rank, ground) = (self.rank(), self.ground_size());
        if len < rank || len > ground {
            return Err(MatroidError::ElongationRange { len, rank, ground });
        }
        if len == rank {
            return Ok(self.clone());
        }
        let p = self.field.modulus();
        for _ in 0..ELONGATION_ATTEMPTS {
            let extra: Vec<Vec<u64>> = (0..len - rank)
                .map(|_| (0..ground).map(|_| rng.gen_range(0..p)).collect())
                .collect();
            let extra = FMatrix::from_rows_with_cols(&self.field, &extra, ground)?;
            let stacked = self.matrix.vstack(&extra)?;
            if stacked.rank(&self.field) == len {
                return LinearMatroid::from_parts(self.field, stacked, self.labels.clone());
            }
        }
        Err(MatroidError::ElongationFailed)
    }

    /// Projects the representation onto `len` random combinations of its
    /// rows. Sets of size at most `len` that were independent stay
    /// independent except with probability at most `len / p`; dependent
    /// sets stay dependent.
    pub fn truncation<R: Rng + ?Sized>(&self, len: usize, rng: &mut R) -> Result<LinearMatroid<L>, MatroidError> {
        if len >= self.rank() {
            return Ok(self.clone());
        }
        let p = self.field.modulus();
        let proj: Vec<Vec<u64>> = (0..len)
            .map(|_| (0..self.rank()).map(|_| rng.gen_range(0..p)).collect())
            .collect();
        let proj = FMatrix::from_rows_with_cols(&self.field, &proj, self.rank())?;
        let projected = proj.mul(&self.field, &self.matrix)?;
        LinearMatroid::from_matrix(self.field, &projected, self.labels.clone())
    }
}

impl LinearMatroid<EdgeId> {
    /// Graphic matroid from the signed incidence matrix: `+1` at the lower
    /// endpoint, `-1` at the other, zero column for a loop.
    pub fn graphic(h: &Multigraph, field: PrimeField) -> Result<Self, MatroidError> {
        let mut inc = FMatrix::zeros(h.n, h.edges.len());
        for (j, &(u, v, _)) in h.edges.iter().enumerate() {
            if u != v {
                let (lo, hi) = (u.min(v), u.max(v));
                inc.set(lo, j, 1);
                inc.set(hi, j, field.neg(1));
            }
        }
        let labels = h.edges.iter().map(|&(_, _, id)| id).collect();
        LinearMatroid::from_matrix(field, &inc, labels)
    }

    /// Cographic matroid: a set is independent iff deleting it keeps the
    /// number of components.
    pub fn cographic(h: &Multigraph, field: PrimeField) -> Result<Self, MatroidError> {
        Ok(Self::graphic(h, field)?.dual())
    }
}

impl LinearMatroid<usize> {
    /// `U(ground, rank)` as a Vandermonde matrix on the points `1..=ground`.
    pub fn uniform(ground: usize, rank: usize, field: PrimeField) -> Result<Self, MatroidError> {
        if rank > ground || field.modulus() <= ground as u64 {
            return Err(MatroidError::Uniform {
                ground,
                rank,
                p: field.modulus(),
            });
        }
        let mut m = FMatrix::zeros(rank, ground);
        for j in 0..ground {
            let x = (j + 1) as u64;
            let mut pw = 1;
            for i in 0..rank {
                m.set(i, j, pw);
                pw = field.mul(pw, x);
            }
        }
        LinearMatroid::from_parts(field, m, (0..ground).collect())
    }

    /// The free matroid `U(ground, ground)` as an identity matrix.
    pub fn free(ground: usize, field: PrimeField) -> Self {
        LinearMatroid::from_parts(field, FMatrix::identity(ground), (0..ground).collect()).expect("labels are distinct")
    }
}

/// Block-diagonal direct sum; labels are concatenated in order.
pub fn direct_sum<L: Label>(parts: &[LinearMatroid<L>]) -> Result<LinearMatroid<L>, MatroidError> {
    let Some(first) = parts.first() else {
        return Err(FieldError::Dimension("empty direct sum".into()).into());
    };
    let field = first.field;
    if parts.iter().any(|m| m.field != field) {
        return Err(MatroidError::FieldMismatch);
    }
    let rows: usize = parts.iter().map(LinearMatroid::rank).sum();
    let cols: usize = parts.iter().map(LinearMatroid::ground_size).sum();
    let mut m = FMatrix::zeros(rows, cols);
    let mut labels = Vec::with_capacity(cols);
    let (mut r0, mut c0) = (0, 0);
    for part in parts {
        for r in 0..part.rank() {
            for c in 0..part.ground_size() {
                m.set(r0 + r, c0 + c, part.matrix.get(r, c));
            }
        }
        labels.extend(part.labels.iter().cloned());
        r0 += part.rank();
        c0 += part.ground_size();
    }
    LinearMatroid::from_parts(field, m, labels)
}
