//! Representative families of independent sets via exterior (wedge)
//! vectors.
//!
//! For a matroid represented by a full-row-rank `r x n` matrix `A`, the wedge
//! vector of an ordered set `S` has one coordinate per `|S|`-subset `I` of the
//! rows, equal to `det A[I, S]`. For `|S| + |B| = r`, `S ∪ B` is a basis iff
//! the pairing of the two wedge vectors is nonzero, and the pairing is
//! linear in each argument. So a family whose wedge vectors span the wedge
//! vectors of a larger family represents it: any `B` that extends a member of
//! the larger family also extends some kept member. Smaller `B` reduce to this
//! case by completing `S ∪ B` to a basis.
//!
//! Wedge vectors are stored sparsely, keyed by the bitmask of `I`, which caps
//! the supported rank at 64.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use thiserror::Error;

use crate::ffield::PrimeField;
use crate::matroids::{Label, LinearMatroid, MatroidError};
use crate::par;

pub const MAX_WEDGE_RANK: usize = 64;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RepFamError {
    #[error("malformed family: {0}")]
    Malformed(String),
    #[error("rank {0} exceeds the supported wedge rank {MAX_WEDGE_RANK}")]
    RankTooLarge(usize),
    #[error(transparent)]
    Matroid(#[from] MatroidError),
}

/// A column of the representation, as its nonzero `(row, value)` pairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseColumn(Vec<(u32, u64)>);

impl SparseColumn {
    pub fn from_dense(col: &[u64]) -> Self {
        SparseColumn(
            col.iter()
                .enumerate()
                .filter(|(_, &x)| x != 0)
                .map(|(i, &x)| (i as u32, x))
                .collect(),
        )
    }
}

/// All columns of a matroid's representation in sparse form.
pub fn sparse_columns<L: Label>(m: &LinearMatroid<L>) -> Result<Vec<SparseColumn>, RepFamError> {
    if m.rank() > MAX_WEDGE_RANK {
        return Err(RepFamError::RankTooLarge(m.rank()));
    }
    Ok((0..m.ground_size())
        .map(|c| SparseColumn::from_dense(&m.matrix().column(c)))
        .collect())
}

/// Sparse wedge vector: `(row-subset bitmask, coefficient)` sorted by mask.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Wedge(Vec<(u64, u64)>);

impl Wedge {
    /// The wedge of the empty set.
    pub fn unit() -> Self {
        Wedge(vec![(0, 1)])
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn terms(&self) -> &[(u64, u64)] {
        &self.0
    }

    /// `self ∧ col`, with `col` appended as the last column.
    pub fn extend(&self, field: &PrimeField, col: &SparseColumn) -> Wedge {
        let mut acc: Vec<(u64, u64)> = Vec::with_capacity(self.0.len() * col.0.len());
        for &(mask, w) in &self.0 {
            for &(row, x) in &col.0 {
                let bit = 1u64 << row;
                if mask & bit != 0 {
                    continue;
                }
                // sign of moving the new row past the larger rows already in the set
                let above = (mask & !(bit | (bit - 1))).count_ones();
                let mut v = field.mul(w, x);
                if above % 2 == 1 {
                    v = field.neg(v);
                }
                acc.push((mask | bit, v));
            }
        }
        acc.sort_unstable_by_key(|&(m, _)| m);
        let mut out: Vec<(u64, u64)> = Vec::with_capacity(acc.len());
        for (m, v) in acc {
            match out.last_mut() {
                Some((lm, lv)) if *lm == m => *lv = field.add(*lv, v),
                _ => out.push((m, v)),
            }
        }
        out.retain(|&(_, v)| v != 0);
        Wedge(out)
    }

    pub fn of_columns<'a>(field: &PrimeField, cols: impl IntoIterator<Item = &'a SparseColumn>) -> Wedge {
        cols.into_iter().fold(Wedge::unit(), |w, c| w.extend(field, c))
    }

    /// Dense form with coordinates ordered lexicographically by row subset.
    pub fn to_dense_lex(&self, rows: usize, size: usize) -> Vec<u64> {
        let subsets = crate::ffield::lex_subsets(rows, size);
        let pos: HashMap<u64, usize> = subsets
            .iter()
            .enumerate()
            .map(|(i, s)| (s.iter().fold(0u64, |m, &r| m | 1 << r), i))
            .collect();
        let mut out = vec![0; subsets.len()];
        for &(m, v) in &self.0 {
            out[pos[&m]] = v;
        }
        out
    }
}

/// Echelon basis over sparse vectors keyed by `u64`.
#[derive(Debug, Clone)]
pub struct SparseEchelon {
    field: PrimeField,
    rows: Vec<Vec<(u64, u64)>>,
    pivots: HashMap<u64, usize>,
}

impl SparseEchelon {
    pub fn new(field: PrimeField) -> Self {
        SparseEchelon {
            field,
            rows: Vec::new(),
            pivots: HashMap::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Inserts `v` if it is outside the current span.
    pub fn insert(&mut self, v: &[(u64, u64)]) -> bool {
        let f = self.field;
        let mut w: BTreeMap<u64, u64> = v.iter().copied().filter(|&(_, x)| x != 0).collect();
        let mut cursor = 0u64;
        while let Some((&key, &coef)) = w.range(cursor..).next() {
            if let Some(&r) = self.pivots.get(&key) {
                for &(k, x) in &self.rows[r] {
                    let cur = w.get(&k).copied().unwrap_or(0);
                    let nv = f.sub(cur, f.mul(coef, x));
                    if nv == 0 {
                        w.remove(&k);
                    } else {
                        w.insert(k, nv);
                    }
                }
            }
            match key.checked_add(1) {
                Some(c) => cursor = c,
                None => break,
            }
        }
        let Some((&pivot, &lead)) = w.iter().next() else {
            return false;
        };
        let inv = f.inv(lead).expect("nonzero");
        let row: Vec<(u64, u64)> = w.into_iter().map(|(k, x)| (k, f.mul(x, inv))).collect();
        self.pivots.insert(pivot, self.rows.len());
        self.rows.push(row);
        true
    }
}

/// Greedy maximal independent subfamily of wedge vectors, in input order.
pub fn select_spanning(field: &PrimeField, wedges: &[Wedge]) -> Vec<usize> {
    let mut basis = SparseEchelon::new(*field);
    wedges
        .iter()
        .enumerate()
        .filter_map(|(i, w)| basis.insert(&w.0).then_some(i))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Member<L> {
    pub set: Vec<L>,
    pub witness: BTreeSet<usize>,
}

/// Independent sets, each tagged with the block ids that produced it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WitnessedFamily<L> {
    pub members: Vec<Member<L>>,
}

impl<L> Default for WitnessedFamily<L> {
    fn default() -> Self {
        WitnessedFamily { members: Vec::new() }
    }
}

impl<L: Label> WitnessedFamily<L> {
    pub fn new(members: Vec<Member<L>>) -> Self {
        WitnessedFamily { members }
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// A `(rank - s)`-representative subfamily of a family of independent
/// `s`-sets.
///
/// Members are ordered by witness before the greedy selection, and the
/// output keeps that order. The output has at most `C(rank, s)` members.
pub fn representative<L: Label>(
    family: &WitnessedFamily<L>,
    matroid: &LinearMatroid<L>,
) -> Result<WitnessedFamily<L>, RepFamError> {
    let Some(first) = family.members.first() else {
        return Ok(WitnessedFamily::default());
    };
    let size = first.set.len();
    if size > matroid.rank() {
        return Err(RepFamError::Malformed(format!(
            "member size {size} exceeds rank {}",
            matroid.rank()
        )));
    }
    let cols = sparse_columns(matroid)?;
    let field = *matroid.field();
    let mut members: Vec<&Member<L>> = family.members.iter().collect();
    members.sort_by(|a, b| a.witness.cmp(&b.witness));

    let wedges: Vec<Result<Wedge, RepFamError>> = par::map(&members, |m| {
        if m.set.len() != size {
            return Err(RepFamError::Malformed("members have different sizes".into()));
        }
        let idx = matroid.columns_of(&m.set)?;
        let w = Wedge::of_columns(&field, idx.iter().map(|&c| &cols[c]));
        if w.is_zero() {
            return Err(RepFamError::Malformed(format!("dependent member {:?}", m.set)));
        }
        Ok(w)
    });
    let wedges = wedges.into_iter().collect::<Result<Vec<_>, _>>()?;
    let keep = select_spanning(&field, &wedges);
    Ok(WitnessedFamily::new(
        keep.into_iter().map(|i| members[i].clone()).collect(),
    ))
}
