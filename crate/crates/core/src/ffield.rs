//! Exact arithmetic and dense linear algebra over a prime field `F_p`.
//!
//! Residues are stored as `u64` in `[0, p)`. The modulus is restricted to
//! `p < 2^32` so the product of two residues fits in a `u64` before
//! reduction.

use std::fmt;

use thiserror::Error;

/// The Mersenne prime `2^31 - 1`.
pub const DEFAULT_PRIME: u64 = 2_147_483_647;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("modulus {0} is not a prime in (2, 2^32)")]
    BadModulus(u64),
    #[error("set larger than rank")]
    SetLargerThanRank,
    #[error("dimension mismatch: {0}")]
    Dimension(String),
}

/// A prime field `F_p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PrimeField {
    p: u64,
}

impl Default for PrimeField {
    fn default() -> Self {
        PrimeField { p: DEFAULT_PRIME }
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self, FieldError> {
        if p <= 2 || p >= (1 << 32) || !is_prime(p) {
            return Err(FieldError::BadModulus(p));
        }
        Ok(PrimeField { p })
    }

    #[inline]
    pub fn modulus(&self) -> u64 {
        self.p
    }

    /// Reduces an arbitrary signed integer into `[0, p)`.
    #[inline]
    pub fn from_i64(&self, x: i64) -> u64 {
        x.rem_euclid(self.p as i64) as u64
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    #[inline]
    pub fn neg(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        (a * b) % self.p
    }

    pub fn pow(&self, mut base: u64, mut exp: u64) -> u64 {
        let mut acc = 1;
        base %= self.p;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    /// Multiplicative inverse by Fermat's little theorem.
    pub fn inv(&self, a: u64) -> Result<u64, FieldError> {
        let a = a % self.p;
        if a == 0 {
            return Err(FieldError::DivisionByZero);
        }
        Ok(self.pow(a, self.p - 2))
    }
}

/// Dense row-major matrix of residues.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FMatrix {
    rows: usize,
    cols: usize,
    data: Vec<u64>,
}

impl fmt::Debug for FMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "FMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            writeln!(f, "  {:?}", self.row(r))?;
        }
        write!(f, "]")
    }
}

impl FMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        FMatrix {
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    /// Builds a matrix from row vectors. Entries are reduced modulo `field`.
    pub fn from_rows(field: &PrimeField, rows: &[Vec<u64>]) -> Result<Self, FieldError> {
        let cols = rows.first().map_or(0, Vec::len);
        Self::from_rows_with_cols(field, rows, cols)
    }

    /// Like [`FMatrix::from_rows`] but with an explicit column count, so that
    /// zero-row matrices keep their width.
    pub fn from_rows_with_cols(field: &PrimeField, rows: &[Vec<u64>], cols: usize) -> Result<Self, FieldError> {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != cols {
                return Err(FieldError::Dimension(format!(
                    "row {i} has {} entries, expected {cols}",
                    row.len()
                )));
            }
            data.extend(row.iter().map(|&x| x % field.modulus()));
        }
        Ok(FMatrix {
            rows: rows.len(),
            cols,
            data,
        })
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> u64 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: u64) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[u64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<u64> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    /// The submatrix made of the given columns, in the given order.
    pub fn select_columns(&self, cols: &[usize]) -> FMatrix {
        let mut out = FMatrix::zeros(self.rows, cols.len());
        for r in 0..self.rows {
            for (j, &c) in cols.iter().enumerate() {
                out.set(r, j, self.get(r, c));
            }
        }
        out
    }

    pub fn transpose(&self) -> FMatrix {
        let mut out = FMatrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.set(c, r, self.get(r, c));
            }
        }
        out
    }

    /// Stacks `other` under `self`.
    pub fn vstack(&self, other: &FMatrix) -> Result<FMatrix, FieldError> {
        if self.cols != other.cols {
            return Err(FieldError::Dimension(format!(
                "cannot stack {} columns on {} columns",
                other.cols, self.cols
            )));
        }
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Ok(FMatrix {
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        })
    }

    pub fn mul(&self, field: &PrimeField, rhs: &FMatrix) -> Result<FMatrix, FieldError> {
        if self.cols != rhs.rows {
            return Err(FieldError::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = FMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..rhs.cols {
                    let v = field.add(out.get(i, j), field.mul(a, rhs.get(k, j)));
                    out.set(i, j, v);
                }
            }
        }
        Ok(out)
    }

    /// Reduced row echelon form in place. Pivots are taken from the lowest
    /// available row index. Returns the pivot columns.
    fn rref_in_place(&mut self, field: &PrimeField) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut next_row = 0;
        for c in 0..self.cols {
            if next_row == self.rows {
                break;
            }
            let Some(pr) = (next_row..self.rows).find(|&r| self.get(r, c) != 0) else {
                continue;
            };
            if pr != next_row {
                for j in 0..self.cols {
                    self.data.swap(pr * self.cols + j, next_row * self.cols + j);
                }
            }
            let inv = field.inv(self.get(next_row, c)).expect("pivot is nonzero");
            for j in c..self.cols {
                let v = field.mul(self.get(next_row, j), inv);
                self.set(next_row, j, v);
            }
            for r in 0..self.rows {
                if r == next_row {
                    continue;
                }
                let f = self.get(r, c);
                if f == 0 {
                    continue;
                }
                for j in c..self.cols {
                    let v = field.sub(self.get(r, j), field.mul(f, self.get(next_row, j)));
                    self.set(r, j, v);
                }
            }
            pivots.push(c);
            next_row += 1;
        }
        pivots
    }

    pub fn rank(&self, field: &PrimeField) -> usize {
        self.clone().rref_in_place(field).len()
    }

    /// Row-reduces to a full-row-rank matrix with the same column matroid.
    ///
    /// The result is the nonzero part of the reduced row echelon form, so the
    /// submatrix on the returned pivot columns is an identity.
    pub fn standard_form(&self, field: &PrimeField) -> (FMatrix, Vec<usize>) {
        let mut m = self.clone();
        let pivots = m.rref_in_place(field);
        m.data.truncate(pivots.len() * m.cols);
        m.rows = pivots.len();
        (m, pivots)
    }

    /// Determinant of a square matrix.
    pub fn determinant(&self, field: &PrimeField) -> Result<u64, FieldError> {
        if self.rows != self.cols {
            return Err(FieldError::Dimension(format!(
                "determinant of non-square {}x{} matrix",
                self.rows, self.cols
            )));
        }
        let n = self.rows;
        let mut m = self.clone();
        let mut det = 1;
        for c in 0..n {
            let Some(pr) = (c..n).find(|&r| m.get(r, c) != 0) else {
                return Ok(0);
            };
            if pr != c {
                for j in 0..n {
                    m.data.swap(pr * n + j, c * n + j);
                }
                det = field.neg(det);
            }
            let pivot = m.get(c, c);
            det = field.mul(det, pivot);
            let inv = field.inv(pivot)?;
            for r in c + 1..n {
                let f = field.mul(m.get(r, c), inv);
                if f == 0 {
                    continue;
                }
                for j in c..n {
                    let v = field.sub(m.get(r, j), field.mul(f, m.get(c, j)));
                    m.set(r, j, v);
                }
            }
        }
        Ok(det)
    }
}

/// Incrementally maintained row-echelon basis of a vector space.
///
/// Each stored vector is normalised so that its pivot (first nonzero
/// coordinate) equals one; pivots are pairwise distinct.
#[derive(Debug, Clone)]
pub struct EchelonBasis {
    field: PrimeField,
    dim: usize,
    rows: Vec<Vec<u64>>,
    pivot_row: Vec<Option<usize>>,
}

impl EchelonBasis {
    pub fn new(field: PrimeField, dim: usize) -> Self {
        EchelonBasis {
            field,
            dim,
            rows: Vec::new(),
            pivot_row: vec![None; dim],
        }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Inserts `v` if it is outside the current span. Returns whether it was
    /// inserted.
    pub fn insert(&mut self, v: &[u64]) -> bool {
        assert_eq!(v.len(), self.dim, "vector length mismatch");
        let f = self.field;
        let mut w = v.to_vec();
        for c in 0..self.dim {
            if w[c] == 0 {
                continue;
            }
            match self.pivot_row[c] {
                Some(r) => {
                    let coef = w[c];
                    for (j, x) in self.rows[r].iter().enumerate().skip(c) {
                        if *x != 0 {
                            w[j] = f.sub(w[j], f.mul(coef, *x));
                        }
                    }
                }
                None => {
                    let inv = f.inv(w[c]).expect("nonzero");
                    for x in w.iter_mut().skip(c) {
                        *x = f.mul(*x, inv);
                    }
                    self.pivot_row[c] = Some(self.rows.len());
                    self.rows.push(w);
                    return true;
                }
            }
        }
        false
    }
}

/// Indices of a maximal linearly independent subfamily, chosen greedily in
/// ascending index order.
pub fn max_independent_subset(field: &PrimeField, vectors: &[Vec<u64>]) -> Vec<usize> {
    let Some(dim) = vectors.first().map(Vec::len) else {
        return Vec::new();
    };
    let mut basis = EchelonBasis::new(*field, dim);
    vectors
        .iter()
        .enumerate()
        .filter_map(|(i, v)| basis.insert(v).then_some(i))
        .collect()
}

/// All `size`-subsets of `0..n` in lexicographic order.
pub fn lex_subsets(n: usize, size: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, size: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == size {
            out.push(cur.clone());
            return;
        }
        let need = size - cur.len();
        for i in start..=n.saturating_sub(need) {
            if n < need {
                break;
            }
            cur.push(i);
            rec(i + 1, n, size, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if size <= n {
        rec(0, n, size, &mut Vec::with_capacity(size), &mut out);
    }
    out
}

/// Plücker (maximal-minor) vector of the columns `set` of `a`.
///
/// Coordinate `I`, for each `|set|`-subset `I` of row indices in lexicographic
/// order, is `det(a[I, set])`. The vector vanishes iff the columns are
/// dependent, provided `a` has no zero rows.
pub fn wedge_vector(field: &PrimeField, a: &FMatrix, set: &[usize]) -> Result<Vec<u64>, FieldError> {
    if set.len() > a.rows() {
        return Err(FieldError::SetLargerThanRank);
    }
    let sub = a.select_columns(set);
    lex_subsets(a.rows(), set.len())
        .into_iter()
        .map(|rows| {
            let mut m = FMatrix::zeros(rows.len(), set.len());
            for (i, &r) in rows.iter().enumerate() {
                for j in 0..set.len() {
                    m.set(i, j, sub.get(r, j));
                }
            }
            m.determinant(field)
        })
        .collect()
}
