//! Sparse matrices over exact rationals.
//!
//! Everything is column-major: a matrix is a list of columns, each a sorted
//! list of (row, value) pairs with nonzero values. That layout matches the
//! two operations the crate leans on, column-sum audits of Markov generators
//! and matrix-vector products against probability vectors. Dense work
//! (inverse, kernel) converts internally and is meant for small dimensions.

use std::collections::BTreeMap;

use num::{One, Signed, Zero};
use thiserror::Error;

use crate::rat::Rat;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MatrixError {
    #[error("dimension mismatch: {left_rows}x{left_cols} vs {right_rows}x{right_cols}")]
    DimensionMismatch {
        left_rows: usize,
        left_cols: usize,
        right_rows: usize,
        right_cols: usize,
    },
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is singular")]
    Singular,
}

#[derive(Clone, PartialEq, Eq)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    columns: Vec<Vec<(usize, Rat)>>,
}

impl RatMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RatMatrix {
            rows,
            cols,
            columns: vec![Vec::new(); cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = RatMatrix::zeros(n, n);
        for i in 0..n {
            m.columns[i].push((i, Rat::one()));
        }
        m
    }

    /// Permutation matrix sending basis vector `c` to basis vector `image[c]`.
    pub fn permutation(image: &[usize]) -> Self {
        let n = image.len();
        let mut m = RatMatrix::zeros(n, n);
        for (c, &r) in image.iter().enumerate() {
            m.columns[c].push((r, Rat::one()));
        }
        m
    }

    /// Builds from (row, col, value) triplets, accumulating duplicates and
    /// dropping entries that cancel to zero.
    pub fn from_entries<I>(rows: usize, cols: usize, entries: I) -> Self
    where
        I: IntoIterator<Item = (usize, usize, Rat)>,
    {
        let mut acc: Vec<BTreeMap<usize, Rat>> = vec![BTreeMap::new(); cols];
        for (r, c, v) in entries {
            assert!(r < rows && c < cols, "entry ({}, {}) out of bounds", r, c);
            if v.is_zero() {
                continue;
            }
            let slot = acc[c].entry(r).or_insert_with(Rat::zero);
            *slot += v;
        }
        let columns = acc
            .into_iter()
            .map(|col| col.into_iter().filter(|(_, v)| !v.is_zero()).collect())
            .collect();
        RatMatrix {
            rows,
            cols,
            columns,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.columns.iter().map(Vec::len).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.columns.iter().all(Vec::is_empty)
    }

    pub fn get(&self, r: usize, c: usize) -> Rat {
        match self.columns[c].binary_search_by_key(&r, |e| e.0) {
            Ok(idx) => self.columns[c][idx].1.clone(),
            Err(_) => Rat::zero(),
        }
    }

    /// Overwrites one entry.
    pub fn set(&mut self, r: usize, c: usize, v: Rat) {
        assert!(r < self.rows && c < self.cols);
        match self.columns[c].binary_search_by_key(&r, |e| e.0) {
            Ok(idx) => {
                if v.is_zero() {
                    self.columns[c].remove(idx);
                } else {
                    self.columns[c][idx].1 = v;
                }
            }
            Err(idx) => {
                if !v.is_zero() {
                    self.columns[c].insert(idx, (r, v));
                }
            }
        }
    }

    pub fn add_to(&mut self, r: usize, c: usize, v: Rat) {
        let current = self.get(r, c);
        self.set(r, c, current + v);
    }

    /// Nonzero entries of one column, sorted by row.
    pub fn column(&self, c: usize) -> &[(usize, Rat)] {
        &self.columns[c]
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &Rat)> {
        self.columns
            .iter()
            .enumerate()
            .flat_map(|(c, col)| col.iter().map(move |(r, v)| (*r, c, v)))
    }

    pub fn col_sum(&self, c: usize) -> Rat {
        self.columns[c]
            .iter()
            .fold(Rat::zero(), |acc, (_, v)| acc + v)
    }

    pub fn transpose(&self) -> RatMatrix {
        RatMatrix::from_entries(
            self.cols,
            self.rows,
            self.entries().map(|(r, c, v)| (c, r, v.clone())),
        )
    }

    pub fn is_symmetric(&self) -> bool {
        self.rows == self.cols && *self == self.transpose()
    }

    pub fn scale(&self, s: &Rat) -> RatMatrix {
        if s.is_zero() {
            return RatMatrix::zeros(self.rows, self.cols);
        }
        RatMatrix {
            rows: self.rows,
            cols: self.cols,
            columns: self
                .columns
                .iter()
                .map(|col| col.iter().map(|(r, v)| (*r, v * s)).collect())
                .collect(),
        }
    }

    pub fn add(&self, other: &RatMatrix) -> Result<RatMatrix, MatrixError> {
        self.check_same_shape(other)?;
        Ok(RatMatrix::from_entries(
            self.rows,
            self.cols,
            self.entries()
                .map(|(r, c, v)| (r, c, v.clone()))
                .chain(other.entries().map(|(r, c, v)| (r, c, v.clone()))),
        ))
    }

    pub fn sub(&self, other: &RatMatrix) -> Result<RatMatrix, MatrixError> {
        self.check_same_shape(other)?;
        Ok(RatMatrix::from_entries(
            self.rows,
            self.cols,
            self.entries()
                .map(|(r, c, v)| (r, c, v.clone()))
                .chain(other.entries().map(|(r, c, v)| (r, c, -v.clone()))),
        ))
    }

    fn check_same_shape(&self, other: &RatMatrix) -> Result<(), MatrixError> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(MatrixError::DimensionMismatch {
                left_rows: self.rows,
                left_cols: self.cols,
                right_rows: other.rows,
                right_cols: other.cols,
            });
        }
        Ok(())
    }

    /// `self * other`.
    pub fn mul(&self, other: &RatMatrix) -> Result<RatMatrix, MatrixError> {
        if self.cols != other.rows {
            return Err(MatrixError::DimensionMismatch {
                left_rows: self.rows,
                left_cols: self.cols,
                right_rows: other.rows,
                right_cols: other.cols,
            });
        }
        let mut columns = Vec::with_capacity(other.cols);
        for c in 0..other.cols {
            let mut acc: BTreeMap<usize, Rat> = BTreeMap::new();
            for (k, w) in &other.columns[c] {
                for (r, v) in &self.columns[*k] {
                    let slot = acc.entry(*r).or_insert_with(Rat::zero);
                    *slot += v * w;
                }
            }
            columns.push(
                acc.into_iter()
                    .filter(|(_, v)| !v.is_zero())
                    .collect::<Vec<_>>(),
            );
        }
        Ok(RatMatrix {
            rows: self.rows,
            cols: other.cols,
            columns,
        })
    }

    pub fn mul_vec(&self, v: &[Rat]) -> Vec<Rat> {
        assert_eq!(v.len(), self.cols, "vector length mismatch");
        let mut out = vec![Rat::zero(); self.rows];
        for (c, col) in self.columns.iter().enumerate() {
            if v[c].is_zero() {
                continue;
            }
            for (r, w) in col {
                out[*r] += w * &v[c];
            }
        }
        out
    }

    pub fn commutes_with(&self, other: &RatMatrix) -> Result<bool, MatrixError> {
        let ab = self.mul(other)?;
        let ba = other.mul(self)?;
        Ok(ab == ba)
    }

    /// Kronecker product, `(self ⊗ other)[(i·R + k), (j·C + l)] = self[i,j]·other[k,l]`.
    pub fn kron(&self, other: &RatMatrix) -> RatMatrix {
        let rows = self.rows * other.rows;
        let cols = self.cols * other.cols;
        let mut entries = Vec::with_capacity(self.nnz() * other.nnz());
        for (ra, ca, va) in self.entries() {
            for (rb, cb, vb) in other.entries() {
                entries.push((ra * other.rows + rb, ca * other.cols + cb, va * vb));
            }
        }
        RatMatrix::from_entries(rows, cols, entries)
    }

    fn to_dense(&self) -> Vec<Vec<Rat>> {
        let mut dense = vec![vec![Rat::zero(); self.cols]; self.rows];
        for (r, c, v) in self.entries() {
            dense[r][c] = v.clone();
        }
        dense
    }

    /// Exact inverse by Gauss-Jordan elimination. Dense internally; intended
    /// for the small square matrices of the transfer-matrix checks.
    pub fn inverse(&self) -> Result<RatMatrix, MatrixError> {
        if self.rows != self.cols {
            return Err(MatrixError::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let n = self.rows;
        let mut a = self.to_dense();
        let mut inv: Vec<Vec<Rat>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| if i == j { Rat::one() } else { Rat::zero() })
                    .collect()
            })
            .collect();
        for col in 0..n {
            let pivot = (col..n)
                .find(|&r| !a[r][col].is_zero())
                .ok_or(MatrixError::Singular)?;
            a.swap(col, pivot);
            inv.swap(col, pivot);
            let p = a[col][col].clone();
            for j in 0..n {
                a[col][j] /= &p;
                inv[col][j] /= &p;
            }
            for r in 0..n {
                if r == col || a[r][col].is_zero() {
                    continue;
                }
                let factor = a[r][col].clone();
                for j in 0..n {
                    let av = &a[col][j] * &factor;
                    a[r][j] -= av;
                    let iv = &inv[col][j] * &factor;
                    inv[r][j] -= iv;
                }
            }
        }
        Ok(RatMatrix::from_entries(
            n,
            n,
            inv.into_iter().enumerate().flat_map(|(r, row)| {
                row.into_iter()
                    .enumerate()
                    .map(move |(c, v)| (r, c, v))
                    .collect::<Vec<_>>()
            }),
        ))
    }

    /// Rank by exact Gaussian elimination (dense internally).
    pub fn rank(&self) -> usize {
        let mut a = self.to_dense();
        let mut rank = 0;
        for col in 0..self.cols {
            let Some(pivot) = (rank..self.rows).find(|&r| !a[r][col].is_zero()) else {
                continue;
            };
            a.swap(rank, pivot);
            let p = a[rank][col].clone();
            for entry in &mut a[rank][col..] {
                *entry /= &p;
            }
            let pivot_row = a[rank][col..].to_vec();
            for (r, row) in a.iter_mut().enumerate() {
                if r == rank || row[col].is_zero() {
                    continue;
                }
                let factor = row[col].clone();
                for (entry, pivot) in row[col..].iter_mut().zip(&pivot_row) {
                    *entry -= pivot * &factor;
                }
            }
            rank += 1;
        }
        rank
    }

    pub fn kernel_dimension(&self) -> usize {
        self.cols - self.rank()
    }

    /// Largest absolute value on the diagonal, as a rational.
    pub fn max_abs_diagonal(&self) -> Rat {
        let mut best = Rat::zero();
        for i in 0..self.rows.min(self.cols) {
            let v = self.get(i, i).abs();
            if v > best {
                best = v;
            }
        }
        best
    }
}

impl std::fmt::Debug for RatMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "RatMatrix {}x{} [", self.rows, self.cols)?;
        for (r, c, v) in self.entries() {
            writeln!(f, "  ({}, {}) = {}", r, c, crate::rat::display(v))?;
        }
        write!(f, "]")
    }
}

/// The pair-swap operator on an n-by-n two-site space: column (i,j) maps to
/// row (j,i) with pairs encoded i·n + j.
pub fn swap_matrix(n: usize) -> RatMatrix {
    let image: Vec<usize> = (0..n * n).map(|p| (p % n) * n + p / n).collect();
    RatMatrix::permutation(&image)
}

/// Embeds a two-site operator (n² by n²) into a chain of `sites` n-ary
/// factors, acting on the ordered pair of positions (pos_a, pos_b). Positions
/// need not be adjacent; the boundary bond (L,1) uses (L-1, 0).
pub fn embed_two_site(
    op: &RatMatrix,
    n: usize,
    sites: usize,
    pos_a: usize,
    pos_b: usize,
) -> RatMatrix {
    assert!(pos_a != pos_b && pos_a < sites && pos_b < sites);
    assert_eq!(op.rows(), n * n);
    assert_eq!(op.cols(), n * n);
    let dim = n.pow(sites as u32);
    let mut entries = Vec::new();
    let mut digits = vec![0usize; sites];
    for col in 0..dim {
        let mut x = col;
        for i in (0..sites).rev() {
            digits[i] = x % n;
            x /= n;
        }
        let pair = digits[pos_a] * n + digits[pos_b];
        for (row_pair, v) in op.column(pair) {
            let mut out = digits.clone();
            out[pos_a] = row_pair / n;
            out[pos_b] = row_pair % n;
            let row = out.iter().fold(0, |acc, &d| acc * n + d);
            entries.push((row, col, v.clone()));
        }
    }
    RatMatrix::from_entries(dim, dim, entries)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{int, rat};

    #[test]
    fn accumulation_and_zero_dropping() {
        let m = RatMatrix::from_entries(
            2,
            2,
            vec![
                (0, 0, int(1)),
                (0, 0, int(1)),
                (1, 0, int(3)),
                (1, 0, int(-3)),
            ],
        );
        assert_eq!(m.get(0, 0), int(2));
        assert_eq!(m.get(1, 0), int(0));
        assert_eq!(m.nnz(), 1);
    }

    #[test]
    fn mul_against_hand_computation() {
        // [[1, 2], [3, 4]] * [[0, 1], [1, 0]] = [[2, 1], [4, 3]]
        let a = RatMatrix::from_entries(
            2,
            2,
            vec![(0, 0, int(1)), (0, 1, int(2)), (1, 0, int(3)), (1, 1, int(4))],
        );
        let b = RatMatrix::from_entries(2, 2, vec![(0, 1, int(1)), (1, 0, int(1))]);
        let ab = a.mul(&b).unwrap();
        assert_eq!(ab.get(0, 0), int(2));
        assert_eq!(ab.get(0, 1), int(1));
        assert_eq!(ab.get(1, 0), int(4));
        assert_eq!(ab.get(1, 1), int(3));
    }

    #[test]
    fn mul_dimension_error() {
        let a = RatMatrix::zeros(2, 3);
        let b = RatMatrix::zeros(2, 3);
        assert!(matches!(
            a.mul(&b),
            Err(MatrixError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn transpose_and_symmetry() {
        let a = RatMatrix::from_entries(2, 2, vec![(0, 1, int(5)), (1, 0, int(5))]);
        assert!(a.is_symmetric());
        let b = RatMatrix::from_entries(2, 2, vec![(0, 1, int(5))]);
        assert!(!b.is_symmetric());
        assert_eq!(b.transpose().get(1, 0), int(5));
    }

    #[test]
    fn mul_vec_matches_mul() {
        let a = RatMatrix::from_entries(
            3,
            3,
            vec![(0, 1, rat(1, 2)), (2, 0, int(7)), (1, 1, int(-1))],
        );
        let v = vec![int(2), int(4), int(0)];
        let got = a.mul_vec(&v);
        assert_eq!(got, vec![int(2), int(-4), int(14)]);
    }

    #[test]
    fn kron_shapes_and_values() {
        let a = RatMatrix::from_entries(2, 2, vec![(0, 0, int(2)), (1, 1, int(3))]);
        let b = RatMatrix::identity(2);
        let k = a.kron(&b);
        assert_eq!(k.rows(), 4);
        assert_eq!(k.get(0, 0), int(2));
        assert_eq!(k.get(1, 1), int(2));
        assert_eq!(k.get(2, 2), int(3));
        assert_eq!(k.get(3, 3), int(3));
    }

    #[test]
    fn inverse_round_trip() {
        let a = RatMatrix::from_entries(
            2,
            2,
            vec![(0, 0, int(1)), (0, 1, int(2)), (1, 0, int(3)), (1, 1, int(4))],
        );
        let inv = a.inverse().unwrap();
        assert_eq!(a.mul(&inv).unwrap(), RatMatrix::identity(2));
        assert_eq!(inv.mul(&a).unwrap(), RatMatrix::identity(2));
    }

    #[test]
    fn inverse_of_singular_fails() {
        let a = RatMatrix::from_entries(2, 2, vec![(0, 0, int(1)), (1, 0, int(1))]);
        assert_eq!(a.inverse(), Err(MatrixError::Singular));
    }

    #[test]
    fn inverse_of_permutation_is_transpose() {
        let p = RatMatrix::permutation(&[2, 0, 1]);
        assert_eq!(p.inverse().unwrap(), p.transpose());
    }

    #[test]
    fn rank_and_kernel() {
        let a = RatMatrix::from_entries(
            3,
            3,
            vec![
                (0, 0, int(1)),
                (0, 1, int(2)),
                (1, 0, int(2)),
                (1, 1, int(4)),
            ],
        );
        assert_eq!(a.rank(), 1);
        assert_eq!(a.kernel_dimension(), 2);
        assert_eq!(RatMatrix::identity(4).kernel_dimension(), 0);
        assert_eq!(RatMatrix::zeros(3, 3).kernel_dimension(), 3);
    }

    #[test]
    fn swap_matrix_swaps_pairs() {
        let p = swap_matrix(3);
        // column (1,2)=5 maps to row (2,1)=7
        assert_eq!(p.get(7, 5), int(1));
        assert_eq!(p.mul(&p).unwrap(), RatMatrix::identity(9));
    }

    #[test]
    fn embed_acts_only_on_chosen_sites() {
        // swap on positions (0, 2) of a 3-site binary chain
        let emb = embed_two_site(&swap_matrix(2), 2, 3, 0, 2);
        // config (1,0,0) = 4 -> (0,0,1) = 1
        assert_eq!(emb.get(1, 4), int(1));
        // config (1,1,0) = 6 -> (0,1,1) = 3
        assert_eq!(emb.get(3, 6), int(1));
        // fixed when digits at 0 and 2 agree
        assert_eq!(emb.get(5, 5), int(1));
        assert_eq!(emb.mul(&emb).unwrap(), RatMatrix::identity(8));
    }

    #[test]
    fn embed_boundary_ordering() {
        // an operator acting on ordered pair (site L-1, site 0): use a map
        // that keeps the first slot and bumps the second mod 2 to expose the
        // ordering convention
        let op = RatMatrix::permutation(&[1, 0, 3, 2]); // (a,b) -> (a, 1-b)
        let emb = embed_two_site(&op, 2, 2, 1, 0);
        // (tau1, tau2) with pos_a = site index 1, pos_b = site index 0:
        // pair = (tau2, tau1) -> (tau2, 1-tau1), so config (0,1)=1 -> (1,1)=3
        assert_eq!(emb.get(3, 1), int(1));
    }

    #[test]
    fn max_abs_diagonal() {
        let a = RatMatrix::from_entries(2, 2, vec![(0, 0, int(-5)), (1, 1, int(3))]);
        assert_eq!(a.max_abs_diagonal(), int(5));
    }
}
