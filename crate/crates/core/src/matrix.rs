//! Dense matrices of non-negative arbitrary-precision integers.
//!
//! Multiplicity matrices are stored row-major. Row `j` indexes a vertex of the
//! lower (later) level and column `i` a vertex of the upper level, so dimension
//! vectors propagate by left multiplication.

use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, Zero};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<BigUint>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![BigUint::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, BigUint::one());
        }
        m
    }

    /// Builds a matrix from rows. Returns `None` when the rows are ragged.
    pub fn from_rows<T: Into<BigUint> + Clone>(rows: &[Vec<T>]) -> Option<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return None;
        }
        let data = rows
            .iter()
            .flat_map(|r| r.iter().cloned().map(Into::into))
            .collect();
        Some(Matrix {
            rows: rows.len(),
            cols,
            data,
        })
    }

    /// Like [`Matrix::from_rows`] but panics on ragged input. Handy for literals.
    pub fn from_u64(rows: &[&[u64]]) -> Self {
        let owned: Vec<Vec<u64>> = rows.iter().map(|r| r.to_vec()).collect();
        Matrix::from_rows(&owned).expect("ragged matrix literal")
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<BigUint>) -> Self {
        assert_eq!(data.len(), rows * cols, "data length does not match shape");
        Matrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, row: usize, col: usize) -> &BigUint {
        &self.data[row * self.cols + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: BigUint) {
        self.data[row * self.cols + col] = value;
    }

    pub fn row(&self, row: usize) -> &[BigUint] {
        &self.data[row * self.cols..(row + 1) * self.cols]
    }

    pub fn row_iter(&self) -> impl Iterator<Item = &[BigUint]> + '_ {
        (0..self.rows).map(move |r| self.row(r))
    }

    pub fn entries(&self) -> &[BigUint] {
        &self.data
    }

    /// Matrix product `self · rhs`.
    pub fn mul(&self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.cols, rhs.rows, "matrix product shape mismatch");
        let mut out = Matrix::zeros(self.rows, rhs.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a.is_zero() {
                    continue;
                }
                for c in 0..rhs.cols {
                    let b = rhs.get(k, c);
                    if !b.is_zero() {
                        out.data[r * rhs.cols + c] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[BigUint]) -> Vec<BigUint> {
        assert_eq!(self.cols, v.len(), "matrix-vector shape mismatch");
        self.row_iter()
            .map(|row| {
                row.iter()
                    .zip(v)
                    .filter(|(a, _)| !a.is_zero())
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect()
    }

    pub fn pow(&self, exp: usize) -> Matrix {
        assert!(self.is_square(), "power of a non-square matrix");
        let mut result = Matrix::identity(self.rows);
        let mut base = self.clone();
        let mut e = exp;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    pub fn transpose(&self) -> Matrix {
        let mut out = Matrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.set(c, r, self.get(r, c).clone());
            }
        }
        out
    }

    pub fn has_zero_row(&self) -> Option<usize> {
        (0..self.rows).find(|&r| self.row(r).iter().all(Zero::is_zero))
    }

    pub fn is_strictly_positive(&self) -> bool {
        self.data.iter().all(|x| !x.is_zero())
    }

    pub fn max_entry(&self) -> BigUint {
        self.data.iter().max().cloned().unwrap_or_default()
    }

    /// Zero/non-zero pattern as booleans, row-major.
    pub fn support(&self) -> BoolMatrix {
        BoolMatrix {
            n_rows: self.rows,
            n_cols: self.cols,
            bits: self.data.iter().map(|x| !x.is_zero()).collect(),
        }
    }

    /// Entries as `u64` when they all fit.
    pub fn to_u64_rows(&self) -> Option<Vec<Vec<u64>>> {
        self.row_iter()
            .map(|row| row.iter().map(|x| u64::try_from(x).ok()).collect())
            .collect()
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (r, row) in self.row_iter().enumerate() {
            if r > 0 {
                write!(f, ", ")?;
            }
            write!(f, "[")?;
            for (c, x) in row.iter().enumerate() {
                if c > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{x}")?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

/// Boolean adjacency pattern; used for reachability and primitivity tests.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoolMatrix {
    n_rows: usize,
    n_cols: usize,
    bits: Vec<bool>,
}

impl BoolMatrix {
    pub fn get(&self, row: usize, col: usize) -> bool {
        self.bits[row * self.n_cols + col]
    }

    pub fn rows(&self) -> usize {
        self.n_rows
    }

    pub fn cols(&self) -> usize {
        self.n_cols
    }

    pub fn mul(&self, rhs: &BoolMatrix) -> BoolMatrix {
        assert_eq!(self.n_cols, rhs.n_rows);
        let mut bits = vec![false; self.n_rows * rhs.n_cols];
        for r in 0..self.n_rows {
            for k in 0..self.n_cols {
                if !self.get(r, k) {
                    continue;
                }
                for c in 0..rhs.n_cols {
                    if rhs.get(k, c) {
                        bits[r * rhs.n_cols + c] = true;
                    }
                }
            }
        }
        BoolMatrix {
            n_rows: self.n_rows,
            n_cols: rhs.n_cols,
            bits,
        }
    }

    pub fn all(&self) -> bool {
        self.bits.iter().all(|&b| b)
    }

    /// Image of a column-indexed vertex set: rows reachable in one step.
    pub fn image(&self, set: &[bool]) -> Vec<bool> {
        (0..self.n_rows)
            .map(|r| (0..self.n_cols).any(|c| set[c] && self.get(r, c)))
            .collect()
    }
}
