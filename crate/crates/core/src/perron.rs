//! Perron eigenvalue of a non-negative integer matrix by bracketed power
//! iteration.
//!
//! For any strictly positive vector `x`, the Collatz-Wielandt quotients
//! `min_i (Ax)_i / x_i` and `max_i (Ax)_i / x_i` bracket the spectral radius.
//! Iterating on `A + I` restricted to each strongly connected block makes the
//! bracket contract; vectors are kept as exact integers and only the quotients
//! are rounded.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

use crate::matrix::Matrix;

const MAX_ITERATIONS: usize = 200_000;
const RESCALE_BITS: u64 = 512;
const KEEP_BITS: u64 = 192;

/// Interval containing the Perron eigenvalue.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PerronEstimate {
    pub lower: f64,
    pub upper: f64,
    pub iterations: usize,
}

impl PerronEstimate {
    pub fn value(&self) -> f64 {
        0.5 * (self.lower + self.upper)
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn converged(&self, tolerance: f64) -> bool {
        self.width() < tolerance
    }
}

/// Quotient of two big integers as `f64`, stable for very large operands.
pub(crate) fn ratio_f64(num: &BigUint, den: &BigUint) -> f64 {
    let bits = num.bits().max(den.bits());
    if bits <= 1000 {
        if let (Some(a), Some(b)) = (num.to_f64(), den.to_f64()) {
            if a.is_finite() && b.is_finite() {
                return a / b;
            }
        }
    }
    let shift = bits.saturating_sub(120);
    let a = (num >> shift).to_f64().unwrap_or(f64::INFINITY);
    let b = (den >> shift).to_f64().unwrap_or(f64::INFINITY);
    a / b
}

/// Strongly connected components of the graph `i -> j` when `A[j][i] > 0`,
/// each sorted, listed by smallest member.
pub(crate) fn strong_components(a: &Matrix) -> Vec<Vec<usize>> {
    let n = a.rows();
    // transitive closure; matrices here are small
    let mut reach = vec![vec![false; n]; n];
    for (i, row) in reach.iter_mut().enumerate() {
        row[i] = true;
        for (j, r) in row.iter_mut().enumerate() {
            if !a.get(j, i).is_zero() {
                *r = true;
            }
        }
    }
    for k in 0..n {
        for i in 0..n {
            if reach[i][k] {
                for j in 0..n {
                    if reach[k][j] {
                        reach[i][j] = true;
                    }
                }
            }
        }
    }
    let mut assigned = vec![false; n];
    let mut out = Vec::new();
    for i in 0..n {
        if assigned[i] {
            continue;
        }
        let comp: Vec<usize> = (0..n).filter(|&j| reach[i][j] && reach[j][i]).collect();
        for &j in &comp {
            assigned[j] = true;
        }
        out.push(comp);
    }
    out
}

fn submatrix(a: &Matrix, idx: &[usize]) -> Matrix {
    let mut m = Matrix::zeros(idx.len(), idx.len());
    for (r, &i) in idx.iter().enumerate() {
        for (c, &j) in idx.iter().enumerate() {
            m.set(r, c, a.get(i, j).clone());
        }
    }
    m
}

/// Power iteration on `B + I` for an irreducible block. Returns the bracket
/// for the eigenvalue of `B` and the final iterate.
fn irreducible_bracket(b: &Matrix, tolerance: f64) -> (PerronEstimate, Vec<BigUint>) {
    let n = b.rows();
    let mut x = vec![BigUint::one(); n];
    let mut best = PerronEstimate {
        lower: 0.0,
        upper: f64::INFINITY,
        iterations: 0,
    };
    for it in 1..=MAX_ITERATIONS {
        let bx = b.mul_vec(&x);
        let y: Vec<BigUint> = bx.iter().zip(&x).map(|(p, q)| p + q).collect();
        let mut lo = f64::INFINITY;
        let mut hi = 0.0f64;
        for (yi, xi) in y.iter().zip(&x) {
            let q = ratio_f64(yi, xi) - 1.0;
            lo = lo.min(q);
            hi = hi.max(q);
        }
        best = PerronEstimate {
            lower: best.lower.max(lo.max(0.0)),
            upper: best.upper.min(hi),
            iterations: it,
        };
        x = y;
        if best.width() < tolerance {
            break;
        }
        let bits = x.iter().map(BigUint::bits).max().unwrap_or(0);
        if bits > RESCALE_BITS {
            let shift = bits - KEEP_BITS;
            // any positive vector still yields a valid bracket
            x = x.iter().map(|v| (v >> shift) + 1u32).collect();
        }
    }
    (best, x)
}

/// Brackets the spectral radius of a square non-negative matrix until the
/// interval is narrower than `tolerance` (or the iteration cap is hit).
pub fn perron_bracket(a: &Matrix, tolerance: f64) -> PerronEstimate {
    assert!(a.is_square(), "Perron eigenvalue of a non-square matrix");
    let mut lower = 0.0f64;
    let mut upper = 0.0f64;
    let mut iterations = 0;
    for comp in strong_components(a) {
        if comp.len() == 1 && a.get(comp[0], comp[0]).is_zero() {
            continue;
        }
        let (est, _) = irreducible_bracket(&submatrix(a, &comp), tolerance);
        lower = lower.max(est.lower);
        upper = upper.max(est.upper);
        iterations = iterations.max(est.iterations);
    }
    PerronEstimate {
        lower,
        upper,
        iterations,
    }
}

/// Positive eigenvector for the Perron eigenvalue of an irreducible matrix,
/// normalised to sum 1.
pub fn perron_vector_f64(a: &Matrix, tolerance: f64) -> Vec<f64> {
    let (_, x) = irreducible_bracket(a, tolerance);
    let total: BigUint = x.iter().sum();
    x.iter().map(|v| ratio_f64(v, &total)).collect()
}

/// Smallest and largest row sums, the classical Perron-Frobenius bounds.
pub fn row_sum_bounds(a: &Matrix) -> (BigUint, BigUint) {
    let sums: Vec<BigUint> = a.row_iter().map(|r| r.iter().sum()).collect();
    (
        sums.iter().min().cloned().unwrap_or_default(),
        sums.iter().max().cloned().unwrap_or_default(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_ratio() {
        let est = perron_bracket(&Matrix::from_u64(&[&[1, 1], &[1, 0]]), 1e-13);
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        assert!(est.lower <= phi + 1e-15 && phi - 1e-15 <= est.upper);
        assert!((est.value() - phi).abs() < 1e-12);
    }

    #[test]
    fn block_diagonal_takes_max() {
        let est = perron_bracket(&Matrix::from_u64(&[&[2, 0], &[0, 3]]), 1e-12);
        assert!((est.value() - 3.0).abs() < 1e-12);
    }

    #[test]
    fn periodic_irreducible() {
        // eigenvalues ±sqrt(2)
        let est = perron_bracket(&Matrix::from_u64(&[&[0, 2], &[1, 0]]), 1e-12);
        assert!((est.value() - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn nilpotent_is_zero() {
        let est = perron_bracket(&Matrix::from_u64(&[&[0, 0], &[1, 0]]), 1e-12);
        assert_eq!(est.value(), 0.0);
    }

    #[test]
    fn huge_quotient() {
        let big = BigUint::one() << 3000u32;
        let r = ratio_f64(&(big.clone() * 3u32), &big);
        assert!((r - 3.0).abs() < 1e-15);
    }

    #[test]
    fn components_are_grouped() {
        let a = Matrix::from_u64(&[&[1, 0, 0], &[1, 0, 1], &[0, 1, 0]]);
        assert_eq!(strong_components(&a), vec![vec![0], vec![1, 2]]);
    }
}
