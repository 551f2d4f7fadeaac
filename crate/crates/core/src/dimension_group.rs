//! K₀ presentations of stationary diagrams and numerical invariants of the
//! associated dimension groups.
//!
//! The report carries the characteristic polynomial, determinant and Perron
//! value of the presentation matrix, which change when the tail is telescoped.
//! [`compare_invariants`] only distinguishes on quantities that survive
//! telescoping and are invariants of the dimension group itself: its rank,
//! simplicity, and for each prime `p` the rank of `G / pG`.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::diagram::{BratteliDiagram, DimensionVector};
use crate::matrix::Matrix;
use crate::perron::{perron_bracket, PerronEstimate};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DimensionGroupError {
    #[error("diagram has no stationary tail")]
    NotStationary,
}

/// `K₀` as the direct limit `Zᵏ → Zᵏ → …` along the tail matrix, with the
/// dimension vector at the first tail level as order unit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StationaryPresentation {
    pub rank: usize,
    pub matrix: Matrix,
    pub unit: DimensionVector,
}

pub fn k0_presentation(d: &BratteliDiagram) -> Result<StationaryPresentation, DimensionGroupError> {
    let tail = d.tail_matrix().ok_or(DimensionGroupError::NotStationary)?;
    let t = d.tail_start().unwrap();
    let unit = d.dims(t).expect("tail start is a stored level");
    Ok(StationaryPresentation {
        rank: tail.rows(),
        matrix: tail.clone(),
        unit,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct InvariantReport {
    /// Coefficients of `det(xI − A)`, leading coefficient first.
    pub char_poly: Vec<BigInt>,
    pub determinant: BigInt,
    pub eventual_rank: usize,
    pub perron: PerronEstimate,
    pub tolerance: f64,
    pub primitive: bool,
    /// Absolute product of the non-zero eigenvalues (with multiplicity).
    pub nonzero_determinant: BigUint,
    /// Rank of `G / pG` for each prime `p` dividing `nonzero_determinant`.
    pub reduced_ranks: BTreeMap<u64, usize>,
    /// Part of `nonzero_determinant` left unfactored by trial division.
    pub unfactored: Option<BigUint>,
}

impl InvariantReport {
    pub fn perron_value(&self) -> f64 {
        self.perron.value()
    }

    /// Rank of `G / pG`, when it can be decided from the report alone.
    pub fn reduced_rank(&self, p: u64) -> Option<usize> {
        if let Some(&r) = self.reduced_ranks.get(&p) {
            return Some(r);
        }
        match &self.unfactored {
            Some(rest) if (rest % p).is_zero() => None,
            _ => Some(self.eventual_rank),
        }
    }
}

/// Exact invariants plus a Perron bracket narrower than `tolerance`.
pub fn stationary_invariants(p: &StationaryPresentation, tolerance: f64) -> InvariantReport {
    let a = &p.matrix;
    let k = a.rows();
    let char_poly = char_poly(a);
    let determinant = if k % 2 == 0 {
        char_poly[k].clone()
    } else {
        -char_poly[k].clone()
    };
    let eventual_rank = rational_rank(&a.pow(k));
    let nonzero = char_poly
        .iter()
        .rev()
        .find(|c| !c.is_zero())
        .map(|c| c.magnitude().clone())
        .unwrap_or_else(BigUint::one);
    let (primes, unfactored) = factor(&nonzero);
    let reduced_ranks = primes
        .iter()
        .map(|&q| (q, eventual_rank_mod(a, q)))
        .collect();
    InvariantReport {
        char_poly,
        determinant,
        eventual_rank,
        perron: perron_bracket(a, tolerance),
        tolerance,
        primitive: is_primitive(a),
        nonzero_determinant: nonzero,
        reduced_ranks,
        unfactored,
    }
}

/// Characteristic polynomial by the Faddeev-LeVerrier recurrence; every
/// division is exact over the integers.
pub fn char_poly(a: &Matrix) -> Vec<BigInt> {
    let n = a.rows();
    let a = to_int(a);
    let mut coeffs = vec![BigInt::one()];
    let mut m = vec![vec![BigInt::zero(); n]; n];
    for k in 1..=n {
        // M_k = A·M_{k−1} + c_{n−k+1}·I
        let c_prev = coeffs.last().unwrap().clone();
        let mut next = int_mul(&a, &m);
        for (i, row) in next.iter_mut().enumerate() {
            row[i] += &c_prev;
        }
        m = next;
        let am = int_mul(&a, &m);
        let trace: BigInt = (0..n).map(|i| am[i][i].clone()).sum();
        let (q, r) = (-trace).div_rem(&BigInt::from(k));
        debug_assert!(r.is_zero(), "Faddeev-LeVerrier division must be exact");
        coeffs.push(q);
    }
    coeffs
}

/// Evaluates a polynomial (leading coefficient first) at a square matrix.
pub fn poly_at_matrix(coeffs: &[BigInt], a: &Matrix) -> Vec<Vec<BigInt>> {
    let n = a.rows();
    let ai = to_int(a);
    let mut acc = vec![vec![BigInt::zero(); n]; n];
    for c in coeffs {
        acc = int_mul(&acc, &ai);
        for (i, row) in acc.iter_mut().enumerate() {
            row[i] += c;
        }
    }
    acc
}

fn to_int(a: &Matrix) -> Vec<Vec<BigInt>> {
    a.row_iter()
        .map(|r| r.iter().map(|x| BigInt::from_biguint(Sign::Plus, x.clone())).collect())
        .collect()
}

fn int_mul(a: &[Vec<BigInt>], b: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    let n = a.len();
    let m = b.first().map_or(0, Vec::len);
    let mut out = vec![vec![BigInt::zero(); m]; n];
    for i in 0..n {
        for (k, bk) in b.iter().enumerate() {
            if a[i][k].is_zero() {
                continue;
            }
            for j in 0..m {
                out[i][j] += &a[i][k] * &bk[j];
            }
        }
    }
    out
}

/// Rank over the rationals by fraction-free (Bareiss) elimination.
pub fn rational_rank(a: &Matrix) -> usize {
    let mut m = to_int(a);
    let rows = m.len();
    let cols = a.cols();
    let mut rank = 0;
    let mut prev_pivot = BigInt::one();
    for col in 0..cols {
        let Some(pivot_row) = (rank..rows).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(rank, pivot_row);
        for r in rank + 1..rows {
            for c in col + 1..cols {
                let v = &m[rank][col] * &m[r][c] - &m[r][col] * &m[rank][c];
                m[r][c] = v / &prev_pivot;
            }
            m[r][col] = BigInt::zero();
        }
        prev_pivot = m[rank][col].clone();
        rank += 1;
        if rank == rows {
            break;
        }
    }
    rank
}

fn rank_mod(mut m: Vec<Vec<u64>>, p: u64) -> usize {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..cols {
        let Some(pr) = (rank..rows).find(|&r| m[r][col] != 0) else {
            continue;
        };
        m.swap(rank, pr);
        let inv = mod_pow(m[rank][col], p - 2, p);
        for r in 0..rows {
            if r != rank && m[r][col] != 0 {
                let f = mul_mod(m[r][col], inv, p);
                for c in col..cols {
                    let sub = mul_mod(f, m[rank][c], p);
                    m[r][c] = (m[r][c] + p - sub) % p;
                }
            }
        }
        rank += 1;
    }
    rank
}

fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn mod_pow(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, p);
        }
        base = mul_mod(base, base, p);
        exp >>= 1;
    }
    acc
}

/// Rank of `(A mod p)ᵏ` over `F_p`, which is the dimension of `G / pG`.
pub fn eventual_rank_mod(a: &Matrix, p: u64) -> usize {
    let k = a.rows();
    let reduce = |m: &Matrix| -> Vec<Vec<u64>> {
        m.row_iter()
            .map(|r| r.iter().map(|x| (x % p).to_u64().unwrap()).collect())
            .collect()
    };
    let base = reduce(a);
    let mut acc: Vec<Vec<u64>> = (0..k)
        .map(|i| (0..k).map(|j| u64::from(i == j)).collect())
        .collect();
    for _ in 0..k {
        let mut next = vec![vec![0u64; k]; k];
        for i in 0..k {
            for (l, bl) in base.iter().enumerate() {
                if acc[i][l] == 0 {
                    continue;
                }
                for j in 0..k {
                    next[i][j] = (next[i][j] + mul_mod(acc[i][l], bl[j], p)) % p;
                }
            }
        }
        acc = next;
    }
    rank_mod(acc, p)
}

/// Primitivity: `A^(k²−2k+2)` is strictly positive (Wielandt's bound).
pub fn is_primitive(a: &Matrix) -> bool {
    let k = a.rows();
    let exp = k * k + 2 - 2 * k;
    // a primitive matrix stays positive beyond the bound, so squaring suffices
    let mut acc = a.support();
    let mut reached = 1;
    while reached < exp {
        acc = acc.mul(&acc);
        reached *= 2;
    }
    acc.all()
}

const TRIAL_LIMIT: u64 = 1 << 20;

/// Prime factors (without multiplicity) by trial division; anything left
/// above the trial limit is returned separately.
pub fn factor(n: &BigUint) -> (Vec<u64>, Option<BigUint>) {
    let mut n = n.clone();
    let mut primes = Vec::new();
    if n.is_zero() {
        return (primes, None);
    }
    if let Some(small) = n.to_u64() {
        return (factor_u64(small), None);
    }
    let mut p = 2u64;
    while p < TRIAL_LIMIT {
        if (&n % p).is_zero() {
            primes.push(p);
            while (&n % p).is_zero() {
                n /= p;
            }
            if let Some(small) = n.to_u64() {
                for q in factor_u64(small) {
                    if !primes.contains(&q) {
                        primes.push(q);
                    }
                }
                return (primes, None);
            }
        }
        p += if p == 2 { 1 } else { 2 };
    }
    (primes, (!n.is_one()).then_some(n))
}

pub fn factor_u64(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p.saturating_mul(p) <= n {
        if n % p == 0 {
            out.push(p);
            while n % p == 0 {
                n /= p;
            }
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push(n);
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Distinction {
    EventualRank(usize, usize),
    Primitivity(bool, bool),
    /// Rank of `G / pG` differs at this prime.
    Determinant { prime: u64, left: usize, right: usize },
}

impl fmt::Display for Distinction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Distinction::EventualRank(a, b) => {
                write!(f, "dimension group ranks differ: {a} vs {b}")
            }
            Distinction::Primitivity(a, b) => {
                let word = |s: &bool| if *s { "primitive" } else { "not primitive" };
                write!(f, "simplicity differs: {} vs {}", word(a), word(b))
            }
            Distinction::Determinant { prime, left, right } => write!(
                f,
                "determinant prime profile differs at {prime}: G/{prime}G has rank {left} vs {right}"
            ),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Comparison {
    Distinguished(Distinction),
    /// Nothing separates the two; this is not a proof of isomorphism.
    Inconclusive,
}

pub fn compare_invariants(r1: &InvariantReport, r2: &InvariantReport) -> Comparison {
    if r1.eventual_rank != r2.eventual_rank {
        return Comparison::Distinguished(Distinction::EventualRank(
            r1.eventual_rank,
            r2.eventual_rank,
        ));
    }
    if r1.primitive != r2.primitive {
        return Comparison::Distinguished(Distinction::Primitivity(r1.primitive, r2.primitive));
    }
    let primes: std::collections::BTreeSet<u64> = r1
        .reduced_ranks
        .keys()
        .chain(r2.reduced_ranks.keys())
        .copied()
        .collect();
    for prime in primes {
        if let (Some(left), Some(right)) = (r1.reduced_rank(prime), r2.reduced_rank(prime)) {
            if left != right {
                return Comparison::Distinguished(Distinction::Determinant { prime, left, right });
            }
        }
    }
    Comparison::Inconclusive
}

/// Renders `det(xI − A)` as `x^2 - x - 1`.
pub fn format_poly(coeffs: &[BigInt]) -> String {
    let deg = coeffs.len().saturating_sub(1);
    let mut out = String::new();
    for (i, c) in coeffs.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let power = deg - i;
        let mag = c.abs();
        if out.is_empty() {
            if c.is_negative() {
                out.push('-');
            }
        } else {
            out.push_str(if c.is_negative() { " - " } else { " + " });
        }
        let var = match power {
            0 => String::new(),
            1 => "x".to_string(),
            p => format!("x^{p}"),
        };
        if mag.is_one() && power > 0 {
            out.push_str(&var);
        } else {
            out.push_str(&mag.to_string());
            out.push_str(&var);
        }
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}
