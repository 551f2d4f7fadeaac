//! Bounded search for intertwinings between two diagrams, an exact witness
//! checker, and supernatural-number invariants of UHF-type diagrams.
//!
//! A witness is a zig-zag `A₀ → B₀ → A_{a₁} → B_{b₁} → …` of non-negative
//! integer maps starting with `[1]` between the roots, such that each pair of
//! consecutive maps composes to the telescoped matrix of the diagram it
//! starts and ends in. For prefix-only diagrams the zig-zag must finish on the
//! last level of both. For stationary diagrams it must close up: some map in
//! the tail recurs, after which the segment between the two occurrences
//! repeats forever.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

use crate::diagram::BratteliDiagram;
use crate::dimension_group::factor;
use crate::matrix::Matrix;

/// Search nodes explored before giving up.
pub const DEFAULT_NODE_BUDGET: usize = 200_000;
/// Solutions kept per row of a candidate map.
const ROW_SOLUTION_CAP: usize = 4_096;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EquivalenceError {
    #[error("search bound must be at least 1")]
    BoundTooSmall,
    #[error("one diagram is stationary and the other is a finite prefix")]
    MixedTails,
    #[error("witness step {step} has inconsistent shape or levels")]
    ShapeMismatch { step: usize },
    #[error("diagram is not of UHF shape: level {level} has {size} vertices")]
    NotUhfShape { level: usize, size: usize },
    #[error("matrix entry {0} is too large to factor")]
    FactorOverflow(BigUint),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    A,
    B,
}

impl Side {
    fn other(self) -> Side {
        match self {
            Side::A => Side::B,
            Side::B => Side::A,
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::A => "A",
            Side::B => "B",
        })
    }
}

/// One map of the zig-zag, from `from` at `from_level` to the other diagram
/// at `to_level`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WitnessStep {
    pub from: Side,
    pub from_level: usize,
    pub to_level: usize,
    pub matrix: Matrix,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntertwiningWitness {
    pub steps: Vec<WitnessStep>,
    /// For stationary pairs: index of the earlier step equal to the last one.
    pub period_start: Option<usize>,
}

impl fmt::Display for IntertwiningWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, s) in self.steps.iter().enumerate() {
            writeln!(
                f,
                "{}{} -> {}{}: {}",
                s.from,
                s.from_level,
                s.from.other(),
                s.to_level,
                s.matrix
            )?;
            if Some(i) == self.period_start {
                writeln!(f, "  (period starts here)")?;
            }
        }
        if let Some(j) = self.period_start {
            write!(f, "steps {}..={} repeat", j + 1, self.steps.len() - 1)?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SearchOutcome {
    Found(IntertwiningWitness),
    /// Not a proof of inequivalence.
    NotFoundWithinBound,
}

struct Pair<'a> {
    a: &'a BratteliDiagram,
    b: &'a BratteliDiagram,
}

impl<'a> Pair<'a> {
    fn get(&self, side: Side) -> &'a BratteliDiagram {
        match side {
            Side::A => self.a,
            Side::B => self.b,
        }
    }
}

fn check_kinds(d1: &BratteliDiagram, d2: &BratteliDiagram) -> Result<(), EquivalenceError> {
    if d1.is_stationary() != d2.is_stationary() {
        Err(EquivalenceError::MixedTails)
    } else {
        Ok(())
    }
}

fn in_tail(d: &BratteliDiagram, level: usize) -> bool {
    d.tail_start().is_some_and(|t| level >= t)
}

/// Index of an earlier step that the last step repeats inside both tails.
fn closing_step(pair: &Pair, steps: &[WitnessStep]) -> Option<usize> {
    let n = steps.len().checked_sub(1)?;
    (0..n).rev().find(|&j| closing_step_at(pair, steps, j))
}

fn is_complete(pair: &Pair, steps: &[WitnessStep]) -> Option<Option<usize>> {
    let last = steps.last()?;
    if pair.a.is_stationary() {
        closing_step(pair, steps).map(Some)
    } else {
        let from = pair.get(last.from);
        let to = pair.get(last.from.other());
        (last.from_level == from.last_level() && last.to_level == to.last_level()).then_some(None)
    }
}

/// Checks every composition equation of the witness exactly.
pub fn verify_intertwining(
    d1: &BratteliDiagram,
    d2: &BratteliDiagram,
    witness: &IntertwiningWitness,
) -> Result<bool, EquivalenceError> {
    check_kinds(d1, d2)?;
    let pair = Pair { a: d1, b: d2 };
    let steps = &witness.steps;
    for (i, s) in steps.iter().enumerate() {
        let from = pair.get(s.from);
        let to = pair.get(s.from.other());
        let (Ok(rows), Ok(cols)) = (to.level_size(s.to_level), from.level_size(s.from_level)) else {
            return Err(EquivalenceError::ShapeMismatch { step: i });
        };
        if s.matrix.shape() != (rows, cols) {
            return Err(EquivalenceError::ShapeMismatch { step: i });
        }
        if i > 0 {
            let prev = &steps[i - 1];
            if prev.from != s.from.other() || prev.to_level != s.from_level {
                return Err(EquivalenceError::ShapeMismatch { step: i });
            }
        }
    }
    let Some(first) = steps.first() else {
        return Ok(false);
    };
    if first.from != Side::A
        || first.from_level != 0
        || first.to_level != 0
        || first.matrix != Matrix::identity(1)
    {
        return Ok(false);
    }
    for w in steps.windows(2) {
        let (prev, next) = (&w[0], &w[1]);
        // the zig-zag must move strictly down on each side
        if next.to_level <= prev.from_level {
            return Ok(false);
        }
        let target = pair
            .get(prev.from)
            .compose(prev.from_level, next.to_level)
            .map_err(|_| EquivalenceError::ShapeMismatch { step: 0 })?;
        if next.matrix.mul(&prev.matrix) != target {
            return Ok(false);
        }
    }
    match (pair.a.is_stationary(), witness.period_start) {
        (true, Some(j)) => {
            let n = steps.len() - 1;
            if j >= n {
                return Ok(false);
            }
            Ok(closing_step_at(&pair, steps, j))
        }
        (true, None) => Ok(false),
        (false, Some(_)) => Ok(false),
        (false, None) => Ok(is_complete(&pair, steps).is_some()),
    }
}

fn closing_step_at(pair: &Pair, steps: &[WitnessStep], j: usize) -> bool {
    let n = steps.len() - 1;
    let (s, last) = (&steps[j], &steps[n]);
    (n - j) % 2 == 0
        && s.from == last.from
        && s.matrix == last.matrix
        && in_tail(pair.get(s.from), s.from_level)
        && in_tail(pair.get(s.from.other()), s.to_level)
}

/// All non-negative integer rows `x` with `x · c = target` and
/// `x · dims = dim_target`, in lexicographic order.
fn row_solutions(c: &Matrix, target: &[BigUint], dims: &[BigUint], dim_target: &BigUint) -> Vec<Vec<BigUint>> {
    let n = c.rows();
    let mut out = Vec::new();
    let mut x = vec![BigUint::zero(); n];
    let mut remaining = target.to_vec();
    let mut dim_left = dim_target.clone();
    fill_row(c, dims, 0, &mut x, &mut remaining, &mut dim_left, &mut out);
    out
}

fn fill_row(
    c: &Matrix,
    dims: &[BigUint],
    idx: usize,
    x: &mut Vec<BigUint>,
    remaining: &mut Vec<BigUint>,
    dim_left: &mut BigUint,
    out: &mut Vec<Vec<BigUint>>,
) {
    if out.len() >= ROW_SOLUTION_CAP {
        return;
    }
    if idx == c.rows() {
        if dim_left.is_zero() && remaining.iter().all(Zero::is_zero) {
            out.push(x.clone());
        }
        return;
    }
    // largest value allowed by every equation this coordinate appears in
    let mut ub = dim_left.div_floor(&dims[idx]);
    for (col, r) in remaining.iter().enumerate() {
        let coef = c.get(idx, col);
        if !coef.is_zero() {
            ub = ub.min(r.div_floor(coef));
        }
    }
    let ub = ub.to_u64().unwrap_or(u64::MAX);
    let row: Vec<BigUint> = c.row(idx).to_vec();
    let mut v = 0u64;
    loop {
        let big_v = BigUint::from(v);
        for (col, coef) in row.iter().enumerate() {
            remaining[col] -= coef * &big_v;
        }
        *dim_left -= &dims[idx] * &big_v;
        x[idx] = big_v.clone();
        fill_row(c, dims, idx + 1, x, remaining, dim_left, out);
        for (col, coef) in row.iter().enumerate() {
            remaining[col] += coef * &big_v;
        }
        *dim_left += &dims[idx] * &big_v;
        if v == ub || out.len() >= ROW_SOLUTION_CAP {
            break;
        }
        v += 1;
    }
    x[idx] = BigUint::zero();
}

struct Search<'a> {
    pair: Pair<'a>,
    bound: usize,
    budget: usize,
    nodes: usize,
}

impl Search<'_> {
    fn reach(&self, side: Side) -> usize {
        let d = self.pair.get(side);
        if d.is_stationary() {
            d.last_level() + 2 * self.bound + 1
        } else {
            d.last_level()
        }
    }

    fn extend(&mut self, steps: &mut Vec<WitnessStep>) -> Option<IntertwiningWitness> {
        if let Some(period_start) = is_complete(&self.pair, steps) {
            return Some(IntertwiningWitness {
                steps: steps.clone(),
                period_start,
            });
        }
        self.nodes += 1;
        if self.nodes > self.budget {
            return None;
        }
        let last = steps.last().unwrap().clone();
        // the new map leaves the diagram `last` landed in
        let from = last.from.other();
        let to = last.from;
        let from_d = self.pair.get(from);
        let to_d = self.pair.get(to);
        let from_dims = from_d.dims(last.to_level).ok()?.values;
        let prev_dims_level = last.from_level;
        for advance in (1..=self.bound).rev() {
            let to_level = prev_dims_level + advance;
            if to_level > self.reach(to) {
                continue;
            }
            let target = to_d.compose(prev_dims_level, to_level).ok()?;
            let to_dims = to_d.dims(to_level).ok()?.values;
            let mut per_row = Vec::with_capacity(target.rows());
            let mut feasible = true;
            for r in 0..target.rows() {
                let sols = row_solutions(&last.matrix, target.row(r), &from_dims, &to_dims[r]);
                if sols.is_empty() {
                    feasible = false;
                    break;
                }
                per_row.push(sols);
            }
            if !feasible {
                continue;
            }
            let mut choice = vec![0usize; per_row.len()];
            loop {
                let mut m = Matrix::zeros(per_row.len(), last.matrix.rows());
                for (r, &ci) in choice.iter().enumerate() {
                    for (c, v) in per_row[r][ci].iter().enumerate() {
                        m.set(r, c, v.clone());
                    }
                }
                steps.push(WitnessStep {
                    from,
                    from_level: last.to_level,
                    to_level,
                    matrix: m,
                });
                if let Some(w) = self.extend(steps) {
                    return Some(w);
                }
                steps.pop();
                if self.nodes > self.budget || !advance_choice(&mut choice, &per_row) {
                    break;
                }
            }
            if self.nodes > self.budget {
                return None;
            }
        }
        None
    }
}

/// Lexicographic successor over the per-row solution lists, last row fastest.
fn advance_choice(choice: &mut [usize], per_row: &[Vec<Vec<BigUint>>]) -> bool {
    for r in (0..choice.len()).rev() {
        if choice[r] + 1 < per_row[r].len() {
            choice[r] += 1;
            for c in choice.iter_mut().skip(r + 1) {
                *c = 0;
            }
            return true;
        }
    }
    false
}

/// Depth-first search over zig-zags: each step moves between 1 and `bound`
/// levels down, stationary tails are unrolled at most `2·bound + 1` levels
/// past the prefix, and candidate maps must carry dimension vectors exactly.
/// Longer steps are tried first; maps at each step are tried in
/// lexicographic order, so the result is deterministic.
pub fn find_intertwining(
    d1: &BratteliDiagram,
    d2: &BratteliDiagram,
    search_bound: usize,
) -> Result<SearchOutcome, EquivalenceError> {
    find_intertwining_with_budget(d1, d2, search_bound, DEFAULT_NODE_BUDGET)
}

pub fn find_intertwining_with_budget(
    d1: &BratteliDiagram,
    d2: &BratteliDiagram,
    search_bound: usize,
    node_budget: usize,
) -> Result<SearchOutcome, EquivalenceError> {
    if search_bound < 1 {
        return Err(EquivalenceError::BoundTooSmall);
    }
    check_kinds(d1, d2)?;
    let mut search = Search {
        pair: Pair { a: d1, b: d2 },
        bound: search_bound,
        budget: node_budget,
        nodes: 0,
    };
    let mut steps = vec![WitnessStep {
        from: Side::A,
        from_level: 0,
        to_level: 0,
        matrix: Matrix::identity(1),
    }];
    Ok(match search.extend(&mut steps) {
        Some(w) => SearchOutcome::Found(w),
        None => SearchOutcome::NotFoundWithinBound,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Exponent {
    Finite(u64),
    Infinite,
}

/// Prime-exponent profile of a UHF-type diagram.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SupernaturalInvariant {
    pub exponents: BTreeMap<u64, Exponent>,
    /// Set for prefix-only diagrams, whose continuation could add more.
    pub lower_bound: bool,
}

impl fmt::Display for SupernaturalInvariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.lower_bound {
            f.write_str(">=")?;
        }
        f.write_str("{")?;
        for (i, (p, e)) in self.exponents.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            match e {
                Exponent::Finite(n) => write!(f, "{p}:{n}")?,
                Exponent::Infinite => write!(f, "{p}:∞")?,
            }
        }
        f.write_str("}")
    }
}

fn prime_exponents(n: &BigUint) -> Result<Vec<(u64, u64)>, EquivalenceError> {
    let (primes, rest) = factor(n);
    if rest.is_some() {
        return Err(EquivalenceError::FactorOverflow(n.clone()));
    }
    Ok(primes
        .into_iter()
        .map(|p| {
            let mut m = n.clone();
            let mut e = 0;
            while (&m % p).is_zero() {
                m /= p;
                e += 1;
            }
            (p, e)
        })
        .collect())
}

pub fn supernatural_invariant(d: &BratteliDiagram) -> Result<SupernaturalInvariant, EquivalenceError> {
    if let Some(level) = d.level_sizes().iter().position(|&k| k != 1) {
        return Err(EquivalenceError::NotUhfShape {
            level,
            size: d.level_sizes()[level],
        });
    }
    let mut exponents = BTreeMap::new();
    let finite_steps = if d.is_stationary() {
        d.matrices().len() - 1
    } else {
        d.matrices().len()
    };
    for m in &d.matrices()[..finite_steps] {
        for (p, e) in prime_exponents(m.get(0, 0))? {
            let slot = exponents.entry(p).or_insert(Exponent::Finite(0));
            if let Exponent::Finite(old) = slot {
                *slot = Exponent::Finite(*old + e);
            }
        }
    }
    if let Some(tail) = d.tail_matrix() {
        let f = tail.get(0, 0);
        if !f.is_one() {
            for (p, _) in prime_exponents(f)? {
                exponents.insert(p, Exponent::Infinite);
            }
        }
    }
    Ok(SupernaturalInvariant {
        exponents,
        lower_bound: !d.is_stationary(),
    })
}
