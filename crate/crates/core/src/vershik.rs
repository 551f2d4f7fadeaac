//! Ordered Bratteli diagrams and the Vershik (adic) successor on finite paths.
//!
//! An edge into vertex `j` at level `n` is identified by its source vertex at
//! level `n − 1` and a 1-based copy index among the parallel edges. Each
//! vertex carries a total order on its incoming edges.
//!
//! The successor of a depth-`n` path increments the first non-maximal edge and
//! replaces everything above it by the minimal path into the new source. The
//! endpoint at level `n` never changes, so the paths ending at vertex `v` form
//! a single tower. The all-maximal path into `v` wraps to the all-minimal path
//! into `v`, which turns each tower into a cycle of length `dims(n)[v]`.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

use crate::diagram::BratteliDiagram;
use crate::dimension_group::{char_poly, is_primitive};
use crate::error::DiagramError;
use crate::perron::{perron_bracket, perron_vector_f64, row_sum_bounds};
use crate::quadratic::Quadratic;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VershikError {
    #[error(transparent)]
    Diagram(#[from] DiagramError),
    #[error("invalid order for vertex {vertex} at level {level}: {reason}")]
    InvalidOrder {
        level: usize,
        vertex: usize,
        reason: String,
    },
    #[error("invalid path: {0}")]
    InvalidPath(String),
    #[error("diagram has no stationary tail")]
    NotStationary,
    #[error("stationary tail matrix is not primitive")]
    NotPrimitive,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge {
    pub source: usize,
    /// 1-based index among the parallel edges from `source`.
    pub copy: u32,
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.source, self.copy)
    }
}

impl FromStr for Edge {
    type Err = VershikError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || VershikError::InvalidPath(format!("bad edge token {s:?}"));
        let (src, copy) = s.split_once('.').ok_or_else(bad)?;
        Ok(Edge {
            source: src.trim().parse().map_err(|_| bad())?,
            copy: copy.trim().parse().map_err(|_| bad())?,
        })
    }
}

/// Incoming-edge orders, `orders[n][j]` for vertex `j` at level `n ≥ 1`.
pub type EdgeOrders = Vec<Vec<Vec<Edge>>>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrderedBratteliDiagram {
    diagram: BratteliDiagram,
    orders: EdgeOrders,
}

/// A finite path from the root: `edges[m − 1]` joins level `m − 1` to level
/// `m`, and the path ends at vertex `end` of level `edges.len()`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PathWord {
    pub edges: Vec<Edge>,
    pub end: usize,
}

impl PathWord {
    pub fn depth(&self) -> usize {
        self.edges.len()
    }

    /// Target vertex of the edge at 1-based position `m`.
    pub fn target(&self, m: usize) -> usize {
        if m == self.edges.len() {
            self.end
        } else {
            self.edges[m].source
        }
    }
}

impl fmt::Display for PathWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.edges.iter().map(ToString::to_string).collect();
        write!(f, "{}@{}", parts.join(","), self.end)
    }
}

impl FromStr for PathWord {
    type Err = VershikError;

    /// `i.t,i.t,...[@end]`; the end vertex defaults to 0.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (edges, end) = match s.split_once('@') {
            Some((e, v)) => (
                e,
                v.trim()
                    .parse()
                    .map_err(|_| VershikError::InvalidPath(format!("bad end vertex {v:?}")))?,
            ),
            None => (s, 0),
        };
        let edges = edges
            .split(',')
            .filter(|t| !t.trim().is_empty())
            .map(str::parse)
            .collect::<Result<Vec<Edge>, _>>()?;
        Ok(PathWord { edges, end })
    }
}

fn incoming(d: &BratteliDiagram, level: usize, vertex: usize) -> Result<Vec<Edge>, DiagramError> {
    let m = d.step_matrix(level - 1)?;
    let mut out = Vec::new();
    for (source, mult) in m.row(vertex).iter().enumerate() {
        let mult = mult.to_u32().expect("edge multiplicity fits in u32");
        out.extend((1..=mult).map(|copy| Edge { source, copy }));
    }
    Ok(out)
}

impl OrderedBratteliDiagram {
    /// Lexicographic order on `(source, copy)` everywhere.
    pub fn default_order(diagram: &BratteliDiagram) -> Self {
        let orders = (0..diagram.prefix_len())
            .map(|n| {
                if n == 0 {
                    Vec::new()
                } else {
                    (0..diagram.level_sizes()[n])
                        .map(|j| incoming(diagram, n, j).expect("stored level"))
                        .collect()
                }
            })
            .collect();
        OrderedBratteliDiagram {
            diagram: diagram.clone(),
            orders,
        }
    }

    /// Checks that each order is a permutation of the vertex's incoming edges.
    /// For a stationary diagram the order at the last stored level repeats.
    pub fn new(diagram: BratteliDiagram, orders: EdgeOrders) -> Result<Self, VershikError> {
        if orders.len() != diagram.prefix_len() {
            return Err(VershikError::InvalidOrder {
                level: orders.len(),
                vertex: 0,
                reason: format!("expected orders for {} levels", diagram.prefix_len()),
            });
        }
        for (n, level_orders) in orders.iter().enumerate().skip(1) {
            if level_orders.len() != diagram.level_sizes()[n] {
                return Err(VershikError::InvalidOrder {
                    level: n,
                    vertex: level_orders.len(),
                    reason: "wrong number of vertices".into(),
                });
            }
            for (j, order) in level_orders.iter().enumerate() {
                let mut expected = incoming(&diagram, n, j)?;
                let mut given = order.clone();
                expected.sort();
                given.sort();
                if expected != given {
                    return Err(VershikError::InvalidOrder {
                        level: n,
                        vertex: j,
                        reason: "not a permutation of the incoming edges".into(),
                    });
                }
            }
        }
        Ok(OrderedBratteliDiagram { diagram, orders })
    }

    pub fn diagram(&self) -> &BratteliDiagram {
        &self.diagram
    }

    pub fn orders(&self) -> &EdgeOrders {
        &self.orders
    }

    /// Replaces the order at one stored level and vertex.
    pub fn with_order(
        mut self,
        level: usize,
        vertex: usize,
        order: Vec<Edge>,
    ) -> Result<Self, VershikError> {
        if level == 0 || level >= self.orders.len() || vertex >= self.orders[level].len() {
            return Err(VershikError::InvalidOrder {
                level,
                vertex,
                reason: "no such stored vertex".into(),
            });
        }
        self.orders[level][vertex] = order;
        OrderedBratteliDiagram::new(self.diagram, self.orders)
    }

    pub fn is_default(&self) -> bool {
        *self == OrderedBratteliDiagram::default_order(&self.diagram)
    }

    /// Order on the incoming edges of `vertex` at `level ≥ 1`.
    pub fn order(&self, level: usize, vertex: usize) -> Result<&[Edge], VershikError> {
        self.diagram.level_size(level)?;
        let idx = level.min(self.orders.len() - 1);
        self.orders[idx]
            .get(vertex)
            .map(Vec::as_slice)
            .ok_or_else(|| VershikError::InvalidPath(format!("no vertex {vertex} at level {level}")))
    }

    fn minimal_edge(&self, level: usize, vertex: usize) -> Result<Edge, VershikError> {
        Ok(self.order(level, vertex)?[0])
    }

    fn maximal_edge(&self, level: usize, vertex: usize) -> Result<Edge, VershikError> {
        Ok(*self.order(level, vertex)?.last().unwrap())
    }

    fn extremal_path_to(
        &self,
        level: usize,
        vertex: usize,
        maximal: bool,
    ) -> Result<PathWord, VershikError> {
        let k = self.diagram.level_size(level)?;
        if vertex >= k {
            return Err(VershikError::InvalidPath(format!(
                "no vertex {vertex} at level {level}"
            )));
        }
        let mut edges = vec![Edge { source: 0, copy: 1 }; level];
        let mut v = vertex;
        for m in (1..=level).rev() {
            let e = if maximal {
                self.maximal_edge(m, v)?
            } else {
                self.minimal_edge(m, v)?
            };
            edges[m - 1] = e;
            v = e.source;
        }
        Ok(PathWord { edges, end: vertex })
    }

    /// All-minimal path into `vertex` at `level`.
    pub fn min_path_to(&self, level: usize, vertex: usize) -> Result<PathWord, VershikError> {
        self.extremal_path_to(level, vertex, false)
    }

    pub fn max_path_to(&self, level: usize, vertex: usize) -> Result<PathWord, VershikError> {
        self.extremal_path_to(level, vertex, true)
    }

    /// All-minimal path of the given depth ending at the smallest vertex.
    pub fn min_path(&self, depth: usize) -> Result<PathWord, VershikError> {
        self.min_path_to(depth, 0)
    }

    pub fn max_path(&self, depth: usize) -> Result<PathWord, VershikError> {
        self.max_path_to(depth, 0)
    }

    pub fn check_path(&self, path: &PathWord) -> Result<(), VershikError> {
        let n = path.depth();
        let k = self.diagram.level_size(n)?;
        if path.end >= k {
            return Err(VershikError::InvalidPath(format!(
                "end vertex {} out of range at level {n}",
                path.end
            )));
        }
        if let Some(first) = path.edges.first() {
            if first.source != 0 {
                return Err(VershikError::InvalidPath("path must start at the root".into()));
            }
        }
        for m in 1..=n {
            let e = path.edges[m - 1];
            let target = path.target(m);
            let mult = self
                .diagram
                .step_matrix(m - 1)?
                .row(target)
                .get(e.source)
                .cloned()
                .ok_or_else(|| VershikError::InvalidPath(format!("edge {e} at position {m}")))?;
            if e.copy == 0 || BigUint::from(e.copy) > mult {
                return Err(VershikError::InvalidPath(format!(
                    "edge {e} does not exist into vertex {target} at level {m}"
                )));
            }
        }
        Ok(())
    }

    /// Vershik successor with the per-tower wrap convention.
    pub fn successor(&self, path: &PathWord) -> Result<PathWord, VershikError> {
        self.check_path(path)?;
        for m in 1..=path.depth() {
            let target = path.target(m);
            let order = self.order(m, target)?;
            let pos = order
                .iter()
                .position(|e| *e == path.edges[m - 1])
                .expect("checked path edge is in its order");
            if pos + 1 < order.len() {
                let next = order[pos + 1];
                let mut edges = self.min_path_to(m - 1, next.source)?.edges;
                edges.push(next);
                edges.extend_from_slice(&path.edges[m..]);
                return Ok(PathWord {
                    edges,
                    end: path.end,
                });
            }
        }
        self.min_path_to(path.depth(), path.end)
    }

    /// `[start, T(start), …, T^steps(start)]`.
    pub fn orbit(&self, start: &PathWord, steps: usize) -> Result<Vec<PathWord>, VershikError> {
        let mut out = Vec::with_capacity(steps + 1);
        out.push(start.clone());
        for _ in 0..steps {
            let next = self.successor(out.last().unwrap())?;
            out.push(next);
        }
        Ok(out)
    }

    /// Every path of the given depth, grouped by end vertex.
    pub fn paths(&self, depth: usize) -> Result<Vec<PathWord>, VershikError> {
        let k = self.diagram.level_size(depth)?;
        let mut out = Vec::new();
        for v in 0..k {
            let start = self.min_path_to(depth, v)?;
            let mut p = start.clone();
            loop {
                out.push(p.clone());
                p = self.successor(&p)?;
                if p == start {
                    break;
                }
            }
        }
        Ok(out)
    }

    /// Functional graph `vertex ↦ source of its maximal (or minimal) incoming
    /// edge` at the tail order.
    fn tail_map(&self, maximal: bool) -> Option<Vec<usize>> {
        let t = self.diagram.tail_start()?;
        let level = t + 1;
        let k = self.diagram.level_size(level).ok()?;
        (0..k)
            .map(|j| {
                let e = if maximal {
                    self.maximal_edge(level, j)
                } else {
                    self.minimal_edge(level, j)
                };
                e.ok().map(|e| e.source)
            })
            .collect()
    }

    /// Proper ordering for stationary diagrams: the tail maps sending each
    /// vertex to the source of its maximal (resp. minimal) edge must each
    /// have a single cycle, and that cycle must be a fixed point, so there is
    /// exactly one infinite maximal path and one infinite minimal path.
    pub fn proper_ordering_check(&self) -> ProperOrdering {
        let (Some(fmax), Some(fmin)) = (self.tail_map(true), self.tail_map(false)) else {
            return ProperOrdering::UnknownAtBound;
        };
        for (extremal, f) in [(Extremal::Max, fmax), (Extremal::Min, fmin)] {
            let cycles = functional_cycles(&f);
            if cycles.len() != 1 || cycles[0].len() != 1 {
                return ProperOrdering::NotProperlyOrdered(OrderingWitness { extremal, cycles });
            }
        }
        ProperOrdering::ProperlyOrdered
    }
}

/// Cycles of a self-map on `0..n`, each rotated to start at its smallest
/// element, sorted.
pub fn functional_cycles(f: &[usize]) -> Vec<Vec<usize>> {
    let mut cycles = Vec::new();
    let mut seen = HashSet::new();
    for start in 0..f.len() {
        let mut x = start;
        let mut path = Vec::new();
        let mut on_path = HashSet::new();
        while !seen.contains(&x) && on_path.insert(x) {
            path.push(x);
            x = f[x];
        }
        if let Some(pos) = path.iter().position(|&y| y == x) {
            let mut cyc = path[pos..].to_vec();
            let min_pos = cyc.iter().enumerate().min_by_key(|(_, v)| **v).unwrap().0;
            cyc.rotate_left(min_pos);
            cycles.push(cyc);
        }
        seen.extend(path);
    }
    cycles.sort();
    cycles
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Extremal {
    Max,
    Min,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrderingWitness {
    pub extremal: Extremal,
    pub cycles: Vec<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ProperOrdering {
    ProperlyOrdered,
    NotProperlyOrdered(OrderingWitness),
    UnknownAtBound,
}

/// Cylinder mass, exact when the Perron eigenvalue has degree at most two.
#[derive(Clone, Debug, PartialEq)]
pub struct CylinderMeasure {
    pub exact: Option<Quadratic>,
    pub value: f64,
}

/// Perron data of a primitive stationary tail, enough to evaluate the unique
/// invariant measure of every tail cylinder.
#[derive(Clone, Debug)]
pub struct StationaryMeasure {
    tail_start: usize,
    exact: Option<ExactPerron>,
    lambda: f64,
    /// Left Perron vector, scaled so that level-`tail_start` masses sum to 1.
    weights: Vec<f64>,
}

#[derive(Clone, Debug)]
struct ExactPerron {
    lambda: Quadratic,
    weights: Vec<Quadratic>,
}

/// Tolerance used for the floating-point fallback.
pub const MEASURE_TOLERANCE: f64 = 1e-12;

impl StationaryMeasure {
    pub fn new(d: &BratteliDiagram) -> Result<Self, VershikError> {
        let a = d.tail_matrix().ok_or(VershikError::NotStationary)?;
        if !is_primitive(a) {
            return Err(VershikError::NotPrimitive);
        }
        let t = d.tail_start().unwrap();
        let unit = d.dims(t)?.values;
        let lambda = perron_bracket(a, MEASURE_TOLERANCE).value();
        let exact = exact_perron(a, lambda).map(|(lam, y)| {
            let unit_q: Vec<Quadratic> = unit.iter().map(big_to_quadratic).collect();
            let mass = y
                .iter()
                .zip(&unit_q)
                .fold(Quadratic::from_int(0), |acc, (yi, di)| &acc + &(yi * di));
            let weights = y.iter().map(|yi| yi / &mass).collect();
            ExactPerron {
                lambda: lam,
                weights,
            }
        });
        let weights = match &exact {
            Some(e) => e.weights.iter().map(Quadratic::to_f64).collect(),
            None => {
                let y = perron_vector_f64(&a.transpose(), MEASURE_TOLERANCE);
                let mass: f64 = y
                    .iter()
                    .zip(&unit)
                    .map(|(yi, di)| yi * di.to_f64().unwrap_or(f64::INFINITY))
                    .sum();
                y.iter().map(|yi| yi / mass).collect()
            }
        };
        Ok(StationaryMeasure {
            tail_start: t,
            exact,
            lambda,
            weights,
        })
    }

    pub fn is_exact(&self) -> bool {
        self.exact.is_some()
    }

    pub fn tail_start(&self) -> usize {
        self.tail_start
    }

    /// Mass of any cylinder ending at `vertex` of tail level `level`.
    pub fn cylinder(&self, level: usize, vertex: usize) -> Result<CylinderMeasure, VershikError> {
        if level < self.tail_start {
            return Err(VershikError::Diagram(DiagramError::LevelOutOfRange {
                level,
                last: self.tail_start,
            }));
        }
        let w = *self.weights.get(vertex).ok_or_else(|| {
            VershikError::InvalidPath(format!("no vertex {vertex} at level {level}"))
        })?;
        let steps = (level - self.tail_start) as i32;
        let value = w / self.lambda.powi(steps);
        let exact = self.exact.as_ref().map(|e| {
            let scale = e.lambda.pow(-(steps as i64));
            &e.weights[vertex] * &scale
        });
        let value = exact.as_ref().map_or(value, Quadratic::to_f64);
        Ok(CylinderMeasure { exact, value })
    }
}

/// Measure of the cylinder set of a finite path ending at a tail level.
pub fn stationary_measure(
    d: &BratteliDiagram,
    path: &PathWord,
) -> Result<CylinderMeasure, VershikError> {
    OrderedBratteliDiagram::default_order(d).check_path(path)?;
    StationaryMeasure::new(d)?.cylinder(path.depth(), path.end)
}

fn big_to_quadratic(x: &BigUint) -> Quadratic {
    Quadratic::rational(BigRational::from_integer(BigInt::from(x.clone())))
}

fn poly_eval(coeffs: &[BigInt], x: &BigInt) -> BigInt {
    coeffs.iter().fold(BigInt::zero(), |acc, c| acc * x + c)
}

/// Remainder of a monic-divisor division over the integers.
fn poly_rem_monic(coeffs: &[BigInt], divisor: &[BigInt]) -> Vec<BigInt> {
    let mut r = coeffs.to_vec();
    let dl = divisor.len();
    while r.len() >= dl {
        let lead = r[0].clone();
        for (i, d) in divisor.iter().enumerate() {
            r[i] -= &lead * d;
        }
        r.remove(0);
    }
    r
}

fn squarefree_split(n: u64) -> (u64, u64) {
    // n = outer² · inner with inner squarefree
    let mut outer = 1;
    let mut inner = n;
    let mut p = 2u64;
    while p * p <= inner {
        while inner % (p * p) == 0 {
            inner /= p * p;
            outer *= p;
        }
        p += 1;
    }
    (outer, inner)
}

/// Exact Perron eigenvalue and positive left eigenvector when the eigenvalue
/// is rational or a real quadratic irrational.
fn exact_perron(a: &crate::matrix::Matrix, lambda: f64) -> Option<(Quadratic, Vec<Quadratic>)> {
    let cp = char_poly(a);
    let lam = exact_eigenvalue(&cp, a, lambda)?;
    let y = left_null_vector(a, &lam)?;
    Some((lam, y))
}

fn exact_eigenvalue(cp: &[BigInt], a: &crate::matrix::Matrix, lambda: f64) -> Option<Quadratic> {
    let r = BigInt::from(lambda.round() as i64);
    if poly_eval(cp, &r).is_zero() {
        return Some(Quadratic::rational(BigRational::from_integer(r)));
    }
    let bound = row_sum_bounds(a).1.to_f64()?;
    let lo = (lambda - bound).floor() as i64;
    let hi = (lambda + bound).ceil() as i64;
    for s in lo..=hi {
        let qf = lambda * (s as f64 - lambda);
        let q = qf.round();
        if (qf - q).abs() > 1e-6 {
            continue;
        }
        let (s_big, q_big) = (BigInt::from(s), BigInt::from(q as i64));
        let divisor = [BigInt::one(), -s_big.clone(), q_big.clone()];
        if !poly_rem_monic(cp, &divisor).iter().all(Zero::is_zero) {
            continue;
        }
        let disc = &s_big * &s_big - BigInt::from(4) * &q_big;
        let disc = disc.to_u64().filter(|&d| d > 0)?;
        let (outer, inner) = squarefree_split(disc);
        if inner == 1 {
            continue;
        }
        let candidate = Quadratic::new(
            BigRational::new(s_big, BigInt::from(2)),
            BigRational::new(BigInt::from(outer), BigInt::from(2)),
            BigInt::from(inner),
        );
        if (candidate.to_f64() - lambda).abs() < 1e-9 * lambda.max(1.0) {
            return Some(candidate);
        }
    }
    None
}

/// Positive solution of `yᵀ A = λ yᵀ` by elimination in `Q(√d)`.
fn left_null_vector(a: &crate::matrix::Matrix, lambda: &Quadratic) -> Option<Vec<Quadratic>> {
    let k = a.rows();
    // rows of (Aᵀ − λI)
    let mut m: Vec<Vec<Quadratic>> = (0..k)
        .map(|i| {
            (0..k)
                .map(|j| {
                    let x = big_to_quadratic(a.get(j, i));
                    if i == j {
                        &x - lambda
                    } else {
                        x
                    }
                })
                .collect()
        })
        .collect();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..k {
        let Some(p) = (row..k).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(row, p);
        let inv = m[row][col].recip();
        for c in 0..k {
            m[row][c] = &m[row][c] * &inv;
        }
        for r in 0..k {
            if r != row && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                for c in 0..k {
                    let sub = &f * &m[row][c];
                    m[r][c] = &m[r][c] - &sub;
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    let free: Vec<usize> = (0..k).filter(|c| !pivots.contains(c)).collect();
    if free.len() != 1 {
        return None;
    }
    let f = free[0];
    let mut y = vec![Quadratic::from_int(0); k];
    y[f] = Quadratic::from_int(1);
    for (r, &pc) in pivots.iter().enumerate() {
        y[pc] = -&m[r][f];
    }
    if y.iter().any(|v| v.signum() == std::cmp::Ordering::Less) {
        y = y.iter().map(|v| -v).collect();
    }
    y.iter()
        .all(|v| v.signum() == std::cmp::Ordering::Greater)
        .then_some(y)
}
