//! Bratteli diagrams as a finite prefix of multiplicity matrices with an
//! optional stationary tail.

use std::fmt;

use num_bigint::BigUint;
use num_traits::One;

use crate::error::DiagramError;
use crate::matrix::Matrix;

/// A validated Bratteli diagram.
///
/// Level 0 is always a single vertex of dimension 1. `matrices[n]` has
/// `level_sizes[n + 1]` rows and `level_sizes[n]` columns. When the diagram
/// has a stationary tail, the last matrix repeats forever.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BratteliDiagram {
    level_sizes: Vec<usize>,
    matrices: Vec<Matrix>,
    stationary_tail: bool,
}

/// Exact dimensions of the summands at one level.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DimensionVector {
    pub level: usize,
    pub values: Vec<BigUint>,
}

impl DimensionVector {
    pub fn total(&self) -> BigUint {
        self.values.iter().sum()
    }
}

impl fmt::Display for DimensionVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.values.iter().map(ToString::to_string).collect();
        f.write_str(&parts.join(" "))
    }
}

impl BratteliDiagram {
    /// Validates level sizes and matrices.
    pub fn new(
        level_sizes: Vec<usize>,
        matrices: Vec<Matrix>,
        stationary_tail: bool,
    ) -> Result<Self, DiagramError> {
        if level_sizes.is_empty() {
            return Err(DiagramError::EmptyDiagram);
        }
        if let Some(level) = level_sizes.iter().position(|&k| k == 0) {
            return Err(DiagramError::EmptyLevel { level });
        }
        if level_sizes[0] != 1 {
            return Err(DiagramError::NonUnitalRoot {
                size: level_sizes[0],
            });
        }
        if matrices.len() + 1 != level_sizes.len() {
            return Err(DiagramError::MatrixCount {
                levels: level_sizes.len(),
                matrices: matrices.len(),
            });
        }
        for (n, m) in matrices.iter().enumerate() {
            let expected = (level_sizes[n + 1], level_sizes[n]);
            if m.shape() != expected {
                return Err(DiagramError::ShapeMismatch {
                    step: n,
                    expected,
                    found: m.shape(),
                });
            }
            if let Some(vertex) = m.has_zero_row() {
                return Err(DiagramError::ZeroRow {
                    level: n + 1,
                    vertex,
                });
            }
        }
        if stationary_tail {
            match matrices.last() {
                None => return Err(DiagramError::TailWithoutMatrix),
                Some(m) if !m.is_square() => {
                    return Err(DiagramError::NonSquareTail {
                        rows: m.rows(),
                        cols: m.cols(),
                    })
                }
                Some(_) => {}
            }
        }
        Ok(BratteliDiagram {
            level_sizes,
            matrices,
            stationary_tail,
        })
    }

    /// Validates raw nested integer input.
    pub fn validate(
        raw_levels: &[usize],
        raw_matrices: &[Vec<Vec<u64>>],
        stationary_flag: bool,
    ) -> Result<Self, DiagramError> {
        let mut matrices = Vec::with_capacity(raw_matrices.len());
        for (step, rows) in raw_matrices.iter().enumerate() {
            let m = Matrix::from_rows(rows).ok_or(DiagramError::RaggedMatrix { step })?;
            // an empty row list still has to carry the column count
            let m = if rows.is_empty() {
                Matrix::zeros(0, raw_levels.get(step).copied().unwrap_or(0))
            } else {
                m
            };
            matrices.push(m);
        }
        BratteliDiagram::new(raw_levels.to_vec(), matrices, stationary_flag)
    }

    /// Number of stored levels (the prefix length).
    pub fn prefix_len(&self) -> usize {
        self.level_sizes.len()
    }

    /// Deepest level index stored explicitly.
    pub fn last_level(&self) -> usize {
        self.level_sizes.len() - 1
    }

    pub fn level_sizes(&self) -> &[usize] {
        &self.level_sizes
    }

    pub fn matrices(&self) -> &[Matrix] {
        &self.matrices
    }

    pub fn is_stationary(&self) -> bool {
        self.stationary_tail
    }

    pub fn tail_matrix(&self) -> Option<&Matrix> {
        if self.stationary_tail {
            self.matrices.last()
        } else {
            None
        }
    }

    /// First level from which every step uses the tail matrix.
    pub fn tail_start(&self) -> Option<usize> {
        self.stationary_tail.then(|| self.level_sizes.len() - 2)
    }

    pub fn has_level(&self, n: usize) -> bool {
        self.stationary_tail || n < self.level_sizes.len()
    }

    fn check_level(&self, n: usize) -> Result<(), DiagramError> {
        if self.has_level(n) {
            Ok(())
        } else {
            Err(DiagramError::LevelOutOfRange {
                level: n,
                last: self.last_level(),
            })
        }
    }

    pub fn level_size(&self, n: usize) -> Result<usize, DiagramError> {
        self.check_level(n)?;
        Ok(*self
            .level_sizes
            .get(n)
            .unwrap_or_else(|| self.level_sizes.last().unwrap()))
    }

    /// Multiplicity matrix of the step from level `n` to level `n + 1`.
    pub fn step_matrix(&self, n: usize) -> Result<&Matrix, DiagramError> {
        self.check_level(n + 1)?;
        Ok(self
            .matrices
            .get(n)
            .unwrap_or_else(|| self.matrices.last().unwrap()))
    }

    /// Ordered product of the step matrices from level `from` to level `to`.
    pub fn compose(&self, from: usize, to: usize) -> Result<Matrix, DiagramError> {
        assert!(from <= to, "compose expects from <= to");
        self.check_level(to)?;
        let mut acc = Matrix::identity(self.level_size(from)?);
        for n in from..to {
            // a run of tail steps collapses into one power
            if let Some(t) = self.tail_start() {
                if n >= t {
                    let tail = self.tail_matrix().unwrap().pow(to - n);
                    return Ok(tail.mul(&acc));
                }
            }
            acc = self.step_matrix(n)?.mul(&acc);
        }
        Ok(acc)
    }

    /// Exact dimension vector at level `n`.
    pub fn dims(&self, n: usize) -> Result<DimensionVector, DiagramError> {
        self.check_level(n)?;
        let mut values = vec![BigUint::one()];
        for step in 0..n {
            values = self.step_matrix(step)?.mul_vec(&values);
        }
        Ok(DimensionVector { level: n, values })
    }

    /// Dimension vectors for levels `0..=n`.
    pub fn dims_up_to(&self, n: usize) -> Result<Vec<DimensionVector>, DiagramError> {
        self.check_level(n)?;
        let mut out = Vec::with_capacity(n + 1);
        let mut values = vec![BigUint::one()];
        for level in 0..=n {
            if level > 0 {
                values = self.step_matrix(level - 1)?.mul_vec(&values);
            }
            out.push(DimensionVector {
                level,
                values: values.clone(),
            });
        }
        Ok(out)
    }

    /// Keeps only the listed levels, composing the matrices in between.
    ///
    /// When the diagram is stationary and the last two kept levels both lie in
    /// the tail, the result is stationary too: the final gap repeats forever.
    pub fn telescope(&self, kept_levels: &[usize]) -> Result<BratteliDiagram, DiagramError> {
        match kept_levels.first() {
            Some(0) => {}
            _ => return Err(DiagramError::MissingRoot),
        }
        if kept_levels.windows(2).any(|w| w[0] >= w[1]) {
            return Err(DiagramError::UnsortedKeepList);
        }
        let last = *kept_levels.last().unwrap();
        self.check_level(last)?;

        let mut sizes = Vec::with_capacity(kept_levels.len());
        for &l in kept_levels {
            sizes.push(self.level_size(l)?);
        }
        let matrices = kept_levels
            .windows(2)
            .map(|w| self.compose(w[0], w[1]))
            .collect::<Result<Vec<_>, _>>()?;
        let stationary = match (self.tail_start(), kept_levels.len()) {
            (Some(t), len) if len >= 2 => kept_levels[len - 2] >= t,
            _ => false,
        };
        BratteliDiagram::new(sizes, matrices, stationary)
    }

    /// Expands the stationary tail so the prefix reaches `depth` levels below
    /// the root. The result has no stationary tail.
    pub fn unroll(&self, depth: usize) -> Result<BratteliDiagram, DiagramError> {
        self.check_level(depth)?;
        let mut sizes = Vec::with_capacity(depth + 1);
        let mut matrices = Vec::with_capacity(depth);
        for n in 0..=depth {
            sizes.push(self.level_size(n)?);
            if n < depth {
                matrices.push(self.step_matrix(n)?.clone());
            }
        }
        BratteliDiagram::new(sizes, matrices, false)
    }

    pub fn without_tail(&self) -> BratteliDiagram {
        BratteliDiagram {
            stationary_tail: false,
            ..self.clone()
        }
    }
}
