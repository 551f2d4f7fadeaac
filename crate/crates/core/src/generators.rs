//! Named diagram families and the inline `gen:KIND:PARAMS` syntax.

use std::str::FromStr;

use num_bigint::BigUint;

use crate::diagram::BratteliDiagram;
use crate::error::DiagramError;
use crate::matrix::Matrix;
use crate::towers::{self, DynkinType};

/// Pascal's triangle to the given depth: level `n` has `n + 1` vertices and
/// vertex `i` feeds vertices `i` and `i + 1` below it.
pub fn pascal(depth: usize) -> Result<BratteliDiagram, DiagramError> {
    if depth < 1 {
        return Err(DiagramError::BadParam("depth must be at least 1".into()));
    }
    let sizes: Vec<usize> = (1..=depth + 1).collect();
    let matrices = (0..depth).map(pascal_step).collect();
    BratteliDiagram::new(sizes, matrices, false)
}

/// The GICAR diagram is Pascal's triangle.
pub fn gicar(depth: usize) -> Result<BratteliDiagram, DiagramError> {
    pascal(depth)
}

/// Bidiagonal step from level `n` (n + 1 vertices) to level `n + 1`.
pub fn pascal_step(n: usize) -> Matrix {
    let mut m = Matrix::zeros(n + 2, n + 1);
    for i in 0..=n {
        m.set(i, i, BigUint::from(1u32));
        m.set(i + 1, i, BigUint::from(1u32));
    }
    m
}

/// One vertex per level; step `i` has `factors[i]` parallel edges. With
/// `stationary` the last factor repeats forever.
pub fn uhf(factors: &[u64], stationary: bool) -> Result<BratteliDiagram, DiagramError> {
    if factors.is_empty() {
        return Err(DiagramError::BadParam("at least one factor required".into()));
    }
    if let Some(f) = factors.iter().find(|&&f| f < 2) {
        return Err(DiagramError::BadParam(format!("factor {f} is below 2")));
    }
    let sizes = vec![1; factors.len() + 1];
    let matrices = factors.iter().map(|&f| Matrix::from_u64(&[&[f]])).collect();
    BratteliDiagram::new(sizes, matrices, stationary)
}

/// The base-`b` adding machine: `uhf([b])` with a stationary tail.
pub fn odometer(base: u64) -> Result<BratteliDiagram, DiagramError> {
    if base < 2 {
        return Err(DiagramError::BadParam(format!("base {base} is below 2")));
    }
    uhf(&[base], true)
}

/// Prefix matrices followed by a repeating square tail.
pub fn stationary(prefix: &[Matrix], tail: Matrix) -> Result<BratteliDiagram, DiagramError> {
    let mut sizes = vec![1];
    for m in prefix {
        sizes.push(m.rows());
    }
    sizes.push(tail.rows());
    let mut matrices = prefix.to_vec();
    matrices.push(tail);
    BratteliDiagram::new(sizes, matrices, true)
}

/// Root splits into two vertices, then `[[1,1],[1,0]]` repeats.
pub fn golden_mean() -> BratteliDiagram {
    stationary(
        &[Matrix::from_u64(&[&[1], &[1]])],
        Matrix::from_u64(&[&[1, 1], &[1, 0]]),
    )
    .expect("golden mean diagram is valid")
}

/// Parsed form of an inline generator such as `gen:pascal:8`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Generator {
    Pascal(usize),
    Gicar(usize),
    Uhf { factors: Vec<u64>, stationary: bool },
    Odometer(u64),
    Golden,
    Stationary { prefix: Vec<Matrix>, tail: Matrix },
    Dynkin { kind: DynkinType, rank: usize, depth: usize },
}

impl Generator {
    pub fn build(&self) -> Result<BratteliDiagram, DiagramError> {
        match self {
            Generator::Pascal(d) => pascal(*d),
            Generator::Gicar(d) => gicar(*d),
            Generator::Uhf {
                factors,
                stationary,
            } => uhf(factors, *stationary),
            Generator::Odometer(b) => odometer(*b),
            Generator::Golden => Ok(golden_mean()),
            Generator::Stationary { prefix, tail } => stationary(prefix, tail.clone()),
            Generator::Dynkin { kind, rank, depth } => {
                let graph = towers::dynkin(*kind, *rank)
                    .map_err(|e| DiagramError::BadParam(e.to_string()))?;
                towers::tower_diagram(&graph, *depth)
                    .map_err(|e| DiagramError::BadParam(e.to_string()))
            }
        }
    }
}

fn bad(msg: impl Into<String>) -> DiagramError {
    DiagramError::BadParam(msg.into())
}

fn parse_num<T: FromStr>(s: &str, what: &str) -> Result<T, DiagramError> {
    s.trim()
        .parse()
        .map_err(|_| bad(format!("{what}: cannot parse {s:?}")))
}

/// Matrix literal: rows separated by `/`, entries by `,` (e.g. `1,1/1,0`).
pub fn parse_matrix_literal(s: &str) -> Result<Matrix, DiagramError> {
    let rows = s
        .split('/')
        .map(|r| {
            r.split(',')
                .map(|x| parse_num::<u64>(x, "matrix entry"))
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    Matrix::from_rows(&rows).ok_or_else(|| bad(format!("ragged matrix literal {s:?}")))
}

impl FromStr for Generator {
    type Err = DiagramError;

    /// Accepts `KIND:PARAMS` with an optional leading `gen:`.
    ///
    /// * `pascal:D`, `gicar:D`
    /// * `uhf:F` (stationary `F^∞`), `uhf:F1,F2,...` (finite prefix),
    ///   `uhf:F1,F2,...:stationary` (last factor repeats)
    /// * `odometer:B`, `golden`
    /// * `stationary:PREFIX;PREFIX...:TAIL` with matrix literals
    /// * `dynkin:TYPE:RANK:DEPTH`
    fn from_str(spec: &str) -> Result<Self, Self::Err> {
        let spec = spec.strip_prefix("gen:").unwrap_or(spec);
        let parts: Vec<&str> = spec.split(':').collect();
        match parts.as_slice() {
            ["pascal", d] => Ok(Generator::Pascal(parse_num(d, "depth")?)),
            ["gicar", d] => Ok(Generator::Gicar(parse_num(d, "depth")?)),
            ["uhf", list, rest @ ..] => {
                let factors = list
                    .split(',')
                    .map(|f| parse_num(f, "factor"))
                    .collect::<Result<Vec<u64>, _>>()?;
                let stationary = match rest {
                    [] => factors.len() == 1,
                    ["stationary"] | ["s"] => true,
                    ["prefix"] => false,
                    _ => return Err(bad(format!("unexpected uhf option in {spec:?}"))),
                };
                Ok(Generator::Uhf {
                    factors,
                    stationary,
                })
            }
            ["odometer", b] => Ok(Generator::Odometer(parse_num(b, "base")?)),
            ["golden"] => Ok(Generator::Golden),
            ["stationary", prefix, tail] => {
                let prefix = if prefix.is_empty() {
                    Vec::new()
                } else {
                    prefix
                        .split(';')
                        .map(parse_matrix_literal)
                        .collect::<Result<Vec<_>, _>>()?
                };
                Ok(Generator::Stationary {
                    prefix,
                    tail: parse_matrix_literal(tail)?,
                })
            }
            ["dynkin", t, r, d] => Ok(Generator::Dynkin {
                kind: t.parse().map_err(|e: towers::TowerError| bad(e.to_string()))?,
                rank: parse_num(r, "rank")?,
                depth: parse_num(d, "depth")?,
            }),
            _ => Err(bad(format!("unknown generator {spec:?}"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pascal_level_four() {
        let d = pascal(4).unwrap();
        let dims: Vec<String> = d.dims(4).unwrap().values.iter().map(|x| x.to_string()).collect();
        assert_eq!(dims, ["1", "4", "6", "4", "1"]);
    }

    #[test]
    fn gicar_second_step() {
        let d = gicar(2).unwrap();
        assert_eq!(d.matrices()[1], Matrix::from_u64(&[&[1, 0], &[1, 1], &[0, 1]]));
    }

    #[test]
    fn odometer_shape() {
        let d = odometer(2).unwrap();
        assert!(d.is_stationary());
        for n in 0..6 {
            assert_eq!(d.level_size(n).unwrap(), 1);
            assert_eq!(d.step_matrix(n).unwrap(), &Matrix::from_u64(&[&[2]]));
        }
    }

    #[test]
    fn bad_params() {
        assert!(pascal(0).is_err());
        assert!(uhf(&[1], false).is_err());
        assert!(uhf(&[], true).is_err());
        assert!(odometer(1).is_err());
    }

    #[test]
    fn inline_specs() {
        assert_eq!("gen:pascal:8".parse::<Generator>().unwrap(), Generator::Pascal(8));
        assert_eq!(
            "gen:uhf:2".parse::<Generator>().unwrap(),
            Generator::Uhf {
                factors: vec![2],
                stationary: true
            }
        );
        assert_eq!(
            "uhf:2,3,2,3".parse::<Generator>().unwrap(),
            Generator::Uhf {
                factors: vec![2, 3, 2, 3],
                stationary: false
            }
        );
        let g: Generator = "gen:stationary:1/1:1,1/1,0".parse().unwrap();
        assert_eq!(g.build().unwrap(), golden_mean());
        let t: Generator = "gen:dynkin:A:3:4".parse().unwrap();
        assert_eq!(t.build().unwrap().prefix_len(), 5);
        assert!("gen:nope:1".parse::<Generator>().is_err());
    }
}
