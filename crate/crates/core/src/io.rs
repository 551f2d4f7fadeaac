//! The `.bd` text format and DOT export.
//!
//! ```text
//! bratteli v1
//! # matrix rows index vertices at level n+1, columns index vertices at level n
//! levels 3
//! sizes 1 2 2
//! matrix 0
//! 1
//! 1
//! matrix 1
//! 1 1
//! 1 0
//! stationary
//! order 2 0: 1.1 0.1
//! ```
//!
//! `#` starts a comment that runs to the end of the line. Order lines give the
//! incoming-edge order of vertex `j` at level `n` as `source.copy` tokens.

use std::fmt::{self, Write as _};

use num_bigint::BigUint;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::diagram::BratteliDiagram;
use crate::error::DiagramError;
use crate::matrix::Matrix;
use crate::vershik::{Edge, OrderedBratteliDiagram, VershikError};

pub const HEADER: &str = "bratteli v1";
pub const ORIENTATION_COMMENT: &str =
    "matrix rows index vertices at level n+1, columns index vertices at level n";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BdErrorKind {
    #[error("expected header `bratteli v1`")]
    MissingHeader,
    #[error("unsupported format version {0:?}")]
    UnsupportedVersion(String),
    #[error("unexpected {0:?}")]
    Unexpected(String),
    #[error("invalid number {0:?}")]
    BadNumber(String),
    #[error("duplicate `{0}` line")]
    Duplicate(&'static str),
    #[error("missing `{0}` line")]
    Missing(&'static str),
    #[error("`levels {levels}` but {sizes} sizes given")]
    LevelCount { levels: usize, sizes: usize },
    #[error("expected `matrix {expected}`, found `matrix {found}`")]
    MatrixIndex { expected: usize, found: usize },
    #[error("matrix {step} has {found} rows, expected {expected}")]
    ShapeMismatch {
        step: usize,
        expected: usize,
        found: usize,
    },
    #[error("row has {found} entries, expected {expected}")]
    RowWidth { expected: usize, found: usize },
    #[error(transparent)]
    Diagram(#[from] DiagramError),
    #[error(transparent)]
    Order(#[from] VershikError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {kind}")]
pub struct BdError {
    pub line: usize,
    pub column: usize,
    pub kind: BdErrorKind,
}

fn err(line: usize, column: usize, kind: BdErrorKind) -> BdError {
    BdError { line, column, kind }
}

/// A parsed `.bd` file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiagramDocument {
    pub diagram: BratteliDiagram,
    /// `None` when every vertex uses the default order.
    pub order: Option<OrderedBratteliDiagram>,
    /// Comment lines, without the leading `#` and one following space.
    pub comments: Vec<String>,
}

impl DiagramDocument {
    pub fn new(diagram: BratteliDiagram) -> Self {
        DiagramDocument {
            diagram,
            order: None,
            comments: Vec::new(),
        }
    }

    pub fn with_order(diagram: BratteliDiagram, order: OrderedBratteliDiagram) -> Self {
        let order = (!order.is_default()).then_some(order);
        DiagramDocument {
            diagram,
            order,
            comments: Vec::new(),
        }
    }

    pub fn ordered(&self) -> OrderedBratteliDiagram {
        self.order
            .clone()
            .unwrap_or_else(|| OrderedBratteliDiagram::default_order(&self.diagram))
    }
}

/// A significant line: 1-based number, content with comments stripped, and
/// the byte offset of each whitespace-separated token.
struct Line<'a> {
    number: usize,
    tokens: Vec<(usize, &'a str)>,
}

impl Line<'_> {
    fn col(&self, i: usize) -> usize {
        self.tokens.get(i).map_or(1, |t| t.0 + 1)
    }
}

fn tokenize(text: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in text.char_indices() {
        if c.is_whitespace() {
            if let Some(s) = start.take() {
                out.push((s, &text[s..i]));
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        out.push((s, &text[s..]));
    }
    out
}

fn number<T: std::str::FromStr>(line: &Line, i: usize) -> Result<T, BdError> {
    let tok = line.tokens[i].1;
    tok.parse()
        .map_err(|_| err(line.number, line.col(i), BdErrorKind::BadNumber(tok.into())))
}

fn expect_len(line: &Line, n: usize) -> Result<(), BdError> {
    match line.tokens.get(n) {
        Some(&(c, t)) => Err(err(line.number, c + 1, BdErrorKind::Unexpected(t.into()))),
        None if line.tokens.len() < n => Err(err(
            line.number,
            line.col(line.tokens.len().saturating_sub(1)) + 1,
            BdErrorKind::Unexpected("end of line".into()),
        )),
        None => Ok(()),
    }
}

pub fn parse_bd(text: &str) -> Result<DiagramDocument, BdError> {
    let mut comments = Vec::new();
    let mut lines = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let (content, comment) = match raw.find('#') {
            Some(p) => (&raw[..p], Some(&raw[p + 1..])),
            None => (raw, None),
        };
        if let Some(c) = comment {
            let c = c.strip_prefix(' ').unwrap_or(c).trim_end();
            if c != ORIENTATION_COMMENT {
                comments.push(c.to_string());
            }
        }
        let tokens = tokenize(content);
        if !tokens.is_empty() {
            lines.push(Line {
                number: idx + 1,
                tokens,
            });
        }
    }
    let mut it = lines.iter().peekable();

    let header = it.next().ok_or_else(|| err(1, 1, BdErrorKind::MissingHeader))?;
    if header.tokens[0].1 != "bratteli" || header.tokens.len() != 2 {
        return Err(err(header.number, 1, BdErrorKind::MissingHeader));
    }
    if header.tokens[1].1 != "v1" {
        return Err(err(
            header.number,
            header.col(1),
            BdErrorKind::UnsupportedVersion(header.tokens[1].1.into()),
        ));
    }

    let mut levels: Option<(usize, &Line)> = None;
    let mut sizes: Option<(Vec<usize>, &Line)> = None;
    // (header line, rows with their lines)
    let mut matrices: Vec<(&Line, Vec<(&Line, Vec<u64>)>)> = Vec::new();
    let mut stationary: Option<&Line> = None;
    let mut orders: Vec<(&Line, usize, usize, Vec<Edge>)> = Vec::new();

    while let Some(line) = it.next() {
        let (c0, kw) = line.tokens[0];
        let misplaced = |what: &str| {
            Err(err(line.number, c0 + 1, BdErrorKind::Unexpected(what.to_string())))
        };
        match kw {
            "levels" => {
                if levels.is_some() {
                    return Err(err(line.number, c0 + 1, BdErrorKind::Duplicate("levels")));
                }
                expect_len(line, 2)?;
                levels = Some((number(line, 1)?, line));
            }
            "sizes" => {
                if sizes.is_some() {
                    return Err(err(line.number, c0 + 1, BdErrorKind::Duplicate("sizes")));
                }
                let Some((l, _)) = levels else {
                    return Err(err(line.number, c0 + 1, BdErrorKind::Missing("levels")));
                };
                let s = (1..line.tokens.len())
                    .map(|i| number(line, i))
                    .collect::<Result<Vec<usize>, _>>()?;
                if s.len() != l {
                    return Err(err(
                        line.number,
                        c0 + 1,
                        BdErrorKind::LevelCount {
                            levels: l,
                            sizes: s.len(),
                        },
                    ));
                }
                sizes = Some((s, line));
            }
            "matrix" => {
                let Some((s, _)) = &sizes else {
                    return Err(err(line.number, c0 + 1, BdErrorKind::Missing("sizes")));
                };
                if stationary.is_some() || !orders.is_empty() {
                    return misplaced("matrix");
                }
                expect_len(line, 2)?;
                let found: usize = number(line, 1)?;
                let expected = matrices.len();
                if found != expected || expected + 1 >= s.len() {
                    return Err(err(
                        line.number,
                        line.col(1),
                        BdErrorKind::MatrixIndex { expected, found },
                    ));
                }
                let width = s[expected];
                let mut rows = Vec::new();
                while let Some(next) = it.peek() {
                    if !next.tokens[0].1.starts_with(|c: char| c.is_ascii_digit()) {
                        break;
                    }
                    let next = it.next().unwrap();
                    if next.tokens.len() != width {
                        let col = next
                            .tokens
                            .get(width)
                            .map_or_else(|| next.col(next.tokens.len() - 1), |t| t.0 + 1);
                        return Err(err(
                            next.number,
                            col,
                            BdErrorKind::RowWidth {
                                expected: width,
                                found: next.tokens.len(),
                            },
                        ));
                    }
                    let row = (0..width)
                        .map(|i| number(next, i))
                        .collect::<Result<Vec<u64>, _>>()?;
                    rows.push((next, row));
                }
                if rows.len() != s[expected + 1] {
                    return Err(err(
                        line.number,
                        c0 + 1,
                        BdErrorKind::ShapeMismatch {
                            step: expected,
                            expected: s[expected + 1],
                            found: rows.len(),
                        },
                    ));
                }
                matrices.push((line, rows));
            }
            "stationary" => {
                if stationary.is_some() {
                    return Err(err(line.number, c0 + 1, BdErrorKind::Duplicate("stationary")));
                }
                if !orders.is_empty() {
                    return misplaced("stationary");
                }
                expect_len(line, 1)?;
                stationary = Some(line);
            }
            "order" => {
                if line.tokens.len() < 3 {
                    return Err(err(
                        line.number,
                        c0 + 1,
                        BdErrorKind::Unexpected("incomplete order line".into()),
                    ));
                }
                let level: usize = number(line, 1)?;
                let (vc, vtok) = line.tokens[2];
                let vtok = vtok.strip_suffix(':').ok_or_else(|| {
                    err(line.number, vc + 1, BdErrorKind::Unexpected(vtok.into()))
                })?;
                let vertex: usize = vtok.parse().map_err(|_| {
                    err(line.number, vc + 1, BdErrorKind::BadNumber(vtok.into()))
                })?;
                let edges = line.tokens[3..]
                    .iter()
                    .map(|&(c, t)| {
                        t.parse::<Edge>()
                            .map_err(|e| err(line.number, c + 1, BdErrorKind::Order(e)))
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                orders.push((line, level, vertex, edges));
            }
            other => return misplaced(other),
        }
    }

    let (sizes, sizes_line) =
        sizes.ok_or_else(|| err(lines.last().map_or(1, |l| l.number), 1, BdErrorKind::Missing("sizes")))?;
    if matrices.len() + 1 != sizes.len() {
        let at = matrices.last().map_or(sizes_line, |m| m.0);
        return Err(err(at.number, 1, BdErrorKind::Missing("matrix")));
    }

    let raw: Vec<Vec<Vec<u64>>> = matrices
        .iter()
        .map(|(_, rows)| rows.iter().map(|(_, r)| r.clone()).collect())
        .collect();
    let diagram =
        BratteliDiagram::validate(&sizes, &raw, stationary.is_some()).map_err(|e| {
            let line = match &e {
                DiagramError::ZeroRow { level, vertex } => matrices
                    .get(level - 1)
                    .and_then(|m| m.1.get(*vertex))
                    .map_or(sizes_line.number, |r| r.0.number),
                DiagramError::NonSquareTail { .. } => stationary.map_or(0, |l| l.number),
                DiagramError::ShapeMismatch { step, .. } => {
                    matrices.get(*step).map_or(sizes_line.number, |m| m.0.number)
                }
                _ => sizes_line.number,
            };
            err(line, 1, BdErrorKind::Diagram(e))
        })?;

    let mut ordered = OrderedBratteliDiagram::default_order(&diagram);
    for (line, level, vertex, edges) in orders {
        ordered = ordered
            .with_order(level, vertex, edges)
            .map_err(|e| err(line.number, 1, BdErrorKind::Order(e)))?;
    }
    Ok(DiagramDocument {
        order: (!ordered.is_default()).then_some(ordered),
        diagram,
        comments,
    })
}

/// Canonical text of a document. Equal documents give identical bytes.
pub fn serialize_bd(doc: &DiagramDocument) -> String {
    let d = &doc.diagram;
    let mut out = String::new();
    out.push_str(HEADER);
    out.push('\n');
    for c in &doc.comments {
        if c.is_empty() {
            out.push_str("#\n");
        } else {
            let _ = writeln!(out, "# {c}");
        }
    }
    let _ = writeln!(out, "# {ORIENTATION_COMMENT}");
    let _ = writeln!(out, "levels {}", d.prefix_len());
    let _ = writeln!(out, "sizes {}", join(d.level_sizes()));
    for (n, m) in d.matrices().iter().enumerate() {
        let _ = writeln!(out, "matrix {n}");
        for row in m.row_iter() {
            let _ = writeln!(out, "{}", join(row));
        }
    }
    if d.is_stationary() {
        out.push_str("stationary\n");
    }
    if let Some(ord) = &doc.order {
        let default = OrderedBratteliDiagram::default_order(d);
        for (n, level) in ord.orders().iter().enumerate() {
            for (j, order) in level.iter().enumerate() {
                if *order != default.orders()[n][j] {
                    let _ = writeln!(out, "order {n} {j}: {}", join(order));
                }
            }
        }
    }
    out
}

fn join<T: fmt::Display>(items: &[T]) -> String {
    items
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(" ")
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct DotOptions {
    /// Last level drawn; defaults to the last stored level.
    pub depth: Option<usize>,
    /// One edge statement per parallel edge instead of a labelled edge.
    pub expand: bool,
}

pub fn export_dot(d: &BratteliDiagram, options: DotOptions) -> Result<String, DiagramError> {
    let depth = options.depth.unwrap_or(d.last_level());
    let dims = d.dims_up_to(depth)?;
    let mut out = String::from("digraph bratteli {\n  rankdir=TB;\n  node [shape=circle];\n");
    for (n, dv) in dims.iter().enumerate() {
        let nodes: Vec<String> = dv
            .values
            .iter()
            .enumerate()
            .map(|(v, x)| format!("L{n}_{v} [label=\"{x}\"];"))
            .collect();
        let _ = writeln!(out, "  {{ rank=same; {} }}", nodes.join(" "));
    }
    for n in 0..depth {
        let m: &Matrix = d.step_matrix(n)?;
        for i in 0..m.cols() {
            for j in 0..m.rows() {
                let mult = m.get(j, i);
                if mult.is_zero() {
                    continue;
                }
                if options.expand {
                    let mut k = BigUint::zero();
                    while &k < mult {
                        let _ = writeln!(out, "  L{n}_{i} -> L{}_{j};", n + 1);
                        k += 1u32;
                    }
                } else if mult.is_one() {
                    let _ = writeln!(out, "  L{n}_{i} -> L{}_{j};", n + 1);
                } else {
                    let _ = writeln!(out, "  L{n}_{i} -> L{}_{j} [label=\"{mult}\"];", n + 1);
                }
            }
        }
    }
    out.push_str("}\n");
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{gicar, odometer, pascal, uhf};

    #[test]
    fn odometer_document() {
        let text = "bratteli v1\nlevels 2\nsizes 1 1\nmatrix 0\n2\nstationary\n";
        let doc = parse_bd(text).unwrap();
        assert_eq!(doc.diagram, odometer(2).unwrap());
        assert!(doc.order.is_none());
    }

    #[test]
    fn too_many_rows() {
        let text = "bratteli v1\nlevels 2\nsizes 1 2\nmatrix 0\n1\n1\n1\n";
        let e = parse_bd(text).unwrap_err();
        assert_eq!(e.line, 4);
        assert!(matches!(e.kind, BdErrorKind::ShapeMismatch { found: 3, .. }));
    }

    #[test]
    fn row_width_error_position() {
        let text = "bratteli v1\nlevels 2\nsizes 1 2\nmatrix 0\n1\n1 1\n";
        let e = parse_bd(text).unwrap_err();
        assert_eq!((e.line, e.column), (6, 3));
    }

    #[test]
    fn zero_row_reported_at_row() {
        let text = "bratteli v1\nlevels 2\nsizes 1 2\nmatrix 0\n1\n0\n";
        let e = parse_bd(text).unwrap_err();
        assert_eq!(e.line, 6);
        assert!(matches!(e.kind, BdErrorKind::Diagram(DiagramError::ZeroRow { .. })));
    }

    #[test]
    fn bad_header_and_numbers() {
        assert_eq!(parse_bd("").unwrap_err().kind, BdErrorKind::MissingHeader);
        assert!(matches!(
            parse_bd("bratteli v2\n").unwrap_err().kind,
            BdErrorKind::UnsupportedVersion(_)
        ));
        let e = parse_bd("bratteli v1\nlevels x\n").unwrap_err();
        assert_eq!((e.line, e.column), (2, 8));
    }

    #[test]
    fn gicar_round_trip() {
        let doc = DiagramDocument::new(gicar(4).unwrap());
        let text = serialize_bd(&doc);
        assert_eq!(parse_bd(&text).unwrap(), doc);
        assert_eq!(serialize_bd(&parse_bd(&text).unwrap()), text);
        assert!(!text.contains(" \n"));
    }

    #[test]
    fn orders_round_trip() {
        let d = pascal(2).unwrap();
        let ord = OrderedBratteliDiagram::default_order(&d)
            .with_order(2, 1, vec![Edge { source: 1, copy: 1 }, Edge { source: 0, copy: 1 }])
            .unwrap();
        let mut doc = DiagramDocument::with_order(d, ord);
        doc.comments.push("reversed".into());
        let text = serialize_bd(&doc);
        assert!(text.contains("order 2 1: 1.1 0.1\n"));
        assert_eq!(parse_bd(&text).unwrap(), doc);
    }

    #[test]
    fn default_order_lines_are_dropped() {
        let text = "bratteli v1\nlevels 2\nsizes 1 1\nmatrix 0\n2\norder 1 0: 0.1 0.2\n";
        assert!(parse_bd(text).unwrap().order.is_none());
    }

    #[test]
    fn dot_counts() {
        let dot = export_dot(&pascal(3).unwrap(), DotOptions::default()).unwrap();
        assert_eq!(dot.matches("[label=").count(), 10);
        assert_eq!(dot.matches("->").count(), 12);

        let dot = export_dot(&uhf(&[2], false).unwrap(), DotOptions::default()).unwrap();
        assert_eq!(dot.matches("->").count(), 1);
        assert!(dot.contains("L0_0 -> L1_0 [label=\"2\"];"));
        let expanded = export_dot(
            &uhf(&[2], false).unwrap(),
            DotOptions {
                depth: None,
                expand: true,
            },
        )
        .unwrap();
        assert_eq!(expanded.matches("->").count(), 2);
    }

    #[test]
    fn gicar_middle_label() {
        let dot = export_dot(&gicar(4).unwrap(), DotOptions::default()).unwrap();
        assert!(dot.contains("L4_2 [label=\"6\"];"));
    }
}
