use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use bratteli::dimension_group::{
    compare_invariants, format_poly, k0_presentation, stationary_invariants, Comparison,
};
use bratteli::equivalence::{
    find_intertwining, supernatural_invariant, IntertwiningWitness, SearchOutcome,
};
use bratteli::generators::Generator;
use bratteli::io::{export_dot, parse_bd, serialize_bd, DiagramDocument, DotOptions};
use bratteli::simplicity::{simplicity, SimplicityVerdict};
use bratteli::towers::{dynkin, graph_norm, tower_diagram, DynkinType};
use bratteli::vershik::{ProperOrdering, StationaryMeasure};
use bratteli::Matrix;
use clap::{Parser, Subcommand};
use serde_json::{json, Value};

const EXIT_USAGE: u8 = 64;
const EXIT_DATA: u8 = 65;
const EXIT_INTERNAL: u8 = 70;

/// Bratteli diagram toolkit. Wherever a FILE is expected, an inline
/// generator such as `gen:pascal:8` is accepted as well.
#[derive(Parser, Debug)]
#[command(name = "bratteli", version)]
struct Cli {
    /// Emit a single JSON object instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the dimension vector at a level.
    Dims {
        input: String,
        #[arg(long)]
        level: usize,
    },
    /// Keep only the listed levels (comma separated, starting with 0).
    Telescope {
        input: String,
        #[arg(long, value_delimiter = ',', required = true)]
        keep: Vec<usize>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Decide simplicity: exit 0 simple, 1 not simple, 2 unknown at bound.
    Simple {
        input: String,
        #[arg(long, default_value_t = 32)]
        bound: usize,
    },
    /// Search for an intertwining: exit 0 found, 1 distinguished, 2 not found.
    Equiv {
        first: String,
        second: String,
        #[arg(long, default_value_t = 4)]
        bound: usize,
    },
    /// Stationary K0 presentation and invariants.
    K0 {
        input: String,
        #[arg(long, default_value_t = 1e-12)]
        tolerance: f64,
    },
    /// Iterate the Vershik map on finite paths.
    Vershik {
        input: String,
        #[arg(long)]
        depth: Option<usize>,
        /// `min`, `max`, or an edge list such as `0.1,0.2@0`.
        #[arg(long, default_value = "min")]
        start: String,
        #[arg(long, default_value_t = 1)]
        steps: usize,
        /// Also print the invariant measure of each cylinder.
        #[arg(long)]
        measure: bool,
    },
    /// Write the tower diagram of a Dynkin graph.
    Tower {
        #[arg(long = "type")]
        kind: DynkinType,
        #[arg(long)]
        rank: usize,
        #[arg(long)]
        depth: usize,
        /// Start vertex (defaults to 0).
        #[arg(long)]
        start: Option<usize>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Graph norm and Jones index of a Dynkin graph.
    Norm {
        #[arg(long = "type")]
        kind: DynkinType,
        #[arg(long)]
        rank: usize,
        #[arg(long, default_value_t = 1e-13)]
        tolerance: f64,
    },
    /// Build a named diagram, e.g. `gen pascal 8` or `gen uhf 2,3`.
    Gen {
        kind: String,
        params: Vec<String>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Render as Graphviz DOT.
    Dot {
        input: String,
        #[arg(long)]
        depth: Option<usize>,
        /// Draw parallel edges individually.
        #[arg(long)]
        expand: bool,
    },
    /// Re-serialize in canonical form.
    Fmt {
        input: String,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Data(String),
    Internal(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Data(_) => EXIT_DATA,
            CliError::Internal(_) => EXIT_INTERNAL,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Data(m) | CliError::Internal(m) => m,
        }
    }
}

fn data<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Data(e.to_string())
}

/// Text report, optional JSON form, and exit code.
struct Report {
    text: String,
    json: Value,
    code: u8,
}

impl Report {
    fn ok(text: String, json: Value) -> Self {
        Report { text, json, code: 0 }
    }
}

fn load(input: &str) -> Result<DiagramDocument, CliError> {
    if input.starts_with("gen:") {
        let g: Generator = input.parse().map_err(|e| CliError::Usage(format!("{input}: {e}")))?;
        return Ok(DiagramDocument::new(g.build().map_err(|e| CliError::Data(format!("{input}: {e}")))?));
    }
    let text = fs::read_to_string(input).map_err(|e| CliError::Data(format!("{input}: {e}")))?;
    parse_bd(&text).map_err(|e| CliError::Data(format!("{input}: {e}")))
}

/// Writes to `output` if given; otherwise returns the text for stdout.
fn emit(text: &str, output: &Option<PathBuf>) -> Result<String, CliError> {
    match output {
        Some(path) => fs::write(path, text)
            .map(|_| String::new())
            .map_err(|e| CliError::Internal(format!("{}: {e}", path.display()))),
        None => Ok(text.to_string()),
    }
}

/// Integers that fit in `u64` become JSON numbers, larger ones strings.
fn big<T: ToString + TryInto<u64> + Clone>(x: &T) -> Value {
    match x.clone().try_into() {
        Ok(v) => json!(v),
        Err(_) => json!(x.to_string()),
    }
}

fn matrix_json(m: &Matrix) -> Value {
    Value::Array(
        m.row_iter()
            .map(|r| Value::Array(r.iter().map(big).collect()))
            .collect(),
    )
}

fn witness_json(w: &IntertwiningWitness) -> Value {
    json!({
        "steps": w.steps.iter().map(|s| json!({
            "from": s.from.to_string(),
            "from_level": s.from_level,
            "to_level": s.to_level,
            "matrix": matrix_json(&s.matrix),
        })).collect::<Vec<_>>(),
        "period_start": w.period_start,
    })
}

fn run(cli: Cli) -> Result<Report, CliError> {
    match cli.command {
        Command::Dims { input, level } => {
            let doc = load(&input)?;
            let dims = doc.diagram.dims(level).map_err(data)?;
            Ok(Report::ok(
                format!("{dims}\n"),
                json!({
                    "level": level,
                    "dims": dims.values.iter().map(big).collect::<Vec<_>>(),
                    "total": big(&dims.total()),
                }),
            ))
        }
        Command::Telescope { input, keep, output } => {
            let doc = load(&input)?;
            let t = doc.diagram.telescope(&keep).map_err(data)?;
            let mut out = DiagramDocument::new(t);
            out.comments = doc.comments;
            let text = serialize_bd(&out);
            let shown = emit(&text, &output)?;
            Ok(Report::ok(shown, json!({ "keep": keep, "document": text })))
        }
        Command::Simple { input, bound } => {
            let doc = load(&input)?;
            Ok(match simplicity(&doc.diagram, bound) {
                SimplicityVerdict::Simple => {
                    Report::ok("simple\n".into(), json!({ "verdict": "simple" }))
                }
                SimplicityVerdict::NotSimple(c) => Report {
                    text: format!(
                        "not simple: vertices {:?} at level {} never reach a whole level\n",
                        c.vertices, c.level
                    ),
                    json: json!({
                        "verdict": "not_simple",
                        "certificate": { "level": c.level, "vertices": c.vertices },
                    }),
                    code: 1,
                },
                SimplicityVerdict::UnknownAtBound(b) => Report {
                    text: format!("unknown at bound {b}\n"),
                    json: json!({ "verdict": "unknown", "bound": b }),
                    code: 2,
                },
            })
        }
        Command::Equiv { first, second, bound } => {
            let (a, b) = (load(&first)?.diagram, load(&second)?.diagram);
            if a.is_stationary() && b.is_stationary() {
                if let Some(reason) = distinguish(&a, &b) {
                    return Ok(Report {
                        text: format!("not equivalent: {reason}\n"),
                        json: json!({ "verdict": "distinguished", "reason": reason }),
                        code: 1,
                    });
                }
            }
            Ok(match find_intertwining(&a, &b, bound).map_err(data)? {
                SearchOutcome::Found(w) => Report::ok(
                    format!("equivalent: intertwining found\n{}\n", w.to_string().trim_end()),
                    json!({ "verdict": "found", "witness": witness_json(&w) }),
                ),
                SearchOutcome::NotFoundWithinBound => Report {
                    text: format!("no intertwining found within bound {bound}\n"),
                    json: json!({ "verdict": "not_found", "bound": bound }),
                    code: 2,
                },
            })
        }
        Command::K0 { input, tolerance } => {
            if !(tolerance > 0.0) {
                return Err(CliError::Usage("tolerance must be positive".into()));
            }
            let doc = load(&input)?;
            let p = k0_presentation(&doc.diagram).map_err(data)?;
            let r = stationary_invariants(&p, tolerance);
            let mut text = String::new();
            let _ = writeln!(text, "rank {}", p.rank);
            let _ = writeln!(text, "matrix {}", p.matrix);
            let _ = writeln!(text, "unit {} (level {})", p.unit, p.unit.level);
            let _ = writeln!(text, "char_poly {}", format_poly(&r.char_poly));
            let _ = writeln!(text, "determinant {}", r.determinant);
            let _ = writeln!(text, "eventual_rank {}", r.eventual_rank);
            let _ = writeln!(
                text,
                "perron {:.12} in [{:.15}, {:.15}]",
                r.perron_value(),
                r.perron.lower,
                r.perron.upper
            );
            let _ = writeln!(text, "primitive {}", r.primitive);
            let ranks: Vec<String> = r
                .reduced_ranks
                .iter()
                .map(|(q, k)| format!("{q}:{k}"))
                .collect();
            if ranks.is_empty() {
                text.push_str("reduced_ranks none\n");
            } else {
                let _ = writeln!(text, "reduced_ranks {}", ranks.join(" "));
            }
            Ok(Report::ok(
                text,
                json!({
                    "rank": p.rank,
                    "matrix": matrix_json(&p.matrix),
                    "unit": p.unit.values.iter().map(big).collect::<Vec<_>>(),
                    "unit_level": p.unit.level,
                    "char_poly": r.char_poly.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
                    "determinant": r.determinant.to_string(),
                    "eventual_rank": r.eventual_rank,
                    "perron": { "value": r.perron_value(), "lower": r.perron.lower, "upper": r.perron.upper },
                    "primitive": r.primitive,
                    "reduced_ranks": r.reduced_ranks.iter().map(|(q, k)| (q.to_string(), json!(k))).collect::<serde_json::Map<_, _>>(),
                }),
            ))
        }
        Command::Vershik { input, depth, start, steps, measure } => {
            let doc = load(&input)?;
            let od = doc.ordered();
            let path = match start.as_str() {
                "min" | "max" => {
                    let depth =
                        depth.ok_or_else(|| CliError::Usage("--depth is required".into()))?;
                    if start == "min" {
                        od.min_path(depth)
                    } else {
                        od.max_path(depth)
                    }
                    .map_err(data)?
                }
                list => {
                    let p: bratteli::vershik::PathWord =
                        list.parse().map_err(|e| CliError::Usage(format!("--start: {e}")))?;
                    if depth.is_some_and(|d| d != p.depth()) {
                        return Err(CliError::Usage("--depth disagrees with --start".into()));
                    }
                    p
                }
            };
            let orbit = od.orbit(&path, steps).map_err(data)?;
            let model = if measure {
                Some(StationaryMeasure::new(&doc.diagram).map_err(data)?)
            } else {
                None
            };
            let ordering = match od.proper_ordering_check() {
                ProperOrdering::ProperlyOrdered => "properly ordered".to_string(),
                ProperOrdering::NotProperlyOrdered(w) => format!(
                    "not properly ordered: {:?} edges form cycles {:?}",
                    w.extremal, w.cycles
                ),
                ProperOrdering::UnknownAtBound => "ordering not decidable without a tail".into(),
            };
            let mut text = format!("{ordering}\n");
            let mut rows = Vec::new();
            for (i, p) in orbit.iter().enumerate() {
                let _ = write!(text, "{i} {p}");
                let mut row = json!({ "step": i, "path": p.to_string() });
                if let Some(m) = &model {
                    let c = m.cylinder(p.depth(), p.end).map_err(data)?;
                    match &c.exact {
                        Some(q) => {
                            let _ = write!(text, " measure {q} ({:.12})", c.value);
                            row["measure_exact"] = json!(q.to_string());
                        }
                        None => {
                            let _ = write!(text, " measure ~{:.12}", c.value);
                        }
                    }
                    row["measure"] = json!(c.value);
                }
                text.push('\n');
                rows.push(row);
            }
            Ok(Report::ok(text, json!({ "ordering": ordering, "orbit": rows })))
        }
        Command::Tower { kind, rank, depth, start, output } => {
            let mut g = dynkin(kind, rank).map_err(data)?;
            if let Some(s) = start {
                g = g.with_start(s).map_err(data)?;
            }
            let d = tower_diagram(&g, depth).map_err(data)?;
            let mut doc = DiagramDocument::new(d);
            doc.comments
                .push(format!("tower of {kind}{rank} from vertex {}, depth {depth}", g.start()));
            let text = serialize_bd(&doc);
            let shown = emit(&text, &output)?;
            Ok(Report::ok(shown, json!({ "document": text })))
        }
        Command::Norm { kind, rank, tolerance } => {
            if !(tolerance > 0.0) {
                return Err(CliError::Usage("tolerance must be positive".into()));
            }
            let g = dynkin(kind, rank).map_err(data)?;
            let norm = graph_norm(&g, tolerance);
            let index = norm * norm;
            Ok(Report::ok(
                format!("norm {norm:.9} index {index:.9}\n"),
                json!({ "type": kind.to_string(), "rank": rank, "norm": norm, "index": index }),
            ))
        }
        Command::Gen { kind, params, output } => {
            let mut spec = kind;
            for p in &params {
                spec.push(':');
                spec.push_str(p);
            }
            let g: Generator = spec.parse().map_err(|e| CliError::Usage(format!("{spec}: {e}")))?;
            let d = g.build().map_err(|e| CliError::Data(format!("{spec}: {e}")))?;
            let text = serialize_bd(&DiagramDocument::new(d));
            let shown = emit(&text, &output)?;
            Ok(Report::ok(shown, json!({ "generator": spec, "document": text })))
        }
        Command::Dot { input, depth, expand } => {
            let doc = load(&input)?;
            let dot = export_dot(&doc.diagram, DotOptions { depth, expand }).map_err(data)?;
            Ok(Report::ok(dot.clone(), json!({ "dot": dot })))
        }
        Command::Fmt { input, output } => {
            let doc = load(&input)?;
            let text = serialize_bd(&doc);
            let shown = emit(&text, &output)?;
            Ok(Report::ok(shown, json!({ "document": text })))
        }
    }
}

/// Reason two stationary diagrams cannot be equivalent, if an invariant
/// separates them.
fn distinguish(a: &bratteli::BratteliDiagram, b: &bratteli::BratteliDiagram) -> Option<String> {
    if let (Ok(sa), Ok(sb)) = (supernatural_invariant(a), supernatural_invariant(b)) {
        if sa != sb {
            return Some(format!("supernatural invariants differ: {sa} vs {sb}"));
        }
    }
    let ra = stationary_invariants(&k0_presentation(a).ok()?, 1e-9);
    let rb = stationary_invariants(&k0_presentation(b).ok()?, 1e-9);
    match compare_invariants(&ra, &rb) {
        Comparison::Distinguished(d) => Some(d.to_string()),
        Comparison::Inconclusive => None,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let json = cli.json;
    let result = std::panic::catch_unwind(|| run(cli))
        .unwrap_or_else(|_| Err(CliError::Internal("internal error".into())));
    match result {
        Ok(report) => {
            if json {
                println!("{}", report.json);
            } else {
                print!("{}", report.text);
            }
            ExitCode::from(report.code)
        }
        Err(e) => {
            if json {
                println!("{}", json!({ "error": e.message(), "exit_code": e.code() }));
            }
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}
