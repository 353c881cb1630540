//! Command-line front end. Exit codes: 0 on success with every check
//! passing, 2 when a check fails, 1 on usage or validation errors.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::git_locus::{
    common_nilcone, locus_report, nilcone_pieces, orbit_weights, orbitwise_common_nilcone, regular_samples,
    semistable_pieces,
};
use crate::pgl2_oracle::oracle_report;
use crate::pieces::PieceContext;
use crate::quotient_strata::{quotient_strata_for, StrataReport};
use crate::rootsys::{Weight, DEFAULT_GROUP_GUARD, GUARD_ENV};
use crate::verify::{context_for, run_suites, Suite, SuiteCheck, VerifyOptions, VerifyReport, CONFIG_MATRIX};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_CHECK_FAILED: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "stablepieces", version, about = "G-stable pieces of twisted wonderful compactifications")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Dot,
    Table,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Root system type, e.g. A3 or D4.
    #[arg(long = "type")]
    type_spec: Option<String>,
    /// Diagram automorphism: `id` or a list such as `1:3,3:1`.
    #[arg(long = "auto", default_value = "id")]
    auto_spec: String,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Upper bound on the Weyl group order (overrides the environment).
    #[arg(long)]
    guard: Option<u128>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// List every piece with its core.
    Pieces {
        #[command(flatten)]
        common: Common,
    },
    /// Pieces in the closure of one piece.
    Closure {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        piece: String,
    },
    /// Cover relations of the closure order.
    Poset {
        #[command(flatten)]
        common: Common,
    },
    /// Pieces in the nilpotent cone of a weight.
    Nilcone {
        #[command(flatten)]
        common: Common,
        /// Coefficients in the fundamental-weight basis, e.g. `1,2`.
        #[arg(long, allow_hyphen_values = true)]
        lambda: String,
    },
    /// Pieces of the semistable locus.
    Semistable {
        #[command(flatten)]
        common: Common,
    },
    /// Pieces lying in every nilpotent cone.
    CommonNilcone {
        #[command(flatten)]
        common: Common,
    },
    /// Full locus report: semistable set, nilpotent cones and their checks.
    Locus {
        #[command(flatten)]
        common: Common,
        /// Weight to include; repeatable. Defaults to the orbit weights and
        /// the regular weights with entries in {1, 2}.
        #[arg(long, allow_hyphen_values = true)]
        lambda: Vec<String>,
    },
    /// Quotient strata from the Coxeter fan (identity automorphism only).
    Strata {
        #[command(flatten)]
        common: Common,
    },
    /// Run verification suites.
    Verify {
        #[command(flatten)]
        common: Common,
        /// all, bruhat, pieces, git, quotient or pgl2.
        #[arg(long, default_value = "all")]
        suite: String,
        /// Run over the whole configuration matrix instead of one type.
        #[arg(long)]
        matrix: bool,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
    /// Exact rational checks in the PGL_2 model.
    OraclePgl2 {
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
}

/// Errors that end a run with exit code 1.
#[derive(Debug)]
enum Failure {
    Usage(String),
    Library(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Library(e)
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Usage(s) => f.write_str(s),
            Failure::Library(e) => write!(f, "{e}"),
        }
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

/// Output of one command and whether all its checks passed.
struct Outcome {
    text: String,
    pass: bool,
}

impl Outcome {
    fn ok(text: String) -> Self {
        Outcome { text, pass: true }
    }
}

/// Parse `argv` (including the program name), run, and write to the given streams.
pub fn run<I, T>(argv: I, out: &mut impl Write, err: &mut impl Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{}", e.render());
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{}", e.render());
                    EXIT_USAGE
                }
            };
        }
    };
    match execute(cli.command) {
        Ok(outcome) => {
            let _ = out.write_all(outcome.text.as_bytes());
            if outcome.pass {
                EXIT_OK
            } else {
                EXIT_CHECK_FAILED
            }
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_USAGE
        }
    }
}

fn guard_from(flag: Option<u128>) -> CliResult<u128> {
    if let Some(g) = flag {
        return Ok(g);
    }
    match std::env::var(GUARD_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Failure::Usage(format!("{GUARD_ENV} must be a non-negative integer, got {v:?}"))),
        Err(_) => Ok(DEFAULT_GROUP_GUARD),
    }
}

fn context(common: &Common) -> CliResult<PieceContext> {
    let type_spec = common.type_spec.as_deref().ok_or_else(|| Failure::Usage("--type is required".into()))?;
    Ok(context_for(type_spec, &common.auto_spec, guard_from(common.guard)?)?)
}

fn require_format(format: Format, allowed: &[Format], command: &str) -> CliResult<()> {
    if allowed.contains(&format) {
        Ok(())
    } else {
        Err(Failure::Usage(format!("format {format:?} is not available for `{command}`").to_lowercase()))
    }
}

fn to_json(value: &impl Serialize) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s
}

fn parse_weight(ctx: &PieceContext, text: &str) -> CliResult<Weight> {
    let lambda = Weight::parse(text).ok_or_else(|| Failure::Usage(format!("invalid weight {text:?}")))?;
    if lambda.coeffs.len() != ctx.group().rank() {
        return Err(Error::WeightLength { expected: ctx.group().rank(), got: lambda.coeffs.len() }.into());
    }
    Ok(lambda)
}

fn sorted_ids(ctx: &PieceContext, set: &[usize]) -> Vec<String> {
    let mut ids: Vec<String> = set.iter().map(|&k| ctx.piece(k).id.clone()).collect();
    ids.sort();
    ids
}

/// Left-aligned columns separated by two spaces.
fn table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let mut out = String::new();
    let mut line = |cells: Vec<&str>| {
        let mut s = String::new();
        for (k, (cell, w)) in cells.iter().zip(&widths).enumerate() {
            if k + 1 == cells.len() {
                s.push_str(cell);
            } else {
                let _ = write!(s, "{cell:<w$}  ");
            }
        }
        out.push_str(s.trim_end());
        out.push('\n');
    };
    line(header.to_vec());
    for row in rows {
        line(row.iter().map(String::as_str).collect());
    }
    out
}

fn id_list(
    ctx: &PieceContext,
    format: Format,
    command: &str,
    extra: Vec<(&str, Value)>,
    ids: Vec<String>,
) -> CliResult<String> {
    require_format(format, &[Format::Json, Format::Table], command)?;
    Ok(match format {
        Format::Table => table(&["piece"], &ids.into_iter().map(|id| vec![id]).collect::<Vec<_>>()),
        _ => {
            let mut obj = serde_json::Map::new();
            obj.insert("type".into(), json!(ctx.type_label()));
            obj.insert("automorphism".into(), json!(ctx.sigma().spec_string()));
            for (k, v) in extra {
                obj.insert(k.into(), v);
            }
            obj.insert("count".into(), json!(ids.len()));
            obj.insert("pieces".into(), json!(ids));
            to_json(&Value::Object(obj))
        }
    })
}

fn checks_table(rows: impl IntoIterator<Item = (String, bool)>) -> String {
    let rows: Vec<Vec<String>> =
        rows.into_iter().map(|(name, pass)| vec![name, if pass { "pass" } else { "FAIL" }.to_string()]).collect();
    table(&["check", "result"], &rows)
}

fn verify_table(report: &VerifyReport) -> String {
    let rows: Vec<Vec<String>> = report
        .checks
        .iter()
        .map(|c| {
            vec![
                report.type_label.clone(),
                report.automorphism.clone(),
                c.suite.to_string(),
                c.check.name.clone(),
                if c.check.pass { "pass" } else { "FAIL" }.to_string(),
            ]
        })
        .collect();
    table(&["type", "auto", "suite", "check", "result"], &rows)
}

fn execute(command: Command) -> CliResult<Outcome> {
    match command {
        Command::Pieces { common } => {
            let ctx = context(&common)?;
            require_format(common.format, &[Format::Json, Format::Table], "pieces")?;
            let g = ctx.group();
            let text = match common.format {
                Format::Table => {
                    let rows: Vec<Vec<String>> =
                        ctx.pieces().iter().map(|p| vec![p.id.clone(), p.core.to_string()]).collect();
                    table(&["piece", "core"], &rows)
                }
                _ => {
                    let pieces: Vec<Value> = ctx
                        .pieces()
                        .iter()
                        .map(|p| json!({"id": p.id, "J": p.j, "w": g.format(p.w), "core": p.core}))
                        .collect();
                    to_json(&json!({
                        "type": ctx.type_label(),
                        "automorphism": ctx.sigma().spec_string(),
                        "count": pieces.len(),
                        "pieces": pieces,
                    }))
                }
            };
            Ok(Outcome::ok(text))
        }
        Command::Closure { common, piece } => {
            let ctx = context(&common)?;
            let p = ctx.parse_id(&piece)?;
            let ids = sorted_ids(&ctx, &ctx.closure(p));
            let id = ctx.piece(p).id.clone();
            Ok(Outcome::ok(id_list(&ctx, common.format, "closure", vec![("piece", json!(id))], ids)?))
        }
        Command::Poset { common } => {
            let ctx = context(&common)?;
            let poset = ctx.closure_poset()?;
            Ok(Outcome::ok(match common.format {
                Format::Dot => poset.to_dot(),
                Format::Json => to_json(&poset),
                Format::Table => {
                    let rows: Vec<Vec<String>> = poset.covers.iter().map(|(u, l)| vec![u.clone(), l.clone()]).collect();
                    table(&["upper", "lower"], &rows)
                }
            }))
        }
        Command::Nilcone { common, lambda } => {
            let ctx = context(&common)?;
            let weight = parse_weight(&ctx, &lambda)?;
            let ids = sorted_ids(&ctx, &nilcone_pieces(&ctx, &weight)?);
            Ok(Outcome::ok(id_list(&ctx, common.format, "nilcone", vec![("lambda", json!(weight.to_string()))], ids)?))
        }
        Command::Semistable { common } => {
            let ctx = context(&common)?;
            let ids = sorted_ids(&ctx, &semistable_pieces(&ctx));
            Ok(Outcome::ok(id_list(&ctx, common.format, "semistable", Vec::new(), ids)?))
        }
        Command::CommonNilcone { common } => {
            let ctx = context(&common)?;
            let ids = sorted_ids(&ctx, &common_nilcone(&ctx));
            let extra = if ctx.sigma().is_identity() {
                Vec::new()
            } else {
                vec![("orbitwise", json!(sorted_ids(&ctx, &orbitwise_common_nilcone(&ctx))))]
            };
            Ok(Outcome::ok(id_list(&ctx, common.format, "common-nilcone", extra, ids)?))
        }
        Command::Locus { common, lambda } => {
            let ctx = context(&common)?;
            require_format(common.format, &[Format::Json, Format::Table], "locus")?;
            let weights = if lambda.is_empty() {
                let mut w = orbit_weights(ctx.sigma());
                w.extend(regular_samples(ctx.sigma()));
                w
            } else {
                lambda.iter().map(|l| parse_weight(&ctx, l)).collect::<CliResult<Vec<_>>>()?
            };
            let report = locus_report(&ctx, &weights)?;
            let pass = report.checks.iter().all(|c| c.pass);
            let text = match common.format {
                Format::Table => checks_table(report.checks.iter().map(|c| (c.name.clone(), c.pass))),
                _ => to_json(&report),
            };
            Ok(Outcome { text, pass })
        }
        Command::Strata { common } => {
            let ctx = context(&common)?;
            require_format(common.format, &[Format::Json, Format::Table], "strata")?;
            let strata = quotient_strata_for(&ctx)?;
            Ok(Outcome::ok(match common.format {
                Format::Table => {
                    let rows: Vec<Vec<String>> = strata
                        .iter()
                        .map(|s| vec![s.j.to_string(), s.cone_count.to_string(), s.matched_piece_id.clone()])
                        .collect();
                    table(&["J", "cones", "piece"], &rows)
                }
                _ => to_json(&StrataReport { strata }),
            }))
        }
        Command::Verify { common, suite, matrix, samples, seed } => {
            require_format(common.format, &[Format::Json, Format::Table], "verify")?;
            let suites =
                Suite::parse_selection(&suite).ok_or_else(|| Failure::Usage(format!("unknown suite {suite:?}")))?;
            let opts = VerifyOptions { pgl2_samples: samples, seed };
            let reports = if matrix {
                if common.type_spec.is_some() {
                    return Err(Failure::Usage("--matrix and --type are mutually exclusive".into()));
                }
                verify_matrix(&suites, &opts, guard_from(common.guard)?)?
            } else {
                vec![run_suites(&context(&common)?, &suites, &opts)?]
            };
            let pass = reports.iter().all(VerifyReport::pass);
            let text = match common.format {
                Format::Table => reports.iter().map(verify_table).collect(),
                _ if matrix => to_json(&json!({"pass": pass, "reports": reports})),
                _ => to_json(&reports[0]),
            };
            Ok(Outcome { text, pass })
        }
        Command::OraclePgl2 { samples, seed, format } => {
            require_format(format, &[Format::Json, Format::Table], "oracle-pgl2")?;
            let report = oracle_report(samples, seed);
            let pass = report.pass();
            let text = match format {
                Format::Table => checks_table(report.checks.iter().map(|c| (c.name.clone(), c.pass))),
                _ => to_json(&report),
            };
            Ok(Outcome { text, pass })
        }
    }
}

/// Every configuration of the matrix, run on scoped threads and reported in
/// matrix order. The PGL_2 oracle does not depend on the configuration, so it
/// runs once and its checks are shared.
fn verify_matrix(suites: &[Suite], opts: &VerifyOptions, guard: u128) -> Result<Vec<VerifyReport>> {
    let local: Vec<Suite> = suites.iter().copied().filter(|&s| s != Suite::Pgl2).collect();
    let mut reports: Vec<VerifyReport> = std::thread::scope(|scope| {
        let local = &local;
        let handles: Vec<_> = CONFIG_MATRIX
            .iter()
            .map(|&(t, a)| scope.spawn(move || run_suites(&context_for(t, a, guard)?, local, opts)))
            .collect();
        handles.into_iter().map(|h| h.join().expect("verification thread panicked")).collect::<Result<_>>()
    })?;
    if suites.contains(&Suite::Pgl2) {
        let shared: Vec<SuiteCheck> = oracle_report(opts.pgl2_samples, opts.seed)
            .checks
            .into_iter()
            .map(|check| SuiteCheck { suite: Suite::Pgl2.name(), check })
            .collect();
        for report in &mut reports {
            report.checks.extend(shared.iter().cloned());
        }
    }
    Ok(reports)
}
