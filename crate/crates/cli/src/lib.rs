//! Command-line front end for `compactnet`.

pub mod defs;

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use compactnet::gauge::{check_derivative_nonincreasing, check_subadditivity, uniform_grid};
use compactnet::nets::{bw_extract, net_depth, net_of, probe_universe, verify_coverage};
use compactnet::notation::{format_point, parse_point};
use compactnet::quotient::{f_eval, f_preimages};
use compactnet::rational::{parse_rational, Rational};
use compactnet::space::SpaceRef;
use compactnet::{AxiomReport, BinarySeq, Dyadic, NetCertificate, Point, Probes, Space};

pub use defs::{parse_space_file, DefError, SpaceDefFile};

/// Success, or a certificate/check that verified.
pub const EXIT_OK: i32 = 0;
/// A check ran and found violations or uncovered probes.
pub const EXIT_FAILED: i32 = 1;
/// Bad arguments, unreadable or malformed input.
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "compactnet", version, about = "Exact nets and checks for compact metric spaces")]
pub struct Cli {
    /// Definition file with the spaces and gauges to use.
    #[arg(long, global = true, value_name = "FILE")]
    pub defs: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check the metric axioms over every triple of points.
    CheckAxioms(CheckAxioms),
    /// Exact distance between two points.
    Dist { space: String, p: String, q: String },
    /// Build an eps-net certificate.
    Net {
        space: String,
        #[arg(long, value_name = "NUM/DEN")]
        eps: String,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Verify a certificate against the probe universe of support K.
    Verify {
        space: String,
        #[arg(long, value_name = "FILE")]
        cert: PathBuf,
        #[arg(long, value_name = "K", default_value_t = 6)]
        support_bound: usize,
    },
    /// Basic open inside a ball, and a ball inside that open.
    BallWitness {
        space: String,
        #[arg(long, value_name = "P")]
        point: String,
        #[arg(long, value_name = "NUM/DEN")]
        eps: String,
    },
    /// Extract a cluster point from a sequence file by nested balls.
    Limit {
        space: String,
        #[arg(long, value_name = "FILE")]
        seq: PathBuf,
        #[arg(long, value_name = "H")]
        horizon: usize,
        #[arg(long, value_name = "N")]
        levels: usize,
    },
    /// Evaluate the binary-expansion map on an eventually constant sequence.
    MapF { bits: String },
    /// All binary expansions of a dyadic rational in [0, 1].
    Preimage { value: String },
    /// Check a gauge for subadditivity and nonincreasing difference quotients.
    CheckGauge {
        gauge: String,
        /// Grid denominator and step reciprocal.
        #[arg(long, default_value_t = 16)]
        den: i64,
        /// Grid is {k/den : 0 ≤ k ≤ count}.
        #[arg(long, default_value_t = 64)]
        count: i64,
    },
}

#[derive(Args, Debug)]
pub struct CheckAxioms {
    pub space: String,
    /// Check every point (default; finite spaces only).
    #[arg(long, conflicts_with = "probes")]
    pub exhaustive: bool,
    /// Check only the points listed in FILE, one per line.
    #[arg(long, value_name = "FILE")]
    pub probes: Option<PathBuf>,
}

/// An error reported on stderr, with its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_USAGE,
        message: message.into(),
    }
}

impl From<DefError> for Failure {
    fn from(e: DefError) -> Self {
        usage(e.to_string())
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK {
                out.write_all(text.as_bytes())
            } else {
                err.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match execute(&cli, out) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))
}

pub fn load_defs(path: Option<&Path>) -> Result<SpaceDefFile, Failure> {
    match path {
        None => Ok(SpaceDefFile::default()),
        Some(p) => parse_space_file(&read(p)?).map_err(|e| usage(format!("{}:{e}", p.display()))),
    }
}

fn space(defs: &SpaceDefFile, name: &str) -> Result<SpaceRef, Failure> {
    defs.space(name).ok_or_else(|| usage(format!("unknown space `{name}`")))
}

fn rational(text: &str) -> Result<Rational, Failure> {
    parse_rational(text).map_err(|e| usage(e.to_string()))
}

fn point(s: &Space, text: &str) -> Result<Point, Failure> {
    parse_point(s, text).map_err(|e| usage(e.to_string()))
}

/// Points listed one per line; blank lines and `#` comments are skipped.
fn point_file(s: &Space, path: &Path) -> Result<Vec<Point>, Failure> {
    let text = read(path)?;
    let mut pts = Vec::new();
    for (k, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let p = parse_point(s, line).map_err(|e| usage(format!("{}:{}: {e}", path.display(), k + 1)))?;
        pts.push(p);
    }
    Ok(pts)
}

fn io(e: std::io::Error) -> Failure {
    usage(format!("write failed: {e}"))
}

fn write_report(out: &mut dyn Write, s: &Space, report: &AxiomReport) -> Result<(), Failure> {
    writeln!(out, "checked {}", report.triples_checked).map_err(io)?;
    writeln!(out, "violations {}", report.violations.len()).map_err(io)?;
    for v in &report.violations {
        let witness: Vec<String> = v.witness.iter().map(|p| format_point(s, p)).collect();
        writeln!(out, "{}\t({})\t{} > {}", v.axiom, witness.join(" "), v.lhs, v.rhs).map_err(io)?;
    }
    Ok(())
}

fn execute(cli: &Cli, out: &mut dyn Write) -> Result<i32, Failure> {
    let defs = load_defs(cli.defs.as_deref())?;
    match &cli.command {
        Command::CheckAxioms(c) => {
            let s = space(&defs, &c.space)?;
            let probes = match &c.probes {
                Some(p) => Some(point_file(&s, p)?),
                None => None,
            };
            let sel = match &probes {
                Some(p) => Probes::Points(p),
                None => Probes::Exhaustive,
            };
            let report = s.check_axioms(sel).map_err(|e| usage(e.to_string()))?;
            write_report(out, &s, &report)?;
            Ok(if report.is_clean() { EXIT_OK } else { EXIT_FAILED })
        }
        Command::Dist { space: name, p, q } => {
            let s = space(&defs, name)?;
            let d = s
                .distance(&point(&s, p)?, &point(&s, q)?)
                .map_err(|e| usage(e.to_string()))?;
            writeln!(out, "{d}").map_err(io)?;
            Ok(EXIT_OK)
        }
        Command::Net { space: name, eps, out: path } => {
            let s = space(&defs, name)?;
            let eps = rational(eps)?;
            let cert = net_of(&s, &eps).map_err(|e| usage(e.to_string()))?;
            let text = cert.to_text(&s);
            match path {
                Some(p) => {
                    fs::write(p, &text).map_err(|e| usage(format!("cannot write {}: {e}", p.display())))?;
                    let depth = net_depth(&s, &eps).map(|d| format!(" at depth {d}")).unwrap_or_default();
                    writeln!(out, "{} points{depth} written to {}", cert.points.len(), p.display()).map_err(io)?;
                }
                None => out.write_all(text.as_bytes()).map_err(io)?,
            }
            Ok(EXIT_OK)
        }
        Command::Verify {
            space: name,
            cert,
            support_bound,
        } => {
            let s = space(&defs, name)?;
            let cert = NetCertificate::parse(&read(cert)?, &s).map_err(|e| usage(e.to_string()))?;
            let probes = probe_universe(&s, *support_bound).map_err(|e| usage(e.to_string()))?;
            let report = verify_coverage(&s, &cert, &probes).map_err(|e| usage(e.to_string()))?;
            writeln!(out, "probes {}", report.probes_checked).map_err(io)?;
            writeln!(out, "uncovered {}", report.uncovered.len()).map_err(io)?;
            for u in &report.uncovered {
                let nearest = u.nearest.as_ref().map(|r| r.to_string()).unwrap_or_else(|| "none".into());
                writeln!(out, "{}\tnearest {nearest}", format_point(&s, &u.probe)).map_err(io)?;
            }
            Ok(if report.is_covered() { EXIT_OK } else { EXIT_FAILED })
        }
        Command::BallWitness { space: name, point: p, eps } => {
            let s = space(&defs, name)?;
            let cp = s
                .as_countable_product()
                .ok_or_else(|| usage(format!("`{name}` is not a countable product")))?;
            let x = match point(&s, p)? {
                Point::Sequence(x) => x,
                _ => unreachable!("countable product points are sequences"),
            };
            let eps = rational(eps)?;
            let v = cp.ball_to_open(&x, &eps).map_err(|e| usage(e.to_string()))?;
            writeln!(out, "depth {}", v.depth).map_err(io)?;
            writeln!(out, "budget {}", v.budget).map_err(io)?;
            writeln!(out, "radius {}", cp.open_to_ball(&v)).map_err(io)?;
            Ok(EXIT_OK)
        }
        Command::Limit {
            space: name,
            seq,
            horizon,
            levels,
        } => {
            let s = space(&defs, name)?;
            let terms = point_file(&s, seq)?;
            if terms.len() < *horizon {
                return Err(usage(format!(
                    "{} holds {} terms, fewer than the horizon {horizon}",
                    seq.display(),
                    terms.len()
                )));
            }
            let c = bw_extract(&s, |k| terms[k - 1].clone(), *horizon, *levels).map_err(|e| usage(e.to_string()))?;
            writeln!(out, "point {}", format_point(&s, &c.point)).map_err(io)?;
            writeln!(out, "eps {}", c.eps).map_err(io)?;
            writeln!(out, "support {}", c.support_count).map_err(io)?;
            for (n, (y, sup)) in c.chain.iter().zip(&c.level_support).enumerate() {
                writeln!(out, "level {} {} support {sup}", n + 1, format_point(&s, y)).map_err(io)?;
            }
            Ok(EXIT_OK)
        }
        Command::MapF { bits } => {
            let x = BinarySeq::parse(bits).map_err(|e| usage(e.to_string()))?;
            writeln!(out, "{}", f_eval(&x).value()).map_err(io)?;
            Ok(EXIT_OK)
        }
        Command::Preimage { value } => {
            let q = Dyadic::new(rational(value)?).map_err(|e| usage(e.to_string()))?;
            for x in f_preimages(&q) {
                writeln!(out, "{x}").map_err(io)?;
            }
            Ok(EXIT_OK)
        }
        Command::CheckGauge { gauge, den, count } => {
            let g = defs
                .gauge(gauge)
                .cloned()
                .or_else(|| builtin_gauge(gauge))
                .ok_or_else(|| usage(format!("unknown gauge `{gauge}`")))?;
            if *den <= 0 || *count < 0 {
                return Err(usage("--den must be positive and --count non-negative"));
            }
            let grid = uniform_grid(*den, *count);
            let step = Rational::new(1.into(), (*den).into());
            let sub = check_subadditivity(&g, &grid).map_err(|e| usage(e.to_string()))?;
            let der = check_derivative_nonincreasing(&g, &grid, &step).map_err(|e| usage(e.to_string()))?;
            let real = Space::interval("grid", Rational::from_integer(0.into()), Rational::from_integer(1.into()))
                .map_err(|e| usage(e.to_string()))?;
            writeln!(out, "subadditivity").map_err(io)?;
            write_report(out, &real, &sub)?;
            writeln!(out, "derivative").map_err(io)?;
            write_report(out, &real, &der)?;
            Ok(if sub.is_clean() && der.is_clean() { EXIT_OK } else { EXIT_FAILED })
        }
    }
}

/// `cap` is `min(t, 1)`; `bend` is `t/(1 + t)` with injectivity radius 1.
fn builtin_gauge(name: &str) -> Option<compactnet::Gauge> {
    let one = Rational::from_integer(1.into());
    match name {
        "cap" => compactnet::Gauge::cap(one).ok(),
        "bend" => compactnet::Gauge::rational_bend(one).ok(),
        _ => None,
    }
}
