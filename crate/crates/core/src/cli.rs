//! Command-line front end. Exit codes: 0 when everything requested passed,
//! 1 when some identity check failed, 2 on usage or input errors.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::identities::{self, CheckReport, Orders, Profile};
use crate::partitions::enumerate_distinct;
use crate::rafts::{compose_traced, enumerate_minimal, enumerate_rafted, RaftedPartition};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "slater-rafts",
    version,
    about = "Raft moves on distinct-part partitions and exact q-series identity checks"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run identity checks and report agreement.
    Verify(VerifyArgs),
    /// List the registered identity names.
    List(ListArgs),
    /// Enumerate partitions from one of the oracles.
    Enumerate(EnumerateArgs),
    /// Decompose a rafted partition into (minimal, even partition) and replay it.
    Trace(TraceArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Identity to run; repeatable.
    #[arg(long = "identity", conflicts_with = "all")]
    pub identities: Vec<String>,
    /// Run every registered identity.
    #[arg(long)]
    pub all: bool,
    /// Truncation order in q (overrides the profile).
    #[arg(long)]
    pub order: Option<usize>,
    /// Truncation order in x for bivariate checks; defaults to the q order.
    #[arg(long)]
    pub x_order: Option<usize>,
    /// Named truncation: quick (30), standard (60) or deep (100).
    #[arg(long, env = "SLATER_RAFTS_PROFILE", default_value = "quick")]
    pub profile: String,
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
    /// Write the report here instead of standard output.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Report 0 ms for every check, making output reproducible byte for byte.
    #[arg(long)]
    pub no_timings: bool,
}

#[derive(Debug, Args)]
pub struct ListArgs {
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct EnumerateArgs {
    /// distinct, <d>-distinct, minimal-rafted or rafted.
    #[arg(long)]
    pub target: String,
    /// Exact weight.
    #[arg(
        long,
        conflicts_with = "max_weight",
        required_unless_present = "max_weight"
    )]
    pub weight: Option<u64>,
    /// Largest weight.
    #[arg(long)]
    pub max_weight: Option<u64>,
    /// Number of designated rafts (required for minimal-rafted).
    #[arg(long)]
    pub k: Option<usize>,
    /// Print `weight,count` CSV instead of the partitions.
    #[arg(long)]
    pub counts: bool,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TraceArgs {
    /// Parts with designated rafts in brackets, e.g. `1,[2,3],5`.
    pub partition: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Target {
    Gap(u32),
    MinimalRafted(usize),
    Rafted(Option<usize>),
}

fn parse_target(args: &EnumerateArgs) -> Result<Target, String> {
    match args.target.as_str() {
        "distinct" => Ok(Target::Gap(1)),
        "minimal-rafted" => match args.k {
            Some(k) if k >= 1 => Ok(Target::MinimalRafted(k)),
            _ => Err("minimal-rafted needs --k of at least 1".into()),
        },
        "rafted" => Ok(Target::Rafted(args.k)),
        t => t
            .strip_suffix("-distinct")
            .and_then(|d| d.parse::<u32>().ok())
            .filter(|&d| d >= 1)
            .map(Target::Gap)
            .ok_or_else(|| format!("unknown target {t:?}")),
    }
}

/// Parses `args` and runs the command, writing to `out` and `err`.
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
            let _ = if e.use_stderr() {
                write!(err, "{text}")
            } else {
                write!(out, "{text}")
            };
            return code;
        }
    };
    let result = match cli.command {
        Command::Verify(a) => cmd_verify(&a, out),
        Command::List(a) => cmd_list(&a, out),
        Command::Enumerate(a) => cmd_enumerate(&a, out),
        Command::Trace(a) => cmd_trace(&a, out),
    };
    match result {
        Ok(code) => code,
        Err(CliError::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_USAGE
        }
        Err(CliError::Io(e)) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_USAGE
        }
    }
}

enum CliError {
    Usage(String),
    Io(io::Error),
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e)
    }
}

fn with_output(
    path: &Option<PathBuf>,
    out: &mut dyn Write,
    body: impl FnOnce(&mut dyn Write) -> io::Result<()>,
) -> Result<(), CliError> {
    match path {
        Some(p) => {
            let mut f = io::BufWriter::new(File::create(p)?);
            body(&mut f)?;
            f.flush()?;
        }
        None => body(out)?,
    }
    Ok(())
}

fn cmd_verify(args: &VerifyArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let checks = if args.all {
        identities::registry()
    } else if args.identities.is_empty() {
        return Err(CliError::Usage("pass --identity <NAME> or --all".into()));
    } else {
        identities::select(&args.identities).map_err(|e| CliError::Usage(e.to_string()))?
    };
    let order = match args.order {
        Some(n) => n,
        None => args
            .profile
            .parse::<Profile>()
            .map_err(|e| CliError::Usage(e.to_string()))?
            .order(),
    };
    let orders = Orders {
        q: order,
        x: args.x_order.unwrap_or(order),
    };
    let mut reports = identities::run_all(&checks, orders);
    if args.no_timings {
        reports.iter_mut().for_each(|r| r.millis = 0);
    }
    with_output(&args.output, out, |w| {
        render_reports(&reports, args.format, w)
    })?;
    Ok(if identities::all_passed(&reports) {
        EXIT_OK
    } else {
        EXIT_FAILED
    })
}

pub fn render_reports(
    reports: &[CheckReport],
    format: Format,
    w: &mut dyn Write,
) -> io::Result<()> {
    match format {
        Format::Json => {
            serde_json::to_writer_pretty(&mut *w, reports)?;
            writeln!(w)
        }
        Format::Csv => {
            writeln!(w, "name,passed,first_diff_q,first_diff_x")?;
            for r in reports {
                let (q, x) = match &r.first_diff {
                    Some(d) => (
                        d.q.to_string(),
                        d.x.map(|x| x.to_string()).unwrap_or_default(),
                    ),
                    None => (String::new(), String::new()),
                };
                writeln!(w, "{},{},{},{}", r.name, r.passed, q, x)?;
            }
            Ok(())
        }
        Format::Text => {
            for r in reports {
                let orders = match r.x_trunc {
                    Some(x) => format!("q<={} x<={}", r.q_trunc, x),
                    None => format!("q<={}", r.q_trunc),
                };
                let status = if r.passed { "PASS" } else { "FAIL" };
                write!(
                    w,
                    "{status}  {:<24} {orders:<14} {:>6} ms",
                    r.name, r.millis
                )?;
                if let Some(d) = &r.first_diff {
                    let at = match d.x {
                        Some(x) => format!("x^{x} q^{}", d.q),
                        None => format!("q^{}", d.q),
                    };
                    write!(w, "  first difference at {at}: {} vs {}", d.lhs, d.rhs)?;
                }
                writeln!(w)?;
            }
            let passed = reports.iter().filter(|r| r.passed).count();
            writeln!(w, "{passed}/{} checks passed", reports.len())
        }
    }
}

fn cmd_list(args: &ListArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let checks = identities::registry();
    match args.format {
        Format::Text => {
            for c in &checks {
                writeln!(out, "{}", c.name())?;
            }
        }
        Format::Json => {
            let names: Vec<&str> = checks.iter().map(|c| c.name()).collect();
            serde_json::to_writer_pretty(&mut *out, &names).map_err(io::Error::from)?;
            writeln!(out)?;
        }
        Format::Csv => {
            writeln!(out, "name,bivariate")?;
            for c in &checks {
                writeln!(out, "{},{}", c.name(), c.is_bivariate())?;
            }
        }
    }
    Ok(EXIT_OK)
}

fn cmd_enumerate(args: &EnumerateArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let target = parse_target(args).map_err(CliError::Usage)?;
    let (max, exact) = match (args.weight, args.max_weight) {
        (Some(w), _) => (w, Some(w)),
        (None, Some(w)) => (w, None),
        (None, None) => return Err(CliError::Usage("pass --weight or --max-weight".into())),
    };
    let items: Vec<RaftedPartition> = match target {
        Target::Gap(d) => enumerate_distinct(max)
            .into_iter()
            .filter(|p| p.is_d_distinct(d))
            .map(RaftedPartition::undesignated)
            .collect(),
        Target::MinimalRafted(k) => enumerate_minimal(k, max),
        Target::Rafted(k) => enumerate_rafted(k, max),
    };
    let items: Vec<RaftedPartition> = items
        .into_iter()
        .filter(|rp| exact.is_none_or(|w| rp.weight() == w))
        .collect();
    with_output(&args.output, out, |w| {
        if args.counts {
            writeln!(w, "weight,count")?;
            let lo = exact.unwrap_or(0);
            for weight in lo..=max {
                let n = items.iter().filter(|rp| rp.weight() == weight).count();
                writeln!(w, "{weight},{n}")?;
            }
        } else {
            for rp in &items {
                writeln!(w, "{rp}")?;
            }
        }
        Ok(())
    })?;
    Ok(EXIT_OK)
}

fn cmd_trace(args: &TraceArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let rp: RaftedPartition = args
        .partition
        .parse()
        .map_err(|e: crate::rafts::RaftError| CliError::Usage(e.to_string()))?;
    writeln!(out, "input: {rp}")?;
    let (beta, eta, moves) = rp.decompose_traced();
    for m in &moves {
        writeln!(out, "{m}")?;
    }
    writeln!(out, "beta: {beta}")?;
    writeln!(out, "eta: {eta}")?;
    let (back, replay) = compose_traced(&beta, &eta).map_err(|e| CliError::Usage(e.to_string()))?;
    for m in &replay {
        writeln!(out, "{m}")?;
    }
    let ok = back == rp;
    writeln!(out, "roundtrip: {}", if ok { "ok" } else { "MISMATCH" })?;
    Ok(if ok { EXIT_OK } else { EXIT_FAILED })
}
