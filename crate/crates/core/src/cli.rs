//! Command-line front end. Exit codes: 0 success, 1 I/O or unreadable input,
//! 2 domain guard (unsupported size, too large for exact enumeration, ...).

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::asymptotics::{curve_sweep, write_curve_csv};
use crate::beta::{beta_exact, beta_monte_carlo, Method};
use crate::cells::analyze_full;
use crate::constructions::{build, ConstructionKind, ConstructionSpec};
use crate::error::{Error, Result};
use crate::gaussian::{covariance, covariance_diagnostics, gaussian_max_mc};
use crate::io::{load_matrix, save_matrix};
use crate::matrix::normalize_rows;
use crate::sweep::{run_sweep, write_sweep_csv, SweepConfig};

pub const DEFAULT_SAMPLES: u64 = 100_000;
pub const DEFAULT_SEED: u64 = 0;

#[derive(Parser, Debug)]
#[command(name = "bsmlab", version, about = "Bad science matrix laboratory")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Build a matrix and write it in the matrix CSV format.
    Construct(ConstructArgs),
    /// Evaluate β for a matrix file; prints a JSON estimate.
    Beta(BetaArgs),
    /// Cell partition, level-1 weights and bound chain; prints JSON.
    Analyze(AnalyzeArgs),
    /// β over constructions × dimensions, written as CSV.
    Sweep(SweepArgs),
    /// Covariance diagnostics and a Gaussian maximum estimate; prints JSON.
    Gaussian(GaussianArgs),
    /// Asymptotic reference curves as CSV.
    Curves(CurvesArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Exact,
    MonteCarlo,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Method {
        match m {
            MethodArg::Exact => Method::Exact,
            MethodArg::MonteCarlo => Method::MonteCarlo,
        }
    }
}

#[derive(Args, Debug)]
pub struct ConstructArgs {
    #[arg(long)]
    pub kind: ConstructionKind,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct BetaArgs {
    #[arg(long)]
    pub matrix: PathBuf,
    #[arg(long, value_enum, default_value = "exact")]
    pub method: MethodArg,
    #[arg(long, default_value_t = DEFAULT_SAMPLES)]
    pub samples: u64,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct AnalyzeArgs {
    #[arg(long)]
    pub matrix: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    /// Construction kinds, comma separated or repeated.
    #[arg(long = "kind", alias = "kinds", value_delimiter = ',', required = true)]
    pub kinds: Vec<ConstructionKind>,
    /// Dimensions, comma separated or repeated; none gives a header-only CSV.
    #[arg(long = "n", alias = "ns", value_delimiter = ',', num_args = 0..)]
    pub ns: Vec<usize>,
    #[arg(long, value_enum, default_value = "exact")]
    pub method: MethodArg,
    #[arg(long, default_value_t = DEFAULT_SAMPLES)]
    pub samples: u64,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct GaussianArgs {
    #[arg(long)]
    pub matrix: PathBuf,
    #[arg(long, default_value_t = DEFAULT_SAMPLES)]
    pub samples: u64,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Sampled triples for the 3×3 minor ratio when n > 64.
    #[arg(long, default_value_t = 100_000)]
    pub triple_budget: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct CurvesArgs {
    #[arg(long = "n", alias = "ns", value_delimiter = ',', num_args = 0..)]
    pub ns: Vec<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let _ = write!(stderr, "{}", e.render());
            return code;
        }
    };
    match dispatch(cli.command, stdout, stderr) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            if let Error::TooLarge {
                what: "exact enumeration",
                ..
            } = e
            {
                let _ = writeln!(stderr, "hint: use --method monte-carlo for large n");
            }
            if e.is_domain() {
                2
            } else {
                1
            }
        }
    }
}

fn dispatch(cmd: Command, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<()> {
    match cmd {
        Command::Construct(a) => cmd_construct(a, stdout),
        Command::Beta(a) => cmd_beta(a, stdout),
        Command::Analyze(a) => cmd_analyze(a, stdout, stderr),
        Command::Sweep(a) => cmd_sweep(a, stdout),
        Command::Gaussian(a) => cmd_gaussian(a, stdout),
        Command::Curves(a) => cmd_curves(a, stdout),
    }
}

fn emit_json(value: &impl Serialize, out: Option<&Path>, stdout: &mut dyn Write) -> Result<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    match out {
        Some(p) => fs::write(p, format!("{text}\n"))?,
        None => writeln!(stdout, "{text}")?,
    }
    Ok(())
}

fn cmd_construct(a: ConstructArgs, stdout: &mut dyn Write) -> Result<()> {
    let spec = ConstructionSpec::new(a.kind, a.n, a.seed)?;
    let c = build(&spec)?;
    if let Some(p) = &a.out {
        save_matrix(&c.matrix, p)?;
    }
    let mut info = json!({
        "kind": a.kind.name(),
        "n": a.n,
        "seed": a.seed,
    });
    if let Some(m) = c.hadamard_order {
        info["m"] = json!(m);
        info["recipe"] = json!(c.recipe.as_ref().map(|r| r.to_string()));
        info["flatness_warning"] = json!(c.flatness_warning);
    }
    if let Some(p) = &a.out {
        info["out"] = json!(p.display().to_string());
    } else {
        info["matrix"] = json!(c.matrix.rows().map(|r| r.to_vec()).collect::<Vec<_>>());
    }
    emit_json(&info, None, stdout)
}

fn load_normalized(path: &Path) -> Result<crate::matrix::RowNormalizedMatrix> {
    normalize_rows(&load_matrix(path)?)
}

fn cmd_beta(a: BetaArgs, stdout: &mut dyn Write) -> Result<()> {
    let m = load_normalized(&a.matrix)?;
    let est = match Method::from(a.method) {
        Method::Exact => beta_exact(&m)?,
        Method::MonteCarlo => beta_monte_carlo(&m, a.samples, a.seed)?,
    };
    emit_json(&est, a.out.as_deref(), stdout)
}

#[derive(Serialize)]
struct AnalyzeOutput<'a> {
    n: usize,
    #[serde(flatten)]
    report: &'a crate::cells::AnalysisReport,
    sizes: &'a [u64],
    ties: u64,
    degenerate: u64,
}

fn cmd_analyze(a: AnalyzeArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<()> {
    let m = load_normalized(&a.matrix)?;
    let analysis = analyze_full(&m)?;
    if analysis.cells.ties > 0 {
        writeln!(
            stderr,
            "warning: ties detected: {} (the level-1 analysis assumes a unique maximizing row per vertex; \
             ties were broken toward the smallest row index)",
            analysis.cells.ties
        )?;
    }
    if analysis.cells.degenerate > 0 {
        writeln!(stderr, "warning: degenerate vertices: {}", analysis.cells.degenerate)?;
    }
    let out = AnalyzeOutput {
        n: m.n(),
        report: &analysis.report,
        sizes: &analysis.cells.sizes,
        ties: analysis.cells.ties,
        degenerate: analysis.cells.degenerate,
    };
    emit_json(&out, a.out.as_deref(), stdout)
}

fn cmd_sweep(a: SweepArgs, stdout: &mut dyn Write) -> Result<()> {
    let cfg = SweepConfig {
        kinds: a.kinds,
        ns: a.ns,
        method: a.method.into(),
        samples: a.samples,
        seed: a.seed,
    };
    cfg.validate()?;
    let result = run_sweep(&cfg).and_then(|rows| {
        let file = fs::File::create(&a.out)?;
        write_sweep_csv(&rows, std::io::BufWriter::new(file))?;
        Ok(rows.len())
    });
    match result {
        Ok(rows) => {
            writeln!(
                stdout,
                "{}",
                json!({ "rows": rows, "seed": a.seed, "out": a.out.display().to_string() })
            )?;
            Ok(())
        }
        Err(e) => {
            let _ = fs::remove_file(&a.out);
            Err(e)
        }
    }
}

fn cmd_gaussian(a: GaussianArgs, stdout: &mut dyn Write) -> Result<()> {
    let m = load_normalized(&a.matrix)?;
    let sigma = covariance(&m);
    let diagnostics = covariance_diagnostics(&sigma, a.triple_budget, a.seed)?;
    let estimate = gaussian_max_mc(&sigma, a.samples, a.seed)?;
    let doc = json!({
        "covariance": diagnostics,
        "gaussian_max": estimate,
        // Entry bound input of the CLT: max |A_ij| at row norm √n.
        "max_entry_scaled": m.max_abs_entry() * (m.n() as f64).sqrt(),
    });
    emit_json(&doc, a.out.as_deref(), stdout)
}

fn cmd_curves(a: CurvesArgs, stdout: &mut dyn Write) -> Result<()> {
    let points = curve_sweep(&a.ns)?;
    match &a.out {
        Some(p) => write_curve_csv(&points, std::io::BufWriter::new(fs::File::create(p)?)),
        None => write_curve_csv(&points, stdout),
    }
}
