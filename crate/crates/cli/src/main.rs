//! `hypkit`: reproducible experiments on hyperbolic space.
//!
//! Every subcommand writes its CSV/JSON files and a `manifest.json` into
//! `--out`. Exit codes: 2 for bad flags, 3 for numerical failure, 4 for
//! coverage or domain errors, 1 for I/O.

mod commands;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

#[derive(Debug)]
pub enum CliError {
    Flags(String),
    Numerical(String),
    Domain(String),
    Io(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Io(_) => 1,
            CliError::Flags(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Domain(_) => 4,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Flags(m) => write!(f, "invalid flags: {m}"),
            CliError::Numerical(m) => write!(f, "numerical failure: {m}"),
            CliError::Domain(m) => write!(f, "{m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl From<hypkit::Error> for CliError {
    fn from(e: hypkit::Error) -> Self {
        use hypkit::Error as E;
        match e {
            E::InvalidParams(_) | E::InvalidBracket(_) => CliError::Flags(e.to_string()),
            e if e.is_domain() => CliError::Domain(e.to_string()),
            e => CliError::Numerical(e.to_string()),
        }
    }
}

/// Decimal literal such as `-0.5`, `3`, `.25` or `1e-10`; nothing else.
fn decimal(s: &str) -> Result<f64, String> {
    let t = s.trim();
    let body = t.strip_prefix(['+', '-']).unwrap_or(t);
    let (mant, exp) = match body.find(['e', 'E']) {
        Some(i) => (&body[..i], Some(&body[i + 1..])),
        None => (body, None),
    };
    let digits = mant.chars().filter(|c| c.is_ascii_digit()).count();
    let dots = mant.chars().filter(|&c| c == '.').count();
    let mant_ok = digits > 0 && dots <= 1 && mant.chars().all(|c| c.is_ascii_digit() || c == '.');
    let exp_ok = exp.is_none_or(|e| {
        let e = e.strip_prefix(['+', '-']).unwrap_or(e);
        !e.is_empty() && e.chars().all(|c| c.is_ascii_digit())
    });
    if !(mant_ok && exp_ok) {
        return Err(format!("`{s}` is not a decimal literal"));
    }
    let v: f64 = t.parse().map_err(|e| format!("`{s}`: {e}"))?;
    if v.is_finite() { Ok(v) } else { Err(format!("`{s}` is out of range")) }
}

#[derive(Parser)]
#[command(name = "hypkit", version, about = "Radial analysis on hyperbolic space")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct Common {
    /// Output directory.
    #[arg(long, default_value = "out")]
    #[serde(skip)]
    pub out: PathBuf,
    /// Worker threads for internal parallelism.
    #[arg(long, default_value_t = 1)]
    pub threads: usize,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct KelvinArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub k: usize,
    #[arg(long, value_parser = decimal)]
    pub lambda: f64,
    /// Largest radius tabulated.
    #[arg(long, value_parser = decimal, default_value = "10")]
    pub rmax: f64,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ShootArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub k: usize,
    /// `u(0)`.
    #[arg(long, value_parser = decimal, default_value = "1")]
    pub alpha: f64,
    /// Comma-separated `(−Δ)^m u(0)` for `m = 1..k−1`.
    #[arg(long, default_value = "", allow_hyphen_values = true)]
    pub beta: String,
    #[arg(long, value_parser = decimal, default_value = "10")]
    pub rmax: f64,
    #[arg(long, value_parser = decimal, default_value = "1e-10")]
    pub tol: f64,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SeparatrixArgs {
    #[arg(long, default_value_t = 6)]
    pub n: usize,
    #[arg(long, default_value_t = 2)]
    pub k: usize,
    #[arg(long, value_parser = decimal, default_value = "1")]
    pub alpha: f64,
    /// `lo,hi` in `Δu(0)`: `lo` must lose positivity, `hi` must blow up.
    #[arg(long, default_value = "-10,0", allow_hyphen_values = true)]
    pub bracket: String,
    #[arg(long, default_value_t = 50)]
    pub iters: usize,
    /// Initial horizon; doubled while a trajectory stays positive.
    #[arg(long, value_parser = decimal, default_value = "40")]
    pub rmax: f64,
    #[arg(long, value_parser = decimal, default_value = "1e-11")]
    pub tol: f64,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct FamilyArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub k: usize,
    #[arg(long, value_parser = decimal, default_value = "1")]
    pub alpha: f64,
    #[arg(long, value_parser = decimal, allow_hyphen_values = true)]
    pub beta: f64,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct GreenArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub k: usize,
    /// `printed`, `harmonic` or `riesz`.
    #[arg(long, default_value = "printed")]
    pub kernel: String,
    /// Largest tabulated distance.
    #[arg(long, value_parser = decimal, default_value = "30")]
    pub rmax: f64,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct HlsArgs {
    #[arg(long)]
    pub n: usize,
    /// Kernel exponent in `(0, n)`.
    #[arg(long, visible_alias = "lam", value_parser = decimal)]
    pub lambda: f64,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct MsphereArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub k: usize,
    #[arg(long, value_parser = decimal, default_value = "1")]
    pub alpha: f64,
    #[arg(long, value_parser = decimal, allow_hyphen_values = true)]
    pub beta: f64,
    /// Distance from the profile centre to the sphere centre.
    #[arg(long, value_parser = decimal, default_value = "0")]
    pub offset: f64,
    /// Largest radius scanned.
    #[arg(long, value_parser = decimal, default_value = "20")]
    pub rmax: f64,
    /// Sign threshold relative to the local size of `u`.
    #[arg(long, value_parser = decimal, default_value = "1e-9")]
    pub tol: f64,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
}

#[derive(Subcommand)]
enum Command {
    /// Tabulate the inversion `φ_λ`, both Jacobian forms and the ODE residual.
    Kelvin(KelvinArgs),
    /// Integrate the radial polyharmonic initial-value problem.
    Shoot(ShootArgs),
    /// Bisect for the separatrix `Δu(0)` at `k = 2`.
    Separatrix(SeparatrixArgs),
    /// Check that the explicit family has constant `Q`.
    VerifyFamily(FamilyArgs),
    /// Tabulate a Green kernel and check positivity, decay, bound and symmetry.
    Green(GreenArgs),
    /// Sharp HLS constant and the inequality on the test family.
    Hls(HlsArgs),
    /// Moving-sphere scan for the explicit family.
    Msphere(MsphereArgs),
}

impl Command {
    fn common(&self) -> &Common {
        match self {
            Command::Kelvin(a) => &a.common,
            Command::Shoot(a) => &a.common,
            Command::Separatrix(a) => &a.common,
            Command::VerifyFamily(a) => &a.common,
            Command::Green(a) => &a.common,
            Command::Hls(a) => &a.common,
            Command::Msphere(a) => &a.common,
        }
    }

    fn name(&self) -> &'static str {
        match self {
            Command::Kelvin(_) => "kelvin",
            Command::Shoot(_) => "shoot",
            Command::Separatrix(_) => "separatrix",
            Command::VerifyFamily(_) => "verify-family",
            Command::Green(_) => "green",
            Command::Hls(_) => "hls",
            Command::Msphere(_) => "msphere",
        }
    }

    fn params(&self) -> serde_json::Value {
        let v = match self {
            Command::Kelvin(a) => serde_json::to_value(a),
            Command::Shoot(a) => serde_json::to_value(a),
            Command::Separatrix(a) => serde_json::to_value(a),
            Command::VerifyFamily(a) => serde_json::to_value(a),
            Command::Green(a) => serde_json::to_value(a),
            Command::Hls(a) => serde_json::to_value(a),
            Command::Msphere(a) => serde_json::to_value(a),
        };
        v.unwrap_or(serde_json::Value::Null)
    }
}

fn execute(cmd: &Command) -> Result<(), CliError> {
    let common = cmd.common();
    if common.threads == 0 {
        return Err(CliError::Flags("--threads must be at least 1".into()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(common.threads)
        .build()
        .map_err(|e| CliError::Numerical(e.to_string()))?;
    let mut run = run::Run::start(&common.out, cmd.name(), cmd.params())?;
    let result = pool.install(|| match cmd {
        Command::Kelvin(a) => commands::kelvin(a, &mut run),
        Command::Shoot(a) => commands::shoot(a, &mut run),
        Command::Separatrix(a) => commands::separatrix(a, &mut run),
        Command::VerifyFamily(a) => commands::verify_family(a, &mut run),
        Command::Green(a) => commands::green(a, &mut run),
        Command::Hls(a) => commands::hls(a, &mut run),
        Command::Msphere(a) => commands::msphere(a, &mut run),
    });
    run.finish(result.as_ref().err())?;
    result
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("hypkit {}: {e}", cli.command.name());
            ExitCode::from(e.code())
        }
    }
}
