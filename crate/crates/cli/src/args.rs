use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use spiral_core::criteria::{ClassKind, Corollary, CriterionId};
use spiral_core::discrepancy::Subject;

#[derive(Debug, Parser)]
#[command(name = "pascal-spiral", version, about = "Pascal distribution series and spirallike coefficient criteria")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Output format; json and csv are stable, human is not.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    pub format: Format,

    /// Write output to this file instead of standard output.
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,

    /// Read angle arguments (--xi) in degrees instead of radians.
    #[arg(long, global = true)]
    pub degrees: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Human,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Coefficients φ_n of the Pascal series for n = 2..N.
    Coeffs(CoeffsArgs),
    /// Closed forms of the coefficient sums against the oracle.
    Identities(IdentitiesArgs),
    /// Evaluate one criterion. Exit status 2 if the direct variant fails.
    Check(CheckArgs),
    /// Evaluate the class functional on a disk grid. Exit status 2 on failure.
    VerifyDisk(VerifyDiskArgs),
    /// Critical q over a parameter grid.
    Scan(ScanArgs),
    /// Printed forms against oracle sums, plus a seeded soundness sweep.
    DiscrepancyReport(ReportArgs),
}

#[derive(Debug, Clone, Copy, Args)]
pub struct ClassArgs {
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub xi: f64,
    #[arg(long, default_value_t = 0.0)]
    pub gamma: f64,
    #[arg(long, default_value_t = 0.0)]
    pub rho: f64,
}

#[derive(Debug, Clone, Copy, Args)]
pub struct RTauArgs {
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub tau_re: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub tau_im: f64,
    #[arg(long, default_value_t = 1.0)]
    pub vartheta: f64,
    #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
    pub delta: f64,
}

#[derive(Debug, Args)]
pub struct CoeffsArgs {
    #[arg(long)]
    pub m: f64,
    #[arg(long)]
    pub q: f64,
    /// Largest index N.
    #[arg(long, default_value_t = 10)]
    pub n: usize,
}

#[derive(Debug, Args)]
pub struct IdentitiesArgs {
    /// Comma-separated values; defaults to 1,1.5,2,3,5,10.
    #[arg(long, value_delimiter = ',')]
    pub m: Vec<f64>,
    /// Comma-separated values; defaults to 0.05,0.1,...,0.9.
    #[arg(long, value_delimiter = ',')]
    pub q: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VariantArg {
    Paper,
    Rederived,
    Direct,
    All,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    /// thm1..thm6 or cor1..cor6 (corollaries fix rho = 0).
    #[arg(long, value_parser = parse_subject)]
    pub criterion: Subject,
    #[arg(long)]
    pub m: f64,
    #[arg(long)]
    pub q: f64,
    #[command(flatten)]
    pub class: ClassArgs,
    #[command(flatten)]
    pub rtau: RTauArgs,
    #[arg(long, value_enum, default_value_t = VariantArg::All)]
    pub variant: VariantArg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SeriesArg {
    Identity,
    /// The Pascal series itself.
    Theta,
    /// Its integral transform.
    Integral,
    /// Its convolution with the extremal R^τ series.
    Lambda,
}

impl SeriesArg {
    pub fn label(&self) -> &'static str {
        match self {
            SeriesArg::Identity => "identity",
            SeriesArg::Theta => "theta",
            SeriesArg::Integral => "integral",
            SeriesArg::Lambda => "lambda",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ClassArg {
    #[value(name = "S", alias = "s")]
    S,
    #[value(name = "K", alias = "k")]
    K,
}

impl From<ClassArg> for ClassKind {
    fn from(c: ClassArg) -> Self {
        match c {
            ClassArg::S => ClassKind::S,
            ClassArg::K => ClassKind::K,
        }
    }
}

#[derive(Debug, Args)]
pub struct VerifyDiskArgs {
    #[arg(long, value_enum, default_value_t = SeriesArg::Theta)]
    pub series: SeriesArg,
    /// Explicit real coefficients a_2,a_3,...; overrides --series.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub coeffs: Option<Vec<f64>>,
    #[arg(long)]
    pub m: Option<f64>,
    #[arg(long)]
    pub q: Option<f64>,
    #[arg(long, value_enum, default_value_t = ClassArg::S)]
    pub class: ClassArg,
    #[command(flatten)]
    pub class_params: ClassArgs,
    #[command(flatten)]
    pub rtau: RTauArgs,
    /// Ring radii, comma-separated.
    #[arg(long, value_delimiter = ',')]
    pub radii: Option<Vec<f64>>,
    /// Points per ring.
    #[arg(long)]
    pub angles: Option<usize>,
    /// A point fails when the functional is below -tol.
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    #[arg(long, value_parser = parse_criterion)]
    pub criterion: CriterionId,
    #[arg(long, value_enum, default_value_t = VariantArg::Direct)]
    pub variant: VariantArg,
    #[arg(long, value_delimiter = ',', default_value = "1")]
    pub m: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "0", allow_negative_numbers = true)]
    pub xi: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "0")]
    pub gamma: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "0")]
    pub rho: Vec<f64>,
    #[command(flatten)]
    pub rtau: RTauArgs,
    /// Bisection stops once |margin| <= tol.
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    #[arg(long, value_delimiter = ',')]
    pub m: Vec<f64>,
    #[arg(long, value_delimiter = ',')]
    pub q: Vec<f64>,
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub xi: Vec<f64>,
    #[arg(long, value_delimiter = ',')]
    pub gamma: Vec<f64>,
    #[arg(long, value_delimiter = ',')]
    pub rho: Vec<f64>,
    #[command(flatten)]
    pub rtau: RTauArgs,
    /// Relative gap above which a printed form is flagged.
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
    /// Seed of the soundness sweep.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Soundness samples per theorem; 0 skips the sweep.
    #[arg(long, default_value_t = 20)]
    pub samples: usize,
}

fn parse_criterion(s: &str) -> Result<CriterionId, String> {
    s.parse().map_err(|e: spiral_core::Error| e.to_string())
}

fn parse_subject(s: &str) -> Result<Subject, String> {
    if let Ok(id) = s.parse::<CriterionId>() {
        return Ok(Subject::Theorem(id));
    }
    s.parse::<Corollary>()
        .map(Subject::Corollary)
        .map_err(|_| format!("unknown criterion {s:?}, expected thm1..thm6 or cor1..cor6"))
}
