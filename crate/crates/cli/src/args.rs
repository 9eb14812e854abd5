use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use multislice::composition::Composition;
use multislice::report::SweepRange;
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(name = "multislice", version, about = "Multislice graphs: spectra, gap certificates, coarsenings and walks")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Text,
    Dot,
    Edgelist,
    Coordinate,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct Global {
    /// Output format; not every command supports every format.
    #[arg(long, global = true, value_enum, default_value = "json")]
    pub format: Format,

    /// Relative tolerance for floating comparisons and eigenvalue clustering.
    #[arg(long, global = true, default_value_t = 1e-8)]
    pub tolerance: f64,

    /// Largest dimension handed to the dense eigensolver.
    #[arg(long = "dense-cap", global = true, default_value_t = 3000, value_parser = positive)]
    pub dense_cap: usize,

    /// Largest slice any command may enumerate.
    #[arg(long, global = true, default_value_t = 1_000_000, value_parser = positive_u64)]
    pub budget: u64,

    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Exact rational certificates (default).
    #[arg(long, global = true, conflicts_with = "float")]
    pub exact: bool,

    /// Floating-point checks only.
    #[arg(long, global = true)]
    pub float: bool,

    /// Write output here instead of stdout.
    #[arg(short, long, global = true)]
    #[serde(skip)]
    pub out: Option<PathBuf>,

    /// Report wall-clock time in the envelope.
    #[arg(long, global = true)]
    pub timing: bool,
}

fn positive(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("must be positive".into()),
        Ok(v) => Ok(v),
        Err(e) => Err(e.to_string()),
    }
}

fn positive_u64(s: &str) -> Result<u64, String> {
    parse_count(s).and_then(|v| if v == 0 { Err("must be positive".into()) } else { Ok(v) })
}

/// Integer counts, also accepting forms like `1e6`.
pub fn parse_count(s: &str) -> Result<u64, String> {
    if let Ok(v) = s.parse::<u64>() {
        return Ok(v);
    }
    match s.parse::<f64>() {
        Ok(v) if v >= 0.0 && v.fract() == 0.0 && v < 1.8e19 => Ok(v as u64),
        _ => Err(format!("{s:?} is not a non-negative integer")),
    }
}

fn composition(s: &str) -> Result<Composition, String> {
    s.parse::<Composition>().map_err(|e| e.to_string())
}

fn sweep(s: &str) -> Result<SweepRange, String> {
    s.parse::<SweepRange>().map_err(|e| e.to_string())
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Cardinality, degree and reduction status of a slice.
    Info {
        #[arg(short = 'k', long = "composition", value_parser = composition)]
        composition: Composition,
    },
    /// Full certification suite for one composition or a sweep.
    Verify(VerifyArgs),
    /// Spectrum of the Laplacian or one of the small operators.
    Spectrum(SpectrumArgs),
    /// Coarsening audit: intertwining, eigenfunction lifting, spectrum containment.
    Coarsen(CoarsenArgs),
    /// Random transposition walk and its relaxation estimate.
    Walk(WalkArgs),
    /// Graph or operator export.
    Export(ExportArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct VerifyArgs {
    #[arg(short = 'k', long = "composition", value_parser = composition, conflicts_with = "sweep", required_unless_present = "sweep")]
    pub composition: Option<Composition>,

    /// `N=a..b` with optional `,r=c..d`.
    #[arg(long, value_parser = sweep)]
    pub sweep: Option<SweepRange>,

    /// Random functions per slice for the Dirichlet-form identities.
    #[arg(long, default_value_t = 10)]
    pub samples: usize,

    /// Slices up to this size get the brute-force check of the K form.
    #[arg(long = "form-budget", default_value_t = 10_000)]
    pub form_budget: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Operator {
    Laplacian,
    P,
    K,
    Mk,
}

#[derive(Debug, Args, Serialize)]
pub struct SpectrumArgs {
    #[arg(short = 'k', long = "composition", value_parser = composition)]
    pub composition: Composition,

    #[arg(long, value_enum, default_value = "laplacian")]
    pub operator: Operator,
}

#[derive(Debug, Args, Serialize)]
pub struct CoarsenArgs {
    /// Fine composition.
    #[arg(long, value_parser = composition, required_unless_present = "sweep")]
    pub from: Option<Composition>,

    /// Coarse composition; a witness map is searched for unless `--map` is given.
    #[arg(long, value_parser = composition, required_unless_present_any = ["sweep", "map"])]
    pub to: Option<Composition>,

    /// Explicit level table, e.g. `0,0,1`.
    #[arg(long, value_delimiter = ',')]
    pub map: Option<Vec<usize>>,

    /// Audit every strict coarsening pair with N in range.
    #[arg(long, value_parser = sweep, conflicts_with_all = ["from", "to", "map"])]
    pub sweep: Option<SweepRange>,

    /// Random coarse functions for the intertwining check.
    #[arg(long, default_value_t = 100)]
    pub samples: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct WalkArgs {
    #[arg(short = 'k', long = "composition", value_parser = composition)]
    pub composition: Composition,

    #[arg(long, default_value = "1000000", value_parser = parse_count)]
    pub steps: u64,

    #[arg(long = "burn-in", default_value = "0", value_parser = parse_count)]
    pub burn_in: u64,

    /// K-space generator of the observable.
    #[arg(long, default_value_t = 0)]
    pub generator: usize,

    /// Coordinate of the observable.
    #[arg(long, default_value_t = 0)]
    pub position: usize,

    #[arg(long = "max-lag", default_value_t = 4)]
    pub max_lag: usize,

    #[arg(long, default_value_t = 20)]
    pub batches: usize,

    #[arg(long, default_value_t = 1)]
    pub chains: usize,

    /// Accepted distance from the target decay, in standard errors.
    #[arg(long, default_value_t = 3.0)]
    pub sigmas: f64,

    /// Also run a chi-square test of the uniform measure with this many
    /// thinned samples.
    #[arg(long = "chi-square", value_parser = parse_count)]
    pub chi_square: Option<u64>,

    /// Thinning stride for the chi-square test.
    #[arg(long, default_value = "10", value_parser = positive_u64)]
    pub stride: u64,

    /// Keep this many leading observable values in the JSON output.
    #[arg(long = "trajectory-limit", default_value_t = 0)]
    pub trajectory_limit: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Target {
    Graph,
    Laplacian,
    P,
    K,
}

#[derive(Debug, Args, Serialize)]
pub struct ExportArgs {
    #[arg(short = 'k', long = "composition", value_parser = composition)]
    pub composition: Composition,

    #[arg(long, value_enum, default_value = "graph")]
    pub what: Target,
}
