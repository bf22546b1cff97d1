use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use photonz::PhaseMode;
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(
    name = "photonz",
    version,
    about = "Photon statistics from conjugate homodyne detection"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate a source and write quadrature and z records.
    Simulate(SimulateArgs),
    /// Calibrate raw quadratures against a vacuum capture.
    Ingest(IngestArgs),
    /// Reconstruct p(n) by expectation maximization.
    Reconstruct(ReconstructArgs),
    /// Moment estimates: mean photon number, variance and g2(0).
    Moments(MomentsArgs),
    /// Efficiency, dark count and their ratio versus click threshold.
    SpdCurve(SpdCurveArgs),
    /// Compare per-port and input-port loss models.
    Equivalence(EquivalenceArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    Fock,
    Coherent,
    Thermal,
}

impl Source {
    pub fn name(self) -> &'static str {
        match self {
            Source::Fock => "fock",
            Source::Coherent => "coherent",
            Source::Thermal => "thermal",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct SourceArgs {
    #[arg(long, value_enum)]
    pub source: Source,
    /// Mean photon number of a coherent or thermal source.
    #[arg(long)]
    pub mean_photons: Option<f64>,
    /// Photon number of a Fock source.
    #[arg(long)]
    pub fock_n: Option<usize>,
    /// Signal phase relative to the local oscillator: `random` or a value in radians.
    #[arg(long, default_value = "random", value_parser = parse_phase)]
    pub phase: PhaseMode,
}

#[derive(Debug, Args)]
pub struct DetectorArgs {
    /// Detection efficiency in (0, 1].
    #[arg(long, default_value_t = 1.0)]
    pub eta: f64,
    /// Additive noise variance on x3.
    #[arg(long, default_value_t = 0.0)]
    pub sigma2_x: f64,
    /// Additive noise variance on p4.
    #[arg(long, default_value_t = 0.0)]
    pub sigma2_p: f64,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[command(flatten)]
    pub detector: DetectorArgs,
    #[arg(long, default_value_t = 32768)]
    pub count: usize,
    #[arg(long, env = "PHOTONZ_SEED")]
    pub seed: u64,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    /// Raw quadrature CSV.
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Signal-blocked vacuum capture.
    #[arg(long)]
    pub calib: PathBuf,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ReconstructArgs {
    /// z or quadrature CSV.
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Largest photon number in the mixture; derived from the data when omitted.
    #[arg(long)]
    pub nmax: Option<usize>,
    #[arg(long, default_value_t = photonz::estimation::DEFAULT_MAX_ITERATIONS)]
    pub max_iters: usize,
    /// Stop when the mean log-likelihood gain per iteration drops below this.
    #[arg(long, default_value_t = photonz::estimation::DEFAULT_CONVERGENCE_TOL)]
    pub tol: f64,
    /// Detection efficiency to undo with the inverse Bernoulli transform.
    #[arg(long)]
    pub eta: Option<f64>,
    /// Largest negative entry the inverse transform may clip.
    #[arg(long, default_value_t = 1e-3)]
    pub clip_tol: f64,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct MomentsArgs {
    /// z or quadrature CSV.
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Output file; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SpdCurveArgs {
    #[arg(long, default_value_t = 0.0)]
    pub threshold_min: f64,
    #[arg(long, default_value_t = 10.0)]
    pub threshold_max: f64,
    #[arg(long, default_value_t = 200)]
    pub threshold_points: usize,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Output file; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EquivalenceArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    /// Detection efficiency in (0, 1].
    #[arg(long)]
    pub eta: f64,
    #[arg(long, default_value_t = 100_000)]
    pub count: usize,
    #[arg(long, env = "PHOTONZ_SEED")]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Output file; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn parse_phase(s: &str) -> Result<PhaseMode, String> {
    if s.eq_ignore_ascii_case("random") {
        return Ok(PhaseMode::RandomUniform);
    }
    match s.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(PhaseMode::Fixed(v)),
        _ => Err(format!(
            "expected `random` or a phase in radians, got `{s}`"
        )),
    }
}
