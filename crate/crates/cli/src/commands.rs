//! Subcommand implementations. Library errors pass through unchanged so the
//! exit status can be derived from their kind.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use photonz::io::{
    read_quadrature_file, read_record_file, write_curve, write_file, write_histogram,
    write_quadratures, write_z,
};
use photonz::measurement::{calibrate, CalibrationParams};
use photonz::{
    em_reconstruct, loss_equivalence_report, moment_estimates, sample_quadratures, sample_z,
    spd_curve, to_z, DetectorModel, EMConfig, EMResult, Error, GaussianSourceSpec, InversionReport,
    MomentSummary, PhaseMode, PhotonDistribution,
};
use serde::Serialize;

use crate::cli::{
    DetectorArgs, EquivalenceArgs, Format, IngestArgs, MomentsArgs, ReconstructArgs, SimulateArgs,
    Source, SourceArgs, SpdCurveArgs,
};

pub const QUADRATURE_FILE: &str = "quadratures.csv";
pub const Z_FILE: &str = "z.csv";
pub const PARAMS_FILE: &str = "params.json";
pub const CALIBRATED_FILE: &str = "calibrated_quadratures.csv";
pub const CALIBRATION_FILE: &str = "calibration.json";
pub const EM_RESULT_FILE: &str = "em_result.json";
pub const HISTOGRAM_FILE: &str = "histogram.csv";
pub const CORRECTED_FILE: &str = "corrected.json";
pub const CORRECTED_HISTOGRAM_FILE: &str = "corrected_histogram.csv";

fn invalid(msg: impl Into<String>) -> anyhow::Error {
    Error::InvalidArgument(msg.into()).into()
}

fn required<T: Copy>(value: Option<T>, flag: &str, source: Source) -> Result<T> {
    value.ok_or_else(|| {
        invalid(format!(
            "--{flag} is required for --source {}",
            source.name()
        ))
    })
}

fn gaussian_spec(args: &SourceArgs) -> Result<GaussianSourceSpec> {
    if args.fock_n.is_some() {
        return Err(invalid("--fock-n applies to --source fock only"));
    }
    let mean = required(args.mean_photons, "mean-photons", args.source)?;
    let spec = match args.source {
        Source::Coherent => GaussianSourceSpec::coherent(mean, args.phase)?,
        Source::Thermal => {
            if args.phase != PhaseMode::RandomUniform {
                return Err(invalid("--phase applies to coherent sources only"));
            }
            GaussianSourceSpec::thermal(mean)?
        }
        Source::Fock => return Err(invalid("a Fock source has no Gaussian quadrature model")),
    };
    Ok(spec)
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(Error::from)?;
    text.push('\n');
    fs::write(path, text)
        .map_err(Error::from)
        .with_context(|| format!("writing {}", path.display()))
}

/// Writes to `out`, or to stdout when no path is given.
fn emit(out: Option<&Path>, body: &[u8]) -> Result<()> {
    match out {
        Some(path) => fs::write(path, body)
            .map_err(Error::from)
            .with_context(|| format!("writing {}", path.display())),
        None => {
            let mut stdout = io::stdout().lock();
            stdout
                .write_all(body)
                .and_then(|_| stdout.flush())
                .map_err(Error::from)?;
            Ok(())
        }
    }
}

fn json_bytes<T: Serialize>(value: &T) -> Result<Vec<u8>> {
    let mut bytes = serde_json::to_vec_pretty(value).map_err(Error::from)?;
    bytes.push(b'\n');
    Ok(bytes)
}

fn create_dir(path: &Path) -> Result<()> {
    fs::create_dir_all(path)
        .map_err(Error::from)
        .with_context(|| format!("creating {}", path.display()))
}

fn in_dir(dir: &Path, name: &str) -> PathBuf {
    dir.join(name)
}

#[derive(Serialize)]
struct SimulationParams<'a> {
    source: Source,
    mean_photons: Option<f64>,
    fock_n: Option<usize>,
    phase: Option<PhaseMode>,
    eta: f64,
    sigma2_x: f64,
    sigma2_p: f64,
    /// Mean photon number reaching the detector.
    effective_mean_photons: f64,
    count: usize,
    seed: u64,
    files: Vec<&'a str>,
}

pub fn simulate(args: &SimulateArgs) -> Result<()> {
    let DetectorArgs {
        eta,
        sigma2_x,
        sigma2_p,
    } = args.detector;
    let detector = DetectorModel::new(eta, sigma2_x, sigma2_p)?;
    if args.count == 0 {
        return Err(invalid("--count must be >= 1"));
    }
    let src = &args.source;
    create_dir(&args.out)?;

    let (files, effective_mean, phase) = match src.source {
        Source::Fock => {
            if src.mean_photons.is_some() {
                return Err(invalid("--mean-photons does not apply to --source fock"));
            }
            if sigma2_x != 0.0 || sigma2_p != 0.0 {
                return Err(invalid(
                    "detector noise needs a quadrature model; --source fock produces z only",
                ));
            }
            if src.phase != PhaseMode::RandomUniform {
                return Err(invalid("--phase applies to coherent sources only"));
            }
            let n = required(src.fock_n, "fock-n", src.source)?;
            let dist = PhotonDistribution::fock(n, n)?.bernoulli_transform(eta)?;
            let z = sample_z(&dist, args.count, args.seed)?;
            write_file(&in_dir(&args.out, Z_FILE), |w| write_z(w, &z))?;
            (vec![Z_FILE], dist.mean(), None)
        }
        Source::Coherent | Source::Thermal => {
            let spec = gaussian_spec(src)?;
            let quad = sample_quadratures(&spec, &detector, args.count, args.seed)?;
            write_file(&in_dir(&args.out, QUADRATURE_FILE), |w| {
                write_quadratures(w, &quad)
            })?;
            write_file(&in_dir(&args.out, Z_FILE), |w| write_z(w, &to_z(&quad)))?;
            let phase = (src.source == Source::Coherent).then_some(src.phase);
            (
                vec![QUADRATURE_FILE, Z_FILE],
                eta * spec.mean_photons,
                phase,
            )
        }
    };
    let params = SimulationParams {
        source: src.source,
        mean_photons: src.mean_photons,
        fock_n: src.fock_n,
        phase,
        eta,
        sigma2_x,
        sigma2_p,
        effective_mean_photons: effective_mean,
        count: args.count,
        seed: args.seed,
        files,
    };
    write_json(&in_dir(&args.out, PARAMS_FILE), &params)
}

#[derive(Serialize)]
struct CalibrationRecord<'a> {
    input: &'a Path,
    vacuum: &'a Path,
    calibrated: bool,
    #[serde(flatten)]
    params: CalibrationParams,
}

pub fn ingest(args: &IngestArgs) -> Result<()> {
    let raw = read_quadrature_file(&args.input)
        .with_context(|| format!("reading {}", args.input.display()))?;
    let vacuum = read_quadrature_file(&args.calib)
        .with_context(|| format!("reading {}", args.calib.display()))?;
    let (batch, params) = calibrate(&raw, &vacuum)?;
    create_dir(&args.out)?;
    write_file(&in_dir(&args.out, CALIBRATED_FILE), |w| {
        write_quadratures(w, &batch)
    })?;
    write_file(&in_dir(&args.out, Z_FILE), |w| write_z(w, &to_z(&batch)))?;
    let record = CalibrationRecord {
        input: &args.input,
        vacuum: &args.calib,
        calibrated: batch.calibrated(),
        params,
    };
    write_json(&in_dir(&args.out, CALIBRATION_FILE), &record)
}

#[derive(Serialize)]
struct CorrectedRecord<'a> {
    eta: f64,
    clip_tolerance: f64,
    distribution: &'a PhotonDistribution,
    report: InversionReport,
}

pub fn reconstruct(args: &ReconstructArgs) -> Result<()> {
    if let Some(eta) = args.eta {
        if !(eta > 0.0 && eta <= 1.0) {
            return Err(invalid(format!("--eta must lie in (0, 1], got {eta}")));
        }
    }
    let batch = read_record_file(&args.input)
        .with_context(|| format!("reading {}", args.input.display()))?
        .into_z();
    let n_max = args
        .nmax
        .unwrap_or_else(|| EMConfig::heuristic_n_max(&batch));
    let config = EMConfig {
        max_iterations: args.max_iters,
        convergence_tol: args.tol,
        ..EMConfig::uniform(n_max)
    };
    let result: EMResult = em_reconstruct(&batch, &config)?;
    if !result.converged {
        eprintln!(
            "warning: EM stopped after {} iterations without converging",
            result.iterations
        );
    }
    create_dir(&args.out)?;
    write_json(&in_dir(&args.out, EM_RESULT_FILE), &result)?;
    write_file(&in_dir(&args.out, HISTOGRAM_FILE), |w| {
        write_histogram(w, &result.distribution)
    })?;

    if let Some(eta) = args.eta {
        let (corrected, report) = result
            .distribution
            .inverse_bernoulli_with(eta, args.clip_tol)?;
        let record = CorrectedRecord {
            eta,
            clip_tolerance: args.clip_tol,
            distribution: &corrected,
            report,
        };
        write_json(&in_dir(&args.out, CORRECTED_FILE), &record)?;
        write_file(&in_dir(&args.out, CORRECTED_HISTOGRAM_FILE), |w| {
            write_histogram(w, &corrected)
        })?;
    }
    println!(
        "n_max={n_max} iterations={} converged={} mean_n={:?}",
        result.iterations,
        result.converged,
        result.distribution.mean()
    );
    Ok(())
}

const MOMENTS_HEADER: &str = "mean_n,var_n,g2,mean_z,mean_z2,sample_count,g2_guard";

fn moments_csv(m: &MomentSummary) -> Vec<u8> {
    let g2 = m.g2.map(|g| format!("{g:?}")).unwrap_or_default();
    format!(
        "{MOMENTS_HEADER}\n{:?},{:?},{g2},{:?},{:?},{},{:?}\n",
        m.mean_n, m.var_n, m.mean_z, m.mean_z2, m.sample_count, m.g2_guard
    )
    .into_bytes()
}

pub fn moments(args: &MomentsArgs) -> Result<()> {
    let batch = read_record_file(&args.input)
        .with_context(|| format!("reading {}", args.input.display()))?
        .into_z();
    let summary = moment_estimates(&batch)?;
    let body = match args.format {
        Format::Json => json_bytes(&summary)?,
        Format::Csv => moments_csv(&summary),
    };
    emit(args.out.as_deref(), &body)
}

pub fn spd_curve_cmd(args: &SpdCurveArgs) -> Result<()> {
    let curve = spd_curve(
        args.threshold_min,
        args.threshold_max,
        args.threshold_points,
    )?;
    let body = match args.format {
        Format::Json => json_bytes(&curve)?,
        Format::Csv => {
            let mut buf = Vec::new();
            write_curve(&mut buf, &curve)?;
            buf
        }
    };
    emit(args.out.as_deref(), &body)
}

pub fn equivalence(args: &EquivalenceArgs) -> Result<()> {
    if args.format == Format::Csv {
        return Err(invalid(
            "the equivalence report is nested; use --format json",
        ));
    }
    let spec = gaussian_spec(&args.source)?;
    let report = loss_equivalence_report(&spec, args.eta, args.count, args.seed)?;
    emit(args.out.as_deref(), &json_bytes(&report)?)
}
