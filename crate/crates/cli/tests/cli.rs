use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use photonz::io::{read_curve, read_histogram, read_quadratures, read_z, write_quadratures};
use photonz::{EMResult, MomentSummary, PhotonDistribution, QuadratureBatch};
use serde_json::Value;
use tempfile::TempDir;

fn photonz(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_photonz"))
        .args(args)
        .env_remove("PHOTONZ_SEED")
        .output()
        .expect("spawn photonz")
}

fn ok(args: &[&str]) -> Output {
    let out = photonz(args);
    assert!(
        out.status.success(),
        "photonz {args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn code(args: &[&str]) -> i32 {
    photonz(args).status.code().expect("exit code")
}

fn path(dir: &TempDir, name: &str) -> String {
    dir.path().join(name).to_string_lossy().into_owned()
}

fn read_json<T: serde::de::DeserializeOwned>(p: impl AsRef<Path>) -> T {
    serde_json::from_str(&fs::read_to_string(p).unwrap()).unwrap()
}

fn tv(a: &PhotonDistribution, b: &PhotonDistribution) -> f64 {
    let at = |v: &[f64], i: usize| v.get(i).copied().unwrap_or(0.0);
    let len = a.probs().len().max(b.probs().len());
    0.5 * (0..len)
        .map(|i| (at(a.probs(), i) - at(b.probs(), i)).abs())
        .sum::<f64>()
}

fn simulate_coherent(dir: &TempDir, name: &str, mu: &str, count: &str, seed: &str) -> String {
    let out = path(dir, name);
    ok(&[
        "simulate",
        "--source",
        "coherent",
        "--mean-photons",
        mu,
        "--count",
        count,
        "--seed",
        seed,
        "--out",
        &out,
    ]);
    out
}

#[test]
fn vacuum_moments_flag_g2_as_undefined() {
    let dir = TempDir::new().unwrap();
    let vac = simulate_coherent(&dir, "vac", "0", "10000", "3");
    let out = ok(&["moments", "--in", &format!("{vac}/z.csv")]);
    let json: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(json["g2"].is_null());
    assert!((json["mean_n"].as_f64().unwrap()).abs() < 0.05);
}

#[test]
fn self_calibrated_round_trip_recovers_mean() {
    let dir = TempDir::new().unwrap();
    let sig = simulate_coherent(&dir, "sig", "2", "20000", "11");
    let vac = simulate_coherent(&dir, "vac", "0", "200000", "12");
    let cal = path(&dir, "cal");
    ok(&[
        "ingest",
        "--in",
        &format!("{sig}/quadratures.csv"),
        "--calib",
        &format!("{vac}/quadratures.csv"),
        "--out",
        &cal,
    ]);
    let record: Value = read_json(format!("{cal}/calibration.json"));
    assert_eq!(record["calibrated"], Value::Bool(true));
    let summary: MomentSummary =
        serde_json::from_slice(&ok(&["moments", "--in", &format!("{cal}/z.csv")]).stdout).unwrap();
    // Var z = 2μ + 1 for coherent light.
    let bound = 4.0 * (5.0f64 / 20000.0).sqrt();
    assert!((summary.mean_n - 2.0).abs() <= bound, "{summary:?}");
}

#[test]
fn calibration_removes_gain() {
    let dir = TempDir::new().unwrap();
    let sig = simulate_coherent(&dir, "sig", "4", "5000", "21");
    let vac = simulate_coherent(&dir, "vac", "0", "5000", "22");
    let scale = |src: &str, dst: &str| {
        let batch = read_quadratures(
            fs::File::open(format!("{src}/quadratures.csv")).unwrap(),
            "t",
        )
        .unwrap();
        let s = batch
            .samples()
            .iter()
            .map(|&(x, p)| (250.0 * x + 3.0, p))
            .collect();
        let scaled = QuadratureBatch::new(s, None, false, "adc").unwrap();
        write_quadratures(fs::File::create(dst).unwrap(), &scaled).unwrap();
    };
    let (raw_sig, raw_vac) = (path(&dir, "adc_sig.csv"), path(&dir, "adc_vac.csv"));
    scale(&sig, &raw_sig);
    scale(&vac, &raw_vac);
    let (plain, gained) = (path(&dir, "plain"), path(&dir, "gained"));
    ok(&[
        "ingest",
        "--in",
        &format!("{sig}/quadratures.csv"),
        "--calib",
        &format!("{vac}/quadratures.csv"),
        "--out",
        &plain,
    ]);
    ok(&[
        "ingest", "--in", &raw_sig, "--calib", &raw_vac, "--out", &gained,
    ]);
    let z = |d: &str| read_z(fs::File::open(format!("{d}/z.csv")).unwrap(), "z").unwrap();
    for (a, b) in z(&plain).values().iter().zip(z(&gained).values()) {
        assert!((a - b).abs() <= 1e-9 * a.max(1.0), "{a} vs {b}");
    }
}

#[test]
fn efficiency_correction_restores_source_distribution() {
    let dir = TempDir::new().unwrap();
    let sim = path(&dir, "sim");
    ok(&[
        "simulate",
        "--source",
        "coherent",
        "--mean-photons",
        "5",
        "--eta",
        "0.8",
        "--count",
        "32768",
        "--seed",
        "31",
        "--out",
        &sim,
    ]);
    let params: Value = read_json(format!("{sim}/params.json"));
    assert!((params["effective_mean_photons"].as_f64().unwrap() - 4.0).abs() < 1e-12);
    let rec = path(&dir, "rec");
    ok(&[
        "reconstruct",
        "--in",
        &format!("{sim}/z.csv"),
        "--nmax",
        "20",
        "--eta",
        "0.8",
        "--out",
        &rec,
    ]);
    let corrected: Value = read_json(format!("{rec}/corrected.json"));
    let dist: PhotonDistribution =
        serde_json::from_value(corrected["distribution"].clone()).unwrap();
    let truth = PhotonDistribution::coherent_with_tolerance(5.0, 20, 1e-6).unwrap();
    assert!(tv(&dist, &truth) <= 0.08, "TV {}", tv(&dist, &truth));
    let hist =
        read_histogram(fs::File::open(format!("{rec}/corrected_histogram.csv")).unwrap()).unwrap();
    assert_eq!(hist, dist);
}

#[test]
fn outputs_reparse_losslessly() {
    let dir = TempDir::new().unwrap();
    let sim = simulate_coherent(&dir, "sim", "3", "4000", "41");
    let rec = path(&dir, "rec");
    ok(&[
        "reconstruct",
        "--in",
        &format!("{sim}/quadratures.csv"),
        "--out",
        &rec,
    ]);
    let result: EMResult = read_json(format!("{rec}/em_result.json"));
    let text = serde_json::to_string_pretty(&result).unwrap() + "\n";
    assert_eq!(
        text,
        fs::read_to_string(format!("{rec}/em_result.json")).unwrap()
    );
    let hist = read_histogram(fs::File::open(format!("{rec}/histogram.csv")).unwrap()).unwrap();
    assert_eq!(hist, result.distribution);

    let csv = ok(&[
        "spd-curve",
        "--threshold-min",
        "0",
        "--threshold-max",
        "9",
        "--threshold-points",
        "10",
    ])
    .stdout;
    let curve = read_curve(csv.as_slice()).unwrap();
    assert_eq!(curve.len(), 10);
    assert_eq!(curve[9].ratio, 10.0);
    let json = ok(&["spd-curve", "--threshold-points", "10", "--format", "json"]).stdout;
    let parsed: Vec<photonz::ThresholdCurvePoint> = serde_json::from_slice(&json).unwrap();
    assert_eq!(parsed, photonz::spd_curve(0.0, 10.0, 10).unwrap());
}

#[test]
fn seed_falls_back_to_environment() {
    let dir = TempDir::new().unwrap();
    let flag = simulate_coherent(&dir, "flag", "1", "100", "99");
    let env = path(&dir, "env");
    let out = Command::new(env!("CARGO_BIN_EXE_photonz"))
        .args([
            "simulate",
            "--source",
            "coherent",
            "--mean-photons",
            "1",
            "--count",
            "100",
            "--out",
            &env,
        ])
        .env("PHOTONZ_SEED", "99")
        .output()
        .unwrap();
    assert!(out.status.success());
    assert_eq!(
        fs::read(format!("{flag}/z.csv")).unwrap(),
        fs::read(format!("{env}/z.csv")).unwrap()
    );
}

#[test]
fn equivalence_report_passes() {
    let out = ok(&[
        "equivalence",
        "--source",
        "coherent",
        "--mean-photons",
        "5",
        "--phase",
        "0.4",
        "--eta",
        "0.6",
        "--count",
        "20000",
        "--seed",
        "5",
    ]);
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(report["analytic_discrepancy"].as_f64().unwrap() <= 1e-12);
    assert_eq!(report["ks_x3"]["passed"], Value::Bool(true));
}

#[test]
fn argument_errors_exit_with_2() {
    let dir = TempDir::new().unwrap();
    let sim = simulate_coherent(&dir, "sim", "1", "100", "1");
    let z = format!("{sim}/z.csv");
    let out = path(&dir, "x");
    assert_eq!(
        code(&["reconstruct", "--in", &z, "--eta", "1.5", "--out", &out]),
        2
    );
    assert_eq!(
        code(&[
            "simulate",
            "--source",
            "coherent",
            "--mean-photons",
            "1",
            "--out",
            &out
        ]),
        2
    );
    assert_eq!(
        code(&[
            "simulate",
            "--source",
            "fock",
            "--fock-n",
            "1",
            "--sigma2-x",
            "0.2",
            "--seed",
            "1",
            "--out",
            &out
        ]),
        2
    );
    assert_eq!(
        code(&["simulate", "--source", "thermal", "--seed", "1", "--out", &out]),
        2
    );
    assert_eq!(
        code(&[
            "equivalence",
            "--source",
            "fock",
            "--fock-n",
            "1",
            "--eta",
            "0.5",
            "--seed",
            "1"
        ]),
        2
    );
    assert_eq!(
        code(&["spd-curve", "--threshold-min", "1", "--threshold-max", "1"]),
        2
    );
    assert_eq!(code(&["moments", "--in", &z, "--format", "xml"]), 2);
}

#[test]
fn data_errors_exit_with_3() {
    let dir = TempDir::new().unwrap();
    let bad = path(&dir, "bad.csv");
    fs::write(&bad, "0.5,0.1\n0.2,0.3\n").unwrap();
    let out = photonz(&["moments", "--in", &bad]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 1"));

    let garbled = path(&dir, "garbled.csv");
    fs::write(&garbled, "z\n1.0\n2.0\nabc\n").unwrap();
    let out = photonz(&["moments", "--in", &garbled]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 4"));

    let missing = path(&dir, "missing.csv");
    assert_eq!(code(&["moments", "--in", &missing]), 3);

    let sig = simulate_coherent(&dir, "sig", "1", "2000", "2");
    let short = simulate_coherent(&dir, "short", "0", "999", "3");
    let q = |d: &str| format!("{d}/quadratures.csv");
    assert_eq!(
        code(&[
            "ingest",
            "--in",
            &q(&sig),
            "--calib",
            &q(&short),
            "--out",
            &path(&dir, "c")
        ]),
        3
    );
}

#[test]
fn ill_conditioned_correction_exits_with_4() {
    let dir = TempDir::new().unwrap();
    let sim = path(&dir, "sim");
    ok(&[
        "simulate",
        "--source",
        "thermal",
        "--mean-photons",
        "6",
        "--count",
        "5000",
        "--seed",
        "4",
        "--out",
        &sim,
    ]);
    let args = [
        "reconstruct",
        "--in",
        &format!("{sim}/z.csv"),
        "--eta",
        "0.2",
        "--clip-tol",
        "1e-9",
        "--out",
        &path(&dir, "r"),
    ];
    assert_eq!(code(&args), 4);
}
