use std::process::{Command, Output};

use isocurve_cli::records::{
    ClassifyRecord, Simulation, SpectrumReport, VerifyReport, Wavefunction, SIMULATION_COLUMNS,
};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_isocurve"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = run(args);
    assert_eq!(out.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

const SPHERE: [&str; 6] = ["--lambda", "1", "--alpha", "2", "--k", "1"];
const DISK: [&str; 6] = ["--lambda", "-1", "--alpha", "2", "--k", "1"];

fn with<'a>(cmd: &'a str, model: &[&'a str], extra: &[&'a str]) -> Vec<&'a str> {
    let mut v = vec![cmd];
    v.extend_from_slice(model);
    v.extend_from_slice(extra);
    v
}

#[test]
fn zero_curvature_is_a_usage_error() {
    let out = run(&["classify", "--lambda", "0", "--alpha", "2", "--k", "1", "--E", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("lambda != 0"));
}

#[test]
fn exit_codes() {
    // forbidden energy
    assert_eq!(run(&with("simulate", &SPHERE, &["--J", "1", "--E", "1.75"])).status.code(), Some(2));
    // missing energy, unknown flag, conflicting E and C
    assert_eq!(run(&with("classify", &SPHERE, &[])).status.code(), Some(2));
    assert_eq!(run(&with("spectrum", &SPHERE, &["--nope"])).status.code(), Some(2));
    assert_eq!(run(&with("classify", &SPHERE, &["--E", "1", "--C", "2"])).status.code(), Some(2));
    // level past the bound, radius outside the disk
    assert_eq!(run(&with("wavefunction", &SPHERE, &["--m", "1"])).status.code(), Some(2));
    assert_eq!(run(&with("wavefunction", &DISK, &["--r-max", "1.5"])).status.code(), Some(2));
    // negative alpha
    assert_eq!(run(&["spectrum", "--lambda", "1", "--alpha", "-2", "--k", "1"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "--inject-energy-perturbation", "1e-3"]).status.code(), Some(1));
    assert_eq!(run(&["verify"]).status.code(), Some(0));
}

#[test]
fn every_subcommand_is_deterministic() {
    let cases = [
        with("classify", &SPHERE, &["--J", "1", "--E", "1.9", "--format", "csv"]),
        with("simulate", &SPHERE, &["--J", "1", "--E", "1.9", "--samples", "100"]),
        with("simulate", &DISK, &["--J", "0.5", "--C", "10", "--format", "json", "--samples", "50"]),
        with("spectrum", &DISK, &["--format", "csv"]),
        with("wavefunction", &DISK, &["--nr", "2", "--m", "-1", "--format", "json"]),
        vec!["verify", "--lambda", "-1", "--alpha", "3", "--k", "0.5", "--grid-points", "2000"],
    ];
    for args in &cases {
        assert_eq!(stdout(args), stdout(args), "{args:?}");
    }
}

#[test]
fn simulate_csv_layout() {
    let text = stdout(&with("simulate", &SPHERE, &["--J", "1", "--E", "3", "--samples", "11"]));
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), SIMULATION_COLUMNS.join(","));
    let rows: Vec<&str> = text.lines().skip(1).filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows.len(), 11);
    for row in &rows {
        let fields: Vec<&str> = row.split(',').collect();
        assert_eq!(fields.len(), 8);
        for f in fields {
            let (mantissa, _) = f.trim_start_matches('-').split_once('e').unwrap();
            assert_eq!(mantissa.len(), 18, "{f}");
            f.parse::<f64>().unwrap();
        }
    }
    assert!(text.lines().any(|l| l.starts_with("# max_abs_r2_diff=")));
    assert!(text.lines().any(|l| l == "# regime=Unbounded"));
}

#[test]
fn zero_length_window_gives_one_row() {
    let text = stdout(&with(
        "simulate",
        &DISK,
        &["--J", "1", "--E", "5", "--t-start", "0.3", "--t-end", "0.3"],
    ));
    assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 2);
}

#[test]
fn radial_only_motion_keeps_the_angle() {
    let text = stdout(&with("simulate", &DISK, &["--J", "0", "--E", "5", "--K", "0.25", "--format", "json"]));
    let sim: Simulation = serde_json::from_str(&text).unwrap();
    assert!(sim.rows.iter().all(|r| r.phi == 0.25));
    assert!(sim.metadata.max_abs_r2_diff < 1e-6);
}

#[test]
fn json_records_round_trip() {
    let text = stdout(&with("classify", &SPHERE, &["--J", "1", "--C", "-0.2"]));
    let rec: ClassifyRecord = serde_json::from_str(&text).unwrap();
    assert_eq!(rec.regime, "Bounded");
    assert_eq!(serde_json::to_string_pretty(&rec).unwrap() + "\n", text);

    let text = stdout(&with("spectrum", &DISK, &[]));
    let rep: SpectrumReport = serde_json::from_str(&text).unwrap();
    assert_eq!(serde_json::to_string_pretty(&rep).unwrap() + "\n", text);

    let text = stdout(&with("wavefunction", &SPHERE, &["--samples", "20", "--format", "json"]));
    let wf: Wavefunction = serde_json::from_str(&text).unwrap();
    assert_eq!(wf.rows.len(), 20);
    assert_eq!(serde_json::to_string_pretty(&wf).unwrap() + "\n", text);

    let text = stdout(&["verify"]);
    let rep: VerifyReport = serde_json::from_str(&text).unwrap();
    assert!(rep.passed && rep.failed == 0 && rep.total == rep.checks.len());
}

#[test]
fn spectrum_counts() {
    let rep: SpectrumReport =
        serde_json::from_str(&stdout(&["spectrum", "--lambda", "-1", "--alpha", "2", "--k", "1", "--max-m", "2", "--max-nr", "2"]))
            .unwrap();
    assert_eq!(rep.levels.len(), 15);
    assert!(rep.bound.is_none());
    assert!(rep.levels.windows(2).all(|w| w[0].energy <= w[1].energy));

    let rep: SpectrumReport =
        serde_json::from_str(&stdout(&with("spectrum", &SPHERE, &["--max-m", "5", "--max-nr", "5"]))).unwrap();
    assert_eq!(rep.levels.len(), 1);
    assert_eq!((rep.levels[0].n_r, rep.levels[0].m), (0, 0));
    assert!((rep.levels[0].energy - (17f64.sqrt() - 2.0)).abs() < 1e-12);

    // nothing below the bound: empty set, still a success
    let rep: SpectrumReport =
        serde_json::from_str(&stdout(&["spectrum", "--lambda", "1", "--alpha", "0.5", "--k", "1"])).unwrap();
    assert!(rep.levels.is_empty());
    assert!(rep.note.contains("excludes all"));
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(
        &cfg,
        "sector = \"classical\"\n[model]\nlambda = 1.0\nalpha = 2.0\nk = 1.0\n[classical]\nJ = 1.0\nE = 1.9\n",
    )
    .unwrap();
    let path = cfg.to_str().unwrap();
    let from_file: ClassifyRecord = serde_json::from_str(&stdout(&["classify", "--config", path])).unwrap();
    assert_eq!(from_file.energy, 1.9);
    assert_eq!(from_file.regime, "Bounded");

    let overridden: ClassifyRecord =
        serde_json::from_str(&stdout(&["classify", "--config", path, "--E", "3"])).unwrap();
    assert_eq!(overridden.energy, 3.0);
    assert_eq!(overridden.regime, "Unbounded");
    assert_eq!(overridden.j, 1.0);

    // a classical file cannot drive a quantum command
    assert_eq!(run(&["spectrum", "--config", path]).status.code(), Some(2));
    std::fs::write(&cfg, "[model]\nlambda = 1.0\ntypo = 1\n").unwrap();
    assert_eq!(run(&["classify", "--config", path]).status.code(), Some(2));
}

#[test]
fn output_file_matches_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("wf.csv");
    let args = with("wavefunction", &DISK, &["--nr", "1", "--samples", "30"]);
    let mut to_file = args.clone();
    to_file.extend(["--out", out.to_str().unwrap()]);
    assert!(stdout(&to_file).is_empty());
    assert_eq!(std::fs::read_to_string(&out).unwrap(), stdout(&args));
}

#[test]
fn verify_csv_reports_each_check() {
    let text = stdout(&["verify", "--format", "csv", "--lambda", "-1", "--alpha", "1.4142135623730951", "--k", "1"]);
    let mut reader = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
    let rows: Vec<csv::StringRecord> = reader.records().map(|r| r.unwrap()).collect();
    assert!(rows.len() > 20);
    assert!(rows.iter().all(|r| &r[4] == "true"));
}
