use std::fs;
use std::path::Path;
use std::process::Command;

use labs_topsis::bench::{read_trace, run_experiment, ExperimentConfig, ExperimentReport};
use labs_topsis::engine::GaParams;
use labs_topsis::operators::{Mode, Variant};
use labs_topsis::Error;

fn small(out: &Path, jobs: usize) -> ExperimentConfig {
    ExperimentConfig {
        length: 16,
        variants: vec![Variant::Rwm, Variant::FbdRw],
        modes: Mode::ALL.to_vec(),
        runs: 4,
        seed: 3,
        ga: GaParams {
            evaluation_budget: 300,
            ..GaParams::default()
        },
        out: out.to_path_buf(),
        jobs,
        ..ExperimentConfig::default()
    }
}

fn snapshot(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files = Vec::new();
    for sub in ["traces", "means", "."] {
        let mut entries: Vec<_> = fs::read_dir(dir.join(sub))
            .unwrap()
            .map(|e| e.unwrap().path())
            .filter(|p| p.is_file())
            .collect();
        entries.sort();
        for p in entries {
            files.push((format!("{sub}/{}", p.file_name().unwrap().to_string_lossy()), fs::read(&p).unwrap()));
        }
    }
    files
}

#[test]
fn outputs_do_not_depend_on_jobs() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let ra = run_experiment(&small(a.path(), 1)).unwrap();
    let rb = run_experiment(&small(b.path(), 2)).unwrap();
    assert_eq!(ra, rb);
    let (sa, sb) = (snapshot(a.path()), snapshot(b.path()));
    assert_eq!(sa.len(), 6 * 4 + 6 + 2);
    assert_eq!(sa, sb);
}

#[test]
fn report_and_traces_are_consistent() {
    let dir = tempfile::tempdir().unwrap();
    let report = run_experiment(&small(dir.path(), 0)).unwrap();
    let text = fs::read_to_string(dir.path().join("report.json")).unwrap();
    assert_eq!(ExperimentReport::from_json(&text).unwrap(), report);
    assert_eq!(report.summary.len(), 6);
    assert_eq!(report.significance.len(), 4);
    assert!(report.significance_for(Variant::Base, Mode::Rate05).is_none());
    assert_eq!(report.config.evaluations_per_generation, 10);

    for mode in Mode::ALL {
        let best = report.best_for(Variant::Rwm, mode).unwrap();
        let mut finals = Vec::new();
        for run in 0..4 {
            let name = format!("rwm__{}__run{run:03}.csv", mode.id());
            let t = read_trace(&dir.path().join("traces").join(name)).unwrap();
            assert_eq!(t.best_energies.len(), 29);
            assert!(t.best_energies.windows(2).all(|w| w[1] <= w[0]));
            assert_eq!(labs_topsis::labs::energy(&t.genome).0, *t.best_energies.last().unwrap());
            finals.push(*t.best_energies.last().unwrap());
        }
        assert_eq!(best.energy, *finals.iter().min().unwrap());
        let mean = finals.iter().sum::<u64>() as f64 / 4.0;
        assert!((report.summary_for(Variant::Rwm, mode).unwrap().mean - mean).abs() < 1e-9);
    }
}

#[test]
fn unwritable_output_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    fs::write(&blocker, "").unwrap();
    let err = run_experiment(&small(&blocker.join("out"), 1)).unwrap_err();
    assert!(matches!(err, Error::Io { .. }), "{err}");
}

fn cli() -> Command {
    Command::new(env!("CARGO_BIN_EXE_labs-bench"))
}

#[test]
fn cli_rejects_unknown_variant() {
    let out = cli().args(["--variant", "rwx"]).output().unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("rwx"));
}

#[test]
fn cli_rejects_unwritable_output() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    fs::write(&blocker, "").unwrap();
    let out = cli()
        .args(["--runs", "1", "--length", "8", "--budget", "100", "--out"])
        .arg(blocker.join("out"))
        .output()
        .unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("I/O error"));
}

#[test]
fn cli_flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("exp.toml");
    fs::write(&cfg, "length = 12\nruns = 9\nvariants = [\"fb\"]\nmodes = [\"single\"]\n[ga]\nevaluation_budget = 100\n").unwrap();
    let out_dir = dir.path().join("res");
    let out = cli()
        .arg("--config")
        .arg(&cfg)
        .args(["--runs", "2", "--variant", "rw,fbd", "--seed", "4", "--out"])
        .arg(&out_dir)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report = ExperimentReport::from_json(&fs::read_to_string(out_dir.join("report.json")).unwrap()).unwrap();
    assert_eq!(report.config.length, 12);
    assert_eq!(report.config.runs, 2);
    assert_eq!(report.config.seed, 4);
    assert_eq!(report.config.variants, vec![Variant::Base, Variant::Rw, Variant::Fbd]);
    assert_eq!(report.config.modes, vec![Mode::Single]);
    assert!(String::from_utf8_lossy(&out.stdout).contains("fbd"));
}
