use std::fs;
use std::path::Path;
use std::process::Command;

use ossd_sim::cli::{
    cmd_plotdata, cmd_run, gen_scenario, read_scenario, write_scenario, ExperimentConfig,
    GeneratorParams, ScenarioSource, PLOT_UTILIZATION_FILE, PLOT_WAITING_FILE, PROJECTS_FILE,
    REPLICATIONS_FILE, SCENARIO_FILE, SUMMARY_FILE,
};
use ossd_sim::engine::PolicyMode;
use ossd_sim::metrics::mean;
use ossd_sim::Error;

fn config(dir: &Path, replications: u32, modes: Vec<PolicyMode>) -> ExperimentConfig {
    ExperimentConfig {
        source: ScenarioSource::Generate {
            params: GeneratorParams::default(),
            seed: 11,
        },
        replications,
        base_seed: 100,
        modes,
        output_dir: dir.to_path_buf(),
    }
}

fn both() -> Vec<PolicyMode> {
    vec![PolicyMode::Dynamic, PolicyMode::Fifo]
}

fn read(dir: &Path, file: &str) -> String {
    fs::read_to_string(dir.join(file)).unwrap()
}

/// Parsed `replications.csv` rows as (mode, replication, seed, metrics).
fn replication_rows(dir: &Path) -> Vec<(String, u32, u64, [f64; 3])> {
    read(dir, REPLICATIONS_FILE)
        .lines()
        .skip(1)
        .map(|line| {
            let f: Vec<&str> = line.split(',').collect();
            (
                f[0].to_string(),
                f[1].parse().unwrap(),
                f[2].parse().unwrap(),
                [
                    f[3].parse().unwrap(),
                    f[4].parse().unwrap(),
                    f[5].parse().unwrap(),
                ],
            )
        })
        .collect()
}

#[test]
fn run_writes_every_table() {
    let tmp = tempfile::tempdir().unwrap();
    let report = cmd_run(&config(tmp.path(), 3, both())).unwrap();

    for file in [
        SCENARIO_FILE,
        REPLICATIONS_FILE,
        PROJECTS_FILE,
        SUMMARY_FILE,
    ] {
        assert!(tmp.path().join(file).is_file(), "{file} missing");
    }
    let rows = replication_rows(tmp.path());
    assert_eq!(rows.len(), 6);
    // paired seeds: replication r uses base + r under both modes
    for (mode, r, seed, _) in &rows {
        assert_eq!(*seed, 100 + u64::from(*r), "{mode}");
    }
    assert_eq!(read(tmp.path(), PROJECTS_FILE).lines().count(), 1 + 6 * 30);

    let summary = read(tmp.path(), SUMMARY_FILE);
    let lines: Vec<&str> = summary.lines().collect();
    assert_eq!(
        lines[0],
        "row,average_project_waiting_time,average_workforce_utilization,average_project_queue_length"
    );
    assert!(lines[1].starts_with("dynamic,") && lines[2].starts_with("fifo,"));
    assert!(lines[3].starts_with("improvement_pct,"));
    assert_eq!(lines.len(), 4);
    assert!(lines[1].contains('±'));

    let imp = report.improvement.unwrap();
    let fifo = &report.summaries[&PolicyMode::Fifo];
    let dynamic = &report.summaries[&PolicyMode::Dynamic];
    for ((got, f), d) in imp.iter().zip(fifo.means).zip(dynamic.means) {
        assert!((got - 100.0 * (f - d) / f).abs() < 1e-9);
    }

    // the scenario written alongside the results is the one that was simulated
    let written = read_scenario(&tmp.path().join(SCENARIO_FILE)).unwrap();
    assert_eq!(
        written,
        gen_scenario(&GeneratorParams::default(), 11).unwrap()
    );
}

#[test]
fn summary_means_match_the_replication_table() {
    let tmp = tempfile::tempdir().unwrap();
    let report = cmd_run(&config(tmp.path(), 4, both())).unwrap();
    let rows = replication_rows(tmp.path());
    for mode in [PolicyMode::Dynamic, PolicyMode::Fifo] {
        let s = &report.summaries[&mode];
        for metric in 0..3 {
            let column: Vec<f64> = rows
                .iter()
                .filter(|r| r.0 == mode.name())
                .map(|r| r.3[metric])
                .collect();
            assert_eq!(column, report.series(mode, metric));
            assert!((mean(&column) - s.means[metric]).abs() < 1e-12);
            assert!((s.intervals.unwrap()[metric].mean - s.means[metric]).abs() < 1e-12);
        }
    }
}

#[test]
fn single_replication_has_no_interval() {
    let tmp = tempfile::tempdir().unwrap();
    let report = cmd_run(&config(tmp.path(), 1, both())).unwrap();
    assert!(report.summaries.values().all(|s| s.intervals.is_none()));
    let summary = read(tmp.path(), SUMMARY_FILE);
    for line in summary.lines().skip(1).take(2) {
        assert_eq!(line.matches("±NA").count(), 3, "{line}");
    }
}

#[test]
fn single_mode_has_no_improvement_row() {
    let tmp = tempfile::tempdir().unwrap();
    let report = cmd_run(&config(tmp.path(), 2, vec![PolicyMode::Fifo])).unwrap();
    assert!(report.improvement.is_none());
    let summary = read(tmp.path(), SUMMARY_FILE);
    assert_eq!(summary.lines().count(), 2);
    assert!(!summary.contains("improvement_pct"));
}

#[test]
fn zero_replications_are_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    assert!(matches!(
        cmd_run(&config(tmp.path(), 0, both())),
        Err(Error::InvalidParameter(_))
    ));
}

#[test]
fn runs_are_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    cmd_run(&config(a.path(), 3, both())).unwrap();
    cmd_run(&config(b.path(), 3, both())).unwrap();
    for file in [
        SCENARIO_FILE,
        REPLICATIONS_FILE,
        PROJECTS_FILE,
        SUMMARY_FILE,
    ] {
        assert_eq!(
            fs::read(a.path().join(file)).unwrap(),
            fs::read(b.path().join(file)).unwrap(),
            "{file}"
        );
    }
}

#[test]
fn plot_data_copies_paired_values() {
    let run_dir = tempfile::tempdir().unwrap();
    let out = tempfile::tempdir().unwrap();
    cmd_run(&config(run_dir.path(), 10, both())).unwrap();
    let written = cmd_plotdata(run_dir.path(), out.path()).unwrap();
    assert_eq!(written.len(), 2);

    let raw = read(run_dir.path(), REPLICATIONS_FILE);
    let raw: Vec<Vec<&str>> = raw
        .lines()
        .skip(1)
        .map(|l| l.split(',').collect())
        .collect();
    let cell = |mode: &str, rep: usize, col: usize| {
        raw.iter()
            .find(|f| f[0] == mode && f[1] == rep.to_string())
            .map(|f| f[col].to_string())
            .unwrap()
    };
    for (file, metric, col) in [
        (PLOT_WAITING_FILE, "avg_waiting_days", 3),
        (PLOT_UTILIZATION_FILE, "avg_utilization", 4),
    ] {
        let text = read(out.path(), file);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(
            lines[0],
            format!("replication,fifo_{metric},dynamic_{metric}")
        );
        assert_eq!(lines.len(), 11);
        for (rep, line) in lines[1..].iter().enumerate() {
            let f: Vec<&str> = line.split(',').collect();
            assert_eq!(f[0], rep.to_string());
            assert_eq!(f[1], cell("fifo", rep, col));
            assert_eq!(f[2], cell("dynamic", rep, col));
        }
    }
}

#[test]
fn plot_data_needs_a_run_directory() {
    let tmp = tempfile::tempdir().unwrap();
    let err = cmd_plotdata(&tmp.path().join("missing"), tmp.path()).unwrap_err();
    assert!(matches!(err, Error::Io { .. }));
    assert!(!err.is_validation());
}

#[test]
fn scenario_files_round_trip() {
    let tmp = tempfile::tempdir().unwrap();
    let path = tmp.path().join("s.json");
    let s = gen_scenario(&GeneratorParams::default(), 3).unwrap();
    write_scenario(&path, &s).unwrap();
    assert_eq!(read_scenario(&path).unwrap(), s);

    let text = fs::read_to_string(&path)
        .unwrap()
        .replace("\"schema_version\": 1", "\"schema_version\": 9");
    fs::write(&path, text).unwrap();
    assert!(matches!(read_scenario(&path), Err(Error::Format { .. })));
}

const BIN: &str = env!("CARGO_BIN_EXE_ossd-sim");

#[test]
fn binary_exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let scenario = tmp.path().join("s.json");
    let status = Command::new(BIN)
        .args(["gen-scenario", "--projects", "5", "--seed", "3", "--out"])
        .arg(&scenario)
        .output()
        .unwrap()
        .status;
    assert_eq!(status.code(), Some(0));

    let out = Command::new(BIN)
        .args(["run", "--replications", "2", "--seed", "7", "--scenario"])
        .arg(&scenario)
        .arg("--out")
        .arg(tmp.path().join("res"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.starts_with("seed=7\n"));
    assert!(stdout.contains("improvement_pct,"));

    let status = Command::new(BIN)
        .args(["plot-data", "--run-dir"])
        .arg(tmp.path().join("res"))
        .output()
        .unwrap()
        .status;
    assert_eq!(status.code(), Some(0));
    assert!(tmp.path().join("res").join(PLOT_WAITING_FILE).is_file());

    // an unschedulable project makes the scenario invalid
    let mut s = read_scenario(&scenario).unwrap();
    s.projects[0].expertise_level = 1e6;
    write_scenario(&scenario, &s).unwrap();
    let out = Command::new(BIN)
        .args(["run", "--scenario"])
        .arg(&scenario)
        .arg("--out")
        .arg(tmp.path().join("bad"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unschedulable"));

    let status = Command::new(BIN)
        .args(["plot-data", "--run-dir"])
        .arg(tmp.path().join("nowhere"))
        .output()
        .unwrap()
        .status;
    assert_eq!(status.code(), Some(2));
}
