//! Scenario generation and file I/O, replicated experiments, and result files.
//!
//! Scenario files are pretty-printed JSON carrying a `schema_version`. Project
//! entries hold `id`, `priority`, `arrival_day`, `deadline_day`,
//! `estimated_effort`, `expertise_level`, `duration_days`, `goal` and an
//! optional `source_size`; developer entries hold `id`, `technical`,
//! `experience`, `leadership` and `concurrency_cap`.
//!
//! `cmd_run` writes into its output directory:
//!
//! | file               | header |
//! |--------------------|--------|
//! | `scenario.json`    | the scenario that was simulated |
//! | `replications.csv` | `mode,replication,seed,avg_waiting_days,avg_utilization,avg_queue_length,projects,horizon_days` |
//! | `projects.csv`     | `mode,replication,project_id,arrival_day,start_day,finish_day,team_size` |
//! | `summary.csv`      | `row,average_project_waiting_time,average_workforce_utilization,average_project_queue_length` |
//!
//! Summary rows are one per mode (`mean±half_width`, four decimals, `NA` for
//! the half-width with fewer than two replications) followed by an
//! `improvement_pct` row when both modes ran. Every other number is written
//! with full round-trip precision.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::domain::{
    Developer, Goal, Priority, Project, ProjectStatus, Scenario, SkillVector,
    DEFAULT_CONCURRENCY_CAP, DEFAULT_HORIZON_DAYS,
};
use crate::engine::{run, schedule_arrivals, PolicyMode, RunResult};
use crate::error::{Error, Result};
use crate::metrics::{
    improvement_pct, summarize, IntervalEstimate, ReplicationSummary, DEFAULT_CONFIDENCE,
};

pub const SCENARIO_SCHEMA_VERSION: u32 = 1;

pub const REPLICATIONS_FILE: &str = "replications.csv";
pub const PROJECTS_FILE: &str = "projects.csv";
pub const SUMMARY_FILE: &str = "summary.csv";
pub const SCENARIO_FILE: &str = "scenario.json";
pub const PLOT_WAITING_FILE: &str = "plot_waiting_time.csv";
pub const PLOT_UTILIZATION_FILE: &str = "plot_utilization.csv";

const REPLICATIONS_HEADER: &str =
    "mode,replication,seed,avg_waiting_days,avg_utilization,avg_queue_length,projects,horizon_days";
const PROJECTS_HEADER: &str =
    "mode,replication,project_id,arrival_day,start_day,finish_day,team_size";
const SUMMARY_HEADER: &str =
    "row,average_project_waiting_time,average_workforce_utilization,average_project_queue_length";

/// Parameters of the synthetic scenario generator.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorParams {
    pub n_projects: usize,
    pub n_developers: usize,
    pub duration_min_years: f64,
    pub duration_max_years: f64,
    pub mean_interarrival_days: f64,
    pub horizon_days: f64,
    /// Inclusive integer range.
    pub effort_range: (u32, u32),
    pub expertise_range: (f64, f64),
    /// Deadline = arrival + duration × slack.
    pub deadline_slack_range: (f64, f64),
    pub concurrency_cap: u32,
}

impl Default for GeneratorParams {
    fn default() -> Self {
        GeneratorParams {
            n_projects: 30,
            n_developers: 46,
            duration_min_years: 0.3,
            duration_max_years: 0.7,
            mean_interarrival_days: 30.0,
            horizon_days: DEFAULT_HORIZON_DAYS,
            effort_range: (1, 5),
            expertise_range: (0.5, 2.5),
            deadline_slack_range: (1.5, 3.0),
            concurrency_cap: DEFAULT_CONCURRENCY_CAP,
        }
    }
}

impl GeneratorParams {
    fn check(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidParameter(msg.to_string()));
        if self.n_developers == 0 {
            return bad("developer count must be > 0");
        }
        if !(self.duration_min_years > 0.0 && self.duration_min_years < self.duration_max_years) {
            return bad("duration range must satisfy 0 < min < max");
        }
        if self.mean_interarrival_days.is_nan() || self.mean_interarrival_days <= 0.0 {
            return bad("mean interarrival must be > 0");
        }
        if self.horizon_days.is_nan() || self.horizon_days <= 0.0 {
            return bad("horizon must be > 0");
        }
        if self.effort_range.0 < 1 || self.effort_range.0 > self.effort_range.1 {
            return bad("effort range must satisfy 1 <= min <= max");
        }
        let (e0, e1) = self.expertise_range;
        if !(e0 > 0.0 && e0 <= e1) {
            return bad("expertise range must satisfy 0 < min <= max");
        }
        let (s0, s1) = self.deadline_slack_range;
        if !(s0 > 0.0 && s0 <= s1) {
            return bad("deadline slack range must satisfy 0 < min <= max");
        }
        if self.concurrency_cap < 1 {
            return bad("concurrency cap must be >= 1");
        }
        Ok(())
    }
}

fn uniform<R: Rng>(rng: &mut R, (lo, hi): (f64, f64)) -> f64 {
    if lo == hi {
        lo
    } else {
        rng.gen_range(lo..hi)
    }
}

/// Draws a synthetic scenario. Deterministic per seed.
pub fn gen_scenario(params: &GeneratorParams, seed: u64) -> Result<Scenario> {
    params.check()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let developers: Vec<Developer> = (0..params.n_developers as u32)
        .map(|id| {
            let skills = SkillVector::new(rng.gen(), rng.gen(), rng.gen());
            Developer::new(id, skills).with_cap(params.concurrency_cap)
        })
        .collect();

    let arrivals = schedule_arrivals(&mut rng, params.mean_interarrival_days, params.n_projects)?;
    let projects = arrivals
        .into_iter()
        .enumerate()
        .map(|(i, arrival_day)| {
            let years = uniform(
                &mut rng,
                (params.duration_min_years, params.duration_max_years),
            );
            let duration_days = years * 365.0;
            let priority = Priority::ALL[rng.gen_range(0..3)];
            let slack = uniform(&mut rng, params.deadline_slack_range);
            let effort = rng.gen_range(params.effort_range.0..=params.effort_range.1);
            let expertise_level = uniform(&mut rng, params.expertise_range);
            let goal = Goal::ALL[rng.gen_range(0..2)];
            Project {
                id: i as u32,
                priority,
                arrival_day,
                deadline_day: arrival_day + duration_days * slack,
                estimated_effort: f64::from(effort),
                expertise_level,
                duration_days,
                goal,
                source_size: None,
                status: ProjectStatus::Waiting,
            }
        })
        .collect();

    let mut scenario = Scenario::new(projects, developers);
    scenario.horizon_days = params.horizon_days;
    scenario.mean_interarrival_days = params.mean_interarrival_days;
    Ok(scenario)
}

#[derive(Serialize, Deserialize)]
struct ScenarioFile {
    schema_version: u32,
    #[serde(flatten)]
    scenario: Scenario,
}

pub fn scenario_to_string(scenario: &Scenario) -> String {
    let file = ScenarioFile {
        schema_version: SCENARIO_SCHEMA_VERSION,
        scenario: scenario.clone(),
    };
    let mut s = serde_json::to_string_pretty(&file).expect("scenario serializes");
    s.push('\n');
    s
}

pub fn write_scenario(path: &Path, scenario: &Scenario) -> Result<()> {
    fs::write(path, scenario_to_string(scenario)).map_err(|e| Error::io(path, e))
}

pub fn read_scenario(path: &Path) -> Result<Scenario> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let file: ScenarioFile = serde_json::from_str(&text).map_err(|source| Error::Json {
        path: path.to_path_buf(),
        source,
    })?;
    if file.schema_version != SCENARIO_SCHEMA_VERSION {
        return Err(Error::Format {
            path: path.to_path_buf(),
            message: format!(
                "unsupported schema_version {} (expected {SCENARIO_SCHEMA_VERSION})",
                file.schema_version
            ),
        });
    }
    Ok(file.scenario)
}

#[derive(Debug, Clone)]
pub enum ScenarioSource {
    File(PathBuf),
    Generate { params: GeneratorParams, seed: u64 },
}

impl ScenarioSource {
    pub fn load(&self) -> Result<Scenario> {
        match self {
            ScenarioSource::File(path) => read_scenario(path),
            ScenarioSource::Generate { params, seed } => gen_scenario(params, *seed),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub source: ScenarioSource,
    pub replications: u32,
    /// Replication `r` runs with seed `base_seed + r` under every mode.
    pub base_seed: u64,
    pub modes: Vec<PolicyMode>,
    pub output_dir: PathBuf,
}

impl ExperimentConfig {
    pub fn seed_for(&self, replication: u32) -> u64 {
        self.base_seed.wrapping_add(u64::from(replication))
    }
}

/// Metrics of one (mode, replication) run.
#[derive(Debug, Clone, PartialEq)]
pub struct ReplicationRow {
    pub mode: PolicyMode,
    pub replication: u32,
    pub seed: u64,
    pub summary: ReplicationSummary,
    pub projects: usize,
    pub horizon_days: f64,
}

/// Interval estimates of the three metrics for one mode. `None` when fewer than
/// two replications ran.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeSummary {
    pub means: [f64; 3],
    pub intervals: Option<[IntervalEstimate; 3]>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentReport {
    pub rows: Vec<ReplicationRow>,
    pub summaries: BTreeMap<PolicyMode, ModeSummary>,
    /// Fifo → Dynamic improvement per metric, when both modes ran.
    pub improvement: Option<[f64; 3]>,
}

impl ExperimentReport {
    /// Values of one metric (0 waiting, 1 utilization, 2 queue length) by replication.
    pub fn series(&self, mode: PolicyMode, metric: usize) -> Vec<f64> {
        self.rows
            .iter()
            .filter(|r| r.mode == mode)
            .map(|r| metric_value(&r.summary, metric))
            .collect()
    }
}

fn metric_value(s: &ReplicationSummary, metric: usize) -> f64 {
    match metric {
        0 => s.avg_waiting_days,
        1 => s.avg_utilization,
        2 => s.avg_queue_length,
        _ => panic!("metric index {metric} out of range"),
    }
}

/// Runs every (mode, replication) pair and writes the result files.
pub fn cmd_run(config: &ExperimentConfig) -> Result<ExperimentReport> {
    if config.replications == 0 {
        return Err(Error::InvalidParameter("replications must be >= 1".into()));
    }
    if config.modes.is_empty() {
        return Err(Error::InvalidParameter(
            "at least one mode is required".into(),
        ));
    }
    let scenario = config.source.load()?;
    let mut modes = config.modes.clone();
    modes.sort_by_key(|m| match m {
        PolicyMode::Fifo => 0,
        PolicyMode::Dynamic => 1,
    });
    modes.dedup();

    let mut rows = Vec::new();
    let mut results: Vec<(PolicyMode, u32, RunResult)> = Vec::new();
    for &mode in &modes {
        for r in 0..config.replications {
            let seed = config.seed_for(r);
            let wrap = |source: Error| Error::Replication {
                replication: r,
                mode: mode.to_string(),
                source: Box::new(source),
            };
            let result = run(&scenario, mode, seed).map_err(wrap)?;
            let summary = ReplicationSummary::of(&result).map_err(wrap)?;
            rows.push(ReplicationRow {
                mode,
                replication: r,
                seed,
                summary,
                projects: result.records.len(),
                horizon_days: result.horizon_days,
            });
            results.push((mode, r, result));
        }
    }

    let mut summaries = BTreeMap::new();
    for &mode in &modes {
        let mut means = [0.0; 3];
        let mut intervals = Vec::new();
        for (metric, slot) in means.iter_mut().enumerate() {
            let values: Vec<f64> = rows
                .iter()
                .filter(|r| r.mode == mode)
                .map(|r| metric_value(&r.summary, metric))
                .collect();
            *slot = crate::metrics::mean(&values);
            if values.len() >= 2 {
                intervals.push(summarize(&values, DEFAULT_CONFIDENCE)?);
            }
        }
        let intervals = (intervals.len() == 3).then(|| [intervals[0], intervals[1], intervals[2]]);
        summaries.insert(mode, ModeSummary { means, intervals });
    }

    let improvement = match (
        summaries.get(&PolicyMode::Fifo),
        summaries.get(&PolicyMode::Dynamic),
    ) {
        (Some(fifo), Some(dynamic)) => {
            let mut out = [0.0; 3];
            for (i, slot) in out.iter_mut().enumerate() {
                *slot = improvement_pct(fifo.means[i], dynamic.means[i]).unwrap_or(f64::NAN);
            }
            Some(out)
        }
        _ => None,
    };

    let report = ExperimentReport {
        rows,
        summaries,
        improvement,
    };
    write_outputs(config, &scenario, &report, &results)?;
    Ok(report)
}

fn opt(x: Option<f64>) -> String {
    x.map_or_else(|| "NA".to_string(), |v| v.to_string())
}

fn write_outputs(
    config: &ExperimentConfig,
    scenario: &Scenario,
    report: &ExperimentReport,
    results: &[(PolicyMode, u32, RunResult)],
) -> Result<()> {
    let dir = &config.output_dir;
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    write_scenario(&dir.join(SCENARIO_FILE), scenario)?;

    let mut reps = String::from(REPLICATIONS_HEADER);
    reps.push('\n');
    for r in &report.rows {
        let _ = writeln!(
            reps,
            "{},{},{},{},{},{},{},{}",
            r.mode,
            r.replication,
            r.seed,
            r.summary.avg_waiting_days,
            r.summary.avg_utilization,
            r.summary.avg_queue_length,
            r.projects,
            r.horizon_days
        );
    }
    write_file(&dir.join(REPLICATIONS_FILE), &reps)?;

    let mut projects = String::from(PROJECTS_HEADER);
    projects.push('\n');
    for (mode, r, result) in results {
        for rec in &result.records {
            let _ = writeln!(
                projects,
                "{mode},{r},{},{},{},{},{}",
                rec.id,
                rec.arrival_day,
                opt(rec.start_day),
                opt(rec.finish_day),
                rec.team_size
            );
        }
    }
    write_file(&dir.join(PROJECTS_FILE), &projects)?;

    write_file(&dir.join(SUMMARY_FILE), &summary_table(report))
}

/// Table-style summary: one `mean±half_width` row per mode, then the improvement row.
pub fn summary_table(report: &ExperimentReport) -> String {
    let mut out = String::from(SUMMARY_HEADER);
    out.push('\n');
    for (mode, s) in &report.summaries {
        let cells: Vec<String> = match &s.intervals {
            Some(iv) => iv.iter().map(|e| e.to_string()).collect(),
            None => s.means.iter().map(|m| format!("{m:.4}±NA")).collect(),
        };
        let _ = writeln!(out, "{mode},{}", cells.join(","));
    }
    if let Some(imp) = report.improvement {
        let _ = writeln!(
            out,
            "improvement_pct,{:.4},{:.4},{:.4}",
            imp[0], imp[1], imp[2]
        );
    }
    out
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

/// Writes per-replication paired series (`replication,fifo_*,dynamic_*`) for
/// waiting time and utilization, copied verbatim from `replications.csv`.
pub fn cmd_plotdata(run_dir: &Path, out_dir: &Path) -> Result<Vec<PathBuf>> {
    let path = run_dir.join(REPLICATIONS_FILE);
    let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
    let format_err = |message: String| Error::Format {
        path: path.clone(),
        message,
    };
    let mut lines = text.lines();
    let header: Vec<&str> = lines
        .next()
        .ok_or_else(|| format_err("empty file".into()))?
        .split(',')
        .collect();
    let column = |name: &str| {
        header
            .iter()
            .position(|h| *h == name)
            .ok_or_else(|| format_err(format!("missing column {name}")))
    };
    let (mode_col, rep_col) = (column("mode")?, column("replication")?);
    let metrics = [
        ("avg_waiting_days", PLOT_WAITING_FILE),
        ("avg_utilization", PLOT_UTILIZATION_FILE),
    ];

    // replication -> mode -> row fields
    let mut table: BTreeMap<u32, BTreeMap<String, Vec<String>>> = BTreeMap::new();
    for (n, line) in lines.enumerate() {
        let fields: Vec<String> = line.split(',').map(str::to_string).collect();
        if fields.len() != header.len() {
            return Err(format_err(format!(
                "line {}: expected {} fields",
                n + 2,
                header.len()
            )));
        }
        let rep: u32 = fields[rep_col]
            .parse()
            .map_err(|_| format_err(format!("line {}: bad replication index", n + 2)))?;
        table
            .entry(rep)
            .or_default()
            .insert(fields[mode_col].clone(), fields);
    }
    if table.is_empty() {
        return Err(format_err("no replication rows".into()));
    }

    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let mut written = Vec::new();
    for (metric, file) in metrics {
        let col = column(metric)?;
        let mut out = format!("replication,fifo_{metric},dynamic_{metric}\n");
        for (rep, by_mode) in &table {
            let value = |mode: PolicyMode| {
                by_mode
                    .get(mode.name())
                    .map(|f| f[col].clone())
                    .ok_or_else(|| format_err(format!("replication {rep} has no {mode} row")))
            };
            let _ = writeln!(
                out,
                "{rep},{},{}",
                value(PolicyMode::Fifo)?,
                value(PolicyMode::Dynamic)?
            );
        }
        let target = out_dir.join(file);
        write_file(&target, &out)?;
        written.push(target);
    }
    Ok(written)
}
