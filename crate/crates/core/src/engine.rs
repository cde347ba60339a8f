//! Discrete-time engine coupling the scheduling model with team formation.
//!
//! One call to [`Engine::step_day`] simulates one day, in this order:
//!
//! 1. admit arrivals due by today, then re-run scheduling;
//! 2. finish projects whose finish day has come, release their teams, then
//!    re-run scheduling;
//! 3. integrate the `ProjectToStart` stock over one day at the current rate;
//! 4. for every whole unit released, pop the queue head, size it with SLIM and
//!    select a team; an unstaffable project goes back to the head of the queue,
//!    its unit is refunded and no more projects are started today;
//! 5. record the day's traces;
//! 6. advance the clock.

use std::collections::{BTreeMap, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp};

use crate::assignment::{
    assign, project_headcount, release, select_team, Assignment, SlimParams,
    DEFAULT_EXHAUSTIVE_LIMIT,
};
use crate::domain::{
    validate_scenario, ArrivalProcess, Developer, GoalWeightTable, Project, ProjectId,
    ProjectStatus, Scenario,
};
use crate::error::{Error, Result};
use crate::scheduler::{PolicyWeights, SchedulerState};

/// Identifier of the generator behind every seeded draw.
pub const RNG_ALGORITHM: &str = "chacha8/rand_chacha-0.3/seed_from_u64";

/// Runs stop with [`Error::Livelock`] after this many multiples of the horizon.
pub const TICK_CAP_FACTOR: f64 = 100.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PolicyMode {
    /// Reorder the queue with the scenario's policy weights.
    Dynamic,
    /// Keep arrival order.
    Fifo,
}

impl PolicyMode {
    pub fn name(self) -> &'static str {
        match self {
            PolicyMode::Dynamic => "dynamic",
            PolicyMode::Fifo => "fifo",
        }
    }
}

impl std::str::FromStr for PolicyMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "dynamic" => Ok(PolicyMode::Dynamic),
            "fifo" => Ok(PolicyMode::Fifo),
            other => Err(format!("unknown mode `{other}` (expected dynamic or fifo)")),
        }
    }
}

impl std::fmt::Display for PolicyMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Lifecycle timestamps of one project, in days.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectRecord {
    pub id: ProjectId,
    pub arrival_day: f64,
    pub start_day: Option<f64>,
    pub finish_day: Option<f64>,
    pub team_size: usize,
    /// Position in the global start order.
    pub start_sequence: Option<usize>,
    /// Number of times the project was released from the queue but could not be staffed.
    pub failed_attempts: u32,
}

impl ProjectRecord {
    pub fn waiting_days(&self) -> Option<f64> {
        self.start_day.map(|s| s - self.arrival_day)
    }
}

/// State observed at the end of one simulated day.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DayTrace {
    pub day: u64,
    pub queue_length: usize,
    pub busy_developers: usize,
    /// Σ over developers of held slots.
    pub assigned_slots: usize,
    /// Σ over ongoing projects of team size.
    pub ongoing_team_slots: usize,
    pub max_developer_load: usize,
    pub stock: f64,
    pub schedule_rate: f64,
}

/// Flow accounting of the `ProjectToStart` stock.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct StockLedger {
    /// Σ rate·dt.
    pub inflow: f64,
    /// Whole units crossed, before capping at the queue length.
    pub released: u64,
    /// Units dropped because the queue was shorter, or because popping stopped
    /// after an unstaffable project.
    pub discarded: u64,
    pub refunded: u64,
    pub started: u64,
}

impl StockLedger {
    /// `released + final − initial − refunded − inflow`; zero up to rounding.
    pub fn imbalance(&self, final_stock: f64) -> f64 {
        self.released as f64 + final_stock - self.refunded as f64 - self.inflow
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub mode: PolicyMode,
    pub seed: u64,
    pub rng_algorithm: &'static str,
    pub n_developers: usize,
    /// Sorted by project id.
    pub records: Vec<ProjectRecord>,
    pub traces: Vec<DayTrace>,
    pub horizon_days: f64,
    pub stock: StockLedger,
    pub final_stock: f64,
}

impl RunResult {
    /// Project ids in the order they started.
    pub fn start_order(&self) -> Vec<ProjectId> {
        let mut started: Vec<(usize, ProjectId)> = self
            .records
            .iter()
            .filter_map(|r| r.start_sequence.map(|s| (s, r.id)))
            .collect();
        started.sort_unstable();
        started.into_iter().map(|(_, id)| id).collect()
    }
}

/// Cumulative sums of `n_total` exponential gaps with the given mean.
pub fn schedule_arrivals<R: Rng + ?Sized>(
    rng: &mut R,
    mean_interarrival_days: f64,
    n_total: usize,
) -> Result<Vec<f64>> {
    let exp = Exp::new(1.0 / mean_interarrival_days)
        .map_err(|e| Error::InvalidParameter(format!("interarrival mean: {e}")))?;
    let mut t = 0.0;
    Ok((0..n_total)
        .map(|_| {
            t += exp.sample(rng);
            t
        })
        .collect())
}

/// Simulation state of a single run.
#[derive(Debug, Clone)]
pub struct Engine {
    clock: u64,
    mode: PolicyMode,
    seed: u64,
    policy: PolicyWeights,
    slim: SlimParams,
    goal_weights: GoalWeightTable,
    exhaustive_limit: u64,
    rate_time_unit_days: f64,
    next_start: usize,
    scheduler: SchedulerState,
    developers: Vec<Developer>,
    projects: BTreeMap<ProjectId, Project>,
    pending: VecDeque<(f64, ProjectId)>,
    ongoing: BTreeMap<ProjectId, Assignment>,
    records: BTreeMap<ProjectId, ProjectRecord>,
    traces: Vec<DayTrace>,
    stock: StockLedger,
    tick_cap: u64,
}

impl Engine {
    pub fn new(scenario: &Scenario, mode: PolicyMode, seed: u64) -> Result<Self> {
        let report = validate_scenario(scenario);
        if !report.is_empty() {
            return Err(Error::InvalidScenario(report));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);

        let mut projects: Vec<Project> = scenario.projects.clone();
        if scenario.arrivals == ArrivalProcess::Exponential {
            let days =
                schedule_arrivals(&mut rng, scenario.mean_interarrival_days, projects.len())?;
            for (p, day) in projects.iter_mut().zip(days) {
                let slack = p.deadline_day - p.arrival_day;
                p.arrival_day = day;
                p.deadline_day = day + slack;
            }
            if scenario.truncate_arrivals_at_horizon {
                projects.retain(|p| p.arrival_day <= scenario.horizon_days);
            }
        }

        let mut pending: Vec<(f64, ProjectId)> =
            projects.iter().map(|p| (p.arrival_day, p.id)).collect();
        pending.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));

        let records = projects
            .iter()
            .map(|p| {
                let r = ProjectRecord {
                    id: p.id,
                    arrival_day: p.arrival_day,
                    start_day: None,
                    finish_day: None,
                    team_size: 0,
                    start_sequence: None,
                    failed_attempts: 0,
                };
                (p.id, r)
            })
            .collect();

        let mut developers = scenario.developers.clone();
        developers.sort_by_key(|d| d.id);

        let policy = match mode {
            PolicyMode::Dynamic => scenario.policy,
            PolicyMode::Fifo => PolicyWeights {
                epsilon_days: scenario.policy.epsilon_days,
                ..PolicyWeights::fifo()
            },
        };

        Ok(Engine {
            clock: 0,
            mode,
            seed,
            policy,
            slim: scenario.slim,
            goal_weights: scenario.goal_weights,
            exhaustive_limit: DEFAULT_EXHAUSTIVE_LIMIT,
            rate_time_unit_days: scenario.rate_time_unit_days,
            next_start: 0,
            scheduler: SchedulerState::new(),
            developers,
            projects: projects.into_iter().map(|p| (p.id, p)).collect(),
            pending: pending.into(),
            ongoing: BTreeMap::new(),
            records,
            traces: Vec::new(),
            stock: StockLedger::default(),
            tick_cap: (TICK_CAP_FACTOR * scenario.horizon_days).ceil() as u64,
        })
    }

    pub fn with_exhaustive_limit(mut self, limit: u64) -> Self {
        self.exhaustive_limit = limit;
        self
    }

    pub fn clock(&self) -> u64 {
        self.clock
    }

    pub fn scheduler(&self) -> &SchedulerState {
        &self.scheduler
    }

    pub fn developers(&self) -> &[Developer] {
        &self.developers
    }

    pub fn projects(&self) -> &BTreeMap<ProjectId, Project> {
        &self.projects
    }

    pub fn ongoing(&self) -> &BTreeMap<ProjectId, Assignment> {
        &self.ongoing
    }

    pub fn stock_ledger(&self) -> &StockLedger {
        &self.stock
    }

    pub fn is_finished(&self) -> bool {
        self.projects
            .values()
            .all(|p| p.status == ProjectStatus::Finished)
    }

    /// Recomputes the scheduling rates and reorders the waiting queue.
    /// Leaves the stock untouched.
    pub fn handle_check_scheduling(&mut self) {
        let waiting: Vec<&Project> = self
            .scheduler
            .waiting_queue
            .iter()
            .map(|id| &self.projects[id])
            .collect();
        self.scheduler.update_rates(&waiting, &self.developers);
        self.scheduler.reorder_queue(
            &self.projects,
            self.clock as f64,
            &self.developers,
            &self.policy,
        );
    }

    fn admit_arrivals(&mut self) -> Result<bool> {
        let now = self.clock as f64;
        let mut admitted = false;
        while let Some(&(day, id)) = self.pending.front() {
            if day > now {
                break;
            }
            self.pending.pop_front();
            self.scheduler.enqueue(id)?;
            admitted = true;
        }
        Ok(admitted)
    }

    fn finish_projects(&mut self) -> Result<bool> {
        let now = self.clock as f64;
        let due: Vec<ProjectId> = self
            .ongoing
            .values()
            .filter(|a| a.finish_day <= now)
            .map(|a| a.project_id)
            .collect();
        for id in &due {
            let a = self.ongoing.remove(id).expect("ongoing project");
            let p = self.projects.get_mut(id).expect("known project");
            release(p, &a, &mut self.developers)?;
            self.records.get_mut(id).expect("record").finish_day = Some(a.finish_day);
        }
        Ok(!due.is_empty())
    }

    /// Attempts to staff the queue head. `Ok(false)` means no team could be formed.
    fn start_head(&mut self) -> Result<bool> {
        let id = self
            .scheduler
            .pop_head()
            .expect("released units are capped at queue length");
        let project = self.projects.get_mut(&id).expect("known project");
        project.transition(ProjectStatus::OnHold)?;

        let candidates: Vec<&Developer> = self
            .developers
            .iter()
            .filter(|d| d.has_free_slot())
            .collect();
        let weights = self.goal_weights.get(project.goal);
        let team = project_headcount(project, &self.slim, candidates.len())
            .and_then(|k| select_team(&candidates, k, &weights, self.exhaustive_limit));
        let team = match team {
            Ok(team) => team,
            Err(Error::InfeasibleTeam { .. }) => {
                project.transition(ProjectStatus::Waiting)?;
                self.scheduler.push_head(id);
                self.records.get_mut(&id).expect("record").failed_attempts += 1;
                return Ok(false);
            }
            Err(e) => return Err(e),
        };

        let now = self.clock as f64;
        let a = assign(project, &team, &mut self.developers, now)?;
        let record = self.records.get_mut(&id).expect("record");
        record.start_day = Some(now);
        record.team_size = a.member_ids.len();
        record.start_sequence = Some(self.next_start);
        self.next_start += 1;
        self.ongoing.insert(id, a);
        Ok(true)
    }

    /// Simulates one day.
    pub fn step_day(&mut self) -> Result<()> {
        if self.admit_arrivals()? {
            self.handle_check_scheduling();
        }
        if self.finish_projects()? {
            self.handle_check_scheduling();
        }

        let rate = self.scheduler.last_schedule_rate / self.rate_time_unit_days;
        let crossed = self.scheduler.advance_stock(rate, 1.0);
        self.stock.inflow += rate;
        self.stock.released += crossed;
        let to_start = crossed.min(self.scheduler.queue_len() as u64);

        let mut started = 0;
        let mut refunded = 0;
        for _ in 0..to_start {
            if self.start_head()? {
                started += 1;
            } else {
                self.scheduler.refund();
                refunded = 1;
                break;
            }
        }
        self.stock.started += started;
        self.stock.refunded += refunded;
        self.stock.discarded += crossed - started - refunded;
        if started > 0 {
            // assignment changed the available workforce
            self.handle_check_scheduling();
        }

        self.check_allocation()?;
        self.traces.push(self.trace());
        self.clock += 1;
        Ok(())
    }

    fn check_allocation(&self) -> Result<()> {
        for d in &self.developers {
            if d.assignments.len() > d.concurrency_cap as usize {
                let project = *d.assignments.iter().next_back().expect("nonempty");
                return Err(Error::OverAllocation {
                    developer: d.id,
                    project,
                });
            }
        }
        Ok(())
    }

    fn trace(&self) -> DayTrace {
        DayTrace {
            day: self.clock,
            queue_length: self.scheduler.queue_len(),
            busy_developers: self.developers.iter().filter(|d| d.is_busy()).count(),
            assigned_slots: self.developers.iter().map(|d| d.assignments.len()).sum(),
            ongoing_team_slots: self.ongoing.values().map(|a| a.member_ids.len()).sum(),
            max_developer_load: self
                .developers
                .iter()
                .map(|d| d.assignments.len())
                .max()
                .unwrap_or(0),
            stock: self.scheduler.project_to_start_stock,
            schedule_rate: self.scheduler.last_schedule_rate,
        }
    }

    /// Steps until every project has finished.
    pub fn run_to_completion(mut self) -> Result<RunResult> {
        while !self.is_finished() {
            if self.clock >= self.tick_cap {
                let stuck = self
                    .projects
                    .values()
                    .filter(|p| p.status != ProjectStatus::Finished)
                    .map(|p| p.id)
                    .collect();
                return Err(Error::Livelock {
                    ticks: self.clock,
                    stuck,
                });
            }
            self.step_day()?;
        }
        Ok(self.into_result())
    }

    pub fn into_result(self) -> RunResult {
        RunResult {
            mode: self.mode,
            seed: self.seed,
            rng_algorithm: RNG_ALGORITHM,
            n_developers: self.developers.len(),
            records: self.records.into_values().collect(),
            traces: self.traces,
            horizon_days: self.clock as f64,
            stock: self.stock,
            final_stock: self.scheduler.project_to_start_stock,
        }
    }
}

/// Runs a scenario to completion. Deterministic per `(scenario, mode, seed)`.
pub fn run(scenario: &Scenario, mode: PolicyMode, seed: u64) -> Result<RunResult> {
    Engine::new(scenario, mode, seed)?.run_to_completion()
}
