//! Shared value types: projects, developers, scenarios, and scenario validation.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::assignment::{GoalWeights, SlimParams};
use crate::error::{Error, Result};
use crate::scheduler::PolicyWeights;

pub type ProjectId = u32;
pub type DeveloperId = u32;

/// Institution priority attached to an enhancement request.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Priority {
    High,
    Medium,
    Low,
}

impl Priority {
    pub const ALL: [Priority; 3] = [Priority::High, Priority::Medium, Priority::Low];

    /// High = 3, Medium = 2, Low = 1.
    pub fn rank(self) -> u8 {
        match self {
            Priority::High => 3,
            Priority::Medium => 2,
            Priority::Low => 1,
        }
    }
}

/// What a project optimizes for; selects the workload/skill weights of team formation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Goal {
    TimeUrgent,
    QualityOriented,
}

impl Goal {
    pub const ALL: [Goal; 2] = [Goal::TimeUrgent, Goal::QualityOriented];
}

/// Per-developer skill record: technical skill, community experience, leadership.
/// Every component lies in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SkillVector {
    pub technical: f64,
    pub experience: f64,
    pub leadership: f64,
}

impl SkillVector {
    pub fn new(technical: f64, experience: f64, leadership: f64) -> Self {
        SkillVector {
            technical,
            experience,
            leadership,
        }
    }

    pub fn is_valid(&self) -> bool {
        [self.technical, self.experience, self.leadership]
            .iter()
            .all(|c| (0.0..=1.0).contains(c))
    }
}

/// Collapses a skill vector to the scalar skill used by team formation and the
/// skill-based scheduling rate: the unweighted mean of the three components.
pub fn scalar_skill(v: &SkillVector) -> f64 {
    (v.technical + v.experience + v.leadership) / 3.0
}

pub const DEFAULT_CONCURRENCY_CAP: u32 = 2;

fn default_cap() -> u32 {
    DEFAULT_CONCURRENCY_CAP
}

/// A community member. Workload is not stored: it is the fraction of the
/// developer's concurrency slots currently held by projects.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Developer {
    pub id: DeveloperId,
    #[serde(flatten)]
    pub skills: SkillVector,
    #[serde(default = "default_cap")]
    pub concurrency_cap: u32,
    #[serde(skip)]
    pub assignments: BTreeSet<ProjectId>,
}

impl Developer {
    pub fn new(id: DeveloperId, skills: SkillVector) -> Self {
        Developer {
            id,
            skills,
            concurrency_cap: DEFAULT_CONCURRENCY_CAP,
            assignments: BTreeSet::new(),
        }
    }

    pub fn with_cap(mut self, cap: u32) -> Self {
        self.concurrency_cap = cap;
        self
    }

    /// `|assignments| / concurrency_cap`, in `[0, 1]`.
    pub fn workload(&self) -> f64 {
        self.assignments.len() as f64 / self.concurrency_cap as f64
    }

    pub fn skill(&self) -> f64 {
        scalar_skill(&self.skills)
    }

    pub fn has_free_slot(&self) -> bool {
        self.assignments.len() < self.concurrency_cap as usize
    }

    pub fn is_busy(&self) -> bool {
        !self.assignments.is_empty()
    }
}

/// Lifecycle of a project. Allowed moves: Waiting → OnHold → Ongoing →
/// Finished, plus OnHold → Waiting when no team could be formed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
pub enum ProjectStatus {
    #[default]
    Waiting,
    OnHold,
    Ongoing,
    Finished,
}

impl ProjectStatus {
    pub fn can_transition_to(self, to: ProjectStatus) -> bool {
        use ProjectStatus::*;
        matches!(
            (self, to),
            (Waiting, OnHold) | (OnHold, Ongoing) | (OnHold, Waiting) | (Ongoing, Finished)
        )
    }
}

/// One enhancement request.
///
/// `estimated_effort` doubles as the SLIM life-cycle effort in person-years;
/// `expertise_level` is on the same scale as a sum of scalar developer skills.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Project {
    pub id: ProjectId,
    pub priority: Priority,
    pub arrival_day: f64,
    pub deadline_day: f64,
    pub estimated_effort: f64,
    pub expertise_level: f64,
    pub duration_days: f64,
    pub goal: Goal,
    /// Delivered source size for SLIM sizing; derived from effort and duration when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source_size: Option<f64>,
    #[serde(skip)]
    pub status: ProjectStatus,
}

impl Project {
    pub fn transition(&mut self, to: ProjectStatus) -> Result<()> {
        if !self.status.can_transition_to(to) {
            return Err(Error::InvalidTransition {
                project: self.id,
                from: self.status,
                to,
            });
        }
        self.status = to;
        Ok(())
    }
}

/// How the engine places project arrivals on the timeline.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ArrivalProcess {
    /// Redraw arrivals per seed from an exponential interarrival distribution,
    /// keeping each project's deadline slack.
    #[default]
    Exponential,
    /// Use the `arrival_day` values as listed.
    AsListed,
}

pub const DEFAULT_HORIZON_DAYS: f64 = 1095.0;

/// Scheduling rates are per year: effort is in person-years and available
/// workforce in persons.
pub const DEFAULT_RATE_TIME_UNIT_DAYS: f64 = 365.0;

fn default_rate_unit() -> f64 {
    DEFAULT_RATE_TIME_UNIT_DAYS
}

/// Workload/skill weights per project goal.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GoalWeightTable {
    pub time_urgent: GoalWeights,
    pub quality_oriented: GoalWeights,
}

impl GoalWeightTable {
    pub fn get(&self, goal: Goal) -> GoalWeights {
        match goal {
            Goal::TimeUrgent => self.time_urgent,
            Goal::QualityOriented => self.quality_oriented,
        }
    }
}

impl Default for GoalWeightTable {
    fn default() -> Self {
        GoalWeightTable {
            time_urgent: GoalWeights::new(0.7, 0.3),
            quality_oriented: GoalWeights::new(0.3, 0.7),
        }
    }
}

/// Everything needed to run the simulation, minus the seed and policy mode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub projects: Vec<Project>,
    pub developers: Vec<Developer>,
    pub horizon_days: f64,
    pub mean_interarrival_days: f64,
    /// Length in days of the time unit the scheduling rates are expressed in.
    #[serde(default = "default_rate_unit")]
    pub rate_time_unit_days: f64,
    #[serde(default)]
    pub arrivals: ArrivalProcess,
    /// Drop generated arrivals that fall after `horizon_days`.
    #[serde(default)]
    pub truncate_arrivals_at_horizon: bool,
    #[serde(default)]
    pub slim: SlimParams,
    #[serde(default)]
    pub goal_weights: GoalWeightTable,
    #[serde(default)]
    pub policy: PolicyWeights,
}

impl Scenario {
    pub fn new(projects: Vec<Project>, developers: Vec<Developer>) -> Self {
        Scenario {
            projects,
            developers,
            horizon_days: DEFAULT_HORIZON_DAYS,
            mean_interarrival_days: 30.0,
            rate_time_unit_days: DEFAULT_RATE_TIME_UNIT_DAYS,
            arrivals: ArrivalProcess::default(),
            truncate_arrivals_at_horizon: false,
            slim: SlimParams::default(),
            goal_weights: GoalWeightTable::default(),
            policy: PolicyWeights::default(),
        }
    }

    pub fn total_skill(&self) -> f64 {
        self.developers.iter().map(Developer::skill).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Subject {
    Scenario,
    Project(ProjectId),
    Developer(DeveloperId),
}

impl fmt::Display for Subject {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Subject::Scenario => write!(f, "scenario"),
            Subject::Project(id) => write!(f, "project {id}"),
            Subject::Developer(id) => write!(f, "developer {id}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub subject: Subject,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.subject, self.message)
    }
}

/// Every invariant violation found in a scenario. Empty means valid.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn mentions(&self, subject: Subject) -> bool {
        self.violations.iter().any(|v| v.subject == subject)
    }

    fn push(&mut self, subject: Subject, message: impl Into<String>) {
        self.violations.push(Violation {
            subject,
            message: message.into(),
        });
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in &self.violations {
            writeln!(f, "  {v}")?;
        }
        Ok(())
    }
}

fn positive(x: f64) -> bool {
    x.is_finite() && x > 0.0
}

/// Checks every scenario, project and developer invariant and reports all
/// violations with the offending id.
pub fn validate_scenario(s: &Scenario) -> ValidationReport {
    let mut report = ValidationReport::default();

    if !positive(s.horizon_days) {
        report.push(Subject::Scenario, "horizon_days must be > 0");
    }
    if !positive(s.mean_interarrival_days) {
        report.push(Subject::Scenario, "mean_interarrival_days must be > 0");
    }
    if !positive(s.rate_time_unit_days) {
        report.push(Subject::Scenario, "rate_time_unit_days must be > 0");
    }
    if !positive(s.slim.technology_constant) {
        report.push(Subject::Scenario, "SLIM technology constant must be > 0");
    }
    for goal in Goal::ALL {
        let w = s.goal_weights.get(goal);
        if !w.is_valid() {
            report.push(
                Subject::Scenario,
                format!("{goal:?} weights must be nonnegative and sum to 1"),
            );
        }
    }
    if !s.policy.is_valid() {
        report.push(
            Subject::Scenario,
            "policy weights must be nonnegative and epsilon_days > 0",
        );
    }

    let mut seen = HashSet::new();
    let mut counted = BTreeMap::<DeveloperId, usize>::new();
    for d in &s.developers {
        *counted.entry(d.id).or_default() += 1;
        if !seen.insert(d.id) {
            continue;
        }
        let subject = Subject::Developer(d.id);
        if !d.skills.is_valid() {
            report.push(subject, "skill components must lie in [0, 1]");
        }
        if d.concurrency_cap < 1 {
            report.push(subject, "concurrency_cap must be >= 1");
        } else if d.assignments.len() > d.concurrency_cap as usize {
            report.push(subject, "more assignments than concurrency_cap");
        }
    }
    for (id, n) in counted {
        if n > 1 {
            report.push(
                Subject::Developer(id),
                format!("duplicate developer id ({n} occurrences)"),
            );
        }
    }

    let total_skill = s.total_skill();
    let mut counted = BTreeMap::<ProjectId, usize>::new();
    for p in &s.projects {
        *counted.entry(p.id).or_default() += 1;
    }
    let mut seen = HashSet::new();
    for p in &s.projects {
        if !seen.insert(p.id) {
            continue;
        }
        let subject = Subject::Project(p.id);
        if !(p.arrival_day.is_finite() && p.arrival_day >= 0.0) {
            report.push(subject, "arrival_day must be >= 0");
        }
        if !(p.deadline_day.is_finite() && p.deadline_day > p.arrival_day) {
            report.push(subject, "deadline_day must be after arrival_day");
        }
        if !positive(p.estimated_effort) {
            report.push(subject, "estimated_effort must be > 0");
        }
        if !positive(p.duration_days) {
            report.push(subject, "duration_days must be > 0");
        }
        if !positive(p.expertise_level) {
            report.push(subject, "expertise_level must be > 0");
        } else if p.expertise_level > total_skill {
            report.push(
                subject,
                format!(
                    "unschedulable project: expertise_level {} exceeds total developer skill {}",
                    p.expertise_level, total_skill
                ),
            );
        }
        if let Some(size) = p.source_size {
            if !positive(size) {
                report.push(subject, "source_size must be > 0");
            }
        }
    }
    for (id, n) in counted {
        if n > 1 {
            report.push(
                Subject::Project(id),
                format!("duplicate project id ({n} occurrences)"),
            );
        }
    }

    report
}
