//! The system-dynamics side of the model: the intake queue, the workforce- and
//! skill-based scheduling rates, the `ProjectToStart` stock, and the score-based
//! queue reordering policy.
//!
//! The scheduling rate is the mean of two rates,
//!
//! ```text
//! WorkforceBasedRate = AvailableWorkforce / Σ EstimatedEffort · N
//! SkillBasedRate     = AvailableSkill     / Σ ExpertiseLevel  · N
//! ScheduleRate       = (WorkforceBasedRate + SkillBasedRate) / 2
//! ```
//!
//! where `N` is the number of waiting projects. The stock integrates the rate
//! once per simulated day; every whole unit it crosses releases one project
//! from the head of the queue.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::domain::{Developer, Project, ProjectId};
use crate::error::{Error, Result};

/// Weights of the four queue-ordering terms. All zero reduces the policy to FIFO.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolicyWeights {
    pub w_priority: f64,
    pub w_urgency: f64,
    pub w_effort: f64,
    pub w_skill_match: f64,
    /// Floor on deadline slack in the urgency term.
    pub epsilon_days: f64,
}

impl PolicyWeights {
    pub fn new(w_priority: f64, w_urgency: f64, w_effort: f64, w_skill_match: f64) -> Self {
        PolicyWeights {
            w_priority,
            w_urgency,
            w_effort,
            w_skill_match,
            epsilon_days: 1.0,
        }
    }

    /// All-zero weights: the queue keeps arrival order.
    pub fn fifo() -> Self {
        Self::new(0.0, 0.0, 0.0, 0.0)
    }

    pub fn is_fifo(&self) -> bool {
        self.weights().iter().all(|&w| w == 0.0)
    }

    pub fn scaled(&self, factor: f64) -> Self {
        PolicyWeights {
            w_priority: self.w_priority * factor,
            w_urgency: self.w_urgency * factor,
            w_effort: self.w_effort * factor,
            w_skill_match: self.w_skill_match * factor,
            epsilon_days: self.epsilon_days,
        }
    }

    pub fn is_valid(&self) -> bool {
        self.weights().iter().all(|w| w.is_finite() && *w >= 0.0)
            && self.epsilon_days.is_finite()
            && self.epsilon_days > 0.0
    }

    fn weights(&self) -> [f64; 4] {
        [
            self.w_priority,
            self.w_urgency,
            self.w_effort,
            self.w_skill_match,
        ]
    }
}

impl Default for PolicyWeights {
    fn default() -> Self {
        Self::new(0.4, 0.3, 0.15, 0.15)
    }
}

/// Queue and stocks of the scheduling model.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SchedulerState {
    pub waiting_queue: Vec<ProjectId>,
    pub project_to_start_stock: f64,
    pub last_workforce_rate: f64,
    pub last_skill_rate: f64,
    pub last_schedule_rate: f64,
}

impl SchedulerState {
    pub fn new() -> Self {
        Self::default()
    }

    /// `N(t)`.
    pub fn queue_len(&self) -> usize {
        self.waiting_queue.len()
    }

    pub fn enqueue(&mut self, id: ProjectId) -> Result<()> {
        if self.waiting_queue.contains(&id) {
            return Err(Error::DuplicateQueueEntry(id));
        }
        self.waiting_queue.push(id);
        Ok(())
    }

    pub fn pop_head(&mut self) -> Option<ProjectId> {
        if self.waiting_queue.is_empty() {
            None
        } else {
            Some(self.waiting_queue.remove(0))
        }
    }

    pub fn push_head(&mut self, id: ProjectId) {
        self.waiting_queue.insert(0, id);
    }

    /// Stores a freshly computed pair of rates and their mean.
    pub fn set_rates(&mut self, workforce_rate: f64, skill_rate: f64) {
        self.last_workforce_rate = workforce_rate;
        self.last_skill_rate = skill_rate;
        self.last_schedule_rate = schedule_rate(workforce_rate, skill_rate);
    }

    /// Integrates `rate` over `dt_days` and releases every whole unit of stock.
    ///
    /// Returns the uncapped number of whole units crossed; the stock keeps only
    /// the fractional remainder.
    pub fn advance_stock(&mut self, rate: f64, dt_days: f64) -> u64 {
        debug_assert!(rate >= 0.0 && dt_days > 0.0);
        let level = self.project_to_start_stock + rate * dt_days;
        let released = level.floor();
        self.project_to_start_stock = level - released;
        released as u64
    }

    /// Puts one unit back after a released project could not be staffed.
    pub fn refund(&mut self) {
        self.project_to_start_stock += 1.0;
    }

    /// Recomputes both rates from the current queue and workforce.
    pub fn update_rates(&mut self, waiting: &[&Project], developers: &[Developer]) {
        let wf = workforce_based_rate(waiting, developers);
        let sk = skill_based_rate(waiting, developers);
        self.set_rates(wf, sk);
    }

    /// Sorts the queue by descending priority score; ties go to the earlier
    /// arrival, then the smaller id.
    pub fn reorder_queue(
        &mut self,
        projects: &BTreeMap<ProjectId, Project>,
        t_days: f64,
        developers: &[Developer],
        policy: &PolicyWeights,
    ) {
        let skill = available_skill(developers);
        let mut keyed: Vec<(f64, &Project)> = self
            .waiting_queue
            .iter()
            .map(|id| {
                let p = &projects[id];
                (score_with_skill(p, t_days, skill, policy), p)
            })
            .collect();
        keyed.sort_by(|(sa, a), (sb, b)| queue_order((a, *sa), (b, *sb)));
        self.waiting_queue = keyed.into_iter().map(|(_, p)| p.id).collect();
    }
}

/// Total remaining capacity `Σ (1 − w_i)` in developer units.
pub fn available_workforce(developers: &[Developer]) -> f64 {
    developers.iter().map(|d| 1.0 - d.workload()).sum()
}

/// Summed scalar skill of developers that still have a free slot.
pub fn available_skill(developers: &[Developer]) -> f64 {
    developers
        .iter()
        .filter(|d| d.workload() < 1.0)
        .map(Developer::skill)
        .sum()
}

fn queue_rate(available: f64, demand: f64, n: usize) -> f64 {
    if n == 0 || available <= 0.0 || demand <= 0.0 {
        return 0.0;
    }
    available / demand * n as f64
}

/// Workforce-driven scheduling rate in projects per day; zero on an empty queue.
pub fn workforce_based_rate(waiting: &[&Project], developers: &[Developer]) -> f64 {
    let demand: f64 = waiting.iter().map(|p| p.estimated_effort).sum();
    queue_rate(available_workforce(developers), demand, waiting.len())
}

/// Skill-driven scheduling rate in projects per day; zero on an empty queue.
pub fn skill_based_rate(waiting: &[&Project], developers: &[Developer]) -> f64 {
    let demand: f64 = waiting.iter().map(|p| p.expertise_level).sum();
    queue_rate(available_skill(developers), demand, waiting.len())
}

pub fn schedule_rate(workforce_rate: f64, skill_rate: f64) -> f64 {
    (workforce_rate + skill_rate) / 2.0
}

/// Ordering score of a waiting project; higher is scheduled earlier.
///
/// Each term is normalized to `[0, 1]`: priority rank / 3, reciprocal deadline
/// slack (clamped at `epsilon_days`), reciprocal effort, and the fraction of the
/// required expertise currently available.
pub fn priority_score(
    p: &Project,
    t_days: f64,
    developers: &[Developer],
    policy: &PolicyWeights,
) -> f64 {
    score_with_skill(p, t_days, available_skill(developers), policy)
}

fn score_with_skill(p: &Project, t_days: f64, skill: f64, policy: &PolicyWeights) -> f64 {
    let priority = f64::from(p.priority.rank()) / 3.0;
    let slack = (p.deadline_day - t_days).max(policy.epsilon_days);
    let urgency = (policy.epsilon_days / slack).min(1.0);
    let effort = (1.0 / p.estimated_effort).min(1.0);
    let skill_match = (skill / p.expertise_level).min(1.0);
    policy.w_priority * priority
        + policy.w_urgency * urgency
        + policy.w_effort * effort
        + policy.w_skill_match * skill_match
}

/// Queue order of two scored projects: higher score first, then earlier
/// arrival, then smaller id.
pub fn queue_order(a: (&Project, f64), b: (&Project, f64)) -> Ordering {
    b.1.total_cmp(&a.1)
        .then_with(|| a.0.arrival_day.total_cmp(&b.0.arrival_day))
        .then_with(|| a.0.id.cmp(&b.0.id))
}
