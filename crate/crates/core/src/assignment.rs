//! The agent-based side of the model: SLIM sizing, the team-formation cost,
//! optimal team selection, and assignment/release of developers.
//!
//! SLIM relates delivered source size `S_s` to life-cycle effort `K`
//! (person-years) and development time `t_d` (years):
//!
//! ```text
//! S_s = C_k · K^(1/3) · t_d^(2/3)
//! ```
//!
//! A team of `k` developers costs `Σ α·f(w_i) + β·g(s_i)` over its members,
//! with `f(w) = w` and `g(s) = 1 − s`; the cheapest team of the required size
//! is selected.

use serde::{Deserialize, Serialize};

use crate::domain::{Developer, DeveloperId, Project, ProjectId, ProjectStatus};
use crate::error::{Error, Result};

/// Range of the technology constant commonly seen in practice.
pub const TYPICAL_TECHNOLOGY_CONSTANT: (f64, f64) = (610.0, 57_314.0);

pub const DEFAULT_EXHAUSTIVE_LIMIT: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlimParams {
    /// `C_k`.
    pub technology_constant: f64,
}

impl SlimParams {
    pub fn is_typical(&self) -> bool {
        let (lo, hi) = TYPICAL_TECHNOLOGY_CONSTANT;
        (lo..=hi).contains(&self.technology_constant)
    }
}

impl Default for SlimParams {
    fn default() -> Self {
        SlimParams {
            technology_constant: 2000.0,
        }
    }
}

/// Relative importance of workload (`alpha`) and skill (`beta`) in team cost.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GoalWeights {
    pub alpha: f64,
    pub beta: f64,
}

impl GoalWeights {
    pub fn new(alpha: f64, beta: f64) -> Self {
        GoalWeights { alpha, beta }
    }

    pub fn is_valid(&self) -> bool {
        self.alpha >= 0.0 && self.beta >= 0.0 && (self.alpha + self.beta - 1.0).abs() <= 1e-9
    }
}

/// A chosen team, members sorted by id.
#[derive(Debug, Clone, PartialEq)]
pub struct TeamSelection {
    pub member_ids: Vec<DeveloperId>,
    pub cost: f64,
}

/// A staffed project: who works on it and when it ends.
#[derive(Debug, Clone, PartialEq)]
pub struct Assignment {
    pub project_id: ProjectId,
    pub member_ids: Vec<DeveloperId>,
    pub start_day: f64,
    pub finish_day: f64,
}

fn require_positive(name: &str, x: f64) -> Result<()> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "{name} must be > 0, got {x}"
        )))
    }
}

/// `C_k · K^(1/3) · t_d^(2/3)`.
pub fn slim_source_size(c_k: f64, k_person_years: f64, t_d_years: f64) -> Result<f64> {
    require_positive("technology constant", c_k)?;
    require_positive("effort", k_person_years)?;
    require_positive("development time", t_d_years)?;
    Ok(c_k * k_person_years.cbrt() * t_d_years.powf(2.0 / 3.0))
}

/// Inverse of [`slim_source_size`] in `K`: `(S_s / (C_k · t_d^(2/3)))³`.
pub fn slim_effort(s_s: f64, c_k: f64, t_d_years: f64) -> Result<f64> {
    require_positive("source size", s_s)?;
    require_positive("technology constant", c_k)?;
    require_positive("development time", t_d_years)?;
    Ok((s_s / (c_k * t_d_years.powf(2.0 / 3.0))).powi(3))
}

/// Average staffing level `⌈K / t_d⌉`, at least one developer.
///
/// Quotients within 1e-9 (relative) of an integer are snapped to it so that a
/// SLIM round trip does not add a developer through rounding noise.
pub fn required_headcount(
    k_person_years: f64,
    t_d_years: f64,
    n_available: usize,
) -> Result<usize> {
    require_positive("effort", k_person_years)?;
    require_positive("development time", t_d_years)?;
    let x = k_person_years / t_d_years;
    let nearest = x.round();
    let k = if (x - nearest).abs() <= 1e-9 * nearest.max(1.0) {
        nearest
    } else {
        x.ceil()
    };
    let k = (k as usize).max(1);
    if k > n_available {
        return Err(Error::InfeasibleTeam {
            required: k,
            available: n_available,
        });
    }
    Ok(k)
}

/// SLIM sizing of a project. Development time is the project's duration; the
/// source size is taken from the project when given, otherwise derived from
/// its estimated effort.
pub fn project_headcount(p: &Project, slim: &SlimParams, n_available: usize) -> Result<usize> {
    let t_d = p.duration_days / 365.0;
    let c_k = slim.technology_constant;
    let s_s = match p.source_size {
        Some(s) => s,
        None => slim_source_size(c_k, p.estimated_effort, t_d)?,
    };
    let k = slim_effort(s_s, c_k, t_d)?;
    required_headcount(k, t_d, n_available)
}

fn unit_interval(name: &str, x: f64) -> Result<()> {
    if (0.0..=1.0).contains(&x) {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "{name} must lie in [0, 1], got {x}"
        )))
    }
}

/// `f(w) = w`.
pub fn load_cost(w: f64) -> Result<f64> {
    unit_interval("workload", w)?;
    Ok(w)
}

/// `g(s) = 1 − s`.
pub fn skill_cost(s: f64) -> Result<f64> {
    unit_interval("skill", s)?;
    Ok(1.0 - s)
}

fn member_cost(d: &Developer, weights: &GoalWeights) -> Result<f64> {
    Ok(weights.alpha * load_cost(d.workload())? + weights.beta * skill_cost(d.skill())?)
}

/// `Σ α·f(w_i) + β·g(s_i)` over the members, summed in the given order.
pub fn team_cost(members: &[&Developer], weights: &GoalWeights) -> Result<f64> {
    if members.is_empty() {
        return Err(Error::InvalidParameter("team must not be empty".into()));
    }
    let mut total = 0.0;
    for d in members {
        total += member_cost(d, weights)?;
    }
    Ok(total)
}

/// Candidates sorted by id, with their individual costs.
fn prepare<'a>(
    candidates: &[&'a Developer],
    k: usize,
    weights: &GoalWeights,
) -> Result<Vec<(&'a Developer, f64)>> {
    if k == 0 {
        return Err(Error::InvalidParameter("team size must be >= 1".into()));
    }
    if k > candidates.len() {
        return Err(Error::InfeasibleTeam {
            required: k,
            available: candidates.len(),
        });
    }
    if let Some(d) = candidates.iter().find(|d| !d.has_free_slot()) {
        return Err(Error::InvalidParameter(format!(
            "developer {} has no free slot and cannot be a candidate",
            d.id
        )));
    }
    let mut sorted: Vec<&Developer> = candidates.to_vec();
    sorted.sort_by_key(|d| d.id);
    sorted
        .into_iter()
        .map(|d| member_cost(d, weights).map(|c| (d, c)))
        .collect()
}

fn selection(members: Vec<&Developer>, weights: &GoalWeights) -> Result<TeamSelection> {
    let cost = team_cost(&members, weights)?;
    Ok(TeamSelection {
        member_ids: members.iter().map(|d| d.id).collect(),
        cost,
    })
}

/// `C(n, k)`, saturating at `u64::MAX`.
pub fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return u64::MAX;
        }
    }
    acc as u64
}

/// Enumerates every size-`k` team and returns the cheapest. Among equal costs
/// the lexicographically smallest sorted id tuple wins.
pub fn select_team_exhaustive(
    candidates: &[&Developer],
    k: usize,
    weights: &GoalWeights,
) -> Result<TeamSelection> {
    let pool = prepare(candidates, k, weights)?;
    let n = pool.len();
    let mut idx: Vec<usize> = (0..k).collect();
    let mut best: Option<(f64, Vec<usize>)> = None;
    loop {
        let mut cost = 0.0;
        for &i in &idx {
            cost += pool[i].1;
        }
        // strict comparison keeps the first (lexicographically smallest) tie
        if best.as_ref().is_none_or(|(c, _)| cost < *c) {
            best = Some((cost, idx.clone()));
        }
        // next combination in lexicographic order
        let Some(pos) = (0..k).rev().find(|&p| idx[p] != p + n - k) else {
            break;
        };
        idx[pos] += 1;
        for q in pos + 1..k {
            idx[q] = idx[q - 1] + 1;
        }
    }
    let (_, idx) = best.expect("at least one combination");
    selection(idx.into_iter().map(|i| pool[i].0).collect(), weights)
}

/// Exhaustive selection when `C(n, k) ≤ exhaustive_limit`; otherwise the `k`
/// individually cheapest developers, refined by pairwise swaps until no swap
/// lowers the team cost.
pub fn select_team(
    candidates: &[&Developer],
    k: usize,
    weights: &GoalWeights,
    exhaustive_limit: u64,
) -> Result<TeamSelection> {
    if binomial(candidates.len(), k) <= exhaustive_limit {
        return select_team_exhaustive(candidates, k, weights);
    }
    let (team, _) = greedy_then_swap(candidates, k, weights)?;
    Ok(team)
}

/// Greedy seed and its swap-refined local optimum, returned as
/// `(refined, seed)`.
pub fn greedy_then_swap(
    candidates: &[&Developer],
    k: usize,
    weights: &GoalWeights,
) -> Result<(TeamSelection, TeamSelection)> {
    let mut pool = prepare(candidates, k, weights)?;
    // stable: ties keep id order
    pool.sort_by(|a, b| a.1.total_cmp(&b.1));
    let mut members: Vec<&Developer> = pool[..k].iter().map(|(d, _)| *d).collect();
    let mut outside: Vec<&Developer> = pool[k..].iter().map(|(d, _)| *d).collect();
    members.sort_by_key(|d| d.id);
    let seed = selection(members.clone(), weights)?;

    let mut current = seed.cost;
    loop {
        let mut improved = false;
        for i in 0..members.len() {
            for other in outside.iter_mut() {
                let mut trial = members.clone();
                trial[i] = *other;
                trial.sort_by_key(|d| d.id);
                let cost = team_cost(&trial, weights)?;
                if cost < current {
                    std::mem::swap(&mut members[i], other);
                    members.sort_by_key(|d| d.id);
                    current = cost;
                    improved = true;
                }
            }
        }
        if !improved {
            break;
        }
    }
    Ok((selection(members, weights)?, seed))
}

fn position(developers: &[Developer], id: DeveloperId) -> Result<usize> {
    developers
        .iter()
        .position(|d| d.id == id)
        .ok_or_else(|| Error::InvalidParameter(format!("unknown developer {id}")))
}

/// Gives every team member one slot on the project and marks it ongoing.
/// Nothing is changed if any member is already full.
pub fn assign(
    project: &mut Project,
    team: &TeamSelection,
    developers: &mut [Developer],
    start_day: f64,
) -> Result<Assignment> {
    if project.status != ProjectStatus::OnHold {
        return Err(Error::InvalidTransition {
            project: project.id,
            from: project.status,
            to: ProjectStatus::Ongoing,
        });
    }
    let slots = team
        .member_ids
        .iter()
        .map(|&id| position(developers, id))
        .collect::<Result<Vec<_>>>()?;
    for &i in &slots {
        if !developers[i].has_free_slot() || developers[i].assignments.contains(&project.id) {
            return Err(Error::OverAllocation {
                developer: developers[i].id,
                project: project.id,
            });
        }
    }
    for &i in &slots {
        developers[i].assignments.insert(project.id);
    }
    project.transition(ProjectStatus::Ongoing)?;
    Ok(Assignment {
        project_id: project.id,
        member_ids: team.member_ids.clone(),
        start_day,
        finish_day: start_day + project.duration_days,
    })
}

/// Frees the team's slots and marks the project finished.
pub fn release(
    project: &mut Project,
    assignment: &Assignment,
    developers: &mut [Developer],
) -> Result<()> {
    if project.status != ProjectStatus::Ongoing {
        return Err(Error::InvalidTransition {
            project: project.id,
            from: project.status,
            to: ProjectStatus::Finished,
        });
    }
    let slots = assignment
        .member_ids
        .iter()
        .map(|&id| position(developers, id))
        .collect::<Result<Vec<_>>>()?;
    for i in slots {
        developers[i].assignments.remove(&project.id);
    }
    project.transition(ProjectStatus::Finished)
}
