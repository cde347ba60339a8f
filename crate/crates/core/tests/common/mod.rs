#![allow(dead_code)]

use ossd_sim::domain::{
    ArrivalProcess, Developer, Goal, Priority, Project, ProjectStatus, Scenario, SkillVector,
};
use ossd_sim::scheduler::PolicyWeights;

pub fn developer(id: u32, skill: f64) -> Developer {
    Developer::new(id, SkillVector::new(skill, skill, skill))
}

pub fn project(id: u32, priority: Priority, arrival: f64) -> Project {
    Project {
        id,
        priority,
        arrival_day: arrival,
        deadline_day: arrival + 400.0,
        estimated_effort: 1.0,
        expertise_level: 0.5,
        duration_days: 365.0,
        goal: Goal::TimeUrgent,
        source_size: None,
        status: ProjectStatus::Waiting,
    }
}

/// Fixed arrivals, rates per day.
pub fn toy(projects: Vec<Project>, developers: Vec<Developer>) -> Scenario {
    let mut s = Scenario::new(projects, developers);
    s.arrivals = ArrivalProcess::AsListed;
    s.rate_time_unit_days = 1.0;
    s
}

pub fn priority_only() -> PolicyWeights {
    PolicyWeights::new(1.0, 0.0, 0.0, 0.0)
}
