//! Hybrid simulation of project scheduling and workforce assignment for
//! open-source software development.
//!
//! A system-dynamics model ([`scheduler`]) decides *when* waiting projects may
//! start: it integrates a scheduling rate driven by the available workforce and
//! skill into a stock, and every whole unit of stock releases the head of a
//! dynamically reordered queue. An agent-based model ([`assignment`]) decides
//! *who* works on a released project: SLIM sizing gives the headcount and the
//! cheapest team under a workload/skill cost is selected. The [`engine`] couples
//! both on a daily clock, [`metrics`] turns runs into the waiting-time,
//! utilization and queue-length measures, and [`cli`] drives replicated
//! experiments that compare the dynamic policy against FIFO.
//!
//! ```
//! use ossd_sim::cli::{gen_scenario, GeneratorParams};
//! use ossd_sim::engine::{run, PolicyMode};
//! use ossd_sim::metrics::avg_waiting_time;
//!
//! let scenario = gen_scenario(&GeneratorParams::default(), 7).unwrap();
//! let result = run(&scenario, PolicyMode::Dynamic, 1).unwrap();
//! assert_eq!(result.records.len(), 30);
//! assert!(avg_waiting_time(&result).unwrap() >= 0.0);
//! ```

pub mod assignment;
pub mod cli;
pub mod domain;
pub mod engine;
pub mod error;
pub mod metrics;
pub mod scheduler;

pub use error::{Error, Result};

/// Guide chapters, compiled so their snippets stay in sync with the API.
#[cfg(doctest)]
pub mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    pub mod introduction {}
    #[doc = include_str!("../../../book/src/scheduling.md")]
    pub mod scheduling {}
    #[doc = include_str!("../../../book/src/assignment.md")]
    pub mod assignment {}
    #[doc = include_str!("../../../book/src/engine.md")]
    pub mod engine {}
    #[doc = include_str!("../../../book/src/metrics.md")]
    pub mod metrics {}
    #[doc = include_str!("../../../book/src/experiments.md")]
    pub mod experiments {}
}
