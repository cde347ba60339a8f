mod common;

use common::{developer, priority_only, project, toy};
use ossd_sim::cli::{gen_scenario, GeneratorParams};
use ossd_sim::domain::{Priority, ProjectStatus};
use ossd_sim::engine::{run, schedule_arrivals, Engine, PolicyMode};
use ossd_sim::Error;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn arrivals_empty_and_deterministic() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    assert!(schedule_arrivals(&mut rng, 30.0, 0).unwrap().is_empty());

    let a = schedule_arrivals(&mut ChaCha8Rng::seed_from_u64(9), 30.0, 50).unwrap();
    let b = schedule_arrivals(&mut ChaCha8Rng::seed_from_u64(9), 30.0, 50).unwrap();
    assert_eq!(a, b);
    assert!(a.windows(2).all(|w| w[0] <= w[1]));
}

#[test]
fn arrival_gaps_have_the_requested_mean() {
    let days = schedule_arrivals(&mut ChaCha8Rng::seed_from_u64(17), 30.0, 10_000).unwrap();
    let mean_gap = days.last().unwrap() / days.len() as f64;
    // the standard error of the mean gap is 0.3, so ±1 is a 3.3-sigma band
    assert!((mean_gap - 30.0).abs() < 1.0, "mean gap {mean_gap}");
}

#[test]
fn quiescent_day_only_moves_the_clock() {
    let s = toy(vec![], vec![developer(0, 0.5), developer(1, 0.5)]);
    let mut e = Engine::new(&s, PolicyMode::Dynamic, 0).unwrap();
    let devs = e.developers().to_vec();
    e.step_day().unwrap();
    assert_eq!(e.clock(), 1);
    assert_eq!(e.developers(), &devs[..]);
    assert!(e.scheduler().waiting_queue.is_empty());
    assert_eq!(e.scheduler().project_to_start_stock, 0.0);
    let r = e.into_result();
    assert_eq!(r.traces.len(), 1);
    assert_eq!(r.traces[0].queue_length, 0);
    assert_eq!(r.traces[0].busy_developers, 0);
}

#[test]
fn zero_project_run_is_empty() {
    let s = toy(vec![], vec![developer(0, 0.5)]);
    let r = run(&s, PolicyMode::Fifo, 1).unwrap();
    assert!(r.records.is_empty());
    assert!(r.traces.is_empty());
    assert_eq!(r.horizon_days, 0.0);
}

#[test]
fn single_project_starts_when_the_stock_crosses_one() {
    // 4 idle developers of skill 0.5: AvailableWorkforce 4, AvailableSkill 2.
    // One project with effort 1 and expertise 0.5 gives rates 4 and 4, so
    // ScheduleRate = 4 per rate unit.
    let devs: Vec<_> = (0..4).map(|i| developer(i, 0.5)).collect();
    let mut s = toy(vec![project(0, Priority::Low, 0.0)], devs);

    // per-day rates: the stock crosses on day 0
    let r = run(&s, PolicyMode::Fifo, 0).unwrap();
    assert_eq!(r.records[0].start_day, Some(0.0));
    assert_eq!(r.records[0].team_size, 1);

    // per-year rates: 4/365 per day, crossing after ceil(365/4) = 92 increments
    s.rate_time_unit_days = 365.0;
    let r = run(&s, PolicyMode::Fifo, 0).unwrap();
    let wait = r.records[0].waiting_days().unwrap();
    assert!((91.0..=92.0).contains(&wait), "wait {wait}");
    assert_eq!(r.records[0].finish_day, Some(wait + 365.0));
}

#[test]
fn infeasible_project_waits_for_a_release() {
    // 3 developers with one slot each. Effort 2 over one year needs 2 developers.
    let devs: Vec<_> = (0..3).map(|i| developer(i, 1.0).with_cap(1)).collect();
    let mut a = project(0, Priority::High, 0.0);
    a.estimated_effort = 2.0;
    let mut b = project(1, Priority::High, 1.0);
    b.estimated_effort = 2.0;
    let s = toy(vec![a, b], devs);

    let r = run(&s, PolicyMode::Fifo, 0).unwrap();
    let (ra, rb) = (&r.records[0], &r.records[1]);
    assert_eq!(ra.start_day, Some(0.0));
    assert_eq!(ra.finish_day, Some(365.0));
    // completions run before starts, so B starts on A's finishing day
    assert_eq!(rb.start_day, Some(365.0));
    assert!(rb.failed_attempts > 0);
    assert!(r.stock.refunded > 0);
    assert_eq!(r.stock.started, 2);
}

#[test]
fn check_scheduling_moves_urgent_arrival_to_the_head() {
    let devs: Vec<_> = (0..4).map(|i| developer(i, 0.5)).collect();
    let mut s = toy(
        vec![
            project(0, Priority::Low, 0.0),
            project(1, Priority::Low, 0.0),
            project(2, Priority::High, 1.0),
        ],
        devs,
    );
    s.policy = priority_only();
    // keep everything queued for the first days
    s.rate_time_unit_days = 365.0;
    let mut e = Engine::new(&s, PolicyMode::Dynamic, 0).unwrap();
    e.step_day().unwrap();
    assert_eq!(e.scheduler().waiting_queue, [0, 1]);
    e.step_day().unwrap();
    assert_eq!(e.scheduler().waiting_queue, [2, 0, 1]);

    // empty queue: rates are zero
    let mut e = Engine::new(
        &toy(vec![], vec![developer(0, 0.5)]),
        PolicyMode::Dynamic,
        0,
    )
    .unwrap();
    e.handle_check_scheduling();
    assert_eq!(e.scheduler().last_schedule_rate, 0.0);
}

#[test]
fn dynamic_and_fifo_differ_only_when_scores_reorder() {
    let devs: Vec<_> = (0..4).map(|i| developer(i, 0.5)).collect();
    let build = |first: Priority, second: Priority| {
        let mut s = toy(
            vec![project(0, first, 0.0), project(1, second, 0.5)],
            devs.clone(),
        );
        s.policy = priority_only();
        s.rate_time_unit_days = 365.0;
        s
    };

    // Low arrives first, High second: Dynamic starts the High project first
    let s = build(Priority::Low, Priority::High);
    assert_eq!(run(&s, PolicyMode::Fifo, 0).unwrap().start_order(), [0, 1]);
    assert_eq!(
        run(&s, PolicyMode::Dynamic, 0).unwrap().start_order(),
        [1, 0]
    );

    // arrival order already matches score order
    let s = build(Priority::High, Priority::Low);
    assert_eq!(run(&s, PolicyMode::Fifo, 0).unwrap().start_order(), [0, 1]);
    assert_eq!(
        run(&s, PolicyMode::Dynamic, 0).unwrap().start_order(),
        [0, 1]
    );
}

#[test]
fn runs_are_deterministic() {
    let s = gen_scenario(&GeneratorParams::default(), 4).unwrap();
    for mode in [PolicyMode::Dynamic, PolicyMode::Fifo] {
        assert_eq!(run(&s, mode, 12).unwrap(), run(&s, mode, 12).unwrap());
    }
}

#[test]
fn both_modes_see_the_same_arrivals() {
    let s = gen_scenario(&GeneratorParams::default(), 4).unwrap();
    let arrivals = |mode| {
        run(&s, mode, 77)
            .unwrap()
            .records
            .iter()
            .map(|r| r.arrival_day)
            .collect::<Vec<_>>()
    };
    assert_eq!(arrivals(PolicyMode::Dynamic), arrivals(PolicyMode::Fifo));
}

#[test]
fn conservation_holds_at_every_tick() {
    let s = gen_scenario(&GeneratorParams::default(), 8).unwrap();
    for mode in [PolicyMode::Dynamic, PolicyMode::Fifo] {
        let mut e = Engine::new(&s, mode, 5).unwrap();
        while !e.is_finished() {
            e.step_day().unwrap();
            for d in e.developers() {
                assert!(d.assignments.len() <= d.concurrency_cap as usize);
                assert!((0.0..=1.0).contains(&d.workload()));
            }
            let held: usize = e.developers().iter().map(|d| d.assignments.len()).sum();
            let staffed: usize = e.ongoing().values().map(|a| a.member_ids.len()).sum();
            assert_eq!(held, staffed);
            let ongoing = e
                .projects()
                .values()
                .filter(|p| p.status == ProjectStatus::Ongoing)
                .count();
            assert_eq!(ongoing, e.ongoing().len());
            let ledger = e.stock_ledger();
            assert!(ledger.imbalance(e.scheduler().project_to_start_stock).abs() < 1e-6);
            assert_eq!(
                ledger.released,
                ledger.started + ledger.refunded + ledger.discarded
            );
        }
        let r = e.into_result();
        assert!(r.records.iter().all(|r| r.waiting_days().unwrap() >= 0.0));
        assert!(r
            .records
            .iter()
            .all(|r| r.arrival_day <= r.start_day.unwrap() && r.start_day <= r.finish_day));
        assert_eq!(r.stock.started as usize, r.records.len());
    }
}

#[test]
fn interleaved_engines_match_sequential_runs() {
    let s = gen_scenario(&GeneratorParams::default(), 2).unwrap();
    let sequential = [
        run(&s, PolicyMode::Dynamic, 1).unwrap(),
        run(&s, PolicyMode::Dynamic, 2).unwrap(),
    ];

    let mut a = Engine::new(&s, PolicyMode::Dynamic, 1).unwrap();
    let mut b = Engine::new(&s, PolicyMode::Dynamic, 2).unwrap();
    while !(a.is_finished() && b.is_finished()) {
        if !a.is_finished() {
            a.step_day().unwrap();
        }
        if !b.is_finished() {
            b.step_day().unwrap();
        }
    }
    assert_eq!([a.into_result(), b.into_result()], sequential);
}

#[test]
fn unstaffable_project_is_reported_as_livelock() {
    let devs: Vec<_> = (0..3).map(|i| developer(i, 1.0)).collect();
    let mut p = project(4, Priority::High, 0.0);
    // 5 person-years in a tenth of a year: 50 developers
    p.estimated_effort = 5.0;
    p.duration_days = 36.5;
    let mut s = toy(vec![p], devs);
    s.horizon_days = 5.0;
    match run(&s, PolicyMode::Dynamic, 0) {
        Err(Error::Livelock { ticks, stuck }) => {
            assert_eq!(ticks, 500);
            assert_eq!(stuck, [4]);
        }
        other => panic!("expected livelock, got {other:?}"),
    }
}

#[test]
fn invalid_scenario_is_rejected() {
    let mut s = toy(
        vec![project(1, Priority::Low, 0.0)],
        vec![developer(0, 0.1)],
    );
    s.projects[0].expertise_level = 5.0;
    assert!(matches!(
        run(&s, PolicyMode::Fifo, 0),
        Err(Error::InvalidScenario(_))
    ));
}

#[test]
fn truncation_drops_late_arrivals() {
    let mut s = gen_scenario(&GeneratorParams::default(), 2).unwrap();
    s.horizon_days = 200.0;
    s.truncate_arrivals_at_horizon = true;
    let r = run(&s, PolicyMode::Fifo, 3).unwrap();
    assert!(r.records.len() < 30);
    assert!(r.records.iter().all(|r| r.arrival_day <= 200.0));
}
