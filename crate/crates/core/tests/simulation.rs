mod common;

use darkpool::policy;
use darkpool::qvi::{self, QviVariant};
use darkpool::sim::{self, Policy, RegimeStepping, SimConfig, TerminalRule};
use darkpool::toy::{self, ToyParams};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn uncontrolled(cfg: &darkpool::Config) -> Policy<'static> {
    Policy::Uncontrolled {
        delta_a: cfg.costs.delta_menu_a[0],
        delta_b: cfg.costs.delta_menu_b[0],
    }
}

#[test]
fn solver_policy_dominates_the_dark_pool_alone() {
    let cfg = common::small_fixed();
    let s = qvi::solve(
        QviVariant::FixedCommissions,
        &cfg.market,
        &cfg.costs,
        &cfg.grid,
    )
    .unwrap();
    let table = policy::extract_regions(&s).unwrap();
    let run = SimConfig::new(20_000, 3);
    let opt = sim::simulate(
        Policy::Table(&table),
        &cfg.market,
        &cfg.costs,
        &cfg.grid,
        &run,
    )
    .unwrap();
    let idle = sim::simulate(uncontrolled(&cfg), &cfg.market, &cfg.costs, &cfg.grid, &run).unwrap();
    let se = (opt.stderr.powi(2) + idle.stderr.powi(2)).sqrt();
    assert!(
        opt.mean >= idle.mean - 3.0 * se,
        "{} vs {}",
        opt.mean,
        idle.mean
    );
}

#[test]
fn solver_policy_matches_its_value() {
    let cfg = common::small_fixed();
    let s = qvi::solve(
        QviVariant::FixedCommissions,
        &cfg.market,
        &cfg.costs,
        &cfg.grid,
    )
    .unwrap();
    let table = policy::extract_regions(&s).unwrap();
    let r = sim::simulate(
        Policy::Table(&table),
        &cfg.market,
        &cfg.costs,
        &cfg.grid,
        &SimConfig::new(40_000, 9),
    )
    .unwrap();
    let target = cfg.grid.y0 + cfg.grid.x0 as f64 * cfg.market.s0 + s.h(0, 0, cfg.grid.x0);
    let tol = (3.0 * r.stderr).max(2.0 * s.dt * s.horizon());
    assert!((r.mean - target).abs() <= tol, "{} vs {target}", r.mean);
}

#[test]
fn uncontrolled_toy_matches_closed_form() {
    let cfg = common::config("toy.json");
    let p = ToyParams::from_config(&cfg).unwrap();
    let mut grid = cfg.grid.clone();
    grid.x0 = -4;
    let mut run = SimConfig::new(40_000, 21);
    run.terminal = TerminalRule::QuadraticPenalty;
    let r = sim::simulate(uncontrolled(&cfg), &cfg.market, &cfg.costs, &grid, &run).unwrap();
    let closed = toy::uncontrolled_value(0.0, -4.0, 0.0, cfg.market.s0, &p);
    assert!(
        ((r.mean - closed) / r.stderr).abs() <= 3.0,
        "{} vs {closed}",
        r.mean
    );
}

#[test]
fn doubling_paths_shrinks_the_error() {
    let cfg = common::config("toy.json");
    let mut run = SimConfig::new(10_000, 4);
    run.terminal = TerminalRule::QuadraticPenalty;
    let a = sim::simulate(uncontrolled(&cfg), &cfg.market, &cfg.costs, &cfg.grid, &run).unwrap();
    run.paths = 20_000;
    let b = sim::simulate(uncontrolled(&cfg), &cfg.market, &cfg.costs, &cfg.grid, &run).unwrap();
    let ratio = a.stderr / b.stderr;
    assert!((ratio - 2f64.sqrt()).abs() < 0.1, "ratio {ratio}");
}

#[test]
fn results_do_not_depend_on_thread_count() {
    let cfg = common::small_fixed();
    let mut run = SimConfig::new(500, 77);
    run.log_paths = 500;
    let many = sim::simulate(uncontrolled(&cfg), &cfg.market, &cfg.costs, &cfg.grid, &run).unwrap();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap();
    let one = pool.install(|| {
        sim::simulate(uncontrolled(&cfg), &cfg.market, &cfg.costs, &cfg.grid, &run).unwrap()
    });
    assert_eq!(many, one);
}

#[test]
fn two_state_chain_occupation() {
    // stationary vector of [[-a, a], [b, -b]] is (b, a) / (a + b)
    let (a, b) = (0.6, 0.3);
    let generator = vec![vec![-a, a], vec![b, -b]];
    for mode in [RegimeStepping::ExactClock, RegimeStepping::Bernoulli] {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let (dt, steps) = (0.05, 400_000);
        let mut k = 0;
        let mut in_zero = 0usize;
        for _ in 0..steps {
            k = sim::step_regime(k, dt, &generator, mode, &mut rng);
            in_zero += usize::from(k == 0);
        }
        let frac = in_zero as f64 / steps as f64;
        let target = b / (a + b);
        // correlated samples: allow for the integrated autocorrelation time
        let tau = 2.0 / ((a + b) * dt);
        let sigma = (target * (1.0 - target) * tau / steps as f64).sqrt();
        assert!(
            (frac - target).abs() <= 3.0 * sigma,
            "{mode:?}: {frac} vs {target}"
        );
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn cash_and_inventory_are_conserved(seed in any::<u64>(), x0 in -6i64..=6) {
        let mut cfg = common::small_fixed();
        cfg.grid.x0 = x0;
        let s = qvi::solve(QviVariant::FixedCommissions, &cfg.market, &cfg.costs, &cfg.grid).unwrap();
        let table = policy::extract_regions(&s).unwrap();
        let mut run = SimConfig::new(32, seed);
        run.log_paths = 32;
        let r = sim::simulate(Policy::Table(&table), &cfg.market, &cfg.costs, &cfg.grid, &run).unwrap();
        for rec in &r.records {
            let y = rec.events.iter().fold(rec.initial.y, |y, e| y + e.dy);
            let x = rec.initial.x + rec.events.iter().map(|e| e.dx).sum::<i64>();
            prop_assert_eq!(y, rec.terminal.y);
            prop_assert_eq!(x, rec.terminal.x);
        }
    }

    #[test]
    fn same_seed_same_paths(seed in any::<u64>()) {
        let cfg = common::small_fixed();
        let mut run = SimConfig::new(16, seed);
        run.log_paths = 16;
        let a = sim::simulate(uncontrolled(&cfg), &cfg.market, &cfg.costs, &cfg.grid, &run).unwrap();
        let b = sim::simulate(uncontrolled(&cfg), &cfg.market, &cfg.costs, &cfg.grid, &run).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn poisson_mean_matches_rate(lambda in 0.1..3.0f64, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = 20_000;
        let dt = 0.5;
        let mean = (0..n).map(|_| sim::sample_arrivals(lambda, dt, &mut rng) as f64).sum::<f64>() / n as f64;
        let sigma = (lambda * dt / n as f64).sqrt();
        prop_assert!((mean - lambda * dt).abs() <= 4.5 * sigma);
    }
}
