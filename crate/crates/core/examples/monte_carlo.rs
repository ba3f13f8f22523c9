//! Evaluates the solver's policy and the dark pool alone by simulation and
//! compares both with the value function.
//!
//! `cargo run --release --example monte_carlo -- [paths] [seed]`

use std::path::Path;

use darkpool::policy;
use darkpool::qvi::{self, QviVariant};
use darkpool::sim::{self, Policy, SimConfig};
use darkpool::Config;

fn main() -> darkpool::Result<()> {
    let mut args = std::env::args().skip(1);
    let paths = args.next().map_or(50_000, |s| s.parse().expect("paths"));
    let seed = args.next().map_or(1, |s| s.parse().expect("seed"));
    let cfg = Config::load(&Path::new(env!("CARGO_MANIFEST_DIR")).join("configs/fixed.json"))?;

    let s = qvi::solve(
        QviVariant::FixedCommissions,
        &cfg.market,
        &cfg.costs,
        &cfg.grid,
    )?;
    let table = policy::extract_regions(&s)?;
    let run = SimConfig::new(paths, seed);
    let opt = sim::simulate(
        Policy::Table(&table),
        &cfg.market,
        &cfg.costs,
        &cfg.grid,
        &run,
    )?;
    let idle = Policy::Uncontrolled {
        delta_a: cfg.costs.delta_menu_a[0],
        delta_b: cfg.costs.delta_menu_b[0],
    };
    let base = sim::simulate(idle, &cfg.market, &cfg.costs, &cfg.grid, &run)?;

    let x0 = cfg.grid.x0;
    let value = cfg.grid.y0 + x0 as f64 * cfg.market.s0 + s.h(0, 0, x0);
    println!("value function at x0 = {x0}: {value:.4}");
    println!("solver policy:   {:.4} ± {:.4}", opt.mean, opt.stderr);
    println!("dark pool only:  {:.4} ± {:.4}", base.mean, base.stderr);
    println!(
        "time-step bias tolerance 2*dt*T = {:.4}",
        2.0 * s.dt * s.horizon()
    );
    Ok(())
}
