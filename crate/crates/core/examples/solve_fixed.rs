//! Solves the fixed-commission QVI and prints the policy map, the
//! complementarity residual and the boundary curves.
//!
//! `cargo run --release --example solve_fixed -- [config.json]`

use std::path::PathBuf;

use darkpool::policy::{self, Side};
use darkpool::qvi::{self, Intervention, QviVariant};
use darkpool::Config;

fn main() -> darkpool::Result<()> {
    let path = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("configs/fixed.json"));
    let cfg = Config::load(&path)?;
    let s = qvi::solve(
        QviVariant::FixedCommissions,
        &cfg.market,
        &cfg.costs,
        &cfg.grid,
    )?;

    println!("'.' continue, digit = limit order at that depth, M = market order");
    for j in (0..s.t_steps).step_by((s.t_steps / 20).max(1)) {
        let row: String = s
            .xs()
            .map(|x| match s.decision(0, j, x).action {
                Intervention::Continue => ".".to_string(),
                Intervention::Limit { kappa, .. } => format!("{}", kappa as i64),
                Intervention::Market { .. } => "M".to_string(),
                Intervention::Terminal => "T".to_string(),
            })
            .collect();
        println!("t = {:6.3}  {row}", s.time(j));
    }

    let c = qvi::complementarity(&s, &cfg.market, &cfg.costs)?;
    println!(
        "max complementarity residual {:.3e} = {:.2}*dt at t_index {}, x {}",
        c.max_abs,
        c.max_abs / s.dt,
        c.t_index,
        c.x
    );

    let curves = policy::extract_boundaries(&policy::extract_regions(&s)?)?;
    let b = curves.get(0, Side::Positive).expect("one regime");
    for j in [0, s.t_steps / 2, s.t_steps - 1] {
        println!(
            "t = {:6.3}: limit from {:?}, market from {:?}",
            s.time(j),
            b.x_limit[j],
            b.x_market[j]
        );
    }
    Ok(())
}
