//! Solves the regime-switching QVI and compares the lit boundaries of
//! each half-spread regime.
//!
//! `cargo run --release --example regime_switching`

use std::path::Path;

use darkpool::policy::{self, Side};
use darkpool::qvi::{self, QviVariant};
use darkpool::Config;

fn main() -> darkpool::Result<()> {
    let cfg = Config::load(&Path::new(env!("CARGO_MANIFEST_DIR")).join("configs/regimes.json"))?;
    let s = qvi::solve(
        QviVariant::RegimeSwitching,
        &cfg.market,
        &cfg.costs,
        &cfg.grid,
    )?;
    let curves = policy::extract_boundaries(&policy::extract_regions(&s)?)?;

    print!("{:>8}", "t");
    for k in &cfg.market.regimes {
        print!("{:>10}", format!("k={k}"));
    }
    println!("   (innermost lit |x|, '-' for none)");
    for j in (0..s.t_steps).step_by(20).chain([s.t_steps - 1]) {
        print!("{:>8.3}", s.time(j));
        for k in 0..s.n_regimes() {
            let lit = curves.get(k, Side::Positive).expect("regime").lit(j);
            print!("{:>10}", lit.map_or("-".to_string(), |x| x.to_string()));
        }
        println!();
    }
    Ok(())
}
