//! Sweeps the limit-order penalty and reports where limit orders vanish.
//!
//! `cargo run --release --example viability_sweep`

use darkpool::toy::{self, ToyParams};

fn main() -> darkpool::Result<()> {
    let base = ToyParams::baseline(12);
    println!(
        "threshold p(eps_m + 3k - pk) = {:.4}",
        toy::viability_threshold(&base)
    );
    for eps_l in [
        1.5, 2.0, 3.0, 4.0, 5.0, 5.5, 5.55, 5.56, 5.6, 6.0, 6.4032, 7.0,
    ] {
        let mut p = base.clone();
        p.eps_l = eps_l;
        let table = toy::solve_toy(&p, -50..=50)?;
        let limits = table.rows.iter().filter(|r| r.action.is_limit()).count();
        println!(
            "eps_l = {:<7}: {limits:>5} limit cells, viable = {}",
            p.eps_l,
            toy::limit_order_viable(&p)
        );
    }
    Ok(())
}
