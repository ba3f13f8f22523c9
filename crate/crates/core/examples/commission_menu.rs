//! Solves the commission-menu QVI and shows which commission is quoted
//! in the continuation region.
//!
//! `cargo run --release --example commission_menu`

use std::path::Path;

use darkpool::qvi::{self, Intervention, QviVariant};
use darkpool::Config;

fn main() -> darkpool::Result<()> {
    let cfg = Config::load(&Path::new(env!("CARGO_MANIFEST_DIR")).join("configs/menu.json"))?;
    let s = qvi::solve(
        QviVariant::CommissionMenu,
        &cfg.market,
        &cfg.costs,
        &cfg.grid,
    )?;
    let low = cfg
        .costs
        .delta_menu_a
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min);

    println!("commission on the side that adds inventory: '-' low, '+' high; L limit, M market");
    for j in (0..s.t_steps).step_by(10) {
        let row: String = s
            .xs()
            .map(|x| {
                let d = s.decision(0, j, x);
                match d.action {
                    Intervention::Continue => {
                        let adding = if x >= 0 { d.delta_b } else { d.delta_a };
                        if adding > low {
                            '+'
                        } else {
                            '-'
                        }
                    }
                    Intervention::Limit { .. } => 'L',
                    _ => 'M',
                }
            })
            .collect();
        println!("t = {:6.3}  {row}", s.time(j));
    }
    Ok(())
}
