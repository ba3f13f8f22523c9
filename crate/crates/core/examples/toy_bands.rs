//! Solves the discrete toy model and prints its action bands.
//!
//! `cargo run --release --example toy_bands -- [stages] [eps_l]`

use darkpool::toy::{self, ToyParams};

fn main() -> darkpool::Result<()> {
    let mut args = std::env::args().skip(1);
    let stages: usize = args.next().map_or(25, |s| s.parse().expect("stages"));
    let mut params = ToyParams::baseline(stages);
    if let Some(e) = args.next() {
        params.eps_l = e.parse().expect("eps_l");
    }

    let table = toy::solve_toy(&params, -50..=50)?;
    println!(
        "{} stages, {} distinguishable strategies, limit orders viable: {} (threshold {:.4})",
        stages,
        toy::count_distinguishable(stages as u64)?,
        toy::limit_order_viable(&params),
        toy::viability_threshold(&params)
    );
    println!("rows: stages remaining, columns: x = -50..50");
    for stage in (1..=stages).rev() {
        let row: String = (-50..=50)
            .map(
                |x| match table.get(stage, x).expect("in range").action.as_str() {
                    "DP" => '.',
                    "LS" => 's',
                    "LB" => 'b',
                    "MS" => 'S',
                    _ => 'B',
                },
            )
            .collect();
        println!("{stage:>3} {row}");
    }
    Ok(())
}
