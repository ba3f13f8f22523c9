//! Drives the command-line entry point in-process: solve, simulate the
//! saved surface, and re-extract the boundaries from it.
//!
//! `cargo run --release --example cli_pipeline -- [out_dir]`

use std::path::{Path, PathBuf};

fn main() {
    let out = std::env::args().nth(1).map_or_else(
        || std::env::temp_dir().join("darkpool-pipeline"),
        PathBuf::from,
    );
    let config = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs/fixed.json");
    let (cfg, out_s) = (config.to_str().unwrap(), out.to_str().unwrap());
    let solve = format!("{out_s}/solve");
    let surface = format!("{solve}/surface.csv");
    let (sim, bounds) = (format!("{out_s}/sim"), format!("{out_s}/boundaries"));
    let steps: [Vec<&str>; 3] = [
        vec!["solve", "--config", cfg, "--out", &solve],
        vec![
            "simulate", "--config", cfg, "--policy", &surface, "--paths", "20000", "--seed", "5",
            "--out", &sim,
        ],
        vec![
            "boundaries",
            "--policy",
            &surface,
            "--config",
            cfg,
            "--out",
            &bounds,
        ],
    ];
    for args in steps {
        let code = darkpool::cli::run(std::iter::once("darkpool").chain(args.iter().copied()));
        println!("darkpool {} -> exit {code}", args[0]);
        if code != 0 {
            std::process::exit(code);
        }
    }
    let summary = std::fs::read_to_string(out.join("sim/summary.json")).expect("summary written");
    println!("artifacts in {}\n{summary}", out.display());
}
