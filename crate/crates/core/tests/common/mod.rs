#![allow(dead_code)]

use std::path::{Path, PathBuf};

use darkpool::Config;

pub fn config_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("configs")
        .join(name)
}

pub fn config(name: &str) -> Config {
    Config::load(&config_path(name)).expect("bundled config loads")
}

/// The fixed-commission configuration on a smaller grid for quick solves.
pub fn small_fixed() -> Config {
    let mut cfg = config("fixed.json");
    cfg.grid.x_min = -8;
    cfg.grid.x_max = 8;
    cfg.grid.t_steps = 40;
    cfg.grid.horizon = 2.0;
    cfg.grid.x0 = 4;
    cfg
}
