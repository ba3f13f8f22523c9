//! The JSON run configuration shared by every subcommand.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::model::{validate, CostParams, GridSpec, MarketParams, ValidationReport};

/// Top-level document: `{"market": …, "costs": …, "grid": …}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub market: MarketParams,
    pub costs: CostParams,
    pub grid: GridSpec,
}

impl Config {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> ValidationReport {
        validate(&self.market, &self.costs, &self.grid)
    }

    /// SHA-256 over the canonical JSON form (sorted keys, defaults filled).
    pub fn hash(&self) -> String {
        canonical_hash(self)
    }

    /// Hash of the grid geometry a policy table depends on.
    pub fn grid_hash(&self) -> String {
        grid_fingerprint(
            self.market.regimes.len(),
            self.grid.x_min,
            self.grid.x_max,
            self.grid.t_steps,
            self.grid.dt(),
        )
    }
}

pub(crate) fn canonical_hash<T: Serialize>(value: &T) -> String {
    // serde_json::Value keeps object keys in a BTreeMap, so this is key-sorted.
    let canonical = serde_json::to_value(value)
        .and_then(|v| serde_json::to_string(&v))
        .expect("configuration types always serialize");
    hex(&Sha256::digest(canonical.as_bytes()))
}

pub(crate) fn grid_fingerprint(
    regimes: usize,
    x_min: i64,
    x_max: i64,
    t_steps: usize,
    dt: f64,
) -> String {
    let text = format!("regimes={regimes};x=[{x_min},{x_max}];steps={t_steps};dt={dt}");
    hex(&Sha256::digest(text.as_bytes()))
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const TOY: &str = r#"{
        "market": {
            "sigma": 0.1, "s0": 100.0, "regimes": [0.5], "generator": [[0.0]],
            "lambda_a": [{"delta": 0.25, "intensity": 0.5}],
            "lambda_b": [{"delta": 0.25, "intensity": 0.5}],
            "size_law_a": [{"size": 1, "prob": 1.0}],
            "size_law_b": [{"size": 1, "prob": 1.0}],
            "fill_model": {"p0": 0.92, "alpha": 0.0}
        },
        "costs": {"eps_m": 5.0, "eps_l": 3.0, "delta_menu_a": [0.25], "delta_menu_b": [0.25],
                  "kappa_bar": 0.0, "kappa_grid": [0.0], "phi": 0.0},
        "grid": {"x_min": -50, "x_max": 50, "t_steps": 25, "horizon": 25.0,
                 "observation_mode": "discrete"}
    }"#;

    #[test]
    fn parses_and_validates() {
        let cfg = Config::from_json(TOY).unwrap();
        assert!(cfg.validate().is_valid());
        assert!(cfg.costs.no_speculation);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let bad = TOY.replacen("\"costs\"", "\"extra\": 1, \"costs\"", 1);
        assert!(matches!(Config::from_json(&bad), Err(Error::Config(_))));
        let bad = TOY.replacen("\"phi\": 0.0", "\"phi\": 0.0, \"gamma\": 1", 1);
        assert!(Config::from_json(&bad).is_err());
    }

    #[test]
    fn missing_section_names_the_key() {
        let start = TOY.find("\"costs\"").unwrap();
        let end = TOY.find("\"grid\"").unwrap();
        let text = format!("{}{}", &TOY[..start], &TOY[end..]);
        let err = Config::from_json(&text).unwrap_err().to_string();
        assert!(err.contains("costs"), "{err}");
    }

    #[test]
    fn hash_ignores_formatting() {
        let a = Config::from_json(TOY).unwrap();
        let compact: serde_json::Value = serde_json::from_str(TOY).unwrap();
        let b = Config::from_json(&compact.to_string()).unwrap();
        assert_eq!(a.hash(), b.hash());
        let mut c = a.clone();
        c.costs.eps_l = 3.5;
        assert_ne!(a.hash(), c.hash());
    }
}
