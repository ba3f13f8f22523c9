//! Domain types for the dark-pool market-making problem.
//!
//! The mid-price follows `dS = μ dt + σ dW` (or its geometric variant), the
//! lit-pool half-spread `k` is a continuous-time Markov chain on a finite set
//! of levels with generator `(r_ij)`, and client orders reach the dark pool as
//! Poisson streams whose intensities depend on the commission charged.
//!
//! Inventory conventions follow the reduced equations: an `a`-order (client
//! buy) lowers inventory by its size and earns `a·δᵃ` over the mid; a
//! `b`-order (client sell) raises inventory by its size and earns `b·δᵇ`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on probability masses summing to one.
pub const PROB_SUM_TOL: f64 = 1e-12;

/// Arrival intensity offered at one commission level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Intensity {
    pub delta: f64,
    pub intensity: f64,
}

/// One atom of a discrete order-size law.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SizeMass {
    pub size: u32,
    pub prob: f64,
}

/// Limit-order fill model: a single full-fill probability `p0·exp(−α·κ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FillModel {
    pub p0: f64,
    pub alpha: f64,
}

impl FillModel {
    /// Probability that a limit order posted `kappa` beyond the best quote
    /// executes in full. The no-fill probability is the complement.
    pub fn probability(&self, kappa: f64, kappa_bar: f64) -> Result<f64> {
        if !(0.0..=kappa_bar).contains(&kappa) {
            return Err(Error::Domain(format!(
                "limit offset {kappa} outside [0, {kappa_bar}]"
            )));
        }
        Ok(self.p0 * (-self.alpha * kappa).exp())
    }
}

/// Mid-price dynamics used by the simulator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PriceModel {
    #[default]
    Arithmetic,
    Geometric,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MarketParams {
    pub sigma: f64,
    #[serde(default)]
    pub mu: f64,
    pub s0: f64,
    /// Half-spread levels `k₁ < … < k_n`.
    pub regimes: Vec<f64>,
    /// Rate matrix of the spread chain; rows sum to zero.
    pub generator: Vec<Vec<f64>>,
    pub lambda_a: Vec<Intensity>,
    pub lambda_b: Vec<Intensity>,
    pub size_law_a: Vec<SizeMass>,
    pub size_law_b: Vec<SizeMass>,
    pub fill_model: FillModel,
    #[serde(default)]
    pub price_model: PriceModel,
}

fn lookup(table: &[Intensity], delta: f64) -> Option<f64> {
    table.iter().find(|e| e.delta == delta).map(|e| e.intensity)
}

impl MarketParams {
    /// Client-buy intensity at commission `delta`, if quoted.
    pub fn intensity_a(&self, delta: f64) -> Option<f64> {
        lookup(&self.lambda_a, delta)
    }

    pub fn intensity_b(&self, delta: f64) -> Option<f64> {
        lookup(&self.lambda_b, delta)
    }

    /// Total rate of leaving regime `k_idx`.
    pub fn exit_rate(&self, k_idx: usize) -> f64 {
        self.generator
            .get(k_idx)
            .into_iter()
            .flatten()
            .enumerate()
            .filter(|&(j, _)| j != k_idx)
            .map(|(_, r)| *r)
            .sum()
    }

    pub fn max_exit_rate(&self) -> f64 {
        (0..self.regimes.len())
            .map(|k| self.exit_rate(k))
            .fold(0.0, f64::max)
    }

    pub fn max_order_size(&self) -> u32 {
        self.size_law_a
            .iter()
            .chain(&self.size_law_b)
            .map(|m| m.size)
            .max()
            .unwrap_or(0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CostParams {
    pub eps_m: f64,
    pub eps_l: f64,
    pub delta_menu_a: Vec<f64>,
    pub delta_menu_b: Vec<f64>,
    pub kappa_bar: f64,
    pub kappa_grid: Vec<f64>,
    /// Weight of the running penalty `−φx²`.
    pub phi: f64,
    /// Lit orders may only reduce |inventory| and none are sent at zero.
    #[serde(default = "default_true")]
    pub no_speculation: bool,
}

fn default_true() -> bool {
    true
}

impl CostParams {
    /// Largest intensity offered on either side over the configured menus.
    pub fn max_intensities(&self, market: &MarketParams) -> (f64, f64) {
        let a = self
            .delta_menu_a
            .iter()
            .filter_map(|d| market.intensity_a(*d))
            .fold(0.0, f64::max);
        let b = self
            .delta_menu_b
            .iter()
            .filter_map(|d| market.intensity_b(*d))
            .fold(0.0, f64::max);
        (a, b)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObservationMode {
    #[default]
    Continuous,
    Discrete,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub x_min: i64,
    pub x_max: i64,
    pub t_steps: usize,
    pub horizon: f64,
    #[serde(default)]
    pub observation_mode: ObservationMode,
    /// Cash bounds of the admissible domain; validated, used only by the
    /// simulator's optional exit rule.
    #[serde(default)]
    pub y_min: Option<f64>,
    #[serde(default)]
    pub y_max: Option<f64>,
    /// Initial state used by the simulator.
    #[serde(default)]
    pub x0: i64,
    #[serde(default)]
    pub y0: f64,
    #[serde(default)]
    pub k0: usize,
}

impl GridSpec {
    pub fn dt(&self) -> f64 {
        self.horizon / self.t_steps as f64
    }

    pub fn n_x(&self) -> usize {
        (self.x_max - self.x_min + 1) as usize
    }

    pub fn time(&self, j: usize) -> f64 {
        j as f64 * self.dt()
    }

    pub fn contains(&self, x: i64) -> bool {
        (self.x_min..=self.x_max).contains(&x)
    }
}

/// A point of the controlled state space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct State {
    pub t: f64,
    pub x: i64,
    pub y: f64,
    pub s: f64,
    pub k_idx: usize,
}

/// Machine-readable identifiers for violated invariants.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ViolationCode {
    NonFinite,
    EpsOrdering,
    GeneratorShape,
    GeneratorOffDiagonal,
    GeneratorRowSum,
    NegativeIntensity,
    MissingIntensity,
    NegativeHalfSpread,
    RegimeIndex,
    SizeLawSum,
    SizeLawSupport,
    FillProbability,
    FillDecay,
    CommissionRange,
    EmptyMenu,
    KappaGrid,
    NegativePhi,
    InventoryBounds,
    TimeGrid,
    CashBounds,
    Stability,
}

impl ViolationCode {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::NonFinite => "non_finite",
            Self::EpsOrdering => "eps_ordering",
            Self::GeneratorShape => "generator_shape",
            Self::GeneratorOffDiagonal => "generator_off_diagonal",
            Self::GeneratorRowSum => "generator_row_sum",
            Self::NegativeIntensity => "negative_intensity",
            Self::MissingIntensity => "missing_intensity",
            Self::NegativeHalfSpread => "negative_half_spread",
            Self::RegimeIndex => "regime_index",
            Self::SizeLawSum => "size_law_sum",
            Self::SizeLawSupport => "size_law_support",
            Self::FillProbability => "fill_probability",
            Self::FillDecay => "fill_decay",
            Self::CommissionRange => "commission_range",
            Self::EmptyMenu => "empty_menu",
            Self::KappaGrid => "kappa_grid",
            Self::NegativePhi => "negative_phi",
            Self::InventoryBounds => "inventory_bounds",
            Self::TimeGrid => "time_grid",
            Self::CashBounds => "cash_bounds",
            Self::Stability => "stability",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub code: &'static str,
    pub detail: String,
}

/// Every violated invariant of a configuration; empty when valid.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn has(&self, code: ViolationCode) -> bool {
        self.violations.iter().any(|v| v.code == code.as_str())
    }

    fn push(&mut self, code: ViolationCode, detail: impl Into<String>) {
        self.violations.push(Violation {
            code: code.as_str(),
            detail: detail.into(),
        });
    }
}

impl std::fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for v in &self.violations {
            writeln!(f, "{}: {}", v.code, v.detail)?;
        }
        Ok(())
    }
}

/// Largest total event rate the explicit scheme must absorb in one step.
pub fn max_event_rate(market: &MarketParams, costs: &CostParams) -> f64 {
    let (a, b) = costs.max_intensities(market);
    a + b + market.max_exit_rate()
}

/// Checks the standing assumptions in their finite form. Never fails; the
/// caller decides what to do with the report.
pub fn validate(market: &MarketParams, costs: &CostParams, grid: &GridSpec) -> ValidationReport {
    use ViolationCode as C;
    let mut r = ValidationReport::default();

    let scalars = [
        ("market.sigma", market.sigma),
        ("market.mu", market.mu),
        ("market.s0", market.s0),
        ("market.fill_model.p0", market.fill_model.p0),
        ("market.fill_model.alpha", market.fill_model.alpha),
        ("costs.eps_m", costs.eps_m),
        ("costs.eps_l", costs.eps_l),
        ("costs.kappa_bar", costs.kappa_bar),
        ("costs.phi", costs.phi),
        ("grid.horizon", grid.horizon),
        ("grid.y0", grid.y0),
    ];
    let mut lists: Vec<f64> = market.regimes.clone();
    lists.extend(market.generator.iter().flatten());
    for e in market.lambda_a.iter().chain(&market.lambda_b) {
        lists.extend([e.delta, e.intensity]);
    }
    lists.extend(
        market
            .size_law_a
            .iter()
            .chain(&market.size_law_b)
            .map(|m| m.prob),
    );
    lists.extend(&costs.delta_menu_a);
    lists.extend(&costs.delta_menu_b);
    lists.extend(&costs.kappa_grid);
    for (name, v) in scalars {
        if !v.is_finite() {
            r.push(C::NonFinite, format!("{name} = {v}"));
        }
    }
    if lists.iter().any(|v| !v.is_finite()) {
        r.push(C::NonFinite, "non-finite entry in a list field");
    }

    if !(costs.eps_m > costs.eps_l && costs.eps_l > 1.0) {
        r.push(
            C::EpsOrdering,
            format!(
                "need eps_m > eps_l > 1, got eps_m = {}, eps_l = {}",
                costs.eps_m, costs.eps_l
            ),
        );
    }

    let n = market.regimes.len();
    if n == 0 {
        r.push(C::GeneratorShape, "no half-spread regimes");
    }
    if market.generator.len() != n || market.generator.iter().any(|row| row.len() != n) {
        r.push(
            C::GeneratorShape,
            format!("generator must be {n}x{n} to match the regime list"),
        );
    } else {
        for (i, row) in market.generator.iter().enumerate() {
            for (j, &rate) in row.iter().enumerate() {
                if i != j && rate < 0.0 {
                    r.push(C::GeneratorOffDiagonal, format!("r[{i}][{j}] = {rate} < 0"));
                }
            }
            let sum: f64 = row.iter().sum();
            let scale = row.iter().map(|v| v.abs()).fold(1.0, f64::max);
            if sum.abs() > 1e-12 * scale {
                r.push(C::GeneratorRowSum, format!("row {i} sums to {sum}"));
            }
            if row[i] > 0.0 {
                r.push(
                    C::GeneratorRowSum,
                    format!("diagonal r[{i}][{i}] = {} > 0", row[i]),
                );
            }
        }
    }
    for (i, &k) in market.regimes.iter().enumerate() {
        if k < 0.0 {
            r.push(C::NegativeHalfSpread, format!("regime {i} has k = {k}"));
        }
    }
    if n > 0 && grid.k0 >= n {
        r.push(
            C::RegimeIndex,
            format!("k0 = {} but only {n} regimes", grid.k0),
        );
    }

    for (side, table) in [("a", &market.lambda_a), ("b", &market.lambda_b)] {
        for e in table.iter() {
            if e.intensity < 0.0 {
                r.push(
                    C::NegativeIntensity,
                    format!("lambda_{side}({}) = {}", e.delta, e.intensity),
                );
            }
        }
    }
    for (side, menu, table) in [
        ("a", &costs.delta_menu_a, &market.lambda_a),
        ("b", &costs.delta_menu_b, &market.lambda_b),
    ] {
        if menu.is_empty() {
            r.push(C::EmptyMenu, format!("delta_menu_{side} is empty"));
        }
        for &d in menu.iter() {
            if lookup(table, d).is_none() {
                r.push(
                    C::MissingIntensity,
                    format!("no lambda_{side} entry for commission {d}"),
                );
            }
            let k_min = market.regimes.iter().copied().fold(f64::INFINITY, f64::min);
            if d < 0.0 || (n > 0 && d > k_min) {
                r.push(
                    C::CommissionRange,
                    format!("commission {d} on side {side} outside [0, {k_min}]"),
                );
            }
        }
    }

    for (side, law) in [("a", &market.size_law_a), ("b", &market.size_law_b)] {
        if law.is_empty() || law.iter().any(|m| m.size == 0 || m.prob < 0.0) {
            r.push(
                C::SizeLawSupport,
                format!("size_law_{side} needs positive sizes with non-negative mass"),
            );
        }
        let total: f64 = law.iter().map(|m| m.prob).sum();
        if (total - 1.0).abs() > PROB_SUM_TOL {
            r.push(C::SizeLawSum, format!("size_law_{side} sums to {total}"));
        }
    }

    let fill = market.fill_model;
    if !(fill.p0 > 0.0 && fill.p0 <= 1.0) {
        r.push(
            C::FillProbability,
            format!("p0 = {} outside (0, 1]", fill.p0),
        );
    }
    if fill.alpha < 0.0 {
        r.push(C::FillDecay, format!("alpha = {} < 0", fill.alpha));
    }
    if costs.kappa_bar < 0.0
        || costs.kappa_grid.is_empty()
        || costs
            .kappa_grid
            .iter()
            .any(|&kappa| !(0.0..=costs.kappa_bar).contains(&kappa))
    {
        r.push(
            C::KappaGrid,
            format!(
                "kappa grid {:?} must be non-empty and inside [0, {}]",
                costs.kappa_grid, costs.kappa_bar
            ),
        );
    }
    if costs.phi < 0.0 {
        r.push(C::NegativePhi, format!("phi = {} < 0", costs.phi));
    }

    if !(grid.x_min < 0 && grid.x_max > 0) {
        r.push(
            C::InventoryBounds,
            format!(
                "need x_min < 0 < x_max, got [{}, {}]",
                grid.x_min, grid.x_max
            ),
        );
    } else if !grid.contains(grid.x0) {
        r.push(
            C::InventoryBounds,
            format!("x0 = {} outside [{}, {}]", grid.x0, grid.x_min, grid.x_max),
        );
    }
    if grid.t_steps == 0 || !(grid.horizon > 0.0) {
        r.push(
            C::TimeGrid,
            format!(
                "need t_steps >= 1 and horizon > 0, got {} and {}",
                grid.t_steps, grid.horizon
            ),
        );
    }
    if let (Some(lo), Some(hi)) = (grid.y_min, grid.y_max) {
        if !(lo < hi) || !(lo..=hi).contains(&grid.y0) {
            r.push(
                C::CashBounds,
                format!(
                    "cash bounds [{lo}, {hi}] must be ordered and contain y0 = {}",
                    grid.y0
                ),
            );
        }
    }

    if grid.t_steps > 0 && grid.horizon > 0.0 {
        let rate = max_event_rate(market, costs);
        let product = grid.dt() * rate;
        if product > 1.0 {
            r.push(
                C::Stability,
                format!(
                    "dt * max_event_rate = {} * {} = {product} > 1",
                    grid.dt(),
                    rate
                ),
            );
        }
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn sample() -> (MarketParams, CostParams, GridSpec) {
        let market = MarketParams {
            sigma: 0.1,
            mu: 0.0,
            s0: 100.0,
            regimes: vec![0.5],
            generator: vec![vec![0.0]],
            lambda_a: vec![Intensity {
                delta: 0.25,
                intensity: 0.5,
            }],
            lambda_b: vec![Intensity {
                delta: 0.25,
                intensity: 0.5,
            }],
            size_law_a: vec![SizeMass { size: 1, prob: 1.0 }],
            size_law_b: vec![SizeMass { size: 1, prob: 1.0 }],
            fill_model: FillModel {
                p0: 0.92,
                alpha: 0.0,
            },
            price_model: PriceModel::Arithmetic,
        };
        let costs = CostParams {
            eps_m: 5.0,
            eps_l: 3.0,
            delta_menu_a: vec![0.25],
            delta_menu_b: vec![0.25],
            kappa_bar: 0.0,
            kappa_grid: vec![0.0],
            phi: 0.0,
            no_speculation: true,
        };
        let grid = GridSpec {
            x_min: -10,
            x_max: 10,
            t_steps: 25,
            horizon: 25.0,
            observation_mode: ObservationMode::Discrete,
            y_min: None,
            y_max: None,
            x0: 0,
            y0: 0.0,
            k0: 0,
        };
        (market, costs, grid)
    }

    #[test]
    fn baseline_costs_are_valid() {
        let (m, c, g) = sample();
        let report = validate(&m, &c, &g);
        assert!(report.is_valid(), "{report}");
    }

    #[test]
    fn equal_penalties_violate_ordering() {
        let (m, mut c, g) = sample();
        c.eps_m = 2.0;
        c.eps_l = 2.0;
        let report = validate(&m, &c, &g);
        assert!(report.has(ViolationCode::EpsOrdering));
        assert_eq!(report.violations.len(), 1);
    }

    #[test]
    fn reversed_generator_row_is_reported() {
        let (mut m, c, g) = sample();
        m.regimes = vec![0.5, 1.0];
        m.generator = vec![vec![0.5, -0.5], vec![0.5, -0.5]];
        let report = validate(&m, &c, &g);
        assert!(report.has(ViolationCode::GeneratorRowSum));
        assert!(report.has(ViolationCode::GeneratorOffDiagonal));
    }

    #[test]
    fn mismatched_generator_shape() {
        let (mut m, c, g) = sample();
        m.regimes = vec![0.5, 1.0];
        let report = validate(&m, &c, &g);
        assert!(report.has(ViolationCode::GeneratorShape));
    }

    #[test]
    fn commission_above_spread_and_missing_intensity() {
        let (m, mut c, g) = sample();
        c.delta_menu_a = vec![0.6];
        let report = validate(&m, &c, &g);
        assert!(report.has(ViolationCode::CommissionRange));
        assert!(report.has(ViolationCode::MissingIntensity));
    }

    #[test]
    fn size_law_and_fill_checks() {
        let (mut m, c, g) = sample();
        m.size_law_b = vec![
            SizeMass { size: 1, prob: 0.5 },
            SizeMass { size: 2, prob: 0.4 },
        ];
        m.fill_model.p0 = 0.0;
        let report = validate(&m, &c, &g);
        assert!(report.has(ViolationCode::SizeLawSum));
        assert!(report.has(ViolationCode::FillProbability));
    }

    #[test]
    fn stability_bound() {
        let (m, c, mut g) = sample();
        g.t_steps = 20; // dt = 1.25, rate = 1
        let report = validate(&m, &c, &g);
        assert!(report.has(ViolationCode::Stability));
    }

    #[test]
    fn validation_is_pure() {
        let (mut m, mut c, g) = sample();
        c.eps_l = 0.5;
        m.fill_model.alpha = -1.0;
        assert_eq!(validate(&m, &c, &g), validate(&m, &c, &g));
    }

    #[test]
    fn fill_probability_examples() {
        let f = FillModel {
            p0: 0.9,
            alpha: 0.5,
        };
        assert_eq!(f.probability(0.0, 2.0).unwrap(), 0.9);
        let v = f.probability(2.0, 2.0).unwrap();
        // 0.9 / e via the exponential series, independent of f64::exp
        let inv_e: f64 = (0..30)
            .map(|n| (-1.0f64).powi(n) / (1..=n).map(f64::from).product::<f64>())
            .sum();
        assert!((v - 0.9 * inv_e).abs() < 1e-15);
        assert!((v - 0.33109).abs() < 1e-5);
        let flat = FillModel {
            p0: 0.92,
            alpha: 0.0,
        };
        for kappa in [0.0, 0.7, 2.0] {
            assert_eq!(flat.probability(kappa, 2.0).unwrap(), 0.92);
        }
        assert!(matches!(f.probability(2.5, 2.0), Err(Error::Domain(_))));
        assert!(matches!(f.probability(-0.1, 2.0), Err(Error::Domain(_))));
    }
}
