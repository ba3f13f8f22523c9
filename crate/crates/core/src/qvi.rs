//! Projected explicit backward scheme for the reduced impulse-control
//! problem in `h(t, x)`, where the full value is `y + xs + h(t, x)`.
//!
//! One time step from `t_{j+1}` to `t_j`:
//!
//! 1. continuation: `h̃ = h^{j+1} + dt·rhs(h^{j+1})`, with
//!    `rhs = −φx² + sup_δ λᵃ(δ)E[aδ + h(x−a) − h(x)] + sup_δ λᵇ(δ)E[bδ + h(x+b) − h(x)]
//!    + Σ_{j≠k} r_kj (h_j − h_k)`;
//! 2. projection: `h^j = max(h̃, 𝓛h̃, 𝓜h̃)` node-wise, so at most one lit
//!    order is sent per grid time.
//!
//! Ties go to Continue, then Limit, then Market.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{max_event_rate, CostParams, GridSpec, MarketParams};

/// The three reduced problems.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QviVariant {
    /// One regime, one commission per side.
    FixedCommissions,
    /// One regime, commission chosen from a menu.
    CommissionMenu,
    /// Several half-spread regimes coupled by the generator.
    RegimeSwitching,
}

impl QviVariant {
    pub fn as_str(self) -> &'static str {
        match self {
            QviVariant::FixedCommissions => "fixed",
            QviVariant::CommissionMenu => "menu",
            QviVariant::RegimeSwitching => "regime",
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "fixed" => Ok(QviVariant::FixedCommissions),
            "menu" => Ok(QviVariant::CommissionMenu),
            "regime" => Ok(QviVariant::RegimeSwitching),
            other => Err(Error::Config(format!(
                "unknown variant {other:?}; expected fixed, menu or regime"
            ))),
        }
    }

    /// The variant a configuration naturally describes.
    pub fn infer(market: &MarketParams, costs: &CostParams) -> Self {
        if market.regimes.len() > 1 {
            QviVariant::RegimeSwitching
        } else if costs.delta_menu_a.len() > 1 || costs.delta_menu_b.len() > 1 {
            QviVariant::CommissionMenu
        } else {
            QviVariant::FixedCommissions
        }
    }

    pub fn check(self, market: &MarketParams, costs: &CostParams) -> Result<()> {
        let n = market.regimes.len();
        match self {
            QviVariant::RegimeSwitching if n < 2 => Err(Error::Config(format!(
                "regime variant needs at least two regimes, got {n}"
            ))),
            QviVariant::FixedCommissions | QviVariant::CommissionMenu if n != 1 => {
                Err(Error::Config(format!(
                    "{} variant needs exactly one regime, got {n}",
                    self.as_str()
                )))
            }
            QviVariant::FixedCommissions
                if costs.delta_menu_a.len() != 1 || costs.delta_menu_b.len() != 1 =>
            {
                Err(Error::Config(
                    "fixed variant needs a single commission per side".into(),
                ))
            }
            _ => Ok(()),
        }
    }
}

impl std::fmt::Display for QviVariant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// What the agent does at a node, besides keeping the dark pool open.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Intervention {
    Continue,
    /// Post a unit limit order in direction `eta` (+1 buy, −1 sell), `kappa`
    /// beyond the best quote.
    Limit {
        eta: i8,
        kappa: f64,
    },
    /// Send a unit market order in direction `xi`.
    Market {
        xi: i8,
    },
    /// The horizon; inventory is liquidated.
    Terminal,
}

impl Intervention {
    pub fn name(&self) -> &'static str {
        match self {
            Intervention::Continue => "continue",
            Intervention::Limit { .. } => "limit",
            Intervention::Market { .. } => "market",
            Intervention::Terminal => "terminal",
        }
    }
}

/// Per-node record: the intervention and the commissions in force.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Decision {
    pub action: Intervention,
    pub delta_a: f64,
    pub delta_b: f64,
}

impl Decision {
    const TERMINAL: Decision = Decision {
        action: Intervention::Terminal,
        delta_a: f64::NAN,
        delta_b: f64::NAN,
    };
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Continuation {
    pub value: f64,
    pub delta_a: f64,
    pub delta_b: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarketObstacle {
    /// `−∞` when no direction is admissible.
    pub value: f64,
    /// 0 when no direction is admissible.
    pub xi: i8,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimitObstacle {
    pub value: f64,
    pub eta: i8,
    pub kappa: f64,
}

/// The continuation generator and both intervention operators on a fixed
/// inventory lattice.
#[derive(Debug, Clone)]
pub struct Operators<'a> {
    pub market: &'a MarketParams,
    pub costs: &'a CostParams,
    pub x_min: i64,
    pub x_max: i64,
    menu_a: Vec<(f64, f64)>,
    menu_b: Vec<(f64, f64)>,
    fills: Vec<(f64, f64)>,
}

impl<'a> Operators<'a> {
    pub fn new(
        market: &'a MarketParams,
        costs: &'a CostParams,
        x_min: i64,
        x_max: i64,
    ) -> Result<Self> {
        if x_min >= x_max {
            return Err(Error::Domain(format!(
                "empty inventory grid [{x_min}, {x_max}]"
            )));
        }
        let quote = |menu: &[f64], side: &str, f: &dyn Fn(f64) -> Option<f64>| {
            menu.iter()
                .map(|&d| {
                    f(d).map(|l| (d, l)).ok_or_else(|| {
                        Error::Config(format!("no lambda_{side} entry for commission {d}"))
                    })
                })
                .collect::<Result<Vec<_>>>()
        };
        let menu_a = quote(&costs.delta_menu_a, "a", &|d| market.intensity_a(d))?;
        let menu_b = quote(&costs.delta_menu_b, "b", &|d| market.intensity_b(d))?;
        let fills = costs
            .kappa_grid
            .iter()
            .map(|&kappa| {
                Ok((
                    kappa,
                    market.fill_model.probability(kappa, costs.kappa_bar)?,
                ))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            market,
            costs,
            x_min,
            x_max,
            menu_a,
            menu_b,
            fills,
        })
    }

    pub fn n_x(&self) -> usize {
        (self.x_max - self.x_min + 1) as usize
    }

    /// `h(x)` on the lattice, extended linearly with slope `−k` outside it.
    pub fn value_at(&self, slice: &[f64], x: i64, k: f64) -> f64 {
        let n = self.n_x();
        if x > self.x_max {
            let slope = (slice[n - 1] - slice[n - 2]).min(-k);
            slice[n - 1] + slope * (x - self.x_max) as f64
        } else if x < self.x_min {
            let slope = (slice[0] - slice[1]).min(-k);
            slice[0] + slope * (self.x_min - x) as f64
        } else {
            slice[(x - self.x_min) as usize]
        }
    }

    /// Whether a unit lit order in direction `dir` may be sent from `x`.
    pub fn admissible(&self, x: i64, dir: i8) -> bool {
        let target = x + dir as i64;
        if target < self.x_min || target > self.x_max {
            return false;
        }
        !self.costs.no_speculation || (dir > 0 && x < 0) || (dir < 0 && x > 0)
    }

    /// Right-hand side of the continuation equation at `x` in regime `k_idx`,
    /// given the slices of every regime at one time.
    pub fn continuation_rhs(&self, slices: &[&[f64]], x: i64, k_idx: usize) -> Continuation {
        let k = self.market.regimes[k_idx];
        let slice = slices[k_idx];
        let here = self.value_at(slice, x, k);
        let side = |menu: &[(f64, f64)], sizes: &[crate::model::SizeMass], sign: i64| {
            let mut best = (f64::NEG_INFINITY, f64::NAN);
            for &(delta, lambda) in menu {
                let mean: f64 = sizes
                    .iter()
                    .map(|m| {
                        let a = m.size as i64;
                        m.prob * (a as f64 * delta + self.value_at(slice, x + sign * a, k) - here)
                    })
                    .sum();
                let v = lambda * mean;
                if v > best.0 {
                    best = (v, delta);
                }
            }
            best
        };
        let (jump_a, delta_a) = side(&self.menu_a, &self.market.size_law_a, -1);
        let (jump_b, delta_b) = side(&self.menu_b, &self.market.size_law_b, 1);
        let coupling: f64 = self.market.generator[k_idx]
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != k_idx)
            .map(|(j, r)| r * (self.value_at(slices[j], x, self.market.regimes[j]) - here))
            .sum();
        let xf = x as f64;
        Continuation {
            value: -self.costs.phi * xf * xf + jump_a + jump_b + coupling,
            delta_a,
            delta_b,
        }
    }

    /// `sup_ξ [−k − ε_m + h(x+ξ)]` over admissible unit market orders.
    pub fn market_obstacle(&self, slice: &[f64], x: i64, k: f64) -> MarketObstacle {
        let mut best = MarketObstacle {
            value: f64::NEG_INFINITY,
            xi: 0,
        };
        for xi in [-1i8, 1] {
            if !self.admissible(x, xi) {
                continue;
            }
            let v = -k - self.costs.eps_m + self.value_at(slice, x + xi as i64, k);
            if v > best.value {
                best = MarketObstacle { value: v, xi };
            }
        }
        best
    }

    /// `sup_{η,κ} ℓ(κ)(k + κ + h(x+η)) + (1 − ℓ(κ))h(x) − ε_l` over admissible
    /// unit limit orders and the κ grid.
    pub fn limit_obstacle(&self, slice: &[f64], x: i64, k: f64) -> LimitObstacle {
        let mut best = LimitObstacle {
            value: f64::NEG_INFINITY,
            eta: 0,
            kappa: f64::NAN,
        };
        let here = self.value_at(slice, x, k);
        for eta in [-1i8, 1] {
            if !self.admissible(x, eta) {
                continue;
            }
            let there = self.value_at(slice, x + eta as i64, k);
            for &(kappa, fill) in &self.fills {
                let v = fill * (k + kappa + there) + (1.0 - fill) * here - self.costs.eps_l;
                if v > best.value {
                    best = LimitObstacle {
                        value: v,
                        eta,
                        kappa,
                    };
                }
            }
        }
        best
    }

    /// Projection with the Continue > Limit > Market tie-break.
    fn decide(&self, slice: &[f64], x: i64, k: f64, cont: Continuation) -> (f64, Decision) {
        let here = slice[(x - self.x_min) as usize];
        let mut value = here;
        let mut action = Intervention::Continue;
        let lim = self.limit_obstacle(slice, x, k);
        if lim.value > value {
            value = lim.value;
            action = Intervention::Limit {
                eta: lim.eta,
                kappa: lim.kappa,
            };
        }
        let mkt = self.market_obstacle(slice, x, k);
        if mkt.value > value {
            value = mkt.value;
            action = Intervention::Market { xi: mkt.xi };
        }
        (
            value,
            Decision {
                action,
                delta_a: cont.delta_a,
                delta_b: cont.delta_b,
            },
        )
    }
}

/// Value function and decisions over regimes × time × inventory.
#[derive(Debug, Clone, PartialEq)]
pub struct ValueSurface {
    pub variant: QviVariant,
    pub regimes: Vec<f64>,
    pub x_min: i64,
    pub x_max: i64,
    pub t_steps: usize,
    pub dt: f64,
    h: Vec<f64>,
    continuation: Vec<f64>,
    decisions: Vec<Decision>,
}

impl ValueSurface {
    pub fn n_x(&self) -> usize {
        (self.x_max - self.x_min + 1) as usize
    }

    pub fn n_regimes(&self) -> usize {
        self.regimes.len()
    }

    pub fn time(&self, j: usize) -> f64 {
        j as f64 * self.dt
    }

    pub fn horizon(&self) -> f64 {
        self.time(self.t_steps)
    }

    pub fn xs(&self) -> std::ops::RangeInclusive<i64> {
        self.x_min..=self.x_max
    }

    fn index(&self, k: usize, j: usize, x: i64) -> usize {
        assert!(
            k < self.n_regimes() && j <= self.t_steps && (self.x_min..=self.x_max).contains(&x),
            "node ({k}, {j}, {x}) outside the surface"
        );
        (k * (self.t_steps + 1) + j) * self.n_x() + (x - self.x_min) as usize
    }

    pub fn h(&self, k: usize, j: usize, x: i64) -> f64 {
        self.h[self.index(k, j, x)]
    }

    /// `h(t_j, ·)` in regime `k` over the inventory lattice.
    pub fn slice(&self, k: usize, j: usize) -> &[f64] {
        let start = self.index(k, j, self.x_min);
        &self.h[start..start + self.n_x()]
    }

    /// The pre-projection continuation slice `h̃` at `t_j`.
    pub fn continuation_slice(&self, k: usize, j: usize) -> &[f64] {
        let start = self.index(k, j, self.x_min);
        &self.continuation[start..start + self.n_x()]
    }

    pub fn decision(&self, k: usize, j: usize, x: i64) -> Decision {
        self.decisions[self.index(k, j, x)]
    }

    pub fn values(&self) -> &[f64] {
        &self.h
    }

    /// `max |h(t,x) − h(t,−x)|` over all nodes whose mirror is on the grid.
    pub fn max_mirror_gap(&self) -> f64 {
        let mut gap: f64 = 0.0;
        for k in 0..self.n_regimes() {
            for j in 0..=self.t_steps {
                for x in self.xs().filter(|x| self.xs().contains(&-x)) {
                    gap = gap.max((self.h(k, j, x) - self.h(k, j, -x)).abs());
                }
            }
        }
        gap
    }

    /// CSV with columns `regime,t,x,h,action,delta_a,delta_b,eta,kappa,xi`.
    pub fn write_csv<W: std::io::Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(SURFACE_HEADER)?;
        let blank = String::new;
        for k in 0..self.n_regimes() {
            for j in 0..=self.t_steps {
                for x in self.xs() {
                    let d = self.decision(k, j, x);
                    let (delta_a, delta_b) = match d.action {
                        Intervention::Terminal => (blank(), blank()),
                        _ => (d.delta_a.to_string(), d.delta_b.to_string()),
                    };
                    let (eta, kappa, xi) = match d.action {
                        Intervention::Limit { eta, kappa } => {
                            (eta.to_string(), kappa.to_string(), blank())
                        }
                        Intervention::Market { xi } => (blank(), blank(), xi.to_string()),
                        _ => (blank(), blank(), blank()),
                    };
                    w.write_record([
                        k.to_string(),
                        self.time(j).to_string(),
                        x.to_string(),
                        self.h(k, j, x).to_string(),
                        d.action.name().to_string(),
                        delta_a,
                        delta_b,
                        eta,
                        kappa,
                        xi,
                    ])?;
                }
            }
        }
        w.flush()?;
        Ok(())
    }
}

pub const SURFACE_HEADER: [&str; 10] = [
    "regime", "t", "x", "h", "action", "delta_a", "delta_b", "eta", "kappa", "xi",
];

/// Refuses grids on which the explicit step is not monotone.
pub fn check_stability(market: &MarketParams, costs: &CostParams, grid: &GridSpec) -> Result<()> {
    let dt = grid.dt();
    let rate = max_event_rate(market, costs);
    let product = dt * rate;
    if !(dt > 0.0) || product > 1.0 + 1e-12 {
        return Err(Error::Stability { dt, rate, product });
    }
    Ok(())
}

/// Backward sweep from `h(T, x) = −k|x| − ε_m`.
pub fn solve(
    variant: QviVariant,
    market: &MarketParams,
    costs: &CostParams,
    grid: &GridSpec,
) -> Result<ValueSurface> {
    variant.check(market, costs)?;
    check_stability(market, costs, grid)?;
    let ops = Operators::new(market, costs, grid.x_min, grid.x_max)?;
    let n_k = market.regimes.len();
    let n_t = grid.t_steps + 1;
    let n_x = grid.n_x();
    let dt = grid.dt();

    let mut surface = ValueSurface {
        variant,
        regimes: market.regimes.clone(),
        x_min: grid.x_min,
        x_max: grid.x_max,
        t_steps: grid.t_steps,
        dt,
        h: vec![0.0; n_k * n_t * n_x],
        continuation: vec![0.0; n_k * n_t * n_x],
        decisions: vec![Decision::TERMINAL; n_k * n_t * n_x],
    };
    for (k_idx, &k) in market.regimes.iter().enumerate() {
        for x in grid.x_min..=grid.x_max {
            let i = surface.index(k_idx, grid.t_steps, x);
            surface.h[i] = -k * x.unsigned_abs() as f64 - costs.eps_m;
            surface.continuation[i] = surface.h[i];
        }
    }

    for j in (0..grid.t_steps).rev() {
        let next: Vec<Vec<f64>> = (0..n_k).map(|k| surface.slice(k, j + 1).to_vec()).collect();
        let next_refs: Vec<&[f64]> = next.iter().map(Vec::as_slice).collect();
        for (k_idx, &k) in market.regimes.iter().enumerate() {
            let rhs: Vec<Continuation> = (grid.x_min..=grid.x_max)
                .into_par_iter()
                .map(|x| ops.continuation_rhs(&next_refs, x, k_idx))
                .collect();
            let tilde: Vec<f64> = rhs
                .iter()
                .zip(next_refs[k_idx])
                .map(|(c, h)| h + dt * c.value)
                .collect();
            let decided: Vec<(f64, Decision)> = rhs
                .par_iter()
                .enumerate()
                .map(|(i, c)| ops.decide(&tilde, grid.x_min + i as i64, k, *c))
                .collect();
            let start = surface.index(k_idx, j, grid.x_min);
            for (i, ((value, decision), cont)) in decided.into_iter().zip(tilde).enumerate() {
                if !value.is_finite() {
                    return Err(Error::NonFinite {
                        regime: k_idx,
                        t_index: j,
                        x: grid.x_min + i as i64,
                    });
                }
                surface.h[start + i] = value;
                surface.continuation[start + i] = cont;
                surface.decisions[start + i] = decision;
            }
        }
    }
    Ok(surface)
}

/// Largest violation of `min{−∂ₜh − rhs(h), h − 𝓜h, h − 𝓛h} = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Complementarity {
    pub max_abs: f64,
    pub regime: usize,
    pub t_index: usize,
    pub x: i64,
}

/// Evaluates the discrete QVI at every interior node (`x_min < x < x_max`,
/// `t < T`) with all three terms taken at the solved `h(t_j, ·)` and the time
/// derivative as a backward difference.
pub fn complementarity(
    surface: &ValueSurface,
    market: &MarketParams,
    costs: &CostParams,
) -> Result<Complementarity> {
    let ops = Operators::new(market, costs, surface.x_min, surface.x_max)?;
    let mut worst = Complementarity {
        max_abs: 0.0,
        regime: 0,
        t_index: 0,
        x: 0,
    };
    for j in 0..surface.t_steps {
        let now: Vec<&[f64]> = (0..surface.n_regimes())
            .map(|k| surface.slice(k, j))
            .collect();
        for (k_idx, &k) in surface.regimes.iter().enumerate() {
            for x in surface.x_min + 1..surface.x_max {
                let h = surface.h(k_idx, j, x);
                let dh = (surface.h(k_idx, j + 1, x) - h) / surface.dt;
                let pde = -dh - ops.continuation_rhs(&now, x, k_idx).value;
                let market_gap = h - ops.market_obstacle(now[k_idx], x, k).value;
                let limit_gap = h - ops.limit_obstacle(now[k_idx], x, k).value;
                let m = pde.min(market_gap).min(limit_gap).abs();
                if m > worst.max_abs {
                    worst = Complementarity {
                        max_abs: m,
                        regime: k_idx,
                        t_index: j,
                        x,
                    };
                }
            }
        }
    }
    Ok(worst)
}
