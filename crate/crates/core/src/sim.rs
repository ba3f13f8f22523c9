//! Monte Carlo evaluation of a trading policy.
//!
//! Dark-pool arrivals and (by default) regime switches are simulated exactly
//! as competing exponential clocks, with commissions looked up from the
//! policy at the current inventory. Lit-pool orders are only sent at policy
//! grid times, at most one per time. Each path draws from its own ChaCha
//! stream, so results do not depend on thread scheduling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, Poisson, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{CostParams, GridSpec, MarketParams, PriceModel, SizeMass, State};
use crate::policy::PolicyTable;
use crate::qvi::Intervention;

/// Utility collected at the horizon (or at the exit time).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TerminalRule {
    /// `y + xs − k|x| − ε_m`: unwind the inventory at the half-spread and
    /// pay one market-order penalty.
    Liquidation,
    /// `y + xs − kx²`, the toy model's terminal utility.
    QuadraticPenalty,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RegimeStepping {
    /// Exponential holding times.
    ExactClock,
    /// One Bernoulli draw per simulation step with probabilities `r_ij·dt`.
    Bernoulli,
}

/// The strategy being evaluated.
#[derive(Debug, Clone, Copy)]
pub enum Policy<'a> {
    Table(&'a PolicyTable),
    /// Never trade on the lit pool; quote fixed commissions.
    Uncontrolled {
        delta_a: f64,
        delta_b: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SimConfig {
    pub paths: usize,
    pub seed: u64,
    /// Simulation step; `None` uses the policy grid step.
    pub dt_sim: Option<f64>,
    /// Stop a path when inventory or cash leaves the admissible domain.
    pub enforce_exit: bool,
    pub terminal: TerminalRule,
    pub regime_stepping: RegimeStepping,
    /// Number of leading paths whose event logs are kept.
    pub log_paths: usize,
}

impl SimConfig {
    pub fn new(paths: usize, seed: u64) -> Self {
        Self {
            paths,
            seed,
            dt_sim: None,
            enforce_exit: false,
            terminal: TerminalRule::Liquidation,
            regime_stepping: RegimeStepping::ExactClock,
            log_paths: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EventKind {
    /// A client sells to the dark pool; inventory rises.
    DarkFillBuy,
    /// A client buys from the dark pool; inventory falls.
    DarkFillSell,
    LimitFill,
    LimitMiss,
    MarketExec,
    RegimeSwitch,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PathEvent {
    pub t: f64,
    pub kind: EventKind,
    pub size: u32,
    pub dx: i64,
    pub dy: f64,
    /// Half-spread in force after the event.
    pub k: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PathRecord {
    pub index: usize,
    pub initial: State,
    pub terminal: State,
    /// `∫ −φx² du`.
    pub running: f64,
    pub market_orders: u32,
    pub limit_orders: u32,
    pub objective: f64,
    /// Stopped early at the exit time.
    pub exited: bool,
    /// Left the policy grid; excluded from the estimate.
    pub off_grid: bool,
    pub events: Vec<PathEvent>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimSummary {
    pub mean: f64,
    pub stderr: f64,
    pub paths: usize,
    pub excluded: usize,
    pub seed: u64,
    #[serde(skip)]
    pub records: Vec<PathRecord>,
}

/// Poisson count of arrivals at rate `lambda` over `dt`.
pub fn sample_arrivals<R: Rng + ?Sized>(lambda: f64, dt: f64, rng: &mut R) -> u64 {
    let mean = lambda * dt;
    if !(mean > 0.0) {
        return 0;
    }
    Poisson::new(mean)
        .map(|p| p.sample(rng) as u64)
        .unwrap_or(0)
}

/// Regime after `dt` starting from `k_idx`.
pub fn step_regime<R: Rng + ?Sized>(
    k_idx: usize,
    dt: f64,
    generator: &[Vec<f64>],
    mode: RegimeStepping,
    rng: &mut R,
) -> usize {
    match mode {
        RegimeStepping::Bernoulli => {
            let u: f64 = rng.gen();
            let mut acc = 0.0;
            for (j, &r) in generator[k_idx].iter().enumerate() {
                if j == k_idx {
                    continue;
                }
                acc += r * dt;
                if u < acc {
                    return j;
                }
            }
            k_idx
        }
        RegimeStepping::ExactClock => {
            let mut k = k_idx;
            let mut left = dt;
            loop {
                let rate = exit_rate(generator, k);
                if !(rate > 0.0) {
                    return k;
                }
                let hold: f64 = Exp::new(rate).expect("positive rate").sample(rng);
                if hold >= left {
                    return k;
                }
                left -= hold;
                k = jump_target(generator, k, rate, rng);
            }
        }
    }
}

fn exit_rate(generator: &[Vec<f64>], k: usize) -> f64 {
    generator[k]
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != k)
        .map(|(_, r)| *r)
        .sum()
}

fn jump_target<R: Rng + ?Sized>(generator: &[Vec<f64>], k: usize, rate: f64, rng: &mut R) -> usize {
    let u = rng.gen::<f64>() * rate;
    let mut acc = 0.0;
    let mut last = k;
    for (j, &r) in generator[k].iter().enumerate() {
        if j == k || r <= 0.0 {
            continue;
        }
        acc += r;
        last = j;
        if u < acc {
            return j;
        }
    }
    last
}

fn draw_size<R: Rng + ?Sized>(law: &[SizeMass], rng: &mut R) -> u32 {
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    for m in law {
        acc += m.prob;
        if u < acc {
            return m.size;
        }
    }
    law.last().map(|m| m.size).unwrap_or(1)
}

/// Runs `config.paths` independent paths from the grid's initial state.
pub fn simulate(
    policy: Policy<'_>,
    market: &MarketParams,
    costs: &CostParams,
    grid: &GridSpec,
    config: &SimConfig,
) -> Result<SimSummary> {
    if config.paths == 0 {
        return Err(Error::Domain("need at least one path".into()));
    }
    let dt = grid.dt();
    let dt_sim = config.dt_sim.unwrap_or(dt);
    if !(dt_sim > 0.0) || dt_sim > dt * (1.0 + 1e-12) {
        return Err(Error::Domain(format!(
            "simulation step {dt_sim} must lie in (0, {dt}]"
        )));
    }
    if grid.k0 >= market.regimes.len() {
        return Err(Error::Domain(format!(
            "initial regime {} does not exist",
            grid.k0
        )));
    }
    if let Policy::Table(table) = policy {
        if table.n_regimes != market.regimes.len()
            || table.t_steps != grid.t_steps
            || table.x_min != grid.x_min
            || table.x_max != grid.x_max
        {
            return Err(Error::Config(
                "policy grid does not match the configuration".into(),
            ));
        }
    }
    let engine = Engine {
        policy,
        market,
        costs,
        grid,
        config,
        substeps: (dt / dt_sim - 1e-9).ceil().max(1.0) as usize,
    };
    let records: Vec<PathRecord> = (0..config.paths)
        .into_par_iter()
        .map(|i| engine.path(i))
        .collect::<Result<_>>()?;

    let excluded = records.iter().filter(|r| r.off_grid).count();
    if excluded * 100 > config.paths {
        return Err(Error::GridExit {
            excluded,
            paths: config.paths,
        });
    }
    let used: Vec<f64> = records
        .iter()
        .filter(|r| !r.off_grid)
        .map(|r| r.objective)
        .collect();
    let n = used.len();
    let mean = used.iter().sum::<f64>() / n as f64;
    let stderr = if n > 1 {
        let var = used.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1) as f64;
        (var / n as f64).sqrt()
    } else {
        0.0
    };
    let records = records.into_iter().take(config.log_paths).collect();
    Ok(SimSummary {
        mean,
        stderr,
        paths: n,
        excluded,
        seed: config.seed,
        records,
    })
}

struct Engine<'a> {
    policy: Policy<'a>,
    market: &'a MarketParams,
    costs: &'a CostParams,
    grid: &'a GridSpec,
    config: &'a SimConfig,
    substeps: usize,
}

struct Walker {
    state: State,
    running: f64,
    market_orders: u32,
    limit_orders: u32,
    events: Option<Vec<PathEvent>>,
}

impl Walker {
    fn log(&mut self, kind: EventKind, size: u32, dx: i64, dy: f64, k: f64) {
        self.state.x += dx;
        self.state.y += dy;
        if let Some(events) = self.events.as_mut() {
            events.push(PathEvent {
                t: self.state.t,
                kind,
                size,
                dx,
                dy,
                k,
            });
        }
    }
}

enum Stop {
    Horizon,
    Exit,
    OffGrid,
}

impl Engine<'_> {
    fn commissions(&self, j: usize, state: &State) -> Option<(f64, f64)> {
        match self.policy {
            Policy::Uncontrolled { delta_a, delta_b } => Some((delta_a, delta_b)),
            Policy::Table(table) => {
                if !table.contains(state.x) {
                    return None;
                }
                let d = table.node(state.k_idx, j, state.x).decision;
                Some((d.delta_a, d.delta_b))
            }
        }
    }

    fn outside(&self, state: &State) -> bool {
        let g = self.grid;
        !g.contains(state.x)
            || g.y_min.is_some_and(|lo| state.y < lo)
            || g.y_max.is_some_and(|hi| state.y > hi)
    }

    fn advance(&self, w: &mut Walker, span: f64, rng: &mut ChaCha8Rng) {
        if !(span > 0.0) {
            return;
        }
        let x = w.state.x as f64;
        w.running -= self.costs.phi * x * x * span;
        let (mu, sigma) = (self.market.mu, self.market.sigma);
        let z: f64 = if sigma > 0.0 {
            StandardNormal.sample(rng)
        } else {
            0.0
        };
        w.state.s = match self.market.price_model {
            PriceModel::Arithmetic => w.state.s + mu * span + sigma * span.sqrt() * z,
            PriceModel::Geometric => {
                w.state.s * ((mu - 0.5 * sigma * sigma) * span + sigma * span.sqrt() * z).exp()
            }
        };
        w.state.t += span;
    }

    fn intervene(&self, w: &mut Walker, action: Intervention, rng: &mut ChaCha8Rng) -> Result<()> {
        let k = self.market.regimes[w.state.k_idx];
        let s = w.state.s;
        match action {
            Intervention::Limit { eta, kappa } => {
                w.limit_orders += 1;
                let fill = self
                    .market
                    .fill_model
                    .probability(kappa, self.costs.kappa_bar)?;
                if rng.gen::<f64>() < fill {
                    let dx = eta as i64;
                    w.log(
                        EventKind::LimitFill,
                        1,
                        dx,
                        -(dx as f64) * s + (k + kappa),
                        k,
                    );
                } else {
                    w.log(EventKind::LimitMiss, 1, 0, 0.0, k);
                }
            }
            Intervention::Market { xi } => {
                w.market_orders += 1;
                let dx = xi as i64;
                w.log(EventKind::MarketExec, 1, dx, -(dx as f64) * s - k, k);
            }
            Intervention::Continue | Intervention::Terminal => {}
        }
        Ok(())
    }

    /// Dark-pool flow and regime switches over `[t, t + span)`.
    fn flow(&self, w: &mut Walker, j: usize, span: f64, rng: &mut ChaCha8Rng) -> Option<Stop> {
        let end = w.state.t + span;
        let exact = self.config.regime_stepping == RegimeStepping::ExactClock;
        loop {
            let Some((delta_a, delta_b)) = self.commissions(j, &w.state) else {
                return Some(Stop::OffGrid);
            };
            let k_idx = w.state.k_idx;
            let la = self.market.intensity_a(delta_a).unwrap_or(0.0);
            let lb = self.market.intensity_b(delta_b).unwrap_or(0.0);
            let lq = if exact {
                exit_rate(&self.market.generator, k_idx)
            } else {
                0.0
            };
            let total = la + lb + lq;
            let wait = if total > 0.0 {
                Exp::new(total).expect("positive rate").sample(rng)
            } else {
                f64::INFINITY
            };
            if w.state.t + wait >= end {
                self.advance(w, end - w.state.t, rng);
                w.state.t = end;
                break;
            }
            self.advance(w, wait, rng);
            let u = rng.gen::<f64>() * total;
            let s = w.state.s;
            if u < la {
                let a = draw_size(&self.market.size_law_a, rng);
                let k = self.market.regimes[k_idx];
                w.log(
                    EventKind::DarkFillSell,
                    a,
                    -(a as i64),
                    a as f64 * (s + delta_a),
                    k,
                );
            } else if u < la + lb {
                let b = draw_size(&self.market.size_law_b, rng);
                let k = self.market.regimes[k_idx];
                w.log(
                    EventKind::DarkFillBuy,
                    b,
                    b as i64,
                    -(b as f64) * (s - delta_b),
                    k,
                );
            } else {
                let to = jump_target(&self.market.generator, k_idx, lq, rng);
                w.state.k_idx = to;
                w.log(EventKind::RegimeSwitch, 0, 0, 0.0, self.market.regimes[to]);
            }
            if let Some(stop) = self.check(w) {
                return Some(stop);
            }
        }
        if !exact {
            let from = w.state.k_idx;
            let to = step_regime(
                from,
                span,
                &self.market.generator,
                RegimeStepping::Bernoulli,
                rng,
            );
            if to != from {
                w.state.k_idx = to;
                w.log(EventKind::RegimeSwitch, 0, 0, 0.0, self.market.regimes[to]);
            }
        }
        None
    }

    fn check(&self, w: &Walker) -> Option<Stop> {
        if self.config.enforce_exit && self.outside(&w.state) {
            return Some(Stop::Exit);
        }
        match self.policy {
            Policy::Table(t) if !t.contains(w.state.x) => Some(Stop::OffGrid),
            _ => None,
        }
    }

    fn path(&self, index: usize) -> Result<PathRecord> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.config.seed);
        rng.set_stream(index as u64);
        let g = self.grid;
        let initial = State {
            t: 0.0,
            x: g.x0,
            y: g.y0,
            s: self.market.s0,
            k_idx: g.k0,
        };
        let mut w = Walker {
            state: initial,
            running: 0.0,
            market_orders: 0,
            limit_orders: 0,
            events: (index < self.config.log_paths).then(Vec::new),
        };
        let dt = g.dt();
        let mut stop = self.check(&w).unwrap_or(Stop::Horizon);
        if matches!(stop, Stop::Horizon) {
            'grid: for j in 0..g.t_steps {
                w.state.t = g.time(j);
                if let Policy::Table(table) = self.policy {
                    let action = table.node(w.state.k_idx, j, w.state.x).decision.action;
                    self.intervene(&mut w, action, &mut rng)?;
                    if let Some(s) = self.check(&w) {
                        stop = s;
                        break 'grid;
                    }
                }
                let sub = dt / self.substeps as f64;
                for m in 0..self.substeps {
                    let span = if m + 1 == self.substeps {
                        g.time(j + 1) - w.state.t
                    } else {
                        sub
                    };
                    if let Some(s) = self.flow(&mut w, j, span, &mut rng) {
                        stop = s;
                        break 'grid;
                    }
                }
            }
        }
        let k = self.market.regimes[w.state.k_idx];
        let State { x, y, s, .. } = w.state;
        let xf = x as f64;
        let utility = match self.config.terminal {
            TerminalRule::Liquidation => y + xf * s - k * xf.abs() - self.costs.eps_m,
            TerminalRule::QuadraticPenalty => y + xf * s - k * xf * xf,
        };
        let objective = w.running
            - self.costs.eps_m * w.market_orders as f64
            - self.costs.eps_l * w.limit_orders as f64
            + utility;
        Ok(PathRecord {
            index,
            initial,
            terminal: w.state,
            running: w.running,
            market_orders: w.market_orders,
            limit_orders: w.limit_orders,
            objective,
            exited: matches!(stop, Stop::Exit),
            off_grid: matches!(stop, Stop::OffGrid),
            events: w.events.unwrap_or_default(),
        })
    }
}
