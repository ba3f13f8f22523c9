//! The discrete toy model: unit-sized orders, fixed commissions, constant
//! half-spread, decisions at `N` equally spaced times and terminal utility
//! `y + sx − kx²`.
//!
//! Because the ordering of lit-pool actions does not affect the expected
//! payoff, a strategy over the remaining slots is summarized by a
//! [`StrategyCount`] and its value has the closed form [`stage_value`].
//!
//! Stage indexing: a table row for stage `n` describes decision time
//! `T − nΔ`, with `n` decision slots left before the horizon. Its value is the
//! best [`stage_value`] over strategies with at most `n` orders, evaluated
//! with `n + 1` in the formula's stage argument (remaining time `nΔ`).

use std::ops::RangeInclusive;

use rayon::prelude::*;
use serde::Serialize;

use crate::config::Config;
use crate::error::{Error, Result};

/// Relative tolerance under which two stage values count as tied.
pub const TIE_TOL: f64 = 1e-9;
/// Relative tolerance for keeping near-optimal candidates in the recursion.
const KEEP_TOL: f64 = 1e-7;
/// Largest stage count the brute-force oracle accepts.
pub const ORACLE_MAX_STAGES: usize = 6;

fn tied(a: f64, b: f64) -> bool {
    (a - b).abs() <= TIE_TOL * (1.0 + a.abs().max(b.abs()))
}

/// Numbers of market sell, market buy, limit sell and limit buy orders.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize)]
pub struct StrategyCount {
    pub market_sell: u32,
    pub market_buy: u32,
    pub limit_sell: u32,
    pub limit_buy: u32,
}

impl StrategyCount {
    pub const EMPTY: Self = Self {
        market_sell: 0,
        market_buy: 0,
        limit_sell: 0,
        limit_buy: 0,
    };

    pub fn new(market_sell: u32, market_buy: u32, limit_sell: u32, limit_buy: u32) -> Self {
        Self {
            market_sell,
            market_buy,
            limit_sell,
            limit_buy,
        }
    }

    pub fn total(&self) -> u32 {
        self.market_sell + self.market_buy + self.limit_sell + self.limit_buy
    }

    pub fn market_total(&self) -> u32 {
        self.market_sell + self.market_buy
    }

    pub fn limit_total(&self) -> u32 {
        self.limit_sell + self.limit_buy
    }

    /// The count after one more order of kind `action` (unchanged for DP).
    pub fn with(mut self, action: ToyAction) -> Self {
        match action {
            ToyAction::MarketBuy => self.market_buy += 1,
            ToyAction::LimitBuy => self.limit_buy += 1,
            ToyAction::DarkPool => {}
            ToyAction::LimitSell => self.limit_sell += 1,
            ToyAction::MarketSell => self.market_sell += 1,
        }
        self
    }

    pub fn from_actions<'a>(actions: impl IntoIterator<Item = &'a ToyAction>) -> Self {
        actions.into_iter().fold(Self::EMPTY, |q, a| q.with(*a))
    }

    /// Canonical order among tied strategies: fewest orders, then fewest
    /// market orders, then lexicographic.
    fn canonical_key(&self) -> (u32, u32, [u32; 4]) {
        (
            self.total(),
            self.market_total(),
            [
                self.market_sell,
                self.market_buy,
                self.limit_sell,
                self.limit_buy,
            ],
        )
    }
}

/// One decision of the toy model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum ToyAction {
    MarketBuy,
    LimitBuy,
    DarkPool,
    LimitSell,
    MarketSell,
}

impl ToyAction {
    /// In band order along increasing inventory.
    pub const ALL: [ToyAction; 5] = [
        ToyAction::MarketBuy,
        ToyAction::LimitBuy,
        ToyAction::DarkPool,
        ToyAction::LimitSell,
        ToyAction::MarketSell,
    ];

    /// Evaluation order that realizes the tie-break: DP, then limit, then market.
    const PREFERENCE: [ToyAction; 5] = [
        ToyAction::DarkPool,
        ToyAction::LimitBuy,
        ToyAction::LimitSell,
        ToyAction::MarketBuy,
        ToyAction::MarketSell,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ToyAction::MarketBuy => "MB",
            ToyAction::LimitBuy => "LB",
            ToyAction::DarkPool => "DP",
            ToyAction::LimitSell => "LS",
            ToyAction::MarketSell => "MS",
        }
    }

    /// Buy ↔ sell.
    pub fn mirror(self) -> Self {
        match self {
            ToyAction::MarketBuy => ToyAction::MarketSell,
            ToyAction::LimitBuy => ToyAction::LimitSell,
            ToyAction::DarkPool => ToyAction::DarkPool,
            ToyAction::LimitSell => ToyAction::LimitBuy,
            ToyAction::MarketSell => ToyAction::MarketBuy,
        }
    }

    pub fn is_limit(self) -> bool {
        matches!(self, ToyAction::LimitBuy | ToyAction::LimitSell)
    }
}

impl std::fmt::Display for ToyAction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ToyParams {
    pub delta_a: f64,
    pub delta_b: f64,
    pub lambda_a: f64,
    pub lambda_b: f64,
    /// Constant half-spread.
    pub k: f64,
    /// Fill probability of a limit order posted at the best quote.
    pub p: f64,
    pub eps_m: f64,
    pub eps_l: f64,
    pub horizon: f64,
    pub step: f64,
    pub stages: usize,
    /// Terminal inventory target; the terminal penalty is `k(x − target)²`.
    pub target: f64,
}

impl ToyParams {
    /// Baseline toy parameters with `stages` unit steps.
    pub fn baseline(stages: usize) -> Self {
        Self {
            delta_a: 0.25,
            delta_b: 0.25,
            lambda_a: 0.5,
            lambda_b: 0.5,
            k: 0.5,
            p: 0.92,
            eps_m: 5.0,
            eps_l: 3.0,
            horizon: stages as f64,
            step: 1.0,
            stages,
            target: 0.0,
        }
    }

    /// Reads the toy model out of a general configuration: one regime,
    /// one commission per side, fill probability at `κ = 0`.
    pub fn from_config(cfg: &Config) -> Result<Self> {
        let m = &cfg.market;
        let c = &cfg.costs;
        if m.regimes.len() != 1 {
            return Err(Error::Config(format!(
                "toy model needs exactly one regime, got {}",
                m.regimes.len()
            )));
        }
        let (delta_a, delta_b) = match (c.delta_menu_a.as_slice(), c.delta_menu_b.as_slice()) {
            ([a], [b]) => (*a, *b),
            _ => {
                return Err(Error::Config(
                    "toy model needs a single commission per side".into(),
                ))
            }
        };
        let missing = |side: &str, d: f64| Error::Config(format!("no lambda_{side} for {d}"));
        let params = Self {
            delta_a,
            delta_b,
            lambda_a: m
                .intensity_a(delta_a)
                .ok_or_else(|| missing("a", delta_a))?,
            lambda_b: m
                .intensity_b(delta_b)
                .ok_or_else(|| missing("b", delta_b))?,
            k: m.regimes[0],
            p: m.fill_model.p0,
            eps_m: c.eps_m,
            eps_l: c.eps_l,
            horizon: cfg.grid.horizon,
            step: cfg.grid.dt(),
            stages: cfg.grid.t_steps,
            target: 0.0,
        };
        params.check()?;
        Ok(params)
    }

    pub fn check(&self) -> Result<()> {
        let nonneg = [
            self.delta_a,
            self.delta_b,
            self.lambda_a,
            self.lambda_b,
            self.k,
            self.eps_m,
            self.eps_l,
            self.horizon,
            self.step,
        ];
        if nonneg.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::Domain(
                "toy parameters must be finite and non-negative".into(),
            ));
        }
        if !(self.p > 0.0 && self.p <= 1.0) {
            return Err(Error::Domain(format!(
                "fill probability {} outside (0, 1]",
                self.p
            )));
        }
        if (self.stages as f64 * self.step - self.horizon).abs() > 1e-9 * self.horizon.max(1.0) {
            return Err(Error::Domain(format!(
                "N·Δ = {}·{} does not equal T = {}",
                self.stages, self.step, self.horizon
            )));
        }
        Ok(())
    }

    /// Expected commission income net of spread risk per unit time.
    pub fn c1(&self) -> f64 {
        self.lambda_a * self.delta_a + self.lambda_b * self.delta_b
            - self.k * (self.lambda_a + self.lambda_b)
    }

    /// Expected inventory drift per unit time.
    pub fn c2(&self) -> f64 {
        self.lambda_b - self.lambda_a
    }
}

/// Number of order multisets over four order kinds with at most `n − 1`
/// orders: `n(n+1)(n+2)(n+3)/24`.
pub fn count_distinguishable(n: u64) -> Result<u64> {
    if n < 1 {
        return Err(Error::Domain("stage count must be at least 1".into()));
    }
    let n = n as u128;
    let count = n * (n + 1) * (n + 2) * (n + 3) / 24;
    u64::try_from(count).map_err(|_| Error::Domain(format!("n* overflows u64 for n = {n}")))
}

/// Closed-form value when trading happens only inside the dark pool.
pub fn uncontrolled_value(t: f64, x: f64, y: f64, s: f64, params: &ToyParams) -> f64 {
    let tau = params.horizon - t;
    let drifted = x - params.target + params.c2() * tau;
    y + x * s + params.c1() * tau - params.k * drifted * drifted
}

/// Value at `T − (n−1)Δ` of committing to the orders in `q` over the
/// remaining `n − 1` slots.
pub fn stage_value(
    n: usize,
    x: f64,
    y: f64,
    s: f64,
    q: StrategyCount,
    params: &ToyParams,
) -> Result<f64> {
    if n < 1 {
        return Err(Error::Domain("stage must be at least 1".into()));
    }
    if q.total() as usize > n - 1 {
        return Err(Error::Domain(format!(
            "{} orders do not fit in the {} slots of stage {n}",
            q.total(),
            n - 1
        )));
    }
    Ok(stage_value_unchecked(n, x, y, s, q, params))
}

fn stage_value_unchecked(
    n: usize,
    x: f64,
    y: f64,
    s: f64,
    q: StrategyCount,
    params: &ToyParams,
) -> f64 {
    let p = params.p;
    let k = params.k;
    let tau = (n - 1) as f64 * params.step;
    let shift =
        (q.limit_buy as f64 - q.limit_sell as f64) * p + q.market_buy as f64 - q.market_sell as f64;
    let expected = x - params.target + shift + params.c2() * tau;
    y + x * s + params.c1() * tau - (k + params.eps_m) * q.market_total() as f64
        + (k * p - params.eps_l) * q.limit_total() as f64
        - k * expected * expected
}

/// Inventory thresholds of the five-action rule, in shifted coordinates
/// `x + x̄ − target`.
#[derive(Debug, Clone, Copy)]
struct Thresholds {
    /// MB beats DP strictly below.
    market_buy: f64,
    /// LB beats DP strictly below.
    limit_buy: f64,
    /// LB is at least as good as MB at or above (±∞ when p = 1).
    limit_over_market_buy: f64,
    /// LS beats DP strictly above.
    limit_sell: f64,
    /// MS beats DP strictly above.
    market_sell: f64,
    /// LS is at least as good as MS at or below.
    limit_over_market_sell: f64,
}

impl Thresholds {
    fn new(params: &ToyParams) -> Self {
        let ToyParams {
            k, p, eps_m, eps_l, ..
        } = *params;
        let limit_dp = eps_l / (2.0 * k * p) - (1.0 - p) / 2.0;
        let market_dp = eps_m / (2.0 * k) + 1.0;
        let limit_market = if p < 1.0 {
            (-eps_l + 2.0 * k + eps_m) / (2.0 * k * (1.0 - p)) + p / 2.0
        } else if 2.0 * k + eps_m >= eps_l {
            f64::INFINITY
        } else {
            f64::NEG_INFINITY
        };
        Self {
            market_buy: -market_dp,
            limit_buy: -limit_dp,
            limit_over_market_buy: -limit_market,
            limit_sell: limit_dp,
            market_sell: market_dp,
            limit_over_market_sell: limit_market,
        }
    }
}

fn tol(threshold: f64) -> f64 {
    if threshold.is_finite() {
        TIE_TOL * (1.0 + threshold.abs())
    } else {
        0.0
    }
}

/// The five-branch threshold rule: the best single order to add at
/// `T − nΔ` given that `q` is the optimal strategy for the later slots.
pub fn optimal_action(n: usize, x: f64, q: StrategyCount, params: &ToyParams) -> ToyAction {
    let ToyParams { k, p, .. } = *params;
    if k <= 0.0 {
        // no inventory penalty: every lit order only costs
        return ToyAction::DarkPool;
    }
    let x_bar = (q.limit_buy as f64 - q.limit_sell as f64) * p + q.market_buy as f64
        - q.market_sell as f64
        + params.c2() * (n as f64 * params.step);
    let xs = x + x_bar - params.target;
    let th = Thresholds::new(params);

    let buy = if xs >= th.limit_over_market_buy - tol(th.limit_over_market_buy) {
        ToyAction::LimitBuy
    } else {
        ToyAction::MarketBuy
    };
    let buy_bound = if buy.is_limit() {
        th.limit_buy
    } else {
        th.market_buy
    };
    let buy_wins = xs < buy_bound - tol(buy_bound);

    let sell = if xs <= th.limit_over_market_sell + tol(th.limit_over_market_sell) {
        ToyAction::LimitSell
    } else {
        ToyAction::MarketSell
    };
    let sell_bound = if sell.is_limit() {
        th.limit_sell
    } else {
        th.market_sell
    };
    let sell_wins = xs > sell_bound + tol(sell_bound);

    match (buy_wins, sell_wins) {
        (false, false) => ToyAction::DarkPool,
        (true, false) => buy,
        (false, true) => sell,
        (true, true) => {
            // only when k is large against eps_l; compare the two directly
            let gain = |a: ToyAction| {
                let (cost, shift) = match a {
                    ToyAction::LimitBuy => (k * p - params.eps_l, p),
                    ToyAction::LimitSell => (k * p - params.eps_l, -p),
                    ToyAction::MarketBuy => (-(k + params.eps_m), 1.0),
                    _ => (-(k + params.eps_m), -1.0),
                };
                cost - k * (xs + shift) * (xs + shift)
            };
            if gain(sell) > gain(buy) {
                sell
            } else {
                buy
            }
        }
    }
}

/// `p(ε_m + 3k − pk)`: limit orders enter the optimal policy iff `ε_l` is
/// below this level.
pub fn viability_threshold(params: &ToyParams) -> f64 {
    params.p * (params.eps_m + 3.0 * params.k - params.p * params.k)
}

pub fn limit_order_viable(params: &ToyParams) -> bool {
    params.eps_l > 0.0 && params.eps_l < viability_threshold(params)
}

/// Picks the canonical strategy among the (near-)maximal ones.
fn select_best(candidates: impl IntoIterator<Item = (StrategyCount, f64)>) -> (StrategyCount, f64) {
    let all: Vec<(StrategyCount, f64)> = candidates.into_iter().collect();
    let best = all.iter().map(|c| c.1).fold(f64::NEG_INFINITY, f64::max);
    all.into_iter()
        .filter(|(_, v)| tied(*v, best) || *v >= best)
        .min_by_key(|(q, _)| q.canonical_key())
        .expect("at least the empty strategy is a candidate")
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ToyRow {
    pub stage: usize,
    pub x: i64,
    pub value: f64,
    pub action: ToyAction,
    /// Optimal order counts over the `stage` remaining slots.
    pub strategy: StrategyCount,
}

/// Backward-recursion output; rows ordered by stage then inventory.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ToyTable {
    pub stages: usize,
    pub x_min: i64,
    pub x_max: i64,
    pub rows: Vec<ToyRow>,
}

impl ToyTable {
    pub fn get(&self, stage: usize, x: i64) -> Option<&ToyRow> {
        if stage == 0 || stage > self.stages || x < self.x_min || x > self.x_max {
            return None;
        }
        let width = (self.x_max - self.x_min + 1) as usize;
        self.rows
            .get((stage - 1) * width + (x - self.x_min) as usize)
    }

    pub fn actions(&self) -> impl Iterator<Item = ToyAction> + '_ {
        self.rows.iter().map(|r| r.action)
    }

    /// CSV with columns `stage,x,value,action`.
    pub fn write_csv<W: std::io::Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["stage", "x", "value", "action"])?;
        for r in &self.rows {
            w.write_record([
                r.stage.to_string(),
                r.x.to_string(),
                r.value.to_string(),
                r.action.as_str().to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ToySolveOptions {
    /// Cap on memoized subproblems per (stage, inventory) solve.
    pub max_states: usize,
}

impl Default for ToySolveOptions {
    fn default() -> Self {
        Self {
            max_states: 4_000_000,
        }
    }
}

pub fn solve_toy(params: &ToyParams, x_range: RangeInclusive<i64>) -> Result<ToyTable> {
    solve_toy_with(params, x_range, ToySolveOptions::default())
}

pub fn solve_toy_with(
    params: &ToyParams,
    x_range: RangeInclusive<i64>,
    options: ToySolveOptions,
) -> Result<ToyTable> {
    params.check()?;
    if params.stages < 1 {
        return Err(Error::Domain("toy model needs at least one stage".into()));
    }
    let (x_min, x_max) = (*x_range.start(), *x_range.end());
    if x_min > x_max {
        return Err(Error::Domain(format!(
            "empty inventory range {x_min}..={x_max}"
        )));
    }
    let columns: Vec<Vec<ToyRow>> = x_range
        .into_par_iter()
        .map(|x| solve_column(params, x, options))
        .collect::<Result<_>>()?;

    let mut rows = Vec::with_capacity(columns.len() * params.stages);
    for stage in 0..params.stages {
        rows.extend(columns.iter().map(|col| col[stage]));
    }
    Ok(ToyTable {
        stages: params.stages,
        x_min,
        x_max,
        rows,
    })
}

fn solve_column(params: &ToyParams, x: i64, options: ToySolveOptions) -> Result<Vec<ToyRow>> {
    let xf = x as f64;
    let mut rest = StrategyCount::EMPTY;
    let mut out = Vec::with_capacity(params.stages);
    for stage in 1..=params.stages {
        let best = optimal_strategy(params, xf, stage, options)?;
        let value = stage_value_unchecked(stage + 1, xf, 0.0, 0.0, best, params);
        let action = optimal_action(stage, xf, rest, params);
        out.push(ToyRow {
            stage,
            x,
            value,
            action,
            strategy: best,
        });
        rest = best;
    }
    Ok(out)
}

/// Exact backward recursion for the best strategy with at most `slots`
/// orders. Subproblems are indexed by the net market (`m`) and limit (`l`)
/// orders already committed in earlier slots; each keeps every strategy
/// within a small tolerance of its optimum, and the final choice is made on
/// [`stage_value`] itself.
pub fn optimal_strategy(
    params: &ToyParams,
    x: f64,
    slots: usize,
    options: ToySolveOptions,
) -> Result<StrategyCount> {
    let span = 2 * slots + 1;
    let states = (slots + 1) * span * span;
    if states > options.max_states {
        return Err(Error::Refused(format!(
            "{states} recursion states exceed the cap of {}",
            options.max_states
        )));
    }
    let mut memo = Recursion {
        params,
        x_eff: x - params.target + params.c2() * (slots as f64 * params.step),
        slots: slots as i64,
        span,
        table: vec![None; states],
    };
    let top = memo.candidates(slots, 0, 0);
    let scored = top.iter().map(|q| {
        (
            *q,
            stage_value_unchecked(slots + 1, x, 0.0, 0.0, *q, params),
        )
    });
    Ok(select_best(scored).0)
}

struct Recursion<'a> {
    params: &'a ToyParams,
    x_eff: f64,
    slots: i64,
    span: usize,
    table: Vec<Option<Vec<StrategyCount>>>,
}

impl Recursion<'_> {
    fn index(&self, s: usize, m: i64, l: i64) -> usize {
        (s * self.span + (m + self.slots) as usize) * self.span + (l + self.slots) as usize
    }

    /// Reduced objective of `q` in the subproblem offset by `(m, l)`.
    fn objective(&self, m: i64, l: i64, q: &StrategyCount) -> f64 {
        let ToyParams {
            k, p, eps_m, eps_l, ..
        } = *self.params;
        let pos = self.x_eff
            + (m + q.market_buy as i64 - q.market_sell as i64) as f64
            + p * (l + q.limit_buy as i64 - q.limit_sell as i64) as f64;
        (k * p - eps_l) * q.limit_total() as f64
            - (k + eps_m) * q.market_total() as f64
            - k * pos * pos
    }

    fn candidates(&mut self, s: usize, m: i64, l: i64) -> Vec<StrategyCount> {
        if s == 0 {
            return vec![StrategyCount::EMPTY];
        }
        let idx = self.index(s, m, l);
        if let Some(found) = &self.table[idx] {
            return found.clone();
        }
        let mut pool = self.candidates(s - 1, m, l);
        for (action, dm, dl) in [
            (ToyAction::MarketBuy, 1, 0),
            (ToyAction::MarketSell, -1, 0),
            (ToyAction::LimitBuy, 0, 1),
            (ToyAction::LimitSell, 0, -1),
        ] {
            pool.extend(
                self.candidates(s - 1, m + dm, l + dl)
                    .into_iter()
                    .map(|q| q.with(action)),
            );
        }
        pool.sort_by_key(|q| q.canonical_key());
        pool.dedup();
        let scores: Vec<f64> = pool.iter().map(|q| self.objective(m, l, q)).collect();
        let best = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let floor = best - KEEP_TOL * (1.0 + best.abs());
        let kept: Vec<StrategyCount> = pool
            .into_iter()
            .zip(scores)
            .filter(|(_, v)| *v >= floor)
            .map(|(q, _)| q)
            .collect();
        self.table[idx] = Some(kept.clone());
        kept
    }
}

/// Result of the exhaustive search at one `(stage, inventory)` point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OracleOutcome {
    pub value: f64,
    pub action: ToyAction,
    pub strategy: StrategyCount,
}

fn all_counts(max_total: u32) -> Vec<StrategyCount> {
    let mut out = Vec::new();
    for ms in 0..=max_total {
        for mb in 0..=max_total - ms {
            for ls in 0..=max_total - ms - mb {
                for lb in 0..=max_total - ms - mb - ls {
                    out.push(StrategyCount::new(ms, mb, ls, lb));
                }
            }
        }
    }
    out
}

/// Brute force over every order multiset with at most `stages` orders, and
/// the stage-`stages` action chosen by comparing the five one-order
/// extensions of the optimal remaining strategy directly.
pub fn enumerate_oracle(params: &ToyParams, x: f64, stages: usize) -> Result<OracleOutcome> {
    if stages < 1 {
        return Err(Error::Domain("stage must be at least 1".into()));
    }
    if stages > ORACLE_MAX_STAGES {
        return Err(Error::Refused(format!(
            "exhaustive enumeration limited to {ORACLE_MAX_STAGES} stages, got {stages}"
        )));
    }
    let score = |n: usize, q: StrategyCount| (q, stage_value_unchecked(n, x, 0.0, 0.0, q, params));
    let (strategy, value) = select_best(
        all_counts(stages as u32)
            .into_iter()
            .map(|q| score(stages + 1, q)),
    );
    let (rest, _) = select_best(
        all_counts(stages as u32 - 1)
            .into_iter()
            .map(|q| score(stages, q)),
    );

    let mut action = ToyAction::DarkPool;
    let mut best = stage_value_unchecked(stages + 1, x, 0.0, 0.0, rest, params);
    for candidate in ToyAction::PREFERENCE.into_iter().skip(1) {
        let v = stage_value_unchecked(stages + 1, x, 0.0, 0.0, rest.with(candidate), params);
        if v > best && !tied(v, best) {
            best = v;
            action = candidate;
        }
    }
    Ok(OracleOutcome {
        value,
        action,
        strategy,
    })
}
