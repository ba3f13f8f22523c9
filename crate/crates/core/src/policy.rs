//! Continuation, limit and market regions, and the lit-pool boundaries
//! derived from them.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Serialize;

use crate::config::grid_fingerprint;
use crate::error::{Error, Result};
use crate::qvi::{Decision, Intervention, ValueSurface, SURFACE_HEADER};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Region {
    Continue,
    Limit,
    Market,
}

impl Region {
    fn rank(self) -> u8 {
        self as u8
    }
}

/// One node's decision together with its region.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PolicyNode {
    pub region: Region,
    pub decision: Decision,
}

/// Decisions at every non-terminal node `(regime, t_j, x)`, `j < N`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolicyTable {
    pub n_regimes: usize,
    pub x_min: i64,
    pub x_max: i64,
    pub t_steps: usize,
    pub dt: f64,
    nodes: Vec<PolicyNode>,
}

impl PolicyTable {
    pub fn n_x(&self) -> usize {
        (self.x_max - self.x_min + 1) as usize
    }

    pub fn contains(&self, x: i64) -> bool {
        (self.x_min..=self.x_max).contains(&x)
    }

    pub fn time(&self, j: usize) -> f64 {
        j as f64 * self.dt
    }

    fn index(&self, k: usize, j: usize, x: i64) -> usize {
        (k * self.t_steps + j) * self.n_x() + (x - self.x_min) as usize
    }

    /// Panics outside the table; callers check [`PolicyTable::contains`].
    pub fn node(&self, k: usize, j: usize, x: i64) -> PolicyNode {
        assert!(k < self.n_regimes && j < self.t_steps && self.contains(x));
        self.nodes[self.index(k, j, x)]
    }

    pub fn region(&self, k: usize, j: usize, x: i64) -> Region {
        self.node(k, j, x).region
    }

    pub fn nodes(&self) -> &[PolicyNode] {
        &self.nodes
    }

    /// Same geometry hash as [`crate::Config::grid_hash`].
    pub fn grid_hash(&self) -> String {
        grid_fingerprint(
            self.n_regimes,
            self.x_min,
            self.x_max,
            self.t_steps,
            self.dt,
        )
    }

    /// Loads the policy part of a surface CSV written by
    /// [`ValueSurface::write_csv`].
    pub fn read_surface_csv(path: &Path) -> Result<Self> {
        let bad = |reason: String| Error::Artifact {
            path: path.to_path_buf(),
            reason,
        };
        let mut reader = csv::Reader::from_path(path)?;
        let header: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
        if header != SURFACE_HEADER {
            return Err(bad(format!("unexpected header {header:?}")));
        }
        struct Row {
            k: usize,
            t: f64,
            x: i64,
            decision: Decision,
        }
        let mut rows = Vec::new();
        for rec in reader.records() {
            let rec = rec?;
            let field = |i: usize| rec.get(i).unwrap_or("");
            let num = |i: usize| -> Result<f64> {
                field(i)
                    .parse::<f64>()
                    .map_err(|e| bad(format!("column {}: {e}", SURFACE_HEADER[i])))
            };
            let int = |i: usize| -> Result<i64> {
                field(i)
                    .parse::<i64>()
                    .map_err(|e| bad(format!("column {}: {e}", SURFACE_HEADER[i])))
            };
            let action = match field(4) {
                "terminal" => Intervention::Terminal,
                "continue" => Intervention::Continue,
                "limit" => Intervention::Limit {
                    eta: int(7)? as i8,
                    kappa: num(8)?,
                },
                "market" => Intervention::Market { xi: int(9)? as i8 },
                other => return Err(bad(format!("unknown action {other:?}"))),
            };
            let (delta_a, delta_b) = match action {
                Intervention::Terminal => (f64::NAN, f64::NAN),
                _ => (num(5)?, num(6)?),
            };
            rows.push(Row {
                k: int(0)? as usize,
                t: num(1)?,
                x: int(2)?,
                decision: Decision {
                    action,
                    delta_a,
                    delta_b,
                },
            });
        }
        if rows.is_empty() {
            return Err(bad("no rows".into()));
        }
        let n_regimes = rows.iter().map(|r| r.k).max().unwrap_or(0) + 1;
        let x_min = rows.iter().map(|r| r.x).min().unwrap_or(0);
        let x_max = rows.iter().map(|r| r.x).max().unwrap_or(0);
        let n_x = (x_max - x_min + 1) as usize;
        let per_regime = rows.len() / n_regimes;
        if rows.len() % n_regimes != 0 || per_regime % n_x != 0 || per_regime / n_x < 2 {
            return Err(bad(
                "rows do not form a regime × time × inventory grid".into()
            ));
        }
        let t_steps = per_regime / n_x - 1;
        let dt = rows[n_x].t - rows[0].t;
        let mut nodes = Vec::with_capacity(n_regimes * t_steps * n_x);
        for (i, r) in rows.iter().enumerate() {
            let k = i / per_regime;
            let j = (i % per_regime) / n_x;
            let x = x_min + (i % n_x) as i64;
            if r.k != k || r.x != x || r.t != j as f64 * dt {
                return Err(bad(format!("row {} out of order", i + 2)));
            }
            let terminal = matches!(r.decision.action, Intervention::Terminal);
            if terminal != (j == t_steps) {
                return Err(bad(format!(
                    "terminal rows must be exactly the last slice (row {})",
                    i + 2
                )));
            }
            if !terminal {
                nodes.push(node_of(r.decision));
            }
        }
        Ok(Self {
            n_regimes,
            x_min,
            x_max,
            t_steps,
            dt,
            nodes,
        })
    }
}

fn node_of(decision: Decision) -> PolicyNode {
    let region = match decision.action {
        Intervention::Limit { .. } => Region::Limit,
        Intervention::Market { .. } => Region::Market,
        _ => Region::Continue,
    };
    PolicyNode { region, decision }
}

/// Classifies every non-terminal node by its recorded argmax.
pub fn extract_regions(surface: &ValueSurface) -> Result<PolicyTable> {
    if let Some(pos) = surface.values().iter().position(|v| !v.is_finite()) {
        let per_regime = (surface.t_steps + 1) * surface.n_x();
        return Err(Error::NonFinite {
            regime: pos / per_regime,
            t_index: (pos % per_regime) / surface.n_x(),
            x: surface.x_min + (pos % surface.n_x()) as i64,
        });
    }
    let mut nodes = Vec::with_capacity(surface.n_regimes() * surface.t_steps * surface.n_x());
    for k in 0..surface.n_regimes() {
        for j in 0..surface.t_steps {
            nodes.extend(surface.xs().map(|x| node_of(surface.decision(k, j, x))));
        }
    }
    Ok(PolicyTable {
        n_regimes: surface.n_regimes(),
        x_min: surface.x_min,
        x_max: surface.x_max,
        t_steps: surface.t_steps,
        dt: surface.dt,
        nodes,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Side {
    Negative,
    Positive,
}

impl Side {
    pub fn as_str(self) -> &'static str {
        match self {
            Side::Negative => "negative",
            Side::Positive => "positive",
        }
    }

    fn sign(self) -> i64 {
        match self {
            Side::Negative => -1,
            Side::Positive => 1,
        }
    }
}

/// The inventories with a given κ inside one limit band.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KappaSegment {
    pub kappa: f64,
    pub x_from: i64,
    pub x_to: i64,
}

/// Boundaries of one (regime, side) pair, indexed by time step `j < N`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SideBoundary {
    pub regime: usize,
    pub side: Side,
    /// Signed inventory of the innermost limit node.
    pub x_limit: Vec<Option<i64>>,
    /// Signed inventory of the innermost market node.
    pub x_market: Vec<Option<i64>>,
    pub kappa_at_limit: Vec<Option<f64>>,
    /// κ along the limit band, from the inside out.
    pub kappa: Vec<Vec<KappaSegment>>,
}

impl SideBoundary {
    /// Innermost lit node, limit or market, in absolute inventory.
    pub fn lit(&self, j: usize) -> Option<i64> {
        match (self.x_limit[j], self.x_market[j]) {
            (Some(l), Some(m)) => Some(l.abs().min(m.abs())),
            (l, m) => l.or(m).map(i64::abs),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundaryCurves {
    pub t_steps: usize,
    pub dt: f64,
    pub sides: Vec<SideBoundary>,
}

impl BoundaryCurves {
    pub fn get(&self, regime: usize, side: Side) -> Option<&SideBoundary> {
        self.sides
            .iter()
            .find(|s| s.regime == regime && s.side == side)
    }

    /// CSV with columns `regime,t,side,x_limit,x_market,kappa_at_limit`.
    pub fn write_csv<W: std::io::Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record([
            "regime",
            "t",
            "side",
            "x_limit",
            "x_market",
            "kappa_at_limit",
        ])?;
        let opt = |v: Option<String>| v.unwrap_or_default();
        for s in &self.sides {
            for j in 0..self.t_steps {
                w.write_record([
                    s.regime.to_string(),
                    (j as f64 * self.dt).to_string(),
                    s.side.as_str().to_string(),
                    opt(s.x_limit[j].map(|v| v.to_string())),
                    opt(s.x_market[j].map(|v| v.to_string())),
                    opt(s.kappa_at_limit[j].map(|v| v.to_string())),
                ])?;
            }
        }
        w.flush()?;
        Ok(())
    }

    /// Long-format κ contours: `regime,t,side,kappa,x_from,x_to`.
    pub fn write_kappa_csv<W: std::io::Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["regime", "t", "side", "kappa", "x_from", "x_to"])?;
        for s in &self.sides {
            for (j, segments) in s.kappa.iter().enumerate() {
                for seg in segments {
                    w.write_record([
                        s.regime.to_string(),
                        (j as f64 * self.dt).to_string(),
                        s.side.as_str().to_string(),
                        seg.kappa.to_string(),
                        seg.x_from.to_string(),
                        seg.x_to.to_string(),
                    ])?;
                }
            }
        }
        w.flush()?;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct BandOptions {
    /// Ignore a single node whose region differs from both neighbours.
    pub tolerate_islands: bool,
}

/// Regions along one side, from `x = 0` outwards.
fn side_regions(table: &PolicyTable, k: usize, j: usize, side: Side) -> Vec<(i64, Region)> {
    (0..)
        .map(|d| d * side.sign())
        .take_while(|x| table.contains(*x))
        .map(|x| (x, table.region(k, j, x)))
        .collect()
}

/// Checks that regions run Continue, Limit, Market outwards on each side.
pub fn check_bands(table: &PolicyTable, options: BandOptions) -> Result<()> {
    for k in 0..table.n_regimes {
        for j in 0..table.t_steps {
            for side in [Side::Negative, Side::Positive] {
                let mut ranks: Vec<u8> = side_regions(table, k, j, side)
                    .iter()
                    .map(|(_, r)| r.rank())
                    .collect();
                if options.tolerate_islands {
                    for i in 1..ranks.len().saturating_sub(1) {
                        if ranks[i - 1] == ranks[i + 1] && ranks[i] != ranks[i - 1] {
                            ranks[i] = ranks[i - 1];
                        }
                    }
                }
                if ranks.windows(2).any(|w| w[1] < w[0]) {
                    return Err(Error::Structure {
                        regime: k,
                        t_index: j,
                        side: side.as_str(),
                    });
                }
            }
        }
    }
    Ok(())
}

pub fn extract_boundaries(table: &PolicyTable) -> Result<BoundaryCurves> {
    extract_boundaries_with(table, BandOptions::default())
}

/// Innermost limit and market nodes per time and side, with κ along the
/// limit band.
pub fn extract_boundaries_with(
    table: &PolicyTable,
    options: BandOptions,
) -> Result<BoundaryCurves> {
    check_bands(table, options)?;
    let mut sides = Vec::new();
    for k in 0..table.n_regimes {
        for side in [Side::Negative, Side::Positive] {
            let mut b = SideBoundary {
                regime: k,
                side,
                x_limit: Vec::with_capacity(table.t_steps),
                x_market: Vec::with_capacity(table.t_steps),
                kappa_at_limit: Vec::with_capacity(table.t_steps),
                kappa: Vec::with_capacity(table.t_steps),
            };
            for j in 0..table.t_steps {
                let regions = side_regions(table, k, j, side);
                let first =
                    |want: Region| regions.iter().find(|(_, r)| *r == want).map(|(x, _)| *x);
                let x_limit = first(Region::Limit);
                b.x_limit.push(x_limit);
                b.x_market.push(first(Region::Market));
                let kappa_of = |x: i64| match table.node(k, j, x).decision.action {
                    Intervention::Limit { kappa, .. } => Some(kappa),
                    _ => None,
                };
                b.kappa_at_limit.push(x_limit.and_then(kappa_of));
                let mut segments: Vec<KappaSegment> = Vec::new();
                for &(x, _) in regions.iter().filter(|(_, r)| *r == Region::Limit) {
                    let kappa = kappa_of(x).unwrap_or(f64::NAN);
                    match segments.last_mut() {
                        Some(seg) if seg.kappa == kappa && (x - seg.x_to).abs() == 1 => {
                            seg.x_to = x
                        }
                        _ => segments.push(KappaSegment {
                            kappa,
                            x_from: x,
                            x_to: x,
                        }),
                    }
                }
                b.kappa.push(segments);
            }
            sides.push(b);
        }
    }
    Ok(BoundaryCurves {
        t_steps: table.t_steps,
        dt: table.dt,
        sides,
    })
}

/// Count of nodes in each region.
pub fn region_counts(table: &PolicyTable) -> BTreeMap<Region, usize> {
    let mut counts = BTreeMap::new();
    for n in table.nodes() {
        *counts.entry(n.region).or_insert(0) += 1;
    }
    counts
}
