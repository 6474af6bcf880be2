//! Critical `q` of a criterion and Cartesian parameter sweeps.
//!
//! Every criterion has `lhs = 0` at `q = 0`, so the margin starts at `1-γ > 0`
//! and decreases in `q`. Bisection brackets the sign change after sampling the
//! margin at 16 points to confirm the monotone sign pattern.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::criteria::{criterion, weight_s, CriterionId, SpiralClassParams, Variant};
use crate::error::{Error, Result};
use crate::series::{PascalParams, RTauParams};
use crate::summation::{partial_sum, Weight};

/// Right end of the bracket searched for `q*`.
pub const Q_UPPER: f64 = 1.0 - 1e-9;

/// Bisection stops once the bracket is narrower than this.
pub const MIN_BRACKET: f64 = 1e-14;

pub const DEFAULT_TOL: f64 = 1e-10;

const MONOTONICITY_SAMPLES: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QStarStatus {
    /// `q*` is an interior root of the margin.
    Interior,
    /// The criterion holds on the whole bracket; `q_star` is [`Q_UPPER`].
    SatisfiedForAll,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalQ {
    pub q_star: f64,
    pub iterations: usize,
    pub residual_margin: f64,
    pub status: QStarStatus,
}

#[derive(Debug, Clone, Copy)]
enum Margin {
    Exact(f64),
    /// The oracle did not converge but its partial sum already exceeds the
    /// bound.
    Violated,
    /// The oracle did not converge but an upper bound on its lhs leaves this
    /// positive margin.
    Holds(f64),
    Unknown,
}

impl Margin {
    fn is_violated(&self) -> bool {
        matches!(self, Margin::Violated) || matches!(self, Margin::Exact(v) if *v < 0.0)
    }
}

/// Upper bound on a non-converged direct lhs for criteria whose weights are
/// nondecreasing and bounded: the partial sum plus the weight supremum times
/// the probability mass not yet summed.
fn bounded_weight_upper(
    id: CriterionId,
    p: &PascalParams,
    c: &SpiralClassParams,
    r: Option<&RTauParams>,
    order: usize,
    partial: f64,
) -> Option<f64> {
    let slope = weight_s(2, c) - weight_s(1, c);
    let sup = match (id, r) {
        (CriterionId::GInS, _) => slope,
        (CriterionId::LambdaRtauInS, Some(r)) => slope * r.scale() / r.vartheta(),
        _ => return None,
    };
    let base = p.base_mass();
    let unseen = (1.0 - base - base * partial_sum(&Weight::One, p, order)).max(0.0);
    let upper = partial + sup * unseen;
    Some(upper + 8.0 * f64::EPSILON * (partial.abs() + sup.abs()))
}

fn margin_at(
    id: CriterionId,
    variant: Variant,
    m: f64,
    c: &SpiralClassParams,
    r: Option<&RTauParams>,
    q: f64,
) -> Result<Margin> {
    let p = PascalParams::new(m, q)?;
    match criterion(id, &p, c, r, variant) {
        Ok(v) => Ok(Margin::Exact(v.margin)),
        Err(Error::NonConvergence { order, partial, .. }) => {
            let rhs = 1.0 - c.gamma();
            if partial > rhs {
                return Ok(Margin::Violated);
            }
            match bounded_weight_upper(id, &p, c, r, order, partial) {
                Some(upper) if variant == Variant::Direct && upper < rhs => Ok(Margin::Holds(rhs - upper)),
                _ => Ok(Margin::Unknown),
            }
        }
        Err(e) => Err(e),
    }
}

/// Largest `q` at which criterion `id` still holds for fixed `(m, ξ, γ, ρ)`.
pub fn critical_q(
    id: CriterionId,
    variant: Variant,
    m: f64,
    c: &SpiralClassParams,
    r: Option<&RTauParams>,
    tol: f64,
) -> Result<CriticalQ> {
    if !(tol > 0.0) {
        return Err(Error::invalid("tol", format!("must be positive, got {tol}")));
    }
    PascalParams::new(m, 0.0)?;
    if id.needs_rtau() && r.is_none() {
        return Err(Error::MissingRTau { criterion: id.label() });
    }

    let samples: Vec<(f64, Margin)> = (1..=MONOTONICITY_SAMPLES)
        .map(|i| {
            let q = Q_UPPER * i as f64 / MONOTONICITY_SAMPLES as f64;
            margin_at(id, variant, m, c, r, q).map(|mg| (q, mg))
        })
        .collect::<Result<_>>()?;

    // sign pattern must be (satisfied)* (violated)*, exact values nonincreasing
    let mut seen_violation = false;
    let mut previous: Option<(f64, f64)> = None;
    for &(q, mg) in &samples {
        if mg.is_violated() {
            seen_violation = true;
        } else if matches!(mg, Margin::Exact(_) | Margin::Holds(_)) && seen_violation {
            return Err(Error::NonMonotone { detail: format!("{id}/{variant}: margin recovers at q = {q}") });
        }
        if let Margin::Exact(v) = mg {
            if let Some((pq, pv)) = previous {
                if v > pv + 1e-12 * pv.abs().max(1.0) {
                    return Err(Error::NonMonotone {
                        detail: format!("{id}/{variant}: margin rises from {pv} at q = {pq} to {v} at q = {q}"),
                    });
                }
            }
            previous = Some((q, v));
        }
    }

    let Some(first_violation) = samples.iter().position(|(_, mg)| mg.is_violated()) else {
        return match samples.last() {
            Some(&(q, Margin::Exact(v) | Margin::Holds(v))) => {
                Ok(CriticalQ { q_star: q, iterations: 0, residual_margin: v, status: QStarStatus::SatisfiedForAll })
            }
            _ => Err(Error::Undetermined { q: Q_UPPER, reason: "oracle cannot resolve the margin near q = 1".into() }),
        };
    };

    let (mut lo, mut lo_margin) = (0.0, 1.0 - c.gamma());
    for &(q, mg) in &samples[..first_violation] {
        if let Margin::Exact(v) | Margin::Holds(v) = mg {
            lo = q;
            lo_margin = v;
        }
    }
    let mut hi = samples[first_violation].0;

    let mut iterations = 0;
    while hi - lo >= MIN_BRACKET {
        let mid = 0.5 * (lo + hi);
        iterations += 1;
        match margin_at(id, variant, m, c, r, mid)? {
            Margin::Exact(v) if v.abs() <= tol => {
                return Ok(CriticalQ { q_star: mid, iterations, residual_margin: v, status: QStarStatus::Interior });
            }
            Margin::Exact(v) | Margin::Holds(v) if v > 0.0 => {
                lo = mid;
                lo_margin = v;
            }
            Margin::Exact(_) | Margin::Holds(_) | Margin::Violated => hi = mid,
            Margin::Unknown => {
                return Err(Error::Undetermined { q: mid, reason: "oracle did not converge inside the bracket".into() })
            }
        }
    }
    Ok(CriticalQ { q_star: lo, iterations, residual_margin: lo_margin, status: QStarStatus::Interior })
}

/// Value grids for a sweep; `xi` in radians.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanGrid {
    pub m: Vec<f64>,
    pub xi: Vec<f64>,
    pub gamma: Vec<f64>,
    pub rho: Vec<f64>,
}

impl ScanGrid {
    pub fn singleton(m: f64, xi: f64, gamma: f64, rho: f64) -> Self {
        Self { m: vec![m], xi: vec![xi], gamma: vec![gamma], rho: vec![rho] }
    }

    fn validate(&self) -> Result<()> {
        for (name, values) in [("m", &self.m), ("xi", &self.xi), ("gamma", &self.gamma), ("rho", &self.rho)] {
            if values.is_empty() {
                return Err(Error::invalid(name, "grid must not be empty"));
            }
        }
        for &m in &self.m {
            PascalParams::new(m, 0.0)?;
        }
        for &xi in &self.xi {
            for &gamma in &self.gamma {
                for &rho in &self.rho {
                    SpiralClassParams::new(xi, gamma, rho)?;
                }
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.m.len() * self.xi.len() * self.gamma.len() * self.rho.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanRow {
    pub criterion: CriterionId,
    pub variant: Variant,
    pub m: f64,
    pub xi: f64,
    pub gamma: f64,
    pub rho: f64,
    pub rtau: Option<RTauParams>,
    pub outcome: std::result::Result<CriticalQ, Error>,
}

/// One row per grid point, ordered by `(m, xi, gamma, rho)` indices.
/// Per-row failures are kept in the row.
pub fn scan(
    id: CriterionId,
    variant: Variant,
    grid: &ScanGrid,
    r: Option<&RTauParams>,
    tol: f64,
) -> Result<Vec<ScanRow>> {
    grid.validate()?;
    if id.needs_rtau() && r.is_none() {
        return Err(Error::MissingRTau { criterion: id.label() });
    }
    let mut points = Vec::with_capacity(grid.len());
    for &m in &grid.m {
        for &xi in &grid.xi {
            for &gamma in &grid.gamma {
                for &rho in &grid.rho {
                    points.push((m, xi, gamma, rho));
                }
            }
        }
    }
    let rtau = if id.needs_rtau() { r.copied() } else { None };
    Ok(points
        .into_par_iter()
        .map(|(m, xi, gamma, rho)| {
            let outcome =
                SpiralClassParams::new(xi, gamma, rho).and_then(|c| critical_q(id, variant, m, &c, rtau.as_ref(), tol));
            ScanRow { criterion: id, variant, m, xi, gamma, rho, rtau, outcome }
        })
        .collect())
}
