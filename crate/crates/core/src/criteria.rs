//! Coefficient criteria for membership in S(ξ,γ,ρ) and K(ξ,γ,ρ).
//!
//! Each theorem is evaluated three ways:
//!
//! * `Paper`: the closed form exactly as printed, including the printed
//!   coefficients of the convex-class displays.
//! * `Rederived`: a closed form rebuilt from the summation identities.
//! * `Direct`: the oracle sum of the exact per-term expression the lemma
//!   bounds. This one is authoritative.
//!
//! For the Θ and G criteria of type `Σ λ(n) φ_n <= 1-γ` with `λ` reducing to
//! `λ_S`, the printed display is the equivalent normalised form
//! `Σ (λ_S(n) - (1-γ)) C(n+m-2, m-1) q^{n-1} <= 1-γ`, obtained by dividing by
//! `(1-q)^m` and cancelling the mass term. The direct variant sums that
//! normalised expression so the three left-hand sides stay comparable; every
//! other criterion sums `Σ w_n φ_n` unchanged.
//!
//! All criteria are sufficient conditions only. `satisfied == false` means the
//! test is inconclusive, not that the function lies outside the class.

use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::{rtau_coefficient_bound, PascalParams, PowerSeries, RTauParams};
use crate::summation::{self, oracle_sum, Weight};

/// Class parameters `(ξ, γ, ρ)`; `ξ` in radians.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpiralClassParams {
    xi: f64,
    gamma: f64,
    rho: f64,
}

impl SpiralClassParams {
    pub fn new(xi: f64, gamma: f64, rho: f64) -> Result<Self> {
        if !xi.is_finite() || xi.abs() >= FRAC_PI_2 {
            return Err(Error::invalid("xi", format!("must satisfy |xi| < pi/2, got {xi}")));
        }
        if !gamma.is_finite() || !(0.0..1.0).contains(&gamma) {
            return Err(Error::invalid("gamma", format!("must satisfy 0 <= gamma < 1, got {gamma}")));
        }
        if !rho.is_finite() || !(0.0..1.0).contains(&rho) {
            return Err(Error::invalid("rho", format!("must satisfy 0 <= rho < 1, got {rho}")));
        }
        Ok(Self { xi, gamma, rho })
    }

    pub fn xi(&self) -> f64 {
        self.xi
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    /// Same `ξ` and `γ` with `ρ = 0`.
    pub fn without_rho(&self) -> Self {
        Self { rho: 0.0, ..*self }
    }

    pub fn sec_xi(&self) -> f64 {
        1.0 / self.xi.abs().cos()
    }

    /// `(1-ρ) sec ξ + ρ(1-γ)`, the slope of `λ_S` in `n`.
    fn slope(&self) -> f64 {
        (1.0 - self.rho) * self.sec_xi() + self.rho * (1.0 - self.gamma)
    }

    /// `(1-ρ)(1-γ-sec ξ)`, so that `λ_S(n) = slope·n + offset`.
    fn offset(&self) -> f64 {
        (1.0 - self.rho) * (1.0 - self.gamma - self.sec_xi())
    }
}

/// Starlike-type class S(ξ,γ,ρ) or convex-type class K(ξ,γ,ρ).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ClassKind {
    S,
    K,
}

impl FromStr for ClassKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "S" | "s" => Ok(ClassKind::S),
            "K" | "k" => Ok(ClassKind::K),
            _ => Err(Error::invalid("class", format!("expected S or K, got {s:?}"))),
        }
    }
}

/// `λ_S(n) = (1-ρ)(n-1) sec ξ + (1-γ)(1 + nρ - ρ)`.
pub fn weight_s(n: usize, c: &SpiralClassParams) -> f64 {
    let x = n as f64;
    (1.0 - c.rho) * (x - 1.0) * c.sec_xi() + (1.0 - c.gamma) * (1.0 + x * c.rho - c.rho)
}

/// `λ_K(n) = n λ_S(n)`.
pub fn weight_k(n: usize, c: &SpiralClassParams) -> f64 {
    n as f64 * weight_s(n, c)
}

pub fn class_weight(class: ClassKind, n: usize, c: &SpiralClassParams) -> f64 {
    match class {
        ClassKind::S => weight_s(n, c),
        ClassKind::K => weight_k(n, c),
    }
}

/// `Σ λ(n)|a_n| - (1-γ)` over the stored coefficients; `<= 0` is sufficient
/// for membership of the truncated series.
pub fn deficiency(f: &PowerSeries, c: &SpiralClassParams, class: ClassKind) -> f64 {
    let sum: f64 = f.higher().iter().enumerate().map(|(i, a)| class_weight(class, i + 2, c) * a.norm()).sum();
    sum - (1.0 - c.gamma)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CriterionId {
    /// Θ_q^m in S(ξ,γ,ρ).
    #[serde(rename = "thm1")]
    ThetaInS,
    /// Θ_q^m in K(ξ,γ,ρ).
    #[serde(rename = "thm2")]
    ThetaInK,
    /// Λ_q^m f in S(ξ,γ,ρ) for f in R^τ(ϑ,δ).
    #[serde(rename = "thm3")]
    LambdaRtauInS,
    /// Λ_q^m f in K(ξ,γ,ρ) for f in R^τ(ϑ,δ).
    #[serde(rename = "thm4")]
    LambdaRtauInK,
    /// G_q^m in K(ξ,γ,ρ).
    #[serde(rename = "thm5")]
    GInK,
    /// G_q^m in S(ξ,γ,ρ).
    #[serde(rename = "thm6")]
    GInS,
}

impl CriterionId {
    pub const ALL: [CriterionId; 6] = [
        CriterionId::ThetaInS,
        CriterionId::ThetaInK,
        CriterionId::LambdaRtauInS,
        CriterionId::LambdaRtauInK,
        CriterionId::GInK,
        CriterionId::GInS,
    ];

    pub fn label(&self) -> &'static str {
        match self {
            CriterionId::ThetaInS => "thm1",
            CriterionId::ThetaInK => "thm2",
            CriterionId::LambdaRtauInS => "thm3",
            CriterionId::LambdaRtauInK => "thm4",
            CriterionId::GInK => "thm5",
            CriterionId::GInS => "thm6",
        }
    }

    pub fn needs_rtau(&self) -> bool {
        matches!(self, CriterionId::LambdaRtauInS | CriterionId::LambdaRtauInK)
    }

    /// Class the criterion certifies membership in.
    pub fn class(&self) -> ClassKind {
        match self {
            CriterionId::ThetaInS | CriterionId::LambdaRtauInS | CriterionId::GInS => ClassKind::S,
            CriterionId::ThetaInK | CriterionId::LambdaRtauInK | CriterionId::GInK => ClassKind::K,
        }
    }
}

impl fmt::Display for CriterionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for CriterionId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        CriterionId::ALL
            .into_iter()
            .find(|id| id.label() == s)
            .ok_or_else(|| Error::invalid("criterion", format!("unknown criterion {s:?}")))
    }
}

/// The ρ = 0 specialisations, numbered like the theorems they come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Corollary {
    #[serde(rename = "cor1")]
    C1,
    #[serde(rename = "cor2")]
    C2,
    #[serde(rename = "cor3")]
    C3,
    #[serde(rename = "cor4")]
    C4,
    #[serde(rename = "cor5")]
    C5,
    #[serde(rename = "cor6")]
    C6,
}

impl Corollary {
    pub const ALL: [Corollary; 6] =
        [Corollary::C1, Corollary::C2, Corollary::C3, Corollary::C4, Corollary::C5, Corollary::C6];

    pub fn criterion(&self) -> CriterionId {
        match self {
            Corollary::C1 => CriterionId::ThetaInS,
            Corollary::C2 => CriterionId::ThetaInK,
            Corollary::C3 => CriterionId::LambdaRtauInS,
            Corollary::C4 => CriterionId::LambdaRtauInK,
            Corollary::C5 => CriterionId::GInK,
            Corollary::C6 => CriterionId::GInS,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Corollary::C1 => "cor1",
            Corollary::C2 => "cor2",
            Corollary::C3 => "cor3",
            Corollary::C4 => "cor4",
            Corollary::C5 => "cor5",
            Corollary::C6 => "cor6",
        }
    }
}

impl FromStr for Corollary {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Corollary::ALL
            .into_iter()
            .find(|c| c.label() == s)
            .ok_or_else(|| Error::invalid("criterion", format!("unknown corollary {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    Paper,
    Rederived,
    Direct,
}

impl Variant {
    pub const ALL: [Variant; 3] = [Variant::Paper, Variant::Rederived, Variant::Direct];

    pub fn label(&self) -> &'static str {
        match self {
            Variant::Paper => "paper",
            Variant::Rederived => "rederived",
            Variant::Direct => "direct",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Variant::ALL
            .into_iter()
            .find(|v| v.label() == s)
            .ok_or_else(|| Error::invalid("variant", format!("unknown variant {s:?}")))
    }
}

/// One evaluated criterion. `rhs` is always `1-γ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub criterion: CriterionId,
    pub variant: Variant,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub satisfied: bool,
    pub disagreement: Option<f64>,
}

impl Verdict {
    fn new(criterion: CriterionId, variant: Variant, lhs: f64, c: &SpiralClassParams) -> Self {
        let rhs = 1.0 - c.gamma;
        let margin = rhs - lhs;
        Self { criterion, variant, lhs, rhs, margin, satisfied: margin >= 0.0, disagreement: None }
    }
}

/// All three variants of one criterion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VerdictSet {
    pub paper: Verdict,
    pub rederived: Verdict,
    pub direct: Verdict,
    pub disagreement: f64,
}

impl VerdictSet {
    pub fn get(&self, variant: Variant) -> &Verdict {
        match variant {
            Variant::Paper => &self.paper,
            Variant::Rederived => &self.rederived,
            Variant::Direct => &self.direct,
        }
    }
}

fn require_rtau(id: CriterionId, r: Option<&RTauParams>) -> Result<&RTauParams> {
    r.ok_or(Error::MissingRTau { criterion: id.label() })
}

/// `2|τ|(1-δ)/ϑ`.
fn rtau_prefactor(r: &RTauParams) -> f64 {
    r.scale() / r.vartheta()
}

/// Printed display of the Θ-in-K criterion, with its printed coefficients.
fn printed_theta_in_k(p: &PascalParams, c: &SpiralClassParams) -> f64 {
    let (m, q) = (p.m(), p.q());
    let (rho, gamma, sec) = (c.rho, c.gamma, c.sec_xi());
    ((1.0 - rho) * sec + (1.0 - gamma)) * m * (m + 1.0) * q * q / ((1.0 - q) * (1.0 - q))
        + (2.0 * (1.0 - rho) * sec + (1.0 - gamma) * (4.0 - rho)) * m * q / (1.0 - q)
        + (1.0 - gamma) * (2.0 - rho) * (1.0 - (1.0 - q).powf(m))
}

/// Printed braces of the inverse-weight criterion:
/// `slope [1-(1-q)^m] + offset/(q(m-1)) [(1-q) - (1-q)^m - q(m-1)(1-q)^m]`.
///
/// The printed quotient is 0/0 at `m = 1` and `q = 0`; there the analytic
/// continuation `(1-q)^m Sinv` is used.
fn printed_inverse_braces(p: &PascalParams, c: &SpiralClassParams) -> f64 {
    let (m, q) = (p.m(), p.q());
    let b = 1.0 - q;
    let bm = b.powf(m);
    let second = if q == 0.0 {
        0.0
    } else if (m - 1.0).abs() < summation::SINV_SERIES_RADIUS {
        bm * summation::sum_sinv(p)
    } else {
        (b - bm - q * (m - 1.0) * bm) / (q * (m - 1.0))
    };
    c.slope() * (1.0 - bm) + c.offset() * second
}

/// `Σ λ_S(n) φ_n` from the identities: `slope·qm/(1-q) + (1-γ)(1-(1-q)^m)`.
fn lambda_s_mass(p: &PascalParams, c: &SpiralClassParams) -> f64 {
    p.base_mass() * (c.slope() * summation::sum_s1(p) + (1.0 - c.gamma) * summation::sum_s0(p))
}

fn paper_lhs(id: CriterionId, p: &PascalParams, c: &SpiralClassParams, r: Option<&RTauParams>) -> Result<f64> {
    let (m, q) = (p.m(), p.q());
    Ok(match id {
        CriterionId::ThetaInS | CriterionId::GInK => c.slope() * q * m / (1.0 - q).powf(m + 1.0),
        CriterionId::ThetaInK => printed_theta_in_k(p, c),
        CriterionId::LambdaRtauInS => rtau_prefactor(require_rtau(id, r)?) * printed_inverse_braces(p, c),
        CriterionId::LambdaRtauInK => rtau_prefactor(require_rtau(id, r)?) * printed_theta_in_k(p, c),
        CriterionId::GInS => printed_inverse_braces(p, c),
    })
}

fn rederived_lhs(id: CriterionId, p: &PascalParams, c: &SpiralClassParams, r: Option<&RTauParams>) -> Result<f64> {
    let base = p.base_mass();
    let (slope, offset, level) = (c.slope(), c.offset(), 1.0 - c.gamma);
    let inverse = || base * (slope * summation::sum_s0(p) + offset * summation::sum_sinv(p));
    Ok(match id {
        CriterionId::ThetaInS | CriterionId::GInK => slope * summation::sum_s1(p),
        // n λ_S(n) = slope (n-1)(n-2) + (2 slope + 1-γ)(n-1) + (1-γ)
        CriterionId::ThetaInK => {
            base * (slope * summation::sum_s2(p)
                + (2.0 * slope + level) * summation::sum_s1(p)
                + level * summation::sum_s0(p))
        }
        CriterionId::LambdaRtauInS => rtau_prefactor(require_rtau(id, r)?) * inverse(),
        // n/(1+ϑ(n-1)) <= 1/ϑ reduces the K sum to the S sum of Θ
        CriterionId::LambdaRtauInK => rtau_prefactor(require_rtau(id, r)?) * lambda_s_mass(p, c),
        CriterionId::GInS => inverse(),
    })
}

fn direct_lhs(id: CriterionId, p: &PascalParams, c: &SpiralClassParams, r: Option<&RTauParams>) -> Result<f64> {
    let level = 1.0 - c.gamma;
    let base = p.base_mass();
    let sum = |w: &(dyn Fn(usize) -> f64 + Sync), degree: u32| -> Result<f64> {
        Ok(oracle_sum(&Weight::Custom { w, degree }, p)?.value)
    };
    // partial sums in non-convergence errors are rescaled like the value, so
    // they remain lower bounds of the lhs
    let scaled = |value: Result<f64>| -> Result<f64> {
        value.map(|v| base * v).map_err(|e| match e {
            Error::NonConvergence { order, last_term, partial } => {
                Error::NonConvergence { order, last_term: base * last_term, partial: base * partial }
            }
            other => other,
        })
    };
    match id {
        CriterionId::ThetaInS => sum(&|n| weight_s(n, c) - level, 1),
        CriterionId::GInK => sum(&|n| weight_k(n, c) / n as f64 - level, 1),
        CriterionId::ThetaInK => scaled(sum(&|n| weight_k(n, c), 2)),
        CriterionId::GInS => scaled(sum(&|n| weight_s(n, c) / n as f64, 1)),
        CriterionId::LambdaRtauInS => {
            let r = require_rtau(id, r)?;
            scaled(sum(&|n| weight_s(n, c) * rtau_coefficient_bound(n, r), 1))
        }
        CriterionId::LambdaRtauInK => {
            let r = require_rtau(id, r)?;
            scaled(sum(&|n| weight_k(n, c) * rtau_coefficient_bound(n, r), 2))
        }
    }
}

/// Left-hand side of criterion `id` under `variant`.
pub fn criterion_lhs(
    id: CriterionId,
    p: &PascalParams,
    c: &SpiralClassParams,
    r: Option<&RTauParams>,
    variant: Variant,
) -> Result<f64> {
    match variant {
        Variant::Paper => paper_lhs(id, p, c, r),
        Variant::Rederived => rederived_lhs(id, p, c, r),
        Variant::Direct => direct_lhs(id, p, c, r),
    }
}

/// Evaluates one criterion. `r` is required for the R^τ criteria and ignored
/// otherwise.
pub fn criterion(
    id: CriterionId,
    p: &PascalParams,
    c: &SpiralClassParams,
    r: Option<&RTauParams>,
    variant: Variant,
) -> Result<Verdict> {
    let lhs = criterion_lhs(id, p, c, r, variant)?;
    Ok(Verdict::new(id, variant, lhs, c))
}

/// Evaluates all three variants and records their largest pairwise gap.
pub fn criterion_all(
    id: CriterionId,
    p: &PascalParams,
    c: &SpiralClassParams,
    r: Option<&RTauParams>,
) -> Result<VerdictSet> {
    let mut paper = criterion(id, p, c, r, Variant::Paper)?;
    let mut rederived = criterion(id, p, c, r, Variant::Rederived)?;
    let mut direct = criterion(id, p, c, r, Variant::Direct)?;
    let disagreement =
        (paper.lhs - rederived.lhs).abs().max((paper.lhs - direct.lhs).abs()).max((rederived.lhs - direct.lhs).abs());
    for v in [&mut paper, &mut rederived, &mut direct] {
        v.disagreement = Some(disagreement);
    }
    Ok(VerdictSet { paper, rederived, direct, disagreement })
}

/// Corollary = the matching theorem with `ρ` forced to zero.
pub fn corollary(
    cor: Corollary,
    p: &PascalParams,
    c: &SpiralClassParams,
    r: Option<&RTauParams>,
    variant: Variant,
) -> Result<Verdict> {
    criterion(cor.criterion(), p, &c.without_rho(), r, variant)
}

pub fn corollary_all(
    cor: Corollary,
    p: &PascalParams,
    c: &SpiralClassParams,
    r: Option<&RTauParams>,
) -> Result<VerdictSet> {
    criterion_all(cor.criterion(), p, &c.without_rho(), r)
}
