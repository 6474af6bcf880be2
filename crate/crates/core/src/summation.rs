//! Closed forms of the Pascal-coefficient sums and the brute-force oracle
//! that checks them.
//!
//! Every sum here is a *raw* coefficient sum: `Σ_{n>=2} w_n C(n+m-2, m-1) q^{n-1}`
//! without the `(1-q)^m` normalisation. Callers that need the probabilities
//! multiply by [`PascalParams::base_mass`] themselves.
//!
//! The oracle truncates adaptively. For `k >= n >= 3` the ratio of
//! consecutive terms is bounded by
//! `q̂_n = q (n+m-1)/n * ((n-1)/(n-2))^d`, where `d` is the polynomial degree
//! of the weight (weights whose real roots are all `<= 2`). Summation stops at
//! the first `n` with `q̂_n < 1` and `|t_n| q̂_n / (1 - q̂_n)` below
//! `TAIL_TOLERANCE * max(1, |partial|)`, which bounds the neglected tail.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::{PascalParams, RawCoefficients};

/// Relative bound on the neglected tail of an oracle sum.
pub const TAIL_TOLERANCE: f64 = 1e-14;

/// Hard cap on the truncation order of an oracle sum.
pub const ORDER_CAP: usize = 100_000;

/// Below this distance from `m = 1` the inverse-weight sum switches to its
/// expansion in powers of `m - 1`.
pub const SINV_SERIES_RADIUS: f64 = 1e-4;

/// Per-term weight `w_n` of an oracle sum.
#[derive(Clone, Copy)]
pub enum Weight<'a> {
    /// `w_n = 1`
    One,
    /// `w_n = n - 1`
    NMinus1,
    /// `w_n = (n-1)(n-2)`
    Rising2,
    /// `w_n = 1/n`
    InvN,
    /// Arbitrary nonnegative weight with growth at most `n^degree`, all real
    /// roots of the growth polynomial at or below 2.
    Custom { w: &'a (dyn Fn(usize) -> f64 + Sync), degree: u32 },
}

impl Weight<'_> {
    pub fn at(&self, n: usize) -> f64 {
        let x = n as f64;
        match self {
            Weight::One => 1.0,
            Weight::NMinus1 => x - 1.0,
            Weight::Rising2 => (x - 1.0) * (x - 2.0),
            Weight::InvN => 1.0 / x,
            Weight::Custom { w, .. } => w(n),
        }
    }

    fn degree(&self) -> i32 {
        match self {
            Weight::One | Weight::InvN => 0,
            Weight::NMinus1 => 1,
            Weight::Rising2 => 2,
            Weight::Custom { degree, .. } => *degree as i32,
        }
    }
}

impl std::fmt::Debug for Weight<'_> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Weight::One => write!(f, "One"),
            Weight::NMinus1 => write!(f, "NMinus1"),
            Weight::Rising2 => write!(f, "Rising2"),
            Weight::InvN => write!(f, "InvN"),
            Weight::Custom { degree, .. } => write!(f, "Custom(degree {degree})"),
        }
    }
}

/// Value of an oracle sum together with the order where it stopped.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleSum {
    pub value: f64,
    pub order: usize,
}

/// Neumaier compensated accumulator.
#[derive(Default)]
struct Accumulator {
    sum: f64,
    compensation: f64,
}

impl Accumulator {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

/// Adaptive brute-force sum of `w_n C(n+m-2, m-1) q^{n-1}` from `n = 2`.
pub fn oracle_sum(weight: &Weight<'_>, p: &PascalParams) -> Result<OracleSum> {
    let q = p.q();
    if q == 0.0 {
        return Ok(OracleSum { value: 0.0, order: 2 });
    }
    let m = p.m();
    let degree = weight.degree();
    let mut acc = Accumulator::default();
    for (n, c) in RawCoefficients::new(p) {
        let term = weight.at(n) * c;
        acc.add(term);
        if n >= 3 {
            let x = n as f64;
            let ratio = q * (x + m - 1.0) / x * ((x - 1.0) / (x - 2.0)).powi(degree);
            if ratio < 1.0 {
                let tail = term.abs() * ratio / (1.0 - ratio);
                if tail < TAIL_TOLERANCE * acc.value().abs().max(1.0) {
                    return Ok(OracleSum { value: acc.value(), order: n });
                }
            }
        }
        if n >= ORDER_CAP {
            return Err(Error::NonConvergence { order: n, last_term: term.abs(), partial: acc.value() });
        }
    }
    unreachable!("raw coefficient iterator is infinite")
}

/// Fixed-order partial sum over `2 <= n <= n_max` (zero when `n_max < 2`).
pub fn partial_sum(weight: &Weight<'_>, p: &PascalParams, n_max: usize) -> f64 {
    let mut acc = Accumulator::default();
    for (n, c) in RawCoefficients::new(p).take(n_max.saturating_sub(1)) {
        acc.add(weight.at(n) * c);
    }
    acc.value()
}

/// `Σ C(n+m-2, m-1) q^{n-1} = (1-q)^{-m} - 1`.
pub fn sum_s0(p: &PascalParams) -> f64 {
    (-p.m() * (-p.q()).ln_1p()).exp_m1()
}

/// `Σ (n-1) C(n+m-2, m-1) q^{n-1} = q m / (1-q)^{m+1}`.
pub fn sum_s1(p: &PascalParams) -> f64 {
    let (m, q) = (p.m(), p.q());
    q * m / (1.0 - q).powf(m + 1.0)
}

/// `Σ (n-1)(n-2) C(n+m-2, m-1) q^{n-1} = q^2 m (m+1) / (1-q)^{m+2}`.
pub fn sum_s2(p: &PascalParams) -> f64 {
    let (m, q) = (p.m(), p.q());
    q * q * m * (m + 1.0) / (1.0 - q).powf(m + 2.0)
}

/// `Σ (1/n) C(n+m-2, m-1) q^{n-1}`.
///
/// Equals `[(1-q)^{1-m} - 1 - (m-1) q] / (q (m-1))` for `m > 1` and
/// `(-ln(1-q) - q) / q` at `m = 1`; near `m = 1` an expansion in `m - 1`
/// replaces the quotient, which would otherwise cancel catastrophically.
pub fn sum_sinv(p: &PascalParams) -> f64 {
    let (m, q) = (p.m(), p.q());
    if q == 0.0 {
        return 0.0;
    }
    let eps = m - 1.0;
    let x = -(-q).ln_1p();
    if eps.abs() < SINV_SERIES_RADIUS {
        // (1-q)^{-eps} - 1 - eps q = eps (x - q) + Σ_{k>=2} x^k eps^k / k!
        let mut total = neg_log1m_minus_q(q);
        let mut term = x;
        for k in 2..64 {
            term *= x * eps / k as f64;
            total += term;
            if term.abs() <= 1e-18 * total.abs() {
                break;
            }
        }
        total / q
    } else {
        ((eps * x).exp_m1() - eps * q) / (eps * q)
    }
}

/// `-ln(1-q) - q`, accurate for small `q`.
fn neg_log1m_minus_q(q: f64) -> f64 {
    if q < 0.1 {
        let mut total = 0.0;
        let mut power = q;
        for j in 2..40 {
            power *= q;
            let term = power / j as f64;
            total += term;
            if term <= 1e-18 * total {
                break;
            }
        }
        total
    } else {
        -(-q).ln_1p() - q
    }
}

/// The four series identities the criteria rely on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum IdentityId {
    S0,
    S1,
    S2,
    Sinv,
}

impl IdentityId {
    pub const ALL: [IdentityId; 4] = [IdentityId::S0, IdentityId::S1, IdentityId::S2, IdentityId::Sinv];

    pub fn label(&self) -> &'static str {
        match self {
            IdentityId::S0 => "S0",
            IdentityId::S1 => "S1",
            IdentityId::S2 => "S2",
            IdentityId::Sinv => "Sinv",
        }
    }

    pub fn weight(&self) -> Weight<'static> {
        match self {
            IdentityId::S0 => Weight::One,
            IdentityId::S1 => Weight::NMinus1,
            IdentityId::S2 => Weight::Rising2,
            IdentityId::Sinv => Weight::InvN,
        }
    }

    pub fn closed_form(&self, p: &PascalParams) -> f64 {
        match self {
            IdentityId::S0 => sum_s0(p),
            IdentityId::S1 => sum_s1(p),
            IdentityId::S2 => sum_s2(p),
            IdentityId::Sinv => sum_sinv(p),
        }
    }
}

/// Closed form and oracle value of one identity at one parameter point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub identity: IdentityId,
    pub m: f64,
    pub q: f64,
    pub closed_form: f64,
    pub truncated: f64,
    pub truncation_order: usize,
    pub abs_error: f64,
}

pub fn identity_report(identity: IdentityId, p: &PascalParams) -> Result<IdentityReport> {
    let closed_form = identity.closed_form(p);
    let oracle = oracle_sum(&identity.weight(), p)?;
    Ok(IdentityReport {
        identity,
        m: p.m(),
        q: p.q(),
        closed_form,
        truncated: oracle.value,
        truncation_order: oracle.order,
        abs_error: (closed_form - oracle.value).abs(),
    })
}

pub fn identity_reports(p: &PascalParams) -> Result<Vec<IdentityReport>> {
    IdentityId::ALL.iter().map(|id| identity_report(*id, p)).collect()
}
