//! Pascal distribution series and truncated normalized power series.
//!
//! A [`PowerSeries`] stores `f(z) = z + a_2 z^2 + ... + a_N z^N`. The leading
//! coefficient is implicit and always exactly one. Coefficients are complex so
//! the same type can carry the Pascal series, its convolutions with R^τ
//! extremal series, and arbitrary user input for the disk verifier.
//!
//! Binomial coefficients `C(k+m-1, m-1)` are never formed from factorials.
//! They are accumulated as the rising-factorial product
//! `m (m+1) ... (m+k-1) / k!` one factor at a time, with the `q` power folded
//! into the same product, which is valid for every real `m >= 1`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::summation::{self, Weight};

/// Parameters `(m, q)` of the Pascal (negative binomial) distribution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PascalParams {
    m: f64,
    q: f64,
}

impl PascalParams {
    pub fn new(m: f64, q: f64) -> Result<Self> {
        if !m.is_finite() || m < 1.0 {
            return Err(Error::invalid("m", format!("must be finite and >= 1, got {m}")));
        }
        if !q.is_finite() || !(0.0..1.0).contains(&q) {
            return Err(Error::invalid("q", format!("must satisfy 0 <= q < 1, got {q}")));
        }
        Ok(Self { m, q })
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    /// Same shape parameter, different `q`.
    pub fn with_q(&self, q: f64) -> Result<Self> {
        Self::new(self.m, q)
    }

    /// `(1-q)^m`, the mass at `k = 0`.
    pub fn base_mass(&self) -> f64 {
        (1.0 - self.q).powf(self.m)
    }
}

/// Parameters `(τ, ϑ, δ)` of the class R^τ(ϑ, δ).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RTauParams {
    tau: Complex64,
    vartheta: f64,
    delta: f64,
}

impl RTauParams {
    pub fn new(tau: Complex64, vartheta: f64, delta: f64) -> Result<Self> {
        if !tau.re.is_finite() || !tau.im.is_finite() || tau.norm() == 0.0 {
            return Err(Error::invalid("tau", format!("must be finite and nonzero, got {tau}")));
        }
        if !vartheta.is_finite() || vartheta <= 0.0 || vartheta > 1.0 {
            return Err(Error::invalid("vartheta", format!("must satisfy 0 < vartheta <= 1, got {vartheta}")));
        }
        if !delta.is_finite() || delta >= 1.0 {
            return Err(Error::invalid("delta", format!("must be finite and < 1, got {delta}")));
        }
        Ok(Self { tau, vartheta, delta })
    }

    pub fn tau(&self) -> Complex64 {
        self.tau
    }

    pub fn vartheta(&self) -> f64 {
        self.vartheta
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// `2|τ|(1-δ)`, the numerator shared by every coefficient bound.
    pub fn scale(&self) -> f64 {
        2.0 * self.tau.norm() * (1.0 - self.delta)
    }
}

/// Truncated normalized power series `z + Σ_{n=2}^{N} a_n z^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerSeries {
    /// `higher[i]` is `a_{i+2}`.
    higher: Vec<Complex64>,
    truncated: bool,
}

impl PowerSeries {
    /// The series `f(z) = z` (order 1).
    pub fn identity() -> Self {
        Self { higher: Vec::new(), truncated: false }
    }

    /// Exact polynomial with coefficients `a_2, a_3, ...`.
    pub fn from_coefficients(higher: Vec<Complex64>) -> Self {
        Self { higher, truncated: false }
    }

    pub fn from_real(higher: &[f64]) -> Self {
        Self::from_coefficients(higher.iter().map(|&a| Complex64::new(a, 0.0)).collect())
    }

    /// Marks the series as the truncation of an infinite series, which makes
    /// the disk verifier check its tail before sampling.
    pub fn into_truncated(mut self) -> Self {
        self.truncated = true;
        self
    }

    pub fn is_truncated(&self) -> bool {
        self.truncated
    }

    /// Truncation order `N`.
    pub fn order(&self) -> usize {
        self.higher.len() + 1
    }

    /// Coefficients `a_2..a_N`.
    pub fn higher(&self) -> &[Complex64] {
        &self.higher
    }

    /// `a_n`, with `a_1 = 1` and zero beyond the stored order.
    pub fn coefficient(&self, n: usize) -> Complex64 {
        match n {
            0 => Complex64::new(0.0, 0.0),
            1 => Complex64::new(1.0, 0.0),
            _ => self.higher.get(n - 2).copied().unwrap_or_default(),
        }
    }

    /// `f(z)`, `f'(z)` and `f''(z)` in one Horner pass.
    pub fn evaluate_all(&self, z: Complex64) -> Result<(Complex64, Complex64, Complex64)> {
        check_in_disk(z)?;
        Ok(self.horner_unchecked(z))
    }

    pub(crate) fn horner_unchecked(&self, z: Complex64) -> (Complex64, Complex64, Complex64) {
        // p0 = Σ a_n z^{n-2}, p1 = Σ n a_n z^{n-2}, p2 = Σ n(n-1) a_n z^{n-2}
        let zero = Complex64::new(0.0, 0.0);
        let (mut p0, mut p1, mut p2) = (zero, zero, zero);
        for (i, &a) in self.higher.iter().enumerate().rev() {
            let n = (i + 2) as f64;
            p0 = p0 * z + a;
            p1 = p1 * z + a * n;
            p2 = p2 * z + a * (n * (n - 1.0));
        }
        let one = Complex64::new(1.0, 0.0);
        (z * (one + z * p0), one + z * p1, p2)
    }
}

fn check_in_disk(z: Complex64) -> Result<()> {
    if !(z.norm() < 1.0) {
        return Err(Error::OutsideDisk { z });
    }
    Ok(())
}

pub fn evaluate(f: &PowerSeries, z: Complex64) -> Result<Complex64> {
    Ok(f.evaluate_all(z)?.0)
}

pub fn evaluate_d1(f: &PowerSeries, z: Complex64) -> Result<Complex64> {
    Ok(f.evaluate_all(z)?.1)
}

pub fn evaluate_d2(f: &PowerSeries, z: Complex64) -> Result<Complex64> {
    Ok(f.evaluate_all(z)?.2)
}

#[inline]
fn rising_step(m: f64, q: f64, j: u64) -> f64 {
    q * (m + (j - 1) as f64) / j as f64
}

/// Iterator over `(n, C(n+m-2, m-1) q^{n-1})` for `n = 2, 3, ...`, the Pascal
/// series coefficients without the `(1-q)^m` factor.
#[derive(Debug, Clone)]
pub struct RawCoefficients {
    m: f64,
    q: f64,
    j: u64,
    product: f64,
}

impl RawCoefficients {
    pub fn new(p: &PascalParams) -> Self {
        Self { m: p.m, q: p.q, j: 0, product: 1.0 }
    }
}

impl Iterator for RawCoefficients {
    type Item = (usize, f64);

    fn next(&mut self) -> Option<Self::Item> {
        self.j += 1;
        self.product *= rising_step(self.m, self.q, self.j);
        Some((self.j as usize + 1, self.product))
    }
}

/// `P(x = k) = C(k+m-1, m-1) q^k (1-q)^m`.
pub fn pascal_pmf(k: u64, p: &PascalParams) -> f64 {
    let mut product = 1.0;
    for j in 1..=k {
        product *= rising_step(p.m, p.q, j);
    }
    p.base_mass() * product
}

/// `φ_n(m, q) = C(n+m-2, m-1) q^{n-1} (1-q)^m`, the n-th coefficient of Θ_q^m.
///
/// Panics if `n < 2`.
pub fn pascal_coefficient(n: usize, p: &PascalParams) -> f64 {
    assert!(n >= 2, "Pascal series coefficients start at n = 2");
    pascal_pmf(n as u64 - 1, p)
}

/// Θ_q^m truncated at order `n_max` (`n_max >= 1`).
pub fn theta_series(p: &PascalParams, n_max: usize) -> PowerSeries {
    let base = p.base_mass();
    let higher =
        RawCoefficients::new(p).take(n_max.saturating_sub(1)).map(|(_, c)| Complex64::new(base * c, 0.0)).collect();
    PowerSeries { higher, truncated: true }
}

/// Θ_q^m truncated at the adaptive order of the unit-weight Pascal sum.
pub fn theta_series_adaptive(p: &PascalParams) -> Result<PowerSeries> {
    let order = summation::oracle_sum(&Weight::One, p)?.order;
    Ok(theta_series(p, order))
}

/// Coefficientwise product `z + Σ a_n b_n z^n`, truncated to the shorter order.
pub fn hadamard_convolve(f: &PowerSeries, g: &PowerSeries) -> PowerSeries {
    let higher = f.higher.iter().zip(&g.higher).map(|(a, b)| a * b).collect();
    PowerSeries { higher, truncated: f.truncated || g.truncated }
}

/// Λ_q^m f = Θ_q^m ∗ f, with Θ taken to the order of `f`.
pub fn pascal_operator(p: &PascalParams, f: &PowerSeries) -> PowerSeries {
    hadamard_convolve(&theta_series(p, f.order()), f)
}

/// `G(z) = ∫_0^z f(t)/t dt`, mapping `a_n` to `a_n / n`.
pub fn integral_transform(f: &PowerSeries) -> PowerSeries {
    let higher = f.higher.iter().enumerate().map(|(i, a)| a / (i + 2) as f64).collect();
    PowerSeries { higher, truncated: f.truncated }
}

/// Sharp coefficient bound `2|τ|(1-δ) / (1 + ϑ(n-1))` for R^τ(ϑ, δ).
pub fn rtau_coefficient_bound(n: usize, r: &RTauParams) -> f64 {
    r.scale() / (1.0 + r.vartheta * (n as f64 - 1.0))
}

/// Series whose coefficients sit exactly at the R^τ bound.
pub fn extremal_rtau_series(r: &RTauParams, n_max: usize) -> PowerSeries {
    let higher = (2..=n_max).map(|n| Complex64::new(rtau_coefficient_bound(n, r), 0.0)).collect();
    PowerSeries { higher, truncated: true }
}
