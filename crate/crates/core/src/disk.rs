//! Sampled check of the defining conditions of S(ξ,γ,ρ) and K(ξ,γ,ρ).
//!
//! A passing [`DiskReport`] means no violation was found on the grid; it is
//! evidence, not proof. A failing report carries a concrete witness point
//! where the functional is negative (or its denominator vanishes), and that
//! witness is a genuine counterexample.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::criteria::{ClassKind, SpiralClassParams};
use crate::error::{Error, Result};
use crate::series::PowerSeries;

/// Denominators at or below this magnitude are treated as zeros.
pub const DENOMINATOR_FLOOR: f64 = 1e-14;

/// Truncated series whose last term at the outer radius exceeds this are
/// refused.
pub const TAIL_LIMIT: f64 = 1e-8;

pub const DEFAULT_TOLERANCE: f64 = 1e-6;

const MAX_RADIUS: f64 = 1.0 - 1e-3;

#[derive(Debug, Clone, PartialEq)]
pub struct DiskGrid {
    radii: Vec<f64>,
    angles_per_ring: usize,
}

impl DiskGrid {
    pub fn new(radii: Vec<f64>, angles_per_ring: usize) -> Result<Self> {
        if radii.is_empty() {
            return Err(Error::invalid("radii", "at least one radius is required"));
        }
        if let Some(r) = radii.iter().find(|r| !(**r > 0.0 && **r <= MAX_RADIUS)) {
            return Err(Error::invalid("radii", format!("radius {r} outside (0, 0.999]")));
        }
        if angles_per_ring < 8 {
            return Err(Error::invalid("angles", format!("need at least 8 angles per ring, got {angles_per_ring}")));
        }
        Ok(Self { radii, angles_per_ring })
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn angles_per_ring(&self) -> usize {
        self.angles_per_ring
    }

    pub fn max_radius(&self) -> f64 {
        self.radii.iter().copied().fold(0.0, f64::max)
    }

    /// Grid point `(ring, angle index)`.
    pub fn point(&self, ring: usize, angle: usize) -> Complex64 {
        let theta = std::f64::consts::TAU * angle as f64 / self.angles_per_ring as f64;
        Complex64::from_polar(self.radii[ring], theta)
    }

    pub fn len(&self) -> usize {
        self.radii.len() * self.angles_per_ring
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

impl Default for DiskGrid {
    /// Rings at 0.1, 0.2, ..., 0.9, 0.95, 0.99, 0.995 with 720 angles each.
    fn default() -> Self {
        let mut radii: Vec<f64> = (1..=9).map(|k| k as f64 / 10.0).collect();
        radii.extend([0.95, 0.99, 0.995]);
        Self { radii, angles_per_ring: 720 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiskReport {
    /// Smallest functional value seen; `-inf` when a denominator vanished.
    pub min_value: f64,
    pub witness: Complex64,
    pub pass: bool,
    pub points_checked: usize,
    /// The witness is a point where the functional's denominator vanishes.
    pub singular: bool,
}

fn check_point(z: Complex64) -> Result<()> {
    let r = z.norm();
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::OutsideDisk { z });
    }
    Ok(())
}

fn quotient(num: Complex64, den: Complex64, z: Complex64, c: &SpiralClassParams) -> Result<f64> {
    let magnitude = den.norm();
    if !(magnitude > DENOMINATOR_FLOOR) {
        return Err(Error::VanishingDenominator { z, magnitude });
    }
    let rotation = Complex64::from_polar(1.0, c.xi());
    Ok((rotation * num / den).re - c.gamma() * c.xi().cos())
}

/// `Re(e^{iξ} z f' / ((1-ρ) f + ρ z f')) - γ cos ξ`.
pub fn spiral_functional(f: &PowerSeries, z: Complex64, c: &SpiralClassParams) -> Result<f64> {
    check_point(z)?;
    let (f0, f1, _) = f.evaluate_all(z)?;
    spiral_from_values(f0, f1, z, c)
}

fn spiral_from_values(f0: Complex64, f1: Complex64, z: Complex64, c: &SpiralClassParams) -> Result<f64> {
    let rho = c.rho();
    quotient(z * f1, f0 * (1.0 - rho) + z * f1 * rho, z, c)
}

/// `Re(e^{iξ} (z f'' + f') / (f' + ρ z f'')) - γ cos ξ`.
pub fn convex_spiral_functional(f: &PowerSeries, z: Complex64, c: &SpiralClassParams) -> Result<f64> {
    check_point(z)?;
    let (_, f1, f2) = f.evaluate_all(z)?;
    convex_from_values(f1, f2, z, c)
}

fn convex_from_values(f1: Complex64, f2: Complex64, z: Complex64, c: &SpiralClassParams) -> Result<f64> {
    quotient(z * f2 + f1, f1 + z * f2 * c.rho(), z, c)
}

pub fn class_functional(f: &PowerSeries, z: Complex64, c: &SpiralClassParams, class: ClassKind) -> Result<f64> {
    match class {
        ClassKind::S => spiral_functional(f, z, c),
        ClassKind::K => convex_spiral_functional(f, z, c),
    }
}

/// Per-ring outcome: smallest value and its angle index, or the first
/// singular angle.
enum RingMin {
    Value(f64, usize),
    Singular(usize),
}

/// Minimum of the class functional over `grid`. Ties resolve to the smallest
/// radius index, then the smallest angle index.
pub fn verify_on_disk(
    f: &PowerSeries,
    c: &SpiralClassParams,
    class: ClassKind,
    grid: &DiskGrid,
    tolerance: f64,
) -> Result<DiskReport> {
    if f.is_truncated() {
        let order = f.order();
        let last = f.coefficient(order).norm();
        let tail = last * grid.max_radius().powi(order as i32);
        if tail > TAIL_LIMIT {
            return Err(Error::TailTooLarge { order, tail });
        }
    }

    let rings: Vec<RingMin> = (0..grid.radii.len())
        .into_par_iter()
        .map(|ring| {
            let mut best = RingMin::Value(f64::INFINITY, 0);
            for angle in 0..grid.angles_per_ring {
                let z = grid.point(ring, angle);
                let (f0, f1, f2) = f.horner_unchecked(z);
                let value = match class {
                    ClassKind::S => spiral_from_values(f0, f1, z, c),
                    ClassKind::K => convex_from_values(f1, f2, z, c),
                };
                match value {
                    Ok(v) => {
                        if let RingMin::Value(min, _) = best {
                            if v < min {
                                best = RingMin::Value(v, angle);
                            }
                        }
                    }
                    Err(_) => return RingMin::Singular(angle),
                }
            }
            best
        })
        .collect();

    let mut min_value = f64::INFINITY;
    let mut witness = grid.point(0, 0);
    for (ring, outcome) in rings.iter().enumerate() {
        match *outcome {
            RingMin::Singular(angle) => {
                return Ok(DiskReport {
                    min_value: f64::NEG_INFINITY,
                    witness: grid.point(ring, angle),
                    pass: false,
                    points_checked: grid.len(),
                    singular: true,
                });
            }
            RingMin::Value(v, angle) => {
                if v < min_value {
                    min_value = v;
                    witness = grid.point(ring, angle);
                }
            }
        }
    }
    Ok(DiskReport { min_value, witness, pass: min_value > -tolerance, points_checked: grid.len(), singular: false })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::{integral_transform, theta_series, PascalParams};

    fn cp(xi: f64, gamma: f64, rho: f64) -> SpiralClassParams {
        SpiralClassParams::new(xi, gamma, rho).unwrap()
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn grid_validation() {
        assert!(DiskGrid::new(vec![], 16).is_err());
        assert!(DiskGrid::new(vec![0.5, 1.0], 16).is_err());
        assert!(DiskGrid::new(vec![0.0], 16).is_err());
        assert!(DiskGrid::new(vec![0.5], 7).is_err());
        assert!(DiskGrid::new(vec![0.5, 0.999], 8).is_ok());
        let g = DiskGrid::default();
        assert_eq!(g.radii().len(), 12);
        assert_eq!(g.len(), 12 * 720);
        assert_eq!(g.max_radius(), 0.995);
    }

    #[test]
    fn identity_functionals() {
        let id = PowerSeries::identity();
        let cls = cp(0.6, 0.3, 0.4);
        let expected = 0.7 * 0.6f64.cos();
        for z in [c(0.3, 0.4), c(-0.9, 0.1), c(0.0, -0.5)] {
            assert!((spiral_functional(&id, z, &cls).unwrap() - expected).abs() < 1e-14);
            assert!((convex_spiral_functional(&id, z, &cls).unwrap() - expected).abs() < 1e-14);
        }
    }

    #[test]
    fn koebe_functional() {
        let koebe = PowerSeries::from_real(&(2..=200).map(|n| n as f64).collect::<Vec<_>>());
        let v = spiral_functional(&koebe, c(0.5, 0.0), &cp(0.0, 0.0, 0.0)).unwrap();
        assert!((v - 3.0).abs() < 2e-2);
    }

    #[test]
    fn rho_near_one_collapses_ratio() {
        let theta = theta_series(&PascalParams::new(2.0, 0.3).unwrap(), 120);
        let cls = cp(0.4, 0.2, 0.999);
        let v = spiral_functional(&theta, c(0.0, 0.4), &cls).unwrap();
        assert!((v - 0.8 * 0.4f64.cos()).abs() < 5e-2);
    }

    #[test]
    fn convex_quadratic() {
        let f = PowerSeries::from_real(&[0.25]);
        let v = convex_spiral_functional(&f, c(0.9, 0.0), &cp(0.0, 0.0, 0.0)).unwrap();
        assert!((v - 1.9 / 1.45).abs() < 1e-14);
    }

    #[test]
    fn functional_point_checks() {
        let id = PowerSeries::identity();
        let cls = cp(0.0, 0.0, 0.0);
        assert!(spiral_functional(&id, c(0.0, 0.0), &cls).is_err());
        assert!(spiral_functional(&id, c(1.0, 0.0), &cls).is_err());
        // f = z + 3z^2 vanishes at -1/3
        let f = PowerSeries::from_real(&[3.0]);
        assert!(matches!(spiral_functional(&f, c(-1.0 / 3.0, 0.0), &cls), Err(Error::VanishingDenominator { .. })));
    }

    #[test]
    fn alexander_pair() {
        let f = PowerSeries::from_coefficients(vec![c(0.2, -0.1), c(0.05, 0.03), c(-0.01, 0.0)]);
        let g = integral_transform(&f);
        let cls = cp(-0.7, 0.35, 0.45);
        for z in [c(0.3, 0.2), c(-0.8, 0.1), c(0.05, -0.9)] {
            let a = convex_spiral_functional(&g, z, &cls).unwrap();
            let b = spiral_functional(&f, z, &cls).unwrap();
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn identity_passes_default_grid() {
        let cls = cp(0.5, 0.25, 0.1);
        let r = verify_on_disk(&PowerSeries::identity(), &cls, ClassKind::S, &DiskGrid::default(), DEFAULT_TOLERANCE)
            .unwrap();
        assert!(r.pass);
        assert!((r.min_value - 0.75 * 0.5f64.cos()).abs() < 1e-12);
        assert_eq!(r.points_checked, 8640);
        let g = DiskGrid::default();
        assert!(g.radii().iter().any(|&rad| (r.witness.norm() - rad).abs() < 1e-12));
    }

    #[test]
    fn adversarial_series_fails() {
        let f = PowerSeries::from_real(&[3.0]);
        let r = verify_on_disk(&f, &cp(0.0, 0.0, 0.0), ClassKind::S, &DiskGrid::default(), DEFAULT_TOLERANCE).unwrap();
        assert!(!r.pass);
        assert!(r.min_value < 0.0);
        let v = spiral_functional(&f, r.witness, &cp(0.0, 0.0, 0.0)).unwrap();
        assert_eq!(v, r.min_value);
    }

    #[test]
    fn singular_point_reported_as_failure() {
        // zero of f = z + 3z^2 placed exactly on the grid
        let f = PowerSeries::from_real(&[3.0]);
        let grid = DiskGrid::new(vec![1.0 / 3.0], 8).unwrap();
        let r = verify_on_disk(&f, &cp(0.0, 0.0, 0.0), ClassKind::S, &grid, DEFAULT_TOLERANCE).unwrap();
        assert!(!r.pass);
        assert!(r.singular);
        assert_eq!(r.min_value, f64::NEG_INFINITY);
        assert!((r.witness - c(-1.0 / 3.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn refuses_long_tails() {
        let p = PascalParams::new(2.0, 0.9).unwrap();
        let short = theta_series(&p, 30);
        let err = verify_on_disk(&short, &cp(0.0, 0.0, 0.0), ClassKind::S, &DiskGrid::default(), 1e-6);
        assert!(matches!(err, Err(Error::TailTooLarge { .. })));
    }

    #[test]
    fn conjugate_symmetry_for_real_coefficients() {
        let theta = theta_series(&PascalParams::new(3.0, 0.2).unwrap(), 80);
        let cls = cp(0.3, 0.1, 0.2);
        let flipped = cp(-0.3, 0.1, 0.2);
        for z in [c(0.3, 0.5), c(-0.7, 0.2), c(0.1, -0.95)] {
            for class in [ClassKind::S, ClassKind::K] {
                let a = class_functional(&theta, z.conj(), &cls, class).unwrap();
                let b = class_functional(&theta, z, &flipped, class).unwrap();
                assert!((a - b).abs() < 1e-12);
            }
        }
    }
}
