use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;

use spiral_core::criteria::{corollary, criterion, ClassKind, Corollary, CriterionId, SpiralClassParams, Variant};
use spiral_core::disk::{convex_spiral_functional, spiral_functional, verify_on_disk, DiskGrid};
use spiral_core::scan::{critical_q, scan, QStarStatus, ScanGrid};
use spiral_core::series::{
    evaluate, evaluate_d1, hadamard_convolve, integral_transform, pascal_pmf, PascalParams, PowerSeries, RTauParams,
};

fn coeffs(max_len: usize, scale: f64) -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec((-scale..scale, -scale..scale), 0..max_len)
        .prop_map(|v| v.into_iter().map(|(re, im)| Complex64::new(re, im)).collect())
}

/// Coefficients decaying like 1/n, small enough to keep denominators away
/// from zero.
fn tame_series() -> impl Strategy<Value = PowerSeries> {
    coeffs(7, 0.3).prop_map(|v| {
        PowerSeries::from_coefficients(v.into_iter().enumerate().map(|(i, a)| a / (i + 2) as f64).collect())
    })
}

fn disk_point(r_max: f64) -> impl Strategy<Value = Complex64> {
    (0.05..r_max, -PI..PI).prop_map(|(r, t)| Complex64::from_polar(r, t))
}

fn class_params() -> impl Strategy<Value = SpiralClassParams> {
    (-1.4..1.4f64, 0.0..0.99f64, 0.0..0.99f64).prop_map(|(x, g, r)| SpiralClassParams::new(x, g, r).unwrap())
}

fn rtau() -> RTauParams {
    RTauParams::new(Complex64::new(1.0, 0.0), 1.0, 0.5).unwrap()
}

fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
    (a - b).norm() <= tol * a.norm().max(b.norm()).max(1.0)
}

proptest! {
    #[test]
    fn hadamard_commutes_and_associates(a in coeffs(12, 2.0), b in coeffs(12, 2.0), c in coeffs(12, 2.0)) {
        let (f, g, h) = (
            PowerSeries::from_coefficients(a),
            PowerSeries::from_coefficients(b),
            PowerSeries::from_coefficients(c),
        );
        prop_assert_eq!(hadamard_convolve(&f, &g), hadamard_convolve(&g, &f));
        let left = hadamard_convolve(&hadamard_convolve(&f, &g), &h);
        let right = hadamard_convolve(&f, &hadamard_convolve(&g, &h));
        prop_assert_eq!(left.order(), right.order());
        for n in 2..=left.order() {
            prop_assert!(close(left.coefficient(n), right.coefficient(n), 1e-15));
        }
        prop_assert_eq!(hadamard_convolve(&f, &PowerSeries::identity()), PowerSeries::identity());
    }

    #[test]
    fn integral_transform_inverts_multiplication_by_n(a in coeffs(20, 5.0), z in disk_point(0.95)) {
        let f = PowerSeries::from_coefficients(a);
        let g = integral_transform(&f);
        for n in 2..=f.order() {
            prop_assert!(close(g.coefficient(n) * n as f64, f.coefficient(n), 1e-15));
        }
        // z G'(z) = f(z)
        let lhs = z * evaluate_d1(&g, z).unwrap();
        prop_assert!(close(lhs, evaluate(&f, z).unwrap(), 1e-13));
    }

    #[test]
    fn derivative_matches_finite_difference(a in coeffs(10, 1.0), z in disk_point(0.9)) {
        let f = PowerSeries::from_coefficients(a);
        let h = 1e-6;
        let fd = (evaluate(&f, z + h).unwrap() - evaluate(&f, z - h).unwrap()) / (2.0 * h);
        let fd_im = (evaluate(&f, z + Complex64::i() * h).unwrap() - evaluate(&f, z - Complex64::i() * h).unwrap())
            / (2.0 * h * Complex64::i());
        let d = evaluate_d1(&f, z).unwrap();
        prop_assert!(close(d, fd, 1e-7), "{} vs {}", d, fd);
        // holomorphic: both directions agree
        prop_assert!(close(d, fd_im, 1e-7), "{} vs {}", d, fd_im);
    }

    #[test]
    fn alexander_relation(f in tame_series(), z in disk_point(0.95), c in class_params()) {
        let a = convex_spiral_functional(&integral_transform(&f), z, &c).unwrap();
        let b = spiral_functional(&f, z, &c).unwrap();
        prop_assert!((a - b).abs() <= 1e-10, "{} vs {}", a, b);
    }

    #[test]
    fn conjugate_point_mirrors_xi(a in prop::collection::vec(-0.2..0.2f64, 0..6), z in disk_point(0.95), c in class_params()) {
        let f = PowerSeries::from_real(&a);
        let mirrored = SpiralClassParams::new(-c.xi(), c.gamma(), c.rho()).unwrap();
        let at_z = spiral_functional(&f, z, &c).unwrap();
        let at_conj = spiral_functional(&f, z.conj(), &mirrored).unwrap();
        prop_assert!((at_z - at_conj).abs() <= 1e-12);
    }

    #[test]
    fn refining_the_grid_never_raises_the_minimum(f in tame_series(), c in class_params(), k in 8usize..40) {
        let radii = vec![0.3, 0.7, 0.95];
        let coarse = DiskGrid::new(radii.clone(), k).unwrap();
        let fine = DiskGrid::new(radii, 2 * k).unwrap();
        for class in [ClassKind::S, ClassKind::K] {
            let a = verify_on_disk(&f, &c, class, &coarse, 1e-6).unwrap();
            let b = verify_on_disk(&f, &c, class, &fine, 1e-6).unwrap();
            prop_assert!(b.min_value <= a.min_value);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn pmf_is_a_distribution(m in 1.0..8.0f64, q in 0.0..0.9f64) {
        let p = PascalParams::new(m, q).unwrap();
        let mut total = 0.0;
        for k in 0..600u64 {
            let x = pascal_pmf(k, &p);
            prop_assert!(x >= 0.0);
            total += x;
        }
        prop_assert!((total - 1.0).abs() < 1e-10, "{}", total);
        for k in 0..20u64 {
            let ratio = pascal_pmf(k + 1, &p) / pascal_pmf(k, &p);
            prop_assert!((ratio - q * (m + k as f64) / (k + 1) as f64).abs() <= 1e-12 * ratio.max(1.0));
        }
    }

    #[test]
    fn variants_cohere(m in 1.0..6.0f64, q in 0.01..0.8f64, c in class_params()) {
        let p = PascalParams::new(m, q).unwrap();
        let r = rtau();
        let rel = |a: f64, b: f64| (a - b).abs() / b.abs().max(1.0);
        let get = |id, v| criterion(id, &p, &c, Some(&r), v).unwrap();
        for id in [CriterionId::ThetaInS, CriterionId::LambdaRtauInS, CriterionId::GInK, CriterionId::GInS] {
            prop_assert!(rel(get(id, Variant::Paper).lhs, get(id, Variant::Direct).lhs) <= 1e-9, "{}", id);
        }
        for id in CriterionId::ALL {
            let d = get(id, Variant::Direct);
            prop_assert!(rel(get(id, Variant::Rederived).lhs, d.lhs) <= 1e-9, "{}", id);
            prop_assert_eq!(d.margin, d.rhs - d.lhs);
            prop_assert_eq!(d.satisfied, d.margin >= 0.0);
        }
        // the printed convex-class forms never undershoot the direct sum
        for id in [CriterionId::ThetaInK, CriterionId::LambdaRtauInK] {
            prop_assert!(get(id, Variant::Paper).lhs >= get(id, Variant::Direct).lhs);
        }
        for variant in Variant::ALL {
            let t1 = get(CriterionId::ThetaInS, variant).lhs;
            prop_assert!(rel(get(CriterionId::GInK, variant).lhs, t1) <= 1e-12);
            for cor in Corollary::ALL {
                let a = corollary(cor, &p, &c, Some(&r), variant).unwrap();
                let b = criterion(cor.criterion(), &p, &c.without_rho(), Some(&r), variant).unwrap();
                prop_assert_eq!(a.lhs.to_bits(), b.lhs.to_bits());
            }
        }
    }

    #[test]
    fn direct_lhs_increases_in_q(m in 1.0..6.0f64, q in 0.01..0.8f64, dq in 1e-3..0.1f64, c in class_params()) {
        let r = rtau();
        let at = |q| {
            let p = PascalParams::new(m, q).unwrap();
            move |id| criterion(id, &p, &c, Some(&r), Variant::Direct).unwrap().lhs
        };
        let (lo, hi) = (at(q), at(q + dq));
        for id in CriterionId::ALL {
            prop_assert!(hi(id) > lo(id), "{}", id);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn critical_q_brackets_the_sign_change(
        m in 1.0..5.0f64,
        xi in -1.2..1.2f64,
        gamma in 0.0..0.9f64,
        rho in 0.0..0.9f64,
        which in 0usize..6,
    ) {
        let id = CriterionId::ALL[which];
        let c = SpiralClassParams::new(xi, gamma, rho).unwrap();
        let r = rtau();
        let cq = critical_q(id, Variant::Direct, m, &c, Some(&r), 1e-10).unwrap();
        prop_assume!(cq.status == QStarStatus::Interior);
        prop_assert!(cq.iterations <= 60);
        prop_assert!(cq.residual_margin.abs() <= 1e-10);
        let at = |q| criterion(id, &PascalParams::new(m, q).unwrap(), &c, Some(&r), Variant::Direct).unwrap();
        prop_assert!(at(cq.q_star - 1e-6).satisfied);
        prop_assert!(!at(cq.q_star + 1e-6).satisfied);

        // closed forms that bound the direct sum from above give a smaller root
        let paper = critical_q(id, Variant::Paper, m, &c, Some(&r), 1e-10).unwrap();
        if matches!(id, CriterionId::ThetaInK | CriterionId::LambdaRtauInK) {
            prop_assert!(paper.q_star <= cq.q_star + 1e-9);
        } else {
            prop_assert!((paper.q_star - cq.q_star).abs() <= 1e-7);
        }
    }
}

#[test]
fn scans_are_deterministic() {
    let grid =
        ScanGrid { m: vec![1.0, 2.5, 4.0], xi: vec![-0.5, 0.0, 0.7], gamma: vec![0.1, 0.6], rho: vec![0.0, 0.5] };
    let r = rtau();
    for id in CriterionId::ALL {
        let a = scan(id, Variant::Direct, &grid, Some(&r), 1e-10).unwrap();
        let b = scan(id, Variant::Direct, &grid, Some(&r), 1e-10).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), grid.len());
    }
}
