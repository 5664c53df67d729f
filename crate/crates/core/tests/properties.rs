use ellipcert::bounds::{phi, phi_inverse};
use ellipcert::coeff::{sample, Domain, MatrixField};
use ellipcert::degiorgi::{build_spec, coefficients_at, exponent_b, peak_d, threshold_d};
use ellipcert::discrete::stencil::{dot, norm2};
use ellipcert::discrete::{assemble, heat_apply, lp_ratio_probe};
use ellipcert::ellipticity::{distance, verify_sandwich};
use ellipcert::linalg::max_abs_entry_diff;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

fn points_field(seed: u64, d: usize, skew: f64, big: f64) -> MatrixField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let samples = (0..3).map(|_| sample::random_elliptic(d, 0.5, big, skew, &mut rng)).collect();
    let coords = (0..3).map(|i| vec![i as f64; d]).collect();
    MatrixField::new(d, 1, Domain::Points { coords }, samples).unwrap()
}

fn noise(len: usize, seed: u64) -> Vec<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..len)
        .map(|_| Complex64::new(StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng)))
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn distance_is_scale_invariant(seed in any::<u64>(), skew in 0.0..3.0f64, c in 0.01..100.0f64) {
        let f = points_field(seed, 3, skew, 6.0);
        let a = distance(&f).unwrap();
        let b = distance(&f.scaled(c).unwrap()).unwrap();
        prop_assert!((a.dist - b.dist).abs() < 1e-9);
        prop_assert!((a.t_star / c - b.t_star).abs() < 1e-6 * a.t_star / c);
    }

    #[test]
    fn distance_is_adjoint_invariant(seed in any::<u64>(), skew in 0.0..3.0f64) {
        let f = points_field(seed, 3, skew, 8.0);
        let a = distance(&f).unwrap().dist;
        let b = distance(&f.adjoint()).unwrap().dist;
        prop_assert!((a - b).abs() < 1e-9);
    }

    #[test]
    fn sandwich_holds(seed in any::<u64>(), skew in 0.0..4.0f64, big in 1.0..40.0f64, d in 3usize..6) {
        let s = verify_sandwich(&points_field(seed, d, skew, big)).unwrap();
        prop_assert!(s.lower_slack >= -1e-10 && s.upper_slack >= -1e-10);
        prop_assert!(s.dist < 1.0);
    }

    #[test]
    fn phi_round_trips(p in 2.0..60.0f64) {
        let y = phi(p).unwrap();
        prop_assert!(y >= 1.0);
        prop_assert!((phi_inverse(y).unwrap() - p).abs() < 1e-9 * p);
    }

    #[test]
    fn phi_is_increasing(p in 2.0..40.0f64, dp in 1e-3..5.0f64) {
        prop_assert!(phi(p + dp).unwrap() > phi(p).unwrap());
    }

    #[test]
    fn degiorgi_coefficients_are_zero_homogeneous(
        c in 0.1..5.0f64,
        big_d in 0.0..10.0f64,
        x in prop::array::uniform3(-5.0..5.0f64),
        scale in 1e-3..1e3f64,
    ) {
        prop_assume!(x.iter().map(|v| v * v).sum::<f64>() > 1e-6);
        let spec = build_spec(3, c, big_d.max(threshold_d(3, c))).unwrap();
        let a = coefficients_at(&spec, &x).unwrap();
        let y: Vec<f64> = x.iter().map(|v| v * scale).collect();
        let b = coefficients_at(&spec, &y).unwrap();
        prop_assert!(max_abs_entry_diff(&a, &b) < 1e-9 * (1.0 + big_d * big_d));
    }

    #[test]
    fn degiorgi_exponent_is_unimodal(c in 0.1..5.0f64, d in 3usize..6, s in 0.0..1.0f64, ds in 0.0..1.0f64) {
        let thr = threshold_d(d, c);
        let peak = peak_d(d, c);
        let lo = thr + s * (peak - thr);
        let hi = lo + ds * (peak - lo);
        prop_assert!(exponent_b(d, c, hi) >= exponent_b(d, c, lo) - 1e-12);
        prop_assert!(exponent_b(d, c, peak) >= 1.0 - 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn stencil_duality_and_accretivity(seed in any::<u64>(), skew in 0.0..3.0f64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let field = sample::elliptic_torus(3, 1, 4, 4.0, 0.5, 3.0, skew, &mut rng).unwrap();
        let op = assemble(&field).unwrap();
        let u = noise(op.len(), seed ^ 1);
        let v = noise(op.len(), seed ^ 2);
        let lhs = dot(&v, &op.apply(&u));
        let rhs = dot(&op.apply_adjoint(&v), &u);
        prop_assert!((lhs - rhs).norm() < 1e-9 * (1.0 + lhs.norm()));
        prop_assert!(dot(&u, &op.apply(&u)).re >= -1e-10);
    }

    #[test]
    fn crank_nicolson_semigroup(seed in any::<u64>(), t in 0.05..0.5f64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let field = sample::hermitian_torus(3, 1, 4, 4.0, 0.5, 3.0, &mut rng).unwrap();
        let op = assemble(&field).unwrap();
        let f = noise(op.len(), seed);
        let twice = heat_apply(&op, t, &heat_apply(&op, t, &f, 4).unwrap(), 4).unwrap();
        let once = heat_apply(&op, 2.0 * t, &f, 8).unwrap();
        let diff: Vec<Complex64> = twice.iter().zip(&once).map(|(a, b)| a - b).collect();
        prop_assert!(norm2(&diff) <= 1e-7 * norm2(&f));
    }

    #[test]
    fn probes_are_seed_reproducible(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let field = sample::hermitian_torus(3, 1, 4, 4.0, 0.5, 3.0, &mut rng).unwrap();
        let op = assemble(&field).unwrap();
        let a = lp_ratio_probe(&op, 0.2, 3.0, 2, seed).unwrap();
        let b = lp_ratio_probe(&op, 0.2, 3.0, 2, seed).unwrap();
        prop_assert_eq!(a.to_bits(), b.to_bits());
    }
}
