use num_complex::Complex64;
use qcauchy::premeasure::{
    box_measure_nd, effective_time, interval_measure_1d, marginal_compatibility, step_approximation,
    weak_continuity, BoundedFunction, CylinderSpec, MeasureConfig, Side,
};
use qcauchy::testfn::TestFunction;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn random_line_bases_match_closed_form() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let cfg = MeasureConfig::default();
    for _ in 0..20 {
        let n = rng.gen_range(1..5);
        let dt: Vec<f64> = (0..n).map(|_| rng.gen_range(0.1..1.0)).collect();
        let alpha: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let spec = CylinderSpec::line(dt, alpha).unwrap();
        let t = effective_time(&spec).unwrap();
        let a = rng.gen_range(-3.0..3.0) * t;
        let b = a + rng.gen_range(0.2..3.0) * t;
        if [a, b].iter().any(|x| (x.abs() - t).abs() < 0.05 * t) {
            continue;
        }
        let numeric = box_measure_nd(&spec, &[Side::Finite(a, b)], &cfg).unwrap().value;
        let exact = interval_measure_1d(&spec, a, b).unwrap().value;
        assert!((numeric - exact).norm() <= 1e-6, "T={t} [{a},{b}]: {numeric} vs {exact}");
    }
}

#[test]
fn diagonal_box_factorizes() {
    let spec = CylinderSpec::diagonal(vec![0.6, 1.1]).unwrap();
    let one = |t: f64| CylinderSpec::line(vec![t], vec![1.0]).unwrap();
    for (x, y) in [((0.2, 0.9), (-0.5, 1.6)), ((-2.0, -0.1), (0.3, 0.8))] {
        let v = box_measure_nd(&spec, &[Side::Finite(x.0, x.1), Side::Finite(y.0, y.1)], &MeasureConfig::default())
            .unwrap()
            .value;
        let p = interval_measure_1d(&one(0.6), x.0, x.1).unwrap().value
            * interval_measure_1d(&one(1.1), y.0, y.1).unwrap().value;
        assert!((v - p).norm() <= 1e-6, "{v} vs {p}");
    }
}

#[test]
fn large_cube_has_unit_mass() {
    let spec = CylinderSpec::unbounded(vec![0.5, 0.5], vec![vec![1.0, 0.3], vec![-0.4, 1.0]]).unwrap();
    let side = 1e4 * spec.constraint_norm();
    let v = box_measure_nd(&spec, &[Side::Finite(-side / 2.0, side / 2.0); 2], &MeasureConfig::default()).unwrap();
    assert!((v.value - 1.0).norm() <= 1e-3, "{}", v.value);
}

#[test]
fn compatibility_of_marginals() {
    let cfg = MeasureConfig::default();
    let diag = CylinderSpec::diagonal(vec![0.7, 0.4]).unwrap();
    assert!(marginal_compatibility(&diag, &cfg).unwrap() <= 1e-6);
    let (c, s) = (std::f64::consts::FRAC_PI_4.cos(), std::f64::consts::FRAC_PI_4.sin());
    let rot = CylinderSpec::unbounded(vec![0.5, 0.5], vec![vec![c, -s], vec![s, c]]).unwrap();
    let r = marginal_compatibility(&rot, &cfg).unwrap();
    assert!(r <= 1e-4, "rotation residual {r:e}");
    let single = CylinderSpec::line(vec![1.0], vec![1.0]).unwrap();
    assert_eq!(marginal_compatibility(&single, &cfg).unwrap(), 0.0);
}

#[test]
fn weak_continuity_of_step_approximations() {
    let g = TestFunction::centered_gaussian(1, 0.5f64.sqrt()).unwrap();
    let f = BoundedFunction { constant: Complex64::new(0.0, 0.0), decaying: Some(g) };
    let reference = step_approximation(|tau| tau, 1.0, 512).unwrap();
    let seq: Vec<CylinderSpec> = [4, 8, 16, 32, 64, 128, 256].iter().map(|&n| step_approximation(|tau| tau, 1.0, n).unwrap()).collect();
    let rows = weak_continuity(&seq, &reference, &f, 1e-3).unwrap();
    assert!(rows.windows(2).all(|w| w[1].residual < w[0].residual));

    let flat: Vec<CylinderSpec> = [2, 8, 32].iter().map(|&n| step_approximation(|_| 1.0, 1.0, n).unwrap()).collect();
    let flat_ref = step_approximation(|_| 1.0, 1.0, 512).unwrap();
    let rows = weak_continuity(&flat, &flat_ref, &f, 1e-3).unwrap();
    assert!(rows.iter().all(|r| r.residual == 0.0));

    let one = BoundedFunction { constant: Complex64::new(1.0, 0.0), decaying: None };
    let rows = weak_continuity(&seq, &reference, &one, 1e-3).unwrap();
    assert!(rows.iter().all(|r| r.residual == 0.0));
}
