use num_complex::Complex64;
use proptest::prelude::*;
use qcauchy::momentum::symbol;
use qcauchy::semigroup::*;
use qcauchy::testfn::{RegularizationConfig, TestFunction};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn gaussians() -> Vec<TestFunction> {
    vec![
        TestFunction::centered_gaussian(1, 0.5f64.sqrt()).unwrap(),
        TestFunction::gaussian(&[0.4], 0.6, &[1.5]).unwrap(),
        TestFunction::gaussian(&[-0.3], 1.1, &[0.0]).unwrap(),
    ]
}

fn odd_probe() -> TestFunction {
    let g = |c: f64| TestFunction::gaussian(&[c], 0.5, &[0.0]).unwrap();
    TestFunction::combination(vec![(Complex64::new(1.0, 0.0), g(0.7)), (Complex64::new(-1.0, 0.0), g(-0.7))]).unwrap()
}

#[test]
fn symbol_law_over_random_partitions() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let n = rng.gen_range(1..65);
        let dt: Vec<f64> = (0..n).map(|_| rng.gen_range(0.001..0.2)).collect();
        let part = Partition::from_increments(&dt).unwrap();
        let p = [rng.gen_range(-4.0..4.0), rng.gen_range(-4.0..4.0), rng.gen_range(-4.0..4.0)];
        worst = worst.max(semigroup_symbol_check(rng.gen_range(0.0..2.0), &part, &p));
    }
    assert!(worst <= 1e-12, "{worst:e}");
}

#[test]
fn coordinate_convolution_of_two_factors() {
    let cfg = RegularizationConfig::default();
    for phi in gaussians() {
        for dt in [[0.5, 0.5], [0.3, 0.9]] {
            let part = Partition::from_increments(&dt).unwrap();
            let r = semigroup_coordinate_check(0.0, &part, &phi, &cfg).unwrap();
            assert!(r.residual <= 1e-4, "{dt:?}: {r:?}");
        }
    }
}

#[test]
fn coordinate_convolution_edge_cases() {
    let cfg = RegularizationConfig::default();
    let part = Partition::from_increments(&[0.5, 0.5]).unwrap();
    let odd = semigroup_coordinate_check(0.0, &part, &odd_probe(), &cfg).unwrap();
    assert!(odd.lhs.norm() <= 1e-8 && odd.rhs.norm() <= 1e-8, "{odd:?}");

    // A vanishing second step acts as the identity.
    let phi = &gaussians()[0];
    let thin = Partition::from_increments(&[1.0, 1e-4]).unwrap();
    let r = semigroup_coordinate_check(0.0, &thin, phi, &cfg).unwrap();
    assert!(r.residual <= 1e-4, "{r:?}");

    assert!(semigroup_coordinate_check(1.0, &part, phi, &cfg).is_err());
}

#[test]
fn coordinate_residual_under_refinement() {
    let phi = &gaussians()[1];
    let part = Partition::from_increments(&[0.4, 0.7]).unwrap();
    let at = |levels| {
        let cfg = RegularizationConfig { levels, ..Default::default() };
        semigroup_coordinate_check(0.0, &part, phi, &cfg).unwrap().residual
    };
    let (coarse, fine) = (at(2), at(3));
    assert!(fine <= 0.5 * coarse || fine < 1e-12, "{coarse:e} -> {fine:e}");
}

#[test]
fn evolution_equation_is_second_order() {
    let cfg = RegularizationConfig::default();
    let phi = &gaussians()[0];
    let r1 = evolution_equation_check(1.0, 1e-2, phi, &cfg).unwrap();
    let r2 = evolution_equation_check(1.0, 5e-3, phi, &cfg).unwrap();
    assert!(r2.residual <= 1e-4);
    let ratio = r1.residual / r2.residual;
    assert!((ratio - 4.0).abs() <= 0.5, "{ratio}");
    let odd = evolution_equation_check(1.0, 5e-3, &odd_probe(), &cfg).unwrap();
    assert!(odd.derivative.norm() < 1e-10 && odd.generator.norm() < 1e-10);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]
    #[test]
    fn time_reversal_conjugates(m in 0.0f64..3.0, t in -5.0f64..5.0, p in proptest::collection::vec(-5.0f64..5.0, 1..4)) {
        prop_assert_eq!(symbol(m, t, &p).conj(), symbol(m, -t, &p));
    }

    #[test]
    fn halves_compose(m in 0.0f64..3.0, t in 0.01f64..5.0, p in proptest::collection::vec(-5.0f64..5.0, 1..4)) {
        let part = Partition::uniform(t, 2).unwrap();
        prop_assert!(semigroup_symbol_check(m, &part, &p) <= 1e-14);
    }
}
