use num_complex::Complex64;
use qcauchy::relativistic::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn grid() -> Vec<[f64; 3]> {
    let axis = [-2.0, -0.7, 0.0, 0.9, 2.5];
    let mut pts = Vec::new();
    for &x in &axis {
        for &y in &axis {
            for &z in &axis {
                pts.push([x, y, z]);
            }
        }
    }
    pts
}

fn random_p(rng: &mut ChaCha8Rng) -> [f64; 3] {
    [rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0)]
}

/// Eigenvalues through the complex Schur form.
fn eigenvalues4(u: &Matrix4c) -> Vec<Complex64> {
    u.schur().eigenvalues().expect("triangular Schur factor").iter().copied().collect()
}

fn eigenvalues3(u: &Matrix3c) -> Vec<Complex64> {
    u.schur().eigenvalues().expect("triangular Schur factor").iter().copied().collect()
}

fn multiset_gap(mut got: Vec<Complex64>, want: &[Complex64]) -> f64 {
    let mut worst: f64 = 0.0;
    for w in want {
        let (i, d) = got.iter().enumerate().map(|(i, g)| (i, (g - w).norm())).fold((0, f64::INFINITY), |a, b| if b.1 < a.1 { b } else { a });
        worst = worst.max(d);
        got.remove(i);
    }
    worst
}

#[test]
fn fw_transform_diagonalizes_on_grid() {
    let mut worst: f64 = 0.0;
    for m in [0.5, 1.0, 2.0] {
        for p in grid() {
            let fw = fw_unitary(&p, m).unwrap();
            worst = worst
                .max(fw.diagonalization_residual())
                .max(fw.hermiticity_defect())
                .max(fw.unitarity_defect())
                .max(fw.involution_defect());
        }
    }
    assert!(worst <= 1e-12, "{worst:e}");
}

#[test]
fn fw_transform_is_involutive_at_random_points() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..100 {
        let p = random_p(&mut rng);
        let m = rng.gen_range(0.0..3.0);
        assert!(fw_unitary(&p, m).unwrap().involution_defect() <= 1e-13);
    }
}

#[test]
fn massless_spectrum_is_doubly_degenerate() {
    let p = [0.6, 0.0, 0.8];
    let h = dirac_hamiltonian(&p, 0.0);
    let want = [1.0, 1.0, -1.0, -1.0].map(|x| Complex64::new(x, 0.0));
    assert!(multiset_gap(eigenvalues4(&h), &want) < 1e-12);
}

#[test]
fn dirac_symbol_routes_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..50 {
        let p = random_p(&mut rng);
        let (m, t, s) = (rng.gen_range(0.0..2.0), rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        let u = dirac_symbol(&p, m, t).unwrap();
        let direct = dirac_symbol_direct(&p, m, t, SignConvention::Plus);
        assert!(max_abs(&(u - direct)) <= 1e-11);
        assert!(max_abs(&(u.adjoint() * u - Matrix4c::identity())) <= 1e-12);
        let group = u * dirac_symbol(&p, m, s).unwrap() - dirac_symbol(&p, m, t + s).unwrap();
        assert!(max_abs(&group) <= 1e-12);
        let e = (m * m + p.iter().map(|x| x * x).sum::<f64>()).sqrt();
        let (up, down) = (Complex64::from_polar(1.0, t * e), Complex64::from_polar(1.0, -t * e));
        assert!(multiset_gap(eigenvalues4(&u), &[up, up, down, down]) <= 1e-10);
    }
}

#[test]
fn pauli_jordan_route() {
    for (p, m, t) in [([0.0, 0.6, 0.8], 0.0, 1.0), ([0.3, -1.1, 0.4], 1.0, 0.7), ([2.0, 0.1, -0.5], 2.5, -1.3)] {
        let e = (m * m + p.iter().map(|x: &f64| x * x).sum::<f64>()).sqrt();
        assert!(kg_initial_data_defect(e, t) <= 1e-12);
        let r = pauli_jordan_symbol_check(&p, m, t).unwrap();
        assert!(r.plus <= 1e-10, "{r:?}");
        assert_eq!(r.selected(1e-10), Some(SignConvention::Plus));
    }
}

#[test]
fn bessel_argument_convention_is_massive() {
    for (m, t, rho) in [(2.0, 1.0, 0.7), (0.5, 1.5, 2.0), (3.0, 0.8, 1.3)] {
        let massive = pauli_jordan_radial_check(m, t, rho, BesselArgument::Massive).unwrap();
        let bare = pauli_jordan_radial_check(m, t, rho, BesselArgument::Bare).unwrap();
        assert!(massive <= 1e-4 && bare > 1e-4, "m={m}: {massive:e} {bare:e}");
    }
}

#[test]
fn photon_frame_on_random_momenta() {
    let spin = photon_spin_matrices();
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..100 {
        let p = random_p(&mut rng);
        let rho = p.iter().map(|x| x * x).sum::<f64>().sqrt();
        let sp = spin.projection(&p);
        let want = [rho, -rho, 0.0].map(|x| Complex64::new(x, 0.0));
        assert!(multiset_gap(eigenvalues3(&sp), &want) <= 1e-12);
        let f = helicity_diagonalizer(&p).unwrap();
        assert!(f.diagonalization_residual() <= 1e-12);
        assert!(f.unitarity_defect() <= 1e-13);

        let m = photon_symbol(&p, 0.9);
        assert!(max_abs(&(m.adjoint() * m - Matrix3c::identity())) <= 1e-12);
        let spectrum = [Complex64::from_polar(1.0, -0.9 * rho), Complex64::from_polar(1.0, 0.9 * rho), Complex64::new(1.0, 0.0)];
        assert!(multiset_gap(eigenvalues3(&m), &spectrum) <= 1e-10);
        assert!(max_abs(&(photon_symbol(&p, 0.0) - Matrix3c::identity())) <= 1e-14);
    }
}

#[test]
fn photon_frame_is_rotation_covariant() {
    let p = [0.8, -0.3, 1.1];
    let ang: f64 = 1.1;
    let (s, c) = ang.sin_cos();
    let rotated = [c * p[0] - s * p[1], s * p[0] + c * p[1], p[2]];
    let a = helicity_diagonalizer(&p).unwrap();
    let b = helicity_diagonalizer(&rotated).unwrap();
    assert!(a.diagonalization_residual() <= 1e-12 && b.diagonalization_residual() <= 1e-12);
}

#[test]
fn photon_evolution_is_second_order() {
    let p = [0.5, 0.7, -0.4];
    let r1 = photon_evolution_residual(&p, 0.8, 1e-2);
    let r2 = photon_evolution_residual(&p, 0.8, 5e-3);
    let ratio = r1 / r2;
    assert!((ratio - 4.0).abs() <= 0.5, "{r1:e} {r2:e}");
    // The conjugate field runs backwards in time.
    let back = photon_symbol(&p, -0.8);
    let sp = photon_spin_matrices().projection(&p);
    let h = 1e-6;
    let d = (photon_symbol(&p, -0.8 - h) - photon_symbol(&p, -0.8 + h)) * Complex64::new(0.0, 1.0 / (2.0 * h));
    assert!(max_abs(&(d + sp * back)) < 1e-8);
}
