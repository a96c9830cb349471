use std::f64::consts::PI;

use greenflux::geometry::Domain;
use greenflux::green::GreenKernel;
use greenflux::inverse::{assemble, kernel_value, solve_tikhonov, spectrum, OperatorA, TikhonovSolver};
use greenflux::schrodinger::first_variation;
use greenflux::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};

fn disk_op(nr: usize, na: usize, nb: usize, w: Complex64) -> OperatorA {
    let k = GreenKernel::new(&Domain::UnitDisk).unwrap();
    assemble(&k, w, nr, na, nb).unwrap()
}

#[test]
fn rows_match_first_variation() {
    let a = disk_op(24, 48, 48, Complex64::new(0.2, -0.1));
    let ones = vec![1.0; a.n_area()];
    let v = a.apply(&ones).unwrap();
    let u = a.disc.sample(|_| 1.0);
    for (s, vk) in a.samples.iter().zip(&v) {
        let fv = first_variation(&a.disc, &u, s.position).unwrap();
        assert!((vk - fv).abs() < 1e-8);
    }
}

#[test]
fn entries_are_nonpositive_for_centred_pole() {
    let a = disk_op(24, 48, 48, Complex64::new(0.0, 0.0));
    assert!(a.matrix.iter().all(|x| *x <= 0.0));
}

#[test]
fn kernel_is_nonpositive() {
    let k = GreenKernel::new(&Domain::UnitDisk).unwrap();
    let mut rng = rand::rngs::StdRng::seed_from_u64(3);
    for _ in 0..500 {
        let w = Complex64::from_polar(rng.random_range(0.0..0.9), rng.random_range(0.0..2.0 * PI));
        let z = Complex64::from_polar(rng.random_range(0.0..0.999), rng.random_range(0.0..2.0 * PI));
        let zeta = Complex64::from_polar(1.0, rng.random_range(0.0..2.0 * PI));
        assert!(kernel_value(&k, w, z, zeta).unwrap() <= 0.0);
    }
}

#[test]
fn top_singular_value_is_operator_norm() {
    let s = spectrum(&disk_op(16, 32, 32, Complex64::new(0.0, 0.0)));
    assert!((s.singular_values[0] - 1.0 / (4.0 * PI)).abs() < 1e-8);
}

#[test]
fn spectrum_is_sorted_and_positive() {
    let a = disk_op(16, 32, 32, Complex64::new(0.0, 0.0));
    let s = spectrum(&a);
    assert!(s.singular_values.windows(2).all(|p| p[0] >= p[1]));
    assert!(*s.singular_values.last().unwrap() > 0.0);
    assert!(!s.degenerate);
}

#[test]
fn leading_singular_values_stable_under_boundary_refinement() {
    let a = spectrum(&disk_op(16, 32, 32, Complex64::new(0.1, 0.0)));
    let b = spectrum(&disk_op(16, 32, 64, Complex64::new(0.1, 0.0)));
    for (x, y) in a.singular_values.iter().zip(&b.singular_values).take(10) {
        assert!(((x - y) / x).abs() < 0.01, "{x} {y}");
    }
}

#[test]
fn round_trip() {
    let a = disk_op(16, 32, 32, Complex64::new(0.0, 0.0));
    let u: Vec<f64> = a.disc.rule().nodes().iter().map(|z| 1.0 + z.re).collect();
    let v = a.apply(&u).unwrap();
    let solver = TikhonovSolver::new(&a);
    let top = spectrum(&a).singular_values[0];
    let mut last = f64::INFINITY;
    for alpha in [1e-6, 1e-8, 1e-10, 1e-12] {
        let r = solver.solve(&v, alpha).unwrap();
        // Every residual component is damped by at least α/(σ₁² + α).
        assert!(r.residual >= alpha / (top * top + alpha) * (1.0 - 1e-6));
        assert!(r.residual < last);
        last = r.residual;
    }
    assert!(last < 1e-6);
}

#[test]
fn smooth_negative_target() {
    let a = disk_op(16, 32, 32, Complex64::new(0.0, 0.0));
    let v: Vec<f64> = a.samples.iter().map(|s| -(1.0 + 0.3 * s.position.arg().cos()) / (8.0 * PI)).collect();
    let r = solve_tikhonov(&a, &v, 1e-6).unwrap();
    assert!(r.residual < 0.05);
}

#[test]
fn large_alpha_shrinks_to_zero() {
    let a = disk_op(16, 32, 32, Complex64::new(0.0, 0.0));
    let mut rng = rand::rngs::StdRng::seed_from_u64(7);
    let v: Vec<f64> = (0..a.n_boundary()).map(|_| rng.random_range(-1.0..1.0)).collect();
    let solver = TikhonovSolver::new(&a);
    let r = solver.solve(&v, 1e12).unwrap();
    assert!(r.u.iter().all(|x| x.abs() < 1e-10));
    assert!((r.residual - 1.0).abs() < 1e-10);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn adjoint_consistency(seed in 0u64..1000) {
        let a = disk_op(8, 16, 16, Complex64::new(0.1, 0.2));
        let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
        let u: Vec<f64> = (0..a.n_area()).map(|_| rng.random_range(-1.0..1.0)).collect();
        let v: Vec<f64> = (0..a.n_boundary()).map(|_| rng.random_range(-1.0..1.0)).collect();
        let lhs = a.boundary_inner(&a.apply(&u).unwrap(), &v);
        let rhs = a.area_inner(&u, &a.apply_adjoint(&v).unwrap());
        prop_assert!((lhs - rhs).abs() < 1e-10);
    }

    #[test]
    fn nonnegative_u_gives_nonpositive_image(seed in 0u64..1000, wr in 0.0f64..0.7, wa in 0.0f64..std::f64::consts::TAU) {
        let a = disk_op(12, 24, 24, Complex64::from_polar(wr, wa));
        let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
        let c: [f64; 3] = [rng.random_range(0.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)];
        let u: Vec<f64> = a.disc.rule().nodes().iter()
            .map(|z| (c[0] + c[1] * z.re + c[2] * z.im).abs()).collect();
        for x in a.apply(&u).unwrap() {
            prop_assert!(x <= 0.0);
        }
    }
}
