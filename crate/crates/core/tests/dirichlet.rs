use greenflux::dirichlet::{linearization_bound, solve_perturbed, solve_probes, BoundaryData, Resolution};
use greenflux::geometry::Domain;
use greenflux::green::GreenKernel;
use greenflux::oracle::bessel_i0;
use greenflux::perturbation::Perturbation;
use greenflux::Complex64;
use proptest::prelude::*;

fn disk() -> GreenKernel {
    GreenKernel::new(&Domain::UnitDisk).unwrap()
}

#[test]
fn exact_solution_matches_bessel() {
    let k = disk();
    let data = BoundaryData::from_fn(&k, 64, |_| 1.0).unwrap();
    for eps in [0.05, 0.1] {
        let s = solve_perturbed(&k, &data, &Perturbation::constant(1.0), eps, Complex64::new(0.0, 0.0), Resolution::default())
            .unwrap();
        let exact = 1.0 / bessel_i0(eps.sqrt()).unwrap();
        assert!(((s.phi_eps - exact) / exact).abs() < 1e-4, "{eps}: {} {exact}", s.phi_eps);
    }
}

#[test]
fn remainder_is_quadratic() {
    let k = disk();
    let data = BoundaryData::from_fn(&k, 64, |z| 1.0 + 0.5 * z.re + 0.2 * (z * z).im).unwrap();
    let u = Perturbation::Gaussian { sigma: 0.5, center: [0.1, 0.2] };
    let probes = [
        Complex64::new(0.0, 0.0),
        Complex64::new(0.4, 0.1),
        Complex64::new(-0.3, 0.5),
        Complex64::new(0.2, -0.6),
        Complex64::new(-0.7, -0.1),
    ];
    let rem = |eps: f64| -> Vec<f64> {
        let sol = solve_probes(&k, &data, &u, eps, &probes, Resolution::default()).unwrap();
        sol.probes.iter().map(|p| (p.phi_eps - p.phi0 - eps * p.delta).abs()).collect()
    };
    let (a, b) = (rem(0.1), rem(0.05));
    for (x, y) in a.iter().zip(&b) {
        let ratio = x / y;
        assert!((ratio - 4.0).abs() < 0.4, "{ratio}");
    }
}

#[test]
fn maximum_principle_on_probes() {
    let k = disk();
    let data = BoundaryData::from_fn(&k, 128, |z| (3.0 * z.arg()).cos() + 0.3 * z.im).unwrap();
    let probes: Vec<Complex64> = (0..12).map(|i| Complex64::from_polar(0.08 * i as f64, 0.7 * i as f64)).collect();
    let sol = solve_probes(&k, &data, &Perturbation::constant(1.0), 0.0, &probes, Resolution::default()).unwrap();
    for p in &sol.probes {
        assert!(p.phi0.abs() <= data.sup_norm() + 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]
    #[test]
    fn linearization_bound_holds(
        c in proptest::collection::vec(-1.0f64..1.0, 5),
        sigma in 0.2f64..1.0,
        cx in -0.5f64..0.5,
        zr in 0.0f64..0.8,
        za in 0.0f64..std::f64::consts::TAU,
    ) {
        let k = disk();
        let data = BoundaryData::from_fn(&k, 64, |z| {
            c[0] + c[1] * z.re + c[2] * z.im + c[3] * (z * z).re + c[4] * (z * z * z).im
        }).unwrap();
        let u = Perturbation::Gaussian { sigma, center: [cx, 0.0] };
        let b = linearization_bound(&k, &data, &u, Complex64::from_polar(zr, za), Resolution::default()).unwrap();
        prop_assert!(b.holds(), "{:?}", b);
    }
}
