//! Acceptance suite. Prints one PASS/FAIL line per criterion with the measured
//! values, and exits nonzero if any criterion fails.

use std::f64::consts::PI;
use std::time::Instant;

use greenflux::beltrami::{beltrami_boundary_monotonicity, beltrami_first_variation};
use greenflux::dirichlet::{linearization_bound, solve_perturbed, BoundaryData, Resolution};
use greenflux::geometry::{Domain, MarkerCurve};
use greenflux::green::{Discretization, GreenKernel};
use greenflux::growth::{run, AreaResolution, OperatorSpec, RunOptions};
use greenflux::inverse::{assemble, kernel_along_normal, solve_tikhonov, spectrum};
use greenflux::oracle::radial::{radial_area_integral, radial_potential};
use greenflux::oracle::{bessel_flux, bessel_i0, fd_green, PolarGrid};
use greenflux::perturbation::{Perturbation, ScalarField};
use greenflux::schrodinger::{epsilon_sweep, first_variation, normal_derivative_exact, second_variation, solve_series};
use greenflux::Complex64;
use rand::{Rng, SeedableRng};

type Outcome = Result<Vec<String>, Vec<String>>;
type Criterion = (&'static str, fn() -> Outcome);

struct Check {
    lines: Vec<String>,
    ok: bool,
}

impl Check {
    fn new() -> Self {
        Self { lines: Vec::new(), ok: true }
    }

    fn expect(&mut self, ok: bool, line: String) {
        self.ok &= ok;
        self.lines.push(format!("{} {line}", if ok { "ok  " } else { "MISS" }));
    }

    fn close(&mut self, name: &str, got: f64, want: f64, tol: f64) {
        let err = (got - want).abs();
        self.expect(err < tol, format!("{name}: {got:.12e} vs {want:.12e} (|diff| {err:.2e}, tol {tol:.0e})"));
    }

    fn rel(&mut self, name: &str, got: f64, want: f64, tol: f64) {
        let err = ((got - want) / want).abs();
        self.expect(err < tol, format!("{name}: {got:.12e} vs {want:.12e} (rel {err:.2e}, tol {tol:.0e})"));
    }

    fn done(self) -> Outcome {
        if self.ok {
            Ok(self.lines)
        } else {
            Err(self.lines)
        }
    }
}

fn origin() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

fn disk_kernel() -> GreenKernel {
    GreenKernel::new(&Domain::UnitDisk).unwrap()
}

fn disk_disc(nr: usize, na: usize, w: Complex64) -> Discretization {
    Discretization::new(&disk_kernel(), nr, na, Some(w)).unwrap()
}

fn g0(r: f64) -> f64 {
    r.ln() / (2.0 * PI)
}

fn disk_kernel_exactness() -> Outcome {
    let mut c = Check::new();
    let start = Instant::now();
    let k = disk_kernel();
    c.close("g(0.5, 0)", k.green(Complex64::new(0.5, 0.0), origin()).unwrap(), 0.5f64.ln() / (2.0 * PI), 1e-12);
    let samples = Domain::UnitDisk.boundary_samples(256).unwrap();
    let worst = samples
        .iter()
        .map(|s| (k.poisson_at(origin(), s) - 1.0 / (2.0 * PI)).abs())
        .fold(0.0, f64::max);
    c.expect(worst < 1e-12, format!("max |P(0, zeta) - 1/2pi| over 256 nodes: {worst:.2e}"));
    for w in [Complex64::new(0.0, 0.0), Complex64::new(0.3, 0.2), Complex64::new(-0.7, 0.5)] {
        let mass: f64 = samples.iter().map(|s| k.poisson_at(w, s) * s.ds).sum();
        c.close(&format!("integral of P(w = {w}) ds"), mass, 1.0, 1e-10);
    }
    let secs = start.elapsed().as_secs_f64();
    c.expect(secs < 1.0, format!("runtime {secs:.3} s (limit 1 s)"));
    c.done()
}

fn normal_derivative_identity() -> Outcome {
    let mut c = Check::new();
    let k = disk_kernel();
    let d = disk_disc(32, 64, origin());
    let samples = Domain::UnitDisk.boundary_samples(64).unwrap();
    let lap = d.sample(|_| -4.0);
    let worst = samples
        .iter()
        .map(|s| (k.normal_derivative_via_lemma(&d, &lap, s.position).unwrap() + 2.0).abs())
        .fold(0.0, f64::max);
    c.expect(worst < 1e-8, format!("f = 1 - |z|^2: max |d_n f + 2| over 64 nodes {worst:.2e} (tol 1e-8)"));
    // f = (1 - |z|²) e^x: Δf = e^x (−3 − 4x − |z|²), ∂_n f = −2 e^{cos θ}.
    let lap = d.sample(|z| z.re.exp() * (-3.0 - 4.0 * z.re - z.norm_sqr()));
    let worst = samples
        .iter()
        .map(|s| (k.normal_derivative_via_lemma(&d, &lap, s.position).unwrap() + 2.0 * s.position.re.exp()).abs())
        .fold(0.0, f64::max);
    c.expect(worst < 1e-6, format!("f = (1 - |z|^2) e^x: max |d_n f + 2 e^x| {worst:.2e} (tol 1e-6)"));
    c.done()
}

fn schrodinger_exact_flux() -> Outcome {
    let mut c = Check::new();
    let start = Instant::now();
    let eps = 0.1;
    let exact = bessel_flux(eps).unwrap();
    let d = disk_disc(64, 128, origin());
    let u = d.sample(|_| 1.0);
    let sg = solve_series(&d, &u, eps).unwrap();
    let zeta = Complex64::from_polar(1.0, 0.9);
    c.rel("series flux at (64, 128)", normal_derivative_exact(&d, &sg, zeta).unwrap(), exact, 1e-4);
    let grid = PolarGrid::new(64, 128).unwrap();
    let fd = fd_green(&grid, &|_| eps, origin()).unwrap();
    c.rel("finite-volume flux at (64, 128)", fd.mean_boundary_flux(), exact, 1e-3);
    let secs = start.elapsed().as_secs_f64();
    c.expect(secs < 30.0, format!("runtime {secs:.2} s (limit 30 s)"));
    c.done()
}

fn random_perturbation(rng: &mut impl Rng) -> Perturbation {
    match rng.random_range(0..4) {
        0 => Perturbation::constant(rng.random_range(0.1..3.0)),
        1 => Perturbation::Re { shift: rng.random_range(1.0..3.0) },
        2 => Perturbation::Abs2,
        _ => Perturbation::Gaussian {
            sigma: rng.random_range(0.1..1.0),
            center: [rng.random_range(-0.8..0.8), rng.random_range(-0.8..0.8)],
        },
    }
}

fn first_variation_check() -> Outcome {
    let mut c = Check::new();
    let oracle = radial_area_integral(&g0) / (2.0 * PI);
    c.close("radial oracle for u = 1, w = 0", oracle, -1.0 / (8.0 * PI), 1e-12);
    let d = disk_disc(32, 64, origin());
    let u = d.sample(|_| 1.0);
    let fv = first_variation(&d, &u, Complex64::from_polar(1.0, 2.2)).unwrap();
    c.close("first variation u = 1, w = 0", fv, oracle, 1e-6);
    let mut rng = rand::rngs::StdRng::seed_from_u64(2024);
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..20 {
        let p = random_perturbation(&mut rng);
        let w = Complex64::from_polar(rng.random_range(0.0..0.8), rng.random_range(0.0..2.0 * PI));
        let zeta = Complex64::from_polar(1.0, rng.random_range(0.0..2.0 * PI));
        let d = disk_disc(24, 48, w);
        let u = d.sample(|z| p.value(z));
        worst = worst.max(first_variation(&d, &u, zeta).unwrap());
    }
    c.expect(worst <= 0.0, format!("largest first variation over 20 random (u >= 0, w, zeta): {worst:.3e}"));
    c.done()
}

fn second_variation_check() -> Outcome {
    let mut c = Check::new();
    let potential = |r: f64| radial_potential(&g0, r);
    let oracle = radial_area_integral(&potential) / (2.0 * PI);
    c.close("radial oracle for u = 1, w = 0", oracle, 3.0 / (128.0 * PI), 1e-10);
    let d = disk_disc(32, 64, origin());
    let u = d.sample(|_| 1.0);
    let zeta = Complex64::new(1.0, 0.0);
    let quad = second_variation(&d, &u, zeta).unwrap();
    c.close("double quadrature", quad, oracle, 1e-4);
    let report = epsilon_sweep(&d, &u, zeta, &[0.01, 0.02, 0.04, 0.08, 0.16]).unwrap();
    c.close("quadratic fit of exact fluxes", report.fitted_second, oracle, 1e-4);
    c.close("double quadrature against fit", quad, report.fitted_second, 1e-4);
    c.done()
}

fn remainder_orders() -> Outcome {
    let mut c = Check::new();
    let d = disk_disc(32, 64, origin());
    let zeta = Complex64::from_polar(1.0, 0.3);
    let eps = [0.025, 0.05, 0.1, 0.2];
    let family = [
        Perturbation::constant(1.0),
        Perturbation::Abs2,
        Perturbation::Gaussian { sigma: 0.5, center: [0.0, 0.0] },
    ];
    for p in &family {
        let u = d.sample(|z| p.value(z));
        let r = epsilon_sweep(&d, &u, zeta, &eps).unwrap();
        let (s1, s2) = (r.order_after_linear, r.order_after_quadratic);
        c.expect(
            (s1 - 2.0).abs() <= 0.15 && (s2 - 3.0).abs() <= 0.3,
            format!("u = {}: slopes {s1:.4} after linear, {s2:.4} after quadratic", p.label()),
        );
    }
    c.done()
}

fn beltrami_check() -> Outcome {
    let mut c = Check::new();
    let d = disk_disc(32, 64, Complex64::new(0.25, -0.3));
    let samples = Domain::UnitDisk.boundary_samples(32).unwrap();
    let u = Perturbation::constant(1.7);
    let worst = samples
        .iter()
        .map(|s| {
            let v = beltrami_first_variation(&d, &u, s.position).unwrap();
            (v + 1.7 * d.source_poisson(s.position).unwrap()).abs()
        })
        .fold(0.0, f64::max);
    c.expect(worst < 1e-8, format!("u = 1.7: max |delta + c d_n g| {worst:.2e} (tol 1e-8)"));

    // δ = ½ [∫ Δu g_0 P dA − P(0, ζ)(u(ζ) + u(0))] with P averaging to 1/2π.
    let oracle = 0.5 * (radial_area_integral(&|r| 4.0 * g0(r)) / (2.0 * PI) - (1.0 + 0.0) / (2.0 * PI));
    c.close("mean-value oracle for u = |z|^2, w = 0", oracle, -1.0 / (2.0 * PI), 1e-10);
    let d0 = disk_disc(32, 64, origin());
    let v = beltrami_first_variation(&d0, &Perturbation::Abs2, Complex64::from_polar(1.0, 1.1)).unwrap();
    c.close("u = |z|^2, w = 0", v, oracle, 1e-5);

    let m = beltrami_boundary_monotonicity(&d0, &Perturbation::constant(1.0), &Domain::UnitDisk.boundary_samples(128).unwrap())
        .unwrap();
    c.close("u = 1: integral of delta ds against -2 integral of u d_n g ds", m.integrated_variation, m.claimed, 1e-6);
    c.lines.push(format!(
        "     u = 1: -integral of u d_n g ds = {:.12e} (value implied by the first-variation formula)",
        m.implied
    ));
    c.done()
}

fn dirichlet_check() -> Outcome {
    let mut c = Check::new();
    let k = disk_kernel();
    let one = Perturbation::constant(1.0);
    let data = BoundaryData::from_fn(&k, 64, |_| 1.0).unwrap();
    let oracle = radial_area_integral(&g0);
    c.close("radial oracle", oracle, -0.25, 1e-12);
    let s = solve_perturbed(&k, &data, &one, 0.05, origin(), Resolution::default()).unwrap();
    c.close("delta phi(0) for f = 1, u = 1", s.delta, oracle, 1e-6);
    for eps in [0.05, 0.1] {
        let s = solve_perturbed(&k, &data, &one, eps, origin(), Resolution::default()).unwrap();
        c.rel(&format!("phi_eps(0) at eps = {eps}"), s.phi_eps, 1.0 / bessel_i0(eps.sqrt()).unwrap(), 1e-4);
    }
    let mut rng = rand::rngs::StdRng::seed_from_u64(77);
    let mut held = 0;
    let mut tightest = f64::INFINITY;
    for _ in 0..20 {
        let a: Vec<f64> = (0..4).map(|_| rng.random_range(-1.0..1.0)).collect();
        let data = BoundaryData::from_fn(&k, 64, |z| a[0] + a[1] * z.re + a[2] * z.im + a[3] * (z * z).re).unwrap();
        let p = random_perturbation(&mut rng);
        let z = Complex64::from_polar(rng.random_range(0.0..0.8), rng.random_range(0.0..2.0 * PI));
        let b = linearization_bound(&k, &data, &p, z, Resolution::default()).unwrap();
        if b.holds() {
            held += 1;
        }
        tightest = tightest.min(b.bound - b.delta.abs());
    }
    c.expect(held == 20, format!("bound held in {held}/20 random trials (smallest slack {tightest:.3e})"));
    c.done()
}

fn growth_check() -> Outcome {
    let mut c = Check::new();
    let start = Instant::now();
    let circle = MarkerCurve::circle(origin(), 1.0, 256).unwrap();
    let a0 = circle.area();
    let opts = RunOptions { dt: 1e-3, t_end: 1.0, stride: 50, resolution: AreaResolution::default() };
    let tr = run(circle, OperatorSpec::Laplace, origin(), opts).unwrap();
    let secs = start.elapsed().as_secs_f64();
    let last = tr.last();
    let r = last.curve.points().iter().map(|p| p.norm()).sum::<f64>() / last.curve.len() as f64;
    c.rel("R(1)", r, (1.0 + 1.0 / PI).sqrt(), 1e-3);
    c.close("area rate", (last.area - a0) / last.t, 1.0, 1e-3);
    let nested = tr
        .states
        .windows(2)
        .all(|p| p[0].curve.points().iter().all(|z| p[1].curve.winding(*z) != 0));
    c.expect(nested, format!("nesting over {} snapshots", tr.states.len()));
    c.expect(secs < 120.0, format!("runtime {secs:.2} s (limit 120 s)"));

    let n = 128;
    let pts: Vec<Complex64> = (0..n)
        .map(|k| {
            let om = Complex64::from_polar(1.0, 2.0 * PI * k as f64 / n as f64);
            om + 0.2 * om * om
        })
        .collect();
    let curve = MarkerCurve::new(pts).unwrap().resampled(n).unwrap();
    let a0 = curve.area();
    let opts = RunOptions { dt: 2e-3, t_end: 0.2, stride: 10, resolution: AreaResolution::default() };
    let tr = run(curve, OperatorSpec::Laplace, origin(), opts).unwrap();
    let last = tr.last();
    c.close("area rate from a non-circular start", (last.area - a0) / last.t, 1.0, 2e-3);
    c.done()
}

fn inverse_check() -> Outcome {
    let mut c = Check::new();
    let k = disk_kernel();
    let a = assemble(&k, Complex64::new(0.2, -0.1), 24, 48, 48).unwrap();
    let ones = vec![1.0; a.n_area()];
    let image = a.apply(&ones).unwrap();
    let u = a.disc.sample(|_| 1.0);
    let worst = a
        .samples
        .iter()
        .zip(&image)
        .map(|(s, v)| (v - first_variation(&a.disc, &u, s.position).unwrap()).abs())
        .fold(0.0, f64::max);
    c.expect(worst < 1e-8, format!("rows against first variation: max |diff| {worst:.2e} (tol 1e-8)"));

    let a0 = assemble(&k, origin(), 16, 32, 32).unwrap();
    let s = spectrum(&a0);
    let smallest = *s.singular_values.last().unwrap();
    c.expect(smallest > 0.0, format!("smallest singular value {smallest:.3e}"));

    let u_true: Vec<f64> = a0.disc.rule().nodes().iter().map(|z| 1.0 + z.re).collect();
    let v = a0.apply(&u_true).unwrap();
    let t = solve_tikhonov(&a0, &v, 1e-8).unwrap();
    let top = s.singular_values[0];
    c.expect(
        t.residual < 1e-6,
        format!(
            "round-trip relative residual at alpha = 1e-8: {:.3e} (tol 1e-6; alpha / (sigma_1^2 + alpha) = {:.3e})",
            t.residual,
            1e-8 / (top * top + 1e-8)
        ),
    );

    let dist = [1e-3, 5e-4];
    let h = kernel_along_normal(&k, origin(), Complex64::new(1.0, 0.0), &dist).unwrap();
    c.close("kernel at distance 1e-3 from the boundary", h[0], -1.0 / (2.0 * PI * PI), 1e-4);
    c.close("kernel at distance 5e-4 from the boundary", h[1], -1.0 / (2.0 * PI * PI), 1e-4);
    c.done()
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("disk kernel exactness", disk_kernel_exactness),
        ("normal derivative identity", normal_derivative_identity),
        ("Schrodinger exact flux", schrodinger_exact_flux),
        ("first variation", first_variation_check),
        ("second variation", second_variation_check),
        ("remainder orders", remainder_orders),
        ("Beltrami", beltrami_check),
        ("Dirichlet", dirichlet_check),
        ("growth", growth_check),
        ("inverse operator", inverse_check),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let (ok, lines) = match f() {
            Ok(l) => (true, l),
            Err(l) => (false, l),
        };
        if !ok {
            failed += 1;
        }
        println!("{} {:>2} {name}", if ok { "PASS" } else { "FAIL" }, i + 1);
        for l in lines {
            println!("       {l}");
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
