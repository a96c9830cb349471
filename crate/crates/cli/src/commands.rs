use std::f64::consts::PI;

use greenflux::beltrami::{beltrami_green_star, beltrami_normal_derivative, beltrami_sweep};
use greenflux::geometry::Domain;
use greenflux::green::{Discretization, GreenKernel};
use greenflux::growth::{run_with, AreaResolution, OperatorSpec, RunOptions};
use greenflux::inverse::{assemble, spectrum, write_spectrum_csv, TikhonovSolver};
use greenflux::oracle::{bessel_flux, fd_beltrami_green, fd_green, PolarGrid};
use greenflux::perturbation::{Perturbation, ScalarField};
use greenflux::schrodinger::{epsilon_sweep, normal_derivative_exact, solve_series};
use greenflux::Complex64;
use rand::{Rng, SeedableRng};
use serde::Serialize;

use crate::config::{RunConfig, TargetConfig};
use crate::output::{csv, OutputDir};
use crate::svg;
use crate::CliError;

fn outline(domain: &Domain) -> Vec<[f64; 2]> {
    (0..256)
        .map(|k| {
            let p = domain.boundary_frame(2.0 * PI * k as f64 / 256.0).0;
            [p.re, p.im]
        })
        .collect()
}

fn bounding_box(domain: &Domain) -> (f64, f64, f64, f64) {
    if let Domain::UnitDisk = domain {
        return (-1.0, 1.0, -1.0, 1.0);
    }
    let pts = outline(domain);
    let fold = |k: usize| {
        pts.iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), p| (a.min(p[k]), b.max(p[k])))
    };
    let (x0, x1) = fold(0);
    let (y0, y1) = fold(1);
    (x0, x1, y0, y1)
}

pub fn green(cfg: &RunConfig, out: &mut OutputDir) -> Result<(), CliError> {
    let domain = cfg.domain()?;
    let kernel = GreenKernel::new(&domain)?;
    let w = cfg.source();
    if !domain.contains(w)? {
        return Err(CliError::Usage(format!("field `w`: {w} is not inside the domain")));
    }
    let n = cfg.resolution.grid;
    if n < 2 {
        return Err(CliError::Usage("field `resolution.grid` must be at least 2".into()));
    }
    let (x0, x1, y0, y1) = bounding_box(&domain);
    let mut samples = Vec::new();
    for j in 0..n {
        for i in 0..n {
            let x = x0 + (x1 - x0) * i as f64 / (n - 1) as f64;
            let y = y0 + (y1 - y0) * j as f64 / (n - 1) as f64;
            let z = Complex64::new(x, y);
            if z != w && domain.contains(z)? {
                samples.push([x, y, kernel.green(z, w)?]);
            }
        }
    }
    out.write("green.csv", csv(&["x", "y", "value"], samples.iter().map(|s| s.to_vec())).as_bytes())?;

    let boundary = domain.boundary_samples(cfg.resolution.n_boundary)?;
    let rows = boundary
        .iter()
        .map(|s| vec![s.t, s.position.re, s.position.im, kernel.poisson_at(w, s)]);
    out.write("poisson.csv", csv(&["t", "x", "y", "value"], rows).as_bytes())?;

    let h = (x1 - x0).max(y1 - y0) / (n - 1) as f64;
    let title = format!("g(z, w), w = ({}, {})", w.re, w.im);
    out.write("green.svg", svg::heatmap(&samples, h, &outline(&domain), &title).as_bytes())
}

fn sweep_zeta(cfg: &RunConfig, domain: &Domain) -> Complex64 {
    match cfg.zeta {
        Some([x, y]) => Complex64::new(x, y),
        None => domain.boundary_frame(0.0).0,
    }
}

fn check_epsilons(cfg: &RunConfig) -> Result<(), CliError> {
    if cfg.epsilons.is_empty() {
        return Err(CliError::Usage("field `epsilons`: list is empty".into()));
    }
    if cfg.epsilons.len() < 4 {
        return Err(CliError::Usage(format!(
            "field `epsilons`: need at least 4 values, got {}",
            cfg.epsilons.len()
        )));
    }
    if let Some(e) = cfg.epsilons.iter().find(|e| !(**e >= 0.0)) {
        return Err(CliError::Usage(format!("field `epsilons`: {e} is negative")));
    }
    Ok(())
}

pub fn sweep(cfg: &RunConfig, out: &mut OutputDir) -> Result<(), CliError> {
    check_epsilons(cfg)?;
    let u = cfg.perturbation()?.clone();
    let domain = cfg.domain()?;
    let kernel = GreenKernel::new(&domain)?;
    let w = cfg.source();
    let zeta = sweep_zeta(cfg, &domain);
    let disc = Discretization::new(&kernel, cfg.resolution.n_radial, cfg.resolution.n_angular, Some(w))?;
    let eps = &cfg.epsilons;
    let (curves, title) = match &cfg.operator {
        OperatorSpec::Schrodinger { .. } => {
            let report = epsilon_sweep(&disc, &disc.sample(|z| u.value(z)), zeta, eps)?;
            let rows = report.points.iter().map(|p| {
                vec![
                    p.epsilon,
                    p.exact,
                    p.linear_model,
                    p.quadratic_model,
                    p.remainder_linear,
                    p.remainder_quadratic,
                    report.first,
                ]
            });
            let header = [
                "epsilon",
                "exact",
                "linear_model",
                "quadratic_model",
                "remainder_linear",
                "remainder_quadratic",
                "first_variation",
            ];
            out.write("sweep.csv", csv(&header, rows).as_bytes())?;
            out.write_json("report.json", &report)?;
            let r1 = report.points.iter().map(|p| [p.epsilon, p.remainder_linear]).collect();
            let r2 = report.points.iter().map(|p| [p.epsilon, p.remainder_quadratic]).collect();
            (
                vec![("after linear", r1), ("after quadratic", r2)],
                format!(
                    "remainders, slopes {:.2} and {:.2}",
                    report.order_after_linear, report.order_after_quadratic
                ),
            )
        }
        OperatorSpec::Beltrami { .. } => {
            let report = beltrami_sweep(&disc, &u, zeta, eps)?;
            let rows = report
                .points
                .iter()
                .map(|(e, f, lin)| vec![*e, *f, *lin, f - lin, report.first]);
            let header = ["epsilon", "exact", "linear_model", "remainder_linear", "first_variation"];
            out.write("sweep.csv", csv(&header, rows).as_bytes())?;
            out.write_json("report.json", &report)?;
            let r1 = report.points.iter().map(|(e, f, lin)| [*e, f - lin]).collect();
            (
                vec![("after linear", r1)],
                format!("remainder, slope {:.2}", report.order_after_linear),
            )
        }
        OperatorSpec::Laplace => unreachable!("perturbation() rejects laplace"),
    };
    out.write("sweep.svg", svg::loglog(&curves, &title).as_bytes())
}

#[derive(Serialize)]
struct GrowthSummary {
    operator: String,
    steps_kept: usize,
    final_time: f64,
    initial_area: f64,
    final_area: f64,
    mean_area_rate: f64,
}

pub fn grow(cfg: &RunConfig, out: &mut OutputDir) -> Result<(), CliError> {
    let g = cfg
        .growth
        .as_ref()
        .ok_or_else(|| CliError::Usage("field `growth` is required for this command".into()))?;
    if !(g.dt > 0.0) {
        return Err(CliError::Usage(format!("field `growth.dt`: {} must be positive", g.dt)));
    }
    if !(g.t_end >= 0.0) {
        return Err(CliError::Usage(format!("field `growth.t_end`: {} must be nonnegative", g.t_end)));
    }
    let curve = cfg.marker_curve(g.nodes)?;
    let w = cfg.source();
    let opts = RunOptions {
        dt: g.dt,
        t_end: g.t_end,
        stride: g.stride,
        resolution: AreaResolution {
            n_radial: cfg.resolution.n_radial,
            n_angular: cfg.resolution.n_angular,
        },
    };
    let mut lines = String::new();
    let traj = run_with(curve, cfg.operator.clone(), w, opts, |s| {
        lines.push_str(&serde_json::to_string(&s.snapshot()).expect("serializable"));
        lines.push('\n');
    })?;
    out.write("trajectory.jsonl", lines.as_bytes())?;

    let rows = traj.states.iter().map(|s| {
        let r: Vec<f64> = s.curve.points().iter().map(|p| (p - w).norm()).collect();
        let mean = r.iter().sum::<f64>() / r.len() as f64;
        let (lo, hi) = r.iter().fold((f64::INFINITY, 0.0f64), |(a, b), x| (a.min(*x), b.max(*x)));
        vec![s.t, s.area, s.perimeter, mean, lo, hi, s.curve.len() as f64]
    });
    let header = ["t", "area", "perimeter", "mean_radius", "min_radius", "max_radius", "nodes"];
    out.write("summary.csv", csv(&header, rows).as_bytes())?;

    let first = &traj.states[0];
    let last = traj.last();
    out.write_json(
        "report.json",
        &GrowthSummary {
            operator: cfg.operator.label(),
            steps_kept: traj.states.len(),
            final_time: last.t,
            initial_area: first.area,
            final_area: last.area,
            mean_area_rate: if last.t > 0.0 { (last.area - first.area) / last.t } else { 0.0 },
        },
    )?;
    let curves: Vec<Vec<[f64; 2]>> = traj.states.iter().map(|s| s.snapshot().points).collect();
    out.write("growth.svg", svg::overlay(&curves, &format!("growth, {}", cfg.operator.label())).as_bytes())
}

#[derive(Serialize)]
struct InverseReport {
    boundary_nodes: usize,
    area_nodes: usize,
    largest_singular_value: f64,
    smallest_singular_value: f64,
    condition: f64,
    rank: usize,
    degenerate: bool,
    results: Vec<AlphaResult>,
}

#[derive(Serialize)]
struct AlphaResult {
    alpha: f64,
    residual: f64,
    residual_l1: f64,
    projected_residual: f64,
    projected_residual_l1: f64,
}

pub fn inverse(cfg: &RunConfig, out: &mut OutputDir) -> Result<(), CliError> {
    if cfg.alphas.is_empty() {
        return Err(CliError::Usage("field `alphas`: list is empty".into()));
    }
    if let Some(a) = cfg.alphas.iter().find(|a| !(**a > 0.0)) {
        return Err(CliError::Usage(format!("field `alphas`: {a} must be positive")));
    }
    if !(cfg.noise >= 0.0) {
        return Err(CliError::Usage(format!("field `noise`: {} must be nonnegative", cfg.noise)));
    }
    let domain = cfg.domain()?;
    let kernel = GreenKernel::new(&domain)?;
    let r = &cfg.resolution;
    let op = assemble(&kernel, cfg.source(), r.n_radial, r.n_angular, r.n_boundary)?;
    let spec = spectrum(&op);
    let mut buf = Vec::new();
    write_spectrum_csv(&mut buf, &spec).expect("writing to memory");
    out.write("spectrum.csv", &buf)?;

    let mut target: Vec<f64> = match &cfg.target {
        TargetConfig::Roundtrip { u } => {
            let nodes: Vec<f64> = op.disc.rule().nodes().iter().map(|z| u.value(*z)).collect();
            op.apply(&nodes)?
        }
        TargetConfig::Smooth { amplitude } => op
            .samples
            .iter()
            .map(|s| -(1.0 + amplitude * s.position.arg().cos()) / (8.0 * PI))
            .collect(),
    };
    if cfg.noise > 0.0 {
        let scale = cfg.noise * target.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let mut rng = rand::rngs::StdRng::seed_from_u64(cfg.seed);
        for v in target.iter_mut() {
            *v += scale * rng.random_range(-1.0..1.0);
        }
    }
    let rows = op
        .samples
        .iter()
        .zip(&target)
        .map(|(s, v)| vec![s.position.re, s.position.im, *v]);
    out.write("target.csv", csv(&["x", "y", "value"], rows).as_bytes())?;

    let solver = TikhonovSolver::new(&op);
    let mut alphas = cfg.alphas.clone();
    alphas.sort_by(|a, b| b.total_cmp(a));
    let mut results = Vec::new();
    let mut best_u = Vec::new();
    for a in &alphas {
        let res = solver.solve(&target, *a)?;
        results.push(AlphaResult {
            alpha: res.alpha,
            residual: res.residual,
            residual_l1: res.residual_l1,
            projected_residual: res.projected_residual,
            projected_residual_l1: res.projected_residual_l1,
        });
        best_u = res.u;
    }
    let rows = results.iter().map(|r| {
        vec![r.alpha, r.residual, r.residual_l1, r.projected_residual, r.projected_residual_l1]
    });
    let header = ["alpha", "residual", "residual_l1", "projected_residual", "projected_residual_l1"];
    out.write("residuals.csv", csv(&header, rows).as_bytes())?;

    let nodes = op.disc.rule().nodes();
    let rows = nodes.iter().zip(&best_u).map(|(z, u)| vec![z.re, z.im, *u]);
    out.write("recovered_u.csv", csv(&["x", "y", "u"], rows).as_bytes())?;
    let cells: Vec<[f64; 3]> = nodes.iter().zip(&best_u).map(|(z, u)| [z.re, z.im, *u]).collect();
    let (x0, x1, _, _) = bounding_box(&domain);
    let title = format!("recovered u, alpha = {:e}", alphas.last().unwrap());
    out.write(
        "recovered_u.svg",
        svg::heatmap(&cells, (x1 - x0) / 60.0, &outline(&domain), &title).as_bytes(),
    )?;
    let residual_curve: Vec<[f64; 2]> = results.iter().map(|r| [r.alpha, r.residual]).collect();
    out.write("residuals.svg", svg::loglog(&[("relative residual", residual_curve)], "residual against alpha").as_bytes())?;

    out.write_json(
        "report.json",
        &InverseReport {
            boundary_nodes: op.n_boundary(),
            area_nodes: op.n_area(),
            largest_singular_value: spec.singular_values[0],
            smallest_singular_value: *spec.singular_values.last().unwrap(),
            condition: spec.condition,
            rank: spec.rank,
            degenerate: spec.degenerate,
            results,
        },
    )
}

#[derive(Serialize)]
struct OracleReport {
    operator: String,
    grid: [usize; 2],
    max_flux_difference: f64,
    max_probe_difference: f64,
    /// Closed-form flux when the problem is radial with a constant potential.
    bessel_flux: Option<f64>,
}

pub fn oracle(cfg: &RunConfig, out: &mut OutputDir) -> Result<(), CliError> {
    let domain = cfg.domain()?;
    if !matches!(domain, Domain::UnitDisk) {
        return Err(CliError::Usage("field `domain`: the oracle runs on the unit disk only".into()));
    }
    let kernel = GreenKernel::new(&domain)?;
    let w = cfg.source();
    let grid = PolarGrid::new(cfg.oracle.n_r, cfg.oracle.n_theta)
        .map_err(|e| CliError::Usage(format!("field `oracle`: {e}")))?;
    let disc = Discretization::new(&kernel, cfg.resolution.n_radial, cfg.resolution.n_angular, Some(w))?;
    let probes: Vec<Complex64> = if cfg.oracle.probes.is_empty() {
        (0..8).map(|k| Complex64::from_polar(0.6, 2.0 * PI * k as f64 / 8.0 + 0.3)).collect()
    } else {
        cfg.oracle.probes.iter().map(|p| Complex64::new(p[0], p[1])).collect()
    };
    let thetas: Vec<f64> = (0..grid.n_theta).map(|j| grid.angle(j)).collect();

    let (fd, series_flux, series_probe, bessel) = match &cfg.operator {
        OperatorSpec::Laplace => {
            let fd = fd_green(&grid, &|_| 0.0, w)?;
            let flux = thetas
                .iter()
                .map(|t| disc.source_poisson(Complex64::from_polar(1.0, *t)))
                .collect::<Result<Vec<_>, _>>()?;
            let probe = probes.iter().map(|z| kernel.green(*z, w)).collect::<Result<Vec<_>, _>>()?;
            (fd, flux, probe, (w.norm() == 0.0).then(|| bessel_flux(0.0)).transpose()?)
        }
        OperatorSpec::Schrodinger { u, epsilon } => {
            let fd = fd_green(&grid, &|z| epsilon * u.value(z), w)?;
            let sg = solve_series(&disc, &disc.sample(|z| u.value(z)), *epsilon)?;
            let flux = thetas
                .iter()
                .map(|t| normal_derivative_exact(&disc, &sg, Complex64::from_polar(1.0, *t)))
                .collect::<Result<Vec<_>, _>>()?;
            let probe = probes.iter().map(|z| sg.value_at(&disc, *z)).collect::<Result<Vec<_>, _>>()?;
            let bessel = match u {
                Perturbation::Const { c } if w.norm() == 0.0 => Some(bessel_flux(epsilon * c)?),
                _ => None,
            };
            (fd, flux, probe, bessel)
        }
        OperatorSpec::Beltrami { u, epsilon } => {
            let fd = fd_beltrami_green(&grid, &|z| 1.0 + epsilon * u.value(z), w)?;
            let bg = beltrami_green_star(&disc, u, *epsilon)?;
            let flux = thetas
                .iter()
                .map(|t| beltrami_normal_derivative(&disc, &bg, u, Complex64::from_polar(1.0, *t)))
                .collect::<Result<Vec<_>, _>>()?;
            let probe = probes
                .iter()
                .map(|z| bg.value_at(&disc, u, *z))
                .collect::<Result<Vec<_>, _>>()?;
            (fd, flux, probe, None)
        }
    };

    let fd_flux: Vec<f64> = (0..grid.n_theta).map(|j| fd.boundary_flux(j)).collect();
    let rows = thetas
        .iter()
        .zip(fd_flux.iter().zip(&series_flux))
        .map(|(t, (a, b))| vec![*t, *a, *b, (a - b).abs()]);
    out.write("oracle_flux.csv", csv(&["theta", "fd", "series", "abs_difference"], rows).as_bytes())?;
    let fd_probe = probes.iter().map(|z| fd.value_at(*z)).collect::<Result<Vec<_>, _>>()?;
    let rows = probes
        .iter()
        .zip(fd_probe.iter().zip(&series_probe))
        .map(|(z, (a, b))| vec![z.re, z.im, *a, *b, (a - b).abs()]);
    out.write("oracle_probes.csv", csv(&["x", "y", "fd", "series", "abs_difference"], rows).as_bytes())?;
    let maxdiff = |a: &[f64], b: &[f64]| a.iter().zip(b).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
    out.write_json(
        "report.json",
        &OracleReport {
            operator: cfg.operator.label(),
            grid: [grid.n_r, grid.n_theta],
            max_flux_difference: maxdiff(&fd_flux, &series_flux),
            max_probe_difference: maxdiff(&fd_probe, &series_probe),
            bessel_flux: bessel,
        },
    )
}
