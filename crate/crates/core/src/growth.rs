//! Elliptic growth of a marker curve: each boundary point moves outward with
//! normal velocity `∂_n g*_w`, explicit Euler in time, with arclength
//! resampling after every step.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::beltrami::beltrami_green_star;
use crate::error::{Error, Result};
use crate::geometry::{polygon_is_simple, BoundarySample, Domain, MarkerCurve};
use crate::green::log_kernel_normal;
use crate::green::{Discretization, GreenKernel};
use crate::perturbation::{Perturbation, ScalarField};
use crate::schrodinger::solve_series;

/// Inward velocities below this are treated as numerical failure.
pub const SIGN_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum OperatorSpec {
    Laplace,
    Schrodinger { u: Perturbation, epsilon: f64 },
    Beltrami { u: Perturbation, epsilon: f64 },
}

impl OperatorSpec {
    pub fn label(&self) -> String {
        match self {
            OperatorSpec::Laplace => "laplace".into(),
            OperatorSpec::Schrodinger { u, epsilon } => format!("schrodinger[{}, eps={epsilon}]", u.label()),
            OperatorSpec::Beltrami { u, epsilon } => format!("beltrami[{}, eps={epsilon}]", u.label()),
        }
    }
}

/// Area rule resolution for the perturbed operators.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AreaResolution {
    pub n_radial: usize,
    pub n_angular: usize,
}

impl Default for AreaResolution {
    fn default() -> Self {
        Self {
            n_radial: 24,
            n_angular: 64,
        }
    }
}

#[derive(Debug, Clone)]
pub struct GrowthState {
    pub t: f64,
    pub curve: MarkerCurve,
    pub source: Complex64,
    pub spec: OperatorSpec,
    pub area: f64,
    pub perimeter: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Snapshot {
    pub t: f64,
    pub points: Vec<[f64; 2]>,
    pub area: f64,
    pub perimeter: f64,
}

impl GrowthState {
    pub fn new(curve: MarkerCurve, source: Complex64, spec: OperatorSpec) -> Result<Self> {
        if curve.winding(source) == 0 {
            return Err(Error::Domain(format!("source {source} is not inside the initial curve")));
        }
        Ok(Self {
            t: 0.0,
            area: curve.area(),
            perimeter: curve.perimeter(),
            curve,
            source,
            spec,
        })
    }

    pub fn snapshot(&self) -> Snapshot {
        Snapshot {
            t: self.t,
            points: self.curve.points().iter().map(|p| [p.re, p.im]).collect(),
            area: self.area,
            perimeter: self.perimeter,
        }
    }
}

fn perturbed_flux(
    disc: &Discretization,
    samples: &[BoundarySample],
    density: &[f64],
    base: &[f64],
    scale: impl Fn(usize) -> f64 + Sync,
) -> Vec<f64> {
    samples
        .par_iter()
        .enumerate()
        .map(|(k, s)| {
            let row = disc.poisson_row_at(s);
            let m: f64 = row.iter().zip(density).map(|(a, b)| a * b).sum();
            (base[k] + m) * scale(k)
        })
        .collect()
}

/// Outward normal velocity at every marker point.
pub fn velocity_field(state: &GrowthState, res: AreaResolution) -> Result<Vec<f64>> {
    let kernel = GreenKernel::new(&Domain::Curve(state.curve.clone()))?;
    let fit = kernel.mfs().expect("curve kernel has a fit");
    let w = state.source;
    let samples = state.curve.node_samples();
    let q = fit.charges(w);
    let base: Vec<f64> = samples
        .iter()
        .map(|s| log_kernel_normal(s.position, s.normal, w) + fit.correction_normal(&q, s.position, s.normal))
        .collect();

    let v = match &state.spec {
        OperatorSpec::Laplace => base,
        OperatorSpec::Schrodinger { u, epsilon } => {
            let disc = Discretization::new(&kernel, res.n_radial, res.n_angular, Some(w))?;
            let u_nodes = disc.sample(|z| u.value(z));
            let sg = solve_series(&disc, &u_nodes, *epsilon)?;
            let density: Vec<f64> = u_nodes
                .values
                .iter()
                .zip(&sg.values.values)
                .map(|(a, b)| epsilon * a * b)
                .collect();
            perturbed_flux(&disc, &samples, &density, &base, |_| 1.0)
        }
        OperatorSpec::Beltrami { u, epsilon } => {
            let disc = Discretization::new(&kernel, res.n_radial, res.n_angular, Some(w))?;
            let bg = beltrami_green_star(&disc, u, *epsilon)?;
            let density: Vec<f64> = bg
                .potential
                .values
                .iter()
                .zip(&bg.transformed.values)
                .map(|(a, b)| a * b)
                .collect();
            let lw = bg.lambda_source;
            perturbed_flux(&disc, &samples, &density, &base, |k| {
                1.0 / ((1.0 + epsilon * u.value(samples[k].position)) * lw).sqrt()
            })
        }
    };
    if let Some((node, velocity)) = v.iter().enumerate().find(|(_, v)| **v < -SIGN_TOL) {
        return Err(Error::GrowthSign {
            node,
            velocity: *velocity,
        });
    }
    Ok(v)
}

/// Node count for a curve of the given perimeter, scaled from a reference.
fn node_count(base_nodes: usize, base_perimeter: f64, perimeter: f64) -> usize {
    let n = (base_nodes as f64 * perimeter / base_perimeter).round() as usize;
    n.max(base_nodes).div_ceil(2) * 2
}

/// One explicit Euler step with `count` output nodes.
pub fn step_with(state: &GrowthState, dt: f64, count: usize, res: AreaResolution) -> Result<GrowthState> {
    if !(dt >= 0.0) || !dt.is_finite() {
        return Err(Error::Input(format!("time step {dt} must be nonnegative")));
    }
    if dt == 0.0 {
        return Ok(state.clone());
    }
    let v = velocity_field(state, res)?;
    let moved: Vec<Complex64> = state
        .curve
        .node_samples()
        .iter()
        .zip(&v)
        .map(|(s, vk)| s.position + s.normal * (dt * vk))
        .collect();
    if !polygon_is_simple(&moved) {
        return Err(Error::Topology(format!("curve self-intersects at t = {}", state.t + dt)));
    }
    let curve = MarkerCurve::new(moved)
        .and_then(|c| c.resampled(count))
        .map_err(|e| Error::Topology(format!("at t = {}: {e}", state.t + dt)))?;
    if let Some(p) = state.curve.points().iter().find(|p| curve.winding(**p) == 0) {
        return Err(Error::Topology(format!("vertex {p} left behind at t = {}", state.t + dt)));
    }
    if curve.winding(state.source) == 0 {
        return Err(Error::Topology(format!("source left the domain at t = {}", state.t + dt)));
    }
    Ok(GrowthState {
        t: state.t + dt,
        area: curve.area(),
        perimeter: curve.perimeter(),
        curve,
        source: state.source,
        spec: state.spec.clone(),
    })
}

/// One step keeping the current node count.
pub fn step(state: &GrowthState, dt: f64) -> Result<GrowthState> {
    step_with(state, dt, state.curve.len(), AreaResolution::default())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunOptions {
    pub dt: f64,
    pub t_end: f64,
    /// Keep every `stride`-th state; the final state is always kept.
    pub stride: usize,
    pub resolution: AreaResolution,
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub states: Vec<GrowthState>,
}

impl Trajectory {
    pub fn last(&self) -> &GrowthState {
        self.states.last().expect("trajectory holds the initial state")
    }

    pub fn snapshots(&self) -> Vec<Snapshot> {
        self.states.iter().map(|s| s.snapshot()).collect()
    }
}

pub fn run(initial: MarkerCurve, spec: OperatorSpec, w: Complex64, opts: RunOptions) -> Result<Trajectory> {
    run_with(initial, spec, w, opts, |_| {})
}

/// [`run`] with a callback invoked on every kept state.
pub fn run_with<F: FnMut(&GrowthState)>(
    initial: MarkerCurve,
    spec: OperatorSpec,
    w: Complex64,
    opts: RunOptions,
    mut on_snapshot: F,
) -> Result<Trajectory> {
    if !(opts.dt > 0.0) {
        return Err(Error::Input(format!("time step {} must be positive", opts.dt)));
    }
    if !(opts.t_end >= 0.0) {
        return Err(Error::Input(format!("end time {} must be nonnegative", opts.t_end)));
    }
    let stride = opts.stride.max(1);
    let base_nodes = initial.len();
    let mut state = GrowthState::new(initial, w, spec)?;
    let base_perimeter = state.perimeter;
    on_snapshot(&state);
    let mut states = vec![state.clone()];
    let steps = (opts.t_end / opts.dt - 1e-9).ceil().max(0.0) as usize;
    for k in 1..=steps {
        let dt = opts.dt.min(opts.t_end - state.t);
        let count = node_count(base_nodes, base_perimeter, state.perimeter);
        state = step_with(&state, dt, count, opts.resolution)?;
        if k % stride == 0 || k == steps {
            on_snapshot(&state);
            states.push(state.clone());
        }
    }
    Ok(Trajectory { states })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn circle_velocity_scales_with_radius() {
        for r in [1.0, 2.5] {
            let c = MarkerCurve::circle(Complex64::new(0.0, 0.0), r, 64).unwrap();
            let s = GrowthState::new(c, Complex64::new(0.0, 0.0), OperatorSpec::Laplace).unwrap();
            let v = velocity_field(&s, AreaResolution::default()).unwrap();
            for vk in v {
                assert!((vk - 1.0 / (2.0 * PI * r)).abs() < 1e-9, "{vk}");
            }
        }
    }

    #[test]
    fn zero_step_is_identity() {
        let c = MarkerCurve::circle(Complex64::new(0.0, 0.0), 1.0, 32).unwrap();
        let s = GrowthState::new(c, Complex64::new(0.1, 0.0), OperatorSpec::Laplace).unwrap();
        let t = step(&s, 0.0).unwrap();
        assert_eq!(t.curve.points(), s.curve.points());
        assert!(step(&s, -1.0).is_err());
    }

    #[test]
    fn zero_end_time() {
        let c = MarkerCurve::circle(Complex64::new(0.0, 0.0), 1.0, 32).unwrap();
        let opts = RunOptions {
            dt: 0.01,
            t_end: 0.0,
            stride: 1,
            resolution: AreaResolution::default(),
        };
        let tr = run(c, OperatorSpec::Laplace, Complex64::new(0.0, 0.0), opts).unwrap();
        assert_eq!(tr.states.len(), 1);
    }

    #[test]
    fn source_outside_rejected() {
        let c = MarkerCurve::circle(Complex64::new(0.0, 0.0), 1.0, 32).unwrap();
        assert!(GrowthState::new(c, Complex64::new(2.0, 0.0), OperatorSpec::Laplace).is_err());
    }
}
