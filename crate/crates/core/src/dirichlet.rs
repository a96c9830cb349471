//! Dirichlet problem for `Δ − εu` and its first-order expansion in `ε`.
//!
//! With `φ₀` the harmonic extension of `f` and `g*_z` the Green function of
//! `Δ − εu` with pole `z`, the solution is exactly
//! `φ_ε(z) = φ₀(z) + ε ∫_D u φ₀ g*_z dA`; replacing `g*_z` by `g_z` gives the
//! linearization `δφ(z) = ∫_D u φ₀ g_z dA`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::BoundarySample;
use crate::green::{Discretization, GreenKernel};
use crate::perturbation::ScalarField;
use crate::schrodinger::solve_series;

/// Boundary values on trapezoid nodes.
#[derive(Debug, Clone)]
pub struct BoundaryData {
    pub samples: Vec<BoundarySample>,
    pub values: Vec<f64>,
}

impl BoundaryData {
    pub fn new(samples: Vec<BoundarySample>, values: Vec<f64>) -> Result<Self> {
        if samples.len() != values.len() {
            return Err(Error::Shape(format!(
                "{} boundary values for {} samples",
                values.len(),
                samples.len()
            )));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::Input(format!("boundary value {v} is not finite")));
        }
        Ok(Self { samples, values })
    }

    pub fn from_fn<F: Fn(Complex64) -> f64>(kernel: &GreenKernel, n: usize, f: F) -> Result<Self> {
        let samples = kernel.domain().boundary_samples(n)?;
        let values = samples.iter().map(|s| f(s.position)).collect();
        Self::new(samples, values)
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct PointSolution {
    pub z: [f64; 2],
    pub phi0: f64,
    pub delta: f64,
    pub phi_eps: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct DirichletSolution {
    pub epsilon: f64,
    pub boundary: Vec<f64>,
    pub probes: Vec<PointSolution>,
}

/// Area resolution of the rule centred at each probe.
#[derive(Debug, Clone, Copy)]
pub struct Resolution {
    pub n_radial: usize,
    pub n_angular: usize,
}

impl Default for Resolution {
    fn default() -> Self {
        Self {
            n_radial: 32,
            n_angular: 64,
        }
    }
}

fn phi0_on_nodes(kernel: &GreenKernel, data: &BoundaryData, disc: &Discretization) -> Result<Vec<f64>> {
    disc.rule()
        .nodes()
        .par_iter()
        .map(|x| kernel.harmonic_extension(&data.samples, &data.values, *x))
        .collect()
}

pub fn solve_perturbed(
    kernel: &GreenKernel,
    data: &BoundaryData,
    u: &dyn ScalarField,
    epsilon: f64,
    z: Complex64,
    res: Resolution,
) -> Result<PointSolution> {
    let phi0 = kernel.harmonic_extension(&data.samples, &data.values, z)?;
    let disc = Discretization::new(kernel, res.n_radial, res.n_angular, Some(z))?;
    let rule = disc.rule();
    let u_nodes = disc.sample(|x| u.value(x));
    let phi_nodes = phi0_on_nodes(kernel, data, &disc)?;
    let density: Vec<f64> = u_nodes.values.iter().zip(&phi_nodes).map(|(a, b)| a * b).collect();
    let gz = disc.green_w()?;
    let delta = rule.integrate(&density.iter().zip(gz).map(|(a, b)| a * b).collect::<Vec<_>>());
    let phi_eps = if epsilon == 0.0 {
        phi0
    } else {
        let sg = solve_series(&disc, &u_nodes, epsilon)?;
        let moment = rule.integrate(&density.iter().zip(&sg.values.values).map(|(a, b)| a * b).collect::<Vec<_>>());
        phi0 + epsilon * moment
    };
    Ok(PointSolution {
        z: [z.re, z.im],
        phi0,
        delta,
        phi_eps,
    })
}

pub fn solve_probes(
    kernel: &GreenKernel,
    data: &BoundaryData,
    u: &dyn ScalarField,
    epsilon: f64,
    probes: &[Complex64],
    res: Resolution,
) -> Result<DirichletSolution> {
    let probes = probes
        .par_iter()
        .map(|z| solve_perturbed(kernel, data, u, epsilon, *z, res))
        .collect::<Result<_>>()?;
    Ok(DirichletSolution {
        epsilon,
        boundary: data.values.clone(),
        probes,
    })
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct LinearizationBound {
    pub delta: f64,
    /// `‖u‖₂ ‖g_z‖₂ ‖f‖∞`.
    pub bound: f64,
    pub u_norm: f64,
    pub green_norm: f64,
    pub f_sup: f64,
}

impl LinearizationBound {
    pub fn holds(&self) -> bool {
        self.delta.abs() <= self.bound * (1.0 + 1e-12)
    }
}

pub fn linearization_bound(
    kernel: &GreenKernel,
    data: &BoundaryData,
    u: &dyn ScalarField,
    z: Complex64,
    res: Resolution,
) -> Result<LinearizationBound> {
    let sol = solve_perturbed(kernel, data, u, 0.0, z, res)?;
    let disc = Discretization::new(kernel, res.n_radial, res.n_angular, Some(z))?;
    let rule = disc.rule();
    let u_norm = rule.integrate_fn(|x| u.value(x).powi(2)).sqrt();
    let green_norm = rule
        .integrate(&disc.green_w()?.iter().map(|g| g * g).collect::<Vec<_>>())
        .sqrt();
    let f_sup = data.sup_norm();
    Ok(LinearizationBound {
        delta: sol.delta,
        bound: u_norm * green_norm * f_sup,
        u_norm,
        green_norm,
        f_sup,
    })
}
