//! Green function of the divergence-form operator `∇·(λ∇)`, `λ = 1 + εu`.
//!
//! With `V = Δ√λ / √λ`, the function `G = √(λ(z)λ(w)) g*(z)` is the Green
//! function of `Δ − V`, so the Schrödinger series with potential `V` gives
//! `g*` exactly. `V` is built from the analytic gradient and Laplacian of `u`:
//! `V = εΔu / 2λ − ε²|∇u|² / 4λ²`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::BoundarySample;
use crate::green::Discretization;
use crate::perturbation::ScalarField;
use crate::quadrature::FieldSample;
use crate::schrodinger::{loglog_slope, neumann_series, EPSILON_FACTOR};

#[derive(Debug, Clone)]
pub struct BeltramiSetup {
    pub epsilon: f64,
    pub u: FieldSample,
    pub lap_u: FieldSample,
    pub lambda: FieldSample,
    pub potential: FieldSample,
}

pub fn lambda_potential(u: &dyn ScalarField, epsilon: f64, z: Complex64) -> (f64, f64) {
    let lambda = 1.0 + epsilon * u.value(z);
    let grad2 = u.gradient(z).norm_sqr();
    let v = epsilon * u.laplacian(z) / (2.0 * lambda) - epsilon * epsilon * grad2 / (4.0 * lambda * lambda);
    (lambda, v)
}

impl BeltramiSetup {
    pub fn new(disc: &Discretization, u: &dyn ScalarField, epsilon: f64) -> Result<Self> {
        let usamp = disc.sample(|z| u.value(z));
        let limit = EPSILON_FACTOR / usamp.max_abs();
        if epsilon < 0.0 || (epsilon > 0.0 && epsilon >= limit) {
            return Err(Error::EpsilonRange { eps: epsilon, limit });
        }
        let lambda = disc.sample(|z| lambda_potential(u, epsilon, z).0);
        if let Some(v) = lambda.values.iter().find(|v| **v <= 0.0) {
            return Err(Error::Input(format!("conductivity {v} is not positive")));
        }
        Ok(Self {
            epsilon,
            lap_u: disc.sample(|z| u.laplacian(z)),
            potential: disc.sample(|z| lambda_potential(u, epsilon, z).1),
            lambda,
            u: usamp,
        })
    }
}

#[derive(Debug, Clone)]
pub struct BeltramiGreen {
    pub source: Complex64,
    pub epsilon: f64,
    /// Green function of `Δ − V` on the nodes.
    pub transformed: FieldSample,
    /// `g*` on the nodes.
    pub values: FieldSample,
    pub potential: FieldSample,
    pub lambda_source: f64,
    pub terms: usize,
}

pub fn beltrami_green_star(disc: &Discretization, u: &dyn ScalarField, epsilon: f64) -> Result<BeltramiGreen> {
    let setup = BeltramiSetup::new(disc, u, epsilon)?;
    let source = disc.source().ok_or_else(|| Error::Input("discretization has no source point".into()))?;
    let lambda_source = 1.0 + epsilon * u.value(source);
    let series = neumann_series(disc, &setup.potential)?;
    let values = series
        .values
        .zip_with(&setup.lambda, |g, l| g / (l * lambda_source).sqrt())?;
    Ok(BeltramiGreen {
        source,
        epsilon,
        transformed: series.values,
        values,
        potential: setup.potential,
        lambda_source,
        terms: series.terms,
    })
}

impl BeltramiGreen {
    /// `g*(z)` at an arbitrary interior point.
    pub fn value_at(&self, disc: &Discretization, u: &dyn ScalarField, z: Complex64) -> Result<f64> {
        let vg = self.potential.zip_with(&self.transformed, |v, g| v * g)?;
        let big = disc.kernel().green(z, self.source)? + disc.t_at(&vg, z)?;
        let lambda = 1.0 + self.epsilon * u.value(z);
        Ok(big / (lambda * self.lambda_source).sqrt())
    }
}

/// `∂_n g*(ζ) = [P(w, ζ) + ∫ V G P(·, ζ) dA] / √(λ(ζ)λ(w))`.
pub fn beltrami_normal_derivative(
    disc: &Discretization,
    bg: &BeltramiGreen,
    u: &dyn ScalarField,
    zeta: Complex64,
) -> Result<f64> {
    let vg = bg.potential.zip_with(&bg.transformed, |v, g| v * g)?;
    let flux = disc.source_poisson(zeta)? + disc.poisson_moment(&vg, zeta)?;
    let lambda = 1.0 + bg.epsilon * u.value(zeta);
    Ok(flux / (lambda * bg.lambda_source).sqrt())
}

/// `½ [∫_D Δu g_w P(·, ζ) dA − P(w, ζ)(u(ζ) + u(w))]`.
pub fn beltrami_first_variation(disc: &Discretization, u: &dyn ScalarField, zeta: Complex64) -> Result<f64> {
    let w = disc.source().ok_or_else(|| Error::Input("discretization has no source point".into()))?;
    let lap = disc.sample(|z| u.laplacian(z));
    let density = lap.zip_with(&disc.green_field()?, |a, b| a * b)?;
    let integral = disc.poisson_moment(&density, zeta)?;
    let p = disc.source_poisson(zeta)?;
    Ok(0.5 * (integral - p * (u.value(zeta) + u.value(w))))
}

#[derive(Debug, Clone, Serialize)]
pub struct MonotonicityReport {
    /// Boundary integral of the first variation.
    pub integrated_variation: f64,
    /// `−2 ∫ u ∂_n g_w ds`.
    pub claimed: f64,
    /// `−∫ u ∂_n g_w ds`, the value implied by the first-variation formula
    /// together with Green's identity.
    pub implied: f64,
}

/// Boundary-integrated first variation against the closed boundary forms.
pub fn beltrami_boundary_monotonicity(
    disc: &Discretization,
    u: &dyn ScalarField,
    samples: &[BoundarySample],
) -> Result<MonotonicityReport> {
    let w = disc.source().ok_or_else(|| Error::Input("discretization has no source point".into()))?;
    let lap = disc.sample(|z| u.laplacian(z));
    let density = lap.zip_with(&disc.green_field()?, |a, b| a * b)?;
    let rows = disc.poisson_matrix(samples);
    let uw = u.value(w);
    let mut integrated = 0.0;
    let mut weighted_flux = 0.0;
    for (s, row) in samples.iter().zip(&rows) {
        let integral: f64 = row.iter().zip(&density.values).map(|(a, b)| a * b).sum();
        let p = disc.kernel().poisson_at(w, s);
        let uz = u.value(s.position);
        integrated += 0.5 * (integral - p * (uz + uw)) * s.ds;
        weighted_flux += uz * p * s.ds;
    }
    Ok(MonotonicityReport {
        integrated_variation: integrated,
        claimed: -2.0 * weighted_flux,
        implied: -weighted_flux,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct BeltramiSweep {
    pub base: f64,
    pub first: f64,
    /// `(ε, exact flux, linear model)`.
    pub points: Vec<(f64, f64, f64)>,
    pub order_after_linear: f64,
}

pub fn beltrami_sweep(
    disc: &Discretization,
    u: &dyn ScalarField,
    zeta: Complex64,
    epsilons: &[f64],
) -> Result<BeltramiSweep> {
    if epsilons.len() < 4 {
        return Err(Error::Fit(format!("need at least 4 epsilon values, got {}", epsilons.len())));
    }
    let base = disc.source_poisson(zeta)?;
    let first = beltrami_first_variation(disc, u, zeta)?;
    let exact: Vec<f64> = epsilons
        .par_iter()
        .map(|e| {
            let bg = beltrami_green_star(disc, u, *e)?;
            beltrami_normal_derivative(disc, &bg, u, zeta)
        })
        .collect::<Result<_>>()?;
    let points: Vec<(f64, f64, f64)> = epsilons
        .iter()
        .zip(&exact)
        .map(|(e, f)| (*e, *f, base + e * first))
        .collect();
    let r: Vec<f64> = points.iter().map(|p| p.1 - p.2).collect();
    Ok(BeltramiSweep {
        base,
        first,
        order_after_linear: loglog_slope(epsilons, &r)?,
        points,
    })
}
