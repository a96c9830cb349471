//! Green function of `Δ − εu` by the Neumann series `g* = Σ (T εu)ⁿ g_w`,
//! its exact boundary flux, and the first and second variations of the flux
//! in `ε`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::green::Discretization;
use crate::quadrature::FieldSample;

/// Stop once the newest term is below this in max norm.
pub const SERIES_TOL: f64 = 1e-12;
pub const SERIES_MAX_TERMS: usize = 60;
/// `ε₀ = EPSILON_FACTOR / max|u|`.
pub const EPSILON_FACTOR: f64 = 0.5;

/// Converged Neumann series for a general potential.
#[derive(Debug, Clone)]
pub struct SeriesSolution {
    pub values: FieldSample,
    pub terms: usize,
    /// Geometric estimate of the neglected tail in max norm.
    pub tail: f64,
}

/// Sums `g* = Σ_n (T V)ⁿ g_w` on the discretization's nodes.
pub fn neumann_series(disc: &Discretization, potential: &FieldSample) -> Result<SeriesSolution> {
    disc.rule().check(potential)?;
    let base = disc.green_field()?;
    let t = disc.t_operator();
    let mut sum = base.values.clone();
    let mut term = base.values;
    let mut prev_norm = f64::INFINITY;
    for n in 1..=SERIES_MAX_TERMS {
        let weighted: Vec<f64> = term.iter().zip(&potential.values).map(|(a, v)| a * v).collect();
        term = t.apply(&weighted);
        let norm = term.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for (s, v) in sum.iter_mut().zip(&term) {
            *s += v;
        }
        if norm < SERIES_TOL {
            let ratio = if prev_norm.is_finite() && prev_norm > 0.0 { norm / prev_norm } else { 0.0 };
            let tail = if ratio < 1.0 { norm * ratio / (1.0 - ratio) } else { f64::INFINITY };
            return Ok(SeriesSolution {
                values: disc.rule().field(sum)?,
                terms: n + 1,
                tail,
            });
        }
        prev_norm = norm;
    }
    Err(Error::Input(format!(
        "Neumann series did not reach {SERIES_TOL:.0e} within {SERIES_MAX_TERMS} terms"
    )))
}

/// Green function of `Δ − εu` sampled on area nodes.
#[derive(Debug, Clone)]
pub struct SchrodingerGreen {
    pub source: Complex64,
    pub epsilon: f64,
    pub u: FieldSample,
    pub values: FieldSample,
    pub terms: usize,
    pub tail: f64,
}

/// Largest admissible `ε` for the sampled `u`.
pub fn epsilon_limit(u: &FieldSample) -> f64 {
    EPSILON_FACTOR / u.max_abs()
}

fn check_epsilon(u: &FieldSample, epsilon: f64) -> Result<()> {
    let limit = epsilon_limit(u);
    if !(0.0..limit).contains(&epsilon) {
        return Err(Error::EpsilonRange { eps: epsilon, limit });
    }
    Ok(())
}

pub fn solve_series(disc: &Discretization, u: &FieldSample, epsilon: f64) -> Result<SchrodingerGreen> {
    disc.rule().check(u)?;
    if let Some((i, v)) = u.values.iter().enumerate().find(|(_, v)| **v <= 0.0 || !v.is_finite()) {
        return Err(Error::Input(format!(
            "u must be positive, found {v} at node {i}"
        )));
    }
    check_epsilon(u, epsilon)?;
    let source = disc.source().ok_or_else(|| Error::Input("discretization has no source point".into()))?;
    let potential = u.map(|v| epsilon * v);
    let series = neumann_series(disc, &potential)?;
    Ok(SchrodingerGreen {
        source,
        epsilon,
        u: u.clone(),
        values: series.values,
        terms: series.terms,
        tail: series.tail,
    })
}

impl SchrodingerGreen {
    /// `g*(z)` off the nodes: `g(z, w) + ε T(u g*)(z)`.
    pub fn value_at(&self, disc: &Discretization, z: Complex64) -> Result<f64> {
        let source = self.u.zip_with(&self.values, |u, g| self.epsilon * u * g)?;
        Ok(disc.kernel().green(z, self.source)? + disc.t_at(&source, z)?)
    }
}

/// `∂_n g*(ζ) = P(w, ζ) + ε ∫_D u g* P(·, ζ) dA`.
pub fn normal_derivative_exact(disc: &Discretization, sg: &SchrodingerGreen, zeta: Complex64) -> Result<f64> {
    let source = sg.u.zip_with(&sg.values, |u, g| u * g)?;
    Ok(disc.source_poisson(zeta)? + sg.epsilon * disc.poisson_moment(&source, zeta)?)
}

/// First variation `∫_D u g_w P(·, ζ) dA`.
pub fn first_variation(disc: &Discretization, u: &FieldSample, zeta: Complex64) -> Result<f64> {
    let ug = u.zip_with(&disc.green_field()?, |a, b| a * b)?;
    disc.poisson_moment(&ug, zeta)
}

/// `u · T(u g_w)` on the nodes.
fn second_variation_density(disc: &Discretization, u: &FieldSample) -> Result<FieldSample> {
    let ug = u.zip_with(&disc.green_field()?, |a, b| a * b)?;
    let inner = disc.apply_t(&ug)?;
    u.zip_with(&inner, |a, b| a * b)
}

/// Second variation `∬ u(z) u(ξ) g(ξ, w) g(ξ, z) P(z, ζ) dA dA`, the
/// coefficient of `ε²`.
pub fn second_variation(disc: &Discretization, u: &FieldSample, zeta: Complex64) -> Result<f64> {
    let density = second_variation_density(disc, u)?;
    disc.poisson_moment(&density, zeta)
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepPoint {
    pub epsilon: f64,
    pub exact: f64,
    pub linear_model: f64,
    pub quadratic_model: f64,
    pub remainder_linear: f64,
    pub remainder_quadratic: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct VariationReport {
    pub zeta: [f64; 2],
    pub base: f64,
    pub first: f64,
    pub second: f64,
    pub points: Vec<SweepPoint>,
    /// Log-log slope of the remainder after the linear model.
    pub order_after_linear: f64,
    /// Log-log slope of the remainder after the quadratic model.
    pub order_after_quadratic: f64,
    /// `ε²` coefficient fitted to the exact fluxes by least squares.
    pub fitted_second: f64,
}

/// Least-squares slope of `ln|r|` against `ln ε`.
pub fn loglog_slope(eps: &[f64], r: &[f64]) -> Result<f64> {
    let pts: Vec<(f64, f64)> = eps
        .iter()
        .zip(r)
        .filter(|(e, v)| **e > 0.0 && v.abs() > 0.0)
        .map(|(e, v)| (e.ln(), v.abs().ln()))
        .collect();
    if pts.len() < 2 {
        return Err(Error::Fit("fewer than two usable points for a log-log fit".into()));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx <= 0.0 {
        return Err(Error::Fit("all epsilon values coincide".into()));
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    Ok(sxy / sxx)
}

/// Coefficient of `ε` in a least-squares polynomial fit of `(F(ε) − F(0))/ε`,
/// which is the `ε²` coefficient of `F`.
pub fn fit_quadratic_coefficient(eps: &[f64], exact: &[f64], base: f64) -> Result<f64> {
    let pts: Vec<(f64, f64)> = eps
        .iter()
        .zip(exact)
        .filter(|(e, _)| **e > 0.0)
        .map(|(e, f)| (*e, (f - base) / e))
        .collect();
    let degree = (pts.len().saturating_sub(1)).min(3);
    if degree < 2 {
        return Err(Error::Fit("need at least three positive epsilon values".into()));
    }
    let a = nalgebra::DMatrix::from_fn(pts.len(), degree + 1, |i, k| pts[i].0.powi(k as i32));
    let b = nalgebra::DVector::from_iterator(pts.len(), pts.iter().map(|p| p.1));
    let coef = a
        .svd(true, true)
        .solve(&b, 1e-300)
        .map_err(|e| Error::Fit(e.to_string()))?;
    Ok(coef[1])
}

/// Exact fluxes over a list of `ε`, compared against the linear and quadratic
/// models built from the variations.
pub fn epsilon_sweep(disc: &Discretization, u: &FieldSample, zeta: Complex64, epsilons: &[f64]) -> Result<VariationReport> {
    if epsilons.len() < 4 {
        return Err(Error::Fit(format!("need at least 4 epsilon values, got {}", epsilons.len())));
    }
    if epsilons.iter().all(|e| *e == 0.0) {
        return Err(Error::Fit("all epsilon values are zero".into()));
    }
    for e in epsilons {
        check_epsilon(u, *e)?;
    }
    let base = disc.source_poisson(zeta)?;
    let first = first_variation(disc, u, zeta)?;
    let second = second_variation(disc, u, zeta)?;
    let exact: Vec<f64> = epsilons
        .par_iter()
        .map(|e| {
            let sg = solve_series(disc, u, *e)?;
            normal_derivative_exact(disc, &sg, zeta)
        })
        .collect::<Result<_>>()?;
    let points: Vec<SweepPoint> = epsilons
        .iter()
        .zip(&exact)
        .map(|(e, f)| {
            let linear = base + e * first;
            let quadratic = linear + e * e * second;
            SweepPoint {
                epsilon: *e,
                exact: *f,
                linear_model: linear,
                quadratic_model: quadratic,
                remainder_linear: f - linear,
                remainder_quadratic: f - quadratic,
            }
        })
        .collect();
    let r1: Vec<f64> = points.iter().map(|p| p.remainder_linear).collect();
    let r2: Vec<f64> = points.iter().map(|p| p.remainder_quadratic).collect();
    Ok(VariationReport {
        zeta: [zeta.re, zeta.im],
        base,
        first,
        second,
        order_after_linear: loglog_slope(epsilons, &r1)?,
        order_after_quadratic: loglog_slope(epsilons, &r2)?,
        fitted_second: fit_quadratic_coefficient(epsilons, &exact, base)?,
        points,
    })
}
