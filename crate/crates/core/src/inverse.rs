//! The operator `A u(ζ) = ∫_D u g(·, w) P(·, ζ) dA`, taking a perturbation to
//! the first variation of the boundary velocity, and a Tikhonov inverse.
//!
//! Coefficients are node values of `u`. Inner products are weighted: area
//! weights on `L²(D)`, arclength weights on `L²(∂D)`. The SVD acts on
//! `diag(√ds) A diag(1/√W)`, which is an isometric image of the continuous
//! operator.

use std::io::Write;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::BoundarySample;
use crate::green::{Discretization, GreenKernel};

/// Relative cutoff for the numerical rank.
pub const RANK_CUTOFF: f64 = 1e-12;

#[derive(Debug)]
pub struct OperatorA {
    pub disc: Discretization,
    pub samples: Vec<BoundarySample>,
    pub matrix: DMatrix<f64>,
}

pub fn assemble(kernel: &GreenKernel, w: Complex64, n_radial: usize, n_angular: usize, n_boundary: usize) -> Result<OperatorA> {
    let disc = Discretization::new(kernel, n_radial, n_angular, Some(w))?;
    let samples = kernel.domain().boundary_samples(n_boundary)?;
    let g = disc.green_w()?.to_vec();
    let rows: Vec<Vec<f64>> = samples
        .par_iter()
        .map(|s| disc.poisson_row_at(s).iter().zip(&g).map(|(p, gj)| p * gj).collect())
        .collect();
    let matrix = DMatrix::from_fn(rows.len(), g.len(), |k, j| rows[k][j]);
    Ok(OperatorA { disc, samples, matrix })
}

impl OperatorA {
    pub fn n_boundary(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn n_area(&self) -> usize {
        self.matrix.ncols()
    }

    pub fn apply(&self, u: &[f64]) -> Result<Vec<f64>> {
        if u.len() != self.n_area() {
            return Err(Error::Shape(format!("{} coefficients for {} area nodes", u.len(), self.n_area())));
        }
        Ok((&self.matrix * DVector::from_column_slice(u)).as_slice().to_vec())
    }

    /// Adjoint with respect to the weighted inner products.
    pub fn apply_adjoint(&self, v: &[f64]) -> Result<Vec<f64>> {
        if v.len() != self.n_boundary() {
            return Err(Error::Shape(format!("{} values for {} boundary nodes", v.len(), self.n_boundary())));
        }
        let dv = DVector::from_fn(v.len(), |k, _| v[k] * self.samples[k].ds);
        let at = self.matrix.tr_mul(&dv);
        Ok(at
            .iter()
            .zip(self.disc.rule().weights())
            .map(|(a, w)| a / w)
            .collect())
    }

    pub fn boundary_inner(&self, a: &[f64], b: &[f64]) -> f64 {
        self.samples.iter().zip(a.iter().zip(b)).map(|(s, (x, y))| s.ds * x * y).sum()
    }

    pub fn area_inner(&self, a: &[f64], b: &[f64]) -> f64 {
        self.disc.rule().weights().iter().zip(a.iter().zip(b)).map(|(w, (x, y))| w * x * y).sum()
    }

    fn boundary_l2(&self, v: &[f64]) -> f64 {
        self.boundary_inner(v, v).sqrt()
    }

    fn boundary_l1(&self, v: &[f64]) -> f64 {
        self.samples.iter().zip(v).map(|(s, x)| s.ds * x.abs()).sum()
    }

    pub fn weighted(&self) -> DMatrix<f64> {
        let w = self.disc.rule().weights();
        DMatrix::from_fn(self.n_boundary(), self.n_area(), |k, j| {
            self.samples[k].ds.sqrt() * self.matrix[(k, j)] / w[j].sqrt()
        })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectrumReport {
    pub singular_values: Vec<f64>,
    pub condition: f64,
    pub rank: usize,
    /// All singular values are zero.
    pub degenerate: bool,
}

fn descending(mut s: Vec<f64>) -> Vec<f64> {
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

pub fn spectrum_of(m: &DMatrix<f64>) -> SpectrumReport {
    let s = descending(m.clone().singular_values().as_slice().to_vec());
    let top = s.first().copied().unwrap_or(0.0);
    let rank = s.iter().filter(|v| **v > RANK_CUTOFF * top).count();
    let bottom = s.last().copied().unwrap_or(0.0);
    SpectrumReport {
        condition: if bottom > 0.0 { top / bottom } else { f64::INFINITY },
        rank,
        degenerate: top == 0.0,
        singular_values: s,
    }
}

pub fn spectrum(op: &OperatorA) -> SpectrumReport {
    spectrum_of(&op.weighted())
}

#[derive(Debug, Clone, Serialize)]
pub struct TikhonovResult {
    pub alpha: f64,
    /// Node values of the recovered `u`.
    pub u: Vec<f64>,
    /// `‖Au − v‖ / ‖v‖` in `L²(∂D)`.
    pub residual: f64,
    /// Same in `L¹(∂D)`.
    pub residual_l1: f64,
    /// Residuals after replacing `u` by its positive part.
    pub projected_residual: f64,
    pub projected_residual_l1: f64,
}

/// SVD of the weighted matrix, reusable across regularization parameters.
pub struct TikhonovSolver<'a> {
    op: &'a OperatorA,
    u: DMatrix<f64>,
    s: DVector<f64>,
    v_t: DMatrix<f64>,
}

impl<'a> TikhonovSolver<'a> {
    pub fn new(op: &'a OperatorA) -> Self {
        let svd = op.weighted().svd(true, true);
        Self {
            op,
            u: svd.u.expect("requested"),
            s: svd.singular_values,
            v_t: svd.v_t.expect("requested"),
        }
    }

    pub fn solve(&self, target: &[f64], alpha: f64) -> Result<TikhonovResult> {
        if !(alpha > 0.0) {
            return Err(Error::Input(format!("regularization {alpha} must be positive")));
        }
        let op = self.op;
        if target.len() != op.n_boundary() {
            return Err(Error::Shape(format!("{} targets for {} boundary nodes", target.len(), op.n_boundary())));
        }
        let vt = DVector::from_fn(target.len(), |k, _| target[k] * op.samples[k].ds.sqrt());
        let mut coef = self.u.tr_mul(&vt);
        for (c, s) in coef.iter_mut().zip(self.s.iter()) {
            *c *= s / (s * s + alpha);
        }
        let ut = self.v_t.tr_mul(&coef);
        let u: Vec<f64> = ut
            .iter()
            .zip(op.disc.rule().weights())
            .map(|(x, w)| x / w.sqrt())
            .collect();
        let scale_l2 = op.boundary_l2(target);
        let scale_l1 = op.boundary_l1(target);
        let residuals = |u: &[f64]| -> Result<(f64, f64)> {
            let r: Vec<f64> = op.apply(u)?.iter().zip(target).map(|(a, b)| a - b).collect();
            Ok((op.boundary_l2(&r) / scale_l2, op.boundary_l1(&r) / scale_l1))
        };
        let (residual, residual_l1) = residuals(&u)?;
        let positive: Vec<f64> = u.iter().map(|x| x.max(0.0)).collect();
        let (projected_residual, projected_residual_l1) = residuals(&positive)?;
        Ok(TikhonovResult {
            alpha,
            u,
            residual,
            residual_l1,
            projected_residual,
            projected_residual_l1,
        })
    }
}

pub fn solve_tikhonov(op: &OperatorA, target: &[f64], alpha: f64) -> Result<TikhonovResult> {
    if !(alpha > 0.0) {
        return Err(Error::Input(format!("regularization {alpha} must be positive")));
    }
    TikhonovSolver::new(op).solve(target, alpha)
}

/// `h_ζ(z) = g(z, w) P(z, ζ)`.
pub fn kernel_value(kernel: &GreenKernel, w: Complex64, z: Complex64, zeta: Complex64) -> Result<f64> {
    Ok(kernel.green(z, w)? * kernel.poisson(z, zeta)?)
}

/// `h_ζ` at `ζ − d n(ζ)` for each distance `d`.
pub fn kernel_along_normal(kernel: &GreenKernel, w: Complex64, zeta: Complex64, distances: &[f64]) -> Result<Vec<f64>> {
    let s = kernel.domain().boundary_sample_at(zeta)?;
    distances
        .iter()
        .map(|d| kernel_value(kernel, w, s.position - s.normal * *d, s.position))
        .collect()
}

pub fn write_matrix_csv<W: Write>(out: &mut W, m: &DMatrix<f64>) -> std::io::Result<()> {
    for i in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols()).map(|j| format!("{:.17e}", m[(i, j)])).collect();
        writeln!(out, "{}", row.join(","))?;
    }
    Ok(())
}

pub fn write_spectrum_csv<W: Write>(out: &mut W, report: &SpectrumReport) -> std::io::Result<()> {
    writeln!(out, "index,singular_value")?;
    for (i, s) in report.singular_values.iter().enumerate() {
        writeln!(out, "{i},{s:.17e}")?;
    }
    Ok(())
}
