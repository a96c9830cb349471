//! Method of fundamental solutions for the harmonic part of the Green
//! function of a marker-curve domain.
//!
//! The harmonic correction `H(·, w)` with `H = −ln|ζ − w|/2π` on the boundary
//! is expanded as `Σ q_l ln|z − y_l|/2π + q₀` with one source `y_l` per
//! collocation node, pushed outward along the normal. The extra unknown `q₀`
//! is balanced by the side condition `Σ q_l = 0`, which makes the collocation
//! system square.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector, Dyn, LU};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::{BoundarySample, MarkerCurve};

/// Source offset in units of the local node spacing.
pub const SOURCE_OFFSET: f64 = 4.0;

const RESIDUAL_TOL: f64 = 1e-6;

#[derive(Debug, Clone)]
pub struct MfsFit {
    samples: Vec<BoundarySample>,
    sources: Vec<Complex64>,
    lu: LU<f64, Dyn, Dyn>,
    /// `∫_D ln|x − y_l| dA` for every source, then the domain area.
    source_log_moments: Vec<f64>,
    area: f64,
    /// Dense boundary nodes used for boundary-integral moments.
    fine: Vec<BoundarySample>,
}

pub(crate) fn log_kernel(z: Complex64, y: Complex64) -> f64 {
    (z - y).norm().ln() / (2.0 * PI)
}

/// `∂_n ln|ζ − y| / 2π`.
pub(crate) fn log_kernel_normal(zeta: Complex64, normal: Complex64, y: Complex64) -> f64 {
    let d = zeta - y;
    (normal.conj() * d).re / (d.norm_sqr() * 2.0 * PI)
}

impl MfsFit {
    pub fn new(curve: &MarkerCurve, nodes: usize) -> Result<Self> {
        let domain = crate::geometry::Domain::Curve(curve.clone());
        let samples = domain.boundary_samples(nodes)?;
        let mut sources = Vec::with_capacity(nodes);
        for s in &samples {
            let mut offset = SOURCE_OFFSET * s.ds;
            let mut y = s.position + s.normal * offset;
            let mut tries = 0;
            while curve.winding(y) != 0 || curve.distance_to_polygon(y) < 0.5 * offset {
                tries += 1;
                if tries > 8 {
                    return Err(Error::Kernel(format!(
                        "no admissible source position near {}",
                        s.position
                    )));
                }
                offset *= 0.5;
                y = s.position + s.normal * offset;
            }
            sources.push(y);
        }

        let n = nodes;
        let mut m = DMatrix::zeros(n + 1, n + 1);
        for (k, s) in samples.iter().enumerate() {
            for (l, y) in sources.iter().enumerate() {
                m[(k, l)] = log_kernel(s.position, *y);
            }
            m[(k, n)] = 1.0;
        }
        for l in 0..n {
            m[(n, l)] = 1.0;
        }
        let lu = m.lu();
        if !lu.is_invertible() {
            return Err(Error::Kernel("collocation matrix is singular".into()));
        }

        let fine = domain.boundary_samples(8 * n)?;
        let area = curve.area();
        let source_log_moments = sources.iter().map(|y| log_moment(&fine, *y)).collect();
        let fit = Self {
            samples,
            sources,
            lu,
            source_log_moments,
            area,
            fine,
        };
        fit.check_residual(curve)?;
        Ok(fit)
    }

    fn check_residual(&self, curve: &MarkerCurve) -> Result<()> {
        let pts = curve.points();
        let c = pts.iter().sum::<Complex64>() / pts.len() as f64;
        if curve.winding(c) == 0 {
            return Ok(());
        }
        let q = self.charges(c);
        let n = self.samples.len();
        let h = 2.0 * PI / n as f64;
        let mut worst: f64 = 0.0;
        for k in 0..n {
            let (p, _, _) = curve.frame(h * (k as f64 + 0.5));
            worst = worst.max((log_kernel(p, c) + self.correction(&q, p)).abs());
        }
        if worst > RESIDUAL_TOL {
            return Err(Error::Kernel(format!(
                "boundary residual {worst:.2e} exceeds {RESIDUAL_TOL:.0e}"
            )));
        }
        Ok(())
    }

    pub fn samples(&self) -> &[BoundarySample] {
        &self.samples
    }

    pub fn sources(&self) -> &[Complex64] {
        &self.sources
    }

    pub fn len(&self) -> usize {
        self.sources.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sources.is_empty()
    }

    /// Right-hand side for a pole at `w`.
    fn rhs(&self, w: Complex64) -> DVector<f64> {
        let n = self.samples.len();
        DVector::from_fn(n + 1, |k, _| if k < n { -log_kernel(self.samples[k].position, w) } else { 0.0 })
    }

    /// Coefficients of the harmonic correction for a pole at `w`; the last
    /// entry is the constant term.
    pub fn charges(&self, w: Complex64) -> Vec<f64> {
        self.lu.solve(&self.rhs(w)).expect("invertible").as_slice().to_vec()
    }

    /// Charges for many poles at once, one column per pole.
    pub fn charge_matrix(&self, poles: &[Complex64]) -> DMatrix<f64> {
        let n = self.samples.len();
        let b = DMatrix::from_fn(n + 1, poles.len(), |k, j| {
            if k < n {
                -log_kernel(self.samples[k].position, poles[j])
            } else {
                0.0
            }
        });
        self.lu.solve(&b).expect("invertible")
    }

    /// Coefficients of harmonic functions with the given boundary values at
    /// the collocation nodes, one column per function.
    pub fn fit_boundary_values(&self, values: &DMatrix<f64>) -> DMatrix<f64> {
        let n = self.samples.len();
        assert_eq!(values.nrows(), n);
        let mut b = DMatrix::zeros(n + 1, values.ncols());
        b.rows_mut(0, n).copy_from(values);
        self.lu.solve(&b).expect("invertible")
    }

    pub fn correction(&self, q: &[f64], z: Complex64) -> f64 {
        let n = self.sources.len();
        q[n] + self.sources.iter().zip(q).map(|(y, c)| c * log_kernel(z, *y)).sum::<f64>()
    }

    pub fn correction_normal(&self, q: &[f64], zeta: Complex64, normal: Complex64) -> f64 {
        self.sources
            .iter()
            .zip(q)
            .map(|(y, c)| c * log_kernel_normal(zeta, normal, *y))
            .sum()
    }

    /// Basis values `[ln|z − y_l|/2π …, 1]` at `z`.
    pub fn basis(&self, z: Complex64) -> Vec<f64> {
        let mut b: Vec<f64> = self.sources.iter().map(|y| log_kernel(z, *y)).collect();
        b.push(1.0);
        b
    }

    /// Normal derivatives of the basis at a boundary point.
    pub fn basis_normal(&self, zeta: Complex64, normal: Complex64) -> Vec<f64> {
        let mut b: Vec<f64> = self
            .sources
            .iter()
            .map(|y| log_kernel_normal(zeta, normal, *y))
            .collect();
        b.push(0.0);
        b
    }

    /// `∫_D ln|x − z| dA(x)`.
    pub fn log_moment(&self, z: Complex64) -> f64 {
        log_moment(&self.fine, z)
    }

    /// `∫_D g(x, w) dA(x)`.
    pub fn green_moment(&self, w: Complex64) -> f64 {
        let q = self.charges(w);
        let n = self.sources.len();
        let direct = self.log_moment(w) / (2.0 * PI);
        let corr: f64 = q[..n]
            .iter()
            .zip(&self.source_log_moments)
            .map(|(c, m)| c * m / (2.0 * PI))
            .sum();
        direct + corr + q[n] * self.area
    }
}

/// `∫_D ln|x − z| dA = ∮ (x − z)·n (ln|x − z|/2 − 1/4) ds`, valid for `z`
/// inside or outside `D`.
fn log_moment(fine: &[BoundarySample], z: Complex64) -> f64 {
    fine.iter()
        .map(|s| {
            let d = s.position - z;
            let r2 = d.norm_sqr();
            if r2 == 0.0 {
                return 0.0;
            }
            (s.normal.conj() * d).re * (0.25 * r2.ln() - 0.25) * s.ds
        })
        .sum()
}
