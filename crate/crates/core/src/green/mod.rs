//! Green function and Poisson kernel of the Laplacian.
//!
//! Convention: `Δg(·, w) = δ_w`, `g ≤ 0` in `D`, `g = 0` on `∂D`, so the
//! Poisson kernel `P(z, ζ) = ∂_n g(ζ, z)` is nonnegative and has unit mass
//! on the boundary.

mod mfs;
mod operator;

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;

pub use mfs::{MfsFit, SOURCE_OFFSET};
pub use operator::{Discretization, TOperator};

pub(crate) use mfs::{log_kernel, log_kernel_normal};

use crate::error::{Error, Result};
use crate::geometry::{BoundarySample, ConformalMap, Domain};
use crate::quadrature::{mobius_inverse, AreaRule, Layout};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelMethod {
    ExactDisk,
    ConformalTransport,
    Mfs,
}

#[derive(Debug, Clone)]
pub struct GreenKernel {
    domain: Domain,
    mfs: Option<Arc<MfsFit>>,
}

/// Green function of the unit disk.
pub fn green_disk(z: Complex64, w: Complex64) -> f64 {
    let one = Complex64::new(1.0, 0.0);
    ((z - w).norm().ln() - (one - w.conj() * z).norm().ln()) / (2.0 * PI)
}

/// Poisson kernel of the unit disk.
pub fn poisson_disk(z: Complex64, zeta: Complex64) -> f64 {
    (1.0 - z.norm_sqr()) / ((zeta - z).norm_sqr() * 2.0 * PI)
}

/// Poisson kernel truncated to angular frequencies `|k| ≤ m`, the Nyquist
/// mode at half weight: `(1/2π)[1 + 2Σ_{k<m} r^k cos kx + r^m cos mx]`.
/// On an `2m`-point trapezoid rule in angle it integrates exactly what the
/// full kernel integrates against trigonometric interpolants.
pub fn poisson_band_limited(r: f64, x: f64, m: usize) -> f64 {
    let q = Complex64::from_polar(r, x);
    let one = Complex64::new(1.0, 0.0);
    let qm = Complex64::from_polar(r.powi(m as i32), x * m as f64);
    let geometric = if (one - q).norm() < 1e-14 {
        Complex64::new(m as f64, 0.0)
    } else {
        q * (one - qm) / (one - q)
    };
    (1.0 + 2.0 * geometric.re - qm.re) / (2.0 * PI)
}

/// `∫_D g(x, φ(ω)) dA(x)` for a polynomial map, in closed form.
pub(crate) fn conformal_g1(map: &ConformalMap, omega: Complex64) -> f64 {
    let c = map.coeffs();
    let z = map.eval(omega);
    let mut boundary_part = 0.0;
    for (j, cj) in c.iter().enumerate() {
        for (k, ck) in c.iter().enumerate() {
            let m = j as i64 - k as i64;
            let e = if m >= 0 {
                omega.powi(m as i32)
            } else {
                omega.conj().powi((-m) as i32)
            };
            boundary_part += (cj * ck.conj() * e).re;
        }
    }
    (z.norm_sqr() - boundary_part) / 4.0
}

impl GreenKernel {
    /// Builds the kernel; marker curves are fitted with one MFS source per
    /// marker point (at least 64).
    pub fn new(domain: &Domain) -> Result<Self> {
        let mfs = match domain {
            Domain::Curve(curve) => {
                let nodes = curve.len().max(64).div_ceil(2) * 2;
                Some(Arc::new(MfsFit::new(curve, nodes)?))
            }
            _ => None,
        };
        Ok(Self {
            domain: domain.clone(),
            mfs,
        })
    }

    /// Marker-curve kernel with an explicit collocation count.
    pub fn with_collocation(domain: &Domain, nodes: usize) -> Result<Self> {
        match domain {
            Domain::Curve(curve) => Ok(Self {
                domain: domain.clone(),
                mfs: Some(Arc::new(MfsFit::new(curve, nodes)?)),
            }),
            _ => Self::new(domain),
        }
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn method(&self) -> KernelMethod {
        match self.domain {
            Domain::UnitDisk => KernelMethod::ExactDisk,
            Domain::Conformal(_) => KernelMethod::ConformalTransport,
            Domain::Curve(_) => KernelMethod::Mfs,
        }
    }

    pub fn mfs(&self) -> Option<&MfsFit> {
        self.mfs.as_deref()
    }

    fn check_interior(&self, z: Complex64) -> Result<()> {
        if !self.domain.contains(z)? {
            return Err(Error::Domain(z.to_string()));
        }
        Ok(())
    }

    /// `g(z, w)`; `z` may lie on the boundary.
    pub fn green(&self, z: Complex64, w: Complex64) -> Result<f64> {
        self.check_interior(w)?;
        if !self.domain.contains_closed(z)? {
            return Err(Error::Domain(z.to_string()));
        }
        if z == w {
            return Err(Error::Singularity(w.to_string()));
        }
        Ok(match &self.domain {
            Domain::UnitDisk => green_disk(z, w),
            Domain::Conformal(map) => green_disk(map.inverse(z)?, map.inverse(w)?),
            Domain::Curve(_) => {
                let fit = self.mfs.as_ref().expect("curve kernel has a fit");
                log_kernel(z, w) + fit.correction(&fit.charges(w), z)
            }
        })
    }

    /// `P(z, ζ)` for `z ∈ D` and `ζ ∈ ∂D`.
    pub fn poisson(&self, z: Complex64, zeta: Complex64) -> Result<f64> {
        self.check_interior(z)?;
        let sample = self.domain.boundary_sample_at(zeta)?;
        Ok(self.poisson_at(z, &sample))
    }

    /// `P(z, ζ)` at a known boundary sample; `z` is assumed interior.
    pub fn poisson_at(&self, z: Complex64, sample: &BoundarySample) -> f64 {
        match &self.domain {
            Domain::UnitDisk => poisson_disk(z, sample.position),
            Domain::Conformal(map) => {
                let e = Complex64::from_polar(1.0, sample.t);
                let omega = map.inverse(z).expect("interior point has a preimage");
                poisson_disk(omega, e) / map.derivative(e).norm()
            }
            Domain::Curve(_) => {
                let fit = self.mfs.as_ref().expect("curve kernel has a fit");
                log_kernel_normal(sample.position, sample.normal, z)
                    + fit.correction_normal(&fit.charges(z), sample.position, sample.normal)
            }
        }
    }

    /// Poisson integral of boundary values `f` given on `samples` (which must
    /// come from [`Domain::boundary_samples`] for disk and conformal domains).
    pub fn harmonic_extension(&self, samples: &[BoundarySample], f: &[f64], z: Complex64) -> Result<f64> {
        if samples.len() != f.len() {
            return Err(Error::Shape(format!(
                "{} boundary values for {} samples",
                f.len(),
                samples.len()
            )));
        }
        self.check_interior(z)?;
        match &self.domain {
            Domain::UnitDisk | Domain::Conformal(_) => {
                let omega = match &self.domain {
                    Domain::Conformal(map) => map.inverse(z)?,
                    _ => z,
                };
                let n = samples.len();
                let h = 2.0 * PI / n as f64;
                if !n.is_multiple_of(2) || samples.iter().enumerate().any(|(k, s)| (s.t - h * k as f64).abs() > 1e-12) {
                    return Err(Error::Input("boundary samples must be equispaced in t".into()));
                }
                let (r, theta) = (omega.norm(), omega.arg());
                Ok(samples
                    .iter()
                    .zip(f)
                    .map(|(s, fk)| fk * h * poisson_band_limited(r, theta - s.t, n / 2))
                    .sum())
            }
            Domain::Curve(_) => {
                let fit = self.mfs.as_ref().expect("curve kernel has a fit");
                let q = fit.charges(z);
                Ok(samples
                    .iter()
                    .zip(f)
                    .map(|(s, fk)| {
                        let p = log_kernel_normal(s.position, s.normal, z)
                            + fit.correction_normal(&q, s.position, s.normal);
                        fk * p * s.ds
                    })
                    .sum())
            }
        }
    }

    /// `∫_D g(x, w) dA(x)`.
    pub fn g1(&self, w: Complex64) -> Result<f64> {
        self.check_interior(w)?;
        Ok(match &self.domain {
            Domain::UnitDisk => (w.norm_sqr() - 1.0) / 4.0,
            Domain::Conformal(map) => conformal_g1(map, map.inverse(w)?),
            Domain::Curve(_) => self.mfs.as_ref().expect("curve kernel has a fit").green_moment(w),
        })
    }

    /// `g(z_j, w)` at every node of `rule`.
    pub fn green_on_rule(&self, rule: &AreaRule, w: Complex64) -> Result<Vec<f64>> {
        self.check_interior(w)?;
        match (&rule.layout, &self.domain) {
            (Layout::Polar { radii, preimages, .. }, Domain::UnitDisk | Domain::Conformal(_)) => {
                if rule.singularity() == Some(w) {
                    let na = rule.n_angular();
                    return Ok(radii
                        .iter()
                        .flat_map(|r| std::iter::repeat_n(r.ln() / (2.0 * PI), na))
                        .collect());
                }
                let b = match &self.domain {
                    Domain::Conformal(map) => map.inverse(w)?,
                    _ => w,
                };
                preimages
                    .iter()
                    .map(|om| {
                        if *om == b {
                            Err(Error::Singularity(w.to_string()))
                        } else {
                            Ok(green_disk(*om, b))
                        }
                    })
                    .collect()
            }
            (_, Domain::Curve(_)) => {
                let fit = self.mfs.as_ref().expect("curve kernel has a fit");
                let q = fit.charges(w);
                rule.nodes()
                    .iter()
                    .map(|z| {
                        if *z == w {
                            Err(Error::Singularity(w.to_string()))
                        } else {
                            Ok(log_kernel(*z, w) + fit.correction(&q, *z))
                        }
                    })
                    .collect()
            }
            _ => Err(Error::Shape("area rule was built for a different domain".into())),
        }
    }

    /// Identity `∂_n f(ζ) = ∫_D Δf P(·, ζ) dA` for `f` vanishing on
    /// the boundary, with `Δf` sampled on the discretization's rule.
    pub fn normal_derivative_via_lemma(
        &self,
        disc: &Discretization,
        lap_f: &crate::quadrature::FieldSample,
        zeta: Complex64,
    ) -> Result<f64> {
        disc.rule().check(lap_f)?;
        let row = disc.poisson_row(zeta)?;
        Ok(row.iter().zip(&lap_f.values).map(|(p, v)| p * v).sum())
    }
}

/// Reference-coordinate quantities of a polar rule needed for Poisson rows.
pub(crate) fn polar_boundary_reference(
    domain: &Domain,
    shift: Complex64,
    t: f64,
) -> (f64, f64) {
    let e = Complex64::from_polar(1.0, t);
    let beta = mobius_inverse(shift, e);
    let one = Complex64::new(1.0, 0.0);
    // |M_b'(β)| for M_b(a) = (a + b)/(1 + b̄a).
    let den = one + shift.conj() * beta;
    let mobius_speed = (1.0 - shift.norm_sqr()) / den.norm_sqr();
    let map_speed = match domain {
        Domain::Conformal(map) => map.derivative(e).norm(),
        _ => 1.0,
    };
    (beta.arg(), mobius_speed * map_speed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::MarkerCurve;

    fn c(x: f64, y: f64) -> Complex64 {
        Complex64::new(x, y)
    }

    #[test]
    fn disk_values() {
        let k = GreenKernel::new(&Domain::UnitDisk).unwrap();
        assert!((k.green(c(0.5, 0.0), c(0.0, 0.0)).unwrap() - 0.5f64.ln() / (2.0 * PI)).abs() < 1e-15);
        assert!(k.green(c(0.6, 0.8), c(0.1, 0.2)).unwrap().abs() < 1e-15);
        assert!((k.poisson(c(0.0, 0.0), c(0.0, 1.0)).unwrap() - 1.0 / (2.0 * PI)).abs() < 1e-15);
    }

    #[test]
    fn errors() {
        let k = GreenKernel::new(&Domain::UnitDisk).unwrap();
        assert!(matches!(k.green(c(0.2, 0.0), c(1.5, 0.0)), Err(Error::Domain(_))));
        assert!(matches!(k.green(c(0.2, 0.0), c(0.2, 0.0)), Err(Error::Singularity(_))));
        assert!(matches!(k.poisson(c(1.2, 0.0), c(1.0, 0.0)), Err(Error::Domain(_))));
    }

    #[test]
    fn identity_map_matches_disk() {
        let disk = GreenKernel::new(&Domain::UnitDisk).unwrap();
        let ident = GreenKernel::new(&Domain::conformal(vec![c(1.0, 0.0)]).unwrap()).unwrap();
        let (z, w, zeta) = (c(0.3, -0.4), c(-0.5, 0.1), Complex64::from_polar(1.0, 0.7));
        assert!((disk.green(z, w).unwrap() - ident.green(z, w).unwrap()).abs() < 1e-12);
        assert!((disk.poisson(z, zeta).unwrap() - ident.poisson(z, zeta).unwrap()).abs() < 1e-12);
        assert!((disk.g1(w).unwrap() - ident.g1(w).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn band_limited_kernel_matches_full_sum() {
        let (r, x, m): (f64, f64, usize) = (0.7, 0.4, 16);
        let mut s = 1.0;
        for k in 1..m {
            s += 2.0 * r.powi(k as i32) * (k as f64 * x).cos();
        }
        s += r.powi(m as i32) * (m as f64 * x).cos();
        assert!((poisson_band_limited(r, x, m) - s / (2.0 * PI)).abs() < 1e-14);
    }

    #[test]
    fn harmonic_extension_disk() {
        let k = GreenKernel::new(&Domain::UnitDisk).unwrap();
        let samples = Domain::UnitDisk.boundary_samples(64).unwrap();
        let f: Vec<f64> = samples.iter().map(|s| s.t.cos()).collect();
        let z = c(0.4, 0.3);
        assert!((k.harmonic_extension(&samples, &f, z).unwrap() - 0.4).abs() < 1e-13);
        let ones = vec![1.0; 64];
        assert!((k.harmonic_extension(&samples, &ones, z).unwrap() - 1.0).abs() < 1e-13);
    }

    #[test]
    fn conformal_g1_solves_poisson_problem() {
        let d = Domain::conformal(vec![c(1.0, 0.0), c(0.1, 0.05), c(0.0, 0.03)]).unwrap();
        let k = GreenKernel::new(&d).unwrap();
        // Vanishes on the boundary.
        let zeta = d.boundary_frame(1.1).0;
        if let Domain::Conformal(map) = &d {
            let om = map.inverse(zeta).unwrap();
            assert!(conformal_g1(map, om).abs() < 1e-10);
        }
        // Laplacian equal to one by a five-point check.
        let z = c(0.1, 0.2);
        let h = 1e-3;
        let lap = (k.g1(z + h).unwrap() + k.g1(z - h).unwrap() + k.g1(z + c(0.0, h)).unwrap()
            + k.g1(z - c(0.0, h)).unwrap()
            - 4.0 * k.g1(z).unwrap())
            / (h * h);
        assert!((lap - 1.0).abs() < 1e-5, "{lap}");
    }

    #[test]
    fn mfs_circle_matches_disk() {
        let curve = MarkerCurve::circle(c(0.0, 0.0), 1.0, 256).unwrap();
        let d = Domain::Curve(curve);
        let k = GreenKernel::new(&d).unwrap();
        let disk = GreenKernel::new(&Domain::UnitDisk).unwrap();
        let pairs = [(c(0.3, 0.2), c(0.1, -0.4)), (c(-0.6, 0.1), c(0.0, 0.0)), (c(0.0, 0.9), c(0.5, 0.5))];
        for (z, w) in pairs {
            let e = (k.green(z, w).unwrap() - disk.green(z, w).unwrap()).abs();
            assert!(e < 1e-5, "green error {e}");
        }
        let zeta = Complex64::from_polar(1.0, 0.3);
        for z in [c(0.3, 0.2), c(0.0, 0.0), c(-0.5, 0.6)] {
            let e = (k.poisson(z, zeta).unwrap() - disk.poisson(z, zeta).unwrap()).abs();
            assert!(e < 1e-5, "poisson error {e}");
        }
        let e = (k.g1(c(0.2, 0.1)).unwrap() - disk.g1(c(0.2, 0.1)).unwrap()).abs();
        assert!(e < 1e-5, "g1 error {e}");
    }
}
