//! Discretized integral operator `T φ(z) = ∫_D g(z, ξ) φ(ξ) dA(ξ)` and
//! Poisson moments `∫_D ψ(z) P(z, ζ) dA(z)` on an area rule.

use std::f64::consts::PI;
use std::sync::{Arc, OnceLock};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

use super::{conformal_g1, green_disk, log_kernel, poisson_band_limited, polar_boundary_reference, GreenKernel};
use crate::error::{Error, Result};
use crate::geometry::{BoundarySample, Domain};
use crate::quadrature::{AreaRule, FieldSample, Layout};

/// Node-level quadrature of `T`, singularity-subtracted:
/// `(Tφ)_i = Σ_{j≠i} W_j (φ_j − φ_i) g(z_i, z_j) + φ_i ∫_D g(·, z_i) dA`.
pub struct TOperator {
    kind: Kind,
}

enum Kind {
    /// Polar rules: the kernel depends on ring indices and angle difference
    /// only, so each ring-pair block is circulant.
    Circulant {
        n_radial: usize,
        n_angular: usize,
        /// Real DFT of each ring-pair block, `[(i_r · n_r + j_r) · N + k]`.
        spectra: Vec<f64>,
        weights: Vec<f64>,
        /// `Σ_{j≠i} W_j g(z_i, z_j) − ∫ g(·, z_i) dA`.
        diagonal: Vec<f64>,
        forward: Arc<dyn Fft<f64>>,
        inverse: Arc<dyn Fft<f64>>,
    },
    Dense(DMatrix<f64>),
}

impl std::fmt::Debug for TOperator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match &self.kind {
            Kind::Circulant { n_radial, n_angular, .. } => {
                write!(f, "TOperator::Circulant({n_radial}x{n_angular})")
            }
            Kind::Dense(m) => write!(f, "TOperator::Dense({}x{})", m.nrows(), m.ncols()),
        }
    }
}

impl TOperator {
    fn circulant(rule: &AreaRule, g1: Vec<f64>) -> Self {
        let nr = rule.n_radial();
        let na = rule.n_angular();
        let radii = rule.ring_radii().to_vec();
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(na);
        let inverse = planner.plan_fft_inverse(na);
        let dtheta = 2.0 * PI / na as f64;

        let spectra: Vec<f64> = (0..nr * nr)
            .into_par_iter()
            .flat_map_iter(|pair| {
                let (i, j) = (pair / nr, pair % nr);
                let mut buf: Vec<Complex64> = (0..na)
                    .map(|d| {
                        if i == j && d == 0 {
                            Complex64::new(0.0, 0.0)
                        } else {
                            let a = Complex64::new(radii[i], 0.0);
                            let b = Complex64::from_polar(radii[j], dtheta * d as f64);
                            Complex64::new(green_disk(a, b), 0.0)
                        }
                    })
                    .collect();
                forward.process(&mut buf);
                buf.into_iter().map(|c| c.re)
            })
            .collect();

        let mut op = Self {
            kind: Kind::Circulant {
                n_radial: nr,
                n_angular: na,
                spectra,
                weights: rule.weights().to_vec(),
                diagonal: Vec::new(),
                forward,
                inverse,
            },
        };
        let mass = op.convolve(&vec![1.0; rule.len()]);
        if let Kind::Circulant { diagonal, .. } = &mut op.kind {
            *diagonal = mass.iter().zip(&g1).map(|(m, g)| m - g).collect();
        }
        op
    }

    /// `Σ_{j≠i} W_j φ_j g(z_i, z_j)` for a polar rule.
    fn convolve(&self, phi: &[f64]) -> Vec<f64> {
        let Kind::Circulant {
            n_radial: nr,
            n_angular: na,
            spectra,
            weights,
            forward,
            inverse,
            ..
        } = &self.kind
        else {
            unreachable!()
        };
        let (nr, na) = (*nr, *na);
        let rings: Vec<Vec<Complex64>> = (0..nr)
            .into_par_iter()
            .map(|j| {
                let mut buf: Vec<Complex64> = (0..na)
                    .map(|k| Complex64::new(weights[j * na + k] * phi[j * na + k], 0.0))
                    .collect();
                forward.process(&mut buf);
                buf
            })
            .collect();
        (0..nr)
            .into_par_iter()
            .flat_map_iter(|i| {
                let mut acc = vec![Complex64::new(0.0, 0.0); na];
                for (j, ring) in rings.iter().enumerate() {
                    let s = &spectra[(i * nr + j) * na..(i * nr + j + 1) * na];
                    for k in 0..na {
                        acc[k] += ring[k] * s[k];
                    }
                }
                inverse.process(&mut acc);
                acc.into_iter().map(move |c| c.re / na as f64)
            })
            .collect()
    }

    pub fn len(&self) -> usize {
        match &self.kind {
            Kind::Circulant { weights, .. } => weights.len(),
            Kind::Dense(m) => m.nrows(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn apply(&self, phi: &[f64]) -> Vec<f64> {
        match &self.kind {
            Kind::Circulant { diagonal, .. } => {
                let conv = self.convolve(phi);
                conv.iter()
                    .zip(diagonal)
                    .zip(phi)
                    .map(|((c, d), p)| c - d * p)
                    .collect()
            }
            Kind::Dense(m) => {
                let v = nalgebra::DVector::from_column_slice(phi);
                (m * v).as_slice().to_vec()
            }
        }
    }
}

/// A Green kernel together with an area rule centred on a source point, and
/// the operators built on that rule.
#[derive(Debug)]
pub struct Discretization {
    kernel: GreenKernel,
    rule: AreaRule,
    source: Option<Complex64>,
    green: Option<Vec<f64>>,
    t_op: OnceLock<TOperator>,
    /// Marker curves: boundary flux of `Tψ` on every ray of the star rule.
    ray_flux: OnceLock<DMatrix<f64>>,
}

impl Discretization {
    pub fn new(kernel: &GreenKernel, n_radial: usize, n_angular: usize, source: Option<Complex64>) -> Result<Self> {
        let rule = AreaRule::new(kernel.domain(), n_radial, n_angular, source)?;
        let green = match source {
            Some(w) => Some(kernel.green_on_rule(&rule, w)?),
            None => None,
        };
        Ok(Self {
            kernel: kernel.clone(),
            rule,
            source,
            green,
            t_op: OnceLock::new(),
            ray_flux: OnceLock::new(),
        })
    }

    pub fn kernel(&self) -> &GreenKernel {
        &self.kernel
    }

    pub fn domain(&self) -> &Domain {
        self.kernel.domain()
    }

    pub fn rule(&self) -> &AreaRule {
        &self.rule
    }

    pub fn source(&self) -> Option<Complex64> {
        self.source
    }

    fn require_source(&self) -> Result<Complex64> {
        self.source
            .ok_or_else(|| Error::Input("discretization has no source point".into()))
    }

    /// `g(z_j, w)` at the nodes for the rule's source `w`.
    pub fn green_w(&self) -> Result<&[f64]> {
        self.require_source()?;
        Ok(self.green.as_deref().expect("set with the source"))
    }

    pub fn green_field(&self) -> Result<FieldSample> {
        self.rule.field(self.green_w()?.to_vec())
    }

    pub fn sample<F: Fn(Complex64) -> f64>(&self, f: F) -> FieldSample {
        self.rule.sample(f)
    }

    pub fn t_operator(&self) -> &TOperator {
        self.t_op.get_or_init(|| match (&self.rule.layout, self.kernel.domain()) {
            (Layout::Polar { preimages, .. }, domain) => {
                let g1 = match domain {
                    Domain::Conformal(map) => preimages.iter().map(|om| conformal_g1(map, *om)).collect(),
                    _ => self.rule.nodes().iter().map(|z| (z.norm_sqr() - 1.0) / 4.0).collect(),
                };
                TOperator::circulant(&self.rule, g1)
            }
            (Layout::Star { .. }, _) => self.dense_t(),
        })
    }

    fn dense_t(&self) -> TOperator {
        let fit = self.kernel.mfs().expect("curve kernel has a fit");
        let nodes = self.rule.nodes();
        let w = self.rule.weights();
        let n = nodes.len();
        let rows: Vec<Vec<f64>> = (0..n)
            .into_par_iter()
            .map(|i| {
                let mut row = vec![0.0; n];
                let mut diag = fit.log_moment(nodes[i]) / (2.0 * PI);
                for j in 0..n {
                    if j != i {
                        let v = w[j] * log_kernel(nodes[i], nodes[j]);
                        row[j] = v;
                        diag -= v;
                    }
                }
                row[i] = diag;
                row
            })
            .collect();
        let newton = DMatrix::from_fn(n, n, |i, j| rows[i][j]);
        let basis = DMatrix::from_fn(n, fit.len() + 1, |i, l| {
            if l < fit.len() {
                log_kernel(nodes[i], fit.sources()[l])
            } else {
                1.0
            }
        });
        // Boundary trace of the Newtonian part, singularity-subtracted at the
        // nearest node; the harmonic correction cancels it.
        let samples = fit.samples();
        let mut trace = DMatrix::zeros(samples.len(), n);
        for (k, s) in samples.iter().enumerate() {
            let mut nearest = (f64::INFINITY, 0);
            let mut total = 0.0;
            for (j, z) in nodes.iter().enumerate() {
                let v = w[j] * log_kernel(s.position, *z);
                trace[(k, j)] = -v;
                total += v;
                let dist = (s.position - z).norm();
                if dist < nearest.0 {
                    nearest = (dist, j);
                }
            }
            trace[(k, nearest.1)] += total - fit.log_moment(s.position) / (2.0 * PI);
        }
        let q = fit.fit_boundary_values(&trace);
        TOperator {
            kind: Kind::Dense(newton + basis * q),
        }
    }

    /// `(Tφ)` on the rule's nodes.
    pub fn apply_t(&self, phi: &FieldSample) -> Result<FieldSample> {
        self.rule.check(phi)?;
        self.rule.field(self.t_operator().apply(&phi.values))
    }

    /// Weights `Π_j` with `Σ_j Π_j ψ(z_j) ≈ ∫_D ψ P(·, ζ) dA` at a boundary point.
    pub fn poisson_row(&self, zeta: Complex64) -> Result<Vec<f64>> {
        let sample = self.kernel.domain().boundary_sample_at(zeta)?;
        Ok(self.poisson_row_at(&sample))
    }

    pub fn poisson_row_at(&self, sample: &BoundarySample) -> Vec<f64> {
        let w = self.rule.weights();
        match &self.rule.layout {
            Layout::Polar { shift, radii, .. } => {
                let (psi, speed) = polar_boundary_reference(self.kernel.domain(), *shift, sample.t);
                let na = self.rule.n_angular();
                let dtheta = 2.0 * PI / na as f64;
                let mut row = Vec::with_capacity(self.rule.len());
                for (ir, r) in radii.iter().enumerate() {
                    for j in 0..na {
                        let p = poisson_band_limited(*r, dtheta * j as f64 - psi, na / 2);
                        row.push(w[ir * na + j] * p / speed);
                    }
                }
                row
            }
            Layout::Star { .. } => {
                let flux = self.ray_flux();
                let na = self.rule.n_angular();
                let h = 2.0 * PI / na as f64;
                let x = sample.t / h;
                let nearest = x.round();
                if (x - nearest).abs() < 1e-9 {
                    let j = (nearest as usize) % na;
                    return flux.row(j).iter().copied().collect();
                }
                let mut row = vec![0.0; self.rule.len()];
                for j in 0..na {
                    let c = periodic_cardinal(sample.t - h * j as f64, na);
                    for (r, f) in row.iter_mut().zip(flux.row(j).iter()) {
                        *r += c * f;
                    }
                }
                row
            }
        }
    }

    /// Rows `R_j` with `R_j · ψ = ∂_n(Tψ)` at the boundary end of ray `j`.
    /// `Tψ` vanishes on the boundary, so its normal derivative follows from
    /// the radial derivative along the ray, taken from a one-sided polynomial
    /// fit through the outer rings and the boundary zero.
    fn ray_flux(&self) -> &DMatrix<f64> {
        self.ray_flux.get_or_init(|| {
            let Domain::Curve(curve) = self.kernel.domain() else {
                unreachable!("star rules belong to marker curves")
            };
            let t = match &self.t_operator().kind {
                Kind::Dense(m) => m,
                Kind::Circulant { .. } => unreachable!(),
            };
            let nr = self.rule.n_radial();
            let na = self.rule.n_angular();
            let center = self.rule.star_center().expect("star rule");
            let used = nr.min(RAY_FIT_POINTS);
            let s: Vec<f64> = self.rule.ring_radii()[nr - used..].iter().map(|r| r.sqrt()).collect();
            let d = endpoint_derivative_weights(&s);
            let h = 2.0 * PI / na as f64;
            let mut flux = DMatrix::zeros(na, self.rule.len());
            for j in 0..na {
                let (zeta, normal, _) = curve.frame(h * j as f64);
                // dρ = ds · 2s at s = 1; ∇f = (∂_n f) n on the boundary.
                let scale = 0.5 / (normal.conj() * (zeta - center)).re;
                for (k, dk) in d.iter().enumerate() {
                    let node = (nr - used + k) * na + j;
                    for col in 0..t.ncols() {
                        flux[(j, col)] += dk * scale * t[(node, col)];
                    }
                }
            }
            flux
        })
    }

    /// Poisson rows for many boundary samples.
    pub fn poisson_matrix(&self, samples: &[BoundarySample]) -> Vec<Vec<f64>> {
        samples.par_iter().map(|s| self.poisson_row_at(s)).collect()
    }

    /// `g(z, z_j)` for every node; `z` must not be a node.
    pub fn green_row(&self, z: Complex64) -> Result<Vec<f64>> {
        match (&self.rule.layout, self.kernel.domain()) {
            (Layout::Polar { preimages, .. }, domain) => {
                let omega = match domain {
                    Domain::Conformal(map) => map.inverse(z)?,
                    _ => z,
                };
                Ok(preimages.iter().map(|om| green_disk(omega, *om)).collect())
            }
            (Layout::Star { .. }, _) => self.kernel.green_on_rule(&self.rule, z),
        }
    }

    /// `(Tφ)(z)` at an arbitrary interior point, singularity-subtracted with
    /// the value at the nearest node.
    pub fn t_at(&self, phi: &FieldSample, z: Complex64) -> Result<f64> {
        self.rule.check(phi)?;
        if !self.kernel.domain().contains(z)? {
            return Err(Error::Domain(z.to_string()));
        }
        let nodes = self.rule.nodes();
        let nearest = (0..nodes.len())
            .min_by(|&a, &b| (nodes[a] - z).norm().total_cmp(&(nodes[b] - z).norm()))
            .expect("nonempty rule");
        if nodes[nearest] == z {
            return Ok(self.t_operator().apply(&phi.values)[nearest]);
        }
        let anchor = phi.values[nearest];
        let g = self.green_row(z)?;
        let w = self.rule.weights();
        let regular: f64 = (0..nodes.len()).map(|j| w[j] * (phi.values[j] - anchor) * g[j]).sum();
        Ok(regular + anchor * self.kernel.g1(z)?)
    }

    /// `∫_D ψ P(·, ζ) dA`.
    pub fn poisson_moment(&self, psi: &FieldSample, zeta: Complex64) -> Result<f64> {
        self.rule.check(psi)?;
        let row = self.poisson_row(zeta)?;
        Ok(dot(&row, &psi.values))
    }

    /// `P(w, ζ)` for the rule's source.
    pub fn source_poisson(&self, zeta: Complex64) -> Result<f64> {
        let w = self.require_source()?;
        self.kernel.poisson(w, zeta)
    }
}

const RAY_FIT_POINTS: usize = 10;

/// Weights `d_k` with `Σ d_k f(s_k) ≈ f'(1)` for `f(1) = 0`, from the
/// polynomial through the points `s_k` and the endpoint.
fn endpoint_derivative_weights(s: &[f64]) -> Vec<f64> {
    let mut x = s.to_vec();
    x.push(1.0);
    let m = x.len();
    let lambda: Vec<f64> = (0..m)
        .map(|i| 1.0 / (0..m).filter(|&j| j != i).map(|j| x[i] - x[j]).product::<f64>())
        .collect();
    (0..m - 1)
        .map(|i| lambda[i] / lambda[m - 1] / (x[m - 1] - x[i]))
        .collect()
}

/// Trigonometric cardinal function of an `n`-point equispaced grid (`n`
/// even), evaluated at offset `x` from its node.
fn periodic_cardinal(x: f64, n: usize) -> f64 {
    let half = 0.5 * x;
    let den = n as f64 * half.tan();
    if den.abs() < 1e-14 {
        return 1.0;
    }
    (n as f64 * half).sin() / den
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::MarkerCurve;

    fn c(x: f64, y: f64) -> Complex64 {
        Complex64::new(x, y)
    }

    #[test]
    fn t_of_one_on_disk() {
        let k = GreenKernel::new(&Domain::UnitDisk).unwrap();
        for w in [None, Some(c(0.3, 0.2))] {
            let d = Discretization::new(&k, 32, 64, w).unwrap();
            let one = d.sample(|_| 1.0);
            let t1 = d.apply_t(&one).unwrap();
            for (z, v) in d.rule().nodes().iter().zip(&t1.values) {
                assert!((v - (z.norm_sqr() - 1.0) / 4.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn t_of_quadratic_on_disk() {
        // T(|z|²) = (|z|⁴ − 1)/16.
        let k = GreenKernel::new(&Domain::UnitDisk).unwrap();
        let d = Discretization::new(&k, 32, 64, Some(c(-0.2, 0.4))).unwrap();
        let f = d.sample(|z| z.norm_sqr());
        let tf = d.apply_t(&f).unwrap();
        let err = d
            .rule()
            .nodes()
            .iter()
            .zip(&tf.values)
            .map(|(z, v)| (v - (z.norm_sqr().powi(2) - 1.0) / 16.0).abs())
            .fold(0.0, f64::max);
        assert!(err < 1e-4, "{err}");
    }

    #[test]
    fn mismatched_rules_rejected() {
        let k = GreenKernel::new(&Domain::UnitDisk).unwrap();
        let d1 = Discretization::new(&k, 16, 32, None).unwrap();
        let d2 = Discretization::new(&k, 16, 32, None).unwrap();
        let f = d1.sample(|_| 1.0);
        assert!(matches!(d2.apply_t(&f), Err(Error::Shape(_))));
    }

    #[test]
    fn poisson_row_mass() {
        let conf = Domain::conformal(vec![c(1.0, 0.0), c(0.2, 0.0)]).unwrap();
        for domain in [Domain::UnitDisk, conf] {
            let k = GreenKernel::new(&domain).unwrap();
            let d = Discretization::new(&k, 32, 64, Some(c(0.1, -0.2))).unwrap();
            // ∫ Δf P dA with f = |z|² − |φ|²-type checks live in the acceptance
            // suite; here only the total boundary mass of the Poisson rows.
            let samples = domain.boundary_samples(64).unwrap();
            let rows = d.poisson_matrix(&samples);
            let area: f64 = d.rule().weights().iter().sum();
            let total: f64 = rows
                .iter()
                .zip(&samples)
                .map(|(r, s)| r.iter().sum::<f64>() * s.ds)
                .sum();
            assert!((total - area).abs() < 1e-9 * area, "{total} vs {area}");
        }
    }

    #[test]
    fn curve_operator_matches_disk() {
        let curve = Domain::Curve(MarkerCurve::circle(c(0.0, 0.0), 1.0, 128).unwrap());
        let k = GreenKernel::new(&curve).unwrap();
        let d = Discretization::new(&k, 16, 64, Some(c(0.0, 0.0))).unwrap();
        let one = d.sample(|_| 1.0);
        let t1 = d.apply_t(&one).unwrap();
        let err = d
            .rule()
            .nodes()
            .iter()
            .zip(&t1.values)
            .map(|(z, v)| (v - (z.norm_sqr() - 1.0) / 4.0).abs())
            .fold(0.0, f64::max);
        assert!(err < 5e-4, "{err}");
        // ∫ P dA = 1/2 and ∫ |z|² P dA = 1/4 on the unit disk, on and off a ray.
        for t in [0.0, 0.3] {
            let row = d.poisson_row(Complex64::from_polar(1.0, t)).unwrap();
            assert!((row.iter().sum::<f64>() - 0.5).abs() < 1e-5);
            let m2 = dot(&row, &d.sample(|z| z.norm_sqr()).values);
            assert!((m2 - 0.25).abs() < 1e-3, "{m2}");
        }
    }
}
