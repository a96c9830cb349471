//! Area quadrature over domains, adapted to a logarithmic singularity.
//!
//! Disk and conformal domains use a polar rule in *reference coordinates*:
//! the unit disk is carried onto the domain by `Φ = φ ∘ M_b`, where `M_b` is
//! the disk automorphism sending 0 to `b = φ⁻¹(w)`. The rule's origin thus
//! sits exactly on the singular point `w`, and the Green function of the
//! domain with pole `w` becomes `ln|a| / 2π` in reference coordinates. Radii
//! are Gauss–Legendre in `s` with `r = s²`, which grades nodes toward the
//! pole; angles are equispaced (trapezoid).
//!
//! Marker curves use a star-shaped rule `z = c + ρ (ζ(t) − c)` about the
//! singular point, with the same radial treatment.

use std::f64::consts::PI;
use std::sync::atomic::{AtomicU64, Ordering};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::{Domain, MarkerCurve};
use crate::green::GreenKernel;

static NEXT_RULE_ID: AtomicU64 = AtomicU64::new(1);

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let mut p0 = 1.0;
            let mut p1 = 0.0;
            for j in 0..n {
                let p2 = p1;
                p1 = p0;
                p0 = ((2 * j + 1) as f64 * z * p1 - j as f64 * p2) / (j + 1) as f64;
            }
            dp = n as f64 * (z * p0 - p1) / (z * z - 1.0);
            let dz = p0 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

/// Graded radial rule on `[0, 1]`: Gauss–Legendre in `s`, `r = s²`.
/// Returns radii and weights for `∫₀¹ f(r) dr`.
pub fn graded_radial(n: usize) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_legendre(n);
    let mut radii = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    for (xi, wi) in x.iter().zip(&w) {
        let s = 0.5 * (xi + 1.0);
        radii.push(s * s);
        weights.push(0.5 * wi * 2.0 * s);
    }
    (radii, weights)
}

#[derive(Debug, Clone)]
pub(crate) enum Layout {
    /// Polar rule in reference coordinates of a disk or conformal image.
    Polar {
        /// `b = φ⁻¹(center)`; the Möbius shift.
        shift: Complex64,
        radii: Vec<f64>,
        /// `φ`-preimage of every node.
        preimages: Vec<Complex64>,
    },
    /// Star-shaped rule about the singular point (or centroid) for marker curves.
    Star { center: Complex64, radii: Vec<f64> },
}

/// Area nodes and weights for `∫_D f dA`.
#[derive(Debug, Clone)]
pub struct AreaRule {
    id: u64,
    nodes: Vec<Complex64>,
    weights: Vec<f64>,
    singularity: Option<Complex64>,
    n_radial: usize,
    n_angular: usize,
    pub(crate) layout: Layout,
}

/// Disk automorphism `M_b(a) = (a + b) / (1 + b̄ a)`.
pub(crate) fn mobius(b: Complex64, a: Complex64) -> Complex64 {
    (a + b) / (Complex64::new(1.0, 0.0) + b.conj() * a)
}

pub(crate) fn mobius_inverse(b: Complex64, z: Complex64) -> Complex64 {
    (z - b) / (Complex64::new(1.0, 0.0) - b.conj() * z)
}

pub(crate) fn mobius_derivative(b: Complex64, a: Complex64) -> Complex64 {
    let den = Complex64::new(1.0, 0.0) + b.conj() * a;
    Complex64::new(1.0 - b.norm_sqr(), 0.0) / (den * den)
}

impl AreaRule {
    /// Builds a rule with `n_radial` radii and `n_angular` angles, centered on
    /// `singularity` when given.
    pub fn new(
        domain: &Domain,
        n_radial: usize,
        n_angular: usize,
        singularity: Option<Complex64>,
    ) -> Result<Self> {
        if n_radial < 8 || n_angular < 8 {
            return Err(Error::Quadrature(format!(
                "resolution ({n_radial}, {n_angular}) below the minimum of 8"
            )));
        }
        if !n_angular.is_multiple_of(2) {
            return Err(Error::Quadrature(format!("angular count {n_angular} must be even")));
        }
        if let Some(w) = singularity {
            if !domain.contains(w)? {
                return Err(Error::Quadrature(format!("singular point {w} lies outside the domain")));
            }
        }
        let (radii, radial_w) = graded_radial(n_radial);
        let dtheta = 2.0 * PI / n_angular as f64;
        let size = n_radial * n_angular;
        let mut nodes = Vec::with_capacity(size);
        let mut weights = Vec::with_capacity(size);

        let layout = match domain {
            Domain::UnitDisk | Domain::Conformal(_) => {
                let shift = match (domain, singularity) {
                    (_, None) => Complex64::new(0.0, 0.0),
                    (Domain::Conformal(map), Some(w)) => map.inverse(w)?,
                    (_, Some(w)) => w,
                };
                let mut preimages = Vec::with_capacity(size);
                for (r, wr) in radii.iter().zip(&radial_w) {
                    for j in 0..n_angular {
                        let a = Complex64::from_polar(*r, dtheta * j as f64);
                        let omega = mobius(shift, a);
                        let jac_m = mobius_derivative(shift, a).norm_sqr();
                        let (z, jac_phi) = match domain {
                            Domain::Conformal(map) => (map.eval(omega), map.derivative(omega).norm_sqr()),
                            _ => (omega, 1.0),
                        };
                        nodes.push(z);
                        preimages.push(omega);
                        weights.push(wr * r * dtheta * jac_m * jac_phi);
                    }
                }
                Layout::Polar {
                    shift,
                    radii: radii.clone(),
                    preimages,
                }
            }
            Domain::Curve(curve) => {
                let center = match singularity {
                    Some(w) => w,
                    None => polygon_centroid(curve.points()),
                };
                let frames: Vec<(Complex64, f64)> = (0..n_angular)
                    .map(|j| {
                        let (p, d) = curve.position_and_tangent(dtheta * j as f64);
                        (p, ((p - center).conj() * d).im)
                    })
                    .collect();
                ensure_star_shaped(curve, center, n_angular)?;
                for (rho, wr) in radii.iter().zip(&radial_w) {
                    for (p, jac) in &frames {
                        nodes.push(center + (p - center) * *rho);
                        weights.push(wr * rho * jac * dtheta);
                    }
                }
                Layout::Star {
                    center,
                    radii: radii.clone(),
                }
            }
        };

        Ok(Self {
            id: NEXT_RULE_ID.fetch_add(1, Ordering::Relaxed),
            nodes,
            weights,
            singularity,
            n_radial,
            n_angular,
            layout,
        })
    }

    pub fn id(&self) -> u64 {
        self.id
    }

    pub fn nodes(&self) -> &[Complex64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn singularity(&self) -> Option<Complex64> {
        self.singularity
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn n_radial(&self) -> usize {
        self.n_radial
    }

    pub fn n_angular(&self) -> usize {
        self.n_angular
    }

    /// Center of a star-shaped rule; `None` for polar rules.
    pub fn star_center(&self) -> Option<Complex64> {
        match &self.layout {
            Layout::Star { center, .. } => Some(*center),
            Layout::Polar { .. } => None,
        }
    }

    /// Radii of the rule's rings (reference radius or star scaling factor).
    pub fn ring_radii(&self) -> &[f64] {
        match &self.layout {
            Layout::Polar { radii, .. } | Layout::Star { radii, .. } => radii,
        }
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// `Σ wᵢ fᵢ`.
    pub fn integrate(&self, values: &[f64]) -> f64 {
        debug_assert_eq!(values.len(), self.len());
        self.weights.iter().zip(values).map(|(w, v)| w * v).sum()
    }

    pub fn integrate_fn<F: Fn(Complex64) -> f64>(&self, f: F) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(z, w)| w * f(*z)).sum()
    }

    /// Samples a closed-form function onto the nodes.
    pub fn sample<F: Fn(Complex64) -> f64>(&self, f: F) -> FieldSample {
        FieldSample {
            rule_id: self.id,
            values: self.nodes.iter().map(|z| f(*z)).collect(),
        }
    }

    pub fn field(&self, values: Vec<f64>) -> Result<FieldSample> {
        if values.len() != self.len() {
            return Err(Error::Shape(format!(
                "{} values for a rule with {} nodes",
                values.len(),
                self.len()
            )));
        }
        Ok(FieldSample {
            rule_id: self.id,
            values,
        })
    }

    pub fn check(&self, field: &FieldSample) -> Result<()> {
        if field.rule_id != self.id || field.values.len() != self.len() {
            return Err(Error::Shape(format!(
                "field sampled on rule {} used with rule {}",
                field.rule_id, self.id
            )));
        }
        Ok(())
    }
}

/// Scalar values on the nodes of one [`AreaRule`].
#[derive(Debug, Clone, PartialEq)]
pub struct FieldSample {
    rule_id: u64,
    pub values: Vec<f64>,
}

impl FieldSample {
    pub fn rule_id(&self) -> u64 {
        self.rule_id
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn map<F: Fn(f64) -> f64>(&self, f: F) -> FieldSample {
        FieldSample {
            rule_id: self.rule_id,
            values: self.values.iter().map(|v| f(*v)).collect(),
        }
    }

    pub fn zip_with<F: Fn(f64, f64) -> f64>(&self, other: &FieldSample, f: F) -> Result<FieldSample> {
        if self.rule_id != other.rule_id {
            return Err(Error::Shape("fields live on different rules".into()));
        }
        Ok(FieldSample {
            rule_id: self.rule_id,
            values: self.values.iter().zip(&other.values).map(|(a, b)| f(*a, *b)).collect(),
        })
    }
}

fn polygon_centroid(points: &[Complex64]) -> Complex64 {
    let n = points.len();
    let mut area = 0.0;
    let mut acc = Complex64::new(0.0, 0.0);
    for k in 0..n {
        let (a, b) = (points[k], points[(k + 1) % n]);
        let cr = a.re * b.im - a.im * b.re;
        area += cr;
        acc += (a + b) * cr;
    }
    acc / (3.0 * area)
}

fn ensure_star_shaped(curve: &MarkerCurve, center: Complex64, n_angular: usize) -> Result<()> {
    let m = 4 * n_angular.max(curve.len());
    for j in 0..m {
        let (p, d) = curve.position_and_tangent(2.0 * PI * j as f64 / m as f64);
        if ((p - center).conj() * d).im <= 0.0 {
            return Err(Error::Quadrature(format!(
                "marker curve is not star-shaped about {center}"
            )));
        }
    }
    Ok(())
}

/// `∫_D f(z) g(z, w) dA(z)` by singularity subtraction:
/// `∫ (f − f(w)) g_w dA + f(w) ∫ g_w dA`.
pub fn integrate_with_log_singularity<F: Fn(Complex64) -> f64>(
    rule: &AreaRule,
    kernel: &GreenKernel,
    f: F,
    w: Complex64,
) -> Result<f64> {
    let fw = f(w);
    let green = kernel.green_on_rule(rule, w)?;
    let regular: f64 = rule
        .nodes()
        .iter()
        .zip(rule.weights())
        .zip(&green)
        .map(|((z, wt), g)| {
            let g = if g.is_finite() { *g } else { 0.0 };
            wt * (f(*z) - fw) * g
        })
        .sum();
    Ok(regular + fw * kernel.g1(w)?)
}
