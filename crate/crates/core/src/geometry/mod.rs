//! Planar Jordan domains with smooth boundary.
//!
//! Three families are supported: the unit disk, images of the disk under a
//! polynomial conformal map `φ(ω) = c₁ω + … + c_mω^m`, and closed marker
//! curves interpolated by a periodic cubic spline. Every domain exposes the
//! same boundary parameterization `t ∈ [0, 2π)`: the polar angle on the disk,
//! the preimage angle for conformal images and normalized chord length for
//! marker curves.

mod spline;

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use spline::PeriodicSpline;

use crate::error::{Error, Result};

/// A boundary node with outward unit normal and trapezoid arclength weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundarySample {
    pub t: f64,
    pub position: Complex64,
    pub normal: Complex64,
    pub ds: f64,
}

#[derive(Debug, Clone)]
pub enum Domain {
    UnitDisk,
    Conformal(ConformalMap),
    Curve(MarkerCurve),
}

impl Domain {
    pub fn conformal(coeffs: Vec<Complex64>) -> Result<Self> {
        Ok(Domain::Conformal(ConformalMap::new(coeffs)?))
    }

    pub fn curve(points: Vec<Complex64>) -> Result<Self> {
        Ok(Domain::Curve(MarkerCurve::new(points)?))
    }

    /// Position, outward normal and speed `|dζ/dt|` at boundary parameter `t`.
    pub fn boundary_frame(&self, t: f64) -> (Complex64, Complex64, f64) {
        match self {
            Domain::UnitDisk => {
                let e = Complex64::from_polar(1.0, t);
                (e, e, 1.0)
            }
            Domain::Conformal(map) => {
                let e = Complex64::from_polar(1.0, t);
                let d = map.derivative(e);
                let tangent = Complex64::i() * e * d;
                (map.eval(e), -Complex64::i() * tangent / tangent.norm(), d.norm())
            }
            Domain::Curve(curve) => curve.frame(t),
        }
    }

    /// `n` boundary nodes equispaced in the boundary parameter.
    pub fn boundary_samples(&self, n: usize) -> Result<Vec<BoundarySample>> {
        if n < 16 || !n.is_multiple_of(2) {
            return Err(Error::Geometry(format!(
                "boundary sample count must be even and at least 16, got {n}"
            )));
        }
        let h = 2.0 * PI / n as f64;
        Ok((0..n)
            .map(|k| {
                let t = h * k as f64;
                let (position, normal, speed) = self.boundary_frame(t);
                BoundarySample {
                    t,
                    position,
                    normal,
                    ds: speed * h,
                }
            })
            .collect())
    }

    /// Whether `z` lies in the open domain.
    pub fn contains(&self, z: Complex64) -> Result<bool> {
        match self {
            Domain::UnitDisk => Ok(z.norm() < 1.0),
            Domain::Conformal(map) => {
                if map.far_outside(z) {
                    return Ok(false);
                }
                Ok(map.inverse(z)?.norm() < 1.0)
            }
            Domain::Curve(curve) => Ok(curve.winding(z) != 0),
        }
    }

    /// Containment in the closed domain with a small relative slack on the
    /// boundary, used to admit boundary evaluation points.
    pub fn contains_closed(&self, z: Complex64) -> Result<bool> {
        const SLACK: f64 = 1e-9;
        match self {
            Domain::UnitDisk => Ok(z.norm() <= 1.0 + SLACK),
            Domain::Conformal(map) => {
                if map.far_outside(z) {
                    return Ok(false);
                }
                Ok(map.inverse(z)?.norm() <= 1.0 + SLACK)
            }
            Domain::Curve(curve) => {
                Ok(curve.winding(z) != 0 || curve.distance_to_polygon(z) < SLACK * curve.scale())
            }
        }
    }

    pub fn area(&self) -> f64 {
        match self {
            Domain::UnitDisk => PI,
            Domain::Conformal(map) => map.area(),
            Domain::Curve(curve) => curve.area(),
        }
    }

    pub fn perimeter(&self) -> f64 {
        match self {
            Domain::Curve(curve) => curve.perimeter(),
            _ => {
                // Trapezoid in t is spectrally accurate for analytic boundaries.
                let n = 512;
                let h = 2.0 * PI / n as f64;
                (0..n).map(|k| self.boundary_frame(h * k as f64).2 * h).sum()
            }
        }
    }

    /// Boundary parameter of a point on (or very near) the boundary.
    pub fn boundary_parameter(&self, zeta: Complex64) -> Result<f64> {
        match self {
            Domain::UnitDisk => {
                if (zeta.norm() - 1.0).abs() > 1e-8 {
                    return Err(Error::Domain(format!("{zeta} (not on the unit circle)")));
                }
                Ok(zeta.arg().rem_euclid(2.0 * PI))
            }
            Domain::Conformal(map) => {
                let w = map.inverse(zeta)?;
                if (w.norm() - 1.0).abs() > 1e-8 {
                    return Err(Error::Domain(format!("{zeta} (not on the boundary)")));
                }
                Ok(w.arg().rem_euclid(2.0 * PI))
            }
            Domain::Curve(curve) => curve.project(zeta),
        }
    }

    pub fn boundary_sample_at(&self, zeta: Complex64) -> Result<BoundarySample> {
        let t = self.boundary_parameter(zeta)?;
        let (position, normal, _) = self.boundary_frame(t);
        Ok(BoundarySample {
            t,
            position,
            normal,
            ds: 0.0,
        })
    }

    pub fn spec(&self) -> DomainSpec {
        match self {
            Domain::UnitDisk => DomainSpec::Disk,
            Domain::Conformal(map) => DomainSpec::Conformal {
                coeffs: map.coeffs.iter().map(|c| [c.re, c.im]).collect(),
            },
            Domain::Curve(curve) => DomainSpec::Curve {
                points: curve.points.iter().map(|p| [p.re, p.im]).collect(),
            },
        }
    }
}

/// Serialized form of a domain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum DomainSpec {
    Disk,
    Conformal { coeffs: Vec<[f64; 2]> },
    Curve { points: Vec<[f64; 2]> },
}

impl TryFrom<DomainSpec> for Domain {
    type Error = Error;

    fn try_from(spec: DomainSpec) -> Result<Self> {
        let to_c = |v: Vec<[f64; 2]>| v.into_iter().map(|[x, y]| Complex64::new(x, y)).collect();
        match spec {
            DomainSpec::Disk => Ok(Domain::UnitDisk),
            DomainSpec::Conformal { coeffs } => Domain::conformal(to_c(coeffs))
                .map_err(|e| Error::Geometry(format!("field `coeffs`: {e}"))),
            DomainSpec::Curve { points } => Domain::curve(to_c(points))
                .map_err(|e| Error::Geometry(format!("field `points`: {e}"))),
        }
    }
}

impl From<&Domain> for DomainSpec {
    fn from(d: &Domain) -> Self {
        d.spec()
    }
}

/// Polynomial conformal map of the closed unit disk.
#[derive(Debug, Clone)]
pub struct ConformalMap {
    coeffs: Vec<Complex64>,
    seeds: Vec<(Complex64, Complex64)>,
    boundary: Vec<Complex64>,
    max_radius: f64,
}

impl ConformalMap {
    /// `coeffs[k]` multiplies `ω^(k+1)`.
    pub fn new(coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::Geometry("conformal map needs at least c₁".into()));
        }
        if coeffs.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::Geometry("non-finite coefficient".into()));
        }
        if coeffs[0].im.abs() > 1e-14 || coeffs[0].re <= 0.0 {
            return Err(Error::Geometry(format!(
                "c₁ must be real and positive, got {}",
                coeffs[0]
            )));
        }
        let mut map = Self {
            coeffs,
            seeds: Vec::new(),
            boundary: Vec::new(),
            max_radius: 0.0,
        };

        let (n_r, n_t) = (32, 256);
        let mut min_deriv = f64::INFINITY;
        for i in 0..=n_r {
            let r = i as f64 / n_r as f64;
            for j in 0..n_t {
                let w = Complex64::from_polar(r, 2.0 * PI * j as f64 / n_t as f64);
                min_deriv = min_deriv.min(map.derivative(w).norm());
            }
        }
        if min_deriv <= 1e-8 {
            return Err(Error::Geometry(format!(
                "φ' vanishes in the closed disk (min |φ'| = {min_deriv:.3e})"
            )));
        }

        let n_b = 1024;
        map.boundary = (0..n_b)
            .map(|j| map.eval(Complex64::from_polar(1.0, 2.0 * PI * j as f64 / n_b as f64)))
            .collect();
        if !polygon_is_simple(&map.boundary) {
            return Err(Error::Geometry("boundary image is not a simple curve".into()));
        }
        map.max_radius = map.boundary.iter().map(|z| z.norm()).fold(0.0, f64::max);

        for i in 0..=12 {
            let r = i as f64 / 12.0;
            let count = if i == 0 { 1 } else { 64 };
            for j in 0..count {
                let w = Complex64::from_polar(r, 2.0 * PI * j as f64 / count as f64);
                map.seeds.push((w, map.eval(w)));
            }
        }
        Ok(map)
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn eval(&self, w: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for c in self.coeffs.iter().rev() {
            acc = (acc + c) * w;
        }
        acc
    }

    pub fn derivative(&self, w: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            acc = acc * w + c * (k + 1) as f64;
        }
        acc
    }

    pub fn second_derivative(&self, w: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (k, c) in self.coeffs.iter().enumerate().skip(1).rev() {
            acc = acc * w + c * ((k + 1) * k) as f64;
        }
        acc
    }

    /// `π Σ k |c_k|²`.
    pub fn area(&self) -> f64 {
        PI * self
            .coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| (k + 1) as f64 * c.norm_sqr())
            .sum::<f64>()
    }

    fn far_outside(&self, z: Complex64) -> bool {
        z.norm() > 1.01 * self.max_radius || (winding(&self.boundary, z) == 0 && distance_to_polygon(&self.boundary, z) > 1e-3 * self.max_radius)
    }

    /// Preimage `φ⁻¹(z)` by Newton iteration from the nearest tabulated seed.
    pub fn inverse(&self, z: Complex64) -> Result<Complex64> {
        let mut w = self
            .seeds
            .iter()
            .min_by(|a, b| (a.1 - z).norm().partial_cmp(&(b.1 - z).norm()).unwrap())
            .map(|s| s.0)
            .unwrap();
        let scale = 1.0 + z.norm();
        for _ in 0..60 {
            let f = self.eval(w) - z;
            if f.norm() < 1e-15 * scale {
                return Ok(w);
            }
            let d = self.derivative(w);
            let mut step = f / d;
            // Damp steps that would leave the region where φ' is controlled.
            if step.norm() > 0.5 {
                step *= 0.5 / step.norm();
            }
            w -= step;
            if step.norm() < 1e-15 * (1.0 + w.norm()) {
                return Ok(w);
            }
        }
        let residual = (self.eval(w) - z).norm();
        if residual < 1e-12 * scale {
            Ok(w)
        } else {
            Err(Error::Geometry(format!(
                "Newton inversion of φ at {z} did not converge (residual {residual:.2e})"
            )))
        }
    }
}

/// Closed curve through marker points.
#[derive(Debug, Clone)]
pub struct MarkerCurve {
    points: Vec<Complex64>,
    spline: PeriodicSpline,
    dense: Vec<Complex64>,
}

impl MarkerCurve {
    pub fn new(points: Vec<Complex64>) -> Result<Self> {
        let n = points.len();
        if n < 8 {
            return Err(Error::Geometry(format!("marker curve needs at least 8 points, got {n}")));
        }
        if points.iter().any(|p| !p.re.is_finite() || !p.im.is_finite()) {
            return Err(Error::Geometry("non-finite marker point".into()));
        }
        let gaps: Vec<f64> = (0..n).map(|k| (points[(k + 1) % n] - points[k]).norm()).collect();
        let mean = gaps.iter().sum::<f64>() / n as f64;
        if let Some((k, g)) = gaps
            .iter()
            .enumerate()
            .find(|(_, g)| **g > 3.0 * mean || **g < mean / 3.0)
        {
            return Err(Error::Geometry(format!(
                "marker spacing {g:.3e} after point {k} is not within a factor 3 of the mean {mean:.3e}"
            )));
        }
        if shoelace(&points) <= 0.0 {
            return Err(Error::Geometry("marker curve must be positively oriented".into()));
        }
        if !polygon_is_simple(&points) {
            return Err(Error::Geometry("marker curve self-intersects".into()));
        }
        let spline = PeriodicSpline::new(&points);
        let refine = 4;
        let dense: Vec<Complex64> = (0..n * refine)
            .map(|j| spline.eval(spline.period() * j as f64 / (n * refine) as f64).0)
            .collect();
        if !polygon_is_simple(&dense) {
            return Err(Error::Geometry("interpolated marker curve self-intersects".into()));
        }
        Ok(Self {
            points,
            spline,
            dense,
        })
    }

    /// Circle of radius `r` about `center` with `n` equispaced markers.
    pub fn circle(center: Complex64, r: f64, n: usize) -> Result<Self> {
        Self::new(
            (0..n)
                .map(|k| center + Complex64::from_polar(r, 2.0 * PI * k as f64 / n as f64))
                .collect(),
        )
    }

    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn spline(&self) -> &PeriodicSpline {
        &self.spline
    }

    fn scale(&self) -> f64 {
        self.spline.period() / (2.0 * PI)
    }

    /// Position, outward normal and `|dζ/dt|` at parameter `t ∈ [0, 2π)`.
    pub fn frame(&self, t: f64) -> (Complex64, Complex64, f64) {
        let factor = self.spline.period() / (2.0 * PI);
        let (p, d, _) = self.spline.eval(t * factor);
        let tangent = d * factor;
        (p, -Complex64::i() * tangent / tangent.norm(), tangent.norm())
    }

    /// Position and `dζ/dt`.
    pub fn position_and_tangent(&self, t: f64) -> (Complex64, Complex64) {
        let factor = self.spline.period() / (2.0 * PI);
        let (p, d, _) = self.spline.eval(t * factor);
        (p, d * factor)
    }

    pub fn area(&self) -> f64 {
        self.spline.signed_area()
    }

    pub fn perimeter(&self) -> f64 {
        *self.spline.arclength_table().last().unwrap()
    }

    pub fn winding(&self, z: Complex64) -> i32 {
        winding(&self.dense, z)
    }

    pub fn distance_to_polygon(&self, z: Complex64) -> f64 {
        distance_to_polygon(&self.dense, z)
    }

    /// Parameter of the boundary point closest to `zeta`.
    pub fn project(&self, zeta: Complex64) -> Result<f64> {
        let m = self.dense.len();
        let (j, _) = self
            .dense
            .iter()
            .enumerate()
            .map(|(j, p)| (j, (p - zeta).norm()))
            .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
            .unwrap();
        let mut t = 2.0 * PI * j as f64 / m as f64;
        for _ in 0..30 {
            let factor = self.spline.period() / (2.0 * PI);
            let (p, d, dd) = self.spline.eval(t * factor);
            let (d, dd) = (d * factor, dd * factor * factor);
            let g = ((p - zeta).conj() * d).re;
            let gp = d.norm_sqr() + ((p - zeta).conj() * dd).re;
            let step = g / gp;
            t -= step;
            if step.abs() < 1e-15 {
                break;
            }
        }
        let (p, _, _) = self.frame(t);
        if (p - zeta).norm() > 1e-6 * self.scale() {
            return Err(Error::Domain(format!("{zeta} (not on the marker curve)")));
        }
        Ok(t.rem_euclid(2.0 * PI))
    }

    /// Boundary samples located at the marker points, with `ds` the mean of
    /// the two adjacent arc lengths.
    pub fn node_samples(&self) -> Vec<BoundarySample> {
        let period = self.spline.period();
        let arcs = self.spline.arclength_table();
        let n = self.points.len();
        (0..n)
            .map(|k| {
                let t = 2.0 * PI * self.spline.knots()[k] / period;
                let (position, normal, _) = self.frame(t);
                let before = arcs[if k == 0 { n } else { k }] - arcs[if k == 0 { n - 1 } else { k - 1 }];
                let after = arcs[k + 1] - arcs[k];
                BoundarySample {
                    t,
                    position,
                    normal,
                    ds: 0.5 * (before + after),
                }
            })
            .collect()
    }

    /// Curve resampled to `count` points equispaced in arclength.
    pub fn resampled(&self, count: usize) -> Result<Self> {
        Self::new(self.spline.resample_arclength(count))
    }
}

fn shoelace(points: &[Complex64]) -> f64 {
    let n = points.len();
    0.5 * (0..n)
        .map(|k| (points[k].conj() * points[(k + 1) % n]).im)
        .sum::<f64>()
}

/// Winding number of a closed polygon about `z`.
pub fn winding(poly: &[Complex64], z: Complex64) -> i32 {
    let n = poly.len();
    let mut wn = 0;
    for k in 0..n {
        let a = poly[k] - z;
        let b = poly[(k + 1) % n] - z;
        let cross = a.re * b.im - a.im * b.re;
        if a.im <= 0.0 {
            if b.im > 0.0 && cross > 0.0 {
                wn += 1;
            }
        } else if b.im <= 0.0 && cross < 0.0 {
            wn -= 1;
        }
    }
    wn
}

fn distance_to_polygon(poly: &[Complex64], z: Complex64) -> f64 {
    let n = poly.len();
    (0..n)
        .map(|k| segment_distance(poly[k], poly[(k + 1) % n], z))
        .fold(f64::INFINITY, f64::min)
}

fn segment_distance(a: Complex64, b: Complex64, z: Complex64) -> f64 {
    let d = b - a;
    let len2 = d.norm_sqr();
    if len2 == 0.0 {
        return (z - a).norm();
    }
    let s = (((z - a) * d.conj()).re / len2).clamp(0.0, 1.0);
    (a + d * s - z).norm()
}

fn cross(a: Complex64, b: Complex64) -> f64 {
    a.re * b.im - a.im * b.re
}

fn segments_cross(p1: Complex64, p2: Complex64, q1: Complex64, q2: Complex64) -> bool {
    let d1 = cross(q2 - q1, p1 - q1);
    let d2 = cross(q2 - q1, p2 - q1);
    let d3 = cross(p2 - p1, q1 - p1);
    let d4 = cross(p2 - p1, q2 - p1);
    (d1 > 0.0) != (d2 > 0.0) && (d3 > 0.0) != (d4 > 0.0) && d1 != 0.0 && d2 != 0.0
}

/// Checks non-adjacent edges pairwise for crossings.
pub fn polygon_is_simple(poly: &[Complex64]) -> bool {
    let n = poly.len();
    // Bounding-box sweep keeps this near linear for well-spaced curves.
    let mut edges: Vec<(usize, f64, f64)> = (0..n)
        .map(|k| {
            let (a, b) = (poly[k], poly[(k + 1) % n]);
            (k, a.re.min(b.re), a.re.max(b.re))
        })
        .collect();
    edges.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap());
    for (idx, &(i, _, xmax)) in edges.iter().enumerate() {
        for &(j, xmin_j, _) in &edges[idx + 1..] {
            if xmin_j > xmax {
                break;
            }
            let adjacent = (i + 1) % n == j || (j + 1) % n == i || i == j;
            if adjacent {
                continue;
            }
            if segments_cross(poly[i], poly[(i + 1) % n], poly[j], poly[(j + 1) % n]) {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn disk_samples() {
        let s = Domain::UnitDisk.boundary_samples(16).unwrap();
        let total: f64 = s.iter().map(|b| b.ds).sum();
        assert!((total - 2.0 * PI).abs() < 1e-14);
        assert!((s[0].position - c(1.0, 0.0)).norm() < 1e-15);
        assert!((s[0].normal - c(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn sample_count_precondition() {
        assert!(Domain::UnitDisk.boundary_samples(4).is_err());
        assert!(Domain::UnitDisk.boundary_samples(17).is_err());
    }

    #[test]
    fn disk_contains() {
        assert!(Domain::UnitDisk.contains(c(0.0, 0.0)).unwrap());
        assert!(!Domain::UnitDisk.contains(c(1.5, 0.0)).unwrap());
    }

    #[test]
    fn conformal_contains_and_inverse() {
        let d = Domain::conformal(vec![c(1.0, 0.0), c(0.1, 0.0)]).unwrap();
        let Domain::Conformal(map) = &d else { unreachable!() };
        let z = map.eval(c(0.5, 0.0));
        assert!(d.contains(z).unwrap());
        assert!(!d.contains(c(3.0, 0.0)).unwrap());
        assert!(!d.contains(map.eval(c(0.0, 1.02))).unwrap());
        let w = c(0.3, -0.6);
        assert!((map.inverse(map.eval(w)).unwrap() - w).norm() < 1e-13);
    }

    #[test]
    fn conformal_rejects_critical_point() {
        // φ'(ω) = 1 + ω vanishes at ω = -1.
        assert!(Domain::conformal(vec![c(1.0, 0.0), c(0.5, 0.0)]).is_err());
        assert!(Domain::conformal(vec![c(-1.0, 0.0)]).is_err());
        assert!(Domain::conformal(vec![c(1.0, 0.1)]).is_err());
    }

    #[test]
    fn normals_point_outward() {
        let d = Domain::conformal(vec![c(1.0, 0.0), c(0.1, 0.05), c(0.0, 0.03)]).unwrap();
        for s in d.boundary_samples(64).unwrap() {
            assert!((s.normal.norm() - 1.0).abs() < 1e-14);
            assert!(!d.contains(s.position + s.normal * 1e-3).unwrap());
            assert!(d.contains(s.position - s.normal * 1e-3).unwrap());
        }
    }

    #[test]
    fn curve_validation() {
        let mut pts: Vec<Complex64> = (0..32)
            .map(|k| Complex64::from_polar(1.0, 2.0 * PI * k as f64 / 32.0))
            .collect();
        assert!(Domain::curve(pts.clone()).is_ok());
        let mut rev = pts.clone();
        rev.reverse();
        assert!(Domain::curve(rev).is_err());
        // Figure-eight style crossing.
        pts.swap(3, 20);
        assert!(matches!(Domain::curve(pts), Err(Error::Geometry(_))));
    }

    #[test]
    fn curve_projection() {
        let curve = MarkerCurve::circle(c(0.2, 0.0), 1.0, 64).unwrap();
        let d = Domain::Curve(curve);
        let s = d.boundary_sample_at(c(0.2, 1.0)).unwrap();
        assert!((s.normal - c(0.0, 1.0)).norm() < 1e-6);
    }

    #[test]
    fn spec_round_trip() {
        let d = Domain::conformal(vec![c(1.0, 0.0), c(0.1, 0.0)]).unwrap();
        let json = serde_json::to_string(&d.spec()).unwrap();
        assert_eq!(json, r#"{"type":"conformal","coeffs":[[1.0,0.0],[0.1,0.0]]}"#);
        let back: DomainSpec = serde_json::from_str(&json).unwrap();
        assert!(Domain::try_from(back).is_ok());
        let disk: DomainSpec = serde_json::from_str(r#"{"type":"disk"}"#).unwrap();
        assert_eq!(disk, DomainSpec::Disk);
    }

    #[test]
    fn bad_spec_names_field() {
        let spec: DomainSpec = serde_json::from_str(r#"{"type":"conformal","coeffs":[[0.0,0.0]]}"#).unwrap();
        let err = Domain::try_from(spec).unwrap_err().to_string();
        assert!(err.contains("coeffs"), "{err}");
    }
}
