//! Periodic cubic spline through a closed sequence of complex points,
//! parameterized by cumulative chord length.

use num_complex::Complex64;

use crate::quadrature::gauss_legendre;

const SEGMENT_GAUSS: usize = 8;

#[derive(Debug, Clone)]
pub struct PeriodicSpline {
    knots: Vec<f64>,
    values: Vec<Complex64>,
    second: Vec<Complex64>,
    period: f64,
}

impl PeriodicSpline {
    /// Builds the interpolating spline. Needs at least three distinct points.
    pub fn new(points: &[Complex64]) -> Self {
        let n = points.len();
        assert!(n >= 3, "periodic spline needs at least three points");
        let mut knots = Vec::with_capacity(n);
        let mut s = 0.0;
        for k in 0..n {
            knots.push(s);
            s += (points[(k + 1) % n] - points[k]).norm();
        }
        let period = s;
        let h: Vec<f64> = (0..n)
            .map(|k| {
                let next = if k + 1 < n { knots[k + 1] } else { period };
                next - knots[k]
            })
            .collect();

        // h[k-1] M[k-1] + 2 (h[k-1] + h[k]) M[k] + h[k] M[k+1] = rhs[k], cyclic.
        let sub: Vec<f64> = (0..n).map(|k| h[(k + n - 1) % n]).collect();
        let diag: Vec<f64> = (0..n).map(|k| 2.0 * (h[(k + n - 1) % n] + h[k])).collect();
        let sup: Vec<f64> = h.clone();
        let rhs: Vec<Complex64> = (0..n)
            .map(|k| {
                let km = (k + n - 1) % n;
                let kp = (k + 1) % n;
                6.0 * ((points[kp] - points[k]) / h[k] - (points[k] - points[km]) / h[km])
            })
            .collect();
        let second = solve_cyclic(&sub, &diag, &sup, &rhs);
        Self {
            knots,
            values: points.to_vec(),
            second,
            period,
        }
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    fn locate(&self, s: f64) -> (usize, f64, f64) {
        let s = s.rem_euclid(self.period);
        let k = match self
            .knots
            .binary_search_by(|probe| probe.partial_cmp(&s).unwrap())
        {
            Ok(i) => i,
            Err(i) => i - 1,
        };
        let end = if k + 1 < self.knots.len() {
            self.knots[k + 1]
        } else {
            self.period
        };
        (k, s - self.knots[k], end - self.knots[k])
    }

    /// Position, first and second derivative with respect to chord length.
    pub fn eval(&self, s: f64) -> (Complex64, Complex64, Complex64) {
        let (k, x, h) = self.locate(s);
        let n = self.values.len();
        let kp = (k + 1) % n;
        let a = (h - x) / h;
        let b = x / h;
        let (y0, y1) = (self.values[k], self.values[kp]);
        let (m0, m1) = (self.second[k], self.second[kp]);
        let pos = y0 * a + y1 * b + (m0 * (a * a * a - a) + m1 * (b * b * b - b)) * (h * h / 6.0);
        let d1 = (y1 - y0) / h - m0 * ((3.0 * a * a - 1.0) * h / 6.0)
            + m1 * ((3.0 * b * b - 1.0) * h / 6.0);
        let d2 = m0 * a + m1 * b;
        (pos, d1, d2)
    }

    fn segment_integral<F: Fn(f64) -> f64>(&self, k: usize, upto: f64, f: F) -> f64 {
        let (x, w) = gauss_legendre(SEGMENT_GAUSS);
        let a = self.knots[k];
        let half = 0.5 * upto;
        x.iter()
            .zip(&w)
            .map(|(xi, wi)| wi * half * f(a + half * (xi + 1.0)))
            .sum()
    }

    fn segment_end(&self, k: usize) -> f64 {
        if k + 1 < self.knots.len() {
            self.knots[k + 1]
        } else {
            self.period
        }
    }

    /// Cumulative arclength at each knot plus the total length as last entry.
    pub fn arclength_table(&self) -> Vec<f64> {
        let mut table = Vec::with_capacity(self.knots.len() + 1);
        let mut acc = 0.0;
        table.push(0.0);
        for k in 0..self.knots.len() {
            let h = self.segment_end(k) - self.knots[k];
            acc += self.segment_integral(k, h, |s| self.eval(s).1.norm());
            table.push(acc);
        }
        table
    }

    /// Enclosed signed area, `½∮ Im(conj(z) dz)`.
    pub fn signed_area(&self) -> f64 {
        (0..self.knots.len())
            .map(|k| {
                let h = self.segment_end(k) - self.knots[k];
                self.segment_integral(k, h, |s| {
                    let (p, d, _) = self.eval(s);
                    0.5 * (p.conj() * d).im
                })
            })
            .sum()
    }

    /// Points equispaced in arclength, starting at the first knot.
    pub fn resample_arclength(&self, count: usize) -> Vec<Complex64> {
        let table = self.arclength_table();
        let total = *table.last().unwrap();
        let mut out = Vec::with_capacity(count);
        let mut k = 0usize;
        for j in 0..count {
            let target = total * j as f64 / count as f64;
            while k + 1 < self.knots.len() && table[k + 1] <= target {
                k += 1;
            }
            let h = self.segment_end(k) - self.knots[k];
            let local = target - table[k];
            // Newton on the offset within segment k, started from linear guess.
            let seg_len = table[k + 1] - table[k];
            let mut x = if seg_len > 0.0 { h * local / seg_len } else { 0.0 };
            for _ in 0..20 {
                let len = self.segment_integral(k, x, |s| self.eval(s).1.norm());
                let speed = self.eval(self.knots[k] + x).1.norm();
                let dx = (len - local) / speed;
                x = (x - dx).clamp(0.0, h);
                if dx.abs() < 1e-15 * h.max(1.0) {
                    break;
                }
            }
            out.push(self.eval(self.knots[k] + x).0);
        }
        out
    }
}

/// Solves a cyclic tridiagonal system with real coefficients and complex
/// right-hand side by Sherman-Morrison on top of the Thomas algorithm.
fn solve_cyclic(sub: &[f64], diag: &[f64], sup: &[f64], rhs: &[Complex64]) -> Vec<Complex64> {
    let n = diag.len();
    let alpha = sup[n - 1];
    let beta = sub[0];
    let gamma = -diag[0];
    let mut d = diag.to_vec();
    d[0] -= gamma;
    d[n - 1] -= alpha * beta / gamma;

    let x = thomas(sub, &d, sup, rhs);
    let mut u = vec![Complex64::new(0.0, 0.0); n];
    u[0] = Complex64::new(gamma, 0.0);
    u[n - 1] = Complex64::new(alpha, 0.0);
    let z = thomas(sub, &d, sup, &u);
    let fact = (x[0] + x[n - 1] * (beta / gamma)) / (Complex64::new(1.0, 0.0) + z[0] + z[n - 1] * (beta / gamma));
    x.iter().zip(&z).map(|(xi, zi)| xi - fact * zi).collect()
}

fn thomas(sub: &[f64], diag: &[f64], sup: &[f64], rhs: &[Complex64]) -> Vec<Complex64> {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut d = vec![Complex64::new(0.0, 0.0); n];
    c[0] = sup[0] / diag[0];
    d[0] = rhs[0] / diag[0];
    for i in 1..n {
        let m = diag[i] - sub[i] * c[i - 1];
        c[i] = sup[i] / m;
        d[i] = (rhs[i] - d[i - 1] * sub[i]) / m;
    }
    let mut x = vec![Complex64::new(0.0, 0.0); n];
    x[n - 1] = d[n - 1];
    for i in (0..n - 1).rev() {
        x[i] = d[i] - x[i + 1] * c[i];
    }
    x
}
