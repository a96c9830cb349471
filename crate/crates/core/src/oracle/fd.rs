//! Finite-volume reference solver on a polar grid of the unit disk.
//!
//! Nodes sit at `r_i = (i + ½)h_r`, `θ_j = (j + ½)h_θ` with
//! `h_r = 1/(n_r + ½)`, so the unit circle is the ring `i = n_r`. The face at
//! `r = 0` has zero length, which closes the axis without a special node.
//! The singular part of the Green function is split off analytically and
//! only the regular remainder `h` is discretized, with `h = 0` imposed on the
//! outer face. The resulting system is symmetric positive definite and
//! banded (bandwidth `n_θ` in ring-major order).

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarGrid {
    pub n_r: usize,
    pub n_theta: usize,
    pub h_r: f64,
    pub h_theta: f64,
}

impl PolarGrid {
    pub fn new(n_r: usize, n_theta: usize) -> Result<Self> {
        if n_r < 32 || n_theta < 32 {
            return Err(Error::Oracle(format!("grid {n_r}x{n_theta} below 32x32")));
        }
        Ok(Self {
            n_r,
            n_theta,
            h_r: 1.0 / (n_r as f64 + 0.5),
            h_theta: 2.0 * PI / n_theta as f64,
        })
    }

    pub fn radius(&self, i: usize) -> f64 {
        (i as f64 + 0.5) * self.h_r
    }

    pub fn angle(&self, j: usize) -> f64 {
        (j as f64 + 0.5) * self.h_theta
    }

    pub fn center(&self, i: usize, j: usize) -> Complex64 {
        Complex64::from_polar(self.radius(i), self.angle(j))
    }

    fn index(&self, i: usize, j: usize) -> usize {
        i * self.n_theta + j
    }

    fn len(&self) -> usize {
        self.n_r * self.n_theta
    }
}

/// Green function of the unit disk, kept separate from the main library.
fn disk_green(z: Complex64, w: Complex64) -> f64 {
    let one = Complex64::new(1.0, 0.0);
    ((z - w).norm() / (one - w.conj() * z).norm()).ln() / (2.0 * PI)
}

/// Gradient of `disk_green` in `z` as `∂_x + i∂_y`.
fn disk_green_gradient(z: Complex64, w: Complex64) -> Complex64 {
    // g = (1/2π) Re[log(z − w) − log(1 − w̄z)]; ∇ Re F = conj(F').
    let one = Complex64::new(1.0, 0.0);
    let d = one / (z - w) + w.conj() / (one - w.conj() * z);
    d.conj() / (2.0 * PI)
}

fn disk_poisson(w: Complex64, zeta: Complex64) -> f64 {
    (1.0 - w.norm_sqr()) / ((zeta - w).norm_sqr() * 2.0 * PI)
}

/// Symmetric positive definite banded matrix, lower band stored row-wise.
struct Banded {
    n: usize,
    bw: usize,
    band: Vec<f64>,
}

impl Banded {
    fn new(n: usize, bw: usize) -> Self {
        Self {
            n,
            bw,
            band: vec![0.0; n * (bw + 1)],
        }
    }

    /// Adds to entry `(i, j)` with `j ≤ i`.
    fn add(&mut self, i: usize, j: usize, v: f64) {
        let (i, j) = if j > i { (j, i) } else { (i, j) };
        debug_assert!(i - j <= self.bw);
        self.band[i * (self.bw + 1) + (i - j)] += v;
    }

    fn at(&self, i: usize, j: usize) -> f64 {
        self.band[i * (self.bw + 1) + (i - j)]
    }

    /// In-place Cholesky factorization `A = L Lᵀ`.
    fn factor(&mut self) -> Result<()> {
        let bw = self.bw;
        for i in 0..self.n {
            let lo = i.saturating_sub(bw);
            for j in lo..i {
                let start = lo.max(j.saturating_sub(bw));
                let mut s = self.at(i, j);
                for m in start..j {
                    s -= self.at(i, m) * self.at(j, m);
                }
                self.band[i * (bw + 1) + (i - j)] = s / self.at(j, j);
            }
            let mut d = self.at(i, i);
            for m in lo..i {
                d -= self.at(i, m).powi(2);
            }
            if d <= 0.0 || !d.is_finite() {
                return Err(Error::Oracle(format!("matrix not positive definite at row {i}")));
            }
            self.band[i * (bw + 1)] = d.sqrt();
        }
        Ok(())
    }

    fn solve(&self, b: &mut [f64]) {
        let bw = self.bw;
        for i in 0..self.n {
            let lo = i.saturating_sub(bw);
            let mut s = b[i];
            for m in lo..i {
                s -= self.at(i, m) * b[m];
            }
            b[i] = s / self.at(i, i);
        }
        for i in (0..self.n).rev() {
            let hi = (i + bw).min(self.n - 1);
            let mut s = b[i];
            for m in i + 1..=hi {
                s -= self.at(m, i) * b[m];
            }
            b[i] = s / self.at(i, i);
        }
    }
}

/// Regular part of a Green function on a [`PolarGrid`], plus the analytic
/// singular part `g_w / λ(w)`.
#[derive(Debug, Clone)]
pub struct FdSolution {
    pub grid: PolarGrid,
    pub source: Complex64,
    /// Scale of the analytic part (`1/λ(w)`; 1 for Schrödinger).
    pub singular_scale: f64,
    pub regular: Vec<f64>,
}

impl FdSolution {
    /// `g*(z)` with the regular part interpolated bilinearly in `(r, θ)`.
    pub fn value_at(&self, z: Complex64) -> Result<f64> {
        if z.norm() >= 1.0 {
            return Err(Error::Oracle(format!("probe {z} outside the unit disk")));
        }
        if z == self.source {
            return Err(Error::Singularity(z.to_string()));
        }
        Ok(self.singular_scale * disk_green(z, self.source) + self.regular_at(z))
    }

    fn regular_at(&self, z: Complex64) -> f64 {
        let g = &self.grid;
        let r = z.norm();
        let theta = z.arg().rem_euclid(2.0 * PI);
        let x = theta / g.h_theta - 0.5;
        let j0 = x.floor();
        let ft = x - j0;
        let j0 = (j0 as i64).rem_euclid(g.n_theta as i64) as usize;
        let j1 = (j0 + 1) % g.n_theta;
        let ring = |i: usize| (1.0 - ft) * self.regular[g.index(i, j0)] + ft * self.regular[g.index(i, j1)];

        let y = r / g.h_r - 0.5;
        if y < 0.0 {
            let axis = (0..g.n_theta).map(|j| self.regular[g.index(0, j)]).sum::<f64>() / g.n_theta as f64;
            let f = r / g.radius(0);
            return (1.0 - f) * axis + f * ring(0);
        }
        let i0 = y.floor() as usize;
        let fr = y - i0 as f64;
        if i0 + 1 >= g.n_r {
            // Between the last ring and the boundary, where h = 0.
            let f = (r - g.radius(g.n_r - 1)) / g.h_r;
            return (1.0 - f) * ring(g.n_r - 1);
        }
        (1.0 - fr) * ring(i0) + fr * ring(i0 + 1)
    }

    /// Outward normal derivative of `g*` at boundary angle `θ_j`, with the
    /// regular part differentiated by a one-sided quadratic fit.
    pub fn boundary_flux(&self, j: usize) -> f64 {
        let g = &self.grid;
        let zeta = Complex64::from_polar(1.0, g.angle(j));
        let (d1, d2) = (g.h_r, 2.0 * g.h_r);
        let h1 = self.regular[g.index(g.n_r - 1, j)];
        let h2 = self.regular[g.index(g.n_r - 2, j)];
        // h(1 − d) = a d + b d².
        let a = (h1 * d2 * d2 - h2 * d1 * d1) / (d1 * d2 * d2 - d2 * d1 * d1);
        self.singular_scale * disk_poisson(self.source, zeta) - a
    }

    pub fn mean_boundary_flux(&self) -> f64 {
        (0..self.grid.n_theta).map(|j| self.boundary_flux(j)).sum::<f64>() / self.grid.n_theta as f64
    }
}

/// Assembles `−∇·(λ∇h) + V h` with `h = 0` on the unit circle.
fn assemble(grid: &PolarGrid, lambda: &dyn Fn(Complex64) -> f64, potential: &dyn Fn(Complex64) -> f64) -> Banded {
    let (nr, nt) = (grid.n_r, grid.n_theta);
    let mut a = Banded::new(grid.len(), nt);
    for i in 0..nr {
        let r = grid.radius(i);
        for j in 0..nt {
            let c = grid.index(i, j);
            let th = grid.angle(j);
            // Outer radial face.
            let rf = (i + 1) as f64 * grid.h_r;
            let lf = lambda(Complex64::from_polar(rf, th));
            if i + 1 < nr {
                let coef = lf * rf * grid.h_theta / grid.h_r;
                let nb = grid.index(i + 1, j);
                a.add(c, c, coef);
                a.add(nb, nb, coef);
                a.add(nb, c, -coef);
            } else {
                a.add(c, c, lf * rf * grid.h_theta / grid.h_r);
            }
            // Angular face between j and j + 1.
            let jn = (j + 1) % nt;
            let lf = lambda(Complex64::from_polar(r, th + 0.5 * grid.h_theta));
            let coef = lf * grid.h_r / (r * grid.h_theta);
            let nb = grid.index(i, jn);
            a.add(c, c, coef);
            a.add(nb, nb, coef);
            a.add(c, nb, -coef);
            // Reaction term.
            let v = potential(grid.center(i, j));
            a.add(c, c, v * r * grid.h_r * grid.h_theta);
        }
    }
    a
}

/// Green function of `Δ − V` on the unit disk with pole `w`, written as
/// `g_w + h` with `Δh − V h = V g_w`.
pub fn fd_green(grid: &PolarGrid, potential: &dyn Fn(Complex64) -> f64, w: Complex64) -> Result<FdSolution> {
    if w.norm() >= 1.0 {
        return Err(Error::Oracle(format!("source {w} outside the unit disk")));
    }
    let mut a = assemble(grid, &|_| 1.0, potential);
    a.factor()?;
    let mut rhs = vec![0.0; grid.len()];
    for i in 0..grid.n_r {
        for j in 0..grid.n_theta {
            let z = grid.center(i, j);
            let area = grid.radius(i) * grid.h_r * grid.h_theta;
            rhs[grid.index(i, j)] = -potential(z) * disk_green(z, w) * area;
        }
    }
    a.solve(&mut rhs);
    Ok(FdSolution {
        grid: *grid,
        source: w,
        singular_scale: 1.0,
        regular: rhs,
    })
}

/// Green function of `∇·(λ∇)` on the unit disk with pole `w`, written as
/// `g_w/λ(w) + h` with `∇·(λ∇h) = −∇·((λ − λ(w))∇g_w)/λ(w)`; the right side
/// is integrated over cells as face fluxes.
pub fn fd_beltrami_green(grid: &PolarGrid, lambda: &dyn Fn(Complex64) -> f64, w: Complex64) -> Result<FdSolution> {
    if w.norm() >= 1.0 {
        return Err(Error::Oracle(format!("source {w} outside the unit disk")));
    }
    let lw = lambda(w);
    if lw <= 0.0 {
        return Err(Error::Oracle("conductivity must be positive".into()));
    }
    let mut a = assemble(grid, lambda, &|_| 0.0);
    a.factor()?;
    let (nr, nt) = (grid.n_r, grid.n_theta);
    let face_flux = |p: Complex64, normal: Complex64, len: f64| {
        let grad = disk_green_gradient(p, w);
        (lambda(p) - lw) * (grad.conj() * normal).re * len / lw
    };
    let mut rhs = vec![0.0; grid.len()];
    for i in 0..nr {
        let r_in = i as f64 * grid.h_r;
        let r_out = (i + 1) as f64 * grid.h_r;
        let r = grid.radius(i);
        for j in 0..nt {
            let th = grid.angle(j);
            let e = Complex64::from_polar(1.0, th);
            let mut total = face_flux(e * r_out, e, r_out * grid.h_theta);
            if i > 0 {
                total += face_flux(e * r_in, -e, r_in * grid.h_theta);
            }
            for side in [0.5, -0.5] {
                let ang = th + side * grid.h_theta;
                let tangent = Complex64::from_polar(1.0, ang) * Complex64::i() * side.signum();
                total += face_flux(Complex64::from_polar(r, ang), tangent, grid.h_r);
            }
            // Assembled operator is −∇·(λ∇h); its cell integral equals +total.
            rhs[grid.index(i, j)] = total;
        }
    }
    a.solve(&mut rhs);
    Ok(FdSolution {
        grid: *grid,
        source: w,
        singular_scale: 1.0 / lw,
        regular: rhs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn banded_cholesky_solves() {
        let n = 12;
        let bw = 3;
        let mut a = Banded::new(n, bw);
        let mut dense = vec![vec![0.0; n]; n];
        for i in 0..n {
            a.add(i, i, 4.0);
            dense[i][i] = 4.0;
            for k in 1..=bw {
                if i >= k {
                    let v = -0.5 / k as f64;
                    a.add(i, i - k, v);
                    dense[i][i - k] = v;
                    dense[i - k][i] = v;
                }
            }
        }
        let x: Vec<f64> = (0..n).map(|i| (i as f64).sin()).collect();
        let mut b: Vec<f64> = (0..n).map(|i| (0..n).map(|j| dense[i][j] * x[j]).sum()).collect();
        a.factor().unwrap();
        a.solve(&mut b);
        for (u, v) in b.iter().zip(&x) {
            assert!((u - v).abs() < 1e-13);
        }
    }

    #[test]
    fn zero_potential_gives_base_green() {
        let g = PolarGrid::new(32, 32).unwrap();
        let sol = fd_green(&g, &|_| 0.0, Complex64::new(0.2, 0.1)).unwrap();
        assert!(sol.regular.iter().all(|v| v.abs() < 1e-15));
        let z = Complex64::new(-0.3, 0.4);
        assert!((sol.value_at(z).unwrap() - disk_green(z, Complex64::new(0.2, 0.1))).abs() < 1e-15);
    }

    #[test]
    fn constant_conductivity_scales() {
        let g = PolarGrid::new(32, 32).unwrap();
        let w = Complex64::new(0.1, -0.2);
        let sol = fd_beltrami_green(&g, &|_| 1.3, w).unwrap();
        let z = Complex64::new(0.4, 0.4);
        assert!((sol.value_at(z).unwrap() - disk_green(z, w) / 1.3).abs() < 1e-12);
    }

    #[test]
    fn grid_precondition() {
        assert!(matches!(PolarGrid::new(16, 64), Err(Error::Oracle(_))));
    }
}
