//! One-dimensional quadrature for radially symmetric integrals on the unit
//! disk. The radial Green function is `∫₀^{2π} g(r e^{iα}, ρ e^{iθ}) dθ =
//! ln max(r, ρ)`, so the volume potential of a radial density reduces to
//! `(T f)(r) = ∫₀¹ f(ρ) ρ ln max(r, ρ) dρ`.

use crate::quadrature::gauss_legendre;

const PANEL_POINTS: usize = 20;
const PANEL_LEVELS: usize = 50;

/// `∫_a^b f` on panels graded geometrically towards `a`, which resolves
/// logarithmic endpoint singularities.
pub fn graded_integral(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    let (x, w) = gauss_legendre(PANEL_POINTS);
    let len = b - a;
    let mut total = 0.0;
    for k in 0..PANEL_LEVELS {
        let hi = a + len * 0.5f64.powi(k as i32);
        let lo = if k + 1 == PANEL_LEVELS { a } else { a + len * 0.5f64.powi(k as i32 + 1) };
        let (m, h) = (0.5 * (hi + lo), 0.5 * (hi - lo));
        total += x.iter().zip(&w).map(|(t, wt)| wt * h * f(m + h * t)).sum::<f64>();
    }
    total
}

/// `∫_a^b f` with grading towards both ends.
pub fn two_sided_integral(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let m = 0.5 * (a + b);
    graded_integral(f, a, m) + graded_integral(&|x| f(a + b - x), a, m)
}

/// `∫_D f(|z|) dA = 2π ∫₀¹ f(r) r dr`.
pub fn radial_area_integral(f: &dyn Fn(f64) -> f64) -> f64 {
    2.0 * std::f64::consts::PI * two_sided_integral(&|r| f(r) * r, 0.0, 1.0)
}

/// Volume potential `∫_D g(z, x) f(|x|) dA(x)` at `|z| = r`.
pub fn radial_potential(f: &dyn Fn(f64) -> f64, r: f64) -> f64 {
    let inner = if r > 0.0 { r.ln() * two_sided_integral(&|p| f(p) * p, 0.0, r) } else { 0.0 };
    let outer = two_sided_integral(&|p| f(p) * p * p.ln(), r, 1.0);
    inner + outer
}
