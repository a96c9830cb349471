//! Closed-form perturbation functions `u` with analytic gradient and Laplacian.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// A smooth real function on the plane with analytic derivatives.
pub trait ScalarField: Sync {
    fn value(&self, z: Complex64) -> f64;
    /// Gradient as `∂_x u + i ∂_y u`.
    fn gradient(&self, z: Complex64) -> Complex64;
    fn laplacian(&self, z: Complex64) -> f64;
}

/// Registry of named perturbations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "lowercase", deny_unknown_fields)]
pub enum Perturbation {
    /// `u ≡ c`.
    Const { c: f64 },
    /// `u = shift + Re z`.
    Re {
        #[serde(default = "default_shift")]
        shift: f64,
    },
    /// `u = |z|²`.
    Abs2,
    /// `u = exp(−|z − center|² / 2σ²)`.
    Gaussian { sigma: f64, center: [f64; 2] },
}

fn default_shift() -> f64 {
    1.0
}

impl Perturbation {
    pub fn constant(c: f64) -> Self {
        Perturbation::Const { c }
    }

    /// `1 + Re z`.
    pub fn re() -> Self {
        Perturbation::Re { shift: 1.0 }
    }

    pub fn label(&self) -> String {
        match self {
            Perturbation::Const { c } => format!("const({c})"),
            Perturbation::Re { shift } => format!("re(shift={shift})"),
            Perturbation::Abs2 => "abs2".into(),
            Perturbation::Gaussian { sigma, center } => {
                format!("gaussian(sigma={sigma}, center=({}, {}))", center[0], center[1])
            }
        }
    }

    /// Whether the function is invariant under rotations about the origin.
    pub fn is_radial(&self) -> bool {
        match self {
            Perturbation::Const { .. } | Perturbation::Abs2 => true,
            Perturbation::Gaussian { center, .. } => center[0] == 0.0 && center[1] == 0.0,
            Perturbation::Re { .. } => false,
        }
    }
}

impl ScalarField for Perturbation {
    fn value(&self, z: Complex64) -> f64 {
        match self {
            Perturbation::Const { c } => *c,
            Perturbation::Re { shift } => shift + z.re,
            Perturbation::Abs2 => z.norm_sqr(),
            Perturbation::Gaussian { sigma, center } => {
                let d = z - Complex64::new(center[0], center[1]);
                (-d.norm_sqr() / (2.0 * sigma * sigma)).exp()
            }
        }
    }

    fn gradient(&self, z: Complex64) -> Complex64 {
        match self {
            Perturbation::Const { .. } => Complex64::new(0.0, 0.0),
            Perturbation::Re { .. } => Complex64::new(1.0, 0.0),
            Perturbation::Abs2 => 2.0 * z,
            Perturbation::Gaussian { sigma, center } => {
                let d = z - Complex64::new(center[0], center[1]);
                -d * (self.value(z) / (sigma * sigma))
            }
        }
    }

    fn laplacian(&self, z: Complex64) -> f64 {
        match self {
            Perturbation::Const { .. } | Perturbation::Re { .. } => 0.0,
            Perturbation::Abs2 => 4.0,
            Perturbation::Gaussian { sigma, center } => {
                let d = z - Complex64::new(center[0], center[1]);
                let s2 = sigma * sigma;
                self.value(z) * (d.norm_sqr() / (s2 * s2) - 2.0 / s2)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn all() -> Vec<Perturbation> {
        vec![
            Perturbation::constant(2.0),
            Perturbation::re(),
            Perturbation::Abs2,
            Perturbation::Gaussian {
                sigma: 0.4,
                center: [0.1, -0.2],
            },
        ]
    }

    proptest! {
        #[test]
        fn derivatives_match_differences(x in -0.8f64..0.8, y in -0.8f64..0.8) {
            let z = Complex64::new(x, y);
            let h = 1e-4;
            for u in all() {
                let ex = Complex64::new(h, 0.0);
                let ey = Complex64::new(0.0, h);
                let gx = (u.value(z + ex) - u.value(z - ex)) / (2.0 * h);
                let gy = (u.value(z + ey) - u.value(z - ey)) / (2.0 * h);
                let g = u.gradient(z);
                prop_assert!((g.re - gx).abs() < 1e-6 && (g.im - gy).abs() < 1e-6);
                let lap = (u.value(z + ex) + u.value(z - ex) + u.value(z + ey) + u.value(z - ey)
                    - 4.0 * u.value(z)) / (h * h);
                prop_assert!((u.laplacian(z) - lap).abs() < 1e-4);
            }
        }
    }

    #[test]
    fn registry_round_trip() {
        for u in all() {
            let text = serde_json::to_string(&u).unwrap();
            let back: Perturbation = serde_json::from_str(&text).unwrap();
            assert_eq!(u, back);
        }
        let re: Perturbation = serde_json::from_str(r#"{"name":"re"}"#).unwrap();
        assert_eq!(re, Perturbation::re());
        assert!(serde_json::from_str::<Perturbation>(r#"{"name":"cubic"}"#).is_err());
    }
}
