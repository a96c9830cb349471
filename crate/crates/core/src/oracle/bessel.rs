use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Modified Bessel function `I₀(x)` by its power series, for `0 ≤ x ≤ 5`.
pub fn bessel_i0(x: f64) -> Result<f64> {
    if !(0.0..=5.0).contains(&x) {
        return Err(Error::Oracle(format!("I0 argument {x} outside [0, 5]")));
    }
    let q = 0.25 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut k = 1.0;
    while term > 1e-16 * sum {
        term *= q / (k * k);
        sum += term;
        k += 1.0;
    }
    Ok(sum)
}

/// Boundary flux `1/(2π I₀(√ε))` of the Green function of `Δ − ε` on the
/// unit disk with pole at the centre.
pub fn bessel_flux(epsilon: f64) -> Result<f64> {
    if epsilon < 0.0 {
        return Err(Error::Oracle(format!("negative epsilon {epsilon}")));
    }
    Ok(1.0 / (2.0 * PI * bessel_i0(epsilon.sqrt())?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_values() {
        assert_eq!(bessel_i0(0.0).unwrap(), 1.0);
        assert!((bessel_i0(1.0).unwrap() - 1.266_065_877_752_008_4).abs() < 1e-15);
        assert!((bessel_flux(0.0).unwrap() - 1.0 / (2.0 * PI)).abs() < 1e-16);
        assert!(bessel_i0(5.5).is_err());
    }

    #[test]
    fn satisfies_modified_bessel_equation() {
        // x y'' + y' − x y = 0.
        let h = 1e-3;
        for x in [0.5, 1.0, 2.5, 4.0] {
            let y = |t: f64| bessel_i0(t).unwrap();
            let d1 = (y(x + h) - y(x - h)) / (2.0 * h);
            let d2 = (y(x + h) - 2.0 * y(x) + y(x - h)) / (h * h);
            assert!((x * d2 + d1 - x * y(x)).abs() < 1e-5);
        }
    }
}
