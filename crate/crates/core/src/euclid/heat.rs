//! Gaussian heat kernel on `Rⁿ` and the heat semigroup as a Fourier
//! multiplier.

use super::field::{fourier, inverse_fourier, ScalarField, SpectralField};
use crate::{Result, C64};
use std::f64::consts::PI;

/// `p_t(x) = (4πt)^{-n/2} e^{-|x|²/4t}`, unit mass against Lebesgue
/// measure; convolution with it is the multiplier `e^{-t|ξ|²}`.
pub fn heat_kernel_rn(n: usize, t: f64, x: &[f64]) -> f64 {
    assert!(t > 0.0, "heat time must be positive");
    let r2: f64 = x.iter().map(|v| v * v).sum();
    (4.0 * PI * t).powf(-(n as f64) / 2.0) * (-r2 / (4.0 * t)).exp()
}

/// Apply the heat multiplier `e^{-t|ξ|²}` on the dual grid.
pub fn heat_multiplier(spec: &SpectralField, t: f64) -> SpectralField {
    assert!(t > 0.0);
    spec.multiplied(|xi| {
        let w: f64 = xi.iter().map(|v| v * v).sum();
        C64::new((-t * w).exp(), 0.0)
    })
}

/// Heat-smooth a spatial field: `f * p_t` through the spectral route.
pub fn convolve_heat_rn(f: &ScalarField, t: f64) -> Result<ScalarField> {
    let spec = fourier(f)?;
    Ok(inverse_fourier(&heat_multiplier(&spec, t)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::euclid::grid::GridSpec;
    use crate::{c64, euclid::field::fourier_unchecked};

    #[test]
    fn kernel_value_and_mass() {
        // n = 2, t = 0.5 at the origin: 1/(2π).
        let v = heat_kernel_rn(2, 0.5, &[0.0, 0.0]);
        assert!((v - 1.0 / (2.0 * PI)).abs() < 1e-15);
        // Unit mass against Lebesgue measure.
        let grid = GridSpec::new(2, 10.0, 128).unwrap();
        let f = ScalarField::from_fn(grid, |x| c64(heat_kernel_rn(2, 0.5, x), 0.0));
        assert!((f.integral().re - 1.0).abs() < 1e-12);
        assert!(f.values.iter().all(|v| v.re > 0.0));
    }

    #[test]
    fn semigroup_on_grid() {
        let grid = GridSpec::new(2, 12.0, 64).unwrap();
        let p = |t: f64| ScalarField::from_fn(grid, |x| c64(heat_kernel_rn(2, t, x), 0.0));
        let lhs = convolve_heat_rn(&p(0.4), 0.7).unwrap();
        let rhs = p(1.1);
        let err = lhs
            .values
            .iter()
            .zip(&rhs.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(err < 1e-10, "semigroup deviation {err}");
    }

    #[test]
    fn multiplier_is_exact_heat_convolution() {
        // Spectral product oracle: two successive multipliers equal one.
        let grid = GridSpec::new(2, 10.0, 32).unwrap();
        let f = ScalarField::from_fn(grid, |x| {
            c64((-x[0] * x[0] - x[1] * x[1]).exp(), 0.0)
        });
        let spec = fourier_unchecked(&f);
        let a = heat_multiplier(&heat_multiplier(&spec, 0.3), 0.2);
        let b = heat_multiplier(&spec, 0.5);
        let err = a
            .values
            .iter()
            .zip(&b.values)
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max);
        assert!(err < 1e-15);
    }
}
