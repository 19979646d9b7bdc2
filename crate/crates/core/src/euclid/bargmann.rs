//! The classical coherent-state (heat-kernel) transform on `Rⁿ`:
//! `f ↦ f * p_t` continued to `Cⁿ` through the multiplier integral
//! `(2π)^{-n/2} ∫ f̃(ξ) e^{-t|ξ|²} e^{i⟨ξ,z⟩} dξ`, together with the
//! Gaussian target weight and the isometry diagnostic
//! `‖f‖₂² = (2πt)^{-n/2} ∫_{Cⁿ} |f*p_t(z)|² e^{-|y|²/2t} dx dy`.

use super::field::{inverse_fourier, ScalarField, SpectralField};
use crate::{c64, check::CheckResult, error::Error, Result, C64};
use rayon::prelude::*;
use std::f64::consts::PI;

/// Default overflow guard: reject `|y| > 5√t`.
pub const Y_GUARD_FACTOR: f64 = 5.0;

fn check_guard(t: f64, y: &[f64], guard_factor: f64) -> Result<()> {
    let ynorm: f64 = y.iter().map(|v| v * v).sum::<f64>().sqrt();
    let limit = guard_factor * t.sqrt();
    if ynorm > limit {
        return Err(Error::OverflowGuard {
            what: "|Im z|",
            value: ynorm,
            limit,
        });
    }
    Ok(())
}

/// Evaluate `f * p_t` at a single complex point `z = x + iy`.
pub fn bargmann_rn(spec: &SpectralField, t: f64, z: &[C64]) -> Result<C64> {
    bargmann_rn_guarded(spec, t, z, Y_GUARD_FACTOR)
}

pub fn bargmann_rn_guarded(
    spec: &SpectralField,
    t: f64,
    z: &[C64],
    guard_factor: f64,
) -> Result<C64> {
    assert!(t > 0.0);
    let y: Vec<f64> = z.iter().map(|v| v.im).collect();
    check_guard(t, &y, guard_factor)?;
    let smoothed = spec.multiplied(|xi| {
        let w: f64 = xi.iter().map(|v| v * v).sum();
        c64((-t * w).exp(), 0.0)
    });
    Ok(smoothed.eval_at_complex(z))
}

/// Samples of `x ↦ f * p_t(x + iy)` over the whole spatial grid for a
/// fixed imaginary part, through one modulated inverse transform.
pub fn bargmann_slice(spec: &SpectralField, t: f64, y: &[f64]) -> Result<ScalarField> {
    bargmann_slice_guarded(spec, t, y, Y_GUARD_FACTOR)
}

pub fn bargmann_slice_guarded(
    spec: &SpectralField,
    t: f64,
    y: &[f64],
    guard_factor: f64,
) -> Result<ScalarField> {
    assert!(t > 0.0);
    check_guard(t, y, guard_factor)?;
    let modulated = spec.multiplied(|xi| {
        let w: f64 = xi.iter().map(|v| v * v).sum();
        let dot: f64 = xi.iter().zip(y).map(|(a, b)| a * b).sum();
        c64((-t * w - dot).exp(), 0.0)
    });
    Ok(inverse_fourier(&modulated))
}

/// Gaussian density of the target measure in the imaginary direction:
/// `(2πt)^{-n/2} e^{-|y|²/2t}`, unit mass against Lebesgue `dy`.
pub fn gaussian_weight_mu(n: usize, t: f64, y: &[f64]) -> f64 {
    assert!(t > 0.0);
    let r2: f64 = y.iter().map(|v| v * v).sum();
    (2.0 * PI * t).powf(-(n as f64) / 2.0) * (-r2 / (2.0 * t)).exp()
}

/// Uniform centered y-grid used by the isometry quadrature.
#[derive(Debug, Clone, Copy)]
pub struct YGrid {
    pub extent: f64,
    pub samples: usize,
}

impl YGrid {
    pub fn coords(&self) -> Vec<f64> {
        let h = 2.0 * self.extent / self.samples as f64;
        (0..self.samples)
            .map(|j| (j as f64 - (self.samples / 2) as f64) * h)
            .collect()
    }

    pub fn cell(&self, n: usize) -> f64 {
        (2.0 * self.extent / self.samples as f64).powi(n as i32)
    }
}

/// Both sides of the transform isometry on one field:
/// `lhs = ‖f‖₂²`, `rhs = ∫ |f*p_t(z)|² dμ(z)` by full quadrature over
/// the complex grid (spatial grid × y-grid).
pub fn bargmann_isometry_check(
    f: &ScalarField,
    spec: &SpectralField,
    t: f64,
    y_grid: YGrid,
) -> Result<CheckResult> {
    let n = f.grid.n;
    if y_grid.extent < 6.0 * t.sqrt() {
        return Err(Error::Config(format!(
            "y-grid extent {} below 6√t = {}",
            y_grid.extent,
            6.0 * t.sqrt()
        )));
    }
    let lhs = f.norm_sq();
    let ycoords = y_grid.coords();
    let mut nodes: Vec<Vec<f64>> = Vec::new();
    match n {
        2 => {
            for &a in &ycoords {
                for &b in &ycoords {
                    nodes.push(vec![a, b]);
                }
            }
        }
        3 => {
            for &a in &ycoords {
                for &b in &ycoords {
                    for &c in &ycoords {
                        nodes.push(vec![a, b, c]);
                    }
                }
            }
        }
        _ => unreachable!(),
    }
    let terms: Vec<f64> = nodes
        .par_iter()
        .map(|y| {
            let slice = bargmann_slice_guarded(spec, t, y, f64::INFINITY)
                .expect("guard disabled");
            slice.norm_sq() * gaussian_weight_mu(n, t, y)
        })
        .collect();
    let rhs = terms.iter().sum::<f64>() * y_grid.cell(n);
    Ok(CheckResult::new(lhs, rhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::euclid::field::fourier;
    use crate::euclid::grid::GridSpec;
    use crate::euclid::heat::heat_kernel_rn;

    fn gaussian(grid: GridSpec, s: f64) -> ScalarField {
        // e^{-|x|²/4s}: heat kernel shape with mass (4πs)^{n/2}.
        ScalarField::from_fn(grid, |x| {
            let r2: f64 = x.iter().map(|v| v * v).sum();
            c64((-r2 / (4.0 * s)).exp(), 0.0)
        })
    }

    #[test]
    fn real_restriction_is_heat_convolution() {
        let grid = GridSpec::new(2, 12.0, 64).unwrap();
        let s = 0.8;
        let f = gaussian(grid, s);
        let spec = fourier(&f).unwrap();
        let t = 0.5;
        // f = e^{-|x|²/4s} = (4πs)^{n/2} p_s, so f * p_t = (4πs)^{n/2} p_{s+t}.
        let mass = 4.0 * PI * s;
        for &flat in &[64 * 32 + 32, 64 * 30 + 40, 64 * 45 + 20] {
            let x = grid.point(flat);
            let z = [c64(x[0], 0.0), c64(x[1], 0.0)];
            let v = bargmann_rn(&spec, t, &z).unwrap();
            let expect = mass * heat_kernel_rn(2, s + t, &x[..2]);
            assert!((v - c64(expect, 0.0)).norm() < 1e-10);
        }
    }

    #[test]
    fn gaussian_continuation_closed_form() {
        // f = e^{-|x|²/4s}: f * p_t(z) = (s/(s+t))^{n/2} e^{-z·z/4(s+t)}
        // by completing the square.
        let grid = GridSpec::new(2, 12.0, 64).unwrap();
        let s = 0.8;
        let t = 0.5;
        let f = gaussian(grid, s);
        let spec = fourier(&f).unwrap();
        let z = [c64(1.0, 1.0), c64(0.0, 0.0)];
        let zz = z[0] * z[0] + z[1] * z[1];
        let expect = (s / (s + t)) * (-zz / (4.0 * (s + t))).exp();
        let v = bargmann_rn(&spec, t, &z).unwrap();
        assert!((v - expect).norm() < 1e-10, "{v} vs {expect}");
    }

    #[test]
    fn matches_direct_riemann_sum() {
        // Windowed plane-wave packet against a direct sum of the
        // multiplier integral.
        let grid = GridSpec::new(2, 12.0, 64).unwrap();
        let f = ScalarField::from_fn(grid, |x| {
            let r2: f64 = x.iter().map(|v| v * v).sum();
            c64(0.0, 2.0 * x[0]).exp() * c64((-r2 / 2.0).exp(), 0.0)
        });
        let spec = fourier(&f).unwrap();
        let t = 0.5;
        let z = [c64(0.3, 0.5), c64(-0.2, -0.4)];
        let v = bargmann_rn(&spec, t, &z).unwrap();
        let mut acc = c64(0.0, 0.0);
        for (flat, s) in spec.values.iter().enumerate() {
            let xi = grid.xi_point(flat);
            let w = xi[0] * xi[0] + xi[1] * xi[1];
            let phase = (c64(0.0, 1.0) * (z[0] * xi[0] + z[1] * xi[1])).exp();
            acc += s * c64((-t * w).exp(), 0.0) * phase;
        }
        acc *= grid.xi_cell_volume() / (2.0 * PI);
        assert!((v - acc).norm() < 1e-12);
    }

    #[test]
    fn overflow_guard_trips() {
        let grid = GridSpec::new(2, 12.0, 32).unwrap();
        let f = gaussian(grid, 0.5);
        let spec = fourier(&f).unwrap();
        let z = [c64(0.0, 10.0), c64(0.0, 0.0)];
        assert!(matches!(
            bargmann_rn(&spec, 0.5, &z),
            Err(Error::OverflowGuard { .. })
        ));
    }

    #[test]
    fn mu_weight_values() {
        // n = 2, t = 0.5 at y = 0: 1/π.
        assert!((gaussian_weight_mu(2, 0.5, &[0.0, 0.0]) - 1.0 / PI).abs() < 1e-15);
        // Unit mass and second moment n·t on a y-grid.
        let yg = YGrid {
            extent: 8.0,
            samples: 160,
        };
        let coords = yg.coords();
        let mut mass = 0.0;
        let mut moment = 0.0;
        for &a in &coords {
            for &b in &coords {
                let w = gaussian_weight_mu(2, 0.5, &[a, b]);
                mass += w;
                moment += w * (a * a + b * b);
            }
        }
        mass *= yg.cell(2);
        moment *= yg.cell(2);
        assert!((mass - 1.0).abs() < 1e-12);
        assert!((moment - 2.0 * 0.5).abs() < 1e-10);
    }

    #[test]
    fn zero_field_isometry_is_exact_zero() {
        let grid = GridSpec::new(2, 12.0, 32).unwrap();
        let f = ScalarField::zeros(grid);
        let spec = fourier(&f).unwrap();
        let res = bargmann_isometry_check(
            &f,
            &spec,
            0.5,
            YGrid {
                extent: 5.0,
                samples: 16,
            },
        )
        .unwrap();
        assert_eq!(res.lhs, 0.0);
        assert_eq!(res.rhs, 0.0);
        assert_eq!(res.rel_err, 0.0);
    }
}
