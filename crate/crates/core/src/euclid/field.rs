//! Grid-sampled complex fields and the unitary Fourier transform.
//!
//! The transform pair is the symmetric one,
//! `f̃(ξ) = (2π)^{-n/2} ∫ f(x) e^{-i⟨ξ,x⟩} dx` and
//! `f(x) = (2π)^{-n/2} ∫ f̃(ξ) e^{+i⟨ξ,x⟩} dξ`, discretized on centered
//! grids so that the heat multiplier is exactly `e^{-t|ξ|²}` and grid
//! Plancherel `Σ|f|²hⁿ = Σ|f̃|²Δⁿ` holds identically.

use super::grid::GridSpec;
use crate::{c64, error::Error, Result, C64};
use rustfft::FftPlanner;
use std::f64::consts::PI;

/// Default relative boundary-mass threshold for the aliasing guard.
pub const ALIASING_THRESHOLD: f64 = 1e-12;

/// A complex field sampled on the spatial grid, row-major.
#[derive(Debug, Clone)]
pub struct ScalarField {
    pub grid: GridSpec,
    pub values: Vec<C64>,
}

/// A complex field on the dual frequency grid, row-major.
#[derive(Debug, Clone)]
pub struct SpectralField {
    pub grid: GridSpec,
    pub values: Vec<C64>,
}

impl ScalarField {
    pub fn zeros(grid: GridSpec) -> Self {
        ScalarField {
            grid,
            values: vec![c64(0.0, 0.0); grid.len()],
        }
    }

    /// Sample a function of the spatial point.
    pub fn from_fn<F: Fn(&[f64]) -> C64>(grid: GridSpec, f: F) -> Self {
        let values = (0..grid.len())
            .map(|flat| {
                let p = grid.point(flat);
                f(&p[..grid.n])
            })
            .collect();
        ScalarField { grid, values }
    }

    /// Lebesgue `L²` norm squared, `Σ |f|² hⁿ`.
    pub fn norm_sq(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.grid.cell_volume()
    }

    /// Lebesgue integral `Σ f hⁿ`.
    pub fn integral(&self) -> C64 {
        self.values.iter().sum::<C64>() * self.grid.cell_volume()
    }

    /// Largest |f| on the outermost grid shell relative to the global
    /// maximum; 0 for the zero field.
    pub fn relative_boundary_mass(&self) -> f64 {
        let mut global: f64 = 0.0;
        let mut boundary: f64 = 0.0;
        for (flat, v) in self.values.iter().enumerate() {
            let a = v.norm();
            global = global.max(a);
            if self.grid.on_boundary(flat) {
                boundary = boundary.max(a);
            }
        }
        if global == 0.0 {
            0.0
        } else {
            boundary / global
        }
    }
}

impl SpectralField {
    pub fn zeros(grid: GridSpec) -> Self {
        SpectralField {
            grid,
            values: vec![c64(0.0, 0.0); grid.len()],
        }
    }

    pub fn from_fn<F: Fn(&[f64]) -> C64>(grid: GridSpec, f: F) -> Self {
        let values = (0..grid.len())
            .map(|flat| {
                let p = grid.xi_point(flat);
                f(&p[..grid.n])
            })
            .collect();
        SpectralField { grid, values }
    }

    /// Lebesgue `L²` norm squared on the dual grid, `Σ |f̃|² Δⁿ`.
    pub fn norm_sq(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.grid.xi_cell_volume()
    }

    /// Apply a pointwise multiplier `m(ξ)`.
    pub fn multiplied<F: Fn(&[f64]) -> C64>(&self, m: F) -> SpectralField {
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(flat, v)| {
                let p = self.grid.xi_point(flat);
                v * m(&p[..self.grid.n])
            })
            .collect();
        SpectralField {
            grid: self.grid,
            values,
        }
    }

    /// Evaluate the inverse transform at an arbitrary complex point:
    /// `(2π)^{-n/2} Σ_ξ f̃(ξ) e^{i⟨ξ,z⟩} Δⁿ`, entire in `z`.
    pub fn eval_at_complex(&self, z: &[C64]) -> C64 {
        let n = self.grid.n;
        let nn = self.grid.samples;
        // Per-axis phase tables e^{i ξ_m z_a}.
        let mut phases: Vec<Vec<C64>> = Vec::with_capacity(n);
        for a in 0..n {
            let mut row = Vec::with_capacity(nn);
            for m in 0..nn {
                let xi = self.grid.xi_coord(m);
                row.push((c64(0.0, xi) * z[a]).exp());
            }
            phases.push(row);
        }
        let mut acc = c64(0.0, 0.0);
        match n {
            2 => {
                for i0 in 0..nn {
                    let p0 = phases[0][i0];
                    let base = i0 * nn;
                    let mut inner = c64(0.0, 0.0);
                    for i1 in 0..nn {
                        inner += self.values[base + i1] * phases[1][i1];
                    }
                    acc += p0 * inner;
                }
            }
            3 => {
                for i0 in 0..nn {
                    let p0 = phases[0][i0];
                    for i1 in 0..nn {
                        let p01 = p0 * phases[1][i1];
                        let base = (i0 * nn + i1) * nn;
                        let mut inner = c64(0.0, 0.0);
                        for i2 in 0..nn {
                            inner += self.values[base + i2] * phases[2][i2];
                        }
                        acc += p01 * inner;
                    }
                }
            }
            _ => unreachable!(),
        }
        acc * (2.0 * PI).powf(-(n as f64) / 2.0) * self.grid.xi_cell_volume()
    }

    /// Evaluate at a real point.
    pub fn eval_at(&self, x: &[f64]) -> C64 {
        let z: Vec<C64> = x.iter().map(|v| c64(*v, 0.0)).collect();
        self.eval_at_complex(&z)
    }
}

/// In-place n-dimensional FFT over a row-major hypercube.
fn fft_nd(values: &mut [C64], samples: usize, n: usize, inverse: bool) {
    let mut planner = FftPlanner::new();
    let fft = if inverse {
        planner.plan_fft_inverse(samples)
    } else {
        planner.plan_fft_forward(samples)
    };
    let mut line = vec![c64(0.0, 0.0); samples];
    let total = samples.pow(n as u32);
    for axis in 0..n {
        // stride between consecutive entries along `axis`
        let stride = samples.pow((n - 1 - axis) as u32);
        let lines = total / samples;
        for li in 0..lines {
            // Base offset of this line: expand li over the other axes.
            let block = li / stride;
            let rem = li % stride;
            let base = block * stride * samples + rem;
            for (t, slot) in line.iter_mut().enumerate() {
                *slot = values[base + t * stride];
            }
            fft.process(&mut line);
            for (t, slot) in line.iter().enumerate() {
                values[base + t * stride] = *slot;
            }
        }
    }
}

/// Centered sign flips `(-1)^{j₀+…}` used to shift the DFT origin to
/// the grid center.
fn apply_centered_signs(values: &mut [C64], grid: &GridSpec) {
    for (flat, v) in values.iter_mut().enumerate() {
        let idx = grid.unflatten(flat);
        let s: usize = idx[..grid.n].iter().sum();
        if s & 1 == 1 {
            *v = -*v;
        }
    }
}

/// Forward unitary Fourier transform with the aliasing guard.
pub fn fourier(f: &ScalarField) -> Result<SpectralField> {
    fourier_with_threshold(f, ALIASING_THRESHOLD)
}

pub fn fourier_with_threshold(f: &ScalarField, threshold: f64) -> Result<SpectralField> {
    let mass = f.relative_boundary_mass();
    if mass > threshold {
        return Err(Error::Aliasing {
            boundary: mass,
            threshold,
        });
    }
    Ok(fourier_unchecked(f))
}

/// Forward transform without the boundary-decay check.
pub fn fourier_unchecked(f: &ScalarField) -> SpectralField {
    let grid = f.grid;
    let n = grid.n;
    let nn = grid.samples;
    let mut values = f.values.clone();
    apply_centered_signs(&mut values, &grid);
    fft_nd(&mut values, nn, n, false);
    apply_centered_signs(&mut values, &grid);
    // (-1)^{N/2} per axis from the center offset, times the measure
    // normalization (2π)^{-n/2} hⁿ.
    let half_sign: f64 = if (nn / 2) & 1 == 1 { -1.0 } else { 1.0 };
    let scale = half_sign.powi(n as i32) * (2.0 * PI).powf(-(n as f64) / 2.0)
        * grid.cell_volume();
    for v in values.iter_mut() {
        *v *= scale;
    }
    SpectralField { grid, values }
}

/// Inverse unitary Fourier transform.
pub fn inverse_fourier(f: &SpectralField) -> ScalarField {
    let grid = f.grid;
    let n = grid.n;
    let nn = grid.samples;
    let mut values = f.values.clone();
    apply_centered_signs(&mut values, &grid);
    fft_nd(&mut values, nn, n, true);
    apply_centered_signs(&mut values, &grid);
    let half_sign: f64 = if (nn / 2) & 1 == 1 { -1.0 } else { 1.0 };
    let scale = half_sign.powi(n as i32) * (2.0 * PI).powf(-(n as f64) / 2.0)
        * grid.xi_cell_volume();
    for v in values.iter_mut() {
        *v *= scale;
    }
    ScalarField { grid, values }
}
