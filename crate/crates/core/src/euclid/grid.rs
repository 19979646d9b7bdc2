//! Centered uniform grids on `Rⁿ` and their dual frequency grids.

use crate::{error::Error, Result};
use serde::{Deserialize, Serialize};

/// A symmetric grid `{(j - N/2)·h : 0 ≤ j < N}` per axis with
/// `h = 2·extent/samples`. The induced frequency grid has spacing
/// `Δ = π/extent` and Nyquist frequency `π/h`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    /// Euclidean dimension, 2 or 3.
    pub n: usize,
    /// Half-width of the box per axis.
    pub extent: f64,
    /// Points per axis; a power of two, at least 8.
    pub samples: usize,
}

impl GridSpec {
    pub fn new(n: usize, extent: f64, samples: usize) -> Result<Self> {
        if n != 2 && n != 3 {
            return Err(Error::Config(format!("grid dimension must be 2 or 3, got {n}")));
        }
        if samples < 8 || !samples.is_power_of_two() {
            return Err(Error::Config(format!(
                "samples per axis must be a power of two ≥ 8, got {samples}"
            )));
        }
        if !(extent > 0.0) {
            return Err(Error::Config(format!("grid extent must be positive, got {extent}")));
        }
        Ok(GridSpec { n, extent, samples })
    }

    /// Spacing `h` of the spatial grid.
    pub fn h(&self) -> f64 {
        2.0 * self.extent / self.samples as f64
    }

    /// Spacing of the dual grid.
    pub fn delta(&self) -> f64 {
        std::f64::consts::PI / self.extent
    }

    /// Nyquist frequency `π/h`.
    pub fn xi_max(&self) -> f64 {
        std::f64::consts::PI / self.h()
    }

    /// Total number of grid cells.
    pub fn len(&self) -> usize {
        self.samples.pow(self.n as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Spatial coordinate along one axis for index `j`.
    #[inline]
    pub fn coord(&self, j: usize) -> f64 {
        (j as f64 - (self.samples / 2) as f64) * self.h()
    }

    /// Frequency coordinate along one axis for index `m`.
    #[inline]
    pub fn xi_coord(&self, m: usize) -> f64 {
        (m as f64 - (self.samples / 2) as f64) * self.delta()
    }

    /// All spatial coordinates along one axis.
    pub fn coords(&self) -> Vec<f64> {
        (0..self.samples).map(|j| self.coord(j)).collect()
    }

    /// All frequency coordinates along one axis.
    pub fn xi_coords(&self) -> Vec<f64> {
        (0..self.samples).map(|m| self.xi_coord(m)).collect()
    }

    /// Decompose a flat row-major index into per-axis indices.
    #[inline]
    pub fn unflatten(&self, flat: usize) -> [usize; 3] {
        let nn = self.samples;
        match self.n {
            2 => [flat / nn, flat % nn, 0],
            3 => [flat / (nn * nn), (flat / nn) % nn, flat % nn],
            _ => unreachable!(),
        }
    }

    /// Spatial point for a flat index (unused axes are zero).
    #[inline]
    pub fn point(&self, flat: usize) -> [f64; 3] {
        let idx = self.unflatten(flat);
        let mut out = [0.0; 3];
        for a in 0..self.n {
            out[a] = self.coord(idx[a]);
        }
        out
    }

    /// Frequency point for a flat index (unused axes are zero).
    #[inline]
    pub fn xi_point(&self, flat: usize) -> [f64; 3] {
        let idx = self.unflatten(flat);
        let mut out = [0.0; 3];
        for a in 0..self.n {
            out[a] = self.xi_coord(idx[a]);
        }
        out
    }

    /// Lebesgue volume element of one cell.
    pub fn cell_volume(&self) -> f64 {
        self.h().powi(self.n as i32)
    }

    /// Volume element of one dual-grid cell.
    pub fn xi_cell_volume(&self) -> f64 {
        self.delta().powi(self.n as i32)
    }

    /// True if the flat index touches the outermost shell of the grid.
    pub fn on_boundary(&self, flat: usize) -> bool {
        let idx = self.unflatten(flat);
        (0..self.n).any(|a| idx[a] == 0 || idx[a] == self.samples - 1)
    }
}
