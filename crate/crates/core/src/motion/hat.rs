//! The operator-valued Fourier transform
//! `f̂(ξ) = ∫_M f(m) U^ξ_m dm` on the band-limited matrix-coefficient
//! basis `{√d_π φ^π_{ij}}` of `L²(K)`, and the Plancherel identity
//! `∫_M |f|² dm = ∫ ‖f̂(ξ)‖²_HS dξ`.
//!
//! With the induced action `U^ξ_{(x,k)}F(u) = e^{i⟨x,u·ξ⟩}F(k⁻¹u)` and
//! the expansion convention of [`super::PwField`]:
//!
//! `f̂(ξ) e_{πij} = √d_π Σ_a f̃^π_{ai}(-u·ξ) φ^π_{aj}(u)`,
//!
//! so matrix entries need the coefficient transforms evaluated on
//! rotated frequency orbits. [`RotatedBlockTable`] precomputes those
//! per quadrature node through the spectral rotation engine.

use super::{PwField, SpectralPwField};
use crate::compact::{rep_matrix, PwBasis, QuadratureRule};
use crate::{c64, check::CheckResult, error::Error, Result, C64};
use std::collections::BTreeMap;
use std::f64::consts::PI;

/// Truncated matrix of `f̂(ξ)` on the ordered basis, with per-column
/// mass deficits as the truncation report.
#[derive(Debug, Clone)]
pub struct HatOperator {
    pub xi: Vec<f64>,
    pub basis: PwBasis,
    /// Row-major `dim×dim`: `mat[row·dim + col] = ⟨f̂(ξ) e_col, e_row⟩`.
    pub mat: Vec<C64>,
    /// `‖f̂(ξ)e_col‖² - Σ_row |entry|²` ≥ 0: mass escaping the basis.
    pub col_deficit: Vec<f64>,
}

impl HatOperator {
    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    /// Frobenius norm squared of the truncated matrix.
    pub fn hs_norm_sq(&self) -> f64 {
        self.mat.iter().map(|v| v.norm_sqr()).sum()
    }

    /// Largest per-column truncation deficit.
    pub fn max_deficit(&self) -> f64 {
        self.col_deficit.iter().copied().fold(0.0, f64::max)
    }

    pub fn is_zero(&self, tol: f64) -> bool {
        self.mat.iter().all(|v| v.norm() <= tol)
    }
}

/// Per-quadrature-node tables of every coefficient transform evaluated
/// at `-u·ξ` over the whole frequency grid.
pub struct RotatedBlockTable<'a> {
    pub spec: &'a SpectralPwField,
    pub rule: &'a QuadratureRule,
    /// `tables[u][label]`: rotated block, same layout as the source.
    tables: Vec<BTreeMap<i32, Vec<C64>>>,
}

impl<'a> RotatedBlockTable<'a> {
    pub fn new(spec: &'a SpectralPwField, rule: &'a QuadratureRule) -> Self {
        let tables = rule
            .nodes
            .iter()
            .map(|u| spec.rotated(u).blocks)
            .collect();
        RotatedBlockTable { spec, rule, tables }
    }

    /// `f̃^π_{ai}(-u·ξ)` for the grid frequency at `flat`: the rotated
    /// table read at the index-negated cell.
    pub fn value(&self, u_idx: usize, label: i32, a: usize, i: usize, flat: usize) -> C64 {
        let d = self.spec.meta(label).degree;
        let len = self.spec.grid.len();
        match self.tables[u_idx].get(&label) {
            None => c64(0.0, 0.0),
            Some(block) => {
                let neg = negate_cell(&self.spec.grid, flat);
                block[(a * d + i) * len + neg]
            }
        }
    }

    pub fn labels(&self) -> Vec<i32> {
        self.spec.blocks.keys().copied().collect()
    }
}

/// Index of `-ξ` on the centered grid (the extreme `-N/2` row wraps to
/// itself; negligible for spectra that decay at the boundary).
fn negate_cell(grid: &crate::euclid::GridSpec, flat: usize) -> usize {
    let nn = grid.samples;
    let idx = grid.unflatten(flat);
    let mut out = 0usize;
    for a in 0..grid.n {
        out = out * nn + (nn - idx[a]) % nn;
    }
    out
}

/// Assemble the truncated `f̂(ξ)` matrix at a grid frequency cell.
pub fn fourier_hat(
    table: &RotatedBlockTable<'_>,
    basis: &PwBasis,
    flat_xi: usize,
) -> Result<HatOperator> {
    let spec = table.spec;
    if basis.band_limit < spec.cutoff {
        return Err(Error::BandLimit {
            required: spec.cutoff,
            available: basis.band_limit,
        });
    }
    let dim = basis.dim();
    let mut mat = vec![c64(0.0, 0.0); dim * dim];
    let mut col_mass = vec![0.0f64; dim];
    // Columns: only labels present in the field are nonzero.
    let labels = table.labels();
    for (u_idx, (u, w)) in table.rule.iter().enumerate() {
        let basis_vals = basis.eval(u); // √d_γ φ^γ_{pq}(u), basis order
        for &label in &labels {
            let pi = spec.meta(label);
            let d = pi.degree;
            let phi = rep_matrix(&pi, u);
            let scale = (d as f64).sqrt();
            // column offset of this block inside the basis ordering
            let col0 = basis
                .entries
                .iter()
                .position(|(l, i, j)| *l == label && *i == 0 && *j == 0)
                .expect("basis covers field cutoff");
            for i in 0..d {
                for j in 0..d {
                    let col = col0 + i * d + j;
                    // g_col(u) = √d_π Σ_a f̃^π_{ai}(-u·ξ) φ^π_{aj}(u)
                    let mut g = c64(0.0, 0.0);
                    for a in 0..d {
                        g += table.value(u_idx, label, a, i, flat_xi) * phi[a * d + j];
                    }
                    g *= scale;
                    col_mass[col] += w * g.norm_sqr();
                    let gw = g * w;
                    for (row, e_row) in basis_vals.iter().enumerate() {
                        mat[row * dim + col] += gw * e_row.conj();
                    }
                }
            }
        }
    }
    let mut col_deficit = vec![0.0f64; dim];
    for col in 0..dim {
        let captured: f64 = (0..dim).map(|row| mat[row * dim + col].norm_sqr()).sum();
        col_deficit[col] = (col_mass[col] - captured).max(0.0);
    }
    Ok(HatOperator {
        xi: spec.grid.xi_point(flat_xi)[..spec.grid.n].to_vec(),
        basis: basis.clone(),
        mat,
        col_deficit,
    })
}

/// `‖f̂(ξ)‖²_HS` at one grid frequency by quadrature over `K`:
/// `Σ_π d_π Σ_u w_u ‖f̃^π(-u·ξ)‖²_F` (the column `j`-sum collapses by
/// unitarity of `π(u)`).
pub fn hat_hs_norm_sq(table: &RotatedBlockTable<'_>, flat_xi: usize) -> f64 {
    let spec = table.spec;
    let len = spec.grid.len();
    let neg = negate_cell(&spec.grid, flat_xi);
    let mut acc = 0.0;
    for (u_idx, w) in table.rule.weights.iter().enumerate() {
        for (label, block) in &table.tables[u_idx] {
            let d = spec.meta(*label).degree;
            let mut frob = 0.0;
            for slot in 0..d * d {
                frob += block[slot * len + neg].norm_sqr();
            }
            acc += w * d as f64 * frob;
        }
    }
    acc
}

/// Plancherel identity: `lhs = ‖f‖²_{L²(M)}`,
/// `rhs = (2π)^{-n/2} Σ_ξ ‖f̂(ξ)‖²_HS Δⁿ`.
pub fn plancherel_check(f: &PwField, rule: &QuadratureRule) -> Result<CheckResult> {
    if rule.band_limit < f.cutoff {
        return Err(Error::BandLimit {
            required: f.cutoff,
            available: rule.band_limit,
        });
    }
    let lhs = f.norm_sq();
    let spec = f.fourier();
    let table = RotatedBlockTable::new(&spec, rule);
    let n = f.grid.n as f64;
    let mut rhs = 0.0;
    for flat in 0..f.grid.len() {
        rhs += hat_hs_norm_sq(&table, flat);
    }
    rhs *= f.grid.xi_cell_volume() * (2.0 * PI).powf(-n / 2.0);
    Ok(CheckResult::new(lhs, rhs))
}
