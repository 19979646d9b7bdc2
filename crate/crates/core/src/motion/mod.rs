//! Functions on the motion group `M = Rⁿ ⋊ K` stored as Peter-Weyl
//! coefficient fields: `f(x,k) = Σ_π d_π Σ_{ij} f^π_{ij}(x) φ^π_{ij}(k)`
//! with `f^π_{ij}(x) = ∫_K f(x,k) conj(φ^π_{ij}(k)) dk`.
//!
//! Norms on `M` use the normalized measure `dm = (2π)^{-n/2} dx dk`, so
//! `‖f‖² = (2π)^{-n/2} Σ_π d_π Σ_{ij} ‖f^π_{ij}‖²_{L²}` and the heat
//! kernel `ψ_t` has unit mass. The Euclidean factor of `ψ_t` is the
//! `dm`-normalized Gaussian `(2π)^{n/2} p_t`, which makes convolution by
//! `ψ_t` exactly the spectral multiplier `e^{-λ_π t/2} e^{-t|ξ|²}` and
//! the operator Fourier transform of `ψ_t` at `ξ = 0` the diagonal
//! `e^{-λ_π t/2}`.

pub mod hat;

use crate::compact::{
    quadrature, rep_matrix, rep_matrix_ext, ComplexGroupPoint, GroupElement, IrrepMeta,
    QuadratureRule,
};
use crate::euclid::{
    fourier_unchecked, heat_kernel_rn, inverse_fourier, rotate_spectral, GridSpec, ScalarField,
    SpectralField,
};
use crate::{c64, compact::Backend, error::Error, Result, C64};
use std::collections::BTreeMap;
use std::f64::consts::PI;

pub use hat::{plancherel_check, HatOperator, RotatedBlockTable};

/// A point `(z, g) ∈ Cⁿ × G`; `y = 0, H = 0` reduces it to a point of `M`.
#[derive(Debug, Clone)]
pub struct ComplexMotionPoint {
    pub z: Vec<C64>,
    pub g: ComplexGroupPoint,
}

impl ComplexMotionPoint {
    pub fn real(x: &[f64], k: GroupElement) -> Self {
        ComplexMotionPoint {
            z: x.iter().map(|v| c64(*v, 0.0)).collect(),
            g: ComplexGroupPoint::real(k),
        }
    }

    pub fn y(&self) -> Vec<f64> {
        self.z.iter().map(|v| v.im).collect()
    }
}

/// Peter-Weyl coefficient fields over the spatial grid.
///
/// Block storage: label → `d·d·len` complex values laid out as
/// `((i·d + j)·len + cell)` with 0-based matrix indices.
#[derive(Debug, Clone)]
pub struct PwField {
    pub backend: Backend,
    pub grid: GridSpec,
    pub cutoff: u32,
    pub blocks: BTreeMap<i32, Vec<C64>>,
    /// Whether holomorphic evaluation off the real group is permitted
    /// (heat- or Poisson-smoothed fields, or synthetic fields with
    /// certified spectral decay).
    pub extendable: bool,
}

/// The same data after the Euclidean Fourier transform of every
/// coefficient: `f̃^π_{ij}(ξ)` on the dual grid.
#[derive(Debug, Clone)]
pub struct SpectralPwField {
    pub backend: Backend,
    pub grid: GridSpec,
    pub cutoff: u32,
    pub blocks: BTreeMap<i32, Vec<C64>>,
    pub extendable: bool,
}

fn block_index(d: usize, len: usize, i: usize, j: usize, cell: usize) -> usize {
    (i * d + j) * len + cell
}

macro_rules! pw_common {
    ($ty:ident) => {
        impl $ty {
            pub fn empty(backend: Backend, grid: GridSpec, cutoff: u32) -> Self {
                Self {
                    backend,
                    grid,
                    cutoff,
                    blocks: BTreeMap::new(),
                    extendable: false,
                }
            }

            pub fn metas(&self) -> Vec<IrrepMeta> {
                crate::compact::irreps(self.backend, self.cutoff)
            }

            pub fn meta(&self, label: i32) -> IrrepMeta {
                IrrepMeta::new(self.backend, label).expect("valid label")
            }

            /// Ensure a zero block exists and return it mutably.
            pub fn block_mut(&mut self, label: i32) -> &mut Vec<C64> {
                let d = self.meta(label).degree;
                let len = self.grid.len();
                self.blocks
                    .entry(label)
                    .or_insert_with(|| vec![c64(0.0, 0.0); d * d * len])
            }

            pub fn coeff(&self, label: i32, i: usize, j: usize, cell: usize) -> C64 {
                let d = self.meta(label).degree;
                match self.blocks.get(&label) {
                    Some(b) => b[block_index(d, self.grid.len(), i, j, cell)],
                    None => c64(0.0, 0.0),
                }
            }

            pub fn coeff_slice(&self, label: i32, i: usize, j: usize) -> Option<&[C64]> {
                let d = self.meta(label).degree;
                let len = self.grid.len();
                self.blocks
                    .get(&label)
                    .map(|b| &b[(i * d + j) * len..(i * d + j + 1) * len])
            }

            /// Map every coefficient field through `op(label, i, j, values)`.
            pub fn map_blocks<F>(&self, mut op: F) -> Self
            where
                F: FnMut(i32, usize, usize, &[C64]) -> Vec<C64>,
            {
                let len = self.grid.len();
                let mut out = Self::empty(self.backend, self.grid, self.cutoff);
                out.extendable = self.extendable;
                for (label, block) in &self.blocks {
                    let d = self.meta(*label).degree;
                    let mut nb = vec![c64(0.0, 0.0); d * d * len];
                    for i in 0..d {
                        for j in 0..d {
                            let src = &block[(i * d + j) * len..(i * d + j + 1) * len];
                            let mapped = op(*label, i, j, src);
                            nb[(i * d + j) * len..(i * d + j + 1) * len]
                                .copy_from_slice(&mapped);
                        }
                    }
                    out.blocks.insert(*label, nb);
                }
                out
            }

            /// Add another field's coefficients into this one.
            pub fn accumulate(&mut self, other: &Self) {
                assert_eq!(self.grid, other.grid);
                for (label, block) in &other.blocks {
                    let nb = self.block_mut(*label);
                    for (idx, v) in block.iter().enumerate() {
                        nb[idx] += v;
                    }
                }
            }

            pub fn scale(&mut self, s: C64) {
                for block in self.blocks.values_mut() {
                    for v in block.iter_mut() {
                        *v *= s;
                    }
                }
            }

            fn weighted_square_sum(&self) -> f64 {
                let mut acc = 0.0;
                for (label, block) in &self.blocks {
                    let d = self.meta(*label).degree as f64;
                    let s: f64 = block.iter().map(|v| v.norm_sqr()).sum();
                    acc += d * s;
                }
                acc
            }
        }
    };
}

pw_common!(PwField);
pw_common!(SpectralPwField);

impl PwField {
    /// `‖f‖²_{L²(M)}` under `dm = (2π)^{-n/2} dx dk`.
    pub fn norm_sq(&self) -> f64 {
        let n = self.grid.n as f64;
        self.weighted_square_sum() * self.grid.cell_volume() * (2.0 * PI).powf(-n / 2.0)
    }

    /// Transform every coefficient to the dual grid.
    pub fn fourier(&self) -> SpectralPwField {
        let len = self.grid.len();
        let mut out = SpectralPwField::empty(self.backend, self.grid, self.cutoff);
        out.extendable = self.extendable;
        for (label, block) in &self.blocks {
            let d = self.meta(*label).degree;
            let mut nb = vec![c64(0.0, 0.0); d * d * len];
            for slot in 0..d * d {
                let f = ScalarField {
                    grid: self.grid,
                    values: block[slot * len..(slot + 1) * len].to_vec(),
                };
                let spec = fourier_unchecked(&f);
                nb[slot * len..(slot + 1) * len].copy_from_slice(&spec.values);
            }
            out.blocks.insert(*label, nb);
        }
        out
    }

    /// Synthesize the field value at a real point of `M` (grid cell ×
    /// group element).
    pub fn synthesize(&self, cell: usize, k: &GroupElement) -> C64 {
        let len = self.grid.len();
        let mut acc = c64(0.0, 0.0);
        for (label, block) in &self.blocks {
            let pi = self.meta(*label);
            let d = pi.degree;
            let phi = rep_matrix(&pi, k);
            let mut inner = c64(0.0, 0.0);
            for slot in 0..d * d {
                inner += block[slot * len + cell] * phi[slot];
            }
            acc += inner * d as f64;
        }
        acc
    }

    /// Physical-space norm by double quadrature, for cross-checks.
    pub fn norm_sq_physical(&self, rule: &QuadratureRule) -> f64 {
        let n = self.grid.n as f64;
        let mut acc = 0.0;
        for cell in 0..self.grid.len() {
            for (k, w) in rule.iter() {
                acc += w * self.synthesize(cell, k).norm_sqr();
            }
        }
        acc * self.grid.cell_volume() * (2.0 * PI).powf(-n / 2.0)
    }
}

impl SpectralPwField {
    /// `‖f‖²_{L²(M)}` computed on the dual grid.
    pub fn norm_sq(&self) -> f64 {
        let n = self.grid.n as f64;
        self.weighted_square_sum() * self.grid.xi_cell_volume() * (2.0 * PI).powf(-n / 2.0)
    }

    pub fn inverse_fourier(&self) -> PwField {
        let len = self.grid.len();
        let mut out = PwField::empty(self.backend, self.grid, self.cutoff);
        out.extendable = self.extendable;
        for (label, block) in &self.blocks {
            let d = self.meta(*label).degree;
            let mut nb = vec![c64(0.0, 0.0); d * d * len];
            for slot in 0..d * d {
                let spec = SpectralField {
                    grid: self.grid,
                    values: block[slot * len..(slot + 1) * len].to_vec(),
                };
                let f = inverse_fourier(&spec);
                nb[slot * len..(slot + 1) * len].copy_from_slice(&f.values);
            }
            out.blocks.insert(*label, nb);
        }
        out
    }

    /// Apply a real multiplier `m(|ξ|², λ_π)` jointly over frequency and
    /// Casimir spectrum.
    pub fn joint_multiplier<F: Fn(f64, f64) -> f64>(&self, m: F) -> SpectralPwField {
        let len = self.grid.len();
        let nn = self.grid.n;
        let mut out = SpectralPwField::empty(self.backend, self.grid, self.cutoff);
        out.extendable = self.extendable;
        for (label, block) in &self.blocks {
            let pi = self.meta(*label);
            let d = pi.degree;
            let mut nb = block.clone();
            for cell in 0..len {
                let xi = self.grid.xi_point(cell);
                let w: f64 = xi[..nn].iter().map(|v| v * v).sum();
                let factor = m(w, pi.casimir);
                for slot in 0..d * d {
                    nb[slot * len + cell] *= factor;
                }
            }
            out.blocks.insert(*label, nb);
        }
        out
    }

    /// Coefficient fields continued to `x + iy` for fixed `y`, as a
    /// physical-layout field: one modulated inverse transform per
    /// coefficient. Requires extendability when `y ≠ 0`.
    pub fn extension_slice(&self, y: &[f64]) -> Result<PwField> {
        if !self.extendable && y.iter().any(|v| *v != 0.0) {
            return Err(Error::NotExtendable);
        }
        let len = self.grid.len();
        let nn = self.grid.n;
        let mut out = PwField::empty(self.backend, self.grid, self.cutoff);
        out.extendable = self.extendable;
        let damp: Vec<f64> = (0..len)
            .map(|cell| {
                let xi = self.grid.xi_point(cell);
                let dot: f64 = xi[..nn].iter().zip(y).map(|(a, b)| a * b).sum();
                (-dot).exp()
            })
            .collect();
        for (label, block) in &self.blocks {
            let d = self.meta(*label).degree;
            let mut nb = vec![c64(0.0, 0.0); d * d * len];
            for slot in 0..d * d {
                let mut vals = block[slot * len..(slot + 1) * len].to_vec();
                for (cell, v) in vals.iter_mut().enumerate() {
                    *v *= damp[cell];
                }
                let f = inverse_fourier(&SpectralField {
                    grid: self.grid,
                    values: vals,
                });
                nb[slot * len..(slot + 1) * len].copy_from_slice(&f.values);
            }
            out.blocks.insert(*label, nb);
        }
        Ok(out)
    }

    /// Evaluate one coefficient continuation at an arbitrary complex
    /// point.
    pub fn eval_coeff_at(&self, label: i32, i: usize, j: usize, z: &[C64]) -> C64 {
        match self.coeff_slice(label, i, j) {
            None => c64(0.0, 0.0),
            Some(slice) => SpectralField {
                grid: self.grid,
                values: slice.to_vec(),
            }
            .eval_at_complex(z),
        }
    }

    /// Full holomorphic synthesis at `(z, g) ∈ Cⁿ × G`:
    /// `Σ_π d_π Σ_{ij} f^π_{ij}(z) φ^π_{ij}(g)`.
    pub fn synthesize_extended(&self, at: &ComplexMotionPoint) -> Result<C64> {
        let off_real = at.z.iter().any(|v| v.im != 0.0) || at.g.h.0 != 0.0;
        if off_real && !self.extendable {
            return Err(Error::NotExtendable);
        }
        let mut acc = c64(0.0, 0.0);
        for label in self.blocks.keys() {
            let pi = self.meta(*label);
            let d = pi.degree;
            let phi = rep_matrix_ext(&pi, &at.g);
            let mut inner = c64(0.0, 0.0);
            for i in 0..d {
                for j in 0..d {
                    inner += self.eval_coeff_at(*label, i, j, &at.z) * phi[i * d + j];
                }
            }
            acc += inner * d as f64;
        }
        Ok(acc)
    }

    /// Rotate every coefficient field on the dual grid: samples of
    /// `ξ ↦ f̃^π_{ij}(k·ξ)`.
    pub fn rotated(&self, k: &GroupElement) -> SpectralPwField {
        self.map_blocks(|_label, _i, _j, values| {
            rotate_spectral(
                &SpectralField {
                    grid: self.grid,
                    values: values.to_vec(),
                },
                k,
            )
            .values
        })
    }
}

/// Analyze samples `f(x, k)` into Peter-Weyl coefficient fields:
/// `f^π_{ij}(x) = Σ_u w_u f(x, u) conj(φ^π_{ij}(u))`.
pub fn analyze<F>(grid: GridSpec, rule: &QuadratureRule, cutoff: u32, f: F) -> Result<PwField>
where
    F: Fn(usize, &GroupElement) -> C64,
{
    if rule.band_limit < cutoff {
        return Err(Error::BandLimit {
            required: cutoff,
            available: rule.band_limit,
        });
    }
    let backend = rule.backend;
    let len = grid.len();
    let metas = crate::compact::irreps(backend, cutoff);
    let mut out = PwField::empty(backend, grid, cutoff);
    let conj_cache: Vec<Vec<Vec<C64>>> = rule
        .nodes
        .iter()
        .map(|u| {
            metas
                .iter()
                .map(|pi| rep_matrix(pi, u).iter().map(|v| v.conj()).collect())
                .collect()
        })
        .collect();
    for (pidx, pi) in metas.iter().enumerate() {
        let d = pi.degree;
        out.block_mut(pi.label);
        let block = out.blocks.get_mut(&pi.label).unwrap();
        for (uidx, w) in rule.weights.iter().enumerate() {
            let phi = &conj_cache[uidx][pidx];
            for cell in 0..len {
                let sample = f(cell, &rule.nodes[uidx]);
                if sample.norm_sqr() == 0.0 {
                    continue;
                }
                let ws = sample * *w;
                for slot in 0..d * d {
                    block[slot * len + cell] += ws * phi[slot];
                }
            }
        }
    }
    // Drop blocks that only hold quadrature roundoff.
    let global_max = out
        .blocks
        .values()
        .flat_map(|b| b.iter())
        .map(|v| v.norm())
        .fold(0.0, f64::max);
    out.blocks.retain(|_, b| {
        let m = b.iter().map(|v| v.norm()).fold(0.0, f64::max);
        m > 1e-14 * global_max
    });
    Ok(out)
}

/// The heat kernel `ψ_t` on `M` as a Peter-Weyl field: block `(π,i,i)`
/// carries `e^{-λ_π t/2}` times the `dm`-normalized Gaussian
/// `(2π)^{n/2} p_t(x)`; `∫_M ψ_t dm = 1`.
pub fn heat_field(backend: Backend, grid: GridSpec, t: f64, cutoff: u32) -> PwField {
    assert!(t > 0.0);
    let n = grid.n;
    let len = grid.len();
    let scale = (2.0 * PI).powf(n as f64 / 2.0);
    let gauss: Vec<C64> = (0..len)
        .map(|cell| {
            let x = grid.point(cell);
            c64(scale * heat_kernel_rn(n, t, &x[..n]), 0.0)
        })
        .collect();
    let mut out = PwField::empty(backend, grid, cutoff);
    out.extendable = true;
    for pi in crate::compact::irreps(backend, cutoff) {
        let d = pi.degree;
        let damp = (-pi.casimir * t / 2.0).exp();
        let block = out.block_mut(pi.label);
        for i in 0..d {
            for (cell, g) in gauss.iter().enumerate() {
                block[(i * d + i) * len + cell] = damp * g;
            }
        }
    }
    out
}

/// Heat convolution on `M`: blockwise multiplier
/// `e^{-λ_π t/2} e^{-t|ξ|²}`; the result is holomorphically extendable.
pub fn convolve_heat(f: &PwField, t: f64) -> PwField {
    convolve_heat_spectral(&f.fourier(), t).inverse_fourier()
}

/// Spectral version of [`convolve_heat`].
pub fn convolve_heat_spectral(spec: &SpectralPwField, t: f64) -> SpectralPwField {
    assert!(t > 0.0);
    let mut out = spec.joint_multiplier(|w, lam| (-t * w - lam * t / 2.0).exp());
    out.extendable = true;
    out
}

/// Total mass `∫_M f dm` (normalized measure): only the trivial-irrep
/// block contributes.
pub fn mass(f: &PwField) -> C64 {
    let n = f.grid.n as f64;
    match f.blocks.get(&0) {
        None => c64(0.0, 0.0),
        Some(block) => {
            let len = f.grid.len();
            block[..len].iter().sum::<C64>() * f.grid.cell_volume() * (2.0 * PI).powf(-n / 2.0)
        }
    }
}

/// Left translation `f ↦ f(m₀⁻¹ ·)` for `m₀ = (x₀, k₀)`:
/// `f'^π_{ij}(x) = Σ_c conj(φ^π_{ic}(k₀)) f^π_{cj}(k₀⁻¹(x - x₀))`.
pub fn left_translate(f: &PwField, x0: &[f64], k0: &GroupElement) -> PwField {
    let spec = f.fourier();
    let len = f.grid.len();
    let k0_inv = k0.inverse();
    let mut out = PwField::empty(f.backend, f.grid, f.cutoff);
    out.extendable = f.extendable;
    for (label, block) in &spec.blocks {
        let pi = f.meta(*label);
        let d = pi.degree;
        let phik0 = rep_matrix(&pi, k0);
        let mut spatial: Vec<Vec<C64>> = Vec::with_capacity(d * d);
        for c in 0..d {
            for j in 0..d {
                let sf = SpectralField {
                    grid: f.grid,
                    values: block[(c * d + j) * len..(c * d + j + 1) * len].to_vec(),
                };
                let rotated = rotate_spectral(&sf, &k0_inv);
                let shifted = rotated.multiplied(|xi| {
                    let dot: f64 = xi.iter().zip(x0).map(|(a, b)| a * b).sum();
                    c64(0.0, -dot).exp()
                });
                spatial.push(inverse_fourier(&shifted).values);
            }
        }
        let nb = out.block_mut(*label);
        for i in 0..d {
            for j in 0..d {
                for c in 0..d {
                    let w = phik0[i * d + c].conj();
                    let src = &spatial[c * d + j];
                    for cell in 0..len {
                        nb[(i * d + j) * len + cell] += w * src[cell];
                    }
                }
            }
        }
    }
    out
}

/// `-Δ_{Rⁿ}` part of the Laplacian by the grid-step central stencil on
/// synthesized samples.
pub fn fd_euclid_laplacian(f: &PwField, cell: usize, k: &GroupElement) -> C64 {
    let grid = f.grid;
    let n = grid.n;
    let nn = grid.samples;
    let h = grid.h();
    let idx = grid.unflatten(cell);
    let center = f.synthesize(cell, k);
    let mut acc = c64(0.0, 0.0);
    for a in 0..n {
        let mut up = idx;
        let mut dn = idx;
        up[a] = (idx[a] + 1) % nn;
        dn[a] = (idx[a] + nn - 1) % nn;
        let flat = |ix: [usize; 3]| -> usize {
            match n {
                2 => ix[0] * nn + ix[1],
                3 => (ix[0] * nn + ix[1]) * nn + ix[2],
                _ => unreachable!(),
            }
        };
        let plus = f.synthesize(flat(up), k);
        let minus = f.synthesize(flat(dn), k);
        acc -= (plus - center * 2.0 + minus) / (h * h);
    }
    acc
}

/// `-Δ_K` by second differences along the generator flows
/// `s ↦ k·exp(s K_i)`; on a pure matrix coefficient of `π` this reads
/// off `+λ_π` times the value.
pub fn fd_group_laplacian(f: &PwField, cell: usize, k: &GroupElement, step: f64) -> C64 {
    let center = f.synthesize(cell, k);
    let gens: Vec<GroupElement> = match f.backend {
        Backend::U1 => vec![GroupElement::U1 { theta: step }],
        Backend::So3 => vec![
            // exp(s·K) about the y, z and x axes.
            GroupElement::So3 {
                alpha: 0.0,
                beta: step,
                gamma: 0.0,
            },
            GroupElement::So3 {
                alpha: step,
                beta: 0.0,
                gamma: 0.0,
            },
            GroupElement::So3 {
                alpha: 3.0 * PI / 2.0,
                beta: step,
                gamma: PI / 2.0,
            },
        ],
    };
    let mut acc = c64(0.0, 0.0);
    for gen in &gens {
        let plus = f.synthesize(cell, &k.compose(gen));
        let minus = f.synthesize(cell, &k.compose(&gen.inverse()));
        acc -= (plus - center * 2.0 + minus) / (step * step);
    }
    acc
}

/// Full finite-difference Laplacian `Δ = -Δ_{Rⁿ} - Δ_K`.
pub fn fd_laplacian(f: &PwField, cell: usize, k: &GroupElement, step: f64) -> C64 {
    fd_euclid_laplacian(f, cell, k) + fd_group_laplacian(f, cell, k, step)
}

/// Quadrature whose band limit covers a field's cutoff.
pub fn default_rule(f: &PwField) -> QuadratureRule {
    quadrature(f.backend, f.cutoff)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compact::{heat_kernel_k, irreps, matrix_coefficient, CartanVector};

    fn u1_grid() -> GridSpec {
        GridSpec::new(2, 10.0, 32).unwrap()
    }

    fn gaussian(x: &[f64]) -> f64 {
        let r2: f64 = x.iter().map(|v| v * v).sum();
        (-r2 / 2.0).exp()
    }

    fn single_block_u1(grid: GridSpec, label: i32, hermite: bool) -> PwField {
        let rule = quadrature(Backend::U1, label.unsigned_abs());
        let pi = IrrepMeta::new(Backend::U1, label).unwrap();
        analyze(grid, &rule, label.unsigned_abs(), |cell, k| {
            let x = grid.point(cell);
            let profile = if hermite { x[0] } else { 1.0 };
            c64(profile * gaussian(&x[..2]), 0.0) * matrix_coefficient(&pi, 1, 1, k).unwrap()
        })
        .unwrap()
    }

    #[test]
    fn analyze_single_block_picks_schur_constant() {
        let grid = u1_grid();
        let f = single_block_u1(grid, 2, false);
        // Only the label-2 block survives, with coefficient g/d = g.
        assert_eq!(f.blocks.keys().copied().collect::<Vec<_>>(), vec![2]);
        let center = grid.len() / 2 + grid.samples / 2;
        assert!((f.coeff(2, 0, 0, center) - c64(1.0, 0.0)).norm() < 1e-13);
    }

    #[test]
    fn analyze_k_independent_hits_trivial_block() {
        let grid = u1_grid();
        let rule = quadrature(Backend::U1, 2);
        let f = analyze(grid, &rule, 2, |cell, _k| {
            let x = grid.point(cell);
            c64(gaussian(&x[..2]), 0.0)
        })
        .unwrap();
        assert_eq!(f.blocks.keys().copied().collect::<Vec<_>>(), vec![0]);
    }

    #[test]
    fn analyze_synthesize_roundtrip_so3() {
        let grid = GridSpec::new(3, 6.0, 8).unwrap();
        let rule = quadrature(Backend::So3, 2);
        let mut f0 = PwField::empty(Backend::So3, grid, 2);
        let len = grid.len();
        for pi in irreps(Backend::So3, 2) {
            let d = pi.degree;
            let block = f0.block_mut(pi.label);
            for i in 0..d {
                for j in 0..d {
                    for cell in 0..len {
                        let x = grid.point(cell);
                        let g = gaussian(&x[..3]);
                        let re = g * (1.0 + i as f64 - 0.5 * j as f64 + 0.1 * pi.label as f64);
                        let im = g * (0.3 * i as f64 * j as f64 - 0.2);
                        block[(i * d + j) * len + cell] = c64(re, im);
                    }
                }
            }
        }
        let f1 = analyze(grid, &rule, 2, |cell, k| f0.synthesize(cell, k)).unwrap();
        for (label, block) in &f0.blocks {
            let other = &f1.blocks[label];
            let err = block
                .iter()
                .zip(other)
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max);
            assert!(err < 1e-10, "label {label}: roundtrip err {err}");
        }
    }

    #[test]
    fn band_limit_mismatch_rejected() {
        let grid = u1_grid();
        let rule = quadrature(Backend::U1, 1);
        assert!(matches!(
            analyze(grid, &rule, 3, |_, _| c64(0.0, 0.0)),
            Err(Error::BandLimit { .. })
        ));
    }

    #[test]
    fn norm_pythagoras_and_physical_agreement() {
        let grid = u1_grid();
        let rule = quadrature(Backend::U1, 2);
        let f1 = single_block_u1(grid, 1, false);
        let f2 = single_block_u1(grid, -2, true);
        let mut sum = f1.clone();
        sum.cutoff = 2;
        sum.accumulate(&f2);
        assert!(
            (sum.norm_sq() - (f1.norm_sq() + f2.norm_sq())).abs() / sum.norm_sq() < 1e-12
        );
        let a = sum.norm_sq();
        let b = sum.fourier().norm_sq();
        assert!((a - b).abs() / a < 1e-12);
        let c = sum.norm_sq_physical(&rule);
        assert!((a - c).abs() / a < 1e-10, "{a} vs {c}");
    }

    #[test]
    fn heat_field_mass_and_semigroup() {
        let grid = GridSpec::new(2, 10.0, 64).unwrap();
        let (t, s) = (0.4, 0.3);
        let psi_t = heat_field(Backend::U1, grid, t, 6);
        assert!((mass(&psi_t) - c64(1.0, 0.0)).norm() < 1e-12);
        let conv = convolve_heat(&psi_t, s);
        let direct = heat_field(Backend::U1, grid, t + s, 6);
        for (label, block) in &direct.blocks {
            let other = &conv.blocks[label];
            let err = block
                .iter()
                .zip(other)
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max);
            assert!(err < 1e-10, "label {label}: semigroup err {err}");
        }
    }

    #[test]
    fn heat_field_flattens_at_large_time() {
        let grid = u1_grid();
        let psi = heat_field(Backend::U1, grid, 40.0, 6);
        // Non-trivial K-blocks decay like e^{-λt/2}.
        for (label, block) in &psi.blocks {
            if *label == 0 {
                continue;
            }
            let m: f64 = block.iter().map(|v| v.norm()).fold(0.0, f64::max);
            assert!(m < 1e-8, "label {label} not flat: {m}");
        }
    }

    #[test]
    fn heat_field_positivity_improves_with_cutoff() {
        let grid = GridSpec::new(2, 10.0, 16).unwrap();
        let worst_neg = |cutoff: u32| -> f64 {
            let psi = heat_field(Backend::U1, grid, 1.0, cutoff);
            let rule = quadrature(Backend::U1, cutoff.max(8));
            let mut worst = 0.0f64;
            for cell in (0..grid.len()).step_by(7) {
                for (k, _) in rule.iter() {
                    let v = psi.synthesize(cell, k);
                    assert!(v.im.abs() < 1e-12);
                    worst = worst.min(v.re);
                }
            }
            worst
        };
        let coarse = worst_neg(2);
        let fine = worst_neg(9);
        assert!(fine >= coarse - 1e-15);
        assert!(fine > -1e-10, "heat kernel negativity {fine}");
    }

    #[test]
    fn convolve_heat_diagonal_on_single_block() {
        let grid = u1_grid();
        let f = single_block_u1(grid, 1, false);
        let smoothed = convolve_heat(&f, 0.5);
        assert!(smoothed.extendable);
        assert_eq!(smoothed.blocks.keys().copied().collect::<Vec<_>>(), vec![1]);
    }

    #[test]
    fn brute_force_group_convolution_oracle() {
        let grid = GridSpec::new(2, 8.0, 32).unwrap();
        let t = 0.5;
        let f = single_block_u1(grid, 1, false);
        let fast = convolve_heat(&f, t);
        let cutoff_k = 8;
        let krule = quadrature(Backend::U1, cutoff_k);
        for &(cell, theta) in &[(32 * 16 + 16, 0.0), (32 * 16 + 20, 1.1), (32 * 12 + 16, 2.7)] {
            let k = GroupElement::U1 { theta };
            let x = grid.point(cell);
            let mut acc = c64(0.0, 0.0);
            for cell2 in 0..grid.len() {
                let xp = grid.point(cell2);
                let dx = [x[0] - xp[0], x[1] - xp[1]];
                for (kp, w) in krule.iter() {
                    let kp_inv = kp.inverse();
                    let rot = kp_inv.apply(&dx);
                    // ψ_t = (2π)^{n/2} p_t · q_t pointwise.
                    let p = (2.0 * PI) * heat_kernel_rn(2, t, &rot);
                    let q = heat_kernel_k(
                        t,
                        &ComplexGroupPoint::real(kp_inv.compose(&k)),
                        cutoff_k,
                    )
                    .value;
                    acc += w * f.synthesize(cell2, kp) * p * q;
                }
            }
            // dm' = (2π)^{-n/2} dx' dk'
            acc *= grid.cell_volume() / (2.0 * PI);
            let expect = fast.synthesize(cell, &k);
            assert!(
                (acc - expect).norm() < 1e-6,
                "cell {cell}, θ = {theta}: {acc} vs {expect}"
            );
        }
    }

    #[test]
    fn extension_requires_flag() {
        let grid = u1_grid();
        let f = single_block_u1(grid, 1, false);
        let spec = f.fourier();
        let at = ComplexMotionPoint {
            z: vec![c64(0.0, 0.3), c64(0.0, 0.0)],
            g: ComplexGroupPoint::real(GroupElement::identity(Backend::U1)),
        };
        assert!(matches!(
            spec.synthesize_extended(&at),
            Err(Error::NotExtendable)
        ));
        let real_at =
            ComplexMotionPoint::real(&grid.point(100)[..2], GroupElement::U1 { theta: 0.9 });
        let v = spec.synthesize_extended(&real_at).unwrap();
        let direct = f.synthesize(100, &GroupElement::U1 { theta: 0.9 });
        assert!((v - direct).norm() < 1e-11);
    }

    #[test]
    fn extended_synthesis_matches_per_block_continuation() {
        let grid = u1_grid();
        let f = single_block_u1(grid, 2, false);
        let smoothed = convolve_heat(&f, 0.5);
        let spec = smoothed.fourier();
        let at = ComplexMotionPoint {
            z: vec![c64(0.4, 0.2), c64(-0.1, -0.3)],
            g: ComplexGroupPoint {
                k: GroupElement::U1 { theta: 1.3 },
                h: CartanVector(0.2),
            },
        };
        let v = spec.synthesize_extended(&at).unwrap();
        let coeff = spec.eval_coeff_at(2, 0, 0, &at.z);
        let pi = IrrepMeta::new(Backend::U1, 2).unwrap();
        let phi = crate::compact::matrix_coefficient_ext(&pi, 1, 1, &at.g).unwrap();
        assert!((v - coeff * phi).norm() < 1e-10);
    }

    #[test]
    fn laplacian_multiplier_consistency() {
        // The spectral multiplier |ξ|² + λ_π matches the finite
        // difference Δ = -Δ_Rⁿ - Δ_K at second order in the spacing:
        // halving h cuts the residual by ~4 (the K-step is Richardson
        // extrapolated away first).
        let residual = |samples: usize| -> f64 {
            let grid = GridSpec::new(2, 10.0, samples).unwrap();
            let f = single_block_u1(grid, 2, false);
            let spec = f.fourier();
            let lap = spec.joint_multiplier(|w, lam| w + lam).inverse_fourier();
            let cell = grid.len() / 2 + grid.samples / 2 + samples / 16;
            let k = GroupElement::U1 { theta: 0.7 };
            let expect = lap.synthesize(cell, &k);
            let c1 = fd_laplacian(&f, cell, &k, 1e-3);
            let c2 = fd_laplacian(&f, cell, &k, 5e-4);
            let extrap = (c2 * 4.0 - c1) / 3.0;
            (extrap - expect).norm() / expect.norm()
        };
        let coarse = residual(64);
        let fine = residual(128);
        assert!(fine < 2e-3, "residual at h/2: {fine}");
        assert!(fine < coarse / 2.5, "not second order: {coarse} -> {fine}");
    }

    #[test]
    fn so3_group_laplacian_reads_casimir() {
        // -Δ_K on a pure matrix coefficient of π reads off +λ_π.
        let grid = GridSpec::new(3, 6.0, 8).unwrap();
        let rule = quadrature(Backend::So3, 2);
        for label in 1..=2i32 {
            let pi = IrrepMeta::new(Backend::So3, label).unwrap();
            let f = analyze(grid, &rule, 2, |cell, k| {
                let x = grid.point(cell);
                c64(gaussian(&x[..3]), 0.0) * matrix_coefficient(&pi, 2, label as usize + 2, k).unwrap()
            })
            .unwrap();
            let cell = grid.len() / 2 + grid.samples * grid.samples / 2 + grid.samples / 2;
            let k = GroupElement::So3 {
                alpha: 0.4,
                beta: 0.9,
                gamma: 1.7,
            };
            let value = f.synthesize(cell, &k);
            let c1 = fd_group_laplacian(&f, cell, &k, 2e-3);
            let c2 = fd_group_laplacian(&f, cell, &k, 1e-3);
            let extrap = (c2 * 4.0 - c1) / 3.0;
            let lam = pi.casimir;
            assert!(
                (extrap - value * lam).norm() / (value.norm() * lam) < 1e-5,
                "l = {label}: {extrap} vs λ·f = {}",
                value * lam
            );
        }
    }

    #[test]
    fn mass_of_non_trivial_blocks_is_zero() {
        let grid = u1_grid();
        let f = single_block_u1(grid, 1, false);
        assert!(mass(&f).norm() < 1e-14);
    }

    #[test]
    fn left_translation_matches_pointwise() {
        let grid = GridSpec::new(2, 10.0, 64).unwrap();
        let rule = quadrature(Backend::U1, 2);
        let pi = IrrepMeta::new(Backend::U1, -1).unwrap();
        let f = analyze(grid, &rule, 2, |cell, k| {
            let x = grid.point(cell);
            c64(gaussian(&x[..2]) * (1.0 + 0.3 * x[0]), 0.0)
                * matrix_coefficient(&pi, 1, 1, k).unwrap()
        })
        .unwrap();
        let x0 = [0.8, -0.5];
        let k0 = GroupElement::U1 { theta: 1.1 };
        let g = left_translate(&f, &x0, &k0);
        let k0_inv = k0.inverse();
        let spec = f.fourier();
        for &(cell, theta) in &[(64 * 32 + 32, 0.4), (64 * 30 + 36, 2.0)] {
            let x = grid.point(cell);
            let shifted = [x[0] - x0[0], x[1] - x0[1]];
            let arg = k0_inv.apply(&shifted);
            let at = ComplexMotionPoint::real(&arg, k0_inv.compose(&GroupElement::U1 { theta }));
            let expect = spec.synthesize_extended(&at).unwrap();
            let got = g.synthesize(cell, &GroupElement::U1 { theta });
            assert!((got - expect).norm() < 1e-9, "{got} vs {expect}");
        }
    }
}
