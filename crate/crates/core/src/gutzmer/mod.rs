//! Gutzmer identities on `K` and on `M`, the Poisson semigroup
//! `e^{-tΔ^{1/2}}`, its inversion, and the holomorphy-domain
//! diagnostics with the growth constants `(a, M, N)`.
//!
//! The Gutzmer identity on `M` used here is
//!
//! `∫∫∫ |f(x+iy, k₁e^{iH}k₂)|² dk₁ dk₂ dx =
//!  Σ_π Σ_{ij} (∫ |f̃^π_{ij}(ξ)|² e^{-2⟨ξ,y⟩} dξ) χ_π(exp 2iH)`,
//!
//! which at `y = 0, H = 0` is Plancherel (`χ_π(e) = d_π` supplies the
//! degree factor of the Peter-Weyl norm).

use crate::compact::{
    cartan_sphere_rule, character_ext, rep_exp_ih_diagonal, rep_matrix, Backend, CartanVector,
    GroupElement, IrrepMeta, QuadratureRule,
};
use crate::motion::SpectralPwField;
use crate::{c64, check::CheckResult, error::Error, Result, C64};
use rayon::prelude::*;
use std::collections::BTreeMap;
use std::f64::consts::PI;

/// The tube-like domain `{(z,g) : |Im z| < t, |H| < r}` in `Cⁿ × G`.
#[derive(Debug, Clone, Copy)]
pub struct GutzmerDomain {
    pub t: f64,
    pub r: f64,
}

impl GutzmerDomain {
    pub fn new(t: f64, r: f64) -> Self {
        assert!(t > 0.0 && r > 0.0);
        GutzmerDomain { t, r }
    }

    pub fn contains(&self, y: &[f64], h: f64) -> bool {
        let ynorm: f64 = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        ynorm < self.t && h.abs() < self.r
    }
}

/// A band-limited function on `K` stored by its Peter-Weyl coefficient
/// matrices `f^π_{ij}` (no spatial grid).
#[derive(Debug, Clone)]
pub struct KCoeffs {
    pub backend: Backend,
    pub cutoff: u32,
    /// label → `d×d` row-major coefficient matrix.
    pub blocks: BTreeMap<i32, Vec<C64>>,
}

impl KCoeffs {
    pub fn empty(backend: Backend, cutoff: u32) -> Self {
        KCoeffs {
            backend,
            cutoff,
            blocks: BTreeMap::new(),
        }
    }

    /// A single normalized matrix coefficient `√d_π φ^π_{ij}`
    /// (0-based indices).
    pub fn normalized_coefficient(backend: Backend, label: i32, i: usize, j: usize) -> Self {
        let pi = IrrepMeta::new(backend, label).expect("valid label");
        let d = pi.degree;
        let mut block = vec![c64(0.0, 0.0); d * d];
        // f = √d φ^π_ij has PW coefficient f^π_ij = 1/√d.
        block[i * d + j] = c64(1.0 / (d as f64).sqrt(), 0.0);
        let mut out = KCoeffs::empty(backend, label.unsigned_abs());
        out.blocks.insert(label, block);
        out
    }

    /// `‖f‖²_{L²(K)} = Σ_π d_π Σ_{ij} |f^π_{ij}|²`.
    pub fn norm_sq(&self) -> f64 {
        self.blocks
            .iter()
            .map(|(label, b)| {
                let d = IrrepMeta::new(self.backend, *label).unwrap().degree as f64;
                d * b.iter().map(|v| v.norm_sqr()).sum::<f64>()
            })
            .sum()
    }

    /// Evaluate the holomorphic extension at `k₁·exp(iH)·k₂`.
    pub fn eval_three_factor(&self, k1: &GroupElement, h: f64, k2: &GroupElement) -> C64 {
        let mut acc = c64(0.0, 0.0);
        for (label, block) in &self.blocks {
            let pi = IrrepMeta::new(self.backend, *label).unwrap();
            let d = pi.degree;
            let m = crate::compact::rep_matrix_three_factor(&pi, k1, h, k2);
            let mut inner = c64(0.0, 0.0);
            for slot in 0..d * d {
                inner += block[slot] * m[slot];
            }
            acc += inner * d as f64;
        }
        acc
    }
}

/// Gutzmer identity on `K`:
/// `∫∫ |f(k₁ exp(iH) k₂)|² dk₁ dk₂ = Σ_π ‖f̂(π)‖²_HS χ_π(exp 2iH)`,
/// the left side by double quadrature of the extension, the right side
/// by the character series (`‖f̂(π)‖²_HS = Σ_{ij} |f^π_{ij}|²`).
pub fn gutzmer_k_check(f: &KCoeffs, h: f64, rule: &QuadratureRule) -> Result<CheckResult> {
    if rule.band_limit < f.cutoff {
        return Err(Error::BandLimit {
            required: f.cutoff,
            available: rule.band_limit,
        });
    }
    // lhs: precompute per k₂ the contracted matrices G_π = E_H-weighted
    // f^π·D(k₂)ᵀ so each (k₁,k₂) pair costs Σ_π d_π².
    let metas: Vec<IrrepMeta> = f
        .blocks
        .keys()
        .map(|l| IrrepMeta::new(f.backend, *l).unwrap())
        .collect();
    let exp_diag: Vec<Vec<f64>> = metas.iter().map(|pi| rep_exp_ih_diagonal(pi, h)).collect();
    // G_π(k₂)[i][a] = E_a Σ_j f^π_{ij} D(k₂)_{aj}
    let per_k2: Vec<Vec<Vec<C64>>> = rule
        .nodes
        .iter()
        .map(|k2| {
            metas
                .iter()
                .zip(&exp_diag)
                .map(|(pi, diag)| {
                    let d = pi.degree;
                    let dm = rep_matrix(pi, k2);
                    let block = &f.blocks[&pi.label];
                    let mut g = vec![c64(0.0, 0.0); d * d];
                    for i in 0..d {
                        for a in 0..d {
                            let mut acc = c64(0.0, 0.0);
                            for j in 0..d {
                                acc += block[i * d + j] * dm[a * d + j];
                            }
                            g[i * d + a] = acc * diag[a];
                        }
                    }
                    g
                })
                .collect()
        })
        .collect();
    let lhs: f64 = rule
        .nodes
        .par_iter()
        .enumerate()
        .map(|(i1, k1)| {
            let w1 = rule.weights[i1];
            let d1: Vec<Vec<C64>> = metas.iter().map(|pi| rep_matrix(pi, k1)).collect();
            let mut acc = 0.0;
            for (i2, w2) in rule.weights.iter().enumerate() {
                let mut value = c64(0.0, 0.0);
                for (pidx, pi) in metas.iter().enumerate() {
                    let d = pi.degree;
                    let mut inner = c64(0.0, 0.0);
                    for slot in 0..d * d {
                        inner += d1[pidx][slot] * per_k2[i2][pidx][slot];
                    }
                    value += inner * d as f64;
                }
                acc += w1 * w2 * value.norm_sqr();
            }
            acc
        })
        .sum();
    // rhs: character series.
    let mut rhs = 0.0;
    for (label, block) in &f.blocks {
        let pi = IrrepMeta::new(f.backend, *label).unwrap();
        let hs: f64 = block.iter().map(|v| v.norm_sqr()).sum();
        rhs += hs * character_ext(&pi, &CartanVector(h));
    }
    Ok(CheckResult::new(lhs, rhs))
}

/// Gutzmer identity on `M` at displacement `(y, H)`: the left side by
/// full quadrature (`x`-grid × double `K`-quadrature of the extension),
/// the right side by the weighted spectral series. `dm`-normalized.
pub fn gutzmer_m_check(
    spec: &SpectralPwField,
    y: &[f64],
    h: f64,
    rule: &QuadratureRule,
) -> Result<CheckResult> {
    if !spec.extendable {
        return Err(Error::NotExtendable);
    }
    if rule.band_limit < spec.cutoff {
        return Err(Error::BandLimit {
            required: spec.cutoff,
            available: rule.band_limit,
        });
    }
    let slice = spec.extension_slice(y)?;
    let len = spec.grid.len();
    let n = spec.grid.n;
    let metas: Vec<IrrepMeta> = slice
        .blocks
        .keys()
        .map(|l| IrrepMeta::new(spec.backend, *l).unwrap())
        .collect();
    let exp_diag: Vec<Vec<f64>> = metas.iter().map(|pi| rep_exp_ih_diagonal(pi, h)).collect();
    let d1_cache: Vec<Vec<Vec<C64>>> = rule
        .nodes
        .iter()
        .map(|k1| metas.iter().map(|pi| rep_matrix(pi, k1)).collect())
        .collect();
    let d2_cache = &d1_cache;
    let lhs_cells: Vec<f64> = (0..len)
        .into_par_iter()
        .map(|cell| {
            // G_π(k₂)[i][a] per cell.
            let per_k2: Vec<Vec<Vec<C64>>> = d2_cache
                .iter()
                .map(|mats| {
                    metas
                        .iter()
                        .enumerate()
                        .map(|(pidx, pi)| {
                            let d = pi.degree;
                            let block = &slice.blocks[&pi.label];
                            let dm = &mats[pidx];
                            let mut g = vec![c64(0.0, 0.0); d * d];
                            for i in 0..d {
                                for a in 0..d {
                                    let mut acc = c64(0.0, 0.0);
                                    for j in 0..d {
                                        acc += block[(i * d + j) * len + cell] * dm[a * d + j];
                                    }
                                    g[i * d + a] = acc * exp_diag[pidx][a];
                                }
                            }
                            g
                        })
                        .collect()
                })
                .collect();
            let mut acc = 0.0;
            for (i1, w1) in rule.weights.iter().enumerate() {
                for (i2, w2) in rule.weights.iter().enumerate() {
                    let mut value = c64(0.0, 0.0);
                    for (pidx, pi) in metas.iter().enumerate() {
                        let d = pi.degree;
                        let mut inner = c64(0.0, 0.0);
                        for slot in 0..d * d {
                            inner += d1_cache[i1][pidx][slot] * per_k2[i2][pidx][slot];
                        }
                        value += inner * d as f64;
                    }
                    acc += w1 * w2 * value.norm_sqr();
                }
            }
            acc
        })
        .collect();
    let lhs =
        lhs_cells.iter().sum::<f64>() * spec.grid.cell_volume() * (2.0 * PI).powf(-(n as f64) / 2.0);
    // rhs: Σ_π Σ_ij [∫|f̃^π_ij(ξ)|² e^{-2⟨ξ,y⟩} dξ_norm]·χ_π(exp 2iH).
    let mut rhs = 0.0;
    let weights: Vec<f64> = (0..len)
        .map(|cell| {
            let xi = spec.grid.xi_point(cell);
            let dot: f64 = xi[..n].iter().zip(y).map(|(a, b)| a * b).sum();
            (-2.0 * dot).exp()
        })
        .collect();
    for (label, block) in &spec.blocks {
        let pi = IrrepMeta::new(spec.backend, *label).unwrap();
        let d = pi.degree;
        let chi = character_ext(&pi, &CartanVector(h));
        let mut mass = 0.0;
        for slot in 0..d * d {
            for (cell, w) in weights.iter().enumerate() {
                mass += block[slot * len + cell].norm_sqr() * w;
            }
        }
        rhs += mass * chi;
    }
    rhs *= spec.grid.xi_cell_volume() * (2.0 * PI).powf(-(n as f64) / 2.0);
    Ok(CheckResult::new(lhs, rhs))
}

/// Truncated Gutzmer right side at `(y, H)` with the series cut at
/// `series_cutoff` (for cutoff-refinement diagnostics).
pub fn gutzmer_m_series(spec: &SpectralPwField, y: &[f64], h: f64, series_cutoff: u32) -> f64 {
    let len = spec.grid.len();
    let n = spec.grid.n;
    let weights: Vec<f64> = (0..len)
        .map(|cell| {
            let xi = spec.grid.xi_point(cell);
            let dot: f64 = xi[..n].iter().zip(y).map(|(a, b)| a * b).sum();
            (-2.0 * dot).exp()
        })
        .collect();
    let mut rhs = 0.0;
    for (label, block) in &spec.blocks {
        let pi = IrrepMeta::new(spec.backend, *label).unwrap();
        if pi.hw_norm > series_cutoff as f64 {
            continue;
        }
        let d = pi.degree;
        let chi = character_ext(&pi, &CartanVector(h));
        let mut mass = 0.0;
        for slot in 0..d * d {
            for (cell, w) in weights.iter().enumerate() {
                mass += block[slot * len + cell].norm_sqr() * w;
            }
        }
        rhs += mass * chi;
    }
    rhs * spec.grid.xi_cell_volume() * (2.0 * PI).powf(-(n as f64) / 2.0)
}

/// Poisson semigroup `e^{-tΔ^{1/2}}`: the joint spectral multiplier
/// `e^{-t(|ξ|² + λ_π)^{1/2}}`; results are holomorphically extendable.
pub fn poisson(spec: &SpectralPwField, t: f64) -> SpectralPwField {
    assert!(t > 0.0);
    let mut out = spec.joint_multiplier(|w, lam| (-t * (w + lam).sqrt()).exp());
    out.extendable = true;
    out
}

/// Invert the Poisson smoothing: multiply by `e^{+s(|ξ|²+λ_π)^{1/2}}`.
/// Rejected when the inflated spectrum concentrates at the grid
/// boundary (the square-integrability hypothesis fails).
pub fn poisson_invert(
    spec: &SpectralPwField,
    s: f64,
    tail_threshold: f64,
) -> Result<SpectralPwField> {
    assert!(s >= 0.0);
    if s == 0.0 {
        return Ok(spec.clone());
    }
    let inflated = spec.joint_multiplier(|w, lam| (s * (w + lam).sqrt()).exp());
    let len = spec.grid.len();
    let mut total = 0.0;
    let mut boundary = 0.0;
    for (_, block) in &inflated.blocks {
        let slots = block.len() / len;
        for slot in 0..slots {
            for cell in 0..len {
                let m = block[slot * len + cell].norm_sqr();
                total += m;
                if spec.grid.on_boundary(cell) {
                    boundary += m;
                }
            }
        }
    }
    let tail = if total == 0.0 { 0.0 } else { boundary / total };
    if tail > tail_threshold {
        return Err(Error::SpectralBlowup {
            tail,
            threshold: tail_threshold,
        });
    }
    Ok(inflated)
}

/// One mesh point of the holomorphy-domain diagnostic.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct DomainMeshPoint {
    pub y_fraction: f64,
    pub h_fraction: f64,
    pub series_value: f64,
}

/// Report of [`poisson_domain_check`].
#[derive(Debug, Clone, serde::Serialize)]
pub struct PoissonDomainReport {
    /// Strip radius `t/√2` of the certified domain.
    pub y_limit: f64,
    /// Cartan radius `t√2/N`.
    pub h_limit: f64,
    pub mesh: Vec<DomainMeshPoint>,
    pub sup_series: f64,
    pub all_finite: bool,
    /// `sup e^{-2t√(|ξ|²+λ)} e^{2|ξ||y|} e^{N√λ s}` over the spectral
    /// mesh at the boundary parameters.
    pub multiplier_sup: f64,
    pub skipped_degenerate: bool,
}

/// Evaluate the Gutzmer series of `g = e^{-tΔ^{1/2}} f` on a mesh
/// approaching the domain corner `(t/√2, t√2/N)`, together with the
/// two-variable multiplier bound used to certify finiteness.
pub fn poisson_domain_check(
    spec_f: &SpectralPwField,
    t: f64,
    mesh_fractions: &[f64],
) -> PoissonDomainReport {
    let gc = crate::compact::growth_constants(spec_f.backend);
    let y_limit = t / 2.0f64.sqrt();
    let h_limit = t * 2.0f64.sqrt() / gc.n;
    if t < 1e-12 {
        return PoissonDomainReport {
            y_limit,
            h_limit,
            mesh: Vec::new(),
            sup_series: 0.0,
            all_finite: true,
            multiplier_sup: 0.0,
            skipped_degenerate: true,
        };
    }
    let g = poisson(spec_f, t);
    let n = spec_f.grid.n;
    let mut mesh = Vec::new();
    let mut sup_series = 0.0f64;
    let mut all_finite = true;
    for &fy in mesh_fractions {
        for &fh in mesh_fractions {
            let mut y = vec![0.0; n];
            y[0] = fy * y_limit;
            let value = gutzmer_m_series(&g, &y, fh * h_limit, spec_f.cutoff);
            all_finite &= value.is_finite();
            sup_series = sup_series.max(value);
            mesh.push(DomainMeshPoint {
                y_fraction: fy,
                h_fraction: fh,
                series_value: value,
            });
        }
    }
    // Multiplier bound at the boundary parameters |y| = t/√2,
    // s = t√2/N: exponent t(√2(a+b) - 2√(a²+b²)) ≤ 0 along every ray,
    // with equality on a = b.
    let mut multiplier_sup = 0.0f64;
    let a_max = spec_f.grid.xi_max() * (n as f64).sqrt();
    let steps = 400;
    for ia in 0..=steps {
        let a = a_max * ia as f64 / steps as f64;
        for ib in 0..=steps {
            let b = a_max * ib as f64 / steps as f64;
            let expo = -2.0 * t * (a * a + b * b).sqrt() + 2.0 * a * y_limit + gc.n * b * h_limit;
            multiplier_sup = multiplier_sup.max(expo.exp());
        }
    }
    PoissonDomainReport {
        y_limit,
        h_limit,
        mesh,
        sup_series,
        all_finite,
        multiplier_sup,
        skipped_degenerate: false,
    }
}

/// One row of the character sphere-average sweep.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct SphereBoundRow {
    pub label: i32,
    pub radius: f64,
    pub lhs: f64,
    /// `lhs / (d_π e^{C r √λ_π})`.
    pub ratio: f64,
}

/// Report of [`character_sphere_bound_check`].
#[derive(Debug, Clone, serde::Serialize)]
pub struct SphereBoundReport {
    pub c: f64,
    /// Largest `A` with `lhs ≥ d_π A e^{C r √λ_π}` across the sweep.
    pub fitted_a: f64,
    pub rows: Vec<SphereBoundRow>,
}

/// Sweep `∫_{|H|=r} χ_π(exp 2iH) dσ_r(H)` over irreps and radii and fit
/// the largest constant `A` for the lower bound with the given `C`
/// (default 2, from `2√(l(l+1)) ≤ 2l+1`).
pub fn character_sphere_bound_check(
    backend: Backend,
    radii: &[f64],
    max_label: u32,
    c: f64,
) -> SphereBoundReport {
    let mut rows = Vec::new();
    let mut fitted_a = f64::INFINITY;
    for pi in crate::compact::irreps(backend, max_label) {
        for &r in radii {
            let rule = cartan_sphere_rule(r);
            let lhs = rule.integrate(|hh| character_ext(&pi, &CartanVector(hh)));
            let denom = pi.degree as f64 * (c * r * pi.casimir.sqrt()).exp();
            let ratio = lhs / denom;
            fitted_a = fitted_a.min(ratio);
            rows.push(SphereBoundRow {
                label: pi.label,
                radius: r,
                lhs,
                ratio,
            });
        }
    }
    SphereBoundReport { c, fitted_a, rows }
}
