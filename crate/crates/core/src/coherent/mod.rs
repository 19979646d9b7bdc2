//! The coherent-state transform `C_t : f ↦ f * ψ_t` on the motion
//! group, holomorphically continued to `Cⁿ × G`, its target measure
//! `μ ⊗ ν`, and the generalized kernel transforms built from a
//! `K`-invariant weight on `Rⁿ` and a bi-`K`-invariant measure on `G`.
//!
//! The `G`-side inner product is spectral: matrix coefficients continued
//! to `G` are ν-orthogonal with
//! `⟨φ^π_{ij}, φ^λ_{lm}⟩_ν = δ_{πλ}δ_{il}δ_{jm}·e^{λ_π t}/d_π`,
//! equivalently `δ(π) = (1/d_π)∫‖π(g⁻¹)‖²_HS dν = e^{λ_π t}`. On the
//! U(1) backend the same inner products are also available by honest
//! quadrature against the explicit density `ρ_t(s) = (πt)^{-1/2}e^{-s²/t}`,
//! and the two modes are cross-certified.

use crate::compact::{quadrature, rep_matrix, Backend, ComplexGroupPoint, IrrepMeta};
use crate::euclid::{gaussian_weight_mu, inverse_fourier, GridSpec, SpectralField, YGrid};
use crate::motion::{convolve_heat_spectral, ComplexMotionPoint, PwField, SpectralPwField};
use crate::{c64, check::CheckResult, error::Error, Result, C64};
use rayon::prelude::*;
use std::collections::BTreeMap;
use std::f64::consts::PI;

/// How `G`-side integrals are evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NuMode {
    /// Orthogonality rule `⟨φ^π_{ij}, φ^λ_{lm}⟩_ν = δ·e^{λ_π t}/d_π`.
    Spectral,
    /// Honest `(θ, s)`-quadrature against the explicit U(1) density.
    QuadratureU1,
}

/// The measure `ν` on `G` at heat time `t`.
#[derive(Debug, Clone, Copy)]
pub struct NuMeasure {
    pub backend: Backend,
    pub t: f64,
    pub mode: NuMode,
}

impl NuMeasure {
    pub fn spectral(backend: Backend, t: f64) -> Self {
        NuMeasure {
            backend,
            t,
            mode: NuMode::Spectral,
        }
    }

    pub fn quadrature_u1(t: f64) -> Result<Self> {
        Ok(NuMeasure {
            backend: Backend::U1,
            t,
            mode: NuMode::QuadratureU1,
        })
    }

    /// `⟨φ^π_{ij}, φ^π_{ij}⟩_ν` under the spectral rule.
    pub fn pair_weight(&self, pi: &IrrepMeta) -> f64 {
        (pi.casimir * self.t).exp() / pi.degree as f64
    }

    /// `δ(π) = (1/d_π) ∫_G ‖π(g⁻¹)‖²_HS dν(g)`.
    pub fn delta(&self, pi: &IrrepMeta) -> f64 {
        (pi.casimir * self.t).exp()
    }
}

/// Bi-invariant density of `ν` on the U(1) complexification in the
/// Cartan coordinate: `ρ_t(s) = (πt)^{-1/2} e^{-s²/t}`, with defining
/// property `∫ e^{-2ns} ρ_t(s) ds = e^{n²t}`.
pub fn nu_density_u1(backend: Backend, t: f64, s: f64) -> Result<f64> {
    if backend != Backend::U1 {
        return Err(Error::UnsupportedBackend(
            "explicit ν density exists only on the u1 backend; use the spectral mode".into(),
        ));
    }
    assert!(t > 0.0);
    Ok((PI * t).powf(-0.5) * (-s * s / t).exp())
}

/// Uniform quadrature in the Cartan coordinate for U(1) ν-integrals,
/// sized for the moments appearing up to `cutoff`.
pub fn u1_cartan_rule(t: f64, cutoff: u32) -> (Vec<f64>, f64) {
    let reach = cutoff as f64 * t + 8.0 * (t / 2.0).sqrt() + 1.0;
    let step = 0.02_f64.min(t / 10.0);
    let count = (2.0 * reach / step).ceil() as usize;
    let nodes = (0..=count)
        .map(|j| -reach + 2.0 * reach * j as f64 / count as f64)
        .collect();
    (nodes, 2.0 * reach / count as f64)
}

/// Certify the closed-form density against its defining moments:
/// returns the largest relative deviation of `∫ e^{-2ns} ρ_t(s) ds`
/// from `e^{n²t}` over `|n| ≤ cutoff`.
pub fn certify_nu_density_u1(t: f64, cutoff: u32) -> f64 {
    let (nodes, w) = u1_cartan_rule(t, cutoff);
    let mut worst = 0.0f64;
    for n in -(cutoff as i32)..=cutoff as i32 {
        let moment: f64 = nodes
            .iter()
            .map(|s| (-2.0 * n as f64 * s).exp() * nu_density_u1(Backend::U1, t, *s).unwrap())
            .sum::<f64>()
            * w;
        let expect = ((n * n) as f64 * t).exp();
        worst = worst.max((moment - expect).abs() / expect);
    }
    worst
}

/// `⟨φ^n, φ^m⟩_ν` matrix on the U(1) backend by honest `(θ, s)`
/// quadrature; labels ordered `-cutoff..=cutoff`.
pub fn u1_nu_gram_quadrature(t: f64, cutoff: u32) -> Vec<C64> {
    let labels: Vec<i32> = (-(cutoff as i32)..=cutoff as i32).collect();
    let dim = labels.len();
    let (snodes, sw) = u1_cartan_rule(t, cutoff);
    let n_theta = (2 * cutoff + 2) as usize;
    let mut gram = vec![c64(0.0, 0.0); dim * dim];
    for s in &snodes {
        let rho = nu_density_u1(Backend::U1, t, *s).unwrap() * sw;
        for jt in 0..n_theta {
            let theta = 2.0 * PI * jt as f64 / n_theta as f64;
            let w = rho / n_theta as f64;
            for (a, na) in labels.iter().enumerate() {
                // φⁿ(θ + is-part) = e^{inθ} e^{-n s}
                let fa = c64(0.0, *na as f64 * theta).exp() * (-(*na as f64) * s).exp();
                for (b, nb) in labels.iter().enumerate() {
                    let fb = c64(0.0, *nb as f64 * theta).exp() * (-(*nb as f64) * s).exp();
                    gram[a * dim + b] += w * fa * fb.conj();
                }
            }
        }
    }
    gram
}

/// Evaluate `C_t f` at a point of `Cⁿ × G` from the spectral
/// coefficients of `f`:
/// `Σ_π d_π e^{-λ_π t/2} Σ_{ij} (f^π_{ij} * p_t)(z) φ^π_{ij}(g)`.
pub fn sb_transform(spec: &SpectralPwField, t: f64, at: &ComplexMotionPoint) -> Result<C64> {
    assert!(t > 0.0);
    let y2: f64 = at.z.iter().map(|v| v.im * v.im).sum();
    let limit = crate::euclid::Y_GUARD_FACTOR * t.sqrt();
    if y2.sqrt() > limit {
        return Err(Error::OverflowGuard {
            what: "|Im z|",
            value: y2.sqrt(),
            limit,
        });
    }
    convolve_heat_spectral(spec, t).synthesize_extended(at)
}

/// Result of an isometry verification with mode details.
#[derive(Debug, Clone)]
pub struct SbIsometry {
    pub check: CheckResult,
    /// rhs recomputed with the U(1) quadrature ν when requested.
    pub rhs_quadrature: Option<f64>,
    /// Relative disagreement of the two ν modes.
    pub mode_agreement: Option<f64>,
}

fn y_nodes(n: usize, y_grid: &YGrid) -> Vec<Vec<f64>> {
    let ycoords = y_grid.coords();
    let mut out = Vec::new();
    match n {
        2 => {
            for &a in &ycoords {
                for &b in &ycoords {
                    out.push(vec![a, b]);
                }
            }
        }
        3 => {
            for &a in &ycoords {
                for &b in &ycoords {
                    for &c in &ycoords {
                        out.push(vec![a, b, c]);
                    }
                }
            }
        }
        _ => unreachable!(),
    }
    out
}

/// Verify `∫∫ |C_t f(z,g)|² dμ(z) dν(g) = ‖f‖²` with
/// `dμ = (2πt)^{-n/2} e^{-|y|²/2t} dx_norm dy`.
///
/// In the spectral ν mode the `G`-integral reduces blockwise to
/// `Σ_π d_π Σ_{ij} |f^π_{ij} * p_t(z)|²`; the `Cⁿ`-integral is honest
/// quadrature over the y-grid with one modulated inverse transform per
/// coefficient and y-node.
pub fn sb_isometry_check(
    f: &PwField,
    t: f64,
    nu: &NuMeasure,
    y_grid: YGrid,
) -> Result<SbIsometry> {
    let lhs = f.norm_sq();
    let n = f.grid.n;
    let spec = f.fourier();
    let smoothed = convolve_heat_spectral(&spec, t);
    let ynodes = y_nodes(n, &y_grid);
    let norm_const = (2.0 * PI).powf(-(n as f64) / 2.0);
    let want_pair_products = nu.mode == NuMode::QuadratureU1;
    // Per y-node: ∫ |B^π_ij(x+iy)|² dx_norm for every coefficient, and
    // (for the quadrature mode) the cross products
    // ∫ B^la(x+iy)·conj(B^lb(x+iy)) dx_norm on the u1 backend.
    let labels: Vec<i32> = smoothed.blocks.keys().copied().collect();
    let slab_data: Vec<(Vec<f64>, Vec<C64>)> = ynodes
        .par_iter()
        .map(|y| {
            let slice = smoothed
                .extension_slice(y)
                .expect("heat-smoothed fields are extendable");
            let mut per_pair: Vec<f64> = Vec::new();
            for (label, block) in &slice.blocks {
                let d = slice.meta(*label).degree;
                let len = slice.grid.len();
                for slot in 0..d * d {
                    let s: f64 = block[slot * len..(slot + 1) * len]
                        .iter()
                        .map(|v| v.norm_sqr())
                        .sum();
                    per_pair.push(s * slice.grid.cell_volume() * norm_const);
                }
            }
            let mut products = Vec::new();
            if want_pair_products {
                for &la in &labels {
                    let sa = slice.coeff_slice(la, 0, 0).expect("block exists");
                    for &lb in &labels {
                        let sb = slice.coeff_slice(lb, 0, 0).expect("block exists");
                        let z: C64 = sa.iter().zip(sb).map(|(a, b)| a * b.conj()).sum();
                        products.push(z * slice.grid.cell_volume() * norm_const);
                    }
                }
            }
            (per_pair, products)
        })
        .collect();
    let slab_sums: Vec<&Vec<f64>> = slab_data.iter().map(|(p, _)| p).collect();
    let cellw = y_grid.cell(n);
    // Spectral ν mode: ∫|C_t f(z,·)|² dν = Σ_π d_π² Σ_ij |A^π_ij(z)|²
    // ·(e^{λt}/d_π) with A the heat-damped coefficients, i.e. weight
    // d_π e^{λ_π t} against the damped slab sums (the damping inside
    // |A|² cancels it back to Σ d_π |f^π_ij * p_t|²).
    let mut rhs_spectral = 0.0;
    for (y, per_pair) in ynodes.iter().zip(&slab_sums) {
        let w = gaussian_weight_mu(n, t, y) * cellw;
        let mut idx = 0usize;
        for label in smoothed.blocks.keys() {
            let pi = smoothed.meta(*label);
            let d = pi.degree;
            let weight = d as f64 * (pi.casimir * t).exp();
            for _slot in 0..d * d {
                rhs_spectral += w * weight * per_pair[idx];
                idx += 1;
            }
        }
    }
    let mut rhs_quadrature = None;
    let mut mode_agreement = None;
    if want_pair_products {
        if f.backend != Backend::U1 {
            return Err(Error::UnsupportedBackend(
                "quadrature ν mode is only available on u1".into(),
            ));
        }
        // rhs = Σ_{n,m} Z_{nm} G_{nm}: Z the dμ-inner products of the
        // smoothed coefficient continuations, G the honest ν Gram
        // matrix (d = 1 throughout on u1).
        let gram_cutoff = labels.iter().map(|l| l.unsigned_abs()).max().unwrap_or(0);
        let gram = u1_nu_gram_quadrature(t, gram_cutoff);
        let gdim = (2 * gram_cutoff + 1) as usize;
        let gidx = |l: i32| (l + gram_cutoff as i32) as usize;
        let nl = labels.len();
        let mut rhs_q = c64(0.0, 0.0);
        for (y, (_, products)) in ynodes.iter().zip(&slab_data) {
            let w = gaussian_weight_mu(n, t, y) * cellw;
            for (ai, la) in labels.iter().enumerate() {
                for (bi, lb) in labels.iter().enumerate() {
                    let gv = gram[gidx(*la) * gdim + gidx(*lb)];
                    if gv.norm() < 1e-120 {
                        continue;
                    }
                    rhs_q += w * products[ai * nl + bi] * gv;
                }
            }
        }
        let rq = rhs_q.re;
        rhs_quadrature = Some(rq);
        mode_agreement = Some((rq - rhs_spectral).abs() / rhs_spectral.abs().max(1e-300));
    }
    Ok(SbIsometry {
        check: CheckResult::new(lhs, rhs_spectral),
        rhs_quadrature,
        mode_agreement,
    })
}

/// A generalized target weight: `σ(y) = ∫ e^{2y·x} μ(x) dx_norm`
/// tabulated on the frequency grid together with a real phase `a(y)`.
#[derive(Debug, Clone)]
pub struct GeneralizedKernelMu {
    pub grid: GridSpec,
    /// σ at every frequency cell.
    pub sigma: Vec<f64>,
    /// Phase a at every frequency cell.
    pub phase: Vec<f64>,
}

/// Tabulate σ from a strictly positive `K`-invariant weight `μ`. The
/// moment integral is over the y-grid; divergence (growth of `e^{2x·y}`
/// beating the decay of μ) is detected through the boundary share of
/// the quadrature.
pub fn sigma_from_mu<F>(grid: GridSpec, mu: F, y_grid: YGrid) -> Result<Vec<f64>>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let n = grid.n;
    let ycoords = y_grid.coords();
    let lo = ycoords[0];
    let hi = ycoords[ycoords.len() - 1];
    let ynodes = y_nodes(n, &y_grid);
    let cellw = y_grid.cell(n) * (2.0 * PI).powf(-(n as f64) / 2.0);
    let sigma: Vec<Result<f64>> = (0..grid.len())
        .into_par_iter()
        .map(|flat| {
            let x = grid.xi_point(flat);
            let mut total = 0.0;
            let mut boundary = 0.0;
            for y in &ynodes {
                let dot: f64 = x[..n].iter().zip(y).map(|(a, b)| a * b).sum();
                let term = (2.0 * dot).exp() * mu(y);
                total += term;
                if y.iter().any(|v| *v == lo || *v == hi) {
                    boundary += term;
                }
            }
            if boundary > 1e-8 * total {
                let r: f64 = x[..n].iter().map(|v| v * v).sum::<f64>().sqrt();
                return Err(Error::SigmaDiverges { at: r });
            }
            Ok(total * cellw)
        })
        .collect();
    sigma.into_iter().collect()
}

impl GeneralizedKernelMu {
    pub fn new(grid: GridSpec, sigma: Vec<f64>, phase: Vec<f64>) -> Self {
        GeneralizedKernelMu { grid, sigma, phase }
    }

    /// `h(y) = e^{ia(y)}/√σ(y)` on the frequency grid. The extreme
    /// `-N/2` rows (which have no mirror on the centered grid) are
    /// zeroed so the node set is symmetric under `y → -y`; their mass
    /// is below the quadrature resolution for admissible σ.
    pub fn h_field(&self) -> SpectralField {
        let mut values: Vec<C64> = self
            .sigma
            .iter()
            .zip(&self.phase)
            .map(|(s, a)| c64(0.0, *a).exp() / s.sqrt())
            .collect();
        for (flat, v) in values.iter_mut().enumerate() {
            let idx = self.grid.unflatten(flat);
            if idx[..self.grid.n].iter().any(|i| *i == 0) {
                *v = c64(0.0, 0.0);
            }
        }
        SpectralField {
            grid: self.grid,
            values,
        }
    }
}

/// The kernel `ψ(z) = ∫ e^{ia(y)} σ(y)^{-1/2} e^{-i⟨y,z⟩} dy_norm`,
/// entire in `z` on the guarded strip.
pub fn psi_kernel(gk: &GeneralizedKernelMu, z: &[C64]) -> C64 {
    let minus_z: Vec<C64> = z.iter().map(|v| -v).collect();
    gk.h_field().eval_at_complex(&minus_z)
}

/// Spectral form of the generalized Euclidean transform:
/// `(C_ψ f)~(ξ) = f̃(ξ)·h(-ξ)`.
pub fn c_psi_spectral(gk: &GeneralizedKernelMu, spec: &SpectralField) -> SpectralField {
    let h = gk.h_field();
    let grid = spec.grid;
    let nn = grid.samples;
    let mut values = vec![c64(0.0, 0.0); grid.len()];
    for flat in 0..grid.len() {
        let idx = grid.unflatten(flat);
        let mut neg = 0usize;
        for a in 0..grid.n {
            neg = neg * nn + (nn - idx[a]) % nn;
        }
        values[flat] = spec.values[flat] * h.values[neg];
    }
    SpectralField { grid, values }
}

/// `‖C_ψ f‖²` in `L²(Cⁿ, dx_norm μ(y) dy_norm)` by y-grid quadrature.
pub fn c_psi_target_norm_sq<F>(
    gk: &GeneralizedKernelMu,
    spec: &SpectralField,
    mu: F,
    y_grid: YGrid,
) -> f64
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let grid = spec.grid;
    let n = grid.n;
    let transformed = c_psi_spectral(gk, spec);
    let ynodes = y_nodes(n, &y_grid);
    let norm_const = (2.0 * PI).powf(-(n as f64) / 2.0);
    let terms: Vec<f64> = ynodes
        .par_iter()
        .map(|y| {
            let modulated = transformed.multiplied(|xi| {
                let dot: f64 = xi.iter().zip(y).map(|(a, b)| a * b).sum();
                c64((-dot).exp(), 0.0)
            });
            let slab = inverse_fourier(&modulated);
            slab.norm_sq() * norm_const * mu(y)
        })
        .collect();
    terms.iter().sum::<f64>() * y_grid.cell(n) * norm_const
}

/// The `G`-side kernel
/// `τ(g) = Σ_π (d_π/√δ(π)) Tr(π(g⁻¹) U_π)` with arbitrary unitary
/// twists `U_π` (identity by default).
pub fn tau_kernel(
    nu: &NuMeasure,
    cutoff: u32,
    twists: &BTreeMap<i32, Vec<C64>>,
    g: &ComplexGroupPoint,
) -> C64 {
    let mut acc = c64(0.0, 0.0);
    for pi in crate::compact::irreps(nu.backend, cutoff) {
        let d = pi.degree;
        // π(g⁻¹) = π(exp(-iH))·π(k⁻¹)
        let dkinv = rep_matrix(&pi, &g.k.inverse());
        let diag = crate::compact::rep_exp_ih_diagonal(&pi, -g.h.0);
        let mut trace = c64(0.0, 0.0);
        match twists.get(&pi.label) {
            None => {
                for a in 0..d {
                    trace += diag[a] * dkinv[a * d + a];
                }
            }
            Some(u) => {
                // Tr(E_{-h}·D(k⁻¹)·U)
                for a in 0..d {
                    for b in 0..d {
                        trace += diag[a] * dkinv[a * d + b] * u[b * d + a];
                    }
                }
            }
        }
        acc += (d as f64 / nu.delta(&pi).sqrt()) * trace;
    }
    acc
}

/// `φ(z,g) = ψ(z)·τ(g)`, the kernel of the generalized transform on `M`.
pub fn phi_kernel(
    gk: &GeneralizedKernelMu,
    nu: &NuMeasure,
    cutoff: u32,
    twists: &BTreeMap<i32, Vec<C64>>,
    z: &[C64],
    g: &ComplexGroupPoint,
) -> C64 {
    psi_kernel(gk, z) * tau_kernel(nu, cutoff, twists, g)
}

/// Pairing matrices `F^{(π,i,j)}_λ[a][b] = ∫ φ^π_{ij} φ^λ_{ab} dk`
/// computed by quadrature; these expand `C_τ φ^π_{ij}` over the traces
/// `Tr(λ(g⁻¹)·F·U_λ)`.
fn pairing_matrices(
    backend: Backend,
    cutoff: u32,
) -> BTreeMap<(i32, usize, usize, i32), Vec<C64>> {
    let rule = quadrature(backend, cutoff);
    let metas = crate::compact::irreps(backend, cutoff);
    let mut out = BTreeMap::new();
    for pi in &metas {
        let dp = pi.degree;
        for lam in &metas {
            let dl = lam.degree;
            for i in 0..dp {
                for j in 0..dp {
                    let mut f = vec![c64(0.0, 0.0); dl * dl];
                    for (u, w) in rule.iter() {
                        let a_val = rep_matrix(pi, u)[i * dp + j];
                        let lm = rep_matrix(lam, u);
                        for slot in 0..dl * dl {
                            f[slot] += w * a_val * lm[slot];
                        }
                    }
                    if f.iter().any(|v| v.norm() > 1e-13) {
                        out.insert((pi.label, i, j, lam.label), f);
                    }
                }
            }
        }
    }
    out
}

/// Isometry of the generalized motion-group transform
/// `C_φ f(z,g) = ∫_M f(ξ,k) φ((ξ,k)⁻¹(z,g)) dm`: compares `‖f‖²` with
/// `‖C_φ f‖²_{L²(μ⊗ν)}`, the `G`-side evaluated through the ν rule on
/// the trace expansion and the `z`-side by y-grid quadrature.
pub fn c_phi_isometry_check<F>(
    f: &PwField,
    gk: &GeneralizedKernelMu,
    nu: &NuMeasure,
    mu: F,
    twists: &BTreeMap<i32, Vec<C64>>,
    y_grid: YGrid,
) -> CheckResult
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let lhs = f.norm_sq();
    let n = f.grid.n;
    let len = f.grid.len();
    let spec = f.fourier();
    let pairings = pairing_matrices(f.backend, f.cutoff);
    let metas = crate::compact::irreps(f.backend, f.cutoff);
    let ynodes = y_nodes(n, &y_grid);
    let norm_const = (2.0 * PI).powf(-(n as f64) / 2.0);
    // ψ-transform every coefficient once.
    let mut zparts: BTreeMap<(i32, usize, usize), SpectralField> = BTreeMap::new();
    for (label, block) in &spec.blocks {
        let d = spec.meta(*label).degree;
        for i in 0..d {
            for j in 0..d {
                let sf = SpectralField {
                    grid: f.grid,
                    values: block[(i * d + j) * len..(i * d + j + 1) * len].to_vec(),
                };
                zparts.insert((*label, i, j), c_psi_spectral(gk, &sf));
            }
        }
    }
    // ‖C_φ f‖² = Σ_λ (d_λ²/δ_λ)·(e^{λ_λ t}/d_λ)·∫ ‖M_λ(z)‖²_F dμ with
    // M_λ(z) = Σ_{π,i,j} d_π (f^π_{ij} ⋆ ψ)(z)·F^{(πij)}_λ·U_λ.
    let terms: Vec<f64> = ynodes
        .par_iter()
        .map(|y| {
            let mut slabs: BTreeMap<(i32, usize, usize), Vec<C64>> = BTreeMap::new();
            for (key, sf) in &zparts {
                let modulated = sf.multiplied(|xi| {
                    let dot: f64 = xi.iter().zip(y).map(|(a, b)| a * b).sum();
                    c64((-dot).exp(), 0.0)
                });
                slabs.insert(*key, inverse_fourier(&modulated).values);
            }
            let mut node_total = 0.0;
            for lam in &metas {
                let dl = lam.degree;
                let weight =
                    (dl as f64).powi(2) / nu.delta(lam) * nu.pair_weight(lam);
                let mut lam_sum = 0.0;
                for cell in 0..len {
                    let mut m = vec![c64(0.0, 0.0); dl * dl];
                    for ((pl, i, j), slab) in &slabs {
                        if let Some(pairing) = pairings.get(&(*pl, *i, *j, lam.label)) {
                            let dpi = f.meta(*pl).degree as f64;
                            let v = slab[cell] * dpi;
                            match twists.get(&lam.label) {
                                None => {
                                    for slot in 0..dl * dl {
                                        m[slot] += v * pairing[slot];
                                    }
                                }
                                Some(u) => {
                                    for a in 0..dl {
                                        for b in 0..dl {
                                            let mut acc = c64(0.0, 0.0);
                                            for c in 0..dl {
                                                acc += pairing[a * dl + c] * u[c * dl + b];
                                            }
                                            m[a * dl + b] += v * acc;
                                        }
                                    }
                                }
                            }
                        }
                    }
                    lam_sum += m.iter().map(|v| v.norm_sqr()).sum::<f64>();
                }
                node_total += weight * lam_sum;
            }
            node_total * f.grid.cell_volume() * norm_const * mu(y)
        })
        .collect();
    let rhs = terms.iter().sum::<f64>() * y_grid.cell(n) * norm_const;
    CheckResult::new(lhs, rhs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compact::{matrix_coefficient, CartanVector, GroupElement};
    use crate::motion::analyze;

    fn grid_u1() -> GridSpec {
        GridSpec::new(2, 10.0, 32).unwrap()
    }

    fn gaussian(x: &[f64]) -> f64 {
        let r2: f64 = x.iter().map(|v| v * v).sum();
        (-r2 / 2.0).exp()
    }

    fn single_block(grid: GridSpec, label: i32) -> PwField {
        let rule = quadrature(Backend::U1, label.unsigned_abs().max(1));
        let pi = IrrepMeta::new(Backend::U1, label).unwrap();
        analyze(grid, &rule, label.unsigned_abs().max(1), |cell, k| {
            let x = grid.point(cell);
            c64(gaussian(&x[..2]), 0.0) * matrix_coefficient(&pi, 1, 1, k).unwrap()
        })
        .unwrap()
    }

    #[test]
    fn nu_density_moments() {
        let t = 0.5;
        assert!(certify_nu_density_u1(t, 4) < 1e-10);
        let (nodes, w) = u1_cartan_rule(t, 1);
        let m1: f64 = nodes
            .iter()
            .map(|s| (-2.0 * s).exp() * nu_density_u1(Backend::U1, t, *s).unwrap())
            .sum::<f64>()
            * w;
        assert!((m1 - 0.5f64.exp()).abs() < 1e-10);
        assert!((m1 - 1.6487212707001282).abs() < 1e-9);
        assert_eq!(
            nu_density_u1(Backend::U1, t, 0.3).unwrap(),
            nu_density_u1(Backend::U1, t, -0.3).unwrap()
        );
        assert!(nu_density_u1(Backend::So3, t, 0.0).is_err());
    }

    #[test]
    fn nu_gram_matches_spectral_rule() {
        let t = 0.5;
        let cutoff = 3u32;
        let gram = u1_nu_gram_quadrature(t, cutoff);
        let dim = (2 * cutoff + 1) as usize;
        let nu = NuMeasure::spectral(Backend::U1, t);
        for a in 0..dim {
            for b in 0..dim {
                let na = a as i32 - cutoff as i32;
                let got = gram[a * dim + b];
                let expect = if a == b {
                    let pi = IrrepMeta::new(Backend::U1, na).unwrap();
                    nu.pair_weight(&pi)
                } else {
                    0.0
                };
                assert!(
                    (got - c64(expect, 0.0)).norm() / expect.max(1.0) < 1e-8,
                    "({a},{b}): {got} vs {expect}"
                );
            }
        }
    }

    #[test]
    fn sb_transform_semigroup_at_real_points() {
        let grid = GridSpec::new(2, 10.0, 64).unwrap();
        let s = 0.4;
        let t = 0.3;
        let psi_s = crate::motion::heat_field(Backend::U1, grid, s, 5);
        let spec = psi_s.fourier();
        let direct = crate::motion::heat_field(Backend::U1, grid, s + t, 5);
        for &(cell, theta) in &[(64 * 32 + 32, 0.0), (64 * 30 + 36, 1.3)] {
            let at =
                ComplexMotionPoint::real(&grid.point(cell)[..2], GroupElement::U1 { theta });
            let v = sb_transform(&spec, t, &at).unwrap();
            let expect = direct.synthesize(cell, &GroupElement::U1 { theta });
            assert!((v - expect).norm() < 1e-9, "{v} vs {expect}");
        }
    }

    #[test]
    fn sb_transform_factorizes_on_single_block() {
        let grid = grid_u1();
        let f = single_block(grid, 2);
        let spec = f.fourier();
        let t = 0.5;
        let at = ComplexMotionPoint {
            z: vec![c64(0.5, 0.3), c64(-0.2, 0.1)],
            g: ComplexGroupPoint {
                k: GroupElement::U1 { theta: 0.8 },
                h: CartanVector(0.15),
            },
        };
        let v = sb_transform(&spec, t, &at).unwrap();
        let pi = IrrepMeta::new(Backend::U1, 2).unwrap();
        let bargmann = crate::euclid::bargmann_rn(
            &SpectralField {
                grid,
                values: spec.coeff_slice(2, 0, 0).unwrap().to_vec(),
            },
            t,
            &at.z,
        )
        .unwrap();
        let phi = crate::compact::matrix_coefficient_ext(&pi, 1, 1, &at.g).unwrap();
        let expect = ((-pi.casimir * t / 2.0).exp()) * bargmann * phi;
        assert!((v - expect).norm() < 1e-10, "{v} vs {expect}");
    }

    #[test]
    fn sb_transform_guard_trips() {
        let grid = grid_u1();
        let f = single_block(grid, 1);
        let spec = f.fourier();
        let at = ComplexMotionPoint {
            z: vec![c64(0.0, 9.0), c64(0.0, 0.0)],
            g: ComplexGroupPoint::real(GroupElement::identity(Backend::U1)),
        };
        assert!(matches!(
            sb_transform(&spec, 0.5, &at),
            Err(Error::OverflowGuard { .. })
        ));
    }

    #[test]
    fn isometry_single_block_both_modes() {
        let grid = GridSpec::new(2, 12.0, 64).unwrap();
        let t = 0.5;
        let f = single_block(grid, 1);
        let nu = NuMeasure::quadrature_u1(t).unwrap();
        let res = sb_isometry_check(
            &f,
            t,
            &nu,
            YGrid {
                extent: 6.0,
                samples: 40,
            },
        )
        .unwrap();
        assert!(res.check.rel_err < 1e-5, "isometry rel err {}", res.check.rel_err);
        assert!(
            res.mode_agreement.unwrap() < 1e-8,
            "mode agreement {}",
            res.mode_agreement.unwrap()
        );
    }

    #[test]
    fn isometry_zero_field_exact() {
        let grid = grid_u1();
        let f = PwField::empty(Backend::U1, grid, 1);
        let nu = NuMeasure::spectral(Backend::U1, 0.5);
        let res = sb_isometry_check(
            &f,
            0.5,
            &nu,
            YGrid {
                extent: 4.5,
                samples: 8,
            },
        )
        .unwrap();
        assert_eq!(res.check.lhs, 0.0);
        assert_eq!(res.check.rhs, 0.0);
    }

    #[test]
    fn equivariance_under_left_translation() {
        let grid = GridSpec::new(2, 12.0, 64).unwrap();
        let t = 0.5;
        let f = single_block(grid, 1);
        let x0 = [0.7, -0.3];
        let k0 = GroupElement::U1 { theta: 0.9 };
        let translated = crate::motion::left_translate(&f, &x0, &k0);
        let spec_f = f.fourier();
        let spec_t = translated.fourier();
        for &(cell, theta) in &[(64 * 32 + 34, 0.5), (64 * 29 + 30, 2.2)] {
            let x = grid.point(cell);
            let kk = GroupElement::U1 { theta };
            let lhs = sb_transform(&spec_t, t, &ComplexMotionPoint::real(&x[..2], kk)).unwrap();
            let k0i = k0.inverse();
            let arg = k0i.apply(&[x[0] - x0[0], x[1] - x0[1]]);
            let rhs =
                sb_transform(&spec_f, t, &ComplexMotionPoint::real(&arg, k0i.compose(&kk)))
                    .unwrap();
            assert!((lhs - rhs).norm() < 1e-8, "{lhs} vs {rhs}");
        }
    }

    #[test]
    fn sigma_recovers_classical_kernel() {
        // μ = (2π)^n (2πt)^{-n/2} e^{-|y|²/2t} reproduces the heat
        // transform up to the fixed convention constant (2π)^{-n/4}.
        let grid = grid_u1();
        let t = 0.25;
        let mu = move |y: &[f64]| (2.0 * PI).powi(2) * gaussian_weight_mu(2, t, y);
        let ygrid = YGrid {
            extent: 8.0,
            samples: 128,
        };
        let sigma = sigma_from_mu(grid, mu, ygrid).unwrap();
        // σ(x) = (2π)^{n/2} e^{2t|x|²}
        for &flat in &[32 * 16 + 16, 32 * 16 + 20, 32 * 12 + 18] {
            let x = grid.xi_point(flat);
            let r2 = x[0] * x[0] + x[1] * x[1];
            let expect = (2.0 * PI) * (2.0 * t * r2).exp();
            assert!(
                (sigma[flat] - expect).abs() / expect < 1e-8,
                "σ({r2}) = {} vs {expect}",
                sigma[flat]
            );
        }
        let gk = GeneralizedKernelMu::new(grid, sigma, vec![0.0; grid.len()]);
        let f = crate::euclid::ScalarField::from_fn(grid, |x| c64(gaussian(x), 0.0));
        let spec = crate::euclid::fourier(&f).unwrap();
        let transformed = c_psi_spectral(&gk, &spec);
        let z = [c64(0.4, 0.2), c64(-0.3, 0.1)];
        let got = transformed.eval_at_complex(&z);
        let classical = crate::euclid::bargmann_rn(&spec, t, &z).unwrap();
        let ratio = got / classical;
        let expect = (2.0 * PI).powf(-0.5);
        assert!(
            (ratio - c64(expect, 0.0)).norm() < 1e-8,
            "ratio {ratio} vs {expect}"
        );
    }

    #[test]
    fn sigma_divergence_detected() {
        let grid = grid_u1();
        // Sub-exponential decay: e^{2x·y} wins for |x| > 1/2.
        let mu = |y: &[f64]| {
            let r: f64 = y.iter().map(|v| v * v).sum::<f64>().sqrt();
            (-r).exp()
        };
        let res = sigma_from_mu(
            grid,
            mu,
            YGrid {
                extent: 20.0,
                samples: 64,
            },
        );
        assert!(matches!(res, Err(Error::SigmaDiverges { .. })));
    }

    #[test]
    fn compactly_supported_mu_always_converges() {
        let grid = grid_u1();
        let mu = |y: &[f64]| {
            let r2: f64 = y.iter().map(|v| v * v).sum();
            if r2 < 1.0 {
                (1.0 - r2).powi(2)
            } else {
                0.0
            }
        };
        let sigma = sigma_from_mu(
            grid,
            mu,
            YGrid {
                extent: 1.5,
                samples: 64,
            },
        )
        .unwrap();
        assert!(sigma.iter().all(|s| s.is_finite() && *s > 0.0));
    }

    #[test]
    fn psi_symmetry_for_zero_phase() {
        let grid = grid_u1();
        let t = 0.25;
        let mu = move |y: &[f64]| (2.0 * PI).powi(2) * gaussian_weight_mu(2, t, y);
        let sigma = sigma_from_mu(
            grid,
            mu,
            YGrid {
                extent: 8.0,
                samples: 128,
            },
        )
        .unwrap();
        let gk = GeneralizedKernelMu::new(grid, sigma, vec![0.0; grid.len()]);
        let z = [c64(0.3, 0.4), c64(0.2, -0.5)];
        let zc: Vec<C64> = z.iter().map(|v| v.conj()).collect();
        let a = psi_kernel(&gk, &z);
        let b = psi_kernel(&gk, &zc);
        assert!((a.conj() - b).norm() < 1e-12, "ψ(conj z) ≠ conj ψ(z)");
    }

    #[test]
    fn tau_reduces_to_heat_damping_on_u1() {
        let t = 0.8;
        let nu = NuMeasure::spectral(Backend::U1, t);
        let g = ComplexGroupPoint {
            k: GroupElement::U1 { theta: 0.5 },
            h: CartanVector(0.2),
        };
        let got = tau_kernel(&nu, 12, &BTreeMap::new(), &g);
        let mut expect = c64(0.0, 0.0);
        for n in -12i32..=12 {
            // tr(πₙ(g⁻¹)) = e^{-inθ}·e^{+ns}
            let term = c64(0.0, -n as f64 * 0.5).exp() * ((n as f64) * 0.2).exp();
            expect += term * (-((n * n) as f64) * t / 2.0).exp();
        }
        assert!((got - expect).norm() < 1e-12, "{got} vs {expect}");
    }

    #[test]
    fn c_phi_matches_heat_transform_up_to_constant() {
        let grid = GridSpec::new(2, 12.0, 64).unwrap();
        let t = 0.25;
        let f = single_block(grid, 1);
        let spec = f.fourier();
        let mu = move |y: &[f64]| (2.0 * PI).powi(2) * gaussian_weight_mu(2, t, y);
        let sigma = sigma_from_mu(
            grid,
            mu,
            YGrid {
                extent: 8.0,
                samples: 128,
            },
        )
        .unwrap();
        let gk = GeneralizedKernelMu::new(grid, sigma, vec![0.0; grid.len()]);
        let zspec = c_psi_spectral(
            &gk,
            &SpectralField {
                grid,
                values: spec.coeff_slice(1, 0, 0).unwrap().to_vec(),
            },
        );
        let pi1 = IrrepMeta::new(Backend::U1, 1).unwrap();
        for &(theta, h) in &[(0.4, 0.1), (2.0, -0.2)] {
            let g = ComplexGroupPoint {
                k: GroupElement::U1 { theta },
                h: CartanVector(h),
            };
            let z = [c64(0.3, 0.2), c64(0.1, -0.1)];
            // C_τ φ¹(g) = e^{-λt/2} φ¹(g) on u1.
            let phi = crate::compact::matrix_coefficient_ext(&pi1, 1, 1, &g).unwrap();
            let c_phi_val = zspec.eval_at_complex(&z) * (-pi1.casimir * t / 2.0).exp() * phi;
            let c_t = sb_transform(&spec, t, &ComplexMotionPoint { z: z.to_vec(), g }).unwrap();
            let ratio = c_phi_val / c_t;
            assert!(
                (ratio - c64((2.0 * PI).powf(-0.5), 0.0)).norm() < 1e-7,
                "ratio {ratio}"
            );
        }
    }

    #[test]
    fn c_phi_isometry_u1() {
        let grid = GridSpec::new(2, 12.0, 64).unwrap();
        let t = 0.25;
        let f = single_block(grid, 1);
        let mu = move |y: &[f64]| (2.0 * PI).powi(2) * gaussian_weight_mu(2, t, y);
        let ygrid = YGrid {
            extent: 8.0,
            samples: 64,
        };
        let sigma = sigma_from_mu(grid, mu, ygrid).unwrap();
        let gk = GeneralizedKernelMu::new(grid, sigma, vec![0.0; grid.len()]);
        let nu = NuMeasure::spectral(Backend::U1, t);
        let res = c_phi_isometry_check(&f, &gk, &nu, mu, &BTreeMap::new(), ygrid);
        assert!(res.rel_err < 1e-4, "C_φ isometry rel err {}", res.rel_err);
        let zero = PwField::empty(Backend::U1, grid, 1);
        let rz = c_phi_isometry_check(&zero, &gk, &nu, mu, &BTreeMap::new(), ygrid);
        assert_eq!(rz.lhs, 0.0);
        assert_eq!(rz.rhs, 0.0);
    }
}
