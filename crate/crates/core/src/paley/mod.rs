//! Complexified representation actions, `K`-orbit decompositions of
//! Euclidean functions, and the two-sided holomorphic-extension
//! identity
//!
//! `∫_{|y|=r} ∫_K ∫_{Rⁿ} |f(e^{-iH}(x+iy), e^{-iH}k)|² dx dk dμ_r(y)
//!  = ∫_{Rⁿ} ∫_{|y|=r} ‖U^ξ_{(z,g)} f̂(ξ)‖²_HS dμ_r(y) dξ`
//!
//! together with its isotropy-refined partition. With the expansion
//! convention of [`crate::motion`] the spectral side has the closed
//! form (per `(π, λ)`-component)
//!
//! `Λ_n(2r|ξ|)/(d_π d_λ) · Σ_{p,a} Σ_{c,m}
//!   |Σ_{i,l} f̃^{lm}_{ip}(-ξ) φ^λ_{lc}(e^{-iH}) φ^π_{ia}(e^{-iH})|²`,
//!
//! where `Λ_n` is the normalized sphere integral of the exponential
//! (`I₀` for n = 2, `sinh/x` for n = 3) and `f^{lm}_{ip}` are the
//! orbit components of the Peter-Weyl coefficients.

use crate::compact::{
    isotropy_projection, rep_matrix, rep_matrix_ext, Backend, CartanVector, ComplexGroupPoint,
    GroupElement, IrrepMeta, PwBasis, QuadratureRule,
};
use crate::euclid::{
    rotate_scalar, rotate_spectral, sphere_exp_integral_scalar, GridSpec, ScalarField,
    SpectralField, SurfaceRule,
};
use crate::motion::{ComplexMotionPoint, PwField, SpectralPwField};
use crate::{c64, error::Error, Result, C64};
use rayon::prelude::*;
use std::collections::BTreeMap;
use std::f64::consts::PI;

/// Orbit components of a function on `Rⁿ`:
/// `F^{lm}_λ(x) = ∫_K F(k·x) conj(φ^λ_{lm}(k)) dk`, with the
/// reconstruction `F(x) = Σ_λ d_λ Σ_l F^{ll}_λ(x)` at `k = e`.
#[derive(Debug, Clone)]
pub struct OrbitDecomposition {
    pub backend: Backend,
    pub grid: GridSpec,
    pub cutoff: u32,
    /// λ → `d_λ·d_λ·len` component samples on the source grid.
    pub blocks: BTreeMap<i32, Vec<C64>>,
    /// Max reconstruction deviation at the identity over the grid.
    pub reconstruction_residual: f64,
}

impl OrbitDecomposition {
    pub fn component(&self, lambda: i32, l: usize, m: usize) -> Option<&[C64]> {
        let d = IrrepMeta::new(self.backend, lambda).ok()?.degree;
        let len = self.grid.len();
        self.blocks
            .get(&lambda)
            .map(|b| &b[(l * d + m) * len..(l * d + m + 1) * len])
    }

    /// `Σ_λ d_λ Σ_l F^{ll}_λ` on the grid.
    pub fn reconstruct_at_identity(&self) -> Vec<C64> {
        let len = self.grid.len();
        let mut out = vec![c64(0.0, 0.0); len];
        for (label, block) in &self.blocks {
            let d = IrrepMeta::new(self.backend, *label).unwrap().degree;
            for l in 0..d {
                for cell in 0..len {
                    out[cell] += block[(l * d + l) * len + cell] * d as f64;
                }
            }
        }
        out
    }
}

fn decompose_samples(
    backend: Backend,
    grid: GridSpec,
    values: &[C64],
    rotated: impl Fn(&GroupElement) -> Vec<C64>,
    rule: &QuadratureRule,
    cutoff: u32,
) -> Result<OrbitDecomposition> {
    if rule.band_limit < cutoff {
        return Err(Error::BandLimit {
            required: cutoff,
            available: rule.band_limit,
        });
    }
    let len = grid.len();
    let metas = crate::compact::irreps(backend, cutoff);
    let mut blocks: BTreeMap<i32, Vec<C64>> = BTreeMap::new();
    for pi in &metas {
        blocks.insert(pi.label, vec![c64(0.0, 0.0); pi.degree * pi.degree * len]);
    }
    for (node, w) in rule.iter() {
        let rot = rotated(node);
        for pi in &metas {
            let d = pi.degree;
            let phi_conj: Vec<C64> = rep_matrix(pi, node).iter().map(|v| v.conj()).collect();
            let block = blocks.get_mut(&pi.label).unwrap();
            for slot in 0..d * d {
                let pc = phi_conj[slot] * w;
                let dst = &mut block[slot * len..(slot + 1) * len];
                for (cell, r) in rot.iter().enumerate() {
                    dst[cell] += pc * r;
                }
            }
        }
    }
    // Reconstruction residual at k = e.
    let mut out = OrbitDecomposition {
        backend,
        grid,
        cutoff,
        blocks,
        reconstruction_residual: 0.0,
    };
    let rec = out.reconstruct_at_identity();
    let scale = values
        .iter()
        .map(|v| v.norm())
        .fold(0.0, f64::max)
        .max(1e-300);
    out.reconstruction_residual = rec
        .iter()
        .zip(values)
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max)
        / scale;
    Ok(out)
}

/// Orbit-decompose a spatial field through the sample-rotation engine.
pub fn orbit_decompose(
    f: &ScalarField,
    rule: &QuadratureRule,
    cutoff: u32,
) -> Result<OrbitDecomposition> {
    decompose_samples(
        rule.backend,
        f.grid,
        &f.values,
        |k| rotate_scalar(f, k).values,
        rule,
        cutoff,
    )
}

/// Orbit-decompose a spectral field (components of `ξ ↦ F̃(ξ)`).
pub fn orbit_decompose_spectral(
    f: &SpectralField,
    rule: &QuadratureRule,
    cutoff: u32,
) -> Result<OrbitDecomposition> {
    decompose_samples(
        rule.backend,
        f.grid,
        &f.values,
        |k| rotate_spectral(f, k).values,
        rule,
        cutoff,
    )
}

/// Orbit-decompose a closed-form frequency profile by evaluating it at
/// rotated grid frequencies (no interpolation involved).
pub fn orbit_decompose_closure<F>(
    backend: Backend,
    grid: GridSpec,
    f: F,
    rule: &QuadratureRule,
    cutoff: u32,
) -> Result<OrbitDecomposition>
where
    F: Fn(&[f64]) -> C64 + Sync,
{
    let n = grid.n;
    let values: Vec<C64> = (0..grid.len())
        .map(|flat| f(&grid.xi_point(flat)[..n]))
        .collect();
    decompose_samples(
        backend,
        grid,
        &values,
        |k| {
            (0..grid.len())
                .map(|flat| {
                    let xi = grid.xi_point(flat);
                    let rxi = k.apply(&xi[..n]);
                    f(&rxi)
                })
                .collect()
        },
        rule,
        cutoff,
    )
}

/// The complex-orthogonal matrix `exp(i·h·Z)` with `Z` the z-rotation
/// generator: the complexified rotation acting on `Cⁿ`.
pub fn complex_rotation(backend: Backend, h: f64) -> Vec<C64> {
    let (ch, sh) = (h.cosh(), h.sinh());
    match backend {
        // exp(θ K₁) at θ = ih: entries cos(ih) = cosh h, sin(ih) = i sinh h.
        Backend::U1 => vec![c64(ch, 0.0), c64(0.0, -sh), c64(0.0, sh), c64(ch, 0.0)],
        Backend::So3 => vec![
            c64(ch, 0.0),
            c64(0.0, -sh),
            c64(0.0, 0.0),
            c64(0.0, sh),
            c64(ch, 0.0),
            c64(0.0, 0.0),
            c64(0.0, 0.0),
            c64(0.0, 0.0),
            c64(1.0, 0.0),
        ],
    }
}

fn apply_complex_matrix(m: &[C64], v: &[C64], n: usize) -> Vec<C64> {
    (0..n)
        .map(|i| (0..n).map(|j| m[i * n + j] * v[j]).sum())
        .collect()
}

/// Expansion coefficients of `U^ξ_{(z,g)}(√d_γ φ^γ_{pq})` in the
/// truncated basis, with the per-column mass accounting.
#[derive(Debug, Clone)]
pub struct ActionColumn {
    pub coeffs: Vec<C64>,
    /// `‖U e‖²_{L²(K)}` by quadrature (exact mass of the acted vector).
    pub exact_norm_sq: f64,
    /// Mass missing from the truncated expansion.
    pub tail: f64,
}

/// Apply the complexified induced action
/// `(U^ξ_{(z,g)}F)(u) = e^{i⟨x,u·ξ⟩} e^{-⟨y,u·ξ⟩} F(e^{-iH}k⁻¹u)` to a
/// basis vector and expand in the basis of `basis_band`, by quadrature
/// over `rule` (whose band must resolve the plane-wave harmonics to the
/// wanted tolerance — see [`action_band_for`]).
pub fn complexified_action(
    backend: Backend,
    xi: &[f64],
    at: &ComplexMotionPoint,
    gamma: i32,
    p: usize,
    q: usize,
    basis_band: u32,
    rule: &QuadratureRule,
) -> ActionColumn {
    let basis = PwBasis::new(backend, basis_band);
    let dim = basis.dim();
    let gam = IrrepMeta::new(backend, gamma).expect("valid label");
    let dg = gam.degree;
    let scale = (dg as f64).sqrt();
    let k_inv = at.g.k.inverse();
    let x: Vec<f64> = at.z.iter().map(|v| v.re).collect();
    let y: Vec<f64> = at.z.iter().map(|v| v.im).collect();
    let mut coeffs = vec![c64(0.0, 0.0); dim];
    let mut exact = 0.0;
    for (u, w) in rule.iter() {
        let uxi = {
            // u·ξ for the action of K on the frequency side
            u.apply(xi)
        };
        let dot_x: f64 = x.iter().zip(&uxi).map(|(a, b)| a * b).sum();
        let dot_y: f64 = y.iter().zip(&uxi).map(|(a, b)| a * b).sum();
        let weight = c64(0.0, dot_x).exp() * (-dot_y).exp();
        // φ^γ_{pq}(e^{-iH} k⁻¹ u)
        let arg = k_inv.compose(u);
        let ext = rep_matrix_ext(
            &gam,
            &ComplexGroupPoint {
                k: arg,
                h: CartanVector(0.0),
            },
        );
        // left factor: diag(e^{-m·h}) row scaling
        let diag = crate::compact::rep_exp_ih_diagonal(&gam, -at.g.h.0);
        let fval = scale * weight * diag[p] * ext[p * dg + q];
        exact += w * fval.norm_sqr();
        let basis_vals = basis.eval(u);
        for (row, e_row) in basis_vals.iter().enumerate() {
            coeffs[row] += w * fval * e_row.conj();
        }
    }
    let captured: f64 = coeffs.iter().map(|v| v.norm_sqr()).sum();
    ActionColumn {
        coeffs,
        exact_norm_sq: exact,
        tail: (exact - captured).max(0.0),
    }
}

/// Smallest band limit whose plane-wave harmonic tail at argument
/// `max_arg` is below `tol` (the factor `e^{⟨x+iy, u·ξ⟩}`-type
/// exponentials alternate harmonics with Bessel-size coefficients
/// `J_m`, bounded by `(z/2)^m/m!`).
pub fn action_band_for(max_arg: f64, tol: f64) -> u32 {
    let z = max_arg.abs() / 2.0;
    let mut term = 1.0f64;
    let mut m = 0u32;
    while term > tol && m < 400 {
        m += 1;
        term *= z / m as f64;
    }
    m
}

/// Dense matrix of `U^ξ_{(z,g)}` on the truncated basis (columns from
/// [`complexified_action`]).
pub fn u_action_matrix(
    backend: Backend,
    xi: &[f64],
    at: &ComplexMotionPoint,
    basis_band: u32,
    rule: &QuadratureRule,
) -> Vec<C64> {
    let basis = PwBasis::new(backend, basis_band);
    let dim = basis.dim();
    let mut mat = vec![c64(0.0, 0.0); dim * dim];
    for (col, (label, p, q)) in basis.entries.iter().enumerate() {
        let column = complexified_action(backend, xi, at, *label, *p, *q, basis_band, rule);
        for row in 0..dim {
            mat[row * dim + col] = column.coeffs[row];
        }
    }
    mat
}

/// One separable `(π, λ)` test component:
/// `f(x,k) = Σ_{ij} w_{ij} (Σ_l W^{ll}(x)) φ^π_{ij}(k)` with a λ-pure
/// frequency profile `W̃` whose orbit components are tabulated exactly.
#[derive(Debug, Clone)]
pub struct PwComponent {
    pub backend: Backend,
    pub grid: GridSpec,
    pub pi_label: i32,
    pub lambda_label: i32,
    /// `d_π × d_π` weights `w_{ij}`.
    pub weights: Vec<C64>,
    /// Orbit components `W̃^{lm}(ξ)`, layout `d_λ·d_λ·len`.
    pub profile: Vec<C64>,
    /// The full profile `W̃(ξ)` on the grid.
    pub profile_full: Vec<C64>,
}

impl PwComponent {
    /// Build a component from a closed-form λ-pure frequency profile.
    pub fn new<F>(
        backend: Backend,
        grid: GridSpec,
        pi_label: i32,
        lambda_label: i32,
        weights: Vec<C64>,
        profile: F,
        rule: &QuadratureRule,
    ) -> Result<Self>
    where
        F: Fn(&[f64]) -> C64 + Sync,
    {
        let dp = IrrepMeta::new(backend, pi_label)?.degree;
        if weights.len() != dp * dp {
            return Err(Error::Config(format!(
                "component weights must be d_π² = {}, got {}",
                dp * dp,
                weights.len()
            )));
        }
        let decomp = orbit_decompose_closure(
            backend,
            grid,
            &profile,
            rule,
            lambda_label.unsigned_abs(),
        )?;
        let dl = IrrepMeta::new(backend, lambda_label)?.degree;
        let len = grid.len();
        let block = decomp
            .blocks
            .get(&lambda_label)
            .cloned()
            .unwrap_or_else(|| vec![c64(0.0, 0.0); dl * dl * len]);
        // Purity check: other labels must not carry mass.
        for (label, other) in &decomp.blocks {
            if *label == lambda_label {
                continue;
            }
            let m = other.iter().map(|v| v.norm()).fold(0.0, f64::max);
            let scale = block.iter().map(|v| v.norm()).fold(0.0, f64::max);
            if m > 1e-8 * scale.max(1e-300) {
                return Err(Error::Config(format!(
                    "profile is not λ-pure: label {label} carries relative mass {m:.3e}"
                )));
            }
        }
        let n = grid.n;
        let profile_full: Vec<C64> = (0..len)
            .map(|flat| profile(&grid.xi_point(flat)[..n]))
            .collect();
        Ok(PwComponent {
            backend,
            grid,
            pi_label,
            lambda_label,
            weights,
            profile: block,
            profile_full,
        })
    }

    pub fn d_pi(&self) -> usize {
        IrrepMeta::new(self.backend, self.pi_label).unwrap().degree
    }

    pub fn d_lambda(&self) -> usize {
        IrrepMeta::new(self.backend, self.lambda_label).unwrap().degree
    }

    /// The component as a spectral Peter-Weyl field:
    /// block `f̃^π_{ij} = w_{ij}·W̃/(d_π d_λ)`.
    pub fn spectral_pw(&self) -> SpectralPwField {
        let dp = self.d_pi();
        let dl = self.d_lambda() as f64;
        let len = self.grid.len();
        let mut out = SpectralPwField::empty(self.backend, self.grid, self.pi_label.unsigned_abs());
        out.extendable = true;
        let block = out.block_mut(self.pi_label);
        for i in 0..dp {
            for j in 0..dp {
                let w = self.weights[i * dp + j] / (dp as f64 * dl);
                for cell in 0..len {
                    block[(i * dp + j) * len + cell] = w * self.profile_full[cell];
                }
            }
        }
        out
    }

    /// The component as a spatial Peter-Weyl field.
    pub fn to_pw_field(&self) -> PwField {
        self.spectral_pw().inverse_fourier()
    }

    /// `f̃^{lm}_{ip}(ξ)` at a frequency cell: `w_{ip}·W̃^{lm}(ξ)`.
    #[inline]
    pub fn coeff(&self, l: usize, m: usize, i: usize, p: usize, cell: usize) -> C64 {
        let dl = self.d_lambda();
        let dp = self.d_pi();
        let len = self.grid.len();
        self.weights[i * dp + p] * self.profile[(l * dl + m) * len + cell]
    }
}

fn negate_cell(grid: &GridSpec, flat: usize) -> usize {
    let nn = grid.samples;
    let idx = grid.unflatten(flat);
    let mut out = 0usize;
    for a in 0..grid.n {
        out = out * nn + (nn - idx[a]) % nn;
    }
    out
}

/// The closed-form spectral integrand at one frequency cell:
/// `Σ_{(π,λ)} Λ_n(2r|ξ|)/(d_π d_λ) Σ_{p,a} Σ_{c,m}
///  |Σ_{i,l} f̃^{lm}_{ip}(-ξ) φ^λ_{lc}(e^{-iH}) φ^π_{ia}(e^{-iH})|²`.
pub fn pw_spectral_integrand(components: &[PwComponent], r: f64, h: f64, flat: usize) -> f64 {
    if components.is_empty() {
        return 0.0;
    }
    let grid = components[0].grid;
    let n = grid.n;
    let xi = grid.xi_point(flat);
    let xin: f64 = xi[..n].iter().map(|v| v * v).sum::<f64>().sqrt();
    let bessel = sphere_exp_integral_scalar(n, 2.0 * r * xin);
    let neg = negate_cell(&grid, flat);
    // Group components by (π, λ).
    let mut groups: BTreeMap<(i32, i32), Vec<&PwComponent>> = BTreeMap::new();
    for c in components {
        groups
            .entry((c.pi_label, c.lambda_label))
            .or_default()
            .push(c);
    }
    let mut total = 0.0;
    for ((pi_label, lambda_label), comps) in groups {
        let backend = comps[0].backend;
        let pi = IrrepMeta::new(backend, pi_label).unwrap();
        let lam = IrrepMeta::new(backend, lambda_label).unwrap();
        let (dp, dl) = (pi.degree, lam.degree);
        let phi_pi = rep_matrix_ext(
            &pi,
            &ComplexGroupPoint::from_cartan(backend, -h),
        );
        let phi_lam = rep_matrix_ext(
            &lam,
            &ComplexGroupPoint::from_cartan(backend, -h),
        );
        let mut sum = 0.0;
        for p in 0..dp {
            for a in 0..dp {
                for cc in 0..dl {
                    for m in 0..dl {
                        let mut s = c64(0.0, 0.0);
                        for i in 0..dp {
                            for l in 0..dl {
                                let mut amp = c64(0.0, 0.0);
                                for comp in &comps {
                                    amp += comp.coeff(l, m, i, p, neg);
                                }
                                s += amp * phi_lam[l * dl + cc] * phi_pi[i * dp + a];
                            }
                        }
                        sum += s.norm_sqr();
                    }
                }
            }
        }
        total += bessel * sum / (dp as f64 * dl as f64);
    }
    total
}

/// Spectral side of the identity:
/// `∫ [sphere-averaged ‖U^ξ f̂(ξ)‖²_HS](ξ) dξ` over the frequency grid
/// (normalized measure).
pub fn pw_spectral_side(components: &[PwComponent], r: f64, h: f64) -> f64 {
    if components.is_empty() {
        return 0.0;
    }
    let grid = components[0].grid;
    let n = grid.n as f64;
    let cells: Vec<f64> = (0..grid.len())
        .into_par_iter()
        .map(|flat| pw_spectral_integrand(components, r, h, flat))
        .collect();
    cells.iter().sum::<f64>() * grid.xi_cell_volume() * (2.0 * PI).powf(-n / 2.0)
}

/// Direct operator-quadrature oracle for the sphere-averaged
/// Hilbert-Schmidt norm at one frequency cell: evaluates
/// `∫_{|y|=r} (1/d_π) Σ_{p,q} ∫_K e^{-2⟨y,u·ξ⟩}
///  |Σ_{ilm} f̃^{lm}_{ip}(-ξ) φ^λ_{lm}(e^{-iH}u) φ^π_{iq}(e^{-iH}u)|² du dμ_r`
/// by honest quadrature in both `u` and the sphere.
pub fn pw_direct_hs_at(
    components: &[PwComponent],
    r: f64,
    h: f64,
    flat: usize,
    u_rule: &QuadratureRule,
    sphere: &SurfaceRule,
) -> f64 {
    if components.is_empty() {
        return 0.0;
    }
    let grid = components[0].grid;
    let n = grid.n;
    let xi = grid.xi_point(flat);
    let neg = negate_cell(&grid, flat);
    let mut groups: BTreeMap<(i32, i32), Vec<&PwComponent>> = BTreeMap::new();
    for c in components {
        groups
            .entry((c.pi_label, c.lambda_label))
            .or_default()
            .push(c);
    }
    let mut total = 0.0;
    for sp in 0..sphere.len() {
        let w_y = sphere.weights[sp];
        let y: Vec<f64> = sphere.point(sp).iter().map(|v| v * r).collect();
        for ((pi_label, lambda_label), comps) in &groups {
            let backend = comps[0].backend;
            let pi = IrrepMeta::new(backend, *pi_label).unwrap();
            let lam = IrrepMeta::new(backend, *lambda_label).unwrap();
            let (dp, dl) = (pi.degree, lam.degree);
            let diag_pi = crate::compact::rep_exp_ih_diagonal(&pi, -h);
            let diag_lam = crate::compact::rep_exp_ih_diagonal(&lam, -h);
            let mut acc = 0.0;
            for (u, w_u) in u_rule.iter() {
                let uxi = u.apply(&xi[..n]);
                let dot: f64 = y.iter().zip(&uxi).map(|(a, b)| a * b).sum();
                let damp = (-2.0 * dot).exp();
                let du_pi = rep_matrix(&pi, u);
                let du_lam = rep_matrix(&lam, u);
                for p in 0..dp {
                    for q in 0..dp {
                        let mut s = c64(0.0, 0.0);
                        for i in 0..dp {
                            // φ^π_{iq}(e^{-iH}u) = e^{-m_i h} D^π(u)_{iq}
                            let pf = diag_pi[i] * du_pi[i * dp + q];
                            for l in 0..dl {
                                for m in 0..dl {
                                    let mut amp = c64(0.0, 0.0);
                                    for comp in comps {
                                        amp += comp.coeff(l, m, i, p, neg);
                                    }
                                    s += amp * diag_lam[l] * du_lam[l * dl + m] * pf;
                                }
                            }
                        }
                        acc += w_u * damp * s.norm_sqr();
                    }
                }
            }
            total += w_y * acc / dp as f64;
        }
    }
    total
}

/// Sphere-averaged cross inner product of two components (same `π`,
/// inequivalent `λ`): vanishes by Schur orthogonality once the sphere
/// average removes the `u`-dependence of the weight.
pub fn pw_cross_term_at(
    a: &PwComponent,
    b: &PwComponent,
    r: f64,
    h: f64,
    flat: usize,
    u_rule: &QuadratureRule,
) -> C64 {
    let grid = a.grid;
    let n = grid.n;
    let xi = grid.xi_point(flat);
    let xin: f64 = xi[..n].iter().map(|v| v * v).sum::<f64>().sqrt();
    let bessel = sphere_exp_integral_scalar(n, 2.0 * r * xin);
    let neg = negate_cell(&grid, flat);
    if a.pi_label != b.pi_label {
        // Columns live on inequivalent irreps: structurally zero.
        return c64(0.0, 0.0);
    }
    let backend = a.backend;
    let pi = IrrepMeta::new(backend, a.pi_label).unwrap();
    let dp = pi.degree;
    let diag_pi = crate::compact::rep_exp_ih_diagonal(&pi, -h);
    let lam_a = IrrepMeta::new(backend, a.lambda_label).unwrap();
    let lam_b = IrrepMeta::new(backend, b.lambda_label).unwrap();
    let (dla, dlb) = (lam_a.degree, lam_b.degree);
    let diag_a = crate::compact::rep_exp_ih_diagonal(&lam_a, -h);
    let diag_b = crate::compact::rep_exp_ih_diagonal(&lam_b, -h);
    let mut acc = c64(0.0, 0.0);
    for (u, w_u) in u_rule.iter() {
        let du_pi = rep_matrix(&pi, u);
        let du_a = rep_matrix(&lam_a, u);
        let du_b = rep_matrix(&lam_b, u);
        for p in 0..dp {
            for q in 0..dp {
                let mut sa = c64(0.0, 0.0);
                let mut sb = c64(0.0, 0.0);
                for i in 0..dp {
                    let pf = diag_pi[i] * du_pi[i * dp + q];
                    for l in 0..dla {
                        for m in 0..dla {
                            sa += a.coeff(l, m, i, p, neg) * diag_a[l] * du_a[l * dla + m] * pf;
                        }
                    }
                    for l in 0..dlb {
                        for m in 0..dlb {
                            sb += b.coeff(l, m, i, p, neg) * diag_b[l] * du_b[l * dlb + m] * pf;
                        }
                    }
                }
                acc += w_u * sa * sb.conj();
            }
        }
    }
    acc * bessel / dp as f64
}

/// Physical side of the identity by full quadrature: sphere in `y`,
/// spatial grid in `x`, `K`-quadrature in `k`, with the holomorphic
/// extension evaluated from the frequency sum at the complex-rotated
/// argument `e^{-iH}(x+iy)`.
pub fn pw_physical_side(
    components: &[PwComponent],
    r: f64,
    h: f64,
    sphere: &SurfaceRule,
    k_rule: &QuadratureRule,
) -> f64 {
    if components.is_empty() {
        return 0.0;
    }
    let grid = components[0].grid;
    let n = grid.n;
    let backend = components[0].backend;
    let len = grid.len();
    let q_mat = complex_rotation(backend, -h);
    // t_c(k) = Σ_{ij} w^c_{ij} [E_{-h} D(k)]_{ij} / d_λ(c): the K-part
    // factor of each component at e^{-iH}k.
    let kfactors: Vec<Vec<C64>> = k_rule
        .nodes
        .iter()
        .map(|k| {
            components
                .iter()
                .map(|comp| {
                    let pi = IrrepMeta::new(backend, comp.pi_label).unwrap();
                    let dp = pi.degree;
                    let diag = crate::compact::rep_exp_ih_diagonal(&pi, -h);
                    let dk = rep_matrix(&pi, k);
                    let mut t = c64(0.0, 0.0);
                    for i in 0..dp {
                        for j in 0..dp {
                            t += comp.weights[i * dp + j] * diag[i] * dk[i * dp + j];
                        }
                    }
                    t / comp.d_lambda() as f64
                })
                .collect()
        })
        .collect();
    let norm_const = (2.0 * PI).powf(-(n as f64) / 2.0);
    let fourier_const = norm_const * grid.xi_cell_volume();
    let mut total = 0.0;
    for sp in 0..sphere.len() {
        let w_y = sphere.weights[sp];
        let y: Vec<f64> = sphere.point(sp).iter().map(|v| v * r).collect();
        let cell_values: Vec<f64> = (0..len)
            .into_par_iter()
            .map(|cell| {
                let xp = grid.point(cell);
                // w = e^{-iH}(x + iy)
                let zvec: Vec<C64> = (0..n).map(|a| c64(xp[a], y[a])).collect();
                let w = apply_complex_matrix(&q_mat, &zvec, n);
                // One frequency pass evaluating every component profile,
                // with per-axis phase tables e^{i ξ_m w_a}.
                let nn = grid.samples;
                let mut tables: Vec<Vec<C64>> = Vec::with_capacity(n);
                for wa in w.iter().take(n) {
                    let mut row = Vec::with_capacity(nn);
                    for m in 0..nn {
                        row.push((c64(0.0, grid.xi_coord(m)) * wa).exp());
                    }
                    tables.push(row);
                }
                let mut vals = vec![c64(0.0, 0.0); components.len()];
                match n {
                    2 => {
                        for i0 in 0..nn {
                            let p0 = tables[0][i0];
                            let base = i0 * nn;
                            for i1 in 0..nn {
                                let phase = p0 * tables[1][i1];
                                for (ci, comp) in components.iter().enumerate() {
                                    vals[ci] += comp.profile_full[base + i1] * phase;
                                }
                            }
                        }
                    }
                    3 => {
                        for i0 in 0..nn {
                            let p0 = tables[0][i0];
                            for i1 in 0..nn {
                                let p01 = p0 * tables[1][i1];
                                let base = (i0 * nn + i1) * nn;
                                for i2 in 0..nn {
                                    let phase = p01 * tables[2][i2];
                                    for (ci, comp) in components.iter().enumerate() {
                                        vals[ci] += comp.profile_full[base + i2] * phase;
                                    }
                                }
                            }
                        }
                    }
                    _ => unreachable!(),
                }
                for v in vals.iter_mut() {
                    *v *= fourier_const;
                }
                // K-quadrature of |Σ_c W_c(w)·t_c(k)|².
                let mut acc = 0.0;
                for (kidx, w_k) in k_rule.weights.iter().enumerate() {
                    let mut s = c64(0.0, 0.0);
                    for (ci, v) in vals.iter().enumerate() {
                        s += v * kfactors[kidx][ci];
                    }
                    acc += w_k * s.norm_sqr();
                }
                acc
            })
            .collect();
        total += w_y * cell_values.iter().sum::<f64>();
    }
    total * grid.cell_volume() * norm_const
}

/// Two-sided identity result with the cross-term diagnostics.
#[derive(Debug, Clone)]
pub struct PwIdentity {
    pub check: crate::check::CheckResult,
    /// Largest sphere-averaged cross term between inequivalent
    /// component pairs, sampled over frequency cells.
    pub cross_term_max: f64,
}

/// Verify the two-sided identity on a component family and bound the
/// cross terms of inequivalent components.
pub fn pw_identity_check(
    components: &[PwComponent],
    r: f64,
    h: f64,
    sphere: &SurfaceRule,
    k_rule: &QuadratureRule,
    u_rule: &QuadratureRule,
    cross_cells: &[usize],
) -> PwIdentity {
    let lhs = pw_physical_side(components, r, h, sphere, k_rule);
    let rhs = pw_spectral_side(components, r, h);
    let mut cross = 0.0f64;
    for i in 0..components.len() {
        for j in i + 1..components.len() {
            let (a, b) = (&components[i], &components[j]);
            if a.pi_label == b.pi_label && a.lambda_label == b.lambda_label {
                continue;
            }
            for &cell in cross_cells {
                cross = cross.max(pw_cross_term_at(a, b, r, h, cell, u_rule).norm());
            }
        }
    }
    PwIdentity {
        check: crate::check::CheckResult::new(lhs, rhs),
        cross_term_max: cross,
    }
}

/// σ-refined partition of the action norm at one frequency:
/// `‖U^ξ_{(z,g)} f̂(ξ)‖²_HS = Σ_σ d_σ ‖(U f̂)|_{H^σ}‖²` with
/// `H^σ = P^σ L²(K)` built from the isotropy group of `ξ`.
#[derive(Debug, Clone, serde::Serialize)]
pub struct SigmaRefined {
    pub total: f64,
    pub sigmas: Vec<i32>,
    pub per_sigma: Vec<f64>,
    pub partition_rel_err: f64,
}

/// Compress an operator matrix on the band-limited basis with the
/// isotropy projections `P^σ` and compare the σ-sum with the total.
pub fn sigma_refined_partition(
    backend: Backend,
    xi: &[f64],
    op: &[C64],
    basis_band: u32,
) -> Result<SigmaRefined> {
    let basis = PwBasis::new(backend, basis_band);
    let dim = basis.dim();
    if op.len() != dim * dim {
        return Err(Error::Config(format!(
            "operator is {}², basis needs {dim}²",
            (op.len() as f64).sqrt() as usize
        )));
    }
    let total: f64 = op.iter().map(|v| v.norm_sqr()).sum();
    let sigmas: Vec<i32> = match backend {
        Backend::U1 => vec![0],
        Backend::So3 => (-(basis_band as i32)..=basis_band as i32).collect(),
    };
    let mut per_sigma = Vec::with_capacity(sigmas.len());
    let mut sum = 0.0;
    for &sigma in &sigmas {
        let proj = isotropy_projection(backend, sigma, xi, basis_band)?;
        // ‖P^σ A P^σ‖²_F (d_σ = 1 for the rank-one isotropy groups).
        let mut pa = vec![c64(0.0, 0.0); dim * dim];
        for i in 0..dim {
            for j in 0..dim {
                let mut acc = c64(0.0, 0.0);
                for t in 0..dim {
                    acc += proj.mat[i * dim + t] * op[t * dim + j];
                }
                pa[i * dim + j] = acc;
            }
        }
        let mut value = 0.0;
        for i in 0..dim {
            for j in 0..dim {
                let mut acc = c64(0.0, 0.0);
                for t in 0..dim {
                    acc += pa[i * dim + t] * proj.mat[t * dim + j];
                }
                value += acc.norm_sqr();
            }
        }
        per_sigma.push(value);
        sum += value;
    }
    Ok(SigmaRefined {
        total,
        sigmas,
        per_sigma,
        partition_rel_err: (sum - total).abs() / total.max(1e-300),
    })
}
