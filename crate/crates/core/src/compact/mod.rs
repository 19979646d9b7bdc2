//! Representation-theoretic backend for the compact factor `K ⊆ SO(n)`.
//!
//! Two concrete backends are provided:
//!
//! * [`Backend::U1`] — `K = SO(2)` acting on `R²`; irreducible
//!   representations are the characters `θ ↦ e^{inθ}`, `n ∈ Z`.
//! * [`Backend::So3`] — `K = SO(3)` acting on `R³`; irreducible
//!   representations are the Wigner matrices `D^l`, `l ∈ Z≥0`, in the
//!   convention `D^l_{mn}(α,β,γ) = e^{-imα} d^l_{mn}(β) e^{-inγ}` with
//!   ZYZ Euler angles and matrix index `i = m + l + 1`.
//!
//! The generator normalization fixes the Casimir eigenvalues to
//! `λ_n = n²` (U(1)) and `λ_l = l(l+1)` (SO(3)); the Ad-invariant inner
//! product on the Lie algebra is `⟨X,Y⟩ = -½ tr(XY)` in the defining
//! `n×n` realization, which gives the z-generator unit norm. Holomorphic
//! extension to the complexification `G` is through the polar form
//! `g = k·exp(iH)` with `H` in the (rank-one) Cartan subalgebra, where
//! `π(exp(iH)) = diag(e^{m·h})` over the weights `m`.

pub mod wigner;

use crate::{c64, check::Truncated, error::Error, Result, C64};
use std::f64::consts::PI;
use wigner::{
    euler_to_matrix, gauss_legendre, mat3_apply, mat3_mul, mat3_transpose, matrix_to_euler,
    wigner_small_d_matrix,
};

/// Which compact group backs the computation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum Backend {
    /// `K = SO(2)`, Euclidean dimension 2.
    U1,
    /// `K = SO(3)`, Euclidean dimension 3.
    So3,
}

impl Backend {
    /// Dimension `n` of the Euclidean factor the group acts on.
    pub fn dim(self) -> usize {
        match self {
            Backend::U1 => 2,
            Backend::So3 => 3,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Backend::U1 => "u1",
            Backend::So3 => "so3",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "u1" | "U1" | "so2" | "m2" => Ok(Backend::U1),
            "so3" | "SO3" | "m3" => Ok(Backend::So3),
            other => Err(Error::Config(format!("unknown backend `{other}`"))),
        }
    }
}

/// Metadata of one irreducible unitary representation of `K`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IrrepMeta {
    /// U(1): `n ∈ Z`; SO(3): `l ∈ Z≥0`.
    pub label: i32,
    /// Degree `d_π`.
    pub degree: usize,
    /// Casimir eigenvalue `λ_π ≥ 0` with `π(Δ_K) = -λ_π·I`.
    pub casimir: f64,
    /// Highest-weight norm `|μ|`.
    pub hw_norm: f64,
    pub backend: Backend,
}

impl IrrepMeta {
    pub fn new(backend: Backend, label: i32) -> Result<Self> {
        match backend {
            Backend::U1 => Ok(IrrepMeta {
                label,
                degree: 1,
                casimir: (label as f64).powi(2),
                hw_norm: (label as f64).abs(),
                backend,
            }),
            Backend::So3 => {
                if label < 0 {
                    return Err(Error::Config(format!(
                        "so3 irrep label must be nonnegative, got {label}"
                    )));
                }
                let l = label as f64;
                Ok(IrrepMeta {
                    label,
                    degree: (2 * label + 1) as usize,
                    casimir: l * (l + 1.0),
                    hw_norm: l,
                    backend,
                })
            }
        }
    }

    /// Signed weight attached to 0-based matrix index `i` (`m = i - l`).
    pub fn weight(&self, i: usize) -> i32 {
        match self.backend {
            Backend::U1 => self.label,
            Backend::So3 => i as i32 - self.label,
        }
    }
}

/// All irreducible representations up to the band limit.
///
/// U(1): labels `-cutoff..=cutoff`; SO(3): labels `0..=cutoff`.
pub fn irreps(backend: Backend, cutoff: u32) -> Vec<IrrepMeta> {
    let labels: Vec<i32> = match backend {
        Backend::U1 => (-(cutoff as i32)..=cutoff as i32).collect(),
        Backend::So3 => (0..=cutoff as i32).collect(),
    };
    labels
        .into_iter()
        .map(|l| IrrepMeta::new(backend, l).expect("label range is valid"))
        .collect()
}

/// A group element in backend-specific coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GroupElement {
    /// Rotation of the plane by `θ ∈ [0, 2π)`.
    U1 { theta: f64 },
    /// ZYZ Euler angles, `α, γ ∈ [0, 2π)`, `β ∈ [0, π]`.
    So3 { alpha: f64, beta: f64, gamma: f64 },
}

impl GroupElement {
    pub fn identity(backend: Backend) -> Self {
        match backend {
            Backend::U1 => GroupElement::U1 { theta: 0.0 },
            Backend::So3 => GroupElement::So3 {
                alpha: 0.0,
                beta: 0.0,
                gamma: 0.0,
            },
        }
    }

    pub fn backend(&self) -> Backend {
        match self {
            GroupElement::U1 { .. } => Backend::U1,
            GroupElement::So3 { .. } => Backend::So3,
        }
    }

    /// Group composition `self · other`.
    pub fn compose(&self, other: &GroupElement) -> GroupElement {
        match (self, other) {
            (GroupElement::U1 { theta: a }, GroupElement::U1 { theta: b }) => GroupElement::U1 {
                theta: (a + b).rem_euclid(2.0 * PI),
            },
            (
                GroupElement::So3 {
                    alpha: a1,
                    beta: b1,
                    gamma: g1,
                },
                GroupElement::So3 {
                    alpha: a2,
                    beta: b2,
                    gamma: g2,
                },
            ) => {
                let r = mat3_mul(&euler_to_matrix(*a1, *b1, *g1), &euler_to_matrix(*a2, *b2, *g2));
                let (alpha, beta, gamma) = matrix_to_euler(&r);
                GroupElement::So3 { alpha, beta, gamma }
            }
            _ => panic!("backend mismatch in group composition"),
        }
    }

    pub fn inverse(&self) -> GroupElement {
        match self {
            GroupElement::U1 { theta } => GroupElement::U1 {
                theta: (-theta).rem_euclid(2.0 * PI),
            },
            GroupElement::So3 { alpha, beta, gamma } => {
                let r = mat3_transpose(&euler_to_matrix(*alpha, *beta, *gamma));
                let (alpha, beta, gamma) = matrix_to_euler(&r);
                GroupElement::So3 { alpha, beta, gamma }
            }
        }
    }

    /// Defining `n×n` rotation-matrix realization, row-major.
    pub fn rotation_matrix(&self) -> Vec<f64> {
        match self {
            GroupElement::U1 { theta } => {
                let (s, c) = theta.sin_cos();
                vec![c, -s, s, c]
            }
            GroupElement::So3 { alpha, beta, gamma } => {
                let r = euler_to_matrix(*alpha, *beta, *gamma);
                r.iter().flat_map(|row| row.iter().copied()).collect()
            }
        }
    }

    /// Apply the rotation to a Euclidean vector.
    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        match self {
            GroupElement::U1 { theta } => {
                let (s, c) = theta.sin_cos();
                vec![c * v[0] - s * v[1], s * v[0] + c * v[1]]
            }
            GroupElement::So3 { alpha, beta, gamma } => {
                let r = euler_to_matrix(*alpha, *beta, *gamma);
                mat3_apply(&r, [v[0], v[1], v[2]]).to_vec()
            }
        }
    }
}

/// Element of the rank-one Cartan subalgebra: `H = h·K₁` (U(1)) or
/// `H = h·L₃` (SO(3)), with `|H| = |h|` under `⟨X,Y⟩ = -½ tr(XY)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CartanVector(pub f64);

impl CartanVector {
    pub fn norm(&self) -> f64 {
        self.0.abs()
    }
}

/// A point `g = k·exp(iH)` of the complexification `G`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexGroupPoint {
    pub k: GroupElement,
    pub h: CartanVector,
}

impl ComplexGroupPoint {
    pub fn real(k: GroupElement) -> Self {
        ComplexGroupPoint {
            k,
            h: CartanVector(0.0),
        }
    }

    pub fn from_cartan(backend: Backend, h: f64) -> Self {
        ComplexGroupPoint {
            k: GroupElement::identity(backend),
            h: CartanVector(h),
        }
    }

    pub fn backend(&self) -> Backend {
        self.k.backend()
    }
}

/// Dense `d×d` matrix of `π(k)`, row-major over 0-based indices.
pub fn rep_matrix(pi: &IrrepMeta, k: &GroupElement) -> Vec<C64> {
    match (pi.backend, k) {
        (Backend::U1, GroupElement::U1 { theta }) => {
            vec![(c64(0.0, pi.label as f64 * theta)).exp()]
        }
        (Backend::So3, GroupElement::So3 { alpha, beta, gamma }) => {
            let l = pi.label as i64;
            let d = pi.degree;
            let small = wigner_small_d_matrix(l, *beta);
            let mut out = vec![c64(0.0, 0.0); d * d];
            for i in 0..d {
                let m = i as f64 - l as f64;
                let pa = c64(0.0, -m * alpha).exp();
                for j in 0..d {
                    let n = j as f64 - l as f64;
                    let pg = c64(0.0, -n * gamma).exp();
                    out[i * d + j] = pa * pg * small[i * d + j];
                }
            }
            out
        }
        _ => panic!("backend mismatch in rep_matrix"),
    }
}

/// Diagonal of `π(exp(iH))` for `H = h·(z-generator)`: entries `e^{m·h}`
/// over the weights `m` in index order. For U(1) the single weight of
/// the label-`n` character gives `e^{-n·h}`.
pub fn rep_exp_ih_diagonal(pi: &IrrepMeta, h: f64) -> Vec<f64> {
    match pi.backend {
        Backend::U1 => vec![(-(pi.label as f64) * h).exp()],
        Backend::So3 => {
            let l = pi.label;
            (0..pi.degree)
                .map(|i| (((i as i32 - l) as f64) * h).exp())
                .collect()
        }
    }
}

/// Dense matrix of the holomorphic extension `π(g) = π(k)·π(exp(iH))`.
pub fn rep_matrix_ext(pi: &IrrepMeta, g: &ComplexGroupPoint) -> Vec<C64> {
    let mut m = rep_matrix(pi, &g.k);
    let diag = rep_exp_ih_diagonal(pi, g.h.0);
    let d = pi.degree;
    for row in 0..d {
        for (col, scale) in diag.iter().enumerate() {
            m[row * d + col] *= scale;
        }
    }
    m
}

/// Dense matrix of the three-factor point `k₁·exp(iH)·k₂`.
pub fn rep_matrix_three_factor(
    pi: &IrrepMeta,
    k1: &GroupElement,
    h: f64,
    k2: &GroupElement,
) -> Vec<C64> {
    let d = pi.degree;
    let left = rep_matrix_ext(
        pi,
        &ComplexGroupPoint {
            k: *k1,
            h: CartanVector(h),
        },
    );
    let right = rep_matrix(pi, k2);
    let mut out = vec![c64(0.0, 0.0); d * d];
    for i in 0..d {
        for j in 0..d {
            let mut acc = c64(0.0, 0.0);
            for a in 0..d {
                acc += left[i * d + a] * right[a * d + j];
            }
            out[i * d + j] = acc;
        }
    }
    out
}

/// Single matrix coefficient `φ^π_{ij}(k)` with 1-based indices
/// (`i = m + l + 1` for SO(3)).
pub fn matrix_coefficient(pi: &IrrepMeta, i: usize, j: usize, k: &GroupElement) -> Result<C64> {
    check_indices(pi, i, j)?;
    Ok(rep_matrix(pi, k)[(i - 1) * pi.degree + (j - 1)])
}

/// Holomorphic extension `φ^π_{ij}(g)` of a matrix coefficient,
/// restricting to [`matrix_coefficient`] at `H = 0`.
pub fn matrix_coefficient_ext(
    pi: &IrrepMeta,
    i: usize,
    j: usize,
    g: &ComplexGroupPoint,
) -> Result<C64> {
    check_indices(pi, i, j)?;
    Ok(rep_matrix_ext(pi, g)[(i - 1) * pi.degree + (j - 1)])
}

fn check_indices(pi: &IrrepMeta, i: usize, j: usize) -> Result<()> {
    if i == 0 || j == 0 || i > pi.degree || j > pi.degree {
        return Err(Error::IndexOutOfRange {
            i,
            j,
            degree: pi.degree,
        });
    }
    Ok(())
}

/// Character `χ_π(k) = tr π(k)`.
pub fn character(pi: &IrrepMeta, k: &GroupElement) -> C64 {
    let d = pi.degree;
    let m = rep_matrix(pi, k);
    (0..d).map(|i| m[i * d + i]).sum()
}

/// `χ_π(exp(2iH))`, real-valued on the Cartan subalgebra:
/// `Σ_m e^{2m·h}`, which is `sinh((2l+1)h)/sinh(h)` for SO(3) and the
/// single-weight value `e^{-2n·h}` for U(1).
pub fn character_ext(pi: &IrrepMeta, h: &CartanVector) -> f64 {
    match pi.backend {
        Backend::U1 => (-2.0 * pi.label as f64 * h.0).exp(),
        Backend::So3 => {
            let l = pi.label as f64;
            let x = 2.0 * h.0;
            if x.abs() < 1e-9 {
                // sinh((2l+1)h)/sinh(h) → 2l+1 with O(h²) correction.
                let d = 2.0 * l + 1.0;
                d + d * (d * d - 1.0) * x * x / 24.0
            } else {
                ((l + 0.5) * x).sinh() / (0.5 * x).sinh()
            }
        }
    }
}

/// Character of the full complex point, `tr π(k·exp(iH))`.
pub fn character_ext_point(pi: &IrrepMeta, g: &ComplexGroupPoint) -> C64 {
    let d = pi.degree;
    let m = rep_matrix_ext(pi, g);
    (0..d).map(|i| m[i * d + i]).sum()
}

/// Quadrature rule on `K`, exact for products of matrix coefficients of
/// irreps up to the declared band limit.
#[derive(Debug, Clone)]
pub struct QuadratureRule {
    pub backend: Backend,
    pub band_limit: u32,
    pub nodes: Vec<GroupElement>,
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&GroupElement, f64)> {
        self.nodes.iter().zip(self.weights.iter().copied())
    }
}

/// Build the Haar quadrature: uniform angles for U(1), a product rule
/// (uniform α and γ, Gauss-Legendre in cos β) for SO(3). Exact to
/// machine precision for `φ^π_{ij}·conj(φ^λ_{lm})` with both irreps up
/// to `band_limit`.
pub fn quadrature(backend: Backend, band_limit: u32) -> QuadratureRule {
    match backend {
        Backend::U1 => {
            let count = (2 * band_limit + 2) as usize;
            let nodes = (0..count)
                .map(|j| GroupElement::U1 {
                    theta: 2.0 * PI * j as f64 / count as f64,
                })
                .collect();
            QuadratureRule {
                backend,
                band_limit,
                nodes,
                weights: vec![1.0 / count as f64; count],
            }
        }
        Backend::So3 => {
            let n_ang = (2 * band_limit + 2) as usize;
            let n_beta = (band_limit + 1) as usize;
            let (bx, bw) = gauss_legendre(n_beta);
            let mut nodes = Vec::with_capacity(n_ang * n_ang * n_beta);
            let mut weights = Vec::with_capacity(n_ang * n_ang * n_beta);
            for ia in 0..n_ang {
                let alpha = 2.0 * PI * ia as f64 / n_ang as f64;
                for (xb, wb) in bx.iter().zip(&bw) {
                    let beta = xb.clamp(-1.0, 1.0).acos();
                    for ig in 0..n_ang {
                        let gamma = 2.0 * PI * ig as f64 / n_ang as f64;
                        nodes.push(GroupElement::So3 { alpha, beta, gamma });
                        weights.push(wb / (2.0 * (n_ang * n_ang) as f64));
                    }
                }
            }
            QuadratureRule {
                backend,
                band_limit,
                nodes,
                weights,
            }
        }
    }
}

/// Heat kernel on `K`, holomorphically extended:
/// `q_t(g) = Σ_π d_π e^{-λ_π t/2} χ_π(g)`, truncated at `cutoff` with a
/// tail bound from `|χ_π(k·exp(iH))| ≤ d_π e^{|μ||H|}`.
pub fn heat_kernel_k(t: f64, g: &ComplexGroupPoint, cutoff: u32) -> Truncated<C64> {
    assert!(t > 0.0, "heat time must be positive");
    let backend = g.backend();
    let mut value = c64(0.0, 0.0);
    for pi in irreps(backend, cutoff) {
        value += c64(pi.degree as f64 * (-pi.casimir * t / 2.0).exp(), 0.0)
            * character_ext_point(&pi, g);
    }
    let habs = g.h.norm();
    let mut tail = 0.0;
    let mut label = cutoff as i64 + 1;
    loop {
        let (d, lam, mu) = match backend {
            Backend::U1 => (1.0, (label * label) as f64, label as f64),
            Backend::So3 => (
                (2 * label + 1) as f64,
                (label * (label + 1)) as f64,
                label as f64,
            ),
        };
        let mult = match backend {
            Backend::U1 => 2.0, // ±n
            Backend::So3 => 1.0,
        };
        let term = mult * d * d * (-lam * t / 2.0 + mu * habs).exp();
        tail += term;
        if term < 1e-18 * (1.0 + tail) || label > cutoff as i64 + 4000 {
            break;
        }
        label += 1;
    }
    Truncated::new(value, tail)
}

/// Ordered basis `{√d_π φ^π_{ij}}` of the band-limited subspace of
/// `L²(K)`, with deterministic (label, i, j) ordering. Indices here are
/// 0-based.
#[derive(Debug, Clone)]
pub struct PwBasis {
    pub backend: Backend,
    pub band_limit: u32,
    pub entries: Vec<(i32, usize, usize)>,
    pub metas: Vec<IrrepMeta>,
}

impl PwBasis {
    pub fn new(backend: Backend, band_limit: u32) -> Self {
        let metas = irreps(backend, band_limit);
        let mut entries = Vec::new();
        for pi in &metas {
            for i in 0..pi.degree {
                for j in 0..pi.degree {
                    entries.push((pi.label, i, j));
                }
            }
        }
        PwBasis {
            backend,
            band_limit,
            entries,
            metas,
        }
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn meta(&self, label: i32) -> &IrrepMeta {
        self.metas
            .iter()
            .find(|m| m.label == label)
            .expect("label within band limit")
    }

    /// Evaluate all basis functions at a group element.
    pub fn eval(&self, k: &GroupElement) -> Vec<C64> {
        let mut out = Vec::with_capacity(self.dim());
        for pi in &self.metas {
            let m = rep_matrix(pi, k);
            let scale = (pi.degree as f64).sqrt();
            for v in m {
                out.push(v * scale);
            }
        }
        out
    }
}

/// Orthogonal projection of the band-limited subspace of `L²(K)` built
/// from the isotropy subgroup `K_ξ`: `P^σ` (character-averaged) and the
/// rank-refined `P^σ_γ` (diagonal-entry averaged); for the rank-one
/// isotropy groups arising here (`K_ξ` trivial or `≅ SO(2)`) all
/// `d_σ = 1` and the two coincide.
#[derive(Debug, Clone)]
pub struct IsotropyProjection {
    pub basis: PwBasis,
    pub sigma: i32,
    /// Dense `dim×dim` matrix of `P^σ`.
    pub mat: Vec<C64>,
    /// Dense matrix of `P^σ_γ` for γ = 1.
    pub mat_gamma: Vec<C64>,
}

/// Build `P^σ = d_σ ∫_{K_ξ} conj(χ_σ(w)) R_w dw` on the band-limited
/// basis by quadrature over the isotropy circle, where `R` is the right
/// regular representation. The isotropy characters are labelled so that
/// `χ_σ(w(ψ)) = e^{-iσψ}` for the rotation by ψ about `ξ`.
pub fn isotropy_projection(
    backend: Backend,
    sigma: i32,
    xi: &[f64],
    band_limit: u32,
) -> Result<IsotropyProjection> {
    let norm: f64 = xi.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm == 0.0 {
        return Err(Error::Config(
            "isotropy projection requires ξ ≠ 0 (isotropy group would be all of K)".into(),
        ));
    }
    if xi.len() != backend.dim() {
        return Err(Error::Config(format!(
            "ξ has dimension {}, backend needs {}",
            xi.len(),
            backend.dim()
        )));
    }
    let basis = PwBasis::new(backend, band_limit);
    let dim = basis.dim();
    match backend {
        Backend::U1 => {
            // K_ξ is trivial; only σ = 0 exists and P is the identity.
            if sigma != 0 {
                return Err(Error::Config(format!(
                    "u1 isotropy group is trivial; σ must be 0, got {sigma}"
                )));
            }
            let mut mat = vec![c64(0.0, 0.0); dim * dim];
            for i in 0..dim {
                mat[i * dim + i] = c64(1.0, 0.0);
            }
            Ok(IsotropyProjection {
                basis,
                sigma,
                mat_gamma: mat.clone(),
                mat,
            })
        }
        Backend::So3 => {
            let axis = [xi[0] / norm, xi[1] / norm, xi[2] / norm];
            let n_psi = (2 * band_limit + 2).max(2) as usize;
            let mut mat = vec![c64(0.0, 0.0); dim * dim];
            for node in 0..n_psi {
                let psi = 2.0 * PI * node as f64 / n_psi as f64;
                let w = axis_angle_element(axis, psi);
                let weight = 1.0 / n_psi as f64;
                // conj(χ_σ(w)) with χ_σ(ψ) = e^{-iσψ}
                let chi_bar = c64(0.0, sigma as f64 * psi).exp();
                // R_w e_{π i j} = Σ_c φ^π_{cj}(w) e_{π i c}
                let mut col = 0usize;
                for pi in &basis.metas {
                    let d = pi.degree;
                    let dw = rep_matrix(pi, &w);
                    let block_start = col;
                    for i in 0..d {
                        for j in 0..d {
                            let col_idx = block_start + i * d + j;
                            for c in 0..d {
                                let row_idx = block_start + i * d + c;
                                mat[row_idx * dim + col_idx] += weight * chi_bar * dw[c * d + j];
                            }
                        }
                    }
                    col += d * d;
                }
            }
            // d_σ = 1 and σ_{γγ} = χ_σ for the abelian isotropy group.
            Ok(IsotropyProjection {
                basis,
                sigma,
                mat_gamma: mat.clone(),
                mat,
            })
        }
    }
}

/// Rotation by `ψ` about a unit axis, as a group element.
fn axis_angle_element(axis: [f64; 3], psi: f64) -> GroupElement {
    let (s, c) = psi.sin_cos();
    let (x, y, z) = (axis[0], axis[1], axis[2]);
    let one_c = 1.0 - c;
    let r = [
        [
            c + x * x * one_c,
            x * y * one_c - z * s,
            x * z * one_c + y * s,
        ],
        [
            y * x * one_c + z * s,
            c + y * y * one_c,
            y * z * one_c - x * s,
        ],
        [
            z * x * one_c - y * s,
            z * y * one_c + x * s,
            c + z * z * one_c,
        ],
    ];
    let (alpha, beta, gamma) = matrix_to_euler(&r);
    GroupElement::So3 { alpha, beta, gamma }
}

/// Certified growth constants `(a, M, N)` with `λ_π ≥ a|μ|²`,
/// `|χ_π(exp iY)| ≤ d_π e^{M|Y||μ|}` and `N = 2M/√a`.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct GrowthConstants {
    pub a: f64,
    pub m: f64,
    pub n: f64,
}

/// Both backends realize `(a, M, N) = (1, 1, 2)` under the chosen
/// generator normalization.
pub fn growth_constants(_backend: Backend) -> GrowthConstants {
    GrowthConstants {
        a: 1.0,
        m: 1.0,
        n: 2.0,
    }
}

/// Sweep irreps up to `cutoff` and Cartan radii up to `y_max`,
/// confirming both growth inequalities. Returns the maximal violation
/// (negative slack means a violation).
pub fn certify_growth_constants(backend: Backend, cutoff: u32, y_max: f64) -> f64 {
    let gc = growth_constants(backend);
    let mut worst: f64 = f64::INFINITY;
    for pi in irreps(backend, cutoff) {
        // λ ≥ a|μ|²
        worst = worst.min(pi.casimir - gc.a * pi.hw_norm * pi.hw_norm);
        for step in 0..=20 {
            let y = y_max * step as f64 / 20.0;
            // |χ_π(exp iY)| is Ad-invariant, so the Cartan ray suffices.
            let chi = character_ext_point(&pi, &ComplexGroupPoint::from_cartan(backend, y));
            let bound = pi.degree as f64 * (gc.m * y * pi.hw_norm).exp();
            worst = worst.min(bound - chi.norm());
        }
    }
    worst
}

/// Normalized surface quadrature on the Cartan sphere `{|H| = r}`.
/// In rank one the sphere is the two-point set `{±r}`.
#[derive(Debug, Clone)]
pub struct CartanSphereRule {
    pub radius: f64,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

pub fn cartan_sphere_rule(r: f64) -> CartanSphereRule {
    assert!(r > 0.0, "sphere radius must be positive");
    CartanSphereRule {
        radius: r,
        nodes: vec![r, -r],
        weights: vec![0.5, 0.5],
    }
}

impl CartanSphereRule {
    /// Integrate a function of the Cartan coordinate over the sphere.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(h, w)| w * f(*h))
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: C64, b: C64, tol: f64) -> bool {
        (a - b).norm() < tol
    }

    #[test]
    fn irreps_u1_labels_and_casimirs() {
        let ir = irreps(Backend::U1, 2);
        let labels: Vec<i32> = ir.iter().map(|p| p.label).collect();
        assert_eq!(labels, vec![-2, -1, 0, 1, 2]);
        assert!(ir.iter().all(|p| p.degree == 1));
        let cas: Vec<f64> = ir.iter().map(|p| p.casimir).collect();
        assert_eq!(cas, vec![4.0, 1.0, 0.0, 1.0, 4.0]);
    }

    #[test]
    fn irreps_so3_trivial_cutoff() {
        let ir = irreps(Backend::So3, 0);
        assert_eq!(ir.len(), 1);
        assert_eq!(ir[0].degree, 1);
        assert_eq!(ir[0].casimir, 0.0);
    }

    #[test]
    fn irreps_so3_degrees() {
        let ir = irreps(Backend::So3, 1);
        assert_eq!(ir.len(), 2);
        assert_eq!(ir[1].degree, 3);
        assert_eq!(ir[1].casimir, 2.0);
    }

    #[test]
    fn u1_character_value() {
        // φ³(π/2) = e^{3iπ/2} = -i
        let pi3 = IrrepMeta::new(Backend::U1, 3).unwrap();
        let v = matrix_coefficient(&pi3, 1, 1, &GroupElement::U1 { theta: PI / 2.0 }).unwrap();
        assert!(close(v, c64(0.0, -1.0), 1e-14));
    }

    #[test]
    fn identity_is_kronecker() {
        let pi = IrrepMeta::new(Backend::So3, 1).unwrap();
        let e = GroupElement::identity(Backend::So3);
        for i in 1..=3 {
            for j in 1..=3 {
                let v = matrix_coefficient(&pi, i, j, &e).unwrap();
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!(close(v, c64(expect, 0.0), 1e-14));
            }
        }
    }

    #[test]
    fn index_out_of_range_rejected() {
        let pi = IrrepMeta::new(Backend::So3, 1).unwrap();
        let e = GroupElement::identity(Backend::So3);
        assert!(matrix_coefficient(&pi, 0, 1, &e).is_err());
        assert!(matrix_coefficient(&pi, 4, 1, &e).is_err());
    }

    #[test]
    fn rep_matrices_are_unitary() {
        for l in 0..=3 {
            let pi = IrrepMeta::new(Backend::So3, l).unwrap();
            let d = pi.degree;
            let k = GroupElement::So3 {
                alpha: 1.1,
                beta: 0.7,
                gamma: 4.4,
            };
            let m = rep_matrix(&pi, &k);
            for i in 0..d {
                for j in 0..d {
                    let dot: C64 = (0..d).map(|c| m[i * d + c] * m[j * d + c].conj()).sum();
                    let expect = if i == j { 1.0 } else { 0.0 };
                    assert!(close(dot, c64(expect, 0.0), 1e-12));
                }
            }
        }
    }

    #[test]
    fn rep_is_homomorphism() {
        let pi = IrrepMeta::new(Backend::So3, 2).unwrap();
        let d = pi.degree;
        let k1 = GroupElement::So3 {
            alpha: 0.4,
            beta: 1.2,
            gamma: 2.2,
        };
        let k2 = GroupElement::So3 {
            alpha: 5.0,
            beta: 0.3,
            gamma: 1.0,
        };
        let lhs = rep_matrix(&pi, &k1.compose(&k2));
        let (a, b) = (rep_matrix(&pi, &k1), rep_matrix(&pi, &k2));
        for i in 0..d {
            for j in 0..d {
                let prod: C64 = (0..d).map(|c| a[i * d + c] * b[c * d + j]).sum();
                assert!(close(lhs[i * d + j], prod, 1e-11));
            }
        }
    }

    #[test]
    fn rotation_matrix_is_special_orthogonal() {
        let k = GroupElement::So3 {
            alpha: 0.9,
            beta: 2.0,
            gamma: 0.2,
        };
        let r = k.rotation_matrix();
        // R Rᵀ = I
        for i in 0..3 {
            for j in 0..3 {
                let dot: f64 = (0..3).map(|c| r[i * 3 + c] * r[j * 3 + c]).sum();
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((dot - expect).abs() < 1e-13);
            }
        }
        let det = r[0] * (r[4] * r[8] - r[5] * r[7]) - r[1] * (r[3] * r[8] - r[5] * r[6])
            + r[2] * (r[3] * r[7] - r[4] * r[6]);
        assert!((det - 1.0).abs() < 1e-13);
    }

    #[test]
    fn group_axioms_hold() {
        let k = GroupElement::So3 {
            alpha: 1.0,
            beta: 0.5,
            gamma: 3.0,
        };
        let e = k.compose(&k.inverse());
        let m = rep_matrix(&IrrepMeta::new(Backend::So3, 1).unwrap(), &e);
        for i in 0..3 {
            for j in 0..3 {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!(close(m[i * 3 + j], c64(expect, 0.0), 1e-12));
            }
        }
    }

    #[test]
    fn u1_extension_matches_scalar_formula() {
        // φⁿ(θ + is-part): e^{inθ}·e^{-ns}
        let n = 2;
        let pi = IrrepMeta::new(Backend::U1, n).unwrap();
        let g = ComplexGroupPoint {
            k: GroupElement::U1 { theta: 0.7 },
            h: CartanVector(0.25),
        };
        let v = matrix_coefficient_ext(&pi, 1, 1, &g).unwrap();
        let expect = c64(0.0, n as f64 * 0.7).exp() * (-(n as f64) * 0.25).exp();
        assert!(close(v, expect, 1e-14));
    }

    #[test]
    fn so3_zero_weight_diagonal_fixed_by_z_continuation() {
        let pi = IrrepMeta::new(Backend::So3, 1).unwrap();
        let g = ComplexGroupPoint::from_cartan(Backend::So3, 0.6);
        // m = n = 0 entry is index (2,2) for l = 1.
        let v = matrix_coefficient_ext(&pi, 2, 2, &g).unwrap();
        assert!(close(v, c64(1.0, 0.0), 1e-14));
    }

    #[test]
    fn extension_restricts_to_real_coefficient() {
        let pi = IrrepMeta::new(Backend::So3, 2).unwrap();
        let k = GroupElement::So3 {
            alpha: 0.3,
            beta: 1.0,
            gamma: 2.0,
        };
        let g = ComplexGroupPoint::real(k);
        for i in 1..=5 {
            for j in 1..=5 {
                let a = matrix_coefficient(&pi, i, j, &k).unwrap();
                let b = matrix_coefficient_ext(&pi, i, j, &g).unwrap();
                assert!(close(a, b, 1e-14));
            }
        }
    }

    #[test]
    fn extension_is_multiplicative_in_polar_factors() {
        let pi = IrrepMeta::new(Backend::So3, 1).unwrap();
        let d = pi.degree;
        let k = GroupElement::So3 {
            alpha: 2.0,
            beta: 0.8,
            gamma: 0.5,
        };
        let h = 0.3;
        let full = rep_matrix_ext(
            &pi,
            &ComplexGroupPoint {
                k,
                h: CartanVector(h),
            },
        );
        let dk = rep_matrix(&pi, &k);
        let diag = rep_exp_ih_diagonal(&pi, h);
        for i in 0..d {
            for j in 0..d {
                assert!(close(full[i * d + j], dk[i * d + j] * diag[j], 1e-14));
            }
        }
    }

    #[test]
    fn character_ext_so3_sinh_ratio() {
        // l = 1, h = 0.3: sinh(0.9)/sinh(0.3)
        let pi = IrrepMeta::new(Backend::So3, 1).unwrap();
        let v = character_ext(&pi, &CartanVector(0.3));
        let expect = (0.9f64).sinh() / (0.3f64).sinh();
        assert!((v - expect).abs() < 1e-13);
        // Against the direct matrix-exponential trace for l ≤ 3.
        for l in 0..=3 {
            let pi = IrrepMeta::new(Backend::So3, l).unwrap();
            let g = ComplexGroupPoint::from_cartan(Backend::So3, 0.4);
            // exp(2iH): double the Cartan coordinate.
            let g2 = ComplexGroupPoint::from_cartan(Backend::So3, 0.8);
            let _ = g;
            let trace = character_ext_point(&pi, &g2);
            let closed = character_ext(&pi, &CartanVector(0.4));
            assert!((trace.re - closed).abs() < 1e-12 && trace.im.abs() < 1e-14);
        }
    }

    #[test]
    fn character_ext_at_zero_is_degree() {
        for l in 0..=4 {
            let pi = IrrepMeta::new(Backend::So3, l).unwrap();
            assert!((character_ext(&pi, &CartanVector(0.0)) - pi.degree as f64).abs() < 1e-13);
        }
        // Series fallback continuity near zero.
        let pi = IrrepMeta::new(Backend::So3, 3).unwrap();
        let a = character_ext(&pi, &CartanVector(4.9e-10));
        let b = character_ext(&pi, &CartanVector(5.1e-10));
        assert!((a - b).abs() < 1e-10);
    }

    #[test]
    fn u1_character_trace_consistency() {
        // χ = trace of the extended 1×1 matrix.
        let pi = IrrepMeta::new(Backend::U1, 3).unwrap();
        let h = 0.2;
        let g2 = ComplexGroupPoint::from_cartan(Backend::U1, 2.0 * h);
        let trace = character_ext_point(&pi, &g2);
        assert!(close(trace, c64(character_ext(&pi, &CartanVector(h)), 0.0), 1e-14));
    }

    #[test]
    fn quadrature_schur_orthogonality() {
        for (backend, band) in [(Backend::U1, 3u32), (Backend::So3, 2u32)] {
            let rule = quadrature(backend, band);
            let metas = irreps(backend, band);
            for pi in &metas {
                for lam in &metas {
                    let dp = pi.degree;
                    let dl = lam.degree;
                    for i in 0..dp {
                        for j in 0..dp {
                            for l in 0..dl {
                                for m in 0..dl {
                                    let mut acc = c64(0.0, 0.0);
                                    for (node, w) in rule.iter() {
                                        let a = rep_matrix(pi, node)[i * dp + j];
                                        let b = rep_matrix(lam, node)[l * dl + m];
                                        acc += w * a * b.conj();
                                    }
                                    let expect = if pi.label == lam.label && i == l && j == m {
                                        1.0 / dp as f64
                                    } else {
                                        0.0
                                    };
                                    assert!(
                                        (acc - c64(expect, 0.0)).norm() < 1e-12,
                                        "⟨φ^{}_{}{} , φ^{}_{}{}⟩ = {acc}",
                                        pi.label,
                                        i,
                                        j,
                                        lam.label,
                                        l,
                                        m
                                    );
                                }
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn heat_kernel_scalar_series_u1() {
        // Σ_n e^{-n²t/2} at t = 2, independent scalar oracle.
        let mut oracle = 1.0;
        for n in 1..60 {
            oracle += 2.0 * (-(n * n) as f64).exp();
        }
        let v = heat_kernel_k(
            2.0,
            &ComplexGroupPoint::real(GroupElement::identity(Backend::U1)),
            40,
        );
        assert!((v.value.re - oracle).abs() < 1e-12);
        assert!((oracle - 1.7726372048266521).abs() < 1e-12);
        assert!(v.value.im.abs() < 1e-14);
        assert!(v.tail_bound < 1e-15);
    }

    #[test]
    fn heat_kernel_total_mass_is_one() {
        // ∫_K q_t dk = 1: only the trivial irrep survives.
        for backend in [Backend::U1, Backend::So3] {
            let rule = quadrature(backend, 6);
            let mut acc = c64(0.0, 0.0);
            for (node, w) in rule.iter() {
                acc += w * heat_kernel_k(1.0, &ComplexGroupPoint::real(*node), 6).value;
            }
            assert!(close(acc, c64(1.0, 0.0), 1e-10), "mass = {acc}");
        }
    }

    #[test]
    fn heat_kernel_truncation_flagged() {
        // Small cutoff at small t leaves a visible tail.
        let v = heat_kernel_k(
            0.05,
            &ComplexGroupPoint::real(GroupElement::identity(Backend::U1)),
            2,
        );
        assert!(!v.within(1e-10));
    }

    #[test]
    fn isotropy_projection_u1_is_identity() {
        let p = isotropy_projection(Backend::U1, 0, &[0.3, 0.1], 3).unwrap();
        let dim = p.basis.dim();
        for i in 0..dim {
            for j in 0..dim {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!(close(p.mat[i * dim + j], c64(expect, 0.0), 1e-14));
            }
        }
    }

    #[test]
    fn isotropy_projection_rejects_zero_xi() {
        assert!(isotropy_projection(Backend::So3, 0, &[0.0, 0.0, 0.0], 2).is_err());
    }

    #[test]
    fn isotropy_projection_algebra_so3() {
        let band = 2u32;
        let dim = PwBasis::new(Backend::So3, band).dim();
        let projs: Vec<_> = (-(band as i32)..=band as i32)
            .map(|s| isotropy_projection(Backend::So3, s, &[0.0, 0.0, 1.0], band).unwrap())
            .collect();
        // Idempotent and self-adjoint.
        for p in &projs {
            for i in 0..dim {
                for j in 0..dim {
                    let sq: C64 = (0..dim).map(|c| p.mat[i * dim + c] * p.mat[c * dim + j]).sum();
                    assert!((sq - p.mat[i * dim + j]).norm() < 1e-12);
                    assert!((p.mat[i * dim + j] - p.mat[j * dim + i].conj()).norm() < 1e-12);
                }
            }
        }
        // Mutually orthogonal, summing to the identity.
        for a in 0..projs.len() {
            for b in 0..projs.len() {
                if a == b {
                    continue;
                }
                for i in 0..dim {
                    for j in 0..dim {
                        let prod: C64 = (0..dim)
                            .map(|c| projs[a].mat[i * dim + c] * projs[b].mat[c * dim + j])
                            .sum();
                        assert!(prod.norm() < 1e-12);
                    }
                }
            }
        }
        for i in 0..dim {
            for j in 0..dim {
                let total: C64 = projs.iter().map(|p| p.mat[i * dim + j]).sum();
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((total - c64(expect, 0.0)).norm() < 1e-12);
            }
        }
        // σ = 0 projects onto the zero-column-weight span.
        let p0 = &projs[band as usize];
        for (idx, (label, _i, j)) in p0.basis.entries.iter().enumerate() {
            let m_col = *j as i32 - label;
            let expect = if m_col == 0 { 1.0 } else { 0.0 };
            assert!(close(p0.mat[idx * dim + idx], c64(expect, 0.0), 1e-12));
        }
    }

    #[test]
    fn growth_constants_certified() {
        assert!(certify_growth_constants(Backend::U1, 12, 1.5) >= -1e-12);
        assert!(certify_growth_constants(Backend::So3, 8, 1.5) >= -1e-12);
        let gc = growth_constants(Backend::U1);
        assert_eq!((gc.a, gc.m, gc.n), (1.0, 1.0, 2.0));
    }

    #[test]
    fn cartan_sphere_rule_exactness() {
        let rule = cartan_sphere_rule(0.7);
        assert!((rule.integrate(|_| 1.0) - 1.0).abs() < 1e-15);
        assert!(rule.integrate(|h| 3.0 * h).abs() < 1e-15);
        // Character average over the Cartan sphere, rank one.
        let pi = IrrepMeta::new(Backend::So3, 1).unwrap();
        let rule = cartan_sphere_rule(0.3);
        let avg = rule.integrate(|h| character_ext(&pi, &CartanVector(h)));
        let expect = (0.9f64).sinh() / (0.3f64).sinh();
        assert!((avg - expect).abs() < 1e-13);
        assert!((expect - 3.3709304364845356).abs() < 1e-12);
    }
}
