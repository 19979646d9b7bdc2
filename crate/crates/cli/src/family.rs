//! The curated verification family: per-block Gaussian and first-order
//! Hermite packets times matrix coefficients, plus seeded random
//! band-limited mixtures. Every member is holomorphically extendable
//! (Gaussian frequency decay) and carries a closed-form norm oracle
//! where one exists.

use mgharm_core::compact::{Backend, IrrepMeta};
use mgharm_core::euclid::GridSpec;
use mgharm_core::motion::PwField;
use mgharm_core::{c64, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Profile {
    Gaussian,
    Hermite,
}

/// One member of the family.
pub struct FamilyMember {
    pub name: String,
    pub field: PwField,
    /// Closed-form `‖f‖²_{L²(M)}` when available.
    pub oracle_norm_sq: Option<f64>,
}

fn profile_value(profile: Profile, x: &[f64]) -> f64 {
    let r2: f64 = x.iter().map(|v| v * v).sum();
    let g = (-r2 / 2.0).exp();
    match profile {
        Profile::Gaussian => g,
        Profile::Hermite => x[0] * g,
    }
}

/// `∫ |profile|² dx` (Lebesgue) in dimension `n`.
fn profile_l2_sq(profile: Profile, n: usize) -> f64 {
    // ∫ e^{-r²} = π^{n/2}; ∫ x₀² e^{-r²} = π^{n/2}/2.
    let base = PI.powf(n as f64 / 2.0);
    match profile {
        Profile::Gaussian => base,
        Profile::Hermite => base / 2.0,
    }
}

/// A single-block field `profile(x)·φ^π_{ij}(k)` built directly in
/// coefficient space (coefficient `profile/d_π` in the `(i,j)` slot).
pub fn single_block(
    backend: Backend,
    grid: GridSpec,
    label: i32,
    i: usize,
    j: usize,
    profile: Profile,
) -> FamilyMember {
    let pi = IrrepMeta::new(backend, label).expect("valid label");
    let d = pi.degree;
    let len = grid.len();
    let mut field = PwField::empty(backend, grid, label.unsigned_abs());
    field.extendable = true;
    {
        let block = field.block_mut(label);
        for cell in 0..len {
            let x = grid.point(cell);
            block[(i * d + j) * len + cell] =
                c64(profile_value(profile, &x[..grid.n]) / d as f64, 0.0);
        }
    }
    // ‖f‖² = (2π)^{-n/2}·d·(1/d²)·‖profile‖²_{L²}.
    let oracle = (2.0 * PI).powf(-(grid.n as f64) / 2.0) * profile_l2_sq(profile, grid.n)
        / d as f64;
    let tag = match profile {
        Profile::Gaussian => "gauss",
        Profile::Hermite => "hermite",
    };
    FamilyMember {
        name: format!("{}_{}_{}{}{}", backend.name(), tag, label, i, j),
        field,
        oracle_norm_sq: Some(oracle),
    }
}

/// Seeded random band-limited mixture with Gaussian-enveloped
/// coefficients.
pub fn random_mixture(
    backend: Backend,
    grid: GridSpec,
    cutoff: u32,
    rng: &mut ChaCha8Rng,
    index: usize,
) -> FamilyMember {
    let len = grid.len();
    let mut field = PwField::empty(backend, grid, cutoff);
    field.extendable = true;
    for pi in mgharm_core::compact::irreps(backend, cutoff) {
        let d = pi.degree;
        let block = field.block_mut(pi.label);
        for slot in 0..d * d {
            let amp_re: f64 = rng.gen_range(-1.0..1.0);
            let amp_im: f64 = rng.gen_range(-1.0..1.0);
            let hermite: bool = rng.gen_bool(0.5);
            let amp = c64(amp_re, amp_im) * (-(pi.hw_norm)).exp();
            if amp.norm() < 1e-3 {
                continue;
            }
            for cell in 0..len {
                let x = grid.point(cell);
                let p = if hermite {
                    profile_value(Profile::Hermite, &x[..grid.n])
                } else {
                    profile_value(Profile::Gaussian, &x[..grid.n])
                };
                block[slot * len + cell] += amp * p;
            }
        }
    }
    FamilyMember {
        name: format!("{}_mixture_{index}", backend.name()),
        field,
        oracle_norm_sq: None,
    }
}

/// The curated family: one single-block member per irrep label with
/// alternating Gaussian/Hermite profiles, plus three seeded mixtures.
pub fn make_test_family(
    backend: Backend,
    grid: GridSpec,
    cutoff: u32,
    seed: u64,
) -> Vec<FamilyMember> {
    let mut members = Vec::new();
    for (idx, pi) in mgharm_core::compact::irreps(backend, cutoff)
        .into_iter()
        .enumerate()
    {
        let profile = if idx % 2 == 0 {
            Profile::Gaussian
        } else {
            Profile::Hermite
        };
        let d = pi.degree;
        // Deterministic off-diagonal slot choice for d > 1.
        let (i, j) = if d == 1 { (0, 0) } else { (0, d / 2) };
        members.push(single_block(backend, grid, pi.label, i, j, profile));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for index in 0..3 {
        members.push(random_mixture(backend, grid, cutoff, &mut rng, index));
    }
    members
}

/// Euclidean-layer family for the classical transform checks:
/// normalized Gaussian plus first-order Hermite packets.
pub fn euclid_family(grid: GridSpec) -> Vec<(String, mgharm_core::euclid::ScalarField)> {
    let mk = |name: &str, f: Box<dyn Fn(&[f64]) -> C64>| {
        (
            name.to_string(),
            mgharm_core::euclid::ScalarField::from_fn(grid, |x| f(x)),
        )
    };
    vec![
        mk(
            "gaussian",
            Box::new(|x| {
                let r2: f64 = x.iter().map(|v| v * v).sum();
                c64((-r2 / 2.0).exp(), 0.0)
            }),
        ),
        mk(
            "hermite_x",
            Box::new(|x| {
                let r2: f64 = x.iter().map(|v| v * v).sum();
                c64(x[0] * (-r2 / 2.0).exp(), 0.0)
            }),
        ),
        mk(
            "hermite_y",
            Box::new(|x| {
                let r2: f64 = x.iter().map(|v| v * v).sum();
                c64(x[1] * (-r2 / 2.0).exp(), 0.0)
            }),
        ),
        mk(
            "modulated",
            Box::new(|x| {
                let r2: f64 = x.iter().map(|v| v * v).sum();
                c64(0.0, 1.5 * x[0]).exp() * c64((-r2 / 2.0).exp(), 0.0)
            }),
        ),
    ]
}
