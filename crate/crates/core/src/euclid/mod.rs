//! Euclidean layer: centered grids, the unitary Fourier transform, the
//! Gaussian heat kernel, the classical coherent-state transform with
//! its isometry, Gaussian target weights, sphere integrals and sample
//! rotation. All integrals in this module are plain Lebesgue integrals.

pub mod bargmann;
pub mod field;
pub mod grid;
pub mod heat;
pub mod rotate;
pub mod sphere;

pub use bargmann::{
    bargmann_isometry_check, bargmann_rn, bargmann_rn_guarded, bargmann_slice,
    bargmann_slice_guarded, gaussian_weight_mu, YGrid, Y_GUARD_FACTOR,
};
pub use field::{
    fourier, fourier_unchecked, fourier_with_threshold, inverse_fourier, ScalarField,
    SpectralField, ALIASING_THRESHOLD,
};
pub use grid::GridSpec;
pub use heat::{convolve_heat_rn, heat_kernel_rn, heat_multiplier};
pub use rotate::{rotate_samples_2d, rotate_samples_3d, rotate_scalar, rotate_spectral};
pub use sphere::{
    bessel_i0, sphere_exp_integral, sphere_exp_integral_scalar, surface_rule, SurfaceRule,
};
