//! Normalized sphere integrals of exponentials and the modified Bessel
//! function they reduce to, plus surface quadrature rules on the unit
//! sphere.

use std::f64::consts::PI;

/// Modified Bessel function `I₀(x)`: power series below 30, asymptotic
/// expansion beyond. Relative accuracy ~1e-13 over the ranges used
/// here (arguments up to a few tens).
pub fn bessel_i0(x: f64) -> f64 {
    let ax = x.abs();
    if ax < 30.0 {
        // Σ (x²/4)^k / (k!)²
        let q = ax * ax / 4.0;
        let mut term = 1.0;
        let mut sum = 1.0;
        for k in 1..200 {
            term *= q / ((k * k) as f64);
            sum += term;
            if term < 1e-17 * sum {
                break;
            }
        }
        sum
    } else {
        // e^x/√(2πx) Σ_k \prod (2j-1)²/(8x j)
        let mut term = 1.0;
        let mut sum = 1.0;
        for k in 1..12u32 {
            let kf = k as f64;
            term *= (2.0 * kf - 1.0) * (2.0 * kf - 1.0) / (8.0 * ax * kf);
            sum += term;
        }
        ax.exp() / (2.0 * PI * ax).sqrt() * sum
    }
}

/// Normalized surface integral `∫_{|ω|=1} e^{r⟨a,ω⟩} dσ(ω)`:
/// `I₀(r|a|)` in dimension 2 and `sinh(r|a|)/(r|a|)` in dimension 3.
/// Always ≥ 1, even in `a`, increasing in `r|a|`.
pub fn sphere_exp_integral(n: usize, a: &[f64], r: f64) -> f64 {
    assert!(r >= 0.0, "radius must be nonnegative");
    let s = r * a.iter().map(|v| v * v).sum::<f64>().sqrt();
    sphere_exp_integral_scalar(n, s)
}

/// The same integral as a function of `s = r·|a|`.
pub fn sphere_exp_integral_scalar(n: usize, s: f64) -> f64 {
    match n {
        2 => bessel_i0(s),
        3 => {
            if s.abs() < 1e-6 {
                1.0 + s * s / 6.0 + s * s * s * s / 120.0
            } else {
                s.sinh() / s
            }
        }
        _ => panic!("sphere integrals implemented for n = 2, 3"),
    }
}

/// Normalized quadrature on the unit sphere of `Rⁿ`: uniform angles on
/// the circle for n = 2, Gauss-Legendre in cos θ × uniform φ for n = 3.
/// Weights sum to one.
#[derive(Debug, Clone)]
pub struct SurfaceRule {
    pub n: usize,
    /// Flat node storage with stride `n`.
    pub points: Vec<f64>,
    pub weights: Vec<f64>,
}

impl SurfaceRule {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i * self.n..(i + 1) * self.n]
    }
}

/// Build a rule resolving spherical harmonics up to roughly `order`.
pub fn surface_rule(n: usize, order: usize) -> SurfaceRule {
    match n {
        2 => {
            let count = (2 * order + 2).max(8);
            let mut points = Vec::with_capacity(2 * count);
            for j in 0..count {
                let phi = 2.0 * PI * j as f64 / count as f64;
                points.push(phi.cos());
                points.push(phi.sin());
            }
            SurfaceRule {
                n,
                points,
                weights: vec![1.0 / count as f64; count],
            }
        }
        3 => {
            let n_theta = (order + 1).max(4);
            let n_phi = (2 * order + 2).max(8);
            let (tx, tw) = crate::compact::wigner::gauss_legendre(n_theta);
            let mut points = Vec::new();
            let mut weights = Vec::new();
            for (ct, wt) in tx.iter().zip(&tw) {
                let st = (1.0 - ct * ct).max(0.0).sqrt();
                for j in 0..n_phi {
                    let phi = 2.0 * PI * j as f64 / n_phi as f64;
                    points.push(st * phi.cos());
                    points.push(st * phi.sin());
                    points.push(*ct);
                    weights.push(wt / (2.0 * n_phi as f64));
                }
            }
            SurfaceRule { n, points, weights }
        }
        _ => panic!("surface rules implemented for n = 2, 3"),
    }
}
