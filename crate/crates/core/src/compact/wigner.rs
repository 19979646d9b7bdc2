//! Wigner small-d matrices, 3×3 rotation matrices in ZYZ Euler angles,
//! and Gauss-Legendre nodes for the β-integration.

use std::f64::consts::PI;

/// ln(n!) for n up to 200, enough for degrees l ≤ 49.
fn ln_factorial(n: i64) -> f64 {
    debug_assert!(n >= 0);
    // Exact table for small n, lgamma-style accumulation beyond.
    let mut acc = 0.0;
    for k in 2..=n {
        acc += (k as f64).ln();
    }
    acc
}

/// Wigner small-d entry `d^l_{mn}(β)` in the convention
/// `D^l_{mn}(α,β,γ) = e^{-imα} d^l_{mn}(β) e^{-inγ}` with
/// `D^l(R_z(θ))_{mm} = e^{-imθ}`.
pub fn wigner_small_d(l: i64, m: i64, n: i64, beta: f64) -> f64 {
    assert!(m.abs() <= l && n.abs() <= l, "weight out of range");
    let cos_half = (beta / 2.0).cos();
    let sin_half = (beta / 2.0).sin();
    let k_min = 0.max(n - m);
    let k_max = (l + n).min(l - m);
    let ln_pref = 0.5
        * (ln_factorial(l + m) + ln_factorial(l - m) + ln_factorial(l + n) + ln_factorial(l - n));
    let mut sum = 0.0;
    for k in k_min..=k_max {
        let ln_den = ln_factorial(l + n - k)
            + ln_factorial(k)
            + ln_factorial(m - n + k)
            + ln_factorial(l - m - k);
        let p_cos = 2 * l + n - m - 2 * k;
        let p_sin = m - n + 2 * k;
        // cos/sin powers can vanish; powi keeps 0^0 = 1.
        let term = (ln_pref - ln_den).exp()
            * cos_half.powi(p_cos as i32)
            * sin_half.powi(p_sin as i32);
        if (k & 1) == 0 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    sum
}

/// Dense `(2l+1) × (2l+1)` small-d matrix, row/column index `i = m + l`.
pub fn wigner_small_d_matrix(l: i64, beta: f64) -> Vec<f64> {
    let d = (2 * l + 1) as usize;
    let mut out = vec![0.0; d * d];
    for (row, m) in (-l..=l).enumerate() {
        for (col, n) in (-l..=l).enumerate() {
            out[row * d + col] = wigner_small_d(l, m, n, beta);
        }
    }
    out
}

/// 3×3 rotation about the z-axis.
pub fn rot_z(theta: f64) -> [[f64; 3]; 3] {
    let (s, c) = theta.sin_cos();
    [[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]]
}

/// 3×3 rotation about the y-axis.
pub fn rot_y(theta: f64) -> [[f64; 3]; 3] {
    let (s, c) = theta.sin_cos();
    [[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]]
}

pub fn mat3_mul(a: &[[f64; 3]; 3], b: &[[f64; 3]; 3]) -> [[f64; 3]; 3] {
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = (0..3).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    out
}

pub fn mat3_transpose(a: &[[f64; 3]; 3]) -> [[f64; 3]; 3] {
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = a[j][i];
        }
    }
    out
}

pub fn mat3_apply(a: &[[f64; 3]; 3], v: [f64; 3]) -> [f64; 3] {
    [
        a[0][0] * v[0] + a[0][1] * v[1] + a[0][2] * v[2],
        a[1][0] * v[0] + a[1][1] * v[1] + a[1][2] * v[2],
        a[2][0] * v[0] + a[2][1] * v[1] + a[2][2] * v[2],
    ]
}

/// Compose ZYZ Euler angles into the rotation `R_z(α) R_y(β) R_z(γ)`.
pub fn euler_to_matrix(alpha: f64, beta: f64, gamma: f64) -> [[f64; 3]; 3] {
    mat3_mul(&mat3_mul(&rot_z(alpha), &rot_y(beta)), &rot_z(gamma))
}

/// Extract canonical ZYZ Euler angles from a rotation matrix, with
/// `α, γ ∈ [0, 2π)` and `β ∈ [0, π]`. At the gimbal points `β ∈ {0, π}`
/// the γ angle is set to zero and the full z-rotation folded into α.
pub fn matrix_to_euler(r: &[[f64; 3]; 3]) -> (f64, f64, f64) {
    let beta = r[2][2].clamp(-1.0, 1.0).acos();
    let wrap = |t: f64| t.rem_euclid(2.0 * PI);
    if beta.sin().abs() > 1e-12 {
        let alpha = r[1][2].atan2(r[0][2]);
        let gamma = r[2][1].atan2(-r[2][0]);
        (wrap(alpha), beta, wrap(gamma))
    } else if r[2][2] > 0.0 {
        // R = R_z(α + γ)
        (wrap(r[1][0].atan2(r[0][0])), 0.0, 0.0)
    } else {
        // β = π, R = R_z(α) R_y(π) R_z(γ) depends only on α - γ.
        (wrap((-r[1][0]).atan2(-r[0][0])), PI, 0.0)
    }
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`, by Newton iteration on
/// the Legendre recurrence.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for k in 0..n {
        // Tricomi-style initial guess.
        let mut x = (PI * (k as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre_with_derivative(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let (_, dp) = legendre_with_derivative(n, x);
        nodes[n - 1 - k] = x;
        weights[n - 1 - k] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_d_l1_center_is_cos() {
        // d^1_{00}(β) = cos β.
        for &beta in &[0.1, PI / 3.0, 1.3, 2.9] {
            assert!((wigner_small_d(1, 0, 0, beta) - beta.cos()).abs() < 1e-14);
        }
        assert!((wigner_small_d(1, 0, 0, PI / 3.0) - 0.5).abs() < 1e-14);
    }

    #[test]
    fn small_d_orthogonal_rows() {
        let l = 3;
        let d = (2 * l + 1) as usize;
        let m = wigner_small_d_matrix(l, 0.83);
        for i in 0..d {
            for j in 0..d {
                let dot: f64 = (0..d).map(|k| m[i * d + k] * m[j * d + k]).sum();
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((dot - expect).abs() < 1e-12, "row {i} · row {j} = {dot}");
            }
        }
    }

    #[test]
    fn euler_roundtrip() {
        let cases = [
            (0.3, 0.7, 5.1),
            (4.2, 2.9, 0.01),
            (1.0, 0.0, 0.0),
            (2.0, PI, 0.0),
        ];
        for (a, b, g) in cases {
            let r = euler_to_matrix(a, b, g);
            let (a2, b2, g2) = matrix_to_euler(&r);
            let r2 = euler_to_matrix(a2, b2, g2);
            for i in 0..3 {
                for j in 0..3 {
                    assert!((r[i][j] - r2[i][j]).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre(5);
        // Exact for degree ≤ 9: ∫ x^8 = 2/9.
        let s: f64 = x.iter().zip(&w).map(|(xi, wi)| wi * xi.powi(8)).sum();
        assert!((s - 2.0 / 9.0).abs() < 1e-14);
        let total: f64 = w.iter().sum();
        assert!((total - 2.0).abs() < 1e-14);
    }
}
