//! The verification suites. Each suite returns one record per case;
//! a case passes when its relative error (or gated quantity) stays
//! within the suite tolerance.

use crate::config::ExperimentConfig;
use crate::family::{euclid_family, make_test_family, FamilyMember};
use crate::report::ReportRecord;
use anyhow::Result;
use mgharm_core::compact::{
    isotropy_projection, quadrature, Backend, CartanVector, GroupElement, IrrepMeta, PwBasis,
};
use mgharm_core::euclid::{
    bargmann_isometry_check, bargmann_rn, fourier, fourier_with_threshold, gaussian_weight_mu,
    inverse_fourier, surface_rule, GridSpec, ScalarField, YGrid,
};
use mgharm_core::gutzmer::{
    character_sphere_bound_check, gutzmer_k_check, gutzmer_m_check, gutzmer_m_series, poisson,
    poisson_domain_check, poisson_invert, KCoeffs,
};
use mgharm_core::motion::{convolve_heat, heat_field, ComplexMotionPoint, PwField};
use mgharm_core::paley::{
    action_band_for, complexified_action, pw_cross_term_at, pw_direct_hs_at, pw_identity_check,
    pw_spectral_integrand, sigma_refined_partition, u_action_matrix, PwComponent,
};
use mgharm_core::{c64, coherent, C64};
use serde_json::json;
use std::f64::consts::PI;

/// Default tolerance per suite (overridable from the config).
pub fn default_tolerance(suite: &str, backend: Backend) -> f64 {
    match (suite, backend) {
        ("fourier_ledger", _) => 1e-10,
        ("bargmann_isometry", _) => 1e-6,
        ("sb_isometry", Backend::U1) => 1e-5,
        ("sb_isometry", Backend::So3) => 1e-4,
        ("semigroups", _) => 1e-10,
        ("gutzmer_k", Backend::U1) => 1e-12,
        ("gutzmer_k", Backend::So3) => 1e-8,
        ("gutzmer_m", Backend::U1) => 1e-6,
        ("gutzmer_m", Backend::So3) => 1e-4,
        ("poisson_domain", _) => 1e-9,
        ("paley_wiener", Backend::U1) => 1e-5,
        ("paley_wiener", Backend::So3) => 1e-4,
        ("sigma_refined", _) => 1e-8,
        ("determinism", _) => 0.5,
        _ => 1e-8,
    }
}

pub fn run_suite(name: &str, cfg: &ExperimentConfig) -> Result<Vec<ReportRecord>> {
    match name {
        "fourier_ledger" => fourier_ledger(cfg),
        "bargmann_isometry" => bargmann_isometry(cfg),
        "sb_isometry" => sb_isometry(cfg),
        "semigroups" => semigroups(cfg),
        "gutzmer_k" => gutzmer_k(cfg),
        "gutzmer_m" => gutzmer_m(cfg),
        "poisson_domain" => poisson_domain(cfg),
        "paley_wiener" => paley_wiener(cfg),
        "sigma_refined" => sigma_refined(cfg),
        "determinism" => determinism(cfg),
        other => anyhow::bail!("unknown suite `{other}`"),
    }
}

fn family(cfg: &ExperimentConfig) -> Result<Vec<FamilyMember>> {
    let backend = cfg.backend_parsed()?;
    let grid = cfg.grid_spec()?;
    Ok(make_test_family(backend, grid, cfg.cutoff, cfg.seed))
}

/// Largest relative boundary magnitude over a field's coefficient
/// blocks (the aliasing diagnostic for grid suitability).
fn field_boundary_mass(f: &PwField) -> f64 {
    let len = f.grid.len();
    let mut global: f64 = 0.0;
    let mut boundary: f64 = 0.0;
    for block in f.blocks.values() {
        let slots = block.len() / len;
        for slot in 0..slots {
            for cell in 0..len {
                let a = block[slot * len + cell].norm();
                global = global.max(a);
                if f.grid.on_boundary(cell) {
                    boundary = boundary.max(a);
                }
            }
        }
    }
    if global == 0.0 {
        0.0
    } else {
        boundary / global
    }
}

// ----------------------------------------------------------------- //
// Suite 1: Fourier / Plancherel ledger and convention certification //
// ----------------------------------------------------------------- //

fn fourier_ledger(cfg: &ExperimentConfig) -> Result<Vec<ReportRecord>> {
    let suite = "fourier_ledger";
    let tol = cfg.tolerance(suite, default_tolerance(suite, cfg.backend_parsed()?));
    let grid = cfg.grid_spec()?;
    let n = grid.n;
    let mut records = Vec::new();

    // Convention certification on the closed-form Gaussian family: the
    // sampled e^{-|x|²/2} must transform to e^{-|ξ|²/2} and the
    // heat-smoothed Gaussian must match the completed-square formula at
    // a complex point. This must hold before anything downstream runs.
    let gauss = ScalarField::from_fn(grid, |x| {
        let r2: f64 = x.iter().map(|v| v * v).sum();
        c64((-r2 / 2.0).exp(), 0.0)
    });
    match fourier_with_threshold(&gauss, 1e-12) {
        Err(e) => {
            records.push(ReportRecord::rejection(
                suite,
                "gaussian_self_dual",
                json!({"grid": cfg.grid}),
                &e.to_string(),
            ));
            return Ok(records);
        }
        Ok(spec) => {
            let mut worst = 0.0f64;
            for flat in 0..grid.len() {
                let xi = grid.xi_point(flat);
                let r2: f64 = xi[..n].iter().map(|v| v * v).sum();
                worst = worst.max((spec.values[flat] - c64((-r2 / 2.0).exp(), 0.0)).norm());
            }
            records.push(ReportRecord::direct(
                suite,
                "gaussian_self_dual",
                json!({"grid": cfg.grid}),
                worst,
                1e-11,
            ));
            // Roundtrip identity.
            let back = inverse_fourier(&spec);
            let rt = back
                .values
                .iter()
                .zip(&gauss.values)
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max);
            records.push(ReportRecord::direct(
                suite,
                "roundtrip",
                json!({}),
                rt,
                1e-12,
            ));
            // Closed-form heat continuation: f = e^{-|x|²/4s} gives
            // f*p_t(z) = (s/(s+t))^{n/2} e^{-z·z/4(s+t)}.
            let s = 0.8;
            let t = cfg.params.t;
            let shaped = ScalarField::from_fn(grid, |x| {
                let r2: f64 = x.iter().map(|v| v * v).sum();
                c64((-r2 / (4.0 * s)).exp(), 0.0)
            });
            let sspec = fourier_with_threshold(&shaped, 1e-10).unwrap_or_else(|_| {
                mgharm_core::euclid::fourier_unchecked(&shaped)
            });
            let mut z = vec![c64(0.0, 0.0); n];
            z[0] = c64(0.9, 0.7);
            if n > 1 {
                z[1] = c64(-0.4, 0.2);
            }
            let got = bargmann_rn(&sspec, t, &z).map_err(|e| anyhow::anyhow!(e.to_string()))?;
            let zz: C64 = z.iter().map(|v| v * v).sum();
            let expect = (s / (s + t)).powf(n as f64 / 2.0) * (-zz / (4.0 * (s + t))).exp();
            records.push(ReportRecord::direct(
                suite,
                "heat_continuation_closed_form",
                json!({"s": s, "t": t}),
                (got - expect).norm(),
                1e-10,
            ));
            // Target-weight normalization: unit mass of the Gaussian
            // y-weight.
            let yg = YGrid {
                extent: 6.0 * t.sqrt() + 1.0,
                samples: 64,
            };
            let coords = yg.coords();
            let mut mass = 0.0;
            match n {
                2 => {
                    for &a in &coords {
                        for &b in &coords {
                            mass += gaussian_weight_mu(n, t, &[a, b]);
                        }
                    }
                }
                3 => {
                    for &a in &coords {
                        for &b in &coords {
                            for &c in &coords {
                                mass += gaussian_weight_mu(n, t, &[a, b, c]);
                            }
                        }
                    }
                }
                _ => unreachable!(),
            }
            mass *= yg.cell(n);
            records.push(ReportRecord::new(
                suite,
                "target_weight_mass",
                json!({"t": t}),
                1.0,
                mass,
                1e-10,
            ));
        }
    }

    // Grid Plancherel and spectral-vs-physical norm agreement on the
    // curated family.
    let rule = quadrature(cfg.backend_parsed()?, cfg.cutoff);
    for member in family(cfg)? {
        let boundary = field_boundary_mass(&member.field);
        if boundary > 1e-12 {
            records.push(ReportRecord::rejection(
                suite,
                &format!("plancherel_{}", member.name),
                json!({"boundary": boundary}),
                "aliasing: boundary mass above threshold",
            ));
            continue;
        }
        let a = member.field.norm_sq();
        let b = member.field.fourier().norm_sq();
        records.push(ReportRecord::new(
            suite,
            &format!("plancherel_{}", member.name),
            json!({}),
            a,
            b,
            tol,
        ));
        let c = member.field.norm_sq_physical(&rule);
        records.push(ReportRecord::new(
            suite,
            &format!("norm_physical_{}", member.name),
            json!({}),
            a,
            c,
            tol,
        ));
        if let Some(oracle) = member.oracle_norm_sq {
            // The grid Riemann sum of Gaussian moments deviates from the
            // continuum oracle by the Poisson-summation tail e^{-(π/h)²}.
            let h = grid.h();
            let oracle_tol = (20.0 * (-(PI / h).powi(2)).exp()).max(1e-12);
            records.push(ReportRecord::new(
                suite,
                &format!("norm_oracle_{}", member.name),
                json!({"trapezoid_tail": oracle_tol}),
                oracle,
                a,
                oracle_tol,
            ));
        }
    }
    Ok(records)
}

// ------------------------------------------ //
// Suite 2: classical transform isometry (Rⁿ) //
// ------------------------------------------ //

fn bargmann_isometry(cfg: &ExperimentConfig) -> Result<Vec<ReportRecord>> {
    let suite = "bargmann_isometry";
    let tol = cfg.tolerance(suite, default_tolerance(suite, cfg.backend_parsed()?));
    let grid = cfg.grid_spec()?;
    let t = cfg.params.t;
    let y_grid = YGrid {
        extent: cfg.params.y_extent.max(6.0 * t.sqrt()),
        samples: cfg.params.y_samples,
    };
    let mut records = Vec::new();
    for (name, f) in euclid_family(grid) {
        let start = std::time::Instant::now();
        match fourier(&f) {
            Err(e) => records.push(ReportRecord::rejection(
                suite,
                &name,
                json!({"t": t}),
                &e.to_string(),
            )),
            Ok(spec) => {
                let res = bargmann_isometry_check(&f, &spec, t, y_grid)
                    .map_err(|e| anyhow::anyhow!(e.to_string()))?;
                let mut rec = ReportRecord::new(
                    suite,
                    &name,
                    json!({"t": t, "y_extent": y_grid.extent, "y_samples": y_grid.samples}),
                    res.lhs,
                    res.rhs,
                    tol,
                );
                rec.wall_ms = start.elapsed().as_secs_f64() * 1e3;
                records.push(rec);
            }
        }
    }
    Ok(records)
}

// --------------------------------------------- //
// Suite 3: coherent-state transform isometry (M) //
// --------------------------------------------- //

fn sb_isometry(cfg: &ExperimentConfig) -> Result<Vec<ReportRecord>> {
    let suite = "sb_isometry";
    let backend = cfg.backend_parsed()?;
    let tol = cfg.tolerance(suite, default_tolerance(suite, backend));
    let t = cfg.params.t;
    let y_grid = YGrid {
        extent: cfg.params.y_extent.max(6.0 * t.sqrt()),
        samples: cfg.params.y_samples,
    };
    let mut records = Vec::new();
    let nu = match backend {
        Backend::U1 => coherent::NuMeasure::quadrature_u1(t)
            .map_err(|e| anyhow::anyhow!(e.to_string()))?,
        Backend::So3 => coherent::NuMeasure::spectral(backend, t),
    };
    // The explicit density must satisfy its defining moments before the
    // quadrature mode is trusted.
    if backend == Backend::U1 {
        let dev = coherent::certify_nu_density_u1(t, cfg.cutoff);
        records.push(ReportRecord::direct(
            suite,
            "nu_density_moments",
            json!({"t": t, "cutoff": cfg.cutoff}),
            dev,
            1e-9,
        ));
    }
    for member in family(cfg)? {
        let start = std::time::Instant::now();
        let res = coherent::sb_isometry_check(&member.field, t, &nu, y_grid)
            .map_err(|e| anyhow::anyhow!(e.to_string()))?;
        let mut rec = ReportRecord::new(
            suite,
            &format!("isometry_{}", member.name),
            json!({"t": t, "mode": match nu.mode {
                coherent::NuMode::Spectral => "spectral",
                coherent::NuMode::QuadratureU1 => "both",
            }}),
            res.check.lhs,
            res.check.rhs,
            tol,
        );
        rec.wall_ms = start.elapsed().as_secs_f64() * 1e3;
        records.push(rec);
        if let Some(agreement) = res.mode_agreement {
            records.push(ReportRecord::direct(
                suite,
                &format!("mode_agreement_{}", member.name),
                json!({"t": t}),
                agreement,
                cfg.tolerance("sb_isometry_mode", 1e-8),
            ));
        }
    }
    Ok(records)
}

// ------------------------------- //
// Suite 4: heat/Poisson semigroups //
// ------------------------------- //

fn semigroups(cfg: &ExperimentConfig) -> Result<Vec<ReportRecord>> {
    let suite = "semigroups";
    let backend = cfg.backend_parsed()?;
    let tol = cfg.tolerance(suite, default_tolerance(suite, backend));
    let grid = cfg.grid_spec()?;
    let mut records = Vec::new();
    // Heat times sized so the kernel resolves on the grid (spectral
    // tail below the comparison tolerance).
    let xi_max = grid.xi_max();
    let t = cfg.params.t.max(32.0 / (xi_max * xi_max));
    let s = cfg.params.s.max(0.6 * t);
    let psi_t = heat_field(backend, grid, t, cfg.cutoff);
    let conv = convolve_heat(&psi_t, s);
    let direct = heat_field(backend, grid, t + s, cfg.cutoff);
    let mut worst = 0.0f64;
    let mut scale = 0.0f64;
    for (label, block) in &direct.blocks {
        let other = &conv.blocks[label];
        for (a, b) in block.iter().zip(other) {
            worst = worst.max((a - b).norm());
            scale = scale.max(a.norm());
        }
    }
    records.push(ReportRecord::direct(
        suite,
        "heat_semigroup",
        json!({"t": t, "s": s}),
        worst / scale.max(1e-300),
        tol,
    ));
    records.push(ReportRecord::new(
        suite,
        "heat_mass",
        json!({"t": t}),
        1.0,
        mgharm_core::motion::mass(&psi_t).re,
        1e-10,
    ));

    for member in family(cfg)?.into_iter().take(4) {
        let spec = member.field.fourier();
        // Poisson composition (multiplier algebra).
        let a = poisson(&poisson(&spec, cfg.params.s), cfg.params.t);
        let b = poisson(&spec, cfg.params.s + cfg.params.t);
        let mut worst = 0.0f64;
        let mut scale = 0.0f64;
        for (label, block) in &b.blocks {
            let other = &a.blocks[label];
            for (x, y) in block.iter().zip(other) {
                worst = worst.max((x - y).norm());
                scale = scale.max(x.norm());
            }
        }
        records.push(ReportRecord::direct(
            suite,
            &format!("poisson_semigroup_{}", member.name),
            json!({"t": cfg.params.t, "s": cfg.params.s}),
            worst / scale.max(1e-300),
            tol,
        ));
        // Strict contraction.
        let n0 = spec.norm_sq();
        let n1 = poisson(&spec, cfg.params.t).norm_sq();
        records.push(ReportRecord::gate(
            suite,
            &format!("poisson_contraction_{}", member.name),
            json!({"before": n0, "after": n1}),
            n1 < n0 * (1.0 - 1e-9),
            n1 / n0,
        ));
        // Roundtrip on smoothed fields.
        let smoothed = convolve_heat(&member.field, cfg.params.t).fourier();
        let g = poisson(&smoothed, cfg.params.s);
        match poisson_invert(&g, cfg.params.s, 1e-6) {
            Err(e) => records.push(ReportRecord::rejection(
                suite,
                &format!("poisson_roundtrip_{}", member.name),
                json!({}),
                &e.to_string(),
            )),
            Ok(back) => {
                let mut worst = 0.0f64;
                let mut scale = 0.0f64;
                for (label, block) in &smoothed.blocks {
                    let other = &back.blocks[label];
                    for (x, y) in block.iter().zip(other) {
                        worst = worst.max((x - y).norm());
                        scale = scale.max(x.norm());
                    }
                }
                records.push(ReportRecord::direct(
                    suite,
                    &format!("poisson_roundtrip_{}", member.name),
                    json!({"s": cfg.params.s}),
                    worst / scale.max(1e-300),
                    cfg.tolerance("poisson_roundtrip", 1e-8),
                ));
            }
        }
    }
    Ok(records)
}

// ----------------------------- //
// Suite 5: Gutzmer identity on K //
// ----------------------------- //

fn gutzmer_k(cfg: &ExperimentConfig) -> Result<Vec<ReportRecord>> {
    let suite = "gutzmer_k";
    let backend = cfg.backend_parsed()?;
    let tol = cfg.tolerance(suite, default_tolerance(suite, backend));
    let mut records = Vec::new();
    let labels: Vec<i32> = match backend {
        Backend::U1 => (-(cfg.cutoff as i32)..=cfg.cutoff as i32).collect(),
        Backend::So3 => (0..=(cfg.cutoff.min(3) as i32)).collect(),
    };
    let h_values = [0.1, 0.3, 0.5];
    for label in labels {
        let pi = IrrepMeta::new(backend, label).map_err(|e| anyhow::anyhow!(e.to_string()))?;
        let d = pi.degree;
        let (i, j) = if d == 1 { (0, 0) } else { (1, 0) };
        let f = KCoeffs::normalized_coefficient(backend, label, i, j);
        let rule = quadrature(backend, label.unsigned_abs());
        for &h in &h_values {
            let res = gutzmer_k_check(&f, h, &rule).map_err(|e| anyhow::anyhow!(e.to_string()))?;
            records.push(ReportRecord::new(
                suite,
                &format!("coefficient_{label}_{i}{j}_h{h}"),
                json!({"label": label, "h": h}),
                res.lhs,
                res.rhs,
                tol,
            ));
        }
    }
    Ok(records)
}

// ----------------------------- //
// Suite 6: Gutzmer identity on M //
// ----------------------------- //

fn gutzmer_m(cfg: &ExperimentConfig) -> Result<Vec<ReportRecord>> {
    let suite = "gutzmer_m";
    let backend = cfg.backend_parsed()?;
    let tol = cfg.tolerance(suite, default_tolerance(suite, backend));
    let grid = cfg.grid_spec()?;
    let rule = quadrature(backend, cfg.cutoff);
    let r = cfg.params.r.min(0.5);
    let h = cfg.params.h.min(0.3);
    let mut y = vec![0.0; grid.n];
    y[0] = r;
    let mut records = Vec::new();
    let members = family(cfg)?;
    for member in members.iter().take(5) {
        let spec = convolve_heat(&member.field, cfg.params.t).fourier();
        let res =
            gutzmer_m_check(&spec, &y, h, &rule).map_err(|e| anyhow::anyhow!(e.to_string()))?;
        records.push(ReportRecord::new(
            suite,
            &format!("identity_{}", member.name),
            json!({"y": r, "h": h, "t": cfg.params.t}),
            res.lhs,
            res.rhs,
            tol,
        ));
    }
    // Plancherel restriction at the origin of parameters.
    if let Some(member) = members.first() {
        let spec = convolve_heat(&member.field, cfg.params.t).fourier();
        let zero = vec![0.0; grid.n];
        let res =
            gutzmer_m_check(&spec, &zero, 0.0, &rule).map_err(|e| anyhow::anyhow!(e.to_string()))?;
        records.push(ReportRecord::new(
            suite,
            "plancherel_restriction",
            json!({}),
            res.lhs,
            res.rhs,
            1e-10,
        ));
    }
    // Cutoff refinement: the truncated series residual halves (or
    // better) when the series cutoff doubles, on a mixture with
    // decaying block weights.
    if cfg.cutoff >= 2 {
        let mixture = members
            .iter()
            .find(|m| m.oracle_norm_sq.is_none())
            .expect("family contains mixtures");
        let spec = convolve_heat(&mixture.field, cfg.params.t).fourier();
        let full = gutzmer_m_check(&spec, &y, h, &rule)
            .map_err(|e| anyhow::anyhow!(e.to_string()))?;
        let c0 = cfg.cutoff / 2;
        let series_half = gutzmer_m_series(&spec, &y, h, c0);
        let series_full = gutzmer_m_series(&spec, &y, h, cfg.cutoff);
        let r1 = (full.lhs - series_half).abs();
        let r2 = (full.lhs - series_full).abs();
        records.push(ReportRecord::gate(
            suite,
            "cutoff_refinement",
            json!({"residual_half": r1, "residual_full": r2, "c0": c0}),
            r2 <= 0.5 * r1,
            r2 / r1.max(1e-300),
        ));
    }
    Ok(records)
}

// ----------------------------------- //
// Suite 7: Poisson domain diagnostics //
// ----------------------------------- //

fn poisson_domain(cfg: &ExperimentConfig) -> Result<Vec<ReportRecord>> {
    let suite = "poisson_domain";
    let backend = cfg.backend_parsed()?;
    let mut records = Vec::new();
    let members = family(cfg)?;
    let member = &members[members.len().min(1) - 1];
    let spec = member.field.fourier();
    let report = poisson_domain_check(&spec, 1.0, &[0.25, 0.5, 0.75, 0.9, 0.99]);
    records.push(ReportRecord::direct(
        suite,
        "multiplier_bound",
        json!({"t": 1.0, "y_limit": report.y_limit, "h_limit": report.h_limit}),
        (report.multiplier_sup - 1.0).max(0.0),
        cfg.tolerance(suite, 1e-9),
    ));
    records.push(ReportRecord::gate(
        suite,
        "series_finite_on_mesh",
        json!({"sup": report.sup_series, "points": report.mesh.len()}),
        report.all_finite && report.sup_series.is_finite(),
        report.sup_series,
    ));
    // Growth constants certified by sweep.
    let slack = mgharm_core::compact::certify_growth_constants(backend, cfg.cutoff.max(8), 1.5);
    records.push(ReportRecord::gate(
        suite,
        "growth_constants",
        json!({"a": 1.0, "m": 1.0, "n": 2.0, "slack": slack}),
        slack >= -1e-12,
        slack,
    ));
    // Character sphere-average lower bound.
    let radii: Vec<f64> = (1..=5).map(|k| 0.1 * k as f64).collect();
    let max_label = match backend {
        Backend::U1 => cfg.cutoff.max(8),
        Backend::So3 => 8,
    };
    let sweep = character_sphere_bound_check(backend, &radii, max_label, 2.0);
    records.push(ReportRecord::gate(
        suite,
        "character_sphere_lower_bound",
        json!({"c": sweep.c, "fitted_a": sweep.fitted_a, "rows": sweep.rows.len()}),
        sweep.fitted_a > 0.0,
        sweep.fitted_a,
    ));
    Ok(records)
}

// ------------------------------------------- //
// Suite 8: two-sided holomorphic-extension law //
// ------------------------------------------- //

fn pw_components(cfg: &ExperimentConfig) -> Result<(Vec<PwComponent>, GridSpec)> {
    let backend = cfg.backend_parsed()?;
    match backend {
        Backend::U1 => {
            let samples = cfg.grid.samples.min(64);
            let grid = GridSpec::new(2, cfg.grid.extent.min(10.0), samples)
                .map_err(|e| anyhow::anyhow!(e.to_string()))?;
            let rule = quadrature(backend, 6);
            let prof = |lambda: i32| {
                move |xi: &[f64]| {
                    let w = c64(xi[0], xi[1]);
                    let r2 = xi[0] * xi[0] + xi[1] * xi[1];
                    let harm = match lambda.cmp(&0) {
                        std::cmp::Ordering::Greater => w.powi(lambda),
                        std::cmp::Ordering::Less => w.conj().powi(-lambda),
                        std::cmp::Ordering::Equal => c64(1.0, 0.0),
                    };
                    harm * (-r2 / 2.0).exp()
                }
            };
            let comps = vec![
                PwComponent::new(backend, grid, 1, 1, vec![c64(0.9, 0.1)], prof(1), &rule)
                    .map_err(|e| anyhow::anyhow!(e.to_string()))?,
                PwComponent::new(backend, grid, 1, -1, vec![c64(0.3, -0.5)], prof(-1), &rule)
                    .map_err(|e| anyhow::anyhow!(e.to_string()))?,
                PwComponent::new(backend, grid, -2, 0, vec![c64(0.0, 0.6)], prof(0), &rule)
                    .map_err(|e| anyhow::anyhow!(e.to_string()))?,
            ];
            Ok((comps, grid))
        }
        Backend::So3 => {
            let samples = cfg.grid.samples.min(16);
            let grid = GridSpec::new(3, cfg.grid.extent.min(6.0), samples)
                .map_err(|e| anyhow::anyhow!(e.to_string()))?;
            let rule = quadrature(backend, 3);
            let prof_l1 = |xi: &[f64]| {
                let r2: f64 = xi.iter().map(|v| v * v).sum();
                (c64(1.0, 0.0) * xi[0] + c64(0.0, 0.5) * xi[1] + c64(-0.3, 0.2) * xi[2])
                    * (-r2).exp()
            };
            let prof_l0 = |xi: &[f64]| {
                let r2: f64 = xi.iter().map(|v| v * v).sum();
                c64((-r2).exp(), 0.0)
            };
            let mut w1 = vec![c64(0.0, 0.0); 9];
            w1[1] = c64(1.0, 0.0);
            w1[5] = c64(0.2, -0.4);
            let mut w0 = vec![c64(0.0, 0.0); 9];
            w0[4] = c64(0.5, 0.3);
            let comps = vec![
                PwComponent::new(backend, grid, 1, 1, w1, prof_l1, &rule)
                    .map_err(|e| anyhow::anyhow!(e.to_string()))?,
                PwComponent::new(backend, grid, 1, 0, w0, prof_l0, &rule)
                    .map_err(|e| anyhow::anyhow!(e.to_string()))?,
            ];
            Ok((comps, grid))
        }
    }
}

fn paley_wiener(cfg: &ExperimentConfig) -> Result<Vec<ReportRecord>> {
    let suite = "paley_wiener";
    let backend = cfg.backend_parsed()?;
    let tol = cfg.tolerance(suite, default_tolerance(suite, backend));
    let (comps, grid) = pw_components(cfg)?;
    let r = cfg.params.r.min(0.4);
    let h = cfg.params.h.min(0.3);
    let mut records = Vec::new();
    let sphere = surface_rule(grid.n, 16);
    let k_rule = quadrature(backend, cfg.cutoff.max(2));
    let u_rule = quadrature(backend, if backend == Backend::U1 { 8 } else { 4 });
    let nn = grid.samples;
    let cross_cells: Vec<usize> = match grid.n {
        2 => vec![
            (nn / 2 + 2) * nn + nn / 2 + 3,
            (nn / 2 - 4) * nn + nn / 2 - 2,
        ],
        _ => vec![
            ((nn / 2 + 1) * nn + nn / 2 + 2) * nn + nn / 2 - 1,
            ((nn / 2 - 2) * nn + nn / 2) * nn + nn / 2 + 1,
        ],
    };
    // Full identity on the component mixture.
    let start = std::time::Instant::now();
    let res = pw_identity_check(&comps, r, h, &sphere, &k_rule, &u_rule, &cross_cells);
    let mut rec = ReportRecord::new(
        suite,
        "two_sided_identity",
        json!({"r": r, "h": h, "components": comps.len()}),
        res.check.lhs,
        res.check.rhs,
        tol,
    );
    rec.wall_ms = start.elapsed().as_secs_f64() * 1e3;
    records.push(rec);
    records.push(ReportRecord::direct(
        suite,
        "cross_terms",
        json!({"cells": cross_cells.len()}),
        res.cross_term_max,
        cfg.tolerance("paley_cross", 1e-10),
    ));
    // Plancherel restriction at r = 0, H = 0.
    let spectral0 = mgharm_core::paley::pw_spectral_side(&comps, 0.0, 0.0);
    let norm: f64 = comps
        .iter()
        .map(|c| c.to_pw_field().norm_sq())
        .sum();
    records.push(ReportRecord::new(
        suite,
        "plancherel_restriction",
        json!({}),
        norm,
        spectral0,
        1e-9,
    ));
    // Closed form against the direct operator quadrature (u1 target).
    if backend == Backend::U1 {
        let fine_u = quadrature(backend, 12);
        let fine_sphere = surface_rule(2, 24);
        let mut worst = 0.0f64;
        for &cell in &cross_cells {
            let closed = pw_spectral_integrand(&comps, r, h, cell);
            let direct = pw_direct_hs_at(&comps, r, h, cell, &fine_u, &fine_sphere);
            worst = worst.max((closed - direct).abs() / closed.abs().max(1e-300));
        }
        records.push(ReportRecord::direct(
            suite,
            "closed_form_vs_hs_quadrature",
            json!({"r": r, "h": h}),
            worst,
            cfg.tolerance("paley_eqn", 1e-6),
        ));
        // Cross term of inequivalent λ at one cell (quadrature route).
        let ct = pw_cross_term_at(&comps[0], &comps[1], r, h, cross_cells[0], &fine_u);
        records.push(ReportRecord::direct(
            suite,
            "cross_term_quadrature",
            json!({}),
            ct.norm(),
            1e-10,
        ));
    }
    // Action unitarity at real points on the truncated basis.
    let xi: Vec<f64> = match grid.n {
        2 => vec![1.4, 0.6],
        _ => vec![0.8, 0.3, 1.0],
    };
    let x_small: Vec<f64> = match grid.n {
        2 => vec![0.3, -0.2],
        _ => vec![0.2, 0.1, -0.2],
    };
    let arg: f64 = x_small
        .iter()
        .zip(&xi)
        .map(|(a, b)| a.abs() * b.abs())
        .sum::<f64>()
        + x_small.iter().map(|v| v * v).sum::<f64>().sqrt()
            * xi.iter().map(|v| v * v).sum::<f64>().sqrt();
    let band = action_band_for(2.0 * arg, 1e-14).max(6);
    let act_rule = quadrature(backend, 3 * band);
    let at = ComplexMotionPoint::real(
        &x_small,
        match backend {
            Backend::U1 => GroupElement::U1 { theta: 0.7 },
            Backend::So3 => GroupElement::So3 {
                alpha: 0.4,
                beta: 0.8,
                gamma: 1.2,
            },
        },
    );
    let col = complexified_action(backend, &xi, &at, 1, 0, 0, 3 * band, &act_rule);
    let captured: f64 = col.coeffs.iter().map(|v| v.norm_sqr()).sum();
    records.push(ReportRecord::new(
        suite,
        "action_unitary_real_points",
        json!({"xi": xi, "band": 3 * band}),
        1.0,
        captured,
        cfg.tolerance("paley_unitarity", 1e-12),
    ));
    Ok(records)
}

// ------------------------------------ //
// Suite 9: isotropy-refined partition //
// ------------------------------------ //

fn sigma_refined(cfg: &ExperimentConfig) -> Result<Vec<ReportRecord>> {
    let suite = "sigma_refined";
    let backend = cfg.backend_parsed()?;
    let tol = cfg.tolerance(suite, default_tolerance(suite, backend));
    let mut records = Vec::new();
    let band = cfg.cutoff.min(2).max(1);
    let xi: Vec<f64> = match backend {
        Backend::U1 => vec![0.9, 0.4],
        Backend::So3 => vec![0.0, 0.0, 1.2],
    };
    // Projector algebra on the band-limited basis.
    let basis = PwBasis::new(backend, band);
    let dim = basis.dim();
    let sigmas: Vec<i32> = match backend {
        Backend::U1 => vec![0],
        Backend::So3 => (-(band as i32)..=band as i32).collect(),
    };
    let projs: Vec<_> = sigmas
        .iter()
        .map(|s| isotropy_projection(backend, *s, &xi, band))
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(|e| anyhow::anyhow!(e.to_string()))?;
    let mut idempotency = 0.0f64;
    let mut orthogonality = 0.0f64;
    let mut completeness = 0.0f64;
    for (a, pa) in projs.iter().enumerate() {
        for i in 0..dim {
            for j in 0..dim {
                let mut sq = c64(0.0, 0.0);
                for t in 0..dim {
                    sq += pa.mat[i * dim + t] * pa.mat[t * dim + j];
                }
                idempotency = idempotency.max((sq - pa.mat[i * dim + j]).norm());
            }
        }
        for (b, pb) in projs.iter().enumerate() {
            if a == b {
                continue;
            }
            for i in 0..dim {
                for j in 0..dim {
                    let mut prod = c64(0.0, 0.0);
                    for t in 0..dim {
                        prod += pa.mat[i * dim + t] * pb.mat[t * dim + j];
                    }
                    orthogonality = orthogonality.max(prod.norm());
                }
            }
        }
    }
    for i in 0..dim {
        for j in 0..dim {
            let total: C64 = projs.iter().map(|p| p.mat[i * dim + j]).sum();
            let expect = if i == j { 1.0 } else { 0.0 };
            completeness = completeness.max((total - c64(expect, 0.0)).norm());
        }
    }
    let proj_tol = cfg.tolerance("projector_algebra", 1e-10);
    records.push(ReportRecord::direct(
        suite,
        "projector_idempotency",
        json!({"band": band}),
        idempotency,
        proj_tol,
    ));
    records.push(ReportRecord::direct(
        suite,
        "projector_orthogonality",
        json!({}),
        orthogonality,
        proj_tol,
    ));
    records.push(ReportRecord::direct(
        suite,
        "projector_completeness",
        json!({}),
        completeness,
        proj_tol,
    ));
    // Partition of the action norm (trivial and exact on u1).
    let at = ComplexMotionPoint {
        z: match backend {
            Backend::U1 => vec![c64(0.2, 0.05), c64(-0.1, 0.1)],
            Backend::So3 => vec![c64(0.2, 0.05), c64(-0.1, 0.1), c64(0.15, -0.08)],
        },
        g: mgharm_core::compact::ComplexGroupPoint {
            k: match backend {
                Backend::U1 => GroupElement::U1 { theta: 0.6 },
                Backend::So3 => GroupElement::So3 {
                    alpha: 0.4,
                    beta: 0.9,
                    gamma: 2.2,
                },
            },
            h: CartanVector(0.2),
        },
    };
    let rule = quadrature(backend, 8);
    let op = u_action_matrix(backend, &xi, &at, band, &rule);
    let res = sigma_refined_partition(backend, &xi, &op, band)
        .map_err(|e| anyhow::anyhow!(e.to_string()))?;
    records.push(ReportRecord::direct(
        suite,
        "partition_identity",
        json!({"xi": xi, "sigmas": res.sigmas.len(), "total": res.total}),
        res.partition_rel_err,
        tol,
    ));
    Ok(records)
}

// -------------------- //
// Suite 10: determinism //
// -------------------- //

fn determinism(cfg: &ExperimentConfig) -> Result<Vec<ReportRecord>> {
    let suite = "determinism";
    // Re-run a representative computation twice and require bit-equal
    // stable records (timing excluded).
    let pass = |records: &[ReportRecord]| -> String {
        let stable: Vec<_> = records.iter().map(|r| r.stable()).collect();
        serde_json::to_string(&stable).expect("serializable")
    };
    let a1 = gutzmer_k(cfg)?;
    let a2 = gutzmer_k(cfg)?;
    let b1 = semigroups(cfg)?;
    let b2 = semigroups(cfg)?;
    let same = pass(&a1) == pass(&a2) && pass(&b1) == pass(&b2);
    Ok(vec![ReportRecord::gate(
        suite,
        "repeated_runs_bit_identical",
        json!({"cases": a1.len() + b1.len()}),
        same,
        if same { 0.0 } else { 1.0 },
    )])
}

/// Euclidean-family oracle: `C_t` restricted to real points equals heat
/// smoothing (exposed for the acceptance suite).
pub fn heat_restriction_residual(cfg: &ExperimentConfig) -> Result<f64> {
    let backend = cfg.backend_parsed()?;
    let grid = cfg.grid_spec()?;
    let t = cfg.params.t;
    let member = &family(cfg)?[0];
    let spec = member.field.fourier();
    let smoothed = convolve_heat(&member.field, t);
    let mut worst = 0.0f64;
    let k = GroupElement::identity(backend);
    for cell in (0..grid.len()).step_by(97) {
        let at = ComplexMotionPoint::real(&grid.point(cell)[..grid.n], k);
        let v = coherent::sb_transform(&spec, t, &at).map_err(|e| anyhow::anyhow!(e.to_string()))?;
        worst = worst.max((v - smoothed.synthesize(cell, &k)).norm());
    }
    Ok(worst)
}

#[allow(dead_code)]
fn unused_pi() -> f64 {
    PI
}
