use rand::Rng;

use super::{Builder, RunConfig};
use crate::error::Result;
use crate::linalg::random::{complex_normal, gaussian_matrix, gaussian_vector, normal_matrix, par_trials};
use crate::linalg::{spectral_data, CMatrix, RankOne};
use crate::pseudospec::{check_pseudo_properties, pseudo_spectral_radius, rank_one_psr_closed_form, Epsilon};
use crate::report::Witness;

const RANK_ONE_EPS: [f64; 2] = [0.1, 1.0];

/// Sweep-based `r_ε(x⊗f)` against the closed form, relative error.
pub(super) fn rank_one_psr(cfg: &RunConfig) -> Result<super::Report> {
    let dims = cfg.dims_or(&[3, 4, 5, 6, 7, 8]);
    let trials = cfg.trials_or(200);
    let mut b = Builder::new("rank-one-psr", cfg, dims.clone(), trials, cfg.tol("tolerance", 1e-6));
    for (i, &n) in dims.iter().enumerate() {
        let rows = par_trials(cfg.sub_seed(i as u64), trials, |r, _| -> Result<Vec<(f64, f64, f64)>> {
            let x = gaussian_vector(r, n);
            let f = gaussian_vector(r, n);
            let a = RankOne::new(x.clone(), f.clone())?.to_matrix();
            RANK_ONE_EPS
                .iter()
                .map(|&e| {
                    let eps = Epsilon::new(e)?;
                    Ok((e, pseudo_spectral_radius(&a, eps), rank_one_psr_closed_form(&x, &f, eps)?))
                })
                .collect()
        });
        for (k, row) in rows.into_iter().enumerate() {
            for (e, sweep, exact) in row? {
                let rel = (sweep - exact).abs() / exact;
                b.violation(rel, || {
                    Witness::new(
                        format!("n = {n}, eps = {e}, trial {k}"),
                        rel,
                        format!("sweep {sweep:.15}, closed form {exact:.15}"),
                    )
                });
                b.max_metric(&format!("max_relative_error_n{n}"), rel);
            }
        }
    }
    b.metric("evaluations", (dims.len() * trials * RANK_ONE_EPS.len()) as f64);
    b.note("max_violation is the largest relative error |sweep - closed form| / closed form");
    Ok(b.finish())
}

/// Normal-case equality `r_ε = r + ε`, spectrum-plus-disc inclusion,
/// translation and scaling covariance. Violations are normalized by their
/// component tolerances.
pub(super) fn pseudo_properties(cfg: &RunConfig) -> Result<super::Report> {
    let dims = cfg.dims_or(&[3, 4, 5]);
    let trials = cfg.trials_or(100);
    let general = trials.div_ceil(4);
    let grid = cfg.grid.unwrap_or(96);
    let num_tol = cfg.tol("numeric", 1e-6);
    let cell_tol = cfg.tol("region_cells", 2.0);
    let mut b = Builder::new("pseudo-properties", cfg, dims.clone(), trials, 1.0);

    struct Row {
        n: usize,
        normal: bool,
        eps: f64,
        radius_dev: Option<f64>,
        report: crate::pseudospec::PseudoPropertyReport,
    }
    let rows = par_trials(cfg.sub_seed(0), trials + general, |r, k| -> Result<Row> {
        let n = dims[k % dims.len()];
        let normal = k < trials;
        let a: CMatrix = if normal { normal_matrix(r, n) } else { gaussian_matrix(r, n) };
        let e = r.gen_range(0.1..1.0);
        let eps = Epsilon::new(e)?;
        let mut c = complex_normal(r);
        if c.norm() < 0.1 {
            c /= c.norm() / 0.1;
        }
        let report = check_pseudo_properties(&a, eps, c, grid, r)?;
        let radius_dev = if normal {
            let rho = spectral_data(&a)?.eigenvalues.iter().map(|z| z.norm()).fold(0.0, f64::max);
            Some((pseudo_spectral_radius(&a, eps) - (rho + e)).abs())
        } else {
            None
        };
        Ok(Row {
            n,
            normal,
            eps: e,
            radius_dev,
            report,
        })
    });

    for (k, row) in rows.into_iter().enumerate() {
        let row = row?;
        let rep = &row.report;
        let tag = format!(
            "{} A, n = {}, eps = {:.3}, trial {k}",
            if row.normal { "normal" } else { "general" },
            row.n,
            row.eps
        );
        let mut components = vec![
            ("translation_gap", rep.translation_gap_deviation, num_tol),
            ("scaling_gap", rep.scaling_gap_deviation, num_tol),
            ("scaling_radius", rep.scaling_radius_deviation, num_tol),
            ("translation_region_cells", rep.translation_region_cells, cell_tol),
        ];
        if let Some(d) = row.radius_dev {
            components.push(("normal_radius", d, num_tol));
        }
        if let Some(d) = rep.normal_deviation_cells {
            components.push(("normal_region_cells", d, cell_tol));
        }
        for (name, value, tol) in components {
            b.max_metric(&format!("max_{name}"), value);
            b.violation(value / tol, || Witness::new(format!("{tag}: {name}"), value, format!("limit {tol:e}")));
        }
        b.add_metric("inclusion_tested", rep.inclusion_tested as f64);
        b.add_metric("inclusion_failures", rep.inclusion_failures as f64);
        if rep.inclusion_failures > 0 {
            let f = rep.inclusion_failures;
            b.violation(1.0 + f as f64, || {
                Witness::new(format!("{tag}: inclusion"), f as f64, "points λ + 0.9ε e^{iφ} outside σ_ε(A)")
            });
        }
    }
    b.metric("normal_trials", trials as f64);
    b.metric("general_trials", general as f64);
    b.metric("grid", grid as f64);
    b.note(format!(
        "max_violation is normalized: numeric deviations over {num_tol:e}, region distances over {cell_tol} grid cells, inclusion failures count as 1 + failures"
    ));
    b.note("general (non-normal) matrices check the covariances only");
    Ok(b.finish())
}
