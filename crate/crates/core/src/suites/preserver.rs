use rand::Rng;

use super::{Builder, RunConfig};
use crate::error::Result;
use crate::linalg::random::{haar_isometry, haar_unitary, seeded, SpecRng};
use crate::linalg::{c64, CMatrix, NormKind};
use crate::numrange::QParam;
use crate::preserver::{
    check_axioms, check_invariance, check_norm_identity, check_orthogonality_transfer,
    check_zero_product_equivalence, conjugation_distinguisher, shift_example_demo_with, AxiomStatus, Functional,
    HMap, InvarianceReport, PhaseFn, PreserverMap, G_FIT_TOL, NORM_TOL,
};
use crate::pseudospec::Epsilon;
use crate::report::Witness;

/// Canonical maps with a designated unitary, in report order.
fn canonical_maps(r: &mut SpecRng, n: usize) -> Result<Vec<PreserverMap>> {
    let mut maps = Vec::new();
    for conjugate in [false, true] {
        let phase = PhaseFn::SeededRandomPerInput(r.gen());
        maps.push(PreserverMap::two_sided(haar_unitary(r, n), haar_unitary(r, n), phase, conjugate)?);
    }
    for conjugate in [false, true] {
        maps.push(PreserverMap::per_operator_isometry(haar_unitary(r, n), haar_isometry(r, n, n), conjugate)?);
    }
    for conjugate in [false, true] {
        let hmap = HMap::PhasedUnitary {
            v: haar_unitary(r, n),
            seed: r.gen(),
        };
        maps.push(PreserverMap::rank_one_canonical(haar_unitary(r, n), hmap, conjugate)?);
    }
    maps.push(PreserverMap::rank_one_canonical(haar_unitary(r, n), HMap::Unitary(haar_unitary(r, n)), false)?);
    Ok(maps)
}

fn status_label(s: Option<AxiomStatus>) -> &'static str {
    match s {
        Some(AxiomStatus::Pass) => "pass",
        Some(AxiomStatus::Fail) => "fail",
        Some(AxiomStatus::NotApplicable) | None => "n/a",
    }
}

/// Expected axiom outcomes: r_ε and w_C satisfy (F1)–(F3), r_ε fails (F1''),
/// Schatten and Ky Fan norms satisfy (F1''), (F2''), (F2') with `g(t) = t`.
pub(super) fn axioms(cfg: &RunConfig) -> Result<super::Report> {
    let n = cfg.n.unwrap_or(3);
    let mut b = Builder::new("axioms", cfg, vec![n], 1, 0.0);
    let e12 = CMatrix::unit(2, 0, 1);
    let cases: Vec<(Functional, Vec<(&str, AxiomStatus)>, bool)> = vec![
        (
            Functional::PseudoSpectralRadius(Epsilon::new(0.5)?),
            vec![
                ("F1", AxiomStatus::Pass),
                ("F2", AxiomStatus::Pass),
                ("F3", AxiomStatus::Pass),
                ("F1''", AxiomStatus::Fail),
            ],
            false,
        ),
        (
            Functional::CNumericalRadius(e12),
            vec![("F1", AxiomStatus::Pass), ("F2", AxiomStatus::Pass), ("F3", AxiomStatus::Pass)],
            false,
        ),
        (
            Functional::UnitaryInvariantNorm(NormKind::schatten(3.0)?),
            vec![("F1''", AxiomStatus::Pass), ("F2''", AxiomStatus::Pass), ("F2'", AxiomStatus::Pass)],
            true,
        ),
        (
            Functional::UnitaryInvariantNorm(NormKind::ky_fan(2)?),
            vec![("F1''", AxiomStatus::Pass), ("F2''", AxiomStatus::Pass), ("F2'", AxiomStatus::Pass)],
            true,
        ),
    ];
    let mut unmet = Vec::new();
    for (i, (f, expected, g_identity)) in cases.iter().enumerate() {
        let label = f.label();
        let report = check_axioms(f, n, &mut seeded(cfg.sub_seed(i as u64)))?;
        let summary: Vec<String> = report
            .outcomes
            .iter()
            .map(|o| format!("{} {}", o.axiom, status_label(Some(o.status))))
            .collect();
        b.note(format!("{label}: {}", summary.join(", ")));
        for (axiom, want) in expected {
            let got = report.status(axiom);
            let outcome = report.outcome(axiom);
            if got != Some(*want) {
                unmet.push(Witness::new(
                    format!("{label} {axiom}"),
                    outcome.map_or(f64::NAN, |o| o.max_violation),
                    format!("expected {}, got {}", status_label(Some(*want)), status_label(got)),
                ));
            } else if *want == AxiomStatus::Fail {
                if let Some(w) = outcome.and_then(|o| o.witness.clone()) {
                    b.witness(Witness::new(format!("{label} fails {axiom}: {}", w.label), w.value, w.detail));
                }
            }
        }
        if matches!(f, Functional::CNumericalRadius(_)) {
            let (lo, hi) = report
                .profile
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| (lo.min(p.1), hi.max(p.1)));
            b.metric("wc_profile_spread", hi - lo);
            if hi - lo <= 1e-3 {
                unmet.push(Witness::new(format!("{label} profile"), hi - lo, "profile of C is constant"));
            }
        }
        if *g_identity {
            let dev = report.g_identity_deviation.unwrap_or(f64::NAN);
            b.metric(format!("g_identity_deviation {label}"), dev);
            if !(dev <= G_FIT_TOL) {
                unmet.push(Witness::new(format!("{label} g(t) = t"), dev, format!("limit {G_FIT_TOL:e}")));
            }
        }
    }
    let count = unmet.len();
    let first = unmet.first().cloned();
    for w in unmet.into_iter().skip(1) {
        b.witness(w);
    }
    b.failures(count, || first.unwrap_or_else(|| Witness::new("expectations", 0.0, "all met")));
    b.note("max_violation counts unmet expectations; other outcomes are listed above as observed");
    Ok(b.finish())
}

/// `A^*B = 0 ⟺ Φ(A)^*Φ(B) = 0` for every canonical map form.
pub(super) fn zero_product(cfg: &RunConfig) -> Result<super::Report> {
    let dims = cfg.dims_or(&[3, 4, 5]);
    let trials = cfg.trials_or(200);
    let mut b = Builder::new("zero-product", cfg, dims.clone(), trials, 0.0);
    for (i, &n) in dims.iter().enumerate() {
        let mut r = seeded(cfg.sub_seed(i as u64));
        for m in canonical_maps(&mut r, n)? {
            let rep = check_zero_product_equivalence(&m, trials, &mut r)?;
            b.add_metric("zero_pairs", rep.zero_pairs as f64);
            b.add_metric("nonzero_pairs", rep.nonzero_pairs as f64);
            b.add_metric("discarded", rep.discarded as f64);
            b.add_metric("violations", rep.violations as f64);
            let first = rep.witnesses.first().cloned();
            b.failures(rep.violations, || {
                first.unwrap_or_else(|| Witness::new(format!("{} at n = {n}", rep.map), 0.0, "no violations"))
            });
        }
    }
    b.note("max_violation is the largest violation count of a single map");
    Ok(b.finish())
}

fn scalar_functionals() -> Result<Vec<Functional>> {
    let mut fs = vec![
        Functional::PseudoSpectralRadius(Epsilon::new(0.5)?),
        Functional::QNumericalRadius(QParam::new(0.6)?),
        Functional::CNumericalRadius(CMatrix::from_real_diagonal(&[1.0, -0.5, 0.25])),
        Functional::CNumericalRadius(CMatrix::unit(2, 0, 1)),
        Functional::KNumericalRadius(2),
    ];
    fs.extend(norm_functionals()?);
    Ok(fs)
}

fn norm_functionals() -> Result<Vec<Functional>> {
    Ok(vec![
        Functional::UnitaryInvariantNorm(NormKind::Operator),
        Functional::UnitaryInvariantNorm(NormKind::schatten(3.0)?),
        Functional::UnitaryInvariantNorm(NormKind::ky_fan(2)?),
        Functional::UnitaryInvariantNorm(NormKind::Trace),
        Functional::UnitaryInvariantNorm(NormKind::Frobenius),
    ])
}

fn record_invariance(b: &mut Builder, n: usize, rep: &InvarianceReport) {
    if rep.asserted {
        let v = rep.max_deviation / rep.tolerance;
        let w = rep.witness.clone();
        b.violation(v, || {
            let detail = w.map_or(String::new(), |w| w.detail);
            Witness::new(format!("{} / {} at n = {n}", rep.map, rep.functional), rep.max_deviation, detail)
        });
        b.add_metric("asserted_checks", 1.0);
    } else {
        b.max_metric(&format!("observed {} / {}", rep.map, rep.functional), rep.max_deviation);
        b.add_metric("observational_checks", 1.0);
    }
}

/// Functional invariance of skew products. Two-sided unitary forms are
/// asserted for every functional the form is claimed to preserve; the
/// per-operator isometry form for unitary invariant norms only.
pub(super) fn invariance(cfg: &RunConfig) -> Result<super::Report> {
    let dims = cfg.dims_or(&[3, 4, 5]);
    let trials = cfg.trials_or(200);
    let grid = cfg.grid.unwrap_or(64);
    let mut b = Builder::new("invariance", cfg, dims.clone(), trials, 1.0);
    let scalars = scalar_functionals()?;
    let region = Functional::PseudoSpectrumRegion {
        eps: Epsilon::new(0.5)?,
        grid,
    };
    let observed_trials = trials.div_ceil(10);
    for (i, &n) in dims.iter().enumerate() {
        let mut r = seeded(cfg.sub_seed(i as u64));
        for conjugate in [false, true] {
            let phase = PhaseFn::SeededRandomPerInput(r.gen());
            let m = PreserverMap::two_sided(haar_unitary(&mut r, n), haar_unitary(&mut r, n), phase, conjugate)?;
            for f in &scalars {
                record_invariance(&mut b, n, &check_invariance(&m, f, trials, &mut r)?);
            }
        }
        let constant = PhaseFn::constant(crate::linalg::cis(r.gen_range(0.0..std::f64::consts::TAU)))?;
        let m = PreserverMap::two_sided(haar_unitary(&mut r, n), haar_unitary(&mut r, n), constant, false)?;
        record_invariance(&mut b, n, &check_invariance(&m, &region, trials, &mut r)?);
        for conjugate in [false, true] {
            let m = PreserverMap::per_operator_isometry(haar_unitary(&mut r, n), haar_isometry(&mut r, n, n), conjugate)?;
            for f in &norm_functionals()? {
                record_invariance(&mut b, n, &check_invariance(&m, f, trials, &mut r)?);
            }
            record_invariance(&mut b, n, &check_invariance(&m, &scalars[0], observed_trials, &mut r)?);
        }
    }
    b.metric("grid", grid as f64);
    b.note("max_violation is normalized by each check's tolerance: 1e-6 relative for functionals, 1e-8 for norms under per-operator isometries, 2 grid cells for regions");
    b.note("regions are asserted for constant h only; per-operator isometries are observational for non-norm functionals");
    Ok(b.finish())
}

/// `‖Φ(A)^*Ux‖ = ‖A^*x‖` (with `x̄` for conjugate forms).
pub(super) fn norm_identity(cfg: &RunConfig) -> Result<super::Report> {
    let dims = cfg.dims_or(&[3, 4, 5]);
    let trials = cfg.trials_or(200);
    let mut b = Builder::new("norm-identity", cfg, dims.clone(), trials, cfg.tol("tolerance", NORM_TOL));
    for (i, &n) in dims.iter().enumerate() {
        let mut r = seeded(cfg.sub_seed(i as u64));
        for m in canonical_maps(&mut r, n)? {
            let rep = check_norm_identity(&m, trials, &mut r)?;
            let w = rep.witness.clone();
            b.violation(rep.max_deviation, || {
                let detail = w.map_or(String::new(), |w| w.detail);
                Witness::new(format!("{} at n = {n}", rep.map), rep.max_deviation, detail)
            });
        }
    }
    Ok(b.finish())
}

/// `x ⊥ y ⟹ h(x, f) ⊥ h(y, g)`-type transfer for rank-one canonical maps.
/// A per-vector permutation `h` is run as a reported counterexample.
pub(super) fn orthogonality(cfg: &RunConfig) -> Result<super::Report> {
    let dims = cfg.dims_or(&[3, 4, 5]);
    let trials = cfg.trials_or(200);
    let mut b = Builder::new("orthogonality", cfg, dims.clone(), trials, 0.0);
    for (i, &n) in dims.iter().enumerate() {
        let mut r = seeded(cfg.sub_seed(i as u64));
        let maps: Vec<PreserverMap> = canonical_maps(&mut r, n)?
            .into_iter()
            .filter(|m| matches!(m, PreserverMap::RankOneCanonical { .. }))
            .collect();
        for m in &maps {
            let rep = check_orthogonality_transfer(m, trials, &mut r)?;
            b.add_metric("orthogonal_pairs", rep.orthogonal_pairs as f64);
            b.add_metric("violations", rep.violations as f64);
            let first = rep.witnesses.first().cloned();
            b.failures(rep.violations, || {
                first.unwrap_or_else(|| Witness::new(format!("{} at n = {n}", rep.map), 0.0, "no violations"))
            });
        }
        let perm = PreserverMap::rank_one_canonical(haar_unitary(&mut r, n), HMap::PerVectorPermutation, false)?;
        let rep = check_orthogonality_transfer(&perm, trials, &mut r)?;
        b.add_metric("counterexample_violations", rep.violations as f64);
        if let Some(w) = rep.witnesses.first() {
            b.witness(Witness::new(format!("counterexample at n = {n}: {}", w.label), w.value, w.detail.clone()));
        }
    }
    b.note("the per-vector permutation h is norm preserving but not of canonical form; its violations are expected and do not affect pass");
    Ok(b.finish())
}

/// Truncated shift: zero products preserved on the truncated domain while no
/// unitary canonical form exists; plus the conjugate-form distinguisher.
pub(super) fn shift_demo(cfg: &RunConfig) -> Result<super::Report> {
    let n = cfg.n.unwrap_or(8);
    let pairs = cfg.trials_or(crate::preserver::SHIFT_DEMO_PAIRS);
    let grid = cfg.grid.unwrap_or(128);
    let mut b = Builder::new("shift-demo", cfg, vec![n], pairs, 0.0);
    let rep = shift_example_demo_with(n, pairs, cfg.seed)?;
    let mut unmet = Vec::new();
    if !rep.equivalence_holds {
        unmet.push(Witness::new(
            "truncated-domain equivalence",
            rep.truncated_violations as f64,
            "zero-product violations on pairs avoiding e_n",
        ));
    }
    if !rep.canonical_form_fails {
        unmet.push(Witness::new("canonical form", rep.range_distance, "S looks surjective"));
    }
    if rep.touching_violations == 0 {
        unmet.push(Witness::new("touching pairs", 0.0, "no violations on pairs touching e_n"));
    }
    b.witness(rep.canonical_witness.clone());
    b.witness(rep.touching_witness.clone());
    b.witness(rep.mixed_witness.clone());
    b.metric("truncated_pairs", rep.truncated_pairs as f64);
    b.metric("truncated_zero_pairs", rep.truncated_zero_pairs as f64);
    b.metric("truncated_violations", rep.truncated_violations as f64);
    b.metric("touching_pairs", rep.touching_pairs as f64);
    b.metric("touching_violations", rep.touching_violations as f64);
    b.metric("mixed_pairs", rep.mixed_pairs as f64);
    b.metric("mixed_violations", rep.mixed_violations as f64);
    b.metric("range_distance", rep.range_distance);
    b.metric("shift_rank", rep.shift_rank as f64);
    b.metric("coisometry_defect", rep.coisometry_defect);

    let mut r = seeded(cfg.sub_seed(0));
    for conjugate in [false, true] {
        let m = PreserverMap::two_sided(
            haar_unitary(&mut r, n),
            haar_unitary(&mut r, n),
            PhaseFn::constant(c64(0.0, 1.0))?,
            conjugate,
        )?;
        let d = conjugation_distinguisher(&m, DISTINGUISHER_EPS, grid)?;
        let tag = if conjugate { "conjugate" } else { "linear" };
        b.metric(format!("distinguisher_{tag}_mismatch"), d.mismatch);
        b.metric(format!("distinguisher_{tag}_tolerance"), d.tolerance);
        if d.detected != conjugate {
            unmet.push(Witness::new(
                format!("distinguisher on {tag} form"),
                d.mismatch,
                format!("mismatch {:.4} vs tolerance {:.4}", d.mismatch, d.tolerance),
            ));
        } else if conjugate {
            b.witness(Witness::new(
                "projection witness iP + (1-i)(I-P) separates the conjugate form",
                d.mismatch,
                format!("region mismatch {:.4} > tolerance {:.4}", d.mismatch, d.tolerance),
            ));
        }
    }
    let count = unmet.len();
    let first = unmet.first().cloned();
    b.failures(count, || first.unwrap_or_else(|| Witness::new("expectations", 0.0, "all met")));
    b.note("max_violation counts unmet expectations");
    b.note("mixed pairs (extended-class element against a rank-one operator) are reported only");
    Ok(b.finish())
}

const DISTINGUISHER_EPS: f64 = 0.25;
