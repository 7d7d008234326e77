//! The eight acceptance criteria, each with its tolerance and time budget.
//! Run with `cargo test -p specfn-core --test acceptance -- --nocapture` to
//! see one line per criterion.

use std::time::Instant;

use specfn_core::numrange::{q_numerical_radius_with, QParam, SphereOptions};
use specfn_core::linalg::random::seeded;
use specfn_core::suites::{run_suite, RunConfig, SuiteResult};
use specfn_core::CMatrix;

const SEED: u64 = 20240611;

struct Line {
    id: usize,
    name: &'static str,
    pass: bool,
    detail: String,
    secs: f64,
    budget: f64,
}

fn suite(name: &str, cfg: RunConfig) -> SuiteResult {
    run_suite(name, &cfg).unwrap_or_else(|e| panic!("suite {name} errored: {e}"))
}

fn cfg(dims: Option<Vec<usize>>, trials: Option<usize>) -> RunConfig {
    RunConfig {
        dims,
        trials,
        ..RunConfig::new(SEED)
    }
}

fn summary(r: &SuiteResult) -> String {
    let mut s = format!("{}: max_violation {:.3e} (tol {:e})", r.suite, r.max_violation, r.report.tolerance);
    if !r.pass {
        if let Some(w) = r.report.witnesses.first() {
            s += &format!(" worst: {} = {:.3e} [{}]", w.label, w.value, w.detail);
        }
    }
    s
}

fn run(id: usize, name: &'static str, budget: f64, f: impl FnOnce() -> (bool, String)) -> Line {
    let start = Instant::now();
    let (pass, detail) = f();
    let secs = start.elapsed().as_secs_f64();
    let line = Line {
        id,
        name,
        pass: pass && secs <= budget,
        detail,
        secs,
        budget,
    };
    println!(
        "criterion {}: {} {} ({:.1}s of {:.0}s) {}",
        line.id,
        if line.pass { "PASS" } else { "FAIL" },
        line.name,
        line.secs,
        line.budget,
        line.detail
    );
    line
}

fn suites(names: &[(&str, RunConfig)]) -> (bool, String) {
    let results: Vec<SuiteResult> = names.iter().map(|(n, c)| suite(n, c.clone())).collect();
    let pass = results.iter().all(|r| r.pass);
    let detail = results.iter().map(summary).collect::<Vec<_>>().join("; ");
    (pass, detail)
}

/// Ascent-route `w_q(E12)` on 21 points against `(1 + √(1−q²))/2`.
fn e12_profile() -> (bool, String) {
    let e12 = CMatrix::unit(3, 0, 1);
    let mut rng = seeded(SEED);
    let mut worst: f64 = 0.0;
    for i in 0..=20 {
        let q = i as f64 / 20.0;
        let got = q_numerical_radius_with(&e12, QParam::new(q).unwrap(), &SphereOptions::default(), &mut rng).value;
        let want = (1.0 + (1.0 - q * q).sqrt()) / 2.0;
        worst = worst.max((got - want).abs());
    }
    (worst <= 1e-5, format!("max |w_q - (1+sqrt(1-q^2))/2| = {worst:.3e} (tol 1e-5)"))
}

#[test]
fn acceptance() {
    let lines = [
        run(1, "rank-one pseudo-spectral radius closed form", 60.0, || {
            suites(&[("rank-one-psr", cfg(Some(vec![3, 4, 5, 6, 7, 8]), Some(200)))])
        }),
        run(2, "normal equality and covariances of r_eps", 60.0, || {
            suites(&[("pseudo-properties", cfg(None, Some(100)))])
        }),
        run(3, "q-numerical radius of E12", 30.0, e12_profile),
        run(4, "lower bound w_q >= min{w_0, w_r}", 300.0, || {
            suites(&[("lwq", cfg(Some(vec![3, 4, 5]), Some(50)))])
        }),
        run(5, "Hausdorff bound and midpoint convexity", 300.0, || {
            suites(&[
                ("hausdorff", cfg(Some(vec![3, 4, 5]), Some(20))),
                ("midpoint", cfg(Some(vec![3, 4, 5]), Some(20))),
            ])
        }),
        run(6, "canonical forms preserve functionals and zero products", 300.0, || {
            suites(&[
                ("invariance", cfg(Some(vec![3, 4, 5]), Some(200))),
                ("zero-product", cfg(Some(vec![3, 4, 5]), Some(200))),
            ])
        }),
        run(7, "axiom systems", 120.0, || {
            suites(&[("axioms", RunConfig { n: Some(3), ..cfg(None, None) })])
        }),
        run(8, "shift counterexample and conjugation distinguisher", 120.0, || {
            suites(&[("shift-demo", RunConfig { n: Some(8), ..cfg(None, None) })])
        }),
    ];
    let failed: Vec<usize> = lines.iter().filter(|l| !l.pass).map(|l| l.id).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
