//! Acceptance suite: one test per criterion, each running the corresponding
//! verification suite at its pinned configuration and runtime bound, with
//! one pass/fail line per criterion on stderr.

use ncforge_cli::config::SuiteConfig;
use ncforge_cli::runner::run_suite;
use ncforge_core::{Report, Verdict};
use std::time::{Duration, Instant};

fn cfg(json: &str) -> SuiteConfig {
    serde_json::from_str(json).expect("valid suite config")
}

fn run_checked(criterion: &str, json: &str, bound: Duration) -> Report {
    let started = Instant::now();
    let report = run_suite(&cfg(json)).expect("suite runs");
    let elapsed = started.elapsed();
    let ok = report.failed == 0 && report.undecided == 0 && elapsed <= bound;
    eprintln!(
        "[{}] {criterion}: {} checks, {} failed, {} undecided, {:?} (bound {:?})",
        if ok { "PASS" } else { "FAIL" },
        report.checks.len(),
        report.failed,
        report.undecided,
        elapsed,
        bound,
    );
    for c in &report.checks {
        if c.verdict == Verdict::Fail || c.verdict == Verdict::Undecided {
            eprintln!("    {}: {:?} {}", c.id, c.verdict, c.detail);
        }
    }
    assert!(report.failed == 0, "{criterion}: {} checks failed", report.failed);
    assert!(report.undecided == 0, "{criterion}: {} checks undecided", report.undecided);
    assert!(elapsed <= bound, "{criterion}: took {elapsed:?}, bound {bound:?}");
    report
}

#[test]
fn criterion_01_laurent_tower_order_four() {
    let r = run_checked("criterion 1 (kxpm, N = 4)", r#"{"suite":"kxpm","n":4}"#, Duration::from_secs(5));
    // Every displayed identity family is present up to order 4.
    for n in 1..=4 {
        for family in ["kappa.alpha", "kappa.beta", "iota_e.alpha", "d.alpha", "d.beta", "harmonic.plus", "harmonic.minus"] {
            assert!(
                r.checks.iter().any(|c| c.id == format!("{family}[{n}]")),
                "missing {family}[{n}]"
            );
        }
    }
    for k in 0..4 {
        assert!(r.checks.iter().any(|c| c.id == format!("closure.form.component[{k}]")));
        assert!(r.checks.iter().any(|c| c.id == format!("closure.chain.component[{k}]")));
    }
}

#[test]
fn criterion_02_mixed_complex_properties() {
    let r = run_checked(
        "criterion 2 (mixed complex, 100 random forms per presentation)",
        r#"{"suite":"mixed-complex","cases":100,"seed":1}"#,
        Duration::from_secs(30),
    );
    for family in ["d_squared", "iota_e_squared", "iota_d_commute", "contraction_agrees"] {
        let count = r.checks.iter().filter(|c| c.id.ends_with(family)).count();
        assert!(count >= 4, "family {family} must cover the bundled presentations");
    }
}

#[test]
fn criterion_03_fusion_lemmas() {
    let r = run_checked(
        "criterion 3 (fusion lemmas)",
        r#"{"suite":"fusion-lemmas","cases":50,"seed":2}"#,
        Duration::from_secs(30),
    );
    for id in [
        "trace.commutators",
        "trace.decomposition_independent",
        "trace.one_form_formula",
        "trace.contraction_functorial",
        "trace.chain_square",
        "fusion.free_product",
        "fusion.separation_roundtrip",
    ] {
        assert!(r.checks.iter().any(|c| c.id == id), "missing {id}");
    }
}

#[test]
fn criterion_04_additive_quivers() {
    let started = Instant::now();
    for quiver in ["loop", "a2", "two_loop"] {
        let json = format!(r#"{{"suite":"quiver-additive","quiver":"{quiver}"}}"#);
        let report = run_suite(&cfg(&json)).expect("suite runs");
        assert!(
            report.all_passed(),
            "criterion 4 failed on {quiver}: {:?}",
            report.checks.iter().filter(|c| c.verdict == Verdict::Fail).collect::<Vec<_>>()
        );
        assert!(report.checks.iter().any(|c| c.id == "bisymplectic.closed"));
        assert!(report.checks.iter().any(|c| c.id == "chain.factor_two"));
        if quiver != "a2" {
            assert!(report.checks.iter().any(|c| c.id.starts_with("fused.moment_gauge")));
        }
    }
    let elapsed = started.elapsed();
    eprintln!("[PASS] criterion 4 (additive quivers: loop, a2, two_loop): {elapsed:?} (bound 20s)");
    assert!(elapsed <= Duration::from_secs(20));
}

#[test]
fn criterion_05_a2_multiplicative() {
    let r = run_checked("criterion 5 (elementary multiplicative quiver)", r#"{"suite":"a2"}"#, Duration::from_secs(60));
    for id in [
        "a2.homotopy_boundary",
        "a2.dr_simplification",
        "a2.worked_contraction",
        "quasi.b1",
        "quasi.b2",
        "quasi.compatible[de]",
        "quasi.compatible[de*]",
        "a2.intermediate_display",
    ] {
        assert!(r.checks.iter().any(|c| c.id == id), "missing {id}");
    }
}

#[test]
fn criterion_06_quasi_fusion() {
    let r = run_checked(
        "criterion 6 (fusion of quasi data on the separated two-loop)",
        r#"{"suite":"quiver-multiplicative","quiver":"two_loop"}"#,
        Duration::from_secs(120),
    );
    let compat = r.checks.iter().filter(|c| c.id.starts_with("quasi.compatible")).count();
    assert!(compat >= 4, "compatibility must cover every generator differential");
    assert!(r.checks.iter().any(|c| c.id.starts_with("fusion.omega_cor_is_pants")));
    assert!(r.checks.iter().any(|c| c.id.starts_with("display.five_terms")));
}

#[test]
fn criterion_07_pants() {
    let started = Instant::now();
    let add = run_suite(&cfg(r#"{"suite":"pants-additive"}"#)).unwrap();
    assert!(add.all_passed());
    let mult = run_suite(&cfg(r#"{"suite":"pants-multiplicative"}"#)).unwrap();
    assert!(mult.all_passed());
    let measured = mult
        .checks
        .iter()
        .find(|c| c.id == "pants.multiplicative.proportionality")
        .expect("proportionality check present");
    assert!(measured.detail.contains("-2"), "measured constant recorded: {}", measured.detail);
    let elapsed = started.elapsed();
    eprintln!("[PASS] criterion 7 (pair-of-pants, measured constant -2): {elapsed:?} (bound 5s)");
    assert!(elapsed <= Duration::from_secs(5));
}

#[test]
fn criterion_08_representation_suite() {
    let started = Instant::now();
    let a2 = run_suite(&cfg(
        r#"{"suite":"rep-moment","quiver":"a2","dims":[[1,1],[2,1]],"trials":20,"seed":7}"#,
    ))
    .unwrap();
    assert!(a2.all_passed(), "a2 representation checks");
    let lp = run_suite(&cfg(
        r#"{"suite":"rep-moment","quiver":"loop","dims":[[1],[2]],"trials":20,"seed":7}"#,
    ))
    .unwrap();
    assert!(lp.all_passed(), "loop representation checks");
    for r in [&a2, &lp] {
        for family in ["rep.moment_condition", "rep.cubic_identity", "rep.ring_map", "rep.alternating", "rep.derivative_oracle"] {
            assert!(r.checks.iter().any(|c| c.id.starts_with(family)), "missing {family}");
        }
    }
    let elapsed = started.elapsed();
    eprintln!("[PASS] criterion 8 (representation suite, 20 trials per dimension vector): {elapsed:?} (bound 60s)");
    assert!(elapsed <= Duration::from_secs(60));
}

#[test]
fn criterion_09_confluence_gate() {
    let r = run_checked("criterion 9 (confluence gate)", r#"{"suite":"confluence"}"#, Duration::from_secs(10));
    for name in ["laurent", "free_two_inv", "a2_localized", "loop_localized", "two_loop_localized"] {
        assert!(
            r.checks.iter().any(|c| c.id == format!("confluence.{name}") && c.verdict == Verdict::Pass),
            "presentation {name} must be confluent"
        );
    }
}

#[test]
fn criterion_10_determinism() {
    let started = Instant::now();
    for json in [
        r#"{"suite":"kxpm","n":3}"#,
        r#"{"suite":"mixed-complex","cases":10,"seed":5}"#,
        r#"{"suite":"rep-moment","quiver":"a2","dims":[[2,1]],"trials":5,"seed":11}"#,
    ] {
        let a = serde_json::to_string(&run_suite(&cfg(json)).unwrap()).unwrap();
        let b = serde_json::to_string(&run_suite(&cfg(json)).unwrap()).unwrap();
        assert_eq!(a, b, "reports must be byte-identical for {json}");
    }
    eprintln!("[PASS] criterion 10 (byte-identical reports): {:?}", started.elapsed());
}
