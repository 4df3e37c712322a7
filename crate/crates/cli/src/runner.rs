//! Suite dispatch: resolve a configuration to checks and a report.

use crate::config::{self, SuiteConfig};
use anyhow::{anyhow, bail, Result};
use ncforge_core::quiver::DimensionVector;
use ncforge_core::report::{Check, Report};
use ncforge_core::structures::{self, Budgets};
use ncforge_core::repspaces;
use std::time::Instant;

pub const SUITES: &[&str] = &[
    "kxpm",
    "pants-additive",
    "pants-multiplicative",
    "a2",
    "quiver-additive",
    "quiver-multiplicative",
    "fusion-lemmas",
    "mixed-complex",
    "confluence",
    "rep-moment",
];

fn budgets(cfg: &SuiteConfig) -> Budgets {
    cfg.budgets.as_ref().map(|b| b.to_budgets()).unwrap_or_default()
}

/// Run one named suite. Reports are deterministic for a fixed config and
/// seed; wall-clock time is kept out of the serialized payload.
pub fn run_suite(cfg: &SuiteConfig) -> Result<Report> {
    let started = Instant::now();
    let b = budgets(cfg);
    let seed = cfg.seed.unwrap_or(0);
    let checks: Vec<Check> = match cfg.suite.as_str() {
        "kxpm" => structures::kxpm_suite(cfg.n.unwrap_or(4), &b)?,
        "pants-additive" => structures::pants_additive()?,
        "pants-multiplicative" => structures::pants_multiplicative(&b)?,
        "a2" => structures::a2_suite(&b)?,
        "mixed-complex" => structures::mixed_complex_suite(cfg.cases.unwrap_or(100), seed, &b)?,
        "fusion-lemmas" => structures::fusion_lemmas_suite(cfg.cases.unwrap_or(50), seed, &b)?,
        "confluence" => structures::confluence_suite()?,
        "quiver-additive" => {
            let (q, file) = config::resolve_quiver(cfg.quiver.as_deref().unwrap_or("loop"))?;
            let mut checks = structures::additive_quiver_suite(&q, &b)?;
            if let Some(spec) = file.as_ref().and_then(|f| f.structure.as_ref()) {
                let data = config::additive_structure_from_spec(&q, spec)?;
                checks.extend(structures::verify_bisymplectic(&data, &b)?);
            }
            checks
        }
        "quiver-multiplicative" => {
            let (q, file) = config::resolve_quiver(cfg.quiver.as_deref().unwrap_or("loop"))?;
            let plan = file.as_ref().and_then(|f| f.fusion_plan.clone());
            let mut checks =
                structures::quasi_fusion_suite_with_plan(&q, plan.as_deref(), &b)?;
            checks.extend(structures::fused_display_suite(&b)?);
            if let Some(spec) = file.as_ref().and_then(|f| f.structure.as_ref()) {
                let data = config::multiplicative_structure_from_spec(&q, spec)?;
                checks.extend(structures::verify_quasi_bisymplectic(&data, &b, true)?);
            }
            checks
        }
        "rep-moment" => {
            let reference = cfg.quiver.as_deref().unwrap_or("a2");
            let (q, _) = config::resolve_quiver(reference)?;
            let (data, _) = structures::standard_multiplicative(&q)?;
            let trials = cfg.trials.unwrap_or(20);
            let dim_sets = cfg
                .dims
                .clone()
                .ok_or_else(|| anyhow!("rep-moment needs `dims` (a list of dimension vectors)"))?;
            let mut checks = Vec::new();
            for dims in &dim_sets {
                let dv: DimensionVector = config::folded_dims(&q, dims)?;
                let tagged = repspaces::check_moment_conditions(&data, &dv, trials, seed)
                    .map_err(|e| anyhow!("{e}"))?;
                for mut c in tagged {
                    c.id = format!("{}[dims {:?}]", c.id, dims);
                    checks.push(c);
                }
            }
            checks
        }
        other => bail!("unknown suite `{other}` (expected one of {SUITES:?})"),
    };
    let mut report = Report::new(cfg.suite.clone(), cfg.seed, checks);
    report.elapsed_ms = started.elapsed().as_millis();
    Ok(report)
}

/// Exit code for a collection of reports: 0 all pass, 1 any failure,
/// 2 undecided-only.
pub fn exit_code(reports: &[Report]) -> i32 {
    let any_fail = reports.iter().any(|r| r.failed > 0);
    let any_undecided = reports.iter().any(|r| r.undecided > 0);
    if any_fail {
        1
    } else if any_undecided {
        2
    } else {
        0
    }
}
