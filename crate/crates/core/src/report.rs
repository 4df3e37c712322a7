//! Structured verification reports.

use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Undecided,
    /// Positive but non-conclusive support (randomized or rank-based).
    Evidence,
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub id: String,
    pub verdict: Verdict,
    /// Residual, certificate or measured constant backing the verdict.
    pub detail: String,
}

impl Check {
    pub fn new(id: impl Into<String>, verdict: Verdict, detail: impl Into<String>) -> Check {
        Check { id: id.into(), verdict, detail: detail.into() }
    }

    pub fn pass(id: impl Into<String>) -> Check {
        Check::new(id, Verdict::Pass, "")
    }

    pub fn from_bool(id: impl Into<String>, ok: bool, detail: impl Into<String>) -> Check {
        Check::new(id, if ok { Verdict::Pass } else { Verdict::Fail }, detail)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub suite: String,
    pub seed: Option<u64>,
    pub checks: Vec<Check>,
    pub passed: usize,
    pub failed: usize,
    pub undecided: usize,
    /// Wall-clock milliseconds; excluded from serialization so reports stay
    /// byte-identical across runs of the same config and seed.
    #[serde(skip)]
    pub elapsed_ms: u128,
}

impl Report {
    pub fn new(suite: impl Into<String>, seed: Option<u64>, checks: Vec<Check>) -> Report {
        let passed = checks
            .iter()
            .filter(|c| matches!(c.verdict, Verdict::Pass | Verdict::Evidence))
            .count();
        let failed = checks.iter().filter(|c| c.verdict == Verdict::Fail).count();
        let undecided = checks.iter().filter(|c| c.verdict == Verdict::Undecided).count();
        Report { suite: suite.into(), seed, checks, passed, failed, undecided, elapsed_ms: 0 }
    }

    pub fn all_passed(&self) -> bool {
        self.failed == 0 && self.undecided == 0
    }

    /// One line per check, derived from the structured data.
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            let v = match c.verdict {
                Verdict::Pass => "pass",
                Verdict::Fail => "FAIL",
                Verdict::Undecided => "undecided",
                Verdict::Evidence => "evidence",
            };
            out.push_str(&format!("[{v}] {}::{}", self.suite, c.id));
            if !c.detail.is_empty() && c.verdict != Verdict::Pass {
                out.push_str(&format!("  ({})", c.detail));
            }
            out.push('\n');
        }
        out.push_str(&format!(
            "{}: {} passed, {} failed, {} undecided\n",
            self.suite, self.passed, self.failed, self.undecided
        ));
        out
    }
}
