//! Randomized and fixed-instance suites that run the whole toolkit against
//! the inequalities and identities it is supposed to satisfy.
//!
//! Every suite is a deterministic function of its seed and budget. Trials
//! run in parallel, each with its own ChaCha stream (`seed`, stream =
//! trial index), and the report is assembled in trial order. Reports carry
//! no timings, so re-running a suite reproduces its JSON byte for byte.

mod cover_suite;
mod entropy_suite;
pub mod generate;
pub mod principal;
mod theorem_suite;

use std::fmt;

use indexmap::IndexMap;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::measures::InequalityCheck;
use crate::scenario::ScenarioFile;
use crate::tail_entropy::TOLERANCE;

pub use cover_suite::run_cover_suite;
pub use entropy_suite::run_entropy_suite;
pub use principal::{principal_extension_check, run_principal_suite};
pub use theorem_suite::run_theorem_suite;

/// Names accepted by [`run_suite`].
pub const SUITES: [&str; 4] = ["cover", "entropy", "theorem", "principal"];

/// Runs a suite by name.
pub fn run_suite(name: &str, seed: u64, trials: usize, budget: &Budget) -> Result<SuiteReport> {
    match name {
        "cover" => Ok(run_cover_suite(seed, trials, budget)),
        "entropy" => Ok(run_entropy_suite(seed, trials, budget)),
        "theorem" => Ok(run_theorem_suite(seed, trials, budget)),
        "principal" => Ok(run_principal_suite(seed, trials, budget)),
        other => Err(Error::UnknownName(format!("suite `{other}`"))),
    }
}

/// The RNG of one trial.
pub fn trial_rng(seed: u64, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    rng
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Outcome {
    Pass {
        /// `max(0, left − right)` for tolerance checks.
        #[serde(skip_serializing_if = "Option::is_none")]
        violation: Option<f64>,
    },
    Fail {
        detail: String,
    },
    Skipped {
        reason: String,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Record {
    pub check: String,
    #[serde(flatten)]
    pub outcome: Outcome,
}

/// Check results of one scenario, collected in order.
#[derive(Debug, Default)]
pub struct Checks {
    records: Vec<Record>,
    notes: Vec<(String, String)>,
}

impl Checks {
    pub fn new() -> Self {
        Self::default()
    }

    fn push(&mut self, check: &str, outcome: Outcome) {
        self.records.push(Record {
            check: check.to_string(),
            outcome,
        });
    }

    /// An exact claim.
    pub fn exact(&mut self, check: &str, ok: bool, detail: impl FnOnce() -> String) {
        let outcome = if ok {
            Outcome::Pass { violation: None }
        } else {
            Outcome::Fail { detail: detail() }
        };
        self.push(check, outcome);
    }

    /// `left ≤ right` up to [`TOLERANCE`].
    pub fn inequality(&mut self, check: &str, c: &InequalityCheck) {
        self.within(check, c.left - c.right, || {
            format!("left {} exceeds right {}", c.left, c.right)
        });
    }

    /// `excess ≤ TOLERANCE`; `excess` is how far the claim is overshot.
    pub fn within(&mut self, check: &str, excess: f64, detail: impl FnOnce() -> String) {
        let outcome = if excess <= TOLERANCE {
            Outcome::Pass {
                violation: Some(excess.max(0.0)),
            }
        } else {
            Outcome::Fail {
                detail: format!("{} (excess {excess:e})", detail()),
            }
        };
        self.push(check, outcome);
    }

    pub fn skip(&mut self, check: &str, reason: impl Into<String>) {
        self.push(check, Outcome::Skipped { reason: reason.into() });
    }

    /// Budget errors become skips; anything else is a failure.
    pub fn error(&mut self, check: &str, e: &Error) {
        if e.is_budget() {
            self.skip(check, e.to_string());
        } else {
            self.push(check, Outcome::Fail { detail: e.to_string() });
        }
    }

    /// Runs `f`; an error is recorded against `check`.
    pub fn attempt<T>(&mut self, check: &str, f: impl FnOnce() -> Result<T>) -> Option<T> {
        match f() {
            Ok(v) => Some(v),
            Err(e) => {
                self.error(check, &e);
                None
            }
        }
    }

    /// An observation that is reported but never fails the suite.
    pub fn note(&mut self, name: &str, detail: impl Into<String>) {
        self.notes.push((name.to_string(), detail.into()));
    }
}

/// One scenario of a suite: a random trial or a named fixed instance.
#[derive(Debug)]
pub struct ScenarioRun {
    pub label: String,
    pub scenario: ScenarioFile,
    pub checks: Checks,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckSummary {
    pub check: String,
    pub passed: usize,
    pub failed: usize,
    pub skipped: usize,
    /// Largest tolerance excess over passing and failing runs.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_violation: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Failure {
    pub check: String,
    pub scenario: String,
    pub detail: String,
    /// Everything needed to rerun the failing case.
    pub reproduction: ScenarioFile,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Skip {
    pub check: String,
    pub scenario: String,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Note {
    pub name: String,
    pub scenario: String,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioDigest {
    pub scenario: String,
    pub sha256: String,
}

/// Outcome of one suite run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub seed: u64,
    pub trials: usize,
    pub checks: Vec<CheckSummary>,
    pub failures: Vec<Failure>,
    pub skips: Vec<Skip>,
    pub notes: Vec<Note>,
    pub digests: Vec<ScenarioDigest>,
}

impl SuiteReport {
    pub fn assemble(suite: &str, seed: u64, trials: usize, runs: Vec<ScenarioRun>) -> Self {
        let mut summary: IndexMap<String, CheckSummary> = IndexMap::new();
        let mut failures = Vec::new();
        let mut skips = Vec::new();
        let mut notes = Vec::new();
        let mut digests = Vec::new();
        for run in runs {
            digests.push(ScenarioDigest {
                scenario: run.label.clone(),
                sha256: run.scenario.digest(),
            });
            for r in run.checks.records {
                let s = summary.entry(r.check.clone()).or_insert_with(|| CheckSummary {
                    check: r.check.clone(),
                    passed: 0,
                    failed: 0,
                    skipped: 0,
                    max_violation: None,
                });
                match r.outcome {
                    Outcome::Pass { violation } => {
                        s.passed += 1;
                        if let Some(v) = violation {
                            s.max_violation = Some(s.max_violation.map_or(v, |m: f64| m.max(v)));
                        }
                    }
                    Outcome::Fail { detail } => {
                        s.failed += 1;
                        failures.push(Failure {
                            check: r.check,
                            scenario: run.label.clone(),
                            detail,
                            reproduction: run.scenario.clone(),
                        });
                    }
                    Outcome::Skipped { reason } => {
                        s.skipped += 1;
                        skips.push(Skip {
                            check: r.check,
                            scenario: run.label.clone(),
                            reason,
                        });
                    }
                }
            }
            for (name, detail) in run.checks.notes {
                notes.push(Note {
                    name,
                    scenario: run.label.clone(),
                    detail,
                });
            }
        }
        SuiteReport {
            suite: suite.to_string(),
            seed,
            trials,
            checks: summary.into_values().collect(),
            failures,
            skips,
            notes,
            digests,
        }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn summary(&self, check: &str) -> Option<&CheckSummary> {
        self.checks.iter().find(|c| c.check == check)
    }

    /// Largest tolerance excess over all checks.
    pub fn max_violation(&self) -> f64 {
        self.checks
            .iter()
            .filter_map(|c| c.max_violation)
            .fold(0.0, f64::max)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports always serialize")
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "suite {}  seed {}  trials {}  scenarios {}",
            self.suite,
            self.seed,
            self.trials,
            self.digests.len()
        )?;
        let width = self.checks.iter().map(|c| c.check.len()).max().unwrap_or(5).max(5);
        writeln!(f, "{:width$}  {:>6}  {:>6}  {:>6}  max excess", "check", "pass", "fail", "skip")?;
        for c in &self.checks {
            let v = c.max_violation.map_or("-".to_string(), |v| format!("{v:.3e}"));
            writeln!(
                f,
                "{:width$}  {:>6}  {:>6}  {:>6}  {}",
                c.check, c.passed, c.failed, c.skipped, v
            )?;
        }
        for fl in &self.failures {
            writeln!(f, "FAIL {} [{}]: {}", fl.check, fl.scenario, fl.detail)?;
        }
        if !self.notes.is_empty() {
            writeln!(f, "{} notes (not checks); see the JSON report", self.notes.len())?;
        }
        write!(
            f,
            "result: {} ({} failures, {} skips)",
            if self.passed() { "PASS" } else { "FAIL" },
            self.failures.len(),
            self.skips.len()
        )
    }
}

/// Runs `trial` for `0..trials` in parallel and keeps trial order.
pub(crate) fn run_trials<F>(trials: usize, trial: F) -> Vec<ScenarioRun>
where
    F: Fn(usize) -> ScenarioRun + Sync,
{
    // a closure, so only `&F` has to be Sync
    #[allow(clippy::redundant_closure)]
    (0..trials).into_par_iter().map(|t| trial(t)).collect()
}
