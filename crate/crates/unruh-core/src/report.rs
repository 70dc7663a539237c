//! Pass/fail reports for theorem-derived property suites.

use serde::Serialize;

/// Result of one sampled property check: the worst violation observed over
/// all samples, against a declared tolerance.
#[derive(Clone, Debug, Serialize)]
pub struct PropertyReport {
    /// Property name, e.g. `"nrng(incoherent)"`.
    pub property: String,
    /// Number of sampled states or pairs.
    pub samples: usize,
    /// Worst violation magnitude observed (0 when the property held with margin).
    pub worst_violation: f64,
    /// Tolerance the violation is compared against.
    pub tolerance: f64,
    /// `worst_violation <= tolerance`.
    pub pass: bool,
    /// Seed that reproduces the run.
    pub seed: u64,
    /// Optional annotation (skip notices, report-only flags, bound context).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl PropertyReport {
    /// Standard report; `pass` is derived from the violation and tolerance.
    pub fn new(
        property: impl Into<String>,
        samples: usize,
        worst_violation: f64,
        tolerance: f64,
        seed: u64,
    ) -> Self {
        Self {
            property: property.into(),
            samples,
            worst_violation,
            tolerance,
            pass: worst_violation <= tolerance,
            seed,
            note: None,
        }
    }

    /// Attach an annotation.
    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    /// Report that records data without asserting it (always passes).
    pub fn report_only(
        property: impl Into<String>,
        samples: usize,
        worst_violation: f64,
        seed: u64,
        note: impl Into<String>,
    ) -> Self {
        Self {
            property: property.into(),
            samples,
            worst_violation,
            tolerance: f64::INFINITY,
            pass: true,
            seed,
            note: Some(note.into()),
        }
    }

    /// Check skipped with a notice (counts as passing, with the reason recorded).
    pub fn skipped(property: impl Into<String>, seed: u64, note: impl Into<String>) -> Self {
        Self {
            property: property.into(),
            samples: 0,
            worst_violation: 0.0,
            tolerance: f64::INFINITY,
            pass: true,
            seed,
            note: Some(note.into()),
        }
    }

    /// One-line human-readable summary (used by the CLI).
    pub fn summary_line(&self) -> String {
        let status = if self.pass { "PASS" } else { "FAIL" };
        let note = self
            .note
            .as_deref()
            .map(|n| format!("  [{n}]"))
            .unwrap_or_default();
        format!(
            "{status}  {:<44} worst={:.3e}  tol={:.1e}  n={}{note}",
            self.property, self.worst_violation, self.tolerance, self.samples
        )
    }
}
