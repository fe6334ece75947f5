use serde::{Deserialize, Serialize};

/// One certified claim: what was computed, what it was compared with, and by how much it passed.
///
/// `pass` is always `margin > 0`; the constructors enforce it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationRecord {
    pub name: String,
    pub claim: String,
    pub computed: f64,
    pub bound: f64,
    pub margin: f64,
    pub pass: bool,
    #[serde(default)]
    pub notes: Vec<String>,
}

impl VerificationRecord {
    /// Claim of the form `computed < bound`.
    pub fn below(name: &str, claim: &str, computed: f64, bound: f64) -> Self {
        Self::with_margin(name, claim, computed, bound, bound - computed)
    }

    /// Claim of the form `computed > bound`.
    pub fn above(name: &str, claim: &str, computed: f64, bound: f64) -> Self {
        Self::with_margin(name, claim, computed, bound, computed - bound)
    }

    /// Claim `|computed − target| <= tol`; the margin is `tol − |computed − target|`.
    pub fn within(name: &str, claim: &str, computed: f64, target: f64, tol: f64) -> Self {
        let mut r = Self::with_margin(
            name,
            claim,
            computed,
            target,
            tol - (computed - target).abs(),
        );
        r.notes.push(format!("tolerance {tol:e}"));
        r
    }

    pub fn with_margin(name: &str, claim: &str, computed: f64, bound: f64, margin: f64) -> Self {
        VerificationRecord {
            name: name.to_owned(),
            claim: claim.to_owned(),
            computed,
            bound,
            margin,
            // NaN margins fail
            pass: margin > 0.0,
            notes: Vec::new(),
        }
    }

    pub fn note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }

    /// Lowers the margin (and possibly flips `pass`) when a secondary condition is weaker.
    pub fn require(mut self, label: &str, margin: f64) -> Self {
        self.notes.push(format!("{label}: margin {margin:e}"));
        if !(margin > 0.0) {
            self.margin = self.margin.min(margin);
            if margin.is_nan() {
                self.margin = f64::NAN;
            }
        }
        self.pass = self.margin > 0.0;
        self
    }
}
