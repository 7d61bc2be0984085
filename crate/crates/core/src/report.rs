//! Structured check results.
//!
//! Every checker in the crate returns a [`ValidationReport`]: the check name,
//! the law being verified, the sizes of the universally quantified domains,
//! and the witness tuples of every violation found (truncated after
//! [`MAX_WITNESSES`], with the total count kept).

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

pub const MAX_WITNESSES: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness(pub Vec<(String, String)>);

impl Witness {
    pub fn new() -> Self {
        Witness(Vec::new())
    }

    pub fn with(mut self, key: &str, value: impl fmt::Display) -> Self {
        self.0.push((key.to_string(), value.to_string()));
        self
    }
}

impl Default for Witness {
    fn default() -> Self {
        Self::new()
    }
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, (k, v)) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{k}={v}")?;
        }
        write!(f, ")")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub check: String,
    pub law: String,
    pub domain: BTreeMap<String, u64>,
    pub cases: u64,
    pub failures: u64,
    pub witnesses: Vec<Witness>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl ValidationReport {
    pub fn new(check: &str, law: &str) -> Self {
        ValidationReport {
            check: check.to_string(),
            law: law.to_string(),
            domain: BTreeMap::new(),
            cases: 0,
            failures: 0,
            witnesses: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.failures == 0
    }

    pub fn domain(&mut self, name: &str, size: u64) -> &mut Self {
        *self.domain.entry(name.to_string()).or_insert(0) += size;
        self
    }

    /// Records one evaluated case; `witness` is only built when the case fails.
    pub fn case(&mut self, ok: bool, witness: impl FnOnce() -> Witness) -> bool {
        self.cases += 1;
        if !ok {
            self.fail(witness());
        }
        ok
    }

    pub fn fail(&mut self, witness: Witness) {
        self.failures += 1;
        if self.witnesses.len() < MAX_WITNESSES {
            self.witnesses.push(witness);
        }
    }

    pub fn note(&mut self, note: impl Into<String>) {
        self.notes.push(note.into());
    }

    /// Folds another report's counts and witnesses into this one.
    pub fn absorb(&mut self, other: ValidationReport) {
        self.cases += other.cases;
        self.failures += other.failures;
        for (k, v) in other.domain {
            *self.domain.entry(k).or_insert(0) += v;
        }
        for w in other.witnesses {
            if self.witnesses.len() < MAX_WITNESSES {
                self.witnesses.push(w);
            }
        }
        self.notes.extend(other.notes);
    }

    pub fn first_witness(&self) -> Option<&Witness> {
        self.witnesses.first()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed() { "PASS" } else { "FAIL" };
        write!(f, "[{status}] {} ({} cases", self.check, self.cases)?;
        if self.failures > 0 {
            write!(f, ", {} failures", self.failures)?;
        }
        write!(f, ")")?;
        if !self.law.is_empty() {
            write!(f, "  {}", self.law)?;
        }
        for w in &self.witnesses {
            write!(f, "\n    witness {w}")?;
        }
        for n in &self.notes {
            write!(f, "\n    note: {n}")?;
        }
        Ok(())
    }
}

/// A named collection of reports, in the order they were run.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Battery {
    pub name: String,
    pub reports: Vec<ValidationReport>,
}

impl Battery {
    pub fn new(name: &str) -> Self {
        Battery {
            name: name.to_string(),
            reports: Vec::new(),
        }
    }

    pub fn push(&mut self, report: ValidationReport) {
        self.reports.push(report);
    }

    pub fn passed(&self) -> bool {
        self.reports.iter().all(ValidationReport::passed)
    }

    pub fn failed(&self) -> impl Iterator<Item = &ValidationReport> {
        self.reports.iter().filter(|r| !r.passed())
    }

    pub fn get(&self, check: &str) -> Option<&ValidationReport> {
        self.reports.iter().find(|r| r.check == check)
    }
}

impl fmt::Display for Battery {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "== {} ==", self.name)?;
        for r in &self.reports {
            writeln!(f, "{r}")?;
        }
        Ok(())
    }
}

/// Process outcome shared by every front-end: `0` pass, `1` check failure,
/// `2` input error, `3` budget exceeded.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Pass = 0,
    CheckFailed = 1,
    InputError = 2,
    BudgetExceeded = 3,
}

impl Outcome {
    pub fn code(self) -> i32 {
        self as i32
    }

    pub fn of_checks(passed: bool) -> Self {
        if passed {
            Outcome::Pass
        } else {
            Outcome::CheckFailed
        }
    }

    /// Errors raised while loading or running: budget overruns keep their own
    /// code, algebraic defects found while building count as check failures.
    pub fn of_error(e: &crate::Error) -> Self {
        use crate::Error::*;
        match e {
            Budget { .. } => Outcome::BudgetExceeded,
            NotResiduated { .. } | NotLattice(_) | NoAdjoint { .. } | NotMonotone { .. } => Outcome::CheckFailed,
            _ => Outcome::InputError,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn witnesses_are_truncated_but_counted() {
        let mut r = ValidationReport::new("demo", "x = x");
        for i in 0..40 {
            r.case(false, || Witness::new().with("i", i));
        }
        assert_eq!(r.failures, 40);
        assert_eq!(r.witnesses.len(), MAX_WITNESSES);
        assert!(!r.passed());
    }

    #[test]
    fn serializes_to_structured_document() {
        let mut r = ValidationReport::new("frobenius", "∃f(α ∧ f*β) = ∃fα ∧ β");
        r.domain("alpha", 4);
        r.case(false, || Witness::new().with("alpha", "{a}").with("beta", "∅"));
        let json = serde_json::to_string(&r).unwrap();
        let back: ValidationReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back, r);
        assert!(json.contains("\"witnesses\""));
    }
}
