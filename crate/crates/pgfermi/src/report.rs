//! Verification reports: named residual checks with pass/fail thresholds.

use serde::{Deserialize, Serialize};

/// One verified identity: the measured residual, the threshold it was held
/// to, and the algebraic relation the check enforces (so a failure names the
/// violated identity directly).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub residual: f64,
    pub threshold: f64,
    pub pass: bool,
    pub relation: String,
}

impl Check {
    pub fn new(name: &str, relation: &str, residual: f64, threshold: f64) -> Self {
        Check {
            name: name.to_string(),
            residual,
            threshold,
            pass: residual <= threshold,
            relation: relation.to_string(),
        }
    }
}

/// Aggregate of residual checks; `overall` is the conjunction of all passes.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerificationReport {
    pub checks: Vec<Check>,
    pub overall: bool,
}

impl VerificationReport {
    pub fn new(checks: Vec<Check>) -> Self {
        let overall = checks.iter().all(|c| c.pass);
        VerificationReport { checks, overall }
    }

    pub fn empty() -> Self {
        VerificationReport {
            checks: Vec::new(),
            overall: true,
        }
    }

    pub fn push(&mut self, check: Check) {
        self.overall = self.overall && check.pass;
        self.checks.push(check);
    }

    /// Append all checks from another report, prefixing their names.
    pub fn merge(&mut self, prefix: &str, other: VerificationReport) {
        for mut check in other.checks {
            check.name = format!("{prefix}.{}", check.name);
            self.push(check);
        }
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// Largest residual across all checks.
    pub fn worst_residual(&self) -> f64 {
        self.checks.iter().map(|c| c.residual).fold(0.0, f64::max)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overall_is_conjunction() {
        let mut r = VerificationReport::empty();
        assert!(r.overall);
        r.push(Check::new("ok", "x = x", 0.0, 1e-10));
        assert!(r.overall);
        r.push(Check::new("bad", "x = y", 1.0, 1e-10));
        assert!(!r.overall);
        assert_eq!(r.failures().count(), 1);
    }

    #[test]
    fn report_json_round_trips() {
        let r = VerificationReport::new(vec![Check::new("c", "a b + b^n a^n = 1", 1e-16, 1e-10)]);
        let s = serde_json::to_string(&r).unwrap();
        let back: VerificationReport = serde_json::from_str(&s).unwrap();
        assert_eq!(back.checks.len(), 1);
        assert!(back.overall);
    }
}
