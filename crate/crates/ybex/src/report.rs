//! Pass/fail reports for exhaustive structural checks.
//!
//! A check walks every instance of some identity (triples for the braided
//! relation, grid points for commutation, configurations for stationarity)
//! and records the ones that fail. Reports keep at most a capped number of
//! concrete violations so a badly broken input does not produce gigabytes of
//! output, but the total count is always exact.

use std::fmt;

/// Default cap on stored violation descriptions.
pub const DEFAULT_VIOLATION_CAP: usize = 100;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckReport {
    /// Human-readable name of the identity being checked.
    pub name: String,
    /// Number of instances examined.
    pub checked: usize,
    /// Number of failing instances (may exceed `violations.len()`).
    pub failures: usize,
    /// Descriptions of the first failing instances, up to the cap.
    pub violations: Vec<String>,
    cap: usize,
}

impl CheckReport {
    pub fn new(name: impl Into<String>) -> Self {
        Self::with_cap(name, DEFAULT_VIOLATION_CAP)
    }

    pub fn with_cap(name: impl Into<String>, cap: usize) -> Self {
        CheckReport {
            name: name.into(),
            checked: 0,
            failures: 0,
            violations: Vec::new(),
            cap,
        }
    }

    pub fn passed(&self) -> bool {
        self.failures == 0
    }

    /// Records one examined instance; `violation` is produced lazily and only
    /// when the instance failed.
    pub fn record<F>(&mut self, ok: bool, violation: F)
    where
        F: FnOnce() -> String,
    {
        self.checked += 1;
        if !ok {
            self.failures += 1;
            if self.violations.len() < self.cap {
                self.violations.push(violation());
            }
        }
    }

    /// Merges a sub-report produced by a parallel worker. Order of merges
    /// must be deterministic for stable output; callers merge in index order.
    pub fn absorb(&mut self, other: CheckReport) {
        self.checked += other.checked;
        self.failures += other.failures;
        for v in other.violations {
            if self.violations.len() >= self.cap {
                break;
            }
            self.violations.push(v);
        }
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.passed() {
            write!(f, "{}: ok ({} instances)", self.name, self.checked)
        } else {
            writeln!(
                f,
                "{}: FAILED ({} of {} instances)",
                self.name, self.failures, self.checked
            )?;
            for v in &self.violations {
                writeln!(f, "  {}", v)?;
            }
            if self.failures > self.violations.len() {
                writeln!(
                    f,
                    "  ... and {} more",
                    self.failures - self.violations.len()
                )?;
            }
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pass_and_fail_counting() {
        let mut r = CheckReport::new("demo");
        r.record(true, || unreachable!());
        r.record(false, || "bad at 3".to_string());
        assert_eq!(r.checked, 2);
        assert_eq!(r.failures, 1);
        assert!(!r.passed());
        assert_eq!(r.violations, vec!["bad at 3".to_string()]);
    }

    #[test]
    fn violation_cap_respected() {
        let mut r = CheckReport::with_cap("demo", 2);
        for i in 0..5 {
            r.record(false, || format!("v{}", i));
        }
        assert_eq!(r.failures, 5);
        assert_eq!(r.violations.len(), 2);
        let text = r.to_string();
        assert!(text.contains("and 3 more"));
    }

    #[test]
    fn absorb_accumulates() {
        let mut a = CheckReport::with_cap("demo", 3);
        a.record(false, || "a0".to_string());
        let mut b = CheckReport::with_cap("demo", 3);
        b.record(false, || "b0".to_string());
        b.record(true, || unreachable!());
        a.absorb(b);
        assert_eq!(a.checked, 3);
        assert_eq!(a.failures, 2);
        assert_eq!(a.violations, vec!["a0".to_string(), "b0".to_string()]);
    }
}
