//! Verification ledger: named numeric checks with margins, CSV and text
//! rendering.

use crate::Result;
use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

/// One recorded comparison.
#[derive(Debug, Clone)]
pub struct Check {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    /// Positive margin means the intended inequality holds strictly.
    pub margin: f64,
    pub pass: bool,
    pub note: String,
}

impl Check {
    /// `lhs < rhs` with margin `rhs - lhs`.
    pub fn less(name: &str, lhs: f64, rhs: f64) -> Check {
        Check {
            name: name.into(),
            lhs,
            rhs,
            margin: rhs - lhs,
            pass: lhs < rhs,
            note: String::new(),
        }
    }

    /// `lhs ≤ rhs` up to `tol`.
    pub fn less_eq(name: &str, lhs: f64, rhs: f64, tol: f64) -> Check {
        Check {
            name: name.into(),
            lhs,
            rhs,
            margin: rhs - lhs,
            pass: lhs <= rhs + tol,
            note: String::new(),
        }
    }

    /// `|lhs - rhs| / max(|rhs|, floor) ≤ tol`.
    pub fn close(name: &str, lhs: f64, rhs: f64, tol: f64) -> Check {
        let rel = (lhs - rhs).abs() / rhs.abs().max(1e-300);
        Check {
            name: name.into(),
            lhs,
            rhs,
            margin: tol - rel,
            pass: rel <= tol,
            note: format!("rel_err={rel:.3e} tol={tol:.1e}"),
        }
    }

    pub fn skipped(name: &str, note: &str) -> Check {
        Check {
            name: name.into(),
            lhs: f64::NAN,
            rhs: f64::NAN,
            margin: f64::NAN,
            pass: true,
            note: format!("skipped: {note}"),
        }
    }

    pub fn with_note(mut self, note: &str) -> Check {
        self.note = note.into();
        self
    }
}

/// Computed levels plus the list of recorded checks — the verification
/// report assembled by the level and min-max machinery.
#[derive(Debug, Clone, Default)]
pub struct EnergyLedger {
    pub m: f64,
    pub m_eps: BTreeMap<u64, f64>,
    pub sobolev: f64,
    pub crit_level: BTreeMap<u64, f64>,
    pub checks: Vec<Check>,
}

/// Key for the ε-indexed maps (bit pattern keeps the map exact).
pub fn eps_key(eps: f64) -> u64 {
    eps.to_bits()
}

impl EnergyLedger {
    pub fn record(&mut self, check: Check) {
        self.checks.push(check);
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }

    /// CSV with columns `check,lhs,rhs,margin,pass,note`.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut f = std::fs::File::create(path)?;
        writeln!(f, "check,lhs,rhs,margin,pass,note")?;
        for c in &self.checks {
            writeln!(
                f,
                "{},{:.17e},{:.17e},{:.17e},{},{}",
                c.name, c.lhs, c.rhs, c.margin, c.pass, c.note
            )?;
        }
        Ok(())
    }

    /// Human-readable report.
    pub fn write_text(&self, path: &Path, header: &str) -> Result<()> {
        let mut f = std::fs::File::create(path)?;
        writeln!(f, "{header}")?;
        if self.m != 0.0 {
            writeln!(f, "m = {:.12e}", self.m)?;
        }
        if self.sobolev != 0.0 {
            writeln!(f, "S = {:.12e}", self.sobolev)?;
        }
        for (k, v) in &self.m_eps {
            writeln!(f, "m_eps(eps={:.6e}) = {:.12e}", f64::from_bits(*k), v)?;
        }
        for (k, v) in &self.crit_level {
            writeln!(f, "crit_level(eps={:.6e}) = {:.12e}", f64::from_bits(*k), v)?;
        }
        for c in &self.checks {
            writeln!(
                f,
                "[{}] {}: lhs={:.9e} rhs={:.9e} margin={:.3e} {}",
                if c.pass { "PASS" } else { "FAIL" },
                c.name,
                c.lhs,
                c.rhs,
                c.margin,
                c.note
            )?;
        }
        writeln!(f, "overall: {}", if self.all_pass() { "PASS" } else { "FAIL" })?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn check_constructors() {
        assert!(Check::less("a<b", 1.0, 2.0).pass);
        assert!(!Check::less("a<b", 2.0, 1.0).pass);
        assert!(Check::close("x~y", 1.0, 1.0000001, 1e-6).pass);
        assert!(Check::skipped("s", "n/a").pass);
    }

    #[test]
    fn ledger_roundtrip() {
        let mut l = EnergyLedger::default();
        l.record(Check::less("one", 1.0, 2.0));
        l.record(Check::less("two", 3.0, 2.0));
        assert!(!l.all_pass());
        assert_eq!(l.failures().count(), 1);
        let dir = tempfile::tempdir().unwrap();
        l.write_csv(&dir.path().join("l.csv")).unwrap();
        l.write_text(&dir.path().join("l.txt"), "test report").unwrap();
        let txt = std::fs::read_to_string(dir.path().join("l.txt")).unwrap();
        assert!(txt.contains("overall: FAIL"));
    }
}
