use std::fmt::Write as _;
use std::io::Write;

use crate::error::Result;

/// Absolute tolerance for every equality- or inequality-style check.
pub const TOLERANCE: f64 = 1e-9;

/// One checked instance (or one violation, for exhaustive checks).
#[derive(Debug, Clone, PartialEq)]
pub struct CheckRow {
    pub seed: Option<u64>,
    pub pass: bool,
    pub lhs: f64,
    pub rhs: f64,
    /// Sets needed to replay a violation.
    pub witness: Vec<Vec<usize>>,
}

impl CheckRow {
    pub fn new(seed: Option<u64>, pass: bool, lhs: f64, rhs: f64) -> Self {
        Self {
            seed,
            pass,
            lhs,
            rhs,
            witness: Vec::new(),
        }
    }

    pub fn failed(seed: Option<u64>, lhs: f64, rhs: f64, witness: Vec<Vec<usize>>) -> Self {
        Self {
            seed,
            pass: false,
            lhs,
            rhs,
            witness,
        }
    }

    pub fn with_witness(mut self, witness: Vec<Vec<usize>>) -> Self {
        self.witness = witness;
        self
    }
}

/// Outcome of one property check over many instances.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct VerificationReport {
    pub property: String,
    pub checked: usize,
    pub skipped: usize,
    /// Violations dropped once the row cap was reached.
    pub truncated: usize,
    pub rows: Vec<CheckRow>,
    pub notes: Vec<String>,
}

impl VerificationReport {
    pub fn new(property: impl Into<String>) -> Self {
        Self {
            property: property.into(),
            ..Self::default()
        }
    }

    pub fn passed(&self) -> bool {
        self.truncated == 0 && self.rows.iter().all(|r| r.pass)
    }

    pub fn violations(&self) -> impl Iterator<Item = &CheckRow> {
        self.rows.iter().filter(|r| !r.pass)
    }

    pub fn violation_count(&self) -> usize {
        self.violations().count() + self.truncated
    }

    /// Records one per-seed row.
    pub fn record(&mut self, row: CheckRow) {
        self.checked += 1;
        self.rows.push(row);
    }

    pub fn skip(&mut self, note: impl Into<String>) {
        self.skipped += 1;
        self.notes.push(note.into());
    }

    /// Concatenates another report for the same property.
    pub fn merge(&mut self, other: VerificationReport) {
        self.checked += other.checked;
        self.skipped += other.skipped;
        self.truncated += other.truncated;
        self.rows.extend(other.rows);
        self.notes.extend(other.notes);
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let status = if self.passed() { "PASS" } else { "FAIL" };
        let _ = writeln!(out, "== {} : {status}", self.property);
        let _ = writeln!(
            out,
            "   checked {}  skipped {}  violations {}",
            self.checked,
            self.skipped,
            self.violation_count()
        );
        for row in self.violations().take(10) {
            let seed = row.seed.map_or_else(|| "-".to_string(), |s| s.to_string());
            let _ = writeln!(
                out,
                "   violation seed={seed} lhs={} rhs={} witness={:?}",
                row.lhs, row.rhs, row.witness
            );
        }
        for note in self.notes.iter().take(5) {
            let _ = writeln!(out, "   note: {note}");
        }
        if self.notes.len() > 5 {
            let _ = writeln!(out, "   ({} more notes)", self.notes.len() - 5);
        }
        out
    }
}

/// Writes `property,seed,pass,lhs,rhs` rows for every report.
pub fn write_csv<W: Write>(reports: &[VerificationReport], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["property", "seed", "pass", "lhs", "rhs"])?;
    for report in reports {
        for row in &report.rows {
            w.write_record([
                report.property.clone(),
                row.seed.map(|s| s.to_string()).unwrap_or_default(),
                row.pass.to_string(),
                row.lhs.to_string(),
                row.rhs.to_string(),
            ])?;
        }
    }
    w.flush().map_err(|e| crate::Error::io("<csv>", e))?;
    Ok(())
}
