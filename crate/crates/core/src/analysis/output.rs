//! CSV and JSON writers for sweep results.

use std::collections::BTreeMap;
use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use super::resolvent::GapReport;
use super::sweep::{SweepRecord, SweepReport};

pub const SWEEP_COLUMNS: &str = "eps,j,lambda_strip,lambda_1d,remainder_thm2,scaled_thm1,disc_err,trusted";
pub const GAP_COLUMNS: &str = "eps,k,gap,ratio";

fn comment<W: Write>(w: &mut W, provenance: Option<&str>) -> io::Result<()> {
    if let Some(p) = provenance {
        for line in p.lines() {
            writeln!(w, "# {line}")?;
        }
    }
    Ok(())
}

/// One row per `(eps, j)`, in sweep order. `provenance` becomes a leading
/// `#` comment line.
pub fn write_sweep_csv<W: Write>(mut w: W, records: &[SweepRecord], provenance: Option<&str>) -> io::Result<()> {
    comment(&mut w, provenance)?;
    writeln!(w, "{SWEEP_COLUMNS}")?;
    for r in records {
        for j in 0..r.modes() {
            writeln!(
                w,
                "{},{},{},{},{},{},{},{}",
                r.eps,
                j + 1,
                r.lambda_strip[j],
                r.lambda_1d[j],
                r.remainder_thm2[j],
                r.scaled_thm1[j],
                r.disc_err[j],
                r.trusted[j]
            )?;
        }
    }
    Ok(())
}

pub fn write_gap_csv<W: Write>(mut w: W, report: &GapReport, provenance: Option<&str>) -> io::Result<()> {
    comment(&mut w, provenance)?;
    writeln!(w, "{GAP_COLUMNS}")?;
    for g in &report.gaps {
        writeln!(w, "{},{},{},{}", g.eps, g.k, g.gap, g.ratio)?;
    }
    Ok(())
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub limits: BTreeMap<String, f64>,
    pub verdicts: BTreeMap<String, bool>,
    pub fitted_exponents: BTreeMap<String, f64>,
}

impl Summary {
    pub fn from_sweep(report: &SweepReport) -> Self {
        let mut s = Summary::default();
        for l in &report.limits {
            s.limits.insert(format!("j{}", l.j), l.limit);
            s.limits.insert(format!("j{}_raw_last", l.j), l.raw_last);
            s.limits.insert(format!("j{}_expected", l.j), l.expected);
        }
        s.verdicts.extend(report.verdicts());
        s
    }

    pub fn from_gap(report: &GapReport) -> Self {
        let mut s = Summary::default();
        s.fitted_exponents.insert("gap".into(), report.fitted_exponent);
        s.verdicts.insert("exponent_at_least_1.4".into(), report.fitted_exponent >= 1.4);
        s
    }

    /// Pretty JSON; non-finite numbers are written as `null`.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("summary serializes")
    }
}
