//! CSV tables for every exported artifact.
//!
//! Each table renders as an optional `# config_hash=<hex>` comment line, a
//! header row, then data rows. Reals use Rust's shortest round-trip
//! formatting, so equal values always render to equal bytes.

use crate::baseline::{ConvergenceRecord, PowerLawFit};
use crate::circuit::VerificationReport;
use crate::cvrp::QualityTable;
use crate::optimize::OptimizationRun;
use crate::partitions::{PartitionError, SolutionSpace};

#[derive(Debug, Clone, PartialEq)]
pub struct CsvTable {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl CsvTable {
    pub fn new(header: Vec<&'static str>) -> Self {
        Self {
            header,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        assert_eq!(row.len(), self.header.len(), "row width");
        self.rows.push(row);
    }

    pub fn render(&self, config_hash: Option<&str>) -> String {
        let mut out = Vec::new();
        if let Some(hash) = config_hash {
            out.extend_from_slice(format!("# config_hash={hash}\n").as_bytes());
        }
        {
            let mut w = csv::WriterBuilder::new()
                .terminator(csv::Terminator::Any(b'\n'))
                .from_writer(&mut out);
            w.write_record(&self.header).expect("write to memory");
            for row in &self.rows {
                w.write_record(row).expect("write to memory");
            }
            w.flush().expect("write to memory");
        }
        String::from_utf8(out).expect("utf-8 fields")
    }
}

/// `index,quality`
pub fn qualities(q: &QualityTable) -> CsvTable {
    let mut t = CsvTable::new(vec!["index", "quality"]);
    for (i, v) in q.qualities().iter().enumerate() {
        t.push(vec![i.to_string(), v.to_string()]);
    }
    t
}

/// `quality,multiplicity`
pub fn quality_levels(q: &QualityTable) -> CsvTable {
    let mut t = CsvTable::new(vec!["quality", "multiplicity"]);
    for l in q.levels() {
        t.push(vec![l.value.to_string(), l.multiplicity.to_string()]);
    }
    t
}

/// `index,solution` for every solution of size `n`.
pub fn solutions(n: usize) -> Result<CsvTable, PartitionError> {
    let space = SolutionSpace::new(n)?;
    let mut t = CsvTable::new(vec!["index", "solution"]);
    for (i, p) in space.iter().enumerate() {
        t.push(vec![i.to_string(), p.to_string()]);
    }
    Ok(t)
}

/// `quality,probability`
pub fn distribution(dist: &[(f64, f64)]) -> CsvTable {
    let mut t = CsvTable::new(vec!["quality", "probability"]);
    for (v, p) in dist {
        t.push(vec![v.to_string(), p.to_string()]);
    }
    t
}

/// `index,amplification`
pub fn amplification(amps: &[f64]) -> CsvTable {
    let mut t = CsvTable::new(vec!["index", "amplification"]);
    for (i, a) in amps.iter().enumerate() {
        t.push(vec![i.to_string(), a.to_string()]);
    }
    t
}

/// `quality,mean_amplification`
pub fn amplification_by_quality(rows: &[(f64, f64)]) -> CsvTable {
    let mut t = CsvTable::new(vec!["quality", "mean_amplification"]);
    for (v, a) in rows {
        t.push(vec![v.to_string(), a.to_string()]);
    }
    t
}

/// `r,best_objective,evaluations,restart_index`
pub fn convergence(runs: &[OptimizationRun]) -> CsvTable {
    let mut t = CsvTable::new(vec!["r", "best_objective", "evaluations", "restart_index"]);
    for run in runs {
        t.push(vec![
            run.depth.to_string(),
            run.best_objective.to_string(),
            run.evaluations.to_string(),
            run.restart_index.to_string(),
        ]);
    }
    t
}

/// `r,j,gamma_j,t_j`, with `j` counted from 1.
pub fn parameters(runs: &[OptimizationRun]) -> CsvTable {
    let mut t = CsvTable::new(vec!["r", "j", "gamma_j", "t_j"]);
    for run in runs {
        for (j, (g, time)) in run.best.layers().enumerate() {
            t.push(vec![
                run.depth.to_string(),
                (j + 1).to_string(),
                g.to_string(),
                time.to_string(),
            ]);
        }
    }
    t
}

/// `r,qwoa_expectation,classical_expected_best,target`
pub fn comparison(records: &[ConvergenceRecord]) -> CsvTable {
    let mut t = CsvTable::new(vec![
        "r",
        "qwoa_expectation",
        "classical_expected_best",
        "target",
    ]);
    for rec in records {
        t.push(vec![
            rec.r.to_string(),
            rec.qwoa_expectation.to_string(),
            rec.classical_expected_best.to_string(),
            rec.target.to_string(),
        ]);
    }
    t
}

/// `curve,alpha,r_min,r_max,residual`
pub fn fits(fits: &[PowerLawFit]) -> CsvTable {
    let mut t = CsvTable::new(vec!["curve", "alpha", "r_min", "r_max", "residual"]);
    for f in fits {
        t.push(vec![
            f.curve.name().to_string(),
            f.alpha.to_string(),
            f.r_min.to_string(),
            f.r_max.to_string(),
            f.residual.to_string(),
        ]);
    }
    t
}

/// `M,t,residual,leakage,ancilla_residual`
pub fn verification(reports: &[VerificationReport]) -> CsvTable {
    let mut t = CsvTable::new(vec!["M", "t", "residual", "leakage", "ancilla_residual"]);
    for r in reports {
        t.push(vec![
            r.solutions.to_string(),
            r.t.to_string(),
            r.residual().to_string(),
            r.leakage.to_string(),
            r.ancilla_residual.to_string(),
        ]);
    }
    t
}

/// `samples,trials,estimate,stderr,exact`
pub fn monte_carlo(rows: &[(u64, u64, f64, f64, f64)]) -> CsvTable {
    let mut t = CsvTable::new(vec!["samples", "trials", "estimate", "stderr", "exact"]);
    for (s, n, est, se, exact) in rows {
        t.push(vec![
            s.to_string(),
            n.to_string(),
            est.to_string(),
            se.to_string(),
            exact.to_string(),
        ]);
    }
    t
}
