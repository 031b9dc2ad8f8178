//! Benchmark report shapes and their CSV/JSON serializations.

use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::error::Result;
use crate::metrics::SupportMetrics;

use super::config::ExperimentSpec;

/// One `(method, seed)` outcome.
#[derive(Debug, Clone, Serialize)]
pub struct SeedRow {
    pub method: String,
    pub seed: u64,
    pub status: String,
    pub ok: bool,
    pub metrics: Option<SupportMetrics>,
    pub frob_error: Option<f64>,
    /// Measured around the solver call only.
    pub wall_time_seconds: f64,
    pub iters_run: usize,
    pub final_objective: f64,
}

/// Mean/stddev block per method, over its successful seeds.
#[derive(Debug, Clone, Serialize)]
pub struct MethodAggregate {
    pub method: String,
    pub seeds_ok: usize,
    pub mean_tpr: f64,
    pub std_tpr: f64,
    pub mean_fpr: f64,
    pub std_fpr: f64,
    pub mean_time: f64,
    pub std_time: f64,
}

/// Full benchmark output: the spec echo, the per-seed table, and the
/// aggregate block.
#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub spec: ExperimentSpec,
    /// Worker threads available to the run; recorded so reruns can pin the
    /// same configuration.
    pub threads: usize,
    pub rows: Vec<SeedRow>,
    pub aggregates: Vec<MethodAggregate>,
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / values.len() as f64;
    (mean, var.sqrt())
}

impl RunReport {
    pub fn new(spec: ExperimentSpec, mut rows: Vec<SeedRow>) -> Self {
        rows.sort_by(|a, b| (&a.method, a.seed).cmp(&(&b.method, b.seed)));
        let mut aggregates = Vec::new();
        for method in &spec.methods {
            let ok_rows: Vec<&SeedRow> = rows
                .iter()
                .filter(|r| r.method == method.name() && r.ok)
                .collect();
            let tprs: Vec<f64> = ok_rows.iter().filter_map(|r| r.metrics.map(|m| m.tpr)).collect();
            let fprs: Vec<f64> = ok_rows.iter().filter_map(|r| r.metrics.map(|m| m.fpr)).collect();
            let times: Vec<f64> = ok_rows.iter().map(|r| r.wall_time_seconds).collect();
            let (mean_tpr, std_tpr) = mean_std(&tprs);
            let (mean_fpr, std_fpr) = mean_std(&fprs);
            let (mean_time, std_time) = mean_std(&times);
            aggregates.push(MethodAggregate {
                method: method.name().to_string(),
                seeds_ok: ok_rows.len(),
                mean_tpr,
                std_tpr,
                mean_fpr,
                std_fpr,
                mean_time,
                std_time,
            });
        }
        RunReport { spec, threads: rayon::current_num_threads(), rows, aggregates }
    }

    pub fn all_ok(&self) -> bool {
        self.rows.iter().all(|r| r.ok)
    }

    /// Per-seed table followed by the aggregate block.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(
            w,
            "method,seed,status,tpr,fpr,tp,fp,tn,fn,frob_error,wall_time_seconds,iters_run,final_objective"
        )?;
        for r in &self.rows {
            let (tpr, fpr, tp, fp, tn, fn_) = match r.metrics {
                Some(m) => (
                    m.tpr.to_string(),
                    m.fpr.to_string(),
                    m.tp.to_string(),
                    m.fp.to_string(),
                    m.tn.to_string(),
                    m.fn_.to_string(),
                ),
                None => Default::default(),
            };
            let frob = r.frob_error.map(|v| v.to_string()).unwrap_or_default();
            writeln!(
                w,
                "{},{},{},{},{},{},{},{},{},{},{},{},{}",
                r.method,
                r.seed,
                r.status,
                tpr,
                fpr,
                tp,
                fp,
                tn,
                fn_,
                frob,
                r.wall_time_seconds,
                r.iters_run,
                r.final_objective
            )?;
        }
        writeln!(w)?;
        writeln!(w, "method,seeds_ok,mean_tpr,std_tpr,mean_fpr,std_fpr,mean_time,std_time")?;
        for a in &self.aggregates {
            writeln!(
                w,
                "{},{},{},{},{},{},{},{}",
                a.method, a.seeds_ok, a.mean_tpr, a.std_tpr, a.mean_fpr, a.std_fpr, a.mean_time, a.std_time
            )?;
        }
        Ok(())
    }

    /// Write `report.csv` and `report.json` into a directory.
    pub fn write_files(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        let csv = std::fs::File::create(dir.join("report.csv"))?;
        self.write_csv(std::io::BufWriter::new(csv))?;
        let json = std::fs::File::create(dir.join("report.json"))?;
        serde_json::to_writer_pretty(std::io::BufWriter::new(json), self)?;
        Ok(())
    }

    pub fn aggregate_for(&self, method: &str) -> Option<&MethodAggregate> {
        self.aggregates.iter().find(|a| a.method == method)
    }
}
