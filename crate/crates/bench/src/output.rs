//! Result files: raw rows, the JSON summary and per-planner plot data.
//! Every file is written to a temporary name and renamed into place.

use std::fs;
use std::path::Path;

use serde::Serialize;

use crate::aggregate::{MedianCi, Summary};
use crate::run::{BenchmarkSpec, ResultsTable};
use crate::scenarios::BenchScenario;
use crate::{format_metric, BenchError};

pub const RESULTS_HEADER: [&str; 10] = [
    "planner",
    "run",
    "query",
    "t_init",
    "c_init",
    "c_final",
    "full_checks",
    "sparse_checks",
    "graph_size_at_init",
    "solved",
];

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), BenchError> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

pub fn results_csv(table: &ResultsTable) -> Result<Vec<u8>, BenchError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(RESULTS_HEADER)?;
    for r in &table.rows {
        w.write_record([
            r.planner.clone(),
            r.run.to_string(),
            r.query.to_string(),
            format_metric(r.t_init),
            format_metric(r.c_init),
            format_metric(r.c_final),
            r.full_checks.to_string(),
            r.sparse_checks.to_string(),
            r.graph_size_at_init.to_string(),
            r.solved.to_string(),
        ])?;
    }
    w.into_inner().map_err(|e| BenchError::Runtime(e.to_string()))
}

fn plot_csv(summary: &crate::aggregate::PlannerSummary) -> Result<Vec<u8>, BenchError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["query".to_string()];
    for m in ["t_init", "c_init", "c_final"] {
        for s in ["median", "ci_lo", "ci_hi"] {
            header.push(format!("{m}_{s}"));
        }
    }
    header.extend(
        ["success_rate", "cumulative_t_init", "cumulative_c_init", "cumulative_c_final"].map(String::from),
    );
    w.write_record(&header)?;
    for (q, cum) in summary.per_query.iter().zip(&summary.cumulative_by_query) {
        let mut rec = vec![q.query.to_string()];
        for ci in [&q.t_init, &q.c_init, &q.c_final] {
            let MedianCi { median, lo, hi } = ci;
            rec.extend([median, lo, hi].map(|m| format_metric(m.0)));
        }
        rec.push(q.success_rate.to_string());
        rec.extend([cum.t_init, cum.c_init, cum.c_final].map(|m| format_metric(m.0)));
        w.write_record(&rec)?;
    }
    w.into_inner().map_err(|e| BenchError::Runtime(e.to_string()))
}

#[derive(Serialize)]
struct SummaryDoc<'a> {
    spec: &'a BenchmarkSpec,
    code_version: &'static str,
    query_hash: &'a str,
    rows: usize,
    #[serde(flatten)]
    summary: &'a Summary,
}

/// Writes `results.csv`, `summary.json` and `plotdata/<planner>.csv`.
pub fn emit_outputs(dir: &Path, table: &ResultsTable, summary: &Summary) -> Result<(), BenchError> {
    let plot_dir = dir.join("plotdata");
    fs::create_dir_all(&plot_dir)?;
    write_atomic(&dir.join("results.csv"), &results_csv(table)?)?;
    let doc = SummaryDoc {
        spec: &table.spec,
        code_version: env!("CARGO_PKG_VERSION"),
        query_hash: &table.query_hash,
        rows: table.rows.len(),
        summary,
    };
    write_atomic(&dir.join("summary.json"), serde_json::to_string_pretty(&doc)?.as_bytes())?;
    for p in &summary.planners {
        write_atomic(&plot_dir.join(format!("{}.csv", p.planner)), &plot_csv(p)?)?;
    }
    Ok(())
}

/// Writes one JSON document per supported scenario and dimension.
pub fn export_scenarios(dir: &Path, scenarios: &[BenchScenario]) -> Result<Vec<String>, BenchError> {
    fs::create_dir_all(dir)?;
    let mut names = Vec::new();
    for b in scenarios {
        let name = format!("{}_{}d.json", b.name, b.scenario.dim());
        write_atomic(&dir.join(&name), serde_json::to_string_pretty(b)?.as_bytes())?;
        names.push(name);
    }
    Ok(names)
}
