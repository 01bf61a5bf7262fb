//! Benchmark harness: the abstract multiquery scenarios, seeded query
//! sequences, planner × run matrices, order-statistic aggregation and
//! plot-ready output files.

pub mod aggregate;
pub mod output;
pub mod run;
pub mod scenarios;

use serde::{Serialize, Serializer};
use thiserror::Error;

pub use aggregate::{aggregate, Summary};
pub use output::emit_outputs;
pub use run::{run_benchmark, BenchmarkSpec, BudgetSpec, PlannerKind, ResultsTable, Row};
pub use scenarios::{build_scenario, generate_queries, BenchScenario, QueryMode, ScenarioName};

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("scenario: {0}")]
    Scenario(String),
    #[error("runtime: {0}")]
    Runtime(String),
    #[error(transparent)]
    Space(#[from] eirm::SpaceError),
    #[error(transparent)]
    Config(#[from] eirm::ConfigError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// Formats a metric; infinities become the literal `inf`.
pub fn format_metric(x: f64) -> String {
    if x == f64::INFINITY {
        "inf".to_string()
    } else {
        x.to_string()
    }
}

/// A metric serialized as a JSON number, or as the string `"inf"` when
/// infinite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Metric(pub f64);

impl Serialize for Metric {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if self.0.is_finite() {
            s.serialize_f64(self.0)
        } else {
            s.serialize_str(&format_metric(self.0))
        }
    }
}

/// Runs a spec and writes all outputs into `dir`.
pub fn run_and_emit(spec: &BenchmarkSpec, dir: &std::path::Path) -> Result<(ResultsTable, Summary), BenchError> {
    let table = run_benchmark(spec)?;
    let summary = aggregate(&table);
    emit_outputs(dir, &table, &summary)?;
    Ok((table, summary))
}
