//! Planner × run matrices over one shared query sequence.

use std::fmt;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::str::FromStr;
use std::time::Duration;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use eirm::{BaselineConfig, Budget, LazyPrmStar, PlanResult, Planner, PlannerConfig, Query, RrtConnect, Session};

use crate::scenarios::{build_scenario, generate_queries, BenchScenario, QueryMode, ScenarioName};
use crate::BenchError;

/// Environment variable capping the number of runs executed in parallel.
pub const THREADS_ENV: &str = "BENCH_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PlannerKind {
    #[serde(rename = "eirm")]
    Eirm,
    /// The multiquery planner with all cross-query carry-over disabled.
    #[serde(rename = "eit")]
    Eit,
    #[serde(rename = "lazyprmstar")]
    LazyPrmStar,
    #[serde(rename = "rrtconnect")]
    RrtConnect,
}

impl PlannerKind {
    pub fn as_str(self) -> &'static str {
        match self {
            PlannerKind::Eirm => "eirm",
            PlannerKind::Eit => "eit",
            PlannerKind::LazyPrmStar => "lazyprmstar",
            PlannerKind::RrtConnect => "rrtconnect",
        }
    }
}

impl fmt::Display for PlannerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PlannerKind {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "eirm" => Ok(PlannerKind::Eirm),
            "eit" => Ok(PlannerKind::Eit),
            "lazyprmstar" => Ok(PlannerKind::LazyPrmStar),
            "rrtconnect" => Ok(PlannerKind::RrtConnect),
            other => Err(BenchError::Usage(format!("unknown planner '{other}'"))),
        }
    }
}

/// Per-query budget of a benchmark.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BudgetSpec {
    Seconds(f64),
    /// Deterministic mode: `t_init` is reported in main-loop iterations.
    Iterations(u64),
}

impl BudgetSpec {
    /// Per-query time limits by dimension: 0.5 s in 2D, 2 s above.
    pub fn default_for_dimension(dim: usize) -> BudgetSpec {
        BudgetSpec::Seconds(if dim <= 2 { 0.5 } else { 2.0 })
    }

    pub fn budget(self) -> Budget {
        match self {
            BudgetSpec::Seconds(s) => Budget::Time(Duration::from_secs_f64(s)),
            BudgetSpec::Iterations(n) => Budget::Iterations(n),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkSpec {
    pub scenario: ScenarioName,
    pub dim: usize,
    pub mode: QueryMode,
    pub n_queries: usize,
    pub n_runs: usize,
    pub budget: BudgetSpec,
    pub planners: Vec<PlannerKind>,
    pub master_seed: u64,
    pub initial_only: bool,
}

impl BenchmarkSpec {
    pub fn validate(&self) -> Result<(), BenchError> {
        if self.n_queries == 0 || self.n_runs == 0 {
            return Err(BenchError::Usage("queries and runs must be at least 1".into()));
        }
        if self.planners.is_empty() {
            return Err(BenchError::Usage("no planner selected".into()));
        }
        for (i, p) in self.planners.iter().enumerate() {
            if self.planners[..i].contains(p) {
                return Err(BenchError::Usage(format!("planner '{p}' listed twice")));
            }
        }
        let positive = match self.budget {
            BudgetSpec::Seconds(s) => s > 0.0 && s.is_finite(),
            BudgetSpec::Iterations(n) => n > 0,
        };
        if !positive {
            return Err(BenchError::Usage("the per-query budget must be positive".into()));
        }
        Ok(())
    }
}

/// One result row; `failed` marks rows of runs that errored or panicked.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub planner: String,
    pub run: usize,
    pub query: usize,
    pub t_init: f64,
    pub c_init: f64,
    pub c_final: f64,
    pub full_checks: u64,
    pub sparse_checks: u64,
    pub graph_size_at_init: usize,
    pub solved: bool,
    pub failed: bool,
}

impl Row {
    fn from_result(planner: PlannerKind, run: usize, query: usize, r: &PlanResult, failed: bool) -> Row {
        Row {
            planner: planner.as_str().to_string(),
            run,
            query,
            t_init: r.t_init,
            c_init: r.c_init,
            c_final: r.c_final,
            full_checks: r.full_checks,
            sparse_checks: r.sparse_checks,
            graph_size_at_init: r.graph_size_at_init,
            solved: r.solved(),
            failed,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResultsTable {
    pub spec: BenchmarkSpec,
    /// Hex SHA-256 of the shared query sequence.
    pub query_hash: String,
    /// Ordered by planner (as listed in the spec), run, query.
    pub rows: Vec<Row>,
}

/// Seed of one stream, derived from the master seed and a label.
pub fn derive_seed(master: u64, label: &str, run: usize) -> u64 {
    let digest = Sha256::digest(format!("{master}/{label}/{run}").as_bytes());
    u64::from_le_bytes(digest[..8].try_into().expect("digest has 32 bytes"))
}

pub fn query_hash(queries: &[Query]) -> String {
    let mut h = Sha256::new();
    for q in queries {
        for x in q.start.iter().chain(q.goals.iter().flatten()) {
            h.update(x.to_bits().to_le_bytes());
        }
        h.update([0xff]);
    }
    hex::encode(h.finalize())
}

/// Builds a planner with its benchmark configuration.
pub fn make_planner(
    kind: PlannerKind,
    bench: &BenchScenario,
    seed: u64,
    initial_only: bool,
) -> Result<Box<dyn Planner>, BenchError> {
    let scenario = bench.scenario.clone();
    let baseline = BaselineConfig {
        initial_only,
        ..BaselineConfig::for_dimension(scenario.dim())
    };
    Ok(match kind {
        PlannerKind::Eirm | PlannerKind::Eit => {
            let base = if kind == PlannerKind::Eit {
                PlannerConfig::eit_like()
            } else {
                PlannerConfig::default()
            };
            Box::new(Session::new(
                scenario,
                PlannerConfig {
                    seed,
                    initial_only,
                    ..base
                },
            )?)
        }
        PlannerKind::LazyPrmStar => Box::new(LazyPrmStar::new(scenario, baseline, seed)?),
        PlannerKind::RrtConnect => Box::new(RrtConnect::new(scenario, baseline, seed)?),
    })
}

fn failed_row(planner: PlannerKind, run: usize, query: usize) -> Row {
    Row::from_result(planner, run, query, &PlanResult::unsolved(None), true)
}

/// Plans the whole sequence with one fresh planner. A panic fails the
/// remaining queries of this run only.
fn run_one(kind: PlannerKind, run: usize, spec: &BenchmarkSpec, bench: &BenchScenario, queries: &[Query]) -> Vec<Row> {
    let mut rows = Vec::with_capacity(queries.len());
    let seed = derive_seed(spec.master_seed, kind.as_str(), run);
    let outcome = catch_unwind(AssertUnwindSafe(|| -> Result<(), BenchError> {
        let mut planner = make_planner(kind, bench, seed, spec.initial_only)?;
        for (i, q) in queries.iter().enumerate() {
            let row = match planner.plan_query(q) {
                Ok(r) => Row::from_result(kind, run, i, &r, false),
                Err(_) => failed_row(kind, run, i),
            };
            rows.push(row);
        }
        Ok(())
    }));
    if !matches!(outcome, Ok(Ok(()))) {
        for i in rows.len()..queries.len() {
            rows.push(failed_row(kind, run, i));
        }
    }
    rows
}

fn thread_count() -> usize {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

/// The shared query sequence of a spec.
pub fn spec_queries(spec: &BenchmarkSpec) -> Result<(BenchScenario, Vec<Query>), BenchError> {
    let bench = build_scenario(spec.scenario, spec.dim)?;
    let seed = derive_seed(spec.master_seed, "queries", 0);
    let queries = generate_queries(&bench, spec.mode, spec.n_queries, seed, spec.budget.budget())?;
    Ok((bench, queries))
}

pub fn run_benchmark(spec: &BenchmarkSpec) -> Result<ResultsTable, BenchError> {
    spec.validate()?;
    let (bench, queries) = spec_queries(spec)?;
    let jobs: Vec<(PlannerKind, usize)> = spec
        .planners
        .iter()
        .flat_map(|&p| (0..spec.n_runs).map(move |r| (p, r)))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(thread_count())
        .build()
        .map_err(|e| BenchError::Runtime(e.to_string()))?;
    let per_job: Vec<Vec<Row>> = pool.install(|| {
        jobs.par_iter()
            .map(|&(p, r)| run_one(p, r, spec, &bench, &queries))
            .collect()
    });
    Ok(ResultsTable {
        spec: spec.clone(),
        query_hash: query_hash(&queries),
        rows: per_job.into_iter().flatten().collect(),
    })
}
