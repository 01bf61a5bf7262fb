//! Order statistics over runs: medians with infinite values participating,
//! nonparametric confidence intervals and cumulative medians.

use serde::Serialize;

use crate::run::{ResultsTable, Row};
use crate::Metric;

/// Confidence level of the reported median intervals.
pub const CONFIDENCE: f64 = 0.99;

/// Median of a sample. Infinite values take part in the ordering, so the
/// median is infinite once more than half the values are. Even-sized
/// samples average the two middle values.
pub fn median(values: &[f64]) -> f64 {
    assert!(!values.is_empty(), "median of an empty sample");
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        let (a, b) = (v[n / 2 - 1], v[n / 2]);
        if a == b {
            a
        } else {
            0.5 * (a + b)
        }
    }
}

/// `P(X <= k)` for `X ~ Binomial(n, 1/2)`.
pub fn binomial_half_cdf(n: usize, k: usize) -> f64 {
    let ln_half = 0.5f64.ln();
    let mut ln_pmf = n as f64 * ln_half;
    let mut total = 0.0;
    for i in 0..=k.min(n) {
        if i > 0 {
            ln_pmf += ((n - i + 1) as f64).ln() - (i as f64).ln();
        }
        total += ln_pmf.exp();
    }
    total.min(1.0)
}

/// One-based ranks `(l, u)` of the order statistics bounding the median with
/// at least `confidence` coverage: the largest `l` with
/// `P(X <= l - 1) <= (1 - confidence) / 2` and `u = n + 1 - l`. Samples too
/// small for the requested coverage fall back to the extremes.
pub fn median_ci_ranks(n: usize, confidence: f64) -> (usize, usize) {
    assert!(n > 0);
    let tail = (1.0 - confidence) / 2.0;
    let mut l = 1;
    while l < n.div_ceil(2) && binomial_half_cdf(n, l) <= tail {
        l += 1;
    }
    (l, n + 1 - l)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MedianCi {
    pub median: Metric,
    pub lo: Metric,
    pub hi: Metric,
}

pub fn median_ci(values: &[f64]) -> MedianCi {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let (l, u) = median_ci_ranks(v.len(), CONFIDENCE);
    MedianCi {
        median: Metric(median(&v)),
        lo: Metric(v[l - 1]),
        hi: Metric(v[u - 1]),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QueryStats {
    pub query: usize,
    pub t_init: MedianCi,
    pub c_init: MedianCi,
    pub c_final: MedianCi,
    pub success_rate: f64,
    pub median_full_checks: f64,
    pub median_graph_size_at_init: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Cumulative {
    pub t_init: Metric,
    pub c_init: Metric,
    pub c_final: Metric,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlannerSummary {
    pub planner: String,
    /// Per-query medians summed over all queries.
    pub cumulative: Cumulative,
    /// Running sums of the per-query medians, one entry per query.
    pub cumulative_by_query: Vec<Cumulative>,
    pub per_query: Vec<QueryStats>,
    pub failed_rows: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub planners: Vec<PlannerSummary>,
}

fn column(rows: &[&Row], f: impl Fn(&Row) -> f64) -> Vec<f64> {
    rows.iter().map(|r| f(r)).collect()
}

pub fn aggregate(table: &ResultsTable) -> Summary {
    let n_queries = table.spec.n_queries;
    let planners = table
        .spec
        .planners
        .iter()
        .map(|p| {
            let name = p.as_str();
            let mine: Vec<&Row> = table.rows.iter().filter(|r| r.planner == name).collect();
            let mut per_query = Vec::with_capacity(n_queries);
            let mut running = [0.0f64; 3];
            let mut cumulative_by_query = Vec::with_capacity(n_queries);
            for q in 0..n_queries {
                let rows: Vec<&Row> = mine.iter().copied().filter(|r| r.query == q).collect();
                let stats = QueryStats {
                    query: q,
                    t_init: median_ci(&column(&rows, |r| r.t_init)),
                    c_init: median_ci(&column(&rows, |r| r.c_init)),
                    c_final: median_ci(&column(&rows, |r| r.c_final)),
                    success_rate: rows.iter().filter(|r| r.solved).count() as f64 / rows.len() as f64,
                    median_full_checks: median(&column(&rows, |r| r.full_checks as f64)),
                    median_graph_size_at_init: median(&column(&rows, |r| r.graph_size_at_init as f64)),
                };
                running[0] += stats.t_init.median.0;
                running[1] += stats.c_init.median.0;
                running[2] += stats.c_final.median.0;
                cumulative_by_query.push(Cumulative {
                    t_init: Metric(running[0]),
                    c_init: Metric(running[1]),
                    c_final: Metric(running[2]),
                });
                per_query.push(stats);
            }
            PlannerSummary {
                planner: name.to_string(),
                cumulative: *cumulative_by_query.last().expect("at least one query"),
                cumulative_by_query,
                per_query,
                failed_rows: mine.iter().filter(|r| r.failed).count(),
            }
        })
        .collect();
    Summary { planners }
}
