//! Multiquery sessions: query setup, the main planning loop, budgets, metrics
//! and path extraction.

use std::collections::HashMap;
use std::fmt;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::approximation::{Approximation, BatchConfig};
use crate::error::{ApproximationError, ConfigError, PlanError};
use crate::search::{EffortToCome, ForwardOutcome, Search, SearchConfig, Step};
use crate::space::{grid_points, Scenario, StateId, ValidationStatus};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlannerConfig {
    /// Samples per batch.
    pub batch_size: usize,
    /// Scale of the k-nearest connection rule.
    pub knn_scale: f64,
    /// Sparse checks are this many times coarser than full checks.
    pub sparse_factor: u32,
    /// Starts and goals costlier to connect than this are retained.
    pub prune_threshold: u64,
    pub effort_to_come: EffortToCome,
    pub w_after_solution: f64,
    /// Drop all cross-query knowledge at every query.
    pub eit_like: bool,
    /// Stop each query at its first solution.
    pub initial_only: bool,
    /// Upper bound on batches per query, the first included.
    pub max_batches: Option<usize>,
    pub seed: u64,
}

impl Default for PlannerConfig {
    fn default() -> Self {
        PlannerConfig {
            batch_size: 100,
            knn_scale: 1.001,
            sparse_factor: 100,
            prune_threshold: 50_000,
            effort_to_come: EffortToCome::Zero,
            w_after_solution: 1.0,
            eit_like: false,
            initial_only: false,
            max_batches: None,
            seed: 0,
        }
    }
}

impl PlannerConfig {
    /// Single-query configuration without any carry-over between queries.
    pub fn eit_like() -> Self {
        PlannerConfig {
            eit_like: true,
            ..PlannerConfig::default()
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.batch_size == 0 {
            return Err(ConfigError::Invalid("batch size must be at least 1".into()));
        }
        if !(self.knn_scale >= 1.0) || !self.knn_scale.is_finite() {
            return Err(ConfigError::Invalid("knn scale must be a finite value >= 1".into()));
        }
        if self.sparse_factor == 0 {
            return Err(ConfigError::Invalid("sparse factor must be at least 1".into()));
        }
        if !(self.w_after_solution >= 1.0) || !self.w_after_solution.is_finite() {
            return Err(ConfigError::Invalid(
                "suboptimality factor must be a finite value >= 1".into(),
            ));
        }
        if self.max_batches == Some(0) {
            return Err(ConfigError::Invalid("max batches must be at least 1".into()));
        }
        Ok(())
    }

    fn batch_config(&self) -> BatchConfig {
        BatchConfig {
            batch_size: self.batch_size,
            knn_scale: self.knn_scale,
            prune_threshold: self.prune_threshold,
        }
    }

    fn search_config(&self) -> SearchConfig {
        SearchConfig {
            w_after_solution: self.w_after_solution,
            effort_to_come: self.effort_to_come,
        }
    }
}

/// Per-query budget.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Budget {
    /// Wall-clock time; `t_init` is reported in seconds.
    Time(Duration),
    /// Main-loop iterations; `t_init` is reported in iterations.
    Iterations(u64),
}

impl Budget {
    pub fn seconds(s: f64) -> Budget {
        Budget::Time(Duration::from_secs_f64(s))
    }

    fn is_positive(&self) -> bool {
        match self {
            Budget::Time(d) => !d.is_zero(),
            Budget::Iterations(n) => *n > 0,
        }
    }
}

/// Tracks a running budget.
#[derive(Debug, Clone, Copy)]
pub struct Clock {
    budget: Budget,
    started: Instant,
    iterations: u64,
}

impl Clock {
    pub fn start(budget: Budget) -> Self {
        Clock {
            budget,
            started: Instant::now(),
            iterations: 0,
        }
    }

    /// Counts one iteration unless the budget is used up.
    pub fn tick(&mut self) -> bool {
        let spent = match self.budget {
            Budget::Time(d) => self.started.elapsed() >= d,
            Budget::Iterations(n) => self.iterations >= n,
        };
        if spent {
            return false;
        }
        self.iterations += 1;
        true
    }

    pub fn iterations(&self) -> u64 {
        self.iterations
    }

    /// Elapsed seconds or iterations, depending on the budget kind.
    pub fn now(&self) -> f64 {
        match self.budget {
            Budget::Time(_) => self.started.elapsed().as_secs_f64(),
            Budget::Iterations(_) => self.iterations as f64,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Query {
    pub start: Vec<f64>,
    pub goals: Vec<Vec<f64>>,
    pub budget: Budget,
}

impl Query {
    pub fn new(start: Vec<f64>, goals: Vec<Vec<f64>>, budget: Budget) -> Self {
        Query {
            start,
            goals,
            budget,
        }
    }

    /// Rejects queries that cannot be planned in `scenario`.
    pub fn validate(&self, scenario: &Scenario) -> Result<(), PlanError> {
        if self.goals.is_empty() {
            return Err(PlanError::InvalidQuery("no goal".into()));
        }
        if !self.budget.is_positive() {
            return Err(PlanError::InvalidQuery("budget must be positive".into()));
        }
        for (what, p) in std::iter::once(("start", &self.start)).chain(self.goals.iter().map(|g| ("goal", g))) {
            let valid = scenario
                .is_state_valid(p)
                .map_err(|e| PlanError::InvalidQuery(format!("{what}: {e}")))?;
            if !scenario.in_bounds(p) {
                return Err(PlanError::InvalidQuery(format!("{what} {p:?} is out of bounds")));
            }
            if !valid {
                return Err(PlanError::InvalidQuery(format!("{what} {p:?} is in collision")));
            }
        }
        if self.goals.iter().any(|g| g == &self.start) {
            return Err(PlanError::InvalidQuery("start coincides with a goal".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PlanStatus {
    Solved,
    NoSolution,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlanResult {
    pub status: PlanStatus,
    /// Coordinates from the start to a goal.
    pub path: Option<Vec<Vec<f64>>>,
    pub path_ids: Option<Vec<StateId>>,
    /// Time of the first solution, in seconds or iterations.
    pub t_init: f64,
    pub c_init: f64,
    pub c_final: f64,
    /// Full-resolution point evaluations during this query.
    pub full_checks: u64,
    /// Sparse point evaluations during this query.
    pub sparse_checks: u64,
    pub batches_used: usize,
    pub batches_before_init: usize,
    /// Vertices in the graph when the first solution was found.
    pub graph_size_at_init: usize,
    pub keep_size: usize,
    pub goal_count: usize,
    pub iterations: u64,
    pub diagnostic: Option<String>,
}

impl PlanResult {
    /// Result of a query that found nothing.
    pub fn unsolved(diagnostic: Option<String>) -> Self {
        PlanResult {
            status: PlanStatus::NoSolution,
            path: None,
            path_ids: None,
            t_init: f64::INFINITY,
            c_init: f64::INFINITY,
            c_final: f64::INFINITY,
            full_checks: 0,
            sparse_checks: 0,
            batches_used: 0,
            batches_before_init: 0,
            graph_size_at_init: 0,
            keep_size: 0,
            goal_count: 0,
            iterations: 0,
            diagnostic,
        }
    }

    pub fn solved(&self) -> bool {
        self.status == PlanStatus::Solved
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum PlanEvent {
    SolutionFound {
        cost: f64,
        /// Seconds or iterations since the query began.
        time: f64,
        full_checks: u64,
        sparse_checks: u64,
    },
    /// States activated by one refinement, and the bound they were drawn under.
    BatchAdded { states: Vec<Vec<f64>>, c_best: f64 },
}

pub type EventHandler = Box<dyn FnMut(&PlanEvent) + Send>;

/// Common interface of all planners.
pub trait Planner: Send {
    fn name(&self) -> &str;

    fn plan_query(&mut self, query: &Query) -> Result<PlanResult, PlanError>;

    /// Plans queries in order; a failing query is recorded and the sequence
    /// continues.
    fn solve_sequence(&mut self, queries: &[Query]) -> Vec<PlanResult> {
        queries
            .iter()
            .map(|q| {
                self.plan_query(q)
                    .unwrap_or_else(|e| PlanResult::unsolved(Some(e.to_string())))
            })
            .collect()
    }
}

/// Persistent multiquery planning state.
pub struct Session {
    config: PlannerConfig,
    approx: Approximation,
    events: Option<EventHandler>,
}

impl fmt::Debug for Session {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Session")
            .field("config", &self.config)
            .field("approx", &self.approx)
            .finish_non_exhaustive()
    }
}

impl Session {
    pub fn new(scenario: Scenario, config: PlannerConfig) -> Result<Self, ConfigError> {
        config.validate()?;
        let approx = Approximation::new(scenario, config.batch_config(), config.sparse_factor, config.seed);
        Ok(Session {
            config,
            approx,
            events: None,
        })
    }

    pub fn config(&self) -> &PlannerConfig {
        &self.config
    }

    pub fn scenario(&self) -> &Scenario {
        self.approx.scenario()
    }

    pub fn approximation(&self) -> &Approximation {
        &self.approx
    }

    pub fn set_event_handler(&mut self, handler: EventHandler) {
        self.events = Some(handler);
    }

    fn emit(&mut self, event: PlanEvent) {
        if let Some(handler) = self.events.as_mut() {
            handler(&event);
        }
    }

    /// Plans one query against the persistent session state.
    pub fn plan_query(&mut self, query: &Query) -> Result<PlanResult, PlanError> {
        query.validate(self.approx.scenario())?;
        if self.config.eit_like {
            self.approx.forget();
        }
        let start = self.approx.store_mut().intern(&query.start);
        let mut goals: Vec<StateId> = Vec::new();
        for g in &query.goals {
            let id = self.approx.store_mut().intern(g);
            if !goals.contains(&id) {
                goals.push(id);
            }
        }
        let mut clock = Clock::start(query.budget);
        let full0 = self.approx.full_checks();
        let sparse0 = self.approx.sparse_checks();
        let mut result = PlanResult::unsolved(None);
        result.goal_count = goals.len();

        let first = match self.approx.rewind_for_query(start, &goals) {
            Ok(batch) => batch,
            Err(ApproximationError::InvalidState(id)) => {
                return Err(PlanError::InvalidQuery(format!("state {id} is in collision")));
            }
            Err(e) => {
                result.diagnostic = Some(e.to_string());
                return Ok(self.finish(result, full0, sparse0, &clock));
            }
        };
        result.batches_used = 1;
        self.emit_batch(&first.states, f64::INFINITY);
        let goal_locals: Vec<u32> = goals
            .iter()
            .map(|g| self.approx.local_of(*g).expect("goals are active"))
            .collect();
        let start_local = self.approx.local_of(start).expect("start is active");
        let mut search = Search::new(self.config.search_config(), &mut self.approx, start_local, &goal_locals);

        while clock.tick() {
            let step = match search.step(&mut self.approx) {
                Ok(step) => step,
                Err(e) => {
                    result.diagnostic = Some(e.to_string());
                    break;
                }
            };
            match step {
                Step::Forward(ForwardOutcome::Improved(cost)) => {
                    if !result.c_init.is_finite() {
                        result.t_init = clock.now();
                        result.c_init = cost;
                        result.graph_size_at_init = self.approx.active_len();
                        result.batches_before_init = result.batches_used;
                    }
                    result.c_final = cost;
                    let event = PlanEvent::SolutionFound {
                        cost,
                        time: clock.now(),
                        full_checks: self.approx.full_checks() - full0,
                        sparse_checks: self.approx.sparse_checks() - sparse0,
                    };
                    self.emit(event);
                    if self.config.initial_only {
                        break;
                    }
                }
                Step::Exhausted => {
                    if self.config.max_batches.is_some_and(|m| result.batches_used >= m) {
                        break;
                    }
                    let c_best = search.c_curr();
                    let batch = match self.approx.add_batch(c_best) {
                        Ok(batch) => batch,
                        Err(e) => {
                            result.diagnostic = Some(e.to_string());
                            break;
                        }
                    };
                    if batch.states.is_empty() {
                        // the informed set is (nearly) empty: converged
                        break;
                    }
                    result.batches_used += 1;
                    self.emit_batch(&batch.states, c_best);
                    search.restart(&mut self.approx);
                }
                _ => {}
            }
        }

        if let Some(goal) = search.best_goal() {
            let locals = search.path_to(goal)?;
            let ids: Vec<StateId> = locals.iter().map(|&x| self.approx.id_of(x)).collect();
            for w in ids.windows(2) {
                if self.approx.registry().status_of(w[0], w[1]) != ValidationStatus::Valid {
                    return Err(PlanError::BrokenTree(format!(
                        "tree edge ({}, {}) is not validated",
                        w[0], w[1]
                    )));
                }
            }
            result.status = PlanStatus::Solved;
            result.path = Some(ids.iter().map(|&id| self.approx.store().coords(id).to_vec()).collect());
            result.path_ids = Some(ids);
            result.c_final = search.c_curr();
        }
        if !self.config.eit_like {
            self.approx.finish_query_prune(start, &goals);
        }
        Ok(self.finish(result, full0, sparse0, &clock))
    }

    fn finish(
        &self,
        mut result: PlanResult,
        full0: u64,
        sparse0: u64,
        clock: &Clock,
    ) -> PlanResult {
        result.full_checks = self.approx.full_checks() - full0;
        result.sparse_checks = self.approx.sparse_checks() - sparse0;
        result.keep_size = self.approx.keep_buffer().len();
        result.iterations = clock.iterations();
        result
    }

    fn emit_batch(&mut self, states: &[StateId], c_best: f64) {
        if self.events.is_none() {
            return;
        }
        let coords = states
            .iter()
            .map(|&id| self.approx.store().coords(id).to_vec())
            .collect();
        self.emit(PlanEvent::BatchAdded {
            states: coords,
            c_best,
        });
    }

    /// Plans queries in order against this session; errors are recorded in
    /// the corresponding result.
    pub fn solve_sequence(&mut self, queries: &[Query]) -> Vec<PlanResult> {
        Planner::solve_sequence(self, queries)
    }

    /// Cross-query state of the session.
    pub fn snapshot(&self) -> Snapshot {
        let store = self.approx.store();
        let coords = |id: StateId| store.coords(id).to_vec();
        Snapshot {
            buffer: self.approx.buffer().states().iter().map(|&id| coords(id)).collect(),
            valid: pairs(&self.approx, ValidationStatus::Valid),
            invalid: pairs(&self.approx, ValidationStatus::Invalid),
            keep: self.approx.keep_buffer().iter().map(|id| id.0).collect(),
            states: (0..store.len() as u32).map(|i| coords(StateId(i))).collect(),
        }
    }

    /// Rebuilds a session from a snapshot. Fresh samples are drawn from a
    /// stream derived from the seed and the buffer length, so they do not
    /// repeat the snapshot's samples.
    pub fn restore(scenario: Scenario, config: PlannerConfig, snapshot: &Snapshot) -> Result<Self, PlanError> {
        config.validate()?;
        let dim = scenario.dim();
        let seed = config
            .seed
            .wrapping_add((snapshot.buffer.len() as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
        let mut approx = Approximation::new(scenario, config.batch_config(), config.sparse_factor, seed);
        let mut by_coords: HashMap<Vec<u64>, StateId> = HashMap::new();
        for p in &snapshot.states {
            if p.len() != dim {
                return Err(PlanError::Snapshot(format!("state {p:?} has the wrong dimension")));
            }
            let id = approx.store_mut().intern(p);
            by_coords.entry(p.iter().map(|x| x.to_bits()).collect()).or_insert(id);
        }
        let n = snapshot.states.len() as u32;
        let lookup = |id: u32| -> Result<StateId, PlanError> {
            if id < n {
                Ok(StateId(id))
            } else {
                Err(PlanError::Snapshot(format!("unknown state id {id}")))
            }
        };
        let mut buffer = Vec::with_capacity(snapshot.buffer.len());
        for p in &snapshot.buffer {
            let key: Vec<u64> = p.iter().map(|x| x.to_bits()).collect();
            let id = by_coords
                .get(&key)
                .ok_or_else(|| PlanError::Snapshot(format!("buffer state {p:?} is not a known state")))?;
            buffer.push(*id);
        }
        let keep = snapshot.keep.iter().map(|&i| lookup(i)).collect::<Result<Vec<_>, _>>()?;
        let resolution = approx.scenario().resolution();
        for (list, status) in [
            (&snapshot.valid, ValidationStatus::Valid),
            (&snapshot.invalid, ValidationStatus::Invalid),
        ] {
            for &[a, b] in list {
                let (a, b) = (lookup(a)?, lookup(b)?);
                if a == b {
                    return Err(PlanError::Snapshot(format!("self-loop at {a}")));
                }
                let length = crate::space::distance(approx.store().coords(a), approx.store().coords(b));
                let edge = approx
                    .registry_mut()
                    .get_or_insert(a, b, length, grid_points(length, resolution));
                approx
                    .registry_mut()
                    .record(edge, status)
                    .map_err(|e| PlanError::Snapshot(e.to_string()))?;
            }
        }
        approx.restore_parts(buffer, keep);
        Ok(Session {
            config,
            approx,
            events: None,
        })
    }
}

fn pairs(approx: &Approximation, status: ValidationStatus) -> Vec<[u32; 2]> {
    approx
        .registry()
        .edges_with(status)
        .into_iter()
        .map(|(a, b)| [a.0, b.0])
        .collect()
}

impl Planner for Session {
    fn name(&self) -> &str {
        if self.config.eit_like {
            "eit"
        } else {
            "eirm"
        }
    }

    fn plan_query(&mut self, query: &Query) -> Result<PlanResult, PlanError> {
        Session::plan_query(self, query)
    }
}

/// Serializable cross-query state of a session.
///
/// `states` lists the coordinates of every state id the other fields refer
/// to, in id order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    pub buffer: Vec<Vec<f64>>,
    pub valid: Vec<[u32; 2]>,
    pub invalid: Vec<[u32; 2]>,
    pub keep: Vec<u32>,
    pub states: Vec<Vec<f64>>,
}

impl Snapshot {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("snapshot serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, PlanError> {
        serde_json::from_str(text).map_err(|e| PlanError::Snapshot(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn empty() -> Scenario {
        Scenario::empty(2, -0.5, 0.5, 1e-4).unwrap()
    }

    fn query(budget: Budget) -> Query {
        Query::new(vec![-0.4, 0.0], vec![vec![0.4, 0.0]], budget)
    }

    #[test]
    fn default_configuration() {
        let c = PlannerConfig::default();
        assert_eq!(c.batch_size, 100);
        assert_eq!(c.prune_threshold, 50_000);
        assert_eq!(c.sparse_factor, 100);
        assert_eq!(c.w_after_solution, 1.0);
        assert!(c.validate().is_ok());
        assert!(PlannerConfig::eit_like().eit_like);
    }

    #[test]
    fn invalid_configurations_are_rejected() {
        for c in [
            PlannerConfig { batch_size: 0, ..Default::default() },
            PlannerConfig { knn_scale: 0.5, ..Default::default() },
            PlannerConfig { sparse_factor: 0, ..Default::default() },
            PlannerConfig { w_after_solution: 0.9, ..Default::default() },
            PlannerConfig { max_batches: Some(0), ..Default::default() },
        ] {
            assert!(c.validate().is_err());
            assert!(Session::new(empty(), c).is_err());
        }
    }

    #[test]
    fn invalid_queries_leave_the_session_untouched() {
        let sc = Scenario::new(2, vec![[0.0, 1.0]; 2], vec![vec![[0.4, 0.6], [0.4, 0.6]]], 1e-3).unwrap();
        let mut s = Session::new(sc, PlannerConfig::default()).unwrap();
        let bad = [
            Query::new(vec![0.5, 0.5], vec![vec![0.9, 0.9]], Budget::Iterations(10)),
            Query::new(vec![0.1, 0.1], vec![], Budget::Iterations(10)),
            Query::new(vec![0.1, 0.1], vec![vec![0.9, 0.9]], Budget::Iterations(0)),
            Query::new(vec![0.1], vec![vec![0.9, 0.9]], Budget::Iterations(10)),
            Query::new(vec![0.1, 0.1], vec![vec![1.9, 0.9]], Budget::Iterations(10)),
        ];
        for q in &bad {
            assert!(matches!(s.plan_query(q), Err(PlanError::InvalidQuery(_))), "{q:?}");
        }
        assert_eq!(s.approximation().store().len(), 0);
        assert!(s.approximation().buffer().is_empty());
    }

    #[test]
    fn solves_a_free_space_query() {
        let mut s = Session::new(empty(), PlannerConfig::default()).unwrap();
        let r = s.plan_query(&query(Budget::Iterations(20_000))).unwrap();
        assert!(r.solved());
        assert!(r.c_final >= 0.8);
        assert!(r.c_final <= r.c_init);
        let path = r.path.unwrap();
        assert_eq!(path.first().unwrap(), &vec![-0.4, 0.0]);
        assert_eq!(path.last().unwrap(), &vec![0.4, 0.0]);
        assert_eq!(r.batches_before_init, 1);
        assert!(r.graph_size_at_init <= 102);
    }

    #[test]
    fn enclosed_start_has_no_solution() {
        let sc = Scenario::new(
            2,
            vec![[0.0, 1.0]; 2],
            vec![
                vec![[0.0, 0.3], [0.3, 0.35]],
                vec![[0.3, 0.35], [0.0, 0.35]],
            ],
            1e-3,
        )
        .unwrap();
        let mut s = Session::new(sc, PlannerConfig::default()).unwrap();
        let q = Query::new(vec![0.1, 0.1], vec![vec![0.9, 0.9]], Budget::Iterations(3000));
        let r = s.plan_query(&q).unwrap();
        assert_eq!(r.status, PlanStatus::NoSolution);
        assert_eq!((r.t_init, r.c_init, r.c_final), (f64::INFINITY, f64::INFINITY, f64::INFINITY));
        assert!(r.path.is_none());
        // the session carries on
        let q2 = Query::new(vec![0.5, 0.5], vec![vec![0.9, 0.9]], Budget::Iterations(3000));
        assert!(s.plan_query(&q2).unwrap().solved());
    }

    #[test]
    fn initial_only_stops_at_first_solution() {
        let cfg = PlannerConfig { initial_only: true, ..Default::default() };
        let mut s = Session::new(empty(), cfg).unwrap();
        let r = s.plan_query(&query(Budget::Iterations(20_000))).unwrap();
        assert!(r.solved());
        assert_eq!(r.c_init, r.c_final);
        assert!(r.iterations as f64 == r.t_init);
    }

    #[test]
    fn events_report_solutions_and_batches() {
        use std::sync::{Arc, Mutex};
        let log = Arc::new(Mutex::new(Vec::new()));
        let sink = Arc::clone(&log);
        let mut s = Session::new(empty(), PlannerConfig::default()).unwrap();
        s.set_event_handler(Box::new(move |e| sink.lock().unwrap().push(e.clone())));
        let r = s.plan_query(&query(Budget::Iterations(5000))).unwrap();
        let log = log.lock().unwrap();
        assert!(matches!(&log[0], PlanEvent::BatchAdded { states, c_best } if states.len() == 100 && c_best.is_infinite()));
        let costs: Vec<f64> = log
            .iter()
            .filter_map(|e| match e {
                PlanEvent::SolutionFound { cost, .. } => Some(*cost),
                _ => None,
            })
            .collect();
        assert_eq!(costs.first(), Some(&r.c_init));
        assert_eq!(costs.last(), Some(&r.c_final));
        assert!(costs.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn snapshot_round_trip_preserves_knowledge() {
        let mut s = Session::new(empty(), PlannerConfig::default()).unwrap();
        s.plan_query(&query(Budget::Iterations(3000))).unwrap();
        let snap = s.snapshot();
        let text = snap.to_json();
        let back = Snapshot::from_json(&text).unwrap();
        assert_eq!(back, snap);
        let restored = Session::restore(empty(), PlannerConfig::default(), &back).unwrap();
        let again = restored.snapshot();
        assert_eq!(again.states, snap.states);
        assert_eq!(again.buffer, snap.buffer);
        assert_eq!(again.keep, snap.keep);
        assert_eq!(again.invalid, snap.invalid);
        assert_eq!(again.valid, snap.valid);
        assert!(Snapshot::from_json("{\"buffer\": 3}").is_err());
        let mut broken = snap.clone();
        broken.keep.push(u32::MAX);
        assert!(Session::restore(empty(), PlannerConfig::default(), &broken).is_err());
    }
}
