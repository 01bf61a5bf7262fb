//! Batched random geometric graph with replayable samples.
//!
//! The [`Approximation`] owns everything that survives between queries of a
//! session: the ordered sample buffer, the edge registry and the buffer of
//! retained starts and goals. The active vertex set and its k-NN index are
//! rebuilt from scratch at the beginning of every query and then grow batch by
//! batch while the query is being planned.

mod kdtree;
mod registry;

use std::collections::{HashMap, HashSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::ApproximationError;
use crate::space::{distance, grid_points, remaining_effort, Scenario, State, StateId, ValidationStatus};

pub use kdtree::KdTree;
pub use registry::{EdgeId, EdgeRecord, EdgeRegistry};

/// Rejection-sampling attempts per free-space sample before giving up.
pub const MAX_SAMPLE_ATTEMPTS: usize = 10_000;

/// Per-call inspection cap of [`Approximation::refine_approximation`], in batches.
pub const INSPECTION_CAP_BATCHES: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BatchConfig {
    /// Samples per batch.
    pub batch_size: usize,
    /// Scale of the k-nearest connection rule, at least 1.
    pub knn_scale: f64,
    /// Starts and goals whose connection effort exceeds this are retained.
    pub prune_threshold: u64,
}

impl Default for BatchConfig {
    fn default() -> Self {
        BatchConfig {
            batch_size: 100,
            knn_scale: 1.001,
            prune_threshold: 50_000,
        }
    }
}

/// `ceil(scale * e * (1 + 1/dim) * ln(vertices))`, at least 1.
pub fn knn_count(knn_scale: f64, dim: usize, vertices: usize) -> usize {
    if vertices < 2 {
        return 1;
    }
    let k = knn_scale * std::f64::consts::E * (1.0 + 1.0 / dim as f64) * (vertices as f64).ln();
    (k.ceil() as usize).max(1)
}

/// Coordinates of every state known to a session.
#[derive(Debug, Clone)]
pub struct StateStore {
    dim: usize,
    coords: Vec<f64>,
    interned: HashMap<Vec<u64>, StateId>,
}

impl StateStore {
    pub fn new(dim: usize) -> Self {
        StateStore {
            dim,
            coords: Vec::new(),
            interned: HashMap::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn push(&mut self, p: &[f64]) -> StateId {
        debug_assert_eq!(p.len(), self.dim);
        let id = StateId(self.len() as u32);
        self.coords.extend_from_slice(p);
        id
    }

    /// Returns the existing id for bit-identical coordinates or registers a new state.
    pub fn intern(&mut self, p: &[f64]) -> StateId {
        let key: Vec<u64> = p.iter().map(|x| x.to_bits()).collect();
        if let Some(id) = self.interned.get(&key) {
            return *id;
        }
        let id = self.push(p);
        self.interned.insert(key, id);
        id
    }

    #[inline]
    pub fn coords(&self, id: StateId) -> &[f64] {
        let i = id.index() * self.dim;
        &self.coords[i..i + self.dim]
    }

    pub fn state(&self, id: StateId) -> State {
        State::new(id, self.coords(id).to_vec())
    }
}

/// Ordered sample sequence replayed by every query of a session.
#[derive(Debug, Clone, Default)]
pub struct SampleBuffer {
    states: Vec<StateId>,
    cursor: usize,
}

impl SampleBuffer {
    pub fn states(&self) -> &[StateId] {
        &self.states
    }

    pub fn cursor(&self) -> usize {
        self.cursor
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }
}

/// Outcome of one refinement call.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Refinement {
    pub states: Vec<StateId>,
    pub inspected: usize,
    /// The inspection cap was hit before `m` states were accepted.
    pub saturated: bool,
}

/// A candidate edge out of an active vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Neighbor {
    /// Local index of the neighbour in the active set.
    pub local: u32,
    pub edge: EdgeId,
}

#[derive(Debug, Clone, Default)]
struct QueryFrame {
    start: Vec<f64>,
    goals: Vec<Vec<f64>>,
}

impl QueryFrame {
    fn cost_to_come(&self, p: &[f64]) -> f64 {
        distance(&self.start, p)
    }

    fn cost_to_go(&self, p: &[f64]) -> f64 {
        self.goals
            .iter()
            .map(|g| distance(g, p))
            .fold(f64::INFINITY, f64::min)
    }
}

#[derive(Debug, Clone)]
pub struct Approximation {
    scenario: Scenario,
    config: BatchConfig,
    sparse_factor: u32,
    store: StateStore,
    buffer: SampleBuffer,
    registry: EdgeRegistry,
    keep: Vec<StateId>,
    rng: ChaCha8Rng,
    active: Vec<StateId>,
    local: HashMap<StateId, u32>,
    index: KdTree,
    neighbors: Vec<Option<Vec<Neighbor>>>,
    /// Symmetric closure of the k-nearest relation over the active set.
    knn_graph: Option<Vec<Vec<u32>>>,
    frame: QueryFrame,
    full_checks: u64,
    sparse_checks: u64,
}

impl Approximation {
    pub fn new(scenario: Scenario, config: BatchConfig, sparse_factor: u32, seed: u64) -> Self {
        let dim = scenario.dim();
        Approximation {
            scenario,
            config,
            sparse_factor: sparse_factor.max(1),
            store: StateStore::new(dim),
            buffer: SampleBuffer::default(),
            registry: EdgeRegistry::new(),
            keep: Vec::new(),
            rng: ChaCha8Rng::seed_from_u64(seed),
            active: Vec::new(),
            local: HashMap::new(),
            index: KdTree::new(dim),
            neighbors: Vec::new(),
            knn_graph: None,
            frame: QueryFrame::default(),
            full_checks: 0,
            sparse_checks: 0,
        }
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    pub fn config(&self) -> &BatchConfig {
        &self.config
    }

    pub fn store(&self) -> &StateStore {
        &self.store
    }

    pub fn store_mut(&mut self) -> &mut StateStore {
        &mut self.store
    }

    pub fn buffer(&self) -> &SampleBuffer {
        &self.buffer
    }

    pub fn registry(&self) -> &EdgeRegistry {
        &self.registry
    }

    pub fn keep_buffer(&self) -> &[StateId] {
        &self.keep
    }

    pub fn active(&self) -> &[StateId] {
        &self.active
    }

    pub fn active_len(&self) -> usize {
        self.active.len()
    }

    pub fn local_of(&self, id: StateId) -> Option<u32> {
        self.local.get(&id).copied()
    }

    #[inline]
    pub fn id_of(&self, local: u32) -> StateId {
        self.active[local as usize]
    }

    #[inline]
    pub fn coords_local(&self, local: u32) -> &[f64] {
        self.index.point(local)
    }

    /// Cumulative full-resolution point evaluations of this session.
    pub fn full_checks(&self) -> u64 {
        self.full_checks
    }

    /// Cumulative sparse point evaluations of this session.
    pub fn sparse_checks(&self) -> u64 {
        self.sparse_checks
    }

    /// Admissible cost-to-come estimate relative to the current query start.
    pub fn cost_to_come_estimate(&self, p: &[f64]) -> f64 {
        self.frame.cost_to_come(p)
    }

    /// Admissible cost-to-go estimate relative to the current query goals.
    pub fn cost_to_go_estimate(&self, p: &[f64]) -> f64 {
        self.frame.cost_to_go(p)
    }

    /// Drops all cross-query knowledge: buffer, registry and retained states.
    pub fn forget(&mut self) {
        self.buffer = SampleBuffer::default();
        self.registry.clear();
        self.keep.clear();
    }

    pub(crate) fn restore_parts(
        &mut self,
        buffer: Vec<StateId>,
        keep: Vec<StateId>,
    ) {
        self.buffer = SampleBuffer {
            states: buffer,
            cursor: 0,
        };
        self.keep = keep;
    }

    pub(crate) fn registry_mut(&mut self) -> &mut EdgeRegistry {
        &mut self.registry
    }

    /// Number of neighbours per vertex for the current active set.
    pub fn knn_count(&self) -> usize {
        knn_count(self.config.knn_scale, self.scenario.dim(), self.active.len())
            .min(self.active.len().saturating_sub(1))
            .max(1)
    }

    fn sample_valid_uniform(&mut self) -> Result<StateId, ApproximationError> {
        let dim = self.scenario.dim();
        let mut p = vec![0.0; dim];
        for _ in 0..MAX_SAMPLE_ATTEMPTS {
            for (x, b) in p.iter_mut().zip(self.scenario.bounds()) {
                *x = self.rng.gen_range(b[0]..b[1]);
            }
            if self.scenario.point_free(&p) {
                return Ok(self.store.push(&p));
            }
        }
        Err(ApproximationError::SamplerStarved(MAX_SAMPLE_ATTEMPTS))
    }

    /// Walks the buffer from the cursor and returns up to `m` states with
    /// `cost_to_come + cost_to_go < c_best`, sampling fresh states whenever the
    /// cursor runs past the end of the buffer.
    pub fn refine_approximation(
        &mut self,
        c_best: f64,
        m: usize,
    ) -> Result<Refinement, ApproximationError> {
        let cap = INSPECTION_CAP_BATCHES * m.max(1);
        let mut out = Refinement::default();
        while out.states.len() < m {
            if out.inspected >= cap {
                out.saturated = true;
                break;
            }
            if self.buffer.cursor >= self.buffer.states.len() {
                let id = self.sample_valid_uniform()?;
                self.buffer.states.push(id);
            }
            let id = self.buffer.states[self.buffer.cursor];
            self.buffer.cursor += 1;
            out.inspected += 1;
            if self.local.contains_key(&id) {
                continue;
            }
            let p = self.store.coords(id);
            if c_best.is_infinite() || self.frame.cost_to_come(p) + self.frame.cost_to_go(p) < c_best {
                out.states.push(id);
            }
        }
        Ok(out)
    }

    /// Resets the active set for a new query: start, goals, retained states and
    /// the first replayed batch. Registries are left untouched.
    pub fn rewind_for_query(
        &mut self,
        start: StateId,
        goals: &[StateId],
    ) -> Result<Refinement, ApproximationError> {
        for &id in std::iter::once(&start).chain(goals) {
            if !self.scenario.is_state_valid(self.store.coords(id))? {
                return Err(ApproximationError::InvalidState(id));
            }
        }
        self.buffer.cursor = 0;
        self.active.clear();
        self.local.clear();
        self.index.clear();
        self.neighbors.clear();
        self.frame = QueryFrame {
            start: self.store.coords(start).to_vec(),
            goals: goals.iter().map(|g| self.store.coords(*g).to_vec()).collect(),
        };
        let mut initial = vec![start];
        initial.extend_from_slice(goals);
        initial.extend_from_slice(&self.keep.clone());
        self.insert_active(&initial);
        let batch = self.refine_approximation(f64::INFINITY, self.config.batch_size)?;
        self.insert_active(&batch.states);
        Ok(batch)
    }

    /// Adds states to the active set (duplicates are ignored).
    pub fn insert_active(&mut self, states: &[StateId]) {
        for &id in states {
            if self.local.contains_key(&id) {
                continue;
            }
            let local = self.active.len() as u32;
            self.active.push(id);
            self.local.insert(id, local);
            let inserted = self.index.insert(self.store.coords(id));
            debug_assert_eq!(inserted, local);
        }
        // k and the neighbour sets change with the vertex count
        self.neighbors.clear();
        self.neighbors.resize(self.active.len(), None);
        self.knn_graph = None;
    }

    /// Refines with `c_best` and activates the returned states.
    pub fn add_batch(&mut self, c_best: f64) -> Result<Refinement, ApproximationError> {
        let batch = self.refine_approximation(c_best, self.config.batch_size)?;
        self.insert_active(&batch.states);
        Ok(batch)
    }

    /// Candidate edges out of an active vertex: every active vertex that is
    /// among its k nearest or has it among theirs, plus every active vertex it
    /// shares a validated edge with, minus edges known to be invalid.
    pub fn expand(&mut self, local: u32, out: &mut Vec<Neighbor>) {
        if self.neighbors[local as usize].is_none() {
            let list = self.compute_neighbors(local);
            self.neighbors[local as usize] = Some(list);
        }
        let list = self.neighbors[local as usize].as_ref().expect("cached above");
        out.extend(
            list.iter()
                .filter(|n| !self.registry.status(n.edge).is_invalid())
                .copied(),
        );
    }

    /// Builds the undirected k-nearest graph of the active set. Both searches
    /// walk the same edges, in opposite directions.
    fn build_knn_graph(&self) -> Vec<Vec<u32>> {
        let k = self.knn_count();
        let n = self.active.len();
        let mut graph: Vec<Vec<u32>> = vec![Vec::with_capacity(k); n];
        for x in 0..n as u32 {
            for (y, _) in self.index.nearest(self.index.point(x), k, Some(x)) {
                graph[x as usize].push(y);
                graph[y as usize].push(x);
            }
        }
        for list in &mut graph {
            list.sort_unstable();
            list.dedup();
        }
        graph
    }

    fn compute_neighbors(&mut self, local: u32) -> Vec<Neighbor> {
        if self.knn_graph.is_none() {
            self.knn_graph = Some(self.build_knn_graph());
        }
        let id = self.active[local as usize];
        let mut locals = self.knn_graph.as_ref().expect("built above")[local as usize].clone();
        for partner in self.registry.valid_partners(id) {
            if let Some(&j) = self.local.get(partner) {
                if j != local && !locals.contains(&j) {
                    locals.push(j);
                }
            }
        }
        let resolution = self.scenario.resolution();
        locals
            .into_iter()
            .filter(|&j| self.active[j as usize] != id)
            .map(|j| {
                let other = self.active[j as usize];
                let length = distance(self.index.point(local), self.index.point(j));
                let edge = self
                    .registry
                    .get_or_insert(id, other, length, grid_points(length, resolution));
                Neighbor { local: j, edge }
            })
            .collect()
    }

    #[inline]
    pub fn edge(&self, edge: EdgeId) -> &EdgeRecord {
        self.registry.get(edge)
    }

    #[inline]
    pub fn edge_status(&self, edge: EdgeId) -> ValidationStatus {
        self.registry.status(edge)
    }

    /// Remaining validation effort; `None` for invalid edges.
    #[inline]
    pub fn edge_effort(&self, edge: EdgeId) -> Option<u64> {
        let r = self.registry.get(edge);
        if r.status.is_invalid() {
            None
        } else {
            Some(remaining_effort(r.points, r.status))
        }
    }

    pub fn record_edge_status(
        &mut self,
        edge: EdgeId,
        status: ValidationStatus,
    ) -> Result<(), ApproximationError> {
        let was_valid = self.registry.status(edge).is_valid();
        self.registry.record(edge, status)?;
        if status.is_valid() && !was_valid {
            let r = self.registry.get(edge);
            let (a, b) = (r.a, r.b);
            for id in [a, b] {
                if let Some(&l) = self.local.get(&id) {
                    self.neighbors[l as usize] = None;
                }
            }
        }
        Ok(())
    }

    /// Sparse check of a registered edge; the outcome is recorded.
    pub fn check_sparse(&mut self, edge: EdgeId) -> Result<ValidationStatus, ApproximationError> {
        let r = self.registry.get(edge);
        let (status, checks) = self.scenario.check_edge_sparse(
            self.store.coords(r.a),
            self.store.coords(r.b),
            r.status,
            self.sparse_factor,
        );
        self.sparse_checks += checks;
        self.record_edge_status(edge, status)?;
        Ok(self.registry.status(edge))
    }

    /// Full-resolution check of a registered edge; the outcome is recorded.
    pub fn check_full(&mut self, edge: EdgeId) -> Result<ValidationStatus, ApproximationError> {
        let r = self.registry.get(edge);
        let (status, checks) = self.scenario.check_edge_full(
            self.store.coords(r.a),
            self.store.coords(r.b),
            r.status,
        );
        self.full_checks += checks;
        self.record_edge_status(edge, status)?;
        Ok(status)
    }

    /// Decides which of this query's start and goals are retained for later
    /// queries. A state is kept when validating an edge to its nearest other
    /// active vertex would take more than the prune threshold. Returns the
    /// members of `{start} ∪ goals` that are retained after the call.
    pub fn finish_query_prune(&mut self, start: StateId, goals: &[StateId]) -> Vec<StateId> {
        let resolution = self.scenario.resolution();
        let mut kept = Vec::new();
        let known: HashSet<StateId> = self.keep.iter().copied().collect();
        let mut candidates = vec![start];
        candidates.extend_from_slice(goals);
        for id in candidates {
            if kept.contains(&id) {
                continue;
            }
            if known.contains(&id) {
                kept.push(id);
                continue;
            }
            let Some(local) = self.local_of(id) else {
                continue;
            };
            let Some(d) = self.index.nearest_distance(self.index.point(local), Some(local)) else {
                continue;
            };
            if grid_points(d, resolution) > self.config.prune_threshold {
                self.keep.push(id);
                kept.push(id);
            }
        }
        kept
    }
}
