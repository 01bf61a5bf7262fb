//! Lazy PRM* with a single ever-growing roadmap.
//!
//! Edges are assumed valid until a shortest path uses them. Validity results
//! persist for the lifetime of the planner, but the roadmap is never rewound
//! or pruned, so every query inherits all previous vertices.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::approximation::{knn_count, EdgeId, EdgeRegistry, KdTree, StateStore, MAX_SAMPLE_ATTEMPTS};
use crate::error::{ApproximationError, ConfigError, PlanError};
use crate::planner::{Clock, PlanResult, PlanStatus, Planner, Query};
use crate::space::{distance, grid_points, Scenario, StateId, ValidationStatus};

use super::BaselineConfig;

#[derive(Debug, Clone, Copy, PartialEq)]
struct Open {
    f: f64,
    g: f64,
    vertex: u32,
}

impl Eq for Open {}

impl Ord for Open {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .f
            .total_cmp(&self.f)
            .then_with(|| other.vertex.cmp(&self.vertex))
    }
}

impl PartialOrd for Open {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

pub struct LazyPrmStar {
    scenario: Scenario,
    config: BaselineConfig,
    rng: ChaCha8Rng,
    store: StateStore,
    index: KdTree,
    adjacency: Vec<Vec<(u32, EdgeId)>>,
    registry: EdgeRegistry,
    full_checks: u64,
}

impl LazyPrmStar {
    pub fn new(scenario: Scenario, config: BaselineConfig, seed: u64) -> Result<Self, ConfigError> {
        config.validate()?;
        let dim = scenario.dim();
        Ok(LazyPrmStar {
            scenario,
            config,
            rng: ChaCha8Rng::seed_from_u64(seed),
            store: StateStore::new(dim),
            index: KdTree::new(dim),
            adjacency: Vec::new(),
            registry: EdgeRegistry::new(),
            full_checks: 0,
        })
    }

    /// Vertices in the roadmap.
    pub fn len(&self) -> usize {
        self.adjacency.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adjacency.is_empty()
    }

    pub fn registry(&self) -> &EdgeRegistry {
        &self.registry
    }

    /// Records a validation outcome for the edge between two roadmap points.
    pub fn record(&mut self, a: &[f64], b: &[f64], status: ValidationStatus) -> Result<(), ApproximationError> {
        let (a, b) = (self.add_vertex(a, true), self.add_vertex(b, true));
        let length = distance(self.store.coords(a), self.store.coords(b));
        let edge = self
            .registry
            .get_or_insert(a, b, length, grid_points(length, self.scenario.resolution()));
        self.registry.record(edge, status)
    }

    /// Adds a vertex and connects it to its nearest roadmap vertices.
    fn add_vertex(&mut self, p: &[f64], intern: bool) -> StateId {
        let id = if intern {
            self.store.intern(p)
        } else {
            self.store.push(p)
        };
        if id.index() < self.adjacency.len() {
            return id;
        }
        let n = self.adjacency.len() + 1;
        let k = knn_count(self.config.knn_scale, self.scenario.dim(), n).min(n - 1);
        let near = self.index.nearest(p, k, None);
        let local = self.index.insert(p);
        debug_assert_eq!(local as usize, id.index());
        self.adjacency.push(Vec::with_capacity(k));
        let resolution = self.scenario.resolution();
        for (j, length) in near {
            let other = StateId(j);
            let edge = self
                .registry
                .get_or_insert(id, other, length, grid_points(length, resolution));
            self.adjacency[id.index()].push((j, edge));
            self.adjacency[j as usize].push((local, edge));
        }
        id
    }

    fn add_batch(&mut self) -> Result<(), ApproximationError> {
        let dim = self.scenario.dim();
        let mut p = vec![0.0; dim];
        for _ in 0..self.config.batch_size {
            let mut found = false;
            for _ in 0..MAX_SAMPLE_ATTEMPTS {
                for (x, b) in p.iter_mut().zip(self.scenario.bounds()) {
                    *x = self.rng.gen_range(b[0]..b[1]);
                }
                if self.scenario.point_free(&p) {
                    found = true;
                    break;
                }
            }
            if !found {
                return Err(ApproximationError::SamplerStarved(MAX_SAMPLE_ATTEMPTS));
            }
            let q = p.clone();
            self.add_vertex(&q, false);
        }
        Ok(())
    }

    /// Shortest path over edges not known to be invalid.
    fn shortest_path(&self, start: u32, goals: &[u32]) -> Option<Vec<u32>> {
        let n = self.adjacency.len();
        let goal_points: Vec<&[f64]> = goals.iter().map(|&g| self.index.point(g)).collect();
        let h = |x: u32| {
            let p = self.index.point(x);
            goal_points
                .iter()
                .map(|g| distance(g, p))
                .fold(f64::INFINITY, f64::min)
        };
        let mut g = vec![f64::INFINITY; n];
        let mut parent = vec![u32::MAX; n];
        let mut closed = vec![false; n];
        let mut open = BinaryHeap::new();
        g[start as usize] = 0.0;
        open.push(Open {
            f: h(start),
            g: 0.0,
            vertex: start,
        });
        while let Some(Open { g: gx, vertex: x, .. }) = open.pop() {
            let xu = x as usize;
            if closed[xu] || gx > g[xu] {
                continue;
            }
            closed[xu] = true;
            if goals.contains(&x) {
                let mut path = vec![x];
                let mut c = x;
                while c != start {
                    c = parent[c as usize];
                    path.push(c);
                }
                path.reverse();
                return Some(path);
            }
            for &(y, edge) in &self.adjacency[xu] {
                let r = self.registry.get(edge);
                if r.status.is_invalid() {
                    continue;
                }
                let candidate = gx + r.length;
                if candidate < g[y as usize] {
                    g[y as usize] = candidate;
                    parent[y as usize] = x;
                    open.push(Open {
                        f: candidate + h(y),
                        g: candidate,
                        vertex: y,
                    });
                }
            }
        }
        None
    }

    fn edge_between(&self, a: u32, b: u32) -> EdgeId {
        self.registry
            .find(StateId(a), StateId(b))
            .expect("roadmap edges are registered")
    }

    /// Validates the path's unknown edges from the start; `false` on the
    /// first collision.
    fn validate_path(&mut self, path: &[u32]) -> Result<bool, ApproximationError> {
        for w in path.windows(2) {
            let edge = self.edge_between(w[0], w[1]);
            let r = self.registry.get(edge);
            if r.status.is_valid() {
                continue;
            }
            let (status, checks) = self.scenario.check_edge_full(
                self.store.coords(r.a),
                self.store.coords(r.b),
                r.status,
            );
            self.full_checks += checks;
            self.registry.record(edge, status)?;
            if status.is_invalid() {
                return Ok(false);
            }
        }
        Ok(true)
    }

    fn path_cost(&self, path: &[u32]) -> f64 {
        path.windows(2)
            .map(|w| distance(self.index.point(w[0]), self.index.point(w[1])))
            .sum()
    }
}

impl Planner for LazyPrmStar {
    fn name(&self) -> &str {
        "lazyprmstar"
    }

    fn plan_query(&mut self, query: &Query) -> Result<PlanResult, PlanError> {
        query.validate(&self.scenario)?;
        let mut clock = Clock::start(query.budget);
        let checks0 = self.full_checks;
        let start = self.add_vertex(&query.start, true).0;
        let goals: Vec<u32> = query.goals.iter().map(|g| self.add_vertex(g, true).0).collect();
        let mut result = PlanResult::unsolved(None);
        result.goal_count = goals.len();
        let mut batches = 0;
        while clock.tick() {
            let Some(path) = self.shortest_path(start, &goals) else {
                if let Err(e) = self.add_batch() {
                    result.diagnostic = Some(e.to_string());
                    break;
                }
                batches += 1;
                continue;
            };
            if !self.validate_path(&path)? {
                continue;
            }
            let cost = self.path_cost(&path);
            if cost < result.c_final {
                if !result.solved() {
                    result.status = PlanStatus::Solved;
                    result.t_init = clock.now();
                    result.c_init = cost;
                    result.graph_size_at_init = self.len();
                    result.batches_before_init = batches;
                }
                result.c_final = cost;
                result.path_ids = Some(path.iter().map(|&x| StateId(x)).collect());
                result.path = Some(path.iter().map(|&x| self.index.point(x).to_vec()).collect());
            }
            if self.config.initial_only {
                break;
            }
            if let Err(e) = self.add_batch() {
                result.diagnostic = Some(e.to_string());
                break;
            }
            batches += 1;
        }
        result.batches_used = batches;
        result.full_checks = self.full_checks - checks0;
        result.iterations = clock.iterations();
        Ok(result)
    }
}
