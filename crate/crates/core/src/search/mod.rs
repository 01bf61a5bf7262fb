//! Asymmetric bidirectional search over the current approximation.
//!
//! A reverse search from the goals sparsely checks edges and computes cost and
//! effort heuristics. It is ordered by estimated validation effort until the
//! query has a solution and by cost afterwards. A forward search from the start
//! fully checks edges, guided by those heuristics, and maintains a tree of
//! validated edges whose best goal connection is the current solution.

mod keys;
mod queues;

use std::fmt;

use crate::approximation::{Approximation, EdgeId, Neighbor};
use crate::error::{ApproximationError, PlanError};
use crate::space::{distance, ValidationStatus};

pub use keys::{Mode, SearchKey};
pub use queues::{ForwardMinima, ForwardQueue, FwdEntry, ReverseQueue, RevEntry};

const NONE: u32 = u32::MAX;

/// Estimate of the effort to come from the start to a state, `d̄`.
#[derive(Clone, Copy, Default)]
pub enum EffortToCome {
    /// The zero heuristic.
    #[default]
    Zero,
    /// Called with the start and the state coordinates.
    Custom(fn(&[f64], &[f64]) -> u64),
}

impl EffortToCome {
    fn eval(&self, start: &[f64], x: &[f64]) -> u64 {
        match self {
            EffortToCome::Zero => 0,
            EffortToCome::Custom(f) => f(start, x),
        }
    }
}

impl fmt::Debug for EffortToCome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EffortToCome::Zero => f.write_str("Zero"),
            EffortToCome::Custom(_) => f.write_str("Custom"),
        }
    }
}

impl PartialEq for EffortToCome {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (EffortToCome::Zero, EffortToCome::Zero) => true,
            (EffortToCome::Custom(a), EffortToCome::Custom(b)) => std::ptr::fn_addr_eq(*a, *b),
            _ => false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchConfig {
    /// Suboptimality factor once the query has a solution, at least 1.
    pub w_after_solution: f64,
    pub effort_to_come: EffortToCome,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            w_after_solution: 1.0,
            effort_to_come: EffortToCome::Zero,
        }
    }
}

/// What one forward iteration did.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ForwardOutcome {
    /// The edge could not improve the tree or the solution and was dropped.
    Discarded,
    /// A tree edge was re-expanded without any check.
    Reexpanded,
    /// The edge was validated and the tree improved.
    Extended,
    /// The full check failed; the reverse search was restarted.
    Collision,
    /// The tree improved and with it the best solution.
    Improved(f64),
}

/// One iteration of the main loop.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Step {
    Reverse,
    Forward(ForwardOutcome),
    /// Neither search can improve the solution on the current approximation.
    Exhausted,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SearchStats {
    pub reverse_iterations: u64,
    pub forward_iterations: u64,
    pub restarts: u64,
    pub forward_collisions: u64,
}

/// Labels and queues of one query.
///
/// Vertices are addressed by their local index in the approximation's active
/// set. The start is local 0 and the goals follow it.
#[derive(Debug, Clone)]
pub struct Search {
    config: SearchConfig,
    start: u32,
    goals: Vec<u32>,
    is_goal: Vec<bool>,
    // reverse labels
    h_hat: Vec<f64>,
    h_bar: Vec<f64>,
    e_bar: Vec<u64>,
    version: Vec<u32>,
    // per-query priors
    g_hat: Vec<f64>,
    d_bar: Vec<u64>,
    // forward tree
    g: Vec<f64>,
    parent: Vec<u32>,
    parent_cost: Vec<f64>,
    children: Vec<Vec<u32>>,
    rev: ReverseQueue,
    fwd: ForwardQueue,
    w: f64,
    c_curr: f64,
    scratch: Vec<Neighbor>,
    stats: SearchStats,
    trace: Option<Vec<(Mode, SearchKey)>>,
}

impl Search {
    /// Labels the active set of `approx` and seeds both queues.
    pub fn new(config: SearchConfig, approx: &mut Approximation, start: u32, goals: &[u32]) -> Self {
        let mut s = Search {
            config,
            start,
            goals: goals.to_vec(),
            is_goal: Vec::new(),
            h_hat: Vec::new(),
            h_bar: Vec::new(),
            e_bar: Vec::new(),
            version: Vec::new(),
            g_hat: Vec::new(),
            d_bar: Vec::new(),
            g: Vec::new(),
            parent: Vec::new(),
            parent_cost: Vec::new(),
            children: Vec::new(),
            rev: ReverseQueue::new(Mode::Effort),
            fwd: ForwardQueue::default(),
            w: f64::INFINITY,
            c_curr: f64::INFINITY,
            scratch: Vec::new(),
            stats: SearchStats::default(),
            trace: None,
        };
        s.grow(approx);
        s.g[start as usize] = 0.0;
        s.seed(approx);
        s
    }

    pub fn w(&self) -> f64 {
        self.w
    }

    pub fn mode(&self) -> Mode {
        Mode::for_inflation(self.w)
    }

    /// Best solution cost of the query so far.
    pub fn c_curr(&self) -> f64 {
        self.c_curr
    }

    pub fn stats(&self) -> SearchStats {
        self.stats
    }

    pub fn start(&self) -> u32 {
        self.start
    }

    pub fn goals(&self) -> &[u32] {
        &self.goals
    }

    pub fn h_hat(&self, x: u32) -> f64 {
        self.h_hat[x as usize]
    }

    pub fn h_bar(&self, x: u32) -> f64 {
        self.h_bar[x as usize]
    }

    pub fn e_bar(&self, x: u32) -> u64 {
        self.e_bar[x as usize]
    }

    /// Forward cost-to-come.
    pub fn g(&self, x: u32) -> f64 {
        self.g[x as usize]
    }

    pub fn parent(&self, x: u32) -> Option<u32> {
        let p = self.parent[x as usize];
        (p != NONE).then_some(p)
    }

    pub fn reverse_queue(&self) -> &ReverseQueue {
        &self.rev
    }

    pub fn forward_queue(&self) -> &ForwardQueue {
        &self.fwd
    }

    /// Records the key of every processed reverse edge from now on.
    pub fn enable_trace(&mut self) {
        self.trace = Some(Vec::new());
    }

    pub fn trace(&self) -> &[(Mode, SearchKey)] {
        self.trace.as_deref().unwrap_or(&[])
    }

    /// Extends the labels to newly activated vertices.
    pub fn grow(&mut self, approx: &Approximation) {
        let n = approx.active_len();
        let old = self.h_hat.len();
        if n <= old {
            return;
        }
        let start = approx.coords_local(self.start).to_vec();
        self.h_hat.resize(n, f64::INFINITY);
        self.h_bar.resize(n, f64::INFINITY);
        self.e_bar.resize(n, u64::MAX);
        self.version.resize(n, 0);
        self.g.resize(n, f64::INFINITY);
        self.parent.resize(n, NONE);
        self.parent_cost.resize(n, 0.0);
        self.children.resize_with(n, Vec::new);
        self.is_goal.resize(n, false);
        for &goal in &self.goals {
            self.is_goal[goal as usize] = true;
        }
        for x in old..n {
            let p = approx.coords_local(x as u32);
            self.g_hat.push(distance(&start, p));
            self.d_bar.push(self.config.effort_to_come.eval(&start, p));
        }
        self.fwd.grow(n);
    }

    /// Discards the reverse search and reseeds both queues from the start and
    /// the goals. The forward tree is kept: all its edges are validated.
    pub fn restart(&mut self, approx: &mut Approximation) {
        self.grow(approx);
        self.stats.restarts += 1;
        self.h_hat.fill(f64::INFINITY);
        self.h_bar.fill(f64::INFINITY);
        self.e_bar.fill(u64::MAX);
        for v in &mut self.version {
            *v = v.wrapping_add(1);
        }
        self.seed(approx);
    }

    fn seed(&mut self, approx: &mut Approximation) {
        self.rev = ReverseQueue::new(self.mode());
        self.fwd.clear();
        for i in 0..self.goals.len() {
            let goal = self.goals[i] as usize;
            self.h_hat[goal] = 0.0;
            self.h_bar[goal] = 0.0;
            self.e_bar[goal] = 0;
        }
        for i in 0..self.goals.len() {
            self.push_reverse(approx, self.goals[i]);
        }
        self.push_forward(approx, self.start);
    }

    fn push_reverse(&mut self, approx: &mut Approximation, s: u32) {
        self.scratch.clear();
        approx.expand(s, &mut self.scratch);
        let su = s as usize;
        for n in &self.scratch {
            let t = n.local as usize;
            if self.is_goal[t] {
                continue;
            }
            let Some(edge_effort) = approx.edge_effort(n.edge) else {
                continue;
            };
            let key = SearchKey::new(
                self.e_bar[su]
                    .saturating_add(edge_effort)
                    .saturating_add(self.d_bar[t]),
                self.h_hat[su] + approx.edge(n.edge).length + self.g_hat[t],
            );
            self.rev.push(RevEntry {
                key,
                mode: self.rev.mode(),
                src: s,
                dst: n.local,
                src_id: approx.id_of(s),
                dst_id: approx.id_of(n.local),
                edge: n.edge,
                edge_effort,
                version: self.version[su],
            });
        }
    }

    fn push_forward(&mut self, approx: &mut Approximation, s: u32) {
        self.scratch.clear();
        approx.expand(s, &mut self.scratch);
        for i in 0..self.scratch.len() {
            let n = self.scratch[i];
            if n.local == self.start {
                continue;
            }
            let entry = FwdEntry {
                src: s,
                dst: n.local,
                src_id: approx.id_of(s),
                dst_id: approx.id_of(n.local),
                edge: n.edge,
                cost: approx.edge(n.edge).length,
            };
            if self.fwd.push(entry).is_some() {
                if let Some(key) = self.forward_key(approx, &entry) {
                    self.fwd.lower_minima(key);
                }
            }
        }
    }

    /// Forward key of an entry: `(ē(s,t) + ē[t], g(s) + ĉ(s,t) + ĥ[t])`;
    /// `None` for an invalid edge.
    fn forward_key(&self, approx: &Approximation, e: &FwdEntry) -> Option<SearchKey> {
        let effort = approx.edge_effort(e.edge)?;
        let t = e.dst as usize;
        Some(SearchKey::new(
            effort.saturating_add(self.e_bar[t]),
            self.g[e.src as usize] + e.cost + self.h_hat[t],
        ))
    }

    /// `g(s) + ĉ(s,t) + ĥ[t]` and `g(s) + c̄(s,t) + h̄[t]`.
    fn forward_totals(&self, e: &FwdEntry) -> (f64, f64) {
        let base = self.g[e.src as usize] + e.cost;
        (base + self.h_hat[e.dst as usize], base + self.h_bar[e.dst as usize])
    }

    /// A queued forward edge that can never be processed usefully.
    fn forward_dead(&self, approx: &Approximation, e: &FwdEntry) -> bool {
        if approx.edge_status(e.edge).is_invalid() {
            return true;
        }
        let (s, t) = (e.src as usize, e.dst as usize);
        self.parent[t] != e.src && self.g[s] + e.cost >= self.g[t]
    }

    fn lower_forward_edge(&mut self, approx: &Approximation, a: u32, b: u32) {
        for (s, t) in [(a, b), (b, a)] {
            if let Some(slot) = self.fwd.slot(s, t) {
                let e = *self.fwd.get(slot).expect("slot is occupied");
                if let Some(key) = self.forward_key(approx, &e) {
                    self.fwd.lower_minima(key);
                }
            }
        }
    }

    fn drop_forward_edge(&mut self, a: u32, b: u32) {
        for (s, t) in [(a, b), (b, a)] {
            if let Some(slot) = self.fwd.slot(s, t) {
                self.fwd.remove(slot);
            }
        }
    }

    /// Exact minima of the forward keys, dropping dead entries on recompute.
    pub fn forward_minima(&mut self, approx: &Approximation) -> ForwardMinima {
        if let Some(m) = self.fwd.minima() {
            return m;
        }
        let mut minima = ForwardMinima::EMPTY;
        let mut dead = Vec::new();
        for (slot, e) in self.fwd.iter() {
            if self.forward_dead(approx, e) {
                dead.push(slot);
                continue;
            }
            if let Some(key) = self.forward_key(approx, e) {
                minima.merge(key);
            }
        }
        for slot in dead {
            self.fwd.remove(slot);
        }
        self.fwd.set_minima(minima);
        minima
    }

    fn skip_stale_reverse(&mut self, approx: &Approximation) {
        while let Some(top) = self.rev.peek() {
            let stale = self.version[top.src as usize] != top.version
                || approx.edge_status(top.edge).is_invalid();
            if !stale {
                break;
            }
            self.rev.pop();
        }
    }

    /// Whether the best reverse edge can still improve the heuristics the
    /// forward search relies on.
    ///
    /// Ties go to the reverse search: the reverse edge into the start and the
    /// forward edge out of it always carry equal keys, and the cheap sparse
    /// check should come before the full one.
    pub fn best_rev_edge_improves_sol(&mut self, approx: &Approximation) -> bool {
        self.skip_stale_reverse(approx);
        let Some(top) = self.rev.peek().copied() else {
            return false;
        };
        let mode = self.mode();
        let forward = self.forward_minima(approx).get(mode);
        !forward.lt_in(&top.key, mode)
    }

    /// Whether some forward edge can still improve the current solution.
    pub fn forward_gate(&mut self, approx: &Approximation) -> bool {
        self.forward_minima(approx).cost.cost < self.c_curr
    }

    /// `ŝ`: lower bound on the solution cost over the forward queue.
    pub fn lower_bound_s_hat(&self) -> f64 {
        self.fwd
            .iter()
            .map(|(_, e)| self.forward_totals(e).0)
            .fold(f64::INFINITY, f64::min)
    }

    /// `s̄`: possibly inadmissible solution cost estimate over the forward queue.
    pub fn estimate_s_bar(&self) -> f64 {
        self.fwd
            .iter()
            .map(|(_, e)| self.forward_totals(e).1)
            .fold(f64::INFINITY, f64::min)
    }

    /// The forward edge to process next, as a slot of the forward queue.
    ///
    /// Among edges whose inadmissible total is within `w·ŝ` the one with the
    /// least remaining effort wins; failing that the best inadmissible or
    /// admissible total. Dead entries are dropped on the way.
    pub fn get_best_forward_edge(&mut self, approx: &Approximation) -> Option<usize> {
        let mut dead = Vec::new();
        let mut s_hat = f64::INFINITY;
        let mut best_hat: Option<(f64, f64, usize, &FwdEntry)> = None;
        let mut best_bar: Option<(f64, f64, usize, &FwdEntry)> = None;
        let tie = |a: &(f64, f64, usize, &FwdEntry), b: &(f64, f64, usize, &FwdEntry)| {
            a.0.total_cmp(&b.0)
                .then(a.1.total_cmp(&b.1))
                .then((a.3.src_id, a.3.dst_id).cmp(&(b.3.src_id, b.3.dst_id)))
        };
        for (slot, e) in self.fwd.iter() {
            if self.forward_dead(approx, e) {
                dead.push(slot);
                continue;
            }
            let (f_hat, f_bar) = self.forward_totals(e);
            s_hat = s_hat.min(f_hat);
            let h = (f_hat, f_hat, slot, e);
            if best_hat.as_ref().is_none_or(|b| tie(&h, b).is_lt()) {
                best_hat = Some(h);
            }
            let b = (f_bar, f_hat, slot, e);
            if best_bar.as_ref().is_none_or(|x| tie(&b, x).is_lt()) {
                best_bar = Some(b);
            }
        }
        let bound = if self.w.is_infinite() {
            f64::INFINITY
        } else {
            self.w * s_hat
        };
        let mut focal: Option<(u64, f64, usize, &FwdEntry)> = None;
        for (slot, e) in self.fwd.iter() {
            let (f_hat, f_bar) = self.forward_totals(e);
            if !(f_bar <= bound) || dead.contains(&slot) {
                continue;
            }
            let Some(effort) = approx.edge_effort(e.edge) else {
                continue;
            };
            let c = (effort.saturating_add(self.e_bar[e.dst as usize]), f_hat, slot, e);
            let better = focal.as_ref().is_none_or(|x| {
                c.0.cmp(&x.0)
                    .then(c.1.total_cmp(&x.1))
                    .then((c.3.src_id, c.3.dst_id).cmp(&(x.3.src_id, x.3.dst_id)))
                    .is_lt()
            });
            if better {
                focal = Some(c);
            }
        }
        let s_bar = best_bar.as_ref().map_or(f64::INFINITY, |b| b.0);
        let chosen = match focal {
            Some((_, _, slot, e)) if self.forward_totals(e).1 <= bound => Some(slot),
            _ if s_bar <= bound => best_bar.map(|b| b.2),
            _ => best_hat.map(|b| b.2),
        };
        if !dead.is_empty() {
            for slot in dead {
                self.fwd.remove(slot);
            }
        }
        chosen
    }

    /// Processes the best reverse edge: sparse check, label updates and
    /// expansion of the target when its labels improve.
    pub fn reverse_iterate(&mut self, approx: &mut Approximation) -> Result<(), ApproximationError> {
        self.skip_stale_reverse(approx);
        let Some(entry) = self.rev.pop() else {
            return Ok(());
        };
        self.stats.reverse_iterations += 1;
        if let Some(trace) = self.trace.as_mut() {
            trace.push((entry.mode, entry.key));
        }
        let (s, t) = (entry.src as usize, entry.dst as usize);
        let before = approx.edge_status(entry.edge);
        let status = approx.check_sparse(entry.edge)?;
        if status.is_invalid() {
            self.drop_forward_edge(entry.src, entry.dst);
            return Ok(());
        }
        if status != before {
            self.lower_forward_edge(approx, entry.src, entry.dst);
        }
        let cost = approx.edge(entry.edge).length;
        self.h_bar[t] = self.h_bar[t].min(self.h_bar[s] + cost);
        let effort = self.e_bar[s].saturating_add(entry.edge_effort);
        let improves = if self.w.is_infinite() {
            effort < self.e_bar[t]
        } else {
            self.h_hat[s] + cost < self.h_hat[t]
        };
        if improves {
            self.h_hat[t] = self.h_hat[t].min(self.h_hat[s] + cost);
            self.e_bar[t] = self.e_bar[t].min(effort);
            self.version[t] = self.version[t].wrapping_add(1);
            let slots = self.fwd.targeting(entry.dst).to_vec();
            for slot in slots {
                let e = *self.fwd.get(slot).expect("indexed slot is occupied");
                if let Some(key) = self.forward_key(approx, &e) {
                    self.fwd.lower_minima(key);
                }
            }
            self.push_reverse(approx, entry.dst);
        }
        Ok(())
    }

    /// Processes the best forward edge: full check, tree update and
    /// solution bookkeeping.
    pub fn forward_iterate(&mut self, approx: &mut Approximation) -> Result<ForwardOutcome, ApproximationError> {
        let Some(slot) = self.get_best_forward_edge(approx) else {
            return Ok(ForwardOutcome::Discarded);
        };
        let e = self.fwd.remove(slot).expect("selected slot is occupied");
        self.stats.forward_iterations += 1;
        let (s, t) = (e.src as usize, e.dst as usize);
        let f_hat = self.g[s] + e.cost + self.h_hat[t];
        if self.parent[t] == e.src {
            if f_hat < self.c_curr {
                self.push_forward(approx, e.dst);
                return Ok(ForwardOutcome::Reexpanded);
            }
            return Ok(ForwardOutcome::Discarded);
        }
        if self.g[s] + e.cost >= self.g[t] || f_hat >= self.c_curr {
            return Ok(ForwardOutcome::Discarded);
        }
        let status = approx.check_full(e.edge)?;
        if status == ValidationStatus::Invalid {
            self.stats.forward_collisions += 1;
            self.drop_forward_edge(e.src, e.dst);
            self.restart(approx);
            return Ok(ForwardOutcome::Collision);
        }
        self.rewire(e.dst, e.src, e.cost);
        self.fwd.invalidate_minima();
        self.push_forward(approx, e.dst);
        let best = self
            .goals
            .iter()
            .map(|&x| self.g[x as usize])
            .fold(f64::INFINITY, f64::min);
        if best < self.c_curr {
            self.c_curr = best;
            if self.w.is_infinite() {
                self.w = self.config.w_after_solution;
                // effort-ordered labels are not cost-optimal: recompute them
                self.restart(approx);
            }
            return Ok(ForwardOutcome::Improved(best));
        }
        Ok(ForwardOutcome::Extended)
    }

    /// One iteration of the main loop on the current approximation.
    pub fn step(&mut self, approx: &mut Approximation) -> Result<Step, ApproximationError> {
        if self.best_rev_edge_improves_sol(approx) {
            self.reverse_iterate(approx)?;
            return Ok(Step::Reverse);
        }
        if self.forward_gate(approx) {
            return Ok(Step::Forward(self.forward_iterate(approx)?));
        }
        Ok(Step::Exhausted)
    }

    fn rewire(&mut self, t: u32, s: u32, cost: f64) {
        let tu = t as usize;
        let old = self.parent[tu];
        if old != NONE {
            let siblings = &mut self.children[old as usize];
            if let Some(pos) = siblings.iter().position(|&c| c == t) {
                siblings.swap_remove(pos);
            }
        }
        self.parent[tu] = s;
        self.parent_cost[tu] = cost;
        self.children[s as usize].push(t);
        self.g[tu] = self.g[s as usize] + cost;
        let mut stack = self.children[tu].clone();
        while let Some(x) = stack.pop() {
            let xu = x as usize;
            self.g[xu] = self.g[self.parent[xu] as usize] + self.parent_cost[xu];
            stack.extend_from_slice(&self.children[xu]);
        }
    }

    /// The goal with the cheapest tree connection, if any.
    pub fn best_goal(&self) -> Option<u32> {
        self.goals
            .iter()
            .copied()
            .filter(|&x| self.g[x as usize].is_finite())
            .min_by(|a, b| self.g[*a as usize].total_cmp(&self.g[*b as usize]))
    }

    /// Local indices from the start to `x` along the forward tree.
    pub fn path_to(&self, x: u32) -> Result<Vec<u32>, PlanError> {
        if !self.g[x as usize].is_finite() {
            return Err(PlanError::BrokenTree(format!("vertex {x} is not in the tree")));
        }
        let mut path = vec![x];
        let mut current = x;
        while current != self.start {
            let p = self.parent[current as usize];
            if p == NONE || path.len() > self.parent.len() {
                return Err(PlanError::BrokenTree(format!("no parent chain from {x}")));
            }
            path.push(p);
            current = p;
        }
        path.reverse();
        Ok(path)
    }

    /// Edge of the tree from `x`'s parent to `x`, looked up in the registry.
    pub fn parent_edge(&self, approx: &Approximation, x: u32) -> Option<EdgeId> {
        let p = self.parent(x)?;
        approx.registry().find(approx.id_of(p), approx.id_of(x))
    }
}

#[cfg(test)]
mod tests;
