//! Bidirectional RRT with a greedy connect step.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::approximation::KdTree;
use crate::error::{ConfigError, PlanError};
use crate::planner::{Clock, PlanResult, PlanStatus, Planner, Query};
use crate::space::{distance, Scenario, ValidationStatus};

use super::BaselineConfig;

struct Tree {
    index: KdTree,
    parent: Vec<u32>,
}

impl Tree {
    fn new(dim: usize) -> Self {
        Tree {
            index: KdTree::new(dim),
            parent: Vec::new(),
        }
    }

    fn add(&mut self, p: &[f64], parent: u32) -> u32 {
        self.parent.push(parent);
        self.index.insert(p)
    }

    fn nearest(&self, p: &[f64]) -> u32 {
        self.index.nearest(p, 1, None)[0].0
    }

    /// Points from the root to `x`.
    fn branch(&self, mut x: u32) -> Vec<Vec<f64>> {
        let mut out = vec![self.index.point(x).to_vec()];
        while self.parent[x as usize] != x {
            x = self.parent[x as usize];
            out.push(self.index.point(x).to_vec());
        }
        out.reverse();
        out
    }
}

enum Extend {
    Trapped,
    Advanced(u32),
    Reached(u32),
}

/// Single-query planner: every query starts from empty trees.
pub struct RrtConnect {
    scenario: Scenario,
    config: BaselineConfig,
    rng: ChaCha8Rng,
    full_checks: u64,
}

impl RrtConnect {
    pub fn new(scenario: Scenario, config: BaselineConfig, seed: u64) -> Result<Self, ConfigError> {
        config.validate()?;
        Ok(RrtConnect {
            scenario,
            config,
            rng: ChaCha8Rng::seed_from_u64(seed),
            full_checks: 0,
        })
    }

    fn steer(&self, from: &[f64], to: &[f64]) -> Vec<f64> {
        let d = distance(from, to);
        if d <= self.config.max_edge_length {
            return to.to_vec();
        }
        let t = self.config.max_edge_length / d;
        from.iter().zip(to).map(|(a, b)| a + t * (b - a)).collect()
    }

    fn motion_valid(&mut self, a: &[f64], b: &[f64]) -> bool {
        let (status, checks) = self.scenario.check_edge_full(a, b, ValidationStatus::Unknown);
        self.full_checks += checks;
        status == ValidationStatus::Valid
    }

    fn extend(&mut self, tree: &mut Tree, target: &[f64]) -> Extend {
        let near = tree.nearest(target);
        let from = tree.index.point(near).to_vec();
        let new = self.steer(&from, target);
        if !self.motion_valid(&from, &new) {
            return Extend::Trapped;
        }
        let id = tree.add(&new, near);
        if new.as_slice() == target {
            Extend::Reached(id)
        } else {
            Extend::Advanced(id)
        }
    }

    fn connect(&mut self, tree: &mut Tree, target: &[f64]) -> Option<u32> {
        loop {
            match self.extend(tree, target) {
                Extend::Trapped => return None,
                Extend::Reached(id) => return Some(id),
                Extend::Advanced(_) => {}
            }
        }
    }

    fn sample(&mut self, goals: &[Vec<f64>]) -> Vec<f64> {
        if self.config.goal_bias > 0.0 && self.rng.gen::<f64>() < self.config.goal_bias {
            return goals[self.rng.gen_range(0..goals.len())].clone();
        }
        self.scenario
            .bounds()
            .iter()
            .map(|b| self.rng.gen_range(b[0]..b[1]))
            .collect()
    }
}

impl Planner for RrtConnect {
    fn name(&self) -> &str {
        "rrtconnect"
    }

    fn plan_query(&mut self, query: &Query) -> Result<PlanResult, PlanError> {
        query.validate(&self.scenario)?;
        let dim = self.scenario.dim();
        let mut clock = Clock::start(query.budget);
        let checks0 = self.full_checks;
        let mut start_tree = Tree::new(dim);
        start_tree.add(&query.start, 0);
        let mut goal_tree = Tree::new(dim);
        for (i, g) in query.goals.iter().enumerate() {
            goal_tree.add(g, i as u32);
        }
        let mut result = PlanResult::unsolved(None);
        result.goal_count = query.goals.len();
        let mut forward = true;
        while clock.tick() {
            let q = self.sample(&query.goals);
            let (a, b) = if forward {
                (&mut start_tree, &mut goal_tree)
            } else {
                (&mut goal_tree, &mut start_tree)
            };
            let new = match self.extend(a, &q) {
                Extend::Trapped => None,
                Extend::Advanced(id) | Extend::Reached(id) => Some(id),
            };
            if let Some(new) = new {
                let p = a.index.point(new).to_vec();
                if let Some(joint) = self.connect(b, &p) {
                    let (s_end, g_end) = if forward { (new, joint) } else { (joint, new) };
                    let mut path = start_tree.branch(s_end);
                    let mut tail = goal_tree.branch(g_end);
                    tail.reverse();
                    // both branches end in the same point
                    path.extend(tail.into_iter().skip(1));
                    let cost: f64 = path.windows(2).map(|w| distance(&w[0], &w[1])).sum();
                    result.status = PlanStatus::Solved;
                    result.t_init = clock.now();
                    result.c_init = cost;
                    result.c_final = cost;
                    result.graph_size_at_init = start_tree.parent.len() + goal_tree.parent.len();
                    result.path = Some(path);
                    break;
                }
            }
            forward = !forward;
        }
        result.full_checks = self.full_checks - checks0;
        result.iterations = clock.iterations();
        Ok(result)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::planner::Budget;

    #[test]
    fn solves_free_space() {
        let sc = Scenario::empty(2, -0.5, 0.5, 1e-3).unwrap();
        let mut p = RrtConnect::new(sc, BaselineConfig::for_dimension(2), 1).unwrap();
        let q = Query::new(vec![-0.4, 0.0], vec![vec![0.4, 0.0]], Budget::Iterations(1000));
        let r = p.plan_query(&q).unwrap();
        assert!(r.solved());
        assert!(r.c_init >= 0.8);
        assert_eq!(r.c_init, r.c_final);
        let path = r.path.unwrap();
        assert_eq!(path[0], q.start);
        assert_eq!(path.last().unwrap(), &q.goals[0]);
        for w in path.windows(2) {
            assert!(distance(&w[0], &w[1]) <= 0.3 + 1e-12);
        }
    }

    #[test]
    fn enclosed_start_fails() {
        let sc = Scenario::new(
            2,
            vec![[0.0, 1.0]; 2],
            vec![vec![[0.0, 0.3], [0.3, 0.35]], vec![[0.3, 0.35], [0.0, 0.35]]],
            1e-3,
        )
        .unwrap();
        let mut p = RrtConnect::new(sc, BaselineConfig::for_dimension(2), 1).unwrap();
        let q = Query::new(vec![0.1, 0.1], vec![vec![0.9, 0.9]], Budget::Iterations(300));
        let r = p.plan_query(&q).unwrap();
        assert_eq!(r.status, PlanStatus::NoSolution);
        assert!(r.c_final.is_infinite());
    }

    #[test]
    fn identical_seeds_are_deterministic() {
        let sc = Scenario::new(2, vec![[0.0, 1.0]; 2], vec![vec![[0.45, 0.55], [0.0, 0.8]]], 1e-3).unwrap();
        let q = Query::new(vec![0.1, 0.1], vec![vec![0.9, 0.1]], Budget::Iterations(5000));
        let run = || {
            let mut p = RrtConnect::new(sc.clone(), BaselineConfig::for_dimension(2), 9).unwrap();
            p.solve_sequence(&[q.clone(), q.clone()])
        };
        assert_eq!(run(), run());
    }
}
