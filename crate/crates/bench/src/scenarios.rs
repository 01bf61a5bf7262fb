//! The two abstract benchmark worlds and their seeded query sequences.
//!
//! Both live in `[-0.5, 0.5]^n`. The obstacle footprint is defined on the
//! first two axes and extruded over the full extent of every further axis.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use eirm::planner::{Budget, Query};
use eirm::Scenario;

use crate::BenchError;

/// Collision-check resolution of every benchmark world.
pub const RESOLUTION: f64 = 5e-6;

/// Rejection attempts per state in global query mode.
const MAX_QUERY_ATTEMPTS: usize = 100_000;

const LO: f64 = -0.5;
const HI: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioName {
    WallGap,
    RepeatingRectangles,
}

impl ScenarioName {
    pub const ALL: [ScenarioName; 2] = [ScenarioName::WallGap, ScenarioName::RepeatingRectangles];

    pub fn as_str(self) -> &'static str {
        match self {
            ScenarioName::WallGap => "wall_gap",
            ScenarioName::RepeatingRectangles => "repeating_rectangles",
        }
    }
}

impl fmt::Display for ScenarioName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ScenarioName {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "wall_gap" => Ok(ScenarioName::WallGap),
            "repeating_rectangles" => Ok(ScenarioName::RepeatingRectangles),
            other => Err(BenchError::Usage(format!("unknown scenario '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QueryMode {
    /// Starts from a box on the left, goals from a box on the right.
    Subregion,
    /// Starts and goals uniform over free space.
    Global,
}

impl fmt::Display for QueryMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            QueryMode::Subregion => "subregion",
            QueryMode::Global => "global",
        })
    }
}

impl FromStr for QueryMode {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "subregion" => Ok(QueryMode::Subregion),
            "global" => Ok(QueryMode::Global),
            other => Err(BenchError::Usage(format!("unknown query mode '{other}'"))),
        }
    }
}

pub const SUPPORTED_DIMS: [usize; 3] = [2, 4, 8];

/// A scenario together with the boxes subregion queries are drawn from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchScenario {
    pub name: ScenarioName,
    pub scenario: Scenario,
    pub start_box: Vec<[f64; 2]>,
    pub goal_box: Vec<[f64; 2]>,
}

/// Extrudes a footprint on the first two axes over the remaining ones.
fn extrude(footprint: [[f64; 2]; 2], dim: usize) -> Vec<[f64; 2]> {
    let mut b = footprint.to_vec();
    b.resize(dim, [LO, HI]);
    b
}

fn query_box(dim: usize, axis0: [f64; 2]) -> Vec<[f64; 2]> {
    let mut b = vec![axis0];
    b.resize(dim, [-0.45, 0.45]);
    b
}

/// Interiors of two boxes overlap.
fn boxes_overlap(a: &[[f64; 2]], b: &[[f64; 2]]) -> bool {
    a.iter().zip(b).all(|(x, y)| x[0] < y[1] && y[0] < x[1])
}

pub fn build_scenario(name: ScenarioName, dim: usize) -> Result<BenchScenario, BenchError> {
    if !SUPPORTED_DIMS.contains(&dim) {
        return Err(BenchError::Usage(format!(
            "dimension {dim} is not supported (use 2, 4 or 8)"
        )));
    }
    let footprints: Vec<[[f64; 2]; 2]> = match name {
        // one wall across the second axis with a 0.04 wide gap above the centre
        ScenarioName::WallGap => vec![[[-0.1, 0.1], [LO, 0.08]], [[-0.1, 0.1], [0.12, HI]]],
        // four blocks with a cross-shaped passage between them
        ScenarioName::RepeatingRectangles => vec![
            [[-0.25, -0.05], [-0.4, -0.05]],
            [[-0.25, -0.05], [0.05, 0.4]],
            [[0.05, 0.25], [-0.4, -0.05]],
            [[0.05, 0.25], [0.05, 0.4]],
        ],
    };
    let obstacles: Vec<Vec<[f64; 2]>> = footprints.into_iter().map(|f| extrude(f, dim)).collect();
    let scenario = Scenario::new(dim, vec![[LO, HI]; dim], obstacles, RESOLUTION)?;
    let start_box = query_box(dim, [-0.45, -0.3]);
    let goal_box = query_box(dim, [0.3, 0.45]);
    for b in [&start_box, &goal_box] {
        if scenario.obstacles().iter().any(|ob| boxes_overlap(ob, b)) {
            return Err(BenchError::Scenario(format!("{name}: a query box intersects an obstacle")));
        }
    }
    Ok(BenchScenario {
        name,
        scenario,
        start_box,
        goal_box,
    })
}

fn uniform_in(rng: &mut ChaCha8Rng, region: &[[f64; 2]]) -> Vec<f64> {
    region.iter().map(|b| rng.gen_range(b[0]..b[1])).collect()
}

fn uniform_free(rng: &mut ChaCha8Rng, scenario: &Scenario) -> Result<Vec<f64>, BenchError> {
    for _ in 0..MAX_QUERY_ATTEMPTS {
        let p = uniform_in(rng, scenario.bounds());
        if scenario.point_free(&p) {
            return Ok(p);
        }
    }
    Err(BenchError::Scenario(format!(
        "no free state after {MAX_QUERY_ATTEMPTS} draws"
    )))
}

/// A query sequence that depends only on its arguments.
pub fn generate_queries(
    bench: &BenchScenario,
    mode: QueryMode,
    n: usize,
    seed: u64,
    budget: Budget,
) -> Result<Vec<Query>, BenchError> {
    if n == 0 {
        return Err(BenchError::Usage("at least one query is required".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let (start, goal) = match mode {
            QueryMode::Subregion => (uniform_in(&mut rng, &bench.start_box), uniform_in(&mut rng, &bench.goal_box)),
            QueryMode::Global => (
                uniform_free(&mut rng, &bench.scenario)?,
                uniform_free(&mut rng, &bench.scenario)?,
            ),
        };
        if start != goal {
            out.push(Query::new(start, vec![goal], budget));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wall_gap_has_one_narrow_gap() {
        let b = build_scenario(ScenarioName::WallGap, 2).unwrap();
        let obs = b.scenario.obstacles();
        assert_eq!(obs.len(), 2);
        let gap = obs[1][1][0] - obs[0][1][1];
        assert!((gap - 0.04).abs() < 1e-12);
        assert_eq!(b.scenario.resolution(), 5e-6);
        assert!(b.scenario.point_free(&[0.0, 0.1]));
        assert!(!b.scenario.point_free(&[0.0, 0.0]));
        assert!(!b.scenario.point_free(&[0.0, 0.3]));
    }

    #[test]
    fn higher_dimensions_extrude_the_footprint() {
        for name in ScenarioName::ALL {
            let flat = build_scenario(name, 2).unwrap();
            for dim in [4, 8] {
                let b = build_scenario(name, dim).unwrap();
                assert_eq!(b.scenario.obstacles().len(), flat.scenario.obstacles().len());
                for (ob, f) in b.scenario.obstacles().iter().zip(flat.scenario.obstacles()) {
                    assert_eq!(&ob[..2], &f[..]);
                    assert!(ob[2..].iter().all(|iv| *iv == [LO, HI]));
                }
            }
        }
    }

    #[test]
    fn unsupported_dimension_is_a_usage_error() {
        assert!(matches!(build_scenario(ScenarioName::WallGap, 3), Err(BenchError::Usage(_))));
        assert!("maze".parse::<ScenarioName>().is_err());
    }

    #[test]
    fn query_generation_is_pure_and_valid() {
        let b = build_scenario(ScenarioName::RepeatingRectangles, 4).unwrap();
        for mode in [QueryMode::Subregion, QueryMode::Global] {
            let q1 = generate_queries(&b, mode, 30, 5, Budget::Iterations(10)).unwrap();
            let q2 = generate_queries(&b, mode, 30, 5, Budget::Iterations(10)).unwrap();
            assert_eq!(q1, q2);
            for q in &q1 {
                assert!(b.scenario.is_state_valid(&q.start).unwrap());
                assert!(b.scenario.is_state_valid(&q.goals[0]).unwrap());
                if mode == QueryMode::Subregion {
                    assert!(q.start.iter().zip(&b.start_box).all(|(x, iv)| *x >= iv[0] && *x <= iv[1]));
                    assert!(q.goals[0].iter().zip(&b.goal_box).all(|(x, iv)| *x >= iv[0] && *x <= iv[1]));
                }
            }
        }
    }
}
