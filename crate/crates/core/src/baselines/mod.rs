//! Comparison planners behind the common [`Planner`](crate::planner::Planner)
//! interface. They are trend baselines, not faithful ports of any library.

mod lazy_prm;
mod rrt_connect;

pub use lazy_prm::LazyPrmStar;
pub use rrt_connect::RrtConnect;

use crate::error::ConfigError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BaselineConfig {
    /// Steer limit of RRT-Connect.
    pub max_edge_length: f64,
    /// Probability of sampling a goal in RRT-Connect.
    pub goal_bias: f64,
    /// Scale of the k-nearest connection rule of LazyPRM*.
    pub knn_scale: f64,
    /// Samples LazyPRM* adds per growth step.
    pub batch_size: usize,
    /// Stop each query at its first solution.
    pub initial_only: bool,
}

impl BaselineConfig {
    /// Steer limit 0.3 up to two dimensions, 0.5 up to four and 1.25 above.
    pub fn for_dimension(dim: usize) -> Self {
        let max_edge_length = match dim {
            0..=2 => 0.3,
            3..=4 => 0.5,
            _ => 1.25,
        };
        BaselineConfig {
            max_edge_length,
            goal_bias: 0.0,
            knn_scale: 1.001,
            batch_size: 100,
            initial_only: false,
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(self.max_edge_length > 0.0) || !self.max_edge_length.is_finite() {
            return Err(ConfigError::Invalid("max edge length must be positive".into()));
        }
        if !(0.0..1.0).contains(&self.goal_bias) {
            return Err(ConfigError::Invalid("goal bias must lie in [0, 1)".into()));
        }
        if !(self.knn_scale >= 1.0) || !self.knn_scale.is_finite() {
            return Err(ConfigError::Invalid("knn scale must be a finite value >= 1".into()));
        }
        if self.batch_size == 0 {
            return Err(ConfigError::Invalid("batch size must be at least 1".into()));
        }
        Ok(())
    }
}
