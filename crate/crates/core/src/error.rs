use thiserror::Error;

use crate::space::StateId;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpaceError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ApproximationError {
    #[error("free space too thin: no valid sample after {0} attempts")]
    SamplerStarved(usize),
    #[error("state {0} is not collision-free")]
    InvalidState(StateId),
    #[error("contradictory status update for edge ({0}, {1})")]
    Inconsistent(StateId, StateId),
    #[error(transparent)]
    Space(#[from] SpaceError),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("invalid configuration: {0}")]
    Invalid(String),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PlanError {
    #[error("query rejected: {0}")]
    InvalidQuery(String),
    #[error(transparent)]
    Approximation(#[from] ApproximationError),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("broken forward tree: {0}")]
    BrokenTree(String),
    #[error("invalid snapshot: {0}")]
    Snapshot(String),
}
