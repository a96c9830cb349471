use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("geometry: {0}")]
    Geometry(String),
    #[error("quadrature: {0}")]
    Quadrature(String),
    #[error("point {0} lies outside the domain")]
    Domain(String),
    #[error("evaluation at the singularity {0}")]
    Singularity(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("epsilon {eps} outside [0, {limit})")]
    EpsilonRange { eps: f64, limit: f64 },
    #[error("invalid input: {0}")]
    Input(String),
    #[error("fit: {0}")]
    Fit(String),
    #[error("kernel: {0}")]
    Kernel(String),
    #[error("negative normal velocity {velocity:.3e} at node {node}")]
    GrowthSign { node: usize, velocity: f64 },
    #[error("topology: {0}")]
    Topology(String),
    #[error("oracle: {0}")]
    Oracle(String),
}

pub type Result<T> = std::result::Result<T, Error>;
