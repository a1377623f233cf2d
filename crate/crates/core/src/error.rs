use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("infeasible layout: {0}")]
    InfeasibleLayout(String),
    #[error("estimation window outside pilot and guard region: {0}")]
    EstimationWindow(String),
    #[error("estimation failed: {0}")]
    Estimation(String),
    #[error("configuration error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
