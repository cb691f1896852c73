use thiserror::Error;

/// Errors raised by model construction, solvers and the simulator.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum OverlapError {
    /// Invalid model or solver configuration.
    #[error("invalid configuration: {0}")]
    Config(String),

    /// A function was evaluated outside its domain (e.g. a negative standard deviation).
    #[error("domain error: {0}")]
    Domain(String),

    /// The solver horizon ends before the quantity of interest is determined.
    #[error("horizon too short: need T >= {required:.6}, got T = {horizon:.6}; extend T")]
    HorizonTooShort { required: f64, horizon: f64 },

    /// The tagged customer was still in the system when the simulation horizon was reached.
    #[error(
        "horizon too short in replication {replication}: tagged customer still {state} at T = {horizon}"
    )]
    SimHorizon {
        replication: u64,
        state: String,
        horizon: f64,
    },

    /// Malformed configuration file.
    #[error("config parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, OverlapError>;
