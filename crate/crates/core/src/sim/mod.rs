//! Discrete-event simulation of the time-varying multi-server queue.

pub mod accel;
pub mod engine;
pub mod histogram;
pub mod replicate;
pub mod stream;

pub use accel::{simulate_accelerated, AccelReport};
pub use engine::{Event, EventKind, Simulator, TaggedState};
pub use histogram::{histogram, skewness, Histogram};
pub use replicate::{
    mean_path, run_replications, simulate_path, write_samples_csv, SimAggregate, SimConfig, SimRun,
    SimSample, DEFAULT_REPLICATIONS,
};
pub use stream::{ReplicationStream, StreamRng};
