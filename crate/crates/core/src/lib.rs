//! Expected overlapping time of a virtual customer in time-varying
//! M_t/M/n and M_t/M/inf queues.
//!
//! Four estimators are provided:
//!
//! - [`fluid::overlap_fluid`]: fluid limit plus the drain time of the customers ahead;
//! - [`fluid::overlap_adjusted`]: the Gaussian-adjusted fluid/variance model;
//! - [`infinite::closed_form_overlap`]: exact fluid integral for sinusoidal M_t/M/inf;
//! - [`sim::run_replications`]: discrete-event simulation of a tagged customer.

// `!(a >= b)` is used on purpose so that NaN inputs are rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod fluid;
pub mod gaussian;
pub mod infinite;
pub mod model;
pub mod ode;
pub mod overlap;
pub mod rates;
pub mod sim;
pub mod trajectory;

pub use error::{OverlapError, Result};
pub use gaussian::{gaussian_cdf, gaussian_pdf, GaussianParams};
pub use model::{ModelConfig, QueueModel, RateFunction, Servers};
pub use overlap::{Method, OverlapResult, SimulationStats};
pub use rates::{rate_f2, rate_g2};
pub use trajectory::{first_passage, FirstPassage, PassageTime, Trajectory};
