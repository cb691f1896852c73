use std::fmt;

use serde::Serialize;

use crate::trajectory::FirstPassage;

/// How an overlap estimate was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Fluid,
    Adjusted,
    Simulation,
    ClosedForm,
    NumericOde,
}

impl Method {
    pub const ALL: [Method; 5] = [
        Method::Fluid,
        Method::Adjusted,
        Method::Simulation,
        Method::ClosedForm,
        Method::NumericOde,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::Fluid => "fluid",
            Method::Adjusted => "adjusted",
            Method::Simulation => "simulation",
            Method::ClosedForm => "closed-form",
            Method::NumericOde => "numeric-ode",
        }
    }

    pub fn parse(s: &str) -> Option<Method> {
        Method::ALL.into_iter().find(|m| m.name() == s)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Monte Carlo summary attached to simulation results.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulationStats {
    pub variance: f64,
    pub stderr: f64,
    pub replications: u64,
}

/// Estimated expected overlapping time of a customer arriving at `tau`.
#[derive(Debug, Clone, PartialEq)]
pub struct OverlapResult {
    pub method: Method,
    pub tau: f64,
    /// Waiting-time proxy (`t0` or `ta`); `None` for infinite-server models and simulation.
    pub first_passage: Option<FirstPassage>,
    pub expected_overlap: f64,
    pub stats: Option<SimulationStats>,
}
