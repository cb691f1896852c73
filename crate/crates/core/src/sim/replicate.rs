//! Tagged-customer replications and their aggregation.

use std::io::{self, Write};

use rand::Rng;
use rayon::prelude::*;

use super::engine::{Simulator, TaggedState};
use super::histogram::Histogram;
use super::stream::ReplicationStream;
use crate::error::{OverlapError, Result};
use crate::model::QueueModel;
use crate::overlap::{Method, OverlapResult, SimulationStats};
use crate::trajectory::fmt_full;

/// Replications used for the published comparison tables.
pub const DEFAULT_REPLICATIONS: u64 = 10_000;

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub master_seed: u64,
    pub replications: u64,
    pub horizon: f64,
    pub tau: f64,
    /// Include the tagged customer herself in the overlap integrand.
    pub count_self: bool,
    /// Uniform acceleration factor applied to arrivals, servers and the initial count.
    pub eta: u64,
}

impl SimConfig {
    pub fn new(master_seed: u64, tau: f64, horizon: f64) -> Self {
        Self {
            master_seed,
            replications: DEFAULT_REPLICATIONS,
            horizon,
            tau,
            count_self: false,
            eta: 1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.replications == 0 {
            return Err(OverlapError::Config("replications must be >= 1".into()));
        }
        if self.eta == 0 {
            return Err(OverlapError::Config("eta must be >= 1".into()));
        }
        if !(self.tau >= 0.0) {
            return Err(OverlapError::Config(format!(
                "tau must be >= 0, got {}",
                self.tau
            )));
        }
        if !(self.tau < self.horizon) {
            return Err(OverlapError::Config(format!(
                "tau ({}) must be below the horizon ({})",
                self.tau, self.horizon
            )));
        }
        Ok(())
    }
}

/// One replication's measurements for the tagged customer.
#[derive(Debug, Clone, PartialEq)]
pub struct SimSample {
    pub replication: u64,
    pub overlap: f64,
    /// Part of `overlap` accumulated while she was waiting.
    pub overlap_waiting: f64,
    /// `int X dt` over her sojourn with herself counted, regardless of `count_self`.
    pub population_integral: f64,
    /// `int X dt` over her waiting time with herself counted.
    pub population_integral_waiting: f64,
    pub sojourn: f64,
    pub wait: f64,
    pub service: f64,
    pub system_size_at_tau: u64,
}

/// Simulates one path and measures the overlap of a customer injected at `cfg.tau`.
///
/// `cfg.eta` is applied to `model` by the caller (see [`run_replications`]).
pub fn simulate_path<R: Rng>(
    model: &QueueModel,
    cfg: &SimConfig,
    stream: ReplicationStream<R>,
) -> Result<SimSample> {
    let ReplicationStream { index, rng } = stream;
    let mut sim = Simulator::new(model, rng);
    sim.advance_to(cfg.tau);
    let size_at_tau = sim.others();
    sim.inject_tagged();

    let self_weight = u64::from(cfg.count_self) as f64;
    let (mut overlap, mut overlap_waiting) = (0.0, 0.0);
    let (mut pop, mut pop_waiting) = (0.0, 0.0);
    loop {
        let (t0, others, waiting) = (
            sim.time(),
            sim.others() as f64,
            matches!(sim.tagged(), TaggedState::Waiting { .. }),
        );
        let event = sim.next_event(cfg.horizon);
        let dt = sim.time() - t0;
        overlap += (others + self_weight) * dt;
        pop += (others + 1.0) * dt;
        if waiting {
            overlap_waiting += (others + self_weight) * dt;
            pop_waiting += (others + 1.0) * dt;
        }
        match (event, sim.tagged()) {
            (
                _,
                TaggedState::Departed {
                    arrived,
                    started,
                    end,
                },
            ) => {
                return Ok(SimSample {
                    replication: index,
                    overlap,
                    overlap_waiting,
                    population_integral: pop,
                    population_integral_waiting: pop_waiting,
                    sojourn: end - arrived,
                    wait: started - arrived,
                    service: end - started,
                    system_size_at_tau: size_at_tau,
                })
            }
            (None, state) => {
                return Err(OverlapError::SimHorizon {
                    replication: index,
                    state: match state {
                        TaggedState::Waiting { .. } => "waiting".into(),
                        _ => "in service".into(),
                    },
                    horizon: cfg.horizon,
                })
            }
            _ => {}
        }
    }
}

/// Summary statistics of overlap samples.
#[derive(Debug, Clone, PartialEq)]
pub struct SimAggregate {
    pub mean: f64,
    /// Sample variance (divisor `N - 1`; zero for a single sample).
    pub variance: f64,
    pub stderr: f64,
    pub sample_count: u64,
    pub histogram: Option<Histogram>,
}

impl SimAggregate {
    /// Two-pass mean/variance in slice order.
    pub fn from_values(values: &[f64]) -> Self {
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let variance = if values.len() > 1 {
            values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0)
        } else {
            0.0
        };
        Self {
            mean,
            variance,
            stderr: (variance / n).sqrt(),
            sample_count: values.len() as u64,
            histogram: None,
        }
    }

    pub fn to_result(&self, tau: f64) -> OverlapResult {
        OverlapResult {
            method: Method::Simulation,
            tau,
            first_passage: None,
            expected_overlap: self.mean,
            stats: Some(SimulationStats {
                variance: self.variance,
                stderr: self.stderr,
                replications: self.sample_count,
            }),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimRun {
    pub aggregate: SimAggregate,
    pub samples: Vec<SimSample>,
}

impl SimRun {
    pub fn overlaps(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.overlap).collect()
    }
}

/// Runs `cfg.replications` independent tagged-customer paths in parallel.
///
/// Replication `i` draws from [`ReplicationStream::new`]`(cfg.master_seed, i)` and
/// results are reduced in index order, so output does not depend on thread count.
pub fn run_replications(model: &QueueModel, cfg: &SimConfig) -> Result<SimRun> {
    cfg.validate()?;
    let scaled = if cfg.eta > 1 {
        model.accelerated(cfg.eta)?
    } else {
        model.clone()
    };
    let samples: Vec<SimSample> = (0..cfg.replications)
        .into_par_iter()
        .map(|i| simulate_path(&scaled, cfg, ReplicationStream::new(cfg.master_seed, i)))
        .collect::<Result<_>>()?;
    let values: Vec<f64> = samples.iter().map(|s| s.overlap).collect();
    Ok(SimRun {
        aggregate: SimAggregate::from_values(&values),
        samples,
    })
}

/// Raw samples as `replication,O_tau,wait,service,X_at_tau`.
pub fn write_samples_csv<W: Write>(samples: &[SimSample], mut out: W) -> io::Result<()> {
    writeln!(out, "replication,O_tau,wait,service,X_at_tau")?;
    for s in samples {
        writeln!(
            out,
            "{},{},{},{},{}",
            s.replication,
            fmt_full(s.overlap),
            fmt_full(s.wait),
            fmt_full(s.service),
            s.system_size_at_tau
        )?;
    }
    Ok(())
}

/// Mean of `X(t)` (tagged customer excluded, none injected) at each time in
/// `times` over `replications` paths.
pub fn mean_path(
    model: &QueueModel,
    times: &[f64],
    replications: u64,
    master_seed: u64,
) -> Vec<f64> {
    let paths: Vec<Vec<u64>> = (0..replications)
        .into_par_iter()
        .map(|i| {
            let stream = ReplicationStream::new(master_seed, i);
            let mut sim = Simulator::new(model, stream.rng);
            times
                .iter()
                .map(|&t| {
                    sim.advance_to(t);
                    sim.others()
                })
                .collect()
        })
        .collect();
    let mut mean = vec![0.0; times.len()];
    for p in &paths {
        for (m, &x) in mean.iter_mut().zip(p) {
            *m += x as f64;
        }
    }
    mean.iter_mut().for_each(|m| *m /= replications as f64);
    mean
}
