//! Uniform-acceleration experiments: distance between `X^eta / eta` and the fluid limit.

use rand::Rng;
use rayon::prelude::*;

use super::engine::Simulator;
use super::replicate::SimConfig;
use super::stream::ReplicationStream;
use crate::error::{OverlapError, Result};
use crate::model::{QueueModel, Servers};
use crate::trajectory::Trajectory;

#[derive(Debug, Clone, PartialEq)]
pub struct AccelReport {
    pub eta: u64,
    /// Per replication: `max_t |X^eta(t)/eta - x(t)|` over the fluid grid.
    pub sup_errors: Vec<f64>,
    pub mean_sup_error: f64,
    /// Per replication: first time after `tau` the cohort drops to `eta (n - 1)`.
    pub passage_times: Vec<Option<f64>>,
    /// Mean over replications where the passage was observed.
    pub mean_passage_time: Option<f64>,
}

struct PathSummary {
    sup_error: f64,
    passage: Option<f64>,
}

fn run_one<R: Rng>(
    scaled: &QueueModel,
    eta: f64,
    tau: f64,
    threshold: Option<f64>,
    grid: &[(f64, f64)],
    rng: R,
) -> PathSummary {
    let mut sim = Simulator::new(scaled, rng);
    let mut passage = None;
    let mut marked = false;
    let mut sup: f64 = 0.0;

    let advance = |sim: &mut Simulator<R>, to: f64, marked: bool, passage: &mut Option<f64>| {
        while let Some(ev) = sim.next_event(to) {
            if let (true, None, Some(thr), Some(c)) = (marked, *passage, threshold, sim.cohort()) {
                if c as f64 <= thr {
                    *passage = Some(ev.time - tau);
                }
            }
        }
    };

    for &(t, x) in grid {
        if !marked && tau <= t {
            advance(&mut sim, tau, marked, &mut passage);
            sim.mark_cohort();
            marked = true;
            if let (Some(thr), Some(c)) = (threshold, sim.cohort()) {
                if c as f64 <= thr {
                    passage = Some(0.0);
                }
            }
        }
        advance(&mut sim, t, marked, &mut passage);
        sup = sup.max((sim.others() as f64 / eta - x).abs());
    }
    PathSummary {
        sup_error: sup,
        passage,
    }
}

/// Simulates the `cfg.eta`-accelerated model and compares its scaled path
/// with the `x` channel of `fluid` (computed for the unscaled model).
pub fn simulate_accelerated(
    model: &QueueModel,
    cfg: &SimConfig,
    fluid: &Trajectory,
) -> Result<AccelReport> {
    cfg.validate()?;
    if fluid.end() < cfg.horizon - 1e-9 {
        return Err(OverlapError::HorizonTooShort {
            required: cfg.horizon,
            horizon: fluid.end(),
        });
    }
    let xs = fluid
        .channel("x")
        .ok_or_else(|| OverlapError::Config("fluid trajectory has no \"x\" channel".into()))?;
    let grid: Vec<(f64, f64)> = fluid
        .times()
        .zip(xs.iter().copied())
        .filter(|&(t, _)| t >= 0.0 && t <= cfg.horizon + 1e-9)
        .collect();

    let scaled = model.accelerated(cfg.eta)?;
    let eta = cfg.eta as f64;
    let threshold = match model.servers {
        Servers::Finite(n) => Some(eta * (n as f64 - 1.0)),
        Servers::Infinite => None,
    };
    let runs: Vec<PathSummary> = (0..cfg.replications)
        .into_par_iter()
        .map(|i| {
            let stream = ReplicationStream::new(cfg.master_seed, i);
            run_one(&scaled, eta, cfg.tau, threshold, &grid, stream.rng)
        })
        .collect();

    let sup_errors: Vec<f64> = runs.iter().map(|r| r.sup_error).collect();
    let passage_times: Vec<Option<f64>> = runs.iter().map(|r| r.passage).collect();
    let observed: Vec<f64> = passage_times.iter().flatten().copied().collect();
    Ok(AccelReport {
        eta: cfg.eta,
        mean_sup_error: sup_errors.iter().sum::<f64>() / sup_errors.len() as f64,
        sup_errors,
        mean_passage_time: (!observed.is_empty())
            .then(|| observed.iter().sum::<f64>() / observed.len() as f64),
        passage_times,
    })
}
