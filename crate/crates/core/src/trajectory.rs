//! Uniform-grid trajectories with named channels, interpolation and first passage.

use std::io::{self, Write};

use crate::error::{OverlapError, Result};

/// Solution values on the uniform grid `start + i * step`, `i = 0..len`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    start: f64,
    step: f64,
    len: usize,
    channels: Vec<(String, Vec<f64>)>,
}

impl Trajectory {
    pub fn new(start: f64, step: f64, channels: Vec<(String, Vec<f64>)>) -> Result<Self> {
        if !(step > 0.0) {
            return Err(OverlapError::Config(format!(
                "grid step must be positive, got {step}"
            )));
        }
        let len = channels.first().map_or(0, |c| c.1.len());
        if len == 0 {
            return Err(OverlapError::Config(
                "trajectory needs at least one grid point".into(),
            ));
        }
        if let Some((name, _)) = channels.iter().find(|c| c.1.len() != len) {
            return Err(OverlapError::Config(format!(
                "channel {name:?} length differs from grid length {len}"
            )));
        }
        Ok(Self {
            start,
            step,
            len,
            channels,
        })
    }

    pub fn start(&self) -> f64 {
        self.start
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Last grid time.
    pub fn end(&self) -> f64 {
        self.time(self.len - 1)
    }

    pub fn time(&self, i: usize) -> f64 {
        self.start + i as f64 * self.step
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len).map(|i| self.time(i))
    }

    pub fn channel_names(&self) -> impl Iterator<Item = &str> {
        self.channels.iter().map(|c| c.0.as_str())
    }

    pub fn channel(&self, name: &str) -> Option<&[f64]> {
        self.channels
            .iter()
            .find(|c| c.0 == name)
            .map(|c| c.1.as_slice())
    }

    fn require(&self, name: &str) -> Result<&[f64]> {
        self.channel(name)
            .ok_or_else(|| OverlapError::Config(format!("trajectory has no channel {name:?}")))
    }

    /// Linear interpolation of `name` at time `t`; `t` must lie on the grid span.
    pub fn value_at(&self, name: &str, t: f64) -> Result<f64> {
        let values = self.require(name)?;
        let pos = (t - self.start) / self.step;
        let last = (self.len - 1) as f64;
        // tolerate roundoff at the ends of the grid
        if pos < -1e-9 || pos > last + 1e-9 {
            return Err(OverlapError::HorizonTooShort {
                required: t,
                horizon: self.end(),
            });
        }
        let pos = pos.clamp(0.0, last);
        let i = (pos.floor() as usize).min(self.len.saturating_sub(2));
        if self.len == 1 {
            return Ok(values[0]);
        }
        let w = pos - i as f64;
        Ok(values[i] + w * (values[i + 1] - values[i]))
    }

    /// Writes `t,<channel>...` rows with 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        write!(out, "t")?;
        for (name, _) in &self.channels {
            write!(out, ",{name}")?;
        }
        writeln!(out)?;
        for i in 0..self.len {
            write!(out, "{}", fmt_full(self.time(i)))?;
            for (_, v) in &self.channels {
                write!(out, ",{}", fmt_full(v[i]))?;
            }
            writeln!(out)?;
        }
        Ok(())
    }
}

/// A float rendered with 17 significant digits.
pub fn fmt_full(v: f64) -> String {
    format!("{v:.16e}")
}

/// Outcome of a first-passage search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PassageTime {
    /// The initial value already satisfies the threshold.
    Immediate,
    /// Crossing time measured from the start of the trajectory.
    At(f64),
    /// The channel stays above the threshold over the whole grid.
    NotReached,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FirstPassage {
    pub threshold: f64,
    pub time: PassageTime,
}

impl FirstPassage {
    /// Elapsed time to the crossing, `None` if not reached.
    pub fn elapsed(&self) -> Option<f64> {
        match self.time {
            PassageTime::Immediate => Some(0.0),
            PassageTime::At(t) => Some(t),
            PassageTime::NotReached => None,
        }
    }
}

/// First time `channel` drops to `threshold` or below, linearly interpolated
/// between the bracketing grid points. Times are relative to the trajectory start.
pub fn first_passage(traj: &Trajectory, channel: &str, threshold: f64) -> Result<FirstPassage> {
    let values = traj.require(channel)?;
    let time = if values[0] <= threshold {
        PassageTime::Immediate
    } else {
        match values.iter().position(|&v| v <= threshold) {
            None => PassageTime::NotReached,
            Some(i) => {
                let (a, b) = (values[i - 1], values[i]);
                let frac = (a - threshold) / (a - b);
                PassageTime::At((i as f64 - 1.0 + frac) * traj.step())
            }
        }
    };
    Ok(FirstPassage { threshold, time })
}
