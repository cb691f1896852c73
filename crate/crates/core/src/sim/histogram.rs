use std::io::{self, Write};

use crate::error::{OverlapError, Result};
use crate::trajectory::fmt_full;

/// Bins used when the interquartile range is zero.
pub const FALLBACK_BINS: usize = 30;

#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    /// `counts.len() + 1` increasing edges; the last bin is closed on the right.
    pub edges: Vec<f64>,
    pub counts: Vec<u64>,
}

impl Histogram {
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "bin_left,bin_right,count")?;
        for (i, c) in self.counts.iter().enumerate() {
            writeln!(
                out,
                "{},{},{}",
                fmt_full(self.edges[i]),
                fmt_full(self.edges[i + 1]),
                c
            )?;
        }
        Ok(())
    }
}

/// Linear-interpolated quantile of sorted data.
fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let i = pos.floor() as usize;
    let j = (i + 1).min(sorted.len() - 1);
    sorted[i] + (pos - i as f64) * (sorted[j] - sorted[i])
}

/// Equal-width histogram. Bin count is `bins` if given, otherwise the
/// Freedman-Diaconis rule (falling back to 30 bins when the IQR is zero).
pub fn histogram(samples: &[f64], bins: Option<usize>) -> Result<Histogram> {
    if samples.len() < 2 {
        return Err(OverlapError::Config(
            "histogram needs at least 2 samples".into(),
        ));
    }
    if samples.iter().any(|v| !v.is_finite()) {
        return Err(OverlapError::Domain(
            "histogram samples must be finite".into(),
        ));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let (lo, hi) = (sorted[0], sorted[sorted.len() - 1]);

    let count = match bins {
        Some(0) => return Err(OverlapError::Config("bin count must be positive".into())),
        Some(b) => b,
        None => {
            let iqr = quantile(&sorted, 0.75) - quantile(&sorted, 0.25);
            if iqr <= 0.0 || hi == lo {
                FALLBACK_BINS
            } else {
                let width = 2.0 * iqr / (sorted.len() as f64).cbrt();
                ((hi - lo) / width).ceil().max(1.0) as usize
            }
        }
    };

    let (lo, hi) = if hi > lo {
        (lo, hi)
    } else {
        (lo - 0.5, hi + 0.5)
    };
    let width = (hi - lo) / count as f64;
    let edges: Vec<f64> = (0..=count)
        .map(|i| {
            if i == count {
                hi
            } else {
                lo + i as f64 * width
            }
        })
        .collect();
    let mut counts = vec![0u64; count];
    for &v in &sorted {
        let idx = (((v - lo) / (hi - lo)) * count as f64).floor() as usize;
        counts[idx.min(count - 1)] += 1;
    }
    Ok(Histogram { edges, counts })
}

/// Sample skewness `m3 / m2^{3/2}` (population moments).
pub fn skewness(samples: &[f64]) -> f64 {
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let (m2, m3) = samples.iter().fold((0.0, 0.0), |(a, b), &x| {
        let d = x - mean;
        (a + d * d, b + d * d * d)
    });
    let (m2, m3) = (m2 / n, m3 / n);
    if m2 == 0.0 {
        0.0
    } else {
        m3 / m2.powf(1.5)
    }
}
