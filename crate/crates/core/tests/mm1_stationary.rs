//! Stationary M/M/1 overlap against a naive birth-death simulation of the same customer.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, Geometric};

use overlap_core::sim::{simulate_path, ReplicationStream, SimConfig};
use overlap_core::{QueueModel, RateFunction, Servers};

const LAMBDA: f64 = 0.5;
const MU: f64 = 1.0;
const REPS: u64 = 20_000;

fn mean_and_se(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let m = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0);
    (m, (var / n).sqrt())
}

/// Customers ahead of her are served one at a time; arrivals join behind.
fn naive_overlap(rng: &mut ChaCha8Rng, ahead0: u64) -> f64 {
    let clock = Exp::new(LAMBDA + MU).unwrap();
    let (mut ahead, mut behind, mut overlap) = (ahead0, 0u64, 0.0);
    while ahead > 0 {
        overlap += (ahead + behind) as f64 * clock.sample(rng);
        if rng.random::<f64>() < LAMBDA / (LAMBDA + MU) {
            behind += 1;
        } else {
            ahead -= 1;
        }
    }
    loop {
        overlap += behind as f64 * clock.sample(rng);
        if rng.random::<f64>() < LAMBDA / (LAMBDA + MU) {
            behind += 1;
        } else {
            return overlap;
        }
    }
}

#[test]
fn stationary_mm1_overlap_matches_naive_oracle() {
    let rho = LAMBDA / MU;
    let start = Geometric::new(1.0 - rho).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(99);

    let engine: Vec<f64> = (0..REPS)
        .map(|i| {
            let k = start.sample(&mut rng);
            let model = QueueModel::new(
                Servers::Finite(1),
                MU,
                RateFunction::constant(LAMBDA).unwrap(),
                k as f64,
            )
            .unwrap();
            let cfg = SimConfig::new(5, 10.0, 1e4);
            simulate_path(&model, &cfg, ReplicationStream::new(5, i))
                .unwrap()
                .overlap
        })
        .collect();
    // the number present at a fixed time is stationary, so draw it directly
    let oracle: Vec<f64> = (0..REPS)
        .map(|_| {
            let k = start.sample(&mut rng);
            naive_overlap(&mut rng, k)
        })
        .collect();

    let (m1, s1) = mean_and_se(&engine);
    let (m2, s2) = mean_and_se(&oracle);
    let se = (s1 * s1 + s2 * s2).sqrt();
    assert!(
        (m1 - m2).abs() < 3.0 * se,
        "engine {m1} oracle {m2} se {se}"
    );
}
