//! Compensated summation and error bars for correlated series.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

/// Neumaier compensated accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

pub fn neumaier_sum(xs: impl IntoIterator<Item = f64>) -> f64 {
    let mut acc = Neumaier::new();
    for x in xs {
        acc.add(x);
    }
    acc.value()
}

/// ln Σ e^{x_i}, with -inf for an empty or all -inf input.
pub fn log_sum_exp(xs: &[f64]) -> f64 {
    let m = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + neumaier_sum(xs.iter().map(|&x| (x - m).exp())).ln()
}

pub fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    neumaier_sum(xs.iter().copied()) / xs.len() as f64
}

/// Unbiased sample variance.
pub fn variance(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return f64::NAN;
    }
    let m = mean(xs);
    neumaier_sum(xs.iter().map(|x| (x - m) * (x - m))) / (xs.len() - 1) as f64
}

pub const MIN_BATCHES: usize = 16;

/// Mean with a standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub value: f64,
    /// `None` when fewer than [`MIN_BATCHES`] batches were available.
    pub stderr: Option<f64>,
}

impl Estimate {
    pub fn exact(value: f64) -> Self {
        Estimate {
            value,
            stderr: Some(0.0),
        }
    }
}

/// Batch means over `n_batches` contiguous batches (trailing remainder dropped).
pub fn batch_means(xs: &[f64], n_batches: usize) -> Vec<f64> {
    let size = xs.len() / n_batches.max(1);
    if size == 0 {
        return Vec::new();
    }
    xs.chunks_exact(size)
        .take(n_batches)
        .map(mean)
        .collect()
}

/// Mean of the full series with a batch-means standard error.
pub fn batch_estimate(xs: &[f64], n_batches: usize) -> Estimate {
    let value = mean(xs);
    let b = batch_means(xs, n_batches.max(MIN_BATCHES));
    let stderr = (b.len() >= MIN_BATCHES).then(|| (variance(&b) / b.len() as f64).sqrt());
    Estimate { value, stderr }
}

/// Independent replicas (e.g. chains): mean and standard error of the mean.
pub fn replica_estimate(xs: &[f64]) -> Estimate {
    Estimate {
        value: mean(xs),
        stderr: (xs.len() >= 2).then(|| (variance(xs) / xs.len() as f64).sqrt()),
    }
}

/// Delete-one jackknife over batches of a statistic `f` of the batch means
/// of several series observed together.
pub fn jackknife(batches: &[Vec<f64>], f: impl Fn(&[f64]) -> f64) -> Estimate {
    let n = batches.len();
    let k = batches.first().map_or(0, Vec::len);
    let totals: Vec<f64> = (0..k)
        .map(|j| neumaier_sum(batches.iter().map(|b| b[j])))
        .collect();
    let full: Vec<f64> = totals.iter().map(|t| t / n as f64).collect();
    let value = f(&full);
    if n < MIN_BATCHES {
        return Estimate {
            value,
            stderr: None,
        };
    }
    let leave: Vec<f64> = batches
        .iter()
        .map(|b| {
            let m: Vec<f64> = (0..k).map(|j| (totals[j] - b[j]) / (n - 1) as f64).collect();
            f(&m)
        })
        .collect();
    let lm = mean(&leave);
    let var = (n - 1) as f64 / n as f64 * neumaier_sum(leave.iter().map(|x| (x - lm) * (x - lm)));
    Estimate {
        value,
        stderr: Some(var.sqrt()),
    }
}

/// Percentile bootstrap interval of a statistic over resampled items.
pub fn bootstrap_interval<T>(
    items: &[T],
    stat: impl Fn(&[&T]) -> f64,
    resamples: usize,
    level: f64,
    seed: u64,
) -> (f64, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut values: Vec<f64> = (0..resamples)
        .map(|_| {
            let pick: Vec<&T> = (0..items.len())
                .map(|_| &items[rng.random_range(0..items.len())])
                .collect();
            stat(&pick)
        })
        .filter(|v| v.is_finite())
        .collect();
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    values.sort_by(f64::total_cmp);
    let q = |p: f64| values[((p * (values.len() - 1) as f64).round() as usize).min(values.len() - 1)];
    ((q((1.0 - level) / 2.0)), q((1.0 + level) / 2.0))
}

/// Total variation distance between two probability vectors.
pub fn total_variation(p: &[f64], q: &[f64]) -> f64 {
    assert_eq!(p.len(), q.len());
    0.5 * neumaier_sum(p.iter().zip(q).map(|(a, b)| (a - b).abs()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn neumaier_recovers_cancellation() {
        assert_eq!(neumaier_sum([1.0, 1e100, 1.0, -1e100]), 2.0);
    }

    #[test]
    fn log_sum_exp_large() {
        let v = log_sum_exp(&[1000.0, 1000.0]);
        assert!((v - (1000.0 + 2f64.ln())).abs() < 1e-12);
        assert_eq!(log_sum_exp(&[]), f64::NEG_INFINITY);
    }

    #[test]
    fn batch_needs_sixteen() {
        let xs: Vec<f64> = (0..10).map(|i| i as f64).collect();
        assert_eq!(batch_estimate(&xs, 16).stderr, None);
        let xs: Vec<f64> = (0..160).map(|i| (i % 2) as f64).collect();
        let e = batch_estimate(&xs, 16);
        assert_eq!(e.value, 0.5);
        assert_eq!(e.stderr, Some(0.0));
    }

    #[test]
    fn jackknife_of_mean_matches_batch_error() {
        let batches: Vec<Vec<f64>> = (0..20).map(|i| vec![(i * 7 % 5) as f64]).collect();
        let flat: Vec<f64> = batches.iter().map(|b| b[0]).collect();
        let jk = jackknife(&batches, |m| m[0]);
        let direct = (variance(&flat) / 20.0).sqrt();
        assert!((jk.stderr.unwrap() - direct).abs() < 1e-12);
    }

    #[test]
    fn tv_basic() {
        assert_eq!(total_variation(&[1.0, 0.0], &[0.0, 1.0]), 1.0);
    }
}
