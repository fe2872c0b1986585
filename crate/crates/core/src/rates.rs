//! Monte Carlo estimation of logical and total error rates.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::noise::NoiseModel;
use crate::trial::{Classification, Method, Pipeline, TrialConfig};

/// Mean, minimum and maximum of a per-batch rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Spread {
    pub mean: f64,
    pub min: f64,
    pub max: f64,
}

impl Spread {
    fn of(values: &[f64]) -> Self {
        let mean = values.iter().sum::<f64>() / values.len() as f64;
        let min = values.iter().copied().fold(f64::INFINITY, f64::min);
        let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Spread { mean, min, max }
    }
}

/// Raw outcome counts of one batch.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Counts {
    pub shots: u64,
    pub fidelity: u64,
    pub logical: u64,
    pub out_of_codespace: u64,
}

impl Counts {
    fn add(&mut self, c: Classification) {
        self.shots += 1;
        match c {
            Classification::Fidelity => self.fidelity += 1,
            Classification::LogicalError => self.logical += 1,
            Classification::OutOfCodespace => self.out_of_codespace += 1,
        }
    }

    fn merge(mut self, other: Counts) -> Counts {
        self.shots += other.shots;
        self.fidelity += other.fidelity;
        self.logical += other.logical;
        self.out_of_codespace += other.out_of_codespace;
        self
    }

    pub fn logical_rate(&self) -> f64 {
        self.logical as f64 / self.shots as f64
    }

    pub fn fidelity_rate(&self) -> f64 {
        self.fidelity as f64 / self.shots as f64
    }

    /// `1 − fidelity`, computed from counts.
    pub fn total_rate(&self) -> f64 {
        (self.shots - self.fidelity) as f64 / self.shots as f64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ErrorRatePoint {
    pub p: f64,
    pub shots: u64,
    pub batches: usize,
    pub logical: Spread,
    pub total: Spread,
    pub fidelity: Spread,
    pub counts: Vec<Counts>,
}

impl ErrorRatePoint {
    fn from_counts(p: f64, shots: u64, counts: Vec<Counts>) -> Self {
        let rates = |f: fn(&Counts) -> f64| counts.iter().map(f).collect::<Vec<_>>();
        ErrorRatePoint {
            p,
            shots,
            batches: counts.len(),
            logical: Spread::of(&rates(Counts::logical_rate)),
            total: Spread::of(&rates(Counts::total_rate)),
            fidelity: Spread::of(&rates(Counts::fidelity_rate)),
            counts,
        }
    }

    /// Sample variance of the batch means of a rate, or the binomial
    /// variance of the pooled estimate when batches agree exactly.
    pub fn variance_of_mean(&self, rate: fn(&Counts) -> f64) -> f64 {
        let m = self.counts.len() as f64;
        let values: Vec<f64> = self.counts.iter().map(rate).collect();
        let mean = values.iter().sum::<f64>() / m;
        let spread = if m > 1.0 {
            values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (m - 1.0) / m
        } else {
            0.0
        };
        let total = self.shots as f64 * m;
        let binomial = mean.max(1.0 / total) * (1.0 - mean).max(0.0) / total;
        spread.max(binomial)
    }
}

/// Shot default per batch: at least 10⁴, and at least 100/p.
pub fn default_shots(p: f64) -> u64 {
    if p <= 0.0 {
        return 10_000;
    }
    ((100.0 / p).ceil() as u64).max(10_000)
}

/// Base key for all substreams of `seed`.
fn base_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Generator for one trial: the seed's key with stream `batch << 32 | trial`.
pub fn trial_rng(seed: u64, batch: usize, trial: u64) -> ChaCha8Rng {
    let mut rng = base_rng(seed);
    rng.set_stream(((batch as u64) << 32) | trial);
    rng
}

fn run_counts(pipeline: &Pipeline, shots: u64, batches: usize, seed: u64) -> Result<Vec<(Counts, Counts)>> {
    let key = base_rng(seed).get_seed();
    (0..batches)
        .map(|b| {
            (0..shots)
                .into_par_iter()
                .fold(
                    || Ok((Counts::default(), Counts::default())),
                    |acc: Result<(Counts, Counts)>, t| {
                        let (mut pc, mut mc) = acc?;
                        let mut rng = ChaCha8Rng::from_seed(key);
                        rng.set_stream(((b as u64) << 32) | t);
                        let (pr, mr) = pipeline.run_both(&mut rng)?;
                        pc.add(pr.classification);
                        mc.add(mr.classification);
                        Ok((pc, mc))
                    },
                )
                .reduce(
                    || Ok((Counts::default(), Counts::default())),
                    |a, b| {
                        let (a, b) = (a?, b?);
                        Ok((a.0.merge(b.0), a.1.merge(b.1)))
                    },
                )
        })
        .collect()
}

fn check_budget(shots: u64, batches: usize) -> Result<()> {
    if shots == 0 || batches == 0 {
        return Err(Error::InvalidCode("shots and batches must be positive".into()));
    }
    if shots > u32::MAX as u64 || batches > u32::MAX as usize {
        return Err(Error::InvalidCode("at most 2^32 shots per batch and 2^32 batches".into()));
    }
    Ok(())
}

/// Runs `batches` batches of `shots` trials at physical error rate `p` (all
/// four noise probabilities set to `p`, noise kind taken from `cfg`).
/// Trial `t` of batch `b` uses its own stream, so the result does not
/// depend on the thread count.
pub fn estimate_rates(cfg: &TrialConfig, p: f64, shots: u64, batches: usize, seed: u64) -> Result<ErrorRatePoint> {
    let (practical, modified) = estimate_rates_both(cfg, p, shots, batches, seed)?;
    Ok(match cfg.method {
        Method::Practical => practical,
        Method::Modified => modified,
    })
}

/// Both methods from the same trials. Each equals what [`estimate_rates`]
/// returns for that method with the same seed.
pub fn estimate_rates_both(
    cfg: &TrialConfig,
    p: f64,
    shots: u64,
    batches: usize,
    seed: u64,
) -> Result<(ErrorRatePoint, ErrorRatePoint)> {
    check_budget(shots, batches)?;
    let pipeline = Pipeline::new(cfg)?.with_noise(NoiseModel::uniform(cfg.noise.kind, p));
    let counts = run_counts(&pipeline, shots, batches, seed)?;
    let (pc, mc): (Vec<Counts>, Vec<Counts>) = counts.into_iter().unzip();
    Ok((ErrorRatePoint::from_counts(p, shots, pc), ErrorRatePoint::from_counts(p, shots, mc)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shot_defaults() {
        assert_eq!(default_shots(0.0), 10_000);
        assert_eq!(default_shots(1e-2), 10_000);
        assert_eq!(default_shots(1e-3), 100_000);
        assert_eq!(default_shots(3e-4), 333_334);
    }

    #[test]
    fn spread_of_values() {
        let s = Spread::of(&[0.1, 0.3, 0.2]);
        assert!((s.mean - 0.2).abs() < 1e-12);
        assert_eq!((s.min, s.max), (0.1, 0.3));
    }

    #[test]
    fn streams_differ() {
        use rand::RngCore;
        let a = trial_rng(1, 0, 0).next_u64();
        let b = trial_rng(1, 0, 1).next_u64();
        let c = trial_rng(1, 1, 0).next_u64();
        assert!(a != b && a != c && b != c);
        assert_eq!(a, trial_rng(1, 0, 0).next_u64());
    }
}
