//! Cheating-receiver strategies and their empirical guessing statistics.
//!
//! A cheating Bob tries to guess the complementary substring `X_{1-B}` that
//! the protocol is meant to hide from him. The statistics collected here are
//! guessing probabilities; they are compared against analytic guessing
//! probabilities, and the link to the smooth min-entropy bounds is checked
//! separately as an analytic inequality.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{check_unit, Error, Result};
use crate::protocol::{measure, transmit, ProtocolConfig};
use crate::rng::substream;
use crate::stats::{clopper_pearson, BinomialCheck};

const ATTACK_STREAM: u64 = 0xA77A_C4ED;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "nu")]
pub enum AttackKind {
    /// Measures on arrival in basis B with the honest device.
    MeasureImmediately,
    /// Stores every qubit in a depolarising memory and measures in the right
    /// basis after the announcement.
    StoreAllDepolarizing,
    /// Stores a fraction ν (chosen independently per qubit); the rest is
    /// measured on arrival in a random basis.
    StoreFraction(f64),
    /// Memory that keeps each qubit intact with probability `memory_r` and
    /// otherwise erases it, telling Bob which were erased.
    ErasureFlagMemory,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AttackStrategy {
    pub kind: AttackKind,
    pub memory_r: f64,
    /// Number of consecutive stored qubits erased jointly (erasure memory only).
    pub burst: u32,
}

impl AttackStrategy {
    pub fn new(kind: AttackKind, memory_r: f64) -> Self {
        Self {
            kind,
            memory_r,
            burst: 1,
        }
    }

    pub fn with_burst(mut self, burst: u32) -> Self {
        self.burst = burst;
        self
    }

    pub fn validate(&self) -> Result<()> {
        check_unit("memory_r", self.memory_r)?;
        if let AttackKind::StoreFraction(nu) = self.kind {
            check_unit("nu", nu)?;
        }
        if self.burst == 0 {
            return Err(Error::Config("burst length must be at least 1".into()));
        }
        Ok(())
    }
}

/// Stored and erased qubit counts of one trial.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErasureCount {
    pub stored: u64,
    pub erased: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct AttackStats {
    pub trials: u64,
    /// Correct guesses over bits of `X_{1-B}`.
    pub per_bit_successes: u64,
    pub per_bit_opportunities: u64,
    /// Trials in which every targeted bit of `X_{1-B}` was guessed.
    pub full_string_successes: u64,
    /// Correct guesses over bits of `X_B`, for comparison with honest statistics.
    pub matched_successes: u64,
    pub matched_opportunities: u64,
    /// Per trial, erasure memory only.
    pub erased_counts: Vec<ErasureCount>,
}

impl AttackStats {
    pub fn per_bit_frequency(&self) -> f64 {
        self.per_bit_successes as f64 / self.per_bit_opportunities.max(1) as f64
    }

    pub fn full_string_frequency(&self) -> f64 {
        self.full_string_successes as f64 / self.trials.max(1) as f64
    }

    /// Adds another batch of independent trials.
    pub fn merge(&mut self, other: AttackStats) {
        self.trials += other.trials;
        self.per_bit_successes += other.per_bit_successes;
        self.per_bit_opportunities += other.per_bit_opportunities;
        self.full_string_successes += other.full_string_successes;
        self.matched_successes += other.matched_successes;
        self.matched_opportunities += other.matched_opportunities;
        self.erased_counts.extend(other.erased_counts);
    }
}

/// Analytic probability of guessing one bit of `X_{1-B}` correctly.
pub fn analytic_per_bit_success(strategy: &AttackStrategy, r_pre: f64) -> f64 {
    let stored = (1.0 + r_pre * strategy.memory_r) / 2.0;
    match strategy.kind {
        AttackKind::MeasureImmediately => 0.5,
        AttackKind::StoreAllDepolarizing | AttackKind::ErasureFlagMemory => stored,
        AttackKind::StoreFraction(nu) => {
            let random_basis = 0.5 * (1.0 + r_pre) / 2.0 + 0.25;
            nu * stored + (1.0 - nu) * random_basis
        }
    }
}

/// Runs `trials` independent cheating sessions.
///
/// With `target_bits = Some(k)` each trial stops as soon as `k` bits of
/// `X_{1-B}` have been received and only those are guessed; `n_prime` then
/// caps the number of symbols sent. Otherwise all `n_prime` symbols are sent
/// and the whole complementary substring is the target.
pub fn run_attack(
    config: &ProtocolConfig,
    strategy: &AttackStrategy,
    trials: u64,
    target_bits: Option<usize>,
) -> Result<AttackStats> {
    config.noise.validate()?;
    strategy.validate()?;
    if trials == 0 {
        return Err(Error::Config(
            "at least one attack trial is required".into(),
        ));
    }
    let batches: Vec<AttackStats> = (0..trials)
        .into_par_iter()
        .map(|t| run_trial(config, strategy, t, target_bits))
        .collect::<Result<_>>()?;
    let mut stats = AttackStats::default();
    for b in batches {
        stats.merge(b);
    }
    Ok(stats)
}

fn run_trial(
    config: &ProtocolConfig,
    strategy: &AttackStrategy,
    trial: u64,
    target_bits: Option<usize>,
) -> Result<AttackStats> {
    let mut rng = substream(config.master_seed, trial, ATTACK_STREAM);
    let noise = &config.noise;
    let b: bool = rng.random();
    let mut stats = AttackStats {
        trials: 1,
        ..Default::default()
    };
    let mut all_correct = true;
    let mut erasure = ErasureCount::default();
    let mut burst_left = 0u32;
    let mut burst_erased = false;

    for _ in 0..config.n_prime {
        if target_bits.is_some_and(|k| stats.per_bit_opportunities as usize >= k) {
            break;
        }
        let sym = transmit(&mut rng, noise);
        if sym.lost {
            continue;
        }
        let guess = match strategy.kind {
            AttackKind::MeasureImmediately => measure(&mut rng, &sym, b, noise.r_mea),
            AttackKind::StoreAllDepolarizing => {
                measure(&mut rng, &sym, sym.basis, strategy.memory_r)
            }
            AttackKind::StoreFraction(nu) => {
                if rng.random_bool(nu) {
                    measure(&mut rng, &sym, sym.basis, strategy.memory_r)
                } else {
                    let basis = rng.random();
                    measure(&mut rng, &sym, basis, 1.0)
                }
            }
            AttackKind::ErasureFlagMemory => {
                if burst_left == 0 {
                    burst_erased = !rng.random_bool(strategy.memory_r);
                    burst_left = strategy.burst;
                }
                burst_left -= 1;
                erasure.stored += 1;
                if burst_erased {
                    erasure.erased += 1;
                    rng.random()
                } else {
                    measure(&mut rng, &sym, sym.basis, 1.0)
                }
            }
        };
        let correct = guess == sym.bit;
        if sym.basis != b {
            stats.per_bit_opportunities += 1;
            stats.per_bit_successes += u64::from(correct);
            all_correct &= correct;
        } else {
            stats.matched_opportunities += 1;
            stats.matched_successes += u64::from(correct);
        }
    }

    if let Some(k) = target_bits {
        if (stats.per_bit_opportunities as usize) < k {
            return Err(Error::Config(format!(
                "n_prime = {} too small to collect {k} complementary bits",
                config.n_prime
            )));
        }
    }
    stats.full_string_successes = u64::from(all_correct);
    if strategy.kind == AttackKind::ErasureFlagMemory {
        stats.erased_counts.push(erasure);
    }
    Ok(stats)
}

/// `-(1/k) log2` of the full-string success frequency with a 95%
/// Clopper–Pearson interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GuessingExponent {
    /// `None` when no trial succeeded; only the lower bound is informative then.
    pub estimate: Option<f64>,
    pub lower: f64,
    pub upper: f64,
    pub success_frequency: f64,
    pub success_interval: (f64, f64),
    pub degenerate: bool,
}

pub fn empirical_guessing_exponent(stats: &AttackStats, k: usize) -> Result<GuessingExponent> {
    if k == 0 || stats.trials == 0 {
        return Err(Error::Config(
            "guessing exponent needs k >= 1 and at least one trial".into(),
        ));
    }
    let to_exp = |p: f64| -p.log2() / k as f64;
    let freq = stats.full_string_frequency();
    let (lo, hi) = clopper_pearson(stats.full_string_successes, stats.trials, 0.95);
    let degenerate = stats.full_string_successes == 0;
    Ok(GuessingExponent {
        estimate: (!degenerate).then(|| to_exp(freq)),
        lower: to_exp(hi),
        upper: if lo > 0.0 { to_exp(lo) } else { f64::INFINITY },
        success_frequency: freq,
        success_interval: (lo, hi),
        degenerate,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErasureReport {
    pub trials: u64,
    pub mean_erased: f64,
    pub var_erased: f64,
    pub mean_stored: f64,
    /// `(1 - r)` times the mean stored count.
    pub expected_mean: f64,
    /// Binomial variance `r (1 - r)` times the mean stored count.
    pub expected_var: f64,
    /// Standardised deviation of the total erased count from its binomial mean.
    pub z: f64,
    /// Observed squared deviations over their binomial expectation; about 1
    /// for independent erasures, about the burst length for burst erasures.
    pub dispersion: f64,
    pub within_4_sigma: bool,
}

/// Compares per-trial erased counts with `Binomial(stored, 1 - r)`.
pub fn erased_count_concentration(stats: &AttackStats, r: f64) -> Result<ErasureReport> {
    let r = check_unit("r", r)?;
    if stats.erased_counts.is_empty() {
        return Err(Error::Config(
            "no erasure counts recorded (erasure memory only)".into(),
        ));
    }
    let n = stats.erased_counts.len() as f64;
    let (mean_erased, var_erased) =
        crate::stats::mean_variance(stats.erased_counts.iter().map(|c| c.erased as f64));
    let total_stored: f64 = stats.erased_counts.iter().map(|c| c.stored as f64).sum();
    let total_erased: f64 = stats.erased_counts.iter().map(|c| c.erased as f64).sum();
    let mean_stored = total_stored / n;
    let q = 1.0 - r;
    let sigma = (r * q * total_stored).sqrt();
    let diff = total_erased - q * total_stored;
    let z = if sigma > 0.0 {
        diff / sigma
    } else if diff.abs() < 0.5 {
        0.0
    } else {
        f64::INFINITY
    };
    let sq: f64 = stats
        .erased_counts
        .iter()
        .map(|c| (c.erased as f64 - q * c.stored as f64).powi(2))
        .sum();
    let dispersion = if sigma > 0.0 {
        sq / (r * q * total_stored)
    } else {
        0.0
    };
    Ok(ErasureReport {
        trials: stats.erased_counts.len() as u64,
        mean_erased,
        var_erased,
        mean_stored,
        expected_mean: q * mean_stored,
        expected_var: r * q * mean_stored,
        z,
        dispersion,
        within_4_sigma: z.abs() <= 4.0,
    })
}

/// Per-bit success check against the analytic value.
pub fn per_bit_check(stats: &AttackStats, strategy: &AttackStrategy, r_pre: f64) -> BinomialCheck {
    BinomialCheck::new(
        stats.per_bit_successes,
        stats.per_bit_opportunities,
        analytic_per_bit_success(strategy, r_pre),
    )
}
