//! Monte-Carlo simulation of honest error-tolerant 1-2 ROT^ℓ sessions.
//!
//! Qubits are never represented as density matrices. Every channel in play
//! (loss, depolarisation at preparation and at measurement) acts on BB84
//! outcomes in a way that is captured exactly by sampling each symbol's
//! outcome from its conditional distribution: a basis match on an intact
//! qubit yields Alice's bit, anything else yields a uniform bit.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bits::Bits;
use crate::coding::{decode, syndrome, toeplitz_hash, LinearCode, Syndrome, ToeplitzSeed};
use crate::entropy::{minentropy_rate_rational, rate_bound, BoundKind};
use crate::error::{Error, Result};
use crate::rates::{asymptotic_syndrome_len, ell_finite, NoiseModel, SecurityParams};
use crate::rng::{stream, SimRng};

/// How Bob's errors are corrected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "backend", content = "code")]
pub enum EcBackend {
    /// Real syndrome decoding with the code; leakage is the actual syndrome length.
    Code(LinearCode),
    /// Decoding succeeds exactly when every block's true error weight is within
    /// the code's radius; leakage is charged at the asymptotic rate.
    Oracle(LinearCode),
}

impl EcBackend {
    pub fn code(&self) -> &LinearCode {
        match self {
            EcBackend::Code(c) | EcBackend::Oracle(c) => c,
        }
    }

    pub fn is_oracle(&self) -> bool {
        matches!(self, EcBackend::Oracle(_))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EllPolicy {
    Fixed(u64),
    /// ℓ from the leftover hash lemma with the given min-entropy bound.
    Computed(BoundKind),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProtocolConfig {
    pub n_prime: usize,
    pub noise: NoiseModel,
    pub security: SecurityParams,
    pub ec: EcBackend,
    pub ell_policy: EllPolicy,
    pub master_seed: u64,
}

impl ProtocolConfig {
    pub fn new(n_prime: usize, noise: NoiseModel, master_seed: u64) -> Self {
        Self {
            n_prime,
            noise,
            security: SecurityParams::default(),
            ec: EcBackend::Code(LinearCode::hamming_7_4()),
            ell_policy: EllPolicy::Computed(BoundKind::Rational),
            master_seed,
        }
    }

    /// Checks parameter ranges, the minimum expected sample size and that a
    /// fixed ℓ does not exceed what the configured bound allows at the
    /// expected sample sizes.
    pub fn validate(&self) -> Result<()> {
        if self.n_prime == 0 {
            return Err(Error::Config("n_prime must be at least 1".into()));
        }
        self.noise.validate()?;
        self.security.validate()?;
        let expected = self.noise.eta * self.n_prime as f64;
        let min = 2 * self.ec.code().block_len();
        if expected < min as f64 {
            return Err(Error::Config(format!(
                "expected detections eta * n_prime = {expected} below two code blocks ({min})"
            )));
        }
        if let EllPolicy::Fixed(ell) = self.ell_policy {
            let n_c = (expected / 2.0).floor() as usize;
            let allowed = self.ell_for(n_c, n_c, BoundKind::Rational)?;
            if ell > allowed {
                return Err(Error::Config(format!(
                    "fixed ell = {ell} exceeds {allowed}, the largest secure length at the expected \
                     substring size {n_c} under the rational bound"
                )));
            }
        }
        Ok(())
    }

    /// Min-entropy rate of the complementary substring per bit, capped at 1/2.
    ///
    /// Assumes the rate of a random substring equals the full-string rate,
    /// without finite-size sampling corrections.
    pub fn substring_rate(&self, bound: BoundKind) -> Result<f64> {
        let r_dis = self.noise.r_dis();
        let rate = match bound {
            BoundKind::Rational => minentropy_rate_rational(r_dis, self.noise.nu)?,
            other => rate_bound(other, r_dis, self.noise.nu, self.noise.m)?,
        };
        Ok(rate.get().min(0.5))
    }

    /// Syndrome bits charged for a substring of `n_c` bits.
    pub fn syndrome_charge(&self, n_c: usize) -> Result<u64> {
        match &self.ec {
            EcBackend::Code(code) => Ok(code.syndrome_len_for(n_c) as u64),
            EcBackend::Oracle(_) => asymptotic_syndrome_len(n_c, self.noise.r1()),
        }
    }

    /// ℓ for announced substring sizes; Alice does not know B, so the smaller
    /// substring and the larger syndrome are charged.
    pub fn ell_for(&self, n0: usize, n1: usize, bound: BoundKind) -> Result<u64> {
        let n_c = n0.min(n1);
        let hmin = self.substring_rate(bound)? * n_c as f64;
        let leak = self.syndrome_charge(n0)?.max(self.syndrome_charge(n1)?);
        Ok(ell_finite(hmin, leak, self.security.eps_h))
    }

    fn ell(&self, n0: usize, n1: usize) -> Result<u64> {
        match self.ell_policy {
            EllPolicy::Fixed(ell) => Ok(ell),
            EllPolicy::Computed(bound) => self.ell_for(n0, n1, bound),
        }
    }
}

/// One prepared and transmitted BB84 symbol.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChannelSymbol {
    pub bit: bool,
    pub basis: bool,
    pub lost: bool,
    /// Replaced by the maximally mixed state at preparation.
    pub depolarized: bool,
}

/// Alice's preparation followed by the lossy channel.
pub fn transmit<R: Rng + ?Sized>(rng: &mut R, noise: &NoiseModel) -> ChannelSymbol {
    let bit = rng.random();
    let basis = rng.random();
    let lost = !rng.random_bool(noise.eta);
    let depolarized = !rng.random_bool(noise.r_pre);
    ChannelSymbol {
        bit,
        basis,
        lost,
        depolarized,
    }
}

/// Outcome of measuring `symbol` in `basis` with a device that depolarises
/// with parameter `r_device`.
pub fn measure<R: Rng + ?Sized>(
    rng: &mut R,
    symbol: &ChannelSymbol,
    basis: bool,
    r_device: f64,
) -> bool {
    let device_noise = !rng.random_bool(r_device);
    if symbol.basis == basis && !symbol.depolarized && !device_noise {
        symbol.bit
    } else {
        rng.random()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AbortReason {
    LossTest,
    Configuration,
}

/// Prepared and detected counts of one `(x, θ)` preparation cell.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellCount {
    pub prepared: u64,
    pub detected: u64,
}

/// Cell index of a preparation `(x, θ)`.
pub fn cell_index(bit: bool, basis: bool) -> usize {
    (bit as usize) | (basis as usize) << 1
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum LossTestOutcome {
    Pass,
    Abort {
        cell: usize,
        deviation: f64,
        radius: f64,
    },
}

impl LossTestOutcome {
    pub fn passed(&self) -> bool {
        matches!(self, LossTestOutcome::Pass)
    }
}

/// Hoeffding radius `sqrt(size ln(8/ε) / 2)` for one cell.
pub fn loss_test_radius(cell_size: u64, eps_test: f64) -> f64 {
    (cell_size as f64 * (8.0 / eps_test).ln() / 2.0).sqrt()
}

/// Per-cell two-sided Hoeffding test of the detection counts against `η`,
/// union-bounded over the four cells so an honest run aborts with probability
/// at most `eps_test`. Checks both the overall loss rate and its independence
/// from the prepared state.
pub fn loss_test(cells: &[CellCount; 4], eta: f64, eps_test: f64) -> LossTestOutcome {
    for (i, c) in cells.iter().enumerate() {
        debug_assert!(c.detected <= c.prepared);
        let deviation = (c.detected as f64 - eta * c.prepared as f64).abs();
        let radius = loss_test_radius(c.prepared, eps_test);
        if deviation > radius {
            return LossTestOutcome::Abort {
                cell: i,
                deviation,
                radius,
            };
        }
    }
    LossTestOutcome::Pass
}

/// Splits detected positions by Alice's basis: `(I0, I1)` index into `theta`.
pub fn sift(theta: &Bits) -> (Vec<usize>, Vec<usize>) {
    (0..theta.len()).partition(|&j| !theta[j])
}

pub fn alice_outputs(
    x0: &Bits,
    x1: &Bits,
    f0: &ToeplitzSeed,
    f1: &ToeplitzSeed,
) -> Result<(Bits, Bits)> {
    Ok((toeplitz_hash(f0, x0)?, toeplitz_hash(f1, x1)?))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BobOutput {
    pub s_tilde: Bits,
    pub corrected: Bits,
    pub ec_failed: bool,
}

/// Bob corrects `y_b` with the syndrome and hashes the result.
///
/// `ec_failed` reports flagged blocks only; a miscorrection that the decoder
/// cannot see is caught by [`run_session`], which compares against Alice's
/// string.
pub fn bob_outputs(
    y_b: &Bits,
    sigma_b: &Syndrome,
    f_b: &ToeplitzSeed,
    code: &LinearCode,
) -> Result<BobOutput> {
    let decoded = decode(code, y_b, sigma_b)?;
    let s_tilde = toeplitz_hash(f_b, &decoded.corrected)?;
    Ok(BobOutput {
        s_tilde,
        ec_failed: decoded.failed(),
        corrected: decoded.corrected,
    })
}

/// Oracle correction: blocks whose true error weight is within the radius
/// are fixed, the rest are left as received.
pub fn oracle_correct(code: &LinearCode, x_b: &Bits, y_b: &Bits) -> (Bits, bool) {
    let mut corrected = y_b.clone();
    let mut failed = false;
    let n_b = code.block_len();
    for start in (0..y_b.len()).step_by(n_b) {
        let end = (start + n_b).min(y_b.len());
        let weight = (start..end).filter(|&j| x_b[j] != y_b[j]).count();
        if weight <= code.correction_radius() {
            for j in start..end {
                corrected.set(j, x_b[j]);
            }
        } else {
            failed = true;
        }
    }
    (corrected, failed)
}

/// Probability that a block of `len` bits sees more than `t` flips at rate `p`.
pub fn block_failure_probability(len: usize, t: usize, p: f64) -> f64 {
    let ok: f64 = (0..=t.min(len))
        .map(|w| binomial(len, w) * p.powi(w as i32) * (1.0 - p).powi((len - w) as i32))
        .sum();
    (1.0 - ok).max(0.0)
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Probability that oracle correction of an `len`-bit string fails, with
/// independent flips at rate `p` and a partial last block.
pub fn oracle_failure_probability(code: &LinearCode, len: usize, p: f64) -> f64 {
    let n_b = code.block_len();
    let t = code.correction_radius();
    let full = len / n_b;
    let rest = len % n_b;
    let ok_full = (1.0 - block_failure_probability(n_b, t, p)).powi(full as i32);
    let ok_rest = if rest > 0 {
        1.0 - block_failure_probability(rest, t, p)
    } else {
        1.0
    };
    1.0 - ok_full * ok_rest
}

/// Full record of one simulated session. Index sets `I0`, `I1` refer to
/// positions in the detected strings `X`, `Theta`, `Y`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Transcript {
    pub x_full: Bits,
    pub theta_full: Bits,
    pub detected_indices: Vec<usize>,
    #[serde(rename = "X")]
    pub x: Bits,
    #[serde(rename = "Theta")]
    pub theta: Bits,
    #[serde(rename = "B")]
    pub b: bool,
    #[serde(rename = "Y")]
    pub y: Bits,
    #[serde(rename = "I0")]
    pub i0: Vec<usize>,
    #[serde(rename = "I1")]
    pub i1: Vec<usize>,
    #[serde(rename = "Sigma0")]
    pub sigma0: Syndrome,
    #[serde(rename = "Sigma1")]
    pub sigma1: Syndrome,
    #[serde(rename = "F0")]
    pub f0: ToeplitzSeed,
    #[serde(rename = "F1")]
    pub f1: ToeplitzSeed,
    #[serde(rename = "S0")]
    pub s0: Bits,
    #[serde(rename = "S1")]
    pub s1: Bits,
    #[serde(rename = "S_tilde_B")]
    pub s_tilde_b: Bits,
    pub abort_reason: Option<AbortReason>,
    pub ec_failed: bool,
}

/// Matched- and mismatched-basis outcome counts of a transcript.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChannelCounts {
    pub matched: u64,
    pub matched_errors: u64,
    pub mismatched: u64,
    pub mismatched_agreements: u64,
}

impl std::ops::AddAssign for ChannelCounts {
    fn add_assign(&mut self, o: Self) {
        self.matched += o.matched;
        self.matched_errors += o.matched_errors;
        self.mismatched += o.mismatched;
        self.mismatched_agreements += o.mismatched_agreements;
    }
}

impl Transcript {
    pub fn aborted(&self) -> bool {
        self.abort_reason.is_some()
    }

    pub fn n(&self) -> usize {
        self.x.len()
    }

    pub fn ell(&self) -> usize {
        self.s0.len()
    }

    /// Bob's sifted string `S_B` as output by Alice.
    pub fn s_b(&self) -> &Bits {
        if self.b {
            &self.s1
        } else {
            &self.s0
        }
    }

    /// True when Bob's output differs from Alice's `S_B` in a non-aborted run.
    pub fn output_mismatch(&self) -> bool {
        !self.aborted() && &self.s_tilde_b != self.s_b()
    }

    pub fn channel_counts(&self) -> ChannelCounts {
        let mut c = ChannelCounts::default();
        for j in 0..self.n() {
            let agree = self.x[j] == self.y[j];
            if self.theta[j] == self.b {
                c.matched += 1;
                c.matched_errors += u64::from(!agree);
            } else {
                c.mismatched += 1;
                c.mismatched_agreements += u64::from(agree);
            }
        }
        c
    }

    /// Prepared/detected counts per `(x, θ)` cell.
    pub fn cells(&self) -> [CellCount; 4] {
        let mut cells = [CellCount::default(); 4];
        for j in 0..self.x_full.len() {
            cells[cell_index(self.x_full[j], self.theta_full[j])].prepared += 1;
        }
        for &j in &self.detected_indices {
            cells[cell_index(self.x_full[j], self.theta_full[j])].detected += 1;
        }
        cells
    }
}

fn empty_seed() -> ToeplitzSeed {
    ToeplitzSeed {
        bits: Bits::new(),
        input_len: 0,
        output_len: 0,
    }
}

fn empty_syndrome() -> Syndrome {
    Syndrome { bits: Bits::new() }
}

/// Session 0 of the configuration.
pub fn run_honest_session(config: &ProtocolConfig) -> Result<Transcript> {
    run_session(config, 0)
}

/// Runs session `index`, drawing from its own derived random stream.
pub fn run_session(config: &ProtocolConfig, index: u64) -> Result<Transcript> {
    config.validate()?;
    let mut rng: SimRng = stream(config.master_seed, index);
    let noise = &config.noise;

    // preparation, transmission, immediate measurement in basis B
    let b: bool = rng.random();
    let mut x_full = Bits::with_capacity(config.n_prime);
    let mut theta_full = Bits::with_capacity(config.n_prime);
    let mut detected_indices = Vec::new();
    let mut y = Bits::new();
    for j in 0..config.n_prime {
        let sym = transmit(&mut rng, noise);
        x_full.push(sym.bit);
        theta_full.push(sym.basis);
        if !sym.lost {
            detected_indices.push(j);
            y.push(measure(&mut rng, &sym, b, noise.r_mea));
        }
    }
    let x = x_full.select(&detected_indices);
    let theta = theta_full.select(&detected_indices);

    let mut transcript = Transcript {
        x_full,
        theta_full,
        detected_indices,
        x,
        theta,
        b,
        y,
        i0: Vec::new(),
        i1: Vec::new(),
        sigma0: empty_syndrome(),
        sigma1: empty_syndrome(),
        f0: empty_seed(),
        f1: empty_seed(),
        s0: Bits::new(),
        s1: Bits::new(),
        s_tilde_b: Bits::new(),
        abort_reason: None,
        ec_failed: false,
    };

    // detection report and loss test
    if !loss_test(&transcript.cells(), noise.eta, config.security.eps_test).passed() {
        transcript.abort_reason = Some(AbortReason::LossTest);
        return Ok(transcript);
    }

    // waiting time Δt: nothing happens to an honest Bob

    let (i0, i1) = sift(&transcript.theta);
    let x0 = transcript.x.select(&i0);
    let x1 = transcript.x.select(&i1);
    let code = config.ec.code();
    let sigma0 = syndrome(code, &x0);
    let sigma1 = syndrome(code, &x1);
    let ell = match config.ell(x0.len(), x1.len()) {
        Ok(ell) => ell as usize,
        Err(_) => {
            transcript.abort_reason = Some(AbortReason::Configuration);
            return Ok(transcript);
        }
    };
    let f0 = ToeplitzSeed::random(&mut rng, x0.len(), ell);
    let f1 = ToeplitzSeed::random(&mut rng, x1.len(), ell);
    let (s0, s1) = alice_outputs(&x0, &x1, &f0, &f1)?;

    let (i_b, x_b, sigma_b, f_b) = if b {
        (&i1, &x1, &sigma1, &f1)
    } else {
        (&i0, &x0, &sigma0, &f0)
    };
    let y_b = transcript.y.select(i_b);
    let (s_tilde_b, ec_failed) = match &config.ec {
        EcBackend::Code(code) => {
            let out = bob_outputs(&y_b, sigma_b, f_b, code)?;
            let miscorrected = &out.corrected != x_b;
            (out.s_tilde, out.ec_failed || miscorrected)
        }
        EcBackend::Oracle(code) => {
            let (corrected, failed) = oracle_correct(code, x_b, &y_b);
            (toeplitz_hash(f_b, &corrected)?, failed)
        }
    };

    transcript.i0 = i0;
    transcript.i1 = i1;
    transcript.sigma0 = sigma0;
    transcript.sigma1 = sigma1;
    transcript.f0 = f0;
    transcript.f1 = f1;
    transcript.s0 = s0;
    transcript.s1 = s1;
    transcript.s_tilde_b = s_tilde_b;
    transcript.ec_failed = ec_failed;
    Ok(transcript)
}

/// Runs sessions `0..count` in parallel; the output order is the session order.
pub fn run_sessions(config: &ProtocolConfig, count: u64) -> Result<Vec<Transcript>> {
    config.validate()?;
    (0..count)
        .into_par_iter()
        .map(|i| run_session(config, i))
        .collect()
}

/// Aggregate statistics over many sessions.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SessionSummary {
    pub sessions: u64,
    pub aborted: u64,
    pub ec_failed: u64,
    pub output_mismatch: u64,
    pub mean_ell: f64,
    pub mean_detected: f64,
    pub channel: ChannelCounts,
    /// Mean over non-aborted sessions of the analytic oracle failure
    /// probability for the realised `|I_B|`.
    pub analytic_ec_failure: f64,
}

impl SessionSummary {
    pub fn from_transcripts(config: &ProtocolConfig, transcripts: &[Transcript]) -> Self {
        let mut s = SessionSummary {
            sessions: transcripts.len() as u64,
            ..Default::default()
        };
        let p = (1.0 - config.noise.r1()) / 2.0;
        let mut ell_sum = 0.0;
        let mut analytic_sum = 0.0;
        let mut detected_sum = 0.0;
        for t in transcripts {
            detected_sum += t.n() as f64;
            s.channel += t.channel_counts();
            if t.aborted() {
                s.aborted += 1;
                continue;
            }
            s.ec_failed += u64::from(t.ec_failed);
            s.output_mismatch += u64::from(t.output_mismatch());
            ell_sum += t.ell() as f64;
            let len_b = if t.b { t.i1.len() } else { t.i0.len() };
            analytic_sum += oracle_failure_probability(config.ec.code(), len_b, p);
        }
        let completed = (s.sessions - s.aborted) as f64;
        if completed > 0.0 {
            s.mean_ell = ell_sum / completed;
            s.analytic_ec_failure = analytic_sum / completed;
        }
        if s.sessions > 0 {
            s.mean_detected = detected_sum / s.sessions as f64;
        }
        s
    }

    pub fn abort_rate(&self) -> f64 {
        self.aborted as f64 / self.sessions.max(1) as f64
    }

    pub fn completed(&self) -> u64 {
        self.sessions - self.aborted
    }

    pub fn mismatch_rate(&self) -> f64 {
        self.output_mismatch as f64 / self.completed().max(1) as f64
    }

    pub fn matched_error_rate(&self) -> f64 {
        self.channel.matched_errors as f64 / self.channel.matched.max(1) as f64
    }

    pub fn mismatched_agreement_rate(&self) -> f64 {
        self.channel.mismatched_agreements as f64 / self.channel.mismatched.max(1) as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::BinomialCheck;

    fn noiseless(n_prime: usize) -> ProtocolConfig {
        ProtocolConfig::new(
            n_prime,
            NoiseModel {
                r_mem: 0.4,
                ..NoiseModel::default()
            },
            11,
        )
    }

    #[test]
    fn noiseless_session_agrees() {
        let cfg = noiseless(4000);
        for i in 0..5 {
            let t = run_session(&cfg, i).unwrap();
            assert!(!t.aborted());
            assert!(!t.ec_failed);
            assert!(t.ell() > 0);
            assert_eq!(&t.s_tilde_b, t.s_b());
            assert_eq!(t.n(), 4000);
            assert_eq!(t.channel_counts().matched_errors, 0);
        }
    }

    #[test]
    fn transcript_invariants() {
        let mut cfg = noiseless(3000);
        cfg.noise.eta = 0.6;
        cfg.noise.r_pre = 0.97;
        let t = run_session(&cfg, 3).unwrap();
        assert!(!t.aborted());
        assert_eq!(t.i0.len() + t.i1.len(), t.n());
        assert!(t.i0.iter().all(|&j| !t.theta[j]));
        assert!(t.i1.iter().all(|&j| t.theta[j]));
        let code = cfg.ec.code();
        assert_eq!(t.sigma0, syndrome(code, &t.x.select(&t.i0)));
        assert_eq!(t.sigma1, syndrome(code, &t.x.select(&t.i1)));
        assert_eq!(t.x, t.x_full.select(&t.detected_indices));
        if !t.ec_failed {
            assert_eq!(&t.s_tilde_b, t.s_b());
        }
    }

    #[test]
    fn transcripts_are_deterministic() {
        let mut cfg = noiseless(1000);
        cfg.noise.r_pre = 0.9;
        cfg.noise.eta = 0.7;
        let a = serde_json::to_string(&run_session(&cfg, 4).unwrap()).unwrap();
        let b = serde_json::to_string(&run_session(&cfg, 4).unwrap()).unwrap();
        assert_eq!(a, b);
        let c = serde_json::to_string(&run_session(&cfg, 5).unwrap()).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn transcript_json_field_names() {
        let t = run_session(&noiseless(100), 0).unwrap();
        let v: serde_json::Value = serde_json::to_value(&t).unwrap();
        for key in [
            "x_full",
            "theta_full",
            "detected_indices",
            "X",
            "Theta",
            "B",
            "Y",
            "I0",
            "I1",
            "Sigma0",
            "Sigma1",
            "F0",
            "F1",
            "S0",
            "S1",
            "S_tilde_B",
            "abort_reason",
            "ec_failed",
        ] {
            assert!(v.get(key).is_some(), "missing {key}");
        }
        let back: Transcript = serde_json::from_value(v).unwrap();
        assert_eq!(back, t);
    }

    #[test]
    fn loss_test_examples() {
        let exact = [CellCount {
            prepared: 10_000,
            detected: 9_000,
        }; 4];
        assert!(loss_test(&exact, 0.9, 1e-3).passed());
        let mut bad = exact;
        bad[2].detected = 0;
        match loss_test(&bad, 0.9, 1e-3) {
            LossTestOutcome::Abort { cell, .. } => assert_eq!(cell, 2),
            LossTestOutcome::Pass => panic!("should abort"),
        }
    }

    #[test]
    fn loss_test_false_abort_rate() {
        let mut cfg = noiseless(4000);
        cfg.noise.eta = 0.5;
        cfg.security.eps_test = 0.2;
        let runs = 2000u64;
        let aborted = (0..runs)
            .into_par_iter()
            .filter(|&i| run_session(&cfg, i).unwrap().aborted())
            .count() as u64;
        let check = BinomialCheck::new(aborted, runs, 0.2);
        assert!(check.not_above(4.0), "{check:?}");
    }

    #[test]
    fn full_detection_never_aborts() {
        let cfg = noiseless(500);
        for i in 0..50 {
            assert!(!run_session(&cfg, i).unwrap().aborted());
        }
    }

    #[test]
    fn sift_examples() {
        let zeros = Bits::zeros(5);
        let (i0, i1) = sift(&zeros);
        assert_eq!(i0.len(), 5);
        assert!(i1.is_empty());
        let alt: Bits = (0..7).map(|j| j % 2 == 1).collect();
        let (i0, i1) = sift(&alt);
        assert_eq!(i0.len(), 4);
        assert_eq!(i1.len(), 3);
        let t = run_session(&noiseless(20_000), 0).unwrap();
        assert!(BinomialCheck::new(t.i0.len() as u64, t.n() as u64, 0.5).within(3.0));
    }

    #[test]
    fn alice_outputs_examples() {
        let mut rng = stream(1, 1);
        let f0 = ToeplitzSeed::random(&mut rng, 50, 0);
        let f1 = ToeplitzSeed::random(&mut rng, 40, 0);
        let (s0, s1) = alice_outputs(&Bits::zeros(50), &Bits::zeros(40), &f0, &f1).unwrap();
        assert!(s0.is_empty() && s1.is_empty());
        let f0 = ToeplitzSeed::random(&mut rng, 50, 8);
        let f1 = ToeplitzSeed::random(&mut rng, 40, 8);
        let x1: Bits = (0..40).map(|j| j % 3 == 0).collect();
        let (s0, _) = alice_outputs(&Bits::zeros(50), &x1, &f0, &f1).unwrap();
        assert_eq!(s0, Bits::zeros(8));
    }

    #[test]
    fn bob_outputs_with_and_without_errors() {
        let code = LinearCode::hamming_7_4();
        let mut rng = stream(2, 2);
        let x: Bits = (0..70).map(|_| rng.random()).collect();
        let sigma = syndrome(&code, &x);
        let f = ToeplitzSeed::random(&mut rng, 70, 16);
        let s = toeplitz_hash(&f, &x).unwrap();
        let out = bob_outputs(&x, &sigma, &f, &code).unwrap();
        assert_eq!(out.s_tilde, s);
        // one error per block is always fixed
        let mut y = x.clone();
        for b in 0..10 {
            y.set(b * 7 + b % 7, !y[b * 7 + b % 7]);
        }
        let out = bob_outputs(&y, &sigma, &f, &code).unwrap();
        assert_eq!(out.s_tilde, s);
        assert!(!out.ec_failed);
        // two errors in one block: flagged or visibly wrong, never a silent success
        let mut y2 = x.clone();
        y2.set(0, !y2[0]);
        y2.set(1, !y2[1]);
        let out = bob_outputs(&y2, &sigma, &f, &code).unwrap();
        assert!(out.ec_failed || out.corrected != x);
    }

    #[test]
    fn oracle_failure_probability_small_cases() {
        let code = LinearCode::hamming_7_4();
        assert_eq!(oracle_failure_probability(&code, 70, 0.0), 0.0);
        let p = 0.1;
        let block = 1.0 - 0.9f64.powi(7) - 7.0 * p * 0.9f64.powi(6);
        assert!((block_failure_probability(7, 1, p) - block).abs() < 1e-15);
        let want =
            1.0 - (1.0 - block).powi(2) * (1.0 - (1.0 - 0.9f64.powi(3) - 3.0 * p * 0.9f64.powi(2)));
        assert!((oracle_failure_probability(&code, 17, p) - want).abs() < 1e-12);
    }

    #[test]
    fn oracle_backend_leaks_asymptotically() {
        let mut cfg = noiseless(1000);
        cfg.noise.r_pre = 0.9;
        cfg.ec = EcBackend::Oracle(LinearCode::hamming_7_4());
        assert_eq!(cfg.syndrome_charge(1000).unwrap(), 287);
        cfg.ec = EcBackend::Code(LinearCode::hamming_7_4());
        assert_eq!(cfg.syndrome_charge(1000).unwrap(), 429);
    }

    #[test]
    fn validation_rejects_bad_configs() {
        let mut cfg = noiseless(10);
        cfg.noise.eta = 0.5;
        assert!(cfg.validate().is_err());
        let mut cfg = noiseless(4000);
        cfg.ell_policy = EllPolicy::Fixed(10_000);
        let err = cfg.validate().unwrap_err();
        assert!(err.to_string().contains("exceeds"));
        cfg.ell_policy = EllPolicy::Fixed(10);
        assert!(cfg.validate().is_ok());
        let mut cfg = noiseless(0);
        cfg.n_prime = 0;
        assert!(run_honest_session(&cfg).is_err());
    }

    #[test]
    fn detection_count_moments() {
        let mut cfg = noiseless(2000);
        cfg.noise.eta = 0.3;
        let runs = 1000;
        let ns: Vec<f64> = run_sessions(&cfg, runs)
            .unwrap()
            .iter()
            .map(|t| t.n() as f64)
            .collect();
        let (mean, var) = crate::stats::mean_variance(ns);
        let mu = 0.3 * 2000.0;
        let v = 0.3 * 0.7 * 2000.0;
        assert!((mean - mu).abs() <= 4.0 * (v / runs as f64).sqrt());
        // variance of the sample variance for a near-normal count: 2 v² / (N - 1)
        assert!((var - v).abs() <= 4.0 * (2.0 * v * v / (runs - 1) as f64).sqrt());
    }
}
