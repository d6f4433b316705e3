//! OT bit rates, secure-region boundaries and finite string lengths.
//!
//! Two trusted-noise scenarios are covered. In scenario 1 the honest noise
//! is split between preparation and measurement, `r1 = r_pre * r_mea`, and the
//! cheater's stored qubits see `r_dis = r_pre * r_mem`. In scenario 2 all
//! trusted noise sits at preparation, `r2 = r_pre`, and the memory parameter
//! `r_mem` is the free variable. The bit rate is the min-entropy rate of the
//! complementary string (capped at 1/2) minus the syndrome leakage
//! `h((1+r)/2)` per photon.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::entropy::{
    binary_entropy, minentropy_rate_rational, rate_bound, BoundKind, BISECTION_TOL,
};
use crate::error::{check_unit, Error, Result};
use crate::optimize::bisect;

/// Channel and device parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    /// Depolarising parameter of Alice's preparation.
    pub r_pre: f64,
    /// Depolarising parameter of honest Bob's measurement.
    pub r_mea: f64,
    /// Depolarising parameter of a cheater's quantum memory over the waiting time.
    pub r_mem: f64,
    /// Transmittance: probability a photon is detected by Bob.
    pub eta: f64,
    /// Fraction of received qubits a cheater can store.
    pub nu: f64,
    /// Burst length of correlated memory noise.
    pub m: u32,
}

impl Default for NoiseModel {
    fn default() -> Self {
        Self {
            r_pre: 1.0,
            r_mea: 1.0,
            r_mem: 1.0,
            eta: 1.0,
            nu: 1.0,
            m: 1,
        }
    }
}

impl NoiseModel {
    pub fn validate(&self) -> Result<()> {
        check_unit("r_pre", self.r_pre)?;
        check_unit("r_mea", self.r_mea)?;
        check_unit("r_mem", self.r_mem)?;
        check_unit("nu", self.nu)?;
        if !(self.eta > 0.0 && self.eta <= 1.0) {
            return Err(Error::Domain {
                name: "eta",
                value: self.eta,
                domain: "(0, 1]",
            });
        }
        if self.m == 0 {
            return Err(Error::Domain {
                name: "m",
                value: 0.0,
                domain: "m >= 1",
            });
        }
        Ok(())
    }

    /// Honest trusted noise in scenario 1.
    pub fn r1(&self) -> f64 {
        self.r_pre * self.r_mea
    }

    /// Honest trusted noise in scenario 2.
    pub fn r2(&self) -> f64 {
        self.r_pre
    }

    /// Total depolarisation seen by a cheater's stored qubits.
    pub fn r_dis(&self) -> f64 {
        self.r_pre * self.r_mem
    }
}

/// Failure-probability budget.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SecurityParams {
    pub eps_s: f64,
    pub eps_h: f64,
    pub eps_prime: f64,
    pub eps_test: f64,
    pub eps_ec: f64,
}

impl Default for SecurityParams {
    fn default() -> Self {
        Self {
            eps_s: 1e-6,
            eps_h: 1e-6,
            eps_prime: 1e-6,
            eps_test: 1e-3,
            eps_ec: 1e-3,
        }
    }
}

impl SecurityParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("eps_s", self.eps_s),
            ("eps_h", self.eps_h),
            ("eps_prime", self.eps_prime),
            ("eps_test", self.eps_test),
            ("eps_ec", self.eps_ec),
        ] {
            if !(v > 0.0 && v < 1.0) {
                return Err(Error::Domain {
                    name,
                    value: v,
                    domain: "(0, 1)",
                });
            }
        }
        Ok(())
    }

    /// Failure probability against a cheating receiver.
    pub fn adversarial_total(&self) -> f64 {
        self.eps_s + self.eps_h + self.eps_test
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateResult {
    /// Extractable bits per received photon; negative means insecure.
    pub bit_rate: f64,
    /// Min-entropy rate of the complementary string, before the 1/2 cap.
    pub hmin_rate: f64,
    /// Syndrome leakage per photon.
    pub ec_rate: f64,
    pub bound_used: BoundKind,
}

impl RateResult {
    pub fn is_secure(&self) -> bool {
        self.bit_rate > 0.0
    }
}

/// Asymptotic error-correction leakage `h((1+r)/2)` per channel use.
pub fn ec_leak_rate(r: f64) -> Result<f64> {
    let r = check_unit("r", r)?;
    binary_entropy((1.0 + r) / 2.0)
}

fn rate_for(r_cheat: f64, r_trusted: f64, bound: BoundKind, nu: f64) -> Result<RateResult> {
    let nu = check_unit("nu", nu)?;
    let hmin_rate = match bound {
        BoundKind::Rational => minentropy_rate_rational(r_cheat, nu)?.get(),
        other => rate_bound(other, r_cheat, nu, 1)?.get(),
    };
    let ec_rate = ec_leak_rate(r_trusted)?;
    Ok(RateResult {
        bit_rate: hmin_rate.min(0.5) - ec_rate,
        hmin_rate,
        ec_rate,
        bound_used: bound,
    })
}

/// Scenario 1 bit rate as a function of the cheater's total noise `r_dis`
/// and the honest noise `r1`.
pub fn rate_scenario1(r_dis: f64, r1: f64, bound: BoundKind, nu: f64) -> Result<RateResult> {
    let r_dis = check_unit("r_dis", r_dis)?;
    rate_for(r_dis, r1, bound, nu)
}

/// Scenario 2 bit rate; the cheater sees `r2 * r_mem`.
pub fn rate_scenario2(r_mem: f64, r2: f64, bound: BoundKind, nu: f64) -> Result<RateResult> {
    let r_mem = check_unit("r_mem", r_mem)?;
    let r2 = check_unit("r2", r2)?;
    rate_for(r2 * r_mem, r2, bound, nu)
}

/// Smallest trusted-noise parameter with `h((1+r)/2) <= 1/2`.
pub fn threshold_trusted_noise() -> f64 {
    bisect(
        |r| ec_leak_rate(r).expect("r in [0, 1]") - 0.5,
        0.0,
        1.0,
        1e-13,
    )
    .expect("leak rate runs from 1 to 0 on [0, 1]")
}

/// Axes of a secure-region boundary sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "mode")]
pub enum BoundaryMode {
    /// `x = r1`, `y` = largest `r_dis` with non-negative rate.
    Scenario1 { nu: f64 },
    /// `x = r2`, `y` = largest `r_mem` with non-negative rate.
    Scenario2 { nu: f64 },
    /// `x = ν`, `y` = smallest `r2` with non-negative rate, scenario 2 at fixed `r_mem`.
    StorageRate { r_mem: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryPoint {
    pub x: f64,
    /// `None` when no point on the line is secure.
    pub y: Option<f64>,
}

/// Number of scan cells used to bracket a sign change before bisection.
const BOUNDARY_SCAN: usize = 256;

/// Zero-rate boundary on a uniform grid of `grid` points over `[0, 1]`.
///
/// For the scenario modes the secure set on each vertical line is
/// `[0, y]`; for [`BoundaryMode::StorageRate`] it is `[y, 1]`. A line that is
/// secure at its far end reports that end.
pub fn secure_boundary(
    mode: BoundaryMode,
    bound: BoundKind,
    grid: usize,
) -> Result<Vec<BoundaryPoint>> {
    if grid < 2 {
        return Err(Error::Config(
            "boundary grid needs at least 2 points".into(),
        ));
    }
    let xs: Vec<f64> = (0..grid).map(|i| i as f64 / (grid - 1) as f64).collect();
    xs.par_iter()
        .map(|&x| {
            let y = match mode {
                BoundaryMode::Scenario1 { nu } => {
                    last_secure(|y| rate_scenario1(y, x, bound, nu).map(|r| r.bit_rate))?
                }
                BoundaryMode::Scenario2 { nu } => {
                    last_secure(|y| rate_scenario2(y, x, bound, nu).map(|r| r.bit_rate))?
                }
                BoundaryMode::StorageRate { r_mem } => {
                    first_secure(|y| rate_scenario2(r_mem, y, bound, x).map(|r| r.bit_rate))?
                }
            };
            Ok(BoundaryPoint { x, y })
        })
        .collect()
}

/// Largest `y` in `[0, 1]` with `f(y) >= 0`, for `f` secure on an initial segment.
fn last_secure<F>(f: F) -> Result<Option<f64>>
where
    F: Fn(f64) -> Result<f64> + Sync,
{
    let values = scan(&f)?;
    if values[0] < 0.0 {
        return Ok(None);
    }
    match (0..BOUNDARY_SCAN).find(|&i| values[i + 1] < 0.0) {
        None => Ok(Some(1.0)),
        Some(i) => refine(&f, i),
    }
}

/// Smallest `y` in `[0, 1]` with `f(y) >= 0`, for `f` secure on a final segment.
fn first_secure<F>(f: F) -> Result<Option<f64>>
where
    F: Fn(f64) -> Result<f64> + Sync,
{
    let values = scan(&f)?;
    if values[BOUNDARY_SCAN] < 0.0 {
        return Ok(None);
    }
    match (0..BOUNDARY_SCAN).rev().find(|&i| values[i] < 0.0) {
        None => Ok(Some(0.0)),
        Some(i) => refine(&f, i),
    }
}

fn scan<F: Fn(f64) -> Result<f64>>(f: &F) -> Result<Vec<f64>> {
    (0..=BOUNDARY_SCAN)
        .map(|i| f(i as f64 / BOUNDARY_SCAN as f64))
        .collect()
}

fn refine<F: Fn(f64) -> Result<f64>>(f: &F, cell: usize) -> Result<Option<f64>> {
    let lo = cell as f64 / BOUNDARY_SCAN as f64;
    let hi = (cell + 1) as f64 / BOUNDARY_SCAN as f64;
    let root = bisect(|y| f(y).unwrap_or(f64::NAN), lo, hi, BISECTION_TOL)
        .ok_or_else(|| Error::Config("boundary bracket lost its sign change".into()))?;
    Ok(Some(root))
}

/// Secure string length from the leftover hash lemma with syndrome leakage:
/// `max{0, floor(hmin - |Σ| - 2 log2(1/ε_h) + 1)}`.
pub fn ell_finite(hmin_bits: f64, syndrome_len_bits: u64, eps_h: f64) -> u64 {
    assert!(eps_h > 0.0 && eps_h <= 1.0, "eps_h must lie in (0, 1]");
    let raw = hmin_bits - syndrome_len_bits as f64 - 2.0 * (1.0 / eps_h).log2() + 1.0;
    if raw.is_nan() || raw < 0.0 {
        0
    } else {
        raw.floor() as u64
    }
}

/// Syndrome length charged at the asymptotic leakage rate: `ceil(n_c h((1+r)/2))`.
pub fn asymptotic_syndrome_len(n_c: usize, r: f64) -> Result<u64> {
    Ok((n_c as f64 * ec_leak_rate(r)?).ceil() as u64)
}
