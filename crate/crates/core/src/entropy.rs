//! Entropic quantities and min-entropy rate bounds.
//!
//! Rates are in bits per received photon. Functions returning
//! [`EntropyValue`] are asymptotic rate bounds already clamped to `[0, 1]`;
//! the raw quantities (`error_exponent`, the collision entropy rates) may be
//! negative. All logarithms are base 2 except the outer exponential in
//! [`lambda_to_epsilon`], which is natural.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{check_range, check_unit, Error, Result};
use crate::optimize::{bisect, grid_refined_max};

/// Absolute tolerance of every bisection in this module.
pub const BISECTION_TOL: f64 = 1e-12;

/// Which min-entropy bound a rate was computed from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    BoundedStorage,
    StrongConverse,
    Collision,
    Erasure,
    BestOfAll,
    Rational,
    CorrelatedCollision,
    CorrelatedBest,
}

impl BoundKind {
    pub const ALL: [BoundKind; 8] = [
        BoundKind::BoundedStorage,
        BoundKind::StrongConverse,
        BoundKind::Collision,
        BoundKind::Erasure,
        BoundKind::BestOfAll,
        BoundKind::Rational,
        BoundKind::CorrelatedCollision,
        BoundKind::CorrelatedBest,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            BoundKind::BoundedStorage => "bounded_storage",
            BoundKind::StrongConverse => "strong_converse",
            BoundKind::Collision => "collision",
            BoundKind::Erasure => "erasure",
            BoundKind::BestOfAll => "best_of_all",
            BoundKind::Rational => "rational",
            BoundKind::CorrelatedCollision => "correlated_collision",
            BoundKind::CorrelatedBest => "correlated_best",
        }
    }
}

impl fmt::Display for BoundKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for BoundKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        BoundKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| Error::Config(format!("unknown bound kind `{s}`")))
    }
}

/// Min-entropy rate in bits per received photon.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EntropyValue {
    pub bits_per_photon: f64,
}

impl EntropyValue {
    pub fn new(bits_per_photon: f64) -> Self {
        debug_assert!(bits_per_photon.is_finite());
        Self { bits_per_photon }
    }

    /// Clamps into `[0, 1]`; negative bounds are trivial.
    pub fn clamped(bits_per_photon: f64) -> Self {
        Self::new(bits_per_photon.clamp(0.0, 1.0))
    }

    pub fn get(self) -> f64 {
        self.bits_per_photon
    }
}

fn xlog2x(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        x * x.log2()
    }
}

/// Binary Shannon entropy `h(x)`.
pub fn binary_entropy(x: f64) -> Result<f64> {
    let x = check_unit("x", x)?;
    Ok(-xlog2x(x) - xlog2x(1.0 - x))
}

/// `g(y) = h(y) + y - 1`.
pub fn g_func(y: f64) -> Result<f64> {
    let y = check_unit("y", y)?;
    Ok(-xlog2x(y) - xlog2x(1.0 - y) + y - 1.0)
}

/// Converts a collision-entropy rate into a min-entropy rate.
///
/// Identity for `x >= 1/2`; below that, the inverse of `g` on `[0, 1/2]`,
/// where `g` increases strictly from -1 to 1/2.
pub fn gamma_big(x: f64) -> Result<f64> {
    if x.is_nan() || x < -1.0 - 1e-9 {
        return Err(Error::domain("x", x, "[-1, inf)"));
    }
    if x >= 0.5 {
        return Ok(x);
    }
    if x <= -1.0 {
        return Ok(0.0);
    }
    let root = bisect(
        |y| g_func(y).expect("bisection stays in [0, 1/2]") - x,
        0.0,
        0.5,
        BISECTION_TOL,
    )
    .expect("g(0) = -1 < x < 1/2 = g(1/2)");
    Ok(root)
}

/// Strong-converse capacity `1 - h((1+r)/2)` of the qubit depolarising channel.
pub fn strong_converse_capacity(r: f64) -> Result<f64> {
    let r = check_unit("r", r)?;
    Ok(1.0 - binary_entropy((1.0 + r) / 2.0)?)
}

/// `log2((1+r)^α + (1-r)^α)` without overflow for large `α`.
fn log2_power_sum(r: f64, alpha: f64) -> f64 {
    let ratio = (1.0 - r) / (1.0 + r);
    alpha * (1.0 + r).log2() + (ratio.powf(alpha)).ln_1p() / std::f64::consts::LN_2
}

fn exponent_objective(r: f64, rate: f64, alpha: f64) -> f64 {
    ((alpha - 1.0) * (rate - 1.0) - log2_power_sum(r, alpha)) / alpha
}

/// The `α → ∞` limit of the error-exponent objective plus one: `R - log2(1+r)`.
pub fn error_exponent_large_alpha_limit(r: f64, rate: f64) -> Result<f64> {
    let r = check_unit("r", r)?;
    let rate = check_unit("R", rate)?;
    Ok(rate - (1.0 + r).log2())
}

/// Error exponent `γ_r(R)` of the depolarising channel for classical
/// communication above capacity.
///
/// The supremum over `α > 1` is taken as the largest of three candidates: a
/// geometric grid over `α - 1 ∈ [1e-7, 1e6]` refined by golden-section search,
/// the analytic `α → ∞` limit and the `α → 1⁺` limit (objective → -1, so the
/// exponent is never below 0).
pub fn error_exponent(r: f64, rate: f64) -> Result<f64> {
    let r = check_unit("r", r)?;
    let rate = check_unit("R", rate)?;
    let interior = grid_refined_max(|t| exponent_objective(r, rate, 1.0 + t), 1e-7, 1e6, 400);
    let at_infinity = rate - 1.0 - (1.0 + r).log2();
    let at_one = -1.0;
    Ok(1.0 + interior.value.max(at_infinity).max(at_one))
}

/// Smoothing parameter for a given `λ`: `exp[-λ² n / (32 log2(4/λ))]`.
pub fn lambda_to_epsilon(n: u64, lambda: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::domain("n", 0.0, "n >= 1"));
    }
    if !(lambda > 0.0 && lambda < 0.5) {
        return Err(Error::domain("lambda", lambda, "(0, 1/2)"));
    }
    Ok((-(lambda * lambda * n as f64) / (32.0 * (4.0 / lambda).log2())).exp())
}

/// Inverse of [`lambda_to_epsilon`] in `λ`.
pub fn epsilon_to_lambda(n: u64, epsilon: f64) -> Result<f64> {
    let floor = lambda_to_epsilon(n, 0.5 - f64::EPSILON)?;
    if !(epsilon > floor && epsilon < 1.0) {
        return Err(Error::NoSolution {
            what: "epsilon_to_lambda",
            target: epsilon,
            lo: floor,
            hi: 1.0,
        });
    }
    let f = |lambda: f64| {
        if lambda <= 0.0 {
            1.0 - epsilon
        } else {
            lambda_to_epsilon(n, lambda.min(0.5 - f64::EPSILON)).unwrap_or(floor) - epsilon
        }
    };
    bisect(f, 0.0, 0.5, BISECTION_TOL).ok_or(Error::NoSolution {
        what: "epsilon_to_lambda",
        target: epsilon,
        lo: floor,
        hi: 1.0,
    })
}

/// Bounded-storage rate `max{0, 1/2 - r ν}`.
pub fn minentropy_rate_bounded(r: f64, nu: f64) -> Result<EntropyValue> {
    let r = check_unit("r", r)?;
    let nu = check_unit("nu", nu)?;
    Ok(EntropyValue::clamped(0.5 - r * nu))
}

/// Strong-converse rate `max{0, γ_r(1/2)}`.
pub fn minentropy_rate_strong_converse(r: f64) -> Result<EntropyValue> {
    Ok(EntropyValue::clamped(error_exponent(r, 0.5)?))
}

/// Collision entropy rate `1 - log2(1 + 3r²)` of a depolarised EPR pair.
pub fn collision_entropy_rate_depol(r: f64) -> Result<f64> {
    let r = check_unit("r", r)?;
    Ok(1.0 - (1.0 + 3.0 * r * r).log2())
}

pub fn minentropy_rate_collision(r: f64) -> Result<EntropyValue> {
    Ok(EntropyValue::clamped(gamma_big(
        collision_entropy_rate_depol(r)?,
    )?))
}

/// Erasure-channel rate `1 - r`.
pub fn minentropy_rate_erasure(r: f64) -> Result<EntropyValue> {
    let r = check_unit("r", r)?;
    Ok(EntropyValue::clamped(1.0 - r))
}

/// Best of the collision and erasure bounds.
pub fn minentropy_rate_best(r: f64) -> Result<EntropyValue> {
    let collision = minentropy_rate_collision(r)?.get();
    let erasure = minentropy_rate_erasure(r)?.get();
    Ok(EntropyValue::clamped(collision.max(erasure)))
}

/// Rate against a receiver who only cheats when cheating pays, storing a
/// fraction `ν` of the qubits.
pub fn minentropy_rate_rational(r: f64, nu: f64) -> Result<EntropyValue> {
    let nu = check_unit("nu", nu)?;
    let best = minentropy_rate_best(r)?.get();
    Ok(EntropyValue::clamped((1.0 - nu) / 2.0 + nu * best.min(0.5)))
}

pub fn minentropy_rate_bounded_storage_best(r: f64, nu: f64) -> Result<EntropyValue> {
    let nu = check_unit("nu", nu)?;
    let best = minentropy_rate_best(r)?.get();
    Ok(EntropyValue::clamped((1.0 - nu) / 2.0 + nu * best))
}

/// `log2(2^a + 2^b)`.
fn log2_add(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if lo == f64::NEG_INFINITY {
        return hi;
    }
    hi + (lo - hi).exp2().ln_1p() / std::f64::consts::LN_2
}

/// Collision entropy rate `1 - (1/m) log2[1 + (4^m - 1) r²]` for a memory
/// depolarising bursts of `m` neighbouring qubits.
pub fn collision_entropy_rate_burst(r: f64, m: u32) -> Result<f64> {
    let r = check_unit("r", r)?;
    if m == 0 {
        return Err(Error::domain("m", 0.0, "m >= 1"));
    }
    if r == 0.0 {
        return Ok(1.0);
    }
    // 1 + (4^m - 1) r² = (1 - r²) + 2^(2m + 2 log2 r)
    let big = 2.0 * m as f64 + 2.0 * r.log2();
    let small = (1.0 - r * r).log2();
    Ok(1.0 - log2_add(big, small) / m as f64)
}

pub fn minentropy_rate_correlated(r: f64, m: u32) -> Result<EntropyValue> {
    let h2 = collision_entropy_rate_burst(r, m)?;
    Ok(EntropyValue::clamped(gamma_big(h2.max(-1.0))?))
}

pub fn minentropy_rate_correlated_best(r: f64, m: u32) -> Result<EntropyValue> {
    let correlated = minentropy_rate_correlated(r, m)?.get();
    let erasure = minentropy_rate_erasure(r)?.get();
    Ok(EntropyValue::clamped(correlated.max(erasure)))
}

/// Finite-size BB84 bound `(1/2 - 2λ) n` for a receiver without quantum
/// memory. Not clamped.
pub fn finite_minentropy_bb84(n: u64, epsilon: f64) -> Result<f64> {
    let lambda = epsilon_to_lambda(n, epsilon)?;
    Ok((0.5 - 2.0 * lambda) * n as f64)
}

/// A smooth min-entropy bound in bits together with its total smoothing.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmoothBound {
    pub bits: f64,
    pub epsilon: f64,
}

/// Finite-size strong-converse bound `n γ_r(1/2 - 2λ - (1/n) log2(1/ε'))`,
/// smooth with `ε + ε'`.
pub fn finite_minentropy_konig(
    n: u64,
    r: f64,
    epsilon: f64,
    epsilon_prime: f64,
) -> Result<SmoothBound> {
    let epsilon_prime = check_range("epsilon_prime", epsilon_prime, 0.0, 1.0, 0.0, "(0, 1]")?;
    if epsilon_prime == 0.0 {
        return Err(Error::domain("epsilon_prime", 0.0, "(0, 1]"));
    }
    let lambda = epsilon_to_lambda(n, epsilon)?;
    let rate = 0.5 - 2.0 * lambda - (1.0 / epsilon_prime).log2() / n as f64;
    if !(0.0..=1.0).contains(&rate) {
        return Err(Error::domain(
            "rate argument of the error exponent",
            rate,
            "[0, 1]",
        ));
    }
    Ok(SmoothBound {
        bits: n as f64 * error_exponent(r, rate)?,
        epsilon: epsilon + epsilon_prime,
    })
}

/// Finite-size collision bound `n Γ(h2) - 1 - log2(2/ε²)`.
pub fn finite_minentropy_collision(n: u64, h2: f64, epsilon: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::domain("n", 0.0, "n >= 1"));
    }
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(Error::domain("epsilon", epsilon, "(0, 1]"));
    }
    Ok(n as f64 * gamma_big(h2)? - 1.0 - (2.0 / (epsilon * epsilon)).log2())
}

/// Evaluates a rate bound by kind. `nu` and `m` are only read by the kinds
/// that depend on them.
pub fn rate_bound(kind: BoundKind, r: f64, nu: f64, m: u32) -> Result<EntropyValue> {
    match kind {
        BoundKind::BoundedStorage => minentropy_rate_bounded(r, nu),
        BoundKind::StrongConverse => minentropy_rate_strong_converse(r),
        BoundKind::Collision => minentropy_rate_collision(r),
        BoundKind::Erasure => minentropy_rate_erasure(r),
        BoundKind::BestOfAll => minentropy_rate_bounded_storage_best(r, nu),
        BoundKind::Rational => minentropy_rate_rational(r, nu),
        BoundKind::CorrelatedCollision => minentropy_rate_correlated(r, m),
        BoundKind::CorrelatedBest => minentropy_rate_correlated_best(r, m),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    // Frozen with an independent 30-digit evaluation (mpmath bisection).
    const GAMMA_AT_ZERO: f64 = 0.227_092_195_219_348_2;
    const COLLISION_H2_HALF: f64 = 0.192_645_077_942_395_9;
    const GAMMA_COLLISION_HALF: f64 = 0.305_149_848_054_364;
    const COLLISION_QUARTER: f64 = 0.752_072_486_556_414_5;

    fn close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b} (tol {tol})");
    }

    /// Brute-force inverse of g on a dense grid followed by a secant polish;
    /// shares nothing with the bisection in `gamma_big`.
    fn g_inverse_oracle(x: f64) -> f64 {
        let g = |y: f64| {
            let h = if y <= 0.0 || y >= 1.0 {
                0.0
            } else {
                -y * y.log2() - (1.0 - y) * (1.0 - y).log2()
            };
            h + y - 1.0
        };
        let steps = 100_000;
        let mut best = 0.0;
        for i in 0..=steps {
            let y = 0.5 * i as f64 / steps as f64;
            if (g(y) - x).abs() < (g(best) - x).abs() {
                best = y;
            }
        }
        let (mut a, mut b) = ((best - 1e-5f64).max(1e-300), (best + 1e-5).min(0.5));
        for _ in 0..60 {
            let (fa, fb) = (g(a) - x, g(b) - x);
            if fb == fa {
                break;
            }
            let c = b - fb * (b - a) / (fb - fa);
            a = b;
            b = c.clamp(1e-300, 0.5);
        }
        b
    }

    #[test]
    fn binary_entropy_examples() {
        close(binary_entropy(0.5).unwrap(), 1.0, 1e-15);
        assert_eq!(binary_entropy(0.0).unwrap(), 0.0);
        close(
            binary_entropy(0.75).unwrap(),
            0.811_278_124_459_132_9,
            1e-14,
        );
        assert!(binary_entropy(1.0 + 1e-13).is_ok());
        assert!(matches!(binary_entropy(1.1), Err(Error::Domain { .. })));
        assert!(binary_entropy(-0.01).is_err());
    }

    #[test]
    fn g_examples() {
        close(g_func(0.0).unwrap(), -1.0, 0.0);
        close(g_func(0.5).unwrap(), 0.5, 1e-15);
        close(g_func(1.0).unwrap(), 0.0, 0.0);
        assert!(g_func(1.5).is_err());
    }

    #[test]
    fn gamma_examples() {
        assert_eq!(gamma_big(-1.0).unwrap(), 0.0);
        assert_eq!(gamma_big(0.75).unwrap(), 0.75);
        close(gamma_big(0.0).unwrap(), GAMMA_AT_ZERO, 1e-11);
        close(gamma_big(0.0).unwrap(), g_inverse_oracle(0.0), 1e-9);
        close(gamma_big(0.5).unwrap(), 0.5, 1e-11);
        close(gamma_big(0.5 - 1e-12).unwrap(), 0.5, 1e-6);
        assert!(gamma_big(-1.0 - 1e-6).is_err());
        assert_eq!(gamma_big(-1.0 - 1e-10).unwrap(), 0.0);
    }

    #[test]
    fn gamma_matches_oracle_on_grid() {
        for i in 0..=30 {
            let x = -1.0 + 1.5 * i as f64 / 30.0;
            close(gamma_big(x).unwrap(), g_inverse_oracle(x), 1e-8);
        }
    }

    #[test]
    fn gamma_monotone_and_inverts_g() {
        let mut prev = gamma_big(-1.0).unwrap();
        for i in 1..=10_000 {
            let x = -1.0 + 3.0 * i as f64 / 10_000.0;
            let y = gamma_big(x).unwrap();
            assert!(y >= prev, "not monotone at {x}");
            if x <= 0.5 {
                close(g_func(y).unwrap(), x, 1e-9);
            }
            prev = y;
        }
    }

    #[test]
    fn capacity_examples() {
        close(strong_converse_capacity(1.0).unwrap(), 1.0, 1e-15);
        close(strong_converse_capacity(0.0).unwrap(), 0.0, 1e-15);
        close(
            strong_converse_capacity(0.5).unwrap(),
            0.188_721_875_540_867_1,
            1e-14,
        );
        let mut prev = -1.0;
        for i in 0..=100 {
            let c = strong_converse_capacity(i as f64 / 100.0).unwrap();
            assert!(c > prev);
            prev = c;
        }
    }

    /// Dense brute-force supremum over α ∈ (1, 1e7] plus both endpoint limits.
    fn exponent_oracle(r: f64, rate: f64) -> f64 {
        let mut best = f64::NEG_INFINITY;
        let n = 200_000;
        for i in 0..=n {
            // α - 1 from 1e-8 to 1e7, log-uniform
            let t = 10f64.powf(-8.0 + 15.0 * i as f64 / n as f64);
            let alpha = 1.0 + t;
            let sum = (1.0 + r).powf(alpha) + (1.0 - r).powf(alpha);
            let v = if sum.is_finite() {
                ((alpha - 1.0) * (rate - 1.0) - sum.log2()) / alpha
            } else {
                continue;
            };
            best = best.max(v);
        }
        1.0 + best.max(rate - 1.0 - (1.0 + r).log2()).max(-1.0)
    }

    #[test]
    fn error_exponent_examples() {
        close(error_exponent(0.0, 0.5).unwrap(), 0.5, 1e-9);
        // the α → ∞ limit alone is 0.5 - log2(2) = -0.5 at r = 1
        close(
            error_exponent_large_alpha_limit(1.0, 0.5).unwrap(),
            -0.5,
            1e-15,
        );
        // the supremum itself is approached at α → 1⁺ and equals 0
        close(error_exponent(1.0, 0.5).unwrap(), 0.0, 1e-6);
        let at_09 = error_exponent(0.9, 0.5).unwrap();
        assert!(at_09 <= 1e-6);
        assert_eq!(
            minentropy_rate_strong_converse(0.9).unwrap().get(),
            at_09.max(0.0)
        );
        assert!(minentropy_rate_strong_converse(0.9).unwrap().get() < 1e-6);
        assert!(error_exponent(0.5, 1.5).is_err());
    }

    #[test]
    fn error_exponent_matches_bruteforce() {
        // frozen mpmath values for R = 1/2
        close(
            error_exponent(0.3, 0.5).unwrap(),
            0.219_752_589_621_704_2,
            1e-10,
        );
        close(
            error_exponent(0.5, 0.5).unwrap(),
            0.089_427_538_448_074_5,
            1e-10,
        );
        close(
            error_exponent(0.7, 0.5).unwrap(),
            0.009_810_021_861_716_53,
            1e-10,
        );
        for &r in &[0.0, 0.1, 0.25, 0.5, 0.75, 0.9, 1.0] {
            for &rate in &[0.1, 0.5, 0.9] {
                let got = error_exponent(r, rate).unwrap();
                let want = exponent_oracle(r, rate);
                assert!(got >= want - 1e-9, "r={r} R={rate}: {got} < {want}");
                close(got, want, 1e-6);
            }
        }
    }

    #[test]
    fn error_exponent_dominates_interior_and_limit() {
        for i in 0..=20 {
            let r = i as f64 / 20.0;
            let sup = error_exponent(r, 0.5).unwrap();
            for &alpha in &[1.01, 1.5, 2.0, 5.0, 50.0, 1e4] {
                assert!(1.0 + exponent_objective(r, 0.5, alpha) <= sup + 1e-12);
            }
            assert!(sup >= error_exponent_large_alpha_limit(r, 0.5).unwrap());
        }
    }

    #[test]
    fn strong_converse_nontrivial_iff_capacity_below_half() {
        for i in 0..=1000 {
            let r = i as f64 / 1000.0;
            let cap = strong_converse_capacity(r).unwrap();
            if (cap - 0.5).abs() < 1e-3 {
                continue;
            }
            let positive = minentropy_rate_strong_converse(r).unwrap().get() > 1e-9;
            assert_eq!(positive, cap < 0.5, "r={r} cap={cap}");
        }
        close(
            minentropy_rate_strong_converse(0.0).unwrap().get(),
            0.5,
            1e-9,
        );
    }

    #[test]
    fn lambda_epsilon_examples() {
        close(lambda_to_epsilon(2048, 0.25).unwrap(), (-1f64).exp(), 1e-15);
        assert!(lambda_to_epsilon(4096, 0.25).unwrap() < lambda_to_epsilon(2048, 0.25).unwrap());
        close(epsilon_to_lambda(2048, (-1f64).exp()).unwrap(), 0.25, 1e-10);
        assert!(epsilon_to_lambda(2048, 1.0 - 1e-12).unwrap() < 1e-3);
        let err = epsilon_to_lambda(2048, 1e-30).unwrap_err();
        assert!(matches!(err, Error::NoSolution { .. }));
        assert!(lambda_to_epsilon(10, 0.5).is_err());
        assert!(lambda_to_epsilon(10, 0.0).is_err());
    }

    #[test]
    fn lambda_epsilon_round_trip_grid() {
        for &n in &[1u64, 100, 2048, 1_000_000] {
            for i in 1..50 {
                let lambda = i as f64 / 100.0;
                let eps = lambda_to_epsilon(n, lambda).unwrap();
                if !(1e-300..1.0 - 1e-9).contains(&eps) {
                    continue; // λ not identifiable in f64
                }
                let back = epsilon_to_lambda(n, eps).unwrap();
                close(lambda_to_epsilon(n, back).unwrap(), eps, 1e-9);
                close(back, lambda, 1e-9);
            }
        }
    }

    #[test]
    fn bounded_examples() {
        assert_eq!(minentropy_rate_bounded(1.0, 1.0).unwrap().get(), 0.0);
        assert_eq!(minentropy_rate_bounded(0.0, 1.0).unwrap().get(), 0.5);
        assert_eq!(minentropy_rate_bounded(0.5, 0.5).unwrap().get(), 0.25);
        assert!(minentropy_rate_bounded(0.5, 1.5).is_err());
    }

    #[test]
    fn collision_examples() {
        close(collision_entropy_rate_depol(0.0).unwrap(), 1.0, 0.0);
        close(collision_entropy_rate_depol(1.0).unwrap(), -1.0, 1e-15);
        close(
            collision_entropy_rate_depol(0.5).unwrap(),
            COLLISION_H2_HALF,
            1e-14,
        );
        close(minentropy_rate_collision(0.0).unwrap().get(), 1.0, 0.0);
        close(minentropy_rate_collision(1.0).unwrap().get(), 0.0, 1e-12);
        close(
            minentropy_rate_collision(0.5).unwrap().get(),
            GAMMA_COLLISION_HALF,
            1e-11,
        );
        let mut prev = 2.0;
        for i in 0..=100 {
            let h2 = collision_entropy_rate_depol(i as f64 / 100.0).unwrap();
            assert!(h2 < prev);
            prev = h2;
        }
    }

    #[test]
    fn erasure_and_best_examples() {
        assert_eq!(minentropy_rate_erasure(0.0).unwrap().get(), 1.0);
        assert_eq!(minentropy_rate_erasure(1.0).unwrap().get(), 0.0);
        assert_eq!(minentropy_rate_erasure(0.5).unwrap().get(), 0.5);
        close(
            minentropy_rate_best(0.25).unwrap().get(),
            COLLISION_QUARTER,
            1e-12,
        );
        assert_eq!(minentropy_rate_best(0.5).unwrap().get(), 0.5);
    }

    #[test]
    fn best_crossover_in_window() {
        // independent root of log2(1 + 3r²) = r
        let root = bisect(|r| (1.0 + 3.0 * r * r).log2() - r, 0.1, 0.4, 1e-14).unwrap();
        assert!((0.24..=0.26).contains(&root));
        let below = root - 1e-3;
        let above = root + 1e-3;
        assert!(minentropy_rate_collision(below).unwrap().get() > 1.0 - below);
        assert!(minentropy_rate_collision(above).unwrap().get() < 1.0 - above);
    }

    #[test]
    fn rational_examples() {
        close(
            minentropy_rate_rational(0.3, 1.0).unwrap().get(),
            0.5,
            1e-15,
        );
        close(
            minentropy_rate_rational(0.8, 1.0).unwrap().get(),
            0.2,
            1e-12,
        );
        close(
            minentropy_rate_rational(0.8, 0.5).unwrap().get(),
            0.35,
            1e-12,
        );
        for i in 0..=100 {
            let r = i as f64 / 100.0;
            for &nu in &[0.0, 0.3, 1.0] {
                let closed = 0.5 + nu * (0.5 - r.max(0.5));
                close(
                    minentropy_rate_rational(r, nu).unwrap().get(),
                    closed,
                    1e-12,
                );
            }
        }
    }

    #[test]
    fn bounded_storage_best_examples() {
        for i in 0..=10 {
            let r = i as f64 / 10.0;
            close(
                minentropy_rate_bounded_storage_best(r, 0.0).unwrap().get(),
                0.5,
                1e-15,
            );
            close(
                minentropy_rate_bounded_storage_best(r, 1.0).unwrap().get(),
                minentropy_rate_best(r).unwrap().get(),
                1e-15,
            );
        }
        close(
            minentropy_rate_bounded_storage_best(1.0, 0.4)
                .unwrap()
                .get(),
            0.3,
            1e-12,
        );
    }

    #[test]
    fn burst_examples() {
        for i in 0..=100 {
            let r = i as f64 / 100.0;
            close(
                collision_entropy_rate_burst(r, 1).unwrap(),
                collision_entropy_rate_depol(r).unwrap(),
                1e-13,
            );
        }
        close(collision_entropy_rate_burst(1.0, 2).unwrap(), -1.0, 1e-14);
        for m in [1, 2, 5, 64, 1000] {
            assert_eq!(collision_entropy_rate_burst(0.0, m).unwrap(), 1.0);
            assert!(collision_entropy_rate_burst(0.7, m).unwrap().is_finite());
            close(collision_entropy_rate_burst(1.0, m).unwrap(), -1.0, 1e-12);
        }
        assert!(collision_entropy_rate_burst(0.5, 0).is_err());
    }

    #[test]
    fn burst_direct_formula_small_m() {
        for m in 1..=10u32 {
            for i in 0..=20 {
                let r = i as f64 / 20.0;
                let direct = 1.0 - (1.0 + (4f64.powi(m as i32) - 1.0) * r * r).log2() / m as f64;
                close(collision_entropy_rate_burst(r, m).unwrap(), direct, 1e-12);
            }
        }
    }

    #[test]
    fn correlated_examples() {
        for i in 0..=100 {
            let r = i as f64 / 100.0;
            close(
                minentropy_rate_correlated(r, 1).unwrap().get(),
                minentropy_rate_collision(r).unwrap().get(),
                1e-12,
            );
            assert!(
                minentropy_rate_correlated_best(r, 3).unwrap()
                    >= minentropy_rate_correlated(r, 3).unwrap()
            );
        }
        assert_eq!(minentropy_rate_correlated(1.0, 5).unwrap().get(), 0.0);
        assert_eq!(minentropy_rate_correlated_best(0.5, 5).unwrap().get(), 0.5);
        close(
            minentropy_rate_correlated_best(0.1, 1).unwrap().get(),
            minentropy_rate_collision(0.1).unwrap().get(),
            1e-15,
        );
    }

    #[test]
    fn burst_nonincreasing_in_m() {
        for i in 0..=100 {
            let r = i as f64 / 100.0;
            for m in 1..12 {
                let a = collision_entropy_rate_burst(r, m).unwrap();
                let b = collision_entropy_rate_burst(r, m + 1).unwrap();
                assert!(b <= a + 1e-12, "r={r} m={m}");
                assert!(
                    minentropy_rate_correlated(r, m + 1).unwrap().get()
                        <= minentropy_rate_correlated(r, m).unwrap().get() + 1e-12
                );
            }
        }
    }

    #[test]
    fn erasure_dominates_raw_guessing_exponent() {
        for i in 0..=1000 {
            let r = i as f64 / 1000.0;
            let raw = (2.0 / (1.0 + r)).log2();
            assert!(minentropy_rate_erasure(r).unwrap().get() >= raw - 1e-15);
        }
    }

    #[test]
    fn all_rates_in_unit_interval() {
        for i in 0..=100 {
            let r = i as f64 / 100.0;
            for kind in BoundKind::ALL {
                for &nu in &[0.0, 0.5, 1.0] {
                    let v = rate_bound(kind, r, nu, 2).unwrap().get();
                    assert!((0.0..=1.0).contains(&v), "{kind} r={r}");
                }
            }
            let best = minentropy_rate_best(r).unwrap();
            assert!(best >= minentropy_rate_collision(r).unwrap());
            assert!(best >= minentropy_rate_erasure(r).unwrap());
        }
    }

    #[test]
    fn finite_bb84_examples() {
        let e = (-1f64).exp();
        close(finite_minentropy_bb84(2048, e).unwrap(), 0.0, 1e-6);
        let mut prev = f64::NEG_INFINITY;
        for &n in &[1u64 << 16, 1 << 18, 1 << 20, 1 << 22, 1 << 26] {
            let v = finite_minentropy_bb84(n, 1e-6).unwrap();
            assert!(v > prev);
            prev = v;
        }
        assert!(
            (finite_minentropy_bb84(1 << 40, 1e-6).unwrap() / (1u64 << 40) as f64 - 0.5).abs()
                < 1e-3
        );
    }

    #[test]
    fn finite_konig_examples() {
        let big = 1u64 << 40;
        let b = finite_minentropy_konig(big, 0.5, 1e-6, 1e-6).unwrap();
        close(b.bits / big as f64, error_exponent(0.5, 0.5).unwrap(), 1e-3);
        assert_eq!(b.epsilon, 2e-6);
        let n = 1u64 << 20;
        let free = finite_minentropy_konig(n, 0.3, 1e-6, 1.0).unwrap();
        let lambda = epsilon_to_lambda(n, 1e-6).unwrap();
        close(
            free.bits,
            n as f64 * error_exponent(0.3, 0.5 - 2.0 * lambda).unwrap(),
            1e-6,
        );
        let tight = finite_minentropy_konig(n, 0.3, 1e-6, 1e-20).unwrap();
        assert!(tight.bits < free.bits);
        assert!(finite_minentropy_konig(100, 0.3, 0.9, 1e-100).is_err());
    }

    #[test]
    fn finite_collision_examples() {
        close(
            finite_minentropy_collision(100, 1.0, 2f64.sqrt() * 2f64.powi(-5)).unwrap(),
            89.0,
            1e-12,
        );
        close(
            finite_minentropy_collision(100, -1.0, 1.0).unwrap(),
            -2.0,
            1e-12,
        );
        let a = finite_minentropy_collision(100, 0.7, 0.01).unwrap();
        let b = finite_minentropy_collision(200, 0.7, 0.01).unwrap();
        let c = finite_minentropy_collision(300, 0.7, 0.01).unwrap();
        close(c - b, b - a, 1e-9);
        assert!(b > a);
        assert!(finite_minentropy_collision(0, 0.7, 0.01).is_err());
        assert!(finite_minentropy_collision(10, 0.7, 0.0).is_err());
    }

    #[test]
    fn bound_kind_strings_round_trip() {
        for kind in BoundKind::ALL {
            assert_eq!(kind.as_str().parse::<BoundKind>().unwrap(), kind);
            assert_eq!(kind.as_str(), kind.as_str().to_lowercase());
        }
        assert!("nope".parse::<BoundKind>().is_err());
    }

    proptest! {
        #[test]
        fn binary_entropy_symmetric(x in 0.0f64..=1.0) {
            let a = binary_entropy(x).unwrap();
            let b = binary_entropy(1.0 - x).unwrap();
            prop_assert!((a - b).abs() < 1e-12);
            prop_assert!((0.0..=1.0 + 1e-15).contains(&a));
        }

        #[test]
        fn gamma_round_trip(x in -1.0f64..0.5) {
            let y = gamma_big(x).unwrap();
            prop_assert!((0.0..=0.5).contains(&y));
            prop_assert!((g_func(y).unwrap() - x).abs() < 1e-9);
        }

        #[test]
        fn epsilon_strictly_decreasing(n in 1u64..100_000, a in 0.01f64..0.49, b in 0.01f64..0.49) {
            prop_assume!((a - b).abs() > 1e-6);
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            prop_assert!(lambda_to_epsilon(n, hi).unwrap() <= lambda_to_epsilon(n, lo).unwrap());
        }
    }
}
