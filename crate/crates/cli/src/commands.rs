use std::fmt;
use std::fs;

use noisy_ot::adversary::{analytic_per_bit_success, run_attack, AttackKind, AttackStrategy};
use noisy_ot::coding::LinearCode;
use noisy_ot::entropy::{
    minentropy_rate_best, minentropy_rate_bounded_storage_best, minentropy_rate_erasure,
    rate_bound, BoundKind,
};
use noisy_ot::protocol::{run_sessions, EcBackend, EllPolicy, ProtocolConfig, SessionSummary};
use noisy_ot::rates::{
    ec_leak_rate, rate_scenario1, rate_scenario2, secure_boundary, threshold_trusted_noise,
    BoundaryMode, SecurityParams,
};
use noisy_ot::stats::clopper_pearson;
use serde_json::json;

use crate::output::{fmt9, fmt_opt, Csv, VERSION};
use crate::{
    AttackArgs, Backend, BoundaryArgs, BoundsArgs, FlagName, RatesArgs, Scenario, SimulateArgs,
    Strategy,
};

/// Exit status for a simulation whose sessions mostly aborted.
const EXIT_ABORT_DOMINATED: u8 = 3;

const SAMPLING_NOTE: &str = "substring min-entropy: full-string rate applied to each substring \
                             (asymptotic sampling, no finite-size correction)";
const LOSS_TEST_NOTE: &str =
    "loss test: 4-cell Hoeffding test on detection counts per (bit, basis) \
                              (implementation choice)";

pub struct Context {
    pub command: String,
    pub seed: u64,
}

impl Context {
    fn csv(&self) -> Csv {
        Csv::new(&self.command, self.seed)
    }
}

pub struct Outcome {
    pub csv: String,
    pub exit: u8,
}

impl From<Csv> for Outcome {
    fn from(csv: Csv) -> Self {
        Outcome {
            csv: csv.render(),
            exit: 0,
        }
    }
}

#[derive(Debug)]
pub enum CliError {
    Validation(String),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Io(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Validation(m) | CliError::Io(m) => f.write_str(m),
        }
    }
}

impl From<noisy_ot::Error> for CliError {
    fn from(e: noisy_ot::Error) -> Self {
        CliError::Validation(e.to_string())
    }
}

type Result<T> = std::result::Result<T, CliError>;

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Validation(msg.into())
}

fn grid(step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0 && step <= 1.0) {
        return Err(invalid(format!("--step must lie in (0, 1], got {step}")));
    }
    let cells = (1.0 / step).round().max(1.0) as usize;
    Ok((0..=cells).map(|i| i as f64 / cells as f64).collect())
}

fn unit(name: &str, v: f64) -> Result<()> {
    if (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        Err(invalid(format!("--{name} must lie in [0, 1], got {v}")))
    }
}

fn column_names(kinds: &[BoundKind]) -> Vec<String> {
    std::iter::once("x".to_string())
        .chain(kinds.iter().map(|k| format!("bound_{k}")))
        .collect()
}

pub fn bounds(ctx: &Context, a: &BoundsArgs) -> Result<Outcome> {
    unit("nu", a.nu)?;
    if a.m.is_empty() || a.m.contains(&0) {
        return Err(invalid("--m needs burst lengths >= 1"));
    }
    let xs = grid(a.grid.step)?;
    let correlated = |k: BoundKind| {
        matches!(
            k,
            BoundKind::CorrelatedCollision | BoundKind::CorrelatedBest
        )
    };
    let mut columns: Vec<(BoundKind, u32, String)> = Vec::new();
    for &k in &a.kinds {
        if correlated(k) && a.m.len() > 1 {
            columns.extend(a.m.iter().map(|&m| (k, m, format!("bound_{k}_m{m}"))));
        } else {
            columns.push((k, a.m[0], format!("bound_{k}")));
        }
    }
    let mut csv = ctx.csv();
    csv.comment(format!(
        "params: kinds={} nu={} m={} step={}",
        a.kinds
            .iter()
            .map(|k| k.as_str())
            .collect::<Vec<_>>()
            .join(","),
        a.nu,
        a.m.iter().map(u32::to_string).collect::<Vec<_>>().join(","),
        a.grid.step
    ));
    csv.comment("x = depolarising parameter r; values are min-entropy rates in bits per qubit");
    csv.columns(std::iter::once("x".to_string()).chain(columns.iter().map(|c| c.2.clone())));
    for &x in &xs {
        let mut row = vec![fmt9(x)];
        for &(k, m, _) in &columns {
            row.push(fmt9(rate_bound(k, x, a.nu, m)?.get()));
        }
        csv.row(row);
    }
    Ok(csv.into())
}

pub fn rates(ctx: &Context, a: &RatesArgs) -> Result<Outcome> {
    unit("nu", a.nu)?;
    unit("r-dis", a.r_dis)?;
    unit("r-mem", a.r_mem)?;
    let xs = grid(a.grid.step)?;
    let mut csv = ctx.csv();
    let (axis, fixed) = match a.scenario {
        Scenario::One => ("x = r1", format!("r_dis={}", a.r_dis)),
        Scenario::Two => ("x = r2", format!("r_mem={}", a.r_mem)),
        Scenario::Storage => return Err(invalid("rates supports --scenario 1 or 2")),
    };
    csv.comment(format!(
        "params: scenario={} nu={} {fixed} step={}",
        a.scenario.name(),
        a.nu,
        a.grid.step
    ));
    csv.comment(format!(
        "{axis}; values are bit rates per received photon, negative = insecure"
    ));
    csv.columns(column_names(&a.bounds));
    for &x in &xs {
        let mut row = vec![fmt9(x)];
        for &k in &a.bounds {
            let r = match a.scenario {
                Scenario::One => rate_scenario1(a.r_dis, x, k, a.nu)?,
                _ => rate_scenario2(a.r_mem, x, k, a.nu)?,
            };
            row.push(fmt9(r.bit_rate));
        }
        csv.row(row);
    }
    Ok(csv.into())
}

pub fn boundary(ctx: &Context, a: &BoundaryArgs) -> Result<Outcome> {
    unit("nu", a.nu)?;
    unit("r-mem", a.r_mem)?;
    let points = grid(a.grid.step)?.len();
    let (mode, axes) = match a.scenario {
        Scenario::One => (
            BoundaryMode::Scenario1 { nu: a.nu },
            "x = r1, y = largest r_dis with non-negative bit rate",
        ),
        Scenario::Two => (
            BoundaryMode::Scenario2 { nu: a.nu },
            "x = r2, y = largest r_mem with non-negative bit rate",
        ),
        Scenario::Storage => (
            BoundaryMode::StorageRate { r_mem: a.r_mem },
            "x = nu, y = smallest r2 with non-negative bit rate",
        ),
    };
    let curves = a
        .bounds
        .iter()
        .map(|&k| secure_boundary(mode, k, points))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    let mut csv = ctx.csv();
    let fixed = match a.scenario {
        Scenario::Storage => format!("r_mem={}", a.r_mem),
        _ => format!("nu={}", a.nu),
    };
    csv.comment(format!(
        "params: scenario={} {fixed} step={}",
        a.scenario.name(),
        a.grid.step
    ));
    csv.comment(format!("{axes}; empty cell = no secure point on the line"));
    csv.columns(column_names(&a.bounds));
    for i in 0..points {
        let mut row = vec![fmt9(curves[0][i].x)];
        row.extend(curves.iter().map(|c| fmt_opt(c[i].y)));
        csv.row(row);
    }
    Ok(csv.into())
}

pub fn threshold(ctx: &Context) -> Result<Outcome> {
    let r = threshold_trusted_noise();
    let mut csv = ctx.csv();
    csv.comment("r_star = smallest trusted-noise parameter with ec leakage h((1+r)/2) <= 1/2");
    csv.columns([
        "r_star",
        "tolerable_noise",
        "tolerable_noise_percent",
        "ec_leak_at_r_star",
    ]);
    csv.row(vec![
        fmt9(r),
        fmt9(1.0 - r),
        fmt9(100.0 * (1.0 - r)),
        fmt9(ec_leak_rate(r)?),
    ]);
    Ok(csv.into())
}

fn warn_all(warnings: &[String]) {
    for w in warnings {
        eprintln!("warning: {w}");
    }
}

pub fn simulate(ctx: &Context, a: &SimulateArgs) -> Result<Outcome> {
    let resolved = a.noise.resolve().map_err(invalid)?;
    warn_all(&resolved.warnings);
    if a.sessions == 0 {
        return Err(invalid("--sessions must be at least 1"));
    }
    let code = LinearCode::by_name(&a.code)?;
    let mut config = ProtocolConfig::new(a.n_prime, resolved.model, ctx.seed);
    config.security = SecurityParams {
        eps_s: a.eps_s,
        eps_h: a.eps_h,
        eps_prime: a.eps_prime,
        eps_test: a.eps_test,
        eps_ec: a.eps_ec,
    };
    config.ec = match a.backend {
        Backend::Code => EcBackend::Code(code),
        Backend::Oracle => EcBackend::Oracle(code),
    };
    config.ell_policy = match a.ell {
        Some(ell) => EllPolicy::Fixed(ell),
        None => EllPolicy::Computed(a.ell_bound),
    };
    config.validate()?;

    let transcripts = run_sessions(&config, a.sessions)?;
    let summary = SessionSummary::from_transcripts(&config, &transcripts);
    let noise = config.noise;

    if let Some(path) = &a.json {
        let doc = json!({
            "toolkit": "noisy-ot",
            "version": VERSION,
            "command": ctx.command,
            "seed": ctx.seed,
            "metadata": {
                "substring_sampling": SAMPLING_NOTE,
                "loss_test": LOSS_TEST_NOTE,
            },
            "config": config,
            "summary": summary,
            "transcripts": transcripts,
        });
        let text = serde_json::to_string_pretty(&doc).map_err(|e| CliError::Io(e.to_string()))?;
        fs::write(path, text + "\n")
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    }

    let mut csv = ctx.csv();
    csv.comment(format!(
        "params: n_prime={} sessions={} r_pre={} r_mea={} r_mem={} eta={} nu={} m={} backend={} \
         code={} ell={} eps_h={} eps_s={} eps_prime={} eps_test={} eps_ec={}",
        a.n_prime,
        a.sessions,
        noise.r_pre,
        noise.r_mea,
        noise.r_mem,
        noise.eta,
        noise.nu,
        noise.m,
        a.backend.name(),
        a.code,
        a.ell
            .map_or_else(|| format!("computed:{}", a.ell_bound), |l| l.to_string()),
        a.eps_h,
        a.eps_s,
        a.eps_prime,
        a.eps_test,
        a.eps_ec
    ));
    csv.comment(SAMPLING_NOTE);
    csv.comment(LOSS_TEST_NOTE);
    csv.columns([
        "sessions",
        "aborted",
        "abort_rate",
        "ec_failed",
        "ec_failure_rate",
        "output_mismatch",
        "mismatch_rate",
        "mean_ell",
        "mean_detected",
        "matched_error_rate",
        "expected_matched_error_rate",
        "mismatched_agreement_rate",
        "analytic_ec_failure",
    ]);
    let completed = summary.completed().max(1) as f64;
    csv.row(vec![
        summary.sessions.to_string(),
        summary.aborted.to_string(),
        fmt9(summary.abort_rate()),
        summary.ec_failed.to_string(),
        fmt9(summary.ec_failed as f64 / completed),
        summary.output_mismatch.to_string(),
        fmt9(summary.mismatch_rate()),
        fmt9(summary.mean_ell),
        fmt9(summary.mean_detected),
        fmt9(summary.matched_error_rate()),
        fmt9((1.0 - noise.r1()) / 2.0),
        fmt9(summary.mismatched_agreement_rate()),
        fmt9(summary.analytic_ec_failure),
    ]);
    let exit = if summary.abort_rate() > 0.5 {
        eprintln!(
            "warning: {} of {} sessions aborted",
            summary.aborted, summary.sessions
        );
        EXIT_ABORT_DOMINATED
    } else {
        0
    };
    Ok(Outcome {
        csv: csv.render(),
        exit,
    })
}

pub fn attack(ctx: &Context, a: &AttackArgs) -> Result<Outcome> {
    let resolved = a.noise.resolve().map_err(invalid)?;
    warn_all(&resolved.warnings);
    if a.noise.r_mem.is_some() || a.noise.r_dis.is_some() {
        eprintln!("warning: memory noise is swept with --memory-r; --r-mem/--r-dis ignored");
    }
    if !(a.confidence > 0.0 && a.confidence < 1.0) {
        return Err(invalid("--confidence must lie in (0, 1)"));
    }
    let xs = if a.memory_r.is_empty() {
        grid(a.step)?
    } else {
        a.memory_r.clone()
    };
    let kind = match a.strategy {
        Strategy::MeasureImmediately => AttackKind::MeasureImmediately,
        Strategy::StoreAll => AttackKind::StoreAllDepolarizing,
        Strategy::StoreFraction => AttackKind::StoreFraction(a.fraction),
        Strategy::Erasure => AttackKind::ErasureFlagMemory,
    };
    let noise = resolved.model;
    let config = ProtocolConfig::new(a.n_prime, noise, ctx.seed);

    let mut csv = ctx.csv();
    csv.comment(format!(
        "params: strategy={} r_pre={} r_mea={} eta={} fraction={} burst={} trials={} n_prime={} \
         target_bits={} confidence={}",
        a.strategy.name(),
        noise.r_pre,
        noise.r_mea,
        noise.eta,
        a.fraction,
        a.burst,
        a.trials,
        a.n_prime,
        a.target_bits
            .map_or_else(|| "all".into(), |k| k.to_string()),
        a.confidence
    ));
    csv.comment(
        "x = memory parameter; exponent = -log2(success)/k; bound = smooth min-entropy rate of the memory",
    );
    csv.columns([
        "x",
        "per_bit_empirical",
        "per_bit_analytic",
        "per_bit_ci_low",
        "per_bit_ci_high",
        "full_string_empirical",
        "full_string_analytic",
        "full_string_ci_low",
        "full_string_ci_high",
        "exponent_empirical",
        "exponent_analytic",
        "bound",
    ]);

    let mut points = Vec::new();
    for &r in &xs {
        unit("memory-r", r)?;
        let strategy = AttackStrategy::new(kind, r).with_burst(a.burst);
        let stats = run_attack(&config, &strategy, a.trials, a.target_bits)?;
        let p = analytic_per_bit_success(&strategy, noise.r_pre);
        let (lo, hi) = if stats.per_bit_opportunities > 0 {
            clopper_pearson(
                stats.per_bit_successes,
                stats.per_bit_opportunities,
                a.confidence,
            )
        } else {
            (0.0, 1.0)
        };
        let (flo, fhi) = clopper_pearson(stats.full_string_successes, stats.trials, a.confidence);
        let independent = !(kind == AttackKind::ErasureFlagMemory && a.burst > 1);
        let full_analytic = a
            .target_bits
            .filter(|_| independent)
            .map(|k| p.powi(k as i32));
        let exponent_empirical = a
            .target_bits
            .filter(|_| stats.full_string_successes > 0)
            .map(|k| -stats.full_string_frequency().log2() / k as f64);
        let bound = match kind {
            AttackKind::ErasureFlagMemory => minentropy_rate_erasure(r)?,
            AttackKind::StoreFraction(f) => {
                minentropy_rate_bounded_storage_best(noise.r_pre * r, f)?
            }
            AttackKind::StoreAllDepolarizing => minentropy_rate_best(noise.r_pre * r)?,
            AttackKind::MeasureImmediately => {
                minentropy_rate_bounded_storage_best(noise.r_pre, 0.0)?
            }
        };
        csv.row(vec![
            fmt9(r),
            fmt9(stats.per_bit_frequency()),
            fmt9(p),
            fmt9(lo),
            fmt9(hi),
            fmt9(stats.full_string_frequency()),
            fmt_opt(full_analytic),
            fmt9(flo),
            fmt9(fhi),
            fmt_opt(exponent_empirical),
            fmt9(-p.log2()),
            fmt9(bound.get()),
        ]);
        points.push(json!({
            "x": r,
            "strategy": strategy,
            "analytic_per_bit": p,
            "stats": stats,
        }));
    }

    if let Some(path) = &a.json {
        let doc = json!({
            "toolkit": "noisy-ot",
            "version": VERSION,
            "command": ctx.command,
            "seed": ctx.seed,
            "noise": noise,
            "points": points,
        });
        let text = serde_json::to_string_pretty(&doc).map_err(|e| CliError::Io(e.to_string()))?;
        fs::write(path, text + "\n")
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    }
    Ok(csv.into())
}
