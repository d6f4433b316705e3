use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{name} = {value} is outside the domain {domain}")]
    Domain {
        name: &'static str,
        value: f64,
        domain: &'static str,
    },

    #[error(
        "no solution for {what}: target {target} is outside the reachable interval [{lo}, {hi}]"
    )]
    NoSolution {
        what: &'static str,
        target: f64,
        lo: f64,
        hi: f64,
    },

    #[error("length mismatch: {0}")]
    Length(String),

    #[error("invalid code: {0}")]
    Code(String),

    #[error("invalid configuration: {0}")]
    Config(String),
}

impl Error {
    pub(crate) fn domain(name: &'static str, value: f64, domain: &'static str) -> Self {
        Error::Domain {
            name,
            value,
            domain,
        }
    }
}

/// Checks `lo <= value <= hi`, tolerating `tol` outside the ends.
pub(crate) fn check_range(
    name: &'static str,
    value: f64,
    lo: f64,
    hi: f64,
    tol: f64,
    domain: &'static str,
) -> Result<f64> {
    if value.is_nan() || value < lo - tol || value > hi + tol {
        return Err(Error::domain(name, value, domain));
    }
    Ok(value.clamp(lo, hi))
}

pub(crate) fn check_unit(name: &'static str, value: f64) -> Result<f64> {
    check_range(name, value, 0.0, 1.0, 1e-12, "[0, 1]")
}
