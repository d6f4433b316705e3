//! Noise flags: raw device parameters or scenario-level composites.

use clap::Args;
use noisy_ot::rates::NoiseModel;

#[derive(Debug, Clone, Default, Args)]
pub struct NoiseArgs {
    /// Depolarising parameter of the source.
    #[arg(long)]
    pub r_pre: Option<f64>,
    /// Depolarising parameter of the honest receiver's detector.
    #[arg(long)]
    pub r_mea: Option<f64>,
    /// Depolarising parameter of the cheater's memory.
    #[arg(long)]
    pub r_mem: Option<f64>,
    /// Composite r_pre * r_mea.
    #[arg(long)]
    pub r1: Option<f64>,
    /// Composite equal to r_pre.
    #[arg(long)]
    pub r2: Option<f64>,
    /// Composite r_pre * r_mem.
    #[arg(long)]
    pub r_dis: Option<f64>,
    /// Detection probability.
    #[arg(long, default_value_t = 1.0)]
    pub eta: f64,
    /// Fraction of qubits a cheater can store.
    #[arg(long, default_value_t = 1.0)]
    pub nu: f64,
    /// Burst length of correlated memory noise.
    #[arg(long, default_value_t = 1)]
    pub m: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Resolved {
    pub model: NoiseModel,
    pub warnings: Vec<String>,
}

fn differs(a: f64, b: f64) -> bool {
    (a - b).abs() > 1e-12
}

impl NoiseArgs {
    /// Combines raw and composite flags. Composites take precedence; every
    /// raw value they override is reported as a warning.
    pub fn resolve(&self) -> Result<Resolved, String> {
        let mut warnings = Vec::new();
        let mut r_pre = self.r_pre.unwrap_or(1.0);
        if let Some(r2) = self.r2 {
            if self.r_pre.is_some_and(|v| differs(v, r2)) {
                warnings.push(format!("--r2 {r2} overrides --r-pre {r_pre}"));
            }
            r_pre = r2;
        }
        let needed = self.r1.into_iter().chain(self.r_dis).fold(0.0, f64::max);
        if needed > r_pre {
            if self.r2.is_some() {
                return Err(format!(
                    "composites inconsistent: r1 and r_dis cannot exceed r2 = {r_pre}"
                ));
            }
            warnings.push(format!(
                "composites need r_pre >= {needed}; raising r_pre from {r_pre}"
            ));
            r_pre = needed;
        }
        let mut split = |composite: Option<f64>, raw: Option<f64>, name: &str| -> f64 {
            match composite {
                Some(c) => {
                    let v = if r_pre > 0.0 { c / r_pre } else { 1.0 };
                    if raw.is_some_and(|raw| differs(raw, v)) {
                        warnings.push(format!("composite overrides --{name}; using {v}"));
                    }
                    v
                }
                None => raw.unwrap_or(1.0),
            }
        };
        let r_mea = split(self.r1, self.r_mea, "r-mea");
        let r_mem = split(self.r_dis, self.r_mem, "r-mem");
        let model = NoiseModel {
            r_pre,
            r_mea,
            r_mem,
            eta: self.eta,
            nu: self.nu,
            m: self.m,
        };
        model.validate().map_err(|e| e.to_string())?;
        Ok(Resolved { model, warnings })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn args() -> NoiseArgs {
        NoiseArgs {
            eta: 1.0,
            nu: 1.0,
            m: 1,
            ..Default::default()
        }
    }

    #[test]
    fn raw_only() {
        let a = NoiseArgs {
            r_pre: Some(0.9),
            r_mea: Some(0.8),
            r_mem: Some(0.5),
            ..args()
        };
        let r = a.resolve().unwrap();
        assert!(r.warnings.is_empty());
        assert!((r.model.r1() - 0.72).abs() < 1e-12);
        assert!((r.model.r_dis() - 0.45).abs() < 1e-12);
    }

    #[test]
    fn composites_reproduce_themselves() {
        let a = NoiseArgs {
            r1: Some(0.98),
            r_dis: Some(0.5),
            ..args()
        };
        let r = a.resolve().unwrap();
        assert!((r.model.r1() - 0.98).abs() < 1e-12);
        assert!((r.model.r_dis() - 0.5).abs() < 1e-12);
        assert!(r.warnings.is_empty());
    }

    #[test]
    fn composite_wins_with_warning() {
        let a = NoiseArgs {
            r_pre: Some(0.9),
            r_mea: Some(0.9),
            r1: Some(0.45),
            ..args()
        };
        let r = a.resolve().unwrap();
        assert!((r.model.r1() - 0.45).abs() < 1e-12);
        assert_eq!(r.warnings.len(), 1);

        let a = NoiseArgs {
            r_pre: Some(0.5),
            r1: Some(0.8),
            ..args()
        };
        let r = a.resolve().unwrap();
        assert!((r.model.r1() - 0.8).abs() < 1e-12);
        assert!(!r.warnings.is_empty());

        let a = NoiseArgs {
            r_pre: Some(0.5),
            r2: Some(0.7),
            ..args()
        };
        let r = a.resolve().unwrap();
        assert_eq!(r.model.r2(), 0.7);
        assert_eq!(r.warnings.len(), 1);
    }

    #[test]
    fn inconsistent_composites_rejected() {
        let a = NoiseArgs {
            r2: Some(0.5),
            r1: Some(0.8),
            ..args()
        };
        assert!(a.resolve().is_err());
        let a = NoiseArgs {
            r_pre: Some(1.5),
            ..args()
        };
        assert!(a.resolve().is_err());
    }
}
