use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral_core::Grid;
use crate::verification::calibration::FROZEN;

/// Safety factor between the measured bilinear constant and `C0`.
pub const C0_SAFETY: f64 = 1.25;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    pub n_modes: usize,
    pub period: f64,
    /// Viscosity.
    pub mu: f64,
    /// Resistivity.
    pub nu: f64,
    pub dt: f64,
    pub t_end: f64,
    pub snapshot_stride: usize,
    pub picard_tol: f64,
    pub picard_max_iters: usize,
    pub c0: f64,
    /// Cap on `∫ ‖(u,b)‖²_{χ⁰} dt` before a run is aborted.
    pub blowup_guard: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            n_modes: 32,
            period: 2.0 * std::f64::consts::PI,
            mu: 1.0,
            nu: 1.0,
            dt: 1e-3,
            t_end: 1.0,
            snapshot_stride: 10,
            picard_tol: 1e-10,
            picard_max_iters: 200,
            c0: measured_c0(),
            blowup_guard: 1e6,
        }
    }
}

/// Frozen bilinear constant times [`C0_SAFETY`].
pub fn measured_c0() -> f64 {
    FROZEN.bilinear * C0_SAFETY
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        Grid::new(self.n_modes, self.period)?;
        let positive = [
            ("mu", self.mu),
            ("nu", self.nu),
            ("dt", self.dt),
            ("t_end", self.t_end),
            ("picard_tol", self.picard_tol),
            ("c0", self.c0),
            ("blowup_guard", self.blowup_guard),
        ];
        for (name, v) in positive {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be positive and finite, got {v}"
                )));
            }
        }
        if self.snapshot_stride == 0 {
            return Err(Error::InvalidParameter(
                "snapshot_stride must be positive".into(),
            ));
        }
        if self.picard_max_iters == 0 {
            return Err(Error::InvalidParameter(
                "picard_max_iters must be positive".into(),
            ));
        }
        Ok(())
    }

    pub fn grid(&self) -> Result<Grid> {
        Grid::new(self.n_modes, self.period)
    }

    pub fn min_viscosity(&self) -> f64 {
        self.mu.min(self.nu)
    }

    /// Number of steps and step length covering `span` with steps no longer
    /// than `dt`.
    pub fn step_plan(&self, span: f64) -> (usize, f64) {
        let steps = ((span / self.dt) - 1e-9).ceil().max(1.0) as usize;
        (steps, span / steps as f64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_is_valid() {
        let cfg = SolverConfig::default();
        cfg.validate().unwrap();
        assert!(cfg.c0 > FROZEN.bilinear);
    }

    #[test]
    fn rejects_nonpositive_values() {
        let bad = [
            SolverConfig {
                mu: 0.0,
                ..Default::default()
            },
            SolverConfig {
                dt: -1.0,
                ..Default::default()
            },
            SolverConfig {
                snapshot_stride: 0,
                ..Default::default()
            },
            SolverConfig {
                n_modes: 6,
                ..Default::default()
            },
            SolverConfig {
                c0: f64::NAN,
                ..Default::default()
            },
        ];
        for cfg in bad {
            assert!(cfg.validate().is_err(), "{cfg:?}");
        }
    }

    #[test]
    fn step_plan_covers_span() {
        let cfg = SolverConfig {
            dt: 1e-3,
            ..Default::default()
        };
        assert_eq!(cfg.step_plan(1.0).0, 1000);
        let (n, h) = cfg.step_plan(0.0105);
        assert_eq!(n, 11);
        assert!(h <= 1e-3 && (n as f64 * h - 0.0105).abs() < 1e-15);
    }

    #[test]
    fn toml_style_round_trip_through_json() {
        let cfg = SolverConfig::default();
        let text = serde_json::to_string(&cfg).unwrap();
        assert_eq!(serde_json::from_str::<SolverConfig>(&text).unwrap(), cfg);
        let partial: SolverConfig = serde_json::from_str(r#"{"mu": 0.5}"#).unwrap();
        assert_eq!(partial.mu, 0.5);
        assert_eq!(partial.nu, 1.0);
        assert!(serde_json::from_str::<SolverConfig>(r#"{"viscosity": 1}"#).is_err());
    }
}
