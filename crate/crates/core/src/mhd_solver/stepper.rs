use super::config::SolverConfig;
use super::trajectory::{Recorder, Trajectory};
use crate::error::{Error, Result};
use crate::spectral_core::transform::to_physical_real_pair;
use crate::spectral_core::{leray_project, nonlinear_rhs, Grid, Spectral, StatePair};

/// Relative divergence tolerance for admissible initial data.
pub const ADMISSIBLE_TOL: f64 = 1e-10;

/// Integrating-factor RK4: the linear part `-κ|ξ|²` is applied exactly and
/// RK4 advances the transformed nonlinearity.
#[derive(Clone, Debug)]
pub struct Stepper {
    h: f64,
    full_u: Vec<f64>,
    half_u: Vec<f64>,
    full_b: Vec<f64>,
    half_b: Vec<f64>,
}

impl Stepper {
    pub fn new(grid: &Grid, mu: f64, nu: f64, h: f64) -> Self {
        let factors = |kappa: f64, t: f64| -> Vec<f64> {
            grid.xi_sq()
                .iter()
                .map(|r2| (-kappa * t * r2).exp())
                .collect()
        };
        Self {
            h,
            full_u: factors(mu, h),
            half_u: factors(mu, 0.5 * h),
            full_b: factors(nu, h),
            half_b: factors(nu, 0.5 * h),
        }
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    fn decay(&self, s: &StatePair, half: bool) -> StatePair {
        let mut out = s.clone();
        if half {
            out.u.scale_modes(&self.half_u);
            out.b.scale_modes(&self.half_b);
        } else {
            out.u.scale_modes(&self.full_u);
            out.b.scale_modes(&self.full_b);
        }
        out
    }

    fn rhs(s: &StatePair) -> Result<StatePair> {
        let (u, b) = nonlinear_rhs(s)?;
        Ok(StatePair { u, b })
    }

    pub fn step(&self, c: &StatePair) -> Result<StatePair> {
        let h = self.h;
        let k1 = Self::rhs(c)?;

        let mut a = c.clone();
        a.axpy(0.5 * h, &k1);
        let k2 = Self::rhs(&self.decay(&a, true))?;

        let mut b = self.decay(c, true);
        b.axpy(0.5 * h, &k2);
        let k3 = Self::rhs(&b)?;

        let mut d = self.decay(c, false);
        d.axpy(h, &self.decay(&k3, true));
        let k4 = Self::rhs(&d)?;

        let mut mid = k2;
        mid.axpy(1.0, &k3);
        let mut out = self.decay(c, false);
        out.axpy(h / 6.0, &self.decay(&k1, false));
        out.axpy(h / 3.0, &self.decay(&mid, true));
        out.axpy(h / 6.0, &k4);
        out.u = leray_project(&out.u);
        Ok(out)
    }
}

/// Advective step bound `0.5 / (max retained |ξ| · max_x(|u| + |b|))`.
pub fn stability_bound(s: &StatePair) -> f64 {
    let (ux, uy) = to_physical_real_pair(&s.u.x, &s.u.y);
    let (bx, by) = to_physical_real_pair(&s.b.x, &s.b.y);
    let speed = (0..ux.len())
        .map(|p| ux[p].hypot(uy[p]) + bx[p].hypot(by[p]))
        .fold(0.0, f64::max);
    if speed == 0.0 {
        f64::INFINITY
    } else {
        0.5 / (s.grid().max_retained_xi() * speed)
    }
}

pub(crate) fn check_admissible(cfg: &SolverConfig, s0: &StatePair) -> Result<Grid> {
    cfg.validate()?;
    let grid = cfg.grid()?;
    if s0.grid() != &grid {
        return Err(Error::GridMismatch);
    }
    s0.validate(ADMISSIBLE_TOL)?;
    Ok(grid)
}

/// Runs the time stepper from `s0` over `[0, cfg.t_end]`.
///
/// The step bound is checked on the initial state only; later growth is
/// caught by the non-finite and blow-up guards.
pub fn integrate(cfg: &SolverConfig, s0: &StatePair) -> Result<Trajectory> {
    integrate_span(cfg, s0, 0.0, cfg.t_end)
}

pub(crate) fn integrate_span(
    cfg: &SolverConfig,
    s0: &StatePair,
    t0: f64,
    t1: f64,
) -> Result<Trajectory> {
    let grid = check_admissible(cfg, s0)?;
    let bound = stability_bound(s0);
    if cfg.dt > bound {
        return Err(Error::UnstableTimeStep { dt: cfg.dt, bound });
    }
    let (steps, h) = cfg.step_plan(t1 - t0);
    let stepper = Stepper::new(&grid, cfg.mu, cfg.nu, h);
    let mut rec = Recorder::new(cfg, t0, s0)?;
    let mut state = s0.clone();
    for m in 1..=steps {
        state = stepper.step(&state)?;
        let t = if m == steps { t1 } else { t0 + m as f64 * h };
        rec.record(t, &state)?;
    }
    Ok(rec.finish())
}
