//! Checks on solver trajectories.

use serde::Serialize;

use super::checks::{check_cancellations, IDENTITY_TOL};
use super::result::CheckResult;
use crate::chi_norms::{chi_sum, pair_norm, trapezoid};
use crate::error::{Error, Result};
use crate::mhd_solver::{
    stability_bound, Recorder, SolverConfig, Stepper, Trajectory, ADMISSIBLE_TOL,
};
use crate::spectral_core::{Spectral, StatePair};

/// Relative tolerance of the energy balance.
pub const ENERGY_TOL: f64 = 1e-6;
/// Absolute tolerance of the energy balance for zero data.
pub const ENERGY_ABS_TOL: f64 = 1e-14;

/// Per-step energy balance residual `|E(t) + 2μD_u(t) + 2νD_b(t) - E(0)|`,
/// relative to `E(0)` unless `E(0) = 0`.
pub fn energy_residuals(traj: &Trajectory) -> Vec<f64> {
    let norms = traj.norms();
    let energy = norms.energy();
    let (du, db) = (norms.dissipation(0), norms.dissipation(1));
    let (mu, nu) = (traj.config.mu, traj.config.nu);
    let e0 = energy[0];
    energy
        .iter()
        .enumerate()
        .map(|(m, e)| {
            let r = (e + 2.0 * mu * du[m] + 2.0 * nu * db[m] - e0).abs();
            if e0 == 0.0 {
                r
            } else {
                r / e0
            }
        })
        .collect()
}

/// Energy equality at every recorded step.
pub fn check_energy_equality(traj: &Trajectory) -> CheckResult {
    let norms = traj.norms();
    let energy = norms.energy();
    let residuals = energy_residuals(traj);
    let (worst_idx, worst) = residuals
        .iter()
        .copied()
        .enumerate()
        .fold((0, 0.0), |acc, (i, r)| if r > acc.1 { (i, r) } else { acc });
    let e0 = energy[0];
    let m = worst_idx;
    let lhs = energy[m]
        + 2.0 * traj.config.mu * norms.dissipation(0)[m]
        + 2.0 * traj.config.nu * norms.dissipation(1)[m];
    let tol = if e0 == 0.0 {
        ENERGY_ABS_TOL
    } else {
        ENERGY_TOL
    };
    let mut out = CheckResult::identity("energy_equality", lhs, e0, ENERGY_TOL, ENERGY_ABS_TOL)
        .with_meta("max_residual", worst)
        .with_meta("worst_time", norms.times()[m])
        .with_meta("samples", residuals.len());
    out.pass = worst <= tol;
    out
}

/// Pieces of the global a priori estimate measured on one trajectory.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AprioriMeasurement {
    /// `‖(u,b)‖_{L̃^∞(χ^{-1})}`.
    pub tilde: f64,
    /// `½ min{μ,ν} ∫ ‖(u,b)‖_{χ¹}`.
    pub dissipative: f64,
    /// `‖(u0,b0)‖_{χ^{-1}}`.
    pub data_norm: f64,
    /// `‖(u0,b0)‖⁴_{L²} / (2 min{μ,ν})`.
    pub energy_term: f64,
    /// `∫ (‖u‖⁴_{χ^{-1/2}} + ‖b‖⁴_{χ^{-1/2}})`.
    pub quartic_integral: f64,
}

impl AprioriMeasurement {
    pub fn of(traj: &Trajectory) -> Result<Self> {
        let norms = traj.norms();
        if norms.len() < 2 {
            return Err(Error::EmptyTrajectory(
                "a priori check needs two samples".into(),
            ));
        }
        let m = traj.config.min_viscosity();
        let e0 = norms.energy()[0];
        let (qu, qb) = (norms.channel_chi(0, -0.5)?, norms.channel_chi(1, -0.5)?);
        let quartic: Vec<f64> = qu
            .iter()
            .zip(&qb)
            .map(|(a, b)| a.powi(4) + b.powi(4))
            .collect();
        Ok(Self {
            tilde: norms.tilde_linf_norm(-1.0)?,
            dissipative: 0.5 * m * norms.time_lp_norm(1.0, 1.0)?,
            data_norm: pair_norm(traj.initial(), -1.0, 1.0)?,
            energy_term: e0 * e0 / (2.0 * m),
            quartic_integral: trapezoid(norms.times(), &quartic),
        })
    }

    pub fn lhs(&self) -> f64 {
        self.tilde + self.dissipative
    }

    /// Smallest `C` with `lhs <= data_norm + C·energy_term`.
    pub fn empirical_constant(&self) -> f64 {
        crate::verification::result::ratio((self.lhs() - self.data_norm).max(0.0), self.energy_term)
    }
}

/// The global a priori estimate with constant `c_limit`, followed by its
/// intermediate quartic bound with constant 1.
pub fn check_apriori(traj: &Trajectory, c_limit: f64) -> Result<[CheckResult; 2]> {
    let a = AprioriMeasurement::of(traj)?;
    let main = CheckResult::bound(
        "apriori",
        a.lhs(),
        a.data_norm + c_limit * a.energy_term,
        0.0,
    )
    .with_meta("empirical_constant", a.empirical_constant())
    .with_meta("limit", c_limit)
    .with_meta("tilde_part", a.tilde)
    .with_meta("dissipative_part", a.dissipative)
    .with_meta("data_norm", a.data_norm)
    .with_meta("energy_term", a.energy_term);
    let quartic = CheckResult::bound("apriori_quartic", a.quartic_integral, a.energy_term, 0.0);
    Ok([main, quartic])
}

/// `∫_0^T ‖(u,b)‖²_{χ⁰} dt` by the trapezoid rule over the recorded steps.
pub fn blowup_integral(traj: &Trajectory) -> f64 {
    traj.norms().blowup_integral()
}

/// The blow-up functional is finite, nondecreasing, dominated snapshot-wise
/// by `∫ Σ ‖·‖_{χ^{-1}}‖·‖_{χ¹}`, and bounded by `2 L² / min{μ,ν}` where
/// `L` is the measured left side of the a priori estimate.
pub fn check_blowup(traj: &Trajectory, apriori_lhs: f64) -> Result<CheckResult> {
    let norms = traj.norms();
    let series = norms.blowup_series();
    let monotone = series.windows(2).all(|w| w[1] >= w[0]);
    let (am, ap) = (norms.channel_chi(0, -1.0)?, norms.channel_chi(0, 1.0)?);
    let (bm, bp) = (norms.channel_chi(1, -1.0)?, norms.channel_chi(1, 1.0)?);
    let majorant: Vec<f64> = (0..am.len())
        .map(|i| am[i] * ap[i] + bm[i] * bp[i])
        .collect();
    let chi0_sq: Vec<f64> = {
        let (u0, b0) = (norms.channel_chi(0, 0.0)?, norms.channel_chi(1, 0.0)?);
        u0.iter().zip(&b0).map(|(a, b)| a * a + b * b).collect()
    };
    let pointwise = chi0_sq
        .iter()
        .zip(&majorant)
        .all(|(l, r)| *l <= r * (1.0 + IDENTITY_TOL) + f64::MIN_POSITIVE);
    let value = norms.blowup_integral();
    let bound = 2.0 * apriori_lhs * apriori_lhs / traj.config.min_viscosity();
    let mut out = CheckResult::bound("blowup_integral", value, bound, IDENTITY_TOL)
        .with_meta("finite", value.is_finite())
        .with_meta("nondecreasing", monotone)
        .with_meta("pointwise_majorant", pointwise)
        .with_meta("majorant_integral", trapezoid(norms.times(), &majorant));
    out.pass &= value.is_finite() && monotone && pointwise;
    Ok(out)
}

/// One sample of the twin-run difference envelope.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct WeakStrongRow {
    pub t: f64,
    pub lhs: f64,
    pub rhs: f64,
    /// `∫_0^t ‖(u,b)‖²_{χ⁰}` along the reference run.
    pub blowup_integral: f64,
    /// `‖(w,g)(t)‖²_{L²}`.
    pub difference_energy: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct WeakStrongOutcome {
    pub rows: Vec<WeakStrongRow>,
    /// Smallest `C ≥ 0` with `lhs(t) <= lhs(0) exp(C ∫_0^t ‖(u,b)‖²_{χ⁰})`
    /// at every step.
    pub empirical_constant: f64,
    pub envelope: CheckResult,
    pub cancellations: Vec<CheckResult>,
    /// The reference run from `s0`.
    #[serde(skip)]
    pub reference: Trajectory,
}

impl WeakStrongOutcome {
    pub fn checks(&self) -> Vec<CheckResult> {
        let mut out = vec![self.envelope.clone()];
        out.extend(self.cancellations.iter().cloned());
        out
    }
}

fn difference(a: &StatePair, b: &StatePair) -> StatePair {
    let mut d = a.clone();
    d.axpy(-1.0, b);
    d
}

fn h1_sq(s: &StatePair) -> (f64, f64) {
    let g = s.grid();
    let l = g.period();
    let e = |m: Vec<f64>| l * l * m.iter().zip(g.xi_sq()).map(|(v, w)| w * v * v).sum::<f64>();
    (e(s.u.magnitudes()), e(s.b.magnitudes()))
}

fn chi0_sq(s: &StatePair) -> f64 {
    let g = s.grid();
    chi_sum(g, &s.u.magnitudes(), 0.0).powi(2) + chi_sum(g, &s.b.magnitudes(), 0.0).powi(2)
}

/// Runs the reference solution from `s0` and a twin from
/// `s0 + perturbation` in lockstep and tracks the difference envelope
/// `‖(w,g)‖² + ½min{μ,ν}∫(‖∇w‖² + ‖∇g‖²) <= ‖(w0,g0)‖² exp(C∫‖(u,b)‖²_{χ⁰})`
/// with `C = c_limit`. Rows are kept at the snapshot stride and at the end.
pub fn weak_strong_experiment(
    cfg: &SolverConfig,
    s0: &StatePair,
    perturbation: &StatePair,
    c_limit: f64,
) -> Result<WeakStrongOutcome> {
    cfg.validate()?;
    let grid = cfg.grid()?;
    if s0.grid() != &grid || perturbation.grid() != &grid {
        return Err(Error::GridMismatch);
    }
    let mut twin = s0.clone();
    twin.axpy(1.0, perturbation);
    s0.validate(ADMISSIBLE_TOL)?;
    twin.validate(ADMISSIBLE_TOL)?;
    for s in [s0, &twin] {
        let bound = stability_bound(s);
        if cfg.dt > bound {
            return Err(Error::UnstableTimeStep { dt: cfg.dt, bound });
        }
    }
    let m = cfg.min_viscosity();
    let (steps, h) = cfg.step_plan(cfg.t_end);
    let stepper = Stepper::new(&grid, cfg.mu, cfg.nu, h);

    let d0 = difference(&twin, s0);
    let lhs0 =
        d0.u.magnitudes()
            .iter()
            .chain(&d0.b.magnitudes())
            .map(|v| v * v)
            .sum::<f64>()
            * grid.period().powi(2);
    let cancellations = check_cancellations(&s0.u, &s0.b, &d0.u, &d0.b)?.to_vec();

    let mut recorder = Recorder::new(cfg, 0.0, s0)?;
    let mut reference = s0.clone();
    let mut other = twin;
    let mut integral = 0.0;
    let mut dissipation = 0.0;
    let mut prev_chi = chi0_sq(s0);
    let (a, b) = h1_sq(&d0);
    let mut prev_grad = a + b;
    let mut rows = vec![WeakStrongRow {
        t: 0.0,
        lhs: lhs0,
        rhs: lhs0,
        blowup_integral: 0.0,
        difference_energy: lhs0,
    }];
    let mut empirical: f64 = 0.0;
    let mut worst = (0.0_f64, lhs0, lhs0);
    let mut all_below = true;
    for step in 1..=steps {
        reference = stepper.step(&reference)?;
        other = stepper.step(&other)?;
        let t = if step == steps {
            cfg.t_end
        } else {
            step as f64 * h
        };
        recorder.record(t, &reference)?;
        let d = difference(&other, &reference);
        if !d
            .components()
            .iter()
            .all(|c| c.iter().all(|v| v.re.is_finite() && v.im.is_finite()))
        {
            return Err(Error::NonFinite {
                last_valid_time: t - h,
            });
        }
        let chi = chi0_sq(&reference);
        integral += 0.5 * h * (prev_chi + chi);
        prev_chi = chi;
        let (a, b) = h1_sq(&d);
        dissipation += 0.5 * h * (prev_grad + a + b);
        prev_grad = a + b;
        let energy =
            d.u.magnitudes()
                .iter()
                .chain(&d.b.magnitudes())
                .map(|v| v * v)
                .sum::<f64>()
                * grid.period().powi(2);
        let lhs = energy + 0.5 * m * dissipation;
        let rhs = lhs0 * (c_limit * integral).exp();
        if lhs0 > 0.0 && lhs > lhs0 && integral > 0.0 {
            empirical = empirical.max((lhs / lhs0).ln() / integral);
        }
        if lhs > rhs * (1.0 + IDENTITY_TOL) {
            all_below = false;
        }
        let r = crate::verification::result::ratio(lhs, rhs);
        if r >= crate::verification::result::ratio(worst.1, worst.2) {
            worst = (t, lhs, rhs);
        }
        if step % cfg.snapshot_stride == 0 || step == steps {
            rows.push(WeakStrongRow {
                t,
                lhs,
                rhs,
                blowup_integral: integral,
                difference_energy: energy,
            });
        }
    }
    let d_end = difference(&other, &reference);
    let mut late = check_cancellations(&reference.u, &reference.b, &d_end.u, &d_end.b)?.to_vec();
    for c in &mut late {
        c.name.push_str(" [final]");
    }
    let mut cancellations = cancellations;
    for c in &mut cancellations {
        c.name.push_str(" [initial]");
    }
    cancellations.extend(late);

    let mut envelope = CheckResult::bound("weak_strong", worst.1, worst.2, IDENTITY_TOL)
        .with_meta("empirical_constant", empirical)
        .with_meta("limit", c_limit)
        .with_meta("worst_time", worst.0)
        .with_meta("initial_difference", lhs0)
        .with_meta("blowup_integral", integral);
    envelope.pass = all_below;
    Ok(WeakStrongOutcome {
        rows,
        empirical_constant: empirical,
        envelope,
        cancellations,
        reference: recorder.finish(),
    })
}
