use serde::Serialize;

use super::config::SolverConfig;
use super::stepper::check_admissible;
use super::trajectory::{Recorder, Trajectory};
use crate::chi_norms::chi_norm;
use crate::error::{Error, Result};
use crate::semigroup::{pair_kappas, Integrator};
use crate::spectral_core::{nonlinear_rhs, Spectral, StatePair};
use crate::verification::calibration::FROZEN;

/// Number of consecutive distance increases that abort the iteration.
const DIVERGING_RUN: usize = 3;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PicardDiagnostics {
    /// `d_n = ‖X_{n+1} - X_n‖_{L²([0,T];χ⁰)}` per iteration.
    pub distances: Vec<f64>,
    /// Geometric mean of the successive distance ratios.
    pub contraction_ratio: f64,
    pub converged: bool,
    pub iterations: usize,
    /// `‖B‖` estimate: frozen bilinear constant over `min{μ,ν}^{1/2}`.
    pub bilinear_norm: f64,
    /// `α = ‖a‖_{L²([0,T];χ⁰)}` of the free evolution.
    pub free_norm: f64,
    /// `‖X‖_{L²([0,T];χ⁰)}` of the returned iterate.
    pub solution_norm: f64,
    /// Whether `α < 1/(4‖B‖)`.
    pub small_data: bool,
    /// Whether the returned iterate lies in the ball of radius `2α`.
    pub in_ball: bool,
    pub horizon: f64,
}

/// Picard iteration `X_{n+1} = a + B(X_n)` on `[0, cfg.t_end]`, started
/// from the free evolution `X_0 = a`.
pub fn picard_solve(cfg: &SolverConfig, s0: &StatePair) -> Result<(Trajectory, PicardDiagnostics)> {
    let (times, states, diag) = picard_span(cfg, s0, 0.0, cfg.t_end)?;
    Ok((record(cfg, &times, &states)?, diag))
}

pub(crate) fn record(
    cfg: &SolverConfig,
    times: &[f64],
    states: &[StatePair],
) -> Result<Trajectory> {
    let mut rec = Recorder::new(cfg, times[0], &states[0])?;
    for (t, s) in times.iter().zip(states).skip(1) {
        rec.record(*t, s)?;
    }
    Ok(rec.finish())
}

fn l2chi0_sq(s: &StatePair) -> Result<f64> {
    let (a, b) = (chi_norm(&s.u, 0.0)?, chi_norm(&s.b, 0.0)?);
    Ok(a * a + b * b)
}

/// Time-L² from sampled squared values on a uniform grid.
fn time_l2(h: f64, sq: &[f64]) -> f64 {
    let n = sq.len();
    if n < 2 {
        return 0.0;
    }
    let inner: f64 = sq[1..n - 1].iter().sum();
    (h * (inner + 0.5 * (sq[0] + sq[n - 1]))).sqrt()
}

pub(crate) fn picard_span(
    cfg: &SolverConfig,
    s0: &StatePair,
    t0: f64,
    t1: f64,
) -> Result<(Vec<f64>, Vec<StatePair>, PicardDiagnostics)> {
    let grid = check_admissible(cfg, s0)?;
    let (steps, h) = cfg.step_plan(t1 - t0);
    let times: Vec<f64> = (0..=steps)
        .map(|m| if m == steps { t1 } else { t0 + m as f64 * h })
        .collect();

    let step_u: Vec<f64> = grid
        .xi_sq()
        .iter()
        .map(|r2| (-cfg.mu * h * r2).exp())
        .collect();
    let step_b: Vec<f64> = grid
        .xi_sq()
        .iter()
        .map(|r2| (-cfg.nu * h * r2).exp())
        .collect();
    let advance_free = |a: &mut StatePair| {
        a.u.scale_modes(&step_u);
        a.b.scale_modes(&step_b);
    };

    // X_0 = a
    let mut current = Vec::with_capacity(steps + 1);
    let mut a = s0.clone();
    let mut free_sq = Vec::with_capacity(steps + 1);
    for m in 0..=steps {
        if m > 0 {
            advance_free(&mut a);
        }
        free_sq.push(l2chi0_sq(&a)?);
        current.push(a.clone());
    }
    let free_norm = time_l2(h, &free_sq);
    let bilinear_norm = FROZEN.bilinear / cfg.min_viscosity().sqrt();

    let mut next: Vec<StatePair> = Vec::with_capacity(steps + 1);
    let mut distances = Vec::new();
    let mut rising = 0;
    let mut converged = false;
    let mut solution_sq = Vec::new();
    for _ in 0..cfg.picard_max_iters {
        next.clear();
        next.push(s0.clone());
        let mut integ = Integrator::new(&grid, pair_kappas(cfg.mu, cfg.nu));
        let mut duhamel = StatePair::zeros(&grid);
        let mut a = s0.clone();
        let mut diff_sq = vec![0.0];
        solution_sq.clear();
        solution_sq.push(l2chi0_sq(s0)?);
        let (u, b) = nonlinear_rhs(&current[0])?;
        let mut prev = StatePair { u, b };
        for m in 1..=steps {
            let (u, b) = nonlinear_rhs(&current[m])?;
            let forcing = StatePair { u, b };
            integ.step(&mut duhamel, h, &prev, &forcing);
            prev = forcing;
            advance_free(&mut a);
            let mut x = a.clone();
            x.axpy(1.0, &duhamel);
            let mut d = x.clone();
            d.axpy(-1.0, &current[m]);
            diff_sq.push(l2chi0_sq(&d)?);
            solution_sq.push(l2chi0_sq(&x)?);
            next.push(x);
        }
        let d = time_l2(h, &diff_sq);
        if !d.is_finite() {
            return Err(Error::NonFinite {
                last_valid_time: t0,
            });
        }
        std::mem::swap(&mut current, &mut next);
        if let Some(&last) = distances.last() {
            rising = if d > last { rising + 1 } else { 0 };
        }
        distances.push(d);
        if d <= cfg.picard_tol {
            converged = true;
            break;
        }
        if rising >= DIVERGING_RUN {
            return Err(Error::NotContracting { distances });
        }
    }

    let contraction_ratio = match (distances.first(), distances.last()) {
        (Some(&first), Some(&last)) if distances.len() > 1 && first > 0.0 => {
            (last / first).powf(1.0 / (distances.len() - 1) as f64)
        }
        _ => 0.0,
    };
    let solution_norm = time_l2(h, &solution_sq);
    let diag = PicardDiagnostics {
        iterations: distances.len(),
        contraction_ratio,
        converged,
        bilinear_norm,
        free_norm,
        solution_norm,
        small_data: 4.0 * bilinear_norm * free_norm < 1.0,
        in_ball: solution_norm <= 2.0 * free_norm * (1.0 + 1e-12),
        horizon: t1 - t0,
        distances,
    };
    Ok((times, current, diag))
}
