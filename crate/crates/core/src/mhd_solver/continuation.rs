use serde::Serialize;

use super::config::SolverConfig;
use super::picard::{picard_span, record};
use super::stepper::check_admissible;
use super::trajectory::Trajectory;
use crate::chi_norms::pair_norm;
use crate::error::{Error, Result};
use crate::spectral_core::{Spectral, StatePair};

/// Upper limit on continuation segments before giving up.
const MAX_SEGMENTS: usize = 10_000;

fn check_viscosities(mu: f64, nu: f64, c0: f64) -> Result<f64> {
    for (name, v) in [("mu", mu), ("nu", nu), ("c0", c0)] {
        if !(v > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "{name} must be positive, got {v}"
            )));
        }
    }
    Ok(mu.min(nu))
}

/// `min{μ,ν} 2^{-3/2} / C0`: data below this `χ^{-1}` size gives a global
/// solution in one Picard solve.
pub fn smallness_threshold(mu: f64, nu: f64, c0: f64) -> Result<f64> {
    Ok(check_viscosities(mu, nu, c0)? * 2f64.powf(-1.5) / c0)
}

/// `min{μ,ν} 2^{-5/2} / C0`, the admissible `χ^{-1}` size of the high
/// frequency part.
pub fn split_tolerance(mu: f64, nu: f64, c0: f64) -> Result<f64> {
    Ok(check_viscosities(mu, nu, c0)? * 2f64.powf(-2.5) / c0)
}

/// `(min{μ,ν}^{1/2} / (8 ρ C0 ‖(u0,b0)‖_{χ^{-1}}))²`; infinite when `ρ` or
/// the norm vanishes.
pub fn local_existence_time(mu: f64, nu: f64, rho: f64, c0: f64, chi_m1_norm: f64) -> Result<f64> {
    let m = check_viscosities(mu, nu, c0)?;
    if !(rho >= 0.0) || !(chi_m1_norm >= 0.0) {
        return Err(Error::InvalidParameter(
            "radius and norm must be nonnegative".into(),
        ));
    }
    if rho == 0.0 || chi_m1_norm == 0.0 {
        return Ok(f64::INFINITY);
    }
    let root = m.sqrt() / (8.0 * rho * c0 * chi_m1_norm);
    Ok(root * root)
}

/// Per-mode tail weights `|ξ_k|^{-1}(|û_k| + |b̂_k|)` sorted by radius,
/// grouped into shells `(radius, shell mass)`.
fn shells(grid: &crate::Grid, weights: impl Fn(usize) -> f64) -> Vec<(f64, f64)> {
    let xi = grid.xi_norm();
    let mut order: Vec<usize> = (1..grid.len()).collect();
    order.sort_by(|&a, &b| xi[a].total_cmp(&xi[b]));
    let mut out: Vec<(f64, f64)> = Vec::new();
    for k in order {
        let w = weights(k) / xi[k];
        match out.last_mut() {
            Some((r, m)) if *r == xi[k] => *m += w,
            _ => out.push((xi[k], w)),
        }
    }
    out
}

/// Smallest radius in `{0} ∪ {lattice radii}` whose strict tail mass is at
/// most `eps`.
fn scan_radius(shells: &[(f64, f64)], eps: f64) -> f64 {
    let mut tail: f64 = shells.iter().map(|s| s.1).sum();
    if tail <= eps {
        return 0.0;
    }
    for &(r, m) in shells {
        tail -= m;
        if tail <= eps * (1.0 + 1e-14) {
            return r;
        }
    }
    shells.last().map_or(0.0, |s| s.0)
}

/// Splits `s0` at the smallest radius `ρ` whose tail
/// `Σ_{|ξ|>ρ} |ξ|^{-1}(|û0| + |b̂0|)` is at most `eps`.
pub fn split_frequency(s0: &StatePair, eps: f64) -> Result<(StatePair, StatePair, f64)> {
    if !(eps > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "tail tolerance must be positive, got {eps}"
        )));
    }
    let grid = s0.grid().clone();
    let (mu, mb) = (s0.u.magnitudes(), s0.b.magnitudes());
    let rho = scan_radius(&shells(&grid, |k| mu[k] + mb[k]), eps);
    let xi = grid.xi_norm();
    let low_mask: Vec<f64> = xi
        .iter()
        .map(|&r| if r <= rho { 1.0 } else { 0.0 })
        .collect();
    let high_mask: Vec<f64> = low_mask.iter().map(|v| 1.0 - v).collect();
    let mut low = s0.clone();
    low.scale_modes(&low_mask);
    let mut high = s0.clone();
    high.scale_modes(&high_mask);
    Ok((low, high, rho))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Segment {
    pub t_start: f64,
    pub t_stop: f64,
    /// Horizon granted by the existence-time formula (infinite below the
    /// smallness threshold).
    pub t_local: f64,
    pub rho: f64,
    pub chi_m1_norm: f64,
    pub small_data: bool,
    pub iterations: usize,
    pub contraction_ratio: f64,
    pub converged: bool,
    /// `∫_0^{t_stop} ‖(u,b)‖²_{χ⁰}` so far.
    pub blowup_integral: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ContinuationReport {
    pub threshold: f64,
    pub epsilon: f64,
    pub segments: Vec<Segment>,
    pub blowup_integral: f64,
    /// Tail radius of the per-mode running suprema at tolerance `epsilon`.
    pub uniform_rho: f64,
    /// Sup over the run of the `χ^{-1}` norm.
    pub sup_chi_m1: f64,
    /// Existence time computed from `uniform_rho` and `sup_chi_m1`; a lower
    /// bound for every segment's `t_local`.
    pub t_local_lower_bound: f64,
}

/// Restarts Picard solves on horizons granted by the splitting argument
/// until `cfg.t_end` is reached.
pub fn continuation_solve(
    cfg: &SolverConfig,
    s0: &StatePair,
) -> Result<(Trajectory, ContinuationReport)> {
    let grid = check_admissible(cfg, s0)?;
    let threshold = smallness_threshold(cfg.mu, cfg.nu, cfg.c0)?;
    let epsilon = split_tolerance(cfg.mu, cfg.nu, cfg.c0)?;
    let mut times = vec![0.0];
    let mut states = vec![s0.clone()];
    let mut segments: Vec<Segment> = Vec::new();
    let mut t = 0.0;
    let mut state = s0.clone();
    let mut blowup = 0.0;
    let mut sup_mags: Vec<f64> = vec![0.0; grid.len()];
    let mut sup_norm: f64 = 0.0;
    let track = |s: &StatePair, sup: &mut Vec<f64>| {
        let (mu, mb) = (s.u.magnitudes(), s.b.magnitudes());
        for k in 0..sup.len() {
            sup[k] = sup[k].max(mu[k] + mb[k]);
        }
    };
    track(s0, &mut sup_mags);

    while t < cfg.t_end * (1.0 - 1e-12) {
        if segments.len() >= MAX_SEGMENTS {
            return Err(Error::InvalidParameter(format!(
                "continuation needed more than {MAX_SEGMENTS} segments"
            )));
        }
        let norm = pair_norm(&state, -1.0, 1.0)?;
        sup_norm = sup_norm.max(norm);
        let small = norm <= threshold;
        let (rho, t_local) = if small {
            (0.0, f64::INFINITY)
        } else {
            let (_, _, rho) = split_frequency(&state, epsilon)?;
            (
                rho,
                local_existence_time(cfg.mu, cfg.nu, rho, cfg.c0, norm)?,
            )
        };
        let t_stop = (t + t_local).min(cfg.t_end);
        let (seg_times, seg_states, diag) = picard_span(cfg, &state, t, t_stop)?;
        if !diag.converged {
            return Err(Error::NotContracting {
                distances: diag.distances,
            });
        }
        let h = seg_times[1] - seg_times[0];
        for m in 1..seg_times.len() {
            let (a, b) = (&seg_states[m - 1], &seg_states[m]);
            blowup += 0.5 * h * (chi0_sq(a) + chi0_sq(b));
            track(b, &mut sup_mags);
            sup_norm = sup_norm.max(pair_norm(b, -1.0, 1.0)?);
        }
        if blowup > cfg.blowup_guard {
            return Err(Error::BlowupGuardTripped {
                last_valid_time: t_stop,
                integral: blowup,
                guard: cfg.blowup_guard,
            });
        }
        times.extend_from_slice(&seg_times[1..]);
        state = seg_states.last().expect("segment samples").clone();
        states.extend(seg_states.into_iter().skip(1));
        segments.push(Segment {
            t_start: t,
            t_stop,
            t_local,
            rho,
            chi_m1_norm: norm,
            small_data: small,
            iterations: diag.iterations,
            contraction_ratio: diag.contraction_ratio,
            converged: diag.converged,
            blowup_integral: blowup,
        });
        t = t_stop;
    }

    let uniform_rho = scan_radius(&shells(&grid, |k| sup_mags[k]), epsilon);
    let t_local_lower_bound = local_existence_time(cfg.mu, cfg.nu, uniform_rho, cfg.c0, sup_norm)?;
    let traj = record(cfg, &times, &states)?;
    let report = ContinuationReport {
        threshold,
        epsilon,
        blowup_integral: traj.norms().blowup_integral(),
        segments,
        uniform_rho,
        sup_chi_m1: sup_norm,
        t_local_lower_bound,
    };
    Ok((traj, report))
}

fn chi0_sq(s: &StatePair) -> f64 {
    let g = s.grid();
    let a = crate::chi_norms::chi_sum(g, &s.u.magnitudes(), 0.0);
    let b = crate::chi_norms::chi_sum(g, &s.b.magnitudes(), 0.0);
    a * a + b * b
}
