//! Heat propagator, forced heat solves with exponential-integrator weights,
//! the Duhamel bilinear operator and the free-evolution bound.

use num_complex::Complex64;

use crate::chi_norms::{pair_norm, TrajectoryNorms};
use crate::error::{Error, Result};
use crate::spectral_core::{quadratic_terms, Coupling, Grid, Spectral, StatePair, VectorField};

/// Time samples of a spectral quantity.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldSeries<F> {
    times: Vec<f64>,
    values: Vec<F>,
}

impl<F: Spectral> FieldSeries<F> {
    pub fn new(times: Vec<f64>, values: Vec<F>) -> Result<Self> {
        if times.len() != values.len() {
            return Err(Error::SizeMismatch {
                expected: times.len(),
                found: values.len(),
            });
        }
        if times.is_empty() {
            return Err(Error::EmptyTrajectory("series has no samples".into()));
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidParameter(
                "sample times must increase strictly".into(),
            ));
        }
        let grid = values[0].grid();
        if values.iter().any(|v| v.grid() != grid) {
            return Err(Error::GridMismatch);
        }
        Ok(Self { times, values })
    }

    /// Samples `f(t_m)` on `t_m = m h`, `m = 0..=steps`.
    pub fn uniform(t_end: f64, steps: usize, f: impl Fn(f64) -> F) -> Result<Self> {
        if steps == 0 || !(t_end > 0.0) {
            return Err(Error::InvalidParameter(
                "need steps > 0 and t_end > 0".into(),
            ));
        }
        let times: Vec<f64> = (0..=steps)
            .map(|m| t_end * m as f64 / steps as f64)
            .collect();
        let values = times.iter().map(|&t| f(t)).collect();
        Self::new(times, values)
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[F] {
        &self.values
    }

    pub fn into_values(self) -> Vec<F> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn grid(&self) -> &Grid {
        self.values[0].grid()
    }

    pub fn last(&self) -> &F {
        self.values.last().expect("nonempty series")
    }

    /// Single-channel norm record of the series.
    pub fn norms(&self) -> Result<TrajectoryNorms> {
        let mut tn = TrajectoryNorms::new(self.grid(), 1);
        for (t, v) in self.times.iter().zip(&self.values) {
            tn.push(*t, &[v])?;
        }
        Ok(tn)
    }
}

impl FieldSeries<StatePair> {
    /// Two-channel `(u, b)` norm record of the series.
    pub fn pair_norms(&self) -> Result<TrajectoryNorms> {
        let mut tn = TrajectoryNorms::new(self.grid(), 2);
        for (t, v) in self.times.iter().zip(&self.values) {
            tn.push::<VectorField>(*t, &[&v.u, &v.b])?;
        }
        Ok(tn)
    }
}

fn check_kappa(kappa: f64) -> Result<()> {
    if !(kappa > 0.0) || !kappa.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "diffusivity must be positive, got {kappa}"
        )));
    }
    Ok(())
}

/// Multipliers `e^{-κ t |ξ_k|²}`.
pub fn heat_factors(grid: &Grid, kappa: f64, t: f64) -> Result<Vec<f64>> {
    check_kappa(kappa)?;
    if !(t >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "time must be nonnegative, got {t}"
        )));
    }
    Ok(grid
        .xi_sq()
        .iter()
        .map(|r2| (-kappa * t * r2).exp())
        .collect())
}

/// `e^{κ t Δ} f`.
pub fn heat_propagate<F: Spectral>(f: &F, kappa: f64, t: f64) -> Result<F> {
    let factors = heat_factors(f.grid(), kappa, t)?;
    let mut out = f.clone();
    out.scale_modes(&factors);
    Ok(out)
}

/// `(e^{μtΔ}u, e^{νtΔ}b)`.
pub fn heat_propagate_pair(s: &StatePair, mu: f64, nu: f64, t: f64) -> Result<StatePair> {
    Ok(StatePair {
        u: heat_propagate(&s.u, mu, t)?,
        b: heat_propagate(&s.b, nu, t)?,
    })
}

/// `φ₁(z) = (1 - e^{-z})/z`.
fn phi1(z: f64) -> f64 {
    if z < 1e-3 {
        series(z, 1)
    } else {
        -(-z).exp_m1() / z
    }
}

/// `(z - 1 + e^{-z})/z²`.
fn phi2(z: f64) -> f64 {
    if z < 1e-2 {
        series(z, 2)
    } else {
        (z + (-z).exp_m1()) / (z * z)
    }
}

/// `Σ_n (-z)^n / (n + shift)!`, summed until terms vanish.
fn series(z: f64, shift: u32) -> f64 {
    let mut fact: f64 = (1..=shift).map(f64::from).product();
    let mut term = 1.0 / fact;
    let mut sum = term;
    let mut n = 0u32;
    while term.abs() > 1e-18 * sum.abs() && n < 30 {
        n += 1;
        fact = (n + shift) as f64;
        term *= -z / fact;
        sum += term;
    }
    sum
}

/// Per-mode weights of one step `h` of the exponential integrator with
/// piecewise-linear forcing:
/// `v⁺ = e^{-λh} v + w_old f_m + w_new f_{m+1}`.
#[derive(Clone, Debug)]
pub(crate) struct StepWeights {
    h: f64,
    pub decay: Vec<f64>,
    pub w_old: Vec<f64>,
    pub w_new: Vec<f64>,
}

impl StepWeights {
    pub fn new(grid: &Grid, kappa: f64, h: f64) -> Self {
        let len = grid.len();
        let (mut decay, mut w_old, mut w_new) = (
            Vec::with_capacity(len),
            Vec::with_capacity(len),
            Vec::with_capacity(len),
        );
        for r2 in grid.xi_sq() {
            let z = kappa * r2 * h;
            let w0 = h * phi1(z);
            let w1 = h * phi2(z);
            decay.push((-z).exp());
            w_old.push(w0 - w1);
            w_new.push(w1);
        }
        Self {
            h,
            decay,
            w_old,
            w_new,
        }
    }

    fn apply(&self, v: &mut [Complex64], f_old: &[Complex64], f_new: &[Complex64]) {
        for k in 0..v.len() {
            v[k] = v[k] * self.decay[k] + f_old[k] * self.w_old[k] + f_new[k] * self.w_new[k];
        }
    }
}

/// Weight tables for each component, reused while the step stays fixed.
pub(crate) struct Integrator {
    grid: Grid,
    kappas: Vec<f64>,
    cache: Vec<StepWeights>,
}

impl Integrator {
    pub fn new(grid: &Grid, kappas: Vec<f64>) -> Self {
        Self {
            grid: grid.clone(),
            kappas,
            cache: Vec::new(),
        }
    }

    /// Advance `v` over one interval of length `h` given the forcing at its
    /// endpoints.
    pub fn step<F: Spectral>(&mut self, v: &mut F, h: f64, f_old: &F, f_new: &F) {
        if self
            .cache
            .first()
            .is_none_or(|w| (w.h - h).abs() > 1e-14 * h)
        {
            self.cache = self
                .kappas
                .iter()
                .map(|&k| StepWeights::new(&self.grid, k, h))
                .collect();
        }
        let (fo, fn_) = (f_old.components(), f_new.components());
        for (c, comp) in v.components_mut().into_iter().enumerate() {
            self.cache[c].apply(comp, fo[c], fn_[c]);
        }
    }
}

/// Diffusivity per component of a state pair.
pub(crate) fn pair_kappas(mu: f64, nu: f64) -> Vec<f64> {
    vec![mu, mu, nu, nu]
}

fn forced_heat<F: Spectral>(
    v0: &F,
    forcing: &FieldSeries<F>,
    kappas: Vec<f64>,
) -> Result<FieldSeries<F>> {
    if forcing.grid() != v0.grid() {
        return Err(Error::GridMismatch);
    }
    if forcing.times[0] != 0.0 {
        return Err(Error::InvalidParameter(
            "forcing series must start at t = 0".into(),
        ));
    }
    let mut integ = Integrator::new(v0.grid(), kappas);
    let mut v = v0.clone();
    let mut out = Vec::with_capacity(forcing.len());
    out.push(v.clone());
    for m in 1..forcing.len() {
        let h = forcing.times[m] - forcing.times[m - 1];
        integ.step(&mut v, h, &forcing.values[m - 1], &forcing.values[m]);
        out.push(v.clone());
    }
    Ok(FieldSeries {
        times: forcing.times.clone(),
        values: out,
    })
}

/// Solves `∂_t v - κΔv = f`, `v(0) = v0` on the forcing's time grid.
pub fn heat_solve<F: Spectral>(
    v0: &F,
    forcing: &FieldSeries<F>,
    kappa: f64,
) -> Result<FieldSeries<F>> {
    check_kappa(kappa)?;
    let n = v0.components().len();
    forced_heat(v0, forcing, vec![kappa; n])
}

/// Forced heat solve for a state pair, velocity with `μ` and magnetic field
/// with `ν`.
pub fn heat_solve_pair(
    v0: &StatePair,
    forcing: &FieldSeries<StatePair>,
    mu: f64,
    nu: f64,
) -> Result<FieldSeries<StatePair>> {
    check_kappa(mu)?;
    check_kappa(nu)?;
    forced_heat(v0, forcing, pair_kappas(mu, nu))
}

/// Quadratic terms of every sample in a series.
pub fn quadratic_series(
    traj: &FieldSeries<StatePair>,
    coupling: Coupling,
) -> Result<FieldSeries<StatePair>> {
    let values = traj
        .values
        .iter()
        .map(|s| quadratic_terms(s, coupling).map(|(u, b)| StatePair { u, b }))
        .collect::<Result<Vec<_>>>()?;
    Ok(FieldSeries {
        times: traj.times.clone(),
        values,
    })
}

/// Duhamel bilinear term on the series' own time grid.
///
/// With [`Coupling::Symmetric`] this is
/// `∫_0^t (e^{μ(t-τ)Δ}ℙ∇·(u⊗u + b⊗b), e^{ν(t-τ)Δ}∇·(u⊗b + b⊗u)) dτ`;
/// with [`Coupling::Mhd`] the integrand is the MHD nonlinearity, so that a
/// mild solution satisfies `X = a + B(X)`.
pub fn duhamel_bilinear(
    traj: &FieldSeries<StatePair>,
    mu: f64,
    nu: f64,
    coupling: Coupling,
) -> Result<FieldSeries<StatePair>> {
    check_kappa(mu)?;
    check_kappa(nu)?;
    let forcing = quadratic_series(traj, coupling)?;
    forced_heat(
        &StatePair::zeros(traj.grid()),
        &forcing,
        pair_kappas(mu, nu),
    )
}

/// `L²([0,T]; χ⁰)` of the free evolution and its two majorants.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FreeEvolutionBound {
    /// `(∫_0^T ‖e^{μtΔ}u0‖²_{χ⁰} + ‖e^{νtΔ}b0‖²_{χ⁰} dt)^{1/2}`, exact.
    pub value: f64,
    /// Mode-by-mode Minkowski majorant of `value`.
    pub minkowski_bound: f64,
    /// `(2 min{μ,ν})^{-1/2} ‖(u0, b0)‖_{χ^{-1}}` with the squared pair convention.
    pub data_bound: f64,
}

/// Evaluates the free-evolution norm in closed form. `t_end = ∞` is allowed.
///
/// Grouping modes into shells of equal `|ξ|` turns the squared norm into a
/// double sum over shells of `M_i M_j (1 - e^{-κT(r_i² + r_j²)})/(κ(r_i² + r_j²))`,
/// which integrates the time quadrature exactly.
pub fn free_evolution_l2chi0(
    u0: &VectorField,
    b0: &VectorField,
    mu: f64,
    nu: f64,
    t_end: f64,
) -> Result<FreeEvolutionBound> {
    check_kappa(mu)?;
    check_kappa(nu)?;
    if !(t_end > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "horizon must be positive, got {t_end}"
        )));
    }
    if u0.grid() != b0.grid() {
        return Err(Error::GridMismatch);
    }
    let data = StatePair {
        u: u0.clone(),
        b: b0.clone(),
    };
    let data_bound = pair_norm(&data, -1.0, 2.0)? / (2.0 * mu.min(nu)).sqrt();
    let (vu, mu_bound) = channel_free_evolution(u0, mu, t_end);
    let (vb, mb_bound) = channel_free_evolution(b0, nu, t_end);
    Ok(FreeEvolutionBound {
        value: (vu + vb).sqrt(),
        minkowski_bound: (mu_bound * mu_bound + mb_bound * mb_bound).sqrt(),
        data_bound,
    })
}

/// `(∫_0^T ‖e^{κtΔ}f‖²_{χ⁰} dt, Σ_k |f̂_k| ‖e^{-κt|ξ_k|²}‖_{L²_t})`.
fn channel_free_evolution(f: &VectorField, kappa: f64, t_end: f64) -> (f64, f64) {
    let grid = f.grid();
    let mags = f.magnitudes();
    let xi_sq = grid.xi_sq();
    // time-L² of e^{-κ t λ} for λ = rate
    let kernel = |rate: f64| {
        if t_end.is_infinite() {
            1.0 / rate
        } else {
            -(-rate * t_end).exp_m1() / rate
        }
    };
    let mut shells: Vec<(f64, f64)> = Vec::new();
    let mut minkowski = 0.0;
    let mut order: Vec<usize> = (1..grid.len()).filter(|&k| mags[k] > 0.0).collect();
    order.sort_by(|&a, &b| xi_sq[a].total_cmp(&xi_sq[b]));
    for k in order {
        minkowski += mags[k] * kernel(2.0 * kappa * xi_sq[k]).sqrt();
        match shells.last_mut() {
            Some((r2, m)) if *r2 == xi_sq[k] => *m += mags[k],
            _ => shells.push((xi_sq[k], mags[k])),
        }
    }
    let mut value = 0.0;
    for (i, &(ri, mi)) in shells.iter().enumerate() {
        value += mi * mi * kernel(2.0 * kappa * ri);
        for &(rj, mj) in &shells[i + 1..] {
            value += 2.0 * mi * mj * kernel(kappa * (ri + rj));
        }
    }
    (value, minkowski)
}
