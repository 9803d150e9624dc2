//! Checks on fields and prescribed time series.

use super::result::CheckResult;
use crate::chi_norms::{chi_norm, chi_sum, h1_seminorm, l2_norm, TrajectoryNorms};
use crate::error::{Error, Result};
use crate::semigroup::{duhamel_bilinear, free_evolution_l2chi0, heat_solve, FieldSeries};
use crate::spectral_core::{advect, inner_product, Coupling, Spectral, StatePair, VectorField};

/// Tolerance of the exact discrete inequalities.
pub const EXACT_TOL: f64 = 1e-12;
/// Relative tolerance of discrete identities.
pub const IDENTITY_TOL: f64 = 1e-10;
/// Relative slack allowed for time quadrature in the heat estimate.
pub const HEAT_QUADRATURE_SLACK: f64 = 1e-3;

/// `‖f‖_{χ^{s0}} <= ‖f‖_{χ^{s1}}^θ ‖f‖_{χ^{s2}}^{1-θ}`, `θ = (s2-s0)/(s2-s1)`.
pub fn check_interpolation<F: Spectral>(f: &F, s1: f64, s0: f64, s2: f64) -> Result<CheckResult> {
    if !(s1 < s2) || !(s1 <= s0 && s0 <= s2) {
        return Err(Error::InvalidParameter(format!(
            "need s1 <= s0 <= s2 with s1 < s2, got ({s1}, {s0}, {s2})"
        )));
    }
    let theta = (s2 - s0) / (s2 - s1);
    let lhs = chi_norm(f, s0)?;
    let rhs = chi_norm(f, s1)?.powf(theta) * chi_norm(f, s2)?.powf(1.0 - theta);
    Ok(CheckResult::bound(
        format!("interpolation [{s1},{s0},{s2}]"),
        lhs,
        rhs,
        EXACT_TOL,
    )
    .with_meta("exponents", [s1, s0, s2]))
}

/// `‖f‖_{χ^{-1/2}} <= C ‖f‖^{1/2}_{L²} ‖f‖^{1/2}_{Ḣ¹}` with `C <= limit`.
pub fn check_l2h1<F: Spectral>(f: &F, limit: f64) -> Result<CheckResult> {
    let lhs = chi_norm(f, -0.5)?;
    let rhs = (l2_norm(f) * h1_seminorm(f)).sqrt();
    Ok(CheckResult::empirical("l2_h1_embedding", lhs, rhs).require_at_most(limit))
}

/// `Σ_{k≠0} (|f̂| * |ĝ|)(k)` by dense convolution over the infinite lattice.
pub fn modulus_convolution_chi0<F: Spectral>(f: &F, g: &F) -> Result<f64> {
    if f.grid() != g.grid() {
        return Err(Error::GridMismatch);
    }
    let grid = f.grid();
    let n = grid.n_modes() as i64;
    let side = 2 * n;
    let (mf, mg) = (f.magnitudes(), g.magnitudes());
    let support = |m: &[f64]| -> Vec<(i64, i64, f64)> {
        (1..grid.len())
            .filter(|&k| m[k] > 0.0)
            .map(|k| {
                let (x, y) = grid.mode(k);
                (x, y, m[k])
            })
            .collect()
    };
    let (sf, sg) = (support(&mf), support(&mg));
    let mut conv = vec![0.0; (side * side) as usize];
    for &(ax, ay, a) in &sf {
        for &(bx, by, b) in &sg {
            let (kx, ky) = (ax + bx + n, ay + by + n);
            conv[(kx * side + ky) as usize] += a * b;
        }
    }
    let zero = (n * side + n) as usize;
    Ok(conv
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != zero)
        .map(|(_, v)| v)
        .sum())
}

/// `‖fg‖_{χ⁰} <= ‖f‖_{χ⁰} ‖g‖_{χ⁰}` through the modulus convolution.
pub fn check_product<F: Spectral>(f: &F, g: &F) -> Result<CheckResult> {
    let lhs = modulus_convolution_chi0(f, g)?;
    let rhs = chi_norm(f, 0.0)? * chi_norm(g, 0.0)?;
    Ok(CheckResult::bound("product", lhs, rhs, EXACT_TOL))
}

/// `‖fg‖_{L¹(χ⁰)} <= ‖f‖_{L²(χ⁰)} ‖g‖_{L²(χ⁰)}` on a shared time grid.
pub fn check_product_in_time<F: Spectral>(
    f: &FieldSeries<F>,
    g: &FieldSeries<F>,
) -> Result<CheckResult> {
    if f.times() != g.times() {
        return Err(Error::InvalidParameter(
            "series must share their time grid".into(),
        ));
    }
    let pointwise = f
        .values()
        .iter()
        .zip(g.values())
        .map(|(a, b)| modulus_convolution_chi0(a, b))
        .collect::<Result<Vec<_>>>()?;
    let lhs = crate::chi_norms::trapezoid(f.times(), &pointwise);
    let rhs = f.norms()?.time_lp_norm(2.0, 0.0)? * g.norms()?.time_lp_norm(2.0, 0.0)?;
    Ok(CheckResult::bound("product_in_time", lhs, rhs, EXACT_TOL))
}

/// `‖B(u,b)‖_{L²(χ⁰)} <= C min{μ,ν}^{-1/2} ‖(u,b)‖²_{L²(χ⁰)}` with
/// `C <= limit`, where `B` carries the all-plus quadratic terms.
pub fn check_bilinear(
    traj: &FieldSeries<StatePair>,
    mu: f64,
    nu: f64,
    limit: f64,
) -> Result<CheckResult> {
    if traj.len() < 2 {
        return Err(Error::EmptyTrajectory(
            "bilinear check needs two samples".into(),
        ));
    }
    let b = duhamel_bilinear(traj, mu, nu, Coupling::Symmetric)?;
    let lhs = b.pair_norms()?.time_lp_norm(2.0, 0.0)?;
    let x = traj.pair_norms()?.time_lp_norm(2.0, 0.0)?;
    let rhs = x * x / mu.min(nu).sqrt();
    Ok(CheckResult::empirical("bilinear", lhs, rhs)
        .require_at_most(limit)
        .with_meta("mu", mu)
        .with_meta("nu", nu))
}

/// `‖v‖_{L̃^∞(χ^s)} + κ‖v‖_{L¹(χ^{s+2})} <= 2 (‖v0‖_{χ^s} + ‖f‖_{L¹(χ^s)})`
/// for the forced heat solution, up to [`HEAT_QUADRATURE_SLACK`].
pub fn check_heat_estimate<F: Spectral>(
    v0: &F,
    forcing: &FieldSeries<F>,
    kappa: f64,
    s: f64,
) -> Result<CheckResult> {
    let v = heat_solve(v0, forcing, kappa)?;
    let record = |series: &FieldSeries<F>| -> Result<TrajectoryNorms> {
        let mut tn = TrajectoryNorms::new(series.grid(), 1).with_exponents(&[s, s + 2.0]);
        for (t, x) in series.times().iter().zip(series.values()) {
            tn.push(*t, &[x])?;
        }
        Ok(tn)
    };
    let vn = record(&v)?;
    let fnorm = record(forcing)?;
    let tilde = vn.tilde_channel(0, s);
    let dissipative = kappa * vn.channel_lp_norm(0, 1.0, s + 2.0)?;
    let lhs = tilde + dissipative;
    let rhs = chi_norm(v0, s)? + fnorm.channel_lp_norm(0, 1.0, s)?;
    let mut out = CheckResult::empirical("heat_estimate", lhs, rhs)
        .with_meta("tilde_part", tilde)
        .with_meta("dissipative_part", dissipative)
        .with_meta("kappa", kappa)
        .with_meta("s", s);
    out.pass &= out.ratio <= 2.0 * (1.0 + HEAT_QUADRATURE_SLACK);
    Ok(out.with_meta("limit", 2.0 * (1.0 + HEAT_QUADRATURE_SLACK)))
}

/// Free evolution `L²(χ⁰)` value against its Minkowski and data majorants.
pub fn check_free_evolution(
    u0: &VectorField,
    b0: &VectorField,
    mu: f64,
    nu: f64,
    t_end: f64,
) -> Result<CheckResult> {
    let r = free_evolution_l2chi0(u0, b0, mu, nu, t_end)?;
    let inner = r.value <= r.minkowski_bound * (1.0 + EXACT_TOL);
    let mut out = CheckResult::bound("free_evolution", r.value, r.data_bound, EXACT_TOL)
        .with_meta("minkowski_bound", r.minkowski_bound)
        .with_meta(
            "viscosity_per_field",
            "each field decays with its own viscosity",
        );
    out.pass &= inner;
    Ok(out)
}

/// Pointwise majorant `‖(u,b)‖²_{χ⁰} <= ‖u‖_{χ^{-1}}‖u‖_{χ¹} + ‖b‖_{χ^{-1}}‖b‖_{χ¹}`.
pub fn check_blowup_majorant(s: &StatePair) -> Result<CheckResult> {
    let g = s.grid();
    let (mu, mb) = (s.u.magnitudes(), s.b.magnitudes());
    let n = |m: &[f64], e: f64| chi_sum(g, m, e);
    let lhs = n(&mu, 0.0).powi(2) + n(&mb, 0.0).powi(2);
    let rhs = n(&mu, -1.0) * n(&mu, 1.0) + n(&mb, -1.0) * n(&mb, 1.0);
    if !s.is_mean_free() {
        return Err(Error::NonzeroMean { s: -1.0 });
    }
    Ok(CheckResult::bound(
        "blowup_majorant",
        lhs,
        rhs,
        IDENTITY_TOL,
    ))
}

/// The three transport cancellations used in the difference energy
/// estimate, for divergence-free `v` and `h`:
/// `⟨(v·∇)w, w⟩`, `⟨(v·∇)g, g⟩` and `⟨(h·∇)g, w⟩ + ⟨(h·∇)w, g⟩`.
pub fn check_cancellations(
    v: &VectorField,
    h: &VectorField,
    w: &VectorField,
    g: &VectorField,
) -> Result<[CheckResult; 3]> {
    let l2 = |f: &VectorField| l2_norm(f);
    let a = advect(v, w)?;
    let b = advect(v, g)?;
    let c1 = advect(h, g)?;
    let c2 = advect(h, w)?;
    let make = |name: &str, value: f64, scale: f64| {
        let rel = crate::verification::result::ratio(value.abs(), scale);
        CheckResult::bound(name, rel, 1.0, 0.0)
            .with_meta("value", value)
            .with_meta("scale", scale)
            .with_meta("relative", rel)
            .pass_if(rel <= IDENTITY_TOL)
    };
    Ok([
        make("cancellation_vw", inner_product(&a, w), l2(&a) * l2(w)),
        make("cancellation_vg", inner_product(&b, g), l2(&b) * l2(g)),
        make(
            "cancellation_hgw",
            inner_product(&c1, w) + inner_product(&c2, g),
            l2(&c1) * l2(w) + l2(&c2) * l2(g),
        ),
    ])
}

impl CheckResult {
    fn pass_if(mut self, ok: bool) -> Self {
        self.pass = ok;
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_scalar, random_state, random_vector, RandomFieldSpec};
    use crate::spectral_core::{Grid, SpectralField};
    use num_complex::Complex64;
    use std::f64::consts::PI;

    fn grid() -> Grid {
        Grid::new(16, 2.0 * PI).unwrap()
    }

    #[test]
    fn interpolation_single_mode_is_equality() {
        let f = SpectralField::single_mode(&grid(), 2, 1, Complex64::new(0.7, 0.1));
        let r = check_interpolation(&f, -1.0, -0.5, 1.0).unwrap();
        assert!(r.pass && (r.ratio - 1.0).abs() < 1e-14);
        let limit = check_interpolation(&f, -1.0, -1.0, 1.0).unwrap();
        assert!((limit.lhs - limit.rhs).abs() < 1e-15);
        assert!(check_interpolation(&f, 1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn l2h1_single_mode_ratio() {
        let f = SpectralField::single_mode(&grid(), 1, 0, Complex64::new(0.0, 2.0));
        let r = check_l2h1(&f, 1.0).unwrap();
        assert!((r.ratio - 1.0 / (2.0 * PI)).abs() < 1e-15);
        let z = SpectralField::zeros(&grid());
        let r = check_l2h1(&z, 1.0).unwrap();
        assert!(r.pass && r.ratio == 0.0);
    }

    #[test]
    fn product_single_modes_are_equality() {
        let g = grid();
        let a = SpectralField::single_mode(&g, 1, 2, Complex64::new(0.5, 0.0));
        let b = SpectralField::single_mode(&g, -3, 1, Complex64::new(0.0, 2.0));
        let r = check_product(&a, &b).unwrap();
        assert!((r.lhs - r.rhs).abs() < 1e-15 && r.pass);
        let r = check_product(&a, &SpectralField::zeros(&g)).unwrap();
        assert_eq!((r.lhs, r.rhs, r.pass), (0.0, 0.0, true));
    }

    #[test]
    fn product_random_pairs() {
        for seed in 0..20 {
            let f = random_scalar(&RandomFieldSpec::new(seed, 16).beta(1.5)).unwrap();
            let g = random_scalar(&RandomFieldSpec::new(seed + 100, 16).beta(1.5)).unwrap();
            assert!(check_product(&f, &g).unwrap().pass);
        }
    }

    #[test]
    fn bilinear_zero_trajectory() {
        let g = grid();
        let series = FieldSeries::uniform(1.0, 4, |_| StatePair::zeros(&g)).unwrap();
        let r = check_bilinear(&series, 1.0, 1.0, 1.0).unwrap();
        assert_eq!((r.lhs, r.rhs), (0.0, 0.0));
        assert!(r.pass);
    }

    #[test]
    fn heat_estimate_saturates_at_two() {
        let g = grid();
        let v0 = SpectralField::real_mode(&g, 1, 0, Complex64::new(1.0, 0.0));
        let kappa = 1.0;
        let forcing = FieldSeries::uniform(30.0, 30_000, |_| SpectralField::zeros(&g)).unwrap();
        let r = check_heat_estimate(&v0, &forcing, kappa, 0.0).unwrap();
        assert!((r.ratio - 2.0).abs() < 1e-6, "{}", r.ratio);
        assert!(r.pass);
    }

    #[test]
    fn heat_estimate_constant_forcing_closed_form() {
        // v0 = 0, f = F e_k: |v̂| = F(1 - e^{-λt})/λ, λ = κ|ξ|²
        let g = grid();
        let (kappa, amp, t_end) = (0.5, 0.8, 2.0);
        let f = SpectralField::single_mode(&g, 1, 1, Complex64::new(amp, 0.0));
        let series = FieldSeries::uniform(t_end, 20_000, |_| f.clone()).unwrap();
        let r = check_heat_estimate(&SpectralField::zeros(&g), &series, kappa, 0.0).unwrap();
        let lambda = kappa * 2.0;
        let decay = (-lambda * t_end).exp();
        let tilde = amp * (1.0 - decay) / lambda;
        let l1 = 2.0 * amp * (t_end - (1.0 - decay) / lambda) / lambda;
        let expect_lhs = tilde + kappa * l1;
        assert!(
            (r.lhs - expect_lhs).abs() < 1e-7,
            "{} vs {expect_lhs}",
            r.lhs
        );
        assert!((r.rhs - amp * t_end).abs() < 1e-12);
        let z = FieldSeries::uniform(1.0, 4, |_| SpectralField::zeros(&g)).unwrap();
        let r = check_heat_estimate(&SpectralField::zeros(&g), &z, 1.0, -1.0).unwrap();
        assert!(r.pass && r.lhs == 0.0 && r.rhs == 0.0);
    }

    #[test]
    fn free_evolution_random_data() {
        for seed in 0..10 {
            let u = random_vector(&RandomFieldSpec::new(seed, 16)).unwrap();
            let b = random_vector(&RandomFieldSpec::new(seed + 50, 16)).unwrap();
            assert!(check_free_evolution(&u, &b, 0.3, 0.8, 2.0).unwrap().pass);
        }
    }

    #[test]
    fn majorant_and_cancellations_on_random_states() {
        for seed in 0..10 {
            let s = random_state(&RandomFieldSpec::new(seed, 16).beta(1.5)).unwrap();
            assert!(check_blowup_majorant(&s).unwrap().pass);
            let d = random_state(&RandomFieldSpec::new(seed + 7, 16).beta(1.5)).unwrap();
            for c in check_cancellations(&s.u, &s.b, &d.u, &d.b).unwrap() {
                assert!(c.pass, "{c:?}");
            }
        }
    }
}
