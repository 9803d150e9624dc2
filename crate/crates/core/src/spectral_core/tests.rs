use std::collections::HashMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;

use super::*;
use crate::random::{random_state, random_vector, RandomFieldSpec};

const I: Complex64 = Complex64::new(0.0, 1.0);

fn grid(n: usize) -> Grid {
    Grid::new(n, 2.0 * PI).unwrap()
}

fn sampled(g: &Grid, f: impl Fn(f64, f64) -> f64) -> SpectralField {
    let n = g.n_modes();
    let mut s = vec![Complex64::new(0.0, 0.0); n * n];
    for ix in 0..n {
        for iy in 0..n {
            s[ix * n + iy] = Complex64::new(f(g.coordinate(ix), g.coordinate(iy)), 0.0);
        }
    }
    from_physical(g, &s).unwrap()
}

fn taylor_green(g: &Grid) -> VectorField {
    VectorField::new(
        sampled(g, |x, y| x.sin() * y.cos()),
        sampled(g, |x, y| -x.cos() * y.sin()),
    )
    .unwrap()
}

fn max_diff(a: &VectorField, b: &VectorField) -> f64 {
    let mut d = a.clone();
    d.axpy(-1.0, b);
    d.max_magnitude()
}

type Sparse = HashMap<(i64, i64), Complex64>;

fn sparse(f: &SpectralField) -> Sparse {
    let g = f.grid();
    (0..g.len())
        .filter(|&k| g.retained()[k] && f.coeffs()[k] != Complex64::new(0.0, 0.0))
        .map(|k| (g.mode(k), f.coeffs()[k]))
        .collect()
}

/// Exact lattice convolution `(fg)^_k = Σ_{p+q=k} f_p g_q`.
fn convolve(f: &Sparse, g: &Sparse) -> Sparse {
    let mut out = Sparse::new();
    for (&(px, py), &a) in f {
        for (&(qx, qy), &b) in g {
            *out.entry((px + qx, py + qy)).or_default() += a * b;
        }
    }
    out
}

/// `Σ_j i ξ_j (a_j c)` for sparse components.
fn div_of(a: [&Sparse; 2], c: &Sparse, scale: f64) -> Sparse {
    let mut out = Sparse::new();
    for (j, aj) in a.iter().enumerate() {
        for (k, v) in convolve(aj, c) {
            let xi = scale * if j == 0 { k.0 } else { k.1 } as f64;
            *out.entry(k).or_default() += I * xi * v;
        }
    }
    out
}

/// Dense-convolution evaluation of the MHD nonlinearity on retained modes.
fn oracle_rhs(s: &StatePair) -> (VectorField, VectorField) {
    let g = s.grid().clone();
    let scale = g.wavenumber_scale();
    let (ux, uy) = (sparse(&s.u.x), sparse(&s.u.y));
    let (bx, by) = (sparse(&s.b.x), sparse(&s.b.y));
    // (∇·(v⊗w))_i = ∂_j (v_j w_i)
    let nu_x = sub(
        &div_of([&bx, &by], &bx, scale),
        &div_of([&ux, &uy], &ux, scale),
    );
    let nu_y = sub(
        &div_of([&bx, &by], &by, scale),
        &div_of([&ux, &uy], &uy, scale),
    );
    let nb_x = sub(
        &div_of([&bx, &by], &ux, scale),
        &div_of([&ux, &uy], &bx, scale),
    );
    let nb_y = sub(
        &div_of([&bx, &by], &uy, scale),
        &div_of([&ux, &uy], &by, scale),
    );
    let to_field = |m: &Sparse| {
        let mut f = SpectralField::zeros(&g);
        let limit = g.n_modes() as i64;
        for (&(kx, ky), &c) in m {
            if 3 * kx.abs() < limit && 3 * ky.abs() < limit {
                f.set(kx, ky, c);
            }
        }
        f
    };
    let nu = VectorField::new(to_field(&nu_x), to_field(&nu_y)).unwrap();
    let nb = VectorField::new(to_field(&nb_x), to_field(&nb_y)).unwrap();
    (leray_project(&nu), nb)
}

fn sub(a: &Sparse, b: &Sparse) -> Sparse {
    let mut out = a.clone();
    for (k, v) in b {
        *out.entry(*k).or_default() -= *v;
    }
    out
}

fn random_pair(seed: u64, n: usize) -> StatePair {
    random_state(&RandomFieldSpec::new(seed, n).beta(1.5)).unwrap()
}

#[test]
fn leray_kills_gradients() {
    let g = grid(16);
    let a = sampled(&g, |x, y| (2.0 * x).sin() * y.cos() + (x - 3.0 * y).cos());
    let p = leray_project(&gradient(&a));
    assert!(p.max_magnitude() < 1e-15);
}

#[test]
fn leray_fixes_divergence_free_fields() {
    let g = grid(16);
    let tg = taylor_green(&g);
    assert!(max_diff(&leray_project(&tg), &tg) < 1e-15);
}

#[test]
fn leray_single_mode_example() {
    let g = grid(16);
    let one = Complex64::new(1.0, 0.0);
    let v = VectorField::new(
        SpectralField::single_mode(&g, 1, 0, one),
        SpectralField::single_mode(&g, 1, 0, one),
    )
    .unwrap();
    let p = leray_project(&v);
    assert_eq!(p.x.get(1, 0), Complex64::new(0.0, 0.0));
    assert_eq!(p.y.get(1, 0), one);
}

#[test]
fn divergence_examples() {
    let g = grid(16);
    assert!(divergence(&taylor_green(&g)).max_magnitude() < 1e-15);
    assert_eq!(divergence(&VectorField::zeros(&g)).max_magnitude(), 0.0);
    let a = Complex64::new(0.3, -0.7);
    let v = gradient(&SpectralField::single_mode(&g, 2, -1, a));
    let d = divergence(&v);
    assert!((d.get(2, -1) - (-5.0) * a).norm() < 1e-14);
}

#[test]
fn aligned_fields_have_no_nonlinearity() {
    let g = grid(16);
    let u = random_vector(&RandomFieldSpec::new(4, 16)).unwrap();
    let s = StatePair::new(u.clone(), u).unwrap();
    let (nu, nb) = nonlinear_rhs(&s).unwrap();
    assert!(nu.max_magnitude() < 1e-15);
    assert!(nb.max_magnitude() < 1e-15);
    let (nu, nb) = nonlinear_rhs(&StatePair::zeros(&g)).unwrap();
    assert_eq!(nu.max_magnitude() + nb.max_magnitude(), 0.0);
}

#[test]
fn taylor_green_is_steady_for_euler() {
    let g = grid(16);
    let s = StatePair::new(taylor_green(&g), VectorField::zeros(&g)).unwrap();
    let (nu, nb) = nonlinear_rhs(&s).unwrap();
    let (ou, ob) = oracle_rhs(&s);
    assert!(nu.max_magnitude() < 1e-15);
    assert!(ou.max_magnitude() < 1e-15);
    assert!(nb.max_magnitude() < 1e-15);
    assert_eq!(ob.max_magnitude(), 0.0);
    // the unprojected convective term is a nonzero gradient
    let conv = advect(&s.u, &s.u).unwrap();
    assert!(conv.max_magnitude() > 0.1);
}

#[test]
fn matches_dense_convolution_oracle() {
    for seed in 0..3 {
        let s = random_pair(seed, 16);
        let (nu, nb) = nonlinear_rhs(&s).unwrap();
        let (ou, ob) = oracle_rhs(&s);
        let scale = ou.max_magnitude().max(ob.max_magnitude());
        assert!(
            max_diff(&nu, &ou) <= 1e-10 * scale,
            "velocity slot, seed {seed}"
        );
        assert!(
            max_diff(&nb, &ob) <= 1e-10 * scale,
            "magnetic slot, seed {seed}"
        );
    }
}

#[test]
fn symmetric_coupling_matches_oracle() {
    let s = random_pair(9, 16);
    let (su, sb) = quadratic_terms(&s, Coupling::Symmetric).unwrap();
    let g = s.grid().clone();
    let scale = g.wavenumber_scale();
    let (ux, uy) = (sparse(&s.u.x), sparse(&s.u.y));
    let (bx, by) = (sparse(&s.b.x), sparse(&s.b.y));
    let add = |a: Sparse, b: Sparse| {
        let mut out = a;
        for (k, v) in b {
            *out.entry(k).or_default() += v;
        }
        out
    };
    let fx = add(
        div_of([&ux, &uy], &ux, scale),
        div_of([&bx, &by], &bx, scale),
    );
    let fy = add(
        div_of([&ux, &uy], &uy, scale),
        div_of([&bx, &by], &by, scale),
    );
    let gx = add(
        div_of([&ux, &uy], &bx, scale),
        div_of([&bx, &by], &ux, scale),
    );
    let gy = add(
        div_of([&ux, &uy], &by, scale),
        div_of([&bx, &by], &uy, scale),
    );
    let limit = g.n_modes() as i64;
    let field = |m: &Sparse| {
        let mut f = SpectralField::zeros(&g);
        for (&(kx, ky), &c) in m {
            if 3 * kx.abs() < limit && 3 * ky.abs() < limit {
                f.set(kx, ky, c);
            }
        }
        f
    };
    let ou = leray_project(&VectorField::new(field(&fx), field(&fy)).unwrap());
    let ob = VectorField::new(field(&gx), field(&gy)).unwrap();
    let tol = 1e-10 * ou.max_magnitude().max(ob.max_magnitude());
    assert!(max_diff(&su, &ou) <= tol);
    assert!(max_diff(&sb, &ob) <= tol);
}

#[test]
fn random_round_trip() {
    let g = grid(32);
    let f = random_vector(&RandomFieldSpec::new(11, 32).beta(1.2))
        .unwrap()
        .x;
    let back = from_physical(&g, &to_physical(&f)).unwrap();
    let mut d = back.clone();
    d.axpy(-1.0, &f);
    assert!(d.max_magnitude() <= 1e-12 * f.max_magnitude());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn projection_is_idempotent_and_solenoidal(seed in any::<u64>(), beta in 1.1f64..4.0) {
        let v = random_vector(&RandomFieldSpec::new(seed, 16).beta(beta).divergence_free(false)).unwrap();
        let p = leray_project(&v);
        let pp = leray_project(&p);
        prop_assert!(max_diff(&p, &pp) <= 1e-14);
        let g = p.grid().clone();
        let div = divergence(&p);
        let scale = p.max_magnitude();
        for k in 1..g.len() {
            prop_assert!(div.coeffs()[k].norm() <= 1e-12 * g.xi_norm()[k] * scale);
        }
    }

    #[test]
    fn nonlinearity_is_energy_neutral(seed in any::<u64>(), beta in 1.1f64..3.0) {
        let s = random_state(&RandomFieldSpec::new(seed, 16).beta(beta)).unwrap();
        let (nu, nb) = nonlinear_rhs(&s).unwrap();
        let work = inner_product(&nu, &s.u) + inner_product(&nb, &s.b);
        let scale = crate::chi_norms::l2_norm(&nu) * crate::chi_norms::l2_norm(&s.u)
            + crate::chi_norms::l2_norm(&nb) * crate::chi_norms::l2_norm(&s.b);
        prop_assert!(work.abs() <= 1e-10 * scale.max(f64::MIN_POSITIVE));
        prop_assert_eq!(nu.x.coeffs()[0], Complex64::new(0.0, 0.0));
        prop_assert_eq!(nu.y.coeffs()[0], Complex64::new(0.0, 0.0));
        prop_assert_eq!(nb.x.coeffs()[0], Complex64::new(0.0, 0.0));
        prop_assert_eq!(nb.y.coeffs()[0], Complex64::new(0.0, 0.0));
    }
}
