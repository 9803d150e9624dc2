use chi_mhd::chi_norms::{chi_norm, combine_pair, pair_norm, TrajectoryNorms};
use chi_mhd::random::{random_scalar, random_state, RandomFieldSpec};
use chi_mhd::semigroup::heat_propagate;
use chi_mhd::{Spectral, SpectralField};
use proptest::prelude::*;

fn field(seed: u64, beta: f64) -> SpectralField {
    random_scalar(&RandomFieldSpec::new(seed, 16).beta(beta)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn norms_are_absolutely_homogeneous(seed in 0u64..10_000, lambda in -5.0f64..5.0, s in -1.0f64..1.0) {
        let f = field(seed, 2.0);
        let mut g = f.clone();
        g.scale(lambda);
        let (a, b) = (chi_norm(&f, s).unwrap(), chi_norm(&g, s).unwrap());
        prop_assert!((b - lambda.abs() * a).abs() <= 1e-12 * a.max(1.0));
    }

    #[test]
    fn triangle_inequality(a in 0u64..10_000, b in 0u64..10_000, s in -1.0f64..1.0) {
        let (f, g) = (field(a, 1.5), field(b, 2.5));
        let mut sum = f.clone();
        sum.axpy(1.0, &g);
        let lhs = chi_norm(&sum, s).unwrap();
        prop_assert!(lhs <= (chi_norm(&f, s).unwrap() + chi_norm(&g, s).unwrap()) * (1.0 + 1e-14));
    }

    #[test]
    fn truncation_is_monotone(seed in 0u64..10_000, keep in proptest::collection::vec(any::<bool>(), 256)) {
        let f = field(seed, 2.0);
        let mask: Vec<f64> = keep.iter().map(|&k| if k { 1.0 } else { 0.0 }).collect();
        let mut g = f.clone();
        g.scale_modes(&mask);
        for s in [-1.0, 0.0, 1.0] {
            prop_assert!(chi_norm(&g, s).unwrap() <= chi_norm(&f, s).unwrap());
        }
    }

    #[test]
    fn tilde_norm_dominates_sup_in_time(seed in 0u64..10_000, s in -1.0f64..1.0) {
        let state = random_state(&RandomFieldSpec::new(seed, 16)).unwrap();
        let mut norms = TrajectoryNorms::new(state.grid(), 2).with_exponents(&[s]);
        for m in 0..6 {
            let t = 0.1 * m as f64;
            // oscillating amplitude so the per-mode sup is attained at different times
            let mut x = state.clone();
            x.scale((3.0 * t + seed as f64).cos());
            norms.push(t, &[&x.u, &x.b]).unwrap();
        }
        let tilde = norms.tilde_linf_norm(s).unwrap();
        let sup = norms.time_lp_norm(f64::INFINITY, s).unwrap();
        prop_assert!(tilde >= sup * (1.0 - 1e-14));
    }

    #[test]
    fn pair_norm_is_symmetric_and_ordered(a in 0.0f64..10.0, b in 0.0f64..10.0) {
        prop_assert_eq!(combine_pair(a, b, 2.0), combine_pair(b, a, 2.0));
        prop_assert!(combine_pair(a, b, 2.0) <= combine_pair(a, b, 1.0) + 1e-12);
        prop_assert!(combine_pair(a, b, 4.0) <= combine_pair(a, b, 2.0) + 1e-12);
    }
}

#[test]
fn heat_flow_is_nonincreasing_in_every_norm() {
    let f = field(3, 2.0);
    for s in [-1.0, -0.5, 0.0, 1.0] {
        let mut prev = chi_norm(&f, s).unwrap();
        for m in 1..5 {
            let g = heat_propagate(&f, 0.3, 0.2 * m as f64).unwrap();
            let next = chi_norm(&g, s).unwrap();
            assert!(next <= prev);
            prev = next;
        }
    }
}

#[test]
fn pair_conventions() {
    let s = random_state(&RandomFieldSpec::new(1, 16)).unwrap();
    let (a, b) = (chi_norm(&s.u, -1.0).unwrap(), chi_norm(&s.b, -1.0).unwrap());
    assert!((pair_norm(&s, -1.0, 1.0).unwrap() - (a + b)).abs() < 1e-14);
    assert!((pair_norm(&s, -1.0, 2.0).unwrap() - a.hypot(b)).abs() < 1e-14);
}
