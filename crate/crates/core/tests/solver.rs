use chi_mhd::chi_norms::pair_norm;
use chi_mhd::initial::{taylor_green, taylor_green_sheared};
use chi_mhd::mhd_solver::{
    continuation_solve, integrate, picard_solve, read_checkpoint, smallness_threshold,
    write_checkpoint, SolverConfig,
};
use chi_mhd::random::{random_state, RandomFieldSpec};
use chi_mhd::verification::{check_apriori, check_blowup};
use chi_mhd::{Error, Spectral, StatePair, VectorField};

fn cfg(n: usize, t_end: f64) -> SolverConfig {
    SolverConfig {
        n_modes: n,
        dt: 1e-3,
        t_end,
        ..Default::default()
    }
}

fn banded(seed: u64, n: usize) -> StatePair {
    random_state(&RandomFieldSpec::new(seed, n).band_limit(3)).unwrap()
}

#[test]
fn zero_data_stays_zero() {
    let c = cfg(16, 0.1);
    let traj = integrate(&c, &StatePair::zeros(&c.grid().unwrap())).unwrap();
    assert!(traj.snapshots().iter().all(|s| s.max_magnitude() == 0.0));
    assert!(traj
        .rows()
        .iter()
        .all(|r| r.energy == 0.0 && r.chi_m1 == 0.0 && r.blowup_integral == 0.0));
}

#[test]
fn snapshots_follow_the_stride_and_keep_the_end() {
    let mut c = cfg(16, 0.025);
    c.snapshot_stride = 10;
    let traj = integrate(&c, &banded(1, 16)).unwrap();
    assert_eq!(traj.times().len(), 4);
    assert!((traj.final_time() - 0.025).abs() < 1e-15);
    assert_eq!(traj.norms().len(), 26);
}

#[test]
fn velocity_stays_divergence_free_and_energy_decays() {
    let mut c = cfg(32, 0.3);
    c.mu = 0.2;
    c.nu = 0.1;
    let traj = integrate(&c, &banded(2, 32)).unwrap();
    for s in traj.snapshots() {
        assert!(s.divergence_defect() < 1e-12);
    }
    let energy = traj.norms().energy();
    assert!(energy.windows(2).all(|w| w[1] <= w[0]));
}

#[test]
fn refinement_does_not_change_band_limited_runs() {
    let coarse = integrate(&cfg(32, 0.2), &banded(4, 32)).unwrap();
    let fine = integrate(&cfg(64, 0.2), &banded(4, 64)).unwrap();
    let back = fine
        .final_state()
        .resample(coarse.final_state().grid())
        .unwrap();
    let mut d = back;
    d.axpy(-1.0, coarse.final_state());
    assert!(d.max_magnitude() < 1e-8, "{}", d.max_magnitude());
}

#[test]
fn taylor_green_velocity_decays_exponentially() {
    let c = cfg(16, 0.2);
    let g = c.grid().unwrap();
    let u0 = taylor_green(&g, 2.0);
    let traj = integrate(
        &c,
        &StatePair::new(u0.clone(), VectorField::zeros(&g)).unwrap(),
    )
    .unwrap();
    let mut exact = u0;
    exact.scale((-0.4f64).exp());
    let mut d = traj.final_state().u.clone();
    d.axpy(-1.0, &exact);
    assert!(d.max_magnitude() < 1e-12);
}

#[test]
fn rejects_inadmissible_input() {
    let c = cfg(16, 0.1);
    let g = c.grid().unwrap();
    let mut s = banded(1, 16);
    s.u.x.set(1, 0, num_complex::Complex64::new(0.5, 0.0));
    s.u.x.set(-1, 0, num_complex::Complex64::new(0.5, 0.0));
    assert!(integrate(&c, &s).is_err());
    let other = StatePair::zeros(&chi_mhd::Grid::new(32, g.period()).unwrap());
    assert!(matches!(integrate(&c, &other), Err(Error::GridMismatch)));
    let bad = SolverConfig {
        dt: -1.0,
        ..c.clone()
    };
    assert!(integrate(&bad, &banded(1, 16)).is_err());
}

#[test]
fn large_step_is_rejected() {
    let mut c = cfg(32, 0.1);
    c.dt = 0.2;
    let s = random_state(&RandomFieldSpec::new(1, 32).amplitude(5.0)).unwrap();
    assert!(matches!(
        integrate(&c, &s),
        Err(Error::UnstableTimeStep { .. })
    ));
}

#[test]
fn blowup_guard_aborts_with_last_time() {
    let mut c = cfg(16, 1.0);
    c.blowup_guard = 1e-3;
    let g = c.grid().unwrap();
    let s = taylor_green_sheared(&g, 1.0, 0.5).unwrap();
    match integrate(&c, &s) {
        Err(Error::BlowupGuardTripped {
            last_valid_time,
            integral,
            guard,
        }) => {
            assert!(last_valid_time > 0.0 && last_valid_time < 0.01);
            assert!(integral > guard);
        }
        other => panic!("expected guard abort, got {other:?}"),
    }
}

#[test]
fn picard_agrees_with_the_stepper_for_small_data() {
    let c = cfg(32, 0.3);
    let threshold = smallness_threshold(c.mu, c.nu, c.c0).unwrap();
    let mut s0 = banded(6, 32);
    let norm = pair_norm(&s0, -1.0, 1.0).unwrap();
    s0.scale(0.4 * threshold / norm);
    let (traj, diag) = picard_solve(&c, &s0).unwrap();
    assert!(diag.converged && diag.small_data && diag.in_ball);
    assert!(diag.contraction_ratio < 1.0);
    assert!(diag.distances.windows(2).all(|w| w[1] < w[0]));
    let direct = integrate(&c, &s0).unwrap();
    let mut d = traj.final_state().clone();
    d.axpy(-1.0, direct.final_state());
    assert!(pair_norm(&d, 0.0, 2.0).unwrap() < 1e-5);
}

#[test]
fn continuation_uses_one_segment_below_threshold() {
    let c = cfg(32, 0.5);
    let threshold = smallness_threshold(c.mu, c.nu, c.c0).unwrap();
    let mut s0 = banded(8, 32);
    let norm = pair_norm(&s0, -1.0, 1.0).unwrap();
    s0.scale(0.9 * threshold / norm);
    let (traj, rep) = continuation_solve(&c, &s0).unwrap();
    assert_eq!(rep.segments.len(), 1);
    assert!(rep.segments[0].small_data && rep.segments[0].t_local.is_infinite());
    assert!((traj.final_time() - 0.5).abs() < 1e-12);
    let [apriori, _] = check_apriori(&traj, f64::INFINITY).unwrap();
    assert!(check_blowup(&traj, apriori.lhs).unwrap().pass);
    assert!((rep.blowup_integral - traj.norms().blowup_integral()).abs() < 1e-12);
}

#[test]
fn checkpoints_round_trip_through_files() {
    let dir = tempfile::tempdir().unwrap();
    let c = cfg(16, 0.05);
    let traj = integrate(&c, &banded(3, 16)).unwrap();
    let path = write_checkpoint(
        &dir.path().join("final"),
        &c,
        traj.final_time(),
        traj.final_state(),
    )
    .unwrap();
    let (header, state) = read_checkpoint(&path).unwrap();
    assert_eq!(&state, traj.final_state());
    assert_eq!(header.time, traj.final_time());
    assert_eq!(header.n_modes, 16);
}

#[test]
fn norms_csv_has_a_convention_header() {
    let c = cfg(16, 0.01);
    let traj = integrate(&c, &banded(3, 16)).unwrap();
    let mut out = Vec::new();
    traj.write_norms_csv(&mut out).unwrap();
    let text = String::from_utf8(out).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap();
    assert!(header.starts_with('#') && header.contains("period=") && header.contains("p=1"));
    assert!(lines.next().unwrap().starts_with("t,l2_u,l2_b"));
    assert_eq!(text.lines().count(), 2 + traj.norms().len());
}
