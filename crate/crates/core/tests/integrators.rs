use approx::assert_relative_eq;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use symlie::hj_series::{build_series, GenSeries};
use symlie::integrators::*;
use symlie::lie_so3::{cay, exp_so3, Vec3};
use symlie::phase_space::{j_left, j_right, left_translate, PhasePoint, ReducedHamiltonian};
use symlie::{Error, Retraction, Rotation};

fn rigid() -> ReducedHamiltonian {
    ReducedHamiltonian::default()
}

fn series(order: usize) -> GenSeries {
    build_series(&rigid(), order, Retraction::Cayley).unwrap()
}

fn mu0() -> Vec3 {
    Vec3::new(1.0, 0.5, 0.75)
}

fn random_rotation(rng: &mut ChaCha8Rng) -> Rotation {
    exp_so3(&Vec3::new(rng.random_range(-1.5..1.5), rng.random_range(-1.5..1.5), rng.random_range(-1.5..1.5)))
}

#[test]
fn relative_equilibrium_is_fixed() {
    let s = series(7);
    let mu = Vec3::new(1.0, 0.0, 0.0);
    for dt in [0.01, 0.1, 0.5] {
        let out = poisson_step(&s, dt, &mu, &NewtonConfig::default()).unwrap();
        assert!((out - mu).norm() < 1e-12, "dt {dt}: {out:?}");
    }
}

#[test]
fn single_step_matches_reference() {
    let s = series(7);
    let out = poisson_step(&s, 0.01, &mu0(), &NewtonConfig::default()).unwrap();
    let reference = reference_reduced(&rigid(), &mu0(), &[0.01], &AdaptiveConfig::new(1e-13, 1e-15)).unwrap();
    assert!((out - reference.states[0]).norm() < 1e-10, "{out:?} vs {:?}", reference.states[0]);
}

#[test]
fn exp_chart_series_also_tracks_reference() {
    let s = build_series(&rigid(), 7, Retraction::Exp).unwrap();
    let out = poisson_step(&s, 0.01, &mu0(), &NewtonConfig::default()).unwrap();
    let reference = reference_reduced(&rigid(), &mu0(), &[0.01], &AdaptiveConfig::new(1e-13, 1e-15)).unwrap();
    assert!((out - reference.states[0]).norm() < 1e-10);
}

#[test]
fn reconstruct_step_commutes_with_momentum_maps() {
    let s = series(7);
    let cfg = NewtonConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..20 {
        let z = PhasePoint::new(random_rotation(&mut rng), Vec3::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)));
        let out = reconstruct_step(&s, 0.1, &z, &cfg).unwrap();
        assert!((j_left(&out) - j_left(&z)).norm() < 1e-13);
        let reduced = poisson_step(&s, 0.1, &j_right(&z), &cfg).unwrap();
        assert!((j_right(&out) - reduced).norm() < 1e-14);
    }
}

#[test]
fn one_step_momentum_drift_is_tiny() {
    let z = PhasePoint::at_identity(mu0());
    let out = reconstruct_step(&series(7), 0.01, &z, &NewtonConfig::default()).unwrap();
    assert!((j_left(&out) - j_left(&z)).amax() < 1e-12);
}

#[test]
fn reconstruct_step_is_equivariant() {
    let s = series(5);
    let cfg = NewtonConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..50 {
        let z = PhasePoint::new(random_rotation(&mut rng), Vec3::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)));
        let h = random_rotation(&mut rng);
        let a = reconstruct_step(&s, 0.2, &left_translate(&h, &z), &cfg).unwrap();
        let b = left_translate(&h, &reconstruct_step(&s, 0.2, &z, &cfg).unwrap());
        assert!((a.g.matrix() - b.g.matrix()).amax() < 1e-12);
        assert!((a.mu - b.mu).amax() < 1e-12);
    }
}

#[test]
fn newton_failure_is_reported() {
    let s = series(7);
    let cfg = NewtonConfig { max_iter: 1, ..Default::default() };
    let err = poisson_step(&s, 0.5, &Vec3::new(3.0, -2.0, 4.0), &cfg).unwrap_err();
    assert!(matches!(err, Error::StepFailure { .. }));

    let meta = TrajectoryMetadata::named("test");
    let b = SeriesBisection::new(&s, 0.5);
    let err = run_trajectory(|mu| poisson_map(&b, mu, &cfg), Vec3::new(3.0, -2.0, 4.0), 0.5, 5, meta).unwrap_err();
    assert!(matches!(err, Error::StepFailure { step: Some(1), .. }), "{err:?}");
}

#[test]
fn casimir_is_exact_over_long_runs() {
    let traj = integrate_series_reduced(&series(7), mu0(), 0.1, 10_000, &NewtonConfig::default()).unwrap();
    let n0 = mu0().norm();
    let worst = traj.states.iter().map(|m| (m.norm() - n0).abs() / n0).fold(0.0, f64::max);
    assert!(worst < 1e-10, "casimir drift {worst}");
}

#[test]
fn spatial_momentum_is_exact_over_long_runs() {
    let z0 = PhasePoint::at_identity(mu0());
    let traj = integrate_series(&series(7), z0, 0.1, 1000, &NewtonConfig::default()).unwrap();
    let j0 = j_left(&z0);
    let worst = traj.states.iter().map(|z| (j_left(z) - j0).amax()).fold(0.0, f64::max);
    assert!(worst < 1e-10, "J_L drift {worst}");
}

fn ls_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let num: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let den: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    num / den
}

#[test]
fn energy_has_no_secular_trend() {
    let traj = integrate_series_reduced(&series(7), mu0(), 0.1, 10_000, &NewtonConfig::default()).unwrap();
    let ks: Vec<f64> = (0..traj.len()).map(|k| k as f64).collect();
    let hs: Vec<f64> = traj.states.iter().map(|m| rigid().value(m)).collect();
    let slope = ls_slope(&ks, &hs);
    assert!(slope.abs() < 1e-8, "energy slope {slope}");
}

#[test]
fn global_error_converges_at_least_at_truncation_order() {
    // The horizon is long enough that the finest step stays well above the
    // rounding floor for K = 7.
    let t_end = 10.0;
    let dts = [0.5, 0.25, 0.125, 0.0625];
    let reference = reference_reduced(&rigid(), &mu0(), &[t_end], &AdaptiveConfig::new(1e-13, 1e-15)).unwrap().states[0];
    for order in [3usize, 5, 7] {
        let s = series(order);
        let mut errs = Vec::new();
        for dt in dts {
            let n = (t_end / dt).round() as usize;
            let traj = integrate_series_reduced(&s, mu0(), dt, n, &NewtonConfig::default()).unwrap();
            errs.push((traj.last().unwrap() - reference).norm());
        }
        let lx: Vec<f64> = dts.iter().map(|d| d.ln()).collect();
        let ly: Vec<f64> = errs.iter().map(|e| e.ln()).collect();
        let slope = ls_slope(&lx, &ly);
        assert!(slope >= order as f64 - 0.3, "order {order}: slope {slope}, errors {errs:?}");
    }
}

#[test]
fn euler_basics() {
    let h = rigid();
    let eq = euler_reduced(&h, Vec3::new(1.0, 0.0, 0.0), 0.1, 1);
    assert_eq!(eq.states[1], Vec3::new(1.0, 0.0, 0.0));

    let traj = euler_reduced(&h, mu0(), 0.01, 1000);
    let n0 = mu0().norm();
    let drift: Vec<f64> = traj.states.iter().map(|m| m.norm() - n0).collect();
    assert!(drift.windows(2).all(|w| w[1] >= w[0]), "euler casimir drift is monotone");
    assert!(drift[1000] > 0.0);

    // Local error is O(dt²).
    let dts = [0.04, 0.02, 0.01, 0.005];
    let errs: Vec<f64> = dts
        .iter()
        .map(|&dt| {
            let r = reference_reduced(&h, &mu0(), &[dt], &AdaptiveConfig::new(1e-13, 1e-15)).unwrap().states[0];
            (euler_step(&h, &mu0(), dt) - r).norm()
        })
        .collect();
    let slope = ls_slope(&dts.map(f64::ln), &errs.iter().map(|e| e.ln()).collect::<Vec<_>>());
    assert!((slope - 2.0).abs() < 0.1, "euler local slope {slope}");
}

#[test]
fn rk45_equilibrium_and_short_horizon_agreement() {
    let h = rigid();
    let eq = PhasePoint::at_identity(Vec3::new(1.0, 0.0, 0.0));
    let times = uniform_times(0.5, 20);
    let traj = rk45_embedded(&h, &eq, &times, &AdaptiveConfig::new(1e-10, 1e-12)).unwrap();
    let exact = |t: f64| exp_so3(&Vec3::new(t / 1.5, 0.0, 0.0));
    for (t, z) in traj.times.iter().zip(&traj.states) {
        assert!((z.mu - eq.mu).norm() < 1e-10);
        assert!((z.g.matrix() - exact(*t).matrix()).amax() < 1e-8);
    }

    let z0 = PhasePoint::at_identity(mu0());
    let dt = 0.01;
    let times = uniform_times(dt, 100);
    let rk = rk45_embedded(&h, &z0, &times, &AdaptiveConfig::new(1e-10, 1e-12)).unwrap();
    let geo = integrate_series(&series(7), z0, dt, 100, &NewtonConfig::default()).unwrap();
    for (a, b) in rk.states.iter().zip(&geo.states) {
        let d = a.embedding().iter().zip(b.embedding()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        assert!(d < 1e-6, "rk45 vs geometric {d}");
    }
}

#[test]
fn rk45_loose_tolerance_drifts_in_momentum() {
    let z0 = PhasePoint::at_identity(mu0());
    let times = uniform_times(1.0, 500);
    let traj = rk45_embedded(&rigid(), &z0, &times, &AdaptiveConfig::new(1e-3, 1e-6)).unwrap();
    let j0 = j_left(&z0);
    let drift: Vec<f64> = traj.states.iter().map(|z| (j_left(z) - j0).norm()).collect();
    // About 3.4e-3 at t = 500 for this tolerance pair; the magnitude scales
    // with the tolerances, the growth does not go away.
    assert!(drift[500] > 1e-3, "rk45 J_L drift only {}", drift[500]);
    assert!(drift[500] > 2.0 * drift[100]);
    assert!(traj.last().unwrap().g.orthogonality_error() > 1e-3);
}

#[test]
fn trajectory_plumbing() {
    let s = series(3);
    let cfg = NewtonConfig::default();
    let z0 = PhasePoint::at_identity(mu0());
    let empty = integrate_series(&s, z0, 0.1, 0, &cfg).unwrap();
    assert_eq!(empty.states, vec![z0]);
    assert_eq!(empty.times, vec![0.0]);

    let whole = integrate_series(&s, z0, 0.1, 30, &cfg).unwrap();
    let first = integrate_series(&s, z0, 0.1, 12, &cfg).unwrap();
    let second = integrate_series(&s, *first.last().unwrap(), 0.1, 18, &cfg).unwrap();
    let mut joined = first.states.clone();
    joined.extend_from_slice(&second.states[1..]);
    assert_eq!(joined, whole.states);
    whole.validate().unwrap();

    let json = serde_json::to_string(&whole).unwrap();
    let back: Trajectory<PhasePoint> = serde_json::from_str(&json).unwrap();
    assert_eq!(back, whole);
    assert_eq!(back.metadata.order, Some(3));

    let mut seen = Vec::new();
    run_trajectory_with(|m: &Vec3| Ok(*m), mu0(), 1.0, 3, TrajectoryMetadata::named("id"), |k, _| seen.push(k)).unwrap();
    assert_eq!(seen, vec![0, 1, 2, 3]);
}

#[test]
fn jacobian_of_implicit_solve_matches_finite_differences() {
    // Newton's Jacobian: ∂_π J_L + ∂_η J_L · Dη, checked against the residual map.
    let s = series(7);
    let b = SeriesBisection::new(&s, 0.3);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..10 {
        let pi = Vec3::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
        let eta = b.eta(&pi);
        let (de, dp) = Retraction::Cayley.spatial_momentum_jacobians(&eta, &pi);
        let jac = dp + de * b.eta_jacobian(&pi);
        let h = 1e-6;
        for j in 0..3 {
            let e = Vec3::ith(j, h);
            let f = |p: Vec3| Retraction::Cayley.spatial_momentum(&b.eta(&p), &p);
            let fd = (f(pi + e) - f(pi - e)) / (2.0 * h);
            for i in 0..3 {
                assert_relative_eq!(jac[(i, j)], fd[i], epsilon = 1e-8, max_relative = 1e-5);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn poisson_step_preserves_casimir(x in -3.0f64..3.0, y in -3.0f64..3.0, z in -3.0f64..3.0, dt in 0.0f64..0.3) {
        let mu = Vec3::new(x, y, z);
        let out = poisson_step(&series(5), dt, &mu, &NewtonConfig::default()).unwrap();
        prop_assert!((out.norm() - mu.norm()).abs() <= 1e-13 * mu.norm().max(1.0));
    }

    #[test]
    fn reconstruct_conserves_spatial_momentum(a in -1.0f64..1.0, b in -1.0f64..1.0, c in -1.0f64..1.0, x in -2.0f64..2.0, y in -2.0f64..2.0, z in -2.0f64..2.0) {
        let p = PhasePoint::new(cay(&Vec3::new(a, b, c)), Vec3::new(x, y, z));
        let out = reconstruct_step(&series(3), 0.1, &p, &NewtonConfig::default()).unwrap();
        prop_assert!((j_left(&out) - j_left(&p)).amax() < 1e-13);
        prop_assert!(out.g.orthogonality_error() < 1e-13);
    }
}
