//! Acceptance suite: one line per criterion, `PASS` or `FAIL`.
//!
//! Run with `cargo test -p symlie-validation --test acceptance`.

use std::process::ExitCode;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use symlie::diagnostics::{convergence_order, evaluate_poisson, evaluate_tg, reduction_error_experiment, trend_slope};
use symlie::hj_series::build_series;
use symlie::integrators::*;
use symlie::learn::nonsymmetric::nonsymmetric_loss_grad;
use symlie::learn::poisson::poisson_loss_grad;
use symlie::learn::symmetric::symmetric_loss_grad;
use symlie::learn::*;
use symlie::lie_so3::{exp_so3, Mat3, Vec3};
use symlie::phase_space::{j_left, PhasePoint, ReducedHamiltonian};
use symlie::poly::PolyR3;
use symlie::{Retraction, Rotation};
use symlie_validation::{fd_gradient, fd_jacobian, rel_err, run_all, slope, Criterion, Outcome};

type R = Result<Outcome, String>;

fn rigid() -> ReducedHamiltonian {
    ReducedHamiltonian::default()
}

fn mu0() -> Vec3 {
    Vec3::new(1.0, 0.5, 0.75)
}

fn newton() -> NewtonConfig {
    NewtonConfig::default()
}

fn err(e: symlie::Error) -> String {
    e.to_string()
}

fn random_vec(rng: &mut ChaCha8Rng, r: f64) -> Vec3 {
    Vec3::new(rng.random_range(-r..r), rng.random_range(-r..r), rng.random_range(-r..r))
}

fn random_rotation(rng: &mut ChaCha8Rng) -> Rotation {
    exp_so3(&random_vec(rng, 1.7))
}

fn series_tg_data(dt: f64, n: usize, seed: u64) -> Result<TgDataset, String> {
    let s = build_series(&rigid(), 7, Retraction::Cayley).map_err(err)?;
    let b = SeriesBisection::new(&s, dt);
    let cfg = newton();
    generate_tg_dataset(|z| equivariant_map(&b, z, &cfg), n, &TgSampling::default(), seed, dt, "series-7").map_err(err)
}

fn train_cfg(steps: usize) -> TrainConfig {
    TrainConfig { steps, ..Default::default() }
}

fn c1_convergence_orders() -> R {
    let t_end = 10.0;
    let dts = [0.5, 0.25, 0.125, 0.0625];
    let reference = reference_reduced(&rigid(), &mu0(), &[t_end], &AdaptiveConfig::new(1e-13, 1e-15)).map_err(err)?.states[0];
    let mut pass = true;
    let mut parts = Vec::new();
    for order in [3usize, 5, 7] {
        let s = build_series(&rigid(), order, Retraction::Cayley).map_err(err)?;
        let fit = convergence_order(
            |dt| {
                let n = (t_end / dt).round() as usize;
                Ok(integrate_series_reduced(&s, mu0(), dt, n, &newton())?.last().unwrap().as_slice().to_vec())
            },
            reference.as_slice(),
            &dts,
        )
        .map_err(err)?;
        let k = order as f64;
        let ok = fit.slope >= k - 0.3 && fit.slope <= k + 0.5;
        pass &= ok;
        parts.push(format!("K={order} slope {:.2} (band [{:.1}, {:.1}])", fit.slope, k - 0.3, k + 0.5));
    }
    Ok(Outcome::new(pass, parts.join("; ")))
}

fn c2_casimir() -> R {
    let start = std::time::Instant::now();
    let s = build_series(&rigid(), 7, Retraction::Cayley).map_err(err)?;
    let traj = integrate_series_reduced(&s, mu0(), 0.1, 10_000, &newton()).map_err(err)?;
    let secs = start.elapsed().as_secs_f64();
    let n0 = mu0().norm();
    let worst = traj.states.iter().map(|m| (m.norm() - n0).abs() / n0).fold(0.0, f64::max);
    Ok(Outcome::new(
        worst < 1e-10 && secs < 10.0,
        format!("relative Casimir drift {worst:.2e} over 1e4 steps in {secs:.1}s"),
    ))
}

fn c3_momentum() -> R {
    let s = build_series(&rigid(), 7, Retraction::Cayley).map_err(err)?;
    let z0 = PhasePoint::at_identity(mu0());
    let dt = 0.1;
    let n = 1000;
    let j0 = j_left(&z0);
    let geo = integrate_series(&s, z0, dt, n, &newton()).map_err(err)?;
    let geo_drift = geo.states.iter().map(|z| (j_left(z) - j0).amax()).fold(0.0, f64::max);
    let rk = rk45_embedded(&rigid(), &z0, &uniform_times(dt, n), &AdaptiveConfig::new(1e-3, 1e-6)).map_err(err)?;
    let rk_drift = rk.states.iter().map(|z| (j_left(z) - j0).amax()).fold(0.0, f64::max);
    let ratio = rk_drift / geo_drift.max(f64::MIN_POSITIVE);
    Ok(Outcome::new(
        geo_drift < 1e-10 && rk_drift >= 1e4 * geo_drift,
        format!("geometric J_L drift {geo_drift:.2e}, RK45 (rtol 1e-3) {rk_drift:.2e}, ratio {ratio:.1e}"),
    ))
}

fn c4_energy() -> R {
    let mut amplitudes = Vec::new();
    let mut slope7 = f64::NAN;
    for order in [3usize, 5, 7] {
        let s = build_series(&rigid(), order, Retraction::Cayley).map_err(err)?;
        let traj = integrate_series_reduced(&s, mu0(), 0.1, 10_000, &newton()).map_err(err)?;
        let hs: Vec<f64> = traj.states.iter().map(|m| rigid().value(m)).collect();
        let lo = hs.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = hs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        amplitudes.push(hi - lo);
        if order == 7 {
            let ks: Vec<f64> = (0..hs.len()).map(|k| k as f64).collect();
            slope7 = trend_slope(&ks, &hs);
        }
    }
    let ordered = amplitudes[0] > amplitudes[1] && amplitudes[1] > amplitudes[2];
    Ok(Outcome::new(
        slope7.abs() < 1e-8 && ordered,
        format!(
            "order-7 slope {slope7:.2e}/step; H amplitude K=3 {:.2e} > K=5 {:.2e} > K=7 {:.2e}",
            amplitudes[0], amplitudes[1], amplitudes[2]
        ),
    ))
}

fn c5_structural_conservation() -> R {
    let cfg = newton();
    let bound = 10.0 * cfg.tol;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst_j: f64 = 0.0;
    let mut worst_c: f64 = 0.0;
    let mut check = |sym: &SymmetricModel, poi: &PoissonModel, z: &PhasePoint| -> Result<(), String> {
        let out = predict_symmetric(sym, z, &cfg).map_err(err)?;
        worst_j = worst_j.max((j_left(&out) - j_left(z)).amax());
        let m = predict_poisson(poi, &z.mu, &cfg).map_err(err)?;
        worst_c = worst_c.max((m.norm() - z.mu.norm()).abs());
        Ok(())
    };
    for draw in 0..100u64 {
        let sym = SymmetricModel {
            net: ScalarNet::new(3, &[16, 16], draw).map_err(err)?,
            retraction: Retraction::Cayley,
        };
        let poi = PoissonModel {
            net: ScalarNet::new(3, &[50, 10], 1000 + draw).map_err(err)?,
            retraction: if draw % 2 == 0 { Retraction::Cayley } else { Retraction::Exp },
        };
        let z = PhasePoint::new(random_rotation(&mut rng), random_vec(&mut rng, 2.0));
        check(&sym, &poi, &z)?;
    }
    // Trained models.
    let d = series_tg_data(0.1, 200, 50)?;
    let (sym, _) = train_symmetric(&reduce_dataset(&d, Retraction::Cayley), ScalarNet::new(3, &[16, 16], 0).map_err(err)?, &train_cfg(200)).map_err(err)?;
    let lp = PairDataset::new(
        d.inputs.iter().map(|z| z.mu).collect(),
        d.outputs.iter().map(|z| z.mu).collect(),
        0.1,
        Provenance::default(),
    )
    .map_err(err)?;
    let (poi, _, _) = train_poisson(&lp, ScalarNet::new(3, &[50, 10], 0).map_err(err)?, Retraction::Cayley, &train_cfg(200)).map_err(err)?;
    for z in d.inputs.iter().take(100) {
        check(&sym, &poi, z)?;
    }
    Ok(Outcome::new(
        worst_j < bound && worst_c < bound,
        format!("100 random + trained: max J_L drift {worst_j:.2e}, max Casimir drift {worst_c:.2e} (bound {bound:.0e})"),
    ))
}

fn c6_table_one() -> R {
    let rows = [(0.05, 100usize), (0.05, 500), (0.1, 500), (0.1, 1500)];
    let cfg = newton();
    let mut pass = true;
    let mut parts = Vec::new();
    for (dt, n) in rows {
        let test = series_tg_data(dt, 100, 9999)?;
        let mut cells = Vec::new();
        for seed in 0..3u64 {
            let train = series_tg_data(dt, n, 100 + seed)?;
            let red = reduce_dataset(&train, Retraction::Cayley);
            let (sm, _) = train_symmetric(&red, ScalarNet::new(3, &[32, 32], seed).map_err(err)?, &train_cfg(1000)).map_err(err)?;
            let (nm, _) = train_nonsymmetric(&train, ScalarNet::new(6, &[32, 32], seed).map_err(err)?, &train_cfg(1000)).map_err(err)?;
            let sym = evaluate_tg(|z| predict_symmetric(&sm, z, &cfg), &test).map_err(err)?.mse;
            let non = evaluate_tg(|z| predict_nonsymmetric(&nm, z, &cfg), &test).map_err(err)?.mse;
            pass &= sym < non;
            if dt == 0.05 && n == 500 {
                pass &= sym <= 1e-2;
            }
            cells.push(format!("{sym:.1e}<{non:.1e}"));
        }
        parts.push(format!("dt {dt} N {n}: {}", cells.join(" ")));
    }
    Ok(Outcome::new(pass, parts.join("; ")))
}

fn c7_table_two() -> R {
    let s = build_series(&rigid(), 7, Retraction::Cayley).map_err(err)?;
    let cfg = newton();
    let region = Region::cube(-2.0, 2.0);
    let mut pass = true;
    let mut parts = Vec::new();
    for dt in [0.25, 0.5, 1.0] {
        let b = SeriesBisection::new(&s, dt);
        let test = generate_poisson_dataset(|m| poisson_map(&b, m, &cfg), 100, &region, 9999, dt, "series-7").map_err(err)?;
        let mut mses = Vec::new();
        for n in [25usize, 200] {
            let train = generate_poisson_dataset(|m| poisson_map(&b, m, &cfg), n, &region, 7, dt, "series-7").map_err(err)?;
            let (pm, _, _) = train_poisson(&train, ScalarNet::new(3, &[50, 10], 0).map_err(err)?, Retraction::Cayley, &train_cfg(3000)).map_err(err)?;
            mses.push(evaluate_poisson(|m| predict_poisson(&pm, m, &cfg), &test).map_err(err)?.mse);
        }
        pass &= mses[1] < mses[0];
        if dt == 0.25 {
            pass &= mses[1] <= 1e-2;
        }
        parts.push(format!("dt {dt}: {:.1e} → {:.1e}", mses[0], mses[1]));
    }
    Ok(Outcome::new(pass, parts.join("; ")))
}

fn c8_geometrization() -> R {
    let h = rigid();
    let cfg = newton();
    let dt = 0.05;
    let (pm, _, _) = geometrize(
        |m| Ok(euler_step(&h, m, dt)),
        &Region::cube(-2.5, 2.5),
        1000,
        11,
        dt,
        ScalarNet::new(3, &[50, 10], 0).map_err(err)?,
        Retraction::Cayley,
        &train_cfg(2000),
    )
    .map_err(err)?;
    let start = Vec3::new(2.0, 0.5, 1.0);
    let euler = euler_reduced(&h, start, dt, 1000);
    let surrogate = run_trajectory(|m| predict_poisson(&pm, m, &cfg), start, dt, 1000, TrajectoryMetadata::named("surrogate")).map_err(err)?;
    let n0 = start.norm();
    let casimir = |t: &Trajectory<Vec3>| t.states.iter().map(|m| ((m.norm() - n0) / n0).abs()).fold(0.0, f64::max);
    let (ce, cs) = (casimir(&euler), casimir(&surrogate));
    let he: Vec<f64> = euler.states.iter().map(|m| h.value(m)).collect();
    let hs: Vec<f64> = surrogate.states.iter().map(|m| h.value(m)).collect();
    let ks: Vec<f64> = (0..he.len()).map(|k| k as f64).collect();
    let (se, ss) = (slope(&ks, &he), slope(&ks, &hs));
    let h0 = h.value(&start);
    let dev = |hs: &[f64]| hs.iter().map(|x| (x - h0).abs()).fold(0.0, f64::max);
    let (de, ds) = (dev(&he), dev(&hs));
    let euler_monotone = he.windows(2).all(|w| w[1] >= w[0]);
    let pass = cs < 1e-8 && ce > 1e-3 && euler_monotone && se > 0.0 && ss.abs() < 0.1 * se && ds < de;
    Ok(Outcome::new(
        pass,
        format!(
            "Casimir drift surrogate {cs:.1e} vs Euler {ce:.1e}; H slope surrogate {ss:.1e} vs Euler {se:.1e} (monotone {euler_monotone}); max |ΔH| {ds:.2e} vs {de:.2e}"
        ),
    ))
}

fn c9_error_scaling() -> R {
    let d = series_tg_data(0.1, 10, 90)?;
    let eps = [1e-4, 3e-4, 1e-3, 3e-3, 1e-2];
    let mut slopes = Vec::new();
    for (i, (zi, zo)) in d.inputs.iter().zip(&d.outputs).enumerate() {
        slopes.push(reduction_error_experiment(zi, zo, &eps, i as u64).map_err(err)?.group_slope);
    }
    let lo = slopes.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = slopes.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(Outcome::new(
        lo >= 0.85 && hi <= 1.15,
        format!("group-error slopes over 10 pairs in [{lo:.3}, {hi:.3}]"),
    ))
}

fn c10_gradient_integrity() -> R {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut worst: Vec<(&str, f64)> = Vec::new();
    let mut record = |name: &'static str, e: f64| match worst.iter_mut().find(|(n, _)| *n == name) {
        Some(w) => w.1 = w.1.max(e),
        None => worst.push((name, e)),
    };
    let with = |net: &ScalarNet, p: &[f64]| {
        let mut n = net.clone();
        n.params_mut().copy_from_slice(p);
        n
    };

    // Network input gradients and nested weight gradients.
    for seed in 0..3 {
        let net = ScalarNet::new(3, &[8, 6], seed).map_err(err)?;
        for _ in 0..5 {
            let x = random_vec(&mut rng, 2.0);
            let g = net.gradient(x.as_slice()).map_err(err)?;
            record("net input gradient", rel_err(&g, &fd_gradient(x.as_slice(), 1e-5, |y| net.eval(y).unwrap().0)));
            let (ds, dg) = net.param_grads(x.as_slice()).map_err(err)?;
            record("net weight gradient", rel_err(&ds, &fd_gradient(net.params(), 1e-5, |p| with(&net, p).eval(x.as_slice()).unwrap().0)));
            for i in 0..3 {
                let fd = fd_gradient(net.params(), 1e-5, |p| with(&net, p).gradient(x.as_slice()).unwrap()[i]);
                record("nested weight gradient", rel_err(&dg.row(i).to_vec(), &fd));
            }
        }
    }

    // Loss gradients.
    let d = series_tg_data(0.1, 10, 11)?;
    for retraction in [Retraction::Cayley, Retraction::Exp] {
        let red = reduce_dataset(&d, retraction);
        let net = ScalarNet::new(3, &[6, 4], 1).map_err(err)?;
        for variant in [LossVariant::Chart, LossVariant::ExpRetraction] {
            let (_, g) = symmetric_loss_grad(&net, &red, variant).map_err(err)?;
            let fd = fd_gradient(net.params(), 1e-5, |p| symmetric_loss_grad(&with(&net, p), &red, variant).unwrap().0);
            record("symmetric loss gradient", rel_err(&g, &fd));
        }
    }
    let net6 = ScalarNet::new(6, &[6, 4], 2).map_err(err)?;
    let (_, g) = nonsymmetric_loss_grad(&net6, &d).map_err(err)?;
    let fd = fd_gradient(net6.params(), 1e-5, |p| nonsymmetric_loss_grad(&with(&net6, p), &d).unwrap().0);
    record("type-II loss gradient", rel_err(&g, &fd));
    let lp = PairDataset::new(
        d.inputs.iter().map(|z| z.mu).collect(),
        d.outputs.iter().map(|z| z.mu).collect(),
        0.1,
        Provenance::default(),
    )
    .map_err(err)?;
    let latents: Vec<Vec3> = lp.outputs.iter().map(|m| m + random_vec(&mut rng, 0.1)).collect();
    let flat: Vec<f64> = latents.iter().flat_map(|v| v.iter().copied()).collect();
    for retraction in [Retraction::Cayley, Retraction::Exp] {
        let net = ScalarNet::new(3, &[6, 3], 3).map_err(err)?;
        let (_, gw, gl) = poisson_loss_grad(&net, retraction, &latents, &lp).map_err(err)?;
        let fd = fd_gradient(net.params(), 1e-5, |p| poisson_loss_grad(&with(&net, p), retraction, &latents, &lp).unwrap().0);
        record("Poisson loss weight gradient", rel_err(&gw, &fd));
        let fd = fd_gradient(&flat, 1e-5, |x| {
            let l: Vec<Vec3> = x.chunks_exact(3).map(Vec3::from_column_slice).collect();
            poisson_loss_grad(&net, retraction, &l, &lp).unwrap().0
        });
        let gl: Vec<f64> = gl.iter().flat_map(|v| v.iter().copied()).collect();
        record("Poisson loss latent gradient", rel_err(&gl, &fd));
    }

    // Newton Jacobians.
    let m3 = |m: &Mat3| -> Vec<f64> { (0..3).flat_map(|i| (0..3).map(move |j| m[(i, j)])).collect() };
    let fd3 = |x: &Vec3, f: &dyn Fn(&Vec3) -> Vec3| -> Vec<f64> {
        fd_jacobian(x.as_slice(), 1e-6, |y| f(&Vec3::from_column_slice(y)).as_slice().to_vec()).concat()
    };
    let s = build_series(&rigid(), 7, Retraction::Cayley).map_err(err)?;
    let sb = SeriesBisection::new(&s, 0.2);
    let sym = SymmetricModel {
        net: ScalarNet::new(3, &[8, 8], 4).map_err(err)?,
        retraction: Retraction::Cayley,
    };
    for _ in 0..10 {
        let pi = random_vec(&mut rng, 2.0);
        record("series bisection Jacobian", rel_err(&m3(&sb.eta_jacobian(&pi)), &fd3(&pi, &|p| sb.eta(p))));
        record("learned bisection Jacobian", rel_err(&m3(&sym.eta_jacobian(&pi)), &fd3(&pi, &|p| sym.eta(p))));
        let eta = random_vec(&mut rng, 1.0);
        for r in [Retraction::Cayley, Retraction::Exp] {
            let (be, bp) = r.body_momentum_jacobians(&eta, &pi);
            let (se, sp) = r.spatial_momentum_jacobians(&eta, &pi);
            record("momentum map Jacobians", rel_err(&m3(&be), &fd3(&eta, &|e| r.body_momentum(e, &pi))));
            record("momentum map Jacobians", rel_err(&m3(&bp), &fd3(&pi, &|p| r.body_momentum(&eta, p))));
            record("momentum map Jacobians", rel_err(&m3(&se), &fd3(&eta, &|e| r.spatial_momentum(e, &pi))));
            record("momentum map Jacobians", rel_err(&m3(&sp), &fd3(&pi, &|p| r.spatial_momentum(&eta, p))));
        }
    }

    // Polynomial gradients.
    for _ in 0..10 {
        let mut p = PolyR3::zero();
        for _ in 0..8 {
            let e = [rng.random_range(0..4u32), rng.random_range(0..4u32), rng.random_range(0..4u32)];
            p.add_term(e, rng.random_range(-1.0..1.0));
        }
        let x = random_vec(&mut rng, 1.5);
        let grad = p.gradient();
        let g: Vec<f64> = grad.iter().map(|q| q.eval(&x)).collect();
        record("polynomial gradient", rel_err(&g, &fd_gradient(x.as_slice(), 1e-5, |y| p.eval(&Vec3::from_column_slice(y)))));
    }
    for t in [0.05, 0.2, 0.5] {
        let slice = s.at_time(t);
        let x = random_vec(&mut rng, 2.0);
        let g = slice.gradient(&x);
        record("series gradient", rel_err(g.as_slice(), &fd_gradient(x.as_slice(), 1e-5, |y| slice.value(&Vec3::from_column_slice(y)))));
        record("series Hessian", rel_err(&m3(&slice.hessian(&x)), &fd3(&x, &|y| slice.gradient(y))));
    }

    let max = worst.iter().map(|w| w.1).fold(0.0, f64::max);
    let detail = worst.iter().map(|(n, e)| format!("{n} {e:.1e}")).collect::<Vec<_>>().join(", ");
    Ok(Outcome::new(max < 1e-5, format!("worst relative errors: {detail}")))
}

fn c11_series_identities() -> R {
    let mut pass = true;
    let mut parts = Vec::new();
    for retraction in [Retraction::Cayley, Retraction::Exp] {
        for order in [3usize, 5, 7] {
            let s = build_series(&rigid(), order, retraction).map_err(err)?;
            pass &= s.coeffs[0] == rigid().as_poly().scale(-1.0);
            pass &= s.coeffs[1].max_abs_coeff() < 1e-13;
        }
    }
    parts.push("S1 = -H exactly and |S2| < 1e-13 for K = 3, 5, 7 in both charts".to_string());
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut points = vec![mu0()];
    for _ in 0..20 {
        points.push(random_vec(&mut rng, 2.0));
    }
    for order in [3usize, 5, 7] {
        let s = build_series(&rigid(), order, Retraction::Cayley).map_err(err)?;
        let mut min_slope = f64::INFINITY;
        for p in &points {
            let ts: Vec<f64> = [0.32, 0.16, 0.08, 0.04].iter().map(|tau| tau / p.norm()).collect();
            let lr: Vec<f64> = ts.iter().map(|&t| s.residual(t, p).abs().ln()).collect();
            let lt: Vec<f64> = ts.iter().map(|t| t.ln()).collect();
            min_slope = min_slope.min(slope(&lt, &lr));
        }
        pass &= min_slope >= order as f64 - 0.3;
        parts.push(format!("K={order} min residual slope {min_slope:.2}"));
    }
    Ok(Outcome::new(pass, parts.join("; ")))
}

fn c12_noise_robustness() -> R {
    let dt = 0.15;
    let cfg = newton();
    let train = series_tg_data(dt, 1000, 5)?;
    let test = series_tg_data(dt, 100, 9999)?;
    let noisy = perturb_dataset(&train, 0.05, 6).map_err(err)?;
    let mut results = Vec::new();
    for d in [&train, &noisy] {
        let red = reduce_dataset(d, Retraction::Cayley);
        let (m, report) = train_symmetric(&red, ScalarNet::new(3, &[32, 32], 0).map_err(err)?, &train_cfg(250)).map_err(err)?;
        let mse = evaluate_tg(|z| predict_symmetric(&m, z, &cfg), &test).map_err(err)?.mse;
        results.push((mse, report));
    }
    let (clean_mse, clean) = &results[0];
    let (noisy_mse, noisy_rep) = &results[1];
    let tail = &noisy_rep.loss_history[200..];
    let tail_change = (tail[0] - noisy_rep.final_loss) / tail[0];
    let pass = *noisy_mse <= 10.0 * clean_mse && noisy_rep.final_loss > clean.final_loss && tail_change < 0.05;
    Ok(Outcome::new(
        pass,
        format!(
            "test MSE clean {clean_mse:.2e}, noisy {noisy_mse:.2e} ({:.1}x); final loss clean {:.2e}, noisy {:.2e} (last 50 steps {:.1}% lower)",
            noisy_mse / clean_mse,
            clean.final_loss,
            noisy_rep.final_loss,
            100.0 * tail_change
        ),
    ))
}

fn main() -> ExitCode {
    run_all(&[
        Criterion { id: 1, name: "convergence orders", run: c1_convergence_orders },
        Criterion { id: 2, name: "Casimir conservation", run: c2_casimir },
        Criterion { id: 3, name: "momentum conservation", run: c3_momentum },
        Criterion { id: 4, name: "energy behavior", run: c4_energy },
        Criterion { id: 5, name: "structural conservation under learning", run: c5_structural_conservation },
        Criterion { id: 6, name: "symmetric vs non-symmetric ordering", run: c6_table_one },
        Criterion { id: 7, name: "Poisson learning improves with samples", run: c7_table_two },
        Criterion { id: 8, name: "geometrization of forward Euler", run: c8_geometrization },
        Criterion { id: 9, name: "reduction error scaling", run: c9_error_scaling },
        Criterion { id: 10, name: "gradient integrity", run: c10_gradient_integrity },
        Criterion { id: 11, name: "HJ series identities", run: c11_series_identities },
        Criterion { id: 12, name: "noise robustness", run: c12_noise_robustness },
    ])
}
