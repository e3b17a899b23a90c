//! The experiment pipelines behind each subcommand.

use std::collections::BTreeMap;
use std::path::Path;

use serde_json::json;
use symlie::diagnostics::{drift, evaluate_poisson, evaluate_tg, fit_momentum_bound, fit_order, reduction_error_experiment, DriftSummary, EvalMetrics};
use symlie::hj_series::build_series;
use symlie::integrators::{
    euler_reduced, euler_step, integrate_series, integrate_series_reduced, poisson_map, reconstruct_step, reference_reduced, rk45_embedded,
    run_trajectory, uniform_times, AdaptiveConfig, SeriesBisection, Trajectory, TrajectoryMetadata,
};
use symlie::io::{
    fmt_f64, load_checkpoint, read_poisson_dataset, read_tg_dataset, save_checkpoint, write_json, write_lp_trajectory, write_poisson_dataset,
    write_table, write_tg_dataset, write_text_table, write_tg_trajectory, Checkpoint, Model, ModelKind,
};
use symlie::learn::{
    generate_poisson_dataset, generate_tg_dataset, geometrize, perturb_dataset, predict_nonsymmetric, predict_poisson, predict_symmetric,
    reduce_dataset, train_nonsymmetric, train_poisson, train_symmetric, PoissonDataset, ScalarNet, TgDataset, TrainReport,
};
use symlie::lie_so3::{cay, Momentum, Vec3};
use symlie::{PhasePoint, ReducedHamiltonian, Rotation};

use crate::config::{space_of, ExperimentConfig, Integrator, Space};
use crate::error::{CliError, CliResult};
use crate::manifest::Run;

type TgStep<'a> = Box<dyn FnMut(&PhasePoint) -> symlie::Result<PhasePoint> + 'a>;
type LpStep<'a> = Box<dyn FnMut(&Momentum) -> symlie::Result<Momentum> + 'a>;

fn hamiltonian(cfg: &ExperimentConfig) -> CliResult<ReducedHamiltonian> {
    Ok(ReducedHamiltonian::rigid_body(cfg.inertia)?)
}

fn kind_name(kind: ModelKind) -> &'static str {
    match kind {
        ModelKind::Symmetric => "symmetric",
        ModelKind::NonSymmetric => "non-symmetric",
        ModelKind::Poisson => "poisson",
    }
}

/// One step of `integrator` on `T*SO(3)`. RK45 output is projected back onto
/// SO(3) so the pair can be charted.
fn tg_step<'a>(cfg: &'a ExperimentConfig, h: &'a ReducedHamiltonian, integrator: Integrator, dt: f64, rtol: f64, atol: f64) -> CliResult<TgStep<'a>> {
    Ok(match integrator {
        Integrator::Series(k) => {
            let series = build_series(h, k, cfg.retraction)?;
            Box::new(move |z| reconstruct_step(&series, dt, z, &cfg.newton))
        }
        Integrator::Rk45 => {
            let adaptive = AdaptiveConfig::new(rtol, atol);
            Box::new(move |z| {
                let t = rk45_embedded(h, z, &[0.0, dt], &adaptive)?;
                let end = t.states[1];
                Ok(PhasePoint::new(Rotation::project(end.g.matrix()), end.mu))
            })
        }
        Integrator::Euler => return Err(CliError::Config("euler is only available for so(3)* data".into())),
    })
}

/// One step of `integrator` on `so(3)*`.
fn lp_step<'a>(cfg: &'a ExperimentConfig, h: &'a ReducedHamiltonian, integrator: Integrator, dt: f64, rtol: f64, atol: f64) -> CliResult<LpStep<'a>> {
    Ok(match integrator {
        Integrator::Series(k) => {
            let b = SeriesBisection::new(&build_series(h, k, cfg.retraction)?, dt);
            Box::new(move |mu| poisson_map(&b, mu, &cfg.newton))
        }
        Integrator::Euler => Box::new(move |mu| Ok(euler_step(h, mu, dt))),
        Integrator::Rk45 => {
            let adaptive = AdaptiveConfig::new(rtol, atol);
            Box::new(move |mu| Ok(reference_reduced(h, mu, &[0.0, dt], &adaptive)?.states[1]))
        }
    })
}

#[allow(clippy::too_many_arguments)]
fn tg_trajectory(cfg: &ExperimentConfig, h: &ReducedHamiltonian, integrator: Integrator, z0: PhasePoint, dt: f64, steps: usize, rtol: f64, atol: f64) -> CliResult<Trajectory<PhasePoint>> {
    let mut traj = match integrator {
        Integrator::Series(k) => integrate_series(&build_series(h, k, cfg.retraction)?, z0, dt, steps, &cfg.newton)?,
        Integrator::Rk45 => {
            let mut t = rk45_embedded(h, &z0, &uniform_times(dt, steps), &AdaptiveConfig::new(rtol, atol))?;
            t.metadata.dt = Some(dt);
            t
        }
        Integrator::Euler => return Err(CliError::Config("euler is only available for so(3)* trajectories".into())),
    };
    traj.metadata.inertia = Some(cfg.inertia);
    Ok(traj)
}

#[allow(clippy::too_many_arguments)]
fn lp_trajectory(cfg: &ExperimentConfig, h: &ReducedHamiltonian, integrator: Integrator, mu0: Momentum, dt: f64, steps: usize, rtol: f64, atol: f64) -> CliResult<Trajectory<Momentum>> {
    let mut traj = match integrator {
        Integrator::Series(k) => integrate_series_reduced(&build_series(h, k, cfg.retraction)?, mu0, dt, steps, &cfg.newton)?,
        Integrator::Euler => euler_reduced(h, mu0, dt, steps),
        Integrator::Rk45 => {
            let mut t = reference_reduced(h, &mu0, &uniform_times(dt, steps), &AdaptiveConfig::new(rtol, atol))?;
            t.metadata.dt = Some(dt);
            t
        }
    };
    traj.metadata.inertia = Some(cfg.inertia);
    Ok(traj)
}

fn record_drift(run: &mut Run, label: &str, s: &DriftSummary) {
    run.metric(format!("{label}.energy_relative_drift"), s.energy_relative_drift);
    run.metric(format!("{label}.energy_slope"), s.energy_slope);
    run.metric(format!("{label}.casimir_relative_drift"), s.casimir_relative_drift);
    if let Some(j) = s.j_left_max_drift {
        run.metric(format!("{label}.j_left_max_drift"), j);
    }
}

pub fn simulate(cfg: &ExperimentConfig, run: &mut Run) -> CliResult<()> {
    let s = &cfg.simulate;
    let h = hamiltonian(cfg)?;
    let mu0 = Vec3::from(s.mu0);
    let mut summaries = BTreeMap::new();
    for &integrator in &s.integrators {
        let label = integrator.to_string();
        let path = run.csv_artifact(&format!("trajectory-{label}.csv"));
        let summary = match s.space {
            Space::Tg => {
                let z0 = PhasePoint::new(cay(&Vec3::from(s.g0)), mu0);
                let traj = tg_trajectory(cfg, &h, integrator, z0, s.dt, s.steps, s.rtol, s.atol)?;
                write_tg_trajectory(&path, &traj, &h)?;
                drift(&traj, &h).summary
            }
            Space::Lp => {
                let traj = lp_trajectory(cfg, &h, integrator, mu0, s.dt, s.steps, s.rtol, s.atol)?;
                write_lp_trajectory(&path, &traj, &h)?;
                drift(&traj, &h).summary
            }
        };
        record_drift(run, &label, &summary);
        summaries.insert(label, summary);
    }
    write_json(&run.artifact("drift.json"), &summaries)?;
    Ok(())
}

/// A dataset on either phase space.
pub enum Data {
    Tg(TgDataset),
    Lp(PoissonDataset),
}

impl Data {
    pub fn len(&self) -> usize {
        match self {
            Data::Tg(d) => d.len(),
            Data::Lp(d) => d.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn write(&self, path: &Path) -> CliResult<()> {
        match self {
            Data::Tg(d) => write_tg_dataset(path, d)?,
            Data::Lp(d) => write_poisson_dataset(path, d)?,
        }
        Ok(())
    }

    pub fn read(path: &Path, space: Space) -> CliResult<Data> {
        let read = match space {
            Space::Tg => read_tg_dataset(path).map(Data::Tg),
            Space::Lp => read_poisson_dataset(path).map(Data::Lp),
        };
        read.map_err(|e| CliError::from(e).at_path(path))
    }
}

/// Generates `n` clean pairs with the configured generator.
fn generate(cfg: &ExperimentConfig, h: &ReducedHamiltonian, space: Space, dt: f64, n: usize, seed: u64) -> CliResult<Data> {
    let d = &cfg.data;
    let label = d.generator.to_string();
    Ok(match space {
        Space::Tg => {
            let step = tg_step(cfg, h, d.generator, dt, d.rtol, d.atol)?;
            Data::Tg(generate_tg_dataset(step, n, &d.sampling, seed, dt, &label)?)
        }
        Space::Lp => {
            let step = lp_step(cfg, h, d.generator, dt, d.rtol, d.atol)?;
            Data::Lp(generate_poisson_dataset(step, n, &d.region, seed, dt, &label)?)
        }
    })
}

/// Training pairs: clean generation followed by the configured noise.
fn generate_train(cfg: &ExperimentConfig, h: &ReducedHamiltonian, space: Space, dt: f64, n: usize, seed: u64) -> CliResult<Data> {
    let data = generate(cfg, h, space, dt, n, seed)?;
    Ok(match data {
        Data::Tg(d) if cfg.data.sigma2 > 0.0 => Data::Tg(perturb_dataset(&d, cfg.data.sigma2, cfg.data.noise_seed)?),
        other => other,
    })
}

/// Train and test sets from the configured paths, or freshly generated.
fn datasets(cfg: &ExperimentConfig, h: &ReducedHamiltonian, space: Space) -> CliResult<(Data, Data)> {
    let d = &cfg.data;
    let train = match &d.train_path {
        Some(p) => Data::read(p, space)?,
        None => generate_train(cfg, h, space, d.dt, d.n, d.seed)?,
    };
    let test = match &d.test_path {
        Some(p) => Data::read(p, space)?,
        None => generate(cfg, h, space, d.dt, d.test_n, d.test_seed)?,
    };
    Ok((train, test))
}

pub fn generate_data(cfg: &ExperimentConfig, run: &mut Run) -> CliResult<()> {
    let h = hamiltonian(cfg)?;
    let d = &cfg.data;
    if d.n == 0 {
        eprintln!("warning: data.n is 0; the training set will be empty");
    }
    let (train, test) = datasets(cfg, &h, d.space)?;
    train.write(&run.csv_artifact("train.csv"))?;
    test.write(&run.csv_artifact("test.csv"))?;
    run.metric("train_n", train.len() as f64);
    run.metric("test_n", test.len() as f64);
    run.metric("sigma2", d.sigma2);
    if let (Data::Tg(tr), Data::Tg(te)) = (&train, &test) {
        run.metric("train_rejected", tr.provenance.rejected as f64);
        run.metric("test_rejected", te.provenance.rejected as f64);
    }
    Ok(())
}

fn mismatch(kind: ModelKind) -> CliError {
    CliError::Config(format!("model kind {} does not match the dataset's phase space", kind_name(kind)))
}

/// Trains a fresh model of `kind` (net seeded with `seed`) on `train`.
fn fit(cfg: &ExperimentConfig, kind: ModelKind, train: &Data, seed: u64) -> CliResult<(Model, TrainReport, usize)> {
    let hidden = &cfg.model.hidden;
    Ok(match (kind, train) {
        (ModelKind::Symmetric, Data::Tg(d)) => {
            let red = reduce_dataset(d, cfg.retraction);
            let (m, r) = train_symmetric(&red, ScalarNet::new(3, hidden, seed)?, &cfg.train)?;
            (Model::Symmetric(m), r, red.rejected)
        }
        (ModelKind::NonSymmetric, Data::Tg(d)) => {
            let (m, r) = train_nonsymmetric(d, ScalarNet::new(6, hidden, seed)?, &cfg.train)?;
            (Model::NonSymmetric(m), r, 0)
        }
        (ModelKind::Poisson, Data::Lp(d)) => {
            let (m, r, _) = train_poisson(d, ScalarNet::new(3, hidden, seed)?, cfg.retraction, &cfg.train)?;
            (Model::Poisson(m), r, 0)
        }
        (kind, _) => return Err(mismatch(kind)),
    })
}

fn evaluate_model(cfg: &ExperimentConfig, model: &Model, test: &Data) -> CliResult<EvalMetrics> {
    let newton = &cfg.newton;
    Ok(match (model, test) {
        (Model::Symmetric(m), Data::Tg(d)) => evaluate_tg(|z| predict_symmetric(m, z, newton), d)?,
        (Model::NonSymmetric(m), Data::Tg(d)) => evaluate_tg(|z| predict_nonsymmetric(m, z, newton), d)?,
        (Model::Poisson(m), Data::Lp(d)) => evaluate_poisson(|mu| predict_poisson(m, mu, newton), d)?,
        (m, _) => return Err(mismatch(m.kind())),
    })
}

fn eval_metrics(prefix: &str, m: &EvalMetrics) -> BTreeMap<String, f64> {
    BTreeMap::from([
        (format!("{prefix}mse"), m.mse),
        (format!("{prefix}max_error"), m.max_error),
        (format!("{prefix}n"), m.n as f64),
        (format!("{prefix}failures"), m.failures as f64),
    ])
}

fn write_loss(path: &Path, report: &TrainReport) -> CliResult<()> {
    let rows: Vec<Vec<f64>> = report.loss_history.iter().enumerate().map(|(k, l)| vec![k as f64, *l]).collect();
    write_table(path, "loss-history", &["step".into(), "loss".into()], &rows)?;
    Ok(())
}

pub fn train(cfg: &ExperimentConfig, run: &mut Run) -> CliResult<()> {
    if cfg.grid.is_some() {
        return train_grid(cfg, run);
    }
    let h = hamiltonian(cfg)?;
    let kind = cfg.model.kind;
    let (train, test) = datasets(cfg, &h, space_of(kind))?;
    train.write(&run.csv_artifact("train.csv"))?;
    test.write(&run.csv_artifact("test.csv"))?;
    let (model, report, rejected) = fit(cfg, kind, &train, cfg.model.seed)?;
    let eval = evaluate_model(cfg, &model, &test)?;
    let mut metrics = eval_metrics("test_", &eval);
    metrics.insert("train_final_loss".into(), report.final_loss);
    metrics.insert("train_final_grad_norm".into(), report.final_grad_norm);
    metrics.insert("train_rejected".into(), rejected as f64);
    let dt = match &train {
        Data::Tg(d) => d.dt,
        Data::Lp(d) => d.dt,
    };
    save_checkpoint(&run.artifact("checkpoint.json"), &Checkpoint::new(&model, Some(dt), Some(cfg.train), metrics.clone()))?;
    write_loss(&run.artifact("loss.csv"), &report)?;
    run.metrics.extend(metrics);
    Ok(())
}

fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Every grid row × seed × model. Models of the same space share their
/// training and test sets within a row and seed.
fn train_grid(cfg: &ExperimentConfig, run: &mut Run) -> CliResult<()> {
    let grid = cfg.grid.as_ref().expect("grid config");
    let h = hamiltonian(cfg)?;
    let mut spaces: Vec<Space> = grid.models.iter().map(|m| space_of(*m)).collect();
    spaces.sort_by_key(|s| *s as u8);
    spaces.dedup();
    let header_runs: Vec<String> = ["dt", "n", "model", "seed", "train_final_loss", "test_mse", "test_max_error", "test_failures"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    let header_table: Vec<String> = ["dt", "n", "model", "seeds", "mse_mean", "mse_std", "mse_min", "mse_max"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    let mut run_rows = Vec::new();
    let mut table_rows = Vec::new();
    for row in &grid.rows {
        let mut mses: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
        let mut tests = BTreeMap::new();
        for &space in &spaces {
            tests.insert(space as u8, generate(cfg, &h, space, row.dt, cfg.data.test_n, cfg.data.test_seed)?);
        }
        for &seed in &grid.seeds {
            let mut trains = BTreeMap::new();
            for &space in &spaces {
                trains.insert(space as u8, generate_train(cfg, &h, space, row.dt, row.n, cfg.data.seed + seed)?);
            }
            for (i, &kind) in grid.models.iter().enumerate() {
                let key = space_of(kind) as u8;
                eprintln!("grid: dt {} n {} {} seed {seed}", row.dt, row.n, kind_name(kind));
                let (model, report, _) = fit(cfg, kind, &trains[&key], seed)?;
                let eval = evaluate_model(cfg, &model, &tests[&key])?;
                mses.entry(i).or_default().push(eval.mse);
                run_rows.push(vec![
                    fmt_f64(row.dt),
                    row.n.to_string(),
                    kind_name(kind).to_string(),
                    seed.to_string(),
                    fmt_f64(report.final_loss),
                    fmt_f64(eval.mse),
                    fmt_f64(eval.max_error),
                    eval.failures.to_string(),
                ]);
            }
        }
        for (i, &kind) in grid.models.iter().enumerate() {
            let xs = &mses[&i];
            let (mean, std) = mean_std(xs);
            let min = xs.iter().copied().fold(f64::INFINITY, f64::min);
            let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            run.metric(format!("dt={}.n={}.{}.mse_mean", row.dt, row.n, kind_name(kind)), mean);
            table_rows.push(vec![
                fmt_f64(row.dt),
                row.n.to_string(),
                kind_name(kind).to_string(),
                xs.len().to_string(),
                fmt_f64(mean),
                fmt_f64(std),
                fmt_f64(min),
                fmt_f64(max),
            ]);
        }
    }
    write_text_table(&run.artifact("table.csv"), "grid-summary", &header_table, &table_rows)?;
    write_text_table(&run.artifact("runs.csv"), "grid-runs", &header_runs, &run_rows)?;
    Ok(())
}

pub fn evaluate(cfg: &ExperimentConfig, run: &mut Run) -> CliResult<()> {
    let ckpt_path = cfg.evaluate.checkpoint.as_ref().expect("validated");
    let data_path = cfg.evaluate.dataset.as_ref().expect("validated");
    let ckpt = load_checkpoint(ckpt_path).map_err(|e| CliError::from(e).at_path(ckpt_path))?;
    let model = ckpt.model().map_err(|e| CliError::from(e).at_path(ckpt_path))?;
    let test = Data::read(data_path, space_of(ckpt.kind))?;
    let dt = match &test {
        Data::Tg(d) => d.dt,
        Data::Lp(d) => d.dt,
    };
    if let Some(trained) = ckpt.dt {
        if (trained - dt).abs() > 1e-12 * dt.abs().max(1.0) {
            eprintln!("warning: model was trained at dt {trained} but the dataset has dt {dt}");
        }
    }
    let eval = evaluate_model(cfg, &model, &test)?;
    let metrics = eval_metrics("test_", &eval);
    write_json(
        &run.artifact("metrics.json"),
        &json!({
            "checkpoint": ckpt_path,
            "dataset": data_path,
            "kind": ckpt.kind,
            "metrics": metrics,
        }),
    )?;
    run.metrics.extend(metrics);
    Ok(())
}

pub fn geometrize_cmd(cfg: &ExperimentConfig, run: &mut Run) -> CliResult<()> {
    let h = hamiltonian(cfg)?;
    let d = &cfg.data;
    let g = &cfg.geometrize;
    let source = lp_step(cfg, &h, d.generator, d.dt, d.rtol, d.atol)?;
    let net = ScalarNet::new(3, &cfg.model.hidden, cfg.model.seed)?;
    let (model, report, data) = geometrize(source, &d.region, d.n, d.seed, d.dt, net, cfg.retraction, &cfg.train)?;
    Data::Lp(data).write(&run.csv_artifact("train.csv"))?;
    write_loss(&run.artifact("loss.csv"), &report)?;

    let mu0 = Vec3::from(g.mu0);
    let source_traj = lp_trajectory(cfg, &h, d.generator, mu0, d.dt, g.steps, d.rtol, d.atol)?;
    let mut meta = TrajectoryMetadata::named("poisson-surrogate");
    meta.retraction = Some(cfg.retraction);
    meta.inertia = Some(cfg.inertia);
    let surrogate = run_trajectory(|mu| predict_poisson(&model, mu, &cfg.newton), mu0, d.dt, g.steps, meta)?;
    write_lp_trajectory(&run.csv_artifact("source.csv"), &source_traj, &h)?;
    write_lp_trajectory(&run.csv_artifact("surrogate.csv"), &surrogate, &h)?;

    let s_src = drift(&source_traj, &h).summary;
    let s_sur = drift(&surrogate, &h).summary;
    record_drift(run, "source", &s_src);
    record_drift(run, "surrogate", &s_sur);
    run.metric("train_final_loss", report.final_loss);
    let metrics = BTreeMap::from([("train_final_loss".to_string(), report.final_loss)]);
    save_checkpoint(&run.artifact("checkpoint.json"), &Checkpoint::new(&Model::Poisson(model), Some(d.dt), Some(cfg.train), metrics))?;
    write_json(&run.artifact("drift.json"), &json!({"source": s_src, "surrogate": s_sur}))?;
    Ok(())
}

pub fn error_scaling(cfg: &ExperimentConfig, run: &mut Run) -> CliResult<()> {
    let h = hamiltonian(cfg)?;
    let e = &cfg.error_scaling;
    let Data::Tg(pairs) = generate(cfg, &h, Space::Tg, cfg.data.dt, e.pairs, cfg.data.seed)? else {
        unreachable!("T*SO(3) generation");
    };
    let header: Vec<String> = ["pair", "eps", "group_error", "momentum_error", "mu_out_norm"].iter().map(|s| s.to_string()).collect();
    let mut rows = Vec::new();
    let mut group_slopes = Vec::new();
    let mut momentum_slopes = Vec::new();
    let mut bound_samples = Vec::new();
    for (i, (zi, zo)) in pairs.inputs.iter().zip(&pairs.outputs).enumerate() {
        let rep = reduction_error_experiment(zi, zo, &e.epsilons, e.seed + i as u64)?;
        let norm = zo.mu.norm();
        for (k, &eps) in rep.epsilons.iter().enumerate() {
            rows.push(vec![i as f64, eps, rep.group_errors[k], rep.momentum_errors[k], norm]);
            if eps > 0.0 {
                bound_samples.push((norm, eps, rep.momentum_errors[k]));
            }
        }
        group_slopes.push(rep.group_slope);
        momentum_slopes.push(rep.momentum_slope);
    }
    write_table(&run.artifact("errors.csv"), "reduction-errors", &header, &rows)?;
    let range = |xs: &[f64]| (xs.iter().copied().fold(f64::INFINITY, f64::min), xs.iter().copied().fold(f64::NEG_INFINITY, f64::max));
    let (gmin, gmax) = range(&group_slopes);
    let (mmin, mmax) = range(&momentum_slopes);
    let bound = if bound_samples.len() >= 2 { Some(fit_momentum_bound(&bound_samples)?) } else { None };
    write_json(
        &run.artifact("summary.json"),
        &json!({
            "group_slopes": group_slopes,
            "momentum_slopes": momentum_slopes,
            "momentum_bound": bound.map(|(c1, c2, worst)| json!({"c1": c1, "c2": c2, "worst_ratio": worst})),
        }),
    )?;
    run.metric("group_slope_min", gmin);
    run.metric("group_slope_max", gmax);
    run.metric("momentum_slope_min", mmin);
    run.metric("momentum_slope_max", mmax);
    if let Some((c1, c2, worst)) = bound {
        run.metric("momentum_bound_c1", c1);
        run.metric("momentum_bound_c2", c2);
        run.metric("momentum_bound_worst_ratio", worst);
    }
    Ok(())
}

pub fn order_study(cfg: &ExperimentConfig, run: &mut Run) -> CliResult<()> {
    let h = hamiltonian(cfg)?;
    let o = &cfg.order_study;
    let mu0 = Vec3::from(o.mu0);
    let reference = reference_reduced(&h, &mu0, &[0.0, o.horizon], &AdaptiveConfig::new(o.reference_rtol, o.reference_atol))?.states[1];
    let mut rows = Vec::new();
    let mut fits = BTreeMap::new();
    for &integrator in &o.integrators {
        let label = integrator.to_string();
        let mut errors = Vec::with_capacity(o.dts.len());
        for &dt in &o.dts {
            let steps = (o.horizon / dt).round() as usize;
            let traj = lp_trajectory(cfg, &h, integrator, mu0, dt, steps, 1e-10, 1e-12)?;
            let err = (traj.last().expect("non-empty trajectory") - reference).norm();
            rows.push(vec![label.clone(), fmt_f64(dt), fmt_f64(err)]);
            errors.push(err);
        }
        let fit = fit_order(&o.dts, &errors)?;
        run.metric(format!("{label}.slope"), fit.slope);
        run.metric(format!("{label}.r_squared"), fit.r_squared);
        fits.insert(label, fit);
    }
    let header = vec!["integrator".to_string(), "dt".into(), "error".into()];
    write_text_table(&run.artifact("errors.csv"), "order-study", &header, &rows)?;
    write_json(&run.artifact("fits.json"), &fits)?;
    Ok(())
}
