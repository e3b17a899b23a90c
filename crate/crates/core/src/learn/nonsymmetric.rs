//! Type-II generating-function baseline in the Cayley cotangent chart.
//!
//! `S₂(x′, π″) = x′·π″ + N(x′, π″)` generates `π′ = ∂S₂/∂x′` and
//! `x″ = ∂S₂/∂π″`. The identity term makes `N = 0` the identity map.

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use super::data::TgDataset;
use super::net::ScalarNet;
use super::{optimize, TrainConfig, TrainReport};
use crate::error::{Error, Result};
use crate::integrators::NewtonConfig;
use crate::lie_so3::{cay, cay_dtriv, cay_inv, Mat3, Retraction, Vec3};
use crate::phase_space::PhasePoint;

/// Canonical chart `(x, π)` of `T*SO(3)`: `x = cay⁻¹(g)`, `π = A(x)ᵀμ`.
pub fn chart_lift(z: &PhasePoint) -> Result<(Vec3, Vec3)> {
    let x = cay_inv(&z.g)?;
    Ok((x, cay_dtriv(&x).transpose() * z.mu))
}

pub fn chart_unlift(x: &Vec3, pi: &Vec3) -> PhasePoint {
    PhasePoint::new(cay(x), Retraction::Cayley.body_momentum(x, pi))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NonSymmetricModel {
    /// `N(x′, π″)` with six inputs.
    pub net: ScalarNet,
}

struct ChartRecords {
    inputs: Array2<f64>,
    targets: Array2<f64>,
}

fn chart_records(d: &TgDataset) -> Result<ChartRecords> {
    let n = d.len();
    let mut inputs = Array2::zeros((n, 6));
    let mut targets = Array2::zeros((n, 6));
    for i in 0..n {
        let (x1, p1) = chart_lift(&d.inputs[i])?;
        let (x2, p2) = chart_lift(&d.outputs[i])?;
        for j in 0..3 {
            inputs[(i, j)] = x1[j];
            inputs[(i, 3 + j)] = p2[j];
            targets[(i, j)] = p1[j] - p2[j];
            targets[(i, 3 + j)] = x2[j] - x1[j];
        }
    }
    Ok(ChartRecords { inputs, targets })
}

fn loss_grad(net: &ScalarNet, r: &ChartRecords) -> Result<(f64, Vec<f64>)> {
    let n = r.inputs.nrows() as f64;
    let g = net.grad_batch(&r.inputs.view())?;
    let resid = g - &r.targets;
    let loss = resid.iter().map(|x| x * x).sum::<f64>() / n;
    let v = resid * (2.0 / n);
    let (grad, _) = net.grad_backward(&r.inputs.view(), &v.view())?;
    Ok((loss, grad))
}

/// Loss `(1/N) Σ ‖∇N(x′_i, π″_i) − (π′_i − π″_i, x″_i − x′_i)‖²` and its
/// weight gradient.
pub fn nonsymmetric_loss_grad(net: &ScalarNet, d: &TgDataset) -> Result<(f64, Vec<f64>)> {
    if d.is_empty() {
        return Err(Error::Config("training dataset is empty".into()));
    }
    loss_grad(net, &chart_records(d)?)
}

/// Fits `∇N(x′_i, π″_i) ≈ (π′_i − π″_i, x″_i − x′_i)`.
pub fn train_nonsymmetric(d: &TgDataset, net: ScalarNet, cfg: &TrainConfig) -> Result<(NonSymmetricModel, TrainReport)> {
    cfg.validate(d.len())?;
    if net.input_dim() != 6 {
        return Err(Error::Config(format!("type-II model needs a 6-input net, got {}", net.input_dim())));
    }
    let records = chart_records(d)?;
    let mut scratch = net.clone();
    let mut params = net.params().to_vec();
    let report = optimize(&mut params, cfg, |p| {
        scratch.params_mut().copy_from_slice(p);
        loss_grad(&scratch, &records)
    })?;
    scratch.params_mut().copy_from_slice(&params);
    Ok((NonSymmetricModel { net: scratch }, report))
}

fn split(g: &[f64]) -> (Vec3, Vec3) {
    (Vec3::new(g[0], g[1], g[2]), Vec3::new(g[3], g[4], g[5]))
}

fn stack(x: &Vec3, p: &Vec3) -> [f64; 6] {
    [x[0], x[1], x[2], p[0], p[1], p[2]]
}

/// One step of the learned type-II map: solves `π′ = π″ + ∂N/∂x′(x′, π″)`
/// for `π″`, then sets `x″ = x′ + ∂N/∂π″(x′, π″)`.
pub fn predict_nonsymmetric(model: &NonSymmetricModel, z: &PhasePoint, cfg: &NewtonConfig) -> Result<PhasePoint> {
    let (x1, p1) = chart_lift(z)?;
    let tol = cfg.tol * p1.norm().max(1.0);
    let residual = |p2: &Vec3| -> Result<(Vec3, Vec3)> {
        let (nx, np) = split(&model.net.gradient(&stack(&x1, p2))?);
        Ok((p2 + nx - p1, np))
    };
    let mut p2 = p1;
    let (mut f, mut np) = residual(&p2)?;
    let mut r = f.norm();
    let mut iterations = 0;
    while r > tol {
        if iterations == cfg.max_iter {
            return Err(Error::StepFailure { step: None, residual: r, iterations });
        }
        iterations += 1;
        let h = model.net.hessian(&stack(&x1, &p2))?;
        let jac = Mat3::identity() + Mat3::from_fn(|i, j| h[(i, 3 + j)]);
        let delta = jac
            .lu()
            .solve(&(-f))
            .ok_or(Error::StepFailure { step: None, residual: r, iterations })?;
        let mut lambda = 1.0;
        let mut accepted = false;
        for _ in 0..40 {
            let trial = p2 + lambda * delta;
            let (f_try, np_try) = residual(&trial)?;
            if f_try.norm() < r {
                p2 = trial;
                f = f_try;
                np = np_try;
                r = f.norm();
                accepted = true;
                break;
            }
            lambda *= cfg.damping;
        }
        if !accepted {
            return Err(Error::StepFailure { step: None, residual: r, iterations });
        }
    }
    Ok(chart_unlift(&(x1 + np), &p2))
}
