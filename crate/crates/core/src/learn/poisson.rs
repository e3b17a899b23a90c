use ndarray::Array2;
use serde::{Deserialize, Serialize};

use super::data::{generate_poisson_dataset, PoissonDataset, Region};
use super::net::ScalarNet;
use super::{optimize, TrainConfig, TrainReport};
use crate::error::{Error, Result};
use crate::integrators::{poisson_map, Bisection, NewtonConfig};
use crate::lie_so3::{AlgebraVector, Mat3, Momentum, Retraction, Vec3};

/// Learned Lie–Poisson map: the bisection `η = ∇S(π)` applied through the
/// same implicit step as the series integrators.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoissonModel {
    pub net: ScalarNet,
    pub retraction: Retraction,
}

impl Bisection for PoissonModel {
    fn retraction(&self) -> Retraction {
        self.retraction
    }

    fn eta(&self, pi: &Vec3) -> AlgebraVector {
        Vec3::from_column_slice(&self.net.gradient(pi.as_slice()).expect("3-input net"))
    }

    fn eta_jacobian(&self, pi: &Vec3) -> Mat3 {
        let h = self.net.hessian(pi.as_slice()).expect("3-input net");
        Mat3::from_fn(|i, j| h[(i, j)])
    }
}

/// Loss of the joint (weights, latent points) problem
/// `(1/N) Σ ‖J_R(η_i, π_i) − μ″_i‖² + ‖J_L(η_i, π_i) − μ′_i‖²`, `η_i = ∇S(π_i)`.
/// Returns the loss, the weight gradient and the latent gradient.
pub fn poisson_loss_grad(
    net: &ScalarNet,
    retraction: Retraction,
    latents: &[Vec3],
    d: &PoissonDataset,
) -> Result<(f64, Vec<f64>, Vec<Vec3>)> {
    let n = d.len();
    let scale = 1.0 / n as f64;
    let xs = Array2::from_shape_fn((n, 3), |(i, j)| latents[i][j]);
    let g = net.grad_batch(&xs.view())?;
    let mut v = Array2::<f64>::zeros((n, 3));
    let mut direct = Vec::with_capacity(n);
    let mut loss = 0.0;
    for i in 0..n {
        let eta = Vec3::new(g[(i, 0)], g[(i, 1)], g[(i, 2)]);
        let pi = latents[i];
        let r_body = retraction.body_momentum(&eta, &pi) - d.outputs[i];
        let r_spatial = retraction.spatial_momentum(&eta, &pi) - d.inputs[i];
        loss += r_body.norm_squared() + r_spatial.norm_squared();
        let (be, bp) = retraction.body_momentum_jacobians(&eta, &pi);
        let (se, sp) = retraction.spatial_momentum_jacobians(&eta, &pi);
        let ve = 2.0 * scale * (be.transpose() * r_body + se.transpose() * r_spatial);
        direct.push(2.0 * scale * (bp.transpose() * r_body + sp.transpose() * r_spatial));
        for j in 0..3 {
            v[(i, j)] = ve[j];
        }
    }
    let (grad, hv) = net.grad_backward(&xs.view(), &v.view())?;
    let latent_grad = direct
        .into_iter()
        .enumerate()
        .map(|(i, d)| d + Vec3::new(hv[(i, 0)], hv[(i, 1)], hv[(i, 2)]))
        .collect();
    Ok((loss * scale, grad, latent_grad))
}

/// Trains the weights jointly with one latent chart point per record,
/// initialized at the output momentum.
pub fn train_poisson(
    d: &PoissonDataset,
    net: ScalarNet,
    retraction: Retraction,
    cfg: &TrainConfig,
) -> Result<(PoissonModel, TrainReport, Vec<Vec3>)> {
    cfg.validate(d.len())?;
    if net.input_dim() != 3 {
        return Err(Error::Config(format!("Poisson model needs a 3-input net, got {}", net.input_dim())));
    }
    let n_w = net.n_params();
    let mut params = net.params().to_vec();
    for mu in &d.outputs {
        params.extend_from_slice(mu.as_slice());
    }
    let unpack = |p: &[f64]| -> Vec<Vec3> { p[n_w..].chunks_exact(3).map(Vec3::from_column_slice).collect() };
    let mut scratch = net.clone();
    let report = optimize(&mut params, cfg, |p| {
        scratch.params_mut().copy_from_slice(&p[..n_w]);
        let latents = unpack(p);
        let (loss, gw, gl) = poisson_loss_grad(&scratch, retraction, &latents, d)?;
        let mut grad = gw;
        for g in gl {
            grad.extend_from_slice(g.as_slice());
        }
        Ok((loss, grad))
    })?;
    scratch.params_mut().copy_from_slice(&params[..n_w]);
    let latents = unpack(&params);
    Ok((PoissonModel { net: scratch, retraction }, report, latents))
}

/// One step of the learned Poisson map.
pub fn predict_poisson(model: &PoissonModel, mu: &Momentum, cfg: &NewtonConfig) -> Result<Momentum> {
    poisson_map(model, mu, cfg)
}

/// Trains a Poisson surrogate on `n` pairs produced by `source` from inputs
/// drawn uniformly in `region`.
#[allow(clippy::too_many_arguments)]
pub fn geometrize(
    source: impl FnMut(&Momentum) -> Result<Momentum>,
    region: &Region,
    n: usize,
    seed: u64,
    dt: f64,
    net: ScalarNet,
    retraction: Retraction,
    cfg: &TrainConfig,
) -> Result<(PoissonModel, TrainReport, PoissonDataset)> {
    region.validate()?;
    if n == 0 {
        return Err(Error::Config("geometrization needs at least one sample".into()));
    }
    let data = generate_poisson_dataset(source, n, region, seed, dt, "geometrize")?;
    let (model, report, _) = train_poisson(&data, net, retraction, cfg)?;
    Ok((model, report, data))
}
