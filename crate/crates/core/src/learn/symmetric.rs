use ndarray::Array2;
use serde::{Deserialize, Serialize};

use super::data::ReducedDataset;
use super::net::ScalarNet;
use super::{optimize, LossVariant, TrainConfig, TrainReport};
use crate::error::{Error, Result};
use crate::integrators::{equivariant_map, Bisection, NewtonConfig};
use crate::lie_so3::{log_so3, AlgebraVector, Mat3, Retraction, Vec3};
use crate::phase_space::PhasePoint;

/// Learned reduced generating function. The learned bisection is
/// `η = ∇S(π)`; the time step is absorbed into the weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymmetricModel {
    pub net: ScalarNet,
    pub retraction: Retraction,
}

impl Bisection for SymmetricModel {
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

fn rows(vs: &[Vec3]) -> Array2<f64> {
    Array2::from_shape_fn((vs.len(), 3), |(i, j)| vs[i][j])
}

/// Loss and weight gradient of the symmetric objective.
pub fn symmetric_loss_grad(net: &ScalarNet, d: &ReducedDataset, variant: LossVariant) -> Result<(f64, Vec<f64>)> {
    let n = d.len();
    if n == 0 {
        return Err(Error::Config("reduced dataset is empty".into()));
    }
    let xs = rows(&d.p_input);
    let g = net.grad_batch(&xs.view())?;
    let scale = 1.0 / n as f64;
    let mut v = Array2::<f64>::zeros((n, 3));
    let mut loss = 0.0;
    for i in 0..n {
        let gi = Vec3::new(g[(i, 0)], g[(i, 1)], g[(i, 2)]);
        let ti = d.xi_target[i];
        let vi = match variant {
            LossVariant::Chart => {
                let r = gi - ti;
                loss += r.norm_squared();
                2.0 * scale * r
            }
            LossVariant::ExpRetraction => {
                // d log(R(η)⁻¹R(G)) = J⁻¹(Φ)·A(G)·dG and J⁻¹(Φ)ᵀΦ = Φ.
                let rel = d.retraction.retract(&ti).inverse().compose(&d.retraction.retract(&gi));
                let phi = log_so3(&rel)?;
                loss += phi.norm_squared();
                2.0 * scale * d.retraction.dtriv(&gi).transpose() * phi
            }
        };
        for j in 0..3 {
            v[(i, j)] = vi[j];
        }
    }
    let (grad, _) = net.grad_backward(&xs.view(), &v.view())?;
    Ok((loss * scale, grad))
}

/// Fits `∇S(π_i) ≈ η_i` by full-batch Adam.
pub fn train_symmetric(d: &ReducedDataset, net: ScalarNet, cfg: &TrainConfig) -> Result<(SymmetricModel, TrainReport)> {
    cfg.validate(d.len())?;
    if net.input_dim() != 3 {
        return Err(Error::Config(format!("symmetric model needs a 3-input net, got {}", net.input_dim())));
    }
    let mut scratch = net.clone();
    let mut params = net.params().to_vec();
    let report = optimize(&mut params, cfg, |p| {
        scratch.params_mut().copy_from_slice(p);
        symmetric_loss_grad(&scratch, d, cfg.loss)
    })?;
    scratch.params_mut().copy_from_slice(&params);
    Ok((
        SymmetricModel {
            net: scratch,
            retraction: d.retraction,
        },
        report,
    ))
}

/// One step of the learned equivariant map.
pub fn predict_symmetric(model: &SymmetricModel, z: &PhasePoint, cfg: &NewtonConfig) -> Result<PhasePoint> {
    equivariant_map(model, z, cfg)
}
