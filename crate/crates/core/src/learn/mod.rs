//! Learning equivariant symplectic maps and Lie–Poisson maps from data.
//!
//! Three model families share the same small network stack:
//!
//! * [`symmetric`]: a reduced generating function `S(π)` whose gradient
//!   graph is a bisection of `T*SO(3)`; predictions go through the same
//!   implicit step as the series integrators and so conserve `J_L` for any
//!   weights.
//! * [`nonsymmetric`]: a type-II generating function in the canonical chart
//!   of `T*SO(3)`, which is symplectic but neither equivariant nor
//!   momentum-preserving.
//! * [`poisson`]: a reduced generating function trained directly on pairs
//!   in `so(3)*`, with one latent chart point per record.

pub mod adam;
pub mod data;
pub mod net;
pub mod nonsymmetric;
pub mod poisson;
pub mod symmetric;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use adam::{Adam, AdamConfig};
pub use data::{
    generate_poisson_dataset, generate_tg_dataset, perturb_dataset, reduce_dataset, reduce_pair, PairDataset, PoissonDataset,
    Provenance, ReducedDataset, Region, TgDataset, TgSampling,
};
pub use net::{Activation, ScalarNet};
pub use nonsymmetric::{chart_lift, chart_unlift, predict_nonsymmetric, train_nonsymmetric, NonSymmetricModel};
pub use poisson::{geometrize, predict_poisson, train_poisson, PoissonModel};
pub use symmetric::{predict_symmetric, train_symmetric, SymmetricModel};

/// Loss used by the symmetric model.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LossVariant {
    /// Squared distance between chart coordinates.
    #[default]
    Chart,
    /// Squared geodesic distance `‖log(R(η)⁻¹ R(∇S))‖²` on the group.
    ExpRetraction,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    pub optimizer: AdamConfig,
    pub steps: usize,
    /// `None` means full batch, the only schedule supported.
    pub batch_size: Option<usize>,
    pub loss: LossVariant,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            optimizer: AdamConfig::default(),
            steps: 1000,
            batch_size: None,
            loss: LossVariant::Chart,
            seed: 0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self, n_records: usize) -> Result<()> {
        if !(self.optimizer.lr > 0.0) {
            return Err(Error::Config(format!("learning rate must be positive, got {}", self.optimizer.lr)));
        }
        if self.steps == 0 {
            return Err(Error::Config("training needs at least one step".into()));
        }
        if let Some(b) = self.batch_size {
            if b < n_records {
                return Err(Error::Config(format!("batch size {b} < {n_records}: only full-batch training is supported")));
            }
        }
        if n_records == 0 {
            return Err(Error::Config("training dataset is empty".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TrainReport {
    /// Loss before each optimizer step.
    pub loss_history: Vec<f64>,
    /// Loss at the returned parameters.
    pub final_loss: f64,
    /// Gradient norm at the returned parameters.
    pub final_grad_norm: f64,
    pub steps: usize,
}

/// Full-batch Adam on a flat parameter vector. `loss_grad` must be a pure
/// function of the parameters.
pub(crate) fn optimize(
    params: &mut [f64],
    cfg: &TrainConfig,
    mut loss_grad: impl FnMut(&[f64]) -> Result<(f64, Vec<f64>)>,
) -> Result<TrainReport> {
    let mut adam = Adam::new(cfg.optimizer, params.len());
    let mut history = Vec::with_capacity(cfg.steps);
    for step in 0..cfg.steps {
        let (loss, grad) = loss_grad(params)?;
        if !loss.is_finite() || grad.iter().any(|g| !g.is_finite()) {
            return Err(Error::TrainingFailure { step });
        }
        history.push(loss);
        adam.step(params, &grad);
    }
    let (final_loss, grad) = loss_grad(params)?;
    if !final_loss.is_finite() {
        return Err(Error::TrainingFailure { step: cfg.steps });
    }
    Ok(TrainReport {
        loss_history: history,
        final_loss,
        final_grad_norm: grad.iter().map(|g| g * g).sum::<f64>().sqrt(),
        steps: cfg.steps,
    })
}
