//! Conservation metrics, convergence orders, trajectory divergence, the
//! reduction error-scaling experiment and model evaluation.
//!
//! Matrix norms are Frobenius throughout. Trends are ordinary least-squares
//! slopes against the step index.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integrators::Trajectory;
use crate::lie_so3::{Mat3, Momentum, Rotation, Vec3};
use crate::learn::data::{PoissonDataset, TgDataset};
use crate::phase_space::{j_left, PhasePoint, ReducedHamiltonian};

/// State types that carry a body momentum and a flat embedding.
pub trait StateView {
    fn body_momentum(&self) -> Momentum;
    fn spatial_momentum(&self) -> Option<Momentum>;
    fn embed(&self) -> Vec<f64>;
}

impl StateView for PhasePoint {
    fn body_momentum(&self) -> Momentum {
        self.mu
    }

    fn spatial_momentum(&self) -> Option<Momentum> {
        Some(j_left(self))
    }

    fn embed(&self) -> Vec<f64> {
        self.embedding().to_vec()
    }
}

impl StateView for Momentum {
    fn body_momentum(&self) -> Momentum {
        *self
    }

    fn spatial_momentum(&self) -> Option<Momentum> {
        None
    }

    fn embed(&self) -> Vec<f64> {
        self.as_slice().to_vec()
    }
}

/// Least-squares slope of `ys` against `xs`.
pub fn trend_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len().min(ys.len());
    if n < 2 {
        return 0.0;
    }
    let nf = n as f64;
    let mx = xs[..n].iter().sum::<f64>() / nf;
    let my = ys[..n].iter().sum::<f64>() / nf;
    let mut num = 0.0;
    let mut den = 0.0;
    for i in 0..n {
        num += (xs[i] - mx) * (ys[i] - my);
        den += (xs[i] - mx).powi(2);
    }
    if den == 0.0 {
        0.0
    } else {
        num / den
    }
}

/// Slope of a series against its index.
pub fn index_slope(ys: &[f64]) -> f64 {
    let xs: Vec<f64> = (0..ys.len()).map(|k| k as f64).collect();
    trend_slope(&xs, ys)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DriftSummary {
    pub energy_max_abs_drift: f64,
    pub energy_relative_drift: f64,
    /// Per step.
    pub energy_slope: f64,
    pub casimir_max_abs_drift: f64,
    pub casimir_relative_drift: f64,
    pub casimir_slope: f64,
    /// Largest component deviation of `J_L` (absent for reduced trajectories).
    pub j_left_max_drift: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DriftReport {
    pub hamiltonian: Vec<f64>,
    pub casimir: Vec<f64>,
    /// Spatial momentum per state; `None` for trajectories on `so(3)*`.
    pub j_left: Option<Vec<Vec3>>,
    pub summary: DriftSummary,
}

fn max_abs_dev(ys: &[f64]) -> f64 {
    ys.first().map_or(0.0, |y0| ys.iter().map(|y| (y - y0).abs()).fold(0.0, f64::max))
}

/// Energy, Casimir and spatial-momentum series along a trajectory.
pub fn drift<S: StateView>(traj: &Trajectory<S>, h: &ReducedHamiltonian) -> DriftReport {
    let hamiltonian: Vec<f64> = traj.states.iter().map(|s| h.value(&s.body_momentum())).collect();
    let casimir: Vec<f64> = traj.states.iter().map(|s| s.body_momentum().norm()).collect();
    let j_left: Option<Vec<Vec3>> = traj.states.iter().map(|s| s.spatial_momentum()).collect();
    let rel = |ys: &[f64]| ys.first().map_or(0.0, |y0| if *y0 == 0.0 { max_abs_dev(ys) } else { max_abs_dev(ys) / y0.abs() });
    let j_left_max_drift = j_left.as_ref().map(|js| {
        js.first()
            .map_or(0.0, |j0| js.iter().map(|j| (j - j0).amax()).fold(0.0, f64::max))
    });
    let summary = DriftSummary {
        energy_max_abs_drift: max_abs_dev(&hamiltonian),
        energy_relative_drift: rel(&hamiltonian),
        energy_slope: index_slope(&hamiltonian),
        casimir_max_abs_drift: max_abs_dev(&casimir),
        casimir_relative_drift: rel(&casimir),
        casimir_slope: index_slope(&casimir),
        j_left_max_drift,
    };
    DriftReport { hamiltonian, casimir, j_left, summary }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderFit {
    pub dts: Vec<f64>,
    pub errors: Vec<f64>,
    pub slope: f64,
    pub r_squared: f64,
}

/// Log–log least-squares fit of error against step size.
pub fn fit_order(dts: &[f64], errors: &[f64]) -> Result<OrderFit> {
    if dts.len() < 3 || dts.len() != errors.len() {
        return Err(Error::InvalidInput(format!("need ≥ 3 matching step sizes and errors, got {} and {}", dts.len(), errors.len())));
    }
    if errors.iter().any(|e| !(*e > 0.0)) || dts.iter().any(|d| !(*d > 0.0)) {
        return Err(Error::InvalidInput(format!("errors and step sizes must be positive: {errors:?}")));
    }
    let lx: Vec<f64> = dts.iter().map(|d| d.ln()).collect();
    let ly: Vec<f64> = errors.iter().map(|e| e.ln()).collect();
    let slope = trend_slope(&lx, &ly);
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let ss_tot: f64 = ly.iter().map(|y| (y - my).powi(2)).sum();
    let ss_res: f64 = lx.iter().zip(&ly).map(|(x, y)| (y - my - slope * (x - mx)).powi(2)).sum();
    let r_squared = if ss_tot == 0.0 { 1.0 } else { 1.0 - ss_res / ss_tot };
    Ok(OrderFit {
        dts: dts.to_vec(),
        errors: errors.to_vec(),
        slope,
        r_squared,
    })
}

/// Runs `final_state(dt)` for each step size and fits the global order
/// against `reference`.
pub fn convergence_order(
    mut final_state: impl FnMut(f64) -> Result<Vec<f64>>,
    reference: &[f64],
    dts: &[f64],
) -> Result<OrderFit> {
    let mut errors = Vec::with_capacity(dts.len());
    for &dt in dts {
        let y = final_state(dt)?;
        if y.len() != reference.len() {
            return Err(Error::InvalidInput("state and reference dimensions differ".into()));
        }
        errors.push(y.iter().zip(reference).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt());
    }
    fit_order(dts, &errors)
}

/// Euclidean distance in embedding coordinates at each common time.
pub fn divergence<S: StateView>(a: &Trajectory<S>, b: &Trajectory<S>) -> Result<Vec<f64>> {
    if a.times.len() != b.times.len() || a.states.len() != b.states.len() {
        return Err(Error::InvalidInput(format!("trajectory lengths differ: {} vs {}", a.len(), b.len())));
    }
    for (ta, tb) in a.times.iter().zip(&b.times) {
        if (ta - tb).abs() > 1e-9 * ta.abs().max(1.0) {
            return Err(Error::InvalidInput(format!("time grids differ at t = {ta} vs {tb}")));
        }
    }
    Ok(a.states
        .iter()
        .zip(&b.states)
        .map(|(x, y)| x.embed().iter().zip(y.embed()).map(|(p, q)| (p - q).powi(2)).sum::<f64>().sqrt())
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReductionErrorReport {
    pub epsilons: Vec<f64>,
    /// `‖g′⁻¹g″ − g̃′⁻¹g̃″‖_F` per ε.
    pub group_errors: Vec<f64>,
    /// `‖g′ᵀg″μ″ − g̃′ᵀg̃″μ̃″‖` per ε.
    pub momentum_errors: Vec<f64>,
    /// Log–log slope of the group error over the nonzero ε.
    pub group_slope: f64,
    pub momentum_slope: f64,
}

/// Fixed standard-normal perturbation directions for one pair.
#[derive(Debug, Clone, Copy)]
pub struct NoiseDirections {
    pub g_in: Mat3,
    pub g_out: Mat3,
    pub mu_out: Vec3,
}

impl NoiseDirections {
    pub fn sample(seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut normal = || -> f64 { StandardNormal.sample(&mut rng) };
        NoiseDirections {
            g_in: Mat3::from_fn(|_, _| normal()),
            g_out: Mat3::from_fn(|_, _| normal()),
            mu_out: Vec3::from_fn(|_, _| normal()),
        }
    }
}

/// Errors of the reduced group element and reduced momentum when a clean
/// pair is perturbed by `ε` times fixed directions and projected to SO(3).
/// Zero noise leaves the pair untouched, as in `perturb_dataset`.
pub fn reduction_errors(z_in: &PhasePoint, z_out: &PhasePoint, eps: f64, dirs: &NoiseDirections) -> (f64, f64) {
    if eps == 0.0 {
        return (0.0, 0.0);
    }
    let rel = z_in.g.inverse().compose(&z_out.g);
    let gi = Rotation::project(&(z_in.g.matrix() + eps * dirs.g_in));
    let go = Rotation::project(&(z_out.g.matrix() + eps * dirs.g_out));
    let rel_noisy = gi.inverse().compose(&go);
    let mu_noisy = z_out.mu + eps * dirs.mu_out;
    let group = (rel.matrix() - rel_noisy.matrix()).norm();
    let momentum = (rel.apply(&z_out.mu) - rel_noisy.apply(&mu_noisy)).norm();
    (group, momentum)
}

pub fn reduction_error_experiment(z_in: &PhasePoint, z_out: &PhasePoint, epsilons: &[f64], seed: u64) -> Result<ReductionErrorReport> {
    let dirs = NoiseDirections::sample(seed);
    let mut group_errors = Vec::with_capacity(epsilons.len());
    let mut momentum_errors = Vec::with_capacity(epsilons.len());
    for &eps in epsilons {
        let (g, m) = reduction_errors(z_in, z_out, eps, &dirs);
        group_errors.push(g);
        momentum_errors.push(m);
    }
    let fit = |errs: &[f64]| -> Result<f64> {
        let (d, e): (Vec<f64>, Vec<f64>) = epsilons.iter().zip(errs).filter(|(eps, _)| **eps > 0.0).map(|(a, b)| (*a, *b)).unzip();
        Ok(fit_order(&d, &e)?.slope)
    };
    Ok(ReductionErrorReport {
        epsilons: epsilons.to_vec(),
        group_slope: fit(&group_errors)?,
        momentum_slope: fit(&momentum_errors)?,
        group_errors,
        momentum_errors,
    })
}

/// Non-negative least-squares fit of `err/ε ≈ c₁‖μ″‖ + c₂` and the worst
/// ratio of observed error to the fitted bound.
pub fn fit_momentum_bound(samples: &[(f64, f64, f64)]) -> Result<(f64, f64, f64)> {
    // samples: (‖μ″‖, ε, error) with ε > 0.
    if samples.len() < 2 {
        return Err(Error::InvalidInput("need at least two samples".into()));
    }
    let xs: Vec<f64> = samples.iter().map(|s| s.0).collect();
    let ys: Vec<f64> = samples.iter().map(|s| s.2 / s.1).collect();
    let mut c1 = trend_slope(&xs, &ys);
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let mut c2 = mean(&ys) - c1 * mean(&xs);
    if c1 < 0.0 {
        c1 = 0.0;
        c2 = mean(&ys);
    } else if c2 < 0.0 {
        c2 = 0.0;
        let sxx: f64 = xs.iter().map(|x| x * x).sum();
        c1 = xs.iter().zip(&ys).map(|(x, y)| x * y).sum::<f64>() / sxx;
    }
    let worst = samples
        .iter()
        .map(|(m, eps, err)| err / ((c1 * m + c2) * eps))
        .fold(0.0, f64::max);
    Ok((c1, c2, worst))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvalMetrics {
    /// Mean over records and embedding components of the squared error.
    pub mse: f64,
    /// Largest per-record Euclidean error.
    pub max_error: f64,
    pub n: usize,
    /// Records where the model's implicit step failed; these are scored
    /// with the input state as the prediction.
    pub failures: usize,
}

fn metrics<S: StateView>(inputs: &[S], outputs: &[S], mut predict: impl FnMut(&S) -> Result<S>) -> Result<EvalMetrics> {
    let mut sum = 0.0;
    let mut max_error: f64 = 0.0;
    let mut failures = 0;
    let mut dim = 0;
    for (x, y) in inputs.iter().zip(outputs) {
        let pred = match predict(x) {
            Ok(p) => p.embed(),
            Err(Error::StepFailure { .. }) | Err(Error::ChartSingularity { .. }) => {
                failures += 1;
                x.embed()
            }
            Err(e) => return Err(e),
        };
        let truth = y.embed();
        dim = truth.len();
        let d2: f64 = pred.iter().zip(&truth).map(|(p, q)| (p - q).powi(2)).sum();
        sum += d2;
        max_error = max_error.max(d2.sqrt());
    }
    let n = inputs.len();
    Ok(EvalMetrics {
        mse: if n == 0 { 0.0 } else { sum / (n * dim) as f64 },
        max_error,
        n,
        failures,
    })
}

/// Test metrics of a `T*SO(3)` model in embedding coordinates (12 per record).
pub fn evaluate_tg(predict: impl FnMut(&PhasePoint) -> Result<PhasePoint>, test: &TgDataset) -> Result<EvalMetrics> {
    metrics(&test.inputs, &test.outputs, predict)
}

/// Test metrics of a Poisson model (3 components per record).
pub fn evaluate_poisson(predict: impl FnMut(&Momentum) -> Result<Momentum>, test: &PoissonDataset) -> Result<EvalMetrics> {
    metrics(&test.inputs, &test.outputs, predict)
}
