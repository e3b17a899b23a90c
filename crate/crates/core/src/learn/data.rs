use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lie_so3::{cay, AlgebraVector, Mat3, Momentum, Retraction, Rotation, Vec3};
use crate::phase_space::PhasePoint;

/// Where a dataset came from.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub generator: String,
    pub seed: Option<u64>,
    /// Per-entry noise variance added after generation (0 for clean data).
    pub sigma2: f64,
    /// Samples drawn but discarded because they left the chart domain.
    pub rejected: usize,
}

/// Input/output pairs of a one-step map.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairDataset<S> {
    pub inputs: Vec<S>,
    pub outputs: Vec<S>,
    pub dt: f64,
    pub provenance: Provenance,
}

/// Pairs on `T*SO(3)`.
pub type TgDataset = PairDataset<PhasePoint>;
/// Pairs on `so(3)*`.
pub type PoissonDataset = PairDataset<Momentum>;

impl<S> PairDataset<S> {
    pub fn new(inputs: Vec<S>, outputs: Vec<S>, dt: f64, provenance: Provenance) -> Result<Self> {
        if inputs.len() != outputs.len() {
            return Err(Error::InvalidInput(format!("{} inputs but {} outputs", inputs.len(), outputs.len())));
        }
        Ok(PairDataset { inputs, outputs, dt, provenance })
    }

    pub fn len(&self) -> usize {
        self.inputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inputs.is_empty()
    }
}

/// Axis-aligned box in R³.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Region {
    pub lo: [f64; 3],
    pub hi: [f64; 3],
}

impl Region {
    pub fn cube(lo: f64, hi: f64) -> Self {
        Region { lo: [lo; 3], hi: [hi; 3] }
    }

    pub fn validate(&self) -> Result<()> {
        for i in 0..3 {
            if !(self.lo[i] < self.hi[i]) || !self.lo[i].is_finite() || !self.hi[i].is_finite() {
                return Err(Error::Config(format!("empty or invalid sampling region {:?}..{:?}", self.lo, self.hi)));
            }
        }
        Ok(())
    }

    pub fn sample(&self, rng: &mut impl Rng) -> Vec3 {
        Vec3::from_fn(|i, _| rng.random_range(self.lo[i]..self.hi[i]))
    }
}

/// Sampling boxes for `T*SO(3)` data: Cayley coordinates of `g′` and the
/// body momentum `μ′`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TgSampling {
    pub chart: Region,
    pub momentum: Region,
}

impl Default for TgSampling {
    fn default() -> Self {
        TgSampling {
            chart: Region::cube(0.0, 6.0),
            momentum: Region::cube(0.0, 6.0),
        }
    }
}

/// Records whose rotations are within this margin of angle π are rejected.
pub const CHART_MARGIN: f64 = 1e-3;

fn chart_ok(g: &Rotation) -> bool {
    g.angle() < std::f64::consts::PI - CHART_MARGIN
}

/// Rejected fraction above which generation aborts.
pub const MAX_REJECTED_FRACTION: f64 = 0.1;

fn check_rejections(rejected: usize, attempts: usize) -> Result<()> {
    if attempts > 0 && rejected as f64 > MAX_REJECTED_FRACTION * attempts as f64 {
        return Err(Error::InvalidInput(format!(
            "{rejected} of {attempts} samples fell outside the chart domain (limit {:.0}%)",
            100.0 * MAX_REJECTED_FRACTION
        )));
    }
    Ok(())
}

/// Samples `n` points `z′ = (cay(x′), μ′)` and completes each with one step
/// of `step`. Records whose `g″` or `g′⁻¹g″` cannot be charted are redrawn and
/// counted.
pub fn generate_tg_dataset(
    mut step: impl FnMut(&PhasePoint) -> Result<PhasePoint>,
    n: usize,
    sampling: &TgSampling,
    seed: u64,
    dt: f64,
    generator: &str,
) -> Result<TgDataset> {
    sampling.chart.validate()?;
    sampling.momentum.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut inputs = Vec::with_capacity(n);
    let mut outputs = Vec::with_capacity(n);
    let mut rejected = 0;
    let mut attempts = 0;
    while inputs.len() < n {
        attempts += 1;
        let x = sampling.chart.sample(&mut rng);
        let mu = sampling.momentum.sample(&mut rng);
        let z_in = PhasePoint::new(cay(&x), mu);
        let z_out = step(&z_in)?;
        if chart_ok(&z_out.g) && chart_ok(&z_in.g.inverse().compose(&z_out.g)) {
            inputs.push(z_in);
            outputs.push(z_out);
        } else {
            rejected += 1;
            check_rejections(rejected, attempts.max(20))?;
        }
    }
    check_rejections(rejected, attempts)?;
    PairDataset::new(
        inputs,
        outputs,
        dt,
        Provenance {
            generator: generator.to_string(),
            seed: Some(seed),
            sigma2: 0.0,
            rejected,
        },
    )
}

/// Samples `n` momenta uniformly in `region` and completes each with one step.
pub fn generate_poisson_dataset(
    mut step: impl FnMut(&Momentum) -> Result<Momentum>,
    n: usize,
    region: &Region,
    seed: u64,
    dt: f64,
    generator: &str,
) -> Result<PoissonDataset> {
    region.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut inputs = Vec::with_capacity(n);
    let mut outputs = Vec::with_capacity(n);
    for _ in 0..n {
        let mu = region.sample(&mut rng);
        outputs.push(step(&mu)?);
        inputs.push(mu);
    }
    PairDataset::new(
        inputs,
        outputs,
        dt,
        Provenance {
            generator: generator.to_string(),
            seed: Some(seed),
            ..Default::default()
        },
    )
}

/// Adds i.i.d. `N(0, σ²)` noise to the nine entries of each rotation (then
/// projects back onto SO(3)) and to each momentum entry.
pub fn perturb_dataset(d: &TgDataset, sigma2: f64, seed: u64) -> Result<TgDataset> {
    if !(sigma2 >= 0.0) || !sigma2.is_finite() {
        return Err(Error::Config(format!("noise variance must be non-negative, got {sigma2}")));
    }
    let mut out = d.clone();
    out.provenance.sigma2 = sigma2;
    if sigma2 == 0.0 {
        return Ok(out);
    }
    let sigma = sigma2.sqrt();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut noisy = |z: &PhasePoint| -> PhasePoint {
        let e = Mat3::from_fn(|_, _| StandardNormal.sample(&mut rng));
        let m = Vec3::from_fn(|_, _| StandardNormal.sample(&mut rng));
        PhasePoint {
            g: Rotation::project(&(z.g.matrix() + sigma * e)),
            mu: z.mu + sigma * m,
        }
    };
    for i in 0..d.len() {
        out.inputs[i] = noisy(&d.inputs[i]);
        out.outputs[i] = noisy(&d.outputs[i]);
    }
    Ok(out)
}

/// Reduced training records `(η, π)`: the chart coordinates of the
/// relative motion `g′⁻¹g″` and the canonical chart momentum whose body
/// momentum is `μ″`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReducedDataset {
    pub xi_target: Vec<AlgebraVector>,
    pub p_input: Vec<Vec3>,
    pub retraction: Retraction,
    pub rejected: usize,
}

impl ReducedDataset {
    pub fn len(&self) -> usize {
        self.xi_target.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xi_target.is_empty()
    }
}

/// Reduces one pair: left-translates it by `g′⁻¹` and charts the result.
pub fn reduce_pair(z_in: &PhasePoint, z_out: &PhasePoint, retraction: Retraction) -> Result<(AlgebraVector, Vec3)> {
    let rel = z_in.g.inverse().compose(&z_out.g);
    let eta = retraction.local(&rel)?;
    let pi = retraction.dtriv(&eta).transpose() * z_out.mu;
    Ok((eta, pi))
}

/// Reduces every pair; records that cannot be charted are dropped and
/// counted.
pub fn reduce_dataset(d: &TgDataset, retraction: Retraction) -> ReducedDataset {
    let mut out = ReducedDataset {
        xi_target: Vec::with_capacity(d.len()),
        p_input: Vec::with_capacity(d.len()),
        retraction,
        rejected: 0,
    };
    for (zi, zo) in d.inputs.iter().zip(&d.outputs) {
        match reduce_pair(zi, zo, retraction) {
            Ok((eta, pi)) => {
                out.xi_target.push(eta);
                out.p_input.push(pi);
            }
            Err(_) => out.rejected += 1,
        }
    }
    out
}
