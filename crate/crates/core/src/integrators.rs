//! Time-stepping maps on `so(3)*` and `T*SO(3)`.
//!
//! The geometric steppers all go through one implicit solve. A map is given
//! by a Lagrangian bisection written in a retraction chart as a graph
//! `π ↦ (η(π), π)`, where `η` is the algebra coordinate and `π` the canonical
//! chart momentum. Given the incoming momentum `μ′` we find the point of the
//! bisection whose spatial momentum `J_L(η, π) = Ad*_{R(η)} A(η)⁻ᵀ π` equals
//! `μ′`, and read off
//!
//! * the outgoing body momentum `μ″ = Ad*_{R(−η)} μ′` (Lie–Poisson map), and
//! * the outgoing group element `g″ = g′ R(η)` (equivariant map on `T*G`).
//!
//! Since `μ″` is a rotation of `μ′`, the Casimir `‖μ‖` is preserved to
//! rounding whatever the Newton residual, and `g″ μ″ = g′ μ′` makes the
//! spatial momentum exactly conserved in the same sense.
//!
//! The non-geometric baselines are forward Euler on the reduced equations and
//! an embedded Dormand–Prince 5(4) integrator acting on `(g, μ)` as a raw
//! 12-vector.

use nalgebra::SVector;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hj_series::{GenSeries, SeriesSlice};
use crate::lie_so3::{hat, AlgebraVector, Mat3, Momentum, Retraction, Rotation, Vec3};
use crate::phase_space::{reduced_vector_field, PhasePoint, ReducedHamiltonian};

/// Settings for the implicit solve inside each geometric step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NewtonConfig {
    /// Residual tolerance, scaled by `max(1, ‖μ‖)`.
    pub tol: f64,
    pub max_iter: usize,
    /// Backtracking factor applied when a full Newton step does not reduce
    /// the residual.
    pub damping: f64,
}

impl Default for NewtonConfig {
    fn default() -> Self {
        Self {
            tol: 1e-12,
            max_iter: 50,
            damping: 0.5,
        }
    }
}

impl NewtonConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) {
            return Err(Error::Config(format!("newton tol must be positive, got {}", self.tol)));
        }
        if self.max_iter == 0 {
            return Err(Error::Config("newton max_iter must be at least 1".into()));
        }
        if !(self.damping > 0.0 && self.damping < 1.0) {
            return Err(Error::Config(format!("newton damping must lie in (0, 1), got {}", self.damping)));
        }
        Ok(())
    }
}

/// A Lagrangian bisection in graph form `π ↦ (η(π), π)` over a retraction
/// chart.
pub trait Bisection {
    fn retraction(&self) -> Retraction;
    fn eta(&self, pi: &Vec3) -> AlgebraVector;
    fn eta_jacobian(&self, pi: &Vec3) -> Mat3;
}

/// The bisection generated by a truncated Hamilton–Jacobi series at a fixed
/// step: `η(π) = −∇S(Δt, π)`.
#[derive(Debug, Clone)]
pub struct SeriesBisection {
    slice: SeriesSlice,
}

impl SeriesBisection {
    pub fn new(series: &GenSeries, dt: f64) -> Self {
        Self {
            slice: series.at_time(dt),
        }
    }

    pub fn dt(&self) -> f64 {
        self.slice.dt
    }
}

impl Bisection for SeriesBisection {
    fn retraction(&self) -> Retraction {
        self.slice.retraction
    }

    fn eta(&self, pi: &Vec3) -> AlgebraVector {
        -self.slice.gradient(pi)
    }

    fn eta_jacobian(&self, pi: &Vec3) -> Mat3 {
        -self.slice.hessian(pi)
    }
}

/// Solution of the implicit equation for one step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BisectionPoint {
    pub eta: AlgebraVector,
    pub pi: Vec3,
    pub iterations: usize,
    pub residual: f64,
}

const MAX_BACKTRACKS: usize = 40;

/// Finds the point of `b` whose spatial momentum equals `mu_in`.
pub fn solve_bisection<B: Bisection + ?Sized>(b: &B, mu_in: &Momentum, cfg: &NewtonConfig) -> Result<BisectionPoint> {
    let retraction = b.retraction();
    let tol = cfg.tol * mu_in.norm().max(1.0);
    let residual_at = |pi: &Vec3| -> (Vec3, AlgebraVector) {
        let eta = b.eta(pi);
        (retraction.spatial_momentum(&eta, pi) - mu_in, eta)
    };

    let mut pi = *mu_in;
    let (mut f, mut eta) = residual_at(&pi);
    let mut r = f.norm();
    if !r.is_finite() {
        return Err(Error::StepFailure { step: None, residual: r, iterations: 0 });
    }
    for it in 0..cfg.max_iter {
        if r <= tol {
            return Ok(BisectionPoint { eta, pi, iterations: it, residual: r });
        }
        let (d_eta, d_pi) = retraction.spatial_momentum_jacobians(&eta, &pi);
        let jac = d_pi + d_eta * b.eta_jacobian(&pi);
        let delta = jac
            .lu()
            .solve(&(-f))
            .ok_or(Error::StepFailure { step: None, residual: r, iterations: it })?;

        let mut lambda = 1.0;
        let mut accepted = false;
        for _ in 0..MAX_BACKTRACKS {
            let trial = pi + lambda * delta;
            let (f_try, eta_try) = residual_at(&trial);
            let r_try = f_try.norm();
            if r_try.is_finite() && r_try < r {
                pi = trial;
                f = f_try;
                eta = eta_try;
                r = r_try;
                accepted = true;
                break;
            }
            lambda *= cfg.damping;
        }
        if !accepted {
            // Stalled at the rounding floor or on a genuinely bad step.
            if r <= tol {
                break;
            }
            return Err(Error::StepFailure { step: None, residual: r, iterations: it + 1 });
        }
    }
    if r <= tol {
        Ok(BisectionPoint { eta, pi, iterations: cfg.max_iter, residual: r })
    } else {
        Err(Error::StepFailure { step: None, residual: r, iterations: cfg.max_iter })
    }
}

/// Lie–Poisson map induced by a bisection: `μ′ ↦ Ad*_{R(−η)} μ′`.
pub fn poisson_map<B: Bisection + ?Sized>(b: &B, mu: &Momentum, cfg: &NewtonConfig) -> Result<Momentum> {
    let sol = solve_bisection(b, mu, cfg)?;
    Ok(b.retraction().retract(&(-sol.eta)).apply(mu))
}

/// Equivariant map on `T*SO(3)` induced by a bisection.
pub fn equivariant_map<B: Bisection + ?Sized>(b: &B, z: &PhasePoint, cfg: &NewtonConfig) -> Result<PhasePoint> {
    // Translating the pair back by g′⁻¹ puts the incoming point at (I, μ′),
    // whose spatial momentum is μ′ itself; the reduced solve is shared with
    // the Lie–Poisson map and only g′ is carried along.
    let sol = solve_bisection(b, &z.mu, cfg)?;
    let rot = b.retraction().retract(&sol.eta);
    Ok(PhasePoint {
        g: z.g.compose(&rot),
        mu: rot.inverse().apply(&z.mu),
    })
}

/// One step of the reduced integrator generated by `series`.
pub fn poisson_step(series: &GenSeries, dt: f64, mu: &Momentum, cfg: &NewtonConfig) -> Result<Momentum> {
    poisson_map(&SeriesBisection::new(series, dt), mu, cfg)
}

/// One step of the equivariant integrator on `T*SO(3)` generated by `series`.
pub fn reconstruct_step(series: &GenSeries, dt: f64, z: &PhasePoint, cfg: &NewtonConfig) -> Result<PhasePoint> {
    equivariant_map(&SeriesBisection::new(series, dt), z, cfg)
}

/// Sampled trajectory of any state type.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory<S> {
    pub times: Vec<f64>,
    pub states: Vec<S>,
    pub metadata: TrajectoryMetadata,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryMetadata {
    pub integrator: String,
    pub dt: Option<f64>,
    pub order: Option<usize>,
    pub retraction: Option<Retraction>,
    pub seed: Option<u64>,
    pub inertia: Option<[f64; 3]>,
    pub rtol: Option<f64>,
    pub atol: Option<f64>,
}

impl TrajectoryMetadata {
    pub fn named(integrator: impl Into<String>) -> Self {
        Self {
            integrator: integrator.into(),
            ..Default::default()
        }
    }
}

impl<S> Trajectory<S> {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn last(&self) -> Option<&S> {
        self.states.last()
    }

    /// Checks the structural invariants: equal lengths, strictly increasing
    /// times.
    pub fn validate(&self) -> Result<()> {
        if self.times.len() != self.states.len() {
            return Err(Error::InvalidInput(format!(
                "trajectory has {} times but {} states",
                self.times.len(),
                self.states.len()
            )));
        }
        if self.times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidInput("trajectory times are not strictly increasing".into()));
        }
        Ok(())
    }
}

/// Iterates `step` from `z0`, recording every state. Failures carry the index
/// of the step that failed.
pub fn run_trajectory<S: Clone>(
    step: impl FnMut(&S) -> Result<S>,
    z0: S,
    dt: f64,
    n_steps: usize,
    metadata: TrajectoryMetadata,
) -> Result<Trajectory<S>> {
    run_trajectory_with(step, z0, dt, n_steps, metadata, |_, _| {})
}

/// Like [`run_trajectory`], calling `hook(k, state)` after each state is
/// recorded (including the initial one, `k = 0`).
pub fn run_trajectory_with<S: Clone>(
    mut step: impl FnMut(&S) -> Result<S>,
    z0: S,
    dt: f64,
    n_steps: usize,
    mut metadata: TrajectoryMetadata,
    mut hook: impl FnMut(usize, &S),
) -> Result<Trajectory<S>> {
    if n_steps > 0 && !(dt > 0.0) {
        return Err(Error::InvalidInput(format!("step size must be positive, got {dt}")));
    }
    metadata.dt.get_or_insert(dt);
    let mut times = Vec::with_capacity(n_steps + 1);
    let mut states = Vec::with_capacity(n_steps + 1);
    times.push(0.0);
    hook(0, &z0);
    states.push(z0);
    for k in 1..=n_steps {
        let next = step(&states[k - 1]).map_err(|e| e.at_step(k))?;
        hook(k, &next);
        states.push(next);
        times.push(k as f64 * dt);
    }
    Ok(Trajectory { times, states, metadata })
}

/// Equivariant trajectory of the order-`K` series integrator.
pub fn integrate_series(
    series: &GenSeries,
    z0: PhasePoint,
    dt: f64,
    n_steps: usize,
    cfg: &NewtonConfig,
) -> Result<Trajectory<PhasePoint>> {
    let b = SeriesBisection::new(series, dt);
    let meta = series_metadata(series, dt);
    run_trajectory(|z| equivariant_map(&b, z, cfg), z0, dt, n_steps, meta)
}

/// Reduced trajectory of the order-`K` series integrator.
pub fn integrate_series_reduced(
    series: &GenSeries,
    mu0: Momentum,
    dt: f64,
    n_steps: usize,
    cfg: &NewtonConfig,
) -> Result<Trajectory<Momentum>> {
    let b = SeriesBisection::new(series, dt);
    let meta = series_metadata(series, dt);
    run_trajectory(|mu| poisson_map(&b, mu, cfg), mu0, dt, n_steps, meta)
}

fn series_metadata(series: &GenSeries, dt: f64) -> TrajectoryMetadata {
    TrajectoryMetadata {
        integrator: format!("hj-series-{}", series.order),
        dt: Some(dt),
        order: Some(series.order),
        retraction: Some(series.retraction),
        ..Default::default()
    }
}

/// Forward Euler on the Lie–Poisson equations.
pub fn euler_reduced(h: &ReducedHamiltonian, mu0: Momentum, dt: f64, n_steps: usize) -> Trajectory<Momentum> {
    let meta = TrajectoryMetadata {
        integrator: "forward-euler".into(),
        dt: Some(dt),
        inertia: Some(h.params.inertia),
        ..Default::default()
    };
    run_trajectory(|mu| Ok(euler_step(h, mu, dt)), mu0, dt, n_steps, meta).expect("forward Euler cannot fail")
}

pub fn euler_step(h: &ReducedHamiltonian, mu: &Momentum, dt: f64) -> Momentum {
    mu + dt * reduced_vector_field(h, mu)
}

/// Settings for the adaptive Dormand–Prince solver.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdaptiveConfig {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
}

impl AdaptiveConfig {
    pub fn new(rtol: f64, atol: f64) -> Self {
        Self { rtol, atol, max_steps: 10_000_000 }
    }
}

// Dormand–Prince 5(4) tableau.
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
// Dense output (Hairer & Wanner's contd5 coefficients).
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

fn rms_scaled<const N: usize>(v: &SVector<f64, N>, y0: &SVector<f64, N>, y1: &SVector<f64, N>, cfg: &AdaptiveConfig) -> f64 {
    let mut acc = 0.0;
    for i in 0..N {
        let sc = cfg.atol + cfg.rtol * y0[i].abs().max(y1[i].abs());
        acc += (v[i] / sc).powi(2);
    }
    (acc / N as f64).sqrt()
}

/// Adaptive Dormand–Prince 5(4) integration of `y' = f(y)` with dense output
/// at the requested (non-decreasing, ≥ 0) output times.
pub fn dopri5<const N: usize>(
    f: impl Fn(&SVector<f64, N>) -> SVector<f64, N>,
    y0: SVector<f64, N>,
    output_times: &[f64],
    cfg: &AdaptiveConfig,
) -> Result<Vec<SVector<f64, N>>> {
    if !(cfg.rtol > 0.0 && cfg.atol >= 0.0) {
        return Err(Error::Config(format!("invalid tolerances rtol={} atol={}", cfg.rtol, cfg.atol)));
    }
    if output_times.windows(2).any(|w| w[1] < w[0]) || output_times.first().is_some_and(|t| *t < 0.0) {
        return Err(Error::InvalidInput("output times must be non-negative and non-decreasing".into()));
    }
    let mut out = Vec::with_capacity(output_times.len());
    let t_end = output_times.last().copied().unwrap_or(0.0);
    let mut next_out = 0;
    while next_out < output_times.len() && output_times[next_out] == 0.0 {
        out.push(y0);
        next_out += 1;
    }
    if next_out == output_times.len() {
        return Ok(out);
    }

    let mut t: f64 = 0.0;
    let mut y = y0;
    let mut k1 = f(&y);
    let mut h = initial_step(&f, &y, &k1, cfg, t_end);
    let mut steps = 0usize;
    let mut last_rejected = false;

    while next_out < output_times.len() {
        steps += 1;
        if steps > cfg.max_steps {
            return Err(Error::StepFailure { step: Some(steps), residual: f64::NAN, iterations: steps });
        }
        if h < 1e-14 * t.abs().max(1.0) {
            return Err(Error::StepFailure { step: Some(steps), residual: h, iterations: steps });
        }
        if t + h > t_end {
            h = t_end - t;
        }
        let k2 = f(&(y + h * (A21 * k1)));
        let k3 = f(&(y + h * (A31 * k1 + A32 * k2)));
        let k4 = f(&(y + h * (A41 * k1 + A42 * k2 + A43 * k3)));
        let k5 = f(&(y + h * (A51 * k1 + A52 * k2 + A53 * k3 + A54 * k4)));
        let k6 = f(&(y + h * (A61 * k1 + A62 * k2 + A63 * k3 + A64 * k4 + A65 * k5)));
        let y1 = y + h * (A71 * k1 + A73 * k3 + A74 * k4 + A75 * k5 + A76 * k6);
        let k7 = f(&y1);
        let err_vec = h * (E1 * k1 + E3 * k3 + E4 * k4 + E5 * k5 + E6 * k6 + E7 * k7);
        let err = rms_scaled(&err_vec, &y, &y1, cfg);
        if !err.is_finite() {
            h *= 0.2;
            last_rejected = true;
            continue;
        }

        if err <= 1.0 {
            let t1 = if t + h >= t_end { t_end } else { t + h };
            // Dense output on [t, t1].
            if output_times[next_out] <= t1 {
                let ydiff = y1 - y;
                let bspl = h * k1 - ydiff;
                let r4 = ydiff - h * k7 - bspl;
                let r5 = h * (D1 * k1 + D3 * k3 + D4 * k4 + D5 * k5 + D6 * k6 + D7 * k7);
                while next_out < output_times.len() && output_times[next_out] <= t1 {
                    let to = output_times[next_out];
                    if to == t1 {
                        out.push(y1);
                    } else {
                        let th = (to - t) / h;
                        let th1 = 1.0 - th;
                        out.push(y + th * (ydiff + th1 * (bspl + th * (r4 + th1 * r5))));
                    }
                    next_out += 1;
                }
            }
            t = t1;
            y = y1;
            k1 = k7;
            let mut fac = 0.9 * err.max(1e-10).powf(-0.2);
            fac = fac.clamp(0.2, 10.0);
            if last_rejected {
                fac = fac.min(1.0);
            }
            h *= fac;
            last_rejected = false;
        } else {
            h *= (0.9 * err.powf(-0.2)).max(0.2);
            last_rejected = true;
        }
    }
    Ok(out)
}

fn initial_step<const N: usize>(
    f: &impl Fn(&SVector<f64, N>) -> SVector<f64, N>,
    y0: &SVector<f64, N>,
    f0: &SVector<f64, N>,
    cfg: &AdaptiveConfig,
    t_end: f64,
) -> f64 {
    let d0 = rms_scaled(y0, y0, y0, cfg);
    let d1 = rms_scaled(f0, y0, y0, cfg);
    let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    let h0 = h0.min(t_end);
    let y1 = y0 + h0 * f0;
    let f1 = f(&y1);
    let d2 = rms_scaled(&(f1 - f0), y0, y0, cfg) / h0;
    let h1 = if d1.max(d2) <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / d1.max(d2)).powf(0.2)
    };
    (100.0 * h0).min(h1).min(t_end).max(1e-12)
}

fn embedded_field(h: &ReducedHamiltonian, y: &SVector<f64, 12>) -> SVector<f64, 12> {
    let g = Mat3::from_row_slice(&y.as_slice()[..9]);
    let mu = Vec3::new(y[9], y[10], y[11]);
    let omega = h.gradient(&mu);
    let g_dot = g * hat(&omega);
    let mu_dot = mu.cross(&omega);
    let mut out = SVector::<f64, 12>::zeros();
    for r in 0..3 {
        for c in 0..3 {
            out[3 * r + c] = g_dot[(r, c)];
        }
    }
    out[9] = mu_dot[0];
    out[10] = mu_dot[1];
    out[11] = mu_dot[2];
    out
}

/// Dormand–Prince integration of the full equations with `(g, μ)` treated as
/// a plain 12-vector. No projection back onto SO(3) is performed, so the
/// returned rotations drift off the group at the solver's error level.
pub fn rk45_embedded(
    h: &ReducedHamiltonian,
    z0: &PhasePoint,
    output_times: &[f64],
    cfg: &AdaptiveConfig,
) -> Result<Trajectory<PhasePoint>> {
    let y0 = SVector::<f64, 12>::from_row_slice(&z0.embedding());
    let ys = dopri5(|y| embedded_field(h, y), y0, output_times, cfg)?;
    let states = ys
        .iter()
        .map(|y| PhasePoint {
            g: Rotation::from_row_major_unchecked(&y.as_slice()[..9]),
            mu: Vec3::new(y[9], y[10], y[11]),
        })
        .collect();
    Ok(Trajectory {
        times: output_times.to_vec(),
        states,
        metadata: TrajectoryMetadata {
            integrator: "rk45-embedded".into(),
            inertia: Some(h.params.inertia),
            rtol: Some(cfg.rtol),
            atol: Some(cfg.atol),
            ..Default::default()
        },
    })
}

/// Tight-tolerance reference solution of the Lie–Poisson equations.
pub fn reference_reduced(
    h: &ReducedHamiltonian,
    mu0: &Momentum,
    output_times: &[f64],
    cfg: &AdaptiveConfig,
) -> Result<Trajectory<Momentum>> {
    let states = dopri5(|mu| reduced_vector_field(h, mu), *mu0, output_times, cfg)?;
    Ok(Trajectory {
        times: output_times.to_vec(),
        states,
        metadata: TrajectoryMetadata {
            integrator: "dopri5-reduced".into(),
            inertia: Some(h.params.inertia),
            rtol: Some(cfg.rtol),
            atol: Some(cfg.atol),
            ..Default::default()
        },
    })
}

/// `k·dt` for `k = 0..=n`.
pub fn uniform_times(dt: f64, n: usize) -> Vec<f64> {
    (0..=n).map(|k| k as f64 * dt).collect()
}
