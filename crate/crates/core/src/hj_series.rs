//! Truncated generating functions for the reduced Hamilton–Jacobi equation.
//!
//! A time-dependent generating function `S(t, p)` describes a family of
//! Lagrangian bisections of `T*SO(3)` in the canonical cotangent chart of a
//! retraction: the points `(ξ, π) = (∇_p S(t, p), p)`. The chart point has
//! body momentum `J_R = A(ξ)⁻ᵀ π` (see [`Retraction::body_momentum`]), and the
//! family follows the Hamiltonian flow when
//!
//! ```text
//!     ∂S/∂t (t, p) + H( J_R(∇_p S(t, p), p) ) = 0,    S(0, ·) = 0.
//! ```
//!
//! Expanding in `t` with `S = Σ_{k≥1} tᵏ S_k` gives the recurrence
//! `S_k = −(1/k) [t^{k−1}] H(J_R(∇_p S^{(k−1)}, p))`, where `S^{(k−1)}` is the
//! partial sum through `k − 1`. Every `S_k` is an exact polynomial because the
//! rigid-body Hamiltonian is quadratic and the chart momentum is polynomial in
//! `ξ` (Cayley) or a power series in `|ξ|²` (exp). `S_1 = −H` and all
//! even-index coefficients vanish, since inverting a bisection flips the sign
//! of `ξ`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lie_so3::{coadjoint, exp_inverse_dtriv_coefficients, AlgebraVector, Momentum, Retraction, Vec3};
use crate::phase_space::ReducedHamiltonian;
use crate::poly::{series_cross, series_dot, PolyR3, PolyWithDerivatives, TSeries};

/// Highest truncation order the exp-chart coefficient table supports.
pub const MAX_ORDER: usize = 19;

pub const DEFAULT_ORDER: usize = 7;

/// `K(ξ, p) = Ad*_{retract(ξ)} p`: the momentum obtained by rotating `p`
/// with the retraction of `ξ`. The generated step applies it with
/// `ξ = ∇_p S(Δt, p)` to map the incoming momentum to the outgoing one.
pub fn gen_point_momentum(retraction: Retraction, xi: &AlgebraVector, p: &Momentum) -> Momentum {
    coadjoint(&retraction.retract(xi), p)
}

/// Truncated generating function `S(t, p) = Σ_{k=1..K} tᵏ S_k(p)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenSeries {
    pub order: usize,
    pub retraction: Retraction,
    /// `[S₁, …, S_K]`.
    pub coeffs: Vec<PolyR3>,
    /// The reduced Hamiltonian the series was built from.
    pub hamiltonian: PolyR3,
}

/// Chart momentum `J_R(ξ, π)` with series-valued arguments.
fn body_momentum_series(retraction: Retraction, xi: &[TSeries; 3], pi: &[TSeries; 3], order: usize) -> [TSeries; 3] {
    let cross = series_cross(xi, pi);
    match retraction {
        Retraction::Cayley => {
            let xp = series_dot(xi, pi);
            std::array::from_fn(|i| {
                let mut out = pi[i].clone();
                out.add_scaled(&cross[i], -0.5);
                out.add_scaled(&xi[i].mul(&xp), 0.25);
                out
            })
        }
        Retraction::Exp => {
            // c(s) = Σ cₙ sⁿ with s = |ξ|² = O(t²).
            let s = series_dot(xi, xi);
            let coeffs = exp_inverse_dtriv_coefficients();
            let mut c = TSeries::zero(order);
            let mut s_pow = TSeries::constant(PolyR3::constant(1.0), order);
            for cn in coeffs.iter().take(order / 2 + 1) {
                c.add_scaled(&s_pow, *cn);
                s_pow = s_pow.mul(&s);
            }
            let double = series_cross(xi, &cross);
            std::array::from_fn(|i| {
                let mut out = pi[i].clone();
                out.add_scaled(&cross[i], -0.5);
                out.add_scaled(&c.mul(&double[i]), 1.0);
                out
            })
        }
    }
}

/// `ξ(t) = Σ tᵏ ∇S_k` as three series of the given order.
fn gradient_series(coeffs: &[PolyR3], order: usize) -> [TSeries; 3] {
    std::array::from_fn(|i| {
        let mut c = vec![PolyR3::zero()];
        c.extend(coeffs.iter().map(|s| s.derivative(i)));
        c.truncate(order + 1);
        TSeries::from_coeffs(c, order)
    })
}

fn identity_series(order: usize) -> [TSeries; 3] {
    std::array::from_fn(|i| TSeries::constant(PolyR3::variable(i), order))
}

/// `H(J_R(∇_p S, p))` expanded to `t^order` for the given partial sum.
fn hamiltonian_along(hamiltonian: &PolyR3, coeffs: &[PolyR3], retraction: Retraction, order: usize) -> TSeries {
    let xi = gradient_series(coeffs, order);
    let pi = identity_series(order);
    let jr = body_momentum_series(retraction, &xi, &pi, order);
    hamiltonian.compose(&jr)
}

/// Builds the order-`K` series for the rigid body.
pub fn build_series(h: &ReducedHamiltonian, order: usize, retraction: Retraction) -> Result<GenSeries> {
    build_series_poly(&h.as_poly(), order, retraction)
}

/// Builds the order-`K` series for any polynomial reduced Hamiltonian.
pub fn build_series_poly(hamiltonian: &PolyR3, order: usize, retraction: Retraction) -> Result<GenSeries> {
    if order == 0 {
        return Err(Error::Config("series order must be at least 1".into()));
    }
    if order > MAX_ORDER {
        return Err(Error::Config(format!("series order {order} exceeds the supported maximum {MAX_ORDER}")));
    }
    let mut coeffs: Vec<PolyR3> = Vec::with_capacity(order);
    for k in 1..=order {
        let along = hamiltonian_along(hamiltonian, &coeffs, retraction, k - 1);
        coeffs.push(along.coeff(k - 1).scale(-1.0 / k as f64));
    }
    Ok(GenSeries {
        order,
        retraction,
        coeffs,
        hamiltonian: hamiltonian.clone(),
    })
}

impl GenSeries {
    /// `S(t, p)`.
    pub fn eval_s(&self, t: f64, p: &Momentum) -> f64 {
        let mut tk = 1.0;
        let mut acc = 0.0;
        for s in &self.coeffs {
            tk *= t;
            acc += tk * s.eval(p);
        }
        acc
    }

    /// `∇_p S(t, p)`.
    pub fn eval_grad_s(&self, t: f64, p: &Momentum) -> AlgebraVector {
        let mut tk = 1.0;
        let mut acc = Vec3::zeros();
        for s in &self.coeffs {
            tk *= t;
            for i in 0..3 {
                acc[i] += tk * s.derivative(i).eval(p);
            }
        }
        acc
    }

    /// `S(t, ·)` as a single polynomial with derivatives, for stepping at a
    /// fixed time step.
    pub fn at_time(&self, t: f64) -> SeriesSlice {
        let mut poly = PolyR3::zero();
        let mut tk = 1.0;
        for s in &self.coeffs {
            tk *= t;
            poly.add_scaled(s, tk);
        }
        SeriesSlice {
            dt: t,
            retraction: self.retraction,
            poly: PolyWithDerivatives::new(poly),
        }
    }

    /// Pointwise Hamilton–Jacobi residual `∂S/∂t + H(J_R(∇_p S, p))`.
    pub fn residual(&self, t: f64, p: &Momentum) -> f64 {
        let mut ds_dt = 0.0;
        let mut tk = 1.0;
        for (k, s) in self.coeffs.iter().enumerate() {
            ds_dt += (k + 1) as f64 * tk * s.eval(p);
            tk *= t;
        }
        let xi = self.eval_grad_s(t, p);
        let jr = self.retraction.body_momentum(&xi, p);
        ds_dt + self.hamiltonian.eval(&jr)
    }

    /// Coefficients of the residual series through `t^order`; the first
    /// `K` of them vanish up to rounding.
    pub fn residual_series(&self, order: usize) -> TSeries {
        let along = hamiltonian_along(&self.hamiltonian, &self.coeffs, self.retraction, order);
        let mut ds_dt = vec![PolyR3::zero(); order + 1];
        for (k, s) in self.coeffs.iter().enumerate() {
            if k <= order {
                ds_dt[k] = s.scale((k + 1) as f64);
            }
        }
        along.add(&TSeries::from_coeffs(ds_dt, order))
    }
}

/// The generating function frozen at one time step.
#[derive(Debug, Clone)]
pub struct SeriesSlice {
    pub dt: f64,
    pub retraction: Retraction,
    poly: PolyWithDerivatives,
}

impl SeriesSlice {
    pub fn value(&self, p: &Momentum) -> f64 {
        self.poly.value(p)
    }

    pub fn gradient(&self, p: &Momentum) -> Vec3 {
        self.poly.gradient(p)
    }

    pub fn hessian(&self, p: &Momentum) -> crate::lie_so3::Mat3 {
        self.poly.hessian(p)
    }
}
