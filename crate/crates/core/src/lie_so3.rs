//! Exact SO(3) / so(3) kernel.
//!
//! Algebra elements and momenta are plain 3-vectors under the hat map
//! `hat(v)·w = v × w`. The coadjoint action of a rotation on so(3)* is
//! `Ad*_g μ = g·μ`, which fixes the sign convention used everywhere else:
//! `d/dt|₀ Ad*_{cay(tξ)} μ = ξ × μ`.
//!
//! Two retractions are provided. The scaled Cayley map
//! `cay(v) = (I − hat(v)/2)⁻¹ (I + hat(v)/2)` is the default; it agrees with
//! `exp` to second order and has polynomial left-trivialized differentials,
//! which the generating-function machinery relies on.

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Vec3 = Vector3<f64>;
pub type Mat3 = Matrix3<f64>;

/// Element of so(3) in vector form (also Cayley / exponential chart coordinates).
pub type AlgebraVector = Vec3;

/// Element of so(3)* (body angular momentum). Its norm is the Casimir.
pub type Momentum = Vec3;

/// Tolerance on skew-symmetry accepted by [`vee`].
pub const SKEW_TOL: f64 = 1e-12;

/// `cay_inv` refuses rotations with `1 + trace(g)` below this value.
pub const CAYLEY_TRACE_TOL: f64 = 1e-9;

/// `log_so3` refuses rotations whose angle is within this distance of π.
pub const LOG_PI_MARGIN: f64 = 1e-6;

pub fn hat(v: &Vec3) -> Mat3 {
    Mat3::new(0.0, -v.z, v.y, v.z, 0.0, -v.x, -v.y, v.x, 0.0)
}

/// Inverse of [`hat`]; rejects matrices that are not skew-symmetric.
pub fn vee(s: &Mat3) -> Result<Vec3> {
    let asym = (s + s.transpose()).norm();
    if asym > SKEW_TOL {
        return Err(Error::InvalidInput(format!(
            "vee: matrix is not skew-symmetric (‖S + Sᵀ‖ = {asym:.3e})"
        )));
    }
    Ok(vee_unchecked(s))
}

/// Reads the axial vector of the skew part without validation.
fn vee_unchecked(s: &Mat3) -> Vec3 {
    Vec3::new(s[(2, 1)], s[(0, 2)], s[(1, 0)])
}

/// Axial vector of `m − mᵀ`.
fn skew_axial(m: &Mat3) -> Vec3 {
    Vec3::new(
        m[(2, 1)] - m[(1, 2)],
        m[(0, 2)] - m[(2, 0)],
        m[(1, 0)] - m[(0, 1)],
    )
}

/// A 3×3 special-orthogonal matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Rotation(Mat3);

impl Rotation {
    pub fn identity() -> Self {
        Rotation(Mat3::identity())
    }

    /// Wraps a matrix that the caller guarantees is a rotation.
    pub fn from_matrix_unchecked(m: Mat3) -> Self {
        Rotation(m)
    }

    /// Wraps `m` after checking orthogonality and orientation to `tol`.
    pub fn try_from_matrix(m: Mat3, tol: f64) -> Result<Self> {
        let r = Rotation(m);
        let orth = r.orthogonality_error();
        let det = m.determinant();
        if !(orth <= tol && (det - 1.0).abs() <= tol) {
            return Err(Error::InvalidInput(format!(
                "not a rotation: ‖mᵀm − I‖ = {orth:.3e}, det = {det}"
            )));
        }
        Ok(r)
    }

    /// Nearest rotation to an arbitrary matrix (orthogonal polar factor).
    ///
    /// Uses the Newton iteration `X ← (X + X⁻ᵀ)/2`, which converges to the
    /// polar factor for any non-singular input; when `det(m) ≤ 0` the polar
    /// factor is not in SO(3) and the SVD-based projection is used instead.
    pub fn project(m: &Mat3) -> Self {
        if m.determinant() > 1e-8 {
            if let Some(r) = polar_newton(m) {
                return Rotation(r);
            }
        }
        let svd = m.svd(true, true);
        let (u, vt) = (svd.u.unwrap(), svd.v_t.unwrap());
        let mut d = Mat3::identity();
        if (u * vt).determinant() < 0.0 {
            d[(2, 2)] = -1.0;
        }
        Rotation(u * d * vt)
    }

    pub fn matrix(&self) -> &Mat3 {
        &self.0
    }

    pub fn inverse(&self) -> Self {
        Rotation(self.0.transpose())
    }

    pub fn compose(&self, other: &Rotation) -> Self {
        Rotation(self.0 * other.0)
    }

    pub fn apply(&self, v: &Vec3) -> Vec3 {
        self.0 * v
    }

    /// Frobenius norm of `mᵀm − I`.
    pub fn orthogonality_error(&self) -> f64 {
        (self.0.transpose() * self.0 - Mat3::identity()).norm()
    }

    pub fn determinant(&self) -> f64 {
        self.0.determinant()
    }

    /// Rotation angle in `[0, π]`.
    pub fn angle(&self) -> f64 {
        let s = 0.5 * skew_axial(&self.0).norm();
        let c = 0.5 * (self.0.trace() - 1.0);
        s.atan2(c)
    }

    /// Removes accumulated floating-point drift (polar projection).
    pub fn reorthonormalize(&self) -> Self {
        Rotation::project(&self.0)
    }

    /// Entries in row-major order.
    pub fn to_row_major(&self) -> [f64; 9] {
        let m = &self.0;
        [
            m[(0, 0)],
            m[(0, 1)],
            m[(0, 2)],
            m[(1, 0)],
            m[(1, 1)],
            m[(1, 2)],
            m[(2, 0)],
            m[(2, 1)],
            m[(2, 2)],
        ]
    }

    pub fn from_row_major_unchecked(e: &[f64]) -> Self {
        Rotation(Mat3::from_row_slice(&e[..9]))
    }
}

impl std::ops::Mul for Rotation {
    type Output = Rotation;
    fn mul(self, rhs: Rotation) -> Rotation {
        self.compose(&rhs)
    }
}

fn polar_newton(m: &Mat3) -> Option<Mat3> {
    let mut x = *m;
    for _ in 0..60 {
        let inv_t = x.try_inverse()?.transpose();
        let next = 0.5 * (x + inv_t);
        let delta = (next - x).norm();
        x = next;
        if delta < 1e-15 {
            break;
        }
    }
    // One more sweep at the fixed point polishes the last ulp.
    let inv_t = x.try_inverse()?.transpose();
    Some(0.5 * (x + inv_t))
}

/// Scaled Cayley map `(I − hat(v)/2)⁻¹ (I + hat(v)/2)`, in closed form.
pub fn cay(v: &AlgebraVector) -> Rotation {
    let x = hat(v);
    let s = v.norm_squared();
    // (I − X/2)⁻¹ = (I + X/2 + v vᵀ/4) / (1 + |v|²/4)
    let left = (Mat3::identity() + 0.5 * x + 0.25 * v * v.transpose()) / (1.0 + 0.25 * s);
    Rotation(left * (Mat3::identity() + 0.5 * x))
}

/// Inverse Cayley map: `2·vee(g − gᵀ) / (1 + trace g)`.
pub fn cay_inv(g: &Rotation) -> Result<AlgebraVector> {
    let denom = 1.0 + g.0.trace();
    if denom <= CAYLEY_TRACE_TOL {
        return Err(Error::ChartSingularity { angle: g.angle() });
    }
    Ok(2.0 * skew_axial(&g.0) / denom)
}

/// Rodrigues formula.
pub fn exp_so3(v: &AlgebraVector) -> Rotation {
    let theta2 = v.norm_squared();
    let theta = theta2.sqrt();
    let x = hat(v);
    let (a, b) = if theta < 1e-4 {
        (1.0 - theta2 / 6.0, 0.5 - theta2 / 24.0)
    } else {
        (theta.sin() / theta, (1.0 - theta.cos()) / theta2)
    };
    Rotation(Mat3::identity() + a * x + b * x * x)
}

pub fn log_so3(g: &Rotation) -> Result<AlgebraVector> {
    let theta = g.angle();
    if std::f64::consts::PI - theta < LOG_PI_MARGIN {
        return Err(Error::ChartSingularity { angle: theta });
    }
    let factor = if theta < 1e-4 {
        0.5 * (1.0 + theta * theta / 6.0)
    } else {
        0.5 * theta / theta.sin()
    };
    Ok(factor * skew_axial(&g.0))
}

/// `Ad*_g μ = g·μ`.
pub fn coadjoint(g: &Rotation, mu: &Momentum) -> Momentum {
    g.0 * mu
}

/// Left-trivialized differential of [`cay`]: the matrix `A(v)` with
/// `cay(v)⁻¹ · Dcay(v)[w] = hat(A(v)·w)`.
pub fn cay_dtriv(v: &AlgebraVector) -> Mat3 {
    (Mat3::identity() - 0.5 * hat(v)) / (1.0 + 0.25 * v.norm_squared())
}

/// Left-trivialized differential of [`exp_so3`] (the right Jacobian).
pub fn exp_dtriv(v: &AlgebraVector) -> Mat3 {
    let theta2 = v.norm_squared();
    let theta = theta2.sqrt();
    let x = hat(v);
    let (a, b) = if theta < 1e-4 {
        (0.5 - theta2 / 24.0, 1.0 / 6.0 - theta2 / 120.0)
    } else {
        (
            (1.0 - theta.cos()) / theta2,
            (theta - theta.sin()) / (theta2 * theta),
        )
    };
    Mat3::identity() - a * x + b * x * x
}

/// Bernoulli numbers B₂, B₄, …, B₂₀.
const BERNOULLI_EVEN: [f64; 10] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
];

/// Taylor coefficients `c_n` of `c(s) = Σ c_n sⁿ`, where
/// `c(θ²) = (1 − (θ/2)·cot(θ/2)) / θ²` is the `hat(ξ)²` coefficient of the
/// inverse exponential differential.
pub fn exp_inverse_dtriv_coefficients() -> Vec<f64> {
    let mut factorial = 1.0;
    let mut out = Vec::with_capacity(BERNOULLI_EVEN.len());
    for (i, b) in BERNOULLI_EVEN.iter().enumerate() {
        let n = i + 1;
        factorial *= ((2 * n - 1) * (2 * n)) as f64;
        let sign = if n % 2 == 1 { 1.0 } else { -1.0 };
        out.push(sign * b / factorial);
    }
    out
}

/// `c(s)` and `c'(s)` for the exponential retraction.
fn exp_quadratic_coeff(s: f64) -> (f64, f64) {
    if s < 0.25 {
        let coeffs = exp_inverse_dtriv_coefficients();
        let mut c = 0.0;
        let mut dc = 0.0;
        for (n, cn) in coeffs.iter().enumerate().rev() {
            c = c * s + cn;
            if n > 0 {
                dc = dc * s + n as f64 * cn;
            }
        }
        (c, dc)
    } else {
        let theta = s.sqrt();
        let half = 0.5 * theta;
        let cot = half.cos() / half.sin();
        let csc2 = 1.0 / (half.sin() * half.sin());
        let c = 1.0 / s - cot / (2.0 * theta);
        let dc = -1.0 / (s * s) + (theta * csc2 + 2.0 * cot) / (8.0 * theta * s);
        (c, dc)
    }
}

/// Choice of retraction so(3) → SO(3) used for chart coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Retraction {
    #[default]
    Cayley,
    Exp,
}

impl Retraction {
    pub fn retract(&self, v: &AlgebraVector) -> Rotation {
        match self {
            Retraction::Cayley => cay(v),
            Retraction::Exp => exp_so3(v),
        }
    }

    pub fn local(&self, g: &Rotation) -> Result<AlgebraVector> {
        match self {
            Retraction::Cayley => cay_inv(g),
            Retraction::Exp => log_so3(g),
        }
    }

    /// Left-trivialized differential `A(v)`.
    pub fn dtriv(&self, v: &AlgebraVector) -> Mat3 {
        match self {
            Retraction::Cayley => cay_dtriv(v),
            Retraction::Exp => exp_dtriv(v),
        }
    }

    /// Body momentum of the cotangent-chart point `(ξ, π)`: `A(ξ)⁻ᵀ π`.
    ///
    /// This is the inverse of the canonical momentum lift `π = A(ξ)ᵀ μ`.
    /// For Cayley it is the polynomial `π − ξ×π/2 + ξ(ξ·π)/4`; for `exp`
    /// it is `π − ξ×π/2 + c(|ξ|²)·ξ×(ξ×π)`.
    pub fn body_momentum(&self, xi: &AlgebraVector, pi: &Vec3) -> Momentum {
        match self {
            Retraction::Cayley => pi - 0.5 * xi.cross(pi) + 0.25 * xi.dot(pi) * xi,
            Retraction::Exp => {
                let (c, _) = exp_quadratic_coeff(xi.norm_squared());
                pi - 0.5 * xi.cross(pi) + c * xi.cross(&xi.cross(pi))
            }
        }
    }

    /// Jacobians of [`Retraction::body_momentum`] with respect to `ξ` and `π`.
    pub fn body_momentum_jacobians(&self, xi: &AlgebraVector, pi: &Vec3) -> (Mat3, Mat3) {
        let xp = xi.dot(pi);
        match self {
            Retraction::Cayley => {
                let d_xi = 0.5 * hat(pi) + 0.25 * xp * Mat3::identity() + 0.25 * xi * pi.transpose();
                let d_pi = Mat3::identity() - 0.5 * hat(xi) + 0.25 * xi * xi.transpose();
                (d_xi, d_pi)
            }
            Retraction::Exp => {
                let s = xi.norm_squared();
                let (c, dc) = exp_quadratic_coeff(s);
                let double_cross = xi * xp - s * pi;
                let d_xi = 0.5 * hat(pi)
                    + c * (xp * Mat3::identity() + xi * pi.transpose() - 2.0 * pi * xi.transpose())
                    + 2.0 * dc * double_cross * xi.transpose();
                let d_pi = Mat3::identity() - 0.5 * hat(xi)
                    + c * (xi * xi.transpose() - s * Mat3::identity());
                (d_xi, d_pi)
            }
        }
    }

    /// Spatial momentum of the chart point `(ξ, π)`: `retract(ξ)·A(ξ)⁻ᵀ π`,
    /// which equals `A(−ξ)⁻ᵀ π`.
    pub fn spatial_momentum(&self, xi: &AlgebraVector, pi: &Vec3) -> Momentum {
        self.body_momentum(&(-xi), pi)
    }

    /// Jacobians of [`Retraction::spatial_momentum`] with respect to `ξ` and `π`.
    pub fn spatial_momentum_jacobians(&self, xi: &AlgebraVector, pi: &Vec3) -> (Mat3, Mat3) {
        let (d_xi, d_pi) = self.body_momentum_jacobians(&(-xi), pi);
        (-d_xi, d_pi)
    }
}

impl std::fmt::Display for Retraction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Retraction::Cayley => write!(f, "cayley"),
            Retraction::Exp => write!(f, "exp"),
        }
    }
}

impl std::str::FromStr for Retraction {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cayley" => Ok(Retraction::Cayley),
            "exp" => Ok(Retraction::Exp),
            other => Err(Error::Config(format!("unsupported retraction '{other}'"))),
        }
    }
}
