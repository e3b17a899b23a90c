//! Left-trivialized phase space `T*SO(3) ≅ SO(3) × so(3)*`.
//!
//! A cotangent point is stored as `(g, μ)` with `μ` the body momentum, so
//! `J_R(g, μ) = μ` and `J_L(g, μ) = Ad*_g μ = g·μ`. The lifted left action
//! is `h·(g, μ) = (h·g, μ)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lie_so3::{coadjoint, hat, Mat3, Momentum, Rotation, Vec3};
use crate::poly::PolyR3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhasePoint {
    pub g: Rotation,
    pub mu: Momentum,
}

impl PhasePoint {
    pub fn new(g: Rotation, mu: Momentum) -> Self {
        PhasePoint { g, mu }
    }

    pub fn at_identity(mu: Momentum) -> Self {
        PhasePoint {
            g: Rotation::identity(),
            mu,
        }
    }

    /// Embedding coordinates `(g₁₁, …, g₃₃, μ₁, μ₂, μ₃)`.
    pub fn embedding(&self) -> [f64; 12] {
        let mut out = [0.0; 12];
        out[..9].copy_from_slice(&self.g.to_row_major());
        out[9] = self.mu.x;
        out[10] = self.mu.y;
        out[11] = self.mu.z;
        out
    }
}

/// Spatial momentum map `J_L(g, μ) = g·μ`.
pub fn j_left(z: &PhasePoint) -> Momentum {
    coadjoint(&z.g, &z.mu)
}

/// Body momentum map `J_R(g, μ) = μ`.
pub fn j_right(z: &PhasePoint) -> Momentum {
    z.mu
}

/// Lifted left action `(g, μ) ↦ (h·g, μ)`.
pub fn left_translate(h: &Rotation, z: &PhasePoint) -> PhasePoint {
    PhasePoint {
        g: h.compose(&z.g),
        mu: z.mu,
    }
}

/// Principal moments of inertia of a free rigid body.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RigidBodyParams {
    pub inertia: [f64; 3],
}

impl RigidBodyParams {
    pub fn new(inertia: [f64; 3]) -> Result<Self> {
        if inertia.iter().any(|&i| !(i > 0.0 && i.is_finite())) {
            return Err(Error::Config(format!(
                "inertia must be strictly positive, got {inertia:?}"
            )));
        }
        Ok(RigidBodyParams { inertia })
    }
}

impl Default for RigidBodyParams {
    /// The benchmark body with inertia (1.5, 2, 2.5).
    fn default() -> Self {
        RigidBodyParams {
            inertia: [1.5, 2.0, 2.5],
        }
    }
}

/// `H^red(p) = ½ Σ pᵢ² / Iᵢ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReducedHamiltonian {
    pub params: RigidBodyParams,
}

impl ReducedHamiltonian {
    pub fn new(params: RigidBodyParams) -> Self {
        ReducedHamiltonian { params }
    }

    pub fn rigid_body(inertia: [f64; 3]) -> Result<Self> {
        Ok(ReducedHamiltonian::new(RigidBodyParams::new(inertia)?))
    }

    pub fn value(&self, p: &Momentum) -> f64 {
        let i = &self.params.inertia;
        0.5 * (p.x * p.x / i[0] + p.y * p.y / i[1] + p.z * p.z / i[2])
    }

    pub fn gradient(&self, p: &Momentum) -> Vec3 {
        let i = &self.params.inertia;
        Vec3::new(p.x / i[0], p.y / i[1], p.z / i[2])
    }

    /// Constant Hessian `diag(1/Iᵢ)`.
    pub fn hessian(&self) -> Mat3 {
        let i = &self.params.inertia;
        Mat3::from_diagonal(&Vec3::new(1.0 / i[0], 1.0 / i[1], 1.0 / i[2]))
    }

    /// Value on the full phase space, `H(g, μ) = H^red(J_R(g, μ))`.
    pub fn lifted_value(&self, z: &PhasePoint) -> f64 {
        self.value(&j_right(z))
    }

    /// The Hamiltonian as an exact polynomial in `(p₁, p₂, p₃)`.
    pub fn as_poly(&self) -> PolyR3 {
        let i = &self.params.inertia;
        let mut h = PolyR3::zero();
        h.add_term([2, 0, 0], 0.5 / i[0]);
        h.add_term([0, 2, 0], 0.5 / i[1]);
        h.add_term([0, 0, 2], 0.5 / i[2]);
        h
    }
}

impl Default for ReducedHamiltonian {
    fn default() -> Self {
        ReducedHamiltonian::new(RigidBodyParams::default())
    }
}

/// Lie–Poisson (Euler) equations `μ̇ = μ × ∇H^red(μ)`.
pub fn reduced_vector_field(h: &ReducedHamiltonian, mu: &Momentum) -> Momentum {
    mu.cross(&h.gradient(mu))
}

/// Tangent of the left-trivialized flow at a phase point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseTangent {
    pub g_dot: Mat3,
    pub mu_dot: Vec3,
}

/// Left-trivialized Hamilton equations `ġ = g·hat(∇H(μ))`, `μ̇ = μ × ∇H(μ)`.
pub fn full_vector_field(h: &ReducedHamiltonian, z: &PhasePoint) -> PhaseTangent {
    let omega = h.gradient(&z.mu);
    PhaseTangent {
        g_dot: z.g.matrix() * hat(&omega),
        mu_dot: z.mu.cross(&omega),
    }
}
