//! Structure-preserving learning and integration of Hamiltonian flows on
//! the cotangent bundle of SO(3), with the rigid body as the running example.

pub mod diagnostics;
pub mod error;
pub mod hj_series;
pub mod integrators;
pub mod io;
pub mod learn;
pub mod lie_so3;
pub mod phase_space;
pub mod poly;

pub use error::{Error, Result};
pub use lie_so3::{Retraction, Rotation};
pub use phase_space::{PhasePoint, ReducedHamiltonian, RigidBodyParams};
