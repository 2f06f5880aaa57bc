//! Naimark extensions of rank-one Weyl–Heisenberg covariant POVMs.
//!
//! A fiducial `|φ⟩` generates the POVM `E_jk = |φ_jk⟩⟨φ_jk|/d` with
//! `|φ_jk⟩ = X^j Z^k |φ⟩`. Completing `⟨φ|` to a `d × d` unitary `M` fixes a
//! `d² × d²` unitary `U` that realizes the POVM as a computational-basis
//! measurement on `|ψ⟩ ⊗ |0⟩`. Two routes to `U` are provided and checked
//! against each other:
//!
//! - [`block`]: block-circulant assembly and its Fourier block diagonalization;
//! - [`bell`]: ancilla preparation `Mᵀ` followed by a generalized Bell rotation.
//!
//! [`circuit`] breaks the Bell route into one- and two-qubit gates when
//! `d = 2^n`, and [`simulate`] computes outcome statistics and inverts them.
//!
//! Everything is generic over the real scalar ([`Real`], implemented for `f32`
//! and `f64`); the unsuffixed aliases below fix it to `f64`.

pub mod bell;
pub mod block;
pub mod circuit;
pub mod error;
pub mod fiducials;
pub mod io;
pub mod linalg;
pub mod random;
pub mod scalar;
pub mod simulate;
pub mod wh;

pub use error::{NaimarkError, Result};
pub use scalar::{Real, C};
pub use wh::WhIndex;

pub type ComplexMatrix = linalg::Matrix<f64>;
pub type ComplexMatrix32 = linalg::Matrix<f32>;
pub type Ket = linalg::Ket<f64>;
pub type Ket32 = linalg::Ket<f32>;
pub type Fiducial = fiducials::Fiducial<f64>;
pub type WhFrame = fiducials::WhFrame<f64>;
pub type NaimarkExtension = block::NaimarkExtension<f64>;
pub type OutcomeDistribution = simulate::OutcomeDistribution<f64>;
pub type DensityMatrix = simulate::DensityMatrix<f64>;
pub type Gate = circuit::Gate<f64>;
pub type GateList = circuit::GateList<f64>;
