//! Covariance-matrix calculus for bosonic Gaussian states and channels, with
//! structural classifiers for coherence-breaking channels and the
//! CB ⊆ CQ ⊆ EB ⊆ PPT hierarchy.
//!
//! Units: ħ = 1 with vacuum variance ½ throughout. A state is a pair `(ν, d)` and a
//! channel a triple `(K, M, d̄)` acting as `ν ↦ KνKᵀ + M`, `d ↦ Kd + d̄`.

pub mod audit;
pub mod capacity;
pub mod channels;
pub mod classify;
pub mod error;
pub mod io;
pub mod matcore;
pub mod par;
pub mod phase_space;
pub mod sampling;

pub use channels::GaussianChannel;
pub use error::{Error, Refusal, Result};
pub use matcore::{RealMatrix, SymMatrix, DEFAULT_TOL};
pub use phase_space::GaussianState;
