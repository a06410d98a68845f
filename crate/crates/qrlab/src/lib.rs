//! Desk-scale laboratory for optimal quantum-error-correction recovery.
//!
//! The crate is organised in five layers:
//!
//! - [`qlinalg`]: dense complex operators, Hermitian eigendecomposition,
//!   matrix functions and state-distance functionals,
//! - [`codes`]: Pauli strings, CSS/stabiliser codes and the joint
//!   syndrome/logical-class statistics of Pauli noise,
//! - [`channels`]: quantum channels in Kraus and Choi form, with the noise
//!   families studied here (Pauli, amplitude damping, rotation mixtures),
//! - [`recovery`]: recovery channels (Petz, syndrome measurement plus
//!   sampling/ML decoders, SDP-optimal) and structural factorisation checks,
//! - [`diagnostics`]: entanglement fidelity, environment states, mutual
//!   trace distance, coherent-information decrease and bound certification.

pub mod channels;
pub mod codes;
pub mod diagnostics;
pub mod error;
pub mod qlinalg;
pub mod recovery;

pub use error::{Error, Result};
