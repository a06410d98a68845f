//! Stabiliser/CSS codes as concrete operators: Pauli strings, the code
//! catalogue, codespace and syndrome-sector projectors, and coset
//! statistics of i.i.d. Pauli noise.

mod css;
mod joint;
mod pauli;

pub use css::{build_code, CodeExport, CssCode, PauliRow, SyndromeSet, CATALOGUE};
pub use joint::{joint_distribution, JointDistribution, SiteNoise};
pub use pauli::{PauliString, Phase};
