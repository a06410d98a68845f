use crate::channels::{channel_distance, KrausChannel};
use crate::codes::{CssCode, SyndromeSet};
use crate::error::{Error, Result};

use super::decoder::syndrome_measurement_channel;
use super::petz::petz_for_code;

/// Largest qubit count for the Choi-level factorisation comparison.
const FACTORISATION_QUBIT_CAP: usize = 4;

/// Residual of the Z-syndrome factorisation of the amplitude-damping Petz
/// recovery: Choi distance between `R_petz` and `R_petz ∘ M_z-syndrome`.
///
/// If the recovery factors as `R = R~ ∘ M` with `M` idempotent, then
/// `R ∘ M = R`; conversely a vanishing residual exhibits the factorisation
/// with `R~ = R`.
pub fn verify_z_factorisation(code: &CssCode, p: f64) -> Result<(bool, f64)> {
    if code.n() > FACTORISATION_QUBIT_CAP {
        return Err(Error::Resource(format!(
            "factorisation check limited to {FACTORISATION_QUBIT_CAP} qubits, code has {}",
            code.n()
        )));
    }
    let channel = KrausChannel::amplitude_damping(p)?.tensor_power(code.n())?;
    let petz = petz_for_code(&channel, code, None)?;
    let measurement = syndrome_measurement_channel(code, SyndromeSet::ZOnly)?;
    let composed = petz.compose(&measurement)?;
    let residual = channel_distance(&petz, &composed)?;
    Ok((residual < 1e-8, residual))
}
