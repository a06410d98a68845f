//! Information-theoretic diagnostics: entanglement fidelity, environment
//! states from dilation, mutual trace distance, coherent-information
//! decrease, and the bound certifier.

mod bounds;
mod tripartite;

use crate::channels::KrausChannel;
use crate::codes::CssCode;
use crate::error::{Error, Result};
use crate::qlinalg::{trace_distance, von_neumann_entropy, DenseOperator, DensityMatrix};

pub use bounds::{certify_bounds, BoundReport, Skipped, SLACK_TOL};
pub use tripartite::{
    code_reference_state, environment_state, Subsystem, TripartiteState, TRIPARTITE_DIM_CAP,
};

/// Entanglement fidelity of `recovery ∘ channel` on a code:
/// `F_e = sqrt(<Phi| (R E (x) I_R)[Phi] |Phi>)` with `Phi` the
/// code-reference Bell state.
pub fn entanglement_fidelity(
    recovery: &KrausChannel,
    channel: &KrausChannel,
    code: &CssCode,
) -> Result<f64> {
    if channel.dim() != code.dim() || recovery.dim() != channel.dim() {
        return Err(Error::Argument(format!(
            "dimension mismatch: code {}, channel {}, recovery {}",
            code.dim(),
            channel.dim(),
            recovery.dim()
        )));
    }
    let d = code.logical_dim();
    let phi = code_reference_state(code)?;
    let mut local = code.n_local_dims();
    local.push(d);
    let rho = DenseOperator::outer(&local, phi.amplitudes(), phi.amplitudes());
    let noisy = channel.extended_right(&[d])?.apply(&rho);
    let recovered = recovery.extended_right(&[d])?.apply(&noisy);
    let fe_sq = recovered.expectation(phi.amplitudes()).re;
    Ok(fe_sq.clamp(0.0, 1.0).sqrt())
}

/// Mutual trace distance `T_{A:B} = T[rho_AB, rho_A (x) rho_B]` between two
/// labelled parts of a tripartite state.
pub fn mutual_trace_distance(
    state: &TripartiteState,
    parts: (Subsystem, Subsystem),
) -> Result<f64> {
    if parts.0 == parts.1 {
        return Err(Error::Argument(
            "mutual trace distance needs disjoint parts".into(),
        ));
    }
    let joint = state.marginal(&[parts.0, parts.1])?;
    let a = state.marginal(&[parts.0])?;
    let b = state.marginal(&[parts.1])?;
    let product = DensityMatrix::new(a.op().tensor(b.op())?)?;
    trace_distance(&joint, &product)
}

/// Coherent-information bookkeeping of a noisy code-reference state.
#[derive(Clone, Copy, Debug)]
pub struct CoherentInfo {
    /// Reference-environment mutual information `I'_{R:E}` in bits.
    pub i_re: f64,
    /// Input coherent information, `log2 d` for the Bell input.
    pub i_c: f64,
    /// Coherent information after the noise.
    pub i_c_prime: f64,
}

/// Computes `I'_{R:E}` both as `S(R) + S(E) - S(RE)` and as the decrease
/// `I_c - I'_c` of coherent information; the two routes must agree.
pub fn coherent_info_decrease(state: &TripartiteState) -> Result<CoherentInfo> {
    let s_r = von_neumann_entropy(&state.rho_r()?)?;
    let s_e = von_neumann_entropy(&state.rho_e()?)?;
    let s_re = von_neumann_entropy(&state.rho_re()?)?;
    let mutual = s_r + s_e - s_re;

    let i_c = (state.dim(Subsystem::R) as f64).log2();
    let s_q = von_neumann_entropy(&state.rho_q()?)?;
    let s_rq = von_neumann_entropy(&state.rho_rq()?)?;
    let i_c_prime = s_q - s_rq;
    let decrease = i_c - i_c_prime;

    if (mutual - decrease).abs() > 1e-8 {
        return Err(Error::Consistency(format!(
            "mutual information routes disagree: {mutual} vs {decrease}"
        )));
    }
    Ok(CoherentInfo {
        i_re: mutual.max(0.0),
        i_c,
        i_c_prime,
    })
}
