use num_complex::Complex64;

use crate::channels::KrausChannel;
use crate::codes::CssCode;
use crate::error::{Error, Result};
use crate::qlinalg::{
    eig_hermitian, sqrt_psd, DenseOperator, DensityMatrix, PureState, PSEUDO_CUTOFF,
};

/// Tolerance on the trace-preserving check of assembled Petz channels
/// (looser than the generic channel tolerance: two eigendecompositions and
/// a pseudo-inverse enter the construction).
const PETZ_TP_TOL: f64 = 1e-9;

/// Transpose (Petz) recovery channel of `channel` with respect to the
/// reference state `sigma`:
/// Kraus `R_k = sigma^(1/2) K_k† N^(-1/2)` with `N = channel(sigma)`,
/// the inverse square root taken as a pseudo-inverse on the support of `N`.
///
/// The map is completed to a total channel by Kraus operators routing
/// `ker N` to `completion_target`; on inputs supported in `supp N` the
/// completion never fires.
pub fn petz_map(
    channel: &KrausChannel,
    sigma: &DensityMatrix,
    completion_target: &PureState,
) -> Result<KrausChannel> {
    if !channel.is_trace_preserving() {
        return Err(Error::Validation(
            "Petz construction needs a trace-preserving channel".into(),
        ));
    }
    if sigma.dim() != channel.dim() {
        return Err(Error::Argument(format!(
            "reference state dimension {} does not match channel dimension {}",
            sigma.dim(),
            channel.dim()
        )));
    }
    if completion_target.dim() != channel.dim() {
        return Err(Error::Argument(
            "completion target dimension mismatch".into(),
        ));
    }
    // Reject non-PSD references before taking square roots.
    let (sigma_vals, _) = eig_hermitian(sigma.op())?;
    if let Some(bad) = sigma_vals.iter().find(|&&l| l < -1e-9) {
        return Err(Error::Validation(format!(
            "reference state has negative eigenvalue {bad:.3e}"
        )));
    }
    let sqrt_sigma = sqrt_psd(sigma.op())?;

    let n_op = channel.apply(sigma.op()).hermitian_part();
    let (n_vals, n_vecs) = eig_hermitian(&n_op)?;
    let lambda_max = n_vals.iter().cloned().fold(0.0, f64::max);
    let cutoff = PSEUDO_CUTOFF * lambda_max;

    // N^(-1/2) on the support.
    let dim = n_op.dim();
    let mut scaled = n_vecs.clone();
    for j in 0..dim {
        let f = if n_vals[j] <= cutoff {
            0.0
        } else {
            1.0 / n_vals[j].sqrt()
        };
        for i in 0..dim {
            scaled.set(i, j, n_vecs.get(i, j) * Complex64::new(f, 0.0));
        }
    }
    let n_inv_sqrt = scaled.matmul(&n_vecs.dagger());

    let mut kraus: Vec<DenseOperator> = channel
        .kraus_ops()
        .iter()
        .map(|k| sqrt_sigma.matmul(&k.dagger()).matmul(&n_inv_sqrt))
        .collect();

    // Completion on ker N: one Kraus |target><v| per kernel eigenvector.
    for j in 0..dim {
        if n_vals[j] <= cutoff {
            let v: Vec<Complex64> = (0..dim).map(|i| n_vecs.get(i, j)).collect();
            kraus.push(DenseOperator::outer(
                n_op.local_dims(),
                completion_target.amplitudes(),
                &v,
            ));
        }
    }

    KrausChannel::with_tp_tolerance(kraus, format!("petz[{}]", channel.label()), PETZ_TP_TOL)
}

/// Petz recovery for a code: reference state defaults to the maximally
/// mixed codespace state `Pi / 2^k`, completion routes to the logical zero
/// codeword.
pub fn petz_for_code(
    channel: &KrausChannel,
    code: &CssCode,
    sigma: Option<DensityMatrix>,
) -> Result<KrausChannel> {
    let projector = code.codespace_projector()?;
    let sigma = match sigma {
        Some(s) => {
            // The reference must live inside the codespace.
            let weight = projector.matmul(s.op()).trace().re;
            if (weight - 1.0).abs() > 1e-9 {
                return Err(Error::Validation(format!(
                    "reference state has weight {weight} inside the codespace, expected 1"
                )));
            }
            s
        }
        None => {
            let d = code.logical_dim() as f64;
            DensityMatrix::new(projector.scaled(Complex64::new(1.0 / d, 0.0)))?
        }
    };
    let target = code
        .logical_codewords()?
        .into_iter()
        .next()
        .ok_or_else(|| Error::Consistency("code has no logical codewords".into()))?;
    petz_map(channel, &sigma, &target)
}
