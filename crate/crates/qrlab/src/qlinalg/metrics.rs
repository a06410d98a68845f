use crate::error::{Error, Result};

use super::eigen::{eig_hermitian, sqrt_psd};
use super::state::DensityMatrix;

/// Uhlmann fidelity `F[rho, sigma] = ||sqrt(rho) sqrt(sigma)||_1`.
///
/// Computed as the sum of singular values of `sqrt(rho) sqrt(sigma)`;
/// taking square roots before the product keeps rounding noise in the
/// spectrum linear instead of amplifying it through `sqrt`. Symmetric in
/// its arguments and equal to `sqrt(<psi|rho|psi>)` when `sigma` is pure.
pub fn fidelity(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    let a = sqrt_psd(rho.op())?;
    let b = sqrt_psd(sigma.op())?;
    let product = a.matmul(&b).to_faer();
    let singular = product
        .singular_values()
        .map_err(|e| Error::Solver(format!("svd failed: {e:?}")))?;
    Ok(singular.iter().sum::<f64>().min(1.0))
}

/// Trace distance `T[rho, sigma] = ||rho - sigma||_1 / 2`.
pub fn trace_distance(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    let diff = (rho.op() - sigma.op()).hermitian_part();
    let (vals, _) = eig_hermitian(&diff)?;
    Ok(0.5 * vals.iter().map(|l| l.abs()).sum::<f64>())
}

/// Von Neumann entropy in bits, `-sum lambda log2 lambda` with `0 log 0 = 0`.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> Result<f64> {
    let (vals, _) = eig_hermitian(rho.op())?;
    let mut s = 0.0;
    for &l in &vals {
        if l > 0.0 {
            s -= l * l.log2();
        }
    }
    Ok(s.max(0.0))
}
