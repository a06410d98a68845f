use faer::{c64, Mat, Side};
use num_complex::Complex64;

use crate::error::{Error, Result};

use super::operator::DenseOperator;
use super::{HERMITICITY_TOL, PSEUDO_CUTOFF};

/// Backend Hermitian eigendecomposition with a deterministic fallback: on
/// the rare `NoConvergence` of the QR iteration (exactly degenerate
/// spectra can trigger it), retry with a tiny graded diagonal shift that
/// splits the degeneracy. The shift is far below every tolerance used by
/// callers.
pub(crate) fn eigh_mat(m: &Mat<c64>) -> Result<(Vec<f64>, Mat<c64>)> {
    let n = m.nrows();
    let mut scale = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            scale = scale.max(m[(i, j)].norm());
        }
    }
    let scale = scale.max(1.0);
    for attempt in 0..4 {
        let shifted;
        let target = if attempt == 0 {
            m
        } else {
            let eps = scale * 1e-15 * 100f64.powi(attempt - 1);
            shifted = Mat::<c64>::from_fn(n, n, |i, j| {
                if i == j {
                    m[(i, j)] + c64::new(eps * (i + 1) as f64 / n as f64, 0.0)
                } else {
                    m[(i, j)]
                }
            });
            &shifted
        };
        if let Ok(evd) = target.self_adjoint_eigen(Side::Lower) {
            let values: Vec<f64> = (0..n).map(|i| evd.S()[i].re).collect();
            return Ok((values, evd.U().cloned()));
        }
    }
    Err(Error::Solver(
        "hermitian eigendecomposition did not converge".into(),
    ))
}

/// Eigendecomposition of a Hermitian operator.
///
/// Returns eigenvalues in ascending order and a unitary whose columns are
/// the matching eigenvectors, so `a = V diag(lambda) V†`.
pub fn eig_hermitian(a: &DenseOperator) -> Result<(Vec<f64>, DenseOperator)> {
    let defect = a.hermiticity_defect();
    if defect > HERMITICITY_TOL {
        return Err(Error::Validation(format!(
            "operator is not Hermitian (defect {defect:.3e})"
        )));
    }
    let (eigenvalues, u) = eigh_mat(&a.to_faer())?;
    let vectors = DenseOperator::from_fn(a.local_dims(), |i, j| u[(i, j)]);
    Ok((eigenvalues, vectors))
}

/// Applies a real scalar function to a Hermitian PSD operator through its
/// eigendecomposition.
///
/// Eigenvalues at or below `pseudo_cutoff * lambda_max` are treated as exact
/// zeros and `f` is not evaluated there; this gives pseudo-inverse semantics
/// on rank-deficient operators. Eigenvalues below `-HERMITICITY_TOL`
/// (relative to `lambda_max`) are rejected.
pub fn mat_func(
    a: &DenseOperator,
    f: impl Fn(f64) -> f64,
    pseudo_cutoff: f64,
) -> Result<DenseOperator> {
    let (eigenvalues, v) = eig_hermitian(a)?;
    let lambda_max = eigenvalues.iter().cloned().fold(0.0, f64::max);
    let neg_tol = HERMITICITY_TOL * lambda_max.max(1.0);
    if let Some(bad) = eigenvalues.iter().find(|&&l| l < -neg_tol) {
        return Err(Error::Validation(format!(
            "operator has negative eigenvalue {bad:.3e}, not PSD"
        )));
    }
    let cutoff = pseudo_cutoff * lambda_max;
    let mapped: Vec<f64> = eigenvalues
        .iter()
        .map(|&l| if l <= cutoff { 0.0 } else { f(l) })
        .collect();
    // V f(Lambda) V†
    let dim = a.dim();
    let mut scaled = v.clone();
    for j in 0..dim {
        let s = Complex64::new(mapped[j], 0.0);
        for i in 0..dim {
            scaled.set(i, j, v.get(i, j) * s);
        }
    }
    Ok(scaled.matmul(&v.dagger()))
}

/// PSD square root with the default pseudo-inverse cutoff.
pub fn sqrt_psd(a: &DenseOperator) -> Result<DenseOperator> {
    mat_func(a, f64::sqrt, PSEUDO_CUTOFF)
}

/// Pseudo-inverse square root: zero eigenvalues stay zero.
pub fn inv_sqrt_psd(a: &DenseOperator) -> Result<DenseOperator> {
    mat_func(a, |l| 1.0 / l.sqrt(), PSEUDO_CUTOFF)
}
