use num_complex::Complex64;

use crate::error::{Error, Result};

use super::eigen::eig_hermitian;
use super::operator::DenseOperator;
use super::{HERMITICITY_TOL, TRACE_TOL};

/// Density matrix: Hermitian, unit trace, PSD.
///
/// Construction checks Hermiticity and trace entry-wise (cheap, always on).
/// Positivity needs an eigendecomposition, so it is enforced by
/// [`DensityMatrix::validated`] and wherever a spectrum is computed anyway;
/// violations surface as validation errors rather than being symmetrised
/// away.
#[derive(Clone, Debug)]
pub struct DensityMatrix {
    op: DenseOperator,
}

impl DensityMatrix {
    pub fn new(op: DenseOperator) -> Result<Self> {
        Self::with_tolerances(op, HERMITICITY_TOL, TRACE_TOL)
    }

    pub fn with_tolerances(
        op: DenseOperator,
        hermiticity_tol: f64,
        trace_tol: f64,
    ) -> Result<Self> {
        let defect = op.hermiticity_defect();
        if defect > hermiticity_tol {
            return Err(Error::Validation(format!(
                "density matrix is not Hermitian (defect {defect:.3e})"
            )));
        }
        let tr = op.trace();
        if (tr.re - 1.0).abs() > trace_tol || tr.im.abs() > trace_tol {
            return Err(Error::Validation(format!(
                "density matrix trace {tr} deviates from 1"
            )));
        }
        Ok(Self { op })
    }

    /// Full validation including the PSD check.
    pub fn validated(op: DenseOperator) -> Result<Self> {
        let rho = Self::new(op)?;
        let (vals, _) = eig_hermitian(&rho.op)?;
        if let Some(bad) = vals.iter().find(|&&l| l < -HERMITICITY_TOL) {
            return Err(Error::Validation(format!(
                "density matrix has negative eigenvalue {bad:.3e}"
            )));
        }
        Ok(rho)
    }

    pub fn from_pure(psi: &PureState, local_dims: &[usize]) -> Result<Self> {
        let op = DenseOperator::outer(local_dims, psi.amplitudes(), psi.amplitudes());
        Self::new(op)
    }

    pub fn maximally_mixed(local_dims: &[usize]) -> Self {
        let id = DenseOperator::identity(local_dims);
        let d = id.dim() as f64;
        Self {
            op: id.scaled(Complex64::new(1.0 / d, 0.0)),
        }
    }

    pub fn op(&self) -> &DenseOperator {
        &self.op
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    pub fn purity(&self) -> f64 {
        self.op.matmul(&self.op).trace().re
    }

    /// Partial trace keeping the listed sites; trace is preserved.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<DensityMatrix> {
        let reduced = self.op.partial_trace(keep)?;
        DensityMatrix::new(reduced)
    }
}

/// Normalised pure state vector.
#[derive(Clone, Debug)]
pub struct PureState {
    amps: Vec<Complex64>,
}

impl PureState {
    pub fn new(amps: Vec<Complex64>) -> Result<Self> {
        let norm_sq: f64 = amps.iter().map(|z| z.norm_sqr()).sum();
        if (norm_sq - 1.0).abs() > 1e-12 {
            return Err(Error::Validation(format!(
                "state vector norm² = {norm_sq} deviates from 1"
            )));
        }
        Ok(Self { amps })
    }

    /// Normalises a raw vector; errors on (near-)zero input.
    pub fn normalised(mut amps: Vec<Complex64>) -> Result<Self> {
        let norm: f64 = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-14 {
            return Err(Error::Validation("cannot normalise the zero vector".into()));
        }
        for a in &mut amps {
            *a /= norm;
        }
        Ok(Self { amps })
    }

    pub fn basis(dim: usize, index: usize) -> Self {
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        amps[index] = Complex64::new(1.0, 0.0);
        Self { amps }
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_unit_trace() {
        let op = DenseOperator::from_diag(&[2], &[0.9, 0.2]);
        assert!(matches!(DensityMatrix::new(op), Err(Error::Validation(_))));
    }

    #[test]
    fn rejects_non_hermitian() {
        let mut op = DenseOperator::from_diag(&[2], &[0.5, 0.5]);
        op.set(0, 1, Complex64::new(0.1, 0.0));
        assert!(matches!(DensityMatrix::new(op), Err(Error::Validation(_))));
    }

    #[test]
    fn validated_rejects_negative_spectrum() {
        let op = DenseOperator::from_diag(&[2], &[1.2, -0.2]);
        assert!(matches!(
            DensityMatrix::validated(op),
            Err(Error::Validation(_))
        ));
    }

    #[test]
    fn maximally_mixed_purity() {
        let rho = DensityMatrix::maximally_mixed(&[2, 2]);
        assert!((rho.purity() - 0.25).abs() < 1e-14);
    }

    #[test]
    fn pure_state_norm_check() {
        assert!(PureState::new(vec![Complex64::new(0.9, 0.0), Complex64::new(0.1, 0.0)]).is_err());
        let s = PureState::normalised(vec![Complex64::new(3.0, 0.0), Complex64::new(4.0, 0.0)])
            .unwrap();
        assert!((s.amplitudes()[0].re - 0.6).abs() < 1e-15);
    }
}
