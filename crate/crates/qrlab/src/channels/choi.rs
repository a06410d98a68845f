use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::qlinalg::{eig_hermitian, DenseOperator, PSEUDO_CUTOFF};

use super::kraus::KrausChannel;

/// Choi matrix of a channel on the `out (x) in` register, normalised so
/// that `trace = dim_in` (trace preservation is then `tr_out J = I_in`).
///
/// The canonical channel-equality witness: two channels are equal iff
/// their Choi matrices coincide, regardless of Kraus representation.
#[derive(Clone, Debug)]
pub struct ChoiMatrix {
    dim_in: usize,
    dim_out: usize,
    matrix: DenseOperator,
}

impl ChoiMatrix {
    /// `J = sum_k vec(K_k) vec(K_k)†` with the row-major vec convention
    /// `vec(K)[(o, i)] = K[o, i]`.
    pub fn from_channel(channel: &KrausChannel) -> Self {
        let d = channel.dim();
        let mut matrix = DenseOperator::zeros(&[d, d]);
        for k in channel.kraus_ops() {
            let v: Vec<Complex64> = (0..d * d).map(|idx| k.get(idx / d, idx % d)).collect();
            matrix = &matrix + &DenseOperator::outer(&[d, d], &v, &v);
        }
        Self {
            dim_in: d,
            dim_out: d,
            matrix,
        }
    }

    pub fn from_parts(dim_in: usize, dim_out: usize, matrix: DenseOperator) -> Result<Self> {
        if matrix.dim() != dim_in * dim_out {
            return Err(Error::Argument(format!(
                "Choi matrix dimension {} does not match {}x{}",
                matrix.dim(),
                dim_out,
                dim_in
            )));
        }
        Ok(Self {
            dim_in,
            dim_out,
            matrix,
        })
    }

    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    pub fn dim_out(&self) -> usize {
        self.dim_out
    }

    pub fn matrix(&self) -> &DenseOperator {
        &self.matrix
    }

    /// `tr_out J`, an operator on the input register.
    pub fn input_marginal(&self) -> Result<DenseOperator> {
        self.matrix.partial_trace(&[1])
    }

    /// Frobenius norm of `tr_out J - I_in`.
    pub fn tp_defect(&self) -> Result<f64> {
        Ok((&self.input_marginal()? - &DenseOperator::identity(&[self.dim_in])).frobenius_norm())
    }

    /// Magnitude of the most negative eigenvalue (0 when PSD).
    pub fn psd_defect(&self) -> Result<f64> {
        let (vals, _) = eig_hermitian(&self.matrix.hermitian_part())?;
        Ok((-vals.first().copied().unwrap_or(0.0)).max(0.0))
    }

    pub fn validate(&self, psd_tol: f64, tp_tol: f64) -> Result<()> {
        let psd = self.psd_defect()?;
        if psd > psd_tol {
            return Err(Error::Validation(format!(
                "Choi matrix not PSD (defect {psd:.3e})"
            )));
        }
        let tp = self.tp_defect()?;
        if tp > tp_tol {
            return Err(Error::Validation(format!(
                "Choi matrix not trace preserving (defect {tp:.3e})"
            )));
        }
        Ok(())
    }

    /// Canonical Kraus decomposition: eigenvectors with eigenvalue above
    /// the relative cutoff, scaled by `sqrt(lambda)`.
    pub fn kraus_channel(&self, label: impl Into<String>, tp_tol: f64) -> Result<KrausChannel> {
        let (vals, vecs) = eig_hermitian(&self.matrix.hermitian_part())?;
        let lambda_max = vals.last().copied().unwrap_or(0.0);
        let cutoff = PSEUDO_CUTOFF * lambda_max.max(0.0);
        let d_out = self.dim_out;
        let d_in = self.dim_in;
        let mut kraus = Vec::new();
        for (j, &l) in vals.iter().enumerate() {
            if l <= cutoff {
                continue;
            }
            let scale = Complex64::new(l.sqrt(), 0.0);
            let mut k = DenseOperator::zeros(&[d_out]);
            for o in 0..d_out {
                for i in 0..d_in {
                    k.set(o, i, vecs.get(o * d_in + i, j) * scale);
                }
            }
            kraus.push(k);
        }
        KrausChannel::with_tp_tolerance(kraus, label, tp_tol)
    }
}

/// Choi matrix of a Kraus channel.
pub fn to_choi(channel: &KrausChannel) -> ChoiMatrix {
    ChoiMatrix::from_channel(channel)
}

/// Trace distance between the normalised Choi matrices; zero iff the
/// channels are equal.
pub fn choi_distance(a: &ChoiMatrix, b: &ChoiMatrix) -> Result<f64> {
    if a.dim_in != b.dim_in || a.dim_out != b.dim_out {
        return Err(Error::Argument(
            "cannot compare Choi matrices of different shapes".into(),
        ));
    }
    let scale_a = Complex64::new(1.0 / a.dim_in as f64, 0.0);
    let scale_b = Complex64::new(1.0 / b.dim_in as f64, 0.0);
    let diff = (&a.matrix.scaled(scale_a) - &b.matrix.scaled(scale_b)).hermitian_part();
    let (vals, _) = eig_hermitian(&diff)?;
    Ok(0.5 * vals.iter().map(|l| l.abs()).sum::<f64>())
}

/// Convenience: Choi distance between two Kraus channels.
pub fn channel_distance(a: &KrausChannel, b: &KrausChannel) -> Result<f64> {
    choi_distance(&to_choi(a), &to_choi(b))
}

#[cfg(test)]
mod tests {
    use crate::codes::PauliString;

    use super::*;

    #[test]
    fn choi_of_identity_is_maximally_entangled_projector() {
        let id = KrausChannel::identity(&[2]);
        let choi = to_choi(&id);
        // J = vec(I) vec(I)†, trace 2; J/2 is the Bell projector.
        assert!((choi.matrix().trace().re - 2.0).abs() < 1e-14);
        let bell = [
            Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0),
        ];
        let proj = DenseOperator::outer(&[2, 2], &bell, &bell);
        let half = choi.matrix().scaled(Complex64::new(0.5, 0.0));
        assert!((&half - &proj).max_abs() < 1e-14);
        assert!(choi.tp_defect().unwrap() < 1e-14);
    }

    #[test]
    fn choi_distance_zero_iff_equal() {
        let a = KrausChannel::bit_flip(0.25).unwrap();
        assert!(channel_distance(&a, &a).unwrap() < 1e-14);
        let b = KrausChannel::phase_flip(0.25).unwrap();
        let d = channel_distance(&a, &b).unwrap();
        assert!(
            d > 1e-3,
            "distinct channels must be Choi-separated, got {d}"
        );
    }

    #[test]
    fn depolarizing_choi_spectrum() {
        // Pauli channels have Choi eigenvalues 2 p(P): here (1 - 3p/4)
        // once and p/4 three times, scaled by dim_in = 2.
        let p = 0.2;
        let choi = to_choi(&KrausChannel::depolarizing(p).unwrap());
        let (vals, _) = eig_hermitian(choi.matrix()).unwrap();
        let mut expected = [
            2.0 * (1.0 - 0.75 * p),
            2.0 * 0.25 * p,
            2.0 * 0.25 * p,
            2.0 * 0.25 * p,
        ];
        expected.sort_by(f64::total_cmp);
        for (v, e) in vals.iter().zip(expected.iter()) {
            assert!((v - e).abs() < 1e-12);
        }
        // Cross-check against the direct 4x4 Choi assembly from definitions.
        let mut direct = DenseOperator::zeros(&[2, 2]);
        let paulis = [
            (PauliString::identity(1), 1.0 - 0.75 * p),
            (PauliString::x_on(1, 0), 0.25 * p),
            (PauliString::y_on(1, 0), 0.25 * p),
            (PauliString::z_on(1, 0), 0.25 * p),
        ];
        for (ps, w) in paulis {
            let m = ps.to_matrix();
            let v: Vec<Complex64> = (0..4).map(|idx| m.get(idx / 2, idx % 2)).collect();
            direct =
                &direct + &DenseOperator::outer(&[2, 2], &v, &v).scaled(Complex64::new(w, 0.0));
        }
        assert!((&direct - choi.matrix()).max_abs() < 1e-13);
    }

    #[test]
    fn kraus_from_choi_round_trip() {
        let ch = KrausChannel::amplitude_damping(0.3).unwrap();
        let rebuilt = to_choi(&ch).kraus_channel("rebuilt", 1e-9).unwrap();
        assert!(channel_distance(&ch, &rebuilt).unwrap() < 1e-12);
    }

    #[test]
    fn gauge_invariance_under_kraus_remixing() {
        // Mixing the Kraus set by a unitary leaves the Choi matrix fixed.
        let ch = KrausChannel::bit_flip(0.3).unwrap();
        let k0 = &ch.kraus_ops()[0];
        let k1 = &ch.kraus_ops()[1];
        let (c, s) = (0.6f64, 0.8f64);
        let m0 = &k0.scaled(Complex64::new(c, 0.0)) + &k1.scaled(Complex64::new(s, 0.0));
        let m1 = &k0.scaled(Complex64::new(-s, 0.0)) + &k1.scaled(Complex64::new(c, 0.0));
        let remixed = KrausChannel::new(vec![m0, m1], "remixed").unwrap();
        assert!(channel_distance(&ch, &remixed).unwrap() < 1e-13);
    }
}
