use num_complex::Complex64;

use crate::codes::{PauliString, SiteNoise};
use crate::error::{Error, Result};
use crate::qlinalg::{DenseOperator, DensityMatrix};

/// Frobenius tolerance on the trace-preserving check `sum K†K = I`.
pub const TP_TOL: f64 = 1e-10;
/// Kraus operators below this Frobenius norm are pruned after composition.
const PRUNE_TOL: f64 = 1e-14;
/// Default cap on the Kraus count produced by composition or tensor powers.
pub const KRAUS_LIMIT: usize = 4096;

/// Quantum channel in Kraus form. All channels here map a register to
/// itself (`dim_in == dim_out`); environments appear only through
/// [`KrausChannel::dilate`].
#[derive(Clone, Debug)]
pub struct KrausChannel {
    dim: usize,
    kraus: Vec<DenseOperator>,
    label: String,
    trace_preserving: bool,
}

impl KrausChannel {
    /// Trace-preserving channel; rejects Kraus sets whose completeness
    /// defect exceeds [`TP_TOL`].
    pub fn new(kraus: Vec<DenseOperator>, label: impl Into<String>) -> Result<Self> {
        Self::with_tp_tolerance(kraus, label, TP_TOL)
    }

    pub fn with_tp_tolerance(
        kraus: Vec<DenseOperator>,
        label: impl Into<String>,
        tol: f64,
    ) -> Result<Self> {
        let channel = Self::assemble(kraus, label, true)?;
        let defect = channel.tp_defect();
        if defect > tol {
            return Err(Error::Validation(format!(
                "channel `{}` is not trace preserving (defect {defect:.3e})",
                channel.label
            )));
        }
        Ok(channel)
    }

    /// Trace-non-increasing instrument branch: requires `sum K†K <= I`.
    pub fn new_instrument(kraus: Vec<DenseOperator>, label: impl Into<String>) -> Result<Self> {
        let channel = Self::assemble(kraus, label, false)?;
        let gram = channel.kraus_gram();
        let excess = crate::qlinalg::eig_hermitian(&gram.hermitian_part())?
            .0
            .last()
            .copied()
            .unwrap_or(0.0)
            - 1.0;
        if excess > 1e-9 {
            return Err(Error::Validation(format!(
                "instrument `{}` increases trace (max eigenvalue 1 + {excess:.3e})",
                channel.label
            )));
        }
        Ok(channel)
    }

    fn assemble(kraus: Vec<DenseOperator>, label: impl Into<String>, tp: bool) -> Result<Self> {
        let label = label.into();
        if kraus.is_empty() {
            return Err(Error::Validation(format!(
                "channel `{label}` has no Kraus operators"
            )));
        }
        let dim = kraus[0].dim();
        let local_dims = kraus[0].local_dims().to_vec();
        for k in &kraus {
            if k.dim() != dim || k.local_dims() != local_dims {
                return Err(Error::Validation(format!(
                    "channel `{label}` has inconsistent Kraus dimensions"
                )));
            }
        }
        Ok(Self {
            dim,
            kraus,
            label,
            trace_preserving: tp,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn dim_in(&self) -> usize {
        self.dim
    }

    pub fn dim_out(&self) -> usize {
        self.dim
    }

    pub fn local_dims(&self) -> &[usize] {
        self.kraus[0].local_dims()
    }

    pub fn kraus_ops(&self) -> &[DenseOperator] {
        &self.kraus
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn relabel(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn is_trace_preserving(&self) -> bool {
        self.trace_preserving
    }

    /// `sum K†K`.
    pub fn kraus_gram(&self) -> DenseOperator {
        let mut acc = DenseOperator::zeros(self.local_dims());
        for k in &self.kraus {
            acc = &acc + &k.dagger().matmul(k);
        }
        acc
    }

    /// Frobenius norm of `sum K†K - I`.
    pub fn tp_defect(&self) -> f64 {
        (&self.kraus_gram() - &DenseOperator::identity(self.local_dims())).frobenius_norm()
    }

    /// `sum_k K X K†`.
    pub fn apply(&self, x: &DenseOperator) -> DenseOperator {
        let mut acc = DenseOperator::zeros(self.local_dims());
        for k in &self.kraus {
            acc = &acc + &k.matmul(x).matmul(&k.dagger());
        }
        acc
    }

    pub fn apply_density(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        DensityMatrix::with_tolerances(self.apply(rho.op()).hermitian_part(), 1e-8, 1e-8)
    }

    /// `self ∘ inner`: apply `inner` first. Kraus set is all products.
    pub fn compose(&self, inner: &Self) -> Result<Self> {
        if self.dim != inner.dim {
            return Err(Error::Argument(format!(
                "cannot compose channels of dimensions {} and {}",
                self.dim, inner.dim
            )));
        }
        let count = self.kraus.len() * inner.kraus.len();
        if count > KRAUS_LIMIT {
            return Err(Error::Resource(format!(
                "composition would produce {count} Kraus operators (cap {KRAUS_LIMIT}); \
                 compare in Choi form instead"
            )));
        }
        let mut kraus = Vec::with_capacity(count);
        for a in &self.kraus {
            for b in &inner.kraus {
                kraus.push(a.matmul(b));
            }
        }
        let label = format!("{} . {}", self.label, inner.label);
        let tp = self.trace_preserving && inner.trace_preserving;
        Ok(Self::assemble(kraus, label, tp)?.pruned())
    }

    pub fn tensor(&self, other: &Self) -> Result<Self> {
        let count = self.kraus.len() * other.kraus.len();
        if count > KRAUS_LIMIT {
            return Err(Error::Resource(format!(
                "tensor product would produce {count} Kraus operators (cap {KRAUS_LIMIT})"
            )));
        }
        let mut kraus = Vec::with_capacity(count);
        for a in &self.kraus {
            for b in &other.kraus {
                kraus.push(a.tensor(b)?);
            }
        }
        let label = format!("{} (x) {}", self.label, other.label);
        let tp = self.trace_preserving && other.trace_preserving;
        Ok(Self::assemble(kraus, label, tp)?.pruned())
    }

    /// `n`-fold tensor power, Kraus index ordered site-major.
    pub fn tensor_power(&self, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Argument("tensor power needs n >= 1".into()));
        }
        let mut acc = self.clone();
        for _ in 1..n {
            acc = acc.tensor(self)?;
        }
        Ok(acc.relabel(format!("{}^(x{n})", self.label)))
    }

    /// Extends the channel by identity factors on the right.
    pub fn extended_right(&self, extra_dims: &[usize]) -> Result<Self> {
        let id = DenseOperator::identity(extra_dims);
        let kraus = self
            .kraus
            .iter()
            .map(|k| k.tensor(&id))
            .collect::<Result<Vec<_>>>()?;
        Self::assemble(kraus, self.label.clone(), self.trace_preserving)
    }

    fn pruned(mut self) -> Self {
        self.kraus.retain(|k| k.frobenius_norm() >= PRUNE_TOL);
        if self.kraus.is_empty() {
            // Do not silently drop everything; keep one zero operator.
            self.kraus.push(DenseOperator::zeros(&[self.dim]));
        }
        self
    }

    /// Stinespring dilation: isometry `V: in -> out (x) env` with
    /// `env = Kraus count`; `<e|_E V = K_e`.
    pub fn dilate(&self) -> Result<Isometry> {
        if !self.trace_preserving || self.tp_defect() > TP_TOL {
            return Err(Error::Validation(format!(
                "dilation requires a trace-preserving channel (`{}`)",
                self.label
            )));
        }
        let env = self.kraus.len();
        let rows = self.dim * env;
        let mut entries = vec![Complex64::new(0.0, 0.0); rows * self.dim];
        for (e, k) in self.kraus.iter().enumerate() {
            for o in 0..self.dim {
                for i in 0..self.dim {
                    entries[(o * env + e) * self.dim + i] = k.get(o, i);
                }
            }
        }
        let mut out_local_dims = self.local_dims().to_vec();
        out_local_dims.push(env);
        Ok(Isometry {
            rows,
            cols: self.dim,
            out_local_dims,
            entries,
        })
    }

    // --- Constructors for the standard families -------------------------

    pub fn identity(local_dims: &[usize]) -> Self {
        Self {
            dim: local_dims.iter().product(),
            kraus: vec![DenseOperator::identity(local_dims)],
            label: "identity".into(),
            trace_preserving: true,
        }
    }

    pub fn from_unitary(u: DenseOperator, label: impl Into<String>) -> Result<Self> {
        let defect =
            (&u.dagger().matmul(&u) - &DenseOperator::identity(u.local_dims())).frobenius_norm();
        if defect > 1e-10 {
            return Err(Error::Validation(format!(
                "operator is not unitary (defect {defect:.3e})"
            )));
        }
        Self::assemble(vec![u], label, true)
    }

    /// Pauli channel `sum_P p(P) P (.) P†` with Kraus `sqrt(p(P)) P`.
    pub fn pauli_channel(probs: &[(PauliString, f64)], label: impl Into<String>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::Argument("empty Pauli distribution".into()));
        }
        let total: f64 = probs.iter().map(|&(_, p)| p).sum();
        if probs.iter().any(|&(_, p)| p < 0.0) {
            return Err(Error::Argument("negative Pauli probability".into()));
        }
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::Argument(format!(
                "Pauli probabilities sum to {total}, expected 1"
            )));
        }
        let kraus = probs
            .iter()
            .filter(|&&(_, p)| p > 0.0)
            .map(|&(p_str, p)| p_str.to_matrix().scaled(Complex64::new(p.sqrt(), 0.0)))
            .collect();
        Self::assemble(kraus, label, true)
    }

    /// Single-qubit channel from site-noise probabilities.
    pub fn from_site_noise(noise: &SiteNoise, label: impl Into<String>) -> Result<Self> {
        Self::pauli_channel(
            &[
                (PauliString::identity(1), noise.p_i),
                (PauliString::x_on(1, 0), noise.p_x),
                (PauliString::y_on(1, 0), noise.p_y),
                (PauliString::z_on(1, 0), noise.p_z),
            ],
            label,
        )
    }

    pub fn bit_flip(p: f64) -> Result<Self> {
        check_prob(p)?;
        Self::from_site_noise(&SiteNoise::bit_flip(p)?, format!("bitflip({p})"))
    }

    pub fn phase_flip(p: f64) -> Result<Self> {
        check_prob(p)?;
        Self::from_site_noise(&SiteNoise::phase_flip(p)?, format!("phaseflip({p})"))
    }

    /// Depolarizing: `rho -> (1 - 3p/4) rho + (p/4) (X rho X + Y rho Y + Z rho Z)`.
    pub fn depolarizing(p: f64) -> Result<Self> {
        check_prob(p)?;
        Self::from_site_noise(&SiteNoise::depolarizing(p)?, format!("depol({p})"))
    }

    /// Amplitude damping with decay probability `p`, in the form
    /// `K0 = ((1+sqrt(1-p))/2) I + ((1-sqrt(1-p))/2) Z`,
    /// `K1 = (sqrt(p)/2) (X + ZX)`.
    pub fn amplitude_damping(p: f64) -> Result<Self> {
        check_prob(p)?;
        let root = (1.0 - p).sqrt();
        let a = Complex64::new(0.5 * (1.0 + root), 0.0);
        let b = Complex64::new(0.5 * (1.0 - root), 0.0);
        let k0 = &DenseOperator::pauli_i().scaled(a) + &DenseOperator::pauli_z().scaled(b);
        let zx = DenseOperator::pauli_z().matmul(&DenseOperator::pauli_x());
        let k1 = (&DenseOperator::pauli_x() + &zx).scaled(Complex64::new(0.5 * p.sqrt(), 0.0));
        Self::new(vec![k0, k1], format!("ad({p})")).map(Self::pruned)
    }
}

fn check_prob(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Argument(format!("probability {p} outside [0, 1]")));
    }
    Ok(())
}

/// Rectangular isometry `V: C^cols -> C^rows` produced by dilation.
#[derive(Clone, Debug)]
pub struct Isometry {
    rows: usize,
    cols: usize,
    out_local_dims: Vec<usize>,
    entries: Vec<Complex64>,
}

impl Isometry {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Local dimensions of the output register, environment last.
    pub fn out_local_dims(&self) -> &[usize] {
        &self.out_local_dims
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.entries[i * self.cols + j]
    }

    pub fn apply_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.cols);
        let mut out = vec![Complex64::new(0.0, 0.0); self.rows];
        for i in 0..self.rows {
            let row = &self.entries[i * self.cols..(i + 1) * self.cols];
            out[i] = row.iter().zip(v).map(|(a, x)| a * x).sum();
        }
        out
    }

    /// `V†V`, which must be the identity for an isometry.
    pub fn gram(&self) -> DenseOperator {
        DenseOperator::from_fn(&[self.cols], |i, j| {
            (0..self.rows)
                .map(|r| self.get(r, i).conj() * self.get(r, j))
                .sum()
        })
    }

    pub fn isometry_defect(&self) -> f64 {
        (&self.gram() - &DenseOperator::identity(&[self.cols])).frobenius_norm()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bit_flip_kraus_structure() {
        let p = 0.3;
        let ch = KrausChannel::bit_flip(p).unwrap();
        assert_eq!(ch.kraus_ops().len(), 2);
        assert!(ch.tp_defect() < 1e-14);
        let k0 = &ch.kraus_ops()[0];
        assert!((k0.get(0, 0).re - (1.0 - p).sqrt()).abs() < 1e-14);
        // p = 0 is the identity channel.
        let id = KrausChannel::bit_flip(0.0).unwrap();
        assert_eq!(id.kraus_ops().len(), 1);
    }

    #[test]
    fn amplitude_damping_matches_standard_form() {
        // p = 0.36: K0 = diag(1, 0.8), K1 = 0.6 |0><1|.
        let ch = KrausChannel::amplitude_damping(0.36).unwrap();
        let k0 = &ch.kraus_ops()[0];
        let k1 = &ch.kraus_ops()[1];
        assert!((k0.get(0, 0).re - 1.0).abs() < 1e-14);
        assert!((k0.get(1, 1).re - 0.8).abs() < 1e-14);
        assert!(k0.get(0, 1).norm() < 1e-14 && k0.get(1, 0).norm() < 1e-14);
        assert!((k1.get(0, 1).re - 0.6).abs() < 1e-14);
        assert!(k1.get(0, 0).norm() < 1e-14 && k1.get(1, 1).norm() < 1e-14);
        assert!(ch.tp_defect() < 1e-14);
    }

    #[test]
    fn amplitude_damping_extremes() {
        let id = KrausChannel::amplitude_damping(0.0).unwrap();
        assert_eq!(id.kraus_ops().len(), 1);
        // Full damping sends both basis states to |0>.
        let full = KrausChannel::amplitude_damping(1.0).unwrap();
        let one = DensityMatrix::from_pure(&crate::qlinalg::PureState::basis(2, 1), &[2]).unwrap();
        let out = full.apply_density(&one).unwrap();
        assert!((out.op().get(0, 0).re - 1.0).abs() < 1e-14);
        assert!(matches!(
            KrausChannel::amplitude_damping(1.5),
            Err(Error::Argument(_))
        ));
    }

    #[test]
    fn pauli_channel_rejects_bad_distributions() {
        let x = PauliString::x_on(1, 0);
        let i = PauliString::identity(1);
        assert!(matches!(
            KrausChannel::pauli_channel(&[(i, 1.2), (x, -0.2)], "bad"),
            Err(Error::Argument(_))
        ));
        assert!(matches!(
            KrausChannel::pauli_channel(&[(i, 0.5), (x, 0.4)], "bad"),
            Err(Error::Argument(_))
        ));
    }

    #[test]
    fn compose_with_identity_and_inverse() {
        let ch = KrausChannel::bit_flip(0.2).unwrap();
        let id = KrausChannel::identity(&[2]);
        let composed = id.compose(&ch).unwrap();
        assert_eq!(composed.kraus_ops().len(), 2);
        // U then U† is the identity channel in action.
        let u = KrausChannel::from_unitary(DenseOperator::hadamard(), "H").unwrap();
        let uu = u.compose(&u).unwrap();
        let rho = DensityMatrix::from_pure(&crate::qlinalg::PureState::basis(2, 0), &[2]).unwrap();
        let out = uu.apply_density(&rho).unwrap();
        assert!((out.op() - rho.op()).max_abs() < 1e-12);
    }

    #[test]
    fn tensor_power_kraus_cap() {
        let depol = KrausChannel::depolarizing(0.1).unwrap();
        assert!(depol.tensor_power(6).is_ok()); // 4^6 = 4096 at the cap
        assert!(matches!(depol.tensor_power(7), Err(Error::Resource(_))));
    }

    #[test]
    fn dilation_is_isometric_and_reproduces_channel() {
        let ch = KrausChannel::amplitude_damping(0.36).unwrap();
        let v = ch.dilate().unwrap();
        assert!(v.isometry_defect() < 1e-12);
        // <e|_E V = K_e entries.
        let env = ch.kraus_ops().len();
        for (e, k) in ch.kraus_ops().iter().enumerate() {
            for o in 0..2 {
                for i in 0..2 {
                    assert!((v.get(o * env + e, i) - k.get(o, i)).norm() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn bit_flip_dilation_structure() {
        // V|psi> = sqrt(1-p)|psi>|0> + sqrt(p) X|psi>|1>.
        let p = 0.4;
        let v = KrausChannel::bit_flip(p).unwrap().dilate().unwrap();
        let psi = [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)];
        let out = v.apply_vec(&psi);
        // Output order is (qubit, env): |0>|0>, |0>|1>, |1>|0>, |1>|1>.
        assert!((out[0].re - (1.0 - p).sqrt()).abs() < 1e-14);
        assert!((out[3].re - p.sqrt()).abs() < 1e-14);
        assert!(out[1].norm() < 1e-14 && out[2].norm() < 1e-14);
    }

    #[test]
    fn instrument_constructor_accepts_projector_branch() {
        let proj = DenseOperator::from_diag(&[2], &[1.0, 0.0]);
        let branch = KrausChannel::new_instrument(vec![proj], "measure-0").unwrap();
        assert!(!branch.is_trace_preserving() || branch.tp_defect() > 0.0);
        assert!(matches!(
            KrausChannel::new(vec![DenseOperator::from_diag(&[2], &[1.0, 0.0])], "not-tp"),
            Err(Error::Validation(_))
        ));
    }
}
