use std::sync::OnceLock;

use num_complex::Complex64;

use crate::channels::KrausChannel;
use crate::codes::CssCode;
use crate::error::{Error, Result};
use crate::qlinalg::{pure_state_marginal, DensityMatrix, PureState};

/// Cap on `dim(R) * dim(Q) * dim(E)` for environment states.
pub const TRIPARTITE_DIM_CAP: usize = 1 << 14;

/// Labelled subsystems of the purified noisy state: reference `R`, encoded
/// register `Q`, dilation environment `E`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Subsystem {
    R,
    Q,
    E,
}

impl Subsystem {
    fn site(self) -> usize {
        match self {
            Subsystem::R => 0,
            Subsystem::Q => 1,
            Subsystem::E => 2,
        }
    }
}

/// Pure state on `R (x) Q (x) E` obtained by sending half of the
/// code-reference Bell state through the dilated noise channel. Marginals
/// are computed from the state vector (the global density matrix is never
/// materialised) and cached.
#[derive(Debug)]
pub struct TripartiteState {
    amps: Vec<Complex64>,
    dims: [usize; 3],
    rho_r: OnceLock<DensityMatrix>,
    rho_q: OnceLock<DensityMatrix>,
    rho_e: OnceLock<DensityMatrix>,
    rho_re: OnceLock<DensityMatrix>,
    rho_rq: OnceLock<DensityMatrix>,
}

impl TripartiteState {
    pub fn from_amplitudes(amps: Vec<Complex64>, dims: [usize; 3]) -> Result<Self> {
        let total: usize = dims.iter().product();
        if amps.len() != total {
            return Err(Error::Argument(format!(
                "amplitude vector length {} does not match dims {:?}",
                amps.len(),
                dims
            )));
        }
        let norm_sq: f64 = amps.iter().map(|z| z.norm_sqr()).sum();
        if (norm_sq - 1.0).abs() > 1e-10 {
            return Err(Error::Validation(format!(
                "tripartite state norm² = {norm_sq} deviates from 1"
            )));
        }
        Ok(Self {
            amps,
            dims,
            rho_r: OnceLock::new(),
            rho_q: OnceLock::new(),
            rho_e: OnceLock::new(),
            rho_re: OnceLock::new(),
            rho_rq: OnceLock::new(),
        })
    }

    pub fn dim(&self, part: Subsystem) -> usize {
        self.dims[part.site()]
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    /// Reduced state of the listed parts, in the order given.
    pub fn marginal(&self, parts: &[Subsystem]) -> Result<DensityMatrix> {
        let mut seen = [false; 3];
        for p in parts {
            if seen[p.site()] {
                return Err(Error::Argument(format!("subsystem {p:?} listed twice")));
            }
            seen[p.site()] = true;
        }
        let keep: Vec<usize> = parts.iter().map(|p| p.site()).collect();
        let local_dims = self.dims.to_vec();
        let op = pure_state_marginal(&self.amps, &local_dims, &keep)?;
        DensityMatrix::with_tolerances(op.hermitian_part(), 1e-8, 1e-8)
    }

    fn cached(&self, slot: &OnceLock<DensityMatrix>, parts: &[Subsystem]) -> Result<DensityMatrix> {
        if let Some(rho) = slot.get() {
            return Ok(rho.clone());
        }
        let rho = self.marginal(parts)?;
        Ok(slot.get_or_init(|| rho).clone())
    }

    pub fn rho_r(&self) -> Result<DensityMatrix> {
        self.cached(&self.rho_r, &[Subsystem::R])
    }

    pub fn rho_q(&self) -> Result<DensityMatrix> {
        self.cached(&self.rho_q, &[Subsystem::Q])
    }

    pub fn rho_e(&self) -> Result<DensityMatrix> {
        self.cached(&self.rho_e, &[Subsystem::E])
    }

    pub fn rho_re(&self) -> Result<DensityMatrix> {
        self.cached(&self.rho_re, &[Subsystem::R, Subsystem::E])
    }

    pub fn rho_rq(&self) -> Result<DensityMatrix> {
        self.cached(&self.rho_rq, &[Subsystem::R, Subsystem::Q])
    }

    /// Dense global density matrix; only for small verification cases.
    pub fn global_density(&self) -> Result<DensityMatrix> {
        let total: usize = self.dims.iter().product();
        if total > 1 << 12 {
            return Err(Error::Resource(format!(
                "global density at dimension {total} exceeds the verification cap"
            )));
        }
        let op = crate::qlinalg::DenseOperator::outer(&self.dims, &self.amps, &self.amps);
        DensityMatrix::new(op)
    }
}

/// Purifies the noise acting on the code-reference Bell state
/// `|Phi> = (1/sqrt(d)) sum_b |b>_R |b̄>_Q`: applies the Stinespring
/// dilation of the channel on `Q` and returns the labelled pure state on
/// `R (x) Q (x) E`.
pub fn environment_state(channel: &KrausChannel, code: &CssCode) -> Result<TripartiteState> {
    if channel.dim() != code.dim() {
        return Err(Error::Argument(format!(
            "channel dimension {} does not match code dimension {}",
            channel.dim(),
            code.dim()
        )));
    }
    let d = code.logical_dim();
    let dim_q = code.dim();
    let dim_e = channel.kraus_ops().len();
    let total = d * dim_q * dim_e;
    if total > TRIPARTITE_DIM_CAP {
        return Err(Error::Resource(format!(
            "tripartite dimension {total} = {d}x{dim_q}x{dim_e} exceeds cap {TRIPARTITE_DIM_CAP}"
        )));
    }
    let isometry = channel.dilate()?;
    let words = code.logical_codewords()?;
    let weight = 1.0 / (d as f64).sqrt();
    let mut amps = vec![Complex64::new(0.0, 0.0); total];
    for (r, word) in words.iter().enumerate() {
        let image = isometry.apply_vec(word.amplitudes());
        // Image index is (q * dim_e + e); state layout is (r, q, e).
        for (qe, &a) in image.iter().enumerate() {
            amps[r * dim_q * dim_e + qe] = a * weight;
        }
    }
    TripartiteState::from_amplitudes(amps, [d, dim_q, dim_e])
}

/// The code-reference Bell state `|Phi_QR>` as a pure state on
/// `Q (x) R` (register first, reference second).
pub fn code_reference_state(code: &CssCode) -> Result<PureState> {
    let d = code.logical_dim();
    let dim_q = code.dim();
    let words = code.logical_codewords()?;
    let weight = Complex64::new(1.0 / (d as f64).sqrt(), 0.0);
    let mut amps = vec![Complex64::new(0.0, 0.0); dim_q * d];
    for (r, word) in words.iter().enumerate() {
        for (q, &a) in word.amplitudes().iter().enumerate() {
            amps[q * d + r] = a * weight;
        }
    }
    PureState::new(amps)
}
