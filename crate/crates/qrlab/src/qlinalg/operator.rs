use std::fmt;
use std::ops::{Add, Mul, Sub};

use faer::{c64, Mat};
use num_complex::Complex64;

use crate::error::{Error, Result};

use super::MAX_TENSOR_DIM;

/// Square complex matrix over a register of qudits.
///
/// `local_dims` records the per-site dimensions; their product is the total
/// dimension `dim`. Entries are stored row-major, with site 0 the most
/// significant factor of the basis index.
#[derive(Clone, PartialEq)]
pub struct DenseOperator {
    dim: usize,
    local_dims: Vec<usize>,
    entries: Vec<Complex64>,
}

impl fmt::Debug for DenseOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "DenseOperator(dim={}, sites={:?})",
            self.dim, self.local_dims
        )
    }
}

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

impl DenseOperator {
    pub fn zeros(local_dims: &[usize]) -> Self {
        let dim = product_dim(local_dims);
        Self {
            dim,
            local_dims: local_dims.to_vec(),
            entries: vec![ZERO; dim * dim],
        }
    }

    pub fn identity(local_dims: &[usize]) -> Self {
        let mut op = Self::zeros(local_dims);
        for i in 0..op.dim {
            op.entries[i * op.dim + i] = ONE;
        }
        op
    }

    /// Builds an operator from row-major entries.
    pub fn from_entries(local_dims: &[usize], entries: Vec<Complex64>) -> Result<Self> {
        let dim = product_dim(local_dims);
        if entries.len() != dim * dim {
            return Err(Error::Validation(format!(
                "entry array has length {}, expected {}x{}",
                entries.len(),
                dim,
                dim
            )));
        }
        Ok(Self {
            dim,
            local_dims: local_dims.to_vec(),
            entries,
        })
    }

    pub fn from_fn(local_dims: &[usize], f: impl Fn(usize, usize) -> Complex64) -> Self {
        let dim = product_dim(local_dims);
        let mut entries = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                entries.push(f(i, j));
            }
        }
        Self {
            dim,
            local_dims: local_dims.to_vec(),
            entries,
        }
    }

    pub fn from_diag(local_dims: &[usize], diag: &[f64]) -> Self {
        let mut op = Self::zeros(local_dims);
        assert_eq!(diag.len(), op.dim);
        for (i, &d) in diag.iter().enumerate() {
            op.entries[i * op.dim + i] = Complex64::new(d, 0.0);
        }
        op
    }

    /// Rank-one projector `|v><v|` (v need not be normalised).
    pub fn outer(local_dims: &[usize], v: &[Complex64], w: &[Complex64]) -> Self {
        let dim = product_dim(local_dims);
        assert_eq!(v.len(), dim);
        assert_eq!(w.len(), dim);
        Self::from_fn(local_dims, |i, j| v[i] * w[j].conj())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn local_dims(&self) -> &[usize] {
        &self.local_dims
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.entries[i * self.dim + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.entries[i * self.dim + j] = v;
    }

    /// Reinterprets the register structure without touching entries.
    pub fn with_local_dims(mut self, local_dims: &[usize]) -> Result<Self> {
        if product_dim(local_dims) != self.dim {
            return Err(Error::Argument(format!(
                "local dims {:?} do not multiply to {}",
                local_dims, self.dim
            )));
        }
        self.local_dims = local_dims.to_vec();
        Ok(self)
    }

    pub fn dagger(&self) -> Self {
        Self::from_fn(&self.local_dims, |i, j| self.get(j, i).conj())
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest entry-wise deviation from Hermiticity, `max |a_ij - conj(a_ji)|`.
    pub fn hermiticity_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.dim {
            for j in i..self.dim {
                let d = (self.get(i, j) - self.get(j, i).conj()).norm();
                worst = worst.max(d);
            }
        }
        worst
    }

    pub fn scaled(&self, s: Complex64) -> Self {
        Self {
            dim: self.dim,
            local_dims: self.local_dims.clone(),
            entries: self.entries.iter().map(|z| z * s).collect(),
        }
    }

    /// Symmetrised Hermitian part `(a + a†)/2`.
    pub fn hermitian_part(&self) -> Self {
        Self::from_fn(&self.local_dims, |i, j| {
            (self.get(i, j) + self.get(j, i).conj()) * 0.5
        })
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "dimension mismatch in matmul");
        let dim = self.dim;
        if dim >= 48 {
            let a = self.to_faer();
            let b = other.to_faer();
            return Self::from_faer(&(&a * &b), &self.local_dims);
        }
        let mut out = vec![ZERO; dim * dim];
        for i in 0..dim {
            for k in 0..dim {
                let aik = self.entries[i * dim + k];
                if aik.norm_sqr() < 1e-60 {
                    continue;
                }
                let row = &other.entries[k * dim..(k + 1) * dim];
                let dst = &mut out[i * dim..(i + 1) * dim];
                for (d, b) in dst.iter_mut().zip(row.iter()) {
                    *d += aik * b;
                }
            }
        }
        Self {
            dim,
            local_dims: self.local_dims.clone(),
            entries: out,
        }
    }

    pub fn apply_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.dim);
        let mut out = vec![ZERO; self.dim];
        for i in 0..self.dim {
            let mut acc = ZERO;
            let row = &self.entries[i * self.dim..(i + 1) * self.dim];
            for (a, x) in row.iter().zip(v.iter()) {
                acc += a * x;
            }
            out[i] = acc;
        }
        out
    }

    /// `<v| self |v>`.
    pub fn expectation(&self, v: &[Complex64]) -> Complex64 {
        let av = self.apply_vec(v);
        v.iter().zip(av.iter()).map(|(x, y)| x.conj() * y).sum()
    }

    /// Kronecker product; concatenates the site lists.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        let dim = self
            .dim
            .checked_mul(other.dim)
            .filter(|&d| d <= MAX_TENSOR_DIM)
            .ok_or_else(|| {
                Error::DimensionLimit(format!(
                    "tensor product dimension {}x{} exceeds cap {}",
                    self.dim, other.dim, MAX_TENSOR_DIM
                ))
            })?;
        let mut local_dims = self.local_dims.clone();
        local_dims.extend_from_slice(&other.local_dims);
        let db = other.dim;
        let mut entries = vec![ZERO; dim * dim];
        for ia in 0..self.dim {
            for ja in 0..self.dim {
                let a = self.entries[ia * self.dim + ja];
                if a.norm_sqr() < 1e-60 {
                    continue;
                }
                for ib in 0..db {
                    let dst_row = (ia * db + ib) * dim + ja * db;
                    let src_row = &other.entries[ib * db..(ib + 1) * db];
                    let dst = &mut entries[dst_row..dst_row + db];
                    for (d, b) in dst.iter_mut().zip(src_row.iter()) {
                        *d += a * b;
                    }
                }
            }
        }
        Ok(Self {
            dim,
            local_dims,
            entries,
        })
    }

    /// Partial trace keeping the listed sites, in the order given.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<Self> {
        let m = self.local_dims.len();
        for &s in keep {
            if s >= m {
                return Err(Error::Argument(format!(
                    "site index {s} out of range for {m} sites"
                )));
            }
        }
        let mut seen = vec![false; m];
        for &s in keep {
            if seen[s] {
                return Err(Error::Argument(format!("duplicate site index {s}")));
            }
            seen[s] = true;
        }
        let traced: Vec<usize> = (0..m).filter(|s| !seen[*s]).collect();
        let strides = strides_of(&self.local_dims);
        let keep_dims: Vec<usize> = keep.iter().map(|&s| self.local_dims[s]).collect();
        let traced_dims: Vec<usize> = traced.iter().map(|&s| self.local_dims[s]).collect();
        let dk: usize = keep_dims.iter().product();

        // Base offset of each kept multi-index and each traced multi-index.
        let keep_offsets = enumerate_offsets(
            &keep_dims,
            &keep.iter().map(|&s| strides[s]).collect::<Vec<_>>(),
        );
        let traced_offsets = enumerate_offsets(
            &traced_dims,
            &traced.iter().map(|&s| strides[s]).collect::<Vec<_>>(),
        );

        let mut entries = vec![ZERO; dk * dk];
        for (a, &off_a) in keep_offsets.iter().enumerate() {
            for (b, &off_b) in keep_offsets.iter().enumerate() {
                let mut acc = ZERO;
                for &off_t in &traced_offsets {
                    acc += self.entries[(off_a + off_t) * self.dim + (off_b + off_t)];
                }
                entries[a * dk + b] = acc;
            }
        }
        Ok(Self {
            dim: dk,
            local_dims: keep_dims,
            entries,
        })
    }

    pub(crate) fn to_faer(&self) -> Mat<c64> {
        Mat::from_fn(self.dim, self.dim, |i, j| self.entries[i * self.dim + j])
    }

    pub(crate) fn from_faer(m: &Mat<c64>, local_dims: &[usize]) -> Self {
        let dim = m.nrows();
        debug_assert_eq!(product_dim(local_dims), dim);
        let mut entries = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                entries.push(m[(i, j)]);
            }
        }
        Self {
            dim,
            local_dims: local_dims.to_vec(),
            entries,
        }
    }

    // Single-qubit constants.
    pub fn pauli_i() -> Self {
        Self::identity(&[2])
    }

    pub fn pauli_x() -> Self {
        Self::from_entries(&[2], vec![ZERO, ONE, ONE, ZERO]).unwrap()
    }

    pub fn pauli_y() -> Self {
        Self::from_entries(
            &[2],
            vec![
                ZERO,
                Complex64::new(0.0, -1.0),
                Complex64::new(0.0, 1.0),
                ZERO,
            ],
        )
        .unwrap()
    }

    pub fn pauli_z() -> Self {
        Self::from_entries(&[2], vec![ONE, ZERO, ZERO, -ONE]).unwrap()
    }

    pub fn hadamard() -> Self {
        let s = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        Self::from_entries(&[2], vec![s, s, s, -s]).unwrap()
    }
}

fn product_dim(local_dims: &[usize]) -> usize {
    assert!(!local_dims.is_empty(), "operator needs at least one site");
    local_dims.iter().product()
}

fn strides_of(local_dims: &[usize]) -> Vec<usize> {
    let m = local_dims.len();
    let mut strides = vec![1usize; m];
    for s in (0..m.saturating_sub(1)).rev() {
        strides[s] = strides[s + 1] * local_dims[s + 1];
    }
    strides
}

/// All base offsets spanned by a multi-index with the given dims/strides.
fn enumerate_offsets(dims: &[usize], strides: &[usize]) -> Vec<usize> {
    let total: usize = dims.iter().product();
    let mut offsets = Vec::with_capacity(total);
    let mut digits = vec![0usize; dims.len()];
    for _ in 0..total {
        offsets.push(digits.iter().zip(strides).map(|(d, s)| d * s).sum());
        for pos in (0..dims.len()).rev() {
            digits[pos] += 1;
            if digits[pos] < dims[pos] {
                break;
            }
            digits[pos] = 0;
        }
    }
    if dims.is_empty() {
        // A zero-site register still has the single empty offset.
        return vec![0];
    }
    offsets
}

/// Reduced density operator of a pure state, keeping the listed sites.
///
/// Never materialises the global density matrix: `rho_K[a, b] = sum_t
/// psi[(a,t)] conj(psi[(b,t)])`.
pub fn pure_state_marginal(
    amps: &[Complex64],
    local_dims: &[usize],
    keep: &[usize],
) -> Result<DenseOperator> {
    let m = local_dims.len();
    for &s in keep {
        if s >= m {
            return Err(Error::Argument(format!(
                "site index {s} out of range for {m} sites"
            )));
        }
    }
    let dim: usize = local_dims.iter().product();
    if amps.len() != dim {
        return Err(Error::Argument(format!(
            "state vector length {} does not match dimension {}",
            amps.len(),
            dim
        )));
    }
    let strides = strides_of(local_dims);
    let kept: Vec<bool> = {
        let mut v = vec![false; m];
        for &s in keep {
            v[s] = true;
        }
        v
    };
    let traced: Vec<usize> = (0..m).filter(|s| !kept[*s]).collect();
    let keep_dims: Vec<usize> = keep.iter().map(|&s| local_dims[s]).collect();
    let traced_dims: Vec<usize> = traced.iter().map(|&s| local_dims[s]).collect();
    let dk: usize = keep_dims.iter().product();

    let keep_offsets = enumerate_offsets(
        &keep_dims,
        &keep.iter().map(|&s| strides[s]).collect::<Vec<_>>(),
    );
    let traced_offsets = enumerate_offsets(
        &traced_dims,
        &traced.iter().map(|&s| strides[s]).collect::<Vec<_>>(),
    );

    let mut entries = vec![ZERO; dk * dk];
    for (a, &off_a) in keep_offsets.iter().enumerate() {
        for (b, &off_b) in keep_offsets.iter().enumerate() {
            let mut acc = ZERO;
            for &off_t in &traced_offsets {
                acc += amps[off_a + off_t] * amps[off_b + off_t].conj();
            }
            entries[a * dk + b] = acc;
        }
    }
    DenseOperator::from_entries(&keep_dims, entries)
}

impl Add for &DenseOperator {
    type Output = DenseOperator;
    fn add(self, rhs: &DenseOperator) -> DenseOperator {
        assert_eq!(self.dim, rhs.dim);
        DenseOperator {
            dim: self.dim,
            local_dims: self.local_dims.clone(),
            entries: self
                .entries
                .iter()
                .zip(rhs.entries.iter())
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &DenseOperator {
    type Output = DenseOperator;
    fn sub(self, rhs: &DenseOperator) -> DenseOperator {
        assert_eq!(self.dim, rhs.dim);
        DenseOperator {
            dim: self.dim,
            local_dims: self.local_dims.clone(),
            entries: self
                .entries
                .iter()
                .zip(rhs.entries.iter())
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl Mul for &DenseOperator {
    type Output = DenseOperator;
    fn mul(self, rhs: &DenseOperator) -> DenseOperator {
        self.matmul(rhs)
    }
}
