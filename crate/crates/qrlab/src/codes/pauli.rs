use std::fmt;

use num_complex::Complex64;

use crate::qlinalg::DenseOperator;

/// Phase prefactor of a Pauli string, a power of `i`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Phase {
    PlusOne,
    PlusI,
    MinusOne,
    MinusI,
}

impl Phase {
    fn from_quarter_turns(q: u8) -> Self {
        match q % 4 {
            0 => Phase::PlusOne,
            1 => Phase::PlusI,
            2 => Phase::MinusOne,
            _ => Phase::MinusI,
        }
    }

    pub fn quarter_turns(self) -> u8 {
        match self {
            Phase::PlusOne => 0,
            Phase::PlusI => 1,
            Phase::MinusOne => 2,
            Phase::MinusI => 3,
        }
    }

    pub fn value(self) -> Complex64 {
        match self {
            Phase::PlusOne => Complex64::new(1.0, 0.0),
            Phase::PlusI => Complex64::new(0.0, 1.0),
            Phase::MinusOne => Complex64::new(-1.0, 0.0),
            Phase::MinusI => Complex64::new(0.0, -1.0),
        }
    }
}

/// Pauli string `i^q X^x Z^z` on `n` qubits, with `x`/`z` support stored as
/// bit masks (qubit 0 is the lowest bit).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PauliString {
    n: usize,
    x_bits: u64,
    z_bits: u64,
    phase_q: u8,
}

impl PauliString {
    pub const MAX_QUBITS: usize = 64;

    pub fn identity(n: usize) -> Self {
        assert!(n >= 1 && n <= Self::MAX_QUBITS);
        Self {
            n,
            x_bits: 0,
            z_bits: 0,
            phase_q: 0,
        }
    }

    pub fn from_xz(n: usize, x_bits: u64, z_bits: u64) -> Self {
        assert!(n >= 1 && n <= Self::MAX_QUBITS);
        let mask = mask(n);
        Self {
            n,
            x_bits: x_bits & mask,
            z_bits: z_bits & mask,
            phase_q: 0,
        }
    }

    /// Single-qubit X on the given site.
    pub fn x_on(n: usize, site: usize) -> Self {
        Self::from_xz(n, 1 << site, 0)
    }

    /// Single-qubit Z on the given site.
    pub fn z_on(n: usize, site: usize) -> Self {
        Self::from_xz(n, 0, 1 << site)
    }

    /// Single-qubit Y on the given site (`Y = i X Z`).
    pub fn y_on(n: usize, site: usize) -> Self {
        let mut p = Self::from_xz(n, 1 << site, 1 << site);
        p.phase_q = 1;
        p
    }

    /// X on every site in the iterator.
    pub fn x_string(n: usize, sites: impl IntoIterator<Item = usize>) -> Self {
        let bits = sites.into_iter().fold(0u64, |acc, s| acc | (1 << s));
        Self::from_xz(n, bits, 0)
    }

    /// Z on every site in the iterator.
    pub fn z_string(n: usize, sites: impl IntoIterator<Item = usize>) -> Self {
        let bits = sites.into_iter().fold(0u64, |acc, s| acc | (1 << s));
        Self::from_xz(n, 0, bits)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn x_bits(&self) -> u64 {
        self.x_bits
    }

    pub fn z_bits(&self) -> u64 {
        self.z_bits
    }

    pub fn phase(&self) -> Phase {
        Phase::from_quarter_turns(self.phase_q)
    }

    /// Number of sites acted on non-trivially.
    pub fn weight(&self) -> u32 {
        (self.x_bits | self.z_bits).count_ones()
    }

    pub fn is_identity_class(&self) -> bool {
        self.x_bits == 0 && self.z_bits == 0
    }

    /// True when the string has only X/identity tensor factors.
    pub fn is_x_type(&self) -> bool {
        self.z_bits == 0
    }

    /// True when the string has only Z/identity tensor factors.
    pub fn is_z_type(&self) -> bool {
        self.x_bits == 0
    }

    /// Symplectic product: 0 when the strings commute, 1 otherwise.
    pub fn symplectic(&self, other: &Self) -> u8 {
        debug_assert_eq!(self.n, other.n);
        (((self.x_bits & other.z_bits).count_ones() + (self.z_bits & other.x_bits).count_ones())
            % 2) as u8
    }

    pub fn commutes_with(&self, other: &Self) -> bool {
        self.symplectic(other) == 0
    }

    /// Group product with phase tracking:
    /// `(i^q1 X^x1 Z^z1)(i^q2 X^x2 Z^z2) = i^(q1+q2) (-1)^(z1·x2) X^(x1^x2) Z^(z1^z2)`.
    pub fn mul(&self, other: &Self) -> Self {
        debug_assert_eq!(self.n, other.n);
        let swaps = (self.z_bits & other.x_bits).count_ones();
        Self {
            n: self.n,
            x_bits: self.x_bits ^ other.x_bits,
            z_bits: self.z_bits ^ other.z_bits,
            phase_q: ((self.phase_q as u32 + other.phase_q as u32 + 2 * swaps) % 4) as u8,
        }
    }

    pub fn dagger(&self) -> Self {
        let xz = (self.x_bits & self.z_bits).count_ones();
        Self {
            n: self.n,
            x_bits: self.x_bits,
            z_bits: self.z_bits,
            phase_q: ((4 - self.phase_q as u32 + 2 * xz) % 4) as u8,
        }
    }

    /// Same operator with the phase reset to +1.
    pub fn phaseless(&self) -> Self {
        Self {
            phase_q: 0,
            ..*self
        }
    }

    /// Canonical ordering key: weight first, then lexicographic (x, z).
    pub fn canonical_key(&self) -> (u32, u64, u64) {
        (self.weight(), self.x_bits, self.z_bits)
    }

    /// Dense matrix representation: `X^x Z^z |b> = (-1)^(z·b) |b ^ x>`,
    /// times the phase.
    pub fn to_matrix(&self) -> DenseOperator {
        let dim = 1usize << self.n;
        let mut op = DenseOperator::zeros(&vec![2; self.n]);
        let phase = self.phase().value();
        // Site 0 is the most significant factor of the basis index, so map
        // bit masks (site s = mask bit s) to index bit (n-1-s).
        let x_idx = bits_to_index_mask(self.x_bits, self.n);
        let z_idx = bits_to_index_mask(self.z_bits, self.n);
        for b in 0..dim {
            let sign = if ((b as u64 & z_idx).count_ones()) % 2 == 0 {
                1.0
            } else {
                -1.0
            };
            op.set(b ^ x_idx as usize, b, phase * sign);
        }
        op
    }
}

fn mask(n: usize) -> u64 {
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

fn bits_to_index_mask(bits: u64, n: usize) -> u64 {
    let mut out = 0u64;
    for s in 0..n {
        if bits & (1 << s) != 0 {
            out |= 1 << (n - 1 - s);
        }
    }
    out
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prefix = match self.phase() {
            Phase::PlusOne => "+",
            Phase::PlusI => "+i",
            Phase::MinusOne => "-",
            Phase::MinusI => "-i",
        };
        write!(f, "{prefix}")?;
        for s in 0..self.n {
            let x = self.x_bits >> s & 1 != 0;
            let z = self.z_bits >> s & 1 != 0;
            let c = match (x, z) {
                (false, false) => 'I',
                (true, false) => 'X',
                (false, true) => 'Z',
                (true, true) => 'Y',
            };
            write!(f, "{c}")?;
        }
        Ok(())
    }
}
