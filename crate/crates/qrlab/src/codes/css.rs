use std::sync::OnceLock;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::qlinalg::{DenseOperator, PureState};

use super::pauli::PauliString;

/// Hard cap on the Hilbert-space dimension of dense code operators.
const MAX_DENSE_DIM: usize = 1 << 14;

/// Qubit CSS/stabiliser code given by generators and logical operators.
///
/// Syndrome bits are ordered with Z-type stabilisers first, then X-type,
/// each in catalogue order. Logical class indices run over `4^k`, encoding
/// per logical qubit `j` the pair (X̄ component, Z̄ component) as
/// `class_j = x_j + 2 z_j` in base 4.
#[derive(Clone, Debug)]
pub struct CssCode {
    name: String,
    n: usize,
    k: usize,
    x_stabilisers: Vec<PauliString>,
    z_stabilisers: Vec<PauliString>,
    logical_x: Vec<PauliString>,
    logical_z: Vec<PauliString>,
    stabiliser_group: OnceLock<Vec<PauliString>>,
}

/// Which stabiliser set a syndrome measurement reads out.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SyndromeSet {
    All,
    ZOnly,
    XOnly,
}

impl CssCode {
    fn new(
        name: &str,
        n: usize,
        x_stabilisers: Vec<PauliString>,
        z_stabilisers: Vec<PauliString>,
        logical_x: Vec<PauliString>,
        logical_z: Vec<PauliString>,
    ) -> Result<Self> {
        let m = x_stabilisers.len() + z_stabilisers.len();
        let k = logical_x.len();
        if n < m + k {
            return Err(Error::Validation(format!(
                "code {name}: {m} stabilisers + {k} logicals exceed {n} qubits"
            )));
        }
        let code = Self {
            name: name.to_string(),
            n,
            k,
            x_stabilisers,
            z_stabilisers,
            logical_x,
            logical_z,
            stabiliser_group: OnceLock::new(),
        };
        code.validate()?;
        Ok(code)
    }

    fn validate(&self) -> Result<()> {
        if self.n != self.k + self.generators().len() {
            return Err(Error::Validation(format!(
                "code {}: n = {} but {} generators and k = {}",
                self.name,
                self.n,
                self.generators().len(),
                self.k
            )));
        }
        if self.logical_z.len() != self.k {
            return Err(Error::Validation(format!(
                "code {}: logical X/Z counts differ",
                self.name
            )));
        }
        for s in &self.x_stabilisers {
            if !s.is_x_type() {
                return Err(Error::Validation(format!(
                    "code {}: {s} listed as X-type stabiliser",
                    self.name
                )));
            }
        }
        for s in &self.z_stabilisers {
            if !s.is_z_type() {
                return Err(Error::Validation(format!(
                    "code {}: {s} listed as Z-type stabiliser",
                    self.name
                )));
            }
        }
        let gens = self.generators();
        for (i, a) in gens.iter().enumerate() {
            for b in gens.iter().skip(i + 1) {
                if !a.commutes_with(b) {
                    return Err(Error::Validation(format!(
                        "code {}: stabilisers {a} and {b} anticommute",
                        self.name
                    )));
                }
            }
        }
        for l in self.logical_x.iter().chain(self.logical_z.iter()) {
            for g in gens.iter() {
                if !l.commutes_with(g) {
                    return Err(Error::Validation(format!(
                        "code {}: logical {l} anticommutes with stabiliser {g}",
                        self.name
                    )));
                }
            }
        }
        for (i, lx) in self.logical_x.iter().enumerate() {
            for (j, lz) in self.logical_z.iter().enumerate() {
                let want_anticommute = i == j;
                if lx.commutes_with(lz) == want_anticommute {
                    return Err(Error::Validation(format!(
                        "code {}: logical pair ({i}, {j}) has wrong commutation",
                        self.name
                    )));
                }
            }
            for lx2 in self.logical_x.iter().skip(i + 1) {
                if !lx.commutes_with(lx2) {
                    return Err(Error::Validation(format!(
                        "code {}: logical X operators anticommute",
                        self.name
                    )));
                }
            }
        }
        for (i, lz) in self.logical_z.iter().enumerate() {
            for lz2 in self.logical_z.iter().skip(i + 1) {
                if !lz.commutes_with(lz2) {
                    return Err(Error::Validation(format!(
                        "code {}: logical Z operators anticommute",
                        self.name
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Total Hilbert-space dimension `2^n`.
    pub fn dim(&self) -> usize {
        1 << self.n
    }

    /// Logical dimension `2^k`.
    pub fn logical_dim(&self) -> usize {
        1 << self.k
    }

    /// Per-qubit local dimensions of the register, `[2; n]`.
    pub fn n_local_dims(&self) -> Vec<usize> {
        vec![2; self.n]
    }

    pub fn x_stabilisers(&self) -> &[PauliString] {
        &self.x_stabilisers
    }

    pub fn z_stabilisers(&self) -> &[PauliString] {
        &self.z_stabilisers
    }

    pub fn logical_x(&self) -> &[PauliString] {
        &self.logical_x
    }

    pub fn logical_z(&self) -> &[PauliString] {
        &self.logical_z
    }

    /// Stabiliser generators in syndrome order: Z-type first, then X-type.
    pub fn generators(&self) -> Vec<PauliString> {
        let mut gens = self.z_stabilisers.clone();
        gens.extend(self.x_stabilisers.iter().cloned());
        gens
    }

    /// Generators selected by a syndrome set, in syndrome order.
    pub fn selected_generators(&self, set: SyndromeSet) -> Vec<PauliString> {
        match set {
            SyndromeSet::All => self.generators(),
            SyndromeSet::ZOnly => self.z_stabilisers.clone(),
            SyndromeSet::XOnly => self.x_stabilisers.clone(),
        }
    }

    pub fn num_syndromes(&self) -> usize {
        1 << self.generators().len()
    }

    pub fn num_classes(&self) -> usize {
        1 << (2 * self.k)
    }

    /// All `2^(n-k)` stabiliser group elements (phases normalised away).
    pub fn stabiliser_elements(&self) -> &[PauliString] {
        self.stabiliser_group.get_or_init(|| {
            let gens = self.generators();
            let mut elements = vec![PauliString::identity(self.n)];
            for g in &gens {
                let mut extended = Vec::with_capacity(elements.len() * 2);
                for e in &elements {
                    extended.push(*e);
                    extended.push(e.mul(g).phaseless());
                }
                elements = extended;
            }
            elements
        })
    }

    /// Syndrome bits of an error: bit `i` set iff the error anticommutes
    /// with generator `i`.
    pub fn syndrome_bits(&self, error: &PauliString) -> u64 {
        let mut s = 0u64;
        for (i, g) in self.generators().iter().enumerate() {
            if error.symplectic(g) == 1 {
                s |= 1 << i;
            }
        }
        s
    }

    /// Raw commutation signature against the logical operators. This is a
    /// coset invariant, but for non-trivial syndromes its value depends on
    /// the chosen logical representatives; [`Self::logical_class`] fixes
    /// the convention by measuring relative to the syndrome's canonical
    /// pure error.
    pub(crate) fn chi_class_of(&self, error: &PauliString) -> usize {
        self.chi_class(error)
    }

    fn chi_class(&self, error: &PauliString) -> usize {
        let mut class = 0usize;
        for j in 0..self.k {
            let x_j = error.symplectic(&self.logical_z[j]) as usize;
            let z_j = error.symplectic(&self.logical_x[j]) as usize;
            class += (x_j + 2 * z_j) << (2 * j);
        }
        class
    }

    /// Class offset of a syndrome sector: the commutation signature of the
    /// sector's canonical pure error (its overall lowest-weight element).
    /// Subtracting it puts that element in the identity class, so weight-1
    /// correctable errors are labelled trivial.
    pub(crate) fn sector_offset(&self, syndrome: u64) -> usize {
        let mut best: Option<(PauliString, usize)> = None;
        for chi in 0..self.num_classes() {
            let member = self
                .solve_coset_member(syndrome, chi)
                .expect("syndrome sector is always populated");
            let rep = self.minimise_over_stabilisers(&member);
            match &best {
                Some((cur, _)) if cur.canonical_key() <= rep.canonical_key() => {}
                _ => best = Some((rep, chi)),
            }
        }
        best.expect("at least one class per sector").1
    }

    /// Logical class index of an error, in `0..4^k`; the identity class (0)
    /// is the coset of the syndrome's canonical pure error.
    pub fn logical_class(&self, error: &PauliString) -> usize {
        let chi = self.chi_class(error);
        chi ^ self.sector_offset(self.syndrome_bits(error))
    }

    /// Classifies an error into its `(syndrome, logical class)` coset and
    /// returns the canonical (lowest-weight, lexicographically first) coset
    /// representative.
    pub fn syndrome_and_logical_class(&self, error: &PauliString) -> (u64, usize, PauliString) {
        let s = self.syndrome_bits(error);
        let class = self.logical_class(error);
        let rep = self.minimise_over_stabilisers(error);
        (s, class, rep)
    }

    fn minimise_over_stabilisers(&self, error: &PauliString) -> PauliString {
        let mut best = error.phaseless();
        let mut best_key = best.canonical_key();
        for g in self.stabiliser_elements() {
            let cand = error.mul(g).phaseless();
            let key = cand.canonical_key();
            if key < best_key {
                best_key = key;
                best = cand;
            }
        }
        best
    }

    /// Canonical representative of the coset labelled `(syndrome, class)`,
    /// constructed from scratch by a GF(2) solve plus coset minimisation.
    pub fn canonical_representative(&self, syndrome: u64, class: usize) -> Result<PauliString> {
        if class >= self.num_classes() {
            return Err(Error::Argument(format!("class {class} out of range")));
        }
        let chi = class ^ self.sector_offset(syndrome);
        let e0 = self.solve_coset_member(syndrome, chi)?;
        Ok(self.minimise_over_stabilisers(&e0))
    }

    /// Finds some Pauli with the requested syndrome and raw commutation
    /// signature by solving the symplectic linear system over GF(2).
    fn solve_coset_member(&self, syndrome: u64, chi: usize) -> Result<PauliString> {
        let n = self.n;
        if syndrome >= self.num_syndromes() as u64 || chi >= self.num_classes() {
            return Err(Error::Argument(format!(
                "coset label ({syndrome}, {chi}) out of range"
            )));
        }
        // Unknown vector u = (x | z), 2n bits. Constraint rows pair x with
        // the partner's z bits and vice versa (symplectic product).
        let mut rows: Vec<(u128, bool)> = Vec::new();
        let row_of =
            |p: &PauliString| -> u128 { (p.z_bits() as u128) | ((p.x_bits() as u128) << n) };
        for (i, g) in self.generators().iter().enumerate() {
            rows.push((row_of(g), syndrome >> i & 1 == 1));
        }
        for j in 0..self.k {
            let x_j = chi >> (2 * j) & 1 == 1;
            let z_j = chi >> (2 * j + 1) & 1 == 1;
            rows.push((row_of(&self.logical_z[j]), x_j));
            rows.push((row_of(&self.logical_x[j]), z_j));
        }
        // Gaussian elimination.
        let cols = 2 * n;
        let mut pivots: Vec<(usize, usize)> = Vec::new(); // (row, col)
        let mut r = 0usize;
        for c in 0..cols {
            if let Some(pr) = (r..rows.len()).find(|&i| rows[i].0 >> c & 1 == 1) {
                rows.swap(r, pr);
                for i in 0..rows.len() {
                    if i != r && rows[i].0 >> c & 1 == 1 {
                        rows[i].0 ^= rows[r].0;
                        rows[i].1 ^= rows[r].1;
                    }
                }
                pivots.push((r, c));
                r += 1;
            }
        }
        if rows[r..].iter().any(|&(row, t)| row == 0 && t) {
            return Err(Error::Consistency(format!(
                "coset system for ({syndrome}, {chi}) is inconsistent"
            )));
        }
        let mut u = 0u128;
        for &(row, col) in &pivots {
            if rows[row].1 {
                u |= 1 << col;
            }
        }
        // u packs (e_x in the low n bits, e_z in the high n bits), pairing
        // with rows packed as (g_z low, g_x high).
        let x_bits = (u & ((1u128 << n) - 1)) as u64;
        let z_bits = (u >> n) as u64;
        let e = PauliString::from_xz(n, x_bits, z_bits);
        debug_assert_eq!(self.syndrome_bits(&e), syndrome);
        debug_assert_eq!(self.chi_class(&e), chi);
        Ok(e)
    }

    /// Dense codespace projector, built as the stabiliser-group average
    /// `(1/|S|) sum_g g`.
    pub fn codespace_projector(&self) -> Result<DenseOperator> {
        let dim = self.dim();
        if dim > MAX_DENSE_DIM {
            return Err(Error::Resource(format!(
                "dense projector at dimension {dim} exceeds cap {MAX_DENSE_DIM}"
            )));
        }
        let elements = self.stabiliser_elements();
        let weight = 1.0 / elements.len() as f64;
        let mut op = DenseOperator::zeros(&vec![2; self.n]);
        for g in elements {
            accumulate_pauli(&mut op, g, Complex64::new(weight, 0.0));
        }
        Ok(op)
    }

    /// Projector onto the sector with the given syndrome bits over the
    /// selected generators.
    pub fn syndrome_sector_projector(
        &self,
        set: SyndromeSet,
        syndrome: u64,
    ) -> Result<DenseOperator> {
        let dim = self.dim();
        if dim > MAX_DENSE_DIM {
            return Err(Error::Resource(format!(
                "dense projector at dimension {dim} exceeds cap {MAX_DENSE_DIM}"
            )));
        }
        let gens = self.selected_generators(set);
        let m = gens.len();
        let mut op = DenseOperator::zeros(&vec![2; self.n]);
        let weight = 1.0 / (1u64 << m) as f64;
        for subset in 0u64..(1 << m) {
            let mut g = PauliString::identity(self.n);
            for (i, gen) in gens.iter().enumerate() {
                if subset >> i & 1 == 1 {
                    g = g.mul(gen);
                }
            }
            let sign = if (subset & syndrome).count_ones() % 2 == 0 {
                weight
            } else {
                -weight
            };
            accumulate_pauli(&mut op, &g, Complex64::new(sign, 0.0));
        }
        Ok(op)
    }

    /// Logical codewords `|b̄> = X̄^b |0̄>` with `|0̄>` the normalised
    /// projection of `|0...0>` onto the codespace. Index bit `j` of `b`
    /// (counting from the most significant of `k` bits) selects `X̄_j`.
    pub fn logical_codewords(&self) -> Result<Vec<PureState>> {
        let dim = self.dim();
        if dim > MAX_DENSE_DIM {
            return Err(Error::Resource(format!(
                "codeword construction at dimension {dim} exceeds cap {MAX_DENSE_DIM}"
            )));
        }
        // |0bar> as the group average of g|0...0>.
        let mut zero = vec![Complex64::new(0.0, 0.0); dim];
        for g in self.stabiliser_elements() {
            let mut basis = vec![Complex64::new(0.0, 0.0); dim];
            basis[0] = Complex64::new(1.0, 0.0);
            let image = g.apply_vec(&basis);
            for (z, i) in zero.iter_mut().zip(image.iter()) {
                *z += i;
            }
        }
        let zero = PureState::normalised(zero)?;
        let mut words = Vec::with_capacity(self.logical_dim());
        for b in 0..self.logical_dim() {
            let mut v = zero.amplitudes().to_vec();
            for j in 0..self.k {
                if b >> (self.k - 1 - j) & 1 == 1 {
                    v = self.logical_x[j].apply_vec(&v);
                }
            }
            words.push(PureState::new(v)?);
        }
        Ok(words)
    }

    pub fn export(&self) -> CodeExport {
        let rows = |ps: &[PauliString]| ps.iter().map(PauliRow::from).collect();
        CodeExport {
            name: self.name.clone(),
            n: self.n,
            k: self.k,
            z_stabilisers: rows(&self.z_stabilisers),
            x_stabilisers: rows(&self.x_stabilisers),
            logical_x: rows(&self.logical_x),
            logical_z: rows(&self.logical_z),
        }
    }
}

/// Adds `weight * P` to a dense operator using the permutation structure of
/// the Pauli string.
fn accumulate_pauli(op: &mut DenseOperator, p: &PauliString, weight: Complex64) {
    let n = p.n();
    let dim = 1usize << n;
    let phase = p.phase().value() * weight;
    let x_idx = bits_to_index_mask(p.x_bits(), n);
    let z_idx = bits_to_index_mask(p.z_bits(), n);
    for b in 0..dim {
        let sign = if ((b as u64 & z_idx).count_ones()) % 2 == 0 {
            1.0
        } else {
            -1.0
        };
        let i = b ^ x_idx as usize;
        let v = op.get(i, b) + phase * sign;
        op.set(i, b, v);
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

impl PauliString {
    /// Applies the string to a state vector: `X^x Z^z |b> = ±|b ^ x>`.
    pub fn apply_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        let n = self.n();
        let dim = 1usize << n;
        assert_eq!(v.len(), dim);
        let phase = self.phase().value();
        let x_idx = bits_to_index_mask(self.x_bits(), n) as usize;
        let z_idx = bits_to_index_mask(self.z_bits(), n);
        let mut out = vec![Complex64::new(0.0, 0.0); dim];
        for (b, &amp) in v.iter().enumerate() {
            let sign = if ((b as u64 & z_idx).count_ones()) % 2 == 0 {
                1.0
            } else {
                -1.0
            };
            out[b ^ x_idx] = amp * phase * sign;
        }
        out
    }
}

/// JSON-exportable description of a code (bit rows per operator).
#[derive(Debug, Serialize)]
pub struct CodeExport {
    pub name: String,
    pub n: usize,
    pub k: usize,
    pub z_stabilisers: Vec<PauliRow>,
    pub x_stabilisers: Vec<PauliRow>,
    pub logical_x: Vec<PauliRow>,
    pub logical_z: Vec<PauliRow>,
}

#[derive(Debug, Serialize)]
pub struct PauliRow {
    pub x: Vec<u8>,
    pub z: Vec<u8>,
}

impl From<&PauliString> for PauliRow {
    fn from(p: &PauliString) -> Self {
        let n = p.n();
        PauliRow {
            x: (0..n).map(|s| (p.x_bits() >> s & 1) as u8).collect(),
            z: (0..n).map(|s| (p.z_bits() >> s & 1) as u8).collect(),
        }
    }
}

/// Names understood by [`build_code`].
pub const CATALOGUE: &[(&str, &str)] = &[
    ("trivial1", "single qubit, no stabilisers (k = 1)"),
    ("trivial2", "two qubits, no stabilisers (k = 2)"),
    ("rep2", "[[2,1]] repetition code, stabiliser ZZ"),
    ("rep3", "[[3,1]] bit-flip repetition code"),
    ("rep5", "[[5,1]] bit-flip repetition code"),
    ("rep7", "[[7,1]] bit-flip repetition code"),
    ("css422", "[[4,2,2]] error-detecting code"),
    (
        "steane713",
        "[[7,1,3]] Steane code from the Hamming [7,4,3] checks",
    ),
    ("surface5", "distance-2 planar surface code patch, 5 qubits"),
    (
        "surface13",
        "distance-3 planar surface code patch, 13 qubits",
    ),
];

/// Builds a catalogued code by name.
pub fn build_code(name: &str) -> Result<CssCode> {
    match name {
        "trivial1" => trivial(1, "trivial1"),
        "trivial2" => trivial(2, "trivial2"),
        "rep2" => repetition(2),
        "rep3" => repetition(3),
        "rep5" => repetition(5),
        "rep7" => repetition(7),
        "css422" => css422(),
        "steane713" => steane(),
        "surface5" => surface5(),
        "surface13" => surface13(),
        other => Err(Error::UnknownCode(other.to_string())),
    }
}

fn trivial(n: usize, name: &str) -> Result<CssCode> {
    let logical_x = (0..n).map(|j| PauliString::x_on(n, j)).collect();
    let logical_z = (0..n).map(|j| PauliString::z_on(n, j)).collect();
    CssCode::new(name, n, vec![], vec![], logical_x, logical_z)
}

fn repetition(n: usize) -> Result<CssCode> {
    let z_stabs = (0..n - 1)
        .map(|i| PauliString::z_string(n, [i, i + 1]))
        .collect();
    let logical_x = vec![PauliString::x_string(n, 0..n)];
    let logical_z = vec![PauliString::z_on(n, 0)];
    CssCode::new(&format!("rep{n}"), n, vec![], z_stabs, logical_x, logical_z)
}

fn css422() -> Result<CssCode> {
    let n = 4;
    let x_stabs = vec![PauliString::x_string(n, 0..4)];
    let z_stabs = vec![PauliString::z_string(n, 0..4)];
    let logical_x = vec![
        PauliString::x_string(n, [0, 1]),
        PauliString::x_string(n, [0, 2]),
    ];
    let logical_z = vec![
        PauliString::z_string(n, [0, 2]),
        PauliString::z_string(n, [0, 1]),
    ];
    CssCode::new("css422", n, x_stabs, z_stabs, logical_x, logical_z)
}

fn steane() -> Result<CssCode> {
    let n = 7;
    // Hamming [7,4,3] parity checks; row r contains positions whose
    // (1-indexed) binary expansion has bit r set.
    let supports: [&[usize]; 3] = [&[0, 2, 4, 6], &[1, 2, 5, 6], &[3, 4, 5, 6]];
    let x_stabs = supports
        .iter()
        .map(|s| PauliString::x_string(n, s.iter().copied()))
        .collect();
    let z_stabs = supports
        .iter()
        .map(|s| PauliString::z_string(n, s.iter().copied()))
        .collect();
    let logical_x = vec![PauliString::x_string(n, 0..7)];
    let logical_z = vec![PauliString::z_string(n, 0..7)];
    CssCode::new("steane713", n, x_stabs, z_stabs, logical_x, logical_z)
}

fn surface5() -> Result<CssCode> {
    // Distance-2 planar patch:
    //   q0   q1
    //      q2
    //   q3   q4
    let n = 5;
    let x_stabs = vec![
        PauliString::x_string(n, [0, 2, 3]),
        PauliString::x_string(n, [1, 2, 4]),
    ];
    let z_stabs = vec![
        PauliString::z_string(n, [0, 1, 2]),
        PauliString::z_string(n, [2, 3, 4]),
    ];
    let logical_x = vec![PauliString::x_string(n, [0, 1])];
    let logical_z = vec![PauliString::z_string(n, [0, 3])];
    CssCode::new("surface5", n, x_stabs, z_stabs, logical_x, logical_z)
}

fn surface13() -> Result<CssCode> {
    // Distance-3 planar patch (13 qubits on a 5x5 checkerboard, row by row):
    //   q0    q1    q2
    //      q3    q4
    //   q5    q6    q7
    //      q8    q9
    //   q10   q11   q12
    let n = 13;
    let z_stabs = vec![
        PauliString::z_string(n, [0, 3, 5]),
        PauliString::z_string(n, [1, 3, 4, 6]),
        PauliString::z_string(n, [2, 4, 7]),
        PauliString::z_string(n, [5, 8, 10]),
        PauliString::z_string(n, [6, 8, 9, 11]),
        PauliString::z_string(n, [7, 9, 12]),
    ];
    let x_stabs = vec![
        PauliString::x_string(n, [0, 1, 3]),
        PauliString::x_string(n, [1, 2, 4]),
        PauliString::x_string(n, [3, 5, 6, 8]),
        PauliString::x_string(n, [4, 6, 7, 9]),
        PauliString::x_string(n, [8, 10, 11]),
        PauliString::x_string(n, [9, 11, 12]),
    ];
    let logical_x = vec![PauliString::x_string(n, [0, 5, 10])];
    let logical_z = vec![PauliString::z_string(n, [0, 1, 2])];
    CssCode::new("surface13", n, x_stabs, z_stabs, logical_x, logical_z)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalogue_codes_validate() {
        for (name, _) in CATALOGUE {
            let code = build_code(name).unwrap_or_else(|e| panic!("{name}: {e}"));
            assert_eq!(code.name(), *name);
        }
        assert!(matches!(build_code("nope"), Err(Error::UnknownCode(_))));
    }

    #[test]
    fn rep3_structure() {
        let code = build_code("rep3").unwrap();
        assert_eq!(code.n(), 3);
        assert_eq!(code.k(), 1);
        let pi = code.codespace_projector().unwrap();
        assert!((pi.trace().re - 2.0).abs() < 1e-12);
        // Pi = |000><000| + |111><111|
        for i in 0..8 {
            for j in 0..8 {
                let expect = if (i == 0 && j == 0) || (i == 7 && j == 7) {
                    1.0
                } else {
                    0.0
                };
                assert!((pi.get(i, j) - Complex64::new(expect, 0.0)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn projector_properties_catalogue() {
        for name in ["rep3", "rep5", "css422", "steane713", "surface5"] {
            let code = build_code(name).unwrap();
            let pi = code.codespace_projector().unwrap();
            // Pi² = Pi, Pi† = Pi, tr Pi = 2^k, g Pi = Pi.
            assert!(
                (&pi.matmul(&pi) - &pi).max_abs() < 1e-10,
                "{name}: not idempotent"
            );
            assert!(pi.hermiticity_defect() < 1e-12, "{name}: not Hermitian");
            assert!(
                (pi.trace().re - code.logical_dim() as f64).abs() < 1e-9,
                "{name}: trace {} != 2^k",
                pi.trace().re
            );
            for g in code.generators() {
                let gp = g.to_matrix().matmul(&pi);
                assert!((&gp - &pi).max_abs() < 1e-10, "{name}: {g} Pi != Pi");
            }
        }
    }

    #[test]
    fn css422_projector_rank_and_fixpoint() {
        let code = build_code("css422").unwrap();
        let pi = code.codespace_projector().unwrap();
        assert!((pi.trace().re - 4.0).abs() < 1e-12);
        let xxxx = PauliString::x_string(4, 0..4).to_matrix();
        assert!((&pi.matmul(&xxxx) - &pi).max_abs() < 1e-12);
    }

    #[test]
    fn steane_codeword_is_hamming_superposition() {
        // |0bar> is the uniform superposition over the 8 codewords of the
        // dual Hamming code (the X-stabiliser group orbit of |0...0>);
        // check Pi|0bar> = |0bar> and that support.
        let code = build_code("steane713").unwrap();
        let pi = code.codespace_projector().unwrap();
        assert!((pi.trace().re - 2.0).abs() < 1e-10);
        let words = code.logical_codewords().unwrap();
        let zero = &words[0];
        let projected = pi.apply_vec(zero.amplitudes());
        let diff: f64 = projected
            .iter()
            .zip(zero.amplitudes())
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt();
        assert!(diff < 1e-10);
        let support: Vec<usize> = (0..128)
            .filter(|&i| zero.amplitudes()[i].norm() > 1e-12)
            .collect();
        assert_eq!(support.len(), 8);
        // Every supported basis state satisfies the Z parity checks.
        for idx in support {
            for zg in code.z_stabilisers() {
                let z_mask = bits_to_index_mask(zg.z_bits(), 7);
                assert_eq!((idx as u64 & z_mask).count_ones() % 2, 0);
            }
        }
    }

    #[test]
    fn codewords_are_orthonormal() {
        for name in ["rep3", "css422", "steane713", "surface5"] {
            let code = build_code(name).unwrap();
            let words = code.logical_codewords().unwrap();
            assert_eq!(words.len(), code.logical_dim());
            for (a, wa) in words.iter().enumerate() {
                for (b, wb) in words.iter().enumerate() {
                    let ip: Complex64 = wa
                        .amplitudes()
                        .iter()
                        .zip(wb.amplitudes())
                        .map(|(x, y)| x.conj() * y)
                        .sum();
                    let expect = if a == b { 1.0 } else { 0.0 };
                    assert!(
                        (ip - Complex64::new(expect, 0.0)).norm() < 1e-10,
                        "{name} ({a},{b})"
                    );
                }
            }
        }
    }

    #[test]
    fn rep3_syndrome_classification() {
        let code = build_code("rep3").unwrap();
        let id = PauliString::identity(3);
        let (s, class, rep) = code.syndrome_and_logical_class(&id);
        assert_eq!((s, class), (0, 0));
        assert!(rep.is_identity_class());

        // X on qubit 0 trips only the Z0Z1 stabiliser.
        let x0 = PauliString::x_on(3, 0);
        let (s, class, rep) = code.syndrome_and_logical_class(&x0);
        assert_eq!(s, 0b01);
        assert_eq!(class, 0);
        assert_eq!(rep, x0);

        // XXX is the logical X class at trivial syndrome.
        let xxx = PauliString::x_string(3, 0..3);
        let (s, class, _) = code.syndrome_and_logical_class(&xxx);
        assert_eq!(s, 0);
        assert_eq!(class, 1);
    }

    #[test]
    fn coset_partition_counts() {
        // Every Pauli string lands in exactly one coset; coset sizes are
        // |S| = 2^(n-k) each, and there are 2^(n-k) syndromes x 4^k classes.
        for name in ["rep3", "css422", "surface5"] {
            let code = build_code(name).unwrap();
            let n = code.n();
            let mut counts = vec![0usize; code.num_syndromes() * code.num_classes()];
            for x in 0..(1u64 << n) {
                for z in 0..(1u64 << n) {
                    let e = PauliString::from_xz(n, x, z);
                    let s = code.syndrome_bits(&e) as usize;
                    let c = code.logical_class(&e);
                    counts[c * code.num_syndromes() + s] += 1;
                }
            }
            let expected = 1usize << (n - code.k());
            assert!(counts.iter().all(|&c| c == expected), "{name}");
        }
    }

    #[test]
    fn canonical_representative_matches_classification() {
        let code = build_code("css422").unwrap();
        for s in 0..code.num_syndromes() as u64 {
            for class in 0..code.num_classes() {
                let rep = code.canonical_representative(s, class).unwrap();
                assert_eq!(code.syndrome_bits(&rep), s);
                assert_eq!(code.logical_class(&rep), class);
                // Canonical rep of its own coset is itself.
                let (_, _, rep2) = code.syndrome_and_logical_class(&rep);
                assert_eq!(rep, rep2);
            }
        }
    }

    #[test]
    fn syndrome_sector_projectors_resolve_identity() {
        let code = build_code("rep3").unwrap();
        let mut sum = DenseOperator::zeros(&[2, 2, 2]);
        for s in 0..4u64 {
            let p = code.syndrome_sector_projector(SyndromeSet::All, s).unwrap();
            assert!((&p.matmul(&p) - &p).max_abs() < 1e-12);
            assert!((p.trace().re - 2.0).abs() < 1e-12);
            sum = &sum + &p;
        }
        assert!((&sum - &DenseOperator::identity(&[2, 2, 2])).max_abs() < 1e-12);
    }

    #[test]
    fn export_round_trips_to_json() {
        let code = build_code("css422").unwrap();
        let json = serde_json::to_string(&code.export()).unwrap();
        assert!(json.contains("\"n\":4"));
        assert!(json.contains("\"k\":2"));
    }
}
