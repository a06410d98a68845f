use crate::error::{Error, Result};

use super::css::CssCode;
use super::pauli::PauliString;

/// Cap on the number of error strings enumerated by [`joint_distribution`];
/// covers bit-flip noise up to n = 14 and general Pauli noise up to n = 7.
const MAX_ENUMERATION: usize = 1 << 14;

/// Single-site Pauli error probabilities of an i.i.d. product channel.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SiteNoise {
    pub p_i: f64,
    pub p_x: f64,
    pub p_y: f64,
    pub p_z: f64,
}

impl SiteNoise {
    pub fn new(p_i: f64, p_x: f64, p_y: f64, p_z: f64) -> Result<Self> {
        let noise = Self { p_i, p_x, p_y, p_z };
        let sum = p_i + p_x + p_y + p_z;
        if noise.probs().iter().any(|&p| p < 0.0) {
            return Err(Error::Argument("negative Pauli probability".into()));
        }
        if (sum - 1.0).abs() > 1e-12 {
            return Err(Error::Argument(format!(
                "Pauli probabilities sum to {sum}, expected 1"
            )));
        }
        Ok(noise)
    }

    pub fn bit_flip(p: f64) -> Result<Self> {
        Self::new(1.0 - p, p, 0.0, 0.0)
    }

    pub fn phase_flip(p: f64) -> Result<Self> {
        Self::new(1.0 - p, 0.0, 0.0, p)
    }

    /// Depolarizing with total error weight `3p/4`:
    /// `rho -> (1 - 3p/4) rho + (p/4)(X rho X + Y rho Y + Z rho Z)`.
    pub fn depolarizing(p: f64) -> Result<Self> {
        Self::new(1.0 - 0.75 * p, 0.25 * p, 0.25 * p, 0.25 * p)
    }

    /// Independent X (prob `px`) and Z (prob `pz`) flips on each site.
    pub fn independent_xz(px: f64, pz: f64) -> Result<Self> {
        Self::new(
            (1.0 - px) * (1.0 - pz),
            px * (1.0 - pz),
            px * pz,
            (1.0 - px) * pz,
        )
    }

    fn probs(&self) -> [f64; 4] {
        [self.p_i, self.p_x, self.p_y, self.p_z]
    }
}

/// Joint probability table `p(class, syndrome)` for i.i.d. Pauli noise on a
/// code, built by exhaustive enumeration of error strings.
#[derive(Clone, Debug)]
pub struct JointDistribution {
    n_syndromes: usize,
    n_classes: usize,
    table: Vec<f64>,
}

impl JointDistribution {
    pub fn n_syndromes(&self) -> usize {
        self.n_syndromes
    }

    pub fn n_classes(&self) -> usize {
        self.n_classes
    }

    /// `p(class, syndrome)`.
    pub fn prob(&self, class: usize, syndrome: usize) -> f64 {
        self.table[class * self.n_syndromes + syndrome]
    }

    /// Marginal syndrome probability `p(s)`.
    pub fn syndrome_marginal(&self, syndrome: usize) -> f64 {
        (0..self.n_classes).map(|c| self.prob(c, syndrome)).sum()
    }

    /// Tilted posterior `q_alpha(class | s) = p(class, s)^alpha / sum p^alpha`.
    ///
    /// Syndromes with zero total probability get the deterministic
    /// identity-class posterior.
    pub fn posterior(&self, syndrome: usize, alpha: f64) -> Vec<f64> {
        let mut q: Vec<f64> = (0..self.n_classes)
            .map(|c| {
                let p = self.prob(c, syndrome);
                if p > 0.0 {
                    p.powf(alpha)
                } else {
                    0.0
                }
            })
            .collect();
        let z: f64 = q.iter().sum();
        if z <= 0.0 {
            q.fill(0.0);
            q[0] = 1.0;
            return q;
        }
        for v in &mut q {
            *v /= z;
        }
        q
    }

    /// Most likely class for a syndrome; ties and zero-probability
    /// syndromes resolve to the lowest class index.
    pub fn ml_class(&self, syndrome: usize) -> usize {
        let mut best = 0usize;
        let mut best_p = self.prob(0, syndrome);
        for c in 1..self.n_classes {
            let p = self.prob(c, syndrome);
            if p > best_p {
                best_p = p;
                best = c;
            }
        }
        best
    }

    /// Classification success probability of a decoder that, given `s`,
    /// picks class `l` with probability `q_alpha(l | s)`:
    /// `sum_{s,l} p(l, s) q_alpha(l | s)`. This equals the squared
    /// entanglement fidelity of the matching recovery channel.
    pub fn success_sampler(&self, alpha: f64) -> f64 {
        let mut total = 0.0;
        for s in 0..self.n_syndromes {
            let q = self.posterior(s, alpha);
            for c in 0..self.n_classes {
                total += self.prob(c, s) * q[c];
            }
        }
        total
    }

    /// Classification success probability of the maximum-likelihood
    /// decoder: `sum_s max_l p(l, s)`.
    pub fn success_ml(&self) -> f64 {
        (0..self.n_syndromes)
            .map(|s| self.prob(self.ml_class(s), s))
            .sum()
    }
}

/// Enumerates every error string with non-zero probability and accumulates
/// the joint `(class, syndrome)` table.
pub fn joint_distribution(code: &CssCode, noise: &SiteNoise) -> Result<JointDistribution> {
    let n = code.n();
    // Active single-site errors: (x bit, z bit, probability).
    let letters: Vec<(u64, u64, f64)> = [
        (0u64, 0u64, noise.p_i),
        (1, 0, noise.p_x),
        (1, 1, noise.p_y),
        (0, 1, noise.p_z),
    ]
    .into_iter()
    .filter(|&(_, _, p)| p > 0.0)
    .collect();

    let count = (letters.len() as f64).powi(n as i32);
    if count > MAX_ENUMERATION as f64 {
        return Err(Error::Resource(format!(
            "enumeration of {count:.0} error strings exceeds cap {MAX_ENUMERATION}"
        )));
    }

    let n_syndromes = code.num_syndromes();
    let n_classes = code.num_classes();
    let mut table = vec![0.0f64; n_syndromes * n_classes];
    // Sector offsets are reused across the many strings sharing a syndrome.
    let mut offsets: std::collections::HashMap<u64, usize> = std::collections::HashMap::new();

    let mut digits = vec![0usize; n];
    loop {
        let mut x_bits = 0u64;
        let mut z_bits = 0u64;
        let mut prob = 1.0f64;
        for (site, &d) in digits.iter().enumerate() {
            let (x, z, p) = letters[d];
            x_bits |= x << site;
            z_bits |= z << site;
            prob *= p;
        }
        if prob > 0.0 {
            let e = PauliString::from_xz(n, x_bits, z_bits);
            let s = code.syndrome_bits(&e);
            let offset = *offsets.entry(s).or_insert_with(|| code.sector_offset(s));
            let c = code.chi_class_of(&e) ^ offset;
            table[c * n_syndromes + s as usize] += prob;
        }
        // Advance the mixed-radix counter (site 0 most significant).
        let mut pos = n;
        loop {
            if pos == 0 {
                break;
            }
            pos -= 1;
            digits[pos] += 1;
            if digits[pos] < letters.len() {
                break;
            }
            digits[pos] = 0;
        }
        if digits.iter().all(|&d| d == 0) {
            break;
        }
    }

    let total: f64 = table.iter().sum();
    if (total - 1.0).abs() > 1e-12 {
        return Err(Error::Consistency(format!(
            "joint table sums to {total}, expected 1"
        )));
    }
    Ok(JointDistribution {
        n_syndromes,
        n_classes,
        table,
    })
}
