#![allow(dead_code)]

//! Random-instance generators shared by the integration tests.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use qrlab::channels::KrausChannel;
use qrlab::qlinalg::{DenseOperator, DensityMatrix};

pub fn rng(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

pub fn random_complex(rng: &mut ChaCha20Rng) -> Complex64 {
    Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
}

/// Ginibre-induced random density matrix on a single register site.
pub fn random_density(rng: &mut ChaCha20Rng, dim: usize) -> DensityMatrix {
    let raw: Vec<Complex64> = (0..dim * dim).map(|_| random_complex(rng)).collect();
    let g = DenseOperator::from_entries(&[dim], raw).unwrap();
    let gg = g.matmul(&g.dagger());
    let trace = gg.trace().re;
    DensityMatrix::new(gg.scaled(Complex64::new(1.0 / trace, 0.0))).unwrap()
}

pub fn random_hermitian(rng: &mut ChaCha20Rng, dim: usize) -> DenseOperator {
    let raw: Vec<Complex64> = (0..dim * dim).map(|_| random_complex(rng)).collect();
    DenseOperator::from_entries(&[dim], raw)
        .unwrap()
        .hermitian_part()
}

/// Modified Gram-Schmidt on the columns of a random matrix.
fn random_unitary(rng: &mut ChaCha20Rng, dim: usize) -> Vec<Vec<Complex64>> {
    let mut cols: Vec<Vec<Complex64>> = (0..dim)
        .map(|_| (0..dim).map(|_| random_complex(rng)).collect())
        .collect();
    for j in 0..dim {
        for i in 0..j {
            let proj: Complex64 = cols[i]
                .iter()
                .zip(cols[j].iter())
                .map(|(a, b)| a.conj() * b)
                .sum();
            let prev = cols[i].clone();
            for (c, p) in cols[j].iter_mut().zip(prev.iter()) {
                *c -= proj * p;
            }
        }
        let norm: f64 = cols[j].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for c in cols[j].iter_mut() {
            *c /= norm;
        }
    }
    cols
}

/// Random channel with `n_kraus` operators on dimension `dim`, built from
/// a Haar-ish random isometry `dim*n_kraus x dim`.
pub fn random_channel(rng: &mut ChaCha20Rng, dim: usize, n_kraus: usize) -> KrausChannel {
    let big = random_unitary(rng, dim * n_kraus);
    // First `dim` columns form the isometry; block e of rows gives K_e.
    let mut kraus = Vec::with_capacity(n_kraus);
    for e in 0..n_kraus {
        let mut k = DenseOperator::zeros(&[dim]);
        for o in 0..dim {
            for i in 0..dim {
                k.set(o, i, big[i][o * n_kraus + e]);
            }
        }
        kraus.push(k);
    }
    KrausChannel::new(kraus, "random").unwrap()
}

/// Remixes a channel's Kraus set by a random unitary; the channel itself
/// is unchanged.
pub fn remix_kraus(rng: &mut ChaCha20Rng, channel: &KrausChannel) -> KrausChannel {
    let n = channel.kraus_ops().len();
    let u = random_unitary(rng, n);
    let kraus: Vec<DenseOperator> = (0..n)
        .map(|i| {
            let mut acc = DenseOperator::zeros(channel.local_dims());
            for (j, k) in channel.kraus_ops().iter().enumerate() {
                acc = &acc + &k.scaled(u[i][j]);
            }
            acc
        })
        .collect();
    KrausChannel::new(kraus, "remixed").unwrap()
}
