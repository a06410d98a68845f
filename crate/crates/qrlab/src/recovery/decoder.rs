use num_complex::Complex64;

use crate::channels::KrausChannel;
use crate::codes::{CssCode, JointDistribution, SyndromeSet};
use crate::error::{Error, Result};
use crate::qlinalg::DenseOperator;

/// Decoder rule applied on top of a syndrome measurement.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DecoderRule {
    /// Sample the correction class from the tilted posterior `q_alpha`.
    Sampler { alpha: f64 },
    /// Apply the most likely class (ties break to the lowest index).
    Ml,
}

/// Projective syndrome measurement as a channel: one Kraus projector per
/// syndrome sector of the selected stabilisers. Dephases across sectors
/// and is idempotent.
pub fn syndrome_measurement_channel(code: &CssCode, set: SyndromeSet) -> Result<KrausChannel> {
    let m = code.selected_generators(set).len();
    let mut kraus = Vec::with_capacity(1 << m);
    for s in 0..(1u64 << m) {
        kraus.push(code.syndrome_sector_projector(set, s)?);
    }
    let label = match set {
        SyndromeSet::All => format!("measure[{}]", code.name()),
        SyndromeSet::ZOnly => format!("measure-z[{}]", code.name()),
        SyndromeSet::XOnly => format!("measure-x[{}]", code.name()),
    };
    KrausChannel::with_tp_tolerance(kraus, label, 1e-9)
}

/// Syndrome measurement followed by a classical decoder, realised as one
/// exact channel: for each syndrome `s` the correction
/// `representative(s, class)†` is applied with the rule's probability.
/// Syndromes with zero probability under the joint distribution default to
/// the identity-class representative.
pub fn decoder_channel(
    code: &CssCode,
    joint: &JointDistribution,
    rule: DecoderRule,
) -> Result<KrausChannel> {
    if joint.n_syndromes() != code.num_syndromes() || joint.n_classes() != code.num_classes() {
        return Err(Error::Argument(
            "joint distribution shape does not match the code".into(),
        ));
    }
    let mut kraus = Vec::new();
    for s in 0..code.num_syndromes() {
        let projector = code.syndrome_sector_projector(SyndromeSet::All, s as u64)?;
        let corrections: Vec<(usize, f64)> = match rule {
            DecoderRule::Ml => vec![(joint.ml_class(s), 1.0)],
            DecoderRule::Sampler { alpha } => {
                if alpha < 0.0 {
                    return Err(Error::Argument(format!(
                        "sampler exponent {alpha} must be non-negative"
                    )));
                }
                joint
                    .posterior(s, alpha)
                    .into_iter()
                    .enumerate()
                    .filter(|&(_, q)| q > 0.0)
                    .collect()
            }
        };
        for (class, q) in corrections {
            let rep = code.canonical_representative(s as u64, class)?;
            let correction = rep.dagger().to_matrix();
            let op = correction
                .matmul(&projector)
                .scaled(Complex64::new(q.sqrt(), 0.0));
            kraus.push(op);
        }
    }
    let label = match rule {
        DecoderRule::Ml => format!("ml[{}]", code.name()),
        DecoderRule::Sampler { alpha } => format!("sampler(alpha={alpha})[{}]", code.name()),
    };
    KrausChannel::with_tp_tolerance(kraus, label, 1e-9)
}

/// Replaces any input with a fixed codeword; the floor recovery used as a
/// worst-case reference.
pub fn replace_with_codeword_channel(code: &CssCode) -> Result<KrausChannel> {
    let words = code.logical_codewords()?;
    let target = &words[0];
    let dim = code.dim();
    let kraus: Vec<DenseOperator> = (0..dim)
        .map(|i| {
            let mut basis = vec![Complex64::new(0.0, 0.0); dim];
            basis[i] = Complex64::new(1.0, 0.0);
            DenseOperator::outer(&vec![2; code.n()], target.amplitudes(), &basis)
        })
        .collect();
    KrausChannel::new(kraus, format!("replace[{}]", code.name()))
}
