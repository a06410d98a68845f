//! Recovery channels: Petz (transpose), syndrome measurement with
//! sampling/ML decoders, the SDP-optimal channel, and structural
//! factorisation checks.

mod decoder;
mod factorisation;
mod petz;
mod sdp;

use std::fmt;
use std::str::FromStr;

use crate::channels::KrausChannel;
use crate::codes::{joint_distribution, CssCode, SiteNoise};
use crate::error::{Error, Result};

pub use decoder::{
    decoder_channel, replace_with_codeword_channel, syndrome_measurement_channel, DecoderRule,
};
pub use factorisation::verify_z_factorisation;
pub use petz::{petz_for_code, petz_map};
pub use sdp::{post_channel_comparison, sdp_optimal, SdpParams, SdpSolution, SDP_DIM_CAP};

/// Recovery selector as it appears in experiment configs:
/// `petz | ml | sampler{alpha} | sdp{tol, max_iter}`.
#[derive(Clone, Debug, PartialEq)]
pub enum RecoverySpec {
    Petz,
    Ml,
    Sampler { alpha: f64 },
    Sdp { rel_tol: f64, max_iterations: usize },
}

impl RecoverySpec {
    pub fn sdp_default() -> Self {
        let params = SdpParams::default();
        Self::Sdp {
            rel_tol: params.rel_tol,
            max_iterations: params.max_iterations,
        }
    }

    pub fn sdp_params(&self) -> SdpParams {
        match *self {
            Self::Sdp {
                rel_tol,
                max_iterations,
            } => SdpParams {
                rel_tol,
                max_iterations,
                ..SdpParams::default()
            },
            _ => SdpParams::default(),
        }
    }
}

impl FromStr for RecoverySpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "petz" => return Ok(Self::Petz),
            "ml" => return Ok(Self::Ml),
            "sdp" => return Ok(Self::sdp_default()),
            _ => {}
        }
        if let Some(arg) = s.strip_prefix("sampler{").and_then(|r| r.strip_suffix('}')) {
            let alpha: f64 = arg
                .trim()
                .parse()
                .map_err(|_| Error::Argument(format!("bad sampler exponent `{arg}`")))?;
            if alpha < 0.0 {
                return Err(Error::Argument(format!(
                    "sampler exponent {alpha} must be non-negative"
                )));
            }
            return Ok(Self::Sampler { alpha });
        }
        if let Some(args) = s.strip_prefix("sdp{").and_then(|r| r.strip_suffix('}')) {
            let defaults = SdpParams::default();
            let parts: Vec<&str> = args
                .split(',')
                .map(str::trim)
                .filter(|p| !p.is_empty())
                .collect();
            let rel_tol = match parts.first() {
                Some(v) => v
                    .parse()
                    .map_err(|_| Error::Argument(format!("bad sdp tolerance `{v}`")))?,
                None => defaults.rel_tol,
            };
            let max_iterations = match parts.get(1) {
                Some(v) => v
                    .parse()
                    .map_err(|_| Error::Argument(format!("bad sdp iteration cap `{v}`")))?,
                None => defaults.max_iterations,
            };
            return Ok(Self::Sdp {
                rel_tol,
                max_iterations,
            });
        }
        Err(Error::Argument(format!(
            "unknown recovery spec `{s}` (expected petz, ml, sampler{{alpha}} or sdp{{tol,max_iter}})"
        )))
    }
}

impl fmt::Display for RecoverySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Petz => write!(f, "petz"),
            Self::Ml => write!(f, "ml"),
            Self::Sampler { alpha } => write!(f, "sampler{{{alpha}}}"),
            Self::Sdp { .. } => write!(f, "sdp"),
        }
    }
}

/// A recovery built for a concrete code and noise channel.
pub enum BuiltRecovery {
    Channel(KrausChannel),
    Sdp(SdpSolution),
}

/// Builds the recovery a spec describes. Decoder recoveries need the
/// per-site Pauli probabilities of the noise; channels without them
/// (amplitude damping, rotation mixtures) reject decoder specs.
pub fn build_recovery(
    spec: &RecoverySpec,
    code: &CssCode,
    channel: &KrausChannel,
    noise: Option<&SiteNoise>,
) -> Result<BuiltRecovery> {
    match spec {
        RecoverySpec::Petz => Ok(BuiltRecovery::Channel(petz_for_code(channel, code, None)?)),
        RecoverySpec::Ml | RecoverySpec::Sampler { .. } => {
            let noise = noise.ok_or_else(|| {
                Error::Validation(format!(
                    "decoder recovery `{spec}` needs Pauli noise with per-site probabilities"
                ))
            })?;
            let joint = joint_distribution(code, noise)?;
            let rule = match spec {
                RecoverySpec::Ml => DecoderRule::Ml,
                RecoverySpec::Sampler { alpha } => DecoderRule::Sampler { alpha: *alpha },
                _ => unreachable!(),
            };
            Ok(BuiltRecovery::Channel(decoder_channel(code, &joint, rule)?))
        }
        RecoverySpec::Sdp { .. } => Ok(BuiltRecovery::Sdp(sdp_optimal(
            channel,
            code,
            &spec.sdp_params(),
        )?)),
    }
}
