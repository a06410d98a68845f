use std::fmt;
use std::str::FromStr;

use crate::codes::SiteNoise;
use crate::error::{Error, Result};

use super::kraus::KrausChannel;
use super::rotation::{RotationAxis, RotationMixture};

/// Named single-site channel family, parameterised by a scalar `p`.
///
/// This is the channel vocabulary of experiment configs: `bitflip`,
/// `phaseflip`, `depol`, `ad`, `xz`, and `rotmix{family[, axis=z]}` where
/// family is `point` (angle `p`), `uniform` (angles on `[0, p]`) or
/// `gauss` (zero-mean wrapped Gaussian of width `p`).
#[derive(Clone, Debug, PartialEq)]
pub enum SiteChannelSpec {
    BitFlip,
    PhaseFlip,
    Depolarizing,
    AmplitudeDamping,
    IndependentXz,
    RotMix {
        family: RotMixFamily,
        axis: RotationAxis,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RotMixFamily {
    Point,
    Uniform,
    Gaussian,
}

impl SiteChannelSpec {
    /// Single-qubit channel at parameter `p`.
    pub fn channel(&self, p: f64) -> Result<KrausChannel> {
        match self {
            Self::BitFlip => KrausChannel::bit_flip(p),
            Self::PhaseFlip => KrausChannel::phase_flip(p),
            Self::Depolarizing => KrausChannel::depolarizing(p),
            Self::AmplitudeDamping => KrausChannel::amplitude_damping(p),
            Self::IndependentXz => {
                KrausChannel::from_site_noise(&SiteNoise::independent_xz(p, p)?, format!("xz({p})"))
            }
            Self::RotMix { .. } => self.rotation_mixture(p)?.channel(),
        }
    }

    /// The rotation mixture behind a `rotmix` spec.
    pub fn rotation_mixture(&self, p: f64) -> Result<RotationMixture> {
        match self {
            Self::RotMix { family, axis } => match family {
                RotMixFamily::Point => Ok(RotationMixture::point_mass(*axis, p)),
                RotMixFamily::Uniform => RotationMixture::uniform(*axis, 0.0, p),
                RotMixFamily::Gaussian => RotationMixture::wrapped_gaussian(*axis, 0.0, p),
            },
            _ => Err(Error::Argument(format!("{self} is not a rotation mixture"))),
        }
    }

    /// n-qubit i.i.d. product channel.
    pub fn product_channel(&self, p: f64, n: usize) -> Result<KrausChannel> {
        self.channel(p)?.tensor_power(n)
    }

    /// Per-site Pauli probabilities when the family is a Pauli channel;
    /// `None` for amplitude damping and rotation mixtures.
    pub fn site_noise(&self, p: f64) -> Result<Option<SiteNoise>> {
        Ok(match self {
            Self::BitFlip => Some(SiteNoise::bit_flip(p)?),
            Self::PhaseFlip => Some(SiteNoise::phase_flip(p)?),
            Self::Depolarizing => Some(SiteNoise::depolarizing(p)?),
            Self::IndependentXz => Some(SiteNoise::independent_xz(p, p)?),
            Self::AmplitudeDamping | Self::RotMix { .. } => None,
        })
    }

    /// Valid range for the swept parameter.
    pub fn valid_range(&self) -> (f64, f64) {
        match self {
            Self::RotMix { .. } => (0.0, 2.0 * std::f64::consts::PI),
            _ => (0.0, 1.0),
        }
    }
}

impl FromStr for SiteChannelSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "bitflip" => return Ok(Self::BitFlip),
            "phaseflip" => return Ok(Self::PhaseFlip),
            "depol" => return Ok(Self::Depolarizing),
            "ad" => return Ok(Self::AmplitudeDamping),
            "xz" => return Ok(Self::IndependentXz),
            _ => {}
        }
        if let Some(args) = s.strip_prefix("rotmix{").and_then(|r| r.strip_suffix('}')) {
            let mut family = None;
            let mut axis = RotationAxis::X;
            for part in args.split(',').map(str::trim).filter(|p| !p.is_empty()) {
                match part {
                    "point" => family = Some(RotMixFamily::Point),
                    "uniform" => family = Some(RotMixFamily::Uniform),
                    "gauss" => family = Some(RotMixFamily::Gaussian),
                    "axis=x" => axis = RotationAxis::X,
                    "axis=z" => axis = RotationAxis::Z,
                    other => {
                        return Err(Error::Argument(format!("unknown rotmix option `{other}`")))
                    }
                }
            }
            let family = family.ok_or_else(|| {
                Error::Argument("rotmix needs a family: point, uniform or gauss".into())
            })?;
            return Ok(Self::RotMix { family, axis });
        }
        Err(Error::Argument(format!(
            "unknown channel spec `{s}` (expected bitflip, phaseflip, depol, ad, xz or rotmix{{...}})"
        )))
    }
}

impl fmt::Display for SiteChannelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::BitFlip => write!(f, "bitflip"),
            Self::PhaseFlip => write!(f, "phaseflip"),
            Self::Depolarizing => write!(f, "depol"),
            Self::AmplitudeDamping => write!(f, "ad"),
            Self::IndependentXz => write!(f, "xz"),
            Self::RotMix { family, axis } => {
                let fam = match family {
                    RotMixFamily::Point => "point",
                    RotMixFamily::Uniform => "uniform",
                    RotMixFamily::Gaussian => "gauss",
                };
                match axis {
                    RotationAxis::X => write!(f, "rotmix{{{fam}}}"),
                    RotationAxis::Z => write!(f, "rotmix{{{fam},axis=z}}"),
                }
            }
        }
    }
}

/// Channel families listed by `channels list`.
pub const CHANNEL_FAMILIES: &[(&str, &str)] = &[
    ("bitflip", "i.i.d. X flips with probability p"),
    ("phaseflip", "i.i.d. Z flips with probability p"),
    (
        "depol",
        "depolarizing: (1-3p/4) rho + (p/4)(X+Y+Z conjugations)",
    ),
    ("ad", "amplitude damping with decay probability p"),
    ("xz", "independent X and Z flips, each with probability p"),
    ("rotmix{point}", "deterministic rotation exp(i p X)"),
    ("rotmix{uniform}", "rotation angle uniform on [0, p]"),
    ("rotmix{gauss}", "rotation angle wrapped-Gaussian, width p"),
];
