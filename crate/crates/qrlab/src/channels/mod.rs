//! Quantum channels in Kraus and Choi form: the noise families under
//! study, composition and tensor powers, Stinespring dilation, and the
//! decomposition of rotation mixtures into a residual unitary after a flip
//! channel.

mod choi;
mod kraus;
mod rotation;
mod spec;

pub use choi::{channel_distance, choi_distance, to_choi, ChoiMatrix};
pub use kraus::{Isometry, KrausChannel, KRAUS_LIMIT, TP_TOL};
pub use rotation::{
    gauss_legendre, rotation_unitary, RotationAxis, RotationDecomposition, RotationMixture,
};
pub use spec::{RotMixFamily, SiteChannelSpec, CHANNEL_FAMILIES};
