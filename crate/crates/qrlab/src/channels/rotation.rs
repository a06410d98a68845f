use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::qlinalg::DenseOperator;

use super::kraus::KrausChannel;

/// Quadrature tolerance used by the moment-domain invariant.
const MOMENT_TOL: f64 = 1e-9;
/// Default Gauss-Legendre node count for continuous angle distributions.
const DEFAULT_NODES: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RotationAxis {
    X,
    Z,
}

/// Mixture of single-qubit rotations `U_theta = exp(i theta A)` about axis
/// `A`, represented by quadrature nodes and weights for the angle
/// distribution.
///
/// The channel is fully determined by the trigonometric moments
/// `delta = <cos² - sin²>` and `t = <cos sin>`.
#[derive(Clone, Debug)]
pub struct RotationMixture {
    axis: RotationAxis,
    nodes: Vec<(f64, f64)>,
    label: String,
}

/// Decomposition of a rotation mixture into a deterministic rotation
/// following a flip channel on the same axis.
#[derive(Clone, Debug)]
pub struct RotationDecomposition {
    pub unitary: DenseOperator,
    pub phi: f64,
    pub p_tilde: f64,
    /// Set when `delta = t = 0`: the channel is maximally mixing on the
    /// rotation plane and the residual angle is unconstrained (returned 0).
    pub degenerate: bool,
}

impl RotationMixture {
    pub fn from_nodes(
        axis: RotationAxis,
        nodes: Vec<(f64, f64)>,
        label: impl Into<String>,
    ) -> Result<Self> {
        if nodes.is_empty() {
            return Err(Error::Argument("rotation mixture needs nodes".into()));
        }
        if nodes.iter().any(|&(_, w)| w < 0.0) {
            return Err(Error::Argument("negative quadrature weight".into()));
        }
        let total: f64 = nodes.iter().map(|&(_, w)| w).sum();
        if (total - 1.0).abs() > 1e-10 {
            return Err(Error::Argument(format!(
                "quadrature weights sum to {total}, expected 1"
            )));
        }
        let mix = Self {
            axis,
            nodes,
            label: label.into(),
        };
        let r2 = mix.delta().powi(2) + 4.0 * mix.t_moment().powi(2);
        if r2 > 1.0 + MOMENT_TOL {
            return Err(Error::Validation(format!(
                "moment invariant violated: delta² + 4t² = {r2}"
            )));
        }
        Ok(mix)
    }

    pub fn point_mass(axis: RotationAxis, theta: f64) -> Self {
        Self {
            axis,
            nodes: vec![(theta, 1.0)],
            label: format!("point({theta})"),
        }
    }

    /// Equal-weight mixture of `+theta` and `-theta`.
    pub fn two_point(axis: RotationAxis, theta: f64) -> Self {
        Self {
            axis,
            nodes: vec![(theta, 0.5), (-theta, 0.5)],
            label: format!("twopoint({theta})"),
        }
    }

    /// Uniform distribution on `[a, b]` via Gauss-Legendre quadrature.
    pub fn uniform(axis: RotationAxis, a: f64, b: f64) -> Result<Self> {
        if b < a {
            return Err(Error::Argument(format!("empty interval [{a}, {b}]")));
        }
        if b == a {
            return Ok(Self::point_mass(axis, a));
        }
        let nodes = gauss_legendre(DEFAULT_NODES)
            .into_iter()
            .map(|(x, w)| (0.5 * (a + b) + 0.5 * (b - a) * x, 0.5 * w))
            .collect();
        Self::from_nodes(axis, nodes, format!("uniform[{a}, {b}]"))
    }

    /// Wrapped Gaussian on `[-pi, pi)` with mean `mu`, width `sigma`.
    pub fn wrapped_gaussian(axis: RotationAxis, mu: f64, sigma: f64) -> Result<Self> {
        if sigma < 0.0 {
            return Err(Error::Argument(format!("negative width {sigma}")));
        }
        if sigma < 1e-12 {
            return Ok(Self::point_mass(axis, mu));
        }
        let wraps = (4.0 * sigma / (2.0 * PI)).ceil() as i64 + 1;
        let raw: Vec<(f64, f64)> = gauss_legendre(4 * DEFAULT_NODES)
            .into_iter()
            .map(|(x, w)| {
                let theta = PI * x;
                let mut density = 0.0;
                for k in -wraps..=wraps {
                    let d = theta - mu + 2.0 * PI * k as f64;
                    density += (-0.5 * (d / sigma).powi(2)).exp();
                }
                density /= sigma * (2.0 * PI).sqrt();
                (theta, w * PI * density)
            })
            .collect();
        let total: f64 = raw.iter().map(|&(_, w)| w).sum();
        let nodes = raw.into_iter().map(|(t, w)| (t, w / total)).collect();
        Self::from_nodes(axis, nodes, format!("gaussian(mu={mu}, sigma={sigma})"))
    }

    pub fn axis(&self) -> RotationAxis {
        self.axis
    }

    pub fn nodes(&self) -> &[(f64, f64)] {
        &self.nodes
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// `<cos² theta - sin² theta> = <cos 2theta>`.
    pub fn delta(&self) -> f64 {
        self.nodes.iter().map(|&(t, w)| w * (2.0 * t).cos()).sum()
    }

    /// `<cos theta sin theta> = <sin 2theta>/2`.
    pub fn t_moment(&self) -> f64 {
        self.nodes
            .iter()
            .map(|&(t, w)| w * 0.5 * (2.0 * t).sin())
            .sum()
    }

    /// `exp(i theta A)` on the mixture's axis.
    pub fn unitary(&self, theta: f64) -> DenseOperator {
        rotation_unitary(self.axis, theta)
    }

    /// The mixture as a channel: quadrature sum of unitary conjugations,
    /// Kraus operators `sqrt(w_j) U_(theta_j)`.
    pub fn channel(&self) -> Result<KrausChannel> {
        let kraus = self
            .nodes
            .iter()
            .map(|&(t, w)| self.unitary(t).scaled(Complex64::new(w.sqrt(), 0.0)))
            .collect();
        KrausChannel::new(kraus, format!("rotmix[{}]", self.label))
    }

    /// Flip channel matching the rotation axis: bit flip for X rotations,
    /// phase flip for Z rotations.
    pub fn flip_channel(&self, p: f64) -> Result<KrausChannel> {
        match self.axis {
            RotationAxis::X => KrausChannel::bit_flip(p),
            RotationAxis::Z => KrausChannel::phase_flip(p),
        }
    }

    /// Splits the mixture into a residual deterministic rotation after a
    /// flip channel: `p~ = (1 - sqrt(delta² + 4t²))/2`, rotation angle
    /// `phi = atan2(2t, delta)/2` in `(-pi/2, pi/2]`.
    pub fn decompose(&self) -> RotationDecomposition {
        let delta = self.delta();
        let t = self.t_moment();
        let r = (delta * delta + 4.0 * t * t).sqrt().min(1.0);
        let p_tilde = 0.5 * (1.0 - r);
        if r < 1e-12 {
            return RotationDecomposition {
                unitary: DenseOperator::identity(&[2]),
                phi: 0.0,
                p_tilde,
                degenerate: true,
            };
        }
        let mut phi = 0.5 * f64::atan2(2.0 * t, delta);
        // atan2 lands in (-pi, pi]; fold the open endpoint.
        if phi <= -PI / 2.0 {
            phi += PI;
        }
        RotationDecomposition {
            unitary: rotation_unitary(self.axis, phi),
            phi,
            p_tilde,
            degenerate: false,
        }
    }

    /// `U_phi ∘ flip(p~)`, the channel the decomposition claims equals the
    /// mixture.
    pub fn decomposed_channel(&self) -> Result<KrausChannel> {
        let dec = self.decompose();
        let unitary = KrausChannel::from_unitary(dec.unitary.clone(), "residual-rotation")?;
        unitary.compose(&self.flip_channel(dec.p_tilde)?)
    }
}

/// `exp(i theta X)` or `exp(i theta Z)`.
pub fn rotation_unitary(axis: RotationAxis, theta: f64) -> DenseOperator {
    let c = Complex64::new(theta.cos(), 0.0);
    let is = Complex64::new(0.0, theta.sin());
    match axis {
        RotationAxis::X => {
            &DenseOperator::pauli_i().scaled(c) + &DenseOperator::pauli_x().scaled(is)
        }
        RotationAxis::Z => {
            &DenseOperator::pauli_i().scaled(c) + &DenseOperator::pauli_z().scaled(is)
        }
    }
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        // Initial guess, then Newton on P_n.
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        out.push((x, w));
    }
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    out
}

/// Legendre polynomial `P_n(x)` and its derivative by recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}
