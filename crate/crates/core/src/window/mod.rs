//! Window functions on the real line.
//!
//! A [`Window`] is an immutable expression tree. Leaves are closed-form
//! families (Gaussian-times-polynomial, two-sided exponential, B-splines and
//! their Fourier partners) or interpolated samples; inner nodes are the
//! operations used throughout the crate (time-frequency shifts, dilation,
//! chirp multiplication, the position operator, linear combinations and
//! Gabor synthesis). Derivatives and Fourier transforms are rewritten
//! analytically where a rule exists and fall back to the sampled
//! representation otherwise.

mod node;
pub mod norms;
pub(crate) mod poly;
pub mod samples;

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::cis2pi;
pub(crate) use node::Node;
pub(crate) use node::Synth;
pub use norms::{cg_constant, inner, l2_norm, norms, sinc_gap, tf_map_remainder, WindowNorms};
pub use samples::Samples;

/// Truncation tolerance used for support hints.
pub const TRUNC_TOL: f64 = 1e-14;

/// Declared regularity. `H1` means `g, ĝ ∈ H¹(ℝ)`; `H2` additionally
/// `g″, X²g, Xg′ ∈ L²`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Smoothness {
    L2,
    H1,
    H2,
}

impl Smoothness {
    fn lowered(self) -> Self {
        match self {
            Smoothness::H2 => Smoothness::H1,
            _ => Smoothness::L2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WindowKind {
    Zero,
    /// `amplitude · e^{-πx²/α}`.
    Gaussian {
        alpha: f64,
        amplitude: f64,
    },
    /// `L²`-normalized Hermite function, `h_0 = 2^{1/4} e^{-πx²}`.
    Hermite {
        n: usize,
    },
    /// `e^{-c|x|}`.
    TwoSidedExponential {
        decay: f64,
    },
    /// Centered cardinal B-spline with `∫ = 1`.
    BSpline {
        order: u32,
    },
    Sampled,
    Synthesized,
    Transformed,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct WindowFlags {
    /// Some part of the tree is a sampled approximation.
    pub numeric: bool,
    /// Produced by an operation whose smoothness precondition was not met.
    pub insufficient_smoothness: bool,
}

#[derive(Clone)]
pub struct Window {
    node: Arc<Node>,
    kind: WindowKind,
    smoothness: Smoothness,
    flags: WindowFlags,
    support: f64,
}

impl std::fmt::Debug for Window {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Window")
            .field("kind", &self.kind)
            .field("smoothness", &self.smoothness)
            .field("flags", &self.flags)
            .field("support", &self.support)
            .finish()
    }
}

impl Window {
    pub(crate) fn from_node(
        node: Arc<Node>,
        kind: WindowKind,
        smoothness: Smoothness,
        flags: WindowFlags,
    ) -> Self {
        let support = node.support();
        Self {
            node,
            kind,
            smoothness,
            flags,
            support,
        }
    }

    fn derived(
        &self,
        node: Arc<Node>,
        kind: WindowKind,
        smoothness: Smoothness,
        numeric: bool,
    ) -> Self {
        let flags = WindowFlags {
            numeric: self.flags.numeric || numeric,
            ..self.flags
        };
        Self::from_node(node, kind, smoothness, flags)
    }

    pub fn zero() -> Self {
        Self::from_node(
            Arc::new(Node::Zero),
            WindowKind::Zero,
            Smoothness::H2,
            WindowFlags::default(),
        )
    }

    /// `e^{-πx²/α}`.
    pub fn gaussian(alpha: f64) -> Result<Self> {
        Self::gaussian_scaled(alpha, 1.0)
    }

    pub fn gaussian_scaled(alpha: f64, amplitude: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "Gaussian width must be positive, got {alpha}"
            )));
        }
        let node = Node::PolyGauss {
            poly: vec![Complex64::new(amplitude, 0.0)],
            alpha,
        };
        Ok(Self::from_node(
            Arc::new(node),
            WindowKind::Gaussian { alpha, amplitude },
            Smoothness::H2,
            WindowFlags::default(),
        ))
    }

    pub fn hermite(n: usize) -> Self {
        let node = Node::PolyGauss {
            poly: poly::hermite_factor(n),
            alpha: 1.0,
        };
        Self::from_node(
            Arc::new(node),
            WindowKind::Hermite { n },
            Smoothness::H2,
            WindowFlags::default(),
        )
    }

    /// `e^{-c|x|}`; in `𝐇¹` but not `𝐇²`.
    pub fn two_sided_exponential(decay: f64) -> Result<Self> {
        if !(decay > 0.0 && decay.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "decay must be positive, got {decay}"
            )));
        }
        Ok(Self::from_node(
            Arc::new(Node::TwoSidedExp { decay, odd: false }),
            WindowKind::TwoSidedExponential { decay },
            Smoothness::H1,
            WindowFlags::default(),
        ))
    }

    /// Centered B-spline of the given order (degree `order - 1`).
    pub fn bspline(order: u32) -> Result<Self> {
        if order == 0 || order > 12 {
            return Err(Error::InvalidParameter(format!(
                "B-spline order must be in 1..=12, got {order}"
            )));
        }
        let smoothness = match order {
            1 => Smoothness::L2,
            2 => Smoothness::H1,
            _ => Smoothness::H2,
        };
        Ok(Self::from_node(
            Arc::new(Node::BSpline { order }),
            WindowKind::BSpline { order },
            smoothness,
            WindowFlags::default(),
        ))
    }

    /// Cubic interpolation of `samples` with zero extension.
    pub fn sampled(samples: Samples, smoothness: Smoothness) -> Result<Self> {
        if samples.is_empty() || samples.dx.is_nan() || samples.dx <= 0.0 {
            return Err(Error::InvalidParameter(
                "sampled window needs samples and dx > 0".into(),
            ));
        }
        if samples
            .values
            .iter()
            .any(|v| !v.re.is_finite() || !v.im.is_finite())
        {
            return Err(Error::InvalidParameter(
                "sampled window contains non-finite values".into(),
            ));
        }
        Ok(Self::from_node(
            Arc::new(Node::Sampled(Arc::new(samples))),
            WindowKind::Sampled,
            smoothness,
            WindowFlags {
                numeric: true,
                insufficient_smoothness: false,
            },
        ))
    }

    pub fn eval(&self, x: f64) -> Complex64 {
        self.node.eval(x)
    }

    pub fn kind(&self) -> WindowKind {
        self.kind
    }

    pub fn smoothness(&self) -> Smoothness {
        self.smoothness
    }

    pub fn flags(&self) -> WindowFlags {
        self.flags
    }

    /// Half-width `T` with `|g| < TRUNC_TOL` relative outside `[-T, T]`.
    pub fn support(&self) -> f64 {
        self.support
    }

    /// False for windows with only algebraic decay (Fourier partners of
    /// kinked windows), where pointwise truncation is unreliable.
    pub fn rapidly_decaying(&self) -> bool {
        self.node.rapid()
    }

    pub(crate) fn node(&self) -> &Arc<Node> {
        &self.node
    }

    pub(crate) fn breakpoints(&self) -> Option<(f64, f64)> {
        self.node.breakpoints()
    }

    /// Overrides the declared smoothness class.
    pub fn with_smoothness(mut self, smoothness: Smoothness) -> Self {
        self.smoothness = smoothness;
        self
    }

    pub fn scale(&self, c: Complex64) -> Self {
        let kind = match self.kind {
            WindowKind::Gaussian { alpha, amplitude } if c.im == 0.0 => WindowKind::Gaussian {
                alpha,
                amplitude: amplitude * c.re,
            },
            _ => WindowKind::Transformed,
        };
        self.derived(
            Node::scale(c, self.node.clone()),
            kind,
            self.smoothness,
            false,
        )
    }

    pub fn scale_real(&self, c: f64) -> Self {
        self.scale(Complex64::new(c, 0.0))
    }

    pub fn add(&self, other: &Window) -> Self {
        let node = Node::sum(vec![self.node.clone(), other.node.clone()]);
        let flags = WindowFlags {
            numeric: self.flags.numeric || other.flags.numeric,
            insufficient_smoothness: self.flags.insufficient_smoothness
                || other.flags.insufficient_smoothness,
        };
        Self::from_node(
            node,
            WindowKind::Transformed,
            self.smoothness.min(other.smoothness),
            flags,
        )
    }

    pub fn sub(&self, other: &Window) -> Self {
        self.add(&other.scale_real(-1.0))
    }

    /// Pointwise derivative. Requires `H1`; otherwise the result is flagged.
    pub fn derivative(&self) -> Self {
        let (node, numeric) = self.node.derivative();
        let mut w = self.derived(
            node,
            WindowKind::Transformed,
            self.smoothness.lowered(),
            numeric,
        );
        if self.smoothness == Smoothness::L2 {
            w.flags.insufficient_smoothness = true;
        }
        w
    }

    /// `x ↦ x·g(x)`.
    pub fn apply_x(&self) -> Self {
        self.derived(
            Arc::new(Node::MulX(self.node.clone())),
            WindowKind::Transformed,
            self.smoothness.lowered(),
            false,
        )
    }

    /// `x ↦ x²·g(x)`.
    pub fn apply_x2(&self) -> Self {
        self.apply_x().apply_x()
    }

    /// `ĝ(ω) = ∫ g(x) e^{-2πixω} dx`.
    pub fn fourier_transform(&self) -> Self {
        let (node, numeric) = self.node.fourier();
        let kind = match self.kind {
            WindowKind::Gaussian { alpha, amplitude } => WindowKind::Gaussian {
                alpha: 1.0 / alpha,
                amplitude: amplitude * alpha.sqrt(),
            },
            WindowKind::Zero => WindowKind::Zero,
            _ => WindowKind::Transformed,
        };
        self.derived(node, kind, self.smoothness, numeric)
    }

    /// `π(a,b)g(x) = e^{2πibx} g(x-a)`.
    pub fn tf_shift(&self, a: f64, b: f64) -> Self {
        if a == 0.0 && b == 0.0 {
            return self.clone();
        }
        self.derived(
            Node::tf_shift(a, b, self.node.clone()),
            WindowKind::Transformed,
            self.smoothness,
            false,
        )
    }

    /// `ρ(a,b) = e^{-πiab} π(a,b)`.
    pub fn rho_shift(&self, a: f64, b: f64) -> Self {
        let w = self.tf_shift(a, b);
        if a * b == 0.0 {
            return w;
        }
        let mut out = w.scale(cis2pi(-0.5 * a * b));
        out.kind = WindowKind::Transformed;
        out
    }

    /// `D_α g(x) = |α|^{1/2} g(αx)`.
    pub fn dilation(&self, alpha: f64) -> Result<Self> {
        if alpha == 0.0 || !alpha.is_finite() {
            return Err(Error::ZeroDilation);
        }
        if alpha == 1.0 {
            return Ok(self.clone());
        }
        let kind = match self.kind {
            WindowKind::Gaussian {
                alpha: width,
                amplitude,
            } => WindowKind::Gaussian {
                alpha: width / (alpha * alpha),
                amplitude: amplitude * alpha.abs().sqrt(),
            },
            _ => WindowKind::Transformed,
        };
        Ok(self.derived(
            Arc::new(Node::Dilate {
                alpha,
                inner: self.node.clone(),
            }),
            kind,
            self.smoothness,
            false,
        ))
    }

    /// `C_β g(x) = e^{πiβx²} g(x)`.
    pub fn chirp(&self, beta: f64) -> Result<Self> {
        if beta == 0.0 || !beta.is_finite() {
            return Err(Error::ZeroChirp);
        }
        Ok(self.derived(
            Arc::new(Node::Chirp {
                beta,
                inner: self.node.clone(),
            }),
            WindowKind::Transformed,
            self.smoothness,
            false,
        ))
    }

    /// `-a·g′ + 2πib·Xg`, the derivative of `(a,b) ↦ π(a,b)g` at the origin.
    pub fn linearized_shift(&self, a: f64, b: f64) -> Self {
        let d = self.derivative().scale_real(-a);
        let x = self.apply_x().scale(Complex64::new(0.0, 2.0 * PI * b));
        let mut w = d.add(&x);
        w.smoothness = self.smoothness.lowered();
        if self.smoothness == Smoothness::L2 {
            w.flags.insufficient_smoothness = true;
        }
        w
    }

    /// Samples `g` on the uniform grid `x0 + n·dx`.
    pub fn sample(&self, x0: f64, dx: f64, n: usize) -> Samples {
        Samples::from_fn(x0, dx, n, |x| self.eval(x))
    }

    /// Replaces the tree by a sampled copy on `[-support, support]`.
    pub fn to_sampled(&self, dx: f64) -> Self {
        let samples = node::sample_on_grid(&self.node, Some(dx));
        let mut w = Self::from_node(
            Arc::new(Node::Sampled(Arc::new(samples))),
            WindowKind::Sampled,
            self.smoothness,
            self.flags,
        );
        w.flags.numeric = true;
        w
    }
}
