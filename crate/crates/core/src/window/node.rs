use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;

use super::poly;
use super::samples::Samples;
use super::TRUNC_TOL;
use crate::linalg::cis2pi;

/// Default sampling density for numeric fallbacks (samples per unit).
pub(crate) const FALLBACK_RATE: f64 = 64.0;

pub(crate) enum Node {
    Zero,
    /// `p(x) e^{-πx²/α}`.
    PolyGauss {
        poly: Vec<Complex64>,
        alpha: f64,
    },
    /// `e^{-c|x|}`, times `sign(x)` when `odd`.
    TwoSidedExp {
        decay: f64,
        odd: bool,
    },
    /// Fourier transforms of [`Node::TwoSidedExp`]: `2c/(c²+4π²x²)` and
    /// `-4πix/(c²+4π²x²)`.
    Lorentzian {
        decay: f64,
        odd: bool,
    },
    BSpline {
        order: u32,
    },
    /// `sinc(x)^m` with `sinc(x) = sin(πx)/(πx)`.
    SincPow {
        order: u32,
    },
    Sampled(Arc<Samples>),
    Scale(Complex64, Arc<Node>),
    Sum(Vec<Arc<Node>>),
    TfShift {
        a: f64,
        b: f64,
        inner: Arc<Node>,
    },
    MulX(Arc<Node>),
    Dilate {
        alpha: f64,
        inner: Arc<Node>,
    },
    Chirp {
        beta: f64,
        inner: Arc<Node>,
    },
    Synth(Arc<Synth>),
}

/// `Σ_{m,n} c_{m,n} π(m/Q, nP) g`, grouped by the time index `m`.
pub(crate) struct Synth {
    pub base: Arc<Node>,
    pub p: u32,
    pub q: u32,
    pub groups: Vec<(i64, Vec<(i64, Complex64)>)>,
}

impl Synth {
    /// `Σ_n c_{m,n} e^{2πi nP x}` for one group.
    pub fn modulation(&self, terms: &[(i64, Complex64)], x: f64) -> Complex64 {
        terms
            .iter()
            .map(|(n, c)| c * cis2pi(*n as f64 * self.p as f64 * x))
            .sum()
    }
}

fn bspline(order: u32, x: f64) -> f64 {
    if order == 1 {
        return if (-0.5..0.5).contains(&x) { 1.0 } else { 0.0 };
    }
    let m = order as f64;
    if x.abs() >= 0.5 * m {
        return 0.0;
    }
    ((x + 0.5 * m) * bspline(order - 1, x + 0.5) + (0.5 * m - x) * bspline(order - 1, x - 0.5))
        / (m - 1.0)
}

fn sinc(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        (PI * x).sin() / (PI * x)
    }
}

impl Node {
    pub fn scale(c: Complex64, inner: Arc<Node>) -> Arc<Node> {
        if c == Complex64::new(1.0, 0.0) {
            return inner;
        }
        match &*inner {
            Node::Zero => inner,
            _ if c == Complex64::new(0.0, 0.0) => Arc::new(Node::Zero),
            Node::Scale(d, n) => Node::scale(c * d, n.clone()),
            _ => Arc::new(Node::Scale(c, inner)),
        }
    }

    pub fn sum(items: Vec<Arc<Node>>) -> Arc<Node> {
        let mut flat: Vec<Arc<Node>> = Vec::with_capacity(items.len());
        for it in items {
            match &*it {
                Node::Zero => {}
                Node::Sum(v) => flat.extend(v.iter().cloned()),
                _ => flat.push(it),
            }
        }
        match flat.len() {
            0 => Arc::new(Node::Zero),
            1 => flat.pop().unwrap(),
            _ => Arc::new(Node::Sum(flat)),
        }
    }

    pub fn tf_shift(a: f64, b: f64, inner: Arc<Node>) -> Arc<Node> {
        if a == 0.0 && b == 0.0 {
            return inner;
        }
        match &*inner {
            Node::Zero => inner,
            _ => Arc::new(Node::TfShift { a, b, inner }),
        }
    }

    pub fn eval(&self, x: f64) -> Complex64 {
        match self {
            Node::Zero => Complex64::new(0.0, 0.0),
            Node::PolyGauss { poly: p, alpha } => poly::eval(p, x) * (-PI * x * x / alpha).exp(),
            Node::TwoSidedExp { decay, odd } => {
                let v = (-decay * x.abs()).exp();
                let s = if *odd {
                    if x > 0.0 {
                        1.0
                    } else if x < 0.0 {
                        -1.0
                    } else {
                        0.0
                    }
                } else {
                    1.0
                };
                Complex64::new(s * v, 0.0)
            }
            Node::Lorentzian { decay, odd } => {
                let den = decay * decay + 4.0 * PI * PI * x * x;
                if *odd {
                    Complex64::new(0.0, -4.0 * PI * x / den)
                } else {
                    Complex64::new(2.0 * decay / den, 0.0)
                }
            }
            Node::BSpline { order } => Complex64::new(bspline(*order, x), 0.0),
            Node::SincPow { order } => Complex64::new(sinc(x).powi(*order as i32), 0.0),
            Node::Sampled(s) => s.eval(x),
            Node::Scale(c, n) => c * n.eval(x),
            Node::Sum(v) => v.iter().map(|n| n.eval(x)).sum(),
            Node::TfShift { a, b, inner } => cis2pi(b * x) * inner.eval(x - a),
            Node::MulX(n) => n.eval(x) * x,
            Node::Dilate { alpha, inner } => inner.eval(alpha * x) * alpha.abs().sqrt(),
            Node::Chirp { beta, inner } => cis2pi(0.5 * beta * x * x) * inner.eval(x),
            Node::Synth(s) => {
                let q = s.q as f64;
                s.groups
                    .iter()
                    .map(|(m, terms)| s.base.eval(x - *m as f64 / q) * s.modulation(terms, x))
                    .sum()
            }
        }
    }

    /// Half-width outside of which the function is below the truncation
    /// tolerance (relative to its scale).
    pub fn support(&self) -> f64 {
        match self {
            Node::Zero => 0.0,
            Node::PolyGauss { poly: p, alpha } => {
                let scale: f64 = p
                    .iter()
                    .map(|c| c.norm())
                    .sum::<f64>()
                    .max(f64::MIN_POSITIVE);
                let mut t = (alpha * 14.0 * 10f64.ln() / PI).sqrt();
                let bound = |t: f64| {
                    p.iter()
                        .enumerate()
                        .map(|(k, c)| c.norm() * t.powi(k as i32))
                        .sum::<f64>()
                        * (-PI * t * t / alpha).exp()
                };
                while bound(t) > TRUNC_TOL * scale * (1.0 + 1e-9) {
                    t += 0.05 * alpha.sqrt();
                }
                t
            }
            Node::TwoSidedExp { decay, .. } => 14.0 * 10f64.ln() / decay,
            // tail of |g|² relative to ‖g‖² below ~1e-12
            Node::Lorentzian { decay, .. } => 1600.0 * decay.max(1.0),
            Node::BSpline { order } => 0.5 * *order as f64,
            Node::SincPow { order } => match order {
                1 => 2e4,
                2 => 400.0,
                3 => 100.0,
                _ => 50.0,
            },
            Node::Sampled(s) => s.x0.abs().max(s.x_end().abs()) + s.dx,
            Node::Scale(_, n) => n.support(),
            Node::Sum(v) => v.iter().map(|n| n.support()).fold(0.0, f64::max),
            Node::TfShift { a, inner, .. } => inner.support() + a.abs(),
            Node::MulX(n) => n.support() + 0.5,
            Node::Dilate { alpha, inner } => inner.support() / alpha.abs(),
            Node::Chirp { inner, .. } => inner.support(),
            Node::Synth(s) => {
                let mmax = s
                    .groups
                    .iter()
                    .map(|(m, _)| m.unsigned_abs())
                    .max()
                    .unwrap_or(0);
                s.base.support() + mmax as f64 / s.q as f64
            }
        }
    }

    pub fn rapid(&self) -> bool {
        match self {
            Node::Lorentzian { .. } | Node::SincPow { .. } => false,
            Node::Scale(_, n) | Node::MulX(n) => n.rapid(),
            Node::Sum(v) => v.iter().all(|n| n.rapid()),
            Node::TfShift { inner, .. }
            | Node::Dilate { inner, .. }
            | Node::Chirp { inner, .. } => inner.rapid(),
            Node::Synth(s) => s.base.rapid(),
            _ => true,
        }
    }

    /// Lattice `x0 + k·dx` containing every point where the function may fail
    /// to be smooth, if any.
    pub fn breakpoints(&self) -> Option<(f64, f64)> {
        match self {
            Node::TwoSidedExp { .. } => Some((0.0, 1.0)),
            Node::BSpline { order } => Some((-0.5 * *order as f64, 1.0)),
            Node::Sampled(s) => Some((s.x0, s.dx)),
            Node::Scale(_, n) | Node::MulX(n) | Node::Chirp { inner: n, .. } => n.breakpoints(),
            Node::TfShift { a, inner, .. } => inner.breakpoints().map(|(x0, dx)| (x0 + a, dx)),
            Node::Dilate { alpha, inner } => inner
                .breakpoints()
                .map(|(x0, dx)| (x0 / alpha, dx / alpha.abs())),
            Node::Sum(v) => {
                let mut found: Option<(f64, f64)> = None;
                for n in v {
                    if let Some(bp) = n.breakpoints() {
                        match found {
                            None => found = Some(bp),
                            Some(f) if same_lattice(f, bp) => {}
                            Some(_) => return None,
                        }
                    }
                }
                found
            }
            Node::Synth(s) => s.base.breakpoints().and_then(|(x0, dx)| {
                // shifts by m/Q stay on the lattice when 1/Q is a multiple of dx
                let r = 1.0 / (s.q as f64 * dx);
                ((r - r.round()).abs() < 1e-9).then_some((x0, dx))
            }),
            _ => None,
        }
    }

    /// Derivative node and whether a numeric fallback was used.
    pub fn derivative(self: &Arc<Self>) -> (Arc<Node>, bool) {
        let c = |re: f64, im: f64| Complex64::new(re, im);
        match &**self {
            Node::Zero => (self.clone(), false),
            Node::PolyGauss { poly: p, alpha } => (
                Arc::new(Node::PolyGauss {
                    poly: poly::gauss_derivative(p, *alpha),
                    alpha: *alpha,
                }),
                false,
            ),
            Node::TwoSidedExp { decay, odd } => (
                Node::scale(
                    c(-decay, 0.0),
                    Arc::new(Node::TwoSidedExp {
                        decay: *decay,
                        odd: !odd,
                    }),
                ),
                false,
            ),
            Node::BSpline { order } => {
                if *order == 1 {
                    return (Arc::new(Node::Zero), false);
                }
                let lower = Arc::new(Node::BSpline { order: order - 1 });
                let left = Node::tf_shift(-0.5, 0.0, lower.clone());
                let right = Node::scale(c(-1.0, 0.0), Node::tf_shift(0.5, 0.0, lower));
                (Node::sum(vec![left, right]), false)
            }
            Node::Sampled(s) => (Arc::new(Node::Sampled(Arc::new(s.derivative()))), true),
            Node::Lorentzian { .. } | Node::SincPow { .. } => numeric_derivative(self),
            Node::Scale(k, n) => {
                let (d, num) = n.derivative();
                (Node::scale(*k, d), num)
            }
            Node::Sum(v) => {
                let mut num = false;
                let parts = v
                    .iter()
                    .map(|n| {
                        let (d, f) = n.derivative();
                        num |= f;
                        d
                    })
                    .collect();
                (Node::sum(parts), num)
            }
            Node::TfShift { a, b, inner } => {
                let (d, num) = inner.derivative();
                let shifted = Node::tf_shift(*a, *b, d);
                if *b == 0.0 {
                    (shifted, num)
                } else {
                    (
                        Node::sum(vec![
                            Node::scale(c(0.0, 2.0 * PI * b), self.clone()),
                            shifted,
                        ]),
                        num,
                    )
                }
            }
            Node::MulX(n) => {
                let (d, num) = n.derivative();
                (Node::sum(vec![n.clone(), Arc::new(Node::MulX(d))]), num)
            }
            Node::Dilate { alpha, inner } => {
                let (d, num) = inner.derivative();
                (
                    Node::scale(
                        c(*alpha, 0.0),
                        Arc::new(Node::Dilate {
                            alpha: *alpha,
                            inner: d,
                        }),
                    ),
                    num,
                )
            }
            Node::Chirp { beta, inner } => {
                let (d, num) = inner.derivative();
                let lin = Arc::new(Node::Chirp {
                    beta: *beta,
                    inner: Arc::new(Node::MulX(inner.clone())),
                });
                (
                    Node::sum(vec![
                        Node::scale(c(0.0, 2.0 * PI * beta), lin),
                        Arc::new(Node::Chirp {
                            beta: *beta,
                            inner: d,
                        }),
                    ]),
                    num,
                )
            }
            Node::Synth(s) => {
                let (d, num) = s.base.derivative();
                let pf = s.p as f64;
                let modulated = Synth {
                    base: s.base.clone(),
                    p: s.p,
                    q: s.q,
                    groups: s
                        .groups
                        .iter()
                        .map(|(m, t)| {
                            (
                                *m,
                                t.iter()
                                    .map(|(n, v)| (*n, v * c(0.0, 2.0 * PI * pf * *n as f64)))
                                    .collect(),
                            )
                        })
                        .collect(),
                };
                let base_d = Synth {
                    base: d,
                    p: s.p,
                    q: s.q,
                    groups: s.groups.clone(),
                };
                (
                    Node::sum(vec![
                        Arc::new(Node::Synth(Arc::new(base_d))),
                        Arc::new(Node::Synth(Arc::new(modulated))),
                    ]),
                    num,
                )
            }
        }
    }

    /// Fourier transform node and whether a numeric fallback was used.
    pub fn fourier(self: &Arc<Self>) -> (Arc<Node>, bool) {
        let c = |re: f64, im: f64| Complex64::new(re, im);
        match &**self {
            Node::Zero => (self.clone(), false),
            Node::PolyGauss { poly: p, alpha } => (
                Arc::new(Node::PolyGauss {
                    poly: poly::gauss_fourier(p, *alpha),
                    alpha: 1.0 / alpha,
                }),
                false,
            ),
            Node::TwoSidedExp { decay, odd } => (
                Arc::new(Node::Lorentzian {
                    decay: *decay,
                    odd: *odd,
                }),
                false,
            ),
            Node::Lorentzian { decay, odd } => {
                let e = Arc::new(Node::TwoSidedExp {
                    decay: *decay,
                    odd: *odd,
                });
                (
                    if *odd {
                        Node::scale(c(-1.0, 0.0), e)
                    } else {
                        e
                    },
                    false,
                )
            }
            Node::BSpline { order } => (Arc::new(Node::SincPow { order: *order }), false),
            Node::SincPow { order } => (Arc::new(Node::BSpline { order: *order }), false),
            Node::Sampled(s) => (Arc::new(Node::Sampled(Arc::new(s.fourier()))), true),
            Node::Scale(k, n) => {
                let (f, num) = n.fourier();
                (Node::scale(*k, f), num)
            }
            Node::Sum(v) => {
                let mut num = false;
                let parts = v
                    .iter()
                    .map(|n| {
                        let (f, g) = n.fourier();
                        num |= g;
                        f
                    })
                    .collect();
                (Node::sum(parts), num)
            }
            Node::TfShift { a, b, inner } => {
                let (f, num) = inner.fourier();
                (Node::scale(cis2pi(a * b), Node::tf_shift(*b, -a, f)), num)
            }
            Node::MulX(n) => {
                let (f, num) = n.fourier();
                let (d, num2) = f.derivative();
                (Node::scale(c(0.0, 1.0 / (2.0 * PI)), d), num || num2)
            }
            Node::Dilate { alpha, inner } => {
                let (f, num) = inner.fourier();
                (
                    Arc::new(Node::Dilate {
                        alpha: 1.0 / alpha,
                        inner: f,
                    }),
                    num,
                )
            }
            Node::Chirp { .. } => numeric_fourier(self),
            Node::Synth(s) => {
                let (f, num) = s.base.fourier();
                let (p, q) = (s.p as f64, s.q as f64);
                let mut parts = Vec::new();
                for (m, terms) in &s.groups {
                    let a = *m as f64 / q;
                    for (n, v) in terms {
                        let b = *n as f64 * p;
                        parts.push(Node::scale(
                            v * cis2pi(a * b),
                            Node::tf_shift(b, -a, f.clone()),
                        ));
                    }
                }
                (Node::sum(parts), num)
            }
        }
    }
}

fn same_lattice(a: (f64, f64), b: (f64, f64)) -> bool {
    if (a.1 - b.1).abs() > 1e-12 * a.1 {
        return false;
    }
    let r = (a.0 - b.0) / a.1;
    (r - r.round()).abs() < 1e-9
}

/// Samples a node on `[-T, T]`, aligned with its breakpoint lattice when it
/// has one.
pub(crate) fn sample_on_grid(node: &Node, dx: Option<f64>) -> Samples {
    if let Node::Sampled(s) = node {
        if dx.is_none() {
            return (**s).clone();
        }
    }
    let t = node.support();
    let (x0, dx) = match (node.breakpoints(), dx) {
        (Some((x0, bdx)), None) => {
            // refine coarse breakpoint lattices up to the fallback rate
            let k = (bdx * FALLBACK_RATE).ceil().max(1.0);
            (x0, bdx / k)
        }
        (_, Some(dx)) => (0.0, dx),
        (None, None) => (0.0, 1.0 / FALLBACK_RATE),
    };
    let i0 = ((-t - x0) / dx).floor();
    let i1 = ((t - x0) / dx).ceil();
    let n = (i1 - i0) as usize + 1;
    Samples::from_fn(x0 + i0 * dx, dx, n, |x| node.eval(x))
}

fn numeric_derivative(node: &Node) -> (Arc<Node>, bool) {
    let s = sample_on_grid(node, None);
    (Arc::new(Node::Sampled(Arc::new(s.derivative()))), true)
}

fn numeric_fourier(node: &Node) -> (Arc<Node>, bool) {
    let s = sample_on_grid(node, None);
    (Arc::new(Node::Sampled(Arc::new(s.fourier()))), true)
}
