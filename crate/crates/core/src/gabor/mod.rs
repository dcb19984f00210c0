//! Gabor systems `(g, (1/Q)Z x PZ)` analysed through the matrix field `A_g`.
//!
//! The Zak transform followed by `V: F ↦ (F(x + k/P, ω))_{k<P}` is unitary
//! from `L²(ℝ)` onto `L²(R_P; ℂ^P)`, and conjugates the synthesis operator to
//! multiplication by `A_g` (after a Fourier-series identification of the
//! coefficients). Frame operator, Gram operator and the orthogonal projection
//! onto the Gabor space are therefore pointwise matrix operations on the grid.

mod dual;
mod kernel;
pub mod spectral;

use std::collections::BTreeMap;
use std::sync::{Arc, OnceLock};

use nalgebra::DVector;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{Lattice, Reduction, SeparableLattice};
use crate::linalg::{cis2pi, range_projector, CMat};
use crate::metaplectic::MetaplecticOp;
use crate::par;
use crate::window::{Node, Synth, Window, WindowFlags, WindowKind};
use crate::zak::{inverse_zak, zak, MatrixField, MatrixGrid, ZakField};

pub use kernel::KernelReport;
pub use spectral::{
    mult_op_spectrum_estimate, pinv, sigma0, sigma1, Classification, Extremum, SpectralDiagnostics,
};

/// Grid resolution over `R_P` and classification thresholds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridSpec {
    /// Midpoints per `1/P` in `x`.
    pub mx: usize,
    /// Midpoints per unit in `ω`.
    pub mw: usize,
    /// Relative to `σ_max`.
    pub riesz_tol: f64,
    /// Relative rank cut for pseudo-inverses and `σ₁`.
    pub rank_tol: f64,
    /// Half-width (in units) of windows recovered by inverse Zak transform;
    /// defaults to `mw/2`, the largest range free of aliasing.
    pub n_range: Option<usize>,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            mx: 64,
            mw: 64,
            riesz_tol: 1e-6,
            rank_tol: 1e-10,
            n_range: None,
        }
    }
}

impl GridSpec {
    pub fn square(m: usize) -> Self {
        Self {
            mx: m,
            mw: m,
            ..Self::default()
        }
    }
}

struct Cache {
    grid: OnceLock<MatrixGrid>,
    diagnostics: OnceLock<SpectralDiagnostics>,
    projectors: OnceLock<Vec<CMat>>,
    window_vectors: OnceLock<Vec<DVector<Complex64>>>,
    coarse: OnceLock<Result<GaborSystem>>,
}

/// Window, separable lattice and grid, with write-once caches.
#[derive(Clone)]
pub struct GaborSystem {
    window: Window,
    sep: SeparableLattice,
    spec: GridSpec,
    field: MatrixField,
    cache: Arc<Cache>,
}

impl std::fmt::Debug for GaborSystem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("GaborSystem")
            .field("window", &self.window)
            .field("sep", &self.sep)
            .field("spec", &self.spec)
            .finish()
    }
}

/// Finite coefficient table `(m, n) ↦ c` for `Σ c π(m/Q, nP) g`.
pub type Coefficients = BTreeMap<(i64, i64), Complex64>;

impl GaborSystem {
    pub fn new(window: Window, sep: SeparableLattice, spec: GridSpec) -> Result<Self> {
        if spec.mx < 2 || spec.mw < 2 {
            return Err(Error::InvalidParameter(
                "grid resolution must be at least 2".into(),
            ));
        }
        let field = MatrixField::new(window.clone(), sep.p() as usize, sep.q() as usize);
        Ok(Self {
            window,
            sep,
            spec,
            field,
            cache: Arc::new(Cache {
                grid: OnceLock::new(),
                diagnostics: OnceLock::new(),
                projectors: OnceLock::new(),
                window_vectors: OnceLock::new(),
                coarse: OnceLock::new(),
            }),
        })
    }

    /// Reduces `(g, Λ)` to `(U_B g, BΛ)` with `BΛ = (1/Q)Z x PZ`.
    pub fn from_lattice(
        window: &Window,
        lattice: &Lattice,
        spec: GridSpec,
    ) -> Result<(Self, Reduction)> {
        let red = lattice.reduce_to_separable()?;
        let op = MetaplecticOp::for_matrix(&red.b)?;
        let w = op.apply(window)?;
        Ok((Self::new(w, red.sep, spec)?, red))
    }

    pub fn window(&self) -> &Window {
        &self.window
    }

    pub fn lattice(&self) -> SeparableLattice {
        self.sep
    }

    pub fn p(&self) -> usize {
        self.sep.p() as usize
    }

    pub fn q(&self) -> usize {
        self.sep.q() as usize
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn field(&self) -> &MatrixField {
        &self.field
    }

    /// Same lattice and grid with another window.
    pub fn with_window(&self, window: Window) -> Result<Self> {
        Self::new(window, self.sep, self.spec)
    }

    /// Same window and lattice on another grid.
    pub fn with_spec(&self, spec: GridSpec) -> Result<Self> {
        Self::new(self.window.clone(), self.sep, spec)
    }

    pub fn grid(&self) -> &MatrixGrid {
        self.cache
            .grid
            .get_or_init(|| self.field.grid(self.spec.mx, self.spec.mw))
    }

    pub fn diagnostics(&self) -> &SpectralDiagnostics {
        self.cache.diagnostics.get_or_init(|| {
            spectral::diagnostics(
                &self.field,
                self.grid(),
                self.spec.riesz_tol,
                self.spec.rank_tol,
                self.window.rapidly_decaying(),
            )
        })
    }

    pub fn require_riesz(&self) -> Result<()> {
        let d = self.diagnostics();
        if d.classification.riesz_sequence {
            Ok(())
        } else {
            Err(Error::NotRiesz {
                sigma0_min: d.sigma0_min,
            })
        }
    }

    pub fn require_bessel(&self) -> Result<()> {
        if self.window.rapidly_decaying() {
            Ok(())
        } else {
            Err(Error::NotBessel)
        }
    }

    /// `P_{ran A(z)}` at every grid point.
    pub(crate) fn projectors(&self) -> &[CMat] {
        self.cache.projectors.get_or_init(|| {
            let tol = self.spec.rank_tol;
            par::map_slice(&self.grid().mats, |a| range_projector(a, tol))
        })
    }

    /// `(VZf)(x, ω) = (Zf(x + k/P, ω))_{k<P}`.
    pub fn zak_vector(&self, f: &Window, x: f64, w: f64) -> DVector<Complex64> {
        let p = self.p();
        DVector::from_fn(p, |k, _| zak(f, x + k as f64 / p as f64, w))
    }

    /// [`Self::zak_vector`] at every grid point.
    pub fn zak_vectors(&self, f: &Window) -> Vec<DVector<Complex64>> {
        par::map_slice(&self.grid().points, |&(x, w)| self.zak_vector(f, x, w))
    }

    /// `VZg` of the system's own window.
    pub fn window_vectors(&self) -> &[DVector<Complex64>] {
        self.cache
            .window_vectors
            .get_or_init(|| self.zak_vectors(&self.window))
    }

    /// The same system on the grid of half resolution, for convergence checks.
    pub fn coarse(&self) -> Result<&GaborSystem> {
        self.cache
            .coarse
            .get_or_init(|| {
                let spec = GridSpec {
                    mx: (self.spec.mx / 2).max(2),
                    mw: (self.spec.mw / 2).max(2),
                    ..self.spec
                };
                self.with_spec(spec)
            })
            .as_ref()
            .map_err(Clone::clone)
    }

    /// `∫_{R_P} ‖u‖²` by the midpoint rule.
    pub fn field_norm_sq(&self, u: &[DVector<Complex64>]) -> f64 {
        u.iter().map(|v| v.norm_squared()).sum::<f64>() * self.grid().cell_area()
    }

    /// `∫_{R_P} ⟨u, v⟩`, linear in `u`.
    pub fn field_inner(&self, u: &[DVector<Complex64>], v: &[DVector<Complex64>]) -> Complex64 {
        let s: Complex64 = u.iter().zip(v).map(|(a, b)| b.dotc(a)).sum();
        s * self.grid().cell_area()
    }

    fn n_range(&self) -> usize {
        self.spec
            .n_range
            .unwrap_or(self.spec.mw / 2)
            .clamp(1, self.spec.mw / 2)
    }

    /// Inverts `VZ` on grid data and returns the sampled window.
    pub fn window_from_vectors(&self, u: &[DVector<Complex64>]) -> Result<Window> {
        let (p, mx, mw) = (self.p(), self.spec.mx, self.spec.mw);
        let mut values = vec![Complex64::new(0.0, 0.0); p * mx * mw];
        for (idx, v) in u.iter().enumerate() {
            let (j, i) = (idx / mw, idx % mw);
            for k in 0..p {
                values[(k * mx + j) * mw + i] = v[k];
            }
        }
        let field = ZakField {
            mx: p * mx,
            mw,
            values,
        };
        let samples = inverse_zak(&field, self.n_range());
        let w = Window::sampled(samples, self.window.smoothness())?;
        let flags = WindowFlags {
            numeric: true,
            insufficient_smoothness: self.window.flags().insufficient_smoothness,
        };
        Ok(Window::from_node(
            w.node().clone(),
            WindowKind::Sampled,
            self.window.smoothness(),
            flags,
        ))
    }

    /// `Σ c_{m,n} π(m/Q, nP) g`, evaluated pointwise.
    pub fn synthesize(&self, coeffs: &Coefficients) -> Window {
        synthesize_on(&self.window, self.sep, coeffs)
    }
}

pub fn synthesize_on(g: &Window, sep: SeparableLattice, coeffs: &Coefficients) -> Window {
    let mut groups: Vec<(i64, Vec<(i64, Complex64)>)> = Vec::new();
    for (&(m, n), &c) in coeffs {
        if c == Complex64::new(0.0, 0.0) {
            continue;
        }
        match groups.last_mut() {
            Some((gm, terms)) if *gm == m => terms.push((n, c)),
            _ => groups.push((m, vec![(n, c)])),
        }
    }
    if groups.is_empty() {
        return Window::zero();
    }
    let synth = Synth {
        base: g.node().clone(),
        p: sep.p(),
        q: sep.q(),
        groups,
    };
    Window::from_node(
        Arc::new(Node::Synth(Arc::new(synth))),
        WindowKind::Synthesized,
        g.smoothness(),
        g.flags(),
    )
}

/// Lattice point `(m/Q, nP)` and the phase-free shift it labels.
pub fn coefficient_point(sep: SeparableLattice, m: i64, n: i64) -> [f64; 2] {
    sep.point(m, n)
}

/// `e^{2πi t}` re-exported for coefficient bookkeeping.
pub fn phase(t: f64) -> Complex64 {
    cis2pi(t)
}
