//! Zak-domain analysis of Gabor systems `{e^{2πibx} g(x-a) : (a,b) ∈ Λ}` on
//! lattices of rational density.
//!
//! The crate covers the symplectic reduction of a lattice to `(1/Q)Z x PZ`,
//! windows with analytic calculus, the Zak transform and the `P x Q` matrix
//! field `A_g`, Riesz/frame diagnostics with dual and tight windows, and the
//! distance of time-frequency shifts `π(μ)g` to the Gabor space together with
//! the explicit constants that bound it.

pub mod distance;
pub mod error;
pub mod gabor;
pub mod lattice;
pub mod linalg;
pub mod metaplectic;
mod par;
pub mod quadrature;
pub mod window;
pub mod zak;

pub use error::{Error, Result};
pub use lattice::{Lattice, SeparableLattice};
pub use window::{Smoothness, Window};
