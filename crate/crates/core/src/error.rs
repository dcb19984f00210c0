use thiserror::Error;

/// Errors raised by the lattice, window, Zak and Gabor routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("degenerate lattice: |det| = {det:e} is below 1e-12")]
    DegenerateLattice { det: f64 },
    #[error("lattice density {density} is not rational within the requested tolerance")]
    NonRationalDensity { density: f64 },
    #[error("matrix is not in SL(2,R): det = {det}")]
    NotUnimodular { det: f64 },
    #[error("dilation parameter must be nonzero")]
    ZeroDilation,
    #[error("chirp parameter must be nonzero")]
    ZeroChirp,
    #[error("quadrature did not converge: estimate {estimate:e}, last change {delta:e}")]
    QuadratureNotConverged { estimate: f64, delta: f64 },
    #[error("window is not declared to lie in H1 (g' and Xg in L2)")]
    NotH1,
    #[error("window is not declared to lie in H2")]
    NotH2,
    #[error("Gabor system is not a Bessel sequence")]
    NotBessel,
    #[error("Gabor system is not a Riesz sequence (grid min sigma0 = {sigma0_min:e})")]
    NotRiesz { sigma0_min: f64 },
    #[error("Gabor system is not orthonormal (max |A*A - I| = {defect:e})")]
    NotOrthonormal { defect: f64 },
    #[error("Gram matrix is numerically singular (condition number {cond:e})")]
    SingularGram { cond: f64 },
    #[error("no nontrivial kernel: grid min sigma0 = {sigma0_min:e}")]
    NoKernel { sigma0_min: f64 },
    #[error("matrix field is not Hermitian (defect {defect:e})")]
    NotHermitian { defect: f64 },
    #[error("both vectors are zero")]
    BothZero,
    #[error("signal has zero norm")]
    ZeroSignal,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
