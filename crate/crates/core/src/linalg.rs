//! Small dense complex linear algebra used per grid point.

use nalgebra::DMatrix;
use num_complex::Complex64;

pub type CMat = DMatrix<Complex64>;

pub(crate) const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// `e^{2 pi i t}`.
#[inline]
pub fn cis2pi(t: f64) -> Complex64 {
    let (s, c) = (2.0 * std::f64::consts::PI * t).sin_cos();
    Complex64::new(c, s)
}

/// Thin SVD `A = U diag(s) V*` with `s` descending; `U` is `m x k`, `V` is
/// `n x k`, `k = min(m, n)`.
///
/// One-sided Jacobi. nalgebra's bidiagonal SVD returns wrong factors for some
/// exactly rank-deficient complex matrices, which the pseudo-inverse cannot
/// tolerate.
pub struct Svd {
    pub u: CMat,
    pub s: Vec<f64>,
    pub v: CMat,
}

pub fn svd(m: &CMat) -> Svd {
    if m.nrows() < m.ncols() {
        let t = jacobi_svd(m.adjoint());
        return Svd {
            u: t.v,
            s: t.s,
            v: t.u,
        };
    }
    jacobi_svd(m.clone())
}

fn jacobi_svd(mut a: CMat) -> Svd {
    let (m, n) = (a.nrows(), a.ncols());
    let mut v = CMat::identity(n, n);
    for _sweep in 0..80 {
        let mut rotated = false;
        for i in 0..n {
            for j in i + 1..n {
                let alpha = a.column(i).norm_squared();
                let beta = a.column(j).norm_squared();
                let gamma = a.column(i).dotc(&a.column(j));
                let g = gamma.norm();
                if g == 0.0 || g <= f64::EPSILON * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let ph = gamma / g;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let sn = c * t;
                for mat in [&mut a, &mut v] {
                    for r in 0..mat.nrows() {
                        let xi = mat[(r, i)];
                        let xj = mat[(r, j)] * ph.conj();
                        mat[(r, i)] = xi * c - xj * sn;
                        mat[(r, j)] = xi * sn + xj * c;
                    }
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let norms: Vec<f64> = (0..n).map(|k| a.column(k).norm()).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| norms[y].total_cmp(&norms[x]));
    let s: Vec<f64> = order.iter().map(|&k| norms[k]).collect();
    let u = CMat::from_fn(m, n, |r, c| {
        let k = order[c];
        if norms[k] > 0.0 {
            a[(r, k)] / norms[k]
        } else {
            ZERO
        }
    });
    let v = CMat::from_fn(n, n, |r, c| v[(r, order[c])]);
    Svd { u, s, v }
}

/// Singular values in descending order.
pub fn singular_values(m: &CMat) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    svd(m).s
}

/// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending.
pub fn hermitian_eigen(m: &CMat) -> (Vec<f64>, CMat) {
    let eig = m.clone().symmetric_eigen();
    let n = m.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let vals = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vecs = CMat::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    (vals, vecs)
}

/// Applies a real function to the spectrum of a Hermitian matrix.
pub fn hermitian_function(m: &CMat, f: impl Fn(f64) -> f64) -> CMat {
    let (vals, vecs) = hermitian_eigen(m);
    let n = m.nrows();
    let d = CMat::from_fn(n, n, |r, c| {
        if r == c {
            Complex64::new(f(vals[r]), 0.0)
        } else {
            ZERO
        }
    });
    &vecs * d * vecs.adjoint()
}

/// Largest entrywise modulus of `a - b`.
pub fn max_abs_diff(a: &CMat, b: &CMat) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

pub fn identity(n: usize) -> CMat {
    CMat::identity(n, n)
}

/// Hermitian defect `max |M - M*|`.
pub fn hermitian_defect(m: &CMat) -> f64 {
    max_abs_diff(m, &m.adjoint())
}

/// Solves `(A*A) X = A*` for `X = (A*A)^{-1} A*` by Cholesky.
///
/// Returns `None` when the Gram matrix is not positive definite or its
/// condition number exceeds `max_cond`.
pub(crate) fn gram_inverse_times_adjoint(a: &CMat, max_cond: f64) -> Option<CMat> {
    let gram = a.adjoint() * a;
    let chol = gram.clone().cholesky()?;
    let diag_max = (0..gram.nrows())
        .map(|i| chol.l_dirty()[(i, i)].norm())
        .fold(0.0, f64::max);
    let diag_min = (0..gram.nrows())
        .map(|i| chol.l_dirty()[(i, i)].norm())
        .fold(f64::INFINITY, f64::min);
    // cond(A*A) is at least (max l_ii / min l_ii)^2
    if diag_min <= 0.0 || (diag_max / diag_min).powi(2) > max_cond {
        return None;
    }
    Some(chol.solve(&a.adjoint()))
}

/// Moore-Penrose pseudo-inverse with singular values at or below
/// `rank_tol * sigma_max` treated as zero.
pub fn pseudo_inverse(m: &CMat, rank_tol: f64) -> CMat {
    let (r, c) = (m.nrows(), m.ncols());
    if r == 0 || c == 0 {
        return CMat::zeros(c, r);
    }
    let d = svd(m);
    let cut = rank_tol * d.s.first().copied().unwrap_or(0.0);
    let mut out = CMat::zeros(c, r);
    for (k, &s) in d.s.iter().enumerate() {
        if s > cut && s > 0.0 {
            out += d.v.column(k) * d.u.column(k).adjoint() * Complex64::new(1.0 / s, 0.0);
        }
    }
    out
}

/// Orthogonal projector onto the range of `a`, `A (A*A)^{-1} A*`, falling back to
/// `A A^dagger` for ill-conditioned Gram matrices.
pub fn range_projector(a: &CMat, rank_tol: f64) -> CMat {
    match gram_inverse_times_adjoint(a, 1e12) {
        Some(x) => a * x,
        None => a * pseudo_inverse(a, rank_tol),
    }
}
