//! Singular-value extremes of the matrix field and the resulting Riesz/frame
//! classification.
//!
//! Essential infima are approximated by grid minima over midpoints. Since a
//! midpoint grid can step over isolated zeros of the field (the Gaussian at
//! critical density vanishes exactly at one point of the unit square), every
//! grid minimum is followed by a pattern search from its best cells, and the
//! classification uses the smaller of the two values.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_defect, hermitian_eigen, singular_values, CMat};
use crate::par;
use crate::zak::{MatrixField, MatrixGrid};

/// Smallest singular value in the sense `σ₀(M) = √min σ(M*M)`: zero for wide
/// matrices.
pub fn sigma0(m: &CMat) -> f64 {
    if m.nrows() < m.ncols() {
        return 0.0;
    }
    singular_values(m).last().copied().unwrap_or(0.0)
}

/// Smallest positive singular value; `+∞` for the zero matrix. Values at or
/// below `rank_tol · σ_max` count as zero.
pub fn sigma1(m: &CMat, rank_tol: f64) -> f64 {
    let s = singular_values(m);
    let smax = s.first().copied().unwrap_or(0.0);
    s.iter()
        .rev()
        .copied()
        .find(|&v| v > rank_tol * smax && v > 0.0)
        .unwrap_or(f64::INFINITY)
}

/// Moore-Penrose pseudo-inverse, relative rank cut `rank_tol`.
pub fn pinv(m: &CMat, rank_tol: f64) -> CMat {
    crate::linalg::pseudo_inverse(m, rank_tol)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Classification {
    pub bessel: bool,
    pub riesz_sequence: bool,
    pub frame_sequence: bool,
    #[serde(rename = "frame_for_L2")]
    pub frame_for_l2: bool,
}

/// Grid minimum of one statistic with its refinement evidence.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Extremum {
    pub grid_min: f64,
    /// Minimizing grid point `(x, ω)`.
    pub at: (f64, f64),
    /// Minimum over a 5x5 grid of half spacing centred on `at`.
    pub refined_2x: f64,
    /// Result of the local pattern search.
    pub local_min: f64,
    pub local_at: (f64, f64),
}

impl Extremum {
    pub fn value(&self) -> f64 {
        self.grid_min.min(self.refined_2x).min(self.local_min)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralDiagnostics {
    pub p: usize,
    pub q: usize,
    pub grid: (usize, usize),
    pub sigma0_min: f64,
    pub sigma1_min: f64,
    pub sigma0_adj_min: f64,
    pub sigma_max: f64,
    pub sigma0: Extremum,
    pub sigma1: Extremum,
    pub sigma0_adj: Extremum,
    /// Positive means above this threshold.
    pub threshold: f64,
    pub classification: Classification,
    /// `(lower, upper)` = `(σ_min², σ_max²)` where `σ_min` is the statistic
    /// matching the classification (Riesz, frame for L², or frame sequence).
    pub bounds: (f64, f64),
}

#[derive(Clone, Copy)]
enum Stat {
    Sigma0,
    Sigma1,
    Sigma0Adj,
}

fn stat_of(sv: &[f64], p: usize, q: usize, which: Stat, rank_tol: f64) -> f64 {
    let smax = sv.first().copied().unwrap_or(0.0);
    let smin = sv.last().copied().unwrap_or(0.0);
    match which {
        Stat::Sigma0 => {
            if p < q {
                0.0
            } else {
                smin
            }
        }
        Stat::Sigma0Adj => {
            if q < p {
                0.0
            } else {
                smin
            }
        }
        Stat::Sigma1 => sv
            .iter()
            .rev()
            .copied()
            .find(|&v| v > rank_tol * smax && v > 0.0)
            .unwrap_or(f64::INFINITY),
    }
}

fn pattern_search(
    f: &(impl Fn(f64, f64) -> f64 + Sync),
    start: (f64, f64),
    step: (f64, f64),
    f0: f64,
) -> (f64, (f64, f64)) {
    let (mut x, mut w) = start;
    let (mut hx, mut hw) = step;
    let mut best = f0;
    for _ in 0..400 {
        if hx < 1e-12 && hw < 1e-12 {
            break;
        }
        let mut moved = false;
        for (dx, dw) in [
            (1.0, 0.0),
            (-1.0, 0.0),
            (0.0, 1.0),
            (0.0, -1.0),
            (1.0, 1.0),
            (-1.0, -1.0),
            (1.0, -1.0),
            (-1.0, 1.0),
        ] {
            let (cx, cw) = (x + dx * hx, w + dw * hw);
            let v = f(cx, cw);
            if v < best {
                best = v;
                x = cx;
                w = cw;
                moved = true;
                break;
            }
        }
        if !moved {
            hx *= 0.5;
            hw *= 0.5;
        }
    }
    (best, (x, w))
}

fn extremum(
    field: &MatrixField,
    grid: &MatrixGrid,
    values: &[f64],
    which: Stat,
    rank_tol: f64,
    searches: usize,
) -> Extremum {
    let (p, q) = (grid.p, grid.q);
    let eval = |x: f64, w: f64| stat_of(&singular_values(&field.at(x, w)), p, q, which, rank_tol);
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let best = order[0];
    let at = grid.points[best];
    let hx = 1.0 / (grid.mx * p) as f64;
    let hw = 1.0 / grid.mw as f64;
    let mut refined = f64::INFINITY;
    for i in -2i32..=2 {
        for j in -2i32..=2 {
            refined = refined.min(eval(at.0 + 0.5 * i as f64 * hx, at.1 + 0.5 * j as f64 * hw));
        }
    }
    let starts: Vec<usize> = order.iter().take(searches.max(1)).copied().collect();
    let results = par::map_slice(&starts, |&idx| {
        let z = grid.points[idx];
        if !values[idx].is_finite() {
            return (values[idx], z);
        }
        pattern_search(&eval, z, (0.5 * hx, 0.5 * hw), values[idx])
    });
    let (local_min, local_at) =
        results.into_iter().fold(
            (f64::INFINITY, at),
            |acc, r| if r.0 < acc.0 { r } else { acc },
        );
    Extremum {
        grid_min: values[best],
        at,
        refined_2x: refined,
        local_min,
        local_at,
    }
}

/// Grid statistics and classification.
pub fn diagnostics(
    field: &MatrixField,
    grid: &MatrixGrid,
    riesz_tol: f64,
    rank_tol: f64,
    zak_bounded: bool,
) -> SpectralDiagnostics {
    let (p, q) = (grid.p, grid.q);
    let svs: Vec<Vec<f64>> = par::map_slice(&grid.mats, singular_values);
    let sigma_max = svs
        .iter()
        .map(|s| s.first().copied().unwrap_or(0.0))
        .fold(0.0, f64::max);
    let col = |which: Stat| -> Vec<f64> {
        svs.iter()
            .map(|s| stat_of(s, p, q, which, rank_tol))
            .collect()
    };
    let s0 = col(Stat::Sigma0);
    let s1 = col(Stat::Sigma1);
    let sa = col(Stat::Sigma0Adj);
    let searches = 4;
    let e0 = extremum(field, grid, &s0, Stat::Sigma0, rank_tol, searches);
    let e1 = extremum(field, grid, &s1, Stat::Sigma1, rank_tol, searches);
    let ea = extremum(field, grid, &sa, Stat::Sigma0Adj, rank_tol, searches);
    let threshold = riesz_tol * sigma_max;
    let positive = |v: f64| v > threshold;
    let riesz = positive(e0.value());
    let frame_l2 = positive(ea.value()) && p <= q;
    let frame_seq = riesz || frame_l2 || positive(e1.value());
    let classification = Classification {
        bessel: zak_bounded && sigma_max.is_finite(),
        riesz_sequence: riesz,
        frame_sequence: frame_seq,
        frame_for_l2: frame_l2,
    };
    let lower = if riesz {
        e0.value()
    } else if frame_l2 {
        ea.value()
    } else {
        e1.value()
    };
    let lower = if lower.is_finite() && frame_seq {
        lower * lower
    } else {
        0.0
    };
    SpectralDiagnostics {
        p,
        q,
        grid: (grid.mx, grid.mw),
        sigma0_min: e0.value(),
        sigma1_min: e1.value(),
        sigma0_adj_min: ea.value(),
        sigma_max,
        sigma0: e0,
        sigma1: e1,
        sigma0_adj: ea,
        threshold,
        classification,
        bounds: (lower, sigma_max * sigma_max),
    }
}

/// Approximates the spectrum of the multiplication operator with symbol
/// `B(z)` by the union of pointwise eigenvalues, merged into intervals
/// wherever consecutive eigenvalues are closer than `gap`.
pub fn mult_op_spectrum_estimate(values: &[CMat], gap: f64) -> Result<Vec<(f64, f64)>> {
    let mut eig = Vec::new();
    for m in values {
        let d = hermitian_defect(m);
        if d > 1e-10 * (1.0 + m.norm()) {
            return Err(Error::NotHermitian { defect: d });
        }
        eig.extend(hermitian_eigen(m).0);
    }
    eig.sort_by(|a, b| a.total_cmp(b));
    let mut out: Vec<(f64, f64)> = Vec::new();
    for v in eig {
        match out.last_mut() {
            Some(last) if v - last.1 <= gap => last.1 = v,
            _ => out.push((v, v)),
        }
    }
    Ok(out)
}

/// `AA*` at every grid point.
pub fn frame_symbol(grid: &MatrixGrid) -> Vec<CMat> {
    grid.mats.iter().map(|a| a * a.adjoint()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DVector;
    use num_complex::Complex64;

    fn diag(v: &[f64]) -> CMat {
        CMat::from_diagonal(&DVector::from_iterator(
            v.len(),
            v.iter().map(|&x| Complex64::new(x, 0.0)),
        ))
    }

    #[test]
    fn sigma_examples() {
        let i3 = CMat::identity(3, 3);
        assert!((sigma0(&i3) - 1.0).abs() < 1e-15);
        assert!((sigma1(&i3, 1e-10) - 1.0).abs() < 1e-15);
        let z = CMat::zeros(2, 2);
        assert_eq!(sigma0(&z), 0.0);
        assert_eq!(sigma1(&z, 1e-10), f64::INFINITY);
        let d = diag(&[0.0, 2.0]);
        assert_eq!(sigma0(&d), 0.0);
        assert!((sigma1(&d, 1e-10) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn pinv_examples() {
        let i = CMat::identity(3, 3);
        assert!(crate::linalg::max_abs_diff(&pinv(&i, 1e-10), &i) < 1e-15);
        let p = pinv(&diag(&[2.0, 0.0]), 1e-10);
        assert!(crate::linalg::max_abs_diff(&p, &diag(&[0.5, 0.0])) < 1e-15);
    }

    #[test]
    fn constant_symbol_spectrum() {
        let vals = vec![diag(&[1.0, 2.0]); 10];
        let s = mult_op_spectrum_estimate(&vals, 1e-6).unwrap();
        assert_eq!(s, vec![(1.0, 1.0), (2.0, 2.0)]);
        let mut nh = CMat::zeros(2, 2);
        nh[(0, 1)] = Complex64::new(1.0, 0.0);
        assert!(matches!(
            mult_op_spectrum_estimate(&[nh], 1e-6),
            Err(Error::NotHermitian { .. })
        ));
    }
}
