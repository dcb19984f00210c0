//! Planar lattices, rational density detection and the symplectic reduction
//! `B Λ = (1/Q)Z x PZ`.
//!
//! The reduction matrix is not unique: any `B` composed with an automorphism of
//! the target lattice works as well. [`Lattice::reduce_to_separable`] always
//! returns the canonical choice `diag((PQ)^{-1/2}, (PQ)^{1/2}) |det A|^{1/2} A^{-1}`
//! (with a `diag(-1, 1)` flip before `A^{-1}` when `det A < 0`).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Row-major 2x2 real matrix `[[a, b], [c, d]]`.
pub type Mat2 = [[f64; 2]; 2];

pub fn mat_mul(x: &Mat2, y: &Mat2) -> Mat2 {
    [
        [
            x[0][0] * y[0][0] + x[0][1] * y[1][0],
            x[0][0] * y[0][1] + x[0][1] * y[1][1],
        ],
        [
            x[1][0] * y[0][0] + x[1][1] * y[1][0],
            x[1][0] * y[0][1] + x[1][1] * y[1][1],
        ],
    ]
}

pub fn mat_det(m: &Mat2) -> f64 {
    m[0][0] * m[1][1] - m[0][1] * m[1][0]
}

pub fn mat_inv(m: &Mat2) -> Mat2 {
    let d = mat_det(m);
    [[m[1][1] / d, -m[0][1] / d], [-m[1][0] / d, m[0][0] / d]]
}

pub fn mat_apply(m: &Mat2, v: [f64; 2]) -> [f64; 2] {
    [
        m[0][0] * v[0] + m[0][1] * v[1],
        m[1][0] * v[0] + m[1][1] * v[1],
    ]
}

pub const IDENTITY: Mat2 = [[1.0, 0.0], [0.0, 1.0]];

fn spectral_norm(m: &Mat2) -> f64 {
    // largest eigenvalue of m^T m
    let a = m[0][0] * m[0][0] + m[1][0] * m[1][0];
    let d = m[0][1] * m[0][1] + m[1][1] * m[1][1];
    let b = m[0][0] * m[0][1] + m[1][0] * m[1][1];
    let tr = a + d;
    let disc = ((a - d) * (a - d) + 4.0 * b * b).sqrt();
    (0.5 * (tr + disc)).sqrt()
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Full-rank lattice `A Z^2`; the columns of `A` are the basis vectors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Lattice {
    generator: Mat2,
}

/// `(1/Q) Z x P Z` with `gcd(P, Q) = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SeparableLattice {
    p: u32,
    q: u32,
}

/// Output of [`Lattice::reduce_to_separable`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Reduction {
    /// `det B = 1` and `B Λ = (1/Q)Z x PZ`.
    pub b: Mat2,
    pub sep: SeparableLattice,
    /// `B A = diag(1/Q, P) U`.
    pub unimodular: [[i64; 2]; 2],
}

impl Lattice {
    pub fn new(generator: Mat2) -> Result<Self> {
        let det = mat_det(&generator);
        if !det.is_finite() || det.abs() < 1e-12 {
            return Err(Error::DegenerateLattice { det });
        }
        Ok(Self { generator })
    }

    /// `a Z x b Z`.
    pub fn separable(a: f64, b: f64) -> Result<Self> {
        Self::new([[a, 0.0], [0.0, b]])
    }

    pub fn generator(&self) -> Mat2 {
        self.generator
    }

    pub fn det(&self) -> f64 {
        mat_det(&self.generator)
    }

    /// `|det A|^{-1}`.
    pub fn density(&self) -> f64 {
        1.0 / self.det().abs()
    }

    pub fn point(&self, i: i64, j: i64) -> [f64; 2] {
        mat_apply(&self.generator, [i as f64, j as f64])
    }

    /// Coordinates of `mu` in the lattice basis.
    pub fn coordinates(&self, mu: [f64; 2]) -> [f64; 2] {
        mat_apply(&mat_inv(&self.generator), mu)
    }

    pub fn contains(&self, mu: [f64; 2], tol: f64) -> bool {
        let c = self.coordinates(mu);
        (c[0] - c[0].round()).abs() < tol && (c[1] - c[1].round()).abs() < tol
    }

    /// Detects `|det A| = P/Q` with `Q <= max_den` by continued fractions.
    pub fn rational_density(&self, max_den: u64, tol: f64) -> Option<(u64, u64)> {
        rational_approx(self.det().abs(), max_den, tol)
    }

    /// The canonical symplectic reduction to `(1/Q)Z x PZ`.
    pub fn reduce_to_separable(&self) -> Result<Reduction> {
        self.reduce_with(1000, 1e-9)
    }

    pub fn reduce_with(&self, max_den: u64, tol: f64) -> Result<Reduction> {
        let det = self.det();
        let (p, q) = self
            .rational_density(max_den, tol)
            .ok_or(Error::NonRationalDensity {
                density: self.density(),
            })?;
        let sep = SeparableLattice::new(p as u32, q as u32)?;
        let scale = det.abs().sqrt();
        let inv = mat_inv(&self.generator);
        let flip = if det < 0.0 {
            [[-1.0, 0.0], [0.0, 1.0]]
        } else {
            IDENTITY
        };
        let fi = mat_mul(&flip, &inv);
        let b0 = [
            [scale * fi[0][0], scale * fi[0][1]],
            [scale * fi[1][0], scale * fi[1][1]],
        ];
        let pq = (p * q) as f64;
        let b = mat_mul(&[[pq.powf(-0.5), 0.0], [0.0, pq.sqrt()]], &b0);
        let ba = mat_mul(&b, &self.generator);
        let u = [
            [
                (ba[0][0] * q as f64).round() as i64,
                (ba[0][1] * q as f64).round() as i64,
            ],
            [
                (ba[1][0] / p as f64).round() as i64,
                (ba[1][1] / p as f64).round() as i64,
            ],
        ];
        Ok(Reduction {
            b,
            sep,
            unimodular: u,
        })
    }

    /// Closest lattice point to `mu` by exhaustive search over the integer box
    /// that can contain a point closer than the rounded coordinate guess.
    pub fn nearest_point(&self, mu: [f64; 2]) -> ([f64; 2], f64) {
        let c = self.coordinates(mu);
        let guess = self.point(c[0].round() as i64, c[1].round() as i64);
        let d0 = ((mu[0] - guess[0]).powi(2) + (mu[1] - guess[1]).powi(2)).sqrt();
        let r = spectral_norm(&mat_inv(&self.generator)) * d0 + 1e-9;
        let (mut best, mut best_d) = (guess, d0);
        let (i0, i1) = ((c[0] - r).floor() as i64, (c[0] + r).ceil() as i64);
        let (j0, j1) = ((c[1] - r).floor() as i64, (c[1] + r).ceil() as i64);
        for i in i0..=i1 {
            for j in j0..=j1 {
                let pt = self.point(i, j);
                let d = ((mu[0] - pt[0]).powi(2) + (mu[1] - pt[1]).powi(2)).sqrt();
                if d < best_d {
                    best = pt;
                    best_d = d;
                }
            }
        }
        (best, best_d)
    }

    pub fn distance(&self, mu: [f64; 2]) -> f64 {
        self.nearest_point(mu).1
    }

    /// True when both generators span the same point set, i.e. `A^{-1} A'` is an
    /// integer matrix with determinant `±1`.
    pub fn same_point_set(&self, other: &Lattice) -> bool {
        let m = mat_mul(&mat_inv(&self.generator), &other.generator);
        let integral = m.iter().flatten().all(|v| (v - v.round()).abs() < 1e-9);
        integral && (mat_det(&m).abs() - 1.0).abs() < 1e-9
    }

    /// Image lattice `B Λ`.
    pub fn transformed(&self, b: &Mat2) -> Result<Lattice> {
        Lattice::new(mat_mul(b, &self.generator))
    }
}

fn rational_approx(x: f64, max_den: u64, tol: f64) -> Option<(u64, u64)> {
    if !x.is_finite() || x <= 0.0 {
        return None;
    }
    let (mut h0, mut h1) = (0u64, 1u64);
    let (mut k0, mut k1) = (1u64, 0u64);
    let mut r = x;
    for _ in 0..64 {
        let a = r.floor();
        if a > 1e15 {
            break;
        }
        let a = a as u64;
        let h2 = a.checked_mul(h1)?.checked_add(h0)?;
        let k2 = a.checked_mul(k1)?.checked_add(k0)?;
        if k2 > max_den {
            break;
        }
        if (x - h2 as f64 / k2 as f64).abs() < tol {
            let g = gcd(h2, k2);
            return Some((h2 / g, k2 / g));
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        let frac = r - r.floor();
        if frac < 1e-15 {
            break;
        }
        r = 1.0 / frac;
    }
    None
}

impl SeparableLattice {
    pub fn new(p: u32, q: u32) -> Result<Self> {
        if p == 0 || q == 0 {
            return Err(Error::InvalidParameter("P and Q must be positive".into()));
        }
        if gcd(p as u64, q as u64) != 1 {
            return Err(Error::InvalidParameter(format!(
                "P = {p} and Q = {q} are not coprime"
            )));
        }
        Ok(Self { p, q })
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    /// Time step `1/Q`.
    pub fn time_step(&self) -> f64 {
        1.0 / self.q as f64
    }

    /// Frequency step `P`.
    pub fn freq_step(&self) -> f64 {
        self.p as f64
    }

    pub fn lattice(&self) -> Lattice {
        Lattice {
            generator: [[self.time_step(), 0.0], [0.0, self.freq_step()]],
        }
    }

    /// Lattice point `(m/Q, nP)`.
    pub fn point(&self, m: i64, n: i64) -> [f64; 2] {
        [m as f64 / self.q as f64, n as f64 * self.p as f64]
    }

    pub fn density(&self) -> f64 {
        self.q as f64 / self.p as f64
    }
}

/// Generators of `SL(2, R)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Sl2Factor {
    /// `[[0, 1], [-1, 0]]`.
    Rotation90,
    /// `diag(1/α, α)`.
    Dilation(f64),
    /// `[[1, 0], [β, 1]]`.
    Shear(f64),
}

impl Sl2Factor {
    pub fn matrix(&self) -> Mat2 {
        match *self {
            Sl2Factor::Rotation90 => [[0.0, 1.0], [-1.0, 0.0]],
            Sl2Factor::Dilation(a) => [[1.0 / a, 0.0], [0.0, a]],
            Sl2Factor::Shear(b) => [[1.0, 0.0], [b, 1.0]],
        }
    }
}

/// `B = factors[0] · factors[1] · ...`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Sl2Factorization {
    pub b: Mat2,
    pub factors: Vec<Sl2Factor>,
}

impl Sl2Factorization {
    pub fn product(&self) -> Mat2 {
        self.factors
            .iter()
            .fold(IDENTITY, |acc, f| mat_mul(&acc, &f.matrix()))
    }
}

/// Writes `B ∈ SL(2,R)` as a product of at most four generators.
///
/// For `b != 0`: `B = Dilation(1/b) · Shear(bd) · Rotation90 · Shear(a/b)`.
/// For `b = 0`: `B = Shear(c/a) · Dilation(1/a)`. Identity factors are dropped.
pub fn factor_sl2(b: &Mat2) -> Result<Sl2Factorization> {
    let det = mat_det(b);
    if (det - 1.0).abs() >= 1e-12 || !det.is_finite() {
        return Err(Error::NotUnimodular { det });
    }
    let [[a, bb], [c, d]] = *b;
    let mut factors = Vec::with_capacity(4);
    let mut push = |f: Sl2Factor| match f {
        Sl2Factor::Dilation(1.0) | Sl2Factor::Shear(0.0) => {}
        f => factors.push(f),
    };
    if bb != 0.0 {
        push(Sl2Factor::Dilation(1.0 / bb));
        push(Sl2Factor::Shear(bb * d));
        push(Sl2Factor::Rotation90);
        push(Sl2Factor::Shear(a / bb));
    } else {
        push(Sl2Factor::Shear(c / a));
        push(Sl2Factor::Dilation(1.0 / a));
    }
    Ok(Sl2Factorization { b: *b, factors })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &Mat2, b: &Mat2, tol: f64) -> bool {
        a.iter()
            .flatten()
            .zip(b.iter().flatten())
            .all(|(x, y)| (x - y).abs() < tol)
    }

    #[test]
    fn densities() {
        assert_eq!(Lattice::new(IDENTITY).unwrap().density(), 1.0);
        assert!((Lattice::separable(2.0, 2.0 / 3.0).unwrap().density() - 0.75).abs() < 1e-15);
        assert!((Lattice::separable(1.0 / 3.0, 4.0).unwrap().density() - 0.75).abs() < 1e-15);
    }

    #[test]
    fn degenerate_rejected() {
        assert!(matches!(
            Lattice::new([[1.0, 2.0], [0.5, 1.0]]),
            Err(Error::DegenerateLattice { .. })
        ));
    }

    #[test]
    fn rational_density_examples() {
        let l = Lattice::separable(2.0, 2.0 / 3.0).unwrap();
        assert_eq!(l.rational_density(100, 1e-9), Some((4, 3)));
        assert_eq!(
            Lattice::new(IDENTITY).unwrap().rational_density(1000, 1e-9),
            Some((1, 1))
        );
        let irr = Lattice::separable(2f64.sqrt(), 1.0).unwrap();
        assert_eq!(irr.rational_density(10, 1e-9), None);
    }

    #[test]
    fn reduction_examples() {
        let r = Lattice::separable(2.0, 2.0 / 3.0)
            .unwrap()
            .reduce_to_separable()
            .unwrap();
        assert!(close(&r.b, &[[1.0 / 6.0, 0.0], [0.0, 6.0]], 1e-12));
        assert_eq!((r.sep.p(), r.sep.q()), (4, 3));
        let r = Lattice::new(IDENTITY)
            .unwrap()
            .reduce_to_separable()
            .unwrap();
        assert!(close(&r.b, &IDENTITY, 1e-15));
        let r = Lattice::separable(1.0, 2.0 / 3.0)
            .unwrap()
            .reduce_to_separable()
            .unwrap();
        assert!(close(&r.b, &[[1.0 / 3.0, 0.0], [0.0, 3.0]], 1e-12));
        assert_eq!((r.sep.p(), r.sep.q()), (2, 3));
    }

    #[test]
    fn reduction_with_negative_determinant() {
        let l = Lattice::new([[0.0, 1.0], [2.0, 0.0]]).unwrap();
        let r = l.reduce_to_separable().unwrap();
        assert!((mat_det(&r.b) - 1.0).abs() < 1e-12);
        assert_eq!((r.sep.p(), r.sep.q()), (2, 1));
        let img = l.transformed(&r.b).unwrap();
        assert!(img.same_point_set(&r.sep.lattice()));
        let u = r.unimodular;
        assert_eq!((u[0][0] * u[1][1] - u[0][1] * u[1][0]).abs(), 1);
    }

    #[test]
    fn non_rational_reduction_fails() {
        let l = Lattice::separable(std::f64::consts::PI, 1.0).unwrap();
        assert!(matches!(
            l.reduce_with(10, 1e-9),
            Err(Error::NonRationalDensity { .. })
        ));
    }

    #[test]
    fn factorization_examples() {
        let f = factor_sl2(&[[1.0 / 6.0, 0.0], [0.0, 6.0]]).unwrap();
        assert_eq!(f.factors, vec![Sl2Factor::Dilation(6.0)]);
        assert!(factor_sl2(&IDENTITY).unwrap().factors.is_empty());
        let f = factor_sl2(&[[0.0, 1.0], [-1.0, 0.0]]).unwrap();
        assert_eq!(f.factors, vec![Sl2Factor::Rotation90]);
        assert!(matches!(
            factor_sl2(&[[2.0, 0.0], [0.0, 2.0]]),
            Err(Error::NotUnimodular { .. })
        ));
    }

    #[test]
    fn nearest_point_examples() {
        let z2 = Lattice::new(IDENTITY).unwrap();
        let (pt, d) = z2.nearest_point([0.4, 0.4]);
        assert_eq!(pt, [0.0, 0.0]);
        assert!((d - 0.4 * 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(z2.nearest_point([1.0, 1.0]).1, 0.0);
        // brute force over a radius-3 integer box
        let sep = SeparableLattice::new(4, 3).unwrap().lattice();
        let mut best = f64::INFINITY;
        for i in -3..=3 {
            for j in -3..=3 {
                let p = sep.point(i, j);
                best = best.min(((0.5 - p[0]).powi(2) + (1.0 - p[1]).powi(2)).sqrt());
            }
        }
        let d = sep.distance([0.5, 1.0]);
        assert!((d - best).abs() < 1e-15);
        assert!((d - ((1.0f64 / 6.0).powi(2) + 1.0).sqrt()).abs() < 1e-14);
    }

    #[test]
    fn same_point_set_ignores_basis() {
        let a = Lattice::new([[1.0, 0.0], [0.0, 2.0]]).unwrap();
        let b = Lattice::new([[1.0, 1.0], [0.0, 2.0]]).unwrap();
        let c = Lattice::new([[1.0, 0.5], [0.0, 2.0]]).unwrap();
        assert!(a.same_point_set(&b));
        assert!(!a.same_point_set(&c));
        assert_ne!(a, b);
    }

    #[test]
    fn separable_requires_coprime() {
        assert!(SeparableLattice::new(4, 2).is_err());
        assert!(SeparableLattice::new(0, 1).is_err());
    }
}
