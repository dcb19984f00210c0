//! Dense complex polynomials in ascending coefficient order.

use num_complex::Complex64;

pub(crate) fn eval(p: &[Complex64], x: f64) -> Complex64 {
    p.iter()
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, c| acc * x + c)
}

pub(crate) fn derivative(p: &[Complex64]) -> Vec<Complex64> {
    p.iter()
        .enumerate()
        .skip(1)
        .map(|(k, c)| c * k as f64)
        .collect()
}

/// `x · p(x)`.
pub(crate) fn shift_up(p: &[Complex64]) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(p.len() + 1);
    out.push(Complex64::new(0.0, 0.0));
    out.extend_from_slice(p);
    out
}

pub(crate) fn add(p: &[Complex64], q: &[Complex64]) -> Vec<Complex64> {
    let n = p.len().max(q.len());
    (0..n)
        .map(|k| p.get(k).copied().unwrap_or_default() + q.get(k).copied().unwrap_or_default())
        .collect()
}

pub(crate) fn scale(p: &[Complex64], c: Complex64) -> Vec<Complex64> {
    p.iter().map(|v| v * c).collect()
}

/// Derivative of `q(x) e^{-πx²/α}` written as `q̃(x) e^{-πx²/α}`.
pub(crate) fn gauss_derivative(q: &[Complex64], alpha: f64) -> Vec<Complex64> {
    let lin = scale(
        &shift_up(q),
        Complex64::new(-2.0 * std::f64::consts::PI / alpha, 0.0),
    );
    trim(add(&derivative(q), &lin))
}

pub(crate) fn trim(mut p: Vec<Complex64>) -> Vec<Complex64> {
    while p.len() > 1 && p.last().is_some_and(|c| c.norm() == 0.0) {
        p.pop();
    }
    if p.is_empty() {
        p.push(Complex64::new(0.0, 0.0));
    }
    p
}

/// Fourier transform of `p(x) e^{-πx²/α}`, returned as the polynomial factor
/// of `q(ω) e^{-παω²}`.
///
/// Uses `ℱ[x^k G] = (i/2π)^k ∂^k ℱ[G]` with `ℱ[e^{-πx²/α}] = √α e^{-παω²}`.
pub(crate) fn gauss_fourier(p: &[Complex64], alpha: f64) -> Vec<Complex64> {
    let factor = Complex64::new(0.0, 1.0 / (2.0 * std::f64::consts::PI));
    let mut out = vec![Complex64::new(0.0, 0.0)];
    let mut dk = vec![Complex64::new(alpha.sqrt(), 0.0)];
    let mut fk = Complex64::new(1.0, 0.0);
    for (k, c) in p.iter().enumerate() {
        if k > 0 {
            dk = gauss_derivative(&dk, 1.0 / alpha);
            fk *= factor;
        }
        out = add(&out, &scale(&dk, c * fk));
    }
    trim(out)
}

/// Coefficients (in `x`) of `(2π)^{1/4} (2^n n! √π)^{-1/2} H_n(√(2π) x)`.
pub(crate) fn hermite_factor(n: usize) -> Vec<Complex64> {
    // physicists' Hermite polynomials in t
    let mut h0 = vec![1.0];
    let mut h1 = vec![0.0, 2.0];
    let hn = match n {
        0 => h0,
        1 => h1,
        _ => {
            for k in 1..n {
                let mut next = vec![0.0; k + 2];
                for (i, c) in h1.iter().enumerate() {
                    next[i + 1] += 2.0 * c;
                }
                for (i, c) in h0.iter().enumerate() {
                    next[i] -= 2.0 * k as f64 * c;
                }
                h0 = h1;
                h1 = next;
            }
            h1
        }
    };
    let pi = std::f64::consts::PI;
    // log of 2^n n! sqrt(pi)
    let log_norm =
        n as f64 * 2f64.ln() + (1..=n).map(|k| (k as f64).ln()).sum::<f64>() + 0.5 * pi.ln();
    let pref = (2.0 * pi).powf(0.25) * (-0.5 * log_norm).exp();
    let s = (2.0 * pi).sqrt();
    hn.iter()
        .enumerate()
        .map(|(k, c)| Complex64::new(pref * c * s.powi(k as i32), 0.0))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn horner() {
        let p = [c(1.0), c(-2.0), c(3.0)];
        assert_eq!(eval(&p, 2.0), c(9.0));
    }

    #[test]
    fn hermite_zero_is_normalized_gaussian_factor() {
        let h = hermite_factor(0);
        assert_eq!(h.len(), 1);
        assert!((h[0].re - 2f64.powf(0.25)).abs() < 1e-14);
    }

    #[test]
    fn gaussian_derivative_factor() {
        let d = gauss_derivative(&[c(1.0)], 1.0);
        assert_eq!(d.len(), 2);
        assert!((d[1].re + 2.0 * std::f64::consts::PI).abs() < 1e-15);
    }

    #[test]
    fn fourier_of_plain_gaussian() {
        let f = gauss_fourier(&[c(1.0)], 2.0);
        assert!((f[0].re - 2f64.sqrt()).abs() < 1e-15);
    }
}
