//! Uniformly sampled functions: cubic interpolation, finite-difference
//! derivatives and the FFT fallback for Fourier transforms.

use num_complex::Complex64;
use rustfft::FftPlanner;

/// Values `values[n] ≈ f(x0 + n·dx)`, zero outside the sampled range.
#[derive(Debug, Clone, PartialEq)]
pub struct Samples {
    pub x0: f64,
    pub dx: f64,
    pub values: Vec<Complex64>,
}

// first-derivative central stencil, eighth order
const D1: [f64; 4] = [4.0 / 5.0, -1.0 / 5.0, 4.0 / 105.0, -1.0 / 280.0];

impl Samples {
    pub fn new(x0: f64, dx: f64, values: Vec<Complex64>) -> Self {
        Self { x0, dx, values }
    }

    pub fn from_fn(x0: f64, dx: f64, n: usize, f: impl Fn(f64) -> Complex64) -> Self {
        let values = (0..n).map(|i| f(x0 + i as f64 * dx)).collect();
        Self { x0, dx, values }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn x_end(&self) -> f64 {
        self.x0 + (self.values.len().max(1) - 1) as f64 * self.dx
    }

    fn at(&self, i: i64) -> Complex64 {
        if i < 0 || i as usize >= self.values.len() {
            Complex64::new(0.0, 0.0)
        } else {
            self.values[i as usize]
        }
    }

    /// Four-point Lagrange interpolation with zero extension.
    pub fn eval(&self, x: f64) -> Complex64 {
        let t = (x - self.x0) / self.dx;
        let n = self.values.len() as f64;
        if !(t > -1.0 && t < n) {
            return Complex64::new(0.0, 0.0);
        }
        let i = t.floor();
        let s = t - i;
        let i = i as i64;
        let wm = -s * (s - 1.0) * (s - 2.0) / 6.0;
        let w0 = (s + 1.0) * (s - 1.0) * (s - 2.0) / 2.0;
        let w1 = -(s + 1.0) * s * (s - 2.0) / 2.0;
        let w2 = (s + 1.0) * s * (s - 1.0) / 6.0;
        self.at(i - 1) * wm + self.at(i) * w0 + self.at(i + 1) * w1 + self.at(i + 2) * w2
    }

    /// Eighth-order central differences; the range grows by four samples on
    /// each side so the zero extension is differentiated consistently.
    pub fn derivative(&self) -> Samples {
        let pad = 4i64;
        let n = self.values.len() as i64 + 2 * pad;
        let values = (0..n)
            .map(|j| {
                let i = j - pad;
                let mut acc = Complex64::new(0.0, 0.0);
                for (k, c) in D1.iter().enumerate() {
                    let k = k as i64 + 1;
                    acc += (self.at(i + k) - self.at(i - k)) * *c;
                }
                acc / self.dx
            })
            .collect();
        Samples {
            x0: self.x0 - pad as f64 * self.dx,
            dx: self.dx,
            values,
        }
    }

    /// Riemann-sum Fourier transform `ĝ(ω) ≈ dx Σ g(x_n) e^{-2πi x_n ω}` on the
    /// frequency grid of a 16x zero-padded FFT.
    pub fn fourier(&self) -> Samples {
        let n = self.values.len();
        let m = (16 * n).next_power_of_two().max(8);
        let mut buf = vec![Complex64::new(0.0, 0.0); m];
        buf[..n].copy_from_slice(&self.values);
        FftPlanner::new().plan_fft_forward(m).process(&mut buf);
        let dw = 1.0 / (m as f64 * self.dx);
        let half = (m / 2) as i64;
        let values = (-half..half)
            .map(|k| {
                let w = k as f64 * dw;
                let phase = crate::linalg::cis2pi(-self.x0 * w);
                buf[k.rem_euclid(m as i64) as usize] * phase * self.dx
            })
            .collect();
        Samples {
            x0: -(half as f64) * dw,
            dx: dw,
            values,
        }
    }
}
