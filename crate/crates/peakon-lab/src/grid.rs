//! Periodic spectral transforms on uniform grids over `[-L, L)`.
//!
//! All operators act through the discrete Fourier basis `exp(i xi_k x)` with
//! `xi_k = k pi / L` for integer `k` in the symmetric layout. Single-threaded
//! and deterministic: identical input always produces identical bits.

use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

/// Planned forward/inverse transforms plus the multiplier helpers for one
/// grid size. Construction is cheap enough per call sites that only run once;
/// the PDE stepper keeps one instance alive for the whole run.
pub struct SpectralOps {
    n: usize,
    l: f64,
    fft: Arc<dyn Fft<f64>>,
    ifft: Arc<dyn Fft<f64>>,
}

impl SpectralOps {
    /// `n` must be a power of two (callers validate); `l` is the domain
    /// half-length.
    pub fn new(n: usize, l: f64) -> Self {
        let mut planner = FftPlanner::new();
        let fft = planner.plan_fft_forward(n);
        let ifft = planner.plan_fft_inverse(n);
        Self { n, l, fft, ifft }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Grid coordinates `x_j = -L + 2L j / n`.
    pub fn coords(&self) -> Vec<f64> {
        let dx = 2.0 * self.l / self.n as f64;
        (0..self.n).map(|j| -self.l + dx * j as f64).collect()
    }

    pub fn dx(&self) -> f64 {
        2.0 * self.l / self.n as f64
    }

    /// Signed integer frequency for bin `k` in the symmetric layout.
    fn freq(&self, k: usize) -> i64 {
        if k <= self.n / 2 {
            k as i64
        } else {
            k as i64 - self.n as i64
        }
    }

    /// Continuous wavenumber `xi_k` for bin `k`.
    pub fn wavenumber(&self, k: usize) -> f64 {
        self.freq(k) as f64 * std::f64::consts::PI / self.l
    }

    pub fn forward(&self, values: &[f64]) -> Vec<Complex<f64>> {
        let mut buf: Vec<Complex<f64>> =
            values.iter().map(|&v| Complex::new(v, 0.0)).collect();
        self.fft.process(&mut buf);
        buf
    }

    pub fn inverse(&self, spectrum: &[Complex<f64>]) -> Vec<f64> {
        let mut buf = spectrum.to_vec();
        self.ifft.process(&mut buf);
        let scale = 1.0 / self.n as f64;
        buf.iter().map(|c| c.re * scale).collect()
    }

    fn apply<F: Fn(usize, f64) -> Complex<f64>>(&self, values: &[f64], mult: F) -> Vec<f64> {
        let mut spec = self.forward(values);
        for (k, c) in spec.iter_mut().enumerate() {
            *c *= mult(k, self.wavenumber(k));
        }
        self.inverse(&spec)
    }

    /// Spectral first derivative. The Nyquist mode's derivative is zeroed to
    /// keep the operator skew-symmetric on the grid.
    pub fn derivative(&self, values: &[f64]) -> Vec<f64> {
        let nyquist = self.n / 2;
        self.apply(values, |k, xi| {
            if k == nyquist {
                Complex::new(0.0, 0.0)
            } else {
                Complex::new(0.0, xi)
            }
        })
    }

    /// Inverse Helmholtz multiplier `1 / (1 + xi^2)`, i.e. convolution with
    /// the periodized kernel.
    pub fn helmholtz(&self, values: &[f64]) -> Vec<f64> {
        self.apply(values, |_, xi| Complex::new(1.0 / (1.0 + xi * xi), 0.0))
    }

    /// `dx` of the inverse Helmholtz operator in one pass.
    pub fn helmholtz_dx(&self, values: &[f64]) -> Vec<f64> {
        let nyquist = self.n / 2;
        self.apply(values, |k, xi| {
            if k == nyquist {
                Complex::new(0.0, 0.0)
            } else {
                Complex::new(0.0, xi / (1.0 + xi * xi))
            }
        })
    }

    /// Momentum multiplier `1 + xi^2`, the forward Helmholtz operator.
    pub fn momentum(&self, values: &[f64]) -> Vec<f64> {
        self.apply(values, |_, xi| Complex::new(1.0 + xi * xi, 0.0))
    }

    /// 2/3-rule dealiasing: zeroes modes with `|k| > n/3`. Applied to
    /// quadratic products to stop aliased energy pile-up.
    pub fn dealias(&self, values: &[f64]) -> Vec<f64> {
        let cut = self.n as i64 / 3;
        self.apply(values, |k, _| {
            if self.freq(k).abs() > cut {
                Complex::new(0.0, 0.0)
            } else {
                Complex::new(1.0, 0.0)
            }
        })
    }

    /// `L^2(-L, L)` norm by the periodic rectangle rule (spectrally accurate
    /// for smooth periodic fields).
    pub fn l2_norm(&self, values: &[f64]) -> f64 {
        let dx = self.dx();
        (values.iter().map(|v| v * v).sum::<f64>() * dx).sqrt()
    }

    /// `H^1` norm via the spectral derivative.
    pub fn h1_norm(&self, values: &[f64]) -> f64 {
        let du = self.derivative(values);
        let dx = self.dx();
        let sum: f64 = values
            .iter()
            .zip(&du)
            .map(|(u, ux)| u * u + ux * ux)
            .sum();
        (sum * dx).sqrt()
    }
}
