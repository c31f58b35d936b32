//! FFT plumbing shared by every solver: a planned transform pair, the unitary
//! continuous-transform convention and band-limited interpolation.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::grid::Grid1D;

const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

/// Forward/inverse FFT pair for one transform length.
#[derive(Clone)]
pub struct FftPair {
    n: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for FftPair {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FftPair").field("n", &self.n).finish()
    }
}

impl FftPair {
    pub fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self { n, forward: planner.plan_fft_forward(n), inverse: planner.plan_fft_inverse(n) }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Unnormalized forward DFT, `sum_m a_m e^{-2 pi i j m / n}`.
    pub fn forward(&self, buf: &mut [Complex64]) {
        self.forward.process(buf);
    }

    /// Inverse DFT including the `1/n` factor.
    pub fn inverse(&self, buf: &mut [Complex64]) {
        self.inverse.process(buf);
        let s = 1.0 / self.n as f64;
        buf.iter_mut().for_each(|v| *v *= s);
    }

    /// Multiply the spectrum of `buf` by `symbol[j]` (FFT storage order) in place.
    pub fn apply_symbol(&self, buf: &mut [Complex64], symbol: &[Complex64]) {
        self.forward(buf);
        buf.iter_mut().zip(symbol).for_each(|(v, s)| *v *= s);
        self.inverse(buf);
    }
}

/// Continuous unitary transform `g~(k) = (2 pi)^{-1/2} int e^{-iky} g(y) dy` of
/// samples on `grid`, returned on `grid.dual()` in ascending-k order.
pub fn continuous_forward(plan: &FftPair, grid: &Grid1D, values: &[Complex64]) -> Vec<Complex64> {
    let n = grid.len();
    let h = grid.spacing();
    let mut buf: Vec<Complex64> = values
        .iter()
        .enumerate()
        .map(|(m, v)| if m % 2 == 0 { *v } else { -*v })
        .collect();
    plan.forward(&mut buf);
    let dual = grid.dual();
    let x0 = grid.x_min();
    for (j, v) in buf.iter_mut().enumerate() {
        let k = dual.point(j);
        *v *= Complex64::from_polar(h * INV_SQRT_2PI, -k * x0);
    }
    debug_assert_eq!(buf.len(), n);
    buf
}

/// Inverse of [`continuous_forward`]: momentum samples on `grid.dual()` back to `grid`.
pub fn continuous_inverse(plan: &FftPair, grid: &Grid1D, spectrum: &[Complex64]) -> Vec<Complex64> {
    let n = grid.len();
    let dual = grid.dual();
    let x0 = grid.x_min();
    let mut buf: Vec<Complex64> = spectrum
        .iter()
        .enumerate()
        .map(|(j, v)| v * Complex64::from_polar(1.0, dual.point(j) * x0))
        .collect();
    // unnormalized inverse: process then undo the 1/n applied by `inverse`
    plan.inverse(&mut buf);
    let scale = dual.spacing() * INV_SQRT_2PI * n as f64;
    for (m, v) in buf.iter_mut().enumerate() {
        *v *= if m % 2 == 0 { scale } else { -scale };
    }
    buf
}

/// Free-flow symbol `exp(-i k^2 t / (2 mass))` in FFT storage order.
pub fn free_symbol(grid: &Grid1D, t: f64, mass: f64) -> Vec<Complex64> {
    grid.fft_wavenumbers()
        .into_iter()
        .map(|k| Complex64::from_polar(1.0, -k * k * t / (2.0 * mass)))
        .collect()
}

/// Spectral derivative symbol `i k` in FFT storage order.
pub fn derivative_symbol(grid: &Grid1D) -> Vec<Complex64> {
    grid.fft_wavenumbers().into_iter().map(|k| Complex64::new(0.0, k)).collect()
}

const LAGRANGE_POINTS: usize = 10;

/// Evaluates a band-limited periodic sample set between grid points.
///
/// The samples are first oversampled by zero-padding the spectrum, then a
/// ten-point Lagrange stencil is applied on the fine grid. Points outside the
/// grid evaluate to zero.
#[derive(Debug, Clone)]
pub struct BandLimitedInterpolant {
    x_min: f64,
    h: f64,
    values: Vec<Complex64>,
}

impl BandLimitedInterpolant {
    pub fn new(grid: &Grid1D, samples: &[Complex64], oversample: usize) -> Self {
        let n = grid.len();
        let m = oversample.max(1).next_power_of_two();
        let fine_n = n * m;
        let coarse = FftPair::new(n);
        let mut spec = samples.to_vec();
        coarse.forward(&mut spec);
        let mut padded = vec![Complex64::new(0.0, 0.0); fine_n];
        let half = n / 2;
        padded[..half].copy_from_slice(&spec[..half]);
        padded[fine_n - half + 1..].copy_from_slice(&spec[half + 1..]);
        // split the Nyquist bin symmetrically
        padded[half] = spec[half] * 0.5;
        padded[fine_n - half] = spec[half] * 0.5;
        let fine = FftPair::new(fine_n);
        fine.inverse(&mut padded);
        padded.iter_mut().for_each(|v| *v *= m as f64);
        Self { x_min: grid.x_min(), h: grid.spacing() / m as f64, values: padded }
    }

    pub fn eval(&self, x: f64) -> Complex64 {
        let n = self.values.len();
        let t = (x - self.x_min) / self.h;
        let base = t.floor() as isize - (LAGRANGE_POINTS as isize / 2 - 1);
        if base < 0 || base as usize + LAGRANGE_POINTS > n {
            return Complex64::new(0.0, 0.0);
        }
        let local = t - base as f64;
        let mut num = Complex64::new(0.0, 0.0);
        let mut den = 0.0;
        for j in 0..LAGRANGE_POINTS {
            let d = local - j as f64;
            let f = self.values[base as usize + j];
            if d.abs() < 1e-14 {
                return f;
            }
            let w = BARY_WEIGHTS[j] / d;
            num += f * w;
            den += w;
        }
        num / den
    }
}

// (-1)^j C(9, j)
const BARY_WEIGHTS: [f64; LAGRANGE_POINTS] =
    [1.0, -9.0, 36.0, -84.0, 126.0, -126.0, 84.0, -36.0, 9.0, -1.0];

/// `sqrt(i z)` on the principal branch for `z > 0`: `e^{i pi/4} sqrt(z)`.
pub fn sqrt_i(z: f64) -> Complex64 {
    Complex64::from_polar(z.sqrt(), PI / 4.0)
}

/// `int_{y<0} |a|² dy + int_{y>0} |b|² dy` for the trigonometric interpolants
/// of two sample sets on a grid symmetric about `y = 0`.
///
/// `|interpolant|²` is band-limited to twice the grid band, so its samples on
/// the doubled grid determine it exactly; the half-line integral then follows
/// from the Fourier series of `sign(y)` on the period. No quadrature error
/// beyond rounding.
#[derive(Debug, Clone)]
pub struct HalfLineQuadrature {
    n: usize,
    extent: f64,
    coarse: FftPair,
    fine: FftPair,
    sign_weights: Vec<Complex64>,
}

impl HalfLineQuadrature {
    pub fn new(grid: &Grid1D) -> Self {
        let n = grid.len();
        let fine_n = 2 * n;
        let extent = grid.extent();
        // int_{-L/2}^{L/2} sign(y) e^{i k_m y} dy = 2i (1 - (-1)^m) / k_m
        let sign_weights = (0..fine_n)
            .map(|j| {
                let m = if j < n { j as i64 } else { j as i64 - fine_n as i64 };
                if m % 2 == 0 {
                    Complex64::new(0.0, 0.0)
                } else {
                    let k = 2.0 * PI * m as f64 / extent;
                    Complex64::new(0.0, 4.0 / k)
                }
            })
            .collect();
        Self { n, extent, coarse: FftPair::new(n), fine: FftPair::new(fine_n), sign_weights }
    }

    /// Fourier coefficients (per unit period) of `|interpolant(values)|²` on the
    /// doubled grid, in FFT order, for samples starting at `-L/2`.
    fn density_coefficients(&self, values: &[Complex64]) -> Vec<Complex64> {
        let n = self.n;
        let fine_n = 2 * n;
        let mut spec = values.to_vec();
        self.coarse.forward(&mut spec);
        let mut padded = vec![Complex64::new(0.0, 0.0); fine_n];
        let half = n / 2;
        padded[..half].copy_from_slice(&spec[..half]);
        padded[fine_n - half + 1..].copy_from_slice(&spec[half + 1..]);
        padded[half] = spec[half] * 0.5;
        padded[fine_n - half] = spec[half] * 0.5;
        self.fine.inverse(&mut padded);
        let mut dens: Vec<Complex64> = padded.iter().map(|v| Complex64::new(4.0 * v.norm_sqr(), 0.0)).collect();
        self.fine.forward(&mut dens);
        // samples start at -L/2, so coefficient m picks up (-1)^m
        let s = 1.0 / fine_n as f64;
        for (j, v) in dens.iter_mut().enumerate() {
            *v *= if j % 2 == 0 { s } else { -s };
        }
        dens
    }

    /// `(int |I|², int sign(y) |I|²)` over one period.
    pub fn moments(&self, values: &[Complex64]) -> (f64, f64) {
        let c = self.density_coefficients(values);
        let total = c[0].re * self.extent;
        let signed: Complex64 = c.iter().zip(&self.sign_weights).map(|(a, w)| a * w).sum();
        (total, signed.re)
    }

    pub fn split_norm_sqr(&self, left: &[Complex64], right: &[Complex64]) -> f64 {
        let (tl, sl) = self.moments(left);
        let (tr, sr) = self.moments(right);
        0.5 * (tl - sl) + 0.5 * (tr + sr)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn forward_inverse_roundtrip() {
        let g = Grid1D::new(-3.0, 5.0, 64).unwrap();
        let plan = FftPair::new(64);
        let v: Vec<Complex64> =
            g.points().map(|x| Complex64::new((-(x - 1.0).powi(2)).exp(), x.sin())).collect();
        let s = continuous_forward(&plan, &g, &v);
        let back = continuous_inverse(&plan, &g, &s);
        for (a, b) in v.iter().zip(&back) {
            assert!((a - b).norm() < 1e-13);
        }
    }

    #[test]
    fn half_line_integrals_are_exact_for_trig_polynomials() {
        let g = Grid1D::symmetric(4.0, 32).unwrap();
        let f = |y: f64| Complex64::new((PI * y / 4.0).sin(), 0.0) + Complex64::from_polar(0.5, 2.0 * PI * y / 4.0);
        let v: Vec<Complex64> = g.points().map(f).collect();
        let q = HalfLineQuadrature::new(&g);
        // reference by dense midpoint rule on the smooth periodic integrand
        let m = 200_000;
        let h = 4.0 / m as f64;
        let pos: f64 = (0..m).map(|i| f((i as f64 + 0.5) * h).norm_sqr()).sum::<f64>() * h;
        let neg: f64 = (0..m).map(|i| f(-(i as f64 + 0.5) * h).norm_sqr()).sum::<f64>() * h;
        let zero = vec![Complex64::new(0.0, 0.0); 32];
        assert!((q.split_norm_sqr(&zero, &v) - pos).abs() < 1e-9);
        assert!((q.split_norm_sqr(&v, &zero) - neg).abs() < 1e-9);
        assert!((pos - neg).abs() > 0.1);
    }

    #[test]
    fn interpolant_reproduces_band_limited_signal() {
        let g = Grid1D::symmetric(10.0, 128).unwrap();
        let f = |x: f64| Complex64::new((-x * x / 2.0).exp(), 0.0) * Complex64::from_polar(1.0, 3.0 * x);
        let samples: Vec<Complex64> = g.points().map(f).collect();
        let it = BandLimitedInterpolant::new(&g, &samples, 8);
        for &x in &[-2.345, -0.0101, 0.5, 1.777, 3.0712] {
            assert!((it.eval(x) - f(x)).norm() < 1e-9, "x = {x}");
        }
        assert_eq!(it.eval(50.0), Complex64::new(0.0, 0.0));
    }
}
