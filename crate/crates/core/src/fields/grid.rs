use std::f64::consts::PI;

use crate::error::{DclError, Result};

/// Uniform periodic sampling of an interval `[x_min, x_max)` with `n` points.
///
/// Point `i` sits at `x_min + i * h` with `h = (x_max - x_min) / n`; the right
/// end is excluded. `n` is a power of two so every grid admits radix-2 transforms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid1D {
    x_min: f64,
    x_max: f64,
    n: usize,
}

impl Grid1D {
    pub fn new(x_min: f64, x_max: f64, n: usize) -> Result<Self> {
        if n < 2 || !n.is_power_of_two() {
            return Err(DclError::InvalidGrid(format!(
                "point count {n} must be a power of two and at least 2"
            )));
        }
        if !(x_min.is_finite() && x_max.is_finite()) || x_max <= x_min {
            return Err(DclError::InvalidGrid(format!(
                "bounds [{x_min}, {x_max}) do not form a positive interval"
            )));
        }
        Ok(Self { x_min, x_max, n })
    }

    /// Grid on `[-half_width, half_width)`; the origin is the point with index `n / 2`.
    pub fn symmetric(half_width: f64, n: usize) -> Result<Self> {
        Self::new(-half_width, half_width, n)
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn extent(&self) -> f64 {
        self.x_max - self.x_min
    }

    pub fn spacing(&self) -> f64 {
        self.extent() / self.n as f64
    }

    pub fn point(&self, i: usize) -> f64 {
        self.x_min + i as f64 * self.spacing()
    }

    pub fn points(&self) -> impl ExactSizeIterator<Item = f64> + '_ {
        let h = self.spacing();
        (0..self.n).map(move |i| self.x_min + i as f64 * h)
    }

    /// Spacing of the dual momentum grid, `2 pi / extent`.
    pub fn dk(&self) -> f64 {
        2.0 * PI / self.extent()
    }

    /// The dual momentum grid `k_j = (j - n/2) dk`, `j` in `[0, n)`.
    pub fn dual(&self) -> Grid1D {
        let half = (self.n / 2) as f64 * self.dk();
        Grid1D { x_min: -half, x_max: half, n: self.n }
    }

    /// Wavenumbers in FFT storage order (non-negative first, then negative).
    pub fn fft_wavenumbers(&self) -> Vec<f64> {
        let dk = self.dk();
        let n = self.n as isize;
        (0..n)
            .map(|j| if j < n / 2 { j as f64 * dk } else { (j - n) as f64 * dk })
            .collect()
    }

    /// Largest wavenumber representable without aliasing.
    pub fn nyquist(&self) -> f64 {
        PI / self.spacing()
    }

    pub fn is_symmetric(&self) -> bool {
        (self.x_min + self.x_max).abs() <= 1e-12 * self.extent()
    }

    /// Index of the grid point closest to `x`, if `x` is inside the grid.
    pub fn nearest_index(&self, x: f64) -> Option<usize> {
        let t = ((x - self.x_min) / self.spacing()).round();
        (t >= 0.0 && (t as usize) < self.n).then_some(t as usize)
    }

    /// Index of the mirror point `-x_i` on a symmetric grid. The first point
    /// (`-L/2`) is its own mirror under periodic identification.
    pub fn mirror_index(&self, i: usize) -> usize {
        (self.n - i) % self.n
    }

    pub fn matches(&self, other: &Grid1D) -> bool {
        let tol = 1e-12 * self.extent().max(other.extent());
        self.n == other.n
            && (self.x_min - other.x_min).abs() <= tol
            && (self.x_max - other.x_max).abs() <= tol
    }

    /// Smallest power-of-two grid on `[-half_width, half_width)` whose Nyquist
    /// wavenumber reaches `k_max`.
    pub fn sized_symmetric(half_width: f64, k_max: f64, max_points: usize) -> Result<Self> {
        let needed = (2.0 * half_width * k_max / PI).ceil().max(2.0) as usize;
        let n = needed.next_power_of_two();
        if n > max_points {
            return Err(DclError::InvalidGrid(format!(
                "resolving |k| <= {k_max:.3} on [-{half_width:.3}, {half_width:.3}) needs {n} points, cap is {max_points}"
            )));
        }
        Self::symmetric(half_width, n)
    }
}
