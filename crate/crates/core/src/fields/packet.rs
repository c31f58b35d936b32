use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;

use super::field::ComplexField1D;
use super::grid::Grid1D;
use super::spectral::{continuous_forward, FftPair};
use crate::error::{DclError, Result};

/// Unit-width profile shapes for wave packets. Both are real, even and have
/// unit continuum L² norm.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Envelope {
    /// `N exp(-1/(1-u²))` on `|u| < 1`, zero elsewhere.
    Bump,
    /// `pi^{-1/4} exp(-u²/2)`. Not compactly supported; support checks use `|u| < 6`.
    Gaussian,
}

const GAUSSIAN_TRUNCATION: f64 = 6.0;

impl Envelope {
    pub fn name(&self) -> &'static str {
        match self {
            Envelope::Bump => "bump",
            Envelope::Gaussian => "gaussian",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "bump" => Some(Envelope::Bump),
            "gaussian" | "gauss" => Some(Envelope::Gaussian),
            _ => None,
        }
    }

    pub fn profile(&self, u: f64) -> f64 {
        match self {
            Envelope::Bump => {
                if u.abs() < 1.0 {
                    bump_table().norm * (-1.0 / (1.0 - u * u)).exp()
                } else {
                    0.0
                }
            }
            Envelope::Gaussian => PI.powf(-0.25) * (-0.5 * u * u).exp(),
        }
    }

    /// Half-width of the (effective) support in units of the packet width.
    pub fn support_half_width(&self) -> f64 {
        match self {
            Envelope::Bump => 1.0,
            Envelope::Gaussian => GAUSSIAN_TRUNCATION,
        }
    }

    /// Unitary Fourier transform of the unit-width profile. Real and even.
    pub fn fourier_profile(&self, z: f64) -> f64 {
        match self {
            Envelope::Gaussian => PI.powf(-0.25) * (-0.5 * z * z).exp(),
            Envelope::Bump => bump_table().eval(z.abs()),
        }
    }

    /// `2 ∫_z^∞ |f~(s)|² ds` for `z >= 0`: the spectral mass outside `[-z, z]`.
    pub fn tail_mass(&self, z: f64) -> f64 {
        let z = z.abs();
        match self {
            Envelope::Bump => bump_table().tail(z),
            Envelope::Gaussian => {
                // Simpson over [z, z + 12]; the integrand is below e^{-144} beyond
                let n = 4000;
                let h = 12.0 / n as f64;
                let f = |s: f64| self.fourier_profile(s).powi(2);
                let mut acc = f(z) + f(z + 12.0);
                for i in 1..n {
                    let w = if i % 2 == 1 { 4.0 } else { 2.0 };
                    acc += w * f(z + i as f64 * h);
                }
                2.0 * acc * h / 3.0
            }
        }
    }

    /// Smallest `z` with `tail_mass(z) <= mass`.
    pub fn spectral_cutoff(&self, mass: f64) -> f64 {
        let (mut lo, mut hi) = (0.0, 1.0);
        while self.tail_mass(hi) > mass && hi < BUMP_Z_MAX {
            lo = hi;
            hi *= 2.0;
        }
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if self.tail_mass(mid) > mass {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        hi
    }

    /// `‖f~'‖`, the L² norm of the derivative of the transformed profile.
    ///
    /// Differentiating the transform multiplies the profile by `-iu`, so the
    /// norm is evaluated spectrally as `‖u f(u)‖`.
    pub fn fourier_derivative_norm(&self) -> f64 {
        match self {
            Envelope::Gaussian => 0.5f64.sqrt(),
            Envelope::Bump => bump_table().derivative_norm,
        }
    }
}

const BUMP_FFT_LOG2: u32 = 20;
const BUMP_FFT_EXTENT: f64 = 1024.0;
const BUMP_Z_MAX: f64 = 800.0;

struct BumpTable {
    norm: f64,
    dz: f64,
    spectrum: Vec<f64>,
    tail: Vec<f64>,
    derivative_norm: f64,
}

impl BumpTable {
    fn build() -> Self {
        let raw = |u: f64| if u.abs() < 1.0 { (-1.0 / (1.0 - u * u)).exp() } else { 0.0 };
        // the integrand is C-infinity with compact support, so the trapezoid sum
        // converges faster than any power of the spacing
        let hq = 1.0 / 16384.0;
        let mut s2 = 0.0;
        let mut u2s2 = 0.0;
        let mut u = -1.0;
        while u < 1.0 {
            let f = raw(u);
            s2 += f * f;
            u2s2 += u * u * f * f;
            u += hq;
        }
        let norm = 1.0 / (s2 * hq).sqrt();
        let derivative_norm = (u2s2 * hq).sqrt() * norm;

        let n = 1usize << BUMP_FFT_LOG2;
        let grid = Grid1D::symmetric(BUMP_FFT_EXTENT / 2.0, n).expect("static grid");
        let samples: Vec<Complex64> =
            grid.points().map(|u| Complex64::new(norm * raw(u), 0.0)).collect();
        let plan = FftPair::new(n);
        let spec = continuous_forward(&plan, &grid, &samples);
        let dz = grid.dk();
        let count = (BUMP_Z_MAX / dz).ceil() as usize + LAGRANGE_PAD;
        let spectrum: Vec<f64> = (0..count).map(|j| spec[n / 2 + j].re).collect();

        // tail[j] = 2 ∫_{z_j}^∞ |f~|², trapezoid from the far end
        let mut tail = vec![0.0; count];
        for j in (0..count - 1).rev() {
            let seg = 0.5 * dz * (spectrum[j].powi(2) + spectrum[j + 1].powi(2));
            tail[j] = tail[j + 1] + 2.0 * seg;
        }
        Self { norm, dz, spectrum, tail, derivative_norm }
    }

    fn eval(&self, z: f64) -> f64 {
        let t = z / self.dz;
        let i = t.floor() as isize;
        if i as usize + LAGRANGE_PAD >= self.spectrum.len() {
            return 0.0;
        }
        // six-point Lagrange on the even-extended table
        let base = i - 2;
        let local = t - base as f64;
        let mut acc = 0.0;
        for j in 0..6 {
            let idx = (base + j as isize).unsigned_abs();
            let mut w = 1.0;
            for m in 0..6 {
                if m != j {
                    w *= (local - m as f64) / (j as f64 - m as f64);
                }
            }
            acc += w * self.spectrum[idx];
        }
        acc
    }

    fn tail(&self, z: f64) -> f64 {
        let t = z / self.dz;
        let i = t.floor() as usize;
        if i + 1 >= self.tail.len() {
            return 0.0;
        }
        let frac = t - i as f64;
        self.tail[i] * (1.0 - frac) + self.tail[i + 1] * frac
    }
}

const LAGRANGE_PAD: usize = 8;

fn bump_table() -> &'static BumpTable {
    static TABLE: OnceLock<BumpTable> = OnceLock::new();
    TABLE.get_or_init(BumpTable::build)
}

/// A smooth packet `(1/sqrt(w)) f((x - c)/w) e^{i p x}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WavePacket {
    pub envelope: Envelope,
    pub width: f64,
    pub center: f64,
    pub momentum: f64,
}

impl WavePacket {
    pub fn new(envelope: Envelope, width: f64, center: f64, momentum: f64) -> Result<Self> {
        if !(width > 0.0 && width.is_finite()) {
            return Err(DclError::InvalidConfig(format!("packet width must be positive, got {width}")));
        }
        Ok(Self { envelope, width, center, momentum })
    }

    pub fn value(&self, x: f64) -> Complex64 {
        let a = self.envelope.profile((x - self.center) / self.width) / self.width.sqrt();
        Complex64::from_polar(a, self.momentum * x)
    }

    /// Continuum transform `sqrt(w) e^{-i (k - p) c} f~(w (k - p))`.
    pub fn fourier(&self, k: f64) -> Complex64 {
        let q = k - self.momentum;
        let a = self.width.sqrt() * self.envelope.fourier_profile(self.width * q);
        Complex64::from_polar(a, -q * self.center)
    }

    /// Closed (effective) support interval.
    pub fn support(&self) -> (f64, f64) {
        let s = self.envelope.support_half_width() * self.width;
        (self.center - s, self.center + s)
    }

    /// Samples the packet on `grid` and renormalizes the discrete L² norm to one.
    pub fn sample(&self, grid: &Grid1D) -> Result<ComplexField1D> {
        let (lo, hi) = self.support();
        let margin = 3.0 * grid.spacing();
        if lo < grid.x_min() + margin || hi > grid.x_max() - margin {
            let amplitude = [grid.x_min(), grid.x_min() + margin, grid.x_max() - margin]
                .iter()
                .map(|&x| self.value(x).norm())
                .fold(0.0, f64::max);
            return Err(DclError::SupportEscapesGrid { amplitude });
        }
        let values: Vec<Complex64> = grid.points().map(|x| self.value(x)).collect();
        let mut field = ComplexField1D::new(*grid, values)?;
        field.normalize();
        Ok(field)
    }
}
