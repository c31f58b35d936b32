//! Reduced density matrices of the heavy particle and the decoherence factor.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::asymptotics::g_reflected;
use crate::error::{DclError, Result};
use crate::fields::{ComplexField2D, ExperimentConfig, Grid1D};
use crate::scattering::{reflection, transmission};

/// Largest heavy grid for which explicit matrices are formed.
pub const MATRIX_CAP: usize = 4096;

/// `ρ(R, R')` sampled on a heavy grid. As an operator it acts by
/// `(ρ f)(R) = ∫ ρ(R, R') f(R') dR'`, so matrix quantities carry the spacing.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedDensityMatrix {
    pub grid: Grid1D,
    pub values: DMatrix<Complex64>,
}

impl ReducedDensityMatrix {
    pub fn new(grid: Grid1D, values: DMatrix<Complex64>) -> Result<Self> {
        let n = grid.len();
        if values.nrows() != n || values.ncols() != n {
            return Err(DclError::GridMismatch(format!(
                "{}x{} matrix on a grid of {n} points",
                values.nrows(),
                values.ncols()
            )));
        }
        Ok(Self { grid, values })
    }

    /// `f(R) conj(g(R'))`-type closed form assembled from weighted outer products.
    pub fn from_outer_products(grid: Grid1D, terms: &[(Complex64, &[Complex64], &[Complex64])]) -> Result<Self> {
        let n = grid.len();
        check_cap(n)?;
        let mut m = DMatrix::<Complex64>::zeros(n, n);
        for (w, f, g) in terms {
            for i in 0..n {
                let a = w * f[i];
                for j in 0..n {
                    m[(i, j)] += a * g[j].conj();
                }
            }
        }
        Self::new(grid, m)
    }

    pub fn trace(&self) -> Complex64 {
        self.values.diagonal().sum() * self.grid.spacing()
    }

    /// `max |ρ(R, R') - conj ρ(R', R)|`.
    pub fn hermiticity_defect(&self) -> f64 {
        let n = self.grid.len();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self.values[(i, j)] - self.values[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// Eigenvalues of the operator, ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.values, self.grid.spacing())
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues().first().copied().unwrap_or(0.0)
    }

    /// `Tr ρ²`.
    pub fn purity(&self) -> f64 {
        let h = self.grid.spacing();
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * h * h
    }

    /// `ρ(R, R)`.
    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.grid.len()).map(|i| self.values[(i, i)].re).collect()
    }

    /// Hilbert-Schmidt norms of the same-side and opposite-side blocks, split
    /// at `pivot`: `(diagonal, off_diagonal)`.
    pub fn block_norms(&self, pivot: f64) -> (f64, f64) {
        let h = self.grid.spacing();
        let side: Vec<bool> = self.grid.points().map(|x| x < pivot).collect();
        let (mut same, mut cross) = (0.0, 0.0);
        for i in 0..self.grid.len() {
            for j in 0..self.grid.len() {
                let v = self.values[(i, j)].norm_sqr();
                if side[i] == side[j] {
                    same += v;
                } else {
                    cross += v;
                }
            }
        }
        ((same * h * h).sqrt(), (cross * h * h).sqrt())
    }

    /// `‖ρ - σ‖₁`, the sum of absolute eigenvalues of the difference.
    pub fn trace_distance(&self, other: &Self) -> Result<f64> {
        if !self.grid.matches(&other.grid) {
            return Err(DclError::GridMismatch("density matrices on different grids".into()));
        }
        let diff = &self.values - &other.values;
        Ok(hermitian_eigenvalues(&diff, self.grid.spacing()).iter().map(|l| l.abs()).sum())
    }

    /// Largest entrywise deviation from another matrix.
    pub fn max_entry_distance(&self, other: &Self) -> f64 {
        self.values.iter().zip(other.values.iter()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }
}

fn hermitian_eigenvalues(m: &DMatrix<Complex64>, h: f64) -> Vec<f64> {
    // symmetrize against rounding before the Hermitian solver
    let sym = (m + m.adjoint()) * Complex64::new(0.5 * h, 0.0);
    let mut ev: Vec<f64> = sym.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(|a, b| a.total_cmp(b));
    ev
}

fn check_cap(n: usize) -> Result<()> {
    if n > MATRIX_CAP {
        return Err(DclError::MatrixTooLarge { n, cap: MATRIX_CAP });
    }
    Ok(())
}

/// `ρ(R, R') = ∫ ψ(r, R) conj ψ(r, R') dr` for a field over `(light, heavy)`.
///
/// The light integral is a single matrix product with a fixed summation order.
pub fn partial_trace_light(psi: &ComplexField2D) -> Result<ReducedDensityMatrix> {
    let (nl, nh) = (psi.grid_a().len(), psi.grid_b().len());
    check_cap(nh)?;
    let m = DMatrix::from_row_slice(nl, nh, psi.values());
    let rho = m.transpose() * m.conjugate() * Complex64::new(psi.grid_a().spacing(), 0.0);
    ReducedDensityMatrix::new(*psi.grid_b(), rho)
}

/// `ρ(R, R)` without forming the matrix.
pub fn heavy_density(psi: &ComplexField2D) -> Vec<f64> {
    let nh = psi.grid_b().len();
    let mut out = vec![0.0; nh];
    for row in psi.values().chunks_exact(nh) {
        for (o, v) in out.iter_mut().zip(row) {
            *o += v.norm_sqr();
        }
    }
    let h = psi.grid_a().spacing();
    out.iter_mut().for_each(|o| *o *= h);
    out
}

/// Momentum grid for the light-channel integrals below: it covers the light
/// packet and its mirror up to spectral mass `tail`, and resolves the phase
/// `e^{2idk}` and the packet phases with two samples per period.
pub fn light_quadrature_grid(cfg: &ExperimentConfig, tail: f64) -> Result<Grid1D> {
    let z = cfg.envelope.spectral_cutoff(tail);
    let reach = cfg.light_momentum + z / cfg.light_width;
    let s = cfg.envelope.support_half_width();
    let phase_extent = 2.0 * cfg.separation() + 2.0 * (cfg.light_center.abs() + s * cfg.light_width);
    let dk = std::f64::consts::PI / phase_extent;
    let n = ((2.0 * reach / dk).ceil() as usize).next_power_of_two().max(64);
    Grid1D::symmetric(reach, n)
}

const LIGHT_TAIL: f64 = 1e-15;

fn light_integral(cfg: &ExperimentConfig, f: impl Fn(f64) -> Complex64) -> Result<Complex64> {
    let grid = light_quadrature_grid(cfg, LIGHT_TAIL)?;
    let s: Complex64 = grid.points().map(f).sum();
    Ok(s * grid.spacing())
}

/// The decoherence factor: overlap of the light channels tagged by the two
/// heavy packets, `Λ = ∫ c_{-R0}(k) conj c_{R0}(k) dk` with
/// `c_x(k) = T(k) g~(k) + R(k) e^{-2ikx} g~(-k)`. It does not depend on time:
/// the far-field prefactors cancel in the product.
pub fn lambda_exact(cfg: &ExperimentConfig) -> Result<Complex64> {
    cfg.validate()?;
    let r0 = cfg.heavy_offset;
    light_integral(cfg, |k| {
        let c = |x: f64| {
            transmission(cfg.alpha, k) * cfg.light_fourier(k)
                + reflection(cfg.alpha, k) * Complex64::from_polar(1.0, -2.0 * k * x) * cfg.light_fourier(-k)
        };
        c(-r0) * c(r0).conj()
    })
}

/// `∫ |T(k)|² |g~(k)|² dk`.
pub fn transmission_probability(cfg: &ExperimentConfig) -> Result<f64> {
    cfg.validate()?;
    Ok(light_integral(cfg, |k| {
        Complex64::new(transmission(cfg.alpha, k).norm_sqr() * cfg.light_fourier(k).norm_sqr(), 0.0)
    })?
    .re)
}

/// `𝓘 = ∫ |R(k)|² |g~(-k)|² e^{2idk} dk` with `d = 2 R0`, and its bound
/// `1/(dα) + (δ/d) ‖g~'‖`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OverlapIntegral {
    pub value: Complex64,
    pub bound: f64,
}

pub fn overlap_integral(cfg: &ExperimentConfig) -> Result<OverlapIntegral> {
    cfg.validate()?;
    let d = cfg.separation();
    let value = light_integral(cfg, |k| {
        Complex64::from_polar(reflection(cfg.alpha, k).norm_sqr() * cfg.light_fourier(-k).norm_sqr(), 2.0 * d * k)
    })?;
    Ok(OverlapIntegral { value, bound: overlap_bound(cfg) })
}

/// `𝓘` as a position integral, `∫ g_R^{-R0}(t, r) conj g_R^{R0}(t, r) dr`
/// of the two reflected far-field waves at slow time `tau`, on `n` points.
pub fn overlap_integral_in_position(cfg: &ExperimentConfig, tau: f64, n: usize) -> Result<Complex64> {
    cfg.validate()?;
    let t = tau / cfg.epsilon;
    let reach = light_quadrature_grid(cfg, LIGHT_TAIL)?.x_max() * t;
    let grid = Grid1D::symmetric(reach, n)?;
    let a = g_reflected(cfg, tau, -cfg.heavy_offset, &grid)?;
    let b = g_reflected(cfg, tau, cfg.heavy_offset, &grid)?;
    b.inner(&a)
}

/// `1/(dα) + (δ/d) ‖g~'‖`; infinite for `α = 0`.
pub fn overlap_bound(cfg: &ExperimentConfig) -> f64 {
    let d = cfg.separation();
    1.0 / (d * cfg.alpha) + cfg.light_width / d * cfg.envelope.fourier_derivative_norm()
}

/// Everything the decoherence analysis reports for one configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct DecoherenceReport {
    pub lambda: Complex64,
    pub transmission_probability: f64,
    pub overlap: Complex64,
    pub bound: f64,
    pub tail: f64,
    pub norm_errors: BTreeMap<String, f64>,
}

/// Slack for quadrature rounding in the report checks.
pub const REPORT_SLACK: f64 = 1e-6;

impl DecoherenceReport {
    /// Failed inequalities, each described in one line. Empty when all hold.
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.lambda.norm() > 1.0 + REPORT_SLACK {
            out.push(format!("|lambda| = {} exceeds 1", self.lambda.norm()));
        }
        if self.overlap.norm() > self.bound + REPORT_SLACK {
            out.push(format!("|overlap| = {:e} exceeds its bound {:e}", self.overlap.norm(), self.bound));
        }
        let gap = (self.lambda - self.transmission_probability).norm();
        if gap > self.bound + self.tail + REPORT_SLACK {
            out.push(format!("|lambda - P| = {gap:e} exceeds bound + tail = {:e}", self.bound + self.tail));
        }
        let rest = (self.lambda - self.transmission_probability - self.overlap).norm();
        if rest > 10.0 * self.tail + f64::EPSILON {
            out.push(format!("|lambda - P - overlap| = {rest:e} exceeds 10 tail = {:e}", 10.0 * self.tail));
        }
        out
    }

    /// Flat `key = value` record.
    pub fn to_record(&self) -> String {
        let mut s = String::new();
        let mut put = |k: &str, v: String| {
            s.push_str(k);
            s.push_str(" = ");
            s.push_str(&v);
            s.push('\n');
        };
        put("lambda_re", format!("{:e}", self.lambda.re));
        put("lambda_im", format!("{:e}", self.lambda.im));
        put("lambda_abs", format!("{:e}", self.lambda.norm()));
        put("transmission_probability", format!("{:e}", self.transmission_probability));
        put("overlap_re", format!("{:e}", self.overlap.re));
        put("overlap_im", format!("{:e}", self.overlap.im));
        put("overlap_bound", format!("{:e}", self.bound));
        put("tail", format!("{:e}", self.tail));
        for (k, v) in &self.norm_errors {
            put(&format!("norm_error.{k}"), format!("{v:e}"));
        }
        s
    }
}

pub fn lambda_decomposition(cfg: &ExperimentConfig) -> Result<DecoherenceReport> {
    let lambda = lambda_exact(cfg)?;
    let p = transmission_probability(cfg)?;
    let ov = overlap_integral(cfg)?;
    Ok(DecoherenceReport {
        lambda,
        transmission_probability: p,
        overlap: ov.value,
        bound: ov.bound,
        tail: cfg.light_tail(),
        norm_errors: BTreeMap::new(),
    })
}

/// The four-term heavy density of the entangled state,
/// `½[F⁺F⁺* + F⁻F⁻* + Λ F⁺F⁻* + conj(Λ) F⁻F⁺*]`, from the free packets
/// sampled on `grid`.
pub fn entangled_density(
    grid: Grid1D,
    f_plus: &[Complex64],
    f_minus: &[Complex64],
    lambda: Complex64,
) -> Result<ReducedDensityMatrix> {
    let half = Complex64::new(0.5, 0.0);
    ReducedDensityMatrix::from_outer_products(
        grid,
        &[(half, f_plus, f_plus), (half, f_minus, f_minus), (half * lambda, f_plus, f_minus), (half * lambda.conj(), f_minus, f_plus)],
    )
}

/// Heavy density `ρ(R, R)` of the four-term form, without the matrix.
pub fn entangled_diagonal(f_plus: &[Complex64], f_minus: &[Complex64], lambda: Complex64) -> Vec<f64> {
    f_plus
        .iter()
        .zip(f_minus)
        .map(|(p, m)| 0.5 * (p.norm_sqr() + m.norm_sqr()) + (lambda * p * m.conj()).re)
        .collect()
}

/// Fringe visibility `(max - min)/(max + min)` of a heavy density over the
/// one fringe period centred on the meeting point of the packets at `tau_meet`.
pub fn interference_visibility(density: &[f64], grid: &Grid1D, cfg: &ExperimentConfig, tau_meet: f64) -> Result<f64> {
    let left = -cfg.heavy_offset + cfg.heavy_momentum * tau_meet;
    let right = cfg.heavy_offset - cfg.heavy_momentum * tau_meet;
    let spread = (cfg.heavy_width.powi(2) + (tau_meet / cfg.heavy_width).powi(2)).sqrt();
    let separation = (right - left).abs();
    if separation > 5.0 * spread {
        return Err(DclError::NoOverlap { separation, limit: 5.0 * spread });
    }
    let centre = 0.5 * (left + right);
    let period = std::f64::consts::PI / cfg.heavy_momentum;
    let (mut hi, mut lo) = (f64::NEG_INFINITY, f64::INFINITY);
    for (x, d) in grid.points().zip(density) {
        if (x - centre).abs() <= 0.5 * period {
            hi = hi.max(*d);
            lo = lo.min(*d);
        }
    }
    if !hi.is_finite() || hi + lo <= 0.0 {
        return Err(DclError::InvalidGrid("no resolved density inside the fringe window".into()));
    }
    Ok(((hi - lo) / (hi + lo)).clamp(0.0, 1.0))
}

/// Decoherence factor read off any heavy density matrix by projecting on the
/// freely evolved packets: `<F⁺|ρ|F⁻> / sqrt(<F⁺|ρ|F⁺><F⁻|ρ|F⁻>)`.
pub fn lambda_estimate(rho: &ReducedDensityMatrix, f_plus: &[Complex64], f_minus: &[Complex64]) -> Complex64 {
    let h = rho.grid.spacing();
    let n = rho.grid.len();
    let form = |a: &[Complex64], b: &[Complex64]| -> Complex64 {
        let mut s = Complex64::new(0.0, 0.0);
        for i in 0..n {
            let mut row = Complex64::new(0.0, 0.0);
            for j in 0..n {
                row += rho.values[(i, j)] * b[j];
            }
            s += a[i].conj() * row;
        }
        s * h * h
    };
    let pm = form(f_plus, f_minus);
    let pp = form(f_plus, f_plus).re;
    let mm = form(f_minus, f_minus).re;
    pm / (pp * mm).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_state_is_pure() {
        let a = Grid1D::symmetric(6.0, 32).unwrap();
        let b = Grid1D::symmetric(5.0, 16).unwrap();
        let mut psi = ComplexField2D::from_fn(a, b, |r, x| {
            Complex64::new((-r * r).exp(), 0.0) * Complex64::from_polar((-x * x / 2.0).exp(), x)
        });
        psi.normalize();
        let rho = partial_trace_light(&psi).unwrap();
        assert!((rho.trace().re - 1.0).abs() < 1e-12);
        assert!((rho.purity() - 1.0).abs() < 1e-12);
        assert!(rho.hermiticity_defect() < 1e-14);
        assert!(rho.min_eigenvalue() > -1e-12);
    }

    #[test]
    fn free_light_particle_gives_lambda_one() {
        let mut cfg = ExperimentConfig::separated_regime();
        cfg.alpha = 0.0;
        let l = lambda_exact(&cfg).unwrap();
        assert!((l - Complex64::new(1.0, 0.0)).norm() < 1e-10, "{l}");
        assert!((transmission_probability(&cfg).unwrap() - 1.0).abs() < 1e-10);
    }
}
