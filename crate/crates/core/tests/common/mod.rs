//! Independent reference computations and fixtures shared by the integration
//! tests.
//!
//! The oracles never go through the FFT paths of the library: integrals are
//! done by composite Gauss-Legendre quadrature on analytic integrands.
#![allow(dead_code)]

use std::f64::consts::PI;

use dcl::asymptotics::{PointwiseAsymptotics, Provenance};
use dcl::exact::{compare_in_cm_frame, evolve_exact, ExactFrame, ExactGrids};
use dcl::fields::{Envelope, ExperimentConfig, Grid1D};
use dcl::scattering::reflection;
use num_complex::Complex64;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Nodes and weights of the `n`-point Gauss-Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for j in 2..=n {
                let p2 = ((2 * j - 1) as f64 * z * p1 - (j - 1) as f64 * p0) / j as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
    (x, w)
}

/// Composite rule: `panels` equal panels of an `order`-point rule on `[a, b]`.
pub struct Composite {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Composite {
    pub fn new(a: f64, b: f64, panels: usize, order: usize) -> Self {
        let (x, w) = gauss_legendre(order);
        let h = (b - a) / panels as f64;
        let mut nodes = Vec::with_capacity(panels * order);
        let mut weights = Vec::with_capacity(panels * order);
        for p in 0..panels {
            let mid = a + (p as f64 + 0.5) * h;
            for (xi, wi) in x.iter().zip(&w) {
                nodes.push(mid + 0.5 * h * xi);
                weights.push(0.5 * h * wi);
            }
        }
        Self { nodes, weights }
    }

    pub fn integrate(&self, f: impl Fn(f64) -> Complex64) -> Complex64 {
        self.nodes.iter().zip(&self.weights).map(|(x, w)| f(*x) * w).sum()
    }

    /// Concatenation of rules on adjacent intervals.
    pub fn join(mut self, other: Composite) -> Self {
        self.nodes.extend(other.nodes);
        self.weights.extend(other.weights);
        self
    }
}

/// Free kernel of `-Δ/2` at time `t`.
pub fn free_kernel(z: f64, t: f64) -> Complex64 {
    Complex64::from_polar(1.0, z * z / (2.0 * t) - PI / 4.0) / (2.0 * PI * t).sqrt()
}

/// `α ∫_0^∞ e^{-αu} K0(a + u, t) du` on the contour `u = e^{iπ/4} s`, where
/// every factor decays.
pub fn schulman_tail(a: f64, t: f64, alpha: f64, rule: &Composite) -> Complex64 {
    let w = Complex64::from_polar(1.0, PI / 4.0);
    let pre = Complex64::from_polar(1.0, -PI / 4.0) / (2.0 * PI * t).sqrt();
    alpha
        * w
        * rule.integrate(|s| {
            let u = w * s;
            let z = a + u;
            (-alpha * u + c(0.0, 1.0) * z * z / (2.0 * t)).exp() * pre
        })
}

/// Exact evolution under `-Δ/2 + α δ(y)` by the Schulman kernel
/// `K0(y - y') - α ∫ e^{-αu} K0(|y| + |y'| + u) du`, for an initial state
/// given analytically on `[lo, hi]`.
pub fn schulman_propagate(
    psi0: impl Fn(f64) -> Complex64,
    lo: f64,
    hi: f64,
    alpha: f64,
    t: f64,
    at: &[f64],
) -> Vec<Complex64> {
    let space = if lo < 0.0 && hi > 0.0 {
        Composite::new(lo, 0.0, 400, 10).join(Composite::new(0.0, hi, 400, 10))
    } else {
        Composite::new(lo, hi, 800, 10)
    };
    let reach = 14.0 * t.sqrt();
    let contour = Composite::new(0.0, reach, 40, 12);
    let samples: Vec<Complex64> = space.nodes.iter().map(|&y| psi0(y)).collect();
    at.iter()
        .map(|&y| {
            let mut s = c(0.0, 0.0);
            for ((&yp, &wp), &v) in space.nodes.iter().zip(&space.weights).zip(&samples) {
                let k = free_kernel(y - yp, t) - schulman_tail(y.abs() + yp.abs(), t, alpha, &contour);
                s += k * v * wp;
            }
            s
        })
        .collect()
}

/// `(2π)^{-1/2} ∫ conj(φ_k(y)) χ(y) dy` with the incoming eigenfunctions of a
/// delta of strength `alpha` at `x`:
/// `φ_k(y) = e^{iky} + conj(R(k)) e^{ikx} e^{-i|k||y-x|}`.
pub fn inverse_wave_quadrature(chi: impl Fn(f64) -> Complex64, lo: f64, hi: f64, x: f64, alpha: f64, k: f64) -> Complex64 {
    let rule = Composite::new(lo, hi, 400, 10);
    let r = reflection(alpha, k).conj();
    rule.integrate(|y| {
        let phi = Complex64::from_polar(1.0, k * y) + r * Complex64::from_polar(1.0, k * x - k.abs() * (y - x).abs());
        phi.conj() * chi(y)
    }) / (2.0 * PI).sqrt()
}

/// Far-field amplitude of ψ^a at `(k, R)` by direct quadrature
/// of the free heavy kernel against `φ(x) (A(k) + B(k) e^{-2ikx})`.
pub fn psi_a_quadrature(cfg: &ExperimentConfig, k: f64, r_heavy: f64) -> Complex64 {
    use dcl::asymptotics::{channel_a, channel_b};
    let s = cfg.envelope.support_half_width() * cfg.heavy_width;
    let a = channel_a(cfg, k);
    let b = channel_b(cfg, k);
    let rule = Composite::new(-cfg.heavy_offset - s, -cfg.heavy_offset + s, 300, 10)
        .join(Composite::new(cfg.heavy_offset - s, cfg.heavy_offset + s, 300, 10));
    rule.integrate(|x| {
        free_kernel(r_heavy - x, cfg.tau)
            * cfg.heavy_value(x)
            * (a + b * Complex64::from_polar(1.0, -2.0 * k * x))
    })
}

/// Normalized Gaussian packet.
pub fn gaussian(width: f64, centre: f64, momentum: f64) -> impl Fn(f64) -> Complex64 {
    let n = (PI * width * width).powf(-0.25);
    move |y: f64| {
        let u = (y - centre) / width;
        Complex64::from_polar(n * (-0.5 * u * u).exp(), momentum * y)
    }
}

/// Moderate configuration on which every asymptotic field fits small grids.
pub fn small_cfg() -> ExperimentConfig {
    ExperimentConfig {
        epsilon: 0.01,
        alpha: 1.5,
        heavy_width: 0.5,
        heavy_offset: 1.5,
        heavy_momentum: 1.0,
        light_width: 1.0,
        light_center: -3.5,
        light_momentum: 5.0,
        tau: 0.3,
        envelope: Envelope::Bump,
    }
}

/// Heavy packets of width one meeting at the origin at `tau = 1`; the light
/// packet is sharp (`δ q0 = 20`).
pub fn meeting_cfg(alpha: f64) -> ExperimentConfig {
    ExperimentConfig {
        epsilon: 0.01,
        alpha,
        heavy_width: 1.0,
        heavy_offset: 5.0,
        heavy_momentum: 5.0,
        light_width: 1.0,
        light_center: -7.5,
        light_momentum: 20.0,
        tau: 1.0,
        envelope: Envelope::Bump,
    }
}

/// Family for the decay of `ψ^a - ψ^e`: `α = 1`, `δ = 10`, heavy packets
/// three widths from the origin.
pub fn entangled_family(sigma: f64, q0: f64) -> ExperimentConfig {
    let delta = 10.0;
    let r0 = 3.0 * sigma;
    ExperimentConfig {
        epsilon: 0.01,
        alpha: 1.0,
        heavy_width: sigma,
        heavy_offset: r0,
        heavy_momentum: 1.0,
        light_width: delta,
        light_center: -r0 - sigma - delta - 0.01,
        light_momentum: q0,
        tau: 1.0,
        envelope: Envelope::Bump,
    }
}

/// Wide packets and a moderate mass ratio: every exact field fits 1024².
pub fn wide_cfg(alpha: f64) -> ExperimentConfig {
    ExperimentConfig {
        epsilon: 0.5,
        alpha,
        heavy_width: 4.0,
        heavy_offset: 9.0,
        heavy_momentum: 1.0,
        light_width: 4.0,
        light_center: -17.5,
        light_momentum: 2.0,
        tau: 1.0,
        envelope: Envelope::Bump,
    }
}

pub fn wide_grids() -> ExactGrids {
    ExactGrids::new(Grid1D::symmetric(48.0, 1024).unwrap(), Grid1D::symmetric(72.0, 1024).unwrap()).unwrap()
}

/// `‖ψ - ψ^a‖` of the lens-frame exact state in the default regime.
pub fn lens_error(epsilon: f64, alpha: f64, tau: f64) -> f64 {
    let mut cfg = ExperimentConfig::default_regime();
    cfg.epsilon = epsilon;
    cfg.alpha = alpha;
    cfg.tau = tau;
    let grids = ExactGrids::far_field_default();
    let s = evolve_exact(&cfg, &grids, tau, ExactFrame::Lens).unwrap();
    assert!((s.norm() - 1.0).abs() < 1e-5);
    let table = PointwiseAsymptotics::auto_table(&cfg, 1e-12, 1 << 15).unwrap();
    let asym = PointwiseAsymptotics::new(&cfg, &table).unwrap();
    compare_in_cm_frame(&s, &asym, Provenance::Recoiled).unwrap()
}
