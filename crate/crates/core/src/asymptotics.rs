//! Asymptotic two-body states for small mass ratio.
//!
//! Both asymptotic states have the form
//! `ψ(r, R) = (i t)^{-1/2} e^{i r² / 2t} D(r/t, R)` with `t = tau/epsilon`:
//! the light particle has reached its far field, where position and velocity
//! `k = r/t` coincide. The common prefactor is a pure phase times `t^{-1/2}`,
//! so states are stored as the amplitude `D` on a `(k, R)` grid, which carries
//! the same L² norm as `ψ` on `(r, R)`.
//!
//! `D` is assembled channel by channel: the light packet is mapped to its
//! incoming asymptote by the inverse wave operator of the delta sitting at the
//! heavy position `x`. For a light packet left of every heavy packet that is
//! `A(k) + B(k) e^{-2ikx}` with
//! `A = T g~ θ₊ + g~ θ₋` and `B = R g~(-k) θ₋`. The phase `e^{-2ikx}` is a
//! momentum kick on the heavy particle, so the `x` integral against the free
//! heavy flow becomes one modulated free propagation per `k`.

use num_complex::Complex64;
use std::f64::consts::FRAC_1_SQRT_2;

use crate::error::{DclError, Result};
use crate::fields::{
    free_symbol, sqrt_i, AsymptoticGrids, BandLimitedInterpolant, ComplexField1D, ComplexField2D,
    ExperimentConfig, FftPair, Grid1D,
};
use crate::scattering::{reflection, transmission, BOUNDARY_THRESHOLD, EDGE_FRACTION};

/// `e^{-i tau H0} phi` with `H0 = -Δ/2`.
pub fn free_propagate(phi: &ComplexField1D, tau: f64) -> Result<ComplexField1D> {
    if !(tau >= 0.0) {
        return Err(DclError::InvalidConfig(format!("tau must be non-negative, got {tau}")));
    }
    let grid = *phi.grid();
    let mut v = phi.values().to_vec();
    FftPair::new(grid.len()).apply_symbol(&mut v, &free_symbol(&grid, tau, 1.0));
    let out = ComplexField1D::new(grid, v)?;
    let mass = out.boundary_mass(EDGE_FRACTION);
    if mass > BOUNDARY_THRESHOLD {
        return Err(DclError::GridEscape { mass, threshold: BOUNDARY_THRESHOLD });
    }
    Ok(out)
}

/// Heavy-position independent part of the light channel, `A(k)`. The origin
/// counts as negative momentum.
pub fn channel_a(cfg: &ExperimentConfig, k: f64) -> Complex64 {
    let g = cfg.light_fourier(k);
    if k > 0.0 {
        transmission(cfg.alpha, k) * g
    } else {
        g
    }
}

/// Coefficient of `e^{-2ikx}` in the light channel, `B(k)`.
pub fn channel_b(cfg: &ExperimentConfig, k: f64) -> Complex64 {
    if k > 0.0 {
        Complex64::new(0.0, 0.0)
    } else {
        reflection(cfg.alpha, k) * cfg.light_fourier(-k)
    }
}

/// Entangled light channel for a heavy packet centred at `x0`:
/// `T(k) g~(k) + R(k) e^{-2ikx0} g~(-k)` for every `k`.
pub fn entangled_channel(cfg: &ExperimentConfig, k: f64, x0: f64) -> Complex64 {
    transmission(cfg.alpha, k) * cfg.light_fourier(k)
        + reflection(cfg.alpha, k) * Complex64::from_polar(1.0, -2.0 * k * x0) * cfg.light_fourier(-k)
}

/// `(i t)^{-1/2} e^{i r²/2t}` with `t = tau/epsilon`.
pub fn far_field_prefactor(cfg: &ExperimentConfig, tau: f64, r: f64) -> Complex64 {
    let t = tau / cfg.epsilon;
    Complex64::from_polar(1.0, r * r / (2.0 * t)) / sqrt_i(t)
}

/// Transmitted light wave `T(|r|/t) (i t)^{-1/2} e^{i r²/2t} g~(r/t)` on `grid_r`.
pub fn g_transmitted(cfg: &ExperimentConfig, tau: f64, grid_r: &Grid1D) -> Result<ComplexField1D> {
    check_tau(tau)?;
    let t = tau / cfg.epsilon;
    Ok(ComplexField1D::from_fn(*grid_r, |r| {
        let k = r / t;
        far_field_prefactor(cfg, tau, r) * transmission(cfg.alpha, k) * cfg.light_fourier(k)
    }))
}

/// Reflected light wave off a heavy particle at `x`:
/// `R(|r|/t) e^{-2ixr/t} (i t)^{-1/2} e^{i r²/2t} g~(-r/t)` on `grid_r`.
pub fn g_reflected(cfg: &ExperimentConfig, tau: f64, x: f64, grid_r: &Grid1D) -> Result<ComplexField1D> {
    check_tau(tau)?;
    let t = tau / cfg.epsilon;
    Ok(ComplexField1D::from_fn(*grid_r, |r| {
        let k = r / t;
        far_field_prefactor(cfg, tau, r)
            * reflection(cfg.alpha, k)
            * Complex64::from_polar(1.0, -2.0 * x * k)
            * cfg.light_fourier(-k)
    }))
}

fn check_tau(tau: f64) -> Result<()> {
    if tau > 0.0 && tau.is_finite() {
        Ok(())
    } else {
        Err(DclError::InvalidConfig(format!("tau must be positive, got {tau}")))
    }
}

/// Which asymptotic formula produced a state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    /// Light channel from the inverse wave operator, recoil kept.
    Recoiled,
    /// Explicitly entangled product channels, recoil dropped.
    Entangled,
}

/// An asymptotic state stored as its far-field amplitude `D(k, R)`.
#[derive(Debug, Clone, PartialEq)]
pub struct AsymptoticState {
    pub amplitude: ComplexField2D,
    pub tau: f64,
    pub epsilon: f64,
    pub provenance: Provenance,
}

impl AsymptoticState {
    pub fn norm(&self) -> f64 {
        self.amplitude.norm()
    }

    pub fn k_grid(&self) -> &Grid1D {
        self.amplitude.grid_a()
    }

    pub fn heavy_grid(&self) -> &Grid1D {
        self.amplitude.grid_b()
    }

    /// Light position `r = k tau/epsilon` of row `j`.
    pub fn light_position(&self, j: usize) -> f64 {
        self.k_grid().point(j) * self.tau / self.epsilon
    }

    /// `ψ(r_j, R_i)` including the far-field prefactor.
    pub fn position_value(&self, cfg: &ExperimentConfig, j: usize, i: usize) -> Complex64 {
        far_field_prefactor(cfg, self.tau, self.light_position(j)) * self.amplitude.get(j, i)
    }

    pub fn l2_distance(&self, other: &AsymptoticState) -> Result<f64> {
        if (self.tau - other.tau).abs() > 1e-15 * self.tau || self.epsilon != other.epsilon {
            return Err(DclError::GridMismatch("states at different times or mass ratios".into()));
        }
        self.amplitude.l2_distance(&other.amplitude)
    }
}

/// The freely evolved heavy packets on one grid, plus modulated propagation.
struct HeavyFlow {
    grid: Grid1D,
    plan: FftPair,
    symbol: Vec<Complex64>,
    f_plus: Vec<Complex64>,
    f_minus: Vec<Complex64>,
    f_plus_t: Vec<Complex64>,
    f_minus_t: Vec<Complex64>,
}

impl HeavyFlow {
    fn new(cfg: &ExperimentConfig, grid: Grid1D, tau: f64) -> Result<Self> {
        let (p, m) = cfg.heavy_packets();
        let f_plus = p.sample(&grid)?.into_values();
        let f_minus = m.sample(&grid)?.into_values();
        let plan = FftPair::new(grid.len());
        let symbol = free_symbol(&grid, tau, 1.0);
        let mut f_plus_t = f_plus.clone();
        let mut f_minus_t = f_minus.clone();
        plan.apply_symbol(&mut f_plus_t, &symbol);
        plan.apply_symbol(&mut f_minus_t, &symbol);
        let flow = Self { grid, plan, symbol, f_plus, f_minus, f_plus_t, f_minus_t };
        flow.watch(&flow.f_plus_t, 1.0)?;
        flow.watch(&flow.f_minus_t, 1.0)?;
        Ok(flow)
    }

    /// `e^{-i tau H0}[e^{-2ikx} f](R)` for `f = f⁺` or `f⁻`.
    fn modulated(&self, k: f64, plus: bool) -> Vec<Complex64> {
        let src = if plus { &self.f_plus } else { &self.f_minus };
        let mut buf: Vec<Complex64> = self
            .grid
            .points()
            .zip(src)
            .map(|(x, v)| v * Complex64::from_polar(1.0, -2.0 * k * x))
            .collect();
        self.plan.apply_symbol(&mut buf, &self.symbol);
        buf
    }

    /// Rejects a row whose weighted edge mass exceeds the threshold.
    fn watch(&self, row: &[Complex64], weight: f64) -> Result<()> {
        let n = row.len();
        let m = ((n as f64 * EDGE_FRACTION).ceil() as usize).max(1);
        let mass = weight
            * row[..m].iter().chain(&row[n - m..]).map(|v| v.norm_sqr()).sum::<f64>()
            * self.grid.spacing();
        if mass > BOUNDARY_THRESHOLD {
            return Err(DclError::GridEscape { mass, threshold: BOUNDARY_THRESHOLD });
        }
        Ok(())
    }
}

fn start(cfg: &ExperimentConfig, grids: &AsymptoticGrids) -> Result<HeavyFlow> {
    cfg.validate()?;
    HeavyFlow::new(cfg, grids.heavy, cfg.tau)
}

/// `(e^{-iτH0} f⁺, e^{-iτH0} f⁻)` sampled on `grid`.
pub fn free_heavy_packets(
    cfg: &ExperimentConfig,
    grid: &Grid1D,
    tau: f64,
) -> Result<(ComplexField1D, ComplexField1D)> {
    check_tau(tau)?;
    let flow = HeavyFlow::new(cfg, *grid, tau)?;
    Ok((ComplexField1D::new(*grid, flow.f_plus_t)?, ComplexField1D::new(*grid, flow.f_minus_t)?))
}

/// The recoiled asymptotic state ψ^a at `cfg.tau`, one modulated heavy
/// propagation per light momentum.
pub fn psi_a(cfg: &ExperimentConfig, grids: &AsymptoticGrids) -> Result<AsymptoticState> {
    let flow = start(cfg, grids)?;
    let (nk, nr) = (grids.k.len(), grids.heavy.len());
    let mut values = Vec::with_capacity(nk * nr);
    for k in grids.k.points() {
        let a = channel_a(cfg, k);
        let b = channel_b(cfg, k);
        if b == Complex64::new(0.0, 0.0) {
            values.extend(
                flow.f_plus_t.iter().zip(&flow.f_minus_t).map(|(p, m)| a * (p + m) * FRAC_1_SQRT_2),
            );
        } else {
            let mp = flow.modulated(k, true);
            let mm = flow.modulated(k, false);
            flow.watch(&mp, b.norm_sqr())?;
            flow.watch(&mm, b.norm_sqr())?;
            for i in 0..nr {
                let phi_t = (flow.f_plus_t[i] + flow.f_minus_t[i]) * FRAC_1_SQRT_2;
                let kicked = (mp[i] + mm[i]) * FRAC_1_SQRT_2;
                values.push(a * phi_t + b * kicked);
            }
        }
    }
    Ok(AsymptoticState {
        amplitude: ComplexField2D::new(grids.k, grids.heavy, values)?,
        tau: cfg.tau,
        epsilon: cfg.epsilon,
        provenance: Provenance::Recoiled,
    })
}

/// The explicitly entangled state at `cfg.tau`.
pub fn psi_e(cfg: &ExperimentConfig, grids: &AsymptoticGrids) -> Result<AsymptoticState> {
    let flow = start(cfg, grids)?;
    let mut values = Vec::with_capacity(grids.k.len() * grids.heavy.len());
    for k in grids.k.points() {
        let cp = entangled_channel(cfg, k, -cfg.heavy_offset) * FRAC_1_SQRT_2;
        let cm = entangled_channel(cfg, k, cfg.heavy_offset) * FRAC_1_SQRT_2;
        values.extend(flow.f_plus_t.iter().zip(&flow.f_minus_t).map(|(p, m)| p * cp + m * cm));
    }
    Ok(AsymptoticState {
        amplitude: ComplexField2D::new(grids.k, grids.heavy, values)?,
        tau: cfg.tau,
        epsilon: cfg.epsilon,
        provenance: Provenance::Entangled,
    })
}

/// The three pieces of `ψ^a - ψ^e`, as far-field amplitudes on `(k, R)`.
///
/// * `zeta1 = -R(k) [g~(k) θ₋ Φ_τ + θ₊ g~(-k) e^{-iτH0}(e^{-2ik·} φ)]`:
///   the parts of the light packet moving the wrong way, small when
///   `delta q0` is large.
/// * `zeta2`, `zeta3 = R(k) g~(-k) [e^{-iτH0}(e^{-2ik·} f^±) - e^{-2ikx0} F^±_τ]/sqrt(2)`
///   with `x0 = ∓R0`: recoil of the heavy packets, small when `sigma alpha` is.
#[derive(Debug, Clone, PartialEq)]
pub struct ZetaTerms {
    pub zeta1: ComplexField2D,
    pub zeta2: ComplexField2D,
    pub zeta3: ComplexField2D,
}

pub fn zeta_terms(cfg: &ExperimentConfig, grids: &AsymptoticGrids) -> Result<ZetaTerms> {
    let flow = start(cfg, grids)?;
    let (nk, nr) = (grids.k.len(), grids.heavy.len());
    let mut z1 = Vec::with_capacity(nk * nr);
    let mut z2 = Vec::with_capacity(nk * nr);
    let mut z3 = Vec::with_capacity(nk * nr);
    let r0 = cfg.heavy_offset;
    for k in grids.k.points() {
        let refl = reflection(cfg.alpha, k);
        let g_fwd = cfg.light_fourier(k);
        let g_back = cfg.light_fourier(-k);
        let mp = flow.modulated(k, true);
        let mm = flow.modulated(k, false);
        let back = refl * g_back * FRAC_1_SQRT_2;
        let shift_p = Complex64::from_polar(1.0, 2.0 * k * r0);
        let shift_m = Complex64::from_polar(1.0, -2.0 * k * r0);
        for i in 0..nr {
            let phi_t = (flow.f_plus_t[i] + flow.f_minus_t[i]) * FRAC_1_SQRT_2;
            let kicked = (mp[i] + mm[i]) * FRAC_1_SQRT_2;
            let z = if k > 0.0 { g_back * kicked } else { g_fwd * phi_t };
            z1.push(-refl * z);
            z2.push(back * (mp[i] - shift_p * flow.f_plus_t[i]));
            z3.push(back * (mm[i] - shift_m * flow.f_minus_t[i]));
        }
    }
    Ok(ZetaTerms {
        zeta1: ComplexField2D::new(grids.k, grids.heavy, z1)?,
        zeta2: ComplexField2D::new(grids.k, grids.heavy, z2)?,
        zeta3: ComplexField2D::new(grids.k, grids.heavy, z3)?,
    })
}

/// Analytic bounds on the squared norms: `(2 int_{delta q0}^inf |g~|², 2 sigma² alpha²)`.
/// The second applies to each recoil term.
pub fn zeta_bounds(cfg: &ExperimentConfig) -> (f64, f64) {
    let s = cfg.heavy_width * cfg.alpha;
    (cfg.light_tail(), 2.0 * s * s)
}

/// Norms of `ψ^a - ψ^e` and of its pieces.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidualNorms {
    pub total: f64,
    pub zeta1: f64,
    pub zeta2: f64,
    pub zeta3: f64,
}

/// `‖ψ^a - ψ^e‖` and the ζ norms without any time evolution.
///
/// The heavy flow is unitary and the far-field prefactor has modulus
/// `t^{-1/2}`, so for each `k` the residual's `R`-norm equals the norm of the
/// corresponding `x` function at time zero. `x_grid` only has to hold the
/// initial heavy packets.
pub fn entangled_residual_norm(
    cfg: &ExperimentConfig,
    k_grid: &Grid1D,
    x_grid: &Grid1D,
) -> Result<ResidualNorms> {
    cfg.validate()?;
    let (p, m) = cfg.heavy_packets();
    let fp = p.sample(x_grid)?.into_values();
    let fm = m.sample(x_grid)?.into_values();
    Ok(ResidualNorms::from_sums(residual_sums(cfg, k_grid, x_grid, &fp, &fm), k_grid.spacing() * x_grid.spacing()))
}

/// [`entangled_residual_norm`] with grids chosen from `cfg`: the light
/// momenta cover the channels up to spectral mass `tail`, and each heavy
/// packet gets its own grid over its support. The integrand is a pointwise
/// square, so disjoint packets never meet in it.
pub fn entangled_residual_norm_auto(cfg: &ExperimentConfig, tail: f64, max_points: usize) -> Result<ResidualNorms> {
    cfg.validate()?;
    let mut k_grid = crate::decoherence::light_quadrature_grid(cfg, tail)?;
    // the integrands have a kink at k = 0, where |g~(k)|² meets |g~(-k)|²;
    // the trapezoid error there is about 1e-2 (δ dk)² relative
    let dk = 1.0 / (32.0 * cfg.light_width);
    if k_grid.spacing() > dk {
        let n = ((k_grid.extent() / dk).ceil() as usize).next_power_of_two();
        k_grid = Grid1D::symmetric(k_grid.x_max(), n)?;
    }
    if k_grid.len() > max_points {
        return Err(DclError::InvalidGrid(format!("light grid needs {} points, cap is {max_points}", k_grid.len())));
    }
    let s = cfg.envelope.support_half_width() * cfg.heavy_width;
    // resolve the packet and the kick e^{-2ikx} at the largest momentum
    let h = (cfg.heavy_width / 32.0).min(std::f64::consts::PI / (8.0 * k_grid.x_max()));
    let half = 1.125 * s + 4.0 * h;
    let n = ((2.0 * half / h).ceil() as usize).next_power_of_two().max(64);
    if n > max_points {
        return Err(DclError::InvalidGrid(format!("heavy packet grid needs {n} points, cap is {max_points}")));
    }
    let (p, m) = cfg.heavy_packets();
    let mut sums = [0.0; 4];
    for (packet, plus) in [(p, true), (m, false)] {
        let grid = Grid1D::new(packet.center - half, packet.center + half, n)?;
        let f = packet.sample(&grid)?.into_values();
        let zero = vec![Complex64::new(0.0, 0.0); n];
        let part = if plus {
            residual_sums(cfg, &k_grid, &grid, &f, &zero)
        } else {
            residual_sums(cfg, &k_grid, &grid, &zero, &f)
        };
        let w = k_grid.spacing() * grid.spacing();
        sums.iter_mut().zip(part).for_each(|(s, v)| *s += v * w);
    }
    Ok(ResidualNorms::from_sums(sums, 1.0))
}

impl ResidualNorms {
    fn from_sums(sums: [f64; 4], weight: f64) -> Self {
        Self {
            total: (sums[0] * weight).sqrt(),
            zeta1: (sums[1] * weight).sqrt(),
            zeta2: (sums[2] * weight).sqrt(),
            zeta3: (sums[3] * weight).sqrt(),
        }
    }
}

/// Unweighted squared sums `(total, ζ₁, ζ₂, ζ₃)` over `k_grid × x_grid`.
fn residual_sums(
    cfg: &ExperimentConfig,
    k_grid: &Grid1D,
    x_grid: &Grid1D,
    fp: &[Complex64],
    fm: &[Complex64],
) -> [f64; 4] {
    let xs: Vec<f64> = x_grid.points().collect();
    let r0 = cfg.heavy_offset;
    let row = |k: f64| -> [f64; 4] {
        let a = channel_a(cfg, k);
        let b = channel_b(cfg, k);
        let cp = entangled_channel(cfg, k, -r0);
        let cm = entangled_channel(cfg, k, r0);
        let refl = reflection(cfg.alpha, k);
        let g_fwd = cfg.light_fourier(k);
        let g_back = cfg.light_fourier(-k);
        let back = refl * g_back * FRAC_1_SQRT_2;
        let shift_p = Complex64::from_polar(1.0, 2.0 * k * r0);
        let shift_m = Complex64::from_polar(1.0, -2.0 * k * r0);
        let mut out = [0.0; 4];
        for (i, &x) in xs.iter().enumerate() {
            let kick = Complex64::from_polar(1.0, -2.0 * k * x);
            let phi = (fp[i] + fm[i]) * FRAC_1_SQRT_2;
            let d = phi * (a + b * kick) - (fp[i] * cp + fm[i] * cm) * FRAC_1_SQRT_2;
            let z1 = if k > 0.0 { g_back * kick * phi } else { g_fwd * phi };
            out[0] += d.norm_sqr();
            out[1] += (refl * z1).norm_sqr();
            out[2] += (back * fp[i] * (kick - shift_p)).norm_sqr();
            out[3] += (back * fm[i] * (kick - shift_m)).norm_sqr();
        }
        out
    };
    let mut sums = [0.0; 4];
    for k in k_grid.points() {
        sums.iter_mut().zip(row(k)).for_each(|(s, v)| *s += v);
    }
    sums
}

/// Off-grid evaluation of the far-field amplitudes of both asymptotic states.
///
/// The free heavy packets are tabulated once and interpolated; the momentum
/// kick in ψ^a uses the Galilean identity
/// `e^{-iτH0}(e^{ipx} f)(R) = e^{ipR - ip²τ/2} (e^{-iτH0} f)(R - pτ)`.
#[derive(Debug, Clone)]
pub struct PointwiseAsymptotics {
    cfg: ExperimentConfig,
    tau: f64,
    f_plus: BandLimitedInterpolant,
    f_minus: BandLimitedInterpolant,
}

impl PointwiseAsymptotics {
    /// Tabulates the free heavy packets at `cfg.tau` on `table`, which must hold
    /// them with margin.
    pub fn new(cfg: &ExperimentConfig, table: &Grid1D) -> Result<Self> {
        cfg.validate()?;
        let flow = HeavyFlow::new(cfg, *table, cfg.tau)?;
        Ok(Self {
            cfg: *cfg,
            tau: cfg.tau,
            f_plus: BandLimitedInterpolant::new(table, &flow.f_plus_t, 8),
            f_minus: BandLimitedInterpolant::new(table, &flow.f_minus_t, 8),
        })
    }

    /// A table grid holding both heavy packets at `cfg.tau` up to spectral mass `tail`.
    pub fn auto_table(cfg: &ExperimentConfig, tail: f64, max_points: usize) -> Result<Grid1D> {
        let z = cfg.envelope.spectral_cutoff(tail);
        let spread = cfg.heavy_momentum + z / cfg.heavy_width;
        let half = cfg.heavy_offset
            + cfg.envelope.support_half_width() * cfg.heavy_width
            + cfg.tau * spread
            + 4.0 * cfg.heavy_width;
        Grid1D::sized_symmetric(half, 1.5 * spread, max_points)
    }

    fn heavy(&self, x: f64) -> (Complex64, Complex64) {
        (self.f_plus.eval(x), self.f_minus.eval(x))
    }

    /// `D^a(k, R)`.
    pub fn recoiled(&self, k: f64, r_heavy: f64) -> Complex64 {
        let (p, m) = self.heavy(r_heavy);
        let mut v = channel_a(&self.cfg, k) * (p + m) * FRAC_1_SQRT_2;
        let b = channel_b(&self.cfg, k);
        if b != Complex64::new(0.0, 0.0) {
            let (ps, ms) = self.heavy(r_heavy + 2.0 * k * self.tau);
            let phase = Complex64::from_polar(1.0, -2.0 * k * r_heavy - 2.0 * k * k * self.tau);
            v += b * phase * (ps + ms) * FRAC_1_SQRT_2;
        }
        v
    }

    /// `D^e(k, R)`.
    pub fn entangled(&self, k: f64, r_heavy: f64) -> Complex64 {
        let (p, m) = self.heavy(r_heavy);
        (p * entangled_channel(&self.cfg, k, -self.cfg.heavy_offset)
            + m * entangled_channel(&self.cfg, k, self.cfg.heavy_offset))
            * FRAC_1_SQRT_2
    }

    pub fn amplitude(&self, which: Provenance, k: f64, r_heavy: f64) -> Complex64 {
        match which {
            Provenance::Recoiled => self.recoiled(k, r_heavy),
            Provenance::Entangled => self.entangled(k, r_heavy),
        }
    }

    /// `ψ(r, R)` in the two-body position frame.
    pub fn position_value(&self, which: Provenance, r: f64, r_heavy: f64) -> Complex64 {
        let t = self.tau / self.cfg.epsilon;
        far_field_prefactor(&self.cfg, self.tau, r) * self.amplitude(which, r / t, r_heavy)
    }
}
