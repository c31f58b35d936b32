//! The one-body problem `-(1/2m) Δ + g δ(y)`: scattering amplitudes, the
//! inverse wave operator in momentum space, and an exact propagator.

use num_complex::Complex64;

use crate::error::{DclError, Result};
use crate::fields::{free_symbol, ComplexField1D, FftPair, Grid1D, HalfLineQuadrature};

/// `R(k) = -a / (a - i|k|)`. Zero for `a = 0`.
pub fn reflection(alpha: f64, k: f64) -> Complex64 {
    if alpha == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    -alpha / Complex64::new(alpha, -k.abs())
}

/// `T(k) = -i|k| / (a - i|k|)`. One for `a = 0`, including `k = 0`.
pub fn transmission(alpha: f64, k: f64) -> Complex64 {
    if alpha == 0.0 {
        return Complex64::new(1.0, 0.0);
    }
    Complex64::new(0.0, -k.abs()) / Complex64::new(alpha, -k.abs())
}

/// Reflection and transmission amplitudes tabulated on a momentum grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ScatteringPair {
    pub alpha: f64,
    pub k_grid: Grid1D,
    pub r: Vec<Complex64>,
    pub t: Vec<Complex64>,
}

impl ScatteringPair {
    pub fn new(alpha: f64, k_grid: Grid1D) -> Self {
        let r = k_grid.points().map(|k| reflection(alpha, k)).collect();
        let t = k_grid.points().map(|k| transmission(alpha, k)).collect();
        Self { alpha, k_grid, r, t }
    }

    /// Largest violation of `|R|² + |T|² = 1` and of `1 + R = T` over the grid.
    pub fn max_identity_defect(&self) -> (f64, f64) {
        let mut unit: f64 = 0.0;
        let mut sum: f64 = 0.0;
        for (r, t) in self.r.iter().zip(&self.t) {
            unit = unit.max((r.norm_sqr() + t.norm_sqr() - 1.0).abs());
            sum = sum.max((1.0 + r - t).norm());
        }
        (unit, sum)
    }
}

/// Mass allowed at or right of the scattering centre before the closed form
/// of the inverse wave operator is refused.
pub const SUPPORT_TOLERANCE: f64 = 1e-12;

/// Momentum representation of `(Ω_+^x)^{-1} χ` for a state `χ` lying entirely
/// left of a delta of strength `alpha` placed at `x`:
///
/// `T(k) χ~(k)` for `k > 0` and `χ~(k) + e^{-2ikx} R(k) χ~(-k)` for `k <= 0`.
///
/// The result lives on `chi.grid().dual()`. The mirror `-k` of the most
/// negative grid momentum is identified with itself.
pub fn inverse_wave_operator_momentum(chi: &ComplexField1D, x: f64, alpha: f64) -> Result<ComplexField1D> {
    let grid = chi.grid();
    let h = grid.spacing();
    let right_mass: f64 =
        grid.points().zip(chi.values()).filter(|(y, _)| *y >= x).map(|(_, v)| v.norm_sqr()).sum::<f64>() * h;
    if right_mass >= SUPPORT_TOLERANCE {
        return Err(DclError::SupportViolation { x, mass: right_mass });
    }
    let spec = chi.fourier();
    let dual = *spec.grid();
    let n = dual.len();
    let g = spec.values();
    let values = (0..n)
        .map(|j| {
            let k = dual.point(j);
            if k > 0.0 {
                transmission(alpha, k) * g[j]
            } else {
                let mirror = g[(n - j) % n];
                g[j] + Complex64::from_polar(1.0, -2.0 * k * x) * reflection(alpha, k) * mirror
            }
        })
        .collect();
    ComplexField1D::new(dual, values)
}

/// Edge fraction of the grid watched for escaping mass.
pub const EDGE_FRACTION: f64 = 1.0 / 32.0;
/// Boundary mass above which an evolution is rejected.
pub const BOUNDARY_THRESHOLD: f64 = 1e-8;

/// A state of `-(1/2m) Δ + g δ(y)` held as two smooth channels.
///
/// For `y > 0` the state is the free evolution of `right`, for `y < 0` that of
/// `left`. With `κ = m g` and `u` the even part of the initial state, the odd
/// part is shared and the even part is replaced by the decaying solution `v`
/// of `(∂ - κ) v = u' - κ sign(y) u`, which is `u` on `y > 0`; `left` uses the
/// mirror image of `v`. Because `(∂ - κ)` intertwines the interacting and free
/// even dynamics, each channel evolves freely and the pair reassembles the
/// exact interacting state at every time.
///
/// `v` has a kink at the origin of size `2κ u(0)`, and further jumps set by
/// the even derivatives of `u` there. The channels are spectrally accurate
/// when the initial state vanishes near the delta, as incoming packets do;
/// otherwise the accuracy is that of trigonometric interpolation of a kink.
#[derive(Debug, Clone)]
pub struct DeltaChannels {
    grid: Grid1D,
    mass: f64,
    left: Vec<Complex64>,
    right: Vec<Complex64>,
}

impl DeltaChannels {
    /// Splits `psi0` (samples on a grid symmetric about the delta at `y = 0`).
    pub fn split(psi0: &ComplexField1D, coupling: f64, mass: f64) -> Result<Self> {
        let grid = *psi0.grid();
        if !grid.is_symmetric() {
            return Err(DclError::InvalidGrid("the delta propagator needs a grid symmetric about 0".into()));
        }
        if !(coupling >= 0.0) || !(mass > 0.0) {
            return Err(DclError::InvalidConfig(format!(
                "coupling must be non-negative and mass positive, got {coupling}, {mass}"
            )));
        }
        let plan = FftPair::new(grid.len());
        let (left, right) = split_row(&plan, &grid, psi0.values(), mass * coupling);
        let ch = Self { grid, mass, left, right };
        ch.check_boundary()?;
        Ok(ch)
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn left(&self) -> &[Complex64] {
        &self.left
    }

    pub fn right(&self) -> &[Complex64] {
        &self.right
    }

    /// Free evolution of both channels by `t`.
    pub fn evolve(&mut self, t: f64) -> Result<()> {
        let plan = FftPair::new(self.grid.len());
        let sym = free_symbol(&self.grid, t, self.mass);
        plan.apply_symbol(&mut self.left, &sym);
        plan.apply_symbol(&mut self.right, &sym);
        self.check_boundary()
    }

    /// The interacting state on the grid.
    pub fn assemble(&self) -> ComplexField1D {
        let values = assemble_row(&self.grid, &self.left, &self.right);
        ComplexField1D::new(self.grid, values).expect("same grid")
    }

    /// Exact L² norm squared of the represented state.
    pub fn norm_sqr(&self) -> f64 {
        HalfLineQuadrature::new(&self.grid).split_norm_sqr(&self.left, &self.right)
    }

    /// Mass on `y > 0`.
    pub fn right_mass(&self) -> f64 {
        let zero = vec![Complex64::new(0.0, 0.0); self.grid.len()];
        HalfLineQuadrature::new(&self.grid).split_norm_sqr(&zero, &self.right)
    }

    /// `<H> = (1/2m) int |ψ'|² + g |ψ(0)|²` with `g = κ / m`.
    pub fn energy(&self, coupling: f64) -> f64 {
        let plan = FftPair::new(self.grid.len());
        let q = HalfLineQuadrature::new(&self.grid);
        let d = crate::fields::derivative_symbol(&self.grid);
        let mut dl = self.left.clone();
        let mut dr = self.right.clone();
        plan.apply_symbol(&mut dl, &d);
        plan.apply_symbol(&mut dr, &d);
        let kinetic = q.split_norm_sqr(&dl, &dr) / (2.0 * self.mass);
        let origin = self.right[self.grid.len() / 2];
        kinetic + coupling * origin.norm_sqr()
    }

    fn check_boundary(&self) -> Result<()> {
        let n = self.grid.len();
        let m = ((n as f64 * EDGE_FRACTION).ceil() as usize).max(1);
        let h = self.grid.spacing();
        let edge = |v: &[Complex64]| -> f64 {
            v[..m].iter().chain(&v[n - m..]).map(|c| c.norm_sqr()).sum::<f64>() * h
        };
        let mass = edge(&self.left).max(edge(&self.right));
        if mass > BOUNDARY_THRESHOLD {
            return Err(DclError::GridEscape { mass, threshold: BOUNDARY_THRESHOLD });
        }
        Ok(())
    }
}

/// Splits one row into `(left, right)` channels for `κ = mass * coupling`.
pub(crate) fn split_row(plan: &FftPair, grid: &Grid1D, psi0: &[Complex64], kappa: f64) -> (Vec<Complex64>, Vec<Complex64>) {
    let n = grid.len();
    let mirror = |j: usize| (n - j) % n;
    // the Nyquist mode has no consistent derivative; drop it so every relation
    // below holds exactly for the trigonometric interpolants
    let mut psi0 = psi0.to_vec();
    plan.forward(&mut psi0);
    psi0[n / 2] = Complex64::new(0.0, 0.0);
    plan.inverse(&mut psi0);
    let even: Vec<Complex64> = (0..n).map(|j| 0.5 * (psi0[j] + psi0[mirror(j)])).collect();
    let odd: Vec<Complex64> = (0..n).map(|j| 0.5 * (psi0[j] - psi0[mirror(j)])).collect();
    let v = if kappa == 0.0 {
        even
    } else {
        let ks = grid.fft_wavenumbers();
        let mut du = even.clone();
        plan.forward(&mut du);
        du.iter_mut().zip(&ks).for_each(|(c, k)| *c *= Complex64::new(0.0, *k));
        plan.inverse(&mut du);
        // w = u' - κ sign(y) u; the self-mirrored end point carries no sign
        let mut w: Vec<Complex64> = (0..n)
            .map(|j| {
                let s = if j == 0 || j == n / 2 { 0.0 } else if j > n / 2 { 1.0 } else { -1.0 };
                du[j] - kappa * s * even[j]
            })
            .collect();
        plan.forward(&mut w);
        w.iter_mut().zip(&ks).for_each(|(c, k)| *c /= Complex64::new(-kappa, *k));
        plan.inverse(&mut w);
        w
    };
    let right: Vec<Complex64> = (0..n).map(|j| odd[j] + v[j]).collect();
    let left: Vec<Complex64> = (0..n).map(|j| odd[j] + v[mirror(j)]).collect();
    (left, right)
}

pub(crate) fn assemble_row(grid: &Grid1D, left: &[Complex64], right: &[Complex64]) -> Vec<Complex64> {
    let n = grid.len();
    (0..n)
        .map(|j| match j.cmp(&(n / 2)) {
            std::cmp::Ordering::Greater => right[j],
            std::cmp::Ordering::Less => left[j],
            std::cmp::Ordering::Equal => 0.5 * (left[j] + right[j]),
        })
        .collect()
}

/// Exact evolution of `psi0` by `t` under `-(1/2 mass) Δ + coupling δ(y)`.
pub fn delta_propagator(psi0: &ComplexField1D, t: f64, coupling: f64, mass: f64) -> Result<ComplexField1D> {
    if !(t >= 0.0) {
        return Err(DclError::InvalidConfig(format!("time must be non-negative, got {t}")));
    }
    let mut ch = DeltaChannels::split(psi0, coupling, mass)?;
    ch.evolve(t)?;
    Ok(ch.assemble())
}

/// `int |T(k)|² |χ~(k)|² dk`: the transmitted probability of an incoming state.
pub fn transmitted_probability(spectrum: &ComplexField1D, alpha: f64) -> f64 {
    let g = spectrum.grid();
    g.points().zip(spectrum.values()).map(|(k, v)| transmission(alpha, k).norm_sqr() * v.norm_sqr()).sum::<f64>()
        * g.spacing()
}
