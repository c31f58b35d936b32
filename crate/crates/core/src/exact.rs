//! Numerically exact two-body evolution.
//!
//! In centre-of-mass and relative coordinates `X = (R + εr)/(1+ε)`,
//! `y = r - R` the rescaled hamiltonian splits as
//! `-(1/2M) ∂_X² + [-(1/2μ) ∂_y² + (α/ε) δ(y)]` with `M = 1 + ε` and
//! `μ = ε/(1+ε)`. The relative problem is a one-body delta problem with
//! `κ = μ α/ε = α/(1+ε)`; both factors commute and are solved exactly.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::asymptotics::{PointwiseAsymptotics, Provenance};
use crate::error::{DclError, Result};
use crate::fields::{
    continuous_forward, derivative_symbol, free_symbol, BandLimitedInterpolant, ComplexField2D, ExperimentConfig,
    FftPair, Grid1D, HalfLineQuadrature,
};
use crate::scattering::{assemble_row, split_row, BOUNDARY_THRESHOLD, EDGE_FRACTION};

/// The linear change of variables `(r, R) <-> (X, y)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CMRelativeFrame {
    pub epsilon: f64,
}

impl CMRelativeFrame {
    pub fn new(epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(DclError::InvalidConfig(format!("epsilon must be positive, got {epsilon}")));
        }
        Ok(Self { epsilon })
    }

    pub fn total_mass(&self) -> f64 {
        1.0 + self.epsilon
    }

    pub fn reduced_mass(&self) -> f64 {
        self.epsilon / (1.0 + self.epsilon)
    }

    /// Strength of the delta in the relative equation, `α/ε`.
    pub fn relative_coupling(&self, alpha: f64) -> f64 {
        alpha / self.epsilon
    }

    /// `μ α/ε = α/(1+ε)`, the inverse length governing relative scattering.
    pub fn kappa(&self, alpha: f64) -> f64 {
        alpha / (1.0 + self.epsilon)
    }

    /// `(r, R) -> (X, y)`.
    pub fn to_cm(&self, r: f64, r_heavy: f64) -> (f64, f64) {
        ((r_heavy + self.epsilon * r) / (1.0 + self.epsilon), r - r_heavy)
    }

    /// `(X, y) -> (r, R)`.
    pub fn from_cm(&self, x: f64, y: f64) -> (f64, f64) {
        let s = 1.0 + self.epsilon;
        (x + y / s, x - self.epsilon * y / s)
    }

    /// Determinant of `∂(X, y)/∂(r, R)`.
    pub fn jacobian(&self) -> f64 {
        let s = 1.0 + self.epsilon;
        // rows (∂X/∂r, ∂X/∂R) = (ε/s, 1/s), (∂y/∂r, ∂y/∂R) = (1, -1)
        (self.epsilon / s) * (-1.0) - (1.0 / s) * 1.0
    }
}

/// Centre-of-mass and relative sampling grids. The relative grid must be
/// symmetric about the interaction point `y = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactGrids {
    pub cm: Grid1D,
    pub rel: Grid1D,
}

impl ExactGrids {
    pub fn new(cm: Grid1D, rel: Grid1D) -> Result<Self> {
        if !rel.is_symmetric() {
            return Err(DclError::InvalidGrid("relative grid must be symmetric about 0".into()));
        }
        Ok(Self { cm, rel })
    }

    /// Grids for far-field comparisons in the default regime (2048 x 4096).
    pub fn far_field_default() -> Self {
        Self { cm: Grid1D::symmetric(128.0, 2048).unwrap(), rel: Grid1D::symmetric(50.0, 4096).unwrap() }
    }
}

/// How an exact state is sampled.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExactFrame {
    /// `ψ(X, y)` on the two grids.
    Position,
    /// `Ξ(X, p)` with `p = μ y / τ` on `cm x rel.dual()`: the exact
    /// far-field form of the relative motion,
    /// `ψ(X, y) = (μ/τ)^{1/2} e^{iμy²/2τ} Ξ(X, μy/τ)`. It stays compact while
    /// the light particle flies off, so long times fit on small grids.
    Lens,
}

/// Order of the two commuting factors; only used to exhibit commutation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FactorOrder {
    CmFirst,
    RelativeFirst,
}

#[derive(Debug, Clone)]
enum Repr {
    /// The delta problem's two smooth channels, row-major over `(X, y)`.
    Channels { left: Vec<Complex64>, right: Vec<Complex64> },
    Lens { xi: ComplexField2D },
}

/// The exact two-body state at slow time `tau`.
#[derive(Debug, Clone)]
pub struct ExactState {
    pub grids: ExactGrids,
    pub tau: f64,
    pub frame: CMRelativeFrame,
    pub alpha: f64,
    repr: Repr,
}

fn along_rows(values: &mut [Complex64], nb: usize, plan: &FftPair, symbol: &[Complex64]) {
    for row in values.chunks_exact_mut(nb) {
        plan.apply_symbol(row, symbol);
    }
}

fn along_columns(values: &mut [Complex64], na: usize, nb: usize, plan: &FftPair, symbol: &[Complex64]) {
    let mut col = vec![Complex64::new(0.0, 0.0); na];
    for ib in 0..nb {
        for ia in 0..na {
            col[ia] = values[ia * nb + ib];
        }
        plan.apply_symbol(&mut col, symbol);
        for ia in 0..na {
            values[ia * nb + ib] = col[ia];
        }
    }
}

fn edge_mass(values: &[Complex64], na: usize, nb: usize, cell: f64) -> f64 {
    let ma = ((na as f64 * EDGE_FRACTION).ceil() as usize).max(1);
    let mb = ((nb as f64 * EDGE_FRACTION).ceil() as usize).max(1);
    let mut s = 0.0;
    for ia in 0..na {
        let edge_a = ia < ma || ia >= na - ma;
        for ib in 0..nb {
            if edge_a || ib < mb || ib >= nb - mb {
                s += values[ia * nb + ib].norm_sqr();
            }
        }
    }
    s * cell
}

fn guard(values: &[Complex64], na: usize, nb: usize, cell: f64) -> Result<()> {
    let mass = edge_mass(values, na, nb, cell);
    if mass > BOUNDARY_THRESHOLD {
        return Err(DclError::GridEscape { mass, threshold: BOUNDARY_THRESHOLD });
    }
    Ok(())
}

/// Samples `φ(R) χ(r)` at the mapped grid points and normalizes it.
pub fn initial_state(cfg: &ExperimentConfig, grids: &ExactGrids) -> Result<ComplexField2D> {
    cfg.validate()?;
    let frame = CMRelativeFrame::new(cfg.epsilon)?;
    let light = cfg.light_packet();
    let mut psi = ComplexField2D::from_fn(grids.cm, grids.rel, |x, y| {
        let (r, rh) = frame.from_cm(x, y);
        cfg.heavy_value(rh) * light.value(r)
    });
    let edge = edge_mass(psi.values(), grids.cm.len(), grids.rel.len(), psi.cell_area());
    if edge > 0.0 {
        return Err(DclError::SupportEscapesGrid { amplitude: edge.sqrt() });
    }
    psi.normalize();
    Ok(psi)
}

/// Evolves the initial state of `cfg` to `tau` on `grids`.
pub fn evolve_exact(cfg: &ExperimentConfig, grids: &ExactGrids, tau: f64, frame: ExactFrame) -> Result<ExactState> {
    match frame {
        ExactFrame::Position => evolve_exact_ordered(cfg, grids, tau, FactorOrder::CmFirst),
        ExactFrame::Lens => evolve_lens(cfg, grids, tau),
    }
}

/// Position-frame evolution with an explicit factor order.
pub fn evolve_exact_ordered(
    cfg: &ExperimentConfig,
    grids: &ExactGrids,
    tau: f64,
    order: FactorOrder,
) -> Result<ExactState> {
    if !(tau >= 0.0) {
        return Err(DclError::InvalidConfig(format!("tau must be non-negative, got {tau}")));
    }
    let grids = ExactGrids::new(grids.cm, grids.rel)?;
    let frame = CMRelativeFrame::new(cfg.epsilon)?;
    let psi0 = initial_state(cfg, &grids)?;
    let (na, nb) = (grids.cm.len(), grids.rel.len());
    let plan_a = FftPair::new(na);
    let plan_b = FftPair::new(nb);
    let kappa = frame.kappa(cfg.alpha);
    let mut left = Vec::with_capacity(na * nb);
    let mut right = Vec::with_capacity(na * nb);
    for row in psi0.values().chunks_exact(nb) {
        let (l, r) = split_row(&plan_b, &grids.rel, row, kappa);
        left.extend(l);
        right.extend(r);
    }
    let cell = psi0.cell_area();
    guard(&left, na, nb, cell)?;
    guard(&right, na, nb, cell)?;
    let sym_a = free_symbol(&grids.cm, tau, frame.total_mass());
    let sym_b = free_symbol(&grids.rel, tau, frame.reduced_mass());
    for buf in [&mut left, &mut right] {
        match order {
            FactorOrder::CmFirst => {
                along_columns(buf, na, nb, &plan_a, &sym_a);
                along_rows(buf, nb, &plan_b, &sym_b);
            }
            FactorOrder::RelativeFirst => {
                along_rows(buf, nb, &plan_b, &sym_b);
                along_columns(buf, na, nb, &plan_a, &sym_a);
            }
        }
    }
    guard(&left, na, nb, cell)?;
    guard(&right, na, nb, cell)?;
    Ok(ExactState { grids, tau, frame, alpha: cfg.alpha, repr: Repr::Channels { left, right } })
}

fn evolve_lens(cfg: &ExperimentConfig, grids: &ExactGrids, tau: f64) -> Result<ExactState> {
    if !(tau > 0.0) {
        return Err(DclError::InvalidConfig(format!("the far-field frame needs tau > 0, got {tau}")));
    }
    let grids = ExactGrids::new(grids.cm, grids.rel)?;
    let frame = CMRelativeFrame::new(cfg.epsilon)?;
    let psi0 = initial_state(cfg, &grids)?;
    let (na, nb) = (grids.cm.len(), grids.rel.len());
    let plan_b = FftPair::new(nb);
    let kappa = frame.kappa(cfg.alpha);
    let mu = frame.reduced_mass();
    let chirp: Vec<Complex64> =
        grids.rel.points().map(|s| Complex64::from_polar(1.0, mu * s * s / (2.0 * tau))).collect();
    let p_grid = grids.rel.dual();
    let rotate = Complex64::from_polar(1.0, -PI / 4.0);
    let mut xi = Vec::with_capacity(na * nb);
    let cell = psi0.cell_area();
    for row in psi0.values().chunks_exact(nb) {
        let (l, r) = split_row(&plan_b, &grids.rel, row, kappa);
        for ch in [&l, &r] {
            let m = ((nb as f64 * EDGE_FRACTION).ceil() as usize).max(1);
            let mass = ch[..m].iter().chain(&ch[nb - m..]).map(|v| v.norm_sqr()).sum::<f64>() * cell;
            if mass > BOUNDARY_THRESHOLD {
                return Err(DclError::GridEscape { mass, threshold: BOUNDARY_THRESHOLD });
            }
        }
        let lc: Vec<Complex64> = l.iter().zip(&chirp).map(|(a, c)| a * c).collect();
        let rc: Vec<Complex64> = r.iter().zip(&chirp).map(|(a, c)| a * c).collect();
        let lf = continuous_forward(&plan_b, &grids.rel, &lc);
        let rf = continuous_forward(&plan_b, &grids.rel, &rc);
        xi.extend((0..nb).map(|j| rotate * if p_grid.point(j) > 0.0 { rf[j] } else { lf[j] }));
    }
    let plan_a = FftPair::new(na);
    along_columns(&mut xi, na, nb, &plan_a, &free_symbol(&grids.cm, tau, frame.total_mass()));
    let xi = ComplexField2D::new(grids.cm, p_grid, xi)?;
    guard(xi.values(), na, nb, xi.cell_area())?;
    Ok(ExactState { grids, tau, frame, alpha: cfg.alpha, repr: Repr::Lens { xi } })
}

impl ExactState {
    pub fn sampling(&self) -> ExactFrame {
        match self.repr {
            Repr::Channels { .. } => ExactFrame::Position,
            Repr::Lens { .. } => ExactFrame::Lens,
        }
    }

    /// The sampled field: `ψ(X, y)` or `Ξ(X, p)`.
    pub fn field(&self) -> ComplexField2D {
        match &self.repr {
            Repr::Lens { xi } => xi.clone(),
            Repr::Channels { left, right } => {
                let nb = self.grids.rel.len();
                let mut values = Vec::with_capacity(left.len());
                for (l, r) in left.chunks_exact(nb).zip(right.chunks_exact(nb)) {
                    values.extend(assemble_row(&self.grids.rel, l, r));
                }
                ComplexField2D::new(self.grids.cm, self.grids.rel, values).expect("grid sizes")
            }
        }
    }

    /// L² norm. In the position frame this is the exact norm of the represented
    /// function (half-line integrals of the channel interpolants); in the
    /// far-field frame it is the discrete norm of the samples.
    pub fn norm(&self) -> f64 {
        match &self.repr {
            Repr::Lens { xi } => xi.norm(),
            Repr::Channels { left, right } => {
                let nb = self.grids.rel.len();
                let q = HalfLineQuadrature::new(&self.grids.rel);
                let s: f64 =
                    left.chunks_exact(nb).zip(right.chunks_exact(nb)).map(|(l, r)| q.split_norm_sqr(l, r)).sum();
                (s * self.grids.cm.spacing()).sqrt()
            }
        }
    }

    /// Expectation of the rescaled hamiltonian (position frame only).
    pub fn energy(&self) -> Result<f64> {
        let Repr::Channels { left, right } = &self.repr else {
            return Err(DclError::InvalidConfig("energy is evaluated in the position frame".into()));
        };
        let (na, nb) = (self.grids.cm.len(), self.grids.rel.len());
        let q = HalfLineQuadrature::new(&self.grids.rel);
        let quad = |l: &[Complex64], r: &[Complex64]| -> f64 {
            l.chunks_exact(nb).zip(r.chunks_exact(nb)).map(|(a, b)| q.split_norm_sqr(a, b)).sum::<f64>()
                * self.grids.cm.spacing()
        };
        let plan_a = FftPair::new(na);
        let plan_b = FftPair::new(nb);
        let (mut lx, mut rx) = (left.clone(), right.clone());
        along_columns(&mut lx, na, nb, &plan_a, &derivative_symbol(&self.grids.cm));
        along_columns(&mut rx, na, nb, &plan_a, &derivative_symbol(&self.grids.cm));
        let (mut ly, mut ry) = (left.clone(), right.clone());
        along_rows(&mut ly, nb, &plan_b, &derivative_symbol(&self.grids.rel));
        along_rows(&mut ry, nb, &plan_b, &derivative_symbol(&self.grids.rel));
        let kinetic =
            quad(&lx, &rx) / (2.0 * self.frame.total_mass()) + quad(&ly, &ry) / (2.0 * self.frame.reduced_mass());
        let origin: f64 = (0..na).map(|ia| right[ia * nb + nb / 2].norm_sqr()).sum::<f64>() * self.grids.cm.spacing();
        Ok(kinetic + self.frame.relative_coupling(self.alpha) * origin)
    }

    /// Mass within the edge band of the sampled field.
    pub fn boundary_mass(&self) -> f64 {
        self.field().boundary_mass(EDGE_FRACTION)
    }

    /// Resamples a position-frame state onto light/heavy coordinates.
    ///
    /// `heavy` must share the relative grid's spacing. Then `r = R + y` lies on
    /// a common lattice and only the centre-of-mass coordinate
    /// `X = R + εy/(1+ε)` needs interpolating. Returns a field over `(r, R)`.
    pub fn light_heavy_field(&self, heavy: &Grid1D) -> Result<ComplexField2D> {
        let Repr::Channels { .. } = &self.repr else {
            return Err(DclError::InvalidConfig("resampling needs the position frame".into()));
        };
        let h = self.grids.rel.spacing();
        if (heavy.spacing() - h).abs() > 1e-12 * h {
            return Err(DclError::GridMismatch("heavy grid spacing must equal the relative spacing".into()));
        }
        let field = self.field();
        let (na, nb) = (self.grids.cm.len(), self.grids.rel.len());
        let nr = (nb + heavy.len()).next_power_of_two();
        let r_min = heavy.x_min() + self.grids.rel.x_min();
        let light = Grid1D::new(r_min, r_min + nr as f64 * h, nr)?;
        let mut columns = Vec::with_capacity(nb);
        let mut col = vec![Complex64::new(0.0, 0.0); na];
        for ib in 0..nb {
            for ia in 0..na {
                col[ia] = field.get(ia, ib);
            }
            columns.push(BandLimitedInterpolant::new(&self.grids.cm, &col, 4));
        }
        let eps = self.frame.epsilon;
        let nh = heavy.len();
        let mut values = vec![Complex64::new(0.0, 0.0); nr * nh];
        for l in 0..nr {
            for i in 0..nh {
                if l < i || l - i >= nb {
                    continue;
                }
                let j = l - i;
                let y = self.grids.rel.point(j);
                let x = heavy.point(i) + eps * y / (1.0 + eps);
                values[l * nh + i] = columns[j].eval(x);
            }
        }
        ComplexField2D::new(light, *heavy, values)
    }
}

/// `‖ψ^ε - ψ^asym‖` evaluated on the exact state's own sampling points.
///
/// The asymptotic state is evaluated pointwise at the mapped coordinates, so
/// no two-dimensional field is ever interpolated between frames.
pub fn compare_in_cm_frame(exact: &ExactState, asym: &PointwiseAsymptotics, which: Provenance) -> Result<f64> {
    let field = exact.field();
    let eps = exact.frame.epsilon;
    let tau = exact.tau;
    let cm = *field.grid_a();
    let b = *field.grid_b();
    let nb = b.len();
    let mut acc = 0.0;
    match exact.sampling() {
        ExactFrame::Position => {
            for (ia, x) in cm.points().enumerate() {
                for (ib, y) in b.points().enumerate() {
                    let (r, rh) = exact.frame.from_cm(x, y);
                    let a = asym.position_value(which, r, rh);
                    acc += (field.values()[ia * nb + ib] - a).norm_sqr();
                }
            }
        }
        ExactFrame::Lens => {
            let pre = Complex64::from_polar((1.0 + eps).sqrt(), -PI / 4.0);
            for (ia, x) in cm.points().enumerate() {
                for (ib, p) in b.points().enumerate() {
                    let phase = eps * x * x / (2.0 * tau) + x * p - tau * p * p / 2.0;
                    let a = pre * Complex64::from_polar(1.0, phase) * asym.amplitude(which, eps * x / tau + p, x - tau * p);
                    acc += (field.values()[ia * nb + ib] - a).norm_sqr();
                }
            }
        }
    }
    Ok((acc * field.cell_area()).sqrt())
}
