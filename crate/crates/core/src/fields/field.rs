use num_complex::Complex64;

use super::grid::Grid1D;
use super::spectral::{continuous_forward, continuous_inverse, FftPair};
use crate::error::{DclError, Result};

/// Complex samples on a uniform 1D grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexField1D {
    grid: Grid1D,
    values: Vec<Complex64>,
}

impl ComplexField1D {
    pub fn new(grid: Grid1D, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(DclError::GridMismatch(format!(
                "{} values for a grid of {} points",
                values.len(),
                grid.len()
            )));
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: Grid1D) -> Self {
        Self { grid, values: vec![Complex64::new(0.0, 0.0); grid.len()] }
    }

    pub fn from_fn(grid: Grid1D, f: impl Fn(f64) -> Complex64) -> Self {
        let values = grid.points().map(f).collect();
        Self { grid, values }
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn norm_sqr(&self) -> f64 {
        self.grid.spacing() * self.values.iter().map(|v| v.norm_sqr()).sum::<f64>()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Rescales to unit discrete norm. A zero field is left untouched.
    pub fn normalize(&mut self) {
        let n = self.norm();
        if n > 0.0 {
            self.values.iter_mut().for_each(|v| *v /= n);
        }
    }

    /// `<self, other> = h sum conj(self) other`.
    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        check_same(&self.grid, &other.grid)?;
        let s: Complex64 = self.values.iter().zip(&other.values).map(|(a, b)| a.conj() * b).sum();
        Ok(s * self.grid.spacing())
    }

    pub fn l2_distance(&self, other: &Self) -> Result<f64> {
        check_same(&self.grid, &other.grid)?;
        let s: f64 = self.values.iter().zip(&other.values).map(|(a, b)| (a - b).norm_sqr()).sum();
        Ok((s * self.grid.spacing()).sqrt())
    }

    /// Unitary continuous transform onto the dual grid.
    pub fn fourier(&self) -> ComplexField1D {
        let plan = FftPair::new(self.grid.len());
        let values = continuous_forward(&plan, &self.grid, &self.values);
        ComplexField1D { grid: self.grid.dual(), values }
    }

    /// Inverse of [`fourier`](Self::fourier); `position` is the grid to land on,
    /// whose dual must be this field's grid.
    pub fn inverse_fourier(&self, position: &Grid1D) -> Result<ComplexField1D> {
        if !position.dual().matches(&self.grid) {
            return Err(DclError::GridMismatch("momentum grid is not the dual of the target grid".into()));
        }
        let plan = FftPair::new(position.len());
        let values = continuous_inverse(&plan, position, &self.values);
        Ok(ComplexField1D { grid: *position, values })
    }

    /// Squared mass in the outer `fraction` of the grid on each side.
    pub fn boundary_mass(&self, fraction: f64) -> f64 {
        let n = self.values.len();
        let m = ((n as f64 * fraction).ceil() as usize).clamp(1, n / 2);
        let s: f64 = self.values[..m].iter().chain(&self.values[n - m..]).map(|v| v.norm_sqr()).sum();
        s * self.grid.spacing()
    }

    /// Index of the sample with the largest modulus.
    pub fn argmax_modulus(&self) -> usize {
        let mut best = (0, f64::NEG_INFINITY);
        for (i, v) in self.values.iter().enumerate() {
            if v.norm_sqr() > best.1 {
                best = (i, v.norm_sqr());
            }
        }
        best.0
    }
}

/// Complex samples on a product grid; row-major with the `a` index outermost.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexField2D {
    grid_a: Grid1D,
    grid_b: Grid1D,
    values: Vec<Complex64>,
}

impl ComplexField2D {
    pub fn new(grid_a: Grid1D, grid_b: Grid1D, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid_a.len() * grid_b.len() {
            return Err(DclError::GridMismatch(format!(
                "{} values for a {}x{} grid",
                values.len(),
                grid_a.len(),
                grid_b.len()
            )));
        }
        Ok(Self { grid_a, grid_b, values })
    }

    pub fn zeros(grid_a: Grid1D, grid_b: Grid1D) -> Self {
        Self { grid_a, grid_b, values: vec![Complex64::new(0.0, 0.0); grid_a.len() * grid_b.len()] }
    }

    pub fn from_fn(grid_a: Grid1D, grid_b: Grid1D, f: impl Fn(f64, f64) -> Complex64) -> Self {
        let mut values = Vec::with_capacity(grid_a.len() * grid_b.len());
        for a in grid_a.points() {
            values.extend(grid_b.points().map(|b| f(a, b)));
        }
        Self { grid_a, grid_b, values }
    }

    pub fn grid_a(&self) -> &Grid1D {
        &self.grid_a
    }

    pub fn grid_b(&self) -> &Grid1D {
        &self.grid_b
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn get(&self, ia: usize, ib: usize) -> Complex64 {
        self.values[ia * self.grid_b.len() + ib]
    }

    pub fn row(&self, ia: usize) -> &[Complex64] {
        let nb = self.grid_b.len();
        &self.values[ia * nb..(ia + 1) * nb]
    }

    pub fn cell_area(&self) -> f64 {
        self.grid_a.spacing() * self.grid_b.spacing()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.cell_area() * self.values.iter().map(|v| v.norm_sqr()).sum::<f64>()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn normalize(&mut self) {
        let n = self.norm();
        if n > 0.0 {
            self.values.iter_mut().for_each(|v| *v /= n);
        }
    }

    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        self.check_same(other)?;
        let s: Complex64 = self.values.iter().zip(&other.values).map(|(a, b)| a.conj() * b).sum();
        Ok(s * self.cell_area())
    }

    pub fn l2_distance(&self, other: &Self) -> Result<f64> {
        self.check_same(other)?;
        let s: f64 = self.values.iter().zip(&other.values).map(|(a, b)| (a - b).norm_sqr()).sum();
        Ok((s * self.cell_area()).sqrt())
    }

    /// Pointwise difference `self - other`.
    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect();
        Ok(Self { grid_a: self.grid_a, grid_b: self.grid_b, values })
    }

    /// Squared mass within the outer `fraction` of either grid.
    pub fn boundary_mass(&self, fraction: f64) -> f64 {
        let (na, nb) = (self.grid_a.len(), self.grid_b.len());
        let ma = ((na as f64 * fraction).ceil() as usize).clamp(1, na / 2);
        let mb = ((nb as f64 * fraction).ceil() as usize).clamp(1, nb / 2);
        let mut s = 0.0;
        for ia in 0..na {
            let edge_a = ia < ma || ia >= na - ma;
            for (ib, v) in self.row(ia).iter().enumerate() {
                if edge_a || ib < mb || ib >= nb - mb {
                    s += v.norm_sqr();
                }
            }
        }
        s * self.cell_area()
    }

    /// Swaps the roles of the two axes.
    pub fn transposed(&self) -> Self {
        let (na, nb) = (self.grid_a.len(), self.grid_b.len());
        let mut values = vec![Complex64::new(0.0, 0.0); na * nb];
        for ia in 0..na {
            for ib in 0..nb {
                values[ib * na + ia] = self.values[ia * nb + ib];
            }
        }
        Self { grid_a: self.grid_b, grid_b: self.grid_a, values }
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        check_same(&self.grid_a, &other.grid_a)?;
        check_same(&self.grid_b, &other.grid_b)
    }
}

fn check_same(a: &Grid1D, b: &Grid1D) -> Result<()> {
    if a.matches(b) {
        Ok(())
    } else {
        Err(DclError::GridMismatch(format!(
            "[{}, {})x{} vs [{}, {})x{}",
            a.x_min(),
            a.x_max(),
            a.len(),
            b.x_min(),
            b.x_max(),
            b.len()
        )))
    }
}
