//! Grids, sampled complex fields, the unitary Fourier convention and the
//! initial-state factory.

mod config;
mod field;
mod grid;
pub mod io;
mod packet;
mod spectral;

pub use config::{AsymptoticGrids, ExperimentConfig, DEFAULT_GRID_TAIL};
pub use field::{ComplexField1D, ComplexField2D};
pub use grid::Grid1D;
pub use packet::{Envelope, WavePacket};
pub use spectral::{
    continuous_forward, continuous_inverse, derivative_symbol, free_symbol, sqrt_i, BandLimitedInterpolant,
    FftPair, HalfLineQuadrature,
};
