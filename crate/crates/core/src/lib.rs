//! Heavy/light two-particle dynamics with a point interaction.
//!
//! Units are ħ = M = 1 with the slow time `tau`; the light particle has mass
//! `epsilon` and sees the heavy one through `alpha δ(r - R)`.

pub mod asymptotics;
pub mod decoherence;
pub mod error;
pub mod exact;
pub mod fields;
pub mod scattering;

pub use error::{DclError, Result};
