use num_complex::Complex64;

use super::grid::Grid1D;
use super::packet::{Envelope, WavePacket};
use crate::error::{DclError, Result};

/// Physical parameters of one experiment, in units with ħ = M = 1 and the
/// slow time `tau`.
///
/// The heavy particle starts in `(f⁺ + f⁻)/sqrt(2)` with `f⁺` centred at
/// `-heavy_offset` moving right and `f⁻` centred at `+heavy_offset` moving left.
/// The light particle starts in one packet at `light_center`, left of both.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExperimentConfig {
    /// Mass ratio m/M.
    pub epsilon: f64,
    /// Delta coupling in the light particle's units (inverse length).
    pub alpha: f64,
    pub heavy_width: f64,
    pub heavy_offset: f64,
    pub heavy_momentum: f64,
    pub light_width: f64,
    pub light_center: f64,
    pub light_momentum: f64,
    pub tau: f64,
    pub envelope: Envelope,
}

impl ExperimentConfig {
    /// Regime used for exact-versus-asymptotic comparisons: every support
    /// condition holds, and the two-body field stays on desk-sized grids.
    pub fn default_regime() -> Self {
        Self {
            epsilon: 0.01,
            alpha: 2.0,
            heavy_width: 1.0,
            heavy_offset: 2.2,
            heavy_momentum: 1.0,
            light_width: 1.0,
            light_center: -4.3,
            light_momentum: 6.0,
            tau: 1.0,
            envelope: Envelope::Bump,
        }
    }

    /// Strongly separated regime (`|T(q0)|² = 1/2`, `delta q0 = 60`,
    /// `sigma alpha = 0.02`, `d alpha = 200`). Light-channel quantities are
    /// cheap here; the heavy packets are too narrow for two-body grids.
    pub fn separated_regime() -> Self {
        let (sigma, r0_heavy, delta) = (0.01, 50.0, 30.0);
        Self {
            epsilon: 0.01,
            alpha: 2.0,
            heavy_width: sigma,
            heavy_offset: r0_heavy,
            heavy_momentum: 1.0,
            light_width: delta,
            light_center: -r0_heavy - sigma - delta - 1.0,
            light_momentum: 2.0,
            tau: 1.0,
            envelope: Envelope::Bump,
        }
    }

    /// Checks the sign, range and support conditions. For the Gaussian
    /// envelope the supports are the six-width truncations.
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("heavy_width", self.heavy_width),
            ("heavy_offset", self.heavy_offset),
            ("heavy_momentum", self.heavy_momentum),
            ("light_width", self.light_width),
            ("light_momentum", self.light_momentum),
            ("tau", self.tau),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(DclError::InvalidConfig(format!("{name} must be positive and finite, got {v}")));
            }
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(DclError::InvalidConfig(format!("epsilon must lie in (0, 1), got {}", self.epsilon)));
        }
        if !(self.alpha >= 0.0 && self.alpha.is_finite()) {
            return Err(DclError::InvalidConfig(format!("alpha must be non-negative, got {}", self.alpha)));
        }
        if !self.light_center.is_finite() {
            return Err(DclError::InvalidConfig("light_center must be finite".into()));
        }
        let s = self.envelope.support_half_width();
        if self.heavy_offset <= 2.0 * s * self.heavy_width {
            return Err(DclError::InvalidConfig(format!(
                "heavy packets overlap: heavy_offset {} must exceed {}",
                self.heavy_offset,
                2.0 * s * self.heavy_width
            )));
        }
        let edge = -self.heavy_offset - s * self.heavy_width - s * self.light_width;
        if self.light_center >= edge {
            return Err(DclError::InvalidConfig(format!(
                "light packet must start left of the heavy packets: light_center {} must be below {edge}",
                self.light_center
            )));
        }
        Ok(())
    }

    /// Heavy-packet separation `d = 2 R0`.
    pub fn separation(&self) -> f64 {
        2.0 * self.heavy_offset
    }

    /// Light-particle time `tau / epsilon`.
    pub fn fast_time(&self) -> f64 {
        self.tau / self.epsilon
    }

    /// `delta q0`, the number of light wavelengths across its packet.
    pub fn light_sharpness(&self) -> f64 {
        self.light_width * self.light_momentum
    }

    /// `(f⁺, f⁻)`.
    pub fn heavy_packets(&self) -> (WavePacket, WavePacket) {
        let plus = WavePacket {
            envelope: self.envelope,
            width: self.heavy_width,
            center: -self.heavy_offset,
            momentum: self.heavy_momentum,
        };
        let minus = WavePacket {
            envelope: self.envelope,
            width: self.heavy_width,
            center: self.heavy_offset,
            momentum: -self.heavy_momentum,
        };
        (plus, minus)
    }

    pub fn light_packet(&self) -> WavePacket {
        WavePacket {
            envelope: self.envelope,
            width: self.light_width,
            center: self.light_center,
            momentum: self.light_momentum,
        }
    }

    /// Heavy initial state `(f⁺ + f⁻)/sqrt(2)` at `x`.
    pub fn heavy_value(&self, x: f64) -> Complex64 {
        let (p, m) = self.heavy_packets();
        (p.value(x) + m.value(x)) * std::f64::consts::FRAC_1_SQRT_2
    }

    /// Momentum-space light packet.
    pub fn light_fourier(&self, k: f64) -> Complex64 {
        self.light_packet().fourier(k)
    }

    /// Spectral mass of the light packet beyond `delta q0` on each side,
    /// `2 int_{delta q0}^inf |g~|²`.
    pub fn light_tail(&self) -> f64 {
        self.envelope.tail_mass(self.light_sharpness())
    }

    /// Flat `(key, value)` listing, the canonical text form of the config.
    pub fn entries(&self) -> Vec<(&'static str, String)> {
        vec![
            ("epsilon", fmt_f64(self.epsilon)),
            ("alpha", fmt_f64(self.alpha)),
            ("heavy_width", fmt_f64(self.heavy_width)),
            ("heavy_offset", fmt_f64(self.heavy_offset)),
            ("heavy_momentum", fmt_f64(self.heavy_momentum)),
            ("light_width", fmt_f64(self.light_width)),
            ("light_center", fmt_f64(self.light_center)),
            ("light_momentum", fmt_f64(self.light_momentum)),
            ("tau", fmt_f64(self.tau)),
            ("envelope", self.envelope.name().to_string()),
        ]
    }

    /// Sets one parameter by its key.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        if key == "envelope" {
            self.envelope = Envelope::from_name(value)
                .ok_or_else(|| DclError::InvalidConfig(format!("unknown envelope {value:?}")))?;
            return Ok(());
        }
        let v: f64 = value
            .trim()
            .parse()
            .map_err(|_| DclError::InvalidConfig(format!("{key}: cannot parse {value:?} as a number")))?;
        let slot = match key {
            "epsilon" => &mut self.epsilon,
            "alpha" => &mut self.alpha,
            "heavy_width" | "sigma" => &mut self.heavy_width,
            "heavy_offset" | "R0" => &mut self.heavy_offset,
            "heavy_momentum" | "P0" => &mut self.heavy_momentum,
            "light_width" | "delta" => &mut self.light_width,
            "light_center" | "r0" => &mut self.light_center,
            "light_momentum" | "q0" => &mut self.light_momentum,
            "tau" => &mut self.tau,
            _ => return Err(DclError::InvalidConfig(format!("unknown parameter {key:?}"))),
        };
        *slot = v;
        Ok(())
    }
}

/// Shortest text form that round-trips through `parse::<f64>`.
fn fmt_f64(v: f64) -> String {
    format!("{v:?}")
}

/// Grids for the asymptotic states: the light coordinate is sampled through
/// its asymptotic velocity `k = r / (tau/epsilon)`, the heavy one directly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticGrids {
    pub k: Grid1D,
    pub heavy: Grid1D,
}

/// Spectral mass allowed outside automatically sized grids.
pub const DEFAULT_GRID_TAIL: f64 = 1e-14;

impl AsymptoticGrids {
    /// Sizes both grids so that every packet component, including the recoil
    /// shift of reflected channels, is resolved up to spectral mass `tail`.
    pub fn auto(cfg: &ExperimentConfig, tail: f64, max_points: usize) -> Result<Self> {
        cfg.validate()?;
        let env = cfg.envelope;
        let z = env.spectral_cutoff(tail);
        let s = env.support_half_width();
        let k_reach = cfg.light_momentum + z / cfg.light_width;
        // products of two channels oscillate in k at rates up to the spread of
        // light and heavy positions; two samples per oscillation of the widest
        let phase_extent =
            cfg.light_center.abs() + s * cfg.light_width + 2.0 * (cfg.heavy_offset + s * cfg.heavy_width);
        let dk_max = std::f64::consts::PI / (2.0 * phase_extent);
        let n_k = ((2.0 * k_reach / dk_max).ceil() as usize).next_power_of_two().max(16);
        if n_k > max_points {
            return Err(DclError::InvalidGrid(format!("light grid needs {n_k} points, cap is {max_points}")));
        }
        let k = Grid1D::symmetric(k_reach, n_k)?;

        let heavy_spread = cfg.heavy_momentum + z / cfg.heavy_width;
        let recoil = 2.0 * k_reach;
        let half = cfg.heavy_offset
            + s * cfg.heavy_width
            + cfg.tau * (heavy_spread + recoil)
            + 2.0 * cfg.heavy_width;
        let heavy = Grid1D::sized_symmetric(half, heavy_spread + recoil, max_points)?;
        Ok(Self { k, heavy })
    }
}
