//! Ladders of experiments and their result tables.

use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use dcl::asymptotics::{entangled_residual_norm_auto, zeta_bounds, PointwiseAsymptotics, Provenance, ResidualNorms};
use dcl::decoherence::{lambda_decomposition, DecoherenceReport};
use dcl::exact::{compare_in_cm_frame, evolve_exact, ExactFrame, ExactGrids};
use dcl::fields::{ExperimentConfig, DEFAULT_GRID_TAIL};
use dcl::DclError;

use crate::config::{canonical_text, config_hash};
use crate::error::{core_exit_code, exit, HarnessError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepKind {
    /// Ladder over the mass ratio; tracks the exact-versus-asymptotic error.
    EpsilonRate,
    /// Ladder over `δ q0` at fixed `δ`; tracks the slow-spectrum term ‖ζ₁‖.
    Dq0Decay,
    /// Ladder over `σ α` at fixed `α`; tracks the recoil term ‖ζ₂‖.
    SigmaAlphaDecay,
    /// Ladder over `d α` at fixed `α`; tracks the reflected overlap.
    DDecay,
    /// The base config alone.
    SingleRun,
}

impl SweepKind {
    pub const ALL: [SweepKind; 5] =
        [Self::EpsilonRate, Self::Dq0Decay, Self::SigmaAlphaDecay, Self::DDecay, Self::SingleRun];

    pub fn name(self) -> &'static str {
        match self {
            Self::EpsilonRate => "epsilon_rate",
            Self::Dq0Decay => "dq0_decay",
            Self::SigmaAlphaDecay => "sigma_alpha_decay",
            Self::DDecay => "d_decay",
            Self::SingleRun => "single_run",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == s)
    }

    /// What a ladder value means.
    pub fn parameter(self) -> &'static str {
        match self {
            Self::EpsilonRate => "epsilon",
            Self::Dq0Decay => "delta_q0",
            Self::SigmaAlphaDecay => "sigma_alpha",
            Self::DDecay => "d_alpha",
            Self::SingleRun => "none",
        }
    }

    pub fn default_ladder(self) -> Vec<f64> {
        match self {
            Self::EpsilonRate => vec![1.0 / 50.0, 1.0 / 100.0, 1.0 / 200.0],
            Self::Dq0Decay => vec![30.0, 60.0, 120.0],
            Self::SigmaAlphaDecay => vec![0.02, 0.01, 0.005],
            Self::DDecay => vec![10.0, 20.0, 40.0, 80.0],
            Self::SingleRun => vec![],
        }
    }

    /// Column whose log is regressed on the log of the ladder value.
    pub fn tracked(self) -> Option<Column> {
        match self {
            Self::EpsilonRate => Some(Column::NormError),
            Self::Dq0Decay => Some(Column::Zeta1Norm),
            Self::SigmaAlphaDecay => Some(Column::Zeta2Norm),
            Self::DDecay => Some(Column::OverlapAbs),
            Self::SingleRun => None,
        }
    }

    /// Columns written as plot data.
    pub fn plotted(self) -> &'static [Column] {
        match self {
            Self::EpsilonRate => &[Column::NormError, Column::ExactNormDrift],
            Self::Dq0Decay | Self::SigmaAlphaDecay => {
                &[Column::ResidualNorm, Column::Zeta1Norm, Column::Zeta2Norm, Column::Zeta3Norm]
            }
            Self::DDecay => &[Column::OverlapAbs, Column::OverlapBound, Column::LambdaAbs, Column::TransmissionProbability],
            Self::SingleRun => &[Column::LambdaAbs, Column::ResidualNorm],
        }
    }

    /// The base config with one ladder value applied. Moving the heavy
    /// packets or changing their width keeps the light packet's clearance
    /// from the left heavy packet.
    pub fn apply(self, base: &ExperimentConfig, value: f64) -> Result<ExperimentConfig> {
        let mut cfg = *base;
        let per_alpha = || {
            if base.alpha > 0.0 {
                Ok(value / base.alpha)
            } else {
                Err(HarnessError::Config(format!("{} needs alpha > 0", self.name())))
            }
        };
        match self {
            Self::EpsilonRate => cfg.epsilon = value,
            Self::Dq0Decay => cfg.light_momentum = value / base.light_width,
            Self::SigmaAlphaDecay => cfg.heavy_width = per_alpha()?,
            Self::DDecay => cfg.heavy_offset = 0.5 * per_alpha()?,
            Self::SingleRun => {}
        }
        cfg.light_center = left_edge(&cfg) - (left_edge(base) - base.light_center);
        cfg.validate()
            .map_err(|e| HarnessError::Config(format!("{} = {value}: {e}", self.parameter())))?;
        Ok(cfg)
    }
}

impl fmt::Display for SweepKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Rightmost admissible light centre.
fn left_edge(cfg: &ExperimentConfig) -> f64 {
    let s = cfg.envelope.support_half_width();
    -cfg.heavy_offset - s * cfg.heavy_width - s * cfg.light_width
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub kind: SweepKind,
    pub base: ExperimentConfig,
    pub ladder: Vec<f64>,
    pub outputs: PathBuf,
}

impl SweepSpec {
    /// Checks the ladder and every derived config; nothing is computed.
    pub fn new(kind: SweepKind, base: ExperimentConfig, ladder: Vec<f64>, outputs: PathBuf) -> Result<Self> {
        base.validate().map_err(|e| HarnessError::Config(e.to_string()))?;
        if kind == SweepKind::SingleRun {
            if !ladder.is_empty() {
                return Err(HarnessError::Config("single_run takes no ladder".into()));
            }
        } else {
            if ladder.len() < 3 {
                return Err(HarnessError::Config(format!("{kind} needs at least 3 ladder points, got {}", ladder.len())));
            }
            if ladder.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
                return Err(HarnessError::Config(format!("{kind} ladder values must be positive")));
            }
            let up = ladder.windows(2).all(|w| w[1] > w[0]);
            let down = ladder.windows(2).all(|w| w[1] < w[0]);
            if !(up || down) {
                return Err(HarnessError::Config(format!("{kind} ladder must be strictly monotone")));
            }
        }
        let spec = Self { kind, base, ladder, outputs };
        spec.points()?;
        Ok(spec)
    }

    /// `(ladder value, config)` per point; single runs have one point with
    /// value 0.
    pub fn points(&self) -> Result<Vec<(f64, ExperimentConfig)>> {
        if self.kind == SweepKind::SingleRun {
            return Ok(vec![(0.0, self.base)]);
        }
        self.ladder.iter().map(|&v| Ok((v, self.kind.apply(&self.base, v)?))).collect()
    }
}

/// CSV columns after the fixed leading ones.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Column {
    LambdaRe,
    LambdaIm,
    LambdaAbs,
    TransmissionProbability,
    OverlapRe,
    OverlapIm,
    OverlapAbs,
    OverlapBound,
    Tail,
    ResidualNorm,
    Zeta1Norm,
    Zeta2Norm,
    Zeta3Norm,
    Zeta1Bound,
    ZetaRecoilBound,
    NormError,
    ExactNormDrift,
}

impl Column {
    pub const ALL: [Column; 17] = [
        Self::LambdaRe,
        Self::LambdaIm,
        Self::LambdaAbs,
        Self::TransmissionProbability,
        Self::OverlapRe,
        Self::OverlapIm,
        Self::OverlapAbs,
        Self::OverlapBound,
        Self::Tail,
        Self::ResidualNorm,
        Self::Zeta1Norm,
        Self::Zeta2Norm,
        Self::Zeta3Norm,
        Self::Zeta1Bound,
        Self::ZetaRecoilBound,
        Self::NormError,
        Self::ExactNormDrift,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::LambdaRe => "lambda_re",
            Self::LambdaIm => "lambda_im",
            Self::LambdaAbs => "lambda_abs",
            Self::TransmissionProbability => "transmission_probability",
            Self::OverlapRe => "overlap_re",
            Self::OverlapIm => "overlap_im",
            Self::OverlapAbs => "overlap_abs",
            Self::OverlapBound => "overlap_bound",
            Self::Tail => "tail",
            Self::ResidualNorm => "residual_norm",
            Self::Zeta1Norm => "zeta1_norm",
            Self::Zeta2Norm => "zeta2_norm",
            Self::Zeta3Norm => "zeta3_norm",
            Self::Zeta1Bound => "zeta1_bound",
            Self::ZetaRecoilBound => "zeta_recoil_bound",
            Self::NormError => "norm_error",
            Self::ExactNormDrift => "exact_norm_drift",
        }
    }
}

/// Everything measured at one ladder point.
#[derive(Debug, Clone, PartialEq)]
pub struct Measurements {
    pub report: DecoherenceReport,
    pub residual: ResidualNorms,
    /// `(‖ζ₁‖² bound, ‖ζ₂‖², ‖ζ₃‖² bound)`.
    pub zeta_bounds: (f64, f64),
    /// `‖ψ^ε - ψ^a‖` and `|‖ψ^ε‖ - 1|` of the exact state, for mass-ratio sweeps.
    pub exact: Option<(f64, f64)>,
}

impl Measurements {
    pub fn get(&self, c: Column) -> Option<f64> {
        let r = &self.report;
        Some(match c {
            Column::LambdaRe => r.lambda.re,
            Column::LambdaIm => r.lambda.im,
            Column::LambdaAbs => r.lambda.norm(),
            Column::TransmissionProbability => r.transmission_probability,
            Column::OverlapRe => r.overlap.re,
            Column::OverlapIm => r.overlap.im,
            Column::OverlapAbs => r.overlap.norm(),
            Column::OverlapBound => r.bound,
            Column::Tail => r.tail,
            Column::ResidualNorm => self.residual.total,
            Column::Zeta1Norm => self.residual.zeta1,
            Column::Zeta2Norm => self.residual.zeta2,
            Column::Zeta3Norm => self.residual.zeta3,
            Column::Zeta1Bound => self.zeta_bounds.0,
            Column::ZetaRecoilBound => self.zeta_bounds.1,
            Column::NormError => self.exact?.0,
            Column::ExactNormDrift => self.exact?.1,
        })
    }

    /// Failed invariants, one line each.
    pub fn violations(&self) -> Vec<String> {
        let mut out = self.report.violations();
        let (b1, b2) = self.zeta_bounds;
        let slack = dcl::decoherence::REPORT_SLACK;
        if self.residual.zeta1.powi(2) > b1 + slack {
            out.push(format!("|zeta1|² = {:e} exceeds {b1:e}", self.residual.zeta1.powi(2)));
        }
        for (name, z) in [("zeta2", self.residual.zeta2), ("zeta3", self.residual.zeta3)] {
            if z * z > b2 + slack {
                out.push(format!("|{name}|² = {:e} exceeds {b2:e}", z * z));
            }
        }
        if let Some((_, drift)) = self.exact {
            if drift > EXACT_NORM_SLACK {
                out.push(format!("exact norm drift {drift:e} exceeds {EXACT_NORM_SLACK:e}"));
            }
        }
        out
    }
}

/// Allowed norm drift of the exact state in the far-field frame.
pub const EXACT_NORM_SLACK: f64 = 1e-5;

#[derive(Debug, Clone, PartialEq)]
pub enum RowStatus {
    Ok,
    Violation(Vec<String>),
    /// The point could not be computed; carries the exit status it maps to.
    Failed { code: i32, message: String },
}

impl RowStatus {
    pub fn label(&self) -> String {
        match self {
            Self::Ok => "ok".into(),
            Self::Violation(v) => format!("violation: {}", v.join("; ")),
            Self::Failed { message, .. } => format!("failed: {message}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub index: usize,
    pub parameter: f64,
    pub config: ExperimentConfig,
    pub config_hash: String,
    pub status: RowStatus,
    pub measurements: Option<Measurements>,
    pub runtime_s: f64,
}

impl SweepRow {
    pub fn get(&self, c: Column) -> Option<f64> {
        self.measurements.as_ref().and_then(|m| m.get(c))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub kind: SweepKind,
    pub rows: Vec<SweepRow>,
    /// Least-squares slope of log(tracked) against log(parameter), present
    /// when at least three rows produced the tracked column.
    pub fitted_rate: Option<f64>,
}

impl SweepResult {
    pub fn exit_code(&self) -> i32 {
        if self.rows.iter().any(|r| matches!(r.status, RowStatus::Violation(_))) {
            return exit::INVARIANT_VIOLATION;
        }
        self.rows
            .iter()
            .filter_map(|r| match r.status {
                RowStatus::Failed { code, .. } => Some(code),
                _ => None,
            })
            .max()
            .unwrap_or(exit::OK)
    }

    /// `(parameter, value)` of every row that has column `c`.
    pub fn series(&self, c: Column) -> Vec<(f64, f64)> {
        self.rows.iter().filter_map(|r| r.get(c).map(|v| (r.parameter, v))).collect()
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let csv_err = |source| HarnessError::Csv { path: path.to_path_buf(), source };
        let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
        let mut header = vec!["sweep", "index", "parameter", "config_hash", "status"];
        header.extend(Column::ALL.iter().map(|c| c.name()));
        w.write_record(&header).map_err(csv_err)?;
        for r in &self.rows {
            let mut rec = vec![self.kind.name().to_string(), r.index.to_string(), fmt_f64(r.parameter), r.config_hash.clone(), r.status.label()];
            rec.extend(Column::ALL.iter().map(|&c| r.get(c).map(fmt_f64).unwrap_or_default()));
            w.write_record(&rec).map_err(csv_err)?;
        }
        w.flush().map_err(|e| HarnessError::io(path, e))
    }
}

/// Shortest round-trip form, so equal numbers give equal bytes.
fn fmt_f64(v: f64) -> String {
    format!("{v:e}")
}

/// Spectral mass left out of the residual quadrature.
pub const RESIDUAL_TAIL: f64 = DEFAULT_GRID_TAIL;
const RESIDUAL_CAP: usize = 1 << 18;

/// Every quantity of one config. The exact solver runs only for mass-ratio
/// sweeps.
pub fn measure(kind: SweepKind, cfg: &ExperimentConfig) -> Result<Measurements, DclError> {
    let report = lambda_decomposition(cfg)?;
    let residual = entangled_residual_norm_auto(cfg, RESIDUAL_TAIL, RESIDUAL_CAP)?;
    let exact = if kind == SweepKind::EpsilonRate { Some(exact_error(cfg)?) } else { None };
    Ok(Measurements { report, residual, zeta_bounds: zeta_bounds(cfg), exact })
}

/// `(‖ψ^ε - ψ^a‖, |‖ψ^ε‖ - 1|)` at `cfg.tau`, compared in the far-field frame.
pub fn exact_error(cfg: &ExperimentConfig) -> Result<(f64, f64), DclError> {
    let state = evolve_exact(cfg, &ExactGrids::far_field_default(), cfg.tau, ExactFrame::Lens)?;
    let table = PointwiseAsymptotics::auto_table(cfg, 1e-12, 1 << 15)?;
    let asym = PointwiseAsymptotics::new(cfg, &table)?;
    Ok((compare_in_cm_frame(&state, &asym, Provenance::Recoiled)?, (state.norm() - 1.0).abs()))
}

fn run_point(kind: SweepKind, index: usize, parameter: f64, cfg: ExperimentConfig) -> SweepRow {
    let t0 = Instant::now();
    let (status, measurements) = match measure(kind, &cfg) {
        Ok(m) => {
            let v = m.violations();
            (if v.is_empty() { RowStatus::Ok } else { RowStatus::Violation(v) }, Some(m))
        }
        Err(e) => (RowStatus::Failed { code: core_exit_code(&e), message: e.to_string() }, None),
    };
    SweepRow {
        index,
        parameter,
        config_hash: config_hash(&cfg),
        config: cfg,
        status,
        measurements,
        runtime_s: t0.elapsed().as_secs_f64(),
    }
}

/// Runs every ladder point on up to `workers` threads, writes
/// `<outputs>/<kind>.csv` and one manifest per point, and fits the rate.
/// Failed points are recorded and the sweep goes on.
pub fn run_sweep(spec: &SweepSpec, workers: usize) -> Result<SweepResult> {
    let points = spec.points()?;
    std::fs::create_dir_all(&spec.outputs).map_err(|e| HarnessError::io(&spec.outputs, e))?;
    let slots: Mutex<Vec<Option<SweepRow>>> = Mutex::new(vec![None; points.len()]);
    let next = AtomicUsize::new(0);
    let manifest_error: Mutex<Option<HarnessError>> = Mutex::new(None);
    std::thread::scope(|s| {
        for _ in 0..workers.clamp(1, points.len().max(1)) {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::SeqCst);
                let Some(&(value, cfg)) = points.get(i) else { break };
                let row = run_point(spec.kind, i, value, cfg);
                if let Err(e) = write_manifest(spec, &row) {
                    manifest_error.lock().unwrap().get_or_insert(e);
                }
                slots.lock().unwrap()[i] = Some(row);
            });
        }
    });
    if let Some(e) = manifest_error.into_inner().unwrap() {
        return Err(e);
    }
    let rows: Vec<SweepRow> = slots.into_inner().unwrap().into_iter().map(|r| r.expect("every point ran")).collect();
    let mut result = SweepResult { kind: spec.kind, rows, fitted_rate: None };
    if let Some(c) = spec.kind.tracked() {
        let pts: Vec<(f64, f64)> = result.series(c).into_iter().filter(|&(p, v)| p > 0.0 && v > 0.0).collect();
        if pts.len() >= 3 {
            result.fitted_rate = Some(log_log_slope(&pts));
        }
    }
    result.write_csv(&spec.outputs.join(format!("{}.csv", spec.kind)))?;
    Ok(result)
}

/// Least-squares slope of `ln v` against `ln p`.
pub fn log_log_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

fn write_manifest(spec: &SweepSpec, row: &SweepRow) -> Result<()> {
    let path = spec.outputs.join(format!("{}_point{}.manifest", spec.kind, row.index));
    let stamp = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    let mut text = format!(
        "sweep = {}\nindex = {}\n{} = {}\nconfig_hash = {}\nstatus = {}\nruntime_s = {:.3}\nunix_time = {stamp}\n",
        spec.kind,
        row.index,
        spec.kind.parameter(),
        fmt_f64(row.parameter),
        row.config_hash,
        row.status.label(),
        row.runtime_s,
    );
    text.push_str("# config\n");
    text.push_str(&canonical_text(&row.config));
    if let Some(m) = &row.measurements {
        text.push_str("# decoherence report\n");
        text.push_str(&m.report.to_record());
    }
    let mut f = std::fs::File::create(&path).map_err(|e| HarnessError::io(&path, e))?;
    f.write_all(text.as_bytes()).map_err(|e| HarnessError::io(&path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ladders_are_checked_before_anything_runs() {
        let base = ExperimentConfig::separated_regime();
        let out = PathBuf::from("unused");
        assert!(SweepSpec::new(SweepKind::DDecay, base, vec![10.0, 20.0], out.clone()).is_err());
        assert!(SweepSpec::new(SweepKind::DDecay, base, vec![10.0, 40.0, 20.0], out.clone()).is_err());
        assert!(SweepSpec::new(SweepKind::DDecay, base, vec![10.0, 10.0, 20.0], out.clone()).is_err());
        assert!(SweepSpec::new(SweepKind::SingleRun, base, vec![1.0], out.clone()).is_err());
        assert!(SweepSpec::new(SweepKind::DDecay, base, vec![80.0, 40.0, 20.0], out.clone()).is_ok());
        // σα = 5 makes the heavy packets overlap
        assert!(matches!(
            SweepSpec::new(SweepKind::SigmaAlphaDecay, base, vec![0.01, 0.1, 5.0e3], out),
            Err(HarnessError::Config(_))
        ));
    }

    #[test]
    fn ladder_values_land_on_the_named_parameter() {
        let base = ExperimentConfig::separated_regime();
        let c = SweepKind::DDecay.apply(&base, 40.0).unwrap();
        assert_eq!(2.0 * c.heavy_offset * c.alpha, 40.0);
        assert!((left_edge(&c) - c.light_center - (left_edge(&base) - base.light_center)).abs() < 1e-12);
        let c = SweepKind::Dq0Decay.apply(&base, 120.0).unwrap();
        assert!((c.light_width * c.light_momentum - 120.0).abs() < 1e-12);
        let c = SweepKind::SigmaAlphaDecay.apply(&base, 0.01).unwrap();
        assert!((c.heavy_width * c.alpha - 0.01).abs() < 1e-15);
        let mut free = base;
        free.alpha = 0.0;
        assert!(SweepKind::DDecay.apply(&free, 10.0).is_err());
    }

    #[test]
    fn slope_of_a_power_law() {
        let pts: Vec<(f64, f64)> = [1.0, 2.0, 4.0, 8.0].iter().map(|&p: &f64| (p, 3.0 * p.powf(-1.5))).collect();
        assert!((log_log_slope(&pts) + 1.5).abs() < 1e-12);
    }
}
