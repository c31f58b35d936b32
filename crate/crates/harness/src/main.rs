use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use dcl::asymptotics::{psi_a, psi_e, zeta_bounds};
use dcl::decoherence::lambda_decomposition;
use dcl::fields::io::{write_field_1d, write_field_2d};
use dcl::fields::{AsymptoticGrids, ComplexField1D, ExperimentConfig, Grid1D};
use dcl::scattering::{reflection, transmission};
use dcl_harness::sweep::{SweepKind, SweepSpec};
use dcl_harness::{emit_plot_data, exit, load_config, run_sweep, HarnessError, PlotStyle, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Parser)]
#[command(name = "dcl", about = "Heavy/light scattering experiments", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Measure one config and write its table row.
    Run {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Run a ladder of configs, write the table and plot data.
    Sweep {
        /// epsilon_rate, dq0_decay, sigma_alpha_decay, d_decay or single_run
        #[arg(long)]
        sweep: String,
        #[arg(long)]
        config: Option<PathBuf>,
        /// Comma-separated ladder values; the sweep's default when omitted.
        #[arg(long, value_delimiter = ',')]
        ladder: Option<Vec<f64>>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        #[arg(long, default_value_t = 1)]
        workers: usize,
        /// loglog or linear
        #[arg(long, default_value = "loglog")]
        style: String,
    },
    /// Validate a config, print its decoherence report and probe the
    /// scattering identities at random points.
    Check {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Write the initial packets and both asymptotic states as binary fields.
    Dump {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    let code = match execute(Cli::parse().command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    };
    ExitCode::from(code as u8)
}

fn base_config(path: Option<&Path>, fallback: ExperimentConfig) -> Result<ExperimentConfig> {
    path.map_or(Ok(fallback), load_config)
}

fn execute(cmd: Command) -> Result<i32> {
    match cmd {
        Command::Run { config, out } => {
            let cfg = base_config(config.as_deref(), ExperimentConfig::separated_regime())?;
            let spec = SweepSpec::new(SweepKind::SingleRun, cfg, vec![], out)?;
            let result = run_sweep(&spec, 1)?;
            for row in &result.rows {
                println!("{} {}", row.config_hash, row.status.label());
            }
            Ok(result.exit_code())
        }
        Command::Sweep { sweep, config, ladder, out, workers, style } => {
            let kind = SweepKind::from_name(&sweep)
                .ok_or_else(|| HarnessError::Config(format!("unknown sweep {sweep:?}")))?;
            let style = PlotStyle::from_name(&style)
                .ok_or_else(|| HarnessError::Config(format!("unknown plot style {style:?}")))?;
            let fallback = if kind == SweepKind::EpsilonRate {
                ExperimentConfig::default_regime()
            } else {
                ExperimentConfig::separated_regime()
            };
            let cfg = base_config(config.as_deref(), fallback)?;
            let spec = SweepSpec::new(kind, cfg, ladder.unwrap_or_else(|| kind.default_ladder()), out.clone())?;
            let result = run_sweep(&spec, workers)?;
            emit_plot_data(&result, style, &out)?;
            for row in &result.rows {
                println!("{kind} {}={:e} {}", kind.parameter(), row.parameter, row.status.label());
            }
            if let Some(rate) = result.fitted_rate {
                println!("fitted rate {rate:.4}");
            }
            Ok(result.exit_code())
        }
        Command::Check { config, seed } => check(&base_config(config.as_deref(), ExperimentConfig::separated_regime())?, seed),
        Command::Dump { config, out } => {
            dump(&base_config(config.as_deref(), ExperimentConfig::separated_regime())?, &out)?;
            Ok(exit::OK)
        }
    }
}

const PROBES: usize = 1000;
const PROBE_TOLERANCE: f64 = 1e-12;

fn check(cfg: &ExperimentConfig, seed: u64) -> Result<i32> {
    let report = lambda_decomposition(cfg)?;
    print!("{}", report.to_record());
    let (b1, b2) = zeta_bounds(cfg);
    println!("zeta1_bound_sq = {b1:e}\nzeta_recoil_bound_sq = {b2:e}");
    let mut violations = report.violations();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..PROBES {
        let alpha = 10f64.powf(rng.gen_range(-3.0..4.0));
        let k = rng.gen_range(-50.0..50.0);
        let (r, t) = (reflection(alpha, k), transmission(alpha, k));
        worst = worst
            .max((r.norm_sqr() + t.norm_sqr() - 1.0).abs())
            .max((t - r - 1.0).norm())
            .max((reflection(alpha, -k) - r).norm());
    }
    println!("scattering_identity_defect = {worst:e}");
    if worst > PROBE_TOLERANCE {
        violations.push(format!("scattering identities fail by {worst:e}"));
    }
    for v in &violations {
        eprintln!("violation: {v}");
    }
    Ok(if violations.is_empty() { exit::OK } else { exit::INVARIANT_VIOLATION })
}

const DUMP_TAIL: f64 = 1e-8;
const DUMP_CAP: usize = 1 << 13;
const LIGHT_POINTS: usize = 1024;

fn dump(cfg: &ExperimentConfig, out: &Path) -> Result<()> {
    std::fs::create_dir_all(out).map_err(|e| HarnessError::io(out, e))?;
    let grids = AsymptoticGrids::auto(cfg, DUMP_TAIL, DUMP_CAP)?;
    let heavy = ComplexField1D::from_fn(grids.heavy, |x| cfg.heavy_value(x));
    let packet = cfg.light_packet();
    let (lo, hi) = packet.support();
    let pad = 0.5 * (hi - lo);
    let light = packet.sample(&Grid1D::new(lo - pad, hi + pad, LIGHT_POINTS)?)?;
    let create = |name: &str| -> Result<BufWriter<File>> {
        let path = out.join(name);
        File::create(&path).map(BufWriter::new).map_err(|e| HarnessError::io(&path, e))
    };
    write_field_1d(&mut create("heavy_initial.dcl")?, &heavy)?;
    write_field_1d(&mut create("light_initial.dcl")?, &light)?;
    write_field_2d(&mut create("psi_a.dcl")?, &psi_a(cfg, &grids)?.amplitude)?;
    write_field_2d(&mut create("psi_e.dcl")?, &psi_e(cfg, &grids)?.amplitude)?;
    Ok(())
}
