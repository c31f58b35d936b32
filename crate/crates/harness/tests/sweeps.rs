use std::path::Path;

use dcl::fields::ExperimentConfig;
use dcl_harness::sweep::{Column, RowStatus, SweepKind, SweepResult, SweepSpec};
use dcl_harness::{emit_plot_data, exit, parse_config, run_sweep, HarnessError, PlotStyle};

fn spec(kind: SweepKind, base: ExperimentConfig, dir: &Path) -> SweepSpec {
    SweepSpec::new(kind, base, kind.default_ladder(), dir.to_path_buf()).unwrap()
}

fn data_rows(path: &Path) -> usize {
    std::fs::read_to_string(path).unwrap().lines().filter(|l| !l.starts_with('#')).count()
}

#[test]
fn tables_do_not_depend_on_worker_count_or_rerun() {
    let base = ExperimentConfig::separated_regime();
    let dirs: Vec<_> = (0..3).map(|_| tempfile::tempdir().unwrap()).collect();
    let tables: Vec<Vec<u8>> = dirs
        .iter()
        .zip([1, 3, 3])
        .map(|(d, workers)| {
            let r = run_sweep(&spec(SweepKind::SigmaAlphaDecay, base, d.path()), workers).unwrap();
            assert_eq!(r.exit_code(), exit::OK);
            std::fs::read(d.path().join("sigma_alpha_decay.csv")).unwrap()
        })
        .collect();
    assert_eq!(tables[0], tables[1]);
    assert_eq!(tables[1], tables[2]);
    for i in 0..3 {
        assert!(dirs[0].path().join(format!("sigma_alpha_decay_point{i}.manifest")).exists());
    }
}

#[test]
fn mass_ratio_sweep_converges_at_first_order() {
    let dir = tempfile::tempdir().unwrap();
    let result = run_sweep(&spec(SweepKind::EpsilonRate, ExperimentConfig::default_regime(), dir.path()), 3).unwrap();
    assert_eq!(result.rows.len(), 3);
    assert!(result.rows.iter().all(|r| r.status == RowStatus::Ok));
    let errors = result.series(Column::NormError);
    assert!(errors.windows(2).all(|w| w[1].1 < w[0].1), "{errors:?}");
    let rate = result.fitted_rate.unwrap();
    assert!((0.6..=1.4).contains(&rate), "rate {rate}");

    let files = emit_plot_data(&result, PlotStyle::LogLog, dir.path()).unwrap();
    assert_eq!(data_rows(&dir.path().join("epsilon_rate_norm_error.dat")), 3);
    let gp = std::fs::read_to_string(dir.path().join("epsilon_rate.gp")).unwrap();
    assert!(gp.contains("set logscale xy") && gp.contains("epsilon_rate_norm_error.dat"));
    assert!(files.iter().all(|f| f.exists()));
}

#[test]
fn reflected_overlap_stays_under_its_bound() {
    let dir = tempfile::tempdir().unwrap();
    let result = run_sweep(&spec(SweepKind::DDecay, ExperimentConfig::separated_regime(), dir.path()), 2).unwrap();
    assert_eq!(result.exit_code(), exit::OK);
    assert_eq!(result.rows.len(), 4);
    for r in &result.rows {
        let (overlap, bound) = (r.get(Column::OverlapAbs).unwrap(), r.get(Column::OverlapBound).unwrap());
        assert!(overlap < bound, "d alpha {}: {overlap} vs {bound}", r.parameter);
        assert_eq!(2.0 * r.config.heavy_offset * r.config.alpha, r.parameter);
    }
    assert!(result.fitted_rate.unwrap() < -1.0);

    let linear = tempfile::tempdir().unwrap();
    emit_plot_data(&result, PlotStyle::Linear, linear.path()).unwrap();
    let gp = std::fs::read_to_string(linear.path().join("d_decay.gp")).unwrap();
    assert!(!gp.contains("logscale"));
    assert_eq!(data_rows(&linear.path().join("d_decay_overlap_abs.dat")), 4);
}

#[test]
fn residual_sweeps_track_their_terms() {
    let dir = tempfile::tempdir().unwrap();
    let base = ExperimentConfig::separated_regime();
    let sharp = run_sweep(&spec(SweepKind::Dq0Decay, base, dir.path()), 3).unwrap();
    assert_eq!(sharp.exit_code(), exit::OK);
    for r in &sharp.rows {
        assert!(r.get(Column::Zeta1Norm).unwrap().powi(2) <= r.get(Column::Zeta1Bound).unwrap() * (1.0 + 1e-6));
    }
    assert!(sharp.fitted_rate.unwrap() < -2.0);

    let recoil = run_sweep(&spec(SweepKind::SigmaAlphaDecay, base, dir.path()), 3).unwrap();
    let rate = recoil.fitted_rate.unwrap();
    assert!((rate - 1.0).abs() < 0.05, "recoil rate {rate}");
}

#[test]
fn uncoupled_run_is_degenerate() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = parse_config("alpha = 0").unwrap();
    let s = SweepSpec::new(SweepKind::SingleRun, cfg, vec![], dir.path().to_path_buf()).unwrap();
    let result = run_sweep(&s, 4).unwrap();
    assert_eq!(result.exit_code(), exit::OK);
    assert_eq!(result.rows.len(), 1);
    let row = &result.rows[0];
    assert!((row.get(Column::LambdaRe).unwrap() - 1.0).abs() < 1e-12);
    assert!(row.get(Column::LambdaIm).unwrap().abs() < 1e-12);
    assert!(row.get(Column::ResidualNorm).unwrap() < 1e-12);
    assert_eq!(row.get(Column::NormError), None);
    assert_eq!(result.fitted_rate, None);
}

#[test]
fn empty_results_write_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let empty = SweepResult { kind: SweepKind::DDecay, rows: vec![], fitted_rate: None };
    assert!(matches!(emit_plot_data(&empty, PlotStyle::LogLog, dir.path()), Err(HarnessError::EmptyResult)));
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 0);
}

#[test]
fn bad_ladders_are_config_errors() {
    let base = ExperimentConfig::separated_regime();
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_path_buf();
    for (kind, ladder) in [
        (SweepKind::EpsilonRate, vec![0.02, 0.01]),
        (SweepKind::EpsilonRate, vec![0.02, 0.01, 2.0]),
        (SweepKind::DDecay, vec![10.0, 20.0, 15.0]),
        (SweepKind::Dq0Decay, vec![-1.0, 10.0, 20.0]),
    ] {
        let err = SweepSpec::new(kind, base, ladder.clone(), out.clone()).unwrap_err();
        assert_eq!(err.exit_code(), exit::CONFIG_INVALID, "{kind} {ladder:?}");
    }
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 0);
}
