//! Two-column plot data and a gnuplot stub.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::{HarnessError, Result};
use crate::sweep::SweepResult;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotStyle {
    LogLog,
    Linear,
}

impl PlotStyle {
    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "loglog" => Some(Self::LogLog),
            "linear" => Some(Self::Linear),
            _ => None,
        }
    }
}

/// Writes `<sweep>_<quantity>.dat` per plotted column that has data, holding
/// raw `parameter value` pairs, plus `<sweep>.gp`. The style only changes the
/// axis directives in the stub. Returns the paths written.
pub fn emit_plot_data(result: &SweepResult, style: PlotStyle, dir: &Path) -> Result<Vec<PathBuf>> {
    if result.rows.is_empty() {
        return Err(HarnessError::EmptyResult);
    }
    let sweep = result.kind.name();
    let mut files = Vec::new();
    let mut plots = Vec::new();
    for &c in result.kind.plotted() {
        let series = result.series(c);
        if series.is_empty() {
            continue;
        }
        let name = format!("{sweep}_{}.dat", c.name());
        let mut text = format!("# {} {}\n", result.kind.parameter(), c.name());
        for (p, v) in series {
            writeln!(text, "{p:e} {v:e}").unwrap();
        }
        let path = dir.join(&name);
        std::fs::write(&path, text).map_err(|e| HarnessError::io(&path, e))?;
        plots.push(format!("'{name}' using 1:2 with linespoints title '{}'", c.name()));
        files.push(path);
    }
    let mut gp = String::from("set key left top\n");
    writeln!(gp, "set xlabel '{}'", result.kind.parameter()).unwrap();
    if style == PlotStyle::LogLog {
        gp.push_str("set logscale xy\n");
    }
    if let Some(rate) = result.fitted_rate {
        writeln!(gp, "# fitted rate {rate:e}").unwrap();
    }
    if !plots.is_empty() {
        writeln!(gp, "plot {}", plots.join(", \\\n     ")).unwrap();
    }
    let path = dir.join(format!("{sweep}.gp"));
    std::fs::write(&path, gp).map_err(|e| HarnessError::io(&path, e))?;
    files.push(path);
    Ok(files)
}
