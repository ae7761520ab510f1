//! CSV and SVG emitters. Numbers are formatted with six significant
//! digits in a fixed, locale-free way, so equal inputs always produce
//! byte-identical files.

use crate::scenario::{CapacityCdf, CoverageGrid, SweepRecord, TraceRow};
use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum OutputError {
    #[error("cannot write {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// Formats `x` with `sig` significant digits, trimming trailing zeros;
/// magnitudes outside `[1e-4, 10^sig)` switch to scientific notation.
pub fn fmt_sig(x: f64, sig: usize) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let exp = x.abs().log10().floor() as i32;
    if exp < -4 || exp >= sig as i32 {
        let s = format!("{:.*e}", sig.saturating_sub(1), x);
        match s.find('e') {
            Some(pos) => {
                let (mantissa, e) = s.split_at(pos);
                let mantissa = mantissa.trim_end_matches('0').trim_end_matches('.');
                format!("{mantissa}{e}")
            }
            None => s,
        }
    } else {
        let decimals = (sig as i32 - 1 - exp).max(0) as usize;
        let s = format!("{x:.decimals$}");
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    }
}

fn g6(x: f64) -> String {
    fmt_sig(x, 6)
}

fn write_file(path: &Path, content: &str) -> Result<(), OutputError> {
    fs::write(path, content).map_err(|source| OutputError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Sweep CSV: one row per grid point.
pub fn write_sweep_csv(records: &[SweepRecord], path: &Path) -> Result<(), OutputError> {
    let mut out = String::from(
        "variable,value,trials,mean_sub_capacity_bps,mean_sys_capacity_bps,ne_femto_count_mean,revenue_mean,outage_mean,utilization_mean,ci_halfwidth\n",
    );
    for r in records {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            r.variable,
            g6(r.value),
            r.trials,
            g6(r.mean_sub_capacity_bps),
            g6(r.mean_sys_capacity_bps),
            g6(r.ne_femto_count_mean),
            g6(r.revenue_mean),
            g6(r.outage_mean),
            g6(r.utilization_mean),
            g6(r.ci_halfwidth),
        );
    }
    write_file(path, &out)
}

/// Grid CSV: one row per cell with the best-server loss and power.
pub fn write_grid_csv(grid: &CoverageGrid, path: &Path) -> Result<(), OutputError> {
    let mut out = String::from("x_m,y_m,loss_db,rp_dbm,server\n");
    for c in &grid.cells {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            g6(c.x_m),
            g6(c.y_m),
            g6(c.loss_db),
            g6(c.rp_dbm),
            c.server.label(),
        );
    }
    write_file(path, &out)
}

/// CDF CSV: sorted capacity samples with cumulative fractions.
pub fn write_cdf_csv(cdf: &CapacityCdf, path: &Path) -> Result<(), OutputError> {
    let mut out = String::from("metric,value_bps,cum_prob\n");
    for p in &cdf.subscriber {
        let _ = writeln!(out, "subscriber,{},{}", g6(p.value_bps), g6(p.cum_prob));
    }
    for p in &cdf.system {
        let _ = writeln!(out, "system,{},{}", g6(p.value_bps), g6(p.cum_prob));
    }
    write_file(path, &out)
}

/// Allocation trace CSV: one row per replayed event.
pub fn write_trace_csv(rows: &[TraceRow], path: &Path) -> Result<(), OutputError> {
    let mut out = String::from(
        "event,kind,outcome,voice_used,data_used,borrows,lighting,utilization\n",
    );
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            r.event,
            r.kind,
            r.outcome,
            r.voice_used,
            r.data_used,
            r.borrows,
            if r.lighting { 1 } else { 0 },
            g6(r.utilization),
        );
    }
    write_file(path, &out)
}

/// Which grid field an SVG heatmap renders.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridField {
    LossDb,
    RpDbm,
}

// Three-stop blue -> yellow -> red ramp over the value range.
fn color_of(value: f64, min: f64, max: f64) -> String {
    let t = if max > min { ((value - min) / (max - min)).clamp(0.0, 1.0) } else { 0.5 };
    let (r, g, b) = if t < 0.5 {
        let u = t * 2.0;
        (38.0 + u * (250.0 - 38.0), 70.0 + u * (220.0 - 70.0), 160.0 * (1.0 - u) + 60.0 * u)
    } else {
        let u = (t - 0.5) * 2.0;
        (250.0 - u * 60.0, 220.0 * (1.0 - u) + 40.0 * u, 60.0 * (1.0 - u) + 40.0 * u)
    };
    format!("#{:02x}{:02x}{:02x}", r as u8, g as u8, b as u8)
}

/// Self-contained SVG heatmap of one grid field, one rectangle per cell.
pub fn write_grid_svg(grid: &CoverageGrid, field: GridField, path: &Path) -> Result<(), OutputError> {
    let value = |c: &crate::scenario::GridCell| match field {
        GridField::LossDb => c.loss_db,
        GridField::RpDbm => c.rp_dbm,
    };
    let min = grid.cells.iter().map(|c| value(c)).fold(f64::INFINITY, f64::min);
    let max = grid.cells.iter().map(|c| value(c)).fold(f64::NEG_INFINITY, f64::max);

    let cell_px = 8usize;
    let width = grid.nx * cell_px;
    let height = grid.ny * cell_px;
    let mut out = String::new();
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\" viewBox=\"0 0 {width} {height}\">"
    );
    let _ = writeln!(
        out,
        "<title>{} over [{}, {}]</title>",
        match field {
            GridField::LossDb => "loss_db",
            GridField::RpDbm => "rp_dbm",
        },
        g6(min),
        g6(max),
    );
    for iy in 0..grid.ny {
        for ix in 0..grid.nx {
            let c = grid.cell(ix, iy);
            // SVG y axis points down; flip so north stays up.
            let px = ix * cell_px;
            let py = (grid.ny - 1 - iy) * cell_px;
            let _ = writeln!(
                out,
                "<rect x=\"{px}\" y=\"{py}\" width=\"{cell_px}\" height=\"{cell_px}\" fill=\"{}\"/>",
                color_of(value(c), min, max),
            );
        }
    }
    let _ = writeln!(out, "</svg>");
    write_file(path, &out)
}
