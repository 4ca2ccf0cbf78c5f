//! Grid and trajectory serialization.
//!
//! Grid CSV layout:
//!
//! ```text
//! #! left-well population over (dphi_dc, phi_rf)
//! #! units: dphi_dc and phi_rf in mΦ₀, p_left dimensionless; frequencies, gaps and rates in GHz, temperature in K
//! # slopes.m0 = -1.44
//! # ...                       (full canonical config, see `RunConfig::to_config_text`)
//! dphi_dc,phi_rf,p_left
//! 0.000000000000e0,0.000000000000e0,1.234567890123e-3
//! ```
//!
//! Data rows run over `dphi_dc` fastest, `phi_rf` slowest. Numbers carry 13
//! significant digits, so a value read back and rewritten gives the same bytes.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::config::{parse_config_str, RunConfig};
use crate::dynamics::Trajectory;
use crate::error::{Error, Result};
use crate::sweep::SweepGrid;

pub const GRID_HEADER: &str = "dphi_dc,phi_rf,p_left";
pub const TRAJECTORY_HEADER: &str = "t_ns,p0,p1,p2,p3";

const GRID_BANNER: &str = "#! left-well population over (dphi_dc, phi_rf)\n\
#! units: dphi_dc and phi_rf in mΦ₀, p_left dimensionless; frequencies, gaps and rates in GHz, temperature in K\n";

/// Fixed 13-significant-digit scientific notation.
pub fn format_value(x: f64) -> String {
    format!("{x:.12e}")
}

pub fn grid_csv_string(grid: &SweepGrid) -> String {
    let spec = &grid.spec;
    let mut s = String::with_capacity(64 * grid.values.len() + 1024);
    s.push_str(GRID_BANNER);
    for line in RunConfig::of_grid(grid).to_config_text().lines() {
        writeln!(s, "# {line}").unwrap();
    }
    s.push_str(GRID_HEADER);
    s.push('\n');
    for iy in 0..spec.phi_rf_steps {
        let y = format_value(spec.phi_rf(iy));
        for ix in 0..spec.dphi_steps {
            writeln!(
                s,
                "{},{},{}",
                format_value(spec.dphi(ix)),
                y,
                format_value(grid.at(ix, iy))
            )
            .unwrap();
        }
    }
    s
}

pub fn write_grid_csv(grid: &SweepGrid, path: &Path) -> Result<()> {
    fs::write(path, grid_csv_string(grid)).map_err(|e| Error::io(path, e))
}

/// Parses a grid written by [`write_grid_csv`].
pub fn parse_grid_csv(text: &str) -> Result<SweepGrid> {
    let mut config = String::new();
    let mut lines = text.lines();
    let mut header = None;
    for line in lines.by_ref() {
        if line.starts_with("#!") {
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            config.push_str(rest.strip_prefix(' ').unwrap_or(rest));
            config.push('\n');
            continue;
        }
        header = Some(line);
        break;
    }
    if header != Some(GRID_HEADER) {
        return Err(Error::GridFormat(format!(
            "expected column header `{GRID_HEADER}`"
        )));
    }
    let run = parse_config_str(&config)?;
    let spec = run.grid;
    let mut values = Vec::with_capacity(spec.len());
    for (k, line) in lines.enumerate() {
        let row = k + 1;
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 3 {
            return Err(Error::GridFormat(format!(
                "data row {row}: expected 3 fields"
            )));
        }
        let mut nums = [0.0; 3];
        for (slot, f) in nums.iter_mut().zip(&fields) {
            *slot = f
                .parse()
                .map_err(|_| Error::GridFormat(format!("data row {row}: `{f}` is not a number")))?;
        }
        if k >= spec.len() {
            return Err(Error::GridFormat(format!(
                "more than {} data rows",
                spec.len()
            )));
        }
        let (ix, iy) = (k % spec.dphi_steps, k / spec.dphi_steps);
        let close = |a: f64, b: f64| (a - b).abs() <= 1e-11 * a.abs().max(b.abs()).max(1.0);
        if !close(nums[0], spec.dphi(ix)) || !close(nums[1], spec.phi_rf(iy)) {
            return Err(Error::GridFormat(format!(
                "data row {row}: coordinates ({}, {}) off the grid",
                fields[0], fields[1]
            )));
        }
        values.push(nums[2]);
    }
    if values.len() != spec.len() {
        return Err(Error::GridFormat(format!(
            "{} data rows, expected {}",
            values.len(),
            spec.len()
        )));
    }
    Ok(SweepGrid {
        spec,
        model: run.model,
        qubit: run.qubit,
        omega: run.omega,
        gamma2: run.gamma2,
        values,
        fallbacks: 0,
    })
}

pub fn read_grid_csv(path: &Path) -> Result<SweepGrid> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_grid_csv(&text)
}

/// Binary 16-bit greyscale: `P5`, maxval 65535, big-endian samples, top row
/// at the largest drive amplitude.
pub fn grid_pgm_bytes(grid: &SweepGrid, vmin: f64, vmax: f64) -> Result<Vec<u8>> {
    if !(vmax > vmin) || !vmin.is_finite() || !vmax.is_finite() {
        return Err(Error::invalid(
            "vmax",
            format!("need vmax > vmin, got [{vmin}, {vmax}]"),
        ));
    }
    let (w, h) = (grid.spec.dphi_steps, grid.spec.phi_rf_steps);
    let header = format!("P5\n{w} {h}\n65535\n");
    let mut out = Vec::with_capacity(header.len() + 2 * w * h);
    out.extend_from_slice(header.as_bytes());
    let span = vmax - vmin;
    for iy in (0..h).rev() {
        for &v in grid.row(iy) {
            let t = ((v - vmin) / span).clamp(0.0, 1.0);
            let level = if t.is_nan() {
                0
            } else {
                (t * 65535.0).round() as u16
            };
            out.extend_from_slice(&level.to_be_bytes());
        }
    }
    Ok(out)
}

pub fn write_grid_pgm(grid: &SweepGrid, path: &Path, vmin: f64, vmax: f64) -> Result<()> {
    let bytes = grid_pgm_bytes(grid, vmin, vmax)?;
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

pub fn write_trajectory_csv(
    traj: &Trajectory,
    out: &mut impl std::io::Write,
) -> std::io::Result<()> {
    writeln!(
        out,
        "#! rate-equation trajectory; t in ns, populations dimensionless"
    )?;
    writeln!(out, "{TRAJECTORY_HEADER}")?;
    for (t, p) in traj.times.iter().zip(&traj.states) {
        write!(out, "{}", format_value(*t))?;
        for v in p.0 {
            write!(out, ",{}", format_value(v))?;
        }
        writeln!(out)?;
    }
    Ok(())
}
