//! File emitters: trajectory CSV, Wigner CSV/SVG, and the per-spin bounds
//! table. All text outputs are UTF-8 with LF line endings and scientific
//! notation carrying 17 significant digits, so identical runs produce
//! identical bytes.

use std::fmt::Write as _;
use std::path::Path;

use crate::observables::equilibrium_bounds;
use crate::runner::{ObservableRecord, RunnerError};
use crate::spin::SpinNumber;
use crate::wigner::WignerGrid;

pub const TRAJECTORY_SCHEMA_COMMENT: &str = "# quadspin-schema=1";
pub const TRAJECTORY_HEADER: &str = "t,t_over_nuq,xi,xi_sq,alpha_deg,var_iy,var_iz,var_ip,var_im,prod_yz,prod_pm,bound,mean_ix,mean_iy,mean_iz,neff_p,neff_y,purity,trace_residual";

fn sci(value: f64) -> String {
    format!("{value:.16e}")
}

fn write_file(path: &Path, contents: &str) -> Result<(), RunnerError> {
    std::fs::write(path, contents).map_err(|source| RunnerError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Render the trajectory CSV (schema comment, fixed header, one row per
/// record).
pub fn trajectory_csv_string(records: &[ObservableRecord]) -> String {
    let mut out = String::new();
    out.push_str(TRAJECTORY_SCHEMA_COMMENT);
    out.push('\n');
    out.push_str(TRAJECTORY_HEADER);
    out.push('\n');
    for r in records {
        let fields = [
            r.t,
            r.t_over_nuq,
            r.xi,
            r.xi_sq,
            r.alpha_deg,
            r.var_iy,
            r.var_iz,
            r.var_ip,
            r.var_im,
            r.prod_yz,
            r.prod_pm,
            r.bound,
            r.mean_ix,
            r.mean_iy,
            r.mean_iz,
            r.neff_p,
            r.neff_y,
            r.purity,
            r.trace_residual,
        ];
        let row: Vec<String> = fields.iter().map(|&v| sci(v)).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

pub fn emit_trajectory_csv(
    records: &[ObservableRecord],
    path: impl AsRef<Path>,
) -> Result<(), RunnerError> {
    write_file(path.as_ref(), &trajectory_csv_string(records))
}

/// Long-format Wigner CSV: theta,phi,w.
pub fn wigner_csv_string(grid: &WignerGrid) -> String {
    let mut out = String::from("theta,phi,w\n");
    for (j, &theta) in grid.theta.iter().enumerate() {
        for (k, &phi) in grid.phi.iter().enumerate() {
            let _ = writeln!(out, "{},{},{}", sci(theta), sci(phi), sci(grid.values[j][k]));
        }
    }
    out
}

pub fn emit_wigner_csv(grid: &WignerGrid, path: impl AsRef<Path>) -> Result<(), RunnerError> {
    write_file(path.as_ref(), &wigner_csv_string(grid))
}

/// Self-contained equirectangular heatmap of the grid, linear grayscale
/// from the minimum to the maximum value. Decorative output only.
pub fn wigner_svg_string(grid: &WignerGrid) -> String {
    let cell = 3usize;
    let width = grid.n_phi() * cell;
    let height = grid.n_theta() * cell;
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for row in &grid.values {
        for &v in row {
            lo = lo.min(v);
            hi = hi.max(v);
        }
    }
    let span = (hi - lo).max(f64::MIN_POSITIVE);

    let mut out = String::new();
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\" viewBox=\"0 0 {width} {height}\">"
    );
    let _ = writeln!(
        out,
        "<rect width=\"{width}\" height=\"{height}\" fill=\"rgb(0,0,0)\"/>"
    );
    for (j, row) in grid.values.iter().enumerate() {
        for (k, &v) in row.iter().enumerate() {
            let level = (255.0 * (v - lo) / span).round().clamp(0.0, 255.0) as u8;
            if level == 0 {
                continue;
            }
            let _ = writeln!(
                out,
                "<rect x=\"{}\" y=\"{}\" width=\"{cell}\" height=\"{cell}\" fill=\"rgb({level},{level},{level})\"/>",
                k * cell,
                j * cell,
            );
        }
    }
    out.push_str("</svg>\n");
    out
}

pub fn emit_wigner_svg(grid: &WignerGrid, path: impl AsRef<Path>) -> Result<(), RunnerError> {
    write_file(path.as_ref(), &wigner_svg_string(grid))
}

/// Per-spin equilibrium bounds table behind the macroscopicity and
/// uncertainty scaling plots.
pub fn bounds_table_string(spins: &[SpinNumber]) -> String {
    let mut out =
        String::from("two_i,spin,xi_sq_eq,prod_yz_eq,neff_max,neff_eq,neff_loss\n");
    for &s in spins {
        let b = equilibrium_bounds(s);
        let i = s.quantum_number();
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            s.two_i(),
            s,
            sci(b.xi_sq_eq),
            sci(b.prod_eq),
            sci(2.0 * i),
            sci(b.xi_sq_eq),
            sci(b.n_eff_loss),
        );
    }
    out
}

pub fn emit_bounds_table(spins: &[SpinNumber], path: impl AsRef<Path>) -> Result<(), RunnerError> {
    write_file(path.as_ref(), &bounds_table_string(spins))
}
