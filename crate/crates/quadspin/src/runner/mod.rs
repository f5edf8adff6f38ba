//! End-to-end experiment orchestration: configuration, trajectory
//! generation, minima detection, derivative post-processing, and file
//! emission.

mod config;
mod emit;

pub use config::{
    load_config, ConfigError, GridKind, GridSpec, OutputSpec, Preset, SimulationConfig,
    DEFAULT_SAMPLES_PER_WINDOW,
};
pub use emit::{
    bounds_table_string, emit_bounds_table, emit_trajectory_csv, emit_wigner_csv, emit_wigner_svg,
    trajectory_csv_string, wigner_csv_string, wigner_svg_string, TRAJECTORY_HEADER,
    TRAJECTORY_SCHEMA_COMMENT,
};

use rayon::prelude::*;
use thiserror::Error;

use crate::liouville::{equilibrium_state, relaxation_superoperator, twisting_hamiltonian};
use crate::observables::{
    macroscopicity, noncartesian_operators, squeezing, uncertainty_report, ObservableError,
};
use crate::propagate::{build_generator, propagate_grid, PropagateError, TimeGrid};
use crate::spin::{coherent_state, DensityMatrix, SpinOperators};

#[derive(Debug, Error)]
pub enum RunnerError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Liouville(#[from] crate::liouville::LiouvilleError),
    #[error(transparent)]
    Propagate(#[from] PropagateError),
    #[error(transparent)]
    Observable(#[from] ObservableError),
    #[error("at sample {index} (t = {time:.6e} s): {source}")]
    AtSample {
        index: usize,
        time: f64,
        #[source]
        source: Box<RunnerError>,
    },
    #[error("derivative requires strictly increasing timestamps (duplicate at index {index})")]
    DuplicateTimestamps { index: usize },
    #[error("writing {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl RunnerError {
    /// Process exit code: 1 for validation problems, 2 for numerical
    /// invariant violations discovered while running.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunnerError::Config(_)
            | RunnerError::Liouville(_)
            | RunnerError::Io { .. }
            | RunnerError::DuplicateTimestamps { .. } => 1,
            RunnerError::Propagate(e) => match e {
                PropagateError::TraceDrift { .. } | PropagateError::NegativeEigenvalue { .. } => 2,
                _ => 1,
            },
            RunnerError::Observable(e) => match e {
                ObservableError::NegativeRadicand { .. }
                | ObservableError::UncertaintyViolation { .. } => 2,
                ObservableError::Spin(_) => 1,
            },
            RunnerError::AtSample { source, .. } => source.exit_code(),
        }
    }
}

/// One time-stamped row of every derived quantity.
#[derive(Debug, Clone)]
pub struct ObservableRecord {
    pub t: f64,
    pub t_over_nuq: f64,
    pub xi: f64,
    pub xi_sq: f64,
    pub alpha_deg: f64,
    pub var_iy: f64,
    pub var_iz: f64,
    pub var_ip: f64,
    pub var_im: f64,
    pub prod_yz: f64,
    pub prod_pm: f64,
    pub bound: f64,
    pub mean_ix: f64,
    pub mean_iy: f64,
    pub mean_iz: f64,
    pub neff_p: f64,
    pub neff_y: f64,
    pub purity: f64,
    pub trace_residual: f64,
}

/// Column selector for post-processing operations on trajectory records.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ObservableColumn {
    Xi,
    XiSq,
    ProdYz,
    ProdPm,
    NeffP,
    NeffY,
}

impl ObservableColumn {
    pub fn extract(&self, record: &ObservableRecord) -> f64 {
        match self {
            ObservableColumn::Xi => record.xi,
            ObservableColumn::XiSq => record.xi_sq,
            ObservableColumn::ProdYz => record.prod_yz,
            ObservableColumn::ProdPm => record.prod_pm,
            ObservableColumn::NeffP => record.neff_p,
            ObservableColumn::NeffY => record.neff_y,
        }
    }
}

/// Derive the full observable row for one propagated state.
pub fn observable_record(
    rho: &DensityMatrix,
    t: f64,
    nu_q: f64,
) -> Result<ObservableRecord, RunnerError> {
    let spin = rho.spin();
    let ops = SpinOperators::new(spin);
    let sq = squeezing(rho)?;
    let report = uncertainty_report(rho, sq.alpha)?;
    let (ip, _) = noncartesian_operators(spin, sq.alpha);
    let neff_p = macroscopicity(rho, &ip, "Ip")?.n_eff;
    let neff_y = macroscopicity(rho, &ops.iy, "Iy")?.n_eff;

    Ok(ObservableRecord {
        t,
        t_over_nuq: t * nu_q,
        xi: sq.xi,
        xi_sq: sq.xi_squared,
        alpha_deg: sq.alpha.to_degrees(),
        var_iy: report.var_iy,
        var_iz: report.var_iz,
        var_ip: report.var_ip,
        var_im: report.var_im,
        prod_yz: report.prod_yz,
        prod_pm: report.prod_pm,
        bound: report.bound,
        mean_ix: report.mean_ix,
        mean_iy: report.mean_iy,
        mean_iz: report.mean_iz,
        neff_p,
        neff_y,
        purity: rho.purity(),
        trace_residual: rho.trace_residual(),
    })
}

/// Propagate the configured initial state over the configured grid and
/// derive every observable per sample. Deterministic for a fixed config.
pub fn run_trajectory(cfg: &SimulationConfig) -> Result<Vec<ObservableRecord>, RunnerError> {
    let states = run_states(cfg)?;
    let nu_q = cfg.relaxation.omega_q / std::f64::consts::TAU;
    states
        .par_iter()
        .enumerate()
        .map(|(index, (t, rho))| {
            observable_record(rho, *t, nu_q).map_err(|source| RunnerError::AtSample {
                index,
                time: *t,
                source: Box::new(source),
            })
        })
        .collect()
}

/// Propagate the configured initial state, returning the raw states.
pub fn run_states(cfg: &SimulationConfig) -> Result<Vec<(f64, DensityMatrix)>, RunnerError> {
    let grid = cfg.time_grid()?;
    let rho0 = coherent_state(cfg.spin, &cfg.initial);
    let h = twisting_hamiltonian(cfg.spin, cfg.relaxation.omega_q);
    let gen = if cfg.relaxation_enabled {
        let r = relaxation_superoperator(cfg.spin, &cfg.relaxation)?;
        let eq = equilibrium_state(cfg.spin);
        build_generator(&h, Some(&r), Some(&eq))?
    } else {
        build_generator(&h, None, None)?
    };
    Ok(propagate_grid(&rho0, &gen, &grid)?)
}

/// Strict local minima of a column by three-point comparison; plateaus of
/// equal values break ties to the earliest sample. Series endpoints are
/// never minima.
pub fn detect_minima(
    records: &[ObservableRecord],
    column: ObservableColumn,
) -> Vec<(f64, f64)> {
    let values: Vec<f64> = records.iter().map(|r| column.extract(r)).collect();
    let mut minima = Vec::new();
    if values.len() < 3 {
        return minima;
    }
    // Collapse ties into runs so plateaus compare against distinct neighbors.
    let mut runs: Vec<(usize, f64)> = Vec::new();
    for (i, &v) in values.iter().enumerate() {
        match runs.last() {
            Some(&(_, last)) if last == v => {}
            _ => runs.push((i, v)),
        }
    }
    for w in 1..runs.len().saturating_sub(1) {
        let (start, v) = runs[w];
        if runs[w - 1].1 > v && runs[w + 1].1 > v {
            minima.push((records[start].t, v));
        }
    }
    minima
}

/// Local minima resolved at window scale for gapped window grids: strict
/// minima of the sampled series that also lie below every sample of the
/// neighboring sampled windows by more than a noise margin. Fast
/// intra-window oscillations riding on a relaxing envelope, and ulp-level
/// wiggles on the equilibrated tail, fail the neighbor test and are
/// discarded.
pub fn detect_window_resolved_minima(
    records: &[ObservableRecord],
    grid: &TimeGrid,
    column: ObservableColumn,
) -> Vec<(f64, f64)> {
    assert_eq!(
        records.len(),
        grid.len(),
        "records must align with the grid that produced them"
    );
    let windows = grid.windows();
    if windows.is_empty() {
        return detect_minima(records, column);
    }
    let values: Vec<f64> = records.iter().map(|r| column.extract(r)).collect();
    let window_of_sample = |idx: usize| -> usize {
        windows
            .iter()
            .position(|(_, range)| range.contains(&idx))
            .expect("sample belongs to a window")
    };
    let window_min = |w: usize| -> f64 {
        let (_, range) = &windows[w];
        values[range.clone()]
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min)
    };

    detect_minima(records, column)
        .into_iter()
        .filter(|&(t, v)| {
            let margin = 1e-9 * v.abs().max(1.0);
            let idx = records
                .iter()
                .position(|r| r.t == t)
                .expect("minimum comes from the records");
            let w = window_of_sample(idx);
            let below_left = w == 0 || v < window_min(w - 1) - margin;
            let below_right = w + 1 >= windows.len() || v < window_min(w + 1) - margin;
            below_left && below_right
        })
        .collect()
}

/// Finite-difference derivative of a column, normalized so the series peak
/// magnitude is 1: central differences in the interior, one-sided at the
/// ends.
pub fn derivative_series(
    records: &[ObservableRecord],
    column: ObservableColumn,
) -> Result<Vec<(f64, f64)>, RunnerError> {
    let n = records.len();
    if n < 2 {
        return Ok(records
            .iter()
            .map(|r| (r.t, 0.0))
            .collect());
    }
    for i in 1..n {
        if records[i].t <= records[i - 1].t {
            return Err(RunnerError::DuplicateTimestamps { index: i });
        }
    }
    let t: Vec<f64> = records.iter().map(|r| r.t).collect();
    let y: Vec<f64> = records.iter().map(|r| column.extract(r)).collect();
    let mut deriv = Vec::with_capacity(n);
    deriv.push((t[0], (y[1] - y[0]) / (t[1] - t[0])));
    for i in 1..n - 1 {
        deriv.push((t[i], (y[i + 1] - y[i - 1]) / (t[i + 1] - t[i - 1])));
    }
    deriv.push((t[n - 1], (y[n - 1] - y[n - 2]) / (t[n - 1] - t[n - 2])));

    let max_abs = deriv.iter().map(|(_, d)| d.abs()).fold(0.0, f64::max);
    if max_abs > 0.0 {
        for (_, d) in &mut deriv {
            *d /= max_abs;
        }
    }
    Ok(deriv)
}

/// Largest window label whose samples contain a series magnitude at or
/// above `threshold`. The series must align with the grid samples.
pub fn last_window_at_or_above(
    series: &[(f64, f64)],
    grid: &TimeGrid,
    threshold: f64,
) -> Option<usize> {
    assert_eq!(series.len(), grid.len());
    grid.windows()
        .iter()
        .filter(|(_, range)| {
            series[range.clone()]
                .iter()
                .any(|(_, v)| v.abs() >= threshold)
        })
        .map(|(k, _)| *k)
        .max()
}

/// Cap rayon's worker count from the QUADSPIN_THREADS environment variable.
/// A missing, empty, or unparsable value leaves the default pool in place.
pub fn init_thread_pool_from_env() {
    if let Ok(value) = std::env::var("QUADSPIN_THREADS") {
        if let Ok(n) = value.trim().parse::<usize>() {
            if n >= 1 {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(t: f64, xi: f64) -> ObservableRecord {
        ObservableRecord {
            t,
            t_over_nuq: t,
            xi,
            xi_sq: xi * xi,
            alpha_deg: 0.0,
            var_iy: 0.0,
            var_iz: 0.0,
            var_ip: 0.0,
            var_im: 0.0,
            prod_yz: 0.0,
            prod_pm: 0.0,
            bound: 0.0,
            mean_ix: 0.0,
            mean_iy: 0.0,
            mean_iz: 0.0,
            neff_p: 0.0,
            neff_y: 0.0,
            purity: 1.0,
            trace_residual: 0.0,
        }
    }

    fn records_from(xs: &[f64]) -> Vec<ObservableRecord> {
        xs.iter()
            .enumerate()
            .map(|(i, &x)| record(i as f64, x))
            .collect()
    }

    #[test]
    fn monotone_series_has_no_minima() {
        let records = records_from(&[3.0, 2.0, 1.0, 0.5]);
        assert!(detect_minima(&records, ObservableColumn::Xi).is_empty());
    }

    #[test]
    fn single_dip_detected() {
        let records = records_from(&[1.0, 0.5, 1.0]);
        let minima = detect_minima(&records, ObservableColumn::Xi);
        assert_eq!(minima.len(), 1);
        assert_eq!(minima[0], (1.0, 0.5));
    }

    #[test]
    fn plateau_reports_earliest_sample() {
        let records = records_from(&[2.0, 1.0, 1.0, 1.0, 3.0]);
        let minima = detect_minima(&records, ObservableColumn::Xi);
        assert_eq!(minima.len(), 1);
        assert_eq!(minima[0].0, 1.0);
    }

    #[test]
    fn endpoints_are_not_minima() {
        let records = records_from(&[0.5, 1.0, 0.7]);
        assert!(detect_minima(&records, ObservableColumn::Xi).is_empty());
    }

    #[test]
    fn derivative_of_constant_is_zero() {
        let records = records_from(&[2.0, 2.0, 2.0, 2.0]);
        let deriv = derivative_series(&records, ObservableColumn::Xi).unwrap();
        assert!(deriv.iter().all(|(_, d)| *d == 0.0));
    }

    #[test]
    fn derivative_of_linear_is_unit() {
        let records = records_from(&[0.0, 1.0, 2.0, 3.0]);
        let deriv = derivative_series(&records, ObservableColumn::Xi).unwrap();
        for (_, d) in deriv {
            assert!((d - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn derivative_rejects_duplicate_timestamps() {
        let mut records = records_from(&[0.0, 1.0, 2.0]);
        records[1].t = 0.0;
        assert!(matches!(
            derivative_series(&records, ObservableColumn::Xi),
            Err(RunnerError::DuplicateTimestamps { index: 1 })
        ));
    }

    #[test]
    fn exit_codes_partition_errors() {
        let config_err = RunnerError::Config(ConfigError::MissingSection("spin"));
        assert_eq!(config_err.exit_code(), 1);
        let numeric = RunnerError::Propagate(PropagateError::TraceDrift { residual: 1.0 });
        assert_eq!(numeric.exit_code(), 2);
    }
}
