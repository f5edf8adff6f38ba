//! Configuration schema and preset resolution.
//!
//! Configurations are TOML documents. Presets `na23` and `cs133` fill the
//! spin and relaxation tables; `custom` requires them explicitly. Unknown
//! keys are rejected. Spectral densities are given in nanoseconds and the
//! quadrupolar frequency in Hz, matching the tabulated units; they are
//! converted to SI (seconds, rad/s) on load.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::liouville::{LiouvilleError, RelaxationParams};
use crate::propagate::{PropagateError, TimeGrid};
use crate::spin::{CoherentStateParams, SpinError, SpinNumber};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("configuration parse error: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("preset {preset} fills the {section} table; remove it from the document")]
    PresetOverride {
        preset: &'static str,
        section: &'static str,
    },
    #[error("custom configuration is missing the required [{0}] table")]
    MissingSection(&'static str),
    #[error(transparent)]
    Spin(#[from] SpinError),
    #[error(transparent)]
    Relaxation(#[from] LiouvilleError),
    #[error("grid field {field} is invalid: {reason}")]
    BadGrid {
        field: &'static str,
        reason: &'static str,
    },
    #[error("initial state angle {field} = {value} is outside its domain")]
    BadAngle { field: &'static str, value: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Preset {
    Na23,
    Cs133,
    Custom,
}

impl Preset {
    pub fn name(&self) -> &'static str {
        match self {
            Preset::Na23 => "na23",
            Preset::Cs133 => "cs133",
            Preset::Custom => "custom",
        }
    }
}

/// On-disk document shape. All sections other than `preset` are optional;
/// validation of the preset/custom split happens in [`load_config`].
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    preset: Preset,
    #[serde(default = "default_true")]
    relaxation_enabled: bool,
    spin: Option<RawSpin>,
    relaxation: Option<RawRelaxation>,
    initial: Option<RawInitial>,
    grid: Option<RawGrid>,
    outputs: Option<OutputSpec>,
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpin {
    two_i: u32,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRelaxation {
    j0_ns: f64,
    j1_ns: f64,
    j2_ns: f64,
    c_q_hz2: f64,
    nu_q_hz: f64,
    label: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawInitial {
    theta: f64,
    phi: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGrid {
    kind: GridKind,
    windows: Option<Vec<usize>>,
    samples_per_window: Option<usize>,
    t_start: Option<f64>,
    t_end: Option<f64>,
    samples: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GridKind {
    PaperWindows,
    Uniform,
}

/// Requested output artifacts; interpreted by the command-line front end.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub trajectory_csv: Option<String>,
    pub wigner_time: Option<f64>,
    pub wigner_grid: Option<String>,
    #[serde(default)]
    pub wigner_svg: bool,
    pub bounds_two_i: Option<Vec<u32>>,
}

/// Time-grid request, resolved against the preset's quadrupolar period.
#[derive(Debug, Clone, PartialEq)]
pub enum GridSpec {
    PaperWindows {
        windows: Vec<usize>,
        samples_per_window: usize,
    },
    Uniform {
        t_start: f64,
        t_end: f64,
        samples: usize,
    },
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec::PaperWindows {
            windows: TimeGrid::default_window_labels(),
            samples_per_window: DEFAULT_SAMPLES_PER_WINDOW,
        }
    }
}

pub const DEFAULT_SAMPLES_PER_WINDOW: usize = 64;

/// Fully resolved simulation request.
#[derive(Debug, Clone)]
pub struct SimulationConfig {
    pub preset: Preset,
    pub spin: SpinNumber,
    pub relaxation: RelaxationParams,
    pub relaxation_enabled: bool,
    pub initial: CoherentStateParams,
    pub grid: GridSpec,
    pub outputs: OutputSpec,
}

impl SimulationConfig {
    /// Resolved configuration for a named preset with defaults everywhere
    /// else (relaxation on, initial state ζ(π/2, 0), windowed grid).
    pub fn preset(preset: Preset) -> Result<Self, ConfigError> {
        let (spin, relaxation) = preset_tables(preset)?;
        Ok(Self {
            preset,
            spin,
            relaxation,
            relaxation_enabled: true,
            initial: default_initial(),
            grid: GridSpec::default(),
            outputs: OutputSpec::default(),
        })
    }

    /// Build the time grid this configuration requests.
    pub fn time_grid(&self) -> Result<TimeGrid, PropagateError> {
        match &self.grid {
            GridSpec::PaperWindows {
                windows,
                samples_per_window,
            } => TimeGrid::paper_windows(
                self.relaxation.quadrupolar_period(),
                windows,
                *samples_per_window,
            ),
            GridSpec::Uniform {
                t_start,
                t_end,
                samples,
            } => TimeGrid::uniform(*t_start, *t_end, *samples),
        }
    }

    /// Serialize the resolved configuration as a standalone custom document
    /// that reloads to the same values.
    pub fn echo_toml(&self) -> String {
        let raw = RawConfig {
            preset: Preset::Custom,
            relaxation_enabled: self.relaxation_enabled,
            spin: Some(RawSpin {
                two_i: self.spin.two_i(),
            }),
            relaxation: Some(RawRelaxation {
                j0_ns: self.relaxation.j0 / 1e-9,
                j1_ns: self.relaxation.j1 / 1e-9,
                j2_ns: self.relaxation.j2 / 1e-9,
                c_q_hz2: self.relaxation.c_q,
                nu_q_hz: self.relaxation.omega_q / std::f64::consts::TAU,
                label: Some(self.relaxation.label.clone()),
            }),
            initial: Some(RawInitial {
                theta: self.initial.theta,
                phi: self.initial.phi,
            }),
            grid: Some(match &self.grid {
                GridSpec::PaperWindows {
                    windows,
                    samples_per_window,
                } => RawGrid {
                    kind: GridKind::PaperWindows,
                    windows: Some(windows.clone()),
                    samples_per_window: Some(*samples_per_window),
                    t_start: None,
                    t_end: None,
                    samples: None,
                },
                GridSpec::Uniform {
                    t_start,
                    t_end,
                    samples,
                } => RawGrid {
                    kind: GridKind::Uniform,
                    windows: None,
                    samples_per_window: None,
                    t_start: Some(*t_start),
                    t_end: Some(*t_end),
                    samples: Some(*samples),
                },
            }),
            outputs: None,
        };
        toml::to_string_pretty(&raw).expect("resolved config serializes")
    }
}

fn default_initial() -> CoherentStateParams {
    CoherentStateParams::new(std::f64::consts::FRAC_PI_2, 0.0)
}

fn preset_tables(preset: Preset) -> Result<(SpinNumber, RelaxationParams), ConfigError> {
    match preset {
        Preset::Na23 => Ok((SpinNumber::new(3)?, RelaxationParams::sodium_na23())),
        Preset::Cs133 => Ok((SpinNumber::new(7)?, RelaxationParams::cesium_cs133())),
        Preset::Custom => Err(ConfigError::MissingSection("spin")),
    }
}

/// Parse and validate a configuration document.
pub fn load_config(text: &str) -> Result<SimulationConfig, ConfigError> {
    let raw: RawConfig = toml::from_str(text)?;

    let (spin, relaxation) = match raw.preset {
        Preset::Custom => {
            let spin_raw = raw
                .spin
                .as_ref()
                .ok_or(ConfigError::MissingSection("spin"))?;
            let relax_raw = raw
                .relaxation
                .as_ref()
                .ok_or(ConfigError::MissingSection("relaxation"))?;
            let spin = SpinNumber::new(spin_raw.two_i)?;
            let label = relax_raw.label.clone().unwrap_or_else(|| "custom".into());
            let relaxation = RelaxationParams::from_table_units(
                relax_raw.j0_ns,
                relax_raw.j1_ns,
                relax_raw.j2_ns,
                relax_raw.c_q_hz2,
                relax_raw.nu_q_hz,
                label,
            )?;
            (spin, relaxation)
        }
        preset => {
            if raw.spin.is_some() {
                return Err(ConfigError::PresetOverride {
                    preset: preset.name(),
                    section: "spin",
                });
            }
            if raw.relaxation.is_some() {
                return Err(ConfigError::PresetOverride {
                    preset: preset.name(),
                    section: "relaxation",
                });
            }
            preset_tables(preset)?
        }
    };

    let initial = match &raw.initial {
        None => default_initial(),
        Some(init) => {
            if !(0.0..=std::f64::consts::PI).contains(&init.theta) {
                return Err(ConfigError::BadAngle {
                    field: "theta",
                    value: init.theta,
                });
            }
            if !init.phi.is_finite() {
                return Err(ConfigError::BadAngle {
                    field: "phi",
                    value: init.phi,
                });
            }
            CoherentStateParams::new(init.theta, init.phi)
        }
    };

    let grid = match &raw.grid {
        None => GridSpec::default(),
        Some(g) => resolve_grid(g)?,
    };

    Ok(SimulationConfig {
        preset: raw.preset,
        spin,
        relaxation,
        relaxation_enabled: raw.relaxation_enabled,
        initial,
        grid,
        outputs: raw.outputs.unwrap_or_default(),
    })
}

fn resolve_grid(raw: &RawGrid) -> Result<GridSpec, ConfigError> {
    match raw.kind {
        GridKind::PaperWindows => {
            for (field, present) in [
                ("t_start", raw.t_start.is_some()),
                ("t_end", raw.t_end.is_some()),
                ("samples", raw.samples.is_some()),
            ] {
                if present {
                    return Err(ConfigError::BadGrid {
                        field,
                        reason: "only valid for uniform grids",
                    });
                }
            }
            let windows = raw
                .windows
                .clone()
                .unwrap_or_else(TimeGrid::default_window_labels);
            if windows.is_empty() || windows.contains(&0) {
                return Err(ConfigError::BadGrid {
                    field: "windows",
                    reason: "window labels must be positive and non-empty",
                });
            }
            let samples_per_window = raw.samples_per_window.unwrap_or(DEFAULT_SAMPLES_PER_WINDOW);
            if samples_per_window < 2 {
                return Err(ConfigError::BadGrid {
                    field: "samples_per_window",
                    reason: "need at least 2 samples per window",
                });
            }
            Ok(GridSpec::PaperWindows {
                windows,
                samples_per_window,
            })
        }
        GridKind::Uniform => {
            for (field, present) in [
                ("windows", raw.windows.is_some()),
                ("samples_per_window", raw.samples_per_window.is_some()),
            ] {
                if present {
                    return Err(ConfigError::BadGrid {
                        field,
                        reason: "only valid for paper-windows grids",
                    });
                }
            }
            let t_start = raw.t_start.unwrap_or(0.0);
            let t_end = raw.t_end.ok_or(ConfigError::BadGrid {
                field: "t_end",
                reason: "required for uniform grids",
            })?;
            let samples = raw.samples.ok_or(ConfigError::BadGrid {
                field: "samples",
                reason: "required for uniform grids",
            })?;
            if t_end.is_nan() || t_end <= t_start || t_start < 0.0 {
                return Err(ConfigError::BadGrid {
                    field: "t_end",
                    reason: "must satisfy 0 <= t_start < t_end",
                });
            }
            if samples < 2 {
                return Err(ConfigError::BadGrid {
                    field: "samples",
                    reason: "need at least 2 samples",
                });
            }
            Ok(GridSpec::Uniform {
                t_start,
                t_end,
                samples,
            })
        }
    }
}
