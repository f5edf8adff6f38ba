//! Simulation and analysis of a single quadrupolar nuclear spin (half-integer
//! I) evolving under one-axis twisting with Redfield quadrupolar relaxation.
//!
//! The crate builds the spin operator algebra, assembles the coherent and
//! dissipative generators, propagates density matrices exactly, and derives
//! squeezing parameters, uncertainty products, spherical Wigner
//! distributions, and macroscopicity measures from the trajectories.

pub mod linalg;
pub mod liouville;
pub mod observables;
pub mod propagate;
pub mod runner;
pub mod spin;
pub mod wigner;

pub use linalg::C64;
pub use liouville::{
    equilibrium_state, lab_hamiltonian, relaxation_superoperator, twisting_hamiltonian,
    LiouvilleError, RelaxationParams, Superoperator,
};
pub use observables::{
    equilibrium_bounds, macroscopicity, noncartesian_operators, squeezing, uncertainty_report,
    EquilibriumBounds, MacroscopicityResult, ObservableError, SqueezingResult, UncertaintyReport,
};
pub use propagate::{
    build_generator, propagate, propagate_grid, Generator, GridScheme, PropagateError, TimeGrid,
};
pub use runner::{
    detect_minima, detect_window_resolved_minima, derivative_series, emit_bounds_table,
    emit_trajectory_csv, emit_wigner_csv, emit_wigner_svg, load_config, run_trajectory,
    ObservableColumn, ObservableRecord, Preset, RunnerError, SimulationConfig,
};
pub use spin::{
    coherent_state, expectation, expectation_real, variance, CoherentStateParams, DensityMatrix,
    Operator, QuadrupoleTensors, SpinError, SpinNumber, SpinOperators, TensorBasis,
};
pub use wigner::{multipole_moments, wigner_grid, MultipoleMoments, WignerError, WignerGrid};
