//! Command-line front end: windowed trajectory simulations, Wigner grids,
//! equilibrium bounds tables, and the cat-state shorthand run.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind as ClapErrorKind;
use clap::{Args, Parser, Subcommand};

use quadspin::runner::{
    self, emit_bounds_table, emit_trajectory_csv, emit_wigner_csv, emit_wigner_svg, load_config,
    GridSpec, Preset, RunnerError, SimulationConfig,
};
use quadspin::{wigner_grid, SpinNumber};

#[derive(Parser)]
#[command(
    name = "quadspin",
    about = "Quadrupolar-spin one-axis-twisting simulator with Redfield relaxation",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a windowed trajectory and write trajectory.csv plus a config echo.
    Simulate(SimulateArgs),
    /// Evaluate the Wigner distribution of the evolved state at one time.
    Wigner(WignerArgs),
    /// Write the per-spin thermal-equilibrium bounds table.
    Bounds(BoundsArgs),
    /// Relaxation-free run to t = pi/omega_Q with a Wigner grid of the cat state.
    Cat(CatArgs),
}

#[derive(Args)]
struct SimulateArgs {
    /// Preset system: na23 or cs133.
    #[arg(long, conflicts_with = "config")]
    preset: Option<String>,
    /// TOML configuration file (alternative to --preset).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Disable relaxation (unitary twisting only).
    #[arg(long)]
    no_relaxation: bool,
    /// Comma-separated window labels k (default 1,11,...,1001).
    #[arg(long, value_name = "K_LIST")]
    windows: Option<String>,
    /// Samples per window (default 64).
    #[arg(long, value_name = "N")]
    samples_per_window: Option<usize>,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct WignerArgs {
    /// Preset system: na23 or cs133.
    #[arg(long)]
    preset: String,
    /// Evolution time in seconds.
    #[arg(long)]
    time: f64,
    /// Grid size as NTHETAxNPHI, e.g. 181x361.
    #[arg(long, default_value = "181x361")]
    grid: String,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
    /// Also write a grayscale SVG heatmap.
    #[arg(long)]
    svg: bool,
}

#[derive(Args)]
struct BoundsArgs {
    /// Comma-separated spins, e.g. "1/2,1,3/2,2,5/2,3,7/2,4,9/2".
    #[arg(long)]
    spins: String,
    /// Output CSV file.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct CatArgs {
    /// Preset system: na23 or cs133.
    #[arg(long)]
    preset: String,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
}

fn main() -> ExitCode {
    runner::init_thread_pool_from_env();
    // Map argument errors onto the documented exit codes: 0 success (help
    // and version included), 1 validation, 2 numerical-invariant violation.
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                ClapErrorKind::DisplayHelp | ClapErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Simulate(args) => simulate(args),
        Command::Wigner(args) => wigner(args),
        Command::Bounds(args) => bounds(args),
        Command::Cat(args) => cat(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Runner(err)) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}

enum CliError {
    Usage(String),
    Runner(RunnerError),
}

impl From<RunnerError> for CliError {
    fn from(err: RunnerError) -> Self {
        CliError::Runner(err)
    }
}

fn parse_preset(name: &str) -> Result<Preset, CliError> {
    match name {
        "na23" => Ok(Preset::Na23),
        "cs133" => Ok(Preset::Cs133),
        other => Err(CliError::Usage(format!(
            "unknown preset '{other}' (expected na23 or cs133)"
        ))),
    }
}

fn preset_config(name: &str) -> Result<SimulationConfig, CliError> {
    let preset = parse_preset(name)?;
    SimulationConfig::preset(preset)
        .map_err(RunnerError::Config)
        .map_err(CliError::from)
}

fn ensure_out_dir(dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|source| {
        CliError::Runner(RunnerError::Io {
            path: dir.display().to_string(),
            source,
        })
    })
}

fn simulate(args: SimulateArgs) -> Result<(), CliError> {
    let mut cfg = match (&args.preset, &args.config) {
        (Some(name), None) => preset_config(name)?,
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path).map_err(|source| {
                CliError::Runner(RunnerError::Io {
                    path: path.display().to_string(),
                    source,
                })
            })?;
            load_config(&text).map_err(RunnerError::Config)?
        }
        _ => {
            return Err(CliError::Usage(
                "simulate needs exactly one of --preset or --config".into(),
            ))
        }
    };

    if args.no_relaxation {
        cfg.relaxation_enabled = false;
    }
    if args.windows.is_some() || args.samples_per_window.is_some() {
        let windows = match &args.windows {
            Some(list) => parse_windows(list)?,
            None => match &cfg.grid {
                GridSpec::PaperWindows { windows, .. } => windows.clone(),
                GridSpec::Uniform { .. } => quadspin::TimeGrid::default_window_labels(),
            },
        };
        let samples_per_window = args
            .samples_per_window
            .unwrap_or(runner::DEFAULT_SAMPLES_PER_WINDOW);
        if samples_per_window < 2 {
            return Err(CliError::Usage("--samples-per-window must be >= 2".into()));
        }
        cfg.grid = GridSpec::PaperWindows {
            windows,
            samples_per_window,
        };
    }

    ensure_out_dir(&args.out)?;
    let records = runner::run_trajectory(&cfg)?;
    emit_trajectory_csv(&records, args.out.join("trajectory.csv"))?;
    std::fs::write(args.out.join("config_echo.toml"), cfg.echo_toml()).map_err(|source| {
        CliError::Runner(RunnerError::Io {
            path: args.out.join("config_echo.toml").display().to_string(),
            source,
        })
    })?;
    println!(
        "wrote {} samples to {}",
        records.len(),
        args.out.join("trajectory.csv").display()
    );
    Ok(())
}

fn parse_windows(list: &str) -> Result<Vec<usize>, CliError> {
    let mut windows = Vec::new();
    for token in list.split(',') {
        let token = token.trim();
        if token.is_empty() {
            continue;
        }
        let k: usize = token
            .parse()
            .map_err(|_| CliError::Usage(format!("bad window label '{token}'")))?;
        if k == 0 {
            return Err(CliError::Usage("window labels start at 1".into()));
        }
        windows.push(k);
    }
    if windows.is_empty() {
        return Err(CliError::Usage("--windows list is empty".into()));
    }
    Ok(windows)
}

fn parse_grid_shape(text: &str) -> Result<(usize, usize), CliError> {
    let parts: Vec<&str> = text.split(['x', 'X']).collect();
    if parts.len() != 2 {
        return Err(CliError::Usage(format!(
            "bad grid '{text}' (expected NTHETAxNPHI)"
        )));
    }
    let n_theta: usize = parts[0]
        .parse()
        .map_err(|_| CliError::Usage(format!("bad grid '{text}'")))?;
    let n_phi: usize = parts[1]
        .parse()
        .map_err(|_| CliError::Usage(format!("bad grid '{text}'")))?;
    Ok((n_theta, n_phi))
}

fn evolved_state(
    cfg: &SimulationConfig,
    t: f64,
) -> Result<quadspin::DensityMatrix, RunnerError> {
    let rho0 = quadspin::coherent_state(cfg.spin, &cfg.initial);
    let h = quadspin::twisting_hamiltonian(cfg.spin, cfg.relaxation.omega_q);
    let gen = if cfg.relaxation_enabled {
        let r = quadspin::relaxation_superoperator(cfg.spin, &cfg.relaxation)?;
        let eq = quadspin::equilibrium_state(cfg.spin);
        quadspin::build_generator(&h, Some(&r), Some(&eq))?
    } else {
        quadspin::build_generator(&h, None, None)?
    };
    Ok(quadspin::propagate(&rho0, &gen, t)?)
}

fn wigner(args: WignerArgs) -> Result<(), CliError> {
    if args.time < 0.0 {
        return Err(CliError::Usage("--time must be non-negative".into()));
    }
    let (n_theta, n_phi) = parse_grid_shape(&args.grid)?;
    let cfg = preset_config(&args.preset)?;
    let rho = evolved_state(&cfg, args.time)?;
    let grid = wigner_grid(&rho, n_theta, n_phi).map_err(|e| CliError::Usage(e.to_string()))?;
    ensure_out_dir(&args.out)?;
    emit_wigner_csv(&grid, args.out.join("wigner.csv"))?;
    if args.svg {
        emit_wigner_svg(&grid, args.out.join("wigner.svg"))?;
    }
    println!(
        "wrote {}x{} Wigner grid to {}",
        n_theta,
        n_phi,
        args.out.join("wigner.csv").display()
    );
    Ok(())
}

fn parse_spin_token(token: &str) -> Result<SpinNumber, CliError> {
    let token = token.trim();
    let two_i = if let Some((num, den)) = token.split_once('/') {
        let num: u32 = num
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("bad spin '{token}'")))?;
        let den: u32 = den
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("bad spin '{token}'")))?;
        if den != 2 {
            return Err(CliError::Usage(format!(
                "bad spin '{token}' (denominator must be 2)"
            )));
        }
        num
    } else {
        let whole: u32 = token
            .parse()
            .map_err(|_| CliError::Usage(format!("bad spin '{token}'")))?;
        whole * 2
    };
    SpinNumber::new(two_i).map_err(|e| CliError::Usage(e.to_string()))
}

fn bounds(args: BoundsArgs) -> Result<(), CliError> {
    let spins: Vec<SpinNumber> = args
        .spins
        .split(',')
        .filter(|t| !t.trim().is_empty())
        .map(parse_spin_token)
        .collect::<Result<_, _>>()?;
    if spins.is_empty() {
        return Err(CliError::Usage("--spins list is empty".into()));
    }
    if let Some(parent) = args.out.parent() {
        if !parent.as_os_str().is_empty() {
            ensure_out_dir(parent)?;
        }
    }
    emit_bounds_table(&spins, &args.out)?;
    println!("wrote bounds for {} spins to {}", spins.len(), args.out.display());
    Ok(())
}

fn cat(args: CatArgs) -> Result<(), CliError> {
    let mut cfg = preset_config(&args.preset)?;
    cfg.relaxation_enabled = false;
    let t_cat = std::f64::consts::PI / cfg.relaxation.omega_q;
    cfg.grid = GridSpec::Uniform {
        t_start: 0.0,
        t_end: t_cat,
        samples: 129,
    };

    ensure_out_dir(&args.out)?;
    let records = runner::run_trajectory(&cfg)?;
    emit_trajectory_csv(&records, args.out.join("trajectory.csv"))?;
    let rho_cat = evolved_state(&cfg, t_cat)?;
    let grid = wigner_grid(&rho_cat, 181, 361).map_err(|e| CliError::Usage(e.to_string()))?;
    emit_wigner_csv(&grid, args.out.join("wigner.csv"))?;
    emit_wigner_svg(&grid, args.out.join("wigner.svg"))?;
    println!(
        "wrote cat-state run (t = {t_cat:.6e} s) to {}",
        args.out.display()
    );
    Ok(())
}
