mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use lieb_core::units::{angular_to_mhz, ghz_to_angular, mhz_to_angular};
use lieb_core::{
    band_grid, build_lieb, butterfly_with_cap, flatness, interference_residual, localization_factor,
    localization_sweep, make_pump, middle_cluster_width, ring_mode, steady_state, CircuitReport, Error, NoiseReport,
    NoiseScenario, PumpKind, RingModeKind, RunConfig, SiteIndex,
};

use output::{Format, Table};

const SCHEMAS: &str = "\
Output files (floats: 12 significant digits, scientific notation):
  bands.csv         kx, ky, E_minus_MHz, E_zero_MHz, E_plus_MHz
  butterfly.csv     theta_over_pi, eigen_index, energy_MHz
  sspn.csv          m, n, sublattice, re_a, im_a, sspn
  locfactor.csv     tbc_dc_MHz, lf_single, lf_rm1, lf_rm2, lf_rm3
  ringmodes.csv     kind, m, n, sublattice, re, im
  hamiltonian.csv   row, col, re, im   (nonzero entries, rad/s)
  circuit_report.json, noise_report.json   (always JSON)
With --format json the tables are written as <name>.json, an array of
objects keyed by the same column names. Frequencies in tables are ordinary
frequencies (MHz); sspn is the photon number |<a>|^2; re_a, im_a are
dimensionless amplitudes.

Exit status: 0 success, 1 solver or I/O failure, 2 invalid configuration.";

#[derive(Parser, Debug)]
#[command(name = "liebsim", version, about = "Flat-band Lieb-lattice and circuit simulator", after_help = SCHEMAS)]
struct Cli {
    /// Sectioned TOML run configuration; missing keys take the built-in defaults.
    #[arg(long, global = true, env = "LIEBSIM_CONFIG")]
    config: Option<PathBuf>,

    #[arg(long, global = true, default_value = ".")]
    output_dir: PathBuf,

    #[arg(long, global = true, value_enum, default_value = "csv")]
    format: Format,

    #[command(flatten)]
    lattice: LatticeFlags,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Default)]
struct LatticeFlags {
    #[arg(long, global = true)]
    nx: Option<usize>,
    #[arg(long, global = true)]
    ny: Option<usize>,
    /// Nearest-neighbour hopping T/2π, MHz.
    #[arg(long = "hopping", global = true)]
    t_mhz: Option<f64>,
    /// Gauge phase θ in units of π.
    #[arg(long = "theta", global = true)]
    theta_over_pi: Option<f64>,
    /// Next-nearest-neighbour hopping t′/2π, MHz.
    #[arg(long = "tprime", global = true)]
    tprime_mhz: Option<f64>,
    /// Unit cell (1-based) of the pump and ring-mode anchor.
    #[arg(long, global = true)]
    anchor_m: Option<usize>,
    #[arg(long, global = true)]
    anchor_n: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Bloch bands on a k-grid spanning [0, 2π]² (writes bands.csv).
    Bands {
        #[arg(long)]
        nk: Option<usize>,
    },
    /// Open-flake spectrum versus gauge phase (writes butterfly.csv).
    Butterfly {
        #[arg(long)]
        theta_from: Option<f64>,
        #[arg(long)]
        theta_to: Option<f64>,
        #[arg(long)]
        theta_points: Option<usize>,
        /// Half-width of the middle-cluster window, MHz.
        #[arg(long)]
        window: Option<f64>,
    },
    /// Pumped steady state (writes sspn.csv).
    Steady {
        /// single_b, rm1, rm2 or rm3.
        #[arg(long)]
        kind: Option<PumpKind>,
        /// Loss rate κ/2π, kHz.
        #[arg(long)]
        kappa: Option<f64>,
        /// Pump detuning Ω_P/2π, MHz.
        #[arg(long)]
        detuning: Option<f64>,
    },
    /// Localization factor of all four pumps versus T_BC (writes locfactor.csv).
    Sweep {
        #[arg(long)]
        tbc_from: Option<f64>,
        #[arg(long)]
        tbc_to: Option<f64>,
        #[arg(long)]
        points: Option<usize>,
        /// Mode detuning Δ/2π, GHz.
        #[arg(long)]
        delta: Option<f64>,
    },
    /// Ring-mode states at the pump anchor and the lattice matrix
    /// (writes ringmodes.csv and hamiltonian.csv).
    Ringmodes,
    /// Unit-cell eigenmodes and couplings (writes circuit_report.json).
    Circuit {
        /// d.c. SQUID bias, Φ0.
        #[arg(long)]
        phi_dc: Option<f64>,
        /// Junction critical current, µA.
        #[arg(long)]
        i_j: Option<f64>,
    },
    /// 1/f noise propagation (writes noise_report.json).
    Noise {
        #[arg(long)]
        f_min: Option<f64>,
        #[arg(long)]
        f_max: Option<f64>,
    },
}

#[derive(Debug)]
enum Failure {
    Config(String),
    Solver(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config { .. }
            | Error::InvalidParameter { .. }
            | Error::EmptyLattice { .. }
            | Error::FluxQuantization { .. }
            | Error::SiteOutOfRange { .. }
            | Error::FootprintOutside { .. }
            | Error::GaugeMismatch { .. }
            | Error::DimensionCap { .. } => Failure::Config(e.to_string()),
            other => Failure::Solver(other.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Solver(format!("I/O error: {e}"))
    }
}

fn set<T>(slot: &mut T, value: Option<T>) {
    if let Some(v) = value {
        *slot = v;
    }
}

fn load_config(cli: &Cli) -> Result<RunConfig, Failure> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::from_path(path)?,
        None => RunConfig::default(),
    };
    let l = &cli.lattice;
    set(&mut cfg.lattice.nx, l.nx);
    set(&mut cfg.lattice.ny, l.ny);
    set(&mut cfg.lattice.t_mhz, l.t_mhz);
    set(&mut cfg.lattice.theta_over_pi, l.theta_over_pi);
    set(&mut cfg.lattice.tprime_mhz, l.tprime_mhz);
    set(&mut cfg.pump.anchor_m, l.anchor_m);
    set(&mut cfg.pump.anchor_n, l.anchor_n);
    match &cli.command {
        Command::Bands { nk } => set(&mut cfg.bands.nk, *nk),
        Command::Butterfly { theta_from, theta_to, theta_points, window } => {
            set(&mut cfg.butterfly.theta_from_over_pi, *theta_from);
            set(&mut cfg.butterfly.theta_to_over_pi, *theta_to);
            set(&mut cfg.butterfly.theta_points, *theta_points);
            if window.is_some() {
                cfg.butterfly.window_mhz = *window;
            }
        }
        Command::Steady { kind, kappa, detuning } => {
            set(&mut cfg.pump.kind, *kind);
            set(&mut cfg.pump.kappa_khz, *kappa);
            set(&mut cfg.pump.omega_p_mhz, *detuning);
        }
        Command::Sweep { tbc_from, tbc_to, points, delta } => {
            set(&mut cfg.sweep.tbc_from_mhz, *tbc_from);
            set(&mut cfg.sweep.tbc_to_mhz, *tbc_to);
            set(&mut cfg.sweep.points, *points);
            set(&mut cfg.sweep.delta_ghz, *delta);
        }
        Command::Ringmodes => {}
        Command::Circuit { phi_dc, i_j } => {
            set(&mut cfg.circuit.Phi_dc_Phi0, *phi_dc);
            set(&mut cfg.circuit.I_J_uA, *i_j);
        }
        Command::Noise { f_min, f_max } => {
            set(&mut cfg.noise.f_min_Hz, *f_min);
            set(&mut cfg.noise.f_max_Hz, *f_max);
        }
    }
    cfg.validate()?;
    cfg.lattice_spec().validate()?;
    Ok(cfg)
}

fn run(cli: &Cli) -> Result<String, Failure> {
    let cfg = load_config(cli)?;
    let dir = cli.output_dir.as_path();
    std::fs::create_dir_all(dir)?;
    match &cli.command {
        Command::Bands { .. } => bands(&cfg, dir, cli.format),
        Command::Butterfly { .. } => butterfly(&cfg, dir, cli.format),
        Command::Steady { .. } => steady(&cfg, dir, cli.format),
        Command::Sweep { .. } => sweep(&cfg, dir, cli.format),
        Command::Ringmodes => ringmodes(&cfg, dir, cli.format),
        Command::Circuit { .. } => circuit(&cfg, dir),
        Command::Noise { .. } => noise(&cfg, dir),
    }
}

fn bands(cfg: &RunConfig, dir: &Path, format: Format) -> Result<String, Failure> {
    let spec = cfg.lattice_spec();
    let surface = band_grid(cfg.bands.nk, spec.hopping, spec.nnn_tprime)?;
    let mut table = Table::new(&["kx", "ky", "E_minus_MHz", "E_zero_MHz", "E_plus_MHz"]);
    for i in 0..surface.nk {
        for j in 0..surface.nk {
            let (kx, ky) = surface.k(i, j);
            let e = surface.at(i, j).map(angular_to_mhz);
            table.push(vec![kx.into(), ky.into(), e[0].into(), e[1].into(), e[2].into()]);
        }
    }
    table.write(dir, "bands", format)?;
    let flat = flatness(&surface, 1)?;
    Ok(format!("middle band width: {:.3} MHz (flatness ratio {:.3e})", angular_to_mhz(flat.width), flat.ratio))
}

fn butterfly(cfg: &RunConfig, dir: &Path, format: Format) -> Result<String, Failure> {
    let spec = cfg.lattice_spec();
    let thetas = cfg.theta_grid();
    let spectrum =
        butterfly_with_cap(spec.nx, spec.ny, spec.hopping, spec.nnn_tprime, &thetas, cfg.butterfly.dim_cap)?;
    let mut table = Table::new(&["theta_over_pi", "eigen_index", "energy_MHz"]);
    for (theta, energies) in thetas.iter().zip(&spectrum.energies) {
        for (k, e) in energies.iter().enumerate() {
            table.push(vec![(theta / std::f64::consts::PI).into(), k.into(), angular_to_mhz(*e).into()]);
        }
    }
    table.write(dir, "butterfly", format)?;
    let mut summary = format!("butterfly: {} theta values x {} eigenvalues", thetas.len(), spec.dim());
    if let Some(w) = cfg.butterfly.window_mhz {
        let widths = middle_cluster_width(&spectrum, mhz_to_angular(w))?;
        let max = widths.iter().copied().fold(0.0, f64::max);
        summary.push_str(&format!(", max middle-cluster width: {:.3} MHz", angular_to_mhz(max)));
    }
    Ok(summary)
}

fn steady(cfg: &RunConfig, dir: &Path, format: Format) -> Result<String, Failure> {
    let spec = cfg.lattice_spec();
    let pumps = cfg.sweep_pumps();
    let h = build_lieb(&spec)?;
    let pump = make_pump(cfg.pump.kind, pumps.anchor, pumps.t_p, pumps.kappa, &spec)?.with_detuning(pumps.detuning);
    let result = steady_state(&h, &pump)?;
    let lf = localization_factor(&result, &pump, &spec)?;
    let mut table = Table::new(&["m", "n", "sublattice", "re_a", "im_a", "sspn"]);
    for (i, (a, n)) in result.amplitudes.iter().zip(&result.sspn).enumerate() {
        let site = SiteIndex::from_flat(i, spec.nx);
        table.push(vec![site.m.into(), site.n.into(), site.sublattice.label().into(), a.re.into(), a.im.into(), (*n).into()]);
    }
    table.write(dir, "sspn", format)?;
    let total: f64 = result.sspn.iter().sum();
    Ok(format!(
        "localization factor ({}): {:.6}, total photons: {:.6e}",
        cfg.pump.kind.label(),
        lf,
        total
    ))
}

fn sweep(cfg: &RunConfig, dir: &Path, format: Format) -> Result<String, Failure> {
    let rows = localization_sweep(&cfg.tbc_grid(), cfg.sweep_delta(), &cfg.lattice_spec(), &cfg.sweep_pumps())?;
    let mut table = Table::new(&["tbc_dc_MHz", "lf_single", "lf_rm1", "lf_rm2", "lf_rm3"]);
    for r in &rows {
        table.push(vec![angular_to_mhz(r.tbc).into(), r.lf[0].into(), r.lf[1].into(), r.lf[2].into(), r.lf[3].into()]);
    }
    table.write(dir, "locfactor", format)?;
    let last = rows.last().expect("sweep has at least one point");
    Ok(format!(
        "localization factor at T_BC = {:.3} MHz: single {:.4}, RM1 {:.4}, RM2 {:.4}, RM3 {:.4}",
        angular_to_mhz(last.tbc),
        last.lf[0],
        last.lf[1],
        last.lf[2],
        last.lf[3]
    ))
}

fn ringmodes(cfg: &RunConfig, dir: &Path, format: Format) -> Result<String, Failure> {
    let spec = cfg.lattice_spec();
    let anchor = cfg.anchor();
    let mut table = Table::new(&["kind", "m", "n", "sublattice", "re", "im"]);
    let mut residuals = Vec::new();
    for (kind, label, theta) in [
        (RingModeKind::Rm1, "rm1", 0.0),
        (RingModeKind::Rm2, "rm2", 0.0),
        (RingModeKind::Rm3, "rm3", std::f64::consts::PI / 3.0),
    ] {
        let lattice = spec.with_gauge(theta);
        let state = ring_mode(kind, anchor, &lattice)?;
        residuals.push(interference_residual(&state, &build_lieb(&lattice)?)?);
        for i in state.support() {
            let site = SiteIndex::from_flat(i, spec.nx);
            let z = state.0[i];
            table.push(vec![label.into(), site.m.into(), site.n.into(), site.sublattice.label().into(), z.re.into(), z.im.into()]);
        }
    }
    table.write(dir, "ringmodes", format)?;
    let mut coo = Table::new(&["row", "col", "re", "im"]);
    for (r, c, z) in build_lieb(&spec)?.coordinate_list() {
        coo.push(vec![r.into(), c.into(), z.re.into(), z.im.into()]);
    }
    coo.write(dir, "hamiltonian", format)?;
    let t = spec.hopping.max(f64::MIN_POSITIVE);
    Ok(format!(
        "ring-mode residual / T: RM1 {:.3e}, RM2 {:.3e}, RM3 {:.3e}",
        residuals[0] / t,
        residuals[1] / t,
        residuals[2] / t
    ))
}

fn circuit(cfg: &RunConfig, dir: &Path) -> Result<String, Failure> {
    let p = cfg.circuit_params();
    p.validate()?;
    let report = CircuitReport::compute(
        &p,
        ghz_to_angular(cfg.circuit.Delta_GHz),
        mhz_to_angular(cfg.circuit.target_T_MHz),
    )?;
    for w in &report.warnings {
        log::warn!("{w}");
    }
    output::write_json(&dir.join("circuit_report.json"), &report)?;
    let f: Vec<String> = report.modes.iter().map(|m| format!("{}={:.3}", m.mode, m.frequency_GHz)).collect();
    let dc: Vec<String> = report.dc_mixing.iter().map(|e| format!("{}={:.2}", e.pair, e.value_MHz)).collect();
    Ok(format!("eigenfrequencies (GHz): {}; T_dc (MHz): {}", f.join(" "), dc.join(" ")))
}

fn noise(cfg: &RunConfig, dir: &Path) -> Result<String, Failure> {
    let n = &cfg.noise;
    let scenario = NoiseScenario {
        f_min_hz: n.f_min_Hz,
        f_max_hz: n.f_max_Hz,
        flux_offsets: [n.flux_dPhi_min_Phi0, n.flux_dPhi_max_Phi0],
        current_amplitudes: [n.current_A_min, n.current_A_max],
    };
    let p = cfg.circuit_params();
    p.validate()?;
    let report = NoiseReport::compute(&p, &scenario, cfg.lattice_spec().hopping)?;
    output::write_json(&dir.join("noise_report.json"), &report)?;
    Ok(format!(
        "worst-case shifts / T: flux δω {:.3e}, δT {:.3e}; critical current δω {:.3e}, δT {:.3e}",
        report.flux.delta_omega_over_T,
        report.flux.delta_T_over_T,
        report.critical_current.delta_omega_over_T,
        report.critical_current.delta_T_over_T
    ))
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(summary) => {
            println!("{summary}");
            ExitCode::SUCCESS
        }
        Err(Failure::Config(msg)) => {
            eprintln!("liebsim: invalid configuration: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Solver(msg)) => {
            eprintln!("liebsim: {msg}");
            ExitCode::from(1)
        }
    }
}
