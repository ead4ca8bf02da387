use clap::{Args, Parser, Subcommand};
use rabi_sim::config::{CouplingKind, PropagationKind, RunConfig, Scenario, Solver};
use rabi_sim::error::{ConfigError, SimError};
use rabi_sim::manifest::config_from_text;
use rabi_sim::run_scenario;
use std::path::PathBuf;
use std::process::ExitCode;

/// Rabi model with dephasing: master equation, quantum trajectories,
/// stochastic-frequency ensembles and scenario presets.
#[derive(Parser)]
#[command(name = "rabi", version)]
struct Cli {
    /// TOML run configuration, or a manifest.json from an earlier run.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    n_max: Option<usize>,
    /// Output directory [default: out/<scenario>].
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    /// Worker threads; 0 or absent uses all cores. Output does not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate the master equation.
    Evolve(ModelArgs),
    /// Quantum-jump ensemble for the dephasing channel.
    Trajectories {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        n_traj: Option<usize>,
        /// Single trajectories written with their jump times.
        #[arg(long)]
        singles: Option<usize>,
        #[arg(long, value_enum)]
        propagation: Option<PropagationArg>,
    },
    /// Ensemble over random atomic-frequency paths.
    Noise {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        x: Option<f64>,
        #[arg(long)]
        epsilon: Option<f64>,
        #[arg(long)]
        dt: Option<f64>,
        #[arg(long)]
        n_runs: Option<usize>,
        /// Use |r| in the outer branches of the frequency update.
        #[arg(long)]
        outer_branch_abs_r: bool,
    },
    /// Photon-generation rate against one parameter.
    Sweep {
        #[command(flatten)]
        model: ModelArgs,
        /// omega0_sum, g or gamma_ph.
        #[arg(long)]
        axis: String,
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<f64>,
    },
    /// Rabi coupling against the unit-weight ladder variant.
    CompareHe(ModelArgs),
    /// Run a named preset.
    Run {
        /// fig1a, fig1b, fig1c, fig2-traj, fig2d-jc, fig2e-phase, fig3a,
        /// fig3b, fig3c, fig4, fig5a, fig5b, fig5c or custom.
        preset: Option<String>,
    },
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum PropagationArg {
    Adaptive,
    Spectral,
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum CouplingArg {
    Rabi,
    Jc,
    Phase,
}

#[derive(Args, Default)]
struct ModelArgs {
    #[arg(long)]
    g: Option<f64>,
    #[arg(long)]
    omega0: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    detuning: Option<f64>,
    #[arg(long)]
    gamma_ph: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    kappa: Option<f64>,
    #[arg(long)]
    n_t: Option<f64>,
    /// g<n>, e<n> or phi1..phi6.
    #[arg(long)]
    initial: Option<String>,
    #[arg(long, value_enum)]
    coupling: Option<CouplingArg>,
    #[arg(long)]
    tau_end: Option<f64>,
    #[arg(long)]
    n_samples: Option<usize>,
}

impl ModelArgs {
    fn apply(&self, cfg: &mut RunConfig) {
        let p = &mut cfg.params;
        macro_rules! set {
            ($($dst:expr => $src:expr),*) => {$( if let Some(v) = $src { $dst = Some(v); } )*};
        }
        set!(p.g => self.g, p.omega0 => self.omega0, p.detuning => self.detuning,
             p.gamma_ph => self.gamma_ph, p.gamma => self.gamma, p.kappa => self.kappa,
             p.n_t => self.n_t, cfg.grid.tau_end => self.tau_end,
             cfg.grid.n_samples => self.n_samples);
        if self.tau_end.is_some() {
            cfg.grid.t_end = None;
        }
        if let Some(s) = &self.initial {
            cfg.initial = Some(s.clone());
        }
        if let Some(c) = self.coupling {
            cfg.coupling = Some(match c {
                CouplingArg::Rabi => CouplingKind::Rabi,
                CouplingArg::Jc => CouplingKind::Jc,
                CouplingArg::Phase => CouplingKind::Phase,
            });
        }
    }
}

fn load(path: &PathBuf) -> Result<RunConfig, ConfigError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ConfigError::invalid("--config", format!("{}: {e}", path.display())))?;
    config_from_text(&text)
}

fn build(cli: &Cli) -> Result<RunConfig, ConfigError> {
    let mut cfg = match &cli.config {
        Some(p) => load(p)?,
        None => RunConfig::default(),
    };
    match &cli.command {
        Command::Evolve(m) => {
            cfg.solver = Some(Solver::Master);
            m.apply(&mut cfg);
        }
        Command::Trajectories {
            model,
            n_traj,
            singles,
            propagation,
        } => {
            cfg.solver = Some(Solver::Trajectory);
            model.apply(&mut cfg);
            cfg.ensemble.size = n_traj.or(cfg.ensemble.size);
            cfg.ensemble.singles = singles.or(cfg.ensemble.singles);
            if let Some(p) = propagation {
                cfg.ensemble.propagation = Some(match p {
                    PropagationArg::Adaptive => PropagationKind::Adaptive,
                    PropagationArg::Spectral => PropagationKind::Spectral,
                });
            }
        }
        Command::Noise {
            model,
            x,
            epsilon,
            dt,
            n_runs,
            outer_branch_abs_r,
        } => {
            cfg.solver = Some(Solver::Stochastic);
            model.apply(&mut cfg);
            cfg.noise.x = x.or(cfg.noise.x);
            cfg.noise.epsilon = epsilon.or(cfg.noise.epsilon);
            cfg.noise.dt = dt.or(cfg.noise.dt);
            cfg.ensemble.size = n_runs.or(cfg.ensemble.size);
            if *outer_branch_abs_r {
                cfg.noise.outer_branch_abs_r = Some(true);
            }
        }
        Command::Sweep {
            model,
            axis,
            values,
        } => {
            cfg.solver = Some(Solver::Master);
            model.apply(&mut cfg);
            cfg.sweep.axis = Some(axis.clone());
            cfg.sweep.values = Some(values.clone());
        }
        Command::CompareHe(m) => {
            if cli.config.is_none() {
                cfg.scenario = Scenario::Fig2ePhase;
            }
            m.apply(&mut cfg);
        }
        Command::Run { preset } => {
            if let Some(name) = preset {
                cfg.scenario = Scenario::from_name(name).ok_or_else(|| {
                    ConfigError::invalid("preset", format!("unknown preset {name:?}"))
                })?;
            }
        }
    }
    if let Some(s) = cli.seed {
        cfg.ensemble.master_seed = Some(s);
    }
    if let Some(n) = cli.n_max {
        cfg.n_max = Some(n);
    }
    if let Some(d) = &cli.out_dir {
        cfg.out_dir = Some(d.display().to_string());
    }
    cfg.resolve()?;
    Ok(cfg)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    let cfg = match build(&cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let out_dir = cfg
        .out_dir
        .clone()
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("out").join(cfg.scenario.name()));
    match run_scenario(&cfg, &out_dir, cli.threads) {
        Ok(report) => {
            for line in &report.summary {
                println!("{line}");
            }
            println!(
                "wrote {} file(s) to {}",
                report.manifest.files.len(),
                out_dir.display()
            );
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &SimError) -> u8 {
    e.exit_code() as u8
}
