//! Command-line pipeline: collect a trajectory, select a basis, train the
//! fusion policy, evaluate controllers, run ablations, or brute-force the
//! oracle. Each subcommand reads its predecessor's artifacts and writes its
//! outputs plus a manifest into `--out`.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use fusian::pipeline::{
    run_ablate, run_collect, run_eval, run_oracle, run_select, run_train, AblateArgs, CollectArgs,
    EnvKind, EvalArgs, MethodKind, OracleArgs, SelectArgs, TrainArgs,
};

#[derive(Parser)]
#[command(
    name = "fusian",
    version,
    about = "Continuous trait-intensity control via RL-fused adapters"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the toy fine-tuning loop and capture the scored trajectory.
    Collect {
        /// Toy fine-tuning config (JSON).
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Filter a trajectory for stability and select the fusion basis.
    Select {
        /// Trajectory library JSON from `collect`.
        #[arg(long = "lib")]
        library: PathBuf,
        /// Selection config (JSON); defaults to W=3, threshold 10, N=10.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Train the Dirichlet fusion policy against an environment.
    Train {
        #[arg(long)]
        env: EnvKind,
        /// Environment config (JSON).
        #[arg(long)]
        config: PathBuf,
        /// Basis JSON from `select`; optional for the analytic environment.
        #[arg(long)]
        basis: Option<PathBuf>,
        /// Training/reward config (JSON with optional `train` and `reward`).
        #[arg(long = "train-config")]
        train_config: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        /// Disable environment evaluation noise during training.
        #[arg(long = "no-noise")]
        no_noise: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Evaluate a controller over the target grid (noise off).
    Eval {
        #[arg(long)]
        env: EnvKind,
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        basis: Option<PathBuf>,
        /// Policy checkpoint (required for --method fusian).
        #[arg(long)]
        policy: Option<PathBuf>,
        #[arg(long)]
        method: MethodKind,
        /// Comma-separated target list; defaults to {0,10,...,100} within
        /// the controllable range.
        #[arg(long, value_delimiter = ',')]
        targets: Option<Vec<f64>>,
        /// Simplex grid resolution for --method oracle.
        #[arg(long = "grid-step", default_value_t = 0.01)]
        grid_step: f64,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Compare the full method against its ablated variants.
    Ablate {
        #[arg(long)]
        env: EnvKind,
        #[arg(long)]
        config: PathBuf,
        /// Trajectory library (enables the no_stable_basis variant).
        #[arg(long = "lib")]
        library: Option<PathBuf>,
        #[arg(long = "train-config")]
        train_config: Option<PathBuf>,
        #[arg(long = "select-config")]
        select_config: Option<PathBuf>,
        /// Comma-separated subset of full,no_dynamic_fusion,no_stable_basis,
        /// no_aggressive_reward.
        #[arg(long, value_delimiter = ',')]
        variants: Option<Vec<String>>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long = "no-noise")]
        no_noise: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Brute-force the best reachable weights per target (analytic env).
    Oracle {
        /// Analytic environment config (JSON).
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_delimiter = ',')]
        targets: Option<Vec<f64>>,
        #[arg(long = "grid-step", default_value_t = 0.01)]
        grid_step: f64,
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Collect { config, seed, out } => {
            run_collect(&CollectArgs { config, seed, out }).map(|o| {
                println!("library written to {}", o.library_path.display());
            })
        }
        Command::Select { library, config, out } => {
            run_select(&SelectArgs { library, config, out }).map(|o| {
                println!("basis written to {}", o.basis_path.display());
            })
        }
        Command::Train { env, config, basis, train_config, seed, no_noise, out } => {
            run_train(&TrainArgs { env, config, basis, train_config, seed, no_noise, out })
                .map(|o| {
                    println!("policy written to {} (seed {})", o.policy_path.display(), o.seed);
                })
        }
        Command::Eval { env, config, basis, policy, method, targets, grid_step, seed, out } => {
            run_eval(&EvalArgs {
                env,
                config,
                basis,
                policy,
                method,
                targets,
                grid_step,
                seed,
                out,
            })
            .map(|s| {
                println!("{}: mae = {:.4}, pearson_r = {:.4}", s.method, s.mae, s.pearson_r);
            })
        }
        Command::Ablate {
            env,
            config,
            library,
            train_config,
            select_config,
            variants,
            seed,
            no_noise,
            out,
        } => run_ablate(&AblateArgs {
            env,
            config,
            library,
            train_config,
            select_config,
            variants,
            seed,
            no_noise,
            out,
        })
        .map(|rows| {
            for row in rows {
                println!(
                    "{:<22} mae = {:>8.4}  pearson_r = {:>7.4}",
                    row.variant, row.mae, row.pearson_r
                );
            }
        }),
        Command::Oracle { config, targets, grid_step, out } => {
            run_oracle(&OracleArgs { config, targets, grid_step, out }).map(|path| {
                println!("oracle table written to {}", path.display());
            })
        }
    };

    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
