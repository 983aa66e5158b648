//! File-based pipeline commands behind the CLI: each stage reads its
//! predecessor's artifacts, writes its own next to a manifest, and exits
//! with a stable code on failure (0 success, 2 config error, 3 missing
//! input, 4 format/version, 5 numerical failure).

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::adapter::{
    load_basis, load_library, save_basis, save_library, Adapter, AdapterError, BasisSet,
};
use crate::envs::{
    oracle_best_weights, AnalyticEnv, AnalyticEnvConfig, EnvError, Environment, ToySftConfig,
    ToySftEnv,
};
use crate::manifest::{config_hash, ManifestTimer};
use crate::metrics::{
    default_grid, eval_grid, run_ablations, AblationVariant, BasisSource, InterpController,
    MetricsError, NearestController, OracleController, PolicyMeanController,
    ScaledVectorController,
};
use crate::policy::{PolicyError, PolicyParams};
use crate::selection::{select_basis, SelectionConfig, SelectionError};
use crate::trainer::{RewardConfig, RewardSpec, TrainConfig, TrainError};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("config error: {0}")]
    Config(String),
    #[error("missing input: {0}")]
    MissingInput(String),
    #[error("format/version error: {0}")]
    Format(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("{0}")]
    Other(String),
}

impl PipelineError {
    pub fn exit_code(&self) -> i32 {
        match self {
            PipelineError::Config(_) => 2,
            PipelineError::MissingInput(_) => 3,
            PipelineError::Format(_) => 4,
            PipelineError::Numerical(_) => 5,
            PipelineError::Other(_) => 1,
        }
    }
}

impl From<AdapterError> for PipelineError {
    fn from(e: AdapterError) -> Self {
        match e {
            AdapterError::FormatError { .. } => PipelineError::Format(e.to_string()),
            AdapterError::VersionError { .. } => PipelineError::Format(e.to_string()),
            AdapterError::Io { ref detail, .. } if detail.contains("No such file") => {
                PipelineError::MissingInput(e.to_string())
            }
            AdapterError::NonFinite { .. } => PipelineError::Numerical(e.to_string()),
            other => PipelineError::Config(other.to_string()),
        }
    }
}

impl From<EnvError> for PipelineError {
    fn from(e: EnvError) -> Self {
        match e {
            EnvError::InvalidConfig(_) | EnvError::OracleUnsupported(_) => {
                PipelineError::Config(e.to_string())
            }
            EnvError::NeutralResponses => PipelineError::Numerical(e.to_string()),
            EnvError::Adapter(inner) => inner.into(),
            other => PipelineError::Other(other.to_string()),
        }
    }
}

impl From<SelectionError> for PipelineError {
    fn from(e: SelectionError) -> Self {
        match e {
            SelectionError::Adapter(inner) => inner.into(),
            other => PipelineError::Config(other.to_string()),
        }
    }
}

impl From<PolicyError> for PipelineError {
    fn from(e: PolicyError) -> Self {
        match e {
            PolicyError::FormatError { .. } => PipelineError::Format(e.to_string()),
            PolicyError::VersionError { .. } => PipelineError::Format(e.to_string()),
            PolicyError::Io { ref detail, .. } if detail.contains("No such file") => {
                PipelineError::MissingInput(e.to_string())
            }
            PolicyError::NumericalError(_) => PipelineError::Numerical(e.to_string()),
            other => PipelineError::Config(other.to_string()),
        }
    }
}

impl From<MetricsError> for PipelineError {
    fn from(e: MetricsError) -> Self {
        match e {
            MetricsError::Env(inner) => inner.into(),
            MetricsError::Adapter(inner) => inner.into(),
            MetricsError::Policy(inner) => inner.into(),
            MetricsError::Train(inner) => inner.into(),
            MetricsError::Selection(inner) => inner.into(),
            MetricsError::Dirichlet(inner) => PipelineError::Numerical(inner.to_string()),
            other => PipelineError::Config(other.to_string()),
        }
    }
}

impl From<TrainError> for PipelineError {
    fn from(e: TrainError) -> Self {
        match e {
            TrainError::NumericalError { .. } => PipelineError::Numerical(e.to_string()),
            TrainError::Dirichlet(inner) => PipelineError::Numerical(inner.to_string()),
            TrainError::Env { .. } => PipelineError::Numerical(e.to_string()),
            TrainError::Adapter(inner) => inner.into(),
            TrainError::Policy(inner) => inner.into(),
            other => PipelineError::Config(other.to_string()),
        }
    }
}

impl From<io::Error> for PipelineError {
    fn from(e: io::Error) -> Self {
        if e.kind() == io::ErrorKind::NotFound {
            PipelineError::MissingInput(e.to_string())
        } else {
            PipelineError::Other(e.to_string())
        }
    }
}

/// Which subject environment a command runs against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EnvKind {
    Analytic,
    #[serde(rename = "toysft")]
    ToySft,
}

impl std::str::FromStr for EnvKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "analytic" => Ok(EnvKind::Analytic),
            "toysft" => Ok(EnvKind::ToySft),
            other => Err(format!("unknown env {other:?} (expected analytic|toysft)")),
        }
    }
}

/// Evaluation method selected by `--method`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MethodKind {
    Fusian,
    Nearest,
    Interp,
    Scaled,
    Oracle,
}

impl MethodKind {
    pub fn label(&self) -> &'static str {
        match self {
            MethodKind::Fusian => "fusian",
            MethodKind::Nearest => "nearest",
            MethodKind::Interp => "interp",
            MethodKind::Scaled => "scaled",
            MethodKind::Oracle => "oracle",
        }
    }
}

impl std::str::FromStr for MethodKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "fusian" => Ok(MethodKind::Fusian),
            "nearest" => Ok(MethodKind::Nearest),
            "interp" => Ok(MethodKind::Interp),
            "scaled" => Ok(MethodKind::Scaled),
            "oracle" => Ok(MethodKind::Oracle),
            other => Err(format!(
                "unknown method {other:?} (expected fusian|nearest|interp|scaled|oracle)"
            )),
        }
    }
}

/// Concrete environment config loaded from `--config`.
#[derive(Debug, Clone)]
pub enum EnvSpec {
    Analytic(AnalyticEnvConfig),
    ToySft(ToySftConfig),
}

impl EnvSpec {
    pub fn load(kind: EnvKind, path: &Path) -> Result<Self, PipelineError> {
        match kind {
            EnvKind::Analytic => Ok(EnvSpec::Analytic(load_json_config(path)?)),
            EnvKind::ToySft => Ok(EnvSpec::ToySft(load_json_config(path)?)),
        }
    }

    pub fn seed(&self) -> Option<u64> {
        match self {
            EnvSpec::Analytic(c) => c.seed,
            EnvSpec::ToySft(c) => c.seed,
        }
    }

    pub fn set_seed(&mut self, seed: u64) {
        match self {
            EnvSpec::Analytic(c) => c.seed = Some(seed),
            EnvSpec::ToySft(c) => c.seed = Some(seed),
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        match self {
            EnvSpec::Analytic(c) => serde_json::to_value(c).unwrap_or_default(),
            EnvSpec::ToySft(c) => serde_json::to_value(c).unwrap_or_default(),
        }
    }

    fn build(&self, noise_enabled: bool) -> Result<BuiltEnv, PipelineError> {
        match self {
            EnvSpec::Analytic(cfg) => Ok(BuiltEnv::Analytic(
                AnalyticEnv::new(cfg.clone())?.with_noise_enabled(noise_enabled),
            )),
            EnvSpec::ToySft(cfg) => Ok(BuiltEnv::ToySft(ToySftEnv::new(cfg.clone())?)),
        }
    }
}

enum BuiltEnv {
    Analytic(AnalyticEnv),
    ToySft(ToySftEnv),
}

impl BuiltEnv {
    fn as_env(&self) -> &dyn Environment {
        match self {
            BuiltEnv::Analytic(e) => e,
            BuiltEnv::ToySft(e) => e,
        }
    }
}

fn load_json_config<T: DeserializeOwned>(path: &Path) -> Result<T, PipelineError> {
    let text = fs::read_to_string(path).map_err(|e| {
        if e.kind() == io::ErrorKind::NotFound {
            PipelineError::MissingInput(format!("config {}: {e}", path.display()))
        } else {
            PipelineError::Other(format!("config {}: {e}", path.display()))
        }
    })?;
    serde_json::from_str(&text)
        .map_err(|e| PipelineError::Config(format!("config {}: {e}", path.display())))
}

fn resolve_seed(cli: Option<u64>, config: Option<u64>) -> u64 {
    use rand::Rng;
    cli.or(config).unwrap_or_else(|| rand::rng().random())
}

fn ensure_dir(dir: &Path) -> Result<(), PipelineError> {
    fs::create_dir_all(dir).map_err(|e| {
        PipelineError::Other(format!("cannot create output dir {}: {e}", dir.display()))
    })
}

fn csv_writer(path: &Path) -> Result<csv::Writer<fs::File>, PipelineError> {
    csv::Writer::from_path(path)
        .map_err(|e| PipelineError::Other(format!("cannot write {}: {e}", path.display())))
}

fn finish_csv(mut w: csv::Writer<fs::File>, path: &Path) -> Result<(), PipelineError> {
    w.flush()
        .map_err(|e| PipelineError::Other(format!("cannot flush {}: {e}", path.display())))
}

// ---------------------------------------------------------------------------
// collect
// ---------------------------------------------------------------------------

pub struct CollectArgs {
    pub config: PathBuf,
    pub seed: Option<u64>,
    pub out: PathBuf,
}

#[derive(Debug)]
pub struct CollectOutput {
    pub library_path: PathBuf,
    pub seed: u64,
}

/// Run the toy fine-tuning collection stage and write the trajectory library,
/// a per-step score CSV, and the manifest.
pub fn run_collect(args: &CollectArgs) -> Result<CollectOutput, PipelineError> {
    let timer = ManifestTimer::start(format!("fusian collect --config {}", args.config.display()));
    let mut cfg: ToySftConfig = load_json_config(&args.config)?;
    let seed = resolve_seed(args.seed, cfg.seed);
    cfg.seed = Some(seed);
    ensure_dir(&args.out)?;

    let env = ToySftEnv::new(cfg.clone())?;
    let run = env.collect()?;
    for step in &run.skipped_steps {
        eprintln!("warning: step {step} answered all-neutral; checkpoint skipped");
    }

    let library_path = args.out.join("library.json");
    save_library(&run.library, &library_path)?;

    let scores_path = args.out.join("trajectory_scores.csv");
    let mut w = csv_writer(&scores_path)?;
    w.write_record(["step", "trait_percentage"])
        .map_err(|e| PipelineError::Other(e.to_string()))?;
    for cp in run.library.checkpoints() {
        w.write_record(&[cp.step.to_string(), format!("{}", cp.trait_percentage)])
            .map_err(|e| PipelineError::Other(e.to_string()))?;
    }
    finish_csv(w, &scores_path)?;

    let manifest = timer.finish(
        seed,
        serde_json::to_value(&cfg).unwrap_or_default(),
        vec![args.config.clone()],
        vec![library_path.clone(), scores_path],
    );
    manifest.write(&args.out)?;
    Ok(CollectOutput { library_path, seed })
}

// ---------------------------------------------------------------------------
// select
// ---------------------------------------------------------------------------

pub struct SelectArgs {
    pub library: PathBuf,
    pub config: Option<PathBuf>,
    pub out: PathBuf,
}

#[derive(Debug)]
pub struct SelectOutput {
    pub basis_path: PathBuf,
}

/// Variance-filter a trajectory library, select the basis, and write it with
/// the per-checkpoint selection report.
pub fn run_select(args: &SelectArgs) -> Result<SelectOutput, PipelineError> {
    let timer = ManifestTimer::start(format!("fusian select --lib {}", args.library.display()));
    let cfg: SelectionConfig = match &args.config {
        Some(path) => load_json_config(path)?,
        None => SelectionConfig::default(),
    };
    let lib = load_library(&args.library)?;
    ensure_dir(&args.out)?;

    let (basis, report) = select_basis(&lib, &cfg)?;
    let basis_path = args.out.join("basis.json");
    save_basis(&basis, &basis_path)?;

    let report_path = args.out.join("selection_report.csv");
    let mut w = csv_writer(&report_path)?;
    w.write_record(["step", "trait_percentage", "window_variance", "kept", "selected"])
        .map_err(|e| PipelineError::Other(e.to_string()))?;
    for rec in &report {
        w.write_record(&[
            rec.step.to_string(),
            format!("{}", rec.trait_percentage),
            format!("{}", rec.window_variance),
            rec.kept.to_string(),
            rec.selected.to_string(),
        ])
        .map_err(|e| PipelineError::Other(e.to_string()))?;
    }
    finish_csv(w, &report_path)?;

    let manifest = timer.finish(
        0,
        serde_json::to_value(&cfg).unwrap_or_default(),
        vec![args.library.clone()],
        vec![basis_path.clone(), report_path],
    );
    manifest.write(&args.out)?;
    Ok(SelectOutput { basis_path })
}

// ---------------------------------------------------------------------------
// train
// ---------------------------------------------------------------------------

/// Optional wrapper file for `--train-config`: `{"train": {...}, "reward":
/// {...}}`, both sections optional.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainFileConfig {
    pub train: TrainConfig,
    pub reward: RewardConfig,
}

pub struct TrainArgs {
    pub env: EnvKind,
    pub config: PathBuf,
    pub basis: Option<PathBuf>,
    pub train_config: Option<PathBuf>,
    pub seed: Option<u64>,
    pub no_noise: bool,
    pub out: PathBuf,
}

#[derive(Debug)]
pub struct TrainOutput {
    pub policy_path: PathBuf,
    pub seed: u64,
}

fn resolve_basis(
    spec: &EnvSpec,
    basis_path: &Option<PathBuf>,
) -> Result<BasisSet, PipelineError> {
    match (basis_path, spec) {
        (Some(path), _) => Ok(load_basis(path)?),
        (None, EnvSpec::Analytic(cfg)) => {
            let env = AnalyticEnv::new(cfg.clone())?;
            Ok(env.basis()?)
        }
        (None, EnvSpec::ToySft(_)) => Err(PipelineError::Config(
            "--basis is required for the toysft environment (run collect + select first)".into(),
        )),
    }
}

/// Train the fusion policy against an environment and write the final
/// checkpoint, per-epoch checkpoints, and the training log.
pub fn run_train(args: &TrainArgs) -> Result<TrainOutput, PipelineError> {
    let timer = ManifestTimer::start(format!(
        "fusian train --env {:?} --config {}",
        args.env,
        args.config.display()
    ));
    let mut spec = EnvSpec::load(args.env, &args.config)?;
    let file_cfg: TrainFileConfig = match &args.train_config {
        Some(path) => load_json_config(path)?,
        None => TrainFileConfig::default(),
    };
    let mut train_cfg = file_cfg.train.clone();
    let reward_cfg = file_cfg.reward;

    let seed = resolve_seed(args.seed, train_cfg.seed.or(spec.seed()));
    train_cfg.seed = Some(seed);
    spec.set_seed(seed);
    ensure_dir(&args.out)?;

    let built = spec.build(!args.no_noise)?;
    let env = built.as_env();
    let basis = resolve_basis(&spec, &args.basis)?;
    let policy = PolicyParams::init(basis.len(), seed);

    let outcome = match crate::trainer::train_policy(
        env,
        &basis,
        policy,
        &train_cfg,
        &RewardSpec::aggressive(reward_cfg),
    ) {
        Ok(outcome) => outcome,
        Err(TrainError::NumericalError { context, last_good }) => {
            let rescue = args.out.join("policy_last_good.json");
            last_good.save(&rescue, seed)?;
            return Err(PipelineError::Numerical(format!(
                "{context}; last good parameters saved to {}",
                rescue.display()
            )));
        }
        Err(other) => return Err(other.into()),
    };

    let policy_path = args.out.join("policy.json");
    outcome.policy.save(&policy_path, seed)?;
    let mut outputs = vec![policy_path.clone()];
    for (epoch, snapshot) in outcome.epoch_snapshots.iter().enumerate() {
        let path = args.out.join(format!("policy_epoch_{epoch:02}.json"));
        snapshot.save(&path, seed)?;
        outputs.push(path);
    }

    let log_path = args.out.join("training_log.csv");
    let mut w = csv_writer(&log_path)?;
    for row in &outcome.log {
        w.serialize(row).map_err(|e| PipelineError::Other(e.to_string()))?;
    }
    finish_csv(w, &log_path)?;
    outputs.push(log_path);

    let manifest = timer.finish(
        seed,
        serde_json::json!({
            "env": spec.to_json(),
            "train": train_cfg,
            "reward": reward_cfg,
        }),
        args.basis.iter().cloned().chain([args.config.clone()]).collect(),
        outputs,
    );
    manifest.write(&args.out)?;
    Ok(TrainOutput { policy_path, seed })
}

// ---------------------------------------------------------------------------
// eval
// ---------------------------------------------------------------------------

pub struct EvalArgs {
    pub env: EnvKind,
    pub config: PathBuf,
    pub basis: Option<PathBuf>,
    pub policy: Option<PathBuf>,
    pub method: MethodKind,
    pub targets: Option<Vec<f64>>,
    pub grid_step: f64,
    pub seed: Option<u64>,
    pub out: PathBuf,
}

#[derive(Debug, Clone, Serialize)]
pub struct EvalSummary {
    pub mae: f64,
    pub pearson_r: f64,
    pub method: String,
    pub config_hash: String,
}

/// Evaluate one controller over the target grid (noise off) and write the
/// per-target report plus a JSON summary.
pub fn run_eval(args: &EvalArgs) -> Result<EvalSummary, PipelineError> {
    let timer = ManifestTimer::start(format!(
        "fusian eval --env {:?} --method {}",
        args.env,
        args.method.label()
    ));
    let mut spec = EnvSpec::load(args.env, &args.config)?;
    let seed = resolve_seed(args.seed, spec.seed());
    spec.set_seed(seed);
    ensure_dir(&args.out)?;

    let built = spec.build(false)?;
    let env = built.as_env();
    let basis = resolve_basis(&spec, &args.basis)?;

    let targets = match &args.targets {
        Some(t) if !t.is_empty() => t.clone(),
        _ => default_grid(env.controllable_range(&basis)?),
    };
    if targets.len() < 2 {
        return Err(PipelineError::Config(format!(
            "evaluation needs at least 2 targets, got {targets:?}"
        )));
    }

    let loaded_policy = match (&args.policy, args.method) {
        (Some(path), MethodKind::Fusian) => Some(PolicyParams::load(path)?.0),
        (None, MethodKind::Fusian) => {
            return Err(PipelineError::Config("--policy is required for --method fusian".into()))
        }
        _ => None,
    };
    if let Some(p) = &loaded_policy {
        if p.n_outputs() != basis.len() {
            return Err(PipelineError::Config(format!(
                "policy has {} outputs for a basis of {}",
                p.n_outputs(),
                basis.len()
            )));
        }
    }

    let scaled_parts = if args.method == MethodKind::Scaled {
        let final_adapter = basis.entries().last().expect("basis is non-empty").adapter.clone();
        let zero = Adapter::zeros(basis.shape_meta().to_vec());
        let p0 = env.evaluate_noiseless(&zero)?;
        let p1 = env.evaluate_noiseless(&final_adapter)?;
        Some((final_adapter, p0, p1))
    } else {
        None
    };

    let report = match args.method {
        MethodKind::Fusian => {
            let controller =
                PolicyMeanController::new(loaded_policy.as_ref().expect("checked above"));
            eval_grid(&controller, env, &basis, &targets, false)
        }
        MethodKind::Nearest => {
            eval_grid(&NearestController::new(&basis), env, &basis, &targets, false)
        }
        MethodKind::Interp => {
            eval_grid(&InterpController::new(&basis), env, &basis, &targets, false)
        }
        MethodKind::Scaled => {
            let (final_adapter, p0, p1) = scaled_parts.expect("set above");
            let controller = ScaledVectorController::new(final_adapter, p0, p1);
            eval_grid(&controller, env, &basis, &targets, false)
        }
        MethodKind::Oracle => match &spec {
            EnvSpec::Analytic(cfg) => {
                let controller = OracleController::new(cfg, args.grid_step);
                eval_grid(&controller, env, &basis, &targets, false)
            }
            EnvSpec::ToySft(_) => {
                return Err(PipelineError::Config(
                    "--method oracle only works on the analytic environment".into(),
                ))
            }
        },
    }?;

    let report_path = args.out.join("report.csv");
    let mut w = csv_writer(&report_path)?;
    w.write_record(["target", "actual", "abs_err"])
        .map_err(|e| PipelineError::Other(e.to_string()))?;
    for (t, a) in &report.pairs {
        w.write_record(&[format!("{t}"), format!("{a}"), format!("{}", (t - a).abs())])
            .map_err(|e| PipelineError::Other(e.to_string()))?;
    }
    finish_csv(w, &report_path)?;

    let summary = EvalSummary {
        mae: report.mae,
        pearson_r: report.pearson_r,
        method: report.method_tag.clone(),
        config_hash: config_hash(&spec.to_json()),
    };
    let summary_path = args.out.join("summary.json");
    fs::write(
        &summary_path,
        serde_json::to_string_pretty(&summary).map_err(|e| PipelineError::Other(e.to_string()))?,
    )?;

    let mut inputs = vec![args.config.clone()];
    inputs.extend(args.basis.iter().cloned());
    inputs.extend(args.policy.iter().cloned());
    let manifest = timer.finish(seed, spec.to_json(), inputs, vec![report_path, summary_path]);
    manifest.write(&args.out)?;
    Ok(summary)
}

// ---------------------------------------------------------------------------
// ablate
// ---------------------------------------------------------------------------

pub struct AblateArgs {
    pub env: EnvKind,
    pub config: PathBuf,
    pub library: Option<PathBuf>,
    pub train_config: Option<PathBuf>,
    pub select_config: Option<PathBuf>,
    pub variants: Option<Vec<String>>,
    pub seed: Option<u64>,
    pub no_noise: bool,
    pub out: PathBuf,
}

/// Run the ablation comparison and write the variant table.
pub fn run_ablate(args: &AblateArgs) -> Result<Vec<crate::metrics::AblationRow>, PipelineError> {
    let timer = ManifestTimer::start(format!(
        "fusian ablate --env {:?} --config {}",
        args.env,
        args.config.display()
    ));
    let mut spec = EnvSpec::load(args.env, &args.config)?;
    let file_cfg: TrainFileConfig = match &args.train_config {
        Some(path) => load_json_config(path)?,
        None => TrainFileConfig::default(),
    };
    let sel_cfg: SelectionConfig = match &args.select_config {
        Some(path) => load_json_config(path)?,
        None => SelectionConfig::default(),
    };
    let mut train_cfg = file_cfg.train.clone();
    let seed = resolve_seed(args.seed, train_cfg.seed.or(spec.seed()));
    train_cfg.seed = Some(seed);
    spec.set_seed(seed);
    ensure_dir(&args.out)?;

    let source = match (&args.library, &spec) {
        (Some(path), _) => BasisSource::Library(load_library(path)?),
        (None, EnvSpec::Analytic(cfg)) => {
            BasisSource::Direct(AnalyticEnv::new(cfg.clone())?.basis()?)
        }
        (None, EnvSpec::ToySft(_)) => {
            return Err(PipelineError::Config(
                "--lib is required when ablating the toysft environment".into(),
            ))
        }
    };
    let variants: Vec<AblationVariant> = match &args.variants {
        Some(names) => names
            .iter()
            .map(|n| match n.as_str() {
                "full" => Ok(AblationVariant::Full),
                "no_dynamic_fusion" => Ok(AblationVariant::NoDynamicFusion),
                "no_stable_basis" => Ok(AblationVariant::NoStableBasis),
                "no_aggressive_reward" => Ok(AblationVariant::NoAggressiveReward),
                other => Err(PipelineError::Config(format!("unknown variant {other:?}"))),
            })
            .collect::<Result<_, _>>()?,
        None => match source {
            BasisSource::Library(_) => vec![
                AblationVariant::Full,
                AblationVariant::NoDynamicFusion,
                AblationVariant::NoStableBasis,
                AblationVariant::NoAggressiveReward,
            ],
            BasisSource::Direct(_) => vec![
                AblationVariant::Full,
                AblationVariant::NoDynamicFusion,
                AblationVariant::NoAggressiveReward,
            ],
        },
    };

    let built = spec.build(!args.no_noise)?;
    let rows =
        run_ablations(built.as_env(), &source, &variants, &sel_cfg, &train_cfg, &file_cfg.reward)?;

    let table_path = args.out.join("ablation.csv");
    let mut w = csv_writer(&table_path)?;
    w.write_record(["variant", "mae", "pearson_r"])
        .map_err(|e| PipelineError::Other(e.to_string()))?;
    for row in &rows {
        w.write_record(&[row.variant.clone(), format!("{}", row.mae), format!("{}", row.pearson_r)])
            .map_err(|e| PipelineError::Other(e.to_string()))?;
    }
    finish_csv(w, &table_path)?;

    let mut inputs = vec![args.config.clone()];
    inputs.extend(args.library.iter().cloned());
    let manifest = timer.finish(
        seed,
        serde_json::json!({
            "env": spec.to_json(),
            "train": train_cfg,
            "reward": file_cfg.reward,
            "selection": sel_cfg,
        }),
        inputs,
        vec![table_path],
    );
    manifest.write(&args.out)?;
    Ok(rows)
}

// ---------------------------------------------------------------------------
// oracle
// ---------------------------------------------------------------------------

pub struct OracleArgs {
    pub config: PathBuf,
    pub targets: Option<Vec<f64>>,
    pub grid_step: f64,
    pub out: PathBuf,
}

/// Brute-force the best reachable weights per target on the analytic
/// environment and write the residual table.
pub fn run_oracle(args: &OracleArgs) -> Result<PathBuf, PipelineError> {
    let timer = ManifestTimer::start(format!(
        "fusian oracle --config {} --grid-step {}",
        args.config.display(),
        args.grid_step
    ));
    let cfg: AnalyticEnvConfig = load_json_config(&args.config)?;
    ensure_dir(&args.out)?;
    let env = AnalyticEnv::new(cfg.clone())?;
    let basis = env.basis()?;
    let targets = match &args.targets {
        Some(t) if !t.is_empty() => t.clone(),
        _ => default_grid(env.controllable_range(&basis)?),
    };

    let table_path = args.out.join("oracle.csv");
    let mut w = csv_writer(&table_path)?;
    w.write_record(["target", "residual", "weights"])
        .map_err(|e| PipelineError::Other(e.to_string()))?;
    for &t in &targets {
        let (weights, residual) = oracle_best_weights(&cfg, t, args.grid_step)?;
        let joined =
            weights.iter().map(|v| format!("{v}")).collect::<Vec<_>>().join(";");
        w.write_record(&[format!("{t}"), format!("{residual}"), joined])
            .map_err(|e| PipelineError::Other(e.to_string()))?;
    }
    finish_csv(w, &table_path)?;

    let manifest = timer.finish(
        cfg.seed.unwrap_or(0),
        serde_json::to_value(&cfg).unwrap_or_default(),
        vec![args.config.clone()],
        vec![table_path.clone()],
    );
    manifest.write(&args.out)?;
    Ok(table_path)
}
