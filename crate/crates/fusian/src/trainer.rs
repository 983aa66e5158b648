//! REINFORCE training of the fusion policy.
//!
//! Each rollout samples a target intensity, runs the policy to get Dirichlet
//! concentrations, draws mixing weights, fuses the basis, asks the
//! environment for the resulting intensity, and shapes a reward from the gap.
//! The policy gradient is the score-function estimator with an exponential
//! moving average baseline and an annealed entropy bonus; updates use
//! gradient accumulation, global-norm clipping, and adaptive moments with
//! decoupled weight decay.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::adapter::{fuse_adapters, AdapterError, BasisSet};
use crate::dirichlet::{
    dirichlet_sample, entropy_gradient, score_gradient, DirichletError,
};
use crate::envs::{EnvError, Environment};
use crate::policy::{normalize_target, PolicyError, PolicyParams};
use crate::seed::stage_rng;

#[derive(Debug, Error)]
pub enum TrainError {
    #[error("degenerate target range [{p_min}, {p_max}]")]
    DegenerateRange { p_min: f64, p_max: f64 },
    #[error("invalid train config: {0}")]
    InvalidConfig(String),
    #[error("environment failure at {context}: {source}")]
    Env { context: String, source: EnvError },
    #[error(transparent)]
    Policy(#[from] PolicyError),
    #[error(transparent)]
    Dirichlet(#[from] DirichletError),
    #[error(transparent)]
    Adapter(#[from] AdapterError),
    #[error("numerical failure at {context}; last good parameters preserved")]
    NumericalError { context: String, last_good: Box<PolicyParams> },
}

/// Shaping constants of the precision reward `exp(-lambda d) + bonus` where
/// `d = |target - actual| / 100` and the bonus applies when `d < delta`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RewardConfig {
    pub lambda: f64,
    pub bonus: f64,
    pub delta: f64,
}

impl Default for RewardConfig {
    fn default() -> Self {
        Self { lambda: 20.0, bonus: 0.5, delta: 0.01 }
    }
}

impl RewardConfig {
    pub fn validate(&self) -> Result<(), TrainError> {
        if !(self.lambda > 0.0) || !(self.delta > 0.0) || self.bonus < 0.0 {
            return Err(TrainError::InvalidConfig(format!(
                "reward config needs lambda > 0, delta > 0, bonus >= 0; got {self:?}"
            )));
        }
        Ok(())
    }
}

/// Which reward shaping the trainer uses. `Linear` is the ablation variant
/// `R = 1 - d` with no bonus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RewardKind {
    Aggressive,
    Linear,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct RewardSpec {
    pub kind: RewardKind,
    pub config: RewardConfig,
}

impl RewardSpec {
    pub fn aggressive(config: RewardConfig) -> Self {
        Self { kind: RewardKind::Aggressive, config }
    }

    pub fn linear() -> Self {
        Self { kind: RewardKind::Linear, config: RewardConfig::default() }
    }

    pub fn value(&self, p_target: f64, p_actual: f64) -> f64 {
        match self.kind {
            RewardKind::Aggressive => compute_reward(p_target, p_actual, &self.config),
            RewardKind::Linear => 1.0 - (p_target - p_actual).abs() / 100.0,
        }
    }
}

/// Precision reward: `exp(-lambda d) + [d < delta] * bonus`, with the gap
/// normalized to `d = |target - actual| / 100`.
pub fn compute_reward(p_target: f64, p_actual: f64, cfg: &RewardConfig) -> f64 {
    let d = (p_target - p_actual).abs() / 100.0;
    let mut r = (-cfg.lambda * d).exp();
    if d < cfg.delta {
        r += cfg.bonus;
    }
    r
}

/// Exponential moving average of rewards; the advantage for a reward uses
/// the baseline value from before that reward is folded in. The first reward
/// initializes the baseline, so its advantage is zero.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct BaselineState {
    pub value: f64,
    pub initialized: bool,
}

impl BaselineState {
    pub fn advantage(&self, reward: f64) -> f64 {
        if self.initialized {
            reward - self.value
        } else {
            0.0
        }
    }

    pub fn update(&mut self, reward: f64, decay: f64) {
        if self.initialized {
            self.value = decay * self.value + (1.0 - decay) * reward;
        } else {
            self.value = reward;
            self.initialized = true;
        }
    }
}

/// Training schedule and optimizer settings.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    pub epochs: usize,
    pub targets_per_epoch: usize,
    pub lr: f64,
    pub accumulation_steps: usize,
    pub grad_clip_norm: f64,
    pub baseline_decay: f64,
    pub entropy_coeff_init: f64,
    pub entropy_decay: f64,
    pub entropy_min: f64,
    pub weight_decay: f64,
    pub adam_beta1: f64,
    pub adam_beta2: f64,
    pub adam_eps: f64,
    /// Average the parameters of the last k epoch snapshots into the
    /// returned policy (Polyak-style tail averaging). 1 keeps the final
    /// iterate. Score-function training jitters around the optimum once the
    /// bonus zone is reached; averaging removes that noise floor.
    pub average_last_epochs: usize,
    pub seed: Option<u64>,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            epochs: 20,
            targets_per_epoch: 32,
            lr: 1e-3,
            accumulation_steps: 4,
            grad_clip_norm: 0.5,
            baseline_decay: 0.95,
            entropy_coeff_init: 0.1,
            entropy_decay: 0.9,
            entropy_min: 0.01,
            weight_decay: 0.01,
            adam_beta1: 0.9,
            adam_beta2: 0.999,
            adam_eps: 1e-8,
            average_last_epochs: 1,
            seed: None,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<(), TrainError> {
        let positives = [
            ("epochs", self.epochs as f64),
            ("targets_per_epoch", self.targets_per_epoch as f64),
            ("lr", self.lr),
            ("accumulation_steps", self.accumulation_steps as f64),
            ("grad_clip_norm", self.grad_clip_norm),
            ("baseline_decay", self.baseline_decay),
            ("entropy_coeff_init", self.entropy_coeff_init),
            ("entropy_decay", self.entropy_decay),
            ("entropy_min", self.entropy_min),
            ("adam_eps", self.adam_eps),
        ];
        for (name, v) in positives {
            if !(v > 0.0) {
                return Err(TrainError::InvalidConfig(format!("{name} must be positive, got {v}")));
            }
        }
        if self.entropy_min > self.entropy_coeff_init {
            return Err(TrainError::InvalidConfig(format!(
                "entropy_min {} exceeds entropy_coeff_init {}",
                self.entropy_min, self.entropy_coeff_init
            )));
        }
        if self.weight_decay < 0.0 {
            return Err(TrainError::InvalidConfig("weight_decay must be >= 0".into()));
        }
        if !(0.0..1.0).contains(&self.adam_beta1) || !(0.0..1.0).contains(&self.adam_beta2) {
            return Err(TrainError::InvalidConfig("adam betas must be in [0, 1)".into()));
        }
        if !(0.0..1.0).contains(&self.baseline_decay) {
            return Err(TrainError::InvalidConfig("baseline_decay must be in [0, 1)".into()));
        }
        if self.average_last_epochs == 0 || self.average_last_epochs > self.epochs {
            return Err(TrainError::InvalidConfig(format!(
                "average_last_epochs must be in 1..=epochs, got {}",
                self.average_last_epochs
            )));
        }
        Ok(())
    }
}

/// Entropy coefficient at an epoch: `max(min, init * decay^epoch)`.
pub fn entropy_coefficient(epoch: usize, cfg: &TrainConfig) -> f64 {
    (cfg.entropy_coeff_init * cfg.entropy_decay.powi(epoch as i32)).max(cfg.entropy_min)
}

/// Evenly spaced targets over `[p_min, p_max]` with each point jittered by
/// uniform noise within half the spacing, clamped back into the range.
pub fn sample_targets<R: rand::Rng + ?Sized>(
    rng: &mut R,
    p_min: f64,
    p_max: f64,
    count: usize,
) -> Result<Vec<f64>, TrainError> {
    if !(p_max > p_min) {
        return Err(TrainError::DegenerateRange { p_min, p_max });
    }
    if count < 2 {
        return Err(TrainError::InvalidConfig(format!(
            "need at least 2 targets per epoch, got {count}"
        )));
    }
    let spacing = (p_max - p_min) / (count - 1) as f64;
    Ok((0..count)
        .map(|k| {
            let base = p_min + spacing * k as f64;
            let jitter = rng.random_range(-spacing / 2.0..spacing / 2.0);
            (base + jitter).clamp(p_min, p_max)
        })
        .collect())
}

/// Scale the gradient so its global norm is at most `max_norm`; returns the
/// pre-clip norm.
pub fn clip_global_norm(grad: &mut [f64], max_norm: f64) -> f64 {
    let norm = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
    if norm > max_norm && norm > 0.0 {
        let scale = max_norm / norm;
        for g in grad.iter_mut() {
            *g *= scale;
        }
    }
    norm
}

/// Adaptive moment optimizer with decoupled weight decay.
#[derive(Debug, Clone)]
pub struct AdamW {
    m: Vec<f64>,
    v: Vec<f64>,
    t: u64,
}

impl AdamW {
    pub fn new(param_count: usize) -> Self {
        Self { m: vec![0.0; param_count], v: vec![0.0; param_count], t: 0 }
    }

    pub fn step(&mut self, params: &mut [f64], grad: &[f64], cfg: &TrainConfig) {
        self.t += 1;
        let b1 = cfg.adam_beta1;
        let b2 = cfg.adam_beta2;
        let bias1 = 1.0 - b1.powi(self.t as i32);
        let bias2 = 1.0 - b2.powi(self.t as i32);
        for i in 0..params.len() {
            self.m[i] = b1 * self.m[i] + (1.0 - b1) * grad[i];
            self.v[i] = b2 * self.v[i] + (1.0 - b2) * grad[i] * grad[i];
            let m_hat = self.m[i] / bias1;
            let v_hat = self.v[i] / bias2;
            params[i] -= cfg.lr * (m_hat / (v_hat.sqrt() + cfg.adam_eps)
                + cfg.weight_decay * params[i]);
        }
    }
}

/// One row of the training log, written per rollout.
#[derive(Debug, Clone, Serialize)]
pub struct TrainLogRow {
    pub epoch: usize,
    pub step: usize,
    pub p_target: f64,
    pub p_actual: f64,
    pub reward: f64,
    pub baseline: f64,
    pub beta: f64,
    /// Pre-clip global gradient norm of the most recent optimizer step.
    pub grad_norm: f64,
    pub alpha_min: f64,
    pub alpha_max: f64,
}

pub struct TrainOutcome {
    pub policy: PolicyParams,
    pub log: Vec<TrainLogRow>,
    /// Policy snapshot at the end of each epoch.
    pub epoch_snapshots: Vec<PolicyParams>,
}

/// Train the policy against an environment.
///
/// Per target: forward, sample weights, fuse, evaluate, shape the reward,
/// subtract the moving baseline, and accumulate the gradient of
/// `-(R - b) log pi - beta_t H`. Every `accumulation_steps` rollouts the
/// accumulated gradient is clipped and applied. Training is bitwise
/// reproducible given (seed, config, environment).
pub fn train_policy(
    env: &dyn Environment,
    basis: &BasisSet,
    policy: PolicyParams,
    cfg: &TrainConfig,
    reward: &RewardSpec,
) -> Result<TrainOutcome, TrainError> {
    cfg.validate()?;
    reward.config.validate()?;
    if policy.n_outputs() != basis.len() {
        return Err(TrainError::InvalidConfig(format!(
            "policy has {} outputs for a basis of {}",
            policy.n_outputs(),
            basis.len()
        )));
    }

    let mut policy = policy;
    let initial_policy = policy.clone();
    let mut rng = stage_rng(cfg.seed.unwrap_or(0), "train");
    let mut opt = AdamW::new(policy.param_count());
    let mut baseline = BaselineState::default();
    let mut grad_acc = vec![0.0; policy.param_count()];
    let mut acc_n = 0usize;
    let mut last_grad_norm = 0.0;
    let mut log = Vec::with_capacity(cfg.epochs * cfg.targets_per_epoch);
    let mut snapshots: Vec<PolicyParams> = Vec::with_capacity(cfg.epochs);

    let p_min = basis.min_intensity();
    let p_max = basis.max_intensity();
    let mut global_step = 0usize;

    for epoch in 0..cfg.epochs {
        let beta = entropy_coefficient(epoch, cfg);
        let targets = sample_targets(&mut rng, p_min, p_max, cfg.targets_per_epoch)?;
        for p_target in targets {
            // A degenerate forward or sampler failure aborts with the last
            // epoch snapshot as the recoverable checkpoint.
            let rescue = |context: String| TrainError::NumericalError {
                context,
                last_good: Box::new(snapshots.last().unwrap_or(&initial_policy).clone()),
            };
            let p_hat = normalize_target(p_target)?;
            let cache = policy.forward_cached(p_hat).map_err(|e| match e {
                PolicyError::NumericalError(what) => {
                    rescue(format!("epoch {epoch}, step {global_step}: {what}"))
                }
                other => TrainError::Policy(other),
            })?;
            let sample = dirichlet_sample(&cache.alpha, &mut rng).map_err(|e| {
                rescue(format!("epoch {epoch}, step {global_step}: {e}"))
            })?;
            let fused = fuse_adapters(basis, &sample.w)?;
            let p_actual = env.evaluate(&fused).map_err(|source| TrainError::Env {
                context: format!("epoch {epoch}, step {global_step}, target {p_target:.3}"),
                source,
            })?;
            let r = reward.value(p_target, p_actual);
            let advantage = baseline.advantage(r);
            baseline.update(r, cfg.baseline_decay);

            // dL/d alpha for L = -(R - b) log pi - beta H.
            let sg = score_gradient(&cache.alpha, &sample.w)?;
            let eg = entropy_gradient(&cache.alpha)?;
            let d_alpha: Vec<f64> = sg
                .iter()
                .zip(&eg)
                .map(|(s, e)| -advantage * s - beta * e)
                .collect();
            let grad = policy.backward(&cache, &d_alpha)?;
            for (acc, g) in grad_acc.iter_mut().zip(&grad) {
                *acc += g / cfg.accumulation_steps as f64;
            }
            acc_n += 1;

            if acc_n == cfg.accumulation_steps {
                apply_update(
                    &mut policy,
                    &mut opt,
                    &mut grad_acc,
                    cfg,
                    &mut last_grad_norm,
                    epoch,
                    global_step,
                )?;
                acc_n = 0;
            }

            let alpha_min = cache.alpha.iter().cloned().fold(f64::INFINITY, f64::min);
            let alpha_max = cache.alpha.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            log.push(TrainLogRow {
                epoch,
                step: global_step,
                p_target,
                p_actual,
                reward: r,
                baseline: baseline.value,
                beta,
                grad_norm: last_grad_norm,
                alpha_min,
                alpha_max,
            });
            global_step += 1;
        }
        if acc_n > 0 {
            apply_update(
                &mut policy,
                &mut opt,
                &mut grad_acc,
                cfg,
                &mut last_grad_norm,
                epoch,
                global_step,
            )?;
            acc_n = 0;
        }
        snapshots.push(policy.clone());
    }

    if cfg.average_last_epochs > 1 {
        let tail = &snapshots[snapshots.len() - cfg.average_last_epochs..];
        let scale = 1.0 / tail.len() as f64;
        let params = policy.params_mut();
        params.fill(0.0);
        for snapshot in tail {
            for (p, s) in params.iter_mut().zip(snapshot.params()) {
                *p += scale * s;
            }
        }
    }

    Ok(TrainOutcome { policy, log, epoch_snapshots: snapshots })
}

fn apply_update(
    policy: &mut PolicyParams,
    opt: &mut AdamW,
    grad_acc: &mut [f64],
    cfg: &TrainConfig,
    last_grad_norm: &mut f64,
    epoch: usize,
    global_step: usize,
) -> Result<(), TrainError> {
    if grad_acc.iter().any(|g| !g.is_finite()) {
        return Err(TrainError::NumericalError {
            context: format!("gradient at epoch {epoch}, step {global_step}"),
            last_good: Box::new(policy.clone()),
        });
    }
    let before = policy.clone();
    let pre_norm = clip_global_norm(grad_acc, cfg.grad_clip_norm);
    opt.step(policy.params_mut(), grad_acc, cfg);
    if policy.params().iter().any(|p| !p.is_finite()) {
        return Err(TrainError::NumericalError {
            context: format!("parameters at epoch {epoch}, step {global_step}"),
            last_good: Box::new(before),
        });
    }
    *last_grad_norm = pre_norm;
    grad_acc.fill(0.0);
    Ok(())
}
