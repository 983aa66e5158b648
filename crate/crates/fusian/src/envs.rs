//! Subject environments: something that can evaluate a fused adapter and
//! report the trait percentage it produces.
//!
//! Two implementations cover the desk-scale pipeline. [`AnalyticEnv`] maps a
//! one-dimensional "adapter" through a tunable monotone warp, so the true
//! weight-to-intensity relationship is known and a brute-force simplex oracle
//! can bound what any controller could achieve. [`ToySftEnv`] is a small
//! trainable Likert scorer whose fine-tuning run produces a genuine
//! trajectory library, exercising the full collection stage.

use std::sync::Mutex;

use rand::Rng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::adapter::{
    Adapter, AdapterError, BasisEntry, BasisSet, Checkpoint, TensorMeta, TrajectoryLibrary,
    SIMPLEX_TOLERANCE,
};
use crate::scoring::{trait_percentage, LikertResponse, Pole, ScoringError};
use crate::seed::stage_rng;

/// Cap on brute-force oracle grid size.
pub const MAX_ORACLE_POINTS: u128 = 5_000_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EnvError {
    #[error("adapter shape mismatch: {detail}")]
    AdapterShape { detail: String },
    #[error("invalid environment config: {0}")]
    InvalidConfig(String),
    #[error("oracle unsupported: {0}")]
    OracleUnsupported(String),
    #[error("environment returned all-neutral responses; trait percentage undefined")]
    NeutralResponses,
    #[error(transparent)]
    Scoring(ScoringError),
    #[error(transparent)]
    Adapter(#[from] AdapterError),
}

impl From<ScoringError> for EnvError {
    fn from(e: ScoringError) -> Self {
        match e {
            ScoringError::NeutralOnly => EnvError::NeutralResponses,
            other => EnvError::Scoring(other),
        }
    }
}

/// A subject that measures the trait percentage of an adapter.
///
/// Implementations must be deterministic given their own seed and config;
/// any evaluation noise comes from the environment's private stream.
pub trait Environment: Sync {
    /// Measure an adapter, including configured evaluation noise.
    fn evaluate(&self, adapter: &Adapter) -> Result<f64, EnvError>;

    /// Measure an adapter with evaluation noise forced off.
    fn evaluate_noiseless(&self, adapter: &Adapter) -> Result<f64, EnvError>;

    /// Human-readable description for logs and manifests.
    fn descriptor(&self) -> String;

    /// Intensity range reachable by one-hot weights on the given basis,
    /// measured without noise.
    fn controllable_range(&self, basis: &BasisSet) -> Result<(f64, f64), EnvError> {
        let entries = basis.entries();
        let lo = self.evaluate_noiseless(&entries[0].adapter)?;
        let hi = self.evaluate_noiseless(&entries[entries.len() - 1].adapter)?;
        Ok((lo.min(hi), lo.max(hi)))
    }
}

// ---------------------------------------------------------------------------
// Analytic environment
// ---------------------------------------------------------------------------

/// Configuration of the analytic environment.
///
/// `basis_intensities` are the recorded intensities of the virtual basis
/// adapters (ascending). `warp_gamma` bends the mixing-to-intensity map:
/// gamma = 1 is the identity, larger values compress the extremes, which is
/// exactly the non-linearity that defeats plain interpolation in
/// intensity space.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnalyticEnvConfig {
    pub basis_intensities: Vec<f64>,
    pub warp_gamma: f64,
    /// Gaussian evaluation noise in percentage points.
    pub noise_sd: f64,
    pub seed: Option<u64>,
}

impl Default for AnalyticEnvConfig {
    fn default() -> Self {
        Self {
            basis_intensities: vec![0.0, 25.0, 50.0, 75.0, 100.0],
            warp_gamma: 1.0,
            noise_sd: 0.0,
            seed: None,
        }
    }
}

impl AnalyticEnvConfig {
    pub fn validate(&self) -> Result<(), EnvError> {
        if self.basis_intensities.len() < 2 {
            return Err(EnvError::InvalidConfig(
                "basis_intensities needs at least 2 values".into(),
            ));
        }
        for w in self.basis_intensities.windows(2) {
            if w[0] > w[1] {
                return Err(EnvError::InvalidConfig(
                    "basis_intensities must be sorted ascending".into(),
                ));
            }
        }
        if self.basis_intensities.iter().any(|c| !(0.0..=100.0).contains(c)) {
            return Err(EnvError::InvalidConfig("basis_intensities must be in [0, 100]".into()));
        }
        if !(self.warp_gamma > 0.0) {
            return Err(EnvError::InvalidConfig(format!(
                "warp_gamma must be positive, got {}",
                self.warp_gamma
            )));
        }
        if self.noise_sd < 0.0 {
            return Err(EnvError::InvalidConfig(format!(
                "noise_sd must be non-negative, got {}",
                self.noise_sd
            )));
        }
        Ok(())
    }
}

/// Monotone warp fixing 0, 1/2, and 1: `x^g / (x^g + (1-x)^g)`.
fn warp(x: f64, gamma: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let a = x.powf(gamma);
    let b = (1.0 - x).powf(gamma);
    a / (a + b)
}

/// Analytic intensity map over one-dimensional adapters.
pub struct AnalyticEnv {
    cfg: AnalyticEnvConfig,
    noise: Mutex<ChaCha12Rng>,
    noise_enabled: bool,
}

impl AnalyticEnv {
    pub fn new(cfg: AnalyticEnvConfig) -> Result<Self, EnvError> {
        cfg.validate()?;
        let seed = cfg.seed.unwrap_or(0);
        Ok(Self {
            cfg,
            noise: Mutex::new(stage_rng(seed, "analytic-noise")),
            noise_enabled: true,
        })
    }

    /// Same environment with evaluation noise switched on or off.
    pub fn with_noise_enabled(mut self, enabled: bool) -> Self {
        self.noise_enabled = enabled;
        self
    }

    pub fn config(&self) -> &AnalyticEnvConfig {
        &self.cfg
    }

    pub fn shape_meta() -> Vec<TensorMeta> {
        vec![TensorMeta { name: "intensity".into(), dims: vec![1] }]
    }

    /// One-dimensional adapter whose single component is the mixed intensity.
    pub fn adapter_for(intensity: f64) -> Result<Adapter, EnvError> {
        Ok(Adapter::new(vec![intensity], Self::shape_meta())?)
    }

    /// The basis implied by the config: adapter `[c_i]` with recorded
    /// intensity `c_i`.
    pub fn basis(&self) -> Result<BasisSet, EnvError> {
        let entries = self
            .cfg
            .basis_intensities
            .iter()
            .enumerate()
            .map(|(i, &c)| {
                Ok(BasisEntry {
                    adapter: Self::adapter_for(c)?,
                    intensity: c,
                    source_step: i as u64,
                })
            })
            .collect::<Result<Vec<_>, EnvError>>()?;
        Ok(BasisSet::new(("L".into(), "R".into()), "L".into(), entries)?)
    }

    fn intensity_to_percentage(&self, m: f64, with_noise: bool) -> f64 {
        let x = (m / 100.0).clamp(0.0, 1.0);
        let mut p = 100.0 * warp(x, self.cfg.warp_gamma);
        if with_noise && self.noise_enabled && self.cfg.noise_sd > 0.0 {
            let z: f64 = {
                let mut rng = self.noise.lock().expect("noise rng poisoned");
                StandardNormal.sample(&mut *rng)
            };
            p += self.cfg.noise_sd * z;
        }
        p.clamp(0.0, 100.0)
    }

    /// Evaluate simplex weights directly: `m = sum w_i c_i`, then the warp
    /// and configured noise.
    pub fn evaluate_weights(&self, weights: &[f64]) -> Result<f64, EnvError> {
        let c = &self.cfg.basis_intensities;
        if weights.len() != c.len() {
            return Err(EnvError::AdapterShape {
                detail: format!("{} weights for {} basis intensities", weights.len(), c.len()),
            });
        }
        let mut sum = 0.0;
        for &w in weights {
            if !w.is_finite() || w < 0.0 {
                return Err(EnvError::InvalidConfig(format!("weight {w} not in [0, 1]")));
            }
            sum += w;
        }
        if (sum - 1.0).abs() > SIMPLEX_TOLERANCE {
            return Err(EnvError::InvalidConfig(format!("weights sum to {sum}, not 1")));
        }
        let m: f64 = weights.iter().zip(c).map(|(w, ci)| w * ci).sum();
        Ok(self.intensity_to_percentage(m, true))
    }

    fn check_adapter(&self, adapter: &Adapter) -> Result<f64, EnvError> {
        if adapter.len() != 1 {
            return Err(EnvError::AdapterShape {
                detail: format!("analytic adapters have 1 value, got {}", adapter.len()),
            });
        }
        Ok(adapter.data()[0])
    }
}

impl Environment for AnalyticEnv {
    fn evaluate(&self, adapter: &Adapter) -> Result<f64, EnvError> {
        let m = self.check_adapter(adapter)?;
        Ok(self.intensity_to_percentage(m, true))
    }

    fn evaluate_noiseless(&self, adapter: &Adapter) -> Result<f64, EnvError> {
        let m = self.check_adapter(adapter)?;
        Ok(self.intensity_to_percentage(m, false))
    }

    fn descriptor(&self) -> String {
        format!(
            "analytic(gamma={}, noise_sd={}, intensities={:?})",
            self.cfg.warp_gamma, self.cfg.noise_sd, self.cfg.basis_intensities
        )
    }
}

/// Exhaustively search the simplex grid at resolution `grid_step` for the
/// weights whose noiseless evaluation is closest to `p_target`.
///
/// Returns the best weights and the residual `|P(w) - target|`. The residual
/// lower-bounds (up to grid resolution) what any controller can achieve on
/// the same noiseless environment. Errors when `grid_step` does not divide 1
/// or the grid would exceed [`MAX_ORACLE_POINTS`].
pub fn oracle_best_weights(
    cfg: &AnalyticEnvConfig,
    p_target: f64,
    grid_step: f64,
) -> Result<(Vec<f64>, f64), EnvError> {
    cfg.validate()?;
    if !(grid_step > 0.0 && grid_step <= 1.0) {
        return Err(EnvError::OracleUnsupported(format!(
            "grid_step must be in (0, 1], got {grid_step}"
        )));
    }
    let k = (1.0 / grid_step).round();
    if ((k * grid_step) - 1.0).abs() > 1e-9 {
        return Err(EnvError::OracleUnsupported(format!(
            "grid_step {grid_step} does not divide 1"
        )));
    }
    let k = k as u64;
    let n = cfg.basis_intensities.len();
    let points = simplex_grid_size(k, n);
    if points > MAX_ORACLE_POINTS {
        return Err(EnvError::OracleUnsupported(format!(
            "{n}-adapter grid at step {grid_step} has {points} points (cap {MAX_ORACLE_POINTS})"
        )));
    }

    let noiseless = AnalyticEnv::new(AnalyticEnvConfig { noise_sd: 0.0, ..cfg.clone() })?;
    let mut best_w: Vec<f64> = Vec::new();
    let mut best_residual = f64::INFINITY;
    let mut counts = Vec::with_capacity(n);
    visit_compositions(k, n, &mut counts, &mut |parts: &[u64]| {
        let w: Vec<f64> = parts.iter().map(|&p| p as f64 / k as f64).collect();
        let m: f64 = w.iter().zip(&cfg.basis_intensities).map(|(wi, ci)| wi * ci).sum();
        let p = noiseless.intensity_to_percentage(m, false);
        let residual = (p - p_target).abs();
        if residual < best_residual {
            best_residual = residual;
            best_w = w;
        }
    });
    Ok((best_w, best_residual))
}

/// Number of weak compositions of `k` into `n` parts: C(k + n - 1, n - 1).
fn simplex_grid_size(k: u64, n: usize) -> u128 {
    let mut out: u128 = 1;
    for i in 1..=(n as u128 - 1) {
        out = out.saturating_mul(k as u128 + i) / i;
        if out > MAX_ORACLE_POINTS * 2 {
            return out;
        }
    }
    out
}

fn visit_compositions(k: u64, n: usize, current: &mut Vec<u64>, f: &mut impl FnMut(&[u64])) {
    if n == 1 {
        current.push(k);
        f(current);
        current.pop();
        return;
    }
    for i in 0..=k {
        current.push(i);
        visit_compositions(k - i, n - 1, current, f);
        current.pop();
    }
}

// ---------------------------------------------------------------------------
// Toy fine-tuning environment
// ---------------------------------------------------------------------------

/// Configuration of the toy trainable scorer.
///
/// The base model is a fixed linear map from per-item features to five Likert
/// class logits, mildly biased toward the right pole so the starting
/// percentage sits low. Fine-tuning trains only a rank-`lora_rank` additive
/// delta on that weight matrix toward strong left-pole answers, and every
/// update is scored into a trajectory checkpoint.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ToySftConfig {
    pub n_items: usize,
    pub feature_dim: usize,
    pub lora_rank: usize,
    pub sft_lr: f64,
    pub sft_steps: usize,
    /// Probability that a training label is replaced by a uniformly random
    /// Likert class at each step.
    pub label_noise: f64,
    pub trait_pair: (String, String),
    pub target_pole: String,
    pub seed: Option<u64>,
}

impl Default for ToySftConfig {
    fn default() -> Self {
        Self {
            n_items: 50,
            feature_dim: 16,
            lora_rank: 8,
            sft_lr: 0.2,
            sft_steps: 120,
            label_noise: 0.1,
            trait_pair: ("E".into(), "I".into()),
            target_pole: "E".into(),
            seed: None,
        }
    }
}

impl ToySftConfig {
    pub fn validate(&self) -> Result<(), EnvError> {
        if self.n_items == 0 || self.feature_dim == 0 || self.lora_rank == 0 || self.sft_steps == 0
        {
            return Err(EnvError::InvalidConfig(
                "n_items, feature_dim, lora_rank, and sft_steps must be positive".into(),
            ));
        }
        if !(self.sft_lr > 0.0) {
            return Err(EnvError::InvalidConfig(format!(
                "sft_lr must be positive, got {}",
                self.sft_lr
            )));
        }
        if !(0.0..1.0).contains(&self.label_noise) {
            return Err(EnvError::InvalidConfig(format!(
                "label_noise must be in [0, 1), got {}",
                self.label_noise
            )));
        }
        if self.target_pole != self.trait_pair.0 && self.target_pole != self.trait_pair.1 {
            return Err(EnvError::InvalidConfig(format!(
                "target_pole {:?} is neither pole of {:?}",
                self.target_pole, self.trait_pair
            )));
        }
        Ok(())
    }

    fn target_is_left(&self) -> bool {
        self.target_pole == self.trait_pair.0
    }
}

const LIKERT_CLASSES: usize = 5;

/// Low-rank factors of the trainable delta: `delta = b_factor * a_factor`.
#[derive(Debug, Clone, PartialEq)]
pub struct FactorPair {
    /// 5 x rank, row-major.
    pub b_factor: Vec<f64>,
    /// rank x feature_dim, row-major.
    pub a_factor: Vec<f64>,
}

impl FactorPair {
    /// Materialize the effective delta `B * A` (5 x feature_dim, row-major).
    pub fn materialize(&self, rank: usize, feature_dim: usize) -> Vec<f64> {
        let mut delta = vec![0.0; LIKERT_CLASSES * feature_dim];
        for c in 0..LIKERT_CLASSES {
            for r in 0..rank {
                let b = self.b_factor[c * rank + r];
                if b == 0.0 {
                    continue;
                }
                let a_row = &self.a_factor[r * feature_dim..(r + 1) * feature_dim];
                let d_row = &mut delta[c * feature_dim..(c + 1) * feature_dim];
                for (d, &a) in d_row.iter_mut().zip(a_row) {
                    *d += b * a;
                }
            }
        }
        delta
    }
}

/// Result of one trajectory collection run.
pub struct ToySftRun {
    pub library: TrajectoryLibrary,
    /// Low-rank factors per stored checkpoint, in library order (the step-0
    /// checkpoint carries zero factors).
    pub factor_history: Vec<FactorPair>,
    /// Steps whose evaluation came back all-neutral and were skipped.
    pub skipped_steps: Vec<u64>,
}

/// Fixed base scorer plus questionnaire features; evaluating an adapter
/// answers every item greedily and scores the responses.
pub struct ToySftEnv {
    cfg: ToySftConfig,
    /// n_items x feature_dim, row-major.
    features: Vec<f64>,
    /// 5 x feature_dim, row-major.
    base_weight: Vec<f64>,
    base_bias: [f64; LIKERT_CLASSES],
}

impl ToySftEnv {
    pub fn new(cfg: ToySftConfig) -> Result<Self, EnvError> {
        cfg.validate()?;
        let seed = cfg.seed.unwrap_or(0);
        let mut feat_rng = stage_rng(seed, "toysft-features");
        let features: Vec<f64> = (0..cfg.n_items * cfg.feature_dim)
            .map(|_| StandardNormal.sample(&mut feat_rng))
            .collect();
        let mut base_rng = stage_rng(seed, "toysft-base");
        let base_weight: Vec<f64> = (0..LIKERT_CLASSES * cfg.feature_dim)
            .map(|_| {
                let z: f64 = StandardNormal.sample(&mut base_rng);
                0.3 * z
            })
            .collect();
        // Tilt the base toward the right pole so the run starts away from
        // the target extreme without being all-neutral.
        let base_bias = [0.0, 0.0, 0.0, 0.8, 0.4];
        Ok(Self { cfg, features, base_weight, base_bias })
    }

    pub fn config(&self) -> &ToySftConfig {
        &self.cfg
    }

    pub fn shape_meta(&self) -> Vec<TensorMeta> {
        vec![TensorMeta {
            name: "value_proj.delta".into(),
            dims: vec![LIKERT_CLASSES, self.cfg.feature_dim],
        }]
    }

    pub fn zero_adapter(&self) -> Adapter {
        Adapter::zeros(self.shape_meta())
    }

    fn target_pole(&self) -> Pole {
        if self.cfg.target_is_left() {
            Pole::Left
        } else {
            Pole::Right
        }
    }

    /// Greedy Likert answers (argmax class, ties to the lower class) for the
    /// base weights plus `delta`.
    fn answer_items(&self, delta: &[f64]) -> Vec<LikertResponse> {
        let d = self.cfg.feature_dim;
        let mut responses = Vec::with_capacity(self.cfg.n_items);
        for item in 0..self.cfg.n_items {
            let x = &self.features[item * d..(item + 1) * d];
            let mut best_class = 0usize;
            let mut best_logit = f64::NEG_INFINITY;
            for class in 0..LIKERT_CLASSES {
                let wrow = &self.base_weight[class * d..(class + 1) * d];
                let drow = &delta[class * d..(class + 1) * d];
                let mut logit = self.base_bias[class];
                for j in 0..d {
                    logit += (wrow[j] + drow[j]) * x[j];
                }
                if logit > best_logit {
                    best_logit = logit;
                    best_class = class;
                }
            }
            responses.push(LikertResponse { item_id: item as i64, score: best_class as i64 + 1 });
        }
        responses
    }

    fn percentage_for_delta(&self, delta: &[f64]) -> Result<f64, EnvError> {
        let responses = self.answer_items(delta);
        Ok(trait_percentage(&responses, self.target_pole())?)
    }

    /// Trait percentage of the unmodified base scorer.
    pub fn base_percentage(&self) -> Result<f64, EnvError> {
        self.percentage_for_delta(&vec![0.0; LIKERT_CLASSES * self.cfg.feature_dim])
    }

    /// Run the fine-tuning loop, scoring after every update, and return the
    /// trajectory library (step 0 is the untouched base model).
    ///
    /// A checkpoint whose evaluation is all-neutral is skipped and recorded
    /// in `skipped_steps`.
    pub fn collect(&self) -> Result<ToySftRun, EnvError> {
        let cfg = &self.cfg;
        let d = cfg.feature_dim;
        let rank = cfg.lora_rank;
        let n = cfg.n_items;
        let seed = cfg.seed.unwrap_or(0);
        let mut rng = stage_rng(seed, "toysft-collect");

        // LoRA-style init: B zero, A random, so the delta starts at zero.
        let mut b_factor = vec![0.0; LIKERT_CLASSES * rank];
        let mut a_factor: Vec<f64> = (0..rank * d)
            .map(|_| {
                let z: f64 = StandardNormal.sample(&mut rng);
                z / (d as f64).sqrt()
            })
            .collect();

        let target_class: usize = if cfg.target_is_left() { 0 } else { LIKERT_CLASSES - 1 };
        let meta = self.shape_meta();
        let mut checkpoints = Vec::with_capacity(cfg.sft_steps + 1);
        let mut factor_history = Vec::with_capacity(cfg.sft_steps + 1);
        let mut skipped_steps = Vec::new();

        let base_p = self.base_percentage()?;
        checkpoints
            .push(Checkpoint::new(0, self.zero_adapter(), base_p).map_err(EnvError::Adapter)?);
        factor_history
            .push(FactorPair { b_factor: b_factor.clone(), a_factor: vec![0.0; rank * d] });

        let mut delta = vec![0.0; LIKERT_CLASSES * d];
        for step in 1..=cfg.sft_steps {
            // Labels for this step: the target extreme, with label noise.
            let labels: Vec<usize> = (0..n)
                .map(|_| {
                    if cfg.label_noise > 0.0 && rng.random::<f64>() < cfg.label_noise {
                        rng.random_range(0..LIKERT_CLASSES)
                    } else {
                        target_class
                    }
                })
                .collect();

            // Cross-entropy gradient on the effective weights.
            let mut d_weight = vec![0.0; LIKERT_CLASSES * d];
            for item in 0..n {
                let x = &self.features[item * d..(item + 1) * d];
                let mut logits = [0.0; LIKERT_CLASSES];
                for (class, logit) in logits.iter_mut().enumerate() {
                    let wrow = &self.base_weight[class * d..(class + 1) * d];
                    let drow = &delta[class * d..(class + 1) * d];
                    let mut acc = self.base_bias[class];
                    for j in 0..d {
                        acc += (wrow[j] + drow[j]) * x[j];
                    }
                    *logit = acc;
                }
                let max = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                let mut probs = [0.0; LIKERT_CLASSES];
                let mut z = 0.0;
                for class in 0..LIKERT_CLASSES {
                    probs[class] = (logits[class] - max).exp();
                    z += probs[class];
                }
                for (class, p) in probs.iter_mut().enumerate() {
                    *p /= z;
                    let err = *p - if class == labels[item] { 1.0 } else { 0.0 };
                    let grad_row = &mut d_weight[class * d..(class + 1) * d];
                    for j in 0..d {
                        grad_row[j] += err * x[j] / n as f64;
                    }
                }
            }

            // Chain onto the factors: dB = dW A^T, dA = B^T dW.
            let mut d_b = vec![0.0; LIKERT_CLASSES * rank];
            let mut d_a = vec![0.0; rank * d];
            for c in 0..LIKERT_CLASSES {
                for r in 0..rank {
                    let mut acc = 0.0;
                    for j in 0..d {
                        acc += d_weight[c * d + j] * a_factor[r * d + j];
                    }
                    d_b[c * rank + r] = acc;
                }
            }
            for r in 0..rank {
                for j in 0..d {
                    let mut acc = 0.0;
                    for c in 0..LIKERT_CLASSES {
                        acc += b_factor[c * rank + r] * d_weight[c * d + j];
                    }
                    d_a[r * d + j] = acc;
                }
            }
            for (b, g) in b_factor.iter_mut().zip(&d_b) {
                *b -= cfg.sft_lr * g;
            }
            for (a, g) in a_factor.iter_mut().zip(&d_a) {
                *a -= cfg.sft_lr * g;
            }

            let pair = FactorPair { b_factor: b_factor.clone(), a_factor: a_factor.clone() };
            delta = pair.materialize(rank, d);

            match self.percentage_for_delta(&delta) {
                Ok(p) => {
                    let adapter =
                        Adapter::new(delta.clone(), meta.clone()).map_err(EnvError::Adapter)?;
                    checkpoints.push(
                        Checkpoint::new(step as u64, adapter, p).map_err(EnvError::Adapter)?,
                    );
                    factor_history.push(pair);
                }
                Err(EnvError::NeutralResponses) => skipped_steps.push(step as u64),
                Err(other) => return Err(other),
            }
        }

        let library = TrajectoryLibrary::new(
            cfg.trait_pair.clone(),
            cfg.target_pole.clone(),
            meta,
            checkpoints,
        )
        .map_err(EnvError::Adapter)?;
        Ok(ToySftRun { library, factor_history, skipped_steps })
    }

    fn check_adapter(&self, adapter: &Adapter) -> Result<(), EnvError> {
        let expected = LIKERT_CLASSES * self.cfg.feature_dim;
        if adapter.len() != expected {
            return Err(EnvError::AdapterShape {
                detail: format!("expected {expected} values, got {}", adapter.len()),
            });
        }
        Ok(())
    }
}

impl Environment for ToySftEnv {
    fn evaluate(&self, adapter: &Adapter) -> Result<f64, EnvError> {
        self.check_adapter(adapter)?;
        self.percentage_for_delta(adapter.data())
    }

    fn evaluate_noiseless(&self, adapter: &Adapter) -> Result<f64, EnvError> {
        // Greedy answering is already deterministic.
        self.evaluate(adapter)
    }

    fn descriptor(&self) -> String {
        format!(
            "toysft(items={}, dim={}, rank={}, lr={}, steps={}, label_noise={})",
            self.cfg.n_items,
            self.cfg.feature_dim,
            self.cfg.lora_rank,
            self.cfg.sft_lr,
            self.cfg.sft_steps,
            self.cfg.label_noise
        )
    }
}
