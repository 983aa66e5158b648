//! Evaluation metrics and comparison controllers.
//!
//! A controller maps a target intensity to an action (simplex weights over
//! the basis, or a raw adapter). [`eval_grid`] sweeps a target grid, fuses,
//! asks the environment, and reports MAE and Pearson correlation. The
//! baselines are nearest-checkpoint selection, linear interpolation between
//! the two bracketing intensities, and scaling the final adapter by a linear
//! coefficient; [`run_ablations`] compares the trained policy against its
//! crippled variants.

use serde::Serialize;
use thiserror::Error;

use crate::adapter::{fuse_adapters, Adapter, AdapterError, BasisSet, TrajectoryLibrary};
use crate::dirichlet::{dirichlet_mean, DirichletError};
use crate::envs::{oracle_best_weights, AnalyticEnvConfig, EnvError, Environment};
use crate::policy::{normalize_target, PolicyError, PolicyParams};
use crate::selection::{select_basis, uniform_value_sample, SelectionConfig, SelectionError};
use crate::trainer::{train_policy, RewardConfig, RewardSpec, TrainConfig, TrainError};

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("empty input")]
    EmptyInput,
    #[error("correlation undefined: {0}")]
    UndefinedCorrelation(String),
    #[error("scaled-vector baseline is degenerate: base and final intensity are both {0}")]
    DegenerateVector(f64),
    #[error("ablation setup: {0}")]
    AblationSetup(String),
    #[error(transparent)]
    Env(#[from] EnvError),
    #[error(transparent)]
    Adapter(#[from] AdapterError),
    #[error(transparent)]
    Policy(#[from] PolicyError),
    #[error(transparent)]
    Dirichlet(#[from] DirichletError),
    #[error(transparent)]
    Selection(#[from] SelectionError),
    #[error(transparent)]
    Train(#[from] TrainError),
}

/// Mean absolute error over (target, actual) pairs.
pub fn mae(pairs: &[(f64, f64)]) -> Result<f64, MetricsError> {
    if pairs.is_empty() {
        return Err(MetricsError::EmptyInput);
    }
    Ok(pairs.iter().map(|(t, a)| (t - a).abs()).sum::<f64>() / pairs.len() as f64)
}

/// Sample Pearson correlation between targets and actuals.
pub fn pearson(pairs: &[(f64, f64)]) -> Result<f64, MetricsError> {
    if pairs.len() < 2 {
        return Err(MetricsError::UndefinedCorrelation(format!(
            "need at least 2 pairs, got {}",
            pairs.len()
        )));
    }
    let n = pairs.len() as f64;
    let mean_t = pairs.iter().map(|(t, _)| t).sum::<f64>() / n;
    let mean_a = pairs.iter().map(|(_, a)| a).sum::<f64>() / n;
    let mut cov = 0.0;
    let mut var_t = 0.0;
    let mut var_a = 0.0;
    for (t, a) in pairs {
        let dt = t - mean_t;
        let da = a - mean_a;
        cov += dt * da;
        var_t += dt * dt;
        var_a += da * da;
    }
    if var_t == 0.0 || var_a == 0.0 {
        return Err(MetricsError::UndefinedCorrelation("a sequence is constant".into()));
    }
    Ok(cov / (var_t * var_a).sqrt())
}

/// Per-method evaluation summary.
#[derive(Debug, Clone, Serialize)]
pub struct EvalReport {
    /// (target, actual) per grid point.
    pub pairs: Vec<(f64, f64)>,
    pub mae: f64,
    pub pearson_r: f64,
    pub method_tag: String,
}

/// What a controller wants applied to the model for a given target.
#[derive(Debug, Clone)]
pub enum ControlAction {
    /// Simplex weights over the basis entries.
    Weights(Vec<f64>),
    /// A ready adapter (used by the scaled-vector baseline).
    Adapter(Adapter),
}

/// Maps a target intensity to an action.
pub trait Controller {
    fn act(&self, p_target: f64) -> Result<ControlAction, MetricsError>;
    fn tag(&self) -> String;
}

/// Trained policy evaluated deterministically at the Dirichlet mean
/// `alpha / sum(alpha)`.
pub struct PolicyMeanController<'a> {
    policy: &'a PolicyParams,
}

impl<'a> PolicyMeanController<'a> {
    pub fn new(policy: &'a PolicyParams) -> Self {
        Self { policy }
    }
}

impl Controller for PolicyMeanController<'_> {
    fn act(&self, p_target: f64) -> Result<ControlAction, MetricsError> {
        let p_hat = normalize_target(p_target)?;
        let alpha = self.policy.forward(p_hat)?;
        Ok(ControlAction::Weights(dirichlet_mean(alpha.as_slice())?))
    }

    fn tag(&self) -> String {
        "fusian".into()
    }
}

/// One-hot weights on the basis entry whose intensity is closest to the
/// target; ties go to the lower source step.
pub fn baseline_nearest(basis: &BasisSet, p_target: f64) -> Vec<f64> {
    let entries = basis.entries();
    let mut best = 0usize;
    for (i, e) in entries.iter().enumerate() {
        let d = (e.intensity - p_target).abs();
        let best_d = (entries[best].intensity - p_target).abs();
        if d < best_d || (d == best_d && e.source_step < entries[best].source_step) {
            best = i;
        }
    }
    let mut w = vec![0.0; entries.len()];
    w[best] = 1.0;
    w
}

/// Linear interpolation between the two basis intensities bracketing the
/// target; outside the intensity range the nearest endpoint gets weight 1.
pub fn baseline_interp(basis: &BasisSet, p_target: f64) -> Vec<f64> {
    let entries = basis.entries();
    let n = entries.len();
    let mut w = vec![0.0; n];
    if p_target <= entries[0].intensity {
        w[0] = 1.0;
        return w;
    }
    if p_target >= entries[n - 1].intensity {
        w[n - 1] = 1.0;
        return w;
    }
    // Entries are sorted by intensity; find the bracketing pair.
    let mut hi = 1;
    while entries[hi].intensity < p_target {
        hi += 1;
    }
    let lo = hi - 1;
    let (a, b) = (entries[lo].intensity, entries[hi].intensity);
    if a == b {
        // Duplicate intensities bracket the target exactly; entries are
        // sorted by (intensity, step), so `lo` is the lower step.
        w[lo] = 1.0;
        return w;
    }
    w[lo] = (b - p_target) / (b - a);
    w[hi] = (p_target - a) / (b - a);
    w
}

/// Scale the final adapter by `(target - p0) / (p1 - p0)`, clamped to
/// `[0, clamp_hi]`.
pub fn baseline_scaled_vector(
    final_adapter: &Adapter,
    p0: f64,
    p1: f64,
    p_target: f64,
    clamp_hi: f64,
) -> Result<Adapter, MetricsError> {
    if p1 == p0 {
        return Err(MetricsError::DegenerateVector(p0));
    }
    let coef = ((p_target - p0) / (p1 - p0)).clamp(0.0, clamp_hi);
    Ok(final_adapter.scaled(coef)?)
}

/// Default clamp on the scaled-vector coefficient.
pub const SCALED_VECTOR_CLAMP: f64 = 1.5;

pub struct NearestController<'a> {
    basis: &'a BasisSet,
}

impl<'a> NearestController<'a> {
    pub fn new(basis: &'a BasisSet) -> Self {
        Self { basis }
    }
}

impl Controller for NearestController<'_> {
    fn act(&self, p_target: f64) -> Result<ControlAction, MetricsError> {
        Ok(ControlAction::Weights(baseline_nearest(self.basis, p_target)))
    }

    fn tag(&self) -> String {
        "nearest".into()
    }
}

pub struct InterpController<'a> {
    basis: &'a BasisSet,
}

impl<'a> InterpController<'a> {
    pub fn new(basis: &'a BasisSet) -> Self {
        Self { basis }
    }
}

impl Controller for InterpController<'_> {
    fn act(&self, p_target: f64) -> Result<ControlAction, MetricsError> {
        Ok(ControlAction::Weights(baseline_interp(self.basis, p_target)))
    }

    fn tag(&self) -> String {
        "interp".into()
    }
}

pub struct ScaledVectorController {
    final_adapter: Adapter,
    p0: f64,
    p1: f64,
}

impl ScaledVectorController {
    /// `p0` is the measured intensity of the zero adapter, `p1` of the final
    /// adapter.
    pub fn new(final_adapter: Adapter, p0: f64, p1: f64) -> Self {
        Self { final_adapter, p0, p1 }
    }
}

impl Controller for ScaledVectorController {
    fn act(&self, p_target: f64) -> Result<ControlAction, MetricsError> {
        Ok(ControlAction::Adapter(baseline_scaled_vector(
            &self.final_adapter,
            self.p0,
            self.p1,
            p_target,
            SCALED_VECTOR_CLAMP,
        )?))
    }

    fn tag(&self) -> String {
        "scaled".into()
    }
}

/// Brute-force oracle as a controller (analytic environments only).
pub struct OracleController<'a> {
    cfg: &'a AnalyticEnvConfig,
    grid_step: f64,
}

impl<'a> OracleController<'a> {
    pub fn new(cfg: &'a AnalyticEnvConfig, grid_step: f64) -> Self {
        Self { cfg, grid_step }
    }
}

impl Controller for OracleController<'_> {
    fn act(&self, p_target: f64) -> Result<ControlAction, MetricsError> {
        let (w, _) = oracle_best_weights(self.cfg, p_target, self.grid_step)?;
        Ok(ControlAction::Weights(w))
    }

    fn tag(&self) -> String {
        "oracle".into()
    }
}

/// Targets `{0, 10, ..., 100}` intersected with the controllable range.
pub fn default_grid(range: (f64, f64)) -> Vec<f64> {
    (0..=10)
        .map(|k| k as f64 * 10.0)
        .filter(|t| *t >= range.0 && *t <= range.1)
        .collect()
}

/// Evaluate a controller over a target grid.
///
/// Weights actions are validated and fused (fusion re-checks the simplex
/// constraint on every call); adapter actions go to the environment as-is.
/// Noise is off unless `with_noise` is set.
pub fn eval_grid(
    controller: &dyn Controller,
    env: &dyn Environment,
    basis: &BasisSet,
    targets: &[f64],
    with_noise: bool,
) -> Result<EvalReport, MetricsError> {
    if targets.is_empty() {
        return Err(MetricsError::EmptyInput);
    }
    let mut pairs = Vec::with_capacity(targets.len());
    for &t in targets {
        let adapter = match controller.act(t)? {
            ControlAction::Weights(w) => fuse_adapters(basis, &w)?,
            ControlAction::Adapter(a) => a,
        };
        let p = if with_noise {
            env.evaluate(&adapter)?
        } else {
            env.evaluate_noiseless(&adapter)?
        };
        pairs.push((t, p));
    }
    let mae = mae(&pairs)?;
    let pearson_r = pearson(&pairs)?;
    Ok(EvalReport { pairs, mae, pearson_r, method_tag: controller.tag() })
}

/// Mean MAE and mean Pearson r over several reports (one per environment or
/// trait dimension).
pub fn summarize(reports: &[EvalReport]) -> Result<(f64, f64), MetricsError> {
    if reports.is_empty() {
        return Err(MetricsError::EmptyInput);
    }
    let n = reports.len() as f64;
    Ok((
        reports.iter().map(|r| r.mae).sum::<f64>() / n,
        reports.iter().map(|r| r.pearson_r).sum::<f64>() / n,
    ))
}

/// Ablation variants: the full method and the three single-component
/// removals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AblationVariant {
    Full,
    NoDynamicFusion,
    NoStableBasis,
    NoAggressiveReward,
}

impl AblationVariant {
    pub fn label(&self) -> &'static str {
        match self {
            AblationVariant::Full => "full",
            AblationVariant::NoDynamicFusion => "no_dynamic_fusion",
            AblationVariant::NoStableBasis => "no_stable_basis",
            AblationVariant::NoAggressiveReward => "no_aggressive_reward",
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct AblationRow {
    pub variant: String,
    pub mae: f64,
    pub pearson_r: f64,
}

/// Where the fusion basis comes from for an ablation run.
pub enum BasisSource {
    /// A pre-selected basis (the analytic environment's own intensities).
    Direct(BasisSet),
    /// A full trajectory library; the stable-basis variants select from it.
    Library(TrajectoryLibrary),
}

/// Train and evaluate each requested variant with a shared seed and emit one
/// comparison row per variant.
///
/// `NoStableBasis` requires a library source (it re-selects from the
/// unfiltered trajectory); the other variants reuse the full basis.
pub fn run_ablations(
    env: &dyn Environment,
    source: &BasisSource,
    variants: &[AblationVariant],
    sel_cfg: &SelectionConfig,
    train_cfg: &TrainConfig,
    reward_cfg: &RewardConfig,
) -> Result<Vec<AblationRow>, MetricsError> {
    let full_basis = match source {
        BasisSource::Direct(basis) => basis.clone(),
        BasisSource::Library(lib) => select_basis(lib, sel_cfg)?.0,
    };
    let targets = default_grid(env.controllable_range(&full_basis)?);
    if targets.len() < 2 {
        return Err(MetricsError::AblationSetup(format!(
            "controllable range leaves {} grid targets",
            targets.len()
        )));
    }

    let mut rows = Vec::with_capacity(variants.len());
    for variant in variants {
        let report = match variant {
            AblationVariant::Full => {
                let policy = PolicyParams::init(full_basis.len(), train_cfg.seed.unwrap_or(0));
                let outcome = train_policy(
                    env,
                    &full_basis,
                    policy,
                    train_cfg,
                    &RewardSpec::aggressive(*reward_cfg),
                )?;
                eval_grid(
                    &PolicyMeanController::new(&outcome.policy),
                    env,
                    &full_basis,
                    &targets,
                    false,
                )?
            }
            AblationVariant::NoDynamicFusion => {
                eval_grid(&InterpController::new(&full_basis), env, &full_basis, &targets, false)?
            }
            AblationVariant::NoStableBasis => {
                let lib = match source {
                    BasisSource::Library(lib) => lib,
                    BasisSource::Direct(_) => {
                        return Err(MetricsError::AblationSetup(
                            "no_stable_basis needs a trajectory library".into(),
                        ))
                    }
                };
                let basis = uniform_value_sample(
                    lib.checkpoints(),
                    (lib.trait_pair().0.to_string(), lib.trait_pair().1.to_string()),
                    lib.target_pole().to_string(),
                    sel_cfg,
                )?;
                let policy = PolicyParams::init(basis.len(), train_cfg.seed.unwrap_or(0));
                let outcome = train_policy(
                    env,
                    &basis,
                    policy,
                    train_cfg,
                    &RewardSpec::aggressive(*reward_cfg),
                )?;
                eval_grid(&PolicyMeanController::new(&outcome.policy), env, &basis, &targets, false)?
            }
            AblationVariant::NoAggressiveReward => {
                let policy = PolicyParams::init(full_basis.len(), train_cfg.seed.unwrap_or(0));
                let outcome =
                    train_policy(env, &full_basis, policy, train_cfg, &RewardSpec::linear())?;
                eval_grid(
                    &PolicyMeanController::new(&outcome.policy),
                    env,
                    &full_basis,
                    &targets,
                    false,
                )?
            }
        };
        rows.push(AblationRow {
            variant: variant.label().into(),
            mae: report.mae,
            pearson_r: report.pearson_r,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adapter::{Adapter, BasisEntry, TensorMeta};
    use crate::envs::AnalyticEnv;
    use approx::assert_abs_diff_eq;

    fn basis(intensities: &[f64]) -> BasisSet {
        let meta = vec![TensorMeta { name: "intensity".into(), dims: vec![1] }];
        let entries = intensities
            .iter()
            .enumerate()
            .map(|(i, &c)| BasisEntry {
                adapter: Adapter::new(vec![c], meta.clone()).unwrap(),
                intensity: c,
                source_step: i as u64,
            })
            .collect();
        BasisSet::new(("L".into(), "R".into()), "L".into(), entries).unwrap()
    }

    #[test]
    fn mae_hand_values() {
        assert_eq!(mae(&[(1.0, 1.0), (2.0, 2.0)]).unwrap(), 0.0);
        let pairs = [(0.0, 10.0), (50.0, 40.0), (100.0, 100.0)];
        assert_abs_diff_eq!(mae(&pairs).unwrap(), 20.0 / 3.0, epsilon = 1e-12);
        assert!(matches!(mae(&[]), Err(MetricsError::EmptyInput)));
    }

    #[test]
    fn mae_is_translation_equivariant() {
        let pairs: Vec<(f64, f64)> = (0..7).map(|k| (k as f64 * 10.0, k as f64 * 10.0 + 3.5)).collect();
        assert_abs_diff_eq!(mae(&pairs).unwrap(), 3.5, epsilon = 1e-12);
    }

    #[test]
    fn pearson_hand_values() {
        let inc: Vec<(f64, f64)> = (0..5).map(|k| (k as f64, 2.0 * k as f64 + 1.0)).collect();
        assert_abs_diff_eq!(pearson(&inc).unwrap(), 1.0, epsilon = 1e-12);
        let pairs = [(0.0, 10.0), (50.0, 40.0), (100.0, 100.0)];
        assert_abs_diff_eq!(pearson(&pairs).unwrap(), 0.9819805060619657, epsilon = 1e-10);
        let anti: Vec<(f64, f64)> = (0..5).map(|k| (k as f64, -(k as f64) + 9.0)).collect();
        assert_abs_diff_eq!(pearson(&anti).unwrap(), -1.0, epsilon = 1e-12);
    }

    #[test]
    fn pearson_rejects_constants() {
        let flat = [(1.0, 5.0), (2.0, 5.0), (3.0, 5.0)];
        assert!(matches!(pearson(&flat), Err(MetricsError::UndefinedCorrelation(_))));
    }

    #[test]
    fn pearson_is_invariant_under_positive_affine_maps() {
        let pairs = [(0.0, 12.0), (30.0, 18.0), (60.0, 55.0), (90.0, 71.0)];
        let r0 = pearson(&pairs).unwrap();
        let scaled: Vec<(f64, f64)> =
            pairs.iter().map(|(t, a)| (3.0 * t + 7.0, 0.5 * a - 2.0)).collect();
        assert_abs_diff_eq!(pearson(&scaled).unwrap(), r0, epsilon = 1e-12);
    }

    #[test]
    fn nearest_picks_closest_intensity() {
        let b = basis(&[50.0, 70.0, 100.0]);
        assert_eq!(baseline_nearest(&b, 75.0), vec![0.0, 1.0, 0.0]);
        assert_eq!(baseline_nearest(&b, 70.0), vec![0.0, 1.0, 0.0]);
        assert_eq!(baseline_nearest(&b, 150.0), vec![0.0, 0.0, 1.0]);
        // Tie at 60 between 50 and 70: lower step wins.
        assert_eq!(baseline_nearest(&b, 60.0), vec![1.0, 0.0, 0.0]);
    }

    #[test]
    fn interp_brackets_and_clamps() {
        let b = basis(&[50.0, 70.0, 100.0]);
        let w = baseline_interp(&b, 75.0);
        assert_abs_diff_eq!(w[1], 25.0 / 30.0, epsilon = 1e-12);
        assert_abs_diff_eq!(w[2], 5.0 / 30.0, epsilon = 1e-12);
        assert_eq!(baseline_interp(&b, 70.0), vec![0.0, 1.0, 0.0]);
        assert_eq!(baseline_interp(&b, 110.0), vec![0.0, 0.0, 1.0]);
        assert_eq!(baseline_interp(&b, 10.0), vec![1.0, 0.0, 0.0]);
    }

    #[test]
    fn interp_duplicate_intensities_take_lower_step() {
        let b = basis(&[50.0, 70.0, 70.0, 100.0]);
        let w = baseline_interp(&b, 70.0);
        assert_eq!(w, vec![0.0, 1.0, 0.0, 0.0]);
    }

    #[test]
    fn interp_inverts_linear_environments() {
        let b = basis(&[0.0, 30.0, 55.0, 100.0]);
        let env = AnalyticEnv::new(AnalyticEnvConfig {
            basis_intensities: vec![0.0, 30.0, 55.0, 100.0],
            warp_gamma: 1.0,
            noise_sd: 0.0,
            seed: Some(0),
        })
        .unwrap();
        let targets: Vec<f64> = (0..=10).map(|k| 10.0 * k as f64).collect();
        let report = eval_grid(&InterpController::new(&b), &env, &b, &targets, false).unwrap();
        assert!(report.mae < 1e-9, "mae = {}", report.mae);
        assert_abs_diff_eq!(report.pearson_r, 1.0, epsilon = 1e-9);
    }

    #[test]
    fn scaled_vector_coefficients() {
        let meta = vec![TensorMeta { name: "d".into(), dims: vec![2] }];
        let fin = Adapter::new(vec![2.0, -4.0], meta).unwrap();
        // target = p1 -> the final adapter itself.
        let a = baseline_scaled_vector(&fin, 40.0, 100.0, 100.0, 1.5).unwrap();
        assert_eq!(a.data(), fin.data());
        // target = p0 -> zero adapter.
        let z = baseline_scaled_vector(&fin, 40.0, 100.0, 40.0, 1.5).unwrap();
        assert!(z.data().iter().all(|&v| v == 0.0));
        // halfway coefficient.
        let h = baseline_scaled_vector(&fin, 40.0, 100.0, 70.0, 1.5).unwrap();
        assert_eq!(h.data(), &[1.0, -2.0]);
        // clamp above.
        let c = baseline_scaled_vector(&fin, 0.0, 10.0, 100.0, 1.5).unwrap();
        assert_eq!(c.data(), &[3.0, -6.0]);
        assert!(matches!(
            baseline_scaled_vector(&fin, 50.0, 50.0, 70.0, 1.5),
            Err(MetricsError::DegenerateVector(_))
        ));
    }

    #[test]
    fn default_grid_respects_range() {
        assert_eq!(default_grid((0.0, 100.0)).len(), 11);
        assert_eq!(default_grid((0.015, 99.9)), vec![
            10.0, 20.0, 30.0, 40.0, 50.0, 60.0, 70.0, 80.0, 90.0
        ]);
        assert_eq!(default_grid((35.0, 55.0)), vec![40.0, 50.0]);
    }

    #[test]
    fn oracle_controller_beats_interp_on_warped_env() {
        let cfg = AnalyticEnvConfig {
            basis_intensities: vec![5.0, 20.0, 40.0, 60.0, 80.0, 95.0],
            warp_gamma: 3.0,
            noise_sd: 0.0,
            seed: Some(0),
        };
        let env = AnalyticEnv::new(cfg.clone()).unwrap();
        let b = env.basis().unwrap();
        let targets = default_grid(env.controllable_range(&b).unwrap());
        let oracle =
            eval_grid(&OracleController::new(&cfg, 0.05), &env, &b, &targets, false).unwrap();
        let interp = eval_grid(&InterpController::new(&b), &env, &b, &targets, false).unwrap();
        assert!(
            oracle.mae + 1.0 < interp.mae,
            "expected a nonlinearity gap: oracle {} vs interp {}",
            oracle.mae,
            interp.mae
        );
    }

    #[test]
    fn oracle_residual_lower_bounds_other_controllers() {
        // On the same noiseless environment no controller can beat the
        // oracle by more than the grid resolution slack.
        let cfg = AnalyticEnvConfig {
            basis_intensities: vec![10.0, 35.0, 75.0, 90.0],
            warp_gamma: 2.0,
            noise_sd: 0.0,
            seed: Some(0),
        };
        let env = AnalyticEnv::new(cfg.clone()).unwrap();
        let b = env.basis().unwrap();
        // Slack: worst-case |dP/dm| over the range times the m-grid pitch.
        let grid_step = 0.02;
        let mut max_slope: f64 = 0.0;
        for i in 0..1000 {
            let m0 = 10.0 + 80.0 * i as f64 / 1000.0;
            let m1 = m0 + 0.08;
            let p0 = env.evaluate_noiseless(&AnalyticEnv::adapter_for(m0).unwrap()).unwrap();
            let p1 = env.evaluate_noiseless(&AnalyticEnv::adapter_for(m1).unwrap()).unwrap();
            max_slope = max_slope.max((p1 - p0).abs() / 0.08);
        }
        let slack = max_slope * grid_step * 80.0;
        for t in [15.0, 30.0, 52.0, 88.0] {
            let (_, residual) = oracle_best_weights(&cfg, t, grid_step).unwrap();
            for w in [baseline_nearest(&b, t), baseline_interp(&b, t)] {
                let fused = fuse_adapters(&b, &w).unwrap();
                let p = env.evaluate_noiseless(&fused).unwrap();
                let err = (p - t).abs();
                assert!(
                    err + slack >= residual - 1e-9,
                    "controller beat the oracle beyond slack at target {t}: {err} vs {residual}"
                );
            }
        }
    }
}
