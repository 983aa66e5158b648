//! Compare every controller on the warped environment: trained policy,
//! nearest checkpoint, linear interpolation, scaled vector, and the
//! brute-force oracle.
//!
//! Run with: `cargo run --release --example baselines_eval`

use fusian::adapter::Adapter;
use fusian::envs::{AnalyticEnv, AnalyticEnvConfig, Environment};
use fusian::metrics::{
    default_grid, eval_grid, Controller, InterpController, NearestController, OracleController,
    PolicyMeanController, ScaledVectorController,
};
use fusian::policy::PolicyParams;
use fusian::trainer::{train_policy, RewardConfig, RewardSpec, TrainConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = AnalyticEnvConfig {
        basis_intensities: vec![5.0, 20.0, 40.0, 60.0, 80.0, 95.0],
        warp_gamma: 3.0,
        noise_sd: 1.0,
        seed: Some(42),
    };
    let env = AnalyticEnv::new(cfg.clone())?;
    let basis = env.basis()?;
    let targets = default_grid(env.controllable_range(&basis)?);

    println!("training the fusion policy...");
    let train_cfg = TrainConfig {
        epochs: 400,
        targets_per_epoch: 64,
        accumulation_steps: 8,
        lr: 5e-4,
        average_last_epochs: 100,
        seed: Some(42),
        ..Default::default()
    };
    let outcome = train_policy(
        &env,
        &basis,
        PolicyParams::init(basis.len(), 42),
        &train_cfg,
        &RewardSpec::aggressive(RewardConfig::default()),
    )?;

    // Scaled-vector baseline: scale the final (highest-intensity) adapter.
    let final_adapter = basis.entries().last().unwrap().adapter.clone();
    let zero = Adapter::zeros(basis.shape_meta().to_vec());
    let p0 = env.evaluate_noiseless(&zero)?;
    let p1 = env.evaluate_noiseless(&final_adapter)?;

    let policy_controller = PolicyMeanController::new(&outcome.policy);
    let nearest = NearestController::new(&basis);
    let interp = InterpController::new(&basis);
    let scaled = ScaledVectorController::new(final_adapter, p0, p1);
    let oracle = OracleController::new(&cfg, 0.05);
    let controllers: Vec<&dyn Controller> =
        vec![&policy_controller, &nearest, &interp, &scaled, &oracle];

    println!("\n{:<8} {:>8} {:>9}", "method", "mae", "pearson_r");
    for controller in controllers {
        let report = eval_grid(controller, &env, &basis, &targets, false)?;
        println!("{:<8} {:>8.3} {:>9.4}", report.method_tag, report.mae, report.pearson_r);
    }
    Ok(())
}
