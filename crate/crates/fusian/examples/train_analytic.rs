//! Train the fusion policy on the warped analytic environment and compare it
//! against the interpolation baseline and the brute-force oracle.
//!
//! Run with: `cargo run --release --example train_analytic`

use fusian::envs::{oracle_best_weights, AnalyticEnv, AnalyticEnvConfig, Environment};
use fusian::metrics::{default_grid, eval_grid, InterpController, PolicyMeanController};
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
    println!("environment: {}", env.descriptor());
    println!("eval targets: {targets:?}");

    let epochs: usize = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(TrainConfig::default().epochs);
    let lr: f64 = std::env::args()
        .nth(2)
        .and_then(|s| s.parse().ok())
        .unwrap_or(TrainConfig::default().lr);
    let train_cfg = TrainConfig { epochs, lr, seed: Some(42), ..Default::default() };
    let reward = RewardSpec::aggressive(RewardConfig::default());
    let policy = PolicyParams::init(basis.len(), 42);
    let outcome = train_policy(&env, &basis, policy, &train_cfg, &reward)?;

    // Rewards over the course of training, averaged per epoch.
    let per_epoch = train_cfg.targets_per_epoch;
    for (epoch, chunk) in outcome.log.chunks(per_epoch).enumerate() {
        let mean_r: f64 = chunk.iter().map(|r| r.reward).sum::<f64>() / chunk.len() as f64;
        let a_min = chunk.iter().map(|r| r.alpha_min).fold(f64::INFINITY, f64::min);
        let a_max = chunk.iter().map(|r| r.alpha_max).fold(f64::NEG_INFINITY, f64::max);
        println!(
            "epoch {epoch:>2}: mean reward {mean_r:.4}, beta {:.4}, alpha in [{a_min:.3}, {a_max:.3}]",
            chunk[0].beta
        );
    }

    let fusian_report =
        eval_grid(&PolicyMeanController::new(&outcome.policy), &env, &basis, &targets, false)?;
    let interp_report = eval_grid(&InterpController::new(&basis), &env, &basis, &targets, false)?;
    let oracle_mean: f64 = targets
        .iter()
        .map(|&t| oracle_best_weights(&cfg, t, 0.05).map(|(_, r)| r))
        .collect::<Result<Vec<_>, _>>()?
        .iter()
        .sum::<f64>()
        / targets.len() as f64;

    println!();
    println!("trained policy:  mae {:.4}, r {:.4}", fusian_report.mae, fusian_report.pearson_r);
    println!("interpolation:   mae {:.4}, r {:.4}", interp_report.mae, interp_report.pearson_r);
    println!("oracle residual: mean {oracle_mean:.4}");
    for (t, a) in &fusian_report.pairs {
        println!("  target {t:>5.1} -> actual {a:>8.3}");
    }
    Ok(())
}
