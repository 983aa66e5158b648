//! Ablation table on a real toy trajectory: the full method against the
//! no-dynamic-fusion, no-stable-basis, and no-aggressive-reward variants.
//!
//! Run with: `cargo run --release --example ablation_study`

use fusian::envs::{Environment, ToySftConfig, ToySftEnv};
use fusian::metrics::{run_ablations, AblationVariant, BasisSource};
use fusian::selection::SelectionConfig;
use fusian::trainer::{RewardConfig, TrainConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let env = ToySftEnv::new(ToySftConfig { seed: Some(0), ..Default::default() })?;
    println!("collecting the trajectory ({})...", env.descriptor());
    let run = env.collect()?;
    println!(
        "library: {} checkpoints covering [{:.1}, {:.1}]",
        run.library.len(),
        run.library.checkpoints().iter().map(|c| c.trait_percentage).fold(f64::INFINITY, f64::min),
        run.library
            .checkpoints()
            .iter()
            .map(|c| c.trait_percentage)
            .fold(f64::NEG_INFINITY, f64::max)
    );

    let train_cfg = TrainConfig {
        epochs: 300,
        targets_per_epoch: 64,
        accumulation_steps: 8,
        lr: 5e-4,
        average_last_epochs: 75,
        seed: Some(5),
        ..Default::default()
    };
    println!("training each variant with the shared seed...");
    let rows = run_ablations(
        &env,
        &BasisSource::Library(run.library),
        &[
            AblationVariant::Full,
            AblationVariant::NoDynamicFusion,
            AblationVariant::NoStableBasis,
            AblationVariant::NoAggressiveReward,
        ],
        &SelectionConfig::default(),
        &train_cfg,
        &RewardConfig::default(),
    )?;

    println!("\n{:<22} {:>8} {:>10}", "variant", "mae", "pearson_r");
    for row in rows {
        println!("{:<22} {:>8.3} {:>10.4}", row.variant, row.mae, row.pearson_r);
    }
    Ok(())
}
