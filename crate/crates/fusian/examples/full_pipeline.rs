//! The whole file-based pipeline in one run: collect a toy trajectory,
//! select the stable basis, train the fusion policy against the same toy
//! subject, and evaluate it against the interpolation baseline.
//!
//! Run with: `cargo run --release --example full_pipeline`

use fusian::pipeline::{
    run_collect, run_eval, run_select, run_train, CollectArgs, EnvKind, EvalArgs, MethodKind,
    SelectArgs, TrainArgs,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = tempfile::tempdir()?;
    let root = dir.path();
    let sft_cfg = root.join("sft.json");
    std::fs::write(&sft_cfg, r#"{"sft_steps": 120, "label_noise": 0.1}"#)?;
    let sel_cfg = root.join("sel.json");
    std::fs::write(&sel_cfg, r#"{"n_basis": 8}"#)?;
    let train_cfg = root.join("train.json");
    std::fs::write(
        &train_cfg,
        r#"{"train": {"epochs": 300, "targets_per_epoch": 64, "accumulation_steps": 8,
                      "lr": 0.0005, "average_last_epochs": 75}}"#,
    )?;

    println!("1. collect");
    let collected = run_collect(&CollectArgs {
        config: sft_cfg.clone(),
        seed: Some(11),
        out: root.join("collect"),
    })?;
    println!("   -> {}", collected.library_path.display());

    println!("2. select");
    let selected = run_select(&SelectArgs {
        library: collected.library_path,
        config: Some(sel_cfg),
        out: root.join("select"),
    })?;
    println!("   -> {}", selected.basis_path.display());

    println!("3. train");
    let trained = run_train(&TrainArgs {
        env: EnvKind::ToySft,
        config: sft_cfg.clone(),
        basis: Some(selected.basis_path.clone()),
        train_config: Some(train_cfg),
        seed: Some(11),
        no_noise: false,
        out: root.join("train"),
    })?;
    println!("   -> {} (seed {})", trained.policy_path.display(), trained.seed);

    println!("4. eval");
    for method in [MethodKind::Fusian, MethodKind::Interp, MethodKind::Nearest] {
        let summary = run_eval(&EvalArgs {
            env: EnvKind::ToySft,
            config: sft_cfg.clone(),
            basis: Some(selected.basis_path.clone()),
            policy: (method == MethodKind::Fusian).then(|| trained.policy_path.clone()),
            method,
            targets: None,
            grid_step: 0.01,
            seed: Some(11),
            out: root.join(format!("eval_{}", method.label())),
        })?;
        println!(
            "   {:<8} mae {:>7.3}  pearson_r {:>7.4}",
            summary.method, summary.mae, summary.pearson_r
        );
    }
    println!("\nartifacts live under {} (one manifest per stage)", root.display());
    Ok(())
}
