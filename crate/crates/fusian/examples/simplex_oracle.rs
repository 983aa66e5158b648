//! Brute-force the best achievable weights on the analytic environment.
//! The residual per target lower-bounds any controller's error there.
//!
//! Run with: `cargo run --release --example simplex_oracle`

use fusian::envs::{oracle_best_weights, AnalyticEnvConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = AnalyticEnvConfig {
        basis_intensities: vec![10.0, 45.0, 90.0],
        warp_gamma: 3.0,
        noise_sd: 0.0,
        seed: Some(0),
    };
    println!(
        "exhaustive search over the {}-adapter simplex, grid step 0.01:",
        cfg.basis_intensities.len()
    );
    for target in [5.0, 20.0, 35.0, 50.0, 65.0, 80.0, 95.0] {
        let (w, residual) = oracle_best_weights(&cfg, target, 0.01)?;
        println!(
            "  target {target:>5.1}: w* = {:?}  residual {residual:.4}",
            w.iter().map(|x| format!("{x:.2}")).collect::<Vec<_>>()
        );
    }

    // Refining the grid never increases the residual.
    println!("\nresidual at target 37 by grid step:");
    for step in [0.25, 0.1, 0.05, 0.02, 0.01] {
        let (_, residual) = oracle_best_weights(&cfg, 37.0, step)?;
        println!("  step {step:>5}: {residual:.5}");
    }

    // Oversized grids are rejected rather than left to run for hours.
    let big = AnalyticEnvConfig {
        basis_intensities: vec![0.0, 20.0, 40.0, 60.0, 80.0, 100.0],
        ..cfg
    };
    println!("\n6 adapters at step 0.01: {}", oracle_best_weights(&big, 50.0, 0.01).unwrap_err());
    Ok(())
}
