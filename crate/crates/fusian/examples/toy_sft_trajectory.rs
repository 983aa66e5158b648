//! Stage-one end to end: fine-tune the toy scorer, score every update, and
//! print the resulting trajectory with its stability profile.
//!
//! Run with: `cargo run --release --example toy_sft_trajectory`

use fusian::adapter::TrajectoryLibrary;
use fusian::envs::{ToySftConfig, ToySftEnv};
use fusian::selection::{window_variances, SelectionConfig};

fn sparkline(lib: &TrajectoryLibrary) -> String {
    const BARS: &[char] = &['\u{2581}', '\u{2582}', '\u{2583}', '\u{2584}', '\u{2585}', '\u{2586}', '\u{2587}', '\u{2588}'];
    lib.checkpoints()
        .iter()
        .map(|c| BARS[((c.trait_percentage / 100.0) * (BARS.len() - 1) as f64).round() as usize])
        .collect()
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = ToySftConfig { seed: Some(0), ..Default::default() };
    let env = ToySftEnv::new(cfg.clone())?;
    let run = env.collect()?;
    let lib = &run.library;
    println!("collected {} checkpoints from {} updates", lib.len(), cfg.sft_steps);
    println!("trajectory: {}", sparkline(lib));

    let cps = lib.checkpoints();
    let first = cps[0].trait_percentage;
    let last = cps[cps.len() - 1].trait_percentage;
    println!("initial P = {first:.2}, final P = {last:.2}, gain = {:.2}", last - first);

    let dips: Vec<u64> = cps
        .windows(2)
        .filter(|w| w[1].trait_percentage < w[0].trait_percentage)
        .map(|w| w[1].step)
        .collect();
    println!("non-monotone steps ({}): {:?}", dips.len(), dips);

    let sel = SelectionConfig::default();
    let vars = window_variances(lib, &sel)?;
    let unstable: Vec<(u64, f64)> = cps
        .iter()
        .zip(&vars)
        .filter(|(_, &v)| v > sel.variance_threshold)
        .map(|(c, &v)| (c.step, v))
        .collect();
    println!(
        "windows over the variance threshold {} ({} of {}): {:?}",
        sel.variance_threshold,
        unstable.len(),
        vars.len(),
        unstable.iter().take(8).collect::<Vec<_>>()
    );
    for cp in cps.iter().step_by(12) {
        println!("  step {:>3}: P = {:>6.2}", cp.step, cp.trait_percentage);
    }
    Ok(())
}
