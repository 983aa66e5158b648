//! Stable basis selection on a noisy synthetic trajectory: variance
//! filtering followed by uniform value sampling.
//!
//! Run with: `cargo run --release --example basis_selection`

use fusian::adapter::{Adapter, Checkpoint, TensorMeta, TrajectoryLibrary};
use fusian::selection::{select_basis, SelectionConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // A trajectory that climbs with diminishing returns, plus two unstable
    // bursts early on.
    let meta = vec![TensorMeta { name: "d".into(), dims: vec![1] }];
    let mut percentages: Vec<f64> = (0..120)
        .map(|i| {
            let x = i as f64 / 119.0;
            15.0 + 80.0 * (1.0 - (-3.0 * x).exp()) / (1.0 - (-3.0f64).exp())
        })
        .collect();
    percentages[8] += 14.0; // unstable burst
    percentages[9] -= 9.0;
    percentages[31] += 12.0;

    let checkpoints: Vec<Checkpoint> = percentages
        .iter()
        .enumerate()
        .map(|(i, &p)| {
            Checkpoint::new(i as u64, Adapter::new(vec![p], meta.clone()).unwrap(), p).unwrap()
        })
        .collect();
    let lib =
        TrajectoryLibrary::new(("P".into(), "J".into()), "P".into(), meta, checkpoints)?;

    let cfg = SelectionConfig::default(); // W = 3, threshold 10, N = 10
    let (basis, report) = select_basis(&lib, &cfg)?;

    let discarded: Vec<u64> = report.iter().filter(|r| !r.kept).map(|r| r.step).collect();
    println!("checkpoints: {}", lib.len());
    println!("discarded as unstable ({}): {discarded:?}", discarded.len());
    println!("selected basis (N = {}):", basis.len());
    for e in basis.entries() {
        println!("  step {:>3} at intensity {:>6.2}", e.source_step, e.intensity);
    }
    let gaps: Vec<f64> =
        basis.intensities().windows(2).map(|w| w[1] - w[0]).collect();
    println!(
        "intensity coverage: [{:.2}, {:.2}], max gap {:.2}",
        basis.min_intensity(),
        basis.max_intensity(),
        gaps.iter().cloned().fold(0.0, f64::max)
    );
    Ok(())
}
