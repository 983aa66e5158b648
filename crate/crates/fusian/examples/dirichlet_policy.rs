//! The policy network and the Dirichlet it parameterizes: concentrations,
//! sampling, log-density, entropy, and the sparse-mixture effect of
//! concentrations below 1.
//!
//! Run with: `cargo run --release --example dirichlet_policy`

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use fusian::dirichlet::{dirichlet_entropy, dirichlet_mean, dirichlet_sample};
use fusian::policy::{normalize_target, PolicyParams};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let policy = PolicyParams::init(4, 9);
    println!("fresh policy ({} parameters):", policy.param_count());
    for target in [0.0, 25.0, 50.0, 75.0, 100.0] {
        let alpha = policy.forward(normalize_target(target)?)?;
        println!(
            "  target {target:>5.1} -> alpha {:?} (mean weights {:?})",
            alpha.as_slice().iter().map(|a| format!("{a:.3}")).collect::<Vec<_>>(),
            dirichlet_mean(alpha.as_slice())?
                .iter()
                .map(|w| format!("{w:.3}"))
                .collect::<Vec<_>>()
        );
    }

    let mut rng = ChaCha12Rng::seed_from_u64(7);
    let alpha = [0.8, 1.6, 2.4, 0.9];
    println!("\nsamples from Dirichlet({alpha:?}):");
    for _ in 0..4 {
        let s = dirichlet_sample(&alpha, &mut rng)?;
        println!(
            "  w = {:?}  log_prob = {:+.4}  entropy = {:+.4}",
            s.w.iter().map(|w| format!("{w:.3}")).collect::<Vec<_>>(),
            s.log_prob,
            s.entropy
        );
    }

    // Concentrations below 1 push mass toward the simplex corners, letting
    // the policy pick essentially single adapters.
    let corner_rate = |alpha: &[f64], rng: &mut ChaCha12Rng| {
        let n = 20_000;
        let mut hits = 0;
        for _ in 0..n {
            let s = dirichlet_sample(alpha, rng).unwrap();
            if s.w.iter().cloned().fold(f64::MIN, f64::max) > 0.9 {
                hits += 1;
            }
        }
        hits as f64 / n as f64
    };
    let sparse = [0.3, 0.3, 0.3, 0.3];
    let flat = [1.0, 1.0, 1.0, 1.0];
    println!("\nfraction of draws with max weight > 0.9:");
    println!(
        "  alpha = 0.3: {:.3}   (entropy {:+.3})",
        corner_rate(&sparse, &mut rng),
        dirichlet_entropy(&sparse)?
    );
    println!(
        "  alpha = 1.0: {:.3}   (entropy {:+.3})",
        corner_rate(&flat, &mut rng),
        dirichlet_entropy(&flat)?
    );
    Ok(())
}
