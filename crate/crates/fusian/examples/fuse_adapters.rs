//! Fuse basis adapters with simplex weights and save/load the library format.
//!
//! Run with: `cargo run --release --example fuse_adapters`

use fusian::adapter::{
    fuse_adapters, load_library, save_library, Adapter, BasisEntry, BasisSet, Checkpoint,
    TensorMeta, TrajectoryLibrary,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let meta = vec![TensorMeta { name: "value_proj.delta".into(), dims: vec![2, 3] }];
    let mk = |data: Vec<f64>| Adapter::new(data, meta.clone()).unwrap();

    let basis = BasisSet::new(
        ("F".into(), "T".into()),
        "F".into(),
        vec![
            BasisEntry { adapter: mk(vec![0.0; 6]), intensity: 12.0, source_step: 3 },
            BasisEntry {
                adapter: mk(vec![0.4, -0.2, 0.1, 0.0, 0.3, -0.5]),
                intensity: 55.0,
                source_step: 40,
            },
            BasisEntry {
                adapter: mk(vec![0.9, -0.6, 0.2, 0.1, 0.8, -1.1]),
                intensity: 93.0,
                source_step: 117,
            },
        ],
    )?;

    // A one-hot weight vector returns the selected adapter unchanged; convex
    // mixtures stay inside the componentwise hull.
    let one_hot = fuse_adapters(&basis, &[0.0, 1.0, 0.0])?;
    println!("one-hot fusion:  {:?}", one_hot.data());
    let mixed = fuse_adapters(&basis, &[0.2, 0.5, 0.3])?;
    println!("(0.2,0.5,0.3):   {:?}", mixed.data());

    // Weights off the simplex are rejected.
    println!("bad weights:     {:?}", fuse_adapters(&basis, &[0.7, 0.7, -0.4]).unwrap_err());

    // The same adapters as a trajectory library, round-tripped through JSON.
    let lib = TrajectoryLibrary::new(
        ("F".into(), "T".into()),
        "F".into(),
        meta,
        basis
            .entries()
            .iter()
            .map(|e| Checkpoint::new(e.source_step, e.adapter.clone(), e.intensity).unwrap())
            .collect(),
    )?;
    let path = std::env::temp_dir().join("fusian_example_library.json");
    save_library(&lib, &path)?;
    let back = load_library(&path)?;
    println!(
        "library round-trip: {} checkpoints, bit-identical = {}",
        back.len(),
        back == lib
    );
    std::fs::remove_file(&path).ok();
    Ok(())
}
