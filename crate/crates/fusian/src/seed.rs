//! Deterministic seed derivation. Every stage of the pipeline draws its
//! randomness from one recorded root seed split by stage label, so a run is
//! reproducible from its manifest.

use rand_chacha::ChaCha12Rng;
use sha2::{Digest, Sha256};

/// Derive a child seed from a root seed and a stage label.
pub fn derive_seed(root: u64, label: &str) -> u64 {
    let mut hasher = Sha256::new();
    hasher.update(root.to_le_bytes());
    hasher.update(label.as_bytes());
    let digest = hasher.finalize();
    u64::from_le_bytes(digest[..8].try_into().expect("sha256 yields at least 8 bytes"))
}

/// RNG for one pipeline stage.
pub fn stage_rng(root: u64, label: &str) -> ChaCha12Rng {
    use rand::SeedableRng;
    ChaCha12Rng::seed_from_u64(derive_seed(root, label))
}
