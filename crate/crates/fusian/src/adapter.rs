//! Adapter deltas, linear fusion, and the on-disk trajectory-library format.
//!
//! An [`Adapter`] is a flattened parameter delta with shape metadata. A
//! [`TrajectoryLibrary`] is the sequence of `(step, adapter, trait
//! percentage)` checkpoints captured while fine-tuning, and a [`BasisSet`] is
//! the stable subset selected for fusion. Fusion is a plain convex
//! combination of adapter data, so all fused deltas stay inside the convex
//! hull of the basis.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::jsonio;

/// Current version of the library/basis file schema.
pub const FORMAT_VERSION: u32 = 1;

/// Tolerance on `sum(weights) - 1` accepted by [`fuse_adapters`].
pub const SIMPLEX_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AdapterError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionError { expected: usize, got: usize },
    #[error("invalid fusion weights: {reason}")]
    InvalidWeights { reason: String },
    #[error("adapter data length {len} does not match shape metadata total {expected}")]
    ShapeMismatch { len: usize, expected: usize },
    #[error("non-finite value at index {index}")]
    NonFinite { index: usize },
    #[error("format error in {path}: {detail}")]
    FormatError { path: String, detail: String },
    #[error("version mismatch in {path}: file has {found}, expected {expected}")]
    VersionError { path: String, found: u32, expected: u32 },
    #[error("io error on {path}: {detail}")]
    Io { path: String, detail: String },
    #[error("invalid trait percentage {value} at {context} (must be in [0, 100])")]
    InvalidPercentage { value: f64, context: String },
    #[error("invalid library: {0}")]
    InvalidLibrary(String),
}

/// Name and dimensions of one logical tensor flattened into adapter data.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TensorMeta {
    pub name: String,
    pub dims: Vec<usize>,
}

impl TensorMeta {
    pub fn element_count(&self) -> usize {
        self.dims.iter().product()
    }
}

fn total_elements(meta: &[TensorMeta]) -> usize {
    meta.iter().map(TensorMeta::element_count).sum()
}

/// Flat parameter delta plus the shape metadata describing its layout.
#[derive(Debug, Clone, PartialEq)]
pub struct Adapter {
    data: Vec<f64>,
    shape_meta: Vec<TensorMeta>,
}

impl Adapter {
    /// Build an adapter, checking that the data length matches the shape
    /// metadata and that every value is finite.
    pub fn new(data: Vec<f64>, shape_meta: Vec<TensorMeta>) -> Result<Self, AdapterError> {
        let expected = total_elements(&shape_meta);
        if data.len() != expected {
            return Err(AdapterError::ShapeMismatch { len: data.len(), expected });
        }
        if let Some(index) = data.iter().position(|v| !v.is_finite()) {
            return Err(AdapterError::NonFinite { index });
        }
        Ok(Self { data, shape_meta })
    }

    /// All-zero adapter with the given layout.
    pub fn zeros(shape_meta: Vec<TensorMeta>) -> Self {
        let len = total_elements(&shape_meta);
        Self { data: vec![0.0; len], shape_meta }
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn shape_meta(&self) -> &[TensorMeta] {
        &self.shape_meta
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    /// Returns `a * self` without re-validating (scaling keeps finiteness for
    /// finite `a`).
    pub fn scaled(&self, factor: f64) -> Result<Self, AdapterError> {
        let data: Vec<f64> = self.data.iter().map(|v| v * factor).collect();
        Adapter::new(data, self.shape_meta.clone())
    }
}

/// One trajectory record: the adapter after gradient update `step` and the
/// trait percentage it measured.
#[derive(Debug, Clone, PartialEq)]
pub struct Checkpoint {
    pub step: u64,
    pub adapter: Adapter,
    pub trait_percentage: f64,
}

impl Checkpoint {
    pub fn new(step: u64, adapter: Adapter, trait_percentage: f64) -> Result<Self, AdapterError> {
        if !(0.0..=100.0).contains(&trait_percentage) || !trait_percentage.is_finite() {
            return Err(AdapterError::InvalidPercentage {
                value: trait_percentage,
                context: format!("checkpoint step {step}"),
            });
        }
        Ok(Self { step, adapter, trait_percentage })
    }
}

/// The full sequence of scored checkpoints from one fine-tuning run.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryLibrary {
    trait_pair: (String, String),
    target_pole: String,
    shape_meta: Vec<TensorMeta>,
    checkpoints: Vec<Checkpoint>,
}

impl TrajectoryLibrary {
    /// Build a library, validating step order, shape consistency, and that
    /// the target pole names one side of the trait pair.
    pub fn new(
        trait_pair: (String, String),
        target_pole: String,
        shape_meta: Vec<TensorMeta>,
        checkpoints: Vec<Checkpoint>,
    ) -> Result<Self, AdapterError> {
        if target_pole != trait_pair.0 && target_pole != trait_pair.1 {
            return Err(AdapterError::InvalidLibrary(format!(
                "target_pole {target_pole:?} is neither pole of {trait_pair:?}"
            )));
        }
        for (i, cp) in checkpoints.iter().enumerate() {
            if cp.adapter.shape_meta() != shape_meta.as_slice() {
                return Err(AdapterError::InvalidLibrary(format!(
                    "checkpoints[{i}] shape metadata differs from the library's"
                )));
            }
            if i > 0 && checkpoints[i - 1].step >= cp.step {
                return Err(AdapterError::InvalidLibrary(format!(
                    "checkpoints[{i}].step = {} does not increase over {}",
                    cp.step,
                    checkpoints[i - 1].step
                )));
            }
        }
        Ok(Self { trait_pair, target_pole, shape_meta, checkpoints })
    }

    pub fn trait_pair(&self) -> (&str, &str) {
        (&self.trait_pair.0, &self.trait_pair.1)
    }

    pub fn target_pole(&self) -> &str {
        &self.target_pole
    }

    pub fn shape_meta(&self) -> &[TensorMeta] {
        &self.shape_meta
    }

    pub fn checkpoints(&self) -> &[Checkpoint] {
        &self.checkpoints
    }

    pub fn len(&self) -> usize {
        self.checkpoints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.checkpoints.is_empty()
    }
}

/// One fusion basis member.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisEntry {
    pub adapter: Adapter,
    /// Measured trait percentage of this adapter, in [0, 100].
    pub intensity: f64,
    /// Trajectory step the adapter came from.
    pub source_step: u64,
}

/// Stable adapters spanning the observed intensity range, sorted ascending by
/// intensity. Fusion mixes exactly these.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisSet {
    trait_pair: (String, String),
    target_pole: String,
    entries: Vec<BasisEntry>,
}

impl BasisSet {
    pub fn new(
        trait_pair: (String, String),
        target_pole: String,
        entries: Vec<BasisEntry>,
    ) -> Result<Self, AdapterError> {
        if entries.len() < 2 {
            return Err(AdapterError::InvalidLibrary(format!(
                "a basis needs at least 2 entries, got {}",
                entries.len()
            )));
        }
        let meta = entries[0].adapter.shape_meta();
        for (i, e) in entries.iter().enumerate() {
            if !(0.0..=100.0).contains(&e.intensity) {
                return Err(AdapterError::InvalidPercentage {
                    value: e.intensity,
                    context: format!("basis entry {i}"),
                });
            }
            if e.adapter.shape_meta() != meta {
                return Err(AdapterError::InvalidLibrary(format!(
                    "basis entry {i} shape metadata differs from entry 0"
                )));
            }
            if i > 0 && entries[i - 1].intensity > e.intensity {
                return Err(AdapterError::InvalidLibrary(format!(
                    "basis entries not sorted by intensity at index {i}"
                )));
            }
        }
        Ok(Self { trait_pair, target_pole, entries })
    }

    pub fn entries(&self) -> &[BasisEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn trait_pair(&self) -> (&str, &str) {
        (&self.trait_pair.0, &self.trait_pair.1)
    }

    pub fn target_pole(&self) -> &str {
        &self.target_pole
    }

    pub fn intensities(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.intensity).collect()
    }

    pub fn min_intensity(&self) -> f64 {
        self.entries.first().map(|e| e.intensity).unwrap_or(0.0)
    }

    pub fn max_intensity(&self) -> f64 {
        self.entries.last().map(|e| e.intensity).unwrap_or(0.0)
    }

    pub fn shape_meta(&self) -> &[TensorMeta] {
        self.entries[0].adapter.shape_meta()
    }
}

/// Fuse the basis adapters with simplex weights: `out[j] = sum_i w[i] *
/// basis[i].data[j]`.
///
/// Weights must match the basis length, be non-negative, and sum to 1 within
/// [`SIMPLEX_TOLERANCE`].
pub fn fuse_adapters(basis: &BasisSet, weights: &[f64]) -> Result<Adapter, AdapterError> {
    let entries = basis.entries();
    if weights.len() != entries.len() {
        return Err(AdapterError::DimensionError {
            expected: entries.len(),
            got: weights.len(),
        });
    }
    let mut sum = 0.0;
    for (i, &w) in weights.iter().enumerate() {
        if !w.is_finite() || w < 0.0 {
            return Err(AdapterError::InvalidWeights {
                reason: format!("weights[{i}] = {w} is negative or non-finite"),
            });
        }
        sum += w;
    }
    if (sum - 1.0).abs() > SIMPLEX_TOLERANCE {
        return Err(AdapterError::InvalidWeights {
            reason: format!("weights sum to {sum}, outside 1 +/- {SIMPLEX_TOLERANCE}"),
        });
    }

    let len = entries[0].adapter.len();
    let mut data = vec![0.0; len];
    for (entry, &w) in entries.iter().zip(weights) {
        for (out, &v) in data.iter_mut().zip(entry.adapter.data()) {
            *out += w * v;
        }
    }
    Adapter::new(data, entries[0].adapter.shape_meta().to_vec())
}

// ---------------------------------------------------------------------------
// On-disk format. Libraries and bases share one schema: a basis file stores
// each entry's intensity in `trait_percentage` and its source step in `step`.
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct CheckpointRecord {
    step: u64,
    trait_percentage: f64,
    data: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct LibraryFile {
    format_version: u32,
    trait_pair: (String, String),
    target_pole: String,
    shape_meta: Vec<TensorMeta>,
    checkpoints: Vec<CheckpointRecord>,
}

fn write_file(path: &Path, file: &LibraryFile) -> Result<(), AdapterError> {
    let text = jsonio::to_string_precise(file).map_err(|e| AdapterError::FormatError {
        path: path.display().to_string(),
        detail: e.to_string(),
    })?;
    fs::write(path, text).map_err(|e| AdapterError::Io {
        path: path.display().to_string(),
        detail: e.to_string(),
    })
}

fn read_file(path: &Path) -> Result<LibraryFile, AdapterError> {
    let text = fs::read_to_string(path).map_err(|e| AdapterError::Io {
        path: path.display().to_string(),
        detail: e.to_string(),
    })?;
    let file: LibraryFile =
        serde_json::from_str(&text).map_err(|e| AdapterError::FormatError {
            path: path.display().to_string(),
            detail: format!("line {}, column {}: {e}", e.line(), e.column()),
        })?;
    if file.format_version != FORMAT_VERSION {
        return Err(AdapterError::VersionError {
            path: path.display().to_string(),
            found: file.format_version,
            expected: FORMAT_VERSION,
        });
    }
    Ok(file)
}

/// Write a trajectory library as JSON. Round-trips bit-exactly.
pub fn save_library(lib: &TrajectoryLibrary, path: &Path) -> Result<(), AdapterError> {
    let file = LibraryFile {
        format_version: FORMAT_VERSION,
        trait_pair: lib.trait_pair.clone(),
        target_pole: lib.target_pole.clone(),
        shape_meta: lib.shape_meta.clone(),
        checkpoints: lib
            .checkpoints
            .iter()
            .map(|cp| CheckpointRecord {
                step: cp.step,
                trait_percentage: cp.trait_percentage,
                data: cp.adapter.data().to_vec(),
            })
            .collect(),
    };
    write_file(path, &file)
}

/// Read a trajectory library, validating schema version and invariants.
pub fn load_library(path: &Path) -> Result<TrajectoryLibrary, AdapterError> {
    let file = read_file(path)?;
    let display = path.display().to_string();
    let mut checkpoints = Vec::with_capacity(file.checkpoints.len());
    for (i, rec) in file.checkpoints.into_iter().enumerate() {
        let adapter =
            Adapter::new(rec.data, file.shape_meta.clone()).map_err(|e| {
                AdapterError::FormatError {
                    path: display.clone(),
                    detail: format!("checkpoints[{i}]: {e}"),
                }
            })?;
        let cp = Checkpoint::new(rec.step, adapter, rec.trait_percentage).map_err(|e| {
            AdapterError::FormatError {
                path: display.clone(),
                detail: format!("checkpoints[{i}]: {e}"),
            }
        })?;
        checkpoints.push(cp);
    }
    TrajectoryLibrary::new(file.trait_pair, file.target_pole, file.shape_meta, checkpoints)
        .map_err(|e| AdapterError::FormatError { path: display, detail: e.to_string() })
}

/// Write a basis set in the library schema.
pub fn save_basis(basis: &BasisSet, path: &Path) -> Result<(), AdapterError> {
    let file = LibraryFile {
        format_version: FORMAT_VERSION,
        trait_pair: basis.trait_pair.clone(),
        target_pole: basis.target_pole.clone(),
        shape_meta: basis.shape_meta().to_vec(),
        checkpoints: basis
            .entries
            .iter()
            .map(|e| CheckpointRecord {
                step: e.source_step,
                trait_percentage: e.intensity,
                data: e.adapter.data().to_vec(),
            })
            .collect(),
    };
    write_file(path, &file)
}

/// Read a basis set from the library schema (entries must be sorted ascending
/// by intensity rather than by step).
pub fn load_basis(path: &Path) -> Result<BasisSet, AdapterError> {
    let file = read_file(path)?;
    let display = path.display().to_string();
    let mut entries = Vec::with_capacity(file.checkpoints.len());
    for (i, rec) in file.checkpoints.into_iter().enumerate() {
        let adapter =
            Adapter::new(rec.data, file.shape_meta.clone()).map_err(|e| {
                AdapterError::FormatError {
                    path: display.clone(),
                    detail: format!("checkpoints[{i}]: {e}"),
                }
            })?;
        entries.push(BasisEntry {
            adapter,
            intensity: rec.trait_percentage,
            source_step: rec.step,
        });
    }
    BasisSet::new(file.trait_pair, file.target_pole, entries)
        .map_err(|e| AdapterError::FormatError { path: display, detail: e.to_string() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn meta(n: usize) -> Vec<TensorMeta> {
        vec![TensorMeta { name: "delta".into(), dims: vec![n] }]
    }

    fn basis_from(data: Vec<Vec<f64>>, intensities: Vec<f64>) -> BasisSet {
        let n = data[0].len();
        let entries = data
            .into_iter()
            .zip(intensities)
            .enumerate()
            .map(|(i, (d, p))| BasisEntry {
                adapter: Adapter::new(d, meta(n)).unwrap(),
                intensity: p,
                source_step: i as u64,
            })
            .collect();
        BasisSet::new(("E".into(), "I".into()), "E".into(), entries).unwrap()
    }

    #[test]
    fn fuse_one_hot_copies_the_selected_adapter() {
        let b = basis_from(vec![vec![1.0, 2.0], vec![3.0, -4.0]], vec![10.0, 90.0]);
        let fused = fuse_adapters(&b, &[0.0, 1.0]).unwrap();
        assert_eq!(fused.data(), &[3.0, -4.0]);
        assert_eq!(fused.shape_meta(), b.shape_meta());
    }

    #[test]
    fn fuse_identical_adapters_is_identity() {
        let b = basis_from(vec![vec![0.5, -0.25], vec![0.5, -0.25]], vec![20.0, 80.0]);
        let fused = fuse_adapters(&b, &[0.3, 0.7]).unwrap();
        assert_eq!(fused.data(), &[0.5, -0.25]);
    }

    #[test]
    fn fuse_two_adapter_midpoint() {
        let b = basis_from(vec![vec![1.0, 0.0], vec![0.0, 2.0]], vec![0.0, 100.0]);
        let fused = fuse_adapters(&b, &[0.5, 0.5]).unwrap();
        assert_eq!(fused.data(), &[0.5, 1.0]);
    }

    #[test]
    fn fuse_rejects_length_mismatch() {
        let b = basis_from(vec![vec![1.0], vec![2.0]], vec![0.0, 100.0]);
        assert!(matches!(
            fuse_adapters(&b, &[1.0]),
            Err(AdapterError::DimensionError { expected: 2, got: 1 })
        ));
    }

    #[test]
    fn fuse_rejects_bad_simplex() {
        let b = basis_from(vec![vec![1.0], vec![2.0]], vec![0.0, 100.0]);
        assert!(matches!(
            fuse_adapters(&b, &[0.6, 0.6]),
            Err(AdapterError::InvalidWeights { .. })
        ));
        assert!(matches!(
            fuse_adapters(&b, &[-0.5, 1.5]),
            Err(AdapterError::InvalidWeights { .. })
        ));
    }

    #[test]
    fn adapter_rejects_shape_and_nan() {
        assert!(matches!(
            Adapter::new(vec![1.0, 2.0], meta(3)),
            Err(AdapterError::ShapeMismatch { .. })
        ));
        assert!(matches!(
            Adapter::new(vec![1.0, f64::NAN, 2.0], meta(3)),
            Err(AdapterError::NonFinite { index: 1 })
        ));
    }

    #[test]
    fn library_rejects_out_of_order_steps() {
        let a = Adapter::new(vec![0.0], meta(1)).unwrap();
        let cps = vec![
            Checkpoint::new(5, a.clone(), 10.0).unwrap(),
            Checkpoint::new(5, a, 20.0).unwrap(),
        ];
        assert!(TrajectoryLibrary::new(("E".into(), "I".into()), "E".into(), meta(1), cps)
            .is_err());
    }

    #[test]
    fn empty_library_round_trips() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("lib.json");
        let lib =
            TrajectoryLibrary::new(("F".into(), "T".into()), "F".into(), meta(2), vec![])
                .unwrap();
        save_library(&lib, &path).unwrap();
        let back = load_library(&path).unwrap();
        assert_eq!(back, lib);
        assert!(back.is_empty());
    }

    #[test]
    fn load_rejects_version_mismatch() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("lib.json");
        let text = r#"{"format_version":99,"trait_pair":["E","I"],"target_pole":"E","shape_meta":[],"checkpoints":[]}"#;
        std::fs::write(&path, text).unwrap();
        assert!(matches!(
            load_library(&path),
            Err(AdapterError::VersionError { found: 99, .. })
        ));
    }

    #[test]
    fn load_rejects_step_disorder_with_context() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("lib.json");
        let text = r#"{"format_version":1,"trait_pair":["E","I"],"target_pole":"E",
            "shape_meta":[{"name":"d","dims":[1]}],
            "checkpoints":[{"step":3,"trait_percentage":10.0,"data":[0.0]},
                           {"step":2,"trait_percentage":20.0,"data":[0.1]}]}"#;
        std::fs::write(&path, text).unwrap();
        match load_library(&path) {
            Err(AdapterError::FormatError { detail, .. }) => {
                assert!(detail.contains("step"), "unexpected detail: {detail}")
            }
            other => panic!("expected FormatError, got {other:?}"),
        }
    }

    #[test]
    fn load_reports_malformed_json_position() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("lib.json");
        std::fs::write(&path, "{not json").unwrap();
        match load_library(&path) {
            Err(AdapterError::FormatError { detail, .. }) => {
                assert!(detail.contains("line 1"), "unexpected detail: {detail}")
            }
            other => panic!("expected FormatError, got {other:?}"),
        }
    }

    proptest! {
        /// Fusion is linear: fuse(a*w1 + b*w2) = a*fuse(w1) + b*fuse(w2)
        /// elementwise for a convex pair (a, b).
        #[test]
        fn fusion_is_linear(
            raw1 in proptest::collection::vec(0.01f64..1.0, 3),
            raw2 in proptest::collection::vec(0.01f64..1.0, 3),
            a in 0.0f64..=1.0,
            vals in proptest::collection::vec(-10.0f64..10.0, 9),
        ) {
            let b = a.mul_add(-1.0, 1.0); // 1 - a
            let norm = |v: &[f64]| {
                let s: f64 = v.iter().sum();
                v.iter().map(|x| x / s).collect::<Vec<_>>()
            };
            let w1 = norm(&raw1);
            let w2 = norm(&raw2);
            let mixed: Vec<f64> =
                w1.iter().zip(&w2).map(|(x, y)| a * x + b * y).collect();
            let basis = basis_from(
                vals.chunks(3).map(|c| c.to_vec()).collect(),
                vec![10.0, 50.0, 90.0],
            );
            let lhs = fuse_adapters(&basis, &mixed).unwrap();
            let f1 = fuse_adapters(&basis, &w1).unwrap();
            let f2 = fuse_adapters(&basis, &w2).unwrap();
            for j in 0..3 {
                let rhs = a * f1.data()[j] + b * f2.data()[j];
                prop_assert!((lhs.data()[j] - rhs).abs() < 1e-9);
            }
        }

        /// Fused values stay inside the componentwise convex hull.
        #[test]
        fn fusion_stays_in_convex_hull(
            raw in proptest::collection::vec(0.0f64..1.0, 4),
            vals in proptest::collection::vec(-5.0f64..5.0, 8),
        ) {
            let s: f64 = raw.iter().sum::<f64>() + 1e-3;
            let w: Vec<f64> = raw.iter().map(|x| (x + 1e-3 / 4.0) / s).collect();
            let basis = basis_from(
                vals.chunks(2).map(|c| c.to_vec()).collect(),
                vec![10.0, 30.0, 60.0, 90.0],
            );
            let fused = fuse_adapters(&basis, &w).unwrap();
            for j in 0..2 {
                let lo = basis.entries().iter().map(|e| e.adapter.data()[j]).fold(f64::INFINITY, f64::min);
                let hi = basis.entries().iter().map(|e| e.adapter.data()[j]).fold(f64::NEG_INFINITY, f64::max);
                prop_assert!(fused.data()[j] >= lo - 1e-12 && fused.data()[j] <= hi + 1e-12);
            }
        }

        /// Serialization round-trip preserves every float bit-exactly.
        #[test]
        fn library_round_trip_is_exact(
            data in proptest::collection::vec(-1e6f64..1e6, 6),
            percents in proptest::collection::vec(0.0f64..=100.0, 3),
        ) {
            let dir = tempfile::tempdir().unwrap();
            let path = dir.path().join("lib.json");
            let cps: Vec<Checkpoint> = data
                .chunks(2)
                .zip(&percents)
                .enumerate()
                .map(|(i, (d, &p))| {
                    Checkpoint::new(i as u64, Adapter::new(d.to_vec(), meta(2)).unwrap(), p)
                        .unwrap()
                })
                .collect();
            let lib = TrajectoryLibrary::new(
                ("P".into(), "J".into()),
                "J".into(),
                meta(2),
                cps,
            )
            .unwrap();
            save_library(&lib, &path).unwrap();
            let back = load_library(&path).unwrap();
            prop_assert_eq!(&back, &lib);
            for (a, b) in back
                .checkpoints()
                .iter()
                .flat_map(|c| c.adapter.data())
                .zip(lib.checkpoints().iter().flat_map(|c| c.adapter.data()))
            {
                prop_assert_eq!(a.to_bits(), b.to_bits());
            }
        }
    }
}
