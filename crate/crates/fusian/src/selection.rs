//! Stable basis selection: variance-filter the raw trajectory, then pick
//! checkpoints whose intensities uniformly cover the observed range.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::adapter::{AdapterError, BasisEntry, BasisSet, Checkpoint, TrajectoryLibrary};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SelectionError {
    #[error("trajectory has {len} checkpoints, fewer than the window size {window}")]
    InsufficientTrajectory { len: usize, window: usize },
    #[error("only {stable} stable checkpoints available, need {needed}")]
    InsufficientStable { stable: usize, needed: usize },
    #[error("invalid selection config: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Adapter(#[from] AdapterError),
}

/// Window size, variance threshold, and basis size for selection.
///
/// Defaults: `W = 3`, threshold `10.0`, `N = 10`. Ties between equally close
/// checkpoints go to the lower step.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SelectionConfig {
    pub window_size: usize,
    /// Maximum allowed population variance of trait percentages (percentage
    /// points squared) within a window.
    pub variance_threshold: f64,
    pub n_basis: usize,
}

impl Default for SelectionConfig {
    fn default() -> Self {
        Self { window_size: 3, variance_threshold: 10.0, n_basis: 10 }
    }
}

impl SelectionConfig {
    pub fn validate(&self) -> Result<(), SelectionError> {
        if self.window_size < 2 {
            return Err(SelectionError::InvalidConfig(format!(
                "window_size must be >= 2, got {}",
                self.window_size
            )));
        }
        if self.n_basis < 2 {
            return Err(SelectionError::InvalidConfig(format!(
                "n_basis must be >= 2, got {}",
                self.n_basis
            )));
        }
        if !(self.variance_threshold > 0.0) {
            return Err(SelectionError::InvalidConfig(format!(
                "variance_threshold must be positive, got {}",
                self.variance_threshold
            )));
        }
        Ok(())
    }
}

/// Per-checkpoint record of what the selection pass decided.
#[derive(Debug, Clone, PartialEq)]
pub struct SelectionRecord {
    pub step: u64,
    pub trait_percentage: f64,
    pub window_variance: f64,
    pub kept: bool,
    pub selected: bool,
}

/// Population variance (divide by the window length). A constant window is
/// exactly 0 regardless of length.
fn population_variance(values: &[f64]) -> f64 {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n
}

/// Index range of the window of (up to) `w` checkpoints centered on `i`,
/// truncated at the trajectory edges. For even `w` the extra slot goes after
/// the center.
fn window_bounds(i: usize, len: usize, w: usize) -> (usize, usize) {
    let before = (w - 1) / 2;
    let after = w / 2;
    let lo = i.saturating_sub(before);
    let hi = (i + after).min(len - 1);
    (lo, hi)
}

/// Variance of the trait percentage over each checkpoint's centered window.
pub fn window_variances(
    lib: &TrajectoryLibrary,
    cfg: &SelectionConfig,
) -> Result<Vec<f64>, SelectionError> {
    cfg.validate()?;
    let cps = lib.checkpoints();
    if cps.len() < cfg.window_size {
        return Err(SelectionError::InsufficientTrajectory {
            len: cps.len(),
            window: cfg.window_size,
        });
    }
    let values: Vec<f64> = cps.iter().map(|c| c.trait_percentage).collect();
    Ok((0..values.len())
        .map(|i| {
            let (lo, hi) = window_bounds(i, values.len(), cfg.window_size);
            population_variance(&values[lo..=hi])
        })
        .collect())
}

/// Keep the checkpoints whose window variance is at or below the threshold,
/// in step order.
pub fn variance_filter(
    lib: &TrajectoryLibrary,
    cfg: &SelectionConfig,
) -> Result<Vec<Checkpoint>, SelectionError> {
    let variances = window_variances(lib, cfg)?;
    Ok(lib
        .checkpoints()
        .iter()
        .zip(&variances)
        .filter(|(_, &v)| v <= cfg.variance_threshold)
        .map(|(c, _)| c.clone())
        .collect())
}

/// Select `n_basis` distinct stable checkpoints whose intensities track
/// targets evenly spaced over `[min P, max P]`.
///
/// Each target takes the unused checkpoint with the closest trait percentage,
/// ties broken by the lower step. Selection is without replacement so a
/// plateau cannot absorb the whole basis. The result is sorted ascending by
/// intensity.
pub fn uniform_value_sample(
    stable: &[Checkpoint],
    trait_pair: (String, String),
    target_pole: String,
    cfg: &SelectionConfig,
) -> Result<BasisSet, SelectionError> {
    cfg.validate()?;
    if stable.len() < 2 || stable.len() < cfg.n_basis {
        return Err(SelectionError::InsufficientStable {
            stable: stable.len(),
            needed: cfg.n_basis.max(2),
        });
    }
    let min_p = stable.iter().map(|c| c.trait_percentage).fold(f64::INFINITY, f64::min);
    let max_p = stable.iter().map(|c| c.trait_percentage).fold(f64::NEG_INFINITY, f64::max);
    let n = cfg.n_basis;

    let mut used = vec![false; stable.len()];
    let mut picks: Vec<usize> = Vec::with_capacity(n);
    for k in 0..n {
        let target = if n == 1 {
            min_p
        } else {
            min_p + (max_p - min_p) * k as f64 / (n - 1) as f64
        };
        let mut best: Option<usize> = None;
        for (i, cp) in stable.iter().enumerate() {
            if used[i] {
                continue;
            }
            let dist = (cp.trait_percentage - target).abs();
            best = match best {
                None => Some(i),
                Some(j) => {
                    let best_dist = (stable[j].trait_percentage - target).abs();
                    if dist < best_dist
                        || (dist == best_dist && cp.step < stable[j].step)
                    {
                        Some(i)
                    } else {
                        Some(j)
                    }
                }
            };
        }
        let chosen = best.expect("n_basis <= stable.len() guarantees a free checkpoint");
        used[chosen] = true;
        picks.push(chosen);
    }

    let mut entries: Vec<BasisEntry> = picks
        .into_iter()
        .map(|i| BasisEntry {
            adapter: stable[i].adapter.clone(),
            intensity: stable[i].trait_percentage,
            source_step: stable[i].step,
        })
        .collect();
    entries.sort_by(|a, b| {
        a.intensity
            .partial_cmp(&b.intensity)
            .unwrap()
            .then(a.source_step.cmp(&b.source_step))
    });
    Ok(BasisSet::new(trait_pair, target_pole, entries)?)
}

/// Run the full selection pass and return the basis plus a per-checkpoint
/// report (window variance, kept, selected).
pub fn select_basis(
    lib: &TrajectoryLibrary,
    cfg: &SelectionConfig,
) -> Result<(BasisSet, Vec<SelectionRecord>), SelectionError> {
    let variances = window_variances(lib, cfg)?;
    let stable: Vec<Checkpoint> = lib
        .checkpoints()
        .iter()
        .zip(&variances)
        .filter(|(_, &v)| v <= cfg.variance_threshold)
        .map(|(c, _)| c.clone())
        .collect();
    let basis = uniform_value_sample(
        &stable,
        (lib.trait_pair().0.to_string(), lib.trait_pair().1.to_string()),
        lib.target_pole().to_string(),
        cfg,
    )?;
    let selected_steps: Vec<u64> = basis.entries().iter().map(|e| e.source_step).collect();
    let report = lib
        .checkpoints()
        .iter()
        .zip(&variances)
        .map(|(c, &v)| SelectionRecord {
            step: c.step,
            trait_percentage: c.trait_percentage,
            window_variance: v,
            kept: v <= cfg.variance_threshold,
            selected: selected_steps.contains(&c.step),
        })
        .collect();
    Ok((basis, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adapter::{Adapter, TensorMeta};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn meta() -> Vec<TensorMeta> {
        vec![TensorMeta { name: "d".into(), dims: vec![1] }]
    }

    fn library(percentages: &[f64]) -> TrajectoryLibrary {
        let cps: Vec<Checkpoint> = percentages
            .iter()
            .enumerate()
            .map(|(i, &p)| {
                Checkpoint::new(i as u64, Adapter::new(vec![i as f64], meta()).unwrap(), p)
                    .unwrap()
            })
            .collect();
        TrajectoryLibrary::new(("E".into(), "I".into()), "E".into(), meta(), cps).unwrap()
    }

    #[test]
    fn window_variance_matches_hand_computation() {
        // Middle checkpoint of [50.0, 50.5, 51.0]: population variance 1/6.
        let lib = library(&[50.0, 50.5, 51.0]);
        let vars = window_variances(&lib, &SelectionConfig::default()).unwrap();
        assert_abs_diff_eq!(vars[1], 1.0 / 6.0, epsilon = 1e-12);
        assert!(vars[1] <= 10.0);
    }

    #[test]
    fn unstable_window_is_discarded() {
        // Hand variance of [61.22, 55.0, 51.06] is about 17.49 > 10.
        let lib = library(&[61.22, 55.0, 51.06]);
        let vars = window_variances(&lib, &SelectionConfig::default()).unwrap();
        assert_abs_diff_eq!(vars[1], 17.493066666666667, epsilon = 1e-9);
        let kept = variance_filter(&lib, &SelectionConfig::default()).unwrap();
        assert!(!kept.iter().any(|c| c.step == 1));
    }

    #[test]
    fn constant_window_has_zero_variance() {
        let lib = library(&[42.0, 42.0, 42.0, 42.0]);
        let vars = window_variances(&lib, &SelectionConfig::default()).unwrap();
        assert!(vars.iter().all(|&v| v == 0.0));
        let kept = variance_filter(&lib, &SelectionConfig::default()).unwrap();
        assert_eq!(kept.len(), 4);
    }

    #[test]
    fn too_short_trajectory_is_rejected() {
        let lib = library(&[10.0, 20.0]);
        assert!(matches!(
            variance_filter(&lib, &SelectionConfig::default()),
            Err(SelectionError::InsufficientTrajectory { len: 2, window: 3 })
        ));
    }

    #[test]
    fn uniform_sampling_picks_nearest_values() {
        // P values {50,55,60,70,90,100} with N=3 -> targets {50,75,100}
        // -> picks 50, 70, 100.
        let lib = library(&[50.0, 55.0, 60.0, 70.0, 90.0, 100.0]);
        let cfg = SelectionConfig { n_basis: 3, ..Default::default() };
        let stable = variance_filter(&lib, &SelectionConfig {
            variance_threshold: 1e9,
            ..cfg.clone()
        })
        .unwrap();
        let basis =
            uniform_value_sample(&stable, ("E".into(), "I".into()), "E".into(), &cfg).unwrap();
        assert_eq!(basis.intensities(), vec![50.0, 70.0, 100.0]);
    }

    #[test]
    fn n2_selects_the_endpoints() {
        let lib = library(&[12.0, 48.0, 33.0, 97.0, 60.0]);
        let cfg = SelectionConfig { n_basis: 2, variance_threshold: 1e9, ..Default::default() };
        let stable = variance_filter(&lib, &cfg).unwrap();
        let basis =
            uniform_value_sample(&stable, ("E".into(), "I".into()), "E".into(), &cfg).unwrap();
        assert_eq!(basis.intensities(), vec![12.0, 97.0]);
    }

    #[test]
    fn equidistant_tie_goes_to_lower_step() {
        // P = {30, 50, 70, 90}, N=3 -> targets {30, 60, 90}. Target 60 sees
        // 50 (step 1) and 70 (step 2) at distance 10 each; step 1 wins.
        let lib = library(&[30.0, 50.0, 70.0, 90.0]);
        let cfg = SelectionConfig { n_basis: 3, variance_threshold: 1e9, ..Default::default() };
        let stable = variance_filter(&lib, &cfg).unwrap();
        let basis =
            uniform_value_sample(&stable, ("E".into(), "I".into()), "E".into(), &cfg).unwrap();
        assert_eq!(basis.intensities(), vec![30.0, 50.0, 90.0]);
        assert_eq!(
            basis.entries().iter().map(|e| e.source_step).collect::<Vec<_>>(),
            vec![0, 1, 3]
        );
    }

    #[test]
    fn selection_without_replacement_exhausts() {
        let lib = library(&[50.0, 51.0, 52.0]);
        let cfg = SelectionConfig { n_basis: 4, variance_threshold: 1e9, ..Default::default() };
        let stable = variance_filter(&lib, &cfg).unwrap();
        assert!(matches!(
            uniform_value_sample(&stable, ("E".into(), "I".into()), "E".into(), &cfg),
            Err(SelectionError::InsufficientStable { stable: 3, needed: 4 })
        ));
    }

    proptest! {
        /// Raising the threshold never removes a previously kept checkpoint.
        #[test]
        fn filter_is_monotone_in_threshold(
            ps in proptest::collection::vec(0.0f64..=100.0, 5..40),
            t1 in 0.1f64..50.0,
            extra in 0.1f64..50.0,
        ) {
            let lib = library(&ps);
            let lo = SelectionConfig { variance_threshold: t1, ..Default::default() };
            let hi = SelectionConfig { variance_threshold: t1 + extra, ..Default::default() };
            let kept_lo = variance_filter(&lib, &lo).unwrap();
            let kept_hi = variance_filter(&lib, &hi).unwrap();
            let hi_steps: Vec<u64> = kept_hi.iter().map(|c| c.step).collect();
            for c in &kept_lo {
                prop_assert!(hi_steps.contains(&c.step));
            }
        }

        /// Selected intensities stay within the stable range and are sorted.
        #[test]
        fn selection_is_sorted_and_bounded(
            ps in proptest::collection::vec(0.0f64..=100.0, 10..50),
            n in 2usize..8,
        ) {
            let lib = library(&ps);
            let cfg = SelectionConfig { n_basis: n, variance_threshold: 1e9, ..Default::default() };
            let stable = variance_filter(&lib, &cfg).unwrap();
            let basis = uniform_value_sample(
                &stable, ("E".into(), "I".into()), "E".into(), &cfg).unwrap();
            let ints = basis.intensities();
            let min = ps.iter().cloned().fold(f64::INFINITY, f64::min);
            let max = ps.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            for w in ints.windows(2) {
                prop_assert!(w[0] <= w[1]);
            }
            prop_assert!(ints[0] >= min - 1e-12);
            prop_assert!(ints[ints.len() - 1] <= max + 1e-12);
        }
    }
}
