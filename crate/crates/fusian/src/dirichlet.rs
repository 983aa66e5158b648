//! Dirichlet distribution math: sampling via normalized Gamma variates,
//! log-density, closed-form entropy, and the gradients of both with respect
//! to the concentration parameters.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use thiserror::Error;

use crate::special::{digamma, ln_gamma, trigamma, SpecialError};

/// Retries allowed when a sampled weight lands exactly on the simplex
/// boundary before giving up with a numerical error.
const MAX_SAMPLE_RETRIES: usize = 100;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DirichletError {
    #[error("concentration parameters must be positive and finite, got {value} at index {index}")]
    InvalidConcentration { index: usize, value: f64 },
    #[error("weight vector touches the simplex boundary at index {index} (value {value})")]
    BoundaryError { index: usize, value: f64 },
    #[error("dimension mismatch: alpha has {alpha_len} entries, weights have {weights_len}")]
    DimensionMismatch { alpha_len: usize, weights_len: usize },
    #[error("numerical failure: {0}")]
    NumericalError(String),
    #[error(transparent)]
    Special(#[from] SpecialError),
}

/// A draw from the Dirichlet together with its log-density and the
/// distribution's entropy at the concentrations that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightSample {
    pub w: Vec<f64>,
    pub log_prob: f64,
    pub entropy: f64,
}

fn check_alpha(alpha: &[f64]) -> Result<(), DirichletError> {
    if alpha.is_empty() {
        return Err(DirichletError::NumericalError("empty concentration vector".into()));
    }
    for (index, &value) in alpha.iter().enumerate() {
        if !(value > 0.0) || !value.is_finite() {
            return Err(DirichletError::InvalidConcentration { index, value });
        }
    }
    Ok(())
}

fn check_interior(alpha: &[f64], w: &[f64]) -> Result<(), DirichletError> {
    if alpha.len() != w.len() {
        return Err(DirichletError::DimensionMismatch {
            alpha_len: alpha.len(),
            weights_len: w.len(),
        });
    }
    for (index, &value) in w.iter().enumerate() {
        if !(value > 0.0 && value < 1.0) {
            return Err(DirichletError::BoundaryError { index, value });
        }
    }
    Ok(())
}

/// Gamma(shape, 1) variate via Marsaglia-Tsang squeeze for shape >= 1, with
/// the `U^(1/shape)` boost for shape < 1.
pub fn sample_gamma<R: Rng + ?Sized>(shape: f64, rng: &mut R) -> f64 {
    if shape < 1.0 {
        let boost = sample_gamma(shape + 1.0, rng);
        let u: f64 = loop {
            let u = rng.random::<f64>();
            if u > 0.0 {
                break u;
            }
        };
        return boost * u.powf(1.0 / shape);
    }
    let d = shape - 1.0 / 3.0;
    let c = 1.0 / (3.0 * d.sqrt());
    loop {
        let x: f64 = StandardNormal.sample(rng);
        let t = 1.0 + c * x;
        if t <= 0.0 {
            continue;
        }
        let v = t * t * t;
        let u = rng.random::<f64>();
        let x2 = x * x;
        if u < 1.0 - 0.0331 * x2 * x2 {
            return d * v;
        }
        if u > 0.0 && u.ln() < 0.5 * x2 + d * (1.0 - v + v.ln()) {
            return d * v;
        }
    }
}

/// Draw mixing weights from `Dirichlet(alpha)` by normalizing independent
/// Gamma variates. Draws that land exactly on the simplex boundary are
/// retried a bounded number of times.
pub fn dirichlet_sample<R: Rng + ?Sized>(
    alpha: &[f64],
    rng: &mut R,
) -> Result<WeightSample, DirichletError> {
    check_alpha(alpha)?;
    if alpha.len() < 2 {
        return Err(DirichletError::NumericalError(
            "a Dirichlet draw needs at least 2 components".into(),
        ));
    }
    for _ in 0..MAX_SAMPLE_RETRIES {
        let gammas: Vec<f64> = alpha.iter().map(|&a| sample_gamma(a, rng)).collect();
        let sum: f64 = gammas.iter().sum();
        if !sum.is_finite() || sum <= 0.0 {
            continue;
        }
        let w: Vec<f64> = gammas.iter().map(|g| g / sum).collect();
        if w.iter().all(|&wi| wi > 0.0 && wi < 1.0) {
            let log_prob = dirichlet_log_prob(alpha, &w)?;
            let entropy = dirichlet_entropy(alpha)?;
            return Ok(WeightSample { w, log_prob, entropy });
        }
    }
    Err(DirichletError::NumericalError(format!(
        "no interior sample after {MAX_SAMPLE_RETRIES} retries (alpha = {alpha:?})"
    )))
}

/// Log-density of the Dirichlet at an interior simplex point:
/// `ln Gamma(a0) - sum ln Gamma(a_i) + sum (a_i - 1) ln w_i`.
pub fn dirichlet_log_prob(alpha: &[f64], w: &[f64]) -> Result<f64, DirichletError> {
    check_alpha(alpha)?;
    check_interior(alpha, w)?;
    let a0: f64 = alpha.iter().sum();
    let mut out = ln_gamma(a0)?;
    for (&a, &wi) in alpha.iter().zip(w) {
        out -= ln_gamma(a)?;
        out += (a - 1.0) * wi.ln();
    }
    Ok(out)
}

/// Closed-form Dirichlet entropy:
/// `ln B(alpha) + (a0 - K) psi(a0) - sum (a_i - 1) psi(a_i)`.
pub fn dirichlet_entropy(alpha: &[f64]) -> Result<f64, DirichletError> {
    check_alpha(alpha)?;
    let a0: f64 = alpha.iter().sum();
    let k = alpha.len() as f64;
    let mut ln_beta = -ln_gamma(a0)?;
    let mut correction = 0.0;
    for &a in alpha {
        ln_beta += ln_gamma(a)?;
        correction += (a - 1.0) * digamma(a)?;
    }
    Ok(ln_beta + (a0 - k) * digamma(a0)? - correction)
}

/// Gradient of the log-density with respect to each concentration:
/// `d/da_i log Dir(w; alpha) = psi(a0) - psi(a_i) + ln w_i`.
pub fn score_gradient(alpha: &[f64], w: &[f64]) -> Result<Vec<f64>, DirichletError> {
    check_alpha(alpha)?;
    check_interior(alpha, w)?;
    let a0: f64 = alpha.iter().sum();
    let psi_a0 = digamma(a0)?;
    alpha
        .iter()
        .zip(w)
        .map(|(&a, &wi)| Ok(psi_a0 - digamma(a)? + wi.ln()))
        .collect()
}

/// Gradient of the entropy with respect to each concentration:
/// `d/da_i H = (a0 - K) psi'(a0) - (a_i - 1) psi'(a_i)`.
pub fn entropy_gradient(alpha: &[f64]) -> Result<Vec<f64>, DirichletError> {
    check_alpha(alpha)?;
    let a0: f64 = alpha.iter().sum();
    let k = alpha.len() as f64;
    let common = (a0 - k) * trigamma(a0)?;
    alpha
        .iter()
        .map(|&a| Ok(common - (a - 1.0) * trigamma(a)?))
        .collect()
}

/// Mean of `Dirichlet(alpha)`: `alpha / sum(alpha)`. This is the
/// deterministic action used at evaluation time.
pub fn dirichlet_mean(alpha: &[f64]) -> Result<Vec<f64>, DirichletError> {
    check_alpha(alpha)?;
    let a0: f64 = alpha.iter().sum();
    Ok(alpha.iter().map(|&a| a / a0).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    #[test]
    fn log_prob_of_uniform_dirichlet_is_zero() {
        // alpha = (1,1) is uniform on the unit simplex.
        for w in [[0.5, 0.5], [0.1, 0.9], [0.73, 0.27]] {
            assert_abs_diff_eq!(
                dirichlet_log_prob(&[1.0, 1.0], &w).unwrap(),
                0.0,
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn log_prob_hand_value() {
        // Dir(2,2) at (0.5, 0.5): density Gamma(4)/Gamma(2)^2 * 0.25 = 1.5.
        assert_abs_diff_eq!(
            dirichlet_log_prob(&[2.0, 2.0], &[0.5, 0.5]).unwrap(),
            1.5f64.ln(),
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            dirichlet_log_prob(&[2.0, 2.0], &[0.5, 0.5]).unwrap(),
            0.4054651081,
            epsilon = 1e-9
        );
    }

    #[test]
    fn log_prob_rejects_boundary() {
        assert!(matches!(
            dirichlet_log_prob(&[2.0, 2.0], &[0.0, 1.0]),
            Err(DirichletError::BoundaryError { .. })
        ));
    }

    #[test]
    fn entropy_known_values() {
        // Uniform on the unit simplex has entropy 0.
        assert_abs_diff_eq!(dirichlet_entropy(&[1.0, 1.0]).unwrap(), 0.0, epsilon = 1e-12);
        // Dir(2,2): 5/3 - ln 6.
        assert_abs_diff_eq!(
            dirichlet_entropy(&[2.0, 2.0]).unwrap(),
            5.0 / 3.0 - 6.0f64.ln(),
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(dirichlet_entropy(&[2.0, 2.0]).unwrap(), -0.1251, epsilon = 1e-4);
    }

    #[test]
    fn entropy_is_permutation_invariant() {
        let a = dirichlet_entropy(&[0.3, 1.7, 4.0]).unwrap();
        let b = dirichlet_entropy(&[4.0, 0.3, 1.7]).unwrap();
        assert_abs_diff_eq!(a, b, epsilon = 1e-13);
    }

    #[test]
    fn score_gradient_hand_value() {
        // psi(2) - psi(1) + ln 0.5 = 1 - ln 2.
        let g = score_gradient(&[1.0, 1.0], &[0.5, 0.5]).unwrap();
        for gi in g {
            assert_abs_diff_eq!(gi, 1.0 - std::f64::consts::LN_2, epsilon = 1e-12);
        }
    }

    #[test]
    fn score_gradient_matches_finite_differences() {
        let alpha = [0.7, 2.3, 1.1, 5.0];
        let w = [0.1, 0.35, 0.15, 0.4];
        let grad = score_gradient(&alpha, &w).unwrap();
        let h = 1e-6;
        for i in 0..alpha.len() {
            let mut plus = alpha.to_vec();
            let mut minus = alpha.to_vec();
            plus[i] += h;
            minus[i] -= h;
            let fd = (dirichlet_log_prob(&plus, &w).unwrap()
                - dirichlet_log_prob(&minus, &w).unwrap())
                / (2.0 * h);
            let rel = (grad[i] - fd).abs() / fd.abs().max(1e-7);
            assert!(rel < 1e-5, "component {i}: analytic {} vs fd {fd}", grad[i]);
        }
    }

    #[test]
    fn entropy_gradient_matches_finite_differences() {
        let alpha = [0.6, 1.4, 3.2];
        let grad = entropy_gradient(&alpha).unwrap();
        let h = 1e-6;
        for i in 0..alpha.len() {
            let mut plus = alpha.to_vec();
            let mut minus = alpha.to_vec();
            plus[i] += h;
            minus[i] -= h;
            let fd = (dirichlet_entropy(&plus).unwrap() - dirichlet_entropy(&minus).unwrap())
                / (2.0 * h);
            let rel = (grad[i] - fd).abs() / fd.abs().max(1e-7);
            assert!(rel < 1e-5, "component {i}: analytic {} vs fd {fd}", grad[i]);
        }
    }

    #[test]
    fn samples_live_on_the_simplex() {
        let mut rng = ChaCha12Rng::seed_from_u64(42);
        let alpha = [0.3, 1.0, 2.5];
        for _ in 0..500 {
            let s = dirichlet_sample(&alpha, &mut rng).unwrap();
            let sum: f64 = s.w.iter().sum();
            assert!((sum - 1.0).abs() < 1e-9, "sum = {sum}");
            assert!(s.w.iter().all(|&wi| wi > 0.0 && wi < 1.0));
            assert!(s.log_prob.is_finite());
        }
    }

    #[test]
    fn symmetric_sample_mean_is_uniform() {
        let mut rng = ChaCha12Rng::seed_from_u64(7);
        let alpha = [1.5, 1.5, 1.5, 1.5];
        let n = 20_000;
        let mut mean = vec![0.0; 4];
        for _ in 0..n {
            let s = dirichlet_sample(&alpha, &mut rng).unwrap();
            for (m, wi) in mean.iter_mut().zip(&s.w) {
                *m += wi;
            }
        }
        for m in &mut mean {
            *m /= n as f64;
        }
        // Var of one coordinate is (1/4)(3/4)/7 ~ 0.0268; MC sd ~ 0.00116.
        for m in mean {
            assert!((m - 0.25).abs() < 0.005, "mean component {m}");
        }
    }

    #[test]
    fn high_concentration_shrinks_spread() {
        let mut rng = ChaCha12Rng::seed_from_u64(9);
        let alpha = [5000.0, 5000.0];
        let n = 4000;
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        for _ in 0..n {
            let s = dirichlet_sample(&alpha, &mut rng).unwrap();
            sum += s.w[0];
            sum_sq += s.w[0] * s.w[0];
        }
        let mean = sum / n as f64;
        let sd = (sum_sq / n as f64 - mean * mean).sqrt();
        // Dirichlet variance = 0.25 / 10001 -> sd ~ 0.005.
        assert!((mean - 0.5).abs() < 0.001, "mean {mean}");
        assert!((sd - 0.005).abs() < 0.001, "sd {sd}");
    }

    #[test]
    fn small_alpha_pushes_mass_to_corners() {
        let mut rng = ChaCha12Rng::seed_from_u64(11);
        let n = 4000;
        let corner_rate = |alpha: &[f64], rng: &mut ChaCha12Rng| {
            let mut hits = 0;
            for _ in 0..n {
                let s = dirichlet_sample(alpha, rng).unwrap();
                if s.w.iter().cloned().fold(f64::MIN, f64::max) > 0.9 {
                    hits += 1;
                }
            }
            hits as f64 / n as f64
        };
        let sparse = corner_rate(&[0.3, 0.3, 0.3], &mut rng);
        let flat = corner_rate(&[1.0, 1.0, 1.0], &mut rng);
        assert!(
            sparse > flat,
            "alpha < 1 should concentrate near corners (sparse {sparse} vs flat {flat})"
        );
    }

    #[test]
    fn gamma_sampler_matches_moments() {
        let mut rng = ChaCha12Rng::seed_from_u64(5);
        for &shape in &[0.4, 1.0, 2.5, 9.0] {
            let n = 30_000;
            let mut sum = 0.0;
            let mut sum_sq = 0.0;
            for _ in 0..n {
                let g = sample_gamma(shape, &mut rng);
                sum += g;
                sum_sq += g * g;
            }
            let mean = sum / n as f64;
            let var = sum_sq / n as f64 - mean * mean;
            // Gamma(k, 1): mean k, variance k.
            assert!((mean - shape).abs() < 0.1 * shape.max(0.5), "shape {shape} mean {mean}");
            assert!((var - shape).abs() < 0.2 * shape.max(0.5), "shape {shape} var {var}");
        }
    }

    #[test]
    fn rejects_invalid_alpha() {
        assert!(matches!(
            dirichlet_entropy(&[1.0, 0.0]),
            Err(DirichletError::InvalidConcentration { index: 1, .. })
        ));
        let mut rng = ChaCha12Rng::seed_from_u64(1);
        assert!(dirichlet_sample(&[-1.0, 2.0], &mut rng).is_err());
    }
}
