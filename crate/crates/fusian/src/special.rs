//! Gamma-family special functions needed by the Dirichlet machinery.
//!
//! All three functions use the same scheme: shift the argument upward with the
//! exact recurrence until the asymptotic series is accurate, then evaluate the
//! series. Absolute error is below 1e-12 for `digamma` and `ln_gamma` and
//! below 1e-10 for `trigamma` on the ranges this crate uses.

use thiserror::Error;

/// Euler-Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.5772156649015329;

const LN_TWO_PI: f64 = 1.8378770664093453;

/// Argument below which the recurrence shift is applied.
const SHIFT_DIGAMMA: f64 = 6.0;
const SHIFT_TRIGAMMA: f64 = 6.0;
const SHIFT_LN_GAMMA: f64 = 10.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpecialError {
    #[error("domain error: {func} requires x > 0, got {x}")]
    DomainError { func: &'static str, x: f64 },
}

/// Digamma function psi(x) = d/dx ln Gamma(x), for x > 0.
///
/// Shifts with psi(x) = psi(x+1) - 1/x until x >= 6, then evaluates the
/// asymptotic series in 1/x^2 through the x^-14 term.
pub fn digamma(x: f64) -> Result<f64, SpecialError> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(SpecialError::DomainError { func: "digamma", x });
    }
    let mut acc = 0.0;
    let mut z = x;
    while z < SHIFT_DIGAMMA {
        acc -= 1.0 / z;
        z += 1.0;
    }
    // psi(z) ~ ln z - 1/(2z) - sum_{n>=1} B_{2n} / (2n z^{2n})
    let y = 1.0 / (z * z);
    let series = y
        * (1.0 / 12.0
            - y * (1.0 / 120.0
                - y * (1.0 / 252.0
                    - y * (1.0 / 240.0
                        - y * (1.0 / 132.0 - y * (691.0 / 32760.0 - y * (1.0 / 12.0)))))));
    Ok(acc + z.ln() - 0.5 / z - series)
}

/// Trigamma function psi'(x) = d/dx psi(x), for x > 0.
///
/// Shifts with psi'(x) = psi'(x+1) + 1/x^2, then the asymptotic series
/// through the x^-13 term.
pub fn trigamma(x: f64) -> Result<f64, SpecialError> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(SpecialError::DomainError { func: "trigamma", x });
    }
    let mut acc = 0.0;
    let mut z = x;
    while z < SHIFT_TRIGAMMA {
        acc += 1.0 / (z * z);
        z += 1.0;
    }
    // psi'(z) ~ 1/z + 1/(2z^2) + sum_{n>=1} B_{2n} / z^{2n+1}
    let inv = 1.0 / z;
    let y = inv * inv;
    let series = inv
        * y
        * (1.0 / 6.0
            - y * (1.0 / 30.0
                - y * (1.0 / 42.0
                    - y * (1.0 / 30.0 - y * (5.0 / 66.0 - y * (691.0 / 2730.0))))));
    Ok(acc + inv + 0.5 * y + series)
}

/// Natural log of the Gamma function for x > 0.
///
/// Shifts with ln Gamma(x) = ln Gamma(x+1) - ln x until x >= 10, then the
/// Stirling series.
pub fn ln_gamma(x: f64) -> Result<f64, SpecialError> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(SpecialError::DomainError { func: "ln_gamma", x });
    }
    let mut acc = 0.0;
    let mut z = x;
    while z < SHIFT_LN_GAMMA {
        acc -= z.ln();
        z += 1.0;
    }
    let y = 1.0 / (z * z);
    let series = (1.0 / 12.0
        - y * (1.0 / 360.0 - y * (1.0 / 1260.0 - y * (1.0 / 1680.0 - y * (1.0 / 1188.0)))))
        / z;
    Ok(acc + (z - 0.5) * z.ln() - z + 0.5 * LN_TWO_PI + series)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::Rng;
    use rand::SeedableRng;

    #[test]
    fn digamma_known_constants() {
        assert_abs_diff_eq!(digamma(1.0).unwrap(), -EULER_GAMMA, epsilon = 1e-12);
        // psi(1/2) = -gamma - 2 ln 2
        assert_abs_diff_eq!(
            digamma(0.5).unwrap(),
            -EULER_GAMMA - 2.0 * std::f64::consts::LN_2,
            epsilon = 1e-12
        );
        // psi(2) = 1 - gamma
        assert_abs_diff_eq!(digamma(2.0).unwrap(), 1.0 - EULER_GAMMA, epsilon = 1e-12);
        // psi(4) = -gamma + 1 + 1/2 + 1/3
        assert_abs_diff_eq!(
            digamma(4.0).unwrap(),
            -EULER_GAMMA + 11.0 / 6.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn digamma_recurrence_holds() {
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(7);
        for _ in 0..1000 {
            let x: f64 = rng.random_range(0.01..100.0);
            let lhs = digamma(x + 1.0).unwrap() - digamma(x).unwrap();
            assert_abs_diff_eq!(lhs, 1.0 / x, epsilon = 1e-10);
        }
    }

    #[test]
    fn digamma_rejects_nonpositive() {
        assert!(digamma(0.0).is_err());
        assert!(digamma(-1.5).is_err());
        assert!(digamma(f64::NAN).is_err());
    }

    #[test]
    fn trigamma_known_constants() {
        let pi2 = std::f64::consts::PI * std::f64::consts::PI;
        assert_abs_diff_eq!(trigamma(1.0).unwrap(), pi2 / 6.0, epsilon = 1e-10);
        assert_abs_diff_eq!(trigamma(0.5).unwrap(), pi2 / 2.0, epsilon = 1e-10);
        // psi'(2) = pi^2/6 - 1
        assert_abs_diff_eq!(trigamma(2.0).unwrap(), pi2 / 6.0 - 1.0, epsilon = 1e-10);
    }

    #[test]
    fn trigamma_recurrence_holds() {
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(11);
        for _ in 0..1000 {
            let x: f64 = rng.random_range(0.01..100.0);
            let lhs = trigamma(x).unwrap() - trigamma(x + 1.0).unwrap();
            assert_abs_diff_eq!(lhs, 1.0 / (x * x), epsilon = 1e-9);
        }
    }

    #[test]
    fn ln_gamma_known_values() {
        assert_abs_diff_eq!(ln_gamma(1.0).unwrap(), 0.0, epsilon = 1e-13);
        assert_abs_diff_eq!(ln_gamma(2.0).unwrap(), 0.0, epsilon = 1e-13);
        // Gamma(1/2) = sqrt(pi)
        assert_abs_diff_eq!(
            ln_gamma(0.5).unwrap(),
            0.5 * std::f64::consts::PI.ln(),
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(ln_gamma(4.0).unwrap(), 6.0f64.ln(), epsilon = 1e-12);
        assert_abs_diff_eq!(ln_gamma(5.0).unwrap(), 24.0f64.ln(), epsilon = 1e-12);
        assert_abs_diff_eq!(ln_gamma(10.5).unwrap(), 13.940625219403763, epsilon = 1e-12);
    }

    #[test]
    fn ln_gamma_recurrence_holds() {
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(13);
        for _ in 0..500 {
            let x: f64 = rng.random_range(0.05..50.0);
            let lhs = ln_gamma(x + 1.0).unwrap() - ln_gamma(x).unwrap();
            assert_abs_diff_eq!(lhs, x.ln(), epsilon = 1e-10);
        }
    }

    #[test]
    fn digamma_matches_lngamma_derivative() {
        // Central difference of ln_gamma is an independent route to psi.
        let h = 1e-6;
        for &x in &[0.3, 1.0, 2.7, 9.9, 42.0] {
            let fd = (ln_gamma(x + h).unwrap() - ln_gamma(x - h).unwrap()) / (2.0 * h);
            assert_abs_diff_eq!(digamma(x).unwrap(), fd, epsilon = 1e-7);
        }
    }
}
