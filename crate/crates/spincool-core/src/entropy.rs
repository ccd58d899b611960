//! Shannon entropy and information content.
//!
//! All entropies are in bits. The information content `I = n − H` is the
//! entropy deficit of an `n`-spin distribution relative to the maximally mixed
//! one. For small biases `I ≈ Σ εᵢ² / ln 4`, so sums of squared normalized
//! biases are reported in units of `ε₀²/ln 4` ("leading-order" units).

use core::f64::consts::LN_2;

use crate::error::{Error, Result};
use crate::state::{BiasVector, DiagonalState};

/// `(1+δ)·ln(1+δ) − δ`, accurate for small `|δ|` where the direct form cancels.
pub(crate) fn excess_xlogx(delta: f64) -> f64 {
    if delta.abs() < 1e-2 {
        // sum_{k>=2} (-1)^k δ^k / (k(k-1))
        let mut term = delta * delta;
        let mut acc = 0.0;
        for k in 2..16u32 {
            let kf = f64::from(k);
            acc += term / (kf * (kf - 1.0));
            term *= -delta;
        }
        acc
    } else if delta <= -1.0 {
        1.0
    } else {
        (1.0 + delta) * libm::log1p(delta) - delta
    }
}

/// Entropy in bits of a single spin with absolute bias `eps`.
///
/// `H(ε) = −((1+ε)/2)·log₂((1+ε)/2) − ((1−ε)/2)·log₂((1−ε)/2)`, evaluated in a
/// cancellation-free form so that `1 − H(ε)` stays accurate down to `ε ~ 1e−8`.
pub fn binary_entropy(eps: f64) -> Result<f64> {
    if !(-1.0..=1.0).contains(&eps) {
        return Err(Error::BiasOutOfRange(eps));
    }
    Ok(1.0 - binary_information(eps))
}

/// `1 − H(ε)` in bits.
pub fn binary_information(eps: f64) -> f64 {
    (excess_xlogx(eps) + excess_xlogx(-eps)) / (2.0 * LN_2)
}

/// Leading-order information content: the sum of squared normalized biases.
pub fn ic_leading(biases: &BiasVector) -> f64 {
    biases.values().iter().map(|b| b * b).sum()
}

/// Exact information content `n − H(p)` in bits.
///
/// Computed as the Kullback–Leibler divergence from the uniform distribution,
/// `Σ p·log₂(2ⁿp)`, which avoids subtracting two nearly equal numbers when
/// the state is close to maximally mixed. With `2ⁿp = 1 + δ` and `Σδ = 0` this
/// is `Σ ((1+δ)ln(1+δ) − δ) / (2ⁿ ln 2)`; `δ` is taken against the actual total
/// so rounding in the normalization does not leak into the sum.
pub fn ic_exact(state: &DiagonalState) -> f64 {
    let n = state.n_spins();
    let scale = (1u64 << n) as f64 / state.total();
    let excess: f64 = state.probs().iter().map(|&p| excess_xlogx(p * scale - 1.0)).sum();
    let bits = excess / ((1u64 << n) as f64 * LN_2);
    bits.clamp(0.0, n as f64)
}

/// Converts an information content in bits to leading-order units `ε₀²/ln 4`.
pub fn bits_to_leading(bits: f64, reference_bias: f64) -> f64 {
    bits * 2.0 * LN_2 / (reference_bias * reference_bias)
}

/// Converts leading-order units `ε₀²/ln 4` to bits.
pub fn leading_to_bits(ic: f64, reference_bias: f64) -> f64 {
    ic * reference_bias * reference_bias / (2.0 * LN_2)
}

/// Best bias reachable on one spin by entropy-preserving compression of
/// `n` spins of bias `eps`: `√n·ε`.
///
/// `n` may be fractional, which gives the single-spin bound for a system whose
/// information content equals `n` unit-bias spins (e.g. `√18` for a `{1,1,4}`
/// molecule).
pub fn sqrt_n_limit(n: f64, eps: f64) -> Result<f64> {
    if !(n >= 1.0) {
        return Err(Error::InvalidParameter(alloc::format!(
            "spin count must be at least 1, got {n}"
        )));
    }
    Ok(libm::sqrt(n) * eps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn naive_entropy(eps: f64) -> f64 {
        let mut h = 0.0;
        for p in [(1.0 + eps) / 2.0, (1.0 - eps) / 2.0] {
            if p > 0.0 {
                h -= p * libm::log2(p);
            }
        }
        h
    }

    #[test]
    fn binary_entropy_endpoints() {
        assert_eq!(binary_entropy(0.0).unwrap(), 1.0);
        assert_eq!(binary_entropy(1.0).unwrap(), 0.0);
        assert_eq!(binary_entropy(-1.0).unwrap(), 0.0);
        assert!(binary_entropy(1.5).is_err());
        assert!(binary_entropy(f64::NAN).is_err());
    }

    #[test]
    fn binary_entropy_small_bias_series() {
        let eps = 1e-3;
        let series = 1.0 - eps * eps / (4.0f64).ln();
        let h = binary_entropy(eps).unwrap();
        assert!(((h - series) / series).abs() < 1e-12);
    }

    #[test]
    fn binary_entropy_matches_naive_formula() {
        for &eps in &[0.05, 0.2, 0.5, 0.9, 0.999] {
            let h = binary_entropy(eps).unwrap();
            assert!((h - naive_entropy(eps)).abs() < 1e-14, "eps={eps}");
        }
    }

    #[test]
    fn excess_branches_agree_at_switch() {
        let a = excess_xlogx(0.00999999);
        let b = (1.0 + 0.00999999f64) * libm::log1p(0.00999999) - 0.00999999;
        assert!(((a - b) / a).abs() < 1e-9);
        assert_eq!(excess_xlogx(-1.0), 1.0);
    }

    #[test]
    fn ic_leading_tuples() {
        assert_eq!(ic_leading(&BiasVector::new(vec![1.0, 1.0, 4.0])), 18.0);
        assert_eq!(ic_leading(&BiasVector::new(vec![4.0, 4.0, 4.0])), 48.0);
        let real = ic_leading(&BiasVector::new(vec![1.000, 1.000, 3.98]));
        assert!((real - 17.8).abs() <= 0.1);
    }

    #[test]
    fn ic_exact_extremes() {
        let uniform = DiagonalState::new(vec![0.125; 8]).unwrap();
        assert_eq!(ic_exact(&uniform), 0.0);
        let mut p = vec![0.0; 8];
        p[5] = 1.0;
        let pure = DiagonalState::new(p).unwrap();
        assert!((ic_exact(&pure) - 3.0).abs() < 1e-15);
    }

    #[test]
    fn sqrt_n() {
        assert_eq!(sqrt_n_limit(1.0, 0.3).unwrap(), 0.3);
        assert_eq!(sqrt_n_limit(4.0, 1.0).unwrap(), 2.0);
        assert!((sqrt_n_limit(18.0, 1.0).unwrap() - 18f64.sqrt()).abs() < 1e-15);
        assert!(sqrt_n_limit(0.5, 1.0).is_err());
    }
}
