//! State representations: per-spin bias vectors and full diagonal states.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::MAX_SPINS;

/// Per-spin polarization biases in normalized units (the reference spin's
/// equilibrium bias is 1). Ordered like the spins of the owning system.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(transparent))]
pub struct BiasVector {
    values: Vec<f64>,
}

impl BiasVector {
    pub fn new(values: Vec<f64>) -> Self {
        Self { values }
    }

    pub fn from_absolute(absolute: &[f64], reference_bias: f64) -> Self {
        Self::new(absolute.iter().map(|b| b / reference_bias).collect())
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, i: usize) -> Option<f64> {
        self.values.get(i).copied()
    }

    pub fn to_absolute(&self, reference_bias: f64) -> Vec<f64> {
        self.values.iter().map(|b| b * reference_bias).collect()
    }

    /// Checks that every absolute bias lies in `[-1, 1]`.
    pub fn validate(&self, reference_bias: f64) -> Result<()> {
        for &b in &self.values {
            let abs = b * reference_bias;
            if !(-1.0..=1.0).contains(&abs) {
                return Err(Error::BiasOutOfRange(abs));
            }
        }
        Ok(())
    }

    /// Tensor-product state with these biases.
    pub fn product_state(&self, reference_bias: f64) -> Result<DiagonalState> {
        DiagonalState::product(&self.to_absolute(reference_bias))
    }
}

impl From<Vec<f64>> for BiasVector {
    fn from(values: Vec<f64>) -> Self {
        Self::new(values)
    }
}

/// Bit mask selecting spin `i` of `n` in a basis-state index.
///
/// The first spin is the most significant bit; a 0 bit is spin-up, which has
/// probability `(1+ε)/2` at bias `ε`.
#[inline]
pub(crate) fn spin_mask(n: usize, i: usize) -> usize {
    1 << (n - 1 - i)
}

pub(crate) fn check_capacity(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidState("a state needs at least one spin".into()));
    }
    if n > MAX_SPINS {
        return Err(Error::Capacity { n, max: MAX_SPINS });
    }
    Ok(())
}

/// Exact probability distribution over the `2^n` classical basis states.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalState {
    n: usize,
    probs: Vec<f64>,
}

impl DiagonalState {
    /// Normalization tolerance on the total probability.
    pub const NORM_TOL: f64 = 1e-12;

    pub fn new(probs: Vec<f64>) -> Result<Self> {
        let len = probs.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::InvalidState(format!(
                "length {len} is not a power of two >= 2"
            )));
        }
        let n = len.trailing_zeros() as usize;
        check_capacity(n)?;
        if let Some(p) = probs.iter().find(|p| !(p.is_finite() && **p >= 0.0)) {
            return Err(Error::InvalidState(format!("invalid probability {p}")));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > Self::NORM_TOL {
            return Err(Error::InvalidState(format!(
                "probabilities sum to {total}"
            )));
        }
        Ok(Self { n, probs })
    }

    pub(crate) fn from_parts(n: usize, probs: Vec<f64>) -> Self {
        debug_assert_eq!(probs.len(), 1 << n);
        Self { n, probs }
    }

    pub fn uniform(n: usize) -> Result<Self> {
        check_capacity(n)?;
        let len = 1usize << n;
        Ok(Self::from_parts(n, vec![1.0 / len as f64; len]))
    }

    /// Deterministic state concentrated on one basis index.
    pub fn basis(n: usize, index: usize) -> Result<Self> {
        check_capacity(n)?;
        let len = 1usize << n;
        if index >= len {
            return Err(Error::InvalidState(format!(
                "basis index {index} out of range for {n} spins"
            )));
        }
        let mut probs = vec![0.0; len];
        probs[index] = 1.0;
        Ok(Self::from_parts(n, probs))
    }

    /// Tensor product of single-spin states with the given absolute biases.
    pub fn product(absolute_biases: &[f64]) -> Result<Self> {
        let n = absolute_biases.len();
        check_capacity(n)?;
        for &b in absolute_biases {
            if !(-1.0..=1.0).contains(&b) {
                return Err(Error::BiasOutOfRange(b));
            }
        }
        let mut probs = vec![1.0];
        for &b in absolute_biases {
            let up = (1.0 + b) / 2.0;
            let down = (1.0 - b) / 2.0;
            probs = probs.iter().flat_map(|&p| [p * up, p * down]).collect();
        }
        Ok(Self::from_parts(n, probs))
    }

    pub fn n_spins(&self) -> usize {
        self.n
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn into_probs(self) -> Vec<f64> {
        self.probs
    }

    pub(crate) fn probs_mut(&mut self) -> &mut [f64] {
        &mut self.probs
    }

    pub(crate) fn check_index(&self, i: usize) -> Result<()> {
        if i >= self.n {
            Err(Error::IndexOutOfRange { index: i, n: self.n })
        } else {
            Ok(())
        }
    }

    /// Absolute bias `P(↑) − P(↓)` of spin `i` with all other spins traced out.
    pub fn marginal_bias(&self, i: usize) -> Result<f64> {
        self.check_index(i)?;
        let mask = spin_mask(self.n, i);
        let mut up = 0.0;
        let mut down = 0.0;
        for (s, &p) in self.probs.iter().enumerate() {
            if s & mask == 0 {
                up += p;
            } else {
                down += p;
            }
        }
        Ok(up - down)
    }

    /// Absolute marginal biases of all spins.
    pub fn marginals(&self) -> Vec<f64> {
        (0..self.n)
            .map(|i| self.marginal_bias(i).expect("index in range"))
            .collect()
    }

    /// Marginal biases in normalized units.
    pub fn marginal_biases(&self, reference_bias: f64) -> BiasVector {
        BiasVector::from_absolute(&self.marginals(), reference_bias)
    }

    /// Total probability (1 up to rounding).
    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }
}
