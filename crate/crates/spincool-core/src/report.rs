use alloc::string::String;
use alloc::vec::Vec;

use crate::entropy::{bits_to_leading, binary_information, ic_exact, ic_leading};
use crate::error::Result;
use crate::physics::spin_temperature;
use crate::state::{BiasVector, DiagonalState};
use crate::system::SpinSystem;

/// Relative margin an information content must clear to count as a bypass.
pub const BYPASS_MARGIN: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Uncertainties {
    pub biases: Vec<f64>,
    pub ic_leading: f64,
}

/// Information content of a subset of spins, e.g. the two carbons.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SubsetIc {
    pub spins: Vec<String>,
    pub ic_leading: f64,
}

/// Outcome of one protocol run.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ICReport {
    pub spins: Vec<String>,
    /// Final marginal biases, normalized.
    pub biases: BiasVector,
    /// `Σ bᵢ²` of the final marginals, in `ε₀²/ln 4`.
    pub ic_leading: f64,
    /// `n − H` in bits of the final state (full state when tracked, else the
    /// product of the marginals).
    pub ic_exact_bits: f64,
    /// True when `ic_leading` is only the marginal lower bound `Ĩ` of a
    /// correlated state.
    pub ic_is_lower_bound: bool,
    /// Kelvin; `None` where the bias is not positive.
    pub spin_temperatures: Vec<Option<f64>>,
    pub initial_ic_leading: f64,
    pub initial_ic_exact_bits: f64,
    #[cfg_attr(feature = "serde", serde(default, skip_serializing_if = "Option::is_none"))]
    pub uncertainties: Option<Uncertainties>,
    #[cfg_attr(feature = "serde", serde(default, skip_serializing_if = "Option::is_none"))]
    pub subset: Option<SubsetIc>,
}

fn product_bits(biases: &BiasVector, eps0: f64) -> f64 {
    biases.values().iter().map(|b| binary_information(b * eps0)).sum()
}

impl ICReport {
    fn build(system: &SpinSystem, initial: &BiasVector, biases: BiasVector, exact_bits: f64, lower_bound: bool) -> Self {
        let eps0 = system.reference_bias();
        let spin_temperatures = biases
            .values()
            .iter()
            .zip(system.spins())
            .map(|(&b, s)| spin_temperature(b, s.eq_bias, system.temperature(), eps0).ok())
            .collect();
        ICReport {
            spins: system.names(),
            ic_leading: ic_leading(&biases),
            biases,
            ic_exact_bits: exact_bits,
            ic_is_lower_bound: lower_bound,
            spin_temperatures,
            initial_ic_leading: ic_leading(initial),
            initial_ic_exact_bits: product_bits(initial, eps0),
            uncertainties: None,
            subset: None,
        }
    }

    /// Report for a final state known only through its marginals, taken as a product state.
    pub fn from_biases(system: &SpinSystem, initial: &BiasVector, biases: BiasVector) -> Self {
        let bits = product_bits(&biases, system.reference_bias());
        Self::build(system, initial, biases, bits, false)
    }

    /// Report for a full final state; `ic_leading` is then the marginal lower bound.
    pub fn from_state(system: &SpinSystem, initial: &BiasVector, state: &DiagonalState) -> Self {
        let biases = state.marginal_biases(system.reference_bias());
        Self::build(system, initial, biases, ic_exact(state), true)
    }

    /// Exact information content converted to `ε₀²/ln 4` units.
    pub fn ic_exact_leading(&self, reference_bias: f64) -> f64 {
        bits_to_leading(self.ic_exact_bits, reference_bias)
    }

    /// Leading-order information content of a subset of spins.
    pub fn subset_ic(&self, spins: &[usize]) -> f64 {
        spins
            .iter()
            .filter_map(|&i| self.biases.get(i))
            .map(|b| b * b)
            .sum()
    }

    pub fn with_subset(mut self, system: &SpinSystem, spins: &[usize]) -> Result<Self> {
        let mut names = Vec::with_capacity(spins.len());
        for &i in spins {
            names.push(system.spin(i)?.name.clone());
        }
        self.subset = Some(SubsetIc {
            spins: names,
            ic_leading: self.subset_ic(spins),
        });
        Ok(self)
    }

    pub fn with_uncertainties(mut self, u: Uncertainties) -> Self {
        self.uncertainties = Some(u);
        self
    }

    /// Whether the total entropy dropped below its starting value, i.e. the
    /// closed-system entropy bound was bypassed.
    pub fn bypass(&self) -> bool {
        self.ic_exact_bits > self.initial_ic_exact_bits * (1.0 + BYPASS_MARGIN)
    }
}
