//! Equilibrium biases from Larmor frequencies and spin temperatures.

use alloc::format;

use crate::error::{Error, Result};

/// Planck constant, J·s (exact SI value).
pub const PLANCK: f64 = 6.626_070_15e-34;
/// Boltzmann constant, J/K (exact SI value).
pub const BOLTZMANN: f64 = 1.380_649e-23;

/// Equilibrium bias of a spin-half at frequency `ν` and temperature `T`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EquilibriumBias {
    /// `tanh(hν / 2k_BT)`.
    pub exact: f64,
    /// High-temperature approximation `hν / 2k_BT`.
    pub linear: f64,
}

impl EquilibriumBias {
    /// `linear − exact`, the error of the high-temperature approximation.
    pub fn approximation_error(&self) -> f64 {
        self.linear - self.exact
    }
}

pub fn bias_from_frequency(nu_hz: f64, temperature: f64) -> Result<EquilibriumBias> {
    if !(nu_hz >= 0.0 && nu_hz.is_finite()) {
        return Err(Error::InvalidParameter(format!("frequency must be non-negative, got {nu_hz}")));
    }
    if !(temperature > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "temperature must be positive, got {temperature}"
        )));
    }
    let x = PLANCK * nu_hz / (2.0 * BOLTZMANN * temperature);
    Ok(EquilibriumBias {
        exact: libm::tanh(x),
        linear: x,
    })
}

/// Spin temperature of a spin whose bias is `bias` (normalized) when its
/// equilibrium bias at `bath_temperature` is `eq_bias`.
///
/// `T_spin = T_bath · atanh(ε_eq·ε₀) / atanh(ε·ε₀)`, which tends to
/// `T_bath · ε_eq / ε` for small biases.
pub fn spin_temperature(
    bias: f64,
    eq_bias: f64,
    bath_temperature: f64,
    reference_bias: f64,
) -> Result<f64> {
    if !(bias > 0.0) || !(bias * reference_bias < 1.0) {
        return Err(Error::UndefinedTemperature(bias));
    }
    if bias == eq_bias {
        return Ok(bath_temperature);
    }
    Ok(bath_temperature * libm::atanh(eq_bias * reference_bias) / libm::atanh(bias * reference_bias))
}
