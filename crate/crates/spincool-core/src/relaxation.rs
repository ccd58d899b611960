//! T1 thermalization on full diagonal states.
//!
//! Each spin `i` undergoes an independent generalized reset: with probability
//! `kᵢ = 1 − e^(−t/T1ᵢ)` its state is replaced by its equilibrium
//! distribution. On the probability vector this is
//! `p → (1−kᵢ)·p + kᵢ·(Tr_i p ⊗ ρ_eq,i)`. Marginals then follow
//! `ε(t) = (ε_init − ε_eq)·e^(−t/T1) + ε_eq` exactly, and every correlation
//! involving spin `i` is damped by `1 − kᵢ`. The per-spin channels commute.

use alloc::format;

use crate::error::{Error, Result};
use crate::state::{spin_mask, BiasVector, DiagonalState};
use crate::system::SpinSystem;

/// A WAIT of `duration` seconds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaitStep {
    duration: f64,
}

impl WaitStep {
    pub fn new(duration: f64) -> Result<Self> {
        check_duration(duration)?;
        Ok(Self { duration })
    }

    pub fn duration(&self) -> f64 {
        self.duration
    }
}

fn check_duration(t: f64) -> Result<()> {
    if t >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("wait duration must be non-negative, got {t}")))
    }
}

fn check_shape(state: &DiagonalState, system: &SpinSystem) -> Result<()> {
    if state.n_spins() != system.n_spins() {
        return Err(Error::InvalidState(format!(
            "state has {} spins, system has {}",
            state.n_spins(),
            system.n_spins()
        )));
    }
    Ok(())
}

/// Closed-form single-spin relaxation: `(init − eq)·e^(−t/T1) + eq`.
pub fn relax_bias(init: f64, eq: f64, t: f64, t1: f64) -> f64 {
    if t1.is_infinite() {
        return init;
    }
    (init - eq) * libm::exp(-t / t1) + eq
}

/// Mixes spin `i` toward the single-spin distribution with absolute bias
/// `target` with weight `k`.
fn mix_spin(state: &mut DiagonalState, i: usize, k: f64, target: f64) {
    let n = state.n_spins();
    let mask = spin_mask(n, i);
    let up = (1.0 + target) / 2.0;
    let down = (1.0 - target) / 2.0;
    let keep = 1.0 - k;
    let probs = state.probs_mut();
    for s in 0..probs.len() {
        if s & mask != 0 {
            continue;
        }
        let (p0, p1) = (probs[s], probs[s | mask]);
        let total = p0 + p1;
        probs[s] = keep * p0 + k * total * up;
        probs[s | mask] = keep * p1 + k * total * down;
    }
}

/// Lets every spin relax toward equilibrium for `t` seconds.
pub fn relax(state: &DiagonalState, system: &SpinSystem, t: f64) -> Result<DiagonalState> {
    check_duration(t)?;
    check_shape(state, system)?;
    let eps0 = system.reference_bias();
    let mut out = state.clone();
    for (i, spin) in system.spins().iter().enumerate() {
        let k = 1.0 - spin.t1.survival(t);
        if k > 0.0 {
            mix_spin(&mut out, i, k, spin.eq_bias * eps0);
        }
    }
    Ok(out)
}

/// Instantly rethermalizes the listed spins, discarding their correlations.
pub fn reset_waste(state: &DiagonalState, system: &SpinSystem, spins: &[usize]) -> Result<DiagonalState> {
    check_shape(state, system)?;
    for &i in spins {
        state.check_index(i)?;
    }
    let eps0 = system.reference_bias();
    let mut out = state.clone();
    for &i in spins {
        mix_spin(&mut out, i, 1.0, system.spins()[i].eq_bias * eps0);
    }
    Ok(out)
}

/// Partially depolarizes spin `i`, scaling its bias by `factor` ∈ [0, 1].
/// Models an imperfect transfer that delivers only a fraction of the polarization.
pub fn attenuate(state: &DiagonalState, i: usize, factor: f64) -> Result<DiagonalState> {
    state.check_index(i)?;
    if !(0.0..=1.0).contains(&factor) {
        return Err(Error::InvalidParameter(format!(
            "attenuation factor must lie in [0, 1], got {factor}"
        )));
    }
    let mut out = state.clone();
    if factor < 1.0 {
        mix_spin(&mut out, i, 1.0 - factor, 0.0);
    }
    Ok(out)
}

/// Marginals-only relaxation of a normalized bias vector.
pub fn relax_biases(biases: &BiasVector, system: &SpinSystem, t: f64) -> Result<BiasVector> {
    check_duration(t)?;
    if biases.len() != system.n_spins() {
        return Err(Error::InvalidState(format!(
            "{} biases for {} spins",
            biases.len(),
            system.n_spins()
        )));
    }
    Ok(BiasVector::new(
        biases
            .values()
            .iter()
            .zip(system.spins())
            .map(|(&b, s)| relax_bias(b, s.eq_bias, t, s.t1.value()))
            .collect(),
    ))
}
