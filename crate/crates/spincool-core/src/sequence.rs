//! Step sequences (gates, transfers, waits, resets) and their two executors.
//!
//! The full-state executor evolves a [`DiagonalState`] and keeps every
//! classical correlation. The marginals-only executor evolves a [`BiasVector`]
//! and assumes the spins stay uncorrelated between steps: a polarization
//! transfer leaves its source at zero bias, SWAP exchanges biases, and any
//! other gate is applied to the product state of the current marginals.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::gates::{self, GateSpec};
use crate::relaxation;
use crate::state::{BiasVector, DiagonalState};
use crate::system::SpinSystem;

#[derive(Debug, Clone, PartialEq)]
pub enum Step {
    Gate(GateSpec),
    /// Polarization transfer delivering `efficiency` of the source bias to the target.
    Transfer {
        source: usize,
        target: usize,
        efficiency: f64,
    },
    /// Free T1 relaxation of all spins for the given number of seconds.
    Wait(f64),
    /// Instant rethermalization of the listed spins.
    Reset(Vec<usize>),
}

impl Step {
    pub fn pt(source: usize, target: usize) -> Self {
        Step::Transfer {
            source,
            target,
            efficiency: 1.0,
        }
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        match self {
            Step::Gate(g) => g.validate(n),
            Step::Transfer {
                source,
                target,
                efficiency,
            } => {
                GateSpec::Pt {
                    source: *source,
                    target: *target,
                }
                .validate(n)?;
                if !(0.0..=1.0).contains(efficiency) {
                    return Err(Error::InvalidParameter(format!(
                        "transfer efficiency must lie in [0, 1], got {efficiency}"
                    )));
                }
                Ok(())
            }
            Step::Wait(t) => relaxation::WaitStep::new(*t).map(|_| ()),
            Step::Reset(spins) => spins.iter().try_for_each(|&i| {
                if i < n {
                    Ok(())
                } else {
                    Err(Error::IndexOutOfRange { index: i, n })
                }
            }),
        }
    }

    /// Whether the step can exchange entropy with the bath.
    pub fn is_open(&self) -> bool {
        matches!(self, Step::Wait(_) | Step::Reset(_))
            || matches!(self, Step::Transfer { efficiency, .. } if *efficiency < 1.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum StateModel {
    /// Closed-form marginals; spins treated as uncorrelated after every step.
    #[default]
    MarginalsOnly,
    /// Exact `2^n` diagonal state with correlations.
    FullState,
}

/// Result of running a sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub biases: BiasVector,
    pub state: Option<DiagonalState>,
}

pub fn run(system: &SpinSystem, initial: &BiasVector, steps: &[Step], model: StateModel) -> Result<Outcome> {
    if initial.len() != system.n_spins() {
        return Err(Error::InvalidState(format!(
            "{} initial biases for {} spins",
            initial.len(),
            system.n_spins()
        )));
    }
    initial.validate(system.reference_bias())?;
    for step in steps {
        step.validate(system.n_spins())?;
    }
    match model {
        StateModel::MarginalsOnly => Ok(Outcome {
            biases: run_marginals(system, initial, steps)?,
            state: None,
        }),
        StateModel::FullState => {
            let eps0 = system.reference_bias();
            let state = run_full(system, initial.product_state(eps0)?, steps)?;
            Ok(Outcome {
                biases: state.marginal_biases(eps0),
                state: Some(state),
            })
        }
    }
}

pub fn run_marginals(system: &SpinSystem, initial: &BiasVector, steps: &[Step]) -> Result<BiasVector> {
    let eps0 = system.reference_bias();
    let mut b: Vec<f64> = initial.values().to_vec();
    for step in steps {
        match step {
            Step::Transfer {
                source,
                target,
                efficiency,
            } => {
                b[*target] = efficiency * b[*source];
                b[*source] = 0.0;
            }
            Step::Gate(GateSpec::Pt { source, target }) => {
                b[*target] = b[*source];
                b[*source] = 0.0;
            }
            Step::Gate(GateSpec::Swap { a, b: other }) => b.swap(*a, *other),
            Step::Gate(GateSpec::Not { target }) => b[*target] = -b[*target],
            Step::Gate(g) => {
                let state = BiasVector::new(b.clone()).product_state(eps0)?;
                b = gates::apply(&state, g)?.marginal_biases(eps0).values().to_vec();
            }
            Step::Wait(t) => {
                b = relaxation::relax_biases(&BiasVector::new(b), system, *t)?
                    .values()
                    .to_vec();
            }
            Step::Reset(spins) => {
                for &i in spins {
                    b[i] = system.spins()[i].eq_bias;
                }
            }
        }
    }
    Ok(BiasVector::new(b))
}

pub fn run_full(system: &SpinSystem, initial: DiagonalState, steps: &[Step]) -> Result<DiagonalState> {
    let mut state = initial;
    for step in steps {
        state = match step {
            Step::Transfer {
                source,
                target,
                efficiency,
            } => relaxation::attenuate(&gates::pt(&state, *source, *target)?, *target, *efficiency)?,
            Step::Gate(g) => gates::apply(&state, g)?,
            Step::Wait(t) => relaxation::relax(&state, system, *t)?,
            Step::Reset(spins) => relaxation::reset_waste(&state, system, spins)?,
        };
    }
    Ok(state)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn ideal_potent_marginals() {
        let sys = SpinSystem::tce_ideal();
        let steps = [Step::pt(2, 1), Step::pt(1, 0), Step::Wait(1e3), Step::pt(2, 1), Step::Wait(1e3)];
        let out = run(&sys, &sys.equilibrium(), &steps, StateModel::MarginalsOnly).unwrap();
        assert_eq!(out.biases.values(), &[4.0, 4.0, 4.0]);
    }

    #[test]
    fn models_agree_on_swap_and_not() {
        let sys = SpinSystem::tce();
        let steps = [
            Step::Gate(GateSpec::Swap { a: 0, b: 2 }),
            Step::Gate(GateSpec::Not { target: 1 }),
            Step::Wait(2.0),
        ];
        let m = run(&sys, &sys.equilibrium(), &steps, StateModel::MarginalsOnly).unwrap();
        let f = run(&sys, &sys.equilibrium(), &steps, StateModel::FullState).unwrap();
        for (a, b) in m.biases.values().iter().zip(f.biases.values()) {
            assert!((a - b).abs() < 1e-9);
        }
        assert!(f.state.is_some() && m.state.is_none());
    }

    #[test]
    fn rejects_bad_steps() {
        let sys = SpinSystem::tce();
        let eq = sys.equilibrium();
        assert!(run(&sys, &eq, &[Step::Wait(-1.0)], StateModel::MarginalsOnly).is_err());
        assert!(run(&sys, &eq, &[Step::pt(0, 3)], StateModel::MarginalsOnly).is_err());
        assert!(run(&sys, &eq, &[Step::Reset(vec![5])], StateModel::FullState).is_err());
        let bad = Step::Transfer { source: 0, target: 1, efficiency: 1.2 };
        assert!(run(&sys, &eq, &[bad], StateModel::MarginalsOnly).is_err());
        assert!(run(&sys, &BiasVector::new(vec![1.0]), &[], StateModel::MarginalsOnly).is_err());
    }
}
