//! Closed-system compression of a cooled TCE state.

use alloc::vec;

use crate::algorithms::TceRoles;
use crate::error::Result;
use crate::gates::{self, GateSpec};
use crate::report::ICReport;
use crate::sequence::{self, Step};
use crate::state::BiasVector;
use crate::system::SpinSystem;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum CompressionMode {
    /// 3B-Comp onto the far carbon, then both hot spins are refreshed from the
    /// reset spin's equilibrium (reset the proton, transfer it to the near carbon,
    /// reset the proton again).
    ThreeBComp,
    /// Entropy-preserving sort of all three spins.
    Optimal,
}

/// Compresses the product state with biases `start` (system order) and reports
/// the result against `start`.
pub fn compression_on_tce(system: &SpinSystem, start: &BiasVector, mode: CompressionMode) -> Result<ICReport> {
    let roles = TceRoles::of(system)?;
    start.validate(system.reference_bias())?;
    let state = start.product_state(system.reference_bias())?;
    let out = match mode {
        CompressionMode::ThreeBComp => {
            let steps = vec![
                Step::Gate(GateSpec::ThreeBComp {
                    a: roles.reset,
                    b: roles.near,
                    c: roles.far,
                }),
                Step::Reset(vec![roles.reset]),
                Step::pt(roles.reset, roles.near),
                Step::Reset(vec![roles.reset]),
            ];
            sequence::run_full(system, state, &steps)?
        }
        CompressionMode::Optimal => gates::optimal_compress(&state, system.n_spins())?,
    };
    Ok(ICReport::from_state(system, start, &out))
}
