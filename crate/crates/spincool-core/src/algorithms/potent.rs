//! Dual-selective-reset heat-bath cooling (POTENT) on a two-carbon, one-proton molecule.
//!
//! Step order: PT(H→C2), PT(C2→C1), WAIT t1, PT(H→C2), WAIT t2. The far carbon
//! is cooled through the adjacent one because the direct coupling is weak.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::report::{ICReport, Uncertainties};
use crate::sequence::{self, StateModel, Step};
use crate::system::{Role, SpinSystem, T1};
use crate::uncertainty::propagate_errors;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum PtModel {
    /// Every transfer moves the full source bias.
    #[default]
    Ideal,
    /// Transfers deliver only their measured efficiency.
    Practical,
}

/// Polarization-transfer efficiencies, in protocol order:
/// first H→C2, C2→C1, second H→C2.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TransferModel {
    pub pt_model: PtModel,
    pub efficiencies: [f64; 3],
    pub efficiency_errs: [f64; 3],
}

impl TransferModel {
    pub fn ideal() -> Self {
        Self {
            pt_model: PtModel::Ideal,
            efficiencies: [1.0; 3],
            efficiency_errs: [0.0; 3],
        }
    }

    /// Measured TCE efficiencies: 92 ± 2 %, 69 ± 1 %, 74 ± 1 %.
    pub fn practical() -> Self {
        Self {
            pt_model: PtModel::Practical,
            efficiencies: [0.92, 0.69, 0.74],
            efficiency_errs: [0.02, 0.01, 0.01],
        }
    }

    /// Efficiencies actually applied under the selected model.
    pub fn effective(&self) -> [f64; 3] {
        match self.pt_model {
            PtModel::Ideal => [1.0; 3],
            PtModel::Practical => self.efficiencies,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (&f, &e) in self.efficiencies.iter().zip(&self.efficiency_errs) {
            if !(0.0..=1.0).contains(&f) || !(e >= 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "efficiency {f} ± {e} outside [0, 1]"
                )));
            }
        }
        Ok(())
    }
}

impl Default for TransferModel {
    fn default() -> Self {
        Self::ideal()
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PotentParams {
    pub t1: f64,
    pub t2: f64,
    #[cfg_attr(feature = "serde", serde(flatten))]
    pub transfers: TransferModel,
    #[cfg_attr(feature = "serde", serde(default))]
    pub state_model: StateModel,
}

impl PotentParams {
    pub fn ideal(t1: f64, t2: f64) -> Self {
        Self {
            t1,
            t2,
            transfers: TransferModel::ideal(),
            state_model: StateModel::MarginalsOnly,
        }
    }

    pub fn practical(t1: f64, t2: f64) -> Self {
        Self {
            transfers: TransferModel::practical(),
            ..Self::ideal(t1, t2)
        }
    }

    pub fn with_state_model(mut self, model: StateModel) -> Self {
        self.state_model = model;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t1 >= 0.0 && self.t2 >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "delays must be non-negative, got t1={} t2={}",
                self.t1, self.t2
            )));
        }
        self.transfers.validate()
    }
}

/// Indices of the far carbon, the adjacent carbon and the reset spin.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TceRoles {
    pub far: usize,
    pub near: usize,
    pub reset: usize,
}

impl TceRoles {
    /// Three spins, exactly one reset spin; computation spins in (far, near) order.
    pub fn of(system: &SpinSystem) -> Result<Self> {
        let reset = system.indices_with_role(Role::Reset);
        let comp = system.indices_with_role(Role::Computation);
        if system.n_spins() != 3 || reset.len() != 1 || comp.len() != 2 {
            return Err(Error::InvalidSystem(format!(
                "protocol needs two computation spins and one reset spin, got {} reset of {} spins",
                reset.len(),
                system.n_spins()
            )));
        }
        Ok(Self {
            far: comp[0],
            near: comp[1],
            reset: reset[0],
        })
    }
}

pub fn potent_steps(roles: TceRoles, params: &PotentParams) -> Vec<Step> {
    let [f1, f2, f3] = params.transfers.effective();
    let TceRoles { far, near, reset } = roles;
    vec![
        Step::Transfer { source: reset, target: near, efficiency: f1 },
        Step::Transfer { source: near, target: far, efficiency: f2 },
        Step::Wait(params.t1),
        Step::Transfer { source: reset, target: near, efficiency: f3 },
        Step::Wait(params.t2),
    ]
}

/// Runs `steps(model)` on `system` and builds the report, including propagated
/// uncertainties from the spins' bias/T1 errors and, for practical transfers,
/// the efficiency errors.
fn run_with_uncertainty<F>(system: &SpinSystem, transfers: &TransferModel, state_model: StateModel, steps: F) -> Result<ICReport>
where
    F: Fn(&TransferModel) -> Vec<Step>,
{
    let eq = system.equilibrium();
    let outcome = sequence::run(system, &eq, &steps(transfers), state_model)?;
    let report = match &outcome.state {
        Some(state) => ICReport::from_state(system, &eq, state),
        None => ICReport::from_biases(system, &eq, outcome.biases.clone()),
    };

    let n = system.n_spins();
    let finite_t1: Vec<usize> = (0..n).filter(|&i| !system.spins()[i].t1.is_infinite()).collect();
    let mut values: Vec<f64> = system.spins().iter().map(|s| s.eq_bias).collect();
    let mut deltas: Vec<f64> = system.spins().iter().map(|s| s.eq_bias_err).collect();
    for &i in &finite_t1 {
        values.push(system.spins()[i].t1.value());
        deltas.push(system.spins()[i].t1_err);
    }
    let practical = transfers.pt_model == PtModel::Practical;
    if practical {
        values.extend_from_slice(&transfers.efficiencies);
        deltas.extend_from_slice(&transfers.efficiency_errs);
    }
    let evaluate = |x: &[f64]| -> Vec<f64> {
        let attempt = || -> Result<Vec<f64>> {
            let mut sys = system.clone();
            for (i, &b) in x[..n].iter().enumerate() {
                sys.set_eq_bias(i, b)?;
            }
            for (k, &i) in finite_t1.iter().enumerate() {
                sys.set_t1(i, T1::seconds(x[n + k])?)?;
            }
            let mut tm = transfers.clone();
            if practical {
                let off = n + finite_t1.len();
                tm.efficiencies = [x[off], x[off + 1], x[off + 2]];
            }
            let b = sequence::run(&sys, &sys.equilibrium(), &steps(&tm), state_model)?.biases;
            let mut out = b.values().to_vec();
            out.push(crate::entropy::ic_leading(&b));
            Ok(out)
        };
        attempt().unwrap_or_else(|_| vec![f64::NAN; n + 1])
    };
    let mut errs = propagate_errors(evaluate, &values, &deltas)?;
    let ic = errs.pop().unwrap_or(0.0);
    Ok(report.with_uncertainties(Uncertainties {
        biases: errs,
        ic_leading: ic,
    }))
}

pub fn potent(system: &SpinSystem, params: &PotentParams) -> Result<ICReport> {
    params.validate()?;
    let roles = TceRoles::of(system)?;
    run_with_uncertainty(system, &params.transfers, params.state_model, |tm| {
        potent_steps(
            roles,
            &PotentParams {
                transfers: tm.clone(),
                ..params.clone()
            },
        )
    })
}

/// POTENT with a (near-)zero final delay, reporting the two-carbon information content.
pub fn truncated_potent(system: &SpinSystem, params: &PotentParams) -> Result<ICReport> {
    let roles = TceRoles::of(system)?;
    potent(system, params)?.with_subset(system, &[roles.far, roles.near])
}

/// One selective reset: transfer the reset spin's polarization to `target`
/// (through the adjacent carbon when `target` is the far one) and wait `t`.
///
/// Practical transfers use the first two efficiencies in chain order.
pub fn single_selective_reset(
    system: &SpinSystem,
    target: usize,
    t: f64,
    transfers: &TransferModel,
    state_model: StateModel,
) -> Result<ICReport> {
    transfers.validate()?;
    if !(t >= 0.0) {
        return Err(Error::InvalidParameter(format!("delay must be non-negative, got {t}")));
    }
    let roles = TceRoles::of(system)?;
    if target != roles.far && target != roles.near {
        return Err(Error::InvalidParameter(format!(
            "target {target} is not a computation spin"
        )));
    }
    let report = run_with_uncertainty(system, transfers, state_model, |tm| {
        let [f1, f2, _] = tm.effective();
        let mut steps = vec![Step::Transfer {
            source: roles.reset,
            target: roles.near,
            efficiency: f1,
        }];
        if target == roles.far {
            steps.push(Step::Transfer {
                source: roles.near,
                target: roles.far,
                efficiency: f2,
            });
        }
        steps.push(Step::Wait(t));
        steps
    })?;
    report.with_subset(system, &[target, roles.reset])
}

#[cfg(test)]
mod tests {
    use super::*;

    const LONG: f64 = 1e3;

    #[test]
    fn ideal_infinite_t1() {
        let r = potent(&SpinSystem::tce_ideal(), &PotentParams::ideal(LONG, LONG)).unwrap();
        assert_eq!(r.biases.values(), &[4.0, 4.0, 4.0]);
        assert_eq!(r.ic_leading, 48.0);
        assert!(r.bypass());
    }

    #[test]
    fn measured_t1_ideal_pt() {
        let r = potent(&SpinSystem::tce(), &PotentParams::ideal(9.604, 8.239)).unwrap();
        let b = r.biases.values();
        assert!((b[0] - 2.97).abs() < 0.01 && (b[1] - 2.80).abs() < 0.01 && (b[2] - 3.60).abs() < 0.01);
        assert!((r.ic_leading - 29.6).abs() < 0.05);
        // proton is fully drained by the last transfer before the final wait
        assert_eq!(b[2], 3.98 * (1.0 - libm::exp(-8.239 / 3.5)));
    }

    #[test]
    fn practical_pt() {
        let r = potent(&SpinSystem::tce(), &PotentParams::practical(11.032, 12.096)).unwrap();
        let b = r.biases.values();
        for (got, want) in b.iter().zip([1.89, 1.99, 3.85]) {
            assert!((got - want).abs() < 0.02, "{got} vs {want}");
        }
        assert!((r.ic_leading - 22.3).abs() < 0.15);
        assert!(r.bypass());
    }

    #[test]
    fn selective_reset_ideal() {
        let sys = SpinSystem::tce_ideal();
        let r = single_selective_reset(&sys, 1, LONG, &TransferModel::ideal(), StateModel::MarginalsOnly).unwrap();
        assert_eq!(r.biases.values(), &[1.0, 4.0, 4.0]);
        assert_eq!(r.ic_leading, 33.0);
        let r0 = single_selective_reset(&sys, 1, 0.0, &TransferModel::ideal(), StateModel::MarginalsOnly).unwrap();
        assert_eq!(r0.biases.values(), &[1.0, 4.0, 0.0]);
        assert_eq!(r0.ic_leading, 17.0);
        assert!(single_selective_reset(&sys, 2, 1.0, &TransferModel::ideal(), StateModel::MarginalsOnly).is_err());
    }

    #[test]
    fn truncated_ideal() {
        let sys = SpinSystem::tce_ideal();
        let r = truncated_potent(&sys, &PotentParams::ideal(LONG, 0.0)).unwrap();
        assert_eq!(r.biases.values(), &[4.0, 4.0, 0.0]);
        assert_eq!(r.ic_leading, 32.0);
        assert_eq!(r.subset.unwrap().ic_leading, 32.0);
        let r = truncated_potent(&sys, &PotentParams::ideal(0.0, 0.0)).unwrap();
        assert_eq!(r.biases.values(), &[4.0, 0.0, 0.0]);
        assert_eq!(r.ic_leading, 16.0);
    }

    #[test]
    fn wrong_shape() {
        let mut spins = SpinSystem::tce().spins().to_vec();
        spins[0].role = Role::Reset;
        let sys = SpinSystem::new(spins, 1e-5, 296.0).unwrap();
        assert!(potent(&sys, &PotentParams::ideal(1.0, 1.0)).is_err());
        assert!(potent(&SpinSystem::tce(), &PotentParams::ideal(-1.0, 1.0)).is_err());
    }

    #[test]
    fn full_state_matches_marginals() {
        let sys = SpinSystem::tce();
        for params in [PotentParams::ideal(9.604, 8.239), PotentParams::practical(11.032, 12.096)] {
            let fast = potent(&sys, &params).unwrap();
            let full = potent(&sys, &params.clone().with_state_model(StateModel::FullState)).unwrap();
            assert!(full.ic_is_lower_bound);
            for (a, b) in fast.biases.values().iter().zip(full.biases.values()) {
                assert!((a - b).abs() <= 10.0 * sys.reference_bias(), "{a} vs {b}");
            }
        }
    }
}
