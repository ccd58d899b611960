//! Bias ladders of algorithmic cooling: the PAC2 recursion, the optimal
//! asymptotic ladder, the three-spin iteration and PAC2 with finite relaxation.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::gates::GateSpec;
use crate::sequence::{self, Step};
use crate::state::BiasVector;
use crate::system::{Role, SpinDef, SpinSystem, T1};
use crate::MAX_SPINS;

/// Largest ladder also executed gate by gate on the full state.
const GATE_LEVEL_MAX: usize = 7;

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LadderResult {
    /// Biases in units of the reset spin's equilibrium bias.
    pub biases: BiasVector,
    /// Number of reset-spin rethermalizations, when the schedule is modelled.
    pub reset_count: Option<usize>,
    /// Coldest bias over the reset spin's equilibrium bias.
    pub cooling_factor: f64,
    /// Marginals from a gate-level run on the full state, in the same units.
    pub gate_level: Option<BiasVector>,
}

impl LadderResult {
    fn new(biases: Vec<f64>, reset_count: Option<usize>) -> Self {
        let cooling_factor = biases.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Self {
            biases: BiasVector::new(biases),
            reset_count,
            cooling_factor,
            gate_level: None,
        }
    }
}

/// One PAC2 operation. Spin `n - 1` is the reset spin.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pac2Op {
    /// Let the reset spin rethermalize.
    Wait,
    /// Polarization transfer from the reset spin to the given spin.
    Pt(usize),
    /// 3B-Comp cooling `c` with `a` and `b`.
    Comp { a: usize, b: usize, c: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pac2Schedule {
    pub n_spins: usize,
    pub ops: Vec<Pac2Op>,
    /// Length of the prefix after which the first spin holds its final bias.
    pub cool_len: usize,
}

impl Pac2Schedule {
    pub fn waits(&self) -> usize {
        count_waits(&self.ops)
    }

    pub fn cool_waits(&self) -> usize {
        count_waits(&self.ops[..self.cool_len])
    }

    fn steps(&self) -> Vec<Step> {
        let r = self.n_spins - 1;
        self.ops
            .iter()
            .map(|op| match *op {
                Pac2Op::Wait => Step::Reset(vec![r]),
                Pac2Op::Pt(x) => Step::Gate(GateSpec::Pt { source: r, target: x }),
                Pac2Op::Comp { a, b, c } => Step::Gate(GateSpec::ThreeBComp { a, b, c }),
            })
            .collect()
    }
}

fn count_waits(ops: &[Pac2Op]) -> usize {
    ops.iter().filter(|op| matches!(op, Pac2Op::Wait)).count()
}

fn with_head(head: usize, tail: &[usize]) -> Vec<usize> {
    let mut v = Vec::with_capacity(tail.len() + 1);
    v.push(head);
    v.extend_from_slice(tail);
    v
}

/// Cools `l[0]` to `(3/2)^k`; `l` has `2k + 1` entries ending with the reset spin.
fn cool(l: &[usize], k: usize, ops: &mut Vec<Pac2Op>) {
    if k == 1 {
        let (x, y, r) = (l[0], l[1], l[2]);
        ops.extend_from_slice(&[
            Pac2Op::Wait,
            Pac2Op::Pt(x),
            Pac2Op::Wait,
            Pac2Op::Pt(y),
            Pac2Op::Wait,
            Pac2Op::Comp { a: y, b: r, c: x },
        ]);
        return;
    }
    for &head in &l[..3] {
        cool(&with_head(head, &l[3..]), k - 1, ops);
    }
    ops.push(Pac2Op::Comp { a: l[1], b: l[2], c: l[0] });
}

/// Brings `l[1..]` back to their ladder values after `cool` without touching `l[0]`.
fn restore(l: &[usize], k: usize, ops: &mut Vec<Pac2Op>) {
    if k == 1 {
        ops.extend_from_slice(&[Pac2Op::Wait, Pac2Op::Pt(l[1]), Pac2Op::Wait]);
        return;
    }
    cool(&with_head(l[1], &l[3..]), k - 1, ops);
    ladder(&with_head(l[2], &l[3..]), k - 1, ops);
}

fn ladder(l: &[usize], k: usize, ops: &mut Vec<Pac2Op>) {
    cool(l, k, ops);
    restore(l, k, ops);
}

fn check_odd(n: usize) -> Result<()> {
    if n < 3 || n.is_multiple_of(2) {
        return Err(Error::InvalidParameter(format!(
            "PAC2 needs an odd number of spins ≥ 3, got {n}"
        )));
    }
    if n > MAX_SPINS {
        return Err(Error::Capacity { n, max: MAX_SPINS });
    }
    Ok(())
}

/// The full PAC2 schedule on `n` spins (odd, ≥ 3), spin `n - 1` being the reset spin.
pub fn pac2_schedule(n: usize) -> Result<Pac2Schedule> {
    check_odd(n)?;
    let k = (n - 1) / 2;
    let l: Vec<usize> = (0..n).collect();
    let mut ops = Vec::new();
    cool(&l, k, &mut ops);
    let cool_len = ops.len();
    restore(&l, k, &mut ops);
    Ok(Pac2Schedule { n_spins: n, ops, cool_len })
}

/// Leading-order PAC2 ladder `{(3/2)^k, (3/2)^(k-1), (3/2)^(k-1), …, 1, 1}` scaled by
/// `reset_bias`, with a gate-level full-state check for up to seven spins.
pub fn pac2_ladder(n: usize, reset_bias: f64) -> Result<LadderResult> {
    check_odd(n)?;
    if !(reset_bias > 0.0 && reset_bias.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "reset bias must be positive, got {reset_bias}"
        )));
    }
    let k = (n - 1) / 2;
    let mut biases = vec![reset_bias * libm::pow(1.5, k as f64)];
    for level in (0..k).rev() {
        let b = reset_bias * libm::pow(1.5, level as f64);
        biases.extend_from_slice(&[b, b]);
    }
    let schedule = pac2_schedule(n)?;
    let mut result = LadderResult::new(biases, Some(schedule.waits()));
    if n <= GATE_LEVEL_MAX {
        result.gate_level = Some(run_gate_level(&schedule, reset_bias)?);
    }
    Ok(result)
}

/// Absolute bias per unit used by the gate-level run; small enough that
/// higher-order corrections stay far below the leading-order ladder.
const GATE_LEVEL_EPS: f64 = 1e-6;

fn run_gate_level(schedule: &Pac2Schedule, reset_bias: f64) -> Result<BiasVector> {
    let n = schedule.n_spins;
    let spins: Vec<SpinDef> = (0..n)
        .map(|i| {
            let role = if i + 1 == n { Role::Reset } else { Role::Computation };
            SpinDef::new(format!("s{i}"), reset_bias, T1::INFINITE, role)
        })
        .collect();
    let system = SpinSystem::new(spins, GATE_LEVEL_EPS, 1.0)?;
    let state = system.equilibrium().product_state(GATE_LEVEL_EPS)?;
    let out = sequence::run_full(&system, state, &schedule.steps())?;
    let b = out.marginal_biases(GATE_LEVEL_EPS);
    Ok(b)
}

/// Optimal asymptotic ladder `{2^(n-2), …, 4, 2, 1, 1}` in units of the reset bias.
pub fn optimal_ac_ladder(n: usize) -> Result<LadderResult> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("ladder needs at least 2 spins, got {n}")));
    }
    if n > 1024 {
        return Err(Error::InvalidParameter(format!("ladder length {n} overflows f64")));
    }
    let mut biases: Vec<f64> = (0..n - 1).rev().map(|k| libm::ldexp(1.0, k as i32)).collect();
    biases.push(1.0);
    Ok(LadderResult::new(biases, None))
}

/// Repeated 3B-Comp plus reset of the two hot spins on a three-spin system with
/// equal equilibrium biases. The first computation spin is the one cooled;
/// results are in system order. Converges to twice the equilibrium bias.
pub fn fernandez_iterate(system: &SpinSystem, rounds: usize) -> Result<LadderResult> {
    let reset = system.indices_with_role(Role::Reset);
    let comp = system.indices_with_role(Role::Computation);
    if system.n_spins() != 3 || reset.len() != 1 {
        return Err(Error::InvalidSystem(
            "iteration needs three spins with exactly one reset spin".into(),
        ));
    }
    let eq = system.spins()[reset[0]].eq_bias;
    if system.spins().iter().any(|s| s.eq_bias != eq) {
        return Err(Error::InvalidSystem("iteration needs equal equilibrium biases".into()));
    }
    let (c, a, b) = (comp[0], comp[1], reset[0]);
    let mut v = [1.0; 3];
    for _ in 0..rounds {
        v[c] = (v[a] + v[b] + v[c]) / 2.0;
        v[a] = 1.0;
        v[b] = 1.0;
    }
    Ok(LadderResult::new(v.to_vec(), Some(rounds)))
}

/// PAC2 with computation-spin relaxation: each wait lasts `d` reset-spin T1s,
/// and computation spins have a T1 that is `r` times longer. Values follow the
/// leading-order bias arithmetic with equilibrium biases of 1.
///
/// The cooling factor is the coldest bias right after the schedule's cooling
/// prefix. `r` and `d` may be infinite.
pub fn pac2_finite_r_n(n: usize, r: f64, d: f64) -> Result<LadderResult> {
    if !(r > 0.0) || !(d > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "relaxation ratio and wait length must be positive, got R={r} d={d}"
        )));
    }
    let schedule = pac2_schedule(n)?;
    let reset = n - 1;
    let keep = if r.is_infinite() { 1.0 } else { libm::exp(-d / r) };
    let reset_gap = libm::exp(-d);
    let mut b = vec![0.0; n];
    for op in &schedule.ops[..schedule.cool_len] {
        match *op {
            Pac2Op::Wait => {
                for (i, v) in b.iter_mut().enumerate() {
                    *v = if i == reset {
                        1.0 - (1.0 - *v) * reset_gap
                    } else {
                        1.0 + (*v - 1.0) * keep
                    };
                }
            }
            Pac2Op::Pt(x) => {
                b[x] = b[reset];
                b[reset] = 0.0;
            }
            Pac2Op::Comp { a, b: bb, c } => {
                let (va, vb, vc) = (b[a], b[bb], b[c]);
                b[c] = (va + vb + vc) / 2.0;
                b[bb] = (vb + vc - va) / 2.0;
                b[a] = 0.0;
            }
        }
    }
    let mut result = LadderResult::new(b, Some(schedule.cool_waits()));
    result.cooling_factor = result.biases.values()[0];
    Ok(result)
}

/// Five-spin [`pac2_finite_r_n`].
pub fn pac2_finite_r(r: f64, d: f64) -> Result<LadderResult> {
    pac2_finite_r_n(5, r, d)
}
