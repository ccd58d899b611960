//! Classical reversible gates acting on diagonal states as basis-state permutations.
//!
//! A gate acts on an ordered list of target spins. Its *local table* maps each
//! of the `2^k` local basis states (first target = most significant bit) to its
//! image; the table is lifted to a permutation of all `2^n` basis states and
//! applied by moving probabilities. No arithmetic touches the probabilities,
//! so normalization, non-negativity and entropy are preserved bit-exactly.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::state::{spin_mask, DiagonalState};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GateKind {
    Not,
    Cnot,
    Swap,
    Cswap,
    Pt,
    ThreeBComp,
    Permutation,
}

/// A reversible gate and the spins it acts on.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GateSpec {
    Not { target: usize },
    /// Flips `target` when `control` is 1.
    Cnot { control: usize, target: usize },
    Swap { a: usize, b: usize },
    /// Swaps `a` and `b` when `control` is 1.
    Cswap { control: usize, a: usize, b: usize },
    /// Uni-directional polarization transfer as a dual CNOT:
    /// `CNOT(target→source)` then `CNOT(source→target)`, so the target ends
    /// holding the source's old bit and the source holds their parity.
    Pt { source: usize, target: usize },
    /// Three-bit compression: `CNOT(b→a)`, `NOT a`, `CSWAP(a; b, c)`.
    /// Spin `c` is the one that gets cooled.
    ThreeBComp { a: usize, b: usize, c: usize },
    /// Explicit bijection on the `2^k` local states of `targets`.
    Permutation { targets: Vec<usize>, table: Vec<usize> },
}

impl GateSpec {
    pub fn kind(&self) -> GateKind {
        match self {
            GateSpec::Not { .. } => GateKind::Not,
            GateSpec::Cnot { .. } => GateKind::Cnot,
            GateSpec::Swap { .. } => GateKind::Swap,
            GateSpec::Cswap { .. } => GateKind::Cswap,
            GateSpec::Pt { .. } => GateKind::Pt,
            GateSpec::ThreeBComp { .. } => GateKind::ThreeBComp,
            GateSpec::Permutation { .. } => GateKind::Permutation,
        }
    }

    pub fn targets(&self) -> Vec<usize> {
        match self {
            GateSpec::Not { target } => vec![*target],
            GateSpec::Cnot { control, target } => vec![*control, *target],
            GateSpec::Swap { a, b } => vec![*a, *b],
            GateSpec::Cswap { control, a, b } => vec![*control, *a, *b],
            GateSpec::Pt { source, target } => vec![*source, *target],
            GateSpec::ThreeBComp { a, b, c } => vec![*a, *b, *c],
            GateSpec::Permutation { targets, .. } => targets.clone(),
        }
    }

    /// Checks target indices against an `n`-spin register and the table's bijectivity.
    pub fn validate(&self, n: usize) -> Result<()> {
        let targets = self.targets();
        for (i, &t) in targets.iter().enumerate() {
            if t >= n {
                return Err(Error::IndexOutOfRange { index: t, n });
            }
            if targets[..i].contains(&t) {
                return Err(Error::InvalidGate(format!("spin {t} used twice")));
            }
        }
        if let GateSpec::Permutation { targets, table } = self {
            if targets.is_empty() {
                return Err(Error::InvalidGate("permutation without targets".into()));
            }
            let size = 1usize << targets.len();
            if table.len() != size {
                return Err(Error::InvalidGate(format!(
                    "table has {} entries, expected {size}",
                    table.len()
                )));
            }
            let mut seen = vec![false; size];
            for &image in table {
                if image >= size || seen[image] {
                    return Err(Error::InvalidGate("table is not a bijection".into()));
                }
                seen[image] = true;
            }
        }
        Ok(())
    }

    /// Image of every local basis state; index bits follow [`GateSpec::targets`].
    pub fn local_table(&self) -> Vec<usize> {
        if let GateSpec::Permutation { table, .. } = self {
            return table.clone();
        }
        let k = self.targets().len();
        (0..1usize << k)
            .map(|local| {
                let bit = |j: usize| (local >> (k - 1 - j)) & 1;
                let mut b: Vec<usize> = (0..k).map(bit).collect();
                match self {
                    GateSpec::Not { .. } => b[0] ^= 1,
                    GateSpec::Cnot { .. } => b[1] ^= b[0],
                    GateSpec::Swap { .. } => b.swap(0, 1),
                    GateSpec::Cswap { .. } => {
                        if b[0] == 1 {
                            b.swap(1, 2);
                        }
                    }
                    GateSpec::Pt { .. } => {
                        b[0] ^= b[1];
                        b[1] ^= b[0];
                    }
                    GateSpec::ThreeBComp { .. } => {
                        b[0] ^= b[1];
                        b[0] ^= 1;
                        if b[0] == 1 {
                            b.swap(1, 2);
                        }
                    }
                    GateSpec::Permutation { .. } => unreachable!(),
                }
                b.iter().fold(0, |acc, &v| (acc << 1) | v)
            })
            .collect()
    }

    /// The gate undoing this one.
    pub fn inverse(&self) -> GateSpec {
        match self {
            GateSpec::Pt { .. } | GateSpec::ThreeBComp { .. } | GateSpec::Permutation { .. } => {
                let table = self.local_table();
                let mut inv = vec![0; table.len()];
                for (from, &to) in table.iter().enumerate() {
                    inv[to] = from;
                }
                GateSpec::Permutation {
                    targets: self.targets(),
                    table: inv,
                }
            }
            involution => involution.clone(),
        }
    }
}

/// A gate lifted to a permutation of all `2^n` basis states.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BasisPermutation {
    n: usize,
    map: Vec<u32>,
}

impl BasisPermutation {
    pub fn new(gate: &GateSpec, n: usize) -> Result<Self> {
        crate::state::check_capacity(n)?;
        gate.validate(n)?;
        let targets = gate.targets();
        let k = targets.len();
        let masks: Vec<usize> = targets.iter().map(|&t| spin_mask(n, t)).collect();
        let all: usize = masks.iter().sum();
        let table = gate.local_table();
        let map = (0..1usize << n)
            .map(|s| {
                let local = masks
                    .iter()
                    .fold(0, |acc, &m| (acc << 1) | usize::from(s & m != 0));
                let image = table[local];
                let mut out = s & !all;
                for (j, &m) in masks.iter().enumerate() {
                    if (image >> (k - 1 - j)) & 1 == 1 {
                        out |= m;
                    }
                }
                out as u32
            })
            .collect();
        Ok(Self { n, map })
    }

    pub fn n_spins(&self) -> usize {
        self.n
    }

    /// Image of basis index `s`.
    pub fn image(&self, s: usize) -> usize {
        self.map[s] as usize
    }

    pub fn apply(&self, state: &DiagonalState) -> Result<DiagonalState> {
        if state.n_spins() != self.n {
            return Err(Error::InvalidGate(format!(
                "permutation built for {} spins applied to {}",
                self.n,
                state.n_spins()
            )));
        }
        let mut out = vec![0.0; state.probs().len()];
        for (s, &p) in state.probs().iter().enumerate() {
            out[self.map[s] as usize] = p;
        }
        Ok(DiagonalState::from_parts(self.n, out))
    }
}

pub fn apply(state: &DiagonalState, gate: &GateSpec) -> Result<DiagonalState> {
    BasisPermutation::new(gate, state.n_spins())?.apply(state)
}

pub fn not(state: &DiagonalState, target: usize) -> Result<DiagonalState> {
    apply(state, &GateSpec::Not { target })
}

pub fn cnot(state: &DiagonalState, control: usize, target: usize) -> Result<DiagonalState> {
    apply(state, &GateSpec::Cnot { control, target })
}

/// Polarization transfer `source → target`. On any input the target's new
/// marginal equals the source's old one; on product inputs the source ends
/// with bias `ε_s·ε_t`.
pub fn pt(state: &DiagonalState, source: usize, target: usize) -> Result<DiagonalState> {
    apply(state, &GateSpec::Pt { source, target })
}

pub fn swap(state: &DiagonalState, i: usize, j: usize) -> Result<DiagonalState> {
    apply(state, &GateSpec::Swap { a: i, b: j })
}

pub fn three_b_comp(state: &DiagonalState, a: usize, b: usize, c: usize) -> Result<DiagonalState> {
    apply(state, &GateSpec::ThreeBComp { a, b, c })
}

/// Entropy-preserving compression that concentrates polarization on the
/// first `n_cold` spins.
///
/// Probabilities are ranked in descending order (ties keep their input order)
/// and dealt out to the `2^n_cold` prefix blocks, the largest going to the
/// all-up prefix. Within a block, entries keep their original relative order.
/// With `n_cold = n` this sorts the whole distribution onto lexicographic
/// basis order, which maximizes the first spin's bias, then the second's given
/// the first, and so on.
pub fn optimal_compress(state: &DiagonalState, n_cold: usize) -> Result<DiagonalState> {
    let n = state.n_spins();
    if n_cold > n {
        return Err(Error::IndexOutOfRange { index: n_cold, n });
    }
    let p = state.probs();
    let mut order: Vec<usize> = (0..p.len()).collect();
    order.sort_by(|&x, &y| p[y].total_cmp(&p[x]).then(x.cmp(&y)));
    let block = 1usize << (n - n_cold);
    let mut out = vec![0.0; p.len()];
    for (g, chunk) in order.chunks(block).enumerate() {
        let mut members = chunk.to_vec();
        members.sort_unstable();
        for (j, &src) in members.iter().enumerate() {
            out[g * block + j] = p[src];
        }
    }
    Ok(DiagonalState::from_parts(n, out))
}
