//! Grid search over the two POTENT delays.
//!
//! Cells are evaluated with the closed-form marginals-only chain, which is
//! identical to [`sequence::run_marginals`](crate::sequence::run_marginals) on
//! the POTENT steps but costs a few multiplications per cell. Axis values are
//! `t = k·step` for `k = 0, 1, …` up to the maximum.
//!
//! The scan is split into per-row reductions ([`row_best`], [`row_plateau`])
//! whose merges are associative and commutative, so callers may partition rows
//! across workers and still get bit-identical summaries.

use alloc::format;
use alloc::vec::Vec;

use crate::algorithms::{potent, PotentParams, TceRoles, TransferModel};
use crate::error::{Error, Result};
use crate::sequence::StateModel;
use crate::system::SpinSystem;

/// Relative tolerance defining the near-maximal plateau.
pub const PLATEAU_TOL: f64 = 1e-3;

/// Largest mesh [`grid_search`] will materialize; use [`grid_scan`] beyond it.
pub const MAX_SURFACE_CELLS: usize = 1 << 22;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case", tag = "kind"))]
pub enum Objective {
    /// Leading-order IC of all spins.
    #[default]
    TotalIc,
    /// Leading-order IC of two spins.
    PairIc { a: usize, b: usize },
    /// Bias of one spin.
    SingleBias { spin: usize },
}

impl Objective {
    pub fn value(&self, b: &[f64; 3]) -> f64 {
        match *self {
            Objective::TotalIc => b.iter().map(|v| v * v).sum(),
            Objective::PairIc { a, b: j } => b[a] * b[a] + b[j] * b[j],
            Objective::SingleBias { spin } => b[spin],
        }
    }

    fn validate(&self, n: usize) -> Result<()> {
        let check = |i: usize| {
            if i < n {
                Ok(())
            } else {
                Err(Error::IndexOutOfRange { index: i, n })
            }
        };
        match *self {
            Objective::TotalIc => Ok(()),
            Objective::PairIc { a, b } => {
                check(a)?;
                check(b)?;
                if a == b {
                    return Err(Error::InvalidParameter("pair objective needs two distinct spins".into()));
                }
                Ok(())
            }
            Objective::SingleBias { spin } => check(spin),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GridSpec {
    pub t1_max: f64,
    pub t2_max: f64,
    pub step: f64,
    #[cfg_attr(feature = "serde", serde(default))]
    pub objective: Objective,
}

impl GridSpec {
    pub fn new(t1_max: f64, t2_max: f64, step: f64, objective: Objective) -> Result<Self> {
        let g = Self {
            t1_max,
            t2_max,
            step,
            objective,
        };
        g.validate()?;
        Ok(g)
    }

    /// Square grid over `[0, 5·T1]` of the system's reset spin.
    pub fn default_for(system: &SpinSystem, step: f64, objective: Objective) -> Result<Self> {
        let roles = TceRoles::of(system)?;
        let t = 5.0 * system.spins()[roles.reset].t1.value();
        Self::new(t, t, step, objective)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.step > 0.0 && self.step.is_finite()) {
            return Err(Error::EmptyGrid);
        }
        if !(self.t1_max >= self.step && self.t2_max >= self.step) || !self.t1_max.is_finite() || !self.t2_max.is_finite() {
            return Err(Error::EmptyGrid);
        }
        Ok(())
    }

    fn axis_len(&self, max: f64) -> usize {
        libm::floor(max / self.step + 1e-9) as usize + 1
    }

    pub fn n_t1(&self) -> usize {
        self.axis_len(self.t1_max)
    }

    pub fn n_t2(&self) -> usize {
        self.axis_len(self.t2_max)
    }

    pub fn n_cells(&self) -> usize {
        self.n_t1() * self.n_t2()
    }

    pub fn t(&self, k: usize) -> f64 {
        k as f64 * self.step
    }
}

/// Per-axis factors of the closed-form POTENT chain.
#[derive(Debug, Clone)]
pub struct PotentSurface {
    roles: TceRoles,
    objective: Objective,
    far_eq: f64,
    near_eq: f64,
    reset_eq: f64,
    /// far-carbon offset after the two transfers
    far_start: f64,
    far_s1: Vec<f64>,
    near_start: Vec<f64>,
    far_s2: Vec<f64>,
    near_s2: Vec<f64>,
    reset_s2: Vec<f64>,
}

impl PotentSurface {
    pub fn new(system: &SpinSystem, transfers: &TransferModel, grid: &GridSpec) -> Result<Self> {
        grid.validate()?;
        let t1s: Vec<f64> = (0..grid.n_t1()).map(|k| grid.t(k)).collect();
        let t2s: Vec<f64> = (0..grid.n_t2()).map(|k| grid.t(k)).collect();
        Self::from_axes(system, transfers, grid.objective, &t1s, &t2s)
    }

    /// Surface over arbitrary delay axes.
    pub fn from_axes(
        system: &SpinSystem,
        transfers: &TransferModel,
        objective: Objective,
        t1s: &[f64],
        t2s: &[f64],
    ) -> Result<Self> {
        transfers.validate()?;
        objective.validate(system.n_spins())?;
        if t1s.is_empty() || t2s.is_empty() {
            return Err(Error::EmptyGrid);
        }
        if let Some(t) = t1s.iter().chain(t2s).find(|t| !(**t >= 0.0)) {
            return Err(Error::InvalidParameter(format!("delay must be non-negative, got {t}")));
        }
        let roles = TceRoles::of(system)?;
        let [f1, f2, f3] = transfers.effective();
        let spin = |i: usize| &system.spins()[i];
        let (far, near, reset) = (spin(roles.far), spin(roles.near), spin(roles.reset));
        let axis = |ts: &[f64], f: &dyn Fn(f64) -> f64| ts.iter().map(|&t| f(t)).collect::<Vec<_>>();
        Ok(Self {
            roles,
            objective,
            far_eq: far.eq_bias,
            near_eq: near.eq_bias,
            reset_eq: reset.eq_bias,
            far_start: f1 * f2 * reset.eq_bias - far.eq_bias,
            far_s1: axis(t1s, &|t| far.t1.survival(t)),
            near_start: axis(t1s, &|t| f3 * reset.eq_bias * (1.0 - reset.t1.survival(t)) - near.eq_bias),
            far_s2: axis(t2s, &|t| far.t1.survival(t)),
            near_s2: axis(t2s, &|t| near.t1.survival(t)),
            reset_s2: axis(t2s, &|t| 1.0 - reset.t1.survival(t)),
        })
    }

    pub fn n_t1(&self) -> usize {
        self.far_s1.len()
    }

    pub fn n_t2(&self) -> usize {
        self.far_s2.len()
    }

    /// Final biases in system order at mesh cell `(i, j)`.
    pub fn biases(&self, i: usize, j: usize) -> [f64; 3] {
        let mut out = [0.0; 3];
        out[self.roles.far] = self.far_start * self.far_s1[i] * self.far_s2[j] + self.far_eq;
        out[self.roles.near] = self.near_start[i] * self.near_s2[j] + self.near_eq;
        out[self.roles.reset] = self.reset_eq * self.reset_s2[j];
        out
    }

    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.objective.value(&self.biases(i, j))
    }
}

/// Best cell seen so far; larger value wins, ties go to the smaller `(i, j)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Best {
    pub value: f64,
    pub i: usize,
    pub j: usize,
}

impl Best {
    pub const NONE: Best = Best {
        value: f64::NEG_INFINITY,
        i: usize::MAX,
        j: usize::MAX,
    };

    fn beats(&self, other: &Best) -> bool {
        self.value > other.value || (self.value == other.value && (self.i, self.j) < (other.i, other.j))
    }

    pub fn offer(&mut self, value: f64, i: usize, j: usize) {
        let c = Best { value, i, j };
        if c.beats(self) {
            *self = c;
        }
    }

    pub fn merge(self, other: Best) -> Best {
        if other.beats(&self) {
            other
        } else {
            self
        }
    }
}

/// Count and index bounding box of the cells at or above a threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PlateauBox {
    pub count: u64,
    pub i_min: usize,
    pub i_max: usize,
    pub j_min: usize,
    pub j_max: usize,
}

impl PlateauBox {
    pub const EMPTY: PlateauBox = PlateauBox {
        count: 0,
        i_min: usize::MAX,
        i_max: 0,
        j_min: usize::MAX,
        j_max: 0,
    };

    pub fn add(&mut self, i: usize, j: usize) {
        self.count += 1;
        self.i_min = self.i_min.min(i);
        self.i_max = self.i_max.max(i);
        self.j_min = self.j_min.min(j);
        self.j_max = self.j_max.max(j);
    }

    pub fn merge(self, o: PlateauBox) -> PlateauBox {
        PlateauBox {
            count: self.count + o.count,
            i_min: self.i_min.min(o.i_min),
            i_max: self.i_max.max(o.i_max),
            j_min: self.j_min.min(o.j_min),
            j_max: self.j_max.max(o.j_max),
        }
    }
}

/// Lowest value counted as part of the plateau of `max`.
pub fn plateau_threshold(max: f64) -> f64 {
    max - PLATEAU_TOL * max.abs()
}

pub fn row_best(surface: &PotentSurface, i: usize) -> Best {
    let mut best = Best::NONE;
    for j in 0..surface.n_t2() {
        best.offer(surface.value(i, j), i, j);
    }
    best
}

pub fn row_plateau(surface: &PotentSurface, i: usize, threshold: f64) -> PlateauBox {
    let mut p = PlateauBox::EMPTY;
    for j in 0..surface.n_t2() {
        if surface.value(i, j) >= threshold {
            p.add(i, j);
        }
    }
    p
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Cell {
    pub t1: f64,
    pub t2: f64,
    pub value: f64,
    pub biases: [f64; 3],
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SurfaceSummary {
    pub grid: GridSpec,
    pub n_t1: usize,
    pub n_t2: usize,
    pub argmax: Cell,
    pub plateau: PlateauBox,
}

impl SurfaceSummary {
    /// Assembles the summary from merged reductions.
    pub fn from_reductions(surface: &PotentSurface, grid: &GridSpec, best: Best, plateau: PlateauBox) -> Result<Self> {
        if best.i == usize::MAX {
            return Err(Error::EmptyGrid);
        }
        Ok(Self {
            grid: *grid,
            n_t1: surface.n_t1(),
            n_t2: surface.n_t2(),
            argmax: Cell {
                t1: grid.t(best.i),
                t2: grid.t(best.j),
                value: best.value,
                biases: surface.biases(best.i, best.j),
            },
            plateau,
        })
    }

    pub fn plateau_t1_range(&self) -> (f64, f64) {
        (self.grid.t(self.plateau.i_min), self.grid.t(self.plateau.i_max))
    }

    pub fn plateau_t2_range(&self) -> (f64, f64) {
        (self.grid.t(self.plateau.j_min), self.grid.t(self.plateau.j_max))
    }
}

/// Sequential streaming scan of the whole mesh without storing it.
pub fn grid_scan(system: &SpinSystem, transfers: &TransferModel, grid: &GridSpec) -> Result<SurfaceSummary> {
    let surface = PotentSurface::new(system, transfers, grid)?;
    let best = (0..surface.n_t1()).map(|i| row_best(&surface, i)).fold(Best::NONE, Best::merge);
    let threshold = plateau_threshold(best.value);
    let plateau = (0..surface.n_t1())
        .map(|i| row_plateau(&surface, i, threshold))
        .fold(PlateauBox::EMPTY, PlateauBox::merge);
    SurfaceSummary::from_reductions(&surface, grid, best, plateau)
}

/// Fully materialized surface, cells stored t1-major.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Surface {
    pub summary: SurfaceSummary,
    pub spins: Vec<alloc::string::String>,
    pub cells: Vec<Cell>,
}

impl Surface {
    /// Whether cell `k` (t1-major) lies on the plateau.
    pub fn on_plateau(&self, k: usize) -> bool {
        self.cells[k].value >= plateau_threshold(self.summary.argmax.value)
    }
}

pub fn grid_search(system: &SpinSystem, transfers: &TransferModel, grid: &GridSpec) -> Result<Surface> {
    grid.validate()?;
    let cells = grid.n_cells();
    if cells > MAX_SURFACE_CELLS {
        return Err(Error::InvalidParameter(format!(
            "{cells} cells exceed the {MAX_SURFACE_CELLS}-cell limit for a stored surface"
        )));
    }
    let surface = PotentSurface::new(system, transfers, grid)?;
    let summary = grid_scan(system, transfers, grid)?;
    let mut out = Vec::with_capacity(cells);
    for i in 0..surface.n_t1() {
        for j in 0..surface.n_t2() {
            let biases = surface.biases(i, j);
            out.push(Cell {
                t1: grid.t(i),
                t2: grid.t(j),
                value: grid.objective.value(&biases),
                biases,
            });
        }
    }
    Ok(Surface {
        summary,
        spins: system.names(),
        cells: out,
    })
}

/// Two-spin optimum with bypass flags against the pair's and the whole system's
/// equilibrium IC.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PairOptimum {
    pub summary: SurfaceSummary,
    pub pair_equilibrium_ic: f64,
    pub system_equilibrium_ic: f64,
    pub bypass_pair: bool,
    pub bypass_system: bool,
}

pub fn pair_ic_optimize(
    system: &SpinSystem,
    pair: [usize; 2],
    transfers: &TransferModel,
    grid: &GridSpec,
) -> Result<PairOptimum> {
    let grid = GridSpec {
        objective: Objective::PairIc { a: pair[0], b: pair[1] },
        ..*grid
    };
    let summary = grid_scan(system, transfers, &grid)?;
    pair_optimum(system, pair, summary)
}

/// Attaches bypass flags to an already scanned pair objective.
pub fn pair_optimum(system: &SpinSystem, pair: [usize; 2], summary: SurfaceSummary) -> Result<PairOptimum> {
    let eq = system.equilibrium();
    let sq = |i: usize| eq.get(i).map(|b| b * b).ok_or(Error::IndexOutOfRange { index: i, n: eq.len() });
    let pair_eq = sq(pair[0])? + sq(pair[1])?;
    let system_eq = crate::entropy::ic_leading(&eq);
    let v = summary.argmax.value;
    Ok(PairOptimum {
        pair_equilibrium_ic: pair_eq,
        system_equilibrium_ic: system_eq,
        bypass_pair: v > pair_eq,
        bypass_system: v > system_eq,
        summary,
    })
}

/// Largest normalized bias difference between the closed-form cells and
/// full-state POTENT runs at the given `(t1, t2)` points.
pub fn full_state_deviation(system: &SpinSystem, transfers: &TransferModel, points: &[(f64, f64)]) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for &(t1, t2) in points {
        let params = PotentParams {
            t1,
            t2,
            transfers: transfers.clone(),
            state_model: StateModel::FullState,
        };
        let full = potent(system, &params)?;
        let fast = potent_closed_form(system, transfers, t1, t2)?;
        for (a, b) in fast.iter().zip(full.biases.values()) {
            worst = worst.max((a - b).abs());
        }
    }
    Ok(worst)
}

/// Closed-form POTENT biases at an arbitrary `(t1, t2)`.
pub fn potent_closed_form(system: &SpinSystem, transfers: &TransferModel, t1: f64, t2: f64) -> Result<[f64; 3]> {
    Ok(PotentSurface::from_axes(system, transfers, Objective::TotalIc, &[t1], &[t2])?.biases(0, 0))
}
