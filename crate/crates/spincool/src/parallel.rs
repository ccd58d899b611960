//! Multi-threaded grid scans.
//!
//! Rows are reduced independently and merged with the core's associative,
//! commutative reductions, so results are bit-identical to the sequential scan
//! for any thread count.

use rayon::prelude::*;
use spincool_core::algorithms::TransferModel;
use spincool_core::optimizer::{
    plateau_threshold, row_best, row_plateau, Best, Cell, GridSpec, PlateauBox, PotentSurface, Surface,
    SurfaceSummary, MAX_SURFACE_CELLS,
};
use spincool_core::SpinSystem;

/// A rayon pool with `threads` workers; 0 means one per core.
pub fn pool(threads: usize) -> anyhow::Result<rayon::ThreadPool> {
    Ok(rayon::ThreadPoolBuilder::new().num_threads(threads).build()?)
}

fn scan(surface: &PotentSurface, grid: &GridSpec) -> spincool_core::Result<SurfaceSummary> {
    let rows = 0..surface.n_t1();
    let best = rows
        .clone()
        .into_par_iter()
        .map(|i| row_best(surface, i))
        .reduce(|| Best::NONE, Best::merge);
    let threshold = plateau_threshold(best.value);
    let plateau = rows
        .into_par_iter()
        .map(|i| row_plateau(surface, i, threshold))
        .reduce(|| PlateauBox::EMPTY, PlateauBox::merge);
    SurfaceSummary::from_reductions(surface, grid, best, plateau)
}

pub fn par_grid_scan(
    system: &SpinSystem,
    transfers: &TransferModel,
    grid: &GridSpec,
    threads: usize,
) -> anyhow::Result<SurfaceSummary> {
    let surface = PotentSurface::new(system, transfers, grid)?;
    Ok(pool(threads)?.install(|| scan(&surface, grid))?)
}

pub fn par_grid_search(
    system: &SpinSystem,
    transfers: &TransferModel,
    grid: &GridSpec,
    threads: usize,
) -> anyhow::Result<Surface> {
    let n = grid.n_cells();
    if n > MAX_SURFACE_CELLS {
        anyhow::bail!("{n} cells exceed the {MAX_SURFACE_CELLS}-cell limit for a stored surface; request a summary instead");
    }
    let surface = PotentSurface::new(system, transfers, grid)?;
    let (summary, rows) = pool(threads)?.install(|| {
        let rows: Vec<Vec<Cell>> = (0..surface.n_t1())
            .into_par_iter()
            .map(|i| {
                (0..surface.n_t2())
                    .map(|j| {
                        let biases = surface.biases(i, j);
                        Cell {
                            t1: grid.t(i),
                            t2: grid.t(j),
                            value: grid.objective.value(&biases),
                            biases,
                        }
                    })
                    .collect()
            })
            .collect();
        (scan(&surface, grid), rows)
    });
    Ok(Surface {
        summary: summary?,
        spins: system.names(),
        cells: rows.into_iter().flatten().collect(),
    })
}
