//! Config execution and artifact rendering.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use serde::{Deserialize, Serialize};
use spincool_core::algorithms::{
    compression_on_tce, fernandez_iterate, optimal_ac_ladder, pac2_finite_r_n, pac2_ladder, potent,
    single_selective_reset, truncated_potent, LadderResult, PotentParams,
};
use spincool_core::optimizer::{pair_optimum, Objective, PairOptimum, Surface, SurfaceSummary};
use spincool_core::sequence::{self, Step};
use spincool_core::{BiasVector, ICReport};

use crate::config::{ExperimentConfig, Format, OutputKind, Protocol};
use crate::{export, golden, parallel};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Outcome {
    Report(ICReport),
    Ladder(LadderResult),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridResult {
    pub summary: SurfaceSummary,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pair: Option<PairOptimum>,
    #[serde(skip)]
    pub surface: Option<Surface>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub protocol: String,
    pub result: Outcome,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridResult>,
}

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Worker threads for grid scans; 0 means one per core.
    pub threads: usize,
    /// Overrides each surface output's format.
    pub format: Option<Format>,
    /// Base directory for relative output paths.
    pub output_dir: Option<PathBuf>,
}

pub fn execute(cfg: &ExperimentConfig, opts: &RunOptions) -> anyhow::Result<RunResult> {
    cfg.validate()?;
    let sys = &cfg.system;
    let result = match &cfg.protocol {
        Protocol::Potent { t1, t2, transfers } => Outcome::Report(potent(
            sys,
            &PotentParams {
                t1: *t1,
                t2: *t2,
                transfers: transfers.transfer_model(),
                state_model: transfers.state_model,
            },
        )?),
        Protocol::SingleReset { target, t, transfers } => Outcome::Report(single_selective_reset(
            sys,
            sys.index_of(target)?,
            *t,
            &transfers.transfer_model(),
            transfers.state_model,
        )?),
        Protocol::TruncatedPotent { t1, t2, transfers } => Outcome::Report(truncated_potent(
            sys,
            &PotentParams {
                t1: *t1,
                t2: *t2,
                transfers: transfers.transfer_model(),
                state_model: transfers.state_model,
            },
        )?),
        Protocol::Pac2 { n_spins, reset_bias } => Outcome::Ladder(pac2_ladder(*n_spins, *reset_bias)?),
        Protocol::OptimalAc { n_spins } => Outcome::Ladder(optimal_ac_ladder(*n_spins)?),
        Protocol::Fernandez { rounds } => Outcome::Ladder(fernandez_iterate(sys, *rounds)?),
        Protocol::Pac2FiniteR { r, d, n_spins } => Outcome::Ladder(pac2_finite_r_n(*n_spins, *r, *d)?),
        Protocol::CompressTce { mode, biases } => {
            let start = BiasVector::new(biases.clone().unwrap_or_else(|| vec![4.0; 3]));
            Outcome::Report(compression_on_tce(sys, &start, *mode)?)
        }
        Protocol::Sequence { steps, state_model } => {
            let steps: Vec<Step> = steps.iter().map(|s| s.resolve(sys)).collect::<Result<_, _>>()?;
            let eq = sys.equilibrium();
            let out = sequence::run(sys, &eq, &steps, *state_model)?;
            Outcome::Report(match &out.state {
                Some(state) => ICReport::from_state(sys, &eq, state),
                None => ICReport::from_biases(sys, &eq, out.biases),
            })
        }
    };

    let grid = match &cfg.grid {
        None => None,
        Some(gc) => {
            let spec = gc.grid_spec(sys)?;
            let tm = cfg
                .protocol
                .transfers()
                .map(|t| t.transfer_model())
                .context("grid needs a potent protocol")?;
            let wants_surface = cfg.outputs.iter().any(|o| o.kind == OutputKind::Surface);
            let (summary, surface) = if wants_surface {
                let s = parallel::par_grid_search(sys, &tm, &spec, opts.threads)?;
                (s.summary.clone(), Some(s))
            } else {
                (parallel::par_grid_scan(sys, &tm, &spec, opts.threads)?, None)
            };
            let pair = match spec.objective {
                Objective::PairIc { a, b } => Some(pair_optimum(sys, [a, b], summary.clone())?),
                _ => None,
            };
            Some(GridResult { summary, pair, surface })
        }
    };

    Ok(RunResult {
        protocol: cfg.protocol.name().to_string(),
        result,
        grid,
    })
}

/// Rendered output files, not yet on disk.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Artifacts {
    pub files: Vec<(PathBuf, Vec<u8>)>,
}

impl Artifacts {
    /// Writes every file through a temporary sibling and renames them only
    /// once all temporaries exist; on failure the temporaries are removed.
    pub fn write(&self) -> anyhow::Result<()> {
        let mut staged: Vec<(PathBuf, &Path)> = Vec::new();
        let outcome = (|| -> anyhow::Result<()> {
            for (path, bytes) in &self.files {
                let name = path.file_name().context("output path has no file name")?;
                let mut tmp_name = std::ffi::OsString::from(".");
                tmp_name.push(name);
                tmp_name.push(format!(".tmp-{}", std::process::id()));
                let tmp = path.with_file_name(tmp_name);
                fs::write(&tmp, bytes).with_context(|| format!("cannot write {}", path.display()))?;
                staged.push((tmp, path));
            }
            Ok(())
        })();
        if let Err(e) = outcome {
            for (tmp, _) in &staged {
                let _ = fs::remove_file(tmp);
            }
            return Err(e);
        }
        for (tmp, path) in &staged {
            fs::rename(tmp, path).with_context(|| format!("cannot move output into {}", path.display()))?;
        }
        Ok(())
    }
}

fn resolve(path: &str, opts: &RunOptions) -> PathBuf {
    match &opts.output_dir {
        Some(dir) if Path::new(path).is_relative() => dir.join(path),
        _ => PathBuf::from(path),
    }
}

pub fn render(cfg: &ExperimentConfig, run: &RunResult, opts: &RunOptions) -> anyhow::Result<Artifacts> {
    let mut files = Vec::new();
    for out in &cfg.outputs {
        let bytes = match out.kind {
            OutputKind::Report => {
                let mut s = serde_json::to_string_pretty(run)?;
                s.push('\n');
                s.into_bytes()
            }
            OutputKind::Summary => {
                let grid = run.grid.as_ref().context("summary output needs a grid")?;
                let mut s = match &grid.pair {
                    Some(p) => serde_json::to_string_pretty(p)?,
                    None => serde_json::to_string_pretty(&grid.summary)?,
                };
                s.push('\n');
                s.into_bytes()
            }
            OutputKind::Surface => {
                let surface = run
                    .grid
                    .as_ref()
                    .and_then(|g| g.surface.as_ref())
                    .context("surface output needs a grid")?;
                match opts.format.or(out.format).unwrap_or(Format::Csv) {
                    Format::Csv => export::surface_csv(surface)?.into_bytes(),
                    Format::Json => export::surface_json(surface)?.into_bytes(),
                }
            }
            OutputKind::Golden => golden::report_golden(opts.threads)?.render().into_bytes(),
        };
        files.push((resolve(&out.path, opts), bytes));
    }
    Ok(Artifacts { files })
}

/// Executes the config and renders its artifacts; nothing is written.
pub fn run_config(cfg: &ExperimentConfig, opts: &RunOptions) -> anyhow::Result<(RunResult, Artifacts)> {
    let run = execute(cfg, opts)?;
    let artifacts = render(cfg, &run, opts)?;
    if let Some(dir) = &opts.output_dir {
        if !dir.is_dir() {
            bail!("output directory {} does not exist", dir.display());
        }
    }
    Ok((run, artifacts))
}
