//! Experiment configuration files.
//!
//! ```toml
//! [system]
//! reference_bias = 1.02e-5
//! temperature_kelvin = 296.0
//!
//! [[system.spins]]
//! name = "C1"
//! eq_bias = 1.0
//! t1_seconds = 43.0
//! role = "computation"
//!
//! # ... C2, H
//!
//! [protocol]
//! name = "potent"
//! t1 = 9.604
//! t2 = 8.239
//!
//! [[outputs]]
//! kind = "report"
//! path = "report.json"
//! ```

use std::collections::HashSet;
use std::path::Path;

use serde::{Deserialize, Serialize};
use spincool_core::algorithms::{CompressionMode, PtModel, TransferModel};
use spincool_core::gates::GateSpec;
use spincool_core::optimizer::{GridSpec, Objective};
use spincool_core::sequence::{StateModel, Step};
use spincool_core::SpinSystem;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error(transparent)]
    Parse(#[from] toml::de::Error),
    #[error("invalid config: {0}")]
    Invalid(String),
    #[error(transparent)]
    Core(#[from] spincool_core::Error),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub system: SpinSystem,
    pub protocol: Protocol,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridConfig>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub outputs: Vec<OutputConfig>,
}

/// Transfer efficiencies; omitted values take the measured TCE defaults when
/// `pt_model` is practical.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TransferConfig {
    #[serde(default)]
    pub pt_model: PtModel,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub efficiencies: Option<[f64; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub efficiency_errs: Option<[f64; 3]>,
    #[serde(default)]
    pub state_model: StateModel,
}

impl TransferConfig {
    pub fn transfer_model(&self) -> TransferModel {
        let mut tm = match self.pt_model {
            PtModel::Ideal => TransferModel::ideal(),
            PtModel::Practical => TransferModel::practical(),
        };
        if let Some(f) = self.efficiencies {
            tm.efficiencies = f;
        }
        if let Some(e) = self.efficiency_errs {
            tm.efficiency_errs = e;
        }
        tm
    }
}

fn default_reset_bias() -> f64 {
    1.0
}

fn default_five() -> usize {
    5
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum Protocol {
    Potent {
        t1: f64,
        t2: f64,
        #[serde(flatten)]
        transfers: TransferConfig,
    },
    SingleReset {
        target: String,
        t: f64,
        #[serde(flatten)]
        transfers: TransferConfig,
    },
    TruncatedPotent {
        t1: f64,
        #[serde(default)]
        t2: f64,
        #[serde(flatten)]
        transfers: TransferConfig,
    },
    Pac2 {
        n_spins: usize,
        #[serde(default = "default_reset_bias")]
        reset_bias: f64,
    },
    OptimalAc {
        n_spins: usize,
    },
    Fernandez {
        rounds: usize,
    },
    Pac2FiniteR {
        r: f64,
        d: f64,
        #[serde(default = "default_five")]
        n_spins: usize,
    },
    CompressTce {
        mode: CompressionMode,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        biases: Option<Vec<f64>>,
    },
    Sequence {
        steps: Vec<StepConfig>,
        #[serde(default)]
        state_model: StateModel,
    },
}

/// Protocol names with their parameters and defaults, for `list-protocols`.
pub const PROTOCOLS: &[(&str, &str)] = &[
    ("potent", "t1, t2 [s]; pt_model = ideal|practical (ideal); efficiencies, efficiency_errs (0.92/0.69/0.74 ± 0.02/0.01/0.01); state_model = marginals-only|full-state (marginals-only)"),
    ("single_reset", "target (spin name), t [s]; transfer options as potent"),
    ("truncated_potent", "t1 [s], t2 [s] (0); transfer options as potent"),
    ("pac2", "n_spins (odd, >= 3), reset_bias (1)"),
    ("optimal_ac", "n_spins (>= 2)"),
    ("fernandez", "rounds"),
    ("pac2_finite_r", "r, d, n_spins (5)"),
    ("compress_tce", "mode = three-b-comp|optimal, biases ([4, 4, 4])"),
    ("sequence", "steps = [{op = PT|WAIT|RESET|NOT|CNOT|SWAP|CSWAP|THREE_B_COMP|PERMUTATION, ...}], state_model (marginals-only)"),
];

impl Protocol {
    pub fn name(&self) -> &'static str {
        match self {
            Protocol::Potent { .. } => "potent",
            Protocol::SingleReset { .. } => "single_reset",
            Protocol::TruncatedPotent { .. } => "truncated_potent",
            Protocol::Pac2 { .. } => "pac2",
            Protocol::OptimalAc { .. } => "optimal_ac",
            Protocol::Fernandez { .. } => "fernandez",
            Protocol::Pac2FiniteR { .. } => "pac2_finite_r",
            Protocol::CompressTce { .. } => "compress_tce",
            Protocol::Sequence { .. } => "sequence",
        }
    }

    /// Transfer settings of the POTENT-family protocols.
    pub fn transfers(&self) -> Option<&TransferConfig> {
        match self {
            Protocol::Potent { transfers, .. }
            | Protocol::SingleReset { transfers, .. }
            | Protocol::TruncatedPotent { transfers, .. } => Some(transfers),
            _ => None,
        }
    }
}

/// One sequence step; spins are referenced by name.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum StepConfig {
    Pt {
        source: String,
        target: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        efficiency: Option<f64>,
    },
    Wait {
        seconds: f64,
    },
    Reset {
        spins: Vec<String>,
    },
    Not {
        target: String,
    },
    Cnot {
        control: String,
        target: String,
    },
    Swap {
        a: String,
        b: String,
    },
    Cswap {
        control: String,
        a: String,
        b: String,
    },
    ThreeBComp {
        a: String,
        b: String,
        c: String,
    },
    Permutation {
        targets: Vec<String>,
        table: Vec<usize>,
    },
}

impl StepConfig {
    pub fn resolve(&self, system: &SpinSystem) -> Result<Step, ConfigError> {
        let ix = |name: &str| system.index_of(name);
        let step = match self {
            StepConfig::Pt {
                source,
                target,
                efficiency,
            } => Step::Transfer {
                source: ix(source)?,
                target: ix(target)?,
                efficiency: efficiency.unwrap_or(1.0),
            },
            StepConfig::Wait { seconds } => Step::Wait(*seconds),
            StepConfig::Reset { spins } => Step::Reset(spins.iter().map(|s| ix(s)).collect::<Result<_, _>>()?),
            StepConfig::Not { target } => Step::Gate(GateSpec::Not { target: ix(target)? }),
            StepConfig::Cnot { control, target } => Step::Gate(GateSpec::Cnot {
                control: ix(control)?,
                target: ix(target)?,
            }),
            StepConfig::Swap { a, b } => Step::Gate(GateSpec::Swap { a: ix(a)?, b: ix(b)? }),
            StepConfig::Cswap { control, a, b } => Step::Gate(GateSpec::Cswap {
                control: ix(control)?,
                a: ix(a)?,
                b: ix(b)?,
            }),
            StepConfig::ThreeBComp { a, b, c } => Step::Gate(GateSpec::ThreeBComp {
                a: ix(a)?,
                b: ix(b)?,
                c: ix(c)?,
            }),
            StepConfig::Permutation { targets, table } => Step::Gate(GateSpec::Permutation {
                targets: targets.iter().map(|s| ix(s)).collect::<Result<_, _>>()?,
                table: table.clone(),
            }),
        };
        step.validate(system.n_spins())?;
        Ok(step)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ObjectiveConfig {
    #[default]
    TotalIc,
    PairIc {
        spins: [String; 2],
    },
    SingleBias {
        spin: String,
    },
}

/// Delay mesh for the POTENT-family protocols. Maxima default to five reset-spin T1s.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t1_max: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t2_max: Option<f64>,
    pub step: f64,
    #[serde(default)]
    pub objective: ObjectiveConfig,
}

impl GridConfig {
    pub fn objective(&self, system: &SpinSystem) -> Result<Objective, ConfigError> {
        Ok(match &self.objective {
            ObjectiveConfig::TotalIc => Objective::TotalIc,
            ObjectiveConfig::PairIc { spins } => Objective::PairIc {
                a: system.index_of(&spins[0])?,
                b: system.index_of(&spins[1])?,
            },
            ObjectiveConfig::SingleBias { spin } => Objective::SingleBias {
                spin: system.index_of(spin)?,
            },
        })
    }

    pub fn grid_spec(&self, system: &SpinSystem) -> Result<GridSpec, ConfigError> {
        let objective = self.objective(system)?;
        let default = GridSpec::default_for(system, self.step, objective)?;
        Ok(GridSpec::new(
            self.t1_max.unwrap_or(default.t1_max),
            self.t2_max.unwrap_or(default.t2_max),
            self.step,
            objective,
        )?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OutputKind {
    /// Protocol result as JSON.
    Report,
    /// Every grid cell, CSV or JSON.
    Surface,
    /// Grid argmax and plateau as JSON.
    Summary,
    /// The reproduction table as text.
    Golden,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub kind: OutputKind,
    pub path: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let cfg: Self = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config types always serialize")
    }

    /// Checks spin references, grid applicability and output paths.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let invalid = |m: String| Err(ConfigError::Invalid(m));
        match &self.protocol {
            Protocol::SingleReset { target, .. } => {
                self.system.index_of(target)?;
            }
            Protocol::Sequence { steps, .. } => {
                for s in steps {
                    s.resolve(&self.system)?;
                }
            }
            _ => {}
        }
        if let Some(t) = self.protocol.transfers() {
            t.transfer_model().validate()?;
        }
        if let Some(grid) = &self.grid {
            if !matches!(self.protocol, Protocol::Potent { .. } | Protocol::TruncatedPotent { .. }) {
                return invalid(format!("a grid needs a potent protocol, not {}", self.protocol.name()));
            }
            grid.grid_spec(&self.system)?;
        }
        let mut seen = HashSet::new();
        for out in &self.outputs {
            if !seen.insert(out.path.as_str()) {
                return invalid(format!("output path {:?} listed twice", out.path));
            }
            if matches!(out.kind, OutputKind::Surface | OutputKind::Summary) && self.grid.is_none() {
                return invalid(format!("{:?} output {:?} needs a [grid] section", out.kind, out.path));
            }
        }
        Ok(())
    }
}
