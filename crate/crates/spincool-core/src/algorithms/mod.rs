//! Cooling protocols: heat-bath cooling by selective resets, compression on
//! TCE, and the algorithmic-cooling bias ladders.

mod compression;
mod ladders;
mod potent;

pub use compression::{compression_on_tce, CompressionMode};
pub use ladders::{
    fernandez_iterate, optimal_ac_ladder, pac2_finite_r, pac2_finite_r_n, pac2_ladder, pac2_schedule,
    LadderResult, Pac2Op, Pac2Schedule,
};
pub use potent::{
    potent, potent_steps, single_selective_reset, truncated_potent, PotentParams, PtModel, TceRoles,
    TransferModel,
};
