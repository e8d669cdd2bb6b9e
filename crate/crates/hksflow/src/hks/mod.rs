//! Functional hybrid key switching: parameters, keys, the ModUp/ModDown
//! pipeline, closed-form operation counts and a big-integer verifier.

mod keys;
mod ops;
mod params;
mod pipeline;
pub mod verify;

pub use keys::{keygen, EvaluationKey, NoiseModel, SecretKey};
pub use ops::{count_ops, OpCounts, StageOps};
pub use params::{digit_partition, HksParams};
pub use pipeline::{apply_evk, digit_decompose, hybrid_key_switch, moddown, modup, modup_reduce};
pub use verify::{check_evaluation_key, check_key_switch, EvkFault, IdentityCheck, NoiseBound};

use crate::rns::RnsError;

#[derive(Debug, thiserror::Error)]
pub enum HksError {
    #[error("invalid parameters: {0}")]
    Params(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error(transparent)]
    Rns(#[from] RnsError),
}
