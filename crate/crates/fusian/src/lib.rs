//! Continuous intensity control over a bipolar trait by fusing low-rank
//! adapter checkpoints collected along a fine-tuning trajectory.
//!
//! The pipeline has two stages. Stage one mines a fine-tuning run: every
//! gradient update is checkpointed as a flattened adapter delta, scored on a
//! Likert questionnaire, and filtered into a stable basis that spans the
//! observed intensity range. Stage two trains a small policy network with
//! REINFORCE: the policy maps a numeric target intensity to the concentration
//! parameters of a Dirichlet distribution, mixing weights are sampled from it,
//! the basis adapters are fused by those weights, and the reward is a sharp
//! function of how close the fused model's measured intensity lands to the
//! target.
//!
//! Everything runs at desk scale against pluggable [`envs::Environment`]
//! implementations: an analytic warped intensity map with a brute-force
//! simplex oracle, and a toy trainable scorer that produces a genuine
//! fine-tuning trajectory.
//!
//! See the crate `examples/` directory for one runnable example per
//! capability, and the `fusian` binary for the file-based pipeline
//! (`collect`, `select`, `train`, `eval`, `ablate`, `oracle`).

pub mod adapter;
pub mod dirichlet;
pub mod envs;
pub mod manifest;
pub mod metrics;
pub mod pipeline;
pub mod policy;
pub mod scoring;
pub mod seed;
pub mod selection;
pub mod special;
pub mod trainer;

mod jsonio;

pub use adapter::{fuse_adapters, Adapter, BasisSet, Checkpoint, TrajectoryLibrary};
pub use envs::{AnalyticEnv, AnalyticEnvConfig, Environment, ToySftConfig, ToySftEnv};
pub use metrics::EvalReport;
pub use policy::{normalize_target, ConcentrationVector, PolicyParams};
pub use scoring::{trait_percentage, LikertResponse, Pole};
pub use selection::SelectionConfig;
pub use trainer::{train_policy, RewardConfig, TrainConfig};
