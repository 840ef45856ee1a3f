//! Capacity of finite memoryless channels with state, where the decoder
//! knows the state and the encoder causally observes it through a noisy side
//! channel.
//!
//! The crate computes the capacity with causal noisy observation (through
//! Shannon strategies and Blahut-Arimoto iteration), the no-observation and
//! perfect-observation capacities bracketing it, the generalized probing
//! capacity, the no-decoder-state variants, and a best-effort sandwich for
//! the noncausal capacity. On top of the solvers sit the noise thresholds at
//! which the observation becomes useless or stays as good as perfect, the
//! stochastic-degradation order with explicit witnesses, and checkable
//! sufficient conditions tying everything to the mutual information and
//! conditional entropy of the observation.
//!
//! Start with the runnable programs under `examples/`; the `statecap` binary
//! exposes the same functionality on the command line.

pub mod capacity;
pub mod channel;
pub mod degrade;
mod error;
pub mod gp;
pub mod prob;
pub mod probing;
mod simplex;
pub mod spec_format;
pub mod strategy;
pub mod sweep;
pub mod thresholds;

pub use capacity::{
    ba_capacity, ba_capacity_trace, capacity_causal, capacity_full_csi, capacity_no_csi,
    capacity_no_decoder_csi, Argmax, CapacitySolution,
};
pub use channel::{
    counterexample_channels, generalized_erasure, generalized_symmetric, sz_channel,
    ternary_no_collapse_channel, ternary_no_plateau_channel, xor_channel, SideChannel,
    StateChannelModel,
};
pub use degrade::{
    conditional_entropy_certificate, erasure_degradation_witness, erasure_margin, gs_inverse,
    map_estimator, ml_cover_threshold, ml_estimator, stochastic_degradation_lp,
    symmetric_degradation_condition, symmetric_degradation_threshold, DegradationVerdict,
    EstimatorChannel,
};
pub use error::{Error, Result};
pub use gp::{capacity_gp, GpSolution};
pub use prob::{
    conditional_entropy_and_mi, entropy, kl_divergence, mutual_information, nats_to_bits,
    variational_distance, JointTable, ProbVector, StochasticMatrix,
};
pub use probing::capacity_probing;
pub use spec_format::{parse_spec, serialize_spec};
pub use strategy::{
    induced_channel, perturbation_tables, PerturbationFamily, PerturbationTables, StrategyTable,
};
pub use sweep::{figure_sweep, sweep, SweepFamily, SweepOptions, SweepResult, SweepRow};
pub use thresholds::{
    erasure_breakpoint, erasure_divergence, erasure_divergence_derivative, eta, hbar,
    overline_thresholds, prop1_check, prop2_check, prop3_check, proposition_checks,
    symmetric_breakpoint, symmetric_divergence, symmetric_divergence_derivative,
    sz_overline_closed_forms, sz_underline_roots, theorem_checks, threshold_report,
    underline_epsilon, underline_q, BreakCase, Breakpoint, ConditionKey, ConditionVerdict,
    OverlineThresholds, ThresholdReport,
};
