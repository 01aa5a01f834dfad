//! Simulators, extractors and indistinguishability experiments run as
//! drivers against the protocol state machines, plus distribution tooling.

mod experiments;
mod extract;
mod report;
mod view;

pub use experiments::{backend_equivalence_experiment, delta_law, delta_uniformity_experiment, xlaw_tv, DeltaMode};
pub use extract::{
    cheating_strategies, extract_b, extract_malicious_alice, extractor_experiment, CheatOutcome, Extraction, ExtractorReport,
};
pub use report::{tv_distance, DistributionReport, Law, Method};
pub use view::{
    for_each_two_preimage_point, ideal_oqfe, named_input, real_view, simulate_semi_honest_alice, simulator_tv_exact,
    simulator_tv_experiment, SimulatorStrategy, ViewRole, ViewSample, INPUT_NAMES, SIMULATOR_THRESHOLD,
};

use crate::lattice::LatticeError;
use crate::protocols::ProtocolError;
use crate::qsim::QsimError;
use crate::rsp::RspError;

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error("not a probability law: {0}")]
    NotADistribution(String),
    #[error("exact enumeration is infeasible at profile {0}")]
    NotEnumerable(String),
    #[error("transcript lacks a {0} message")]
    MissingMessage(&'static str),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Rsp(#[from] RspError),
    #[error(transparent)]
    Protocol(#[from] ProtocolError),
    #[error(transparent)]
    Qsim(#[from] QsimError),
    #[error(transparent)]
    Channel(#[from] crate::channel::ChannelError),
}

#[cfg(test)]
mod tests;
