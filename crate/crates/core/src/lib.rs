//! Key-user extraction for directed interaction networks.
//!
//! The crate builds commitment-weighted networks from raw activity (for
//! example call-detail records), computes the iterative Social Position
//! measure with three interchangeable loop structures, and provides classical
//! centrality baselines, competition rankings, Kendall's coefficient and a
//! random-network benchmark harness.
//!
//! Data-parallel loops run through [`Execution`]; with the default
//! `parallel` feature they can fan out over rayon, otherwise they always run
//! sequentially. Results are identical in both modes.

pub mod bench;
pub mod cdr;
pub mod centrality;
pub mod commitment;
pub mod exec;
pub mod graph;
pub mod io;
pub mod netgen;
pub mod ranking;
pub mod spin;

pub use commitment::{
    commitment_network, redistribute_inactive, relationship_commitment, time_decayed_commitment, ActivityMatrix,
    RelCommitment, TimeDecayConfig,
};
pub use exec::Execution;
pub use graph::{
    build_network, build_network_with_members, validate_commitment, Direction, MemberId, SocialNetwork,
    ValidationReport, WeightedEdge, ROW_SUM_TOLERANCE,
};
pub use ranking::{duplicate_stats, kendall, make_ranking, sp_distribution, Ranking};
pub use spin::{check_stop, iterate_once, spin, SpVector, SpinConfig, SpinResult, StopMode, Variant};
