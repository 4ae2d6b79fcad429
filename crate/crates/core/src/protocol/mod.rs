//! Protocol scripts, their executor, the built-in pipelines and the
//! closed-form reference states they are compared against.

mod builders;
mod exec;
mod reference;
mod script;

pub use builders::{
    cluster_2d, cluster_2d_script, linear_cluster, linear_cluster_script, ring_graph, ring_graph_script, tag_chain,
    tag_chain_script, tag_chain_script_capped, MAX_CHAIN, MAX_RING, MIN_RING,
};
pub use exec::{execute, ProtocolTrace, RemovalRecord, StepRecord, SNAPSHOT_CAP};
pub use reference::{chain_coefficient, reference_state, ReferenceContext, ReferenceFamily, ALL_FAMILIES};
pub use script::{
    CavityInit, Declaration, Located, PaperTable, PhaseExpr, Script, Setting, Step, StepKind, TimeExpr,
};
