//! Model-ready molecular graphs and their augmentations: atom masking, bond
//! deletion, BRICS fragmentation, substructure removal, Murcko scaffolds.

use thiserror::Error;

pub mod brics;
pub mod record;
pub mod scaffold;
mod substructure;

pub use brics::{brics_bonds, brics_fragments, split_at_bond, BricsBond, BricsRules, Environment, Fragment, FragmentTree, RulePair, DEFAULT_MAX_DEPTH};
pub use record::{
    build_graph_record, delete_bonds, mask_atoms, mask_count, EdgeFeature, MolGraphRecord, NodeFeature, Provenance,
    MASK_INDEX,
};
pub use scaffold::{murcko_scaffold, scaffold_key};
pub use substructure::{fragment_record, remove_substructure, substructure_records};

pub const DEFAULT_MASK_RATIO: f64 = 0.1;
pub const DEFAULT_BOND_RATIO: f64 = 0.1;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MolGraphError {
    #[error("ratio {0} outside [0, 1]")]
    BadRatio(f64),
    #[error("BRICS rule table line {line}: {message}")]
    BadRuleTable { line: usize, message: String },
}
