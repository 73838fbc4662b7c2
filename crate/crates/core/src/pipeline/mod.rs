//! Dataset splitting, train-only augmentation, label masking, JSONL export
//! and a weight-free forward pass for sanity-checking exported graphs.

use thiserror::Error;

pub mod augment;
pub mod dataset;
pub mod export;
pub mod smoke;
pub mod split;

pub use augment::{
    augment_crystals, augment_molecules, augment_training_set, crystal_graph_record, crystal_graph_records,
    fingerprint_rows, AugmentConfig, CrystalEntry, CrystalItem, FpAugConfig, FpAugMode, FpItem, GraphParams,
    InputDataset, MolAugConfig, MolAugmentation, SubstructureMode,
};
pub use dataset::{mask_labels, AugmentedDataset, GraphBody, GraphRecord, ORIGINAL};
pub use export::{export_jsonl, record_from_json, record_to_json};
pub use smoke::{smoke_forward, type_embedding, DEFAULT_DIM};
pub use split::{
    fold_sizes, kfold, random_split, random_split_sizes, scaffold_keys, scaffold_split, scaffold_split_keys,
    Partition, SplitMethod, SplitPlan,
};

use crate::crystal::CrystalError;
use crate::fingerprint::FingerprintError;
use crate::molgraph::MolGraphError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PipelineError {
    #[error("random split needs at least 5 records, got {0}")]
    TooFewRecords(usize),
    #[error("table is empty")]
    EmptyTable,
    #[error("split fractions {0:?} must be positive and sum to 1")]
    BadFractions([f64; 3]),
    #[error("k-fold needs 2 <= k <= n (k = {k}, n = {n})")]
    BadK { k: usize, n: usize },
    #[error("split plan does not partition 0..{n}")]
    PlanMismatch { n: usize },
    #[error("augmentation config does not match the dataset kind")]
    InconsistentConfig,
    #[error("record {id}: {message}")]
    BadRecord { id: String, message: String },
    #[error("malformed record {id}: {message}")]
    MalformedRecord { id: String, message: String },
    #[error(transparent)]
    Crystal(#[from] CrystalError),
    #[error(transparent)]
    MolGraph(#[from] MolGraphError),
    #[error(transparent)]
    Fingerprint(#[from] FingerprintError),
}
