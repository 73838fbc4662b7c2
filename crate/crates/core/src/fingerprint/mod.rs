//! Bit fingerprints (circular and linear-path), Tanimoto similarity, and the
//! FP Break / FP Concat augmentations. Hashing is FNV-1a 64 throughout, so
//! bit positions are reproducible across implementations.

use thiserror::Error;

pub mod augment;
pub mod bits;
pub mod dump;
pub mod generate;

pub use augment::{
    fp_break, fp_break_tree, fp_concat, fp_concat_tree, replicated_fp, tree_fingerprints, ConcatFingerprint,
    ConcatParams, DEFAULT_K, DEFAULT_N_CONCAT, DEFAULT_THRESHOLD,
};
pub use bits::{tanimoto, BitFingerprint, FpKind};
pub use dump::{header_line, FpRow};
pub use generate::{ecfp, initial_atom_codes, rdkfp, FpSpec, DEFAULT_MAX_PATH, DEFAULT_NBITS, DEFAULT_RADIUS};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FingerprintError {
    #[error("fingerprint kinds differ ({0} vs {1})")]
    KindMismatch(FpKind, FpKind),
    #[error("fingerprint lengths differ ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("bad fingerprint length {0}")]
    BadLength(usize),
    #[error("bit {bit} out of range for {nbits}-bit fingerprint")]
    BitOutOfRange { bit: usize, nbits: usize },
    #[error("path length must be at least 1")]
    BadPathLength,
    #[error("K must be at least 1")]
    BadK,
    #[error("similarity threshold {0} outside [0, 1]")]
    BadThreshold(f64),
    #[error("unknown fingerprint kind {0:?}")]
    UnknownKind(String),
    #[error("invalid hex")]
    BadHex,
    #[error("malformed fingerprint line {0:?}")]
    BadDumpLine(String),
}
