//! Chemical-structure data augmentation.
//!
//! Crystal transforms and graphs live in [`crystal`], molecular graph
//! augmentations and BRICS in [`molgraph`], fingerprints in [`fingerprint`],
//! and splitting/export in [`pipeline`]. All randomness flows through
//! [`rng::RngState`], seeded per record so results do not depend on
//! scheduling.

pub mod chemio;
pub mod crystal;
pub mod elements;
pub mod fingerprint;
pub mod hash;
pub mod molgraph;
pub mod pipeline;
pub mod rng;
