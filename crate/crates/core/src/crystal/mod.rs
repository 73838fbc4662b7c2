//! Crystal augmentations, periodic neighbor search, crystal graphs and the
//! AGNI-style radial fingerprint.

use thiserror::Error;

pub mod agni;
pub mod augment;
pub mod graph;
pub mod neighbors;
pub mod transforms;

pub use agni::{agni_fingerprint, AGNI_LEN};
pub use augment::{augment_crystal, augmented_file_name, parse_strategies, Strategy, TransformParams};
pub use graph::{build_crystal_graph, CrystalGraph, GaussianBasis};
pub use neighbors::{neighbor_list, pair_distance, Neighbor, DEFAULT_CUTOFF, DEFAULT_MAX_NEIGHBORS};
pub use transforms::{perturb, rotate, rotate_traced, supercell, swap_axes, swap_axes_pair, translate_sites, AxisPair};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CrystalError {
    #[error("supercell scale {0:?} has a component below 1")]
    BadScale([u32; 3]),
    #[error("displacement bound {0} must be finite and non-negative")]
    BadDistance(f64),
    #[error("site fraction {0} must lie in (0, 1]")]
    BadFraction(f64),
    #[error("unknown augmentation strategy {0:?}")]
    UnknownStrategy(String),
    #[error("empty strategy list")]
    NoStrategies,
}
