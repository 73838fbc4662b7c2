use std::fmt;
use std::str::FromStr;

use super::transforms::{
    perturb, rotate, supercell, swap_axes, translate_sites, DEFAULT_MAX_DIST, DEFAULT_TRANSLATE_FRACTION,
};
use super::CrystalError;
use crate::chemio::CrystalStructure;
use crate::rng::RngState;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Strategy {
    Perturb,
    Rotate,
    SwapAxes,
    Translate,
    Supercell,
}

impl Strategy {
    pub const ALL: [Strategy; 5] = [
        Strategy::Perturb,
        Strategy::Rotate,
        Strategy::SwapAxes,
        Strategy::Translate,
        Strategy::Supercell,
    ];

    pub const DEFAULT: [Strategy; 3] = [Strategy::Perturb, Strategy::Rotate, Strategy::SwapAxes];

    pub fn name(self) -> &'static str {
        match self {
            Strategy::Perturb => "perturb",
            Strategy::Rotate => "rotate",
            Strategy::SwapAxes => "swap_axes",
            Strategy::Translate => "translate",
            Strategy::Supercell => "supercell",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Strategy {
    type Err = CrystalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Strategy::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| CrystalError::UnknownStrategy(s.to_string()))
    }
}

/// Parses a comma-separated strategy list such as `perturb,rotate,swap_axes`.
/// An empty string yields an empty list.
pub fn parse_strategies(text: &str) -> Result<Vec<Strategy>, CrystalError> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(str::parse)
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransformParams {
    pub max_dist: f64,
    pub translate_fraction: f64,
    pub supercell_scale: [u32; 3],
}

impl Default for TransformParams {
    fn default() -> Self {
        TransformParams {
            max_dist: DEFAULT_MAX_DIST,
            translate_fraction: DEFAULT_TRANSLATE_FRACTION,
            supercell_scale: [2, 2, 2],
        }
    }
}

pub fn apply_strategy(
    s: &CrystalStructure,
    strategy: Strategy,
    rng: &mut RngState,
    params: &TransformParams,
) -> Result<CrystalStructure, CrystalError> {
    match strategy {
        Strategy::Perturb => perturb(s, rng, params.max_dist),
        Strategy::Rotate => rotate(s, rng, params.max_dist),
        Strategy::SwapAxes => Ok(swap_axes(s, rng)),
        Strategy::Translate => translate_sites(s, rng, params.translate_fraction, params.max_dist),
        Strategy::Supercell => supercell(s, params.supercell_scale),
    }
}

/// One augmented structure per strategy, in list order. Each strategy draws
/// from its own stream seeded by `seed ^ hash(id, strategy name)`.
pub fn augment_crystal(
    s: &CrystalStructure,
    id: &str,
    strategies: &[Strategy],
    seed: u64,
    params: &TransformParams,
) -> Result<Vec<(Strategy, CrystalStructure)>, CrystalError> {
    if strategies.is_empty() {
        return Err(CrystalError::NoStrategies);
    }
    strategies
        .iter()
        .map(|&k| {
            let mut rng = RngState::derived(seed, id, k.name());
            apply_strategy(s, k, &mut rng, params).map(|out| (k, out))
        })
        .collect()
}

/// `<stem>__<strategy>.cif`
pub fn augmented_file_name(stem: &str, strategy: Strategy) -> String {
    format!("{stem}__{}.cif", strategy.name())
}
