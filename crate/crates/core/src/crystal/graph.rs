use serde::{Deserialize, Serialize};

use super::neighbors::{neighbor_list, Neighbor};
use crate::chemio::CrystalStructure;

pub const DEFAULT_GAUSSIAN_STEP: f64 = 0.2;
pub const DEFAULT_GAUSSIAN_WIDTH: f64 = 0.2;

/// Gaussian distance-expansion parameters. Centers are `start + k·step`
/// for every k with the center not beyond `stop`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianBasis {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
    pub width: f64,
}

impl GaussianBasis {
    pub fn len(&self) -> usize {
        ((self.stop - self.start) / self.step + 1e-9).floor() as usize + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn centers(&self) -> Vec<f64> {
        (0..self.len()).map(|k| self.start + k as f64 * self.step).collect()
    }

    /// exp(−(d − μₖ)² / width²) for every center μₖ.
    pub fn expand(&self, d: f64) -> Vec<f64> {
        self.centers()
            .into_iter()
            .map(|mu| (-((d - mu) / self.width).powi(2)).exp())
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CrystalGraph {
    pub node_z: Vec<u8>,
    pub edges: Vec<Neighbor>,
    pub gauss: GaussianBasis,
}

impl CrystalGraph {
    pub fn edges_of(&self, i: usize) -> impl Iterator<Item = &Neighbor> {
        self.edges.iter().filter(move |e| e.i == i)
    }
}

/// Radius graph over periodic images with at most `max_neighbors` edges per
/// node. Edges keep raw distances; expansion happens at export.
pub fn build_crystal_graph(
    s: &CrystalStructure,
    cutoff: f64,
    max_neighbors: usize,
    gaussian_step: f64,
    gaussian_width: f64,
) -> CrystalGraph {
    CrystalGraph {
        node_z: s.elements(),
        edges: neighbor_list(s, cutoff, max_neighbors),
        gauss: GaussianBasis {
            start: 0.0,
            stop: cutoff,
            step: gaussian_step,
            width: gaussian_width,
        },
    }
}
