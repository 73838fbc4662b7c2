use super::split::Partition;
use crate::crystal::CrystalGraph;
use crate::molgraph::{EdgeFeature, MolGraphRecord, NodeFeature};

/// Provenance tag of untouched records.
pub const ORIGINAL: &str = "original";

#[derive(Debug, Clone, PartialEq)]
pub enum GraphBody {
    Molecule {
        nodes: Vec<NodeFeature>,
        edges: Vec<EdgeFeature>,
    },
    Crystal(CrystalGraph),
}

impl GraphBody {
    pub fn node_count(&self) -> usize {
        match self {
            GraphBody::Molecule { nodes, .. } => nodes.len(),
            GraphBody::Crystal(g) => g.node_z.len(),
        }
    }

    /// Node type indices (atom type for molecules, Z for crystals).
    pub fn node_types(&self) -> Vec<u8> {
        match self {
            GraphBody::Molecule { nodes, .. } => nodes.iter().map(|n| n.atom_type).collect(),
            GraphBody::Crystal(g) => g.node_z.clone(),
        }
    }

    /// Directed adjacency pairs: molecular edges in both directions, crystal
    /// edges as stored (each is already one direction).
    pub fn directed_edges(&self) -> Vec<(usize, usize)> {
        match self {
            GraphBody::Molecule { edges, .. } => edges.iter().flat_map(|e| [(e.i, e.j), (e.j, e.i)]).collect(),
            GraphBody::Crystal(g) => g.edges.iter().map(|e| (e.i, e.j)).collect(),
        }
    }
}

/// A model-ready record of either kind.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphRecord {
    pub id: String,
    pub parent_id: String,
    pub provenance: String,
    pub partition: Partition,
    pub body: GraphBody,
    pub y: Vec<f64>,
    pub y_mask: Vec<u8>,
}

impl GraphRecord {
    pub fn from_molecule(rec: MolGraphRecord, id: String, partition: Partition) -> Self {
        GraphRecord {
            id,
            parent_id: rec.parent_id,
            provenance: rec.provenance.as_str().to_string(),
            partition,
            body: GraphBody::Molecule {
                nodes: rec.nodes,
                edges: rec.edges,
            },
            y: rec.y,
            y_mask: rec.y_mask,
        }
    }

    pub fn is_original(&self) -> bool {
        self.provenance == ORIGINAL
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct AugmentedDataset {
    pub records: Vec<GraphRecord>,
}

impl AugmentedDataset {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn count(&self, partition: Partition) -> usize {
        self.records.iter().filter(|r| r.partition == partition).count()
    }

    /// Augmented records tagged valid or test; empty for sound datasets.
    pub fn train_only_violations(&self) -> Vec<&GraphRecord> {
        self.records
            .iter()
            .filter(|r| !r.is_original() && r.partition != Partition::Train)
            .collect()
    }
}

/// Absent labels become value 0 with mask 0.
pub fn mask_labels(raw: &[Option<f64>]) -> (Vec<f64>, Vec<u8>) {
    raw.iter().map(|v| (v.unwrap_or(0.0), u8::from(v.is_some()))).unzip()
}
