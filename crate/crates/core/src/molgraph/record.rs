use std::fmt;

use serde::{Deserialize, Serialize};

use super::MolGraphError;
use crate::chemio::MoleculeGraph;
use crate::elements::MAX_Z;
use crate::rng::RngState;

/// Atom-type index reserved for masked nodes; one past the last element.
pub const MASK_INDEX: u8 = MAX_Z + 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Original,
    AtomMask,
    BondDelete,
    Substructure,
}

impl Provenance {
    pub fn as_str(self) -> &'static str {
        match self {
            Provenance::Original => "original",
            Provenance::AtomMask => "atom_mask",
            Provenance::BondDelete => "bond_delete",
            Provenance::Substructure => "substructure",
        }
    }
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct NodeFeature {
    /// Atomic number (0 for attachment points) or [`MASK_INDEX`].
    pub atom_type: u8,
    pub chirality: u8,
    pub masked: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct EdgeFeature {
    pub i: usize,
    pub j: usize,
    pub bond_type: u8,
    pub direction: u8,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MolGraphRecord {
    pub id: String,
    pub parent_id: String,
    pub provenance: Provenance,
    pub nodes: Vec<NodeFeature>,
    pub edges: Vec<EdgeFeature>,
    pub y: Vec<f64>,
    pub y_mask: Vec<u8>,
}

/// Original-provenance record; node and edge order follow the molecule.
pub fn build_graph_record(id: &str, mol: &MoleculeGraph, y: Vec<f64>, y_mask: Vec<u8>) -> MolGraphRecord {
    let nodes = mol
        .atoms()
        .iter()
        .map(|a| NodeFeature {
            atom_type: a.element,
            chirality: a.chirality.index(),
            masked: false,
        })
        .collect();
    let edges = mol
        .bonds()
        .iter()
        .map(|b| EdgeFeature {
            i: b.begin,
            j: b.end,
            bond_type: b.order.index(),
            direction: b.direction.index(),
        })
        .collect();
    MolGraphRecord {
        id: id.to_string(),
        parent_id: id.to_string(),
        provenance: Provenance::Original,
        nodes,
        edges,
        y,
        y_mask,
    }
}

fn check_ratio(ratio: f64) -> Result<(), MolGraphError> {
    if (0.0..=1.0).contains(&ratio) {
        Ok(())
    } else {
        Err(MolGraphError::BadRatio(ratio))
    }
}

fn derived(rec: &MolGraphRecord, provenance: Provenance) -> MolGraphRecord {
    MolGraphRecord {
        parent_id: rec.id.clone(),
        provenance,
        ..rec.clone()
    }
}

/// Number of nodes masked at `ratio`: `max(1, round(ratio·n))`, or 0 when
/// the ratio is 0.
pub fn mask_count(n: usize, ratio: f64) -> usize {
    if ratio == 0.0 || n == 0 {
        0
    } else {
        ((ratio * n as f64).round() as usize).clamp(1, n)
    }
}

/// Replaces the features of `mask_count(n, ratio)` distinct nodes with the
/// mask code. Edges are untouched.
pub fn mask_atoms(rec: &MolGraphRecord, ratio: f64, rng: &mut RngState) -> Result<MolGraphRecord, MolGraphError> {
    check_ratio(ratio)?;
    let mut out = derived(rec, Provenance::AtomMask);
    for i in rng.sample_indices(rec.nodes.len(), mask_count(rec.nodes.len(), ratio)) {
        out.nodes[i] = NodeFeature {
            atom_type: MASK_INDEX,
            chirality: 0,
            masked: true,
        };
    }
    Ok(out)
}

/// Removes `round(ratio·|E|)` distinct edges; survivors keep their order.
pub fn delete_bonds(rec: &MolGraphRecord, ratio: f64, rng: &mut RngState) -> Result<MolGraphRecord, MolGraphError> {
    check_ratio(ratio)?;
    let e = rec.edges.len();
    let count = ((ratio * e as f64).round() as usize).min(e);
    let mut removed = vec![false; e];
    for k in rng.sample_indices(e, count) {
        removed[k] = true;
    }
    let mut out = derived(rec, Provenance::BondDelete);
    out.edges = rec
        .edges
        .iter()
        .zip(&removed)
        .filter(|(_, &r)| !r)
        .map(|(x, _)| *x)
        .collect();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chemio::parse_smiles;

    fn rec(s: &str) -> MolGraphRecord {
        build_graph_record("m", &parse_smiles(s).unwrap(), vec![1.0], vec![1])
    }

    #[test]
    fn features() {
        let r = rec("C");
        assert_eq!(r.nodes, vec![NodeFeature { atom_type: 6, chirality: 0, masked: false }]);
        assert!(r.edges.is_empty());
        let r = rec("C=C");
        assert_eq!(r.edges, vec![EdgeFeature { i: 0, j: 1, bond_type: 1, direction: 0 }]);
        let r = rec("F/C=C/F");
        assert_eq!(r.edges[0].direction, 1);
        let r = rec("N[C@@H](C)O");
        assert_eq!(r.nodes[1].chirality, 1);
    }

    #[test]
    fn masking_counts() {
        let r = rec("CCCCCCCCCC");
        let m = mask_atoms(&r, 0.1, &mut RngState::new(1)).unwrap();
        assert_eq!(m.nodes.iter().filter(|n| n.masked).count(), 1);
        assert_eq!(m.provenance, Provenance::AtomMask);
        assert_eq!(m.parent_id, "m");
        let z = mask_atoms(&r, 0.0, &mut RngState::new(1)).unwrap();
        assert_eq!(z.nodes, r.nodes);
        let all = mask_atoms(&r, 1.0, &mut RngState::new(1)).unwrap();
        assert!(all.nodes.iter().all(|n| n.masked && n.atom_type == MASK_INDEX));
        assert!(mask_atoms(&r, 1.5, &mut RngState::new(1)).is_err());
    }

    #[test]
    fn masked_chirality_zeroed() {
        let r = rec("[C@@H](F)(Cl)Br");
        let m = mask_atoms(&r, 1.0, &mut RngState::new(3)).unwrap();
        assert_eq!(m.nodes[0].chirality, 0);
    }

    #[test]
    fn deletion_counts() {
        let r = rec("CC");
        let d = delete_bonds(&r, 1.0, &mut RngState::new(2)).unwrap();
        assert_eq!((d.nodes.len(), d.edges.len()), (2, 0));
        let b = rec("c1ccccc1");
        let d = delete_bonds(&b, 1.0 / 3.0, &mut RngState::new(2)).unwrap();
        assert_eq!(d.edges.len(), 4);
        assert_eq!(d.nodes, b.nodes);
        assert!(d.edges.iter().all(|e| b.edges.contains(e)));
        assert_eq!(delete_bonds(&b, 0.0, &mut RngState::new(2)).unwrap().edges, b.edges);
    }
}
