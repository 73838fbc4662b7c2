//! Chemical file formats (SMILES, CIF, CSV label tables) and the
//! substructure-pattern language.

mod aromatic;
pub mod cif;
pub mod molecule;
pub mod pattern;
pub mod smiles;
pub mod smiles_write;
pub mod structure;
pub mod table;

pub use cif::{parse_cif, write_cif, write_cif_named, CifError};
pub use molecule::{Atom, Bond, BondDirection, BondOrder, Chirality, GraphError, MoleculeGraph};
pub use pattern::{compile_pattern, match_pattern, PatternError, PatternMatcher, SubstructurePattern};
pub use smiles::{parse_smiles, SmilesError};
pub use smiles_write::{canonical_ranks, write_smiles, write_smiles_with, WriteError, WriteOptions};
pub use structure::{wrap_unit, CrystalStructure, Lattice, Site, StructureError};
pub use table::{load_molecule_table, DroppedRow, MoleculeRecord, MoleculeTable, TableError, TaskType};
