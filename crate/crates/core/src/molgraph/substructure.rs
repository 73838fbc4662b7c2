use super::brics::FragmentTree;
use super::record::{build_graph_record, MolGraphRecord, Provenance};
use crate::rng::RngState;

/// Graph record for tree node `index`, inheriting `parent`'s labels.
pub fn fragment_record(parent: &MolGraphRecord, tree: &FragmentTree, index: usize) -> MolGraphRecord {
    let mut rec = build_graph_record(&parent.id, &tree.nodes[index].mol, parent.y.clone(), parent.y_mask.clone());
    rec.provenance = Provenance::Substructure;
    rec
}

/// One fragment of `tree`, chosen uniformly, as a record carrying the
/// parent's labels. A tree without fragments returns `parent` unchanged.
pub fn remove_substructure(parent: &MolGraphRecord, tree: &FragmentTree, rng: &mut RngState) -> MolGraphRecord {
    match tree.fragment_count() {
        0 => parent.clone(),
        k => fragment_record(parent, tree, 1 + rng.below(k)),
    }
}

/// Every fragment of `tree` as a record, in tree order.
pub fn substructure_records(parent: &MolGraphRecord, tree: &FragmentTree) -> Vec<MolGraphRecord> {
    (1..tree.nodes.len()).map(|k| fragment_record(parent, tree, k)).collect()
}
