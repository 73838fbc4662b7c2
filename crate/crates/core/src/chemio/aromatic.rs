//! Hückel aromaticity perception for rings written in Kekulé form.
//!
//! Lowercase input is trusted as-is. For every 5–7 membered ring that is not
//! already fully aromatic, each ring atom must contribute a π-electron count;
//! rings whose total is 4n+2 become aromatic. Passes repeat so fused systems
//! (naphthalene with the fusion bond written single) are picked up once a
//! neighboring ring has been flagged.

use std::collections::BTreeSet;

use super::molecule::{BondOrder, MoleculeGraph};

const MIN_RING: usize = 5;
const MAX_RING: usize = 7;

pub(crate) fn perceive_aromaticity(mol: &mut MoleculeGraph) {
    let cycles = small_cycles(mol);
    if cycles.is_empty() {
        return;
    }
    let ring_bonds = mol.ring_bonds();
    loop {
        let mut changed = false;
        for (atoms, bonds) in &cycles {
            let done = atoms.iter().all(|&a| mol.atom(a).aromatic)
                && bonds.iter().all(|&b| mol.bond(b).order == BondOrder::Aromatic);
            if done {
                continue;
            }
            let Some(electrons) = atoms
                .iter()
                .map(|&a| pi_electrons(mol, a, bonds, &ring_bonds))
                .sum::<Option<u32>>()
            else {
                continue;
            };
            if electrons % 4 == 2 {
                for &a in atoms {
                    mol.atom_mut(a).aromatic = true;
                }
                for &b in bonds {
                    mol.set_bond_order(b, BondOrder::Aromatic);
                }
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
}

fn pi_electrons(mol: &MoleculeGraph, a: usize, ring: &[usize], ring_bonds: &[bool]) -> Option<u32> {
    let atom = mol.atom(a);
    if atom.aromatic {
        return Some(1);
    }
    let mut in_ring_double = false;
    let mut exo_double: Option<usize> = None;
    for &(_, b) in mol.neighbors(a) {
        match mol.bond(b).order {
            BondOrder::Triple => return None,
            BondOrder::Double if ring.contains(&b) => in_ring_double = true,
            BondOrder::Double => exo_double = Some(b),
            _ => {}
        }
    }
    if in_ring_double {
        return Some(1);
    }
    if let Some(b) = exo_double {
        let partner = mol.bond(b).other(a);
        return match mol.atom(partner).element {
            7 | 8 | 16 => Some(0),
            // exocyclic C=C into a fused ring
            6 if ring_bonds[b] => Some(1),
            _ => None,
        };
    }
    let connections = mol.degree(a) + usize::from(atom.explicit_h);
    match (atom.element, atom.formal_charge) {
        (6, -1) => Some(2),
        (6, 1) => Some(0),
        (7 | 15, 0) if connections == 3 => Some(2),
        (8 | 16 | 34, 0) if connections == 2 => Some(2),
        (5, 0) if connections == 3 => Some(0),
        _ => None,
    }
}

/// Simple cycles of ring size MIN_RING..=MAX_RING as (atoms, bonds), ordered
/// by size and then by sorted atom list.
fn small_cycles(mol: &MoleculeGraph) -> Vec<(Vec<usize>, Vec<usize>)> {
    let ring_bonds = mol.ring_bonds();
    let mut seen: BTreeSet<(usize, Vec<usize>)> = BTreeSet::new();
    let mut out = Vec::new();
    for start in 0..mol.atom_count() {
        let mut path = vec![start];
        let mut path_bonds = Vec::new();
        extend(mol, &ring_bonds, start, &mut path, &mut path_bonds, &mut |atoms, bonds| {
            let mut key = atoms.to_vec();
            key.sort_unstable();
            if seen.insert((key.len(), key)) {
                out.push((atoms.to_vec(), bonds.to_vec()));
            }
        });
    }
    out.sort_by(|x, y| {
        let mut kx = x.0.clone();
        kx.sort_unstable();
        let mut ky = y.0.clone();
        ky.sort_unstable();
        (kx.len(), kx).cmp(&(ky.len(), ky))
    });
    out
}

fn extend(
    mol: &MoleculeGraph,
    ring_bonds: &[bool],
    start: usize,
    path: &mut Vec<usize>,
    path_bonds: &mut Vec<usize>,
    emit: &mut dyn FnMut(&[usize], &[usize]),
) {
    let last = *path.last().expect("non-empty path");
    for &(nbr, b) in mol.neighbors(last) {
        if !ring_bonds[b] {
            continue;
        }
        if nbr == start && path.len() >= MIN_RING {
            path_bonds.push(b);
            emit(path, path_bonds);
            path_bonds.pop();
            continue;
        }
        // only walk through atoms with index above the start so each cycle
        // is rooted at its smallest atom
        if nbr <= start || path.contains(&nbr) || path.len() >= MAX_RING {
            continue;
        }
        path.push(nbr);
        path_bonds.push(b);
        extend(mol, ring_bonds, start, path, path_bonds, emit);
        path.pop();
        path_bonds.pop();
    }
}
