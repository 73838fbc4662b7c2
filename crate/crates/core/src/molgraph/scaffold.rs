use crate::chemio::molecule::implicit_hydrogens;
use crate::chemio::{write_smiles, MoleculeGraph};

/// Bemis–Murcko framework: repeatedly strips non-ring atoms of degree ≤ 1.
/// Atoms that lose neighbors take the freed valence back as hydrogens
/// (aromatic organic atoms re-derive their count from valence rules).
/// Acyclic molecules give the empty graph.
pub fn murcko_scaffold(mol: &MoleculeGraph) -> MoleculeGraph {
    let ring = mol.ring_atoms();
    let n = mol.atom_count();
    let mut alive = vec![true; n];
    let mut degree: Vec<usize> = (0..n).map(|i| mol.degree(i)).collect();
    let mut stack: Vec<usize> = (0..n).filter(|&i| !ring[i] && degree[i] <= 1).collect();
    while let Some(i) = stack.pop() {
        if !alive[i] {
            continue;
        }
        alive[i] = false;
        for &(nbr, _) in mol.neighbors(i) {
            if alive[nbr] {
                degree[nbr] -= 1;
                if !ring[nbr] && degree[nbr] <= 1 {
                    stack.push(nbr);
                }
            }
        }
    }
    let keep: Vec<usize> = (0..n).filter(|&i| alive[i]).collect();
    let (mut g, map) = mol.induced(&keep);
    for &old in &keep {
        let new = map[old].expect("kept atom is mapped");
        let freed: u8 = mol
            .neighbors(old)
            .iter()
            .filter(|(nbr, _)| !alive[*nbr])
            .map(|&(_, b)| mol.bond(b).order.valence())
            .sum();
        if freed == 0 {
            continue;
        }
        let sum = g.valence_sum(new);
        let atom = g.atom(new).clone();
        let h = if atom.aromatic && atom.formal_charge == 0 {
            implicit_hydrogens(atom.element, true, sum).ok()
        } else {
            None
        };
        g.atom_mut(new).explicit_h = h.unwrap_or(atom.explicit_h + freed);
    }
    g
}

/// Canonical SMILES of the scaffold; empty for acyclic molecules.
pub fn scaffold_key(mol: &MoleculeGraph) -> String {
    write_smiles(&murcko_scaffold(mol))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chemio::parse_smiles;

    fn key(s: &str) -> String {
        scaffold_key(&parse_smiles(s).unwrap())
    }

    #[test]
    fn examples() {
        assert_eq!(key("Cc1ccccc1"), "c1ccccc1");
        assert_eq!(key("CCCCCC"), "");
        assert_eq!(key("c1ccccc1"), "c1ccccc1");
        assert_eq!(key("CC(=O)Nc1ccccc1"), "c1ccccc1");
        assert_eq!(key("c1ccccc1CCc1ccccc1"), key("c1ccc(cc1)CCc1ccccc1"));
        assert_eq!(key("O=C1CCCCC1"), "C1CCCCC1");
    }

    #[test]
    fn idempotent() {
        for s in ["Cc1ccccc1C(=O)O", "c1ccc2ccccc2c1CCN1CCOCC1", "O=c1cccc[nH]1", "CCCC"] {
            let once = murcko_scaffold(&parse_smiles(s).unwrap());
            assert_eq!(write_smiles(&murcko_scaffold(&once)), write_smiles(&once));
        }
    }
}
