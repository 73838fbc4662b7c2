//! Canonical SMILES writer.
//!
//! Atoms are ranked by iterative neighborhood refinement over
//! (element, isotope, charge, degree, H count, aromatic). When refinement
//! stalls with ties, the lowest tied class is split by promoting its member
//! with the smallest original index, and refinement resumes. Output is a DFS
//! from the lowest-ranked atom of each component, visiting neighbors in rank
//! order; the last unvisited neighbor continues the main chain.
//!
//! Stereo marks (`@`, `/`, `\`) are not written.

use std::collections::BTreeMap;

use thiserror::Error;

use super::molecule::{implicit_hydrogens, organic_valences, BondOrder, MoleculeGraph};
use crate::elements;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WriteError {
    #[error("attachment-point wildcard at atom {0} while wildcard output is disabled")]
    UnsupportedFeature(usize),
}

#[derive(Debug, Clone, Copy)]
pub struct WriteOptions {
    pub allow_wildcards: bool,
}

impl Default for WriteOptions {
    fn default() -> Self {
        WriteOptions {
            allow_wildcards: true,
        }
    }
}

/// Canonical SMILES with wildcards allowed. Empty graph gives empty text.
pub fn write_smiles(mol: &MoleculeGraph) -> String {
    write_smiles_with(mol, WriteOptions::default()).expect("wildcards allowed")
}

pub fn write_smiles_with(mol: &MoleculeGraph, opts: WriteOptions) -> Result<String, WriteError> {
    if !opts.allow_wildcards {
        if let Some(i) = mol.atoms().iter().position(|a| a.is_wildcard()) {
            return Err(WriteError::UnsupportedFeature(i));
        }
    }
    let ranks = canonical_ranks(mol);
    Ok(Emitter::new(mol, &ranks).emit())
}

/// Canonical rank of every atom: a permutation of `0..n`.
pub fn canonical_ranks(mol: &MoleculeGraph) -> Vec<usize> {
    let n = mol.atom_count();
    if n == 0 {
        return Vec::new();
    }
    let initial: Vec<_> = (0..n)
        .map(|i| {
            let a = mol.atom(i);
            (a.element, a.isotope, a.formal_charge, mol.degree(i), a.explicit_h, a.aromatic)
        })
        .collect();
    let mut ranks = dense_ranks(&initial);
    loop {
        ranks = refine(mol, ranks);
        let classes = ranks.iter().max().map_or(0, |m| m + 1);
        if classes == n {
            return ranks;
        }
        // split the lowest tied class at its smallest-index member
        let mut counts = vec![0usize; classes];
        for &r in &ranks {
            counts[r] += 1;
        }
        let tied = counts.iter().position(|&c| c > 1).expect("some class is tied");
        let chosen = ranks.iter().position(|&r| r == tied).expect("member exists");
        let keys: Vec<(usize, bool)> = ranks
            .iter()
            .enumerate()
            .map(|(i, &r)| (r, i != chosen))
            .collect();
        ranks = dense_ranks(&keys);
    }
}

fn refine(mol: &MoleculeGraph, mut ranks: Vec<usize>) -> Vec<usize> {
    let n = ranks.len();
    let mut classes = ranks.iter().max().map_or(0, |m| m + 1);
    for _ in 0..2 * n {
        let keys: Vec<(usize, Vec<(usize, u8)>)> = (0..n)
            .map(|i| {
                let mut nb: Vec<(usize, u8)> = mol
                    .neighbors(i)
                    .iter()
                    .map(|&(j, b)| (ranks[j], mol.bond(b).order.code()))
                    .collect();
                nb.sort_unstable();
                (ranks[i], nb)
            })
            .collect();
        let next = dense_ranks(&keys);
        let next_classes = next.iter().max().map_or(0, |m| m + 1);
        ranks = next;
        if next_classes == classes {
            break;
        }
        classes = next_classes;
    }
    ranks
}

fn dense_ranks<K: Ord + Clone>(keys: &[K]) -> Vec<usize> {
    let mut sorted: Vec<K> = keys.to_vec();
    sorted.sort();
    sorted.dedup();
    keys.iter()
        .map(|k| sorted.binary_search(k).expect("key present"))
        .collect()
}

/// DFS frame: atom, its sorted (neighbor, bond) list, next position in that list.
type Frame = (usize, Vec<(usize, usize)>, usize);

struct Emitter<'a> {
    mol: &'a MoleculeGraph,
    ranks: &'a [usize],
    visited: Vec<bool>,
    bond_used: Vec<bool>,
    /// DFS tree: children in emission order.
    children: Vec<Vec<(usize, usize)>>,
    /// Ring-closure bonds per atom, in discovery order.
    closures: Vec<Vec<usize>>,
}

impl<'a> Emitter<'a> {
    fn new(mol: &'a MoleculeGraph, ranks: &'a [usize]) -> Self {
        let n = mol.atom_count();
        Emitter {
            mol,
            ranks,
            visited: vec![false; n],
            bond_used: vec![false; mol.bond_count()],
            children: vec![Vec::new(); n],
            closures: vec![Vec::new(); n],
        }
    }

    fn sorted_neighbors(&self, v: usize) -> Vec<(usize, usize)> {
        let mut nb = self.mol.neighbors(v).to_vec();
        nb.sort_by_key(|&(w, _)| self.ranks[w]);
        nb
    }

    fn build_tree(&mut self, root: usize) {
        // iterative DFS keeps deep chains off the call stack
        let mut stack: Vec<Frame> = Vec::new();
        self.visited[root] = true;
        let nb = self.sorted_neighbors(root);
        stack.push((root, nb, 0));
        while let Some((v, nb, slot)) = stack.last_mut() {
            let v = *v;
            if *slot >= nb.len() {
                stack.pop();
                continue;
            }
            let (w, b) = nb[*slot];
            *slot += 1;
            if self.bond_used[b] {
                continue;
            }
            self.bond_used[b] = true;
            if self.visited[w] {
                self.closures[w].push(b);
                self.closures[v].push(b);
            } else {
                self.visited[w] = true;
                self.children[v].push((w, b));
                let wn = self.sorted_neighbors(w);
                stack.push((w, wn, 0));
            }
        }
    }

    fn emit(mut self) -> String {
        let n = self.mol.atom_count();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&i| self.ranks[i]);
        let mut roots = Vec::new();
        for &i in &order {
            if !self.visited[i] {
                self.build_tree(i);
                roots.push(i);
            }
        }
        let mut out = String::new();
        let mut open: BTreeMap<usize, u32> = BTreeMap::new();
        let mut free_digits: Vec<u32> = Vec::new();
        let mut next_digit = 1u32;
        for (k, &root) in roots.iter().enumerate() {
            if k > 0 {
                out.push('.');
            }
            // explicit stack of work items
            enum Item {
                Atom(usize, Option<usize>),
                Text(&'static str),
            }
            let mut stack = vec![Item::Atom(root, None)];
            while let Some(item) = stack.pop() {
                let (v, via) = match item {
                    Item::Text(t) => {
                        out.push_str(t);
                        continue;
                    }
                    Item::Atom(v, via) => (v, via),
                };
                if let Some(b) = via {
                    out.push_str(self.bond_symbol(b));
                }
                out.push_str(&self.atom_symbol(v));
                for &b in &self.closures[v] {
                    if let Some(d) = open.remove(&b) {
                        push_digit(&mut out, d);
                        free_digits.push(d);
                        free_digits.sort_unstable_by(|a, b| b.cmp(a));
                    } else {
                        let d = free_digits.pop().unwrap_or_else(|| {
                            next_digit += 1;
                            next_digit - 1
                        });
                        out.push_str(self.bond_symbol(b));
                        push_digit(&mut out, d);
                        open.insert(b, d);
                    }
                }
                let kids = &self.children[v];
                // push in reverse so the first child is emitted first
                for (idx, &(w, b)) in kids.iter().enumerate().rev() {
                    if idx + 1 == kids.len() {
                        stack.push(Item::Atom(w, Some(b)));
                    } else {
                        stack.push(Item::Text(")"));
                        stack.push(Item::Atom(w, Some(b)));
                        stack.push(Item::Text("("));
                    }
                }
            }
        }
        out
    }

    fn bond_symbol(&self, b: usize) -> &'static str {
        let bond = self.mol.bond(b);
        let both_aromatic = self.mol.atom(bond.begin).aromatic && self.mol.atom(bond.end).aromatic;
        match bond.order {
            BondOrder::Single if both_aromatic => "-",
            BondOrder::Single => "",
            BondOrder::Double => "=",
            BondOrder::Triple => "#",
            BondOrder::Aromatic => "",
        }
    }

    fn atom_symbol(&self, i: usize) -> String {
        let a = self.mol.atom(i);
        let sym = elements::symbol(a.element).unwrap_or("*");
        let organic = a.element == 0
            || (organic_valences(a.element).is_some()
                && (!a.aromatic || matches!(a.element, 5 | 6 | 7 | 8 | 15 | 16)));
        let implicit = if a.element == 0 {
            Ok(0)
        } else {
            implicit_hydrogens(a.element, a.aromatic, self.mol.valence_sum(i))
        };
        let bare = organic && a.isotope == 0 && a.formal_charge == 0 && implicit == Ok(a.explicit_h);
        let shown = if a.aromatic { sym.to_ascii_lowercase() } else { sym.to_string() };
        if bare {
            return shown;
        }
        let mut s = String::from("[");
        if a.isotope != 0 {
            s.push_str(&a.isotope.to_string());
        }
        s.push_str(&shown);
        match a.explicit_h {
            0 => {}
            1 => s.push('H'),
            h => {
                s.push('H');
                s.push_str(&h.to_string());
            }
        }
        match a.formal_charge {
            0 => {}
            1 => s.push('+'),
            -1 => s.push('-'),
            c if c > 0 => s.push_str(&format!("+{c}")),
            c => s.push_str(&format!("-{}", -(c as i16))),
        }
        s.push(']');
        s
    }
}

fn push_digit(out: &mut String, d: u32) {
    if d < 10 {
        out.push_str(&d.to_string());
    } else {
        out.push_str(&format!("%{d:02}"));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chemio::parse_smiles;

    fn canon(s: &str) -> String {
        write_smiles(&parse_smiles(s).unwrap())
    }

    #[test]
    fn isomorphic_inputs_agree() {
        assert_eq!(canon("OCC"), canon("CCO"));
        assert_eq!(canon("C(C)O"), canon("CCO"));
        assert_eq!(canon("c1ccccc1C"), canon("Cc1ccccc1"));
        assert_eq!(canon("C1=CC=CC=C1"), canon("c1ccccc1"));
    }

    #[test]
    fn single_nitrogen() {
        let mut g = MoleculeGraph::new();
        let mut a = crate::chemio::Atom::new(7);
        a.explicit_h = 3;
        g.add_atom(a);
        assert_eq!(write_smiles(&g), "N");
    }

    #[test]
    fn benzene_fixed_point() {
        let once = canon("c1ccccc1");
        assert_eq!(once, "c1ccccc1");
        assert_eq!(canon(&once), once);
    }

    #[test]
    fn brackets_when_needed() {
        assert_eq!(canon("[NH4+]"), "[NH4+]");
        assert_eq!(canon("[CH3]"), "[CH3]");
        assert_eq!(canon("c1cc[nH]c1"), canon("[nH]1cccc1"));
        assert!(canon("c1cc[nH]c1").contains("[nH]"));
        assert_eq!(canon("[Na+].[Cl-]"), canon("[Cl-].[Na+]"));
        assert_eq!(canon("[1*]C(C)=O"), canon("CC([1*])=O"));
        assert!(canon("[1*]C(C)=O").contains("[1*]"));
    }

    #[test]
    fn biphenyl_keeps_single_marker() {
        let s = canon("c1ccccc1-c1ccccc1");
        assert!(s.contains('-'));
        assert_eq!(canon(&s), s);
    }

    #[test]
    fn wildcard_can_be_refused() {
        let m = parse_smiles("*CC").unwrap();
        let opts = WriteOptions { allow_wildcards: false };
        assert_eq!(write_smiles_with(&m, opts), Err(WriteError::UnsupportedFeature(0)));
    }

    #[test]
    fn empty_graph() {
        assert_eq!(write_smiles(&MoleculeGraph::new()), "");
    }

    #[test]
    fn ranks_are_permutation() {
        let m = parse_smiles("CC(C)(C)c1ccc2ccccc2c1").unwrap();
        let mut r = canonical_ranks(&m);
        r.sort_unstable();
        assert_eq!(r, (0..m.atom_count()).collect::<Vec<_>>());
    }
}
