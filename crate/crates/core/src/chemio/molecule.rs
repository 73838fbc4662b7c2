use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Tetrahedral tag as written in the input; recorded, not geometrically interpreted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum Chirality {
    #[default]
    None,
    /// `@@`
    Clockwise,
    /// `@`
    CounterClockwise,
}

impl Chirality {
    pub fn index(self) -> u8 {
        match self {
            Chirality::None => 0,
            Chirality::Clockwise => 1,
            Chirality::CounterClockwise => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum BondOrder {
    Single,
    Double,
    Triple,
    Aromatic,
}

impl BondOrder {
    /// Feature index: single 0, double 1, triple 2, aromatic 3.
    pub fn index(self) -> u8 {
        match self {
            BondOrder::Single => 0,
            BondOrder::Double => 1,
            BondOrder::Triple => 2,
            BondOrder::Aromatic => 3,
        }
    }

    /// Hash code: single 1, double 2, triple 3, aromatic 4.
    pub fn code(self) -> u8 {
        self.index() + 1
    }

    /// Contribution to the valence sum; aromatic bonds count 1 here and the
    /// extra π electron is accounted for per atom.
    pub(crate) fn valence(self) -> u8 {
        match self {
            BondOrder::Single | BondOrder::Aromatic => 1,
            BondOrder::Double => 2,
            BondOrder::Triple => 3,
        }
    }
}

/// `/` and `\` marks on single bonds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum BondDirection {
    #[default]
    None,
    Up,
    Down,
}

impl BondDirection {
    pub fn index(self) -> u8 {
        match self {
            BondDirection::None => 0,
            BondDirection::Up => 1,
            BondDirection::Down => 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct Atom {
    /// Atomic number; 0 is the attachment-point wildcard.
    pub element: u8,
    /// 0 when unspecified. On wildcards this carries the BRICS link number.
    pub isotope: u16,
    pub formal_charge: i8,
    pub aromatic: bool,
    pub chirality: Chirality,
    /// Total hydrogens attached (bracket count or valence-derived implicit count).
    pub explicit_h: u8,
}

impl Atom {
    pub fn new(element: u8) -> Self {
        Atom {
            element,
            ..Default::default()
        }
    }

    pub fn wildcard(link: u16) -> Self {
        Atom {
            element: 0,
            isotope: link,
            ..Default::default()
        }
    }

    pub fn is_wildcard(&self) -> bool {
        self.element == 0
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Bond {
    pub begin: usize,
    pub end: usize,
    pub order: BondOrder,
    pub direction: BondDirection,
}

impl Bond {
    pub fn new(begin: usize, end: usize, order: BondOrder) -> Self {
        Bond {
            begin,
            end,
            order,
            direction: BondDirection::None,
        }
    }

    pub fn other(&self, atom: usize) -> usize {
        if self.begin == atom {
            self.end
        } else {
            self.begin
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("bond endpoint {0} out of range")]
    BondOutOfRange(usize),
    #[error("bond from atom {0} to itself")]
    SelfBond(usize),
    #[error("duplicate bond between atoms {0} and {1}")]
    DuplicateBond(usize, usize),
    #[error("aromatic bond {0}-{1} touches a non-aromatic atom")]
    AromaticMismatch(usize, usize),
    #[error("atom index {0} out of range")]
    IndexOutOfRange(usize),
}

/// Undirected molecular graph. Invariants are enforced on every mutation.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MoleculeGraph {
    atoms: Vec<Atom>,
    bonds: Vec<Bond>,
    /// (neighbor, bond index) per atom, in bond insertion order.
    adjacency: Vec<Vec<(usize, usize)>>,
}

impl MoleculeGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_parts(atoms: Vec<Atom>, bonds: Vec<Bond>) -> Result<Self, GraphError> {
        let mut g = MoleculeGraph {
            adjacency: vec![Vec::new(); atoms.len()],
            atoms,
            bonds: Vec::with_capacity(bonds.len()),
        };
        for b in bonds {
            g.push_bond(b)?;
        }
        Ok(g)
    }

    pub fn add_atom(&mut self, atom: Atom) -> usize {
        self.atoms.push(atom);
        self.adjacency.push(Vec::new());
        self.atoms.len() - 1
    }

    pub fn add_bond(&mut self, begin: usize, end: usize, order: BondOrder) -> Result<usize, GraphError> {
        self.push_bond(Bond::new(begin, end, order))
    }

    pub fn push_bond(&mut self, bond: Bond) -> Result<usize, GraphError> {
        let n = self.atoms.len();
        for idx in [bond.begin, bond.end] {
            if idx >= n {
                return Err(GraphError::BondOutOfRange(idx));
            }
        }
        if bond.begin == bond.end {
            return Err(GraphError::SelfBond(bond.begin));
        }
        if self.bond_between(bond.begin, bond.end).is_some() {
            return Err(GraphError::DuplicateBond(bond.begin, bond.end));
        }
        if bond.order == BondOrder::Aromatic
            && !(self.atoms[bond.begin].aromatic && self.atoms[bond.end].aromatic)
        {
            return Err(GraphError::AromaticMismatch(bond.begin, bond.end));
        }
        let idx = self.bonds.len();
        self.adjacency[bond.begin].push((bond.end, idx));
        self.adjacency[bond.end].push((bond.begin, idx));
        self.bonds.push(bond);
        Ok(idx)
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn bonds(&self) -> &[Bond] {
        &self.bonds
    }

    pub fn atom(&self, i: usize) -> &Atom {
        &self.atoms[i]
    }

    pub fn atom_mut(&mut self, i: usize) -> &mut Atom {
        &mut self.atoms[i]
    }

    pub fn bond(&self, i: usize) -> &Bond {
        &self.bonds[i]
    }

    pub fn atom_count(&self) -> usize {
        self.atoms.len()
    }

    pub fn bond_count(&self) -> usize {
        self.bonds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// (neighbor, bond index) pairs of atom `i`.
    pub fn neighbors(&self, i: usize) -> &[(usize, usize)] {
        &self.adjacency[i]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.adjacency[i].len()
    }

    pub fn bond_between(&self, a: usize, b: usize) -> Option<usize> {
        self.adjacency
            .get(a)?
            .iter()
            .find(|(n, _)| *n == b)
            .map(|(_, bi)| *bi)
    }

    /// Sum of bond valence contributions at atom `i` (aromatic counts 1).
    pub fn valence_sum(&self, i: usize) -> u8 {
        self.adjacency[i]
            .iter()
            .map(|&(_, b)| self.bonds[b].order.valence())
            .sum()
    }

    pub(crate) fn set_bond_order(&mut self, bond: usize, order: BondOrder) {
        self.bonds[bond].order = order;
    }

    /// Per-bond flag: true when the bond lies on a cycle (is not a bridge).
    pub fn ring_bonds(&self) -> Vec<bool> {
        let n = self.atoms.len();
        let mut disc = vec![usize::MAX; n];
        let mut low = vec![0usize; n];
        let mut is_bridge = vec![false; self.bonds.len()];
        let mut timer = 0usize;
        for root in 0..n {
            if disc[root] != usize::MAX {
                continue;
            }
            // iterative DFS: (atom, parent bond, next adjacency slot)
            let mut stack: Vec<(usize, usize, usize)> = vec![(root, usize::MAX, 0)];
            disc[root] = timer;
            low[root] = timer;
            timer += 1;
            while let Some(&mut (v, pbond, ref mut slot)) = stack.last_mut() {
                if *slot < self.adjacency[v].len() {
                    let (w, b) = self.adjacency[v][*slot];
                    *slot += 1;
                    if b == pbond {
                        continue;
                    }
                    if disc[w] == usize::MAX {
                        disc[w] = timer;
                        low[w] = timer;
                        timer += 1;
                        stack.push((w, b, 0));
                    } else {
                        low[v] = low[v].min(disc[w]);
                    }
                } else {
                    stack.pop();
                    if let Some(&(p, _, _)) = stack.last() {
                        low[p] = low[p].min(low[v]);
                        if low[v] > disc[p] {
                            is_bridge[pbond] = true;
                        }
                    }
                }
            }
        }
        is_bridge.into_iter().map(|b| !b).collect()
    }

    /// Per-atom flag: true when the atom lies on a cycle.
    pub fn ring_atoms(&self) -> Vec<bool> {
        let rb = self.ring_bonds();
        let mut ra = vec![false; self.atoms.len()];
        for (b, in_ring) in self.bonds.iter().zip(rb) {
            if in_ring {
                ra[b.begin] = true;
                ra[b.end] = true;
            }
        }
        ra
    }

    /// Copy with atoms renumbered: new atom `k` is old atom `order[k]`.
    /// Bonds keep their relative order. `order` must be a permutation.
    pub fn renumbered(&self, order: &[usize]) -> MoleculeGraph {
        assert_eq!(order.len(), self.atoms.len());
        let mut inverse = vec![0usize; order.len()];
        for (new, &old) in order.iter().enumerate() {
            inverse[old] = new;
        }
        let atoms = order.iter().map(|&old| self.atoms[old].clone()).collect();
        let bonds = self
            .bonds
            .iter()
            .map(|b| Bond {
                begin: inverse[b.begin],
                end: inverse[b.end],
                ..b.clone()
            })
            .collect();
        MoleculeGraph::from_parts(atoms, bonds).expect("renumbering preserves invariants")
    }

    /// Induced subgraph on `keep` (ascending old indices). Returns the graph and
    /// the old→new index map.
    pub fn induced(&self, keep: &[usize]) -> (MoleculeGraph, Vec<Option<usize>>) {
        let mut map = vec![None; self.atoms.len()];
        let mut g = MoleculeGraph::new();
        for &old in keep {
            map[old] = Some(g.add_atom(self.atoms[old].clone()));
        }
        for b in &self.bonds {
            if let (Some(x), Some(y)) = (map[b.begin], map[b.end]) {
                g.push_bond(Bond {
                    begin: x,
                    end: y,
                    ..b.clone()
                })
                .expect("subgraph of a valid graph is valid");
            }
        }
        (g, map)
    }

    /// Connected components as ascending atom lists, ordered by smallest member.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let n = self.atoms.len();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for s in 0..n {
            if seen[s] {
                continue;
            }
            let mut comp = vec![s];
            seen[s] = true;
            let mut k = 0;
            while k < comp.len() {
                let v = comp[k];
                k += 1;
                for &(w, _) in &self.adjacency[v] {
                    if !seen[w] {
                        seen[w] = true;
                        comp.push(w);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }
}

/// Standard valences of the SMILES organic subset, smallest first.
pub(crate) fn organic_valences(z: u8) -> Option<&'static [u8]> {
    match z {
        5 => Some(&[3]),
        6 => Some(&[4]),
        7 => Some(&[3, 5]),
        8 => Some(&[2]),
        15 => Some(&[3, 5]),
        16 => Some(&[2, 4, 6]),
        9 | 17 | 35 | 53 => Some(&[1]),
        _ => None,
    }
}

/// Implicit hydrogen count for an organic-subset atom with the given bond
/// valence sum. `Err(())` when the sum exceeds every allowed valence of an
/// aliphatic atom. Aromatic atoms only fill up to their lowest valence (the
/// extra π bond counts one), so `n(C)` and thiophene `s` carry no H.
pub(crate) fn implicit_hydrogens(z: u8, aromatic: bool, valence_sum: u8) -> Result<u8, ()> {
    let Some(valences) = organic_valences(z) else {
        return Ok(0);
    };
    if aromatic {
        return Ok(valences[0].saturating_sub(valence_sum + 1));
    }
    match valences.iter().find(|&&v| v >= valence_sum) {
        Some(&v) => Ok(v - valence_sum),
        None => Err(()),
    }
}
