//! BRICS cleavable-bond detection and recursive fragmentation.
//!
//! The environment/pair table is data (`data/brics_rules.txt`), compiled
//! once on first use.

use std::collections::HashSet;
use std::sync::OnceLock;

use super::MolGraphError;
use crate::chemio::{
    compile_pattern, write_smiles, Atom, Bond, BondOrder, MoleculeGraph, PatternMatcher, SubstructurePattern,
};

const RULES_TEXT: &str = include_str!("../../data/brics_rules.txt");

pub const DEFAULT_MAX_DEPTH: usize = 2;

#[derive(Debug, Clone)]
pub struct Environment {
    pub label: String,
    pub link: u16,
    pub pattern: SubstructurePattern,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RulePair {
    pub a: usize,
    pub b: usize,
    pub order: BondOrder,
}

#[derive(Debug, Clone)]
pub struct BricsRules {
    pub version: u32,
    pub environments: Vec<Environment>,
    pub pairs: Vec<RulePair>,
}

impl BricsRules {
    pub fn parse(text: &str) -> Result<Self, MolGraphError> {
        let mut version = None;
        let mut environments: Vec<Environment> = Vec::new();
        let mut pairs = Vec::new();
        for (n, raw) in text.lines().enumerate() {
            let bad = |msg: &str| MolGraphError::BadRuleTable {
                line: n + 1,
                message: msg.to_string(),
            };
            // '#' also appears inside patterns, so only whole-line comments
            if raw.trim_start().starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = raw.split_whitespace().collect();
            match fields.as_slice() {
                [] => {}
                ["version", v] => version = Some(v.parse().map_err(|_| bad("bad version"))?),
                ["env", label, pattern] => {
                    let digits: String = label.chars().take_while(char::is_ascii_digit).collect();
                    let link = digits.parse().map_err(|_| bad("label must start with a link number"))?;
                    if environments.iter().any(|e| e.label == *label) {
                        return Err(bad("duplicate environment label"));
                    }
                    let pattern = compile_pattern(pattern).map_err(|e| bad(&e.to_string()))?;
                    environments.push(Environment {
                        label: label.to_string(),
                        link,
                        pattern,
                    });
                }
                ["pair", x, y, bond] => {
                    let find = |l: &str| {
                        environments
                            .iter()
                            .position(|e| e.label == l)
                            .ok_or_else(|| bad("pair references an undefined label"))
                    };
                    let order = match *bond {
                        "-" => BondOrder::Single,
                        "=" => BondOrder::Double,
                        _ => return Err(bad("bond must be - or =")),
                    };
                    pairs.push(RulePair {
                        a: find(x)?,
                        b: find(y)?,
                        order,
                    });
                }
                _ => return Err(bad("unrecognized line")),
            }
        }
        Ok(BricsRules {
            version: version.ok_or(MolGraphError::BadRuleTable {
                line: 0,
                message: "missing version".into(),
            })?,
            environments,
            pairs,
        })
    }

    /// The bundled table.
    pub fn builtin() -> &'static BricsRules {
        static RULES: OnceLock<BricsRules> = OnceLock::new();
        RULES.get_or_init(|| BricsRules::parse(RULES_TEXT).expect("bundled BRICS table is valid"))
    }

    /// For each environment, which atoms of `mol` it matches.
    pub fn environment_matches(&self, mol: &MoleculeGraph) -> Vec<Vec<bool>> {
        let m = PatternMatcher::new(mol);
        self.environments
            .iter()
            .map(|e| {
                let mut hit = vec![false; mol.atom_count()];
                for i in m.matching_atoms(&e.pattern) {
                    hit[i] = true;
                }
                hit
            })
            .collect()
    }

    /// Cleavable bonds of `mol` under this table.
    pub fn cleavable_bonds(&self, mol: &MoleculeGraph) -> Vec<BricsBond> {
        let hits = self.environment_matches(mol);
        let ring = mol.ring_bonds();
        let mut out = Vec::new();
        for (k, bond) in mol.bonds().iter().enumerate() {
            let (u, v) = (bond.begin, bond.end);
            if bond.order != BondOrder::Single || ring[k] || mol.atom(u).is_wildcard() || mol.atom(v).is_wildcard() {
                continue;
            }
            for p in self.pairs.iter().filter(|p| p.order == BondOrder::Single) {
                let (ea, eb) = (&self.environments[p.a], &self.environments[p.b]);
                let links = if hits[p.a][u] && hits[p.b][v] {
                    (ea.link, eb.link)
                } else if hits[p.b][u] && hits[p.a][v] {
                    (eb.link, ea.link)
                } else {
                    continue;
                };
                out.push(BricsBond { bond: k, links });
                break;
            }
        }
        out
    }
}

/// A cleavable bond and the link numbers of its (begin, end) atoms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BricsBond {
    pub bond: usize,
    pub links: (u16, u16),
}

/// Cleavable bonds under the bundled table, ascending by bond index.
pub fn brics_bonds(mol: &MoleculeGraph) -> Vec<BricsBond> {
    BricsRules::builtin().cleavable_bonds(mol)
}

/// One side of a cut: the fragment graph and, per fragment atom, the atom of
/// the cut molecule it came from (`None` for the new attachment point).
#[derive(Debug, Clone, PartialEq)]
pub struct CutSide {
    pub mol: MoleculeGraph,
    pub origin: Vec<Option<usize>>,
}

/// Cuts bond `cut.bond`, capping each side with a wildcard whose isotope is
/// the link number of the atom it replaces the partner of. Returns the
/// begin-side fragment first.
pub fn split_at_bond(mol: &MoleculeGraph, cut: BricsBond) -> (CutSide, CutSide) {
    let target = mol.bond(cut.bond);
    let (u, v) = (target.begin, target.end);
    let n = mol.atom_count();
    let mut atoms = mol.atoms().to_vec();
    atoms.push(Atom::wildcard(cut.links.0));
    atoms.push(Atom::wildcard(cut.links.1));
    let mut bonds: Vec<Bond> = mol
        .bonds()
        .iter()
        .enumerate()
        .filter(|(k, _)| *k != cut.bond)
        .map(|(_, b)| b.clone())
        .collect();
    bonds.push(Bond::new(u, n, BondOrder::Single));
    bonds.push(Bond::new(v, n + 1, BondOrder::Single));
    let whole = MoleculeGraph::from_parts(atoms, bonds).expect("cut keeps graph invariants");
    let comps = whole.components();
    let side = |root: usize| {
        let keep = comps.iter().find(|c| c.contains(&root)).expect("every atom has a component");
        let (g, _) = whole.induced(keep);
        let origin = keep.iter().map(|&k| (k < n).then_some(k)).collect();
        CutSide { mol: g, origin }
    };
    (side(u), side(v))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Fragment {
    pub mol: MoleculeGraph,
    pub smiles: String,
    pub depth: usize,
    /// Index of the node this fragment was cut from; `None` for the root.
    pub parent: Option<usize>,
    /// Root-molecule atom index of every fragment atom (`None` for
    /// attachment points).
    pub root_atoms: Vec<Option<usize>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FragmentTree {
    /// Node 0 is the root molecule; fragments follow in discovery order.
    pub nodes: Vec<Fragment>,
}

impl FragmentTree {
    pub fn root(&self) -> &Fragment {
        &self.nodes[0]
    }

    pub fn fragments(&self) -> &[Fragment] {
        &self.nodes[1..]
    }

    pub fn fragment_count(&self) -> usize {
        self.nodes.len() - 1
    }
}

/// Breadth-first BRICS decomposition down to `max_depth` cuts. Each level
/// re-derives cleavable bonds on its fragments; duplicates (by canonical
/// SMILES) keep their first occurrence.
pub fn brics_fragments(mol: &MoleculeGraph, max_depth: usize) -> FragmentTree {
    let rules = BricsRules::builtin();
    let root = Fragment {
        mol: mol.clone(),
        smiles: write_smiles(mol),
        depth: 0,
        parent: None,
        root_atoms: (0..mol.atom_count()).map(Some).collect(),
    };
    let mut seen: HashSet<String> = HashSet::from([root.smiles.clone()]);
    let mut nodes = vec![root];
    let mut level_start = 0;
    for depth in 1..=max_depth {
        let level_end = nodes.len();
        for idx in level_start..level_end {
            let cuts = rules.cleavable_bonds(&nodes[idx].mol);
            for cut in cuts {
                let (a, b) = split_at_bond(&nodes[idx].mol, cut);
                for side in [a, b] {
                    let smiles = write_smiles(&side.mol);
                    if !seen.insert(smiles.clone()) {
                        continue;
                    }
                    let root_atoms = side
                        .origin
                        .iter()
                        .map(|o| o.and_then(|k| nodes[idx].root_atoms[k]))
                        .collect();
                    nodes.push(Fragment {
                        mol: side.mol,
                        smiles,
                        depth,
                        parent: Some(idx),
                        root_atoms,
                    });
                }
            }
        }
        if nodes.len() == level_end {
            break;
        }
        level_start = level_end;
    }
    FragmentTree { nodes }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chemio::parse_smiles;

    fn cuts(s: &str) -> Vec<(usize, (u16, u16))> {
        brics_bonds(&parse_smiles(s).unwrap()).iter().map(|b| (b.bond, b.links)).collect()
    }

    #[test]
    fn table_loads() {
        let r = BricsRules::builtin();
        assert_eq!(r.version, 1);
        assert_eq!(r.environments.len(), 16);
        assert_eq!(r.pairs.len(), 46);
    }

    #[test]
    fn ester_cut() {
        assert_eq!(cuts("CCOC(C)=O"), vec![(1, (4, 3)), (2, (3, 1))]);
        assert!(cuts("C").is_empty());
        assert!(cuts("c1ccccc1").is_empty());
    }

    #[test]
    fn ethyl_acetate_fragments() {
        let t = brics_fragments(&parse_smiles("CCOC(C)=O").unwrap(), 2);
        let depth1: Vec<&str> = t.fragments().iter().filter(|f| f.depth == 1).map(|f| f.smiles.as_str()).collect();
        let mut want = vec!["[4*]CC", "[3*]OC(C)=O", "[3*]OCC", "[1*]C(C)=O"];
        want.sort_unstable();
        let mut got = depth1.clone();
        got.sort_unstable();
        assert_eq!(got, want);
        // the ethoxy side still contains the C–O linkage and cuts again
        assert!(t.fragments().iter().any(|f| f.depth == 2));
    }

    #[test]
    fn no_cuts_is_root_only() {
        let t = brics_fragments(&parse_smiles("c1ccccc1").unwrap(), 2);
        assert_eq!(t.fragment_count(), 0);
    }

    #[test]
    fn single_cut_gives_two() {
        let t = brics_fragments(&parse_smiles("COc1ccccc1").unwrap(), 2);
        assert_eq!(t.fragment_count(), 2);
        let (a, b) = split_at_bond(&t.root().mol, brics_bonds(&t.root().mol)[0]);
        let mut atoms: Vec<usize> = a.origin.iter().chain(&b.origin).flatten().copied().collect();
        atoms.sort_unstable();
        assert_eq!(atoms, (0..8).collect::<Vec<_>>());
    }

    #[test]
    fn bad_tables() {
        assert!(BricsRules::parse("env 1 C\n").is_err());
        assert!(BricsRules::parse("version 1\npair 1 2 -\n").is_err());
        assert!(BricsRules::parse("version 1\nenv x C\n").is_err());
        assert!(BricsRules::parse("version 1\nenv 1 C((\n").is_err());
    }
}
