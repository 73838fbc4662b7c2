use super::bits::{BitFingerprint, FpKind};
use super::FingerprintError;
use crate::chemio::MoleculeGraph;
use crate::hash::Fnv1a;

pub const DEFAULT_NBITS: usize = 2048;
pub const DEFAULT_RADIUS: u32 = 2;
pub const DEFAULT_MAX_PATH: usize = 7;

fn check_nbits(nbits: usize) -> Result<(), FingerprintError> {
    if nbits >= 8 && nbits.is_power_of_two() {
        Ok(())
    } else {
        Err(FingerprintError::BadLength(nbits))
    }
}

/// Round-0 atom codes: FNV-1a over Z (u16 LE), degree, charge, H count,
/// ring flag, aromatic flag (one byte each).
pub fn initial_atom_codes(mol: &MoleculeGraph) -> Vec<u64> {
    let ring = mol.ring_atoms();
    mol.atoms()
        .iter()
        .enumerate()
        .map(|(i, a)| {
            Fnv1a::new()
                .write_u16(u16::from(a.element))
                .write_u8(mol.degree(i).min(255) as u8)
                .write_u8(a.formal_charge as u8)
                .write_u8(a.explicit_h)
                .write_u8(u8::from(ring[i]))
                .write_u8(u8::from(a.aromatic))
                .finish()
        })
        .collect()
}

/// Circular fingerprint. Round r rehashes (r as u32, own code, neighbor
/// (bond code, code) pairs in sorted order); every code of every round sets
/// bit `code mod nbits`.
pub fn ecfp(mol: &MoleculeGraph, radius: u32, nbits: usize) -> Result<BitFingerprint, FingerprintError> {
    check_nbits(nbits)?;
    let mut fp = BitFingerprint::new(nbits, FpKind::Ecfp)?;
    let mut codes = initial_atom_codes(mol);
    for &c in &codes {
        fp.set_code(c);
    }
    let mut env: Vec<(u8, u64)> = Vec::new();
    for round in 1..=radius {
        let next: Vec<u64> = (0..mol.atom_count())
            .map(|i| {
                env.clear();
                env.extend(mol.neighbors(i).iter().map(|&(j, b)| (mol.bond(b).order.code(), codes[j])));
                env.sort_unstable();
                let mut h = Fnv1a::new();
                h.write_u32(round).write_u64(codes[i]);
                for &(bc, c) in &env {
                    h.write_u8(bc).write_u64(c);
                }
                h.finish()
            })
            .collect();
        for &c in &next {
            fp.set_code(c);
        }
        codes = next;
    }
    Ok(fp)
}

/// Linear-path fingerprint over simple paths of 1..=max_path bonds. A path
/// is the token sequence Z, bond code, Z, … (u16 each), read in whichever
/// direction is lexicographically smaller and hashed little-endian.
pub fn rdkfp(mol: &MoleculeGraph, max_path: usize, nbits: usize) -> Result<BitFingerprint, FingerprintError> {
    check_nbits(nbits)?;
    if max_path == 0 {
        return Err(FingerprintError::BadPathLength);
    }
    let mut fp = BitFingerprint::new(nbits, FpKind::Rdkfp)?;
    let mut on_path = vec![false; mol.atom_count()];
    let mut tokens: Vec<u16> = Vec::new();
    for start in 0..mol.atom_count() {
        tokens.clear();
        tokens.push(u16::from(mol.atom(start).element));
        on_path[start] = true;
        walk(mol, start, max_path, &mut on_path, &mut tokens, &mut fp);
        on_path[start] = false;
    }
    Ok(fp)
}

fn walk(mol: &MoleculeGraph, at: usize, left: usize, on_path: &mut [bool], tokens: &mut Vec<u16>, fp: &mut BitFingerprint) {
    if left == 0 {
        return;
    }
    for &(nbr, b) in mol.neighbors(at) {
        if on_path[nbr] {
            continue;
        }
        tokens.push(u16::from(mol.bond(b).order.code()));
        tokens.push(u16::from(mol.atom(nbr).element));
        fp.set_code(path_code(tokens));
        on_path[nbr] = true;
        walk(mol, nbr, left - 1, on_path, tokens, fp);
        on_path[nbr] = false;
        tokens.truncate(tokens.len() - 2);
    }
}

fn path_code(tokens: &[u16]) -> u64 {
    let forward = tokens.iter();
    let backward = tokens.iter().rev();
    let mut h = Fnv1a::new();
    if backward.clone().lt(forward.clone()) {
        for &t in backward {
            h.write_u16(t);
        }
    } else {
        for &t in forward {
            h.write_u16(t);
        }
    }
    h.finish()
}

/// Which generator and length to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FpSpec {
    pub kind: FpKind,
    pub nbits: usize,
}

impl FpSpec {
    pub fn new(kind: FpKind) -> Self {
        FpSpec {
            kind,
            nbits: DEFAULT_NBITS,
        }
    }

    /// ECFP at radius 2 or paths up to 7 bonds.
    pub fn compute(&self, mol: &MoleculeGraph) -> Result<BitFingerprint, FingerprintError> {
        match self.kind {
            FpKind::Ecfp => ecfp(mol, DEFAULT_RADIUS, self.nbits),
            FpKind::Rdkfp => rdkfp(mol, DEFAULT_MAX_PATH, self.nbits),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chemio::parse_smiles;

    fn mol(s: &str) -> MoleculeGraph {
        parse_smiles(s).unwrap()
    }

    #[test]
    fn methane_radius_zero() {
        assert_eq!(ecfp(&mol("C"), 0, 2048).unwrap().count_ones(), 1);
    }

    #[test]
    fn radius_monotone() {
        let m = mol("CC(=O)Nc1ccc(O)cc1");
        let r0 = ecfp(&m, 0, 2048).unwrap();
        let r2 = ecfp(&m, 2, 2048).unwrap();
        assert!(r0.is_subset_of(&r2));
        assert!(r2.count_ones() > r0.count_ones());
    }

    #[test]
    fn path_examples() {
        assert_eq!(rdkfp(&mol("C"), 7, 2048).unwrap().count_ones(), 0);
        assert_eq!(rdkfp(&mol("CC"), 7, 2048).unwrap().count_ones(), 1);
        assert_eq!(rdkfp(&mol("OCC"), 7, 2048).unwrap(), rdkfp(&mol("CCO"), 7, 2048).unwrap());
        // C-C, C-O, C-C-O
        assert_eq!(rdkfp(&mol("OCC"), 7, 2048).unwrap().count_ones(), 3);
    }

    #[test]
    fn rejects_bad_params() {
        assert!(ecfp(&mol("C"), 2, 1000).is_err());
        assert!(rdkfp(&mol("C"), 0, 2048).is_err());
    }

    #[test]
    fn methane_code_trace() {
        // Z=6 as u16 LE, degree 0, charge 0, 4 H, not in ring, not aromatic.
        let code = Fnv1a::new().write(&[6, 0, 0, 0, 4, 0, 0]).finish();
        let fp = ecfp(&mol("C"), 0, 2048).unwrap();
        assert_eq!(fp.ones(), vec![(code % 2048) as usize]);
    }
}
