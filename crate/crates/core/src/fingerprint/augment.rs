use super::bits::{tanimoto, BitFingerprint};
use super::generate::FpSpec;
use super::FingerprintError;
use crate::chemio::MoleculeGraph;
use crate::molgraph::{brics_fragments, FragmentTree};
use crate::rng::RngState;

pub const DEFAULT_THRESHOLD: f64 = 0.6;
pub const DEFAULT_K: usize = 4;
pub const DEFAULT_N_CONCAT: usize = 4;

/// K fingerprints laid end to end.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConcatFingerprint {
    pub segments: Vec<BitFingerprint>,
    /// Marks the one entry built by repeating the molecule's own fingerprint.
    pub replicated: bool,
}

impl ConcatFingerprint {
    pub fn nbits(&self) -> usize {
        self.segments.iter().map(BitFingerprint::nbits).sum()
    }

    pub fn to_hex(&self) -> String {
        self.segments.iter().map(BitFingerprint::to_hex).collect()
    }
}

/// Fingerprint of every tree node, root first.
pub fn tree_fingerprints(tree: &FragmentTree, spec: &FpSpec) -> Result<Vec<BitFingerprint>, FingerprintError> {
    tree.nodes.iter().map(|n| spec.compute(&n.mol)).collect()
}

/// The molecule's fingerprint followed by every fragment fingerprint with
/// Tanimoto similarity ≥ `threshold` to it, each paired with `label`.
pub fn fp_break<L: Clone>(
    mol: &MoleculeGraph,
    label: &L,
    spec: &FpSpec,
    threshold: f64,
    max_depth: usize,
) -> Result<Vec<(BitFingerprint, L)>, FingerprintError> {
    fp_break_tree(&brics_fragments(mol, max_depth), label, spec, threshold)
}

pub fn fp_break_tree<L: Clone>(
    tree: &FragmentTree,
    label: &L,
    spec: &FpSpec,
    threshold: f64,
) -> Result<Vec<(BitFingerprint, L)>, FingerprintError> {
    if !(0.0..=1.0).contains(&threshold) {
        return Err(FingerprintError::BadThreshold(threshold));
    }
    let mut fps = tree_fingerprints(tree, spec)?.into_iter();
    let parent = fps.next().expect("tree has a root");
    let mut out = vec![(parent.clone(), label.clone())];
    for fp in fps {
        if tanimoto(&fp, &parent)? >= threshold {
            out.push((fp, label.clone()));
        }
    }
    Ok(out)
}

/// The molecule's fingerprint repeated `k` times.
pub fn replicated_fp(mol: &MoleculeGraph, spec: &FpSpec, k: usize) -> Result<ConcatFingerprint, FingerprintError> {
    if k == 0 {
        return Err(FingerprintError::BadK);
    }
    Ok(ConcatFingerprint {
        segments: vec![spec.compute(mol)?; k],
        replicated: true,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConcatParams {
    pub k: usize,
    pub n_concat: usize,
    pub with_replacement: bool,
    pub max_depth: usize,
}

impl Default for ConcatParams {
    fn default() -> Self {
        ConcatParams {
            k: DEFAULT_K,
            n_concat: DEFAULT_N_CONCAT,
            with_replacement: true,
            max_depth: crate::molgraph::DEFAULT_MAX_DEPTH,
        }
    }
}

/// The replicated fingerprint first, then `n_concat` random concatenations
/// of `k` draws from the pool {molecule} ∪ fragments. Without replacement,
/// draws walk a shuffled pool and reshuffle when it runs out.
pub fn fp_concat<L: Clone>(
    mol: &MoleculeGraph,
    label: &L,
    spec: &FpSpec,
    params: &ConcatParams,
    rng: &mut RngState,
) -> Result<Vec<(ConcatFingerprint, L)>, FingerprintError> {
    fp_concat_tree(&brics_fragments(mol, params.max_depth), label, spec, params, rng)
}

pub fn fp_concat_tree<L: Clone>(
    tree: &FragmentTree,
    label: &L,
    spec: &FpSpec,
    params: &ConcatParams,
    rng: &mut RngState,
) -> Result<Vec<(ConcatFingerprint, L)>, FingerprintError> {
    if params.k == 0 {
        return Err(FingerprintError::BadK);
    }
    let pool = tree_fingerprints(tree, spec)?;
    let mut out = Vec::with_capacity(params.n_concat + 1);
    out.push((
        ConcatFingerprint {
            segments: vec![pool[0].clone(); params.k],
            replicated: true,
        },
        label.clone(),
    ));
    let mut deck: Vec<usize> = Vec::new();
    for _ in 0..params.n_concat {
        let mut segments = Vec::with_capacity(params.k);
        for _ in 0..params.k {
            let pick = if params.with_replacement {
                rng.below(pool.len())
            } else {
                if deck.is_empty() {
                    deck = rng.permutation(pool.len());
                    deck.reverse();
                }
                deck.pop().expect("refilled deck is non-empty")
            };
            segments.push(pool[pick].clone());
        }
        out.push((
            ConcatFingerprint {
                segments,
                replicated: false,
            },
            label.clone(),
        ));
    }
    Ok(out)
}
