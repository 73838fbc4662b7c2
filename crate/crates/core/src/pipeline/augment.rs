//! Train-only augmentation. Every function walks records in input order,
//! fans the per-record work out over rayon and draws randomness from
//! streams derived from (seed, record id, augmentation name), so the output
//! does not depend on the worker count.

use rayon::prelude::*;

use super::dataset::{mask_labels, AugmentedDataset, GraphBody, GraphRecord, ORIGINAL};
use super::split::{Partition, SplitPlan};
use super::PipelineError;
use crate::chemio::{parse_smiles, CrystalStructure, MoleculeRecord, MoleculeTable};
use crate::crystal::{
    augment_crystal, build_crystal_graph, Strategy, TransformParams, DEFAULT_CUTOFF, DEFAULT_MAX_NEIGHBORS,
};
use crate::crystal::graph::{DEFAULT_GAUSSIAN_STEP, DEFAULT_GAUSSIAN_WIDTH};
use crate::fingerprint::{
    fp_break_tree, fp_concat_tree, ConcatParams, FpRow, FpSpec, DEFAULT_THRESHOLD,
};
use crate::molgraph::{
    brics_fragments, build_graph_record, delete_bonds, mask_atoms, remove_substructure, substructure_records,
    DEFAULT_MAX_DEPTH,
};
use crate::rng::RngState;

fn partitions(plan: &SplitPlan, n: usize) -> Result<Vec<Partition>, PipelineError> {
    plan.validate(n)?;
    Ok(plan
        .assignments(n)
        .into_iter()
        .map(|p| p.expect("validated plan covers every index"))
        .collect())
}

// ---------------------------------------------------------------- crystals

#[derive(Debug, Clone, PartialEq)]
pub struct CrystalEntry {
    pub id: String,
    pub structure: CrystalStructure,
    pub labels: Vec<Option<f64>>,
}

/// A structure in the augmented set. Augmented ids are
/// `<parent>__<strategy>`, matching the CIF file stem.
#[derive(Debug, Clone, PartialEq)]
pub struct CrystalItem {
    pub id: String,
    pub parent_id: String,
    pub strategy: Option<Strategy>,
    pub partition: Partition,
    pub structure: CrystalStructure,
    pub labels: Vec<Option<f64>>,
}

impl CrystalItem {
    pub fn provenance(&self) -> &'static str {
        self.strategy.map_or(ORIGINAL, Strategy::name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GraphParams {
    pub cutoff: f64,
    pub max_neighbors: usize,
    pub gaussian_step: f64,
    pub gaussian_width: f64,
}

impl Default for GraphParams {
    fn default() -> Self {
        GraphParams {
            cutoff: DEFAULT_CUTOFF,
            max_neighbors: DEFAULT_MAX_NEIGHBORS,
            gaussian_step: DEFAULT_GAUSSIAN_STEP,
            gaussian_width: DEFAULT_GAUSSIAN_WIDTH,
        }
    }
}

/// Originals of every partition plus, for train entries only, one
/// structure per strategy directly after its parent.
pub fn augment_crystals(
    entries: &[CrystalEntry],
    plan: &SplitPlan,
    strategies: &[Strategy],
    params: &TransformParams,
    seed: u64,
) -> Result<Vec<CrystalItem>, PipelineError> {
    let parts = partitions(plan, entries.len())?;
    let per_entry: Vec<Vec<CrystalItem>> = entries
        .par_iter()
        .zip(parts.par_iter())
        .map(|(e, &partition)| {
            let mut out = vec![CrystalItem {
                id: e.id.clone(),
                parent_id: e.id.clone(),
                strategy: None,
                partition,
                structure: e.structure.clone(),
                labels: e.labels.clone(),
            }];
            if partition == Partition::Train && !strategies.is_empty() {
                for (k, s) in augment_crystal(&e.structure, &e.id, strategies, seed, params)? {
                    out.push(CrystalItem {
                        id: format!("{}__{}", e.id, k.name()),
                        parent_id: e.id.clone(),
                        strategy: Some(k),
                        partition,
                        structure: s,
                        labels: e.labels.clone(),
                    });
                }
            }
            Ok(out)
        })
        .collect::<Result<_, PipelineError>>()?;
    Ok(per_entry.into_iter().flatten().collect())
}

pub fn crystal_graph_record(item: &CrystalItem, gp: &GraphParams) -> GraphRecord {
    let (y, y_mask) = mask_labels(&item.labels);
    GraphRecord {
        id: item.id.clone(),
        parent_id: item.parent_id.clone(),
        provenance: item.provenance().to_string(),
        partition: item.partition,
        body: GraphBody::Crystal(build_crystal_graph(
            &item.structure,
            gp.cutoff,
            gp.max_neighbors,
            gp.gaussian_step,
            gp.gaussian_width,
        )),
        y,
        y_mask,
    }
}

pub fn crystal_graph_records(items: &[CrystalItem], gp: &GraphParams) -> Vec<GraphRecord> {
    items.par_iter().map(|it| crystal_graph_record(it, gp)).collect()
}

// --------------------------------------------------------------- molecules

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SubstructureMode {
    /// One uniformly chosen fragment per molecule.
    One,
    /// Every fragment of the tree.
    All,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MolAugmentation {
    AtomMask { ratio: f64 },
    BondDelete { ratio: f64 },
    Substructure { mode: SubstructureMode },
}

impl MolAugmentation {
    pub fn name(&self) -> &'static str {
        match self {
            MolAugmentation::AtomMask { .. } => "atom_mask",
            MolAugmentation::BondDelete { .. } => "bond_delete",
            MolAugmentation::Substructure { .. } => "substructure",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MolAugConfig {
    pub augmentations: Vec<MolAugmentation>,
    pub max_depth: usize,
}

impl Default for MolAugConfig {
    fn default() -> Self {
        MolAugConfig {
            augmentations: vec![
                MolAugmentation::AtomMask {
                    ratio: crate::molgraph::DEFAULT_MASK_RATIO,
                },
                MolAugmentation::BondDelete {
                    ratio: crate::molgraph::DEFAULT_BOND_RATIO,
                },
            ],
            max_depth: DEFAULT_MAX_DEPTH,
        }
    }
}

fn molecule_records(
    rec: &MoleculeRecord,
    partition: Partition,
    cfg: &MolAugConfig,
    seed: u64,
) -> Result<Vec<GraphRecord>, PipelineError> {
    let mol = parse_smiles(&rec.smiles).map_err(|e| PipelineError::BadRecord {
        id: rec.id.clone(),
        message: e.to_string(),
    })?;
    let (y, y_mask) = mask_labels(&rec.labels);
    let original = build_graph_record(&rec.id, &mol, y, y_mask);
    let mut out = vec![GraphRecord::from_molecule(original.clone(), rec.id.clone(), partition)];
    if partition != Partition::Train {
        return Ok(out);
    }
    let mut tree = None;
    for aug in &cfg.augmentations {
        let mut rng = RngState::derived(seed, &rec.id, aug.name());
        let id = format!("{}#{}", rec.id, aug.name());
        match *aug {
            MolAugmentation::AtomMask { ratio } => {
                out.push(GraphRecord::from_molecule(mask_atoms(&original, ratio, &mut rng)?, id, partition));
            }
            MolAugmentation::BondDelete { ratio } => {
                out.push(GraphRecord::from_molecule(delete_bonds(&original, ratio, &mut rng)?, id, partition));
            }
            MolAugmentation::Substructure { mode } => {
                let tree = tree.get_or_insert_with(|| brics_fragments(&mol, cfg.max_depth));
                // molecules without fragments keep only their original
                if tree.fragment_count() == 0 {
                    continue;
                }
                match mode {
                    SubstructureMode::One => {
                        out.push(GraphRecord::from_molecule(
                            remove_substructure(&original, tree, &mut rng),
                            id,
                            partition,
                        ));
                    }
                    SubstructureMode::All => {
                        for (k, r) in substructure_records(&original, tree).into_iter().enumerate() {
                            out.push(GraphRecord::from_molecule(r, format!("{id}{}", k + 1), partition));
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Graph records for every molecule; train molecules are followed by their
/// augmented records. Augmented molecules carry no SMILES.
pub fn augment_molecules(
    table: &MoleculeTable,
    plan: &SplitPlan,
    cfg: &MolAugConfig,
    seed: u64,
) -> Result<Vec<GraphRecord>, PipelineError> {
    let parts = partitions(plan, table.len())?;
    let per: Vec<Vec<GraphRecord>> = table
        .records
        .par_iter()
        .zip(parts.par_iter())
        .map(|(r, &p)| molecule_records(r, p, cfg, seed))
        .collect::<Result<_, _>>()?;
    Ok(per.into_iter().flatten().collect())
}

// ------------------------------------------------------------ fingerprints

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FpAugMode {
    /// One fingerprint per molecule.
    Plain,
    /// Parent plus fragments with similarity ≥ threshold (train only).
    Break { threshold: f64 },
    /// Replicated FP for every molecule plus random concatenations (train
    /// only).
    Concat(ConcatParams),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FpAugConfig {
    pub spec: FpSpec,
    pub mode: FpAugMode,
    pub max_depth: usize,
}

impl FpAugConfig {
    pub fn fp_break(spec: FpSpec) -> Self {
        FpAugConfig {
            spec,
            mode: FpAugMode::Break {
                threshold: DEFAULT_THRESHOLD,
            },
            max_depth: DEFAULT_MAX_DEPTH,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FpItem {
    pub partition: Partition,
    pub provenance: &'static str,
    pub parent_id: String,
    pub row: FpRow,
}

fn fp_items(rec: &MoleculeRecord, partition: Partition, cfg: &FpAugConfig, seed: u64) -> Result<Vec<FpItem>, PipelineError> {
    let mol = parse_smiles(&rec.smiles).map_err(|e| PipelineError::BadRecord {
        id: rec.id.clone(),
        message: e.to_string(),
    })?;
    let kind = cfg.spec.kind.as_str().to_string();
    let item = |id: String, provenance: &'static str, nbits: usize, hex: String| FpItem {
        partition,
        provenance,
        parent_id: rec.id.clone(),
        row: FpRow {
            id,
            kind: kind.clone(),
            nbits,
            hex,
            labels: rec.labels.clone(),
        },
    };
    let train = partition == Partition::Train;
    let mut out = Vec::new();
    match cfg.mode {
        FpAugMode::Plain => {
            let fp = cfg.spec.compute(&mol)?;
            out.push(item(rec.id.clone(), ORIGINAL, fp.nbits(), fp.to_hex()));
        }
        FpAugMode::Break { threshold } => {
            let tree = if train {
                brics_fragments(&mol, cfg.max_depth)
            } else {
                brics_fragments(&mol, 0)
            };
            for (k, (fp, ())) in fp_break_tree(&tree, &(), &cfg.spec, threshold)?.into_iter().enumerate() {
                if k == 0 {
                    out.push(item(rec.id.clone(), ORIGINAL, fp.nbits(), fp.to_hex()));
                } else {
                    out.push(item(format!("{}#fp_break{k}", rec.id), "fp_break", fp.nbits(), fp.to_hex()));
                }
            }
        }
        FpAugMode::Concat(params) => {
            let p = if train {
                params
            } else {
                ConcatParams {
                    n_concat: 0,
                    max_depth: 0,
                    ..params
                }
            };
            let tree = brics_fragments(&mol, p.max_depth);
            let mut rng = RngState::derived(seed, &rec.id, "fp_concat");
            for (k, (c, ())) in fp_concat_tree(&tree, &(), &cfg.spec, &p, &mut rng)?.into_iter().enumerate() {
                if c.replicated {
                    out.push(item(rec.id.clone(), ORIGINAL, c.nbits(), c.to_hex()));
                } else {
                    out.push(item(format!("{}#fp_concat{k}", rec.id), "fp_concat", c.nbits(), c.to_hex()));
                }
            }
        }
    }
    Ok(out)
}

/// Fingerprint rows for every molecule; augmented rows only for train.
pub fn fingerprint_rows(
    table: &MoleculeTable,
    plan: &SplitPlan,
    cfg: &FpAugConfig,
    seed: u64,
) -> Result<Vec<FpItem>, PipelineError> {
    let parts = partitions(plan, table.len())?;
    let per: Vec<Vec<FpItem>> = table
        .records
        .par_iter()
        .zip(parts.par_iter())
        .map(|(r, &p)| fp_items(r, p, cfg, seed))
        .collect::<Result<_, _>>()?;
    Ok(per.into_iter().flatten().collect())
}

// ------------------------------------------------------------------ facade

pub enum InputDataset<'a> {
    Crystals(&'a [CrystalEntry]),
    Molecules(&'a MoleculeTable),
}

pub enum AugmentConfig {
    Crystal {
        strategies: Vec<Strategy>,
        params: TransformParams,
        graph: GraphParams,
    },
    Molecule(MolAugConfig),
}

/// Graph-record view of either pipeline.
pub fn augment_training_set(
    data: InputDataset<'_>,
    plan: &SplitPlan,
    config: &AugmentConfig,
    seed: u64,
) -> Result<AugmentedDataset, PipelineError> {
    let records = match (data, config) {
        (
            InputDataset::Crystals(entries),
            AugmentConfig::Crystal {
                strategies,
                params,
                graph,
            },
        ) => crystal_graph_records(&augment_crystals(entries, plan, strategies, params, seed)?, graph),
        (InputDataset::Molecules(table), AugmentConfig::Molecule(cfg)) => augment_molecules(table, plan, cfg, seed)?,
        _ => return Err(PipelineError::InconsistentConfig),
    };
    Ok(AugmentedDataset { records })
}
