use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use chemaug::crystal::{DEFAULT_CUTOFF, DEFAULT_MAX_NEIGHBORS};
use chemaug::fingerprint::{DEFAULT_K, DEFAULT_N_CONCAT, DEFAULT_NBITS, DEFAULT_THRESHOLD};
use chemaug::molgraph::{DEFAULT_BOND_RATIO, DEFAULT_MASK_RATIO};

#[derive(Debug, Parser)]
#[command(name = "chemaug", version, about = "Deterministic augmentation of crystal and molecule datasets")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a train/valid/test plan for a molecule table or a CIF directory
    Split(SplitArgs),
    /// Write augmented CIF files for the train structures of a CIF directory
    AugmentCrystal(AugmentCrystalArgs),
    /// Write graph records for a molecule table, augmenting train molecules
    AugmentMolecule(AugmentMoleculeArgs),
    /// Write a fingerprint dump, optionally with FP Break or FP Concat rows
    Fingerprint(FingerprintArgs),
    /// Write graph records for an augment-crystal directory or a molecule table
    Export(ExportArgs),
    /// Validate a graph-record file and run the smoke forward pass
    Check(CheckArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SplitMethodArg {
    Random,
    Scaffold,
    Kfold,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FpKindArg {
    Ecfp,
    Rdkfp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FpMethodArg {
    Plain,
    Break,
    Concat,
}

/// Which plan to apply. Without `--plan`, a random split is drawn from the
/// seed.
#[derive(Debug, Args, Serialize)]
pub struct PlanArgs {
    /// Plan file written by `split`
    #[arg(long)]
    #[serde(skip)]
    pub plan: Option<PathBuf>,
    /// Fold to use from a k-fold plan file
    #[arg(long)]
    pub fold: Option<usize>,
}

#[derive(Debug, Args, Serialize)]
pub struct SplitArgs {
    /// Molecule CSV or directory of CIF files
    #[arg(long)]
    #[serde(skip)]
    pub input: PathBuf,
    /// Plan file to write
    #[arg(long)]
    #[serde(skip)]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value = "random")]
    pub method: SplitMethodArg,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Number of folds for --method kfold
    #[arg(long, default_value_t = 3)]
    pub kfold: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct AugmentCrystalArgs {
    /// Directory of CIF files, with an optional labels.csv
    #[arg(long)]
    #[serde(skip)]
    pub input: PathBuf,
    /// Output directory
    #[arg(long)]
    #[serde(skip)]
    pub out: PathBuf,
    #[arg(long, default_value = "perturb,rotate,swap_axes")]
    pub strategies: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    #[serde(flatten)]
    pub plan: PlanArgs,
}

#[derive(Debug, Args, Serialize)]
pub struct AugmentMoleculeArgs {
    /// Molecule CSV with a smiles column
    #[arg(long)]
    #[serde(skip)]
    pub input: PathBuf,
    /// JSONL file to write
    #[arg(long)]
    #[serde(skip)]
    pub out: PathBuf,
    /// Any of atom_mask, bond_delete, substructure, substructure_all
    #[arg(long, default_value = "atom_mask,bond_delete")]
    pub strategies: String,
    #[arg(long, default_value_t = DEFAULT_MASK_RATIO)]
    pub mask_ratio: f64,
    #[arg(long, default_value_t = DEFAULT_BOND_RATIO)]
    pub bond_ratio: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    #[serde(flatten)]
    pub plan: PlanArgs,
}

#[derive(Debug, Args, Serialize)]
pub struct FingerprintArgs {
    /// Molecule CSV with a smiles column
    #[arg(long)]
    #[serde(skip)]
    pub input: PathBuf,
    /// TSV file to write
    #[arg(long)]
    #[serde(skip)]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value = "plain")]
    pub method: FpMethodArg,
    #[arg(long, value_enum, default_value = "ecfp")]
    pub fp_kind: FpKindArg,
    #[arg(long, default_value_t = DEFAULT_NBITS)]
    pub nbits: usize,
    /// FP Break similarity threshold
    #[arg(long = "S", default_value_t = DEFAULT_THRESHOLD)]
    pub s: f64,
    /// FP Concat segments per entry
    #[arg(long = "K", default_value_t = DEFAULT_K)]
    pub k: usize,
    /// FP Concat entries per train molecule
    #[arg(long, default_value_t = DEFAULT_N_CONCAT)]
    pub n_concat: usize,
    /// FP Concat draws segments without replacement
    #[arg(long)]
    pub without_replacement: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    #[serde(flatten)]
    pub plan: PlanArgs,
}

#[derive(Debug, Args, Serialize)]
pub struct ExportArgs {
    /// Output directory of augment-crystal, or a molecule CSV
    #[arg(long)]
    #[serde(skip)]
    pub input: PathBuf,
    /// JSONL file to write
    #[arg(long)]
    #[serde(skip)]
    pub out: PathBuf,
    #[arg(long, default_value_t = DEFAULT_CUTOFF)]
    pub cutoff: f64,
    #[arg(long, default_value_t = DEFAULT_MAX_NEIGHBORS)]
    pub max_neighbors: usize,
    /// Seed for the fallback random split of a molecule table
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    #[serde(flatten)]
    pub plan: PlanArgs,
}

#[derive(Debug, Args, Serialize)]
pub struct CheckArgs {
    /// JSONL file to validate
    #[arg(long)]
    #[serde(skip)]
    pub input: PathBuf,
    /// Report file; printed to stdout when absent
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}
