//! Loading tables, CIF directories and plans, with errors that name the
//! offending file and line.

use std::collections::HashMap;
use std::fs::{self, File};
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use chemaug::chemio::{load_molecule_table, parse_cif, MoleculeTable, TableError, TaskType};
use chemaug::pipeline::{random_split, CrystalEntry, SplitPlan};

use crate::args::PlanArgs;
use crate::error::{CliError, CliResult};

pub const LABELS_FILE: &str = "labels.csv";
pub const INDEX_FILE: &str = "index.csv";

pub fn read_text(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

pub fn load_table(path: &Path) -> CliResult<MoleculeTable> {
    let file = File::open(path).map_err(|e| CliError::io(path, e))?;
    let table = load_molecule_table(file, TaskType::Regression).map_err(|e| {
        let line = match &e {
            TableError::DuplicateId { line, .. } | TableError::BadNumber { line, .. } => Some(*line),
            TableError::Csv(c) => c.position().map(|p| p.line()),
            _ => None,
        };
        CliError::data(path, line, e)
    })?;
    for d in &table.dropped {
        eprintln!("warning: {}:{}: skipped row {:?}: {}", path.display(), d.line, d.smiles, d.error);
    }
    Ok(table)
}

/// CIF files of a directory in file-name order, plus the optional label
/// table. Record ids are file stems.
pub struct CifDir {
    pub files: Vec<PathBuf>,
    pub labels_file: Option<PathBuf>,
    pub task_names: Vec<String>,
    pub entries: Vec<CrystalEntry>,
}

pub fn list_cif_files(dir: &Path) -> CliResult<Vec<PathBuf>> {
    let rd = fs::read_dir(dir).map_err(|e| CliError::io(dir, e))?;
    let mut files = Vec::new();
    for entry in rd {
        let path = entry.map_err(|e| CliError::io(dir, e))?.path();
        let is_cif = path
            .extension()
            .is_some_and(|x| x.eq_ignore_ascii_case("cif"));
        if is_cif && path.is_file() {
            files.push(path);
        }
    }
    files.sort();
    if files.is_empty() {
        return Err(CliError::data(dir, None, "no .cif files found"));
    }
    Ok(files)
}

pub fn stem(path: &Path) -> String {
    path.file_stem().unwrap_or_default().to_string_lossy().into_owned()
}

fn parse_label(path: &Path, line: u64, column: &str, cell: &str) -> CliResult<Option<f64>> {
    let cell = cell.trim();
    if cell.is_empty() {
        return Ok(None);
    }
    cell.parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .map(Some)
        .ok_or_else(|| CliError::data(path, Some(line), format!("bad number {cell:?} in column {column:?}")))
}

type LabelRows = HashMap<String, Vec<Option<f64>>>;

/// `id,<task>...` rows keyed by id.
fn load_labels(path: &Path) -> CliResult<(Vec<String>, LabelRows)> {
    let mut rdr = csv::Reader::from_path(path).map_err(|e| CliError::data(path, None, e))?;
    let headers = rdr.headers().map_err(|e| CliError::data(path, Some(1), e))?.clone();
    if !headers.get(0).is_some_and(|h| h.trim().eq_ignore_ascii_case("id")) {
        return Err(CliError::data(path, Some(1), "first column must be \"id\""));
    }
    let tasks: Vec<String> = headers.iter().skip(1).map(|h| h.trim().to_string()).collect();
    let mut map = HashMap::new();
    for row in rdr.records() {
        let row = row.map_err(|e| {
            let line = e.position().map(|p| p.line());
            CliError::data(path, line, e)
        })?;
        let line = row.position().map_or(0, |p| p.line());
        let id = row.get(0).unwrap_or("").trim().to_string();
        let labels = tasks
            .iter()
            .enumerate()
            .map(|(k, name)| parse_label(path, line, name, row.get(k + 1).unwrap_or("")))
            .collect::<CliResult<Vec<_>>>()?;
        if map.insert(id.clone(), labels).is_some() {
            return Err(CliError::data(path, Some(line), format!("duplicate id {id:?}")));
        }
    }
    Ok((tasks, map))
}

pub fn load_cif_dir(dir: &Path) -> CliResult<CifDir> {
    let files = list_cif_files(dir)?;
    let labels_path = dir.join(LABELS_FILE);
    let (labels_file, task_names, labels) = if labels_path.is_file() {
        let (t, m) = load_labels(&labels_path)?;
        (Some(labels_path), t, m)
    } else {
        (None, Vec::new(), HashMap::new())
    };
    let entries = files
        .par_iter()
        .map(|path| {
            let text = read_text(path)?;
            let structure = parse_cif(&text).map_err(|e| CliError::data(path, e.line().map(|l| l as u64), e))?;
            let id = stem(path);
            let labels = labels.get(&id).cloned().unwrap_or_else(|| vec![None; task_names.len()]);
            Ok(CrystalEntry { id, structure, labels })
        })
        .collect::<CliResult<Vec<_>>>()?;
    Ok(CifDir {
        files,
        labels_file,
        task_names,
        entries,
    })
}

/// The plan named by `--plan`/`--fold`, or a seeded random split.
pub fn resolve_plan(args: &PlanArgs, input: &Path, n: usize, seed: u64) -> CliResult<SplitPlan> {
    let plan = match &args.plan {
        None => {
            if args.fold.is_some() {
                return Err(CliError::usage("--fold needs --plan"));
            }
            random_split(n, seed).map_err(|e| CliError::data(input, None, e))?
        }
        Some(path) => {
            let text = read_text(path)?;
            let value: serde_json::Value = serde_json::from_str(&text)
                .map_err(|e| CliError::data(path, Some(e.line() as u64), e))?;
            let chosen = match (value, args.fold) {
                (serde_json::Value::Array(mut plans), Some(f)) if f < plans.len() => plans.swap_remove(f),
                (serde_json::Value::Array(plans), Some(f)) => {
                    return Err(CliError::usage(format!("--fold {f} out of range for {} folds", plans.len())))
                }
                (serde_json::Value::Array(_), None) => {
                    return Err(CliError::usage("plan file holds k-fold plans; pass --fold"))
                }
                (_, Some(_)) => return Err(CliError::usage("--fold given but the plan file holds a single plan")),
                (v, None) => v,
            };
            let plan: SplitPlan = serde_json::from_value(chosen).map_err(|e| CliError::data(path, None, e))?;
            plan.validate(n).map_err(|e| CliError::data(path, None, e))?;
            plan
        }
    };
    Ok(plan)
}
