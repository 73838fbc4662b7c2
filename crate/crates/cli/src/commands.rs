use std::fs::{self, File};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use chemaug::chemio::{parse_cif, write_cif_named};
use chemaug::crystal::{augmented_file_name, parse_strategies, TransformParams};
use chemaug::fingerprint::{header_line, ConcatParams, FpKind, FpSpec};
use chemaug::molgraph::DEFAULT_MAX_DEPTH;
use chemaug::pipeline::{
    augment_crystals, augment_molecules, crystal_graph_records, export_jsonl, fingerprint_rows, kfold,
    random_split, record_from_json, scaffold_split, smoke_forward, CrystalItem, FpAugConfig, FpAugMode,
    GraphBody, GraphParams, MolAugConfig, MolAugmentation, Partition, SplitPlan, SubstructureMode, DEFAULT_DIM,
    ORIGINAL,
};

use crate::args::*;
use crate::error::{CliError, CliResult};
use crate::inputs::{list_cif_files, load_cif_dir, load_table, read_text, resolve_plan, INDEX_FILE};
use crate::manifest::{input_entry, manifest_path_for_file, output_entry, parent_dir, Manifest};

fn config<T: Serialize>(args: &T) -> serde_json::Value {
    serde_json::to_value(args).expect("arguments serialize")
}

fn create(path: &Path) -> CliResult<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    File::create(path).map(BufWriter::new).map_err(|e| CliError::io(path, e))
}

/// Writes the manifest of a single-file output next to it.
fn finish_file(mut manifest: Manifest, inputs: &[&Path], out: &Path) -> CliResult<()> {
    for p in inputs {
        manifest.inputs.push(input_entry(p)?);
    }
    manifest.outputs.push(output_entry(&parent_dir(out), out)?);
    manifest.write(&manifest_path_for_file(out))
}

fn count_partitions(manifest: &mut Manifest, parts: impl Iterator<Item = Partition>) {
    let (mut train, mut valid, mut test) = (0, 0, 0);
    for p in parts {
        match p {
            Partition::Train => train += 1,
            Partition::Valid => valid += 1,
            Partition::Test => test += 1,
        }
    }
    manifest.count("train", train).count("valid", valid).count("test", test);
}

fn check_ratio(name: &str, v: f64) -> CliResult<()> {
    if (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        Err(CliError::usage(format!("{name} must be in [0, 1], got {v}")))
    }
}

// ------------------------------------------------------------------- split

pub fn split(args: &SplitArgs) -> CliResult<()> {
    let mut manifest = Manifest::new("split", config(args));
    let mut inputs: Vec<PathBuf> = Vec::new();
    let table = if args.input.is_dir() {
        inputs.extend(list_cif_files(&args.input)?);
        None
    } else {
        inputs.push(args.input.clone());
        Some(load_table(&args.input)?)
    };
    let n = table.as_ref().map_or(inputs.len(), |t| t.len());
    let data_err = |e: chemaug::pipeline::PipelineError| CliError::data(&args.input, None, e);
    let json = match args.method {
        SplitMethodArg::Random => {
            let plan = random_split(n, args.seed).map_err(data_err)?;
            manifest.count("train", plan.train.len()).count("valid", plan.valid.len()).count("test", plan.test.len());
            serde_json::to_string_pretty(&plan)
        }
        SplitMethodArg::Scaffold => {
            let table = table
                .as_ref()
                .ok_or_else(|| CliError::usage("scaffold split needs a molecule table, not a CIF directory"))?;
            let plan = scaffold_split(table, [0.8, 0.1, 0.1]).map_err(data_err)?;
            manifest.count("train", plan.train.len()).count("valid", plan.valid.len()).count("test", plan.test.len());
            serde_json::to_string_pretty(&plan)
        }
        SplitMethodArg::Kfold => {
            if args.kfold < 2 {
                return Err(CliError::usage(format!("--kfold must be at least 2, got {}", args.kfold)));
            }
            let plans: Vec<SplitPlan> = kfold(n, args.kfold, args.seed).map_err(data_err)?;
            manifest.count("folds", plans.len());
            serde_json::to_string_pretty(&plans)
        }
    }
    .expect("plan serializes");
    manifest.count("records", n);
    let mut w = create(&args.out)?;
    writeln!(w, "{json}").and_then(|_| w.flush()).map_err(|e| CliError::io(&args.out, e))?;
    drop(w);
    let refs: Vec<&Path> = inputs.iter().map(PathBuf::as_path).collect();
    finish_file(manifest, &refs, &args.out)
}

// --------------------------------------------------------- augment-crystal

fn item_file(item: &CrystalItem) -> String {
    match item.strategy {
        None => format!("{}.cif", item.id),
        Some(s) => augmented_file_name(&item.parent_id, s),
    }
}

pub fn augment_crystal(args: &AugmentCrystalArgs) -> CliResult<()> {
    let strategies = parse_strategies(&args.strategies).map_err(|e| CliError::usage(e.to_string()))?;
    let dir = load_cif_dir(&args.input)?;
    let plan = resolve_plan(&args.plan, &args.input, dir.entries.len(), args.seed)?;
    let items = augment_crystals(&dir.entries, &plan, &strategies, &TransformParams::default(), args.seed)
        .map_err(|e| CliError::data(&args.input, None, e))?;

    fs::create_dir_all(&args.out).map_err(|e| CliError::io(&args.out, e))?;
    let originals: std::collections::HashMap<&str, &Path> =
        dir.files.iter().map(|p| (p.file_stem().and_then(|s| s.to_str()).unwrap_or(""), p.as_path())).collect();
    items.par_iter().try_for_each(|item| {
        let target = args.out.join(item_file(item));
        match item.strategy {
            // originals are copied byte for byte
            None => fs::copy(originals[item.id.as_str()], &target).map(|_| ()),
            Some(_) => fs::write(&target, write_cif_named(&item.structure, &item.id)),
        }
        .map_err(|e| CliError::io(&target, e))
    })?;

    let index_path = args.out.join(INDEX_FILE);
    let mut w = csv::Writer::from_writer(create(&index_path)?);
    let mut header = vec!["id", "parent_id", "provenance", "partition", "file"];
    header.extend(dir.task_names.iter().map(String::as_str));
    let csv_err = |e: csv::Error| CliError::data(&index_path, None, e);
    w.write_record(&header).map_err(csv_err)?;
    for item in &items {
        let mut row = vec![
            item.id.clone(),
            item.parent_id.clone(),
            item.provenance().to_string(),
            item.partition.as_str().to_string(),
            item_file(item),
        ];
        row.extend(item.labels.iter().map(|l| l.map(|v| v.to_string()).unwrap_or_default()));
        w.write_record(&row).map_err(csv_err)?;
    }
    w.flush().map_err(|e| CliError::io(&index_path, e))?;
    drop(w);

    let mut manifest = Manifest::new("augment-crystal", config(args));
    for p in dir.files.iter().chain(&dir.labels_file) {
        manifest.inputs.push(input_entry(p)?);
    }
    if let Some(p) = &args.plan.plan {
        manifest.inputs.push(input_entry(p)?);
    }
    let augmented = items.iter().filter(|i| i.strategy.is_some()).count();
    manifest
        .count("structures", dir.entries.len())
        .count("augmented", augmented)
        .count("records", items.len())
        .count("files", items.len() + 1);
    count_partitions(&mut manifest, items.iter().map(|i| i.partition));
    let mut outputs: Vec<PathBuf> = items.iter().map(|i| args.out.join(item_file(i))).collect();
    outputs.push(index_path);
    outputs.sort();
    manifest.outputs = outputs
        .par_iter()
        .map(|p| output_entry(&args.out, p))
        .collect::<CliResult<_>>()?;
    manifest.write(&args.out.join("manifest.json"))
}

// -------------------------------------------------------- augment-molecule

fn mol_augmentations(args: &AugmentMoleculeArgs) -> CliResult<Vec<MolAugmentation>> {
    check_ratio("--mask-ratio", args.mask_ratio)?;
    check_ratio("--bond-ratio", args.bond_ratio)?;
    args.strategies
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| match s {
            "atom_mask" => Ok(MolAugmentation::AtomMask { ratio: args.mask_ratio }),
            "bond_delete" => Ok(MolAugmentation::BondDelete { ratio: args.bond_ratio }),
            "substructure" => Ok(MolAugmentation::Substructure {
                mode: SubstructureMode::One,
            }),
            "substructure_all" => Ok(MolAugmentation::Substructure {
                mode: SubstructureMode::All,
            }),
            other => Err(CliError::usage(format!("unknown molecule strategy {other:?}"))),
        })
        .collect()
}

fn write_graph_file(
    records: &[chemaug::pipeline::GraphRecord],
    out: &Path,
    manifest: &mut Manifest,
) -> CliResult<()> {
    let w = create(out)?;
    let n = export_jsonl(records, w).map_err(|e| CliError::io(out, e))?;
    manifest
        .count("records", n)
        .count("augmented", records.iter().filter(|r| !r.is_original()).count());
    count_partitions(manifest, records.iter().map(|r| r.partition));
    Ok(())
}

pub fn augment_molecule(args: &AugmentMoleculeArgs) -> CliResult<()> {
    let augmentations = mol_augmentations(args)?;
    let table = load_table(&args.input)?;
    let plan = resolve_plan(&args.plan, &args.input, table.len(), args.seed)?;
    let cfg = MolAugConfig {
        augmentations,
        max_depth: DEFAULT_MAX_DEPTH,
    };
    let records = augment_molecules(&table, &plan, &cfg, args.seed).map_err(|e| CliError::data(&args.input, None, e))?;
    let mut manifest = Manifest::new("augment-molecule", config(args));
    manifest.count("molecules", table.len()).count("dropped", table.dropped_count());
    write_graph_file(&records, &args.out, &mut manifest)?;
    let mut inputs = vec![args.input.as_path()];
    inputs.extend(args.plan.plan.as_deref());
    finish_file(manifest, &inputs, &args.out)
}

// ------------------------------------------------------------- fingerprint

pub fn fingerprint(args: &FingerprintArgs) -> CliResult<()> {
    if args.nbits < 8 || !args.nbits.is_power_of_two() {
        return Err(CliError::usage(format!("--nbits must be a power of two >= 8, got {}", args.nbits)));
    }
    check_ratio("--S", args.s)?;
    if args.k == 0 {
        return Err(CliError::usage("--K must be at least 1"));
    }
    let kind = match args.fp_kind {
        FpKindArg::Ecfp => FpKind::Ecfp,
        FpKindArg::Rdkfp => FpKind::Rdkfp,
    };
    let mode = match args.method {
        FpMethodArg::Plain => FpAugMode::Plain,
        FpMethodArg::Break => FpAugMode::Break { threshold: args.s },
        FpMethodArg::Concat => FpAugMode::Concat(ConcatParams {
            k: args.k,
            n_concat: args.n_concat,
            with_replacement: !args.without_replacement,
            max_depth: DEFAULT_MAX_DEPTH,
        }),
    };
    let cfg = FpAugConfig {
        spec: FpSpec {
            kind,
            nbits: args.nbits,
        },
        mode,
        max_depth: DEFAULT_MAX_DEPTH,
    };
    let table = load_table(&args.input)?;
    let plan = resolve_plan(&args.plan, &args.input, table.len(), args.seed)?;
    let rows = fingerprint_rows(&table, &plan, &cfg, args.seed).map_err(|e| CliError::data(&args.input, None, e))?;

    let mut w = create(&args.out)?;
    let io_err = |e| CliError::io(&args.out, e);
    writeln!(w, "{}", header_line(&table.task_names)).map_err(io_err)?;
    for item in &rows {
        item.row.write_to(&mut w).map_err(io_err)?;
    }
    w.flush().map_err(io_err)?;
    drop(w);

    let mut manifest = Manifest::new("fingerprint", config(args));
    manifest
        .count("molecules", table.len())
        .count("dropped", table.dropped_count())
        .count("rows", rows.len())
        .count("augmented", rows.iter().filter(|r| r.provenance != ORIGINAL).count());
    count_partitions(&mut manifest, rows.iter().map(|r| r.partition));
    let mut inputs = vec![args.input.as_path()];
    inputs.extend(args.plan.plan.as_deref());
    finish_file(manifest, &inputs, &args.out)
}

// ------------------------------------------------------------------ export

fn parse_partition(s: &str) -> Option<Partition> {
    match s {
        "train" => Some(Partition::Train),
        "valid" => Some(Partition::Valid),
        "test" => Some(Partition::Test),
        _ => None,
    }
}

/// Reads an augment-crystal directory back through its index.
fn load_indexed_crystals(dir: &Path) -> CliResult<(Vec<CrystalItem>, Vec<PathBuf>)> {
    let index = dir.join(INDEX_FILE);
    let mut rdr = csv::Reader::from_path(&index).map_err(|e| CliError::data(&index, None, e))?;
    let headers = rdr.headers().map_err(|e| CliError::data(&index, Some(1), e))?.clone();
    let expected = ["id", "parent_id", "provenance", "partition", "file"];
    if headers.len() < expected.len() || headers.iter().zip(expected).any(|(h, e)| h != e) {
        return Err(CliError::data(&index, Some(1), "unexpected header"));
    }
    let mut rows = Vec::new();
    for row in rdr.records() {
        let row = row.map_err(|e| {
            let line = e.position().map(|p| p.line());
            CliError::data(&index, line, e)
        })?;
        let line = row.position().map_or(0, |p| p.line());
        let partition = parse_partition(&row[3])
            .ok_or_else(|| CliError::data(&index, Some(line), format!("bad partition {:?}", &row[3])))?;
        let mut labels = Vec::new();
        for k in expected.len()..headers.len() {
            let cell = row.get(k).unwrap_or("").trim();
            labels.push(if cell.is_empty() {
                None
            } else {
                Some(cell.parse::<f64>().map_err(|_| {
                    CliError::data(&index, Some(line), format!("bad number {cell:?} in column {:?}", &headers[k]))
                })?)
            });
        }
        rows.push((line, row[0].to_string(), row[1].to_string(), row[2].to_string(), partition, row[4].to_string(), labels));
    }
    let files: Vec<PathBuf> = rows.iter().map(|r| dir.join(&r.5)).collect();
    let items = rows
        .into_par_iter()
        .zip(files.par_iter())
        .map(|((line, id, parent_id, provenance, partition, _, labels), path)| {
            let structure = parse_cif(&read_text(path)?).map_err(|e| CliError::data(path, e.line().map(|l| l as u64), e))?;
            let strategy = if provenance == ORIGINAL {
                None
            } else {
                Some(
                    provenance
                        .parse()
                        .map_err(|_| CliError::data(&index, Some(line), format!("unknown provenance {provenance:?}")))?,
                )
            };
            Ok(CrystalItem {
                id,
                parent_id,
                strategy,
                partition,
                structure,
                labels,
            })
        })
        .collect::<CliResult<Vec<_>>>()?;
    let mut inputs = files;
    inputs.push(index);
    Ok((items, inputs))
}

pub fn export(args: &ExportArgs) -> CliResult<()> {
    if !(args.cutoff.is_finite() && args.cutoff > 0.0) {
        return Err(CliError::usage(format!("--cutoff must be positive, got {}", args.cutoff)));
    }
    let mut manifest = Manifest::new("export", config(args));
    let (records, inputs) = if args.input.is_dir() {
        if args.plan.plan.is_some() || args.plan.fold.is_some() {
            return Err(CliError::usage("crystal directories carry their own partitions; drop --plan/--fold"));
        }
        let (items, inputs) = load_indexed_crystals(&args.input)?;
        let gp = GraphParams {
            cutoff: args.cutoff,
            max_neighbors: args.max_neighbors,
            ..GraphParams::default()
        };
        (crystal_graph_records(&items, &gp), inputs)
    } else {
        let table = load_table(&args.input)?;
        let plan = resolve_plan(&args.plan, &args.input, table.len(), args.seed)?;
        let cfg = MolAugConfig {
            augmentations: Vec::new(),
            max_depth: 0,
        };
        let records =
            augment_molecules(&table, &plan, &cfg, args.seed).map_err(|e| CliError::data(&args.input, None, e))?;
        let mut inputs = vec![args.input.clone()];
        inputs.extend(args.plan.plan.clone());
        (records, inputs)
    };
    write_graph_file(&records, &args.out, &mut manifest)?;
    let refs: Vec<&Path> = inputs.iter().map(PathBuf::as_path).collect();
    finish_file(manifest, &refs, &args.out)
}

// ------------------------------------------------------------------- check

#[derive(Debug, Default, Serialize)]
struct CheckReport {
    records: usize,
    original: usize,
    augmented: usize,
    molecule: usize,
    crystal: usize,
    train: usize,
    valid: usize,
    test: usize,
}

pub fn check(args: &CheckArgs) -> CliResult<()> {
    let file = File::open(&args.input).map_err(|e| CliError::io(&args.input, e))?;
    let mut report = CheckReport::default();
    let mut train_originals = std::collections::HashSet::new();
    let mut pending_parents: Vec<(u64, String)> = Vec::new();
    for (k, line) in BufReader::new(file).lines().enumerate() {
        let line_no = k as u64 + 1;
        let at = |message: String| CliError::data(&args.input, Some(line_no), message);
        let line = line.map_err(|e| at(e.to_string()))?;
        let rec = record_from_json(&line).map_err(|e| at(e.to_string()))?;
        smoke_forward(&rec, DEFAULT_DIM).map_err(|e| at(e.to_string()))?;
        report.records += 1;
        match rec.body {
            GraphBody::Molecule { .. } => report.molecule += 1,
            GraphBody::Crystal(_) => report.crystal += 1,
        }
        match rec.partition {
            Partition::Train => report.train += 1,
            Partition::Valid => report.valid += 1,
            Partition::Test => report.test += 1,
        }
        if rec.is_original() {
            report.original += 1;
            if rec.partition == Partition::Train {
                train_originals.insert(rec.id);
            }
        } else {
            report.augmented += 1;
            if rec.partition != Partition::Train {
                return Err(at(format!("augmented record {:?} is tagged {}", rec.id, rec.partition.as_str())));
            }
            pending_parents.push((line_no, rec.parent_id));
        }
    }
    if let Some((line, parent)) = pending_parents.into_iter().find(|(_, p)| !train_originals.contains(p)) {
        return Err(CliError::data(
            &args.input,
            Some(line),
            format!("parent {parent:?} is not an original train record"),
        ));
    }
    let text = serde_json::to_string_pretty(&report).expect("report serializes");
    match &args.out {
        None => println!("{text}"),
        Some(out) => {
            let mut w = create(out)?;
            writeln!(w, "{text}").and_then(|_| w.flush()).map_err(|e| CliError::io(out, e))?;
            drop(w);
            let mut manifest = Manifest::new("check", config(args));
            manifest.count("records", report.records);
            finish_file(manifest, &[args.input.as_path()], out)?;
        }
    }
    Ok(())
}
