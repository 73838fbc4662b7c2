//! Fixtures and process helpers shared by the CLI test targets.

#![allow(dead_code)]

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use chemaug::chemio::{write_cif_named, CrystalStructure, Lattice, Site};
use chemaug::rng::RngState;

pub fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_chemaug")
}

/// Runs the binary with `args` and extra environment variables.
pub fn run(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(bin());
    cmd.args(args).env_remove("CHEMAUG_THREADS");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

pub fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

pub fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

pub fn arg(p: &Path) -> &str {
    p.to_str().expect("temp paths are UTF-8")
}

/// `n` small seeded structures plus a labels.csv with one regression task
/// and a sparse second task.
pub fn write_cif_dir(dir: &Path, n: usize, seed: u64) {
    fs::create_dir_all(dir).unwrap();
    let mut rng = RngState::new(seed);
    let mut labels = String::from("id,energy,gap\n");
    for i in 0..n {
        let lattice = Lattice::from_parameters(
            3.5 + 2.0 * rng.next_f64(),
            3.5 + 2.0 * rng.next_f64(),
            3.5 + 2.0 * rng.next_f64(),
            85.0 + 10.0 * rng.next_f64(),
            85.0 + 10.0 * rng.next_f64(),
            85.0 + 10.0 * rng.next_f64(),
        )
        .unwrap();
        let sites = (0..1 + rng.below(4))
            .map(|_| Site {
                element: [3u8, 8, 12, 14, 26, 29][rng.below(6)],
                frac: [rng.next_f64(), rng.next_f64(), rng.next_f64()],
            })
            .collect();
        let id = format!("s{i:03}");
        let s = CrystalStructure::new(lattice, sites).unwrap();
        fs::write(dir.join(format!("{id}.cif")), write_cif_named(&s, &id)).unwrap();
        let gap = if i % 4 == 0 { String::new() } else { format!("{:.3}", rng.next_f64()) };
        labels.push_str(&format!("{id},{:.4},{gap}\n", -3.0 * rng.next_f64()));
    }
    fs::write(dir.join("labels.csv"), labels).unwrap();
}

pub const MOLECULES: [&str; 12] = [
    "CCOC(C)=O",
    "c1ccccc1",
    "CC(=O)Nc1ccccc1",
    "CCO",
    "COc1ccccc1",
    "CCN",
    "CCCl",
    "OC(=O)c1ccccc1",
    "c1ccc(cc1)-c1ccccc1",
    "CNC(C)=O",
    "CCc1ccncc1",
    "O=C(O)CCc1ccc(O)cc1",
];

/// A molecule table of `n` rows cycling through [`MOLECULES`], with an id
/// column and two label columns.
pub fn write_molecule_csv(path: &Path, n: usize) {
    let mut csv = String::from("id,smiles,logp,active\n");
    for i in 0..n {
        let active = if i % 5 == 0 { String::new() } else { (i % 2).to_string() };
        csv.push_str(&format!("mol{i},{},{:.2},{active}\n", MOLECULES[i % MOLECULES.len()], i as f64 * 0.1));
    }
    fs::write(path, csv).unwrap();
}

/// Every file under `root`, keyed by its path relative to `root`.
pub fn tree(root: &Path) -> BTreeMap<PathBuf, Vec<u8>> {
    fn walk(root: &Path, dir: &Path, out: &mut BTreeMap<PathBuf, Vec<u8>>) {
        for entry in fs::read_dir(dir).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                walk(root, &path, out);
            } else {
                out.insert(path.strip_prefix(root).unwrap().to_path_buf(), fs::read(&path).unwrap());
            }
        }
    }
    let mut out = BTreeMap::new();
    walk(root, root, &mut out);
    out
}

pub fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}
