mod common;

use std::fs;

use common::{arg, code, json, run, stderr, tree, write_cif_dir, write_molecule_csv};
use tempfile::tempdir;

#[test]
fn help_and_usage_errors() {
    assert_eq!(code(&run(&["--help"], &[])), 0);
    assert_eq!(code(&run(&["--version"], &[])), 0);
    assert_eq!(code(&run(&[], &[])), 2);
    let bad = run(&["split", "--input", "x.csv"], &[]);
    assert_eq!(code(&bad), 2);
    assert_eq!(stderr(&bad).lines().count(), 1, "{}", stderr(&bad));
    assert_eq!(code(&run(&["frobnicate"], &[])), 2);
}

#[test]
fn bad_thread_count_is_a_usage_error() {
    let dir = tempdir().unwrap();
    let csv = dir.path().join("m.csv");
    write_molecule_csv(&csv, 20);
    let out = dir.path().join("plan.json");
    let args = ["split", "--input", arg(&csv), "--out", arg(&out)];
    for bad in ["0", "-1", "many"] {
        let r = run(&args, &[("CHEMAUG_THREADS", bad)]);
        assert_eq!(code(&r), 2, "{bad}");
        assert!(stderr(&r).contains("CHEMAUG_THREADS"));
    }
    assert_eq!(code(&run(&args, &[("CHEMAUG_THREADS", "2")])), 0);
}

#[test]
fn data_errors_name_the_file() {
    let dir = tempdir().unwrap();
    let missing = dir.path().join("nope.csv");
    let out = dir.path().join("plan.json");
    let r = run(&["split", "--input", arg(&missing), "--out", arg(&out)], &[]);
    assert_eq!(code(&r), 1);
    assert!(stderr(&r).contains("nope.csv"));

    let bad_jsonl = dir.path().join("bad.jsonl");
    fs::write(&bad_jsonl, "{\"id\":\"a\"}\n").unwrap();
    let r = run(&["check", "--input", arg(&bad_jsonl)], &[]);
    assert_eq!(code(&r), 1);
    assert!(stderr(&r).contains("bad.jsonl:1:"), "{}", stderr(&r));

    let empty = dir.path().join("empty");
    fs::create_dir(&empty).unwrap();
    let r = run(&["augment-crystal", "--input", arg(&empty), "--out", arg(&dir.path().join("o"))], &[]);
    assert_eq!(code(&r), 1);
}

#[test]
fn bad_option_values_are_usage_errors() {
    let dir = tempdir().unwrap();
    let csv = dir.path().join("m.csv");
    write_molecule_csv(&csv, 20);
    let out = dir.path().join("o.tsv");
    for extra in [["--nbits", "100"], ["--S", "1.5"], ["--K", "0"]] {
        let mut args = vec!["fingerprint", "--input", arg(&csv), "--out", arg(&out), "--method", "concat"];
        args.extend(extra);
        assert_eq!(code(&run(&args, &[])), 2, "{extra:?}");
    }
    let r = run(
        &["augment-molecule", "--input", arg(&csv), "--out", arg(&out), "--strategies", "shake"],
        &[],
    );
    assert_eq!(code(&r), 2);
    let r = run(
        &["augment-molecule", "--input", arg(&csv), "--out", arg(&out), "--mask-ratio", "2"],
        &[],
    );
    assert_eq!(code(&r), 2);
}

#[test]
fn split_writes_plan_and_manifest() {
    let dir = tempdir().unwrap();
    let csv = dir.path().join("m.csv");
    write_molecule_csv(&csv, 100);
    let plan_path = dir.path().join("plan.json");
    assert_eq!(code(&run(&["split", "--input", arg(&csv), "--out", arg(&plan_path), "--seed", "4"], &[])), 0);
    let plan = json(&plan_path);
    let len = |k: &str| plan[k].as_array().unwrap().len();
    assert_eq!((len("train"), len("valid"), len("test")), (64, 16, 20));
    let manifest = json(&dir.path().join("plan.json.manifest.json"));
    assert_eq!(manifest["command"], "split");
    assert_eq!(manifest["counts"]["train"], 64);
    assert_eq!(manifest["inputs"][0]["path"], "m.csv");
    assert_eq!(manifest["outputs"][0]["path"], "plan.json");
    assert_eq!(manifest["outputs"][0]["sha256"].as_str().unwrap().len(), 64);

    let folds = dir.path().join("folds.json");
    let args = ["split", "--input", arg(&csv), "--out", arg(&folds), "--method", "kfold", "--kfold", "5"];
    assert_eq!(code(&run(&args, &[])), 0);
    assert_eq!(json(&folds).as_array().unwrap().len(), 5);

    // a k-fold plan needs --fold
    let out = dir.path().join("o.jsonl");
    let r = run(&["augment-molecule", "--input", arg(&csv), "--out", arg(&out), "--plan", arg(&folds)], &[]);
    assert_eq!(code(&r), 2);
    let args = ["augment-molecule", "--input", arg(&csv), "--out", arg(&out), "--plan", arg(&folds), "--fold", "2"];
    assert_eq!(code(&run(&args, &[])), 0);
}

#[test]
fn scaffold_split_keeps_scaffolds_together() {
    let dir = tempdir().unwrap();
    let csv = dir.path().join("m.csv");
    write_molecule_csv(&csv, 120);
    let plan_path = dir.path().join("plan.json");
    let args = ["split", "--input", arg(&csv), "--out", arg(&plan_path), "--method", "scaffold"];
    assert_eq!(code(&run(&args, &[])), 0);
    let plan = json(&plan_path);
    let part_of = |i: u64| {
        ["train", "valid", "test"]
            .into_iter()
            .find(|k| plan[*k].as_array().unwrap().iter().any(|v| v.as_u64() == Some(i)))
            .unwrap()
    };
    // rows i and i + 12 repeat the same molecule
    for i in 0..108 {
        assert_eq!(part_of(i), part_of(i + 12));
    }

    let cifs = dir.path().join("cifs");
    write_cif_dir(&cifs, 10, 1);
    let args = ["split", "--input", arg(&cifs), "--out", arg(&plan_path), "--method", "scaffold"];
    assert_eq!(code(&run(&args, &[])), 2);
}

#[test]
fn crystal_pipeline_end_to_end() {
    let dir = tempdir().unwrap();
    let cifs = dir.path().join("cifs");
    write_cif_dir(&cifs, 30, 5);
    let plan = dir.path().join("plan.json");
    assert_eq!(code(&run(&["split", "--input", arg(&cifs), "--out", arg(&plan), "--seed", "2"], &[])), 0);
    let aug = dir.path().join("aug");
    let args = ["augment-crystal", "--input", arg(&cifs), "--out", arg(&aug), "--plan", arg(&plan), "--seed", "2"];
    assert_eq!(code(&run(&args, &[])), 0, "{}", stderr(&run(&args, &[])));

    let n_train = json(&plan)["train"].as_array().unwrap().len();
    let index = fs::read_to_string(aug.join("index.csv")).unwrap();
    assert!(index.starts_with("id,parent_id,provenance,partition,file,energy,gap\n"));
    assert_eq!(index.lines().count() - 1, 30 + 3 * n_train);
    assert!(!index.lines().any(|l| l.contains("__") && !l.contains(",train,")));
    // originals are byte copies
    assert_eq!(fs::read(aug.join("s000.cif")).unwrap(), fs::read(cifs.join("s000.cif")).unwrap());
    let manifest = json(&aug.join("manifest.json"));
    assert_eq!(manifest["counts"]["augmented"], 3 * n_train as u64);
    assert_eq!(manifest["outputs"].as_array().unwrap().len(), 30 + 3 * n_train + 1);

    let graphs = dir.path().join("graphs.jsonl");
    assert_eq!(code(&run(&["export", "--input", arg(&aug), "--out", arg(&graphs)], &[])), 0);
    let text = fs::read_to_string(&graphs).unwrap();
    assert_eq!(text.lines().count(), 30 + 3 * n_train);
    assert!(text.lines().all(|l| l.contains("\"gauss\"")));
    let r = run(&["export", "--input", arg(&aug), "--out", arg(&graphs), "--plan", arg(&plan)], &[]);
    assert_eq!(code(&r), 2);

    let check = run(&["check", "--input", arg(&graphs)], &[]);
    assert_eq!(code(&check), 0, "{}", stderr(&check));
    let report: serde_json::Value = serde_json::from_slice(&check.stdout).unwrap();
    assert_eq!(report["crystal"], (30 + 3 * n_train) as u64);
    assert_eq!(report["augmented"], 3 * n_train as u64);
}

#[test]
fn molecule_pipeline_end_to_end() {
    let dir = tempdir().unwrap();
    let csv = dir.path().join("m.csv");
    write_molecule_csv(&csv, 60);
    let plan = dir.path().join("plan.json");
    assert_eq!(code(&run(&["split", "--input", arg(&csv), "--out", arg(&plan)], &[])), 0);
    let out = dir.path().join("aug.jsonl");
    let args = [
        "augment-molecule",
        "--input",
        arg(&csv),
        "--out",
        arg(&out),
        "--plan",
        arg(&plan),
        "--strategies",
        "atom_mask,bond_delete,substructure",
    ];
    assert_eq!(code(&run(&args, &[])), 0);
    let report_path = dir.path().join("report.json");
    let r = run(&["check", "--input", arg(&out), "--out", arg(&report_path)], &[]);
    assert_eq!(code(&r), 0, "{}", stderr(&r));
    let report = json(&report_path);
    assert_eq!(report["original"], 60);
    assert_eq!(report["molecule"], report["records"]);
    assert!(dir.path().join("report.json.manifest.json").is_file());

    // a record moved out of train is caught
    let text = fs::read_to_string(&out).unwrap();
    let tampered: String = text
        .lines()
        .map(|l| if l.contains("\"provenance\":\"atom_mask\"") { l.replacen("\"train\"", "\"test\"", 1) } else { l.to_string() })
        .collect::<Vec<_>>()
        .join("\n");
    fs::write(&out, tampered + "\n").unwrap();
    let r = run(&["check", "--input", arg(&out)], &[]);
    assert_eq!(code(&r), 1);
    assert!(stderr(&r).contains("tagged test"), "{}", stderr(&r));

    let fp = dir.path().join("fp.tsv");
    for method in ["plain", "break", "concat"] {
        let args = ["fingerprint", "--input", arg(&csv), "--out", arg(&fp), "--method", method, "--plan", arg(&plan)];
        assert_eq!(code(&run(&args, &[])), 0, "{method}");
        let text = fs::read_to_string(&fp).unwrap();
        assert_eq!(text.lines().next().unwrap(), "id\tkind\tnbits\tbits\tlogp\tactive");
        let width = if method == "concat" { 4 * 2048 } else { 2048 };
        assert!(text.lines().skip(1).all(|l| l.split('\t').nth(2) == Some(&width.to_string()[..])));
    }
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempdir().unwrap();
    let csv = dir.path().join("m.csv");
    write_molecule_csv(&csv, 80);
    let cifs = dir.path().join("cifs");
    write_cif_dir(&cifs, 20, 9);
    let outputs = |tag: &str, threads: &str| {
        let root = dir.path().join(tag);
        fs::create_dir(&root).unwrap();
        let env = [("CHEMAUG_THREADS", threads)];
        let p = |name: &str| root.join(name);
        let steps: Vec<Vec<String>> = vec![
            vec!["augment-molecule".into(), "--input".into(), arg(&csv).into(), "--out".into(), arg(&p("m.jsonl")).into(), "--strategies".into(), "atom_mask,bond_delete,substructure_all".into()],
            vec!["fingerprint".into(), "--input".into(), arg(&csv).into(), "--out".into(), arg(&p("fp.tsv")).into(), "--method".into(), "concat".into()],
            vec!["augment-crystal".into(), "--input".into(), arg(&cifs).into(), "--out".into(), arg(&p("aug")).into(), "--strategies".into(), "perturb,translate,rotate,swap_axes,supercell".into()],
            vec!["export".into(), "--input".into(), arg(&p("aug")).into(), "--out".into(), arg(&p("g.jsonl")).into()],
        ];
        for step in steps {
            let args: Vec<&str> = step.iter().map(String::as_str).collect();
            let r = run(&args, &env);
            assert_eq!(code(&r), 0, "{step:?}: {}", stderr(&r));
        }
        tree(&root)
    };
    let a = outputs("a", "1");
    let b = outputs("b", "4");
    assert_eq!(a.keys().collect::<Vec<_>>(), b.keys().collect::<Vec<_>>());
    for (k, v) in &a {
        assert!(b[k] == *v, "{} differs", k.display());
    }
}
