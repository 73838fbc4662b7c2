use proptest::prelude::*;

use chemaug::chemio::{parse_smiles, Atom, Bond, MoleculeGraph};
use chemaug::fingerprint::{
    ecfp, fp_break, fp_concat, rdkfp, tanimoto, BitFingerprint, ConcatParams, FpKind, FpRow, FpSpec,
};
use chemaug::rng::RngState;

fn corpus() -> Vec<MoleculeGraph> {
    include_str!("data/corpus.smi").lines().map(|s| parse_smiles(s).unwrap()).collect()
}

fn renumbered(m: &MoleculeGraph, rng: &mut RngState) -> MoleculeGraph {
    let perm = rng.permutation(m.atom_count());
    let mut atoms: Vec<Option<Atom>> = vec![None; m.atom_count()];
    for (old, a) in m.atoms().iter().enumerate() {
        atoms[perm[old]] = Some(a.clone());
    }
    let mut bonds: Vec<Bond> = m
        .bonds()
        .iter()
        .map(|b| Bond {
            begin: perm[b.begin],
            end: perm[b.end],
            ..b.clone()
        })
        .collect();
    rng.shuffle(&mut bonds);
    MoleculeGraph::from_parts(atoms.into_iter().map(Option::unwrap).collect(), bonds).unwrap()
}

fn bits(nbits: usize) -> impl Strategy<Value = BitFingerprint> {
    prop::collection::btree_set(0..nbits, 0..nbits / 2)
        .prop_map(move |set| BitFingerprint::from_bits(nbits, FpKind::Ecfp, set).unwrap())
}

proptest! {
    #[test]
    fn tanimoto_is_a_similarity(a in bits(256), b in bits(256)) {
        let ab = tanimoto(&a, &b).unwrap();
        prop_assert_eq!(ab, tanimoto(&b, &a).unwrap());
        prop_assert!((0.0..=1.0).contains(&ab));
        if a.count_ones() > 0 {
            prop_assert_eq!(tanimoto(&a, &a).unwrap(), 1.0);
        }
        if a != b {
            prop_assert!(ab < 1.0);
        }
    }

    #[test]
    fn hex_round_trips(a in bits(512)) {
        prop_assert_eq!(BitFingerprint::from_hex(&a.to_hex(), FpKind::Ecfp).unwrap(), a.clone());
        prop_assert_eq!(a.to_hex().len(), 128);
    }
}

#[test]
fn tanimoto_rejects_mismatched_lengths() {
    let a = BitFingerprint::new(64, FpKind::Ecfp).unwrap();
    let b = BitFingerprint::new(128, FpKind::Ecfp).unwrap();
    assert!(tanimoto(&a, &b).is_err());
    // 0/0 is taken as no similarity
    assert_eq!(tanimoto(&a, &a).unwrap(), 0.0);
    assert!(tanimoto(&a, &BitFingerprint::new(64, FpKind::Rdkfp).unwrap()).is_err());
}

#[test]
fn invariant_under_atom_renumbering() {
    let mut rng = RngState::new(3);
    for mol in corpus() {
        let (e, p) = (ecfp(&mol, 2, 2048).unwrap(), rdkfp(&mol, 7, 2048).unwrap());
        for _ in 0..100 {
            let g = renumbered(&mol, &mut rng);
            assert_eq!(ecfp(&g, 2, 2048).unwrap(), e);
            assert_eq!(rdkfp(&g, 7, 2048).unwrap(), p);
        }
    }
}

#[test]
fn larger_radius_only_adds_bits() {
    for mol in corpus() {
        let r0 = ecfp(&mol, 0, 2048).unwrap();
        let r1 = ecfp(&mol, 1, 2048).unwrap();
        let r2 = ecfp(&mol, 2, 2048).unwrap();
        assert!(r0.is_subset_of(&r1) && r1.is_subset_of(&r2));
        let short = rdkfp(&mol, 3, 2048).unwrap();
        assert!(short.is_subset_of(&rdkfp(&mol, 7, 2048).unwrap()));
    }
}

#[test]
fn fp_break_keeps_only_similar_fragments() {
    for kind in [FpKind::Ecfp, FpKind::Rdkfp] {
        let spec = FpSpec::new(kind);
        for mol in corpus() {
            let own = spec.compute(&mol).unwrap();
            let out = fp_break(&mol, &1.5, &spec, 0.6, 2).unwrap();
            assert_eq!(out[0].0, own);
            for (fp, label) in &out {
                assert!(tanimoto(fp, &own).unwrap() >= 0.6);
                assert_eq!(*label, 1.5);
            }
        }
    }
    let mol = parse_smiles("CCO").unwrap();
    assert!(fp_break(&mol, &0, &FpSpec::new(FpKind::Ecfp), 1.5, 2).is_err());
}

#[test]
fn fp_concat_layout() {
    let spec = FpSpec::new(FpKind::Ecfp);
    let params = ConcatParams::default();
    for with_replacement in [true, false] {
        let params = ConcatParams { with_replacement, ..params };
        let mut rng = RngState::new(8);
        for mol in corpus() {
            let own = spec.compute(&mol).unwrap();
            let out = fp_concat(&mol, &"y", &spec, &params, &mut rng).unwrap();
            assert_eq!(out.len(), params.n_concat + 1);
            assert_eq!(out.iter().filter(|(c, _)| c.replicated).count(), 1);
            assert!(out[0].0.replicated);
            assert!(out[0].0.segments.iter().all(|s| *s == own));
            for (c, label) in &out {
                assert_eq!(c.segments.len(), 4);
                assert_eq!(c.nbits(), 4 * spec.nbits);
                assert_eq!(c.to_hex().len(), c.nbits() / 4);
                assert_eq!(*label, "y");
            }
        }
    }
}

#[test]
fn fp_concat_is_seed_deterministic() {
    let spec = FpSpec::new(FpKind::Rdkfp);
    let params = ConcatParams::default();
    for mol in corpus().iter().take(50) {
        let a = fp_concat(mol, &(), &spec, &params, &mut RngState::new(21)).unwrap();
        let b = fp_concat(mol, &(), &spec, &params, &mut RngState::new(21)).unwrap();
        assert_eq!(a, b);
    }
}

#[test]
fn dump_rows_round_trip() {
    let spec = FpSpec::new(FpKind::Ecfp);
    for (i, mol) in corpus().iter().enumerate() {
        let fp = spec.compute(mol).unwrap();
        let row = FpRow {
            id: format!("m{i}"),
            kind: "ecfp".into(),
            nbits: fp.nbits(),
            hex: fp.to_hex(),
            labels: vec![Some(i as f64 * 0.25), None],
        };
        let back = FpRow::parse(&row.to_line()).unwrap();
        assert_eq!(back, row);
        assert_eq!(BitFingerprint::from_hex(&back.hex, FpKind::Ecfp).unwrap(), fp);
    }
    assert!(FpRow::parse("a\tecfp\t8\tfff").is_err());
}
