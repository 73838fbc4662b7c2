//! neighbor_list against a plain ±3-cell image scan written independently
//! of the library's search-range logic.

use chemaug::chemio::{parse_cif, CrystalStructure, Lattice, Site};
use chemaug::crystal::{build_crystal_graph, neighbor_list, Neighbor};
use chemaug::rng::RngState;

const TIE: f64 = 1e-9;

fn brute_force(s: &CrystalStructure, cutoff: f64) -> Vec<(usize, usize, [i32; 3], f64)> {
    let m = s.lattice().rows();
    let mut out = Vec::new();
    for (i, a) in s.sites().iter().enumerate() {
        for (j, b) in s.sites().iter().enumerate() {
            for x in -3..=3 {
                for y in -3..=3 {
                    for z in -3..=3 {
                        if i == j && (x, y, z) == (0, 0, 0) {
                            continue;
                        }
                        let f = [
                            b.frac[0] + f64::from(x) - a.frac[0],
                            b.frac[1] + f64::from(y) - a.frac[1],
                            b.frac[2] + f64::from(z) - a.frac[2],
                        ];
                        // row-vector convention: r = f · M
                        let r: Vec<f64> = (0..3).map(|c| f[0] * m[0][c] + f[1] * m[1][c] + f[2] * m[2][c]).collect();
                        let d = r.iter().map(|v| v * v).sum::<f64>().sqrt();
                        if d <= cutoff {
                            out.push((i, j, [x, y, z], d));
                        }
                    }
                }
            }
        }
    }
    out
}

/// Random cell whose plane spacings are all at least half the cutoff, so
/// the ±3 scan is exhaustive.
fn random_cell(rng: &mut RngState, cutoff: f64) -> CrystalStructure {
    loop {
        let p = [0, 1, 2].map(|_| 3.0 + 5.0 * rng.next_f64());
        let ang = [0, 1, 2].map(|_| 70.0 + 40.0 * rng.next_f64());
        let Ok(lattice) = Lattice::from_parameters(p[0], p[1], p[2], ang[0], ang[1], ang[2]) else {
            continue;
        };
        if lattice.plane_spacings().iter().any(|&h| h < cutoff / 2.0) {
            continue;
        }
        let n = 1 + rng.below(6);
        let sites = (0..n)
            .map(|_| Site {
                element: 1 + rng.below(80) as u8,
                frac: [rng.next_f64(), rng.next_f64(), rng.next_f64()],
            })
            .collect();
        return CrystalStructure::new(lattice, sites).unwrap();
    }
}

fn same_pairs(ours: &[Neighbor], oracle: &[(usize, usize, [i32; 3], f64)], cutoff: f64) -> Result<(), String> {
    let near_cut = |d: f64| (d - cutoff).abs() <= TIE;
    let mut a: Vec<_> = ours.iter().filter(|n| !near_cut(n.distance)).map(|n| (n.i, n.j, n.image)).collect();
    let mut b: Vec<_> = oracle.iter().filter(|o| !near_cut(o.3)).map(|o| (o.0, o.1, o.2)).collect();
    a.sort();
    b.sort();
    if a != b {
        return Err(format!("pair sets differ: {} vs {}", a.len(), b.len()));
    }
    for n in ours {
        if let Some(o) = oracle.iter().find(|o| (o.0, o.1, o.2) == (n.i, n.j, n.image)) {
            if (o.3 - n.distance).abs() > TIE {
                return Err(format!("distance {} vs {}", n.distance, o.3));
            }
        }
    }
    Ok(())
}

#[test]
fn matches_brute_force_on_random_cells() {
    let mut rng = RngState::new(2024);
    for case in 0..100 {
        let cutoff = 4.0 + 4.0 * rng.next_f64();
        let s = random_cell(&mut rng, cutoff);
        let oracle = brute_force(&s, cutoff);
        let full = neighbor_list(&s, cutoff, usize::MAX);
        same_pairs(&full, &oracle, cutoff).unwrap_or_else(|e| panic!("case {case}: {e}"));

        // truncation keeps the k nearest per site
        let k = 1 + rng.below(12);
        let short = neighbor_list(&s, cutoff, k);
        for i in 0..s.len() {
            let mut want: Vec<f64> = oracle.iter().filter(|o| o.0 == i).map(|o| o.3).collect();
            want.sort_by(f64::total_cmp);
            want.truncate(k);
            let got: Vec<f64> = short.iter().filter(|n| n.i == i).map(|n| n.distance).collect();
            assert_eq!(got.len(), want.len(), "case {case} site {i}");
            for (g, w) in got.iter().zip(&want) {
                assert!((g - w).abs() <= TIE, "case {case} site {i}: {g} vs {w}");
            }
        }
    }
}

fn rock_salt() -> CrystalStructure {
    let text = "\
data_NaCl
_cell_length_a 5.64
_cell_length_b 5.64
_cell_length_c 5.64
_cell_angle_alpha 90
_cell_angle_beta 90
_cell_angle_gamma 90
_symmetry_space_group_name_H-M 'F m -3 m'
loop_
_symmetry_equiv_pos_as_xyz
'x, y, z'
'x, y+1/2, z+1/2'
'x+1/2, y, z+1/2'
'x+1/2, y+1/2, z'
loop_
_atom_site_label
_atom_site_type_symbol
_atom_site_fract_x
_atom_site_fract_y
_atom_site_fract_z
Na1 Na 0 0 0
Cl1 Cl 0.5 0.5 0.5
";
    parse_cif(text).unwrap()
}

#[test]
fn rock_salt_first_shell() {
    let s = rock_salt();
    assert_eq!(s.len(), 8);
    let list = neighbor_list(&s, 6.0, usize::MAX);
    for i in 0..s.len() {
        let mine: Vec<&Neighbor> = list.iter().filter(|n| n.i == i).collect();
        let first = mine[0].distance;
        assert!((first - 2.82).abs() < 1e-9, "{first}");
        let shell: Vec<_> = mine.iter().filter(|n| (n.distance - first).abs() < 1e-6).collect();
        assert_eq!(shell.len(), 6);
        assert!(shell.iter().all(|n| s.sites()[n.j].element != s.sites()[i].element));
    }
}

#[test]
fn graph_edges_follow_the_neighbor_list() {
    let s = rock_salt();
    let g = build_crystal_graph(&s, 8.0, 12, 0.2, 0.2);
    assert_eq!(g.node_z.len(), 8);
    assert_eq!(g.edges, neighbor_list(&s, 8.0, 12));
    assert_eq!(g.gauss.len(), 41);
    assert_eq!(g.edges.len(), 8 * 12);
}
