use nalgebra::{Rotation3, Unit, Vector3};

use super::CrystalError;
use crate::chemio::{CrystalStructure, Site};
use crate::rng::RngState;

pub const DEFAULT_MAX_DIST: f64 = 0.5;
pub const DEFAULT_TRANSLATE_FRACTION: f64 = 0.25;

fn check_distance(max_dist: f64) -> Result<(), CrystalError> {
    if max_dist.is_finite() && max_dist >= 0.0 {
        Ok(())
    } else {
        Err(CrystalError::BadDistance(max_dist))
    }
}

/// Random Cartesian displacement: direction on the sphere, then magnitude
/// uniform on [0, max_dist].
fn displacement(rng: &mut RngState, max_dist: f64) -> [f64; 3] {
    let dir = rng.unit_vector();
    let r = max_dist * rng.next_f64();
    dir.map(|c| c * r)
}

/// Moves a site by a Cartesian vector. The step is mapped to fractional
/// space linearly, so a zero vector leaves the coordinates bit-identical.
fn displaced(s: &CrystalStructure, site: &Site, d: [f64; 3]) -> Site {
    let df = s.lattice().to_fractional(&d);
    Site {
        element: site.element,
        frac: [site.frac[0] + df[0], site.frac[1] + df[1], site.frac[2] + df[2]],
    }
}

/// Displaces every site independently by at most `max_dist` Å.
pub fn perturb(s: &CrystalStructure, rng: &mut RngState, max_dist: f64) -> Result<CrystalStructure, CrystalError> {
    check_distance(max_dist)?;
    let sites = s
        .sites()
        .iter()
        .map(|site| {
            let d = displacement(rng, max_dist);
            displaced(s, site, d)
        })
        .collect();
    Ok(s.with_sites(sites))
}

/// Cartesian positions of one rotation step, before wrapping.
#[derive(Debug, Clone, PartialEq)]
pub struct RotationTrace {
    pub centroid: [f64; 3],
    pub axis: [f64; 3],
    pub angle: f64,
    pub before: Vec<[f64; 3]>,
    pub after: Vec<[f64; 3]>,
}

/// Perturbs, then rotates all sites rigidly about their Cartesian centroid.
pub fn rotate(s: &CrystalStructure, rng: &mut RngState, max_dist: f64) -> Result<CrystalStructure, CrystalError> {
    rotate_traced(s, rng, max_dist).map(|(out, _)| out)
}

/// [`rotate`] plus the pre-wrap positions on either side of the rotation.
pub fn rotate_traced(
    s: &CrystalStructure,
    rng: &mut RngState,
    max_dist: f64,
) -> Result<(CrystalStructure, RotationTrace), CrystalError> {
    let perturbed = perturb(s, rng, max_dist)?;
    let axis = rng.unit_vector();
    let angle = std::f64::consts::TAU * rng.next_f64();

    let lattice = perturbed.lattice();
    let before: Vec<[f64; 3]> = perturbed.sites().iter().map(|x| lattice.to_cartesian(&x.frac)).collect();
    let n = before.len() as f64;
    let mut centroid = [0.0; 3];
    for p in &before {
        for k in 0..3 {
            centroid[k] += p[k];
        }
    }
    let centroid = centroid.map(|c| c / n);
    let c = Vector3::from(centroid);
    let rot = Rotation3::from_axis_angle(&Unit::new_normalize(Vector3::from(axis)), angle);
    let after: Vec<[f64; 3]> = before
        .iter()
        .map(|p| {
            let v = c + rot * (Vector3::from(*p) - c);
            [v.x, v.y, v.z]
        })
        .collect();
    let sites = perturbed
        .sites()
        .iter()
        .zip(&after)
        .map(|(site, p)| Site {
            element: site.element,
            frac: lattice.to_fractional(p),
        })
        .collect();
    let out = perturbed.with_sites(sites);
    Ok((
        out,
        RotationTrace {
            centroid,
            axis,
            angle,
            before,
            after,
        },
    ))
}

/// An unordered pair of fractional axes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AxisPair {
    XY,
    YZ,
    XZ,
}

impl AxisPair {
    pub const ALL: [AxisPair; 3] = [AxisPair::XY, AxisPair::YZ, AxisPair::XZ];

    pub fn indices(self) -> (usize, usize) {
        match self {
            AxisPair::XY => (0, 1),
            AxisPair::YZ => (1, 2),
            AxisPair::XZ => (0, 2),
        }
    }
}

/// Exchanges two fractional components on every site; lattice unchanged.
pub fn swap_axes_pair(s: &CrystalStructure, pair: AxisPair) -> CrystalStructure {
    let (a, b) = pair.indices();
    let sites = s
        .sites()
        .iter()
        .map(|site| {
            let mut frac = site.frac;
            frac.swap(a, b);
            Site {
                element: site.element,
                frac,
            }
        })
        .collect();
    s.with_sites(sites)
}

/// [`swap_axes_pair`] with the pair drawn uniformly.
pub fn swap_axes(s: &CrystalStructure, rng: &mut RngState) -> CrystalStructure {
    swap_axes_pair(s, AxisPair::ALL[rng.below(3)])
}

/// Number of sites moved by [`translate_sites`].
pub fn translate_count(n_sites: usize, fraction: f64) -> usize {
    ((fraction * n_sites as f64).round() as usize).clamp(1, n_sites.max(1))
}

/// Displaces `max(1, round(fraction·n))` distinct sites, leaving the rest
/// untouched.
pub fn translate_sites(
    s: &CrystalStructure,
    rng: &mut RngState,
    fraction: f64,
    max_dist: f64,
) -> Result<CrystalStructure, CrystalError> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(CrystalError::BadFraction(fraction));
    }
    check_distance(max_dist)?;
    let chosen = rng.sample_indices(s.len(), translate_count(s.len(), fraction));
    let mut sites = s.sites().to_vec();
    for i in chosen {
        let d = displacement(rng, max_dist);
        sites[i] = displaced(s, &sites[i], d);
    }
    Ok(s.with_sites(sites))
}

/// Replicates the cell `scale[k]` times along lattice vector k. Sites are
/// listed per original site over offsets in lexicographic order.
pub fn supercell(s: &CrystalStructure, scale: [u32; 3]) -> Result<CrystalStructure, CrystalError> {
    if scale.iter().any(|&k| k < 1) {
        return Err(CrystalError::BadScale(scale));
    }
    let lattice = s.lattice().scaled(scale);
    let f = scale.map(f64::from);
    let mut sites = Vec::with_capacity(s.len() * scale.iter().map(|&k| k as usize).product::<usize>());
    for site in s.sites() {
        for i in 0..scale[0] {
            for j in 0..scale[1] {
                for k in 0..scale[2] {
                    let off = [f64::from(i), f64::from(j), f64::from(k)];
                    sites.push(Site {
                        element: site.element,
                        frac: [
                            (site.frac[0] + off[0]) / f[0],
                            (site.frac[1] + off[1]) / f[1],
                            (site.frac[2] + off[2]) / f[2],
                        ],
                    });
                }
            }
        }
    }
    Ok(CrystalStructure::from_parts_unchecked(lattice, sites))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chemio::Lattice;

    fn nacl() -> CrystalStructure {
        CrystalStructure::new(
            Lattice::cubic(5.64),
            vec![
                Site { element: 11, frac: [0.0; 3] },
                Site { element: 17, frac: [0.5; 3] },
            ],
        )
        .unwrap()
    }

    fn cubic_sites(n: usize) -> CrystalStructure {
        let sites = (0..n)
            .map(|i| Site {
                element: 3 + i as u8,
                frac: [i as f64 / n as f64, 0.25, 0.5],
            })
            .collect();
        CrystalStructure::new(Lattice::cubic(10.0), sites).unwrap()
    }

    #[test]
    fn zero_perturbation_is_identity() {
        let s = nacl();
        assert_eq!(perturb(&s, &mut RngState::new(3), 0.0).unwrap(), s);
        assert_eq!(translate_sites(&s, &mut RngState::new(3), 0.25, 0.0).unwrap(), s);
    }

    #[test]
    fn perturb_bound_and_determinism() {
        let s = nacl();
        let a = perturb(&s, &mut RngState::new(9), 0.5).unwrap();
        let b = perturb(&s, &mut RngState::new(9), 0.5).unwrap();
        assert_eq!(a, b);
        for (x, y) in s.sites().iter().zip(a.sites()) {
            let d = [y.frac[0] - x.frac[0], y.frac[1] - x.frac[1], y.frac[2] - x.frac[2]];
            assert!(s.lattice().min_image_distance(&d) <= 0.5 + 1e-9);
        }
        assert!(perturb(&s, &mut RngState::new(9), -1.0).is_err());
    }

    #[test]
    fn swap_examples() {
        let s = CrystalStructure::new(Lattice::cubic(3.0), vec![Site { element: 1, frac: [0.1, 0.2, 0.3] }]).unwrap();
        assert_eq!(swap_axes_pair(&s, AxisPair::XY).sites()[0].frac, [0.2, 0.1, 0.3]);
        assert_eq!(swap_axes_pair(&swap_axes_pair(&s, AxisPair::XZ), AxisPair::XZ), s);
        let fixed = CrystalStructure::new(Lattice::cubic(3.0), vec![Site { element: 1, frac: [0.4, 0.4, 0.9] }]).unwrap();
        assert_eq!(swap_axes_pair(&fixed, AxisPair::XY), fixed);
    }

    #[test]
    fn translate_counts() {
        let s = cubic_sites(8);
        let out = translate_sites(&s, &mut RngState::new(1), 0.25, 0.5).unwrap();
        let moved = s.sites().iter().zip(out.sites()).filter(|(a, b)| a != b).count();
        assert_eq!(moved, 2);
        let one = cubic_sites(1);
        let out = translate_sites(&one, &mut RngState::new(1), 0.25, 0.5).unwrap();
        assert_ne!(out, one);
        assert_eq!(translate_count(10, 0.25), 3); // 2.5 rounds away from zero
        assert!(translate_sites(&s, &mut RngState::new(1), 0.0, 0.5).is_err());
    }

    #[test]
    fn rotation_is_rigid() {
        let s = cubic_sites(5);
        let (_, trace) = rotate_traced(&s, &mut RngState::new(42), 0.5).unwrap();
        for i in 0..5 {
            for j in 0..5 {
                let d = |p: &[[f64; 3]]| {
                    ((p[i][0] - p[j][0]).powi(2) + (p[i][1] - p[j][1]).powi(2) + (p[i][2] - p[j][2]).powi(2)).sqrt()
                };
                assert!((d(&trace.before) - d(&trace.after)).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn single_site_rotation_is_perturbation_only() {
        let s = cubic_sites(1);
        let r = rotate(&s, &mut RngState::new(5), 0.5).unwrap();
        let p = perturb(&s, &mut RngState::new(5), 0.5).unwrap();
        for (a, b) in r.sites()[0].frac.iter().zip(p.sites()[0].frac) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn supercell_counts() {
        let s = nacl();
        let big = supercell(&s, [2, 2, 2]).unwrap();
        assert_eq!(big.len(), 16);
        assert!((big.lattice().volume() / s.lattice().volume() - 8.0).abs() < 1e-12);
        assert_eq!(supercell(&s, [1, 1, 1]).unwrap(), s);
        assert!(matches!(supercell(&s, [0, 1, 1]), Err(CrystalError::BadScale(_))));
        assert_eq!(big.sites()[1].frac, [0.0, 0.0, 0.5]);
    }
}
