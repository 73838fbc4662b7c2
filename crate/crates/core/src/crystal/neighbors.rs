use std::cmp::Ordering;

use crate::chemio::CrystalStructure;

pub const DEFAULT_CUTOFF: f64 = 8.0;
pub const DEFAULT_MAX_NEIGHBORS: usize = 12;

/// Directed periodic neighbor pair: site `j` shifted by `image` lattice
/// vectors, as seen from site `i`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Neighbor {
    pub i: usize,
    pub j: usize,
    pub image: [i32; 3],
    pub distance: f64,
}

/// Distance from site `i` to the `image` copy of site `j`.
pub fn pair_distance(s: &CrystalStructure, i: usize, j: usize, image: [i32; 3]) -> f64 {
    let (a, b) = (&s.sites()[i].frac, &s.sites()[j].frac);
    let d = [
        b[0] + f64::from(image[0]) - a[0],
        b[1] + f64::from(image[1]) - a[1],
        b[2] + f64::from(image[2]) - a[2],
    ];
    let c = s.lattice().to_cartesian(&d);
    (c[0] * c[0] + c[1] * c[1] + c[2] * c[2]).sqrt()
}

/// Image offsets to scan per axis so that no pair within `cutoff` is missed.
pub fn image_range(s: &CrystalStructure, cutoff: f64) -> [i32; 3] {
    s.lattice().plane_spacings().map(|h| (cutoff / h).ceil() as i32 + 1)
}

/// Every pair within `cutoff` seen from site `i`, in scan order.
pub(crate) fn scan_site(s: &CrystalStructure, i: usize, cutoff: f64, range: [i32; 3], out: &mut Vec<Neighbor>) {
    for j in 0..s.len() {
        for x in -range[0]..=range[0] {
            for y in -range[1]..=range[1] {
                for z in -range[2]..=range[2] {
                    let image = [x, y, z];
                    if i == j && image == [0, 0, 0] {
                        continue;
                    }
                    let distance = pair_distance(s, i, j, image);
                    if distance <= cutoff {
                        out.push(Neighbor { i, j, image, distance });
                    }
                }
            }
        }
    }
}

fn order(a: &Neighbor, b: &Neighbor) -> Ordering {
    a.distance
        .total_cmp(&b.distance)
        .then(a.j.cmp(&b.j))
        .then(a.image.cmp(&b.image))
}

/// Neighbors of every site within `cutoff`, at most `max_neighbors` per site.
/// Per site the list is sorted by distance, then `j`, then image; sites are
/// listed in index order.
pub fn neighbor_list(s: &CrystalStructure, cutoff: f64, max_neighbors: usize) -> Vec<Neighbor> {
    let range = image_range(s, cutoff);
    let mut out = Vec::new();
    let mut buf = Vec::new();
    for i in 0..s.len() {
        buf.clear();
        scan_site(s, i, cutoff, range, &mut buf);
        buf.sort_by(order);
        out.extend(buf.iter().take(max_neighbors));
    }
    out
}
