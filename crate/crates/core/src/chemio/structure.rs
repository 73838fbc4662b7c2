use nalgebra::{Matrix3, Vector3};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StructureError {
    #[error("lattice determinant {0} is not positive")]
    NonPositiveVolume(f64),
    #[error("structure has no sites")]
    NoSites,
    #[error("non-finite coordinate on site {0}")]
    NonFinite(usize),
    #[error("site index {index} out of range ({count} sites)")]
    IndexOutOfRange { index: usize, count: usize },
}

/// Lattice with basis vectors as matrix rows (Å). Cartesian = frac · L.
#[derive(Debug, Clone, PartialEq)]
pub struct Lattice {
    rows: Matrix3<f64>,
    inverse: Matrix3<f64>,
}

impl Lattice {
    pub fn new(rows: [[f64; 3]; 3]) -> Result<Self, StructureError> {
        let m = Matrix3::from_row_slice(&[
            rows[0][0], rows[0][1], rows[0][2], rows[1][0], rows[1][1], rows[1][2], rows[2][0],
            rows[2][1], rows[2][2],
        ]);
        let det = m.determinant();
        if !(det > 0.0) || !det.is_finite() {
            return Err(StructureError::NonPositiveVolume(det));
        }
        let inverse = m.try_inverse().ok_or(StructureError::NonPositiveVolume(det))?;
        Ok(Lattice { rows: m, inverse })
    }

    pub fn cubic(a: f64) -> Self {
        Self::new([[a, 0.0, 0.0], [0.0, a, 0.0], [0.0, 0.0, a]]).expect("positive edge")
    }

    /// Standard crystallographic setting: a along x, b in the xy-plane.
    /// Angles in degrees.
    pub fn from_parameters(a: f64, b: f64, c: f64, alpha: f64, beta: f64, gamma: f64) -> Result<Self, StructureError> {
        let (ca, cb, cg) = (cos_deg(alpha), cos_deg(beta), cos_deg(gamma));
        let sg = sin_deg(gamma);
        let cy = (ca - cb * cg) / sg;
        let cz2 = 1.0 - cb * cb - cy * cy;
        if !(cz2 > 0.0) {
            return Err(StructureError::NonPositiveVolume(0.0));
        }
        Self::new([
            [a, 0.0, 0.0],
            [b * cg, b * sg, 0.0],
            [c * cb, c * cy, c * cz2.sqrt()],
        ])
    }

    /// (a, b, c, alpha, beta, gamma) with angles in degrees.
    pub fn parameters(&self) -> [f64; 6] {
        let r = |k: usize| self.rows.row(k).transpose();
        let (a, b, c) = (r(0), r(1), r(2));
        let angle = |u: &Vector3<f64>, v: &Vector3<f64>| {
            (u.dot(v) / (u.norm() * v.norm())).clamp(-1.0, 1.0).acos().to_degrees()
        };
        [a.norm(), b.norm(), c.norm(), angle(&b, &c), angle(&a, &c), angle(&a, &b)]
    }

    pub fn matrix(&self) -> &Matrix3<f64> {
        &self.rows
    }

    pub fn rows(&self) -> [[f64; 3]; 3] {
        let m = &self.rows;
        [
            [m[(0, 0)], m[(0, 1)], m[(0, 2)]],
            [m[(1, 0)], m[(1, 1)], m[(1, 2)]],
            [m[(2, 0)], m[(2, 1)], m[(2, 2)]],
        ]
    }

    pub fn volume(&self) -> f64 {
        self.rows.determinant()
    }

    pub fn to_cartesian(&self, frac: &[f64; 3]) -> [f64; 3] {
        let v = self.rows.transpose() * Vector3::from(*frac);
        [v.x, v.y, v.z]
    }

    pub fn to_fractional(&self, cart: &[f64; 3]) -> [f64; 3] {
        let v = self.inverse.transpose() * Vector3::from(*cart);
        [v.x, v.y, v.z]
    }

    /// Spacing between lattice planes normal to each reciprocal direction.
    pub fn plane_spacings(&self) -> [f64; 3] {
        // columns of the inverse are the reciprocal vectors (without 2π)
        let mut out = [0.0; 3];
        for (k, o) in out.iter_mut().enumerate() {
            *o = 1.0 / self.inverse.column(k).norm();
        }
        out
    }

    /// Rows scaled by integer factors.
    pub fn scaled(&self, scale: [u32; 3]) -> Lattice {
        let mut rows = self.rows();
        for (row, s) in rows.iter_mut().zip(scale) {
            for x in row.iter_mut() {
                *x *= f64::from(s);
            }
        }
        Lattice::new(rows).expect("positive scaling keeps a positive volume")
    }

    /// Shortest Cartesian length of `delta_frac` over lattice translations
    /// within ±1 cell of the nearest-integer image.
    pub fn min_image_distance(&self, delta_frac: &[f64; 3]) -> f64 {
        let base: [f64; 3] = delta_frac.map(|d| d - d.round());
        let mut best = f64::INFINITY;
        for i in -1..=1 {
            for j in -1..=1 {
                for k in -1..=1 {
                    let f = [base[0] + f64::from(i), base[1] + f64::from(j), base[2] + f64::from(k)];
                    let c = self.to_cartesian(&f);
                    best = best.min((c[0] * c[0] + c[1] * c[1] + c[2] * c[2]).sqrt());
                }
            }
        }
        best
    }
}

fn cos_deg(x: f64) -> f64 {
    let c = x.to_radians().cos();
    if c.abs() < 1e-12 {
        0.0
    } else {
        c
    }
}

fn sin_deg(x: f64) -> f64 {
    let s = x.to_radians().sin();
    if (s - 1.0).abs() < 1e-15 {
        1.0
    } else {
        s
    }
}

/// Wrap into [0, 1).
pub fn wrap_unit(x: f64) -> f64 {
    let w = x - x.floor();
    if w >= 1.0 {
        0.0
    } else {
        w
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Site {
    pub element: u8,
    pub frac: [f64; 3],
}

/// Periodic structure: lattice plus fractional sites, all coordinates in [0, 1).
#[derive(Debug, Clone, PartialEq)]
pub struct CrystalStructure {
    lattice: Lattice,
    sites: Vec<Site>,
}

impl CrystalStructure {
    /// Builds a structure, wrapping every coordinate into [0, 1).
    pub fn new(lattice: Lattice, mut sites: Vec<Site>) -> Result<Self, StructureError> {
        if sites.is_empty() {
            return Err(StructureError::NoSites);
        }
        for (i, s) in sites.iter_mut().enumerate() {
            if s.frac.iter().any(|x| !x.is_finite()) {
                return Err(StructureError::NonFinite(i));
            }
            s.frac = s.frac.map(wrap_unit);
        }
        Ok(CrystalStructure { lattice, sites })
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn sites(&self) -> &[Site] {
        &self.sites
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    pub fn elements(&self) -> Vec<u8> {
        self.sites.iter().map(|s| s.element).collect()
    }

    /// Cartesian position of site `index` (Å).
    pub fn to_cartesian(&self, index: usize) -> Result<[f64; 3], StructureError> {
        let site = self.sites.get(index).ok_or(StructureError::IndexOutOfRange {
            index,
            count: self.sites.len(),
        })?;
        Ok(self.lattice.to_cartesian(&site.frac))
    }

    pub(crate) fn with_sites(&self, sites: Vec<Site>) -> CrystalStructure {
        CrystalStructure::new(self.lattice.clone(), sites).expect("transform keeps sites finite and non-empty")
    }

    pub(crate) fn from_parts_unchecked(lattice: Lattice, sites: Vec<Site>) -> CrystalStructure {
        CrystalStructure::new(lattice, sites).expect("caller guarantees a valid structure")
    }
}
