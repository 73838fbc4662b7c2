use std::f64::consts::PI;

use super::neighbors::{image_range, scan_site};
use crate::chemio::CrystalStructure;

pub const AGNI_LEN: usize = 32;
pub const ETA_MIN: f64 = 0.8;
pub const ETA_MAX: f64 = 16.0;

/// Gaussian widths, log-spaced from [`ETA_MIN`] to [`ETA_MAX`].
pub fn eta_grid() -> [f64; AGNI_LEN] {
    let ratio = ETA_MAX / ETA_MIN;
    std::array::from_fn(|k| ETA_MIN * ratio.powf(k as f64 / (AGNI_LEN - 1) as f64))
}

/// 0.5·(cos(πd/rc) + 1) inside the cutoff, 0 beyond.
pub fn cosine_cutoff(d: f64, cutoff: f64) -> f64 {
    if d > cutoff {
        0.0
    } else {
        0.5 * ((PI * d / cutoff).cos() + 1.0)
    }
}

/// Site-averaged radial descriptor: component k is
/// (1/N) Σᵢ Σⱼ exp(−(dᵢⱼ/ηₖ)²)·f_c(dᵢⱼ) over all periodic pairs within the
/// cutoff.
pub fn agni_fingerprint(s: &CrystalStructure, cutoff: f64) -> [f64; AGNI_LEN] {
    let eta = eta_grid();
    let range = image_range(s, cutoff);
    let mut out = [0.0; AGNI_LEN];
    let mut buf = Vec::new();
    for i in 0..s.len() {
        buf.clear();
        scan_site(s, i, cutoff, range, &mut buf);
        for n in &buf {
            let fc = cosine_cutoff(n.distance, cutoff);
            for (o, e) in out.iter_mut().zip(eta) {
                *o += (-(n.distance / e).powi(2)).exp() * fc;
            }
        }
    }
    let n = s.len() as f64;
    out.map(|x| x / n)
}
