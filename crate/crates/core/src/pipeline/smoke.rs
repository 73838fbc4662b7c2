use super::dataset::GraphRecord;
use super::PipelineError;
use crate::hash::Fnv1a;
use crate::rng::RngState;

pub const DEFAULT_DIM: usize = 16;

/// Fixed embedding of a node type: `dim` uniform draws in [-1, 1) from a
/// stream seeded with FNV-1a of the type (u16 LE), normalized to unit length.
pub fn type_embedding(atom_type: u8, dim: usize) -> Vec<f64> {
    let mut rng = RngState::new(Fnv1a::new().write_u16(u16::from(atom_type)).finish());
    let v: Vec<f64> = (0..dim).map(|_| 2.0 * rng.next_f64() - 1.0).collect();
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm == 0.0 {
        v
    } else {
        v.into_iter().map(|x| x / norm).collect()
    }
}

/// One weight-free message-passing layer and a sum readout:
/// h¹ᵥ = h⁰ᵥ + mean of neighbor h⁰ (zero when isolated), output Σᵥ h¹ᵥ.
pub fn smoke_forward(rec: &GraphRecord, dim: usize) -> Result<Vec<f64>, PipelineError> {
    let malformed = |message: String| PipelineError::MalformedRecord {
        id: rec.id.clone(),
        message,
    };
    if dim == 0 {
        return Err(malformed("dimension must be positive".into()));
    }
    let types = rec.body.node_types();
    let n = types.len();
    let h0: Vec<Vec<f64>> = types.iter().map(|&t| type_embedding(t, dim)).collect();
    let mut agg = vec![vec![0.0; dim]; n];
    let mut deg = vec![0usize; n];
    for (i, j) in rec.body.directed_edges() {
        if i >= n || j >= n {
            return Err(malformed(format!("edge ({i}, {j}) out of range for {n} nodes")));
        }
        for (a, b) in agg[i].iter_mut().zip(&h0[j]) {
            *a += b;
        }
        deg[i] += 1;
    }
    let mut out = vec![0.0; dim];
    for v in 0..n {
        let scale = if deg[v] == 0 { 0.0 } else { 1.0 / deg[v] as f64 };
        for (k, o) in out.iter_mut().enumerate() {
            *o += h0[v][k] + agg[v][k] * scale;
        }
    }
    Ok(out)
}
