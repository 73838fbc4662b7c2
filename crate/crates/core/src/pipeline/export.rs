use std::io::{self, Write};

use rayon::prelude::*;
use serde::Serialize;

use serde_json::Value;

use super::dataset::{GraphBody, GraphRecord};
use super::split::Partition;
use super::PipelineError;
use crate::crystal::{CrystalGraph, GaussianBasis, Neighbor};
use crate::molgraph::{EdgeFeature, NodeFeature};

#[derive(Serialize)]
struct NodeOut {
    t: u8,
    c: u8,
    m: u8,
}

#[derive(Serialize)]
#[serde(untagged)]
enum EdgesOut {
    Molecule(Vec<(usize, usize, u8, u8)>),
    Crystal(Vec<(usize, usize, i32, i32, i32, f64)>),
}

#[derive(Serialize)]
struct RecordOut<'a> {
    id: &'a str,
    parent_id: &'a str,
    provenance: &'a str,
    partition: &'static str,
    kind: &'static str,
    nodes: Vec<NodeOut>,
    edges: EdgesOut,
    #[serde(skip_serializing_if = "Option::is_none")]
    gauss: Option<GaussianBasis>,
    y: &'a [f64],
    y_mask: &'a [u8],
}

/// One JSON object, no trailing newline. Field order is fixed.
pub fn record_to_json(r: &GraphRecord) -> String {
    let (kind, nodes, edges, gauss) = match &r.body {
        GraphBody::Molecule { nodes, edges } => (
            "molecule",
            nodes
                .iter()
                .map(|n| NodeOut {
                    t: n.atom_type,
                    c: n.chirality,
                    m: u8::from(n.masked),
                })
                .collect(),
            EdgesOut::Molecule(edges.iter().map(|e| (e.i, e.j, e.bond_type, e.direction)).collect()),
            None,
        ),
        GraphBody::Crystal(g) => (
            "crystal",
            g.node_z.iter().map(|&z| NodeOut { t: z, c: 0, m: 0 }).collect(),
            EdgesOut::Crystal(
                g.edges
                    .iter()
                    .map(|e| (e.i, e.j, e.image[0], e.image[1], e.image[2], e.distance))
                    .collect(),
            ),
            Some(g.gauss),
        ),
    };
    let out = RecordOut {
        id: &r.id,
        parent_id: &r.parent_id,
        provenance: &r.provenance,
        partition: r.partition.as_str(),
        kind,
        nodes,
        edges,
        gauss,
        y: &r.y,
        y_mask: &r.y_mask,
    };
    serde_json::to_string(&out).expect("record serializes")
}

/// Writes one line per record in input order; returns the count written.
/// Lines are rendered in parallel, which never changes the bytes.
pub fn export_jsonl<W: Write>(records: &[GraphRecord], mut w: W) -> io::Result<usize> {
    const CHUNK: usize = 4096;
    for chunk in records.chunks(CHUNK) {
        let lines: Vec<String> = chunk.par_iter().map(record_to_json).collect();
        for line in lines {
            w.write_all(line.as_bytes())?;
            w.write_all(b"\n")?;
        }
    }
    w.flush()?;
    Ok(records.len())
}

fn as_index<T: TryFrom<u64>>(v: &Value) -> Option<T> {
    v.as_u64().and_then(|x| T::try_from(x).ok())
}

/// Parses one exported line back into a record. Structural problems (missing
/// fields, wrong arity, edge endpoints out of range) are `MalformedRecord`.
pub fn record_from_json(line: &str) -> Result<GraphRecord, PipelineError> {
    let v: Value = serde_json::from_str(line).map_err(|e| PipelineError::MalformedRecord {
        id: "(unparsed)".to_string(),
        message: e.to_string(),
    })?;
    let id = v["id"].as_str().unwrap_or_default().to_string();
    let bad = |message: &str| PipelineError::MalformedRecord {
        id: id.clone(),
        message: message.to_string(),
    };
    let text = |key: &str| v[key].as_str().map(str::to_string).ok_or_else(|| bad(&format!("missing {key}")));
    let parent_id = text("parent_id")?;
    let provenance = text("provenance")?;
    let partition = match v["partition"].as_str() {
        Some("train") => Partition::Train,
        Some("valid") => Partition::Valid,
        Some("test") => Partition::Test,
        _ => return Err(bad("bad partition")),
    };
    let nodes = v["nodes"].as_array().ok_or_else(|| bad("missing nodes"))?;
    let edges = v["edges"].as_array().ok_or_else(|| bad("missing edges"))?;
    let n = nodes.len();
    let node = |x: &Value| -> Option<(u8, u8, u8)> { Some((as_index(&x["t"])?, as_index(&x["c"])?, as_index(&x["m"])?)) };
    let parsed_nodes = nodes.iter().map(node).collect::<Option<Vec<_>>>().ok_or_else(|| bad("bad node"))?;
    let body = match v["kind"].as_str() {
        Some("molecule") => {
            let edge = |e: &Value| -> Option<EdgeFeature> {
                let a = e.as_array().filter(|a| a.len() == 4)?;
                Some(EdgeFeature {
                    i: as_index(&a[0])?,
                    j: as_index(&a[1])?,
                    bond_type: as_index(&a[2])?,
                    direction: as_index(&a[3])?,
                })
            };
            GraphBody::Molecule {
                nodes: parsed_nodes
                    .iter()
                    .map(|&(t, c, m)| NodeFeature {
                        atom_type: t,
                        chirality: c,
                        masked: m != 0,
                    })
                    .collect(),
                edges: edges.iter().map(edge).collect::<Option<_>>().ok_or_else(|| bad("bad edge"))?,
            }
        }
        Some("crystal") => {
            let edge = |e: &Value| -> Option<Neighbor> {
                let a = e.as_array().filter(|a| a.len() == 6)?;
                let img = |x: &Value| x.as_i64().and_then(|x| i32::try_from(x).ok());
                Some(Neighbor {
                    i: as_index(&a[0])?,
                    j: as_index(&a[1])?,
                    image: [img(&a[2])?, img(&a[3])?, img(&a[4])?],
                    distance: a[5].as_f64()?,
                })
            };
            let gauss: GaussianBasis =
                serde_json::from_value(v["gauss"].clone()).map_err(|_| bad("missing or bad gauss block"))?;
            GraphBody::Crystal(CrystalGraph {
                node_z: parsed_nodes.iter().map(|&(t, _, _)| t).collect(),
                edges: edges.iter().map(edge).collect::<Option<_>>().ok_or_else(|| bad("bad edge"))?,
                gauss,
            })
        }
        _ => return Err(bad("kind must be molecule or crystal")),
    };
    if body.directed_edges().iter().any(|&(i, j)| i >= n || j >= n) {
        return Err(bad("edge endpoint out of range"));
    }
    let y: Vec<f64> = v["y"]
        .as_array()
        .and_then(|a| a.iter().map(Value::as_f64).collect())
        .ok_or_else(|| bad("bad y"))?;
    let y_mask: Vec<u8> = v["y_mask"]
        .as_array()
        .and_then(|a| a.iter().map(as_index).collect())
        .ok_or_else(|| bad("bad y_mask"))?;
    if y.len() != y_mask.len() {
        return Err(bad("y and y_mask differ in length"));
    }
    Ok(GraphRecord {
        id,
        parent_id,
        provenance,
        partition,
        body,
        y,
        y_mask,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chemio::{parse_smiles, CrystalStructure, Lattice, Site};
    use crate::crystal::build_crystal_graph;
    use crate::molgraph::build_graph_record;
    use crate::pipeline::Partition;

    #[test]
    fn molecule_line() {
        let rec = build_graph_record("m1", &parse_smiles("C=O").unwrap(), vec![1.0, 0.0], vec![1, 0]);
        let g = GraphRecord::from_molecule(rec, "m1".into(), Partition::Train);
        assert_eq!(
            record_to_json(&g),
            r#"{"id":"m1","parent_id":"m1","provenance":"original","partition":"train","kind":"molecule","nodes":[{"t":6,"c":0,"m":0},{"t":8,"c":0,"m":0}],"edges":[[0,1,1,0]],"y":[1.0,0.0],"y_mask":[1,0]}"#
        );
    }

    #[test]
    fn crystal_line_has_gauss() {
        let s = CrystalStructure::new(Lattice::cubic(3.0), vec![Site { element: 3, frac: [0.0; 3] }]).unwrap();
        let g = GraphRecord {
            id: "c".into(),
            parent_id: "c".into(),
            provenance: "original".into(),
            partition: Partition::Test,
            body: GraphBody::Crystal(build_crystal_graph(&s, 3.0, 12, 0.2, 0.2)),
            y: vec![],
            y_mask: vec![],
        };
        let line = record_to_json(&g);
        assert!(line.contains(r#""gauss":{"start":0.0,"stop":3.0,"step":0.2,"width":0.2}"#));
        assert!(line.contains(r#"[0,0,-1,0,0,3.0]"#));
        let mut buf = Vec::new();
        assert_eq!(export_jsonl(&[g.clone(), g.clone()], &mut buf).unwrap(), 2);
        assert_eq!(buf.iter().filter(|&&b| b == b'\n').count(), 2);
        assert_eq!(export_jsonl(&[], &mut Vec::new()).unwrap(), 0);
        assert_eq!(record_from_json(&line).unwrap(), g);
    }

    #[test]
    fn round_trip_and_rejects() {
        let rec = build_graph_record("m", &parse_smiles("CC(=O)O").unwrap(), vec![0.5], vec![1]);
        let g = GraphRecord::from_molecule(rec, "m".into(), Partition::Valid);
        assert_eq!(record_from_json(&record_to_json(&g)).unwrap(), g);
        let broken = record_to_json(&g).replace("\"edges\":[[0,1,", "\"edges\":[[0,9,");
        assert!(record_from_json(&broken).is_err());
        assert!(record_from_json("{").is_err());
        assert!(record_from_json(&record_to_json(&g).replace("molecule", "protein")).is_err());
    }
}
