//! CIF reading (single data block, P1 expansion of symmetry operators) and
//! fixed-layout P1 writing. The writer layout is documented in
//! `docs/cif-format.md`.

use std::collections::HashMap;
use std::fmt::Write as _;

use thiserror::Error;

use super::structure::{wrap_unit, CrystalStructure, Lattice, Site, StructureError};
use crate::elements;

/// Cartesian distance under which symmetry-generated sites are merged.
pub const DUPLICATE_SITE_TOLERANCE: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CifError {
    #[error("missing cell parameter {0}")]
    MissingCellParameter(&'static str),
    #[error("no atom-site loop with fractional coordinates")]
    MissingAtomLoop,
    #[error("bad number {value:?} for {tag}")]
    BadNumber { tag: String, value: String },
    #[error("partial occupancy {value} on site {label}")]
    PartialOccupancyUnsupported { label: String, value: f64 },
    #[error("more than one data block (second at line {line})")]
    MultipleDataBlocks { line: usize },
    #[error("unknown element in site {0:?}")]
    UnknownElement(String),
    #[error("bad symmetry operator {0:?}")]
    BadSymmetryOperator(String),
    #[error("malformed CIF at line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error(transparent)]
    Structure(#[from] StructureError),
}

impl CifError {
    /// 1-based line the error points at, when it has one.
    pub fn line(&self) -> Option<usize> {
        match self {
            CifError::Syntax { line, .. } | CifError::MultipleDataBlocks { line } => Some(*line),
            _ => None,
        }
    }
}

#[derive(Debug, Default)]
struct Block {
    items: HashMap<String, String>,
    loops: Vec<Loop>,
}

#[derive(Debug, Default)]
struct Loop {
    tags: Vec<String>,
    values: Vec<String>,
}

impl Loop {
    fn column(&self, tag: &str) -> Option<usize> {
        self.tags.iter().position(|t| t == tag)
    }

    fn rows(&self) -> impl Iterator<Item = &[String]> {
        self.values.chunks(self.tags.len().max(1))
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Data,
    Loop,
    Tag(String),
    Value(String),
}

fn tokenize(text: &str) -> Result<Vec<(Token, usize)>, CifError> {
    let mut out = Vec::new();
    let mut lines = text.lines().enumerate().peekable();
    while let Some((ln, line)) = lines.next() {
        let lineno = ln + 1;
        if let Some(first) = line.strip_prefix(';') {
            // semicolon text field runs until a line starting with ';'
            let mut buf = first.to_string();
            let mut closed = false;
            for (_, l) in lines.by_ref() {
                if l.starts_with(';') {
                    closed = true;
                    break;
                }
                buf.push('\n');
                buf.push_str(l);
            }
            if !closed {
                return Err(CifError::Syntax {
                    line: lineno,
                    message: "unterminated text field".into(),
                });
            }
            out.push((Token::Value(buf.trim().to_string()), lineno));
            continue;
        }
        let bytes = line.as_bytes();
        let mut i = 0;
        while i < bytes.len() {
            let c = bytes[i];
            if c.is_ascii_whitespace() {
                i += 1;
                continue;
            }
            if c == b'#' {
                break;
            }
            if c == b'\'' || c == b'"' {
                // quote closes only when followed by whitespace or end of line
                let mut j = i + 1;
                loop {
                    if j >= bytes.len() {
                        return Err(CifError::Syntax {
                            line: lineno,
                            message: "unterminated quoted value".into(),
                        });
                    }
                    if bytes[j] == c && (j + 1 == bytes.len() || bytes[j + 1].is_ascii_whitespace()) {
                        break;
                    }
                    j += 1;
                }
                out.push((Token::Value(line[i + 1..j].to_string()), lineno));
                i = j + 1;
                continue;
            }
            let start = i;
            while i < bytes.len() && !bytes[i].is_ascii_whitespace() {
                i += 1;
            }
            let word = &line[start..i];
            let lower = word.to_ascii_lowercase();
            let tok = if lower.starts_with("data_") {
                Token::Data
            } else if lower == "loop_" {
                Token::Loop
            } else if word.starts_with('_') {
                Token::Tag(lower)
            } else {
                Token::Value(word.to_string())
            };
            out.push((tok, lineno));
        }
    }
    Ok(out)
}

fn parse_block(text: &str) -> Result<Block, CifError> {
    let tokens = tokenize(text)?;
    let mut block = Block::default();
    let mut seen_data = false;
    let mut i = 0;
    while i < tokens.len() {
        let (tok, line) = &tokens[i];
        match tok {
            Token::Data => {
                if seen_data {
                    return Err(CifError::MultipleDataBlocks { line: *line });
                }
                seen_data = true;
                i += 1;
            }
            Token::Loop => {
                let mut lp = Loop::default();
                i += 1;
                while let Some((Token::Tag(t), _)) = tokens.get(i) {
                    lp.tags.push(t.clone());
                    i += 1;
                }
                while let Some((Token::Value(v), _)) = tokens.get(i) {
                    lp.values.push(v.clone());
                    i += 1;
                }
                if lp.tags.is_empty() || lp.values.len() % lp.tags.len() != 0 {
                    return Err(CifError::Syntax {
                        line: *line,
                        message: "loop value count is not a multiple of its tag count".into(),
                    });
                }
                block.loops.push(lp);
            }
            Token::Tag(t) => match tokens.get(i + 1) {
                Some((Token::Value(v), _)) => {
                    block.items.insert(t.clone(), v.clone());
                    i += 2;
                }
                _ => {
                    return Err(CifError::Syntax {
                        line: *line,
                        message: format!("tag {t} has no value"),
                    })
                }
            },
            Token::Value(_) => {
                return Err(CifError::Syntax {
                    line: *line,
                    message: "value without a tag".into(),
                })
            }
        }
    }
    Ok(block)
}

/// Parses "5.640(2)" style numbers, dropping the uncertainty.
fn number(tag: &str, raw: &str) -> Result<f64, CifError> {
    let core = raw.split('(').next().unwrap_or(raw);
    core.parse::<f64>()
        .ok()
        .filter(|x| x.is_finite())
        .ok_or_else(|| CifError::BadNumber {
            tag: tag.to_string(),
            value: raw.to_string(),
        })
}

const CELL_TAGS: [&str; 6] = [
    "_cell_length_a",
    "_cell_length_b",
    "_cell_length_c",
    "_cell_angle_alpha",
    "_cell_angle_beta",
    "_cell_angle_gamma",
];

/// Affine operator acting on fractional coordinates.
#[derive(Debug, Clone, PartialEq)]
struct SymOp {
    rot: [[f64; 3]; 3],
    trans: [f64; 3],
}

impl SymOp {
    fn apply(&self, f: &[f64; 3]) -> [f64; 3] {
        let mut out = [0.0; 3];
        for (k, o) in out.iter_mut().enumerate() {
            *o = self.rot[k][0] * f[0] + self.rot[k][1] * f[1] + self.rot[k][2] * f[2] + self.trans[k];
        }
        out
    }
}

fn parse_symop(text: &str) -> Result<SymOp, CifError> {
    let bad = || CifError::BadSymmetryOperator(text.to_string());
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != 3 {
        return Err(bad());
    }
    let mut op = SymOp {
        rot: [[0.0; 3]; 3],
        trans: [0.0; 3],
    };
    for (k, part) in parts.iter().enumerate() {
        let s: String = part.chars().filter(|c| !c.is_whitespace()).collect::<String>().to_ascii_lowercase();
        if s.is_empty() {
            return Err(bad());
        }
        let bytes = s.as_bytes();
        let mut i = 0;
        while i < bytes.len() {
            let mut sign = 1.0;
            if bytes[i] == b'+' || bytes[i] == b'-' {
                if bytes[i] == b'-' {
                    sign = -1.0;
                }
                i += 1;
            }
            let start = i;
            while i < bytes.len() && bytes[i] != b'+' && bytes[i] != b'-' {
                i += 1;
            }
            let term = &s[start..i];
            // forms: x, 2x, 1/2, 0.5, 1/2x is not valid CIF but x/2 is rare; keep to common forms
            match term {
                "" => return Err(bad()),
                "x" => op.rot[k][0] += sign,
                "y" => op.rot[k][1] += sign,
                "z" => op.rot[k][2] += sign,
                _ => {
                    let (coef, axis) = match term.as_bytes()[term.len() - 1] {
                        b'x' => (&term[..term.len() - 1], Some(0)),
                        b'y' => (&term[..term.len() - 1], Some(1)),
                        b'z' => (&term[..term.len() - 1], Some(2)),
                        _ => (term, None),
                    };
                    let coef = coef.strip_suffix('*').unwrap_or(coef);
                    let v = if let Some((n, d)) = coef.split_once('/') {
                        let n: f64 = n.parse().map_err(|_| bad())?;
                        let d: f64 = d.parse().map_err(|_| bad())?;
                        if d == 0.0 {
                            return Err(bad());
                        }
                        n / d
                    } else {
                        coef.parse().map_err(|_| bad())?
                    };
                    match axis {
                        Some(a) => op.rot[k][a] += sign * v,
                        None => op.trans[k] += sign * v,
                    }
                }
            }
        }
    }
    Ok(op)
}

fn element_from_label(raw: &str) -> Option<u8> {
    let letters: String = raw.chars().take_while(|c| c.is_ascii_alphabetic()).collect();
    if letters.is_empty() {
        return None;
    }
    let mut chars = letters.chars();
    let first = chars.next()?.to_ascii_uppercase();
    let second = chars.next().map(|c| c.to_ascii_lowercase());
    if let Some(s) = second {
        let two: String = [first, s].iter().collect();
        if let Some(z) = elements::atomic_number(&two) {
            return Some(z);
        }
    }
    elements::atomic_number(&first.to_string()).filter(|&z| z > 0)
}

/// Parses one CIF data block into a P1 structure.
pub fn parse_cif(text: &str) -> Result<CrystalStructure, CifError> {
    let block = parse_block(text)?;
    let mut cell = [0.0; 6];
    for (slot, tag) in cell.iter_mut().zip(CELL_TAGS) {
        let raw = block.items.get(tag).ok_or(CifError::MissingCellParameter(tag))?;
        *slot = number(tag, raw)?;
    }
    let lattice = Lattice::from_parameters(cell[0], cell[1], cell[2], cell[3], cell[4], cell[5])?;

    let mut ops = Vec::new();
    let symop_tags = ["_symmetry_equiv_pos_as_xyz", "_space_group_symop_operation_xyz"];
    if let Some((lp, col)) = block
        .loops
        .iter()
        .find_map(|lp| symop_tags.iter().find_map(|t| lp.column(t)).map(|c| (lp, c)))
    {
        for row in lp.rows() {
            ops.push(parse_symop(&row[col])?);
        }
    } else if let Some(single) = symop_tags.iter().find_map(|t| block.items.get(*t)) {
        ops.push(parse_symop(single)?);
    }
    if ops.is_empty() {
        ops.push(parse_symop("x,y,z")?);
    }

    let atoms = block
        .loops
        .iter()
        .find(|lp| lp.column("_atom_site_fract_x").is_some())
        .ok_or(CifError::MissingAtomLoop)?;
    let cols = ["_atom_site_fract_x", "_atom_site_fract_y", "_atom_site_fract_z"].map(|t| atoms.column(t));
    let [Some(cx), Some(cy), Some(cz)] = cols else {
        return Err(CifError::MissingAtomLoop);
    };
    let type_col = atoms.column("_atom_site_type_symbol");
    let label_col = atoms.column("_atom_site_label");
    let occ_col = atoms.column("_atom_site_occupancy");

    let mut sites: Vec<Site> = Vec::new();
    for row in atoms.rows() {
        let label = label_col.or(type_col).map(|c| row[c].as_str()).unwrap_or("?");
        let sym = type_col.map(|c| row[c].as_str()).unwrap_or(label);
        let element = element_from_label(sym).ok_or_else(|| CifError::UnknownElement(sym.to_string()))?;
        if let Some(c) = occ_col {
            let raw = row[c].as_str();
            if raw != "." && raw != "?" {
                let occ = number("_atom_site_occupancy", raw)?;
                if (occ - 1.0).abs() > 1e-6 {
                    return Err(CifError::PartialOccupancyUnsupported {
                        label: label.to_string(),
                        value: occ,
                    });
                }
            }
        }
        let frac = [
            number("_atom_site_fract_x", &row[cx])?,
            number("_atom_site_fract_y", &row[cy])?,
            number("_atom_site_fract_z", &row[cz])?,
        ];
        for op in &ops {
            let image = op.apply(&frac).map(wrap_unit);
            let duplicate = sites.iter().any(|s| {
                s.element == element && {
                    let d = [image[0] - s.frac[0], image[1] - s.frac[1], image[2] - s.frac[2]];
                    lattice.min_image_distance(&d) < DUPLICATE_SITE_TOLERANCE
                }
            });
            if !duplicate {
                sites.push(Site { element, frac: image });
            }
        }
    }
    Ok(CrystalStructure::new(lattice, sites)?)
}

fn fixed6(x: f64) -> String {
    let s = format!("{x:.6}");
    match s.as_str() {
        "1.000000" => "0.000000".to_string(),
        "-0.000000" => "0.000000".to_string(),
        _ => s,
    }
}

/// P1 CIF with block name `structure`.
pub fn write_cif(s: &CrystalStructure) -> String {
    write_cif_named(s, "structure")
}

/// P1 CIF in the fixed layout: cell, space group, symmetry loop, site loop.
/// Block names are sanitized to non-whitespace characters.
pub fn write_cif_named(s: &CrystalStructure, name: &str) -> String {
    let name: String = name
        .chars()
        .map(|c| if c.is_whitespace() { '_' } else { c })
        .collect();
    let [a, b, c, alpha, beta, gamma] = s.lattice().parameters();
    let mut out = String::new();
    let _ = writeln!(out, "data_{name}");
    let _ = writeln!(out, "_cell_length_a {a:.6}");
    let _ = writeln!(out, "_cell_length_b {b:.6}");
    let _ = writeln!(out, "_cell_length_c {c:.6}");
    let _ = writeln!(out, "_cell_angle_alpha {alpha:.6}");
    let _ = writeln!(out, "_cell_angle_beta {beta:.6}");
    let _ = writeln!(out, "_cell_angle_gamma {gamma:.6}");
    out.push_str("_symmetry_space_group_name_H-M 'P 1'\n");
    out.push_str("_symmetry_Int_Tables_number 1\n");
    out.push_str("loop_\n_symmetry_equiv_pos_as_xyz\n'x, y, z'\n");
    out.push_str("loop_\n_atom_site_label\n_atom_site_type_symbol\n");
    out.push_str("_atom_site_fract_x\n_atom_site_fract_y\n_atom_site_fract_z\n_atom_site_occupancy\n");
    let mut counters: HashMap<u8, usize> = HashMap::new();
    for site in s.sites() {
        let sym = elements::symbol(site.element).unwrap_or("X");
        let n = counters.entry(site.element).or_insert(0);
        *n += 1;
        let [x, y, z] = site.frac.map(fixed6);
        let _ = writeln!(out, "{sym}{n} {sym} {x} {y} {z} 1");
    }
    out
}
