//! SMILES reader.
//!
//! Supported: organic subset, bracket atoms (isotope, symbol, `@`/`@@`, H
//! count, charge, atom class), branches, ring bonds `0-9` and `%nn`, bond
//! symbols `- = # : / \`, and `.` disconnection. Reaction SMILES and
//! `@TH`/`@SP`-style stereo classes are rejected.

use std::collections::BTreeMap;

use thiserror::Error;

use super::aromatic::perceive_aromaticity;
use super::molecule::{
    implicit_hydrogens, Atom, Bond, BondDirection, BondOrder, Chirality, GraphError, MoleculeGraph,
};
use crate::elements;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SmilesError {
    #[error("empty SMILES")]
    Empty,
    #[error("unclosed ring bond opened at offset {offset}")]
    UnclosedRing { offset: usize },
    #[error("unbalanced parenthesis at offset {offset}")]
    UnbalancedParenthesis { offset: usize },
    #[error("unknown element at offset {offset}")]
    UnknownElement { offset: usize },
    #[error("valence exceeded for atom at offset {offset}")]
    ValenceError { offset: usize },
    #[error("unexpected character {ch:?} at offset {offset}")]
    UnexpectedChar { offset: usize, ch: char },
    #[error("bond symbol without a following atom at offset {offset}")]
    DanglingBond { offset: usize },
    #[error("invalid bond at offset {offset}: {source}")]
    Bond { offset: usize, source: GraphError },
    #[error("conflicting ring bond symbols at offset {offset}")]
    RingBondConflict { offset: usize },
}

impl SmilesError {
    pub fn offset(&self) -> Option<usize> {
        match *self {
            SmilesError::Empty => None,
            SmilesError::UnclosedRing { offset }
            | SmilesError::UnbalancedParenthesis { offset }
            | SmilesError::UnknownElement { offset }
            | SmilesError::ValenceError { offset }
            | SmilesError::UnexpectedChar { offset, .. }
            | SmilesError::DanglingBond { offset }
            | SmilesError::Bond { offset, .. }
            | SmilesError::RingBondConflict { offset } => Some(offset),
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct BondSpec {
    order: BondOrder,
    direction: BondDirection,
}

struct OpenRing {
    atom: usize,
    spec: Option<BondSpec>,
    offset: usize,
}

struct Parser<'a> {
    text: &'a [u8],
    pos: usize,
    mol: MoleculeGraph,
    /// Offset and organic-subset flag per atom.
    atom_info: Vec<(usize, bool)>,
    prev: Option<usize>,
    branches: Vec<(Option<usize>, usize)>,
    pending: Option<(BondSpec, usize)>,
    rings: BTreeMap<u32, OpenRing>,
    /// Bonds written without a symbol between two aromatic atoms.
    implicit_aromatic: Vec<usize>,
}

/// Parse a SMILES string into a molecular graph.
pub fn parse_smiles(text: &str) -> Result<MoleculeGraph, SmilesError> {
    let text = text.trim();
    if text.is_empty() {
        return Err(SmilesError::Empty);
    }
    let mut p = Parser {
        text: text.as_bytes(),
        pos: 0,
        mol: MoleculeGraph::new(),
        atom_info: Vec::new(),
        prev: None,
        branches: Vec::new(),
        pending: None,
        rings: BTreeMap::new(),
        implicit_aromatic: Vec::new(),
    };
    p.run()?;
    p.finish()
}

impl Parser<'_> {
    fn peek(&self) -> Option<u8> {
        self.text.get(self.pos).copied()
    }

    fn unexpected(&self) -> SmilesError {
        let ch = std::str::from_utf8(&self.text[self.pos..])
            .ok()
            .and_then(|s| s.chars().next())
            .unwrap_or('?');
        SmilesError::UnexpectedChar {
            offset: self.pos,
            ch,
        }
    }

    fn run(&mut self) -> Result<(), SmilesError> {
        while let Some(c) = self.peek() {
            match c {
                b'(' => {
                    if self.prev.is_none() || self.pending.is_some() {
                        return Err(SmilesError::UnbalancedParenthesis { offset: self.pos });
                    }
                    self.branches.push((self.prev, self.pos));
                    self.pos += 1;
                }
                b')' => {
                    if let Some((_, off)) = self.pending {
                        return Err(SmilesError::DanglingBond { offset: off });
                    }
                    let Some((prev, _)) = self.branches.pop() else {
                        return Err(SmilesError::UnbalancedParenthesis { offset: self.pos });
                    };
                    self.prev = prev;
                    self.pos += 1;
                }
                b'-' | b'=' | b'#' | b':' | b'/' | b'\\' => {
                    if self.pending.is_some() || self.prev.is_none() {
                        return Err(self.unexpected());
                    }
                    let spec = match c {
                        b'-' => BondSpec { order: BondOrder::Single, direction: BondDirection::None },
                        b'=' => BondSpec { order: BondOrder::Double, direction: BondDirection::None },
                        b'#' => BondSpec { order: BondOrder::Triple, direction: BondDirection::None },
                        b':' => BondSpec { order: BondOrder::Aromatic, direction: BondDirection::None },
                        b'/' => BondSpec { order: BondOrder::Single, direction: BondDirection::Up },
                        _ => BondSpec { order: BondOrder::Single, direction: BondDirection::Down },
                    };
                    self.pending = Some((spec, self.pos));
                    self.pos += 1;
                }
                b'.' => {
                    if let Some((_, off)) = self.pending {
                        return Err(SmilesError::DanglingBond { offset: off });
                    }
                    if self.prev.is_none() {
                        return Err(self.unexpected());
                    }
                    self.prev = None;
                    self.pos += 1;
                }
                b'0'..=b'9' | b'%' => self.ring_bond()?,
                b'[' => {
                    let (atom, off) = self.bracket_atom()?;
                    self.attach(atom, off, false)?;
                }
                _ => {
                    let (atom, off) = self.organic_atom()?;
                    self.attach(atom, off, true)?;
                }
            }
        }
        Ok(())
    }

    fn organic_atom(&mut self) -> Result<(Atom, usize), SmilesError> {
        let off = self.pos;
        let rest = &self.text[self.pos..];
        let (z, aromatic, len) = match rest {
            [b'C', b'l', ..] => (17, false, 2),
            [b'B', b'r', ..] => (35, false, 2),
            [b'B', ..] => (5, false, 1),
            [b'C', ..] => (6, false, 1),
            [b'N', ..] => (7, false, 1),
            [b'O', ..] => (8, false, 1),
            [b'P', ..] => (15, false, 1),
            [b'S', ..] => (16, false, 1),
            [b'F', ..] => (9, false, 1),
            [b'I', ..] => (53, false, 1),
            [b'b', ..] => (5, true, 1),
            [b'c', ..] => (6, true, 1),
            [b'n', ..] => (7, true, 1),
            [b'o', ..] => (8, true, 1),
            [b'p', ..] => (15, true, 1),
            [b's', ..] => (16, true, 1),
            [b'*', ..] => (0, false, 1),
            [c, ..] if c.is_ascii_alphabetic() => {
                return Err(SmilesError::UnknownElement { offset: off })
            }
            _ => return Err(self.unexpected()),
        };
        self.pos += len;
        let mut atom = Atom::new(z);
        atom.aromatic = aromatic;
        Ok((atom, off))
    }

    fn read_number(&mut self) -> Option<u32> {
        let start = self.pos;
        while matches!(self.peek(), Some(b'0'..=b'9')) {
            self.pos += 1;
        }
        if self.pos == start {
            return None;
        }
        std::str::from_utf8(&self.text[start..self.pos]).ok()?.parse().ok()
    }

    fn bracket_atom(&mut self) -> Result<(Atom, usize), SmilesError> {
        let open = self.pos;
        self.pos += 1;
        let mut atom = Atom::default();
        if let Some(iso) = self.read_number() {
            atom.isotope = u16::try_from(iso).map_err(|_| SmilesError::UnexpectedChar {
                offset: open + 1,
                ch: '9',
            })?;
        }
        let sym_off = self.pos;
        let rest = &self.text[self.pos..];
        let (z, aromatic, len) = match rest {
            [b'*', ..] => (0, false, 1),
            [b's', b'e', ..] => (34, true, 2),
            [b'a', b's', ..] => (33, true, 2),
            [b't', b'e', ..] => (52, true, 2),
            [b'b', ..] => (5, true, 1),
            [b'c', ..] => (6, true, 1),
            [b'n', ..] => (7, true, 1),
            [b'o', ..] => (8, true, 1),
            [b'p', ..] => (15, true, 1),
            [b's', ..] => (16, true, 1),
            [u, l, ..] if u.is_ascii_uppercase() && l.is_ascii_lowercase() => {
                let two = std::str::from_utf8(&rest[..2]).unwrap_or("");
                match elements::atomic_number(two) {
                    Some(z) => (z, false, 2),
                    None => match elements::atomic_number(&(*u as char).to_string()) {
                        Some(z) => (z, false, 1),
                        None => return Err(SmilesError::UnknownElement { offset: sym_off }),
                    },
                }
            }
            [u, ..] if u.is_ascii_uppercase() => {
                match elements::atomic_number(&(*u as char).to_string()) {
                    Some(z) => (z, false, 1),
                    None => return Err(SmilesError::UnknownElement { offset: sym_off }),
                }
            }
            _ => return Err(SmilesError::UnknownElement { offset: sym_off }),
        };
        self.pos += len;
        atom.element = z;
        atom.aromatic = aromatic;

        if self.peek() == Some(b'@') {
            self.pos += 1;
            if self.peek() == Some(b'@') {
                self.pos += 1;
                atom.chirality = Chirality::Clockwise;
            } else {
                atom.chirality = Chirality::CounterClockwise;
            }
        }
        if self.peek() == Some(b'H') {
            self.pos += 1;
            let h = self.read_number().unwrap_or(1);
            atom.explicit_h = u8::try_from(h).map_err(|_| SmilesError::ValenceError { offset: open })?;
        }
        if let Some(sign @ (b'+' | b'-')) = self.peek() {
            self.pos += 1;
            let unit: i32 = if sign == b'+' { 1 } else { -1 };
            let mut charge = unit;
            if let Some(n) = self.read_number() {
                charge = unit * n as i32;
            } else {
                while self.peek() == Some(sign) {
                    self.pos += 1;
                    charge += unit;
                }
            }
            atom.formal_charge = i8::try_from(charge).map_err(|_| SmilesError::ValenceError { offset: open })?;
        }
        if self.peek() == Some(b':') {
            self.pos += 1;
            if self.read_number().is_none() {
                return Err(self.unexpected());
            }
        }
        match self.peek() {
            Some(b']') => {
                self.pos += 1;
                Ok((atom, open))
            }
            Some(_) => Err(self.unexpected()),
            None => Err(SmilesError::UnexpectedChar { offset: open, ch: '[' }),
        }
    }

    fn attach(&mut self, atom: Atom, offset: usize, organic: bool) -> Result<(), SmilesError> {
        let idx = self.mol.add_atom(atom);
        self.atom_info.push((offset, organic));
        if let Some(prev) = self.prev {
            let spec = self.pending.take().map(|(s, _)| s);
            self.connect(prev, idx, spec, offset)?;
        }
        self.prev = Some(idx);
        Ok(())
    }

    fn connect(&mut self, a: usize, b: usize, spec: Option<BondSpec>, offset: usize) -> Result<(), SmilesError> {
        let both_aromatic = self.mol.atom(a).aromatic && self.mol.atom(b).aromatic;
        let bond = match spec {
            Some(s) => Bond {
                begin: a,
                end: b,
                order: s.order,
                direction: s.direction,
            },
            None => Bond::new(
                a,
                b,
                if both_aromatic { BondOrder::Aromatic } else { BondOrder::Single },
            ),
        };
        let bi = self
            .mol
            .push_bond(bond)
            .map_err(|source| SmilesError::Bond { offset, source })?;
        if spec.is_none() && both_aromatic {
            self.implicit_aromatic.push(bi);
        }
        Ok(())
    }

    fn ring_bond(&mut self) -> Result<(), SmilesError> {
        let off = self.pos;
        let Some(atom) = self.prev else {
            return Err(self.unexpected());
        };
        let number = if self.peek() == Some(b'%') {
            self.pos += 1;
            let d = &self.text[self.pos..];
            if d.len() < 2 || !d[0].is_ascii_digit() || !d[1].is_ascii_digit() {
                return Err(SmilesError::UnexpectedChar { offset: off, ch: '%' });
            }
            self.pos += 2;
            u32::from(d[0] - b'0') * 10 + u32::from(d[1] - b'0')
        } else {
            let d = self.text[self.pos];
            self.pos += 1;
            u32::from(d - b'0')
        };
        let spec = self.pending.take().map(|(s, _)| s);
        match self.rings.remove(&number) {
            Some(open) => {
                let spec = match (open.spec, spec) {
                    (Some(x), Some(y)) if x.order != y.order => {
                        return Err(SmilesError::RingBondConflict { offset: off })
                    }
                    (Some(x), _) => Some(x),
                    (None, y) => y,
                };
                self.connect(open.atom, atom, spec, off)
            }
            None => {
                self.rings.insert(number, OpenRing { atom, spec, offset: off });
                Ok(())
            }
        }
    }

    fn finish(mut self) -> Result<MoleculeGraph, SmilesError> {
        if let Some((_, off)) = self.pending {
            return Err(SmilesError::DanglingBond { offset: off });
        }
        if let Some(&(_, off)) = self.branches.first() {
            return Err(SmilesError::UnbalancedParenthesis { offset: off });
        }
        if let Some(open) = self.rings.values().min_by_key(|r| r.offset) {
            return Err(SmilesError::UnclosedRing { offset: open.offset });
        }
        // Unmarked bonds between aromatic atoms outside rings are single
        // (e.g. the inter-ring bond of biphenyl written as c1ccccc1c1ccccc1).
        let ring_bonds = self.mol.ring_bonds();
        for &bi in &self.implicit_aromatic {
            if !ring_bonds[bi] {
                self.mol.set_bond_order(bi, BondOrder::Single);
            }
        }
        for i in 0..self.mol.atom_count() {
            let (offset, organic) = self.atom_info[i];
            if !organic {
                continue;
            }
            let atom = self.mol.atom(i);
            let h = implicit_hydrogens(atom.element, atom.aromatic, self.mol.valence_sum(i))
                .map_err(|_| SmilesError::ValenceError { offset })?;
            self.mol.atom_mut(i).explicit_h = h;
        }
        perceive_aromaticity(&mut self.mol);
        Ok(self.mol)
    }
}
