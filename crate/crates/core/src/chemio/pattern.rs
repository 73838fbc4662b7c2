//! A small SMARTS-like substructure language, rooted at one query atom.
//!
//! Grammar:
//!
//! ```text
//! pattern   := chain
//! chain     := atom ( '(' bond? chain ')' | bond? atom ... )*
//! atom      := bare | '[' atom_expr ']'
//! bare      := 'B' | 'C' | 'N' | 'O' | 'P' | 'S' | 'F' | 'Cl' | 'Br' | 'I'
//!            | 'b' | 'c' | 'n' | 'o' | 'p' | 's' | '*'
//! atom_expr := or ( ';' or )*           low-precedence AND
//! or        := and ( ',' and )*
//! and       := unary ( '&'? unary )*    high-precedence AND
//! unary     := '!' unary | primitive
//! primitive := '*' | '#' n | Symbol | symbol | 'a' | 'A' | 'R' | 'D' n?
//!            | 'H' n? | '+' n? | '-' n? | '$(' pattern ')'
//! bond      := same operator structure over '-' '=' '#' ':' '~' '@'
//! ```
//!
//! Uppercase symbols are aliphatic, lowercase aromatic, `#n` matches either.
//! `R` is ring membership, `D` the number of graph neighbors, `H` the total
//! hydrogen count. An omitted bond means "single or aromatic". A chain
//! continues from the previous atom, so `C(=O)O` is a carbon with two
//! children. Matching is an injective embedding of the pattern tree with the
//! pattern root pinned to the requested atom.

use thiserror::Error;

use super::molecule::{BondOrder, MoleculeGraph};
use crate::elements;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PatternError {
    #[error("pattern syntax error at offset {offset}: {message}")]
    PatternSyntaxError { offset: usize, message: String },
    #[error("atom index {index} out of range for molecule with {count} atoms")]
    IndexOutOfRange { index: usize, count: usize },
}

#[derive(Debug, Clone, PartialEq)]
enum AtomExpr {
    Any,
    Element { z: u8, aromatic: bool },
    AtomicNumber(u8),
    Aromatic(bool),
    InRing,
    Degree(u8),
    HCount(u8),
    Charge(i8),
    Recursive(Box<SubstructurePattern>),
    Not(Box<AtomExpr>),
    And(Vec<AtomExpr>),
    Or(Vec<AtomExpr>),
}

#[derive(Debug, Clone, PartialEq)]
enum BondExpr {
    /// single or aromatic
    Implicit,
    Any,
    Order(BondOrder),
    Ring,
    Not(Box<BondExpr>),
    And(Vec<BondExpr>),
    Or(Vec<BondExpr>),
}

#[derive(Debug, Clone, PartialEq)]
struct PatternNode {
    atom: AtomExpr,
    /// Parent node and the bond to it; `None` for the root.
    parent: Option<(usize, BondExpr)>,
}

/// Compiled pattern. Nodes are stored in pre-order, root first.
#[derive(Debug, Clone, PartialEq)]
pub struct SubstructurePattern {
    source: String,
    nodes: Vec<PatternNode>,
}

impl SubstructurePattern {
    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }
}

impl std::str::FromStr for SubstructurePattern {
    type Err = PatternError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        compile_pattern(s)
    }
}

pub fn compile_pattern(text: &str) -> Result<SubstructurePattern, PatternError> {
    let mut c = Compiler {
        text: text.as_bytes(),
        pos: 0,
        base: 0,
    };
    let p = c.pattern()?;
    if c.pos != c.text.len() {
        return Err(c.err("trailing characters"));
    }
    Ok(p)
}

struct Compiler<'a> {
    text: &'a [u8],
    pos: usize,
    /// Offset of `text` within the outermost pattern, for error reporting.
    base: usize,
}

impl Compiler<'_> {
    fn err(&self, message: &str) -> PatternError {
        PatternError::PatternSyntaxError {
            offset: self.base + self.pos,
            message: message.to_string(),
        }
    }

    fn peek(&self) -> Option<u8> {
        self.text.get(self.pos).copied()
    }

    fn peek2(&self) -> Option<u8> {
        self.text.get(self.pos + 1).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn number(&mut self) -> Option<u32> {
        let start = self.pos;
        while matches!(self.peek(), Some(b'0'..=b'9')) {
            self.pos += 1;
        }
        std::str::from_utf8(&self.text[start..self.pos]).ok()?.parse().ok()
    }

    fn pattern(&mut self) -> Result<SubstructurePattern, PatternError> {
        let start = self.pos;
        let mut nodes = Vec::new();
        if self.peek().is_none() {
            return Err(self.err("empty pattern"));
        }
        self.chain(&mut nodes, None)?;
        let source = String::from_utf8_lossy(&self.text[start..self.pos]).into_owned();
        Ok(SubstructurePattern { source, nodes })
    }

    fn chain(&mut self, nodes: &mut Vec<PatternNode>, parent: Option<(usize, BondExpr)>) -> Result<(), PatternError> {
        let atom = self.atom()?;
        nodes.push(PatternNode { atom, parent });
        let mut current = nodes.len() - 1;
        loop {
            match self.peek() {
                Some(b'(') => {
                    self.pos += 1;
                    let bond = self.bond()?;
                    self.chain(nodes, Some((current, bond)))?;
                    if !self.eat(b')') {
                        return Err(self.err("expected ')'"));
                    }
                }
                Some(c) if is_bond_char(c) || is_atom_start(c) => {
                    let bond = self.bond()?;
                    let atom = self.atom()?;
                    nodes.push(PatternNode {
                        atom,
                        parent: Some((current, bond)),
                    });
                    current = nodes.len() - 1;
                }
                _ => return Ok(()),
            }
        }
    }

    fn atom(&mut self) -> Result<AtomExpr, PatternError> {
        let Some(c) = self.peek() else {
            return Err(self.err("expected atom"));
        };
        if c == b'[' {
            self.pos += 1;
            let e = self.atom_low_and()?;
            if !self.eat(b']') {
                return Err(self.err("expected ']'"));
            }
            return Ok(e);
        }
        let rest = &self.text[self.pos..];
        let (expr, len) = match rest {
            [b'C', b'l', ..] => (AtomExpr::Element { z: 17, aromatic: false }, 2),
            [b'B', b'r', ..] => (AtomExpr::Element { z: 35, aromatic: false }, 2),
            [b'*', ..] => (AtomExpr::Any, 1),
            [c, ..] => match bare_symbol(*c) {
                Some((z, aromatic)) => (AtomExpr::Element { z, aromatic }, 1),
                None => return Err(self.err("expected atom")),
            },
            [] => unreachable!(),
        };
        self.pos += len;
        Ok(expr)
    }

    fn atom_low_and(&mut self) -> Result<AtomExpr, PatternError> {
        let mut terms = vec![self.atom_or()?];
        while self.eat(b';') {
            terms.push(self.atom_or()?);
        }
        Ok(collapse(terms, AtomExpr::And))
    }

    fn atom_or(&mut self) -> Result<AtomExpr, PatternError> {
        let mut terms = vec![self.atom_and()?];
        while self.eat(b',') {
            terms.push(self.atom_and()?);
        }
        Ok(collapse(terms, AtomExpr::Or))
    }

    fn atom_and(&mut self) -> Result<AtomExpr, PatternError> {
        let mut terms = vec![self.atom_unary()?];
        loop {
            // explicit '&' or implicit high-precedence AND by adjacency
            if self.eat(b'&') || matches!(self.peek(), Some(c) if c != b';' && c != b',' && c != b']') {
                terms.push(self.atom_unary()?);
            } else {
                break;
            }
        }
        Ok(collapse(terms, AtomExpr::And))
    }

    fn atom_unary(&mut self) -> Result<AtomExpr, PatternError> {
        if self.eat(b'!') {
            return Ok(AtomExpr::Not(Box::new(self.atom_unary()?)));
        }
        self.atom_primitive()
    }

    fn atom_primitive(&mut self) -> Result<AtomExpr, PatternError> {
        let Some(c) = self.peek() else {
            return Err(self.err("unterminated atom expression"));
        };
        match c {
            b'*' => {
                self.pos += 1;
                Ok(AtomExpr::Any)
            }
            b'#' => {
                self.pos += 1;
                let n = self.number().ok_or_else(|| self.err("expected atomic number"))?;
                u8::try_from(n)
                    .ok()
                    .filter(|&z| z <= elements::MAX_Z)
                    .map(AtomExpr::AtomicNumber)
                    .ok_or_else(|| self.err("atomic number out of range"))
            }
            b'$' => {
                self.pos += 1;
                if !self.eat(b'(') {
                    return Err(self.err("expected '(' after '$'"));
                }
                let start = self.pos;
                let mut depth = 1usize;
                while let Some(ch) = self.peek() {
                    match ch {
                        b'(' => depth += 1,
                        b')' => {
                            depth -= 1;
                            if depth == 0 {
                                break;
                            }
                        }
                        _ => {}
                    }
                    self.pos += 1;
                }
                if depth != 0 {
                    return Err(self.err("unterminated recursive pattern"));
                }
                let inner = &self.text[start..self.pos];
                self.pos += 1;
                let mut sub = Compiler {
                    text: inner,
                    pos: 0,
                    base: self.base + start,
                };
                let p = sub.pattern()?;
                if sub.pos != inner.len() {
                    return Err(sub.err("trailing characters in recursive pattern"));
                }
                Ok(AtomExpr::Recursive(Box::new(p)))
            }
            b'+' | b'-' => {
                self.pos += 1;
                let unit: i32 = if c == b'+' { 1 } else { -1 };
                let mut charge = unit;
                if let Some(n) = self.number() {
                    charge = unit * n as i32;
                } else {
                    while self.eat(c) {
                        charge += unit;
                    }
                }
                i8::try_from(charge)
                    .map(AtomExpr::Charge)
                    .map_err(|_| self.err("charge out of range"))
            }
            b'a' if self.peek2() != Some(b's') => {
                self.pos += 1;
                Ok(AtomExpr::Aromatic(true))
            }
            b'A' if !matches!(self.peek2(), Some(b'c' | b'g' | b'l' | b'm' | b'r' | b's' | b't' | b'u')) => {
                self.pos += 1;
                Ok(AtomExpr::Aromatic(false))
            }
            b'R' | b'D' | b'H'
                if !matches!(self.peek2(), Some(l) if l.is_ascii_lowercase()
                    && elements::atomic_number(std::str::from_utf8(&[c, l]).unwrap_or("")).is_some()) =>
            {
                self.pos += 1;
                let n = self.number();
                let n = u8::try_from(n.unwrap_or(1)).map_err(|_| self.err("count out of range"))?;
                Ok(match c {
                    b'R' if n == 0 => AtomExpr::Not(Box::new(AtomExpr::InRing)),
                    b'R' => AtomExpr::InRing,
                    b'D' => AtomExpr::Degree(n),
                    _ => AtomExpr::HCount(n),
                })
            }
            _ => self.element_symbol(),
        }
    }

    fn element_symbol(&mut self) -> Result<AtomExpr, PatternError> {
        let rest = &self.text[self.pos..];
        for (sym, z) in [("se", 34u8), ("as", 33), ("te", 52)] {
            if rest.starts_with(sym.as_bytes()) {
                self.pos += 2;
                return Ok(AtomExpr::Element { z, aromatic: true });
            }
        }
        match rest {
            [u, l, ..] if u.is_ascii_uppercase() && l.is_ascii_lowercase() => {
                let two = std::str::from_utf8(&rest[..2]).unwrap_or("");
                if let Some(z) = elements::atomic_number(two) {
                    self.pos += 2;
                    return Ok(AtomExpr::Element { z, aromatic: false });
                }
            }
            _ => {}
        }
        match rest {
            [u, ..] if u.is_ascii_uppercase() => {
                let one = (*u as char).to_string();
                let z = elements::atomic_number(&one).ok_or_else(|| self.err("unknown element"))?;
                self.pos += 1;
                Ok(AtomExpr::Element { z, aromatic: false })
            }
            [l, ..] => match bare_symbol(*l).filter(|&(_, aromatic)| aromatic) {
                Some((z, _)) => {
                    self.pos += 1;
                    Ok(AtomExpr::Element { z, aromatic: true })
                }
                None => Err(self.err("unexpected character in atom expression")),
            },
            [] => Err(self.err("unterminated atom expression")),
        }
    }

    fn bond(&mut self) -> Result<BondExpr, PatternError> {
        if !matches!(self.peek(), Some(c) if is_bond_char(c)) {
            return Ok(BondExpr::Implicit);
        }
        self.bond_low_and()
    }

    fn bond_low_and(&mut self) -> Result<BondExpr, PatternError> {
        let mut terms = vec![self.bond_or()?];
        while self.eat(b';') {
            terms.push(self.bond_or()?);
        }
        Ok(collapse(terms, BondExpr::And))
    }

    fn bond_or(&mut self) -> Result<BondExpr, PatternError> {
        let mut terms = vec![self.bond_and()?];
        while self.eat(b',') {
            terms.push(self.bond_and()?);
        }
        Ok(collapse(terms, BondExpr::Or))
    }

    fn bond_and(&mut self) -> Result<BondExpr, PatternError> {
        let mut terms = vec![self.bond_unary()?];
        loop {
            if self.eat(b'&') || matches!(self.peek(), Some(b'-' | b'=' | b'#' | b':' | b'~' | b'@' | b'!')) {
                terms.push(self.bond_unary()?);
            } else {
                break;
            }
        }
        Ok(collapse(terms, BondExpr::And))
    }

    fn bond_unary(&mut self) -> Result<BondExpr, PatternError> {
        if self.eat(b'!') {
            return Ok(BondExpr::Not(Box::new(self.bond_unary()?)));
        }
        let e = match self.peek() {
            Some(b'-') => BondExpr::Order(BondOrder::Single),
            Some(b'=') => BondExpr::Order(BondOrder::Double),
            Some(b'#') => BondExpr::Order(BondOrder::Triple),
            Some(b':') => BondExpr::Order(BondOrder::Aromatic),
            Some(b'~') => BondExpr::Any,
            Some(b'@') => BondExpr::Ring,
            _ => return Err(self.err("expected bond primitive")),
        };
        self.pos += 1;
        Ok(e)
    }
}

fn collapse<T>(mut terms: Vec<T>, wrap: fn(Vec<T>) -> T) -> T {
    if terms.len() == 1 {
        terms.pop().expect("one term")
    } else {
        wrap(terms)
    }
}

fn is_bond_char(c: u8) -> bool {
    matches!(c, b'-' | b'=' | b'#' | b':' | b'~' | b'@' | b'!')
}

fn is_atom_start(c: u8) -> bool {
    c == b'[' || c == b'*' || bare_symbol(c).is_some()
}

fn bare_symbol(c: u8) -> Option<(u8, bool)> {
    Some(match c {
        b'B' => (5, false),
        b'C' => (6, false),
        b'N' => (7, false),
        b'O' => (8, false),
        b'P' => (15, false),
        b'S' => (16, false),
        b'F' => (9, false),
        b'I' => (53, false),
        b'b' => (5, true),
        b'c' => (6, true),
        b'n' => (7, true),
        b'o' => (8, true),
        b'p' => (15, true),
        b's' => (16, true),
        _ => return None,
    })
}

/// Matcher with ring information cached for one molecule.
pub struct PatternMatcher<'m> {
    mol: &'m MoleculeGraph,
    ring_atoms: Vec<bool>,
    ring_bonds: Vec<bool>,
}

impl<'m> PatternMatcher<'m> {
    pub fn new(mol: &'m MoleculeGraph) -> Self {
        PatternMatcher {
            mol,
            ring_atoms: mol.ring_atoms(),
            ring_bonds: mol.ring_bonds(),
        }
    }

    pub fn matches(&self, p: &SubstructurePattern, root: usize) -> Result<bool, PatternError> {
        let count = self.mol.atom_count();
        if root >= count {
            return Err(PatternError::IndexOutOfRange { index: root, count });
        }
        Ok(self.embed(p, root))
    }

    /// All atoms at which the pattern matches, ascending.
    pub fn matching_atoms(&self, p: &SubstructurePattern) -> Vec<usize> {
        (0..self.mol.atom_count()).filter(|&i| self.embed(p, i)).collect()
    }

    fn embed(&self, p: &SubstructurePattern, root: usize) -> bool {
        if !self.atom_ok(&p.nodes[0].atom, root) {
            return false;
        }
        let mut mapping = vec![usize::MAX; p.nodes.len()];
        mapping[0] = root;
        self.extend(p, 1, &mut mapping)
    }

    fn extend(&self, p: &SubstructurePattern, k: usize, mapping: &mut Vec<usize>) -> bool {
        if k == p.nodes.len() {
            return true;
        }
        let node = &p.nodes[k];
        let (parent, bond_expr) = node.parent.as_ref().expect("non-root node has a parent");
        let anchor = mapping[*parent];
        for &(nbr, b) in self.mol.neighbors(anchor) {
            if mapping[..k].contains(&nbr) {
                continue;
            }
            if !self.bond_ok(bond_expr, b) || !self.atom_ok(&node.atom, nbr) {
                continue;
            }
            mapping[k] = nbr;
            if self.extend(p, k + 1, mapping) {
                return true;
            }
        }
        mapping[k] = usize::MAX;
        false
    }

    fn atom_ok(&self, e: &AtomExpr, i: usize) -> bool {
        let a = self.mol.atom(i);
        match e {
            AtomExpr::Any => true,
            AtomExpr::Element { z, aromatic } => a.element == *z && a.aromatic == *aromatic,
            AtomExpr::AtomicNumber(z) => a.element == *z,
            AtomExpr::Aromatic(flag) => a.aromatic == *flag,
            AtomExpr::InRing => self.ring_atoms[i],
            AtomExpr::Degree(d) => self.mol.degree(i) == usize::from(*d),
            AtomExpr::HCount(h) => a.explicit_h == *h,
            AtomExpr::Charge(c) => a.formal_charge == *c,
            AtomExpr::Recursive(p) => self.embed(p, i),
            AtomExpr::Not(inner) => !self.atom_ok(inner, i),
            AtomExpr::And(terms) => terms.iter().all(|t| self.atom_ok(t, i)),
            AtomExpr::Or(terms) => terms.iter().any(|t| self.atom_ok(t, i)),
        }
    }

    fn bond_ok(&self, e: &BondExpr, b: usize) -> bool {
        let order = self.mol.bond(b).order;
        match e {
            BondExpr::Implicit => matches!(order, BondOrder::Single | BondOrder::Aromatic),
            BondExpr::Any => true,
            BondExpr::Order(o) => order == *o,
            BondExpr::Ring => self.ring_bonds[b],
            BondExpr::Not(inner) => !self.bond_ok(inner, b),
            BondExpr::And(terms) => terms.iter().all(|t| self.bond_ok(t, b)),
            BondExpr::Or(terms) => terms.iter().any(|t| self.bond_ok(t, b)),
        }
    }
}

/// True iff `p` embeds in `mol` with its root at atom `root`.
pub fn match_pattern(p: &SubstructurePattern, mol: &MoleculeGraph, root: usize) -> Result<bool, PatternError> {
    PatternMatcher::new(mol).matches(p, root)
}
