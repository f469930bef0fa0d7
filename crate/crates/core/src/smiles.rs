//! SMILES parser producing a molecular graph suitable for fingerprinting.
//!
//! The grammar covered here is the practical subset found in virtual
//! screening corpora: organic-subset atoms, bracket atoms with isotope /
//! charge / explicit hydrogen count, bonds `- = # :`, aromatic lowercase
//! atoms, branches, and ring closures `1`-`9` and `%nn`. Stereo markers
//! (`/`, `\`, `@`) are consumed and ignored. Dot-disconnected inputs are
//! rejected. There is no kekulization and no aromaticity perception:
//! aromaticity is taken verbatim from lowercase notation.

use std::collections::HashMap;
use std::fmt;
use thiserror::Error;

/// Errors raised while parsing a SMILES string.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SmilesError {
    #[error("empty input")]
    EmptyInput,
    #[error("unbalanced parenthesis")]
    UnbalancedParenthesis,
    #[error("ring closure {0} opened but never closed")]
    UnclosedRing(u16),
    #[error("unrecognized symbol {0:?}")]
    UnknownSymbol(String),
    #[error("bond symbol with nothing to bond to")]
    DanglingBond,
    #[error("dot-disconnected inputs are not supported")]
    DisconnectedInput,
    #[error("bracket atom is missing its closing ']'")]
    UnclosedBracket,
    #[error("ring closure {0} bonds an atom to itself")]
    SelfRingClosure(u16),
    #[error("conflicting bond orders on ring closure {0}")]
    RingBondConflict(u16),
    #[error("duplicate bond between atoms {0} and {1}")]
    DuplicateBond(usize, usize),
}

/// Bond multiplicity. `Aromatic` is its own order; no Kekulé resolution
/// happens anywhere in this crate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BondOrder {
    Single,
    Double,
    Triple,
    Aromatic,
}

impl BondOrder {
    /// Fixed numeric code used by the fingerprint hasher.
    pub fn code(self) -> u8 {
        match self {
            BondOrder::Single => 1,
            BondOrder::Double => 2,
            BondOrder::Triple => 3,
            BondOrder::Aromatic => 4,
        }
    }

    /// Contribution to an atom's used valence.
    fn valence_units(self) -> u32 {
        match self {
            BondOrder::Single | BondOrder::Aromatic => 1,
            BondOrder::Double => 2,
            BondOrder::Triple => 3,
        }
    }
}

impl fmt::Display for BondOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            BondOrder::Single => "single",
            BondOrder::Double => "double",
            BondOrder::Triple => "triple",
            BondOrder::Aromatic => "aromatic",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Atom {
    /// Position in `MolGraph::atoms`, 0-based.
    pub index: usize,
    /// Chemical symbol, first letter capitalized ("C", "Cl", "Se", ...).
    pub element: String,
    pub aromatic: bool,
    pub formal_charge: i32,
    /// Hydrogen count written in a bracket atom. Brackets always pin the
    /// hydrogen count, so `[C]` yields `Some(0)`.
    pub explicit_h: Option<u32>,
    /// Hydrogens inferred from standard valences for organic-subset atoms;
    /// 0 whenever `explicit_h` is present.
    pub implicit_h: u32,
}

impl Atom {
    /// Hydrogen count used by the fingerprint invariants: the bracket count
    /// when given, the valence-derived count otherwise.
    pub fn total_h(&self) -> u32 {
        self.explicit_h.unwrap_or(self.implicit_h)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Bond {
    pub a: usize,
    pub b: usize,
    pub order: BondOrder,
}

/// Parsed molecular graph: atoms in input order, bonds in creation order,
/// and a per-atom adjacency list of `(neighbor atom, bond index)` pairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MolGraph {
    pub atoms: Vec<Atom>,
    pub bonds: Vec<Bond>,
    pub adjacency: Vec<Vec<(usize, usize)>>,
}

impl MolGraph {
    pub fn num_atoms(&self) -> usize {
        self.atoms.len()
    }

    pub fn degree(&self, atom: usize) -> usize {
        self.adjacency[atom].len()
    }

    pub fn neighbors(&self, atom: usize) -> &[(usize, usize)] {
        &self.adjacency[atom]
    }
}

fn default_valence(element: &str) -> Option<u32> {
    match element {
        "B" => Some(3),
        "C" => Some(4),
        "N" | "P" => Some(3),
        "O" | "S" => Some(2),
        "F" | "Cl" | "Br" | "I" => Some(1),
        _ => None,
    }
}

/// A ring-closure digit waiting for its partner.
struct OpenRing {
    atom: usize,
    /// Bond order written next to the opening digit, if any.
    order: Option<BondOrder>,
}

struct Parser<'a> {
    bytes: &'a [u8],
    pos: usize,
    atoms: Vec<Atom>,
    bonds: Vec<Bond>,
    /// Atom the next bond attaches to.
    prev_atom: Option<usize>,
    /// Bond symbol seen since the last atom, not yet consumed.
    pending_bond: Option<BondOrder>,
    branch_stack: Vec<usize>,
    open_rings: HashMap<u16, OpenRing>,
    /// Ring numbers in opening order, for deterministic error reporting.
    ring_order: Vec<u16>,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str) -> Self {
        Parser {
            bytes: text.as_bytes(),
            pos: 0,
            atoms: Vec::new(),
            bonds: Vec::new(),
            prev_atom: None,
            pending_bond: None,
            branch_stack: Vec::new(),
            open_rings: HashMap::new(),
            ring_order: Vec::new(),
        }
    }

    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<u8> {
        let c = self.peek();
        if c.is_some() {
            self.pos += 1;
        }
        c
    }

    fn push_atom(&mut self, element: String, aromatic: bool, charge: i32, explicit_h: Option<u32>) {
        let index = self.atoms.len();
        self.atoms.push(Atom {
            index,
            element,
            aromatic,
            formal_charge: charge,
            explicit_h,
            implicit_h: 0,
        });
        if let Some(prev) = self.prev_atom {
            let order = self.take_bond_order(prev, index);
            self.bonds.push(Bond { a: prev, b: index, order });
        }
        self.prev_atom = Some(index);
    }

    /// Resolve the order of the bond about to be created between `a` and
    /// `b`: an explicit symbol wins, otherwise aromatic when both endpoints
    /// are aromatic, single otherwise.
    fn take_bond_order(&mut self, a: usize, b: usize) -> BondOrder {
        match self.pending_bond.take() {
            Some(order) => order,
            None => {
                if self.atoms[a].aromatic && self.atoms[b].aromatic {
                    BondOrder::Aromatic
                } else {
                    BondOrder::Single
                }
            }
        }
    }

    fn ring_closure(&mut self, number: u16) -> Result<(), SmilesError> {
        let current = match self.prev_atom {
            Some(a) => a,
            None => return Err(SmilesError::DanglingBond),
        };
        let annotation = self.pending_bond.take();
        match self.open_rings.remove(&number) {
            Some(open) => {
                if open.atom == current {
                    return Err(SmilesError::SelfRingClosure(number));
                }
                let order = match (open.order, annotation) {
                    (Some(x), Some(y)) if x != y => {
                        return Err(SmilesError::RingBondConflict(number))
                    }
                    (Some(x), _) => x,
                    (None, Some(y)) => y,
                    (None, None) => {
                        if self.atoms[open.atom].aromatic && self.atoms[current].aromatic {
                            BondOrder::Aromatic
                        } else {
                            BondOrder::Single
                        }
                    }
                };
                let (lo, hi) = (open.atom.min(current), open.atom.max(current));
                if self
                    .bonds
                    .iter()
                    .any(|bond| bond.a.min(bond.b) == lo && bond.a.max(bond.b) == hi)
                {
                    return Err(SmilesError::DuplicateBond(lo, hi));
                }
                self.bonds.push(Bond { a: open.atom, b: current, order });
                self.ring_order.retain(|&n| n != number);
            }
            None => {
                self.open_rings.insert(number, OpenRing { atom: current, order: annotation });
                self.ring_order.push(number);
            }
        }
        Ok(())
    }

    /// Parse the body of a bracket atom; the leading `[` is already consumed.
    fn bracket_atom(&mut self) -> Result<(), SmilesError> {
        // isotope: parsed, ignored
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.bump();
        }
        let first = self.bump().ok_or(SmilesError::UnclosedBracket)?;
        if !first.is_ascii_alphabetic() {
            return Err(SmilesError::UnknownSymbol((first as char).to_string()));
        }
        let aromatic = first.is_ascii_lowercase();
        let mut element = String::new();
        element.push(first.to_ascii_uppercase() as char);
        // a second lowercase letter extends the symbol: Cl, Br, Si, [se], ...
        if self.peek().is_some_and(|next| next.is_ascii_lowercase()) {
            element.push(self.bump().unwrap() as char);
        }
        let mut explicit_h: u32 = 0;
        let mut charge: i32 = 0;
        loop {
            match self.peek() {
                Some(b'@') => {
                    // chirality: @ and @@ are consumed and ignored
                    self.bump();
                    if self.peek() == Some(b'@') {
                        self.bump();
                    }
                }
                Some(b'H') => {
                    self.bump();
                    explicit_h = 1;
                    let mut digits = 0u32;
                    let mut seen = false;
                    while let Some(c) = self.peek() {
                        if c.is_ascii_digit() {
                            digits = digits * 10 + u32::from(c - b'0');
                            seen = true;
                            self.bump();
                        } else {
                            break;
                        }
                    }
                    if seen {
                        explicit_h = digits;
                    }
                }
                Some(c @ (b'+' | b'-')) => {
                    self.bump();
                    let sign: i32 = if c == b'+' { 1 } else { -1 };
                    let mut magnitude = 1i32;
                    if self.peek().is_some_and(|d| d.is_ascii_digit()) {
                        magnitude = 0;
                        while let Some(d) = self.peek() {
                            if d.is_ascii_digit() {
                                magnitude = magnitude * 10 + i32::from(d - b'0');
                                self.bump();
                            } else {
                                break;
                            }
                        }
                    } else {
                        // repeated ++ / -- notation
                        while self.peek() == Some(c) {
                            magnitude += 1;
                            self.bump();
                        }
                    }
                    charge += sign * magnitude;
                }
                Some(b':') => {
                    // atom class: consumed, ignored
                    self.bump();
                    while self.peek().is_some_and(|c| c.is_ascii_digit()) {
                        self.bump();
                    }
                }
                Some(b']') => {
                    self.bump();
                    self.push_atom(element, aromatic, charge, Some(explicit_h));
                    return Ok(());
                }
                Some(other) => {
                    return Err(SmilesError::UnknownSymbol((other as char).to_string()))
                }
                None => return Err(SmilesError::UnclosedBracket),
            }
        }
    }

    fn run(mut self) -> Result<MolGraph, SmilesError> {
        while let Some(c) = self.bump() {
            match c {
                b'[' => self.bracket_atom()?,
                b'(' => {
                    let prev = self.prev_atom.ok_or(SmilesError::UnbalancedParenthesis)?;
                    if self.pending_bond.is_some() {
                        return Err(SmilesError::DanglingBond);
                    }
                    self.branch_stack.push(prev);
                }
                b')' => {
                    if self.pending_bond.is_some() {
                        return Err(SmilesError::DanglingBond);
                    }
                    let parent =
                        self.branch_stack.pop().ok_or(SmilesError::UnbalancedParenthesis)?;
                    self.prev_atom = Some(parent);
                }
                b'-' => self.set_pending(BondOrder::Single)?,
                b'=' => self.set_pending(BondOrder::Double)?,
                b'#' => self.set_pending(BondOrder::Triple)?,
                b':' => self.set_pending(BondOrder::Aromatic)?,
                // directional single bonds: stereo is out of scope
                b'/' | b'\\' => self.set_pending(BondOrder::Single)?,
                b'%' => {
                    let d1 = self.bump().filter(u8::is_ascii_digit);
                    let d2 = self.bump().filter(u8::is_ascii_digit);
                    match (d1, d2) {
                        (Some(a), Some(b)) => {
                            let n = u16::from(a - b'0') * 10 + u16::from(b - b'0');
                            self.ring_closure(n)?;
                        }
                        _ => return Err(SmilesError::UnknownSymbol("%".to_string())),
                    }
                }
                b'0'..=b'9' => self.ring_closure(u16::from(c - b'0'))?,
                b'.' => return Err(SmilesError::DisconnectedInput),
                b'B' => {
                    if self.peek() == Some(b'r') {
                        self.bump();
                        self.push_atom("Br".to_string(), false, 0, None);
                    } else {
                        self.push_atom("B".to_string(), false, 0, None);
                    }
                }
                b'C' => {
                    if self.peek() == Some(b'l') {
                        self.bump();
                        self.push_atom("Cl".to_string(), false, 0, None);
                    } else {
                        self.push_atom("C".to_string(), false, 0, None);
                    }
                }
                b'N' | b'O' | b'P' | b'S' | b'F' | b'I' => {
                    self.push_atom((c as char).to_string(), false, 0, None);
                }
                b'b' | b'c' | b'n' | b'o' | b'p' | b's' => {
                    self.push_atom((c as char).to_ascii_uppercase().to_string(), true, 0, None);
                }
                other => return Err(SmilesError::UnknownSymbol((other as char).to_string())),
            }
        }

        if self.pending_bond.is_some() {
            return Err(SmilesError::DanglingBond);
        }
        if !self.branch_stack.is_empty() {
            return Err(SmilesError::UnbalancedParenthesis);
        }
        if let Some(&n) = self.ring_order.first() {
            return Err(SmilesError::UnclosedRing(n));
        }
        if self.atoms.is_empty() {
            return Err(SmilesError::EmptyInput);
        }

        let mut adjacency: Vec<Vec<(usize, usize)>> = vec![Vec::new(); self.atoms.len()];
        for (i, bond) in self.bonds.iter().enumerate() {
            adjacency[bond.a].push((bond.b, i));
            adjacency[bond.b].push((bond.a, i));
        }

        // implicit hydrogens from standard valences; bracket atoms are
        // pinned by their explicit count (which may be 0)
        for atom in &mut self.atoms {
            if atom.explicit_h.is_some() {
                continue;
            }
            let Some(valence) = default_valence(&atom.element) else {
                continue;
            };
            let used: u32 = if atom.aromatic {
                // one unit per ring bond plus one for the shared aromatic
                // system: valence - degree - 1
                adjacency[atom.index].len() as u32 + 1
            } else {
                adjacency[atom.index]
                    .iter()
                    .map(|&(_, b)| self.bonds[b].order.valence_units())
                    .sum()
            };
            atom.implicit_h = valence.saturating_sub(used);
        }

        Ok(MolGraph { atoms: self.atoms, bonds: self.bonds, adjacency })
    }

    fn set_pending(&mut self, order: BondOrder) -> Result<(), SmilesError> {
        if self.pending_bond.is_some() || self.prev_atom.is_none() {
            return Err(SmilesError::DanglingBond);
        }
        self.pending_bond = Some(order);
        Ok(())
    }
}

/// Parse a single-fragment SMILES string into a [`MolGraph`].
///
/// Parsing is deterministic: identical input yields a structurally
/// identical graph, with atoms indexed in input order.
pub fn parse_smiles(text: &str) -> Result<MolGraph, SmilesError> {
    let trimmed = text.trim();
    if trimmed.is_empty() {
        return Err(SmilesError::EmptyInput);
    }
    Parser::new(trimmed).run()
}
