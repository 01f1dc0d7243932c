//! The relational term language: meet, composition, join and commutator
//! brackets over named relation variables.
//!
//! Concrete syntax: `^` is meet, `o` or `.` is composition, `v` or `+` is
//! join, `[s,t]` is a commutator. Precedence is meet > composition > join,
//! all left-associative; parentheses group; whitespace is insignificant.
//! Variables are identifiers (a letter followed by alphanumerics); the bare
//! letters `o` and `v` are operators and cannot name a variable.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum RelTerm {
    Var(String),
    Meet(Box<RelTerm>, Box<RelTerm>),
    Comp(Box<RelTerm>, Box<RelTerm>),
    Join(Box<RelTerm>, Box<RelTerm>),
    /// Commutator bracket `[l, r]`; evaluated through the TC-commutator.
    Comm(Box<RelTerm>, Box<RelTerm>),
}

impl RelTerm {
    pub fn var(name: impl Into<String>) -> Self {
        RelTerm::Var(name.into())
    }

    pub fn meet(l: RelTerm, r: RelTerm) -> Self {
        RelTerm::Meet(Box::new(l), Box::new(r))
    }

    pub fn comp(l: RelTerm, r: RelTerm) -> Self {
        RelTerm::Comp(Box::new(l), Box::new(r))
    }

    pub fn join(l: RelTerm, r: RelTerm) -> Self {
        RelTerm::Join(Box::new(l), Box::new(r))
    }

    pub fn comm(l: RelTerm, r: RelTerm) -> Self {
        RelTerm::Comm(Box::new(l), Box::new(r))
    }

    pub fn is_join_free(&self) -> bool {
        match self {
            RelTerm::Var(_) => true,
            RelTerm::Join(_, _) => false,
            RelTerm::Meet(l, r) | RelTerm::Comp(l, r) | RelTerm::Comm(l, r) => {
                l.is_join_free() && r.is_join_free()
            }
        }
    }

    pub fn is_commutator_free(&self) -> bool {
        match self {
            RelTerm::Var(_) => true,
            RelTerm::Comm(_, _) => false,
            RelTerm::Meet(l, r) | RelTerm::Comp(l, r) | RelTerm::Join(l, r) => {
                l.is_commutator_free() && r.is_commutator_free()
            }
        }
    }

    /// Variables in order of first occurrence (left to right).
    pub fn variables(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut Vec<String>) {
        match self {
            RelTerm::Var(v) => {
                if !out.iter().any(|w| w == v) {
                    out.push(v.clone());
                }
            }
            RelTerm::Meet(l, r) | RelTerm::Comp(l, r) | RelTerm::Join(l, r) | RelTerm::Comm(l, r) => {
                l.collect_vars(out);
                r.collect_vars(out);
            }
        }
    }

    /// Simultaneous substitution; the mapping must cover every variable.
    pub fn substitute(&self, mapping: &BTreeMap<String, RelTerm>) -> Result<RelTerm> {
        match self {
            RelTerm::Var(v) => mapping.get(v).cloned().ok_or_else(|| Error::UnboundVariable(v.clone())),
            RelTerm::Meet(l, r) => Ok(RelTerm::meet(l.substitute(mapping)?, r.substitute(mapping)?)),
            RelTerm::Comp(l, r) => Ok(RelTerm::comp(l.substitute(mapping)?, r.substitute(mapping)?)),
            RelTerm::Join(l, r) => Ok(RelTerm::join(l.substitute(mapping)?, r.substitute(mapping)?)),
            RelTerm::Comm(l, r) => Ok(RelTerm::comm(l.substitute(mapping)?, r.substitute(mapping)?)),
        }
    }

    /// Replaces every join `u ∨ w` bottom-up by the alternating relational
    /// product `u ∘ w ∘ u ∘ …` with exactly `k` factors, starting from `u`.
    /// The result is join-free.
    pub fn expand_join(&self, k: usize) -> RelTerm {
        assert!(k >= 1, "fold depth must be at least 1");
        match self {
            RelTerm::Var(v) => RelTerm::Var(v.clone()),
            RelTerm::Meet(l, r) => RelTerm::meet(l.expand_join(k), r.expand_join(k)),
            RelTerm::Comp(l, r) => RelTerm::comp(l.expand_join(k), r.expand_join(k)),
            RelTerm::Comm(l, r) => RelTerm::comm(l.expand_join(k), r.expand_join(k)),
            RelTerm::Join(l, r) => {
                let u = l.expand_join(k);
                let w = r.expand_join(k);
                let mut out = u.clone();
                for i in 1..k {
                    let factor = if i % 2 == 1 { w.clone() } else { u.clone() };
                    out = RelTerm::comp(out, factor);
                }
                out
            }
        }
    }

    pub fn parse(text: &str) -> Result<RelTerm> {
        Parser::new(text).parse_all()
    }
}

/// The herringbone lattice term `y^n` in the variables `x, y, z`:
/// `y^0 = y` and `y^{n+1}(x,y,z) = y ∨ (x ∧ y^n(x,z,y))`.
pub fn herringbone(n: usize) -> RelTerm {
    herringbone_in(n, "x", "y", "z")
}

fn herringbone_in(n: usize, x: &str, y: &str, z: &str) -> RelTerm {
    if n == 0 {
        RelTerm::var(y)
    } else {
        RelTerm::join(
            RelTerm::var(y),
            RelTerm::meet(RelTerm::var(x), herringbone_in(n - 1, x, z, y)),
        )
    }
}

// Precedence levels for printing: join 1, composition 2, meet 3.
fn precedence(t: &RelTerm) -> u8 {
    match t {
        RelTerm::Var(_) | RelTerm::Comm(_, _) => 4,
        RelTerm::Meet(_, _) => 3,
        RelTerm::Comp(_, _) => 2,
        RelTerm::Join(_, _) => 1,
    }
}

impl fmt::Display for RelTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn go(t: &RelTerm, min: u8, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            let p = precedence(t);
            let parens = p < min;
            if parens {
                write!(f, "(")?;
            }
            match t {
                RelTerm::Var(v) => write!(f, "{}", v)?,
                RelTerm::Comm(l, r) => {
                    write!(f, "[")?;
                    go(l, 1, f)?;
                    write!(f, ",")?;
                    go(r, 1, f)?;
                    write!(f, "]")?;
                }
                RelTerm::Meet(l, r) => {
                    go(l, 3, f)?;
                    write!(f, " ^ ")?;
                    go(r, 4, f)?;
                }
                RelTerm::Comp(l, r) => {
                    go(l, 2, f)?;
                    write!(f, " o ")?;
                    go(r, 3, f)?;
                }
                RelTerm::Join(l, r) => {
                    go(l, 1, f)?;
                    write!(f, " v ")?;
                    go(r, 2, f)?;
                }
            }
            if parens {
                write!(f, ")")?;
            }
            Ok(())
        }
        go(self, 1, f)
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Meet,
    Comp,
    Join,
    LParen,
    RParen,
    LBrack,
    RBrack,
    Comma,
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn new(text: &str) -> Self {
        let mut toks = Vec::new();
        let bytes = text.as_bytes();
        let mut i = 0;
        while i < bytes.len() {
            let b = bytes[i];
            if b.is_ascii_whitespace() {
                i += 1;
                continue;
            }
            let start = i;
            let tok = match b {
                b'^' => {
                    i += 1;
                    Tok::Meet
                }
                b'.' => {
                    i += 1;
                    Tok::Comp
                }
                b'+' => {
                    i += 1;
                    Tok::Join
                }
                b'(' => {
                    i += 1;
                    Tok::LParen
                }
                b')' => {
                    i += 1;
                    Tok::RParen
                }
                b'[' => {
                    i += 1;
                    Tok::LBrack
                }
                b']' => {
                    i += 1;
                    Tok::RBrack
                }
                b',' => {
                    i += 1;
                    Tok::Comma
                }
                _ if b.is_ascii_alphabetic() => {
                    while i < bytes.len() && bytes[i].is_ascii_alphanumeric() {
                        i += 1;
                    }
                    match &text[start..i] {
                        "o" => Tok::Comp,
                        "v" => Tok::Join,
                        w => Tok::Ident(w.to_string()),
                    }
                }
                _ => {
                    // Record the offending position; parse_all rejects it.
                    toks.push((start, Tok::Ident(String::new())));
                    break;
                }
            };
            toks.push((start, tok));
        }
        Parser { toks, pos: 0, end: text.len() }
    }

    fn parse_all(mut self) -> Result<RelTerm> {
        if self.toks.is_empty() {
            return Err(Error::Parse { pos: 0, msg: "empty term".into() });
        }
        if let Some((at, Tok::Ident(w))) = self.toks.last() {
            if w.is_empty() {
                return Err(Error::Parse { pos: *at, msg: "unexpected character".into() });
            }
        }
        let t = self.join_expr()?;
        if let Some((at, _)) = self.toks.get(self.pos) {
            return Err(Error::Parse { pos: *at, msg: "trailing input after term".into() });
        }
        Ok(t)
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn here(&self) -> usize {
        self.toks.get(self.pos).map(|(at, _)| *at).unwrap_or(self.end)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(_, t)| t.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<()> {
        let at = self.here();
        match self.bump() {
            Some(t) if t == want => Ok(()),
            _ => Err(Error::Parse { pos: at, msg: format!("expected {}", what) }),
        }
    }

    fn join_expr(&mut self) -> Result<RelTerm> {
        let mut t = self.comp_expr()?;
        while matches!(self.peek(), Some(Tok::Join)) {
            self.bump();
            t = RelTerm::join(t, self.comp_expr()?);
        }
        Ok(t)
    }

    fn comp_expr(&mut self) -> Result<RelTerm> {
        let mut t = self.meet_expr()?;
        while matches!(self.peek(), Some(Tok::Comp)) {
            self.bump();
            t = RelTerm::comp(t, self.meet_expr()?);
        }
        Ok(t)
    }

    fn meet_expr(&mut self) -> Result<RelTerm> {
        let mut t = self.atom()?;
        while matches!(self.peek(), Some(Tok::Meet)) {
            self.bump();
            t = RelTerm::meet(t, self.atom()?);
        }
        Ok(t)
    }

    fn atom(&mut self) -> Result<RelTerm> {
        let at = self.here();
        match self.bump() {
            Some(Tok::Ident(w)) => Ok(RelTerm::Var(w)),
            Some(Tok::LParen) => {
                let t = self.join_expr()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(t)
            }
            Some(Tok::LBrack) => {
                let l = self.join_expr()?;
                self.expect(Tok::Comma, "',' between commutator operands")?;
                let r = self.join_expr()?;
                self.expect(Tok::RBrack, "']'")?;
                Ok(RelTerm::comm(l, r))
            }
            _ => Err(Error::Parse { pos: at, msg: "expected a variable, '(' or '['".into() }),
        }
    }
}
