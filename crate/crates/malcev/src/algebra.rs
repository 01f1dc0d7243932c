//! Finite algebras with explicit operation tables.
//!
//! The universe is always `0..n-1`. Tables are stored row-major over argument
//! tuples in lexicographic order with coordinate 0 most significant; that
//! layout is part of the algebra file format and must not change. Product
//! elements use the same mixed-radix encoding.

use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::rel::Partition;

/// Default cap on universe sizes produced by `product` and friends.
pub const DEFAULT_SIZE_CAP: usize = 1 << 20;
/// Cap on total table cells materialised by `product`.
const TABLE_CELL_CAP: u128 = 1 << 26;

/// An ordered list of operation symbols with arities. Names are unique;
/// arity 0 is allowed (constants).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Signature {
    symbols: Vec<(String, usize)>,
}

impl Signature {
    pub fn new(symbols: Vec<(String, usize)>) -> Result<Self> {
        for (i, (name, _)) in symbols.iter().enumerate() {
            if symbols[..i].iter().any(|(m, _)| m == name) {
                return Err(Error::Parse {
                    pos: 0,
                    msg: format!("duplicate operation symbol {}", name),
                });
            }
        }
        Ok(Signature { symbols })
    }

    pub fn empty() -> Self {
        Signature { symbols: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbols(&self) -> &[(String, usize)] {
        &self.symbols
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.symbols.iter().position(|(m, _)| m == name)
    }

    pub fn name(&self, idx: usize) -> &str {
        &self.symbols[idx].0
    }

    pub fn arity(&self, idx: usize) -> usize {
        self.symbols[idx].1
    }
}

/// A finite algebra: universe `0..size-1` plus one total table per symbol.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FiniteAlgebra {
    size: usize,
    signature: Signature,
    tables: Vec<Vec<usize>>,
}

impl FiniteAlgebra {
    pub fn new(size: usize, signature: Signature, tables: Vec<Vec<usize>>) -> Result<Self> {
        if size == 0 {
            return Err(Error::InvalidSize);
        }
        if tables.len() != signature.len() {
            return Err(Error::Parse {
                pos: 0,
                msg: format!("{} tables supplied for {} symbols", tables.len(), signature.len()),
            });
        }
        for (idx, table) in tables.iter().enumerate() {
            let arity = signature.arity(idx);
            let expect = (size as u128).pow(arity as u32);
            if table.len() as u128 != expect {
                return Err(Error::Parse {
                    pos: 0,
                    msg: format!(
                        "table for {} has {} entries, expected {}",
                        signature.name(idx),
                        table.len(),
                        expect
                    ),
                });
            }
            if let Some(&v) = table.iter().find(|&&v| v >= size) {
                return Err(Error::Parse {
                    pos: 0,
                    msg: format!("table for {} contains value {} outside 0..{}", signature.name(idx), v, size),
                });
            }
        }
        Ok(FiniteAlgebra { size, signature, tables })
    }

    /// The algebra on `0..n-1` with no operations at all; its term operations
    /// are exactly the projections.
    pub fn set_algebra(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidSize);
        }
        Ok(FiniteAlgebra {
            size: n,
            signature: Signature::empty(),
            tables: Vec::new(),
        })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn table(&self, op: usize) -> &[usize] {
        &self.tables[op]
    }

    /// Row-major index of an argument tuple, coordinate 0 most significant.
    #[inline]
    pub fn table_index(&self, args: &[usize]) -> usize {
        let mut idx = 0;
        for &a in args {
            idx = idx * self.size + a;
        }
        idx
    }

    #[inline]
    pub fn apply(&self, op: usize, args: &[usize]) -> usize {
        self.tables[op][self.table_index(args)]
    }

    /// Evaluates a term under an assignment of its variables.
    pub fn eval(&self, term: &AlgTerm, assignment: &[usize]) -> Result<usize> {
        match term {
            AlgTerm::Var(i) => {
                assignment.get(*i).copied().ok_or_else(|| Error::UnboundVariable(format!("x{}", i + 1)))
            }
            AlgTerm::App { symbol, args } => {
                let idx = self
                    .signature
                    .index_of(symbol)
                    .ok_or_else(|| Error::UnboundSymbol(symbol.clone()))?;
                let arity = self.signature.arity(idx);
                if args.len() != arity {
                    return Err(Error::ArityMismatch {
                        symbol: symbol.clone(),
                        expected: arity,
                        found: args.len(),
                    });
                }
                let vals = args.iter().map(|t| self.eval(t, assignment)).collect::<Result<Vec<_>>>()?;
                Ok(self.apply(idx, &vals))
            }
        }
    }

    /// The `k`-th direct power, with tables acting coordinatewise. Elements
    /// are encoded mixed-radix, coordinate 0 most significant.
    pub fn product(&self, k: usize) -> Result<FiniteAlgebra> {
        self.product_capped(k, DEFAULT_SIZE_CAP)
    }

    pub fn product_capped(&self, k: usize, cap: usize) -> Result<FiniteAlgebra> {
        let big = (self.size as u128).checked_pow(k as u32).ok_or(Error::CapacityExceeded {
            requested: u128::MAX,
            cap: cap as u128,
        })?;
        if big > cap as u128 || big == 0 {
            return Err(Error::CapacityExceeded { requested: big, cap: cap as u128 });
        }
        let new_size = big as usize;
        let mut tables = Vec::with_capacity(self.tables.len());
        for op in 0..self.signature.len() {
            let arity = self.signature.arity(op);
            let cells = (new_size as u128).checked_pow(arity as u32).unwrap_or(u128::MAX);
            if cells > TABLE_CELL_CAP {
                return Err(Error::CapacityExceeded { requested: cells, cap: TABLE_CELL_CAP });
            }
            let mut table = vec![0usize; cells as usize];
            let mut args = vec![0usize; arity];
            let mut coords = vec![vec![0usize; k]; arity];
            for (cell, slot) in table.iter_mut().enumerate() {
                // Decode each power-element argument into base coordinates.
                let mut rest = cell;
                for j in (0..arity).rev() {
                    args[j] = rest % new_size;
                    rest /= new_size;
                }
                for (j, &a) in args.iter().enumerate() {
                    decode_mixed(a, self.size, &mut coords[j]);
                }
                let mut enc = 0usize;
                let mut base_args = vec![0usize; arity];
                for c in 0..k {
                    for (arg, coord) in base_args.iter_mut().zip(&coords) {
                        *arg = coord[c];
                    }
                    enc = enc * self.size + self.apply(op, &base_args);
                }
                *slot = enc;
            }
            tables.push(table);
        }
        FiniteAlgebra::new(new_size, self.signature.clone(), tables)
    }

    /// Checks compatibility of `theta` with every table. On failure reports
    /// the operation and the pointwise-related argument tuples it splits.
    pub fn check_congruence(&self, theta: &Partition) -> Result<()> {
        if theta.size() != self.size {
            return Err(Error::SizeMismatch { left: theta.size(), right: self.size });
        }
        for op in 0..self.signature.len() {
            let arity = self.signature.arity(op);
            if arity == 0 {
                continue;
            }
            // Unary-translation check: replacing one coordinate by a related
            // element must keep images related; this implies the full
            // pointwise condition by transitivity.
            let mut rest = vec![0usize; arity - 1];
            for pos in 0..arity {
                loop {
                    for a in 0..self.size {
                        for b in a + 1..self.size {
                            if !theta.same_block(a, b) {
                                continue;
                            }
                            let mut lhs = Vec::with_capacity(arity);
                            let mut rhs = Vec::with_capacity(arity);
                            lhs.extend_from_slice(&rest[..pos]);
                            lhs.push(a);
                            lhs.extend_from_slice(&rest[pos..]);
                            rhs.extend_from_slice(&rest[..pos]);
                            rhs.push(b);
                            rhs.extend_from_slice(&rest[pos..]);
                            if !theta.same_block(self.apply(op, &lhs), self.apply(op, &rhs)) {
                                return Err(Error::NotACongruence {
                                    op: self.signature.name(op).to_string(),
                                    lhs_args: lhs,
                                    rhs_args: rhs,
                                });
                            }
                        }
                    }
                    if !next_tuple(&mut rest, self.size) {
                        break;
                    }
                }
            }
        }
        Ok(())
    }

    pub fn is_congruence(&self, theta: &Partition) -> bool {
        self.check_congruence(theta).is_ok()
    }

    /// Factors the algebra by a congruence. Classes are indexed in order of
    /// their least member.
    pub fn quotient(&self, theta: &Partition) -> Result<FiniteAlgebra> {
        self.check_congruence(theta)?;
        let blocks = theta.blocks();
        let class_of: Vec<usize> = {
            let mut v = vec![0; self.size];
            for (ci, block) in blocks.iter().enumerate() {
                for &e in block {
                    v[e] = ci;
                }
            }
            v
        };
        let new_size = blocks.len();
        let mut tables = Vec::with_capacity(self.tables.len());
        for op in 0..self.signature.len() {
            let arity = self.signature.arity(op);
            let cells = new_size.pow(arity as u32);
            let mut table = vec![0usize; cells];
            let mut args = vec![0usize; arity];
            for (cell, slot) in table.iter_mut().enumerate() {
                let mut rest = cell;
                for j in (0..arity).rev() {
                    args[j] = blocks[rest % new_size][0];
                    rest /= new_size;
                }
                *slot = class_of[self.apply(op, &args)];
            }
            tables.push(table);
        }
        FiniteAlgebra::new(new_size, self.signature.clone(), tables)
    }

    /// Least subuniverse containing `seed`, in deterministic BFS order.
    pub fn subuniverse(&self, seed: &[usize]) -> Vec<usize> {
        let seeds: Vec<Vec<usize>> = seed.iter().map(|&e| vec![e]).collect();
        let gen = generate_subpower(self, 1, &seeds, usize::MAX).expect("width-1 closure cannot exceed budget");
        gen.elements.into_iter().map(|v| v[0]).collect()
    }
}

/// Decodes a mixed-radix element into `out`, coordinate 0 most significant.
pub fn decode_mixed(mut e: usize, base: usize, out: &mut [usize]) {
    for slot in out.iter_mut().rev() {
        *slot = e % base;
        e /= base;
    }
}

/// Encodes coordinates into a mixed-radix element, coordinate 0 most
/// significant.
pub fn encode_mixed(coords: &[usize], base: usize) -> usize {
    coords.iter().fold(0, |acc, &c| acc * base + c)
}

/// Advances `tuple` lexicographically over `0..base`; false on wraparound.
pub(crate) fn next_tuple(tuple: &mut [usize], base: usize) -> bool {
    for slot in tuple.iter_mut().rev() {
        *slot += 1;
        if *slot < base {
            return true;
        }
        *slot = 0;
    }
    false
}

/// A term over an algebra's signature, possibly with placeholder symbols for
/// the unknowns of an emitted Mal'cev condition. Variables are 0-indexed
/// internally and print as `x1`, `x2`, ...
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum AlgTerm {
    Var(usize),
    App { symbol: String, args: Vec<AlgTerm> },
}

impl AlgTerm {
    pub fn var(i: usize) -> Self {
        AlgTerm::Var(i)
    }

    pub fn app(symbol: impl Into<String>, args: Vec<AlgTerm>) -> Self {
        AlgTerm::App { symbol: symbol.into(), args }
    }

    /// Number of variables: one past the largest index that occurs.
    pub fn var_count(&self) -> usize {
        match self {
            AlgTerm::Var(i) => i + 1,
            AlgTerm::App { args, .. } => args.iter().map(|t| t.var_count()).max().unwrap_or(0),
        }
    }

    /// Substitutes variable `i` by `map[i]` everywhere.
    pub fn rename_vars(&self, map: &[usize]) -> AlgTerm {
        match self {
            AlgTerm::Var(i) => AlgTerm::Var(map[*i]),
            AlgTerm::App { symbol, args } => AlgTerm::App {
                symbol: symbol.clone(),
                args: args.iter().map(|t| t.rename_vars(map)).collect(),
            },
        }
    }

    /// Replaces variable `i` by `subs[i]` (simultaneous substitution).
    pub fn substitute(&self, subs: &[AlgTerm]) -> AlgTerm {
        match self {
            AlgTerm::Var(i) => subs[*i].clone(),
            AlgTerm::App { symbol, args } => AlgTerm::App {
                symbol: symbol.clone(),
                args: args.iter().map(|t| t.substitute(subs)).collect(),
            },
        }
    }

    /// Parses `x3`, `f(x1,g(x2))`, or a bare constant symbol `e`.
    pub fn parse(text: &str) -> Result<AlgTerm> {
        let bytes = text.as_bytes();
        let mut pos = 0;
        let term = parse_alg_term(text, bytes, &mut pos)?;
        skip_ws(bytes, &mut pos);
        if pos != bytes.len() {
            return Err(Error::Parse { pos, msg: "trailing input after term".into() });
        }
        Ok(term)
    }
}

fn skip_ws(bytes: &[u8], pos: &mut usize) {
    while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
        *pos += 1;
    }
}

fn parse_alg_term(text: &str, bytes: &[u8], pos: &mut usize) -> Result<AlgTerm> {
    skip_ws(bytes, pos);
    let start = *pos;
    while *pos < bytes.len() && (bytes[*pos].is_ascii_alphanumeric() || bytes[*pos] == b'_') {
        *pos += 1;
    }
    if *pos == start {
        return Err(Error::Parse { pos: start, msg: "expected a variable or symbol".into() });
    }
    let word = &text[start..*pos];
    // x<digits> is a variable; anything else is an operation symbol.
    if let Some(rest) = word.strip_prefix('x') {
        if !rest.is_empty() && rest.bytes().all(|b| b.is_ascii_digit()) {
            let i: usize = rest.parse().map_err(|_| Error::Parse {
                pos: start,
                msg: "variable index out of range".into(),
            })?;
            if i == 0 {
                return Err(Error::Parse { pos: start, msg: "variables are numbered from x1".into() });
            }
            return Ok(AlgTerm::Var(i - 1));
        }
    }
    skip_ws(bytes, pos);
    let mut args = Vec::new();
    if *pos < bytes.len() && bytes[*pos] == b'(' {
        *pos += 1;
        skip_ws(bytes, pos);
        if *pos < bytes.len() && bytes[*pos] == b')' {
            *pos += 1;
        } else {
            loop {
                args.push(parse_alg_term(text, bytes, pos)?);
                skip_ws(bytes, pos);
                if *pos < bytes.len() && bytes[*pos] == b',' {
                    *pos += 1;
                    continue;
                }
                if *pos < bytes.len() && bytes[*pos] == b')' {
                    *pos += 1;
                    break;
                }
                return Err(Error::Parse { pos: *pos, msg: "expected ',' or ')'".into() });
            }
        }
    }
    Ok(AlgTerm::App { symbol: word.to_string(), args })
}

impl fmt::Display for AlgTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AlgTerm::Var(i) => write!(f, "x{}", i + 1),
            AlgTerm::App { symbol, args } => {
                write!(f, "{}", symbol)?;
                if !args.is_empty() {
                    write!(f, "(")?;
                    for (i, a) in args.iter().enumerate() {
                        if i > 0 {
                            write!(f, ",")?;
                        }
                        write!(f, "{}", a)?;
                    }
                    write!(f, ")")?;
                }
                Ok(())
            }
        }
    }
}

/// How an element of a generated subpower came to exist.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Provenance {
    Seed(usize),
    App { op: usize, args: Vec<usize> },
}

/// A subpower of `A^width` generated from seed vectors, with the generation
/// DAG retained so elements can be read back as terms in the seeds.
pub struct GeneratedSubpower {
    pub elements: Vec<Vec<usize>>,
    pub provenance: Vec<Provenance>,
}

impl GeneratedSubpower {
    /// Reconstructs element `idx` as a term whose variables are the seeds.
    pub fn term_for(&self, alg: &FiniteAlgebra, idx: usize) -> AlgTerm {
        match &self.provenance[idx] {
            Provenance::Seed(i) => AlgTerm::Var(*i),
            Provenance::App { op, args } => AlgTerm::App {
                symbol: alg.signature().name(*op).to_string(),
                args: args.iter().map(|&a| self.term_for(alg, a)).collect(),
            },
        }
    }
}

/// Closes the seed vectors under all operations of `alg`, applied
/// coordinatewise. Deterministic: rounds scan operations in signature order
/// and argument tuples in index-lexicographic order, keeping only tuples that
/// touch at least one element discovered in the previous round.
///
/// Fails with `BudgetExceeded` once more than `max_elements` would be kept.
pub fn generate_subpower(
    alg: &FiniteAlgebra,
    width: usize,
    seeds: &[Vec<usize>],
    max_elements: usize,
) -> Result<GeneratedSubpower> {
    let (gen, complete) = generate_subpower_bounded(alg, width, seeds, max_elements);
    if !complete {
        return Err(Error::BudgetExceeded {
            required: gen.elements.len() as u128 + 1,
            budget: max_elements as u128,
        });
    }
    Ok(gen)
}

/// Like [`generate_subpower`] but keeps what was generated when the budget
/// runs out; the flag reports whether the closure is complete.
pub fn generate_subpower_bounded(
    alg: &FiniteAlgebra,
    width: usize,
    seeds: &[Vec<usize>],
    max_elements: usize,
) -> (GeneratedSubpower, bool) {
    let mut elements: Vec<Vec<usize>> = Vec::new();
    let mut provenance = Vec::new();
    let mut index: HashMap<Vec<usize>, usize> = HashMap::new();
    for (i, s) in seeds.iter().enumerate() {
        debug_assert_eq!(s.len(), width);
        if !index.contains_key(s) {
            index.insert(s.clone(), elements.len());
            elements.push(s.clone());
            provenance.push(Provenance::Seed(i));
        }
    }
    // Constants belong to every closed set; insert them up front.
    for op in 0..alg.signature().len() {
        if alg.signature().arity(op) == 0 {
            let val = vec![alg.apply(op, &[]); width];
            if !index.contains_key(&val) {
                index.insert(val.clone(), elements.len());
                elements.push(val);
                provenance.push(Provenance::App { op, args: Vec::new() });
            }
        }
    }
    if elements.len() > max_elements {
        return (GeneratedSubpower { elements, provenance }, false);
    }
    // Each round combines tuples whose largest index was discovered in the
    // previous round, so every tuple is visited exactly once.
    let mut new_from = 0;
    while new_from < elements.len() {
        let round_start = elements.len();
        for op in 0..alg.signature().len() {
            let arity = alg.signature().arity(op);
            if arity == 0 {
                continue;
            }
            let mut args = vec![0usize; arity];
            let mut base = vec![0usize; arity];
            let mut val = vec![0usize; width];
            loop {
                if args.iter().any(|&a| a >= new_from) {
                    for (c, slot) in val.iter_mut().enumerate() {
                        for (j, &a) in args.iter().enumerate() {
                            base[j] = elements[a][c];
                        }
                        *slot = alg.apply(op, &base);
                    }
                    if !index.contains_key(&val) {
                        if elements.len() >= max_elements {
                            return (GeneratedSubpower { elements, provenance }, false);
                        }
                        index.insert(val.clone(), elements.len());
                        elements.push(val.clone());
                        provenance.push(Provenance::App { op, args: args.clone() });
                    }
                }
                if !advance_bounded(&mut args, round_start) {
                    break;
                }
            }
        }
        new_from = round_start;
    }
    (GeneratedSubpower { elements, provenance }, true)
}

pub(crate) fn advance_bounded(tuple: &mut [usize], bound: usize) -> bool {
    if bound == 0 {
        return false;
    }
    for slot in tuple.iter_mut().rev() {
        *slot += 1;
        if *slot < bound {
            return true;
        }
        *slot = 0;
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testfix::z4;

    #[test]
    fn set_algebra_examples() {
        let a8 = FiniteAlgebra::set_algebra(8).unwrap();
        assert_eq!(a8.size(), 8);
        assert_eq!(a8.signature().len(), 0);
        assert!(FiniteAlgebra::set_algebra(1).is_ok());
        assert_eq!(FiniteAlgebra::set_algebra(0), Err(Error::InvalidSize));
    }

    #[test]
    fn product_sizes() {
        let s2 = FiniteAlgebra::set_algebra(2).unwrap();
        assert_eq!(s2.product(2).unwrap().size(), 4);
        let s8 = FiniteAlgebra::set_algebra(8).unwrap();
        assert_eq!(s8.product(4).unwrap().size(), 4096);
        let z = z4();
        let z2 = z.product(2).unwrap();
        assert_eq!(z2.size(), 16);
        // Coordinatewise: (1,2) + (3,3) = (0,1); encoding is mixed-radix with
        // coordinate 0 most significant.
        let a = encode_mixed(&[1, 2], 4);
        let b = encode_mixed(&[3, 3], 4);
        let plus = z2.signature().index_of("plus").unwrap();
        assert_eq!(z2.apply(plus, &[a, b]), encode_mixed(&[0, 1], 4));
    }

    #[test]
    fn product_cap() {
        let s = FiniteAlgebra::set_algebra(64).unwrap();
        match s.product_capped(4, 1 << 20) {
            Err(Error::CapacityExceeded { requested, cap }) => {
                assert_eq!(requested, 1 << 24);
                assert_eq!(cap, 1 << 20);
            }
            other => panic!("expected capacity error, got {:?}", other.map(|a| a.size())),
        }
    }

    #[test]
    fn quotient_z4_mod_two() {
        let z = z4();
        let theta = Partition::parse(4, "{{0,2},{1,3}}").unwrap();
        let q = z.quotient(&theta).unwrap();
        assert_eq!(q.size(), 2);
        // The quotient table is Z2 addition.
        let plus = q.signature().index_of("plus").unwrap();
        assert_eq!(q.table(plus), &[0, 1, 1, 0]);
        let neg = q.signature().index_of("neg").unwrap();
        assert_eq!(q.table(neg), &[0, 1]);
    }

    #[test]
    fn quotient_trivial_partitions() {
        let z = z4();
        let same = z.quotient(&Partition::identity(4)).unwrap();
        assert_eq!(same.size(), 4);
        assert_eq!(same.tables, z.tables);
        let one = z.quotient(&Partition::full(4)).unwrap();
        assert_eq!(one.size(), 1);
    }

    #[test]
    fn quotient_rejects_non_congruence() {
        let z = z4();
        let bad = Partition::parse(4, "{{0,1},{2},{3}}").unwrap();
        match z.quotient(&bad) {
            Err(Error::NotACongruence { op, lhs_args, rhs_args }) => {
                // The reported tuples really are pointwise related with
                // unrelated images.
                let idx = z.signature().index_of(&op).unwrap();
                assert!(lhs_args
                    .iter()
                    .zip(&rhs_args)
                    .all(|(&a, &b)| bad.same_block(a, b)));
                assert!(!bad.same_block(z.apply(idx, &lhs_args), z.apply(idx, &rhs_args)));
            }
            other => panic!("expected NotACongruence, got {:?}", other.map(|a| a.size())),
        }
    }

    #[test]
    fn eval_examples() {
        let z = z4();
        let sum = AlgTerm::app("plus", vec![AlgTerm::var(0), AlgTerm::var(1)]);
        assert_eq!(z.eval(&sum, &[1, 2]).unwrap(), 3);
        assert_eq!(z.eval(&AlgTerm::var(0), &[2, 9]).unwrap(), 2);
        // x1 - x2 + x3 at (0,1,1) is 0
        let t = AlgTerm::app(
            "plus",
            vec![
                AlgTerm::app("plus", vec![AlgTerm::var(0), AlgTerm::app("neg", vec![AlgTerm::var(1)])]),
                AlgTerm::var(2),
            ],
        );
        assert_eq!(z.eval(&t, &[0, 1, 1]).unwrap(), 0);
        let bad = AlgTerm::app("mystery", vec![]);
        assert_eq!(z.eval(&bad, &[]), Err(Error::UnboundSymbol("mystery".into())));
    }

    #[test]
    fn eval_ignores_unused_positions() {
        let z = z4();
        // x1 + x3 reads nothing from position 2.
        let t = AlgTerm::app("plus", vec![AlgTerm::var(0), AlgTerm::var(2)]);
        for junk in 0..4 {
            assert_eq!(z.eval(&t, &[1, junk, 2]).unwrap(), 3);
        }
        assert_eq!(z.eval(&AlgTerm::var(0), &[2, 9 % 4]).unwrap(), 2);
    }

    #[test]
    fn alg_term_parse_display() {
        let t = AlgTerm::parse("plus(x1, neg(x2))").unwrap();
        assert_eq!(t.to_string(), "plus(x1,neg(x2))");
        assert_eq!(AlgTerm::parse("x12").unwrap(), AlgTerm::Var(11));
        assert_eq!(AlgTerm::parse("zero").unwrap(), AlgTerm::app("zero", vec![]));
        assert!(AlgTerm::parse("x0").is_err());
        assert!(AlgTerm::parse("f(x1,)").is_err());
        assert!(AlgTerm::parse("f(x1) junk").is_err());
    }

    #[test]
    fn subuniverse_examples() {
        let z = z4();
        assert_eq!(z.subuniverse(&[2]), vec![2, 0]);
        assert_eq!(z.subuniverse(&[1]).len(), 4);
        let s = FiniteAlgebra::set_algebra(5).unwrap();
        assert_eq!(s.subuniverse(&[3, 1]), vec![3, 1]);
    }

    #[test]
    fn subuniverse_idempotent_monotone() {
        let z = z4();
        let a = z.subuniverse(&[2]);
        let again = z.subuniverse(&a);
        assert_eq!(a.iter().collect::<std::collections::BTreeSet<_>>(),
                   again.iter().collect::<std::collections::BTreeSet<_>>());
        let bigger = z.subuniverse(&[2, 1]);
        assert!(a.iter().all(|e| bigger.contains(e)));
    }

    #[test]
    fn generated_terms_replay() {
        let z = z4();
        let seeds = vec![vec![1], vec![2]];
        let gen = generate_subpower(&z, 1, &seeds, 1000).unwrap();
        for (i, el) in gen.elements.iter().enumerate() {
            let term = gen.term_for(&z, i);
            assert_eq!(z.eval(&term, &[1, 2]).unwrap(), el[0]);
        }
    }

    #[test]
    fn product_roundtrip_is_identity() {
        let z = z4();
        let p1 = z.product(1).unwrap();
        let q = p1.quotient(&Partition::identity(4)).unwrap();
        assert_eq!(q, z);
    }
}
