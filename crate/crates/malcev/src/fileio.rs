//! The algebra file format.
//!
//! ```text
//! # a comment runs to end of line
//! size 4
//! alias zero=0 one=1
//! op plus 2
//! 0 1 2 3
//! 1 2 3 0
//! 2 3 0 1
//! 3 0 1 2
//! op neg 1
//! 0 3 2 1
//! op zero 0
//! 0
//! ```
//!
//! Tables list all `N^ARITY` values in row-major order over argument tuples
//! (first argument most significant); that is the only accepted order.
//! The printer emits a canonical layout — one row of `N` values per line for
//! arity ≥ 2, a single line otherwise — and parsing then printing a
//! canonical file reproduces it byte for byte.

use std::fmt::Write as _;

use crate::algebra::{FiniteAlgebra, Signature};
use crate::error::{Error, Result};

/// A parsed algebra file: the algebra plus optional element aliases, which
/// are presentation-layer names only and never enter the math kernel.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlgebraFile {
    pub algebra: FiniteAlgebra,
    pub aliases: Vec<(String, usize)>,
}

impl AlgebraFile {
    pub fn alias_of(&self, element: usize) -> Option<&str> {
        self.aliases.iter().find(|(_, e)| *e == element).map(|(n, _)| n.as_str())
    }

    pub fn element_named(&self, name: &str) -> Option<usize> {
        self.aliases.iter().find(|(n, _)| n == name).map(|(_, e)| *e)
    }
}

struct Lines<'a> {
    tokens: Vec<(usize, &'a str)>,
    pos: usize,
}

fn tokenize(text: &str) -> Lines<'_> {
    let mut tokens = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let body = match line.find('#') {
            Some(i) => &line[..i],
            None => line,
        };
        for word in body.split_whitespace() {
            tokens.push((lineno + 1, word));
        }
    }
    Lines { tokens, pos: 0 }
}

impl<'a> Lines<'a> {
    fn peek(&self) -> Option<(usize, &'a str)> {
        self.tokens.get(self.pos).copied()
    }

    fn next(&mut self) -> Option<(usize, &'a str)> {
        let t = self.peek();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn last_line(&self) -> usize {
        self.tokens.last().map(|(l, _)| *l).unwrap_or(1)
    }
}

fn file_err(line: usize, msg: impl Into<String>) -> Error {
    Error::File { line, msg: msg.into() }
}

/// Parses the algebra file format described in the module docs.
pub fn parse_algebra_file(text: &str) -> Result<AlgebraFile> {
    let mut toks = tokenize(text);
    let (line, word) = toks.next().ok_or_else(|| file_err(1, "empty file; expected `size N`"))?;
    if word != "size" {
        return Err(file_err(line, format!("expected `size`, found `{}`", word)));
    }
    let (line, word) = toks.next().ok_or_else(|| file_err(line, "expected a number after `size`"))?;
    let size: usize = word
        .parse()
        .map_err(|_| file_err(line, format!("invalid size `{}`", word)))?;
    if size == 0 {
        return Err(file_err(line, "size must be at least 1"));
    }

    let mut aliases: Vec<(String, usize)> = Vec::new();
    let mut symbols: Vec<(String, usize)> = Vec::new();
    let mut tables: Vec<Vec<usize>> = Vec::new();
    while let Some((line, word)) = toks.next() {
        match word {
            "alias" => {
                // `alias name=index ...` — eat name=index words on any line.
                let mut any = false;
                while let Some((l, w)) = toks.peek() {
                    if w == "op" || w == "alias" || w == "size" {
                        break;
                    }
                    toks.next();
                    let (name, idx) = w
                        .split_once('=')
                        .ok_or_else(|| file_err(l, format!("expected name=index, found `{}`", w)))?;
                    let idx: usize = idx
                        .parse()
                        .map_err(|_| file_err(l, format!("invalid element index `{}`", idx)))?;
                    if idx >= size {
                        return Err(file_err(l, format!("alias {} points past the universe", name)));
                    }
                    if aliases.iter().any(|(n, _)| n == name) {
                        return Err(file_err(l, format!("duplicate alias {}", name)));
                    }
                    aliases.push((name.to_string(), idx));
                    any = true;
                }
                if !any {
                    return Err(file_err(line, "alias line without entries"));
                }
            }
            "op" => {
                let (l, name) = toks
                    .next()
                    .ok_or_else(|| file_err(line, "expected an operation name after `op`"))?;
                let (l2, arity_word) = toks
                    .next()
                    .ok_or_else(|| file_err(l, format!("expected an arity after `op {}`", name)))?;
                let arity: usize = arity_word
                    .parse()
                    .map_err(|_| file_err(l2, format!("invalid arity `{}`", arity_word)))?;
                let expect = (size as u128)
                    .checked_pow(arity as u32)
                    .filter(|&c| c <= usize::MAX as u128)
                    .ok_or_else(|| file_err(l2, "table would be astronomically large"))?
                    as usize;
                let mut table = Vec::with_capacity(expect);
                for _ in 0..expect {
                    let (l3, value) = toks.next().ok_or_else(|| {
                        file_err(
                            toks.last_line(),
                            format!("table for {} needs {} values, found {}", name, expect, table.len()),
                        )
                    })?;
                    let v: usize = value
                        .parse()
                        .map_err(|_| file_err(l3, format!("invalid table value `{}`", value)))?;
                    if v >= size {
                        return Err(file_err(l3, format!("table value {} outside 0..{}", v, size)));
                    }
                    table.push(v);
                }
                if symbols.iter().any(|(n, _)| n == name) {
                    return Err(file_err(l, format!("duplicate operation {}", name)));
                }
                symbols.push((name.to_string(), arity));
                tables.push(table);
            }
            other => {
                return Err(file_err(line, format!("expected `op` or `alias`, found `{}`", other)));
            }
        }
    }
    let signature = Signature::new(symbols)?;
    let algebra = FiniteAlgebra::new(size, signature, tables)
        .map_err(|e| file_err(toks.last_line(), e.to_string()))?;
    Ok(AlgebraFile { algebra, aliases })
}

/// The canonical printer; `parse(print(f)) == f`, and printing a file that
/// was already canonical reproduces it byte for byte.
pub fn print_algebra_file(file: &AlgebraFile) -> String {
    let mut out = String::new();
    let n = file.algebra.size();
    let _ = writeln!(out, "size {}", n);
    if !file.aliases.is_empty() {
        let entries: Vec<String> =
            file.aliases.iter().map(|(name, idx)| format!("{}={}", name, idx)).collect();
        let _ = writeln!(out, "alias {}", entries.join(" "));
    }
    for (idx, (name, arity)) in file.algebra.signature().symbols().iter().enumerate() {
        let _ = writeln!(out, "op {} {}", name, arity);
        let table = file.algebra.table(idx);
        let row = if *arity >= 1 { n } else { 1 };
        for chunk in table.chunks(row) {
            let words: Vec<String> = chunk.iter().map(|v| v.to_string()).collect();
            let _ = writeln!(out, "{}", words.join(" "));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testfix::z4;

    #[test]
    fn parse_two_element_semilattice() {
        let f = parse_algebra_file("size 2\nop meet 2\n0 0 0 1\n").unwrap();
        assert_eq!(f.algebra.size(), 2);
        assert_eq!(f.algebra.signature().len(), 1);
        assert_eq!(f.algebra.table(0), &[0, 0, 0, 1]);
    }

    #[test]
    fn parse_z4_matches_fixture() {
        let text = "size 4\n\
                    op plus 2\n0 1 2 3 1 2 3 0 2 3 0 1 3 0 1 2\n\
                    op neg 1\n0 3 2 1\n\
                    op zero 0\n0\n";
        let f = parse_algebra_file(text).unwrap();
        assert_eq!(f.algebra, z4());
    }

    #[test]
    fn parse_bare_carrier() {
        let f = parse_algebra_file("size 8\n").unwrap();
        assert_eq!(f.algebra.size(), 8);
        assert!(f.algebra.signature().is_empty());
    }

    #[test]
    fn aliases_resolve_both_ways() {
        let f = parse_algebra_file("size 8\nalias a=0 b=1 c1=2\n").unwrap();
        assert_eq!(f.element_named("b"), Some(1));
        assert_eq!(f.alias_of(2), Some("c1"));
        assert_eq!(f.element_named("zz"), None);
    }

    #[test]
    fn comments_and_whitespace_ignored() {
        let f = parse_algebra_file("# group\nsize 2 # two elements\nop f 1 # flip\n1 0\n").unwrap();
        assert_eq!(f.algebra.table(0), &[1, 0]);
    }

    #[test]
    fn errors_carry_line_numbers() {
        match parse_algebra_file("size 2\nop f 1\n1 7\n") {
            Err(Error::File { line: 3, msg }) => assert!(msg.contains("outside")),
            other => panic!("expected line-3 error, got {:?}", other),
        }
        match parse_algebra_file("size 2\nop f 2\n0 1\n") {
            Err(Error::File { msg, .. }) => assert!(msg.contains("needs 4 values")),
            other => panic!("expected count error, got {:?}", other),
        }
        assert!(matches!(parse_algebra_file(""), Err(Error::File { line: 1, .. })));
        assert!(matches!(parse_algebra_file("size 0\n"), Err(Error::File { .. })));
        assert!(matches!(parse_algebra_file("size 2\nbogus\n"), Err(Error::File { line: 2, .. })));
        assert!(matches!(
            parse_algebra_file("size 2\nalias a=5\n"),
            Err(Error::File { line: 2, .. })
        ));
    }

    #[test]
    fn canonical_roundtrip() {
        let texts = [
            "size 2\nop meet 2\n0 0\n0 1\n",
            "size 4\nalias zero=0\nop plus 2\n0 1 2 3\n1 2 3 0\n2 3 0 1\n3 0 1 2\nop neg 1\n0 3 2 1\nop zero 0\n0\n",
            "size 8\nalias a=0 b=1 c1=2 c2=3 c3=4 c4=5 c5=6 c6=7\n",
        ];
        for text in texts {
            let f = parse_algebra_file(text).unwrap();
            assert_eq!(print_algebra_file(&f), text);
            // And printing is a fixed point through a second parse.
            let again = parse_algebra_file(&print_algebra_file(&f)).unwrap();
            assert_eq!(again, f);
        }
    }
}
