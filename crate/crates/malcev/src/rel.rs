//! Binary relations and partitions of a finite universe `0..n-1`.
//!
//! [`Partition`] is kept canonical: every element maps to the least member of
//! its block, so two partitions are equal as values exactly when they are
//! equal as equivalence relations. [`BinRel`] is a plain square bit table.

use std::fmt;

use crate::error::{Error, Result};

/// A binary relation on `{0, .., n-1}`, stored as a bit table with one row
/// of `ceil(n/64)` words per element.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct BinRel {
    n: usize,
    words_per_row: usize,
    bits: Vec<u64>,
}

impl BinRel {
    pub fn empty(n: usize) -> Self {
        let words_per_row = n.div_ceil(64);
        BinRel {
            n,
            words_per_row,
            bits: vec![0; n * words_per_row],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut r = Self::empty(n);
        for a in 0..n {
            r.insert(a, a);
        }
        r
    }

    pub fn full(n: usize) -> Self {
        let mut r = Self::empty(n);
        for a in 0..n {
            for b in 0..n {
                r.insert(a, b);
            }
        }
        r
    }

    pub fn from_pairs(n: usize, pairs: &[(usize, usize)]) -> Self {
        let mut r = Self::empty(n);
        for &(a, b) in pairs {
            r.insert(a, b);
        }
        r
    }

    pub fn size(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn contains(&self, a: usize, b: usize) -> bool {
        self.bits[a * self.words_per_row + b / 64] >> (b % 64) & 1 == 1
    }

    #[inline]
    pub fn insert(&mut self, a: usize, b: usize) {
        self.bits[a * self.words_per_row + b / 64] |= 1 << (b % 64);
    }

    fn row(&self, a: usize) -> &[u64] {
        &self.bits[a * self.words_per_row..(a + 1) * self.words_per_row]
    }

    /// Pairs in lexicographic order.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |a| (0..self.n).filter_map(move |b| self.contains(a, b).then_some((a, b))))
    }

    pub fn pair_count(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_subset(&self, other: &BinRel) -> bool {
        self.n == other.n && self.bits.iter().zip(&other.bits).all(|(a, b)| a & !b == 0)
    }

    /// Least pair of `self \ other`, if any.
    pub fn first_missing_in(&self, other: &BinRel) -> Option<(usize, usize)> {
        self.pairs().find(|&(a, b)| !other.contains(a, b))
    }

    pub fn union(&self, other: &BinRel) -> Result<BinRel> {
        self.check_size(other)?;
        let mut r = self.clone();
        for (w, o) in r.bits.iter_mut().zip(&other.bits) {
            *w |= o;
        }
        Ok(r)
    }

    /// Intersection; the meet of the relation lattice.
    pub fn meet(&self, other: &BinRel) -> Result<BinRel> {
        self.check_size(other)?;
        let mut r = self.clone();
        for (w, o) in r.bits.iter_mut().zip(&other.bits) {
            *w &= o;
        }
        Ok(r)
    }

    /// Relational product: `{(a,c) | ∃b. (a,b) ∈ self and (b,c) ∈ other}`.
    pub fn compose(&self, other: &BinRel) -> Result<BinRel> {
        self.check_size(other)?;
        let mut r = BinRel::empty(self.n);
        for a in 0..self.n {
            let out = a * r.words_per_row;
            for b in 0..self.n {
                if self.contains(a, b) {
                    for (i, w) in other.row(b).iter().enumerate() {
                        r.bits[out + i] |= w;
                    }
                }
            }
        }
        Ok(r)
    }

    pub fn is_reflexive(&self) -> bool {
        (0..self.n).all(|a| self.contains(a, a))
    }

    pub fn is_symmetric(&self) -> bool {
        self.pairs().all(|(a, b)| self.contains(b, a))
    }

    pub fn is_equivalence(&self) -> bool {
        if !self.is_reflexive() || !self.is_symmetric() {
            return false;
        }
        // Transitivity: the row of b must be contained in the row of a
        // whenever (a,b) is present.
        for (a, b) in self.pairs() {
            if self.row(b).iter().zip(self.row(a)).any(|(rb, ra)| rb & !ra != 0) {
                return false;
            }
        }
        true
    }

    /// Reads this relation back as a partition, if it is an equivalence.
    pub fn as_partition(&self) -> Option<Partition> {
        if !self.is_equivalence() {
            return None;
        }
        let rep = (0..self.n)
            .map(|a| (0..self.n).find(|&b| self.contains(a, b)).unwrap())
            .collect();
        Some(Partition { rep })
    }

    fn check_size(&self, other: &BinRel) -> Result<()> {
        if self.n != other.n {
            return Err(Error::SizeMismatch { left: self.n, right: other.n });
        }
        Ok(())
    }
}

/// Union-find with path compression, used for equivalence closures,
/// congruence generation and variable transversals.
pub(crate) struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Merges the classes of `a` and `b`; returns false if already merged.
    /// The smaller root wins so representatives stay least members.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let ra = self.find(a);
        let rb = self.find(b);
        if ra == rb {
            return false;
        }
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[hi] = lo;
        true
    }

    pub fn into_partition(mut self) -> Partition {
        let n = self.parent.len();
        let rep = (0..n).map(|a| self.find(a)).collect();
        Partition { rep }
    }
}

/// A partition of `{0, .., n-1}`; `rep[e]` is the least member of `e`'s block.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Partition {
    rep: Vec<usize>,
}

impl Partition {
    pub fn identity(n: usize) -> Self {
        Partition { rep: (0..n).collect() }
    }

    pub fn full(n: usize) -> Self {
        Partition { rep: vec![0; n] }
    }

    /// Least equivalence relation containing the given pairs.
    pub fn from_pairs(n: usize, pairs: &[(usize, usize)]) -> Self {
        let mut uf = UnionFind::new(n);
        for &(a, b) in pairs {
            uf.union(a, b);
        }
        uf.into_partition()
    }

    pub fn from_blocks(n: usize, blocks: &[Vec<usize>]) -> Result<Self> {
        let mut seen = vec![false; n];
        let mut uf = UnionFind::new(n);
        for block in blocks {
            for &e in block {
                if e >= n {
                    return Err(Error::Parse {
                        pos: 0,
                        msg: format!("element {} out of range for size {}", e, n),
                    });
                }
                if seen[e] {
                    return Err(Error::Parse {
                        pos: 0,
                        msg: format!("element {} listed in two blocks", e),
                    });
                }
                seen[e] = true;
                uf.union(block[0], e);
            }
        }
        Ok(uf.into_partition())
    }

    pub fn size(&self) -> usize {
        self.rep.len()
    }

    #[inline]
    pub fn rep(&self, e: usize) -> usize {
        self.rep[e]
    }

    #[inline]
    pub fn same_block(&self, a: usize, b: usize) -> bool {
        self.rep[a] == self.rep[b]
    }

    pub fn block_count(&self) -> usize {
        self.rep.iter().enumerate().filter(|&(e, &r)| e == r).count()
    }

    pub fn is_identity(&self) -> bool {
        self.rep.iter().enumerate().all(|(e, &r)| e == r)
    }

    /// Blocks ordered by least member, elements ascending.
    pub fn blocks(&self) -> Vec<Vec<usize>> {
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        let mut index_of_rep = vec![usize::MAX; self.rep.len()];
        for (e, &r) in self.rep.iter().enumerate() {
            if e == r {
                index_of_rep[r] = blocks.len();
                blocks.push(vec![e]);
            } else {
                blocks[index_of_rep[r]].push(e);
            }
        }
        blocks
    }

    /// All pairs of the relation, lexicographically.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (a, ra) in self.rep.iter().enumerate() {
            for (b, rb) in self.rep.iter().enumerate() {
                if ra == rb {
                    out.push((a, b));
                }
            }
        }
        out
    }

    /// `self ≤ other` in the partition lattice (every block refines a block).
    pub fn leq(&self, other: &Partition) -> bool {
        self.rep
            .iter()
            .enumerate()
            .all(|(e, &r)| other.rep[e] == other.rep[r])
    }

    pub fn join(&self, other: &Partition) -> Partition {
        let n = self.rep.len();
        let mut uf = UnionFind::new(n);
        for e in 0..n {
            uf.union(e, self.rep[e]);
            uf.union(e, other.rep[e]);
        }
        uf.into_partition()
    }

    pub fn meet(&self, other: &Partition) -> Partition {
        let n = self.rep.len();
        // Blocks of the meet are the nonempty intersections; keyed by the
        // pair of representatives, with the least element seen becoming rep.
        let mut first: std::collections::HashMap<(usize, usize), usize> = std::collections::HashMap::new();
        let mut rep = vec![0; n];
        for (e, slot) in rep.iter_mut().enumerate() {
            let key = (self.rep[e], other.rep[e]);
            *slot = *first.entry(key).or_insert(e);
        }
        Partition { rep }
    }

    pub fn to_binrel(&self) -> BinRel {
        let n = self.rep.len();
        let mut r = BinRel::empty(n);
        for a in 0..n {
            for b in 0..n {
                if self.rep[a] == self.rep[b] {
                    r.insert(a, b);
                }
            }
        }
        r
    }

    /// Parses block notation such as `{{0,2},{1,3}}`. Singleton blocks may be
    /// omitted; unlisted elements become singletons.
    pub fn parse(n: usize, text: &str) -> Result<Self> {
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        let bytes = text.as_bytes();
        let mut i = 0;
        let skip_ws = |i: &mut usize| {
            while *i < bytes.len() && bytes[*i].is_ascii_whitespace() {
                *i += 1;
            }
        };
        let err = |pos: usize, msg: &str| Error::Parse { pos, msg: msg.to_string() };
        skip_ws(&mut i);
        if i >= bytes.len() || bytes[i] != b'{' {
            return Err(err(i, "expected '{'"));
        }
        i += 1;
        loop {
            skip_ws(&mut i);
            if i < bytes.len() && bytes[i] == b'}' {
                i += 1;
                break;
            }
            if i >= bytes.len() || bytes[i] != b'{' {
                return Err(err(i, "expected '{' opening a block"));
            }
            i += 1;
            let mut block = Vec::new();
            loop {
                skip_ws(&mut i);
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                if i == start {
                    return Err(err(i, "expected an element index"));
                }
                let e: usize = text[start..i]
                    .parse()
                    .map_err(|_| err(start, "element index out of range"))?;
                block.push(e);
                skip_ws(&mut i);
                if i < bytes.len() && bytes[i] == b',' {
                    i += 1;
                    continue;
                }
                if i < bytes.len() && bytes[i] == b'}' {
                    i += 1;
                    break;
                }
                return Err(err(i, "expected ',' or '}' in block"));
            }
            blocks.push(block);
            skip_ws(&mut i);
            if i < bytes.len() && bytes[i] == b',' {
                i += 1;
                continue;
            }
        }
        skip_ws(&mut i);
        if i != bytes.len() {
            return Err(err(i, "trailing input after partition"));
        }
        Self::from_blocks(n, &blocks)
    }
}

impl fmt::Display for Partition {
    /// Block notation with every block printed, singletons included.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, block) in self.blocks().iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{{")?;
            for (j, e) in block.iter().enumerate() {
                if j > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{}", e)?;
            }
            write!(f, "}}")?;
        }
        write!(f, "}}")
    }
}

/// Least equivalence containing `r`.
pub fn eqv_closure(r: &BinRel) -> Partition {
    let mut uf = UnionFind::new(r.size());
    for (a, b) in r.pairs() {
        uf.union(a, b);
    }
    uf.into_partition()
}

/// Relational product of two relations of equal size.
pub fn compose(r: &BinRel, s: &BinRel) -> Result<BinRel> {
    r.compose(s)
}

/// Intersection of two relations of equal size.
pub fn meet(r: &BinRel, s: &BinRel) -> Result<BinRel> {
    r.meet(s)
}

/// Join of two equivalence relations: the equivalence closure of their union.
pub fn join(r: &BinRel, s: &BinRel) -> Result<Partition> {
    let (Some(p), Some(q)) = (r.as_partition(), s.as_partition()) else {
        if r.size() != s.size() {
            return Err(Error::SizeMismatch { left: r.size(), right: s.size() });
        }
        return Err(Error::JoinRequiresEquivalences);
    };
    if p.size() != q.size() {
        return Err(Error::SizeMismatch { left: p.size(), right: q.size() });
    }
    Ok(p.join(&q))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn part(n: usize, s: &str) -> Partition {
        Partition::parse(n, s).unwrap()
    }

    #[test]
    fn eqv_closure_examples() {
        // {(0,1)} on 3 elements → {{0,1},{2}}
        let r = BinRel::from_pairs(3, &[(0, 1)]);
        assert_eq!(eqv_closure(&r), part(3, "{{0,1},{2}}"));
        // empty relation → identity
        assert_eq!(eqv_closure(&BinRel::empty(4)), Partition::identity(4));
        // {(0,1),(1,2)} → full by transitivity
        let r = BinRel::from_pairs(3, &[(0, 1), (1, 2)]);
        assert_eq!(eqv_closure(&r), Partition::full(3));
    }

    #[test]
    fn compose_examples() {
        let alpha = part(3, "{{0,2},{1}}").to_binrel();
        let beta = part(3, "{{0,1},{2}}").to_binrel();
        let c = compose(&alpha, &beta).unwrap();
        // Direct enumeration of witnesses: every pair except (1,2).
        let expected: Vec<(usize, usize)> =
            (0..3).flat_map(|a| (0..3).map(move |b| (a, b))).filter(|&p| p != (1, 2)).collect();
        assert_eq!(c.pairs().collect::<Vec<_>>(), expected);

        // (R, identity) → R
        let r = BinRel::from_pairs(3, &[(0, 2), (1, 0)]);
        assert_eq!(compose(&r, &BinRel::identity(3)).unwrap(), r);
        // (empty, S) → empty
        assert_eq!(compose(&BinRel::empty(3), &beta).unwrap(), BinRel::empty(3));
    }

    #[test]
    fn compose_size_mismatch() {
        let r = BinRel::empty(3);
        let s = BinRel::empty(4);
        assert_eq!(compose(&r, &s), Err(Error::SizeMismatch { left: 3, right: 4 }));
    }

    #[test]
    fn meet_join_examples() {
        let alpha = part(3, "{{0,2},{1}}");
        let beta = part(3, "{{0,1},{2}}");
        // meet is the identity
        assert_eq!(alpha.meet(&beta), Partition::identity(3));
        // join chains 0~2 and 0~1 into the full partition
        assert_eq!(alpha.join(&beta), Partition::full(3));
        // meet(R,R) = R on raw relations
        let r = BinRel::from_pairs(3, &[(0, 1), (2, 2)]);
        assert_eq!(meet(&r, &r).unwrap(), r);
    }

    #[test]
    fn join_rejects_non_equivalences() {
        let r = BinRel::from_pairs(3, &[(0, 1)]);
        let s = BinRel::identity(3);
        assert_eq!(join(&r, &s), Err(Error::JoinRequiresEquivalences));
    }

    #[test]
    fn partition_canonical_reps() {
        let p = Partition::from_pairs(5, &[(4, 2), (2, 0)]);
        assert_eq!(p.rep(4), 0);
        assert_eq!(p.rep(2), 0);
        assert_eq!(p.blocks(), vec![vec![0, 2, 4], vec![1], vec![3]]);
        assert_eq!(p.block_count(), 3);
    }

    #[test]
    fn partition_display_roundtrip() {
        let p = part(4, "{{0,2},{1,3}}");
        assert_eq!(p.to_string(), "{{0,2},{1,3}}");
        // Singletons may be omitted on input, never on output.
        let q = part(4, "{{1,3}}");
        assert_eq!(q.to_string(), "{{0},{1,3},{2}}");
        assert_eq!(Partition::parse(4, &q.to_string()).unwrap(), q);
    }

    #[test]
    fn partition_parse_errors() {
        assert!(Partition::parse(3, "{{0,1},{1}}").is_err());
        assert!(Partition::parse(3, "{{0,5}}").is_err());
        assert!(Partition::parse(3, "{0,1}").is_err());
        assert!(Partition::parse(3, "{{0,1}} xyz").is_err());
    }

    #[test]
    fn leq_and_lattice_order() {
        let id = Partition::identity(4);
        let mid = part(4, "{{0,2},{1,3}}");
        let full = Partition::full(4);
        assert!(id.leq(&mid) && mid.leq(&full) && id.leq(&full));
        assert!(!mid.leq(&id) && !full.leq(&mid));
        assert!(mid.leq(&mid));
    }

    #[test]
    fn binrel_equivalence_checks() {
        assert!(BinRel::identity(3).is_equivalence());
        assert!(BinRel::full(3).is_equivalence());
        assert!(!BinRel::from_pairs(3, &[(0, 1)]).is_equivalence());
        let p = part(3, "{{0,2},{1}}");
        assert_eq!(p.to_binrel().as_partition(), Some(p));
    }
}
