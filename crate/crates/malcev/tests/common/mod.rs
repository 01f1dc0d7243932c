//! Shared fixtures for the integration suites. Group tables are built from
//! permutation composition so they double as independent oracles for the
//! committed `.alg` corpus.

#![allow(dead_code)]

use rand::prelude::*;
use rand::rngs::StdRng;

use malcev::algebra::{FiniteAlgebra, Signature};
use malcev::rel::Partition;
use malcev::termlang::RelTerm;

pub fn data(name: &str) -> String {
    let path = format!("{}/tests/data/{}", env!("CARGO_MANIFEST_DIR"), name);
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {}", path, e))
}

pub fn z4() -> FiniteAlgebra {
    let sig = Signature::new(vec![
        ("plus".into(), 2),
        ("neg".into(), 1),
        ("zero".into(), 0),
    ])
    .unwrap();
    let plus: Vec<usize> = (0..16).map(|i| (i / 4 + i % 4) % 4).collect();
    let neg: Vec<usize> = (0..4).map(|a| (4 - a) % 4).collect();
    FiniteAlgebra::new(4, sig, vec![plus, neg, vec![0]]).unwrap()
}

/// S3 from permutation composition, with the A3-coset congruence.
pub fn s3() -> (FiniteAlgebra, Partition) {
    let perms: [[usize; 3]; 6] = [
        [0, 1, 2],
        [0, 2, 1],
        [1, 0, 2],
        [1, 2, 0],
        [2, 0, 1],
        [2, 1, 0],
    ];
    let index_of = |p: [usize; 3]| perms.iter().position(|&q| q == p).unwrap();
    let mut mul = Vec::with_capacity(36);
    for a in perms {
        for b in perms {
            mul.push(index_of([a[b[0]], a[b[1]], a[b[2]]]));
        }
    }
    let mut inv = Vec::with_capacity(6);
    for a in perms {
        let mut ia = [0; 3];
        for (x, &ax) in a.iter().enumerate() {
            ia[ax] = x;
        }
        inv.push(index_of(ia));
    }
    let sig = Signature::new(vec![("mul".into(), 2), ("inv".into(), 1), ("e".into(), 0)]).unwrap();
    let alg = FiniteAlgebra::new(6, sig, vec![mul, inv, vec![0]]).unwrap();
    let a3 = Partition::from_pairs(6, &[(0, 3), (3, 4), (1, 2), (2, 5)]);
    (alg, a3)
}

pub fn lattice2() -> FiniteAlgebra {
    let sig = Signature::new(vec![("meet".into(), 2), ("join".into(), 2)]).unwrap();
    FiniteAlgebra::new(2, sig, vec![vec![0, 0, 0, 1], vec![0, 1, 1, 1]]).unwrap()
}

pub fn majority2() -> FiniteAlgebra {
    let sig = Signature::new(vec![("maj".into(), 3)]).unwrap();
    let table: Vec<usize> = (0..8)
        .map(|i| {
            let (a, b, c) = (i / 4, i / 2 % 2, i % 2);
            (a & b) | (a & c) | (b & c)
        })
        .collect();
    FiniteAlgebra::new(2, sig, vec![table]).unwrap()
}

/// A random algebra on 2..=max_size elements with up to `max_binops` random
/// binary operations.
pub fn random_algebra(rng: &mut StdRng, max_size: usize, max_binops: usize) -> FiniteAlgebra {
    let n = rng.random_range(2..=max_size);
    let ops = rng.random_range(0..=max_binops);
    let mut symbols = Vec::new();
    let mut tables = Vec::new();
    for i in 0..ops {
        symbols.push((format!("f{}", i + 1), 2usize));
        tables.push((0..n * n).map(|_| rng.random_range(0..n)).collect());
    }
    FiniteAlgebra::new(n, Signature::new(symbols).unwrap(), tables).unwrap()
}

/// A random join-free relational term of bounded depth over the given
/// variable names.
pub fn random_joinfree_term(rng: &mut StdRng, depth: usize, vars: &[&str]) -> RelTerm {
    if depth == 0 || rng.random_bool(0.35) {
        return RelTerm::var(vars[rng.random_range(0..vars.len())]);
    }
    let l = random_joinfree_term(rng, depth - 1, vars);
    let r = random_joinfree_term(rng, depth - 1, vars);
    if rng.random_bool(0.5) {
        RelTerm::meet(l, r)
    } else {
        RelTerm::comp(l, r)
    }
}

/// A uniformly random partition of `0..n` (by random block labels).
pub fn random_partition(rng: &mut StdRng, n: usize) -> Partition {
    let labels: Vec<usize> = (0..n).map(|_| rng.random_range(0..n)).collect();
    let mut pairs = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if labels[a] == labels[b] {
                pairs.push((a, b));
            }
        }
    }
    Partition::from_pairs(n, &pairs)
}
