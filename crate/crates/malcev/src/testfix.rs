//! Shared algebra fixtures for unit tests. Group tables are built from
//! permutation composition rather than typed in, so they double as oracles.

use crate::algebra::{FiniteAlgebra, Signature};
use crate::rel::Partition;

/// The cyclic group Z4 as tables for `plus`, `neg`, `zero`.
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

/// The symmetric group S3 with `mul`, `inv`, `e`, elements being the six
/// permutations of {0,1,2} in lexicographic one-line order. Also returns the
/// congruence whose blocks are the A3 cosets.
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
            // (a·b)(x) = a(b(x))
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
    // Even permutations are 0, 3, 4.
    let a3 = Partition::from_pairs(6, &[(0, 3), (3, 4), (1, 2), (2, 5)]);
    (alg, a3)
}

/// The two-element lattice with `meet` and `join`.
pub fn lattice2() -> FiniteAlgebra {
    let sig = Signature::new(vec![("meet".into(), 2), ("join".into(), 2)]).unwrap();
    FiniteAlgebra::new(2, sig, vec![vec![0, 0, 0, 1], vec![0, 1, 1, 1]]).unwrap()
}

/// Every partition of `{0..n-1}`, enumerated via restricted-growth strings.
/// Brute-force oracle for congruence-lattice tests.
pub fn all_partitions(n: usize) -> Vec<Partition> {
    fn rec(i: usize, used: usize, assign: &mut Vec<usize>, out: &mut Vec<Partition>) {
        let n = assign.len();
        if i == n {
            let mut pairs = Vec::new();
            for a in 0..n {
                for b in a + 1..n {
                    if assign[a] == assign[b] {
                        pairs.push((a, b));
                    }
                }
            }
            out.push(Partition::from_pairs(n, &pairs));
            return;
        }
        for b in 0..=used {
            assign[i] = b;
            rec(i + 1, if b == used { used + 1 } else { used }, assign, out);
        }
    }
    let mut out = Vec::new();
    if n == 0 {
        return out;
    }
    let mut assign = vec![0usize; n];
    rec(0, 0, &mut assign, &mut out);
    out
}

/// The two-element algebra whose only operation is the ternary majority.
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
