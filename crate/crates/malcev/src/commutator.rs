//! The TC-commutator and centralizer on finite algebras.
//!
//! `M(α,β)` is the subalgebra of `A^4` generated by the matrices
//! `[[a,a],[b,b]]` for `(a,b) ∈ α` and `[[u,v],[u,v]]` for `(u,v) ∈ β`,
//! with entries stored row-major: `(m11, m12, m21, m22)`. Rows vary along α,
//! columns along β. Because the generators range over all α- and β-pairs
//! (including the diagonal), the generated set realises exactly the matrices
//! of polynomial pictures, constants absorbed.
//!
//! `α` centralizes `β` modulo `δ` when every matrix with a δ-related top row
//! has a δ-related bottom row; the commutator `[α,β]` is the least such `δ`,
//! computed as a fixpoint of harvest-then-regenerate.

use std::collections::HashMap;
use std::rc::Rc;

use crate::algebra::{FiniteAlgebra, DEFAULT_SIZE_CAP};
use crate::error::{Error, Result};
use crate::rel::Partition;
use crate::relcalc;

/// The generated matrix set `M(α,β)`, kept in discovery order with a
/// membership bitmap over the encoded `A^4` universe.
pub struct MatrixSet {
    n: usize,
    codes: Vec<u32>,
    member: Vec<bool>,
}

impl MatrixSet {
    pub fn len(&self) -> usize {
        self.codes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codes.is_empty()
    }

    #[inline]
    fn decode(&self, code: u32) -> [usize; 4] {
        let n = self.n;
        let c = code as usize;
        [c / (n * n * n), c / (n * n) % n, c / n % n, c % n]
    }

    pub fn contains(&self, m: [usize; 4]) -> bool {
        let n = self.n;
        self.member[((m[0] * n + m[1]) * n + m[2]) * n + m[3]]
    }

    /// Matrices in generation order.
    pub fn iter(&self) -> impl Iterator<Item = [usize; 4]> + '_ {
        self.codes.iter().map(move |&c| self.decode(c))
    }

    /// Matrices in lexicographic `(m11,m12,m21,m22)` order.
    pub fn iter_lex(&self) -> impl Iterator<Item = [usize; 4]> + '_ {
        self.member
            .iter()
            .enumerate()
            .filter(|&(_, &m)| m)
            .map(move |(c, _)| self.decode(c as u32))
    }
}

/// Per-algebra session state: matrix sets and commutators are cached by the
/// value of their congruence arguments.
pub struct CommutatorEngine<'a> {
    alg: &'a FiniteAlgebra,
    matrices: HashMap<(Partition, Partition), Rc<MatrixSet>>,
    commutators: HashMap<(Partition, Partition), Partition>,
}

impl<'a> CommutatorEngine<'a> {
    pub fn new(alg: &'a FiniteAlgebra) -> Self {
        CommutatorEngine { alg, matrices: HashMap::new(), commutators: HashMap::new() }
    }

    pub fn algebra(&self) -> &'a FiniteAlgebra {
        self.alg
    }

    /// `M(α,β)`, generated once per distinct argument pair.
    pub fn matrices(&mut self, alpha: &Partition, beta: &Partition) -> Result<Rc<MatrixSet>> {
        if let Some(m) = self.matrices.get(&(alpha.clone(), beta.clone())) {
            return Ok(m.clone());
        }
        let m = Rc::new(generate_matrix_set(self.alg, alpha, beta)?);
        self.matrices.insert((alpha.clone(), beta.clone()), m.clone());
        Ok(m)
    }

    /// Lexicographically least violating matrix, or `None` when
    /// `C(α,β;δ)` holds.
    pub fn centralizes_witness(
        &mut self,
        alpha: &Partition,
        beta: &Partition,
        delta: &Partition,
    ) -> Result<Option<[usize; 4]>> {
        let m = self.matrices(alpha, beta)?;
        for mat in m.iter_lex() {
            if delta.same_block(mat[0], mat[1]) && !delta.same_block(mat[2], mat[3]) {
                return Ok(Some(mat));
            }
        }
        Ok(None)
    }

    pub fn centralizes(&mut self, alpha: &Partition, beta: &Partition, delta: &Partition) -> Result<bool> {
        Ok(self.centralizes_witness(alpha, beta, delta)?.is_none())
    }

    /// The TC-commutator `[α,β]`: least fixpoint of
    /// `δ ↦ Cg(δ ∪ {bottom rows of matrices with δ-related top rows})`
    /// starting from the identity partition.
    pub fn commutator(&mut self, alpha: &Partition, beta: &Partition) -> Result<Partition> {
        if let Some(c) = self.commutators.get(&(alpha.clone(), beta.clone())) {
            return Ok(c.clone());
        }
        let m = self.matrices(alpha, beta)?;
        let mut delta = Partition::identity(self.alg.size());
        loop {
            let mut harvest = Vec::new();
            for mat in m.iter() {
                if delta.same_block(mat[0], mat[1]) && !delta.same_block(mat[2], mat[3]) {
                    harvest.push((mat[2], mat[3]));
                }
            }
            if harvest.is_empty() {
                break;
            }
            // A single harvest need not be congruence-closed; regenerate and
            // go again until nothing new appears.
            delta = relcalc::cg_extend(self.alg, &delta, &harvest);
        }
        debug_assert!(self.centralizes(alpha, beta, &delta)?);
        self.commutators.insert((alpha.clone(), beta.clone()), delta.clone());
        Ok(delta)
    }

    pub fn is_abelian_congruence(&mut self, theta: &Partition) -> Result<bool> {
        Ok(self.commutator(theta, theta)?.is_identity())
    }

    pub fn is_abelian_algebra(&mut self) -> Result<bool> {
        let full = Partition::full(self.alg.size());
        self.is_abelian_congruence(&full)
    }
}

fn generate_matrix_set(alg: &FiniteAlgebra, alpha: &Partition, beta: &Partition) -> Result<MatrixSet> {
    let n = alg.size();
    let n4 = (n as u128).pow(4);
    if n4 > DEFAULT_SIZE_CAP as u128 {
        return Err(Error::CapacityExceeded { requested: n4, cap: DEFAULT_SIZE_CAP as u128 });
    }
    let n4 = n4 as usize;
    let enc = |m: [usize; 4]| -> u32 { (((m[0] * n + m[1]) * n + m[2]) * n + m[3]) as u32 };
    let mut member = vec![false; n4];
    let mut codes: Vec<u32> = Vec::new();
    let push = |m: [usize; 4], member: &mut Vec<bool>, codes: &mut Vec<u32>| {
        let c = enc(m);
        if !member[c as usize] {
            member[c as usize] = true;
            codes.push(c);
        }
    };
    // Row generators from α, column generators from β, diagonals included.
    for a in 0..n {
        for b in 0..n {
            if alpha.same_block(a, b) {
                push([a, a, b, b], &mut member, &mut codes);
            }
        }
    }
    for u in 0..n {
        for v in 0..n {
            if beta.same_block(u, v) {
                push([u, v, u, v], &mut member, &mut codes);
            }
        }
    }
    let pow = [n * n * n, n * n, n, 1];
    let mut new_from = 0;
    while new_from < codes.len() {
        let round_start = codes.len();
        for op in 0..alg.signature().len() {
            let arity = alg.signature().arity(op);
            if arity == 0 {
                // Constants are already covered by diagonal generators.
                continue;
            }
            let table = alg.table(op);
            let mut args = vec![0usize; arity];
            loop {
                if args.iter().any(|&a| a >= new_from) {
                    let mut out = 0usize;
                    for &p in &pow {
                        let mut idx = 0usize;
                        for &a in args.iter() {
                            idx = idx * n + (codes[a] as usize / p) % n;
                        }
                        out = out * n + table[idx];
                    }
                    let c = out as u32;
                    if !member[out] {
                        member[out] = true;
                        codes.push(c);
                    }
                }
                if !crate::algebra::advance_bounded(&mut args, round_start) {
                    break;
                }
            }
        }
        new_from = round_start;
    }
    Ok(MatrixSet { n, codes, member })
}

/// One-shot `M(α,β)`.
pub fn generate_matrices(alg: &FiniteAlgebra, alpha: &Partition, beta: &Partition) -> Result<MatrixSet> {
    generate_matrix_set(alg, alpha, beta)
}

/// One-shot centralizer check; `Ok(None)` means `C(α,β;δ)` holds, otherwise
/// the least violating matrix is returned.
pub fn centralizes(
    alg: &FiniteAlgebra,
    alpha: &Partition,
    beta: &Partition,
    delta: &Partition,
) -> Result<Option<[usize; 4]>> {
    CommutatorEngine::new(alg).centralizes_witness(alpha, beta, delta)
}

/// One-shot TC-commutator `[α,β]`.
pub fn commutator(alg: &FiniteAlgebra, alpha: &Partition, beta: &Partition) -> Result<Partition> {
    CommutatorEngine::new(alg).commutator(alpha, beta)
}

pub fn is_abelian_congruence(alg: &FiniteAlgebra, theta: &Partition) -> Result<bool> {
    CommutatorEngine::new(alg).is_abelian_congruence(theta)
}

pub fn is_abelian_algebra(alg: &FiniteAlgebra) -> Result<bool> {
    CommutatorEngine::new(alg).is_abelian_algebra()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testfix::{s3, z4};

    #[test]
    fn set_algebra_matrices_are_generators() {
        let a = FiniteAlgebra::set_algebra(3).unwrap();
        let alpha = Partition::parse(3, "{{0,1},{2}}").unwrap();
        let beta = Partition::parse(3, "{{1,2},{0}}").unwrap();
        let m = generate_matrices(&a, &alpha, &beta).unwrap();
        // Nothing to close under: the set is exactly the two generator
        // families. |α| has 5 pairs, |β| has 5 pairs, diagonal overlap 3.
        assert_eq!(m.len(), 5 + 5 - 3);
        for mat in m.iter() {
            let row_gen = mat[0] == mat[1] && mat[2] == mat[3] && alpha.same_block(mat[0], mat[2]);
            let col_gen = mat[0] == mat[2] && mat[1] == mat[3] && beta.same_block(mat[0], mat[1]);
            assert!(row_gen || col_gen, "unexpected matrix {:?}", mat);
        }
    }

    #[test]
    fn z4_full_full_matrices_satisfy_group_identity() {
        let z = z4();
        let full = Partition::full(4);
        let m = generate_matrices(&z, &full, &full).unwrap();
        for mat in m.iter() {
            let v = (mat[0] + 4 - mat[1]) % 4;
            let w = (mat[2] + 4 - mat[3]) % 4;
            assert_eq!(v, w, "matrix {:?} violates m11-m12-m21+m22=0", mat);
        }
        assert_eq!(m.len(), 64);
    }

    #[test]
    fn identity_alpha_gives_equal_rows() {
        let z = z4();
        let id = Partition::identity(4);
        let beta = Partition::parse(4, "{{0,2},{1,3}}").unwrap();
        let m = generate_matrices(&z, &id, &beta).unwrap();
        for mat in m.iter() {
            assert_eq!((mat[0], mat[1]), (mat[2], mat[3]));
        }
    }

    #[test]
    fn centralizes_trivial_cases() {
        let z = z4();
        let full = Partition::full(4);
        let id = Partition::identity(4);
        let mid = Partition::parse(4, "{{0,2},{1,3}}").unwrap();
        // C(α,β;full) always holds.
        assert_eq!(centralizes(&z, &mid, &full, &full).unwrap(), None);
        // C(identity,β;δ) always holds: equal rows.
        assert_eq!(centralizes(&z, &id, &full, &id).unwrap(), None);
        // On the 2-element set algebra C(full,full;identity) holds.
        let s = FiniteAlgebra::set_algebra(2).unwrap();
        let f2 = Partition::full(2);
        let i2 = Partition::identity(2);
        assert_eq!(centralizes(&s, &f2, &f2, &i2).unwrap(), None);
    }

    #[test]
    fn z4_is_abelian() {
        let z = z4();
        let full = Partition::full(4);
        assert_eq!(commutator(&z, &full, &full).unwrap(), Partition::identity(4));
        assert!(is_abelian_algebra(&z).unwrap());
    }

    #[test]
    fn s3_commutator_is_a3() {
        let (s, a3) = s3();
        let full = Partition::full(6);
        assert_eq!(commutator(&s, &full, &full).unwrap(), a3);
        // A3 is cyclic, so the coset congruence is abelian; the full one not.
        assert!(is_abelian_congruence(&s, &a3).unwrap());
        assert!(!is_abelian_algebra(&s).unwrap());
    }

    #[test]
    fn identity_beta_commutator_trivial() {
        let (s, a3) = s3();
        let id = Partition::identity(6);
        assert_eq!(commutator(&s, &id, &a3).unwrap(), id);
        assert_eq!(commutator(&s, &id, &Partition::full(6)).unwrap(), id);
    }

    #[test]
    fn set_algebras_are_abelian() {
        for n in 1..=5 {
            let s = FiniteAlgebra::set_algebra(n).unwrap();
            assert!(is_abelian_algebra(&s).unwrap(), "size {}", n);
        }
    }

    #[test]
    fn commutator_below_meet() {
        let (s, a3) = s3();
        let full = Partition::full(6);
        for alpha in [&a3, &full] {
            for beta in [&a3, &full] {
                let c = commutator(&s, alpha, beta).unwrap();
                assert!(c.leq(&alpha.meet(beta)));
            }
        }
    }

    #[test]
    fn centralizer_witness_is_least() {
        // On S3 the commutator [1,1] is the A3 congruence, so centralizing
        // modulo the identity must fail and report the least matrix.
        let (s, _) = s3();
        let full = Partition::full(6);
        let id = Partition::identity(6);
        let w = centralizes(&s, &full, &full, &id).unwrap().expect("must fail");
        let m = generate_matrices(&s, &full, &full).unwrap();
        for mat in m.iter_lex() {
            if mat == w {
                break;
            }
            assert!(!(id.same_block(mat[0], mat[1]) && !id.same_block(mat[2], mat[3])));
        }
    }
}
