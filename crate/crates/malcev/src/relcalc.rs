//! Congruence generation, congruence-lattice enumeration, and evaluation of
//! relational terms over a finite algebra.

use std::collections::{BTreeMap, BTreeSet};

use crate::algebra::{next_tuple, FiniteAlgebra};
use crate::commutator::CommutatorEngine;
use crate::error::{Error, Result};
use crate::rel::{BinRel, Partition, UnionFind};
use crate::termlang::RelTerm;

/// Default cap on the number of congruences `con_lattice` will enumerate.
pub const DEFAULT_LATTICE_CAP: usize = 100_000;
/// Default budget for `check_eq_exhaustive`, counted in assignments.
pub const DEFAULT_ASSIGNMENT_BUDGET: u128 = 1_000_000;

/// Least congruence of `alg` containing the given pairs.
pub fn cg(alg: &FiniteAlgebra, pairs: &[(usize, usize)]) -> Partition {
    cg_extend(alg, &Partition::identity(alg.size()), pairs)
}

/// Least congruence containing a base congruence and some extra pairs.
/// Classic worklist closure: whenever two classes merge, every unary
/// polynomial translate of the merged pair is merged as well.
pub fn cg_extend(alg: &FiniteAlgebra, base: &Partition, pairs: &[(usize, usize)]) -> Partition {
    let n = alg.size();
    let mut uf = UnionFind::new(n);
    let mut queue: Vec<(usize, usize)> = Vec::new();
    let merge = |uf: &mut UnionFind, queue: &mut Vec<(usize, usize)>, a: usize, b: usize| {
        if uf.union(a, b) {
            queue.push((a, b));
        }
    };
    for e in 0..n {
        merge(&mut uf, &mut queue, e, base.rep(e));
    }
    for &(a, b) in pairs {
        merge(&mut uf, &mut queue, a, b);
    }
    while let Some((a, b)) = queue.pop() {
        for op in 0..alg.signature().len() {
            let arity = alg.signature().arity(op);
            if arity == 0 {
                continue;
            }
            let mut rest = vec![0usize; arity - 1];
            for pos in 0..arity {
                loop {
                    let mut lhs = Vec::with_capacity(arity);
                    lhs.extend_from_slice(&rest[..pos]);
                    lhs.push(a);
                    lhs.extend_from_slice(&rest[pos..]);
                    let mut rhs = lhs.clone();
                    rhs[pos] = b;
                    let fa = alg.apply(op, &lhs);
                    let fb = alg.apply(op, &rhs);
                    let (ra, rb) = (uf.find(fa), uf.find(fb));
                    if ra != rb {
                        merge(&mut uf, &mut queue, ra, rb);
                    }
                    if !next_tuple(&mut rest, n) {
                        break;
                    }
                }
            }
        }
    }
    uf.into_partition()
}

/// All congruences of `alg`: the join-closure of the principal congruences
/// plus the identity, sorted by block structure (representative vectors,
/// lexicographically — so the full congruence comes first and the identity
/// last).
pub fn con_lattice(alg: &FiniteAlgebra) -> Result<Vec<Partition>> {
    con_lattice_capped(alg, DEFAULT_LATTICE_CAP)
}

pub fn con_lattice_capped(alg: &FiniteAlgebra, cap: usize) -> Result<Vec<Partition>> {
    let n = alg.size();
    let mut set: BTreeSet<Partition> = BTreeSet::new();
    set.insert(Partition::identity(n));
    let mut queue: Vec<Partition> = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            let p = cg(alg, &[(a, b)]);
            if set.insert(p.clone()) {
                queue.push(p);
            }
        }
    }
    while let Some(p) = queue.pop() {
        if set.len() > cap {
            return Err(Error::CapacityExceeded { requested: set.len() as u128, cap: cap as u128 });
        }
        let mut fresh = Vec::new();
        for q in set.iter() {
            let j = p.join(q);
            if !set.contains(&j) {
                fresh.push(j);
            }
        }
        for j in fresh {
            // Joins of congruences are congruences again, so no re-closure
            // with cg is needed here.
            if set.insert(j.clone()) {
                queue.push(j);
            }
        }
    }
    if set.len() > cap {
        return Err(Error::CapacityExceeded { requested: set.len() as u128, cap: cap as u128 });
    }
    Ok(set.into_iter().collect())
}

/// Checks that `r` is a congruence of `alg` and returns it as a partition.
fn expect_congruence(alg: &FiniteAlgebra, r: &BinRel, subterm: &RelTerm) -> Result<Partition> {
    let part = r
        .as_partition()
        .ok_or_else(|| Error::OperandNotCongruence { subterm: subterm.to_string() })?;
    if !alg.is_congruence(&part) {
        return Err(Error::OperandNotCongruence { subterm: subterm.to_string() });
    }
    Ok(part)
}

/// Evaluates a relational term under an assignment of its variables.
/// Join and commutator operands must evaluate to congruences of `alg`.
pub fn eval_relterm(
    alg: &FiniteAlgebra,
    term: &RelTerm,
    assignment: &BTreeMap<String, BinRel>,
) -> Result<BinRel> {
    let mut engine = CommutatorEngine::new(alg);
    eval_relterm_with(&mut engine, term, assignment)
}

/// Same as [`eval_relterm`] but reuses a session engine, so repeated
/// commutator subterms (by value) are computed once.
pub fn eval_relterm_with(
    engine: &mut CommutatorEngine<'_>,
    term: &RelTerm,
    assignment: &BTreeMap<String, BinRel>,
) -> Result<BinRel> {
    let alg = engine.algebra();
    match term {
        RelTerm::Var(v) => {
            let r = assignment.get(v).ok_or_else(|| Error::UnboundVariable(v.clone()))?;
            if r.size() != alg.size() {
                return Err(Error::SizeMismatch { left: r.size(), right: alg.size() });
            }
            Ok(r.clone())
        }
        RelTerm::Meet(l, r) => {
            let lv = eval_relterm_with(engine, l, assignment)?;
            let rv = eval_relterm_with(engine, r, assignment)?;
            lv.meet(&rv)
        }
        RelTerm::Comp(l, r) => {
            let lv = eval_relterm_with(engine, l, assignment)?;
            let rv = eval_relterm_with(engine, r, assignment)?;
            lv.compose(&rv)
        }
        RelTerm::Join(l, r) => {
            let lv = eval_relterm_with(engine, l, assignment)?;
            let rv = eval_relterm_with(engine, r, assignment)?;
            let lp = expect_congruence(engine.algebra(), &lv, l)?;
            let rp = expect_congruence(engine.algebra(), &rv, r)?;
            Ok(lp.join(&rp).to_binrel())
        }
        RelTerm::Comm(l, r) => {
            let lv = eval_relterm_with(engine, l, assignment)?;
            let rv = eval_relterm_with(engine, r, assignment)?;
            let lp = expect_congruence(engine.algebra(), &lv, l)?;
            let rp = expect_congruence(engine.algebra(), &rv, r)?;
            Ok(engine.commutator(&lp, &rp)?.to_binrel())
        }
    }
}

/// Outcome of a single inclusion check `p ≤ q`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum InclusionOutcome {
    Holds,
    /// Least pair of `eval(p) \ eval(q)`.
    Fails { witness: (usize, usize) },
}

impl InclusionOutcome {
    pub fn holds(&self) -> bool {
        matches!(self, InclusionOutcome::Holds)
    }
}

pub fn check_inclusion(
    alg: &FiniteAlgebra,
    lhs: &RelTerm,
    rhs: &RelTerm,
    assignment: &BTreeMap<String, BinRel>,
) -> Result<InclusionOutcome> {
    let mut engine = CommutatorEngine::new(alg);
    check_inclusion_with(&mut engine, lhs, rhs, assignment)
}

pub fn check_inclusion_with(
    engine: &mut CommutatorEngine<'_>,
    lhs: &RelTerm,
    rhs: &RelTerm,
    assignment: &BTreeMap<String, BinRel>,
) -> Result<InclusionOutcome> {
    let lv = eval_relterm_with(engine, lhs, assignment)?;
    let rv = eval_relterm_with(engine, rhs, assignment)?;
    match lv.first_missing_in(&rv) {
        None => Ok(InclusionOutcome::Holds),
        Some(witness) => Ok(InclusionOutcome::Fails { witness }),
    }
}

/// Outcome of quantifying an inclusion over all congruence assignments.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExhaustiveOutcome {
    Holds,
    Fails {
        assignment: BTreeMap<String, Partition>,
        witness: (usize, usize),
    },
}

impl ExhaustiveOutcome {
    pub fn holds(&self) -> bool {
        matches!(self, ExhaustiveOutcome::Holds)
    }
}

/// Checks `lhs ≤ rhs` for every assignment of congruences to the variables,
/// in lattice-enumeration order; the first failing assignment wins.
pub fn check_eq_exhaustive(
    alg: &FiniteAlgebra,
    lhs: &RelTerm,
    rhs: &RelTerm,
    budget: Option<u128>,
) -> Result<ExhaustiveOutcome> {
    let budget = budget.unwrap_or(DEFAULT_ASSIGNMENT_BUDGET);
    let lattice = con_lattice(alg)?;
    let mut vars = lhs.variables();
    for v in rhs.variables() {
        if !vars.contains(&v) {
            vars.push(v);
        }
    }
    let v = vars.len() as u32;
    let required = (lattice.len() as u128)
        .checked_pow(v)
        .ok_or(Error::BudgetExceeded { required: u128::MAX, budget })?;
    if required > budget {
        return Err(Error::BudgetExceeded { required, budget });
    }
    let rels: Vec<BinRel> = lattice.iter().map(|p| p.to_binrel()).collect();
    let mut engine = CommutatorEngine::new(alg);
    let mut choice = vec![0usize; vars.len()];
    loop {
        let assignment: BTreeMap<String, BinRel> = vars
            .iter()
            .zip(&choice)
            .map(|(v, &i)| (v.clone(), rels[i].clone()))
            .collect();
        if let InclusionOutcome::Fails { witness } =
            check_inclusion_with(&mut engine, lhs, rhs, &assignment)?
        {
            let named = vars
                .iter()
                .zip(&choice)
                .map(|(v, &i)| (v.clone(), lattice[i].clone()))
                .collect();
            return Ok(ExhaustiveOutcome::Fails { assignment: named, witness });
        }
        if !next_tuple(&mut choice, lattice.len()) {
            break;
        }
    }
    Ok(ExhaustiveOutcome::Holds)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testfix::{all_partitions, lattice2, majority2, s3, z4};

    fn part(n: usize, s: &str) -> Partition {
        Partition::parse(n, s).unwrap()
    }

    fn asg(entries: &[(&str, &Partition)]) -> BTreeMap<String, BinRel> {
        entries.iter().map(|(k, p)| (k.to_string(), p.to_binrel())).collect()
    }

    #[test]
    fn cg_examples() {
        let z = z4();
        assert_eq!(cg(&z, &[(0, 2)]), part(4, "{{0,2},{1,3}}"));
        assert_eq!(cg(&z, &[]), Partition::identity(4));
        let s = FiniteAlgebra::set_algebra(3).unwrap();
        assert_eq!(cg(&s, &[(0, 1)]), part(3, "{{0,1},{2}}"));
        // On Z4 a single off-subgroup pair generates everything.
        assert_eq!(cg(&z, &[(0, 1)]), Partition::full(4));
    }

    #[test]
    fn con_lattice_matches_brute_force() {
        for (name, alg) in [
            ("z4", z4()),
            ("s3", s3().0),
            ("set3", FiniteAlgebra::set_algebra(3).unwrap()),
            ("lattice2", lattice2()),
            ("majority2", majority2()),
        ] {
            let fast: Vec<Partition> = con_lattice(&alg).unwrap();
            let brute: Vec<Partition> = all_partitions(alg.size())
                .into_iter()
                .filter(|p| alg.is_congruence(p))
                .collect();
            let brute_sorted: BTreeSet<Partition> = brute.into_iter().collect();
            assert_eq!(fast, brute_sorted.into_iter().collect::<Vec<_>>(), "{}", name);
        }
    }

    #[test]
    fn con_lattice_sizes() {
        assert_eq!(con_lattice(&z4()).unwrap().len(), 3);
        assert_eq!(con_lattice(&FiniteAlgebra::set_algebra(3).unwrap()).unwrap().len(), 5);
        assert_eq!(con_lattice(&FiniteAlgebra::set_algebra(1).unwrap()).unwrap().len(), 1);
        assert_eq!(con_lattice(&s3().0).unwrap().len(), 3);
    }

    #[test]
    fn cg_is_least_containing_congruence() {
        let (s, _) = s3();
        let lattice = con_lattice(&s).unwrap();
        for a in 0..6 {
            for b in a + 1..6 {
                let p = cg(&s, &[(a, b)]);
                let least = lattice
                    .iter()
                    .filter(|q| q.same_block(a, b))
                    .fold(Partition::full(6), |acc, q| acc.meet(q));
                assert_eq!(p, least);
            }
        }
    }

    #[test]
    fn join_is_least_upper_bound_in_lattice() {
        let s = FiniteAlgebra::set_algebra(4).unwrap();
        let lattice = con_lattice(&s).unwrap();
        for p in &lattice {
            for q in &lattice {
                let j = p.join(q);
                assert!(p.leq(&j) && q.leq(&j));
                for r in &lattice {
                    if p.leq(r) && q.leq(r) {
                        assert!(j.leq(r));
                    }
                }
            }
        }
    }

    #[test]
    fn eval_relterm_examples() {
        let s = FiniteAlgebra::set_algebra(3).unwrap();
        let alpha = part(3, "{{0,2},{1}}");
        let beta = part(3, "{{0,1},{2}}");
        let gamma = part(3, "{{1,2},{0}}");
        let t = RelTerm::parse("a ^ (b o g)").unwrap();
        let out = eval_relterm(&s, &t, &asg(&[("a", &alpha), ("b", &beta), ("g", &gamma)])).unwrap();
        let expected = BinRel::from_pairs(3, &[(0, 0), (0, 2), (1, 1), (2, 2)]);
        assert_eq!(out, expected);

        // X1 v X1 is X1 on congruences.
        let t = RelTerm::parse("X1 v X1").unwrap();
        let out = eval_relterm(&s, &t, &asg(&[("X1", &alpha)])).unwrap();
        assert_eq!(out, alpha.to_binrel());

        // [t,t] with t the full congruence on the 8-element set algebra is
        // the identity: set algebras are abelian.
        let s8 = FiniteAlgebra::set_algebra(8).unwrap();
        let full = Partition::full(8);
        let t = RelTerm::parse("[t,t]").unwrap();
        let out = eval_relterm(&s8, &t, &asg(&[("t", &full)])).unwrap();
        assert_eq!(out, Partition::identity(8).to_binrel());
    }

    #[test]
    fn eval_relterm_errors() {
        let s = FiniteAlgebra::set_algebra(3).unwrap();
        let t = RelTerm::parse("a v b").unwrap();
        let alpha = part(3, "{{0,2},{1}}");
        // Unbound variable.
        assert_eq!(
            eval_relterm(&s, &t, &asg(&[("a", &alpha)])),
            Err(Error::UnboundVariable("b".into()))
        );
        // Join operand that is not an equivalence.
        let mut m = BTreeMap::new();
        m.insert("a".to_string(), alpha.to_binrel());
        m.insert("b".to_string(), BinRel::from_pairs(3, &[(0, 1)]));
        match eval_relterm(&s, &t, &m) {
            Err(Error::OperandNotCongruence { subterm }) => assert_eq!(subterm, "b"),
            other => panic!("expected OperandNotCongruence, got {:?}", other),
        }
        // Equivalence that is not compatible: {{0,1},{2},{3}} on Z4.
        let z = z4();
        let bad = part(4, "{{0,1}}");
        let t = RelTerm::parse("a v a").unwrap();
        assert!(matches!(
            eval_relterm(&z, &t, &asg(&[("a", &bad)])),
            Err(Error::OperandNotCongruence { .. })
        ));
    }

    #[test]
    fn check_inclusion_examples() {
        let s = FiniteAlgebra::set_algebra(3).unwrap();
        let alpha = part(3, "{{0,2},{1}}");
        let beta = part(3, "{{0,1},{2}}");
        let gamma = part(3, "{{1,2},{0}}");
        let m = asg(&[("a", &alpha), ("b", &beta), ("g", &gamma)]);
        let lhs = RelTerm::parse("a ^ (b o g)").unwrap();
        let rhs = RelTerm::parse("(a ^ b) o (a ^ g)").unwrap();
        assert_eq!(
            check_inclusion(&s, &lhs, &rhs, &m).unwrap(),
            InclusionOutcome::Fails { witness: (0, 2) }
        );
        // p ≤ p always.
        assert!(check_inclusion(&s, &lhs, &lhs, &m).unwrap().holds());
        // anything ≤ the full relation.
        let full = Partition::full(3);
        let mut m2 = m.clone();
        m2.insert("f".to_string(), full.to_binrel());
        let top = RelTerm::parse("f").unwrap();
        assert!(check_inclusion(&s, &lhs, &top, &m2).unwrap().holds());
    }

    #[test]
    fn exhaustive_examples() {
        let z = z4();
        let lhs = RelTerm::parse("a o b").unwrap();
        let rhs = RelTerm::parse("b o a").unwrap();
        // Groups permute congruences: 3^2 assignments, all pass.
        assert!(check_eq_exhaustive(&z, &lhs, &rhs, None).unwrap().holds());

        let s = FiniteAlgebra::set_algebra(3).unwrap();
        let lhs = RelTerm::parse("a ^ (b o g)").unwrap();
        let rhs = RelTerm::parse("(a ^ b) o (a ^ g)").unwrap();
        match check_eq_exhaustive(&s, &lhs, &rhs, None).unwrap() {
            ExhaustiveOutcome::Fails { assignment, witness } => {
                // Re-check the reported assignment independently.
                let m: BTreeMap<String, BinRel> =
                    assignment.iter().map(|(k, p)| (k.clone(), p.to_binrel())).collect();
                assert_eq!(
                    check_inclusion(&s, &lhs, &rhs, &m).unwrap(),
                    InclusionOutcome::Fails { witness }
                );
            }
            ExhaustiveOutcome::Holds => panic!("meet-distributivity cannot hold on a set"),
        }
        // p ≤ p survives quantification.
        assert!(check_eq_exhaustive(&s, &lhs, &lhs, None).unwrap().holds());
    }

    #[test]
    fn exhaustive_budget() {
        let s = FiniteAlgebra::set_algebra(3).unwrap();
        let lhs = RelTerm::parse("a ^ b ^ g").unwrap();
        let rhs = RelTerm::parse("a").unwrap();
        // 5 congruences, 3 variables: 125 assignments needed.
        match check_eq_exhaustive(&s, &lhs, &rhs, Some(100)) {
            Err(Error::BudgetExceeded { required, budget }) => {
                assert_eq!(required, 125);
                assert_eq!(budget, 100);
            }
            other => panic!("expected budget error, got {:?}", other),
        }
    }

    #[test]
    fn compose_assoc_and_meet_laws() {
        // compose is associative; meet commutative/associative/idempotent;
        // θ∘θ = θ and identity ⊆ θ for congruences θ.
        let (s, a3) = s3();
        let lattice = con_lattice(&s).unwrap();
        let rels: Vec<BinRel> = lattice.iter().map(|p| p.to_binrel()).collect();
        for r in &rels {
            for t in &rels {
                for u in &rels {
                    let left = r.compose(t).unwrap().compose(u).unwrap();
                    let right = r.compose(&t.compose(u).unwrap()).unwrap();
                    assert_eq!(left, right);
                }
                assert_eq!(r.meet(t).unwrap(), t.meet(r).unwrap());
            }
            assert_eq!(r.meet(r).unwrap(), *r);
            assert_eq!(r.compose(r).unwrap(), *r);
            assert!(BinRel::identity(6).is_subset(r));
        }
        let _ = a3;
    }
}
