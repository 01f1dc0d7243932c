//! Commutator-equation checks, weak-difference checks, term-existence search
//! for strong Mal'cev conditions, and the theorem-level instance checks.
//!
//! The search realises the free algebra on `x1..xn` inside the power
//! `A^(A^n)`, generated from the projection tuples, but only the coordinates
//! an equation can actually read are materialised: projecting a generated
//! subpower commutes with generation, so existence and proven absence are
//! decided exactly on the projected closure, and the provenance DAG still
//! reads back a concrete term for every element.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::time::Instant;

use serde::Serialize;
use serde_json::json;

use crate::algebra::{generate_subpower_bounded, next_tuple, AlgTerm, FiniteAlgebra};
use crate::commutator::CommutatorEngine;
use crate::error::{Error, Result};
use crate::pwgen::{CondEquation, EqFlavor, MalcevCondition};
use crate::rel::{BinRel, Partition};
use crate::relcalc::{check_inclusion_with, con_lattice, InclusionOutcome};
use crate::termlang::{herringbone, RelTerm};

/// Default cap on tuples enumerated by the commutator-equation checks.
pub const DEFAULT_TUPLE_BUDGET: u128 = 10_000_000;
/// Default cap on elements generated per unknown during witness search.
pub const DEFAULT_SEARCH_ELEMENTS: usize = 100_000;

// ---------------------------------------------------------------------------
// Commutator equations on concrete terms
// ---------------------------------------------------------------------------

/// Outcome of `p ≈_C q` on one algebra.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CommEqOutcome {
    Holds,
    /// First failure: the congruence and the in-class tuple at which the two
    /// values are not `[θ,θ]`-related.
    Fails { theta: Partition, tuple: Vec<usize> },
}

impl CommEqOutcome {
    pub fn holds(&self) -> bool {
        matches!(self, CommEqOutcome::Holds)
    }
}

/// Checks the commutator equation `p ≈_C q`: for every congruence `θ` and
/// every tuple drawn from a single `θ`-class, the two values must be
/// `[θ,θ]`-related. Classes are scanned in increasing representative order,
/// tuples lexicographically; the first failure wins.
pub fn check_commutator_eq(
    alg: &FiniteAlgebra,
    p: &AlgTerm,
    q: &AlgTerm,
    budget: Option<u128>,
) -> Result<CommEqOutcome> {
    let mut engine = CommutatorEngine::new(alg);
    check_commutator_eq_with(&mut engine, p, q, budget)
}

pub fn check_commutator_eq_with(
    engine: &mut CommutatorEngine<'_>,
    p: &AlgTerm,
    q: &AlgTerm,
    budget: Option<u128>,
) -> Result<CommEqOutcome> {
    let alg = engine.algebra();
    let budget = budget.unwrap_or(DEFAULT_TUPLE_BUDGET);
    let n = p.var_count().max(q.var_count()).max(1) as u32;
    let lattice = con_lattice(alg)?;
    let required: u128 = lattice
        .iter()
        .map(|theta| theta.blocks().iter().map(|b| (b.len() as u128).pow(n)).sum::<u128>())
        .sum();
    if required > budget {
        return Err(Error::BudgetExceeded { required, budget });
    }
    for theta in &lattice {
        let comm = engine.commutator(theta, theta)?;
        for block in theta.blocks() {
            let mut pick = vec![0usize; n as usize];
            loop {
                let tuple: Vec<usize> = pick.iter().map(|&i| block[i]).collect();
                let pv = engine.algebra().eval(p, &tuple)?;
                let qv = engine.algebra().eval(q, &tuple)?;
                if !comm.same_block(pv, qv) {
                    return Ok(CommEqOutcome::Fails { theta: theta.clone(), tuple });
                }
                if !next_tuple(&mut pick, block.len()) {
                    break;
                }
            }
        }
    }
    Ok(CommEqOutcome::Holds)
}

/// Outcome of the weak-difference check for a ternary term.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WeakDiffOutcome {
    Holds,
    Fails { theta: Partition, pair: (usize, usize) },
}

impl WeakDiffOutcome {
    pub fn holds(&self) -> bool {
        matches!(self, WeakDiffOutcome::Holds)
    }
}

/// Checks `d(b,b,a) [θ,θ] a [θ,θ] d(a,b,b)` for every congruence `θ` and
/// every `θ`-related pair `(a,b)`.
pub fn check_weak_difference(alg: &FiniteAlgebra, d: &AlgTerm) -> Result<WeakDiffOutcome> {
    if d.var_count() > 3 {
        return Err(Error::ArityMismatch { symbol: "d".into(), expected: 3, found: d.var_count() });
    }
    let mut engine = CommutatorEngine::new(alg);
    let lattice = con_lattice(alg)?;
    for theta in &lattice {
        let comm = engine.commutator(theta, theta)?;
        for a in 0..alg.size() {
            for b in 0..alg.size() {
                if !theta.same_block(a, b) {
                    continue;
                }
                let left = alg.eval(d, &[b, b, a])?;
                let right = alg.eval(d, &[a, b, b])?;
                if !comm.same_block(left, a) || !comm.same_block(a, right) {
                    return Ok(WeakDiffOutcome::Fails { theta: theta.clone(), pair: (a, b) });
                }
            }
        }
    }
    Ok(WeakDiffOutcome::Holds)
}

/// `x ≈_C p(x,…,x)` at the identity congruence forces idempotence; this is
/// the direct check `p(a,…,a) = a` for every `a`.
pub fn check_remark_idempotent(alg: &FiniteAlgebra, p: &AlgTerm) -> Result<Option<usize>> {
    let n = p.var_count().max(1);
    for a in 0..alg.size() {
        let tuple = vec![a; n];
        if alg.eval(p, &tuple)? != a {
            return Ok(Some(a));
        }
    }
    Ok(None)
}

// ---------------------------------------------------------------------------
// Condition verification against supplied candidate terms
// ---------------------------------------------------------------------------

/// Result of substituting candidate terms into a condition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum VerifyOutcome {
    Holds,
    FailsStandard { equation: usize, assignment: Vec<usize> },
    FailsCommutator { equation: usize, theta: Partition, tuple: Vec<usize> },
}

impl VerifyOutcome {
    pub fn holds(&self) -> bool {
        matches!(self, VerifyOutcome::Holds)
    }
}

/// Composes one side of a condition equation into a term over the algebra's
/// signature: projections project, unknowns are replaced by their candidates.
fn compose_side(
    side: &AlgTerm,
    cond: &MalcevCondition,
    witness: &BTreeMap<String, AlgTerm>,
) -> Result<AlgTerm> {
    match side {
        AlgTerm::Var(i) => Ok(AlgTerm::Var(*i)),
        AlgTerm::App { symbol, args } => {
            let composed: Vec<AlgTerm> =
                args.iter().map(|a| compose_side(a, cond, witness)).collect::<Result<_>>()?;
            let sym = cond
                .symbol(symbol)
                .ok_or_else(|| Error::UnboundSymbol(symbol.clone()))?;
            match sym.projection {
                Some(coord) => Ok(composed[coord].clone()),
                None => {
                    let body = witness
                        .get(symbol)
                        .ok_or_else(|| Error::UnboundSymbol(symbol.clone()))?;
                    Ok(body.substitute(&composed))
                }
            }
        }
    }
}

/// Verifies a condition against candidate terms for its unknowns: standard
/// equations by evaluation over every assignment, commutator equations via
/// [`check_commutator_eq`].
pub fn verify_condition(
    alg: &FiniteAlgebra,
    cond: &MalcevCondition,
    witness: &BTreeMap<String, AlgTerm>,
) -> Result<VerifyOutcome> {
    let mut engine = CommutatorEngine::new(alg);
    for (idx, eq) in cond.equations.iter().enumerate() {
        let lhs = compose_side(&eq.lhs, cond, witness)?;
        let rhs = compose_side(&eq.rhs, cond, witness)?;
        match eq.flavor {
            EqFlavor::Standard => {
                let mut asg = vec![0usize; cond.var_count.max(1)];
                loop {
                    if alg.eval(&lhs, &asg)? != alg.eval(&rhs, &asg)? {
                        return Ok(VerifyOutcome::FailsStandard { equation: idx, assignment: asg });
                    }
                    if !next_tuple(&mut asg, alg.size()) {
                        break;
                    }
                }
            }
            EqFlavor::Commutator => {
                if let CommEqOutcome::Fails { theta, tuple } =
                    check_commutator_eq_with(&mut engine, &lhs, &rhs, None)?
                {
                    return Ok(VerifyOutcome::FailsCommutator { equation: idx, theta, tuple });
                }
            }
        }
    }
    Ok(VerifyOutcome::Holds)
}

// ---------------------------------------------------------------------------
// Witness search over generated subpowers
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SearchStats {
    /// Elements generated across all unknowns (budget consumed).
    pub generated: usize,
    /// Backtracking nodes explored.
    pub explored: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConditionWitness {
    pub assignments: BTreeMap<String, AlgTerm>,
    pub stats: SearchStats,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SearchOutcome {
    Witness(ConditionWitness),
    /// Exact: the relevant subpowers were fully enumerated and no assignment
    /// satisfies the equations.
    ProvenAbsent { stats: SearchStats },
}

impl SearchOutcome {
    pub fn witness(&self) -> Option<&ConditionWitness> {
        match self {
            SearchOutcome::Witness(w) => Some(w),
            SearchOutcome::ProvenAbsent { .. } => None,
        }
    }
}

fn flat_args(args: &[AlgTerm], what: &str) -> Result<Vec<usize>> {
    args.iter()
        .map(|a| match a {
            AlgTerm::Var(i) => Ok(*i),
            AlgTerm::App { .. } => Err(Error::Parse {
                pos: 0,
                msg: format!("{}: search requires symbols applied directly to variables", what),
            }),
        })
        .collect()
}

struct UnknownSlot {
    name: String,
    arity: usize,
    /// Sorted relevant coordinate tuples of `A^arity`.
    coords: Vec<Vec<usize>>,
    coord_index: HashMap<Vec<usize>, usize>,
    /// Projected generated subpower over the relevant coordinates.
    elements: Vec<Vec<usize>>,
    complete: bool,
    term_of: Vec<AlgTerm>,
    domain: Vec<usize>,
}

enum SideVal {
    Const(usize),
    Coord { slot: usize, coord: usize },
}

/// Searches for concrete terms of `alg` realising every unknown of a
/// standard-flavoured condition. `ProvenAbsent` is exact; running out of
/// budget is an error, distinguishing "absent under budget" from proof.
pub fn find_condition_witness(
    alg: &FiniteAlgebra,
    cond: &MalcevCondition,
    budget: Option<usize>,
) -> Result<SearchOutcome> {
    let budget = budget.unwrap_or(DEFAULT_SEARCH_ELEMENTS);
    cond.validate()?;
    if cond.equations.iter().any(|e| e.flavor == EqFlavor::Commutator) {
        return Err(Error::SearchOnCommutatorFlavor);
    }
    let n = alg.size();
    let mut stats = SearchStats::default();

    // Slot per unknown, in declaration order.
    let mut slot_of: BTreeMap<String, usize> = BTreeMap::new();
    let mut slots: Vec<UnknownSlot> = Vec::new();
    for sym in cond.unknowns() {
        slot_of.insert(sym.name.clone(), slots.len());
        slots.push(UnknownSlot {
            name: sym.name.clone(),
            arity: sym.arity,
            coords: Vec::new(),
            coord_index: HashMap::new(),
            elements: Vec::new(),
            complete: true,
            term_of: Vec::new(),
            domain: Vec::new(),
        });
    }

    // Collect the coordinates each unknown is read at.
    let mut coord_sets: Vec<BTreeSet<Vec<usize>>> = slots.iter().map(|_| BTreeSet::new()).collect();
    for eq in &cond.equations {
        for side in [&eq.lhs, &eq.rhs] {
            if let AlgTerm::App { symbol, args } = side {
                let Some(&slot) = slot_of.get(symbol.as_str()) else { continue };
                let args = flat_args(args, symbol)?;
                let mut distinct: Vec<usize> = args.clone();
                distinct.sort_unstable();
                distinct.dedup();
                let count = (n as u128).pow(distinct.len() as u32);
                if count > DEFAULT_TUPLE_BUDGET {
                    return Err(Error::BudgetExceeded { required: count, budget: DEFAULT_TUPLE_BUDGET });
                }
                let mut pick = vec![0usize; distinct.len()];
                loop {
                    let mut asg = vec![0usize; cond.var_count.max(1)];
                    for (v, &val) in distinct.iter().zip(&pick) {
                        asg[*v] = val;
                    }
                    coord_sets[slot].insert(args.iter().map(|&v| asg[v]).collect());
                    if !next_tuple(&mut pick, n) {
                        break;
                    }
                }
            }
        }
    }

    // Generate the projected subpower for each unknown that is read anywhere.
    for (slot, coords) in coord_sets.into_iter().enumerate() {
        let s = &mut slots[slot];
        s.coords = coords.into_iter().collect();
        s.coord_index = s.coords.iter().cloned().enumerate().map(|(i, c)| (c, i)).collect();
        if s.coords.is_empty() {
            continue;
        }
        let width = s.coords.len();
        let seeds: Vec<Vec<usize>> = (0..s.arity)
            .map(|j| s.coords.iter().map(|c| c[j]).collect())
            .collect();
        let (gen, complete) = generate_subpower_bounded(alg, width, &seeds, budget);
        stats.generated += gen.elements.len();
        s.complete = complete;
        s.term_of = (0..gen.elements.len()).map(|i| gen.term_for(alg, i)).collect();
        s.elements = gen.elements;
        s.domain = (0..s.elements.len()).collect();
    }

    // Turn every equation instance into unary or binary coordinate
    // constraints.
    let mut binary: BTreeMap<(usize, usize), Vec<(usize, usize)>> = BTreeMap::new();
    for eq in &cond.equations {
        let mut joint: Vec<usize> = Vec::new();
        for side in [&eq.lhs, &eq.rhs] {
            match side {
                AlgTerm::Var(i) => {
                    if !joint.contains(i) {
                        joint.push(*i);
                    }
                }
                AlgTerm::App { args, .. } => {
                    for a in flat_args(args, "side")? {
                        if !joint.contains(&a) {
                            joint.push(a);
                        }
                    }
                }
            }
        }
        joint.sort_unstable();
        let count = (n as u128).pow(joint.len() as u32);
        if count > DEFAULT_TUPLE_BUDGET {
            return Err(Error::BudgetExceeded { required: count, budget: DEFAULT_TUPLE_BUDGET });
        }
        let side_val = |side: &AlgTerm, asg: &[usize], slots: &[UnknownSlot]| -> Result<SideVal> {
            match side {
                AlgTerm::Var(i) => Ok(SideVal::Const(asg[*i])),
                AlgTerm::App { symbol, args } => {
                    let args = flat_args(args, symbol)?;
                    let sym = cond.symbol(symbol).expect("validated");
                    match sym.projection {
                        Some(coord) => Ok(SideVal::Const(asg[args[coord]])),
                        None => {
                            let slot = slot_of[symbol.as_str()];
                            let tuple: Vec<usize> = args.iter().map(|&v| asg[v]).collect();
                            let coord = slots[slot].coord_index[&tuple];
                            Ok(SideVal::Coord { slot, coord })
                        }
                    }
                }
            }
        };
        let mut pick = vec![0usize; joint.len()];
        loop {
            let mut asg = vec![0usize; cond.var_count.max(1)];
            for (v, &val) in joint.iter().zip(&pick) {
                asg[*v] = val;
            }
            let lv = side_val(&eq.lhs, &asg, &slots)?;
            let rv = side_val(&eq.rhs, &asg, &slots)?;
            match (lv, rv) {
                (SideVal::Const(x), SideVal::Const(y)) => {
                    if x != y {
                        // No assignment of terms can fix a projection clash.
                        return Ok(SearchOutcome::ProvenAbsent { stats });
                    }
                }
                (SideVal::Const(x), SideVal::Coord { slot, coord })
                | (SideVal::Coord { slot, coord }, SideVal::Const(x)) => {
                    let keep: Vec<usize> = slots[slot]
                        .domain
                        .iter()
                        .copied()
                        .filter(|&e| slots[slot].elements[e][coord] == x)
                        .collect();
                    slots[slot].domain = keep;
                }
                (SideVal::Coord { slot: s1, coord: c1 }, SideVal::Coord { slot: s2, coord: c2 }) => {
                    if s1 == s2 {
                        let keep: Vec<usize> = slots[s1]
                            .domain
                            .iter()
                            .copied()
                            .filter(|&e| slots[s1].elements[e][c1] == slots[s1].elements[e][c2])
                            .collect();
                        slots[s1].domain = keep;
                    } else if s1 < s2 {
                        binary.entry((s1, s2)).or_default().push((c1, c2));
                    } else {
                        binary.entry((s2, s1)).or_default().push((c2, c1));
                    }
                }
            }
            if !next_tuple(&mut pick, n) {
                break;
            }
        }
    }
    // Dedup accumulated binary constraint coordinates.
    for list in binary.values_mut() {
        list.sort_unstable();
        list.dedup();
    }

    let incomplete = slots.iter().any(|s| !s.complete);
    for s in &slots {
        if s.domain.is_empty() && !s.coords.is_empty() {
            if s.complete {
                return Ok(SearchOutcome::ProvenAbsent { stats });
            }
            return Err(Error::BudgetExceeded {
                required: budget as u128 + 1,
                budget: budget as u128,
            });
        }
    }

    // Arc consistency over the binary constraints.
    let compatible = |slots: &[UnknownSlot], s1: usize, e: usize, s2: usize, f: usize, list: &[(usize, usize)]| {
        list.iter().all(|&(c1, c2)| slots[s1].elements[e][c1] == slots[s2].elements[f][c2])
    };
    let mut changed = true;
    while changed {
        changed = false;
        for (&(s1, s2), list) in &binary {
            let dom2 = slots[s2].domain.clone();
            let keep: Vec<usize> = slots[s1]
                .domain
                .iter()
                .copied()
                .filter(|&e| dom2.iter().any(|&f| compatible(&slots, s1, e, s2, f, list)))
                .collect();
            if keep.len() != slots[s1].domain.len() {
                changed = true;
            }
            slots[s1].domain = keep;
            let dom1 = slots[s1].domain.clone();
            let keep: Vec<usize> = slots[s2]
                .domain
                .iter()
                .copied()
                .filter(|&f| dom1.iter().any(|&e| compatible(&slots, s1, e, s2, f, list)))
                .collect();
            if keep.len() != slots[s2].domain.len() {
                changed = true;
            }
            slots[s2].domain = keep;
        }
        for s in &slots {
            if s.domain.is_empty() && !s.coords.is_empty() {
                if !incomplete {
                    return Ok(SearchOutcome::ProvenAbsent { stats });
                }
                return Err(Error::BudgetExceeded {
                    required: budget as u128 + 1,
                    budget: budget as u128,
                });
            }
        }
    }

    // Backtracking in declaration order, least element first.
    fn backtrack(
        slots: &[UnknownSlot],
        binary: &BTreeMap<(usize, usize), Vec<(usize, usize)>>,
        chosen: &mut Vec<usize>,
        explored: &mut usize,
    ) -> bool {
        let k = chosen.len();
        if k == slots.len() {
            return true;
        }
        if slots[k].coords.is_empty() {
            // Unread unknown: any term will do, the first projection is used.
            chosen.push(usize::MAX);
            if backtrack(slots, binary, chosen, explored) {
                return true;
            }
            chosen.pop();
            return false;
        }
        'cand: for &e in &slots[k].domain {
            *explored += 1;
            for (&(s1, s2), list) in binary {
                if s2 == k && s1 < k && chosen[s1] != usize::MAX {
                    let e1 = chosen[s1];
                    if !list.iter().all(|&(c1, c2)| slots[s1].elements[e1][c1] == slots[k].elements[e][c2]) {
                        continue 'cand;
                    }
                }
                if s1 == k && s2 < k && chosen[s2] != usize::MAX {
                    let e2 = chosen[s2];
                    if !list.iter().all(|&(c1, c2)| slots[k].elements[e][c1] == slots[s2].elements[e2][c2]) {
                        continue 'cand;
                    }
                }
            }
            chosen.push(e);
            if backtrack(slots, binary, chosen, explored) {
                return true;
            }
            chosen.pop();
        }
        false
    }

    let mut chosen = Vec::new();
    if backtrack(&slots, &binary, &mut chosen, &mut stats.explored) {
        let mut assignments = BTreeMap::new();
        for (slot, &e) in slots.iter().zip(&chosen) {
            let term = if e == usize::MAX {
                if slot.arity == 0 {
                    return Err(Error::Parse {
                        pos: 0,
                        msg: format!("unknown {} is nullary and unconstrained", slot.name),
                    });
                }
                AlgTerm::Var(0)
            } else {
                slot.term_of[e].clone()
            };
            assignments.insert(slot.name.clone(), term);
        }
        let witness = ConditionWitness { assignments, stats };
        // Soundness: a returned witness must re-verify by direct evaluation.
        let check = verify_condition(alg, cond, &witness.assignments)?;
        assert!(check.holds(), "witness failed re-verification: {:?}", check);
        return Ok(SearchOutcome::Witness(witness));
    }
    if incomplete {
        return Err(Error::BudgetExceeded { required: budget as u128 + 1, budget: budget as u128 });
    }
    Ok(SearchOutcome::ProvenAbsent { stats })
}

/// The two-equation, two-variable system chaining the three 6-ary patterns.
pub fn olsak_condition() -> MalcevCondition {
    let t = |pattern: [usize; 6]| AlgTerm::App {
        symbol: "t".into(),
        args: pattern.iter().map(|&i| AlgTerm::Var(i)).collect(),
    };
    // x = x1, y = x2.
    let p1 = t([0, 1, 1, 1, 0, 0]);
    let p2 = t([1, 0, 1, 0, 1, 0]);
    let p3 = t([1, 1, 0, 0, 0, 1]);
    MalcevCondition {
        var_count: 2,
        symbols: vec![crate::pwgen::CondSymbol { name: "t".into(), arity: 6, projection: None }],
        equations: vec![
            CondEquation { lhs: p1, rhs: p2.clone(), relvar: "olsak1".into(), flavor: EqFlavor::Standard },
            CondEquation { lhs: p2, rhs: p3, relvar: "olsak2".into(), flavor: EqFlavor::Standard },
        ],
    }
}

/// Searches for a 6-ary term satisfying the three-pattern identities.
pub fn has_olsak_term(alg: &FiniteAlgebra, budget: Option<usize>) -> Result<SearchOutcome> {
    find_condition_witness(alg, &olsak_condition(), budget)
}

// ---------------------------------------------------------------------------
// The Taylor congruence equations
// ---------------------------------------------------------------------------

/// Which right-hand side the 12-variable Taylor equation carries.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TaylorEq {
    /// Plain lattice form: the `θ_i` are meets of joins, τ is `⋀(αi ∨ βi)`.
    Plain,
    /// The commutator form: `[τ,τ] ∘ (R-join)` inside each `θ_i`.
    Commutator,
    /// The herringbone form at level `n`: `(⋀₅(αi∨βi) ∧ β6ⁿ) ∘ (R-join)`.
    Herringbone(usize),
}

const TAYLOR_L: [usize; 3] = [1, 5, 6];
const TAYLOR_LP: [usize; 3] = [2, 3, 4];
const TAYLOR_R1: [usize; 3] = [2, 4, 6];
const TAYLOR_R1P: [usize; 3] = [1, 3, 5];
const TAYLOR_R2: [usize; 3] = [3, 4, 5];
const TAYLOR_R2P: [usize; 3] = [1, 2, 6];

fn avar(i: usize) -> RelTerm {
    RelTerm::var(format!("a{}", i))
}

fn bvar(i: usize) -> RelTerm {
    RelTerm::var(format!("b{}", i))
}

fn fold_join(terms: Vec<RelTerm>) -> RelTerm {
    let mut it = terms.into_iter();
    let first = it.next().expect("nonempty");
    it.fold(first, RelTerm::join)
}

fn fold_meet(terms: Vec<RelTerm>) -> RelTerm {
    let mut it = terms.into_iter();
    let first = it.next().expect("nonempty");
    it.fold(first, RelTerm::meet)
}

fn side_join(alphas: &[usize], betas: &[usize]) -> RelTerm {
    let mut terms: Vec<RelTerm> = alphas.iter().map(|&i| avar(i)).collect();
    terms.extend(betas.iter().map(|&i| bvar(i)));
    fold_join(terms)
}

/// Builds `(lhs, rhs)` of the chosen Taylor congruence equation, over the
/// variables `a1..a6, b1..b6`.
pub fn taylor_equation(which: TaylorEq) -> (RelTerm, RelTerm) {
    let lhs = fold_meet((1..=6).map(|i| RelTerm::comp(avar(i), bvar(i))).collect());
    let tau = fold_meet((1..=6).map(|i| RelTerm::join(avar(i), bvar(i))).collect());
    let theta = |r: &[usize; 3], rp: &[usize; 3]| -> RelTerm {
        let left = side_join(&TAYLOR_L, &TAYLOR_LP);
        let right = side_join(r, rp);
        let right = match which {
            TaylorEq::Plain => right,
            TaylorEq::Commutator => {
                RelTerm::comp(RelTerm::comm(tau.clone(), tau.clone()), right)
            }
            TaylorEq::Herringbone(n) => {
                let w5 = fold_meet((1..=5).map(|i| RelTerm::join(avar(i), bvar(i))).collect());
                let beta6n = herringbone_subst(n, &w5, &bvar(6), &avar(6));
                RelTerm::comp(RelTerm::meet(w5, beta6n), right)
            }
        };
        RelTerm::meet(left, right)
    };
    let theta1 = theta(&TAYLOR_R1, &TAYLOR_R1P);
    let theta2 = theta(&TAYLOR_R2, &TAYLOR_R2P);
    let guard = RelTerm::meet(
        RelTerm::join(tau.clone(), theta1),
        RelTerm::join(tau.clone(), theta2),
    );
    let join_a = fold_join((1..=6).map(avar).collect());
    let join_b = fold_join((1..=6).map(bvar).collect());
    let rhs = RelTerm::join(
        RelTerm::meet(join_a, guard.clone()),
        RelTerm::meet(join_b, guard),
    );
    (lhs, rhs)
}

/// `y^n(x, y, z)` with the three slots substituted.
pub fn herringbone_subst(n: usize, x: &RelTerm, y: &RelTerm, z: &RelTerm) -> RelTerm {
    let mut m = BTreeMap::new();
    m.insert("x".to_string(), x.clone());
    m.insert("y".to_string(), y.clone());
    m.insert("z".to_string(), z.clone());
    herringbone(n).substitute(&m).expect("herringbone variables are x, y, z")
}

/// Evaluates the chosen Taylor equation under explicit congruences.
pub fn check_taylor_eq(
    alg: &FiniteAlgebra,
    alphas: &[Partition; 6],
    betas: &[Partition; 6],
    which: TaylorEq,
) -> Result<InclusionOutcome> {
    let (lhs, rhs) = taylor_equation(which);
    let mut assignment = BTreeMap::new();
    for i in 1..=6 {
        assignment.insert(format!("a{}", i), alphas[i - 1].to_binrel());
        assignment.insert(format!("b{}", i), betas[i - 1].to_binrel());
    }
    let mut engine = CommutatorEngine::new(alg);
    check_inclusion_with(&mut engine, &lhs, &rhs, &assignment)
}

// ---------------------------------------------------------------------------
// Structured reports
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, Serialize)]
pub struct ReportCheck {
    pub name: String,
    pub verdict: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<serde_json::Value>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ReportTimings {
    pub total_ms: u128,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub scenario: String,
    pub inputs: serde_json::Value,
    pub checks: Vec<ReportCheck>,
    pub timings: ReportTimings,
}

impl Report {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.verdict)
    }

    pub fn check(&self, name: &str) -> Option<bool> {
        self.checks.iter().find(|c| c.name == name).map(|c| c.verdict)
    }

    pub fn render(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization cannot fail")
    }
}

// ---------------------------------------------------------------------------
// The 8-element counterexample scenario
// ---------------------------------------------------------------------------

/// Reproduces the 8-element projections-only construction showing the
/// herringbone-level Taylor equation is non-trivial: with `a = 0`, `b = 1`,
/// `c_i = i + 1`, the pair `(a,b)` lies in the left side but never in the
/// right side, for every requested herringbone level.
pub fn scenario_taylor_counterexample(n_values: &[usize]) -> Result<Report> {
    let started = Instant::now();
    let alg = FiniteAlgebra::set_algebra(8)?;
    let a = 0usize;
    let b = 1usize;
    let c = |i: usize| i + 1;
    let alphas: Vec<Partition> = (1..=6).map(|i| Partition::from_pairs(8, &[(a, c(i))])).collect();
    let betas: Vec<Partition> = (1..=6).map(|i| Partition::from_pairs(8, &[(b, c(i))])).collect();

    let mut checks = Vec::new();
    let mut engine = CommutatorEngine::new(&alg);
    let mut assignment = BTreeMap::new();
    for i in 1..=6 {
        assignment.insert(format!("a{}", i), alphas[i - 1].to_binrel());
        assignment.insert(format!("b{}", i), betas[i - 1].to_binrel());
    }

    // (a,b) is in the left side.
    let lhs = fold_meet((1..=6).map(|i| RelTerm::comp(avar(i), bvar(i))).collect());
    let lhs_val = crate::relcalc::eval_relterm_with(&mut engine, &lhs, &assignment)?;
    checks.push(ReportCheck {
        name: "pair-in-lhs".into(),
        verdict: lhs_val.contains(a, b),
        witness: Some(json!([a, b])),
    });

    // β6ⁿ = β6 for each requested n, and ⋀₅(αi ∨ βi) ∧ β6ⁿ = 0.
    let w5 = fold_meet((1..=5).map(|i| RelTerm::join(avar(i), bvar(i))).collect());
    let w5_val = crate::relcalc::eval_relterm_with(&mut engine, &w5, &assignment)?
        .as_partition()
        .expect("meet of congruences");
    for &n in n_values {
        let term = herringbone_subst(n, &w5, &bvar(6), &avar(6));
        let val = crate::relcalc::eval_relterm_with(&mut engine, &term, &assignment)?
            .as_partition()
            .expect("herringbone value is a congruence");
        checks.push(ReportCheck {
            name: format!("beta6^{}-equals-beta6", n),
            verdict: val == betas[5],
            witness: Some(json!(val.to_string())),
        });
        checks.push(ReportCheck {
            name: format!("meet5-with-beta6^{}-is-identity", n),
            verdict: w5_val.meet(&val).is_identity(),
            witness: None,
        });
    }

    // Join classes.
    let join_a = alphas.iter().fold(Partition::identity(8), |acc, p| acc.join(p));
    let join_b = betas.iter().fold(Partition::identity(8), |acc, p| acc.join(p));
    checks.push(ReportCheck {
        name: "join-alpha-classes".into(),
        verdict: join_a == Partition::from_blocks(8, &[vec![0, 2, 3, 4, 5, 6, 7], vec![1]]).unwrap(),
        witness: Some(json!(join_a.to_string())),
    });
    checks.push(ReportCheck {
        name: "join-beta-classes".into(),
        verdict: join_b == Partition::from_blocks(8, &[vec![1, 2, 3, 4, 5, 6, 7], vec![0]]).unwrap(),
        witness: Some(json!(join_b.to_string())),
    });

    // (a,b) is not in the right side of the herringbone equation, and no
    // (a,c_j) or (c_j,b) survives the τ∨θ guard.
    for &n in n_values {
        let (_, rhs) = taylor_equation(TaylorEq::Herringbone(n));
        let rhs_val = crate::relcalc::eval_relterm_with(&mut engine, &rhs, &assignment)?;
        checks.push(ReportCheck {
            name: format!("pair-not-in-rhs-n{}", n),
            verdict: !rhs_val.contains(a, b),
            witness: Some(json!([a, b])),
        });

        let tau = fold_meet((1..=6).map(|i| RelTerm::join(avar(i), bvar(i))).collect());
        let theta = |r: &[usize; 3], rp: &[usize; 3]| {
            let left = side_join(&TAYLOR_L, &TAYLOR_LP);
            let beta6n = herringbone_subst(n, &w5, &bvar(6), &avar(6));
            let right = RelTerm::comp(RelTerm::meet(w5.clone(), beta6n), side_join(r, rp));
            RelTerm::meet(left, right)
        };
        let guard = RelTerm::meet(
            RelTerm::join(tau.clone(), theta(&TAYLOR_R1, &TAYLOR_R1P)),
            RelTerm::join(tau, theta(&TAYLOR_R2, &TAYLOR_R2P)),
        );
        let guard_val = crate::relcalc::eval_relterm_with(&mut engine, &guard, &assignment)?;
        let clean = (1..=6).all(|j| !guard_val.contains(a, c(j)) && !guard_val.contains(c(j), b));
        checks.push(ReportCheck {
            name: format!("guard-separates-c-elements-n{}", n),
            verdict: clean,
            witness: None,
        });
    }

    let aliases: BTreeMap<String, usize> = {
        let mut m = BTreeMap::new();
        m.insert("a".to_string(), a);
        m.insert("b".to_string(), b);
        for i in 1..=6 {
            m.insert(format!("c{}", i), c(i));
        }
        m
    };
    Ok(Report {
        scenario: "taylor-counterexample".into(),
        inputs: json!({
            "size": 8,
            "aliases": aliases,
            "n_values": n_values,
        }),
        checks,
        timings: ReportTimings { total_ms: started.elapsed().as_millis() },
    })
}

// ---------------------------------------------------------------------------
// Failure on the 3-element set, Thm-level checks
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThreeSetFailure {
    pub assignment: BTreeMap<String, Partition>,
    pub witness: (usize, usize),
}

/// Exhaustively assigns equivalences with pairwise trivial meets on the
/// 3-element set to the variables of `p ≤ q`; the first failing assignment
/// (in lattice enumeration order) is returned.
pub fn check_fails_on_3set(p: &RelTerm, q: &RelTerm) -> Result<Option<ThreeSetFailure>> {
    let alg = FiniteAlgebra::set_algebra(3)?;
    let lattice = con_lattice(&alg)?;
    let mut vars = p.variables();
    for v in q.variables() {
        if !vars.contains(&v) {
            vars.push(v);
        }
    }
    let rels: Vec<BinRel> = lattice.iter().map(|x| x.to_binrel()).collect();
    let mut engine = CommutatorEngine::new(&alg);
    let mut choice = vec![0usize; vars.len()];
    loop {
        let pairwise_trivial = (0..vars.len()).all(|i| {
            (i + 1..vars.len()).all(|j| lattice[choice[i]].meet(&lattice[choice[j]]).is_identity())
        });
        if pairwise_trivial {
            let assignment: BTreeMap<String, BinRel> = vars
                .iter()
                .zip(&choice)
                .map(|(v, &i)| (v.clone(), rels[i].clone()))
                .collect();
            if let InclusionOutcome::Fails { witness } =
                check_inclusion_with(&mut engine, p, q, &assignment)?
            {
                let named = vars
                    .iter()
                    .zip(&choice)
                    .map(|(v, &i)| (v.clone(), lattice[i].clone()))
                    .collect();
                return Ok(Some(ThreeSetFailure { assignment: named, witness }));
            }
        }
        if !next_tuple(&mut choice, lattice.len()) {
            break;
        }
    }
    Ok(None)
}

/// Which correction terms the primed congruences of the theorem-level check
/// carry: the two-commutator family, or the four-herringbone family at
/// level `n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Thm53Variant {
    Commutator,
    Herringbone(usize),
}

impl Thm53Variant {
    pub fn choice_count(&self) -> usize {
        match self {
            Thm53Variant::Commutator => 2,
            Thm53Variant::Herringbone(_) => 4,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Thm53Result {
    pub choices: [usize; 3],
    pub outcome: InclusionOutcome,
}

/// Correction-term menu for slot arguments `(t, u, d)`.
fn correction_options(variant: Thm53Variant, t: &RelTerm, u: &RelTerm, d: &RelTerm) -> Vec<RelTerm> {
    match variant {
        Thm53Variant::Commutator => {
            let first = RelTerm::meet(u.clone(), RelTerm::join(t.clone(), d.clone()));
            let second = RelTerm::meet(d.clone(), RelTerm::join(t.clone(), u.clone()));
            vec![
                RelTerm::comm(first.clone(), first),
                RelTerm::comm(second.clone(), second),
            ]
        }
        Thm53Variant::Herringbone(n) => vec![
            RelTerm::meet(u.clone(), herringbone_subst(n, u, t, d)),
            RelTerm::meet(u.clone(), herringbone_subst(n, u, d, t)),
            RelTerm::meet(d.clone(), herringbone_subst(n, d, u, t)),
            RelTerm::meet(d.clone(), herringbone_subst(n, d, t, u)),
        ],
    }
}

/// Checks `a ∧ (b ∘ g) ≤ p(a', b', g')` where each primed variable is the
/// base congruence composed around a chosen correction term. `choice`
/// restricts to one option per slot; `None` runs every combination.
pub fn check_thm53_eq(
    alg: &FiniteAlgebra,
    variant: Thm53Variant,
    p: &RelTerm,
    alpha: &Partition,
    beta: &Partition,
    gamma: &Partition,
    choice: Option<[usize; 3]>,
) -> Result<Vec<Thm53Result>> {
    let (a, b, g) = (RelTerm::var("a"), RelTerm::var("b"), RelTerm::var("g"));
    // Slot argument orders follow the two displayed equation families; the
    // third slot swaps u and d between the commutator and herringbone forms.
    let alpha_opts = correction_options(variant, &a, &b, &g);
    let beta_opts = correction_options(variant, &b, &a, &g);
    let gamma_opts = match variant {
        Thm53Variant::Commutator => correction_options(variant, &g, &a, &b),
        Thm53Variant::Herringbone(_) => correction_options(variant, &g, &b, &a),
    };
    let m = variant.choice_count();
    let combos: Vec<[usize; 3]> = match choice {
        Some(c) => {
            if c.iter().any(|&i| i >= m) {
                return Err(Error::Parse { pos: 0, msg: format!("choices must be below {}", m) });
            }
            vec![c]
        }
        None => {
            let mut all = Vec::with_capacity(m * m * m);
            for i in 0..m {
                for j in 0..m {
                    for k in 0..m {
                        all.push([i, j, k]);
                    }
                }
            }
            all
        }
    };

    let lhs = RelTerm::meet(a.clone(), RelTerm::comp(b.clone(), g.clone()));
    let mut assignment = BTreeMap::new();
    assignment.insert("a".to_string(), alpha.to_binrel());
    assignment.insert("b".to_string(), beta.to_binrel());
    assignment.insert("g".to_string(), gamma.to_binrel());
    let mut engine = CommutatorEngine::new(alg);

    let mut results = Vec::with_capacity(combos.len());
    for combo in combos {
        let primed = |base: &RelTerm, correction: &RelTerm| {
            RelTerm::comp(RelTerm::comp(base.clone(), correction.clone()), base.clone())
        };
        let mut subst = BTreeMap::new();
        subst.insert("a".to_string(), primed(&a, &alpha_opts[combo[0]]));
        subst.insert("b".to_string(), primed(&b, &beta_opts[combo[1]]));
        subst.insert("g".to_string(), primed(&g, &gamma_opts[combo[2]]));
        let rhs = p.substitute(&subst)?;
        let outcome = check_inclusion_with(&mut engine, &lhs, &rhs, &assignment)?;
        results.push(Thm53Result { choices: combo, outcome });
    }
    Ok(results)
}

/// Evidence for the herringbone lemma on one congruence triple.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HerringboneOutcome {
    /// `δ = ⋃ₙ (α ∧ βⁿ)`, the stabilised meet chain.
    pub delta: Partition,
    /// `[α ∧ (β ∨ γ), α ∧ (β ∨ γ)]`.
    pub commutator: Partition,
    pub holds: bool,
    /// Levels taken until the chain pair stabilised.
    pub steps: usize,
}

/// Computes the herringbone chains `βⁿ = yⁿ(α,β,γ)`, `γⁿ = yⁿ(α,γ,β)` on
/// partitions until both stabilise, forms `δ`, and checks
/// `[α∧(β∨γ), α∧(β∨γ)] ≤ δ`.
pub fn check_herringbone_lemma(
    alg: &FiniteAlgebra,
    alpha: &Partition,
    beta: &Partition,
    gamma: &Partition,
) -> Result<HerringboneOutcome> {
    let mut u = beta.clone();
    let mut v = gamma.clone();
    let mut steps = 0;
    let bound = alg.size() * alg.size();
    loop {
        // y^{n+1}(x,y,z) = y ∨ (x ∧ y^n(x,z,y)): the two argument-swapped
        // chains feed each other.
        let nu = beta.join(&alpha.meet(&v));
        let nv = gamma.join(&alpha.meet(&u));
        steps += 1;
        if (nu == u && nv == v) || steps > bound {
            break;
        }
        u = nu;
        v = nv;
    }
    let delta = alpha.meet(&u);
    let scope = alpha.meet(&beta.join(gamma));
    let comm = CommutatorEngine::new(alg).commutator(&scope, &scope)?;
    let holds = comm.leq(&delta);
    Ok(HerringboneOutcome { delta, commutator: comm, holds, steps })
}
