//! The Pixley-Wille construction: from a congruence inclusion `p ≤ q` to a
//! strong Mal'cev condition over unknown function symbols, in the standard
//! flavour (term equations) and the commutator flavour (the same skeletons
//! read as commutator equations).
//!
//! Terms `t1, t2` are bound to the projections onto `x1` and onto the end
//! vertex of `G(p)` — which the graph construction keeps as `x2`. Remaining
//! vertices of `G(q)` become unknown `n`-ary symbols `t3, t4, ...` in vertex
//! creation order, where `n` is the vertex count of `G(p)`.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::algebra::AlgTerm;
use crate::error::{Error, Result};
use crate::rel::UnionFind;
use crate::termgraph::{build_graph, LabelledGraph};
use crate::termlang::RelTerm;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EqFlavor {
    Standard,
    Commutator,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CondSymbol {
    pub name: String,
    pub arity: usize,
    /// `Some(i)`: the symbol is bound to the projection onto coordinate `i`
    /// (0-based). `None`: an unknown the condition quantifies over.
    pub projection: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CondEquation {
    pub lhs: AlgTerm,
    pub rhs: AlgTerm,
    pub relvar: String,
    pub flavor: EqFlavor,
}

/// A strong Mal'cev condition: a symbol table and a list of equations over
/// variables `x1..xn`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MalcevCondition {
    pub var_count: usize,
    pub symbols: Vec<CondSymbol>,
    pub equations: Vec<CondEquation>,
}

/// `T_s(p)`: for each relation variable of `p`, the edges of `G(p)` carrying
/// that label, as vertex index pairs.
pub fn edge_sets(p: &RelTerm) -> Result<BTreeMap<String, Vec<(usize, usize)>>> {
    let g = build_graph(p)?;
    Ok(edge_sets_of(&g))
}

fn edge_sets_of(g: &LabelledGraph) -> BTreeMap<String, Vec<(usize, usize)>> {
    let mut out: BTreeMap<String, Vec<(usize, usize)>> = BTreeMap::new();
    for e in &g.edges {
        out.entry(e.var_label().expect("final graph").to_string())
            .or_default()
            .push((e.src, e.dst));
    }
    out
}

/// The canonical transversal of `Eqv(T)` on `n` variables: every variable
/// maps to the least-index member of its class.
pub fn transversal(pairs: &[(usize, usize)], n: usize) -> Vec<usize> {
    let mut uf = UnionFind::new(n);
    for &(a, b) in pairs {
        uf.union(a, b);
    }
    (0..n).map(|v| uf.find(v)).collect()
}

/// `Eq(p ≤ q)`: the standard Pixley-Wille equations. If `q` contains a join
/// it is first folded to the alternating product `q^(k)`.
pub fn eq_standard(p: &RelTerm, q: &RelTerm, k: Option<usize>) -> Result<MalcevCondition> {
    emit(p, q, k, EqFlavor::Standard)
}

/// `Eq_C(p ≤ q)`: identical term skeletons, every equation flagged `≈_C`.
pub fn eq_commutator(p: &RelTerm, q: &RelTerm, k: Option<usize>) -> Result<MalcevCondition> {
    emit(p, q, k, EqFlavor::Commutator)
}

fn emit(p: &RelTerm, q: &RelTerm, k: Option<usize>, flavor: EqFlavor) -> Result<MalcevCondition> {
    let q_folded;
    let q_eff = if q.is_join_free() {
        q
    } else {
        let k = k.ok_or(Error::MissingJoinDepth)?;
        q_folded = q.expand_join(k);
        &q_folded
    };
    let gp = build_graph(p)?;
    let gq = build_graph(q_eff)?;
    let n = gp.vertex_count;

    let mut symbols = vec![
        CondSymbol { name: "t1".into(), arity: n, projection: Some(0) },
        CondSymbol { name: "t2".into(), arity: n, projection: Some(1) },
    ];
    for v in 2..gq.vertex_count {
        symbols.push(CondSymbol { name: format!("t{}", v + 1), arity: n, projection: None });
    }

    // Relation variables in first-occurrence order across p then q.
    let mut relvars = p.variables();
    for v in q_eff.variables() {
        if !relvars.contains(&v) {
            relvars.push(v);
        }
    }

    let tp = edge_sets_of(&gp);
    let tq = edge_sets_of(&gq);
    let side = |vertex: usize, sigma: &[usize]| -> AlgTerm {
        match vertex {
            0 => AlgTerm::Var(sigma[0]),
            1 => AlgTerm::Var(sigma[1]),
            v => AlgTerm::App {
                symbol: format!("t{}", v + 1),
                args: sigma.iter().map(|&i| AlgTerm::Var(i)).collect(),
            },
        }
    };

    let mut equations = Vec::new();
    let mut seen: BTreeSet<(String, String, String)> = BTreeSet::new();
    for s in &relvars {
        let t_s = tp.get(s).cloned().unwrap_or_default();
        let sigma = transversal(&t_s, n);
        for &(i, j) in tq.get(s).map(|v| v.as_slice()).unwrap_or(&[]) {
            let lhs = side(i, &sigma);
            let rhs = side(j, &sigma);
            if lhs == rhs {
                continue;
            }
            let (a, b) = (lhs.to_string(), rhs.to_string());
            let key = if a <= b {
                (s.clone(), a, b)
            } else {
                (s.clone(), b, a)
            };
            if seen.insert(key) {
                equations.push(CondEquation { lhs, rhs, relvar: s.clone(), flavor });
            }
        }
    }
    Ok(MalcevCondition { var_count: n, symbols, equations })
}

impl MalcevCondition {
    pub fn unknowns(&self) -> impl Iterator<Item = &CondSymbol> {
        self.symbols.iter().filter(|s| s.projection.is_none())
    }

    pub fn symbol(&self, name: &str) -> Option<&CondSymbol> {
        self.symbols.iter().find(|s| s.name == name)
    }

    /// One equation per line, `≈` for standard and `≈_C` for commutator.
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        for eq in &self.equations {
            let rel = match eq.flavor {
                EqFlavor::Standard => "≈",
                EqFlavor::Commutator => "≈_C",
            };
            out.push_str(&format!("{} {} {}\n", eq.lhs, rel, eq.rhs));
        }
        out
    }

    /// The machine-readable JSON document; key order is fixed by the struct
    /// layout, so output is byte-stable.
    pub fn render_machine(&self) -> String {
        serde_json::to_string_pretty(&MachineCondition::from(self)).expect("serialization cannot fail")
    }

    pub fn parse_machine(text: &str) -> Result<MalcevCondition> {
        let doc: MachineCondition = serde_json::from_str(text)
            .map_err(|e| Error::Parse { pos: 0, msg: format!("condition document: {}", e) })?;
        doc.into_condition()
    }
}

#[derive(Serialize, Deserialize)]
struct MachineCondition {
    n: usize,
    symbols: Vec<MachineSymbol>,
    equations: Vec<MachineEquation>,
}

#[derive(Serialize, Deserialize)]
struct MachineSymbol {
    name: String,
    arity: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    projection: Option<usize>,
}

#[derive(Serialize, Deserialize)]
struct MachineEquation {
    lhs: String,
    rhs: String,
    relvar: String,
    flavor: EqFlavor,
}

impl From<&MalcevCondition> for MachineCondition {
    fn from(c: &MalcevCondition) -> Self {
        MachineCondition {
            n: c.var_count,
            symbols: c
                .symbols
                .iter()
                .map(|s| MachineSymbol {
                    name: s.name.clone(),
                    arity: s.arity,
                    // 1-based in the document, matching x1..xn.
                    projection: s.projection.map(|i| i + 1),
                })
                .collect(),
            equations: c
                .equations
                .iter()
                .map(|e| MachineEquation {
                    lhs: e.lhs.to_string(),
                    rhs: e.rhs.to_string(),
                    relvar: e.relvar.clone(),
                    flavor: e.flavor,
                })
                .collect(),
        }
    }
}

impl MachineCondition {
    fn into_condition(self) -> Result<MalcevCondition> {
        let symbols: Vec<CondSymbol> = self
            .symbols
            .into_iter()
            .map(|s| {
                let projection = match s.projection {
                    Some(0) => {
                        return Err(Error::Parse { pos: 0, msg: "projection coordinates are 1-based".into() })
                    }
                    Some(i) => Some(i - 1),
                    None => None,
                };
                Ok(CondSymbol { name: s.name, arity: s.arity, projection })
            })
            .collect::<Result<_>>()?;
        let mut equations = Vec::new();
        for e in self.equations {
            equations.push(CondEquation {
                lhs: AlgTerm::parse(&e.lhs)?,
                rhs: AlgTerm::parse(&e.rhs)?,
                relvar: e.relvar,
                flavor: e.flavor,
            });
        }
        let cond = MalcevCondition { var_count: self.n, symbols, equations };
        cond.validate()?;
        Ok(cond)
    }
}

impl MalcevCondition {
    /// Every equation must stay inside `x1..xn` and apply known symbols at
    /// the declared arity.
    pub fn validate(&self) -> Result<()> {
        for eq in &self.equations {
            for term in [&eq.lhs, &eq.rhs] {
                self.validate_term(term)?;
            }
        }
        Ok(())
    }

    fn validate_term(&self, term: &AlgTerm) -> Result<()> {
        match term {
            AlgTerm::Var(i) => {
                if *i >= self.var_count {
                    return Err(Error::UnboundVariable(format!("x{}", i + 1)));
                }
                Ok(())
            }
            AlgTerm::App { symbol, args } => {
                let sym = self
                    .symbol(symbol)
                    .ok_or_else(|| Error::UnboundSymbol(symbol.clone()))?;
                if sym.arity != args.len() {
                    return Err(Error::ArityMismatch {
                        symbol: symbol.clone(),
                        expected: sym.arity,
                        found: args.len(),
                    });
                }
                args.iter().try_for_each(|a| self.validate_term(a))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn term(s: &str) -> RelTerm {
        RelTerm::parse(s).unwrap()
    }

    fn eq_strings(c: &MalcevCondition) -> Vec<(String, String, String)> {
        c.equations
            .iter()
            .map(|e| (e.lhs.to_string(), e.rhs.to_string(), e.relvar.clone()))
            .collect()
    }

    #[test]
    fn edge_sets_examples() {
        let m = edge_sets(&term("X1 o X2")).unwrap();
        assert_eq!(m["X1"], vec![(0, 2)]);
        assert_eq!(m["X2"], vec![(2, 1)]);
        let m = edge_sets(&term("X1 ^ X2")).unwrap();
        assert_eq!(m["X1"], vec![(0, 1)]);
        assert_eq!(m["X2"], vec![(0, 1)]);
        let m = edge_sets(&term("X1 o (X2 ^ X3)")).unwrap();
        assert_eq!(m["X2"], vec![(2, 1)]);
        assert_eq!(m["X3"], vec![(2, 1)]);
    }

    #[test]
    fn transversal_examples() {
        assert_eq!(transversal(&[(0, 2)], 3), vec![0, 1, 0]);
        assert_eq!(transversal(&[], 3), vec![0, 1, 2]);
        assert_eq!(transversal(&[(0, 1), (1, 2)], 3), vec![0, 0, 0]);
    }

    #[test]
    fn malcev_instance() {
        let c = eq_standard(&term("a o b"), &term("b o a"), None).unwrap();
        assert_eq!(c.var_count, 3);
        assert_eq!(c.unknowns().count(), 1);
        assert_eq!(
            eq_strings(&c),
            vec![
                ("t3(x1,x2,x1)".to_string(), "x2".to_string(), "a".to_string()),
                ("x1".to_string(), "t3(x1,x2,x2)".to_string(), "b".to_string()),
            ]
        );
        assert!(c.equations.iter().all(|e| e.flavor == EqFlavor::Standard));
    }

    #[test]
    fn majority_instance() {
        let c = eq_standard(&term("a ^ (b o g)"), &term("(a ^ b) o (a ^ g)"), None).unwrap();
        assert_eq!(c.var_count, 3);
        assert_eq!(c.unknowns().count(), 1);
        // Two α-edges collapse to a single equation; β and γ give one each.
        assert_eq!(
            eq_strings(&c),
            vec![
                ("x1".to_string(), "t3(x1,x1,x3)".to_string(), "a".to_string()),
                ("x1".to_string(), "t3(x1,x2,x1)".to_string(), "b".to_string()),
                ("t3(x1,x2,x2)".to_string(), "x2".to_string(), "g".to_string()),
            ]
        );
    }

    #[test]
    fn reflexive_inclusion_is_trivial() {
        let c = eq_standard(&term("a"), &term("a"), None).unwrap();
        assert_eq!(c.var_count, 2);
        assert_eq!(c.unknowns().count(), 0);
        assert!(c.equations.is_empty());
    }

    #[test]
    fn commutator_flavor_same_skeletons() {
        let p = term("a o b");
        let q = term("b o a");
        let s = eq_standard(&p, &q, None).unwrap();
        let c = eq_commutator(&p, &q, None).unwrap();
        assert_eq!(eq_strings(&s), eq_strings(&c));
        assert!(c.equations.iter().all(|e| e.flavor == EqFlavor::Commutator));
    }

    #[test]
    fn join_requires_depth() {
        let p = term("a ^ (b o g)");
        let q = term("(a ^ b) v (a ^ g)");
        assert_eq!(eq_standard(&p, &q, None), Err(Error::MissingJoinDepth));
        let c = eq_standard(&p, &q, Some(3)).unwrap();
        // q^(3) = (a^b) o (a^g) o (a^b): four vertices, two unknowns.
        assert_eq!(c.var_count, 3);
        assert_eq!(c.unknowns().count(), 2);
    }

    #[test]
    fn variable_count_law() {
        for (p, q) in [("a o b", "b o a"), ("a o b o g", "g o a"), ("a ^ (b o g)", "b")] {
            let p = term(p);
            let comps = count_comps(&p);
            let c = eq_standard(&p, &term(q), None).unwrap();
            assert_eq!(c.var_count, 2 + comps);
        }
    }

    fn count_comps(t: &RelTerm) -> usize {
        match t {
            RelTerm::Var(_) => 0,
            RelTerm::Comp(l, r) => 1 + count_comps(l) + count_comps(r),
            RelTerm::Meet(l, r) | RelTerm::Join(l, r) | RelTerm::Comm(l, r) => {
                count_comps(l) + count_comps(r)
            }
        }
    }

    #[test]
    fn machine_roundtrip_and_stability() {
        let c = eq_commutator(&term("a o b"), &term("b o a"), None).unwrap();
        let doc = c.render_machine();
        assert_eq!(doc, c.render_machine());
        let back = MalcevCondition::parse_machine(&doc).unwrap();
        assert_eq!(back, c);
        // Key order is fixed.
        let n_pos = doc.find("\"n\"").unwrap();
        let sym_pos = doc.find("\"symbols\"").unwrap();
        let eq_pos = doc.find("\"equations\"").unwrap();
        assert!(n_pos < sym_pos && sym_pos < eq_pos);
    }

    #[test]
    fn render_text_flavors() {
        let c = eq_commutator(&term("a o b"), &term("b o a"), None).unwrap();
        let text = c.render_text();
        assert_eq!(text.lines().count(), 2);
        assert!(text.lines().all(|l| l.contains("≈_C")));
        let s = eq_standard(&term("a o b"), &term("b o a"), None).unwrap();
        assert!(s.render_text().lines().all(|l| l.contains('≈') && !l.contains("≈_C")));
    }

    #[test]
    fn validate_rejects_malformed() {
        let mut c = eq_standard(&term("a o b"), &term("b o a"), None).unwrap();
        c.equations[0].lhs = AlgTerm::Var(7);
        assert!(matches!(c.validate(), Err(Error::UnboundVariable(_))));
        let mut c2 = eq_standard(&term("a o b"), &term("b o a"), None).unwrap();
        c2.equations[0].lhs = AlgTerm::app("t9", vec![]);
        assert!(matches!(c2.validate(), Err(Error::UnboundSymbol(_))));
    }
}
