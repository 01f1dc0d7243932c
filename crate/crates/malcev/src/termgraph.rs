//! Labelled graphs of `{∧,∘}`-terms.
//!
//! Construction starts from a single edge `(x1, x2)` labelled with the whole
//! term and rewrites until every label is a variable: a meet splits an edge
//! into two parallel edges, a composition routes it through a fresh vertex.
//! Vertices `x1` and `x2` stay the designated endpoints throughout, and new
//! vertices are numbered in creation order, so the emitted vertex numbering
//! is reproducible.
//!
//! Evaluation is the homomorphism problem of the finished graph: an endpoint
//! pair belongs to the evaluated relation exactly when some assignment of
//! all vertices respects every edge.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::rel::BinRel;
use crate::termlang::RelTerm;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub src: usize,
    pub dst: usize,
    pub label: RelTerm,
}

impl Edge {
    /// The label's variable name, once the graph is fully rewritten.
    pub fn var_label(&self) -> Option<&str> {
        match &self.label {
            RelTerm::Var(v) => Some(v),
            _ => None,
        }
    }
}

/// A directed graph with term-labelled edges; vertices are `0..vertex_count`
/// and print as `x1..xk`. Parallel edges are allowed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabelledGraph {
    pub vertex_count: usize,
    pub edges: Vec<Edge>,
}

impl LabelledGraph {
    pub fn is_final(&self) -> bool {
        self.edges.iter().all(|e| e.var_label().is_some())
    }

    /// One line per edge: `x1 -a-> x3`.
    pub fn render_edges(&self) -> String {
        let mut out = String::new();
        for e in &self.edges {
            let _ = writeln!(out, "x{} -{}-> x{}", e.src + 1, e.label, e.dst + 1);
        }
        out
    }

    /// GraphViz form, endpoints doubled.
    pub fn render_dot(&self) -> String {
        let mut out = String::from("digraph term {\n");
        for v in 0..self.vertex_count {
            let shape = if v < 2 { " [peripheries=2]" } else { "" };
            let _ = writeln!(out, "  x{}{};", v + 1, shape);
        }
        for e in &self.edges {
            let _ = writeln!(out, "  x{} -> x{} [label=\"{}\"];", e.src + 1, e.dst + 1, e.label);
        }
        out.push_str("}\n");
        out
    }
}

/// Which reducible edge the rewriting picks next. The final graph is the
/// same up to vertex renumbering for every order; the default
/// leftmost-outermost order is what the rest of the crate depends on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RewriteOrder {
    LeftmostOutermost,
    RightmostInnermost,
}

fn ensure_graphable(p: &RelTerm) -> Result<()> {
    if !p.is_join_free() {
        return Err(Error::RequiresJoinFree { found: "a join".into() });
    }
    if !p.is_commutator_free() {
        return Err(Error::RequiresJoinFree { found: "a commutator".into() });
    }
    Ok(())
}

/// Builds the final labelled graph of a `{∧,∘}`-term.
pub fn build_graph(p: &RelTerm) -> Result<LabelledGraph> {
    let (g, _) = build_graph_ordered(p, RewriteOrder::LeftmostOutermost)?;
    Ok(g)
}

/// Builds the graph and returns the whole rewriting sequence `G1..Gn`.
pub fn build_graph_traced(p: &RelTerm) -> Result<(LabelledGraph, Vec<LabelledGraph>)> {
    build_graph_ordered_traced(p, RewriteOrder::LeftmostOutermost, true)
}

pub fn build_graph_ordered(p: &RelTerm, order: RewriteOrder) -> Result<(LabelledGraph, usize)> {
    let (g, trace) = build_graph_ordered_traced(p, order, false)?;
    Ok((g, trace.len()))
}

fn build_graph_ordered_traced(
    p: &RelTerm,
    order: RewriteOrder,
    keep_trace: bool,
) -> Result<(LabelledGraph, Vec<LabelledGraph>)> {
    ensure_graphable(p)?;
    let mut g = LabelledGraph {
        vertex_count: 2,
        edges: vec![Edge { src: 0, dst: 1, label: p.clone() }],
    };
    let mut trace = Vec::new();
    if keep_trace {
        trace.push(g.clone());
    }
    loop {
        let candidate = match order {
            RewriteOrder::LeftmostOutermost => g.edges.iter().position(|e| e.var_label().is_none()),
            RewriteOrder::RightmostInnermost => g.edges.iter().rposition(|e| e.var_label().is_none()),
        };
        let Some(i) = candidate else { break };
        let Edge { src, dst, label } = g.edges[i].clone();
        match label {
            RelTerm::Meet(u, v) => {
                // Two parallel edges between the same endpoints.
                g.edges[i] = Edge { src, dst, label: *u };
                g.edges.insert(i + 1, Edge { src, dst, label: *v });
            }
            RelTerm::Comp(u, v) => {
                // Serial route through a fresh vertex.
                let fresh = g.vertex_count;
                g.vertex_count += 1;
                g.edges[i] = Edge { src, dst: fresh, label: *u };
                g.edges.insert(i + 1, Edge { src: fresh, dst, label: *v });
            }
            RelTerm::Var(_) | RelTerm::Join(_, _) | RelTerm::Comm(_, _) => unreachable!(),
        }
        if keep_trace {
            trace.push(g.clone());
        }
    }
    Ok((g, trace))
}

/// Prunes `domains` to arc consistency with respect to every edge relation.
/// Returns false if some domain empties out.
fn arc_consistency(rels: &[(usize, usize, &BinRel)], domains: &mut [Vec<usize>]) -> bool {
    let mut changed = true;
    while changed {
        changed = false;
        for &(src, dst, rel) in rels {
            let (pre_src, pre_dst) = (domains[src].len(), domains[dst].len());
            let dst_dom: Vec<usize> = domains[dst].clone();
            domains[src].retain(|&a| dst_dom.iter().any(|&b| rel.contains(a, b)));
            let src_dom: Vec<usize> = domains[src].clone();
            domains[dst].retain(|&b| src_dom.iter().any(|&a| rel.contains(a, b)));
            if domains[src].is_empty() || domains[dst].is_empty() {
                return false;
            }
            if domains[src].len() != pre_src || domains[dst].len() != pre_dst {
                changed = true;
            }
        }
    }
    true
}

/// Backtracking over vertices in index order, values ascending; the first
/// solution found is the lexicographically least assignment vector.
fn search(rels: &[(usize, usize, &BinRel)], domains: &[Vec<usize>], assignment: &mut Vec<usize>) -> bool {
    let v = assignment.len();
    if v == domains.len() {
        return true;
    }
    'values: for &val in &domains[v] {
        for &(src, dst, rel) in rels {
            // Only constraints with both endpoints decided matter here.
            if src == v {
                let b = if dst == v { val } else if dst < v { assignment[dst] } else { continue };
                if !rel.contains(val, b) {
                    continue 'values;
                }
            } else if dst == v && src < v && !rel.contains(assignment[src], val) {
                continue 'values;
            }
        }
        assignment.push(val);
        if search(rels, domains, assignment) {
            return true;
        }
        assignment.pop();
    }
    false
}

fn solve_for_pair(
    vertex_count: usize,
    rels: &[(usize, usize, &BinRel)],
    n: usize,
    a1: usize,
    a2: usize,
) -> Option<Vec<usize>> {
    let mut domains: Vec<Vec<usize>> = vec![(0..n).collect(); vertex_count];
    domains[0] = vec![a1];
    domains[1] = vec![a2];
    if !arc_consistency(rels, &mut domains) {
        return None;
    }
    let mut assignment = Vec::with_capacity(vertex_count);
    if search(rels, &domains, &mut assignment) {
        Some(assignment)
    } else {
        None
    }
}

type EdgeConstraints<'a> = Vec<(usize, usize, &'a BinRel)>;

fn edge_constraints<'a>(
    g: &LabelledGraph,
    relations: &'a BTreeMap<String, BinRel>,
) -> Result<(EdgeConstraints<'a>, usize)> {
    let mut rels = Vec::with_capacity(g.edges.len());
    let mut n = None;
    for e in &g.edges {
        let name = match e.var_label() {
            Some(name) => name,
            None => {
                return Err(Error::RequiresJoinFree { found: format!("unreduced label {}", e.label) })
            }
        };
        let r = relations.get(name).ok_or_else(|| Error::UnboundLabel(name.to_string()))?;
        if let Some(m) = n {
            if r.size() != m {
                return Err(Error::SizeMismatch { left: m, right: r.size() });
            }
        }
        n = Some(r.size());
        rels.push((e.src, e.dst, r));
    }
    Ok((rels, n.unwrap_or(0)))
}

/// The relation the graph computes: all endpoint pairs `(a1, a2)` for which
/// a full vertex assignment exists respecting every edge.
pub fn evaluate_via_graph(g: &LabelledGraph, relations: &BTreeMap<String, BinRel>) -> Result<BinRel> {
    let (rels, n) = edge_constraints(g, relations)?;
    let mut out = BinRel::empty(n);
    for a1 in 0..n {
        for a2 in 0..n {
            if solve_for_pair(g.vertex_count, &rels, n, a1, a2).is_some() {
                out.insert(a1, a2);
            }
        }
    }
    Ok(out)
}

/// The lexicographically least full assignment extending `x1 ↦ a1, x2 ↦ a2`,
/// or `None` when the pair is not in the evaluated relation.
pub fn witness_assignment(
    g: &LabelledGraph,
    relations: &BTreeMap<String, BinRel>,
    pair: (usize, usize),
) -> Result<Option<Vec<usize>>> {
    let (rels, n) = edge_constraints(g, relations)?;
    if pair.0 >= n || pair.1 >= n {
        return Err(Error::SizeMismatch { left: pair.0.max(pair.1) + 1, right: n });
    }
    Ok(solve_for_pair(g.vertex_count, &rels, n, pair.0, pair.1))
}

/// Brute-force isomorphism check fixing the two endpoints; test support for
/// the rewrite-order invariance property.
pub fn isomorphic_fixing_endpoints(g1: &LabelledGraph, g2: &LabelledGraph) -> bool {
    if g1.vertex_count != g2.vertex_count || g1.edges.len() != g2.edges.len() {
        return false;
    }
    let k = g1.vertex_count;
    fn edges_match(perm: &[usize], g1: &LabelledGraph, g2: &LabelledGraph) -> bool {
        let mut mapped: Vec<(usize, usize, String)> = g1
            .edges
            .iter()
            .map(|e| (perm[e.src], perm[e.dst], e.label.to_string()))
            .collect();
        let mut target: Vec<(usize, usize, String)> =
            g2.edges.iter().map(|e| (e.src, e.dst, e.label.to_string())).collect();
        mapped.sort();
        target.sort();
        mapped == target
    }
    fn try_extend(next: usize, perm: &mut Vec<usize>, used: &mut Vec<bool>, g1: &LabelledGraph, g2: &LabelledGraph) -> bool {
        if next == perm.len() {
            return edges_match(perm, g1, g2);
        }
        for v in 2..perm.len() {
            if !used[v] {
                used[v] = true;
                perm[next] = v;
                if try_extend(next + 1, perm, used, g1, g2) {
                    return true;
                }
                used[v] = false;
            }
        }
        false
    }
    let mut perm: Vec<usize> = (0..k).collect();
    let mut used = vec![false; k];
    used[0] = true;
    used[1] = true;
    if k <= 2 {
        return edges_match(&perm, g1, g2);
    }
    try_extend(2, &mut perm, &mut used, g1, g2)
}
