//! Brute-force ground truth: every labelled acyclic graph compatible with a
//! small C-DAG, and the micro-level conditions checked in each.
//!
//! Deliberately independent of the structure search and the rule engine; it
//! only uses the graph primitives and the C-DAG model.

use std::collections::HashSet;
use std::ops::ControlFlow;
use std::sync::Arc;

use fixedbitset::FixedBitSet;
use thiserror::Error;

use crate::cdag::{CDag, CDagError, ClusterSet, InvalidCDag};
use crate::graph::{ancestors_cut, d_connected_cut, d_separated, Admg, GraphError, MicroVertex, MixedGraph, VertexSet};
use crate::query::{QueryError, Rule, RuleQuery};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnumerationBudget {
    /// Abort once more than this many compatible graphs have been produced.
    pub max_graphs: u64,
    /// Refuse C-DAGs with more micro vertices than this.
    pub max_micro_vertices: usize,
}

impl Default for EnumerationBudget {
    fn default() -> Self {
        EnumerationBudget { max_graphs: 1_000_000, max_micro_vertices: 10 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error(transparent)]
    Invalid(#[from] InvalidCDag),
    #[error(transparent)]
    CDag(#[from] CDagError),
    #[error(transparent)]
    Query(#[from] QueryError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("budget exceeded: more than {0} compatible graphs")]
    TooManyGraphs(u64),
    #[error("budget exceeded: {have} micro vertices, limit {max}")]
    TooManyVertices { have: usize, max: usize },
}

impl OracleError {
    pub fn is_budget(&self) -> bool {
        matches!(self, OracleError::TooManyGraphs(_) | OracleError::TooManyVertices { .. })
    }
}

enum Kind {
    Directed,
    Bidirected,
}

/// The micro edges that may realize one cluster edge.
struct Group {
    kind: Kind,
    candidates: Vec<(usize, usize)>,
}

fn groups(c: &CDag, g: &MixedGraph) -> Vec<Group> {
    let members = |name: &str| -> Vec<usize> {
        let k = c.cardinality(name).unwrap();
        (1..=k).map(|i| g.index_of(&crate::graph::MicroVertex::new(name, i)).unwrap()).collect()
    };
    let mut out = Vec::new();
    for (a, b) in c.directed_names() {
        let (ma, mb) = (members(a), members(b));
        let candidates = ma.iter().flat_map(|&u| mb.iter().map(move |&v| (u, v))).filter(|(u, v)| u != v).collect();
        out.push(Group { kind: Kind::Directed, candidates });
    }
    for (a, b) in c.bidirected_names() {
        let (ma, mb) = (members(a), members(b));
        let candidates = ma
            .iter()
            .flat_map(|&u| mb.iter().map(move |&v| (u, v)))
            .filter(|(u, v)| if a == b { u < v } else { true })
            .collect();
        out.push(Group { kind: Kind::Bidirected, candidates });
    }
    out
}

struct Enumerator<'a, F> {
    groups: Vec<Group>,
    graph: MixedGraph,
    visit: &'a mut F,
    produced: u64,
    max: u64,
}

impl<F: FnMut(&Admg) -> ControlFlow<()>> Enumerator<'_, F> {
    /// Decide candidate `ci` of group `gi`; `used` counts edges chosen in
    /// the current group.
    fn walk(&mut self, gi: usize, ci: usize, used: usize) -> Result<ControlFlow<()>, OracleError> {
        if gi == self.groups.len() {
            self.produced += 1;
            if self.produced > self.max {
                return Err(OracleError::TooManyGraphs(self.max));
            }
            return Ok((self.visit)(&Admg::new(self.graph.clone()).expect("kept acyclic")));
        }
        let group = &self.groups[gi];
        if ci == group.candidates.len() {
            return if used == 0 { Ok(ControlFlow::Continue(())) } else { self.walk(gi + 1, 0, 0) };
        }
        let (u, v) = group.candidates[ci];
        let directed = matches!(group.kind, Kind::Directed);
        // Leave the edge out.
        if self.walk(gi, ci + 1, used)?.is_break() {
            return Ok(ControlFlow::Break(()));
        }
        // Put it in, unless it closes a cycle.
        if directed {
            let mut from = FixedBitSet::with_capacity(self.graph.len());
            from.insert(v);
            if self.graph.descendants_mask(&from).contains(u) {
                return Ok(ControlFlow::Continue(()));
            }
            self.graph.insert_directed(u, v);
        } else {
            self.graph.insert_bidirected(u, v);
        }
        let r = self.walk(gi, ci + 1, used + 1);
        if directed {
            self.graph.remove_directed(u, v);
        } else {
            self.graph.remove_bidirected(u, v);
        }
        r
    }
}

fn check_budget(c: &CDag, b: &EnumerationBudget) -> Result<(), OracleError> {
    c.validate()?;
    let have = c.total_micro_vertices();
    if have > b.max_micro_vertices {
        return Err(OracleError::TooManyVertices { have, max: b.max_micro_vertices });
    }
    Ok(())
}

/// Calls `visit` on every compatible graph in a fixed order until it breaks.
/// Returns how many graphs were visited.
pub fn for_each_compatible<F>(c: &CDag, b: &EnumerationBudget, mut visit: F) -> Result<u64, OracleError>
where
    F: FnMut(&Admg) -> ControlFlow<()>,
{
    check_budget(c, b)?;
    let graph = MixedGraph::on_sorted(c.micro_vertices());
    let mut e = Enumerator { groups: groups(c, &graph), graph, visit: &mut visit, produced: 0, max: b.max_graphs };
    let _ = e.walk(0, 0, 0)?;
    Ok(e.produced)
}

/// Every labelled acyclic graph compatible with `c`.
pub fn enumerate_compatible(c: &CDag, b: &EnumerationBudget) -> Result<Vec<Admg>, OracleError> {
    let mut out = Vec::new();
    for_each_compatible(c, b, |g| {
        out.push(g.clone());
        ControlFlow::Continue(())
    })?;
    Ok(out)
}

pub fn count_compatible(c: &CDag, b: &EnumerationBudget) -> Result<u64, OracleError> {
    for_each_compatible(c, b, |_| ControlFlow::Continue(()))
}

/// Does the rule's d-separation condition fail in `g`?
///
/// R1: `y ⊥ x | w, z` after cutting edges into `w`. R2: the same after also
/// cutting edges out of `x`. R3: after cutting edges into `w` and into the
/// part of `x` that is not an ancestor of `z` once edges into `w` are cut.
pub fn pearl_rule_fails(
    g: &Admg,
    rule: Rule,
    w: &VertexSet,
    x: &VertexSet,
    y: &VertexSet,
    z: &VertexSet,
) -> Result<bool, GraphError> {
    let none = VertexSet::new();
    let wz = w.union(z);
    let mutilated = match rule {
        Rule::R1 => g.mutilate(w, &none)?,
        Rule::R2 => g.mutilate(w, x)?,
        Rule::R3 => {
            let anc = g.mutilate(w, &none)?.ancestors(z)?;
            g.mutilate(&w.union(&x.difference(&anc)), &none)?
        }
        Rule::DSep => g.mutilate(&none, &none)?,
    };
    Ok(!d_separated(&mutilated, y, x, &wz)?)
}

/// Does `x ⊥ y | z` fail in `g` after cutting edges into `over` and out of
/// `under`?
pub fn dsep_fails(
    g: &Admg,
    x: &VertexSet,
    y: &VertexSet,
    z: &VertexSet,
    over: &VertexSet,
    under: &VertexSet,
) -> Result<bool, GraphError> {
    Ok(!d_separated(&g.mutilate(over, under)?, x, y, z)?)
}

/// Cluster query translated to micro vertex sets.
#[derive(Debug, Clone)]
pub struct MicroSets {
    pub w: VertexSet,
    pub x: VertexSet,
    pub y: VertexSet,
    pub z: VertexSet,
    pub over: VertexSet,
    pub under: VertexSet,
    // The same sets as masks over the C-DAG's micro vertices, for graphs on
    // exactly those vertices.
    vertices: Arc<[MicroVertex]>,
    masks: [FixedBitSet; 6],
}

impl MicroSets {
    pub fn new(c: &CDag, q: &RuleQuery) -> Result<Self, OracleError> {
        q.check_disjoint()?;
        let m = |s: &ClusterSet| c.micro_vertices_of(s);
        let (w, x, y, z, over, under) = (m(&q.w)?, m(&q.x)?, m(&q.y)?, m(&q.z)?, m(&q.over)?, m(&q.under)?);
        let vertices = c.micro_vertices();
        let mask = |s: &VertexSet| {
            let mut b = FixedBitSet::with_capacity(vertices.len());
            for v in s {
                b.insert(vertices.binary_search(v).expect("micro vertex of the C-DAG"));
            }
            b
        };
        let masks = [mask(&w), mask(&x), mask(&y), mask(&z), mask(&over), mask(&under)];
        Ok(MicroSets { w, x, y, z, over, under, vertices, masks })
    }

    /// Mask form of [`pearl_rule_fails`] and [`dsep_fails`].
    fn fails_on_masks(&self, g: &MixedGraph, rule: Rule) -> bool {
        let [w, x, y, z, over, under] = &self.masks;
        let none = FixedBitSet::with_capacity(g.len());
        let mut wz = w.clone();
        wz.union_with(z);
        match rule {
            Rule::R1 => d_connected_cut(g, y, x, &wz, w, &none),
            Rule::R2 => d_connected_cut(g, y, x, &wz, w, x),
            Rule::R3 => {
                let anc = ancestors_cut(g, z, w, &none);
                let mut cut = x.clone();
                cut.difference_with(&anc);
                cut.union_with(w);
                d_connected_cut(g, y, x, &wz, &cut, &none)
            }
            Rule::DSep => d_connected_cut(g, x, y, z, over, under),
        }
    }
}

/// Does `q`'s micro-level condition fail in `g`?
pub fn violates(g: &Admg, rule: Rule, m: &MicroSets) -> Result<bool, GraphError> {
    if m.x.is_empty() || m.y.is_empty() {
        return Ok(false);
    }
    if *g.vertices() == *m.vertices {
        return Ok(m.fails_on_masks(g, rule));
    }
    match rule {
        Rule::DSep => dsep_fails(g, &m.x, &m.y, &m.z, &m.over, &m.under),
        r => pearl_rule_fails(g, r, &m.w, &m.x, &m.y, &m.z),
    }
}

/// First compatible graph (in enumeration order) violating `q`, if any.
pub fn exists_violator(c: &CDag, q: &RuleQuery, b: &EnumerationBudget) -> Result<Option<Admg>, OracleError> {
    let m = MicroSets::new(c, q)?;
    let mut found = None;
    let mut err = None;
    for_each_compatible(c, b, |g| match violates(g, q.rule, &m) {
        Ok(true) => {
            found = Some(g.clone());
            ControlFlow::Break(())
        }
        Ok(false) => ControlFlow::Continue(()),
        Err(e) => {
            err = Some(e);
            ControlFlow::Break(())
        }
    })?;
    match err {
        Some(e) => Err(e.into()),
        None => Ok(found),
    }
}

/// Smallest relabelling of `g` under index permutations inside each
/// cluster, compared by edge lists.
pub fn canonical_form(g: &MixedGraph) -> MixedGraph {
    let n = g.len();
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    for i in 0..n {
        match blocks.last_mut() {
            Some(b) if g.vertex(b[0]).cluster() == g.vertex(i).cluster() => b.push(i),
            _ => blocks.push(vec![i]),
        }
    }
    let mut perm: Vec<usize> = (0..n).collect();
    let mut best: Option<(Vec<(usize, usize)>, Vec<(usize, usize)>, MixedGraph)> = None;
    fn rec(
        bi: usize,
        blocks: &[Vec<usize>],
        perm: &mut Vec<usize>,
        g: &MixedGraph,
        best: &mut Option<(Vec<(usize, usize)>, Vec<(usize, usize)>, MixedGraph)>,
    ) {
        if bi == blocks.len() {
            let h = g.permuted(perm);
            let key = (h.directed_edges().collect::<Vec<_>>(), h.bidirected_edges().collect::<Vec<_>>());
            if best.as_ref().is_none_or(|(d, b, _)| key < (d.clone(), b.clone())) {
                *best = Some((key.0, key.1, h));
            }
            return;
        }
        let block = &blocks[bi];
        let mut order = block.clone();
        permutations(&mut order, 0, &mut |o| {
            for (k, &src) in block.iter().enumerate() {
                perm[src] = o[k];
            }
            rec(bi + 1, blocks, perm, g, best);
        });
    }
    rec(0, &blocks, &mut perm, g, &mut best);
    best.map(|(_, _, h)| h).unwrap_or_else(|| g.clone())
}

fn permutations(v: &mut Vec<usize>, k: usize, f: &mut dyn FnMut(&[usize])) {
    if k == v.len() {
        f(v);
        return;
    }
    for i in k..v.len() {
        v.swap(k, i);
        permutations(v, k + 1, f);
        v.swap(k, i);
    }
}

/// Number of graphs in `graphs` that stay distinct once indices inside
/// each cluster are treated as interchangeable.
pub fn count_up_to_permutation<'a>(graphs: impl IntoIterator<Item = &'a MixedGraph>) -> usize {
    graphs.into_iter().map(canonical_form).collect::<HashSet<_>>().len()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_cycle_has_two_labelled_graphs() {
        let c = CDag::builder().cluster("A", 2).cluster("B", 1).both_ways("A", "B").build().unwrap();
        let gs = enumerate_compatible(&c, &EnumerationBudget::default()).unwrap();
        let shown: Vec<String> = gs.iter().map(|g| g.to_string()).collect();
        assert_eq!(shown.len(), 2);
        assert!(shown.contains(&"[A.1 -> B.1, B.1 -> A.2]".to_string()));
        assert!(shown.contains(&"[A.2 -> B.1, B.1 -> A.1]".to_string()));
        let refs: Vec<&MixedGraph> = gs.iter().map(|g| g.graph()).collect();
        assert_eq!(count_up_to_permutation(refs), 1);
    }

    #[test]
    fn lone_cluster_has_one_graph() {
        let c = CDag::builder().cluster("A", 1).build().unwrap();
        assert_eq!(count_compatible(&c, &EnumerationBudget::default()).unwrap(), 1);
    }

    #[test]
    fn budgets_are_enforced() {
        let c = CDag::builder().cluster("A", 3).cluster("B", 3).directed("A", "B").build().unwrap();
        let tight = EnumerationBudget { max_graphs: 10, max_micro_vertices: 10 };
        assert_eq!(count_compatible(&c, &tight), Err(OracleError::TooManyGraphs(10)));
        let small = EnumerationBudget { max_graphs: 10, max_micro_vertices: 5 };
        assert!(count_compatible(&c, &small).unwrap_err().is_budget());
        assert_eq!(count_compatible(&c, &EnumerationBudget::default()).unwrap(), 511);
    }
}
