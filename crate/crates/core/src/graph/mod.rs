//! Micro-level mixed graphs: directed plus bidirected edges over named,
//! indexed vertices.
//!
//! Graphs are built once (through [`GraphBuilder`] or [`MixedGraph::from_edges`])
//! and every operation afterwards returns a fresh value.

mod dsep;
pub mod paths;

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use dsep::{ancestors_cut, d_connected_cut, d_connected_masks, d_separated};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("vertex {0} is not in the graph")]
    UnknownVertex(MicroVertex),
    #[error("graph contains a directed cycle")]
    Cyclic,
    #[error("vertex sets {0} and {1} must be disjoint")]
    Overlap(&'static str, &'static str),
    #[error("cannot parse vertex `{0}`: expected <cluster>.<index> with index >= 1")]
    BadVertex(String),
    #[error("graphs are defined over different vertex sets")]
    VertexMismatch,
    #[error("self-loop on micro vertex {0}")]
    SelfLoop(MicroVertex),
}

/// A vertex `cluster.index`; indices start at 1.
///
/// Ordering is by cluster name, then index.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MicroVertex {
    cluster: Arc<str>,
    index: u32,
}

impl MicroVertex {
    pub fn new(cluster: impl AsRef<str>, index: u32) -> Self {
        assert!(index >= 1, "micro vertex indices start at 1");
        MicroVertex { cluster: Arc::from(cluster.as_ref()), index }
    }

    pub fn cluster(&self) -> &str {
        &self.cluster
    }

    pub fn index(&self) -> u32 {
        self.index
    }
}

impl fmt::Display for MicroVertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.cluster, self.index)
    }
}

impl FromStr for MicroVertex {
    type Err = GraphError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || GraphError::BadVertex(s.to_string());
        let (name, idx) = s.rsplit_once('.').ok_or_else(bad)?;
        if name.is_empty() {
            return Err(bad());
        }
        let index: u32 = idx.parse().map_err(|_| bad())?;
        if index == 0 {
            return Err(bad());
        }
        Ok(MicroVertex::new(name, index))
    }
}

impl Serialize for MicroVertex {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for MicroVertex {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// An ordered set of micro vertices.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VertexSet(BTreeSet<MicroVertex>);

impl VertexSet {
    pub fn new() -> Self {
        VertexSet(BTreeSet::new())
    }

    pub fn insert(&mut self, v: MicroVertex) -> bool {
        self.0.insert(v)
    }

    pub fn contains(&self, v: &MicroVertex) -> bool {
        self.0.contains(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &MicroVertex> {
        self.0.iter()
    }

    pub fn is_disjoint(&self, other: &VertexSet) -> bool {
        self.0.is_disjoint(&other.0)
    }

    pub fn is_subset(&self, other: &VertexSet) -> bool {
        self.0.is_subset(&other.0)
    }

    pub fn union(&self, other: &VertexSet) -> VertexSet {
        VertexSet(self.0.union(&other.0).cloned().collect())
    }

    pub fn intersection(&self, other: &VertexSet) -> VertexSet {
        VertexSet(self.0.intersection(&other.0).cloned().collect())
    }

    pub fn difference(&self, other: &VertexSet) -> VertexSet {
        VertexSet(self.0.difference(&other.0).cloned().collect())
    }
}

impl FromIterator<MicroVertex> for VertexSet {
    fn from_iter<I: IntoIterator<Item = MicroVertex>>(iter: I) -> Self {
        VertexSet(iter.into_iter().collect())
    }
}

impl IntoIterator for VertexSet {
    type Item = MicroVertex;
    type IntoIter = std::collections::btree_set::IntoIter<MicroVertex>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.into_iter()
    }
}

impl<'a> IntoIterator for &'a VertexSet {
    type Item = &'a MicroVertex;
    type IntoIter = std::collections::btree_set::Iter<'a, MicroVertex>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

impl fmt::Display for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{v}")?;
        }
        f.write_str("}")
    }
}

/// Directed and bidirected edges over a fixed, sorted vertex list.
///
/// Vertices are addressed by position in [`MixedGraph::vertices`]. Directed
/// edges carry no multiplicity; a bidirected edge is stored symmetrically.
/// Directed self-loops are not representable, bidirected ones are rejected.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MixedGraph {
    vertices: Arc<[MicroVertex]>,
    children: Vec<FixedBitSet>,
    parents: Vec<FixedBitSet>,
    siblings: Vec<FixedBitSet>,
}

impl MixedGraph {
    /// A graph with no edges. Duplicate vertices are merged.
    pub fn empty(vertices: impl IntoIterator<Item = MicroVertex>) -> Self {
        let set: BTreeSet<MicroVertex> = vertices.into_iter().collect();
        Self::on_sorted(set.into_iter().collect::<Vec<_>>().into())
    }

    /// Graph over an already sorted, duplicate-free vertex list.
    pub(crate) fn on_sorted(vertices: Arc<[MicroVertex]>) -> Self {
        debug_assert!(vertices.windows(2).all(|w| w[0] < w[1]));
        let n = vertices.len();
        let row = FixedBitSet::with_capacity(n);
        MixedGraph {
            vertices,
            children: vec![row.clone(); n],
            parents: vec![row.clone(); n],
            siblings: vec![row; n],
        }
    }

    pub fn from_edges<'a>(
        vertices: impl IntoIterator<Item = MicroVertex>,
        directed: impl IntoIterator<Item = (&'a MicroVertex, &'a MicroVertex)>,
        bidirected: impl IntoIterator<Item = (&'a MicroVertex, &'a MicroVertex)>,
    ) -> Result<Self, GraphError> {
        let mut b = GraphBuilder::new(vertices);
        for (u, v) in directed {
            b.directed(u, v)?;
        }
        for (u, v) in bidirected {
            b.bidirected(u, v)?;
        }
        Ok(b.build())
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertices(&self) -> &[MicroVertex] {
        &self.vertices
    }

    pub(crate) fn shared_vertices(&self) -> Arc<[MicroVertex]> {
        Arc::clone(&self.vertices)
    }

    pub fn vertex(&self, i: usize) -> &MicroVertex {
        &self.vertices[i]
    }

    pub fn index_of(&self, v: &MicroVertex) -> Option<usize> {
        self.vertices.binary_search(v).ok()
    }

    pub fn vertex_set(&self) -> VertexSet {
        self.vertices.iter().cloned().collect()
    }

    pub fn children(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        self.children[i].ones()
    }

    pub fn parents(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        self.parents[i].ones()
    }

    pub fn siblings(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        self.siblings[i].ones()
    }

    pub fn children_mask(&self, i: usize) -> &FixedBitSet {
        &self.children[i]
    }

    pub fn parents_mask(&self, i: usize) -> &FixedBitSet {
        &self.parents[i]
    }

    pub fn siblings_mask(&self, i: usize) -> &FixedBitSet {
        &self.siblings[i]
    }

    pub fn has_directed(&self, from: usize, to: usize) -> bool {
        self.children[from].contains(to)
    }

    pub fn has_bidirected(&self, a: usize, b: usize) -> bool {
        self.siblings[a].contains(b)
    }

    /// Directed edges as index pairs, sorted.
    pub fn directed_edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.len()).flat_map(move |u| self.children[u].ones().map(move |v| (u, v)))
    }

    /// Bidirected edges as index pairs `(a, b)` with `a < b`, sorted.
    pub fn bidirected_edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.len()).flat_map(move |a| {
            self.siblings[a].ones().filter(move |&b| b > a).map(move |b| (a, b))
        })
    }

    pub fn directed_count(&self) -> usize {
        self.children.iter().map(|r| r.count_ones(..)).sum()
    }

    pub fn bidirected_count(&self) -> usize {
        self.siblings.iter().map(|r| r.count_ones(..)).sum::<usize>() / 2
    }

    pub fn edge_count(&self) -> usize {
        self.directed_count() + self.bidirected_count()
    }

    /// True if no edge of either kind touches `i`.
    pub fn is_isolated(&self, i: usize) -> bool {
        self.children[i].is_clear() && self.parents[i].is_clear() && self.siblings[i].is_clear()
    }

    pub fn mask(&self, set: &VertexSet) -> Result<FixedBitSet, GraphError> {
        let mut m = FixedBitSet::with_capacity(self.len());
        for v in set {
            let i = self.index_of(v).ok_or_else(|| GraphError::UnknownVertex(v.clone()))?;
            m.insert(i);
        }
        Ok(m)
    }

    pub fn set_of(&self, mask: &FixedBitSet) -> VertexSet {
        mask.ones().map(|i| self.vertices[i].clone()).collect()
    }

    pub(crate) fn insert_directed(&mut self, u: usize, v: usize) {
        assert_ne!(u, v, "directed self-loops are not allowed on micro vertices");
        self.children[u].insert(v);
        self.parents[v].insert(u);
    }

    pub(crate) fn remove_directed(&mut self, u: usize, v: usize) {
        self.children[u].set(v, false);
        self.parents[v].set(u, false);
    }

    pub(crate) fn insert_bidirected(&mut self, a: usize, b: usize) {
        assert_ne!(a, b, "bidirected self-loops are not allowed on micro vertices");
        self.siblings[a].insert(b);
        self.siblings[b].insert(a);
    }

    pub(crate) fn remove_bidirected(&mut self, a: usize, b: usize) {
        self.siblings[a].set(b, false);
        self.siblings[b].set(a, false);
    }

    pub fn is_acyclic(&self) -> bool {
        self.topological_order().is_some()
    }

    /// Vertex indices in a topological order of the directed part, smallest
    /// available index first. `None` if there is a directed cycle.
    pub fn topological_order(&self) -> Option<Vec<usize>> {
        let n = self.len();
        let mut indeg: Vec<usize> = self.parents.iter().map(|p| p.count_ones(..)).collect();
        let mut ready: BTreeSet<usize> = (0..n).filter(|&i| indeg[i] == 0).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(u) = ready.pop_first() {
            order.push(u);
            for v in self.children[u].ones() {
                indeg[v] -= 1;
                if indeg[v] == 0 {
                    ready.insert(v);
                }
            }
        }
        (order.len() == n).then_some(order)
    }

    /// Reflexive ancestors of `set` along directed edges.
    pub fn ancestors_mask(&self, set: &FixedBitSet) -> FixedBitSet {
        let mut seen = set.clone();
        let mut stack: Vec<usize> = set.ones().collect();
        while let Some(v) = stack.pop() {
            for p in self.parents[v].ones() {
                if !seen.put(p) {
                    stack.push(p);
                }
            }
        }
        seen
    }

    /// Reflexive descendants of `set` along directed edges.
    pub fn descendants_mask(&self, set: &FixedBitSet) -> FixedBitSet {
        let mut seen = set.clone();
        let mut stack: Vec<usize> = set.ones().collect();
        while let Some(v) = stack.pop() {
            for c in self.children[v].ones() {
                if !seen.put(c) {
                    stack.push(c);
                }
            }
        }
        seen
    }

    pub fn ancestors(&self, set: &VertexSet) -> Result<VertexSet, GraphError> {
        Ok(self.set_of(&self.ancestors_mask(&self.mask(set)?)))
    }

    /// Removes directed edges into `over` and bidirected edges touching
    /// `over`, then directed edges out of `under`.
    pub fn mutilate_masks(&self, over: &FixedBitSet, under: &FixedBitSet) -> MixedGraph {
        let mut g = self.clone();
        for v in over.ones() {
            for p in self.parents[v].ones() {
                g.remove_directed(p, v);
            }
            for s in self.siblings[v].ones() {
                g.remove_bidirected(v, s);
            }
        }
        for u in under.ones() {
            for c in self.children[u].ones() {
                g.remove_directed(u, c);
            }
        }
        g
    }

    pub fn mutilate(&self, over: &VertexSet, under: &VertexSet) -> Result<MixedGraph, GraphError> {
        Ok(self.mutilate_masks(&self.mask(over)?, &self.mask(under)?))
    }

    /// Edge-wise union of two graphs over the same vertices.
    pub fn union(&self, other: &MixedGraph) -> Result<MixedGraph, GraphError> {
        if self.vertices != other.vertices {
            return Err(GraphError::VertexMismatch);
        }
        let mut g = self.clone();
        for i in 0..self.len() {
            g.children[i].union_with(&other.children[i]);
            g.parents[i].union_with(&other.parents[i]);
            g.siblings[i].union_with(&other.siblings[i]);
        }
        Ok(g)
    }

    /// True if every edge of `self` is an edge of `other` (same vertices).
    pub fn is_edge_subgraph_of(&self, other: &MixedGraph) -> bool {
        self.vertices == other.vertices
            && (0..self.len()).all(|i| {
                self.children[i].is_subset(&other.children[i])
                    && self.siblings[i].is_subset(&other.siblings[i])
            })
    }

    /// Same vertices, relabelled by `perm` (old index to new index).
    pub fn permuted(&self, perm: &[usize]) -> MixedGraph {
        let mut g = MixedGraph::on_sorted(self.shared_vertices());
        for (u, v) in self.directed_edges() {
            g.insert_directed(perm[u], perm[v]);
        }
        for (a, b) in self.bidirected_edges() {
            g.insert_bidirected(perm[a], perm[b]);
        }
        g
    }
}

impl fmt::Display for MixedGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        let mut sep = |f: &mut fmt::Formatter<'_>| {
            let s = if first { "" } else { ", " };
            first = false;
            f.write_str(s)
        };
        f.write_str("[")?;
        for (u, v) in self.directed_edges() {
            sep(f)?;
            write!(f, "{} -> {}", self.vertices[u], self.vertices[v])?;
        }
        for (a, b) in self.bidirected_edges() {
            sep(f)?;
            write!(f, "{} <-> {}", self.vertices[a], self.vertices[b])?;
        }
        f.write_str("]")
    }
}

/// Accumulates edges by vertex name before freezing into a [`MixedGraph`].
#[derive(Debug, Clone)]
pub struct GraphBuilder {
    graph: MixedGraph,
}

impl GraphBuilder {
    pub fn new(vertices: impl IntoIterator<Item = MicroVertex>) -> Self {
        GraphBuilder { graph: MixedGraph::empty(vertices) }
    }

    /// Starts from the edges of an existing graph.
    pub fn from_graph(graph: MixedGraph) -> Self {
        GraphBuilder { graph }
    }

    fn idx(&self, v: &MicroVertex) -> Result<usize, GraphError> {
        self.graph.index_of(v).ok_or_else(|| GraphError::UnknownVertex(v.clone()))
    }

    pub fn directed(&mut self, from: &MicroVertex, to: &MicroVertex) -> Result<&mut Self, GraphError> {
        let (u, v) = (self.idx(from)?, self.idx(to)?);
        if u == v {
            return Err(GraphError::SelfLoop(from.clone()));
        }
        self.graph.insert_directed(u, v);
        Ok(self)
    }

    pub fn bidirected(&mut self, a: &MicroVertex, b: &MicroVertex) -> Result<&mut Self, GraphError> {
        let (i, j) = (self.idx(a)?, self.idx(b)?);
        if i == j {
            return Err(GraphError::SelfLoop(a.clone()));
        }
        self.graph.insert_bidirected(i, j);
        Ok(self)
    }

    pub fn build(self) -> MixedGraph {
        self.graph
    }
}

/// A [`MixedGraph`] whose directed part is acyclic.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Admg(MixedGraph);

impl Admg {
    pub fn new(graph: MixedGraph) -> Result<Self, GraphError> {
        if graph.is_acyclic() {
            Ok(Admg(graph))
        } else {
            Err(GraphError::Cyclic)
        }
    }

    pub fn graph(&self) -> &MixedGraph {
        &self.0
    }

    pub fn into_inner(self) -> MixedGraph {
        self.0
    }

    /// Mutilation only removes edges, so the result stays acyclic.
    pub fn mutilate(&self, over: &VertexSet, under: &VertexSet) -> Result<Admg, GraphError> {
        Ok(Admg(self.0.mutilate(over, under)?))
    }

    pub fn mutilate_masks(&self, over: &FixedBitSet, under: &FixedBitSet) -> Admg {
        Admg(self.0.mutilate_masks(over, under))
    }
}

impl TryFrom<MixedGraph> for Admg {
    type Error = GraphError;

    fn try_from(g: MixedGraph) -> Result<Self, Self::Error> {
        Admg::new(g)
    }
}

impl std::ops::Deref for Admg {
    type Target = MixedGraph;

    fn deref(&self) -> &MixedGraph {
        &self.0
    }
}

impl fmt::Display for Admg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Shorthand for building vertices in tests and examples: `v("A", 2)`.
pub fn v(cluster: &str, index: u32) -> MicroVertex {
    MicroVertex::new(cluster, index)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn abc() -> Vec<MicroVertex> {
        vec![v("B", 1), v("A", 2), v("A", 1), v("C", 1)]
    }

    #[test]
    fn vertices_are_sorted_by_cluster_then_index() {
        let g = MixedGraph::empty(abc());
        let names: Vec<String> = g.vertices().iter().map(|x| x.to_string()).collect();
        assert_eq!(names, ["A.1", "A.2", "B.1", "C.1"]);
    }

    #[test]
    fn parse_vertex_round_trips() {
        let x: MicroVertex = "Z1.3".parse().unwrap();
        assert_eq!(x, v("Z1", 3));
        assert!("A.0".parse::<MicroVertex>().is_err());
        assert!("A".parse::<MicroVertex>().is_err());
        assert!(".1".parse::<MicroVertex>().is_err());
    }

    #[test]
    fn cycle_detection() {
        let vs = abc();
        let (a1, a2, b1) = (v("A", 1), v("A", 2), v("B", 1));
        let g = MixedGraph::from_edges(vs.clone(), [(&a1, &a2), (&a2, &b1)], []).unwrap();
        assert!(g.is_acyclic());
        let g = MixedGraph::from_edges(vs, [(&a1, &a2), (&a2, &b1), (&b1, &a1)], []).unwrap();
        assert!(!g.is_acyclic());
        assert!(Admg::new(g).is_err());
    }

    #[test]
    fn mutilation_removes_the_right_edges() {
        let (a1, a2, b1, c1) = (v("A", 1), v("A", 2), v("B", 1), v("C", 1));
        let g = MixedGraph::from_edges(abc(), [(&a1, &b1), (&b1, &c1), (&a2, &b1)], [(&b1, &c1), (&a1, &a2)])
            .unwrap();
        let over: VertexSet = [b1.clone()].into_iter().collect();
        let under: VertexSet = [a1.clone()].into_iter().collect();
        let m = g.mutilate(&over, &VertexSet::new()).unwrap();
        assert_eq!(m.to_string(), "[B.1 -> C.1, A.1 <-> A.2]");
        let m = g.mutilate(&VertexSet::new(), &under).unwrap();
        assert_eq!(m.to_string(), "[A.2 -> B.1, B.1 -> C.1, A.1 <-> A.2, B.1 <-> C.1]");
    }

    #[test]
    fn ancestors_are_reflexive() {
        let (a1, a2, b1) = (v("A", 1), v("A", 2), v("B", 1));
        let g = MixedGraph::from_edges(abc(), [(&a1, &a2), (&a2, &b1)], []).unwrap();
        let s: VertexSet = [a2.clone()].into_iter().collect();
        let anc = g.ancestors(&s).unwrap();
        assert_eq!(anc.to_string(), "{A.1, A.2}");
    }
}
