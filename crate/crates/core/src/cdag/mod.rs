//! Cluster graphs: named clusters of interchangeable micro variables, joined
//! by directed edges (possibly cyclic, self-loops included) and bidirected
//! edges (self-pairs included).

mod parse;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{MicroVertex, VertexSet};

pub use parse::{ParseError, ParseErrorKind};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CDagError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("unknown cluster `{0}`")]
    UnknownCluster(String),
    #[error("cluster `{0}` is declared twice")]
    DuplicateCluster(String),
    #[error("cluster `{0}` has cardinality 0")]
    ZeroCardinality(String),
    #[error("invalid cluster name `{0}`")]
    BadName(String),
}

/// Why a C-DAG admits no compatible acyclic micro graph.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InvalidCDag {
    #[error("directed cycle through singleton clusters: {}", .0.join(" -> "))]
    SingletonCycle(Vec<String>),
    #[error("bidirected self-loop on singleton cluster `{0}`")]
    SingletonBidirectedLoop(String),
}

pub(crate) fn valid_name(name: &str) -> bool {
    !name.is_empty() && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// A set of cluster names.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ClusterSet(BTreeSet<String>);

impl ClusterSet {
    pub fn new() -> Self {
        ClusterSet(BTreeSet::new())
    }

    /// Parses `"A,B"`; whitespace around names is ignored, empty input is the
    /// empty set.
    pub fn parse_list(s: &str) -> Result<Self, CDagError> {
        s.split(',')
            .map(str::trim)
            .filter(|t| !t.is_empty())
            .map(|t| if valid_name(t) { Ok(t.to_string()) } else { Err(CDagError::BadName(t.to_string())) })
            .collect::<Result<BTreeSet<_>, _>>()
            .map(ClusterSet)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.0.contains(name)
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.0.iter().map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_disjoint(&self, other: &ClusterSet) -> bool {
        self.0.is_disjoint(&other.0)
    }

    pub fn union(&self, other: &ClusterSet) -> ClusterSet {
        ClusterSet(self.0.union(&other.0).cloned().collect())
    }
}

impl<S: Into<String>> FromIterator<S> for ClusterSet {
    fn from_iter<I: IntoIterator<Item = S>>(iter: I) -> Self {
        ClusterSet(iter.into_iter().map(Into::into).collect())
    }
}

impl fmt::Display for ClusterSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<&str> = self.iter().collect();
        write!(f, "{{{}}}", names.join(", "))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Cluster {
    pub name: String,
    pub cardinality: u32,
}

/// A cluster graph. Clusters keep declaration order; edges are stored by
/// cluster position and printed sorted by name.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CDag {
    clusters: Vec<Cluster>,
    by_name: BTreeMap<String, usize>,
    directed: BTreeSet<(usize, usize)>,
    bidirected: BTreeSet<(usize, usize)>,
}

impl CDag {
    pub fn builder() -> CDagBuilder {
        CDagBuilder::default()
    }

    /// Parses the line-oriented text format (see `docs/formats.md`).
    pub fn parse(text: &str) -> Result<Self, CDagError> {
        Ok(parse::parse(text)?)
    }

    pub fn clusters(&self) -> &[Cluster] {
        &self.clusters
    }

    pub fn cluster_index(&self, name: &str) -> Option<usize> {
        self.by_name.get(name).copied()
    }

    pub fn cardinality(&self, name: &str) -> Option<u32> {
        self.cluster_index(name).map(|i| self.clusters[i].cardinality)
    }

    /// Directed edges as cluster positions; self-loops are `(i, i)`.
    pub fn directed(&self) -> &BTreeSet<(usize, usize)> {
        &self.directed
    }

    /// Bidirected edges as cluster positions `(i, j)` with `i <= j`.
    pub fn bidirected(&self) -> &BTreeSet<(usize, usize)> {
        &self.bidirected
    }

    pub fn has_directed(&self, from: &str, to: &str) -> bool {
        match (self.cluster_index(from), self.cluster_index(to)) {
            (Some(a), Some(b)) => self.directed.contains(&(a, b)),
            _ => false,
        }
    }

    pub fn has_bidirected(&self, a: &str, b: &str) -> bool {
        match (self.cluster_index(a), self.cluster_index(b)) {
            (Some(i), Some(j)) => self.bidirected.contains(&(i.min(j), i.max(j))),
            _ => false,
        }
    }

    pub fn total_micro_vertices(&self) -> usize {
        self.clusters.iter().map(|c| c.cardinality as usize).sum()
    }

    /// All micro vertices, sorted.
    pub fn micro_vertices(&self) -> Arc<[MicroVertex]> {
        let mut vs: Vec<MicroVertex> = self
            .clusters
            .iter()
            .flat_map(|c| (1..=c.cardinality).map(move |i| MicroVertex::new(&c.name, i)))
            .collect();
        vs.sort();
        vs.into()
    }

    /// Micro vertices of the named clusters.
    pub fn micro_vertices_of(&self, set: &ClusterSet) -> Result<VertexSet, CDagError> {
        let mut out = VertexSet::new();
        for name in set.iter() {
            let k = self.cardinality(name).ok_or_else(|| CDagError::UnknownCluster(name.to_string()))?;
            for i in 1..=k {
                out.insert(MicroVertex::new(name, i));
            }
        }
        Ok(out)
    }

    pub fn check_clusters(&self, set: &ClusterSet) -> Result<(), CDagError> {
        match set.iter().find(|n| self.cluster_index(n).is_none()) {
            Some(n) => Err(CDagError::UnknownCluster(n.to_string())),
            None => Ok(()),
        }
    }

    /// Checks that some acyclic micro graph is compatible with `self`: no
    /// directed cycle (self-loops included) running only through clusters of
    /// size 1, and no bidirected self-loop on such a cluster.
    pub fn validate(&self) -> Result<(), InvalidCDag> {
        let single = |i: usize| self.clusters[i].cardinality == 1;
        for &(a, b) in &self.bidirected {
            if a == b && single(a) {
                return Err(InvalidCDag::SingletonBidirectedLoop(self.clusters[a].name.clone()));
            }
        }
        let n = self.clusters.len();
        let mut succ: Vec<Vec<usize>> = vec![Vec::new(); n];
        for &(a, b) in &self.directed {
            if single(a) && single(b) {
                succ[a].push(b);
            }
        }
        // Colour DFS; report the first cycle found.
        let mut state = vec![0u8; n];
        let mut stack: Vec<usize> = Vec::new();
        fn visit(v: usize, succ: &[Vec<usize>], state: &mut [u8], stack: &mut Vec<usize>) -> Option<Vec<usize>> {
            state[v] = 1;
            stack.push(v);
            for &w in &succ[v] {
                if state[w] == 1 {
                    let pos = stack.iter().position(|&s| s == w).unwrap();
                    let mut cyc = stack[pos..].to_vec();
                    cyc.push(w);
                    return Some(cyc);
                }
                if state[w] == 0 {
                    if let Some(c) = visit(w, succ, state, stack) {
                        return Some(c);
                    }
                }
            }
            stack.pop();
            state[v] = 2;
            None
        }
        for v in 0..n {
            if state[v] == 0 {
                if let Some(cyc) = visit(v, &succ, &mut state, &mut stack) {
                    let names = cyc.into_iter().map(|i| self.clusters[i].name.clone()).collect();
                    return Err(InvalidCDag::SingletonCycle(names));
                }
            }
        }
        Ok(())
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_ok()
    }

    /// Same edges, every cardinality capped at 3.
    pub fn reduce_to_three(&self) -> CDag {
        self.with_cardinalities(|k| k.min(3))
    }

    /// Same edges, cardinalities rewritten by `f` (which must stay >= 1).
    pub fn with_cardinalities(&self, f: impl Fn(u32) -> u32) -> CDag {
        let mut c = self.clone();
        for cl in &mut c.clusters {
            cl.cardinality = f(cl.cardinality);
            assert!(cl.cardinality >= 1);
        }
        c
    }

    /// Canonical text: clusters in declaration order, then directed edges,
    /// then bidirected edges, each block sorted by cluster name.
    pub fn to_text(&self) -> String {
        self.to_string()
    }

    pub(crate) fn name(&self, i: usize) -> &str {
        &self.clusters[i].name
    }

    /// Directed edges by name, sorted.
    pub fn directed_names(&self) -> Vec<(&str, &str)> {
        let mut e: Vec<(&str, &str)> = self.directed.iter().map(|&(a, b)| (self.name(a), self.name(b))).collect();
        e.sort();
        e
    }

    /// Bidirected edges by name, each pair ordered and the list sorted.
    pub fn bidirected_names(&self) -> Vec<(&str, &str)> {
        let mut e: Vec<(&str, &str)> = self
            .bidirected
            .iter()
            .map(|&(a, b)| {
                let (p, q) = (self.name(a), self.name(b));
                if p <= q {
                    (p, q)
                } else {
                    (q, p)
                }
            })
            .collect();
        e.sort();
        e
    }
}

impl fmt::Display for CDag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.clusters {
            writeln!(f, "cluster {} {}", c.name, c.cardinality)?;
        }
        for (a, b) in self.directed_names() {
            writeln!(f, "edge {a} -> {b}")?;
        }
        for (a, b) in self.bidirected_names() {
            writeln!(f, "edge {a} <-> {b}")?;
        }
        Ok(())
    }
}

impl std::str::FromStr for CDag {
    type Err = CDagError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        CDag::parse(s)
    }
}

#[derive(Debug, Clone, Default)]
pub struct CDagBuilder {
    clusters: Vec<Cluster>,
    directed: Vec<(String, String)>,
    bidirected: Vec<(String, String)>,
}

impl CDagBuilder {
    pub fn cluster(mut self, name: &str, cardinality: u32) -> Self {
        self.clusters.push(Cluster { name: name.to_string(), cardinality });
        self
    }

    pub fn directed(mut self, from: &str, to: &str) -> Self {
        self.directed.push((from.to_string(), to.to_string()));
        self
    }

    /// Adds `a -> b` and `b -> a`.
    pub fn both_ways(self, a: &str, b: &str) -> Self {
        self.directed(a, b).directed(b, a)
    }

    pub fn bidirected(mut self, a: &str, b: &str) -> Self {
        self.bidirected.push((a.to_string(), b.to_string()));
        self
    }

    pub fn build(self) -> Result<CDag, CDagError> {
        let mut by_name = BTreeMap::new();
        for (i, c) in self.clusters.iter().enumerate() {
            if !valid_name(&c.name) {
                return Err(CDagError::BadName(c.name.clone()));
            }
            if c.cardinality == 0 {
                return Err(CDagError::ZeroCardinality(c.name.clone()));
            }
            if by_name.insert(c.name.clone(), i).is_some() {
                return Err(CDagError::DuplicateCluster(c.name.clone()));
            }
        }
        let look = |n: &str| by_name.get(n).copied().ok_or_else(|| CDagError::UnknownCluster(n.to_string()));
        let mut directed = BTreeSet::new();
        for (a, b) in &self.directed {
            directed.insert((look(a)?, look(b)?));
        }
        let mut bidirected = BTreeSet::new();
        for (a, b) in &self.bidirected {
            let (i, j) = (look(a)?, look(b)?);
            bidirected.insert((i.min(j), i.max(j)));
        }
        Ok(CDag { clusters: self.clusters, by_name, directed, bidirected })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn singleton_cycles_are_invalid() {
        let c = CDag::builder().cluster("A", 1).cluster("B", 1).both_ways("A", "B").build().unwrap();
        assert!(matches!(c.validate(), Err(InvalidCDag::SingletonCycle(_))));
        let c = CDag::builder().cluster("A", 2).cluster("B", 1).both_ways("A", "B").build().unwrap();
        assert!(c.validate().is_ok());
        let c = CDag::builder().cluster("A", 1).directed("A", "A").build().unwrap();
        assert!(c.validate().is_err());
        let c = CDag::builder().cluster("A", 1).bidirected("A", "A").build().unwrap();
        assert_eq!(c.validate(), Err(InvalidCDag::SingletonBidirectedLoop("A".into())));
        let c = CDag::builder().cluster("A", 2).directed("A", "A").bidirected("A", "A").build().unwrap();
        assert!(c.validate().is_ok());
    }

    #[test]
    fn reduction_caps_at_three() {
        let c = CDag::builder().cluster("A", 7).cluster("B", 2).directed("A", "B").build().unwrap();
        let r = c.reduce_to_three();
        assert_eq!(r.cardinality("A"), Some(3));
        assert_eq!(r.cardinality("B"), Some(2));
        assert_eq!(r.directed(), c.directed());
    }

    #[test]
    fn cluster_lists() {
        let s = ClusterSet::parse_list(" A, B ,,").unwrap();
        assert_eq!(s.to_string(), "{A, B}");
        assert!(ClusterSet::parse_list("A.1").is_err());
        assert!(ClusterSet::parse_list("").unwrap().is_empty());
    }
}
