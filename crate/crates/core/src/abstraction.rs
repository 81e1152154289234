//! Moving between the cluster level and the micro level: projection,
//! compatibility, the canonical graph and the unfolded graph.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::cdag::{CDag, InvalidCDag};
use crate::graph::{Admg, MicroVertex, MixedGraph};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AbstractionError {
    #[error(transparent)]
    Invalid(#[from] InvalidCDag),
    #[error("graph vertices do not match the micro vertices of the C-DAG")]
    VertexMismatch,
}

/// Cluster graph obtained by collapsing every micro edge of `g` onto its
/// clusters. Clusters and cardinalities come from `skeleton`, which must
/// cover exactly the vertices of `g`.
pub fn project(g: &MixedGraph, skeleton: &CDag) -> Result<CDag, AbstractionError> {
    if *g.vertices() != *skeleton.micro_vertices() {
        return Err(AbstractionError::VertexMismatch);
    }
    let mut b = CDag::builder();
    for c in skeleton.clusters() {
        b = b.cluster(&c.name, c.cardinality);
    }
    for (u, v) in g.directed_edges() {
        b = b.directed(g.vertex(u).cluster(), g.vertex(v).cluster());
    }
    for (a, c) in g.bidirected_edges() {
        b = b.bidirected(g.vertex(a).cluster(), g.vertex(c).cluster());
    }
    Ok(b.build().expect("clusters copied from a valid C-DAG"))
}

/// `g` is acyclic, lives on the micro vertices of `c`, and projects exactly
/// onto the edges of `c`.
pub fn is_compatible(g: &MixedGraph, c: &CDag) -> Result<bool, AbstractionError> {
    let p = project(g, c)?;
    Ok(g.is_acyclic() && p.directed() == c.directed() && p.bidirected() == c.bidirected())
}

fn micro(c: &CDag, cluster: usize, index: u32) -> MicroVertex {
    MicroVertex::new(&c.clusters()[cluster].name, index)
}

/// The smallest compatible graph built by fixed rules: every bidirected
/// cluster edge becomes all its distinct micro pairs, a self-loop on `V`
/// becomes `V.i -> V.j` for `i < j`, and `V -> W` becomes
/// `V.1 -> W.k` where `k` is the size of `W`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CanonicalGraph {
    graph: Admg,
    source: CDag,
}

impl CanonicalGraph {
    pub fn new(c: &CDag) -> Result<Self, AbstractionError> {
        c.validate()?;
        let mut g = MixedGraph::on_sorted(c.micro_vertices());
        let idx = |cl: usize, i: u32| g_index(c, cl, i);
        for &(a, b) in c.bidirected() {
            let (ka, kb) = (c.clusters()[a].cardinality, c.clusters()[b].cardinality);
            for i in 1..=ka {
                for j in 1..=kb {
                    if a != b || i < j {
                        g.insert_bidirected(idx(a, i), idx(b, j));
                    }
                }
            }
        }
        for &(a, b) in c.directed() {
            let kb = c.clusters()[b].cardinality;
            if a == b {
                for i in 1..=kb {
                    for j in i + 1..=kb {
                        g.insert_directed(idx(a, i), idx(a, j));
                    }
                }
            } else {
                g.insert_directed(idx(a, 1), idx(b, kb));
            }
        }
        Ok(CanonicalGraph { graph: Admg::new(g).expect("canonical graph of a valid C-DAG is acyclic"), source: c.clone() })
    }

    pub fn graph(&self) -> &Admg {
        &self.graph
    }

    pub fn source(&self) -> &CDag {
        &self.source
    }
}

// Position of micro vertex `cluster.index` in the sorted vertex list.
fn g_index(c: &CDag, cluster: usize, index: u32) -> usize {
    let target = micro(c, cluster, index);
    let name = target.cluster();
    let before: usize = c
        .clusters()
        .iter()
        .filter(|cl| cl.name.as_str() < name)
        .map(|cl| cl.cardinality as usize)
        .sum();
    before + index as usize - 1
}

/// The canonical graph plus every directed micro edge that realizes a
/// cluster edge and keeps the canonical graph acyclic when added alone.
/// The result may contain directed cycles.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnfoldedGraph {
    graph: MixedGraph,
    canonical: CanonicalGraph,
    eligible: BTreeSet<(usize, usize)>,
}

impl UnfoldedGraph {
    pub fn new(c: &CDag) -> Result<Self, AbstractionError> {
        Ok(Self::from_canonical(CanonicalGraph::new(c)?))
    }

    pub fn from_canonical(canonical: CanonicalGraph) -> Self {
        let c = canonical.source();
        let base = canonical.graph();
        let n = base.len();
        let reach: Vec<_> = (0..n)
            .map(|i| {
                let mut m = fixedbitset::FixedBitSet::with_capacity(n);
                m.insert(i);
                base.descendants_mask(&m)
            })
            .collect();
        let mut graph = base.graph().clone();
        let mut eligible = BTreeSet::new();
        for &(a, b) in c.directed() {
            let (ka, kb) = (c.clusters()[a].cardinality, c.clusters()[b].cardinality);
            for i in 1..=ka {
                for j in 1..=kb {
                    let (u, v) = (g_index(c, a, i), g_index(c, b, j));
                    if u == v || base.has_directed(u, v) {
                        continue;
                    }
                    // Adding u -> v closes a cycle iff v already reaches u.
                    if !reach[v].contains(u) {
                        graph.insert_directed(u, v);
                        eligible.insert((u, v));
                    }
                }
            }
        }
        UnfoldedGraph { graph, canonical, eligible }
    }

    pub fn graph(&self) -> &MixedGraph {
        &self.graph
    }

    pub fn canonical(&self) -> &CanonicalGraph {
        &self.canonical
    }

    /// Eligible directed edges that are not already canonical, as vertex
    /// index pairs.
    pub fn eligible(&self) -> &BTreeSet<(usize, usize)> {
        &self.eligible
    }

    pub fn is_eligible(&self, from: usize, to: usize) -> bool {
        self.eligible.contains(&(from, to))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::v;

    #[test]
    fn vertex_positions_follow_name_order() {
        let c = CDag::builder().cluster("B", 2).cluster("A", 3).build().unwrap();
        let vs = c.micro_vertices();
        for (ci, cl) in c.clusters().iter().enumerate() {
            for i in 1..=cl.cardinality {
                assert_eq!(vs[g_index(&c, ci, i)], v(&cl.name, i));
            }
        }
    }

    #[test]
    fn canonical_rules() {
        let c = CDag::builder()
            .cluster("A", 3)
            .cluster("B", 2)
            .directed("A", "A")
            .both_ways("A", "B")
            .bidirected("B", "B")
            .build()
            .unwrap();
        let g = CanonicalGraph::new(&c).unwrap();
        assert_eq!(
            g.graph().to_string(),
            "[A.1 -> A.2, A.1 -> A.3, A.1 -> B.2, A.2 -> A.3, B.1 -> A.3, B.1 <-> B.2]"
        );
        assert!(is_compatible(g.graph(), &c).unwrap());
    }

    #[test]
    fn invalid_cdag_has_no_canonical_graph() {
        let c = CDag::builder().cluster("A", 1).directed("A", "A").build().unwrap();
        assert!(CanonicalGraph::new(&c).is_err());
    }
}
