//! Structures of interest: connected fragments in which every vertex has at
//! most one outgoing edge, except forks with two outgoing edges and nothing
//! pointing in. They stand in for d-connecting paths when the micro graph is
//! only known up to its cluster skeleton.

mod extract;
mod promote;
mod search;

use std::fmt;

use fixedbitset::FixedBitSet;
use thiserror::Error;

use crate::graph::paths::Path;
use crate::graph::{Admg, GraphError, MicroVertex, MixedGraph, VertexSet};
use crate::text::write_micro_graph;

pub use extract::extract_connecting_path;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StructureError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("graph is not a structure of interest")]
    NotAStructure,
    #[error("query sets {0} and {1} overlap")]
    Overlap(&'static str, &'static str),
    #[error("host graph and acyclic base have different vertices")]
    BaseMismatch,
    #[error("allowed roots must contain every vertex of y and z")]
    RootsMissYZ,
    #[error("allowed roots must contain all of x or none of it")]
    RootsSplitX,
    #[error("path is not d-connecting between x and y given z")]
    NotDConnecting,
    #[error("structure does not connect x and y given z")]
    NotConnecting,
}

/// A structure of interest, stored on its own vertices.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Structure {
    graph: MixedGraph,
    roots: VertexSet,
}

/// Connected when edges are read as undirected; out-degree at most one
/// except for vertices with exactly two outgoing edges and no arrowhead
/// pointing in.
pub fn is_structure_of_interest(g: &MixedGraph) -> bool {
    if g.is_empty() {
        return false;
    }
    let shape_ok = (0..g.len()).all(|v| {
        let out = g.children_mask(v).count_ones(..);
        out <= 1 || (out == 2 && g.parents_mask(v).is_clear() && g.siblings_mask(v).is_clear())
    });
    shape_ok && is_connected(g)
}

fn is_connected(g: &MixedGraph) -> bool {
    let mut seen = FixedBitSet::with_capacity(g.len());
    let mut stack = vec![0];
    seen.insert(0);
    while let Some(v) = stack.pop() {
        for w in g.children(v).chain(g.parents(v)).chain(g.siblings(v)) {
            if !seen.put(w) {
                stack.push(w);
            }
        }
    }
    seen.count_ones(..) == g.len()
}

impl Structure {
    pub fn new(graph: MixedGraph) -> Result<Self, StructureError> {
        if !is_structure_of_interest(&graph) {
            return Err(StructureError::NotAStructure);
        }
        let roots = (0..graph.len())
            .filter(|&v| graph.children_mask(v).is_clear())
            .map(|v| graph.vertex(v).clone())
            .collect();
        Ok(Structure { graph, roots })
    }

    /// The fragment of `host` made of the given edges, on the vertices they
    /// touch.
    pub(crate) fn from_host_edges(
        host: &MixedGraph,
        directed: impl IntoIterator<Item = (usize, usize)>,
        bidirected: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self, StructureError> {
        let directed: Vec<_> = directed.into_iter().collect();
        let bidirected: Vec<_> = bidirected.into_iter().collect();
        let verts = directed
            .iter()
            .chain(&bidirected)
            .flat_map(|&(a, b)| [host.vertex(a).clone(), host.vertex(b).clone()]);
        let mut g = MixedGraph::empty(verts);
        let at = |g: &MixedGraph, i: usize| g.index_of(host.vertex(i)).unwrap();
        for (a, b) in directed {
            let (p, q) = (at(&g, a), at(&g, b));
            g.insert_directed(p, q);
        }
        for (a, b) in bidirected {
            let (p, q) = (at(&g, a), at(&g, b));
            g.insert_bidirected(p, q);
        }
        Structure::new(g)
    }

    pub fn graph(&self) -> &MixedGraph {
        &self.graph
    }

    pub fn roots(&self) -> &VertexSet {
        &self.roots
    }

    pub fn vertices(&self) -> VertexSet {
        self.graph.vertex_set()
    }

    pub fn contains(&self, v: &MicroVertex) -> bool {
        self.graph.index_of(v).is_some()
    }

    /// The same edges as a graph on `vertices` (which must contain ours).
    pub fn embed(&self, vertices: &MixedGraph) -> Result<MixedGraph, GraphError> {
        let mut g = MixedGraph::on_sorted(vertices.shared_vertices());
        let at = |v: &MicroVertex| g.index_of(v).ok_or_else(|| GraphError::UnknownVertex(v.clone()));
        let mut directed = Vec::new();
        for (a, b) in self.graph.directed_edges() {
            directed.push((at(self.graph.vertex(a))?, at(self.graph.vertex(b))?));
        }
        let mut bidirected = Vec::new();
        for (a, b) in self.graph.bidirected_edges() {
            bidirected.push((at(self.graph.vertex(a))?, at(self.graph.vertex(b))?));
        }
        for (a, b) in directed {
            g.insert_directed(a, b);
        }
        for (a, b) in bidirected {
            g.insert_bidirected(a, b);
        }
        Ok(g)
    }

    /// Every edge of the structure is an edge of `host`.
    pub fn lies_in(&self, host: &MixedGraph) -> bool {
        self.embed(host).map(|e| e.is_edge_subgraph_of(host)).unwrap_or(false)
    }

    /// Micro-graph text with a trailing `roots:` line.
    pub fn to_text(&self) -> String {
        let mut s = write_micro_graph(&self.graph, None);
        let roots: Vec<String> = self.roots.iter().map(|r| r.to_string()).collect();
        s.push_str("roots:");
        for r in roots {
            s.push(' ');
            s.push_str(&r);
        }
        s.push('\n');
        s
    }
}

impl fmt::Display for Structure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} roots {}", self.graph, self.roots)
    }
}

/// Whether `s` connects `x` and `y` given `z`: it meets both `x` and `y`, its
/// roots lie in `x ∪ y ∪ z`, and none of its other vertices is in `z`.
pub fn connects(s: &Structure, x: &VertexSet, y: &VertexSet, z: &VertexSet) -> bool {
    let vs = s.vertices();
    let meets = |set: &VertexSet| set.iter().any(|v| vs.contains(v));
    meets(x)
        && meets(y)
        && s.roots.iter().all(|r| x.contains(r) || y.contains(r) || z.contains(r))
        && vs.iter().filter(|v| !s.roots.contains(v)).all(|v| !z.contains(v))
}

/// Everything the search needs: where to look, what to connect, where roots
/// may sit, and which graph the result must stay acyclic with.
#[derive(Debug, Clone)]
pub struct SearchConstraints {
    host: MixedGraph,
    base: Admg,
    x: FixedBitSet,
    y: FixedBitSet,
    z: FixedBitSet,
    x_roots_allowed: bool,
}

impl SearchConstraints {
    /// `root_allowed` must contain `y ∪ z`, and contain either all of `x`
    /// or none of it.
    pub fn new(
        host: MixedGraph,
        x: &VertexSet,
        y: &VertexSet,
        z: &VertexSet,
        root_allowed: &VertexSet,
        acyclic_base: Admg,
    ) -> Result<Self, StructureError> {
        if host.vertices() != acyclic_base.vertices() {
            return Err(StructureError::BaseMismatch);
        }
        if !x.is_disjoint(y) {
            return Err(StructureError::Overlap("x", "y"));
        }
        if !x.is_disjoint(z) {
            return Err(StructureError::Overlap("x", "z"));
        }
        if !y.is_disjoint(z) {
            return Err(StructureError::Overlap("y", "z"));
        }
        if !y.is_subset(root_allowed) || !z.is_subset(root_allowed) {
            return Err(StructureError::RootsMissYZ);
        }
        let x_in = x.intersection(root_allowed).len();
        if x_in != 0 && x_in != x.len() {
            return Err(StructureError::RootsSplitX);
        }
        Ok(SearchConstraints {
            x: host.mask(x)?,
            y: host.mask(y)?,
            z: host.mask(z)?,
            x_roots_allowed: x_in == x.len(),
            host,
            base: acyclic_base,
        })
    }

    pub fn host(&self) -> &MixedGraph {
        &self.host
    }

    pub fn acyclic_base(&self) -> &Admg {
        &self.base
    }

    pub fn x(&self) -> VertexSet {
        self.host.set_of(&self.x)
    }

    pub fn y(&self) -> VertexSet {
        self.host.set_of(&self.y)
    }

    pub fn z(&self) -> VertexSet {
        self.host.set_of(&self.z)
    }

    /// May a vertex of `x` be a root?
    pub fn x_roots_allowed(&self) -> bool {
        self.x_roots_allowed
    }

    /// Does `s` meet every requirement a search result must meet?
    pub fn accepts(&self, s: &Structure) -> bool {
        let (x, y, z) = (self.x(), self.y(), self.z());
        let roots_ok = s
            .roots()
            .iter()
            .all(|r| y.contains(r) || z.contains(r) || (self.x_roots_allowed && x.contains(r)));
        let Ok(embedded) = s.embed(&self.host) else {
            return false;
        };
        connects(s, &x, &y, &z)
            && roots_ok
            && embedded.is_edge_subgraph_of(&self.host)
            && self.base.union(&embedded).map(|u| u.is_acyclic()).unwrap_or(false)
    }
}

/// Exact search for a structure of interest inside the host that connects
/// `x` and `y` given `z`, keeps its roots where allowed, and is acyclic
/// together with the base. `None` means no such structure exists.
///
/// The first hit in canonical vertex order is returned, so results are
/// deterministic.
pub fn find_connecting_structure(k: &SearchConstraints) -> Option<Structure> {
    let problem = search::Problem {
        host: &k.host,
        base: k.base.graph(),
        x: &k.x,
        y: &k.y,
        z: &k.z,
        x_roots_allowed: k.x_roots_allowed,
        tails_avoid_xy: false,
    };
    let found = search::search(&problem)?;
    let s = promote::promote(&found.directed_graph(&k.host), &found, &k.x, &k.y, &k.z, k.x_roots_allowed)
        .expect("a connecting configuration always promotes to a structure");
    debug_assert!(k.accepts(&s));
    Some(s)
}

/// Prunes `s` to a structure still accepted by `k` that meets `x` and `y` in
/// exactly one vertex each, if one exists inside `s`.
pub fn normalize(s: &Structure, k: &SearchConstraints) -> Option<Structure> {
    let g = s.graph();
    let base = Admg::new(g.clone()).ok()?;
    let restrict = |m: &FixedBitSet| -> FixedBitSet {
        let mut out = FixedBitSet::with_capacity(g.len());
        for i in m.ones() {
            if let Some(j) = g.index_of(k.host.vertex(i)) {
                out.insert(j);
            }
        }
        out
    };
    let (x, y, z) = (restrict(&k.x), restrict(&k.y), restrict(&k.z));
    let problem = search::Problem {
        host: g,
        base: base.graph(),
        x: &x,
        y: &y,
        z: &z,
        x_roots_allowed: k.x_roots_allowed,
        tails_avoid_xy: true,
    };
    let found = search::search(&problem)?;
    let out = promote::promote(&found.directed_graph(g), &found, &x, &y, &z, k.x_roots_allowed).ok()?;
    k.accepts(&out).then_some(out)
}

/// Turns a d-connecting path of `g` into a structure of interest that
/// connects `x` and `y` given `z`, by hanging a directed path into `z` off
/// every collider outside `z` and repairing forks that the new path enters.
pub fn promote_path_to_structure(
    g: &Admg,
    path: &Path,
    x: &VertexSet,
    y: &VertexSet,
    z: &VertexSet,
) -> Result<Structure, StructureError> {
    if !path.is_d_connecting(g, x, y, z) {
        return Err(StructureError::NotDConnecting);
    }
    let idx: Vec<usize> = path.vertices.iter().map(|v| g.index_of(v).unwrap()).collect();
    let cfg = search::Config { path: idx, steps: path.steps.clone(), extra: Vec::new() };
    promote::promote(g, &cfg, &g.mask(x)?, &g.mask(y)?, &g.mask(z)?, true)
}

/// d-connection decided by searching for a connecting structure inside `g`
/// itself. Agrees with [`crate::graph::d_separated`] negated.
pub fn structure_d_connected(g: &Admg, x: &VertexSet, y: &VertexSet, z: &VertexSet) -> Result<bool, StructureError> {
    if x.is_empty() || y.is_empty() {
        return Ok(false);
    }
    let all = g.vertex_set();
    let k = SearchConstraints::new(g.graph().clone(), x, y, z, &all, g.clone())?;
    Ok(find_connecting_structure(&k).is_some())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::v;

    fn set(vs: &[MicroVertex]) -> VertexSet {
        vs.iter().cloned().collect()
    }

    #[test]
    fn fork_with_incoming_edge_is_not_a_structure() {
        let (a, b, c, d, e) = (v("A", 1), v("B", 1), v("C", 1), v("D", 1), v("E", 1));
        let g = MixedGraph::from_edges(
            [a.clone(), b.clone(), c.clone(), d.clone(), e.clone()],
            [(&a, &b), (&c, &b), (&b, &d), (&b, &e)],
            [],
        )
        .unwrap();
        assert!(!is_structure_of_interest(&g));
        let g = MixedGraph::from_edges([b.clone(), d.clone(), e.clone()], [(&b, &d), (&b, &e)], []).unwrap();
        assert!(is_structure_of_interest(&g));
    }

    #[test]
    fn disconnected_is_not_a_structure() {
        let (a, b, c) = (v("A", 1), v("B", 1), v("C", 1));
        let g = MixedGraph::from_edges([a.clone(), b.clone(), c], [(&a, &b)], []).unwrap();
        assert!(!is_structure_of_interest(&g));
    }

    #[test]
    fn connects_checks_roots_and_meets() {
        let (x, y, r) = (v("X", 1), v("Y", 1), v("R", 1));
        let single = Structure::new(MixedGraph::empty([x.clone()])).unwrap();
        assert!(!connects(&single, &set(&[x.clone()]), &set(&[y.clone()]), &set(&[])));
        let chain = Structure::new(MixedGraph::from_edges([x.clone(), r.clone()], [(&x, &r)], []).unwrap()).unwrap();
        assert!(!connects(&chain, &set(&[x.clone()]), &set(&[y]), &set(&[])));
        assert_eq!(chain.roots(), &set(&[r]));
    }

    #[test]
    fn chain_and_collider() {
        let (a, b, c) = (v("A", 1), v("B", 1), v("C", 1));
        let vs = [a.clone(), b.clone(), c.clone()];
        let chain = Admg::new(MixedGraph::from_edges(vs.clone(), [(&a, &b), (&b, &c)], []).unwrap()).unwrap();
        assert!(!structure_d_connected(&chain, &set(&[a.clone()]), &set(&[c.clone()]), &set(&[b.clone()])).unwrap());
        let coll = Admg::new(MixedGraph::from_edges(vs, [(&a, &b), (&c, &b)], []).unwrap()).unwrap();
        assert!(structure_d_connected(&coll, &set(&[a.clone()]), &set(&[c.clone()]), &set(&[b.clone()])).unwrap());
        assert!(!structure_d_connected(&coll, &set(&[a]), &set(&[c]), &set(&[])).unwrap());
    }

    #[test]
    fn edgeless_host_has_nothing() {
        let (x, y) = (v("X", 1), v("Y", 1));
        let g = MixedGraph::empty([x.clone(), y.clone()]);
        let all = g.vertex_set();
        let k = SearchConstraints::new(g.clone(), &set(&[x]), &set(&[y]), &set(&[]), &all, Admg::new(g).unwrap())
            .unwrap();
        assert!(find_connecting_structure(&k).is_none());
    }

    #[test]
    fn root_policy_is_checked() {
        let (x1, x2, y) = (v("X", 1), v("X", 2), v("Y", 1));
        let g = MixedGraph::empty([x1.clone(), x2.clone(), y.clone()]);
        let base = Admg::new(g.clone()).unwrap();
        let e = SearchConstraints::new(g.clone(), &set(&[x1.clone(), x2]), &set(&[y.clone()]), &set(&[]), &set(&[x1, y]), base);
        assert_eq!(e.unwrap_err(), StructureError::RootsSplitX);
    }
}
