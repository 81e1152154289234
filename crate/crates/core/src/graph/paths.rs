//! Explicit paths, and a path-enumerating d-separation check.
//!
//! [`d_separated_by_paths`] lists every simple path, which is exponential; it
//! exists to cross-check [`super::d_separated`] on small graphs.

use std::fmt;

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use super::{GraphError, MicroVertex, MixedGraph, VertexSet};

/// How consecutive path vertices `a, b` are joined.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Step {
    /// `a -> b`
    Forward,
    /// `a <- b`
    Backward,
    /// `a <-> b`
    Bidirected,
}

impl Step {
    /// Does the edge carry an arrowhead at its first endpoint?
    pub fn head_at_start(self) -> bool {
        matches!(self, Step::Backward | Step::Bidirected)
    }

    /// Does the edge carry an arrowhead at its second endpoint?
    pub fn head_at_end(self) -> bool {
        matches!(self, Step::Forward | Step::Bidirected)
    }

    pub fn reversed(self) -> Step {
        match self {
            Step::Forward => Step::Backward,
            Step::Backward => Step::Forward,
            Step::Bidirected => Step::Bidirected,
        }
    }

    fn arrow(self) -> &'static str {
        match self {
            Step::Forward => "->",
            Step::Backward => "<-",
            Step::Bidirected => "<->",
        }
    }
}

/// Alternating vertices and edges: `steps[i]` joins `vertices[i]` and
/// `vertices[i + 1]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Path {
    pub vertices: Vec<MicroVertex>,
    pub steps: Vec<Step>,
}

impl Path {
    pub fn new(vertices: Vec<MicroVertex>, steps: Vec<Step>) -> Self {
        assert_eq!(vertices.len(), steps.len() + 1, "a path has one more vertex than edges");
        Path { vertices, steps }
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn reversed(&self) -> Path {
        Path {
            vertices: self.vertices.iter().rev().cloned().collect(),
            steps: self.steps.iter().rev().map(|s| s.reversed()).collect(),
        }
    }

    /// Is interior vertex `i` (0 < i < len) a collider on this path?
    pub fn is_collider(&self, i: usize) -> bool {
        self.steps[i - 1].head_at_end() && self.steps[i].head_at_start()
    }

    /// Every step is an edge of `g`.
    pub fn lies_in(&self, g: &MixedGraph) -> bool {
        self.index_form(g).is_some()
    }

    fn index_form(&self, g: &MixedGraph) -> Option<Vec<usize>> {
        let idx: Option<Vec<usize>> = self.vertices.iter().map(|v| g.index_of(v)).collect();
        let idx = idx?;
        let ok = self.steps.iter().enumerate().all(|(i, s)| {
            let (a, b) = (idx[i], idx[i + 1]);
            match s {
                Step::Forward => g.has_directed(a, b),
                Step::Backward => g.has_directed(b, a),
                Step::Bidirected => g.has_bidirected(a, b),
            }
        });
        ok.then_some(idx)
    }

    /// Simple path in `g` from a vertex of `x` to a vertex of `y`, touching
    /// `x` and `y` only at its ends, with every collider an ancestor of `z`
    /// and every other interior vertex outside `z`.
    pub fn is_d_connecting(&self, g: &MixedGraph, x: &VertexSet, y: &VertexSet, z: &VertexSet) -> bool {
        let Some(idx) = self.index_form(g) else {
            return false;
        };
        let mut seen = FixedBitSet::with_capacity(g.len());
        if idx.iter().any(|&i| seen.put(i)) {
            return false;
        }
        let last = self.vertices.len() - 1;
        if last == 0 || !x.contains(&self.vertices[0]) || !y.contains(&self.vertices[last]) {
            return false;
        }
        // Members of `z` outside `g` cannot lie on the path.
        let mut zm = FixedBitSet::with_capacity(g.len());
        for v in z {
            if let Some(i) = g.index_of(v) {
                zm.insert(i);
            }
        }
        let anc = g.ancestors_mask(&zm);
        (1..last).all(|i| {
            let v = &self.vertices[i];
            if x.contains(v) || y.contains(v) {
                return false;
            }
            if self.is_collider(i) {
                anc.contains(idx[i])
            } else {
                !zm.contains(idx[i])
            }
        })
    }
}

impl fmt::Display for Path {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.vertices[0])?;
        for (s, v) in self.steps.iter().zip(&self.vertices[1..]) {
            write!(f, " {} {}", s.arrow(), v)?;
        }
        Ok(())
    }
}

/// Reference d-separation: enumerate all simple paths between `x` and `y`
/// and test each one against the collider rule. Parallel edges between the
/// same pair count as different paths.
pub fn d_separated_by_paths(
    g: &MixedGraph,
    x: &VertexSet,
    y: &VertexSet,
    z: &VertexSet,
) -> Result<bool, GraphError> {
    let (xm, ym, zm) = (g.mask(x)?, g.mask(y)?, g.mask(z)?);
    let n = g.len();
    // Transitive closure by repeated relaxation, kept separate from the
    // graph's own ancestor routine.
    let mut reach = vec![vec![false; n]; n];
    for (u, v) in g.directed_edges() {
        reach[u][v] = true;
    }
    for k in 0..n {
        for i in 0..n {
            if reach[i][k] {
                for j in 0..n {
                    if reach[k][j] {
                        reach[i][j] = true;
                    }
                }
            }
        }
    }
    let in_anc_z = |v: usize| zm.contains(v) || zm.ones().any(|t| reach[v][t]);

    let mut edges: Vec<Vec<(usize, Step)>> = vec![Vec::new(); n];
    for (u, v) in g.directed_edges() {
        edges[u].push((v, Step::Forward));
        edges[v].push((u, Step::Backward));
    }
    for (a, b) in g.bidirected_edges() {
        edges[a].push((b, Step::Bidirected));
        edges[b].push((a, Step::Bidirected));
    }

    struct Walk<'a> {
        edges: &'a [Vec<(usize, Step)>],
        ym: &'a FixedBitSet,
        zm: &'a FixedBitSet,
        in_anc_z: &'a dyn Fn(usize) -> bool,
        on: Vec<bool>,
        verts: Vec<usize>,
        steps: Vec<Step>,
    }

    impl Walk<'_> {
        fn active(&self) -> bool {
            (1..self.verts.len() - 1).all(|i| {
                let v = self.verts[i];
                let collider = self.steps[i - 1].head_at_end() && self.steps[i].head_at_start();
                if collider {
                    (self.in_anc_z)(v)
                } else {
                    !self.zm.contains(v)
                }
            })
        }

        fn extend(&mut self) -> bool {
            let v = *self.verts.last().unwrap();
            for &(w, s) in &self.edges[v] {
                if self.on[w] {
                    continue;
                }
                self.on[w] = true;
                self.verts.push(w);
                self.steps.push(s);
                let found = (self.ym.contains(w) && self.active()) || self.extend();
                self.verts.pop();
                self.steps.pop();
                self.on[w] = false;
                if found {
                    return true;
                }
            }
            false
        }
    }

    let mut walk = Walk {
        edges: &edges,
        ym: &ym,
        zm: &zm,
        in_anc_z: &in_anc_z,
        on: vec![false; n],
        verts: Vec::new(),
        steps: Vec::new(),
    };
    for s in xm.ones() {
        walk.on[s] = true;
        walk.verts.push(s);
        let found = walk.extend();
        walk.verts.pop();
        walk.on[s] = false;
        if found {
            return Ok(false);
        }
    }
    Ok(true)
}
