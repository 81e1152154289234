//! Backtracking search for a connecting configuration: a simple path from
//! `x` to `y` in the host plus, for every collider outside `z` (and for a
//! root endpoint in `x` when `x` may not hold roots), a directed tail into
//! `z`. All chosen directed edges together with the base must stay acyclic.
//!
//! A configuration exists exactly when a connecting structure does: the
//! promotion step turns one into the other, and any connecting structure
//! contains a d-connecting path whose colliders have tails inside it.

use fixedbitset::FixedBitSet;

use crate::graph::paths::Step;
use crate::graph::MixedGraph;

pub(crate) struct Problem<'a> {
    pub host: &'a MixedGraph,
    pub base: &'a MixedGraph,
    pub x: &'a FixedBitSet,
    pub y: &'a FixedBitSet,
    pub z: &'a FixedBitSet,
    pub x_roots_allowed: bool,
    /// Keep tail interiors out of `x ∪ y`.
    pub tails_avoid_xy: bool,
}

/// A path (vertex indices and steps) plus extra directed edges forming the
/// tails.
#[derive(Debug, Clone)]
pub(crate) struct Config {
    pub path: Vec<usize>,
    pub steps: Vec<Step>,
    pub extra: Vec<(usize, usize)>,
}

impl Config {
    /// Directed edges of the path and the tails, as a graph on the host's
    /// vertices.
    pub fn directed_graph(&self, host: &MixedGraph) -> MixedGraph {
        let mut g = MixedGraph::on_sorted(host.shared_vertices());
        for (i, step) in self.steps.iter().enumerate() {
            let (a, b) = (self.path[i], self.path[i + 1]);
            match step {
                Step::Forward => g.insert_directed(a, b),
                Step::Backward => g.insert_directed(b, a),
                Step::Bidirected => {}
            }
        }
        for &(a, b) in &self.extra {
            g.insert_directed(a, b);
        }
        g
    }
}

pub(crate) fn search(p: &Problem<'_>) -> Option<Config> {
    if p.x.is_clear() || p.y.is_clear() {
        return None;
    }
    let mut s = Searcher::new(p);
    s.run()
}

struct Searcher<'a> {
    p: &'a Problem<'a>,
    n: usize,
    /// Vertices with a directed host path into `z` (including `z`).
    anc_z: FixedBitSet,
    adj: Vec<Vec<(usize, Step)>>,
    /// For each vertex, interchangeable vertices with a smaller index.
    lower_twins: Vec<Vec<usize>>,

    on_path: FixedBitSet,
    touched: Vec<u32>,
    s_count: Vec<u32>,
    s_children: Vec<FixedBitSet>,
    path: Vec<usize>,
    steps: Vec<Step>,
    needy: Vec<usize>,
    tail_edges: Vec<(usize, usize)>,
    snapshot_result: Option<Config>,
}

impl<'a> Searcher<'a> {
    fn new(p: &'a Problem<'a>) -> Self {
        let n = p.host.len();
        let mut adj = vec![Vec::new(); n];
        for (v, list) in adj.iter_mut().enumerate() {
            let mut l: Vec<(usize, Step)> = p
                .host
                .children(v)
                .map(|w| (w, Step::Forward))
                .chain(p.host.parents(v).map(|w| (w, Step::Backward)))
                .chain(p.host.siblings(v).map(|w| (w, Step::Bidirected)))
                .collect();
            l.sort_by_key(|&(w, s)| (w, s as u8));
            *list = l;
        }
        let lower_twins = (0..n).map(|w| (0..w).filter(|&u| twins(p, u, w)).collect()).collect();
        Searcher {
            p,
            n,
            anc_z: p.host.ancestors_mask(p.z),
            adj,
            lower_twins,
            on_path: FixedBitSet::with_capacity(n),
            touched: vec![0; n],
            s_count: vec![0; n * n],
            s_children: vec![FixedBitSet::with_capacity(n); n],
            path: Vec::new(),
            steps: Vec::new(),
            needy: Vec::new(),
            tail_edges: Vec::new(),
            snapshot_result: None,
        }
    }

    fn run(&mut self) -> Option<Config> {
        for x0 in self.p.x.ones() {
            if self.shadowed(x0) {
                continue;
            }
            self.on_path.insert(x0);
            self.touched[x0] += 1;
            self.path.push(x0);
            let found = self.extend();
            self.path.pop();
            self.touched[x0] -= 1;
            self.on_path.set(x0, false);
            if found {
                return Some(self.snapshot_result.take().unwrap());
            }
        }
        None
    }

    /// A vertex is skipped when an untouched twin with a smaller index
    /// exists and it is untouched itself: swapping the two maps every
    /// completion through it onto one through the twin.
    fn shadowed(&self, w: usize) -> bool {
        self.touched[w] == 0 && self.lower_twins[w].iter().any(|&u| self.touched[u] == 0)
    }

    fn has_edge_now(&self, u: usize, v: usize) -> bool {
        self.p.base.has_directed(u, v) || self.s_count[u * self.n + v] > 0
    }

    /// Would adding `u -> v` to base ∪ chosen edges close a cycle?
    fn closes_cycle(&self, u: usize, v: usize) -> bool {
        if self.has_edge_now(u, v) {
            return false;
        }
        let mut seen = FixedBitSet::with_capacity(self.n);
        let mut stack = vec![v];
        seen.insert(v);
        while let Some(a) = stack.pop() {
            if a == u {
                return true;
            }
            for b in self.p.base.children(a).chain(self.s_children[a].ones()) {
                if !seen.put(b) {
                    stack.push(b);
                }
            }
        }
        false
    }

    fn add_directed(&mut self, u: usize, v: usize) {
        let c = &mut self.s_count[u * self.n + v];
        *c += 1;
        if *c == 1 {
            self.s_children[u].insert(v);
        }
        self.touched[u] += 1;
        self.touched[v] += 1;
    }

    fn remove_directed(&mut self, u: usize, v: usize) {
        let c = &mut self.s_count[u * self.n + v];
        *c -= 1;
        if *c == 0 {
            self.s_children[u].set(v, false);
        }
        self.touched[u] -= 1;
        self.touched[v] -= 1;
    }

    fn extend(&mut self) -> bool {
        let v = *self.path.last().unwrap();
        let first = self.path.len() == 1;
        let arrived_head = self.steps.last().is_some_and(|s| s.head_at_end());
        let p = self.p;
        for k in 0..self.adj[v].len() {
            let (w, step) = self.adj[v][k];
            if self.on_path.contains(w) || p.x.contains(w) {
                continue;
            }
            let leave_head = step.head_at_start();
            let needs_tail = if first {
                leave_head && !p.x_roots_allowed
            } else if arrived_head && leave_head {
                !p.z.contains(v)
            } else {
                if p.z.contains(v) {
                    continue;
                }
                false
            };
            if needs_tail && !self.anc_z.contains(v) {
                continue;
            }
            if p.z.contains(w) && !step.head_at_end() && !p.y.contains(w) {
                continue;
            }
            if self.shadowed(w) {
                continue;
            }
            let directed = match step {
                Step::Forward => Some((v, w)),
                Step::Backward => Some((w, v)),
                Step::Bidirected => None,
            };
            if let Some((a, b)) = directed {
                if self.closes_cycle(a, b) {
                    continue;
                }
            }
            if !p.y.contains(w) && !self.can_reach_y(w, step.head_at_end()) {
                continue;
            }

            if let Some((a, b)) = directed {
                self.add_directed(a, b);
            } else {
                self.touched[v] += 1;
                self.touched[w] += 1;
            }
            self.on_path.insert(w);
            self.path.push(w);
            self.steps.push(step);
            if needs_tail {
                self.needy.push(v);
            }

            let found = if p.y.contains(w) { self.tails(0) } else { self.extend() };

            if needs_tail {
                self.needy.pop();
            }
            self.steps.pop();
            self.path.pop();
            self.on_path.set(w, false);
            if let Some((a, b)) = directed {
                self.remove_directed(a, b);
            } else {
                self.touched[v] -= 1;
                self.touched[w] -= 1;
            }
            if found {
                return true;
            }
        }
        false
    }

    /// Relaxed look-ahead: can some walk from `w` (entered with an arrowhead
    /// iff `head`) reach `y` while avoiding the current path and `x`, and
    /// obeying the pass-through rules? Ignores acyclicity, so it only prunes.
    fn can_reach_y(&self, w: usize, head: bool) -> bool {
        let p = self.p;
        let mut seen = vec![[false; 2]; self.n];
        seen[w][head as usize] = true;
        let mut stack = vec![(w, head)];
        while let Some((v, arrived_head)) = stack.pop() {
            for &(u, step) in &self.adj[v] {
                if (self.on_path.contains(u) && u != w) || p.x.contains(u) || u == w {
                    continue;
                }
                let pass = if arrived_head && step.head_at_start() {
                    self.anc_z.contains(v)
                } else {
                    !p.z.contains(v)
                };
                if !pass {
                    continue;
                }
                if p.y.contains(u) {
                    return true;
                }
                let h = step.head_at_end();
                if !seen[u][h as usize] {
                    seen[u][h as usize] = true;
                    stack.push((u, h));
                }
            }
        }
        false
    }

    /// Does `v` already reach `z` through chosen edges?
    fn chosen_reaches_z(&self, v: usize) -> bool {
        let mut seen = FixedBitSet::with_capacity(self.n);
        let mut stack = vec![v];
        seen.insert(v);
        while let Some(a) = stack.pop() {
            if self.p.z.contains(a) {
                return true;
            }
            for b in self.s_children[a].ones() {
                if !seen.put(b) {
                    stack.push(b);
                }
            }
        }
        false
    }

    fn tails(&mut self, i: usize) -> bool {
        if i == self.needy.len() {
            self.snapshot_result = Some(Config {
                path: self.path.clone(),
                steps: self.steps.clone(),
                extra: self.tail_edges.clone(),
            });
            return true;
        }
        let v = self.needy[i];
        // Reusing an existing route adds nothing, so it dominates every
        // alternative.
        if self.chosen_reaches_z(v) {
            return self.tails(i + 1);
        }
        self.tail_from(i, v)
    }

    fn tail_from(&mut self, i: usize, u: usize) -> bool {
        let p = self.p;
        let children: Vec<usize> = p.host.children(u).collect();
        for w in children {
            if !self.anc_z.contains(w) {
                continue;
            }
            let ends = p.z.contains(w);
            if !ends && p.tails_avoid_xy && (p.x.contains(w) || p.y.contains(w)) {
                continue;
            }
            if self.shadowed(w) || self.closes_cycle(u, w) {
                continue;
            }
            self.add_directed(u, w);
            self.tail_edges.push((u, w));
            let found = if ends { self.tails(i + 1) } else { self.tail_from(i, w) };
            self.tail_edges.pop();
            self.remove_directed(u, w);
            if found {
                return true;
            }
        }
        false
    }
}

/// Swapping `u` and `w` (same cluster) preserves host, base and every query
/// set.
fn twins(p: &Problem<'_>, u: usize, w: usize) -> bool {
    let (hu, hw) = (p.host.vertex(u), p.host.vertex(w));
    if hu.cluster() != hw.cluster() {
        return false;
    }
    let same = |m: &FixedBitSet| m.contains(u) == m.contains(w);
    same(p.x) && same(p.y) && same(p.z) && swap_invariant(p.host, u, w) && swap_invariant(p.base, u, w)
}

fn swap_invariant(g: &MixedGraph, u: usize, w: usize) -> bool {
    let t = |a: usize| {
        if a == u {
            w
        } else if a == w {
            u
        } else {
            a
        }
    };
    [u, w].iter().all(|&a| {
        g.children(a).all(|b| g.has_directed(t(a), t(b)))
            && g.parents(a).all(|b| g.has_directed(t(b), t(a)))
            && g.siblings(a).all(|b| g.has_bidirected(t(a), t(b)))
    })
}
