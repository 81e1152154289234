//! Turning a connecting configuration into a structure of interest.
//!
//! Start from the path. While some root is not allowed (a collider outside
//! `z`, or an `x` endpoint when `x` may not hold roots), take a shortest
//! directed route from it into `z` through the available edges. If the route
//! meets the current structure, stop at the first meeting vertex; when that
//! vertex was a fork, drop one of its outgoing edges and keep the component
//! that still joins `x` and `y`.

use std::collections::VecDeque;

use fixedbitset::FixedBitSet;

use super::search::Config;
use super::{Structure, StructureError};
use crate::graph::paths::Step;
use crate::graph::MixedGraph;

/// `avail` holds the directed edges tails may use.
pub(crate) fn promote(
    avail: &MixedGraph,
    cfg: &Config,
    x: &FixedBitSet,
    y: &FixedBitSet,
    z: &FixedBitSet,
    x_roots_allowed: bool,
) -> Result<Structure, StructureError> {
    let n = avail.len();
    let mut sigma = MixedGraph::on_sorted(avail.shared_vertices());
    for (i, step) in cfg.steps.iter().enumerate() {
        let (a, b) = (cfg.path[i], cfg.path[i + 1]);
        match step {
            Step::Forward => sigma.insert_directed(a, b),
            Step::Backward => sigma.insert_directed(b, a),
            Step::Bidirected => sigma.insert_bidirected(a, b),
        }
    }

    let mut members = FixedBitSet::with_capacity(n);
    for &v in &cfg.path {
        members.insert(v);
    }

    for _ in 0..=n {
        let bad = members.ones().find(|&r| {
            sigma.children_mask(r).is_clear()
                && !z.contains(r)
                && !y.contains(r)
                && !(x_roots_allowed && x.contains(r))
        });
        let Some(r) = bad else {
            return Structure::from_host_edges(&sigma, sigma.directed_edges(), sigma.bidirected_edges());
        };
        let route = route_to(avail, r, z).ok_or(StructureError::NotDConnecting)?;
        let hit = route.iter().skip(1).position(|&t| members.contains(t)).map(|p| p + 1);
        let end = hit.unwrap_or(route.len() - 1);
        for k in 0..end {
            sigma.insert_directed(route[k], route[k + 1]);
            members.insert(route[k + 1]);
        }
        if let Some(h) = hit {
            let w = route[h];
            if sigma.children_mask(w).count_ones(..) == 2 {
                repair_fork(&mut sigma, &mut members, w, x, y)?;
            }
        }
    }
    Err(StructureError::NotConnecting)
}

/// Shortest directed route from `r` to the first vertex of `z` (interior
/// outside `z`), exploring children in index order.
fn route_to(avail: &MixedGraph, r: usize, z: &FixedBitSet) -> Option<Vec<usize>> {
    let n = avail.len();
    let mut prev = vec![usize::MAX; n];
    let mut seen = FixedBitSet::with_capacity(n);
    seen.insert(r);
    let mut queue = VecDeque::from([r]);
    while let Some(a) = queue.pop_front() {
        if z.contains(a) {
            let mut route = vec![a];
            let mut c = a;
            while c != r {
                c = prev[c];
                route.push(c);
            }
            route.reverse();
            return Some(route);
        }
        for b in avail.children(a) {
            if !seen.put(b) {
                prev[b] = a;
                queue.push_back(b);
            }
        }
    }
    None
}

/// `w` now has an incoming edge and two outgoing ones. Remove the first
/// outgoing edge whose loss still leaves some component meeting both `x`
/// and `y`, and keep only that component.
fn repair_fork(
    sigma: &mut MixedGraph,
    members: &mut FixedBitSet,
    w: usize,
    x: &FixedBitSet,
    y: &FixedBitSet,
) -> Result<(), StructureError> {
    let outs: Vec<usize> = sigma.children(w).collect();
    for c in outs {
        let mut trial = sigma.clone();
        trial.remove_directed(w, c);
        if let Some(comp) = joining_component(&trial, members, x, y) {
            *sigma = restrict(&trial, &comp);
            *members = comp;
            return Ok(());
        }
    }
    Err(StructureError::NotConnecting)
}

fn joining_component(
    g: &MixedGraph,
    members: &FixedBitSet,
    x: &FixedBitSet,
    y: &FixedBitSet,
) -> Option<FixedBitSet> {
    let mut done = FixedBitSet::with_capacity(g.len());
    for s in members.ones() {
        if done.contains(s) {
            continue;
        }
        let mut comp = FixedBitSet::with_capacity(g.len());
        comp.insert(s);
        let mut stack = vec![s];
        while let Some(v) = stack.pop() {
            for u in g.children(v).chain(g.parents(v)).chain(g.siblings(v)) {
                if !comp.put(u) {
                    stack.push(u);
                }
            }
        }
        done.union_with(&comp);
        if !comp.is_disjoint(x) && !comp.is_disjoint(y) {
            return Some(comp);
        }
    }
    None
}

fn restrict(g: &MixedGraph, keep: &FixedBitSet) -> MixedGraph {
    let mut out = MixedGraph::on_sorted(g.shared_vertices());
    for (a, b) in g.directed_edges() {
        if keep.contains(a) && keep.contains(b) {
            out.insert_directed(a, b);
        }
    }
    for (a, b) in g.bidirected_edges() {
        if keep.contains(a) && keep.contains(b) {
            out.insert_bidirected(a, b);
        }
    }
    out
}
