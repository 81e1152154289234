use std::collections::VecDeque;

use fixedbitset::FixedBitSet;

use super::{connects, Structure, StructureError};
use crate::graph::paths::{Path, Step};
use crate::graph::{MixedGraph, VertexSet};

/// A d-connecting path inside a connecting structure.
///
/// Starts from a shortest `x`–`y` path of the structure. While some collider
/// on it is not an ancestor of `z` within the structure, follow its unique
/// outgoing chain to a root (which lies in `x` or `y`) and splice that chain
/// in at its last contact with the part of the path on the other side.
pub fn extract_connecting_path(
    s: &Structure,
    x: &VertexSet,
    y: &VertexSet,
    z: &VertexSet,
) -> Result<Path, StructureError> {
    if !connects(s, x, y, z) {
        return Err(StructureError::NotConnecting);
    }
    let g = s.graph();
    let xm = mask_in(g, x);
    let ym = mask_in(g, y);
    let zm = mask_in(g, z);
    let anc = g.ancestors_mask(&zm);

    let (mut verts, mut steps) = shortest_path(g, &xm, &ym).ok_or(StructureError::NotConnecting)?;
    for _ in 0..=g.len() * g.len() {
        let bad = (1..verts.len() - 1)
            .find(|&i| steps[i - 1].head_at_end() && steps[i].head_at_start() && !anc.contains(verts[i]));
        let Some(ci) = bad else {
            let path = Path::new(
                verts.iter().map(|&i| g.vertex(i).clone()).collect(),
                steps,
            );
            return if path.is_d_connecting(g, x, y, z) {
                Ok(path)
            } else {
                Err(StructureError::NotConnecting)
            };
        };
        // Unique outgoing chain from the collider down to a root.
        let mut chain = vec![verts[ci]];
        while let Some(next) = g.children(*chain.last().unwrap()).next() {
            chain.push(next);
        }
        let root = *chain.last().unwrap();
        if xm.contains(root) {
            // root ... T along the chain reversed, then the path from T on.
            let tail_part = &verts[ci..];
            let t = last_shared(&chain, tail_part);
            let ti = chain.iter().position(|&v| v == t).unwrap();
            let pi = verts.iter().position(|&v| v == t).unwrap();
            let mut nv: Vec<usize> = chain[ti..].iter().rev().copied().collect();
            let mut ns: Vec<Step> = vec![Step::Backward; chain.len() - 1 - ti];
            nv.extend_from_slice(&verts[pi + 1..]);
            ns.extend_from_slice(&steps[pi..]);
            (verts, steps) = trim(nv, ns, &xm, &ym);
        } else if ym.contains(root) {
            // the path up to T, then T ... root along the chain.
            let head_part = &verts[..=ci];
            let t = last_shared(&chain, head_part);
            let ti = chain.iter().position(|&v| v == t).unwrap();
            let pi = verts.iter().position(|&v| v == t).unwrap();
            let mut nv: Vec<usize> = verts[..=pi].to_vec();
            let mut ns: Vec<Step> = steps[..pi].to_vec();
            nv.extend_from_slice(&chain[ti + 1..]);
            ns.extend(std::iter::repeat_n(Step::Forward, chain.len() - 1 - ti));
            (verts, steps) = trim(nv, ns, &xm, &ym);
        } else {
            return Err(StructureError::NotConnecting);
        }
    }
    Err(StructureError::NotConnecting)
}

fn mask_in(g: &MixedGraph, set: &VertexSet) -> FixedBitSet {
    let mut m = FixedBitSet::with_capacity(g.len());
    for v in set {
        if let Some(i) = g.index_of(v) {
            m.insert(i);
        }
    }
    m
}

/// Last vertex of `chain` (in chain order) that also lies on `part`.
fn last_shared(chain: &[usize], part: &[usize]) -> usize {
    *chain.iter().rev().find(|v| part.contains(v)).expect("the chain starts on the path")
}

/// Cut to the segment from the last `x` vertex to the first `y` vertex after
/// it.
fn trim(verts: Vec<usize>, steps: Vec<Step>, x: &FixedBitSet, y: &FixedBitSet) -> (Vec<usize>, Vec<Step>) {
    let i = verts.iter().rposition(|&v| x.contains(v)).unwrap_or(0);
    let j = (i..verts.len()).find(|&k| y.contains(verts[k])).unwrap_or(verts.len() - 1);
    (verts[i..=j].to_vec(), steps[i..j].to_vec())
}

/// Shortest path (edges read as undirected) from `x` to `y`; its interior
/// avoids both sets.
fn shortest_path(g: &MixedGraph, x: &FixedBitSet, y: &FixedBitSet) -> Option<(Vec<usize>, Vec<Step>)> {
    let n = g.len();
    let mut prev: Vec<Option<(usize, Step)>> = vec![None; n];
    let mut seen = x.clone();
    let mut queue: VecDeque<usize> = x.ones().collect();
    while let Some(v) = queue.pop_front() {
        if y.contains(v) {
            let mut verts = vec![v];
            let mut steps = Vec::new();
            let mut c = v;
            while let Some((p, s)) = prev[c] {
                verts.push(p);
                steps.push(s);
                c = p;
            }
            verts.reverse();
            steps.reverse();
            return Some((verts, steps));
        }
        let moves = g
            .children(v)
            .map(|w| (w, Step::Forward))
            .chain(g.parents(v).map(|w| (w, Step::Backward)))
            .chain(g.siblings(v).map(|w| (w, Step::Bidirected)));
        for (w, s) in moves {
            if !seen.put(w) {
                prev[w] = Some((v, s));
                queue.push_back(w);
            }
        }
    }
    None
}
