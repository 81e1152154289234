use fixedbitset::FixedBitSet;

use super::{Admg, GraphError, MixedGraph, VertexSet};

/// `true` if `x` and `y` are d-separated given `z` in `g`.
///
/// Empty `x` or `y` is trivially separated. The three sets must be pairwise
/// disjoint.
pub fn d_separated(g: &Admg, x: &VertexSet, y: &VertexSet, z: &VertexSet) -> Result<bool, GraphError> {
    if !x.is_disjoint(y) {
        return Err(GraphError::Overlap("x", "y"));
    }
    if !x.is_disjoint(z) {
        return Err(GraphError::Overlap("x", "z"));
    }
    if !y.is_disjoint(z) {
        return Err(GraphError::Overlap("y", "z"));
    }
    Ok(!d_connected_masks(g, &g.mask(x)?, &g.mask(y)?, &g.mask(z)?))
}

// Arrival marks at the current vertex.
const START: usize = 0;
const TAIL: usize = 1;
const HEAD: usize = 2;

/// Reachability form of d-connection on index masks.
///
/// Walks states `(vertex, mark of the edge we arrived by)`. A vertex entered
/// with an arrowhead and left through an arrowhead is a collider and passes
/// only if it is an ancestor of `z`; any other pass-through needs the vertex
/// outside `z`. Works on any mixed graph, but the answer is only meaningful
/// for acyclic ones.
pub fn d_connected_masks(g: &MixedGraph, x: &FixedBitSet, y: &FixedBitSet, z: &FixedBitSet) -> bool {
    let n = g.len();
    if x.is_clear() || y.is_clear() {
        return false;
    }
    let anc_z = g.ancestors_mask(z);
    let mut seen = vec![[false; 3]; n];
    let mut stack: Vec<(usize, usize)> = Vec::new();
    for s in x.ones() {
        seen[s][START] = true;
        stack.push((s, START));
    }
    while let Some((v, arrived)) = stack.pop() {
        // (neighbor, mark at v, mark at neighbor)
        let moves = g
            .children(v)
            .map(|w| (w, TAIL, HEAD))
            .chain(g.parents(v).map(|w| (w, HEAD, TAIL)))
            .chain(g.siblings(v).map(|w| (w, HEAD, HEAD)));
        for (w, here, there) in moves {
            let pass = match arrived {
                START => true,
                _ if arrived == HEAD && here == HEAD => anc_z.contains(v),
                _ => !z.contains(v),
            };
            if !pass {
                continue;
            }
            if y.contains(w) {
                return true;
            }
            if !seen[w][there] {
                seen[w][there] = true;
                stack.push((w, there));
            }
        }
    }
    false
}

/// [`d_connected_masks`] on `g` with edges into `over` and out of `under`
/// removed, without building the cut graph.
pub fn d_connected_cut(
    g: &MixedGraph,
    x: &FixedBitSet,
    y: &FixedBitSet,
    z: &FixedBitSet,
    over: &FixedBitSet,
    under: &FixedBitSet,
) -> bool {
    let n = g.len();
    if x.is_clear() || y.is_clear() {
        return false;
    }
    let directed = |u: usize, v: usize| !over.contains(v) && !under.contains(u);
    let anc_z = ancestors_cut(g, z, over, under);
    let mut seen = vec![[false; 3]; n];
    let mut stack: Vec<(usize, usize)> = Vec::new();
    for s in x.ones() {
        seen[s][START] = true;
        stack.push((s, START));
    }
    while let Some((v, arrived)) = stack.pop() {
        let moves = g
            .children(v)
            .filter(|&w| directed(v, w))
            .map(|w| (w, TAIL, HEAD))
            .chain(g.parents(v).filter(|&w| directed(w, v)).map(|w| (w, HEAD, TAIL)))
            .chain(
                g.siblings(v)
                    .filter(|&w| !over.contains(v) && !over.contains(w))
                    .map(|w| (w, HEAD, HEAD)),
            );
        for (w, here, there) in moves {
            let pass = match arrived {
                START => true,
                _ if arrived == HEAD && here == HEAD => anc_z.contains(v),
                _ => !z.contains(v),
            };
            if !pass {
                continue;
            }
            if y.contains(w) {
                return true;
            }
            if !seen[w][there] {
                seen[w][there] = true;
                stack.push((w, there));
            }
        }
    }
    false
}

/// Reflexive ancestors of `set` once edges into `over` and out of `under`
/// are removed.
pub fn ancestors_cut(g: &MixedGraph, set: &FixedBitSet, over: &FixedBitSet, under: &FixedBitSet) -> FixedBitSet {
    let mut seen = set.clone();
    let mut stack: Vec<usize> = set.ones().collect();
    while let Some(v) = stack.pop() {
        if over.contains(v) {
            continue;
        }
        for p in g.parents(v) {
            if !under.contains(p) && !seen.put(p) {
                stack.push(p);
            }
        }
    }
    seen
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{v, MicroVertex};

    fn set(vs: &[MicroVertex]) -> VertexSet {
        vs.iter().cloned().collect()
    }

    #[test]
    fn chain_fork_collider() {
        let (a, b, c) = (v("A", 1), v("B", 1), v("C", 1));
        let vs = [a.clone(), b.clone(), c.clone()];
        let chain = Admg::new(MixedGraph::from_edges(vs.clone(), [(&a, &b), (&b, &c)], []).unwrap()).unwrap();
        assert!(!d_separated(&chain, &set(&[a.clone()]), &set(&[c.clone()]), &set(&[])).unwrap());
        assert!(d_separated(&chain, &set(&[a.clone()]), &set(&[c.clone()]), &set(&[b.clone()])).unwrap());

        let coll = Admg::new(MixedGraph::from_edges(vs.clone(), [(&a, &b), (&c, &b)], []).unwrap()).unwrap();
        assert!(d_separated(&coll, &set(&[a.clone()]), &set(&[c.clone()]), &set(&[])).unwrap());
        assert!(!d_separated(&coll, &set(&[a.clone()]), &set(&[c.clone()]), &set(&[b.clone()])).unwrap());

        let conf = Admg::new(MixedGraph::from_edges(vs, [(&a, &b)], [(&b, &c)]).unwrap()).unwrap();
        assert!(!d_separated(&conf, &set(&[a.clone()]), &set(&[c.clone()]), &set(&[b.clone()])).unwrap());
        assert!(d_separated(&conf, &set(&[a]), &set(&[c]), &set(&[])).unwrap());
    }

    #[test]
    fn collider_opened_by_descendant() {
        let (a, b, c, d) = (v("A", 1), v("B", 1), v("C", 1), v("D", 1));
        let vs = [a.clone(), b.clone(), c.clone(), d.clone()];
        let g = Admg::new(MixedGraph::from_edges(vs, [(&a, &b), (&c, &b), (&b, &d)], []).unwrap()).unwrap();
        assert!(!d_separated(&g, &set(&[a]), &set(&[c]), &set(&[d])).unwrap());
    }

    #[test]
    fn overlapping_sets_are_rejected() {
        let a = v("A", 1);
        let g = Admg::new(MixedGraph::empty([a.clone()])).unwrap();
        assert!(d_separated(&g, &set(&[a.clone()]), &set(&[a]), &set(&[])).is_err());
    }
}
