//! Random and exhaustive instance generators shared by the test targets.
#![allow(dead_code)]

use cdag_calculus::cdag::{CDag, ClusterSet};
use cdag_calculus::graph::{Admg, GraphBuilder, MicroVertex, VertexSet};
use cdag_calculus::query::{Rule, RuleQuery};
use rand::seq::SliceRandom;
use rand::Rng;

pub const NAMES: [&str; 5] = ["A", "B", "C", "D", "E"];

/// Random ADMG on `n` vertices spread over a few clusters. Directed edges
/// follow a random topological order.
pub fn random_admg<R: Rng>(rng: &mut R, n: usize, p_dir: f64, p_bi: f64) -> Admg {
    let vertices: Vec<MicroVertex> = (0..n)
        .map(|i| MicroVertex::new(NAMES[i % 3], (i / 3 + 1) as u32))
        .collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut b = GraphBuilder::new(vertices.iter().cloned());
    for i in 0..n {
        for j in i + 1..n {
            if rng.random_bool(p_dir) {
                b.directed(&vertices[order[i]], &vertices[order[j]]).unwrap();
            }
            if rng.random_bool(p_bi) {
                b.bidirected(&vertices[i], &vertices[j]).unwrap();
            }
        }
    }
    Admg::new(b.build()).unwrap()
}

/// Random subset of `items`, each kept with probability `p`.
pub fn subset<T: Clone, R: Rng>(rng: &mut R, items: &[T], p: f64) -> Vec<T> {
    items.iter().filter(|_| rng.random_bool(p)).cloned().collect()
}

/// Random disjoint `(x, y, z)` over `g`'s vertices with `x` and `y` non-empty.
pub fn random_triple<R: Rng>(rng: &mut R, g: &Admg) -> (VertexSet, VertexSet, VertexSet) {
    let mut vs: Vec<MicroVertex> = g.vertices().to_vec();
    vs.shuffle(rng);
    let n = vs.len();
    let nx = rng.random_range(1..=(n - 1).min(2));
    let ny = rng.random_range(1..=(n - nx).min(2));
    let rest = &vs[nx + ny..];
    let p_z = rng.random_range(0.0..0.6);
    let z = subset(rng, rest, p_z);
    (vs[..nx].iter().cloned().collect(), vs[nx..nx + ny].iter().cloned().collect(), z.into_iter().collect())
}

/// Candidate cluster edges over `k` clusters: directed pairs (self-loops
/// included), then bidirected pairs (self-loops included).
pub fn candidate_edges(k: usize) -> Vec<(bool, usize, usize)> {
    let mut out = Vec::new();
    for a in 0..k {
        for b in 0..k {
            out.push((true, a, b));
        }
    }
    for a in 0..k {
        for b in a..k {
            out.push((false, a, b));
        }
    }
    out
}

pub fn build_cdag(cards: &[u32], edges: &[(bool, usize, usize)]) -> CDag {
    let mut b = CDag::builder();
    for (i, &c) in cards.iter().enumerate() {
        b = b.cluster(NAMES[i], c);
    }
    for &(dir, a, c) in edges {
        b = if dir { b.directed(NAMES[a], NAMES[c]) } else { b.bidirected(NAMES[a], NAMES[c]) };
    }
    b.build().unwrap()
}

/// Random valid C-DAG with `k` clusters of cardinality `1..=max_card`.
pub fn random_cdag<R: Rng>(rng: &mut R, k: usize, max_card: u32, p_edge: f64) -> CDag {
    loop {
        let cards: Vec<u32> = (0..k).map(|_| rng.random_range(1..=max_card)).collect();
        let edges = subset(rng, &candidate_edges(k), p_edge);
        let c = build_cdag(&cards, &edges);
        if c.is_valid() {
            return c;
        }
    }
}

/// Random valid C-DAG whose cluster graph has no directed cycle and no
/// self-loop of either kind.
pub fn random_acyclic_cdag<R: Rng>(rng: &mut R, k: usize, max_card: u32, p_edge: f64) -> CDag {
    let mut order: Vec<usize> = (0..k).collect();
    order.shuffle(rng);
    let cards: Vec<u32> = (0..k).map(|_| rng.random_range(1..=max_card)).collect();
    let mut edges = Vec::new();
    for i in 0..k {
        for j in i + 1..k {
            if rng.random_bool(p_edge) {
                edges.push((true, order[i], order[j]));
            }
            if rng.random_bool(p_edge / 2.0) {
                edges.push((false, i, j));
            }
        }
    }
    build_cdag(&cards, &edges)
}

/// Every valid C-DAG with `1..=max_k` clusters, cardinalities `1..=max_card`
/// and at most `max_edges` cluster edges.
pub fn all_small_cdags(max_k: usize, max_card: u32, max_edges: usize) -> Vec<CDag> {
    let mut out = Vec::new();
    for k in 1..=max_k {
        let cands = candidate_edges(k);
        let mut chosen = Vec::new();
        let mut edge_sets = Vec::new();
        fn rec(
            i: usize,
            cands: &[(bool, usize, usize)],
            max: usize,
            chosen: &mut Vec<(bool, usize, usize)>,
            out: &mut Vec<Vec<(bool, usize, usize)>>,
        ) {
            if i == cands.len() {
                out.push(chosen.clone());
                return;
            }
            rec(i + 1, cands, max, chosen, out);
            if chosen.len() < max {
                chosen.push(cands[i]);
                rec(i + 1, cands, max, chosen, out);
                chosen.pop();
            }
        }
        rec(0, &cands, max_edges, &mut chosen, &mut edge_sets);
        let mut cards = vec![1u32; k];
        loop {
            for e in &edge_sets {
                let c = build_cdag(&cards, e);
                if c.is_valid() {
                    out.push(c);
                }
            }
            // Odometer over cardinalities.
            let mut i = 0;
            while i < k && cards[i] == max_card {
                cards[i] = 1;
                i += 1;
            }
            if i == k {
                break;
            }
            cards[i] += 1;
        }
    }
    out
}

fn single(c: Option<usize>) -> ClusterSet {
    c.map(|i| ClusterSet::from_iter([NAMES[i].to_string()])).unwrap_or_default()
}

/// Every assignment of `w, x, y, z` to pairwise distinct single clusters or
/// the empty set, over `k` clusters. For d-separation the `w` slot is used
/// as the set whose incoming edges are cut.
pub fn singleton_queries(k: usize, rule: Rule) -> Vec<RuleQuery> {
    let slot: Vec<Option<usize>> = std::iter::once(None).chain((0..k).map(Some)).collect();
    let mut out = Vec::new();
    for &w in &slot {
        for &x in &slot {
            for &y in &slot {
                for &z in &slot {
                    let used: Vec<usize> = [w, x, y, z].iter().flatten().copied().collect();
                    let mut dedup = used.clone();
                    dedup.sort();
                    dedup.dedup();
                    if dedup.len() != used.len() {
                        continue;
                    }
                    out.push(match rule {
                        Rule::DSep => RuleQuery::dsep(single(x), single(y), single(z), single(w), ClusterSet::new()),
                        r => RuleQuery::rule(r, single(w), single(x), single(y), single(z)),
                    });
                }
            }
        }
    }
    out
}

/// Random query over `c`'s clusters with disjoint, possibly multi-cluster sets.
pub fn random_query<R: Rng>(rng: &mut R, c: &CDag) -> RuleQuery {
    let rule = [Rule::R1, Rule::R2, Rule::R3, Rule::DSep][rng.random_range(0..4)];
    let mut sets: [Vec<String>; 4] = Default::default();
    for cl in c.clusters() {
        // x and y get extra weight so most queries are non-vacuous.
        let slot = rng.random_range(0..7usize);
        let slot = match slot {
            5 => 1,
            6 => 2,
            s => s,
        };
        if slot < 4 {
            sets[slot].push(cl.name.clone());
        }
    }
    let set = |v: &Vec<String>| v.iter().cloned().collect::<ClusterSet>();
    match rule {
        Rule::DSep => {
            let under = subset(rng, &sets[1], 0.3);
            RuleQuery::dsep(set(&sets[1]), set(&sets[2]), set(&sets[3]), set(&sets[0]), under.into_iter().collect())
        }
        r => RuleQuery::rule(r, set(&sets[0]), set(&sets[1]), set(&sets[2]), set(&sets[3])),
    }
}
