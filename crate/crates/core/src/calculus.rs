//! Deciding do-calculus rules and d-separation for a C-DAG, with a
//! compatible counterexample whenever the answer is "fails".

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::abstraction::{AbstractionError, UnfoldedGraph};
use crate::cdag::{CDag, CDagError, ClusterSet};
use crate::graph::{d_connected_masks, Admg, GraphError, MicroVertex, MixedGraph, VertexSet};
use crate::query::{QueryError, Rule, RuleQuery};
use crate::structure::{find_connecting_structure, SearchConstraints, Structure, StructureError};
use crate::text::write_micro_graph;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CalculusError {
    #[error(transparent)]
    Abstraction(#[from] AbstractionError),
    #[error(transparent)]
    CDag(#[from] CDagError),
    #[error(transparent)]
    Query(#[from] QueryError),
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("structure is not part of the unfolded graph")]
    NotInUnfolded,
    #[error("canonical graph plus structure has a directed cycle")]
    WitnessCyclic,
    #[error("witness failed validation: {0}")]
    WitnessRejected(&'static str),
    #[error("malformed verdict document: {0}")]
    Document(String),
}

/// Outcome of a query. `holds == false` always comes with a compatible
/// witness graph in which the corresponding micro-level condition fails,
/// and the structure it was built from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub query: RuleQuery,
    pub holds: bool,
    /// `x` or `y` was empty.
    pub vacuous: bool,
    pub statement: String,
    pub witness_graph: Option<Admg>,
    pub witness_structure: Option<Structure>,
}

/// Cached canonical and unfolded graphs of one C-DAG, answering any number
/// of queries.
#[derive(Debug, Clone)]
pub struct Engine {
    cdag: CDag,
    unfolded: UnfoldedGraph,
}

struct MicroQuery {
    x: VertexSet,
    y: VertexSet,
    z: VertexSet,
    w: VertexSet,
    over: VertexSet,
    under: VertexSet,
}

impl Engine {
    pub fn new(c: &CDag) -> Result<Self, CalculusError> {
        Ok(Engine { cdag: c.clone(), unfolded: UnfoldedGraph::new(c)? })
    }

    pub fn cdag(&self) -> &CDag {
        &self.cdag
    }

    pub fn unfolded(&self) -> &UnfoldedGraph {
        &self.unfolded
    }

    fn micro(&self, q: &RuleQuery) -> Result<MicroQuery, CalculusError> {
        let m = |s: &ClusterSet| self.cdag.micro_vertices_of(s);
        Ok(MicroQuery { x: m(&q.x)?, y: m(&q.y)?, z: m(&q.z)?, w: m(&q.w)?, over: m(&q.over)?, under: m(&q.under)? })
    }

    /// The search problem behind `q`: the unfolded graph cut at cluster
    /// granularity, `z` extended by `w`, and the root restriction for R3.
    /// `None` for vacuous queries.
    pub fn constraints(&self, q: &RuleQuery) -> Result<Option<SearchConstraints>, CalculusError> {
        q.check_disjoint()?;
        for s in [&q.w, &q.x, &q.y, &q.z, &q.over, &q.under] {
            self.cdag.check_clusters(s)?;
        }
        if q.is_vacuous() {
            return Ok(None);
        }
        let m = self.micro(q)?;
        let none = VertexSet::new();
        let (over, under) = match q.rule {
            Rule::R1 | Rule::R3 => (&m.w, &none),
            Rule::R2 => (&m.w, &m.x),
            Rule::DSep => (&m.over, &m.under),
        };
        let host = self.unfolded.graph().mutilate(over, under)?;
        let z = m.z.union(&m.w);
        let allowed = match q.rule {
            Rule::R3 => z.union(&m.y),
            _ => host.vertex_set(),
        };
        let base = self.unfolded.canonical().graph().clone();
        Ok(Some(SearchConstraints::new(host, &m.x, &m.y, &z, &allowed, base)?))
    }

    pub fn check(&self, q: &RuleQuery) -> Result<Verdict, CalculusError> {
        let Some(k) = self.constraints(q)? else {
            return Ok(Verdict {
                query: q.clone(),
                holds: true,
                vacuous: true,
                statement: q.statement(),
                witness_graph: None,
                witness_structure: None,
            });
        };
        let (witness_graph, witness_structure) = match find_connecting_structure(&k) {
            None => (None, None),
            Some(sigma) => {
                let g = self.witness(&sigma)?;
                if !crate::abstraction::is_compatible(&g, &self.cdag)? {
                    return Err(CalculusError::WitnessRejected("not compatible"));
                }
                if !condition_fails(&g, q, &self.micro(q)?)? {
                    return Err(CalculusError::WitnessRejected("condition holds in the witness"));
                }
                (Some(g), Some(sigma))
            }
        };
        Ok(Verdict {
            query: q.clone(),
            holds: witness_graph.is_none(),
            vacuous: false,
            statement: q.statement(),
            witness_graph,
            witness_structure,
        })
    }

    /// Canonical graph plus the structure's edges.
    pub fn witness(&self, sigma: &Structure) -> Result<Admg, CalculusError> {
        let unfolded = self.unfolded.graph();
        let embedded = sigma.embed(unfolded)?;
        if !embedded.is_edge_subgraph_of(unfolded) {
            return Err(CalculusError::NotInUnfolded);
        }
        let g = self.unfolded.canonical().graph().union(&embedded)?;
        Admg::new(g).map_err(|_| CalculusError::WitnessCyclic)
    }
}

/// Decides one rule or d-separation query on `c`.
pub fn check_rule(c: &CDag, q: &RuleQuery) -> Result<Verdict, CalculusError> {
    Engine::new(c)?.check(q)
}

/// Cluster d-separation of `x` and `y` given `z` in every compatible graph,
/// after removing edges into `over` and out of `under`.
pub fn cluster_dsep(
    c: &CDag,
    x: &ClusterSet,
    y: &ClusterSet,
    z: &ClusterSet,
    over: &ClusterSet,
    under: &ClusterSet,
) -> Result<Verdict, CalculusError> {
    check_rule(c, &RuleQuery::dsep(x.clone(), y.clone(), z.clone(), over.clone(), under.clone()))
}

/// Canonical graph of `c` plus `sigma`; compatible with `c` when acyclic.
pub fn build_witness(c: &CDag, sigma: &Structure) -> Result<Admg, CalculusError> {
    Engine::new(c)?.witness(sigma)
}

pub fn rule_statement(q: &RuleQuery) -> String {
    q.statement()
}

/// Does the micro-level condition behind `q` fail in `g`?
fn condition_fails(g: &Admg, q: &RuleQuery, m: &MicroQuery) -> Result<bool, CalculusError> {
    let mk = |s: &VertexSet| g.mask(s);
    let (x, y, z, w) = (mk(&m.x)?, mk(&m.y)?, mk(&m.z)?, mk(&m.w)?);
    let none = FixedBitSet::with_capacity(g.len());
    let mut wz = z.clone();
    wz.union_with(&w);
    let connected = match q.rule {
        Rule::R1 => d_connected_masks(&g.mutilate_masks(&w, &none), &y, &x, &wz),
        Rule::R2 => d_connected_masks(&g.mutilate_masks(&w, &x), &y, &x, &wz),
        Rule::R3 => {
            let gw = g.mutilate_masks(&w, &none);
            let anc = gw.ancestors_mask(&z);
            let mut xz = x.clone();
            xz.difference_with(&anc);
            let mut cut = w.clone();
            cut.union_with(&xz);
            d_connected_masks(&g.mutilate_masks(&cut, &none), &y, &x, &wz)
        }
        Rule::DSep => {
            let h = g.mutilate_masks(&mk(&m.over)?, &mk(&m.under)?);
            d_connected_masks(&h, &x, &y, &z)
        }
    };
    Ok(connected)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
struct GraphDoc {
    vertices: Vec<MicroVertex>,
    directed: Vec<(MicroVertex, MicroVertex)>,
    bidirected: Vec<(MicroVertex, MicroVertex)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    roots: Option<Vec<MicroVertex>>,
}

impl GraphDoc {
    fn of(g: &MixedGraph) -> Self {
        GraphDoc {
            vertices: g.vertices().to_vec(),
            directed: g.directed_edges().map(|(a, b)| (g.vertex(a).clone(), g.vertex(b).clone())).collect(),
            bidirected: g.bidirected_edges().map(|(a, b)| (g.vertex(a).clone(), g.vertex(b).clone())).collect(),
            roots: None,
        }
    }

    fn graph(&self) -> Result<MixedGraph, GraphError> {
        MixedGraph::from_edges(
            self.vertices.iter().cloned(),
            self.directed.iter().map(|(a, b)| (a, b)),
            self.bidirected.iter().map(|(a, b)| (a, b)),
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
struct SetsDoc {
    w: ClusterSet,
    x: ClusterSet,
    y: ClusterSet,
    z: ClusterSet,
    over: ClusterSet,
    under: ClusterSet,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
struct VerdictDoc {
    version: u32,
    rule: Rule,
    sets: SetsDoc,
    holds: bool,
    vacuous: bool,
    statement: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    witness_graph: Option<GraphDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    witness_structure: Option<GraphDoc>,
}

pub const VERDICT_FORMAT_VERSION: u32 = 1;

impl Verdict {
    pub fn to_json(&self) -> String {
        let q = &self.query;
        let doc = VerdictDoc {
            version: VERDICT_FORMAT_VERSION,
            rule: q.rule,
            sets: SetsDoc {
                w: q.w.clone(),
                x: q.x.clone(),
                y: q.y.clone(),
                z: q.z.clone(),
                over: q.over.clone(),
                under: q.under.clone(),
            },
            holds: self.holds,
            vacuous: self.vacuous,
            statement: self.statement.clone(),
            witness_graph: self.witness_graph.as_ref().map(|g| GraphDoc::of(g)),
            witness_structure: self.witness_structure.as_ref().map(|s| GraphDoc {
                roots: Some(s.roots().iter().cloned().collect()),
                ..GraphDoc::of(s.graph())
            }),
        };
        serde_json::to_string_pretty(&doc).expect("verdict documents always serialize")
    }

    pub fn from_json(text: &str) -> Result<Verdict, CalculusError> {
        let bad = |e: String| CalculusError::Document(e);
        let doc: VerdictDoc = serde_json::from_str(text).map_err(|e| bad(e.to_string()))?;
        if doc.version != VERDICT_FORMAT_VERSION {
            return Err(bad(format!("unsupported version {}", doc.version)));
        }
        let s = doc.sets;
        let query = RuleQuery { rule: doc.rule, w: s.w, x: s.x, y: s.y, z: s.z, over: s.over, under: s.under };
        let witness_graph = match doc.witness_graph {
            Some(g) => Some(Admg::new(g.graph()?).map_err(|e| bad(e.to_string()))?),
            None => None,
        };
        let witness_structure = match doc.witness_structure {
            Some(g) => {
                let st = Structure::new(g.graph()?)?;
                let roots: VertexSet = g.roots.unwrap_or_default().into_iter().collect();
                if &roots != st.roots() {
                    return Err(bad("listed roots do not match the structure".into()));
                }
                Some(st)
            }
            None => None,
        };
        Ok(Verdict { query, holds: doc.holds, vacuous: doc.vacuous, statement: doc.statement, witness_graph, witness_structure })
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("rule: {}\nstatement: {}\n", self.query.rule, self.statement);
        s.push_str(if self.holds { "verdict: HOLDS\n" } else { "verdict: FAILS\n" });
        if self.vacuous {
            s.push_str("note: vacuous (x or y is empty)\n");
        }
        if let Some(g) = &self.witness_graph {
            s.push_str("witness graph:\n");
            s.push_str(&write_micro_graph(g, None));
        }
        if let Some(st) = &self.witness_structure {
            s.push_str("witness structure:\n");
            s.push_str(&st.to_text());
        }
        s
    }
}
