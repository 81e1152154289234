//! Cluster-level queries shared by the decision procedures and the oracle.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cdag::ClusterSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Rule {
    /// Insertion or deletion of observations.
    R1,
    /// Exchange of actions and observations.
    R2,
    /// Insertion or deletion of actions.
    R3,
    /// d-separation in every compatible graph, optionally after mutilation.
    #[serde(rename = "DSEP")]
    DSep,
}

impl Rule {
    pub fn from_number(n: u8) -> Option<Rule> {
        match n {
            1 => Some(Rule::R1),
            2 => Some(Rule::R2),
            3 => Some(Rule::R3),
            _ => None,
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Rule::R1 => "R1",
            Rule::R2 => "R2",
            Rule::R3 => "R3",
            Rule::DSep => "DSEP",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QueryError {
    #[error("query sets {0} and {1} share cluster `{2}`")]
    Overlap(&'static str, &'static str, String),
    #[error("{0} is only meaningful for d-separation queries")]
    NotForRule(&'static str),
}

/// A rule over cluster sets. Rules use `w, x, y, z`; d-separation uses
/// `x, y, z` plus the mutilation sets `over` (incoming edges cut) and
/// `under` (outgoing edges cut).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RuleQuery {
    pub rule: Rule,
    pub w: ClusterSet,
    pub x: ClusterSet,
    pub y: ClusterSet,
    pub z: ClusterSet,
    pub over: ClusterSet,
    pub under: ClusterSet,
}

impl RuleQuery {
    pub fn rule(rule: Rule, w: ClusterSet, x: ClusterSet, y: ClusterSet, z: ClusterSet) -> Self {
        RuleQuery { rule, w, x, y, z, over: ClusterSet::new(), under: ClusterSet::new() }
    }

    pub fn dsep(x: ClusterSet, y: ClusterSet, z: ClusterSet, over: ClusterSet, under: ClusterSet) -> Self {
        RuleQuery { rule: Rule::DSep, w: ClusterSet::new(), x, y, z, over, under }
    }

    /// Shorthand with comma-separated cluster lists, e.g.
    /// `RuleQuery::parse_rule(Rule::R2, "", "Z", "Y", "")`.
    pub fn parse_rule(rule: Rule, w: &str, x: &str, y: &str, z: &str) -> Result<Self, crate::cdag::CDagError> {
        let p = ClusterSet::parse_list;
        Ok(RuleQuery::rule(rule, p(w)?, p(x)?, p(y)?, p(z)?))
    }

    pub fn parse_dsep(x: &str, y: &str, z: &str, over: &str, under: &str) -> Result<Self, crate::cdag::CDagError> {
        let p = ClusterSet::parse_list;
        Ok(RuleQuery::dsep(p(x)?, p(y)?, p(z)?, p(over)?, p(under)?))
    }

    /// Pairwise disjointness of the sets the rule uses.
    pub fn check_disjoint(&self) -> Result<(), QueryError> {
        if self.rule != Rule::DSep {
            if !self.over.is_empty() {
                return Err(QueryError::NotForRule("over"));
            }
            if !self.under.is_empty() {
                return Err(QueryError::NotForRule("under"));
            }
        } else if !self.w.is_empty() {
            return Err(QueryError::NotForRule("w"));
        }
        let sets = [("w", &self.w), ("x", &self.x), ("y", &self.y), ("z", &self.z)];
        for (i, (na, a)) in sets.iter().enumerate() {
            for (nb, b) in &sets[i + 1..] {
                if let Some(c) = a.iter().find(|c| b.contains(c)) {
                    return Err(QueryError::Overlap(na, nb, c.to_string()));
                }
            }
        }
        Ok(())
    }

    /// Holds trivially because `x` or `y` is empty.
    pub fn is_vacuous(&self) -> bool {
        self.x.is_empty() || self.y.is_empty()
    }

    /// The equality (or independence) the query asserts, with cluster names
    /// lowercased into variable names.
    pub fn statement(&self) -> String {
        let lower = |s: &ClusterSet| s.iter().map(str::to_lowercase).collect::<Vec<_>>().join(", ");
        let doo = |s: &ClusterSet| s.iter().map(|n| format!("do({})", n.to_lowercase())).collect::<Vec<_>>().join(", ");
        let prob = |parts: Vec<String>| {
            let parts: Vec<String> = parts.into_iter().filter(|p| !p.is_empty()).collect();
            if parts.is_empty() {
                format!("P({})", lower(&self.y))
            } else {
                format!("P({} | {})", lower(&self.y), parts.join(", "))
            }
        };
        match self.rule {
            Rule::R1 => format!(
                "{} = {}",
                prob(vec![doo(&self.w), lower(&self.x), lower(&self.z)]),
                prob(vec![doo(&self.w), lower(&self.z)])
            ),
            Rule::R2 => format!(
                "{} = {}",
                prob(vec![doo(&self.w), doo(&self.x), lower(&self.z)]),
                prob(vec![doo(&self.w), lower(&self.x), lower(&self.z)])
            ),
            Rule::R3 => format!(
                "{} = {}",
                prob(vec![doo(&self.w), doo(&self.x), lower(&self.z)]),
                prob(vec![doo(&self.w), lower(&self.z)])
            ),
            Rule::DSep => {
                let names = |s: &ClusterSet| s.iter().collect::<Vec<_>>().join(", ");
                let mut out = format!("{} ⊥ {}", names(&self.x), names(&self.y));
                if !self.z.is_empty() {
                    out.push_str(&format!(" | {}", names(&self.z)));
                }
                out.push_str(" in every compatible graph");
                let mut cuts = Vec::new();
                if !self.over.is_empty() {
                    cuts.push(format!("edges into {} removed", names(&self.over)));
                }
                if !self.under.is_empty() {
                    cuts.push(format!("edges out of {} removed", names(&self.under)));
                }
                if !cuts.is_empty() {
                    out.push_str(&format!(" with {}", cuts.join(" and ")));
                }
                out
            }
        }
    }
}

impl fmt::Display for RuleQuery {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.statement())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn statements() {
        let q = RuleQuery::parse_rule(Rule::R2, "", "Z", "Y", "").unwrap();
        assert_eq!(q.statement(), "P(y | do(z)) = P(y | z)");
        let q = RuleQuery::parse_rule(Rule::R1, "W", "X", "Y", "Z").unwrap();
        assert_eq!(q.statement(), "P(y | do(w), x, z) = P(y | do(w), z)");
        let q = RuleQuery::parse_rule(Rule::R3, "W", "X", "Y", "Z").unwrap();
        assert_eq!(q.statement(), "P(y | do(w), do(x), z) = P(y | do(w), z)");
        let q = RuleQuery::parse_rule(Rule::R3, "", "X", "Y", "").unwrap();
        assert_eq!(q.statement(), "P(y | do(x)) = P(y)");
        let q = RuleQuery::parse_dsep("X", "Y", "Z", "", "").unwrap();
        assert_eq!(q.statement(), "X ⊥ Y | Z in every compatible graph");
        let q = RuleQuery::parse_dsep("X", "Y", "", "A", "B").unwrap();
        assert_eq!(q.statement(), "X ⊥ Y in every compatible graph with edges into A removed and edges out of B removed");
    }

    #[test]
    fn overlap_is_rejected() {
        let q = RuleQuery::parse_rule(Rule::R1, "A", "A", "Y", "").unwrap();
        assert!(q.check_disjoint().is_err());
        let q = RuleQuery::parse_dsep("X", "Y", "", "X", "Y").unwrap();
        assert!(q.check_disjoint().is_ok());
    }
}
