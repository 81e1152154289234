// Cross-check the structural engine against brute-force enumeration on
// every singleton query over a small C-DAG.
//
// `cargo run --example oracle_crosscheck`

use std::error::Error;

use cdag_calculus::calculus::Engine;
use cdag_calculus::cdag::{CDag, ClusterSet};
use cdag_calculus::oracle::{self, EnumerationBudget};
use cdag_calculus::query::{Rule, RuleQuery};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let c: CDag = "cluster A 2\ncluster B 1\ncluster C 2\n\
                   edge A -> B\nedge B -> A\nedge B -> C\nedge C <-> A\n"
        .parse()?;
    let engine = Engine::new(&c)?;
    let budget = EnumerationBudget::default();
    println!("{} compatible graphs", oracle::count_compatible(&c, &budget)?);

    let one = |n: &str| ClusterSet::from_iter([n]);
    let none = ClusterSet::new;
    let mut checked = 0;
    for rule in [Rule::R1, Rule::R2, Rule::R3] {
        for (x, y, z) in [("A", "C", "B"), ("C", "A", "B"), ("B", "C", "A"), ("A", "C", "")] {
            let z = if z.is_empty() { none() } else { one(z) };
            let q = RuleQuery::rule(rule, none(), one(x), one(y), z);
            let verdict = engine.check(&q)?;
            let violator = oracle::exists_violator(&c, &q, &budget)?;
            println!("{rule} {:<40} {}", q.statement(), if verdict.holds { "holds" } else { "fails" });
            assert_eq!(verdict.holds, violator.is_none());
            checked += 1;
        }
    }
    println!("{checked} queries agree with the oracle");
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
