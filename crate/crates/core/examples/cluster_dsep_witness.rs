// d-separation across every compatible graph, with a counterexample when
// it fails. Whether one exists depends on the size of cluster A.
//
// `cargo run --example cluster_dsep_witness`

use std::error::Error;

use cdag_calculus::abstraction::is_compatible;
use cdag_calculus::calculus::check_rule;
use cdag_calculus::cdag::CDag;
use cdag_calculus::oracle::{self, EnumerationBudget};
use cdag_calculus::query::RuleQuery;

fn cdag(a: u32) -> Result<CDag, Box<dyn Error>> {
    let text = format!(
        "cluster Y 1\ncluster Z1 1\ncluster X 1\ncluster A {a}\ncluster Z2 1\n\
         edge Y -> Z1\nedge Z1 -> X\nedge X -> A\nedge A -> Z2\nedge Z2 -> A\nedge A -> A\nedge A -> Y\n"
    );
    Ok(text.parse()?)
}

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let q = RuleQuery::parse_dsep("X", "Y", "Z1,Z2", "", "")?;

    let big = cdag(3)?;
    let v = check_rule(&big, &q)?;
    print!("A has 3 elements:\n{}", v.to_text());
    let w = v.witness_graph.as_ref().expect("fails, so a witness is attached");
    assert!(is_compatible(w, &big)?);

    let small = cdag(2)?;
    let v = check_rule(&small, &q)?;
    print!("A has 2 elements:\n{}", v.to_text());
    assert!(v.holds);

    // The brute-force oracle agrees on both.
    let b = EnumerationBudget::default();
    assert!(oracle::exists_violator(&big, &q, &b)?.is_some());
    assert!(oracle::exists_violator(&small, &q, &b)?.is_none());
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
