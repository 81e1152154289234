// Enumerate every acyclic micro graph compatible with a small cyclic C-DAG.
//
// `cargo run --example compatible_graphs`

use std::error::Error;

use cdag_calculus::cdag::CDag;
use cdag_calculus::oracle::{self, EnumerationBudget};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    // A pair of variables in a feedback loop with a single one.
    let c: CDag = "cluster A 2\ncluster B 1\nedge A -> B\nedge B -> A\n".parse()?;
    let budget = EnumerationBudget::default();

    let all = oracle::enumerate_compatible(&c, &budget)?;
    println!("{} compatible graphs:", all.len());
    for g in &all {
        println!("  {g}");
    }
    assert_eq!(all.len(), 2);

    // Drop the edge back into A and the micro graphs have more freedom.
    let forward: CDag = "cluster A 2\ncluster B 1\nedge A -> B\n".parse()?;
    let n = oracle::count_compatible(&forward, &budget)?;
    println!("without B -> A: {n} compatible graphs");
    assert_eq!(n, 3);

    // Index labels are arbitrary; both feedback graphs are the same up to
    // swapping A.1 and A.2.
    let orbits = oracle::count_up_to_permutation(all.iter().map(|g| g.graph()));
    println!("up to index permutation: {orbits}");
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
