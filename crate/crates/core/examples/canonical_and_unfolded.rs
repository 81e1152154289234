// The canonical compatible graph and the unfolded graph of a C-DAG with a
// self-loop.
//
// `cargo run --example canonical_and_unfolded`

use std::error::Error;

use cdag_calculus::abstraction::{is_compatible, UnfoldedGraph};
use cdag_calculus::cdag::CDag;
use cdag_calculus::text::write_micro_graph;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let c: CDag = "cluster A 3\ncluster B 2\nedge A -> A\nedge A -> B\nedge B -> A\n".parse()?;
    let u = UnfoldedGraph::new(&c)?;

    let canonical = u.canonical().graph();
    println!("canonical graph:\n{}", write_micro_graph(canonical, None));
    assert!(is_compatible(canonical, &c)?);

    // Every compatible graph fits inside the unfolded graph after relabelling.
    println!("unfolded graph:\n{}", write_micro_graph(u.graph(), Some(u.eligible())));
    assert_eq!(u.eligible().len(), 8);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
