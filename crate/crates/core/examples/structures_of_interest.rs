// d-connection through structures of interest: find one, read a connecting
// path out of it, and turn a path back into a structure.
//
// `cargo run --example structures_of_interest`

use std::error::Error;

use cdag_calculus::graph::{d_separated, Admg, GraphBuilder, MicroVertex, VertexSet};
use cdag_calculus::structure::{
    connects, extract_connecting_path, find_connecting_structure, promote_path_to_structure,
    structure_d_connected, SearchConstraints,
};

fn set(names: &[&str]) -> Result<VertexSet, Box<dyn Error>> {
    names.iter().map(|n| n.parse::<MicroVertex>().map_err(Into::into)).collect()
}

pub fn run_example() -> Result<(), Box<dyn Error>> {
    // X.1 -> M.1 <- U.1 -> Y.1, and M.1 -> W.1 with W.1 observed.
    let vs = set(&["X.1", "M.1", "U.1", "Y.1", "W.1"])?;
    let v = |s: &str| s.parse::<MicroVertex>().unwrap();
    let mut b = GraphBuilder::new(vs.iter().cloned());
    b.directed(&v("X.1"), &v("M.1"))?
        .directed(&v("U.1"), &v("M.1"))?
        .directed(&v("U.1"), &v("Y.1"))?
        .directed(&v("M.1"), &v("W.1"))?;
    let g = Admg::new(b.build())?;
    let (x, y, z) = (set(&["X.1"])?, set(&["Y.1"])?, set(&["W.1"])?);

    // Observing a descendant of the collider M.1 opens the path.
    assert!(!d_separated(&g, &x, &y, &z)?);
    assert!(structure_d_connected(&g, &x, &y, &z)?);

    let k = SearchConstraints::new(g.graph().clone(), &x, &y, &z, &vs, g.clone())?;
    let s = find_connecting_structure(&k).expect("connected");
    println!("structure:\n{}", s.to_text());
    assert!(connects(&s, &x, &y, &z));

    let path = extract_connecting_path(&s, &x, &y, &z)?;
    println!("connecting path: {path}");

    let back = promote_path_to_structure(&g, &path, &x, &y, &z)?;
    println!("promoted back:\n{}", back.to_text());
    assert!(connects(&back, &x, &y, &z));
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
