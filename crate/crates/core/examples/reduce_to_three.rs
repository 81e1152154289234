// Capping cluster sizes at three leaves every verdict unchanged, so large
// clusters can be checked on a smaller unfolded graph.
//
// `cargo run --example reduce_to_three`

use std::error::Error;

use cdag_calculus::calculus::Engine;
use cdag_calculus::cdag::CDag;
use cdag_calculus::query::{Rule, RuleQuery};

const LARGE: &str = "\
cluster X 3
cluster A 1
cluster B 4
cluster C 1
cluster D 2
cluster Y 4
edge X -> B
edge B -> X
edge A -> X
edge B -> A
edge D -> B
edge B -> D
edge B -> C
edge C -> B
edge D <-> C
edge D -> Y
edge C -> Y
";

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let c: CDag = LARGE.parse()?;
    let r = c.reduce_to_three();
    println!("reduced:\n{r}");
    println!(
        "micro vertices: {} before, {} after",
        c.total_micro_vertices(),
        r.total_micro_vertices()
    );

    let (full, small) = (Engine::new(&c)?, Engine::new(&r)?);
    let queries = [
        RuleQuery::parse_dsep("X", "Y", "C,D", "", "")?,
        RuleQuery::parse_dsep("A", "Y", "B", "", "")?,
        RuleQuery::parse_rule(Rule::R2, "", "D", "Y", "C")?,
        RuleQuery::parse_rule(Rule::R3, "", "X", "Y", "")?,
    ];
    for q in &queries {
        let (a, b) = (full.check(q)?.holds, small.check(q)?.holds);
        println!("{}: {}", q.statement(), if a { "holds" } else { "fails" });
        assert_eq!(a, b);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
