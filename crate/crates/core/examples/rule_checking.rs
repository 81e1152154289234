// Deciding do-calculus rules on a C-DAG with feedback and confounding.
//
// `cargo run --example rule_checking`

use std::error::Error;

use cdag_calculus::calculus::Engine;
use cdag_calculus::cdag::CDag;
use cdag_calculus::query::{Rule, RuleQuery};

const FEEDBACK: &str = "\
cluster X 1
cluster Y 1
cluster A 1
cluster B 3
cluster Z 1
edge Y -> A
edge X -> A
edge A -> B
edge B -> Z
edge Z -> A
edge B <-> Z
";

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let c: CDag = FEEDBACK.parse()?;
    let engine = Engine::new(&c)?;

    // Intervening on Z and observing it are interchangeable for Y.
    let q = RuleQuery::parse_rule(Rule::R2, "", "Z", "Y", "")?;
    let v = engine.check(&q)?;
    print!("{}", v.to_text());
    assert!(v.holds);

    // Observing A does change what we know about Y; the engine returns a
    // compatible graph where the independence breaks.
    let q = RuleQuery::parse_rule(Rule::R1, "", "A", "Y", "")?;
    let v = engine.check(&q)?;
    print!("{}", v.to_text());
    assert!(!v.holds);

    println!("{}", v.to_json());
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
