//! The `cdag` command line: thin plumbing from arguments and files to the
//! library, with a fixed exit-code contract.
//!
//! | code | meaning |
//! |------|---------|
//! | 0 | valid C-DAG, rule holds, no violator, crosscheck clean |
//! | 1 | invalid C-DAG, rule fails, violator found, crosscheck mismatch |
//! | 2 | usage or input error |
//! | 3 | enumeration budget exceeded |

use std::collections::BTreeSet;
use std::ffi::OsString;
use std::io::{Read, Write};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::abstraction::{CanonicalGraph, UnfoldedGraph};
use crate::calculus::{Engine, Verdict};
use crate::cdag::{CDag, ClusterSet};
use crate::graph::MixedGraph;
use crate::oracle::{self, EnumerationBudget, OracleError};
use crate::query::{Rule, RuleQuery};
use crate::text::write_micro_graph;

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "cdag", version, about = "Do-calculus and d-separation over cluster DAGs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Debug, Args)]
struct Input {
    /// C-DAG file, or `-` for standard input.
    #[arg(default_value = "-")]
    input: String,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Debug, Args)]
struct Budget {
    #[arg(long, default_value_t = 1_000_000)]
    max_graphs: u64,
    #[arg(long, default_value_t = 10)]
    max_micro_vertices: usize,
}

impl Budget {
    fn get(&self) -> EnumerationBudget {
        EnumerationBudget { max_graphs: self.max_graphs, max_micro_vertices: self.max_micro_vertices }
    }
}

/// Comma-separated cluster names; omit a flag for the empty set.
#[derive(Debug, Args)]
struct Sets {
    #[arg(long, default_value = "")]
    w: String,
    #[arg(long, default_value = "")]
    x: String,
    #[arg(long, default_value = "")]
    y: String,
    #[arg(long, default_value = "")]
    z: String,
    /// Cut edges into these clusters (d-separation only).
    #[arg(long, default_value = "")]
    over: String,
    /// Cut edges out of these clusters (d-separation only).
    #[arg(long, default_value = "")]
    under: String,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check that some acyclic graph is compatible with the C-DAG.
    Validate(Input),
    /// Print the canonical compatible graph.
    Canonical(Input),
    /// Print the unfolded graph; edges outside the canonical graph are
    /// marked `eligible`.
    Unfolded(Input),
    /// Print the C-DAG with every cardinality capped at three.
    Reduce(Input),
    /// Is x ⊥ y | z in every compatible graph (after optional cuts)?
    Dsep {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        sets: Sets,
    },
    /// Decide a do-calculus rule for every compatible graph.
    CheckRule {
        #[command(flatten)]
        input: Input,
        /// 1, 2 or 3.
        #[arg(long, value_parser = parse_rule_number)]
        rule: Rule,
        #[command(flatten)]
        sets: Sets,
    },
    /// Print a compatible counterexample, or `HOLDS`.
    Witness {
        #[command(flatten)]
        input: Input,
        /// 1, 2, 3 or `dsep`.
        #[arg(long, value_parser = parse_any_rule)]
        rule: Rule,
        #[command(flatten)]
        sets: Sets,
    },
    /// Count compatible graphs by brute force.
    OracleCount {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        budget: Budget,
        /// Also count graphs up to index permutations inside clusters.
        #[arg(long)]
        up_to_permutation: bool,
    },
    /// First compatible graph violating the query, by brute force, or `ABSENT`.
    OracleViolator {
        #[command(flatten)]
        input: Input,
        /// 1, 2, 3 or `dsep`.
        #[arg(long, value_parser = parse_any_rule)]
        rule: Rule,
        #[command(flatten)]
        sets: Sets,
        #[command(flatten)]
        budget: Budget,
    },
    /// Compare the engine with the brute-force oracle on random small
    /// C-DAGs and queries.
    Crosscheck {
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        count: usize,
        #[arg(long, default_value_t = 3)]
        max_clusters: usize,
        #[arg(long, default_value_t = 2)]
        max_cardinality: u32,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        #[command(flatten)]
        budget: Budget,
    },
}

fn parse_rule_number(s: &str) -> Result<Rule, String> {
    s.parse::<u8>().ok().and_then(Rule::from_number).ok_or_else(|| format!("expected 1, 2 or 3, got `{s}`"))
}

fn parse_any_rule(s: &str) -> Result<Rule, String> {
    if s.eq_ignore_ascii_case("dsep") {
        Ok(Rule::DSep)
    } else {
        parse_rule_number(s).map_err(|_| format!("expected 1, 2, 3 or dsep, got `{s}`"))
    }
}

/// Reasons a command stops early, each with its exit code.
enum Stop {
    Input(String),
    Budget(String),
}

impl Stop {
    fn code(&self) -> i32 {
        match self {
            Stop::Input(_) => EXIT_USAGE,
            Stop::Budget(_) => EXIT_BUDGET,
        }
    }

    fn message(&self) -> &str {
        match self {
            Stop::Input(m) | Stop::Budget(m) => m,
        }
    }
}

fn input_err(e: impl std::fmt::Display) -> Stop {
    Stop::Input(e.to_string())
}

impl From<OracleError> for Stop {
    fn from(e: OracleError) -> Self {
        if e.is_budget() {
            Stop::Budget(e.to_string())
        } else {
            Stop::Input(e.to_string())
        }
    }
}

struct Io<'a> {
    stdin: &'a mut dyn Read,
    out: String,
}

impl Io<'_> {
    fn load(&mut self, path: &str) -> Result<CDag, Stop> {
        let text = if path == "-" {
            let mut s = String::new();
            self.stdin.read_to_string(&mut s).map_err(|e| Stop::Input(format!("standard input: {e}")))?;
            s
        } else {
            std::fs::read_to_string(path).map_err(|e| Stop::Input(format!("{path}: {e}")))?
        };
        let name = if path == "-" { "<stdin>" } else { path };
        CDag::parse(&text).map_err(|e| Stop::Input(format!("{name}:{e}")))
    }

    fn print(&mut self, s: &str) {
        self.out.push_str(s);
        if !s.ends_with('\n') {
            self.out.push('\n');
        }
    }
}

/// Runs one invocation. `args` includes the program name. Output goes to
/// `stdout` in full or not at all; diagnostics are one line on `stderr`.
pub fn run<I, T>(args: I, stdin: &mut dyn Read, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(stdout, "{e}");
                return EXIT_OK;
            }
            let rendered = e.to_string();
            let first = rendered.lines().next().unwrap_or("invalid arguments");
            let _ = writeln!(stderr, "{first}");
            return EXIT_USAGE;
        }
    };
    let mut io = Io { stdin, out: String::new() };
    let code = match execute(cli.command, &mut io) {
        Ok(code) => code,
        Err(stop) => {
            let _ = writeln!(stderr, "error: {}", stop.message());
            return stop.code();
        }
    };
    let _ = stdout.write_all(io.out.as_bytes());
    code
}

fn graph_json(g: &MixedGraph, eligible: Option<&BTreeSet<(usize, usize)>>) -> serde_json::Value {
    let name = |i: usize| g.vertex(i).to_string();
    let mut doc = json!({
        "vertices": g.vertices().iter().map(|v| v.to_string()).collect::<Vec<_>>(),
        "directed": g.directed_edges().map(|(a, b)| [name(a), name(b)]).collect::<Vec<_>>(),
        "bidirected": g.bidirected_edges().map(|(a, b)| [name(a), name(b)]).collect::<Vec<_>>(),
    });
    if let Some(e) = eligible {
        doc["eligible"] = json!(e.iter().map(|&(a, b)| [name(a), name(b)]).collect::<Vec<_>>());
    }
    doc
}

fn cdag_json(c: &CDag) -> serde_json::Value {
    json!({
        "clusters": c.clusters().iter().map(|k| json!({"name": k.name, "cardinality": k.cardinality})).collect::<Vec<_>>(),
        "directed": c.directed_names(),
        "bidirected": c.bidirected_names(),
    })
}

fn pretty(v: &serde_json::Value) -> String {
    serde_json::to_string_pretty(v).expect("json values serialize")
}

fn query(rule: Rule, s: &Sets) -> Result<RuleQuery, Stop> {
    let p = |v: &str| ClusterSet::parse_list(v).map_err(input_err);
    let q = RuleQuery { rule, w: p(&s.w)?, x: p(&s.x)?, y: p(&s.y)?, z: p(&s.z)?, over: p(&s.over)?, under: p(&s.under)? };
    q.check_disjoint().map_err(input_err)?;
    Ok(q)
}

fn verdict(c: &CDag, q: &RuleQuery) -> Result<Verdict, Stop> {
    Engine::new(c).map_err(input_err)?.check(q).map_err(input_err)
}

fn print_verdict(io: &mut Io, v: &Verdict, format: Format) -> i32 {
    match format {
        Format::Text => io.print(&v.to_text()),
        Format::Json => io.print(&v.to_json()),
    }
    if v.holds {
        EXIT_OK
    } else {
        EXIT_NEGATIVE
    }
}

fn execute(cmd: Command, io: &mut Io) -> Result<i32, Stop> {
    match cmd {
        Command::Validate(i) => {
            let c = io.load(&i.input)?;
            let result = c.validate();
            match (i.format, &result) {
                (Format::Text, Ok(())) => io.print("valid"),
                (Format::Text, Err(e)) => io.print(&format!("invalid: {e}")),
                (Format::Json, r) => io.print(&pretty(&json!({
                    "valid": r.is_ok(),
                    "reason": r.as_ref().err().map(|e| e.to_string()),
                }))),
            }
            Ok(if result.is_ok() { EXIT_OK } else { EXIT_NEGATIVE })
        }
        Command::Canonical(i) => {
            let c = io.load(&i.input)?;
            let g = CanonicalGraph::new(&c).map_err(input_err)?;
            match i.format {
                Format::Text => io.print(&write_micro_graph(g.graph(), None)),
                Format::Json => io.print(&pretty(&graph_json(g.graph(), None))),
            }
            Ok(EXIT_OK)
        }
        Command::Unfolded(i) => {
            let c = io.load(&i.input)?;
            let u = UnfoldedGraph::new(&c).map_err(input_err)?;
            match i.format {
                Format::Text => io.print(&write_micro_graph(u.graph(), Some(u.eligible()))),
                Format::Json => io.print(&pretty(&graph_json(u.graph(), Some(u.eligible())))),
            }
            Ok(EXIT_OK)
        }
        Command::Reduce(i) => {
            let c = io.load(&i.input)?.reduce_to_three();
            match i.format {
                Format::Text => io.print(&c.to_text()),
                Format::Json => io.print(&pretty(&cdag_json(&c))),
            }
            Ok(EXIT_OK)
        }
        Command::Dsep { input, sets } => {
            if !sets.w.is_empty() {
                return Err(Stop::Input("--w is not used by dsep; use --z".into()));
            }
            let c = io.load(&input.input)?;
            let v = verdict(&c, &query(Rule::DSep, &sets)?)?;
            Ok(print_verdict(io, &v, input.format))
        }
        Command::CheckRule { input, rule, sets } => {
            let c = io.load(&input.input)?;
            let v = verdict(&c, &query(rule, &sets)?)?;
            Ok(print_verdict(io, &v, input.format))
        }
        Command::Witness { input, rule, sets } => {
            let c = io.load(&input.input)?;
            let v = verdict(&c, &query(rule, &sets)?)?;
            match (input.format, &v.witness_graph) {
                (Format::Json, _) => io.print(&v.to_json()),
                (Format::Text, None) => io.print("HOLDS"),
                (Format::Text, Some(g)) => io.print(&write_micro_graph(g, None)),
            }
            Ok(if v.holds { EXIT_OK } else { EXIT_NEGATIVE })
        }
        Command::OracleCount { input, budget, up_to_permutation } => {
            let c = io.load(&input.input)?;
            c.validate().map_err(input_err)?;
            let (count, orbits) = if up_to_permutation {
                let all = oracle::enumerate_compatible(&c, &budget.get())?;
                (all.len() as u64, Some(oracle::count_up_to_permutation(all.iter().map(|g| g.graph()))))
            } else {
                (oracle::count_compatible(&c, &budget.get())?, None)
            };
            match input.format {
                Format::Text => {
                    io.print(&format!("compatible graphs: {count}"));
                    if let Some(o) = orbits {
                        io.print(&format!("up to index permutation: {o}"));
                    }
                }
                Format::Json => io.print(&pretty(&json!({"count": count, "up_to_permutation": orbits}))),
            }
            Ok(EXIT_OK)
        }
        Command::OracleViolator { input, rule, sets, budget } => {
            let c = io.load(&input.input)?;
            c.validate().map_err(input_err)?;
            let q = query(rule, &sets)?;
            let found = oracle::exists_violator(&c, &q, &budget.get())?;
            match (input.format, &found) {
                (Format::Text, None) => io.print("ABSENT"),
                (Format::Text, Some(g)) => io.print(&write_micro_graph(g, None)),
                (Format::Json, g) => io.print(&pretty(&json!({"violator": g.as_ref().map(|g| graph_json(g, None))}))),
            }
            Ok(if found.is_some() { EXIT_NEGATIVE } else { EXIT_OK })
        }
        Command::Crosscheck { seed, count, max_clusters, max_cardinality, format, budget } => {
            if !(1..=6).contains(&max_clusters) || max_cardinality == 0 {
                return Err(Stop::Input("need 1 to 6 clusters and a positive cardinality".into()));
            }
            crosscheck(io, seed, count, max_clusters, max_cardinality, format, &budget.get())
        }
    }
}

const NAMES: [&str; 6] = ["A", "B", "C", "D", "E", "F"];

fn random_cdag(rng: &mut ChaCha8Rng, max_clusters: usize, max_card: u32) -> CDag {
    loop {
        let k = rng.random_range(1..=max_clusters);
        let density = rng.random_range(0.05..0.4);
        let mut b = CDag::builder();
        for name in &NAMES[..k] {
            b = b.cluster(name, rng.random_range(1..=max_card));
        }
        for i in 0..k {
            for j in 0..k {
                if rng.random_bool(density) {
                    b = b.directed(NAMES[i], NAMES[j]);
                }
                if j >= i && rng.random_bool(density / 2.0) {
                    b = b.bidirected(NAMES[i], NAMES[j]);
                }
            }
        }
        let c = b.build().expect("generated names are valid");
        if c.is_valid() {
            return c;
        }
    }
}

fn random_query(rng: &mut ChaCha8Rng, c: &CDag) -> RuleQuery {
    let rule = [Rule::R1, Rule::R2, Rule::R3, Rule::DSep][rng.random_range(0..4)];
    let mut sets: [Vec<String>; 5] = Default::default();
    for k in c.clusters() {
        sets[rng.random_range(0..5)].push(k.name.clone());
    }
    let [w, x, y, z, _] = sets.map(|s| s.into_iter().collect::<ClusterSet>());
    match rule {
        // The `w` draw becomes the set whose incoming edges are cut.
        Rule::DSep => RuleQuery::dsep(x, y, z, w, ClusterSet::new()),
        r => RuleQuery::rule(r, w, x, y, z),
    }
}

fn crosscheck(
    io: &mut Io,
    seed: u64,
    count: usize,
    max_clusters: usize,
    max_card: u32,
    format: Format,
    budget: &EnumerationBudget,
) -> Result<i32, Stop> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut mismatches = Vec::new();
    let (mut fails, mut skipped) = (0, 0);
    for _ in 0..count {
        let c = random_cdag(&mut rng, max_clusters, max_card);
        let q = random_query(&mut rng, &c);
        let v = verdict(&c, &q)?;
        // Instances too large to enumerate are counted, not fatal.
        let violator = match oracle::exists_violator(&c, &q, budget) {
            Err(e) if e.is_budget() => {
                skipped += 1;
                continue;
            }
            r => r?,
        };
        fails += usize::from(!v.holds);
        if v.holds != violator.is_none() {
            mismatches.push((c, q, v.holds));
        }
    }
    match format {
        Format::Text => {
            io.print(&format!(
                "checked {} queries ({fails} fail, {skipped} over budget), {} mismatches",
                count - skipped,
                mismatches.len()
            ));
            for (c, q, holds) in &mismatches {
                io.print(&format!("mismatch: {} (engine says {})", q.statement(), if *holds { "holds" } else { "fails" }));
                io.print(&c.to_text());
            }
        }
        Format::Json => io.print(&pretty(&json!({
            "seed": seed,
            "checked": count - skipped,
            "over_budget": skipped,
            "fails": fails,
            "mismatches": mismatches.iter().map(|(c, q, holds)| json!({
                "cdag": c.to_text(),
                "statement": q.statement(),
                "engine_holds": holds,
            })).collect::<Vec<_>>(),
        }))),
    }
    Ok(if mismatches.is_empty() { EXIT_OK } else { EXIT_NEGATIVE })
}
