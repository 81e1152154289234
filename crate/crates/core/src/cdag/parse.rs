use std::fmt;

use thiserror::Error;

use super::{valid_name, CDag, CDagBuilder};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    Syntax(String),
    DuplicateCluster(String),
    UnknownCluster(String),
    ZeroCardinality(String),
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseErrorKind::Syntax(m) => f.write_str(m),
            ParseErrorKind::DuplicateCluster(n) => write!(f, "cluster `{n}` is declared twice"),
            ParseErrorKind::UnknownCluster(n) => write!(f, "unknown cluster `{n}`"),
            ParseErrorKind::ZeroCardinality(n) => write!(f, "cluster `{n}` must have cardinality >= 1"),
        }
    }
}

/// A parse failure at a 1-based line and column.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{column}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub kind: ParseErrorKind,
}

struct Token<'a> {
    text: &'a str,
    column: usize,
}

fn tokens(line: &str) -> Vec<Token<'_>> {
    let code = line.split('#').next().unwrap_or("");
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in code.char_indices() {
        match (ch.is_whitespace(), start) {
            (false, None) => start = Some(i),
            (true, Some(s)) => {
                out.push(Token { text: &code[s..i], column: code[..s].chars().count() + 1 });
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push(Token { text: &code[s..], column: code[..s].chars().count() + 1 });
    }
    out
}

pub(super) fn parse(text: &str) -> Result<CDag, ParseError> {
    let mut clusters: Vec<(String, u32)> = Vec::new();
    // (from, to, bidirected, line, column of from, column of to)
    let mut edges: Vec<(String, String, bool, usize, usize, usize)> = Vec::new();

    for (ln, line) in text.lines().enumerate() {
        let line_no = ln + 1;
        let toks = tokens(line);
        let err = |column: usize, kind: ParseErrorKind| ParseError { line: line_no, column, kind };
        let syntax = |column: usize, msg: &str| err(column, ParseErrorKind::Syntax(msg.to_string()));
        let end_col = line.split('#').next().unwrap_or("").trim_end().chars().count() + 1;
        let Some(head) = toks.first() else { continue };
        let name_at = |i: usize| -> Result<&Token<'_>, ParseError> {
            let t = toks.get(i).ok_or_else(|| syntax(end_col, "expected a cluster name"))?;
            if valid_name(t.text) {
                Ok(t)
            } else {
                Err(syntax(t.column, &format!("invalid cluster name `{}`", t.text)))
            }
        };
        match head.text {
            "cluster" => {
                let name = name_at(1)?;
                let card = toks.get(2).ok_or_else(|| syntax(end_col, "expected a cardinality"))?;
                let k: u32 = card
                    .text
                    .parse()
                    .map_err(|_| syntax(card.column, &format!("invalid cardinality `{}`", card.text)))?;
                if k == 0 {
                    return Err(err(card.column, ParseErrorKind::ZeroCardinality(name.text.to_string())));
                }
                if let Some(t) = toks.get(3) {
                    return Err(syntax(t.column, "unexpected trailing input"));
                }
                if clusters.iter().any(|(n, _)| n == name.text) {
                    return Err(err(name.column, ParseErrorKind::DuplicateCluster(name.text.to_string())));
                }
                clusters.push((name.text.to_string(), k));
            }
            "edge" => {
                let a = name_at(1)?;
                let arrow = toks.get(2).ok_or_else(|| syntax(end_col, "expected `->` or `<->`"))?;
                let bi = match arrow.text {
                    "->" => false,
                    "<->" => true,
                    other => return Err(syntax(arrow.column, &format!("expected `->` or `<->`, found `{other}`"))),
                };
                let b = name_at(3)?;
                if let Some(t) = toks.get(4) {
                    return Err(syntax(t.column, "unexpected trailing input"));
                }
                edges.push((a.text.to_string(), b.text.to_string(), bi, line_no, a.column, b.column));
            }
            other => {
                return Err(syntax(head.column, &format!("expected `cluster` or `edge`, found `{other}`")));
            }
        }
    }

    let known = |n: &str| clusters.iter().any(|(c, _)| c == n);
    let mut b = CDagBuilder::default();
    for (n, k) in &clusters {
        b = b.cluster(n, *k);
    }
    for (from, to, bi, line, ca, cb) in edges {
        for (name, column) in [(&from, ca), (&to, cb)] {
            if !known(name) {
                return Err(ParseError { line, column, kind: ParseErrorKind::UnknownCluster(name.clone()) });
            }
        }
        b = if bi { b.bidirected(&from, &to) } else { b.directed(&from, &to) };
    }
    Ok(b.build().expect("names and cardinalities checked while parsing"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_prints_canonically() {
        let text = "# sample\ncluster B 2\ncluster A 3   # big\n\nedge B -> A\nedge A -> A\nedge B <-> A\nedge A -> B\n";
        let c = parse(text).unwrap();
        assert_eq!(
            c.to_text(),
            "cluster B 2\ncluster A 3\nedge A -> A\nedge A -> B\nedge B -> A\nedge A <-> B\n"
        );
        assert_eq!(parse(&c.to_text()).unwrap(), c);
    }

    #[test]
    fn errors_carry_positions() {
        let e = parse("cluster A 1\nedge A -> Q\n").unwrap_err();
        assert_eq!((e.line, e.column), (2, 11));
        assert_eq!(e.kind, ParseErrorKind::UnknownCluster("Q".into()));

        let e = parse("cluster A 0").unwrap_err();
        assert_eq!((e.line, e.column, e.kind), (1, 11, ParseErrorKind::ZeroCardinality("A".into())));

        let e = parse("cluster A 1\n  cluster A 2").unwrap_err();
        assert_eq!((e.line, e.column), (2, 11));

        let e = parse("cluster A 1\nedge A => A").unwrap_err();
        assert_eq!((e.line, e.column), (2, 8));

        let e = parse("node A 1").unwrap_err();
        assert_eq!((e.line, e.column), (1, 1));

        let e = parse("cluster A").unwrap_err();
        assert_eq!((e.line, e.column), (1, 10));
    }
}
