//! Line-oriented text formats for graphs, rules, schemas and queries.
//!
//! All formats ignore blank lines and lines starting with `#`. Errors carry
//! the 1-based line number.
//!
//! ```text
//! # graph
//! DrSmith worksIn Psychiatry .
//!
//! # rules
//! hasPatient(?x,?y) & worksIn(?x,?z) => patientIn(?y,?z)
//!
//! # schema
//! typePredicate hasType
//! predicate worksIn doctor dept mutable
//! cardinality doctor worksIn exactly 1
//!
//! # query
//! COUNT DISTINCT ?p WHERE patientIn(?p,Oncology)
//! ```

use crate::error::{Error, Result};
use crate::kg::{Comparator, Graph, Schema, Triple};
use crate::rules::{Atom, Rule, RuleSet, Term};
use crate::sensitivity::CountQuery;

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn at_line(line: usize) -> impl Fn(Error) -> Error {
    move |e| match e {
        Error::Parse { .. } => e,
        other => Error::Parse {
            line,
            message: other.to_string(),
        },
    }
}

fn parse_error(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

/// Parses a triple file: three whitespace-separated tokens per line with an
/// optional trailing `.` token.
pub fn parse_graph(text: &str) -> Result<Graph> {
    let mut g = Graph::new();
    for (line, content) in content_lines(text) {
        let mut tokens: Vec<&str> = content.split_whitespace().collect();
        if tokens.last() == Some(&".") {
            tokens.pop();
        }
        let [s, p, o] = tokens[..] else {
            return Err(parse_error(
                line,
                format!("expected `subject predicate object [.]`, found {content:?}"),
            ));
        };
        g.insert(Triple::try_new(s, p, o).map_err(at_line(line))?);
    }
    Ok(g)
}

/// Canonical serialization: sorted triples, one `s p o .` per line.
pub fn write_graph(g: &Graph) -> String {
    let mut out = String::new();
    for t in g {
        out.push_str(&format!("{t} .\n"));
    }
    out
}

/// Parses `pred(term, term)`.
pub fn parse_atom(text: &str) -> Result<Atom> {
    let text = text.trim();
    let malformed = || Error::InvalidRule(format!("malformed atom {text:?}"));
    let (predicate, rest) = text.split_once('(').ok_or_else(malformed)?;
    let args = rest.strip_suffix(')').ok_or_else(malformed)?;
    let (subject, object) = args.split_once(',').ok_or_else(malformed)?;
    Ok(Atom {
        predicate: crate::kg::Symbol::new(predicate.trim())?,
        subject: Term::parse(subject.trim())?,
        object: Term::parse(object.trim())?,
    })
}

fn parse_conjunction(text: &str) -> Result<Vec<Atom>> {
    text.split('&').map(parse_atom).collect()
}

/// Parses one rule: `atom & atom & ... => atom`.
pub fn parse_rule(text: &str) -> Result<Rule> {
    let (body, head) = text
        .split_once("=>")
        .ok_or_else(|| Error::InvalidRule(format!("missing `=>` in {:?}", text.trim())))?;
    Rule::new(parse_conjunction(body)?, parse_atom(head)?)
}

pub fn parse_rules(text: &str) -> Result<RuleSet> {
    content_lines(text)
        .map(|(line, content)| parse_rule(content).map_err(at_line(line)))
        .collect::<Result<Vec<_>>>()
        .map(RuleSet::new)
}

pub fn parse_schema(text: &str) -> Result<Schema> {
    let mut schema = Schema::new();
    for (line, content) in content_lines(text) {
        let tokens: Vec<&str> = content.split_whitespace().collect();
        let result = match tokens[..] {
            ["typePredicate", name] => schema.set_type_predicate(name),
            ["predicate", name, subject, object, flag] => {
                let mutable = match flag {
                    "mutable" => true,
                    "immutable" => false,
                    other => {
                        return Err(parse_error(
                            line,
                            format!("expected `mutable` or `immutable`, found {other:?}"),
                        ))
                    }
                };
                schema.add_predicate(name, subject, object, mutable)
            }
            ["cardinality", node_type, predicate, comparator, bound] => {
                let comparator = match comparator {
                    "exactly" => Comparator::Exactly,
                    "atMost" => Comparator::AtMost,
                    "atLeast" => Comparator::AtLeast,
                    other => {
                        return Err(parse_error(
                            line,
                            format!("expected exactly|atMost|atLeast, found {other:?}"),
                        ))
                    }
                };
                let bound: usize = bound
                    .parse()
                    .map_err(|_| parse_error(line, format!("bad bound {bound:?}")))?;
                schema.add_cardinality(node_type, predicate, comparator, bound)
            }
            _ => return Err(parse_error(line, format!("unrecognized schema line {content:?}"))),
        };
        result.map_err(at_line(line))?;
    }
    Ok(schema)
}

/// Parses `COUNT DISTINCT ?var WHERE atom & atom & ...`.
pub fn parse_query(text: &str) -> Result<CountQuery> {
    let mut lines = content_lines(text);
    let (line, content) = lines
        .next()
        .ok_or_else(|| parse_error(1, "empty query file"))?;
    if let Some((extra, _)) = lines.next() {
        return Err(parse_error(extra, "a query file holds exactly one query"));
    }
    let malformed = || parse_error(line, "expected `COUNT DISTINCT ?var WHERE atom & ...`");
    let rest = content.strip_prefix("COUNT").ok_or_else(malformed)?.trim_start();
    let rest = rest.strip_prefix("DISTINCT").ok_or_else(malformed)?.trim_start();
    let (var, pattern) = rest.split_once("WHERE").ok_or_else(malformed)?;
    let var = var.trim().strip_prefix('?').ok_or_else(malformed)?;
    let pattern = parse_conjunction(pattern).map_err(at_line(line))?;
    CountQuery::new(var, pattern).map_err(at_line(line))
}
