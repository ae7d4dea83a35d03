//! Line-oriented text format for factor graphs.
//!
//! ```text
//! fg 1
//! # comment
//! var Q 2 -1 1
//! var T1 2 0 1
//! table prior_T1 T1 : 0 -0.3
//! agg phi_T logical 0.5 {
//!   table phi_T[T1] Q T1 : 0 -1 0 1
//! }
//! ```
//!
//! Reals are written with the shortest representation that round-trips, so
//! `parse(write(g))` reproduces every table entry bit for bit.

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::fg::graph::{AggregateFactor, Factor, FactorGraph, Semantics, TableFactor, Variable};

pub fn write_factor_graph(graph: &FactorGraph) -> String {
    let mut out = String::from("fg 1\n");
    for v in graph.variables() {
        write!(out, "var {} {}", v.name, v.domain_size()).unwrap();
        for label in &v.domain {
            write!(out, " {label}").unwrap();
        }
        out.push('\n');
    }
    for f in graph.factors() {
        match f {
            Factor::Table(t) => write_table(&mut out, graph, t, ""),
            Factor::Aggregate(a) => {
                writeln!(out, "agg {} {} {} {{", a.name, a.semantics, a.weight).unwrap();
                for t in a.terms() {
                    write_table(&mut out, graph, t, "  ");
                }
                out.push_str("}\n");
            }
        }
    }
    out
}

fn write_table(out: &mut String, graph: &FactorGraph, t: &TableFactor, indent: &str) {
    write!(out, "{indent}table {}", t.name).unwrap();
    for &v in t.scope() {
        write!(out, " {}", graph.variable(v).name).unwrap();
    }
    out.push_str(" :");
    for x in t.table() {
        write!(out, " {x}").unwrap();
    }
    out.push('\n');
}

struct Token<'a> {
    text: &'a str,
    column: usize,
}

fn tokenize(line: &str) -> Vec<Token<'_>> {
    let content = match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    };
    let mut tokens = Vec::new();
    let mut start = None;
    for (i, c) in content.char_indices() {
        if c.is_whitespace() {
            if let Some(s) = start.take() {
                tokens.push(Token {
                    text: &content[s..i],
                    column: s + 1,
                });
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        tokens.push(Token {
            text: &content[s..],
            column: s + 1,
        });
    }
    tokens
}

struct Parser {
    variables: Vec<Variable>,
    by_name: HashMap<String, usize>,
}

impl Parser {
    fn table(&self, line: usize, tokens: &[Token<'_>]) -> Result<TableFactor> {
        // table <name> <var>... : <reals>
        let name = tokens
            .get(1)
            .ok_or_else(|| Error::parse(line, tokens[0].column, "table needs a name"))?;
        let colon = tokens
            .iter()
            .position(|t| t.text == ":")
            .ok_or_else(|| Error::parse(line, tokens[0].column, "table is missing `:`"))?;
        let mut scope = Vec::new();
        for t in &tokens[2..colon] {
            let id = *self.by_name.get(t.text).ok_or_else(|| {
                Error::parse(line, t.column, format!("unknown variable `{}`", t.text))
            })?;
            scope.push(id);
        }
        if scope.is_empty() {
            return Err(Error::parse(line, tokens[colon].column, "table has an empty scope"));
        }
        let values = tokens[colon + 1..]
            .iter()
            .map(|t| parse_real(line, t))
            .collect::<Result<Vec<_>>>()?;
        let dims = scope
            .iter()
            .map(|&v| self.variables[v].domain_size())
            .collect();
        TableFactor::new(name.text, scope, dims, values)
            .map_err(|e| Error::parse(line, name.column, e.to_string()))
    }
}

fn parse_real(line: usize, t: &Token<'_>) -> Result<f64> {
    t.text
        .parse::<f64>()
        .map_err(|_| Error::parse(line, t.column, format!("`{}` is not a number", t.text)))
}

pub fn parse_factor_graph(text: &str) -> Result<FactorGraph> {
    let mut parser = Parser {
        variables: Vec::new(),
        by_name: HashMap::new(),
    };
    let mut factors: Vec<Factor> = Vec::new();
    let mut header_seen = false;
    // (name, semantics, weight, terms, opening line)
    let mut open_agg: Option<(String, Semantics, f64, Vec<TableFactor>, usize)> = None;

    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let tokens = tokenize(raw);
        let Some(first) = tokens.first() else {
            continue;
        };
        if !header_seen {
            if first.text != "fg" || tokens.len() != 2 || tokens[1].text != "1" {
                return Err(Error::parse(line, first.column, "expected header `fg 1`"));
            }
            header_seen = true;
            continue;
        }
        if let Some((name, sem, weight, terms, _)) = open_agg.as_mut() {
            match first.text {
                "}" => {
                    let agg = AggregateFactor::new(name.clone(), *weight, *sem, std::mem::take(terms))
                        .map_err(|e| Error::parse(line, first.column, e.to_string()))?;
                    factors.push(agg.into());
                    open_agg = None;
                }
                "table" => terms.push(parser.table(line, &tokens)?),
                other => {
                    return Err(Error::parse(
                        line,
                        first.column,
                        format!("expected `table` or `}}` inside agg, found `{other}`"),
                    ))
                }
            }
            continue;
        }
        match first.text {
            "var" => {
                if !factors.is_empty() {
                    return Err(Error::parse(line, first.column, "variables must precede factors"));
                }
                if tokens.len() < 3 {
                    return Err(Error::parse(line, first.column, "var needs a name and a size"));
                }
                let name = tokens[1].text.to_string();
                let k: usize = tokens[2].text.parse().map_err(|_| {
                    Error::parse(line, tokens[2].column, "domain size must be an integer")
                })?;
                if tokens.len() != 3 + k {
                    return Err(Error::parse(
                        line,
                        tokens[2].column,
                        format!("expected {k} value labels, found {}", tokens.len() - 3),
                    ));
                }
                let domain = tokens[3..]
                    .iter()
                    .map(|t| {
                        t.text.parse::<i64>().map_err(|_| {
                            Error::parse(line, t.column, format!("`{}` is not an integer label", t.text))
                        })
                    })
                    .collect::<Result<Vec<_>>>()?;
                if parser.by_name.contains_key(&name) {
                    return Err(Error::parse(line, tokens[1].column, format!("duplicate variable `{name}`")));
                }
                parser.by_name.insert(name.clone(), parser.variables.len());
                parser.variables.push(Variable::new(name, domain));
            }
            "table" => factors.push(parser.table(line, &tokens)?.into()),
            "agg" => {
                if tokens.len() != 5 || tokens[4].text != "{" {
                    return Err(Error::parse(
                        line,
                        first.column,
                        "expected `agg <name> <semantics> <weight> {`",
                    ));
                }
                let sem: Semantics = tokens[2]
                    .text
                    .parse()
                    .map_err(|e: Error| Error::parse(line, tokens[2].column, e.to_string()))?;
                let weight = parse_real(line, &tokens[3])?;
                open_agg = Some((tokens[1].text.to_string(), sem, weight, Vec::new(), line));
            }
            other => {
                return Err(Error::parse(line, first.column, format!("unknown directive `{other}`")))
            }
        }
    }
    if !header_seen {
        return Err(Error::parse(1, 1, "missing header `fg 1`"));
    }
    if let Some((name, .., opened)) = open_agg {
        return Err(Error::parse(opened, 1, format!("agg `{name}` is never closed")));
    }
    FactorGraph::new(parser.variables, factors)
}
