//! Text forms of schemas and datasets.
//!
//! ```text
//! class Voter
//! tvar Q() domain 2 -1 1
//! tvar T(Voter) domain 2 0 1
//! tfactor vote_t(x) weight 0.5 semantics-default : Q() T(x) table 0 -1 0 1
//! tfactor prior_t(x^) weight -0.5 semantics-linear : T(x) table 0 1
//! ```
//!
//! ```text
//! object Voter v1
//! evidence T(v1) = 1
//! weight prior_t (v1) = -0.25
//! ```

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::fg::Semantics;
use crate::templates::dataset::{Dataset, Evidence, WeightOverride};
use crate::templates::schema::{check_factor, Schema, Symbol, TemplateFactor, TemplateVariable, Term};

#[derive(Debug, Clone, Copy, PartialEq)]
enum Tok<'a> {
    Word(&'a str),
    Punct(char),
}

#[derive(Debug, Clone, Copy)]
struct Token<'a> {
    tok: Tok<'a>,
    column: usize,
}

const PUNCT: &[char] = &['(', ')', ',', ':', '^', '='];

fn lex(line: &str) -> Vec<Token<'_>> {
    let content = line.find('#').map_or(line, |i| &line[..i]);
    let mut out = Vec::new();
    let mut start: Option<usize> = None;
    fn flush<'a>(content: &'a str, start: &mut Option<usize>, end: usize, out: &mut Vec<Token<'a>>) {
        if let Some(s) = start.take() {
            out.push(Token {
                tok: Tok::Word(&content[s..end]),
                column: s + 1,
            });
        }
    }
    for (i, c) in content.char_indices() {
        if c.is_whitespace() {
            flush(content, &mut start, i, &mut out);
        } else if PUNCT.contains(&c) {
            flush(content, &mut start, i, &mut out);
            out.push(Token {
                tok: Tok::Punct(c),
                column: i + 1,
            });
        } else if start.is_none() {
            start = Some(i);
        }
    }
    flush(content, &mut start, content.len(), &mut out);
    out
}

struct Cursor<'a> {
    line: usize,
    tokens: Vec<Token<'a>>,
    pos: usize,
    end_column: usize,
}

impl<'a> Cursor<'a> {
    fn new(line: usize, text: &'a str) -> Self {
        Cursor {
            line,
            tokens: lex(text),
            pos: 0,
            end_column: text.chars().count() + 1,
        }
    }

    fn column(&self) -> usize {
        self.tokens.get(self.pos).map_or(self.end_column, |t| t.column)
    }

    fn err(&self, column: usize, msg: impl Into<String>) -> Error {
        Error::parse(self.line, column, msg)
    }

    fn peek(&self) -> Option<Tok<'a>> {
        self.tokens.get(self.pos).map(|t| t.tok)
    }

    fn word(&mut self, what: &str) -> Result<(&'a str, usize)> {
        match self.tokens.get(self.pos) {
            Some(Token { tok: Tok::Word(w), column }) => {
                self.pos += 1;
                Ok((w, *column))
            }
            _ => Err(self.err(self.column(), format!("expected {what}"))),
        }
    }

    fn punct(&mut self, c: char) -> Result<()> {
        match self.peek() {
            Some(Tok::Punct(p)) if p == c => {
                self.pos += 1;
                Ok(())
            }
            _ => Err(self.err(self.column(), format!("expected `{c}`"))),
        }
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(Tok::Punct(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn keyword(&mut self, kw: &str) -> Result<()> {
        let column = self.column();
        match self.word(&format!("`{kw}`")) {
            Ok((w, _)) if w == kw => Ok(()),
            _ => Err(self.err(column, format!("expected `{kw}`"))),
        }
    }

    fn real(&mut self, what: &str) -> Result<f64> {
        let (w, column) = self.word(what)?;
        match w.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(v),
            _ => Err(self.err(column, format!("`{w}` is not a finite real"))),
        }
    }

    fn integer<T: std::str::FromStr>(&mut self, what: &str) -> Result<T> {
        let (w, column) = self.word(what)?;
        w.parse().map_err(|_| self.err(column, format!("`{w}` is not a valid {what}")))
    }

    /// `( [item {, item}] )` with each item a word and an optional `^`.
    fn list(&mut self) -> Result<Vec<(&'a str, usize, bool)>> {
        self.punct('(')?;
        let mut items = Vec::new();
        if self.eat(')') {
            return Ok(items);
        }
        loop {
            let (w, column) = self.word("a name")?;
            let head = self.eat('^');
            items.push((w, column, head));
            if self.eat(')') {
                return Ok(items);
            }
            self.punct(',')?;
        }
    }

    fn finish(&self) -> Result<()> {
        if self.pos < self.tokens.len() {
            Err(self.err(self.column(), "unexpected trailing input"))
        } else {
            Ok(())
        }
    }
}

fn lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().map(|(i, l)| (i + 1, l))
}

pub fn parse_template(text: &str) -> Result<Schema> {
    let mut classes: Vec<String> = Vec::new();
    let mut variables: Vec<TemplateVariable> = Vec::new();
    let mut factors: Vec<TemplateFactor> = Vec::new();
    for (line, raw) in lines(text) {
        let mut c = Cursor::new(line, raw);
        let Some(Tok::Word(kw)) = c.peek() else {
            if c.peek().is_some() {
                return Err(c.err(c.column(), "expected a keyword"));
            }
            continue;
        };
        let kw_column = c.column();
        c.pos += 1;
        match kw {
            "class" => {
                let (name, column) = c.word("a class name")?;
                if classes.iter().any(|x| x == name) {
                    return Err(c.err(column, format!("class `{name}` is declared twice")));
                }
                classes.push(name.to_string());
            }
            "tvar" => {
                let (name, column) = c.word("a variable name")?;
                if variables.iter().any(|v| v.name == name) {
                    return Err(c.err(column, format!("template variable `{name}` is declared twice")));
                }
                let mut arg_classes = Vec::new();
                for (cls, col, head) in c.list()? {
                    if head {
                        return Err(c.err(col, "head marks belong on factor symbols"));
                    }
                    if !classes.iter().any(|x| x == cls) {
                        return Err(c.err(col, format!("unknown class `{cls}`")));
                    }
                    arg_classes.push(cls.to_string());
                }
                c.keyword("domain")?;
                let k_column = c.column();
                let k: usize = c.integer("domain size")?;
                if k < 2 {
                    return Err(c.err(k_column, "a domain needs at least two values"));
                }
                let mut domain = Vec::with_capacity(k);
                for _ in 0..k {
                    let column = c.column();
                    let v: i64 = c.integer("value label")?;
                    if domain.contains(&v) {
                        return Err(c.err(column, format!("value `{v}` is repeated")));
                    }
                    domain.push(v);
                }
                variables.push(TemplateVariable {
                    name: name.to_string(),
                    classes: arg_classes,
                    domain,
                });
            }
            "tfactor" => {
                let f = parse_factor(&mut c, &classes, &variables)?;
                if factors.iter().any(|g| g.name == f.name) {
                    return Err(c.err(kw_column, format!("template factor `{}` is declared twice", f.name)));
                }
                factors.push(f);
            }
            other => return Err(c.err(kw_column, format!("unknown keyword `{other}`"))),
        }
        c.finish()?;
    }
    Schema::new(classes, variables, factors)
}

fn parse_factor(c: &mut Cursor<'_>, classes: &[String], variables: &[TemplateVariable]) -> Result<TemplateFactor> {
    let (name, name_column) = c.word("a factor name")?;
    let mut symbols: Vec<Symbol> = Vec::new();
    for (sym, col, head) in c.list()? {
        if symbols.iter().any(|s| s.name == sym) {
            return Err(c.err(col, format!("symbol `{sym}` is declared twice")));
        }
        symbols.push(Symbol {
            name: sym.to_string(),
            head,
        });
    }
    c.keyword("weight")?;
    let weight = c.real("a weight")?;
    let (sem, sem_column) = c.word("a semantics")?;
    let semantics = match sem {
        "semantics-default" => None,
        other => match other.strip_prefix("semantics-").map(str::parse::<Semantics>) {
            Some(Ok(s)) => Some(s),
            _ => return Err(c.err(sem_column, format!("unknown semantics `{other}`"))),
        },
    };
    c.punct(':')?;
    let mut terms = Vec::new();
    loop {
        let (word, column) = c.word("a term or `table`")?;
        if word == "table" {
            break;
        }
        let variable = variables
            .iter()
            .position(|v| v.name == word)
            .ok_or_else(|| c.err(column, format!("unknown template variable `{word}`")))?;
        let mut args = Vec::new();
        for (sym, col, head) in c.list()? {
            if head {
                return Err(c.err(col, "head marks belong in the symbol declaration"));
            }
            let s = symbols
                .iter()
                .position(|s| s.name == sym)
                .ok_or_else(|| c.err(col, format!("undeclared symbol `{sym}`")))?;
            args.push(s);
        }
        if args.len() != variables[variable].classes.len() {
            return Err(c.err(
                column,
                format!("`{word}` takes {} arguments, got {}", variables[variable].classes.len(), args.len()),
            ));
        }
        terms.push(Term { variable, args });
    }
    let mut table = Vec::new();
    while c.peek().is_some() {
        table.push(c.real("a table entry")?);
    }
    let f = TemplateFactor {
        name: name.to_string(),
        symbols,
        terms,
        weight,
        semantics,
        table,
    };
    check_factor(&f, variables, &|n: &str| classes.iter().position(|x| x == n))
        .map_err(|e| match e {
            Error::InvalidInput(m) => c.err(name_column, m),
            other => other,
        })?;
    Ok(f)
}

pub fn write_template(schema: &Schema) -> String {
    let mut out = String::new();
    for c in schema.classes() {
        writeln!(out, "class {c}").unwrap();
    }
    for v in schema.variables() {
        write!(out, "tvar {}({}) domain {}", v.name, v.classes.join(","), v.domain.len()).unwrap();
        for d in &v.domain {
            write!(out, " {d}").unwrap();
        }
        out.push('\n');
    }
    for f in schema.factors() {
        let symbols: Vec<String> = f
            .symbols
            .iter()
            .map(|s| if s.head { format!("{}^", s.name) } else { s.name.clone() })
            .collect();
        let sem = f.semantics.map_or("default", Semantics::name);
        write!(out, "tfactor {}({}) weight {} semantics-{sem} :", f.name, symbols.join(","), f.weight).unwrap();
        for t in &f.terms {
            let args: Vec<&str> = t.args.iter().map(|&a| f.symbols[a].name.as_str()).collect();
            write!(out, " {}({})", schema.variables()[t.variable].name, args.join(",")).unwrap();
        }
        out.push_str(" table");
        for x in &f.table {
            write!(out, " {x}").unwrap();
        }
        out.push('\n');
    }
    out
}

pub fn parse_dataset(text: &str) -> Result<Dataset> {
    let mut data = Dataset::default();
    for (line, raw) in lines(text) {
        let mut c = Cursor::new(line, raw);
        let Some(Tok::Word(kw)) = c.peek() else {
            if c.peek().is_some() {
                return Err(c.err(c.column(), "expected a keyword"));
            }
            continue;
        };
        let kw_column = c.column();
        c.pos += 1;
        match kw {
            "object" => {
                let (class, _) = c.word("a class name")?;
                let (name, column) = c.word("an object name")?;
                data.add_object(class, name).map_err(|e| c.err(column, e.to_string()))?;
            }
            "evidence" => {
                let (variable, _) = c.word("a template variable")?;
                let objects = plain_list(&mut c)?;
                c.punct('=')?;
                let value: i64 = c.integer("value label")?;
                data.evidence.push(Evidence {
                    variable: variable.to_string(),
                    objects,
                    value,
                });
            }
            "weight" => {
                let (factor, _) = c.word("a template factor")?;
                let head = plain_list(&mut c)?;
                c.punct('=')?;
                let weight = c.real("a weight")?;
                data.weights.push(WeightOverride {
                    factor: factor.to_string(),
                    head,
                    weight,
                });
            }
            other => return Err(c.err(kw_column, format!("unknown keyword `{other}`"))),
        }
        c.finish()?;
    }
    Ok(data)
}

fn plain_list(c: &mut Cursor<'_>) -> Result<Vec<String>> {
    c.list()?
        .into_iter()
        .map(|(w, col, head)| {
            if head {
                Err(c.err(col, "head marks are not allowed here"))
            } else {
                Ok(w.to_string())
            }
        })
        .collect()
}

pub fn write_dataset(data: &Dataset) -> String {
    let mut out = String::new();
    for (class, objects) in data.classes() {
        for o in objects {
            writeln!(out, "object {class} {o}").unwrap();
        }
    }
    for e in &data.evidence {
        writeln!(out, "evidence {}({}) = {}", e.variable, e.objects.join(","), e.value).unwrap();
    }
    for w in &data.weights {
        writeln!(out, "weight {} ({}) = {}", w.factor, w.head.join(","), w.weight).unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::templates::{is_hierarchical, VOTING_TEMPLATE};

    #[test]
    fn minimal_schema() {
        let s = parse_template("class C\ntvar A(C) domain 2 0 1\n").unwrap();
        assert_eq!(s.classes().len(), 1);
        assert!(s.factors().is_empty());
    }

    #[test]
    fn shipped_voting_template_is_hierarchical() {
        let s = parse_template(VOTING_TEMPLATE).unwrap();
        assert!(is_hierarchical(&s));
        assert_eq!(s.factors().len(), 4);
    }

    #[test]
    fn template_round_trip() {
        let s = parse_template(VOTING_TEMPLATE).unwrap();
        let text = write_template(&s);
        let again = parse_template(&text).unwrap();
        assert_eq!(s, again);
        assert_eq!(write_template(&again), text);
    }

    #[test]
    fn dataset_round_trip() {
        let text = "object Voter a\nobject Voter b\n# c\nobject Other z\nevidence T(a) = 1\nweight prior_t (b) = -0.25\n";
        let d = parse_dataset(text).unwrap();
        assert_eq!(d.objects("Voter"), &["a".to_string(), "b".to_string()][..]);
        let w = write_dataset(&d);
        assert_eq!(parse_dataset(&w).unwrap(), d);
        assert_eq!(write_dataset(&parse_dataset(&w).unwrap()), w);
    }

    #[test]
    fn non_prefix_head_parses() {
        let s = parse_template("class C\ntvar A(C,C) domain 2 0 1\ntfactor f(x,y^) weight 1 semantics-default : A(x,y) A(y,x) table 0 0 0 1\n")
            .unwrap();
        assert!(!is_hierarchical(&s));
    }

    fn parse_err(text: &str) -> (usize, usize, String) {
        match parse_template(text) {
            Err(Error::Parse { line, column, message }) => (line, column, message),
            other => panic!("expected a parse error, got {other:?}"),
        }
    }

    #[test]
    fn errors_carry_positions() {
        let (l, c, m) = parse_err("class C\ntvar A(D) domain 2 0 1\n");
        assert_eq!((l, c), (2, 8));
        assert!(m.contains("unknown class"));
        let (l, c, m) = parse_err("class C\ntvar A(C) domain 2 0 1\ntfactor f(x) weight 1 semantics-default : A(y) table 0 1\n");
        assert_eq!((l, c), (3, 45));
        assert!(m.contains("undeclared symbol"));
        let (_, _, m) = parse_err("class C\ntvar A(C) domain 2 0 1\ntfactor f(x) weight 1 semantics-fuzzy : A(x) table 0 1\n");
        assert!(m.contains("unknown semantics"));
        let (_, _, m) = parse_err("class C\ntvar A(C) domain 2 0 1\ntfactor f(x) weight 1 semantics-default : A(x) table 0 1 2\n");
        assert!(m.contains("table has 3 entries"));
        let (l, _, m) = parse_err("class C\nbogus\n");
        assert_eq!(l, 2);
        assert!(m.contains("unknown keyword"));
        assert!(parse_dataset("object C a\nobject C a\n").is_err());
    }
}
