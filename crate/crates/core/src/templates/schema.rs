use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::fg::Semantics;

/// A template variable: one ground variable per tuple of objects from
/// `classes`.
#[derive(Debug, Clone, PartialEq)]
pub struct TemplateVariable {
    pub name: String,
    pub classes: Vec<String>,
    pub domain: Vec<i64>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Symbol {
    pub name: String,
    pub head: bool,
}

/// A reference `V(s_1, ..., s_k)` to a template variable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Term {
    pub variable: usize,
    /// Indices into the factor's symbol list.
    pub args: Vec<usize>,
}

/// A template factor. `table` is row-major over the joint values of the
/// terms, last term fastest. `semantics: None` follows the semantics
/// requested at grounding time.
#[derive(Debug, Clone, PartialEq)]
pub struct TemplateFactor {
    pub name: String,
    pub symbols: Vec<Symbol>,
    pub terms: Vec<Term>,
    pub weight: f64,
    pub semantics: Option<Semantics>,
    pub table: Vec<f64>,
}

impl TemplateFactor {
    pub fn head_symbols(&self) -> impl Iterator<Item = usize> + '_ {
        self.symbols.iter().enumerate().filter(|(_, s)| s.head).map(|(i, _)| i)
    }

    pub fn body_symbols(&self) -> impl Iterator<Item = usize> + '_ {
        self.symbols.iter().enumerate().filter(|(_, s)| !s.head).map(|(i, _)| i)
    }

    pub fn effective_semantics(&self, requested: Semantics) -> Semantics {
        self.semantics.unwrap_or(requested)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Schema {
    classes: Vec<String>,
    variables: Vec<TemplateVariable>,
    factors: Vec<TemplateFactor>,
    /// Class index of every symbol of every factor.
    symbol_classes: Vec<Vec<usize>>,
}

impl Schema {
    pub fn new(classes: Vec<String>, variables: Vec<TemplateVariable>, factors: Vec<TemplateFactor>) -> Result<Self> {
        unique(classes.iter().map(String::as_str), "class")?;
        unique(variables.iter().map(|v| v.name.as_str()), "template variable")?;
        unique(factors.iter().map(|f| f.name.as_str()), "template factor")?;
        let class_id = |c: &str| classes.iter().position(|x| x == c);
        for v in &variables {
            for c in &v.classes {
                if class_id(c).is_none() {
                    return Err(Error::invalid(format!("`{}` uses unknown class `{c}`", v.name)));
                }
            }
            if v.domain.len() < 2 {
                return Err(Error::invalid(format!("`{}` needs at least two values", v.name)));
            }
            unique_labels(&v.domain, &v.name)?;
        }
        let mut symbol_classes = Vec::with_capacity(factors.len());
        for f in &factors {
            symbol_classes.push(check_factor(f, &variables, &class_id)?);
        }
        Ok(Schema {
            classes,
            variables,
            factors,
            symbol_classes,
        })
    }

    pub fn classes(&self) -> &[String] {
        &self.classes
    }

    pub fn variables(&self) -> &[TemplateVariable] {
        &self.variables
    }

    pub fn factors(&self) -> &[TemplateFactor] {
        &self.factors
    }

    pub fn class_id(&self, name: &str) -> Option<usize> {
        self.classes.iter().position(|c| c == name)
    }

    pub fn variable_id(&self, name: &str) -> Option<usize> {
        self.variables.iter().position(|v| v.name == name)
    }

    pub fn factor_id(&self, name: &str) -> Option<usize> {
        self.factors.iter().position(|f| f.name == name)
    }

    /// Class index of symbol `symbol` in factor `factor`.
    pub fn symbol_class(&self, factor: usize, symbol: usize) -> usize {
        self.symbol_classes[factor][symbol]
    }
}

fn unique<'a>(names: impl Iterator<Item = &'a str>, what: &str) -> Result<()> {
    let mut seen = HashSet::new();
    for n in names {
        if !seen.insert(n) {
            return Err(Error::invalid(format!("{what} `{n}` is declared twice")));
        }
    }
    Ok(())
}

fn unique_labels(domain: &[i64], name: &str) -> Result<()> {
    let mut seen = HashSet::new();
    if domain.iter().all(|v| seen.insert(*v)) {
        Ok(())
    } else {
        Err(Error::invalid(format!("`{name}` repeats a value label")))
    }
}

/// Validates one factor and returns the class of each symbol.
pub(crate) fn check_factor(
    f: &TemplateFactor,
    variables: &[TemplateVariable],
    class_id: &dyn Fn(&str) -> Option<usize>,
) -> Result<Vec<usize>> {
    let name = &f.name;
    unique(f.symbols.iter().map(|s| s.name.as_str()), &format!("symbol in `{name}`"))?;
    if f.terms.is_empty() {
        return Err(Error::invalid(format!("`{name}` has no terms")));
    }
    if !f.weight.is_finite() || f.table.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid(format!("`{name}` has a non-finite weight or table entry")));
    }
    let mut classes: Vec<Option<usize>> = vec![None; f.symbols.len()];
    let mut entries = 1usize;
    for t in &f.terms {
        let var = variables
            .get(t.variable)
            .ok_or_else(|| Error::invalid(format!("`{name}` references template variable {}", t.variable)))?;
        if t.args.len() != var.classes.len() {
            return Err(Error::invalid(format!(
                "`{name}`: `{}` takes {} arguments, got {}",
                var.name,
                var.classes.len(),
                t.args.len()
            )));
        }
        for (&s, c) in t.args.iter().zip(&var.classes) {
            let c = class_id(c).ok_or_else(|| Error::invalid(format!("unknown class `{c}`")))?;
            let slot = classes
                .get_mut(s)
                .ok_or_else(|| Error::invalid(format!("`{name}` uses undeclared symbol {s}")))?;
            match slot {
                Some(prev) if *prev != c => {
                    return Err(Error::invalid(format!(
                        "`{name}`: symbol `{}` is used with two different classes",
                        f.symbols[s].name
                    )))
                }
                _ => *slot = Some(c),
            }
        }
        entries = entries.saturating_mul(var.domain.len());
    }
    if f.table.len() != entries {
        return Err(Error::invalid(format!(
            "`{name}`: table has {} entries, terms require {entries}",
            f.table.len()
        )));
    }
    classes
        .into_iter()
        .enumerate()
        .map(|(i, c)| c.ok_or_else(|| Error::invalid(format!("`{name}`: symbol `{}` appears in no term", f.symbols[i].name))))
        .collect()
}

/// Largest `d` such that every term has at least `d` arguments and the first
/// `d` argument symbols agree across terms.
pub fn hierarchy_depth(tf: &TemplateFactor) -> usize {
    let Some(first) = tf.terms.first() else {
        return 0;
    };
    let mut d = 0;
    while d < first.args.len() && tf.terms.iter().all(|t| t.args.get(d) == Some(&first.args[d])) {
        d += 1;
    }
    d
}

/// Every head symbol is among the factor's first `hierarchy_depth` symbols.
pub fn is_hierarchical_factor(tf: &TemplateFactor) -> bool {
    let d = hierarchy_depth(tf);
    let prefix = tf.terms.first().map_or(&[][..], |t| &t.args[..d]);
    tf.head_symbols().all(|s| prefix.contains(&s))
}

pub fn is_hierarchical(schema: &Schema) -> bool {
    schema.factors().iter().all(is_hierarchical_factor)
}

/// The head symbols are exactly the first few shared prefix symbols.
pub fn has_leading_heads(tf: &TemplateFactor) -> bool {
    let heads = tf.head_symbols().count();
    let d = hierarchy_depth(tf);
    heads <= d && tf.terms.first().is_none_or(|t| t.args[..heads].iter().all(|&s| tf.symbols[s].head))
}

/// Upper bound on the hierarchy width of every instance of a hierarchical
/// template with leading heads, grounded with one factor per head
/// assignment: its number of template factors.
pub fn hw_template_bound(schema: &Schema) -> Result<usize> {
    if let Some(f) = schema.factors().iter().find(|f| !is_hierarchical_factor(f)) {
        return Err(Error::invalid(format!(
            "template factor `{}` is not hierarchical, so no width bound applies",
            f.name
        )));
    }
    if let Some(f) = schema.factors().iter().find(|f| !has_leading_heads(f)) {
        return Err(Error::invalid(format!(
            "template factor `{}` has a head symbol after a body symbol in its shared prefix, so no width bound applies",
            f.name
        )));
    }
    Ok(schema.factors().len())
}
