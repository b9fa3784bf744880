//! Ontology schema: declarations, axioms, and the designation of which
//! schema terms stand for corpus object classes and predicates.
//!
//! File grammar, one statement per line, `#` starts a comment:
//!
//! ```text
//! namespace http://example.org/vrd#
//! class Person
//! prop above
//! subclass TeddyBear Toy
//! eqclass C D
//! subprop p q
//! eqprop p q
//! inverse above below
//! transitive under
//! symmetric near
//! domain wear Person
//! range wear Clothing
//! annclass teddy bear TeddyBear
//! annprop sit on sitOn
//! ```
//!
//! Terms must be declared before they are used. For `annclass` and
//! `annprop` the last token is the schema term and everything between the
//! keyword and it is the corpus name.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use super::{KgError, DEFAULT_NAMESPACE};
use crate::model::MasterList;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Axiom {
    SubClassOf(String, String),
    EquivalentClasses(String, String),
    SubPropertyOf(String, String),
    EquivalentProperties(String, String),
    InverseOf(String, String),
    Transitive(String),
    Symmetric(String),
    Domain(String, String),
    Range(String, String),
}

impl Axiom {
    fn keyword(&self) -> &'static str {
        match self {
            Axiom::SubClassOf(..) => "subclass",
            Axiom::EquivalentClasses(..) => "eqclass",
            Axiom::SubPropertyOf(..) => "subprop",
            Axiom::EquivalentProperties(..) => "eqprop",
            Axiom::InverseOf(..) => "inverse",
            Axiom::Transitive(_) => "transitive",
            Axiom::Symmetric(_) => "symmetric",
            Axiom::Domain(..) => "domain",
            Axiom::Range(..) => "range",
        }
    }

    fn render(&self) -> String {
        match self {
            Axiom::Transitive(p) | Axiom::Symmetric(p) => format!("{} {p}", self.keyword()),
            Axiom::SubClassOf(a, b)
            | Axiom::EquivalentClasses(a, b)
            | Axiom::SubPropertyOf(a, b)
            | Axiom::EquivalentProperties(a, b)
            | Axiom::InverseOf(a, b)
            | Axiom::Domain(a, b)
            | Axiom::Range(a, b) => format!("{} {a} {b}", self.keyword()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Schema {
    pub namespace: String,
    pub classes: BTreeSet<String>,
    pub properties: BTreeSet<String>,
    pub axioms: Vec<Axiom>,
    /// Corpus object-class name to schema class.
    pub annotation_classes: BTreeMap<String, String>,
    /// Corpus predicate name to schema property.
    pub annotation_properties: BTreeMap<String, String>,
}

impl Default for Schema {
    fn default() -> Self {
        Self {
            namespace: DEFAULT_NAMESPACE.to_string(),
            classes: BTreeSet::new(),
            properties: BTreeSet::new(),
            axioms: Vec::new(),
            annotation_classes: BTreeMap::new(),
            annotation_properties: BTreeMap::new(),
        }
    }
}

fn valid_local(name: &str) -> bool {
    !name.is_empty()
        && name
            .chars()
            .all(|c| c.is_alphanumeric() || matches!(c, '_' | '-' | '.' | '~'))
}

fn split_words(name: &str) -> Vec<String> {
    name.split_whitespace()
        .map(|w| {
            w.chars()
                .map(|c| {
                    if c.is_alphanumeric() || matches!(c, '_' | '-' | '.') {
                        c
                    } else {
                        '_'
                    }
                })
                .collect()
        })
        .collect()
}

fn capitalize(w: &str) -> String {
    let mut cs = w.chars();
    match cs.next() {
        Some(first) => first.to_uppercase().chain(cs).collect(),
        None => String::new(),
    }
}

/// Upper camel case, e.g. `teddy bear` -> `TeddyBear`.
pub fn mangle_class(name: &str) -> String {
    split_words(name).iter().map(|w| capitalize(w)).collect()
}

/// Lower camel case, e.g. `sit on` -> `sitOn`.
pub fn mangle_property(name: &str) -> String {
    let words = split_words(name);
    let mut out = String::new();
    for (i, w) in words.iter().enumerate() {
        if i == 0 {
            let mut cs = w.chars();
            if let Some(first) = cs.next() {
                out.extend(first.to_lowercase().chain(cs));
            }
        } else {
            out.push_str(&capitalize(w));
        }
    }
    out
}

impl Schema {
    pub fn parse(text: &str) -> Result<Self, KgError> {
        let mut schema = Schema::default();
        for (n, raw) in text.lines().enumerate() {
            let line = n + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            // `namespace` values legitimately contain `#`.
            let content = if raw.trim_start().starts_with("namespace") {
                raw.trim()
            } else {
                content
            };
            if content.is_empty() {
                continue;
            }
            schema.parse_line(content, line)?;
        }
        Ok(schema)
    }

    fn parse_line(&mut self, content: &str, line: usize) -> Result<(), KgError> {
        let tokens: Vec<&str> = content.split_whitespace().collect();
        let malformed = |reason: String| KgError::MalformedAxiom { line, reason };
        let arity = |want: usize| -> Result<(), KgError> {
            if tokens.len() == want + 1 {
                Ok(())
            } else {
                Err(KgError::MalformedAxiom {
                    line,
                    reason: format!("{} takes {want} argument(s)", tokens[0]),
                })
            }
        };
        let class = |name: &str| -> Result<String, KgError> {
            if self.classes.contains(name) {
                Ok(name.to_string())
            } else {
                Err(KgError::UndeclaredTerm {
                    line,
                    name: name.to_string(),
                })
            }
        };
        let prop = |name: &str| -> Result<String, KgError> {
            if self.properties.contains(name) {
                Ok(name.to_string())
            } else {
                Err(KgError::UndeclaredTerm {
                    line,
                    name: name.to_string(),
                })
            }
        };
        let distinct = |a: &str, b: &str| -> Result<(), KgError> {
            if a == b {
                Err(KgError::SelfAxiom {
                    line,
                    term: a.to_string(),
                })
            } else {
                Ok(())
            }
        };

        let axiom = match tokens[0] {
            "namespace" => {
                arity(1)?;
                self.namespace = tokens[1].to_string();
                return Ok(());
            }
            kw @ ("class" | "prop") => {
                arity(1)?;
                let name = tokens[1];
                if !valid_local(name) {
                    return Err(malformed(format!("invalid term name {name:?}")));
                }
                let (mine, other) = if kw == "class" {
                    (&mut self.classes, &self.properties)
                } else {
                    (&mut self.properties, &self.classes)
                };
                if other.contains(name) {
                    return Err(malformed(format!(
                        "{name:?} declared as both class and property"
                    )));
                }
                mine.insert(name.to_string());
                return Ok(());
            }
            kw @ ("annclass" | "annprop") => {
                if tokens.len() < 3 {
                    return Err(malformed(format!(
                        "{kw} takes a corpus name and a schema term"
                    )));
                }
                let term = tokens[tokens.len() - 1];
                let corpus_name = tokens[1..tokens.len() - 1].join(" ");
                let (term, map) = if kw == "annclass" {
                    (class(term)?, &mut self.annotation_classes)
                } else {
                    (prop(term)?, &mut self.annotation_properties)
                };
                if map.contains_key(&corpus_name) {
                    return Err(malformed(format!("{corpus_name:?} designated twice")));
                }
                if map.values().any(|t| *t == term) {
                    return Err(malformed(format!(
                        "{term:?} already designates another corpus name"
                    )));
                }
                map.insert(corpus_name, term);
                return Ok(());
            }
            "subclass" | "eqclass" => {
                arity(2)?;
                let (a, b) = (class(tokens[1])?, class(tokens[2])?);
                distinct(&a, &b)?;
                if tokens[0] == "subclass" {
                    Axiom::SubClassOf(a, b)
                } else {
                    Axiom::EquivalentClasses(a, b)
                }
            }
            "subprop" | "eqprop" | "inverse" => {
                arity(2)?;
                let (a, b) = (prop(tokens[1])?, prop(tokens[2])?);
                distinct(&a, &b)?;
                match tokens[0] {
                    "subprop" => Axiom::SubPropertyOf(a, b),
                    "eqprop" => Axiom::EquivalentProperties(a, b),
                    _ => Axiom::InverseOf(a, b),
                }
            }
            "transitive" | "symmetric" => {
                arity(1)?;
                let p = prop(tokens[1])?;
                if tokens[0] == "transitive" {
                    Axiom::Transitive(p)
                } else {
                    Axiom::Symmetric(p)
                }
            }
            "domain" | "range" => {
                arity(2)?;
                let (p, c) = (prop(tokens[1])?, class(tokens[2])?);
                if tokens[0] == "domain" {
                    Axiom::Domain(p, c)
                } else {
                    Axiom::Range(p, c)
                }
            }
            other => return Err(malformed(format!("unknown statement {other:?}"))),
        };
        if !self.axioms.contains(&axiom) {
            self.axioms.push(axiom);
        }
        Ok(())
    }

    pub fn load(path: &std::path::Path) -> Result<Self, KgError> {
        let text = std::fs::read_to_string(path).map_err(|source| KgError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text)
    }

    /// A schema declaring one class per object class and one property per
    /// predicate, named by the mangling rule and designated accordingly.
    pub fn scaffold(classes: &MasterList, predicates: &MasterList) -> Result<Self, KgError> {
        let mut schema = Schema::default();
        let mut seen: BTreeMap<String, String> = BTreeMap::new();
        for (names, is_class) in [(classes, true), (predicates, false)] {
            for (id, name) in names.names().iter().enumerate() {
                if names.is_retired(id) {
                    continue;
                }
                let local = if is_class {
                    mangle_class(name)
                } else {
                    mangle_property(name)
                };
                if !valid_local(&local) {
                    return Err(KgError::MalformedAxiom {
                        line: 0,
                        reason: format!("{name:?} does not mangle to a usable term"),
                    });
                }
                if let Some(prev) = seen.insert(local.clone(), name.clone()) {
                    return Err(KgError::ManglingCollision {
                        first: prev,
                        second: name.clone(),
                        term: local,
                    });
                }
                if is_class {
                    schema.classes.insert(local.clone());
                    schema.annotation_classes.insert(name.clone(), local);
                } else {
                    schema.properties.insert(local.clone());
                    schema.annotation_properties.insert(name.clone(), local);
                }
            }
        }
        Ok(schema)
    }

    /// Text form accepted by [`Schema::parse`].
    pub fn render(&self) -> String {
        let mut out = String::new();
        writeln!(out, "namespace {}", self.namespace).unwrap();
        for c in &self.classes {
            writeln!(out, "class {c}").unwrap();
        }
        for p in &self.properties {
            writeln!(out, "prop {p}").unwrap();
        }
        for a in &self.axioms {
            writeln!(out, "{}", a.render()).unwrap();
        }
        for (name, c) in &self.annotation_classes {
            writeln!(out, "annclass {name} {c}").unwrap();
        }
        for (name, p) in &self.annotation_properties {
            writeln!(out, "annprop {name} {p}").unwrap();
        }
        out
    }

    /// Reflexive-transitive superclasses of every declared class, following
    /// `subclass` edges and both directions of `eqclass`.
    pub fn superclass_closure(&self) -> BTreeMap<String, BTreeSet<String>> {
        let mut direct: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
        for a in &self.axioms {
            match a {
                Axiom::SubClassOf(c, d) => direct.entry(c).or_default().push(d),
                Axiom::EquivalentClasses(c, d) => {
                    direct.entry(c).or_default().push(d);
                    direct.entry(d).or_default().push(c);
                }
                _ => {}
            }
        }
        self.classes
            .iter()
            .map(|c| {
                let mut seen = BTreeSet::from([c.clone()]);
                let mut stack = vec![c.as_str()];
                while let Some(x) = stack.pop() {
                    for &d in direct.get(x).into_iter().flatten() {
                        if seen.insert(d.to_string()) {
                            stack.push(d);
                        }
                    }
                }
                (c.clone(), seen)
            })
            .collect()
    }
}
