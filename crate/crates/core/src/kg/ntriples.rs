//! N-Triples reading and writing for [`GraphStore`] dumps.
//!
//! Written output has one triple per line, lines sorted bytewise, so dumps
//! of equal stores are byte-identical.

use std::fmt::Write as _;
use std::path::Path;

use super::store::{GraphStore, Iri, Term, Triple, XSD_INTEGER};
use super::KgError;

const XSD_STRING: &str = "http://www.w3.org/2001/XMLSchema#string";

fn escape_into(out: &mut String, s: &str) {
    for c in s.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '"' => out.push_str("\\\""),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 || c == '\u{7f}' => write!(out, "\\u{:04X}", c as u32).unwrap(),
            c => out.push(c),
        }
    }
}

fn write_iri(out: &mut String, iri: &str) {
    out.push('<');
    for c in iri.chars() {
        match c {
            '<' | '>' | '"' | '{' | '}' | '|' | '^' | '`' | '\\' => {
                write!(out, "\\u{:04X}", c as u32).unwrap()
            }
            c if (c as u32) <= 0x20 => write!(out, "\\u{:04X}", c as u32).unwrap(),
            c => out.push(c),
        }
    }
    out.push('>');
}

pub fn format_triple(t: &Triple) -> String {
    let mut out = String::new();
    write_iri(&mut out, t.subject.as_str());
    out.push(' ');
    write_iri(&mut out, t.predicate.as_str());
    out.push(' ');
    match &t.object {
        Term::Iri(i) => write_iri(&mut out, i.as_str()),
        Term::Integer(n) => {
            write!(out, "\"{n}\"^^").unwrap();
            write_iri(&mut out, XSD_INTEGER);
        }
        Term::Str(s) => {
            out.push('"');
            escape_into(&mut out, s);
            out.push('"');
        }
    }
    out.push_str(" .");
    out
}

/// Sorted N-Triples text of the whole store.
pub fn to_ntriples(store: &GraphStore) -> String {
    let mut lines: Vec<String> = store.triples().map(|t| format_triple(&t)).collect();
    lines.sort_unstable();
    let mut out = String::with_capacity(lines.iter().map(|l| l.len() + 1).sum());
    for l in lines {
        out.push_str(&l);
        out.push('\n');
    }
    out
}

struct Cursor<'a> {
    rest: &'a str,
    line: usize,
}

impl<'a> Cursor<'a> {
    fn err(&self, reason: impl Into<String>) -> KgError {
        KgError::Syntax {
            line: self.line,
            reason: reason.into(),
        }
    }

    fn skip_ws(&mut self) {
        self.rest = self.rest.trim_start_matches([' ', '\t']);
    }

    fn eat(&mut self, prefix: &str) -> bool {
        if let Some(r) = self.rest.strip_prefix(prefix) {
            self.rest = r;
            true
        } else {
            false
        }
    }

    fn hex_escape(&mut self, digits: usize) -> Result<char, KgError> {
        let hex = self
            .rest
            .get(..digits)
            .ok_or_else(|| self.err("truncated unicode escape"))?;
        let code = u32::from_str_radix(hex, 16).map_err(|_| self.err("bad unicode escape"))?;
        self.rest = &self.rest[digits..];
        char::from_u32(code).ok_or_else(|| self.err("escape is not a scalar value"))
    }

    fn iri(&mut self) -> Result<Iri, KgError> {
        if !self.eat("<") {
            return Err(self.err("expected IRI"));
        }
        let mut out = String::new();
        loop {
            let mut chars = self.rest.chars();
            let c = chars.next().ok_or_else(|| self.err("unterminated IRI"))?;
            self.rest = chars.as_str();
            match c {
                '>' => break,
                '\\' => {
                    if self.eat("u") {
                        out.push(self.hex_escape(4)?);
                    } else if self.eat("U") {
                        out.push(self.hex_escape(8)?);
                    } else {
                        return Err(self.err("bad escape in IRI"));
                    }
                }
                c if c == ' ' || c == '<' || c == '"' => {
                    return Err(self.err(format!("{c:?} inside IRI")))
                }
                c => out.push(c),
            }
        }
        if out.is_empty() {
            return Err(self.err("empty IRI"));
        }
        Ok(Iri::new(out))
    }

    fn literal(&mut self) -> Result<Term, KgError> {
        self.eat("\"");
        let mut value = String::new();
        loop {
            let mut chars = self.rest.chars();
            let c = chars
                .next()
                .ok_or_else(|| self.err("unterminated literal"))?;
            self.rest = chars.as_str();
            match c {
                '"' => break,
                '\\' => {
                    let mut chars = self.rest.chars();
                    let e = chars.next().ok_or_else(|| self.err("dangling escape"))?;
                    self.rest = chars.as_str();
                    match e {
                        't' => value.push('\t'),
                        'b' => value.push('\u{8}'),
                        'n' => value.push('\n'),
                        'r' => value.push('\r'),
                        'f' => value.push('\u{c}'),
                        '"' => value.push('"'),
                        '\'' => value.push('\''),
                        '\\' => value.push('\\'),
                        'u' => value.push(self.hex_escape(4)?),
                        'U' => value.push(self.hex_escape(8)?),
                        other => return Err(self.err(format!("unknown escape \\{other}"))),
                    }
                }
                c => value.push(c),
            }
        }
        if self.rest.starts_with('@') {
            return Err(self.err("language-tagged literals are not supported"));
        }
        if self.eat("^^") {
            let dt = self.iri()?;
            return match dt.as_str() {
                XSD_INTEGER => value
                    .parse::<i64>()
                    .map(Term::Integer)
                    .map_err(|_| self.err(format!("{value:?} is not an integer"))),
                XSD_STRING => Ok(Term::Str(value)),
                other => Err(self.err(format!("unsupported datatype <{other}>"))),
            };
        }
        Ok(Term::Str(value))
    }

    fn triple(&mut self) -> Result<Triple, KgError> {
        self.skip_ws();
        if self.rest.starts_with("_:") {
            return Err(self.err("blank nodes are not supported"));
        }
        let subject = self.iri()?;
        self.skip_ws();
        let predicate = self.iri()?;
        self.skip_ws();
        let object = if self.rest.starts_with('"') {
            self.literal()?
        } else if self.rest.starts_with("_:") {
            return Err(self.err("blank nodes are not supported"));
        } else {
            Term::Iri(self.iri()?)
        };
        self.skip_ws();
        if !self.eat(".") {
            return Err(self.err("expected '.' after object"));
        }
        self.skip_ws();
        if !(self.rest.is_empty() || self.rest.starts_with('#')) {
            return Err(self.err("trailing content after '.'"));
        }
        Ok(Triple {
            subject,
            predicate,
            object,
        })
    }
}

pub fn parse_ntriples(text: &str) -> Result<GraphStore, KgError> {
    let mut store = GraphStore::new();
    for (n, raw) in text.lines().enumerate() {
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut cur = Cursor {
            rest: trimmed,
            line: n + 1,
        };
        store.insert(cur.triple()?);
    }
    Ok(store)
}

pub fn load_ntriples(path: &Path) -> Result<GraphStore, KgError> {
    let text = std::fs::read_to_string(path).map_err(|source| KgError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_ntriples(&text)
}

pub fn save_ntriples(store: &GraphStore, path: &Path) -> Result<(), KgError> {
    std::fs::write(path, to_ntriples(store)).map_err(|source| KgError::Io {
        path: path.to_path_buf(),
        source,
    })
}
