use std::collections::{BTreeSet, HashMap};
use std::fmt;

pub const RDF_TYPE: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";
pub const XSD_INTEGER: &str = "http://www.w3.org/2001/XMLSchema#integer";

/// An absolute IRI.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Iri(String);

impl Iri {
    pub fn new(s: impl Into<String>) -> Self {
        Iri(s.into())
    }

    /// `namespace` followed by `local`.
    pub fn join(namespace: &str, local: &str) -> Self {
        Iri(format!("{namespace}{local}"))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// The part of the IRI after `namespace`, if it starts with it.
    pub fn local_in<'a>(&'a self, namespace: &str) -> Option<&'a str> {
        self.0.strip_prefix(namespace)
    }
}

impl fmt::Display for Iri {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{}>", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Iri(Iri),
    Integer(i64),
    Str(String),
}

impl Term {
    pub fn iri(s: impl Into<String>) -> Self {
        Term::Iri(Iri::new(s))
    }

    pub fn is_literal(&self) -> bool {
        !matches!(self, Term::Iri(_))
    }

    pub fn as_iri(&self) -> Option<&Iri> {
        match self {
            Term::Iri(i) => Some(i),
            _ => None,
        }
    }
}

impl From<Iri> for Term {
    fn from(i: Iri) -> Self {
        Term::Iri(i)
    }
}

/// `(subject, predicate, object)`; only the object may be a literal.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Triple {
    pub subject: Iri,
    pub predicate: Iri,
    pub object: Term,
}

impl Triple {
    pub fn new(subject: Iri, predicate: Iri, object: impl Into<Term>) -> Self {
        Self {
            subject,
            predicate,
            object: object.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub(crate) struct TermId(u32);

/// An in-memory triple set with subject-predicate and predicate-object
/// indexes. Terms are interned.
#[derive(Debug, Clone, Default)]
pub struct GraphStore {
    terms: Vec<Term>,
    ids: HashMap<Term, TermId>,
    spo: BTreeSet<(TermId, TermId, TermId)>,
    sp: HashMap<(TermId, TermId), BTreeSet<TermId>>,
    po: HashMap<(TermId, TermId), BTreeSet<TermId>>,
}

impl PartialEq for GraphStore {
    fn eq(&self, other: &Self) -> bool {
        self.len() == other.len() && self.triples().all(|t| other.contains(&t))
    }
}

impl Eq for GraphStore {}

impl GraphStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.spo.len()
    }

    pub fn is_empty(&self) -> bool {
        self.spo.is_empty()
    }

    pub(crate) fn intern(&mut self, term: &Term) -> TermId {
        if let Some(&id) = self.ids.get(term) {
            return id;
        }
        let id = TermId(u32::try_from(self.terms.len()).expect("term table overflow"));
        self.terms.push(term.clone());
        self.ids.insert(term.clone(), id);
        id
    }

    pub(crate) fn lookup(&self, term: &Term) -> Option<TermId> {
        self.ids.get(term).copied()
    }

    pub(crate) fn term(&self, id: TermId) -> &Term {
        &self.terms[id.0 as usize]
    }

    /// Inserts by id; returns `true` if the triple was new.
    pub(crate) fn insert_ids(&mut self, s: TermId, p: TermId, o: TermId) -> bool {
        if !self.spo.insert((s, p, o)) {
            return false;
        }
        self.sp.entry((s, p)).or_default().insert(o);
        self.po.entry((p, o)).or_default().insert(s);
        true
    }

    pub fn insert(&mut self, triple: Triple) -> bool {
        let s = self.intern(&Term::Iri(triple.subject));
        let p = self.intern(&Term::Iri(triple.predicate));
        let o = self.intern(&triple.object);
        self.insert_ids(s, p, o)
    }

    pub fn contains(&self, triple: &Triple) -> bool {
        let lookup = |t: Term| self.lookup(&t);
        match (
            lookup(Term::Iri(triple.subject.clone())),
            lookup(Term::Iri(triple.predicate.clone())),
            self.lookup(&triple.object),
        ) {
            (Some(s), Some(p), Some(o)) => self.spo.contains(&(s, p, o)),
            _ => false,
        }
    }

    pub(crate) fn id_triples(&self) -> impl Iterator<Item = (TermId, TermId, TermId)> + '_ {
        self.spo.iter().copied()
    }

    pub(crate) fn objects_of(&self, s: TermId, p: TermId) -> impl Iterator<Item = TermId> + '_ {
        self.sp.get(&(s, p)).into_iter().flatten().copied()
    }

    pub(crate) fn subjects_of(&self, p: TermId, o: TermId) -> impl Iterator<Item = TermId> + '_ {
        self.po.get(&(p, o)).into_iter().flatten().copied()
    }

    fn resolve(&self, (s, p, o): (TermId, TermId, TermId)) -> Triple {
        let iri = |id| match self.term(id) {
            Term::Iri(i) => i.clone(),
            other => unreachable!("literal {other:?} outside object position"),
        };
        Triple {
            subject: iri(s),
            predicate: iri(p),
            object: self.term(o).clone(),
        }
    }

    pub fn triples(&self) -> impl Iterator<Item = Triple> + '_ {
        self.spo.iter().map(|&ids| self.resolve(ids))
    }

    /// Objects of `(subject, predicate, ?)`.
    pub fn objects(&self, subject: &Iri, predicate: &Iri) -> Vec<Term> {
        match (
            self.lookup(&Term::Iri(subject.clone())),
            self.lookup(&Term::Iri(predicate.clone())),
        ) {
            (Some(s), Some(p)) => self
                .objects_of(s, p)
                .map(|o| self.term(o).clone())
                .collect(),
            _ => Vec::new(),
        }
    }
}

impl FromIterator<Triple> for GraphStore {
    fn from_iter<I: IntoIterator<Item = Triple>>(iter: I) -> Self {
        let mut store = GraphStore::new();
        for t in iter {
            store.insert(t);
        }
        store
    }
}
