use std::collections::HashMap;

use super::schema::{Axiom, Schema};
use super::store::{GraphStore, Iri, Term, TermId, RDF_TYPE};

/// One-step rule tables keyed by interned term.
#[derive(Default)]
struct Rules {
    rdf_type: Option<TermId>,
    super_props: HashMap<TermId, Vec<TermId>>,
    inverses: HashMap<TermId, Vec<TermId>>,
    symmetric: Vec<TermId>,
    transitive: Vec<TermId>,
    domain: HashMap<TermId, Vec<TermId>>,
    range: HashMap<TermId, Vec<TermId>>,
    super_classes: HashMap<TermId, Vec<TermId>>,
}

impl Rules {
    fn compile(store: &mut GraphStore, schema: &Schema) -> Self {
        let mut id = |local: &str| store.intern(&Term::Iri(Iri::join(&schema.namespace, local)));
        let mut r = Rules::default();
        let push = |m: &mut HashMap<TermId, Vec<TermId>>, k, v| m.entry(k).or_default().push(v);
        for axiom in &schema.axioms {
            match axiom {
                Axiom::SubPropertyOf(p, q) => push(&mut r.super_props, id(p), id(q)),
                Axiom::EquivalentProperties(p, q) => {
                    let (p, q) = (id(p), id(q));
                    push(&mut r.super_props, p, q);
                    push(&mut r.super_props, q, p);
                }
                Axiom::InverseOf(p, q) => {
                    let (p, q) = (id(p), id(q));
                    push(&mut r.inverses, p, q);
                    push(&mut r.inverses, q, p);
                }
                Axiom::Symmetric(p) => r.symmetric.push(id(p)),
                Axiom::Transitive(p) => r.transitive.push(id(p)),
                Axiom::Domain(p, c) => push(&mut r.domain, id(p), id(c)),
                Axiom::Range(p, c) => push(&mut r.range, id(p), id(c)),
                Axiom::SubClassOf(c, d) => push(&mut r.super_classes, id(c), id(d)),
                Axiom::EquivalentClasses(c, d) => {
                    let (c, d) = (id(c), id(d));
                    push(&mut r.super_classes, c, d);
                    push(&mut r.super_classes, d, c);
                }
            }
        }
        if !r.super_classes.is_empty() || !r.domain.is_empty() || !r.range.is_empty() {
            r.rdf_type = Some(store.intern(&Term::iri(RDF_TYPE)));
        } else {
            r.rdf_type = store.lookup(&Term::iri(RDF_TYPE));
        }
        r
    }

    /// Every triple derivable in one rule application with `(s, p, o)` as
    /// one premise and the current store supplying any other premise.
    fn consequences(
        &self,
        store: &GraphStore,
        (s, p, o): (TermId, TermId, TermId),
    ) -> Vec<(TermId, TermId, TermId)> {
        let mut out = Vec::new();
        let o_is_iri = !store.term(o).is_literal();
        for &q in self.super_props.get(&p).into_iter().flatten() {
            out.push((s, q, o));
        }
        if o_is_iri {
            for &q in self.inverses.get(&p).into_iter().flatten() {
                out.push((o, q, s));
            }
            if self.symmetric.contains(&p) {
                out.push((o, p, s));
            }
        }
        if self.transitive.contains(&p) {
            out.extend(store.objects_of(o, p).map(|z| (s, p, z)));
            out.extend(store.subjects_of(p, s).map(|w| (w, p, o)));
        }
        if let Some(ty) = self.rdf_type {
            if p == ty {
                for &d in self.super_classes.get(&o).into_iter().flatten() {
                    out.push((s, ty, d));
                }
            }
            for &c in self.domain.get(&p).into_iter().flatten() {
                out.push((s, ty, c));
            }
            if o_is_iri {
                for &c in self.range.get(&p).into_iter().flatten() {
                    out.push((o, ty, c));
                }
            }
        }
        out
    }
}

/// Extends `store` to the least fixpoint of the schema's inference rules.
/// Returns the number of triples added.
pub fn materialize(store: &mut GraphStore, schema: &Schema) -> usize {
    let rules = Rules::compile(store, schema);
    let mut pending: Vec<_> = store.id_triples().collect();
    let mut added = 0;
    while let Some(t) = pending.pop() {
        for (s, p, o) in rules.consequences(store, t) {
            if store.insert_ids(s, p, o) {
                added += 1;
                pending.push((s, p, o));
            }
        }
    }
    added
}
