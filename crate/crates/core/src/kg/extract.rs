use std::collections::{BTreeMap, BTreeSet, HashMap};

use super::lower::Vocabulary;
use super::schema::Schema;
use super::store::{GraphStore, Iri, Term};
use super::KgError;
use crate::model::{
    AnnotatedObject, AnnotationCorpus, BoundingBox, MasterList, VisualRelationship,
};

/// Sorts by subject bbox, predicate, object bbox (class ids break ties)
/// and drops exact duplicates.
pub fn canonical_order(vrs: &mut Vec<VisualRelationship>) {
    vrs.sort_by_key(|v| {
        (
            v.subject.bbox,
            v.predicate_id,
            v.object.bbox,
            v.subject.class_id,
            v.object.class_id,
        )
    });
    vrs.dedup();
}

fn malformed(msg: String) -> KgError {
    KgError::MalformedGraph(msg)
}

struct Extractor<'a> {
    store: &'a GraphStore,
    vocab: Vocabulary,
    /// Annotation class IRI to corpus class id.
    class_ids: HashMap<Iri, usize>,
    /// Annotation property IRI to corpus predicate id.
    predicate_ids: HashMap<Iri, usize>,
    /// Reflexive-transitive superclasses of each annotation class IRI.
    supers: HashMap<Iri, BTreeSet<Iri>>,
}

impl Extractor<'_> {
    fn object(&self, ind: &Iri) -> Result<AnnotatedObject, KgError> {
        let mut coords = [0i64; 4];
        for (slot, prop) in coords.iter_mut().zip(&self.vocab.coords) {
            match self.store.objects(ind, prop).as_slice() {
                [Term::Integer(v)] => *slot = *v,
                [] => return Err(malformed(format!("{ind} lacks {prop}"))),
                [_] => return Err(malformed(format!("{ind} has a non-integer {prop}"))),
                _ => return Err(malformed(format!("{ind} has several {prop} values"))),
            }
        }
        let [ymin, ymax, xmin, xmax] = coords;
        Ok(AnnotatedObject::new(
            self.class_of(ind)?,
            BoundingBox::new(ymin, ymax, xmin, xmax),
        ))
    }

    fn class_of(&self, ind: &Iri) -> Result<usize, KgError> {
        let candidates: Vec<&Iri> = self
            .store
            .objects(ind, &self.vocab.rdf_type)
            .iter()
            .filter_map(Term::as_iri)
            .filter_map(|c| self.class_ids.get_key_value(c).map(|(k, _)| k))
            .collect();
        let minimal: Vec<&Iri> = candidates
            .iter()
            .copied()
            .filter(|c| candidates.iter().all(|d| self.supers[*c].contains(*d)))
            .collect();
        match minimal.as_slice() {
            [c] => Ok(self.class_ids[*c]),
            _ => Err(KgError::AmbiguousClass(ind.to_string())),
        }
    }
}

/// Rebuilds annotations from the image/object structure in `store`.
///
/// Only triples whose predicate is a designated annotation property and
/// whose endpoints are objects of the same image become relationships.
/// Names are resolved against `classes` and `predicates`.
pub fn extract_annotations(
    store: &GraphStore,
    schema: &Schema,
    classes: &MasterList,
    predicates: &MasterList,
) -> Result<AnnotationCorpus, KgError> {
    let vocab = Vocabulary::new(&schema.namespace);
    let resolve = |map: &BTreeMap<String, String>, list: &MasterList, kind| {
        map.iter()
            .map(|(name, local)| {
                list.live_id(name)
                    .map(|id| (vocab.term(local), id))
                    .ok_or_else(|| KgError::UnmappedName {
                        kind,
                        name: name.clone(),
                    })
            })
            .collect::<Result<HashMap<_, _>, _>>()
    };
    let class_ids = resolve(&schema.annotation_classes, classes, "object class")?;
    let predicate_ids = resolve(&schema.annotation_properties, predicates, "predicate")?;
    let closure = schema.superclass_closure();
    let supers = class_ids
        .keys()
        .map(|iri| {
            let local = iri.local_in(&schema.namespace).unwrap_or_default();
            let set = closure[local].iter().map(|c| vocab.term(c)).collect();
            (iri.clone(), set)
        })
        .collect();
    let ex = Extractor {
        store,
        vocab,
        class_ids,
        predicate_ids,
        supers,
    };

    let mut corpus = AnnotationCorpus::new(classes.clone(), predicates.clone());
    let mut images: Vec<(Iri, String)> = Vec::new();
    for t in store
        .triples()
        .filter(|t| t.predicate == ex.vocab.has_filename)
    {
        let Term::Str(name) = &t.object else {
            return Err(malformed(format!(
                "{} has a non-string filename",
                t.subject
            )));
        };
        if store.objects(&t.subject, &ex.vocab.has_filename).len() != 1 {
            return Err(malformed(format!("{} has several filenames", t.subject)));
        }
        if corpus.images.insert(name.clone(), Vec::new()).is_some() {
            return Err(malformed(format!(
                "filename {name:?} on several image individuals"
            )));
        }
        images.push((t.subject.clone(), name.clone()));
    }

    let mut objects: HashMap<Iri, (AnnotatedObject, &str)> = HashMap::new();
    for (img, name) in &images {
        for term in store.objects(img, &ex.vocab.has_object) {
            let ind = term
                .as_iri()
                .ok_or_else(|| malformed(format!("{img} hasObject a literal")))?;
            if let Some((_, other)) = objects.insert(ind.clone(), (ex.object(ind)?, name)) {
                return Err(malformed(format!(
                    "{ind} belongs to images {other:?} and {name:?}"
                )));
            }
        }
    }
    for t in store.triples() {
        let Some(&pred) = ex.predicate_ids.get(&t.predicate) else {
            continue;
        };
        let Some(&(s, image)) = objects.get(&t.subject) else {
            continue;
        };
        match t.object.as_iri().and_then(|o| objects.get(o)) {
            Some(&(o, other)) if other == image => {
                corpus
                    .images
                    .get_mut(image)
                    .expect("registered image")
                    .push(VisualRelationship::new(s, pred, o));
            }
            _ => {}
        }
    }
    for vrs in corpus.images.values_mut() {
        canonical_order(vrs);
    }
    Ok(corpus)
}
