use std::collections::HashMap;

use super::schema::Schema;
use super::store::{GraphStore, Iri, Term, Triple, RDF_TYPE};
use super::KgError;
use crate::model::{AnnotatedObject, AnnotationCorpus, VisualRelationship};

/// Structural IRIs shared by lowering and extraction.
#[derive(Debug, Clone)]
pub struct Vocabulary {
    pub namespace: String,
    pub rdf_type: Iri,
    pub image_class: Iri,
    pub has_filename: Iri,
    pub has_object: Iri,
    /// `ymin`, `ymax`, `xmin`, `xmax` in bbox order.
    pub coords: [Iri; 4],
}

impl Vocabulary {
    pub fn new(namespace: &str) -> Self {
        let j = |local: &str| Iri::join(namespace, local);
        Self {
            namespace: namespace.to_string(),
            rdf_type: Iri::new(RDF_TYPE),
            image_class: j("Image"),
            has_filename: j("hasFilename"),
            has_object: j("hasObject"),
            coords: [j("bboxYmin"), j("bboxYmax"), j("bboxXmin"), j("bboxXmax")],
        }
    }

    pub fn term(&self, local: &str) -> Iri {
        Iri::join(&self.namespace, local)
    }

    pub fn image_iri(&self, filename: &str) -> Iri {
        let mut local = String::from("img_");
        for b in filename.bytes() {
            if b.is_ascii_alphanumeric() || matches!(b, b'-' | b'.' | b'_' | b'~') {
                local.push(b as char);
            } else {
                local.push_str(&format!("%{b:02X}"));
            }
        }
        self.term(&local)
    }
}

struct Mapper<'a> {
    corpus: &'a AnnotationCorpus,
    schema: &'a Schema,
    vocab: Vocabulary,
}

impl Mapper<'_> {
    fn class(&self, id: usize) -> Result<Iri, KgError> {
        let name = self.corpus.class_name(id);
        self.schema
            .annotation_classes
            .get(name)
            .map(|local| self.vocab.term(local))
            .ok_or_else(|| KgError::UnmappedName {
                kind: "object class",
                name: name.to_string(),
            })
    }

    fn property(&self, id: usize) -> Result<Iri, KgError> {
        let name = self.corpus.predicate_name(id);
        self.schema
            .annotation_properties
            .get(name)
            .map(|local| self.vocab.term(local))
            .ok_or_else(|| KgError::UnmappedName {
                kind: "predicate",
                name: name.to_string(),
            })
    }

    fn lower_one(
        &self,
        store: &mut GraphStore,
        filename: &str,
        vrs: &[VisualRelationship],
    ) -> Result<(), KgError> {
        let v = &self.vocab;
        let img = v.image_iri(filename);
        store.insert(Triple::new(
            img.clone(),
            v.rdf_type.clone(),
            v.image_class.clone(),
        ));
        store.insert(Triple::new(
            img.clone(),
            v.has_filename.clone(),
            Term::Str(filename.to_string()),
        ));

        let mut individuals: HashMap<AnnotatedObject, Iri> = HashMap::new();
        let mut individual =
            |store: &mut GraphStore, obj: AnnotatedObject| -> Result<Iri, KgError> {
                if let Some(iri) = individuals.get(&obj) {
                    return Ok(iri.clone());
                }
                let iri = Iri::new(format!("{}_o{}", img.as_str(), individuals.len()));
                store.insert(Triple::new(img.clone(), v.has_object.clone(), iri.clone()));
                store.insert(Triple::new(
                    iri.clone(),
                    v.rdf_type.clone(),
                    self.class(obj.class_id)?,
                ));
                for (prop, value) in v.coords.iter().zip(obj.bbox.to_array()) {
                    store.insert(Triple::new(iri.clone(), prop.clone(), Term::Integer(value)));
                }
                individuals.insert(obj, iri.clone());
                Ok(iri)
            };
        for vr in vrs {
            let s = individual(store, vr.subject)?;
            let o = individual(store, vr.object)?;
            store.insert(Triple::new(s, self.property(vr.predicate_id)?, o));
        }
        Ok(())
    }
}

/// Lowers every image of `corpus`.
pub fn lower_annotations(
    corpus: &AnnotationCorpus,
    schema: &Schema,
) -> Result<GraphStore, KgError> {
    let mapper = Mapper {
        corpus,
        schema,
        vocab: Vocabulary::new(&schema.namespace),
    };
    let mut store = GraphStore::new();
    for (filename, vrs) in &corpus.images {
        mapper.lower_one(&mut store, filename, vrs)?;
    }
    Ok(store)
}

/// Lowers a single image of `corpus`.
pub fn lower_image(
    corpus: &AnnotationCorpus,
    schema: &Schema,
    filename: &str,
) -> Result<GraphStore, KgError> {
    let vrs = corpus
        .images
        .get(filename)
        .ok_or_else(|| KgError::ImageNotFound(filename.to_string()))?;
    let mapper = Mapper {
        corpus,
        schema,
        vocab: Vocabulary::new(&schema.namespace),
    };
    let mut store = GraphStore::new();
    mapper.lower_one(&mut store, filename, vrs)?;
    Ok(store)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{BoundingBox, MasterList};

    fn obj(c: usize, y: i64) -> AnnotatedObject {
        AnnotatedObject::new(c, BoundingBox::new(y, y + 10, 0, 10))
    }

    fn fixture() -> (AnnotationCorpus, Schema) {
        let classes = MasterList::new(["person", "shelf", "teddy bear"]).unwrap();
        let preds = MasterList::new(["on", "near"]).unwrap();
        let corpus = AnnotationCorpus::new(classes.clone(), preds.clone());
        (corpus, Schema::scaffold(&classes, &preds).unwrap())
    }

    #[test]
    fn one_relationship_counts() {
        let (mut corpus, schema) = fixture();
        corpus.images.insert(
            "a.jpg".into(),
            vec![VisualRelationship::new(obj(0, 0), 0, obj(1, 5))],
        );
        let store = lower_annotations(&corpus, &schema).unwrap();
        // type(Image) + filename + 2 hasObject + 2 type + 8 coords + 1 VR
        assert_eq!(store.len(), 15);
    }

    #[test]
    fn shared_subject_is_one_individual() {
        let (mut corpus, schema) = fixture();
        corpus.images.insert(
            "a.jpg".into(),
            vec![
                VisualRelationship::new(obj(0, 0), 0, obj(1, 5)),
                VisualRelationship::new(obj(0, 0), 1, obj(2, 7)),
            ],
        );
        let store = lower_annotations(&corpus, &schema).unwrap();
        let v = Vocabulary::new(&schema.namespace);
        let has_object = store
            .triples()
            .filter(|t| t.predicate == v.has_object)
            .count();
        assert_eq!(has_object, 3);
    }

    #[test]
    fn empty_corpus_and_unmapped() {
        let (mut corpus, mut schema) = fixture();
        assert!(lower_annotations(&corpus, &schema).unwrap().is_empty());
        corpus.images.insert(
            "a.jpg".into(),
            vec![VisualRelationship::new(obj(0, 0), 1, obj(1, 5))],
        );
        schema.annotation_properties.remove("near");
        assert!(matches!(
            lower_annotations(&corpus, &schema),
            Err(KgError::UnmappedName { name, .. }) if name == "near"
        ));
        assert!(matches!(
            lower_image(&corpus, &schema, "zz.jpg"),
            Err(KgError::ImageNotFound(_))
        ));
    }

    #[test]
    fn image_iri_escaping() {
        let v = Vocabulary::new("urn:x#");
        assert_eq!(v.image_iri("a b/c.jpg").as_str(), "urn:x#img_a%20b%2Fc.jpg");
    }
}
