//! Helpers shared by the integration test targets: fixture paths, seeded
//! corpus generators, and oracles written independently of the library.

#![allow(dead_code)]

use std::collections::{BTreeSet, HashSet};
use std::path::PathBuf;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use vrdkit::kg::{Axiom, Iri, Schema, Term, Triple, RDF_TYPE};
use vrdkit::model::{
    AnnotatedObject, AnnotationCorpus, BoundingBox, CorpusPaths, MasterList, VisualRelationship,
};

pub fn fixture(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(rel)
}

pub fn protocol_demo_paths() -> CorpusPaths {
    CorpusPaths::new(
        fixture("protocol_demo/annotations.json"),
        fixture("protocol_demo/objects.json"),
        fixture("protocol_demo/predicates.json"),
    )
}

pub const CLASSES: [&str; 8] = [
    "person",
    "shelf",
    "teddy bear",
    "dog",
    "table",
    "cup",
    "car",
    "street",
];
pub const PREDICATES: [&str; 8] = [
    "on", "near", "above", "below", "over", "under", "sit on", "wear",
];

pub fn master_lists() -> (MasterList, MasterList) {
    (
        MasterList::new(CLASSES).unwrap(),
        MasterList::new(PREDICATES).unwrap(),
    )
}

/// Small coordinate range so that repeated boxes (shared objects) occur.
pub fn random_bbox(rng: &mut ChaCha8Rng) -> BoundingBox {
    let y = rng.gen_range(0..40);
    let x = rng.gen_range(0..40);
    BoundingBox::new(y, y + rng.gen_range(1..30), x, x + rng.gen_range(1..30))
}

pub fn random_object(rng: &mut ChaCha8Rng, pool: &[AnnotatedObject]) -> AnnotatedObject {
    if !pool.is_empty() && rng.gen_bool(0.4) {
        pool[rng.gen_range(0..pool.len())]
    } else {
        AnnotatedObject::new(rng.gen_range(0..CLASSES.len()), random_bbox(rng))
    }
}

/// A valid corpus over [`CLASSES`] and [`PREDICATES`] using only the
/// predicate ids in `predicates`.
pub fn random_corpus(
    rng: &mut ChaCha8Rng,
    max_images: usize,
    max_vrs: usize,
    predicates: &[usize],
) -> AnnotationCorpus {
    let (classes, preds) = master_lists();
    let mut corpus = AnnotationCorpus::new(classes, preds);
    let n_images = rng.gen_range(0..=max_images);
    for i in 0..n_images {
        let mut pool = Vec::new();
        let mut vrs = Vec::new();
        for _ in 0..rng.gen_range(0..=max_vrs) {
            if !vrs.is_empty() && rng.gen_bool(0.1) {
                // exact duplicate
                vrs.push(vrs[rng.gen_range(0..vrs.len())]);
                continue;
            }
            let s = random_object(rng, &pool);
            pool.push(s);
            let o = random_object(rng, &pool);
            pool.push(o);
            let p = predicates[rng.gen_range(0..predicates.len())];
            vrs.push(VisualRelationship::new(s, p, o));
        }
        corpus.images.insert(format!("img_{i:03}.jpg"), vrs);
    }
    corpus
}

/// Sort key for canonical relationship order, restated here for the oracle.
pub fn canonical_key(v: &VisualRelationship) -> ([i64; 4], usize, [i64; 4], usize, usize) {
    (
        [
            v.subject.bbox.ymin,
            v.subject.bbox.ymax,
            v.subject.bbox.xmin,
            v.subject.bbox.xmax,
        ],
        v.predicate_id,
        [
            v.object.bbox.ymin,
            v.object.bbox.ymax,
            v.object.bbox.xmin,
            v.object.bbox.xmax,
        ],
        v.subject.class_id,
        v.object.class_id,
    )
}

pub fn canonical_dedup(corpus: &AnnotationCorpus) -> AnnotationCorpus {
    let mut out = corpus.clone();
    for vrs in out.images.values_mut() {
        let mut seen = HashSet::new();
        let mut kept: Vec<VisualRelationship> =
            vrs.iter().copied().filter(|v| seen.insert(*v)).collect();
        kept.sort_by_key(canonical_key);
        *vrs = kept;
    }
    out
}

pub fn obj(class_id: usize, ymin: i64, ymax: i64, xmin: i64, xmax: i64) -> AnnotatedObject {
    AnnotatedObject::new(class_id, BoundingBox::new(ymin, ymax, xmin, xmax))
}

// ---------------------------------------------------------------------------
// Naive materialization oracle over plain string triples.

/// `(subject, predicate, object)`; literal objects are prefixed with `"`.
pub type StrTriple = (String, String, String);

fn local(ns: &str, s: &str) -> String {
    format!("{ns}{s}")
}

/// Applies every rule to every triple of the current set until nothing
/// changes. Deliberately unoptimized.
pub fn naive_closure(
    input: &BTreeSet<StrTriple>,
    axioms: &[Axiom],
    ns: &str,
) -> BTreeSet<StrTriple> {
    let ty = RDF_TYPE.to_string();
    let is_lit = |s: &str| s.starts_with('"');
    let mut set = input.clone();
    loop {
        let mut new = BTreeSet::new();
        for (s, p, o) in &set {
            for a in axioms {
                match a {
                    Axiom::SubPropertyOf(x, y) => {
                        if *p == local(ns, x) {
                            new.insert((s.clone(), local(ns, y), o.clone()));
                        }
                    }
                    Axiom::EquivalentProperties(x, y) => {
                        if *p == local(ns, x) {
                            new.insert((s.clone(), local(ns, y), o.clone()));
                        }
                        if *p == local(ns, y) {
                            new.insert((s.clone(), local(ns, x), o.clone()));
                        }
                    }
                    Axiom::InverseOf(x, y) => {
                        if !is_lit(o) {
                            if *p == local(ns, x) {
                                new.insert((o.clone(), local(ns, y), s.clone()));
                            }
                            if *p == local(ns, y) {
                                new.insert((o.clone(), local(ns, x), s.clone()));
                            }
                        }
                    }
                    Axiom::Symmetric(x) => {
                        if *p == local(ns, x) && !is_lit(o) {
                            new.insert((o.clone(), p.clone(), s.clone()));
                        }
                    }
                    Axiom::Transitive(x) => {
                        if *p == local(ns, x) {
                            for (s2, p2, o2) in &set {
                                if p2 == p && s2 == o {
                                    new.insert((s.clone(), p.clone(), o2.clone()));
                                }
                            }
                        }
                    }
                    Axiom::SubClassOf(c, d) => {
                        if *p == ty && *o == local(ns, c) {
                            new.insert((s.clone(), ty.clone(), local(ns, d)));
                        }
                    }
                    Axiom::EquivalentClasses(c, d) => {
                        if *p == ty && *o == local(ns, c) {
                            new.insert((s.clone(), ty.clone(), local(ns, d)));
                        }
                        if *p == ty && *o == local(ns, d) {
                            new.insert((s.clone(), ty.clone(), local(ns, c)));
                        }
                    }
                    Axiom::Domain(x, c) => {
                        if *p == local(ns, x) {
                            new.insert((s.clone(), ty.clone(), local(ns, c)));
                        }
                    }
                    Axiom::Range(x, c) => {
                        if *p == local(ns, x) && !is_lit(o) {
                            new.insert((o.clone(), ty.clone(), local(ns, c)));
                        }
                    }
                }
            }
        }
        let before = set.len();
        set.extend(new);
        if set.len() == before {
            return set;
        }
    }
}

pub fn to_str_triple(t: &Triple) -> StrTriple {
    let o = match &t.object {
        Term::Iri(i) => i.as_str().to_string(),
        Term::Integer(n) => format!("\"{n}"),
        Term::Str(s) => format!("\"s:{s}"),
    };
    (
        t.subject.as_str().to_string(),
        t.predicate.as_str().to_string(),
        o,
    )
}

pub fn from_str_triple((s, p, o): &StrTriple) -> Triple {
    let object = match o.strip_prefix('"') {
        Some(rest) => match rest.strip_prefix("s:") {
            Some(text) => Term::Str(text.to_string()),
            None => Term::Integer(rest.parse().unwrap()),
        },
        None => Term::iri(o.clone()),
    };
    Triple::new(Iri::new(s.clone()), Iri::new(p.clone()), object)
}

/// A random schema of at most `max_axioms` axioms over 4 classes and 4
/// properties, plus a random store of at most `max_triples` triples over 5
/// individuals.
pub fn random_kg_instance(
    rng: &mut ChaCha8Rng,
    max_triples: usize,
    max_axioms: usize,
) -> (Schema, BTreeSet<StrTriple>) {
    let classes = ["C0", "C1", "C2", "C3"];
    let props = ["p0", "p1", "p2", "p3"];
    let mut text = String::new();
    for c in classes {
        text.push_str(&format!("class {c}\n"));
    }
    for p in props {
        text.push_str(&format!("prop {p}\n"));
    }
    let pick = |rng: &mut ChaCha8Rng, xs: &[&'static str]| xs[rng.gen_range(0..xs.len())];
    let pair = |rng: &mut ChaCha8Rng, xs: &[&'static str]| {
        let a = rng.gen_range(0..xs.len());
        let b = (a + rng.gen_range(1..xs.len())) % xs.len();
        (xs[a], xs[b])
    };
    for _ in 0..rng.gen_range(0..=max_axioms) {
        let line = match rng.gen_range(0..9) {
            0 => {
                let (a, b) = pair(rng, &classes);
                format!("subclass {a} {b}")
            }
            1 => {
                let (a, b) = pair(rng, &classes);
                format!("eqclass {a} {b}")
            }
            2 => {
                let (a, b) = pair(rng, &props);
                format!("subprop {a} {b}")
            }
            3 => {
                let (a, b) = pair(rng, &props);
                format!("eqprop {a} {b}")
            }
            4 => {
                let (a, b) = pair(rng, &props);
                format!("inverse {a} {b}")
            }
            5 => format!("transitive {}", pick(rng, &props)),
            6 => format!("symmetric {}", pick(rng, &props)),
            7 => format!("domain {} {}", pick(rng, &props), pick(rng, &classes)),
            _ => format!("range {} {}", pick(rng, &props), pick(rng, &classes)),
        };
        text.push_str(&line);
        text.push('\n');
    }
    let schema = Schema::parse(&text).unwrap();
    let ns = schema.namespace.clone();
    let inds = ["a", "b", "c", "d", "e"];
    let mut store = BTreeSet::new();
    for _ in 0..rng.gen_range(0..=max_triples) {
        let s = local(&ns, pick(rng, &inds));
        let t = match rng.gen_range(0..10) {
            0..=5 => (
                s,
                local(&ns, pick(rng, &props)),
                local(&ns, pick(rng, &inds)),
            ),
            6..=7 => (s, RDF_TYPE.to_string(), local(&ns, pick(rng, &classes))),
            8 => (
                s,
                local(&ns, pick(rng, &props)),
                format!("\"{}", rng.gen_range(0..5)),
            ),
            _ => (s, local(&ns, pick(rng, &props)), "\"s:x".to_string()),
        };
        store.insert(t);
    }
    (schema, store)
}
