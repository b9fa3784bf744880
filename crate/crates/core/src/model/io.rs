//! Reading and writing the native annotation files.
//!
//! The annotations file is a JSON object keyed by image filename; each value
//! is an array of records of the form
//!
//! ```text
//! {"predicate": 3, "subject": {"category": 0, "bbox": [ymin, ymax, xmin, xmax]},
//!  "object": {"category": 7, "bbox": [ymin, ymax, xmin, xmax]}}
//! ```
//!
//! Master lists are JSON arrays of strings. The canonical writer sorts image
//! keys, keeps relationship order, and puts one relationship per line, so
//! equal corpora always serialize to the same bytes.

use std::fmt;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use serde::de::{Deserializer, MapAccess, Visitor};
use serde::Deserialize;

use super::corpus::{AnnotationCorpus, MasterList, VisualRelationship};
use super::error::CorpusError;

/// Locations of the three files that make up a corpus.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusPaths {
    pub annotations: PathBuf,
    pub classes: PathBuf,
    pub predicates: PathBuf,
}

impl CorpusPaths {
    pub fn new(
        annotations: impl Into<PathBuf>,
        classes: impl Into<PathBuf>,
        predicates: impl Into<PathBuf>,
    ) -> Self {
        Self {
            annotations: annotations.into(),
            classes: classes.into(),
            predicates: predicates.into(),
        }
    }
}

/// Image entries in file order; duplicate keys are kept so they can be rejected.
struct RawEntries(Vec<(String, Vec<VisualRelationship>)>);

impl<'de> Deserialize<'de> for RawEntries {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct EntriesVisitor;

        impl<'de> Visitor<'de> for EntriesVisitor {
            type Value = RawEntries;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("an object mapping image filenames to relationship arrays")
            }

            fn visit_map<A: MapAccess<'de>>(self, mut map: A) -> Result<RawEntries, A::Error> {
                let mut entries = Vec::new();
                while let Some((key, value)) =
                    map.next_entry::<String, Vec<VisualRelationship>>()?
                {
                    entries.push((key, value));
                }
                Ok(RawEntries(entries))
            }
        }

        deserializer.deserialize_map(EntriesVisitor)
    }
}

fn read(path: &Path) -> Result<String, CorpusError> {
    fs::read_to_string(path).map_err(|e| CorpusError::io(path, e))
}

fn malformed(path: &Path, err: serde_json::Error) -> CorpusError {
    CorpusError::MalformedRecord {
        path: path.to_path_buf(),
        location: format!("line {} column {}: {}", err.line(), err.column(), err),
    }
}

pub fn parse_master_list(text: &str, path: &Path) -> Result<MasterList, CorpusError> {
    let names: Vec<String> = serde_json::from_str(text).map_err(|e| malformed(path, e))?;
    MasterList::new(names)
}

pub fn load_master_list(path: &Path) -> Result<MasterList, CorpusError> {
    parse_master_list(&read(path)?, path)
}

/// Parses annotation text against already-loaded master lists.
pub fn parse_annotations(
    text: &str,
    path: &Path,
    object_classes: MasterList,
    predicates: MasterList,
) -> Result<AnnotationCorpus, CorpusError> {
    let RawEntries(entries) = serde_json::from_str(text).map_err(|e| malformed(path, e))?;
    let mut corpus = AnnotationCorpus::new(object_classes, predicates);
    for (key, vrs) in entries {
        if corpus.images.contains_key(&key) {
            return Err(CorpusError::MalformedRecord {
                path: path.to_path_buf(),
                location: format!("duplicate image key {key:?}"),
            });
        }
        corpus.images.insert(key, vrs);
    }
    corpus.validate()?;
    Ok(corpus)
}

pub fn load_corpus(paths: &CorpusPaths) -> Result<AnnotationCorpus, CorpusError> {
    let classes = load_master_list(&paths.classes)?;
    let predicates = load_master_list(&paths.predicates)?;
    let text = read(&paths.annotations)?;
    parse_annotations(&text, &paths.annotations, classes, predicates)
}

/// Canonical annotations bytes: sorted keys, one relationship per line.
pub fn annotations_to_canonical_bytes(corpus: &AnnotationCorpus) -> Vec<u8> {
    let mut out = Vec::new();
    if corpus.images.is_empty() {
        out.extend_from_slice(b"{}\n");
        return out;
    }
    out.extend_from_slice(b"{\n");
    let last = corpus.images.len() - 1;
    for (n, (image, vrs)) in corpus.images.iter().enumerate() {
        let key = serde_json::to_string(image).expect("string keys always serialize");
        if vrs.is_empty() {
            write!(out, "  {key}: []").unwrap();
        } else {
            writeln!(out, "  {key}: [").unwrap();
            for (i, vr) in vrs.iter().enumerate() {
                let sep = if i + 1 == vrs.len() { "" } else { "," };
                writeln!(
                    out,
                    "    {{\"predicate\": {}, \"subject\": {{\"category\": {}, \"bbox\": {}}}, \"object\": {{\"category\": {}, \"bbox\": {}}}}}{sep}",
                    vr.predicate_id,
                    vr.subject.class_id,
                    bbox_json(vr.subject.bbox.to_array()),
                    vr.object.class_id,
                    bbox_json(vr.object.bbox.to_array()),
                )
                .unwrap();
            }
            write!(out, "  ]").unwrap();
        }
        out.extend_from_slice(if n == last { b"\n" } else { b",\n" });
    }
    out.extend_from_slice(b"}\n");
    out
}

fn bbox_json(c: [i64; 4]) -> String {
    format!("[{}, {}, {}, {}]", c[0], c[1], c[2], c[3])
}

pub fn master_list_to_canonical_bytes(list: &MasterList) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(list.names()).expect("string lists always serialize");
    out.push(b'\n');
    out
}

/// Writes `bytes`, creating missing parent directories.
fn write(path: &Path, bytes: &[u8]) -> Result<(), CorpusError> {
    let io_err = |source| CorpusError::Io {
        path: path.to_path_buf(),
        source,
    };
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(io_err)?;
    }
    fs::write(path, bytes).map_err(io_err)
}

/// Writes only the annotations file.
pub fn save_annotations(corpus: &AnnotationCorpus, path: &Path) -> Result<(), CorpusError> {
    write(path, &annotations_to_canonical_bytes(corpus))
}

pub fn save_master_list(list: &MasterList, path: &Path) -> Result<(), CorpusError> {
    write(path, &master_list_to_canonical_bytes(list))
}

/// Writes annotations and both master lists.
pub fn save_corpus(corpus: &AnnotationCorpus, paths: &CorpusPaths) -> Result<(), CorpusError> {
    save_annotations(corpus, &paths.annotations)?;
    save_master_list(&corpus.object_classes, &paths.classes)?;
    save_master_list(&corpus.predicates, &paths.predicates)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{AnnotatedObject, BoundingBox};

    fn lists() -> (MasterList, MasterList) {
        (
            MasterList::new(["person", "shelf"]).unwrap(),
            MasterList::new(["on"]).unwrap(),
        )
    }

    const ONE: &str = r#"{"a.jpg": [{"predicate": 0, "subject": {"category": 0, "bbox": [1, 5, 2, 8]}, "object": {"category": 1, "bbox": [3, 9, 0, 4]}}]}"#;

    #[test]
    fn parses_single_relationship() {
        let (c, p) = lists();
        let corpus = parse_annotations(ONE, Path::new("x"), c, p).unwrap();
        assert_eq!(corpus.vr_count(), 1);
        let vr = corpus.images["a.jpg"][0];
        assert_eq!(
            vr,
            VisualRelationship::new(
                AnnotatedObject::new(0, BoundingBox::new(1, 5, 2, 8)),
                0,
                AnnotatedObject::new(1, BoundingBox::new(3, 9, 0, 4)),
            )
        );
    }

    #[test]
    fn empty_everything() {
        let corpus = parse_annotations(
            "{}",
            Path::new("x"),
            MasterList::default(),
            MasterList::default(),
        )
        .unwrap();
        assert_eq!(corpus.image_count(), 0);
        assert_eq!(corpus.vr_count(), 0);
        assert_eq!(annotations_to_canonical_bytes(&corpus), b"{}\n");
    }

    #[test]
    fn out_of_range_class_is_hard_error() {
        let (c, p) = lists();
        let text = ONE.replace("\"category\": 1", "\"category\": 5");
        let err = parse_annotations(&text, Path::new("x"), c, p).unwrap_err();
        assert!(matches!(
            err,
            CorpusError::IdOutOfRange {
                vr_index: 0,
                field: "object.category",
                ..
            }
        ));
    }

    #[test]
    fn duplicate_image_key_rejected() {
        let (c, p) = lists();
        let text = r#"{"a.jpg": [], "a.jpg": []}"#;
        let err = parse_annotations(text, Path::new("x"), c, p).unwrap_err();
        assert!(matches!(err, CorpusError::MalformedRecord { .. }));
    }

    #[test]
    fn malformed_reports_location() {
        let (c, p) = lists();
        let err =
            parse_annotations("{\"a.jpg\": [ {\"predicate\": }", Path::new("x"), c, p).unwrap_err();
        match err {
            CorpusError::MalformedRecord { location, .. } => {
                assert!(location.starts_with("line 1"))
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn degenerate_boxes_load() {
        let (c, p) = lists();
        let text = ONE.replace("[1, 5, 2, 8]", "[5, 5, 9, 2]");
        assert!(parse_annotations(&text, Path::new("x"), c, p).is_ok());
    }

    #[test]
    fn missing_file() {
        let err = load_master_list(Path::new("/nonexistent/classes.json")).unwrap_err();
        assert!(matches!(err, CorpusError::FileMissing(_)));
    }

    #[test]
    fn canonical_bytes_reparse() {
        let (c, p) = lists();
        let corpus = parse_annotations(ONE, Path::new("x"), c.clone(), p.clone()).unwrap();
        let bytes = annotations_to_canonical_bytes(&corpus);
        let text = String::from_utf8(bytes.clone()).unwrap();
        let again = parse_annotations(&text, Path::new("x"), c, p).unwrap();
        assert_eq!(again, corpus);
        assert_eq!(annotations_to_canonical_bytes(&again), bytes);
    }
}
