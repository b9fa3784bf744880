use std::collections::{BTreeMap, BTreeSet};

use super::{AbortCause, Action, ApplyError, ApplyReport, Edit, ImageBlock, NewRelationship};
use crate::model::{
    AnnotatedObject, AnnotationCorpus, MasterList, NamedVrType, VisualRelationship,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Origin {
    Original(usize),
    Added,
}

/// Per-image identity tracking so the report reflects the net effect.
struct Track {
    original: Vec<VisualRelationship>,
    origins: Vec<Origin>,
}

impl Track {
    fn new(vrs: &[VisualRelationship]) -> Self {
        Self {
            original: vrs.to_vec(),
            origins: (0..vrs.len()).map(Origin::Original).collect(),
        }
    }
}

fn live(list: &MasterList, name: &str) -> Result<usize, AbortCause> {
    list.live_id(name)
        .ok_or_else(|| AbortCause::UnknownName(name.to_string()))
}

/// Applies `blocks` in order to a copy of `corpus`.
///
/// Returns the new corpus only if every instruction succeeds. On the first
/// failure the error carries the offending line and `corpus` is untouched.
pub fn validate_and_apply(
    corpus: &AnnotationCorpus,
    blocks: &[ImageBlock],
) -> Result<(AnnotationCorpus, ApplyReport), ApplyError> {
    let mut work = corpus.clone();
    let mut tracks: BTreeMap<String, Track> = BTreeMap::new();
    let mut touched: BTreeSet<&str> = BTreeSet::new();

    for block in blocks {
        touched.insert(&block.filename);
        let abort = |line, cause| ApplyError { line, cause };

        if !work.images.contains_key(&block.filename) {
            return Err(abort(
                block.line,
                AbortCause::ImageNotFound(block.filename.clone()),
            ));
        }
        let track = tracks
            .entry(block.filename.clone())
            .or_insert_with(|| Track::new(&work.images[&block.filename]));

        if block.remove_image {
            work.images.remove(&block.filename);
            continue;
        }

        for ins in &block.instructions {
            let vrs = work.images.get(&block.filename).expect("checked above");
            match &ins.action {
                Action::Change {
                    index,
                    expected,
                    edit,
                } => {
                    check_expected(&work, vrs, *index, expected).map_err(|c| abort(ins.line, c))?;
                    let updated =
                        apply_edit(&work, vrs[*index], edit).map_err(|c| abort(ins.line, c))?;
                    work.images.get_mut(&block.filename).unwrap()[*index] = updated;
                }
                Action::Remove { index, expected } => {
                    check_expected(&work, vrs, *index, expected).map_err(|c| abort(ins.line, c))?;
                    work.images.get_mut(&block.filename).unwrap().remove(*index);
                    track.origins.remove(*index);
                }
                Action::Add(new) => {
                    let vr = resolve_new(&work, new).map_err(|c| abort(ins.line, c))?;
                    work.images.get_mut(&block.filename).unwrap().push(vr);
                    track.origins.push(Origin::Added);
                }
            }
        }
    }

    let mut report = ApplyReport {
        images_touched: touched.len(),
        ..ApplyReport::default()
    };
    for (filename, track) in &tracks {
        let Some(vrs) = work.images.get(filename) else {
            report.images_removed += 1;
            continue;
        };
        let mut survivors = 0;
        for (vr, origin) in vrs.iter().zip(&track.origins) {
            match origin {
                Origin::Original(k) => {
                    survivors += 1;
                    if track.original[*k] != *vr {
                        report.vrs_changed += 1;
                    }
                }
                Origin::Added => report.vrs_added += 1,
            }
        }
        report.vrs_removed += track.original.len() - survivors;
    }
    Ok((work, report))
}

fn check_expected(
    corpus: &AnnotationCorpus,
    vrs: &[VisualRelationship],
    index: usize,
    expected: &NamedVrType,
) -> Result<(), AbortCause> {
    let vr = vrs.get(index).ok_or(AbortCause::IndexOutOfRange {
        index,
        len: vrs.len(),
    })?;
    let found = corpus.named_type(vr);
    if &found != expected {
        return Err(AbortCause::TupleMismatch {
            expected: Box::new(expected.clone()),
            found: Box::new(found),
        });
    }
    Ok(())
}

fn apply_edit(
    corpus: &AnnotationCorpus,
    mut vr: VisualRelationship,
    edit: &Edit,
) -> Result<VisualRelationship, AbortCause> {
    match edit {
        Edit::SubjectClass(name) => vr.subject.class_id = live(&corpus.object_classes, name)?,
        Edit::ObjectClass(name) => vr.object.class_id = live(&corpus.object_classes, name)?,
        Edit::Predicate(name) => vr.predicate_id = live(&corpus.predicates, name)?,
        Edit::SubjectBbox(b) => vr.subject.bbox = *b,
        Edit::ObjectBbox(b) => vr.object.bbox = *b,
    }
    Ok(vr)
}

fn resolve_new(
    corpus: &AnnotationCorpus,
    new: &NewRelationship,
) -> Result<VisualRelationship, AbortCause> {
    Ok(VisualRelationship::new(
        AnnotatedObject::new(
            live(&corpus.object_classes, &new.subject_class)?,
            new.subject_bbox,
        ),
        live(&corpus.predicates, &new.predicate)?,
        AnnotatedObject::new(
            live(&corpus.object_classes, &new.object_class)?,
            new.object_bbox,
        ),
    ))
}
