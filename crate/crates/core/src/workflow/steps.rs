//! Global corpus transformations used as workflow steps.
//!
//! Each function validates its arguments before touching the corpus, so an
//! `Err` always leaves the corpus as it was.

use std::collections::{BTreeSet, HashSet};

use super::StepError;
use crate::model::{AnnotationCorpus, MasterList, NamedVrType, VrType};
use crate::protocol::ApplyReport;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Deserialize, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ListTarget {
    Classes,
    Predicates,
}

fn live(list: &MasterList, name: &str) -> Result<usize, StepError> {
    list.live_id(name)
        .ok_or_else(|| StepError::UnknownName(name.to_string()))
}

fn resolve(corpus: &AnnotationCorpus, t: &NamedVrType) -> Result<VrType, StepError> {
    Ok(VrType {
        subj_class_id: live(&corpus.object_classes, &t.subject)?,
        predicate_id: live(&corpus.predicates, &t.predicate)?,
        obj_class_id: live(&corpus.object_classes, &t.object)?,
    })
}

/// Renames and/or appends master-list names. Renamed entries keep their ids.
pub fn update_master_lists(
    corpus: &mut AnnotationCorpus,
    target: ListTarget,
    renames: &[(String, String)],
    additions: &[String],
) -> Result<ApplyReport, StepError> {
    let list = match target {
        ListTarget::Classes => &corpus.object_classes,
        ListTarget::Predicates => &corpus.predicates,
    };
    // Dry run on a copy so a late collision cannot leave half-applied renames.
    let mut updated = list.clone();
    for (old, new) in renames {
        if updated.live_id(old).is_none() {
            return Err(StepError::UnknownName(old.clone()));
        }
        updated
            .rename(old, new)
            .map_err(|_| StepError::NameCollision(new.clone()))?;
    }
    for name in additions {
        updated
            .push(name.clone())
            .map_err(|_| StepError::NameCollision(name.clone()))?;
    }
    match target {
        ListTarget::Classes => corpus.object_classes = updated,
        ListTarget::Predicates => corpus.predicates = updated,
    }
    Ok(ApplyReport::default())
}

/// Rewrites every occurrence of class `from` to `to` within the listed images only.
pub fn change_class_for_image_set(
    corpus: &mut AnnotationCorpus,
    images: &[String],
    from: &str,
    to: &str,
) -> Result<ApplyReport, StepError> {
    let from_id = live(&corpus.object_classes, from)?;
    let to_id = live(&corpus.object_classes, to)?;
    if let Some(missing) = images.iter().find(|i| !corpus.images.contains_key(*i)) {
        return Err(StepError::ImageNotFound(missing.clone()));
    }
    let mut report = ApplyReport::default();
    let unique: BTreeSet<&String> = images.iter().collect();
    for image in unique {
        let mut touched = false;
        for vr in corpus.images.get_mut(image).expect("checked above") {
            let mut changed = false;
            for obj in [&mut vr.subject, &mut vr.object] {
                if obj.class_id == from_id && from_id != to_id {
                    obj.class_id = to_id;
                    changed = true;
                }
            }
            if changed {
                report.vrs_changed += 1;
                touched = true;
            }
        }
        report.images_touched += usize::from(touched);
    }
    Ok(report)
}

fn rewrite_all(
    corpus: &mut AnnotationCorpus,
    mut f: impl FnMut(&mut crate::model::VisualRelationship) -> bool,
) -> ApplyReport {
    let mut report = ApplyReport::default();
    for vrs in corpus.images.values_mut() {
        let mut touched = false;
        for vr in vrs.iter_mut() {
            if f(vr) {
                report.vrs_changed += 1;
                touched = true;
            }
        }
        report.images_touched += usize::from(touched);
    }
    report
}

/// Folds class `from` into `to` everywhere and retires `from`.
pub fn merge_object_class(
    corpus: &mut AnnotationCorpus,
    from: &str,
    to: &str,
) -> Result<ApplyReport, StepError> {
    if from == to {
        return Err(StepError::SelfMerge(from.to_string()));
    }
    let from_id = live(&corpus.object_classes, from)?;
    let to_id = live(&corpus.object_classes, to)?;
    let report = rewrite_all(corpus, |vr| {
        let mut changed = false;
        for obj in [&mut vr.subject, &mut vr.object] {
            if obj.class_id == from_id {
                obj.class_id = to_id;
                changed = true;
            }
        }
        changed
    });
    corpus.object_classes.retire(from_id);
    Ok(report)
}

/// Folds predicate `from` into `to` everywhere and retires `from`.
pub fn merge_predicate(
    corpus: &mut AnnotationCorpus,
    from: &str,
    to: &str,
) -> Result<ApplyReport, StepError> {
    if from == to {
        return Err(StepError::SelfMerge(from.to_string()));
    }
    let from_id = live(&corpus.predicates, from)?;
    let to_id = live(&corpus.predicates, to)?;
    let report = rewrite_all(corpus, |vr| {
        if vr.predicate_id == from_id {
            vr.predicate_id = to_id;
            true
        } else {
            false
        }
    });
    corpus.predicates.retire(from_id);
    Ok(report)
}

/// Deletes every relationship whose type is listed, in every image.
pub fn remove_vr_types_global(
    corpus: &mut AnnotationCorpus,
    types: &[NamedVrType],
) -> Result<ApplyReport, StepError> {
    let ids: HashSet<VrType> = types
        .iter()
        .map(|t| resolve(corpus, t))
        .collect::<Result<_, _>>()?;
    let mut report = ApplyReport::default();
    for vrs in corpus.images.values_mut() {
        let before = vrs.len();
        vrs.retain(|vr| !ids.contains(&vr.vr_type()));
        let removed = before - vrs.len();
        report.vrs_removed += removed;
        report.images_touched += usize::from(removed > 0);
    }
    Ok(report)
}

pub fn remove_empty_images(corpus: &mut AnnotationCorpus) -> ApplyReport {
    let before = corpus.images.len();
    corpus.images.retain(|_, vrs| !vrs.is_empty());
    let removed = before - corpus.images.len();
    ApplyReport {
        images_touched: removed,
        images_removed: removed,
        ..ApplyReport::default()
    }
}

/// Rewrites relationships of type `from` to type `to`, keeping both boxes.
///
/// A rewrite that exchanges the subject and object classes would need the
/// boxes swapped as well and is rejected.
pub fn change_vr_type_global(
    corpus: &mut AnnotationCorpus,
    from: &NamedVrType,
    to: &NamedVrType,
) -> Result<ApplyReport, StepError> {
    let from_ids = resolve(corpus, from)?;
    let to_ids = resolve(corpus, to)?;
    let swaps =
        from.subject != from.object && to.subject == from.object && to.object == from.subject;
    if swaps {
        return Err(StepError::UnsupportedRewrite {
            from: Box::new(from.clone()),
            to: Box::new(to.clone()),
        });
    }
    Ok(rewrite_all(corpus, |vr| {
        if vr.vr_type() != from_ids {
            return false;
        }
        vr.subject.class_id = to_ids.subj_class_id;
        vr.predicate_id = to_ids.predicate_id;
        vr.object.class_id = to_ids.obj_class_id;
        from_ids != to_ids
    }))
}

/// Keeps the first occurrence of each relationship within an image.
pub fn dedup_vrs(corpus: &mut AnnotationCorpus) -> ApplyReport {
    let mut report = ApplyReport::default();
    for vrs in corpus.images.values_mut() {
        let mut seen = HashSet::with_capacity(vrs.len());
        let before = vrs.len();
        vrs.retain(|vr| seen.insert(*vr));
        let removed = before - vrs.len();
        report.vrs_removed += removed;
        report.images_touched += usize::from(removed > 0);
    }
    report
}
