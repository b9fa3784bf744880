use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;

use super::AnalyzeError;
use crate::model::{find_exact_duplicates, AnnotatedObject, AnnotationCorpus, BoundingBox};

pub const DEFAULT_NEAR_DUP_IOU: f64 = 0.9;

/// Intersection over union with half-open pixel intervals.
pub fn iou(a: &BoundingBox, b: &BoundingBox) -> Result<f64, AnalyzeError> {
    for bb in [a, b] {
        if !bb.is_well_formed() {
            return Err(AnalyzeError::DegenerateInput(*bb));
        }
    }
    let h = (a.ymax.min(b.ymax) - a.ymin.max(b.ymin)).max(0);
    let w = (a.xmax.min(b.xmax) - a.xmin.max(b.xmin)).max(0);
    let inter = h * w;
    let union = a.area() + b.area() - inter;
    Ok(inter as f64 / union as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum LintRule {
    #[serde(rename = "ExactDuplicateVR")]
    ExactDuplicateVr,
    NearDuplicateBbox,
    DegenerateBbox,
    MultiClassBbox,
    EmptyImageEntry,
}

impl LintRule {
    pub fn name(self) -> &'static str {
        match self {
            LintRule::ExactDuplicateVr => "ExactDuplicateVR",
            LintRule::NearDuplicateBbox => "NearDuplicateBbox",
            LintRule::DegenerateBbox => "DegenerateBbox",
            LintRule::MultiClassBbox => "MultiClassBbox",
            LintRule::EmptyImageEntry => "EmptyImageEntry",
        }
    }

    pub fn severity(self) -> Severity {
        match self {
            LintRule::ExactDuplicateVr | LintRule::DegenerateBbox | LintRule::MultiClassBbox => {
                Severity::Error
            }
            LintRule::NearDuplicateBbox | LintRule::EmptyImageEntry => Severity::Warning,
        }
    }
}

impl fmt::Display for LintRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Warning,
    Error,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FindingDetail {
    /// Relationship indices `first < second` holding identical values.
    DuplicatePair {
        first: usize,
        second: usize,
    },
    /// Two objects of the same class with different but heavily overlapping boxes.
    NearDuplicate {
        class_id: usize,
        a: BoundingBox,
        b: BoundingBox,
    },
    Degenerate {
        bbox: BoundingBox,
    },
    /// One box labelled with several classes; `class_ids` ascending.
    MultiClass {
        bbox: BoundingBox,
        class_ids: Vec<usize>,
    },
    Empty,
}

impl fmt::Display for FindingDetail {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FindingDetail::DuplicatePair { first, second } => write!(f, "vrs={first},{second}"),
            FindingDetail::NearDuplicate { class_id, a, b } => {
                let r = iou(a, b).unwrap_or(0.0);
                write!(f, "class={class_id} a={a} b={b} iou={r:.4}")
            }
            FindingDetail::Degenerate { bbox } => write!(f, "bbox={bbox}"),
            FindingDetail::MultiClass { bbox, class_ids } => {
                let ids: Vec<String> = class_ids.iter().map(usize::to_string).collect();
                write!(f, "bbox={bbox} classes={}", ids.join(","))
            }
            FindingDetail::Empty => f.write_str("-"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct LintFinding {
    pub image: String,
    pub rule: LintRule,
    pub detail: FindingDetail,
    pub severity: Severity,
}

impl fmt::Display for LintFinding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}\t{}\t{}", self.image, self.rule, self.detail)
    }
}

/// Runs every lint rule; findings are sorted by image, rule, then detail.
pub fn lint(
    corpus: &AnnotationCorpus,
    near_dup_iou: f64,
) -> Result<Vec<LintFinding>, AnalyzeError> {
    if !(near_dup_iou > 0.0 && near_dup_iou <= 1.0) {
        return Err(AnalyzeError::InvalidThreshold(near_dup_iou));
    }
    let mut findings = Vec::new();
    for (image, vrs) in &corpus.images {
        let mut push = |rule: LintRule, detail| {
            findings.push(LintFinding {
                image: image.clone(),
                rule,
                detail,
                severity: rule.severity(),
            })
        };

        if vrs.is_empty() {
            push(LintRule::EmptyImageEntry, FindingDetail::Empty);
            continue;
        }

        for (first, second) in find_exact_duplicates(vrs) {
            push(
                LintRule::ExactDuplicateVr,
                FindingDetail::DuplicatePair { first, second },
            );
        }

        let objects: BTreeSet<AnnotatedObject> =
            vrs.iter().flat_map(|vr| [vr.subject, vr.object]).collect();
        let objects: Vec<AnnotatedObject> = objects.into_iter().collect();

        let mut classes_by_box: BTreeMap<BoundingBox, BTreeSet<usize>> = BTreeMap::new();
        for o in &objects {
            classes_by_box.entry(o.bbox).or_default().insert(o.class_id);
        }
        for (bbox, ids) in &classes_by_box {
            if !bbox.is_well_formed() {
                push(
                    LintRule::DegenerateBbox,
                    FindingDetail::Degenerate { bbox: *bbox },
                );
            }
            if ids.len() > 1 {
                push(
                    LintRule::MultiClassBbox,
                    FindingDetail::MultiClass {
                        bbox: *bbox,
                        class_ids: ids.iter().copied().collect(),
                    },
                );
            }
        }

        // `objects` is sorted by (class, bbox), so same-class runs are contiguous.
        for (i, a) in objects.iter().enumerate() {
            for b in objects[i + 1..]
                .iter()
                .take_while(|b| b.class_id == a.class_id)
            {
                if let Ok(r) = iou(&a.bbox, &b.bbox) {
                    if r >= near_dup_iou {
                        push(
                            LintRule::NearDuplicateBbox,
                            FindingDetail::NearDuplicate {
                                class_id: a.class_id,
                                a: a.bbox,
                                b: b.bbox,
                            },
                        );
                    }
                }
            }
        }
    }
    findings.sort();
    Ok(findings)
}
