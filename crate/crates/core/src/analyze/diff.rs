use std::fmt;

use serde::Serialize;

use crate::model::{AnnotationCorpus, VisualRelationship};

/// Per-image relationship changes between two corpora.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ImageDiff {
    pub image: String,
    pub added: usize,
    pub removed: usize,
    pub changed: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct CorpusDiff {
    pub images_added: Vec<String>,
    pub images_removed: Vec<String>,
    /// Images present on both sides whose lists differ.
    pub images_changed: Vec<ImageDiff>,
}

impl CorpusDiff {
    pub fn is_empty(&self) -> bool {
        self.images_added.is_empty()
            && self.images_removed.is_empty()
            && self.images_changed.is_empty()
    }
}

impl fmt::Display for CorpusDiff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for image in &self.images_removed {
            writeln!(f, "-\t{image}")?;
        }
        for image in &self.images_added {
            writeln!(f, "+\t{image}")?;
        }
        for d in &self.images_changed {
            writeln!(
                f,
                "~\t{}\tadded={}\tremoved={}\tchanged={}",
                d.image, d.added, d.removed, d.changed
            )?;
        }
        Ok(())
    }
}

/// Aligns two relationship lists on their longest common subsequence.
///
/// Unmatched entries between two consecutive anchors are paired up
/// positionally as changes; the surplus on either side counts as added or
/// removed.
fn diff_lists(a: &[VisualRelationship], b: &[VisualRelationship]) -> (usize, usize, usize) {
    let (n, m) = (a.len(), b.len());
    let mut lcs = vec![vec![0usize; m + 1]; n + 1];
    for i in (0..n).rev() {
        for j in (0..m).rev() {
            lcs[i][j] = if a[i] == b[j] {
                lcs[i + 1][j + 1] + 1
            } else {
                lcs[i + 1][j].max(lcs[i][j + 1])
            };
        }
    }

    let (mut added, mut removed, mut changed) = (0, 0, 0);
    let (mut gap_a, mut gap_b) = (0usize, 0usize);
    let mut flush = |ga: &mut usize, gb: &mut usize| {
        let paired = (*ga).min(*gb);
        changed += paired;
        removed += *ga - paired;
        added += *gb - paired;
        *ga = 0;
        *gb = 0;
    };
    let (mut i, mut j) = (0, 0);
    while i < n && j < m {
        if a[i] == b[j] {
            flush(&mut gap_a, &mut gap_b);
            i += 1;
            j += 1;
        } else if lcs[i + 1][j] >= lcs[i][j + 1] {
            gap_a += 1;
            i += 1;
        } else {
            gap_b += 1;
            j += 1;
        }
    }
    gap_a += n - i;
    gap_b += m - j;
    flush(&mut gap_a, &mut gap_b);
    (added, removed, changed)
}

pub fn diff_corpora(a: &AnnotationCorpus, b: &AnnotationCorpus) -> CorpusDiff {
    let mut diff = CorpusDiff::default();
    for (image, vrs_a) in &a.images {
        match b.images.get(image) {
            None => diff.images_removed.push(image.clone()),
            Some(vrs_b) if vrs_a != vrs_b => {
                let (added, removed, changed) = diff_lists(vrs_a, vrs_b);
                diff.images_changed.push(ImageDiff {
                    image: image.clone(),
                    added,
                    removed,
                    changed,
                });
            }
            Some(_) => {}
        }
    }
    diff.images_added = b
        .images
        .keys()
        .filter(|k| !a.images.contains_key(*k))
        .cloned()
        .collect();
    diff
}
