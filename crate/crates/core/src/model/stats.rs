use std::fmt;

use serde::Serialize;

use super::corpus::{find_exact_duplicates, AnnotationCorpus};

/// Corpus-level summary counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CorpusStats {
    pub object_class_count: usize,
    pub predicate_count: usize,
    pub vr_count: usize,
    pub image_count: usize,
    pub images_with_exact_duplicate_vrs: usize,
}

impl CorpusStats {
    /// Exact mean; zero for an empty corpus.
    pub fn mean_vrs_per_image(&self) -> f64 {
        if self.image_count == 0 {
            0.0
        } else {
            self.vr_count as f64 / self.image_count as f64
        }
    }

    /// Mean in hundredths, rounded half-up using integer arithmetic.
    pub fn mean_hundredths(&self) -> u64 {
        if self.image_count == 0 {
            return 0;
        }
        let num = self.vr_count as u64 * 200 + self.image_count as u64;
        num / (2 * self.image_count as u64)
    }

    /// The mean formatted to two decimals, e.g. `7.80`.
    pub fn mean_display(&self) -> String {
        let h = self.mean_hundredths();
        format!("{}.{:02}", h / 100, h % 100)
    }
}

impl fmt::Display for CorpusStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "object classes\t{}", self.object_class_count)?;
        writeln!(f, "predicates\t{}", self.predicate_count)?;
        writeln!(f, "images\t{}", self.image_count)?;
        writeln!(f, "visual relationships\t{}", self.vr_count)?;
        writeln!(f, "mean relationships per image\t{}", self.mean_display())?;
        writeln!(
            f,
            "images with duplicate relationships\t{}",
            self.images_with_exact_duplicate_vrs
        )
    }
}

pub fn compute_stats(corpus: &AnnotationCorpus) -> CorpusStats {
    CorpusStats {
        object_class_count: corpus.object_classes.live_len(),
        predicate_count: corpus.predicates.live_len(),
        vr_count: corpus.vr_count(),
        image_count: corpus.image_count(),
        images_with_exact_duplicate_vrs: corpus
            .images
            .values()
            .filter(|vrs| !find_exact_duplicates(vrs).is_empty())
            .count(),
    }
}
