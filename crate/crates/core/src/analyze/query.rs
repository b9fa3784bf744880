use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use super::AnalyzeError;
use crate::model::{AnnotationCorpus, MasterList};

/// `(s, p, o)` with any position optionally left open.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct VrPattern {
    pub subject: Option<String>,
    pub predicate: Option<String>,
    pub object: Option<String>,
}

impl VrPattern {
    pub fn new(subject: Option<&str>, predicate: Option<&str>, object: Option<&str>) -> Self {
        Self {
            subject: subject.map(str::to_string),
            predicate: predicate.map(str::to_string),
            object: object.map(str::to_string),
        }
    }
}

/// Parses `(person, wear, *)`; parentheses are optional and `*`, `?` or `X` mark a wildcard.
impl FromStr for VrPattern {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let inner = s
            .strip_prefix('(')
            .and_then(|s| s.strip_suffix(')'))
            .unwrap_or(s);
        let parts: Vec<&str> = inner.split(',').map(str::trim).collect();
        if parts.len() != 3 || parts.iter().any(|p| p.is_empty()) {
            return Err(format!(
                "pattern needs three comma-separated positions: {s:?}"
            ));
        }
        let pos = |p: &str| match p {
            "*" | "?" | "X" => None,
            name => Some(name.to_string()),
        };
        Ok(Self {
            subject: pos(parts[0]),
            predicate: pos(parts[1]),
            object: pos(parts[2]),
        })
    }
}

impl fmt::Display for VrPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = |o: &Option<String>| o.clone().unwrap_or_else(|| "*".into());
        write!(
            f,
            "({}, {}, {})",
            p(&self.subject),
            p(&self.predicate),
            p(&self.object)
        )
    }
}

/// Matching images plus the distinct names seen at each wildcard position.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct QueryResult {
    pub images: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub subjects: Option<BTreeSet<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub predicates: Option<BTreeSet<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub objects: Option<BTreeSet<String>>,
}

fn resolve(list: &MasterList, name: &Option<String>) -> Result<Option<usize>, AnalyzeError> {
    name.as_deref()
        .map(|n| {
            list.id(n)
                .ok_or_else(|| AnalyzeError::UnknownName(n.to_string()))
        })
        .transpose()
}

pub fn query_images(
    corpus: &AnnotationCorpus,
    pattern: &VrPattern,
) -> Result<QueryResult, AnalyzeError> {
    let subj = resolve(&corpus.object_classes, &pattern.subject)?;
    let pred = resolve(&corpus.predicates, &pattern.predicate)?;
    let obj = resolve(&corpus.object_classes, &pattern.object)?;

    let open = |o: Option<usize>| o.is_none().then(BTreeSet::new);
    let mut result = QueryResult {
        images: Vec::new(),
        subjects: open(subj),
        predicates: open(pred),
        objects: open(obj),
    };

    for (image, vrs) in &corpus.images {
        let mut hit = false;
        for vr in vrs {
            let ok = subj.is_none_or(|s| s == vr.subject.class_id)
                && pred.is_none_or(|p| p == vr.predicate_id)
                && obj.is_none_or(|o| o == vr.object.class_id);
            if !ok {
                continue;
            }
            hit = true;
            if let Some(set) = result.subjects.as_mut() {
                set.insert(corpus.class_name(vr.subject.class_id).to_string());
            }
            if let Some(set) = result.predicates.as_mut() {
                set.insert(corpus.predicate_name(vr.predicate_id).to_string());
            }
            if let Some(set) = result.objects.as_mut() {
                set.insert(corpus.class_name(vr.object.class_id).to_string());
            }
        }
        if hit {
            result.images.push(image.clone());
        }
    }
    Ok(result)
}

/// Inclusive bounds on the number of relationships in an image.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VrCountFilter {
    pub min: usize,
    pub max: Option<usize>,
}

impl VrCountFilter {
    pub fn exactly(n: usize) -> Self {
        Self {
            min: n,
            max: Some(n),
        }
    }

    pub fn at_least(n: usize) -> Self {
        Self { min: n, max: None }
    }

    pub fn between(min: usize, max: usize) -> Self {
        Self {
            min,
            max: Some(max),
        }
    }

    pub fn contains(&self, n: usize) -> bool {
        n >= self.min && self.max.is_none_or(|m| n <= m)
    }
}

/// Parses `3`, `2..5` (inclusive) or `1..` (open-ended).
impl FromStr for VrCountFilter {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let num = |t: &str| {
            t.trim()
                .parse::<usize>()
                .map_err(|_| format!("invalid count {t:?}"))
        };
        match s.split_once("..") {
            None => Ok(Self::exactly(num(s)?)),
            Some((a, "")) => Ok(Self::at_least(num(a)?)),
            Some((a, b)) => Ok(Self::between(num(a)?, num(b.trim_start_matches('='))?)),
        }
    }
}

pub fn images_with_vr_count(corpus: &AnnotationCorpus, filter: VrCountFilter) -> Vec<String> {
    corpus
        .images
        .iter()
        .filter(|(_, vrs)| filter.contains(vrs.len()))
        .map(|(k, _)| k.clone())
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    VrsPerImage,
    DistinctClassesPerImage,
    DistinctPredicatesPerImage,
}

impl Metric {
    pub fn name(self) -> &'static str {
        match self {
            Metric::VrsPerImage => "vrs_per_image",
            Metric::DistinctClassesPerImage => "distinct_classes_per_image",
            Metric::DistinctPredicatesPerImage => "distinct_predicates_per_image",
        }
    }
}

impl FromStr for Metric {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        [
            Metric::VrsPerImage,
            Metric::DistinctClassesPerImage,
            Metric::DistinctPredicatesPerImage,
        ]
        .into_iter()
        .find(|m| m.name() == s)
        .ok_or_else(|| format!("unknown metric {s:?}"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Histogram {
    pub metric: Metric,
    /// `(bucket value, number of images)`, ascending by bucket.
    pub buckets: Vec<(usize, usize)>,
}

impl Histogram {
    pub fn population(&self) -> usize {
        self.buckets.iter().map(|(_, c)| c).sum()
    }
}

pub fn distribution(corpus: &AnnotationCorpus, metric: Metric) -> Histogram {
    let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
    for vrs in corpus.images.values() {
        let value = match metric {
            Metric::VrsPerImage => vrs.len(),
            Metric::DistinctClassesPerImage => vrs
                .iter()
                .flat_map(|vr| [vr.subject.class_id, vr.object.class_id])
                .collect::<BTreeSet<_>>()
                .len(),
            Metric::DistinctPredicatesPerImage => vrs
                .iter()
                .map(|vr| vr.predicate_id)
                .collect::<BTreeSet<_>>()
                .len(),
        };
        *counts.entry(value).or_default() += 1;
    }
    Histogram {
        metric,
        buckets: counts.into_iter().collect(),
    }
}
