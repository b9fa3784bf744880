use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::bbox::BoundingBox;
use super::error::CorpusError;

/// An object as it appears in one side of a visual relationship.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct AnnotatedObject {
    #[serde(rename = "category")]
    pub class_id: usize,
    pub bbox: BoundingBox,
}

impl AnnotatedObject {
    pub const fn new(class_id: usize, bbox: BoundingBox) -> Self {
        Self { class_id, bbox }
    }
}

/// One `(subject, predicate, object)` annotation.
///
/// Field order on disk is `predicate`, `subject`, `object`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct VisualRelationship {
    #[serde(rename = "predicate")]
    pub predicate_id: usize,
    pub subject: AnnotatedObject,
    pub object: AnnotatedObject,
}

impl VisualRelationship {
    pub const fn new(
        subject: AnnotatedObject,
        predicate_id: usize,
        object: AnnotatedObject,
    ) -> Self {
        Self {
            predicate_id,
            subject,
            object,
        }
    }

    pub fn vr_type(&self) -> VrType {
        VrType {
            subj_class_id: self.subject.class_id,
            predicate_id: self.predicate_id,
            obj_class_id: self.object.class_id,
        }
    }
}

/// A relationship type: the id triple with bounding boxes abstracted away.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VrType {
    pub subj_class_id: usize,
    pub predicate_id: usize,
    pub obj_class_id: usize,
}

/// A relationship type spelled with master-list names, e.g. `(person, wear, jacket)`.
///
/// Serialized as a three-element array.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "(String, String, String)", into = "(String, String, String)")]
pub struct NamedVrType {
    pub subject: String,
    pub predicate: String,
    pub object: String,
}

impl NamedVrType {
    pub fn new(
        subject: impl Into<String>,
        predicate: impl Into<String>,
        object: impl Into<String>,
    ) -> Self {
        Self {
            subject: subject.into(),
            predicate: predicate.into(),
            object: object.into(),
        }
    }
}

impl From<(String, String, String)> for NamedVrType {
    fn from((s, p, o): (String, String, String)) -> Self {
        Self::new(s, p, o)
    }
}

impl From<NamedVrType> for (String, String, String) {
    fn from(t: NamedVrType) -> Self {
        (t.subject, t.predicate, t.object)
    }
}

impl fmt::Display for NamedVrType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.subject, self.predicate, self.object)
    }
}

/// Ordered list of unique names where the position is the id.
///
/// Names can be retired (tombstoned) after a merge. A retired name keeps its
/// id so that nothing is renumbered mid-run, but it no longer resolves as a
/// live name.
#[derive(Debug, Clone, Default)]
pub struct MasterList {
    names: Vec<String>,
    retired: BTreeSet<usize>,
    index: HashMap<String, usize>,
}

impl PartialEq for MasterList {
    fn eq(&self, other: &Self) -> bool {
        self.names == other.names && self.retired == other.retired
    }
}

impl Eq for MasterList {}

impl MasterList {
    pub fn new<I, S>(names: I) -> Result<Self, CorpusError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut list = Self::default();
        for name in names {
            list.push(name.into())?;
        }
        Ok(list)
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    /// Number of names that have not been retired.
    pub fn live_len(&self) -> usize {
        self.names.len() - self.retired.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, id: usize) -> Option<&str> {
        self.names.get(id).map(String::as_str)
    }

    /// Id of `name`, retired or not.
    pub fn id(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    /// Id of `name` only if it is still live.
    pub fn live_id(&self, name: &str) -> Option<usize> {
        self.id(name).filter(|id| !self.retired.contains(id))
    }

    pub fn is_retired(&self, id: usize) -> bool {
        self.retired.contains(&id)
    }

    pub fn retired(&self) -> impl Iterator<Item = usize> + '_ {
        self.retired.iter().copied()
    }

    pub fn push(&mut self, name: String) -> Result<usize, CorpusError> {
        if self.index.contains_key(&name) {
            return Err(CorpusError::DuplicateMasterName(name));
        }
        let id = self.names.len();
        self.index.insert(name.clone(), id);
        self.names.push(name);
        Ok(id)
    }

    /// Renames a live entry in place. The id is unchanged.
    pub fn rename(&mut self, old: &str, new: &str) -> Result<usize, CorpusError> {
        let id = self
            .live_id(old)
            .ok_or_else(|| CorpusError::UnknownName(old.to_string()))?;
        if old == new {
            return Ok(id);
        }
        if self.index.contains_key(new) {
            return Err(CorpusError::DuplicateMasterName(new.to_string()));
        }
        self.index.remove(old);
        self.index.insert(new.to_string(), id);
        self.names[id] = new.to_string();
        Ok(id)
    }

    pub fn retire(&mut self, id: usize) {
        if id < self.names.len() {
            self.retired.insert(id);
        }
    }
}

/// All annotations of a dataset split plus the two master lists.
///
/// Image keys are held in a sorted map; the relationship list of each image
/// keeps its annotated order, which protocol indices refer to.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct AnnotationCorpus {
    pub images: BTreeMap<String, Vec<VisualRelationship>>,
    pub object_classes: MasterList,
    pub predicates: MasterList,
}

impl AnnotationCorpus {
    pub fn new(object_classes: MasterList, predicates: MasterList) -> Self {
        Self {
            images: BTreeMap::new(),
            object_classes,
            predicates,
        }
    }

    pub fn vr_count(&self) -> usize {
        self.images.values().map(Vec::len).sum()
    }

    pub fn image_count(&self) -> usize {
        self.images.len()
    }

    pub fn class_name(&self, id: usize) -> &str {
        self.object_classes.name(id).unwrap_or("<invalid class>")
    }

    pub fn predicate_name(&self, id: usize) -> &str {
        self.predicates.name(id).unwrap_or("<invalid predicate>")
    }

    pub fn named_type(&self, vr: &VisualRelationship) -> NamedVrType {
        NamedVrType::new(
            self.class_name(vr.subject.class_id),
            self.predicate_name(vr.predicate_id),
            self.class_name(vr.object.class_id),
        )
    }

    /// Resolves a named type to ids, accepting only live names.
    pub fn resolve_type(&self, t: &NamedVrType) -> Result<VrType, CorpusError> {
        let class = |n: &str| {
            self.object_classes
                .live_id(n)
                .ok_or_else(|| CorpusError::UnknownName(n.to_string()))
        };
        Ok(VrType {
            subj_class_id: class(&t.subject)?,
            predicate_id: self
                .predicates
                .live_id(&t.predicate)
                .ok_or_else(|| CorpusError::UnknownName(t.predicate.clone()))?,
            obj_class_id: class(&t.object)?,
        })
    }

    /// Checks every class and predicate id against the master lists.
    pub fn validate(&self) -> Result<(), CorpusError> {
        let classes = self.object_classes.len();
        let predicates = self.predicates.len();
        for (image, vrs) in &self.images {
            for (vr_index, vr) in vrs.iter().enumerate() {
                let bad = if vr.subject.class_id >= classes {
                    Some("subject.category")
                } else if vr.predicate_id >= predicates {
                    Some("predicate")
                } else if vr.object.class_id >= classes {
                    Some("object.category")
                } else {
                    None
                };
                if let Some(field) = bad {
                    return Err(CorpusError::IdOutOfRange {
                        image: image.clone(),
                        vr_index,
                        field,
                    });
                }
            }
        }
        Ok(())
    }

    /// Drops retired master-list entries and renumbers ids densely.
    ///
    /// Returns the `(old id -> new id)` maps for classes and predicates.
    /// Callers must ensure no relationship still references a retired id.
    pub fn compact(&mut self) -> Result<CompactionMap, CorpusError> {
        fn remap(list: &MasterList) -> Result<(MasterList, BTreeMap<usize, usize>), CorpusError> {
            let mut fresh = MasterList::default();
            let mut map = BTreeMap::new();
            for (old, name) in list.names().iter().enumerate() {
                if !list.is_retired(old) {
                    map.insert(old, fresh.push(name.clone())?);
                }
            }
            Ok((fresh, map))
        }
        let (classes, class_map) = remap(&self.object_classes)?;
        let (predicates, predicate_map) = remap(&self.predicates)?;
        for (image, vrs) in self.images.iter_mut() {
            for (vr_index, vr) in vrs.iter_mut().enumerate() {
                let lookup = |map: &BTreeMap<usize, usize>, id: usize, field: &'static str| {
                    map.get(&id)
                        .copied()
                        .ok_or_else(|| CorpusError::IdOutOfRange {
                            image: image.clone(),
                            vr_index,
                            field,
                        })
                };
                vr.subject.class_id = lookup(&class_map, vr.subject.class_id, "subject.category")?;
                vr.predicate_id = lookup(&predicate_map, vr.predicate_id, "predicate")?;
                vr.object.class_id = lookup(&class_map, vr.object.class_id, "object.category")?;
            }
        }
        self.object_classes = classes;
        self.predicates = predicates;
        Ok(CompactionMap {
            object_classes: class_map,
            predicates: predicate_map,
        })
    }
}

/// Old-to-new id mapping produced by [`AnnotationCorpus::compact`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CompactionMap {
    pub object_classes: BTreeMap<usize, usize>,
    pub predicates: BTreeMap<usize, usize>,
}

/// All `(i, j)` with `i < j` where `vrs[i] == vrs[j]`, in lexicographic order.
pub fn find_exact_duplicates(vrs: &[VisualRelationship]) -> Vec<(usize, usize)> {
    let mut groups: HashMap<&VisualRelationship, Vec<usize>> = HashMap::new();
    for (i, vr) in vrs.iter().enumerate() {
        groups.entry(vr).or_default().push(i);
    }
    let mut pairs: Vec<(usize, usize)> = groups
        .values()
        .filter(|idx| idx.len() > 1)
        .flat_map(|idx| {
            idx.iter()
                .enumerate()
                .flat_map(move |(k, &i)| idx[k + 1..].iter().map(move |&j| (i, j)))
        })
        .collect();
    pairs.sort_unstable();
    pairs
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vr(s: usize, p: usize, o: usize) -> VisualRelationship {
        VisualRelationship::new(
            AnnotatedObject::new(s, BoundingBox::new(0, 10, 0, 10)),
            p,
            AnnotatedObject::new(o, BoundingBox::new(5, 20, 5, 20)),
        )
    }

    #[test]
    fn duplicates_empty_and_simple() {
        assert!(find_exact_duplicates(&[]).is_empty());
        let a = vr(0, 0, 1);
        let b = vr(1, 0, 0);
        assert_eq!(find_exact_duplicates(&[a, b, a]), vec![(0, 2)]);
        assert_eq!(
            find_exact_duplicates(&[a, a, a]),
            vec![(0, 1), (0, 2), (1, 2)]
        );
    }

    #[test]
    fn master_list_rejects_duplicates() {
        let err = MasterList::new(["a", "b", "a"]).unwrap_err();
        assert!(matches!(err, CorpusError::DuplicateMasterName(n) if n == "a"));
        // Names are case-sensitive.
        assert!(MasterList::new(["a", "A"]).is_ok());
    }

    #[test]
    fn retire_keeps_id_but_hides_name() {
        let mut list = MasterList::new(["plane", "airplane"]).unwrap();
        list.retire(0);
        assert_eq!(list.id("plane"), Some(0));
        assert_eq!(list.live_id("plane"), None);
        assert_eq!(list.live_len(), 1);
        assert_eq!(list.len(), 2);
    }

    #[test]
    fn rename_collision_is_an_error() {
        let mut list = MasterList::new(["a", "b"]).unwrap();
        assert!(list.rename("a", "b").is_err());
        assert_eq!(list.rename("a", "c").unwrap(), 0);
        assert_eq!(list.id("c"), Some(0));
        assert_eq!(list.id("a"), None);
    }

    #[test]
    fn compact_renumbers_and_maps() {
        let mut corpus = AnnotationCorpus::new(
            MasterList::new(["plane", "airplane", "sky"]).unwrap(),
            MasterList::new(["in"]).unwrap(),
        );
        corpus.images.insert("a.jpg".into(), vec![vr(1, 0, 2)]);
        corpus.object_classes.retire(0);
        let map = corpus.compact().unwrap();
        assert_eq!(corpus.object_classes.names(), &["airplane", "sky"]);
        assert_eq!(map.object_classes.get(&1), Some(&0));
        assert_eq!(corpus.images["a.jpg"][0], vr(0, 0, 1));
    }
}
