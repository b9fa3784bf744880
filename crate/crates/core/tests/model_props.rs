mod common;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use vrdkit::model::io::{
    annotations_to_canonical_bytes, master_list_to_canonical_bytes, parse_annotations,
    parse_master_list,
};
use vrdkit::model::{
    compute_stats, find_exact_duplicates, load_corpus, save_corpus, AnnotationCorpus, BoundingBox,
    CorpusError, CorpusPaths, MasterList, VisualRelationship,
};

use common::*;

fn corpus_from_seed(seed: u64) -> AnnotationCorpus {
    let all: Vec<usize> = (0..PREDICATES.len()).collect();
    random_corpus(&mut ChaCha8Rng::seed_from_u64(seed), 10, 8, &all)
}

fn small_vr() -> impl Strategy<Value = VisualRelationship> {
    (0usize..3, 0i64..3, 0usize..2, 0usize..3, 0i64..3).prop_map(|(s, sy, p, o, oy)| {
        VisualRelationship::new(obj(s, sy, sy + 1, 0, 1), p, obj(o, oy, oy + 1, 0, 1))
    })
}

proptest! {
    #[test]
    fn duplicates_match_quadratic_scan(vrs in proptest::collection::vec(small_vr(), 0..12)) {
        let mut want = Vec::new();
        for i in 0..vrs.len() {
            for j in i + 1..vrs.len() {
                if vrs[i] == vrs[j] {
                    want.push((i, j));
                }
            }
        }
        prop_assert_eq!(find_exact_duplicates(&vrs), want);
    }

    #[test]
    fn stats_match_recount(seed in any::<u64>()) {
        let c = corpus_from_seed(seed);
        let s = compute_stats(&c);
        let mut vrs = 0;
        let mut dup_images = 0;
        for list in c.images.values() {
            vrs += list.len();
            let has_dup = (0..list.len()).any(|i| (i + 1..list.len()).any(|j| list[i] == list[j]));
            dup_images += usize::from(has_dup);
        }
        prop_assert_eq!(s.vr_count, vrs);
        prop_assert_eq!(s.image_count, c.images.len());
        prop_assert_eq!(s.images_with_exact_duplicate_vrs, dup_images);
        prop_assert_eq!(s.object_class_count, CLASSES.len());
        if s.image_count > 0 {
            let exact = vrs as f64 / c.images.len() as f64;
            prop_assert!((s.mean_vrs_per_image() - exact).abs() < 1e-12);
            let shown: f64 = s.mean_display().parse().unwrap();
            prop_assert!((shown - exact).abs() <= 0.005 + 1e-9);
        }
    }

    #[test]
    fn canonical_bytes_round_trip(seed in any::<u64>()) {
        let c = corpus_from_seed(seed);
        let bytes = annotations_to_canonical_bytes(&c);
        let text = String::from_utf8(bytes.clone()).unwrap();
        let path = std::path::Path::new("mem.json");
        let again = parse_annotations(&text, path, c.object_classes.clone(), c.predicates.clone()).unwrap();
        prop_assert_eq!(&again, &c);
        prop_assert_eq!(annotations_to_canonical_bytes(&again), bytes);
        let reparsed = serde_json::from_str::<serde_json::Value>(&text);
        prop_assert!(reparsed.is_ok());
    }

    #[test]
    fn area_is_product_of_sides(ymin in -5i64..20, h in -5i64..20, xmin in -5i64..20, w in -5i64..20) {
        let b = BoundingBox::new(ymin, ymin + h, xmin, xmin + w);
        let want = if h > 0 && w > 0 { h * w } else { 0 };
        prop_assert_eq!(b.area(), want);
        prop_assert_eq!(b.is_well_formed(), h > 0 && w > 0 && ymin >= 0 && xmin >= 0);
    }
}

#[test]
fn save_and_load_preserve_corpus() {
    let dir = tempfile::tempdir().unwrap();
    let paths = CorpusPaths::new(
        dir.path().join("a.json"),
        dir.path().join("c.json"),
        dir.path().join("p.json"),
    );
    for seed in 0..20 {
        let c = corpus_from_seed(seed);
        save_corpus(&c, &paths).unwrap();
        assert_eq!(load_corpus(&paths).unwrap(), c);
    }
}

#[test]
fn master_list_bytes_round_trip() {
    let list = MasterList::new(["person", "teddy bear", "caf\u{e9}"]).unwrap();
    let bytes = master_list_to_canonical_bytes(&list);
    let back = parse_master_list(
        std::str::from_utf8(&bytes).unwrap(),
        std::path::Path::new("x"),
    )
    .unwrap();
    assert_eq!(back, list);
}

#[test]
fn malformed_inputs_are_reported() {
    let (classes, preds) = master_lists();
    let p = std::path::Path::new("x.json");
    for bad in [
        "[]",
        "{\"a.jpg\": [{\"predicate\": 0}]}",
        "{\"a.jpg\": [{\"predicate\": 0, \"subject\": {\"category\": 0, \"bbox\": [1,2,3]}, \"object\": {\"category\": 0, \"bbox\": [1,2,3,4]}}]}",
        "{\"a.jpg\": [], \"a.jpg\": []}",
        "{\"a.jpg\": [",
    ] {
        assert!(
            matches!(parse_annotations(bad, p, classes.clone(), preds.clone()), Err(CorpusError::MalformedRecord { .. })),
            "{bad}"
        );
    }
    let out_of_range = "{\"a.jpg\": [{\"predicate\": 99, \"subject\": {\"category\": 0, \"bbox\": [1,2,3,4]}, \"object\": {\"category\": 0, \"bbox\": [1,2,3,4]}}]}";
    assert!(matches!(
        parse_annotations(out_of_range, p, classes, preds),
        Err(CorpusError::IdOutOfRange {
            field: "predicate",
            ..
        })
    ));
    assert!(matches!(
        load_corpus(&CorpusPaths::new(
            "/nonexistent/a.json",
            "/nonexistent/c.json",
            "/nonexistent/p.json"
        )),
        Err(CorpusError::FileMissing(_))
    ));
}
