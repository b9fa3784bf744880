mod common;

use std::fmt::Write as _;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use vrdkit::model::{AnnotatedObject, AnnotationCorpus, BoundingBox, VisualRelationship};
use vrdkit::protocol::{self, AbortCause, ApplyReport};

use common::*;

/// A relationship tagged `Some(i)` for the i-th original entry, `None` if added.
type Tagged = (Option<usize>, VisualRelationship);

/// Reference interpreter over `(filename, relationships, removed)` slots.
struct Sim {
    images: Vec<(String, Vec<Tagged>, bool)>,
}

fn quote(rng: &mut ChaCha8Rng, name: &str) -> String {
    match rng.gen_range(0..4) {
        0 => name.to_string(),
        1 => format!("'{name}'"),
        2 => format!("`{name}'"),
        _ => format!("\"{name}\""),
    }
}

fn bbox_text(b: &BoundingBox) -> String {
    format!("[{},{},{},{}]", b.ymin, b.ymax, b.xmin, b.xmax)
}

fn tuple_text(rng: &mut ChaCha8Rng, c: &AnnotationCorpus, v: &VisualRelationship) -> String {
    format!(
        "({}, {}, {})",
        quote(rng, c.class_name(v.subject.class_id)),
        quote(rng, c.predicate_name(v.predicate_id)),
        quote(rng, c.class_name(v.object.class_id))
    )
}

/// Generates a valid script against `corpus` together with the expected
/// result computed by straightforward simulation.
fn random_script(
    rng: &mut ChaCha8Rng,
    corpus: &AnnotationCorpus,
) -> (String, AnnotationCorpus, ApplyReport) {
    let keys: Vec<String> = corpus.images.keys().cloned().collect();
    let mut sim = Sim {
        images: keys
            .iter()
            .map(|k| {
                (
                    k.clone(),
                    corpus.images[k]
                        .iter()
                        .copied()
                        .enumerate()
                        .map(|(i, v)| (Some(i), v))
                        .collect(),
                    false,
                )
            })
            .collect(),
    };
    let mut text = String::new();
    let mut touched = std::collections::BTreeSet::new();
    if keys.is_empty() {
        return (text, corpus.clone(), ApplyReport::default());
    }
    for _ in 0..rng.gen_range(0..4) {
        let slot = rng.gen_range(0..keys.len());
        if sim.images[slot].2 {
            continue;
        }
        touched.insert(slot);
        if rng.gen_bool(0.1) {
            writeln!(text, "imname; {}; rimxxx", keys[slot]).unwrap();
            sim.images[slot].2 = true;
            continue;
        }
        writeln!(text, "imname; {}", keys[slot]).unwrap();
        for _ in 0..rng.gen_range(0..6) {
            let list = &mut sim.images[slot].1;
            let op = if list.is_empty() {
                6
            } else {
                rng.gen_range(0..8)
            };
            if op == 6 || op == 7 {
                let s = random_object(rng, &[]);
                let o = random_object(rng, &[]);
                let p = rng.gen_range(0..PREDICATES.len());
                writeln!(
                    text,
                    "avrxxx; {}; {}; {}; {}; {}",
                    quote(rng, CLASSES[s.class_id]),
                    bbox_text(&s.bbox),
                    quote(rng, PREDICATES[p]),
                    quote(rng, CLASSES[o.class_id]),
                    bbox_text(&o.bbox)
                )
                .unwrap();
                list.push((None, VisualRelationship::new(s, p, o)));
                continue;
            }
            let idx = rng.gen_range(0..list.len());
            let cur = list[idx].1;
            let tuple = tuple_text(rng, corpus, &cur);
            let v = &mut list[idx].1;
            match op {
                0 => {
                    let c = rng.gen_range(0..CLASSES.len());
                    writeln!(text, "cvrsoc; {idx}; {tuple}; {}", quote(rng, CLASSES[c])).unwrap();
                    v.subject.class_id = c;
                }
                1 => {
                    let b = random_bbox(rng);
                    writeln!(text, "cvrsbb; {idx}; {tuple}; {}", bbox_text(&b)).unwrap();
                    v.subject.bbox = b;
                }
                2 => {
                    let c = rng.gen_range(0..CLASSES.len());
                    writeln!(text, "cvrooc; {idx}; {tuple}; {}", quote(rng, CLASSES[c])).unwrap();
                    v.object.class_id = c;
                }
                3 => {
                    let b = random_bbox(rng);
                    writeln!(text, "cvrobb; {idx}; {tuple}; {}", bbox_text(&b)).unwrap();
                    v.object.bbox = b;
                }
                4 => {
                    let p = rng.gen_range(0..PREDICATES.len());
                    writeln!(
                        text,
                        "CVRPXX; {idx}; {tuple}; {}",
                        quote(rng, PREDICATES[p])
                    )
                    .unwrap();
                    v.predicate_id = p;
                }
                _ => {
                    writeln!(text, "rvrxxx; {idx}; {tuple};").unwrap();
                    list.remove(idx);
                }
            }
        }
        text.push('\n');
    }

    let mut expected = corpus.clone();
    let mut report = ApplyReport {
        images_touched: touched.len(),
        ..Default::default()
    };
    for (key, list, removed) in &sim.images {
        if *removed {
            expected.images.remove(key);
            report.images_removed += 1;
            continue;
        }
        let original = &corpus.images[key];
        let survivors: Vec<usize> = list.iter().filter_map(|(t, _)| *t).collect();
        report.vrs_removed += original.len() - survivors.len();
        report.vrs_added += list.iter().filter(|(t, _)| t.is_none()).count();
        report.vrs_changed += list
            .iter()
            .filter(|(t, v)| t.is_some_and(|i| original[i] != *v))
            .count();
        expected
            .images
            .insert(key.clone(), list.iter().map(|(_, v)| *v).collect());
    }
    (text, expected, report)
}

fn line_of(text: &str, needle: &str) -> usize {
    text.lines().position(|l| l.contains(needle)).unwrap() + 1
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn parse_never_panics(text in "\\PC{0,200}") {
        let _ = protocol::parse_script(&text);
    }

    #[test]
    fn parse_bytes_never_panics(bytes in proptest::collection::vec(any::<u8>(), 0..300)) {
        let _ = protocol::parse_script_bytes(&bytes);
    }

    #[test]
    fn grammar_shaped_noise_never_panics(
        lines in proptest::collection::vec(
            (prop::sample::select(vec!["imname", "cvrsoc", "cvrsbb", "rvrxxx", "avrxxx", "rimxxx", "IMNAME", "#", ""]),
             proptest::collection::vec("[a-z0-9 ,\\[\\]()'`\"-]{0,12}", 0..7)),
            0..12)
    ) {
        let text: String = lines.iter().map(|(m, f)| format!("{m}; {}\n", f.join(";"))).collect();
        let _ = protocol::parse_script(&text);
    }

    #[test]
    fn apply_matches_reference_interpreter(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let all: Vec<usize> = (0..PREDICATES.len()).collect();
        let corpus = random_corpus(&mut rng, 5, 6, &all);
        let (script, expected, report) = random_script(&mut rng, &corpus);
        let blocks = protocol::parse_script(&script).map_err(|e| TestCaseError::fail(format!("{e}\n{script}")))?;
        let (got, got_report) = protocol::validate_and_apply(&corpus, &blocks)
            .map_err(|e| TestCaseError::fail(format!("{e}\n{script}")))?;
        prop_assert_eq!(&got, &expected, "{}", script);
        prop_assert_eq!(got_report, report, "{}", script);
    }

    #[test]
    fn render_round_trips(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let all: Vec<usize> = (0..PREDICATES.len()).collect();
        let corpus = random_corpus(&mut rng, 5, 6, &all);
        let (script, _, _) = random_script(&mut rng, &corpus);
        let blocks = protocol::parse_script(&script).unwrap();
        let rendered = protocol::render_script(&blocks);
        let reparsed = protocol::parse_script(&rendered).unwrap();
        let strip = |bs: &[protocol::ImageBlock]| -> Vec<_> {
            bs.iter()
                .map(|b| (b.filename.clone(), b.remove_image, b.instructions.iter().map(|i| i.action.clone()).collect::<Vec<_>>()))
                .collect()
        };
        prop_assert_eq!(strip(&reparsed), strip(&blocks));
        prop_assert_eq!(protocol::render_script(&reparsed), rendered);
    }

    #[test]
    fn additions_leave_existing_relationships_alone(seed in any::<u64>(), n in 1usize..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let all: Vec<usize> = (0..PREDICATES.len()).collect();
        let corpus = random_corpus(&mut rng, 4, 5, &all);
        prop_assume!(!corpus.images.is_empty());
        let key = corpus.images.keys().next().unwrap().clone();
        let mut script = format!("imname; {key}\n");
        for _ in 0..n {
            script.push_str("avrxxx; person; [0,5,0,5]; on; shelf; [5,9,5,9]\n");
        }
        let blocks = protocol::parse_script(&script).unwrap();
        let (got, report) = protocol::validate_and_apply(&corpus, &blocks).unwrap();
        let before = &corpus.images[&key];
        prop_assert_eq!(&got.images[&key][..before.len()], &before[..]);
        prop_assert_eq!(got.images[&key].len(), before.len() + n);
        for (k, v) in &corpus.images {
            if *k != key {
                prop_assert_eq!(&got.images[k], v);
            }
        }
        prop_assert_eq!(report.vrs_added, n);
        prop_assert_eq!(report.vrs_changed + report.vrs_removed, 0);
    }

    #[test]
    fn injected_fault_aborts_at_its_line(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let all: Vec<usize> = (0..PREDICATES.len()).collect();
        let corpus = random_corpus(&mut rng, 5, 6, &all);
        prop_assume!(!corpus.images.is_empty());
        let (script, _, _) = random_script(&mut rng, &corpus);
        let lines: Vec<&str> = script.lines().collect();
        // Append a block whose removal index is past any list length.
        let key = corpus.images.keys().next().unwrap();
        let fault = format!("imname; {key}\nrvrxxx; 1000; (person, on, shelf);");
        let mut text = lines.join("\n");
        text.push('\n');
        text.push_str(&fault);
        let blocks = protocol::parse_script(&text).unwrap();
        let err = protocol::validate_and_apply(&corpus, &blocks).unwrap_err();
        let image_gone = script.contains(&format!("imname; {key}; rimxxx"));
        if image_gone {
            prop_assert!(matches!(err.cause, AbortCause::ImageNotFound(_)));
            prop_assert_eq!(err.line, lines.len() + 1);
        } else {
            prop_assert!(matches!(err.cause, AbortCause::IndexOutOfRange { .. }), "{:?}", err);
            prop_assert_eq!(err.line, line_of(&text, "rvrxxx; 1000"));
        }
    }
}

#[test]
fn unknown_image_reports_imname_line() {
    let corpus = random_corpus(&mut ChaCha8Rng::seed_from_u64(1), 3, 3, &[0]);
    let blocks = protocol::parse_script(
        "# header\n\nimname; nope.jpg\navrxxx; person; [0,1,0,1]; on; shelf; [0,1,0,1]\n",
    )
    .unwrap();
    let err = protocol::validate_and_apply(&corpus, &blocks).unwrap_err();
    assert_eq!(err.line, 3);
    assert!(matches!(err.cause, AbortCause::ImageNotFound(_)));
}

#[test]
fn later_instruction_sees_earlier_change() {
    let (classes, preds) = master_lists();
    let mut corpus = AnnotationCorpus::new(classes, preds);
    let v = VisualRelationship::new(
        AnnotatedObject::new(0, BoundingBox::new(0, 5, 0, 5)),
        0,
        AnnotatedObject::new(1, BoundingBox::new(5, 9, 5, 9)),
    );
    corpus.images.insert("a.jpg".into(), vec![v]);
    let ok =
        "imname; a.jpg\ncvrsoc; 0; (person, on, shelf); dog\ncvrpxx; 0; (dog, on, shelf); near\n";
    let (got, report) =
        protocol::validate_and_apply(&corpus, &protocol::parse_script(ok).unwrap()).unwrap();
    assert_eq!(
        corpus.class_name(got.images["a.jpg"][0].subject.class_id),
        "dog"
    );
    assert_eq!(report.vrs_changed, 1);
    let stale = "imname; a.jpg\ncvrsoc; 0; (person, on, shelf); dog\ncvrpxx; 0; (person, on, shelf); near\n";
    let err =
        protocol::validate_and_apply(&corpus, &protocol::parse_script(stale).unwrap()).unwrap_err();
    assert_eq!(err.line, 3);
}
