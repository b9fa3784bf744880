use std::fmt::Write as _;

use super::{Action, Edit, ImageBlock, InstructionKind};
use crate::model::NamedVrType;

fn tuple(t: &NamedVrType) -> String {
    format!("({}, {}, {})", t.subject, t.predicate, t.object)
}

/// Renders blocks in the canonical script form, one blank line between blocks.
///
/// Source line numbers stored in the blocks are ignored.
pub fn render_script(blocks: &[ImageBlock]) -> String {
    let mut out = String::new();
    for (i, block) in blocks.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        if block.remove_image {
            writeln!(out, "imname; {}; rimxxx", block.filename).unwrap();
            continue;
        }
        writeln!(out, "imname; {}", block.filename).unwrap();
        for ins in &block.instructions {
            let kind = ins.kind();
            match &ins.action {
                Action::Change {
                    index,
                    expected,
                    edit,
                } => {
                    let payload = match edit {
                        Edit::SubjectClass(n) | Edit::ObjectClass(n) | Edit::Predicate(n) => {
                            n.clone()
                        }
                        Edit::SubjectBbox(b) | Edit::ObjectBbox(b) => b.to_string(),
                    };
                    writeln!(out, "{kind}; {index}; {}; {payload}", tuple(expected)).unwrap();
                }
                Action::Remove { index, expected } => {
                    writeln!(out, "{kind}; {index}; {};", tuple(expected)).unwrap();
                }
                Action::Add(n) => {
                    writeln!(
                        out,
                        "{}; {}; {}; {}; {}; {}",
                        InstructionKind::AvrXxx,
                        n.subject_class,
                        n.subject_bbox,
                        n.predicate,
                        n.object_class,
                        n.object_bbox
                    )
                    .unwrap();
                }
            }
        }
    }
    out
}
