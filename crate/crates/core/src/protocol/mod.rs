//! The annotation customization protocol.
//!
//! A script is a sequence of image blocks. Each block starts with an
//! `imname` line and is followed by instructions that change, remove, or add
//! relationships of that image:
//!
//! ```text
//! imname; 3223670633_7d3d72dfe8_b.jpg
//! cvrsoc; 4; (`person', `on', `shelf'); speaker
//! cvrsbb; 4; (`speaker', `on', `shelf'); [161,234,231,270]
//!
//! imname; 4929276486_ca06aedbb9_b.jpg
//! rvrxxx; 4; (`person', `wear', `jacket');
//! avrxxx; boat; [477,594,319,746]; has; dog; [478,529,587,618]
//!
//! imname; 7171463996_900cb4ce33_b.jpg; rimxxx
//! ```
//!
//! Indices are 0-based positions in the image's relationship list as it
//! stands when the instruction runs, so an instruction sees the effects of
//! every instruction before it. Every change and removal names the
//! `(subject, predicate, object)` it expects to find at that position, and
//! the whole script is rejected if any expectation fails.

mod apply;
mod parse;
mod render;

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::model::{BoundingBox, NamedVrType};

pub use apply::validate_and_apply;
pub use parse::{parse_script, parse_script_bytes};
pub use render::render_script;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum InstructionKind {
    ImName,
    CvrSoc,
    CvrSbb,
    CvrOoc,
    CvrObb,
    CvrPxx,
    RvrXxx,
    AvrXxx,
    RimXxx,
}

impl InstructionKind {
    pub const ALL: [InstructionKind; 9] = [
        InstructionKind::ImName,
        InstructionKind::CvrSoc,
        InstructionKind::CvrSbb,
        InstructionKind::CvrOoc,
        InstructionKind::CvrObb,
        InstructionKind::CvrPxx,
        InstructionKind::RvrXxx,
        InstructionKind::AvrXxx,
        InstructionKind::RimXxx,
    ];

    pub fn mnemonic(self) -> &'static str {
        match self {
            InstructionKind::ImName => "imname",
            InstructionKind::CvrSoc => "cvrsoc",
            InstructionKind::CvrSbb => "cvrsbb",
            InstructionKind::CvrOoc => "cvrooc",
            InstructionKind::CvrObb => "cvrobb",
            InstructionKind::CvrPxx => "cvrpxx",
            InstructionKind::RvrXxx => "rvrxxx",
            InstructionKind::AvrXxx => "avrxxx",
            InstructionKind::RimXxx => "rimxxx",
        }
    }

    /// Case-insensitive lookup of a mnemonic.
    pub fn from_mnemonic(s: &str) -> Option<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.mnemonic().eq_ignore_ascii_case(s))
    }
}

impl fmt::Display for InstructionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.mnemonic())
    }
}

/// The single field a change instruction rewrites.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Edit {
    SubjectClass(String),
    SubjectBbox(BoundingBox),
    ObjectClass(String),
    ObjectBbox(BoundingBox),
    Predicate(String),
}

/// A relationship to append, spelled with master-list names.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NewRelationship {
    pub subject_class: String,
    pub subject_bbox: BoundingBox,
    pub predicate: String,
    pub object_class: String,
    pub object_bbox: BoundingBox,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Action {
    Change {
        index: usize,
        expected: NamedVrType,
        edit: Edit,
    },
    Remove {
        index: usize,
        expected: NamedVrType,
    },
    Add(NewRelationship),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instruction {
    /// 1-based source line.
    pub line: usize,
    pub action: Action,
}

impl Instruction {
    pub fn kind(&self) -> InstructionKind {
        match &self.action {
            Action::Change { edit, .. } => match edit {
                Edit::SubjectClass(_) => InstructionKind::CvrSoc,
                Edit::SubjectBbox(_) => InstructionKind::CvrSbb,
                Edit::ObjectClass(_) => InstructionKind::CvrOoc,
                Edit::ObjectBbox(_) => InstructionKind::CvrObb,
                Edit::Predicate(_) => InstructionKind::CvrPxx,
            },
            Action::Remove { .. } => InstructionKind::RvrXxx,
            Action::Add(_) => InstructionKind::AvrXxx,
        }
    }
}

/// All instructions for one `imname` line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImageBlock {
    pub filename: String,
    /// Set by a trailing `rimxxx`; such a block carries no instructions.
    pub remove_image: bool,
    pub instructions: Vec<Instruction>,
    pub line: usize,
}

/// Net effect of a successful apply.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct ApplyReport {
    pub images_touched: usize,
    pub vrs_changed: usize,
    pub vrs_removed: usize,
    pub vrs_added: usize,
    pub images_removed: usize,
}

impl fmt::Display for ApplyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "images touched {}, relationships changed {}, removed {}, added {}, images removed {}",
            self.images_touched,
            self.vrs_changed,
            self.vrs_removed,
            self.vrs_added,
            self.images_removed
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {reason}")]
pub struct ParseError {
    pub line: usize,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AbortCause {
    #[error("image {0:?} not found")]
    ImageNotFound(String),
    #[error("index {index} out of range for {len} relationships")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("expected {expected} but found {found}")]
    TupleMismatch {
        expected: Box<NamedVrType>,
        found: Box<NamedVrType>,
    },
    #[error("unknown name {0:?}")]
    UnknownName(String),
}

/// Execution stopped at `line`; nothing was applied.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("aborted at line {line}: {cause}")]
pub struct ApplyError {
    pub line: usize,
    pub cause: AbortCause,
}
