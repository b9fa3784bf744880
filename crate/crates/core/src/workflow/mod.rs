//! Configurable multi-step corpus customization.
//!
//! A workflow is an ordered list of steps read from a TOML file:
//!
//! ```toml
//! input_annotations = "train.json"
//! input_classes = "classes.json"
//! input_predicates = "predicates.json"
//! output_annotations = "out/train.json"
//! output_classes = "out/classes.json"
//! output_predicates = "out/predicates.json"
//!
//! [[steps]]
//! kind = "merge_class"
//! from = "plane"
//! to = "airplane"
//!
//! [[steps]]
//! kind = "apply_protocol"
//! path = "fixes.txt"
//! ```
//!
//! Relative paths are resolved against the directory holding the config.
//! Steps run strictly in order on a private copy of the corpus; if any step
//! fails the whole run fails and nothing is written.

mod steps;

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{self, AnnotationCorpus, CorpusError, CorpusPaths, NamedVrType};
use crate::protocol::{self, ApplyError, ApplyReport, ImageBlock, ParseError};

pub use steps::{
    change_class_for_image_set, change_vr_type_global, dedup_vrs, merge_object_class,
    merge_predicate, remove_empty_images, remove_vr_types_global, update_master_lists, ListTarget,
};

#[derive(Debug, Clone, PartialEq, Eq, Deserialize, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum StepSpec {
    UpdateMasterLists {
        target: ListTarget,
        #[serde(default)]
        renames: Vec<(String, String)>,
        #[serde(default)]
        additions: Vec<String>,
    },
    ApplyProtocol {
        path: PathBuf,
    },
    ChangeClassForImages {
        images: Vec<String>,
        from: String,
        to: String,
    },
    MergeClass {
        from: String,
        to: String,
    },
    MergePredicate {
        from: String,
        to: String,
    },
    RemoveVrTypes {
        types: Vec<NamedVrType>,
    },
    RemoveEmptyImages,
    ChangeVrType {
        from: NamedVrType,
        to: NamedVrType,
    },
    DedupVrs,
}

impl StepSpec {
    pub fn name(&self) -> &'static str {
        match self {
            StepSpec::UpdateMasterLists { .. } => "update_master_lists",
            StepSpec::ApplyProtocol { .. } => "apply_protocol",
            StepSpec::ChangeClassForImages { .. } => "change_class_for_images",
            StepSpec::MergeClass { .. } => "merge_class",
            StepSpec::MergePredicate { .. } => "merge_predicate",
            StepSpec::RemoveVrTypes { .. } => "remove_vr_types",
            StepSpec::RemoveEmptyImages => "remove_empty_images",
            StepSpec::ChangeVrType { .. } => "change_vr_type",
            StepSpec::DedupVrs => "dedup_vrs",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WorkflowConfig {
    pub input: CorpusPaths,
    pub output: CorpusPaths,
    /// When set, retired names are dropped before saving and the id mapping is written here.
    pub compact_mapping: Option<PathBuf>,
    pub steps: Vec<StepSpec>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    input_annotations: PathBuf,
    input_classes: PathBuf,
    input_predicates: PathBuf,
    output_annotations: PathBuf,
    output_classes: PathBuf,
    output_predicates: PathBuf,
    compact_mapping: Option<PathBuf>,
    #[serde(default)]
    steps: Vec<StepSpec>,
}

impl WorkflowConfig {
    /// Parses config text; relative paths are joined onto `base_dir`.
    pub fn parse(text: &str, base_dir: &Path) -> Result<Self, WorkflowError> {
        let raw: ConfigFile =
            toml::from_str(text).map_err(|e| WorkflowError::ConfigInvalid(e.to_string()))?;
        let abs = |p: PathBuf| if p.is_absolute() { p } else { base_dir.join(p) };
        let steps = raw
            .steps
            .into_iter()
            .map(|s| match s {
                StepSpec::ApplyProtocol { path } => StepSpec::ApplyProtocol { path: abs(path) },
                other => other,
            })
            .collect();
        let config = Self {
            input: CorpusPaths::new(
                abs(raw.input_annotations),
                abs(raw.input_classes),
                abs(raw.input_predicates),
            ),
            output: CorpusPaths::new(
                abs(raw.output_annotations),
                abs(raw.output_classes),
                abs(raw.output_predicates),
            ),
            compact_mapping: raw.compact_mapping.map(abs),
            steps,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self, WorkflowError> {
        let text = fs::read_to_string(path).map_err(|source| WorkflowError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text, path.parent().unwrap_or(Path::new(".")))
    }

    pub fn validate(&self) -> Result<(), WorkflowError> {
        if self.steps.is_empty() {
            return Err(WorkflowError::ConfigInvalid(
                "a workflow needs at least one step".into(),
            ));
        }
        let inputs = [
            &self.input.annotations,
            &self.input.classes,
            &self.input.predicates,
        ];
        let outputs = [
            &self.output.annotations,
            &self.output.classes,
            &self.output.predicates,
        ];
        for out in outputs
            .iter()
            .chain(self.compact_mapping.iter().collect::<Vec<_>>().iter())
        {
            if inputs.contains(out) {
                return Err(WorkflowError::ConfigInvalid(format!(
                    "output path {} is also an input",
                    out.display()
                )));
            }
        }
        for (i, a) in outputs.iter().enumerate() {
            if outputs[i + 1..].contains(a) {
                return Err(WorkflowError::ConfigInvalid(format!(
                    "output path {} used twice",
                    a.display()
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StepReport {
    /// 1-based position in the config.
    pub ordinal: usize,
    pub name: &'static str,
    pub counts: ApplyReport,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WorkflowReport {
    pub steps: Vec<StepReport>,
    pub elapsed: Duration,
}

impl fmt::Display for WorkflowReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.steps {
            writeln!(f, "step {:>2} {:<24} {}", s.ordinal, s.name, s.counts)?;
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum StepError {
    #[error("unknown name {0:?}")]
    UnknownName(String),
    #[error("cannot merge {0:?} into itself")]
    SelfMerge(String),
    #[error("name {0:?} already exists")]
    NameCollision(String),
    #[error("image {0:?} not found")]
    ImageNotFound(String),
    #[error("rewriting {from} to {to} would require swapping subject and object")]
    UnsupportedRewrite {
        from: Box<NamedVrType>,
        to: Box<NamedVrType>,
    },
    #[error("protocol file {}: {source}", path.display())]
    ProtocolParse {
        path: PathBuf,
        #[source]
        source: ParseError,
    },
    #[error("protocol file {}: {source}", path.display())]
    ProtocolApply {
        path: PathBuf,
        #[source]
        source: ApplyError,
    },
    #[error("cannot read {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Error)]
pub enum WorkflowError {
    #[error("invalid workflow config: {0}")]
    ConfigInvalid(String),
    #[error("step {ordinal} ({name}) failed: {source}")]
    StepFailed {
        ordinal: usize,
        name: &'static str,
        #[source]
        source: StepError,
    },
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error("i/o error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl WorkflowError {
    pub fn is_io(&self) -> bool {
        match self {
            WorkflowError::Io { .. } => true,
            WorkflowError::Corpus(e) => e.is_io(),
            WorkflowError::StepFailed { source, .. } => matches!(source, StepError::Io { .. }),
            WorkflowError::ConfigInvalid(_) => false,
        }
    }
}

fn load_protocol(path: &Path) -> Result<Vec<ImageBlock>, StepError> {
    let bytes = fs::read(path).map_err(|source| StepError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    protocol::parse_script_bytes(&bytes).map_err(|source| StepError::ProtocolParse {
        path: path.to_path_buf(),
        source,
    })
}

/// Runs every step in order against a copy of `corpus`.
///
/// All protocol files are read and parsed before the first step runs.
pub fn run_workflow(
    config: &WorkflowConfig,
    corpus: &AnnotationCorpus,
) -> Result<(AnnotationCorpus, WorkflowReport), WorkflowError> {
    config.validate()?;
    let start = Instant::now();
    let failed = |i: usize, step: &StepSpec, source| WorkflowError::StepFailed {
        ordinal: i + 1,
        name: step.name(),
        source,
    };

    let mut scripts = Vec::with_capacity(config.steps.len());
    for (i, step) in config.steps.iter().enumerate() {
        scripts.push(match step {
            StepSpec::ApplyProtocol { path } => {
                Some(load_protocol(path).map_err(|e| failed(i, step, e))?)
            }
            _ => None,
        });
    }

    let mut work = corpus.clone();
    let mut reports = Vec::with_capacity(config.steps.len());
    for (i, (step, script)) in config.steps.iter().zip(&scripts).enumerate() {
        let counts =
            run_step(&mut work, step, script.as_deref()).map_err(|e| failed(i, step, e))?;
        reports.push(StepReport {
            ordinal: i + 1,
            name: step.name(),
            counts,
        });
    }
    Ok((
        work,
        WorkflowReport {
            steps: reports,
            elapsed: start.elapsed(),
        },
    ))
}

fn run_step(
    corpus: &mut AnnotationCorpus,
    step: &StepSpec,
    script: Option<&[ImageBlock]>,
) -> Result<ApplyReport, StepError> {
    match step {
        StepSpec::UpdateMasterLists {
            target,
            renames,
            additions,
        } => update_master_lists(corpus, *target, renames, additions),
        StepSpec::ApplyProtocol { path } => {
            let blocks = script.expect("protocol scripts are loaded up front");
            let (next, report) =
                protocol::validate_and_apply(corpus, blocks).map_err(|source| {
                    StepError::ProtocolApply {
                        path: path.clone(),
                        source,
                    }
                })?;
            *corpus = next;
            Ok(report)
        }
        StepSpec::ChangeClassForImages { images, from, to } => {
            change_class_for_image_set(corpus, images, from, to)
        }
        StepSpec::MergeClass { from, to } => merge_object_class(corpus, from, to),
        StepSpec::MergePredicate { from, to } => merge_predicate(corpus, from, to),
        StepSpec::RemoveVrTypes { types } => remove_vr_types_global(corpus, types),
        StepSpec::RemoveEmptyImages => Ok(remove_empty_images(corpus)),
        StepSpec::ChangeVrType { from, to } => change_vr_type_global(corpus, from, to),
        StepSpec::DedupVrs => Ok(dedup_vrs(corpus)),
    }
}

/// Loads the configured inputs, runs the workflow, and writes the outputs.
///
/// Outputs are written only after every step has succeeded.
pub fn run_workflow_files(config: &WorkflowConfig) -> Result<WorkflowReport, WorkflowError> {
    let corpus = model::load_corpus(&config.input)?;
    let (mut out, report) = run_workflow(config, &corpus)?;
    if let Some(path) = &config.compact_mapping {
        let mapping = out.compact()?;
        let json = serde_json::to_vec_pretty(&mapping).expect("mapping serializes");
        fs::write(path, json).map_err(|source| WorkflowError::Io {
            path: path.clone(),
            source,
        })?;
    }
    model::save_corpus(&out, &config.output)?;
    Ok(report)
}
