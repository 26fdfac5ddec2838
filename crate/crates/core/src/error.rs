//! Error types for the library.

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum InventoryError {
    #[error("inventory width {width} is smaller than label count {labels}")]
    WidthTooSmall { labels: usize, width: usize },
    #[error("duplicate label {label:?} in inventory")]
    DuplicateLabel { label: String },
}

#[derive(Debug, Error)]
pub enum LexiconError {
    #[error("line {line}: {msg}")]
    Malformed { line: usize, msg: String },
    #[error("line {line}: unknown label {label:?}")]
    UnknownLabel { line: usize, label: String },
    #[error("label {label:?} is not in the inventory")]
    LabelNotInInventory { label: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Error, PartialEq)]
pub enum SrnError {
    #[error("input length {got} does not match input layer size {expected}")]
    InputSize { expected: usize, got: usize },
    #[error("target length {got} does not match output layer size {expected}")]
    TargetSize { expected: usize, got: usize },
    #[error("invalid training config: {msg}")]
    BadConfig { msg: String },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

#[derive(Debug, Error)]
pub enum ChannelError {
    #[error("{model} network is {got_in}->{got_out} but the inventories require {want_in}->{want_out}")]
    DimensionMismatch {
        model: &'static str,
        got_in: usize,
        got_out: usize,
        want_in: usize,
        want_out: usize,
    },
    #[error("training corpus is empty")]
    EmptyCorpus,
    #[error("line {line}: unknown {task} label {label:?}")]
    UnknownAnnotation {
        line: usize,
        task: &'static str,
        label: String,
    },
    #[error(transparent)]
    Srn(#[from] SrnError),
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ChunkError {
    #[error("token at position {got} arrived after position {last}; positions must increase")]
    OutOfOrder { last: usize, got: usize },
}

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("line {line}: {msg}")]
    Malformed { line: usize, msg: String },
    #[error("line {line}: unknown {task} label {label:?}")]
    UnknownLabel {
        line: usize,
        task: &'static str,
        label: String,
    },
    #[error("line {line}: keep column present on some tokens of the utterance but not all")]
    PartialKeepColumn { line: usize },
    #[error("corpus is empty")]
    Empty,
    #[error("no utterance carries a gold surviving set")]
    NoGoldSurvivors,
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
