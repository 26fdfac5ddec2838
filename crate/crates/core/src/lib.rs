//! Incremental, fault-tolerant flat syntactic analysis of transcribed
//! spontaneous speech.
//!
//! The library tags each word with a basic category, an abstract phrase
//! group category, and a phrase-start flag using three small Elman
//! networks, deletes pauses and interjections, repairs word and phrase
//! level self-corrections, chunks the survivors into flat phrase groups,
//! and assembles the groups into case frames.
//!
//! Processing is incremental: [`pipeline::Pipeline::process_token`]
//! accepts one token at a time and finalizes hypotheses as soon as their
//! inputs allow, and [`pipeline::Pipeline::flush`] closes the utterance
//! and yields the full [`caseframe::UtteranceAnalysis`].

pub mod caseframe;
pub mod channel;
pub mod chunker;
pub mod corpus;
pub mod correction;
pub mod error;
pub mod inventory;
pub mod lexicon;
pub mod pipeline;
pub mod srn;
pub mod token;

pub use caseframe::{Frame, Slot, SlotConfig, UtteranceAnalysis};
pub use channel::{Channel, TaggedWord};
pub use chunker::PhraseGroup;
pub use corpus::{AnnotatedUtterance, Metrics};
pub use correction::{RepairEvent, RepairKind};
pub use inventory::CategoryInventory;
pub use lexicon::Lexicon;
pub use pipeline::Pipeline;
pub use srn::{SrnModel, TrainConfig};
pub use token::{tokenize, Token, TokenKind};
