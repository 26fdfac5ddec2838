//! Incremental dataflow over five stages: tag, pause-filter, chunk,
//! correct, frame. There is no central control; stage `f` at position
//! `p` depends only on stage `f-1` at `p` and stage `f` at `p-1`, so any
//! executor that honors that dependency grid produces the same analysis.
//! [`Pipeline`] is the plain in-order executor; the stage structs are
//! public so other executors can drive them directly.
//!
//! Hypotheses finalize as early as their inputs allow: a phrase group
//! closes the moment its successor opens, and a group's survival is
//! settled when its successor group finalizes.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::caseframe::{Frame, FrameAssignment, FrameBuilder, SlotConfig, UtteranceAnalysis};
use crate::channel::{Channel, TaggedWord};
use crate::chunker::{chunk, IncrementalChunker, PhraseGroup};
use crate::correction::{pause_error, word_error, PhraseRepairState, RepairEvent};
use crate::error::ChunkError;
use crate::token::Token;

/// Processing stages, in dependency order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Stage {
    Tagged,
    Filtered,
    Chunked,
    Corrected,
    Framed,
}

/// A finalized per-position hypothesis. Payloads are immutable once
/// emitted; later stages may only remove positions, never retag them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hypothesis {
    pub position: usize,
    pub stage: Stage,
    pub payload: HypothesisPayload,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum HypothesisPayload {
    Tagged(TaggedWord),
    Filtered { kept: bool },
    Chunked { span: (usize, usize), label: String },
    Corrected { kept: bool },
    Framed(FrameAssignment),
}

impl Hypothesis {
    /// One-line trace rendering: `pos<TAB>stage<TAB>summary`.
    pub fn trace_line(&self) -> String {
        let stage = match self.stage {
            Stage::Tagged => "tagged",
            Stage::Filtered => "filtered",
            Stage::Chunked => "chunked",
            Stage::Corrected => "corrected",
            Stage::Framed => "framed",
        };
        let summary = match &self.payload {
            HypothesisPayload::Tagged(w) => format!(
                "{} {} {} start={}",
                w.token.surface,
                w.basic,
                w.abstract_label,
                if w.phrase_start { 1 } else { 0 }
            ),
            HypothesisPayload::Filtered { kept } => {
                if *kept { "kept".to_string() } else { "deleted".to_string() }
            }
            HypothesisPayload::Chunked { span, label } => {
                format!("{label} [{}..{}]", span.0, span.1)
            }
            HypothesisPayload::Corrected { kept } => {
                if *kept { "surviving".to_string() } else { "removed".to_string() }
            }
            HypothesisPayload::Framed(a) => match &a.slot_key {
                Some(key) => format!(
                    "frame {} slot {key}{}",
                    a.frame_index,
                    if a.incompatible { " (incompatible)" } else { "" }
                ),
                None => format!("frame {} verb", a.frame_index),
            },
        };
        format!("{}\t{}\t{}", self.position, stage, summary)
    }
}

/// Tagging stage: wraps the channel's per-word step.
#[derive(Debug, Clone)]
pub struct TagStage {
    channel: Channel,
}

impl TagStage {
    pub fn new(channel: Channel) -> Self {
        Self { channel }
    }

    pub fn step(&mut self, token: &Token) -> TaggedWord {
        self.channel.tag_word(token)
    }

    pub fn reset(&mut self) {
        self.channel.reset();
    }

    pub fn channel(&self) -> &Channel {
        &self.channel
    }
}

/// What the filter decided about one word.
#[derive(Debug, Clone, PartialEq)]
pub enum FilterVerdict {
    /// Pause, interjection, or unknown phonetic input: deleted.
    Junk(RepairEvent),
    /// Survivor; a word-level repair may drop the previous survivor.
    Keep { word_repair: Option<RepairEvent> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct FilterOutput {
    pub word: TaggedWord,
    pub verdict: FilterVerdict,
}

/// Pause filtering plus word-level repair detection. Adjacency for the
/// word check is adjacency in the filtered stream: junk between two
/// words does not separate them.
#[derive(Debug, Clone, Default)]
pub struct FilterStage {
    last_survivor: Option<TaggedWord>,
}

impl FilterStage {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn step(&mut self, word: TaggedWord) -> FilterOutput {
        if let Some(event) = pause_error(&word) {
            return FilterOutput {
                word,
                verdict: FilterVerdict::Junk(event),
            };
        }
        let word_repair = self
            .last_survivor
            .as_ref()
            .and_then(|prev| word_error(prev, &word));
        self.last_survivor = Some(word.clone());
        FilterOutput {
            word,
            verdict: FilterVerdict::Keep { word_repair },
        }
    }

    pub fn reset(&mut self) {
        self.last_survivor = None;
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ChunkOutput {
    /// Events decided upstream of or at this stage, in decision order.
    pub events: Vec<RepairEvent>,
    /// Position retracted from the open group by a word repair.
    pub retracted: Option<usize>,
    /// Group closed by this word's arrival.
    pub finalized: Option<PhraseGroup>,
}

/// Chunking stage. Junk is not chunked; a word-repair victim is
/// retracted from the open group before the repairing word is pushed,
/// so finalized groups are immutable.
#[derive(Debug, Clone, Default)]
pub struct ChunkStage {
    chunker: IncrementalChunker,
}

impl ChunkStage {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn step(&mut self, input: FilterOutput) -> Result<ChunkOutput, ChunkError> {
        match input.verdict {
            FilterVerdict::Junk(event) => Ok(ChunkOutput {
                events: vec![event],
                ..ChunkOutput::default()
            }),
            FilterVerdict::Keep { word_repair } => {
                let mut out = ChunkOutput::default();
                if let Some(event) = word_repair {
                    let victim = self
                        .chunker
                        .retract_last()
                        .expect("word-repair victim is the open group's last word");
                    debug_assert_eq!(victim.position(), event.removed_span.0);
                    out.retracted = Some(victim.position());
                    out.events.push(event);
                }
                out.finalized = self.chunker.push(input.word)?;
                Ok(out)
            }
        }
    }

    pub fn flush(&mut self) -> Option<PhraseGroup> {
        self.chunker.flush()
    }

    pub fn reset(&mut self) {
        self.chunker = IncrementalChunker::new();
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct CorrectOutput {
    /// All correction events settled by this step, in decision order.
    pub events: Vec<RepairEvent>,
    /// Pass-through of a word-repair retraction for hypothesis emission.
    pub retracted: Option<usize>,
    /// Group newly closed by the chunker (already final, may still be
    /// repaired away later).
    pub finalized: Option<(usize, usize, String)>,
    /// Group confirmed surviving; flows on to the frame stage.
    pub released: Option<PhraseGroup>,
}

/// Phrase-level correction stage: compares each newly finalized group
/// against the immediately preceding surviving group and either repairs
/// it away or releases it downstream.
#[derive(Debug, Clone, Default)]
pub struct CorrectStage {
    state: PhraseRepairState,
}

impl CorrectStage {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn step(&mut self, input: ChunkOutput) -> CorrectOutput {
        let mut out = CorrectOutput {
            events: input.events,
            retracted: input.retracted,
            ..CorrectOutput::default()
        };
        if let Some(group) = input.finalized {
            out.finalized = Some((group.span().0, group.span().1, group.label().to_string()));
            let (event, released) = self.state.group_finalized(group);
            out.events.extend(event);
            out.released = released;
        }
        out
    }

    /// Utterance end: the group still held is confirmed surviving.
    pub fn flush(&mut self) -> Option<PhraseGroup> {
        self.state.flush()
    }

    pub fn reset(&mut self) {
        self.state = PhraseRepairState::new();
    }
}

/// Frame-filing stage.
#[derive(Debug, Clone)]
pub struct FrameStage {
    builder: FrameBuilder,
    config: SlotConfig,
}

impl FrameStage {
    pub fn new(config: SlotConfig) -> Self {
        Self {
            builder: FrameBuilder::new(config.clone()),
            config,
        }
    }

    pub fn step(&mut self, group: PhraseGroup) -> (FrameAssignment, Vec<usize>) {
        let positions: Vec<usize> = group.positions().collect();
        (self.builder.add(group), positions)
    }

    pub fn finish(&mut self) -> Vec<Frame> {
        self.builder.finish()
    }

    pub fn reset(&mut self) {
        self.builder = FrameBuilder::new(self.config.clone());
    }
}

/// Builds the final interpretation from the per-utterance record. The
/// repair list is ordered by removed span, so the result is independent
/// of the order in which stages settled their events.
pub fn interpret(
    tokens: Vec<Token>,
    tagged: Vec<TaggedWord>,
    mut events: Vec<RepairEvent>,
    groups: Vec<PhraseGroup>,
    frames: Vec<Frame>,
) -> UtteranceAnalysis {
    events.sort_by_key(|e| e.removed_span);
    let removed: BTreeSet<usize> = events.iter().flat_map(|e| e.removed_positions()).collect();
    let surviving: BTreeSet<usize> = (0..tokens.len()).filter(|p| !removed.contains(p)).collect();
    debug_assert_eq!(
        groups.iter().flat_map(|g| g.positions()).collect::<BTreeSet<_>>(),
        surviving,
        "surviving words partition into the released groups"
    );
    UtteranceAnalysis {
        tokens,
        tagged,
        surviving,
        groups,
        repairs: events,
        frames,
    }
}

/// The in-order executor: one channel, one utterance at a time.
#[derive(Debug, Clone)]
pub struct Pipeline {
    tag: TagStage,
    filter: FilterStage,
    chunk: ChunkStage,
    correct: CorrectStage,
    frame: FrameStage,
    tokens: Vec<Token>,
    tagged: Vec<TaggedWord>,
    events: Vec<RepairEvent>,
    groups: Vec<PhraseGroup>,
    last_position: Option<usize>,
}

impl Pipeline {
    pub fn new(channel: Channel, slot_config: SlotConfig) -> Self {
        Self {
            tag: TagStage::new(channel),
            filter: FilterStage::new(),
            chunk: ChunkStage::new(),
            correct: CorrectStage::new(),
            frame: FrameStage::new(slot_config),
            tokens: Vec::new(),
            tagged: Vec::new(),
            events: Vec::new(),
            groups: Vec::new(),
            last_position: None,
        }
    }

    pub fn channel(&self) -> &Channel {
        self.tag.channel()
    }

    /// Feeds one token through every stage and returns the hypotheses
    /// that finalized, sorted by position then stage.
    pub fn process_token(&mut self, token: Token) -> Result<Vec<Hypothesis>, ChunkError> {
        if let Some(last) = self.last_position {
            if token.position <= last {
                return Err(ChunkError::OutOfOrder {
                    last,
                    got: token.position,
                });
            }
        }
        self.last_position = Some(token.position);
        let position = token.position;
        let mut hypotheses = Vec::new();

        let word = self.tag.step(&token);
        self.tokens.push(token);
        self.tagged.push(word.clone());
        hypotheses.push(Hypothesis {
            position,
            stage: Stage::Tagged,
            payload: HypothesisPayload::Tagged(word.clone()),
        });

        let filtered = self.filter.step(word);
        let kept = matches!(filtered.verdict, FilterVerdict::Keep { .. });
        hypotheses.push(Hypothesis {
            position,
            stage: Stage::Filtered,
            payload: HypothesisPayload::Filtered { kept },
        });

        let chunked = self.chunk.step(filtered)?;
        let corrected = self.correct.step(chunked);
        hypotheses.extend(self.settle(corrected));

        hypotheses.sort_by_key(|h| (h.position, h.stage));
        Ok(hypotheses)
    }

    /// Turns one correction-stage result into events, hypotheses, and
    /// frame assignments.
    fn settle(&mut self, corrected: CorrectOutput) -> Vec<Hypothesis> {
        let mut hypotheses = Vec::new();
        if let Some(q) = corrected.retracted {
            hypotheses.push(Hypothesis {
                position: q,
                stage: Stage::Corrected,
                payload: HypothesisPayload::Corrected { kept: false },
            });
        }
        if let Some((first, last, ref label)) = corrected.finalized {
            for p in first..=last {
                hypotheses.push(Hypothesis {
                    position: p,
                    stage: Stage::Chunked,
                    payload: HypothesisPayload::Chunked {
                        span: (first, last),
                        label: label.clone(),
                    },
                });
            }
        }
        for event in &corrected.events {
            if event.kind == crate::correction::RepairKind::PhraseRepair {
                for p in event.removed_positions() {
                    hypotheses.push(Hypothesis {
                        position: p,
                        stage: Stage::Corrected,
                        payload: HypothesisPayload::Corrected { kept: false },
                    });
                }
            }
        }
        self.events.extend(corrected.events);
        if let Some(group) = corrected.released {
            for p in group.positions() {
                hypotheses.push(Hypothesis {
                    position: p,
                    stage: Stage::Corrected,
                    payload: HypothesisPayload::Corrected { kept: true },
                });
            }
            self.groups.push(group.clone());
            let (assignment, positions) = self.frame.step(group);
            for p in positions {
                hypotheses.push(Hypothesis {
                    position: p,
                    stage: Stage::Framed,
                    payload: HypothesisPayload::Framed(assignment.clone()),
                });
            }
        }
        hypotheses
    }

    /// Closes the utterance: finalizes open groups and frames, builds the
    /// interpretation, and resets every stage for the next utterance.
    pub fn flush(&mut self) -> UtteranceAnalysis {
        self.flush_with_hypotheses().0
    }

    /// Like [`flush`](Self::flush) but also returns the hypotheses that
    /// finalized during the close.
    pub fn flush_with_hypotheses(&mut self) -> (UtteranceAnalysis, Vec<Hypothesis>) {
        let mut hypotheses = Vec::new();
        if let Some(group) = self.chunk.flush() {
            let corrected = self.correct.step(ChunkOutput {
                finalized: Some(group),
                ..ChunkOutput::default()
            });
            hypotheses.extend(self.settle(corrected));
        }
        if let Some(group) = self.correct.flush() {
            let corrected = CorrectOutput {
                released: Some(group),
                ..CorrectOutput::default()
            };
            hypotheses.extend(self.settle(corrected));
        }
        let frames = self.frame.finish();

        let analysis = interpret(
            std::mem::take(&mut self.tokens),
            std::mem::take(&mut self.tagged),
            std::mem::take(&mut self.events),
            std::mem::take(&mut self.groups),
            frames,
        );

        self.tag.reset();
        self.filter.reset();
        self.chunk.reset();
        self.correct.reset();
        self.frame.reset();
        self.last_position = None;

        hypotheses.sort_by_key(|h| (h.position, h.stage));
        (analysis, hypotheses)
    }

    /// Feeds a whole utterance token by token and flushes.
    pub fn analyze(&mut self, tokens: &[Token]) -> Result<UtteranceAnalysis, ChunkError> {
        for token in tokens {
            self.process_token(token.clone())?;
        }
        Ok(self.flush())
    }
}

/// Whole-utterance batch analysis over the same channel: tags everything
/// first, then filters, chunks with the batch chunker, applies repairs,
/// and frames. An independent route to the same interpretation as the
/// incremental pipeline; the equivalence is asserted in tests.
pub fn analyze_batch(
    channel: &mut Channel,
    slot_config: &SlotConfig,
    tokens: &[Token],
) -> UtteranceAnalysis {
    channel.reset();
    let tagged: Vec<TaggedWord> = tokens.iter().map(|t| channel.tag_word(t)).collect();
    channel.reset();

    let mut events = Vec::new();
    let mut filtered: Vec<TaggedWord> = Vec::new();
    for word in &tagged {
        if let Some(event) = pause_error(word) {
            events.push(event);
        } else {
            filtered.push(word.clone());
        }
    }

    // word repairs over the filtered stream, left to right
    let mut killed: BTreeSet<usize> = BTreeSet::new();
    let mut last_survivor: Option<&TaggedWord> = None;
    for word in &filtered {
        if let Some(prev) = last_survivor {
            if let Some(event) = word_error(prev, word) {
                killed.insert(prev.position());
                events.push(event);
            }
        }
        last_survivor = Some(word);
    }

    // chunk with the victims still present (their arrival shaped the
    // boundaries), then drop them from their groups
    let mut groups: Vec<PhraseGroup> = Vec::new();
    for group in chunk(&filtered) {
        let words: Vec<TaggedWord> = group
            .words()
            .iter()
            .filter(|w| !killed.contains(&w.position()))
            .cloned()
            .collect();
        if !words.is_empty() {
            groups.push(PhraseGroup::new(words));
        }
    }

    let mut repair_state = PhraseRepairState::new();
    let mut released = Vec::new();
    for group in groups {
        let (event, passed) = repair_state.group_finalized(group);
        events.extend(event);
        released.extend(passed);
    }
    released.extend(repair_state.flush());

    let mut builder = FrameBuilder::new(slot_config.clone());
    for group in &released {
        builder.add(group.clone());
    }
    let frames = builder.finish();

    interpret(tokens.to_vec(), tagged, events, released, frames)
}
