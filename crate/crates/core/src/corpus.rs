//! Annotated corpora and the evaluation metrics.
//!
//! Corpus format: one token per line,
//! `surface<TAB>basic<TAB>abstract<TAB>start(0|1)[<TAB>keep(0|1)]`,
//! a blank line between utterances, `#` comments. Labels use the short
//! codes (`J A C D I M N R U V -` and `CG IG MG NG PG SG VG`). The
//! optional keep column marks the desired surviving tokens and feeds the
//! overall-interpretation rate.

use std::collections::BTreeSet;
use std::io::BufRead;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::caseframe::UtteranceAnalysis;
use crate::channel::Channel;
use crate::error::CorpusError;
use crate::inventory::CategoryInventory;
use crate::token::Token;

/// One annotated token; `line` is its source line for error reporting.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnnotatedToken {
    pub surface: String,
    pub basic: String,
    pub abstract_label: String,
    pub start: bool,
    pub keep: Option<bool>,
    pub line: usize,
}

/// One annotated utterance: gold labels per token, plus the desired
/// surviving set when every token carries a keep bit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnnotatedUtterance {
    pub tokens: Vec<AnnotatedToken>,
}

impl AnnotatedUtterance {
    /// Tokens rebuilt from the surfaces, positions 0-based.
    pub fn to_tokens(&self) -> Vec<Token> {
        self.tokens
            .iter()
            .enumerate()
            .map(|(i, t)| Token::new(&t.surface, i))
            .collect()
    }

    /// The desired surviving positions, when annotated.
    pub fn gold_surviving(&self) -> Option<BTreeSet<usize>> {
        if self.tokens.iter().all(|t| t.keep.is_some()) {
            Some(
                self.tokens
                    .iter()
                    .enumerate()
                    .filter(|(_, t)| t.keep == Some(true))
                    .map(|(i, _)| i)
                    .collect(),
            )
        } else {
            None
        }
    }
}

/// Loads a corpus file, validating labels against the syntactic
/// inventories.
pub fn load_corpus(path: &Path) -> Result<Vec<AnnotatedUtterance>, CorpusError> {
    let file = std::fs::File::open(path)?;
    read_corpus(
        std::io::BufReader::new(file),
        &CategoryInventory::basic_syntactic(),
        &CategoryInventory::abstract_syntactic(),
    )
}

pub fn read_corpus<R: BufRead>(
    reader: R,
    basic: &CategoryInventory,
    abstract_: &CategoryInventory,
) -> Result<Vec<AnnotatedUtterance>, CorpusError> {
    let mut utterances = Vec::new();
    let mut current: Vec<AnnotatedToken> = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let line = line?;
        let trimmed = line.trim();
        if trimmed.starts_with('#') {
            continue;
        }
        if trimmed.is_empty() {
            if !current.is_empty() {
                utterances.push(finish_utterance(std::mem::take(&mut current))?);
            }
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 4 && fields.len() != 5 {
            return Err(CorpusError::Malformed {
                line: line_no,
                msg: format!(
                    "expected `surface<TAB>basic<TAB>abstract<TAB>start[<TAB>keep]`, got {} fields",
                    fields.len()
                ),
            });
        }
        let surface = fields[0].trim();
        if surface.is_empty() {
            return Err(CorpusError::Malformed {
                line: line_no,
                msg: "empty surface".to_string(),
            });
        }
        if basic.resolve(fields[1].trim()).is_none() {
            return Err(CorpusError::UnknownLabel {
                line: line_no,
                task: "basic",
                label: fields[1].trim().to_string(),
            });
        }
        if abstract_.resolve(fields[2].trim()).is_none() {
            return Err(CorpusError::UnknownLabel {
                line: line_no,
                task: "abstract",
                label: fields[2].trim().to_string(),
            });
        }
        let bit = |s: &str, what: &str| -> Result<bool, CorpusError> {
            match s.trim() {
                "0" => Ok(false),
                "1" => Ok(true),
                other => Err(CorpusError::Malformed {
                    line: line_no,
                    msg: format!("{what} must be 0 or 1, got {other:?}"),
                }),
            }
        };
        let start = bit(fields[3], "start")?;
        let keep = match fields.get(4) {
            Some(s) => Some(bit(s, "keep")?),
            None => None,
        };
        current.push(AnnotatedToken {
            surface: surface.to_string(),
            basic: fields[1].trim().to_string(),
            abstract_label: fields[2].trim().to_string(),
            start,
            keep,
            line: line_no,
        });
    }
    if !current.is_empty() {
        utterances.push(finish_utterance(current)?);
    }
    Ok(utterances)
}

fn finish_utterance(tokens: Vec<AnnotatedToken>) -> Result<AnnotatedUtterance, CorpusError> {
    let with_keep = tokens.iter().filter(|t| t.keep.is_some()).count();
    if with_keep != 0 && with_keep != tokens.len() {
        let line = tokens
            .iter()
            .find(|t| t.keep.is_none())
            .map(|t| t.line)
            .unwrap_or(0);
        return Err(CorpusError::PartialKeepColumn { line });
    }
    Ok(AnnotatedUtterance { tokens })
}

/// A correct/total pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ratio {
    pub correct: usize,
    pub total: usize,
}

impl Ratio {
    pub fn percent(&self) -> f64 {
        if self.total == 0 {
            0.0
        } else {
            100.0 * self.correct as f64 / self.total as f64
        }
    }
}

/// Per-model argmax accuracies plus the combined measure: a word counts
/// as combined-correct only when the disambiguator and the abstractor
/// are both argmax-correct on it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Metrics {
    pub basic: Ratio,
    pub abstract_: Ratio,
    pub start: Ratio,
    pub combined: Ratio,
}

/// Evaluates a trained channel in inference mode over a corpus. The
/// channel is untouched: evaluation runs on a copy. The starter counts
/// every word, correct when the thresholded bit matches gold.
pub fn evaluate(channel: &Channel, corpus: &[AnnotatedUtterance]) -> Metrics {
    let mut channel = channel.clone();
    let mut basic = Ratio { correct: 0, total: 0 };
    let mut abstract_ = Ratio { correct: 0, total: 0 };
    let mut start = Ratio { correct: 0, total: 0 };
    let mut combined = Ratio { correct: 0, total: 0 };
    for utterance in corpus {
        channel.reset();
        for (tok, gold) in utterance.to_tokens().iter().zip(&utterance.tokens) {
            let word = channel.tag_word(tok);
            let basic_ok = word.basic == gold.basic;
            let abstract_ok = word.abstract_label == gold.abstract_label;
            basic.total += 1;
            abstract_.total += 1;
            start.total += 1;
            combined.total += 1;
            basic.correct += basic_ok as usize;
            abstract_.correct += abstract_ok as usize;
            start.correct += (word.phrase_start == gold.start) as usize;
            combined.correct += (basic_ok && abstract_ok) as usize;
        }
    }
    channel.reset();
    // conjunction of per-word events: combined can never beat either part
    assert!(combined.correct <= basic.correct.min(abstract_.correct));
    Metrics {
        basic,
        abstract_,
        start,
        combined,
    }
}

/// Overall-interpretation score: utterances whose computed surviving set
/// equals the gold one / utterances carrying gold, plus the skipped count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct InterpretationRate {
    pub matched: usize,
    pub scored: usize,
    pub skipped: usize,
}

impl InterpretationRate {
    pub fn percent(&self) -> f64 {
        if self.scored == 0 {
            0.0
        } else {
            100.0 * self.matched as f64 / self.scored as f64
        }
    }
}

/// Fraction of utterances whose computed surviving-token set exactly
/// equals the gold set. Utterances without gold are skipped and tallied
/// separately; a corpus with no gold at all is an error.
pub fn overall_interpretation_rate(
    analyses: &[UtteranceAnalysis],
    corpus: &[AnnotatedUtterance],
) -> Result<InterpretationRate, CorpusError> {
    if corpus.is_empty() {
        return Err(CorpusError::Empty);
    }
    let mut rate = InterpretationRate {
        matched: 0,
        scored: 0,
        skipped: 0,
    };
    for (analysis, utterance) in analyses.iter().zip(corpus) {
        match utterance.gold_surviving() {
            Some(gold) => {
                rate.scored += 1;
                if analysis.surviving == gold {
                    rate.matched += 1;
                }
            }
            None => rate.skipped += 1,
        }
    }
    if rate.scored == 0 {
        return Err(CorpusError::NoGoldSurvivors);
    }
    Ok(rate)
}
