//! Flat phrase grouping: maximal runs of adjacent words that share an
//! abstract category. A new group opens at the first word of the stream,
//! at every word flagged as a phrase start, and at every change of
//! abstract label — a label change forces a boundary even when the
//! starter stayed silent, so no group ever mixes labels.

use serde::{Deserialize, Serialize};

use crate::channel::TaggedWord;
use crate::error::ChunkError;

/// A flat chunk of contiguous tagged words. The group's label and
/// lexical start are those of its first word.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhraseGroup {
    words: Vec<TaggedWord>,
}

impl PhraseGroup {
    /// Builds a group from a non-empty word list.
    pub fn new(words: Vec<TaggedWord>) -> Self {
        assert!(!words.is_empty(), "a phrase group has at least one word");
        Self { words }
    }

    pub fn words(&self) -> &[TaggedWord] {
        &self.words
    }

    /// Abstract category code of the group (its first word's label).
    pub fn label(&self) -> &str {
        &self.words[0].abstract_label
    }

    /// Case-folded surface of the first word; what the phrase-level
    /// equality detector compares.
    pub fn lexical_start(&self) -> String {
        self.words[0].folded_surface()
    }

    /// Inclusive `(first, last)` token positions.
    pub fn span(&self) -> (usize, usize) {
        (
            self.words[0].position(),
            self.words[self.words.len() - 1].position(),
        )
    }

    pub fn positions(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().map(|w| w.position())
    }
}

/// True when `word` opens a new group after `current` (the open group's
/// first word's label).
fn opens_new_group(current_label: &str, word: &TaggedWord) -> bool {
    word.phrase_start || word.abstract_label != current_label
}

/// Splits a tagged word stream into phrase groups in one pass.
/// Concatenating the groups restores the input order.
pub fn chunk(tagged: &[TaggedWord]) -> Vec<PhraseGroup> {
    let mut groups = Vec::new();
    let mut open: Vec<TaggedWord> = Vec::new();
    for word in tagged {
        if !open.is_empty() && opens_new_group(&open[0].abstract_label, word) {
            groups.push(PhraseGroup::new(std::mem::take(&mut open)));
        }
        open.push(word.clone());
    }
    if !open.is_empty() {
        groups.push(PhraseGroup::new(open));
    }
    groups
}

/// Streaming chunker. A group is finalized exactly when its successor
/// opens, or at the explicit flush when the utterance ends.
#[derive(Debug, Clone, Default)]
pub struct IncrementalChunker {
    open: Vec<TaggedWord>,
    last_position: Option<usize>,
}

impl IncrementalChunker {
    pub fn new() -> Self {
        Self::default()
    }

    /// Accepts the next word; returns the group it closed, if any.
    pub fn push(&mut self, word: TaggedWord) -> Result<Option<PhraseGroup>, ChunkError> {
        if let Some(last) = self.last_position {
            if word.position() <= last {
                return Err(ChunkError::OutOfOrder {
                    last,
                    got: word.position(),
                });
            }
        }
        self.last_position = Some(word.position());
        let finalized = if !self.open.is_empty() && opens_new_group(&self.open[0].abstract_label, &word)
        {
            Some(PhraseGroup::new(std::mem::take(&mut self.open)))
        } else {
            None
        };
        self.open.push(word);
        Ok(finalized)
    }

    /// Removes the most recently pushed word from the open group; used
    /// when a word-level repair drops it. Returns the retracted word.
    /// Finalized groups are immutable and never affected.
    pub fn retract_last(&mut self) -> Option<TaggedWord> {
        self.open.pop()
    }

    /// Words currently in the open group.
    pub fn open_len(&self) -> usize {
        self.open.len()
    }

    /// Closes the utterance: finalizes the open group and clears state.
    pub fn flush(&mut self) -> Option<PhraseGroup> {
        self.last_position = None;
        if self.open.is_empty() {
            None
        } else {
            Some(PhraseGroup::new(std::mem::take(&mut self.open)))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    use crate::token::Token;

    /// Bare tagged word for rule-level tests; activations are dummies
    /// consistent with the chosen labels.
    pub(crate) fn tagged(
        surface: &str,
        position: usize,
        basic: &str,
        abstract_label: &str,
        start: bool,
    ) -> TaggedWord {
        TaggedWord {
            token: Token::new(surface, position),
            basic: basic.to_string(),
            basic_activations: Vec::new(),
            abstract_label: abstract_label.to_string(),
            abstract_activations: Vec::new(),
            phrase_start: start,
            start_activation: if start { 0.9 } else { 0.1 },
        }
    }

    fn fig3_stream() -> Vec<TaggedWord> {
        // tags and starts as in the straightforward sample parse
        let rows: &[(&str, &str, &str, bool)] = &[
            ("Yeah", "A", "MG", true),
            ("I", "U", "NG", true),
            ("need", "V", "VG", true),
            ("a", "D", "NG", true),
            ("train", "N", "NG", false),
            ("from", "R", "PG", true),
            ("Regensburg", "N", "PG", false),
            ("to", "R", "PG", true),
            ("Dortmund", "N", "PG", false),
            ("via", "R", "PG", true),
            ("Koeln", "N", "PG", false),
        ];
        rows.iter()
            .enumerate()
            .map(|(i, (s, b, a, st))| tagged(s, i, b, a, *st))
            .collect()
    }

    #[test]
    fn sample_stream_chunks_into_expected_groups() {
        let groups = chunk(&fig3_stream());
        let rendered: Vec<(String, Vec<&str>)> = groups
            .iter()
            .map(|g| {
                (
                    g.label().to_string(),
                    g.words().iter().map(|w| w.token.surface.as_str()).collect(),
                )
            })
            .collect();
        assert_eq!(
            rendered,
            vec![
                ("MG".to_string(), vec!["Yeah"]),
                ("NG".to_string(), vec!["I"]),
                ("VG".to_string(), vec!["need"]),
                ("NG".to_string(), vec!["a", "train"]),
                ("PG".to_string(), vec!["from", "Regensburg"]),
                ("PG".to_string(), vec!["to", "Dortmund"]),
                ("PG".to_string(), vec!["via", "Koeln"]),
            ]
        );
    }

    #[test]
    fn single_word_is_one_group() {
        let groups = chunk(&[tagged("train", 0, "N", "NG", false)]);
        assert_eq!(groups.len(), 1);
        assert_eq!(groups[0].span(), (0, 0));
    }

    #[test]
    fn empty_input_is_empty_output() {
        assert!(chunk(&[]).is_empty());
        assert!(IncrementalChunker::new().flush().is_none());
    }

    #[test]
    fn label_change_forces_a_boundary_without_a_start_flag() {
        let groups = chunk(&[
            tagged("a", 0, "D", "NG", true),
            tagged("train", 1, "N", "NG", false),
            tagged("leaves", 2, "V", "VG", false),
        ]);
        assert_eq!(groups.len(), 2);
        assert_eq!(groups[1].label(), "VG");
    }

    #[test]
    fn incremental_rejects_out_of_order_positions() {
        let mut inc = IncrementalChunker::new();
        inc.push(tagged("a", 3, "D", "NG", true)).unwrap();
        let err = inc.push(tagged("b", 3, "N", "NG", false)).unwrap_err();
        assert_eq!(err, ChunkError::OutOfOrder { last: 3, got: 3 });
    }

    #[test]
    fn incremental_finalizes_when_the_successor_opens() {
        let mut inc = IncrementalChunker::new();
        let words = fig3_stream();
        assert!(inc.push(words[0].clone()).unwrap().is_none());
        // "I" opens a new group, closing the one for "Yeah" immediately
        let closed = inc.push(words[1].clone()).unwrap().unwrap();
        assert_eq!(closed.words()[0].token.surface, "Yeah");
    }

    /// Brute-force oracle: mark every boundary index, then slice.
    fn chunk_oracle(tagged: &[TaggedWord]) -> Vec<Vec<usize>> {
        if tagged.is_empty() {
            return Vec::new();
        }
        let mut boundaries = vec![0];
        for i in 1..tagged.len() {
            // scan back to this group's first word
            let start = *boundaries.last().unwrap();
            if tagged[i].phrase_start || tagged[i].abstract_label != tagged[start].abstract_label {
                boundaries.push(i);
            }
        }
        boundaries.push(tagged.len());
        boundaries
            .windows(2)
            .map(|w| (w[0]..w[1]).collect())
            .collect()
    }

    fn arb_stream(max_len: usize) -> impl Strategy<Value = Vec<TaggedWord>> {
        proptest::collection::vec((0usize..3, proptest::bool::ANY), 0..=max_len).prop_map(
            |specs| {
                let labels = ["NG", "PG", "VG"];
                specs
                    .into_iter()
                    .enumerate()
                    .map(|(i, (lab, start))| tagged(&format!("w{i}"), i, "N", labels[lab], start))
                    .collect()
            },
        )
    }

    proptest! {
        // batch chunking equals the boundary-scanning oracle
        #[test]
        fn chunk_matches_oracle(stream in arb_stream(8)) {
            let got: Vec<Vec<usize>> = chunk(&stream)
                .iter()
                .map(|g| g.positions().collect())
                .collect();
            prop_assert_eq!(got, chunk_oracle(&stream));
        }

        // incremental chunking equals batch chunking
        #[test]
        fn incremental_equals_batch(stream in arb_stream(64)) {
            let mut inc = IncrementalChunker::new();
            let mut groups = Vec::new();
            for w in &stream {
                if let Some(g) = inc.push(w.clone()).unwrap() {
                    groups.push(g);
                }
            }
            if let Some(g) = inc.flush() {
                groups.push(g);
            }
            prop_assert_eq!(groups, chunk(&stream));
        }

        // groups partition the input: non-overlapping, exhaustive, ordered
        #[test]
        fn groups_partition_the_stream(stream in arb_stream(32)) {
            let groups = chunk(&stream);
            let concat: Vec<usize> = groups.iter().flat_map(|g| g.positions()).collect();
            let expected: Vec<usize> = stream.iter().map(|w| w.position()).collect();
            prop_assert_eq!(concat, expected);
            for g in &groups {
                prop_assert_eq!(g.label(), &g.words()[0].abstract_label);
            }
        }
    }
}
