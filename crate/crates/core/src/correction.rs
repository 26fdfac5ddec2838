//! Disfluency detectors and error modules: pause/interjection deletion,
//! word-level repetition repair, and phrase-level repair.
//!
//! Corrections only ever remove tokens; the surviving sequence is a
//! subsequence of the input. A repair keeps the later occurrence and
//! drops the earlier material. Phrase repair requires both detector
//! conditions — equal abstract category AND equal lexical start — on two
//! directly adjacent surviving groups; either condition alone is too
//! weak.

use serde::{Deserialize, Serialize};

use crate::channel::TaggedWord;
use crate::chunker::PhraseGroup;
use crate::inventory::INTERJECTION;
use crate::token::Token;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RepairKind {
    PauseDeletion,
    WordRepair,
    PhraseRepair,
}

/// One applied correction: the removed token span, the replacing span
/// for repairs, and the detectors whose evidence fired it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RepairEvent {
    pub kind: RepairKind,
    /// Inclusive `(first, last)` positions of the removed tokens.
    pub removed_span: (usize, usize),
    /// Inclusive span of the kept material; none for deletions.
    pub kept_span: Option<(usize, usize)>,
    pub evidence: Vec<String>,
}

impl RepairEvent {
    pub fn removed_positions(&self) -> impl Iterator<Item = usize> {
        self.removed_span.0..=self.removed_span.1
    }
}

/// Pause detector: fires on the bare `.` marker, never on words or noise.
pub fn is_pause(token: &Token) -> bool {
    token.is_pause_marker()
}

/// Interjection detector: fires on bracketed vocal noise by shape alone
/// (whatever the tagger said about it), and on words the tagger labeled
/// as interjections.
pub fn is_interjection(word: &TaggedWord) -> bool {
    word.token.is_bracketed() || word.basic == INTERJECTION
}

/// Sub-word error module: deletes pauses, interjections, and unknown
/// phonetic input. Returns the deletion event, or none for a normal word.
pub fn pause_error(word: &TaggedWord) -> Option<RepairEvent> {
    let mut evidence = Vec::new();
    if is_pause(&word.token) {
        evidence.push("pause".to_string());
    }
    if is_interjection(word) {
        evidence.push("interjection".to_string());
    }
    if evidence.is_empty() {
        return None;
    }
    let p = word.position();
    Some(RepairEvent {
        kind: RepairKind::PauseDeletion,
        removed_span: (p, p),
        kept_span: None,
        evidence,
    })
}

/// Lexical word equality: case-folded surface comparison.
pub fn word_equal_lex(prev: &TaggedWord, cur: &TaggedWord) -> bool {
    prev.folded_surface() == cur.folded_surface()
}

/// Basic-category word equality.
pub fn word_equal_bas(prev: &TaggedWord, cur: &TaggedWord) -> bool {
    prev.basic == cur.basic
}

/// Word-level error module over two adjacent survivors of pause
/// filtering. A repair fires only on lexical equality — category
/// equality alone would misfire on every `from ... to ...` pattern —
/// and drops the earlier word.
pub fn word_error(prev: &TaggedWord, cur: &TaggedWord) -> Option<RepairEvent> {
    if !word_equal_lex(prev, cur) {
        return None;
    }
    let mut evidence = vec!["lex-word-eq".to_string()];
    if word_equal_bas(prev, cur) {
        evidence.push("bas-syn-eq".to_string());
    }
    let p = prev.position();
    Some(RepairEvent {
        kind: RepairKind::WordRepair,
        removed_span: (p, p),
        kept_span: Some((cur.position(), cur.position())),
        evidence,
    })
}

/// Phrase-start lexical equality: compares the first word of each group,
/// case-folded.
pub fn lexical_start_equal(prev: &PhraseGroup, cur: &PhraseGroup) -> bool {
    prev.lexical_start() == cur.lexical_start()
}

/// Abstract category equality of two phrase groups.
pub fn abstract_equal(prev: &PhraseGroup, cur: &PhraseGroup) -> bool {
    prev.label() == cur.label()
}

/// Phrase-level error module over two directly adjacent surviving
/// groups. Fires only when both the abstract categories and the lexical
/// starts are equal; the earlier group is dropped entirely.
pub fn phrase_error(prev: &PhraseGroup, cur: &PhraseGroup) -> Option<RepairEvent> {
    if !(abstract_equal(prev, cur) && lexical_start_equal(prev, cur)) {
        return None;
    }
    Some(RepairEvent {
        kind: RepairKind::PhraseRepair,
        removed_span: prev.span(),
        kept_span: Some(cur.span()),
        evidence: vec!["abs-syn-eq".to_string(), "lex-start-eq".to_string()],
    })
}

/// Phrase-level repair state: holds the most recent finalized group
/// until its successor finalizes and the repair comparison can run.
/// Cascades are handled pairwise left to right.
#[derive(Debug, Clone, Default)]
pub struct PhraseRepairState {
    held: Option<PhraseGroup>,
}

impl PhraseRepairState {
    pub fn new() -> Self {
        Self::default()
    }

    /// Accepts a newly finalized group. When it repairs the held group,
    /// the event is returned and the held group is discarded; otherwise
    /// the held group is released as confirmed surviving.
    pub fn group_finalized(
        &mut self,
        group: PhraseGroup,
    ) -> (Option<RepairEvent>, Option<PhraseGroup>) {
        let (event, released) = match self.held.take() {
            Some(prev) => match phrase_error(&prev, &group) {
                Some(event) => (Some(event), None),
                None => (None, Some(prev)),
            },
            None => (None, None),
        };
        self.held = Some(group);
        (event, released)
    }

    /// Utterance end: releases the held group.
    pub fn flush(&mut self) -> Option<PhraseGroup> {
        self.held.take()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn tagged(surface: &str, position: usize, basic: &str, abstract_label: &str) -> TaggedWord {
        TaggedWord {
            token: Token::new(surface, position),
            basic: basic.to_string(),
            basic_activations: Vec::new(),
            abstract_label: abstract_label.to_string(),
            abstract_activations: Vec::new(),
            phrase_start: true,
            start_activation: 0.9,
        }
    }

    fn group(words: &[(&str, &str)], first_pos: usize) -> PhraseGroup {
        PhraseGroup::new(
            words
                .iter()
                .enumerate()
                .map(|(i, (s, a))| tagged(s, first_pos + i, "N", a))
                .collect(),
        )
    }

    #[test]
    fn pause_detector_examples() {
        assert!(is_pause(&Token::new(".", 0)));
        assert!(!is_pause(&Token::new("train", 0)));
        // an interjection is not a pause
        assert!(!is_pause(&Token::new("[eh]", 0)));
    }

    #[test]
    fn interjection_detector_examples() {
        assert!(is_interjection(&tagged("[eh]", 0, "I", "IG")));
        // bracketed shape fires even when the tagger mislabeled it
        assert!(is_interjection(&tagged("[u]", 0, "A", "SG")));
        assert!(!is_interjection(&tagged("Yeah", 0, "A", "MG")));
        // an unbracketed word the tagger called an interjection
        assert!(is_interjection(&tagged("eh", 0, "I", "IG")));
    }

    #[test]
    fn pause_error_fires_per_token() {
        assert!(pause_error(&tagged(".", 3, "-", "IG")).is_some());
        assert!(pause_error(&tagged("[mm]", 4, "I", "IG")).is_some());
        assert!(pause_error(&tagged("train", 5, "N", "NG")).is_none());
        // consecutive pauses produce one event each
        let a = pause_error(&tagged(".", 6, "-", "IG")).unwrap();
        let b = pause_error(&tagged(".", 7, "-", "IG")).unwrap();
        assert_eq!(a.removed_span, (6, 6));
        assert_eq!(b.removed_span, (7, 7));
        assert_eq!(a.kept_span, None);
    }

    #[test]
    fn pause_error_ignores_tagger_output_for_marked_tokens() {
        // same token, arbitrary tags: the verdict never changes
        for basic in ["A", "N", "V", "I", "-"] {
            assert!(pause_error(&tagged("[u]", 0, basic, "SG")).is_some());
            assert!(pause_error(&tagged(".", 1, basic, "PG")).is_some());
        }
    }

    #[test]
    fn word_equality_detectors() {
        let monday1 = tagged("Monday", 0, "N", "PG");
        let monday2 = tagged("monday", 1, "N", "PG");
        assert!(word_equal_lex(&monday1, &monday2));

        let from = tagged("from", 0, "R", "PG");
        let to = tagged("to", 1, "R", "PG");
        assert!(!word_equal_lex(&from, &to));
        assert!(word_equal_bas(&from, &to));

        let train = tagged("train", 0, "N", "NG");
        let regensburg = tagged("Regensburg", 1, "N", "PG");
        assert!(!word_equal_lex(&train, &regensburg));
        assert!(word_equal_bas(&train, &regensburg));
    }

    #[test]
    fn word_error_requires_lexical_equality() {
        let the1 = tagged("the", 0, "D", "NG");
        let the2 = tagged("the", 1, "D", "NG");
        let ev = word_error(&the1, &the2).unwrap();
        assert_eq!(ev.kind, RepairKind::WordRepair);
        // the earlier word is dropped
        assert_eq!(ev.removed_span, (0, 0));
        assert_eq!(ev.kept_span, Some((1, 1)));
        assert!(ev.evidence.contains(&"lex-word-eq".to_string()));

        // repeated basic categories alone never trigger
        let from = tagged("from", 0, "R", "PG");
        let to = tagged("to", 1, "R", "PG");
        assert!(word_error(&from, &to).is_none());

        // "at Monday at Monday": the word level sees Monday/at, unequal
        let monday = tagged("Monday", 1, "N", "PG");
        let at = tagged("at", 2, "R", "PG");
        assert!(word_error(&monday, &at).is_none());
    }

    #[test]
    fn phrase_error_requires_both_conditions() {
        let first = group(&[("at", "PG"), ("Monday", "PG")], 0);
        let second = group(&[("at", "PG"), ("Monday", "PG")], 5);
        let ev = phrase_error(&first, &second).unwrap();
        assert_eq!(ev.kind, RepairKind::PhraseRepair);
        assert_eq!(ev.removed_span, (0, 1));
        assert_eq!(ev.kept_span, Some((5, 6)));

        // same category, different start: no repair
        let from_r = group(&[("from", "PG"), ("Regensburg", "PG")], 0);
        let to_d = group(&[("to", "PG"), ("Dortmund", "PG")], 2);
        assert!(phrase_error(&from_r, &to_d).is_none());

        // same start, different category: no repair
        let at_ng = group(&[("at", "NG")], 0);
        let at_pg = group(&[("at", "PG")], 1);
        assert!(phrase_error(&at_ng, &at_pg).is_none());
    }

    #[test]
    fn phrase_repair_state_handles_adjacency_and_cascades() {
        // "not after . not before nine": the special-group "not" sits
        // between the two prepositional groups, so nothing fires
        let mut state = PhraseRepairState::new();
        let groups = vec![
            group(&[("not", "SG")], 0),
            group(&[("after", "PG")], 1),
            group(&[("not", "SG")], 3),
            group(&[("before", "PG"), ("nine", "PG")], 4),
        ];
        let mut events = Vec::new();
        let mut released = Vec::new();
        for g in groups {
            let (ev, rel) = state.group_finalized(g);
            events.extend(ev);
            released.extend(rel);
        }
        released.extend(state.flush());
        assert!(events.is_empty());
        assert_eq!(released.len(), 4);

        // a cascade resolves pairwise left to right, keeping the last
        let mut state = PhraseRepairState::new();
        let mut events = Vec::new();
        let mut released = Vec::new();
        for g in [
            group(&[("at", "PG"), ("Monday", "PG")], 0),
            group(&[("at", "PG"), ("Tuesday", "PG")], 2),
            group(&[("at", "PG"), ("Friday", "PG")], 4),
        ] {
            let (ev, rel) = state.group_finalized(g);
            events.extend(ev);
            released.extend(rel);
        }
        released.extend(state.flush());
        assert_eq!(events.len(), 2);
        assert_eq!(released.len(), 1);
        assert_eq!(released[0].span(), (4, 5));
    }

    proptest! {
        // a fired phrase repair implies both detector conditions held
        #[test]
        fn phrase_repair_implies_both_detectors(
            label_a in 0usize..3, label_b in 0usize..3,
            start_a in 0usize..3, start_b in 0usize..3,
        ) {
            let labels = ["NG", "PG", "VG"];
            let starts = ["at", "from", "to"];
            let a = group(&[(starts[start_a], labels[label_a])], 0);
            let b = group(&[(starts[start_b], labels[label_b])], 1);
            if phrase_error(&a, &b).is_some() {
                prop_assert!(abstract_equal(&a, &b));
                prop_assert!(lexical_start_equal(&a, &b));
            }
        }
    }
}
