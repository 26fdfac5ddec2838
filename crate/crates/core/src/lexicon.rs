//! Surface-form lexicon: candidate basic categories per word, and the
//! binary input encodings the networks consume.
//!
//! Lookup is total. Pause markers and bracketed noise resolve by token
//! shape alone, known words by their stored candidate set, and unknown
//! words by the open-class fallback (noun, verb, adjective, adverb):
//! closed-class words are enumerable, so an out-of-lexicon word is
//! overwhelmingly open-class.

use std::collections::{BTreeSet, HashMap};
use std::io::BufRead;
use std::path::Path;

use crate::error::LexiconError;
use crate::inventory::{CategoryInventory, INTERJECTION, PAUSE};

/// Candidate basic categories for one surface form, as inventory codes.
pub type CandidateSet = BTreeSet<String>;

/// Maps case-folded surfaces to candidate basic-category sets.
/// Read-only after load; safe to share across readers.
#[derive(Debug, Clone)]
pub struct Lexicon {
    entries: HashMap<String, CandidateSet>,
    inventory: CategoryInventory,
    fallback: CandidateSet,
}

impl Lexicon {
    /// An empty lexicon over the given basic inventory. Every word
    /// resolves through the fallback until entries are added.
    pub fn new(inventory: CategoryInventory) -> Self {
        let fallback = ["Noun", "Verb", "Adjective", "Adverb"]
            .iter()
            .filter_map(|name| inventory.resolve(name))
            .map(|i| inventory.code(i).to_string())
            .collect::<CandidateSet>();
        let fallback = if fallback.is_empty() {
            // inventory without open-class names: fall back to everything
            inventory
                .labels()
                .iter()
                .map(|l| l.code.clone())
                .collect()
        } else {
            fallback
        };
        Self {
            entries: HashMap::new(),
            inventory,
            fallback,
        }
    }

    /// Adds an entry; candidates may be codes or full names. Repeated
    /// surfaces merge their candidate sets.
    pub fn insert(&mut self, surface: &str, candidates: &[&str]) -> Result<(), LexiconError> {
        let mut set = CandidateSet::new();
        for label in candidates {
            let idx = self
                .inventory
                .resolve(label)
                .ok_or_else(|| LexiconError::LabelNotInInventory {
                    label: label.to_string(),
                })?;
            set.insert(self.inventory.code(idx).to_string());
        }
        self.entries
            .entry(surface.to_lowercase())
            .or_default()
            .extend(set);
        Ok(())
    }

    /// Loads the line-oriented lexicon format: `surface<TAB>label[,label...]`,
    /// `#` starts a comment, UTF-8 throughout.
    pub fn load(path: &Path, inventory: CategoryInventory) -> Result<Self, LexiconError> {
        let file = std::fs::File::open(path)?;
        Self::read(std::io::BufReader::new(file), inventory)
    }

    pub fn read<R: BufRead>(
        reader: R,
        inventory: CategoryInventory,
    ) -> Result<Self, LexiconError> {
        let mut lexicon = Self::new(inventory);
        for (i, line) in reader.lines().enumerate() {
            let line_no = i + 1;
            let line = line?;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (surface, labels) =
                line.split_once('\t')
                    .ok_or_else(|| LexiconError::Malformed {
                        line: line_no,
                        msg: "expected `surface<TAB>label[,label...]`".to_string(),
                    })?;
            let labels: Vec<&str> = labels.split(',').map(str::trim).collect();
            if surface.is_empty() || labels.iter().any(|l| l.is_empty()) {
                return Err(LexiconError::Malformed {
                    line: line_no,
                    msg: "empty surface or label".to_string(),
                });
            }
            lexicon
                .insert(surface, &labels)
                .map_err(|e| match e {
                    LexiconError::LabelNotInInventory { label } => LexiconError::UnknownLabel {
                        line: line_no,
                        label,
                    },
                    other => other,
                })?;
        }
        Ok(lexicon)
    }

    pub fn inventory(&self) -> &CategoryInventory {
        &self.inventory
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Candidate basic categories for a surface form. Total: a pause
    /// marker yields the pause category, bracketed noise the interjection
    /// category, an unknown word the open-class fallback.
    pub fn lookup(&self, surface: &str) -> CandidateSet {
        if surface == "." {
            if let Some(idx) = self.inventory.resolve(PAUSE) {
                return std::iter::once(self.inventory.code(idx).to_string()).collect();
            }
        } else if surface.len() >= 2 && surface.starts_with('[') && surface.ends_with(']') {
            if let Some(idx) = self.inventory.resolve(INTERJECTION) {
                return std::iter::once(self.inventory.code(idx).to_string()).collect();
            }
        }
        self.entries
            .get(&surface.to_lowercase())
            .cloned()
            .unwrap_or_else(|| self.fallback.clone())
    }
}

/// Encodes a candidate set as a binary vector of the inventory's network
/// width: component `i` is 1 exactly when `labels[i]` is a candidate;
/// padding components stay 0.
pub fn encode_candidates(
    candidates: &CandidateSet,
    inventory: &CategoryInventory,
) -> Result<Vec<f64>, LexiconError> {
    let mut v = vec![0.0; inventory.width()];
    for label in candidates {
        let idx = inventory
            .resolve(label)
            .ok_or_else(|| LexiconError::LabelNotInInventory {
                label: label.clone(),
            })?;
        v[idx] = 1.0;
    }
    Ok(v)
}

/// Decodes the set bits of an encoding back into label codes.
pub fn decode_candidates(encoding: &[f64], inventory: &CategoryInventory) -> CandidateSet {
    encoding
        .iter()
        .take(inventory.len())
        .enumerate()
        .filter(|(_, &v)| v != 0.0)
        .map(|(i, _)| inventory.code(i).to_string())
        .collect()
}

/// One-hot encoding of a single label index at the inventory width.
pub fn one_hot(index: usize, inventory: &CategoryInventory) -> Vec<f64> {
    let mut v = vec![0.0; inventory.width()];
    v[index] = 1.0;
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sample_lexicon() -> Lexicon {
        let mut lex = Lexicon::new(CategoryInventory::basic_syntactic());
        lex.insert("train", &["N"]).unwrap();
        lex.insert("morning", &["Adverb", "Noun"]).unwrap();
        lex.insert("from", &["R"]).unwrap();
        lex
    }

    #[test]
    fn lookup_known_word() {
        let lex = sample_lexicon();
        assert_eq!(lex.lookup("train"), ["N".to_string()].into());
        // case-folded key, surface case irrelevant
        assert_eq!(lex.lookup("Train"), ["N".to_string()].into());
    }

    #[test]
    fn lookup_pause_and_bracketed() {
        let lex = sample_lexicon();
        assert_eq!(lex.lookup("."), ["-".to_string()].into());
        assert_eq!(lex.lookup("[eh]"), ["I".to_string()].into());
        // bracketed shape wins even if an entry exists
        let mut lex = sample_lexicon();
        lex.insert("[eh]", &["I"]).unwrap();
        assert_eq!(lex.lookup("[eh]"), ["I".to_string()].into());
    }

    #[test]
    fn lookup_ambiguous_word() {
        let lex = sample_lexicon();
        assert_eq!(
            lex.lookup("morning"),
            ["A".to_string(), "N".to_string()].into()
        );
    }

    #[test]
    fn lookup_unknown_word_falls_back_to_open_class() {
        let lex = sample_lexicon();
        assert_eq!(
            lex.lookup("xyzzy"),
            ["N", "V", "J", "A"].map(String::from).into()
        );
    }

    #[test]
    fn encode_examples() {
        let inv = CategoryInventory::basic_syntactic();
        let noun: CandidateSet = ["N".to_string()].into();
        let v = encode_candidates(&noun, &inv).unwrap();
        assert_eq!(v.len(), 13);
        assert_eq!(v.iter().sum::<f64>(), 1.0);
        assert_eq!(v[inv.resolve("N").unwrap()], 1.0);

        let two: CandidateSet = ["A".to_string(), "N".to_string()].into();
        let v = encode_candidates(&two, &inv).unwrap();
        assert_eq!(v.iter().sum::<f64>(), 2.0);

        let all: CandidateSet = inv.labels().iter().map(|l| l.code.clone()).collect();
        let v = encode_candidates(&all, &inv).unwrap();
        assert!(v[..11].iter().all(|&x| x == 1.0));
        assert!(v[11..].iter().all(|&x| x == 0.0));
    }

    #[test]
    fn encode_rejects_unknown_label() {
        let inv = CategoryInventory::basic_syntactic();
        let bad: CandidateSet = ["Q".to_string()].into();
        assert!(encode_candidates(&bad, &inv).is_err());
    }

    #[test]
    fn load_parses_comments_and_reports_bad_lines() {
        let inv = CategoryInventory::basic_syntactic();
        let text = "# comment\ntrain\tN\nmorning\tA,N\n";
        let lex = Lexicon::read(text.as_bytes(), inv.clone()).unwrap();
        assert_eq!(lex.len(), 2);

        let err = Lexicon::read("train N no tab\n".as_bytes(), inv.clone()).unwrap_err();
        assert!(matches!(err, LexiconError::Malformed { line: 1, .. }));

        let err = Lexicon::read("ok\tN\nbad\tQ\n".as_bytes(), inv).unwrap_err();
        match err {
            LexiconError::UnknownLabel { line, label } => {
                assert_eq!(line, 2);
                assert_eq!(label, "Q");
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    proptest! {
        // lookup is total and non-empty for arbitrary surfaces
        #[test]
        fn lookup_never_empty(surface in "\\PC{1,12}") {
            let lex = sample_lexicon();
            prop_assert!(!lex.lookup(&surface).is_empty());
        }

        // encode is injective on candidate sets: decoding the set bits
        // restores exactly the encoded set
        #[test]
        fn encode_round_trips(mask in 1u32..(1 << 11)) {
            let inv = CategoryInventory::basic_syntactic();
            let set: CandidateSet = (0..11)
                .filter(|i| mask & (1 << i) != 0)
                .map(|i| inv.code(i).to_string())
                .collect();
            let encoded = encode_candidates(&set, &inv).unwrap();
            prop_assert_eq!(decode_candidates(&encoded, &inv), set);
        }
    }
}
