//! Category inventories: the ordered label sets the networks are wired to.
//!
//! Each tagging task has one inventory. Label order is fixed for the
//! lifetime of a trained model because output unit `i` means `labels[i]`.
//! The network width may exceed the label count; the trailing slots are
//! reserved padding and never carry a label.

use serde::{Deserialize, Serialize};

use crate::error::InventoryError;

/// One label: a full name plus the short code used in corpus files
/// and table output (e.g. `Noun` / `N`, `Prepositional Group` / `PG`).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelDef {
    pub name: String,
    pub code: String,
}

/// Ordered label set for one tagging task, padded to a fixed network width.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CategoryInventory {
    labels: Vec<LabelDef>,
    width: usize,
}

/// Basic syntactic codes, in inventory order.
pub const BASIC_CODES: [&str; 11] = ["J", "A", "C", "D", "I", "M", "N", "R", "U", "V", "-"];
/// Abstract syntactic codes, in inventory order.
pub const ABSTRACT_CODES: [&str; 7] = ["CG", "IG", "MG", "NG", "PG", "SG", "VG"];

/// Basic-category code for pauses.
pub const PAUSE: &str = "-";
/// Basic-category code for interjections.
pub const INTERJECTION: &str = "I";
/// Abstract code for verb groups; opens a new case frame when one is
/// already filled.
pub const VERB_GROUP: &str = "VG";
/// Abstract code for special groups; on the default slot blocklist.
pub const SPECIAL_GROUP: &str = "SG";

impl CategoryInventory {
    /// Builds an inventory from `(name, code)` pairs. `width` must cover
    /// every label; any excess is padding.
    pub fn new(labels: &[(&str, &str)], width: usize) -> Result<Self, InventoryError> {
        if width < labels.len() {
            return Err(InventoryError::WidthTooSmall {
                labels: labels.len(),
                width,
            });
        }
        let mut seen = std::collections::HashSet::new();
        for (name, code) in labels {
            if !seen.insert(name.to_string()) || !seen.insert(code.to_string()) {
                return Err(InventoryError::DuplicateLabel {
                    label: format!("{name}/{code}"),
                });
            }
        }
        Ok(Self {
            labels: labels
                .iter()
                .map(|(name, code)| LabelDef {
                    name: name.to_string(),
                    code: code.to_string(),
                })
                .collect(),
            width,
        })
    }

    /// The eleven basic syntactic categories, padded to 13 network units.
    pub fn basic_syntactic() -> Self {
        Self::new(
            &[
                ("Adjective", "J"),
                ("Adverb", "A"),
                ("Conjunction", "C"),
                ("Determiner", "D"),
                ("Interjection", "I"),
                ("Numeral", "M"),
                ("Noun", "N"),
                ("Preposition", "R"),
                ("Pronoun", "U"),
                ("Verb", "V"),
                ("Pause", "-"),
            ],
            13,
        )
        .expect("built-in inventory is valid")
    }

    /// The seven abstract syntactic categories, padded to 8 network units.
    pub fn abstract_syntactic() -> Self {
        Self::new(
            &[
                ("Conjunction Group", "CG"),
                ("Interjection Group", "IG"),
                ("Modus Group", "MG"),
                ("Noun Group", "NG"),
                ("Prepositional Group", "PG"),
                ("Special Group", "SG"),
                ("Verb Group", "VG"),
            ],
            8,
        )
        .expect("built-in inventory is valid")
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Network width including padding slots.
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn labels(&self) -> &[LabelDef] {
        &self.labels
    }

    /// Resolves a label by code or full name.
    pub fn resolve(&self, label: &str) -> Option<usize> {
        self.labels
            .iter()
            .position(|l| l.code == label || l.name == label)
    }

    pub fn code(&self, index: usize) -> &str {
        &self.labels[index].code
    }

    pub fn name(&self, index: usize) -> &str {
        &self.labels[index].name
    }

    /// Index of the strongest label unit; padding slots are not labels and
    /// never decode. Ties break toward the lowest index.
    pub fn decode(&self, activations: &[f64]) -> usize {
        let mut best = 0;
        for i in 1..self.labels.len() {
            if activations[i] > activations[best] {
                best = i;
            }
        }
        best
    }
}
