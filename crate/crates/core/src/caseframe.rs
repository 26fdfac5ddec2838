//! Case frame assembly: corrected phrase groups are filed into flat
//! frames, one slot per group, keyed by abstract category plus a
//! positional suffix (`PG#1`, `PG#2`, ...). A verb group fills the
//! frame's verb position; a second verb group opens the next frame.

use std::collections::{BTreeSet, HashSet};
use std::io::BufRead;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::channel::TaggedWord;
use crate::chunker::PhraseGroup;
use crate::correction::RepairEvent;
use crate::inventory::{SPECIAL_GROUP, VERB_GROUP};
use crate::token::Token;

/// One filled slot. Incompatible groups are recorded with the mark set
/// rather than dropped: slot incompatibility is an error signal, not a
/// deletion rule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Slot {
    pub key: String,
    pub group: PhraseGroup,
    pub incompatible: bool,
}

/// A flat case frame: at most one verb group plus the slotted groups in
/// arrival order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Frame {
    pub index: usize,
    pub verb_group: Option<PhraseGroup>,
    pub slots: Vec<Slot>,
}

/// Slot compatibility configuration. The blocklist flags abstract
/// categories that never fit a slot (special groups by default). The
/// compatibility table lists allowed syntactic/semantic label pairs and
/// is consulted only when a semantic label is supplied.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SlotConfig {
    pub blocklist: BTreeSet<String>,
    pub compat_table: Option<HashSet<(String, String)>>,
}

impl Default for SlotConfig {
    fn default() -> Self {
        Self {
            blocklist: [SPECIAL_GROUP.to_string()].into(),
            compat_table: None,
        }
    }
}

impl SlotConfig {
    /// Loads a compatibility table: lines `SYN_LABEL<TAB>SEM_LABEL`,
    /// `#` comments.
    pub fn load_compat_table(&mut self, path: &Path) -> std::io::Result<()> {
        let file = std::fs::File::open(path)?;
        let mut table = HashSet::new();
        for line in std::io::BufReader::new(file).lines() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if let Some((syn, sem)) = line.split_once('\t') {
                table.insert((syn.trim().to_string(), sem.trim().to_string()));
            } else {
                return Err(std::io::Error::new(
                    std::io::ErrorKind::InvalidData,
                    format!("expected `SYN_LABEL<TAB>SEM_LABEL`, got {line:?}"),
                ));
            }
        }
        self.compat_table = Some(table);
        Ok(())
    }
}

/// Next free slot key for a group in this frame: the abstract label with
/// a 1-based positional suffix.
pub fn find_slot(frame: &Frame, group: &PhraseGroup) -> String {
    let n = frame
        .slots
        .iter()
        .filter(|s| s.group.label() == group.label())
        .count();
    format!("{}#{}", group.label(), n + 1)
}

/// Tests whether the proposed slot is incompatible (true = flagged).
/// Syntax-only runs consult the blocklist; when a semantic label is
/// known, pairs missing from the compatibility table are flagged too.
pub fn slot_error(
    config: &SlotConfig,
    group: &PhraseGroup,
    semantic_label: Option<&str>,
) -> bool {
    if config.blocklist.contains(group.label()) {
        return true;
    }
    match (semantic_label, &config.compat_table) {
        (Some(sem), Some(table)) => {
            !table.contains(&(group.label().to_string(), sem.to_string()))
        }
        _ => false,
    }
}

/// True when the incoming group must open a new frame: it is a verb
/// group and the current frame already has one.
pub fn verb_error(frame: &Frame, incoming: &PhraseGroup) -> bool {
    incoming.label() == VERB_GROUP && frame.verb_group.is_some()
}

/// Files surviving groups into frames as they are confirmed.
#[derive(Debug, Clone)]
pub struct FrameBuilder {
    frames: Vec<Frame>,
    config: SlotConfig,
}

/// Where one group landed: its frame and, for non-verb groups, its slot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameAssignment {
    pub frame_index: usize,
    pub slot_key: Option<String>,
    pub incompatible: bool,
}

impl FrameBuilder {
    pub fn new(config: SlotConfig) -> Self {
        Self {
            frames: Vec::new(),
            config,
        }
    }

    /// Files one confirmed surviving group and reports where it landed.
    pub fn add(&mut self, group: PhraseGroup) -> FrameAssignment {
        if self.frames.is_empty() {
            self.frames.push(Frame {
                index: 0,
                verb_group: None,
                slots: Vec::new(),
            });
        }
        let current = self.frames.len() - 1;
        if verb_error(&self.frames[current], &group) {
            self.frames.push(Frame {
                index: current + 1,
                verb_group: None,
                slots: Vec::new(),
            });
        }
        let current = self.frames.len() - 1;
        let frame = &mut self.frames[current];
        if group.label() == VERB_GROUP {
            frame.verb_group = Some(group);
            FrameAssignment {
                frame_index: current,
                slot_key: None,
                incompatible: false,
            }
        } else {
            let key = find_slot(frame, &group);
            let incompatible = slot_error(&self.config, &group, None);
            frame.slots.push(Slot {
                key: key.clone(),
                group,
                incompatible,
            });
            FrameAssignment {
                frame_index: current,
                slot_key: Some(key),
                incompatible,
            }
        }
    }

    /// Utterance end: yields the built frames and clears state.
    pub fn finish(&mut self) -> Vec<Frame> {
        std::mem::take(&mut self.frames)
    }
}

/// The fault-tolerant interpretation of one utterance: every token with
/// its tags, the surviving-token set, the corrected phrase groups, the
/// applied repairs, and the case frames.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UtteranceAnalysis {
    pub tokens: Vec<Token>,
    pub tagged: Vec<TaggedWord>,
    /// Positions that survive all deletions and repairs.
    pub surviving: BTreeSet<usize>,
    /// Post-correction phrase groups, left to right.
    pub groups: Vec<PhraseGroup>,
    /// Applied corrections, ordered by removed span.
    pub repairs: Vec<RepairEvent>,
    pub frames: Vec<Frame>,
}

impl UtteranceAnalysis {
    pub fn empty() -> Self {
        Self {
            tokens: Vec::new(),
            tagged: Vec::new(),
            surviving: BTreeSet::new(),
            groups: Vec::new(),
            repairs: Vec::new(),
            frames: Vec::new(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// Surfaces of the surviving tokens, in order.
    pub fn surviving_surfaces(&self) -> Vec<&str> {
        self.surviving
            .iter()
            .map(|&p| self.tokens[p].surface.as_str())
            .collect()
    }
}
