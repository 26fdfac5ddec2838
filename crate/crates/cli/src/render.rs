//! Text rendering: the per-utterance analysis table and the metrics table.

use std::fmt::Write;

use screenparse::corpus::Metrics;
use screenparse::{RepairKind, UtteranceAnalysis};

/// Per-utterance table in the style of the reference parses: one row per
/// token with its three tagger outputs and the kept/removed mark, then
/// the applied repairs and the case frames.
pub fn analysis_text(analysis: &UtteranceAnalysis) -> String {
    let mut s = String::new();
    let width = analysis
        .tokens
        .iter()
        .map(|t| t.surface.len())
        .max()
        .unwrap_or(0)
        .max("FAULTY/FAULT-TOLERANT UTTERANCE".len());
    let _ = writeln!(
        s,
        "{:<width$}  {:<11}  {:<11}  {:<13}  KEPT",
        "FAULTY/FAULT-TOLERANT UTTERANCE", "BAS-SYN-DIS", "ABS-SYN-CAT", "SYN-PHR-START",
    );
    for word in &analysis.tagged {
        let kept = analysis.surviving.contains(&word.position());
        let _ = writeln!(
            s,
            "{:<width$}  {:<11}  {:<11}  {:<13}  {}",
            word.token.surface,
            word.basic,
            word.abstract_label,
            if word.phrase_start { "start" } else { "" },
            if kept { "yes" } else { "no" },
        );
    }
    if !analysis.repairs.is_empty() {
        let _ = writeln!(s, "repairs:");
        for event in &analysis.repairs {
            let kind = match event.kind {
                RepairKind::PauseDeletion => "pause-deletion",
                RepairKind::WordRepair => "word-repair",
                RepairKind::PhraseRepair => "phrase-repair",
            };
            let removed = span_text(analysis, event.removed_span);
            let _ = write!(s, "  {kind}: removed {removed:?}");
            if let Some(kept) = event.kept_span {
                let _ = write!(s, " kept {:?}", span_text(analysis, kept));
            }
            let _ = writeln!(s, "  ({})", event.evidence.join(", "));
        }
    }
    if !analysis.frames.is_empty() {
        let _ = writeln!(s, "frames:");
        for frame in &analysis.frames {
            let _ = write!(s, "  frame {}:", frame.index + 1);
            match &frame.verb_group {
                Some(vg) => {
                    let _ = write!(s, " verb={:?}", span_text(analysis, vg.span()));
                }
                None => {
                    let _ = write!(s, " verb=none");
                }
            }
            for slot in &frame.slots {
                let _ = write!(
                    s,
                    " {}={:?}{}",
                    slot.key,
                    span_text(analysis, slot.group.span()),
                    if slot.incompatible { "!" } else { "" }
                );
            }
            let _ = writeln!(s);
        }
    }
    s
}

fn span_text(analysis: &UtteranceAnalysis, span: (usize, usize)) -> String {
    analysis.tokens[span.0..=span.1]
        .iter()
        .map(|t| t.surface.as_str())
        .collect::<Vec<_>>()
        .join(" ")
}

/// Four-row module table: the three taggers plus the combined measure,
/// with a test column when a held-out corpus was evaluated.
pub fn metrics_table(train: &Metrics, test: Option<&Metrics>) -> String {
    let mut s = String::new();
    let _ = write!(s, "{:<15}  correct assignments", "Module");
    let _ = writeln!(s);
    match test {
        Some(_) => {
            let _ = writeln!(s, "{:<15}  {:>7}  {:>7}", "", "train", "test");
        }
        None => {
            let _ = writeln!(s, "{:<15}  {:>7}", "", "");
        }
    }
    type Pick = fn(&Metrics) -> screenparse::corpus::Ratio;
    let rows: [(&str, Pick); 4] = [
        ("BAS-SYN-DIS", |m| m.basic),
        ("ABS-SYN-CAT", |m| m.abstract_),
        ("SYN-PHR-START", |m| m.start),
        ("Combined", |m| m.combined),
    ];
    for (name, pick) in rows {
        let _ = write!(s, "{:<15}  {:>6.1}%", name, pick(train).percent());
        if let Some(test) = test {
            let _ = write!(s, "  {:>6.1}%", pick(test).percent());
        }
        let _ = writeln!(s);
    }
    s
}
