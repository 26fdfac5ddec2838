//! End-to-end checks against the two worked utterances, using the
//! bundled lexicon and trained models, plus schema round-trips.

use std::path::{Path, PathBuf};

use screenparse::caseframe::SlotConfig;
use screenparse::pipeline::{HypothesisPayload, Stage};
use screenparse::srn::SrnModel;
use screenparse::{tokenize, CategoryInventory, Channel, Lexicon, Pipeline, UtteranceAnalysis};

fn data_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data")
}

fn bundled_channel() -> Channel {
    let lexicon = Lexicon::load(
        &data_dir().join("lexicon.tsv"),
        CategoryInventory::basic_syntactic(),
    )
    .unwrap();
    let load = |name: &str| {
        SrnModel::load(&std::fs::read_to_string(data_dir().join("models").join(name)).unwrap())
            .unwrap()
    };
    Channel::new(
        lexicon,
        CategoryInventory::basic_syntactic(),
        CategoryInventory::abstract_syntactic(),
        load("disambiguator.srn"),
        load("abstractor.srn"),
        load("starter.srn"),
    )
    .unwrap()
}

#[test]
fn first_figure_tag_rows() {
    let mut channel = bundled_channel();
    let tokens = tokenize("Yeah I need a train from Regensburg to Dortmund");
    let tagged: Vec<_> = tokens.iter().map(|t| channel.tag_word(t)).collect();
    // utterance-initial word: adverb, modus group, phrase start
    assert_eq!(tagged[0].basic, "A");
    assert_eq!(tagged[0].abstract_label, "MG");
    assert!(tagged[0].phrase_start);
    // pronoun, noun group, new phrase group
    assert_eq!(tagged[1].basic, "U");
    assert_eq!(tagged[1].abstract_label, "NG");
    assert!(tagged[1].phrase_start);
    assert_eq!(tagged[2].basic, "V");
    assert_eq!(tagged[4].basic, "N");
    assert_eq!(tagged[4].abstract_label, "NG");
    assert_eq!(tagged[5].basic, "R");
    assert_eq!(tagged[5].abstract_label, "PG");
}

#[test]
fn bracketed_noise_tags_as_interjection() {
    let mut channel = bundled_channel();
    let word = channel.tag_word(&screenparse::Token::new("[eh]", 0));
    assert_eq!(word.basic, "I");
    assert_eq!(word.abstract_label, "IG");
}

#[test]
fn first_group_finalizes_as_soon_as_the_next_starts() {
    let mut pipeline = Pipeline::new(bundled_channel(), SlotConfig::default());
    let tokens = tokenize("Yeah I need a train");
    let first = pipeline.process_token(tokens[0].clone()).unwrap();
    assert!(first.iter().all(|h| h.stage != Stage::Chunked));
    // "I" opens its own group, which closes the one for "Yeah" at once
    let second = pipeline.process_token(tokens[1].clone()).unwrap();
    let chunked: Vec<_> = second
        .iter()
        .filter(|h| h.stage == Stage::Chunked)
        .collect();
    assert_eq!(chunked.len(), 1);
    assert_eq!(chunked[0].position, 0);
    match &chunked[0].payload {
        HypothesisPayload::Chunked { span, label } => {
            assert_eq!(*span, (0, 0));
            assert_eq!(label, "MG");
        }
        other => panic!("unexpected payload {other:?}"),
    }
}

#[test]
fn trace_lines_have_the_documented_shape() {
    let mut pipeline = Pipeline::new(bundled_channel(), SlotConfig::default());
    let mut lines = Vec::new();
    for t in tokenize("Yeah I need a train .") {
        for h in pipeline.process_token(t).unwrap() {
            lines.push(h.trace_line());
        }
    }
    let (_, closing) = pipeline.flush_with_hypotheses();
    lines.extend(closing.iter().map(|h| h.trace_line()));
    assert!(!lines.is_empty());
    for line in &lines {
        let fields: Vec<&str> = line.splitn(3, '\t').collect();
        assert_eq!(fields.len(), 3, "bad trace line {line:?}");
        fields[0].parse::<usize>().expect("position field");
    }
}

#[test]
fn analysis_round_trips_through_json() {
    let mut pipeline = Pipeline::new(bundled_channel(), SlotConfig::default());
    let analysis = pipeline
        .analyze(&tokenize(
            "when leaves please . [eh] a train . at Monday . at Monday",
        ))
        .unwrap();
    let text = serde_json::to_string(&analysis).unwrap();
    let back: UtteranceAnalysis = serde_json::from_str(&text).unwrap();
    assert_eq!(analysis, back);
    // floats survive exactly, so a second serialization is byte-identical
    assert_eq!(text, serde_json::to_string(&back).unwrap());
}
