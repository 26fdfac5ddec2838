//! A tagging channel: three Elman networks over one lexicon that produce,
//! per word, a basic category, an abstract group category, and a
//! phrase-start flag.
//!
//! The disambiguator reads the lexical candidate bits. The abstractor and
//! the starter read the one-hot of the chosen basic label: all three
//! input layers live in basic-category space. During training the
//! downstream nets are teacher-forced on gold basic labels; at inference
//! they consume the predicted label, so a disambiguation error can
//! propagate into the combined score.

use serde::{Deserialize, Serialize};

use crate::corpus::{AnnotatedUtterance, Metrics};
use crate::error::ChannelError;
use crate::inventory::CategoryInventory;
use crate::lexicon::{encode_candidates, one_hot, Lexicon};
use crate::srn::{SrnModel, TrainConfig};
use crate::token::Token;

/// Phrase-start decision threshold on the starter's single output unit.
pub const START_THRESHOLD: f64 = 0.5;

/// Per-word tagging result: the chosen labels with their raw activations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaggedWord {
    pub token: Token,
    /// Basic category code, argmax over the disambiguator's label units.
    pub basic: String,
    pub basic_activations: Vec<f64>,
    /// Abstract group category code, argmax over the abstractor's label units.
    pub abstract_label: String,
    pub abstract_activations: Vec<f64>,
    /// True when the starter activation reaches the threshold.
    pub phrase_start: bool,
    pub start_activation: f64,
}

impl TaggedWord {
    pub fn position(&self) -> usize {
        self.token.position
    }

    /// Case-folded surface, the form detectors compare.
    pub fn folded_surface(&self) -> String {
        self.token.surface.to_lowercase()
    }
}

/// One tagging channel: lexicon, inventories, and the three networks.
/// Stateful per utterance (the network contexts carry across words);
/// reset at every utterance boundary.
#[derive(Debug, Clone)]
pub struct Channel {
    lexicon: Lexicon,
    basic: CategoryInventory,
    abstract_: CategoryInventory,
    disambiguator: SrnModel,
    abstractor: SrnModel,
    starter: SrnModel,
}

/// Network sizes of the syntactic channel: disambiguator 13-14-13,
/// abstractor 13-7-8, starter 13-7-1.
pub const SYNTACTIC_HIDDEN: (usize, usize, usize) = (14, 7, 7);

impl Channel {
    pub fn new(
        lexicon: Lexicon,
        basic: CategoryInventory,
        abstract_: CategoryInventory,
        disambiguator: SrnModel,
        abstractor: SrnModel,
        starter: SrnModel,
    ) -> Result<Self, ChannelError> {
        let check = |model: &SrnModel,
                     name: &'static str,
                     want_in: usize,
                     want_out: usize|
         -> Result<(), ChannelError> {
            if model.n_in() != want_in || model.n_out() != want_out {
                return Err(ChannelError::DimensionMismatch {
                    model: name,
                    got_in: model.n_in(),
                    got_out: model.n_out(),
                    want_in,
                    want_out,
                });
            }
            Ok(())
        };
        check(&disambiguator, "disambiguator", basic.width(), basic.width())?;
        check(&abstractor, "abstractor", basic.width(), abstract_.width())?;
        check(&starter, "starter", basic.width(), 1)?;
        Ok(Self {
            lexicon,
            basic,
            abstract_,
            disambiguator,
            abstractor,
            starter,
        })
    }

    /// A fresh, untrained syntactic channel with seeded random weights.
    pub fn syntactic(lexicon: Lexicon, config: &TrainConfig) -> Self {
        let basic = CategoryInventory::basic_syntactic();
        let abstract_ = CategoryInventory::abstract_syntactic();
        let (h_dis, h_abs, h_start) = SYNTACTIC_HIDDEN;
        // derive distinct seeds so the three nets do not share weights
        let dis = SrnModel::new_random(
            basic.width(),
            h_dis,
            basic.width(),
            &TrainConfig {
                seed: config.seed,
                ..config.clone()
            },
        );
        let abs = SrnModel::new_random(
            basic.width(),
            h_abs,
            abstract_.width(),
            &TrainConfig {
                seed: config.seed.wrapping_add(1),
                ..config.clone()
            },
        );
        let start = SrnModel::new_random(
            basic.width(),
            h_start,
            1,
            &TrainConfig {
                seed: config.seed.wrapping_add(2),
                ..config.clone()
            },
        );
        Self::new(lexicon, basic, abstract_, dis, abs, start)
            .expect("syntactic dimensions are consistent")
    }

    pub fn lexicon(&self) -> &Lexicon {
        &self.lexicon
    }

    pub fn basic_inventory(&self) -> &CategoryInventory {
        &self.basic
    }

    pub fn abstract_inventory(&self) -> &CategoryInventory {
        &self.abstract_
    }

    pub fn models(&self) -> (&SrnModel, &SrnModel, &SrnModel) {
        (&self.disambiguator, &self.abstractor, &self.starter)
    }

    /// Tags one token and advances all three network contexts by one step.
    pub fn tag_word(&mut self, token: &Token) -> TaggedWord {
        let candidates = self.lexicon.lookup(&token.surface);
        let input = encode_candidates(&candidates, &self.basic)
            .expect("lexicon candidates come from the inventory");
        let basic_activations = self
            .disambiguator
            .forward(&input)
            .expect("channel dimensions are validated");
        let basic_idx = self.basic.decode(&basic_activations);

        let chosen = one_hot(basic_idx, &self.basic);
        let abstract_activations = self
            .abstractor
            .forward(&chosen)
            .expect("channel dimensions are validated");
        let abstract_idx = self.abstract_.decode(&abstract_activations);
        let start = self
            .starter
            .forward(&chosen)
            .expect("channel dimensions are validated");

        TaggedWord {
            token: token.clone(),
            basic: self.basic.code(basic_idx).to_string(),
            basic_activations,
            abstract_label: self.abstract_.code(abstract_idx).to_string(),
            abstract_activations,
            phrase_start: start[0] >= START_THRESHOLD,
            start_activation: start[0],
        }
    }

    /// Resets all three network contexts. Call at every utterance boundary.
    pub fn reset(&mut self) {
        self.disambiguator.reset_context();
        self.abstractor.reset_context();
        self.starter.reset_context();
    }

    /// Builds the three per-network training sequences for one annotated
    /// utterance, teacher-forcing the downstream nets on gold basic labels.
    #[allow(clippy::type_complexity)]
    fn training_sequences(
        &self,
        utterance: &AnnotatedUtterance,
    ) -> Result<
        (
            Vec<(Vec<f64>, Vec<f64>)>,
            Vec<(Vec<f64>, Vec<f64>)>,
            Vec<(Vec<f64>, Vec<f64>)>,
        ),
        ChannelError,
    > {
        let mut dis = Vec::with_capacity(utterance.tokens.len());
        let mut abs = Vec::with_capacity(utterance.tokens.len());
        let mut start = Vec::with_capacity(utterance.tokens.len());
        for tok in &utterance.tokens {
            let basic_idx =
                self.basic
                    .resolve(&tok.basic)
                    .ok_or_else(|| ChannelError::UnknownAnnotation {
                        line: tok.line,
                        task: "basic",
                        label: tok.basic.clone(),
                    })?;
            let abstract_idx = self.abstract_.resolve(&tok.abstract_label).ok_or_else(|| {
                ChannelError::UnknownAnnotation {
                    line: tok.line,
                    task: "abstract",
                    label: tok.abstract_label.clone(),
                }
            })?;
            let candidates = self.lexicon.lookup(&tok.surface);
            let input = encode_candidates(&candidates, &self.basic)
                .expect("lexicon candidates come from the inventory");
            let gold_one_hot = one_hot(basic_idx, &self.basic);
            dis.push((input, one_hot(basic_idx, &self.basic)));
            abs.push((gold_one_hot.clone(), one_hot(abstract_idx, &self.abstract_)));
            start.push((gold_one_hot, vec![if tok.start { 1.0 } else { 0.0 }]));
        }
        Ok((dis, abs, start))
    }

    /// Trains all three networks on the corpus for `config.epochs` passes
    /// and returns the train-set metrics measured in inference mode.
    pub fn train(
        &mut self,
        corpus: &[AnnotatedUtterance],
        config: &TrainConfig,
    ) -> Result<Metrics, ChannelError> {
        if corpus.is_empty() {
            return Err(ChannelError::EmptyCorpus);
        }
        config.validate()?;
        let sequences: Vec<_> = corpus
            .iter()
            .map(|u| self.training_sequences(u))
            .collect::<Result<_, _>>()?;
        for _ in 0..config.epochs {
            for (dis, abs, start) in &sequences {
                self.disambiguator.train_sequence(dis, config)?;
                self.abstractor.train_sequence(abs, config)?;
                self.starter.train_sequence(start, config)?;
            }
        }
        self.reset();
        Ok(crate::corpus::evaluate(self, corpus))
    }
}
