//! Command-line front end: train the taggers, parse transcripts, and
//! evaluate against annotated corpora.

mod render;

use std::collections::BTreeSet;
use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use screenparse::caseframe::SlotConfig;
use screenparse::corpus::{evaluate, load_corpus, overall_interpretation_rate};
use screenparse::pipeline::Pipeline;
use screenparse::srn::SrnModel;
use screenparse::{tokenize, CategoryInventory, Channel, Lexicon, Metrics, TrainConfig};

/// Model file names inside the model directory, one per network.
const MODEL_FILES: [&str; 3] = ["disambiguator.srn", "abstractor.srn", "starter.srn"];

#[derive(Parser)]
#[command(
    name = "screenparse",
    about = "Fault-tolerant flat parsing of transcribed speech",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Jsonl,
}

#[derive(Subcommand)]
enum Command {
    /// Train the three taggers on an annotated corpus and write model files
    Train {
        /// Lexicon file (surface<TAB>label[,label...])
        #[arg(long)]
        lexicon: PathBuf,
        /// Training corpus (annotated TSV)
        #[arg(long)]
        corpus: PathBuf,
        /// Held-out corpus to report alongside the training metrics
        #[arg(long)]
        test_corpus: Option<PathBuf>,
        /// Output directory for the model files
        #[arg(long)]
        models: PathBuf,
        /// Random seed (falls back to SCREENPARSE_SEED, then 1)
        #[arg(long)]
        seed: Option<u64>,
        /// Learning rate
        #[arg(long)]
        lr: Option<f64>,
        /// Training epochs
        #[arg(long)]
        epochs: Option<usize>,
    },
    /// Parse a transcript (one utterance per line) with trained models
    Parse {
        #[arg(long)]
        lexicon: PathBuf,
        /// Directory containing the trained model files
        #[arg(long)]
        models: PathBuf,
        /// Transcript file; tokens are space-separated, `.` is a pause,
        /// `[...]` is vocal noise
        #[arg(long)]
        transcript: PathBuf,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        /// Log every finalized hypothesis to stderr
        #[arg(long)]
        trace: bool,
        /// Compatibility table for semantic slot typing
        #[arg(long)]
        compat_table: Option<PathBuf>,
        /// Comma-separated abstract labels that never fit a slot
        #[arg(long)]
        slot_blocklist: Option<String>,
    },
    /// Evaluate trained models against an annotated corpus
    Eval {
        #[arg(long)]
        lexicon: PathBuf,
        #[arg(long)]
        models: PathBuf,
        /// Annotated corpus with gold labels (and optional keep bits)
        #[arg(long)]
        corpus: PathBuf,
    },
}

fn main() {
    if let Err(err) = run() {
        eprintln!("error: {err:#}");
        std::process::exit(1);
    }
}

fn run() -> Result<()> {
    match Cli::parse().command {
        Command::Train {
            lexicon,
            corpus,
            test_corpus,
            models,
            seed,
            lr,
            epochs,
        } => cmd_train(
            &lexicon,
            &corpus,
            test_corpus.as_deref(),
            &models,
            seed,
            lr,
            epochs,
        ),
        Command::Parse {
            lexicon,
            models,
            transcript,
            format,
            trace,
            compat_table,
            slot_blocklist,
        } => cmd_parse(
            &lexicon,
            &models,
            &transcript,
            format,
            trace,
            compat_table.as_deref(),
            slot_blocklist.as_deref(),
        ),
        Command::Eval {
            lexicon,
            models,
            corpus,
        } => cmd_eval(&lexicon, &models, &corpus),
    }
}

fn load_lexicon(path: &Path) -> Result<Lexicon> {
    Lexicon::load(path, CategoryInventory::basic_syntactic())
        .with_context(|| format!("loading lexicon {}", path.display()))
}

fn seed_or_env(seed: Option<u64>) -> Result<u64> {
    if let Some(s) = seed {
        return Ok(s);
    }
    match std::env::var("SCREENPARSE_SEED") {
        Ok(v) => v
            .parse()
            .with_context(|| format!("SCREENPARSE_SEED is not an integer: {v:?}")),
        Err(_) => Ok(1),
    }
}

fn cmd_train(
    lexicon: &Path,
    corpus: &Path,
    test_corpus: Option<&Path>,
    models: &Path,
    seed: Option<u64>,
    lr: Option<f64>,
    epochs: Option<usize>,
) -> Result<()> {
    let lexicon = load_lexicon(lexicon)?;
    let train =
        load_corpus(corpus).with_context(|| format!("loading corpus {}", corpus.display()))?;
    let test = test_corpus
        .map(|p| load_corpus(p).with_context(|| format!("loading corpus {}", p.display())))
        .transpose()?;

    let mut config = TrainConfig {
        seed: seed_or_env(seed)?,
        ..TrainConfig::default()
    };
    if let Some(lr) = lr {
        config.learning_rate = lr;
    }
    if let Some(epochs) = epochs {
        config.epochs = epochs;
    }

    let mut channel = Channel::syntactic(lexicon, &config);
    let train_metrics = channel.train(&train, &config)?;

    std::fs::create_dir_all(models)
        .with_context(|| format!("creating model directory {}", models.display()))?;
    let (dis, abs, start) = channel.models();
    for (name, model) in MODEL_FILES.iter().zip([dis, abs, start]) {
        let path = models.join(name);
        std::fs::write(&path, model.save())
            .with_context(|| format!("writing {}", path.display()))?;
    }
    eprintln!(
        "trained on {} utterances (seed {}, lr {}, {} epochs); models in {}",
        train.len(),
        config.seed,
        config.learning_rate,
        config.epochs,
        models.display()
    );

    let test_metrics = test.as_ref().map(|t| evaluate(&channel, t));
    print!(
        "{}",
        render::metrics_table(&train_metrics, test_metrics.as_ref())
    );
    Ok(())
}

fn load_channel(lexicon: &Path, models: &Path) -> Result<Channel> {
    let lexicon = load_lexicon(lexicon)?;
    let mut loaded = Vec::new();
    for name in MODEL_FILES {
        let path = models.join(name);
        let text = std::fs::read_to_string(&path)
            .with_context(|| format!("reading model {}", path.display()))?;
        loaded.push(
            SrnModel::load(&text).with_context(|| format!("parsing model {}", path.display()))?,
        );
    }
    let starter = loaded.pop().expect("three models");
    let abstractor = loaded.pop().expect("three models");
    let disambiguator = loaded.pop().expect("three models");
    Channel::new(
        lexicon,
        CategoryInventory::basic_syntactic(),
        CategoryInventory::abstract_syntactic(),
        disambiguator,
        abstractor,
        starter,
    )
    .context("model dimensions do not fit the syntactic channel")
}

fn slot_config(compat_table: Option<&Path>, blocklist: Option<&str>) -> Result<SlotConfig> {
    let mut config = SlotConfig::default();
    if let Some(list) = blocklist {
        config.blocklist = list
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(String::from)
            .collect::<BTreeSet<_>>();
    }
    if let Some(path) = compat_table {
        config
            .load_compat_table(path)
            .with_context(|| format!("loading compatibility table {}", path.display()))?;
    }
    Ok(config)
}

fn cmd_parse(
    lexicon: &Path,
    models: &Path,
    transcript: &Path,
    format: Format,
    trace: bool,
    compat_table: Option<&Path>,
    blocklist: Option<&str>,
) -> Result<()> {
    let channel = load_channel(lexicon, models)?;
    let mut pipeline = Pipeline::new(channel, slot_config(compat_table, blocklist)?);

    let file = std::fs::File::open(transcript)
        .with_context(|| format!("reading transcript {}", transcript.display()))?;
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    let mut printed = 0usize;
    for line in std::io::BufReader::new(file).lines() {
        let line = line?;
        let tokens = tokenize(&line);
        if tokens.is_empty() {
            continue;
        }
        let mut hypotheses = Vec::new();
        for token in tokens {
            hypotheses.extend(
                pipeline
                    .process_token(token)
                    .context("tokens arrive in position order")?,
            );
        }
        let (analysis, closing) = pipeline.flush_with_hypotheses();
        hypotheses.extend(closing);
        if trace {
            for h in &hypotheses {
                eprintln!("{}", h.trace_line());
            }
        }
        printed += 1;
        match format {
            Format::Text => {
                if printed > 1 {
                    writeln!(out)?;
                }
                write!(out, "{}", render::analysis_text(&analysis))?;
            }
            Format::Jsonl => {
                serde_json::to_writer(&mut out, &analysis)?;
                writeln!(out)?;
            }
        }
    }
    Ok(())
}

fn cmd_eval(lexicon: &Path, models: &Path, corpus: &Path) -> Result<()> {
    let channel = load_channel(lexicon, models)?;
    let utterances =
        load_corpus(corpus).with_context(|| format!("loading corpus {}", corpus.display()))?;
    if utterances.is_empty() {
        bail!("corpus {} is empty", corpus.display());
    }
    let metrics: Metrics = evaluate(&channel, &utterances);
    print!("{}", render::metrics_table(&metrics, None));

    let with_gold = utterances
        .iter()
        .filter(|u| u.gold_surviving().is_some())
        .count();
    if with_gold == 0 {
        println!("overall interpretation: not scored (corpus has no keep column)");
        return Ok(());
    }
    let mut pipeline = Pipeline::new(channel, SlotConfig::default());
    let analyses: Vec<_> = utterances
        .iter()
        .map(|u| pipeline.analyze(&u.to_tokens()))
        .collect::<Result<_, _>>()?;
    let rate = overall_interpretation_rate(&analyses, &utterances)?;
    println!(
        "overall interpretation: {:.1}% ({} of {} utterances{})",
        rate.percent(),
        rate.matched,
        rate.scored,
        if rate.skipped > 0 {
            format!(", {} without gold skipped", rate.skipped)
        } else {
            String::new()
        }
    );
    Ok(())
}
