use std::fs;
use std::io::{self, BufRead, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use tnorm::corpus::{load_corpus, AnnotatedCorpus, CorpusError};
use tnorm::eval::evaluate;
use tnorm::induction::{induce, CoverageError};
use tnorm::model::{ModelError, TrainedModel};
use tnorm::pipeline::Pipeline;
use tnorm::profile::{Profile, ProfileError};
use tnorm::realign::Realigner;
use tnorm::synthetic::english_corpus;
use tnorm::tagger::{train, Hyper, DEFAULT_SEED};
use tnorm::ClassRegistry;

#[derive(Parser)]
#[command(name = "tnorm", version, about = "Text normalization with induced classes and a constrained CRF")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Induce classes from an annotated corpus and train a tagger.
    Train(TrainArgs),
    /// Normalize text, one sentence per line.
    Normalize(NormalizeArgs),
    /// Score a model on an annotated corpus.
    Evaluate(EvaluateArgs),
    /// Print a model's class registry and summary.
    Inspect(InspectArgs),
    /// Check that a corpus parses, aligns and is fully covered.
    Validate(ValidateArgs),
    /// Write a generated English corpus.
    Synth(SynthArgs),
}

#[derive(Args)]
struct ProfileArg {
    /// Language profile (TOML). Defaults to the built-in English profile.
    #[arg(long)]
    profile: Option<PathBuf>,
}

impl ProfileArg {
    fn load(&self) -> Result<Profile> {
        match &self.profile {
            Some(path) => Ok(Profile::load(path)?),
            None => Ok(Profile::english()),
        }
    }
}

#[derive(Args)]
struct SplitArgs {
    /// Fraction of sentences used for training; the rest is the test set.
    #[arg(long)]
    split: Option<f64>,
    /// Seed for the split and the training shuffle.
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
}

impl SplitArgs {
    fn check(&self) -> Result<()> {
        if let Some(f) = self.split {
            if !(f > 0.0 && f < 1.0) {
                bail!("--split must be strictly between 0 and 1, got {f}");
            }
        }
        Ok(())
    }
}

#[derive(Args)]
struct TrainArgs {
    #[arg(long)]
    corpus: PathBuf,
    #[arg(long)]
    model: PathBuf,
    #[command(flatten)]
    profile: ProfileArg,
    #[command(flatten)]
    split: SplitArgs,
    /// Training setting as key=value (l2, epochs, learning_rate, seed).
    #[arg(long = "hyper", value_name = "KEY=VALUE")]
    hyper: Vec<String>,
    #[arg(long, short)]
    verbose: bool,
}

#[derive(Args)]
struct NormalizeArgs {
    #[arg(long)]
    model: PathBuf,
    #[command(flatten)]
    profile: ProfileArg,
    /// Input file; standard input when omitted.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Report unresolved tokens on standard error.
    #[arg(long, short)]
    verbose: bool,
    /// Normalize lines in parallel.
    #[arg(long)]
    parallel: bool,
}

#[derive(Args)]
struct EvaluateArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    corpus: PathBuf,
    #[command(flatten)]
    profile: ProfileArg,
    #[command(flatten)]
    split: SplitArgs,
    /// Report path prefix; writes PREFIX.txt and PREFIX.json. Defaults to
    /// the model path with an `.eval` suffix.
    #[arg(long)]
    report: Option<PathBuf>,
    #[arg(long, short)]
    verbose: bool,
}

#[derive(Args)]
struct InspectArgs {
    #[arg(long)]
    model: PathBuf,
}

#[derive(Args)]
struct ValidateArgs {
    #[arg(long)]
    corpus: PathBuf,
    #[command(flatten)]
    profile: ProfileArg,
}

#[derive(Args)]
struct SynthArgs {
    /// Output corpus path.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 2000)]
    sentences: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
}

#[derive(Debug, thiserror::Error)]
#[error("cannot read input {path}")]
struct InputError {
    path: PathBuf,
    source: io::Error,
}

fn with_suffix(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn write_file(path: &Path, contents: impl AsRef<[u8]>) -> Result<()> {
    fs::write(path, contents).with_context(|| format!("cannot write {}", path.display()))
}

fn load(corpus: &Path, profile: &Profile) -> Result<AnnotatedCorpus> {
    let corpus = load_corpus(corpus, &Realigner::new(profile))?;
    if corpus.is_empty() {
        bail!(CorpusError::Parse { line: 0, message: "no sentences".into() });
    }
    Ok(corpus)
}

fn cmd_train(args: TrainArgs) -> Result<()> {
    args.split.check()?;
    let profile = args.profile.load()?;
    let corpus = load(&args.corpus, &profile)?;
    let mut hyper = Hyper { seed: args.split.seed, ..Hyper::default() };
    for kv in &args.hyper {
        let (k, v) = kv.split_once('=').with_context(|| format!("--hyper expects key=value, got `{kv}`"))?;
        hyper.set(k.trim(), v.trim()).map_err(anyhow::Error::msg)?;
    }
    let train_set = match args.split.split {
        Some(f) => {
            let (train_set, test_set) = corpus.split(f, args.split.seed);
            eprintln!("split: {} train / {} test sentences", train_set.len(), test_set.len());
            train_set
        }
        None => corpus,
    };

    let predefined = ClassRegistry::from_profile(&profile)?;
    let induction = induce(&train_set, &predefined)?;
    let stats = &induction.stats;
    let report = format!(
        "{} AG classes generated\n\
         sentences                {}\n\
         token pairs              {}\n\
         self pairs               {}\n\
         predefined-labeled pairs {}\n\
         AG-labeled pairs         {}\n\
         non-self share           {:.1}%\n\
         normalizations by AGs    {:.1}% ({} of {})\n",
        stats.generated_classes,
        stats.sentences,
        stats.pairs,
        stats.self_pairs,
        stats.predefined_pairs,
        stats.generated_pairs,
        100.0 * stats.non_self_share(),
        100.0 * stats.generated_share(),
        stats.normalized_by_generated,
        stats.normalized_pairs,
    );
    print!("{report}");
    if args.verbose {
        eprintln!("training: {:?}", hyper);
    }

    let tagger = train(&induction.labeled, &induction.registry, &hyper)?;
    if args.verbose {
        eprintln!("{} features", tagger.feature_count());
    }
    let model = TrainedModel::new(&profile, induction.registry, tagger)?;
    model.save(&args.model)?;
    write_file(&with_suffix(&args.model, ".registry.txt"), model.registry.dump())?;
    write_file(&with_suffix(&args.model, ".train.txt"), &report)?;
    eprintln!("model written to {}", args.model.display());
    Ok(())
}

fn load_pipeline(model: &Path, profile: &ProfileArg) -> Result<Pipeline> {
    let profile = profile.load()?;
    let model = TrainedModel::load(model)?;
    Ok(Pipeline::from_model(model, &profile)?)
}

fn cmd_normalize(args: NormalizeArgs) -> Result<()> {
    let pipeline = load_pipeline(&args.model, &args.profile)?;
    let lines: Vec<String> = match &args.input {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|source| InputError { path: path.clone(), source })?;
            text.lines().map(String::from).collect()
        }
        None => io::stdin().lock().lines().collect::<io::Result<_>>().context("cannot read standard input")?,
    };
    let results: Vec<_> = if args.parallel {
        lines.par_iter().map(|l| pipeline.normalize(l)).collect()
    } else {
        lines.iter().map(|l| pipeline.normalize(l)).collect()
    };
    let mut out = BufWriter::new(io::stdout().lock());
    for (n, r) in results.iter().enumerate() {
        writeln!(out, "{}", r.output)?;
        if args.verbose {
            for &i in &r.unresolved {
                eprintln!("line {}: no class accepts token {:?}", n + 1, r.tokens[i].text);
            }
        }
    }
    out.flush()?;
    Ok(())
}

fn cmd_evaluate(args: EvaluateArgs) -> Result<()> {
    args.split.check()?;
    let pipeline = load_pipeline(&args.model, &args.profile)?;
    let profile = args.profile.load()?;
    let corpus = match load_corpus(&args.corpus, &Realigner::new(&profile)) {
        Err(CorpusError::Parse { line: 0, .. }) => bail!("empty test set"),
        other => other?,
    };
    let test = match args.split.split {
        Some(f) => {
            let (train_set, test_set) = corpus.split(f, args.split.seed);
            eprintln!("split: {} train / {} test sentences", train_set.len(), test_set.len());
            test_set
        }
        None => corpus,
    };
    if test.is_empty() {
        bail!("empty test set");
    }
    let report = evaluate(&pipeline, &test);
    let prefix = args.report.unwrap_or_else(|| with_suffix(&args.model, ".eval"));
    let text = report.to_text();
    write_file(&with_suffix(&prefix, ".txt"), &text)?;
    write_file(&with_suffix(&prefix, ".json"), report.to_json())?;
    print!("{text}");
    if args.verbose {
        eprintln!("report written to {}.{{txt,json}}", prefix.display());
    }
    Ok(())
}

fn cmd_inspect(args: InspectArgs) -> Result<()> {
    let model = TrainedModel::load(&args.model)?;
    println!("profile    {} ({})", model.profile_id, model.profile_fingerprint);
    println!("registry   {}", model.registry.snapshot_id());
    println!("features   {}", model.tagger.feature_count());
    println!("training   {:?}", model.tagger.hyper());
    println!();
    print!("{}", model.registry.dump());
    Ok(())
}

fn cmd_validate(args: ValidateArgs) -> Result<()> {
    let profile = args.profile.load()?;
    let corpus = load(&args.corpus, &profile)?;
    let predefined = ClassRegistry::from_profile(&profile)?;
    let stats = induce(&corpus, &predefined)?.stats;
    println!(
        "ok: {} sentences, {} tokens, {} AG classes would be generated",
        corpus.len(),
        corpus.token_count(),
        stats.generated_classes
    );
    Ok(())
}

fn cmd_synth(args: SynthArgs) -> Result<()> {
    let corpus = english_corpus(args.sentences, args.seed);
    corpus.save(&args.out)?;
    eprintln!("{} sentences written to {}", corpus.len(), args.out.display());
    Ok(())
}

/// 2: an input file is missing or unreadable. 3: an input is malformed,
/// misaligned or not covered. 1: anything else.
fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<CorpusError>() {
            return match e {
                CorpusError::Io { .. } => 2,
                _ => 3,
            };
        }
        if let Some(e) = cause.downcast_ref::<ProfileError>() {
            return match e {
                ProfileError::Io { .. } => 2,
                ProfileError::Invalid { .. } => 3,
            };
        }
        if let Some(ModelError::Io { .. }) = cause.downcast_ref::<ModelError>() {
            return 2;
        }
        if cause.downcast_ref::<InputError>().is_some() {
            return 2;
        }
        if cause.downcast_ref::<CoverageError>().is_some() {
            return 3;
        }
    }
    1
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Train(a) => cmd_train(a),
        Command::Normalize(a) => cmd_normalize(a),
        Command::Evaluate(a) => cmd_evaluate(a),
        Command::Inspect(a) => cmd_inspect(a),
        Command::Validate(a) => cmd_validate(a),
        Command::Synth(a) => cmd_synth(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
