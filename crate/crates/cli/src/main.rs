use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use sketchregex::examplegen::{generate_examples, Examples, DEFAULT_VISIT_LIMIT};
use sketchregex::grammar::{load_grammar, shipped_grammar, tokenize, Grammar, SHIPPED_LEXICON, SHIPPED_RULES};
use sketchregex::learning::{
    pseudogold_sketch, train_mle, train_mml, MleItem, MmlItem, TrainConfig, WeightVector,
};
use sketchregex::pipeline::{
    decode_sketches, evaluate, load_benchmarks, run_benchmark, to_jsonl, Benchmark, PipelineConfig, Profile, Ranking, RunRecord,
    RunStatus, SketchStatus,
};
use sketchregex::regex::{parse_regex, parse_sketch, to_standard_regex};
use sketchregex::synth::{synthesize, Outcome};

#[derive(Parser)]
#[command(name = "sketchregex", version, about = "Regex synthesis from a description and examples")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Grammar rules file (defaults to the built-in grammar)
    #[arg(long, global = true)]
    grammar: Option<PathBuf>,
    /// Lexicon file (defaults to the built-in lexicon)
    #[arg(long, global = true)]
    lexicon: Option<PathBuf>,
    /// Parser weights, one `feature<TAB>value` per line
    #[arg(long, global = true)]
    weights: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value = "turk")]
    profile: ProfileArg,
    /// Number of sketches kept by the parser
    #[arg(long, global = true)]
    beam: Option<usize>,
    /// Per-sketch synthesis timeout
    #[arg(long, global = true)]
    timeout_ms: Option<u64>,
    /// Depth bound of synthesized regexes
    #[arg(long, global = true)]
    depth: Option<usize>,
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Deterministic cap on synthesizer expansions per sketch
    #[arg(long, global = true)]
    max_expansions: Option<u64>,
    #[arg(long, global = true, value_enum, default_value = "model")]
    ranking: RankingArg,
    #[arg(long, global = true, value_enum, default_value = "text")]
    format: Format,
}

#[derive(Clone, Copy, ValueEnum)]
enum ProfileArg {
    Turk,
    Stackoverflow,
}

#[derive(Clone, Copy, ValueEnum)]
enum RankingArg {
    Model,
    MaxCoverage,
    EmptySketch,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Clone, Copy, ValueEnum)]
enum ObjectiveArg {
    Mle,
    Mml,
}

#[derive(Subcommand)]
enum Command {
    /// Print the k-best sketches for a description
    Parse { description: String },
    /// Complete a sketch against examples
    Synth {
        sketch: String,
        #[arg(long = "pos")]
        positives: Vec<String>,
        #[arg(long = "neg")]
        negatives: Vec<String>,
    },
    /// Sample examples for a regex, or fill in examples for a dataset
    GenExamples {
        /// Regex to sample from
        regex: Option<String>,
        /// Dataset whose items get fresh examples from their gold regexes
        #[arg(long, conflicts_with = "regex")]
        data: Option<PathBuf>,
        #[arg(long, default_value_t = 10)]
        n_pos: usize,
        #[arg(long, default_value_t = 10)]
        n_neg: usize,
    },
    /// Fit parser weights on a dataset
    Train {
        #[arg(long)]
        data: PathBuf,
        #[arg(long, value_enum, default_value = "mle")]
        objective: ObjectiveArg,
        /// Where to write the learned weights
        #[arg(long)]
        out: PathBuf,
        /// Where to write the per-epoch CSV log
        #[arg(long)]
        log: Option<PathBuf>,
        #[arg(long)]
        epochs: Option<usize>,
        #[arg(long)]
        batch_size: Option<usize>,
        #[arg(long)]
        learning_rate: Option<f64>,
        #[arg(long)]
        l2: Option<f64>,
        /// Parser beam used during training
        #[arg(long)]
        train_beam: Option<usize>,
    },
    /// Run the pipeline over a dataset and report accuracy
    Eval {
        #[arg(long)]
        data: PathBuf,
        /// N values for top-N accuracy
        #[arg(long, value_delimiter = ',', default_value = "1")]
        topn: Vec<usize>,
        /// Include wall-clock times
        #[arg(long)]
        timing: bool,
    },
    /// Run the pipeline on one benchmark
    Run {
        /// Dataset holding the benchmark
        #[arg(long, required_unless_present = "description")]
        data: Option<PathBuf>,
        /// Benchmark id (defaults to the first item)
        #[arg(long, requires = "data")]
        id: Option<String>,
        #[arg(long, conflicts_with = "data")]
        description: Option<String>,
        #[arg(long = "pos")]
        positives: Vec<String>,
        #[arg(long = "neg")]
        negatives: Vec<String>,
        #[arg(long)]
        timing: bool,
    },
}

impl Global {
    fn grammar(&self) -> Result<Grammar> {
        Ok(match (&self.grammar, &self.lexicon) {
            (None, None) => shipped_grammar(),
            (Some(r), Some(l)) => load_grammar(r, l)?,
            (Some(r), None) => {
                let rules = read(r)?;
                Grammar::from_text(&rules, SHIPPED_LEXICON)?
            }
            (None, Some(l)) => {
                let lexicon = read(l)?;
                Grammar::from_text(SHIPPED_RULES, &lexicon)?
            }
        })
    }

    fn weights(&self) -> Result<WeightVector> {
        match &self.weights {
            Some(p) => Ok(WeightVector::load(p)?),
            None => Ok(WeightVector::new()),
        }
    }

    fn pipeline(&self) -> Result<PipelineConfig> {
        let mut cfg = PipelineConfig::profile(match self.profile {
            ProfileArg::Turk => Profile::Turk,
            ProfileArg::Stackoverflow => Profile::StackOverflow,
        });
        cfg.beam = self.beam.unwrap_or(cfg.beam);
        cfg.timeout = self.timeout_ms.map_or(cfg.timeout, Duration::from_millis);
        cfg.depth = self.depth.unwrap_or(cfg.depth);
        cfg.min_depth = cfg.min_depth.min(cfg.depth);
        cfg.threads = self.threads.unwrap_or(cfg.threads);
        cfg.seed = self.seed;
        cfg.max_expansions = self.max_expansions;
        cfg.ranking = match self.ranking {
            RankingArg::Model => Ranking::Model,
            RankingArg::MaxCoverage => Ranking::MaxCoverage,
            RankingArg::EmptySketch => Ranking::EmptySketch,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

fn read(p: &Path) -> Result<String> {
    std::fs::read_to_string(p).with_context(|| format!("cannot read {}", p.display()))
}

fn print_json(v: &impl serde::Serialize) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(v)?);
    Ok(())
}

/// Exit status: success or a failure outcome.
type Status = bool;

fn cmd_parse(g: &Global, description: &str) -> Result<Status> {
    let sketches = decode_sketches(&g.grammar()?, description, &g.weights()?, &g.pipeline()?)
        .map_err(anyhow::Error::msg)?;
    if g.format == Format::Json {
        let rows: Vec<_> = sketches
            .iter()
            .enumerate()
            .map(|(i, (s, score))| json!({"rank": i, "score": score, "sketch": s.to_string()}))
            .collect();
        print_json(&rows)?;
    } else {
        for (i, (s, score)) in sketches.iter().enumerate() {
            println!("{i}\t{score:.4}\t{s}");
        }
    }
    Ok(!sketches.is_empty())
}

fn cmd_synth(g: &Global, sketch: &str, examples: Examples) -> Result<Status> {
    let cfg = g.pipeline()?;
    let sketch = parse_sketch(sketch)?;
    let res = synthesize(&sketch, &examples, &cfg.synth_config())?;
    let (status, regex) = match &res.outcome {
        Outcome::Found(r) => ("found", Some(r)),
        Outcome::NotFound => ("not_found", None),
        Outcome::Timeout => ("timeout", None),
    };
    if g.format == Format::Json {
        print_json(&json!({
            "status": status,
            "regex": regex.map(ToString::to_string),
            "standard": regex.map(to_standard_regex),
            "expansions": res.stats.expansions,
        }))?;
    } else {
        match regex {
            Some(r) => println!("{r}\n{}", to_standard_regex(r)),
            None => println!("{status}"),
        }
    }
    Ok(regex.is_some())
}

fn cmd_gen_examples(g: &Global, regex: Option<&str>, data: Option<&Path>, n_pos: usize, n_neg: usize) -> Result<Status> {
    if let Some(path) = data {
        let mut items = load_benchmarks(path)?;
        for (i, b) in items.iter_mut().enumerate() {
            let Some(r) = &b.gold_regex else { continue };
            let seed = g.seed.wrapping_add(i as u64);
            b.examples = generate_examples(r, n_pos, n_neg, DEFAULT_VISIT_LIMIT, seed)
                .with_context(|| format!("item {}", b.id))?;
        }
        print!("{}", to_jsonl(&items));
        return Ok(true);
    }
    let Some(regex) = regex else { bail!("give a regex or --data") };
    let r = parse_regex(regex)?;
    let ex = generate_examples(&r, n_pos, n_neg, DEFAULT_VISIT_LIMIT, g.seed)?;
    if g.format == Format::Json {
        print_json(&json!({"pos": ex.positives, "neg": ex.negatives}))?;
    } else {
        for p in &ex.positives {
            println!("+\t{p}");
        }
        for n in &ex.negatives {
            println!("-\t{n}");
        }
    }
    Ok(true)
}

struct TrainArgs {
    data: PathBuf,
    objective: ObjectiveArg,
    out: PathBuf,
    log: Option<PathBuf>,
    epochs: Option<usize>,
    batch_size: Option<usize>,
    learning_rate: Option<f64>,
    l2: Option<f64>,
    beam: Option<usize>,
}

fn cmd_train(g: &Global, a: TrainArgs) -> Result<Status> {
    let grammar = g.grammar()?;
    let items = load_benchmarks(&a.data)?;
    let mut cfg = match a.objective {
        ObjectiveArg::Mle => TrainConfig::mle(),
        ObjectiveArg::Mml => TrainConfig::mml(),
    };
    cfg.epochs = a.epochs.unwrap_or(cfg.epochs);
    cfg.batch_size = a.batch_size.unwrap_or(cfg.batch_size);
    cfg.learning_rate = a.learning_rate.unwrap_or(cfg.learning_rate);
    cfg.l2 = a.l2.unwrap_or(cfg.l2);
    cfg.beam_size = a.beam.unwrap_or(cfg.beam_size);
    cfg.seed = g.seed;
    let pool = training_pool(g)?;
    let report = match a.objective {
        ObjectiveArg::Mle => {
            // items without a gold sketch fall back to the pseudogold one
            let data: Vec<MleItem> = items
                .iter()
                .filter_map(|b| {
                    let gold = b.gold_sketch.clone().or_else(|| b.gold_regex.as_ref().map(pseudogold_sketch))?;
                    Some(MleItem { tokens: tokenize(&b.description).ok()?, gold })
                })
                .collect();
            pool.install(|| train_mle(&grammar, &data, &cfg))?
        }
        ObjectiveArg::Mml => {
            let data: Vec<MmlItem> = items
                .iter()
                .filter_map(|b| {
                    Some(MmlItem {
                        tokens: tokenize(&b.description).ok()?,
                        gold: b.gold_regex.clone()?,
                        examples: b.examples.clone(),
                    })
                })
                .collect();
            let synth = g.pipeline()?.synth_config();
            let init = g.weights()?;
            pool.install(|| train_mml(&grammar, &data, &cfg, &synth, init))?
        }
    };
    report.weights.save(&a.out)?;
    if let Some(p) = &a.log {
        std::fs::write(p, report.log_csv()).with_context(|| format!("cannot write {}", p.display()))?;
    }
    if g.format == Format::Json {
        let log: Vec<_> = report
            .log
            .iter()
            .map(|l| json!({"epoch": l.epoch, "objective": l.objective, "skipped": l.skipped, "timeouts": l.timeouts}))
            .collect();
        print_json(&json!({"features": report.weights.len(), "log": log}))?;
    } else {
        print!("{}", report.log_csv());
    }
    Ok(true)
}

fn training_pool(g: &Global) -> Result<rayon::ThreadPool> {
    Ok(rayon::ThreadPoolBuilder::new().num_threads(g.pipeline()?.threads).build()?)
}

fn cmd_eval(g: &Global, data: &Path, topn: &[usize], timing: bool) -> Result<Status> {
    let grammar = g.grammar()?;
    let items = load_benchmarks(data)?;
    let cfg = PipelineConfig { record_timing: timing, ..g.pipeline()? };
    let report = evaluate(&grammar, &items, &g.weights()?, &cfg, topn)?;
    if g.format == Format::Json {
        print_json(&report)?;
    } else {
        println!("items\t{}", report.items);
        println!("accuracy\t{:.4}", report.semantic_accuracy);
        println!("consistency\t{:.4}", report.consistency);
        for t in &report.top_n {
            println!("top-{}\t{:.4}", t.n, t.accuracy);
        }
        for r in &report.records {
            println!(
                "{}\t{}\t{}\t{}",
                r.id,
                status_name(r.status),
                r.rank.map_or("-".to_string(), |k| k.to_string()),
                r.regex.as_ref().map_or("-".to_string(), ToString::to_string)
            );
        }
    }
    Ok(true)
}

fn status_name(s: RunStatus) -> &'static str {
    match s {
        RunStatus::Solved => "solved",
        RunStatus::Failed => "failed",
        RunStatus::Contradictory => "contradictory",
        RunStatus::InvalidDescription => "invalid_description",
    }
}

fn print_record(g: &Global, rec: &RunRecord) -> Result<()> {
    if g.format == Format::Json {
        return print_json(rec);
    }
    match &rec.regex {
        Some(r) => {
            println!("{r}");
            println!("{}", to_standard_regex(r));
            println!("rank {}", rec.rank.unwrap_or(0));
        }
        None => {
            println!("{}", status_name(rec.status));
            if let Some(m) = &rec.message {
                println!("{m}");
            }
            for o in &rec.sketches {
                let s = match o.status {
                    SketchStatus::Consistent => "consistent",
                    SketchStatus::NotFound => "not_found",
                    SketchStatus::Timeout => "timeout",
                    SketchStatus::Error => "error",
                };
                println!("{}\t{s}\t{}", o.rank, o.sketch);
            }
        }
    }
    Ok(())
}

fn cmd_run(g: &Global, bench: Benchmark, timing: bool) -> Result<Status> {
    let grammar = g.grammar()?;
    let cfg = PipelineConfig { record_timing: timing, ..g.pipeline()? };
    let rec = run_benchmark(&grammar, &bench, &g.weights()?, &cfg)?;
    print_record(g, &rec)?;
    Ok(rec.status == RunStatus::Solved)
}

fn find_benchmark(data: &Path, id: Option<&str>) -> Result<Benchmark> {
    let items = load_benchmarks(data)?;
    match id {
        Some(id) => items.into_iter().find(|b| b.id == id).with_context(|| format!("no benchmark {id:?}")),
        None => items.into_iter().next().context("dataset is empty"),
    }
}

fn dispatch(cli: Cli) -> Result<Status> {
    let g = &cli.global;
    match cli.command {
        Command::Parse { description } => cmd_parse(g, &description),
        Command::Synth { sketch, positives, negatives } => cmd_synth(g, &sketch, Examples::new(positives, negatives)),
        Command::GenExamples { regex, data, n_pos, n_neg } => {
            cmd_gen_examples(g, regex.as_deref(), data.as_deref(), n_pos, n_neg)
        }
        Command::Train { data, objective, out, log, epochs, batch_size, learning_rate, l2, train_beam } => cmd_train(
            g,
            TrainArgs { data, objective, out, log, epochs, batch_size, learning_rate, l2, beam: train_beam },
        ),
        Command::Eval { data, topn, timing } => cmd_eval(g, &data, &topn, timing),
        Command::Run { data, id, description, positives, negatives, timing } => {
            let bench = match (data, description) {
                (Some(d), _) => find_benchmark(&d, id.as_deref())?,
                (None, Some(text)) => Benchmark::new("cli", text, Examples::new(positives, negatives)),
                (None, None) => bail!("give --data or --description"),
            };
            cmd_run(g, bench, timing)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
