//! Orchestration CLI: build, validate, stats, benchmark generation and
//! evaluation, asset hashing, and fixture materialization.

use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use factforge_core::canon::{self, canon_string};

use factforge::{bench_io, build, config::BuildConfig, fixture, statsio, validate};

#[derive(Parser)]
#[command(name = "factforge", version, about = "Deterministic fact-graph builder and benchmark suite")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full pipeline: ingest, ground, aggregate, derive, release.
    Build {
        /// Build configuration (canonical JSON).
        #[arg(long)]
        config: PathBuf,
        /// Also generate the benchmark artifacts.
        #[arg(long)]
        bench: bool,
        /// Worker count; never affects outputs.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// Output root override (also via FACTFORGE_OUT).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Re-localize released evidence pointers against the dumps.
    ValidatePointers {
        #[arg(long)]
        config: PathBuf,
        /// Build directory holding manifest.json.
        #[arg(long)]
        build: PathBuf,
        /// Check only the first N senses in id order.
        #[arg(long)]
        sample: Option<usize>,
    },
    /// Recompute corpus diagnostics from released shards.
    Stats {
        #[arg(long)]
        build: PathBuf,
    },
    /// Benchmark generation and evaluation.
    Bench {
        #[command(subcommand)]
        command: BenchCommand,
    },
    /// Print a language pack's content hash.
    Pack {
        #[command(subcommand)]
        command: HashCommand,
    },
    /// Print a normalization policy's version hash.
    Policy {
        #[command(subcommand)]
        command: HashCommand,
    },
    /// Materialize the deterministic demo corpus and its configuration.
    Fixture {
        #[arg(long)]
        out: PathBuf,
        /// Person count; the other populations scale with the defaults.
        #[arg(long)]
        people: Option<usize>,
    },
}

#[derive(Subcommand)]
enum BenchCommand {
    /// Generate split files, triples, questions and claims (runs the
    /// deterministic pipeline with benchmark output enabled).
    Build {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Evaluate predictions for one task.
    Eval {
        #[command(subcommand)]
        task: EvalTask,
    },
}

#[derive(Subcommand)]
enum EvalTask {
    /// Filtered link prediction: MRR and Hits@10.
    Kgc {
        /// Directory with test.tsv and all_true.tsv.
        #[arg(long)]
        gold: PathBuf,
        #[arg(long)]
        predictions: PathBuf,
    },
    /// Executable semantic parsing: Macro F1 and Valid%.
    Mkqa {
        /// Build directory (the executor needs the graph).
        #[arg(long)]
        build: PathBuf,
        /// questions.jsonl
        #[arg(long)]
        gold: PathBuf,
        #[arg(long)]
        predictions: PathBuf,
    },
    /// Fact checking: accuracy, macro F1, Recall@5, span F1.
    Mfc {
        /// claims.jsonl
        #[arg(long)]
        gold: PathBuf,
        #[arg(long)]
        predictions: PathBuf,
    },
}

#[derive(Subcommand)]
enum HashCommand {
    /// Print the content hash of the given file.
    Hash {
        #[arg(long, value_name = "FILE")]
        file: PathBuf,
    },
}

fn main() {
    if let Err(e) = run() {
        eprintln!("error: {:#}", e);
        std::process::exit(1);
    }
}

fn run() -> Result<()> {
    match Cli::parse().command {
        Command::Build { config, bench, jobs, out } => {
            let mut cfg = BuildConfig::load(&config)?;
            if let Some(dir) = out {
                cfg.out = dir;
            }
            let outputs = build::run_build(&cfg, bench, jobs)?;
            println!("build {} complete", outputs.manifest.build_id);
            println!(
                "statements={} senses={} synsets={} edges={} ungrounded={}",
                outputs.statements.len(),
                outputs.senses.len(),
                outputs.synsets.len(),
                outputs.edges.len(),
                outputs.reasons.len()
            );
            println!("out: {}", outputs.out_dir.display());
        }
        Command::ValidatePointers { config, build, sample } => {
            let cfg = BuildConfig::load(&config)?;
            let report = validate::validate_pointers(&cfg, &build, sample)?;
            println!(
                "checked={} exact={} drift={} fail={}",
                report.total(),
                report.exact,
                report.drift,
                report.fail
            );
            for (id, class, detail) in report.defects.iter().take(20) {
                println!("  {} {} {}", class.as_str(), id, detail);
            }
            if report.drift + report.fail > 0 {
                std::process::exit(2);
            }
        }
        Command::Stats { build } => {
            let report = statsio::stats(&build)?;
            println!("{}", canon_string(&report.to_canon()));
        }
        Command::Bench { command } => match command {
            BenchCommand::Build { config, jobs } => {
                let cfg = BuildConfig::load(&config)?;
                let outputs = build::run_build(&cfg, true, jobs)?;
                println!(
                    "bench artifacts written under {}",
                    outputs.out_dir.join("bench").display()
                );
            }
            BenchCommand::Eval { task } => match task {
                EvalTask::Kgc { gold, predictions } => {
                    let m = bench_io::eval_kgc(&gold, &predictions)?;
                    println!("queries={} mrr={:.6} hits@10={:.6}", m.query_count, m.mrr, m.hits_at_10);
                }
                EvalTask::Mkqa { build, gold, predictions } => {
                    let m = bench_io::eval_mkqa(&build, &gold, &predictions)?;
                    println!(
                        "instances={} macro_f1={:.6} valid={:.4}",
                        m.instances, m.macro_f1, m.valid_pct
                    );
                }
                EvalTask::Mfc { gold, predictions } => {
                    let m = bench_io::eval_mfc(&gold, &predictions)?;
                    println!(
                        "claims={} accuracy={:.6} macro_f1={:.6} recall@5={:.6} span_f1={:.6}",
                        m.claims, m.accuracy, m.macro_f1, m.recall_at_5, m.span_f1
                    );
                }
            },
        },
        Command::Pack { command: HashCommand::Hash { file } } => {
            let text = std::fs::read_to_string(&file)
                .with_context(|| format!("reading {}", file.display()))?;
            let pack = factforge_core::pack::LanguagePack::from_canon(&canon::parse(&text)?)
                .map_err(|e| anyhow::anyhow!("{}", e))?;
            println!("{}", pack.pack_id);
        }
        Command::Policy { command: HashCommand::Hash { file } } => {
            let text = std::fs::read_to_string(&file)
                .with_context(|| format!("reading {}", file.display()))?;
            let policy =
                factforge_core::policy::NormalizationPolicy::from_canon(&canon::parse(&text)?)
                    .map_err(|e| anyhow::anyhow!("{}", e))?;
            println!("{}", policy.version);
        }
        Command::Fixture { out, people } => {
            let mut spec = fixture::FixtureSpec::default();
            if let Some(n) = people {
                spec.people = n;
            }
            let paths = fixture::generate(&out, &spec)?;
            println!("fixture written to {}", paths.root.display());
            println!("config: {}", paths.config.display());
        }
    }
    Ok(())
}
