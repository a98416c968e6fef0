use std::fs;
use std::io::Write as _;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use tokio::sync::RwLock;

use lexdrill::server::{router, AppState};
use lexdrill::store::Store;
use lexdrill_core::analysis::{annotate_corpus, parse_corpus, AnnotationRecord};
use lexdrill_core::exercise::{generate_bank_lenient, BankConfig, ExerciseBank, Quotas};
use lexdrill_core::metrics::{score_reading, score_writing};
use lexdrill_core::patterns::{extract_patterns, PatternBank};
use lexdrill_core::progress::ProgressRules;
use lexdrill_core::stats::{parse_scores, summarize_study, DEFAULT_ALPHA};
use lexdrill_core::text::{tokenize, Dialect, GraphemeClusterInventory, Language, Lexicon};

#[derive(Parser)]
#[command(name = "lexdrill", version, about = "Spelling-error analysis and exercise trainer for dyslexia")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify a `wrong<TAB>correct` corpus and extract error patterns.
    Analyze {
        corpus: PathBuf,
        #[arg(long, default_value = "es")]
        lang: Language,
        /// Pattern bank output (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write one annotation record per error as JSON lines.
        #[arg(long)]
        annotations: Option<PathBuf>,
    },
    /// Build a difficulty-graded exercise bank.
    Generate {
        #[arg(long)]
        patterns: PathBuf,
        /// `form<TAB>frequency` lexicon in the patterns' language.
        #[arg(long)]
        lexicon: PathBuf,
        /// Exercises per difficulty level, split evenly over the six types.
        #[arg(long)]
        per_level: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "castilian")]
        dialect: Dialect,
        #[arg(long, default_value_t = 1)]
        min_support: u32,
        /// Write the bank even when some quota cells cannot be filled.
        #[arg(long)]
        allow_shortfall: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Score a dictation transcript against its reference text.
    ScoreDictation {
        #[arg(long = "ref")]
        reference: PathBuf,
        #[arg(long)]
        hyp: PathBuf,
        #[arg(long, default_value = "es")]
        lang: Language,
    },
    /// Score a read-aloud transcript against its reference text.
    ScoreReading {
        #[arg(long = "ref")]
        reference: PathBuf,
        #[arg(long)]
        hyp: PathBuf,
        #[arg(long, default_value = "es")]
        lang: Language,
    },
    /// Summarize a crossover study: per-condition changes and paired tests.
    Stats {
        /// CSV with `child_id,group,test_index,variable,value`.
        #[arg(long)]
        scores: PathBuf,
        #[arg(long, default_value_t = DEFAULT_ALPHA)]
        alpha: f64,
        /// Print the structured record instead of the table.
        #[arg(long)]
        json: bool,
    },
    /// Run the HTTP session service.
    Serve {
        #[arg(long)]
        bank: PathBuf,
        /// Directory for the event log and snapshots.
        #[arg(long)]
        store: PathBuf,
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: std::net::IpAddr,
        /// Serve the files in this directory at `/`.
        #[arg(long = "static")]
        static_dir: Option<PathBuf>,
        /// Answers in the promotion window (new stores only).
        #[arg(long)]
        window: Option<usize>,
        #[arg(long)]
        promote_at: Option<f64>,
        #[arg(long)]
        demote_below: Option<f64>,
    },
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn write_or_print(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.write_all(b"\n")?;
            Ok(())
        }
    }
}

fn tokens_of(path: &Path, lang: Language) -> Result<Vec<String>> {
    Ok(read(path)?
        .lines()
        .flat_map(|l| tokenize(l, lang))
        .collect())
}

fn analyze(corpus: &Path, lang: Language, out: Option<&Path>, annotations: Option<&Path>) -> Result<()> {
    let lines = parse_corpus(&read(corpus)?).with_context(|| corpus.display().to_string())?;
    let (ok, failed) = annotate_corpus(&lines, lang);
    for (line, err) in &failed {
        eprintln!("{}:{line}: skipped: {err}", corpus.display());
    }
    if let Some(path) = annotations {
        let mut text = String::new();
        for a in &ok {
            for r in AnnotationRecord::from_annotation(a) {
                text.push_str(&serde_json::to_string(&r)?);
                text.push('\n');
            }
        }
        fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
    }
    let bank = extract_patterns(&ok, &GraphemeClusterInventory::builtin(lang));
    eprintln!(
        "{} pairs annotated, {} skipped, {} patterns",
        ok.len(),
        failed.len(),
        bank.patterns.len()
    );
    write_or_print(out, &bank.to_json())
}

#[allow(clippy::too_many_arguments)]
fn generate(
    patterns: &Path,
    lexicon: &Path,
    per_level: usize,
    seed: u64,
    dialect: Dialect,
    min_support: u32,
    allow_shortfall: bool,
    out: Option<&Path>,
) -> Result<()> {
    let patterns = PatternBank::from_json(&read(patterns)?)
        .with_context(|| patterns.display().to_string())?;
    let lexicon = Lexicon::parse_tsv(patterns.language, &read(lexicon)?)
        .with_context(|| lexicon.display().to_string())?;
    let mut config = BankConfig::new(Quotas::per_level(per_level), seed);
    config.dialect = dialect;
    config.min_support = min_support;
    let (bank, shortfalls) = generate_bank_lenient(&lexicon, &patterns, &config)?;
    for s in &shortfalls {
        eprintln!(
            "shortfall: {} at {}: {} of {}",
            s.exercise_type, s.level, s.produced, s.wanted
        );
    }
    if !shortfalls.is_empty() && !allow_shortfall {
        bail!("{} quota cells could not be filled (use --allow-shortfall to keep the partial bank)", shortfalls.len());
    }
    eprintln!("{} exercises", bank.exercises.len());
    write_or_print(out, &bank.to_json())
}

async fn serve(
    bank: &Path,
    store: &Path,
    addr: SocketAddr,
    static_dir: Option<PathBuf>,
    rules: Option<ProgressRules>,
) -> Result<()> {
    let bank = ExerciseBank::from_json(&read(bank)?).with_context(|| bank.display().to_string())?;
    let store = Store::open(store, rules)?;
    let state = Arc::new(AppState {
        bank,
        store: RwLock::new(store),
    });
    let listener = tokio::net::TcpListener::bind(addr)
        .await
        .with_context(|| format!("binding {addr}"))?;
    let local = listener.local_addr()?;
    println!("listening on http://{local}");
    std::io::stdout().flush()?;
    axum::serve(listener, router(state.clone(), static_dir))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await?;
    state.store.read().await.snapshot()?;
    Ok(())
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Analyze {
            corpus,
            lang,
            out,
            annotations,
        } => analyze(&corpus, lang, out.as_deref(), annotations.as_deref()),
        Command::Generate {
            patterns,
            lexicon,
            per_level,
            seed,
            dialect,
            min_support,
            allow_shortfall,
            out,
        } => generate(
            &patterns,
            &lexicon,
            per_level,
            seed,
            dialect,
            min_support,
            allow_shortfall,
            out.as_deref(),
        ),
        Command::ScoreDictation { reference, hyp, lang } => {
            let score = score_writing(&tokens_of(&reference, lang)?, &tokens_of(&hyp, lang)?, lang)?;
            write_or_print(None, &serde_json::to_string_pretty(&score)?)
        }
        Command::ScoreReading { reference, hyp, lang } => {
            let score = score_reading(&tokens_of(&reference, lang)?, &tokens_of(&hyp, lang)?, lang)?;
            write_or_print(None, &serde_json::to_string_pretty(&score)?)
        }
        Command::Stats { scores, alpha, json } => {
            let rows = parse_scores(&read(&scores)?).with_context(|| scores.display().to_string())?;
            let summary = summarize_study(&rows, alpha)?;
            for x in &summary.excluded {
                eprintln!("excluded {}: missing {}", x.child_id, x.missing.join(", "));
            }
            if json {
                write_or_print(None, &serde_json::to_string_pretty(&summary)?)
            } else {
                print!("{}", summary.to_table());
                Ok(())
            }
        }
        Command::Serve {
            bank,
            store,
            port,
            host,
            static_dir,
            window,
            promote_at,
            demote_below,
        } => {
            let rules = (window.is_some() || promote_at.is_some() || demote_below.is_some()).then(|| {
                let d = ProgressRules::default();
                ProgressRules {
                    window: window.unwrap_or(d.window),
                    promote_at: promote_at.unwrap_or(d.promote_at),
                    demote_below: demote_below.unwrap_or(d.demote_below),
                }
            });
            if let Some(r) = rules {
                if r.window == 0 || !(0.0..=1.0).contains(&r.promote_at) || !(0.0..=1.0).contains(&r.demote_below) {
                    bail!("invalid progression rules {r:?}");
                }
            }
            tokio::runtime::Runtime::new()?.block_on(serve(
                &bank,
                &store,
                SocketAddr::new(host, port),
                static_dir,
                rules,
            ))
        }
    }
}

fn main() -> ExitCode {
    tracing_subscriber::fmt()
        .with_env_filter(tracing_subscriber::EnvFilter::from_default_env())
        .with_writer(std::io::stderr)
        .init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
