//! `oovctx` command-line front end.
//!
//! Subcommands: `select-data` (Jaccard article selection), `train` (PMI
//! table or neural LM), `rescore` (lattice expansion + context-model path
//! selection), `eval` (BLEU / unigram precision), and `calibrate-gamma`
//! (merge-threshold sweep).
//!
//! Exit codes: 0 success, 1 usage error, 2 data/validation error,
//! 3 numeric failure. Logs are key=value lines on standard error; data
//! outputs go to files only.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};

use oovctx_core::corpus::{Document, HypothesisRecord, Lexicon};
use oovctx_core::eval::evaluate;
use oovctx_core::graphrank::PageRankConfig;
use oovctx_core::lattice::TranslationLattice;
use oovctx_core::lm::{self, LmVocab, ModelKind, TrainConfig};
use oovctx_core::pmi::{count_cooccurrences, ContextScope, PmiConfig};
use oovctx_core::rescore::RescoreConfig;

use oovctx::formats;
use oovctx::pipeline::{self, ContextModel, PipelineError};

#[derive(Parser)]
#[command(
    name = "oovctx",
    version,
    about = "OOV translation disambiguation via lattice rescoring with target-language context models"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Select LM training articles by Jaccard vocabulary overlap.
    SelectData(SelectDataArgs),
    /// Train a PMI co-occurrence table or a neural LM (LSTM / DCLM).
    Train(TrainArgs),
    /// Expand hypotheses into lattices and pick paths with a context model.
    Rescore(RescoreArgs),
    /// Score rescored output against references (BLEU, unigram precision).
    Eval(EvalArgs),
    /// Sweep the merge threshold gamma and report score/effort trade-offs.
    CalibrateGamma(CalibrateGammaArgs),
}

#[derive(Args)]
struct SelectDataArgs {
    /// Candidate articles (documents JSONL).
    #[arg(long)]
    articles: PathBuf,
    /// Development reference documents (documents JSONL).
    #[arg(long)]
    dev_refs: PathBuf,
    /// One-best test hypotheses (hypotheses JSONL).
    #[arg(long)]
    test_hyps: PathBuf,
    /// Keep articles with Jaccard index strictly above this value.
    #[arg(long, default_value_t = 0.1)]
    threshold: f64,
    /// Output path for the selected articles (documents JSONL).
    #[arg(long)]
    output: PathBuf,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TrainModelArg {
    Pmi,
    Lstm,
    Dclm,
}

#[derive(Args)]
struct TrainArgs {
    /// Which model to train.
    #[arg(long, value_enum)]
    model: TrainModelArg,
    /// Training corpus (documents JSONL).
    #[arg(long)]
    corpus: PathBuf,
    /// Output model file (PMI table or NNLM parameters).
    #[arg(long)]
    output: PathBuf,
    /// Stopword list (pmi only; one token per line).
    #[arg(long)]
    stopwords: Option<PathBuf>,
    /// Co-occurrence window; 0 treats each sentence as one window.
    #[arg(long, default_value_t = 0)]
    window_size: usize,
    /// Hypotheses whose tokens and OOV candidates extend the LM vocabulary.
    #[arg(long)]
    hypotheses: Option<PathBuf>,
    /// Bilingual lexicon (TSV) for candidate vocabulary.
    #[arg(long)]
    lexicon: Option<PathBuf>,
    /// Related-language lexicon (TSV) for Levenshtein retrieval.
    #[arg(long)]
    related_lexicon: Option<PathBuf>,
    /// Maximum edit distance for related-language retrieval.
    #[arg(long, default_value_t = 2)]
    max_distance: usize,
    /// Candidate cap per OOV word.
    #[arg(long, default_value_t = 30)]
    top_k: usize,
    #[arg(long, default_value_t = 48)]
    hidden: usize,
    #[arg(long, default_value_t = 48)]
    embed: usize,
    #[arg(long, default_value_t = 2)]
    layers: usize,
    #[arg(long, default_value_t = 0.1)]
    learning_rate: f64,
    #[arg(long, default_value_t = 0.9)]
    momentum: f64,
    #[arg(long, default_value_t = 5.0)]
    clip_norm: f64,
    #[arg(long, default_value_t = 10)]
    epochs: usize,
    /// Document chunk length in sentences (one update per chunk).
    #[arg(long, default_value_t = 4)]
    chunk_sentences: usize,
    #[arg(long, default_value_t = 0.08)]
    init_scale: f64,
    #[arg(long, default_value_t = 42)]
    seed: u64,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModelArg {
    Pmi,
    Pagerank,
    Lstm,
    Dclm,
    /// Uniform random candidate choice (baseline).
    Random,
}

impl ModelArg {
    fn as_str(self) -> &'static str {
        match self {
            ModelArg::Pmi => "pmi",
            ModelArg::Pagerank => "pagerank",
            ModelArg::Lstm => "lstm",
            ModelArg::Dclm => "dclm",
            ModelArg::Random => "random",
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ScopeArg {
    Sentence,
    Doc,
}

#[derive(Args)]
struct RescoreArgs {
    /// Context model selecting lattice paths.
    #[arg(long, value_enum)]
    model: ModelArg,
    /// Model file: PMI table for pmi/pagerank, NNLM file for lstm/dclm.
    #[arg(long)]
    model_file: Option<PathBuf>,
    /// Hypotheses (JSONL) to expand and rescore.
    #[arg(long, conflicts_with = "lattices")]
    hypotheses: Option<PathBuf>,
    /// Pre-built lattices (lattice text format) instead of hypotheses.
    #[arg(long)]
    lattices: Option<PathBuf>,
    /// Output records (JSONL), ordered by (doc_id, sent_index).
    #[arg(long)]
    output: PathBuf,
    /// Write the expanded lattices (lattice text format).
    #[arg(long)]
    dump_lattices: Option<PathBuf>,
    #[arg(long)]
    lexicon: Option<PathBuf>,
    #[arg(long)]
    related_lexicon: Option<PathBuf>,
    #[arg(long, default_value_t = 2)]
    max_distance: usize,
    #[arg(long, default_value_t = 30)]
    top_k: usize,
    #[arg(long)]
    stopwords: Option<PathBuf>,
    /// Context scope for the model.
    #[arg(long, value_enum, default_value_t = ScopeArg::Sentence)]
    scope: ScopeArg,
    /// Previous sentences in document scope (k_prev).
    #[arg(long, default_value_t = 4)]
    context_sentences: usize,
    /// Following sentences in document scope (pmi only).
    #[arg(long, default_value_t = 0)]
    context_next: usize,
    /// Score assigned to unseen PMI pairs.
    #[arg(long, default_value_t = -20.0, allow_hyphen_values = true)]
    floor_logprob: f64,
    /// PageRank damping factor d.
    #[arg(long, default_value_t = 0.85)]
    damping: f64,
    #[arg(long, default_value_t = 200)]
    iterations: usize,
    #[arg(long, default_value_t = 1e-10)]
    tolerance: f64,
    /// Use the literal unweighted PageRank formula (degree shares).
    #[arg(long)]
    unweighted: bool,
    /// Merge distance threshold (lstm/dclm); 0 is exact search.
    #[arg(long, default_value_t = 0.0)]
    gamma: f64,
    /// Frontier cap per lattice position (lstm/dclm).
    #[arg(long, default_value_t = 64)]
    max_frontier: usize,
    /// Disable the word-keyed merge cache (results are identical).
    #[arg(long)]
    no_merge_cache: bool,
    /// Worker threads; parallelism is across documents only.
    #[arg(long, default_value_t = 1)]
    workers: usize,
    /// Enrich each slot's candidates with its aligned reference token.
    #[arg(long, requires = "alignment")]
    diagnostic: bool,
    /// Substitute the aligned reference at every slot (oracle ceiling).
    #[arg(long, requires = "alignment", conflicts_with = "diagnostic")]
    topline: bool,
    /// Slot alignment (TSV: doc_id, sent_index, pos, reference_token).
    #[arg(long)]
    alignment: Option<PathBuf>,
    /// Seed for the random baseline.
    #[arg(long, default_value_t = 42)]
    seed: u64,
}

#[derive(Args)]
struct EvalArgs {
    /// Hypotheses: rescore output JSONL or documents JSONL (auto-detected).
    #[arg(long)]
    hypotheses: PathBuf,
    /// Reference documents (documents JSONL).
    #[arg(long)]
    references: PathBuf,
    /// Report file (JSON); stdout when omitted.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct CalibrateGammaArgs {
    /// NNLM model file (lstm or dclm).
    #[arg(long)]
    model_file: PathBuf,
    #[arg(long)]
    hypotheses: PathBuf,
    #[arg(long)]
    lexicon: Option<PathBuf>,
    #[arg(long)]
    related_lexicon: Option<PathBuf>,
    #[arg(long, default_value_t = 2)]
    max_distance: usize,
    #[arg(long, default_value_t = 30)]
    top_k: usize,
    /// Comma-separated gamma values to sweep.
    #[arg(long, default_value = "0,0.25,0.5,1,2,4")]
    gammas: String,
    #[arg(long, default_value_t = 64)]
    max_frontier: usize,
    #[arg(long, default_value_t = 4)]
    context_sentences: usize,
    /// TSV report; stdout when omitted.
    #[arg(long)]
    output: Option<PathBuf>,
}

fn main() {
    std::process::exit(run());
}

fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return code;
        }
    };
    let result = match cli.command {
        Command::SelectData(args) => cmd_select_data(args),
        Command::Train(args) => cmd_train(args),
        Command::Rescore(args) => cmd_rescore(args),
        Command::Eval(args) => cmd_eval(args),
        Command::CalibrateGamma(args) => cmd_calibrate_gamma(args),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            pipeline::log_kv(&[("event", "error".into()), ("message", e.to_string())]);
            e.exit_code()
        }
    }
}

fn load_lexicon(path: Option<&PathBuf>) -> Result<Lexicon, PipelineError> {
    match path {
        Some(p) => Ok(formats::read_lexicon(p)?),
        None => Ok(Lexicon::new()),
    }
}

fn load_stopwords(path: Option<&PathBuf>) -> Result<BTreeSet<String>, PipelineError> {
    match path {
        Some(p) => Ok(formats::read_stopwords(p)?),
        None => Ok(BTreeSet::new()),
    }
}

fn cmd_select_data(args: SelectDataArgs) -> Result<(), PipelineError> {
    let articles = formats::read_documents(&args.articles)?;
    let dev_refs = formats::read_documents(&args.dev_refs)?;
    let test_hyps = formats::read_hypotheses(&args.test_hyps)?;
    let mut target: BTreeSet<&str> = BTreeSet::new();
    for doc in &dev_refs {
        target.extend(doc.vocab());
    }
    for hyp in &test_hyps {
        target.extend(hyp.tokens.iter().map(String::as_str));
    }
    let (selected, indices) = pipeline::select_with_report(&articles, &target, args.threshold);
    if selected.is_empty() {
        return Err(PipelineError::Data(format!(
            "no article exceeded the Jaccard threshold {}",
            args.threshold
        )));
    }
    let mean = indices.iter().sum::<f64>() / indices.len() as f64;
    formats::write_documents(&args.output, &selected)?;
    pipeline::log_kv(&[
        ("event", "select_data".into()),
        ("articles", articles.len().to_string()),
        ("selected", selected.len().to_string()),
        ("mean_jaccard", format!("{mean:.6}")),
        ("output", args.output.display().to_string()),
    ]);
    Ok(())
}

/// Vocabulary for the neural LMs: training-corpus tokens, then hypothesis
/// tokens, then the OOV translation candidates.
fn build_vocab(
    corpus: &[Document],
    hypotheses: &[HypothesisRecord],
    lexicon: &Lexicon,
    related: &Lexicon,
    max_distance: usize,
    top_k: usize,
) -> LmVocab {
    let candidates = pipeline::build_candidates(hypotheses, lexicon, related, max_distance, top_k);
    let corpus_tokens = corpus
        .iter()
        .flat_map(|d| d.sentences.iter())
        .flat_map(|s| s.tokens.iter().map(String::as_str));
    let hyp_tokens = hypotheses
        .iter()
        .flat_map(|h| h.tokens.iter().map(String::as_str));
    let candidate_tokens = hypotheses
        .iter()
        .flat_map(|h| h.oov_slots.iter())
        .filter_map(|slot| candidates.get(&slot.source_word))
        .flat_map(|set| set.candidates.iter().map(String::as_str));
    LmVocab::build(corpus_tokens.chain(hyp_tokens).chain(candidate_tokens))
}

fn cmd_train(args: TrainArgs) -> Result<(), PipelineError> {
    let corpus = formats::read_documents(&args.corpus)?;
    match args.model {
        TrainModelArg::Pmi => {
            let config = PmiConfig {
                window_size: args.window_size,
                stopwords: load_stopwords(args.stopwords.as_ref())?,
                ..PmiConfig::default()
            };
            let table = count_cooccurrences(&corpus, &config);
            formats::write_pmi_table(&args.output, &table)?;
            pipeline::log_kv(&[
                ("event", "train_pmi".into()),
                ("windows", table.window_count.to_string()),
                ("window_size", table.window_size.to_string()),
                ("output", args.output.display().to_string()),
            ]);
        }
        TrainModelArg::Lstm | TrainModelArg::Dclm => {
            let kind = match args.model {
                TrainModelArg::Lstm => ModelKind::Lstm,
                _ => ModelKind::Dclm,
            };
            let hypotheses = match &args.hypotheses {
                Some(p) => formats::read_hypotheses(p)?,
                None => Vec::new(),
            };
            let lexicon = load_lexicon(args.lexicon.as_ref())?;
            let related = load_lexicon(args.related_lexicon.as_ref())?;
            let vocab = build_vocab(
                &corpus,
                &hypotheses,
                &lexicon,
                &related,
                args.max_distance,
                args.top_k,
            );
            let config = TrainConfig {
                hidden: args.hidden,
                embed: args.embed,
                layers: args.layers,
                learning_rate: args.learning_rate,
                momentum: args.momentum,
                clip_norm: args.clip_norm,
                epochs: args.epochs,
                chunk_sentences: args.chunk_sentences,
                init_scale: args.init_scale,
                seed: args.seed,
            };
            pipeline::log_kv(&[
                ("event", "train_start".into()),
                ("kind", kind.as_str().into()),
                ("vocab", vocab.len().to_string()),
                ("documents", corpus.len().to_string()),
            ]);
            let trained = lm::train(kind, &corpus, vocab, &config)?;
            for (epoch, loss) in trained.losses.iter().enumerate() {
                pipeline::log_kv(&[
                    ("event", "epoch".into()),
                    ("epoch", epoch.to_string()),
                    ("loss", format!("{loss}")),
                ]);
            }
            formats::write_model(&args.output, &trained.params)?;
            pipeline::log_kv(&[
                ("event", "train_done".into()),
                ("kind", kind.as_str().into()),
                ("output", args.output.display().to_string()),
            ]);
        }
    }
    Ok(())
}

fn require_model_file(path: &Option<PathBuf>) -> Result<&Path, PipelineError> {
    path.as_deref()
        .ok_or_else(|| PipelineError::Data("--model-file is required for this model".into()))
}

fn cmd_rescore(args: RescoreArgs) -> Result<(), PipelineError> {
    // Topline bypasses modeling entirely.
    if args.topline {
        let hyp_path = args
            .hypotheses
            .as_ref()
            .ok_or_else(|| PipelineError::Data("--topline requires --hypotheses".into()))?;
        let hypotheses = formats::read_hypotheses(hyp_path)?;
        let alignment = formats::read_alignment(args.alignment.as_ref().unwrap())?;
        let (mut records, unaligned) = pipeline::topline_records(&hypotheses, &alignment);
        records.sort_by(|a, b| (&a.doc_id, a.sent_index).cmp(&(&b.doc_id, b.sent_index)));
        formats::write_output_records(&args.output, &records)?;
        pipeline::log_kv(&[
            ("event", "rescore_done".into()),
            ("model", "topline".into()),
            ("sentences", records.len().to_string()),
            ("unaligned_slots", unaligned.to_string()),
        ]);
        return Ok(());
    }

    // Assemble per-document lattices.
    let mut missing_alignments = 0u64;
    let documents: Vec<(String, Vec<TranslationLattice>)> = match (&args.hypotheses, &args.lattices)
    {
        (Some(hyp_path), None) => {
            let hypotheses = formats::read_hypotheses(hyp_path)?;
            let lexicon = load_lexicon(args.lexicon.as_ref())?;
            let related = load_lexicon(args.related_lexicon.as_ref())?;
            let candidates = pipeline::build_candidates(
                &hypotheses,
                &lexicon,
                &related,
                args.max_distance,
                args.top_k,
            );
            let alignment = match (args.diagnostic, &args.alignment) {
                (true, Some(p)) => Some(formats::read_alignment(p)?),
                _ => None,
            };
            pipeline::group_by_document(hypotheses)
                .into_iter()
                .map(|(id, hyps)| {
                    pipeline::build_document_lattices(
                        &hyps,
                        &candidates,
                        alignment.as_ref(),
                        &mut missing_alignments,
                    )
                    .map(|lats| (id, lats))
                })
                .collect::<Result<_, _>>()?
        }
        (None, Some(lat_path)) => group_lattices(formats::read_lattices(lat_path)?),
        _ => {
            return Err(PipelineError::Data(
                "exactly one of --hypotheses or --lattices is required".into(),
            ))
        }
    };

    if let Some(dump) = &args.dump_lattices {
        let all: Vec<TranslationLattice> = documents
            .iter()
            .flat_map(|(_, lats)| lats.iter().cloned())
            .collect();
        formats::write_lattices(dump, &all)?;
    }

    let stopwords = load_stopwords(args.stopwords.as_ref())?;
    let scope = match args.scope {
        ScopeArg::Sentence => ContextScope::Sentence,
        ScopeArg::Doc => ContextScope::Document {
            k_prev: args.context_sentences,
            k_next: args.context_next,
        },
    };
    let model = match args.model {
        ModelArg::Pmi => ContextModel::Pmi {
            table: formats::read_pmi_table(require_model_file(&args.model_file)?)?,
            config: PmiConfig {
                window_size: 0,
                floor_logprob: args.floor_logprob,
                stopwords,
                context_scope: scope,
            },
        },
        ModelArg::Pagerank => ContextModel::PageRank {
            table: formats::read_pmi_table(require_model_file(&args.model_file)?)?,
            pmi_config: PmiConfig {
                window_size: 0,
                floor_logprob: args.floor_logprob,
                stopwords,
                context_scope: scope,
            },
            config: PageRankConfig {
                damping: args.damping,
                max_iterations: args.iterations,
                tolerance: args.tolerance,
                unweighted: args.unweighted,
                scope,
            },
        },
        ModelArg::Lstm | ModelArg::Dclm => {
            let params = formats::read_model(require_model_file(&args.model_file)?)?;
            let expected = match args.model {
                ModelArg::Lstm => ModelKind::Lstm,
                _ => ModelKind::Dclm,
            };
            if params.kind() != expected {
                return Err(PipelineError::Data(format!(
                    "model file holds a {} model but --model {} was requested",
                    params.kind().as_str(),
                    expected.as_str()
                )));
            }
            ContextModel::Neural {
                params,
                config: RescoreConfig {
                    gamma: args.gamma,
                    max_frontier: args.max_frontier,
                    context_sentences: match args.scope {
                        ScopeArg::Sentence => 0,
                        ScopeArg::Doc => args.context_sentences.max(1),
                    },
                    use_cache: !args.no_merge_cache,
                },
            }
        }
        ModelArg::Random => ContextModel::Random { seed: args.seed },
    };

    let (mut records, stats) = pipeline::rescore_all(&documents, &model, args.workers)?;
    records.sort_by(|a, b| (&a.doc_id, a.sent_index).cmp(&(&b.doc_id, b.sent_index)));
    formats::write_output_records(&args.output, &records)?;
    pipeline::log_kv(&[
        ("event", "rescore_done".into()),
        ("model", args.model.as_str().into()),
        ("documents", documents.len().to_string()),
        ("sentences", stats.sentences.to_string()),
        ("slots", stats.slots.to_string()),
        ("step_evals", stats.step_evals.to_string()),
        ("merges", stats.merges.to_string()),
        ("max_frontier", stats.max_frontier.to_string()),
        ("missing_alignments", missing_alignments.to_string()),
        ("output", args.output.display().to_string()),
    ]);
    Ok(())
}

fn group_lattices(
    lattices: Vec<TranslationLattice>,
) -> Vec<(String, Vec<TranslationLattice>)> {
    let mut order: Vec<String> = Vec::new();
    let mut groups: std::collections::BTreeMap<String, Vec<TranslationLattice>> =
        std::collections::BTreeMap::new();
    for lattice in lattices {
        if !groups.contains_key(&lattice.doc_id) {
            order.push(lattice.doc_id.clone());
        }
        groups.entry(lattice.doc_id.clone()).or_default().push(lattice);
    }
    order
        .into_iter()
        .map(|id| {
            let mut group = groups.remove(&id).unwrap();
            group.sort_by_key(|l| l.sent_index);
            (id, group)
        })
        .collect()
}

fn read_eval_hypotheses(path: &Path) -> Result<Vec<(String, usize, Vec<String>)>, PipelineError> {
    // Rescore output records and plain documents are both accepted.
    match formats::read_output_records(path) {
        Ok(records) if !records.is_empty() => Ok(records
            .into_iter()
            .map(|r| (r.doc_id, r.sent_index, r.tokens))
            .collect()),
        _ => {
            let documents = formats::read_documents(path)?;
            Ok(documents
                .into_iter()
                .flat_map(|doc| {
                    doc.sentences
                        .into_iter()
                        .enumerate()
                        .map(move |(i, s)| (doc.id.clone(), i, s.tokens))
                        .collect::<Vec<_>>()
                })
                .collect())
        }
    }
}

fn cmd_eval(args: EvalArgs) -> Result<(), PipelineError> {
    let hypotheses = read_eval_hypotheses(&args.hypotheses)?;
    let references = formats::read_documents(&args.references)?;
    let (hyp_sentences, ref_sentences) = pipeline::pair_for_eval(&hypotheses, &references)?;
    let report = evaluate(&hyp_sentences, &ref_sentences)?;
    match &args.output {
        Some(path) => formats::write_report(path, &report)?,
        None => println!(
            "{}",
            serde_json::json!({
                "bleu": report.bleu,
                "unigram_precision": report.unigram_precision,
                "sentence_count": report.sentence_count,
                "token_count": report.token_count,
            })
        ),
    }
    pipeline::log_kv(&[
        ("event", "eval_done".into()),
        ("bleu", format!("{:.4}", report.bleu)),
        ("unigram_precision", format!("{:.4}", report.unigram_precision)),
        ("sentences", report.sentence_count.to_string()),
    ]);
    Ok(())
}

fn cmd_calibrate_gamma(args: CalibrateGammaArgs) -> Result<(), PipelineError> {
    let params = formats::read_model(&args.model_file)?;
    let hypotheses = formats::read_hypotheses(&args.hypotheses)?;
    let lexicon = load_lexicon(args.lexicon.as_ref())?;
    let related = load_lexicon(args.related_lexicon.as_ref())?;
    let candidates =
        pipeline::build_candidates(&hypotheses, &lexicon, &related, args.max_distance, args.top_k);
    let mut missing = 0u64;
    let documents: Vec<(String, Vec<TranslationLattice>)> = pipeline::group_by_document(hypotheses)
        .into_iter()
        .map(|(id, hyps)| {
            pipeline::build_document_lattices(&hyps, &candidates, None, &mut missing)
                .map(|lats| (id, lats))
        })
        .collect::<Result<_, _>>()?;
    let gammas: Vec<f64> = args
        .gammas
        .split(',')
        .map(|g| {
            g.trim()
                .parse::<f64>()
                .map_err(|_| PipelineError::Data(format!("bad gamma value {g:?}")))
        })
        .collect::<Result<_, _>>()?;
    let base = RescoreConfig {
        max_frontier: args.max_frontier,
        context_sentences: args.context_sentences,
        ..RescoreConfig::default()
    };
    let points = pipeline::calibrate_gamma(&documents, &params, &base, &gammas)?;
    let mut table = String::from("gamma\tmean_logprob\tstep_evals\tmerges\tmax_frontier\n");
    for p in &points {
        table.push_str(&format!(
            "{}\t{}\t{}\t{}\t{}\n",
            p.gamma, p.mean_logprob, p.step_evals, p.merges, p.max_frontier
        ));
    }
    match &args.output {
        Some(path) => std::fs::write(path, &table)
            .map_err(|e| PipelineError::Data(format!("{}: {e}", path.display())))?,
        None => print!("{table}"),
    }
    pipeline::log_kv(&[
        ("event", "calibrate_done".into()),
        ("points", points.len().to_string()),
    ]);
    Ok(())
}
