//! On-disk formats: JSONL documents/hypotheses/output records, TSV lexicons
//! and slot alignments, stopword lists, and the versioned text formats for
//! lattices, PMI tables, and neural model parameters.
//!
//! Writers are canonical: floats use Rust's shortest round-trip formatting,
//! map-like data is emitted in sorted order, and re-reading then re-writing
//! a file reproduces it byte for byte.

use std::collections::BTreeSet;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use oovctx_core::corpus::{Document, HypothesisRecord, Lexicon, OovSlot, Sentence};
use oovctx_core::eval::{EvalReport, SlotAlignment, SlotKey};
use oovctx_core::lattice::{Arc, TranslationLattice};
use oovctx_core::lm::{DclmParams, LmVocab, LstmParams, ModelKind, ModelParams, TensorSpec};
use oovctx_core::pmi::CooccurrenceTable;
use oovctx_core::rng::Rng;

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },
    #[error("{path}: {message}")]
    Invalid { path: String, message: String },
}

impl FormatError {
    fn io(path: &Path, source: std::io::Error) -> Self {
        FormatError::Io { path: path.display().to_string(), source }
    }

    fn parse(path: &Path, line: usize, message: impl Into<String>) -> Self {
        FormatError::Parse {
            path: path.display().to_string(),
            line,
            message: message.into(),
        }
    }

    fn invalid(path: &Path, message: impl Into<String>) -> Self {
        FormatError::Invalid { path: path.display().to_string(), message: message.into() }
    }
}

fn open(path: &Path) -> Result<BufReader<File>, FormatError> {
    Ok(BufReader::new(File::open(path).map_err(|e| FormatError::io(path, e))?))
}

fn create(path: &Path) -> Result<BufWriter<File>, FormatError> {
    Ok(BufWriter::new(File::create(path).map_err(|e| FormatError::io(path, e))?))
}

// ---------------------------------------------------------------------------
// Documents (JSONL)

#[derive(Serialize, Deserialize)]
struct DocumentRecord {
    id: String,
    sentences: Vec<Vec<String>>,
}

pub fn read_documents(path: &Path) -> Result<Vec<Document>, FormatError> {
    let mut documents = Vec::new();
    for (lineno, line) in open(path)?.lines().enumerate() {
        let line = line.map_err(|e| FormatError::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let record: DocumentRecord = serde_json::from_str(&line)
            .map_err(|e| FormatError::parse(path, lineno + 1, e.to_string()))?;
        let doc = Document::new(
            record.id,
            record.sentences.into_iter().map(Sentence::new).collect(),
        );
        doc.validate()
            .map_err(|e| FormatError::parse(path, lineno + 1, e.to_string()))?;
        documents.push(doc);
    }
    Ok(documents)
}

pub fn write_documents(path: &Path, documents: &[Document]) -> Result<(), FormatError> {
    let mut out = create(path)?;
    for doc in documents {
        let record = DocumentRecord {
            id: doc.id.clone(),
            sentences: doc.sentences.iter().map(|s| s.tokens.clone()).collect(),
        };
        serde_json::to_writer(&mut out, &record)
            .map_err(|e| FormatError::invalid(path, e.to_string()))?;
        out.write_all(b"\n").map_err(|e| FormatError::io(path, e))?;
    }
    out.flush().map_err(|e| FormatError::io(path, e))
}

// ---------------------------------------------------------------------------
// Hypotheses (JSONL)

#[derive(Serialize, Deserialize)]
struct SlotRecord {
    pos: usize,
    source_word: String,
}

#[derive(Serialize, Deserialize)]
struct HypRecord {
    doc_id: String,
    sent_index: usize,
    tokens: Vec<String>,
    oov_slots: Vec<SlotRecord>,
}

pub fn read_hypotheses(path: &Path) -> Result<Vec<HypothesisRecord>, FormatError> {
    let mut records = Vec::new();
    for (lineno, line) in open(path)?.lines().enumerate() {
        let line = line.map_err(|e| FormatError::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let record: HypRecord = serde_json::from_str(&line)
            .map_err(|e| FormatError::parse(path, lineno + 1, e.to_string()))?;
        let hyp = HypothesisRecord {
            doc_id: record.doc_id,
            sent_index: record.sent_index,
            tokens: record.tokens,
            oov_slots: record
                .oov_slots
                .into_iter()
                .map(|s| OovSlot { pos: s.pos, source_word: s.source_word })
                .collect(),
        };
        hyp.validate()
            .map_err(|e| FormatError::parse(path, lineno + 1, e.to_string()))?;
        records.push(hyp);
    }
    Ok(records)
}

pub fn write_hypotheses(path: &Path, records: &[HypothesisRecord]) -> Result<(), FormatError> {
    let mut out = create(path)?;
    for hyp in records {
        let record = HypRecord {
            doc_id: hyp.doc_id.clone(),
            sent_index: hyp.sent_index,
            tokens: hyp.tokens.clone(),
            oov_slots: hyp
                .oov_slots
                .iter()
                .map(|s| SlotRecord { pos: s.pos, source_word: s.source_word.clone() })
                .collect(),
        };
        serde_json::to_writer(&mut out, &record)
            .map_err(|e| FormatError::invalid(path, e.to_string()))?;
        out.write_all(b"\n").map_err(|e| FormatError::io(path, e))?;
    }
    out.flush().map_err(|e| FormatError::io(path, e))
}

// ---------------------------------------------------------------------------
// Rescored output records (JSONL)

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChosenSlot {
    pub pos: usize,
    pub source_word: String,
    pub chosen: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputRecord {
    pub doc_id: String,
    pub sent_index: usize,
    pub tokens: Vec<String>,
    /// Model log-probability of the chosen path; absent for models that do
    /// not produce one (pmi, pagerank, random, topline).
    pub logprob: Option<f64>,
    pub chosen: Vec<ChosenSlot>,
}

pub fn read_output_records(path: &Path) -> Result<Vec<OutputRecord>, FormatError> {
    let mut records = Vec::new();
    for (lineno, line) in open(path)?.lines().enumerate() {
        let line = line.map_err(|e| FormatError::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        records.push(
            serde_json::from_str(&line)
                .map_err(|e| FormatError::parse(path, lineno + 1, e.to_string()))?,
        );
    }
    Ok(records)
}

pub fn write_output_records(path: &Path, records: &[OutputRecord]) -> Result<(), FormatError> {
    let mut out = create(path)?;
    for record in records {
        serde_json::to_writer(&mut out, record)
            .map_err(|e| FormatError::invalid(path, e.to_string()))?;
        out.write_all(b"\n").map_err(|e| FormatError::io(path, e))?;
    }
    out.flush().map_err(|e| FormatError::io(path, e))
}

// ---------------------------------------------------------------------------
// Lexicon (TSV): source<TAB>target[<TAB>weight], '#' comments

pub fn read_lexicon(path: &Path) -> Result<Lexicon, FormatError> {
    let mut lexicon = Lexicon::new();
    for (lineno, line) in open(path)?.lines().enumerate() {
        let line = line.map_err(|e| FormatError::io(path, e))?;
        let trimmed = line.trim_end_matches(['\r', '\n']);
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut fields = trimmed.split('\t');
        let source = fields.next().unwrap_or_default();
        let target = fields
            .next()
            .ok_or_else(|| FormatError::parse(path, lineno + 1, "missing target field"))?;
        let weight = match fields.next() {
            None => None,
            Some(w) => Some(w.parse::<f64>().map_err(|e| {
                FormatError::parse(path, lineno + 1, format!("bad weight {w:?}: {e}"))
            })?),
        };
        if source.is_empty() || target.is_empty() {
            return Err(FormatError::parse(path, lineno + 1, "empty source or target"));
        }
        lexicon
            .insert(source.to_string(), target.to_string(), weight)
            .map_err(|e| FormatError::parse(path, lineno + 1, e.to_string()))?;
    }
    Ok(lexicon)
}

// ---------------------------------------------------------------------------
// Stopwords: one token per line

pub fn read_stopwords(path: &Path) -> Result<BTreeSet<String>, FormatError> {
    let mut words = BTreeSet::new();
    for line in open(path)?.lines() {
        let line = line.map_err(|e| FormatError::io(path, e))?;
        let token = line.trim();
        if !token.is_empty() {
            words.insert(token.to_string());
        }
    }
    Ok(words)
}

// ---------------------------------------------------------------------------
// Slot alignment (TSV): doc_id<TAB>sent_index<TAB>pos<TAB>reference_token

pub fn read_alignment(path: &Path) -> Result<SlotAlignment, FormatError> {
    let mut alignment = SlotAlignment::new();
    for (lineno, line) in open(path)?.lines().enumerate() {
        let line = line.map_err(|e| FormatError::io(path, e))?;
        let trimmed = line.trim_end_matches(['\r', '\n']);
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = trimmed.split('\t').collect();
        if fields.len() != 4 {
            return Err(FormatError::parse(
                path,
                lineno + 1,
                format!("expected 4 tab-separated fields, got {}", fields.len()),
            ));
        }
        let sent_index: usize = fields[1].parse().map_err(|_| {
            FormatError::parse(path, lineno + 1, format!("bad sentence index {:?}", fields[1]))
        })?;
        let pos: usize = fields[2].parse().map_err(|_| {
            FormatError::parse(path, lineno + 1, format!("bad position {:?}", fields[2]))
        })?;
        alignment.insert(
            SlotKey { doc_id: fields[0].to_string(), sent_index, pos },
            fields[3].to_string(),
        );
    }
    Ok(alignment)
}

// ---------------------------------------------------------------------------
// Lattice text format, one blank-line-terminated block per lattice:
//   LATTICE <doc_id> <sent_index> <L>
//   :<position> <from> <to> <label> <oov_flag> [<source_word>]

pub fn write_lattices(path: &Path, lattices: &[TranslationLattice]) -> Result<(), FormatError> {
    let mut out = create(path)?;
    for lattice in lattices {
        write_lattice_block(path, &mut out, lattice)?;
    }
    out.flush().map_err(|e| FormatError::io(path, e))
}

fn write_lattice_block(
    path: &Path,
    out: &mut impl Write,
    lattice: &TranslationLattice,
) -> Result<(), FormatError> {
    if lattice.doc_id.is_empty() || lattice.doc_id.chars().any(char::is_whitespace) {
        return Err(FormatError::invalid(
            path,
            format!("doc id {:?} not representable in the lattice format", lattice.doc_id),
        ));
    }
    writeln!(out, "LATTICE {} {} {}", lattice.doc_id, lattice.sent_index, lattice.len())
        .map_err(|e| FormatError::io(path, e))?;
    for (pos, arcs) in lattice.arcs.iter().enumerate() {
        for arc in arcs {
            if arc.label.is_empty() || arc.label.chars().any(char::is_whitespace) {
                return Err(FormatError::invalid(
                    path,
                    format!("arc label {:?} not representable in the lattice format", arc.label),
                ));
            }
            let flag = u8::from(arc.is_oov_candidate);
            match &arc.source_word {
                Some(source) => {
                    writeln!(out, ":{pos} {pos} {} {} {flag} {source}", pos + 1, arc.label)
                }
                None => writeln!(out, ":{pos} {pos} {} {} {flag}", pos + 1, arc.label),
            }
            .map_err(|e| FormatError::io(path, e))?;
        }
    }
    writeln!(out).map_err(|e| FormatError::io(path, e))
}

pub fn read_lattices(path: &Path) -> Result<Vec<TranslationLattice>, FormatError> {
    let mut lattices = Vec::new();
    let mut current: Option<TranslationLattice> = None;
    for (lineno, line) in open(path)?.lines().enumerate() {
        let line = line.map_err(|e| FormatError::io(path, e))?;
        let lineno = lineno + 1;
        let trimmed = line.trim_end_matches(['\r', '\n']);
        if trimmed.is_empty() {
            if let Some(lattice) = current.take() {
                finish_lattice(path, lineno, lattice, &mut lattices)?;
            }
            continue;
        }
        if let Some(rest) = trimmed.strip_prefix("LATTICE ") {
            if let Some(lattice) = current.take() {
                finish_lattice(path, lineno, lattice, &mut lattices)?;
            }
            let fields: Vec<&str> = rest.split(' ').collect();
            if fields.len() != 3 {
                return Err(FormatError::parse(path, lineno, "malformed LATTICE header"));
            }
            let sent_index: usize = fields[1]
                .parse()
                .map_err(|_| FormatError::parse(path, lineno, "bad sentence index"))?;
            let len: usize = fields[2]
                .parse()
                .map_err(|_| FormatError::parse(path, lineno, "bad length"))?;
            current = Some(TranslationLattice {
                doc_id: fields[0].to_string(),
                sent_index,
                arcs: vec![Vec::new(); len],
            });
        } else if let Some(rest) = trimmed.strip_prefix(':') {
            let lattice = current
                .as_mut()
                .ok_or_else(|| FormatError::parse(path, lineno, "arc line outside a lattice"))?;
            let fields: Vec<&str> = rest.split(' ').collect();
            if fields.len() != 5 && fields.len() != 6 {
                return Err(FormatError::parse(path, lineno, "malformed arc line"));
            }
            let pos: usize = fields[0]
                .parse()
                .map_err(|_| FormatError::parse(path, lineno, "bad arc position"))?;
            let from: usize = fields[1]
                .parse()
                .map_err(|_| FormatError::parse(path, lineno, "bad arc source node"))?;
            let to: usize = fields[2]
                .parse()
                .map_err(|_| FormatError::parse(path, lineno, "bad arc target node"))?;
            if pos >= lattice.arcs.len() || from != pos || to != pos + 1 {
                return Err(FormatError::parse(path, lineno, "arc nodes inconsistent"));
            }
            let flag = match fields[4] {
                "0" => false,
                "1" => true,
                other => {
                    return Err(FormatError::parse(path, lineno, format!("bad flag {other:?}")))
                }
            };
            lattice.arcs[pos].push(Arc {
                label: fields[3].to_string(),
                is_oov_candidate: flag,
                source_word: fields.get(5).map(|s| s.to_string()),
                phrase: None,
            });
        } else {
            return Err(FormatError::parse(path, lineno, "unrecognized line"));
        }
    }
    if let Some(lattice) = current.take() {
        finish_lattice(path, 0, lattice, &mut lattices)?;
    }
    Ok(lattices)
}

fn finish_lattice(
    path: &Path,
    lineno: usize,
    lattice: TranslationLattice,
    lattices: &mut Vec<TranslationLattice>,
) -> Result<(), FormatError> {
    lattice
        .validate()
        .map_err(|e| FormatError::parse(path, lineno, e.to_string()))?;
    lattices.push(lattice);
    Ok(())
}

// ---------------------------------------------------------------------------
// PMI table:
//   PMI v1 <N> <window_size>
//   U <token> <count>
//   P <tok1> <tok2> <count>   (tok1 < tok2, sorted)

pub fn write_pmi_table(path: &Path, table: &CooccurrenceTable) -> Result<(), FormatError> {
    let mut out = create(path)?;
    writeln!(out, "PMI v1 {} {}", table.window_count, table.window_size)
        .map_err(|e| FormatError::io(path, e))?;
    for (token, count) in table.unigrams() {
        if token.chars().any(char::is_whitespace) {
            return Err(FormatError::invalid(path, format!("token {token:?} has whitespace")));
        }
        writeln!(out, "U {token} {count}").map_err(|e| FormatError::io(path, e))?;
    }
    for (a, b, count) in table.pairs() {
        writeln!(out, "P {a} {b} {count}").map_err(|e| FormatError::io(path, e))?;
    }
    out.flush().map_err(|e| FormatError::io(path, e))
}

pub fn read_pmi_table(path: &Path) -> Result<CooccurrenceTable, FormatError> {
    let mut lines = open(path)?.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| FormatError::parse(path, 1, "empty file"))?;
    let header = header.map_err(|e| FormatError::io(path, e))?;
    let fields: Vec<&str> = header.split(' ').collect();
    if fields.len() != 4 || fields[0] != "PMI" || fields[1] != "v1" {
        return Err(FormatError::parse(path, 1, "expected `PMI v1 <N> <window_size>` header"));
    }
    let window_count: u64 = fields[2]
        .parse()
        .map_err(|_| FormatError::parse(path, 1, "bad window count"))?;
    let window_size: usize = fields[3]
        .parse()
        .map_err(|_| FormatError::parse(path, 1, "bad window size"))?;
    let mut table = CooccurrenceTable::with_header(window_count, window_size);
    for (lineno, line) in lines {
        let line = line.map_err(|e| FormatError::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(' ').collect();
        match (fields.first().copied(), fields.len()) {
            (Some("U"), 3) => {
                let count: u64 = fields[2]
                    .parse()
                    .map_err(|_| FormatError::parse(path, lineno + 1, "bad unigram count"))?;
                table.insert_unigram(fields[1].to_string(), count);
            }
            (Some("P"), 4) => {
                if fields[1] >= fields[2] {
                    return Err(FormatError::parse(
                        path,
                        lineno + 1,
                        "pair tokens must satisfy tok1 < tok2",
                    ));
                }
                let count: u64 = fields[3]
                    .parse()
                    .map_err(|_| FormatError::parse(path, lineno + 1, "bad pair count"))?;
                table.insert_pair(fields[1].to_string(), fields[2].to_string(), count);
            }
            _ => return Err(FormatError::parse(path, lineno + 1, "unrecognized line")),
        }
    }
    Ok(table)
}

// ---------------------------------------------------------------------------
// Neural model file:
//   NNLM v1
//   kind <lstm|dclm>
//   hidden <H>
//   embed <E>
//   layers <n>
//   vocab <V>
//   <token>            x V, id order
//   tensor <name> <d0> [<d1>]
//   <floats>           one line per leading-dimension row

pub fn write_model(path: &Path, model: &ModelParams) -> Result<(), FormatError> {
    let mut out = create(path)?;
    let write_io = |e| FormatError::io(path, e);
    writeln!(out, "NNLM v1").map_err(write_io)?;
    writeln!(out, "kind {}", model.kind().as_str()).map_err(write_io)?;
    writeln!(out, "hidden {}", model.hidden()).map_err(write_io)?;
    writeln!(out, "embed {}", model.embed_dim()).map_err(write_io)?;
    writeln!(out, "layers {}", model.n_layers()).map_err(write_io)?;
    let vocab = model.vocab();
    writeln!(out, "vocab {}", vocab.len()).map_err(write_io)?;
    for token in vocab.tokens() {
        writeln!(out, "{token}").map_err(write_io)?;
    }
    for (spec, tensor) in model.tensor_specs().iter().zip(model.tensors()) {
        match spec.shape.as_slice() {
            [d0] => {
                writeln!(out, "tensor {} {d0}", spec.name).map_err(write_io)?;
                write_float_row(&mut out, tensor).map_err(write_io)?;
            }
            [d0, d1] => {
                writeln!(out, "tensor {} {d0} {d1}", spec.name).map_err(write_io)?;
                for row in tensor.chunks(*d1) {
                    write_float_row(&mut out, row).map_err(write_io)?;
                }
            }
            other => {
                return Err(FormatError::invalid(
                    path,
                    format!("unsupported tensor rank {} for {}", other.len(), spec.name),
                ))
            }
        }
    }
    out.flush().map_err(write_io)
}

fn write_float_row(out: &mut impl Write, row: &[f64]) -> std::io::Result<()> {
    let mut first = true;
    for x in row {
        if !first {
            out.write_all(b" ")?;
        }
        write!(out, "{x}")?;
        first = false;
    }
    out.write_all(b"\n")
}

pub fn read_model(path: &Path) -> Result<ModelParams, FormatError> {
    let mut content = String::new();
    open(path)?
        .read_to_string(&mut content)
        .map_err(|e| FormatError::io(path, e))?;
    let mut lines = content.lines().enumerate();

    let mut header_field = |name: &str| -> Result<String, FormatError> {
        let (lineno, line) = lines
            .next()
            .ok_or_else(|| FormatError::parse(path, 0, "truncated header"))?;
        if name.is_empty() {
            return Ok(line.to_string());
        }
        line.strip_prefix(name)
            .and_then(|rest| rest.strip_prefix(' '))
            .map(str::to_string)
            .ok_or_else(|| {
                FormatError::parse(path, lineno + 1, format!("expected `{name} ...`, got {line:?}"))
            })
    };

    let magic = header_field("")?;
    if magic != "NNLM v1" {
        return Err(FormatError::parse(path, 1, "expected `NNLM v1` header"));
    }
    let kind = match header_field("kind")?.as_str() {
        "lstm" => ModelKind::Lstm,
        "dclm" => ModelKind::Dclm,
        other => return Err(FormatError::parse(path, 2, format!("unknown kind {other:?}"))),
    };
    let hidden: usize = header_field("hidden")?
        .parse()
        .map_err(|_| FormatError::parse(path, 3, "bad hidden size"))?;
    let embed: usize = header_field("embed")?
        .parse()
        .map_err(|_| FormatError::parse(path, 4, "bad embed size"))?;
    let n_layers: usize = header_field("layers")?
        .parse()
        .map_err(|_| FormatError::parse(path, 5, "bad layer count"))?;
    let vocab_size: usize = header_field("vocab")?
        .parse()
        .map_err(|_| FormatError::parse(path, 6, "bad vocab size"))?;

    let mut tokens = Vec::with_capacity(vocab_size);
    for _ in 0..vocab_size {
        let (lineno, line) = lines
            .next()
            .ok_or_else(|| FormatError::parse(path, 0, "truncated vocabulary"))?;
        if line.is_empty() {
            return Err(FormatError::parse(path, lineno + 1, "empty vocabulary token"));
        }
        tokens.push(line.to_string());
    }
    if tokens.len() < 3
        || tokens[0] != oovctx_core::lm::UNK_TOKEN
        || tokens[1] != oovctx_core::lm::BOS_TOKEN
        || tokens[2] != oovctx_core::lm::EOS_TOKEN
    {
        return Err(FormatError::invalid(path, "vocabulary must start with <unk> <s> </s>"));
    }
    let vocab = LmVocab::build(tokens.iter().skip(3).map(String::as_str));
    if vocab.len() != vocab_size {
        return Err(FormatError::invalid(path, "vocabulary contains duplicates"));
    }

    // Zero-initialized parameters, then filled tensor by tensor.
    let mut zero_rng = Rng::new(0);
    let mut model = match kind {
        ModelKind::Lstm => ModelParams::Lstm(LstmParams::init(
            vocab, embed, hidden, n_layers, 0, 0.0, &mut zero_rng,
        )),
        ModelKind::Dclm => ModelParams::Dclm(DclmParams::init(
            vocab, embed, hidden, n_layers, 0.0, &mut zero_rng,
        )),
    };

    let specs: Vec<TensorSpec> = model.tensor_specs();
    let mut tensors = model.tensors_mut();
    for (spec, tensor) in specs.iter().zip(tensors.iter_mut()) {
        let (lineno, line) = lines
            .next()
            .ok_or_else(|| FormatError::parse(path, 0, format!("missing tensor {}", spec.name)))?;
        let shape_str: Vec<String> = spec.shape.iter().map(|d| d.to_string()).collect();
        let expected = format!("tensor {} {}", spec.name, shape_str.join(" "));
        if line != expected {
            return Err(FormatError::parse(
                path,
                lineno + 1,
                format!("expected {expected:?}, got {line:?}"),
            ));
        }
        let numel: usize = spec.shape.iter().product();
        let mut filled = 0usize;
        while filled < numel {
            let (lineno, line) = lines.next().ok_or_else(|| {
                FormatError::parse(path, 0, format!("truncated tensor {}", spec.name))
            })?;
            for field in line.split(' ') {
                if filled >= numel {
                    return Err(FormatError::parse(
                        path,
                        lineno + 1,
                        format!("too many values for tensor {}", spec.name),
                    ));
                }
                tensor[filled] = field.parse::<f64>().map_err(|e| {
                    FormatError::parse(path, lineno + 1, format!("bad float {field:?}: {e}"))
                })?;
                filled += 1;
            }
        }
    }
    if lines.next().is_some() {
        return Err(FormatError::invalid(path, "trailing content after tensors"));
    }
    Ok(model)
}

// ---------------------------------------------------------------------------
// Evaluation report (JSON object)

#[derive(Serialize, Deserialize)]
struct ReportRecord {
    bleu: f64,
    unigram_precision: f64,
    sentence_count: usize,
    token_count: usize,
}

pub fn write_report(path: &Path, report: &EvalReport) -> Result<(), FormatError> {
    let record = ReportRecord {
        bleu: report.bleu,
        unigram_precision: report.unigram_precision,
        sentence_count: report.sentence_count,
        token_count: report.token_count,
    };
    let mut out = create(path)?;
    serde_json::to_writer_pretty(&mut out, &record)
        .map_err(|e| FormatError::invalid(path, e.to_string()))?;
    out.write_all(b"\n").map_err(|e| FormatError::io(path, e))?;
    out.flush().map_err(|e| FormatError::io(path, e))
}

pub fn read_report(path: &Path) -> Result<EvalReport, FormatError> {
    let mut content = String::new();
    open(path)?
        .read_to_string(&mut content)
        .map_err(|e| FormatError::io(path, e))?;
    let record: ReportRecord = serde_json::from_str(&content)
        .map_err(|e| FormatError::parse(path, 1, e.to_string()))?;
    Ok(EvalReport {
        bleu: record.bleu,
        unigram_precision: record.unigram_precision,
        sentence_count: record.sentence_count,
        token_count: record.token_count,
    })
}
