//! Round-trip checks for every on-disk format: byte-exact file round-trips
//! and score preservation for serialized models and tables.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use oovctx_core::corpus::{tokenize, CandidateSet, Document, HypothesisRecord, OovSlot, Sentence};
use oovctx_core::lattice::build_lattice;
use oovctx_core::lm::{
    self, dclm_score_sentence, lstm_score_sentence, LmVocab, ModelKind, ModelParams, TrainConfig,
};
use oovctx_core::pmi::{count_cooccurrences, pmi, PmiConfig};

use oovctx::formats;

fn docs(lines: &[&[&str]]) -> Vec<Document> {
    lines
        .iter()
        .enumerate()
        .map(|(i, sents)| {
            Document::new(
                format!("doc{i}"),
                sents.iter().map(|s| Sentence::new(tokenize(s))).collect(),
            )
        })
        .collect()
}

#[test]
fn documents_roundtrip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("docs.jsonl");
    let corpus = docs(&[
        &["the cat sat", "on the mat"],
        &["officials said the qaraxu happened"],
    ]);
    formats::write_documents(&path, &corpus).unwrap();
    let back = formats::read_documents(&path).unwrap();
    assert_eq!(corpus, back);
    // Re-writing reproduces the bytes.
    let bytes = fs::read(&path).unwrap();
    let path2 = dir.path().join("docs2.jsonl");
    formats::write_documents(&path2, &back).unwrap();
    assert_eq!(bytes, fs::read(&path2).unwrap());
}

#[test]
fn documents_validation_fails_loudly() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.jsonl");
    fs::write(&path, "{\"id\":\"d\",\"sentences\":[[]]}\n").unwrap();
    let err = formats::read_documents(&path).unwrap_err();
    assert!(err.to_string().contains("sentence 0 is empty"), "{err}");
}

#[test]
fn hypotheses_roundtrip_and_validation() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("hyps.jsonl");
    let hyps = vec![HypothesisRecord {
        doc_id: "d0".into(),
        sent_index: 0,
        tokens: tokenize("near albaadka the qaraxu happened"),
        oov_slots: vec![
            OovSlot { pos: 1, source_word: "albaadka".into() },
            OovSlot { pos: 3, source_word: "qaraxu".into() },
        ],
    }];
    formats::write_hypotheses(&path, &hyps).unwrap();
    assert_eq!(formats::read_hypotheses(&path).unwrap(), hyps);

    let bad = dir.path().join("bad.jsonl");
    fs::write(
        &bad,
        "{\"doc_id\":\"d\",\"sent_index\":0,\"tokens\":[\"a\"],\"oov_slots\":[{\"pos\":5,\"source_word\":\"x\"}]}\n",
    )
    .unwrap();
    assert!(formats::read_hypotheses(&bad).is_err());
}

#[test]
fn lexicon_parsing() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("lex.tsv");
    fs::write(
        &path,
        "# comment line\nqarax\texplosion\t0.9\nqarax\tblast\nalbaab\tdoor\n\n",
    )
    .unwrap();
    let lex = formats::read_lexicon(&path).unwrap();
    let targets: Vec<&str> = lex.targets("qarax").unwrap().iter().map(|(t, _)| t.as_str()).collect();
    assert_eq!(targets, vec!["explosion", "blast"]);
    assert_eq!(lex.targets("qarax").unwrap()[0].1, Some(0.9));
    assert_eq!(lex.targets("albaab").unwrap().len(), 1);

    let bad = dir.path().join("bad.tsv");
    fs::write(&bad, "one-field-only\n").unwrap();
    assert!(formats::read_lexicon(&bad).is_err());
}

#[test]
fn alignment_parsing() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("align.tsv");
    fs::write(&path, "d0\t0\t1\tentrance\nd0\t0\t3\texplosion\n").unwrap();
    let alignment = formats::read_alignment(&path).unwrap();
    assert_eq!(alignment.len(), 2);
    let key = oovctx_core::eval::SlotKey { doc_id: "d0".into(), sent_index: 0, pos: 3 };
    assert_eq!(alignment.get(&key), Some("explosion"));
}

fn sample_lattices() -> Vec<oovctx_core::lattice::TranslationLattice> {
    let hyp = HypothesisRecord {
        doc_id: "d0".into(),
        sent_index: 0,
        tokens: tokenize("near albaadka uncovered"),
        oov_slots: vec![
            OovSlot { pos: 1, source_word: "albaadka".into() },
            OovSlot { pos: 2, source_word: "uncovered".into() },
        ],
    };
    let mut cands = BTreeMap::new();
    cands.insert(
        "albaadka".to_string(),
        CandidateSet {
            source_word: "albaadka".into(),
            candidates: vec!["entrance".into(), "door".into()],
        },
    );
    // "uncovered" has no candidates: pass-through arc.
    let one = build_lattice(&hyp, &cands).unwrap();
    let hyp2 = HypothesisRecord {
        doc_id: "d1".into(),
        sent_index: 0,
        tokens: tokenize("plain text"),
        oov_slots: vec![],
    };
    let two = build_lattice(&hyp2, &cands).unwrap();
    vec![one, two]
}

#[test]
fn lattice_file_bit_exact_roundtrip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("lats.txt");
    let lattices = sample_lattices();
    formats::write_lattices(&path, &lattices).unwrap();
    let back = formats::read_lattices(&path).unwrap();
    assert_eq!(lattices.len(), back.len());
    for (a, b) in lattices.iter().zip(&back) {
        assert_eq!(a.doc_id, b.doc_id);
        assert_eq!(a.sent_index, b.sent_index);
        assert_eq!(a.arcs.len(), b.arcs.len());
        for (x, y) in a.arcs.iter().zip(&b.arcs) {
            for (p, q) in x.iter().zip(y) {
                assert_eq!(p.label, q.label);
                assert_eq!(p.is_oov_candidate, q.is_oov_candidate);
                assert_eq!(p.source_word, q.source_word);
            }
        }
    }
    // Writer is canonical: write(read(write(x))) == write(x).
    let bytes = fs::read(&path).unwrap();
    let path2 = dir.path().join("lats2.txt");
    formats::write_lattices(&path2, &back).unwrap();
    assert_eq!(bytes, fs::read(&path2).unwrap());
}

#[test]
fn lattice_file_shape() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("lats.txt");
    formats::write_lattices(&path, &sample_lattices()).unwrap();
    let text = fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "LATTICE d0 0 3");
    assert_eq!(lines.next().unwrap(), ":0 0 1 near 0");
    assert_eq!(lines.next().unwrap(), ":1 1 2 entrance 1 albaadka");
    assert_eq!(lines.next().unwrap(), ":1 1 2 door 1 albaadka");
    assert_eq!(lines.next().unwrap(), ":2 2 3 uncovered 1 uncovered");
    assert_eq!(lines.next().unwrap(), "");
    assert_eq!(lines.next().unwrap(), "LATTICE d1 0 2");
}

#[test]
fn pmi_table_roundtrip_preserves_scores() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("table.pmi");
    let corpus = docs(&[&["a b", "a b", "a c", "d"]]);
    let config = PmiConfig::default();
    let table = count_cooccurrences(&corpus, &config);
    formats::write_pmi_table(&path, &table).unwrap();
    let back = formats::read_pmi_table(&path).unwrap();
    assert_eq!(table, back);
    for x in ["a", "b", "c", "d"] {
        for y in ["a", "b", "c", "d"] {
            let p = pmi(&table, x, y, &config);
            let q = pmi(&back, x, y, &config);
            assert!((p - q).abs() < 1e-12);
        }
    }
    // Byte-exact re-write.
    let bytes = fs::read(&path).unwrap();
    let path2 = dir.path().join("table2.pmi");
    formats::write_pmi_table(&path2, &back).unwrap();
    assert_eq!(bytes, fs::read(&path2).unwrap());
    // Header shape.
    let text = fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("PMI v1 4 0\n"), "{text}");
}

#[test]
fn model_file_roundtrip_preserves_scores() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = docs(&[&["the blast hit the gate", "guards closed the gate"]]);
    let vocab = LmVocab::build(
        corpus
            .iter()
            .flat_map(|d| d.sentences.iter())
            .flat_map(|s| s.tokens.iter().map(String::as_str)),
    );
    let config = TrainConfig {
        hidden: 7,
        embed: 5,
        epochs: 3,
        ..TrainConfig::default()
    };
    for kind in [ModelKind::Lstm, ModelKind::Dclm] {
        let trained = lm::train(kind, &corpus, vocab.clone(), &config).unwrap();
        let path = dir.path().join(format!("{}.model", kind.as_str()));
        formats::write_model(&path, &trained.params).unwrap();
        let back = formats::read_model(&path).unwrap();
        assert_eq!(trained.params, back);

        let tokens = ["the", "gate", "closed"];
        match (&trained.params, &back) {
            (ModelParams::Lstm(a), ModelParams::Lstm(b)) => {
                let (lp_a, _) = lstm_score_sentence(a, &tokens);
                let (lp_b, _) = lstm_score_sentence(b, &tokens);
                assert!((lp_a - lp_b).abs() < 1e-12);
            }
            (ModelParams::Dclm(a), ModelParams::Dclm(b)) => {
                let ctx = lm::SentenceContext::zero(7);
                let (lp_a, _) = dclm_score_sentence(a, &tokens, &ctx);
                let (lp_b, _) = dclm_score_sentence(b, &tokens, &ctx);
                assert!((lp_a - lp_b).abs() < 1e-12);
            }
            _ => panic!("kind changed in round-trip"),
        }

        // Byte-exact re-write.
        let bytes = fs::read(&path).unwrap();
        let path2 = dir.path().join(format!("{}.model2", kind.as_str()));
        formats::write_model(&path2, &back).unwrap();
        assert_eq!(bytes, fs::read(&path2).unwrap());
    }
}

#[test]
fn model_file_rejects_garbage() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.model");
    fs::write(&path, "NNLM v1\nkind dclm\nhidden 4\nembed 4\nlayers 2\nvocab 1\nx\n").unwrap();
    assert!(formats::read_model(&path).is_err());
    assert!(formats::read_model(Path::new("/nonexistent/model")).is_err());
}

#[test]
fn output_records_roundtrip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.jsonl");
    let records = vec![formats::OutputRecord {
        doc_id: "d0".into(),
        sent_index: 0,
        tokens: vec!["near".into(), "entrance".into()],
        logprob: Some(-12.345678901234567),
        chosen: vec![formats::ChosenSlot {
            pos: 1,
            source_word: "albaadka".into(),
            chosen: "entrance".into(),
        }],
    }];
    formats::write_output_records(&path, &records).unwrap();
    let back = formats::read_output_records(&path).unwrap();
    assert_eq!(records, back);
    assert_eq!(records[0].logprob.unwrap().to_bits(), back[0].logprob.unwrap().to_bits());
}

#[test]
fn report_roundtrip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let report = oovctx_core::eval::EvalReport {
        bleu: 42.12345,
        unigram_precision: 61.5,
        sentence_count: 10,
        token_count: 123,
    };
    formats::write_report(&path, &report).unwrap();
    assert_eq!(formats::read_report(&path).unwrap(), report);
}

#[test]
fn stopwords_reader() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("stop.txt");
    fs::write(&path, "the\na\n\nof\n").unwrap();
    let words = formats::read_stopwords(&path).unwrap();
    assert_eq!(words.len(), 3);
    assert!(words.contains("the"));
}
