//! Randomized property checks for the spec-level invariants.

use std::collections::BTreeSet;

use proptest::prelude::*;

use oovctx_core::corpus::{
    jaccard, levenshtein, retrieve_candidates, select_articles, tokenize, CandidateSet, Document,
    HypothesisRecord, Lexicon, OovSlot, Sentence,
};
use oovctx_core::lattice::{build_lattice, enumerate_paths, path_count, realize};
use oovctx_core::pmi::{avg_pmi, complete_sentence, count_cooccurrences, pmi, PmiConfig};

fn word_strategy() -> impl Strategy<Value = String> {
    proptest::string::string_regex("[a-cé]{0,6}").unwrap()
}

fn corpus_strategy() -> impl Strategy<Value = Vec<Document>> {
    proptest::collection::vec(
        proptest::collection::vec(
            proptest::collection::vec(proptest::string::string_regex("[a-f]{1,2}").unwrap(), 1..5),
            1..4,
        ),
        1..4,
    )
    .prop_map(|docs| {
        docs.into_iter()
            .enumerate()
            .map(|(i, sents)| {
                Document::new(
                    format!("d{i}"),
                    sents.into_iter().map(Sentence::new).collect(),
                )
            })
            .collect()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn levenshtein_is_a_metric(a in word_strategy(), b in word_strategy(), c in word_strategy()) {
        prop_assert_eq!(levenshtein(&a, &b), levenshtein(&b, &a));
        prop_assert_eq!(levenshtein(&a, &a), 0);
        if levenshtein(&a, &b) == 0 {
            prop_assert_eq!(&a, &b);
        }
        prop_assert!(levenshtein(&a, &c) <= levenshtein(&a, &b) + levenshtein(&b, &c));
    }

    #[test]
    fn jaccard_bounds(a in proptest::collection::btree_set("[a-e]{1,2}", 0..8),
                      b in proptest::collection::btree_set("[a-e]{1,2}", 0..8)) {
        let j = jaccard(&a, &b);
        prop_assert!((0.0..=1.0).contains(&j));
        if !a.is_empty() {
            prop_assert_eq!(jaccard(&a, &a), 1.0);
        }
    }

    #[test]
    fn retrieval_is_deterministic(oov in "[a-d]{1,5}",
                                  pairs in proptest::collection::vec(("[a-d]{1,4}", "[a-z]{1,4}"), 0..12)) {
        let mut related = Lexicon::new();
        for (s, t) in &pairs {
            related.insert(s.clone(), t.clone(), None).unwrap();
        }
        let lex = Lexicon::new();
        let first = retrieve_candidates(&oov, &lex, &related, 2, 10);
        let second = retrieve_candidates(&oov, &lex, &related, 2, 10);
        prop_assert_eq!(&first, &second);
        // No duplicates, capped size.
        let distinct: BTreeSet<&String> = first.candidates.iter().collect();
        prop_assert_eq!(distinct.len(), first.candidates.len());
        prop_assert!(first.candidates.len() <= 10);
    }

    #[test]
    fn selection_is_monotone_subsequence(corpus in corpus_strategy(),
                                         target in proptest::collection::btree_set("[a-f]{1,2}", 1..10),
                                         t1 in 0.0f64..1.0, t2 in 0.0f64..1.0) {
        let target_refs: BTreeSet<&str> = target.iter().map(String::as_str).collect();
        let (lo, hi) = if t1 <= t2 { (t1, t2) } else { (t2, t1) };
        let at_lo = select_articles(&corpus, &target_refs, lo);
        let at_hi = select_articles(&corpus, &target_refs, hi);
        // Higher threshold selects a subset.
        let lo_ids: BTreeSet<&str> = at_lo.iter().map(|d| d.id.as_str()).collect();
        for doc in &at_hi {
            prop_assert!(lo_ids.contains(doc.id.as_str()));
        }
        // Output preserves input order (subsequence).
        let order: Vec<usize> = at_lo
            .iter()
            .map(|sel| corpus.iter().position(|d| d.id == sel.id).unwrap())
            .collect();
        prop_assert!(order.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn lattice_count_matches_enumeration(
        sizes in proptest::collection::vec(1usize..4, 1..6)
    ) {
        let tokens: Vec<String> = (0..sizes.len()).map(|i| format!("w{i}")).collect();
        let mut slots = Vec::new();
        let mut cands = std::collections::BTreeMap::new();
        for (i, &n) in sizes.iter().enumerate() {
            if n > 1 {
                let src = format!("s{i}");
                slots.push(OovSlot { pos: i, source_word: src.clone() });
                cands.insert(src.clone(), CandidateSet {
                    source_word: src,
                    candidates: (0..n).map(|k| format!("c{i}_{k}")).collect(),
                });
            }
        }
        let hyp = HypothesisRecord {
            doc_id: "d".into(),
            sent_index: 0,
            tokens,
            oov_slots: slots,
        };
        let lat = build_lattice(&hyp, &cands).unwrap();
        let count = path_count(&lat);
        let paths = enumerate_paths(&lat, 10_000).unwrap();
        prop_assert_eq!(count as usize, paths.len());
        for p in &paths {
            let s = realize(&lat, p).unwrap();
            prop_assert_eq!(s.len(), lat.len());
        }
        // Non-OOV tokens survive in place on every path.
        for p in &paths {
            let s = realize(&lat, p).unwrap();
            for (i, &n) in sizes.iter().enumerate() {
                if n == 1 {
                    prop_assert_eq!(&s.tokens[i], &format!("w{i}"));
                }
            }
        }
    }

    #[test]
    fn pmi_symmetry_and_scale_invariance(corpus in corpus_strategy(), k in 1u64..20) {
        let config = PmiConfig::default();
        let table = count_cooccurrences(&corpus, &config);
        let scaled = table.scale(k);
        let vocab: Vec<&str> = corpus
            .iter()
            .flat_map(|d| d.sentences.iter())
            .flat_map(|s| s.tokens.iter().map(String::as_str))
            .collect();
        for &x in vocab.iter().take(6) {
            for &y in vocab.iter().take(6) {
                let p = pmi(&table, x, y, &config);
                prop_assert_eq!(p.to_bits(), pmi(&table, y, x, &config).to_bits());
                let ps = pmi(&scaled, x, y, &config);
                prop_assert!((p - ps).abs() < 1e-9, "{} vs {}", p, ps);
            }
        }
    }

    #[test]
    fn greedy_completion_scale_invariant(corpus in corpus_strategy(), k in 2u64..9) {
        let config = PmiConfig::default();
        let table = count_cooccurrences(&corpus, &config);
        let scaled = table.scale(k);
        // A two-slot lattice over tokens drawn from the corpus alphabet.
        let hyp = HypothesisRecord {
            doc_id: "d".into(),
            sent_index: 0,
            tokens: tokenize("aa s1 bb s2"),
            oov_slots: vec![
                OovSlot { pos: 1, source_word: "s1".into() },
                OovSlot { pos: 3, source_word: "s2".into() },
            ],
        };
        let mut cands = std::collections::BTreeMap::new();
        cands.insert("s1".into(), CandidateSet {
            source_word: "s1".into(),
            candidates: vec!["a".into(), "b".into(), "c".into()],
        });
        cands.insert("s2".into(), CandidateSet {
            source_word: "s2".into(),
            candidates: vec!["d".into(), "e".into()],
        });
        let lat = build_lattice(&hyp, &cands).unwrap();
        let p1 = complete_sentence(&lat, &[], &[], &table, &config);
        let p2 = complete_sentence(&lat, &[], &[], &scaled, &config);
        prop_assert_eq!(p1, p2);
        // Output only differs from the default path at slot positions.
        let p = complete_sentence(&lat, &[], &[], &table, &config);
        for (pos, &arc) in p.arc_indices.iter().enumerate() {
            if lat.arcs[pos].len() == 1 {
                prop_assert_eq!(arc, 0);
            }
        }
    }

    #[test]
    fn avg_pmi_within_floor_and_max(corpus in corpus_strategy()) {
        let config = PmiConfig::default();
        let table = count_cooccurrences(&corpus, &config);
        let words: Vec<&str> = corpus[0].sentences[0].tokens.iter().map(String::as_str).collect();
        let score = avg_pmi("a", &words, &table, &config);
        prop_assert!(score.is_finite());
        prop_assert!(score >= config.floor_logprob);
    }
}
