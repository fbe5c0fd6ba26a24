use std::collections::HashSet;
use std::fs;
use std::path::Path;

use entangle::corpus::{load_topic_corpus, PipelineConfig, TermSequence, TopicCorpus};
use entangle::relevance::{
    build_concept_pair, rank_by_frequency, rank_by_tfidf, term_stats, DocumentFrequencies, RankedTerm, RankedTerms,
    RelevanceMethod,
};
use entangle::Error;
use proptest::prelude::*;

fn topic(id: &str, docs: Vec<Vec<String>>) -> TopicCorpus {
    let documents = docs
        .into_iter()
        .enumerate()
        .map(|(i, terms)| TermSequence {
            doc_id: format!("d{i}"),
            terms,
        })
        .collect();
    TopicCorpus::new(id, documents, 5).unwrap()
}

fn names(r: &RankedTerms) -> Vec<&str> {
    r.terms.iter().map(|t| t.term.as_str()).collect()
}

fn ranked(terms: &[&str]) -> RankedTerms {
    RankedTerms {
        topic_id: "t".into(),
        method: RelevanceMethod::Frequency,
        terms: terms
            .iter()
            .enumerate()
            .map(|(i, t)| RankedTerm {
                term: t.to_string(),
                score: (100 - i) as f64,
            })
            .collect(),
    }
}

#[test]
fn twenty_terms_is_enough_nineteen_is_not() {
    let twenty: Vec<String> = (0..20).map(|i| format!("t{i:02}")).collect();
    let refs: Vec<&str> = twenty.iter().map(String::as_str).collect();
    let pair = build_concept_pair(&ranked(&refs), 10).unwrap();
    assert_eq!(pair.c1, &twenty[..10]);
    assert_eq!(pair.c2, &twenty[10..]);
    let err = build_concept_pair(&ranked(&refs[..19]), 10).unwrap_err();
    assert!(matches!(
        err,
        Error::InsufficientVocabulary {
            needed: 20,
            found: 19,
            ..
        }
    ));
}

#[test]
fn k_two_split() {
    let pair = build_concept_pair(&ranked(&["w", "x", "y", "z"]), 2).unwrap();
    assert_eq!(pair.c1, ["w", "x"]);
    assert_eq!(pair.c2, ["y", "z"]);
}

/// Plain word counts of the bundled corpus, computed without the ranking code.
#[test]
fn bundled_topic_frequency_ranking_matches_direct_count() {
    let manifest = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/synthetic/manifest.json");
    let expected: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(manifest.with_file_name("expected.json")).unwrap()).unwrap();
    let collection = load_topic_corpus(&manifest, &PipelineConfig::default(), 5).unwrap();
    for t in &collection {
        let mut counts: Vec<(String, u64)> = Vec::new();
        for term in t.documents.iter().flat_map(|d| &d.terms) {
            match counts.iter_mut().find(|(w, _)| w == term) {
                Some((_, c)) => *c += 1,
                None => counts.push((term.clone(), 1)),
            }
        }
        counts.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
        let r = rank_by_frequency(t).unwrap();
        let got: Vec<(String, u64)> = r.terms.iter().map(|x| (x.term.clone(), x.score as u64)).collect();
        assert_eq!(got, counts, "{}", t.topic_id);

        for method in RelevanceMethod::ALL {
            let r = match method {
                RelevanceMethod::Frequency => r.clone(),
                RelevanceMethod::Tfidf => rank_by_tfidf(t, &collection).unwrap(),
            };
            let want = &expected["topics"][&t.topic_id]["methods"][method.as_str()]["ranking"];
            for (got, want) in r.terms.iter().zip(want.as_array().unwrap()) {
                assert_eq!(got.term, want[0].as_str().unwrap(), "{} {method}", t.topic_id);
                assert!(
                    (got.score - want[1].as_f64().unwrap()).abs() <= 1e-9,
                    "{} {method}",
                    t.topic_id
                );
            }
        }
    }
}

fn docs_strategy() -> impl Strategy<Value = Vec<Vec<String>>> {
    let word = prop::sample::select(vec![
        "ant", "bee", "cat", "dog", "eel", "fox", "gnu", "hen", "ibis", "jay",
    ]);
    prop::collection::vec(prop::collection::vec(word.prop_map(String::from), 1..30), 1..6)
}

proptest! {
    #[test]
    fn frequency_rank_stable_under_duplication(docs in docs_strategy(), c in 2usize..5) {
        let base = rank_by_frequency(&topic("t", docs.clone())).unwrap();
        let dup: Vec<Vec<String>> = docs.iter().map(|d| d.iter().cycle().take(d.len() * c).cloned().collect()).collect();
        let scaled = rank_by_frequency(&topic("t", dup)).unwrap();
        prop_assert_eq!(names(&base), names(&scaled));
        for (a, b) in base.terms.iter().zip(&scaled.terms) {
            prop_assert_eq!(a.score * c as f64, b.score);
        }
    }

    #[test]
    fn rankings_are_ordered_and_distinct(a in docs_strategy(), b in docs_strategy()) {
        let collection = vec![topic("a", a), topic("b", b)];
        for r in [rank_by_frequency(&collection[0]).unwrap(), rank_by_tfidf(&collection[0], &collection).unwrap()] {
            let distinct: HashSet<&str> = names(&r).into_iter().collect();
            prop_assert_eq!(distinct.len(), r.terms.len());
            for w in r.terms.windows(2) {
                prop_assert!(w[0].score > w[1].score || (w[0].score == w[1].score && w[0].term < w[1].term));
            }
        }
    }

    #[test]
    fn term_stats_consistent(a in docs_strategy(), b in docs_strategy()) {
        let collection = vec![topic("a", a), topic("b", b)];
        let df = DocumentFrequencies::from_collection(&collection);
        for s in term_stats(&collection[0], &df) {
            prop_assert!(s.tf >= 1);
            prop_assert!(s.df >= 1);
            prop_assert!(s.df <= df.n_documents());
        }
    }

    #[test]
    fn concept_sets_disjoint(docs in docs_strategy(), k in 1usize..5) {
        let r = rank_by_frequency(&topic("t", docs)).unwrap();
        match build_concept_pair(&r, k) {
            Ok(pair) => {
                prop_assert_eq!(pair.c1.len(), k);
                prop_assert_eq!(pair.c2.len(), k);
                let c1: HashSet<_> = pair.c1.iter().collect();
                prop_assert!(pair.c2.iter().all(|t| !c1.contains(t)));
            }
            Err(_) => prop_assert!(r.terms.len() < 2 * k),
        }
    }

    #[test]
    fn ranking_is_deterministic(a in docs_strategy(), b in docs_strategy()) {
        let collection = vec![topic("a", a), topic("b", b)];
        prop_assert_eq!(rank_by_tfidf(&collection[1], &collection).unwrap(), rank_by_tfidf(&collection[1], &collection).unwrap());
    }
}
