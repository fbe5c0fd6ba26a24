use std::collections::BTreeMap;

use entangle::cooccurrence::{cooccurrence_histogram, count_cooccurrences, Binning, CoocMatrix};
use entangle::corpus::Window;
use entangle::relevance::{ConceptPair, RelevanceMethod};
use proptest::prelude::*;

const VOCAB: [&str; 10] = ["ant", "bee", "cat", "dog", "eel", "fox", "gnu", "hen", "ibis", "jay"];

fn pair() -> ConceptPair {
    ConceptPair {
        topic_id: "t".into(),
        method: RelevanceMethod::Frequency,
        c1: VOCAB[..4].iter().map(|s| s.to_string()).collect(),
        c2: VOCAB[4..8].iter().map(|s| s.to_string()).collect(),
    }
}

fn window(terms: &[&str]) -> Window {
    Window {
        doc_id: "d".into(),
        index: 0,
        terms: terms.iter().map(|s| s.to_string()).collect(),
    }
}

/// Direct indicator count, one window at a time.
fn brute_force(p: &ConceptPair, windows: &[Window]) -> Vec<Vec<u64>> {
    p.c1.iter()
        .map(|a| {
            p.c2.iter()
                .map(|b| {
                    windows
                        .iter()
                        .filter(|w| w.terms.contains(a) && w.terms.contains(b))
                        .count() as u64
                })
                .collect()
        })
        .collect()
}

fn windows_strategy() -> impl Strategy<Value = Vec<Window>> {
    let term = prop::sample::select(VOCAB.to_vec());
    prop::collection::vec(prop::collection::vec(term, 0..8), 0..1500)
        .prop_map(|ws| ws.iter().map(|w| window(w)).collect())
}

#[test]
fn repeated_terms_count_once() {
    let m = count_cooccurrences(&pair(), &[window(&["ant", "eel", "ant", "eel"])], 5);
    assert_eq!(m.counts[0][0], 1);
    assert_eq!(m.n_windows, 1);
}

#[test]
fn histogram_direct_tally() {
    let mut m = CoocMatrix::zeros(
        ConceptPair {
            topic_id: "t".into(),
            method: RelevanceMethod::Tfidf,
            c1: (0..10).map(|i| format!("r{i}")).collect(),
            c2: (0..10).map(|i| format!("c{i}")).collect(),
        },
        5,
    );
    for i in 0..9 {
        m.counts[9][i] = 5;
    }
    m.counts[0][0] = 50;
    let h = cooccurrence_histogram(&m, Binning::Unit);
    assert_eq!(h.bins, BTreeMap::from([(0, 90), (5, 9), (50, 1)]));
    let h = cooccurrence_histogram(&m, Binning::Log2);
    assert_eq!(h.bins, BTreeMap::from([(0, 90), (4, 9), (32, 1)]));
}

proptest! {
    #[test]
    fn matches_brute_force(windows in windows_strategy()) {
        let m = count_cooccurrences(&pair(), &windows, 8);
        prop_assert_eq!(&m.counts, &brute_force(&pair(), &windows));
        prop_assert_eq!(m.n_windows, windows.len() as u64);
        prop_assert!(m.counts.iter().flatten().all(|&c| c <= m.n_windows));
    }

    #[test]
    fn order_invariant((windows, shuffled) in windows_strategy().prop_flat_map(|w| (Just(w.clone()), Just(w).prop_shuffle()))) {
        prop_assert_eq!(count_cooccurrences(&pair(), &windows, 8), count_cooccurrences(&pair(), &shuffled, 8));
    }

    #[test]
    fn shards_merge(windows in windows_strategy(), cut in any::<prop::sample::Index>()) {
        let at = cut.index(windows.len() + 1);
        let mut left = count_cooccurrences(&pair(), &windows[..at], 8);
        left.merge(&count_cooccurrences(&pair(), &windows[at..], 8)).unwrap();
        prop_assert_eq!(left, count_cooccurrences(&pair(), &windows, 8));
    }

    #[test]
    fn appending_never_decreases(windows in windows_strategy(), extra in windows_strategy()) {
        let before = count_cooccurrences(&pair(), &windows, 8);
        let all: Vec<Window> = windows.iter().chain(&extra).cloned().collect();
        let after = count_cooccurrences(&pair(), &all, 8);
        for (r0, r1) in before.counts.iter().zip(&after.counts) {
            for (a, b) in r0.iter().zip(r1) {
                prop_assert!(a <= b);
            }
        }
    }

    #[test]
    fn histogram_covers_every_entry(windows in windows_strategy(), log2 in any::<bool>()) {
        let m = count_cooccurrences(&pair(), &windows, 8);
        let h = cooccurrence_histogram(&m, if log2 { Binning::Log2 } else { Binning::Unit });
        prop_assert_eq!(h.total(), 16);
    }
}
