//! Brute-force equality for every propensity kind: naive double loops over
//! ordered pairs, with Floyd–Warshall / Bellman–Ford / direct-formula
//! distances, must reproduce the library's tallies exactly.

mod common;

use std::collections::BTreeMap;

use common::{
    bf_cost_matrix, detachment_weights, fw_hop_matrix, naive_new_links, naive_semantics,
    random_corpus, rational, RandomCorpusParams,
};
use cosoc_core::corpus::TemporalCorpus;
use cosoc_core::ids::Day;
use cosoc_core::propensity::{
    propensity_2d, propensity_detachment, propensity_semantic, propensity_social, PairTally,
    WindowScheme,
};
use cosoc_core::rational::Rational;

fn scheme_for(corpus: &TemporalCorpus) -> WindowScheme {
    let d = corpus.horizon();
    let len = (d / 4).max(1);
    WindowScheme {
        t0: (d - 2 * len).max(1),
        window_len: len,
        windows: 2,
    }
}

struct NaiveWindow {
    hops: Vec<Vec<Option<u32>>>,
    costs: Vec<Vec<Option<Rational>>>,
    new_links: std::collections::BTreeSet<(u32, u32)>,
    t_start: Day,
}

fn naive_window(corpus: &TemporalCorpus, t_start: Day, len: u32) -> NaiveWindow {
    let n = corpus.num_blogs();
    let weights: BTreeMap<(u32, u32), u64> = common::naive_aggregate(corpus, t_start);
    let hops = fw_hop_matrix(n, &weights);
    let costs = bf_cost_matrix(n, &detachment_weights(n, &weights));
    NaiveWindow {
        hops,
        costs,
        new_links: naive_new_links(corpus, t_start, len),
        t_start,
    }
}

fn check_tallies(
    label: &str,
    seed: u64,
    window: usize,
    got: &[PairTally],
    expected: &[(u64, u64)],
) {
    assert_eq!(got.len(), expected.len(), "{label} seed {seed} w{window}");
    for (b, (g, e)) in got.iter().zip(expected).enumerate() {
        assert_eq!(
            (g.numerator, g.denominator),
            *e,
            "{label} seed {seed} window {window} bin {b}"
        );
        assert!(g.numerator <= g.denominator);
    }
}

#[test]
fn social_matches_naive_double_loop() {
    let max_d = 4u32;
    for seed in 0..60u64 {
        let (corpus, _) = random_corpus(seed, &RandomCorpusParams::default());
        let scheme = scheme_for(&corpus);
        let curve = propensity_social(&corpus, &scheme, max_d).unwrap();
        let n = corpus.num_blogs();
        for (k, t_start) in scheme.starts().enumerate() {
            let naive = naive_window(&corpus, t_start, scheme.window_len);
            assert_eq!(curve.windows[k].t_start, naive.t_start);
            // Bins: 1..=max_d, beyond, unreachable.
            let mut expected = vec![(0u64, 0u64); max_d as usize + 2];
            for i in 0..n {
                for j in 0..n {
                    if i == j {
                        continue;
                    }
                    let bin = match naive.hops[i][j] {
                        Some(h) if h >= 1 && h <= max_d => (h - 1) as usize,
                        Some(_) => max_d as usize,
                        None => max_d as usize + 1,
                    };
                    expected[bin].1 += 1;
                    if naive.new_links.contains(&(i as u32, j as u32)) {
                        expected[bin].0 += 1;
                    }
                }
            }
            check_tallies("social", seed, k, &curve.windows[k].tallies, &expected);
            assert_eq!(curve.windows[k].excluded_pairs, 0);
        }
    }
}

#[test]
fn detachment_matches_naive_double_loop() {
    let edges = vec![rational(1, 1), rational(2, 1), rational(4, 1), rational(8, 1)];
    for seed in 0..40u64 {
        let (corpus, _) = random_corpus(seed, &RandomCorpusParams::default());
        let scheme = scheme_for(&corpus);
        let curve = propensity_detachment(&corpus, &scheme, &edges).unwrap();
        let n = corpus.num_blogs();
        for (k, t_start) in scheme.starts().enumerate() {
            let naive = naive_window(&corpus, t_start, scheme.window_len);
            // Bins: [0,1), [1,2), [2,4), [4,8), [8,inf), unreachable.
            let mut expected = vec![(0u64, 0u64); edges.len() + 2];
            for i in 0..n {
                for j in 0..n {
                    if i == j {
                        continue;
                    }
                    let bin = match &naive.costs[i][j] {
                        Some(c) => {
                            let mut b = 0;
                            for e in &edges {
                                if c >= e {
                                    b += 1;
                                }
                            }
                            b
                        }
                        None => edges.len() + 1,
                    };
                    expected[bin].1 += 1;
                    if naive.new_links.contains(&(i as u32, j as u32)) {
                        expected[bin].0 += 1;
                    }
                }
            }
            check_tallies("detachment", seed, k, &curve.windows[k].tallies, &expected);
        }
    }
}

fn naive_delta_bin(delta: f64, bin_count: usize, width_num: u64, width_den: u64) -> usize {
    // Boundary m is the exact rational m*width rendered to f64, matching the
    // library's reporting of bin edges.
    let mut bin = 0;
    for m in 1..bin_count {
        let boundary = (m as u64 * width_num) as f64 / width_den as f64;
        if delta >= boundary {
            bin = m;
        }
    }
    bin
}

#[test]
fn semantic_matches_naive_double_loop() {
    let width = rational(1, 4);
    for seed in 0..40u64 {
        let (corpus, _) = random_corpus(seed, &RandomCorpusParams::default());
        let scheme = scheme_for(&corpus);
        let curve = propensity_semantic(&corpus, &scheme, &width).unwrap();
        assert_eq!(curve.bins.len(), 4);
        let n = corpus.num_blogs();
        for (k, t_start) in scheme.starts().enumerate() {
            let naive_sem = naive_semantics(&corpus, t_start);
            let new_links = naive_new_links(&corpus, t_start, scheme.window_len);
            let mut expected = vec![(0u64, 0u64); 4];
            let mut excluded = 0u64;
            for i in 0..n {
                for j in 0..n {
                    if i == j {
                        continue;
                    }
                    match naive_sem.delta(i, j) {
                        Some(delta) => {
                            let bin = naive_delta_bin(delta, 4, 1, 4);
                            expected[bin].1 += 1;
                            if new_links.contains(&(i as u32, j as u32)) {
                                expected[bin].0 += 1;
                            }
                        }
                        None => excluded += 1,
                    }
                }
            }
            check_tallies("semantic", seed, k, &curve.windows[k].tallies, &expected);
            assert_eq!(curve.windows[k].excluded_pairs, excluded, "seed {seed}");
        }
    }
}

#[test]
fn grid_matches_naive_triple_scan() {
    let max_d = 3u32;
    let width = rational(1, 2);
    for seed in 0..40u64 {
        let (corpus, _) = random_corpus(seed, &RandomCorpusParams::default());
        let scheme = scheme_for(&corpus);
        let grid = propensity_2d(&corpus, &scheme, max_d, &width).unwrap();
        let n = corpus.num_blogs();
        let n_delta = grid.delta_bins.len();
        assert_eq!(n_delta, 2);
        for (k, t_start) in scheme.starts().enumerate() {
            let naive = naive_window(&corpus, t_start, scheme.window_len);
            let naive_sem = naive_semantics(&corpus, t_start);
            let mut expected = vec![(0u64, 0u64); grid.social_bins.len() * n_delta];
            let mut excluded = 0u64;
            for i in 0..n {
                for j in 0..n {
                    if i == j {
                        continue;
                    }
                    match naive_sem.delta(i, j) {
                        Some(delta) => {
                            let s = match naive.hops[i][j] {
                                Some(h) if h >= 1 && h <= max_d => (h - 1) as usize,
                                Some(_) => max_d as usize,
                                None => max_d as usize + 1,
                            };
                            let d = naive_delta_bin(delta, 2, 1, 2);
                            let cell = s * n_delta + d;
                            expected[cell].1 += 1;
                            if naive.new_links.contains(&(i as u32, j as u32)) {
                                expected[cell].0 += 1;
                            }
                        }
                        None => excluded += 1,
                    }
                }
            }
            check_tallies("grid", seed, k, &grid.windows[k].tallies, &expected);
            assert_eq!(grid.windows[k].excluded_pairs, excluded);
        }
    }
}

#[test]
fn summaries_respect_normalization_identity() {
    for seed in [3u64, 17, 29] {
        let (corpus, _) = random_corpus(seed, &RandomCorpusParams::default());
        let scheme = scheme_for(&corpus);
        let curve = propensity_social(&corpus, &scheme, 4).unwrap();
        for w in &curve.windows {
            let num: u64 = w.tallies.iter().map(|t| t.numerator).sum();
            let den: u64 = w.tallies.iter().map(|t| t.denominator).sum();
            if den == 0 || num == 0 {
                continue;
            }
            let overall = w.overall().unwrap();
            // Denominator-weighted mean of normalized propensities == 1.
            let weighted: Rational = w
                .tallies
                .iter()
                .filter(|t| t.denominator > 0)
                .map(|t| {
                    rational(t.numerator as i64, t.denominator as i64)
                        / overall.clone()
                        * rational(t.denominator as i64, den as i64)
                })
                .sum();
            assert_eq!(weighted, rational(1, 1), "seed {seed} window {}", w.k);
        }
    }
}
