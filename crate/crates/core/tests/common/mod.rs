//! Shared test support: seeded random corpora and independent oracles.
//!
//! The oracles deliberately avoid the library's algorithms: hop distances
//! come from Floyd–Warshall or exhaustive path enumeration, weighted
//! distances from Bellman–Ford sweeps or enumeration over simple paths, and
//! tf·idf values from a from-scratch evaluation of the formula. Tallies are
//! plain double loops.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use num::bigint::BigInt;
use num::rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use cosoc_core::corpus::{ingest_str, TemporalCorpus};
use cosoc_core::ids::{BlogId, Day};
use cosoc_core::rational::Rational;

pub fn rational(num: i64, den: i64) -> Rational {
    Ratio::new(BigInt::from(num), BigInt::from(den))
}

// ---------------------------------------------------------------------
// Random corpora (independent of the library's synthetic generator)
// ---------------------------------------------------------------------

pub struct RandomCorpusParams {
    pub max_blogs: usize,
    pub max_days: u32,
    pub max_urls: usize,
    pub max_terms: usize,
    pub max_events: usize,
}

impl Default for RandomCorpusParams {
    fn default() -> Self {
        RandomCorpusParams {
            max_blogs: 20,
            max_days: 30,
            max_urls: 10,
            max_terms: 8,
            max_events: 120,
        }
    }
}

/// Random event stream; returns the ingested corpus plus its raw lines.
pub fn random_corpus(seed: u64, params: &RandomCorpusParams) -> (TemporalCorpus, String) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_blogs = rng.gen_range(2..=params.max_blogs);
    let days = rng.gen_range(4..=params.max_days);
    let n_urls = rng.gen_range(1..=params.max_urls);
    let n_terms = rng.gen_range(1..=params.max_terms);
    let n_events = rng.gen_range(1..=params.max_events);

    let mut lines = String::new();
    for _ in 0..n_events {
        let blog = rng.gen_range(0..n_blogs);
        let day = rng.gen_range(1..=days);
        let mut terms = BTreeSet::new();
        for _ in 0..rng.gen_range(0..=3) {
            terms.insert(format!("term{}", rng.gen_range(0..n_terms)));
        }
        let mut urls = BTreeSet::new();
        for _ in 0..rng.gen_range(0..=2) {
            urls.insert(format!("http://t.example/u{:03}", rng.gen_range(0..n_urls)));
        }
        let mut cites = BTreeSet::new();
        for _ in 0..rng.gen_range(0..=3) {
            // Occasionally emit a self-citation to exercise the drop path.
            cites.insert(format!("blog{}", rng.gen_range(0..n_blogs)));
        }
        let record = serde_json::json!({
            "blog": format!("blog{blog}"),
            "day": day,
            "terms": terms.iter().collect::<Vec<_>>(),
            "urls": urls.iter().collect::<Vec<_>>(),
            "cites": cites.iter().collect::<Vec<_>>(),
        });
        lines.push_str(&record.to_string());
        lines.push('\n');
    }
    let corpus = ingest_str(&lines, days, None).expect("random corpus ingests");
    (corpus, lines)
}

/// Random weighted digraph as an edge map, for direct graph fixtures.
pub fn random_digraph(seed: u64, max_nodes: usize) -> (usize, BTreeMap<(u32, u32), u64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(2..=max_nodes);
    let mut edges = BTreeMap::new();
    for i in 0..n as u32 {
        for j in 0..n as u32 {
            if i != j && rng.gen::<f64>() < 0.35 {
                edges.insert((i, j), rng.gen_range(1..=9u64));
            }
        }
    }
    (n, edges)
}

// ---------------------------------------------------------------------
// Distance oracles
// ---------------------------------------------------------------------

/// Hop distances by Floyd–Warshall.
pub fn fw_hop_matrix(n: usize, edges: &BTreeMap<(u32, u32), u64>) -> Vec<Vec<Option<u32>>> {
    let mut d = vec![vec![None; n]; n];
    for i in 0..n {
        d[i][i] = Some(0);
    }
    for (&(i, j), _) in edges {
        d[i as usize][j as usize] = Some(1);
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if let (Some(a), Some(b)) = (d[i][k], d[k][j]) {
                    if d[i][j].is_none_or(|c| a + b < c) {
                        d[i][j] = Some(a + b);
                    }
                }
            }
        }
    }
    d
}

/// Detachment values derived straight from the weight map.
pub fn detachment_weights(
    n: usize,
    edges: &BTreeMap<(u32, u32), u64>,
) -> BTreeMap<(u32, u32), Rational> {
    let mut strength = vec![0u64; n];
    for (&(i, _), &w) in edges {
        strength[i as usize] += w;
    }
    edges
        .iter()
        .map(|(&(i, j), &w)| {
            (
                (i, j),
                Ratio::new(BigInt::from(strength[i as usize]), BigInt::from(w)),
            )
        })
        .collect()
}

/// Weighted distances by repeated Bellman–Ford relaxation.
pub fn bf_cost_matrix(
    n: usize,
    costs: &BTreeMap<(u32, u32), Rational>,
) -> Vec<Vec<Option<Rational>>> {
    let mut d: Vec<Vec<Option<Rational>>> = vec![vec![None; n]; n];
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = Some(Rational::new(BigInt::from(0), BigInt::from(1)));
    }
    for _ in 0..n {
        let mut changed = false;
        for (&(u, v), w) in costs {
            for src in 0..n {
                if let Some(du) = d[src][u as usize].clone() {
                    let cand = du + w;
                    if d[src][v as usize]
                        .as_ref()
                        .is_none_or(|dv| cand < *dv)
                    {
                        d[src][v as usize] = Some(cand);
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }
    d
}

/// Minimum cost over all simple paths from `src` to `dst`, by exhaustive
/// DFS enumeration; `skip` removes one directed edge. Also returns the
/// minimum hop count among all simple paths (for the social oracle).
pub fn enumerate_min_path(
    n: usize,
    costs: &BTreeMap<(u32, u32), Rational>,
    src: u32,
    dst: u32,
    skip: Option<(u32, u32)>,
) -> (Option<Rational>, Option<u32>) {
    let mut adjacency: Vec<Vec<u32>> = vec![Vec::new(); n];
    for &(i, j) in costs.keys() {
        if skip != Some((i, j)) {
            adjacency[i as usize].push(j);
        }
    }
    let zero = Rational::new(BigInt::from(0), BigInt::from(1));
    if src == dst {
        return (Some(zero), Some(0));
    }
    let mut best_cost: Option<Rational> = None;
    let mut best_hops: Option<u32> = None;
    let mut visited = vec![false; n];
    visited[src as usize] = true;
    fn dfs(
        u: u32,
        dst: u32,
        cost: Rational,
        hops: u32,
        adjacency: &[Vec<u32>],
        costs: &BTreeMap<(u32, u32), Rational>,
        skip: Option<(u32, u32)>,
        visited: &mut [bool],
        best_cost: &mut Option<Rational>,
        best_hops: &mut Option<u32>,
    ) {
        for &v in &adjacency[u as usize] {
            if skip == Some((u, v)) {
                continue;
            }
            let step = cost.clone() + &costs[&(u, v)];
            if v == dst {
                if best_cost.as_ref().is_none_or(|b| step < *b) {
                    *best_cost = Some(step.clone());
                }
                if best_hops.is_none_or(|b| hops + 1 < b) {
                    *best_hops = Some(hops + 1);
                }
                continue;
            }
            if !visited[v as usize] {
                visited[v as usize] = true;
                dfs(
                    v, dst, step, hops + 1, adjacency, costs, skip, visited, best_cost, best_hops,
                );
                visited[v as usize] = false;
            }
        }
    }
    dfs(
        src,
        dst,
        zero,
        0,
        &adjacency,
        costs,
        skip,
        &mut visited,
        &mut best_cost,
        &mut best_hops,
    );
    (best_cost, best_hops)
}

// ---------------------------------------------------------------------
// Corpus-level naive scans
// ---------------------------------------------------------------------

/// Daily citation pairs by direct event scan.
pub fn naive_daily_pairs(corpus: &TemporalCorpus, t: Day) -> BTreeSet<(u32, u32)> {
    let mut pairs = BTreeSet::new();
    for e in corpus.events() {
        if e.day == t {
            for &j in &e.cites {
                pairs.insert((e.blog.0, j.0));
            }
        }
    }
    pairs
}

/// Aggregated weights at `t` by summing daily binary views.
pub fn naive_aggregate(corpus: &TemporalCorpus, t: Day) -> BTreeMap<(u32, u32), u64> {
    let mut weights = BTreeMap::new();
    for day in 1..=t {
        for pair in naive_daily_pairs(corpus, day) {
            *weights.entry(pair).or_insert(0) += 1;
        }
    }
    weights
}

/// Aggregated term counts at `t` by per-day scan.
pub fn naive_profiles(corpus: &TemporalCorpus, t: Day) -> BTreeMap<(u32, u32), u32> {
    let mut counts = BTreeMap::new();
    for day in 1..=t {
        let mut seen = BTreeSet::new();
        for e in corpus.events() {
            if e.day == day {
                for &w in &e.terms {
                    seen.insert((e.blog.0, w.0));
                }
            }
        }
        for key in seen {
            *counts.entry(key).or_insert(0) += 1;
        }
    }
    counts
}

/// From-scratch tf·idf-adjusted vectors and cosine distance at `t`.
pub struct NaiveSemantics {
    pub vectors: Vec<Vec<f64>>,
}

pub fn naive_semantics(corpus: &TemporalCorpus, t: Day) -> NaiveSemantics {
    let n = corpus.num_blogs();
    let num_terms = corpus.terms().len();
    let counts = naive_profiles(corpus, t);
    let mut df = vec![0u32; num_terms];
    let mut used: BTreeSet<(u32, u32)> = BTreeSet::new();
    for (&(b, w), &c) in &counts {
        if c > 0 && used.insert((w, b)) {
            df[w as usize] += 1;
        }
    }
    let mut vectors = vec![vec![0f64; num_terms]; n];
    for blog in 0..n {
        let total: u64 = (0..num_terms)
            .map(|w| u64::from(*counts.get(&(blog as u32, w as u32)).unwrap_or(&0)))
            .sum();
        if total == 0 {
            continue;
        }
        for w in 0..num_terms {
            let c = *counts.get(&(blog as u32, w as u32)).unwrap_or(&0);
            if c > 0 {
                let tf = f64::from(c) / total as f64;
                let idf = (n as f64 / f64::from(df[w])).ln();
                vectors[blog][w] = tf * idf;
            }
        }
    }
    NaiveSemantics { vectors }
}

impl NaiveSemantics {
    pub fn delta(&self, i: usize, j: usize) -> Option<f64> {
        let ni = self.vectors[i].iter().map(|v| v * v).sum::<f64>().sqrt();
        let nj = self.vectors[j].iter().map(|v| v * v).sum::<f64>().sqrt();
        if ni == 0.0 || nj == 0.0 {
            return None;
        }
        if i == j {
            return Some(0.0);
        }
        let dot: f64 = self.vectors[i]
            .iter()
            .zip(&self.vectors[j])
            .map(|(a, b)| a * b)
            .sum();
        Some((1.0 - dot / (ni * nj)).clamp(0.0, 1.0))
    }
}

/// Pairs whose aggregated weight grew during `(t_start, t_start + len]`.
pub fn naive_new_links(
    corpus: &TemporalCorpus,
    t_start: Day,
    len: u32,
) -> BTreeSet<(u32, u32)> {
    let before = naive_aggregate(corpus, t_start);
    let after = naive_aggregate(corpus, t_start + len);
    after
        .iter()
        .filter(|(&pair, &w)| w > *before.get(&pair).unwrap_or(&0))
        .map(|(&pair, _)| pair)
        .collect()
}

// ---------------------------------------------------------------------
// Naive diffusion
// ---------------------------------------------------------------------

pub struct NaiveSubgraph {
    pub nodes: BTreeSet<u32>,
    /// (day, source, target)
    pub edges: BTreeSet<(Day, u32, u32)>,
}

/// Quadruple scan over (url, day, citing pair) with naive mention lookups.
pub fn naive_subgraph(corpus: &TemporalCorpus, url: u32) -> NaiveSubgraph {
    let mentioned_on = |blog: u32, day: Day| -> bool {
        corpus.events().iter().any(|e| {
            e.blog.0 == blog && e.day == day && e.urls.iter().any(|u| u.0 == url)
        })
    };
    let mentioned_before = |blog: u32, day: Day| -> bool {
        corpus.events().iter().any(|e| {
            e.blog.0 == blog && e.day < day && e.urls.iter().any(|u| u.0 == url)
        })
    };
    let mut nodes = BTreeSet::new();
    for e in corpus.events() {
        if e.urls.iter().any(|u| u.0 == url) {
            nodes.insert(e.blog.0);
        }
    }
    let mut edges = BTreeSet::new();
    for day in 1..=corpus.horizon() {
        for (i, j) in naive_daily_pairs(corpus, day) {
            if mentioned_on(i, day) && mentioned_before(j, day) {
                edges.insert((day, i, j));
            }
        }
    }
    NaiveSubgraph { nodes, edges }
}

/// FIRST/SECOND per naive edge, re-derived from the definition.
pub fn naive_orders(sub: &NaiveSubgraph) -> BTreeMap<(Day, u32, u32), bool> {
    // true = SECOND
    sub.edges
        .iter()
        .map(|&(day, i, j)| {
            let second = sub
                .edges
                .iter()
                .any(|&(d2, s2, _)| s2 == j && d2 <= day);
            ((day, i, j), second)
        })
        .collect()
}

// ---------------------------------------------------------------------
// Naive bin indexing (re-derivations of the documented bin layouts)
// ---------------------------------------------------------------------

/// Social bins: 1..=max_d exact, then finite-beyond, then unreachable.
pub fn naive_social_bin(max_d: u32, hops: Option<u32>) -> usize {
    match hops {
        Some(h) if h >= 1 && h <= max_d => (h - 1) as usize,
        Some(_) => max_d as usize,
        None => max_d as usize + 1,
    }
}

/// Interval bins: [0,e0), [e0,e1), ..., [e_last, inf), unreachable.
pub fn naive_interval_bin(edges: &[Rational], value: Option<&Rational>) -> usize {
    match value {
        Some(v) => {
            let mut b = 0;
            for e in edges {
                if v >= e {
                    b += 1;
                }
            }
            b
        }
        None => edges.len() + 1,
    }
}

/// Semantic bins of width `width_num/width_den`, last bin closed at 1.
pub fn naive_delta_bin(delta: f64, bin_count: usize, width_num: u64, width_den: u64) -> usize {
    let mut bin = 0;
    for m in 1..bin_count {
        let boundary = (m as u64 * width_num) as f64 / width_den as f64;
        if delta >= boundary {
            bin = m;
        }
    }
    bin
}

// ---------------------------------------------------------------------
// Misc
// ---------------------------------------------------------------------

pub fn blog_id(corpus: &TemporalCorpus, name: &str) -> BlogId {
    BlogId(corpus.blogs().lookup(name).expect("blog registered"))
}

/// Spearman rank correlation with average ranks for ties.
pub fn spearman(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len());
    let rank = |vals: &[f64]| -> Vec<f64> {
        let mut idx: Vec<usize> = (0..vals.len()).collect();
        idx.sort_by(|&a, &b| vals[a].partial_cmp(&vals[b]).unwrap());
        let mut ranks = vec![0f64; vals.len()];
        let mut pos = 0;
        while pos < idx.len() {
            let mut end = pos;
            while end + 1 < idx.len() && vals[idx[end + 1]] == vals[idx[pos]] {
                end += 1;
            }
            let avg = (pos + end) as f64 / 2.0 + 1.0;
            for &i in &idx[pos..=end] {
                ranks[i] = avg;
            }
            pos = end + 1;
        }
        ranks
    };
    let rx = rank(xs);
    let ry = rank(ys);
    let n = xs.len() as f64;
    let mx = rx.iter().sum::<f64>() / n;
    let my = ry.iter().sum::<f64>() / n;
    let cov: f64 = rx.iter().zip(&ry).map(|(a, b)| (a - mx) * (b - my)).sum();
    let vx: f64 = rx.iter().map(|a| (a - mx).powi(2)).sum();
    let vy: f64 = ry.iter().map(|b| (b - my).powi(2)).sum();
    if vx == 0.0 || vy == 0.0 {
        return 0.0;
    }
    cov / (vx.sqrt() * vy.sqrt())
}
