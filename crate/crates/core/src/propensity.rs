//! Link-creation propensity estimation over rolling windows.
//!
//! For a window starting at cut-off `t_k`, a pair `(i, j)` counts toward the
//! numerator of its distance bin when the aggregated citation weight grows
//! during `(t_k, t_k + T]`, i.e. when any citation event (including a repeat
//! of an existing edge) occurs inside the window. The denominator counts all
//! ordered pairs sitting in that bin at `t_k`. Distances are always measured
//! on data aggregated at the window start.
//!
//! Raw propensities are exact tallies; per-bin means carry 95% confidence
//! half-widths over windows, and normalized values divide each window's bin
//! propensity by that window's propensity over all eligible pairs.

use num::ToPrimitive;
use rayon::prelude::*;
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::corpus::TemporalCorpus;
use crate::error::{Error, Result};
use crate::graphmetrics::aggregate;
use crate::ids::{BlogId, Day};
use crate::rational::{format_rational, ratio, Rational};
use crate::semantics::{build_profiles, tfidf_adjust};

/// Rolling-window scheme: window `k` covers days `(t_k, t_k + T]` with
/// `t_k = t0 + k*T`, for `k` in `0..windows`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct WindowScheme {
    pub t0: Day,
    pub window_len: u32,
    pub windows: u32,
}

impl WindowScheme {
    /// Two-month initialization with weekly windows, eight of them.
    pub fn weekly_default() -> Self {
        WindowScheme {
            t0: 60,
            window_len: 7,
            windows: 8,
        }
    }

    pub fn validate(&self, horizon: Day) -> Result<()> {
        if self.t0 < 1 || self.window_len < 1 || self.windows < 1 {
            return Err(Error::InvalidParameter(
                "window scheme requires t0 >= 1, T >= 1, windows >= 1".into(),
            ));
        }
        let needed = self.t0 + self.windows * self.window_len;
        if needed > horizon {
            return Err(Error::WindowExceedsHorizon {
                t0: self.t0,
                window_len: self.window_len,
                windows: self.windows,
                needed,
                horizon,
            });
        }
        Ok(())
    }

    /// Window-start cut-offs `t_k`.
    pub fn starts(&self) -> impl Iterator<Item = Day> + '_ {
        (0..self.windows).map(|k| self.t0 + k * self.window_len)
    }
}

/// One bin of a propensity curve.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DistanceBin {
    /// Exact hop distance.
    Hop(u32),
    /// Finite hop distance strictly greater than the carried maximum.
    HopBeyond(u32),
    /// Half-open rational interval `[lo, hi)`; `hi = None` means every
    /// finite value `>= lo`.
    Interval { lo: Rational, hi: Option<Rational> },
    /// Semantic-distance interval `[lo, hi)`, closed at the top for the
    /// final bin so that delta = 1 has a home.
    Delta {
        lo: Rational,
        hi: Rational,
        closed: bool,
    },
    /// Infinite distance (unreachable pairs).
    Unreachable,
}

impl DistanceBin {
    pub fn lo_label(&self) -> String {
        match self {
            DistanceBin::Hop(h) => h.to_string(),
            DistanceBin::HopBeyond(max) => (max + 1).to_string(),
            DistanceBin::Interval { lo, .. } => format_rational(lo),
            DistanceBin::Delta { lo, .. } => format_rational(lo),
            DistanceBin::Unreachable => "inf".into(),
        }
    }

    pub fn hi_label(&self) -> String {
        match self {
            DistanceBin::Hop(h) => h.to_string(),
            DistanceBin::HopBeyond(_) => "inf".into(),
            DistanceBin::Interval { hi, .. } => match hi {
                Some(hi) => format_rational(hi),
                None => "inf".into(),
            },
            DistanceBin::Delta { hi, .. } => format_rational(hi),
            DistanceBin::Unreachable => "inf".into(),
        }
    }
}

/// Numerator/denominator pair for one bin in one window.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct PairTally {
    pub numerator: u64,
    pub denominator: u64,
}

impl PairTally {
    pub fn raw(&self) -> Option<f64> {
        (self.denominator > 0).then(|| self.numerator as f64 / self.denominator as f64)
    }
}

/// All bin tallies of a single window.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WindowTallies {
    /// Window index `k`.
    pub k: u32,
    /// Window-start cut-off `t_k`.
    pub t_start: Day,
    pub tallies: Vec<PairTally>,
    /// Ordered pairs excluded because their semantic distance was
    /// undefined at `t_k` (zero for purely topological curves).
    pub excluded_pairs: u64,
}

impl WindowTallies {
    /// The window's propensity over all eligible pairs, as an exact ratio.
    pub fn overall(&self) -> Option<Rational> {
        let num: u64 = self.tallies.iter().map(|t| t.numerator).sum();
        let den: u64 = self.tallies.iter().map(|t| t.denominator).sum();
        (den > 0).then(|| ratio(num as i64, den as i64))
    }
}

/// Cross-window statistics for one bin.
#[derive(Clone, Debug, PartialEq)]
pub struct BinSummary {
    /// Mean of raw per-window propensities over windows with data.
    pub mean: Option<f64>,
    /// Mean of per-window normalized propensities.
    pub normalized_mean: Option<f64>,
    /// 95% confidence half-width on the normalized mean (Student's t).
    pub ci95_halfwidth: Option<f64>,
    /// Windows with a nonzero denominator for this bin.
    pub windows_with_data: u32,
}

/// A 1-D propensity curve over distance bins.
#[derive(Clone, Debug)]
pub struct PropensityCurve {
    pub bins: Vec<DistanceBin>,
    pub windows: Vec<WindowTallies>,
    pub summary: Vec<BinSummary>,
}

/// A 2-D propensity grid over (social, semantic) bins, row-major by social
/// bin.
#[derive(Clone, Debug)]
pub struct PropensityGrid {
    pub social_bins: Vec<DistanceBin>,
    pub delta_bins: Vec<DistanceBin>,
    pub windows: Vec<WindowTallies>,
    pub summary: Vec<BinSummary>,
}

impl PropensityGrid {
    pub fn cell(&self, social_idx: usize, delta_idx: usize) -> usize {
        social_idx * self.delta_bins.len() + delta_idx
    }
}

/// Default detachment bin edges: powers of two from 1 to 256.
pub fn default_detachment_bin_edges() -> Vec<Rational> {
    (0..=8).map(|p| ratio(1 << p, 1)).collect()
}

fn social_bins(max_d: u32) -> Vec<DistanceBin> {
    let mut bins: Vec<DistanceBin> = (1..=max_d).map(DistanceBin::Hop).collect();
    bins.push(DistanceBin::HopBeyond(max_d));
    bins.push(DistanceBin::Unreachable);
    bins
}

/// Bin index for a hop distance (`None` = unreachable). Layout matches
/// [`social_bins`].
fn social_bin_index(max_d: u32, hops: Option<u32>) -> usize {
    match hops {
        Some(h) if h <= max_d => (h - 1) as usize,
        Some(_) => max_d as usize,
        None => max_d as usize + 1,
    }
}

fn interval_bins(edges: &[Rational]) -> Vec<DistanceBin> {
    let mut bins = Vec::with_capacity(edges.len() + 2);
    let mut lo = ratio(0, 1);
    for e in edges {
        bins.push(DistanceBin::Interval {
            lo,
            hi: Some(e.clone()),
        });
        lo = e.clone();
    }
    bins.push(DistanceBin::Interval { lo, hi: None });
    bins.push(DistanceBin::Unreachable);
    bins
}

fn interval_bin_index(edges: &[Rational], value: Option<&Rational>) -> usize {
    match value {
        Some(v) => edges.partition_point(|e| e <= v),
        None => edges.len() + 1,
    }
}

fn delta_bins(width: &Rational) -> Result<Vec<DistanceBin>> {
    let one = ratio(1, 1);
    if *width <= ratio(0, 1) || *width > one {
        return Err(Error::InvalidParameter(
            "semantic bin width must lie in (0, 1]".into(),
        ));
    }
    let nbins = (one.clone() / width.clone()).ceil().to_integer();
    let nbins = nbins.to_usize().ok_or_else(|| {
        Error::InvalidParameter("semantic bin width produces too many bins".into())
    })?;
    let mut bins = Vec::with_capacity(nbins);
    for m in 0..nbins {
        let lo = width.clone() * ratio(m as i64, 1);
        let hi = if m + 1 == nbins {
            one.clone()
        } else {
            width.clone() * ratio(m as i64 + 1, 1)
        };
        bins.push(DistanceBin::Delta {
            lo,
            hi,
            closed: m + 1 == nbins,
        });
    }
    Ok(bins)
}

/// Internal f64 boundaries between semantic bins.
fn delta_boundaries(bins: &[DistanceBin]) -> Vec<f64> {
    bins.iter()
        .skip(1)
        .map(|b| match b {
            DistanceBin::Delta { lo, .. } => crate::rational::to_f64(lo),
            _ => unreachable!("delta curves only hold delta bins"),
        })
        .collect()
}

fn delta_bin_index(boundaries: &[f64], delta: f64) -> usize {
    boundaries.partition_point(|b| *b <= delta)
}

/// Per-source new-link targets inside one window.
fn new_link_targets(
    corpus: &TemporalCorpus,
    t_start: Day,
    window_len: u32,
) -> Result<Vec<Vec<u32>>> {
    let mut per_source: Vec<Vec<u32>> = vec![Vec::new(); corpus.num_blogs()];
    for day in (t_start + 1)..=(t_start + window_len) {
        for (i, j) in corpus.daily_citations(day)? {
            per_source[i.index()].push(j.0);
        }
    }
    for row in &mut per_source {
        row.sort_unstable();
        row.dedup();
    }
    Ok(per_source)
}

struct WindowAccumulator {
    tallies: Vec<PairTally>,
    excluded: u64,
}

/// Run one window: for every ordered pair, ask the kernel for a bin index
/// (`None` = excluded pair) and tally numerator membership.
fn run_window<F>(n: usize, num_bins: usize, new_links: &[Vec<u32>], bin_of: F) -> WindowAccumulator
where
    F: Fn(usize, usize) -> Option<usize> + Sync,
{
    let acc = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut tallies = vec![PairTally::default(); num_bins];
            let mut excluded = 0u64;
            let new_row = &new_links[i];
            for j in 0..n {
                if i == j {
                    continue;
                }
                match bin_of(i, j) {
                    Some(bin) => {
                        tallies[bin].denominator += 1;
                        if new_row.binary_search(&(j as u32)).is_ok() {
                            tallies[bin].numerator += 1;
                        }
                    }
                    None => excluded += 1,
                }
            }
            WindowAccumulator { tallies, excluded }
        })
        .reduce(
            || WindowAccumulator {
                tallies: vec![PairTally::default(); num_bins],
                excluded: 0,
            },
            |mut a, b| {
                for (x, y) in a.tallies.iter_mut().zip(&b.tallies) {
                    x.numerator += y.numerator;
                    x.denominator += y.denominator;
                }
                a.excluded += b.excluded;
                a
            },
        );
    acc
}

fn summarize(bins: usize, windows: &[WindowTallies]) -> Vec<BinSummary> {
    let overall: Vec<Option<f64>> = windows
        .iter()
        .map(|w| w.overall().map(|r| crate::rational::to_f64(&r)))
        .collect();
    (0..bins)
        .map(|b| {
            let mut raws = Vec::new();
            let mut normalized = Vec::new();
            for (w, t) in windows.iter().enumerate() {
                let tally = &t.tallies[b];
                if let Some(raw) = tally.raw() {
                    raws.push(raw);
                    if let Some(f_all) = overall[w] {
                        if f_all > 0.0 {
                            normalized.push(raw / f_all);
                        }
                    }
                }
            }
            let mean = mean_of(&raws);
            let normalized_mean = mean_of(&normalized);
            let ci95_halfwidth = ci95(&normalized);
            BinSummary {
                mean,
                normalized_mean,
                ci95_halfwidth,
                windows_with_data: raws.len() as u32,
            }
        })
        .collect()
}

fn mean_of(values: &[f64]) -> Option<f64> {
    (!values.is_empty()).then(|| values.iter().sum::<f64>() / values.len() as f64)
}

/// Student-t 95% half-width on the mean of `values`.
fn ci95(values: &[f64]) -> Option<f64> {
    let m = values.len();
    if m < 2 {
        return None;
    }
    let mean = values.iter().sum::<f64>() / m as f64;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (m as f64 - 1.0);
    let t = StudentsT::new(0.0, 1.0, m as f64 - 1.0)
        .expect("valid t distribution")
        .inverse_cdf(0.975);
    Some(t * (var / m as f64).sqrt())
}

/// Propensity for new citation as a function of social distance, with bins
/// `1..=max_d`, a finite-beyond bin and an unreachable bin.
pub fn propensity_social(
    corpus: &TemporalCorpus,
    scheme: &WindowScheme,
    max_d: u32,
) -> Result<PropensityCurve> {
    scheme.validate(corpus.horizon())?;
    if max_d < 1 {
        return Err(Error::InvalidParameter("max_d must be >= 1".into()));
    }
    let bins = social_bins(max_d);
    let n = corpus.num_blogs();
    let mut windows = Vec::with_capacity(scheme.windows as usize);
    for (k, t_start) in scheme.starts().enumerate() {
        let graph = aggregate(corpus, t_start)?;
        let adjacency = graph.unweighted_adjacency_rows();
        let new_links = new_link_targets(corpus, t_start, scheme.window_len)?;
        let hop_rows: Vec<Vec<Option<u32>>> = (0..n)
            .into_par_iter()
            .map(|i| crate::graphmetrics::bfs_row(&adjacency, i))
            .collect();
        let acc = run_window(n, bins.len(), &new_links, |i, j| {
            Some(social_bin_index(max_d, hop_rows[i][j]))
        });
        windows.push(WindowTallies {
            k: k as u32,
            t_start,
            tallies: acc.tallies,
            excluded_pairs: acc.excluded,
        });
    }
    let summary = summarize(bins.len(), &windows);
    Ok(PropensityCurve {
        bins,
        windows,
        summary,
    })
}

/// Propensity as a function of detachment-based distance, binned into the
/// half-open intervals of `bin_edges` plus finite-overflow and unreachable
/// bins.
pub fn propensity_detachment(
    corpus: &TemporalCorpus,
    scheme: &WindowScheme,
    bin_edges: &[Rational],
) -> Result<PropensityCurve> {
    scheme.validate(corpus.horizon())?;
    if bin_edges.is_empty() || bin_edges.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParameter(
            "detachment bin edges must be non-empty and strictly ascending".into(),
        ));
    }
    if bin_edges[0] < ratio(0, 1) {
        return Err(Error::InvalidParameter(
            "detachment bin edges must be nonnegative".into(),
        ));
    }
    let bins = interval_bins(bin_edges);
    let n = corpus.num_blogs();
    let mut windows = Vec::with_capacity(scheme.windows as usize);
    for (k, t_start) in scheme.starts().enumerate() {
        let graph = aggregate(corpus, t_start)?;
        let engine = graph.detachment_engine();
        let new_links = new_link_targets(corpus, t_start, scheme.window_len)?;
        let cost_rows: Vec<Vec<Option<Rational>>> = (0..n)
            .into_par_iter()
            .map(|i| {
                engine
                    .distances_from(BlogId(i as u32))
                    .expect("node in range")
                    .into_iter()
                    .map(|d| match d {
                        crate::rational::Distance::Finite(r) => Some(r),
                        crate::rational::Distance::Infinite => None,
                    })
                    .collect()
            })
            .collect();
        let acc = run_window(n, bins.len(), &new_links, |i, j| {
            Some(interval_bin_index(bin_edges, cost_rows[i][j].as_ref()))
        });
        windows.push(WindowTallies {
            k: k as u32,
            t_start,
            tallies: acc.tallies,
            excluded_pairs: acc.excluded,
        });
    }
    let summary = summarize(bins.len(), &windows);
    Ok(PropensityCurve {
        bins,
        windows,
        summary,
    })
}

/// Propensity as a function of semantic distance, over `[m*w, (m+1)*w)`
/// bins; pairs with an undefined distance are excluded from numerator and
/// denominator and counted per window.
pub fn propensity_semantic(
    corpus: &TemporalCorpus,
    scheme: &WindowScheme,
    bin_width: &Rational,
) -> Result<PropensityCurve> {
    scheme.validate(corpus.horizon())?;
    let bins = delta_bins(bin_width)?;
    let boundaries = delta_boundaries(&bins);
    let n = corpus.num_blogs();
    let mut windows = Vec::with_capacity(scheme.windows as usize);
    for (k, t_start) in scheme.starts().enumerate() {
        let adjusted = tfidf_adjust(&build_profiles(corpus, t_start)?);
        let new_links = new_link_targets(corpus, t_start, scheme.window_len)?;
        let acc = run_window(n, bins.len(), &new_links, |i, j| {
            adjusted
                .distance_unchecked(i, j)
                .map(|d| delta_bin_index(&boundaries, d))
        });
        windows.push(WindowTallies {
            k: k as u32,
            t_start,
            tallies: acc.tallies,
            excluded_pairs: acc.excluded,
        });
    }
    let summary = summarize(bins.len(), &windows);
    Ok(PropensityCurve {
        bins,
        windows,
        summary,
    })
}

/// Two-dimensional propensity over (social distance, semantic distance).
pub fn propensity_2d(
    corpus: &TemporalCorpus,
    scheme: &WindowScheme,
    max_d: u32,
    delta_bin_width: &Rational,
) -> Result<PropensityGrid> {
    scheme.validate(corpus.horizon())?;
    if max_d < 1 {
        return Err(Error::InvalidParameter("max_d must be >= 1".into()));
    }
    let s_bins = social_bins(max_d);
    let d_bins = delta_bins(delta_bin_width)?;
    let boundaries = delta_boundaries(&d_bins);
    let num_cells = s_bins.len() * d_bins.len();
    let n = corpus.num_blogs();
    let mut windows = Vec::with_capacity(scheme.windows as usize);
    for (k, t_start) in scheme.starts().enumerate() {
        let graph = aggregate(corpus, t_start)?;
        let adjacency = graph.unweighted_adjacency_rows();
        let adjusted = tfidf_adjust(&build_profiles(corpus, t_start)?);
        let new_links = new_link_targets(corpus, t_start, scheme.window_len)?;
        let hop_rows: Vec<Vec<Option<u32>>> = (0..n)
            .into_par_iter()
            .map(|i| crate::graphmetrics::bfs_row(&adjacency, i))
            .collect();
        let acc = run_window(n, num_cells, &new_links, |i, j| {
            adjusted.distance_unchecked(i, j).map(|delta| {
                let s = social_bin_index(max_d, hop_rows[i][j]);
                let d = delta_bin_index(&boundaries, delta);
                s * d_bins.len() + d
            })
        });
        windows.push(WindowTallies {
            k: k as u32,
            t_start,
            tallies: acc.tallies,
            excluded_pairs: acc.excluded,
        });
    }
    let summary = summarize(num_cells, &windows);
    Ok(PropensityGrid {
        social_bins: s_bins,
        delta_bins: d_bins,
        windows,
        summary,
    })
}
