//! Aggregated term profiles, tf·idf adjustment, and the cosine-based
//! semantic distance between blogs.

use crate::corpus::TemporalCorpus;
use crate::error::{Error, Result};
use crate::ids::{BlogId, Day, TermId};

/// Per-blog aggregated term counts at a cut-off day: `counts(i, w)` is the
/// number of days `<= cutoff` on which blog `i` used term `w` (daily usage
/// is binary, so a term gains at most one count per day).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SemanticProfile {
    cutoff: Day,
    num_terms: usize,
    /// Sparse per-blog rows, sorted by term id.
    counts: Vec<Vec<(u32, u32)>>,
}

/// Build aggregated profiles at cut-off `t`. Blogs with no posts by `t`
/// have empty rows.
pub fn build_profiles(corpus: &TemporalCorpus, t: Day) -> Result<SemanticProfile> {
    if t < 1 || t > corpus.horizon() {
        return Err(Error::DayOutOfRange {
            day: t,
            horizon: corpus.horizon(),
        });
    }
    let n = corpus.num_blogs();
    let mut last_day: Vec<std::collections::HashMap<u32, Day>> = vec![Default::default(); n];
    let mut counts: Vec<std::collections::HashMap<u32, u32>> = vec![Default::default(); n];
    for event in corpus.events() {
        if event.day > t {
            break;
        }
        let blog = event.blog.index();
        for &term in &event.terms {
            if last_day[blog].insert(term.0, event.day) != Some(event.day) {
                *counts[blog].entry(term.0).or_insert(0) += 1;
            }
        }
    }
    let counts = counts
        .into_iter()
        .map(|m| {
            let mut row: Vec<(u32, u32)> = m.into_iter().collect();
            row.sort_unstable();
            row
        })
        .collect();
    Ok(SemanticProfile {
        cutoff: t,
        num_terms: corpus.terms().len(),
        counts,
    })
}

impl SemanticProfile {
    pub fn cutoff(&self) -> Day {
        self.cutoff
    }

    pub fn num_blogs(&self) -> usize {
        self.counts.len()
    }

    pub fn count(&self, i: BlogId, w: TermId) -> u32 {
        let row = &self.counts[i.index()];
        row.binary_search_by_key(&w.0, |&(t, _)| t)
            .map(|pos| row[pos].1)
            .unwrap_or(0)
    }

    pub fn row(&self, i: BlogId) -> &[(u32, u32)] {
        &self.counts[i.index()]
    }

    /// Replace one blog's counts (test harness for scale-invariance checks).
    pub fn with_scaled_row(&self, i: BlogId, factor: u32) -> SemanticProfile {
        let mut scaled = self.clone();
        for entry in &mut scaled.counts[i.index()] {
            entry.1 *= factor;
        }
        scaled
    }
}

/// tf·idf-adjusted profiles. Entry `(i, w)` is
/// `counts(i,w) / sum_w counts(i,w) * ln(|B| / df(w))` where `df(w)` counts
/// the blogs whose aggregated profile contains `w`, and `|B|` is the total
/// number of registered blogs. Terms used by every blog contribute 0.
#[derive(Clone, Debug)]
pub struct AdjustedProfile {
    /// Dense rows over the term registry.
    values: Vec<Vec<f64>>,
    norms: Vec<f64>,
}

pub fn tfidf_adjust(profiles: &SemanticProfile) -> AdjustedProfile {
    adjusted_from_counts(profiles.num_blogs(), profiles.num_terms, &profiles.counts)
}

/// tf·idf adjustment over raw sparse count rows; shared with the synthetic
/// generator so both sides compute identical distances.
pub(crate) fn adjusted_from_counts(
    num_blogs: usize,
    num_terms: usize,
    counts: &[Vec<(u32, u32)>],
) -> AdjustedProfile {
    let mut df = vec![0u32; num_terms];
    for row in counts {
        for &(w, _) in row {
            df[w as usize] += 1;
        }
    }
    let mut values = Vec::with_capacity(num_blogs);
    let mut norms = Vec::with_capacity(num_blogs);
    for row in counts {
        let total: u64 = row.iter().map(|&(_, c)| u64::from(c)).sum();
        let mut dense = vec![0f64; num_terms];
        if total > 0 {
            for &(w, c) in row {
                let idf = ((num_blogs as f64) / f64::from(df[w as usize])).ln();
                dense[w as usize] = (f64::from(c) / total as f64) * idf;
            }
        }
        let norm = dense.iter().map(|v| v * v).sum::<f64>().sqrt();
        values.push(dense);
        norms.push(norm);
    }
    AdjustedProfile { values, norms }
}

impl AdjustedProfile {
    pub fn num_blogs(&self) -> usize {
        self.values.len()
    }

    pub fn value(&self, i: BlogId, w: TermId) -> f64 {
        self.values[i.index()][w.index()]
    }

    pub fn row(&self, i: BlogId) -> &[f64] {
        &self.values[i.index()]
    }

    pub fn norm(&self, i: BlogId) -> f64 {
        self.norms[i.index()]
    }

    /// True when the adjusted vector is all-zero (no usable terms), in which
    /// case every distance involving the blog is undefined.
    pub fn is_zero(&self, i: BlogId) -> bool {
        self.norms[i.index()] == 0.0
    }

    fn check(&self, i: BlogId) -> Result<()> {
        if i.index() < self.values.len() {
            Ok(())
        } else {
            Err(Error::UnknownBlog(format!("#{}", i.0)))
        }
    }

    /// Cosine dissimilarity `1 - cos(W(i), W(j))`, clamped into `[0, 1]`.
    /// `None` when either adjusted vector is all-zero.
    pub fn distance(&self, i: BlogId, j: BlogId) -> Result<Option<f64>> {
        self.check(i)?;
        self.check(j)?;
        Ok(self.distance_unchecked(i.index(), j.index()))
    }

    pub(crate) fn distance_unchecked(&self, i: usize, j: usize) -> Option<f64> {
        if self.norms[i] == 0.0 || self.norms[j] == 0.0 {
            return None;
        }
        if i == j {
            return Some(0.0);
        }
        let dot: f64 = self.values[i]
            .iter()
            .zip(&self.values[j])
            .map(|(a, b)| a * b)
            .sum();
        let delta = 1.0 - dot / (self.norms[i] * self.norms[j]);
        Some(delta.clamp(0.0, 1.0))
    }
}

/// Semantic distance between two blogs at cut-off `t` of the corpus.
pub fn semantic_distance(
    corpus: &TemporalCorpus,
    t: Day,
    i: BlogId,
    j: BlogId,
) -> Result<Option<f64>> {
    let adjusted = tfidf_adjust(&build_profiles(corpus, t)?);
    adjusted.distance(i, j)
}
