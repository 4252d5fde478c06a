//! URL diffusion subgraphs and transmission statistics.
//!
//! The diffusion subgraph of a URL gathers every blog that mentioned it,
//! plus the dated transmission links `(i, j, t)`: `i` cited `j` on day `t`
//! while mentioning the URL that same day, and `j` had mentioned the URL
//! strictly before `t`. A citation on the very day of `j`'s first mention is
//! not a transmission.
//!
//! A transmission edge is SECOND when the cited blog already had an outgoing
//! transmission for the same URL at an earlier-or-equal day (it extends a
//! chain), FIRST otherwise. An initiator is a blog whose first mention of
//! the URL cites no prior mentioner.

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;

use crate::corpus::TemporalCorpus;
use crate::error::{Error, Result};
use crate::graphmetrics::aggregate;
use crate::ids::{BlogId, Day, UrlId};
use crate::rational::{Distance, Rational};

/// A dated transmission link: `source` cited `target` on `day` while both
/// handling the same URL.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct TransmissionEdge {
    pub day: Day,
    pub source: BlogId,
    pub target: BlogId,
}

/// Chain position of a transmission edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TransmissionOrder {
    First,
    Second,
}

/// Diffusion subgraph of one URL.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiffusionSubgraph {
    pub url: UrlId,
    /// Blogs that mentioned the URL, sorted by id.
    pub nodes: Vec<BlogId>,
    /// First-mention day per node, aligned with `nodes`.
    pub first_mention: Vec<Day>,
    /// Transmission links sorted by (day, source, target).
    pub edges: Vec<TransmissionEdge>,
}

impl DiffusionSubgraph {
    pub fn is_trivial(&self) -> bool {
        self.edges.is_empty()
    }

    /// Earliest outgoing transmission day per node.
    fn min_outgoing(&self) -> HashMap<BlogId, Day> {
        let mut min_out: HashMap<BlogId, Day> = HashMap::new();
        for e in &self.edges {
            min_out
                .entry(e.source)
                .and_modify(|d| *d = (*d).min(e.day))
                .or_insert(e.day);
        }
        min_out
    }

    /// FIRST/SECOND order per edge, aligned with `edges`. An edge is SECOND
    /// exactly when its target has an outgoing transmission at a day `<=`
    /// the edge's own day (same-day ties resolve to SECOND).
    pub fn classify(&self) -> Vec<TransmissionOrder> {
        let min_out = self.min_outgoing();
        self.edges
            .iter()
            .map(|e| match min_out.get(&e.target) {
                Some(&d) if d <= e.day => TransmissionOrder::Second,
                _ => TransmissionOrder::First,
            })
            .collect()
    }

    /// Blogs whose first mention of the URL cites no prior mentioner, with
    /// their first-mention days. A subgraph may have several initiators.
    pub fn initiators(&self) -> Vec<(BlogId, Day)> {
        let min_out = self.min_outgoing();
        self.nodes
            .iter()
            .zip(&self.first_mention)
            .filter(|(node, fm)| match min_out.get(node) {
                Some(&d) => d > **fm,
                None => true,
            })
            .map(|(node, fm)| (*node, *fm))
            .collect()
    }
}

/// Per-day citation pairs and per-URL mention history shared by the
/// extraction routines.
struct MentionContext {
    /// Daily citation pairs, sorted; index day-1.
    daily_pairs: Vec<Vec<(BlogId, BlogId)>>,
    /// Per URL: (day, blog) mentions, day-sorted, deduplicated.
    mentions: Vec<Vec<(Day, BlogId)>>,
    /// Per URL: blog -> first mention day.
    first_mention: Vec<HashMap<BlogId, Day>>,
}

impl MentionContext {
    fn build(corpus: &TemporalCorpus) -> Result<Self> {
        let mut daily_pairs = Vec::with_capacity(corpus.horizon() as usize);
        for day in 1..=corpus.horizon() {
            daily_pairs.push(corpus.daily_citations(day)?);
        }
        let num_urls = corpus.urls().len();
        let mut mentions: Vec<Vec<(Day, BlogId)>> = vec![Vec::new(); num_urls];
        let mut first_mention: Vec<HashMap<BlogId, Day>> = vec![HashMap::new(); num_urls];
        for event in corpus.events() {
            for &url in &event.urls {
                mentions[url.index()].push((event.day, event.blog));
                first_mention[url.index()]
                    .entry(event.blog)
                    .or_insert(event.day);
            }
        }
        for m in &mut mentions {
            m.sort_unstable();
            m.dedup();
        }
        Ok(MentionContext {
            daily_pairs,
            mentions,
            first_mention,
        })
    }

    fn extract(&self, url: UrlId) -> DiffusionSubgraph {
        let fm = &self.first_mention[url.index()];
        let mut nodes: Vec<BlogId> = fm.keys().copied().collect();
        nodes.sort_unstable();
        let first_mention: Vec<Day> = nodes.iter().map(|b| fm[b]).collect();
        let mut edges = Vec::new();
        for &(day, blog) in &self.mentions[url.index()] {
            let pairs = &self.daily_pairs[(day - 1) as usize];
            let start = pairs.partition_point(|&(i, _)| i < blog);
            for &(i, j) in &pairs[start..] {
                if i != blog {
                    break;
                }
                if fm.get(&j).is_some_and(|&d| d < day) {
                    edges.push(TransmissionEdge {
                        day,
                        source: i,
                        target: j,
                    });
                }
            }
        }
        edges.sort_unstable();
        DiffusionSubgraph {
            url,
            nodes,
            first_mention,
            edges,
        }
    }
}

/// Extract the diffusion subgraph of a single URL.
pub fn extract_subgraph(corpus: &TemporalCorpus, url: UrlId) -> Result<DiffusionSubgraph> {
    if url.index() >= corpus.urls().len() {
        return Err(Error::UnknownUrl(format!("#{}", url.0)));
    }
    Ok(MentionContext::build(corpus)?.extract(url))
}

/// Counts over a full subgraph extraction.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct DiffusionCounts {
    pub total_urls: u64,
    pub trivial: u64,
    pub non_trivial: u64,
    pub transmission_links: u64,
}

/// All subgraphs plus summary counts, in URL-registry order.
#[derive(Clone, Debug)]
pub struct DiffusionAnalysis {
    pub subgraphs: Vec<DiffusionSubgraph>,
    pub counts: DiffusionCounts,
}

impl DiffusionAnalysis {
    pub fn non_trivial(&self) -> impl Iterator<Item = &DiffusionSubgraph> {
        self.subgraphs.iter().filter(|s| !s.is_trivial())
    }
}

/// Extract every URL's diffusion subgraph.
pub fn all_subgraphs(corpus: &TemporalCorpus) -> Result<DiffusionAnalysis> {
    let ctx = MentionContext::build(corpus)?;
    let subgraphs: Vec<DiffusionSubgraph> = (0..corpus.urls().len())
        .into_par_iter()
        .map(|u| ctx.extract(UrlId(u as u32)))
        .collect();
    let mut counts = DiffusionCounts {
        total_urls: subgraphs.len() as u64,
        ..Default::default()
    };
    for s in &subgraphs {
        if s.is_trivial() {
            counts.trivial += 1;
        } else {
            counts.non_trivial += 1;
            counts.transmission_links += s.edges.len() as u64;
        }
    }
    Ok(DiffusionAnalysis { subgraphs, counts })
}

/// Histograms over node and edge counts of the non-trivial subgraphs.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SizeDistribution {
    pub nodes: BTreeMap<usize, u64>,
    pub edges: BTreeMap<usize, u64>,
}

pub fn size_distribution(analysis: &DiffusionAnalysis) -> SizeDistribution {
    let mut dist = SizeDistribution::default();
    for s in analysis.non_trivial() {
        *dist.nodes.entry(s.nodes.len()).or_insert(0) += 1;
        *dist.edges.entry(s.edges.len()).or_insert(0) += 1;
    }
    dist
}

/// One row of the attention table: initiators whose total attention falls
/// into this quantile group.
#[derive(Clone, Debug)]
pub struct AttentionRow {
    pub group: u32,
    pub alpha_lo: Option<Rational>,
    pub alpha_hi: Option<Rational>,
    pub records: u64,
    /// Mean FIRST-transmission count per initiator, zero-count initiators
    /// included.
    pub mean_first: Option<f64>,
    /// Same mean over initiators with at least one FIRST transmission.
    pub mean_first_nonzero: Option<f64>,
}

/// Group initiators of non-trivial subgraphs by the total attention they
/// held on their first-mention day, and report the mean number of FIRST
/// transmission links pointing at them.
pub fn first_transmissions_vs_attention(
    corpus: &TemporalCorpus,
    analysis: &DiffusionAnalysis,
    quantiles: u32,
) -> Result<Vec<AttentionRow>> {
    if quantiles < 2 {
        return Err(Error::InvalidParameter("quantiles must be >= 2".into()));
    }
    // (alpha, first-transmission count) per (url, initiator) record.
    let mut graph_cache: HashMap<Day, crate::graphmetrics::AggregatedGraph> = HashMap::new();
    let mut records: Vec<(Rational, u64)> = Vec::new();
    for s in analysis.non_trivial() {
        let orders = s.classify();
        let mut first_counts: HashMap<BlogId, u64> = HashMap::new();
        for (e, order) in s.edges.iter().zip(&orders) {
            if *order == TransmissionOrder::First {
                *first_counts.entry(e.target).or_insert(0) += 1;
            }
        }
        for (initiator, fm_day) in s.initiators() {
            let graph = match graph_cache.entry(fm_day) {
                std::collections::hash_map::Entry::Occupied(g) => g.into_mut(),
                std::collections::hash_map::Entry::Vacant(v) => {
                    v.insert(aggregate(corpus, fm_day)?)
                }
            };
            let alpha = graph.total_attention(initiator)?;
            let count = first_counts.get(&initiator).copied().unwrap_or(0);
            records.push((alpha, count));
        }
    }
    records.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.cmp(&b.1)));
    let groups = quantile_groups(records.len(), quantiles, |idx| &records[idx].0);
    let rows = (0..quantiles)
        .map(|q| {
            let members: Vec<&(Rational, u64)> = groups
                .iter()
                .enumerate()
                .filter(|(_, g)| **g == q)
                .map(|(idx, _)| &records[idx])
                .collect();
            let counts: Vec<u64> = members.iter().map(|(_, c)| *c).collect();
            let nonzero: Vec<u64> = counts.iter().copied().filter(|&c| c > 0).collect();
            AttentionRow {
                group: q,
                alpha_lo: members.first().map(|(a, _)| a.clone()),
                alpha_hi: members.last().map(|(a, _)| a.clone()),
                records: members.len() as u64,
                mean_first: mean_u64(&counts),
                mean_first_nonzero: mean_u64(&nonzero),
            }
        })
        .collect();
    Ok(rows)
}

/// Quintile group of an edge-range value; bridges (infinite range) are
/// reported in their own group.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RangeGroup {
    Quantile(u32),
    Infinite,
}

/// One row of the edge-range table.
#[derive(Clone, Debug)]
pub struct EdgeRangeRow {
    pub group: RangeGroup,
    pub r_lo: Option<Rational>,
    pub r_hi: Option<Rational>,
    pub records: u64,
    /// Mean number of SECOND transmissions extending the FIRST transmissions
    /// of this group.
    pub mean_second: Option<f64>,
}

/// For every FIRST transmission edge `(j, i, t)`, measure the edge range
/// `r(j, i)` on the graph aggregated at day `t` and count the SECOND
/// transmissions `(k, j, t'')` with `t'' >= t` in the same subgraph; group
/// the records into edge-range quantiles.
pub fn second_transmissions_vs_edge_range(
    corpus: &TemporalCorpus,
    analysis: &DiffusionAnalysis,
    quintiles: u32,
) -> Result<Vec<EdgeRangeRow>> {
    if quintiles < 2 {
        return Err(Error::InvalidParameter("quintiles must be >= 2".into()));
    }
    // Collect (day, source, target, second_count) per FIRST edge.
    struct FirstRecord {
        day: Day,
        source: BlogId,
        target: BlogId,
        second_count: u64,
    }
    let mut per_day: BTreeMap<Day, Vec<FirstRecord>> = BTreeMap::new();
    for s in analysis.non_trivial() {
        let orders = s.classify();
        for (e, order) in s.edges.iter().zip(&orders) {
            if *order != TransmissionOrder::First {
                continue;
            }
            let second_count = s
                .edges
                .iter()
                .zip(&orders)
                .filter(|(e2, o2)| {
                    **o2 == TransmissionOrder::Second && e2.target == e.source && e2.day >= e.day
                })
                .count() as u64;
            per_day.entry(e.day).or_default().push(FirstRecord {
                day: e.day,
                source: e.source,
                target: e.target,
                second_count,
            });
        }
    }
    // Edge range per record, one graph and engine per distinct day.
    let mut measured: Vec<(Distance<Rational>, u64)> = Vec::new();
    for (day, recs) in &per_day {
        let graph = aggregate(corpus, *day)?;
        let engine = graph.detachment_engine();
        let ranges: Vec<Result<Distance<Rational>>> = recs
            .par_iter()
            .map(|r| {
                debug_assert_eq!(r.day, *day);
                engine.edge_range(r.source, r.target)
            })
            .collect();
        for (r, rec) in ranges.into_iter().zip(recs) {
            measured.push((r?, rec.second_count));
        }
    }
    let mut finite: Vec<(Rational, u64)> = Vec::new();
    let mut infinite_counts: Vec<u64> = Vec::new();
    for (d, c) in measured {
        match d {
            Distance::Finite(r) => finite.push((r, c)),
            Distance::Infinite => infinite_counts.push(c),
        }
    }
    finite.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.cmp(&b.1)));
    let groups = quantile_groups(finite.len(), quintiles, |idx| &finite[idx].0);
    let mut rows: Vec<EdgeRangeRow> = (0..quintiles)
        .map(|q| {
            let members: Vec<&(Rational, u64)> = groups
                .iter()
                .enumerate()
                .filter(|(_, g)| **g == q)
                .map(|(idx, _)| &finite[idx])
                .collect();
            let counts: Vec<u64> = members.iter().map(|(_, c)| *c).collect();
            EdgeRangeRow {
                group: RangeGroup::Quantile(q),
                r_lo: members.first().map(|(r, _)| r.clone()),
                r_hi: members.last().map(|(r, _)| r.clone()),
                records: members.len() as u64,
                mean_second: mean_u64(&counts),
            }
        })
        .collect();
    rows.push(EdgeRangeRow {
        group: RangeGroup::Infinite,
        r_lo: None,
        r_hi: None,
        records: infinite_counts.len() as u64,
        mean_second: mean_u64(&infinite_counts),
    });
    Ok(rows)
}

/// Nearest-rank quantile assignment over `len` sorted records. Returns one
/// group index per record; records sharing a boundary value share the lower
/// group.
fn quantile_groups<'a, T: Ord + 'a>(
    len: usize,
    quantiles: u32,
    value: impl Fn(usize) -> &'a T,
) -> Vec<u32> {
    let mut groups = vec![0u32; len];
    if len == 0 {
        return groups;
    }
    // Boundary value of group q: the nearest-rank (q+1)/Q quantile.
    let boundary_idx = |q: u32| -> usize {
        let rank = ((q as u64 + 1) * len as u64).div_ceil(quantiles as u64);
        (rank as usize).clamp(1, len) - 1
    };
    let mut q = 0u32;
    for idx in 0..len {
        while q + 1 < quantiles && value(idx) > value(boundary_idx(q)) {
            q += 1;
        }
        groups[idx] = q;
    }
    groups
}

fn mean_u64(values: &[u64]) -> Option<f64> {
    (!values.is_empty()).then(|| values.iter().sum::<u64>() as f64 / values.len() as f64)
}
