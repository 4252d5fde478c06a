//! Aggregated citation graphs and the structural quantities measured on
//! them: attention, detachment, social distance, detachment-based distance,
//! edge range, and total attention.
//!
//! Attention `a(i,j)` is the fraction of `i`'s outgoing citation weight
//! directed at `j`; detachment is its reciprocal, read as the cost for
//! information to travel the edge against the flow of attention. All of
//! these are exact rationals.

use std::collections::HashMap;

use num::bigint::BigInt;
use num::rational::Ratio;
use num::Zero;

use crate::corpus::TemporalCorpus;
use crate::error::{Error, Result};
use crate::ids::{BlogId, Day};
use crate::rational::{CostDistance, Distance, HopDistance, Rational};

mod paths;

use paths::ScaledAdjacency;

/// The weighted directed citation graph aggregated up to a cut-off day:
/// `weight(i,j)` counts the days `t' <= cutoff` on which `i` cited `j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AggregatedGraph {
    cutoff: Day,
    /// Out-adjacency, rows sorted by target id.
    out: Vec<Vec<(u32, u64)>>,
    /// In-adjacency, rows sorted by source id.
    incoming: Vec<Vec<(u32, u64)>>,
    out_strength: Vec<u64>,
}

/// Build the aggregated graph at cut-off `t` from the daily views.
pub fn aggregate(corpus: &TemporalCorpus, t: Day) -> Result<AggregatedGraph> {
    if t < 1 || t > corpus.horizon() {
        return Err(Error::DayOutOfRange {
            day: t,
            horizon: corpus.horizon(),
        });
    }
    let n = corpus.num_blogs();
    // Count distinct citation days per ordered pair. Events arrive
    // day-sorted, so one last-seen-day mark per pair suffices.
    let mut weights: HashMap<(u32, u32), u64> = HashMap::new();
    let mut last_day: HashMap<(u32, u32), Day> = HashMap::new();
    for event in corpus.events() {
        if event.day > t {
            break;
        }
        for &cited in &event.cites {
            let key = (event.blog.0, cited.0);
            if last_day.insert(key, event.day) != Some(event.day) {
                *weights.entry(key).or_insert(0) += 1;
            }
        }
    }
    AggregatedGraph::from_weight_map(t, n, weights)
}

impl AggregatedGraph {
    fn from_weight_map(
        cutoff: Day,
        n: usize,
        weights: HashMap<(u32, u32), u64>,
    ) -> Result<Self> {
        let mut out: Vec<Vec<(u32, u64)>> = vec![Vec::new(); n];
        let mut incoming: Vec<Vec<(u32, u64)>> = vec![Vec::new(); n];
        let mut out_strength = vec![0u64; n];
        for ((i, j), w) in weights {
            if i == j {
                return Err(Error::InvalidParameter(format!(
                    "diagonal entry ({i}, {j}) in aggregated graph"
                )));
            }
            if w == 0 {
                return Err(Error::InvalidParameter(format!(
                    "zero weight on edge ({i}, {j})"
                )));
            }
            if i as usize >= n || j as usize >= n {
                return Err(Error::InvalidParameter(format!(
                    "edge ({i}, {j}) outside node range 0..{n}"
                )));
            }
            out[i as usize].push((j, w));
            incoming[j as usize].push((i, w));
            out_strength[i as usize] += w;
        }
        for row in &mut out {
            row.sort_unstable();
        }
        for row in &mut incoming {
            row.sort_unstable();
        }
        Ok(AggregatedGraph {
            cutoff,
            out,
            incoming,
            out_strength,
        })
    }

    /// Build directly from a weighted edge list (fixtures, external graphs).
    pub fn from_weighted_edges(
        cutoff: Day,
        n: usize,
        edges: &[(u32, u32, u64)],
    ) -> Result<Self> {
        let mut weights: HashMap<(u32, u32), u64> = HashMap::with_capacity(edges.len());
        for &(i, j, w) in edges {
            if weights.insert((i, j), w).is_some() {
                return Err(Error::InvalidParameter(format!(
                    "duplicate edge ({i}, {j})"
                )));
            }
        }
        Self::from_weight_map(cutoff, n, weights)
    }

    pub fn cutoff(&self) -> Day {
        self.cutoff
    }

    pub fn num_nodes(&self) -> usize {
        self.out.len()
    }

    pub fn num_edges(&self) -> usize {
        self.out.iter().map(Vec::len).sum()
    }

    /// `weight(i, j)`; absent pairs read as 0.
    pub fn weight(&self, i: BlogId, j: BlogId) -> u64 {
        self.out[i.index()]
            .binary_search_by_key(&j.0, |&(t, _)| t)
            .map(|pos| self.out[i.index()][pos].1)
            .unwrap_or(0)
    }

    pub fn out_strength(&self, i: BlogId) -> u64 {
        self.out_strength[i.index()]
    }

    pub fn out_edges(&self, i: BlogId) -> &[(u32, u64)] {
        &self.out[i.index()]
    }

    pub fn in_edges(&self, j: BlogId) -> &[(u32, u64)] {
        &self.incoming[j.index()]
    }

    /// All edges `(i, j, weight)` in source-major order.
    pub fn edges(&self) -> impl Iterator<Item = (BlogId, BlogId, u64)> + '_ {
        self.out.iter().enumerate().flat_map(|(i, row)| {
            row.iter()
                .map(move |&(j, w)| (BlogId(i as u32), BlogId(j), w))
        })
    }

    fn check_node(&self, i: BlogId) -> Result<()> {
        if i.index() < self.num_nodes() {
            Ok(())
        } else {
            Err(Error::UnknownBlog(format!("#{}", i.0)))
        }
    }

    /// Row-normalized attention view of this graph.
    pub fn attention(&self) -> AttentionView {
        let rows = self
            .out
            .iter()
            .enumerate()
            .map(|(i, row)| {
                let strength = self.out_strength[i];
                row.iter()
                    .map(|&(j, w)| {
                        (j, Ratio::new(BigInt::from(w), BigInt::from(strength)))
                    })
                    .collect()
            })
            .collect();
        AttentionView { rows }
    }

    /// Reciprocal-attention view, defined exactly on the attention support.
    pub fn detachment(&self) -> DetachmentGraph {
        let rows = self
            .out
            .iter()
            .enumerate()
            .map(|(i, row)| {
                let strength = self.out_strength[i];
                row.iter()
                    .map(|&(j, w)| {
                        (j, Ratio::new(BigInt::from(strength), BigInt::from(w)))
                    })
                    .collect()
            })
            .collect();
        DetachmentGraph { rows }
    }

    fn unweighted_adjacency(&self) -> Vec<Vec<u32>> {
        self.out
            .iter()
            .map(|row| row.iter().map(|&(j, _)| j).collect())
            .collect()
    }

    /// Unweighted out-adjacency rows for batch traversals.
    pub(crate) fn unweighted_adjacency_rows(&self) -> Vec<Vec<u32>> {
        self.unweighted_adjacency()
    }

    /// Directed hop count from `i` to `j`, ignoring weights.
    pub fn social_distance(&self, i: BlogId, j: BlogId) -> Result<HopDistance> {
        self.check_node(i)?;
        self.check_node(j)?;
        let adj = self.unweighted_adjacency();
        let d = paths::bfs_hops(&adj, i.index(), Some(j.index()));
        Ok(match d[j.index()] {
            Some(h) => Distance::Finite(h),
            None => Distance::Infinite,
        })
    }

    /// Hop counts from `i` to every node.
    pub fn social_distances_from(&self, i: BlogId) -> Result<Vec<HopDistance>> {
        self.check_node(i)?;
        let adj = self.unweighted_adjacency();
        Ok(paths::bfs_hops(&adj, i.index(), None)
            .into_iter()
            .map(|d| match d {
                Some(h) => Distance::Finite(h),
                None => Distance::Infinite,
            })
            .collect())
    }

    /// Prebuilt engine for repeated detachment-distance queries.
    pub fn detachment_engine(&self) -> DetachmentEngine<'_> {
        DetachmentEngine {
            graph: self,
            scaled: ScaledAdjacency::build(&self.out, &self.out_strength),
        }
    }

    /// Minimal total detachment over directed paths from `i` to `j`.
    pub fn detachment_distance(&self, i: BlogId, j: BlogId) -> Result<CostDistance> {
        self.detachment_engine().distance(i, j)
    }

    /// Detachment distances from `i` to every node.
    pub fn detachment_distances_from(&self, i: BlogId) -> Result<Vec<CostDistance>> {
        self.detachment_engine().distances_from(i)
    }

    /// Detachment distance from `i` to `j` with edge `(i, j)` removed and
    /// every other detachment value left unchanged.
    pub fn edge_range(&self, i: BlogId, j: BlogId) -> Result<CostDistance> {
        self.detachment_engine().edge_range(i, j)
    }

    /// Total attention received by `j`: the exact sum of incoming attention
    /// values.
    pub fn total_attention(&self, j: BlogId) -> Result<Rational> {
        self.check_node(j)?;
        let mut total = Rational::zero();
        for &(src, w) in &self.incoming[j.index()] {
            total += Ratio::new(
                BigInt::from(w),
                BigInt::from(self.out_strength[src as usize]),
            );
        }
        Ok(total)
    }
}

/// Attention values `a(i,j) = weight(i,j) / out_strength(i)` as exact
/// rationals; rows of nodes with outgoing edges sum to 1.
#[derive(Clone, Debug)]
pub struct AttentionView {
    rows: Vec<Vec<(u32, Rational)>>,
}

impl AttentionView {
    pub fn value(&self, i: BlogId, j: BlogId) -> Option<&Rational> {
        let row = &self.rows[i.index()];
        row.binary_search_by_key(&j.0, |(t, _)| *t)
            .ok()
            .map(|pos| &row[pos].1)
    }

    pub fn row(&self, i: BlogId) -> &[(u32, Rational)] {
        &self.rows[i.index()]
    }

    pub fn num_nodes(&self) -> usize {
        self.rows.len()
    }
}

/// Detachment values `1 / a(i,j)`, defined on the attention support; absent
/// edges are conceptually infinite.
#[derive(Clone, Debug)]
pub struct DetachmentGraph {
    rows: Vec<Vec<(u32, Rational)>>,
}

impl DetachmentGraph {
    pub fn value(&self, i: BlogId, j: BlogId) -> Option<&Rational> {
        let row = &self.rows[i.index()];
        row.binary_search_by_key(&j.0, |(t, _)| *t)
            .ok()
            .map(|pos| &row[pos].1)
    }

    pub fn row(&self, i: BlogId) -> &[(u32, Rational)] {
        &self.rows[i.index()]
    }
}

/// Reusable exact-arithmetic Dijkstra over the detachment weights of one
/// aggregated graph.
pub struct DetachmentEngine<'g> {
    graph: &'g AggregatedGraph,
    scaled: ScaledAdjacency,
}

impl DetachmentEngine<'_> {
    pub fn distance(&self, i: BlogId, j: BlogId) -> Result<CostDistance> {
        self.graph.check_node(i)?;
        self.graph.check_node(j)?;
        let d = self
            .scaled
            .distances_from(i.index(), Some(j.index()), None);
        Ok(option_to_distance(d.into_iter().nth(j.index()).flatten()))
    }

    pub fn distances_from(&self, i: BlogId) -> Result<Vec<CostDistance>> {
        self.graph.check_node(i)?;
        Ok(self
            .scaled
            .distances_from(i.index(), None, None)
            .into_iter()
            .map(option_to_distance)
            .collect())
    }

    pub fn edge_range(&self, i: BlogId, j: BlogId) -> Result<CostDistance> {
        self.graph.check_node(i)?;
        self.graph.check_node(j)?;
        if self.graph.weight(i, j) == 0 {
            return Err(Error::NoSuchEdge(
                format!("#{}", i.0),
                format!("#{}", j.0),
            ));
        }
        let d = self.scaled.distances_from(
            i.index(),
            Some(j.index()),
            Some((i.index(), j.index())),
        );
        Ok(option_to_distance(d.into_iter().nth(j.index()).flatten()))
    }
}

fn option_to_distance(v: Option<Rational>) -> CostDistance {
    match v {
        Some(r) => Distance::Finite(r),
        None => Distance::Infinite,
    }
}

/// Raw BFS hop row over prebuilt adjacency (batch callers).
pub(crate) fn bfs_row(adj: &[Vec<u32>], src: usize) -> Vec<Option<u32>> {
    paths::bfs_hops(adj, src, None)
}
