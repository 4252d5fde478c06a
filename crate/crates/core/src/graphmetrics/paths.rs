//! Shortest-path engines behind the distance operations.
//!
//! Weighted distances are exact: detachment values are carried as integer
//! numerators over one common denominator (the lcm of all edge weights times
//! nothing — each edge cost is `out_strength(i) * D / w(i,j)`, an integer).
//! Costs run on `u128` when the worst-case path sum fits, otherwise on
//! `BigUint`.

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::collections::VecDeque;

use num::bigint::{BigInt, BigUint};
use num::rational::Ratio;
use num::{Integer, One, ToPrimitive};

use crate::rational::Rational;

/// Hop distances from `src` (self = 0). `None` means unreachable.
/// `target` allows early exit once a specific node is settled.
pub(crate) fn bfs_hops(
    adj: &[Vec<u32>],
    src: usize,
    target: Option<usize>,
) -> Vec<Option<u32>> {
    let mut dist: Vec<Option<u32>> = vec![None; adj.len()];
    let mut queue = VecDeque::new();
    dist[src] = Some(0);
    queue.push_back(src);
    while let Some(u) = queue.pop_front() {
        if target == Some(u) {
            break;
        }
        let next = dist[u].expect("queued nodes have distances") + 1;
        for &v in &adj[u] {
            if dist[v as usize].is_none() {
                dist[v as usize] = Some(next);
                queue.push_back(v as usize);
            }
        }
    }
    dist
}

pub(crate) trait CostInt: Clone + Ord {
    fn zero() -> Self;
    fn checked_sum(&self, other: &Self) -> Self;
}

impl CostInt for u128 {
    fn zero() -> Self {
        0
    }
    fn checked_sum(&self, other: &Self) -> Self {
        // The engine builder guarantees (n-1) * max_edge_cost fits.
        self + other
    }
}

impl CostInt for BigUint {
    fn zero() -> Self {
        BigUint::ZERO
    }
    fn checked_sum(&self, other: &Self) -> Self {
        self + other
    }
}

fn dijkstra<T: CostInt>(
    adj: &[Vec<(u32, T)>],
    src: usize,
    target: Option<usize>,
    skip: Option<(usize, usize)>,
) -> Vec<Option<T>> {
    let mut dist: Vec<Option<T>> = vec![None; adj.len()];
    let mut settled = vec![false; adj.len()];
    let mut heap: BinaryHeap<Reverse<(T, u32)>> = BinaryHeap::new();
    dist[src] = Some(T::zero());
    heap.push(Reverse((T::zero(), src as u32)));
    while let Some(Reverse((cost, u))) = heap.pop() {
        let u = u as usize;
        if settled[u] {
            continue;
        }
        settled[u] = true;
        if target == Some(u) {
            break;
        }
        for (v, w) in &adj[u] {
            let v = *v as usize;
            if settled[v] || skip == Some((u, v)) {
                continue;
            }
            let cand = cost.checked_sum(w);
            let better = match &dist[v] {
                None => true,
                Some(d) => cand < *d,
            };
            if better {
                dist[v] = Some(cand.clone());
                heap.push(Reverse((cand, v as u32)));
            }
        }
    }
    // Nodes still unsettled past an early exit may carry tentative values.
    if target.is_some() {
        for (i, d) in dist.iter_mut().enumerate() {
            if !settled[i] && i != src {
                *d = None;
            }
        }
    }
    dist
}

/// Detachment-weighted adjacency with exact integer costs over a shared
/// denominator.
pub(crate) enum ScaledAdjacency {
    Small {
        denom: BigUint,
        adj: Vec<Vec<(u32, u128)>>,
    },
    Big {
        denom: BigUint,
        adj: Vec<Vec<(u32, BigUint)>>,
    },
}

impl ScaledAdjacency {
    /// Build from out-adjacency `(target, weight)` rows and per-node
    /// out-strengths. Detachment of edge (i,j) is `strength(i) / w(i,j)`.
    pub(crate) fn build(out: &[Vec<(u32, u64)>], out_strength: &[u64]) -> Self {
        let n = out.len();
        let mut denom = BigUint::one();
        for row in out {
            for &(_, w) in row {
                denom = denom.lcm(&BigUint::from(w));
            }
        }
        // Try the u128 fast path: every edge cost and the worst-case simple
        // path sum must fit.
        let mut small: Vec<Vec<(u32, u128)>> = Vec::with_capacity(n);
        let mut max_cost: u128 = 0;
        let mut fits = true;
        'outer: for (i, row) in out.iter().enumerate() {
            let mut srow = Vec::with_capacity(row.len());
            for &(j, w) in row {
                let per_unit = &denom / BigUint::from(w);
                let cost = per_unit * BigUint::from(out_strength[i]);
                match cost.to_u128() {
                    Some(c) => {
                        max_cost = max_cost.max(c);
                        srow.push((j, c));
                    }
                    None => {
                        fits = false;
                        break 'outer;
                    }
                }
            }
            small.push(srow);
        }
        if fits && (n as u128 <= 1 || max_cost <= u128::MAX / (n as u128 - 1)) {
            return ScaledAdjacency::Small { denom, adj: small };
        }
        let mut big: Vec<Vec<(u32, BigUint)>> = Vec::with_capacity(n);
        for (i, row) in out.iter().enumerate() {
            let mut brow = Vec::with_capacity(row.len());
            for &(j, w) in row {
                let cost = &denom / BigUint::from(w) * BigUint::from(out_strength[i]);
                brow.push((j, cost));
            }
            big.push(brow);
        }
        ScaledAdjacency::Big { denom, adj: big }
    }

    /// Exact detachment distances from `src` to every node.
    pub(crate) fn distances_from(
        &self,
        src: usize,
        target: Option<usize>,
        skip: Option<(usize, usize)>,
    ) -> Vec<Option<Rational>> {
        match self {
            ScaledAdjacency::Small { denom, adj } => dijkstra(adj, src, target, skip)
                .into_iter()
                .map(|d| d.map(|c| scaled_to_rational(BigUint::from(c), denom)))
                .collect(),
            ScaledAdjacency::Big { denom, adj } => dijkstra(adj, src, target, skip)
                .into_iter()
                .map(|d| d.map(|c| scaled_to_rational(c, denom)))
                .collect(),
        }
    }
}

fn scaled_to_rational(cost: BigUint, denom: &BigUint) -> Rational {
    Ratio::new(BigInt::from(cost), BigInt::from(denom.clone()))
}
