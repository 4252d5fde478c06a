//! Synthetic event-corpus generation with controllable link dynamics.
//!
//! Each day, each blog posts at the configured rate; posts carry terms
//! sampled from the blog's fixed latent topic profile, and cite one target
//! drawn with probability proportional to
//! `exp(-beta_social * d) * exp(-beta_semantic * delta)` over the current
//! aggregated state (uniform when both decay coefficients are zero).
//! Distances are refreshed on the same weekly clock the estimators use
//! (state at days 60, 67, ...), so generator and estimator agree on what
//! "distance at the window start" means. Before the first refresh point,
//! citation targets are uniform.
//!
//! URLs appear in two ways: a post can mint a fresh URL, and a post citing
//! `j` relays each URL `j` mentioned recently with probability `relay_prob`,
//! which produces genuine transmission links.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::{Manifest, PostRecord};
use crate::error::{Error, Result};
use crate::graphmetrics::AggregatedGraph;
use crate::ids::Day;
use crate::semantics::adjusted_from_counts;

/// Generator parameters. The seed fully determines the output stream.
#[derive(Clone, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct GeneratorConfig {
    pub n_blogs: u32,
    pub days: u32,
    /// Dimension of the latent topic space (number of distinct terms).
    pub latent_dim: u32,
    /// Expected posts per blog per day.
    pub posts_per_day: f64,
    /// Decay of citation probability with social distance.
    pub beta_social: f64,
    /// Decay of citation probability with semantic distance.
    pub beta_semantic: f64,
    /// Probability that a citing blog relays a recently mentioned URL.
    pub relay_prob: f64,
    pub seed: u64,
}

impl GeneratorConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_blogs == 0 || self.days == 0 || self.latent_dim == 0 {
            return Err(Error::InvalidParameter(
                "n_blogs, days and latent_dim must be positive".into(),
            ));
        }
        if self.posts_per_day <= 0.0 || !self.posts_per_day.is_finite() {
            return Err(Error::InvalidParameter(
                "posts_per_day must be a positive rate".into(),
            ));
        }
        if self.beta_social < 0.0 || self.beta_semantic < 0.0 {
            return Err(Error::InvalidParameter(
                "decay coefficients must be nonnegative".into(),
            ));
        }
        if !(0.0..=1.0).contains(&self.relay_prob) {
            return Err(Error::InvalidParameter(
                "relay_prob must lie in [0, 1]".into(),
            ));
        }
        Ok(())
    }

    /// Parse the flat `key = value` config format.
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::MalformedConfig(e.to_string()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serialization")
    }
}

/// First day on which refreshed distances drive citation sampling; matches
/// the estimators' default initialization cut-off.
const REFRESH_START: Day = 61;
/// Days between distance refreshes, matching the default window length.
const REFRESH_EVERY: u32 = 7;
/// Terms sampled per post.
const TERMS_PER_POST: usize = 3;
/// Probability that a post mints a fresh URL.
const URL_NEW_PROB: f64 = 0.15;
/// A relayed URL must have been mentioned by the cited blog within this
/// many days.
const RELAY_RECENCY: u32 = 14;
/// At most this many relayed URLs per post. Relayed mentions re-enter the
/// relaying blog's own pool, so an uncapped chain compounds on highly cited
/// blogs and posts degenerate into URL dumps.
const MAX_RELAYS_PER_POST: usize = 3;

/// Generated event stream plus its manifest.
#[derive(Clone, Debug)]
pub struct GeneratedCorpus {
    pub records: Vec<PostRecord>,
    pub manifest: Manifest,
}

impl GeneratedCorpus {
    /// Line-delimited event stream in the corpus input format.
    pub fn event_lines(&self) -> String {
        let mut out = String::new();
        for r in &self.records {
            out.push_str(&serde_json::to_string(r).expect("record serialization"));
            out.push('\n');
        }
        out
    }
}

struct BlogState {
    /// Cumulative latent term weights for categorical sampling.
    latent_cdf: Vec<f64>,
    /// Recent URL mentions (day, url id), oldest first.
    recent_urls: Vec<(Day, usize)>,
}

/// Evolving aggregated state mirrored incrementally during generation.
struct EvolvingState {
    n: usize,
    latent_dim: usize,
    /// (i, j) -> (weight, last counted day).
    weights: std::collections::HashMap<(u32, u32), (u64, Day)>,
    /// Per blog: term id -> (count, last counted day).
    term_counts: Vec<std::collections::HashMap<u32, (u32, Day)>>,
}

impl EvolvingState {
    fn record_citation(&mut self, i: u32, j: u32, day: Day) {
        let entry = self.weights.entry((i, j)).or_insert((0, 0));
        if entry.1 != day {
            entry.0 += 1;
            entry.1 = day;
        }
    }

    fn record_term(&mut self, blog: usize, term: u32, day: Day) {
        let entry = self.term_counts[blog].entry(term).or_insert((0, 0));
        if entry.1 != day {
            entry.0 += 1;
            entry.1 = day;
        }
    }

    /// Aggregated graph over everything recorded so far.
    fn graph(&self, cutoff: Day) -> AggregatedGraph {
        let edges: Vec<(u32, u32, u64)> = self
            .weights
            .iter()
            .map(|(&(i, j), &(w, _))| (i, j, w))
            .collect();
        AggregatedGraph::from_weighted_edges(cutoff, self.n, &edges)
            .expect("internal state is a valid graph")
    }

    /// Semantic distance matrix from the recorded term counts (row-major,
    /// NaN where undefined).
    fn delta_matrix(&self) -> Vec<f64> {
        let counts: Vec<Vec<(u32, u32)>> = self
            .term_counts
            .iter()
            .map(|m| {
                let mut row: Vec<(u32, u32)> = m.iter().map(|(&t, &(c, _))| (t, c)).collect();
                row.sort_unstable();
                row
            })
            .collect();
        let adjusted = adjusted_from_counts(self.n, self.latent_dim, &counts);
        let mut matrix = vec![f64::NAN; self.n * self.n];
        for i in 0..self.n {
            for j in 0..self.n {
                if let Some(d) = adjusted.distance_unchecked(i, j) {
                    matrix[i * self.n + j] = d;
                }
            }
        }
        matrix
    }
}

/// Frozen distance snapshot used for citation sampling until the next
/// refresh.
struct DistanceClock {
    /// Hop distances, u16::MAX = unreachable.
    hops: Vec<u16>,
    /// Semantic distances, NaN = undefined.
    delta: Vec<f64>,
    n: usize,
}

impl DistanceClock {
    fn refresh(state: &EvolvingState, cutoff: Day) -> Self {
        let n = state.n;
        let graph = state.graph(cutoff);
        let adjacency = graph.unweighted_adjacency_rows();
        let mut hops = vec![u16::MAX; n * n];
        for i in 0..n {
            for (j, d) in crate::graphmetrics::bfs_row(&adjacency, i)
                .into_iter()
                .enumerate()
            {
                if let Some(h) = d {
                    hops[i * n + j] = h.min(u16::MAX as u32 - 1) as u16;
                }
            }
        }
        DistanceClock {
            hops,
            delta: state.delta_matrix(),
            n,
        }
    }
}

/// Generate a corpus. Same config, same bytes.
pub fn generate(config: &GeneratorConfig) -> Result<GeneratedCorpus> {
    config.validate()?;
    let n = config.n_blogs as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    let mut blogs: Vec<BlogState> = (0..n)
        .map(|_| {
            // Sharpened uniform weights give diverse pairwise profile
            // overlaps without a heavy-tailed sampler.
            let mut weights: Vec<f64> = (0..config.latent_dim)
                .map(|_| rng.gen::<f64>().powi(4) + 1e-9)
                .collect();
            let total: f64 = weights.iter().sum();
            let mut acc = 0.0;
            for w in &mut weights {
                acc += *w / total;
                *w = acc;
            }
            BlogState {
                latent_cdf: weights,
                recent_urls: Vec::new(),
            }
        })
        .collect();

    let mut state = EvolvingState {
        n,
        latent_dim: config.latent_dim as usize,
        weights: Default::default(),
        term_counts: vec![Default::default(); n],
    };

    let biased = config.beta_social > 0.0 || config.beta_semantic > 0.0;
    let mut clock: Option<DistanceClock> = None;
    let mut records: Vec<PostRecord> = Vec::new();
    let mut url_counter = 0usize;
    let whole_posts = config.posts_per_day.floor() as u32;
    let post_frac = config.posts_per_day.fract();

    for day in 1..=config.days {
        if biased && day >= REFRESH_START && (day - REFRESH_START).is_multiple_of(REFRESH_EVERY) {
            clock = Some(DistanceClock::refresh(&state, day - 1));
        }
        for blog in 0..n {
            let mut posts = whole_posts;
            if post_frac > 0.0 && rng.gen::<f64>() < post_frac {
                posts += 1;
            }
            for _ in 0..posts {
                let mut terms: Vec<u32> = Vec::with_capacity(TERMS_PER_POST);
                for _ in 0..TERMS_PER_POST {
                    let u: f64 = rng.gen();
                    let idx = blogs[blog]
                        .latent_cdf
                        .partition_point(|&c| c < u)
                        .min(config.latent_dim as usize - 1);
                    terms.push(idx as u32);
                }
                terms.sort_unstable();
                terms.dedup();

                let target = sample_citation_target(config, &mut rng, blog, clock.as_ref(), n);

                let mut urls: Vec<usize> = Vec::new();
                if rng.gen::<f64>() < URL_NEW_PROB {
                    urls.push(url_counter);
                    url_counter += 1;
                }
                if let Some(j) = target {
                    if config.relay_prob > 0.0 {
                        let cutoff = day.saturating_sub(RELAY_RECENCY);
                        let start = blogs[j]
                            .recent_urls
                            .partition_point(|&(d, _)| d < cutoff.max(1));
                        let candidates: Vec<usize> = blogs[j].recent_urls[start..]
                            .iter()
                            .filter(|&&(d, _)| d < day)
                            .map(|&(_, u)| u)
                            .collect();
                        let mut relayed = 0;
                        for u in candidates {
                            if rng.gen::<f64>() < config.relay_prob {
                                urls.push(u);
                                relayed += 1;
                                if relayed >= MAX_RELAYS_PER_POST {
                                    break;
                                }
                            }
                        }
                    }
                }
                urls.sort_unstable();
                urls.dedup();

                for &t in &terms {
                    state.record_term(blog, t, day);
                }
                if let Some(j) = target {
                    state.record_citation(blog as u32, j as u32, day);
                }
                for &u in &urls {
                    blogs[blog].recent_urls.push((day, u));
                }

                records.push(PostRecord {
                    blog: format!("blog-{blog:04}"),
                    day: i64::from(day),
                    terms: terms.iter().map(|t| format!("term-{t:03}")).collect(),
                    urls: urls
                        .iter()
                        .map(|u| format!("http://synth.example/item-{u:06}"))
                        .collect(),
                    cites: target.iter().map(|j| format!("blog-{j:04}")).collect(),
                });
            }
        }
        // Prune stale relay candidates once per day.
        if config.relay_prob > 0.0 {
            let cutoff = (day + 1).saturating_sub(RELAY_RECENCY);
            for b in &mut blogs {
                let keep_from = b.recent_urls.partition_point(|&(d, _)| d < cutoff);
                if keep_from > 0 {
                    b.recent_urls.drain(..keep_from);
                }
            }
        }
    }

    Ok(GeneratedCorpus {
        records,
        manifest: Manifest {
            days: config.days,
            terms: None,
        },
    })
}

fn sample_citation_target(
    config: &GeneratorConfig,
    rng: &mut ChaCha8Rng,
    source: usize,
    clock: Option<&DistanceClock>,
    n: usize,
) -> Option<usize> {
    if n < 2 {
        return None;
    }
    match clock {
        None => {
            // Uniform over the other blogs.
            let pick = rng.gen_range(0..n - 1);
            Some(if pick >= source { pick + 1 } else { pick })
        }
        Some(clock) => {
            let mut cumulative = vec![0.0f64; n];
            let mut total = 0.0;
            for j in 0..n {
                let mut w = 0.0;
                if j != source {
                    let hops = clock.hops[source * clock.n + j];
                    let social = if config.beta_social > 0.0 {
                        if hops == u16::MAX {
                            0.0
                        } else {
                            (-config.beta_social * f64::from(hops)).exp()
                        }
                    } else {
                        1.0
                    };
                    let delta = clock.delta[source * clock.n + j];
                    let semantic = if config.beta_semantic > 0.0 && delta.is_finite() {
                        (-config.beta_semantic * delta).exp()
                    } else {
                        1.0
                    };
                    w = social * semantic;
                }
                total += w;
                cumulative[j] = total;
            }
            if total <= 0.0 {
                let pick = rng.gen_range(0..n - 1);
                return Some(if pick >= source { pick + 1 } else { pick });
            }
            let u: f64 = rng.gen::<f64>() * total;
            let idx = cumulative.partition_point(|&c| c <= u).min(n - 1);
            Some(idx)
        }
    }
}
