//! Event-corpus ingestion and the daily temporal views derived from it.
//!
//! The input is a line-delimited stream of post records. Each record names
//! the posting blog, the day index, and the sets of terms, URLs and blog
//! citations carried by the post. Ingestion validates records against the
//! observation window, normalizes URLs, drops self-citations with a warning
//! count, and builds dense registries for blogs, terms and URLs.
//!
//! Daily views are binary: several same-day citations of `j` by `i` collapse
//! to a single `(i, j)` entry for that day. The dated-edge statistic still
//! counts every post-level citation, so raw corpus sizes stay reportable.

use std::collections::HashSet;
use std::io::BufRead;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ids::{BlogId, Day, Registry, TermId, UrlId};

/// One post record as it appears in the event stream.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PostRecord {
    pub blog: String,
    pub day: i64,
    #[serde(default)]
    pub terms: Vec<String>,
    #[serde(default)]
    pub urls: Vec<String>,
    #[serde(default)]
    pub cites: Vec<String>,
}

/// Sidecar manifest declaring the observation window and, optionally, the
/// curated term list. When a term list is present, event terms outside it
/// are dropped (and counted) rather than registered.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Manifest {
    pub days: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub terms: Option<Vec<String>>,
}

impl Manifest {
    pub fn from_json(s: &str) -> Result<Self> {
        let m: Manifest =
            serde_json::from_str(s).map_err(|e| Error::MalformedManifest(e.to_string()))?;
        if m.days == 0 {
            return Err(Error::MalformedManifest(
                "observation window must cover at least one day".into(),
            ));
        }
        Ok(m)
    }
}

/// A validated, indexed post event. Identifier lists are deduplicated and
/// sorted, so events compare structurally.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PostEvent {
    pub blog: BlogId,
    pub day: Day,
    pub terms: Vec<TermId>,
    pub urls: Vec<UrlId>,
    pub cites: Vec<BlogId>,
}

/// Counters reported by ingestion.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct IngestStats {
    /// Number of accepted post events.
    pub posts: u64,
    /// Post-level citations after self-citation drop (every post counts its
    /// own cites even when the same pair repeats on the same day).
    pub dated_edges: u64,
    /// Distinct (citing, cited) pairs over the whole corpus.
    pub unique_pairs: u64,
    /// Distinct (citing, cited, day) triples, i.e. the total mass of the
    /// daily binary citation views.
    pub unique_triples: u64,
    pub self_citations_dropped: u64,
    pub short_urls_dropped: u64,
    pub unknown_terms_dropped: u64,
}

/// Validated, indexed collection of post events plus the blog/term/URL
/// registries. Immutable after construction; all views are queries.
#[derive(Clone, Debug, PartialEq)]
pub struct TemporalCorpus {
    blogs: Registry,
    terms: Registry,
    urls: Registry,
    /// True when the term registry was fixed by a curated manifest list.
    curated_terms: bool,
    horizon: Day,
    /// Day-sorted (stable within a day by input order).
    events: Vec<PostEvent>,
    /// `events[day_ranges[d].0 .. day_ranges[d].1]` are the events of day d+1.
    day_ranges: Vec<(u32, u32)>,
    stats: IngestStats,
}

/// Trim whitespace and strip a single trailing slash. URLs are otherwise
/// compared case-sensitively.
pub fn normalize_url(raw: &str) -> &str {
    let s = raw.trim();
    s.strip_suffix('/').unwrap_or(s)
}

/// Minimum URL length (exclusive) admitted into the URL registry.
pub const URL_MIN_CHARS: usize = 10;

/// Ingest a line-delimited event stream observed over days `[1, horizon]`.
///
/// `curated_terms`, when given, freezes the term registry to that list.
pub fn ingest<R: BufRead>(
    reader: R,
    horizon: Day,
    curated_terms: Option<&[String]>,
) -> Result<TemporalCorpus> {
    if horizon == 0 {
        return Err(Error::InvalidParameter(
            "observation window must cover at least one day".into(),
        ));
    }
    let mut parsed: Vec<PostRecord> = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let text = line?;
        if text.trim().is_empty() {
            continue;
        }
        let record: PostRecord =
            serde_json::from_str(&text).map_err(|e| Error::MalformedRecord {
                line: line_no,
                message: e.to_string(),
            })?;
        if record.blog.is_empty() {
            return Err(Error::MalformedRecord {
                line: line_no,
                message: "empty blog identifier".into(),
            });
        }
        if record.day < 1 || record.day > i64::from(horizon) {
            return Err(Error::DayOutOfWindow {
                line: line_no,
                day: record.day,
                horizon,
            });
        }
        parsed.push(record);
    }

    // Canonical event order: by day, stable by input order. Registries are
    // interned in this order so that serializing and re-ingesting a corpus
    // reproduces identical registries.
    parsed.sort_by_key(|r| r.day);

    let mut blogs = Registry::new();
    let mut terms = Registry::new();
    let mut urls = Registry::new();
    let curated = curated_terms.is_some();
    if let Some(list) = curated_terms {
        for t in list {
            terms.intern(t);
        }
    }

    let mut stats = IngestStats::default();
    let mut events: Vec<PostEvent> = Vec::with_capacity(parsed.len());
    let mut pair_set: HashSet<(u32, u32)> = HashSet::new();
    let mut triple_set: HashSet<(u32, u32, Day)> = HashSet::new();

    for record in &parsed {
        let day = record.day as Day;
        let blog = BlogId(blogs.intern(&record.blog));

        let mut term_ids: Vec<TermId> = Vec::with_capacity(record.terms.len());
        for t in &record.terms {
            if curated {
                match terms.lookup(t) {
                    Some(i) => term_ids.push(TermId(i)),
                    None => stats.unknown_terms_dropped += 1,
                }
            } else {
                term_ids.push(TermId(terms.intern(t)));
            }
        }
        term_ids.sort_unstable();
        term_ids.dedup();

        let mut url_ids: Vec<UrlId> = Vec::with_capacity(record.urls.len());
        for u in &record.urls {
            let norm = normalize_url(u);
            if norm.chars().count() > URL_MIN_CHARS {
                url_ids.push(UrlId(urls.intern(norm)));
            } else {
                stats.short_urls_dropped += 1;
            }
        }
        url_ids.sort_unstable();
        url_ids.dedup();

        let mut cite_ids: Vec<BlogId> = Vec::with_capacity(record.cites.len());
        for c in &record.cites {
            if c == &record.blog {
                stats.self_citations_dropped += 1;
                continue;
            }
            cite_ids.push(BlogId(blogs.intern(c)));
        }
        cite_ids.sort_unstable();
        cite_ids.dedup();

        stats.posts += 1;
        stats.dated_edges += cite_ids.len() as u64;
        for &j in &cite_ids {
            pair_set.insert((blog.0, j.0));
            triple_set.insert((blog.0, j.0, day));
        }

        events.push(PostEvent {
            blog,
            day,
            terms: term_ids,
            urls: url_ids,
            cites: cite_ids,
        });
    }

    stats.unique_pairs = pair_set.len() as u64;
    stats.unique_triples = triple_set.len() as u64;

    Ok(TemporalCorpus::assemble(
        blogs, terms, urls, curated, horizon, events, stats,
    ))
}

/// Convenience wrapper over [`ingest`] for in-memory streams.
pub fn ingest_str(
    text: &str,
    horizon: Day,
    curated_terms: Option<&[String]>,
) -> Result<TemporalCorpus> {
    ingest(text.as_bytes(), horizon, curated_terms)
}

impl TemporalCorpus {
    fn assemble(
        blogs: Registry,
        terms: Registry,
        urls: Registry,
        curated_terms: bool,
        horizon: Day,
        events: Vec<PostEvent>,
        stats: IngestStats,
    ) -> Self {
        let mut day_ranges = vec![(0u32, 0u32); horizon as usize];
        let mut pos = 0usize;
        for d in 1..=horizon {
            let start = pos;
            while pos < events.len() && events[pos].day == d {
                pos += 1;
            }
            day_ranges[(d - 1) as usize] = (start as u32, pos as u32);
        }
        TemporalCorpus {
            blogs,
            terms,
            urls,
            curated_terms,
            horizon,
            events,
            day_ranges,
            stats,
        }
    }

    pub fn blogs(&self) -> &Registry {
        &self.blogs
    }

    pub fn terms(&self) -> &Registry {
        &self.terms
    }

    pub fn urls(&self) -> &Registry {
        &self.urls
    }

    pub fn horizon(&self) -> Day {
        self.horizon
    }

    pub fn events(&self) -> &[PostEvent] {
        &self.events
    }

    pub fn stats(&self) -> &IngestStats {
        &self.stats
    }

    pub fn num_blogs(&self) -> usize {
        self.blogs.len()
    }

    fn check_day(&self, t: Day) -> Result<()> {
        if t < 1 || t > self.horizon {
            return Err(Error::DayOutOfRange {
                day: t,
                horizon: self.horizon,
            });
        }
        Ok(())
    }

    /// Events posted on day `t`.
    pub fn events_on(&self, t: Day) -> Result<&[PostEvent]> {
        self.check_day(t)?;
        let (s, e) = self.day_ranges[(t - 1) as usize];
        Ok(&self.events[s as usize..e as usize])
    }

    /// The binary daily citation view: exactly the ordered pairs `(i, j)`
    /// where `i` cited `j` in some post of day `t`. Sorted, deduplicated.
    pub fn daily_citations(&self, t: Day) -> Result<Vec<(BlogId, BlogId)>> {
        let mut pairs: Vec<(BlogId, BlogId)> = self
            .events_on(t)?
            .iter()
            .flat_map(|e| e.cites.iter().map(move |&j| (e.blog, j)))
            .collect();
        pairs.sort_unstable();
        pairs.dedup();
        Ok(pairs)
    }

    /// The binary daily term view: pairs `(i, w)` where blog `i` used term
    /// `w` in a post of day `t`.
    pub fn daily_term_usage(&self, t: Day) -> Result<Vec<(BlogId, TermId)>> {
        let mut pairs: Vec<(BlogId, TermId)> = self
            .events_on(t)?
            .iter()
            .flat_map(|e| e.terms.iter().map(move |&w| (e.blog, w)))
            .collect();
        pairs.sort_unstable();
        pairs.dedup();
        Ok(pairs)
    }

    /// The binary daily URL view: pairs `(i, u)` where blog `i` mentioned
    /// URL `u` in a post of day `t`.
    pub fn daily_url_mentions(&self, t: Day) -> Result<Vec<(BlogId, UrlId)>> {
        let mut pairs: Vec<(BlogId, UrlId)> = self
            .events_on(t)?
            .iter()
            .flat_map(|e| e.urls.iter().map(move |&u| (e.blog, u)))
            .collect();
        pairs.sort_unstable();
        pairs.dedup();
        Ok(pairs)
    }

    /// Serialize back to the line-delimited event format, in canonical
    /// (day-sorted) order. Re-ingesting the output reproduces this corpus.
    pub fn to_event_lines(&self) -> String {
        let mut out = String::new();
        for e in &self.events {
            let record = PostRecord {
                blog: self.blogs.name(e.blog.0).to_owned(),
                day: i64::from(e.day),
                terms: e.terms.iter().map(|t| self.terms.name(t.0).to_owned()).collect(),
                urls: e.urls.iter().map(|u| self.urls.name(u.0).to_owned()).collect(),
                cites: e.cites.iter().map(|c| self.blogs.name(c.0).to_owned()).collect(),
            };
            out.push_str(&serde_json::to_string(&record).expect("record serialization"));
            out.push('\n');
        }
        out
    }

    /// Write the binary index file.
    pub fn save_index<W: std::io::Write>(&self, mut writer: W) -> Result<()> {
        let file = IndexFile {
            format: INDEX_FORMAT.to_owned(),
            horizon: self.horizon,
            curated_terms: self.curated_terms,
            blogs: self.blogs.names().to_vec(),
            terms: self.terms.names().to_vec(),
            urls: self.urls.names().to_vec(),
            stats: self.stats.clone(),
            events: self
                .events
                .iter()
                .map(|e| {
                    (
                        e.blog.0,
                        e.day,
                        e.terms.iter().map(|t| t.0).collect(),
                        e.urls.iter().map(|u| u.0).collect(),
                        e.cites.iter().map(|c| c.0).collect(),
                    )
                })
                .collect(),
        };
        serde_json::to_writer(&mut writer, &file)
            .map_err(|e| Error::MalformedIndex(e.to_string()))?;
        writer.write_all(b"\n")?;
        Ok(())
    }

    /// Load a corpus from an index file produced by [`save_index`].
    pub fn load_index<R: std::io::Read>(reader: R) -> Result<Self> {
        let file: IndexFile =
            serde_json::from_reader(reader).map_err(|e| Error::MalformedIndex(e.to_string()))?;
        if file.format != INDEX_FORMAT {
            return Err(Error::MalformedIndex(format!(
                "unsupported index format `{}`",
                file.format
            )));
        }
        let blogs = Registry::from_names(file.blogs)?;
        let terms = Registry::from_names(file.terms)?;
        let urls = Registry::from_names(file.urls)?;
        let mut events = Vec::with_capacity(file.events.len());
        let mut last_day = 1;
        for (blog, day, t, u, c) in file.events {
            if day < 1 || day > file.horizon || day < last_day {
                return Err(Error::MalformedIndex(format!(
                    "event day {day} out of order or outside window"
                )));
            }
            last_day = day;
            let check = |id: u32, len: usize, what: &str| -> Result<()> {
                if (id as usize) < len {
                    Ok(())
                } else {
                    Err(Error::MalformedIndex(format!("{what} id {id} out of range")))
                }
            };
            check(blog, blogs.len(), "blog")?;
            for &x in &t {
                check(x, terms.len(), "term")?;
            }
            for &x in &u {
                check(x, urls.len(), "url")?;
            }
            for &x in &c {
                check(x, blogs.len(), "blog")?;
            }
            events.push(PostEvent {
                blog: BlogId(blog),
                day,
                terms: t.into_iter().map(TermId).collect(),
                urls: u.into_iter().map(UrlId).collect(),
                cites: c.into_iter().map(BlogId).collect(),
            });
        }
        Ok(TemporalCorpus::assemble(
            blogs,
            terms,
            urls,
            file.curated_terms,
            file.horizon,
            events,
            file.stats,
        ))
    }
}

const INDEX_FORMAT: &str = "cosoc-index/1";

#[derive(Serialize, Deserialize)]
struct IndexFile {
    format: String,
    horizon: Day,
    curated_terms: bool,
    blogs: Vec<String>,
    terms: Vec<String>,
    urls: Vec<String>,
    stats: IngestStats,
    events: Vec<(u32, Day, Vec<u32>, Vec<u32>, Vec<u32>)>,
}
