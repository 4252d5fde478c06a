//! Corpus-level summary reports and CSV rendering of analysis outputs.

use serde::Serialize;

use crate::corpus::TemporalCorpus;
use crate::diffusion::{AttentionRow, DiffusionAnalysis, EdgeRangeRow, RangeGroup, SizeDistribution};
use crate::error::Result;
use crate::propensity::{PropensityCurve, PropensityGrid};
use crate::rational::format_rational;

/// Headline corpus and diffusion statistics plus pointers to the CSV
/// artifacts produced alongside.
#[derive(Clone, Debug, Serialize)]
pub struct ReportSummary {
    pub blogs: u64,
    pub posts: u64,
    pub dated_edges: u64,
    pub unique_pairs: u64,
    pub unique_triples: u64,
    pub urls: u64,
    pub self_citations_dropped: u64,
    pub short_urls_dropped: u64,
    pub trivial_subgraphs: u64,
    pub non_trivial_subgraphs: u64,
    pub transmission_links: u64,
    /// Transmission links over dated citation edges, as an unreduced
    /// fraction string plus its decimal value.
    pub transmission_share: String,
    pub transmission_share_value: Option<f64>,
    pub artifacts: Vec<String>,
}

pub fn build_report(
    corpus: &TemporalCorpus,
    analysis: &DiffusionAnalysis,
    artifacts: Vec<String>,
) -> ReportSummary {
    let stats = corpus.stats();
    let links = analysis.counts.transmission_links;
    let edges = stats.dated_edges;
    ReportSummary {
        blogs: corpus.num_blogs() as u64,
        posts: stats.posts,
        dated_edges: edges,
        unique_pairs: stats.unique_pairs,
        unique_triples: stats.unique_triples,
        urls: corpus.urls().len() as u64,
        self_citations_dropped: stats.self_citations_dropped,
        short_urls_dropped: stats.short_urls_dropped,
        trivial_subgraphs: analysis.counts.trivial,
        non_trivial_subgraphs: analysis.counts.non_trivial,
        transmission_links: links,
        transmission_share: format!("{links}/{edges}"),
        transmission_share_value: (edges > 0).then(|| links as f64 / edges as f64),
        artifacts,
    }
}

impl ReportSummary {
    pub fn to_markdown(&self) -> String {
        let mut out = String::new();
        out.push_str("# Corpus report\n\n");
        out.push_str(&format!("- blogs: {}\n", self.blogs));
        out.push_str(&format!("- posts: {}\n", self.posts));
        out.push_str(&format!("- dated citation edges: {}\n", self.dated_edges));
        out.push_str(&format!(
            "- unique citation pairs: {} (as (i,j)); {} (as (i,j,t))\n",
            self.unique_pairs, self.unique_triples
        ));
        out.push_str(&format!("- distinct URLs: {}\n", self.urls));
        out.push_str(&format!(
            "- dropped at ingest: {} self-citations, {} short URLs\n",
            self.self_citations_dropped, self.short_urls_dropped
        ));
        out.push_str(&format!(
            "- diffusion subgraphs: {} non-trivial, {} trivial\n",
            self.non_trivial_subgraphs, self.trivial_subgraphs
        ));
        match self.transmission_share_value {
            Some(v) => out.push_str(&format!(
                "- transmission links: {} — share of citations {} ({:.4})\n",
                self.transmission_links, self.transmission_share, v
            )),
            None => out.push_str(&format!(
                "- transmission links: {} — share of citations {}\n",
                self.transmission_links, self.transmission_share
            )),
        }
        if !self.artifacts.is_empty() {
            out.push_str("\n## Artifacts\n\n");
            for a in &self.artifacts {
                out.push_str(&format!("- {a}\n"));
            }
        }
        out
    }
}

fn fmt_opt(v: Option<f64>) -> String {
    match v {
        Some(v) => format!("{v}"),
        None => "NA".into(),
    }
}

fn csv_writer() -> csv::Writer<Vec<u8>> {
    csv::WriterBuilder::new().from_writer(Vec::new())
}

fn finish(w: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = w.into_inner().map_err(|e| {
        crate::Error::Io(std::io::Error::other(e.to_string()))
    })?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// Per-window CSV for a 1-D curve: `bin_lo,bin_hi,window,raw_f,denominator`.
pub fn curve_windows_csv(curve: &PropensityCurve) -> Result<String> {
    let mut w = csv_writer();
    w.write_record(["bin_lo", "bin_hi", "window", "raw_f", "denominator"])
        .map_err(csv_err)?;
    for (b, bin) in curve.bins.iter().enumerate() {
        for win in &curve.windows {
            let tally = &win.tallies[b];
            w.write_record([
                bin.lo_label(),
                bin.hi_label(),
                win.k.to_string(),
                fmt_opt(tally.raw()),
                tally.denominator.to_string(),
            ])
            .map_err(csv_err)?;
        }
    }
    finish(w)
}

/// Summary CSV for a 1-D curve:
/// `bin_lo,bin_hi,mean,normalized_mean,ci95_halfwidth`.
pub fn curve_summary_csv(curve: &PropensityCurve) -> Result<String> {
    let mut w = csv_writer();
    w.write_record(["bin_lo", "bin_hi", "mean", "normalized_mean", "ci95_halfwidth"])
        .map_err(csv_err)?;
    for (bin, s) in curve.bins.iter().zip(&curve.summary) {
        w.write_record([
            bin.lo_label(),
            bin.hi_label(),
            fmt_opt(s.mean),
            fmt_opt(s.normalized_mean),
            fmt_opt(s.ci95_halfwidth),
        ])
        .map_err(csv_err)?;
    }
    finish(w)
}

/// Per-window CSV for the 2-D grid:
/// `d_lo,d_hi,delta_lo,delta_hi,window,raw_f,denominator`.
pub fn grid_windows_csv(grid: &PropensityGrid) -> Result<String> {
    let mut w = csv_writer();
    w.write_record([
        "d_lo",
        "d_hi",
        "delta_lo",
        "delta_hi",
        "window",
        "raw_f",
        "denominator",
    ])
    .map_err(csv_err)?;
    for (s_idx, s_bin) in grid.social_bins.iter().enumerate() {
        for (d_idx, d_bin) in grid.delta_bins.iter().enumerate() {
            let cell = grid.cell(s_idx, d_idx);
            for win in &grid.windows {
                let tally = &win.tallies[cell];
                w.write_record([
                    s_bin.lo_label(),
                    s_bin.hi_label(),
                    d_bin.lo_label(),
                    d_bin.hi_label(),
                    win.k.to_string(),
                    fmt_opt(tally.raw()),
                    tally.denominator.to_string(),
                ])
                .map_err(csv_err)?;
            }
        }
    }
    finish(w)
}

/// Summary CSV for the 2-D grid.
pub fn grid_summary_csv(grid: &PropensityGrid) -> Result<String> {
    let mut w = csv_writer();
    w.write_record([
        "d_lo",
        "d_hi",
        "delta_lo",
        "delta_hi",
        "mean",
        "normalized_mean",
        "ci95_halfwidth",
    ])
    .map_err(csv_err)?;
    for (s_idx, s_bin) in grid.social_bins.iter().enumerate() {
        for (d_idx, d_bin) in grid.delta_bins.iter().enumerate() {
            let s = &grid.summary[grid.cell(s_idx, d_idx)];
            w.write_record([
                s_bin.lo_label(),
                s_bin.hi_label(),
                d_bin.lo_label(),
                d_bin.hi_label(),
                fmt_opt(s.mean),
                fmt_opt(s.normalized_mean),
                fmt_opt(s.ci95_halfwidth),
            ])
            .map_err(csv_err)?;
        }
    }
    finish(w)
}

/// Size histograms: `kind,size,count` with kind in {nodes, links}.
pub fn sizes_csv(dist: &SizeDistribution) -> Result<String> {
    let mut w = csv_writer();
    w.write_record(["kind", "size", "count"]).map_err(csv_err)?;
    for (size, count) in &dist.nodes {
        w.write_record(["nodes", &size.to_string(), &count.to_string()])
            .map_err(csv_err)?;
    }
    for (size, count) in &dist.edges {
        w.write_record(["links", &size.to_string(), &count.to_string()])
            .map_err(csv_err)?;
    }
    finish(w)
}

/// Attention-quantile table CSV.
pub fn attention_table_csv(rows: &[AttentionRow]) -> Result<String> {
    let mut w = csv_writer();
    w.write_record([
        "quantile",
        "alpha_lo",
        "alpha_hi",
        "initiators",
        "mean_first",
        "mean_first_nonzero",
    ])
    .map_err(csv_err)?;
    for r in rows {
        w.write_record([
            r.group.to_string(),
            r.alpha_lo.as_ref().map(format_rational).unwrap_or_else(|| "NA".into()),
            r.alpha_hi.as_ref().map(format_rational).unwrap_or_else(|| "NA".into()),
            r.records.to_string(),
            fmt_opt(r.mean_first),
            fmt_opt(r.mean_first_nonzero),
        ])
        .map_err(csv_err)?;
    }
    finish(w)
}

/// Edge-range quintile table CSV; the bridge group is labeled `inf`.
pub fn edge_range_table_csv(rows: &[EdgeRangeRow]) -> Result<String> {
    let mut w = csv_writer();
    w.write_record(["quintile", "r_lo", "r_hi", "records", "mean_second"])
        .map_err(csv_err)?;
    for r in rows {
        let group = match r.group {
            RangeGroup::Quantile(q) => q.to_string(),
            RangeGroup::Infinite => "inf".into(),
        };
        w.write_record([
            group,
            r.r_lo.as_ref().map(format_rational).unwrap_or_else(|| "NA".into()),
            r.r_hi.as_ref().map(format_rational).unwrap_or_else(|| "NA".into()),
            r.records.to_string(),
            fmt_opt(r.mean_second),
        ])
        .map_err(csv_err)?;
    }
    finish(w)
}

fn csv_err(e: csv::Error) -> crate::Error {
    crate::Error::Io(std::io::Error::other(e.to_string()))
}
