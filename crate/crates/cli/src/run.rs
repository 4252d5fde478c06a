//! Subcommand implementations.

use std::fs;
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};

use cosoc_core::corpus::{ingest, Manifest, TemporalCorpus};
use cosoc_core::diffusion;
use cosoc_core::graphmetrics::aggregate;
use cosoc_core::ids::BlogId;
use cosoc_core::propensity::{self, WindowScheme};
use cosoc_core::rational::{format_rational, parse_rational, Distance, Rational};
use cosoc_core::report;
use cosoc_core::semantics::{build_profiles, tfidf_adjust};
use cosoc_core::synthgen;

use crate::manifest::RunManifest;
use crate::{
    DiffusionStatsArgs, DistanceKind, DistancesArgs, ExtractArgs, IngestArgs, PropensityArgs,
    PropensityKind, ReportArgs, SemdistArgs, StatsKind, SynthArgs,
};

fn load_index(path: &Path) -> Result<TemporalCorpus> {
    let file = fs::File::open(path).with_context(|| format!("opening index {}", path.display()))?;
    Ok(TemporalCorpus::load_index(BufReader::new(file))?)
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

fn resolve_blog(corpus: &TemporalCorpus, name: &str) -> Result<BlogId> {
    corpus
        .blogs()
        .lookup(name)
        .map(BlogId)
        .ok_or_else(|| cosoc_core::Error::UnknownBlog(name.to_owned()).into())
}

/// Pair list file: one `src,dst` record per line, no header.
fn read_pairs(path: &Path) -> Result<Vec<(String, String)>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .from_path(path)
        .with_context(|| format!("opening pairs file {}", path.display()))?;
    let mut pairs = Vec::new();
    for record in reader.records() {
        let record = record?;
        if record.len() != 2 {
            bail!(
                "pairs file {}: expected 2 fields per record, got {}",
                path.display(),
                record.len()
            );
        }
        pairs.push((record[0].to_owned(), record[1].to_owned()));
    }
    Ok(pairs)
}

pub fn run_ingest(args: &IngestArgs, argv: Vec<String>) -> Result<()> {
    let manifest_text = fs::read_to_string(&args.manifest)
        .with_context(|| format!("reading manifest {}", args.manifest.display()))?;
    let manifest = Manifest::from_json(&manifest_text)?;
    let file = fs::File::open(&args.events)
        .with_context(|| format!("opening events {}", args.events.display()))?;
    let corpus = ingest(
        BufReader::new(file),
        manifest.days,
        manifest.terms.as_deref(),
    )?;
    let mut out = Vec::new();
    corpus.save_index(&mut out)?;
    fs::write(&args.out, out).with_context(|| format!("writing index {}", args.out.display()))?;

    let stats = corpus.stats();
    println!("blogs: {}", corpus.num_blogs());
    println!("posts: {}", stats.posts);
    println!("dated citation edges: {}", stats.dated_edges);
    println!(
        "unique citation pairs: {} ((i,j)), {} ((i,j,t))",
        stats.unique_pairs, stats.unique_triples
    );
    println!("distinct urls: {}", corpus.urls().len());
    if stats.self_citations_dropped > 0 {
        eprintln!(
            "warning: dropped {} self-citation(s)",
            stats.self_citations_dropped
        );
    }
    if stats.short_urls_dropped > 0 {
        eprintln!("warning: dropped {} short url(s)", stats.short_urls_dropped);
    }
    if stats.unknown_terms_dropped > 0 {
        eprintln!(
            "warning: dropped {} term(s) outside the curated list",
            stats.unknown_terms_dropped
        );
    }

    let mut run = RunManifest::new(
        argv,
        serde_json::json!({"days": manifest.days, "curated_terms": manifest.terms.is_some()}),
    );
    run.add_input(&args.events)?;
    run.add_input(&args.manifest)?;
    run.add_output(&args.out)?;
    run.write(&args.out)
}

pub fn run_distances(args: &DistancesArgs, argv: Vec<String>) -> Result<()> {
    let corpus = load_index(&args.index)?;
    let graph = aggregate(&corpus, args.cutoff)?;
    let mut writer = csv::Writer::from_path(&args.out)
        .with_context(|| format!("creating {}", args.out.display()))?;
    writer.write_record(["src", "dst", "distance"])?;

    let format_hops = |d: &Distance<u32>| d.to_string();
    let format_cost = |d: &Distance<Rational>| match d {
        Distance::Finite(r) => format_rational(r),
        Distance::Infinite => "inf".into(),
    };

    if args.all {
        // Row-batched computation, one source at a time.
        let n = corpus.num_blogs();
        match args.kind {
            DistanceKind::Social => {
                for i in 0..n as u32 {
                    let row = graph.social_distances_from(BlogId(i))?;
                    for j in 0..n as u32 {
                        if i == j {
                            continue;
                        }
                        writer.write_record([
                            corpus.blogs().name(i),
                            corpus.blogs().name(j),
                            &format_hops(&row[j as usize]),
                        ])?;
                    }
                }
            }
            DistanceKind::Detachment => {
                let engine = graph.detachment_engine();
                for i in 0..n as u32 {
                    let row = engine.distances_from(BlogId(i))?;
                    for j in 0..n as u32 {
                        if i == j {
                            continue;
                        }
                        writer.write_record([
                            corpus.blogs().name(i),
                            corpus.blogs().name(j),
                            &format_cost(&row[j as usize]),
                        ])?;
                    }
                }
            }
        }
    } else {
        let pairs_path = args.pairs.as_ref().expect("clap enforces pairs xor all");
        let engine = match args.kind {
            DistanceKind::Detachment => Some(graph.detachment_engine()),
            DistanceKind::Social => None,
        };
        for (src, dst) in read_pairs(pairs_path)? {
            let i = resolve_blog(&corpus, &src)?;
            let j = resolve_blog(&corpus, &dst)?;
            let text = match args.kind {
                DistanceKind::Social => format_hops(&graph.social_distance(i, j)?),
                DistanceKind::Detachment => {
                    format_cost(&engine.as_ref().unwrap().distance(i, j)?)
                }
            };
            writer.write_record([src.as_str(), dst.as_str(), &text])?;
        }
    }
    writer.flush()?;
    drop(writer);

    let mut run = RunManifest::new(
        argv,
        serde_json::json!({
            "cutoff": args.cutoff,
            "kind": format!("{:?}", args.kind).to_lowercase(),
            "all": args.all,
        }),
    );
    run.add_input(&args.index)?;
    if let Some(p) = &args.pairs {
        run.add_input(p)?;
    }
    run.add_output(&args.out)?;
    run.write(&args.out)
}

pub fn run_semdist(args: &SemdistArgs, argv: Vec<String>) -> Result<()> {
    let corpus = load_index(&args.index)?;
    let adjusted = tfidf_adjust(&build_profiles(&corpus, args.cutoff)?);
    let mut writer = csv::Writer::from_path(&args.out)
        .with_context(|| format!("creating {}", args.out.display()))?;
    writer.write_record(["i", "j", "delta"])?;
    let fmt = |d: Option<f64>| match d {
        Some(v) => format!("{v}"),
        None => "NA".into(),
    };
    if args.all {
        // Semantic distance is symmetric: emit each unordered pair once.
        let n = corpus.num_blogs();
        for i in 0..n as u32 {
            for j in (i + 1)..n as u32 {
                let d = adjusted.distance(BlogId(i), BlogId(j))?;
                writer.write_record([
                    corpus.blogs().name(i),
                    corpus.blogs().name(j),
                    &fmt(d),
                ])?;
            }
        }
    } else {
        let pairs_path = args.pairs.as_ref().expect("clap enforces pairs xor all");
        for (src, dst) in read_pairs(pairs_path)? {
            let i = resolve_blog(&corpus, &src)?;
            let j = resolve_blog(&corpus, &dst)?;
            let d = adjusted.distance(i, j)?;
            writer.write_record([src.as_str(), dst.as_str(), &fmt(d)])?;
        }
    }
    writer.flush()?;
    drop(writer);

    let mut run = RunManifest::new(
        argv,
        serde_json::json!({"cutoff": args.cutoff, "all": args.all}),
    );
    run.add_input(&args.index)?;
    if let Some(p) = &args.pairs {
        run.add_input(p)?;
    }
    run.add_output(&args.out)?;
    run.write(&args.out)
}

fn summary_path(out: &Path) -> PathBuf {
    out.with_extension("summary.csv")
}

pub fn run_propensity(args: &PropensityArgs, argv: Vec<String>) -> Result<()> {
    let corpus = load_index(&args.index)?;
    let scheme = WindowScheme {
        t0: args.t0,
        window_len: args.window_len,
        windows: args.windows,
    };
    let delta_bin_text = args.delta_bin.clone().unwrap_or_else(|| {
        match args.kind {
            PropensityKind::TwoD => "0.2",
            _ => "0.1",
        }
        .to_owned()
    });
    let delta_bin = parse_rational(&delta_bin_text).ok_or_else(|| {
        cosoc_core::Error::InvalidParameter(format!(
            "unparseable delta bin width `{delta_bin_text}`"
        ))
    })?;
    let (windows_csv, summary_csv) = match args.kind {
        PropensityKind::Social => {
            let curve = propensity::propensity_social(&corpus, &scheme, args.max_d)?;
            (
                report::curve_windows_csv(&curve)?,
                report::curve_summary_csv(&curve)?,
            )
        }
        PropensityKind::Detachment => {
            let edges = match &args.bin_edges {
                Some(spec) => spec
                    .split(',')
                    .map(|s| {
                        parse_rational(s).ok_or_else(|| {
                            cosoc_core::Error::InvalidParameter(format!(
                                "unparseable bin edge `{s}`"
                            ))
                        })
                    })
                    .collect::<Result<Vec<_>, _>>()?,
                None => propensity::default_detachment_bin_edges(),
            };
            let curve = propensity::propensity_detachment(&corpus, &scheme, &edges)?;
            (
                report::curve_windows_csv(&curve)?,
                report::curve_summary_csv(&curve)?,
            )
        }
        PropensityKind::Semantic => {
            let curve = propensity::propensity_semantic(&corpus, &scheme, &delta_bin)?;
            (
                report::curve_windows_csv(&curve)?,
                report::curve_summary_csv(&curve)?,
            )
        }
        PropensityKind::TwoD => {
            let grid = propensity::propensity_2d(&corpus, &scheme, args.max_d, &delta_bin)?;
            (
                report::grid_windows_csv(&grid)?,
                report::grid_summary_csv(&grid)?,
            )
        }
    };
    write_file(&args.out, &windows_csv)?;
    let summary = summary_path(&args.out);
    write_file(&summary, &summary_csv)?;
    println!("windows: {}", args.out.display());
    println!("summary: {}", summary.display());

    let mut run = RunManifest::new(
        argv,
        serde_json::json!({
            "kind": format!("{:?}", args.kind).to_lowercase(),
            "t0": args.t0,
            "T": args.window_len,
            "windows": args.windows,
            "max_d": args.max_d,
            "delta_bin": delta_bin_text,
            "bin_edges": args.bin_edges,
        }),
    );
    run.add_input(&args.index)?;
    run.add_output(&args.out)?;
    run.add_output(&summary)?;
    run.write(&args.out)
}

pub fn run_diffusion_extract(args: &ExtractArgs, argv: Vec<String>) -> Result<()> {
    let corpus = load_index(&args.index)?;
    let analysis = diffusion::all_subgraphs(&corpus)?;
    fs::create_dir_all(&args.out)
        .with_context(|| format!("creating {}", args.out.display()))?;

    let subgraphs_path = args.out.join("subgraphs.jsonl");
    let mut file = fs::File::create(&subgraphs_path)?;
    for sub in analysis.non_trivial() {
        let record = serde_json::json!({
            "url": corpus.urls().name(sub.url.0),
            "nodes": sub.nodes.iter().map(|b| corpus.blogs().name(b.0)).collect::<Vec<_>>(),
            "edges": sub.edges.iter().map(|e| {
                serde_json::json!([
                    corpus.blogs().name(e.source.0),
                    corpus.blogs().name(e.target.0),
                    e.day,
                ])
            }).collect::<Vec<_>>(),
        });
        writeln!(file, "{record}")?;
    }
    file.flush()?;
    drop(file);

    let counts_path = args.out.join("counts.json");
    let counts = serde_json::json!({
        "total_urls": analysis.counts.total_urls,
        "trivial": analysis.counts.trivial,
        "non_trivial": analysis.counts.non_trivial,
        "transmission_links": analysis.counts.transmission_links,
    });
    write_file(&counts_path, &(serde_json::to_string_pretty(&counts)? + "\n"))?;
    println!(
        "subgraphs: {} non-trivial / {} total, {} transmission links",
        analysis.counts.non_trivial, analysis.counts.total_urls, analysis.counts.transmission_links
    );

    let mut run = RunManifest::new(argv, serde_json::json!({}));
    run.add_input(&args.index)?;
    run.add_output(&subgraphs_path)?;
    run.add_output(&counts_path)?;
    run.write(&args.out)
}

pub fn run_diffusion_stats(args: &DiffusionStatsArgs, argv: Vec<String>) -> Result<()> {
    let corpus = load_index(&args.index)?;
    let analysis = diffusion::all_subgraphs(&corpus)?;
    let csv_text = match args.kind {
        StatsKind::Sizes => {
            let dist = diffusion::size_distribution(&analysis);
            report::sizes_csv(&dist)?
        }
        StatsKind::Attention => {
            let quantiles = args.quantiles.unwrap_or(8);
            let rows =
                diffusion::first_transmissions_vs_attention(&corpus, &analysis, quantiles)?;
            report::attention_table_csv(&rows)?
        }
        StatsKind::Edgerange => {
            let quintiles = args.quantiles.unwrap_or(5);
            let rows =
                diffusion::second_transmissions_vs_edge_range(&corpus, &analysis, quintiles)?;
            report::edge_range_table_csv(&rows)?
        }
    };
    write_file(&args.out, &csv_text)?;

    let mut run = RunManifest::new(
        argv,
        serde_json::json!({
            "kind": format!("{:?}", args.kind).to_lowercase(),
            "quantiles": args.quantiles,
        }),
    );
    run.add_input(&args.index)?;
    run.add_output(&args.out)?;
    run.write(&args.out)
}

pub fn run_synth(args: &SynthArgs, argv: Vec<String>) -> Result<()> {
    let config_text = fs::read_to_string(&args.config)
        .with_context(|| format!("reading config {}", args.config.display()))?;
    let config = synthgen::GeneratorConfig::from_toml(&config_text)?;
    let generated = synthgen::generate(&config)?;
    write_file(&args.out, &generated.event_lines())?;
    let manifest_path = {
        let mut name = args.out.file_name().unwrap_or_default().to_os_string();
        name.push(".manifest.json");
        args.out.with_file_name(name)
    };
    write_file(
        &manifest_path,
        &(serde_json::to_string_pretty(&generated.manifest)? + "\n"),
    )?;
    println!("events: {} posts over {} days", generated.records.len(), config.days);
    println!("manifest: {}", manifest_path.display());

    let mut run = RunManifest::new(argv, serde_json::to_value(&config)?);
    run.add_input(&args.config)?;
    run.add_output(&args.out)?;
    run.add_output(&manifest_path)?;
    run.write(&args.out)
}

pub fn run_report(args: &ReportArgs, argv: Vec<String>) -> Result<()> {
    let corpus = load_index(&args.index)?;
    let analysis = diffusion::all_subgraphs(&corpus)?;
    fs::create_dir_all(&args.outputs)
        .with_context(|| format!("creating {}", args.outputs.display()))?;

    // Collect CSV artifacts already present in the outputs directory.
    let mut artifacts: Vec<String> = fs::read_dir(&args.outputs)?
        .filter_map(|entry| entry.ok())
        .map(|entry| entry.path())
        .filter(|p| p.extension().is_some_and(|e| e == "csv"))
        .map(|p| p.display().to_string())
        .collect();
    artifacts.sort();

    let summary = report::build_report(&corpus, &analysis, artifacts);
    let md_path = args.outputs.join("report.md");
    let json_path = args.outputs.join("report.json");
    write_file(&md_path, &summary.to_markdown())?;
    write_file(
        &json_path,
        &(serde_json::to_string_pretty(&summary)? + "\n"),
    )?;
    print!("{}", summary.to_markdown());

    let mut run = RunManifest::new(argv, serde_json::json!({}));
    run.add_input(&args.index)?;
    run.add_output(&md_path)?;
    run.add_output(&json_path)?;
    run.write(&args.outputs)
}
