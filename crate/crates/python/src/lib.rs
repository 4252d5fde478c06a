//! Python bindings: corpus ingestion, aggregated-graph metrics, semantic
//! distances, propensity curves, diffusion statistics and the synthetic
//! generator, driven in-process.

use std::collections::BTreeMap;

use pyo3::exceptions::{PyIOError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};

use cosoc_core::corpus::{ingest_str, TemporalCorpus};
use cosoc_core::diffusion;
use cosoc_core::graphmetrics::{aggregate, AggregatedGraph};
use cosoc_core::ids::{BlogId, UrlId};
use cosoc_core::propensity::{self, DistanceBin, PropensityCurve, PropensityGrid, WindowScheme};
use cosoc_core::rational::{parse_rational, to_f64, Distance, Rational};
use cosoc_core::semantics::{build_profiles, tfidf_adjust};
use cosoc_core::synthgen;

fn core_err(e: cosoc_core::Error) -> PyErr {
    if e.is_io() {
        PyIOError::new_err(e.to_string())
    } else {
        PyValueError::new_err(e.to_string())
    }
}

fn rational_parts(r: &Rational) -> (String, String) {
    (r.numer().to_string(), r.denom().to_string())
}

fn cost_to_float(d: &Distance<Rational>) -> f64 {
    match d {
        Distance::Finite(r) => to_f64(r),
        Distance::Infinite => f64::INFINITY,
    }
}

/// Weighted directed citation graph with attention/detachment metrics.
/// Nodes are dense indices.
#[pyclass]
struct Graph {
    inner: AggregatedGraph,
}

#[pymethods]
impl Graph {
    /// Build from `(source, target, weight)` edges over `n` nodes.
    #[new]
    fn new(n: usize, edges: Vec<(u32, u32, u64)>) -> PyResult<Self> {
        Ok(Graph {
            inner: AggregatedGraph::from_weighted_edges(0, n, &edges).map_err(core_err)?,
        })
    }

    fn num_nodes(&self) -> usize {
        self.inner.num_nodes()
    }

    fn num_edges(&self) -> usize {
        self.inner.num_edges()
    }

    fn weight(&self, i: u32, j: u32) -> u64 {
        self.inner.weight(BlogId(i), BlogId(j))
    }

    fn out_strength(&self, i: u32) -> u64 {
        self.inner.out_strength(BlogId(i))
    }

    /// Attention value as a float; None when the edge is absent.
    fn attention(&self, i: u32, j: u32) -> Option<f64> {
        self.inner
            .attention()
            .value(BlogId(i), BlogId(j))
            .map(to_f64)
    }

    /// Attention as an exact `(numerator, denominator)` string pair.
    fn attention_fraction(&self, i: u32, j: u32) -> Option<(String, String)> {
        self.inner
            .attention()
            .value(BlogId(i), BlogId(j))
            .map(rational_parts)
    }

    fn detachment(&self, i: u32, j: u32) -> Option<f64> {
        self.inner
            .detachment()
            .value(BlogId(i), BlogId(j))
            .map(to_f64)
    }

    fn detachment_fraction(&self, i: u32, j: u32) -> Option<(String, String)> {
        self.inner
            .detachment()
            .value(BlogId(i), BlogId(j))
            .map(rational_parts)
    }

    /// Hop distance; `inf` when unreachable.
    fn social_distance(&self, i: u32, j: u32) -> PyResult<f64> {
        Ok(
            match self
                .inner
                .social_distance(BlogId(i), BlogId(j))
                .map_err(core_err)?
            {
                Distance::Finite(h) => f64::from(h),
                Distance::Infinite => f64::INFINITY,
            },
        )
    }

    fn detachment_distance(&self, i: u32, j: u32) -> PyResult<f64> {
        Ok(cost_to_float(
            &self
                .inner
                .detachment_distance(BlogId(i), BlogId(j))
                .map_err(core_err)?,
        ))
    }

    fn detachment_distance_fraction(&self, i: u32, j: u32) -> PyResult<Option<(String, String)>> {
        Ok(
            match self
                .inner
                .detachment_distance(BlogId(i), BlogId(j))
                .map_err(core_err)?
            {
                Distance::Finite(r) => Some(rational_parts(&r)),
                Distance::Infinite => None,
            },
        )
    }

    /// Detachment distance with edge `(i, j)` removed; `inf` for bridges.
    fn edge_range(&self, i: u32, j: u32) -> PyResult<f64> {
        Ok(cost_to_float(
            &self.inner.edge_range(BlogId(i), BlogId(j)).map_err(core_err)?,
        ))
    }

    fn edge_range_fraction(&self, i: u32, j: u32) -> PyResult<Option<(String, String)>> {
        Ok(
            match self.inner.edge_range(BlogId(i), BlogId(j)).map_err(core_err)? {
                Distance::Finite(r) => Some(rational_parts(&r)),
                Distance::Infinite => None,
            },
        )
    }

    fn total_attention(&self, j: u32) -> PyResult<f64> {
        Ok(to_f64(
            &self.inner.total_attention(BlogId(j)).map_err(core_err)?,
        ))
    }

    fn total_attention_fraction(&self, j: u32) -> PyResult<(String, String)> {
        Ok(rational_parts(
            &self.inner.total_attention(BlogId(j)).map_err(core_err)?,
        ))
    }
}

fn bin_pair(bin: &DistanceBin) -> (String, String) {
    (bin.lo_label(), bin.hi_label())
}

fn windows_to_list<'py>(
    py: Python<'py>,
    windows: &[propensity::WindowTallies],
) -> PyResult<Bound<'py, PyList>> {
    let list = PyList::empty(py);
    for w in windows {
        let entry = PyDict::new(py);
        entry.set_item("window", w.k)?;
        entry.set_item("t_start", w.t_start)?;
        entry.set_item(
            "tallies",
            w.tallies
                .iter()
                .map(|t| (t.numerator, t.denominator))
                .collect::<Vec<_>>(),
        )?;
        entry.set_item("excluded_pairs", w.excluded_pairs)?;
        list.append(entry)?;
    }
    Ok(list)
}

fn summary_to_list<'py>(
    py: Python<'py>,
    summary: &[propensity::BinSummary],
) -> PyResult<Bound<'py, PyList>> {
    let list = PyList::empty(py);
    for s in summary {
        let entry = PyDict::new(py);
        entry.set_item("mean", s.mean)?;
        entry.set_item("normalized_mean", s.normalized_mean)?;
        entry.set_item("ci95_halfwidth", s.ci95_halfwidth)?;
        entry.set_item("windows_with_data", s.windows_with_data)?;
        list.append(entry)?;
    }
    Ok(list)
}

fn curve_to_dict<'py>(py: Python<'py>, curve: &PropensityCurve) -> PyResult<Bound<'py, PyDict>> {
    let out = PyDict::new(py);
    out.set_item("bins", curve.bins.iter().map(bin_pair).collect::<Vec<_>>())?;
    out.set_item("windows", windows_to_list(py, &curve.windows)?)?;
    out.set_item("summary", summary_to_list(py, &curve.summary)?)?;
    Ok(out)
}

fn grid_to_dict<'py>(py: Python<'py>, grid: &PropensityGrid) -> PyResult<Bound<'py, PyDict>> {
    let out = PyDict::new(py);
    out.set_item(
        "social_bins",
        grid.social_bins.iter().map(bin_pair).collect::<Vec<_>>(),
    )?;
    out.set_item(
        "delta_bins",
        grid.delta_bins.iter().map(bin_pair).collect::<Vec<_>>(),
    )?;
    out.set_item("windows", windows_to_list(py, &grid.windows)?)?;
    out.set_item("summary", summary_to_list(py, &grid.summary)?)?;
    Ok(out)
}

/// Indexed event corpus with the full analysis surface.
#[pyclass]
struct Corpus {
    inner: TemporalCorpus,
}

#[pymethods]
impl Corpus {
    /// Ingest a line-delimited event stream observed over `days` days.
    #[staticmethod]
    #[pyo3(signature = (events, days, terms=None))]
    fn from_events(events: &str, days: u32, terms: Option<Vec<String>>) -> PyResult<Self> {
        Ok(Corpus {
            inner: ingest_str(events, days, terms.as_deref()).map_err(core_err)?,
        })
    }

    /// Load an index file written by `save` (or `cosoc ingest`).
    #[staticmethod]
    fn load(path: &str) -> PyResult<Self> {
        let file = std::fs::File::open(path).map_err(|e| PyIOError::new_err(e.to_string()))?;
        Ok(Corpus {
            inner: TemporalCorpus::load_index(std::io::BufReader::new(file)).map_err(core_err)?,
        })
    }

    fn save(&self, path: &str) -> PyResult<()> {
        let mut out = Vec::new();
        self.inner.save_index(&mut out).map_err(core_err)?;
        std::fs::write(path, out).map_err(|e| PyIOError::new_err(e.to_string()))
    }

    fn horizon(&self) -> u32 {
        self.inner.horizon()
    }

    fn blogs(&self) -> Vec<String> {
        self.inner.blogs().names().to_vec()
    }

    fn terms(&self) -> Vec<String> {
        self.inner.terms().names().to_vec()
    }

    fn urls(&self) -> Vec<String> {
        self.inner.urls().names().to_vec()
    }

    fn blog_index(&self, name: &str) -> Option<u32> {
        self.inner.blogs().lookup(name)
    }

    fn counts<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let stats = self.inner.stats();
        let out = PyDict::new(py);
        out.set_item("blogs", self.inner.num_blogs())?;
        out.set_item("posts", stats.posts)?;
        out.set_item("dated_edges", stats.dated_edges)?;
        out.set_item("unique_pairs", stats.unique_pairs)?;
        out.set_item("unique_triples", stats.unique_triples)?;
        out.set_item("urls", self.inner.urls().len())?;
        out.set_item("self_citations_dropped", stats.self_citations_dropped)?;
        out.set_item("short_urls_dropped", stats.short_urls_dropped)?;
        Ok(out)
    }

    /// Ordered `(citing, cited)` blog-name pairs for day `t`.
    fn daily_citations(&self, t: u32) -> PyResult<Vec<(String, String)>> {
        Ok(self
            .inner
            .daily_citations(t)
            .map_err(core_err)?
            .into_iter()
            .map(|(i, j)| {
                (
                    self.inner.blogs().name(i.0).to_owned(),
                    self.inner.blogs().name(j.0).to_owned(),
                )
            })
            .collect())
    }

    /// Aggregated citation graph at cut-off `t`; node ids match
    /// `blog_index`.
    fn graph(&self, t: u32) -> PyResult<Graph> {
        Ok(Graph {
            inner: aggregate(&self.inner, t).map_err(core_err)?,
        })
    }

    /// Semantic distance between two blogs at cut-off `t`; None when either
    /// adjusted profile is all-zero.
    fn semantic_distance(&self, t: u32, i: &str, j: &str) -> PyResult<Option<f64>> {
        let bi = self
            .blog_index(i)
            .ok_or_else(|| PyValueError::new_err(format!("unknown blog `{i}`")))?;
        let bj = self
            .blog_index(j)
            .ok_or_else(|| PyValueError::new_err(format!("unknown blog `{j}`")))?;
        let adjusted = tfidf_adjust(&build_profiles(&self.inner, t).map_err(core_err)?);
        adjusted.distance(BlogId(bi), BlogId(bj)).map_err(core_err)
    }

    /// Propensity curve; kind is one of "social", "detachment", "semantic".
    #[pyo3(signature = (kind, t0=60, window_len=7, windows=8, max_d=8, delta_bin="0.1", bin_edges=None))]
    #[allow(clippy::too_many_arguments)]
    fn propensity<'py>(
        &self,
        py: Python<'py>,
        kind: &str,
        t0: u32,
        window_len: u32,
        windows: u32,
        max_d: u32,
        delta_bin: &str,
        bin_edges: Option<Vec<String>>,
    ) -> PyResult<Bound<'py, PyDict>> {
        let scheme = WindowScheme {
            t0,
            window_len,
            windows,
        };
        let curve = match kind {
            "social" => propensity::propensity_social(&self.inner, &scheme, max_d),
            "detachment" => {
                let edges = match bin_edges {
                    Some(list) => list
                        .iter()
                        .map(|s| {
                            parse_rational(s).ok_or_else(|| {
                                cosoc_core::Error::InvalidParameter(format!(
                                    "unparseable bin edge `{s}`"
                                ))
                            })
                        })
                        .collect::<Result<Vec<_>, _>>()
                        .map_err(core_err)?,
                    None => propensity::default_detachment_bin_edges(),
                };
                propensity::propensity_detachment(&self.inner, &scheme, &edges)
            }
            "semantic" => {
                let width = parse_rational(delta_bin).ok_or_else(|| {
                    PyValueError::new_err(format!("unparseable delta bin width `{delta_bin}`"))
                })?;
                propensity::propensity_semantic(&self.inner, &scheme, &width)
            }
            other => {
                return Err(PyValueError::new_err(format!(
                    "unknown propensity kind `{other}` (use social|detachment|semantic, or propensity_2d)"
                )))
            }
        }
        .map_err(core_err)?;
        curve_to_dict(py, &curve)
    }

    /// Two-dimensional (social x semantic) propensity grid.
    #[pyo3(signature = (t0=60, window_len=7, windows=8, max_d=8, delta_bin="0.2"))]
    fn propensity_2d<'py>(
        &self,
        py: Python<'py>,
        t0: u32,
        window_len: u32,
        windows: u32,
        max_d: u32,
        delta_bin: &str,
    ) -> PyResult<Bound<'py, PyDict>> {
        let scheme = WindowScheme {
            t0,
            window_len,
            windows,
        };
        let width = parse_rational(delta_bin).ok_or_else(|| {
            PyValueError::new_err(format!("unparseable delta bin width `{delta_bin}`"))
        })?;
        let grid =
            propensity::propensity_2d(&self.inner, &scheme, max_d, &width).map_err(core_err)?;
        grid_to_dict(py, &grid)
    }

    /// Diffusion subgraph of one URL: nodes, dated edges and FIRST/SECOND
    /// orders.
    fn diffusion_subgraph<'py>(&self, py: Python<'py>, url: &str) -> PyResult<Bound<'py, PyDict>> {
        let id = self
            .inner
            .urls()
            .lookup(cosoc_core::corpus::normalize_url(url))
            .ok_or_else(|| PyValueError::new_err(format!("unknown url `{url}`")))?;
        let sub = diffusion::extract_subgraph(&self.inner, UrlId(id)).map_err(core_err)?;
        let orders = sub.classify();
        let out = PyDict::new(py);
        out.set_item("url", self.inner.urls().name(id))?;
        out.set_item(
            "nodes",
            sub.nodes
                .iter()
                .map(|b| self.inner.blogs().name(b.0).to_owned())
                .collect::<Vec<_>>(),
        )?;
        out.set_item(
            "edges",
            sub.edges
                .iter()
                .zip(&orders)
                .map(|(e, o)| {
                    (
                        self.inner.blogs().name(e.source.0).to_owned(),
                        self.inner.blogs().name(e.target.0).to_owned(),
                        e.day,
                        match o {
                            diffusion::TransmissionOrder::First => "first",
                            diffusion::TransmissionOrder::Second => "second",
                        },
                    )
                })
                .collect::<Vec<_>>(),
        )?;
        out.set_item("trivial", sub.is_trivial())?;
        Ok(out)
    }

    fn diffusion_counts<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let analysis = diffusion::all_subgraphs(&self.inner).map_err(core_err)?;
        let out = PyDict::new(py);
        out.set_item("total_urls", analysis.counts.total_urls)?;
        out.set_item("trivial", analysis.counts.trivial)?;
        out.set_item("non_trivial", analysis.counts.non_trivial)?;
        out.set_item("transmission_links", analysis.counts.transmission_links)?;
        Ok(out)
    }

    /// Node and edge histograms over the non-trivial diffusion subgraphs.
    fn size_distribution(&self) -> PyResult<(BTreeMap<usize, u64>, BTreeMap<usize, u64>)> {
        let analysis = diffusion::all_subgraphs(&self.inner).map_err(core_err)?;
        let dist = diffusion::size_distribution(&analysis);
        Ok((dist.nodes, dist.edges))
    }

    /// Mean FIRST-transmission counts per initiator, grouped by total
    /// attention quantile.
    #[pyo3(signature = (quantiles=8))]
    fn attention_table<'py>(
        &self,
        py: Python<'py>,
        quantiles: u32,
    ) -> PyResult<Bound<'py, PyList>> {
        let analysis = diffusion::all_subgraphs(&self.inner).map_err(core_err)?;
        let rows = diffusion::first_transmissions_vs_attention(&self.inner, &analysis, quantiles)
            .map_err(core_err)?;
        let list = PyList::empty(py);
        for r in rows {
            let entry = PyDict::new(py);
            entry.set_item("quantile", r.group)?;
            entry.set_item("alpha_lo", r.alpha_lo.as_ref().map(to_f64))?;
            entry.set_item("alpha_hi", r.alpha_hi.as_ref().map(to_f64))?;
            entry.set_item("initiators", r.records)?;
            entry.set_item("mean_first", r.mean_first)?;
            entry.set_item("mean_first_nonzero", r.mean_first_nonzero)?;
            list.append(entry)?;
        }
        Ok(list)
    }

    /// Mean SECOND-transmission counts per FIRST edge, grouped by edge-range
    /// quantile; the bridge group is labeled "inf".
    #[pyo3(signature = (quintiles=5))]
    fn edge_range_table<'py>(
        &self,
        py: Python<'py>,
        quintiles: u32,
    ) -> PyResult<Bound<'py, PyList>> {
        let analysis = diffusion::all_subgraphs(&self.inner).map_err(core_err)?;
        let rows =
            diffusion::second_transmissions_vs_edge_range(&self.inner, &analysis, quintiles)
                .map_err(core_err)?;
        let list = PyList::empty(py);
        for r in rows {
            let entry = PyDict::new(py);
            match r.group {
                diffusion::RangeGroup::Quantile(q) => entry.set_item("quintile", q.to_string())?,
                diffusion::RangeGroup::Infinite => entry.set_item("quintile", "inf")?,
            }
            entry.set_item("r_lo", r.r_lo.as_ref().map(to_f64))?;
            entry.set_item("r_hi", r.r_hi.as_ref().map(to_f64))?;
            entry.set_item("records", r.records)?;
            entry.set_item("mean_second", r.mean_second)?;
            list.append(entry)?;
        }
        Ok(list)
    }
}

/// Generate a synthetic event stream; returns the line-delimited text.
#[pyfunction]
#[pyo3(signature = (n_blogs, days, seed, latent_dim=12, posts_per_day=0.5, beta_social=0.0, beta_semantic=0.0, relay_prob=0.2))]
#[allow(clippy::too_many_arguments)]
fn generate(
    n_blogs: u32,
    days: u32,
    seed: u64,
    latent_dim: u32,
    posts_per_day: f64,
    beta_social: f64,
    beta_semantic: f64,
    relay_prob: f64,
) -> PyResult<String> {
    let config = synthgen::GeneratorConfig {
        n_blogs,
        days,
        latent_dim,
        posts_per_day,
        beta_social,
        beta_semantic,
        relay_prob,
        seed,
    };
    Ok(synthgen::generate(&config).map_err(core_err)?.event_lines())
}

#[pyfunction]
fn version() -> &'static str {
    cosoc_core::VERSION
}

#[pymodule]
fn cosoc_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Corpus>()?;
    m.add_class::<Graph>()?;
    m.add_function(wrap_pyfunction!(generate, m)?)?;
    m.add_function(wrap_pyfunction!(version, m)?)?;
    Ok(())
}
