use std::fs;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use avgjohn_core::embed::EmbeddingMap;
use avgjohn_core::graph::bfs_metric;
use avgjohn_core::markov::{graph_kernel, lazy};
use avgjohn_core::metric::distance_matrix;
use avgjohn_core::{FiniteMetricSpace, Graph, GraphFamily, NormedHost, PointConfig, ProbabilityWeights, StochasticKernel};
use serde::de::DeserializeOwned;
use serde_json::Value;

use crate::args::{FamilyName, GraphArgs, KernelArgs, MetricArgs};

/// Parses `path` as `T`. A report written by this tool is accepted too: its
/// `result` (or `result.<field>`) is used. Syntax errors keep their line and
/// column.
pub fn load<T: DeserializeOwned>(path: &Path, field: &str) -> Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    let direct = serde_json::from_str::<T>(&text);
    let err = match direct {
        Ok(v) => return Ok(v),
        Err(e) => e,
    };
    if let Ok(Value::Object(report)) = serde_json::from_str::<Value>(&text) {
        if report.get("tool").and_then(Value::as_str) == Some("avgjohn") {
            if let Some(result) = report.get("result") {
                let inner = result.get(field).unwrap_or(result);
                return serde_json::from_value(inner.clone())
                    .with_context(|| format!("{}: report result does not hold a {field}", path.display()));
            }
        }
    }
    Err(anyhow!(err).context(format!("{}: invalid {field} JSON", path.display())))
}

pub fn load_graph(path: &Path) -> Result<Graph> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    if let Ok(family) = serde_json::from_str::<GraphFamily>(&text) {
        return Ok(family.build()?);
    }
    load(path, "graph")
}

fn need<T>(v: Option<T>, flag: &str, family: &str) -> Result<T> {
    v.ok_or_else(|| anyhow!("--family {family} needs --{flag}"))
}

impl GraphArgs {
    pub fn is_set(&self) -> bool {
        self.graph.is_some() || self.family.is_some()
    }

    pub fn builder(&self, seed: u64) -> Result<Option<GraphFamily>> {
        let Some(family) = self.family else {
            return Ok(None);
        };
        Ok(Some(match family {
            FamilyName::Hypercube => GraphFamily::Hypercube {
                k: need(self.k, "k", "hypercube")?,
            },
            FamilyName::Cycle => GraphFamily::Cycle {
                n: need(self.n, "n", "cycle")?,
            },
            FamilyName::Complete => GraphFamily::Complete {
                n: need(self.n, "n", "complete")?,
            },
            FamilyName::RandomRegular => GraphFamily::RandomRegular {
                n: need(self.n, "n", "random-regular")?,
                degree: need(self.degree, "degree", "random-regular")?,
                seed,
            },
            FamilyName::CayleySl => GraphFamily::CayleySl {
                k: need(self.k, "k", "cayley-sl")? as usize,
                q: need(self.field, "field", "cayley-sl")?,
            },
        }))
    }

    pub fn resolve(&self, seed: u64) -> Result<Graph> {
        if let Some(path) = &self.graph {
            return load_graph(path);
        }
        match self.builder(seed)? {
            Some(family) => Ok(family.build()?),
            None => bail!("give a graph with --graph or --family"),
        }
    }
}

impl KernelArgs {
    /// The kernel, plus the graph it came from when there is one.
    pub fn resolve(&self, seed: u64) -> Result<(StochasticKernel, Option<Graph>)> {
        let (k, g) = match &self.kernel {
            Some(path) => (load::<StochasticKernel>(path, "kernel")?, None),
            None if self.graph.is_set() => {
                let g = self.graph.resolve(seed)?;
                (graph_kernel(&g)?, Some(g))
            }
            None => bail!("give a kernel with --kernel, --graph or --family"),
        };
        Ok((if self.lazy { lazy(&k) } else { k }, g))
    }
}

pub fn load_weights(path: Option<&Path>, n: usize) -> Result<ProbabilityWeights> {
    let w = match path {
        Some(p) => load::<ProbabilityWeights>(p, "weights")?,
        None => ProbabilityWeights::uniform(n)?,
    };
    if w.len() != n {
        bail!("weights have {} entries for {n} points", w.len());
    }
    Ok(w)
}

impl MetricArgs {
    pub fn is_set(&self) -> bool {
        self.metric.is_some() || self.config.is_some()
    }

    pub fn resolve(&self) -> Result<(FiniteMetricSpace, ProbabilityWeights)> {
        let m = match (&self.metric, &self.config) {
            (Some(p), _) => load::<FiniteMetricSpace>(p, "metric")?,
            (None, Some(p)) => distance_matrix(&load::<PointConfig>(p, "config")?),
            (None, None) => bail!("give a metric with --metric or --config"),
        };
        let w = load_weights(self.weights.as_deref(), m.n())?;
        Ok((m, w))
    }
}

/// Metric for commands that fall back to the graph distance.
pub fn metric_or_graph(metric: &MetricArgs, graph: Option<&Graph>) -> Result<FiniteMetricSpace> {
    if metric.is_set() {
        return Ok(metric.resolve()?.0);
    }
    match graph {
        Some(g) => Ok(bfs_metric(g)?.0),
        None => bail!("give --metric or --config, or a graph whose metric to use"),
    }
}

pub fn load_map(path: &Path) -> Result<EmbeddingMap> {
    load(path, "map")
}

/// `"inf"` or a finite exponent.
pub fn parse_host(text: &str, dim: usize) -> Result<NormedHost> {
    if text.eq_ignore_ascii_case("inf") {
        return Ok(NormedHost::linf(dim));
    }
    let p: f64 = text
        .parse()
        .with_context(|| format!("host exponent `{text}` is neither a number nor `inf`"))?;
    Ok(NormedHost::lp(p, dim)?)
}
