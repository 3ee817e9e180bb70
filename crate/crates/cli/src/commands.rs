use anyhow::{bail, Result};
use avgjohn_core::boost::extrapolation_witness_check;
use avgjohn_core::certify::{
    dim_certificate, enflo_cube_check, enflo_lower, expander_avg_lower, general_target_lower, hypercube_identity,
    Hypothesis,
};
use avgjohn_core::embed::{
    frechet_map, line_embed, self_embed_holder_bound, sl_character_embed, snowflake_self_embed, transfer_snowflake,
    DistortionSummary,
};
use avgjohn_core::gap::{
    gamma_euclidean_exact, gamma_lower_bound_search, markov_type_ratio, scalar_extrapolation_check,
    vector_extrapolation_bound,
};
use avgjohn_core::graph::bfs_metric;
use avgjohn_core::markov::spectrum;
use avgjohn_core::mazur::{eta, eta_numeric, psi_omega};
use avgjohn_core::PointConfig;
use serde::Serialize;
use serde_json::json;

use crate::args::*;
use crate::battery;
use crate::input::{load, load_map, load_weights, metric_or_graph, parse_host};
use crate::output::Outcome;

/// Default number of random starts for gap searches.
const SEARCH_STARTS: usize = 32;
/// Default iteration cap per start of the centering solver.
const SOLVER_ITERATIONS: usize = 200;

pub fn run(cli: &Cli) -> Result<Outcome> {
    let seed = cli.seed;
    match &cli.command {
        Command::GenGraph(a) => {
            let g = a.resolve(seed)?;
            let diameter = if g.is_connected() { Some(bfs_metric(&g)?.1) } else { None };
            Outcome::plain(&json!({
                "graph": g,
                "family": a.builder(seed)?,
                "edge_count": g.edges().len(),
                "connected": g.is_connected(),
                "diameter": diameter,
            }))
        }
        Command::Spectrum(a) => Outcome::plain(&spectrum(&a.resolve(seed)?.0)?),
        Command::GammaEst(a) => {
            let (k, _) = a.kernel.resolve(seed)?;
            let host = parse_host(&a.host, a.dim)?;
            let budget = cli.budget.unwrap_or(SEARCH_STARTS);
            let search = gamma_lower_bound_search(&k, &host, a.p, budget, seed)?;
            Outcome::plain(&json!({
                "search": search,
                "budget": budget,
                "euclidean_exact": gamma_euclidean_exact(&k)?,
            }))
        }
        Command::Mtype(a) => {
            let (k, g) = a.kernel.resolve(seed)?;
            let m = metric_or_graph(&a.metric, g.as_ref())?;
            Outcome::plain(&markov_type_ratio(&k, &m, a.p, a.steps)?)
        }
        Command::Extrapolate(a) => {
            let (k, _) = a.kernel.resolve(seed)?;
            match (&a.config, &a.values) {
                (Some(c), _) => Outcome::plain(&vector_extrapolation_bound(&k, &load(c, "config")?, a.q)?),
                (None, Some(v)) => {
                    let values: Vec<f64> = load(v, "values")?;
                    Outcome::plain(&scalar_extrapolation_check(&k, &values, a.beta)?)
                }
                (None, None) => bail!("give --config or --values"),
            }
        }
        Command::Boost(a) => {
            let (k, _) = a.kernel.resolve(seed)?;
            let x: PointConfig = load(&a.config, "config")?;
            let max_iter = cli.budget.unwrap_or(SOLVER_ITERATIONS);
            Outcome::plain(&extrapolation_witness_check(&k, &x, a.p, a.q, cli.tol, max_iter, seed)?)
        }
        Command::SelfEmbed(a) => {
            let x: PointConfig = load(&a.config, "config")?;
            let mu = load_weights(a.weights.as_deref(), x.len())?;
            let s = snowflake_self_embed(&x, &mu, a.p, a.omega)?;
            Outcome::plain(&json!({
                "embedding": s,
                "bound": self_embed_holder_bound(a.p, a.omega)?,
            }))
        }
        Command::Transfer(a) => {
            let f = match &a.map {
                Some(path) => load_map(path)?,
                None => {
                    let (m, w) = a.metric.resolve()?;
                    frechet_map(&m, &w)?
                }
            };
            Outcome::plain(&transfer_snowflake(&f, a.p, a.q, a.omega)?)
        }
        Command::LineEmbed(a) => {
            let (m, w) = a.metric.resolve()?;
            Outcome::plain(&line_embed(&m, &w, a.q)?)
        }
        Command::CertifyDim(a) => {
            let (k, _) = a.kernel.resolve(seed)?;
            let x: PointConfig = load(&a.config, "config")?;
            Outcome::certificate(dim_certificate(&x, &k, a.p, cli.constant)?)
        }
        Command::ExpanderBound(a) => {
            let g = a.graph.resolve(seed)?;
            let hypothesis = match a.hypothesis {
                HypothesisName::Holder => Hypothesis::Holder,
                HypothesisName::Sobolev => Hypothesis::Sobolev,
            };
            let main = expander_avg_lower(&g, a.omega, hypothesis)?;
            match (a.p, a.q) {
                (Some(p), Some(q)) => {
                    let general = general_target_lower(&g, a.omega, p, q)?;
                    Ok(Outcome::Certificates {
                        result: json!({ "bound": main.bound, "certificate": main, "general_target": general }),
                        rows: vec![main, general],
                    })
                }
                _ => Ok(Outcome::Certificates {
                    result: json!({ "bound": main.bound, "certificate": main }),
                    rows: vec![main],
                }),
            }
        }
        Command::HypercubeEnflo(a) => {
            let f = match &a.map {
                Some(path) => load_map(path)?,
                None => hypercube_identity(a.k)?,
            };
            if !f.n().is_power_of_two() || f.n().trailing_zeros() != a.k {
                bail!("a map of {} points is not defined on the cube Q_{}", f.n(), a.k);
            }
            let check = enflo_cube_check(&f)?;
            let cert = enflo_lower(a.k, a.epsilon)?;
            Ok(Outcome::Certificates {
                result: json!({ "enflo": check, "certificate": cert }),
                rows: vec![cert],
            })
        }
        Command::Slk(a) => {
            let e = sl_character_embed(a.k, a.q, cli.constant)?;
            let summary = SlSummary {
                k: e.k,
                q: e.q,
                order: e.order,
                diameter: e.diameter,
                scale: e.scale,
                generator_displacement: e.generator_displacement,
                displacement_bound: e.displacement_bound,
                injective: e.injective,
                summary: e.summary,
                quadratic_summary: e.quadratic_summary,
            };
            if a.full {
                Outcome::plain(&json!({ "group": summary, "map": e.map }))
            } else {
                Outcome::plain(&json!({ "group": summary }))
            }
        }
        Command::Report => battery::run(seed, cli.tol),
        Command::Eta(a) => {
            let value = eta(a.p, a.omega)?;
            let closed = (a.p * a.omega >= 1.0).then(|| a.omega * 2f64.powf((1.0 - a.omega) / (a.p * a.omega)));
            Outcome::plain(&json!({
                "p": a.p,
                "omega": a.omega,
                "eta": value,
                "regime": if closed.is_some() { "closed_form" } else { "numeric" },
                "closed_form": closed,
                "numeric": eta_numeric(a.p, a.omega)?,
                "upper_constant": 2f64.powf(1.0 - a.omega),
            }))
        }
        Command::Psi(a) => Outcome::plain(&json!({
            "rho": a.rho,
            "omega": a.omega,
            "psi": psi_omega(a.rho, a.omega)?,
            "maximum": 2f64.powf(1.0 - a.omega),
        })),
    }
}

/// Everything of [`avgjohn_core::embed::SlEmbedding`] except the map itself.
#[derive(Serialize)]
struct SlSummary {
    k: usize,
    q: u32,
    order: usize,
    diameter: u32,
    scale: f64,
    generator_displacement: f64,
    displacement_bound: f64,
    injective: bool,
    summary: DistortionSummary,
    quadratic_summary: DistortionSummary,
}
