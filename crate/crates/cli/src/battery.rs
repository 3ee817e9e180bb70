//! The `report` subcommand: small reference experiments whose answers are
//! known in closed form, bundled into one report.

use anyhow::Result;
use avgjohn_core::boost::extrapolation_witness_check;
use avgjohn_core::certify::{dim_certificate, enflo_cube_check, enflo_lower, hypercube_identity};
use avgjohn_core::embed::sl_character_embed;
use avgjohn_core::graph::{complete, cycle, hypercube};
use avgjohn_core::markov::{graph_kernel, spectrum};
use avgjohn_core::mazur::eta;
use avgjohn_core::sample::{gaussian_config, seeded};
use avgjohn_core::{NormedHost, PointConfig};
use serde_json::{json, Value};

use crate::output::Outcome;

fn spectra() -> Result<Value> {
    let cases = [
        ("complete_8", complete(8)?, -1.0 / 7.0),
        ("cycle_16", cycle(16)?, (2.0 * std::f64::consts::PI / 16.0).cos()),
        ("hypercube_6", hypercube(6)?, 1.0 - 2.0 / 6.0),
    ];
    let mut out = serde_json::Map::new();
    for (name, g, analytic) in cases {
        let s = spectrum(&graph_kernel(&g)?)?;
        out.insert(
            name.into(),
            json!({ "lambda2": s.lambda2, "analytic": analytic, "error": (s.lambda2 - analytic).abs() }),
        );
    }
    Ok(Value::Object(out))
}

fn cube_config(k: u32) -> Result<PointConfig> {
    let pts = (0..1usize << k)
        .map(|x| (0..k).map(|i| f64::from(((x >> i) & 1) as u8)).collect())
        .collect();
    Ok(PointConfig::new(NormedHost::l1(k as usize), pts)?)
}

pub fn run(seed: u64, tol: f64) -> Result<Outcome> {
    let etas = [(2.0, 0.5), (3.0, 0.8), (1.0, 0.5), (1.0, 0.7), (0.5, 0.9)]
        .iter()
        .map(|&(p, w)| Ok(json!({ "p": p, "omega": w, "eta": eta(p, w)? })))
        .collect::<Result<Vec<_>>>()?;

    let cube_dim = dim_certificate(&cube_config(3)?, &graph_kernel(&hypercube(3)?)?, 1.0, 1.0)?;
    let cube_bounds = (4..=8).map(|k| enflo_lower(k, 0.25)).collect::<Result<Vec<_>, _>>()?;
    let enflo = enflo_cube_check(&hypercube_identity(4)?)?;

    let groups = [(2, 3), (2, 5), (3, 2)]
        .iter()
        .map(|&(k, q)| {
            let e = sl_character_embed(k, q, 1.0)?;
            Ok(json!({
                "k": k,
                "q": q,
                "order": e.order,
                "diameter": e.diameter,
                "generator_displacement": e.generator_displacement,
                "displacement_bound": e.displacement_bound,
                "avg_distortion": e.summary.certified_avg_distortion,
            }))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut rng = seeded(seed);
    let x = gaussian_config(&mut rng, NormedHost::l2(3), 8)?;
    let boost = extrapolation_witness_check(&graph_kernel(&cycle(8)?)?, &x, 1.0, 2.0, tol, 200, seed)?;

    let mut rows = vec![cube_dim.clone()];
    rows.extend(cube_bounds.iter().cloned());
    Ok(Outcome::Certificates {
        result: json!({
            "spectra": spectra()?,
            "eta": etas,
            "cube_dimension": cube_dim,
            "cube_snowflake_bounds": cube_bounds,
            "enflo_identity": enflo,
            "special_linear_groups": groups,
            "boost_cycle_8": {
                "passed": boost.passed,
                "lhs": boost.lhs,
                "rhs": boost.rhs,
                "residual": boost.boost.solution.residual,
                "centering": boost.boost.centering,
            },
        }),
        rows,
    })
}
