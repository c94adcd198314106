use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::seq::SliceRandom;
use serde::Serialize;
use serde_json::{json, Value};

use rsbm::graphgen::{component_rng, sample_instance, SamplerOptions};
use rsbm::io::{load_edge_list, load_labels, save_edge_list, save_labels, EdgeListHeader};
use rsbm::model::{
    default_saw_depth, predicted_saw_eigenvalue1, tv_rates, z_sequence, DerivedQuantities,
};
use rsbm::recovery::{majority_iterate, overlap, spectral_recover, RecoverOptions};
use rsbm::rigidity::{
    edge_expansion_check, min_bisection_bruteforce, regular_partitions, rsbm_membership,
};
use rsbm::saw::{build_saw, tangle_audit};
use rsbm::spectral::{spectral_gap, top_eigenpairs, top_eigenpairs_op, EigenOptions};
use rsbm::{Graph, Labeling, RecoveryMethod, RsbmParams};

use crate::args::*;
use crate::error::{CliError, Result, WithPath};
use crate::SCHEMA_VERSION;

/// RNG stream used for error injection.
const STREAM_ERROR_INJECTION: u64 = 5;

fn ms(start: Instant) -> f64 {
    (start.elapsed().as_secs_f64() * 1e6).round() / 1e3
}

fn eigen_options(a: &EigenArgs) -> Result<EigenOptions> {
    if !(a.tol > 0.0) {
        return Err(CliError::Validation(format!("--tol must be positive, got {}", a.tol)));
    }
    Ok(EigenOptions::default()
        .with_seed(a.eigen_seed)
        .with_tolerance(a.tol)
        .with_max_iter(a.max_iter))
}

fn warn_standing_assumption(p: &RsbmParams) {
    if p.d1.min(p.d2) < 3 {
        eprintln!(
            "warning: min(d1, d2) = {} is below the model's standing assumption min(d1, d2) >= 3",
            p.d1.min(p.d2)
        );
    }
}

/// Flips `round(eps * size)` uniformly chosen labels on each side.
pub fn inject_errors(planted: &Labeling, eps: f64, seed: u64) -> Result<Labeling> {
    if !(0.0..0.5).contains(&eps) {
        return Err(CliError::Validation(format!(
            "error injection fraction must lie in [0, 1/2), got {eps}"
        )));
    }
    let mut rng = component_rng(seed, STREAM_ERROR_INJECTION);
    let mut out = planted.clone();
    for sign in [1i8, -1] {
        let mut side: Vec<usize> = (0..planted.len()).filter(|&v| planted.get(v) == sign).collect();
        let k = (eps * side.len() as f64).round() as usize;
        side.shuffle(&mut rng);
        for &v in &side[..k] {
            out.flip(v);
        }
    }
    Ok(out)
}

fn fingerprint_hex(g: &Graph) -> String {
    format!("{:016x}", g.fingerprint())
}

fn graph_info(path: &Path, g: &Graph) -> Value {
    json!({
        "path": path.display().to_string(),
        "vertices": g.num_vertices(),
        "edges": g.num_edges(),
        "fingerprint": fingerprint_hex(g),
    })
}

fn load_graph(path: &Path) -> Result<(Graph, Option<EdgeListHeader>)> {
    load_edge_list(path).at(path)
}

fn load_planted(path: Option<&PathBuf>, g: &Graph) -> Result<Option<Labeling>> {
    let Some(p) = path else { return Ok(None) };
    let l = load_labels(p).at(p)?;
    if l.len() != g.num_vertices() {
        return Err(CliError::File {
            path: p.clone(),
            source: rsbm::Error::LengthMismatch {
                expected: g.num_vertices(),
                actual: l.len(),
            },
        });
    }
    Ok(Some(l))
}

fn header_params(h: &Option<EdgeListHeader>) -> Option<RsbmParams> {
    h.as_ref().map(|h| RsbmParams::unchecked(h.n, h.d1, h.d2))
}

pub fn generate(a: &GenerateArgs) -> Result<String> {
    let params = RsbmParams::sampleable(a.n, a.d1, a.d2)?;
    warn_standing_assumption(&params);
    let opts = SamplerOptions {
        pairing: a.pairing.into(),
        max_rejects: a.max_rejects,
    };
    let inst = sample_instance(&params, a.seed, a.sampler.into(), &opts)?;
    save_edge_list(&a.out, &inst.graph, Some(&EdgeListHeader::of(&inst))).at(&a.out)?;
    if let Some(p) = &a.labels {
        save_labels(p, &inst.labels).at(p)?;
    }
    Ok(format!(
        "wrote {} ({} vertices, {} edges, sampler={}, seed={}, attempts={}){}",
        a.out.display(),
        inst.graph.num_vertices(),
        inst.graph.num_edges(),
        inst.sampler.name(),
        inst.seed,
        inst.attempts,
        a.labels
            .as_ref()
            .map(|p| format!(" and {}", p.display()))
            .unwrap_or_default()
    ))
}

#[derive(Serialize)]
struct RecoverReport {
    schema_version: &'static str,
    command: &'static str,
    graph: Value,
    method: RecoveryMethod,
    #[serde(skip_serializing_if = "Option::is_none")]
    l: Option<usize>,
    seeds: Value,
    rounds: usize,
    converged: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    lambda2: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    per_round_errors: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    agreement: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    errors: Option<usize>,
    warnings: Vec<String>,
    labels_out: String,
    timings: Value,
}

fn default_labels_out(graph: &Path) -> PathBuf {
    graph.with_extension("recovered.lab")
}

pub fn recover(a: &RecoverArgs) -> Result<String> {
    let t_load = Instant::now();
    let (graph, header) = load_graph(&a.graph)?;
    let planted = load_planted(a.labels.as_ref(), &graph)?;
    let load_ms = ms(t_load);
    let eigen = eigen_options(&a.eigen)?;
    let params = header_params(&header);
    let method: RecoveryMethod = a.method.into();
    let max_rounds = a
        .max_rounds
        .unwrap_or_else(|| rsbm::recovery::default_max_rounds(graph.num_vertices()));
    if max_rounds == 0 {
        return Err(CliError::Validation("--max-rounds must be at least 1".into()));
    }
    let l = match method {
        RecoveryMethod::SpectralSaw => {
            Some(a.l.unwrap_or_else(|| params.as_ref().map_or(1, default_saw_depth)))
        }
        _ => None,
    };

    let t_run = Instant::now();
    let mut injection_seed = None;
    let result = match method {
        RecoveryMethod::MajorityOnly => {
            let init = match (&a.init, a.error_injection, &planted) {
                (Some(p), _, _) => {
                    let l = load_labels(p).at(p)?;
                    if l.len() != graph.num_vertices() {
                        return Err(CliError::File {
                            path: p.clone(),
                            source: rsbm::Error::LengthMismatch {
                                expected: graph.num_vertices(),
                                actual: l.len(),
                            },
                        });
                    }
                    l
                }
                (None, Some(eps), Some(pl)) => {
                    injection_seed = Some(a.seed);
                    inject_errors(pl, eps, a.seed)?
                }
                _ => {
                    return Err(CliError::Validation(
                        "majority_only needs --init, or --labels with --error-injection".into(),
                    ))
                }
            };
            majority_iterate(&graph, &init, max_rounds, planted.as_ref())?
        }
        _ => {
            let opts = RecoverOptions {
                eigen,
                saw_depth: l.unwrap_or(1),
                balanced_rounding: a.balanced,
                max_rounds: Some(max_rounds),
                params,
            };
            spectral_recover(&graph, method, &opts, planted.as_ref())?
        }
    };
    let recover_ms = ms(t_run);

    let labels_out = a.labels_out.clone().unwrap_or_else(|| default_labels_out(&a.graph));
    save_labels(&labels_out, &result.final_labels).at(&labels_out)?;
    let errors = planted
        .as_ref()
        .map(|p| overlap(p, &result.final_labels).map(|o| o.errors))
        .transpose()?;
    let mut seeds = json!({ "eigen": a.eigen.eigen_seed });
    if let Some(s) = injection_seed {
        seeds["error_injection"] = json!(s);
    }
    let report = RecoverReport {
        schema_version: SCHEMA_VERSION,
        command: "recover",
        graph: graph_info(&a.graph, &graph),
        method,
        l,
        seeds,
        rounds: result.rounds_used,
        converged: result.converged,
        lambda2: result.lambda2,
        per_round_errors: result.per_round_errors.clone(),
        agreement: result.agreement,
        errors,
        warnings: result.warnings.clone(),
        labels_out: labels_out.display().to_string(),
        timings: json!({ "load_ms": load_ms, "recover_ms": recover_ms }),
    };
    Ok(serde_json::to_string_pretty(&report)?)
}

fn degrees_for(a: &VerifyArgs, header: &Option<EdgeListHeader>) -> Result<(usize, usize)> {
    let d1 = a.d1.or(header.as_ref().map(|h| h.d1));
    let d2 = a.d2.or(header.as_ref().map(|h| h.d2));
    match (d1, d2) {
        (Some(d1), Some(d2)) => Ok((d1, d2)),
        _ => Err(CliError::Validation(
            "--d1 and --d2 are required when the edge list has no header".into(),
        )),
    }
}

pub fn verify(a: &VerifyArgs) -> Result<String> {
    let (graph, header) = load_graph(&a.graph)?;
    let planted = load_planted(a.labels.as_ref(), &graph)?;
    let start = Instant::now();
    let (check, certificate) = match a.check {
        Check::Uniqueness => {
            let (d1, _) = degrees_for(a, &header)?;
            let c = regular_partitions(&graph, d1, planted.as_ref())?;
            ("uniqueness", serde_json::to_value(c)?)
        }
        Check::Minbisect => {
            let c = min_bisection_bruteforce(&graph, planted.as_ref())?;
            ("minbisect", serde_json::to_value(c)?)
        }
        Check::Membership => {
            let (d1, d2) = degrees_for(a, &header)?;
            let m = rsbm_membership(&graph, d1, d2)?;
            ("membership", serde_json::to_value(m)?)
        }
        Check::Tanglefree => {
            let l = a
                .l
                .unwrap_or_else(|| header_params(&header).as_ref().map_or(1, default_saw_depth));
            let t = tangle_audit(&graph, l);
            let v = json!({
                "l": t.l,
                "tangle_free": t.tangle_free,
                "x_l": t.x_l,
                "max_excess": t.max_excess(),
                "excess_histogram": t.excess_histogram(),
                "tree_vertices": t.tree_vertices.len(),
            });
            ("tanglefree", v)
        }
        Check::Expansion => {
            let (gamma, measured) = match a.gamma {
                Some(g) => (g, false),
                None => (spectral_gap(&graph, &eigen_options(&a.eigen)?)?, true),
            };
            let r = edge_expansion_check(&graph, gamma)?;
            let mut v = serde_json::to_value(&r)?;
            v["gamma_measured"] = json!(measured);
            v["passed"] = json!(r.passed());
            ("expansion", v)
        }
    };
    let out = json!({
        "schema_version": SCHEMA_VERSION,
        "command": "verify",
        "check": check,
        "graph": graph_info(&a.graph, &graph),
        "certificate": certificate,
        "timings": { "check_ms": ms(start) },
    });
    Ok(serde_json::to_string_pretty(&out)?)
}

pub fn formulas(a: &FormulasArgs) -> Result<String> {
    if a.d1 == 0 || a.d2 == 0 {
        return Err(CliError::Validation("d1 and d2 must be positive".into()));
    }
    if a.l == 0 {
        return Err(CliError::Validation("--l must be at least 1".into()));
    }
    warn_standing_assumption(&RsbmParams::unchecked(1, a.d1, a.d2));
    let q = DerivedQuantities::compute(a.d1, a.d2);
    let z = z_sequence(a.d1, a.d2, a.l)?;
    let lambda1 = predicted_saw_eigenvalue1(a.d1, a.d2, a.l)?;
    let (r1, r2) = tv_rates(a.d1, a.d2);
    if a.json {
        let out = json!({
            "schema_version": SCHEMA_VERSION,
            "command": "formulas",
            "d1": a.d1,
            "d2": a.d2,
            "l": a.l,
            "spectral_condition": q.spectral_condition,
            "majority_condition": q.majority_condition,
            "roots": q.roots,
            "z": z.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
            "lambda1": lambda1.to_string(),
            "tv_rate1": r1,
            "tv_rate2": r2,
        });
        return Ok(serde_json::to_string_pretty(&out)?);
    }
    let diff = a.d1 as i64 - a.d2 as i64;
    let mut lines = vec![
        format!("d1 = {}, d2 = {}", a.d1, a.d2),
        format!(
            "spectral_condition = {}  ((d1-d2)^2 = {} vs 4(d1+d2-1) = {})",
            q.spectral_condition,
            diff * diff,
            4 * (a.d1 + a.d2 - 1)
        ),
        format!("majority_condition = {}  (d1 > d2 + 4)", q.majority_condition),
    ];
    match &q.roots {
        Some(r) => {
            lines.push(format!("alpha = {:.6}", r.alpha));
            lines.push(format!("beta = {:.6}", r.beta));
            lines.push(format!("A_const = {:.6}", r.a_const));
            lines.push(format!("B_const = {:.6}", r.b_const));
        }
        None => lines.push("alpha, beta: not real and distinct".into()),
    }
    let zs: Vec<String> = z.iter().map(|x| x.to_string()).collect();
    lines.push(format!("z = [{}]", zs.join(", ")));
    lines.push(format!("lambda1(l={}) = {}", a.l, lambda1));
    lines.push(format!("tv_rate1 = {r1:.6}"));
    lines.push(format!("tv_rate2 = {r2:.6}"));
    Ok(lines.join("\n"))
}

pub fn spectrum(a: &SpectrumArgs) -> Result<String> {
    let (graph, _) = load_graph(&a.graph)?;
    let opts = eigen_options(&a.eigen)?;
    let start = Instant::now();
    let (matrix, s) = match a.l {
        None => ("adjacency", top_eigenpairs(&graph, a.k, &opts)?),
        Some(l) => {
            let saw = build_saw(&graph, l)?;
            ("saw", top_eigenpairs_op(&saw, a.k, &opts)?)
        }
    };
    let out = json!({
        "schema_version": SCHEMA_VERSION,
        "command": "spectrum",
        "graph": graph_info(&a.graph, &graph),
        "matrix": matrix,
        "l": a.l,
        "spectrum": s,
        "timings": { "spectrum_ms": ms(start) },
    });
    Ok(serde_json::to_string_pretty(&out)?)
}
