//! Majority dynamics and the spectral recovery pipeline.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, Labeling};
use crate::model::{spectral_condition, RsbmParams};
use crate::saw::saw_recover;
use crate::spectral::{second_eigenvector, EigenOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RecoveryMethod {
    SpectralAdjacency,
    SpectralSaw,
    MajorityOnly,
}

impl RecoveryMethod {
    pub fn name(self) -> &'static str {
        match self {
            RecoveryMethod::SpectralAdjacency => "spectral_adjacency",
            RecoveryMethod::SpectralSaw => "spectral_saw",
            RecoveryMethod::MajorityOnly => "majority_only",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.replace('-', "_").as_str() {
            "spectral_adjacency" | "adjacency" => Some(RecoveryMethod::SpectralAdjacency),
            "spectral_saw" | "saw" => Some(RecoveryMethod::SpectralSaw),
            "majority_only" | "majority" => Some(RecoveryMethod::MajorityOnly),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecoveryResult {
    pub method: RecoveryMethod,
    pub initial_labels: Labeling,
    pub final_labels: Labeling,
    /// Number of majority steps applied.
    pub rounds_used: usize,
    /// Errors (modulo global sign) of the initial labels and after each
    /// round; present only when planted labels were supplied.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub per_round_errors: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub agreement: Option<f64>,
    /// The last majority step left the labels unchanged.
    pub converged: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda2: Option<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

impl RecoveryResult {
    pub fn final_errors(&self) -> Option<usize> {
        self.per_round_errors.as_ref().and_then(|v| v.last().copied())
    }
}

fn check_len(graph: &Graph, labels: &Labeling) -> Result<()> {
    if labels.len() != graph.num_vertices() {
        return Err(Error::LengthMismatch {
            expected: graph.num_vertices(),
            actual: labels.len(),
        });
    }
    Ok(())
}

/// One synchronous majority update. A vertex whose neighbor sum is zero
/// keeps its label.
pub fn majority_step(graph: &Graph, labels: &Labeling) -> Result<Labeling> {
    check_len(graph, labels)?;
    let next: Vec<i8> = (0..graph.num_vertices())
        .map(|v| {
            let s: i64 = graph.neighbors(v).iter().map(|&u| labels.get(u) as i64).sum();
            match s.signum() {
                0 => labels.get(v),
                x => x as i8,
            }
        })
        .collect();
    Labeling::new(next)
}

/// `ceil(4 log2(2n)) + 10` for a graph on `2n` vertices.
pub fn default_max_rounds(num_vertices: usize) -> usize {
    (4.0 * (num_vertices.max(2) as f64).log2()).ceil() as usize + 10
}

/// Agreement up to a global sign flip.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Overlap {
    /// In `[1/2, 1]`.
    pub agreement: f64,
    pub errors: usize,
}

pub fn overlap(a: &Labeling, b: &Labeling) -> Result<Overlap> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            expected: a.len(),
            actual: b.len(),
        });
    }
    let n = a.len();
    let mismatch = a
        .as_slice()
        .iter()
        .zip(b.as_slice())
        .filter(|(x, y)| x != y)
        .count();
    let errors = mismatch.min(n - mismatch);
    let agreement = if n == 0 {
        1.0
    } else {
        (n - errors) as f64 / n as f64
    };
    Ok(Overlap { agreement, errors })
}

/// Applies [`majority_step`] until a fixed point or `max_rounds` steps.
pub fn majority_iterate(
    graph: &Graph,
    labels: &Labeling,
    max_rounds: usize,
    planted: Option<&Labeling>,
) -> Result<RecoveryResult> {
    check_len(graph, labels)?;
    if max_rounds == 0 {
        return Err(Error::EmptyRange("majority_iterate requires max_rounds >= 1"));
    }
    let errors_of = |l: &Labeling| -> Result<Option<usize>> {
        planted.map(|p| overlap(p, l).map(|o| o.errors)).transpose()
    };
    let mut per_round = Vec::new();
    if let Some(e) = errors_of(labels)? {
        per_round.push(e);
    }
    let mut current = labels.clone();
    let mut rounds = 0;
    let mut converged = false;
    while rounds < max_rounds {
        let next = majority_step(graph, &current)?;
        rounds += 1;
        if let Some(e) = errors_of(&next)? {
            per_round.push(e);
        }
        let same = next == current;
        current = next;
        if same {
            converged = true;
            break;
        }
    }
    let agreement = planted.map(|p| overlap(p, &current)).transpose()?;
    Ok(RecoveryResult {
        method: RecoveryMethod::MajorityOnly,
        initial_labels: labels.clone(),
        final_labels: current,
        rounds_used: rounds,
        per_round_errors: planted.map(|_| per_round),
        agreement: agreement.map(|o| o.agreement),
        converged,
        lambda2: None,
        warnings: Vec::new(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecoverOptions {
    pub eigen: EigenOptions,
    /// Walk length for [`RecoveryMethod::SpectralSaw`].
    pub saw_depth: usize,
    /// Round the top half of the eigenvector to `+1` instead of using signs.
    pub balanced_rounding: bool,
    /// Defaults to [`default_max_rounds`].
    pub max_rounds: Option<usize>,
    /// When known, used to warn outside the spectral regime.
    pub params: Option<RsbmParams>,
}

impl Default for RecoverOptions {
    fn default() -> Self {
        RecoverOptions {
            eigen: EigenOptions::default(),
            saw_depth: 1,
            balanced_rounding: false,
            max_rounds: None,
            params: None,
        }
    }
}

/// Rounds the second eigenvector (of the adjacency matrix or of `S^(l)`) and
/// cleans the result up with majority dynamics.
///
/// For [`RecoveryMethod::MajorityOnly`] there is no spectral start; use
/// [`majority_iterate`] with an explicit initial labeling instead.
pub fn spectral_recover(
    graph: &Graph,
    method: RecoveryMethod,
    opts: &RecoverOptions,
    planted: Option<&Labeling>,
) -> Result<RecoveryResult> {
    let mut warnings = Vec::new();
    if graph.regular_degree().is_none() {
        return Err(Error::InvalidGraph("spectral recovery needs a regular graph".into()));
    }
    if let Some(p) = opts.params {
        if !spectral_condition(p.d1, p.d2) {
            warnings.push(format!(
                "(d1={}, d2={}) is outside the spectral regime (d1-d2)^2 > 4(d1+d2-1); \
                 recovery is not guaranteed",
                p.d1, p.d2
            ));
        }
    }
    let (lambda2, v2) = match method {
        RecoveryMethod::SpectralAdjacency => {
            let s = second_eigenvector(graph, &opts.eigen)?;
            if s.degenerate {
                warnings.push("second eigenvalue appears repeated".into());
            }
            (s.lambda2, s.vector)
        }
        RecoveryMethod::SpectralSaw => {
            let s = saw_recover(graph, opts.saw_depth, &opts.eigen)?;
            (s.lambda2, s.v2)
        }
        RecoveryMethod::MajorityOnly => {
            return Err(Error::InvalidParams(
                "majority_only has no spectral start; call majority_iterate".into(),
            ))
        }
    };
    let initial = if opts.balanced_rounding {
        Labeling::top_k(&v2, graph.num_vertices() / 2)
    } else {
        Labeling::from_signs_of(&v2)
    };
    let rounds = opts
        .max_rounds
        .unwrap_or_else(|| default_max_rounds(graph.num_vertices()));
    let mut result = majority_iterate(graph, &initial, rounds, planted)?;
    result.method = method;
    result.lambda2 = Some(lambda2);
    result.warnings = warnings;
    Ok(result)
}
