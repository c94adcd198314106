//! Model parameters and closed-form quantities.
//!
//! An RSBM instance on `2n` vertices has two hidden communities of size `n`.
//! Each community induces a `d1`-regular graph and the edges across form a
//! `d2`-regular bipartite graph. Everything here is a pure function of
//! `(n, d1, d2)`; most of it depends on the degrees only.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Parameters `(n, d1, d2)` of a regular stochastic block model.
///
/// `n` is half the vertex count, `d1` the within-community degree and `d2`
/// the cross-community degree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RsbmParams {
    pub n: usize,
    pub d1: usize,
    pub d2: usize,
}

/// A violated parameter invariant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ParamViolation {
    /// `min(d1, d2) >= 3`.
    DegreeBelowThree,
    /// `n * d1` must be even.
    OddHalfEdgeCount,
    /// `d1 <= n - 1`.
    WithinDegreeTooLarge,
    /// `d2 <= n`.
    CrossDegreeTooLarge,
    /// `n >= 1`.
    EmptyCommunity,
}

impl ParamViolation {
    pub fn describe(self) -> &'static str {
        match self {
            ParamViolation::DegreeBelowThree => "min(d1, d2) >= 3 is required",
            ParamViolation::OddHalfEdgeCount => "n*d1 must be even (half-edge parity)",
            ParamViolation::WithinDegreeTooLarge => {
                "d1 < n is required for a simple d1-regular graph on n vertices"
            }
            ParamViolation::CrossDegreeTooLarge => {
                "d2 <= n is required for a simple d2-regular bipartite graph"
            }
            ParamViolation::EmptyCommunity => "n >= 1 is required",
        }
    }
}

impl RsbmParams {
    /// Validated constructor enforcing every standing invariant.
    pub fn new(n: usize, d1: usize, d2: usize) -> Result<Self> {
        let p = RsbmParams { n, d1, d2 };
        p.validate()?;
        Ok(p)
    }

    /// Builds parameters without any check. Samplers re-check the structural
    /// conditions they need, so this is the entry point for small worked
    /// examples outside the model's standing assumptions (e.g. `d2 = 1`).
    pub fn unchecked(n: usize, d1: usize, d2: usize) -> Self {
        RsbmParams { n, d1, d2 }
    }

    pub fn violations(&self) -> Vec<ParamViolation> {
        let mut out = Vec::new();
        if self.n == 0 {
            out.push(ParamViolation::EmptyCommunity);
        }
        if self.d1 < 3 || self.d2 < 3 {
            out.push(ParamViolation::DegreeBelowThree);
        }
        if (self.n * self.d1) % 2 != 0 {
            out.push(ParamViolation::OddHalfEdgeCount);
        }
        if self.d1 >= self.n {
            out.push(ParamViolation::WithinDegreeTooLarge);
        }
        if self.d2 > self.n {
            out.push(ParamViolation::CrossDegreeTooLarge);
        }
        out
    }

    /// Violations that make the model impossible to sample, ignoring the
    /// `min(d1, d2) >= 3` standing assumption.
    pub fn structural_violations(&self) -> Vec<ParamViolation> {
        let mut v = self.violations();
        v.retain(|x| *x != ParamViolation::DegreeBelowThree);
        v
    }

    pub fn validate(&self) -> Result<()> {
        self.report(self.violations())
    }

    /// Like [`RsbmParams::validate`] but accepts degrees below three, which
    /// the model's headline example `(d1, d2) = (10, 2)` needs.
    pub fn validate_structure(&self) -> Result<()> {
        self.report(self.structural_violations())
    }

    /// Checked constructor that only enforces [`RsbmParams::validate_structure`].
    pub fn sampleable(n: usize, d1: usize, d2: usize) -> Result<Self> {
        let p = RsbmParams { n, d1, d2 };
        p.validate_structure()?;
        Ok(p)
    }

    fn report(&self, v: Vec<ParamViolation>) -> Result<()> {
        if v.is_empty() {
            return Ok(());
        }
        let msg: Vec<&str> = v.iter().map(|x| x.describe()).collect();
        Err(Error::InvalidParams(format!(
            "(n={}, d1={}, d2={}): {}",
            self.n,
            self.d1,
            self.d2,
            msg.join("; ")
        )))
    }

    pub fn num_vertices(&self) -> usize {
        2 * self.n
    }

    pub fn degree(&self) -> usize {
        self.d1 + self.d2
    }
}

/// Checks the degree-only invariant `min(d1, d2) >= 3`.
pub fn validate_degrees(d1: usize, d2: usize) -> Result<()> {
    if d1 < 3 || d2 < 3 {
        return Err(Error::InvalidParams(format!(
            "(d1={d1}, d2={d2}): {}",
            ParamViolation::DegreeBelowThree.describe()
        )));
    }
    Ok(())
}

/// Roots of `x^2 - (d1 - d2) x + (d1 + d2 - 1) = 0` and the coefficients of
/// `z_k = A alpha^k + B beta^k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Roots {
    pub alpha: f64,
    pub beta: f64,
    pub a_const: f64,
    pub b_const: f64,
}

/// Thresholds and closed-form quantities that depend on `(d1, d2)` only.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DerivedQuantities {
    pub d1: usize,
    pub d2: usize,
    /// `(d1 - d2)^2 > 4 (d1 + d2 - 1)`.
    pub spectral_condition: bool,
    /// `d1 > d2 + 4`.
    pub majority_condition: bool,
    /// Present iff the spectral condition holds.
    pub roots: Option<Roots>,
    pub tv_rate1: f64,
    pub tv_rate2: f64,
}

impl DerivedQuantities {
    pub fn compute(d1: usize, d2: usize) -> Self {
        let (tv_rate1, tv_rate2) = tv_rates(d1, d2);
        DerivedQuantities {
            d1,
            d2,
            spectral_condition: spectral_condition(d1, d2),
            majority_condition: d1 > d2 + 4,
            roots: roots(d1, d2),
            tv_rate1,
            tv_rate2,
        }
    }

    pub fn alpha(&self) -> Option<f64> {
        self.roots.map(|r| r.alpha)
    }

    pub fn beta(&self) -> Option<f64> {
        self.roots.map(|r| r.beta)
    }

    /// `A alpha^l + B beta^l`, or `None` outside the spectral regime.
    pub fn z_closed_form(&self, l: u32) -> Option<f64> {
        self.roots
            .map(|r| r.a_const * r.alpha.powi(l as i32) + r.b_const * r.beta.powi(l as i32))
    }

    pub fn z(&self, l: usize) -> Result<i128> {
        z_sequence(self.d1, self.d2, l).map(|z| z[l - 1])
    }

    pub fn lambda1_saw(&self, l: usize) -> Result<u128> {
        predicted_saw_eigenvalue1(self.d1, self.d2, l)
    }
}

/// Validates `params` and computes the derived quantities.
pub fn check_thresholds(params: &RsbmParams) -> Result<DerivedQuantities> {
    params.validate()?;
    Ok(DerivedQuantities::compute(params.d1, params.d2))
}

pub fn spectral_condition(d1: usize, d2: usize) -> bool {
    let diff = d1 as i128 - d2 as i128;
    diff * diff > 4 * (d1 as i128 + d2 as i128 - 1)
}

/// The two real roots and the `z_k` coefficients, when the spectral condition
/// holds. A repeated or complex root yields `None`.
pub fn roots(d1: usize, d2: usize) -> Option<Roots> {
    if !spectral_condition(d1, d2) {
        return None;
    }
    let s = d1 as f64 - d2 as f64;
    let p = (d1 + d2) as f64 - 1.0;
    let disc = (s * s - 4.0 * p).sqrt();
    let alpha = (s + disc) / 2.0;
    // beta from Vieta avoids cancellation in (s - disc) / 2
    let beta = p / alpha;
    let z = z_seeds(d1, d2);
    let (z1, z2) = (z.0 as f64, z.1 as f64);
    let a_const = (z2 - beta * z1) / (alpha * (alpha - beta));
    let b_const = (z2 - alpha * z1) / (beta * (beta - alpha));
    Some(Roots {
        alpha,
        beta,
        a_const,
        b_const,
    })
}

fn z_seeds(d1: usize, d2: usize) -> (i128, i128) {
    let (a, b) = (d1 as i128, d2 as i128);
    (a - b, (a - b) * (a - b) - (a + b))
}

/// `z_1, ..., z_l`: same-label minus opposite-label counts at depth `k` of the
/// labelled `(d1+d2)`-regular tree.
///
/// `z_1` and `z_2` come from the explicit seeds; the linear recurrence is
/// only applied for `k >= 3`. Values are exact `i128`; growth is roughly
/// `alpha^k`, so `k` up to about `127 / log2(alpha)` is representable and an
/// overflow is reported as an error rather than wrapped.
pub fn z_sequence(d1: usize, d2: usize, l: usize) -> Result<Vec<i128>> {
    if l == 0 {
        return Err(Error::EmptyRange("z_sequence requires l >= 1"));
    }
    let (z1, z2) = z_seeds(d1, d2);
    let s = d1 as i128 - d2 as i128;
    let p = d1 as i128 + d2 as i128 - 1;
    let mut out = Vec::with_capacity(l);
    out.push(z1);
    if l >= 2 {
        out.push(z2);
    }
    for k in 2..l {
        let next = s
            .checked_mul(out[k - 1])
            .and_then(|x| p.checked_mul(out[k - 2]).and_then(|y| x.checked_sub(y)))
            .ok_or_else(|| Error::Overflow(format!("z_{} for (d1={d1}, d2={d2})", k + 1)))?;
        out.push(next);
    }
    Ok(out)
}

/// `(d1 + d2) (d1 + d2 - 1)^(l-1)`: the number of vertices at distance `l`
/// from the root of the `(d1+d2)`-regular tree.
pub fn predicted_saw_eigenvalue1(d1: usize, d2: usize, l: usize) -> Result<u128> {
    if l == 0 {
        return Err(Error::EmptyRange("predicted_saw_eigenvalue1 requires l >= 1"));
    }
    let d = (d1 + d2) as u128;
    (d.saturating_sub(1))
        .checked_pow((l - 1) as u32)
        .and_then(|x| x.checked_mul(d))
        .ok_or_else(|| Error::Overflow(format!("lambda1 at l={l}")))
}

/// `ln(m!)` by direct summation.
pub fn ln_factorial(m: u64) -> f64 {
    (2..=m).map(|k| (k as f64).ln()).sum()
}

pub fn ln_binomial(m: u64, k: u64) -> f64 {
    if k > m {
        return f64::NEG_INFINITY;
    }
    let k = k.min(m - k);
    (0..k).map(|i| ((m - i) as f64).ln() - ((i + 1) as f64).ln()).sum()
}

/// Decay rates of the two factors in the support-mass bound:
///
/// `rate1 = 2 C(d1+d2, d1) / 2^(d1+d2)` and
/// `rate2 = 2 C(d1+d2, d1) d1^d1 d2^d2 / (d1+d2)^(d1+d2)`.
///
/// Evaluated in the log domain.
pub fn tv_rates(d1: usize, d2: usize) -> (f64, f64) {
    let (a, b) = (d1 as f64, d2 as f64);
    let d = a + b;
    let ln2 = std::f64::consts::LN_2;
    let lnc = ln_binomial((d1 + d2) as u64, d1 as u64);
    let xlnx = |x: f64| if x == 0.0 { 0.0 } else { x * x.ln() };
    let ln_r1 = ln2 + lnc - d * ln2;
    let ln_r2 = ln2 + lnc + xlnx(a) + xlnx(b) - xlnx(d);
    (ln_r1.exp(), ln_r2.exp())
}

/// Leading-order `ln |G(n, d)|`, the count of labelled `d`-regular graphs on
/// `n` vertices without its bounded constant:
/// `(nd)! / ((nd/2)! 2^(nd/2) (d!)^n)`.
pub fn ln_regular_graph_count(n: u64, d: u64) -> f64 {
    let m = n * d;
    ln_factorial(m) - ln_factorial(m / 2) - (m / 2) as f64 * std::f64::consts::LN_2
        - n as f64 * ln_factorial(d)
}

/// Leading-order `ln |BG(n, d)|` for `d`-regular bipartite graphs on `n + n`
/// vertices: `(dn)! / (d!)^(2n)`.
pub fn ln_bipartite_graph_count(n: u64, d: u64) -> f64 {
    ln_factorial(n * d) - 2.0 * n as f64 * ln_factorial(d)
}

/// Leading-order `ln mu'_n(K_n)`: the log of the fraction of
/// `(d1+d2)`-regular graphs on `2n` vertices that admit an RSBM partition,
/// without its bounded constant. Divided by `n` this tends to
/// `ln(rate1) + ln(rate2)`.
pub fn ln_support_fraction(n: u64, d1: u64, d2: u64) -> f64 {
    ln_binomial(2 * n, n) + 2.0 * ln_regular_graph_count(n, d1)
        + ln_bipartite_graph_count(n, d2)
        - ln_regular_graph_count(2 * n, d1 + d2)
}

/// Largest `l >= 1` with `l ln(d1 + d2) < ln(2n) / 4`; falls back to 1 when
/// no positive depth satisfies the inequality.
pub fn default_saw_depth(params: &RsbmParams) -> usize {
    let lhs = (params.degree() as f64).ln();
    let rhs = (params.num_vertices() as f64).ln() / 4.0;
    let mut l = 0usize;
    while ((l + 1) as f64) * lhs < rhs {
        l += 1;
    }
    l.max(1)
}

/// `e^((1 - d^2) / 4)`: limiting probability that the configuration model
/// yields a simple `d`-regular graph.
pub fn config_simple_probability(d: usize) -> f64 {
    ((1.0 - (d * d) as f64) / 4.0).exp()
}

/// `e^(-(d - 1)^2 / 2)`: limiting probability that the bipartite
/// configuration model yields a simple graph.
pub fn bipartite_simple_probability(d: usize) -> f64 {
    let x = d as f64 - 1.0;
    (-x * x / 2.0).exp()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thresholds_10_2() {
        let q = DerivedQuantities::compute(10, 2);
        assert!(q.spectral_condition);
        assert!(q.majority_condition);
        let r = q.roots.unwrap();
        assert!((r.alpha - (4.0 + 5f64.sqrt())).abs() < 1e-12);
        assert!((r.beta - (4.0 - 5f64.sqrt())).abs() < 1e-12);
        assert!((r.alpha - 6.23607).abs() < 1e-5);
        assert!((r.beta - 1.76393).abs() < 1e-5);
    }

    #[test]
    fn thresholds_7_3() {
        let q = DerivedQuantities::compute(7, 3);
        assert!(!q.spectral_condition);
        assert!(!q.majority_condition);
        assert!(q.roots.is_none());
    }

    #[test]
    fn invalid_params_name_the_invariant() {
        let e = RsbmParams::new(5, 3, 3).unwrap_err();
        assert!(e.to_string().contains("parity"), "{e}");
        let e = RsbmParams::new(10, 2, 3).unwrap_err();
        assert!(e.to_string().contains(">= 3"), "{e}");
        let e = RsbmParams::new(4, 4, 3).unwrap_err();
        assert!(e.to_string().contains("d1 < n"), "{e}");
        assert!(check_thresholds(&RsbmParams::unchecked(5, 3, 3)).is_err());
        assert!(RsbmParams::new(500, 10, 2).is_err());
        assert!(RsbmParams::new(500, 10, 3).is_ok());
        assert!(RsbmParams::sampleable(500, 10, 2).is_ok());
        let e = RsbmParams::sampleable(5, 3, 3).unwrap_err();
        assert!(e.to_string().contains("parity"), "{e}");
    }

    #[test]
    fn z_sequence_examples() {
        assert_eq!(z_sequence(10, 2, 3).unwrap(), vec![8, 52, 328]);
        assert_eq!(z_sequence(5, 1, 3).unwrap(), vec![4, 10, 20]);
        assert_eq!(z_sequence(10, 2, 1).unwrap(), vec![8]);
        assert!(matches!(z_sequence(10, 2, 0), Err(Error::EmptyRange(_))));
    }

    #[test]
    fn z_sequence_overflow_is_reported() {
        assert!(matches!(z_sequence(200, 3, 40), Err(Error::Overflow(_))));
    }

    #[test]
    fn lambda1_examples() {
        assert_eq!(predicted_saw_eigenvalue1(10, 2, 3).unwrap(), 1452);
        assert_eq!(predicted_saw_eigenvalue1(3, 3, 1).unwrap(), 6);
        assert_eq!(predicted_saw_eigenvalue1(10, 2, 1).unwrap(), 12);
        assert_eq!(predicted_saw_eigenvalue1(10, 2, 4).unwrap(), 15972);
    }

    #[test]
    fn tv_rate_examples() {
        let (r1, r2) = tv_rates(3, 3);
        assert!((r1 - 0.625).abs() < 1e-12);
        assert!((r2 - 0.625).abs() < 1e-12);
        let (r1, r2) = tv_rates(10, 2);
        assert!((r1 - 132.0 / 4096.0).abs() < 1e-12);
        assert!((r2 - 528.0e10 / 12f64.powi(12)).abs() < 1e-12);
        assert!((r2 - 0.59219).abs() < 1e-5);
    }

    #[test]
    fn closed_form_matches_seeds() {
        let q = DerivedQuantities::compute(10, 2);
        assert!((q.z_closed_form(1).unwrap() - 8.0).abs() < 1e-9);
        assert!((q.z_closed_form(2).unwrap() - 52.0).abs() < 1e-9);
        assert!((q.z_closed_form(3).unwrap() - 328.0).abs() < 1e-9);
    }

    #[test]
    fn default_depth_is_at_least_one() {
        assert_eq!(default_saw_depth(&RsbmParams::unchecked(1000, 10, 2)), 1);
        // l = 1 is admissible once 2n > 12^4, l = 2 once 2n > 12^8
        assert_eq!(default_saw_depth(&RsbmParams::unchecked(200_000, 10, 2)), 1);
        assert_eq!(default_saw_depth(&RsbmParams::unchecked(300_000_000, 10, 2)), 2);
    }

    #[test]
    fn ln_binomial_small() {
        assert!((ln_binomial(6, 3) - 20f64.ln()).abs() < 1e-12);
        assert!((ln_binomial(12, 10) - 66f64.ln()).abs() < 1e-12);
    }
}
