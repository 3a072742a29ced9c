//! Hermite expansions and ranks of Gaussian functionals.
//!
//! A square-integrable transform `G` of a standard Gaussian `Z` expands as
//! `G - E G(Z) = sum_{m>=1} c_m H_m` with `c_m = E[G(Z) H_m(Z)] / m!` in the
//! probabilists' Hermite basis. The rank of `G` is the first order `m >= 1`
//! whose coefficient is nonzero; it controls the scaling of partial sums of
//! `G` applied to a long-memory Gaussian sequence.
//!
//! The same quadrature data also yields the Weierstrass transform
//! `W(x) = E G(Z + x)` and its derivatives through the identity
//! `W^(m)(x) = E[G(Z + x) H_m(Z)]`, which is what makes the power rank
//! (first non-vanishing derivative of `W` at zero) computable without any
//! symbolic differentiation.

use serde::de::{self, Deserializer};
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::function::FunctionSpec;
use crate::quadrature::QuadratureRule;

/// Default truncation order for expansions and rank searches.
pub const DEFAULT_TRUNCATION: usize = 30;

/// Default relative tolerance below which a coefficient counts as zero.
pub const DEFAULT_RANK_TOL: f64 = 1e-8;

/// Tail mass below `max(tol^2, NOISE_FLOOR) * max(l2, 1)` counts as zero when
/// deciding constancy. The floor absorbs the cancellation noise of
/// `l2 - sum m! c_m^2`, which cannot resolve below ~1e-14 relative in f64.
const TAIL_NOISE_FLOOR: f64 = 1e-13;

/// Probabilists' Hermite polynomial `H_m(x)` by the three-term recurrence
/// `H_{m+1}(x) = x H_m(x) - m H_{m-1}(x)`.
pub fn hermite_poly(m: usize, x: f64) -> f64 {
    match m {
        0 => 1.0,
        1 => x,
        _ => {
            let mut prev = 1.0;
            let mut cur = x;
            for k in 1..m {
                let next = x * cur - (k as f64) * prev;
                prev = cur;
                cur = next;
            }
            cur
        }
    }
}

pub(crate) fn factorial(m: usize) -> f64 {
    (1..=m).map(|i| i as f64).product()
}

/// Truncated Hermite expansion of a spec, with the honesty metadata needed to
/// decide ranks: the quadrature estimate of `E G(Z)^2` and the L2 mass not
/// captured by the truncation.
#[derive(Debug, Clone, Serialize)]
pub struct HermiteExpansion {
    coefficients: Vec<f64>,
    truncation_order: usize,
    node_count: usize,
    l2_norm_sq: f64,
    tail_mass: f64,
}

impl HermiteExpansion {
    /// Coefficients `c_0 ..= c_M`.
    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn coefficient(&self, m: usize) -> f64 {
        self.coefficients[m]
    }

    pub fn truncation_order(&self) -> usize {
        self.truncation_order
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    /// Quadrature estimate of `E G(Z)^2`.
    pub fn l2_norm_sq(&self) -> f64 {
        self.l2_norm_sq
    }

    /// `E G(Z)^2 - sum_{m<=M} m! c_m^2`; at most rounding-level negative.
    pub fn tail_mass(&self) -> f64 {
        self.tail_mass
    }

    /// `sqrt(m!) |c_m|`, the L2 weight of each order.
    pub fn coefficient_magnitudes(&self) -> Vec<f64> {
        self.coefficients
            .iter()
            .enumerate()
            .map(|(m, &c)| factorial(m).sqrt() * c.abs())
            .collect()
    }
}

fn finite_or_error(value: f64, what: &str, node: f64) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::Evaluation(format!(
            "{what} is {value} at quadrature node {node}"
        )))
    }
}

/// Evaluate the spec at every node, checking finiteness.
fn eval_at_nodes(spec: &FunctionSpec, rule: &QuadratureRule) -> Result<Vec<f64>> {
    rule.nodes()
        .iter()
        .map(|&x| finite_or_error(spec.eval(x), "transform value", x))
        .collect()
}

/// Expand a spec to the given truncation order using the rule.
///
/// `c_m = sum_j w_j G(nodes_j) H_m(nodes_j) / m!` and the L2 norm estimate is
/// `sum_j w_j G(nodes_j)^2`.
pub fn expand(
    spec: &FunctionSpec,
    order: usize,
    rule: &QuadratureRule,
) -> Result<HermiteExpansion> {
    if order < 2 {
        return Err(Error::Domain(format!(
            "truncation order must be at least 2, got {order}"
        )));
    }
    let values = eval_at_nodes(spec, rule)?;
    let weights = rule.weights();
    let nodes = rule.nodes();
    let l2_norm_sq: f64 = weights
        .iter()
        .zip(&values)
        .map(|(&w, &g)| w * g * g)
        .sum();

    let mut coefficients = Vec::with_capacity(order + 1);
    let mut h_prev: Vec<f64> = vec![1.0; nodes.len()];
    let mut h_cur: Vec<f64> = nodes.to_vec();
    let weighted_sum = |h: &[f64]| -> f64 {
        weights
            .iter()
            .zip(&values)
            .zip(h)
            .map(|((&w, &g), &hm)| w * g * hm)
            .sum()
    };
    coefficients.push(weighted_sum(&h_prev));
    coefficients.push(weighted_sum(&h_cur));
    for m in 2..=order {
        let k = (m - 1) as f64;
        for (j, &x) in nodes.iter().enumerate() {
            let next = x * h_cur[j] - k * h_prev[j];
            h_prev[j] = h_cur[j];
            h_cur[j] = next;
        }
        coefficients.push(weighted_sum(&h_cur) / factorial(m));
    }

    let captured: f64 = coefficients
        .iter()
        .enumerate()
        .map(|(m, &c)| factorial(m) * c * c)
        .sum();
    Ok(HermiteExpansion {
        coefficients,
        truncation_order: order,
        node_count: rule.len(),
        l2_norm_sq,
        tail_mass: l2_norm_sq - captured,
    })
}

/// Rank of a transform: the order of the first nonzero coefficient, or the
/// sentinel for transforms that are constant almost everywhere.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rank {
    Constant,
    Order(usize),
}

impl Rank {
    pub fn order(&self) -> Option<usize> {
        match self {
            Rank::Constant => None,
            Rank::Order(k) => Some(*k),
        }
    }
}

impl std::fmt::Display for Rank {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Rank::Constant => write!(f, "constant"),
            Rank::Order(k) => write!(f, "{k}"),
        }
    }
}

impl Serialize for Rank {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Rank::Constant => serializer.serialize_str("constant"),
            Rank::Order(k) => serializer.serialize_u64(*k as u64),
        }
    }
}

impl<'de> Deserialize<'de> for Rank {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Num(u64),
            Text(String),
        }
        match Repr::deserialize(deserializer)? {
            Repr::Num(k) if k >= 1 => Ok(Rank::Order(k as usize)),
            Repr::Num(k) => Err(de::Error::custom(format!("rank must be >= 1, got {k}"))),
            Repr::Text(s) if s == "constant" => Ok(Rank::Constant),
            Repr::Text(s) => Err(de::Error::custom(format!("unknown rank value '{s}'"))),
        }
    }
}

fn tail_threshold(tol: f64, l2_norm_sq: f64) -> f64 {
    (tol * tol).max(TAIL_NOISE_FLOOR) * l2_norm_sq.max(1.0)
}

/// Rank from an expansion: first `m >= 1` with
/// `sqrt(m!) |c_m| >= tol * sqrt(E G^2)`. When nothing clears the tolerance,
/// a negligible tail means the transform is constant; a non-negligible tail
/// means the truncation was too short to tell.
pub fn hermite_rank(expansion: &HermiteExpansion, tol: f64) -> Result<Rank> {
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Error::Domain(format!("tolerance must be positive, got {tol}")));
    }
    let scale = expansion.l2_norm_sq.max(0.0).sqrt();
    for m in 1..=expansion.truncation_order {
        if factorial(m).sqrt() * expansion.coefficients[m].abs() >= tol * scale {
            return Ok(Rank::Order(m));
        }
    }
    if expansion.tail_mass < tail_threshold(tol, expansion.l2_norm_sq) {
        Ok(Rank::Constant)
    } else {
        Err(Error::RankExceedsTruncation {
            order: expansion.truncation_order,
            tail_mass: expansion.tail_mass,
        })
    }
}

/// Weierstrass transform `E G(Z + x)` of the spec by quadrature.
pub fn weierstrass(spec: &FunctionSpec, x: f64, rule: &QuadratureRule) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::Domain(format!("shift must be finite, got {x}")));
    }
    let mut sum = 0.0;
    for (&node, &w) in rule.nodes().iter().zip(rule.weights()) {
        sum += w * finite_or_error(spec.eval(node + x), "transform value", node)?;
    }
    Ok(sum)
}

/// `m`-th derivative of the Weierstrass transform at `x`, through the
/// identity `W^(m)(x) = E[G(Z + x) H_m(Z)]`. Equals `m!` times the `m`-th
/// coefficient of the expansion of the shifted spec.
pub fn weierstrass_derivative(
    spec: &FunctionSpec,
    m: usize,
    x: f64,
    rule: &QuadratureRule,
) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::Domain(format!("shift must be finite, got {x}")));
    }
    let mut sum = 0.0;
    for (&node, &w) in rule.nodes().iter().zip(rule.weights()) {
        let g = finite_or_error(spec.eval(node + x), "transform value", node)?;
        sum += w * g * hermite_poly(m, node);
    }
    Ok(sum)
}

/// Power rank: first `m >= 1` whose Weierstrass derivative at zero clears
/// `tol * sqrt(m!) * sqrt(E G^2)`, searched up to `order`. For Gaussian
/// arguments this coincides with the Hermite rank.
pub fn power_rank(
    spec: &FunctionSpec,
    tol: f64,
    order: usize,
    rule: &QuadratureRule,
) -> Result<Rank> {
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Error::Domain(format!("tolerance must be positive, got {tol}")));
    }
    if order < 2 {
        return Err(Error::Domain(format!(
            "search order must be at least 2, got {order}"
        )));
    }
    let values = eval_at_nodes(spec, rule)?;
    let l2_norm_sq: f64 = rule
        .weights()
        .iter()
        .zip(&values)
        .map(|(&w, &g)| w * g * g)
        .sum();
    let scale = l2_norm_sq.max(0.0).sqrt();

    let d0 = weierstrass(spec, 0.0, rule)?;
    let mut captured = d0 * d0;
    for m in 1..=order {
        let d = weierstrass_derivative(spec, m, 0.0, rule)?;
        if d.abs() >= tol * factorial(m).sqrt() * scale {
            return Ok(Rank::Order(m));
        }
        captured += d * d / factorial(m);
    }
    let tail = l2_norm_sq - captured;
    if tail < tail_threshold(tol, l2_norm_sq) {
        Ok(Rank::Constant)
    } else {
        Err(Error::RankExceedsTruncation {
            order,
            tail_mass: tail,
        })
    }
}

/// Rank summary of a spec: both rank notions, the leading derivative
/// `W^(k)(0) = k! c_k`, and the per-order L2 weights.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RankReport {
    pub hermite_rank: Rank,
    pub power_rank: Rank,
    pub leading_coefficient: f64,
    pub tolerance_used: f64,
    pub coefficient_magnitudes: Vec<f64>,
}

impl RankReport {
    pub fn ranks_coincide(&self) -> bool {
        self.hermite_rank == self.power_rank
    }
}

/// Compute both ranks of a spec at the given tolerance and truncation order.
pub fn rank_report(
    spec: &FunctionSpec,
    tol: f64,
    order: usize,
    rule: &QuadratureRule,
) -> Result<RankReport> {
    let expansion = expand(spec, order, rule)?;
    let hermite = hermite_rank(&expansion, tol)?;
    let power = power_rank(spec, tol, order, rule)?;
    let leading_coefficient = match hermite {
        Rank::Order(k) => factorial(k) * expansion.coefficient(k),
        Rank::Constant => 0.0,
    };
    Ok(RankReport {
        hermite_rank: hermite,
        power_rank: power,
        leading_coefficient,
        tolerance_used: tol,
        coefficient_magnitudes: expansion.coefficient_magnitudes(),
    })
}
