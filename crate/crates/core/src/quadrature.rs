//! Gauss–Hermite quadrature for the standard Gaussian measure.
//!
//! Rules use the probabilists' convention: an n-point rule integrates
//! `f` against the density `phi(x) = exp(-x^2/2)/sqrt(2 pi)`, the weights
//! sum to one, and polynomials of degree up to `2n - 1` are integrated
//! exactly.
//!
//! Nodes and weights come from the Golub–Welsch eigendecomposition of the
//! Jacobi matrix of the monic Hermite recurrence
//! `p_{m+1}(x) = x p_m(x) - m p_{m-1}(x)`: the nodes are the eigenvalues of
//! the symmetric tridiagonal matrix with zero diagonal and off-diagonal
//! `sqrt(m)`, and each weight is the squared first component of the
//! corresponding eigenvector. Only the first row of the eigenvector matrix
//! is accumulated, so building a rule is O(n^2).

use crate::error::{Error, Result};

/// Nodes and weights for integration against the standard Gaussian measure.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl QuadratureRule {
    /// Build an `node_count`-point Gauss–Hermite rule. Requires at least two
    /// nodes.
    pub fn gauss_hermite(node_count: usize) -> Result<Self> {
        if node_count < 2 {
            return Err(Error::Domain(format!(
                "quadrature rule needs at least 2 nodes, got {node_count}"
            )));
        }
        let mut diag = vec![0.0_f64; node_count];
        let mut off: Vec<f64> = (1..node_count).map(|m| (m as f64).sqrt()).collect();
        off.push(0.0);
        let mut first_row = vec![0.0_f64; node_count];
        first_row[0] = 1.0;
        tridiagonal_eigen_first_row(&mut diag, &mut off, &mut first_row)?;

        let mut order: Vec<usize> = (0..node_count).collect();
        order.sort_by(|&a, &b| diag[a].total_cmp(&diag[b]));
        let mut nodes: Vec<f64> = order.iter().map(|&i| diag[i]).collect();
        let mut weights: Vec<f64> = order.iter().map(|&i| first_row[i] * first_row[i]).collect();

        // The rule is symmetric about zero in exact arithmetic; pair mirrored
        // nodes so it is symmetric in floating point as well.
        for i in 0..node_count / 2 {
            let j = node_count - 1 - i;
            let s = 0.5 * (nodes[j] - nodes[i]);
            nodes[i] = -s;
            nodes[j] = s;
            let w = 0.5 * (weights[i] + weights[j]);
            weights[i] = w;
            weights[j] = w;
        }
        if node_count % 2 == 1 {
            nodes[node_count / 2] = 0.0;
        }

        let total: f64 = weights.iter().sum();
        if !(total.is_finite() && total > 0.0) {
            return Err(Error::NumericalFailure(
                "quadrature weights did not sum to a positive value".into(),
            ));
        }
        for w in &mut weights {
            *w /= total;
        }
        Ok(Self { nodes, weights })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Quadrature value of `E f(Z)`.
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

/// QL algorithm with implicit shifts for a symmetric tridiagonal matrix,
/// accumulating only the first row of the eigenvector matrix.
///
/// `diag` holds the diagonal and is overwritten with the (unsorted)
/// eigenvalues; `off` holds the off-diagonal in `off[0..n-1]` with one spare
/// slot and is destroyed; `row` must be the first unit basis vector on entry
/// and holds the first eigenvector components on exit.
fn tridiagonal_eigen_first_row(diag: &mut [f64], off: &mut [f64], row: &mut [f64]) -> Result<()> {
    let n = diag.len();
    if n <= 1 {
        return Ok(());
    }
    for l in 0..n {
        let mut iterations = 0;
        loop {
            // Look for a negligible off-diagonal element splitting the matrix.
            let mut m = l;
            while m + 1 < n {
                let dd = diag[m].abs() + diag[m + 1].abs();
                if off[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iterations += 1;
            if iterations > 64 {
                return Err(Error::NumericalFailure(
                    "tridiagonal QL iteration did not converge".into(),
                ));
            }
            // Form the implicit shift from the leading 2x2 block.
            let mut g = (diag[l + 1] - diag[l]) / (2.0 * off[l]);
            let mut r = g.hypot(1.0);
            g = diag[m] - diag[l] + off[l] / (g + r.copysign(g));
            let mut s = 1.0;
            let mut c = 1.0;
            let mut p = 0.0;
            let mut underflow = false;
            for i in (l..m).rev() {
                let mut f = s * off[i];
                let b = c * off[i];
                r = f.hypot(g);
                off[i + 1] = r;
                if r == 0.0 {
                    diag[i + 1] -= p;
                    off[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = diag[i + 1] - p;
                r = (diag[i] - g) * s + 2.0 * c * b;
                p = s * r;
                diag[i + 1] = g + p;
                g = c * r - b;
                f = row[i + 1];
                row[i + 1] = s * row[i] + c * f;
                row[i] = c * row[i] - s * f;
            }
            if underflow {
                continue;
            }
            diag[l] -= p;
            off[l] = g;
            off[m] = 0.0;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    /// E Z^{2j} = (2j - 1)!!
    fn gaussian_even_moment(j: usize) -> f64 {
        (1..=j).map(|i| (2 * i - 1) as f64).product()
    }

    #[test]
    fn two_point_rule_is_plus_minus_one() {
        let rule = QuadratureRule::gauss_hermite(2).unwrap();
        assert!((rule.nodes()[0] + 1.0).abs() < 1e-14);
        assert!((rule.nodes()[1] - 1.0).abs() < 1e-14);
        assert!((rule.weights()[0] - 0.5).abs() < 1e-14);
        assert!((rule.weights()[1] - 0.5).abs() < 1e-14);
    }

    #[test]
    fn three_point_rule_matches_closed_form() {
        let rule = QuadratureRule::gauss_hermite(3).unwrap();
        let sqrt3 = 3.0_f64.sqrt();
        assert!((rule.nodes()[0] + sqrt3).abs() < 1e-13);
        assert_eq!(rule.nodes()[1], 0.0);
        assert!((rule.nodes()[2] - sqrt3).abs() < 1e-13);
        assert!((rule.weights()[0] - 1.0 / 6.0).abs() < 1e-14);
        assert!((rule.weights()[1] - 2.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn weights_sum_to_one_and_nodes_are_symmetric() {
        for n in [2, 5, 17, 64, 200, 513] {
            let rule = QuadratureRule::gauss_hermite(n).unwrap();
            let total: f64 = rule.weights().iter().sum();
            assert!((total - 1.0).abs() < 1e-12, "n = {n}: sum = {total}");
            for i in 0..n {
                assert_eq!(rule.nodes()[i], -rule.nodes()[n - 1 - i], "n = {n}, i = {i}");
                assert_eq!(rule.weights()[i], rule.weights()[n - 1 - i]);
            }
        }
    }

    #[test]
    fn polynomials_integrated_exactly_up_to_degree_bound() {
        for n in [2_usize, 8, 64] {
            let rule = QuadratureRule::gauss_hermite(n).unwrap();
            for j in 0..n {
                // Even moments up to degree 2n - 2 <= 2n - 1.
                let exact = gaussian_even_moment(j);
                let got = rule.integrate(|x| x.powi(2 * j as i32));
                assert!(
                    ((got - exact) / exact).abs() < 1e-10,
                    "n = {n}, moment {j}: got {got}, exact {exact}"
                );
                // Odd moments vanish; compare against the magnitude scale.
                let odd = rule.integrate(|x| x.powi(2 * j as i32 + 1));
                let scale: f64 = rule.integrate(|x| x.abs().powi(2 * j as i32 + 1));
                assert!(odd.abs() <= 1e-10 * scale.max(1.0), "n = {n}, odd {j}");
            }
        }
    }

    #[test]
    fn fourth_moment_with_dense_rule() {
        let rule = QuadratureRule::gauss_hermite(64).unwrap();
        assert!((rule.integrate(|x| x.powi(4)) - 3.0).abs() < 1e-10);
    }

    #[test]
    fn rejects_tiny_rules() {
        assert!(QuadratureRule::gauss_hermite(0).is_err());
        assert!(QuadratureRule::gauss_hermite(1).is_err());
    }
}
