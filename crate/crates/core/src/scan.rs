//! Grid scans of the first Hermite coefficient under shift, scale, and
//! affine perturbations.
//!
//! For a non-constant transform `G`, the set of perturbation parameters at
//! which the rank stays at two or more is the zero set of the analytic
//! function `U = E[Z * G(x + y Z)]`: isolated points on one-dimensional
//! shift or scale axes, and a curve of zero area in the affine plane. The
//! scans evaluate `U` on a grid, locate its zeros (sign changes plus
//! tangential touches), and attach the rank of the perturbed transform at
//! every grid point, so refining the grid exhibits the isolation and
//! measure-zero structure directly.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::function::FunctionSpec;
use crate::hermite::{expand, hermite_rank, Rank};
use crate::quadrature::QuadratureRule;

/// A uniform grid on `[lo, hi]` with `steps` points, endpoints included.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AxisSpec {
    pub lo: f64,
    pub hi: f64,
    pub steps: usize,
}

impl AxisSpec {
    pub fn new(lo: f64, hi: f64, steps: usize) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::Domain(format!(
                "axis needs finite lo < hi, got [{lo}, {hi}]"
            )));
        }
        if steps < 3 {
            return Err(Error::Domain(format!(
                "axis needs at least 3 steps, got {steps}"
            )));
        }
        Ok(Self { lo, hi, steps })
    }

    fn require_positive(&self, what: &str) -> Result<()> {
        if self.lo <= 0.0 {
            return Err(Error::Domain(format!(
                "{what} axis must stay inside (0, inf), got lo = {}",
                self.lo
            )));
        }
        Ok(())
    }

    pub fn points(&self) -> Vec<f64> {
        let d = (self.hi - self.lo) / (self.steps - 1) as f64;
        (0..self.steps).map(|i| self.lo + d * i as f64).collect()
    }

    /// Same interval with the spacing divided by `factor`; keeps every
    /// original point on the refined grid.
    pub fn refined(&self, factor: usize) -> Self {
        Self {
            lo: self.lo,
            hi: self.hi,
            steps: factor * (self.steps - 1) + 1,
        }
    }
}

/// Scan domain: one axis for shift or scale scans, two for affine scans.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanGrid {
    pub axis1: AxisSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub axis2: Option<AxisSpec>,
}

impl ScanGrid {
    pub fn one_dim(axis: AxisSpec) -> Self {
        Self { axis1: axis, axis2: None }
    }

    pub fn two_dim(axis1: AxisSpec, axis2: AxisSpec) -> Self {
        Self {
            axis1,
            axis2: Some(axis2),
        }
    }

    pub fn refined(&self, factor: usize) -> Self {
        Self {
            axis1: self.axis1.refined(factor),
            axis2: self.axis2.map(|a| a.refined(factor)),
        }
    }
}

/// How a zero of `U` was detected.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ZeroKind {
    /// `U` changes sign across the cell.
    SignChange,
    /// `U` touches zero without changing sign (even-order zero).
    Tangential,
}

/// One detected zero, anchored at a grid cell.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ZeroCell {
    /// Cell indices along (axis1, axis2); the second index is 0 for 1-D scans.
    pub cell: (usize, usize),
    pub kind: ZeroKind,
    /// Grid coordinates of the cell anchor.
    pub at: (f64, f64),
}

/// Result of one scan: the sampled `U` surface, its zeros, and the rank of
/// the perturbed transform at every grid point (row-major over axis2).
#[derive(Debug, Clone, Serialize)]
pub struct ZeroSetReport {
    /// Grid values along the scanned axes.
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    /// `U` at `(xs[i], ys[j])`, stored row-major as `u[i * ys.len() + j]`.
    pub u_values: Vec<f64>,
    /// Cells where `U` changes sign.
    pub sign_change_cells: Vec<ZeroCell>,
    /// Tangential zero locations (no sign change).
    pub tangential_cells: Vec<ZeroCell>,
    /// Rank at each grid point, same layout as `u_values`; 0 encodes the
    /// constant sentinel (cannot occur for valid scan inputs).
    pub rank_map: Vec<u32>,
    /// Fraction of grid cells containing a detected zero of `U`.
    pub zero_fraction: f64,
}

impl ZeroSetReport {
    pub fn zero_cell_count(&self) -> usize {
        self.sign_change_cells.len() + self.tangential_cells.len()
    }

    pub fn rank_at(&self, i: usize, j: usize) -> u32 {
        self.rank_map[i * self.ys.len() + j]
    }

    pub fn u_at(&self, i: usize, j: usize) -> f64 {
        self.u_values[i * self.ys.len() + j]
    }
}

/// First Hermite coefficient of the perturbed transform:
/// `U(x, y) = E[Z * G(x + y Z)]`. Requires `y > 0`.
pub fn first_coefficient(
    spec: &FunctionSpec,
    x: f64,
    y: f64,
    rule: &QuadratureRule,
) -> Result<f64> {
    if !(y.is_finite() && y > 0.0) {
        return Err(Error::Domain(format!("scale must be positive, got {y}")));
    }
    if !x.is_finite() {
        return Err(Error::Domain(format!("shift must be finite, got {x}")));
    }
    let mut sum = 0.0;
    for (&node, &w) in rule.nodes().iter().zip(rule.weights()) {
        let g = spec.eval(x + y * node);
        if !g.is_finite() {
            return Err(Error::Evaluation(format!(
                "transform value is {g} at quadrature node {node}"
            )));
        }
        sum += w * node * g;
    }
    Ok(sum)
}

/// Shared knobs for the scan operations.
#[derive(Debug, Clone, Copy)]
pub struct ScanOptions {
    /// Relative tolerance for "coefficient is zero"; also the rank tolerance.
    pub tol: f64,
    /// Truncation order for the per-point rank expansions.
    pub order: usize,
}

impl Default for ScanOptions {
    fn default() -> Self {
        Self {
            tol: crate::hermite::DEFAULT_RANK_TOL,
            order: crate::hermite::DEFAULT_TRUNCATION,
        }
    }
}

fn reject_constant(spec: &FunctionSpec, opts: &ScanOptions, rule: &QuadratureRule) -> Result<()> {
    let expansion = expand(spec, opts.order, rule)?;
    match hermite_rank(&expansion, opts.tol)? {
        Rank::Constant => Err(Error::ConstantFunction),
        Rank::Order(_) => Ok(()),
    }
}

/// A spec counts as symmetric when every odd coefficient of its unperturbed
/// expansion sits below the tolerance.
fn reject_symmetric(spec: &FunctionSpec, opts: &ScanOptions, rule: &QuadratureRule) -> Result<()> {
    let expansion = expand(spec, opts.order, rule)?;
    let scale = expansion.l2_norm_sq().max(0.0).sqrt();
    let magnitudes = expansion.coefficient_magnitudes();
    let has_odd = magnitudes
        .iter()
        .enumerate()
        .any(|(m, &mag)| m % 2 == 1 && mag >= opts.tol * scale);
    if has_odd {
        Ok(())
    } else {
        Err(Error::SymmetricFunction)
    }
}

fn rank_order_at(
    spec: &FunctionSpec,
    x: f64,
    y: f64,
    opts: &ScanOptions,
    rule: &QuadratureRule,
) -> Result<u32> {
    let perturbed = spec.perturbed(x, y)?;
    let expansion = expand(&perturbed, opts.order, rule)?;
    Ok(match hermite_rank(&expansion, opts.tol)? {
        Rank::Constant => 0,
        Rank::Order(k) => k as u32,
    })
}

/// Zeros of a sampled 1-D function. Runs of near-zero samples collapse to a
/// single zero; a run whose neighbors disagree in sign is a crossing, one
/// whose neighbors agree is kept only if a local quadratic fit through the
/// run actually touches zero (filters small-but-nonvanishing plateaus).
fn detect_zeros_1d(points: &[f64], u: &[f64], tol: f64) -> (Vec<(usize, ZeroKind)>, usize) {
    let n = u.len();
    let u_scale = u.iter().fold(0.0_f64, |a, &v| a.max(v.abs()));
    let tau = tol * u_scale.max(1.0);
    let near_zero: Vec<bool> = u.iter().map(|&v| v.abs() <= tau).collect();

    let mut zeros: Vec<(usize, ZeroKind)> = Vec::new();
    let mut cells_with_zero = 0usize;

    // Plain sign changes between consecutive clearly-signed samples.
    for i in 0..n - 1 {
        if !near_zero[i] && !near_zero[i + 1] && u[i] * u[i + 1] < 0.0 {
            zeros.push((i, ZeroKind::SignChange));
            cells_with_zero += 1;
        }
    }

    // Runs of near-zero samples.
    let mut i = 0;
    while i < n {
        if !near_zero[i] {
            i += 1;
            continue;
        }
        let start = i;
        while i < n && near_zero[i] {
            i += 1;
        }
        let end = i - 1; // inclusive
        let cell = if start > 0 { start - 1 } else { start };
        let left = if start > 0 { Some(u[start - 1]) } else { None };
        let right = if end + 1 < n { Some(u[end + 1]) } else { None };
        match (left, right) {
            (Some(l), Some(r)) if l * r < 0.0 => {
                zeros.push((cell, ZeroKind::SignChange));
                cells_with_zero += 1;
            }
            (Some(l), Some(r)) => {
                // Same-sign neighbors: accept as a tangential zero only when
                // the parabola through (left, run center, right) dips to zero.
                let mid = (start + end) / 2;
                let h = points[1] - points[0];
                let half_span = (mid - (start - 1)) as f64 * h;
                let vertex = quadratic_vertex_value(l, u[mid], r, half_span);
                if vertex.abs() <= tau.max(1e-12) {
                    zeros.push((cell, ZeroKind::Tangential));
                    cells_with_zero += 1;
                }
            }
            // Runs touching the boundary count once, as tangential.
            _ => {
                zeros.push((cell, ZeroKind::Tangential));
                cells_with_zero += 1;
            }
        }
    }

    (zeros, cells_with_zero)
}

/// Minimum-magnitude value of the parabola through `(-h, l)`, `(0, mid)`,
/// `(h, r)` over its vertex, used as the touch test for even-order zeros.
fn quadratic_vertex_value(l: f64, mid: f64, r: f64, h: f64) -> f64 {
    let a = (l + r - 2.0 * mid) / (2.0 * h * h);
    let b = (r - l) / (2.0 * h);
    if a == 0.0 {
        return mid;
    }
    let x_star = -b / (2.0 * a);
    if x_star.abs() > h {
        return mid;
    }
    mid + b * x_star + a * x_star * x_star
}

fn scan_one_dim(
    spec: &FunctionSpec,
    points: &[f64],
    fixed_shift: Option<f64>,
    opts: &ScanOptions,
    rule: &QuadratureRule,
) -> Result<ZeroSetReport> {
    // fixed_shift = Some(0): scale scan over points; None: shift scan at scale 1.
    let coords: Vec<(f64, f64)> = points
        .iter()
        .map(|&p| match fixed_shift {
            Some(x0) => (x0, p),
            None => (p, 1.0),
        })
        .collect();
    let u: Vec<f64> = coords
        .iter()
        .map(|&(x, y)| first_coefficient(spec, x, y, rule))
        .collect::<Result<_>>()?;
    let rank_map: Vec<u32> = coords
        .par_iter()
        .map(|&(x, y)| rank_order_at(spec, x, y, opts, rule))
        .collect::<Result<_>>()?;

    let (zeros, cells_with_zero) = detect_zeros_1d(points, &u, opts.tol);
    let (xs, ys) = match fixed_shift {
        Some(x0) => (vec![x0], points.to_vec()),
        None => (points.to_vec(), vec![1.0]),
    };
    let make_cell = |(idx, kind): (usize, ZeroKind)| match fixed_shift {
        Some(x0) => ZeroCell {
            cell: (0, idx),
            kind,
            at: (x0, points[idx]),
        },
        None => ZeroCell {
            cell: (idx, 0),
            kind,
            at: (points[idx], 1.0),
        },
    };
    let sign_change_cells: Vec<ZeroCell> = zeros
        .iter()
        .filter(|(_, k)| *k == ZeroKind::SignChange)
        .map(|&z| make_cell(z))
        .collect();
    let tangential_cells: Vec<ZeroCell> = zeros
        .iter()
        .filter(|(_, k)| *k == ZeroKind::Tangential)
        .map(|&z| make_cell(z))
        .collect();

    // For 1-D scans u_values is laid out along the varying axis either way.
    Ok(ZeroSetReport {
        xs,
        ys,
        u_values: u,
        sign_change_cells,
        tangential_cells,
        rank_map,
        zero_fraction: cells_with_zero as f64 / (points.len() - 1) as f64,
    })
}

/// Scan `U(x) = E[Z G(x + Z)]` over a shift grid. The spec must not be
/// constant.
pub fn scan_shift(
    spec: &FunctionSpec,
    grid: &ScanGrid,
    opts: &ScanOptions,
    rule: &QuadratureRule,
) -> Result<ZeroSetReport> {
    reject_constant(spec, opts, rule)?;
    scan_one_dim(spec, &grid.axis1.points(), None, opts, rule)
}

/// Scan `U(y) = E[Z G(y Z)]` over a positive scale grid. The spec must have
/// an odd component; symmetric transforms keep rank two at every scale.
pub fn scan_scale(
    spec: &FunctionSpec,
    grid: &ScanGrid,
    opts: &ScanOptions,
    rule: &QuadratureRule,
) -> Result<ZeroSetReport> {
    grid.axis1.require_positive("scale")?;
    reject_symmetric(spec, opts, rule)?;
    scan_one_dim(spec, &grid.axis1.points(), Some(0.0), opts, rule)
}

/// Scan `U(x, y)` over a shift-by-scale grid. Cells whose corner values
/// straddle zero count as zero cells; for a non-degenerate spec their
/// fraction shrinks like one over the resolution.
pub fn scan_affine(
    spec: &FunctionSpec,
    grid: &ScanGrid,
    opts: &ScanOptions,
    rule: &QuadratureRule,
) -> Result<ZeroSetReport> {
    let axis2 = grid
        .axis2
        .ok_or_else(|| Error::Domain("affine scan needs a two-axis grid".into()))?;
    axis2.require_positive("scale")?;
    reject_constant(spec, opts, rule)?;

    let xs = grid.axis1.points();
    let ys = axis2.points();
    let ny = ys.len();

    let rows: Vec<Vec<(f64, u32)>> = xs
        .par_iter()
        .map(|&x| {
            ys.iter()
                .map(|&y| {
                    let u = first_coefficient(spec, x, y, rule)?;
                    let r = rank_order_at(spec, x, y, opts, rule)?;
                    Ok((u, r))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;

    let mut u_values = Vec::with_capacity(xs.len() * ny);
    let mut rank_map = Vec::with_capacity(xs.len() * ny);
    for row in rows {
        for (u, r) in row {
            u_values.push(u);
            rank_map.push(r);
        }
    }

    let u_scale = u_values.iter().fold(0.0_f64, |a, &v| a.max(v.abs()));
    let tau = opts.tol * u_scale.max(1.0);
    let nx = xs.len();
    // Half-open sign convention: near-zero samples count as positive, so a
    // zero curve running exactly along a grid line is charged to the cell on
    // its negative side only. Refining the grid then scales the cell count
    // instead of double-counting grid-aligned zeros.
    let eff_sign = |v: f64| if v < -tau { -1 } else { 1 };
    let mut sign_change_cells = Vec::new();
    let mut is_sign_change = vec![false; (nx - 1) * (ny - 1)];
    for i in 0..nx - 1 {
        for j in 0..ny - 1 {
            let corners = [
                u_values[i * ny + j],
                u_values[i * ny + j + 1],
                u_values[(i + 1) * ny + j],
                u_values[(i + 1) * ny + j + 1],
            ];
            let signs: Vec<i32> = corners.iter().map(|&v| eff_sign(v)).collect();
            if signs.iter().any(|&s| s < 0) && signs.iter().any(|&s| s > 0) {
                is_sign_change[i * (ny - 1) + j] = true;
                sign_change_cells.push(ZeroCell {
                    cell: (i, j),
                    kind: ZeroKind::SignChange,
                    at: (xs[i], ys[j]),
                });
            }
        }
    }
    // Near-zero grid points not adjacent to any crossing cell are touch
    // points of the zero curve; attribute each to one cell and deduplicate.
    let mut tangential_cells = Vec::new();
    let mut touched = vec![false; (nx - 1) * (ny - 1)];
    for i in 0..nx {
        for j in 0..ny {
            if u_values[i * ny + j].abs() > tau {
                continue;
            }
            let ci0 = i.saturating_sub(1);
            let cj0 = j.saturating_sub(1);
            let explained = (ci0..=i.min(nx - 2)).any(|ci| {
                (cj0..=j.min(ny - 2)).any(|cj| is_sign_change[ci * (ny - 1) + cj])
            });
            if explained {
                continue;
            }
            let ci = i.min(nx - 2);
            let cj = j.min(ny - 2);
            if !touched[ci * (ny - 1) + cj] {
                touched[ci * (ny - 1) + cj] = true;
                tangential_cells.push(ZeroCell {
                    cell: (ci, cj),
                    kind: ZeroKind::Tangential,
                    at: (xs[ci], ys[cj]),
                });
            }
        }
    }
    let total_cells = (nx - 1) * (ny - 1);
    let zero_fraction =
        (sign_change_cells.len() + tangential_cells.len()) as f64 / total_cells as f64;
    Ok(ZeroSetReport {
        xs,
        ys,
        u_values,
        sign_change_cells,
        tangential_cells,
        rank_map,
        zero_fraction,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function::BaseFunction;

    fn rule() -> QuadratureRule {
        QuadratureRule::gauss_hermite(200).unwrap()
    }

    fn opts() -> ScanOptions {
        ScanOptions::default()
    }

    #[test]
    fn first_coefficient_closed_forms() {
        let r = rule();
        let square = FunctionSpec::polynomial(&[0.0, 0.0, 1.0]).unwrap();
        for &(x, y) in &[(0.4, 0.9), (-1.1, 1.7), (0.0, 1.0)] {
            let u = first_coefficient(&square, x, y, &r).unwrap();
            assert!((u - 2.0 * x * y).abs() < 1e-11, "got {u} at ({x}, {y})");
        }
        let exp = FunctionSpec::from_base(BaseFunction::Exp).unwrap();
        let u = first_coefficient(&exp, 0.3, 1.2, &r).unwrap();
        assert!((u - 3.3278337167571575).abs() < 1e-10);
    }

    #[test]
    fn shift_scan_of_centered_square_finds_one_zero() {
        let r = rule();
        let spec = FunctionSpec::polynomial(&[-1.0, 0.0, 1.0]).unwrap();
        let grid = ScanGrid::one_dim(AxisSpec::new(-1.0, 1.0, 201).unwrap());
        let report = scan_shift(&spec, &grid, &opts(), &r).unwrap();
        assert_eq!(report.zero_cell_count(), 1);
        // Rank collapses to one away from the zero, stays two at it.
        let mid = 100; // x = 0
        assert_eq!(report.rank_map[mid], 2);
        for (i, &rank) in report.rank_map.iter().enumerate() {
            if i != mid {
                assert_eq!(rank, 1, "rank at x = {}", report.xs[i]);
            }
        }
    }

    #[test]
    fn shift_scan_of_identity_has_no_zeros() {
        let r = rule();
        let spec = FunctionSpec::polynomial(&[0.0, 1.0]).unwrap();
        let grid = ScanGrid::one_dim(AxisSpec::new(-2.0, 2.0, 101).unwrap());
        let report = scan_shift(&spec, &grid, &opts(), &r).unwrap();
        assert_eq!(report.zero_cell_count(), 0);
        assert!(report.rank_map.iter().all(|&k| k == 1));
    }

    #[test]
    fn shift_scan_detects_tangential_zero_of_odd_cubic() {
        // U(x) = E[H_3(Z + x) Z] = 3 x^2: touches zero at the origin.
        let r = rule();
        let spec = FunctionSpec::hermite_combo(&[0.0, 0.0, 0.0, 1.0]).unwrap();
        let grid = ScanGrid::one_dim(AxisSpec::new(-1.0, 1.0, 201).unwrap());
        let report = scan_shift(&spec, &grid, &opts(), &r).unwrap();
        assert_eq!(report.sign_change_cells.len(), 0);
        assert_eq!(report.tangential_cells.len(), 1);
        assert!(report.tangential_cells[0].at.0.abs() < 0.02);
    }

    #[test]
    fn scale_scan_of_pure_third_hermite_finds_unit_scale() {
        // U(y) = 3y(y^2 - 1): a single interior zero at y = 1.
        let r = rule();
        let spec = FunctionSpec::hermite_combo(&[0.0, 0.0, 0.0, 1.0]).unwrap();
        let grid = ScanGrid::one_dim(AxisSpec::new(0.01, 2.0, 200).unwrap());
        let report = scan_scale(&spec, &grid, &opts(), &r).unwrap();
        assert_eq!(report.zero_cell_count(), 1);
        let zero = report.sign_change_cells[0];
        assert!((zero.at.1 - 1.0).abs() < 0.02, "zero at y = {}", zero.at.1);
        // At y = 1 the perturbation is the identity, so the original rank
        // three survives; everywhere else it collapses to one.
        for (j, &rank) in report.rank_map.iter().enumerate() {
            let y = report.ys[j];
            if (y - 1.0).abs() < 1e-9 {
                assert_eq!(rank, 3);
            } else {
                assert_eq!(rank, 1, "rank at y = {y}");
            }
        }
    }

    #[test]
    fn scale_scan_of_cube_has_no_zeros() {
        // U(y) = 3 y^3 > 0 on the positive axis.
        let r = rule();
        let spec = FunctionSpec::polynomial(&[0.0, 0.0, 0.0, 1.0]).unwrap();
        let grid = ScanGrid::one_dim(AxisSpec::new(0.05, 2.0, 120).unwrap());
        let report = scan_scale(&spec, &grid, &opts(), &r).unwrap();
        assert_eq!(report.zero_cell_count(), 0);
        assert!(report.rank_map.iter().all(|&k| k == 1));
    }

    #[test]
    fn scale_scan_rejects_symmetric_and_shift_scan_rejects_constant() {
        let r = rule();
        let square = FunctionSpec::polynomial(&[0.0, 0.0, 1.0]).unwrap();
        let grid = ScanGrid::one_dim(AxisSpec::new(0.1, 2.0, 50).unwrap());
        match scan_scale(&square, &grid, &opts(), &r) {
            Err(Error::SymmetricFunction) => {}
            other => panic!("expected symmetric rejection, got {other:?}"),
        }
        let constant = FunctionSpec::polynomial(&[3.0]).unwrap();
        let sgrid = ScanGrid::one_dim(AxisSpec::new(-1.0, 1.0, 50).unwrap());
        match scan_shift(&constant, &sgrid, &opts(), &r) {
            Err(Error::ConstantFunction) => {}
            other => panic!("expected constant rejection, got {other:?}"),
        }
    }

    #[test]
    fn affine_scan_of_square_zeroes_on_the_shift_axis() {
        let r = rule();
        let spec = FunctionSpec::polynomial(&[0.0, 0.0, 1.0]).unwrap();
        let grid = ScanGrid::two_dim(
            AxisSpec::new(-1.0, 1.0, 40).unwrap(),
            AxisSpec::new(0.05, 2.0, 40).unwrap(),
        );
        let report = scan_affine(&spec, &grid, &opts(), &r).unwrap();
        // Zeros only where the cell straddles x = 0: one cell column.
        assert!(report.zero_cell_count() >= 39 - 1);
        for cell in report
            .sign_change_cells
            .iter()
            .chain(&report.tangential_cells)
        {
            assert!(cell.at.0.abs() < 0.06, "zero cell at x = {}", cell.at.0);
        }
        // Identity transform never loses rank one.
        let identity = FunctionSpec::polynomial(&[0.0, 1.0]).unwrap();
        let report = scan_affine(&identity, &grid, &opts(), &r).unwrap();
        assert_eq!(report.zero_cell_count(), 0);
    }

    #[test]
    fn affine_scan_of_pure_third_hermite_zeroes_on_unit_circle() {
        // U(x, y) = 3y (x^2 + y^2 - 1): the zero set in the upper half plane
        // is the unit circle.
        let r = rule();
        let spec = FunctionSpec::hermite_combo(&[0.0, 0.0, 0.0, 1.0]).unwrap();
        let grid = ScanGrid::two_dim(
            AxisSpec::new(-1.5, 1.5, 61).unwrap(),
            AxisSpec::new(0.05, 1.5, 59).unwrap(),
        );
        let report = scan_affine(&spec, &grid, &opts(), &r).unwrap();
        assert!(!report.sign_change_cells.is_empty());
        for cell in &report.sign_change_cells {
            let (x, y) = cell.at;
            let radius = (x * x + y * y).sqrt();
            assert!(
                (radius - 1.0).abs() < 0.1,
                "zero cell at ({x}, {y}), radius {radius}"
            );
        }
        // Quadrature cross-check of the closed form on a few circle points.
        for &(x, y) in &[(0.6, 0.8), (0.8, 0.6), (0.0, 1.0)] {
            let u = first_coefficient(&spec, x, y, &r).unwrap();
            assert!(u.abs() < 1e-10, "U({x}, {y}) = {u}");
        }
    }

    #[test]
    fn affine_zero_fraction_halves_under_refinement() {
        let r = rule();
        let spec = FunctionSpec::polynomial(&[0.0, 0.0, 1.0]).unwrap();
        let coarse = ScanGrid::two_dim(
            AxisSpec::new(-1.0, 1.0, 30).unwrap(),
            AxisSpec::new(0.05, 2.0, 30).unwrap(),
        );
        let fine = coarse.refined(2);
        let f_coarse = scan_affine(&spec, &coarse, &opts(), &r).unwrap().zero_fraction;
        let f_fine = scan_affine(&spec, &fine, &opts(), &r).unwrap().zero_fraction;
        let ratio = f_fine / f_coarse;
        assert!(
            (0.35..=0.65).contains(&ratio),
            "fractions {f_coarse} -> {f_fine}, ratio {ratio}"
        );
    }
}
