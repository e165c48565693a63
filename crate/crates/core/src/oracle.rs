//! Numerical ground truth for `log det(I - K_s)_A` with the sine kernel
//! `K_s(x, y) = sin(s(x - y)) / (π(x - y))`: Nyström discretisation on
//! Gauss–Legendre nodes, and the unitary-ensemble Toeplitz determinant whose
//! `n -> ∞` limit is the same quantity.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::elliptic::GapPair;
use crate::error::{Error, Result};
use crate::linalg::{complex_lu_logdet, symmetric_eigenvalues, SquareMatrix};
use crate::quadrature::GaussLegendre;

/// Smallest `1 - λ` the eigenvalue route is trusted with.
pub const CONDITIONING_FLOOR: f64 = 1e-12;
/// Below this the determinant is too small for double precision to mean much.
pub const LOG_DET_FLOOR: f64 = -30.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleResult {
    pub log_det: f64,
    /// Nodes per interval (Nyström) or matrix size (Toeplitz) of the final evaluation.
    pub nodes_per_interval: usize,
    /// `1 - λ_max` for Nyström; the smallest LU pivot modulus for Toeplitz.
    pub smallest_one_minus_lambda: f64,
    /// Change from the previous resolution (half the nodes).
    pub error_estimate: f64,
    pub unreliable: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NystromOptions {
    pub initial_nodes: usize,
    pub max_nodes: usize,
    pub tolerance: f64,
}

impl Default for NystromOptions {
    fn default() -> Self {
        NystromOptions {
            initial_nodes: 24,
            max_nodes: 600,
            tolerance: 1e-10,
        }
    }
}

#[inline]
fn sine_kernel(s: f64, x: f64, y: f64) -> f64 {
    let d = x - y;
    if d == 0.0 {
        s / PI
    } else {
        (s * d).sin() / (PI * d)
    }
}

fn check_intervals(s: f64, intervals: &[(f64, f64)]) -> Result<Vec<(f64, f64)>> {
    if !(s > 0.0 && s.is_finite()) {
        return Err(Error::domain(format!("s must be positive and finite, got {s}")));
    }
    for &(a, b) in intervals {
        if !(a.is_finite() && b.is_finite() && a < b) {
            return Err(Error::domain(format!("invalid interval ({a}, {b})")));
        }
    }
    let mut sorted = intervals.to_vec();
    sorted.sort_by(|p, q| p.0.total_cmp(&q.0));
    for w in sorted.windows(2) {
        if w[1].0 < w[0].1 {
            return Err(Error::domain(format!(
                "intervals ({}, {}) and ({}, {}) overlap",
                w[0].0, w[0].1, w[1].0, w[1].1
            )));
        }
    }
    Ok(sorted)
}

/// Eigenvalues of the symmetrised Nyström matrix with `n` nodes per interval, ascending.
pub fn nystrom_eigenvalues(s: f64, intervals: &[(f64, f64)], n: usize) -> Result<Vec<f64>> {
    let sorted = check_intervals(s, intervals)?;
    Ok(eigenvalues_unchecked(s, &sorted, n))
}

fn eigenvalues_unchecked(s: f64, intervals: &[(f64, f64)], n: usize) -> Vec<f64> {
    let rule = GaussLegendre::cached(n);
    let mut nodes = Vec::with_capacity(n * intervals.len());
    for &(a, b) in intervals {
        nodes.extend(rule.mapped(a, b));
    }
    let m = SquareMatrix::from_fn(nodes.len(), |i, j| {
        let (xi, wi) = nodes[i];
        let (xj, wj) = nodes[j];
        wi.sqrt() * sine_kernel(s, xi, xj) * wj.sqrt()
    });
    symmetric_eigenvalues(&m)
}

fn log_det_from(eig: &[f64]) -> f64 {
    eig.iter().map(|&l| (-l).ln_1p()).sum()
}

/// `log det(I - K_s)` on a union of disjoint intervals, with default node doubling.
pub fn fredholm_logdet(s: f64, intervals: &[(f64, f64)]) -> Result<OracleResult> {
    fredholm_logdet_with(s, intervals, &NystromOptions::default())
}

pub fn fredholm_logdet_with(
    s: f64,
    intervals: &[(f64, f64)],
    opts: &NystromOptions,
) -> Result<OracleResult> {
    let sorted = check_intervals(s, intervals)?;
    if sorted.is_empty() {
        return Ok(OracleResult {
            log_det: 0.0,
            nodes_per_interval: 0,
            smallest_one_minus_lambda: 1.0,
            error_estimate: 0.0,
            unreliable: false,
        });
    }
    if opts.initial_nodes == 0 || opts.max_nodes < opts.initial_nodes {
        return Err(Error::domain("node counts must satisfy 0 < initial <= max"));
    }
    let mut n = opts.initial_nodes;
    let mut eig = eigenvalues_unchecked(s, &sorted, n);
    let mut prev = log_det_from(&eig);
    let mut change = f64::INFINITY;
    while n < opts.max_nodes {
        n = (2 * n).min(opts.max_nodes);
        eig = eigenvalues_unchecked(s, &sorted, n);
        let cur = log_det_from(&eig);
        change = (cur - prev).abs();
        prev = cur;
        if change < opts.tolerance {
            break;
        }
        if 1.0 - eig.last().copied().unwrap_or(0.0) < CONDITIONING_FLOOR {
            break;
        }
    }
    let gap = 1.0 - eig.last().copied().unwrap_or(0.0);
    let log_det = prev;
    Ok(OracleResult {
        log_det,
        nodes_per_interval: n,
        smallest_one_minus_lambda: gap,
        error_estimate: change,
        unreliable: gap < CONDITIONING_FLOOR
            || log_det < LOG_DET_FLOOR
            || !(change < opts.tolerance),
    })
}

/// Fourier coefficients `f_j`, `0 <= j < n`, of the indicator of the circle with
/// the arcs `(θa, θb)` removed.
fn arc_complement_coefficients(arcs: &[(f64, f64)], n: usize) -> Vec<Complex64> {
    let mut f = vec![Complex64::new(0.0, 0.0); n];
    if n == 0 {
        return f;
    }
    f[0] = Complex64::new(1.0 - arcs.iter().map(|(a, b)| b - a).sum::<f64>() / (2.0 * PI), 0.0);
    for (j, fj) in f.iter_mut().enumerate().skip(1) {
        let jf = j as f64;
        let mut acc = Complex64::new(0.0, 0.0);
        for &(a, b) in arcs {
            let eb = Complex64::from_polar(1.0, -jf * b);
            let ea = Complex64::from_polar(1.0, -jf * a);
            acc += (eb - ea) / Complex64::new(0.0, -2.0 * PI * jf);
        }
        *fj = -acc;
    }
    f
}

fn toeplitz_single(s: f64, intervals: &[(f64, f64)], n: usize) -> Option<(f64, f64)> {
    let scale = 2.0 * s / n as f64;
    let arcs: Vec<(f64, f64)> = intervals.iter().map(|&(a, b)| (scale * a, scale * b)).collect();
    let f = arc_complement_coefficients(&arcs, n);
    let t = SquareMatrix::from_fn(n, |j, k| {
        if j >= k {
            f[j - k]
        } else {
            f[k - j].conj()
        }
    });
    complex_lu_logdet(&t).map(|r| (r.log_abs, r.min_pivot))
}

/// `log D_n` for the arcs `2s·x/n`, `x` in the given intervals.
///
/// Needs `n >= 8s` and intervals inside `[-1, 1]`, so the arcs stay well inside one turn.
pub fn toeplitz_logdet_intervals(s: f64, intervals: &[(f64, f64)], n: usize) -> Result<OracleResult> {
    let sorted = check_intervals(s, intervals)?;
    if (n as f64) < 8.0 * s {
        return Err(Error::domain(format!("Toeplitz size n = {n} must be at least 8s = {}", 8.0 * s)));
    }
    if sorted.iter().any(|&(a, b)| a < -1.0 || b > 1.0) {
        return Err(Error::domain("Toeplitz route needs intervals inside [-1, 1]"));
    }
    let unreliable_result = |n| OracleResult {
        log_det: f64::NEG_INFINITY,
        nodes_per_interval: n,
        smallest_one_minus_lambda: 0.0,
        error_estimate: f64::INFINITY,
        unreliable: true,
    };
    let Some((full, pivot)) = toeplitz_single(s, &sorted, n) else {
        return Ok(unreliable_result(n));
    };
    let half = n / 2;
    let change = if (half as f64) >= 8.0 * s && half > 0 {
        toeplitz_single(s, &sorted, half)
            .map(|(h, _)| (full - h).abs())
            .unwrap_or(f64::INFINITY)
    } else {
        f64::INFINITY
    };
    Ok(OracleResult {
        log_det: full,
        nodes_per_interval: n,
        smallest_one_minus_lambda: pivot,
        error_estimate: change,
        unreliable: pivot < CONDITIONING_FLOOR || full < LOG_DET_FLOOR,
    })
}

/// Toeplitz route on `(-1, v1) ∪ (v2, 1)`.
pub fn toeplitz_logdet(s: f64, g: GapPair, n: usize) -> Result<OracleResult> {
    toeplitz_logdet_intervals(s, &g.intervals(), n)
}

/// `|det_A - det_{A1} det_{A2}|` for `A1 = (-w, -w + 1)`, `A2 = (w - 1, w)`.
pub fn separation_factorization_gap(u: f64, w: f64) -> Result<f64> {
    if !(u > 2.0 && w > 2.0) {
        return Err(Error::domain(format!("need u, w > 2, got u = {u}, w = {w}")));
    }
    let a1 = (-w, -w + 1.0);
    let a2 = (w - 1.0, w);
    let both = fredholm_logdet(u, &[a1, a2])?;
    let left = fredholm_logdet(u, &[a1])?;
    let right = fredholm_logdet(u, &[a2])?;
    Ok((both.log_det.exp() - (left.log_det + right.log_det).exp()).abs())
}
