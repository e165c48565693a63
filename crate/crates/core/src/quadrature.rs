//! Gauss–Legendre rules and the endpoint-singular integrator used for every
//! elliptic integral in the crate.

use std::collections::HashMap;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};

/// Nodes and weights of an `n`-point Gauss–Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    /// Builds the rule by Newton iteration on the Legendre recurrence.
    pub fn new(n: usize) -> Self {
        assert!(n > 0, "Gauss-Legendre rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            // Tricomi's initial guess, then Newton.
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        GaussLegendre { nodes, weights }
    }

    /// Shared, lazily built rule of size `n`.
    pub fn cached(n: usize) -> Arc<GaussLegendre> {
        static CACHE: OnceLock<Mutex<HashMap<usize, Arc<GaussLegendre>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let mut guard = cache.lock().unwrap_or_else(|e| e.into_inner());
        guard
            .entry(n)
            .or_insert_with(|| Arc::new(GaussLegendre::new(n)))
            .clone()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Nodes and weights mapped affinely onto `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&x, &w)| (mid + half * x, half * w))
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let nf = n as f64;
    let dp = nf * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Composite Gauss–Legendre over `panels` equal sub-intervals of `[a, b]`,
/// generic in the value type so that complex integrands work as well.
pub fn composite<T, F>(a: f64, b: f64, panels: usize, nodes: usize, f: F) -> T
where
    T: Default + std::ops::Add<Output = T> + std::ops::Mul<f64, Output = T>,
    F: Fn(f64) -> T,
{
    let rule = GaussLegendre::cached(nodes);
    let h = (b - a) / panels as f64;
    let mut acc = T::default();
    for p in 0..panels {
        let lo = a + h * p as f64;
        for (x, w) in rule.mapped(lo, lo + h) {
            acc = acc + f(x) * w;
        }
    }
    acc
}

/// A quadrature point on `[a, b]` that also carries the distances to both ends,
/// computed without cancellation.
#[derive(Debug, Clone, Copy)]
pub struct EndpointNode {
    pub x: f64,
    /// `x - a`
    pub from_left: f64,
    /// `b - x`
    pub to_right: f64,
}

/// Which endpoints carry an inverse square-root factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SqrtSingularity {
    Both,
    Left,
    Right,
}

/// Settings of [`integrate_sqrt_endpoints`].
#[derive(Debug, Clone, Copy)]
pub struct EndpointRule {
    pub initial_nodes: usize,
    pub max_nodes: usize,
    pub tolerance: f64,
}

impl Default for EndpointRule {
    fn default() -> Self {
        EndpointRule {
            initial_nodes: 200,
            max_nodes: 3200,
            tolerance: 1e-13,
        }
    }
}

/// Integrates `g(x) / sqrt((x - a)(b - x))` over `(a, b)`, or the one-sided
/// variant selected by `singular`.
///
/// The substitution `x = a + (b - a) sin²θ` turns the square-root endpoints into
/// a smooth integrand on `[0, π/2]`. Points in `external` are singularities of
/// `g` outside `(a, b)`; panels in θ are graded geometrically towards an endpoint
/// that has one of them close by. The per-panel node count is doubled until two
/// successive sums agree to the tolerance.
pub fn integrate_sqrt_endpoints<const N: usize, G>(
    a: f64,
    b: f64,
    singular: SqrtSingularity,
    external: &[f64],
    rule: EndpointRule,
    g: G,
) -> Result<[f64; N]>
where
    G: Fn(EndpointNode) -> [f64; N],
{
    let len = b - a;
    if !(len > 0.0) {
        return Err(Error::domain(format!("empty integration range ({a}, {b})")));
    }
    let near_left = external
        .iter()
        .map(|&e| (e - a).abs())
        .fold(f64::INFINITY, f64::min);
    let near_right = external
        .iter()
        .map(|&e| (e - b).abs())
        .fold(f64::INFINITY, f64::min);
    let breaks = graded_breakpoints(near_left / len, near_right / len);

    let sum_with = |nodes: usize| -> [f64; N] {
        let gl = GaussLegendre::cached(nodes);
        let mut acc = [0.0; N];
        for win in breaks.windows(2) {
            for (theta, w) in gl.mapped(win[0], win[1]) {
                let (s, c) = theta.sin_cos();
                let node = EndpointNode {
                    x: a + len * s * s,
                    from_left: len * s * s,
                    to_right: len * c * c,
                };
                let jac = match singular {
                    SqrtSingularity::Both => 2.0,
                    SqrtSingularity::Left => 2.0 * len.sqrt() * c,
                    SqrtSingularity::Right => 2.0 * len.sqrt() * s,
                };
                let vals = g(node);
                for k in 0..N {
                    acc[k] += w * jac * vals[k];
                }
            }
        }
        acc
    };

    let mut nodes = rule.initial_nodes.max(2);
    let mut prev = sum_with(nodes);
    loop {
        let next_nodes = nodes * 2;
        let next = sum_with(next_nodes);
        let change = prev
            .iter()
            .zip(&next)
            .map(|(p, q)| (p - q).abs() / q.abs().max(1.0))
            .fold(0.0, f64::max);
        if change < rule.tolerance {
            return Ok(next);
        }
        if next_nodes >= rule.max_nodes {
            return Err(Error::QuadratureNotConverged {
                a,
                b,
                change,
                nodes: next_nodes,
            });
        }
        nodes = next_nodes;
        prev = next;
    }
}

/// Breakpoints on `[0, π/2]`, geometrically refined towards an end whose nearest
/// external singularity sits at relative distance `rel` (in units of `b - a`).
fn graded_breakpoints(rel_left: f64, rel_right: f64) -> Vec<f64> {
    const RATIO: f64 = 0.25;
    // In θ the distance to a singularity at relative distance δ is about asinh(√δ).
    let scale = |rel: f64| rel.sqrt().asinh();
    let mut left = vec![];
    let rho_l = scale(rel_left);
    if rho_l < 0.5 {
        let mut t = FRAC_PI_4 * RATIO;
        while t > rho_l * 0.5 {
            left.push(t);
            t *= RATIO;
        }
        left.push(t);
    }
    let mut right = vec![];
    let rho_r = scale(rel_right);
    if rho_r < 0.5 {
        let mut t = FRAC_PI_4 * RATIO;
        while t > rho_r * 0.5 {
            right.push(FRAC_PI_2 - t);
            t *= RATIO;
        }
        right.push(FRAC_PI_2 - t);
    }
    let mut pts = vec![0.0];
    pts.extend(left.into_iter().rev());
    pts.push(FRAC_PI_4);
    pts.extend(right);
    pts.push(FRAC_PI_2);
    pts
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_rule_integrates_polynomials_exactly() {
        // a 7-point rule is exact through degree 13
        let gl = GaussLegendre::new(7);
        let even: f64 = gl.nodes.iter().zip(&gl.weights).map(|(x, w)| w * x.powi(12)).sum();
        assert!((even - 2.0 / 13.0).abs() < 1e-15);
        let odd: f64 = gl.nodes.iter().zip(&gl.weights).map(|(x, w)| w * x.powi(13)).sum();
        assert!(odd.abs() < 1e-15);
    }

    #[test]
    fn large_rule_weights_sum_to_two() {
        for n in [200, 400, 1600] {
            let gl = GaussLegendre::cached(n);
            let s: f64 = gl.weights.iter().sum();
            assert!((s - 2.0).abs() < 1e-13, "n={n}: {s}");
            assert!(gl.nodes.windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn arcsine_integral_is_pi() {
        // ∫_{-1}^{1} dx / sqrt(1 - x²) = π
        let [v] = integrate_sqrt_endpoints(
            -1.0,
            1.0,
            SqrtSingularity::Both,
            &[],
            EndpointRule::default(),
            |_| [1.0],
        )
        .unwrap();
        assert!((v - PI).abs() < 1e-14);
    }

    #[test]
    fn one_sided_singularity() {
        // ∫_0^1 dx / sqrt(1 - x) = 2, ∫_0^1 x dx / sqrt(x) = 2/3
        let [r] = integrate_sqrt_endpoints(0.0, 1.0, SqrtSingularity::Right, &[], EndpointRule::default(), |_| [1.0])
            .unwrap();
        assert!((r - 2.0).abs() < 1e-14);
        let [l] = integrate_sqrt_endpoints(0.0, 1.0, SqrtSingularity::Left, &[], EndpointRule::default(), |n| [n.x])
            .unwrap();
        assert!((l - 2.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn nearby_external_singularity_is_resolved() {
        // ∫_0^1 dx / sqrt(x (1 - x) (x + ε)) has a near-logarithmic peak at 0.
        let eps = 1e-8;
        let [v] = integrate_sqrt_endpoints(
            0.0,
            1.0,
            SqrtSingularity::Both,
            &[-eps],
            EndpointRule::default(),
            |n| [1.0 / (n.from_left + eps).sqrt()],
        )
        .unwrap();
        // For small ε the value is log(16/ε) + O(ε log ε).
        let approx = (16.0 / eps).ln();
        assert!((v - approx).abs() < 1e-6, "{v} vs {approx}");
    }
}
