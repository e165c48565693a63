//! Elliptic integrals of the two-cut geometry.
//!
//! With `p(x) = (x² - 1)(x - v1)(x - v2)` the moments
//!
//! ```text
//! I_j = ∫_{v2}^{1} x^j dx / sqrt|p(x)|,    J_j = ∫_{v1}^{v2} x^j dx / sqrt|p(x)|
//! ```
//!
//! are the A- and B-cycle periods of the surface `w² = p(z)`. Complete integrals
//! `K`, `E` use the modulus convention `K(k) = ∫_0^1 dt / sqrt((1 - t²)(1 - k²t²))`.

use serde::{Deserialize, Serialize};
use std::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};
use crate::quadrature::{integrate_sqrt_endpoints, EndpointRule, SqrtSingularity};

/// Smallest admissible distance between two branch points.
pub const MIN_ENDPOINT_SEPARATION: f64 = 1e-12;

/// The gap set `A = (-1, v1) ∪ (v2, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GapPair {
    v1: f64,
    v2: f64,
}

impl GapPair {
    pub fn new(v1: f64, v2: f64) -> Result<Self> {
        if !(v1.is_finite() && v2.is_finite()) {
            return Err(Error::domain("gap endpoints must be finite"));
        }
        if !(-1.0 < v1 && v1 < v2 && v2 < 1.0) {
            return Err(Error::domain(format!(
                "need -1 < v1 < v2 < 1, got v1 = {v1}, v2 = {v2}"
            )));
        }
        Ok(GapPair { v1, v2 })
    }

    /// The centred pair `(-v, v)`.
    pub fn symmetric(v: f64) -> Result<Self> {
        GapPair::new(-v, v)
    }

    pub fn v1(&self) -> f64 {
        self.v1
    }

    pub fn v2(&self) -> f64 {
        self.v2
    }

    /// Half-width `ν = (v2 - v1) / 2` of the band between the gaps.
    pub fn nu(&self) -> f64 {
        0.5 * (self.v2 - self.v1)
    }

    /// Mirror image under `x -> -x`: `(-v2, -v1)`.
    pub fn reflected(&self) -> GapPair {
        GapPair {
            v1: -self.v2,
            v2: -self.v1,
        }
    }

    /// The two gaps as intervals.
    pub fn intervals(&self) -> [(f64, f64); 2] {
        [(-1.0, self.v1), (self.v2, 1.0)]
    }

    /// `p(x) = (x² - 1)(x - v1)(x - v2)`
    pub fn p(&self, x: f64) -> f64 {
        (x * x - 1.0) * (x - self.v1) * (x - self.v2)
    }

    fn check_conditioning(&self) -> Result<()> {
        let gaps = [
            (self.v1 + 1.0, "v1 + 1"),
            (self.v2 - self.v1, "v2 - v1"),
            (1.0 - self.v2, "1 - v2"),
        ];
        for (dist, what) in gaps {
            if dist < MIN_ENDPOINT_SEPARATION {
                return Err(Error::IllConditioned(format!(
                    "{what} = {dist:e} is below {MIN_ENDPOINT_SEPARATION:e}"
                )));
            }
        }
        Ok(())
    }
}

/// The six period integrals `I_0, I_1, I_2, J_0, J_1, J_2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EllipticData {
    pub i0: f64,
    pub i1: f64,
    pub i2: f64,
    pub j0: f64,
    pub j1: f64,
    pub j2: f64,
}

/// Closed-form `∂/∂v2` of `I_0, I_1, I_2, J_0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct V2Derivatives {
    pub di0: f64,
    pub di1: f64,
    pub di2: f64,
    pub dj0: f64,
}

/// Complete elliptic integrals `(K(k), E(k))` by the arithmetic-geometric mean.
pub fn complete_elliptic(k: f64) -> Result<(f64, f64)> {
    if !(0.0..1.0).contains(&k) {
        return Err(Error::InvalidModulus(format!(
            "modulus must lie in [0, 1), got {k}"
        )));
    }
    let mut a = 1.0;
    let mut b = ((1.0 - k) * (1.0 + k)).sqrt();
    let mut c = k;
    let mut pow = 0.5;
    let mut sum = pow * c * c;
    for _ in 0..64 {
        if (a - b).abs() <= 1e-16 * a {
            break;
        }
        c = 0.5 * (a - b);
        let an = 0.5 * (a + b);
        b = (a * b).sqrt();
        a = an;
        pow *= 2.0;
        sum += pow * c * c;
    }
    let kk = FRAC_PI_2 / a;
    Ok((kk, kk * (1.0 - sum)))
}

/// The period integrals with the default quadrature settings.
pub fn elliptic_data(g: GapPair) -> Result<EllipticData> {
    elliptic_data_with(g, EndpointRule::default())
}

pub fn elliptic_data_with(g: GapPair, rule: EndpointRule) -> Result<EllipticData> {
    g.check_conditioning()?;
    let (v1, v2) = (g.v1, g.v2);
    let gap = v2 - v1;
    // On (v2, 1): |p| = (x - v2)(1 - x) · (1 + x)(x - v1).
    let [i0, i1, i2] =
        integrate_sqrt_endpoints(v2, 1.0, SqrtSingularity::Both, &[-1.0, v1], rule, |n| {
            let w = 1.0 / ((1.0 + n.x) * (gap + n.from_left)).sqrt();
            [w, n.x * w, n.x * n.x * w]
        })?;
    // On (v1, v2): |p| = (x - v1)(v2 - x) · (1 - x)(1 + x).
    let [j0, j1, j2] =
        integrate_sqrt_endpoints(v1, v2, SqrtSingularity::Both, &[-1.0, 1.0], rule, |n| {
            let w = 1.0 / ((1.0 - n.x) * (1.0 + n.x)).sqrt();
            [w, n.x * w, n.x * n.x * w]
        })?;
    Ok(EllipticData {
        i0,
        i1,
        i2,
        j0,
        j1,
        j2,
    })
}

impl EllipticData {
    /// Closed-form derivatives in `v2` from the integrals themselves.
    pub fn v2_derivatives(&self, g: GapPair) -> V2Derivatives {
        let (v1, v2) = (g.v1, g.v2);
        let sum = 0.5 * (v1 + v2);
        let denom = (1.0 - v2 * v2) * (v2 - v1);
        let di0 = (-self.i2 + sum * self.i1 + 0.5 * v2 * (v2 - v1) * self.i0) / denom;
        let di1 = 0.5 * self.i0 + v2 * di0;
        let di2 = v2 * v2 * di0 + 0.5 * self.i1 + 0.5 * v2 * self.i0;
        let dj0 = (-self.j2 + sum * self.j1 + 0.5 * v2 * (v2 - v1) * self.j0) / denom;
        V2Derivatives { di0, di1, di2, dj0 }
    }

    /// `(I_2 - S I_1) J_0 - I_0 (J_2 - S J_1)` with `S = (v1 + v2)/2`; equals π.
    pub fn period_relation(&self, g: GapPair) -> f64 {
        let sum = 0.5 * (g.v1 + g.v2);
        (self.i2 - sum * self.i1) * self.j0 - self.i0 * (self.j2 - sum * self.j1)
    }
}

/// Closed-form `∂/∂v2` of `I_0, I_1, I_2, J_0`.
pub fn elliptic_v2_derivatives(g: GapPair) -> Result<V2Derivatives> {
    Ok(elliptic_data(g)?.v2_derivatives(g))
}

/// `∫_x^{-1} dx / sqrt(p(x))` for `x ∈ [-∞, -1)`, where `p > 0`.
///
/// With `x = -1/t` this is `∫_{1/|x|}^{1} dt / sqrt((1 - t²)(1 + v1 t)(1 + v2 t))`.
pub fn integral_left_of_minus_one(g: GapPair, x: f64) -> Result<f64> {
    if !(x < -1.0) {
        return Err(Error::domain(format!("expected x < -1, got {x}")));
    }
    let t0 = if x.is_infinite() { 0.0 } else { -1.0 / x };
    tail_integral(t0, [g.v1, g.v2])
}

/// `∫_1^x dx / sqrt(p(x))` for `x ∈ (1, ∞]`.
///
/// With `x = 1/t` this is `∫_{1/x}^{1} dt / sqrt((1 - t²)(1 - v1 t)(1 - v2 t))`.
pub fn integral_right_of_one(g: GapPair, x: f64) -> Result<f64> {
    if !(x > 1.0) {
        return Err(Error::domain(format!("expected x > 1, got {x}")));
    }
    let t0 = if x.is_infinite() { 0.0 } else { 1.0 / x };
    tail_integral(t0, [-g.v1, -g.v2])
}

/// `∫_{t0}^{1} dt / sqrt((1 - t²)(1 + a t)(1 + b t))` with `|a|, |b| < 1`.
fn tail_integral(t0: f64, [a, b]: [f64; 2]) -> Result<f64> {
    if t0 >= 1.0 {
        return Ok(0.0);
    }
    let mut external = vec![-1.0];
    for c in [a, b] {
        if c != 0.0 {
            external.push(-1.0 / c);
        }
    }
    let [v] = integrate_sqrt_endpoints(
        t0,
        1.0,
        SqrtSingularity::Right,
        &external,
        EndpointRule::default(),
        // 1 + a t = (1 + a) - a (1 - t) keeps precision when a is close to -1
        |n| {
            let fa = (1.0 + a) - a * n.to_right;
            let fb = (1.0 + b) - b * n.to_right;
            [1.0 / ((1.0 + n.x) * fa * fb).sqrt()]
        },
    )?;
    Ok(v)
}

/// `∫_x^{v2} dx / sqrt|p(x)|` for `x ∈ [v1, v2]`.
pub fn integral_to_v2(g: GapPair, x: f64) -> Result<f64> {
    let (v1, v2) = (g.v1, g.v2);
    if !(v1 <= x && x <= v2) {
        return Err(Error::domain(format!("expected x in [{v1}, {v2}], got {x}")));
    }
    if x == v2 {
        return Ok(0.0);
    }
    if x == v1 {
        return Ok(elliptic_data(g)?.j0);
    }
    let offset = x - v1;
    let [v] = integrate_sqrt_endpoints(
        x,
        v2,
        SqrtSingularity::Right,
        &[v1, -1.0, 1.0],
        EndpointRule::default(),
        |n| [1.0 / ((offset + n.from_left) * (1.0 - n.x) * (1.0 + n.x)).sqrt()],
    )?;
    Ok(v)
}
