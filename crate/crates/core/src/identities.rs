//! Numeric residuals of the theta-function and elliptic-integral identities the
//! expansions depend on, and a grid runner for them.
//!
//! Every evaluator returns a [`ResidualReport`]. Residuals are relative where the
//! identity has a natural nonzero scale and absolute otherwise; the report says
//! which tolerance it was judged against.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::str::FromStr;

use crate::elliptic::{elliptic_data, GapPair};
use crate::error::{Error, Result};
use crate::quadrature::composite;
use crate::theta::{theta_constants, ThetaContext, ThetaFn};
use crate::two_gap::{derive_geometry, DerivedGeometry};

pub const THETA_TOL: f64 = 1e-9;
pub const PERIOD_TOL: f64 = 1e-9;
pub const FINITE_DIFFERENCE_TOL: f64 = 1e-6;
pub const T1_TOL: f64 = 1e-8;
pub const INTEGRAL_TOL: f64 = 1e-9;
pub const G1HAT_TOL: f64 = 1e-8;
/// For the derivative of the full `v2`-dependent part of the expansion, where
/// the finite difference is scaled up by `s²`.
pub const EXPANSION_DERIVATIVE_TOL: f64 = 1e-5;

/// Default step of the Richardson-extrapolated central differences.
pub const FD_STEP: f64 = 1e-5;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub identity_id: String,
    pub residual: f64,
    pub tolerance: f64,
    pub inputs: BTreeMap<String, f64>,
    pub pass: bool,
}

impl ResidualReport {
    pub fn new(id: impl Into<String>, residual: f64, tolerance: f64, inputs: &[(&str, f64)]) -> Self {
        let residual = if residual.is_finite() { residual } else { f64::INFINITY };
        ResidualReport {
            identity_id: id.into(),
            residual,
            tolerance,
            inputs: inputs.iter().map(|&(k, v)| (k.to_string(), v)).collect(),
            pass: residual < tolerance,
        }
    }

    /// Re-judges the residual against `tolerance`.
    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self.pass = self.residual < tolerance;
        self
    }
}

fn relative(lhs: Complex64, rhs: Complex64) -> f64 {
    (lhs - rhs).norm() / rhs.norm()
}

/// `|lhs - rhs|` relative to the larger side, or absolute when both are below one.
fn mixed(lhs: Complex64, rhs: Complex64) -> f64 {
    (lhs - rhs).norm() / lhs.norm().max(rhs.norm()).max(1.0)
}

/// The seven theta identities tied to the outside parametrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ThetaIdentity {
    A,
    B,
    C,
    D,
    E,
    F,
    G,
}

impl ThetaIdentity {
    pub const ALL: [ThetaIdentity; 7] = [
        ThetaIdentity::A,
        ThetaIdentity::B,
        ThetaIdentity::C,
        ThetaIdentity::D,
        ThetaIdentity::E,
        ThetaIdentity::F,
        ThetaIdentity::G,
    ];

    pub fn label(self) -> &'static str {
        match self {
            ThetaIdentity::A => "theta_a",
            ThetaIdentity::B => "theta_b",
            ThetaIdentity::C => "theta_c",
            ThetaIdentity::D => "theta_d",
            ThetaIdentity::E => "theta_e",
            ThetaIdentity::F => "theta_f",
            ThetaIdentity::G => "theta_g",
        }
    }

    /// Whether the identity involves `ω`.
    pub fn uses_omega(self) -> bool {
        self == ThetaIdentity::A
    }
}

impl FromStr for ThetaIdentity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.to_ascii_lowercase().as_str() {
            "a" => ThetaIdentity::A,
            "b" => ThetaIdentity::B,
            "c" => ThetaIdentity::C,
            "d" => ThetaIdentity::D,
            "e" => ThetaIdentity::E,
            "f" => ThetaIdentity::F,
            "g" => ThetaIdentity::G,
            other => return Err(Error::domain(format!("unknown identity '{other}', expected a-g"))),
        })
    }
}

/// Residual of one theta identity at the Abel constant `d` of `g`.
pub fn theta_identity_residual(which: ThetaIdentity, g: GapPair, omega: f64) -> Result<ResidualReport> {
    let geom = derive_geometry(g)?;
    theta_identity_residual_at(which, &geom, omega, geom.d)
}

/// As [`theta_identity_residual`] with an explicit representative of `d`.
pub fn theta_identity_residual_at(
    which: ThetaIdentity,
    geom: &DerivedGeometry,
    omega: f64,
    d: Complex64,
) -> Result<ResidualReport> {
    let ctx = geom.theta_context()?;
    let th = |j: ThetaFn, z: Complex64| ctx.derivatives(j, z, 3);
    let (v1, v2) = (geom.v1(), geom.v2());
    let i0 = geom.i0();
    let om = Complex64::new(omega, 0.0);
    let residual = match which {
        ThetaIdentity::A => {
            let c = geom.gamma0_sq * geom.u0 / 2.0;
            let p = th(ThetaFn::Three, d + om)?;
            let m = th(ThetaFn::Three, d - om)?;
            let z = th(ThetaFn::Three, d)?;
            let t0 = ctx.eval(ThetaFn::Three, ZERO)?;
            let tw = ctx.eval(ThetaFn::Three, om)?;
            let lhs = t0 * t0
                * (p[0] * m[0] * z[0]
                    - c * (p[1] * m[0] * z[0] + p[0] * m[1] * z[0] - 2.0 * p[0] * m[0] * z[1]));
            relative(lhs, z[0] * z[0] * z[0] * tw * tw)
        }
        ThetaIdentity::B => {
            let t1 = th(ThetaFn::One, d)?;
            let t3 = th(ThetaFn::Three, d)?;
            relative(t1[1] / t1[0] - t3[1] / t3[0], -I * i0 * (1.0 + v2))
        }
        ThetaIdentity::C => {
            let q = quotient_derivatives(th(ThetaFn::One, d)?, th(ThetaFn::Three, d)?);
            let a = geom.gamma0_sq * geom.u0;
            let rhs = 3.0 / a * q[2]
                - 6.0 * (2.0 * geom.gamma1() + geom.u1()) / (a * geom.u0 * geom.u0) * q[0];
            (q[3] - rhs).norm() / q[3].norm().max(rhs.norm())
        }
        ThetaIdentity::D => {
            let t0 = ctx.eval(ThetaFn::Three, ZERO)?;
            let t1p = ctx.derivatives(ThetaFn::One, ZERO, 1)?[1];
            let norm = (t0 / t1p) * (t0 / t1p) * i0 * i0;
            let mut worst: f64 = 0.0;
            for (z0, u) in geom.branch_points().into_iter().zip(geom.u_at_branch_points()) {
                let ratio = ctx.eval(ThetaFn::One, u + d)? / ctx.eval(ThetaFn::Three, u + d)?;
                let val = ratio * ratio * norm * geom.h(z0);
                worst = worst.max((val + 1.0).norm());
            }
            worst
        }
        ThetaIdentity::E | ThetaIdentity::F | ThetaIdentity::G => {
            let (j, rhs) = match which {
                ThetaIdentity::E => (ThetaFn::Four, 2.0 * (v2 - v1)),
                ThetaIdentity::F => (ThetaFn::Two, (1.0 + v1) * (1.0 - v2)),
                _ => (ThetaFn::Three, (1.0 - v1) * (1.0 + v2)),
            };
            let lhs = ctx.eval(j, ZERO)?.powi(4);
            relative(lhs, Complex64::new(i0 * i0 / (PI * PI) * rhs, 0.0))
        }
    };
    let mut inputs = vec![("v1", v1), ("v2", v2)];
    if which.uses_omega() {
        inputs.push(("omega", omega));
    }
    Ok(ResidualReport::new(which.label(), residual, THETA_TOL, &inputs))
}

/// Derivatives of `f/h` up to third order from those of `f` and `h`.
fn quotient_derivatives(f: [Complex64; 4], h: [Complex64; 4]) -> [Complex64; 4] {
    let g0 = f[0] / h[0];
    let g1 = (f[1] - g0 * h[1]) / h[0];
    let g2 = (f[2] - 2.0 * g1 * h[1] - g0 * h[2]) / h[0];
    let g3 = (f[3] - 3.0 * g2 * h[1] - 3.0 * g1 * h[2] - g0 * h[3]) / h[0];
    [g0, g1, g2, g3]
}

/// `|(I_2 - S I_1) J_0 - I_0 (J_2 - S J_1) - π|` with `S = (v1 + v2)/2`.
pub fn period_relation_residual(g: GapPair) -> Result<ResidualReport> {
    let ell = elliptic_data(g)?;
    Ok(ResidualReport::new(
        "period_relation",
        (ell.period_relation(g) - PI).abs(),
        PERIOD_TOL,
        &[("v1", g.v1()), ("v2", g.v2())],
    ))
}

/// `θ₃''(0)/θ₃(0) = 2 I_0² (x1 x2 + (v2 - v1)/2)`
pub fn dtheta33_shortcut(geom: &DerivedGeometry) -> f64 {
    let i0 = geom.i0();
    2.0 * i0 * i0 * (geom.x1 * geom.x2 + 0.5 * (geom.v2() - geom.v1()))
}

fn g1hat_from_ratio(geom: &DerivedGeometry, ratio: f64) -> f64 {
    let i0 = geom.i0();
    let sum: f64 = geom
        .branch_points()
        .into_iter()
        .map(|y| (geom.h(y) + ratio / (i0 * i0)) / geom.q(y))
        .sum();
    -sum / 16.0
}

/// `Ĝ₁ = -(1/16) Σ_y (h(y) + θ₃''/(θ₃ I_0²)) / q(y)` over the four branch points.
/// It does not depend on the gaps and equals `-1/2`.
pub fn g1hat(g: GapPair) -> Result<f64> {
    let geom = derive_geometry(g)?;
    let c = theta_constants(&geom.theta_context()?)?;
    Ok(g1hat_from_ratio(&geom, c.theta3_pp / c.theta3))
}

/// [`g1hat`] with `θ₃''/θ₃` from [`dtheta33_shortcut`] instead of the theta series.
pub fn g1hat_shortcut(g: GapPair) -> Result<f64> {
    let geom = derive_geometry(g)?;
    Ok(g1hat_from_ratio(&geom, dtheta33_shortcut(&geom)))
}

pub fn g1hat_residual(g: GapPair) -> Result<ResidualReport> {
    Ok(ResidualReport::new(
        "g1hat",
        (g1hat(g)? + 0.5).abs(),
        G1HAT_TOL,
        &[("v1", g.v1()), ("v2", g.v2())],
    ))
}

pub fn dtheta33_residual(g: GapPair) -> Result<ResidualReport> {
    let geom = derive_geometry(g)?;
    let c = theta_constants(&geom.theta_context()?)?;
    let series = c.theta3_pp / c.theta3;
    let shortcut = dtheta33_shortcut(&geom);
    Ok(ResidualReport::new(
        "dtheta33",
        (series - shortcut).abs() / shortcut.abs(),
        THETA_TOL,
        &[("v1", g.v1()), ("v2", g.v2())],
    ))
}

/// Central difference in `v2` with one Richardson step over `{h, h/2}`.
pub fn richardson_v2<F>(g: GapPair, h: f64, f: F) -> Result<f64>
where
    F: Fn(GapPair) -> Result<f64>,
{
    let (v1, v2) = (g.v1(), g.v2());
    let central = |step: f64| -> Result<f64> {
        let plus = f(GapPair::new(v1, v2 + step)?)?;
        let minus = f(GapPair::new(v1, v2 - step)?)?;
        Ok((plus - minus) / (2.0 * step))
    };
    let coarse = central(h)?;
    let fine = central(0.5 * h)?;
    Ok((4.0 * fine - coarse) / 3.0)
}

/// `T₁(ω)` assembled from the expansion coefficients of the outside parametrix.
pub fn t1_assembled(geom: &DerivedGeometry, omega: f64) -> Result<Complex64> {
    let ctx = geom.theta_context()?;
    let d = geom.d;
    let u0 = geom.u0;
    let t3 = |z: Complex64| ctx.derivatives(ThetaFn::Three, z, 2);
    let at_d = t3(d)?;
    let (ld, qd) = (at_d[1] / at_d[0], at_d[2] / at_d[0]);
    let t0 = ctx.eval(ThetaFn::Three, ZERO)?;
    let tw = ctx.eval(ThetaFn::Three, Complex64::new(omega, 0.0))?;
    let coefficients = |sign: f64| -> Result<[Complex64; 3]> {
        let z = Complex64::new(sign * omega, 0.0) + d;
        let at = t3(z)?;
        let (l, q) = (at[1] / at[0], at[2] / at[0]);
        let m0 = t0 * at[0] / (tw * at_d[0]);
        let r1 = -u0 * (l - ld);
        let r2 = 0.5 * u0 * u0 * (q - qd + 2.0 * ld * ld - 2.0 * l * ld);
        Ok([m0, r1, r2])
    };
    let [a0, a1, a2] = coefficients(1.0)?;
    let [b0, b1, b2] = coefficients(-1.0)?;
    Ok(-(a0 * b0 / u0) * (geom.gamma0_sq * (a2 - b2) + (a1 - b1)))
}

/// `-i ∂τ/∂v2 = π u₀²`, `∂Ω/∂v2` in closed form, `T₁(ω) = 2θ₃'(ω)/θ₃(ω)`,
/// `ζ₀²/4 = ∂/∂v2 [(I_2 - S I_1)/I_0 - (v2 - v1)²/8]` and the closed form of
/// `∂/∂v2 [(I_2 - S I_1)/I_0]`.
pub fn derivative_identity_residuals(g: GapPair, omega: f64) -> Result<Vec<ResidualReport>> {
    let geom = derive_geometry(g)?;
    let (v1, v2) = (g.v1(), g.v2());
    let inputs = [("v1", v1), ("v2", v2)];
    let mut out = Vec::with_capacity(5);

    let dtau = richardson_v2(g, FD_STEP, |p| {
        let e = elliptic_data(p)?;
        Ok(e.j0 / e.i0)
    })?;
    let closed = PI * geom.u0 * geom.u0;
    out.push(ResidualReport::new(
        "dtau_dv2",
        (dtau - closed).abs() / closed.abs(),
        FINITE_DIFFERENCE_TOL,
        &inputs,
    ));

    let domega = richardson_v2(g, FD_STEP, |p| Ok(1.0 / elliptic_data(p)?.i0))?;
    let closed = domega_closed(&geom);
    out.push(ResidualReport::new(
        "domega_dv2",
        (domega - closed).abs() / closed.abs(),
        FINITE_DIFFERENCE_TOL,
        &inputs,
    ));

    let ctx = geom.theta_context()?;
    let t3 = ctx.derivatives(ThetaFn::Three, Complex64::new(omega, 0.0), 1)?;
    let t1 = t1_assembled(&geom, omega)?;
    out.push(ResidualReport::new(
        "t1",
        mixed(t1, 2.0 * t3[1] / t3[0]),
        T1_TOL,
        &[("v1", v1), ("v2", v2), ("omega", omega)],
    ));

    let leading = |p: GapPair| -> Result<f64> {
        let e = elliptic_data(p)?;
        let sum = 0.5 * (p.v1() + p.v2());
        Ok((e.i2 - sum * e.i1) / e.i0 - (p.v2() - p.v1()).powi(2) / 8.0)
    };
    let fd = richardson_v2(g, FD_STEP, leading)?;
    let closed = 0.25 * geom.zeta0 * geom.zeta0;
    out.push(ResidualReport::new(
        "leading_term_derivative",
        (fd - closed).abs() / closed.abs(),
        FINITE_DIFFERENCE_TOL,
        &inputs,
    ));

    let ratio = |p: GapPair| -> Result<f64> {
        let e = elliptic_data(p)?;
        Ok((e.i2 - 0.5 * (p.v1() + p.v2()) * e.i1) / e.i0)
    };
    let fd = richardson_v2(g, FD_STEP, ratio)?;
    let closed = ratio_derivative_closed(&geom);
    out.push(ResidualReport::new(
        "ratio_derivative",
        (fd - closed).abs() / closed.abs().max(1.0),
        FINITE_DIFFERENCE_TOL,
        &inputs,
    ));
    Ok(out)
}

/// `∂Ω/∂v2 = (v2 - x1)(x2 - v2) / (I_0 (1 - v2²)(v2 - v1))`
pub fn domega_closed(geom: &DerivedGeometry) -> f64 {
    let (v1, v2) = (geom.v1(), geom.v2());
    (v2 - geom.x1) * (geom.x2 - v2) / (geom.i0() * (1.0 - v2 * v2) * (v2 - v1))
}

/// `∂/∂v2 [(I_2 - S I_1)/I_0]` in closed form.
pub fn ratio_derivative_closed(geom: &DerivedGeometry) -> f64 {
    let (v1, v2) = (geom.v1(), geom.v2());
    let e = geom.elliptic;
    let num = 2.0 * e.i2 - (v1 + v2) * e.i1 + v2 * (v1 - v2) * e.i0;
    0.25 * (v2 - v1) + num * num / (4.0 * e.i0 * e.i0 * (1.0 - v2 * v2) * (v2 - v1))
}

/// The `v2`-dependent part of the fixed-gap expansion before averaging:
/// `s² [(I_2 - S I_1)/I_0 - (v2 - v1)²/8] + log θ₃(sΩ; τ) - (1/2) log I_0 - (1/8) Σ log|q(y)|`.
pub fn expansion_potential(s: f64, g: GapPair) -> Result<f64> {
    let geom = derive_geometry(g)?;
    let e = geom.elliptic;
    let (v1, v2) = (g.v1(), g.v2());
    let ctx = geom.theta_context()?;
    let theta = ctx.eval(ThetaFn::Three, Complex64::new(s * geom.omega, 0.0))?;
    let quad = (e.i2 - 0.5 * (v1 + v2) * e.i1) / e.i0 - (v2 - v1).powi(2) / 8.0;
    let log_q: f64 = geom.q_at.iter().map(|q| q.ln()).sum();
    Ok(s * s * quad + theta.re.ln() - 0.5 * e.i0.ln() - log_q / 8.0)
}

/// Finite difference of [`expansion_potential`] in `v2` against the sum of the
/// closed-form pieces: `s² ζ₀²/4`, `s ∂Ω/∂v2 · θ₃'/θ₃(sΩ)`,
/// `∂τ/∂v2 · ∂_τ log θ₃(sΩ) = (u₀²/4) θ₃''/θ₃(sΩ)`, and the endpoint terms.
pub fn expansion_potential_derivative_residual(s: f64, g: GapPair) -> Result<ResidualReport> {
    let geom = derive_geometry(g)?;
    let (v1, v2) = (g.v1(), g.v2());
    let e = geom.elliptic;
    let ctx = geom.theta_context()?;
    let th = ctx.derivatives(ThetaFn::Three, Complex64::new(s * geom.omega, 0.0), 2)?;
    let (l, q) = ((th[1] / th[0]).re, (th[2] / th[0]).re);
    let di0 = e.v2_derivatives(g).di0;
    // q(y) = y² - (v1 + v2) y / 2 + x1 x2
    let dprod = -ratio_derivative_closed(&geom);
    let sum = 0.5 * (v1 + v2);
    let dlog_q: f64 = geom
        .branch_points()
        .into_iter()
        .enumerate()
        .map(|(k, y)| {
            let mut dq = -0.5 * y + dprod;
            if k == 2 {
                dq += 2.0 * y - sum;
            }
            dq / geom.q(y)
        })
        .sum();
    let closed = s * s * 0.25 * geom.zeta0 * geom.zeta0
        + s * domega_closed(&geom) * l
        + 0.25 * geom.u0 * geom.u0 * q
        - 0.5 * di0 / e.i0
        - dlog_q / 8.0;
    let fd = richardson_v2(g, FD_STEP, |p| expansion_potential(s, p))?;
    Ok(ResidualReport::new(
        "expansion_potential_derivative",
        (fd - closed).abs() / closed.abs().max(1.0),
        EXPANSION_DERIVATIVE_TOL,
        &[("s", s), ("v1", v1), ("v2", v2)],
    ))
}

/// `∫_0^1 f` for an analytic 1-periodic `f`, doubling composite Gauss–Legendre
/// panels until two sums agree to about machine precision.
fn periodic_integral<F>(f: F) -> Result<Complex64>
where
    F: Fn(f64) -> Result<Complex64>,
{
    const NODES: usize = 16;
    let eval = |panels: usize| -> Result<Complex64> {
        // the generic sum cannot short-circuit, so keep the first error aside
        let err = std::cell::RefCell::new(None);
        let sum = composite(0.0, 1.0, panels, NODES, |x| match f(x) {
            Ok(v) => ComplexSum(v),
            Err(e) => {
                err.borrow_mut().get_or_insert(e);
                ComplexSum(ZERO)
            }
        });
        match err.into_inner() {
            Some(e) => Err(e),
            None => Ok(sum.0),
        }
    };
    let mut panels = 4;
    let mut prev = eval(panels)?;
    while panels < 4096 {
        panels *= 2;
        let cur = eval(panels)?;
        if (cur - prev).norm() <= 1e-15 * cur.norm().max(1.0) {
            return Ok(cur);
        }
        prev = cur;
    }
    Err(Error::QuadratureNotConverged {
        a: 0.0,
        b: 1.0,
        change: f64::NAN,
        nodes: panels * NODES,
    })
}

#[derive(Default, Clone, Copy)]
struct ComplexSum(Complex64);

impl std::ops::Add for ComplexSum {
    type Output = ComplexSum;
    fn add(self, o: ComplexSum) -> ComplexSum {
        ComplexSum(self.0 + o.0)
    }
}

impl std::ops::Mul<f64> for ComplexSum {
    type Output = ComplexSum;
    fn mul(self, w: f64) -> ComplexSum {
        ComplexSum(self.0 * w)
    }
}

/// Quadrature residuals of three integral identities over `[0, 1]`:
/// `∫(θ₃'/θ₃)² = π²/3 + θ₁'''/(3θ₁')`; the two-theta ratio integral
/// `∫θ₃(z - d)θ₃(z + u + d)/θ₃(z)²`; and the averaging rule
/// `∫g = c θ₃''/θ₃ + g(0)` for elliptic `g` with a double pole at `(1 + τ)/2`,
/// tested on `g(z) = θ₃(z + u)θ₃(z - u)/θ₃(z)²`.
pub fn theta_integral_residuals(ctx: &ThetaContext, d: Complex64, u: Complex64) -> Result<Vec<ResidualReport>> {
    let sin_pu = (PI * u).sin();
    if sin_pu.norm() < 1e-12 {
        return Err(Error::domain(format!("u = {u} is an integer; sin(πu) vanishes")));
    }
    let inputs = [
        ("tau_im", ctx.t()),
        ("d_re", d.re),
        ("d_im", d.im),
        ("u_re", u.re),
        ("u_im", u.im),
    ];
    let t1 = ctx.derivatives(ThetaFn::One, ZERO, 3)?;
    let t3_0 = ctx.derivatives(ThetaFn::Three, ZERO, 2)?;
    let at = |z: f64| Complex64::new(z, 0.0);
    let mut out = Vec::with_capacity(3);

    let lhs = periodic_integral(|z| {
        let t = ctx.derivatives(ThetaFn::Three, at(z), 1)?;
        let l = t[1] / t[0];
        Ok(l * l)
    })?;
    let rhs = PI * PI / 3.0 + t1[3] / (3.0 * t1[1]);
    out.push(ResidualReport::new("log_derivative_square_integral", mixed(lhs, rhs), INTEGRAL_TOL, &inputs));

    let lhs = periodic_integral(|z| {
        let den = ctx.eval(ThetaFn::Three, at(z))?;
        Ok(ctx.eval(ThetaFn::Three, at(z) - d)? * ctx.eval(ThetaFn::Three, at(z) + u + d)? / (den * den))
    })?;
    let a = ctx.derivatives(ThetaFn::One, d, 1)?;
    let b = ctx.derivatives(ThetaFn::One, u + d, 1)?;
    let rhs = PI * (a[1] * b[0] - a[0] * b[1]) / (t1[1] * t1[1] * sin_pu);
    out.push(ResidualReport::new("theta_ratio_integral", mixed(lhs, rhs), INTEGRAL_TOL, &inputs));

    let witness = |z: Complex64| -> Result<Complex64> {
        let den = ctx.eval(ThetaFn::Three, z)?;
        Ok(ctx.eval(ThetaFn::Three, z + u)? * ctx.eval(ThetaFn::Three, z - u)? / (den * den))
    };
    let pole = 0.5 * (1.0 + ctx.tau());
    let slope = ctx.derivatives(ThetaFn::Three, pole, 1)?[1];
    let c = ctx.eval(ThetaFn::Three, pole + u)? * ctx.eval(ThetaFn::Three, pole - u)? / (slope * slope);
    let lhs = periodic_integral(|z| witness(at(z)))?;
    let rhs = c * t3_0[2] / t3_0[0] + witness(ZERO)?;
    out.push(ResidualReport::new("elliptic_average", mixed(lhs, rhs), INTEGRAL_TOL, &inputs));
    Ok(out)
}

/// Residual suites run by the command-line validator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Theta,
    Geometry,
    Derivatives,
    Integrals,
    G1hat,
    All,
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "theta" => Suite::Theta,
            "geometry" => Suite::Geometry,
            "derivatives" => Suite::Derivatives,
            "integrals" => Suite::Integrals,
            "g1hat" => Suite::G1hat,
            "all" => Suite::All,
            other => return Err(Error::domain(format!("unknown suite '{other}'"))),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GridDensity {
    Coarse,
    Fine,
}

impl FromStr for GridDensity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "coarse" => Ok(GridDensity::Coarse),
            "fine" => Ok(GridDensity::Fine),
            other => Err(Error::domain(format!("unknown grid '{other}'"))),
        }
    }
}

pub const COARSE_GRID: [(f64, f64); 4] = [(-0.8, -0.1), (-0.5, 0.3), (-0.2, 0.6), (-0.6, 0.6)];
pub const OMEGA_GRID: [f64; 3] = [0.0, 0.37, 0.5];
pub const TAU_GRID: [f64; 3] = [0.8, 1.5, 3.0];

/// The 5×5 grid `v1 ∈ {-0.85, ..., -0.05}`, `v2 ∈ {0.05, ..., 0.85}`.
pub fn fine_grid() -> Vec<(f64, f64)> {
    let v1s = [-0.85, -0.65, -0.45, -0.25, -0.05];
    let v2s = [0.05, 0.25, 0.45, 0.65, 0.85];
    v1s.iter()
        .flat_map(|&a| v2s.iter().map(move |&b| (a, b)))
        .collect()
}

pub fn grid_points(grid: GridDensity) -> Vec<(f64, f64)> {
    match grid {
        GridDensity::Coarse => COARSE_GRID.to_vec(),
        GridDensity::Fine => fine_grid(),
    }
}

/// Runs `suite` at one gap pair.
pub fn run_suite_at(suite: Suite, v1: f64, v2: f64) -> Result<Vec<ResidualReport>> {
    let g = GapPair::new(v1, v2)?;
    let mut out = Vec::new();
    let wants = |s: Suite| suite == s || suite == Suite::All;
    if wants(Suite::Theta) {
        let geom = derive_geometry(g)?;
        for which in ThetaIdentity::ALL {
            if which.uses_omega() {
                for omega in OMEGA_GRID {
                    out.push(theta_identity_residual_at(which, &geom, omega, geom.d)?);
                }
            } else {
                out.push(theta_identity_residual_at(which, &geom, 0.0, geom.d)?);
            }
        }
    }
    if wants(Suite::Geometry) {
        out.push(period_relation_residual(g)?);
        out.push(dtheta33_residual(g)?);
        let geom = derive_geometry(g)?;
        let inputs = [("v1", v1), ("v2", v2)];
        let [right, left] = geom.a_cycle_residuals()?;
        out.push(ResidualReport::new("a_cycle", right.max(left), THETA_TOL, &inputs));
        let diff = geom.d_from_zhat()? - geom.d;
        out.push(ResidualReport::new(
            "abel_constant",
            (diff - diff.re.round()).norm(),
            THETA_TOL,
            &inputs,
        ));
        let c = theta_constants(&geom.theta_context()?)?;
        out.push(ResidualReport::new("jacobi_derivative", c.jacobi_residual(), THETA_TOL, &inputs));
        out.push(ResidualReport::new("jacobi_quartic", c.quartic_residual(), THETA_TOL, &inputs));
    }
    if wants(Suite::Derivatives) {
        for (k, omega) in OMEGA_GRID.into_iter().enumerate() {
            let reports = derivative_identity_residuals(g, omega)?;
            // only T₁ depends on ω
            out.extend(reports.into_iter().filter(|r| k == 0 || r.identity_id == "t1"));
        }
        out.push(expansion_potential_derivative_residual(3.0, g)?);
    }
    if wants(Suite::G1hat) {
        out.push(g1hat_residual(g)?);
        let a = g1hat_shortcut(g)?;
        out.push(ResidualReport::new(
            "g1hat_shortcut",
            (a + 0.5).abs(),
            G1HAT_TOL,
            &[("v1", v1), ("v2", v2)],
        ));
    }
    Ok(out)
}

/// Runs `suite` over the grid. The integral suite does not depend on the gaps
/// and is run once per `τ` in [`TAU_GRID`].
pub fn run_suite(suite: Suite, grid: GridDensity) -> Result<Vec<ResidualReport>> {
    let mut out = Vec::new();
    for (v1, v2) in grid_points(grid) {
        out.extend(run_suite_at(suite, v1, v2)?);
    }
    if suite == Suite::Integrals || suite == Suite::All {
        out.extend(integral_suite()?);
    }
    Ok(out)
}

pub fn integral_suite() -> Result<Vec<ResidualReport>> {
    let mut out = Vec::new();
    for t in TAU_GRID {
        let ctx = ThetaContext::from_imag(t)?;
        let d = Complex64::new(0.2, 0.3 * t);
        out.extend(theta_integral_residuals(&ctx, d, Complex64::new(0.37, 0.0))?);
    }
    Ok(out)
}
