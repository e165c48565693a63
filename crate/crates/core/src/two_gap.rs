//! Geometry derived from a gap pair: the zeros of `q`, the `s²` coefficient, the
//! modulus, the Abel map and the constants of the local expansions at `v2`.
//!
//! Branch conventions. `sqrt(p)` is positive on `(1, ∞)`. On the band
//! `(v1, v2)` boundary values are taken from the upper half plane, where
//! `sqrt(p) = -sqrt|p|`. With `u(z) = -∫_{v2}^z ω` and `ω = i dz / (2 I_0 sqrt(p))`
//! this gives `u(v1) = -τ/2`, `u(1) = -1/2`, `u(-1) = -τ/2 - 1/2`, and
//! `d = -u(∞) = 1/2 + (i / (2 I_0)) ∫_1^∞ dx / sqrt(p)`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::elliptic::{
    elliptic_data, integral_left_of_minus_one, integral_right_of_one, integral_to_v2, EllipticData,
    GapPair,
};
use crate::error::{Error, Result};
use crate::quadrature::{integrate_sqrt_endpoints, EndpointRule, SqrtSingularity};
use crate::theta::ThetaContext;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Everything the fixed-gap expansion and the identities consume.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivedGeometry {
    pub gap: GapPair,
    pub elliptic: EllipticData,
    /// Zero of `q` in `(-1, v1)`.
    pub x1: f64,
    /// Zero of `q` in `(v2, 1)`.
    pub x2: f64,
    /// Coefficient of `-s²`.
    pub g0: f64,
    /// `Ω = 1 / I_0`
    pub omega: f64,
    /// `τ = i J_0 / I_0`
    pub tau: Complex64,
    /// Abel constant reduced into `Re ∈ (-1/2, 1/2]`, `Im ∈ (0, Im τ]`.
    pub d: Complex64,
    /// Lattice shift `(m, n)` with `d = -u(∞) + m + n τ`.
    pub d_shift: (i64, i64),
    /// `∫_1^∞ dx / sqrt(p)`
    pub tail_right: f64,
    /// Zero of `γ - 1/γ` on the band.
    pub zhat: f64,
    pub zeta0: f64,
    /// `γ₀²`, purely imaginary with positive imaginary part.
    pub gamma0_sq: Complex64,
    pub u0: f64,
    /// `|q(y)|` for `y = -1, v1, v2, 1`.
    pub q_at: [f64; 4],
}

/// Geometry for `g` with default quadrature.
pub fn derive_geometry(g: GapPair) -> Result<DerivedGeometry> {
    let ell = elliptic_data(g)?;
    DerivedGeometry::from_elliptic(g, ell)
}

impl DerivedGeometry {
    pub fn from_elliptic(g: GapPair, ell: EllipticData) -> Result<Self> {
        let (v1, v2) = (g.v1(), g.v2());
        let sum = 0.5 * (v1 + v2);
        let product = (-ell.i2 + sum * ell.i1) / ell.i0;
        let disc = sum * sum - 4.0 * product;
        if !(disc > 0.0) {
            return Err(Error::Internal(format!(
                "q has no real zeros (discriminant {disc:e}) at {g:?}"
            )));
        }
        let root = disc.sqrt();
        // stable pair of roots of z² - sum z + product
        let big = if sum >= 0.0 { 0.5 * (sum + root) } else { 0.5 * (sum - root) };
        let other = if big != 0.0 { product / big } else { 0.5 * (sum - root) };
        let (x1, x2) = if big < other { (big, other) } else { (other, big) };

        let g0 = -(ell.i2 - sum * ell.i1) / ell.i0 + 0.5 + (v2 - v1).powi(2) / 8.0;
        let omega = 1.0 / ell.i0;
        let t = ell.j0 / ell.i0;
        let tau = Complex64::new(0.0, t);

        let tail_right = integral_right_of_one(g, f64::INFINITY)?;
        let d_raw = Complex64::new(0.5, tail_right / (2.0 * ell.i0));
        let (d, d_shift) = reduce_to_cell(d_raw, t);

        let zhat = (v1 + v2) / (2.0 + v1 - v2);
        let w = (1.0 - v2 * v2) * (v2 - v1);
        let zeta0 = 2.0 * (v2 - x1) * (x2 - v2) / w.sqrt();
        let u0 = 1.0 / (ell.i0 * w.sqrt());
        let gamma0_sq = Complex64::new(0.0, ((1.0 - v2) * (v2 - v1) / (1.0 + v2)).sqrt());
        let q = |y: f64| ((y - x1) * (y - x2)).abs();
        let q_at = [q(-1.0), q(v1), q(v2), q(1.0)];
        Ok(DerivedGeometry {
            gap: g,
            elliptic: ell,
            x1,
            x2,
            g0,
            omega,
            tau,
            d,
            d_shift,
            tail_right,
            zhat,
            zeta0,
            gamma0_sq,
            u0,
            q_at,
        })
    }

    pub fn v1(&self) -> f64 {
        self.gap.v1()
    }

    pub fn v2(&self) -> f64 {
        self.gap.v2()
    }

    pub fn i0(&self) -> f64 {
        self.elliptic.i0
    }

    pub fn theta_context(&self) -> Result<ThetaContext> {
        ThetaContext::new(self.tau)
    }

    /// `q(z) = (z - x1)(z - x2)`
    pub fn q(&self, z: f64) -> f64 {
        (z - self.x1) * (z - self.x2)
    }

    /// `h(z) = (z - 1)(z - v1) + (z - v2)(z + 1)`
    pub fn h(&self, z: f64) -> f64 {
        let (v1, v2) = (self.v1(), self.v2());
        (z - 1.0) * (z - v1) + (z - v2) * (z + 1.0)
    }

    /// `-1, v1, v2, 1`
    pub fn branch_points(&self) -> [f64; 4] {
        [-1.0, self.v1(), self.v2(), 1.0]
    }

    /// Abel map at the branch points in the order of [`Self::branch_points`].
    pub fn u_at_branch_points(&self) -> [Complex64; 4] {
        let half_tau = 0.5 * self.tau;
        [
            -half_tau - 0.5,
            -half_tau,
            Complex64::new(0.0, 0.0),
            Complex64::new(-0.5, 0.0),
        ]
    }

    /// `γ₁` from `γ(z)⁴`'s expansion at `v2`.
    pub fn gamma1(&self) -> f64 {
        let (v1, v2) = (self.v1(), self.v2());
        0.25 * (1.0 / (v2 - 1.0) + 1.0 / (v2 - v1) - 1.0 / (v2 + 1.0))
    }

    /// `u₁ = -(1/6) ∂/∂v2 log((v2² - 1)(v2 - v1))`
    pub fn u1(&self) -> f64 {
        let (v1, v2) = (self.v1(), self.v2());
        -(2.0 * v2 / (v2 * v2 - 1.0) + 1.0 / (v2 - v1)) / 6.0
    }

    /// `u(z) = -∫_{v2}^z ω` on the first sheet; see the module docs for the branch.
    pub fn abel_map(&self, z: f64) -> Result<Complex64> {
        let (v1, v2) = (self.v1(), self.v2());
        let g = self.gap;
        let scale = I / (2.0 * self.i0());
        let [u_m1, u_v1, u_v2, u_p1] = self.u_at_branch_points();
        if z.is_nan() {
            return Err(Error::domain("abel map at NaN"));
        }
        if z == v2 {
            Ok(u_v2)
        } else if z == v1 {
            Ok(u_v1)
        } else if z == 1.0 {
            Ok(u_p1)
        } else if z == -1.0 {
            Ok(u_m1)
        } else if v1 < z && z < v2 {
            Ok(-scale * integral_to_v2(g, z)?)
        } else if z > 1.0 {
            Ok(u_p1 - scale * integral_right_of_one(g, z)?)
        } else if z < -1.0 {
            Ok(u_m1 + scale * integral_left_of_minus_one(g, z)?)
        } else {
            Err(Error::domain(format!(
                "z = {z} lies on a cut of the first sheet (inside a gap)"
            )))
        }
    }

    /// `u(∞)`, with `u(∞) + d ∈ ℤ + τℤ` up to the recorded shift.
    pub fn u_infinity(&self) -> Complex64 {
        Complex64::new(-0.5, -self.tail_right / (2.0 * self.i0()))
    }

    /// `d` computed from its definition through `ẑ`:
    /// `-(1 - τ)/2 - ∫_{v2}^{ẑ} ω = -1/2 + τ/2 + u(ẑ)`.
    pub fn d_from_zhat(&self) -> Result<Complex64> {
        Ok(-0.5 + 0.5 * self.tau + self.abel_map(self.zhat)?)
    }

    /// `∫ q(x) dx / sqrt|p(x)|` over both gaps by direct quadrature; both vanish.
    pub fn a_cycle_residuals(&self) -> Result<[f64; 2]> {
        let (v1, v2) = (self.v1(), self.v2());
        let q = |x: f64| self.q(x);
        let rule = EndpointRule::default();
        // (v2, 1): |p| = (x - v2)(1 - x)(1 + x)(x - v1)
        let [right, right_norm] =
            integrate_sqrt_endpoints(v2, 1.0, SqrtSingularity::Both, &[-1.0, v1], rule, |n| {
                let w = 1.0 / ((1.0 + n.x) * (v2 - v1 + n.from_left)).sqrt();
                [q(n.x) * w, w]
            })?;
        // (-1, v1): |p| = (x + 1)(v1 - x)(1 - x)(v2 - x)
        let [left, left_norm] =
            integrate_sqrt_endpoints(-1.0, v1, SqrtSingularity::Both, &[v2, 1.0], rule, |n| {
                let w = 1.0 / ((1.0 - n.x) * (v2 - v1 + n.to_right)).sqrt();
                [q(n.x) * w, w]
            })?;
        // relative to the size of q at the cut ends
        let right_scale = right_norm * (self.q_at[2] + self.q_at[3]);
        let left_scale = left_norm * (self.q_at[0] + self.q_at[1]);
        Ok([right.abs() / right_scale, left.abs() / left_scale])
    }

    /// `1/(γ₀² u₀)`, which equals `-i I_0 (1 + v2)`.
    pub fn inverse_gamma0_sq_u0(&self) -> Complex64 {
        1.0 / (self.gamma0_sq * self.u0)
    }
}

/// Reduces `z` into `Re ∈ (-1/2, 1/2]`, `Im ∈ (0, t]`, returning the shift
/// `(m, n)` with `reduced = z + m + n τ`.
pub fn reduce_to_cell(z: Complex64, t: f64) -> (Complex64, (i64, i64)) {
    // smallest n with z.im + n t > 0, i.e. Im in (0, t]
    let n = (-(z.im / t)).floor() as i64 + 1;
    let mut im = z.im + n as f64 * t;
    let mut n = n;
    if im > t {
        im -= t;
        n -= 1;
    }
    // m with re + m in (-1/2, 1/2]
    let m = (0.5 - z.re).floor() as i64;
    let re = z.re + m as f64;
    (Complex64::new(re, im), (m, n))
}

/// The Abel map at real `z` for the gap pair `g`.
pub fn abel_map(z: f64, g: GapPair) -> Result<Complex64> {
    derive_geometry(g)?.abel_map(z)
}

/// `q(z) = (z - x1)(z - x2)`
pub fn q_polynomial(z: f64, geom: &DerivedGeometry) -> f64 {
    geom.q(z)
}

/// Defects of the `v2 -> 1` approximations `x1 ≈ (v1 - 1)/2`, `x2 ≈ (1 + v2)/2`
/// and `τ ≈ (i/π)[5 log 2 + log(1/(1 - v2)) + log((1 - v1)/(1 + v1))]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct V2LimitResiduals {
    pub x1: f64,
    pub x2: f64,
    /// relative
    pub tau: f64,
}

pub fn geometry_v2_limit_checks(g: GapPair) -> Result<V2LimitResiduals> {
    let geom = derive_geometry(g)?;
    let (v1, v2) = (g.v1(), g.v2());
    let tau_approx = (5.0 * std::f64::consts::LN_2 + (1.0 / (1.0 - v2)).ln() + ((1.0 - v1) / (1.0 + v1)).ln())
        / std::f64::consts::PI;
    Ok(V2LimitResiduals {
        x1: (geom.x1 - 0.5 * (v1 - 1.0)).abs(),
        x2: (geom.x2 - 0.5 * (1.0 + v2)).abs(),
        tau: (geom.tau.im - tau_approx).abs() / geom.tau.im,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elliptic::complete_elliptic;

    fn geom(v1: f64, v2: f64) -> DerivedGeometry {
        derive_geometry(GapPair::new(v1, v2).unwrap()).unwrap()
    }

    #[test]
    fn zeros_of_q_are_placed_in_the_gaps() {
        for (v1, v2) in [(-0.5, 0.3), (-0.8, -0.1), (-0.2, 0.6), (-0.95, 0.9), (0.1, 0.1001)] {
            let g = geom(v1, v2);
            assert!(-1.0 < g.x1 && g.x1 < v1, "{g:?}");
            assert!(v2 < g.x2 && g.x2 < 1.0, "{g:?}");
            assert!((g.x1 + g.x2 - 0.5 * (v1 + v2)).abs() < 1e-12);
            assert!(g.g0 > 0.0 && g.omega > 0.0 && g.tau.im > 0.0 && g.tau.re == 0.0);
            assert!(g.v1() < g.zhat && g.zhat < g.v2());
        }
    }

    #[test]
    fn symmetric_case_in_closed_form() {
        for v in [0.2, 0.5, 0.8] {
            let g = geom(-v, v);
            let vp = (1.0 - v * v).sqrt();
            let (k, _) = complete_elliptic(v).unwrap();
            let (kp, ep) = complete_elliptic(vp).unwrap();
            assert!((g.x1 + g.x2).abs() < 1e-14);
            assert!((g.x1 * g.x2 + ep / kp).abs() < 1e-11);
            assert!((g.g0 - ((1.0 + v * v) / 2.0 - ep / kp)).abs() < 1e-11);
            assert!((g.tau.im - 2.0 * k / kp).abs() < 1e-10);
            assert!((g.q_at[3] - (1.0 - g.elliptic.i2 / g.elliptic.i0)).abs() < 1e-12);
        }
    }

    #[test]
    fn lemma_b_constant() {
        for (v1, v2) in [(-0.5, 0.3), (-0.8, -0.1), (-0.6, 0.6)] {
            let g = geom(v1, v2);
            let lhs = g.inverse_gamma0_sq_u0();
            let rhs = Complex64::new(0.0, -g.i0() * (1.0 + v2));
            assert!((lhs - rhs).norm() < 1e-12 * rhs.norm());
        }
    }

    #[test]
    fn abel_map_special_values() {
        let g = geom(-0.5, 0.3);
        assert_eq!(g.abel_map(0.3).unwrap(), Complex64::new(0.0, 0.0));
        // continuity into the band and through infinity
        let near_v1 = g.abel_map(-0.5 + 1e-12).unwrap();
        assert!((near_v1 + 0.5 * g.tau).norm() < 1e-5);
        let far_right = g.abel_map(1e12).unwrap();
        let far_left = g.abel_map(-1e12).unwrap();
        assert!((far_right - g.u_infinity()).norm() < 1e-10);
        assert!((far_left - g.u_infinity()).norm() < 1e-10);
        let sum = g.u_infinity() + g.d;
        assert!((sum - sum.re.round()).norm() < 1e-10);
        assert!(g.abel_map(0.5).is_err());
        assert!(g.abel_map(-0.7).is_err());
    }

    #[test]
    fn d_agrees_with_the_zhat_definition() {
        for (v1, v2) in [(-0.5, 0.3), (-0.8, -0.1), (-0.2, 0.6)] {
            let g = geom(v1, v2);
            let diff = g.d_from_zhat().unwrap() - g.d;
            assert!((diff - diff.re.round()).norm() < 1e-10, "{v1},{v2}: {diff}");
        }
    }

    #[test]
    fn d_sits_inside_the_cell() {
        for (v1, v2) in [(-0.5, 0.3), (-0.8, -0.1), (-0.2, 0.6), (-0.6, 0.6)] {
            let g = geom(v1, v2);
            assert!(g.d.re > -0.5 && g.d.re <= 0.5);
            assert!(g.d.im > 0.0 && g.d.im <= g.tau.im);
        }
    }

    #[test]
    fn cell_reduction() {
        let t = 1.2;
        let (r, (m, n)) = reduce_to_cell(Complex64::new(2.7, -3.0), t);
        assert!(r.re > -0.5 && r.re <= 0.5 && r.im > 0.0 && r.im <= t);
        assert!((r - Complex64::new(2.7 + m as f64, -3.0 + n as f64 * t)).norm() < 1e-14);
        let (r, shift) = reduce_to_cell(Complex64::new(0.5, t), t);
        assert_eq!(shift, (0, 0));
        assert_eq!(r, Complex64::new(0.5, t));
    }

    #[test]
    fn a_cycles_of_psi_vanish() {
        for (v1, v2) in [(-0.5, 0.3), (-0.8, -0.1), (-0.2, 0.6)] {
            let [a, b] = geom(v1, v2).a_cycle_residuals().unwrap();
            assert!(a < 1e-10 && b < 1e-10, "{a:e} {b:e}");
        }
    }

    #[test]
    fn reflection_symmetry_of_omega() {
        for (v1, v2) in [(-0.5, 0.3), (-0.8, -0.1), (-0.2, 0.6)] {
            let a = geom(v1, v2);
            let b = geom(-v2, -v1);
            assert!((a.omega - b.omega).abs() < 1e-12);
            assert!((a.tau - b.tau).norm() < 1e-12);
            assert!((a.g0 - b.g0).abs() < 1e-12);
        }
    }

    #[test]
    fn v2_limit_trend() {
        let a = geometry_v2_limit_checks(GapPair::new(-0.5, 0.999).unwrap()).unwrap();
        let b = geometry_v2_limit_checks(GapPair::new(-0.5, 0.9999).unwrap()).unwrap();
        assert!(a.x2 < 10.0 * 1e-6, "{a:?}");
        assert!(a.tau < 0.1, "{a:?}");
        assert!(b.x1 < a.x1 && b.x2 < a.x2 && b.tau < a.tau, "{a:?} {b:?}");
    }

    #[test]
    fn merging_limit_of_x1x2() {
        for nu in [1e-3, 1e-4] {
            let g = geom(-nu, nu);
            // centred: α = -1, β = 1, γ = 1/4
            let l = (1.0 / (0.25 * nu)).ln();
            let defect = g.x1 * g.x2 + 1.0 / l;
            assert!(defect.abs() < 10.0 * nu * nu, "ν={nu}: {defect:e}");
        }
    }
}
