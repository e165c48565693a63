//! Jacobi theta functions with purely imaginary modulus.
//!
//! Conventions: `θ₃(z) = Σ_m exp(2πizm + πiτm²)`, quasi-periods `1` and `τ`, and
//!
//! ```text
//! θ₁(z) = 2 Σ (-1)^n q^{(n+1/2)²} sin((2n+1)πz)     θ₂(z) = 2 Σ q^{(n+1/2)²} cos((2n+1)πz)
//! θ₃(z) = 1 + 2 Σ q^{n²} cos(2nπz)                   θ₄(z) = 1 + 2 Σ (-1)^n q^{n²} cos(2nπz)
//! ```
//!
//! with `q = exp(iπτ)`. Arguments are first reduced into the cell
//! `|Re z| ≤ 1/2`, `|Im z| ≤ Im τ / 2`. When `|q| > 1/2` the Gaussian (Poisson
//! summed) form of the `τ -> -1/τ` transform replaces the `q`-series.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::{LN_2, PI};

use crate::error::{Error, Result};

const I: Complex64 = Complex64::new(0.0, 1.0);
const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const RELATIVE_CUTOFF: f64 = 1e-17;

/// One of the four Jacobi theta functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ThetaFn {
    One,
    Two,
    Three,
    Four,
}

impl ThetaFn {
    pub const ALL: [ThetaFn; 4] = [ThetaFn::One, ThetaFn::Two, ThetaFn::Three, ThetaFn::Four];

    pub fn from_index(j: u8) -> Result<Self> {
        match j {
            1 => Ok(ThetaFn::One),
            2 => Ok(ThetaFn::Two),
            3 => Ok(ThetaFn::Three),
            4 => Ok(ThetaFn::Four),
            _ => Err(Error::domain(format!("theta index must be 1..=4, got {j}"))),
        }
    }

    pub fn index(self) -> u8 {
        match self {
            ThetaFn::One => 1,
            ThetaFn::Two => 2,
            ThetaFn::Three => 3,
            ThetaFn::Four => 4,
        }
    }

    /// Sign `s` in `θ(z + τ) = s · exp(-2πiz - πiτ) θ(z)`.
    fn tau_sign(self) -> f64 {
        match self {
            ThetaFn::One | ThetaFn::Four => -1.0,
            ThetaFn::Two | ThetaFn::Three => 1.0,
        }
    }

    /// Sign in `θ(z + 1) = ± θ(z)`.
    fn unit_sign(self) -> f64 {
        match self {
            ThetaFn::One | ThetaFn::Two => -1.0,
            ThetaFn::Three | ThetaFn::Four => 1.0,
        }
    }
}

/// Modulus `τ = i t` with its nome.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaContext {
    t: f64,
    max_terms: usize,
}

impl ThetaContext {
    pub const DEFAULT_MAX_TERMS: usize = 2000;

    /// Context for a modulus on the positive imaginary axis.
    pub fn new(tau: Complex64) -> Result<Self> {
        if !(tau.im > 0.0 && tau.im.is_finite()) {
            return Err(Error::domain(format!("need Im τ > 0, got τ = {tau}")));
        }
        if tau.re.abs() > 1e-14 * tau.im.max(1.0) {
            return Err(Error::domain(format!(
                "only purely imaginary τ is supported, got τ = {tau}"
            )));
        }
        Ok(ThetaContext {
            t: tau.im,
            max_terms: Self::DEFAULT_MAX_TERMS,
        })
    }

    /// Context for `τ = i t`.
    pub fn from_imag(t: f64) -> Result<Self> {
        Self::new(Complex64::new(0.0, t))
    }

    pub fn with_max_terms(mut self, max_terms: usize) -> Self {
        self.max_terms = max_terms;
        self
    }

    pub fn tau(&self) -> Complex64 {
        Complex64::new(0.0, self.t)
    }

    /// `Im τ`
    pub fn t(&self) -> f64 {
        self.t
    }

    /// `q = exp(iπτ)`, real for imaginary `τ`.
    pub fn nome(&self) -> Complex64 {
        Complex64::new((-PI * self.t).exp(), 0.0)
    }

    pub fn max_terms(&self) -> usize {
        self.max_terms
    }

    /// Whether the Gaussian form is used instead of the `q`-series.
    pub fn uses_transform(&self) -> bool {
        self.t < LN_2 / PI
    }

    /// `θ_j(z)`
    pub fn eval(&self, j: ThetaFn, z: Complex64) -> Result<Complex64> {
        Ok(self.derivatives(j, z, 0)?[0])
    }

    /// `[θ, θ', θ'', θ''']` at `z`; entries above `order` are zero.
    pub fn derivatives(&self, j: ThetaFn, z: Complex64, order: usize) -> Result<[Complex64; 4]> {
        let order = order.min(3);
        // z = w + n τ + m
        let n = (z.im / self.t).round();
        let m = z.re.round();
        let w = Complex64::new(z.re - m, z.im - n * self.t);
        let base = self.unreduced(j, w, order)?;
        if n == 0.0 && m == 0.0 {
            return Ok(base);
        }
        let tau = self.tau();
        let sign = pow_sign(j.tau_sign(), n) * pow_sign(j.unit_sign(), m);
        // θ(w + nτ) = s^n exp(-2πinw - πin²τ) θ(w)
        let factor = (-2.0 * PI * I * n * w - PI * I * n * n * tau).exp() * sign;
        if !(factor.re.is_finite() && factor.im.is_finite()) {
            return Err(Error::ThetaOverflow { re: z.re, im: z.im });
        }
        let c = -2.0 * PI * I * n;
        let mut out = [ZERO; 4];
        for (k, slot) in out.iter_mut().enumerate().take(order + 1) {
            let mut acc = ZERO;
            let mut cpow = Complex64::new(1.0, 0.0);
            for i in 0..=k {
                acc += binomial(k, i) * cpow * base[k - i];
                cpow *= c;
            }
            *slot = factor * acc;
            if !(slot.re.is_finite() && slot.im.is_finite()) {
                return Err(Error::ThetaOverflow { re: z.re, im: z.im });
            }
        }
        Ok(out)
    }

    /// Series evaluation without lattice reduction.
    pub fn unreduced(&self, j: ThetaFn, z: Complex64, order: usize) -> Result<[Complex64; 4]> {
        if self.uses_transform() {
            self.gaussian_series(j, z, order)
        } else {
            self.q_series(j, z, order)
        }
    }

    /// The defining `q`-series, differentiated term by term.
    pub fn q_series(&self, j: ThetaFn, z: Complex64, order: usize) -> Result<[Complex64; 4]> {
        let t = self.t;
        let y = z.im.abs();
        let half = matches!(j, ThetaFn::One | ThetaFn::Two);
        let mut out = [ZERO; 4];
        if !half {
            out[0] = Complex64::new(1.0, 0.0);
        }
        let mut running_max: f64 = 1.0;
        let mut n = 0usize;
        loop {
            if n >= self.max_terms {
                return Err(Error::ThetaTruncation {
                    max_terms: self.max_terms,
                    bound: running_max,
                });
            }
            let (freq, expo) = if half {
                let h = n as f64 + 0.5;
                (2.0 * h * PI, -PI * t * h * h)
            } else {
                let k = (n + 1) as f64;
                (2.0 * k * PI, -PI * t * k * k)
            };
            let alternating = match j {
                ThetaFn::One => parity_sign(n as i64),
                ThetaFn::Four => parity_sign(n as i64 + 1),
                _ => 1.0,
            };
            let coeff = 2.0 * alternating * expo.exp();
            let bound = 2.0 * (expo + freq * y).exp() * freq.max(1.0).powi(order as i32);
            let arg = freq * z;
            let (s, c) = (arg.sin(), arg.cos());
            // k-th derivative of cos(fz) and sin(fz)
            let mut fk = 1.0;
            for (k, slot) in out.iter_mut().enumerate().take(order + 1) {
                let d = match (j, k % 4) {
                    (ThetaFn::One, 0) => s,
                    (ThetaFn::One, 1) => c,
                    (ThetaFn::One, 2) => -s,
                    (ThetaFn::One, _) => -c,
                    (_, 0) => c,
                    (_, 1) => -s,
                    (_, 2) => -c,
                    (_, _) => s,
                };
                *slot += coeff * fk * d;
                fk *= freq;
            }
            running_max = running_max.max(out[0].norm());
            // Terms decrease once past the peak of exp(expo + freq·y).
            let past_peak = if half {
                (n as f64 + 0.5) * t > y / PI
            } else {
                (n + 1) as f64 * t > y / PI
            };
            if past_peak && bound < RELATIVE_CUTOFF * running_max {
                break;
            }
            n += 1;
        }
        Ok(out)
    }

    /// Gaussian sums from the `τ -> -1/τ` transform, e.g.
    /// `θ₃(z) = t^{-1/2} Σ_k exp(-π(z - k)²/t)`.
    ///
    /// Terms at `c` and `-c` are combined before accumulation so that the odd
    /// function `θ₁` vanishes exactly at `z = 0`.
    pub fn gaussian_series(&self, j: ThetaFn, z: Complex64, order: usize) -> Result<[Complex64; 4]> {
        let t = self.t;
        let a = PI / t;
        let half = matches!(j, ThetaFn::One | ThetaFn::Four);
        // sign attached to the Gaussian centred at k (integer lattice) or k - 1/2
        let sign = |k: i64| match j {
            ThetaFn::Three | ThetaFn::Four => 1.0,
            ThetaFn::Two => parity_sign(k),
            ThetaFn::One => -parity_sign(k),
        };
        let gaussian = |c: f64, s: f64| -> [Complex64; 4] {
            let u = z - c;
            let g = (-a * u * u).exp() * s;
            let mut d = [g, ZERO, ZERO, ZERO];
            if order >= 1 {
                d[1] = -2.0 * a * u * g;
            }
            if order >= 2 {
                d[2] = (4.0 * a * a * u * u - 2.0 * a) * g;
            }
            if order >= 3 {
                d[3] = (-8.0 * a * a * a * u * u * u + 12.0 * a * a * u) * g;
            }
            d
        };
        // magnitude bound of a term centred at c, including the polynomial factor
        let bound = |c: f64| {
            let dist = (z.re - c).abs();
            (-a * (dist * dist - z.im * z.im)).exp()
                * (1.0 + 2.0 * a * (dist + z.im.abs())).powi(order as i32)
        };
        let mut out = [ZERO; 4];
        if !half {
            out = gaussian(0.0, sign(0));
        }
        let mut running_max: f64 = out[0].norm();
        for level in 1..self.max_terms as i64 {
            // centres c and -c with their lattice labels
            let (c, k_pos, k_neg) = if half {
                (level as f64 - 0.5, level, 1 - level)
            } else {
                (level as f64, level, -level)
            };
            let p = gaussian(c, sign(k_pos));
            let m = gaussian(-c, sign(k_neg));
            for k in 0..4 {
                out[k] += p[k] + m[k];
            }
            running_max = running_max.max(out[0].norm()).max(p[0].norm()).max(m[0].norm());
            let b = bound(c).max(bound(-c));
            if c > z.re.abs() + 1.0 && b < RELATIVE_CUTOFF * running_max.max(f64::MIN_POSITIVE) {
                let scale = t.sqrt().recip();
                for v in out.iter_mut() {
                    *v *= scale;
                }
                return Ok(out);
            }
        }
        Err(Error::ThetaTruncation {
            max_terms: self.max_terms,
            bound: running_max,
        })
    }
}

/// `(-1)^k`
fn parity_sign(k: i64) -> f64 {
    if k.rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

/// `s^k` for `s = ±1` and integral `k`.
fn pow_sign(s: f64, k: f64) -> f64 {
    if s > 0.0 {
        1.0
    } else {
        parity_sign(k as i64)
    }
}

fn binomial(k: usize, i: usize) -> f64 {
    const ROWS: [[f64; 4]; 4] = [
        [1.0, 0.0, 0.0, 0.0],
        [1.0, 1.0, 0.0, 0.0],
        [1.0, 2.0, 1.0, 0.0],
        [1.0, 3.0, 3.0, 1.0],
    ];
    ROWS[k][i]
}

/// `θ_j(z; τ)`
pub fn theta_eval(j: ThetaFn, z: Complex64, ctx: &ThetaContext) -> Result<Complex64> {
    ctx.eval(j, z)
}

/// Relative defect of `θ_j(z + τ) = s_j exp(-2πiz - πiτ) θ_j(z)`, both sides
/// summed without lattice reduction.
pub fn theta_quasi_period_check(j: ThetaFn, z: Complex64, ctx: &ThetaContext) -> Result<f64> {
    let tau = ctx.tau();
    let lhs = ctx.unreduced(j, z + tau, 0)?[0];
    let base = ctx.unreduced(j, z, 0)?[0];
    let rhs = j.tau_sign() * (-2.0 * PI * I * z - PI * I * tau).exp() * base;
    Ok((lhs - rhs).norm() / base.norm().max(1.0))
}

/// `|θ₃(z; τ) - (-iτ)^{-1/2} Σ_k exp(-(iπ/τ)(k - z)²)|` with the left side from
/// the `q`-series and the right side from the Gaussian sum.
pub fn theta3_modular_residual(z: Complex64, ctx: &ThetaContext) -> Result<f64> {
    let direct = ctx.q_series(ThetaFn::Three, z, 0)?[0];
    let transformed = ctx.gaussian_series(ThetaFn::Three, z, 0)?[0];
    Ok((direct - transformed).norm())
}

/// Theta constants at `z = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThetaConstants {
    pub theta2: f64,
    pub theta3: f64,
    pub theta4: f64,
    /// `θ₁'(0)`
    pub theta1_prime: f64,
    /// `θ₁'''(0)`
    pub theta1_ppp: f64,
    /// `θ₃''(0)`
    pub theta3_pp: f64,
}

impl ThetaConstants {
    /// Relative defect of `θ₁' = π θ₂ θ₃ θ₄`.
    pub fn jacobi_residual(&self) -> f64 {
        let rhs = PI * self.theta2 * self.theta3 * self.theta4;
        (self.theta1_prime - rhs).abs() / rhs.abs()
    }

    /// Relative defect of `θ₃⁴ = θ₂⁴ + θ₄⁴`.
    pub fn quartic_residual(&self) -> f64 {
        let lhs = self.theta3.powi(4);
        (lhs - self.theta2.powi(4) - self.theta4.powi(4)).abs() / lhs
    }
}

pub fn theta_constants(ctx: &ThetaContext) -> Result<ThetaConstants> {
    let zero = ZERO;
    let t1 = ctx.derivatives(ThetaFn::One, zero, 3)?;
    let t2 = ctx.eval(ThetaFn::Two, zero)?;
    let t3 = ctx.derivatives(ThetaFn::Three, zero, 2)?;
    let t4 = ctx.eval(ThetaFn::Four, zero)?;
    Ok(ThetaConstants {
        theta2: t2.re,
        theta3: t3[0].re,
        theta4: t4.re,
        theta1_prime: t1[1].re,
        theta1_ppp: t1[3].re,
        theta3_pp: t3[2].re,
    })
}
