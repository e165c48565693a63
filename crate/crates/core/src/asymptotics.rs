//! Large-`s` expansions of `log det(I - K_s)` on one or two gaps, term by term.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::{LN_2, PI};

use crate::elliptic::{complete_elliptic, GapPair};
use crate::error::{Error, Result};
use crate::theta::{ThetaContext, ThetaFn};
use crate::two_gap::{derive_geometry, DerivedGeometry};

/// Widom–Dyson constant `c₀ = log(2)/12 + 3ζ'(-1)`.
///
/// `ζ'(-1) = 1/12 - log A` with Glaisher's constant `A`; the digits come from a
/// 40-digit evaluation (see `tests/golden/generate.py`).
pub const C0: f64 = -0.438_501_166_054_690_68;

/// Which asymptotic regime a parameter point belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    FixedTwoGap,
    OneGap,
    Merging,
    MergingLimit,
    Separating,
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            Regime::FixedTwoGap => "fixed_two_gap",
            Regime::OneGap => "one_gap",
            Regime::Merging => "merging",
            Regime::MergingLimit => "merging_limit",
            Regime::Separating => "separating",
        };
        f.write_str(name)
    }
}

/// Predicted `log P_s` split into its terms; `total` is their sum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpansionBreakdown {
    pub leading_s2: f64,
    pub log_s_term: f64,
    /// The oscillatory part: `log θ₃(sΩ)` (or its ratio form) for fixed gaps,
    /// its small-`|τ|` replacement in the merging regimes, zero for one gap.
    pub theta_term: f64,
    pub constant_term: f64,
    pub total: f64,
    pub regime: Regime,
    /// Order of the neglected remainder as stated by the governing result.
    pub error_order: String,
    pub warnings: Vec<String>,
}

impl ExpansionBreakdown {
    fn new(
        leading_s2: f64,
        log_s_term: f64,
        theta_term: f64,
        constant_term: f64,
        regime: Regime,
        error_order: &str,
    ) -> Self {
        ExpansionBreakdown {
            leading_s2,
            log_s_term,
            theta_term,
            constant_term,
            total: leading_s2 + log_s_term + theta_term + constant_term,
            regime,
            error_order: error_order.to_string(),
            warnings: Vec::new(),
        }
    }
}

fn check_s(s: f64) -> Result<()> {
    if s > 0.0 && s.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("s must be positive and finite, got {s}")))
    }
}

fn log_theta3_real(ctx: &ThetaContext, x: f64) -> Result<f64> {
    let v = ctx.eval(ThetaFn::Three, Complex64::new(x, 0.0))?;
    if !(v.re > 0.0) {
        return Err(Error::Internal(format!("θ₃({x}) = {v} is not positive")));
    }
    Ok(v.re.ln())
}

/// One gap `(-1, 1)`: `-s²/2 - (1/4) log s + c₀`.
pub fn expansion_one_gap(s: f64) -> Result<ExpansionBreakdown> {
    check_s(s)?;
    Ok(ExpansionBreakdown::new(
        -0.5 * s * s,
        -0.25 * s.ln(),
        0.0,
        C0,
        Regime::OneGap,
        "O(1/s)",
    ))
}

/// Fixed gaps, written with `θ₃(sΩ)/θ₃(0)` and the endpoint constant
/// `(1/4) log((1 - v1)(1 + v2)) - (1/8) Σ log|q(y)| + 2c₀`.
pub fn expansion_two_gap(s: f64, g: GapPair) -> Result<ExpansionBreakdown> {
    check_s(s)?;
    let geom = derive_geometry(g)?;
    two_gap_ratio_form(s, &geom)
}

pub fn two_gap_ratio_form(s: f64, geom: &DerivedGeometry) -> Result<ExpansionBreakdown> {
    let ctx = geom.theta_context()?;
    let (v1, v2) = (geom.v1(), geom.v2());
    let theta = log_theta3_real(&ctx, s * geom.omega)? - log_theta3_real(&ctx, 0.0)?;
    let constant = 0.25 * ((1.0 - v1) * (1.0 + v2)).ln() - sum_log_q(geom) / 8.0 + 2.0 * C0;
    Ok(ExpansionBreakdown::new(
        -s * s * geom.g0,
        -0.5 * s.ln(),
        theta,
        constant,
        Regime::FixedTwoGap,
        "O(1/s)",
    ))
}

/// Fixed gaps with `log θ₃(sΩ)` and `c₁ = -(1/2) log(I₀/π) - (1/8) Σ log|q(y)| + 2c₀`.
pub fn expansion_two_gap_theorem_form(s: f64, g: GapPair) -> Result<ExpansionBreakdown> {
    check_s(s)?;
    let geom = derive_geometry(g)?;
    let ctx = geom.theta_context()?;
    let c1 = -0.5 * (geom.i0() / PI).ln() - sum_log_q(&geom) / 8.0 + 2.0 * C0;
    Ok(ExpansionBreakdown::new(
        -s * s * geom.g0,
        -0.5 * s.ln(),
        log_theta3_real(&ctx, s * geom.omega)?,
        c1,
        Regime::FixedTwoGap,
        "O(1/s)",
    ))
}

/// The symmetric gaps `(-1, -v) ∪ (v, 1)` through `K` and `E` only.
pub fn expansion_two_gap_symmetric(s: f64, v: f64) -> Result<ExpansionBreakdown> {
    check_s(s)?;
    if !(0.0 < v && v < 1.0) {
        return Err(Error::domain(format!("need 0 < v < 1, got {v}")));
    }
    let vp = ((1.0 - v) * (1.0 + v)).sqrt();
    let (k, _) = complete_elliptic(v)?;
    let (kp, ep) = complete_elliptic(vp)?;
    let ctx = ThetaContext::from_imag(2.0 * k / kp)?;
    let constant = -0.25 * ((kp - ep) * (ep - v * v * kp)).ln() + 2.0 * C0;
    Ok(ExpansionBreakdown::new(
        -s * s * ((1.0 + v * v) / 2.0 - ep / kp),
        -0.5 * (s / PI).ln(),
        log_theta3_real(&ctx, s / kp)?,
        constant,
        Regime::FixedTwoGap,
        "O(1/s)",
    ))
}

fn sum_log_q(geom: &DerivedGeometry) -> f64 {
    geom.q_at.iter().map(|q| q.ln()).sum()
}

/// Parameters of the merging regimes: `α = -(1 + S)`, `β = 1 - S`,
/// `γ = (1/β + 1/|α|)/8` with `S = (v1 + v2)/2`, and `ν = (v2 - v1)/2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MergingParameters {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub nu: f64,
    /// `log(γν)^{-1}`
    pub big_l: f64,
    /// `ω₀ = s sqrt|αβ| / log(γν)^{-1}`
    pub omega0: f64,
    /// `⟨ω₀⟩`
    pub frac: f64,
    /// `k = ω₀ - ⟨ω₀⟩`
    pub k: i64,
}

impl MergingParameters {
    pub fn new(s: f64, v1: f64, v2: f64) -> Result<Self> {
        check_s(s)?;
        if !(-1.0 < v1 && v1 < v2 && v2 < 1.0) {
            return Err(Error::domain(format!(
                "need -1 < v1 < v2 < 1, got v1 = {v1}, v2 = {v2}"
            )));
        }
        let sum = 0.5 * (v1 + v2);
        let alpha = -(1.0 + sum);
        let beta = 1.0 - sum;
        let gamma = (1.0 / beta + 1.0 / alpha.abs()) / 8.0;
        let nu = 0.5 * (v2 - v1);
        let big_l = -(gamma * nu).ln();
        if !(big_l > 0.0) {
            return Err(Error::domain(format!(
                "γν = {} must be below 1 for the merging expansions",
                gamma * nu
            )));
        }
        let omega0 = s * (alpha * beta).abs().sqrt() / big_l;
        let frac = nearest_frac(omega0);
        let k_real = omega0 - frac;
        let k = k_real.round();
        if (k_real - k).abs() > 1e-9 * omega0.max(1.0) {
            return Err(Error::Internal(format!("k = {k_real} is not an integer")));
        }
        Ok(MergingParameters {
            alpha,
            beta,
            gamma,
            nu,
            big_l,
            omega0,
            frac,
            k: k as i64,
        })
    }

    fn abs_ab(&self) -> f64 {
        (self.alpha * self.beta).abs()
    }
}

/// `log(1 + e^x)` without overflow.
fn log1p_exp(x: f64) -> f64 {
    if x > 35.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

/// Gaps merging into one: the Barnes-G expansion valid for `sν log(1/ν) -> 0`.
pub fn expansion_merging(s: f64, g: GapPair) -> Result<ExpansionBreakdown> {
    let m = MergingParameters::new(s, g.v1(), g.v2())?;
    let root = m.abs_ab().sqrt();
    let k = m.k;
    let kf = k as f64;
    let log_gn = (m.gamma * m.nu).ln();
    let barnes = (2.0 * kf * kf - kf) * LN_2 - kf * PI.ln() + 4.0 * barnes_g_int(k as u64 + 1)?
        - barnes_g_int(2 * k as u64 + 1)?;
    let mut correction = 0.0;
    let kappa_prev = legendre_kappa(k - 1)?;
    if kappa_prev > 0.0 {
        correction += log1p_exp((2.0 * PI).ln() + 2.0 * kappa_prev.ln() + (1.0 + 2.0 * m.frac) * log_gn);
    }
    let kappa = legendre_kappa(k)?;
    correction += log1p_exp(-(2.0 * PI).ln() - 2.0 * kappa.ln() + (1.0 - 2.0 * m.frac) * log_gn);
    let mut out = ExpansionBreakdown::new(
        -0.5 * s * s + s * root * m.omega0,
        -0.25 * s.ln(),
        -s * root * m.frac * m.frac / m.omega0 + correction,
        C0 + barnes,
        Regime::Merging,
        "O(max{s ν0 log(1/ν0), 1/log(1/ν0), 1/s})",
    );
    let nu = m.nu;
    if s * nu * (1.0 / nu).ln() >= 0.1 {
        out.warnings.push(format!(
            "regime mismatch: s ν log(1/ν) = {:.3e} is not small",
            s * nu * (1.0 / nu).ln()
        ));
    }
    Ok(out)
}

/// The fixed-gap expansion expanded for `sν -> 0` with `2ν > s^{-5/4}`.
pub fn expansion_merging_limit(s: f64, g: GapPair) -> Result<ExpansionBreakdown> {
    let m = MergingParameters::new(s, g.v1(), g.v2())?;
    let l = m.big_l;
    let theta = 0.25 * l.ln() - m.frac * m.frac * l
        + log1p_exp((1.0 - 2.0 * m.frac.abs()) * (m.gamma * m.nu).ln());
    let mut out = ExpansionBreakdown::new(
        s * s * (-0.5 + m.abs_ab() / l),
        -0.5 * s.ln(),
        theta,
        -m.abs_ab().ln() / 8.0 + 2.0 * C0,
        Regime::MergingLimit,
        "o(1)",
    );
    let nu = m.nu;
    if !(2.0 * nu > s.powf(-1.25)) {
        out.warnings.push(format!(
            "regime mismatch: 2ν = {:.3e} is not above s^(-5/4) = {:.3e}",
            2.0 * nu,
            s.powf(-1.25)
        ));
    }
    if s * nu >= 0.1 {
        out.warnings
            .push(format!("regime mismatch: s ν = {:.3e} is not small", s * nu));
    }
    Ok(out)
}

/// Leading coefficient `κ_j` of the degree-`j` Legendre polynomial orthonormal on `[-2, 2]`.
pub fn legendre_kappa(j: i64) -> Result<f64> {
    match j {
        j if j < -1 => Err(Error::domain(format!("κ_j needs j ≥ -1, got {j}"))),
        -1 => Ok(0.0),
        0 => Ok(0.5),
        _ => {
            // log of 4^{-j-1/2} sqrt(2j+1) (2j)! / (j!)²
            let n = j as u64;
            let mut log_binom = 0.0;
            for i in 1..=n {
                log_binom += ((n + i) as f64).ln() - (i as f64).ln();
            }
            let log_k = -(j as f64 + 0.5) * 4f64.ln() + 0.5 * ((2 * n + 1) as f64).ln() + log_binom;
            Ok(log_k.exp())
        }
    }
}

/// `log G(n)` for the Barnes G-function at a positive integer.
pub fn barnes_g_int(n: u64) -> Result<f64> {
    if n == 0 {
        return Err(Error::domain("Barnes G is evaluated at positive integers only"));
    }
    // log G(n) = Σ_{i=1}^{n-2} log i!
    let mut log_fact = 0.0;
    let mut total = 0.0;
    for i in 1..n.saturating_sub(1) {
        log_fact += (i as f64).ln();
        total += log_fact;
    }
    Ok(total)
}

/// `⟨x⟩ ∈ (-1/2, 1/2]`, the signed distance from `x` to the nearest integer.
pub fn nearest_frac(x: f64) -> f64 {
    x - (x - 0.5).ceil()
}

/// Crossover constants between the regimes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegimeThresholds {
    /// Merging when `s ν log(1/ν)` is below this.
    pub merging: f64,
    /// Merging limit when `s ν` is below this (and `2ν > s^{-5/4}`).
    pub merging_limit: f64,
    /// Separating when `min((1 - v2) s, (1 + v1) s)` is below this.
    pub separating: f64,
}

impl Default for RegimeThresholds {
    fn default() -> Self {
        RegimeThresholds {
            merging: 0.1,
            merging_limit: 0.1,
            separating: 10.0,
        }
    }
}

/// Classifies `(s, v1, v2)`; `v1 == v2` is the one-gap case.
pub fn select_regime(
    s: f64,
    v1: f64,
    v2: f64,
    thresholds: &RegimeThresholds,
) -> Result<(Regime, String)> {
    check_s(s)?;
    if !(-1.0 < v1 && v1 <= v2 && v2 < 1.0) {
        return Err(Error::domain(format!(
            "need -1 < v1 <= v2 < 1, got v1 = {v1}, v2 = {v2}"
        )));
    }
    if v1 == v2 {
        return Ok((Regime::OneGap, "v1 = v2: the band is empty, one gap (-1, 1)".into()));
    }
    let nu = 0.5 * (v2 - v1);
    let merge_param = s * nu * (1.0 / nu).ln();
    let merging = merge_param < thresholds.merging;
    let merging_limit = s.powf(-1.25) < 2.0 * nu && s * nu < thresholds.merging_limit;
    let edge = ((1.0 - v2) * s).min((1.0 + v1) * s);
    let separating = edge < thresholds.separating;
    if (merging || merging_limit) && separating {
        return Err(Error::AmbiguousRegime(format!(
            "gaps are both merging (s ν log(1/ν) = {merge_param:.3e}, s ν = {:.3e}) and separating (min edge distance × s = {edge:.3e})",
            s * nu
        )));
    }
    Ok(if merging {
        (
            Regime::Merging,
            format!("s ν log(1/ν) = {merge_param:.3e} < {}", thresholds.merging),
        )
    } else if merging_limit {
        (
            Regime::MergingLimit,
            format!(
                "s^(-5/4) = {:.3e} < 2ν = {:.3e} and s ν = {:.3e} < {}",
                s.powf(-1.25),
                2.0 * nu,
                s * nu,
                thresholds.merging_limit
            ),
        )
    } else if separating {
        (
            Regime::Separating,
            format!("min((1 - v2) s, (1 + v1) s) = {edge:.3e} < {}", thresholds.separating),
        )
    } else {
        (
            Regime::FixedTwoGap,
            format!(
                "s ν log(1/ν) = {merge_param:.3e}, s ν = {:.3e}, edge distance × s = {edge:.3e}: all scales O(1)",
                s * nu
            ),
        )
    })
}

/// Evaluates the expansion that belongs to `regime`.
///
/// The separating regime has no expansion of its own here; it falls back on the
/// fixed-gap formula and says so in the warnings.
pub fn expansion_for_regime(s: f64, v1: f64, v2: f64, regime: Regime) -> Result<ExpansionBreakdown> {
    match regime {
        Regime::OneGap => expansion_one_gap(s),
        Regime::FixedTwoGap => expansion_two_gap(s, GapPair::new(v1, v2)?),
        Regime::Merging => expansion_merging(s, GapPair::new(v1, v2)?),
        Regime::MergingLimit => expansion_merging_limit(s, GapPair::new(v1, v2)?),
        Regime::Separating => {
            let mut out = expansion_two_gap(s, GapPair::new(v1, v2)?)?;
            out.regime = Regime::Separating;
            out.warnings.push(
                "gaps close to ±1: fixed-gap formula used outside its uniform range".into(),
            );
            Ok(out)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_gap_at_unit_s() {
        let e = expansion_one_gap(1.0).unwrap();
        assert_eq!(e.log_s_term, 0.0);
        assert!((e.total - (C0 - 0.5)).abs() < 1e-15);
        assert!(expansion_one_gap(0.0).is_err());
    }

    #[test]
    fn total_is_the_sum_of_terms() {
        let e = expansion_two_gap(6.0, GapPair::new(-0.5, 0.3).unwrap()).unwrap();
        assert_eq!(e.total, e.leading_s2 + e.log_s_term + e.theta_term + e.constant_term);
        assert_eq!(e.regime, Regime::FixedTwoGap);
    }

    #[test]
    fn ratio_and_theorem_forms_agree() {
        for (v1, v2) in [(-0.5, 0.3), (-0.8, -0.1), (-0.2, 0.6)] {
            for s in [3.0, 7.5, 20.0] {
                let g = GapPair::new(v1, v2).unwrap();
                let a = expansion_two_gap(s, g).unwrap();
                let b = expansion_two_gap_theorem_form(s, g).unwrap();
                assert!((a.total - b.total).abs() < 1e-10, "{g:?} s={s}");
            }
        }
    }

    #[test]
    fn symmetric_closed_form_agrees() {
        for v in [0.2, 0.5, 0.7] {
            for s in [4.0, 9.0] {
                let a = expansion_two_gap(s, GapPair::symmetric(v).unwrap()).unwrap();
                let b = expansion_two_gap_symmetric(s, v).unwrap();
                assert!((a.total - b.total).abs() < 1e-9, "v={v} s={s}: {} vs {}", a.total, b.total);
            }
        }
    }

    #[test]
    fn reflection_invariance() {
        let g = GapPair::new(-0.7, 0.2).unwrap();
        for s in [2.0, 5.0, 11.0] {
            let a = expansion_two_gap(s, g).unwrap();
            let b = expansion_two_gap(s, g.reflected()).unwrap();
            assert!((a.total - b.total).abs() < 1e-10);
        }
    }

    #[test]
    fn theta_term_is_periodic_in_s() {
        let g = GapPair::new(-0.5, 0.3).unwrap();
        let geom = derive_geometry(g).unwrap();
        let period = 1.0 / geom.omega;
        for s in [3.0, 8.2] {
            let a = two_gap_ratio_form(s, &geom).unwrap();
            let b = two_gap_ratio_form(s + period, &geom).unwrap();
            assert!((a.theta_term - b.theta_term).abs() < 1e-10);
        }
    }

    #[test]
    fn legendre_coefficients() {
        assert_eq!(legendre_kappa(-1).unwrap(), 0.0);
        assert_eq!(legendre_kappa(0).unwrap(), 0.5);
        assert!((legendre_kappa(1).unwrap() - 3f64.sqrt() / 4.0).abs() < 1e-15);
        // j = 2: 4^{-5/2} sqrt(5) · 24 / 4
        assert!((legendre_kappa(2).unwrap() - 5f64.sqrt() * 6.0 / 32.0).abs() < 1e-15);
        assert!(legendre_kappa(400).unwrap().is_finite());
        assert!(legendre_kappa(-2).is_err());
    }

    #[test]
    fn barnes_g_at_integers() {
        assert_eq!(barnes_g_int(1).unwrap(), 0.0);
        assert_eq!(barnes_g_int(2).unwrap(), 0.0);
        assert!((barnes_g_int(3).unwrap() - 0.0).abs() < 1e-15);
        assert!((barnes_g_int(4).unwrap() - 2f64.ln()).abs() < 1e-15);
        assert!((barnes_g_int(5).unwrap() - 12f64.ln()).abs() < 1e-14);
        // G(7) = 1!·2!·3!·4!·5! = 34560
        assert!((barnes_g_int(7).unwrap() - 34560f64.ln()).abs() < 1e-13);
        assert!(barnes_g_int(0).is_err());
    }

    #[test]
    fn nearest_fraction() {
        assert!((nearest_frac(1.3) - 0.3).abs() < 1e-15);
        assert_eq!(nearest_frac(2.5), 0.5);
        assert!((nearest_frac(-0.8) - 0.2).abs() < 1e-15);
        assert_eq!(nearest_frac(-0.5), 0.5);
        assert_eq!(nearest_frac(3.0), 0.0);
    }

    #[test]
    fn regime_examples() {
        let th = RegimeThresholds::default();
        assert_eq!(select_regime(100.0, -0.5, 0.3, &th).unwrap().0, Regime::FixedTwoGap);
        assert_eq!(select_regime(100.0, -1e-8, 1e-8, &th).unwrap().0, Regime::Merging);
        assert_eq!(select_regime(100.0, -0.5, 1.0 - 1e-4, &th).unwrap().0, Regime::Separating);
        assert_eq!(select_regime(5.0, 0.2, 0.2, &th).unwrap().0, Regime::OneGap);
        assert!(matches!(
            select_regime(100.0, 0.99 - 1e-9, 0.99 + 1e-9, &th),
            Err(Error::AmbiguousRegime(_))
        ));
    }

    #[test]
    fn merging_reduces_to_one_gap_for_fast_merging() {
        // k = 0 kills the first correction; what is left is the one-gap
        // expansion plus the s sqrt|αβ| shift and a vanishing correction.
        let g = GapPair::new(-1e-6, 1e-6).unwrap();
        let s = 20.0;
        let m = MergingParameters::new(s, g.v1(), g.v2()).unwrap();
        let e = expansion_merging(s, g).unwrap();
        let one = expansion_one_gap(s).unwrap();
        let shift = s * m.abs_ab().sqrt() * (m.omega0 - m.frac * m.frac / m.omega0);
        let barnes_block = e.constant_term - C0;
        assert!((e.total - (one.total + shift + barnes_block)).abs() < 0.05);
        if m.k == 0 {
            assert_eq!(barnes_block, 0.0);
        }
    }

    #[test]
    fn merging_limit_warns_out_of_regime() {
        let e = expansion_merging_limit(50.0, GapPair::new(-0.5, 0.3).unwrap()).unwrap();
        assert!(!e.warnings.is_empty());
        // needs s^{-1/4} < 0.2, so s well above 625
        let e = expansion_merging_limit(2000.0, GapPair::new(-4e-5, 4e-5).unwrap()).unwrap();
        assert!(e.warnings.is_empty(), "{:?}", e.warnings);
    }
}
