use num_complex::Complex64;
use proptest::prelude::*;

use twin_gap::asymptotics::{expansion_two_gap, expansion_two_gap_theorem_form, two_gap_ratio_form};
use twin_gap::elliptic::{elliptic_data, elliptic_data_with};
use twin_gap::identities::{
    g1hat, theta_identity_residual_at, ThetaIdentity,
};
use twin_gap::oracle::{fredholm_logdet, nystrom_eigenvalues};
use twin_gap::quadrature::EndpointRule;
use twin_gap::two_gap::derive_geometry;
use twin_gap::{GapPair, ThetaContext, ThetaFn};

fn gap_pair() -> impl Strategy<Value = GapPair> {
    (-0.9f64..0.85, 0.02f64..0.9).prop_filter_map("inside (-1, 1)", |(v1, width)| {
        let v2 = v1 + width;
        (v2 < 0.95).then(|| GapPair::new(v1, v2).ok()).flatten()
    })
}

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn addition_formulas(t in 0.3f64..3.0, x in -1.0f64..1.0, y in -1.0f64..1.0) {
        let ctx = ThetaContext::from_imag(t).unwrap();
        let th = |j, z: f64| ctx.eval(j, c(z)).unwrap();
        use ThetaFn::{Four, Three, Two};
        for other in [Two, Four] {
            let lhs = th(other, x + y) * th(Three, x - y) + th(other, x - y) * th(Three, x + y);
            let rhs = 2.0 / (th(other, 0.0) * th(Three, 0.0))
                * th(other, x) * th(other, y) * th(Three, x) * th(Three, y);
            prop_assert!((lhs - rhs).norm() <= 1e-11 * rhs.norm().max(lhs.norm()).max(1e-300),
                "{other:?}: {lhs} vs {rhs}");
        }
    }

    #[test]
    fn log_derivative_shift_by_tau(t in 0.3f64..3.0, re in -0.5f64..0.5, im in -0.4f64..0.4) {
        let ctx = ThetaContext::from_imag(t).unwrap();
        let z = Complex64::new(re, im * t);
        for j in ThetaFn::ALL {
            let a = ctx.derivatives(j, z, 1).unwrap();
            let b = ctx.derivatives(j, z + ctx.tau(), 1).unwrap();
            let (la, lb) = (a[1] / a[0], b[1] / b[0]);
            let want = la - Complex64::new(0.0, 2.0 * std::f64::consts::PI);
            prop_assume!(a[0].norm() > 1e-3);
            prop_assert!((lb - want).norm() <= 1e-11 * want.norm().max(1.0), "{j:?}: {lb} vs {want}");
        }
    }

    #[test]
    fn log_derivative_of_theta3_is_elliptic(t in 0.3f64..3.0, re in -0.5f64..0.5, im in -0.3f64..0.3) {
        let ctx = ThetaContext::from_imag(t).unwrap();
        let z = Complex64::new(re, im * t);
        let t3 = ctx.derivatives(ThetaFn::Three, z, 2).unwrap();
        let t1 = ctx.eval(ThetaFn::One, z).unwrap();
        let zero = Complex64::new(0.0, 0.0);
        let c3 = ctx.derivatives(ThetaFn::Three, zero, 2).unwrap();
        let c1 = ctx.derivatives(ThetaFn::One, zero, 1).unwrap()[1];
        let lhs = t3[2] / t3[0] - (t3[1] / t3[0]).powi(2);
        let rhs = (c1 / c3[0]).powi(2) * (t1 / t3[0]).powi(2) + c3[2] / c3[0];
        prop_assert!((lhs - rhs).norm() <= 1e-10 * rhs.norm().max(1.0), "{lhs} vs {rhs}");
    }

    #[test]
    fn theta3_is_positive_on_the_real_line(t in 0.05f64..5.0, x in -3.0f64..3.0) {
        let v = ThetaContext::from_imag(t).unwrap().eval(ThetaFn::Three, c(x)).unwrap();
        prop_assert!(v.re > 0.0 && v.im.abs() <= 1e-14 * v.re);
    }

    #[test]
    fn even_integrals_are_positive_and_moments_consistent(g in gap_pair()) {
        let e = elliptic_data(g).unwrap();
        prop_assert!(e.i0 > 0.0 && e.i2 > 0.0 && e.j0 > 0.0 && e.j2 > 0.0);
        // Cauchy–Schwarz for the positive weights on each cut
        prop_assert!(e.i1 * e.i1 <= e.i0 * e.i2);
        prop_assert!(e.j1 * e.j1 <= e.j0 * e.j2);
    }

    #[test]
    fn leading_coefficient_positive_and_reflection_symmetric(g in gap_pair()) {
        let a = derive_geometry(g).unwrap();
        let b = derive_geometry(g.reflected()).unwrap();
        prop_assert!(a.g0 > 0.0);
        prop_assert!((a.omega - b.omega).abs() < 1e-12);
        prop_assert!((a.tau - b.tau).norm() < 1e-11);
        prop_assert!(a.d.im > 0.0 && a.d.im <= a.tau.im);
    }

    #[test]
    fn expansion_forms_and_reflection(g in gap_pair(), s in 1.0f64..30.0) {
        let a = expansion_two_gap(s, g).unwrap();
        let b = expansion_two_gap_theorem_form(s, g).unwrap();
        let r = expansion_two_gap(s, g.reflected()).unwrap();
        let scale = a.total.abs().max(1.0);
        prop_assert!((a.total - b.total).abs() <= 1e-10 * scale);
        prop_assert!((a.total - r.total).abs() <= 1e-10 * scale);
    }

    #[test]
    fn theta_term_period(g in gap_pair(), s in 1.0f64..30.0) {
        let geom = derive_geometry(g).unwrap();
        let a = two_gap_ratio_form(s, &geom).unwrap();
        let b = two_gap_ratio_form(s + 1.0 / geom.omega, &geom).unwrap();
        prop_assert!((a.theta_term - b.theta_term).abs() < 1e-10);
    }

    #[test]
    fn identity_a_periodic_and_even_in_omega(g in gap_pair(), omega in -1.0f64..1.0) {
        let geom = derive_geometry(g).unwrap();
        let r = |w: f64| theta_identity_residual_at(ThetaIdentity::A, &geom, w, geom.d).unwrap().residual;
        let base = r(omega);
        prop_assert!(base < 1e-9);
        prop_assert!((r(omega + 1.0) - base).abs() < 1e-11);
        prop_assert!((r(-omega) - base).abs() < 1e-11);
    }

    #[test]
    fn identities_invariant_under_lattice_shifts(g in gap_pair(), omega in 0.0f64..1.0) {
        let geom = derive_geometry(g).unwrap();
        for which in ThetaIdentity::ALL {
            let base = theta_identity_residual_at(which, &geom, omega, geom.d).unwrap().residual;
            for shift in [c(1.0), geom.tau, c(-1.0) - geom.tau] {
                let r = theta_identity_residual_at(which, &geom, omega, geom.d + shift).unwrap().residual;
                prop_assert!((r - base).abs() < 1e-11, "{which:?} {shift}: {r} vs {base}");
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn oracle_translation_invariance(g in gap_pair(), s in 0.5f64..5.0) {
        let base = fredholm_logdet(s, &g.intervals()).unwrap().log_det;
        for shift in [0.3, -1.7] {
            let moved: Vec<_> = g.intervals().iter().map(|&(a, b)| (a + shift, b + shift)).collect();
            let r = fredholm_logdet(s, &moved).unwrap().log_det;
            prop_assert!((r - base).abs() < 1e-10, "{shift}: {r} vs {base}");
        }
    }

    #[test]
    fn oracle_reflection_invariance(g in gap_pair(), s in 0.5f64..5.0) {
        let a = fredholm_logdet(s, &g.intervals()).unwrap().log_det;
        let b = fredholm_logdet(s, &g.reflected().intervals()).unwrap().log_det;
        prop_assert!((a - b).abs() < 1e-10);
    }

    #[test]
    fn nystrom_spectrum_in_unit_interval(g in gap_pair(), s in 0.5f64..6.0) {
        for l in nystrom_eigenvalues(s, &g.intervals(), 48).unwrap() {
            prop_assert!((-1e-12..1.0).contains(&l), "{l}");
        }
    }
}

#[test]
fn oracle_nonincreasing_in_s() {
    for intervals in [vec![(-1.0, 1.0)], GapPair::new(-0.5, 0.3).unwrap().intervals().to_vec()] {
        let values: Vec<f64> = [1.0, 2.0, 4.0, 6.0]
            .iter()
            .map(|&s| fredholm_logdet(s, &intervals).unwrap().log_det)
            .collect();
        assert!(values.windows(2).all(|w| w[1] <= w[0]), "{values:?}");
    }
}

#[test]
fn g1hat_constant_over_grid() {
    let mut values = Vec::new();
    for v1 in [-0.85, -0.65, -0.45, -0.25, -0.05] {
        for v2 in [0.05, 0.25, 0.45, 0.65, 0.85] {
            values.push(g1hat(GapPair::new(v1, v2).unwrap()).unwrap());
        }
    }
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    let sd = (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / values.len() as f64).sqrt();
    assert!(sd < 1e-8, "{sd}");
}

#[test]
fn doubling_quadrature_nodes_is_stable() {
    // residuals sit at rounding level, so compare above a 1e-14 floor
    let floor = 1e-14;
    for (v1, v2) in [(-0.5, 0.3), (-0.8, -0.1), (-0.5, -0.499)] {
        let g = GapPair::new(v1, v2).unwrap();
        let base = EndpointRule::default();
        let doubled = EndpointRule {
            initial_nodes: 2 * base.initial_nodes,
            max_nodes: 2 * base.max_nodes,
            ..base
        };
        let r = |rule| (elliptic_data_with(g, rule).unwrap().period_relation(g) - std::f64::consts::PI).abs();
        let (a, b) = (r(base).max(floor), r(doubled).max(floor));
        assert!(b <= 2.0 * a, "({v1}, {v2}): {a:e} -> {b:e}");
    }
}

#[test]
fn merging_forms_approach_each_other_on_average() {
    // pointwise the gap oscillates with the fractional part of the
    // rotation number; its envelope over a window decays
    use twin_gap::asymptotics::{expansion_merging, expansion_merging_limit};
    let envelope = |s0: f64| {
        (0..=40)
            .map(|k| {
                let s = s0 * (1.0 + 0.2 * k as f64 / 40.0);
                let nu = s.powf(-1.2);
                let g = GapPair::new(-nu, nu).unwrap();
                (expansion_merging(s, g).unwrap().total - expansion_merging_limit(s, g).unwrap().total).abs()
            })
            .fold(0.0, f64::max)
    };
    let values: Vec<f64> = [30.0, 120.0, 480.0, 2000.0].iter().map(|&s| envelope(s)).collect();
    assert!(values.windows(2).all(|w| w[1] < w[0]), "{values:?}");
}
