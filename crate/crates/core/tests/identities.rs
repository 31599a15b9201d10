//! Identity residuals, duality and symmetry checks beyond the unit tests.

use harper_core::cocycle::lyapunov_exponent;
use harper_core::greenm::{
    boundary_ratio_ladder, green_diag_residuals, lemma26_residual, m_minus, m_plus, singular_support_diagnostic,
};
use harper_core::model::family::HarperFamily;
use harper_core::model::source::Reflected;
use harper_core::verify::{duality_dos_check, lambda_swap_check, theorem31_check};
use harper_core::{golden_mean, ConstantModel, Coupling, HarperModel, C64};
use proptest::prelude::*;

fn coupling(l1: f64, l2: f64, l3: f64) -> Coupling {
    Coupling::new(l1, l2, l3).unwrap()
}

#[test]
fn free_green_identities_at_depth_2000() {
    let (r1, r2) = green_diag_residuals(&ConstantModel::free(), C64::new(0.0, 1.0), 2000).unwrap();
    assert!(r1 <= 1e-10 && r2 <= 1e-10);
}

#[test]
fn free_lemma26_is_tight() {
    let out = lemma26_residual(&ConstantModel::free(), C64::new(0.0, 1.0), 2000).unwrap();
    assert!(out.residual <= 1e-10, "{out:?}");
}

#[test]
fn lemma26_residual_shrinks_with_window() {
    let m = HarperModel::new(coupling(0.2, 0.9, 0.4), golden_mean(), 0.6).unwrap();
    let z = C64::new(0.1, 0.05);
    let coarse = lemma26_residual(&m, z, 100).unwrap().residual;
    let fine = lemma26_residual(&m, z, 400).unwrap().residual;
    assert!(fine <= coarse, "{coarse} -> {fine}");
}

#[test]
fn free_boundary_ratio_inside_and_outside_the_band() {
    let free = ConstantModel::free();
    let ladder = [1e-1, 1e-2, 1e-3];
    let inside = boundary_ratio_ladder(&free, 0.0, &ladder).unwrap();
    // Im m_+(0 + i0) = 1, so the ratio grows like 1/eps
    for w in inside.windows(2) {
        assert!(w[1].ratio > 5.0 * w[0].ratio);
    }
    let outside = boundary_ratio_ladder(&free, 3.0, &ladder).unwrap();
    // m_+ is real and analytic at E = 3, so the ratio tends to m'(3) = (3/sqrt 5 - 1)/2
    let limit = (3.0 / 5f64.sqrt() - 1.0) / 2.0;
    assert!((outside[2].ratio - limit).abs() < 1e-4, "{outside:?}");
    assert!(inside.iter().chain(&outside).all(|r| r.ratio >= 0.0));
}

#[test]
fn free_singular_support_probe() {
    let free = ConstantModel::free();
    let inside = singular_support_diagnostic(&free, 0.0, &[1e-1, 1e-2, 1e-3]).unwrap();
    assert!(inside.iter().all(|x| x.is_finite() && *x < 1.5));
    let outside = singular_support_diagnostic(&free, 3.0, &[1e-1, 1e-2, 1e-3]).unwrap();
    assert!(outside[2] < outside[0] && outside[2] < 1e-3);
    assert_eq!(singular_support_diagnostic(&free, 0.0, &[0.1]).unwrap().len(), 1);
}

#[test]
fn green_residuals_do_not_grow_with_depth() {
    let m = HarperModel::new(coupling(0.3, 0.6, 0.2), golden_mean(), 0.2).unwrap();
    let z = C64::new(0.4, 0.05);
    let shallow = green_diag_residuals(&m, z, 100).unwrap();
    let deep = green_diag_residuals(&m, z, 3200).unwrap();
    assert!(deep.0 <= shallow.0.max(1e-12) && deep.1 <= shallow.1.max(1e-12));
}

#[test]
fn region_two_zero_le_approached_from_the_interior() {
    for l2 in [1.6, 1.3, 1.1] {
        let r = theorem31_check(&coupling(0.2, l2, 0.3), golden_mean(), 0.0, 5, 50_000, 300, 10)
            .unwrap()
            .with_tolerance(0.02);
        assert!(r.passed, "lambda2 = {l2}: {:?}", r.measured);
    }
}

#[test]
fn swapped_couplings_share_the_lyapunov_exponent() {
    let r = lambda_swap_check(&coupling(0.3, 0.5, 0.2), golden_mean(), 0.0, 5, 50_000, 300, 10).unwrap();
    assert!(r.max_abs_residual <= 0.03, "{r:?}");
}

#[test]
fn duality_in_region_two() {
    let r = duality_dos_check(&coupling(0.2, 2.0, 0.1), golden_mean(), 500, 20).unwrap();
    assert!(r.max_abs_residual <= 0.02, "{r:?}");
}

#[test]
fn almost_mathieu_le_off_the_real_axis_dominates() {
    // L(E + i eps) >= L(E) and is continuous as eps -> 0
    let m = HarperModel::new(coupling(0.0, 0.5, 0.0), golden_mean(), 0.0).unwrap();
    let on = lyapunov_exponent(&m, C64::new(0.3, 0.0), 100_000).unwrap().le_estimate;
    let off = lyapunov_exponent(&m, C64::new(0.3, 0.01), 100_000).unwrap().le_estimate;
    assert!(off >= on - 1e-3 && (off - on).abs() < 0.02);
}

fn model_strategy() -> impl Strategy<Value = HarperModel> {
    (0.0..1.5f64, 0.0..1.5f64, 0.0..1.5f64, 0.05..0.95f64, 0.0..1.0f64).prop_filter_map("zero coupling", |(a, b, c, al, th)| {
        let l = Coupling::new(a, b, c).ok()?;
        HarperModel::new(l, al, th).ok()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn m_functions_are_herglotz(model in model_strategy(), re in -4.0..4.0f64, im in 0.05..2.0f64, site in -50i64..50) {
        let z = C64::new(re, im);
        prop_assert!(m_plus(&model, z, 1500, site).unwrap().value.im > 0.0);
        prop_assert!(m_minus(&model, z, 1500, site).unwrap().value.im > 0.0);
    }

    #[test]
    fn reflection_swaps_half_lines(model in model_strategy(), re in -3.0..3.0f64, im in 0.3..2.0f64) {
        let z = C64::new(re, im);
        let a = m_plus(&model, z, 1500, 0).unwrap().value;
        let b = m_minus(&Reflected(&model), z, 1500, 0).unwrap().value;
        prop_assert!((a - b).norm() <= 1e-10);
    }
}

#[test]
fn family_members_share_the_integrated_le() {
    // LE is phase-independent almost surely
    let f = HarperFamily::new(coupling(0.3, 0.5, 0.2), golden_mean()).unwrap();
    let a = lyapunov_exponent(&f.model(0.1), C64::new(0.7, 0.0), 100_000).unwrap().le_estimate;
    let b = lyapunov_exponent(&f.model(0.73), C64::new(0.7, 0.0), 100_000).unwrap().le_estimate;
    assert!((a - b).abs() < 0.01, "{a} {b}");
}
