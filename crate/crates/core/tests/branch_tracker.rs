mod common;

use bn6::branch_tracker::{
    continue_branch, extract_delta, extract_delta_corrected, fit_blowup_rate, geometric_targets, solve_near, BranchPoint,
};
use bn6::critical_data::RecomputedLaw;
use bn6::energy_expansion::assemble_ansatz;
use bn6::{Error, RadialFunction, Settings};
use proptest::prelude::*;

use common::{critical, fd_defect};

const EPS: f64 = -1e-2;

fn d_star() -> f64 {
    RecomputedLaw::new(&critical().constants).d_star
}

fn point_at(eps: f64, delta_guess: f64, settings: &Settings) -> bn6::Result<BranchPoint> {
    let cd = critical();
    solve_near(&cd.ground_state, &cd.v0, eps, delta_guess, settings)
}

#[test]
fn opposite_sign_point_concentrates_at_recomputed_rate() {
    let cd = critical();
    let s = Settings::default();
    let p = point_at(EPS, d_star() * EPS.abs(), &s).unwrap();
    assert_eq!(p.node_count, 1);
    assert_eq!(p.lambda, cd.ground_state.lambda + EPS);
    assert!(p.profile.center_value() < 0.0);
    assert!(p.profile.value(1.0).abs() < 1e-8 * p.profile.center_value().abs());
    let ratio = p.delta_over_abs_eps();
    assert!((ratio / d_star() - 1.0).abs() < 0.02, "delta/|eps| = {ratio}, d* = {}", d_star());
    // the sampled profile solves the equation away from the core
    for k in 2..19 {
        let r = k as f64 / 20.0;
        let u = |x: f64| p.profile.value(x);
        let d = fd_defect(u, p.lambda, r, 1e-4);
        assert!(d.abs() < 1e-5 * (u(r).powi(2) + p.lambda * u(r).abs() + 1.0), "r = {r}: {d}");
    }
}

#[test]
fn point_is_reproducible_and_mesh_independent() {
    let s = Settings::default();
    let guess = d_star() * EPS.abs();
    let a = point_at(EPS, guess, &s).unwrap();
    let b = point_at(EPS, guess, &s).unwrap();
    assert_eq!(a.profile.values, b.profile.values);
    assert_eq!(a.delta_extracted, b.delta_extracted);
    let fine = Settings {
        grid_n: 2 * s.grid_n,
        ..s
    };
    let c = point_at(EPS, guess, &fine).unwrap();
    assert!((c.delta_extracted / a.delta_extracted - 1.0).abs() < 1e-8);
    assert!((c.profile.value(0.5) - a.profile.value(0.5)).abs() < 1e-8);
}

#[test]
fn extract_delta_inverts_the_ansatz() {
    let cd = critical();
    let s = Settings::default();
    for (eps, d) in [(-1e-2, 1.0), (-3e-3, 0.5), (1e-2, 2.0)] {
        let b = assemble_ansatz(&cd.ground_state, &cd.v0, eps, d * cd.constants.d0, &s).unwrap();
        let delta = b.delta();
        let plain = extract_delta(&b.w, &cd.ground_state).unwrap();
        let corrected = extract_delta_corrected(&b.w, &cd.ground_state, &cd.v0, eps).unwrap();
        assert!((corrected / delta - 1.0).abs() < 1e-6, "{corrected} vs {delta}");
        assert!((plain / delta - 1.0).abs() < 2.0 * delta * delta * cd.v0.value(0.0).abs() * eps.abs() / 24.0 + 1e-6);
    }
    assert!(matches!(extract_delta(&cd.ground_state.profile, &cd.ground_state), Err(Error::NotBlownUp { .. })));
}

#[test]
fn trivial_continuation_returns_the_start() {
    let cd = critical();
    let s = Settings::default();
    let p = point_at(EPS, d_star() * EPS.abs(), &s).unwrap();
    let out = continue_branch(p.clone(), &[p.eps], &cd.ground_state, &cd.v0, &s).unwrap();
    assert_eq!(out.len(), 1);
    assert_eq!(out[0].profile.values, p.profile.values);
    assert_eq!(out[0].delta_extracted, p.delta_extracted);
    let wrong = continue_branch(p.clone(), &[-p.eps], &cd.ground_state, &cd.v0, &s);
    assert!(matches!(wrong, Err(Error::InvalidParameter(_))));
    let outward = continue_branch(p.clone(), &[2.0 * p.eps], &cd.ground_state, &cd.v0, &s);
    assert!(matches!(outward, Err(Error::InvalidParameter(_))));
}

#[test]
fn short_branch_fit_matches_pointwise_rates() {
    let cd = critical();
    let s = Settings::default();
    let start = point_at(EPS, d_star() * EPS.abs(), &s).unwrap();
    let targets = geometric_targets(EPS, 1e-1 * EPS, 4);
    let pts = continue_branch(start, &targets, &cd.ground_state, &cd.v0, &s).unwrap();
    assert_eq!(pts.len(), targets.len());
    assert!(pts.iter().all(|p| p.node_count == 1));
    let fit = fit_blowup_rate(&pts, d_star()).unwrap();
    assert!(fit.r_squared > 0.999);
    assert!(fit.relative_gap < 0.02, "d fitted {} vs d* {}", fit.d_fitted, d_star());
}

#[test]
fn theorem_sign_has_no_point_at_the_stated_rate() {
    // with ε of the sign the stated law selects, the one-node solution near λ₀ + ε does not
    // concentrate at δ ≈ d₀|ε|
    let cd = critical();
    let eps = 1e-2 * cd.report.theorem_case.sign();
    match point_at(eps, cd.constants.d0 * eps.abs(), &Settings::default()) {
        Err(_) => {}
        Ok(p) => {
            let gap = (p.delta_over_abs_eps() / cd.constants.d0 - 1.0).abs();
            assert!(gap > 0.15, "delta/|eps| = {}", p.delta_over_abs_eps());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn shooting_is_insensitive_to_the_guess(factor in 0.5f64..2.0) {
        let s = Settings::default();
        let base = point_at(EPS, d_star() * EPS.abs(), &s).unwrap();
        let p = point_at(EPS, factor * d_star() * EPS.abs(), &s).unwrap();
        prop_assert!((p.delta_extracted / base.delta_extracted - 1.0).abs() < 1e-9);
    }
}
