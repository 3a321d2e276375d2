mod common;

use bn6::bubble_kernel::eval_bubble;
use bn6::energy_expansion::{ansatz_defect, assemble_ansatz, c0, energy, energy_gap, Ansatz};
use bn6::{BubbleParams, RadialFunction, Settings};
use proptest::prelude::*;

use common::{critical, simpson};

fn w_value(an: &Ansatz, r: f64) -> f64 {
    let bg = &an.background;
    let p = BubbleParams::central(an.projection.delta).unwrap();
    let pu = eval_bubble(&p, &[r, 0.0, 0.0, 0.0, 0.0, 0.0]) - an.projection.shift();
    bg.u0.value(r) + bg.eps * bg.v0.value(r) - pu
}

#[test]
fn energy_gap_matches_direct_difference() {
    let cd = critical();
    let s = Settings::default();
    for eps in [1e-2, -1e-2, 3e-2] {
        let b = assemble_ansatz(&cd.ground_state, &cd.v0, eps, cd.constants.d0, &s).unwrap();
        let gap = energy_gap(&b, &cd.ground_state, &cd.v0, &s).unwrap();
        let direct = energy(&b.w, b.lambda, 1e-13).unwrap() - c0(&cd.ground_state, &cd.v0, eps, &s).unwrap();
        assert!((gap - direct).abs() < 1e-3 * gap.abs() + 1e-9, "eps {eps}: gap {gap}, direct {direct}");
    }
}

#[test]
fn sampled_ansatz_matches_pointwise_formula() {
    let cd = critical();
    let s = Settings::default();
    let b = assemble_ansatz(&cd.ground_state, &cd.v0, 1e-2, cd.constants.d0, &s).unwrap();
    let an = b.ansatz(&cd.ground_state, &cd.v0);
    for k in 1..50 {
        let r = 0.02 * k as f64;
        let want = w_value(&an, r);
        assert!((b.w.value(r) - want).abs() < 1e-9 * want.abs().max(1.0));
    }
    assert!(b.w.value(1.0).abs() < 1e-9);
}

#[test]
fn bubble_energy_is_sixth_of_cube_integral() {
    // ∫ U³ over R⁶ with U = α/(1+r²)², α = 24, ω₆ = π³
    let t = simpson(
        |th: f64| {
            if th >= std::f64::consts::FRAC_PI_2 {
                return 0.0;
            }
            let r = th.tan();
            r.powi(5) * (1.0 + r * r).powi(-6) / th.cos().powi(2)
        },
        0.0,
        std::f64::consts::FRAC_PI_2,
        4000,
    );
    let want = std::f64::consts::PI.powi(3) * 24f64.powi(3) * t / 6.0;
    assert!((bn6::energy_expansion::bubble_energy() / want - 1.0).abs() < 1e-10);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn ansatz_defect_matches_finite_differences(
        log_eps in -2.5f64..-1.0,
        positive in any::<bool>(),
        d in 0.5f64..2.0,
        r in 0.05f64..0.95,
    ) {
        let cd = critical();
        let eps = if positive { 10f64.powf(log_eps) } else { -(10f64.powf(log_eps)) };
        let an = Ansatz::new(&cd.ground_state.profile, &cd.v0, eps, eps.abs() * d * cd.constants.d0);
        let lambda = cd.ground_state.lambda + eps;
        let w = |x: f64| w_value(&an, x);
        let lap = |h: f64| {
            let (wm, w0, wp) = (w(r - h), w(r), w(r + h));
            (wp - 2.0 * w0 + wm) / (h * h) + 5.0 / r * (wp - wm) / (2.0 * h)
        };
        // Richardson on h: the bubble tail has large fourth derivatives near the core
        let h = 2e-3 * r;
        let w0 = w(r);
        let fd = (4.0 * lap(h / 2.0) - lap(h)) / 3.0 + w0.abs() * w0 + lambda * w0;
        let formula = ansatz_defect(&an, lambda, r);
        let scale = w0 * w0 + lambda * w0.abs() + 1.0;
        prop_assert!((fd - formula).abs() < 1e-5 * scale, "fd {fd} formula {formula}");
    }
}
