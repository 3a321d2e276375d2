mod common;

use bn6::critical_data::{find_lambda0, lambda0_defect};
use bn6::radial_bvp::{
    first_eigenvalue, free_sector_eigenvalues, shoot, solve_positive, solve_v0, strong_defect,
};
use bn6::{omega6, DomainBall, RadialFunction, Settings};
use proptest::prelude::*;

use common::{critical, fd_defect, simpson};

// Zeros of J_2 and J_3 from standard tables
const J2: [f64; 3] = [5.135622301840683, 8.417244140399865, 11.61984117214906];
const J3: [f64; 2] = [6.380161895923984, 9.761023129981670];

#[test]
fn free_sector_spectrum_is_bessel_squared() {
    let dom = DomainBall::unit();
    let s0 = free_sector_eigenvalues(&dom, 0, 3).unwrap();
    for (mu, j) in s0.eigenvalues.iter().zip(J2) {
        assert!((mu - j * j).abs() < 1e-6 * j * j, "{mu} vs {}", j * j);
    }
    let s1 = free_sector_eigenvalues(&dom, 1, 2).unwrap();
    for (mu, j) in s1.eigenvalues.iter().zip(J3) {
        assert!((mu - j * j).abs() < 1e-6 * j * j, "{mu} vs {}", j * j);
    }
    assert!((first_eigenvalue(&dom) - J2[0] * J2[0]).abs() < 1e-12);
}

#[test]
fn ground_state_satisfies_equation_by_finite_differences() {
    let gs = &critical().ground_state;
    let u = |r: f64| gs.profile.value(r);
    for k in 1..20 {
        let r = k as f64 / 20.0;
        let d = fd_defect(u, gs.lambda, r, 1e-4);
        let scale = u(r).powi(2) + gs.lambda * u(r).abs() + 1.0;
        assert!(d.abs() < 1e-5 * scale, "r = {r}: defect {d}");
    }
    let sd = strong_defect(&gs.profile, gs.lambda);
    // the innermost micro-intervals carry a rounding floor of order ε·u(0)/h²
    assert!(sd < 1e-4, "strong defect {sd}");
    assert!(gs.profile.value(1.0).abs() < 1e-9);
}

#[test]
fn nehari_identity_and_energy() {
    let gs = &critical().ground_state;
    let p = &gs.profile;
    let m = 20_000;
    let grad = simpson(|r| p.jet(r)[1].powi(2) * r.powi(5), 0.0, 1.0, m);
    let cube = simpson(|r| p.value(r).abs().powi(3) * r.powi(5), 0.0, 1.0, m);
    let mass = simpson(|r| p.value(r).powi(2) * r.powi(5), 0.0, 1.0, m);
    let lhs = grad;
    let rhs = cube + gs.lambda * mass;
    assert!((lhs - rhs).abs() < 1e-9 * lhs, "{lhs} vs {rhs}");
    // J = (1/6) ∫ u³ on a Nehari solution
    let j = bn6::energy_expansion::energy(p, gs.lambda, 1e-12).unwrap();
    assert!((j - omega6() * cube / 6.0).abs() < 1e-8 * j, "{j} vs {}", omega6() * cube / 6.0);
}

#[test]
fn v0_is_the_lambda_derivative_of_the_ground_state() {
    let dom = DomainBall::unit();
    let s = Settings::default();
    let cd = critical();
    let l0 = cd.ground_state.lambda;
    // Richardson-extrapolated central difference of u_λ(0) and u_λ(1/2)
    let at = |lambda: f64| {
        let gs = solve_positive(lambda, &dom, &s).unwrap();
        [gs.max_value, gs.profile.value(0.5)]
    };
    let cd_at = |h: f64| {
        let (p, m) = (at(l0 + h), at(l0 - h));
        [(p[0] - m[0]) / (2.0 * h), (p[1] - m[1]) / (2.0 * h)]
    };
    let (c1, c2) = (cd_at(0.02), cd_at(0.01));
    for (k, r) in [0.0, 0.5].into_iter().enumerate() {
        let rich = (4.0 * c2[k] - c1[k]) / 3.0;
        let v = cd.v0.value(r);
        assert!((v - rich).abs() < 1e-6 * v.abs().max(1.0), "r = {r}: v0 = {v}, fd = {rich}");
    }
    let again = solve_v0(&cd.ground_state, &dom, &s).unwrap();
    assert_eq!(again.values, cd.v0.values);
}

#[test]
fn lambda0_is_twice_the_maximum() {
    let cd = critical();
    let l0 = cd.report.lambda0;
    assert!((l0 - 2.0 * cd.ground_state.max_value).abs() < 1e-9 * l0);
    let dom = DomainBall::unit();
    let s_plus = lambda0_defect(l0 + 0.1, &dom).unwrap();
    let s_minus = lambda0_defect(l0 - 0.1, &dom).unwrap();
    assert!(s_plus * s_minus < 0.0);
    assert_eq!(cd.ground_state.morse_data.index, 1);
    let again = find_lambda0(&dom, 1e-10).unwrap();
    assert!((again.lambda0 - l0).abs() < 1e-10 * l0);
}

#[test]
fn lambda0_scales_with_the_radius() {
    // u ↦ μ² u(μx) maps solutions on B_R at λ to solutions on B_{R/μ} at μ²λ
    let l1 = critical().report.lambda0;
    let dom = DomainBall::new(2.0).unwrap();
    let l2 = find_lambda0(&dom, 1e-10).unwrap().lambda0;
    assert!((l2 - l1 / 4.0).abs() < 1e-8 * l1, "{l2} vs {}", l1 / 4.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn ground_state_is_positive_with_decreasing_peak(lambda in 2.0f64..24.0) {
        let dom = DomainBall::unit();
        let s = Settings::default();
        let a = solve_positive(lambda, &dom, &s).unwrap();
        let b = solve_positive(lambda + 1.0, &dom, &s).unwrap();
        prop_assert!(a.max_value > b.max_value);
        prop_assert_eq!(a.profile.node_count(), 0);
        prop_assert!(a.profile.values[..a.profile.len() - 1].iter().all(|&v| v > 0.0));
        let (below, n_below) = shoot(a.max_value * (1.0 - 1e-6), lambda, &dom).unwrap();
        let (above, n_above) = shoot(a.max_value * (1.0 + 1e-6), lambda, &dom).unwrap();
        prop_assert!(below > 0.0 && above < 0.0);
        prop_assert_eq!((n_below, n_above), (0, 1));
    }
}
