mod common;

use bn6::bubble_kernel::{
    bubble_integrals, eval_bubble, eval_kernel, projected_kernel_expansion, regular_part_ball, CentralProjection,
};
use bn6::{alpha6, omega6, BubbleParams, DomainBall, KernelIndex, Point6, RadialFunction};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};

use common::simpson;

fn e1(t: f64) -> Point6 {
    [t, 0.0, 0.0, 0.0, 0.0, 0.0]
}

#[test]
fn monte_carlo_ball_volume_matches_sphere_area() {
    // |B⁶| = |S⁵| / 6
    let mut rng = rand::rngs::StdRng::seed_from_u64(6);
    let n = 400_000;
    let hits = (0..n)
        .filter(|_| (0..6).map(|_| rng.gen_range(-1.0f64..1.0).powi(2)).sum::<f64>() <= 1.0)
        .count();
    let p = hits as f64 / n as f64;
    let vol = 64.0 * p;
    let sigma = 64.0 * (p * (1.0 - p) / n as f64).sqrt();
    assert!((vol - omega6() / 6.0).abs() < 4.0 * sigma, "vol {vol} vs {}", omega6() / 6.0);
}

#[test]
fn bubble_integrals_against_simpson() {
    // r = tan θ maps (0, ∞) to (0, π/2); the integrands vanish at both ends
    let w = |k: i32| {
        simpson(
            |t: f64| {
                if t >= std::f64::consts::FRAC_PI_2 {
                    return 0.0;
                }
                let r = t.tan();
                r.powi(5) * (1.0 + r * r).powi(-k) / t.cos().powi(2)
            },
            0.0,
            std::f64::consts::FRAC_PI_2,
            4000,
        )
    };
    let ints = bubble_integrals();
    let u3 = omega6() * alpha6().powi(3) * w(6);
    assert!((ints.int_u3 / u3 - 1.0).abs() < 1e-10);
    assert!((ints.int_w4 / (omega6() * w(4)) - 1.0).abs() < 1e-10);
}

#[test]
fn regular_part_matches_singular_part_on_the_boundary() {
    let dom = DomainBall::new(1.5).unwrap();
    let x = [1.5 * 0.6, 1.5 * 0.8, 0.0, 0.0, 0.0, 0.0];
    let y = [0.1, -0.2, 0.3, 0.0, 0.05, 0.0];
    let d2: f64 = x.iter().zip(&y).map(|(a, b)| (a - b) * (a - b)).sum();
    let h = regular_part_ball(&x, &y, &dom).unwrap();
    assert!((h * d2 * d2 - 1.0).abs() < 1e-13);
}

#[test]
fn central_projection_vanishes_on_the_boundary() {
    for r_ball in [0.5, 1.0, 2.0] {
        let dom = DomainBall::new(r_ball).unwrap();
        let p = BubbleParams::central(0.03).unwrap();
        let pu = CentralProjection::new(&p, &dom).unwrap();
        assert!(pu.value(r_ball).abs() < 1e-12 * pu.value(0.0));
        assert!((pu.value(0.3) - eval_bubble(&p, &e1(0.3)) + pu.shift()).abs() < 1e-12);
    }
}

fn point(v: Vec<f64>, scale: f64) -> Point6 {
    let mut p = [0.0; 6];
    for (a, b) in p.iter_mut().zip(v) {
        *a = b * scale;
    }
    p
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn bubble_solves_critical_equation(delta in 0.05f64..2.0, r in 0.05f64..3.0) {
        // -ΔU = U² by radial central differences
        let p = BubbleParams::central(delta).unwrap();
        let u = |s: f64| eval_bubble(&p, &e1(s));
        let h = 1e-3 * r.min(delta);
        let lap = (u(r + h) - 2.0 * u(r) + u(r - h)) / (h * h) + 5.0 / r * (u(r + h) - u(r - h)) / (2.0 * h);
        let scale = u(r).powi(2) + u(r) / (r * r);
        prop_assert!((lap + u(r).powi(2)).abs() < 1e-5 * scale, "lap {lap} U² {}", u(r).powi(2));
    }

    #[test]
    fn kernels_are_parameter_derivatives(
        delta in 0.05f64..1.0,
        xi in prop::collection::vec(-0.3f64..0.3, 6),
        x in prop::collection::vec(-1.0f64..1.0, 6),
        j in 0usize..=6,
    ) {
        let xi = point(xi, 1.0);
        let x = point(x, 1.0);
        let p = BubbleParams::new(delta, xi).unwrap();
        let h = 1e-5;
        let shifted = |s: f64| {
            if j == 0 {
                BubbleParams::new(delta + s, xi).unwrap()
            } else {
                let mut c = xi;
                c[j - 1] += s;
                BubbleParams::new(delta, c).unwrap()
            }
        };
        let fd = (eval_bubble(&shifted(h), &x) - eval_bubble(&shifted(-h), &x)) / (2.0 * h);
        let z = eval_kernel(&p, KernelIndex::new(j).unwrap(), &x);
        let scale = eval_bubble(&p, &x) / delta.min(1.0).powi(2);
        prop_assert!((fd - z).abs() < 1e-6 * scale, "fd {fd} z {z}");
    }

    #[test]
    fn regular_part_is_symmetric_and_harmonic(
        x in prop::collection::vec(-0.35f64..0.35, 6),
        y in prop::collection::vec(-0.35f64..0.35, 6),
    ) {
        let dom = DomainBall::unit();
        let (x, y) = (point(x, 1.0), point(y, 1.0));
        let h0 = regular_part_ball(&x, &y, &dom).unwrap();
        let h1 = regular_part_ball(&y, &x, &dom).unwrap();
        prop_assert!((h0 - h1).abs() < 1e-13 * h0);
        let step = 1e-3;
        let mut lap = 0.0;
        for k in 0..6 {
            let (mut xp, mut xm) = (x, x);
            xp[k] += step;
            xm[k] -= step;
            lap += regular_part_ball(&xp, &y, &dom).unwrap() - 2.0 * h0 + regular_part_ball(&xm, &y, &dom).unwrap();
        }
        lap /= step * step;
        prop_assert!(lap.abs() < 1e-4 * h0, "ΔH = {lap}, H = {h0}");
    }

    #[test]
    fn projected_dilation_kernel_vanishes_on_the_boundary_to_leading_order(delta in 1e-3f64..2e-2, theta in 0.0f64..std::f64::consts::PI) {
        // PZ⁰ - (Z⁰ - 2αδH) = O(δ³) and Z⁰ - 2αδH vanishes on ∂B up to O(δ³)
        let dom = DomainBall::unit();
        let p = BubbleParams::central(delta).unwrap();
        let x = [theta.cos(), theta.sin(), 0.0, 0.0, 0.0, 0.0];
        let v = projected_kernel_expansion(&p, KernelIndex::new(0).unwrap(), &x, &dom).unwrap();
        prop_assert!(v.abs() < 100.0 * alpha6() * delta.powi(3), "{v}");
    }
}
