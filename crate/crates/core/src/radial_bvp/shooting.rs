//! Initial-value integration of the radial equations from a regular centre.

use crate::bubble_kernel::alpha6;
use crate::error::Result;
use crate::numerics::{Dopri5, Trajectory};

/// Nonlinearity `g(u) = |u| u + λ u` and its derivative.
#[inline]
pub(crate) fn g(u: f64, lambda: f64) -> f64 {
    u.abs() * u + lambda * u
}

#[inline]
pub(crate) fn g_prime(u: f64, lambda: f64) -> f64 {
    2.0 * u.abs() + lambda
}

/// Starting radius where the truncated Taylor seeds are accurate to rounding.
pub(crate) fn start_radius(radius: f64, scales: &[f64]) -> f64 {
    let k = scales.iter().fold(1.0 / (radius * radius), |m, s| m.max(s.abs()));
    1e-4 / k.sqrt()
}

/// `u(r) ≈ s - g r²/12 + g g' r⁴/384` with `u'` to match.
pub(crate) fn seed_u(s: f64, lambda: f64, r: f64) -> [f64; 2] {
    let gs = g(s, lambda);
    let gp = g_prime(s, lambda);
    let a = -gs / 12.0;
    let b = gs * gp / 384.0;
    let r2 = r * r;
    [s + a * r2 + b * r2 * r2, 2.0 * a * r + 4.0 * b * r2 * r]
}

pub(crate) fn rhs_u(lambda: f64) -> impl Fn(f64, &[f64; 2]) -> [f64; 2] {
    move |r, y| [y[1], -5.0 * y[1] / r - g(y[0], lambda)]
}

/// Integrates the nonlinear radial equation with `u(0) = s` through `outputs`
/// (strictly positive radii, ascending). Returns the state at each output.
pub(crate) fn integrate_u(
    s: f64,
    lambda: f64,
    outputs: &[f64],
    ode: &Dopri5,
) -> Result<(f64, Vec<[f64; 2]>, usize)> {
    let radius = *outputs.last().expect("outputs");
    let r0 = start_radius(radius, &[g_prime(s, lambda)]);
    let split = outputs.partition_point(|&r| r <= r0);
    let mut states: Vec<[f64; 2]> = outputs[..split].iter().map(|&r| seed_u(s, lambda, r)).collect();
    let tr: Trajectory<2> = ode.integrate(rhs_u(lambda), r0, seed_u(s, lambda, r0), &outputs[split..])?;
    states.extend(tr.states);
    Ok((r0, states, tr.sign_changes))
}

/// `u(R; s)` and the number of sign changes on (0, R].
pub(crate) fn endpoint(s: f64, lambda: f64, radius: f64, ode: &Dopri5) -> Result<(f64, usize)> {
    let (_, st, changes) = integrate_u(s, lambda, &[radius], ode)?;
    Ok((st[0][0], changes))
}

/// Bubble `U(r) = A (1 + r²/δ²)⁻²` with `A = α₆/δ²`, and `U'`.
#[inline]
pub(crate) fn bubble(a: f64, r: f64) -> [f64; 2] {
    let inv_d2 = a / alpha6();
    let q = 1.0 / (1.0 + r * r * inv_d2);
    [a * q * q, -4.0 * a * r * inv_d2 * q * q * q]
}

/// Source of `w'' + 5w'/r = -F` for `u = w - U`: `F = |u|u + U² + λu` with the bubble
/// balance taken out analytically.
#[inline]
fn nodal_source(w: f64, big_u: f64, lambda: f64) -> f64 {
    if w <= big_u {
        big_u * (2.0 * w - lambda) + w * (lambda - w)
    } else {
        let u = w - big_u;
        u * u + big_u * big_u + lambda * u
    }
}

/// `w ≈ λA r²/12 - λA(3A + λ) r⁴/384` near the centre, with `w(0) = 0`.
fn seed_w(a: f64, lambda: f64, r: f64) -> [f64; 2] {
    let c2 = lambda * a / 12.0;
    let c4 = -lambda * a * (3.0 * a + lambda) / 384.0;
    let r2 = r * r;
    [c2 * r2 + c4 * r2 * r2, 2.0 * c2 * r + 4.0 * c4 * r2 * r]
}

/// Solution with `u(0) = -A` written as `u = w - U` with the exact bubble `U(0) = A`, so
/// that the integrated part stays of order one inside the core. Returns `(u, u')` at each
/// output and the sign changes of `u`.
pub(crate) fn integrate_nodal(a: f64, lambda: f64, outputs: &[f64], ode: &Dopri5) -> Result<(Vec<[f64; 2]>, usize)> {
    let radius = *outputs.last().expect("outputs");
    let r0 = start_radius(radius, &[2.0 * a + lambda]);
    let split = outputs.partition_point(|&r| r <= r0);
    let to_u = |r: f64, w: [f64; 2]| {
        let b = bubble(a, r);
        [w[0] - b[0], w[1] - b[1]]
    };
    let mut states: Vec<[f64; 2]> = outputs[..split].iter().map(|&r| to_u(r, seed_w(a, lambda, r))).collect();
    let tr: Trajectory<2> = ode.integrate_observed(
        move |r, y: &[f64; 2]| [y[1], -5.0 * y[1] / r - nodal_source(y[0], bubble(a, r)[0], lambda)],
        |r, y| y[0] - bubble(a, r)[0],
        r0,
        seed_w(a, lambda, r0),
        &outputs[split..],
    )?;
    states.extend(outputs[split..].iter().zip(&tr.states).map(|(&r, w)| to_u(r, *w)));
    Ok((states, tr.sign_changes))
}

/// `u(R)` and sign changes for the centre value `u(0) = -A`.
pub(crate) fn nodal_endpoint(a: f64, lambda: f64, radius: f64, ode: &Dopri5) -> Result<(f64, usize)> {
    let (st, changes) = integrate_nodal(a, lambda, &[radius], ode)?;
    Ok((st[0][0], changes))
}

/// Sector equation for `φ = r^{-ℓ} ψ` coupled to the ground-state equation:
/// state `(φ, φ', u, u')`, `φ'' + ((5 + 2ℓ)/r) φ' + (2|u| + λ + μ) φ = 0`.
pub(crate) fn sector_rhs(lambda: f64, ell: usize, mu: f64) -> impl Fn(f64, &[f64; 4]) -> [f64; 4] {
    let k = 5.0 + 2.0 * ell as f64;
    move |r, y| {
        let v = g_prime(y[2], lambda);
        [y[1], -k * y[1] / r - (v + mu) * y[0], y[3], -5.0 * y[3] / r - g(y[2], lambda)]
    }
}

pub(crate) fn sector_seed(s: f64, lambda: f64, ell: usize, mu: f64, r: f64) -> [f64; 4] {
    let k1 = 6.0 + 2.0 * ell as f64;
    let q0 = g_prime(s, lambda) + mu;
    // r² coefficient of 2|u| along the seed
    let q2 = if s != 0.0 { -2.0 * s.signum() * g(s, lambda) / 12.0 } else { 0.0 };
    let a = -q0 / (2.0 * k1);
    let b = -(q2 + q0 * a) / (4.0 * (k1 + 2.0));
    let r2 = r * r;
    let u = seed_u(s, lambda, r);
    [1.0 + a * r2 + b * r2 * r2, 2.0 * a * r + 4.0 * b * r2 * r, u[0], u[1]]
}

/// `φ(R; μ)` and the sign changes of φ on (0, R].
pub(crate) fn sector_endpoint(
    s: f64,
    lambda: f64,
    ell: usize,
    mu: f64,
    radius: f64,
    ode: &Dopri5,
) -> Result<(f64, usize)> {
    let r0 = start_radius(radius, &[g_prime(s, lambda), mu]);
    let tr = ode.integrate(
        sector_rhs(lambda, ell, mu),
        r0,
        sector_seed(s, lambda, ell, mu, r0),
        &[radius],
    )?;
    Ok((tr.states[0][0], tr.sign_changes))
}

/// Linearized problem `v'' + 5v'/r + (2|u| + λ) v = -F(r, u)`: particular solution with
/// `v(0) = 0` and homogeneous solution with `v(0) = 1`, both carried alongside u.
/// State: `(v_p, v_p', v_h, v_h', u, u')`.
pub(crate) fn integrate_linear<F>(
    s: f64,
    lambda: f64,
    forcing: &F,
    outputs: &[f64],
    ode: &Dopri5,
) -> Result<Vec<[f64; 6]>>
where
    F: Fn(f64, f64) -> f64,
{
    let radius = *outputs.last().expect("outputs");
    let v0 = g_prime(s, lambda);
    let r0 = start_radius(radius, &[v0]);
    let f0 = forcing(0.0, s);
    let seed = |r: f64| -> [f64; 6] {
        let u = seed_u(s, lambda, r);
        let ap = -f0 / 12.0;
        let ah = -v0 / 12.0;
        [ap * r * r, 2.0 * ap * r, 1.0 + ah * r * r, 2.0 * ah * r, u[0], u[1]]
    };
    let rhs = |r: f64, y: &[f64; 6]| -> [f64; 6] {
        let v = g_prime(y[4], lambda);
        [
            y[1],
            -5.0 * y[1] / r - v * y[0] - forcing(r, y[4]),
            y[3],
            -5.0 * y[3] / r - v * y[2],
            y[5],
            -5.0 * y[5] / r - g(y[4], lambda),
        ]
    };
    let split = outputs.partition_point(|&r| r <= r0);
    let mut states: Vec<[f64; 6]> = outputs[..split].iter().map(|&r| seed(r)).collect();
    let tr = ode.integrate(rhs, r0, seed(r0), &outputs[split..])?;
    states.extend(tr.states);
    Ok(states)
}
