//! The blow-up ansatz `W = u₀ + εv₀ - PU_{δ,0}`, the energy functional on radial profiles,
//! the L^{3/2} defect of W, and the reduced-energy and I-term measurements.

use rayon::prelude::*;
use serde::Serialize;

use crate::bubble_kernel::{
    alpha6, bubble_integrals, bubble_jet, omega6, BubbleParams, CentralProjection, DomainBall, ORIGIN,
};
use crate::critical_data::{upsilon, ReducedEnergyConstants};
use crate::error::{Error, Result};
use crate::mesh;
use crate::numerics::{adaptive_half_line, PanelIntegrator};
use crate::profile::{RadialFunction, RadialProfile};
use crate::radial_bvp::{breakpoints_with_zeros, GroundState};
use crate::settings::Settings;

/// `u₀ + ε v₀`.
#[derive(Debug, Clone, Copy)]
pub struct Background<'a> {
    pub u0: &'a RadialProfile,
    pub v0: &'a RadialProfile,
    pub eps: f64,
}

impl RadialFunction for Background<'_> {
    fn radius(&self) -> f64 {
        self.u0.radius
    }
    fn value(&self, r: f64) -> f64 {
        self.u0.value(r) + self.eps * self.v0.value(r)
    }
    fn d1(&self, r: f64) -> f64 {
        self.u0.d1(r) + self.eps * self.v0.d1(r)
    }
    fn d2(&self, r: f64) -> f64 {
        self.u0.d2(r) + self.eps * self.v0.d2(r)
    }
    fn jet(&self, r: f64) -> [f64; 3] {
        let a = self.u0.jet(r);
        let b = self.v0.jet(r);
        [a[0] + self.eps * b[0], a[1] + self.eps * b[1], a[2] + self.eps * b[2]]
    }
}

/// Analytic ansatz: interpolated background minus the exact central projection.
#[derive(Debug, Clone, Copy)]
pub struct Ansatz<'a> {
    pub background: Background<'a>,
    pub projection: CentralProjection,
}

impl<'a> Ansatz<'a> {
    pub fn new(u0: &'a RadialProfile, v0: &'a RadialProfile, eps: f64, delta: f64) -> Self {
        Self {
            background: Background { u0, v0, eps },
            projection: CentralProjection {
                delta,
                radius: u0.radius,
            },
        }
    }
}

impl RadialFunction for Ansatz<'_> {
    fn radius(&self) -> f64 {
        self.projection.radius
    }
    fn value(&self, r: f64) -> f64 {
        self.background.value(r) - self.projection.value(r)
    }
    fn d1(&self, r: f64) -> f64 {
        self.background.d1(r) - self.projection.d1(r)
    }
    fn d2(&self, r: f64) -> f64 {
        self.background.d2(r) - self.projection.d2(r)
    }
    fn jet(&self, r: f64) -> [f64; 3] {
        let a = self.background.jet(r);
        let b = self.projection.jet(r);
        [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
    }
}

#[derive(Debug, Clone)]
pub struct AnsatzBundle {
    pub eps: f64,
    pub params: BubbleParams,
    pub w: RadialProfile,
    pub lambda: f64,
}

impl AnsatzBundle {
    pub fn delta(&self) -> f64 {
        self.params.delta
    }

    pub fn ansatz<'a>(&self, gs: &'a GroundState, v0: &'a RadialProfile) -> Ansatz<'a> {
        Ansatz::new(&gs.profile, v0, self.eps, self.params.delta)
    }
}

/// W at `(ε, d)`, `δ = |ε| d`, centred at the origin, sampled on a mesh graded around δ.
pub fn assemble_ansatz(gs: &GroundState, v0: &RadialProfile, eps: f64, d: f64, settings: &Settings) -> Result<AnsatzBundle> {
    let radius = gs.profile.radius;
    let delta = eps.abs() * d;
    if delta >= radius / 2.0 {
        return Err(Error::ScaleTooLarge { delta, radius });
    }
    let params = BubbleParams::scaled(eps, d, ORIGIN, ORIGIN, settings.sigma)?;
    let nodes = mesh::graded(radius, settings.grid_n, Some(delta));
    let w = RadialProfile::sample(&Ansatz::new(&gs.profile, v0, eps, delta), &nodes)?;
    Ok(AnsatzBundle {
        eps,
        params,
        w,
        lambda: gs.lambda + eps,
    })
}

/// Energy densities near the bubble core are sums of terms up to `1/|ε|` times larger than
/// the result, so rounding sits well above the default floor.
fn quad(settings: &Settings) -> PanelIntegrator {
    PanelIntegrator::new(settings.quad_tol, 0.0).with_noise_floor(1e-10)
}

/// `J_λ(u) = ω₆ ∫₀^R [½u'² - (λ/2)u² - ⅓|u|³] r⁵ dr`.
pub fn energy(u: &RadialProfile, lambda: f64, quad_tol: f64) -> Result<f64> {
    let q = PanelIntegrator::new(quad_tol, 0.0);
    let v = q.integrate(
        |r| {
            let [x, dx, _] = u.jet(r);
            (0.5 * dx * dx - 0.5 * lambda * x * x - x.abs().powi(3) / 3.0) * r.powi(5)
        },
        &breakpoints_with_zeros(u),
    )?;
    Ok(omega6() * v)
}

/// `(1/6) ∫_{R^6} U³`, the energy of a free bubble.
pub fn bubble_energy() -> f64 {
    bubble_integrals().int_u3 / 6.0
}

/// `ω₆ ∫_R^∞ (½U'² - ⅓U³) r⁵ dr`: the free-bubble energy outside the ball.
fn exterior_bubble_energy(delta: f64, radius: f64) -> Result<f64> {
    let v = adaptive_half_line(
        |x| {
            let r = radius + x;
            let [u, du, _] = bubble_jet(delta, r);
            (0.5 * du * du - u.powi(3) / 3.0) * r.powi(5)
        },
        1e-12,
        1e-300,
    )?;
    Ok(omega6() * v)
}

fn split_points(b: &AnsatzBundle, gs: &GroundState, v0: &RadialProfile) -> Vec<f64> {
    let mut bp = b.w.nodes.clone();
    if let Some(rc) = crossover_radius(b, gs, v0) {
        bp.push(rc);
    }
    bp.sort_by(f64::total_cmp);
    bp.dedup();
    bp
}

/// `J_{λ₀+ε}(u₀ + εv₀)`.
pub fn background_energy(gs: &GroundState, v0: &RadialProfile, eps: f64, settings: &Settings) -> Result<f64> {
    let bg = Background {
        u0: &gs.profile,
        v0,
        eps,
    };
    let lambda = gs.lambda + eps;
    let v = quad(settings).integrate(
        |r| {
            let [x, dx, _] = bg.jet(r);
            (0.5 * dx * dx - 0.5 * lambda * x * x - x.abs().powi(3) / 3.0) * r.powi(5)
        },
        &gs.profile.nodes,
    )?;
    Ok(omega6() * v)
}

/// `c₀(ε) = J_{λ₀+ε}(u₀ + εv₀) + (1/6)∫U³`.
pub fn c0(gs: &GroundState, v0: &RadialProfile, eps: f64, settings: &Settings) -> Result<f64> {
    Ok(background_energy(gs, v0, eps, settings)? + bubble_energy())
}

/// `|A - PU|³ - |A|³ - U³` with `PU = U - shift`, factored so that no cube is formed only to
/// be cancelled: inside the core `U³` dominates, outside `|A|³` does.
fn cubic_excess(a: f64, pu: f64, u: f64, shift: f64) -> f64 {
    let w = a - pu;
    if a >= 0.0 && w <= 0.0 {
        -shift * (pu * pu + pu * u + u * u) - 3.0 * pu * pu * a + 3.0 * pu * a * a - 2.0 * a.powi(3)
    } else if (a >= 0.0) == (w >= 0.0) {
        -a.signum() * pu * (w * w + w * a + a * a) - u.powi(3)
    } else {
        w.abs().powi(3) - a.abs().powi(3) - u.powi(3)
    }
}

/// `J(W) - c₀(ε)`, integrated pointwise against the background and free-bubble energy
/// densities so that no O(1) quantities cancel after integration.
pub fn energy_gap(b: &AnsatzBundle, gs: &GroundState, v0: &RadialProfile, settings: &Settings) -> Result<f64> {
    let an = b.ansatz(gs, v0);
    let lambda = b.lambda;
    let delta = b.delta();
    let shift = an.projection.shift();
    let v = quad(settings).integrate(
        |r| {
            let [a, da, _] = an.background.jet(r);
            let [u, du, _] = bubble_jet(delta, r);
            let pu = u - shift;
            // ½(W'² - A'² - U'²) = -A'U' since PU' = U'
            let grad = -da * du;
            // W² - A² = -PU (2A - PU)
            let mass = 0.5 * lambda * pu * (2.0 * a - pu);
            let cubic = -cubic_excess(a, pu, u, shift) / 3.0;
            (grad + mass + cubic) * r.powi(5)
        },
        &split_points(b, gs, v0),
    )?;
    Ok(omega6() * v - exterior_bubble_energy(delta, gs.profile.radius)?)
}

/// Strong defect `ΔW + |W|W + λW` at `r`, with the Laplacians of `u₀`, `v₀` and `PU` replaced
/// through their own equations:
/// `|W|W - A² + U² - λPU + ε²(v₀² + v₀)` for `A = u₀ + εv₀`, `λ = λ₀ + ε`.
pub fn ansatz_defect(an: &Ansatz, lambda: f64, r: f64) -> f64 {
    let eps = an.background.eps;
    let v = an.background.v0.value(r);
    let a = an.background.u0.value(r) + eps * v;
    let shift = an.projection.shift();
    let u = bubble_jet(an.projection.delta, r)[0];
    let pu = u - shift;
    // |W|W - A² + U², expanded on each side of the sign change of W = A - PU
    let nonlinear = if pu >= a {
        shift * (2.0 * u - shift) + 2.0 * pu * a - 2.0 * a * a
    } else {
        -pu * (2.0 * a - pu) + u * u
    };
    nonlinear - lambda * pu + eps * eps * (v * v + v)
}

/// L^{3/2} norm of `W'' + 5W'/r + |W|W + λW` with `λ = λ₀ + ε`.
pub fn residual_l32(b: &AnsatzBundle, gs: &GroundState, v0: &RadialProfile, settings: &Settings) -> Result<f64> {
    let an = b.ansatz(gs, v0);
    let lambda = b.lambda;
    let q = PanelIntegrator::new(settings.quad_tol.max(1e-9), 0.0);
    let v = q.integrate(
        |r| ansatz_defect(&an, lambda, r).abs().powf(1.5) * r.powi(5),
        &split_points(b, gs, v0),
    )?;
    Ok((omega6() * v).powf(2.0 / 3.0))
}

/// First sign change of W away from the centre.
pub fn crossover_radius(b: &AnsatzBundle, gs: &GroundState, v0: &RadialProfile) -> Option<f64> {
    let an = b.ansatz(gs, v0);
    let nodes = &b.w.nodes;
    let i = (0..nodes.len() - 1).find(|&i| b.w.values[i] < 0.0 && b.w.values[i + 1] >= 0.0)?;
    let (mut lo, mut hi) = (nodes[i], nodes[i + 1]);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if an.value(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExpansionSample {
    pub eps: f64,
    pub d: f64,
    pub j_value: f64,
    pub c0: f64,
    pub upsilon_measured: f64,
    pub upsilon_predicted: f64,
    pub residual_l32: f64,
    pub residual_ratio: f64,
}

/// `ε² |ln|ε||^{2/3}`.
pub fn residual_scale(eps: f64) -> f64 {
    eps * eps * eps.abs().ln().abs().powf(2.0 / 3.0)
}

pub fn expansion_sample(
    gs: &GroundState,
    v0: &RadialProfile,
    c: &ReducedEnergyConstants,
    eps: f64,
    d: f64,
    settings: &Settings,
) -> Result<ExpansionSample> {
    let b = assemble_ansatz(gs, v0, eps, d, settings)?;
    let c0v = c0(gs, v0, eps, settings)?;
    let gap = energy_gap(&b, gs, v0, settings)?;
    let res = residual_l32(&b, gs, v0, settings)?;
    Ok(ExpansionSample {
        eps,
        d,
        j_value: c0v + gap,
        c0: c0v,
        upsilon_measured: gap / eps.abs().powi(3),
        upsilon_predicted: upsilon(d, &ORIGIN, eps.signum(), c),
        residual_l32: res,
        residual_ratio: res / residual_scale(eps),
    })
}

/// Measures `(J(W) - c₀)/|ε|³` over the `ε × d` grid; output sorted by `(ε, d)`.
pub fn expansion_check(
    gs: &GroundState,
    v0: &RadialProfile,
    c: &ReducedEnergyConstants,
    eps_list: &[f64],
    d_grid: &[f64],
    settings: &Settings,
) -> Result<Vec<ExpansionSample>> {
    let mut jobs: Vec<(f64, f64)> = eps_list
        .iter()
        .flat_map(|&e| d_grid.iter().map(move |&d| (e, d)))
        .collect();
    jobs.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.total_cmp(&y.1)));
    jobs.par_iter()
        .map(|&(e, d)| expansion_sample(gs, v0, c, e, d, settings))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ITerms {
    pub eps: f64,
    pub d: f64,
    pub delta: f64,
    /// `I₂ - (1/6)∫U³`.
    pub i2_excess: f64,
    pub i3: f64,
    pub i4: f64,
    pub i5: f64,
    pub i6: f64,
    pub i7: f64,
}

impl ITerms {
    pub fn i4_ratio(&self) -> f64 {
        self.i4 / (self.eps.powi(3) * self.d * self.d)
    }

    pub fn i5_ratio(&self) -> f64 {
        self.i5 / (self.eps.abs().powi(3) * self.d.powi(3))
    }
}

/// `(|A-B|³ - |A|³ - B³ + 3AB² + 3|A|AB)` for `B ≥ 0`, written without cancellation.
fn i5_density(a: f64, b: f64) -> f64 {
    if a <= 0.0 {
        0.0
    } else if a >= b {
        6.0 * a * b * b - 2.0 * b.powi(3)
    } else {
        6.0 * a * a * b - 2.0 * a.powi(3)
    }
}

/// Direct quadrature of each term of the energy decomposition of `J(A - PU)` with
/// `A = u₀ + εv₀`.
pub fn i_term_audit(gs: &GroundState, v0: &RadialProfile, eps: f64, d: f64, settings: &Settings) -> Result<ITerms> {
    let b = assemble_ansatz(gs, v0, eps, d, settings)?;
    let delta = b.delta();
    let an = b.ansatz(gs, v0);
    let shift = an.projection.shift();
    let lambda0 = gs.lambda;
    let bp = split_points(&b, gs, v0);
    let q = quad(settings);
    let w = omega6();
    let u0 = &gs.profile;
    let integrate = |f: &(dyn Fn(f64) -> f64 + Sync)| -> Result<f64> { Ok(w * q.integrate(|r| f(r) * r.powi(5), &bp)?) };

    // ½∫|∇PU|² - ⅓∫PU³ - (1/6)∫_{R^6}U³, pointwise against the free density
    let i2_excess = integrate(&|r| {
        let [u, _, _] = bubble_jet(delta, r);
        let pu = u - shift;
        // PU³ - U³ = -shift (PU² + PU U + U²)
        shift * (pu * pu + pu * u + u * u) / 3.0
    })? - exterior_bubble_energy(delta, u0.radius)?;
    let i3 = integrate(&|r| {
        let pu = bubble_jet(delta, r)[0] - shift;
        u0.value_offset(r, 0.5 * lambda0) * pu * pu
    })?;
    let i4 = eps
        * integrate(&|r| {
            let pu = bubble_jet(delta, r)[0] - shift;
            (v0.value(r) - 0.5) * pu * pu
        })?;
    let i5 = -integrate(&|r| {
        let pu = bubble_jet(delta, r)[0] - shift;
        i5_density(an.background.value(r), pu)
    })? / 3.0;
    let i6 = integrate(&|r| {
        let pu = bubble_jet(delta, r)[0] - shift;
        let (u, v) = (u0.value(r), v0.value(r));
        let a = u + eps * v;
        let f = if a > 0.0 && u > 0.0 {
            eps * eps * v * v
        } else {
            a.abs() * a - u.abs() * u - 2.0 * eps * u.abs() * v
        };
        f * pu
    })?;
    let i7 = eps * eps * integrate(&|r| v0.value(r) * (bubble_jet(delta, r)[0] - shift))?;
    Ok(ITerms {
        eps,
        d,
        delta,
        i2_excess,
        i3,
        i4,
        i5,
        i6,
        i7,
    })
}

/// `a1 (v₀(0) - ½)`: the limit of `I₄/(ε³d²)`.
pub fn i4_prediction(c: &ReducedEnergyConstants) -> f64 {
    c.a1 * (c.v0_at_center - 0.5)
}

/// `-(11/9) ω₆ α₆^{3/2} u₀(0)^{3/2}`: the stated limit of `I₅/(|ε|³d³)`.
pub fn i5_prediction(c: &ReducedEnergyConstants) -> f64 {
    -11.0 / 9.0 * omega6() * alpha6().powf(1.5) * c.u0_max.powf(1.5)
}

/// Ball of radius R used by every quantitative check.
pub fn domain_of(gs: &GroundState) -> DomainBall {
    DomainBall {
        radius: gs.profile.radius,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn i5_density_matches_raw_formula() {
        for &(a, b) in &[(2.0f64, 0.5f64), (0.3, 4.0), (-1.0, 2.0), (1.0, 1.0)] {
            let raw = (a - b).abs().powi(3) - a.abs().powi(3) - b.powi(3) + 3.0 * a * b * b + 3.0 * a.abs() * a * b;
            assert!((i5_density(a, b) - raw).abs() < 1e-12 * (1.0 + raw.abs()), "a={a} b={b}");
        }
    }

    #[test]
    fn energy_of_zero_is_zero() {
        let nodes: Vec<f64> = (0..=16).map(|k| k as f64 / 16.0).collect();
        let z = RadialProfile::new(nodes.clone(), vec![0.0; 17], vec![0.0; 17], vec![0.0; 17]).unwrap();
        assert_eq!(energy(&z, 3.0, 1e-10).unwrap(), 0.0);
    }

    #[test]
    fn residual_scale_shape() {
        assert!((residual_scale(-0.01) - 1e-4 * (100f64.ln()).powf(2.0 / 3.0)).abs() < 1e-18);
    }
}
