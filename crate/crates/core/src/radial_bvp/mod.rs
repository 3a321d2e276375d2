//! Radial reductions on the ball: the positive ground state, the linearized problem for
//! v₀, sector spectra of the linearization and sign-changing solutions.

mod collocation;
pub(crate) mod shooting;
mod spectrum;

use serde::Serialize;

use crate::bubble_kernel::{omega6, DomainBall};
use crate::error::{Error, Result};
use crate::mesh;
use crate::numerics::special::bessel_j_zero;
use crate::numerics::{brent, Dopri5, PanelIntegrator};
use crate::profile::{RadialFunction, RadialProfile};
use crate::settings::Settings;

pub use collocation::CollocationSolution;

use shooting::{endpoint, g, g_prime, integrate_linear, integrate_u};

/// Negative-eigenvalue count and lowest radial eigenvalues of the linearization.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MorseSummary {
    pub index: usize,
    pub lowest: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct GroundState {
    pub profile: RadialProfile,
    pub lambda: f64,
    pub max_value: f64,
    pub morse_data: MorseSummary,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LinearizedSpectrum {
    pub sector: usize,
    pub eigenvalues: Vec<f64>,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NondegeneracyReport {
    /// `(ℓ, min_k |μ_k(ℓ)|)` for every checked sector.
    pub per_sector: Vec<(usize, f64)>,
    pub margin: f64,
    pub nondegenerate: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PohozaevAudit {
    /// `λ ∫ u²`.
    pub bulk: f64,
    /// `(ω₆/2) R⁶ u'(R)²`.
    pub boundary: f64,
    pub relative_gap: f64,
}

fn shooting_ode() -> Dopri5 {
    Dopri5::with_tolerances(1e-13, 1e-30)
}

/// First Dirichlet eigenvalue of the ball, `(j_{2,1}/R)²`.
pub fn first_eigenvalue(dom: &DomainBall) -> f64 {
    let j = bessel_j_zero(2, 1);
    (j / dom.radius).powi(2)
}

/// Locates `u(0)` of the positive solution: geometric sweep in s for the first sign change
/// of `u(R; s)`, then Brent.
pub(crate) fn positive_shooting_parameter(lambda: f64, dom: &DomainBall) -> Result<f64> {
    let lambda1 = first_eigenvalue(dom);
    if !(lambda > 0.0 && lambda < lambda1) {
        return Err(Error::NoSolutionInRange { lambda, lambda1 });
    }
    let ode = shooting_ode();
    let radius = dom.radius;
    let scale = 1.0 / (radius * radius);
    let mut s_prev = 1e-3 * scale;
    let (f_prev, _) = endpoint(s_prev, lambda, radius, &ode)?;
    if !(f_prev > 0.0) {
        return Err(Error::BracketFailure {
            lambda,
            diagnostics: format!("u(R; {s_prev:e}) = {f_prev:e} is not positive at the sweep start"),
        });
    }
    let mut s = s_prev;
    while s < 1e8 * scale {
        s *= 1.5;
        let (f, _) = endpoint(s, lambda, radius, &ode)?;
        if f <= 0.0 {
            let root = brent(
                |t| endpoint(t, lambda, radius, &ode).map(|e| e.0).unwrap_or(f64::NAN),
                s_prev,
                s,
                1e-15 * s,
                300,
            )?;
            return Ok(root);
        }
        s_prev = s;
    }
    Err(Error::BracketFailure {
        lambda,
        diagnostics: format!("u(R; s) stayed positive for s up to {s:e}"),
    })
}

/// `u(R)` and the number of sign changes on `(0, R]` for the solution with `u(0) = s`, `u'(0) = 0`.
pub fn shoot(s: f64, lambda: f64, dom: &DomainBall) -> Result<(f64, usize)> {
    endpoint(s, lambda, dom.radius, &shooting_ode())
}

/// `u(0) = -A` of a radial solution with exactly one interior node, negative at the centre.
/// Sweeps `ln A` over `[a_guess / span, a_guess * span]` and refines the bracketed root
/// nearest the guess.
pub fn nodal_shooting_parameter(lambda: f64, dom: &DomainBall, a_guess: f64, span: f64) -> Result<f64> {
    if !(a_guess > 0.0 && span > 1.0) {
        return Err(Error::InvalidParameter(format!("a_guess = {a_guess}, span = {span}")));
    }
    let ode = shooting_ode();
    let radius = dom.radius;
    let at = |t: f64| shooting::nodal_endpoint(t.exp(), lambda, radius, &ode);
    let (lo, hi) = ((a_guess / span).ln(), (a_guess * span).ln());
    let steps = ((hi - lo) * 10.0).ceil() as usize;
    let mut prev = (lo, at(lo)?);
    let mut best: Option<(f64, f64, f64)> = None;
    for k in 1..=steps {
        let t = lo + (hi - lo) * k as f64 / steps as f64;
        let cur = (t, at(t)?);
        let ((ta, (fa, ca)), (tb, (fb, cb))) = (prev, cur);
        if fa.signum() != fb.signum() && ca.min(cb) == 1 && ca.max(cb) == 2 {
            let dist = (0.5 * (ta + tb) - a_guess.ln()).abs();
            if best.map_or(true, |b| dist < b.2) {
                best = Some((ta, tb, dist));
            }
        }
        prev = cur;
    }
    let (ta, tb, _) = best.ok_or_else(|| Error::BracketFailure {
        lambda,
        diagnostics: format!(
            "no one-node solution with u(0) in [-{:e}, -{:e}]",
            a_guess * span,
            a_guess / span
        ),
    })?;
    let t = brent(|t| at(t).map(|e| e.0).unwrap_or(f64::NAN), ta, tb, 1e-15, 300)?;
    Ok(-t.exp())
}

/// One-node shooting solution with `u(0) = s < 0` sampled on `nodes`.
pub fn sample_nodal(s: f64, lambda: f64, nodes: &[f64]) -> Result<RadialProfile> {
    if !(s < 0.0) {
        return Err(Error::InvalidParameter(format!("centre value {s} is not negative")));
    }
    let (states, _) = shooting::integrate_nodal(-s, lambda, &nodes[1..], &shooting_ode())?;
    let mut values = vec![s];
    let mut derivs = vec![0.0];
    let mut second = vec![-g(s, lambda) / 6.0];
    for (r, st) in nodes[1..].iter().zip(&states) {
        values.push(st[0]);
        derivs.push(st[1]);
        second.push(nonlinear_second(*r, st[0], st[1], lambda));
    }
    RadialProfile::new(nodes.to_vec(), values, derivs, second)
}

fn sample_u(s: f64, lambda: f64, nodes: &[f64]) -> Result<RadialProfile> {
    let (_, states, _) = integrate_u(s, lambda, &nodes[1..], &shooting_ode())?;
    let mut values = vec![s];
    let mut derivs = vec![0.0];
    let mut second = vec![-g(s, lambda) / 6.0];
    for (r, st) in nodes[1..].iter().zip(&states) {
        values.push(st[0]);
        derivs.push(st[1]);
        second.push(nonlinear_second(*r, st[0], st[1], lambda));
    }
    RadialProfile::new(nodes.to_vec(), values, derivs, second)
}

/// Positive radial solution for `0 < λ < λ₁` (the least-energy branch: smallest bracketed
/// `u(0)`), sampled on the default graded mesh.
pub fn solve_positive(lambda: f64, dom: &DomainBall, settings: &Settings) -> Result<GroundState> {
    let s = positive_shooting_parameter(lambda, dom)?;
    let nodes = mesh::graded(dom.radius, settings.grid_n, None);
    let profile = sample_u(s, lambda, &nodes)?;
    let tail = profile.values[profile.len() - 1].abs();
    if tail > settings.tol_bc * s.max(1.0) {
        return Err(Error::BracketFailure {
            lambda,
            diagnostics: format!("shooting residual |u(R)| = {tail:e} above tolerance"),
        });
    }
    if profile.node_count() != 0 || profile.values[..profile.len() - 1].iter().any(|&v| v <= 0.0) {
        return Err(Error::NodeCountMismatch {
            expected: "0 (positive solution)".into(),
            found: profile.node_count(),
        });
    }
    let lowest = spectrum::sector_spectrum(s, lambda, dom.radius, 0, 3)?;
    let index = lowest.iter().filter(|&&m| m < 0.0).count();
    Ok(GroundState {
        profile,
        lambda,
        max_value: s,
        morse_data: MorseSummary { index, lowest },
    })
}

/// Same solution recomputed by collocation on a mesh of `grid_n` intervals, started from
/// the shooting solution.
pub fn solve_positive_collocated(gs: &GroundState, grid_n: usize, settings: &Settings) -> Result<CollocationSolution> {
    let nodes = mesh::graded(gs.profile.radius, grid_n, None);
    let init = RadialProfile::sample(&gs.profile, &nodes)?;
    collocation::collocate(gs.lambda, &init, settings.newton_tol, 50)
}

/// Solves `v'' + 5v'/r + (2|u₀| + λ) v = -F(r, u₀(r))`, `v'(0) = 0`, `v(R) = 0`.
pub fn solve_linearized<F>(gs: &GroundState, dom: &DomainBall, settings: &Settings, forcing: F) -> Result<RadialProfile>
where
    F: Fn(f64, f64) -> f64,
{
    let spec = spectrum::sector_spectrum(gs.max_value, gs.lambda, dom.radius, 0, 1)?;
    let closest = spec[0].abs();
    if closest <= settings.tol_eig {
        return Err(Error::DegenerateLinearization {
            ell: 0,
            mu: spec[0],
            tol: settings.tol_eig,
        });
    }
    // also check the second radial eigenvalue when the first is negative
    if spec[0] < 0.0 {
        let two = spectrum::sector_spectrum(gs.max_value, gs.lambda, dom.radius, 0, 2)?;
        if two[1].abs() <= settings.tol_eig {
            return Err(Error::DegenerateLinearization {
                ell: 0,
                mu: two[1],
                tol: settings.tol_eig,
            });
        }
    }
    let nodes = &gs.profile.nodes;
    let states = integrate_linear(gs.max_value, gs.lambda, &forcing, &nodes[1..], &shooting_ode())?;
    let end = states.last().expect("states");
    let c = -end[0] / end[2];
    let f0 = forcing(0.0, gs.max_value);
    let mut values = vec![c];
    let mut derivs = vec![0.0];
    let mut second = vec![-(g_prime(gs.max_value, gs.lambda) * c + f0) / 6.0];
    for ((r, st), &u) in nodes[1..].iter().zip(&states).zip(&gs.profile.values[1..]) {
        let v = st[0] + c * st[2];
        let dv = st[1] + c * st[3];
        values.push(v);
        derivs.push(dv);
        second.push(linear_second(*r, v, dv, u, gs.lambda, forcing(*r, u)));
    }
    let n = values.len();
    values[n - 1] = end[0] + c * end[2];
    RadialProfile::new(nodes.clone(), values, derivs, second)
}

/// `v''` from the linearized equation at a positive radius.
pub(crate) fn linear_second(r: f64, v: f64, dv: f64, u: f64, lambda: f64, forcing: f64) -> f64 {
    -5.0 * dv / r - g_prime(u, lambda) * v - forcing
}

/// `u''` from the nonlinear equation at a positive radius.
pub(crate) fn nonlinear_second(r: f64, u: f64, du: f64, lambda: f64) -> f64 {
    -5.0 * du / r - g(u, lambda)
}

/// Rebuilds a ground state from stored samples, restoring second derivatives from the
/// equation rather than from finite differences.
pub fn ground_state_from_samples(nodes: Vec<f64>, values: Vec<f64>, derivs: Vec<f64>, lambda: f64) -> Result<GroundState> {
    let s = values[0];
    let mut second = vec![-g(s, lambda) / 6.0];
    for i in 1..nodes.len() {
        second.push(nonlinear_second(nodes[i], values[i], derivs[i], lambda));
    }
    let profile = RadialProfile::new(nodes, values, derivs, second)?;
    let lowest = spectrum::sector_spectrum(s, lambda, profile.radius, 0, 3)?;
    let index = lowest.iter().filter(|&&m| m < 0.0).count();
    Ok(GroundState {
        profile,
        lambda,
        max_value: s,
        morse_data: MorseSummary { index, lowest },
    })
}

/// Rebuilds v₀ from stored samples given its ground state.
pub fn v0_from_samples(gs: &GroundState, values: Vec<f64>, derivs: Vec<f64>) -> Result<RadialProfile> {
    let nodes = gs.profile.nodes.clone();
    if values.len() != nodes.len() {
        return Err(Error::parse("v0 profile", "grid differs from the ground state"));
    }
    let s = gs.max_value;
    let mut second = vec![-(g_prime(s, gs.lambda) * values[0] + s) / 6.0];
    for i in 1..nodes.len() {
        let u = gs.profile.values[i];
        second.push(linear_second(nodes[i], values[i], derivs[i], u, gs.lambda, u));
    }
    RadialProfile::new(nodes, values, derivs, second)
}

/// `v₀`: the linearized problem forced by u₀ itself.
pub fn solve_v0(gs: &GroundState, dom: &DomainBall, settings: &Settings) -> Result<RadialProfile> {
    solve_linearized(gs, dom, settings, |_, u| u)
}

/// Lowest `count` eigenvalues of the sector-ℓ linearization around the ground state.
pub fn sector_eigenvalues(gs: &GroundState, ell: usize, count: usize) -> Result<LinearizedSpectrum> {
    if count == 0 {
        return Err(Error::InvalidParameter("count must be at least 1".into()));
    }
    let intervals = gs.profile.intervals();
    if 16 * count > intervals {
        return Err(Error::ResolutionError {
            intervals,
            requested: count,
        });
    }
    let eigenvalues = spectrum::sector_spectrum(gs.max_value, gs.lambda, gs.profile.radius, ell, count)?;
    Ok(LinearizedSpectrum {
        sector: ell,
        eigenvalues,
        count,
    })
}

/// Sector eigenvalues of the free Dirichlet Laplacian on the ball.
pub fn free_sector_eigenvalues(dom: &DomainBall, ell: usize, count: usize) -> Result<LinearizedSpectrum> {
    let eigenvalues = spectrum::sector_spectrum(0.0, 0.0, dom.radius, ell, count)?;
    Ok(LinearizedSpectrum {
        sector: ell,
        eigenvalues,
        count,
    })
}

/// Checks sectors `0..=ell_max` for eigenvalues within `tol_eig` of zero.
pub fn nondegeneracy(gs: &GroundState, settings: &Settings) -> Result<NondegeneracyReport> {
    use rayon::prelude::*;
    let per_sector: Vec<(usize, f64)> = (0..=settings.ell_max)
        .into_par_iter()
        .map(|ell| {
            let spec = sector_eigenvalues(gs, ell, 3)?;
            Ok((ell, spec.eigenvalues.iter().fold(f64::INFINITY, |m, v| m.min(v.abs()))))
        })
        .collect::<Result<_>>()?;
    let margin = per_sector.iter().fold(f64::INFINITY, |m, s| m.min(s.1));
    Ok(NondegeneracyReport {
        per_sector,
        margin,
        nondegenerate: margin > settings.tol_eig,
    })
}

/// Sign-changing solution at λ by collocation from `init`; rejects results without an
/// interior sign change.
pub fn solve_sign_changing(
    lambda: f64,
    init: &RadialProfile,
    dom: &DomainBall,
    settings: &Settings,
) -> Result<CollocationSolution> {
    if (init.radius - dom.radius).abs() > 1e-12 * dom.radius {
        return Err(Error::InvalidParameter("initial guess lives on a different ball".into()));
    }
    let sol = collocation::collocate(lambda, init, settings.newton_tol, 60)?;
    if sol.node_count == 0 {
        return Err(Error::NodeCountMismatch {
            expected: ">= 1 (sign-changing solution)".into(),
            found: 0,
        });
    }
    Ok(sol)
}

/// Defect of the collocated system at the nodal data of `profile`, in the scaled max norm
/// Newton reports.
pub fn collocation_defect(lambda: f64, profile: &RadialProfile) -> f64 {
    collocation::defect(lambda, profile)
}

/// Collocation without any sign requirement.
pub fn collocate(lambda: f64, init: &RadialProfile, settings: &Settings) -> Result<CollocationSolution> {
    collocation::collocate(lambda, init, settings.newton_tol, 60)
}

/// Breakpoints that split the mesh at interior sign changes.
pub(crate) fn breakpoints_with_zeros(profile: &RadialProfile) -> Vec<f64> {
    let mut bp = profile.nodes.clone();
    bp.extend(profile.sign_changes());
    bp.sort_by(f64::total_cmp);
    bp.dedup();
    bp
}

/// Pohozaev balance `λ ∫ u² = (ω₆/2) R⁶ u'(R)²` for a solution on the ball.
pub fn pohozaev_audit(profile: &RadialProfile, lambda: f64, quad_tol: f64) -> Result<PohozaevAudit> {
    let w = omega6();
    let quad = PanelIntegrator::new(quad_tol, 0.0);
    let int_u2 = w * quad.integrate(|r| profile.value(r).powi(2) * r.powi(5), &breakpoints_with_zeros(profile))?;
    let bulk = lambda * int_u2;
    let radius = profile.radius;
    let boundary = 0.5 * w * radius.powi(6) * profile.derivs[profile.len() - 1].powi(2);
    let relative_gap = (bulk - boundary).abs() / bulk.abs().max(boundary.abs()).max(f64::MIN_POSITIVE);
    Ok(PohozaevAudit {
        bulk,
        boundary,
        relative_gap,
    })
}

/// Strong-form defect `u'' + 5u'/r + |u|u + λu` at interval midpoints, relative to the size
/// of its largest term.
pub fn strong_defect(profile: &RadialProfile, lambda: f64) -> f64 {
    profile
        .nodes
        .windows(2)
        .map(|w| {
            let r = 0.5 * (w[0] + w[1]);
            let [u, du, ddu] = profile.jet(r);
            let terms = [ddu, 5.0 * du / r, g(u, lambda)];
            let size = terms.iter().fold(0.0f64, |m, t| m.max(t.abs()));
            (terms.iter().sum::<f64>()).abs() / size.max(f64::MIN_POSITIVE)
        })
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> Settings {
        Settings {
            grid_n: 512,
            ..Settings::default()
        }
    }

    #[test]
    fn no_solution_outside_range() {
        let dom = DomainBall::unit();
        assert!(matches!(
            solve_positive(0.0, &dom, &small()),
            Err(Error::NoSolutionInRange { .. })
        ));
        let l1 = first_eigenvalue(&dom);
        assert!(matches!(
            solve_positive(l1 * 1.01, &dom, &small()),
            Err(Error::NoSolutionInRange { .. })
        ));
    }

    #[test]
    fn free_spectrum_matches_bessel() {
        let dom = DomainBall::unit();
        let s = free_sector_eigenvalues(&dom, 0, 2).unwrap();
        assert!((s.eigenvalues[0] - first_eigenvalue(&dom)).abs() < 1e-8);
        let j22 = bessel_j_zero(2, 2);
        assert!((s.eigenvalues[1] - j22 * j22).abs() < 1e-7);
    }

    #[test]
    fn ground_state_is_positive_with_morse_index_one() {
        let dom = DomainBall::unit();
        let gs = solve_positive(15.0, &dom, &small()).unwrap();
        assert!(gs.profile.values[..gs.profile.len() - 1].iter().all(|&v| v > 0.0));
        assert_eq!(gs.morse_data.index, 1);
        assert_eq!(gs.max_value, gs.profile.center_value());
    }
}
