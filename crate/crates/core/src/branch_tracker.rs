//! Continuation of the sign-changing radial branch as `λ → λ₀`, extraction of its
//! concentration scale and the fit of the blow-up rate.

use serde::Serialize;

use crate::bubble_kernel::{alpha6, omega6};
use crate::critical_data::ReducedEnergyConstants;
use crate::energy_expansion::{assemble_ansatz, Ansatz};
use crate::error::{Error, Result};
use crate::mesh;
use crate::numerics::{fit_line, log_log_slope, GaussLegendre};
use crate::profile::{RadialFunction, RadialProfile};
use crate::radial_bvp::{
    collocation_defect, nodal_shooting_parameter, sample_nodal, solve_sign_changing, CollocationSolution, GroundState,
};
use crate::settings::Settings;

#[derive(Debug, Clone, Serialize)]
pub struct BranchPoint {
    pub eps: f64,
    pub lambda: f64,
    #[serde(skip)]
    pub profile: RadialProfile,
    pub u_min: f64,
    pub delta_extracted: f64,
    pub node_count: usize,
    pub newton_residual: f64,
    pub newton_iterations: usize,
    pub phi_norm_proxy: f64,
}

impl BranchPoint {
    pub fn delta_over_abs_eps(&self) -> f64 {
        self.delta_extracted / self.eps.abs()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RateFit {
    pub d_fitted: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub eps_range: [f64; 2],
    pub d0_predicted: f64,
    pub relative_gap: f64,
}

/// `δ = sqrt(α₆ / (u₀(0) - min u))`.
pub fn extract_delta(profile: &RadialProfile, gs: &GroundState) -> Result<f64> {
    let min = profile.min_value();
    if min >= 0.0 {
        return Err(Error::NotBlownUp { min });
    }
    Ok((alpha6() / (gs.max_value - min)).sqrt())
}

/// Same inversion with the `εv₀(0)` correction in the central value.
pub fn extract_delta_corrected(profile: &RadialProfile, gs: &GroundState, v0: &RadialProfile, eps: f64) -> Result<f64> {
    let min = profile.min_value();
    if min >= 0.0 {
        return Err(Error::NotBlownUp { min });
    }
    Ok((alpha6() / (gs.max_value + eps * v0.value(0.0) - min)).sqrt())
}

/// `‖∇(u - W)‖_{L²}` with W built at `(ε, δ)`, as the discrete norm given by an 8-point
/// Gauss rule on every mesh interval of `profile`.
pub fn phi_norm_proxy(profile: &RadialProfile, gs: &GroundState, v0: &RadialProfile, eps: f64, delta: f64) -> Result<f64> {
    let w = Ansatz::new(&gs.profile, v0, eps, delta);
    let gl = GaussLegendre::new(8);
    let v: f64 = profile
        .nodes
        .windows(2)
        .map(|ab| {
            gl.integrate(
                |r| {
                    let e = profile.d1(r) - w.d1(r);
                    e * e * r.powi(5)
                },
                ab[0],
                ab[1],
            )
        })
        .sum();
    if !v.is_finite() {
        return Err(Error::InvalidParameter("non-finite remainder norm".into()));
    }
    Ok((omega6() * v).sqrt())
}

fn accept(
    sol: CollocationSolution,
    eps: f64,
    gs: &GroundState,
    v0: &RadialProfile,
) -> Result<BranchPoint> {
    if sol.node_count != 1 {
        return Err(Error::NodeCountMismatch {
            expected: "1".into(),
            found: sol.node_count,
        });
    }
    let delta = extract_delta(&sol.profile, gs)?;
    let phi = phi_norm_proxy(&sol.profile, gs, v0, eps, delta)?;
    Ok(BranchPoint {
        eps,
        lambda: gs.lambda + eps,
        u_min: sol.profile.min_value(),
        delta_extracted: delta,
        node_count: sol.node_count,
        newton_residual: sol.final_residual(),
        newton_iterations: sol.iterations,
        phi_norm_proxy: phi,
        profile: sol.profile,
    })
}

/// One-node solution at `λ₀ + ε` whose concentration scale is near `delta_guess`, by
/// shooting from the centre value the ansatz predicts.
///
/// The collocated system is not solved here: its linearization has a soft dilation mode
/// with eigenvalue far below the Hermite-Simpson truncation error, so Newton on it drifts
/// in δ by tens of percent. The shooting profile is sampled on a mesh graded at its own
/// scale and `newton_residual` records its collocation defect.
pub fn solve_near(gs: &GroundState, v0: &RadialProfile, eps: f64, delta_guess: f64, settings: &Settings) -> Result<BranchPoint> {
    let dom = crate::energy_expansion::domain_of(gs);
    if !(delta_guess > 0.0) || delta_guess >= dom.radius / 2.0 {
        return Err(Error::ScaleTooLarge {
            delta: delta_guess,
            radius: dom.radius,
        });
    }
    let lambda = gs.lambda + eps;
    let a_guess = alpha6() / (delta_guess * delta_guess) - gs.max_value - eps * v0.value(0.0);
    let s = nodal_shooting_parameter(lambda, &dom, a_guess.max(1.0), SHOOTING_SPAN)?;
    let delta = (alpha6() / (gs.max_value - s)).sqrt();
    let nodes = mesh::graded(dom.radius, settings.grid_n, Some(delta));
    let profile = sample_nodal(s, lambda, &nodes)?;
    let node_count = profile.node_count();
    let defect = collocation_defect(lambda, &profile);
    accept(
        CollocationSolution {
            profile,
            iterations: 0,
            residual_history: vec![defect],
            node_count,
        },
        eps,
        gs,
        v0,
    )
}

/// Centre values within this factor of the prediction are searched.
const SHOOTING_SPAN: f64 = 100.0;

/// Newton on the collocated system from the ansatz at `(eps, d)`; accepted only with exactly
/// one interior node.
pub fn solve_from_ansatz(gs: &GroundState, v0: &RadialProfile, eps: f64, d: f64, settings: &Settings) -> Result<BranchPoint> {
    let b = assemble_ansatz(gs, v0, eps, d, settings)?;
    let dom = crate::energy_expansion::domain_of(gs);
    let sol = solve_sign_changing(b.lambda, &b.w, &dom, settings)?;
    accept(sol, eps, gs, v0)
}

/// Starts the branch at `eps0` from the ansatz with `d = d0`, retrying `d0/2`, `2d0` and then
/// larger `|eps0|`.
pub fn seed_branch(
    gs: &GroundState,
    v0: &RadialProfile,
    c: &ReducedEnergyConstants,
    eps0: f64,
    settings: &Settings,
) -> Result<BranchPoint> {
    seed_branch_from(gs, v0, c.d0, eps0, settings)
}

/// Seeding ladder around an arbitrary starting rate. Each rung tries Newton from the ansatz
/// first and shooting near the ansatz scale second.
pub fn seed_branch_from(gs: &GroundState, v0: &RadialProfile, d_start: f64, eps0: f64, settings: &Settings) -> Result<BranchPoint> {
    let mut attempts = Vec::new();
    for scale in [1.0, 10f64.sqrt(), 10.0] {
        let eps = eps0 * scale;
        for d in [d_start, 0.5 * d_start, 2.0 * d_start] {
            match solve_from_ansatz(gs, v0, eps, d, settings) {
                Ok(p) => return Ok(p),
                Err(e) => attempts.push(format!("eps={eps:e} d={d:e} newton: {e}")),
            }
            match solve_near(gs, v0, eps, eps.abs() * d, settings) {
                Ok(p) => return Ok(p),
                Err(e) => attempts.push(format!("eps={eps:e} d={d:e} shooting: {e}")),
            }
        }
    }
    Err(Error::SeedFailure { attempts })
}

fn predict_delta(points: &[BranchPoint], eps: f64) -> f64 {
    match points {
        [] => unreachable!("continuation always has a start point"),
        [p] => p.delta_extracted * (eps / p.eps).abs(),
        [.., a, b] => {
            let slope = (b.delta_extracted / a.delta_extracted).ln() / (b.eps / a.eps).abs().ln();
            if slope.is_finite() {
                b.delta_extracted * (eps / b.eps).abs().powf(slope)
            } else {
                b.delta_extracted * (eps / b.eps).abs()
            }
        }
    }
}

fn step_to(history: &[BranchPoint], eps: f64, gs: &GroundState, v0: &RadialProfile, settings: &Settings) -> Result<BranchPoint> {
    solve_near(gs, v0, eps, predict_delta(history, eps), settings)
}

/// Natural-parameter continuation from `start` through `eps_targets` (same sign, moving
/// towards 0). Failed steps are bisected in `log|ε|` up to ten times before giving up.
pub fn continue_branch(
    start: BranchPoint,
    eps_targets: &[f64],
    gs: &GroundState,
    v0: &RadialProfile,
    settings: &Settings,
) -> Result<Vec<BranchPoint>> {
    for w in eps_targets.windows(2) {
        if w[1].abs() > w[0].abs() {
            return Err(Error::InvalidParameter("targets must move towards 0".into()));
        }
    }
    if eps_targets
        .iter()
        .any(|&e| e == 0.0 || e.signum() != start.eps.signum() || e.abs() > start.eps.abs())
    {
        return Err(Error::InvalidParameter(
            "targets must share the start sign and not exceed |start.eps|".into(),
        ));
    }
    let mut history = vec![start.clone()];
    let mut out = Vec::new();
    for &target in eps_targets {
        if target == history.last().expect("history").eps {
            out.push(history.last().expect("history").clone());
            continue;
        }
        let mut halvings = 0;
        let mut trial = target;
        loop {
            match step_to(&history, trial, gs, v0, settings) {
                Ok(p) => {
                    history.push(p);
                    if trial == target {
                        out.push(history.last().expect("history").clone());
                        break;
                    }
                    trial = target;
                }
                Err(_) => {
                    halvings += 1;
                    if halvings > 10 {
                        return Err(Error::BranchStall { eps: trial, partial: out });
                    }
                    let current = history.last().expect("history").eps;
                    trial = current.signum() * (0.5 * (current.abs().ln() + trial.abs().ln())).exp();
                }
            }
        }
    }
    Ok(out)
}

/// Least squares `δ = d|ε| + b` over the accepted points.
pub fn fit_blowup_rate(branch: &[BranchPoint], d0: f64) -> Result<RateFit> {
    if branch.len() < 4 {
        return Err(Error::FitError(format!("at least 4 points, got {}", branch.len())));
    }
    let xs: Vec<f64> = branch.iter().map(|p| p.eps.abs()).collect();
    let ys: Vec<f64> = branch.iter().map(|p| p.delta_extracted).collect();
    let lo = xs.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = xs.iter().copied().fold(0.0, f64::max);
    if hi < 10.0 * lo * (1.0 - 1e-9) {
        return Err(Error::FitError(format!("a decade of |eps|, got [{lo:e}, {hi:e}]")));
    }
    let f = fit_line(&xs, &ys).ok_or_else(|| Error::FitError("distinct |eps| values".into()))?;
    Ok(RateFit {
        d_fitted: f.slope,
        intercept: f.intercept,
        r_squared: f.r_squared,
        eps_range: [lo, hi],
        d0_predicted: d0,
        relative_gap: (f.slope - d0).abs() / d0,
    })
}

/// Log-log slope of the remainder proxy against |ε|.
pub fn remainder_slope(branch: &[BranchPoint]) -> Option<f64> {
    let xs: Vec<f64> = branch.iter().map(|p| p.eps.abs()).collect();
    let ys: Vec<f64> = branch.iter().map(|p| p.phi_norm_proxy).collect();
    log_log_slope(&xs, &ys)
}

/// Geometric targets from `|from|` to `|to|` with `per_decade` points per decade, signed.
pub fn geometric_targets(from: f64, to: f64, per_decade: usize) -> Vec<f64> {
    let (a, b) = (from.abs().log10(), to.abs().log10());
    let m = (((a - b).abs() * per_decade as f64).round() as usize).max(1);
    (0..=m)
        .map(|k| from.signum() * 10f64.powf(a + (b - a) * k as f64 / m as f64))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn synthetic(eps: f64, delta: f64) -> BranchPoint {
        let nodes = vec![0.0, 1.0];
        BranchPoint {
            eps,
            lambda: 0.0,
            profile: RadialProfile::new(nodes, vec![-1.0, 0.0], vec![0.0, 0.0], vec![0.0, 0.0]).unwrap(),
            u_min: -1.0,
            delta_extracted: delta,
            node_count: 1,
            newton_residual: 0.0,
            newton_iterations: 1,
            phi_norm_proxy: eps * eps,
        }
    }

    #[test]
    fn exact_linear_branch_fits_perfectly() {
        let pts: Vec<BranchPoint> = geometric_targets(-1e-2, -1e-3, 4)
            .into_iter()
            .map(|e| synthetic(e, 0.7 * e.abs()))
            .collect();
        let f = fit_blowup_rate(&pts, 0.7).unwrap();
        assert!((f.d_fitted - 0.7).abs() < 1e-12);
        assert!((f.r_squared - 1.0).abs() < 1e-12);
        assert!(f.relative_gap < 1e-10);
        assert!((remainder_slope(&pts).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn too_few_points() {
        let pts: Vec<BranchPoint> = [1e-2, 1e-3].iter().map(|&e| synthetic(e, e)).collect();
        assert!(matches!(fit_blowup_rate(&pts, 1.0), Err(Error::FitError(_))));
    }

    #[test]
    fn targets_are_geometric() {
        let t = geometric_targets(1e-2, 10f64.powf(-3.5), 2);
        assert_eq!(t.len(), 4);
        assert!((t[3] - 10f64.powf(-3.5)).abs() < 1e-18);
    }
}
