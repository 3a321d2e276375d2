//! The critical parameter λ₀ = 2u₀(0), the assumption checks around it, and the constants of
//! the reduced energy.

use rayon::prelude::*;
use serde::Serialize;

use crate::bubble_kernel::{alpha6, bubble_integrals, omega6, DomainBall, Point6};
use crate::error::{Error, Result};
use crate::numerics::brent;
use crate::profile::{RadialFunction, RadialProfile};
use crate::radial_bvp::{
    first_eigenvalue, nondegeneracy, positive_shooting_parameter, solve_positive, solve_v0, GroundState,
    NondegeneracyReport,
};
use crate::settings::Settings;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TheoremCase {
    PositiveEps,
    NegativeEps,
}

impl TheoremCase {
    pub fn from_sign_condition(sign_condition: f64) -> Self {
        if sign_condition > 0.0 {
            TheoremCase::PositiveEps
        } else {
            TheoremCase::NegativeEps
        }
    }

    pub fn sign(self) -> f64 {
        match self {
            TheoremCase::PositiveEps => 1.0,
            TheoremCase::NegativeEps => -1.0,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            TheoremCase::PositiveEps => "positive_eps",
            TheoremCase::NegativeEps => "negative_eps",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReducedEnergyConstants {
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
    #[serde(rename = "R0")]
    pub r0: f64,
    pub u0_max: f64,
    pub v0_at_center: f64,
    pub sign_condition: f64,
    pub d0: f64,
    pub hessian_scalar: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Lambda0Search {
    pub lambda0: f64,
    /// `|λ₀ - 2 u_{λ₀}(0)|`.
    pub residual: f64,
    pub u0_max: f64,
    /// Every sign-change bracket of f seen by the sweep.
    pub brackets: Vec<[f64; 2]>,
    /// `(λ, f(λ))` sweep samples.
    pub samples: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AssumptionReport {
    pub lambda0: f64,
    pub fixed_point_residual: f64,
    pub nondegenerate: bool,
    pub nondegeneracy: NondegeneracyReport,
    pub v00_margin: f64,
    pub theorem_case: TheoremCase,
    pub hessian_negative: bool,
    pub lambda0_brackets: Vec<[f64; 2]>,
}

/// Everything downstream stages need from the critical point.
#[derive(Debug, Clone)]
pub struct CriticalData {
    pub report: AssumptionReport,
    pub ground_state: GroundState,
    pub v0: RadialProfile,
    pub constants: ReducedEnergyConstants,
    pub search: Lambda0Search,
}

/// `f(λ) = λ - 2 u_λ(0)`.
pub fn lambda0_defect(lambda: f64, dom: &DomainBall) -> Result<f64> {
    Ok(lambda - 2.0 * positive_shooting_parameter(lambda, dom)?)
}

/// Sweeps f over (0, λ₁), certifies its endpoint signs, and refines the smallest root.
pub fn find_lambda0(dom: &DomainBall, tol: f64) -> Result<Lambda0Search> {
    let l1 = first_eigenvalue(dom);
    let mut fractions = vec![0.01];
    fractions.extend((1..32).map(|k| k as f64 / 32.0));
    fractions.push(0.99);
    let samples: Vec<[f64; 2]> = fractions
        .par_iter()
        .map(|&t| Ok([t * l1, lambda0_defect(t * l1, dom)?]))
        .collect::<Result<_>>()?;
    let (first, last) = (samples[0], samples[samples.len() - 1]);
    if !(first[1] < 0.0 && last[1] > 0.0) {
        return Err(Error::SignCertificationError {
            lo: first[0],
            hi: last[0],
            f_lo: first[1],
            f_hi: last[1],
        });
    }
    let brackets: Vec<[f64; 2]> = samples
        .windows(2)
        .filter(|w| w[0][1].signum() != w[1][1].signum())
        .map(|w| [w[0][0], w[1][0]])
        .collect();
    let [lo, hi] = brackets[0];
    let f = |l: f64| lambda0_defect(l, dom).unwrap_or(f64::NAN);
    let lambda0 = brent(f, lo, hi, 1e-15 * hi, 400)?;
    let u0_max = positive_shooting_parameter(lambda0, dom)?;
    let residual = (lambda0 - 2.0 * u0_max).abs();
    if residual >= tol {
        return Err(Error::SignCertificationError {
            lo,
            hi,
            f_lo: f(lo),
            f_hi: f(hi),
        });
    }
    Ok(Lambda0Search {
        lambda0,
        residual,
        u0_max,
        brackets,
        samples,
    })
}

/// `(11/9) ω₆ α₆^{3/2} m^{3/2}` for a peak value m.
pub fn a3_closed_form(u0_max: f64) -> f64 {
    11.0 / 9.0 * omega6() * alpha6().powf(1.5) * u0_max.powf(1.5)
}

/// `a3` reassembled from the outside/inside region integrals at `R₀ = (α₆/m)^{1/4}`.
pub fn a3_region_algebra(u0_max: f64) -> f64 {
    let (a, w, m) = (alpha6(), omega6(), u0_max);
    let r0 = (a / m).powf(0.25);
    let outside = -a.powi(3) * r0.powi(-6) * w / 3.0 + 3.0 * w * a * a * r0.powi(-2) * m;
    let inside = -2.0 * m.powi(3) * w * r0.powi(6) + 3.0 * a * m * m * w * r0 * r0;
    // both regions enter the energy with weight -1/3
    -(-outside / 3.0 - inside / 3.0)
}

pub fn compute_constants(gs: &GroundState, v0: &RadialProfile, settings: &Settings) -> Result<ReducedEnergyConstants> {
    let a = alpha6();
    let a1 = a * a * bubble_integrals().int_w4;
    let a2 = a1 / 2.0;
    let u0_max = gs.max_value;
    let a3 = a3_closed_form(u0_max);
    let v0_at_center = v0.value(0.0);
    let sign_condition = 1.0 - 2.0 * v0_at_center;
    if sign_condition.abs() < settings.v00_tol {
        return Err(Error::AssumptionV00Violated {
            margin: sign_condition.abs(),
            tol: settings.v00_tol,
        });
    }
    Ok(ReducedEnergyConstants {
        a1,
        a2,
        a3,
        r0: (a / u0_max).powf(0.25),
        u0_max,
        v0_at_center,
        sign_condition,
        d0: 2.0 * a1 / (3.0 * a3) * sign_condition.abs(),
        hessian_scalar: gs.profile.d2(0.0),
    })
}

/// `Υ(d, η) = sgn(ε)(1 - 2v₀(0)) d² a1 + d³ (a2 u₀''(0) |η|² - a3)`.
pub fn upsilon(d: f64, eta: &Point6, eps_sign: f64, c: &ReducedEnergyConstants) -> f64 {
    let eta2: f64 = eta.iter().map(|e| e * e).sum();
    eps_sign.signum() * c.sign_condition * d * d * c.a1 + d.powi(3) * (c.a2 * c.hessian_scalar * eta2 - c.a3)
}

/// The reduced-energy law with coefficients collected directly from the energy integrals:
/// `Υ*(d, 0) = -(a1/2) sgn(ε)(1 - 2v₀(0)) d² - a3* d³` with
/// `a3* = (16/9) ω₆ α₆^{3/2} m^{3/2}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RecomputedLaw {
    pub a1: f64,
    pub a3: f64,
    pub sign_condition: f64,
    /// Sign of ε for which `Υ*(., 0)` has an interior maximum.
    pub admissible_sign: f64,
    pub d_star: f64,
}

impl RecomputedLaw {
    pub fn new(c: &ReducedEnergyConstants) -> Self {
        let a3 = 16.0 / 9.0 * omega6() * alpha6().powf(1.5) * c.u0_max.powf(1.5);
        Self {
            a1: c.a1,
            a3,
            sign_condition: c.sign_condition,
            admissible_sign: -c.sign_condition.signum(),
            d_star: c.a1 * c.sign_condition.abs() / (3.0 * a3),
        }
    }

    pub fn upsilon(&self, d: f64, eps_sign: f64) -> f64 {
        -0.5 * self.a1 * eps_sign.signum() * self.sign_condition * d * d - self.a3 * d.powi(3)
    }
}

/// Runs the full critical-point pipeline on the ball.
pub fn assumption_report(dom: &DomainBall, settings: &Settings) -> Result<CriticalData> {
    let search = find_lambda0(dom, 1e-8)?;
    let gs = solve_positive(search.lambda0, dom, settings)?;
    let nondeg = nondegeneracy(&gs, settings)?;
    if !nondeg.nondegenerate {
        let (ell, mu) = nondeg
            .per_sector
            .iter()
            .copied()
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("sectors");
        return Err(Error::DegenerateLinearization {
            ell,
            mu,
            tol: settings.tol_eig,
        });
    }
    let v0 = solve_v0(&gs, dom, settings)?;
    let constants = compute_constants(&gs, &v0, settings)?;
    let report = AssumptionReport {
        lambda0: search.lambda0,
        fixed_point_residual: (search.lambda0 - 2.0 * gs.max_value).abs(),
        nondegenerate: nondeg.nondegenerate,
        nondegeneracy: nondeg,
        v00_margin: constants.sign_condition.abs(),
        theorem_case: TheoremCase::from_sign_condition(constants.sign_condition),
        hessian_negative: constants.hessian_scalar < 0.0,
        lambda0_brackets: search.brackets.clone(),
    };
    Ok(CriticalData {
        report,
        ground_state: gs,
        v0,
        constants,
        search,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fake(sign_condition: f64) -> ReducedEnergyConstants {
        let a1 = 96.0 * omega6();
        let a3 = a3_closed_form(11.0);
        ReducedEnergyConstants {
            a1,
            a2: a1 / 2.0,
            a3,
            r0: (24.0f64 / 11.0).powf(0.25),
            u0_max: 11.0,
            v0_at_center: (1.0 - sign_condition) / 2.0,
            sign_condition,
            d0: 2.0 * a1 / (3.0 * a3) * sign_condition.abs(),
            hessian_scalar: -60.0,
        }
    }

    #[test]
    fn upsilon_vanishes_at_zero() {
        let c = fake(2.0);
        assert_eq!(upsilon(0.0, &[1.0; 6], 1.0, &c), 0.0);
    }

    #[test]
    fn closed_form_d0_is_stationary() {
        let c = fake(3.0);
        let h = 1e-6 * c.d0;
        let z = [0.0; 6];
        let slope = (upsilon(c.d0 + h, &z, 1.0, &c) - upsilon(c.d0 - h, &z, 1.0, &c)) / (2.0 * h);
        let scale = upsilon(c.d0, &z, 1.0, &c).abs() / c.d0;
        assert!(slope.abs() < 1e-6 * scale);
    }

    #[test]
    fn wrong_sign_has_no_positive_value() {
        let c = fake(3.0);
        for k in 1..=200 {
            let d = 10.0 * c.d0 * k as f64 / 200.0;
            assert!(upsilon(d, &[0.0; 6], -1.0, &c) < 0.0);
        }
    }

    #[test]
    fn region_algebra_reproduces_closed_form() {
        for m in [0.5, 3.0, 11.234] {
            let rel = (a3_region_algebra(m) / a3_closed_form(m) - 1.0).abs();
            assert!(rel < 1e-12, "m={m} rel={rel}");
        }
    }

    #[test]
    fn recomputed_law_maximum() {
        let c = fake(3.0);
        let law = RecomputedLaw::new(&c);
        assert_eq!(law.admissible_sign, -1.0);
        let h = 1e-6 * law.d_star;
        let slope = (law.upsilon(law.d_star + h, -1.0) - law.upsilon(law.d_star - h, -1.0)) / (2.0 * h);
        assert!(slope.abs() < 1e-4);
    }
}
