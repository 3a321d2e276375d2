//! Stage implementations behind the `bn6` subcommands.

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;
use serde_json::Value;

use crate::branch_tracker::{continue_branch, fit_blowup_rate, remainder_slope, seed_branch_from, BranchPoint, RateFit};
use crate::bubble_kernel::{
    alpha6, bubble_integrals, eval_bubble, omega6, regular_part_ball, BubbleParams, CentralProjection, DomainBall,
    ORIGIN,
};
use crate::critical_data::{
    compute_constants, find_lambda0, ReducedEnergyConstants, RecomputedLaw, TheoremCase,
};
use crate::energy_expansion::{
    assemble_ansatz, crossover_radius, expansion_check, i4_prediction, i5_prediction, i_term_audit, ExpansionSample,
    ITerms,
};
use crate::error::{Error, Result};
use crate::numerics::special::bessel_j_zero;
use crate::numerics::{adaptive_half_line, log_log_slope};
use crate::profile::{RadialFunction, RadialProfile};
use crate::radial_bvp::{
    first_eigenvalue, free_sector_eigenvalues, ground_state_from_samples, nondegeneracy, pohozaev_audit,
    solve_positive, solve_positive_collocated, solve_v0, strong_defect, v0_from_samples, GroundState,
    MorseSummary, NondegeneracyReport, PohozaevAudit,
};
use crate::settings::Settings;

use super::config::RunConfig;
use super::output::{read_stage_json, to_csv, to_json, CsvCell, RunManifest, StageWriter};
use super::svg::{Plot, Series, Style};

pub const CONSTANTS_JSON: &str = "constants.json";
pub const LAMBDA0_JSON: &str = "lambda0.json";
pub const GROUND_STATE_JSON: &str = "ground_state.json";
pub const U0_PROFILE: &str = "u0.profile";
pub const V0_PROFILE: &str = "v0.profile";
pub const EXPANSION_JSON: &str = "expansion.json";
pub const BRANCH_JSON: &str = "branch.json";

/// Relative tolerance of the closed-form/quadrature cross-checks.
pub const CROSS_CHECK_TOL: f64 = 1e-8;

/// Everything a stage needs besides its inputs on disk.
pub struct Context {
    pub cfg: RunConfig,
    pub dir: PathBuf,
    pub digest: String,
    pub settings: Settings,
    pub dom: DomainBall,
}

impl Context {
    pub fn new(cfg: RunConfig) -> Result<Self> {
        cfg.validate()?;
        Ok(Context {
            dir: cfg.output_dir.clone(),
            digest: cfg.digest(),
            settings: cfg.settings(),
            dom: DomainBall::new(cfg.domain_radius)?,
            cfg,
        })
    }

    fn read(&self, stage: &str, file: &str) -> Result<Value> {
        read_stage_json(&self.dir, stage, file, &self.digest)
    }
}

fn rel_delta(closed: f64, computed: f64) -> f64 {
    (computed - closed).abs() / closed.abs()
}

// ---------------------------------------------------------------- constants

#[derive(Debug, Clone, Serialize)]
pub struct CheckRow {
    pub name: String,
    pub closed_form: f64,
    pub quadrature: f64,
    pub relative_delta: f64,
    pub pass: bool,
    pub note: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct ProjectionCheck {
    pub deltas: Vec<f64>,
    pub sup_errors: Vec<f64>,
    pub slope: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct EigenCheck {
    pub lambda1_solver: f64,
    pub lambda1_bessel: f64,
    pub abs_error: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConstantsRecord {
    pub config_digest: String,
    pub alpha6: f64,
    pub omega6: f64,
    pub int_u3: f64,
    pub a1_over_omega6: f64,
    pub a2_over_omega6: f64,
    pub cross_check_tolerance: f64,
    pub checks: Vec<CheckRow>,
    pub projection: ProjectionCheck,
    pub dirichlet: EigenCheck,
}

impl ConstantsRecord {
    pub fn failing(&self) -> Vec<&CheckRow> {
        self.checks.iter().filter(|c| !c.pass).collect()
    }
}

fn check_row(name: &str, closed: f64, quad: Result<f64>) -> CheckRow {
    match quad {
        Ok(q) => {
            let d = rel_delta(closed, q);
            CheckRow {
                name: name.into(),
                closed_form: closed,
                quadrature: q,
                relative_delta: d,
                pass: d <= CROSS_CHECK_TOL,
                note: String::new(),
            }
        }
        Err(e) => CheckRow {
            name: name.into(),
            closed_form: closed,
            quadrature: f64::NAN,
            relative_delta: f64::NAN,
            pass: false,
            note: e.to_string(),
        },
    }
}

/// `sup_x |PU - U + α₆δ²H(x,0)|` for a central bubble, sampled on `R/4 ≤ |x| ≤ R`.
///
/// Closer to the centre `U` exceeds the remainder by more than the inverse machine epsilon,
/// so differences of point values there measure rounding only.
pub fn projection_sup_error(delta: f64, dom: &DomainBall) -> Result<f64> {
    let p = BubbleParams::central(delta)?;
    let proj = CentralProjection::new(&p, dom)?;
    let a = alpha6();
    let mut sup: f64 = 0.0;
    for k in 0..=300 {
        let r = dom.radius * (0.25 + 0.75 * k as f64 / 300.0);
        let x = [r, 0.0, 0.0, 0.0, 0.0, 0.0];
        let e = proj.value(r) - eval_bubble(&p, &x) + a * delta * delta * regular_part_ball(&x, &ORIGIN, dom)?;
        sup = sup.max(e.abs());
    }
    Ok(sup)
}

pub fn constants_record(ctx: &Context) -> Result<ConstantsRecord> {
    let a = alpha6();
    let w = omega6();
    let ints = bubble_integrals();
    let tol = ctx.cfg.quad_tol;
    let q = |k: i32| adaptive_half_line(|r| r.powi(5) / (1.0 + r * r).powi(k), tol, 0.0);
    let checks = vec![
        CheckRow {
            name: "alpha6".into(),
            closed_form: 24.0,
            quadrature: a,
            relative_delta: rel_delta(24.0, a),
            pass: a == 24.0,
            note: "4 n (n - 2) at n = 6".into(),
        },
        check_row("int_u3", ints.int_u3, q(6).map(|v| w * a.powi(3) * v)),
        check_row("int_w4_over_omega6", ints.int_w4 / w, q(4)),
        check_row("a1_over_omega6", 96.0, q(4).map(|v| a * a * v)),
        check_row("a2_over_omega6", 48.0, q(4).map(|v| 0.5 * a * a * v)),
    ];
    let deltas: Vec<f64> = (0..=8).map(|k| 10f64.powf(-3.0 + 0.25 * k as f64)).collect();
    let sup_errors = deltas
        .iter()
        .map(|&d| projection_sup_error(d, &ctx.dom))
        .collect::<Result<Vec<_>>>()?;
    let slope = log_log_slope(&deltas, &sup_errors).unwrap_or(f64::NAN);
    let lambda1_solver = free_sector_eigenvalues(&ctx.dom, 0, 1)?.eigenvalues[0];
    let lambda1_bessel = (bessel_j_zero(2, 1) / ctx.dom.radius).powi(2);
    Ok(ConstantsRecord {
        config_digest: ctx.digest.clone(),
        alpha6: a,
        omega6: w,
        int_u3: ints.int_u3,
        a1_over_omega6: a * a * ints.int_w4 / w,
        a2_over_omega6: 0.5 * a * a * ints.int_w4 / w,
        cross_check_tolerance: CROSS_CHECK_TOL,
        checks,
        projection: ProjectionCheck {
            deltas,
            sup_errors,
            slope,
        },
        dirichlet: EigenCheck {
            lambda1_solver,
            lambda1_bessel,
            abs_error: (lambda1_solver - lambda1_bessel).abs(),
        },
    })
}

pub fn cmd_constants(ctx: &Context, manifest: &mut RunManifest) -> Result<i32> {
    let t = std::time::Instant::now();
    let rec = constants_record(ctx)?;
    let mut out = StageWriter::new(&ctx.dir)?;
    out.write_json(CONSTANTS_JSON, &rec)?;
    out.finish(manifest, "constants", t.elapsed().as_secs_f64());
    println!("{:<22} {:>24} {:>24} {:>10}", "check", "closed form", "quadrature", "rel delta");
    for c in &rec.checks {
        println!(
            "{:<22} {:>24.16e} {:>24.16e} {:>10.2e} {}",
            c.name,
            c.closed_form,
            c.quadrature,
            c.relative_delta,
            if c.pass { "ok" } else { "FAIL" }
        );
    }
    println!("projection slope {:.4}", rec.projection.slope);
    println!(
        "lambda1 solver {:.12} bessel {:.12}",
        rec.dirichlet.lambda1_solver, rec.dirichlet.lambda1_bessel
    );
    let failing = rec.failing();
    if failing.is_empty() {
        Ok(0)
    } else {
        for c in failing {
            eprintln!("cross-check failed: {} (relative delta {:e}) {}", c.name, c.relative_delta, c.note);
        }
        Ok(1)
    }
}

// ---------------------------------------------------------------- lambda0

#[derive(Debug, Clone, Serialize)]
pub struct Lambda0Record {
    pub config_digest: String,
    pub lambda0: f64,
    pub fixed_point_residual: f64,
    pub u0_max: f64,
    pub lambda1: f64,
    pub sign_certified: bool,
    pub brackets: Vec<[f64; 2]>,
    /// `(λ, λ - 2u_λ(0))` over the sweep.
    pub samples: Vec<[f64; 2]>,
}

pub fn cmd_lambda0(ctx: &Context, manifest: &mut RunManifest) -> Result<i32> {
    let t = std::time::Instant::now();
    let s = find_lambda0(&ctx.dom, 1e-8)?;
    let first = s.samples[0][1];
    let last = s.samples[s.samples.len() - 1][1];
    let rec = Lambda0Record {
        config_digest: ctx.digest.clone(),
        lambda0: s.lambda0,
        fixed_point_residual: s.residual,
        u0_max: s.u0_max,
        lambda1: first_eigenvalue(&ctx.dom),
        sign_certified: first < 0.0 && last > 0.0,
        brackets: s.brackets,
        samples: s.samples,
    };
    let mut out = StageWriter::new(&ctx.dir)?;
    out.write_json(LAMBDA0_JSON, &rec)?;
    out.finish(manifest, "lambda0", t.elapsed().as_secs_f64());
    println!(
        "lambda0 = {:.15}  |lambda0 - 2 u(0)| = {:.3e}  lambda1 = {:.12}",
        rec.lambda0, rec.fixed_point_residual, rec.lambda1
    );
    Ok(0)
}

// ---------------------------------------------------------------- ground state

#[derive(Debug, Clone, Serialize)]
pub struct CollocationCheck {
    pub iterations: usize,
    pub final_residual: f64,
    pub max_diff_vs_shooting: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct GroundStateRecord {
    pub config_digest: String,
    pub lambda0: f64,
    pub u0_max: f64,
    pub fixed_point_residual: f64,
    pub grid_intervals: usize,
    pub morse: MorseSummary,
    pub nondegeneracy: NondegeneracyReport,
    pub v0_at_center: f64,
    pub sign_condition: f64,
    pub v00_margin: f64,
    pub v00_tol: f64,
    pub theorem_case: TheoremCase,
    pub hessian_scalar: f64,
    pub hessian_negative: bool,
    pub assumptions_ok: bool,
    pub assumption_error: Option<String>,
    pub constants: Option<ReducedEnergyConstants>,
    pub recomputed_law: Option<RecomputedLaw>,
    pub pohozaev: PohozaevAudit,
    pub strong_defect: f64,
    pub collocation: Option<CollocationCheck>,
}

pub fn cmd_ground_state(ctx: &Context, manifest: &mut RunManifest) -> Result<i32> {
    let t = std::time::Instant::now();
    let l0 = ctx.read("lambda0", LAMBDA0_JSON)?;
    let lambda0 = l0["lambda0"]
        .as_f64()
        .ok_or_else(|| Error::parse(LAMBDA0_JSON, "lambda0 missing"))?;
    let settings = &ctx.settings;
    let gs = solve_positive(lambda0, &ctx.dom, settings)?;
    let nondeg = nondegeneracy(&gs, settings)?;
    let v0 = solve_v0(&gs, &ctx.dom, settings)?;
    let v00 = v0.value(0.0);
    let sign_condition = 1.0 - 2.0 * v00;
    let assumption = if !nondeg.nondegenerate {
        let (ell, mu) = nondeg
            .per_sector
            .iter()
            .copied()
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("sectors");
        Some(Error::DegenerateLinearization {
            ell,
            mu,
            tol: settings.tol_eig,
        })
    } else if sign_condition.abs() < settings.v00_tol {
        Some(Error::AssumptionV00Violated {
            margin: sign_condition.abs(),
            tol: settings.v00_tol,
        })
    } else {
        None
    };
    let constants = match assumption {
        None => Some(compute_constants(&gs, &v0, settings)?),
        Some(_) => None,
    };
    let collocation = solve_positive_collocated(&gs, settings.grid_n, settings).ok().map(|c| CollocationCheck {
        iterations: c.iterations,
        final_residual: c.final_residual(),
        max_diff_vs_shooting: c
            .profile
            .values
            .iter()
            .zip(&gs.profile.values)
            .fold(0.0, |m: f64, (a, b)| m.max((a - b).abs())),
    });
    let rec = GroundStateRecord {
        config_digest: ctx.digest.clone(),
        lambda0,
        u0_max: gs.max_value,
        fixed_point_residual: (lambda0 - 2.0 * gs.max_value).abs(),
        grid_intervals: gs.profile.intervals(),
        morse: gs.morse_data.clone(),
        nondegeneracy: nondeg,
        v0_at_center: v00,
        sign_condition,
        v00_margin: sign_condition.abs(),
        v00_tol: settings.v00_tol,
        theorem_case: TheoremCase::from_sign_condition(sign_condition),
        hessian_scalar: gs.profile.d2(0.0),
        hessian_negative: gs.profile.d2(0.0) < 0.0,
        assumptions_ok: assumption.is_none(),
        assumption_error: assumption.as_ref().map(|e| e.to_string()),
        recomputed_law: constants.as_ref().map(RecomputedLaw::new),
        constants,
        pohozaev: pohozaev_audit(&gs.profile, lambda0, settings.quad_tol)?,
        strong_defect: strong_defect(&gs.profile, lambda0),
        collocation,
    };
    let mut out = StageWriter::new(&ctx.dir)?;
    out.write(U0_PROFILE, &gs.profile.to_text())?;
    out.write(V0_PROFILE, &v0.to_text())?;
    out.write_json(GROUND_STATE_JSON, &rec)?;
    out.finish(manifest, "ground-state", t.elapsed().as_secs_f64());
    println!(
        "u0(0) = {:.15}  morse index {}  nondegeneracy margin {:.3e}",
        rec.u0_max, rec.morse.index, rec.nondegeneracy.margin
    );
    println!(
        "v0(0) = {:.15}  1 - 2 v0(0) = {:.6}  case {}",
        v00,
        sign_condition,
        rec.theorem_case.as_str()
    );
    if let Some(c) = &rec.constants {
        println!("a1 = {:.12e}  a3 = {:.12e}  d0 = {:.12e}  R0 = {:.12e}", c.a1, c.a3, c.d0, c.r0);
    }
    match assumption {
        Some(e) => Err(e),
        None => Ok(0),
    }
}

/// Ground state, `v₀` and constants restored from the ground-state stage outputs.
pub struct Critical {
    pub gs: GroundState,
    pub v0: RadialProfile,
    pub constants: ReducedEnergyConstants,
    pub case: TheoremCase,
}

fn read_profile(dir: &Path, file: &str) -> Result<RadialProfile> {
    let path = dir.join(file);
    if !path.exists() {
        return Err(Error::MissingDependency {
            stage: "ground-state".into(),
            path,
        });
    }
    RadialProfile::read_file(&path)
}

pub fn load_critical(ctx: &Context) -> Result<Critical> {
    let rec = ctx.read("ground-state", GROUND_STATE_JSON)?;
    if rec["assumptions_ok"].as_bool() != Some(true) {
        let margin = rec["v00_margin"].as_f64().unwrap_or(f64::NAN);
        if margin.is_finite() && margin < ctx.settings.v00_tol {
            return Err(Error::AssumptionV00Violated {
                margin,
                tol: ctx.settings.v00_tol,
            });
        }
        let mu = rec["nondegeneracy"]["margin"].as_f64().unwrap_or(f64::NAN);
        return Err(Error::DegenerateLinearization {
            ell: 0,
            mu,
            tol: ctx.settings.tol_eig,
        });
    }
    let lambda0 = rec["lambda0"]
        .as_f64()
        .ok_or_else(|| Error::parse(GROUND_STATE_JSON, "lambda0 missing"))?;
    let u = read_profile(&ctx.dir, U0_PROFILE)?;
    let v = read_profile(&ctx.dir, V0_PROFILE)?;
    let gs = ground_state_from_samples(u.nodes, u.values, u.derivs, lambda0)?;
    let v0 = v0_from_samples(&gs, v.values, v.derivs)?;
    let constants = compute_constants(&gs, &v0, &ctx.settings)?;
    let case = TheoremCase::from_sign_condition(constants.sign_condition);
    Ok(Critical {
        gs,
        v0,
        constants,
        case,
    })
}

// ---------------------------------------------------------------- expansion

#[derive(Debug, Clone, Serialize)]
pub struct SampleRow {
    #[serde(flatten)]
    pub sample: ExpansionSample,
    pub d_over_d0: f64,
    pub upsilon_recomputed: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct EpsSummary {
    pub eps: f64,
    pub argmax_d: f64,
    pub argmax_d_over_d0: f64,
    pub rel_error_at_d0: f64,
    pub max_rel_error_half_to_double: f64,
    pub residual_ratio_at_d0: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ITermRow {
    #[serde(flatten)]
    pub terms: ITerms,
    pub i4_ratio: f64,
    pub i5_ratio: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CrossoverRow {
    pub eps: f64,
    pub delta: f64,
    pub radius: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExpansionRecord {
    pub config_digest: String,
    pub theorem_case: TheoremCase,
    pub d0: f64,
    pub grid_step_over_d0: f64,
    pub samples: Vec<SampleRow>,
    pub per_eps: Vec<EpsSummary>,
    pub i_terms: Vec<ITermRow>,
    pub i4_prediction: f64,
    pub i5_prediction: f64,
    pub i6_order: f64,
    pub i7_order: f64,
    pub crossover: Vec<CrossoverRow>,
    pub crossover_limit: f64,
    pub r0: f64,
    pub recomputed_law: RecomputedLaw,
}

/// Signed sweep values in the theorem-case sign.
pub fn signed(mags: &[f64], sign: f64) -> Vec<f64> {
    mags.iter().map(|e| sign * e.abs()).collect()
}

fn summarize(samples: &[SampleRow], d0: f64) -> Vec<EpsSummary> {
    let mut out = Vec::new();
    let mut i = 0;
    while i < samples.len() {
        let eps = samples[i].sample.eps;
        let group: Vec<&SampleRow> = samples[i..].iter().take_while(|s| s.sample.eps == eps).collect();
        i += group.len();
        let best = group
            .iter()
            .max_by(|a, b| a.sample.upsilon_measured.total_cmp(&b.sample.upsilon_measured))
            .expect("group");
        let at_d0 = group
            .iter()
            .min_by(|a, b| (a.d_over_d0 - 1.0).abs().total_cmp(&(b.d_over_d0 - 1.0).abs()))
            .expect("group");
        let err = |s: &SampleRow| {
            (s.sample.upsilon_measured - s.sample.upsilon_predicted).abs() / s.sample.upsilon_predicted.abs()
        };
        let max_err = group
            .iter()
            .filter(|s| s.d_over_d0 >= 0.5 - 1e-12 && s.d_over_d0 <= 2.0 + 1e-12)
            .fold(0.0, |m: f64, s| m.max(err(s)));
        out.push(EpsSummary {
            eps,
            argmax_d: best.sample.d,
            argmax_d_over_d0: best.sample.d / d0,
            rel_error_at_d0: err(at_d0),
            max_rel_error_half_to_double: max_err,
            residual_ratio_at_d0: at_d0.sample.residual_ratio,
        });
    }
    out
}

pub fn expansion_record(ctx: &Context, crit: &Critical) -> Result<ExpansionRecord> {
    let (gs, v0, c) = (&crit.gs, &crit.v0, &crit.constants);
    let sign = crit.case.sign();
    let eps_list = signed(&ctx.cfg.eps_sweep, sign);
    let d_grid: Vec<f64> = ctx.cfg.d_grid.iter().map(|m| m * c.d0).collect();
    let law = RecomputedLaw::new(c);
    let raw = expansion_check(gs, v0, c, &eps_list, &d_grid, &ctx.settings)?;
    let samples: Vec<SampleRow> = raw
        .into_iter()
        .map(|s| SampleRow {
            d_over_d0: s.d / c.d0,
            upsilon_recomputed: law.upsilon(s.d, s.eps),
            sample: s,
        })
        .collect();
    let per_eps = summarize(&samples, c.d0);

    let mut sweep = eps_list.clone();
    sweep.sort_by(|a, b| b.abs().total_cmp(&a.abs()));
    let i_terms: Vec<ITermRow> = sweep
        .par_iter()
        .map(|&e| {
            let t = i_term_audit(gs, v0, e, c.d0, &ctx.settings)?;
            Ok(ITermRow {
                i4_ratio: t.i4_ratio(),
                i5_ratio: t.i5_ratio(),
                terms: t,
            })
        })
        .collect::<Result<_>>()?;
    let mags: Vec<f64> = i_terms.iter().map(|t| t.terms.eps.abs()).collect();
    let i6: Vec<f64> = i_terms.iter().map(|t| t.terms.i6.abs()).collect();
    let i7: Vec<f64> = i_terms.iter().map(|t| t.terms.i7.abs()).collect();

    let crossover: Vec<CrossoverRow> = sweep
        .par_iter()
        .map(|&e| {
            let b = assemble_ansatz(gs, v0, e, c.d0, &ctx.settings)?;
            let radius = crossover_radius(&b, gs, v0).unwrap_or(f64::NAN);
            Ok(CrossoverRow {
                eps: e,
                delta: b.delta(),
                radius,
                ratio: radius / b.delta().sqrt(),
            })
        })
        .collect::<Result<_>>()?;
    let crossover_limit = crate::numerics::fit_line(
        &crossover.iter().map(|r| r.delta).collect::<Vec<_>>(),
        &crossover.iter().map(|r| r.ratio).collect::<Vec<_>>(),
    )
    .map(|f| f.intercept)
    .unwrap_or(f64::NAN);

    let step = ctx
        .cfg
        .d_grid
        .windows(2)
        .map(|w| (w[1] - w[0]).abs())
        .fold(0.0, f64::max);
    Ok(ExpansionRecord {
        config_digest: ctx.digest.clone(),
        theorem_case: crit.case,
        d0: c.d0,
        grid_step_over_d0: step,
        samples,
        per_eps,
        i4_prediction: i4_prediction(c),
        i5_prediction: i5_prediction(c),
        i6_order: log_log_slope(&mags, &i6).unwrap_or(f64::NAN),
        i7_order: log_log_slope(&mags, &i7).unwrap_or(f64::NAN),
        i_terms,
        crossover,
        crossover_limit,
        r0: c.r0,
        recomputed_law: law,
    })
}

fn expansion_plot(rec: &ExpansionRecord, c: &ReducedEnergyConstants) -> Plot {
    let mut series = Vec::new();
    for s in &rec.per_eps {
        series.push(Series {
            name: format!("measured eps={:.2e}", s.eps),
            points: rec
                .samples
                .iter()
                .filter(|r| r.sample.eps == s.eps)
                .map(|r| [r.sample.d, r.sample.upsilon_measured])
                .collect(),
            style: Style::Markers,
        });
    }
    let (lo, hi) = rec
        .samples
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(a, b), r| (a.min(r.sample.d), b.max(r.sample.d)));
    let sign = rec.theorem_case.sign();
    let fine: Vec<f64> = (0..=100).map(|k| lo + (hi - lo) * k as f64 / 100.0).collect();
    series.push(Series {
        name: "reduced energy law".into(),
        points: fine
            .iter()
            .map(|&d| [d, crate::critical_data::upsilon(d, &ORIGIN, sign, c)])
            .collect(),
        style: Style::Line,
    });
    series.push(Series {
        name: "recomputed law".into(),
        points: fine.iter().map(|&d| [d, rec.recomputed_law.upsilon(d, sign)]).collect(),
        style: Style::Dashed,
    });
    Plot {
        title: "(J(W) - c0) / |eps|^3 against d".into(),
        x_label: "d".into(),
        y_label: "upsilon".into(),
        series,
        ..Plot::default()
    }
}

pub fn cmd_expansion(ctx: &Context, manifest: &mut RunManifest) -> Result<i32> {
    let t = std::time::Instant::now();
    let crit = load_critical(ctx)?;
    let rec = expansion_record(ctx, &crit)?;
    let rows: Vec<Vec<CsvCell>> = rec
        .samples
        .iter()
        .map(|r| {
            let s = &r.sample;
            [s.eps, s.d, s.j_value, s.c0, s.upsilon_measured, s.upsilon_predicted, s.residual_l32, s.residual_ratio]
                .into_iter()
                .map(CsvCell::F)
                .collect()
        })
        .collect();
    let csv = to_csv(
        &["eps", "d", "J", "c0", "upsilon_measured", "upsilon_predicted", "residual_l32", "residual_ratio"],
        &rows,
    );
    let mut out = StageWriter::new(&ctx.dir)?;
    out.write("expansion.csv", &csv)?;
    out.write_json(EXPANSION_JSON, &rec)?;
    out.write("expansion.svg", &expansion_plot(&rec, &crit.constants).render())?;
    out.finish(manifest, "expansion", t.elapsed().as_secs_f64());
    println!("{:>12} {:>12} {:>12} {:>12}", "eps", "argmax/d0", "err@d0", "res ratio");
    for s in &rec.per_eps {
        println!(
            "{:>12.4e} {:>12.4} {:>12.4e} {:>12.4e}",
            s.eps, s.argmax_d_over_d0, s.rel_error_at_d0, s.residual_ratio_at_d0
        );
    }
    Ok(0)
}

// ---------------------------------------------------------------- branch

#[derive(Debug, Clone, Serialize)]
pub struct BranchRun {
    pub eps_sign: f64,
    pub d_start: f64,
    pub rate_reference: f64,
    pub seed: Option<BranchPoint>,
    pub seed_error: Option<String>,
    pub seed_attempts: Vec<String>,
    pub points: Vec<BranchPoint>,
    pub stall: Option<String>,
    pub fit: Option<RateFit>,
    pub fit_error: Option<String>,
    pub remainder_slope: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct BranchRecord {
    pub config_digest: String,
    pub theorem_case: TheoremCase,
    pub d0: f64,
    pub d_star: f64,
    /// Continuation in the theorem-case sign of ε, seeded near `d₀`.
    pub theorem_branch: BranchRun,
    /// The opposite sign, seeded near the recomputed rate, for comparison.
    pub opposite_branch: BranchRun,
}

pub fn run_branch(
    crit: &Critical,
    sign: f64,
    d_start: f64,
    rate_reference: f64,
    cfg: &RunConfig,
    settings: &Settings,
) -> BranchRun {
    let (gs, v0) = (&crit.gs, &crit.v0);
    let mut mags = cfg.branch_eps.iter().map(|e| e.abs()).collect::<Vec<_>>();
    mags.sort_by(|a, b| b.total_cmp(a));
    mags.dedup();
    let eps0 = sign * cfg.seed_overrides.eps0.map(f64::abs).unwrap_or(mags[0]);
    let mut run = BranchRun {
        eps_sign: sign,
        d_start,
        rate_reference,
        seed: None,
        seed_error: None,
        seed_attempts: Vec::new(),
        points: Vec::new(),
        stall: None,
        fit: None,
        fit_error: None,
        remainder_slope: None,
    };
    let seed = match seed_branch_from(gs, v0, d_start, eps0, settings) {
        Ok(p) => p,
        Err(e) => {
            if let Error::SeedFailure { attempts } = &e {
                run.seed_attempts = attempts.clone();
            }
            run.seed_error = Some(e.to_string());
            return run;
        }
    };
    let targets: Vec<f64> = mags
        .iter()
        .filter(|m| **m <= seed.eps.abs())
        .map(|m| sign * m)
        .collect();
    let mut points = match continue_branch(seed.clone(), &targets, gs, v0, settings) {
        Ok(p) => p,
        Err(Error::BranchStall { eps, partial }) => {
            run.stall = Some(format!("continuation stalled at eps = {eps:e}"));
            partial
        }
        Err(e) => {
            run.stall = Some(e.to_string());
            Vec::new()
        }
    };
    if !points.iter().any(|p| p.eps == seed.eps) {
        points.insert(0, seed.clone());
    }
    run.seed = Some(seed);
    match fit_blowup_rate(&points, rate_reference) {
        Ok(f) => run.fit = Some(f),
        Err(e) => run.fit_error = Some(e.to_string()),
    }
    run.remainder_slope = if points.len() >= 2 { remainder_slope(&points) } else { None };
    run.points = points;
    run
}

fn branch_csv(points: &[BranchPoint]) -> String {
    let mut sorted = points.to_vec();
    sorted.sort_by(|a, b| b.eps.abs().total_cmp(&a.eps.abs()));
    let rows: Vec<Vec<CsvCell>> = sorted
        .iter()
        .map(|p| {
            vec![
                CsvCell::F(p.eps),
                CsvCell::F(p.lambda),
                CsvCell::F(p.u_min),
                CsvCell::F(p.delta_extracted),
                CsvCell::F(p.delta_over_abs_eps()),
                CsvCell::I(p.node_count),
                CsvCell::F(p.newton_residual),
                CsvCell::F(p.phi_norm_proxy),
            ]
        })
        .collect();
    to_csv(
        &["eps", "lambda", "u_min", "delta", "delta_over_abs_eps", "nodes", "newton_residual", "phi_norm_proxy"],
        &rows,
    )
}

fn branch_plot(rec: &BranchRecord, cfg: &RunConfig) -> Plot {
    let mags: Vec<f64> = cfg.branch_eps.iter().map(|e| e.abs()).collect();
    let (lo, hi) = mags.iter().fold((f64::INFINITY, 0.0f64), |(a, b), m| (a.min(*m), b.max(*m)));
    let line = |d: f64| vec![[lo, d * lo], [hi, d * hi]];
    let pts = |r: &BranchRun| r.points.iter().map(|p| [p.eps.abs(), p.delta_extracted]).collect();
    Plot {
        title: "concentration scale along the branch".into(),
        x_label: "|eps|".into(),
        y_label: "delta".into(),
        log_x: true,
        log_y: true,
        series: vec![
            Series {
                name: format!("{} branch", rec.theorem_case.as_str()),
                points: pts(&rec.theorem_branch),
                style: Style::Markers,
            },
            Series {
                name: "opposite sign".into(),
                points: pts(&rec.opposite_branch),
                style: Style::Markers,
            },
            Series {
                name: "d0 |eps|".into(),
                points: line(rec.d0),
                style: Style::Line,
            },
            Series {
                name: "d* |eps|".into(),
                points: line(rec.d_star),
                style: Style::Dashed,
            },
        ],
    }
}

pub fn cmd_branch(ctx: &Context, manifest: &mut RunManifest) -> Result<i32> {
    let t = std::time::Instant::now();
    let crit = load_critical(ctx)?;
    let c = &crit.constants;
    let law = RecomputedLaw::new(c);
    let sign = crit.case.sign();
    let d_start = ctx.cfg.seed_overrides.d.unwrap_or(c.d0);
    let (theorem_branch, opposite_branch) = rayon::join(
        || run_branch(&crit, sign, d_start, c.d0, &ctx.cfg, &ctx.settings),
        || run_branch(&crit, -sign, law.d_star, law.d_star, &ctx.cfg, &ctx.settings),
    );
    let rec = BranchRecord {
        config_digest: ctx.digest.clone(),
        theorem_case: crit.case,
        d0: c.d0,
        d_star: law.d_star,
        theorem_branch,
        opposite_branch,
    };
    let mut out = StageWriter::new(&ctx.dir)?;
    out.write("branch.csv", &branch_csv(&rec.theorem_branch.points))?;
    out.write("branch_opposite.csv", &branch_csv(&rec.opposite_branch.points))?;
    out.write_json(BRANCH_JSON, &rec)?;
    out.write("branch.svg", &branch_plot(&rec, &ctx.cfg).render())?;
    out.finish(manifest, "branch", t.elapsed().as_secs_f64());
    for (name, r) in [("theorem-case", &rec.theorem_branch), ("opposite", &rec.opposite_branch)] {
        match (&r.seed_error, &r.fit) {
            (Some(e), _) => println!("{name} branch (sign {:+}): {e}", r.eps_sign),
            (None, Some(f)) => println!(
                "{name} branch (sign {:+}): {} points, d fitted {:.6e} vs {:.6e}, r^2 {:.6}",
                r.eps_sign,
                r.points.len(),
                f.d_fitted,
                r.rate_reference,
                f.r_squared
            ),
            (None, None) => println!(
                "{name} branch (sign {:+}): {} points, {}",
                r.eps_sign,
                r.points.len(),
                r.fit_error.as_deref().unwrap_or("no fit")
            ),
        }
    }
    if rec.theorem_branch.seed_error.is_some() {
        eprintln!("no branch could be seeded in the theorem-case sign of eps");
        return Ok(4);
    }
    Ok(0)
}

// ---------------------------------------------------------------- report

pub fn cmd_report(ctx: &Context, manifest: &mut RunManifest) -> Result<i32> {
    let t = std::time::Instant::now();
    let inputs = super::verdicts::Inputs {
        constants: ctx.read("constants", CONSTANTS_JSON)?,
        lambda0: ctx.read("lambda0", LAMBDA0_JSON)?,
        ground_state: ctx.read("ground-state", GROUND_STATE_JSON)?,
        expansion: ctx.read("expansion", EXPANSION_JSON)?,
        branch: ctx.read("branch", BRANCH_JSON)?,
    };
    let mut verdicts = super::verdicts::evaluate(&inputs, &ctx.cfg);
    verdicts.push(super::verdicts::determinism(ctx, manifest)?);
    let table = super::verdicts::table(&verdicts);
    #[derive(Serialize)]
    struct ReportRecord<'a> {
        config_digest: &'a str,
        verdicts: &'a [super::output::Verdict],
        all_pass: bool,
    }
    let all_pass = verdicts.iter().all(|v| v.pass);
    let mut out = StageWriter::new(&ctx.dir)?;
    out.write("report.txt", &table)?;
    out.write_json(
        "report.json",
        &ReportRecord {
            config_digest: &ctx.digest,
            verdicts: &verdicts,
            all_pass,
        },
    )?;
    out.finish(manifest, "report", t.elapsed().as_secs_f64());
    manifest.verdicts = verdicts;
    print!("{table}");
    Ok(if all_pass { 0 } else { 1 })
}

/// Serialized constants as `cmd_constants` would write them, for byte comparison.
pub fn constants_bytes(ctx: &Context) -> Result<String> {
    to_json(&constants_record(ctx)?)
}
