//! Acceptance verdicts computed from the stage outputs.

use std::fmt::Write as _;

use serde_json::Value;

use crate::error::Result;

use super::commands::{constants_bytes, Context, CONSTANTS_JSON};
use super::config::RunConfig;
use super::output::{sha256_hex, RunManifest, Verdict};

pub struct Inputs {
    pub constants: Value,
    pub lambda0: Value,
    pub ground_state: Value,
    pub expansion: Value,
    pub branch: Value,
}

fn num(v: &Value) -> f64 {
    v.as_f64().unwrap_or(f64::NAN)
}

fn arr(v: &Value) -> &[Value] {
    v.as_array().map(Vec::as_slice).unwrap_or(&[])
}

fn verdict(criterion: usize, title: &str, pass: bool, measured: String) -> Verdict {
    Verdict {
        criterion,
        title: title.into(),
        pass,
        measured,
    }
}

fn check_delta(constants: &Value, name: &str) -> f64 {
    arr(&constants["checks"])
        .iter()
        .find(|c| c["name"] == name)
        .map(|c| num(&c["relative_delta"]))
        .unwrap_or(f64::NAN)
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

/// Criteria 1 to 9; the determinism row is produced separately.
pub fn evaluate(inp: &Inputs, cfg: &RunConfig) -> Vec<Verdict> {
    let mut out = Vec::new();
    let c = &inp.constants;

    let alpha = num(&c["alpha6"]);
    let d_a1 = check_delta(c, "a1_over_omega6");
    let d_u3 = check_delta(c, "int_u3");
    out.push(verdict(
        1,
        "constants: a1/omega6 = 96, alpha6 = 24, int U^3",
        alpha == 24.0 && d_a1 < 1e-10 && d_u3 < 1e-8,
        format!("alpha6 = {alpha}, a1 delta = {d_a1:.2e}, int_u3 delta = {d_u3:.2e}"),
    ));

    let slope = num(&c["projection"]["slope"]);
    out.push(verdict(
        2,
        "projection expansion slope 4 +- 0.3",
        (slope - 4.0).abs() <= 0.3,
        format!("slope = {slope:.4}"),
    ));

    let eig = num(&c["dirichlet"]["abs_error"]);
    out.push(verdict(
        3,
        "first Dirichlet eigenvalue vs Bessel zero",
        eig < 1e-6,
        format!(
            "solver = {:.10}, oracle = {:.10}, error = {eig:.2e}",
            num(&c["dirichlet"]["lambda1_solver"]),
            num(&c["dirichlet"]["lambda1_bessel"])
        ),
    ));

    let l0 = &inp.lambda0;
    let gs = &inp.ground_state;
    let res = num(&l0["fixed_point_residual"]);
    let certified = l0["sign_certified"].as_bool() == Some(true);
    let margin = num(&gs["nondegeneracy"]["margin"]);
    let sectors = arr(&gs["nondegeneracy"]["per_sector"]).len();
    let v00 = num(&gs["v00_margin"]);
    out.push(verdict(
        4,
        "lambda0 fixed point and assumptions",
        certified && res < 1e-8 && margin > cfg.tol_eig && sectors >= 11 && v00 > 1e-4,
        format!(
            "lambda0 = {:.12}, residual = {res:.2e}, margin = {margin:.3e} over {sectors} sectors, |1-2v0(0)| = {v00:.4}",
            num(&l0["lambda0"])
        ),
    ));

    let e = &inp.expansion;
    let per_eps = arr(&e["per_eps"]);
    let in_range: Vec<f64> = per_eps
        .iter()
        .filter(|s| {
            let m = num(&s["eps"]).abs();
            (1e-3 * (1.0 - 1e-9)..=10f64.powf(-1.5) * (1.0 + 1e-9)).contains(&m)
        })
        .map(|s| num(&s["residual_ratio_at_d0"]))
        .collect();
    let (lo, hi) = in_range
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(a, b), v| (a.min(*v), b.max(*v)));
    let spread = hi / lo;
    out.push(verdict(
        5,
        "residual scaling eps^2 |ln eps|^(2/3)",
        in_range.len() >= 2 && spread < 2.0,
        format!("ratio spread = {spread:.4} over {} eps values", in_range.len()),
    ));

    let target = 10f64.powf(-2.5);
    let pick = per_eps
        .iter()
        .min_by(|a, b| {
            (num(&a["eps"]).abs().ln() - target.ln())
                .abs()
                .total_cmp(&(num(&b["eps"]).abs().ln() - target.ln()).abs())
        });
    let step = num(&e["grid_step_over_d0"]);
    let mut by_eps: Vec<(f64, f64)> = per_eps
        .iter()
        .map(|s| (num(&s["eps"]).abs(), (num(&s["argmax_d_over_d0"]) - 1.0).abs()))
        .collect();
    by_eps.sort_by(|a, b| b.0.total_cmp(&a.0));
    let converging = by_eps.last().map(|l| l.1 <= step + 1e-12).unwrap_or(false)
        && by_eps.windows(2).all(|w| w[1].1 <= w[0].1 + 1e-12);
    let (e6, err_d0, err_band) = pick
        .map(|s| (num(&s["eps"]), num(&s["rel_error_at_d0"]), num(&s["max_rel_error_half_to_double"])))
        .unwrap_or((f64::NAN, f64::NAN, f64::NAN));
    out.push(verdict(
        6,
        "reduced-energy law at eta = 0",
        err_d0 < 0.05 && err_band < 0.10 && converging,
        format!(
            "eps = {e6:.3e}: error at d0 = {err_d0:.3e}, max over [d0/2, 2d0] = {err_band:.3e}; |argmax/d0 - 1| by eps = [{}]",
            by_eps.iter().map(|p| format!("{:.3}", p.1)).collect::<Vec<_>>().join(", ")
        ),
    ));

    let iterms = arr(&e["i_terms"]);
    let smallest = iterms
        .iter()
        .min_by(|a, b| num(&a["eps"]).abs().total_cmp(&num(&b["eps"]).abs()));
    let (i4r, i5r) = smallest
        .map(|t| (num(&t["i4_ratio"]), num(&t["i5_ratio"])))
        .unwrap_or((f64::NAN, f64::NAN));
    let (i4p, i5p) = (num(&e["i4_prediction"]), num(&e["i5_prediction"]));
    let (o6, o7) = (num(&e["i6_order"]), num(&e["i7_order"]));
    let (g4, g5) = (rel(i4r, i4p), rel(i5r, i5p));
    out.push(verdict(
        7,
        "I-term audit",
        g5 < 0.10 && g4 < 0.05 && o6 >= 3.9 && o7 >= 3.9,
        format!(
            "I5 ratio {i5r:.6e} vs {i5p:.6e} (gap {g5:.3e}); I4 ratio {i4r:.6e} vs {i4p:.6e} (gap {g4:.3e}); orders I6 {o6:.3}, I7 {o7:.3}"
        ),
    ));

    let b = &inp.branch["theorem_branch"];
    let fit = &b["fit"];
    let r2 = num(&fit["r_squared"]);
    let gap = num(&fit["relative_gap"]);
    let rs = num(&b["remainder_slope"]);
    let npts = arr(&b["points"]).len();
    let seed_err = b["seed_error"].as_str();
    out.push(verdict(
        8,
        "branch: delta linear in |eps| with slope d0",
        !fit.is_null() && r2 > 0.99 && gap < 0.15 && rs >= 1.8,
        match seed_err {
            Some(err) => format!("no branch in the theorem-case sign: {err}"),
            None => format!(
                "{npts} points, d fitted = {:.6e}, d0 = {:.6e}, gap = {gap:.3e}, r^2 = {r2:.6}, remainder slope = {rs:.3}",
                num(&fit["d_fitted"]),
                num(&inp.branch["d0"])
            ),
        },
    ));

    let opp = &inp.branch["opposite_branch"]["fit"];
    if let Some(v) = out.last_mut() {
        if !opp.is_null() {
            let _ = write!(
                v.measured,
                "; opposite sign: d fitted = {:.6e} vs recomputed d* = {:.6e}",
                num(&opp["d_fitted"]),
                num(&inp.branch["d_star"])
            );
        }
    }

    let lim = num(&e["crossover_limit"]);
    let r0 = num(&e["r0"]);
    out.push(verdict(
        9,
        "sign-crossover radius / sqrt(delta) -> R0",
        rel(lim, r0) < 0.02,
        format!("limit = {lim:.6}, R0 = {r0:.6}, gap = {:.3e}", rel(lim, r0)),
    ));
    out
}

/// Stored hashes match the files on disk, and the constants stage reproduces its bytes.
pub fn determinism(ctx: &Context, manifest: &RunManifest) -> Result<Verdict> {
    let mut mismatched = Vec::new();
    let mut checked = 0;
    for files in manifest.stage_outputs.values() {
        for f in files {
            checked += 1;
            let ok = std::fs::read(ctx.dir.join(&f.name))
                .map(|b| sha256_hex(&b) == f.sha256)
                .unwrap_or(false);
            if !ok {
                mismatched.push(f.name.clone());
            }
        }
    }
    let stored = std::fs::read_to_string(ctx.dir.join(CONSTANTS_JSON)).unwrap_or_default();
    let rerun_same = constants_bytes(ctx)? == stored;
    Ok(verdict(
        10,
        "determinism",
        mismatched.is_empty() && rerun_same,
        format!(
            "{checked} recorded files, {} hash mismatches{}; constants rerun {}",
            mismatched.len(),
            if mismatched.is_empty() { String::new() } else { format!(" ({})", mismatched.join(", ")) },
            if rerun_same { "byte-identical" } else { "differs" }
        ),
    ))
}

pub fn table(verdicts: &[Verdict]) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{:<4} {:<6} {:<48} measured", "#", "result", "criterion");
    for v in verdicts {
        let _ = writeln!(
            s,
            "{:<4} {:<6} {:<48} {}",
            v.criterion,
            if v.pass { "PASS" } else { "FAIL" },
            v.title,
            v.measured
        );
    }
    let failed = verdicts.iter().filter(|v| !v.pass).count();
    let _ = writeln!(s, "{} of {} criteria pass", verdicts.len() - failed, verdicts.len());
    s
}
