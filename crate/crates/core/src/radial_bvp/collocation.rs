//! Hermite-Simpson collocation of `u'' + 5u'/r + |u|u + λu = 0`, `u'(0) = 0`, `u(R) = 0`
//! with damped Newton on the banded system.

use crate::error::{Error, Result};
use crate::numerics::BandMatrix;
use crate::profile::RadialProfile;

use super::shooting::{g, g_prime};

#[derive(Debug, Clone)]
pub struct CollocationSolution {
    pub profile: RadialProfile,
    pub iterations: usize,
    /// Scaled max-norm defect before each Newton step and after the last.
    pub residual_history: Vec<f64>,
    pub node_count: usize,
}

impl CollocationSolution {
    pub fn final_residual(&self) -> f64 {
        self.residual_history.last().copied().unwrap_or(f64::NAN)
    }
}

type M2 = [[f64; 2]; 2];

#[inline]
fn rhs(r: f64, y: [f64; 2], lambda: f64) -> [f64; 2] {
    if r == 0.0 {
        [y[1], -g(y[0], lambda) / 6.0]
    } else {
        [y[1], -5.0 * y[1] / r - g(y[0], lambda)]
    }
}

#[inline]
fn jac(r: f64, y: [f64; 2], lambda: f64) -> M2 {
    if r == 0.0 {
        [[0.0, 1.0], [-g_prime(y[0], lambda) / 6.0, 0.0]]
    } else {
        [[0.0, 1.0], [-g_prime(y[0], lambda), -5.0 / r]]
    }
}

#[inline]
fn mm(a: &M2, b: &M2) -> M2 {
    [
        [a[0][0] * b[0][0] + a[0][1] * b[1][0], a[0][0] * b[0][1] + a[0][1] * b[1][1]],
        [a[1][0] * b[0][0] + a[1][1] * b[1][0], a[1][0] * b[0][1] + a[1][1] * b[1][1]],
    ]
}

struct System<'a> {
    nodes: &'a [f64],
    lambda: f64,
}

impl System<'_> {
    fn n(&self) -> usize {
        self.nodes.len() - 1
    }

    fn state(y: &[f64], i: usize) -> [f64; 2] {
        [y[2 * i], y[2 * i + 1]]
    }

    /// Residual vector and per-row scales.
    fn residual(&self, y: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let n = self.n();
        let mut res = vec![0.0; 2 * n + 2];
        let mut scale = vec![1.0; 2 * n + 2];
        res[0] = y[1];
        scale[0] = 1.0 + y[1].abs();
        for i in 0..n {
            let (a, b) = (self.nodes[i], self.nodes[i + 1]);
            let h = b - a;
            let yi = Self::state(y, i);
            let yj = Self::state(y, i + 1);
            let fi = rhs(a, yi, self.lambda);
            let fj = rhs(b, yj, self.lambda);
            let ym = [
                0.5 * (yi[0] + yj[0]) + h / 8.0 * (fi[0] - fj[0]),
                0.5 * (yi[1] + yj[1]) + h / 8.0 * (fi[1] - fj[1]),
            ];
            let fm = rhs(0.5 * (a + b), ym, self.lambda);
            for c in 0..2 {
                res[1 + 2 * i + c] = yj[c] - yi[c] - h / 6.0 * (fi[c] + 4.0 * fm[c] + fj[c]);
                scale[1 + 2 * i + c] = 1.0 + yi[c].abs().max(yj[c].abs());
            }
        }
        res[2 * n + 1] = y[2 * n];
        scale[2 * n + 1] = 1.0;
        (res, scale)
    }

    fn jacobian(&self, y: &[f64]) -> BandMatrix {
        let n = self.n();
        let mut m = BandMatrix::zeros(2 * n + 2, 2, 2);
        m.add(0, 1, 1.0);
        for i in 0..n {
            let (a, b) = (self.nodes[i], self.nodes[i + 1]);
            let h = b - a;
            let yi = Self::state(y, i);
            let yj = Self::state(y, i + 1);
            let fi = rhs(a, yi, self.lambda);
            let fj = rhs(b, yj, self.lambda);
            let ji = jac(a, yi, self.lambda);
            let jj = jac(b, yj, self.lambda);
            let ym = [
                0.5 * (yi[0] + yj[0]) + h / 8.0 * (fi[0] - fj[0]),
                0.5 * (yi[1] + yj[1]) + h / 8.0 * (fi[1] - fj[1]),
            ];
            let jm = jac(0.5 * (a + b), ym, self.lambda);
            // d ym / d yi = I/2 + h/8 Ji,  d ym / d yj = I/2 - h/8 Jj
            let mut dmi = [[0.0; 2]; 2];
            let mut dmj = [[0.0; 2]; 2];
            for p in 0..2 {
                for q in 0..2 {
                    let id = if p == q { 0.5 } else { 0.0 };
                    dmi[p][q] = id + h / 8.0 * ji[p][q];
                    dmj[p][q] = id - h / 8.0 * jj[p][q];
                }
            }
            let jmi = mm(&jm, &dmi);
            let jmj = mm(&jm, &dmj);
            for p in 0..2 {
                let row = 1 + 2 * i + p;
                for q in 0..2 {
                    let id = if p == q { 1.0 } else { 0.0 };
                    let di = -id - h / 6.0 * (ji[p][q] + 4.0 * jmi[p][q]);
                    let dj = id - h / 6.0 * (jj[p][q] + 4.0 * jmj[p][q]);
                    m.add(row, 2 * i + q, di);
                    m.add(row, 2 * (i + 1) + q, dj);
                }
            }
        }
        m.add(2 * n + 1, 2 * n, 1.0);
        m
    }
}

fn merit(res: &[f64], scale: &[f64]) -> f64 {
    res.iter().zip(scale).fold(0.0, |m, (r, s)| m.max(r.abs() / s))
}

fn l2(res: &[f64], scale: &[f64]) -> f64 {
    res.iter().zip(scale).map(|(r, s)| (r / s) * (r / s)).sum::<f64>().sqrt()
}

fn to_profile(nodes: &[f64], y: &[f64], lambda: f64) -> Result<RadialProfile> {
    let n = nodes.len();
    let mut values = Vec::with_capacity(n);
    let mut derivs = Vec::with_capacity(n);
    let mut second = Vec::with_capacity(n);
    for (i, &r) in nodes.iter().enumerate() {
        let s = [y[2 * i], y[2 * i + 1]];
        values.push(s[0]);
        derivs.push(s[1]);
        second.push(rhs(r, s, lambda)[1]);
    }
    RadialProfile::new(nodes.to_vec(), values, derivs, second)
}

/// Scaled max-norm defect of the collocated system at the nodal values of `profile`.
pub fn defect(lambda: f64, profile: &RadialProfile) -> f64 {
    let sys = System {
        nodes: &profile.nodes,
        lambda,
    };
    let y: Vec<f64> = profile
        .values
        .iter()
        .zip(&profile.derivs)
        .flat_map(|(&u, &p)| [u, p])
        .collect();
    let (res, scale) = sys.residual(&y);
    merit(&res, &scale)
}

/// Damped Newton on the collocated system, starting from `init` on its own mesh.
pub fn collocate(lambda: f64, init: &RadialProfile, newton_tol: f64, max_iter: usize) -> Result<CollocationSolution> {
    let nodes = &init.nodes;
    let sys = System { nodes, lambda };
    let mut y: Vec<f64> = init
        .values
        .iter()
        .zip(&init.derivs)
        .flat_map(|(&u, &p)| [u, p])
        .collect();
    let (mut res, scale) = sys.residual(&y);
    let mut current = merit(&res, &scale);
    let mut history = vec![current];
    for it in 1..=max_iter {
        let jm = sys.jacobian(&y);
        let rhs_vec: Vec<f64> = res.iter().map(|r| -r).collect();
        let dy = match jm.solve(&rhs_vec) {
            Ok(d) => d,
            Err(_) => break,
        };
        // Armijo on the 2-norm with the row scales frozen at the current iterate, for which
        // the Newton step is always a descent direction.
        let (_, cur_scale) = sys.residual(&y);
        let base = l2(&res, &cur_scale);
        let mut step = 1.0;
        let mut accepted = None;
        for _ in 0..30 {
            let trial: Vec<f64> = y.iter().zip(&dy).map(|(a, b)| a + step * b).collect();
            let (tr, ts) = sys.residual(&trial);
            let m = merit(&tr, &ts);
            let f = l2(&tr, &cur_scale);
            if m.is_finite() && f.is_finite() && (f <= (1.0 - 1e-4 * step) * base || m < 1e-13) {
                accepted = Some((trial, tr, m));
                break;
            }
            step *= 0.5;
        }
        let Some((trial, tr, m)) = accepted else {
            break;
        };
        let weighted = dy
            .iter()
            .zip(&y)
            .fold(0.0f64, |acc, (d, v)| acc.max((step * d).abs() / (1.0 + v.abs())));
        y = trial;
        res = tr;
        current = m;
        history.push(current);
        if weighted < newton_tol && step == 1.0 {
            let profile = to_profile(nodes, &y, lambda)?;
            let node_count = profile.node_count();
            return Ok(CollocationSolution {
                profile,
                iterations: it,
                residual_history: history,
                node_count,
            });
        }
    }
    Err(Error::ConvergenceFailure {
        last_iterate: Box::new(to_profile(nodes, &y, lambda)?),
        residual_history: history,
    })
}
