//! Adaptive Dormand-Prince 5(4) integration for small fixed-size systems.

use crate::error::{Error, Result};

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

#[derive(Debug, Clone, Copy)]
pub struct Dopri5 {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
}

impl Default for Dopri5 {
    fn default() -> Self {
        Self {
            rtol: 1e-12,
            atol: 1e-14,
            max_steps: 2_000_000,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Trajectory<const N: usize> {
    /// State at each requested output point.
    pub states: Vec<[f64; N]>,
    /// Sign changes of the first component over accepted steps.
    pub sign_changes: usize,
    pub steps: usize,
}

#[inline]
fn axpy<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    let mut out = *y;
    for i in 0..N {
        let mut acc = 0.0;
        for (c, k) in terms {
            acc += c * k[i];
        }
        out[i] += h * acc;
    }
    out
}

impl Dopri5 {
    pub fn with_tolerances(rtol: f64, atol: f64) -> Self {
        Self {
            rtol,
            atol,
            ..Self::default()
        }
    }

    /// Integrates `y' = f(r, y)` from `(r0, y0)` through the ascending `outputs`,
    /// landing exactly on each one.
    pub fn integrate<const N: usize, F>(&self, f: F, r0: f64, y0: [f64; N], outputs: &[f64]) -> Result<Trajectory<N>>
    where
        F: Fn(f64, &[f64; N]) -> [f64; N],
    {
        self.integrate_observed(f, |_, y| y[0], r0, y0, outputs)
    }

    /// As `integrate`, with `sign_changes` counted for `observe(r, y)` instead of `y[0]`.
    pub fn integrate_observed<const N: usize, F, G>(
        &self,
        f: F,
        observe: G,
        r0: f64,
        y0: [f64; N],
        outputs: &[f64],
    ) -> Result<Trajectory<N>>
    where
        F: Fn(f64, &[f64; N]) -> [f64; N],
        G: Fn(f64, &[f64; N]) -> f64,
    {
        let mut states = Vec::with_capacity(outputs.len());
        let mut r = r0;
        let mut y = y0;
        let mut k1 = f(r, &y);
        let span = outputs.last().map_or(0.0, |&e| e - r0).abs().max(f64::MIN_POSITIVE);
        let mut h = (0.1 * r0.abs()).max(1e-6 * span).min(0.01 * span);
        let mut steps = 0;
        let mut sign_changes = 0;
        let first = observe(r, &y);
        let mut last_sign = if first == 0.0 { 0.0 } else { first.signum() };

        for &target in outputs {
            if target < r {
                return Err(Error::InvalidParameter(format!(
                    "output point {target} precedes current position {r}"
                )));
            }
            while r < target {
                if steps >= self.max_steps {
                    return Err(Error::InvalidParameter(format!(
                        "integration exceeded {} steps near r = {r}",
                        self.max_steps
                    )));
                }
                let remaining = target - r;
                let last = h >= remaining;
                let hs = if last { remaining } else { h };

                let k2 = f(r + C2 * hs, &axpy(&y, hs, &[(A21, &k1)]));
                let k3 = f(r + C3 * hs, &axpy(&y, hs, &[(A31, &k1), (A32, &k2)]));
                let k4 = f(r + C4 * hs, &axpy(&y, hs, &[(A41, &k1), (A42, &k2), (A43, &k3)]));
                let k5 = f(
                    r + C5 * hs,
                    &axpy(&y, hs, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
                );
                let k6 = f(
                    r + hs,
                    &axpy(&y, hs, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]),
                );
                let y_new = axpy(&y, hs, &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)]);
                let r_new = if last { target } else { r + hs };
                let k7 = f(r_new, &y_new);

                let mut err = 0.0;
                for i in 0..N {
                    let e = hs
                        * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
                    let sc = self.atol + self.rtol * y[i].abs().max(y_new[i].abs());
                    err += (e / sc).powi(2);
                }
                let err = (err / N as f64).sqrt();
                steps += 1;

                if !err.is_finite() {
                    h = 0.25 * hs;
                    continue;
                }
                if err <= 1.0 {
                    r = r_new;
                    y = y_new;
                    k1 = k7;
                    let o = observe(r, &y);
                    let s = o.signum();
                    if o != 0.0 {
                        if last_sign != 0.0 && s != last_sign {
                            sign_changes += 1;
                        }
                        last_sign = s;
                    }
                    let grow = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
                    // keep the step proposal from the full step when we only clipped to hit a target
                    h = if last { h.max(hs * grow) } else { hs * grow };
                } else {
                    h = hs * (0.9 * err.powf(-0.2)).clamp(0.1, 0.9);
                }
            }
            states.push(y);
        }
        Ok(Trajectory {
            states,
            sign_changes,
            steps,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_oscillator() {
        let ode = Dopri5::default();
        let outs: Vec<f64> = (1..=10).map(|k| k as f64).collect();
        let tr = ode
            .integrate(|_, y: &[f64; 2]| [y[1], -y[0]], 0.0, [0.0, 1.0], &outs)
            .unwrap();
        for (t, s) in outs.iter().zip(&tr.states) {
            assert!((s[0] - t.sin()).abs() < 1e-10);
            assert!((s[1] - t.cos()).abs() < 1e-10);
        }
        // zeros of sin on (0, 10]: pi, 2pi, 3pi
        assert_eq!(tr.sign_changes, 3);
    }

    #[test]
    fn rejects_backward_outputs() {
        let ode = Dopri5::default();
        let r = ode.integrate(|_, y: &[f64; 1]| [y[0]], 1.0, [1.0], &[0.5]);
        assert!(r.is_err());
    }
}
