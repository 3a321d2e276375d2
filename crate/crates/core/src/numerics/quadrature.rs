//! Gauss-Legendre and Gauss-Kronrod quadrature on finite panels.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = (n + 1) / 2;
        for i in 0..m {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            dp = if d != 0.0 { d } else { dp };
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    /// Integral of `f` over [a, b].
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F, a: f64, b: f64) -> f64 {
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(c + h * x))
            .sum::<f64>()
            * h
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let p = if n == 0 { 1.0 } else { p1 };
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p, d)
}

/// Composite Gauss-Legendre integration over consecutive panels, with panel-wise
/// refinement wherever an 8-point and a 12-point rule disagree.
pub struct PanelIntegrator {
    low: GaussLegendre,
    high: GaussLegendre,
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_depth: usize,
    /// Panel errors below `noise_floor` times the panel's absolute mass are accepted as
    /// rounding in the integrand.
    pub noise_floor: f64,
}

impl PanelIntegrator {
    pub fn new(rel_tol: f64, abs_tol: f64) -> Self {
        Self {
            low: GaussLegendre::new(8),
            high: GaussLegendre::new(12),
            rel_tol,
            abs_tol,
            max_depth: 24,
            noise_floor: 1e-13,
        }
    }

    pub fn with_noise_floor(mut self, floor: f64) -> Self {
        self.noise_floor = floor;
        self
    }

    /// Integrates `f` across the sorted breakpoints. Returns `QuadratureError` when the summed
    /// panel error estimates exceed the requested tolerance.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F, breakpoints: &[f64]) -> Result<f64> {
        // scale estimate for the relative tolerance
        let mass: Vec<f64> = breakpoints
            .windows(2)
            .map(|w| self.high.integrate(|x| f(x).abs(), w[0], w[1]))
            .collect();
        let coarse: f64 = mass.iter().sum();
        let tol = self.abs_tol.max(self.rel_tol * coarse);
        let width = breakpoints.last().copied().unwrap_or(0.0) - breakpoints.first().copied().unwrap_or(0.0);
        let mut total = 0.0;
        let mut compensation = 0.0;
        let mut err_total = 0.0;
        for (w, m) in breakpoints.windows(2).zip(&mass) {
            if w[1] <= w[0] {
                continue;
            }
            // half the budget follows the integrand's mass, half the panel width
            let frac = 0.5 * (m / coarse.max(f64::MIN_POSITIVE) + (w[1] - w[0]) / width.max(f64::MIN_POSITIVE));
            let (value, err) = self.panel(&f, w[0], w[1], tol * frac, 0);
            err_total += err;
            // Kahan summation keeps long panel lists exact to rounding
            let y = value - compensation;
            let t = total + y;
            compensation = (t - total) - y;
            total = t;
        }
        if !(err_total <= tol) {
            return Err(Error::QuadratureError {
                tol,
                estimate: err_total,
            });
        }
        Ok(total)
    }

    fn panel<F: Fn(f64) -> f64>(&self, f: &F, a: f64, b: f64, tol: f64, depth: usize) -> (f64, f64) {
        let lo = self.low.integrate(f, a, b);
        let (c, h) = (0.5 * (a + b), 0.5 * (b - a));
        let (mut hi, mut mass) = (0.0, 0.0);
        for (&x, &w) in self.high.nodes.iter().zip(&self.high.weights) {
            let v = w * f(c + h * x);
            hi += v;
            mass += v.abs();
        }
        let (hi, mass) = (hi * h, mass * h.abs());
        let err = (hi - lo).abs();
        if err <= tol {
            return (hi, err);
        }
        if err <= self.noise_floor * mass {
            // the rules disagree only by rounding in f
            return (hi, tol);
        }
        if depth >= self.max_depth {
            return (hi, err);
        }
        let m = 0.5 * (a + b);
        let (l, el) = self.panel(f, a, m, 0.5 * tol, depth + 1);
        let (r, er) = self.panel(f, m, b, 0.5 * tol, depth + 1);
        (l + r, el + er)
    }
}

const XGK15: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK15: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG7: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = fc * WGK15[7];
    let mut gauss = fc * WG7[3];
    for j in 0..7 {
        let x = h * XGK15[j];
        let s = f(c - x) + f(c + x);
        kronrod += WGK15[j] * s;
        if j % 2 == 1 {
            gauss += WG7[j / 2] * s;
        }
    }
    (kronrod * h, ((kronrod - gauss) * h).abs())
}

/// Adaptive 15-point Gauss-Kronrod integration on [a, b] by global bisection of the
/// worst interval.
pub fn adaptive_gk15<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, rel_tol: f64, abs_tol: f64) -> Result<f64> {
    let mut intervals = vec![{
        let (v, e) = gk15(&f, a, b);
        (a, b, v, e)
    }];
    for _ in 0..2000 {
        let total: f64 = intervals.iter().map(|i| i.2).sum();
        let err: f64 = intervals.iter().map(|i| i.3).sum();
        if err <= abs_tol.max(rel_tol * total.abs()) {
            return Ok(total);
        }
        let (idx, _) = intervals
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .expect("non-empty");
        let (lo, hi, _, _) = intervals.swap_remove(idx);
        let mid = 0.5 * (lo + hi);
        let (v1, e1) = gk15(&f, lo, mid);
        let (v2, e2) = gk15(&f, mid, hi);
        intervals.push((lo, mid, v1, e1));
        intervals.push((mid, hi, v2, e2));
    }
    let total: f64 = intervals.iter().map(|i| i.2).sum();
    let err: f64 = intervals.iter().map(|i| i.3).sum();
    Err(Error::QuadratureError {
        tol: abs_tol.max(rel_tol * total.abs()),
        estimate: err,
    })
}

/// Adaptive integral over [0, inf) through the map r = t / (1 - t).
pub fn adaptive_half_line<F: Fn(f64) -> f64>(f: F, rel_tol: f64, abs_tol: f64) -> Result<f64> {
    adaptive_gk15(
        |t| {
            if t >= 1.0 {
                return 0.0;
            }
            let s = 1.0 - t;
            f(t / s) / (s * s)
        },
        0.0,
        1.0,
        rel_tol,
        abs_tol,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_is_exact_for_polynomials() {
        let rule = GaussLegendre::new(5);
        // exact up to degree 9
        let v = rule.integrate(|x| x.powi(9) + 3.0 * x.powi(8), -1.0, 2.0);
        let exact = (2f64.powi(10) - 1.0) / 10.0 + (2f64.powi(9) + 1.0) / 3.0;
        assert!((v - exact).abs() < 1e-11 * exact);
        let s: f64 = rule.weights.iter().sum();
        assert!((s - 2.0).abs() < 1e-14);
    }

    #[test]
    fn gk15_adaptive_handles_peaks() {
        let v = adaptive_gk15(|x| 1.0 / (1e-4 + x * x), -1.0, 1.0, 1e-12, 0.0).unwrap();
        let exact = 2.0 * (1.0f64 / 1e-2).atan() / 1e-2;
        assert!((v / exact - 1.0).abs() < 1e-11);
    }

    #[test]
    fn half_line_beta_integral() {
        // int_0^inf r^5/(1+r^2)^6 dr = B(3,3)/2 = 1/60
        let v = adaptive_half_line(|r| r.powi(5) / (1.0 + r * r).powi(6), 1e-13, 0.0).unwrap();
        assert!((v * 60.0 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn panel_integrator_refines() {
        let pi = PanelIntegrator::new(1e-13, 0.0);
        let v = pi.integrate(|x: f64| x.sqrt(), &[0.0, 0.5, 1.0]).unwrap();
        assert!((v - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn impossible_tolerance_reports_error() {
        let mut pi = PanelIntegrator::new(1e-16, 0.0);
        pi.max_depth = 2;
        let r = pi.integrate(|x: f64| x.abs().sqrt(), &[-1.0, 0.3, 1.0]);
        assert!(matches!(r, Err(Error::QuadratureError { .. })));
    }
}
