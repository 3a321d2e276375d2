//! Radial functions on [0, R] and their sampled representation.

use std::fmt::Write as _;
use std::io::{BufRead, Write};
use std::path::Path;

use crate::error::{Error, Result};

/// A radially symmetric function on the closed ball of radius `radius()`.
pub trait RadialFunction: Sync {
    fn radius(&self) -> f64;
    fn value(&self, r: f64) -> f64;
    fn d1(&self, r: f64) -> f64;
    fn d2(&self, r: f64) -> f64;

    /// Value, first and second derivative in one call.
    fn jet(&self, r: f64) -> [f64; 3] {
        [self.value(r), self.d1(r), self.d2(r)]
    }
}

/// Samples of a radial function with piecewise quintic Hermite interpolation (C² between
/// nodes). Second derivatives come from the generating ODE when available.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialProfile {
    pub radius: f64,
    pub nodes: Vec<f64>,
    pub values: Vec<f64>,
    pub derivs: Vec<f64>,
    pub second: Vec<f64>,
}

impl RadialProfile {
    pub fn new(nodes: Vec<f64>, values: Vec<f64>, derivs: Vec<f64>, second: Vec<f64>) -> Result<Self> {
        let n = nodes.len();
        if n < 2 {
            return Err(Error::InvalidParameter("profile needs at least two nodes".into()));
        }
        if values.len() != n || derivs.len() != n || second.len() != n {
            return Err(Error::InvalidParameter("profile column lengths differ".into()));
        }
        if nodes[0] != 0.0 || nodes.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidParameter(
                "profile nodes must start at 0 and increase strictly".into(),
            ));
        }
        Ok(Self {
            radius: nodes[n - 1],
            nodes,
            values,
            derivs,
            second,
        })
    }

    /// Builds a profile from values and first derivatives alone; second derivatives are
    /// estimated by local polynomial differentiation of the first derivatives.
    pub fn from_first_order(nodes: Vec<f64>, values: Vec<f64>, derivs: Vec<f64>) -> Result<Self> {
        let second = estimate_second(&nodes, &derivs);
        Self::new(nodes, values, derivs, second)
    }

    /// Samples any radial function on the given nodes.
    pub fn sample<F: RadialFunction + ?Sized>(f: &F, nodes: &[f64]) -> Result<Self> {
        let mut values = Vec::with_capacity(nodes.len());
        let mut derivs = Vec::with_capacity(nodes.len());
        let mut second = Vec::with_capacity(nodes.len());
        for &r in nodes {
            let [v, d, s] = f.jet(r);
            values.push(v);
            derivs.push(d);
            second.push(s);
        }
        Self::new(nodes.to_vec(), values, derivs, second)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn intervals(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn center_value(&self) -> f64 {
        self.values[0]
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Sign changes among nodal values, ignoring the boundary node where the value vanishes.
    pub fn node_count(&self) -> usize {
        let inner = &self.values[..self.values.len() - 1];
        let mut count = 0;
        let mut last = 0.0f64;
        for &v in inner {
            if v == 0.0 {
                continue;
            }
            if last != 0.0 && v.signum() != last.signum() {
                count += 1;
            }
            last = v;
        }
        count
    }

    /// Radii where nodal values change sign, refined by interpolation.
    pub fn sign_changes(&self) -> Vec<f64> {
        let mut out = Vec::new();
        let last = self.values.len() - 1;
        for i in 0..last {
            let (a, b) = (self.values[i], self.values[i + 1]);
            if i + 1 == last {
                break;
            }
            if a != 0.0 && b != 0.0 && a.signum() != b.signum() {
                out.push(self.refine_zero(i));
            }
        }
        out
    }

    fn refine_zero(&self, i: usize) -> f64 {
        let (mut lo, mut hi) = (self.nodes[i], self.nodes[i + 1]);
        let s_lo = self.values[i].signum();
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if self.value(mid).signum() == s_lo {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    fn locate(&self, r: f64) -> usize {
        let k = self.nodes.partition_point(|&x| x <= r);
        k.saturating_sub(1).min(self.nodes.len() - 2)
    }

    fn poly(&self, i: usize) -> (f64, f64, [f64; 6]) {
        let a = self.nodes[i];
        let h = self.nodes[i + 1] - a;
        let c0 = self.values[i];
        let c1 = h * self.derivs[i];
        let c2 = 0.5 * h * h * self.second[i];
        let y = (self.values[i + 1] - c0) - (c1 + c2);
        let d = h * self.derivs[i + 1] - (c1 + 2.0 * c2);
        let s = h * h * self.second[i + 1] - 2.0 * c2;
        let c3 = 10.0 * y - 4.0 * d + 0.5 * s;
        let c4 = -15.0 * y + 7.0 * d - s;
        let c5 = 6.0 * y - 3.0 * d + 0.5 * s;
        (a, h, [c0, c1, c2, c3, c4, c5])
    }

    fn eval(&self, r: f64) -> [f64; 3] {
        let i = self.locate(r);
        let (a, h, c) = self.poly(i);
        let t = (r - a) / h;
        let p = c[0] + t * (c[1] + t * (c[2] + t * (c[3] + t * (c[4] + t * c[5]))));
        let dp = c[1] + t * (2.0 * c[2] + t * (3.0 * c[3] + t * (4.0 * c[4] + t * 5.0 * c[5])));
        let ddp = 2.0 * c[2] + t * (6.0 * c[3] + t * (12.0 * c[4] + t * 20.0 * c[5]));
        [p, dp / h, ddp / (h * h)]
    }

    /// `value(r) - base` evaluated as the interpolant of `u - base`, which keeps full relative
    /// precision where `u` is close to `base` on a whole interval (e.g. `u(0)` near the centre).
    pub fn value_offset(&self, r: f64, base: f64) -> f64 {
        let i = self.locate(r);
        let (a, h, c) = self.poly(i);
        let t = (r - a) / h;
        (c[0] - base) + t * (c[1] + t * (c[2] + t * (c[3] + t * (c[4] + t * c[5]))))
    }

    /// Max |value| at the outer node and max |deriv| at the centre must be within `tol`.
    pub fn check_boundary(&self, tol: f64) -> Result<()> {
        let outer = self.values[self.values.len() - 1].abs();
        let inner = self.derivs[0].abs();
        if outer > tol || inner > tol {
            return Err(Error::InvalidParameter(format!(
                "boundary conditions violated: |u(R)| = {outer:e}, |u'(0)| = {inner:e}"
            )));
        }
        Ok(())
    }

    /// Columnar text: a header line, then `r value deriv` rows at 17 significant digits.
    pub fn to_text(&self) -> String {
        let mut s = format!("# bn6 radial-profile R={} N={}\n", fmt17(self.radius), self.intervals());
        for i in 0..self.nodes.len() {
            let _ = writeln!(
                s,
                "{} {} {}",
                fmt17(self.nodes[i]),
                fmt17(self.values[i]),
                fmt17(self.derivs[i])
            );
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| Error::parse("profile", "empty input"))?;
        let rest = header
            .strip_prefix("# bn6 radial-profile ")
            .ok_or_else(|| Error::parse("profile", format!("bad header `{header}`")))?;
        let mut radius = None;
        let mut n = None;
        for field in rest.split_whitespace() {
            match field.split_once('=') {
                Some(("R", v)) => radius = v.parse::<f64>().ok(),
                Some(("N", v)) => n = v.parse::<usize>().ok(),
                _ => return Err(Error::parse("profile", format!("unknown header field `{field}`"))),
            }
        }
        let radius = radius.ok_or_else(|| Error::parse("profile", "header lacks R"))?;
        let n = n.ok_or_else(|| Error::parse("profile", "header lacks N"))?;
        let (mut nodes, mut values, mut derivs) = (Vec::new(), Vec::new(), Vec::new());
        for (k, line) in lines.enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let cols: Vec<f64> = line
                .split_whitespace()
                .map(|t| t.parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::parse("profile", format!("row {}: {e}", k + 1)))?;
            if cols.len() != 3 {
                return Err(Error::parse("profile", format!("row {} has {} columns", k + 1, cols.len())));
            }
            nodes.push(cols[0]);
            values.push(cols[1]);
            derivs.push(cols[2]);
        }
        if nodes.len() != n + 1 {
            return Err(Error::parse(
                "profile",
                format!("header announces {n} intervals, found {} rows", nodes.len()),
            ));
        }
        if nodes.last().copied() != Some(radius) {
            return Err(Error::parse("profile", "last node differs from R"));
        }
        Self::from_first_order(nodes, values, derivs)
    }

    pub fn write_file(&self, path: &Path) -> Result<()> {
        let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
        f.write_all(self.to_text().as_bytes())?;
        f.flush()?;
        Ok(())
    }

    pub fn read_file(path: &Path) -> Result<Self> {
        let f = std::io::BufReader::new(std::fs::File::open(path)?);
        let mut text = String::new();
        for line in f.lines() {
            text.push_str(&line?);
            text.push('\n');
        }
        Self::from_text(&text)
    }
}

impl RadialFunction for RadialProfile {
    fn radius(&self) -> f64 {
        self.radius
    }
    fn value(&self, r: f64) -> f64 {
        self.eval(r)[0]
    }
    fn d1(&self, r: f64) -> f64 {
        self.eval(r)[1]
    }
    fn d2(&self, r: f64) -> f64 {
        self.eval(r)[2]
    }
    fn jet(&self, r: f64) -> [f64; 3] {
        self.eval(r)
    }
}

/// Exponent-form float with 17 significant digits.
pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

/// Derivative of the interpolating polynomial through up to five neighbouring samples.
fn estimate_second(nodes: &[f64], derivs: &[f64]) -> Vec<f64> {
    let n = nodes.len();
    let width = n.min(5);
    (0..n)
        .map(|i| {
            let start = i.saturating_sub(width / 2).min(n - width);
            let xs = &nodes[start..start + width];
            let ys = &derivs[start..start + width];
            lagrange_derivative(xs, ys, nodes[i])
        })
        .collect()
}

fn lagrange_derivative(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    let m = xs.len();
    let mut total = 0.0;
    for j in 0..m {
        // d/dx of the j-th Lagrange basis polynomial
        let mut denom = 1.0;
        for k in 0..m {
            if k != j {
                denom *= xs[j] - xs[k];
            }
        }
        let mut num = 0.0;
        for skip in 0..m {
            if skip == j {
                continue;
            }
            let mut prod = 1.0;
            for k in 0..m {
                if k != j && k != skip {
                    prod *= x - xs[k];
                }
            }
            num += prod;
        }
        total += ys[j] * num / denom;
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Gauss;
    impl RadialFunction for Gauss {
        fn radius(&self) -> f64 {
            1.0
        }
        fn value(&self, r: f64) -> f64 {
            (-3.0 * r * r).exp() - (-3.0f64).exp()
        }
        fn d1(&self, r: f64) -> f64 {
            -6.0 * r * (-3.0 * r * r).exp()
        }
        fn d2(&self, r: f64) -> f64 {
            (36.0 * r * r - 6.0) * (-3.0 * r * r).exp()
        }
    }

    fn uniform(n: usize) -> Vec<f64> {
        (0..=n).map(|k| k as f64 / n as f64).collect()
    }

    #[test]
    fn quintic_interpolation_is_accurate() {
        let p = RadialProfile::sample(&Gauss, &uniform(64)).unwrap();
        for k in 0..997 {
            let r = k as f64 / 997.0;
            assert!((p.value(r) - Gauss.value(r)).abs() < 1e-11);
            assert!((p.d1(r) - Gauss.d1(r)).abs() < 1e-8);
        }
    }

    #[test]
    fn text_round_trip() {
        let p = RadialProfile::sample(&Gauss, &uniform(40)).unwrap();
        let q = RadialProfile::from_text(&p.to_text()).unwrap();
        assert_eq!(p.nodes, q.nodes);
        assert_eq!(p.values, q.values);
        assert_eq!(p.derivs, q.derivs);
        assert!(p.to_text().starts_with("# bn6 radial-profile R=1.0000000000000000e0 N=40\n"));
    }

    #[test]
    fn estimated_second_derivative() {
        let nodes = uniform(200);
        let p = RadialProfile::sample(&Gauss, &nodes).unwrap();
        let q = RadialProfile::from_first_order(nodes, p.values.clone(), p.derivs.clone()).unwrap();
        for (a, b) in p.second.iter().zip(&q.second) {
            assert!((a - b).abs() < 1e-5);
        }
    }

    #[test]
    fn malformed_text_rejected() {
        assert!(RadialProfile::from_text("hello").is_err());
        assert!(RadialProfile::from_text("# bn6 radial-profile R=1 N=2\n0 1 0\n1 0 0\n").is_err());
    }

    #[test]
    fn node_counting() {
        let nodes = uniform(10);
        let values: Vec<f64> = nodes.iter().map(|r| (r - 0.35) * (1.0 - r)).collect();
        let p = RadialProfile::from_first_order(nodes, values, vec![0.0; 11]).unwrap();
        assert_eq!(p.node_count(), 1);
    }
}
