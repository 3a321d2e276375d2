//! Standard bubbles in dimension six, their derivative kernels, the regular part of the
//! Dirichlet Green's function of a ball, and closed-form bubble integrals.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::special::{beta_half_integer, unit_sphere_area};
use crate::profile::{RadialFunction, RadialProfile};

pub type Point6 = [f64; 6];

pub const ORIGIN: Point6 = [0.0; 6];

/// Normalisation constant `(n(n-2))^{(n-2)/4}` at n = 6.
pub fn alpha6() -> f64 {
    let n = 6.0f64;
    (n * (n - 2.0)).powf((n - 2.0) / 4.0)
}

/// Surface area of the unit sphere in R^6.
pub fn omega6() -> f64 {
    unit_sphere_area(6)
}

fn dist2(a: &Point6, b: &Point6) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn norm2(a: &Point6) -> f64 {
    a.iter().map(|x| x * x).sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BubbleParams {
    pub delta: f64,
    pub xi: Point6,
    pub d: f64,
    pub eta: Point6,
}

impl BubbleParams {
    /// Bubble of scale `delta` centred at `xi`, not tied to a parameter eps.
    pub fn new(delta: f64, xi: Point6) -> Result<Self> {
        if !(delta > 0.0) || !delta.is_finite() {
            return Err(Error::InvalidParameter(format!("delta must be positive, got {delta}")));
        }
        Ok(Self {
            delta,
            xi,
            d: f64::NAN,
            eta: ORIGIN,
        })
    }

    pub fn central(delta: f64) -> Result<Self> {
        Self::new(delta, ORIGIN)
    }

    /// Scaled parametrisation `delta = |eps| d`, `xi = xi0 + sqrt(delta) eta`, with
    /// `d in [sigma, 1/sigma]` and `|eta| <= 1/sigma`.
    pub fn scaled(eps: f64, d: f64, eta: Point6, xi0: Point6, sigma: f64) -> Result<Self> {
        if eps == 0.0 || !eps.is_finite() {
            return Err(Error::InvalidParameter("eps must be nonzero".into()));
        }
        if !(sigma > 0.0 && sigma < 1.0) {
            return Err(Error::InvalidParameter(format!("sigma must lie in (0, 1), got {sigma}")));
        }
        if d < sigma || d > 1.0 / sigma {
            return Err(Error::InvalidParameter(format!(
                "d = {d} outside [{sigma}, {}]",
                1.0 / sigma
            )));
        }
        if norm2(&eta).sqrt() > 1.0 / sigma {
            return Err(Error::InvalidParameter("|eta| exceeds 1/sigma".into()));
        }
        let delta = eps.abs() * d;
        let s = delta.sqrt();
        let mut xi = xi0;
        for (x, e) in xi.iter_mut().zip(&eta) {
            *x += s * e;
        }
        Ok(Self { delta, xi, d, eta })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DomainBall {
    pub radius: f64,
}

impl DomainBall {
    pub fn new(radius: f64) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::InvalidParameter(format!("radius must be positive, got {radius}")));
        }
        Ok(Self { radius })
    }

    pub fn unit() -> Self {
        Self { radius: 1.0 }
    }

    pub fn center(&self) -> Point6 {
        ORIGIN
    }

    fn check(&self, p: &Point6) -> Result<()> {
        let norm = norm2(p).sqrt();
        if norm > self.radius * (1.0 + 1e-14) {
            return Err(Error::OutsideDomain {
                radius: self.radius,
                norm,
            });
        }
        Ok(())
    }
}

/// Selects `Z^0 = dU/d delta` (j = 0) or `Z^j = dU/d xi_j` (j = 1..6).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KernelIndex(u8);

impl KernelIndex {
    pub fn new(j: usize) -> Result<Self> {
        if j > 6 {
            return Err(Error::InvalidParameter(format!("kernel index {j} outside 0..=6")));
        }
        Ok(Self(j as u8))
    }

    pub fn get(self) -> usize {
        self.0 as usize
    }
}

/// `U(x) = 24 delta^2 / (delta^2 + |x - xi|^2)^2`.
pub fn eval_bubble(p: &BubbleParams, x: &Point6) -> f64 {
    let d2 = p.delta * p.delta;
    let s = d2 + dist2(x, &p.xi);
    alpha6() * d2 / (s * s)
}

pub fn eval_kernel(p: &BubbleParams, k: KernelIndex, x: &Point6) -> f64 {
    let a = alpha6();
    let d2 = p.delta * p.delta;
    let r2 = dist2(x, &p.xi);
    let s = d2 + r2;
    match k.get() {
        0 => 2.0 * a * p.delta * (r2 - d2) / (s * s * s),
        j => 4.0 * a * d2 * (x[j - 1] - p.xi[j - 1]) / (s * s * s),
    }
}

/// Regular part of the Green's function of the ball of radius R, normalised so that
/// `H(x, y) = |x - y|^{-4}` on the boundary:
/// `H(x, y) = R^4 / (|x|^2 |y|^2 - 2 R^2 x.y + R^4)^2`.
pub fn regular_part_ball(x: &Point6, y: &Point6, dom: &DomainBall) -> Result<f64> {
    dom.check(x)?;
    dom.check(y)?;
    let r2 = dom.radius * dom.radius;
    let dot: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
    let q = norm2(x) * norm2(y) - 2.0 * r2 * dot + r2 * r2;
    Ok(r2 * r2 / (q * q))
}

/// Gradient of `H(x, .)` at `y`.
pub fn regular_part_grad_y(x: &Point6, y: &Point6, dom: &DomainBall) -> Result<Point6> {
    dom.check(x)?;
    dom.check(y)?;
    let r2 = dom.radius * dom.radius;
    let dot: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
    let nx = norm2(x);
    let q = nx * norm2(y) - 2.0 * r2 * dot + r2 * r2;
    let f = -2.0 * r2 * r2 / (q * q * q);
    let mut g = ORIGIN;
    for j in 0..6 {
        g[j] = f * (2.0 * nx * y[j] - 2.0 * r2 * x[j]);
    }
    Ok(g)
}

/// Leading-order projected kernels: `PZ^0 ≈ Z^0 - 2 α δ H(x, ξ)`,
/// `PZ^j ≈ Z^j - α δ² ∂_{ξ_j} H(x, ξ)`.
pub fn projected_kernel_expansion(p: &BubbleParams, k: KernelIndex, x: &Point6, dom: &DomainBall) -> Result<f64> {
    let z = eval_kernel(p, k, x);
    let a = alpha6();
    match k.get() {
        0 => Ok(z - 2.0 * a * p.delta * regular_part_ball(x, &p.xi, dom)?),
        j => Ok(z - a * p.delta * p.delta * regular_part_grad_y(x, &p.xi, dom)?[j - 1]),
    }
}

/// Expansion `U - α δ² H(., ξ)` of the projection, valid for any centre.
pub fn projection_expansion(p: &BubbleParams, x: &Point6, dom: &DomainBall) -> Result<f64> {
    Ok(eval_bubble(p, x) - alpha6() * p.delta * p.delta * regular_part_ball(x, &p.xi, dom)?)
}

/// Radial bubble centred at the origin: value, first and second radial derivatives.
#[inline]
pub fn bubble_jet(delta: f64, r: f64) -> [f64; 3] {
    let a = alpha6();
    let d2 = delta * delta;
    let s = d2 + r * r;
    let s2 = s * s;
    let u = a * d2 / s2;
    let u1 = -4.0 * a * d2 * r / (s2 * s);
    let u2 = -4.0 * a * d2 * (d2 - 5.0 * r * r) / (s2 * s2);
    [u, u1, u2]
}

/// Exact projection of a centred bubble onto the ball: `PU = U - α δ² / (δ² + R²)²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CentralProjection {
    pub delta: f64,
    pub radius: f64,
}

impl CentralProjection {
    pub fn new(p: &BubbleParams, dom: &DomainBall) -> Result<Self> {
        if norm2(&p.xi) != 0.0 {
            return Err(Error::InvalidParameter(
                "exact projection requires the bubble at the ball centre".into(),
            ));
        }
        Ok(Self {
            delta: p.delta,
            radius: dom.radius,
        })
    }

    /// Constant boundary trace subtracted from U.
    pub fn shift(&self) -> f64 {
        let d2 = self.delta * self.delta;
        let s = d2 + self.radius * self.radius;
        alpha6() * d2 / (s * s)
    }
}

impl RadialFunction for CentralProjection {
    fn radius(&self) -> f64 {
        self.radius
    }
    fn value(&self, r: f64) -> f64 {
        bubble_jet(self.delta, r)[0] - self.shift()
    }
    fn d1(&self, r: f64) -> f64 {
        bubble_jet(self.delta, r)[1]
    }
    fn d2(&self, r: f64) -> f64 {
        bubble_jet(self.delta, r)[2]
    }
    fn jet(&self, r: f64) -> [f64; 3] {
        let [u, u1, u2] = bubble_jet(self.delta, r);
        [u - self.shift(), u1, u2]
    }
}

/// Samples the exact central projection on a mesh graded around `delta`.
pub fn project_bubble_central(p: &BubbleParams, dom: &DomainBall, grid_n: usize) -> Result<RadialProfile> {
    let proj = CentralProjection::new(p, dom)?;
    let nodes = crate::mesh::graded(dom.radius, grid_n, Some(p.delta));
    RadialProfile::sample(&proj, &nodes)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BubbleIntegrals {
    /// `∫_{R^6} U_{1,0}^3`.
    pub int_u3: f64,
    /// `∫_{R^6} (1 + |y|^2)^{-4}`.
    pub int_w4: f64,
}

/// Closed forms through `∫_0^∞ r^5 (1 + r^2)^{-k} dr = B(3, k - 3) / 2`.
pub fn bubble_integrals() -> BubbleIntegrals {
    let a = alpha6();
    let w = omega6();
    BubbleIntegrals {
        int_u3: a.powi(3) * w * beta_half_integer(6, 6) / 2.0,
        int_w4: w * beta_half_integer(6, 2) / 2.0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e1(t: f64) -> Point6 {
        [t, 0.0, 0.0, 0.0, 0.0, 0.0]
    }

    #[test]
    fn constants() {
        assert_eq!(alpha6(), 24.0);
        assert!((omega6() / std::f64::consts::PI.powi(3) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn bubble_values_and_homogeneity() {
        let p = BubbleParams::central(1.0).unwrap();
        assert_eq!(eval_bubble(&p, &ORIGIN), 24.0);
        assert_eq!(eval_bubble(&p, &e1(1.0)), 6.0);
        let small = BubbleParams::central(0.01).unwrap();
        let lhs = eval_bubble(&small, &e1(0.01));
        let rhs = 1e4 * eval_bubble(&p, &e1(1.0));
        assert!((lhs / rhs - 1.0).abs() < 1e-14);
    }

    #[test]
    fn kernel_closed_forms() {
        let p = BubbleParams::central(1.0).unwrap();
        assert_eq!(eval_kernel(&p, KernelIndex::new(0).unwrap(), &ORIGIN), -48.0);
        assert_eq!(eval_kernel(&p, KernelIndex::new(1).unwrap(), &ORIGIN), 0.0);
        assert!(KernelIndex::new(7).is_err());
    }

    #[test]
    fn regular_part_limits() {
        let dom = DomainBall::unit();
        assert!((regular_part_ball(&ORIGIN, &ORIGIN, &dom).unwrap() - 1.0).abs() < 1e-15);
        assert!(regular_part_ball(&e1(1.2), &ORIGIN, &dom).is_err());
        let two = DomainBall::new(2.0).unwrap();
        assert!((regular_part_ball(&e1(0.3), &ORIGIN, &two).unwrap() - 1.0 / 16.0).abs() < 1e-15);
    }

    #[test]
    fn scaled_params_respect_window() {
        assert!(BubbleParams::scaled(0.01, 20.0, ORIGIN, ORIGIN, 0.1).is_err());
        let p = BubbleParams::scaled(-0.01, 2.0, e1(1.0), ORIGIN, 0.1).unwrap();
        assert!((p.delta - 0.02).abs() < 1e-16);
        assert!((p.xi[0] - 0.02f64.sqrt()).abs() < 1e-16);
    }

    #[test]
    fn projection_boundary_trace() {
        let p = BubbleParams::central(0.1).unwrap();
        let proj = CentralProjection::new(&p, &DomainBall::unit()).unwrap();
        assert!(proj.value(1.0).abs() < 1e-15);
        let direct = 24.0 * (1.0 / 0.01 - 0.01 / (1.01f64 * 1.01));
        assert!((proj.value(0.0) - direct).abs() < 1e-12 * direct);
    }

    #[test]
    fn closed_form_integrals() {
        let b = bubble_integrals();
        assert!((b.int_w4 / omega6() - 1.0 / 6.0).abs() < 1e-15);
        assert!((b.int_u3 / omega6() - 230.4).abs() < 1e-11);
    }
}
