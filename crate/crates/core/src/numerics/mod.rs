//! Self-contained numerical kernels: quadrature, ODE integration, banded linear algebra,
//! scalar roots and special functions.

pub mod banded;
pub mod ode;
pub mod quadrature;
pub mod roots;
pub mod special;

pub use banded::BandMatrix;
pub use ode::{Dopri5, Trajectory};
pub use quadrature::{adaptive_gk15, adaptive_half_line, GaussLegendre, PanelIntegrator};
pub use roots::{brent, fit_line, log_log_slope, poly_fit, LineFit};
