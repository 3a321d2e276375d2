//! Radial numerics for the critical Brezis-Nirenberg problem `-Δu = |u|u + λu` on a ball in
//! dimension six: bubbles and their projections, the positive ground state and its
//! linearization, the critical parameter `λ₀ = 2u₀(0)`, the blow-up ansatz with its reduced
//! energy, and continuation of the sign-changing branch that concentrates as `λ → λ₀`.
//!
//! Every solver works on radial profiles ([`profile::RadialProfile`]) over a ball centred at
//! the origin. The `bn6` binary drives the full pipeline; the `examples/` directory shows
//! each stage in isolation.

pub mod branch_tracker;
pub mod bubble_kernel;
pub mod cli_report;
pub mod critical_data;
pub mod energy_expansion;
pub mod error;
pub mod mesh;
pub mod numerics;
pub mod profile;
pub mod radial_bvp;
pub mod settings;

pub use bubble_kernel::{alpha6, omega6, BubbleParams, DomainBall, KernelIndex, Point6};
pub use error::{Error, Result};
pub use profile::{RadialFunction, RadialProfile};
pub use settings::Settings;
