//! Rational term-structure models built from geometric Lévy martingales.
//!
//! The pricing kernel is represented as a weighted integral of a family of
//! positive unit-initialised martingales,
//!
//! ```text
//! pi_t = ∫_t^∞ rho_s M_ts ds,      M_ts = exp(phi_s X_t - t psi(phi_s)),
//! ```
//!
//! where `rho` is the density of the initial discount curve, `X` is a Lévy
//! driver (Brownian motion, Merton jump-diffusion, gamma or variance gamma)
//! and `phi` is a deterministic functional parameter. Discount bonds are then
//! ratios of two such integrals, and every price in the model is a function
//! of the scalar state `(t, X_t)`.
//!
//! Module map:
//!
//! * [`termstructure`] – initial discount curve and its density.
//! * [`levy`] – driver families, Lévy exponents, exact samplers.
//! * [`martingales`] – the functional parameter `phi` and `M_ts`.
//! * [`specialfn`] – normal CDF, incomplete gamma and the gamma-mixture `Psi`.
//! * [`quad`] – adaptive Gauss–Kronrod quadrature with log-scale shifting.
//! * [`curve`] – bond prices, rates and risk premia from the kernel integrals.
//! * [`options`] – bond call options: critical level, semi-analytical
//!   formulas and the Monte Carlo oracle.

pub mod curve;
pub mod error;
pub mod levy;
pub mod martingales;
pub mod options;
pub mod quad;
pub mod specialfn;
pub mod stats;
pub mod termstructure;

pub use curve::{QuadratureSettings, RateModel, RiskMetrics};
pub use error::{Error, Result};
pub use levy::{ExponentDomain, LevyFamily};
pub use martingales::{ModelState, PhiClass, PhiFunction};
pub use options::{CriticalLevel, McEstimate, McSettings, OptionSpec, PricingSettings};
pub use termstructure::TermStructure;
