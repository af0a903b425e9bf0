//! Bond prices, rates and risk premia from the kernel integrals
//! `I(T) = ∫_T^∞ rho_s M_ts ds`.
//!
//! Every quantity is a ratio of such integrals, evaluated at a
//! [`ModelState`]. Integrals over `[T, ∞)` are computed on `[T, S_max]`, where
//! `P0(S_max) = eps`, and closed with `P0(S_max) M(t, S_max, xi)`; the size of
//! the neglected remainder is reported as a bound.
//!
//! The quadrature runs in the variable `v = exp(-lambda s)` with `lambda`
//! tied to the curve decay rate, which maps the half-line onto a bounded
//! interval on which the integrand is smooth.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::levy::LevyFamily;
use crate::martingales::{log_martingale_at, ModelState, PhiClass, PhiFunction};
use crate::quad::{self, log_add_exp, ScaledEstimate, Tolerance};
use crate::termstructure::TermStructure;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct QuadratureSettings {
    pub rel_tol: f64,
    /// Relative tail mass `P0(S_max)` defining the truncation horizon.
    pub tail_epsilon: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadratureSettings {
    fn default() -> Self {
        QuadratureSettings {
            rel_tol: 1e-10,
            tail_epsilon: 1e-12,
            max_subdivisions: 2000,
        }
    }
}

impl QuadratureSettings {
    pub fn validate(&self) -> Result<()> {
        let ok = |v: f64| v.is_finite() && v > 0.0;
        if !ok(self.rel_tol) || !ok(self.tail_epsilon) || self.tail_epsilon >= 1.0 || self.max_subdivisions == 0 {
            return Err(Error::domain(format!(
                "quadrature settings must be positive (tail_epsilon < 1): {self:?}"
            )));
        }
        Ok(())
    }

    pub(crate) fn tolerance(&self) -> Tolerance {
        Tolerance::relative(self.rel_tol, self.max_subdivisions)
    }
}

const DENSITY_ABS_TOL: f64 = 1e-15;

/// A kernel integral in log form with its diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelEstimate {
    /// Natural log of the integral.
    pub ln_value: f64,
    /// Estimated relative quadrature error.
    pub rel_error: f64,
    /// Relative bound on the mass beyond the truncation horizon.
    pub tail_bound: f64,
    pub evaluations: usize,
}

/// Volatility, market price of risk and risk premium of one bond.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RiskMetrics {
    /// `Phi_tt`.
    pub phi_tt: f64,
    /// `Phi_tT`.
    pub phi_tm: f64,
    /// `Omega_tT = Phi_tT - Phi_tt`.
    pub volatility: f64,
    /// `lambda_t = -Phi_tt`.
    pub risk_aversion: f64,
    /// `lambda_t Omega_tT`.
    pub premium: f64,
}

/// The rational model fixed by an initial curve, a driver family and `phi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RateModel {
    ts: TermStructure,
    family: LevyFamily,
    phi: PhiFunction,
    quad: QuadratureSettings,
    horizon: f64,
    v_rate: f64,
}

// decay rate of the substitution v = exp(-lambda s): the largest divisor
// y/k of the curve rate y that also divides the phi decay rates, so the
// integrand is a polynomial in v inside the exponentials
fn substitution_rate(curve_rate: f64, phi_rates: &[f64]) -> f64 {
    for k in 1..=8 {
        let lam = curve_rate / k as f64;
        let fits = phi_rates.iter().all(|&b| {
            let r = b / lam;
            (r - r.round()).abs() < 1e-9 * r.max(1.0)
        });
        if fits {
            return lam;
        }
    }
    curve_rate / 3.0
}

impl RateModel {
    pub fn new(ts: TermStructure, family: LevyFamily, phi: PhiFunction) -> Result<Self> {
        Self::with_quadrature(ts, family, phi, QuadratureSettings::default())
    }

    pub fn with_quadrature(
        ts: TermStructure,
        family: LevyFamily,
        phi: PhiFunction,
        quad: QuadratureSettings,
    ) -> Result<Self> {
        quad.validate()?;
        family.validate()?;
        let report = ts.validate();
        if !report.passed() {
            let detail = report
                .worst_failure()
                .map(|c| format!("{}: {}", c.name, c.detail))
                .unwrap_or_default();
            return Err(Error::domain(format!("initial curve is not admissible ({detail})")));
        }
        let horizon = ts.truncation_horizon(quad.tail_epsilon);
        if !horizon.is_finite() {
            return Err(Error::domain("initial curve never decays below the tail threshold"));
        }
        phi.check_admissible(&family, horizon)?;
        let v_rate = substitution_rate(ts.asymptotic_decay_rate(), &phi.decay_rates());
        Ok(RateModel {
            ts,
            family,
            phi,
            quad,
            horizon,
            v_rate,
        })
    }

    /// Same model with different quadrature settings.
    pub fn with_settings(&self, quad: QuadratureSettings) -> Result<Self> {
        Self::with_quadrature(self.ts, self.family, self.phi, quad)
    }

    pub fn term_structure(&self) -> &TermStructure {
        &self.ts
    }

    pub fn family(&self) -> &LevyFamily {
        &self.family
    }

    pub fn phi(&self) -> &PhiFunction {
        &self.phi
    }

    pub fn quadrature(&self) -> &QuadratureSettings {
        &self.quad
    }

    /// Truncation horizon `S_max`.
    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    fn check_state(&self, state: &ModelState) -> Result<()> {
        if !state.t.is_finite() || state.t < 0.0 || !state.xi.is_finite() {
            return Err(Error::domain(format!("invalid state {state:?}")));
        }
        if state.t == 0.0 && state.xi != 0.0 {
            return Err(Error::domain(format!("the driver starts at 0, got xi = {} at t = 0", state.xi)));
        }
        state.check_for(&self.family)
    }

    fn check_maturity(&self, state: &ModelState, maturity: f64) -> Result<()> {
        self.check_state(state)?;
        if !(maturity >= state.t) || !maturity.is_finite() {
            return Err(Error::domain(format!(
                "maturity {maturity} must be finite and not precede the state time {}",
                state.t
            )));
        }
        Ok(())
    }

    /// True when `M_ts` does not depend on `s`, so bond prices are forward
    /// ratios of the initial curve.
    fn is_degenerate(&self, state: &ModelState) -> bool {
        state.t == 0.0 || self.phi.class() == PhiClass::Constant
    }

    #[inline]
    pub(crate) fn ln_martingale(&self, state: &ModelState, s: f64) -> f64 {
        log_martingale_at(&self.family, self.phi.value(s), state.t, state.xi)
    }

    /// Integrates `rho_s * exp(log_weight(s)) * factor(s)` over `[a, b]`
    /// (finite, `a <= b`) in the substitution variable.
    fn integrate_density_scaled<F>(&self, a: f64, b: f64, tol: Tolerance, mut weight: F) -> Result<ScaledEstimate>
    where
        F: FnMut(f64) -> (f64, f64),
    {
        let lam = self.v_rate;
        let v_lo = (-lam * b).exp();
        let v_hi = (-lam * a).exp();
        if !(v_hi > v_lo) {
            return quad::integrate_scaled(|_| (0.0, 0.0), &[0.0, 0.0], tol);
        }
        let ln_lam = lam.ln();
        let ts = self.ts;
        let n = 4;
        let breaks: Vec<f64> = (0..=n)
            .map(|i| v_lo + (v_hi - v_lo) * i as f64 / n as f64)
            .collect();
        quad::integrate_scaled(
            |v| {
                let s = (-v.ln() / lam).clamp(a, b);
                let (lw, fac) = weight(s);
                (ts.ln_density(s) - ln_lam + lam * s + lw, fac)
            },
            &breaks,
            tol,
        )
    }

    /// `∫_a^b rho_s g(s) ds` for a bounded integrand `g`, closing the tail
    /// with `P0(S_max) g(S_max)` when `b` is infinite.
    ///
    /// The error target is `rel_tol` relative to the result, with an absolute
    /// floor of `1e-15`.
    pub fn density_integral<F>(&self, a: f64, b: f64, mut g: F) -> Result<f64>
    where
        F: FnMut(f64) -> f64,
    {
        if !(a >= 0.0) || !(b >= a) {
            return Err(Error::domain(format!("invalid interval [{a}, {b}]")));
        }
        let top = b.min(self.horizon.max(a));
        let tol = Tolerance {
            abs: DENSITY_ABS_TOL,
            ..self.quad.tolerance()
        };
        let est = self.integrate_density_scaled(a, top, tol, |s| (0.0, g(s)))?;
        let mut value = est.unscaled();
        if b.is_infinite() {
            value += self.ts.ln_discount(top).exp() * g(top);
        }
        Ok(value)
    }

    fn kernel_estimate(&self, state: &ModelState, lower: f64, upper: f64) -> Result<KernelEstimate> {
        let top = upper.min(self.horizon.max(lower));
        let est = self.integrate_density_scaled(lower, top, self.quad.tolerance(), |s| (self.ln_martingale(state, s), 1.0))?;
        let mut ln_value = est.ln();
        let mut tail_bound = 0.0;
        if upper.is_infinite() {
            let ln_closure = self.ts.ln_discount(top) + self.ln_martingale(state, top);
            ln_value = log_add_exp(ln_value, ln_closure);
            tail_bound = (self.ts.ln_discount(top) + self.sup_ln_martingale_beyond(state, top) - ln_value).exp();
        }
        if !ln_value.is_finite() {
            return Err(Error::numerical(format!(
                "kernel integral over [{lower}, {upper}] is not finite at {state:?}"
            )));
        }
        Ok(KernelEstimate {
            ln_value,
            rel_error: est.error / est.value.abs(),
            tail_bound,
            evaluations: est.evaluations,
        })
    }

    // ln sup_{s >= a} M_ts, from the range of phi on [a, ∞) and the
    // concavity of alpha xi - t psi(alpha)
    fn sup_ln_martingale_beyond(&self, state: &ModelState, a: f64) -> f64 {
        let (lo, hi) = self.phi.range_on(a, f64::INFINITY);
        (0..=16)
            .map(|i| {
                let alpha = lo + (hi - lo) * i as f64 / 16.0;
                log_martingale_at(&self.family, alpha, state.t, state.xi)
            })
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// `∫_lower^∞ rho_s M_ts ds` with diagnostics.
    pub fn kernel_integral_detailed(&self, state: &ModelState, lower: f64) -> Result<KernelEstimate> {
        self.check_maturity(state, lower)?;
        self.kernel_estimate(state, lower, f64::INFINITY)
    }

    /// `ln ∫_lower^∞ rho_s M_ts ds`.
    pub fn log_kernel_integral(&self, state: &ModelState, lower: f64) -> Result<f64> {
        Ok(self.kernel_integral_detailed(state, lower)?.ln_value)
    }

    /// `∫_lower^∞ rho_s M_ts ds`.
    pub fn kernel_integral(&self, state: &ModelState, lower: f64) -> Result<f64> {
        self.log_kernel_integral(state, lower).map(f64::exp)
    }

    /// `ln ∫_a^b rho_s M_ts ds` for `t <= a <= b < ∞`.
    pub fn log_kernel_integral_between(&self, state: &ModelState, a: f64, b: f64) -> Result<f64> {
        self.check_maturity(state, a)?;
        if !(b >= a) || !b.is_finite() {
            return Err(Error::domain(format!("invalid interval [{a}, {b}]")));
        }
        if b == a {
            return Ok(f64::NEG_INFINITY);
        }
        let est = self.integrate_density_scaled(a, b, self.quad.tolerance(), |s| (self.ln_martingale(state, s), 1.0))?;
        Ok(est.ln())
    }

    /// The pricing kernel `pi_t = ∫_t^∞ rho_s M_ts ds`.
    pub fn pricing_kernel(&self, state: &ModelState) -> Result<f64> {
        self.kernel_integral(state, state.t)
    }

    /// `P_tT = I(T) / I(t)`.
    pub fn bond_price(&self, state: &ModelState, maturity: f64) -> Result<f64> {
        self.check_maturity(state, maturity)?;
        if maturity == state.t {
            return Ok(1.0);
        }
        if self.is_degenerate(state) {
            return self.ts.forward_price(state.t, maturity);
        }
        let num = self.kernel_estimate(state, maturity, f64::INFINITY)?.ln_value;
        let den = self.kernel_estimate(state, state.t, f64::INFINITY)?.ln_value;
        Ok((num - den).exp().min(1.0))
    }

    /// `r_t = rho_t M_tt / I(t)`.
    pub fn short_rate(&self, state: &ModelState) -> Result<f64> {
        self.forward_rate(state, state.t)
    }

    /// `f_tT = rho_T M_tT / I(T) = -d/dT ln P_tT`.
    pub fn forward_rate(&self, state: &ModelState, maturity: f64) -> Result<f64> {
        self.check_maturity(state, maturity)?;
        let rate = if self.is_degenerate(state) {
            (self.ts.ln_density(maturity) - self.ts.ln_discount(maturity)).exp()
        } else {
            let den = self.kernel_estimate(state, maturity, f64::INFINITY)?.ln_value;
            (self.ts.ln_density(maturity) + self.ln_martingale(state, maturity) - den).exp()
        };
        if !(rate >= 0.0) || !rate.is_finite() {
            return Err(Error::numerical(format!(
                "rate {rate} at maturity {maturity} from {state:?} is not a finite non-negative number"
            )));
        }
        Ok(rate)
    }

    /// `Phi_tT = ∫_T^∞ phi_s rho_s M_ts ds / I(T)`.
    pub fn phi_average(&self, state: &ModelState, maturity: f64) -> Result<f64> {
        self.check_maturity(state, maturity)?;
        if self.phi.class() == PhiClass::Constant {
            return Ok(self.phi.value(maturity));
        }
        let top = self.horizon.max(maturity);
        let tol = self.quad.tolerance();
        let num = self.integrate_density_scaled(maturity, top, tol, |s| (self.ln_martingale(state, s), self.phi.value(s)))?;
        let den = self.integrate_density_scaled(maturity, top, tol, |s| (self.ln_martingale(state, s), 1.0))?;
        // closure terms share the weight P0(S) M(t, S, xi)
        let ln_closure = self.ts.ln_discount(top) + self.ln_martingale(state, top);
        let shift = num.log_scale.max(den.log_scale).max(ln_closure);
        let c = (ln_closure - shift).exp();
        let n = num.value * (num.log_scale - shift).exp() + self.phi.value(top) * c;
        let d = den.value * (den.log_scale - shift).exp() + c;
        let avg = n / d;
        if !avg.is_finite() {
            return Err(Error::numerical(format!("phi average is not finite at {state:?}, T={maturity}")));
        }
        Ok(avg)
    }

    /// `Omega_tT = Phi_tT - Phi_tt`.
    pub fn bond_volatility(&self, state: &ModelState, maturity: f64) -> Result<f64> {
        Ok(self.risk_metrics(state, maturity)?.volatility)
    }

    /// `lambda_t = -Phi_tt`.
    pub fn risk_aversion(&self, state: &ModelState) -> Result<f64> {
        Ok(-self.phi_average(state, state.t)?)
    }

    /// `lambda_t Omega_tT`, the excess drift of the bond over the short rate.
    pub fn risk_premium(&self, state: &ModelState, maturity: f64) -> Result<f64> {
        Ok(self.risk_metrics(state, maturity)?.premium)
    }

    pub fn risk_metrics(&self, state: &ModelState, maturity: f64) -> Result<RiskMetrics> {
        let phi_tt = self.phi_average(state, state.t)?;
        let phi_tm = if maturity == state.t {
            phi_tt
        } else {
            self.phi_average(state, maturity)?
        };
        let volatility = phi_tm - phi_tt;
        Ok(RiskMetrics {
            phi_tt,
            phi_tm,
            volatility,
            risk_aversion: -phi_tt,
            premium: phi_tt * (phi_tt - phi_tm),
        })
    }
}
