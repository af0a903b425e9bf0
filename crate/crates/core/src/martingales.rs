//! The functional parameter `phi_s` and the martingale family
//! `M_ts = exp(phi_s X_t - t psi(phi_s))`.
//!
//! `M` is evaluated as a deterministic function of `(t, s, xi)` where `xi` is
//! the realised driver value `X_t`; no path history is needed.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::levy::LevyFamily;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum PhiForm {
    /// `phi_s = c * exp(-b s)`, `b >= 0`.
    ExpDecay { c: f64, b: f64 },
    /// `phi_s = c1 * exp(-b1 s) + c2 * exp(-b2 s)`, `b1, b2 >= 0`. Used to
    /// build non-monotone parameters.
    DoubleExp { c1: f64, b1: f64, c2: f64, b2: f64 },
}

/// Sign and monotonicity class of `phi`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PhiClass {
    PositiveDecreasing,
    NegativeIncreasing,
    Constant,
    Other,
}

/// Direction in which bond prices move with the driver.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Monotonicity {
    Decreasing,
    Increasing,
    Flat,
    Unknown,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhiFunction {
    form: PhiForm,
    class: PhiClass,
}

// horizon used when classifying forms numerically
const CLASSIFY_HORIZON: f64 = 5000.0;

fn check_rate(name: &str, b: f64) -> Result<()> {
    if b.is_finite() && b >= 0.0 {
        Ok(())
    } else {
        Err(Error::domain(format!("{name} must be finite and >= 0, got {b}")))
    }
}

fn check_finite(name: &str, c: f64) -> Result<()> {
    if c.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("{name} must be finite, got {c}")))
    }
}

impl PhiFunction {
    pub fn exp_decay(c: f64, b: f64) -> Result<Self> {
        check_finite("phi scale c", c)?;
        check_rate("phi decay rate b", b)?;
        let form = PhiForm::ExpDecay { c, b };
        Ok(PhiFunction {
            form,
            class: classify(&form),
        })
    }

    pub fn double_exp(c1: f64, b1: f64, c2: f64, b2: f64) -> Result<Self> {
        check_finite("phi scale c1", c1)?;
        check_finite("phi scale c2", c2)?;
        check_rate("phi decay rate b1", b1)?;
        check_rate("phi decay rate b2", b2)?;
        let form = PhiForm::DoubleExp { c1, b1, c2, b2 };
        Ok(PhiFunction {
            form,
            class: classify(&form),
        })
    }

    /// Confirms a user-declared class against the parameters.
    pub fn with_declared_class(self, declared: PhiClass) -> Result<Self> {
        if declared != self.class {
            return Err(Error::domain(format!(
                "declared phi class {declared:?} does not match the parameters ({:?} implies {:?})",
                self.form, self.class
            )));
        }
        Ok(self)
    }

    pub fn form(&self) -> PhiForm {
        self.form
    }

    pub fn class(&self) -> PhiClass {
        self.class
    }

    pub fn monotonicity(&self) -> Monotonicity {
        match self.class {
            PhiClass::PositiveDecreasing => Monotonicity::Decreasing,
            PhiClass::NegativeIncreasing => Monotonicity::Increasing,
            PhiClass::Constant => Monotonicity::Flat,
            PhiClass::Other => Monotonicity::Unknown,
        }
    }

    #[inline]
    pub fn value(&self, s: f64) -> f64 {
        match self.form {
            PhiForm::ExpDecay { c, b } => {
                if b == 0.0 {
                    c
                } else {
                    c * (-b * s).exp()
                }
            }
            PhiForm::DoubleExp { c1, b1, c2, b2 } => c1 * (-b1 * s).exp() + c2 * (-b2 * s).exp(),
        }
    }

    /// Positive decay rates appearing in the form.
    pub fn decay_rates(&self) -> Vec<f64> {
        let rates = match self.form {
            PhiForm::ExpDecay { b, .. } => vec![b],
            PhiForm::DoubleExp { b1, b2, .. } => vec![b1, b2],
        };
        rates.into_iter().filter(|&b| b > 0.0).collect()
    }

    /// Infimum and supremum of `phi` over `[a, b]` (b may be infinite).
    pub fn range_on(&self, a: f64, b: f64) -> (f64, f64) {
        let end = if b.is_finite() { self.value(b) } else { self.limit() };
        let mut lo = self.value(a).min(end);
        let mut hi = self.value(a).max(end);
        if let PhiForm::DoubleExp { .. } = self.form {
            let top = if b.is_finite() { b } else { CLASSIFY_HORIZON.max(a + 1.0) };
            let n = 2000;
            for i in 0..=n {
                let v = self.value(a + (top - a) * i as f64 / n as f64);
                lo = lo.min(v);
                hi = hi.max(v);
            }
        }
        (lo, hi)
    }

    /// `lim_{s -> ∞} phi_s`.
    pub fn limit(&self) -> f64 {
        match self.form {
            PhiForm::ExpDecay { c, b } => {
                if b == 0.0 {
                    c
                } else {
                    0.0
                }
            }
            PhiForm::DoubleExp { c1, b1, c2, b2 } => {
                (if b1 == 0.0 { c1 } else { 0.0 }) + (if b2 == 0.0 { c2 } else { 0.0 })
            }
        }
    }

    /// Checks `phi_s` lies in the exponent domain for every `s` in `[0, horizon]`.
    pub fn check_admissible(&self, family: &LevyFamily, horizon: f64) -> Result<()> {
        let (lo, hi) = self.range_on(0.0, horizon);
        let dom = family.domain();
        for v in [lo, hi] {
            dom.check(v).map_err(|e| {
                Error::domain(format!(
                    "phi leaves the {} exponent domain on [0, {horizon:.1}]: {e}",
                    family.name()
                ))
            })?;
        }
        Ok(())
    }
}

fn classify(form: &PhiForm) -> PhiClass {
    match *form {
        PhiForm::ExpDecay { c, b } => {
            if b == 0.0 || c == 0.0 {
                PhiClass::Constant
            } else if c > 0.0 {
                PhiClass::PositiveDecreasing
            } else {
                PhiClass::NegativeIncreasing
            }
        }
        PhiForm::DoubleExp { c1, b1, c2, b2 } => {
            let f = |s: f64| c1 * (-b1 * s).exp() + c2 * (-b2 * s).exp();
            let df = |s: f64| -c1 * b1 * (-b1 * s).exp() - c2 * b2 * (-b2 * s).exp();
            let n = 4000;
            let pts: Vec<f64> = (0..=n).map(|i| CLASSIFY_HORIZON * (i as f64 / n as f64).powi(2)).collect();
            let all = |p: &dyn Fn(f64) -> bool| pts.iter().all(|&s| p(s));
            if all(&|s| df(s) == 0.0) {
                PhiClass::Constant
            } else if all(&|s| f(s) > 0.0) && all(&|s| df(s) < 0.0) {
                PhiClass::PositiveDecreasing
            } else if all(&|s| f(s) < 0.0) && all(&|s| df(s) > 0.0) {
                PhiClass::NegativeIncreasing
            } else {
                PhiClass::Other
            }
        }
    }
}

/// Realised driver value `xi = X_t` at time `t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelState {
    pub t: f64,
    pub xi: f64,
}

impl ModelState {
    pub fn new(t: f64, xi: f64) -> Result<Self> {
        if !t.is_finite() || t < 0.0 {
            return Err(Error::domain(format!("state time must be finite and >= 0, got {t}")));
        }
        if !xi.is_finite() {
            return Err(Error::domain(format!("driver value must be finite, got {xi}")));
        }
        if t == 0.0 && xi != 0.0 {
            return Err(Error::domain(format!("the driver starts at 0, got xi = {xi} at t = 0")));
        }
        Ok(ModelState { t, xi })
    }

    pub fn initial() -> Self {
        ModelState { t: 0.0, xi: 0.0 }
    }

    /// Checks the state is reachable by the family's driver.
    pub fn check_for(&self, family: &LevyFamily) -> Result<()> {
        let (lo, hi) = family.support();
        if self.xi < lo || self.xi > hi {
            return Err(Error::domain(format!(
                "driver value {} lies outside the {} support [{lo}, {hi}]",
                self.xi,
                family.name()
            )));
        }
        Ok(())
    }
}

/// `ln M = phi_s xi - t psi(phi_s)` for a given `phi_s`, unchecked.
#[inline]
pub fn log_martingale_at(family: &LevyFamily, phi_s: f64, t: f64, xi: f64) -> f64 {
    if t == 0.0 {
        return 0.0;
    }
    phi_s * xi - t * family.exponent_unchecked(phi_s)
}

fn check_args(family: &LevyFamily, phi: &PhiFunction, state: &ModelState, s: f64) -> Result<f64> {
    if !(s >= state.t) {
        return Err(Error::domain(format!(
            "maturity s = {s} precedes the state time t = {}",
            state.t
        )));
    }
    state.check_for(family)?;
    let phi_s = phi.value(s);
    family.domain().check(phi_s)?;
    Ok(phi_s)
}

/// `ln M_ts`.
pub fn log_martingale_value(family: &LevyFamily, phi: &PhiFunction, state: &ModelState, s: f64) -> Result<f64> {
    let phi_s = check_args(family, phi, state, s)?;
    Ok(log_martingale_at(family, phi_s, state.t, state.xi))
}

/// `M_ts = exp(phi_s xi - t psi(phi_s))`.
pub fn martingale_value(family: &LevyFamily, phi: &PhiFunction, state: &ModelState, s: f64) -> Result<f64> {
    log_martingale_value(family, phi, state, s).map(f64::exp)
}
