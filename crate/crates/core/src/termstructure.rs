//! Initial discount curve `P0(t)` and its term-structure density
//! `rho(t) = -dP0/dt`.
//!
//! Only analytic parametric curves are supported so the density is available
//! in closed form. New forms plug in by adding a [`CurveForm`] variant and
//! implementing the four evaluators below; everything downstream works
//! through [`DiscountCurve`].

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad::{self, Tolerance};

/// Default relative tail mass at which integrals over `[t, ∞)` are truncated.
pub const DEFAULT_TAIL_EPSILON: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum CurveForm {
    /// `P0(t) = exp(-rate * t)`.
    FlatYield { rate: f64 },
}

/// Minimal surface needed to validate a curve.
pub trait DiscountCurve {
    fn discount(&self, t: f64) -> f64;
    fn density_at(&self, t: f64) -> f64;
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TermStructure {
    form: CurveForm,
}

fn check_time(t: f64) -> Result<()> {
    if t.is_nan() || t < 0.0 {
        return Err(Error::domain(format!("time must be >= 0, got {t}")));
    }
    Ok(())
}

impl TermStructure {
    pub fn flat(rate: f64) -> Self {
        TermStructure {
            form: CurveForm::FlatYield { rate },
        }
    }

    pub fn form(&self) -> CurveForm {
        self.form
    }

    /// `P0(t)`.
    pub fn discount_factor(&self, t: f64) -> Result<f64> {
        check_time(t)?;
        Ok(self.discount(t))
    }

    /// `rho(t) = -dP0/dt`.
    pub fn density(&self, t: f64) -> Result<f64> {
        check_time(t)?;
        Ok(self.density_at(t))
    }

    /// `ln rho(t)`, accurate far into the tail where `rho` underflows.
    pub fn ln_density(&self, t: f64) -> f64 {
        match self.form {
            CurveForm::FlatYield { rate } => rate.ln() - rate * t,
        }
    }

    /// `ln P0(t)`.
    pub fn ln_discount(&self, t: f64) -> f64 {
        match self.form {
            CurveForm::FlatYield { rate } => -rate * t,
        }
    }

    /// Forward price ratio `P0(T) / P0(t)`.
    pub fn forward_price(&self, t: f64, maturity: f64) -> Result<f64> {
        check_time(t)?;
        check_time(maturity)?;
        Ok((self.ln_discount(maturity) - self.ln_discount(t)).exp())
    }

    /// Smallest time `S` with `P0(S) <= eps * P0(0)`.
    ///
    /// Returns infinity when the curve never decays that far.
    pub fn truncation_horizon(&self, eps: f64) -> f64 {
        match self.form {
            CurveForm::FlatYield { rate } => {
                if rate > 0.0 {
                    -eps.ln() / rate
                } else {
                    f64::INFINITY
                }
            }
        }
    }

    /// Exponential decay rate of `P0` and `rho` at long maturities.
    pub fn asymptotic_decay_rate(&self) -> f64 {
        match self.form {
            CurveForm::FlatYield { rate } => rate,
        }
    }

    pub fn validate(&self) -> ValidationReport {
        validate_curve(self, self.truncation_horizon(DEFAULT_TAIL_EPSILON))
    }
}

impl DiscountCurve for TermStructure {
    fn discount(&self, t: f64) -> f64 {
        self.ln_discount(t).exp()
    }

    fn density_at(&self, t: f64) -> f64 {
        match self.form {
            CurveForm::FlatYield { rate } => rate * (-rate * t).exp(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurveCheck {
    pub name: &'static str,
    pub passed: bool,
    /// Largest violation seen (0 when the check passed cleanly).
    pub worst: f64,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub checks: Vec<CurveCheck>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        !self.checks.is_empty() && self.checks.iter().all(|c| c.passed)
    }

    pub fn worst_failure(&self) -> Option<&CurveCheck> {
        self.checks
            .iter()
            .filter(|c| !c.passed)
            .max_by(|a, b| a.worst.total_cmp(&b.worst))
    }
}

/// Checks the curve invariants on a logarithmic grid out to `horizon`.
pub fn validate_curve<C: DiscountCurve + ?Sized>(curve: &C, horizon: f64) -> ValidationReport {
    let mut checks = Vec::new();

    if !horizon.is_finite() || horizon <= 0.0 {
        checks.push(CurveCheck {
            name: "finite truncation horizon",
            passed: false,
            worst: f64::INFINITY,
            detail: format!("P0 never decays below the tail threshold (horizon {horizon})"),
        });
        // the remaining checks still run on a fixed 100-year window
    }
    let h = if horizon.is_finite() && horizon > 0.0 {
        horizon
    } else {
        100.0
    };

    let n = 400;
    let lo: f64 = 1e-6;
    let mut grid = vec![0.0];
    grid.extend((0..n).map(|i| lo * (h / lo).powf(i as f64 / (n - 1) as f64)));

    let p0 = curve.discount(0.0);
    checks.push(CurveCheck {
        name: "P0(0) = 1",
        passed: (p0 - 1.0).abs() <= 1e-15,
        worst: (p0 - 1.0).abs(),
        detail: format!("P0(0) = {p0}"),
    });

    let mut worst_inc = 0.0f64;
    for w in grid.windows(2) {
        let d = curve.discount(w[1]) - curve.discount(w[0]);
        if d >= 0.0 {
            worst_inc = worst_inc.max(d.max(f64::MIN_POSITIVE));
        }
    }
    checks.push(CurveCheck {
        name: "P0 strictly decreasing",
        passed: worst_inc == 0.0,
        worst: worst_inc,
        detail: format!("largest non-negative step {worst_inc:e}"),
    });

    let mut worst_rho = 0.0f64;
    for &t in &grid {
        let r = curve.density_at(t);
        if !(r > 0.0) {
            worst_rho = worst_rho.max(if r.is_nan() { f64::INFINITY } else { -r + f64::MIN_POSITIVE });
        }
    }
    checks.push(CurveCheck {
        name: "density positive",
        passed: worst_rho == 0.0,
        worst: worst_rho,
        detail: format!("worst non-positive density magnitude {worst_rho:e}"),
    });

    let mut worst_fd = 0.0f64;
    for &t in grid.iter().filter(|&&t| t > 1e-3 && t < h) {
        let step = 1e-5 * t.max(1.0);
        let fd = -(curve.discount(t + step) - curve.discount(t - step)) / (2.0 * step);
        let r = curve.density_at(t);
        let scale = r.abs().max(f64::MIN_POSITIVE);
        if curve.discount(t) > 1e-8 {
            worst_fd = worst_fd.max((fd - r).abs() / scale);
        }
    }
    checks.push(CurveCheck {
        name: "density = -dP0/dt",
        passed: worst_fd <= 1e-6,
        worst: worst_fd,
        detail: format!("worst relative finite-difference mismatch {worst_fd:e}"),
    });

    let mass = quad::integrate(
        |s| curve.density_at(s),
        &grid_breaks(h),
        Tolerance {
            rel: 1e-13,
            abs: 1e-15,
            max_subdivisions: 2000,
        },
    );
    match mass {
        Ok(m) => {
            let defect = (m.value + curve.discount(h) - 1.0).abs();
            checks.push(CurveCheck {
                name: "density integrates to 1",
                passed: defect < 1e-10,
                worst: defect,
                detail: format!("|∫rho + P0(S) - 1| = {defect:e}"),
            });
        }
        Err(e) => checks.push(CurveCheck {
            name: "density integrates to 1",
            passed: false,
            worst: f64::INFINITY,
            detail: e.to_string(),
        }),
    }

    let tail = curve.discount(h);
    checks.push(CurveCheck {
        name: "P0 decays to 0",
        passed: horizon.is_finite() && tail <= 1e-10,
        worst: tail,
        detail: format!("P0(horizon) = {tail:e}"),
    });

    ValidationReport { checks }
}

fn grid_breaks(h: f64) -> Vec<f64> {
    let mut b = vec![0.0];
    let mut x = 1.0;
    while x < h {
        b.push(x);
        x *= 2.0;
    }
    b.push(h);
    b
}
