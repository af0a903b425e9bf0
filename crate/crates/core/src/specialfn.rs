//! Normal distribution function, regularized incomplete gamma functions and
//! the gamma mixture of normal distribution functions `Psi`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad::{self, Tolerance};

const GAMMA_MAX_ITER: usize = 100_000;
const GAMMA_EPS: f64 = 1e-16;

/// Standard normal distribution function.
#[inline]
pub fn norm_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x * std::f64::consts::FRAC_1_SQRT_2)
}

/// `ln Γ(x)` for `x > 0`.
#[inline]
pub fn ln_gamma(x: f64) -> f64 {
    libm::lgamma(x)
}

fn check_gamma_args(a: f64, x: f64) -> Result<()> {
    if !(a > 0.0) || !a.is_finite() {
        return Err(Error::domain(format!("incomplete gamma shape must be finite and > 0, got {a}")));
    }
    if x.is_nan() || x < 0.0 {
        return Err(Error::domain(format!("incomplete gamma argument must be >= 0, got {x}")));
    }
    Ok(())
}

/// `ln(x^a e^{-x} / Γ(a))`.
fn ln_prefactor(a: f64, x: f64) -> f64 {
    a * x.ln() - x - ln_gamma(a)
}

fn lower_series(a: f64, x: f64) -> Result<f64> {
    let mut ap = a;
    let mut term = 1.0 / a;
    let mut sum = term;
    for _ in 0..GAMMA_MAX_ITER {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if term.abs() < sum.abs() * GAMMA_EPS {
            return Ok(sum * ln_prefactor(a, x).exp());
        }
    }
    Err(Error::numerical(format!(
        "incomplete gamma series did not converge for a={a}, x={x}"
    )))
}

// modified Lentz evaluation of the continued fraction for Q(a, x)
fn upper_fraction(a: f64, x: f64) -> Result<f64> {
    const TINY: f64 = 1e-300;
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..GAMMA_MAX_ITER {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < TINY {
            d = TINY;
        }
        c = b + an / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < GAMMA_EPS {
            return Ok(h * ln_prefactor(a, x).exp());
        }
    }
    Err(Error::numerical(format!(
        "incomplete gamma continued fraction did not converge for a={a}, x={x}"
    )))
}

/// Regularized lower and upper incomplete gamma functions `(P(a,x), Q(a,x))`.
pub fn reg_gamma_pair(a: f64, x: f64) -> Result<(f64, f64)> {
    check_gamma_args(a, x)?;
    if x == 0.0 {
        return Ok((0.0, 1.0));
    }
    if x.is_infinite() {
        return Ok((1.0, 0.0));
    }
    if x < a + 1.0 {
        let p = lower_series(a, x)?.min(1.0);
        Ok((p, 1.0 - p))
    } else {
        let q = upper_fraction(a, x)?.min(1.0);
        Ok((1.0 - q, q))
    }
}

/// `Q(a, x) = Γ(a, x) / Γ(a)`.
pub fn reg_upper_gamma(a: f64, x: f64) -> Result<f64> {
    reg_gamma_pair(a, x).map(|(_, q)| q)
}

/// `P(a, x) = γ(a, x) / Γ(a)`.
pub fn reg_lower_gamma(a: f64, x: f64) -> Result<f64> {
    reg_gamma_pair(a, x).map(|(p, _)| p)
}

/// Arguments of [`psi_integral`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PsiArgs {
    pub a: f64,
    pub b: f64,
    /// Gamma shape, `c > 0`.
    pub c: f64,
}

impl PsiArgs {
    pub fn new(a: f64, b: f64, c: f64) -> Result<Self> {
        if !(c > 0.0) || !c.is_finite() {
            return Err(Error::domain(format!("Psi shape c must be finite and > 0, got {c}")));
        }
        if a.is_nan() || b.is_nan() {
            return Err(Error::domain("Psi arguments must not be NaN"));
        }
        Ok(PsiArgs { a, b, c })
    }
}

// mass neglected at each end of the gamma law
const PSI_TAIL: f64 = 1e-15;
const PSI_ABS_TOL: f64 = 1e-10;

/// `[ln u_lo, ln u_hi]` outside which a `Gamma(c, 1)` law has at most `tail`
/// mass on each side, from the Chernoff bounds
/// `P(U >< rc) <= exp(-c (r - 1 - ln r))` and, below, `P(U <= u) <= u^c / Γ(c+1)`.
fn gamma_log_range(c: f64, tail: f64) -> (f64, f64) {
    let k = -tail.ln() / c;
    // lower root of e^q - 1 - q = k in q = ln r < 0
    let mut q = -1.0 - k;
    for _ in 0..50 {
        let step = (q.exp() - 1.0 - q - k) / (q.exp() - 1.0);
        q -= step;
        if step.abs() < 1e-12 {
            break;
        }
    }
    let z_lo = (c.ln() + q).max((tail.ln() + ln_gamma(c + 1.0)) / c);
    // upper root of r - 1 - ln r = k in r > 1, Newton from the right
    let mut r = 1.0 + k + (2.0 * k).sqrt();
    for _ in 0..50 {
        let step = (r - 1.0 - r.ln() - k) / (1.0 - 1.0 / r);
        r -= step;
        if step.abs() < 1e-12 * r {
            break;
        }
    }
    (z_lo, (r * c).ln())
}

/// `Psi(a, b, c) = ∫_0^∞ N(a/√u + b√u) u^{c-1} e^{-u} / Γ(c) du`.
///
/// Integrated in `z = ln u` with breakpoints at the gamma mode and at the
/// sign change of the normal argument.
pub fn psi_integral(args: PsiArgs) -> Result<f64> {
    let PsiArgs { a, b, c } = PsiArgs::new(args.a, args.b, args.c)?;
    if a == 0.0 && b == 0.0 {
        return Ok(0.5);
    }
    if a == f64::INFINITY {
        return Ok(1.0);
    }
    if a == f64::NEG_INFINITY {
        return Ok(0.0);
    }
    let lg = ln_gamma(c);
    let (z_lo, z_hi) = gamma_log_range(c, PSI_TAIL);
    let mode = c.ln();
    let mut bps = vec![z_lo, mode.clamp(z_lo, z_hi), z_hi];
    if a * b < 0.0 {
        let z0 = (-a / b).ln();
        if z0 > z_lo && z0 < z_hi {
            bps.push(z0);
        }
    }
    bps.sort_by(f64::total_cmp);
    bps.dedup();
    let f = |z: f64| {
        let h = (0.5 * z).exp();
        let arg = if a == 0.0 { 0.0 } else { a / h } + if b == 0.0 { 0.0 } else { b * h };
        let w = (c * z - z.exp() - lg).exp();
        if w == 0.0 {
            0.0
        } else {
            norm_cdf(arg) * w
        }
    };
    let est = quad::integrate(f, &bps, Tolerance::absolute(PSI_ABS_TOL, 4000))?;
    Ok(est.value.clamp(0.0, 1.0))
}

/// `Psi(., ., c)` for a fixed shape, reusing the gamma weights across calls.
///
/// A composite Kronrod rule on fixed panels is applied first; when its
/// embedded Gauss estimate misses the tolerance (sharp normal transitions for
/// large `a` or `b`), the adaptive [`psi_integral`] takes over.
#[derive(Debug, Clone)]
pub struct GammaMixture {
    c: f64,
    // per panel: (exp(z/2), kronrod weight, gauss weight) with the density
    // folded in; nodes of negligible weight are dropped
    panels: Vec<Vec<(f64, f64, f64)>>,
}

// weight below which a mixture node is dropped
const MIXTURE_NODE_FLOOR: f64 = 1e-18;

// N(x) is within 1.2e-19 of 0 or 1 beyond this, far below the mixture tolerance
const MIXTURE_SATURATION: f64 = 9.0;

const MIXTURE_PANELS_PER_SIDE: usize = 3;

impl GammaMixture {
    pub fn new(c: f64) -> Result<Self> {
        PsiArgs::new(0.0, 0.0, c)?;
        let lg = ln_gamma(c);
        let (z_lo, z_hi) = gamma_log_range(c, PSI_TAIL);
        let mode = c.ln().clamp(z_lo, z_hi);
        let mut panels = Vec::with_capacity(2 * MIXTURE_PANELS_PER_SIDE);
        for (lo, hi) in [(z_lo, mode), (mode, z_hi)] {
            if hi <= lo {
                continue;
            }
            let width = (hi - lo) / MIXTURE_PANELS_PER_SIDE as f64;
            for p in 0..MIXTURE_PANELS_PER_SIDE {
                let a = lo + p as f64 * width;
                let panel: Vec<_> = quad::kronrod_nodes(a, a + width)
                    .into_iter()
                    .map(|(z, wk, wg)| {
                        let d = (c * z - z.exp() - lg).exp();
                        ((0.5 * z).exp(), wk * d, wg * d)
                    })
                    .filter(|&(_, wk, wg)| wk.abs().max(wg.abs()) > MIXTURE_NODE_FLOOR)
                    .collect();
                panels.push(panel);
            }
        }
        Ok(GammaMixture { c, panels })
    }

    pub fn shape(&self) -> f64 {
        self.c
    }

    /// `Psi(a, b, c)`.
    pub fn psi(&self, a: f64, b: f64) -> Result<f64> {
        if a.is_nan() || b.is_nan() {
            return Err(Error::domain("Psi arguments must not be NaN"));
        }
        if (a == 0.0 && b == 0.0) || a.is_infinite() {
            return psi_integral(PsiArgs::new(a, b, self.c)?);
        }
        let mut total = 0.0;
        let mut err = 0.0;
        for panel in &self.panels {
            let (mut k, mut g) = (0.0, 0.0);
            for &(h, wk, wg) in panel {
                let x = a / h + b * h;
                let v = if x > MIXTURE_SATURATION {
                    1.0
                } else if x < -MIXTURE_SATURATION {
                    0.0
                } else {
                    norm_cdf(x)
                };
                k += wk * v;
                g += wg * v;
            }
            total += k;
            err += (k - g).abs();
        }
        if err <= PSI_ABS_TOL {
            Ok(total.clamp(0.0, 1.0))
        } else {
            psi_integral(PsiArgs::new(a, b, self.c)?)
        }
    }
}
