//! European calls on discount bonds.
//!
//! A call with expiry `t`, bond maturity `T` and strike `K` is worth
//!
//! ```text
//! C = E[(∫_T^∞ rho_s M_ts ds - K ∫_t^∞ rho_s M_ts ds)^+].
//! ```
//!
//! When `phi` is monotone the bond price `P(t, T, xi)` is monotone in the
//! driver value, so the payoff is positive on one side of a critical level
//! `xi*`. Writing `Q_s` for the probability of that side under the measure
//! tilted by `M_ts`,
//!
//! ```text
//! C = (1 - K) ∫_T^∞ rho_s Q_s ds - K ∫_t^T rho_s Q_s ds,
//! ```
//!
//! and each driver family has a closed form (or a one-dimensional integral)
//! for `Q_s`. The Monte Carlo pricer evaluates the expectation directly and
//! serves as the reference for the semi-analytical formulas.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::curve::RateModel;
use crate::error::{Error, Result, StrikeSide};
use crate::levy::LevyFamily;
use crate::martingales::{ModelState, Monotonicity};
use crate::specialfn::{ln_gamma, norm_cdf, reg_gamma_pair, GammaMixture};
use crate::stats::{stream_rng, RunningStats};

/// Call on the bond maturing at `maturity`, exercisable at `expiry`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptionSpec {
    pub expiry: f64,
    pub maturity: f64,
    pub strike: f64,
}

impl OptionSpec {
    pub fn new(expiry: f64, maturity: f64, strike: f64) -> Result<Self> {
        let spec = OptionSpec {
            expiry,
            maturity,
            strike,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.expiry.is_finite() || self.expiry < 0.0 {
            return Err(Error::domain(format!("option expiry must be finite and >= 0, got {}", self.expiry)));
        }
        if !self.maturity.is_finite() || self.maturity < self.expiry {
            return Err(Error::domain(format!(
                "bond maturity {} must be finite and >= expiry {}",
                self.maturity, self.expiry
            )));
        }
        if !(self.strike > 0.0 && self.strike < 1.0) {
            return Err(Error::domain(format!("strike must lie in (0, 1), got {}", self.strike)));
        }
        Ok(())
    }
}

/// Driver value at which the bond price equals the strike.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CriticalLevel {
    pub xi: f64,
    /// Final bracket `[lo, hi]` containing `xi`.
    pub bracket: (f64, f64),
    /// `|P(t, T, xi) - K|`.
    pub residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PricingSettings {
    /// Poisson mass left out of the jump-diffusion series.
    pub series_tail: f64,
    /// Multiplier on the number of series terms implied by `series_tail`.
    pub series_scale: f64,
}

impl Default for PricingSettings {
    fn default() -> Self {
        PricingSettings {
            series_tail: 1e-12,
            series_scale: 1.0,
        }
    }
}

impl PricingSettings {
    pub fn validate(&self) -> Result<()> {
        if !(self.series_tail > 0.0 && self.series_tail < 1.0) || !(self.series_scale >= 1.0) {
            return Err(Error::domain(format!(
                "series_tail must be in (0, 1) and series_scale >= 1: {self:?}"
            )));
        }
        Ok(())
    }
}

/// Side of the critical level on which the call finishes in the money.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ExerciseRegion {
    Below,
    Above,
}

/// Analytic price with the information used to produce it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AnalyticPrice {
    pub price: f64,
    pub critical: Option<CriticalLevel>,
    /// Set when the strike lies outside the attainable price band.
    pub out_of_range: Option<StrikeSide>,
}

/// `P(t, T, xi)`.
pub fn bond_price_at(model: &RateModel, t: f64, maturity: f64, xi: f64) -> Result<f64> {
    model.bond_price(&ModelState::new(t, xi)?, maturity)
}

const MAX_BRACKET_STEPS: usize = 24;
const MAX_REFINE_STEPS: usize = 200;
const RESIDUAL_TOL: f64 = 1e-12;

fn strike_error(spec: &OptionSpec, side: StrikeSide, lower: f64, upper: f64) -> Error {
    Error::StrikeOutOfRange {
        strike: spec.strike,
        side,
        lower,
        upper,
    }
}

/// Solves `P(t, T, xi*) = K` for a monotone `phi`.
///
/// The bracket grows geometrically from the mean of `X_t`, then shrinks by
/// the Illinois variant of regula falsi with a bisection safeguard.
pub fn solve_critical_level(model: &RateModel, spec: &OptionSpec) -> Result<CriticalLevel> {
    spec.validate()?;
    let (t, mat, k) = (spec.expiry, spec.maturity, spec.strike);
    let family = model.family();
    let dir = match model.phi().monotonicity() {
        Monotonicity::Unknown => {
            return Err(Error::Unsupported(format!(
                "phi of class {:?} gives bond prices that need not be monotone in the driver; use the Monte Carlo pricer",
                model.phi().class()
            )))
        }
        Monotonicity::Decreasing => 1.0,
        Monotonicity::Increasing => -1.0,
        Monotonicity::Flat => 0.0,
    };
    if dir == 0.0 || t == 0.0 || mat == t {
        // the bond price does not depend on the driver
        let p = model.term_structure().forward_price(t, mat)?;
        let side = if p > k { StrikeSide::BelowRange } else { StrikeSide::AboveRange };
        return Err(strike_error(spec, side, p, p));
    }

    // h is decreasing in xi with a root at xi*
    let h = |xi: f64| -> Result<(f64, f64)> {
        let p = bond_price_at(model, t, mat, xi)?;
        Ok((dir * (p - k), p))
    };
    let (lo_sup, hi_sup) = family.support();
    let x0 = family.mean(t).clamp(lo_sup, hi_sup);
    let mut step = family.variance(t).sqrt().max(1e-3);
    let (h0, p0) = h(x0)?;
    if h0 == 0.0 {
        return Ok(CriticalLevel {
            xi: x0,
            bracket: (x0, x0),
            residual: 0.0,
        });
    }

    // (xi, h) at each end of the bracket
    let (mut a, mut ha, mut b, mut hb);
    if h0 > 0.0 {
        // root to the right
        a = x0;
        ha = h0;
        let mut x = x0;
        let mut found = None;
        for _ in 0..MAX_BRACKET_STEPS {
            x += step;
            step *= 2.0;
            let (hx, _) = h(x)?;
            if hx <= 0.0 {
                found = Some((x, hx));
                break;
            }
            a = x;
            ha = hx;
        }
        match found {
            Some((x, hx)) => {
                b = x;
                hb = hx;
            }
            None => {
                let far = bond_price_at(model, t, mat, a)?;
                return Err(out_of_band(spec, dir, true, p0, far));
            }
        }
    } else {
        b = x0;
        hb = h0;
        let mut x = x0;
        let mut found = None;
        for _ in 0..MAX_BRACKET_STEPS {
            if x <= lo_sup {
                break;
            }
            x = (x - step).max(lo_sup);
            step *= 2.0;
            let (hx, _) = h(x)?;
            if hx >= 0.0 {
                found = Some((x, hx));
                break;
            }
            b = x;
            hb = hx;
        }
        match found {
            Some((x, hx)) => {
                a = x;
                ha = hx;
            }
            None => {
                let far = bond_price_at(model, t, mat, b)?;
                return Err(out_of_band(spec, dir, false, p0, far));
            }
        }
    }
    if ha == 0.0 {
        return Ok(CriticalLevel {
            xi: a,
            bracket: (a, a),
            residual: 0.0,
        });
    }
    if hb == 0.0 {
        return Ok(CriticalLevel {
            xi: b,
            bracket: (b, b),
            residual: 0.0,
        });
    }

    // Illinois iteration on [a, b] with ha > 0 > hb
    let mut side = 0i8;
    let mut best = if ha.abs() < hb.abs() { (a, ha) } else { (b, hb) };
    for _ in 0..MAX_REFINE_STEPS {
        if best.1.abs() <= 0.1 * RESIDUAL_TOL {
            break;
        }
        let mut x = (a * hb - b * ha) / (hb - ha);
        let width = b - a;
        if !(x > a && x < b) || width <= 0.0 {
            x = 0.5 * (a + b);
        }
        if !(x > a && x < b) {
            break;
        }
        let (hx, _) = h(x)?;
        if hx.abs() < best.1.abs() {
            best = (x, hx);
        }
        if hx == 0.0 {
            a = x;
            b = x;
            break;
        }
        if hx > 0.0 {
            a = x;
            ha = hx;
            if side == 1 {
                hb *= 0.5;
            }
            side = 1;
        } else {
            b = x;
            hb = hx;
            if side == -1 {
                ha *= 0.5;
            }
            side = -1;
        }
        // fall back to bisection when the bracket stalls
        if b - a > 0.5 * width {
            let m = 0.5 * (a + b);
            if m > a && m < b {
                let (hm, _) = h(m)?;
                if hm.abs() < best.1.abs() {
                    best = (m, hm);
                }
                if hm > 0.0 {
                    a = m;
                    ha = hm;
                } else if hm < 0.0 {
                    b = m;
                    hb = hm;
                } else {
                    a = m;
                    b = m;
                    best = (m, 0.0);
                    break;
                }
                side = 0;
            }
        }
    }
    let residual = best.1.abs();
    if residual > RESIDUAL_TOL {
        return Err(Error::numerical(format!(
            "critical level did not reach the residual target: xi={} residual={residual:e} bracket=[{a}, {b}]",
            best.0
        )));
    }
    Ok(CriticalLevel {
        xi: best.0,
        bracket: (a.min(best.0), b.max(best.0)),
        residual,
    })
}

// no root: `toward_right` says in which direction the search ran
fn out_of_band(spec: &OptionSpec, dir: f64, toward_right: bool, near: f64, far: f64) -> Error {
    let (lower, upper) = (near.min(far), near.max(far));
    // for dir > 0 (P decreasing), searching right means P > K everywhere
    let always_itm = (dir > 0.0) == toward_right;
    let side = if always_itm {
        StrikeSide::BelowRange
    } else {
        StrikeSide::AboveRange
    };
    strike_error(spec, side, lower, upper)
}

/// Analytic call price.
pub fn price_call_analytic(model: &RateModel, spec: &OptionSpec) -> Result<f64> {
    Ok(price_call_detailed(model, spec, &PricingSettings::default())?.price)
}

/// Analytic call price with the critical level and explicit series settings.
pub fn price_call_detailed(model: &RateModel, spec: &OptionSpec, settings: &PricingSettings) -> Result<AnalyticPrice> {
    settings.validate()?;
    let ts = model.term_structure();
    let (t, mat, k) = (spec.expiry, spec.maturity, spec.strike);
    let critical = match solve_critical_level(model, spec) {
        Ok(c) => c,
        Err(Error::StrikeOutOfRange { side, .. }) => {
            let price = match side {
                // the payoff is the whole of pi_T - K pi_t
                StrikeSide::BelowRange => (ts.discount_factor(mat)? - k * ts.discount_factor(t)?).max(0.0),
                StrikeSide::AboveRange => 0.0,
            };
            return Ok(AnalyticPrice {
                price,
                critical: None,
                out_of_range: Some(side),
            });
        }
        Err(e) => return Err(e),
    };
    let region = match model.phi().monotonicity() {
        Monotonicity::Decreasing => ExerciseRegion::Below,
        _ => ExerciseRegion::Above,
    };
    let law = TiltedLaw::new(model, t, critical.xi, region, settings)?;
    let q = |s: f64| law.probability(model.phi().value(s));
    let mut err = None;
    let mut guarded = |s: f64| match q(s) {
        Ok(v) => v,
        Err(e) => {
            err.get_or_insert(e);
            0.0
        }
    };
    let far = model.density_integral(mat, f64::INFINITY, &mut guarded)?;
    let near = model.density_integral(t, mat, &mut guarded)?;
    if let Some(e) = err {
        return Err(e);
    }
    let price = ((1.0 - k) * far - k * near).max(0.0);
    Ok(AnalyticPrice {
        price,
        critical: Some(critical),
        out_of_range: None,
    })
}

/// Probability that `X_t` lies in `region` relative to `xi_star` under the
/// measure tilted by `exp(alpha X_t - t psi(alpha))`.
pub fn tilted_probability(
    model: &RateModel,
    t: f64,
    xi_star: f64,
    region: ExerciseRegion,
    alpha: f64,
    settings: &PricingSettings,
) -> Result<f64> {
    TiltedLaw::new(model, t, xi_star, region, settings)?.probability(alpha)
}

// exercise probability as a function of the tilt, with per-expiry work done once
struct TiltedLaw<'a> {
    family: LevyFamily,
    t: f64,
    xi_star: f64,
    below: bool,
    settings: &'a PricingSettings,
    mixture: Option<GammaMixture>,
}

impl<'a> TiltedLaw<'a> {
    fn new(
        model: &RateModel,
        t: f64,
        xi_star: f64,
        region: ExerciseRegion,
        settings: &'a PricingSettings,
    ) -> Result<Self> {
        let family = *model.family();
        let mixture = match family {
            LevyFamily::VarianceGamma { rate, .. } => Some(GammaMixture::new(rate * t)?),
            _ => None,
        };
        Ok(TiltedLaw {
            family,
            t,
            xi_star,
            below: region == ExerciseRegion::Below,
            settings,
            mixture,
        })
    }

    fn probability(&self, alpha: f64) -> Result<f64> {
        let (t, xi_star, below) = (self.t, self.xi_star, self.below);
        let p = match self.family {
            LevyFamily::Gbm => {
                let sq = t.sqrt();
                let z = xi_star / sq - alpha * sq;
                norm_cdf(if below { z } else { -z })
            }
            LevyFamily::JumpDiffusion {
                intensity,
                jump_mean,
                jump_std,
            } => {
                // tilted jump intensity: lambda * E[exp(alpha J)]
                let tilted = intensity * (alpha * jump_mean + 0.5 * alpha * alpha * jump_std * jump_std).exp();
                let n_terms = poisson_cutoff(tilted * t, self.settings);
                let mean = tilted * t;
                let ln_mean = mean.ln();
                let mut sum = 0.0;
                for n in 0..=n_terms {
                    let nf = n as f64;
                    let ln_p = if mean == 0.0 {
                        if n == 0 {
                            0.0
                        } else {
                            f64::NEG_INFINITY
                        }
                    } else {
                        -mean + nf * ln_mean - ln_gamma(nf + 1.0)
                    };
                    let v = (t + nf * jump_std * jump_std).sqrt();
                    let z = (xi_star - nf * jump_mean) / v - alpha * v;
                    sum += ln_p.exp() * norm_cdf(if below { z } else { -z });
                }
                sum
            }
            LevyFamily::Gamma { rate, scale } => {
                let x = (xi_star * (1.0 / scale - alpha)).max(0.0);
                let (lower, upper) = reg_gamma_pair(rate * t, x)?;
                if below {
                    lower
                } else {
                    upper
                }
            }
            LevyFamily::VarianceGamma {
                drift,
                volatility,
                rate,
            } => {
                let big_phi = (rate - drift * alpha - 0.5 * volatility * volatility * alpha * alpha).powf(-0.5);
                let a = xi_star / (volatility * big_phi);
                let b = -(drift / volatility + volatility * alpha) * big_phi;
                let mixture = self.mixture.as_ref().expect("mixture built for variance gamma");
                if below {
                    mixture.psi(a, b)?
                } else {
                    mixture.psi(-a, -b)?
                }
            }
        };
        if !p.is_finite() {
            return Err(Error::numerical(format!(
                "tilted probability is not finite (alpha={alpha}, xi*={xi_star})"
            )));
        }
        Ok(p.clamp(0.0, 1.0))
    }
}

/// Last Poisson index kept: the series is cut once the remaining mass drops
/// below `series_tail`, then stretched by `series_scale`.
fn poisson_cutoff(mean: f64, settings: &PricingSettings) -> usize {
    if mean <= 0.0 {
        return 0;
    }
    let ln_mean = mean.ln();
    let mut cum = 0.0;
    let mut n = 0usize;
    loop {
        let nf = n as f64;
        cum += (-mean + nf * ln_mean - ln_gamma(nf + 1.0)).exp();
        if (nf > mean && 1.0 - cum < settings.series_tail) || n > 100_000 {
            break;
        }
        n += 1;
    }
    ((n + 1) as f64 * settings.series_scale).ceil() as usize
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct McSettings {
    pub paths: usize,
    pub seed: u64,
    /// Paths per independent random stream.
    pub block_size: usize,
}

impl Default for McSettings {
    fn default() -> Self {
        McSettings {
            paths: 100_000,
            seed: 42,
            block_size: 4096,
        }
    }
}

impl McSettings {
    pub fn validate(&self) -> Result<()> {
        if self.paths < 1000 {
            return Err(Error::domain(format!("Monte Carlo needs at least 1000 paths, got {}", self.paths)));
        }
        if self.block_size == 0 {
            return Err(Error::domain("Monte Carlo block size must be positive"));
        }
        Ok(())
    }

    /// `(stream index, path count)` per block.
    fn blocks(&self) -> Vec<(u64, usize)> {
        let n = self.paths.div_ceil(self.block_size);
        (0..n)
            .map(|i| (i as u64, self.block_size.min(self.paths - i * self.block_size)))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McEstimate {
    pub price: f64,
    pub std_error: f64,
    pub paths: usize,
}

/// Runs `f` on `paths` exact draws of `X_t`, accumulating one statistic per
/// output slot. Blocks use their own streams and are merged in order, so the
/// result does not depend on the thread count.
pub fn monte_carlo_over_driver<F>(
    family: &LevyFamily,
    t: f64,
    settings: &McSettings,
    slots: usize,
    f: F,
) -> Result<Vec<RunningStats>>
where
    F: Fn(f64, &mut [f64]) -> Result<()> + Sync,
{
    settings.validate()?;
    let per_block: Vec<Result<Vec<RunningStats>>> = settings
        .blocks()
        .into_par_iter()
        .map(|(stream, n)| {
            let mut rng = stream_rng(settings.seed, stream);
            let mut stats = vec![RunningStats::new(); slots];
            let mut out = vec![0.0; slots];
            for _ in 0..n {
                let xi = if t == 0.0 { 0.0 } else { family.sample_increment(t, &mut rng)? };
                f(xi, &mut out)?;
                for (s, &v) in stats.iter_mut().zip(out.iter()) {
                    s.push(v);
                }
            }
            Ok(stats)
        })
        .collect();
    let mut total = vec![RunningStats::new(); slots];
    for block in per_block {
        for (acc, s) in total.iter_mut().zip(block?.iter()) {
            acc.merge(s);
        }
    }
    Ok(total)
}

/// Monte Carlo prices of several calls sharing the expiry `t`, on common
/// draws of `X_t`. Each entry of `contracts` is `(maturity, strike)`.
pub fn price_calls_mc(model: &RateModel, t: f64, contracts: &[(f64, f64)], settings: &McSettings) -> Result<Vec<McEstimate>> {
    for &(mat, k) in contracts {
        OptionSpec::new(t, mat, k)?;
    }
    let mut maturities: Vec<f64> = contracts.iter().map(|c| c.0).collect();
    maturities.sort_by(f64::total_cmp);
    maturities.dedup();
    let index: Vec<usize> = contracts
        .iter()
        .map(|c| maturities.iter().position(|&m| m == c.0).expect("maturity listed"))
        .collect();

    let stats = monte_carlo_over_driver(model.family(), t, settings, contracts.len(), |xi, out| {
        let state = ModelState::new(t, xi)?;
        // ln of ∫_t^T and ∫_T^∞ for each distinct maturity
        let mut near = Vec::with_capacity(maturities.len());
        let mut far = Vec::with_capacity(maturities.len());
        for &m in &maturities {
            near.push(model.log_kernel_integral_between(&state, t, m)?);
            far.push(model.log_kernel_integral(&state, m)?);
        }
        for (slot, (&(_, k), &j)) in out.iter_mut().zip(contracts.iter().zip(index.iter())) {
            let payoff = (1.0 - k) * far[j].exp() - k * near[j].exp();
            *slot = payoff.max(0.0);
        }
        Ok(())
    })?;
    Ok(stats
        .iter()
        .map(|s| McEstimate {
            price: s.mean(),
            std_error: s.std_error(),
            paths: s.count() as usize,
        })
        .collect())
}

/// Monte Carlo price of one call.
pub fn price_call_mc(model: &RateModel, spec: &OptionSpec, settings: &McSettings) -> Result<McEstimate> {
    spec.validate()?;
    Ok(price_calls_mc(model, spec.expiry, &[(spec.maturity, spec.strike)], settings)?[0])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::martingales::PhiFunction;
    use crate::termstructure::TermStructure;
    use approx::assert_relative_eq;

    fn gbm_fig1() -> RateModel {
        RateModel::new(
            TermStructure::flat(0.02),
            LevyFamily::Gbm,
            PhiFunction::exp_decay(0.3, 0.02).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn spec_validation() {
        assert!(OptionSpec::new(1.0, 5.0, 0.9).is_ok());
        assert!(OptionSpec::new(1.0, 5.0, 0.0).is_err());
        assert!(OptionSpec::new(1.0, 5.0, 1.0).is_err());
        assert!(OptionSpec::new(5.0, 1.0, 0.5).is_err());
        assert!(OptionSpec::new(-1.0, 1.0, 0.5).is_err());
    }

    #[test]
    fn critical_level_at_the_money_forward() {
        let m = gbm_fig1();
        let k = bond_price_at(&m, 1.0, 5.0, 0.0).unwrap();
        let c = solve_critical_level(&m, &OptionSpec::new(1.0, 5.0, k).unwrap()).unwrap();
        assert!(c.xi.abs() < 1e-9, "{c:?}");
        assert!(c.residual <= 1e-12);
    }

    #[test]
    fn critical_level_residual() {
        let m = gbm_fig1();
        let spec = OptionSpec::new(1.0, 5.0, 0.9).unwrap();
        let c = solve_critical_level(&m, &spec).unwrap();
        let p = bond_price_at(&m, 1.0, 5.0, c.xi).unwrap();
        assert!((p - 0.9).abs() <= 1e-12);
        assert!(c.bracket.0 <= c.xi && c.xi <= c.bracket.1);
    }

    #[test]
    fn degenerate_cases_price_the_forward() {
        let m = gbm_fig1();
        let p0 = (-0.1f64).exp();
        let c = price_call_analytic(&m, &OptionSpec::new(0.0, 5.0, 0.8).unwrap()).unwrap();
        assert_relative_eq!(c, p0 - 0.8, max_relative = 1e-14);
        assert_eq!(price_call_analytic(&m, &OptionSpec::new(0.0, 5.0, 0.95).unwrap()).unwrap(), 0.0);
        let same = price_call_analytic(&m, &OptionSpec::new(2.0, 2.0, 0.5).unwrap()).unwrap();
        assert_relative_eq!(same, 0.5 * (-0.04f64).exp(), max_relative = 1e-14);
    }

    #[test]
    fn non_monotone_phi_is_unsupported() {
        let m = RateModel::new(
            TermStructure::flat(0.02),
            LevyFamily::Gbm,
            PhiFunction::double_exp(0.3, 0.02, -0.3, 0.5).unwrap(),
        )
        .unwrap();
        let spec = OptionSpec::new(1.0, 5.0, 0.9).unwrap();
        assert!(matches!(solve_critical_level(&m, &spec), Err(Error::Unsupported(_))));
        assert!(matches!(price_call_analytic(&m, &spec), Err(Error::Unsupported(_))));
        assert!(price_call_mc(&m, &spec, &McSettings { paths: 2000, ..Default::default() }).is_ok());
    }

    #[test]
    fn poisson_cutoff_grows_with_mean_and_scale() {
        let s = PricingSettings::default();
        let a = poisson_cutoff(5.0, &s);
        let b = poisson_cutoff(50.0, &s);
        assert!(a > 5 && b > a);
        let doubled = poisson_cutoff(5.0, &PricingSettings { series_scale: 2.0, ..s });
        assert_eq!(doubled, 2 * a);
        assert_eq!(poisson_cutoff(0.0, &s), 0);
    }

    #[test]
    fn mc_is_deterministic_in_seed() {
        let m = gbm_fig1();
        let spec = OptionSpec::new(1.0, 5.0, 0.9).unwrap();
        let cfg = McSettings {
            paths: 3000,
            seed: 9,
            block_size: 512,
        };
        let a = price_call_mc(&m, &spec, &cfg).unwrap();
        let b = price_call_mc(&m, &spec, &cfg).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.paths, 3000);
        let c = price_call_mc(&m, &spec, &McSettings { seed: 10, ..cfg }).unwrap();
        assert_ne!(a.price, c.price);
    }

    #[test]
    fn mc_settings_validation() {
        assert!(McSettings { paths: 10, ..Default::default() }.validate().is_err());
        assert!(McSettings { block_size: 0, ..Default::default() }.validate().is_err());
        let blocks = McSettings {
            paths: 10_000,
            seed: 1,
            block_size: 4096,
        }
        .blocks();
        assert_eq!(blocks, vec![(0, 4096), (1, 4096), (2, 1808)]);
    }
}
