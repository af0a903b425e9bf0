//! Invariant suite run by `fhlevy validate` against one configured model.

use fh_levy::martingales::{martingale_value, Monotonicity};
use fh_levy::options::{bond_price_at, monte_carlo_over_driver, price_call_detailed, price_calls_mc, solve_critical_level};
use fh_levy::stats::stream_rng;
use fh_levy::{McSettings, ModelState, OptionSpec, PhiClass, PricingSettings, QuadratureSettings, RateModel};

use crate::output::Csv;

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &'static str, passed: bool, detail: impl Into<String>) -> Self {
        Check {
            name,
            passed,
            detail: detail.into(),
        }
    }

    fn skipped(name: &'static str, why: &str) -> Self {
        Check::new(name, true, format!("skipped: {why}"))
    }

    fn from_result(name: &'static str, r: fh_levy::Result<Check>) -> Self {
        r.unwrap_or_else(|e| Check::new(name, false, format!("error: {e}")))
    }
}

/// `mean + z sd` of `X_t`, clipped to the support of the driver.
pub fn quantile_state(model: &RateModel, t: f64, z: f64) -> f64 {
    let f = model.family();
    (f.mean(t) + z * f.variance(t).sqrt()).max(f.support().0)
}

/// Calls at `t in {1, 3}`, `T = t + 4`, struck at the bond prices of the
/// driver quantiles `z in {-1, 0, 1}`.
pub fn reference_contracts(model: &RateModel) -> fh_levy::Result<Vec<OptionSpec>> {
    let mut out = Vec::new();
    for t in [1.0, 3.0] {
        for z in [-1.0, 0.0, 1.0] {
            let k = bond_price_at(model, t, t + 4.0, quantile_state(model, t, z))?;
            out.push(OptionSpec::new(t, t + 4.0, k)?);
        }
    }
    Ok(out)
}

pub fn run(model: &RateModel, mc: &McSettings) -> Vec<Check> {
    let monotone = model.phi().monotonicity() != Monotonicity::Unknown;
    let mut checks = vec![
        curve_invariants(model),
        Check::from_result("martingale_mean", martingale_mean(model, mc)),
        Check::from_result("kernel_mean", kernel_mean(model, mc)),
        Check::from_result("trivial_limits", trivial_limits(model)),
        Check::from_result("premium_positive", premium_positive(model, mc.seed)),
    ];
    if monotone {
        checks.push(Check::from_result("monotone_in_driver", monotone_in_driver(model)));
        checks.push(Check::from_result("price_bounds", price_bounds(model)));
        checks.push(Check::from_result("analytic_vs_mc", analytic_vs_mc(model, mc)));
        checks.push(Check::from_result("stability", stability(model)));
    } else {
        for name in ["monotone_in_driver", "price_bounds", "analytic_vs_mc", "stability"] {
            checks.push(Check::skipped(name, "phi is not monotone"));
        }
    }
    checks
}

pub fn render(checks: &[Check], provenance: &str) -> String {
    let mut csv = Csv::new(provenance, &["check", "status", "detail"]);
    for c in checks {
        let status = if c.passed { "pass" } else { "fail" };
        csv.row([c.name, status, &c.detail.replace(',', ";")]);
    }
    csv.finish()
}

fn curve_invariants(model: &RateModel) -> Check {
    let report = model.term_structure().validate();
    match report.worst_failure() {
        None if report.passed() => Check::new("curve_invariants", true, format!("{} checks", report.checks.len())),
        Some(c) => Check::new("curve_invariants", false, format!("{}: {}", c.name, c.detail)),
        None => Check::new("curve_invariants", false, "no checks ran"),
    }
}

/// Why a z-test on `n` draws of `M_ts` with tilt `alpha` would be unreliable:
/// the standard error itself is only trustworthy when the kurtosis
/// `E[M^4] / E[M^2]^2 = exp(t (psi(4 alpha) - 2 psi(2 alpha)))` is small
/// next to `n`.
fn uninformative(model: &RateModel, t: f64, alphas: &[f64], n: usize) -> Option<String> {
    let f = model.family();
    for &a in alphas {
        if !f.domain().contains(4.0 * a) {
            return Some(format!("M has no fourth moment at phi = {a}"));
        }
        let ln_kurtosis = t * (f.exponent_unchecked(4.0 * a) - 2.0 * f.exponent_unchecked(2.0 * a));
        if ln_kurtosis > (0.1 * n as f64).ln() {
            return Some(format!(
                "kurtosis of M is e^{ln_kurtosis:.1} at t = {t}; the standard error is unreliable"
            ));
        }
    }
    None
}

fn martingale_mean(model: &RateModel, mc: &McSettings) -> fh_levy::Result<Check> {
    let mut worst = 0.0f64;
    for t in [1.0, 5.0] {
        let horizons = [t, 5.0, 10.0];
        let alphas: Vec<f64> = horizons.iter().map(|&s| model.phi().value(s)).collect();
        if let Some(why) = uninformative(model, t, &alphas, mc.paths) {
            return Ok(Check::skipped("martingale_mean", &why));
        }
        let stats = monte_carlo_over_driver(model.family(), t, mc, horizons.len(), |xi, out| {
            let st = ModelState::new(t, xi)?;
            for (o, &s) in out.iter_mut().zip(&horizons) {
                *o = martingale_value(model.family(), model.phi(), &st, s)?;
            }
            Ok(())
        })?;
        for s in &stats {
            worst = worst.max(z_score(s.mean() - 1.0, s.std_error()));
        }
    }
    Ok(Check::new("martingale_mean", worst <= 4.0, format!("worst |z| = {worst:.3}")))
}

fn kernel_mean(model: &RateModel, mc: &McSettings) -> fh_levy::Result<Check> {
    let mut worst = 0.0f64;
    for t in [1.0, 5.0] {
        let (lo, hi) = model.phi().range_on(t, model.horizon());
        if let Some(why) = uninformative(model, t, &[lo, hi], mc.paths) {
            return Ok(Check::skipped("kernel_mean", &why));
        }
        let stats = monte_carlo_over_driver(model.family(), t, mc, 1, |xi, out| {
            out[0] = model.pricing_kernel(&ModelState::new(t, xi)?)?;
            Ok(())
        })?;
        let p0 = model.term_structure().discount_factor(t)?;
        worst = worst.max(z_score(stats[0].mean() - p0, stats[0].std_error()));
    }
    Ok(Check::new("kernel_mean", worst <= 4.0, format!("worst |z| = {worst:.3}")))
}

fn z_score(diff: f64, se: f64) -> f64 {
    if diff == 0.0 {
        0.0
    } else {
        diff.abs() / se
    }
}

fn trivial_limits(model: &RateModel) -> fh_levy::Result<Check> {
    let ts = model.term_structure();
    let mut worst = 0.0f64;
    for mat in [0.0, 0.5, 1.0, 5.0, 10.0, 30.0] {
        let p = model.bond_price(&ModelState::initial(), mat)?;
        worst = worst.max((p - ts.discount_factor(mat)?).abs());
    }
    let mut unit = true;
    for t in [0.5, 2.0, 7.0] {
        let st = ModelState::new(t, quantile_state(model, t, 0.5))?;
        unit &= model.bond_price(&st, t)? == 1.0;
    }
    Ok(Check::new(
        "trivial_limits",
        worst <= 1e-12 && unit,
        format!("t=0 curve error {worst:.3e}; P(t;t) = 1: {unit}"),
    ))
}

fn premium_positive(model: &RateModel, seed: u64) -> fh_levy::Result<Check> {
    if !matches!(model.phi().class(), PhiClass::PositiveDecreasing | PhiClass::NegativeIncreasing) {
        return Ok(Check::skipped("premium_positive", "phi is neither positive-decreasing nor negative-increasing"));
    }
    let mut rng = stream_rng(seed, u64::MAX);
    let (mut states, mut violations) = (0usize, 0usize);
    for t in [0.5, 1.0, 3.0] {
        for _ in 0..300 {
            let st = ModelState::new(t, model.family().sample_increment(t, &mut rng)?)?;
            states += 1;
            for mat in [t + 1.0, t + 4.0] {
                if !(model.risk_premium(&st, mat)? > 0.0) {
                    violations += 1;
                }
            }
        }
    }
    Ok(Check::new(
        "premium_positive",
        violations == 0,
        format!("{violations} violations over {states} states"),
    ))
}

fn monotone_in_driver(model: &RateModel) -> fh_levy::Result<Check> {
    let increasing = model.phi().monotonicity() == Monotonicity::Increasing;
    let mut strict = true;
    let mut worst_residual = 0.0f64;
    for (t, mat) in [(1.0, 5.0), (3.0, 8.0)] {
        let lo = quantile_state(model, t, -6.0);
        let hi = quantile_state(model, t, 6.0);
        let prices = (0..201)
            .map(|i| bond_price_at(model, t, mat, lo + (hi - lo) * i as f64 / 200.0))
            .collect::<fh_levy::Result<Vec<f64>>>()?;
        strict &= prices.windows(2).all(|w| if increasing { w[1] > w[0] } else { w[1] < w[0] });
        let k = prices[100];
        let c = solve_critical_level(model, &OptionSpec::new(t, mat, k)?)?;
        worst_residual = worst_residual.max(c.residual);
    }
    Ok(Check::new(
        "monotone_in_driver",
        strict && worst_residual <= 1e-12,
        format!("strict: {strict}; worst critical-level residual {worst_residual:.3e}"),
    ))
}

fn price_bounds(model: &RateModel) -> fh_levy::Result<Check> {
    let ts = model.term_structure();
    let settings = PricingSettings::default();
    let mut ok = true;
    for (t, mat) in [(1.0, 5.0), (3.0, 8.0)] {
        let upper = ts.discount_factor(mat)?;
        let mut prev = f64::INFINITY;
        for i in 1..20 {
            let k = 0.05 * i as f64;
            let c = price_call_detailed(model, &OptionSpec::new(t, mat, k)?, &settings)?.price;
            ok &= (0.0..=upper).contains(&c) && c <= prev;
            prev = c;
        }
    }
    Ok(Check::new("price_bounds", ok, "0 <= C <= P0(T) and decreasing in strike"))
}

fn analytic_vs_mc(model: &RateModel, mc: &McSettings) -> fh_levy::Result<Check> {
    let contracts = reference_contracts(model)?;
    let settings = PricingSettings::default();
    let mut worst = 0.0f64;
    for t in [1.0, 3.0] {
        let group: Vec<&OptionSpec> = contracts.iter().filter(|c| c.expiry == t).collect();
        let pairs: Vec<(f64, f64)> = group.iter().map(|c| (c.maturity, c.strike)).collect();
        for (c, e) in group.iter().zip(price_calls_mc(model, t, &pairs, mc)?) {
            let a = price_call_detailed(model, c, &settings)?.price;
            worst = worst.max(z_score(a - e.price, e.std_error));
        }
    }
    Ok(Check::new("analytic_vs_mc", worst <= 3.0, format!("worst |z| = {worst:.3} over {} contracts", contracts.len())))
}

fn stability(model: &RateModel) -> fh_levy::Result<Check> {
    let fine = model.with_settings(QuadratureSettings {
        rel_tol: 0.5 * model.quadrature().rel_tol,
        ..*model.quadrature()
    })?;
    let doubled = PricingSettings {
        series_scale: 2.0,
        ..Default::default()
    };
    let mut worst = 0.0f64;
    for c in reference_contracts(model)? {
        let base = price_call_detailed(model, &c, &PricingSettings::default())?.price;
        let alt = price_call_detailed(&fine, &c, &doubled)?.price;
        worst = worst.max((base - alt).abs());
    }
    Ok(Check::new("stability", worst < 1e-8, format!("largest change {worst:.3e}")))
}
