//! Bond, rate and option reports for the `price` and `surface` commands.

use fh_levy::error::StrikeSide;
use fh_levy::options::{price_call_detailed, price_calls_mc};
use fh_levy::{McEstimate, McSettings, OptionSpec, PricingSettings, RateModel};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::PriceSpec;
use crate::output::{num, Csv};

#[derive(Debug, Clone, Serialize)]
pub struct BondQuote {
    pub maturity: f64,
    pub bond_price: f64,
    pub forward_rate: f64,
    pub volatility: f64,
    pub risk_premium: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct StateReport {
    pub t: f64,
    pub xi: f64,
    pub short_rate: f64,
    pub risk_aversion: f64,
    /// Requested maturities at or after `t`.
    pub bonds: Vec<BondQuote>,
}

#[derive(Debug, Clone, Serialize)]
pub struct OptionQuote {
    pub expiry: f64,
    pub maturity: f64,
    pub strike: f64,
    pub price: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub critical_level: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out_of_range: Option<StrikeSide>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mc_price: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub std_error: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct PriceReport {
    pub command: &'static str,
    pub config_hash: String,
    pub seed: u64,
    pub family: &'static str,
    pub states: Vec<StateReport>,
    pub options: Vec<OptionQuote>,
}

pub fn state_reports(model: &RateModel, spec: &PriceSpec) -> fh_levy::Result<Vec<StateReport>> {
    let states = spec.states.iter().map(|s| fh_levy::ModelState::new(s.t, s.xi)).collect::<fh_levy::Result<Vec<_>>>()?;
    states
        .par_iter()
        .map(|st| {
            let bonds = spec
                .maturities
                .iter()
                .filter(|&&m| m >= st.t)
                .map(|&m| {
                    let risk = model.risk_metrics(st, m)?;
                    Ok(BondQuote {
                        maturity: m,
                        bond_price: model.bond_price(st, m)?,
                        forward_rate: model.forward_rate(st, m)?,
                        volatility: risk.volatility,
                        risk_premium: risk.premium,
                    })
                })
                .collect::<fh_levy::Result<Vec<_>>>()?;
            Ok(StateReport {
                t: st.t,
                xi: st.xi,
                short_rate: model.short_rate(st)?,
                risk_aversion: model.risk_aversion(st)?,
                bonds,
            })
        })
        .collect()
}

/// Analytic prices, plus Monte Carlo estimates when `mc` is given. Contracts
/// sharing an expiry share their Monte Carlo draws.
pub fn option_quotes(
    model: &RateModel,
    contracts: &[OptionSpec],
    mc: Option<&McSettings>,
) -> fh_levy::Result<Vec<OptionQuote>> {
    let settings = PricingSettings::default();
    let mut quotes = contracts
        .par_iter()
        .map(|spec| {
            let p = price_call_detailed(model, spec, &settings)?;
            Ok(OptionQuote {
                expiry: spec.expiry,
                maturity: spec.maturity,
                strike: spec.strike,
                price: p.price,
                critical_level: p.critical.map(|c| c.xi),
                out_of_range: p.out_of_range,
                mc_price: None,
                std_error: None,
            })
        })
        .collect::<fh_levy::Result<Vec<_>>>()?;
    if let Some(mc) = mc {
        let estimates = mc_estimates(model, contracts, mc)?;
        for (q, e) in quotes.iter_mut().zip(estimates) {
            q.mc_price = Some(e.price);
            q.std_error = Some(e.std_error);
        }
    }
    Ok(quotes)
}

fn mc_estimates(model: &RateModel, contracts: &[OptionSpec], mc: &McSettings) -> fh_levy::Result<Vec<McEstimate>> {
    let mut expiries: Vec<f64> = contracts.iter().map(|c| c.expiry).collect();
    expiries.sort_by(f64::total_cmp);
    expiries.dedup();
    let mut out: Vec<Option<McEstimate>> = vec![None; contracts.len()];
    for t in expiries {
        let idx: Vec<usize> = (0..contracts.len()).filter(|&i| contracts[i].expiry == t).collect();
        let group: Vec<(f64, f64)> = idx.iter().map(|&i| (contracts[i].maturity, contracts[i].strike)).collect();
        for (i, e) in idx.into_iter().zip(price_calls_mc(model, t, &group, mc)?) {
            out[i] = Some(e);
        }
    }
    Ok(out.into_iter().map(|e| e.expect("every contract priced")).collect())
}

pub fn render_surface(quotes: &[OptionQuote], provenance: &str, with_mc: bool) -> String {
    let mut columns = vec!["expiry[y]", "maturity[y]", "strike", "price", "critical_level"];
    if with_mc {
        columns.extend(["mc_price", "std_error"]);
    }
    let mut csv = Csv::new(provenance, &columns);
    for q in quotes {
        let mut row = vec![
            num(q.expiry),
            num(q.maturity),
            num(q.strike),
            num(q.price),
            match (q.critical_level, q.out_of_range) {
                (Some(xi), _) => num(xi),
                (None, Some(StrikeSide::BelowRange)) => "below_range".into(),
                (None, Some(StrikeSide::AboveRange)) => "above_range".into(),
                (None, None) => "degenerate".into(),
            },
        ];
        if with_mc {
            row.push(q.mc_price.map(num).unwrap_or_default());
            row.push(q.std_error.map(num).unwrap_or_default());
        }
        csv.row(row);
    }
    csv.finish()
}
