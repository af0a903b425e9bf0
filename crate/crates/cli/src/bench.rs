//! Wall-clock cost of analytic call prices per model.

use std::time::Instant;

use fh_levy::options::price_call_detailed;
use fh_levy::{OptionSpec, PricingSettings, RateModel};

use crate::output::{num, Csv};

#[derive(Debug, Clone, PartialEq)]
pub struct Timing {
    pub name: String,
    pub family: &'static str,
    pub prices: Vec<f64>,
    /// Fastest of the repetitions.
    pub seconds: f64,
}

impl Timing {
    pub fn per_price(&self) -> f64 {
        self.seconds / self.prices.len() as f64
    }
}

/// Prices `contracts` under each model on the calling thread, `repeats`
/// times, keeping the fastest run. Prices are identical across repetitions.
pub fn run(models: &[(String, RateModel)], contracts: &[OptionSpec], repeats: usize) -> fh_levy::Result<Vec<Timing>> {
    let settings = PricingSettings::default();
    let mut out = Vec::with_capacity(models.len());
    for (name, model) in models {
        let mut best = f64::INFINITY;
        let mut prices = Vec::new();
        for _ in 0..repeats.max(1) {
            let start = Instant::now();
            prices = contracts
                .iter()
                .map(|c| price_call_detailed(model, c, &settings).map(|p| p.price))
                .collect::<fh_levy::Result<Vec<f64>>>()?;
            best = best.min(start.elapsed().as_secs_f64());
        }
        out.push(Timing {
            name: name.clone(),
            family: model.family().name(),
            prices,
            seconds: best,
        });
    }
    Ok(out)
}

/// Name of the slowest model, if it is strictly slower than every other.
pub fn strictly_slowest(timings: &[Timing]) -> Option<&str> {
    let (i, top) = timings
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.seconds.total_cmp(&b.1.seconds))?;
    timings
        .iter()
        .enumerate()
        .all(|(j, t)| j == i || t.seconds < top.seconds)
        .then_some(top.name.as_str())
}

pub fn render(timings: &[Timing], provenance: &str) -> String {
    let mut csv = Csv::new(
        provenance,
        &["model", "family", "prices", "seconds[s]", "per_price[s]", "price_sum"],
    );
    for t in timings {
        csv.row([
            t.name.clone(),
            t.family.to_string(),
            t.prices.len().to_string(),
            format!("{:.6}", t.seconds),
            format!("{:.3e}", t.per_price()),
            num(t.prices.iter().sum()),
        ]);
    }
    csv.finish()
}
