//! Command dispatch shared by the binary and the tests.

use crate::config::RunConfig;
use crate::error::{CliError, Result};
use crate::output::provenance;
use crate::{bench, report, simulate, validate};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Simulate,
    Price,
    Surface,
    Validate,
    Bench,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Simulate => "simulate",
            Command::Price => "price",
            Command::Surface => "surface",
            Command::Validate => "validate",
            Command::Bench => "bench",
        }
    }
}

/// Command-line values that take precedence over the config file.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Overrides {
    pub seed: Option<u64>,
    /// Monte Carlo paths, or simulated paths for `simulate`.
    pub paths: Option<usize>,
    /// Add Monte Carlo estimates to option output.
    pub mc: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub text: String,
    /// Failed checks (`validate`) or a broken ordering (`bench`).
    pub failures: Vec<String>,
}

impl Outcome {
    fn ok(text: String) -> Self {
        Outcome {
            text,
            failures: Vec::new(),
        }
    }
}

/// Config with the overrides applied. Its hash identifies the run.
pub fn effective_config(command: Command, mut config: RunConfig, overrides: &Overrides) -> RunConfig {
    if let Some(seed) = overrides.seed {
        config.seed = seed;
    }
    if let Some(paths) = overrides.paths {
        match (command, config.simulate.as_mut()) {
            (Command::Simulate, Some(sim)) => sim.paths = paths,
            _ => config.mc.paths = paths,
        }
    }
    config
}

pub fn run(command: Command, config: RunConfig, overrides: &Overrides) -> Result<Outcome> {
    let config = effective_config(command, config, overrides);
    let header = provenance(command.name(), &config.hash(), config.seed);
    let model = config.model()?;
    match command {
        Command::Simulate => {
            let spec = config
                .simulate
                .ok_or_else(|| CliError::config("simulate needs a \"simulate\" section"))?;
            spec.validate()?;
            let points = simulate::simulate(&model, &spec, config.seed)?;
            Ok(Outcome::ok(simulate::render(&points, &header)))
        }
        Command::Price => {
            let spec = config.price.clone().unwrap_or_default();
            spec.validate()?;
            let mc = overrides.mc.then(|| config.mc_settings()).transpose()?;
            let rep = report::PriceReport {
                command: command.name(),
                config_hash: config.hash(),
                seed: config.seed,
                family: model.family().name(),
                states: report::state_reports(&model, &spec)?,
                options: report::option_quotes(&model, &spec.options, mc.as_ref())?,
            };
            let mut text = serde_json::to_string_pretty(&rep).expect("report serializes");
            text.push('\n');
            Ok(Outcome::ok(text))
        }
        Command::Surface => {
            let contracts = surface_contracts(&config)?;
            let mc = overrides.mc.then(|| config.mc_settings()).transpose()?;
            let quotes = report::option_quotes(&model, &contracts, mc.as_ref())?;
            Ok(Outcome::ok(report::render_surface(&quotes, &header, overrides.mc)))
        }
        Command::Validate => {
            let checks = validate::run(&model, &config.mc_settings()?);
            let failures = checks
                .iter()
                .filter(|c| !c.passed)
                .map(|c| format!("{}: {}", c.name, c.detail))
                .collect();
            Ok(Outcome {
                text: validate::render(&checks, &header),
                failures,
            })
        }
        Command::Bench => {
            let contracts = surface_contracts(&config)?;
            let (models, repeats) = match &config.bench {
                Some(b) => {
                    let models = b
                        .models
                        .iter()
                        .map(|m| {
                            let model = config.model_for(&m.family, &m.phi)?;
                            let name = m.name.clone().unwrap_or_else(|| model.family().name().to_string());
                            Ok((name, model))
                        })
                        .collect::<Result<Vec<_>>>()?;
                    (models, b.repeats)
                }
                None => (vec![(model.family().name().to_string(), model)], 3),
            };
            let timings = bench::run(&models, &contracts, repeats)?;
            let mut text = bench::render(&timings, &header);
            let mut failures = Vec::new();
            if timings.len() > 1 {
                let slowest = bench::strictly_slowest(&timings);
                text.push_str(&format!("# slowest={}\n", slowest.unwrap_or("tie")));
                if slowest.is_none() {
                    failures.push("no strictly slowest model".to_string());
                }
            }
            Ok(Outcome { text, failures })
        }
    }
}

fn surface_contracts(config: &RunConfig) -> Result<Vec<fh_levy::OptionSpec>> {
    config
        .surface
        .as_ref()
        .ok_or_else(|| CliError::config("this command needs a \"surface\" section"))?
        .contracts()
}
