//! JSON run configuration.
//!
//! A config names the initial curve, the driver family with its parameters
//! (flattened next to the `family` tag), the functional parameter `phi` and
//! one optional section per command:
//!
//! ```json
//! {
//!   "curve": {"form": "flat", "yield": 0.02},
//!   "family": "jump_diffusion", "lambda": 20.0, "mu": 0.0, "delta": 0.09,
//!   "phi": {"c": 0.3, "b": 0.02},
//!   "seed": 7,
//!   "simulate": {"maturity": 5.0, "steps": 500, "paths": 4}
//! }
//! ```

use std::path::Path;

use fh_levy::{
    LevyFamily, McSettings, ModelState, OptionSpec, PhiClass, PhiFunction, QuadratureSettings, RateModel, TermStructure,
};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case")]
pub enum CurveSpec {
    Flat {
        #[serde(rename = "yield")]
        rate: f64,
    },
}

impl CurveSpec {
    pub fn build(&self) -> TermStructure {
        match *self {
            CurveSpec::Flat { rate } => TermStructure::flat(rate),
        }
    }
}

/// Driver family with the parameter names used in the literature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum FamilySpec {
    Gbm,
    JumpDiffusion { lambda: f64, mu: f64, delta: f64 },
    Gamma { m: f64, kappa: f64 },
    Vg { mu: f64, sigma: f64, m: f64 },
}

impl FamilySpec {
    pub fn build(&self) -> Result<LevyFamily> {
        let family = match *self {
            FamilySpec::Gbm => Ok(LevyFamily::Gbm),
            FamilySpec::JumpDiffusion { lambda, mu, delta } => LevyFamily::jump_diffusion(lambda, mu, delta),
            FamilySpec::Gamma { m, kappa } => LevyFamily::gamma(m, kappa),
            FamilySpec::Vg { mu, sigma, m } => LevyFamily::variance_gamma(mu, sigma, m),
        };
        family.map_err(|e| CliError::invalid("family", e))
    }
}

/// `phi_s = c e^{-b s}`, or `c e^{-b s} + c2 e^{-b2 s}` when the second pair
/// is given. `class` asserts the expected shape.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhiSpec {
    pub c: f64,
    pub b: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c2: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b2: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub class: Option<PhiClass>,
}

impl PhiSpec {
    pub fn build(&self) -> Result<PhiFunction> {
        let phi = match (self.c2, self.b2) {
            (None, None) => PhiFunction::exp_decay(self.c, self.b),
            (Some(c2), Some(b2)) => PhiFunction::double_exp(self.c, self.b, c2, b2),
            _ => return Err(CliError::config("phi: c2 and b2 must be given together")),
        }
        .map_err(|e| CliError::invalid("phi", e))?;
        match self.class {
            Some(class) => phi.with_declared_class(class).map_err(|e| CliError::invalid("phi", e)),
            None => Ok(phi),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimulateSpec {
    /// Bond maturity; paths run on `[0, maturity]`.
    pub maturity: f64,
    #[serde(default = "default_steps")]
    pub steps: usize,
    #[serde(default = "default_sim_paths")]
    pub paths: usize,
}

fn default_steps() -> usize {
    500
}

fn default_sim_paths() -> usize {
    1
}

impl SimulateSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.maturity > 0.0 && self.maturity.is_finite()) {
            return Err(CliError::config(format!("simulate.maturity must be > 0, got {}", self.maturity)));
        }
        if self.steps == 0 || self.paths == 0 {
            return Err(CliError::config("simulate.steps and simulate.paths must be positive"));
        }
        Ok(())
    }

    /// Grid times `0, h, ..., maturity`; the last point is the maturity exactly.
    pub fn grid(&self) -> Vec<f64> {
        (0..=self.steps)
            .map(|i| self.maturity * (i as f64 / self.steps as f64))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StateSpec {
    pub t: f64,
    pub xi: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PriceSpec {
    #[serde(default)]
    pub states: Vec<StateSpec>,
    #[serde(default)]
    pub maturities: Vec<f64>,
    #[serde(default)]
    pub options: Vec<OptionSpec>,
}

impl PriceSpec {
    pub fn model_states(&self) -> Result<Vec<ModelState>> {
        self.states
            .iter()
            .map(|s| ModelState::new(s.t, s.xi).map_err(|e| CliError::invalid("price.states", e)))
            .collect()
    }

    pub fn validate(&self) -> Result<()> {
        self.model_states()?;
        if let Some(m) = self.maturities.iter().find(|m| !(m.is_finite() && **m >= 0.0)) {
            return Err(CliError::config(format!("price.maturities must be finite and >= 0, got {m}")));
        }
        for o in &self.options {
            o.validate().map_err(|e| CliError::invalid("price.options", e))?;
        }
        Ok(())
    }
}

/// Strike-by-expiry grid of calls on one bond.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurfaceSpec {
    pub maturity: f64,
    pub expiries: Vec<f64>,
    pub strikes: Vec<f64>,
}

impl SurfaceSpec {
    /// Contracts in expiry-major order.
    pub fn contracts(&self) -> Result<Vec<OptionSpec>> {
        if self.expiries.is_empty() || self.strikes.is_empty() {
            return Err(CliError::config("surface needs at least one expiry and one strike"));
        }
        let mut out = Vec::with_capacity(self.expiries.len() * self.strikes.len());
        for &t in &self.expiries {
            for &k in &self.strikes {
                out.push(OptionSpec::new(t, self.maturity, k).map_err(|e| CliError::invalid("surface", e))?);
            }
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct McSpec {
    pub paths: usize,
    pub block_size: usize,
}

impl Default for McSpec {
    fn default() -> Self {
        McSpec {
            paths: 100_000,
            block_size: 4096,
        }
    }
}

/// One model timed by `bench`; it shares the curve and quadrature settings of
/// the enclosing config.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchModel {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(flatten)]
    pub family: FamilySpec,
    pub phi: PhiSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchSpec {
    /// Timing repetitions; the fastest is reported.
    #[serde(default = "default_repeats")]
    pub repeats: usize,
    pub models: Vec<BenchModel>,
}

fn default_repeats() -> usize {
    3
}

fn default_seed() -> u64 {
    42
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub curve: CurveSpec,
    #[serde(flatten)]
    pub family: FamilySpec,
    pub phi: PhiSpec,
    #[serde(default)]
    pub quadrature: QuadratureSettings,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub mc: McSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub simulate: Option<SimulateSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub price: Option<PriceSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub surface: Option<SurfaceSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bench: Option<BenchSpec>,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| CliError::config(format!("invalid config JSON: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json(&text).map_err(|e| match e {
            CliError::Config(msg) => CliError::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    /// SHA-256 of the canonical JSON form, so equal settings hash equally
    /// whatever the formatting of the source file.
    pub fn hash(&self) -> String {
        let canonical = serde_json::to_vec(self).expect("config serializes");
        Sha256::digest(&canonical).iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn model(&self) -> Result<RateModel> {
        self.model_for(&self.family, &self.phi)
    }

    pub fn model_for(&self, family: &FamilySpec, phi: &PhiSpec) -> Result<RateModel> {
        RateModel::with_quadrature(self.curve.build(), family.build()?, phi.build()?, self.quadrature)
            .map_err(|e| CliError::invalid("model", e))
    }

    pub fn mc_settings(&self) -> Result<McSettings> {
        let s = McSettings {
            paths: self.mc.paths,
            seed: self.seed,
            block_size: self.mc.block_size,
        };
        s.validate().map_err(|e| CliError::invalid("mc", e))?;
        Ok(s)
    }
}
