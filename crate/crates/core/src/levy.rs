//! Lévy driver families.
//!
//! Each family carries its exponent `psi`, defined by `E[exp(a X_t)] =
//! exp(t psi(a))` on an open interval of admissible `a`, and an exact
//! sampler for `X_t`.

use rand::Rng;
use rand_distr::{Distribution, Gamma, Normal, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Exclusion band kept inside each finite domain endpoint.
pub const DOMAIN_GUARD: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum LevyFamily {
    /// Standard Brownian motion.
    Gbm,
    /// Brownian motion plus compound Poisson jumps with normal sizes.
    JumpDiffusion {
        /// Jump intensity per year.
        intensity: f64,
        jump_mean: f64,
        jump_std: f64,
    },
    /// Gamma subordinator: `X_t ~ Gamma(shape = rate * t, scale)`.
    Gamma { rate: f64, scale: f64 },
    /// Drifted variance gamma `drift * G_t + volatility * W(G_t)` with a
    /// unit-mean gamma clock of rate `rate`.
    VarianceGamma {
        drift: f64,
        volatility: f64,
        rate: f64,
    },
}

/// Open interval of admissible exponent arguments.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExponentDomain {
    pub lo: f64,
    pub hi: f64,
}

impl ExponentDomain {
    pub const REAL_LINE: ExponentDomain = ExponentDomain {
        lo: f64::NEG_INFINITY,
        hi: f64::INFINITY,
    };

    /// Membership with the guard band applied at finite endpoints.
    pub fn contains(&self, alpha: f64) -> bool {
        alpha.is_finite() && alpha > self.lo + DOMAIN_GUARD && alpha < self.hi - DOMAIN_GUARD
    }

    pub fn check(&self, alpha: f64) -> Result<()> {
        if !alpha.is_finite() {
            return Err(Error::domain(format!("exponent argument {alpha} is not finite")));
        }
        if alpha <= self.lo + DOMAIN_GUARD {
            return Err(Error::domain(format!(
                "exponent argument {alpha} violates the lower bound {} (guard {DOMAIN_GUARD:e})",
                self.lo
            )));
        }
        if alpha >= self.hi - DOMAIN_GUARD {
            return Err(Error::domain(format!(
                "exponent argument {alpha} violates the upper bound {} (guard {DOMAIN_GUARD:e})",
                self.hi
            )));
        }
        Ok(())
    }
}

/// One exact draw of `X_t` with the number of Poisson jumps it contains
/// (always zero for families without a compound Poisson part).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Increment {
    pub value: f64,
    pub jumps: u64,
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::domain(format!("{name} must be finite and > 0, got {v}")))
    }
}

fn finite(name: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("{name} must be finite, got {v}")))
    }
}

impl LevyFamily {
    pub fn jump_diffusion(intensity: f64, jump_mean: f64, jump_std: f64) -> Result<Self> {
        let f = LevyFamily::JumpDiffusion {
            intensity,
            jump_mean,
            jump_std,
        };
        f.validate()?;
        Ok(f)
    }

    pub fn gamma(rate: f64, scale: f64) -> Result<Self> {
        let f = LevyFamily::Gamma { rate, scale };
        f.validate()?;
        Ok(f)
    }

    pub fn variance_gamma(drift: f64, volatility: f64, rate: f64) -> Result<Self> {
        let f = LevyFamily::VarianceGamma {
            drift,
            volatility,
            rate,
        };
        f.validate()?;
        Ok(f)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            LevyFamily::Gbm => Ok(()),
            LevyFamily::JumpDiffusion {
                intensity,
                jump_mean,
                jump_std,
            } => {
                positive("jump intensity", intensity)?;
                finite("jump mean", jump_mean)?;
                positive("jump standard deviation", jump_std)
            }
            LevyFamily::Gamma { rate, scale } => {
                positive("gamma rate", rate)?;
                positive("gamma scale", scale)
            }
            LevyFamily::VarianceGamma {
                drift,
                volatility,
                rate,
            } => {
                finite("VG drift", drift)?;
                positive("VG volatility", volatility)?;
                positive("VG rate", rate)
            }
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            LevyFamily::Gbm => "gbm",
            LevyFamily::JumpDiffusion { .. } => "jump_diffusion",
            LevyFamily::Gamma { .. } => "gamma",
            LevyFamily::VarianceGamma { .. } => "vg",
        }
    }

    /// Scales `(k1, k2)` of the gamma-difference representation
    /// `X_t = k1 g1 - k2 g2`, with `g1, g2` independent `Gamma(rate * t, 1)`.
    pub fn vg_scales(&self) -> Option<(f64, f64)> {
        match *self {
            LevyFamily::VarianceGamma {
                drift,
                volatility,
                rate,
            } => {
                let root = (drift * drift + 2.0 * volatility * volatility * rate).sqrt();
                // the smaller root is formed without cancellation
                let (k1, k2) = if drift >= 0.0 {
                    let k1 = (drift + root) / (2.0 * rate);
                    (k1, volatility * volatility / (2.0 * rate * k1))
                } else {
                    let k2 = (-drift + root) / (2.0 * rate);
                    (volatility * volatility / (2.0 * rate * k2), k2)
                };
                Some((k1, k2))
            }
            _ => None,
        }
    }

    pub fn domain(&self) -> ExponentDomain {
        match *self {
            LevyFamily::Gbm | LevyFamily::JumpDiffusion { .. } => ExponentDomain::REAL_LINE,
            LevyFamily::Gamma { scale, .. } => ExponentDomain {
                lo: f64::NEG_INFINITY,
                hi: 1.0 / scale,
            },
            LevyFamily::VarianceGamma { .. } => {
                // 1 - (k1 - k2) a - k1 k2 a^2 = (1 - k1 a)(1 + k2 a)
                let (k1, k2) = self.vg_scales().expect("variance gamma");
                ExponentDomain {
                    lo: -1.0 / k2,
                    hi: 1.0 / k1,
                }
            }
        }
    }

    /// Support of `X_t` for `t > 0`.
    pub fn support(&self) -> (f64, f64) {
        match self {
            LevyFamily::Gamma { .. } => (0.0, f64::INFINITY),
            _ => (f64::NEG_INFINITY, f64::INFINITY),
        }
    }

    /// `psi(alpha)`, checked against the domain.
    pub fn levy_exponent(&self, alpha: f64) -> Result<f64> {
        self.domain().check(alpha)?;
        Ok(self.exponent_unchecked(alpha))
    }

    /// `psi(alpha)` without the domain check; callers guarantee admissibility.
    #[inline]
    pub fn exponent_unchecked(&self, alpha: f64) -> f64 {
        if alpha == 0.0 {
            return 0.0;
        }
        match *self {
            LevyFamily::Gbm => 0.5 * alpha * alpha,
            LevyFamily::JumpDiffusion {
                intensity,
                jump_mean,
                jump_std,
            } => {
                0.5 * alpha * alpha
                    + intensity * (alpha * jump_mean + 0.5 * alpha * alpha * jump_std * jump_std).exp_m1()
            }
            LevyFamily::Gamma { rate, scale } => -rate * (-scale * alpha).ln_1p(),
            LevyFamily::VarianceGamma {
                drift,
                volatility,
                rate,
            } => {
                let q = -(drift / rate) * alpha - 0.5 * volatility * volatility / rate * alpha * alpha;
                -rate * q.ln_1p()
            }
        }
    }

    /// Excess rate of return `R(l, s) = psi(s) + psi(-l) - psi(s - l)`.
    pub fn excess_rate_of_return(&self, risk_aversion: f64, volatility: f64) -> Result<f64> {
        let a = self.levy_exponent(volatility)?;
        let b = self.levy_exponent(-risk_aversion)?;
        let c = self.levy_exponent(volatility - risk_aversion)?;
        Ok(a + b - c)
    }

    pub fn mean(&self, t: f64) -> f64 {
        match *self {
            LevyFamily::Gbm => 0.0,
            LevyFamily::JumpDiffusion {
                intensity,
                jump_mean,
                ..
            } => intensity * jump_mean * t,
            LevyFamily::Gamma { rate, scale } => rate * scale * t,
            LevyFamily::VarianceGamma { drift, .. } => drift * t,
        }
    }

    pub fn variance(&self, t: f64) -> f64 {
        match *self {
            LevyFamily::Gbm => t,
            LevyFamily::JumpDiffusion {
                intensity,
                jump_mean,
                jump_std,
            } => t + intensity * t * (jump_mean * jump_mean + jump_std * jump_std),
            LevyFamily::Gamma { rate, scale } => rate * scale * scale * t,
            LevyFamily::VarianceGamma { .. } => {
                let (k1, k2) = self.vg_scales().expect("variance gamma");
                let shape = self.gamma_shape(t);
                (k1 * k1 + k2 * k2) * shape
            }
        }
    }

    fn gamma_shape(&self, t: f64) -> f64 {
        match *self {
            LevyFamily::Gamma { rate, .. } | LevyFamily::VarianceGamma { rate, .. } => rate * t,
            _ => 0.0,
        }
    }

    /// One exact draw of `X_t`.
    pub fn sample_increment<R: Rng + ?Sized>(&self, t: f64, rng: &mut R) -> Result<f64> {
        Ok(self.sample_increment_detailed(t, rng)?.value)
    }

    pub fn sample_increment_detailed<R: Rng + ?Sized>(&self, t: f64, rng: &mut R) -> Result<Increment> {
        if !(t > 0.0) || !t.is_finite() {
            return Err(Error::domain(format!("increment length must be > 0, got {t}")));
        }
        let normal = |rng: &mut R, sd: f64| -> f64 {
            let z: f64 = rng.sample(rand_distr::StandardNormal);
            sd * z
        };
        match *self {
            LevyFamily::Gbm => Ok(Increment {
                value: normal(rng, t.sqrt()),
                jumps: 0,
            }),
            LevyFamily::JumpDiffusion {
                intensity,
                jump_mean,
                jump_std,
            } => {
                let mut value = normal(rng, t.sqrt());
                let n = Poisson::new(intensity * t)
                    .map_err(|e| Error::domain(format!("Poisson intensity: {e}")))?
                    .sample(rng) as u64;
                if n > 0 {
                    let jump = Normal::new(jump_mean, jump_std)
                        .map_err(|e| Error::domain(format!("jump law: {e}")))?;
                    for _ in 0..n {
                        value += jump.sample(rng);
                    }
                }
                Ok(Increment { value, jumps: n })
            }
            LevyFamily::Gamma { rate, scale } => {
                let g = Gamma::new(rate * t, scale).map_err(|e| Error::domain(format!("gamma law: {e}")))?;
                Ok(Increment {
                    value: g.sample(rng),
                    jumps: 0,
                })
            }
            LevyFamily::VarianceGamma { .. } => {
                let (k1, k2) = self.vg_scales().expect("variance gamma");
                let g = Gamma::new(self.gamma_shape(t), 1.0)
                    .map_err(|e| Error::domain(format!("gamma law: {e}")))?;
                let up = g.sample(rng);
                let down = g.sample(rng);
                Ok(Increment {
                    value: k1 * up - k2 * down,
                    jumps: 0,
                })
            }
        }
    }

    /// Exact draw of `X` at each time of a strictly increasing grid starting
    /// above zero.
    pub fn sample_path<R: Rng + ?Sized>(&self, grid: &[f64], rng: &mut R) -> Result<Vec<f64>> {
        Ok(self
            .sample_path_detailed(grid, rng)?
            .into_iter()
            .map(|inc| inc.value)
            .collect())
    }

    /// Like [`sample_path`](Self::sample_path) but also returns the cumulative
    /// jump count at each grid time.
    pub fn sample_path_detailed<R: Rng + ?Sized>(&self, grid: &[f64], rng: &mut R) -> Result<Vec<Increment>> {
        let mut out = Vec::with_capacity(grid.len());
        let mut prev = 0.0;
        let mut x = 0.0;
        let mut jumps = 0u64;
        for (i, &t) in grid.iter().enumerate() {
            if !(t > prev) {
                return Err(Error::domain(format!(
                    "path grid must be strictly increasing and start above 0 (index {i}: {t} after {prev})"
                )));
            }
            let inc = self.sample_increment_detailed(t - prev, rng)?;
            x += inc.value;
            jumps += inc.jumps;
            out.push(Increment { value: x, jumps });
            prev = t;
        }
        Ok(out)
    }
}
