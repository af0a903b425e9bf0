//! Globally adaptive 21-point Gauss–Kronrod quadrature.
//!
//! The engine works on integrands supplied in *scaled* form
//! `f(x) = factor(x) * exp(log_scale(x))`. Each panel is evaluated relative to
//! the largest `log_scale` seen at its nodes, and panels are combined relative
//! to the largest panel shift, so integrands whose magnitude spans hundreds of
//! orders of magnitude (large driver values in `exp(phi_s * xi)`) neither
//! overflow nor lose the dominant panel.

use crate::error::{Error, Result};

const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_600_525_452_322,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

// Gauss weights for the odd-indexed Kronrod nodes.
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

/// Error targets for one integral.
#[derive(Debug, Clone, Copy)]
pub struct Tolerance {
    pub rel: f64,
    pub abs: f64,
    pub max_subdivisions: usize,
}

impl Tolerance {
    pub fn relative(rel: f64, max_subdivisions: usize) -> Self {
        Tolerance {
            rel,
            abs: 0.0,
            max_subdivisions,
        }
    }

    pub fn absolute(abs: f64, max_subdivisions: usize) -> Self {
        Tolerance {
            rel: 0.0,
            abs,
            max_subdivisions,
        }
    }
}

/// Result of a scaled integration: the integral equals `value * exp(log_scale)`.
#[derive(Debug, Clone, Copy)]
pub struct ScaledEstimate {
    pub log_scale: f64,
    pub value: f64,
    /// Error estimate in the same scale as `value`.
    pub error: f64,
    pub evaluations: usize,
    pub panels: usize,
}

impl ScaledEstimate {
    /// Natural log of the integral; only meaningful for positive integrals.
    pub fn ln(&self) -> f64 {
        self.log_scale + self.value.ln()
    }

    /// The integral on the natural scale (may overflow to infinity).
    pub fn unscaled(&self) -> f64 {
        self.value * self.log_scale.exp()
    }

    fn zero() -> Self {
        ScaledEstimate {
            log_scale: 0.0,
            value: 0.0,
            error: 0.0,
            evaluations: 0,
            panels: 0,
        }
    }
}

/// Result of an ordinary integration.
#[derive(Debug, Clone, Copy)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    shift: f64,
    result: f64,
    error: f64,
}

fn eval_panel<F>(f: &mut F, a: f64, b: f64) -> Panel
where
    F: FnMut(f64) -> (f64, f64),
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut logs = [0.0f64; 21];
    let mut factors = [0.0f64; 21];
    for j in 0..10 {
        let dx = half * XGK[j];
        let (l1, f1) = f(center - dx);
        let (l2, f2) = f(center + dx);
        logs[2 * j] = l1;
        factors[2 * j] = f1;
        logs[2 * j + 1] = l2;
        factors[2 * j + 1] = f2;
    }
    let (lc, fc) = f(center);
    logs[20] = lc;
    factors[20] = fc;

    let mut shift = f64::NEG_INFINITY;
    for (l, fac) in logs.iter().zip(factors.iter()) {
        if *fac != 0.0 && *l > shift {
            shift = *l;
        }
    }
    if !shift.is_finite() {
        // identically zero on the nodes (or NaN, reported by the caller)
        let nan = logs.iter().chain(factors.iter()).any(|v| v.is_nan());
        return Panel {
            a,
            b,
            shift: 0.0,
            result: if nan { f64::NAN } else { 0.0 },
            error: if nan { f64::NAN } else { 0.0 },
        };
    }

    let mut vals = [0.0f64; 21];
    for i in 0..21 {
        vals[i] = if factors[i] == 0.0 {
            0.0
        } else if logs[i] == shift {
            factors[i]
        } else {
            factors[i] * (logs[i] - shift).exp()
        };
    }

    let fc = vals[20];
    let mut res_k = WGK[10] * fc;
    let mut res_g = 0.0;
    let mut res_abs = WGK[10] * fc.abs();
    for j in 0..10 {
        let s = vals[2 * j] + vals[2 * j + 1];
        res_k += WGK[j] * s;
        res_abs += WGK[j] * (vals[2 * j].abs() + vals[2 * j + 1].abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * s;
        }
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        res_asc += WGK[j] * ((vals[2 * j] - mean).abs() + (vals[2 * j + 1] - mean).abs());
    }
    let hl = half.abs();
    let result = res_k * half;
    res_abs *= hl;
    res_asc *= hl;
    let mut err = ((res_k - res_g) * half).abs();
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * (200.0 * err / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    Panel {
        a,
        b,
        shift,
        result,
        error: err,
    }
}

/// Nodes of the 21-point Kronrod rule on `[a, b]` as `(x, kronrod weight,
/// embedded Gauss weight)`; the Gauss weight is zero on Kronrod-only nodes.
pub(crate) fn kronrod_nodes(a: f64, b: f64) -> [(f64, f64, f64); 21] {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut out = [(center, half * WGK[10], 0.0); 21];
    for j in 0..10 {
        let dx = half * XGK[j];
        let wg = if j % 2 == 1 { half * WG[j / 2] } else { 0.0 };
        out[2 * j] = (center - dx, half * WGK[j], wg);
        out[2 * j + 1] = (center + dx, half * WGK[j], wg);
    }
    out
}

/// Integrates a scaled integrand over consecutive intervals defined by
/// `breakpoints` (at least two, increasing).
pub fn integrate_scaled<F>(mut f: F, breakpoints: &[f64], tol: Tolerance) -> Result<ScaledEstimate>
where
    F: FnMut(f64) -> (f64, f64),
{
    if breakpoints.len() < 2 {
        return Err(Error::domain("quadrature needs at least two breakpoints"));
    }
    let mut panels: Vec<Panel> = Vec::with_capacity(64);
    for w in breakpoints.windows(2) {
        if !(w[1] >= w[0]) {
            return Err(Error::domain(format!(
                "quadrature breakpoints not increasing: {} then {}",
                w[0], w[1]
            )));
        }
        if w[1] > w[0] {
            panels.push(eval_panel(&mut f, w[0], w[1]));
        }
    }
    if panels.is_empty() {
        return Ok(ScaledEstimate::zero());
    }
    let mut evaluations = 21 * panels.len();

    loop {
        let mut global = f64::NEG_INFINITY;
        for p in &panels {
            if p.result.is_nan() || p.error.is_nan() {
                return Err(Error::numerical(format!(
                    "integrand returned NaN on [{}, {}]",
                    p.a, p.b
                )));
            }
            if p.result != 0.0 || p.error != 0.0 {
                global = global.max(p.shift);
            }
        }
        if !global.is_finite() {
            return Ok(ScaledEstimate {
                evaluations,
                panels: panels.len(),
                ..ScaledEstimate::zero()
            });
        }
        let mut total = 0.0;
        let mut total_err = 0.0;
        let mut worst = 0usize;
        let mut worst_err = -1.0;
        for (i, p) in panels.iter().enumerate() {
            let scale = (p.shift - global).exp();
            total += p.result * scale;
            let e = p.error * scale;
            total_err += e;
            if e > worst_err {
                worst_err = e;
                worst = i;
            }
        }
        let target = (tol.rel * total.abs()).max(tol.abs * (-global).exp());
        if total_err <= target {
            return Ok(ScaledEstimate {
                log_scale: global,
                value: total,
                error: total_err,
                evaluations,
                panels: panels.len(),
            });
        }
        if panels.len() >= tol.max_subdivisions {
            return Err(Error::numerical(format!(
                "quadrature did not converge after {} panels: estimate {:e} (log-scale {:.3}), error {:e}, target {:e}",
                panels.len(),
                total,
                global,
                total_err,
                target
            )));
        }
        let p = panels.swap_remove(worst);
        let mid = 0.5 * (p.a + p.b);
        if !(mid > p.a && mid < p.b) {
            return Err(Error::numerical(format!(
                "quadrature panel [{}, {}] cannot be subdivided further (error {:e}, target {:e})",
                p.a, p.b, total_err, target
            )));
        }
        panels.push(eval_panel(&mut f, p.a, mid));
        panels.push(eval_panel(&mut f, mid, p.b));
        evaluations += 42;
    }
}

/// Integrates an ordinary integrand.
pub fn integrate<F>(mut f: F, breakpoints: &[f64], tol: Tolerance) -> Result<Estimate>
where
    F: FnMut(f64) -> f64,
{
    let est = integrate_scaled(|x| (0.0, f(x)), breakpoints, tol)?;
    let scale = est.log_scale.exp();
    Ok(Estimate {
        value: est.value * scale,
        error: est.error * scale,
        evaluations: est.evaluations,
    })
}

/// `ln(exp(a) + exp(b))` without overflow.
pub fn log_add_exp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let m = a.max(b);
    m + ((a - m).exp() + (b - m).exp()).ln()
}
