//! Acceptance suite: one pass/fail line per criterion, nonzero exit on any
//! failure. Runs with `cargo test -p fh-levy-cli --test acceptance`.

use std::path::Path;
use std::time::Instant;

use fh_levy::martingales::martingale_value;
use fh_levy::options::{
    bond_price_at, monte_carlo_over_driver, price_call_detailed, price_calls_mc, solve_critical_level,
};
use fh_levy::specialfn::{ln_gamma, norm_cdf, psi_integral, reg_upper_gamma, PsiArgs};
use fh_levy::stats::{stream_rng, RunningStats};
use fh_levy::{
    LevyFamily, McSettings, ModelState, OptionSpec, PhiClass, PhiFunction, PricingSettings, QuadratureSettings,
    RateModel, TermStructure,
};
use fh_levy_cli::config::SimulateSpec;
use fh_levy_cli::simulate::simulate;
use fh_levy_cli::validate::quantile_state;
use fh_levy_cli::{bench, Command, Overrides, RunConfig};
use rand::Rng;
use rand_distr::{Distribution, Gamma};

type Outcome = Result<(bool, String), String>;

const FIGURES: [&str; 4] = ["fig1_gbm", "fig2_jump_diffusion", "fig3_gamma", "fig4_vg"];
const OPTION_CONFIGS: [&str; 6] = [
    "fig1_gbm",
    "fig2_jump_diffusion",
    "fig3_gamma",
    "fig4_vg",
    "fig5_jd_surface",
    "fig5_vg_surface",
];

fn load(name: &str) -> RunConfig {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join(format!("../../configs/{name}.json"));
    RunConfig::load(&path).unwrap_or_else(|e| panic!("{name}: {e}"))
}

fn model(name: &str) -> RateModel {
    load(name).model().unwrap_or_else(|e| panic!("{name}: {e}"))
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn mc(paths: usize, seed: u64) -> McSettings {
    McSettings {
        paths,
        seed,
        block_size: 4096,
    }
}

fn z(diff: f64, se: f64) -> f64 {
    if diff == 0.0 {
        0.0
    } else {
        diff.abs() / se
    }
}

fn martingale_normalization() -> Outcome {
    let mut worst = (0.0f64, String::new());
    for name in FIGURES {
        let m = model(name);
        for t in [1.0, 5.0] {
            let horizons = [t, 5.0, 10.0];
            let stats = monte_carlo_over_driver(m.family(), t, &mc(1_000_000, 11), 3, |xi, out| {
                let st = ModelState::new(t, xi)?;
                for (o, &s) in out.iter_mut().zip(&horizons) {
                    *o = martingale_value(m.family(), m.phi(), &st, s)?;
                }
                Ok(())
            })
            .map_err(err)?;
            for (s, st) in horizons.iter().zip(&stats) {
                let zz = z(st.mean() - 1.0, st.std_error());
                if zz >= worst.0 {
                    worst = (zz, format!("{name} t={t} s={s}"));
                }
            }
        }
    }
    Ok((worst.0 <= 4.0, format!("worst |z| = {:.2} ({}), 1e6 draws", worst.0, worst.1)))
}

fn kernel_consistency() -> Outcome {
    let mut worst = (0.0f64, String::new());
    for name in FIGURES {
        let m = model(name);
        for t in [1.0, 5.0] {
            let stats = monte_carlo_over_driver(m.family(), t, &mc(200_000, 12), 1, |xi, out| {
                out[0] = m.kernel_integral(&ModelState::new(t, xi)?, t)?;
                Ok(())
            })
            .map_err(err)?;
            let zz = z(stats[0].mean() - (-0.02 * t).exp(), stats[0].std_error());
            if zz >= worst.0 {
                worst = (zz, format!("{name} t={t}"));
            }
        }
    }
    Ok((worst.0 <= 4.0, format!("worst |z| = {:.2} ({}), 2e5 draws", worst.0, worst.1)))
}

/// 12 calls: expiries {0.5, 2}, bonds {t+1, t+5}, strikes at the bond
/// prices of driver quantiles {-1, 0, 1} (in, at and out of the money).
fn option_triples(m: &RateModel) -> fh_levy::Result<Vec<OptionSpec>> {
    let mut out = Vec::new();
    for t in [0.5, 2.0] {
        for mat in [t + 1.0, t + 5.0] {
            for q in [-1.0, 0.0, 1.0] {
                let k = bond_price_at(m, t, mat, quantile_state(m, t, q))?;
                out.push(OptionSpec::new(t, mat, k)?);
            }
        }
    }
    Ok(out)
}

// jump-diffusion price with the tilted intensity lambda exp(alpha mu + sign alpha^2 delta^2 / 2)
fn jump_diffusion_price(m: &RateModel, spec: &OptionSpec, sign: f64) -> fh_levy::Result<f64> {
    let LevyFamily::JumpDiffusion {
        intensity,
        jump_mean,
        jump_std,
    } = *m.family()
    else {
        unreachable!()
    };
    let (t, mat, k) = (spec.expiry, spec.maturity, spec.strike);
    let xi = solve_critical_level(m, spec)?.xi;
    let q = |s: f64| {
        let a = m.phi().value(s);
        let mean = intensity * t * (a * jump_mean + sign * 0.5 * a * a * jump_std * jump_std).exp();
        (0..600)
            .map(|n| {
                let nf = n as f64;
                let v = (t + nf * jump_std * jump_std).sqrt();
                let w = (-mean + nf * mean.ln() - ln_gamma(nf + 1.0)).exp();
                w * norm_cdf((xi - nf * jump_mean) / v - a * v)
            })
            .sum::<f64>()
    };
    let far = m.density_integral(mat, f64::INFINITY, q)?;
    let near = m.density_integral(t, mat, q)?;
    Ok((1.0 - k) * far - k * near)
}

fn analytic_vs_oracle() -> Outcome {
    let mut worst = (0.0f64, String::new());
    let mut minus_sign_z = 0.0f64;
    let settings = PricingSettings::default();
    for name in OPTION_CONFIGS {
        let m = model(name);
        let triples = option_triples(&m).map_err(err)?;
        for t in [0.5, 2.0] {
            let group: Vec<&OptionSpec> = triples.iter().filter(|c| c.expiry == t).collect();
            let pairs: Vec<(f64, f64)> = group.iter().map(|c| (c.maturity, c.strike)).collect();
            let est = price_calls_mc(&m, t, &pairs, &mc(1_000_000, 13)).map_err(err)?;
            for (c, e) in group.iter().zip(&est) {
                let a = price_call_detailed(&m, c, &settings).map_err(err)?.price;
                let zz = z(a - e.price, e.std_error);
                if zz >= worst.0 {
                    worst = (zz, format!("{name} t={} T={} K={:.6}", c.expiry, c.maturity, c.strike));
                }
                if name == "fig5_jd_surface" {
                    let minus = jump_diffusion_price(&m, c, -1.0).map_err(err)?;
                    minus_sign_z = minus_sign_z.max(z(minus - e.price, e.std_error));
                }
            }
        }
    }
    Ok((
        worst.0 <= 3.0 && minus_sign_z > 3.0,
        format!(
            "worst |z| = {:.2} ({}) over 72 calls at 1e6 paths; jump intensity with exp(-alpha^2 delta^2 / 2) is off by {:.1} SE",
            worst.0, worst.1, minus_sign_z
        ),
    ))
}

fn trivial_limits() -> Outcome {
    let families = [
        LevyFamily::Gbm,
        LevyFamily::jump_diffusion(20.0, 0.0, 0.09).map_err(err)?,
        LevyFamily::gamma(1.0, 0.5).map_err(err)?,
        LevyFamily::variance_gamma(0.5, 0.3, 5.0).map_err(err)?,
    ];
    let mut rng = stream_rng(14, 0);
    let mut worst = 0.0f64;
    for f in families {
        let m = RateModel::new(TermStructure::flat(0.02), f, PhiFunction::exp_decay(0.4, 0.0).map_err(err)?).map_err(err)?;
        for _ in 0..200 {
            let t = 0.05 + 8.0 * rng.random::<f64>();
            let st = ModelState::new(t, f.sample_increment(t, &mut rng).map_err(err)?).map_err(err)?;
            let mat = t + 20.0 * rng.random::<f64>();
            let p = m.bond_price(&st, mat).map_err(err)?;
            worst = worst.max((p - (-0.02 * mat).exp() / (-0.02 * t).exp()).abs());
        }
    }
    let mut curve = 0.0f64;
    let mut unit = true;
    for name in OPTION_CONFIGS {
        let m = model(name);
        let y = m.term_structure().asymptotic_decay_rate();
        for mat in [0.0, 0.25, 1.0, 5.0, 10.0, 30.0, 100.0] {
            let p = m.bond_price(&ModelState::initial(), mat).map_err(err)?;
            curve = curve.max((p - (-y * mat).exp()).abs());
        }
        for t in [0.5, 3.0] {
            let st = ModelState::new(t, quantile_state(&m, t, 0.7)).map_err(err)?;
            unit &= m.bond_price(&st, t).map_err(err)? == 1.0;
        }
    }
    Ok((
        worst <= 1e-12 && curve <= 1e-12 && unit,
        format!("constant phi error {worst:.1e}; t=0 curve error {curve:.1e}; P(t,t) = 1 exactly: {unit}"),
    ))
}

fn premium_positivity() -> Outcome {
    let mut detail = Vec::new();
    let mut ok = true;
    for (name, class) in [("fig1_gbm", PhiClass::PositiveDecreasing), ("fig3_gamma", PhiClass::NegativeIncreasing)] {
        let m = model(name);
        if m.phi().class() != class {
            return Err(format!("{name} has phi class {:?}", m.phi().class()));
        }
        let mut rng = stream_rng(15, 0);
        let (mut violations, mut states) = (0usize, 0usize);
        for (i, t) in [0.5, 1.0, 3.0].into_iter().enumerate() {
            let n = if i == 0 { 3334 } else { 3333 };
            for _ in 0..n {
                let st = ModelState::new(t, m.family().sample_increment(t, &mut rng).map_err(err)?).map_err(err)?;
                states += 1;
                for mat in [t + 1.0, t + 4.0] {
                    if !(m.risk_premium(&st, mat).map_err(err)? > 0.0) {
                        violations += 1;
                    }
                }
            }
        }
        ok &= violations == 0;
        detail.push(format!("{name}: {violations} violations at {states} states"));
    }
    Ok((ok, detail.join("; ")))
}

fn monotonicity() -> Outcome {
    let mut ok = true;
    let mut worst_residual = 0.0f64;
    let mut solved = 0usize;
    for name in OPTION_CONFIGS {
        let m = model(name);
        let increasing = m.phi().value(0.0) < 0.0;
        for (t, mat) in [(1.0, 5.0), (3.0, 10.0)] {
            let lo = quantile_state(&m, t, -6.0);
            let hi = quantile_state(&m, t, 6.0);
            let grid: Vec<f64> = (0..201).map(|i| lo + (hi - lo) * i as f64 / 200.0).collect();
            let prices = grid
                .iter()
                .map(|&x| bond_price_at(&m, t, mat, x))
                .collect::<fh_levy::Result<Vec<f64>>>()
                .map_err(err)?;
            let strict = prices.windows(2).all(|w| if increasing { w[1] > w[0] } else { w[1] < w[0] });
            if !strict {
                return Ok((false, format!("{name}: P(t={t}, T={mat}, xi) not strictly monotone")));
            }
            for i in (5..200).step_by(10) {
                let k = 0.5 * (prices[i] + prices[i + 1]);
                let c = solve_critical_level(&m, &OptionSpec::new(t, mat, k).map_err(err)?).map_err(err)?;
                ok &= c.xi > grid[i].min(grid[i + 1]) && c.xi < grid[i].max(grid[i + 1]);
                worst_residual = worst_residual.max(c.residual);
                solved += 1;
            }
        }
    }
    Ok((
        ok && worst_residual <= 1e-12,
        format!("strict on 201-point grids for 6 configs; {solved} critical levels, worst residual {worst_residual:.1e}"),
    ))
}

// N(x) = 1/2 + pdf(x) sum x^(2n+1) / (2n+1)!!, all terms positive for x > 0
fn normal_series(x: f64) -> f64 {
    if x < 0.0 {
        return 1.0 - normal_series(-x);
    }
    let (mut term, mut sum, mut k) = (x, x, 1.0);
    while term > 1e-18 * sum {
        k += 2.0;
        term *= x * x / k;
        sum += term;
    }
    0.5 + sum * (-0.5 * x * x - 0.5 * (2.0 * std::f64::consts::PI).ln()).exp()
}

fn special_functions() -> Outcome {
    let normal = (0..1000)
        .map(|i| {
            let x = -8.0 + 16.0 * i as f64 / 999.0;
            (norm_cdf(x) - normal_series(x)).abs()
        })
        .fold(0.0f64, f64::max);
    let gamma1 = (0..400)
        .map(|i| {
            let x = 0.1 * i as f64;
            reg_upper_gamma(1.0, x).map(|v| (v - (-x).exp()).abs())
        })
        .collect::<fh_levy::Result<Vec<f64>>>()
        .map_err(err)?
        .into_iter()
        .fold(0.0f64, f64::max);
    let mut rng = stream_rng(16, 0);
    let mut worst_psi = 0.0f64;
    for i in 0..20 {
        let a = -2.0 + 4.0 * rng.random::<f64>();
        let b = -2.0 + 4.0 * rng.random::<f64>();
        let c = 0.2 + 30.0 * rng.random::<f64>();
        let g = Gamma::new(c, 1.0).map_err(err)?;
        let mut draws = stream_rng(16, 1 + i);
        let s: RunningStats = (0..400_000)
            .map(|_| {
                let u: f64 = g.sample(&mut draws);
                norm_cdf(a / u.sqrt() + b * u.sqrt())
            })
            .collect();
        let v = psi_integral(PsiArgs::new(a, b, c).map_err(err)?).map_err(err)?;
        worst_psi = worst_psi.max(z(v - s.mean(), s.std_error()));
    }
    Ok((
        normal <= 1e-12 && gamma1 <= 1e-12 && worst_psi <= 4.0,
        format!("normal CDF error {normal:.1e} at 1000 points; Gamma(1, x) error {gamma1:.1e}; Psi worst |z| = {worst_psi:.2} at 20 triples"),
    ))
}

// two-sided exact binomial p-value of k successes in n trials with success
// probability p = exp(ln_p) and failure probability exp(ln_q)
fn binomial_p_value(k: usize, n: usize, ln_p: f64, ln_q: f64) -> f64 {
    let times = |count: f64, ln: f64| if count == 0.0 { 0.0 } else { count * ln };
    let ln_pmf = |j: usize| {
        let j = j as f64;
        let n = n as f64;
        ln_gamma(n + 1.0) - ln_gamma(j + 1.0) - ln_gamma(n - j + 1.0) + times(j, ln_p) + times(n - j, ln_q)
    };
    let observed = ln_pmf(k);
    (0..=n)
        .map(ln_pmf)
        .filter(|&l| l <= observed + 1e-9)
        .map(f64::exp)
        .sum::<f64>()
        .min(1.0)
}

fn figure_shapes() -> Outcome {
    let mut notes = Vec::new();
    let mut ok = true;
    for name in FIGURES {
        let cfg = load(name);
        let spec = cfg.simulate.ok_or("figure config without simulate section")?;
        let m = cfg.model().map_err(err)?;
        let points = simulate(&m, &spec, cfg.seed).map_err(err)?;
        let last = points.last().unwrap();
        ok &= last.time == spec.maturity && last.bond_price == 1.0;
        if name == "fig3_gamma" {
            // the jump part of each move: r(t_i+1, X_i+1) against r(t_i+1, X_i)
            let (mut jumps, mut down) = (0usize, 0usize);
            for w in points.windows(2) {
                if w[1].driver - w[0].driver > 1e-9 {
                    jumps += 1;
                    let before = m.short_rate(&ModelState::new(w[1].time, w[0].driver).map_err(err)?).map_err(err)?;
                    down += usize::from(w[1].short_rate < before);
                }
            }
            ok &= jumps > 0 && down == jumps;
            notes.push(format!("gamma: {down}/{jumps} driver jumps lower the short rate"));
        }
    }
    let cfg = load("fig2_jump_diffusion");
    let m = cfg.model().map_err(err)?;
    let spec = SimulateSpec {
        maturity: 5.0,
        steps: 20,
        paths: 1000,
    };
    let points = simulate(&m, &spec, cfg.seed).map_err(err)?;
    let finals: Vec<u64> = points.iter().filter(|p| p.time == spec.maturity).map(|p| p.jumps).collect();
    let with_jump = finals.iter().filter(|&&j| j >= 1).count();
    let LevyFamily::JumpDiffusion { intensity, .. } = *m.family() else {
        unreachable!()
    };
    // P(at least one jump) = 1 - exp(-lambda T)
    let ln_q = -intensity * spec.maturity;
    let p_jump = -ln_q.exp_m1();
    let p_value = binomial_p_value(with_jump, finals.len(), p_jump.ln(), ln_q);
    let mean: RunningStats = finals.iter().map(|&j| j as f64).collect();
    let mean_z = z(mean.mean() - intensity * spec.maturity, mean.std_error());
    ok &= p_value > 1e-3 && mean_z <= 4.0 && points.iter().all(|p| p.time != spec.maturity || p.bond_price == 1.0);
    notes.push(format!(
        "jump-diffusion: {with_jump}/{} paths jump (P = {p_jump:.6}, binomial p = {p_value:.3}), mean count |z| = {mean_z:.2}",
        finals.len()
    ));
    notes.push("all bonds end at 1".into());
    Ok((ok, notes.join("; ")))
}

fn benchmark() -> Outcome {
    let cfg = load("bench");
    let start = Instant::now();
    let outcome = fh_levy_cli::run(Command::Bench, cfg.clone(), &Overrides::default()).map_err(err)?;
    let total = start.elapsed().as_secs_f64();
    let rows = fh_levy_cli::output::parse_rows(&outcome.text);
    let timings: Vec<bench::Timing> = rows
        .iter()
        .map(|r| bench::Timing {
            name: r[0].to_string(),
            family: "",
            prices: vec![0.0; r[2].parse().unwrap()],
            seconds: r[3].parse().unwrap(),
        })
        .collect();
    let slowest = bench::strictly_slowest(&timings);
    let counts_ok = timings.len() == 4 && timings.iter().all(|t| t.prices.len() == 100);
    let summary: Vec<String> = timings.iter().map(|t| format!("{} {:.3}s", t.name, t.seconds)).collect();
    Ok((
        counts_ok && slowest == Some("jump_diffusion") && total <= 60.0,
        format!("{}; slowest {}; total {total:.1}s", summary.join(", "), slowest.unwrap_or("tie")),
    ))
}

fn stability() -> Outcome {
    let doubled = PricingSettings {
        series_scale: 2.0,
        ..Default::default()
    };
    let mut worst = (0.0f64, String::new());
    let mut count = 0usize;
    for name in OPTION_CONFIGS {
        let cfg = load(name);
        let m = cfg.model().map_err(err)?;
        let fine = m
            .with_settings(QuadratureSettings {
                rel_tol: 0.5 * m.quadrature().rel_tol,
                ..*m.quadrature()
            })
            .map_err(err)?;
        let mut contracts = option_triples(&m).map_err(err)?;
        if let Some(s) = &cfg.surface {
            contracts.extend(s.contracts().map_err(err)?);
        }
        for c in &contracts {
            let base = price_call_detailed(&m, c, &PricingSettings::default()).map_err(err)?.price;
            let alt = price_call_detailed(&fine, c, &doubled).map_err(err)?.price;
            count += 1;
            if (base - alt).abs() >= worst.0 {
                worst = ((base - alt).abs(), format!("{name} t={} K={:.4}", c.expiry, c.strike));
            }
        }
        for t in [0.5, 2.0] {
            let st = ModelState::new(t, quantile_state(&m, t, 1.0)).map_err(err)?;
            for mat in [t + 1.0, t + 10.0] {
                let d = (m.bond_price(&st, mat).map_err(err)? - fine.bond_price(&st, mat).map_err(err)?).abs();
                count += 1;
                if d >= worst.0 {
                    worst = (d, format!("{name} bond t={t} T={mat}"));
                }
            }
        }
    }
    Ok((worst.0 < 1e-8, format!("largest change {:.1e} ({}) over {count} prices", worst.0, worst.1)))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("martingale normalization", martingale_normalization),
        ("kernel consistency", kernel_consistency),
        ("analytic vs Monte Carlo option prices", analytic_vs_oracle),
        ("trivial-limit exactness", trivial_limits),
        ("risk-premium positivity", premium_positivity),
        ("bond price monotone in the driver", monotonicity),
        ("special-function accuracy", special_functions),
        ("figure-shape reproduction", figure_shapes),
        ("benchmark ordering", benchmark),
        ("convergence stability", stability),
    ];
    let mut failed = 0;
    for (i, (title, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (passed, detail) = run().unwrap_or_else(|e| (false, format!("error: {e}")));
        let status = if passed { "PASS" } else { "FAIL" };
        println!("[{:>2}] {status} {title}: {detail} ({:.1}s)", i + 1, start.elapsed().as_secs_f64());
        failed += usize::from(!passed);
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
