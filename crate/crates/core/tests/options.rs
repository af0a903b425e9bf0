mod common;

use common::*;
use fh_levy::error::StrikeSide;
use fh_levy::options::{
    bond_price_at, price_call_analytic, price_call_detailed, price_call_mc, price_calls_mc, solve_critical_level,
    ExerciseRegion,
};
use fh_levy::specialfn::{ln_gamma, norm_cdf};
use fh_levy::{Error, LevyFamily, McSettings, ModelState, OptionSpec, PricingSettings, QuadratureSettings, RateModel};

fn mc(paths: usize, seed: u64) -> McSettings {
    McSettings {
        paths,
        seed,
        block_size: 4096,
    }
}

#[test]
fn bond_price_monotone_in_driver() {
    let grid = |lo: f64, hi: f64| (0..201).map(move |i| lo + (hi - lo) * i as f64 / 200.0);
    let m = gbm_fig1();
    let prices: Vec<f64> = grid(-10.0, 10.0).map(|x| bond_price_at(&m, 1.0, 5.0, x).unwrap()).collect();
    assert!(prices.windows(2).all(|w| w[1] < w[0]));
    let g = gamma_fig3();
    let prices: Vec<f64> = grid(0.0, 10.0).map(|x| bond_price_at(&g, 1.0, 5.0, x).unwrap()).collect();
    assert!(prices.windows(2).all(|w| w[1] > w[0]));
    assert_eq!(bond_price_at(&m, 0.0, 5.0, 0.0).unwrap(), (-0.1f64).exp());
}

#[test]
fn solver_agrees_with_grid_scan() {
    for (name, m) in figure_models() {
        let (t, mat) = (1.0, 5.0);
        let lo = m.family().support().0.max(-6.0);
        let xs: Vec<f64> = (0..121).map(|i| lo + (6.0 - lo) * i as f64 / 120.0).collect();
        let ps: Vec<f64> = xs.iter().map(|&x| bond_price_at(&m, t, mat, x).unwrap()).collect();
        let k = 0.5 * (ps[40] + ps[41]);
        let c = solve_critical_level(&m, &OptionSpec::new(t, mat, k).unwrap()).unwrap();
        assert!(c.xi > xs[40] && c.xi < xs[41], "{name}: {} not in [{}, {}]", c.xi, xs[40], xs[41]);
        assert!(c.residual <= 1e-12);
        let p = bond_price_at(&m, t, mat, c.xi).unwrap();
        assert!((p - k).abs() <= 1e-12);
    }
}

#[test]
fn payoff_changes_sign_at_the_critical_level() {
    for (_, m) in figure_models() {
        let (t, mat) = (2.0, 7.0);
        let k = bond_price_at(&m, t, mat, quantile_state(&m, t, 0.3)).unwrap();
        let c = solve_critical_level(&m, &OptionSpec::new(t, mat, k).unwrap()).unwrap();
        let payoff = |xi: f64| {
            let st = ModelState::new(t, xi).unwrap();
            m.kernel_integral(&st, mat).unwrap() - k * m.kernel_integral(&st, t).unwrap()
        };
        let d = 1e-3 * m.family().variance(t).sqrt();
        let (left, right) = (payoff(c.xi - d), payoff(c.xi + d));
        assert!(left * right < 0.0);
        // itm below the level when phi decreases, above when it increases
        let below_itm = m.phi().value(0.0) > 0.0;
        assert_eq!(left > 0.0, below_itm);
    }
}

#[test]
fn strikes_outside_the_band() {
    let g = gamma_fig3();
    // gamma driver is non-negative, so P(t, T, 0) is the lowest attainable price
    let floor = bond_price_at(&g, 1.0, 5.0, 0.0).unwrap();
    let spec = OptionSpec::new(1.0, 5.0, 0.5 * floor).unwrap();
    match solve_critical_level(&g, &spec) {
        Err(Error::StrikeOutOfRange { side, lower, .. }) => {
            assert_eq!(side, StrikeSide::BelowRange);
            assert!((lower - floor).abs() < 1e-12);
        }
        other => panic!("expected out-of-range strike, got {other:?}"),
    }
    let price = price_call_detailed(&g, &spec, &PricingSettings::default()).unwrap();
    assert_eq!(price.out_of_range, Some(StrikeSide::BelowRange));
    let expected = (-0.1f64).exp() - spec.strike * (-0.02f64).exp();
    assert!((price.price - expected).abs() < 1e-14);
}

#[test]
fn vanishing_strike_prices_the_bond() {
    for (name, m) in figure_models() {
        let spec = OptionSpec::new(1.0, 5.0, 1e-9).unwrap();
        let c = price_call_analytic(&m, &spec).unwrap();
        let p0 = (-0.1f64).exp();
        assert!((c - p0).abs() < 1e-8, "{name}: {c}");
        let est = price_call_mc(&m, &spec, &mc(20_000, 4)).unwrap();
        assert!((est.price - p0).abs() <= 4.0 * est.std_error, "{name}: {est:?}");
    }
}

#[test]
fn deep_out_of_the_money_is_small_and_non_negative() {
    let m = gbm_fig1();
    let spec = OptionSpec::new(1.0, 1.5, 0.9999).unwrap();
    let est = price_call_mc(&m, &spec, &mc(20_000, 5)).unwrap();
    assert!(est.price >= 0.0 && est.price < 1e-6);
    let c = price_call_analytic(&m, &spec).unwrap();
    assert!((0.0..1e-6).contains(&c));
}

#[test]
fn expiry_at_zero_is_intrinsic() {
    for (_, m) in figure_models() {
        for k in [0.5, 0.9, 0.95] {
            let c = price_call_analytic(&m, &OptionSpec::new(0.0, 5.0, k).unwrap()).unwrap();
            assert!((c - ((-0.1f64).exp() - k).max(0.0)).abs() < 1e-15);
        }
    }
}

#[test]
fn analytic_price_decreasing_in_strike_and_bounded() {
    for (name, m) in figure_models() {
        let (t, mat) = (1.0, 5.0);
        let mut prev = f64::INFINITY;
        for i in 1..40 {
            let k = 0.80 + 0.005 * i as f64;
            let c = price_call_analytic(&m, &OptionSpec::new(t, mat, k).unwrap()).unwrap();
            assert!(c >= 0.0 && c <= (-0.1f64).exp());
            assert!(c <= prev, "{name} K={k}");
            prev = c;
        }
    }
}

#[test]
fn analytic_matches_monte_carlo_for_every_family() {
    let mut models = figure_models();
    models.push(("jump_diffusion_surface", jd_fig5()));
    models.push(("vg_surface", vg_fig5()));
    for (name, m) in models {
        let (t, mat) = (1.0, 4.0);
        let contracts: Vec<(f64, f64)> = [-0.8, 0.0, 1.0]
            .iter()
            .map(|&z| (mat, bond_price_at(&m, t, mat, quantile_state(&m, t, z)).unwrap()))
            .collect();
        let est = price_calls_mc(&m, t, &contracts, &mc(100_000, 77)).unwrap();
        for (&(mm, k), e) in contracts.iter().zip(est.iter()) {
            let a = price_call_analytic(&m, &OptionSpec::new(t, mm, k).unwrap()).unwrap();
            assert!((a - e.price).abs() <= 3.0 * e.std_error, "{name} K={k}: analytic {a} mc {e:?}");
        }
    }
}

// jump-diffusion formula with the jump intensity tilted by
// exp(alpha mu + sign * alpha^2 delta^2 / 2)
fn jump_diffusion_price(m: &RateModel, spec: &OptionSpec, sign: f64) -> f64 {
    let LevyFamily::JumpDiffusion {
        intensity,
        jump_mean,
        jump_std,
    } = *m.family()
    else {
        unreachable!()
    };
    let (t, mat, k) = (spec.expiry, spec.maturity, spec.strike);
    let xi = solve_critical_level(m, spec).unwrap().xi;
    let q = |s: f64| {
        let a = m.phi().value(s);
        let mean = intensity * t * (a * jump_mean + sign * 0.5 * a * a * jump_std * jump_std).exp();
        (0..400)
            .map(|n| {
                let nf = n as f64;
                let v = (t + nf * jump_std * jump_std).sqrt();
                let w = (-mean + nf * mean.ln() - ln_gamma(nf + 1.0)).exp();
                w * norm_cdf((xi - nf * jump_mean) / v - a * v)
            })
            .sum::<f64>()
    };
    let far = m.density_integral(mat, f64::INFINITY, q).unwrap();
    let near = m.density_integral(t, mat, q).unwrap();
    (1.0 - k) * far - k * near
}

#[test]
fn jump_intensity_tilt_is_settled_by_monte_carlo() {
    let m = jd_fig5();
    let (t, mat) = (1.0, 5.0);
    let contracts: Vec<(f64, f64)> = [-0.5, 0.5]
        .iter()
        .map(|&z| (mat, bond_price_at(&m, t, mat, quantile_state(&m, t, z)).unwrap()))
        .collect();
    let est = price_calls_mc(&m, t, &contracts, &mc(100_000, 11)).unwrap();
    for (&(_, k), e) in contracts.iter().zip(est.iter()) {
        let spec = OptionSpec::new(t, mat, k).unwrap();
        let plus = jump_diffusion_price(&m, &spec, 1.0);
        let minus = jump_diffusion_price(&m, &spec, -1.0);
        let library = price_call_analytic(&m, &spec).unwrap();
        assert!((library - plus).abs() < 1e-10);
        assert!((plus - e.price).abs() <= 3.0 * e.std_error);
        assert!((minus - e.price).abs() > 10.0 * e.std_error, "minus {minus} mc {e:?}");
    }
}

#[test]
fn prices_stable_under_finer_settings() {
    let mut models = figure_models();
    models.push(("jump_diffusion_surface", jd_fig5()));
    models.push(("vg_surface", vg_fig5()));
    for (name, m) in models {
        let fine = m
            .with_settings(QuadratureSettings {
                rel_tol: 0.5 * m.quadrature().rel_tol,
                ..*m.quadrature()
            })
            .unwrap();
        let doubled = PricingSettings {
            series_scale: 2.0,
            ..Default::default()
        };
        for &(t, mat, z) in &[(0.5, 2.0, -0.5), (2.0, 5.0, 0.0), (3.0, 10.0, 1.0)] {
            let k = bond_price_at(&m, t, mat, quantile_state(&m, t, z)).unwrap();
            let spec = OptionSpec::new(t, mat, k).unwrap();
            let base = price_call_analytic(&m, &spec).unwrap();
            let alt = price_call_detailed(&fine, &spec, &doubled).unwrap().price;
            assert!((base - alt).abs() < 1e-8, "{name} {spec:?}: {base} vs {alt}");
        }
    }
}

#[test]
fn exercise_region_follows_phi_direction() {
    let m = gbm_fig1();
    let p = fh_levy::options::tilted_probability(&m, 1.0, 0.0, ExerciseRegion::Below, 0.0, &PricingSettings::default())
        .unwrap();
    assert!((p - 0.5).abs() < 1e-15);
}
