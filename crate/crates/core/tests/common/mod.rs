#![allow(dead_code)]

use fh_levy::{LevyFamily, PhiFunction, RateModel, TermStructure};

pub fn model(rate: f64, family: LevyFamily, phi: PhiFunction) -> RateModel {
    RateModel::new(TermStructure::flat(rate), family, phi).unwrap()
}

pub fn gbm_fig1() -> RateModel {
    model(0.02, LevyFamily::Gbm, PhiFunction::exp_decay(0.3, 0.02).unwrap())
}

pub fn jd_fig2() -> RateModel {
    model(
        0.02,
        LevyFamily::jump_diffusion(20.0, 0.0, 0.09).unwrap(),
        PhiFunction::exp_decay(0.3, 0.02).unwrap(),
    )
}

pub fn gamma_fig3() -> RateModel {
    model(
        0.02,
        LevyFamily::gamma(1.0, 0.5).unwrap(),
        PhiFunction::exp_decay(-1.0, 0.02).unwrap(),
    )
}

pub fn vg_fig4() -> RateModel {
    model(
        0.02,
        LevyFamily::variance_gamma(0.5, 0.3, 5.0).unwrap(),
        PhiFunction::exp_decay(1.0, 0.02).unwrap(),
    )
}

pub fn jd_fig5() -> RateModel {
    model(
        0.03,
        LevyFamily::jump_diffusion(5.0, 0.0, 1.0).unwrap(),
        PhiFunction::exp_decay(1.0, 0.02).unwrap(),
    )
}

pub fn vg_fig5() -> RateModel {
    model(
        0.03,
        LevyFamily::variance_gamma(0.02, 0.3, 20.0).unwrap(),
        PhiFunction::exp_decay(1.0, 0.02).unwrap(),
    )
}

pub fn figure_models() -> Vec<(&'static str, RateModel)> {
    vec![
        ("gbm", gbm_fig1()),
        ("jump_diffusion", jd_fig2()),
        ("gamma", gamma_fig3()),
        ("vg", vg_fig4()),
    ]
}

/// Driver value `mean + z sd` of `X_t`, clipped to the support.
pub fn quantile_state(model: &RateModel, t: f64, z: f64) -> f64 {
    let f = model.family();
    (f.mean(t) + z * f.variance(t).sqrt()).max(f.support().0)
}

/// Composite Simpson rule with `n` (even) panels.
pub fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + i as f64 * h);
    }
    s * h / 3.0
}
