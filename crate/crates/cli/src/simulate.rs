//! Simulated bond-price and short-rate paths.

use fh_levy::stats::stream_rng;
use fh_levy::{ModelState, RateModel};
use rayon::prelude::*;

use crate::config::SimulateSpec;
use crate::output::{num, Csv};

pub const COLUMNS: [&str; 6] = ["path", "time[y]", "X", "jumps", "bond_price", "short_rate[1/y]"];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathPoint {
    pub path: usize,
    pub time: f64,
    /// Driver value `X_t`.
    pub driver: f64,
    /// Cumulative Poisson jumps (jump-diffusion only).
    pub jumps: u64,
    /// Price of the bond maturing at the simulation maturity.
    pub bond_price: f64,
    pub short_rate: f64,
}

/// Path `i` draws from stream `i` of `seed`, so output is independent of the
/// thread count.
pub fn simulate(model: &RateModel, spec: &SimulateSpec, seed: u64) -> fh_levy::Result<Vec<PathPoint>> {
    let grid = spec.grid();
    let per_path: Vec<fh_levy::Result<Vec<PathPoint>>> = (0..spec.paths)
        .into_par_iter()
        .map(|path| {
            let mut rng = stream_rng(seed, path as u64);
            let draws = model.family().sample_path_detailed(&grid[1..], &mut rng)?;
            let mut points = Vec::with_capacity(grid.len());
            let origin = std::iter::once((0.0, 0u64));
            for (&time, (driver, jumps)) in grid.iter().zip(origin.chain(draws.iter().map(|d| (d.value, d.jumps)))) {
                let state = ModelState::new(time, driver)?;
                points.push(PathPoint {
                    path,
                    time,
                    driver,
                    jumps,
                    bond_price: model.bond_price(&state, spec.maturity)?,
                    short_rate: model.short_rate(&state)?,
                });
            }
            Ok(points)
        })
        .collect();
    let mut out = Vec::with_capacity(spec.paths * grid.len());
    for p in per_path {
        out.extend(p?);
    }
    Ok(out)
}

pub fn render(points: &[PathPoint], provenance: &str) -> String {
    let mut csv = Csv::new(provenance, &COLUMNS);
    for p in points {
        csv.row([
            p.path.to_string(),
            num(p.time),
            num(p.driver),
            p.jumps.to_string(),
            num(p.bond_price),
            num(p.short_rate),
        ]);
    }
    csv.finish()
}
