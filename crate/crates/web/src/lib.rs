//! wasm-bindgen entry points for the browser demo.
//!
//! Every export returns a flat row-major `Float64Array`; the first column is
//! always `t`. The `*_rows` functions are the same computations with plain
//! `String` errors, usable (and tested) off the browser.

use wasm_bindgen::prelude::*;

use toa_core::scenario::{
    figure_preset, parse_config, run_scenario, InternalSelector, PacketConfig, ScenarioConfig, ScenarioKind,
    ScenarioRun,
};
use toa_core::Statistics;

const ORBITAL_POINTS: usize = 512;
const CM_REL_POINTS: usize = 192;
const MAX_STEPS: usize = 2000;

fn finish(mut config: ScenarioConfig, steps: usize) -> Result<ScenarioRun, String> {
    if steps == 0 || steps > MAX_STEPS {
        return Err(format!("steps must be in 1..={MAX_STEPS}"));
    }
    config.time.steps = steps;
    config.numerics.convergence_audit = false;
    // Round trip through the parser so the demo gets the same validation as the CLI.
    let config = parse_config(&config.to_toml()).map_err(|e| e.to_string())?;
    run_scenario(&config).map_err(|e| e.to_string())
}

fn interleave(run: &ScenarioRun, columns: impl Fn(&toa_core::arrivals::ArrivalPoint) -> Vec<f64>) -> Vec<f64> {
    let n = run.series[0].points.len();
    let mut out = Vec::new();
    for k in 0..n {
        out.push(run.series[0].points[k].t);
        for s in &run.series {
            out.extend(columns(&s.points[k]));
        }
    }
    out
}

/// Free Gaussian packet: rows `[t, pi, pi_plus, pi_minus, flux]`.
#[allow(clippy::too_many_arguments)]
pub fn single_rows(
    x0: f64,
    p0: f64,
    delta_x: f64,
    arrival_point: f64,
    t_min: f64,
    t_max: f64,
    steps: usize,
) -> Result<Vec<f64>, String> {
    let mut c = figure_preset("fig1").map_err(|e| e.to_string())?;
    c.name = "single".into();
    c.kind = ScenarioKind::Single;
    c.statistics.clear();
    c.orbital = Some(PacketConfig { x0, p0, delta_x });
    c.orbital_a = None;
    c.orbital_b = None;
    c.arrival_point = arrival_point;
    c.time.t_min = t_min;
    c.time.t_max = t_max;
    c.numerics.n_points = ORBITAL_POINTS;
    let run = finish(c, steps)?;
    Ok(interleave(&run, |p| vec![p.pi, p.pi_plus, p.pi_minus, p.flux]))
}

/// Two packets at `x0_a` and 0 with common `p0`, `delta_x`, arrival at 3:
/// rows `[t, boson, fermion, distinguishable]`.
pub fn pair_rows(x0_a: f64, p0: f64, delta_x: f64, t_max: f64, steps: usize) -> Result<Vec<f64>, String> {
    let mut c = figure_preset("fig1").map_err(|e| e.to_string())?;
    c.orbital_a = Some(PacketConfig { x0: x0_a, p0, delta_x });
    c.orbital_b = Some(PacketConfig { x0: 0.0, p0, delta_x });
    c.time.t_max = t_max;
    c.numerics.n_points = ORBITAL_POINTS;
    let run = finish(c, steps)?;
    Ok(interleave(&run, |p| vec![p.pi]))
}

/// Harmonically bound pair with the centre of mass at the origin.
/// `level >= 0` selects that oscillator eigenstate (rows `[t, pi]`, statistics
/// fixed by the parity); `level < 0` selects the coherent combinations with
/// z = i (rows `[t, boson, fermion]`).
#[allow(clippy::too_many_arguments)]
pub fn bound_pair_rows(
    level: i32,
    omega: f64,
    p0: f64,
    delta_x: f64,
    t_min: f64,
    t_max: f64,
    steps: usize,
) -> Result<Vec<f64>, String> {
    let mut c = figure_preset("fig4").map_err(|e| e.to_string())?;
    let internal = c.internal.as_mut().expect("fig4 has an internal section");
    internal.omega = omega;
    internal.n_max = 48;
    if level >= 0 {
        internal.selector = InternalSelector::Levels(vec![level as usize]);
        c.statistics = vec![if level % 2 == 0 {
            Statistics::Boson
        } else {
            Statistics::Fermion
        }];
    }
    c.center_of_mass = Some(PacketConfig { x0: 0.0, p0, delta_x });
    c.time.t_min = t_min;
    c.time.t_max = t_max;
    c.numerics.n_points = CM_REL_POINTS;
    c.output.flux = false;
    let run = finish(c, steps)?;
    Ok(interleave(&run, |p| vec![p.pi]))
}

#[wasm_bindgen(js_name = singleSeries)]
pub fn single_series(
    x0: f64,
    p0: f64,
    delta_x: f64,
    arrival_point: f64,
    t_min: f64,
    t_max: f64,
    steps: usize,
) -> Result<Vec<f64>, JsError> {
    single_rows(x0, p0, delta_x, arrival_point, t_min, t_max, steps).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = pairSeries)]
pub fn pair_series(x0_a: f64, p0: f64, delta_x: f64, t_max: f64, steps: usize) -> Result<Vec<f64>, JsError> {
    pair_rows(x0_a, p0, delta_x, t_max, steps).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = boundPairSeries)]
pub fn bound_pair_series(
    level: i32,
    omega: f64,
    p0: f64,
    delta_x: f64,
    t_min: f64,
    t_max: f64,
    steps: usize,
) -> Result<Vec<f64>, JsError> {
    bound_pair_rows(level, omega, p0, delta_x, t_min, t_max, steps).map_err(|e| JsError::new(&e))
}
