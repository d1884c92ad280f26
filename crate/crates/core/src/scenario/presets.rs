//! Named scenarios reproducing the five figures.

use std::path::PathBuf;

use super::config::*;
use crate::statistics::Statistics;

pub const PRESET_NAMES: [&str; 5] = ["fig1", "fig2", "fig3", "fig4", "fig5"];

const X_ARRIVAL: f64 = 3.0;

fn base(name: &str, kind: ScenarioKind, statistics: Vec<Statistics>, time: TimeConfig) -> ScenarioConfig {
    ScenarioConfig {
        name: name.into(),
        kind,
        statistics,
        mass: 1.0,
        arrival_point: X_ARRIVAL,
        time,
        orbital: None,
        orbital_a: None,
        orbital_b: None,
        center_of_mass: None,
        internal: None,
        numerics: NumericsConfig {
            n_points: default_points(kind),
            span_sigmas: crate::grid::DEFAULT_SPAN_SIGMAS,
            convergence_audit: true,
            convergence_tolerance: 1e-4,
            window_tolerance: 1e-4,
            peak_prominence: crate::analysis::DEFAULT_PROMINENCE,
        },
        output: OutputConfig {
            directory: PathBuf::from("."),
            prefix: name.into(),
            flux: false,
        },
    }
}

fn interacting(name: &str, slow: bool, selector: InternalSelector, statistics: Vec<Statistics>) -> ScenarioConfig {
    let (time, cm, omega) = if slow {
        (
            TimeConfig {
                t_min: 0.0,
                t_max: 20.0,
                steps: 400,
            },
            PacketConfig {
                x0: 0.0,
                p0: 1.0,
                delta_x: 1.0,
            },
            2f64.sqrt(),
        )
    } else {
        (
            TimeConfig {
                t_min: -10.0,
                t_max: 25.0,
                steps: 400,
            },
            PacketConfig {
                x0: 0.0,
                p0: 4.0,
                delta_x: 0.5,
            },
            0.02f64.sqrt(),
        )
    };
    let mut c = base(name, ScenarioKind::PairCmRel, statistics, time);
    c.center_of_mass = Some(cm);
    c.internal = Some(InternalConfig {
        omega,
        selector,
        n_max: crate::states::DEFAULT_N_MAX,
    });
    c
}

pub fn figure_preset(name: &str) -> Result<ScenarioConfig, super::ScenarioError> {
    use Statistics::*;
    let levels = || InternalSelector::Levels(vec![0, 1, 2, 3]);
    let coherent = || InternalSelector::Coherent { re: 0.0, im: 1.0 };
    let config = match name {
        "fig1" => {
            let mut c = base(
                name,
                ScenarioKind::PairOrbitals,
                vec![Boson, Fermion, Distinguishable],
                TimeConfig {
                    t_min: 0.0,
                    t_max: 8.0,
                    steps: 400,
                },
            );
            c.orbital_a = Some(PacketConfig {
                x0: -3.5,
                p0: 3.0,
                delta_x: 1.0,
            });
            c.orbital_b = Some(PacketConfig {
                x0: 0.0,
                p0: 3.0,
                delta_x: 1.0,
            });
            c
        }
        "fig2" => interacting(name, false, levels(), vec![Boson, Fermion]),
        "fig3" => interacting(name, true, levels(), vec![Boson, Fermion]),
        "fig4" => {
            let mut c = interacting(name, false, coherent(), vec![Boson, Fermion]);
            c.output.flux = true;
            c
        }
        "fig5" => interacting(name, true, coherent(), vec![Boson, Fermion]),
        other => return Err(super::ScenarioError::UnknownPreset(other.to_string())),
    };
    Ok(config)
}
