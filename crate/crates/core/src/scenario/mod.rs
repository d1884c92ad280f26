//! Config-driven scenarios: parse, validate, run, report.

mod config;
mod output;
mod presets;

use std::path::PathBuf;
use std::sync::Arc;
#[cfg(not(target_arch = "wasm32"))]
use std::time::Instant;
#[cfg(target_arch = "wasm32")]
use web_time::Instant;

pub use config::*;
pub use output::*;
pub use presets::*;

use crate::analysis::{find_peaks, Peak};
use crate::arrivals::{arrival_series_1p, ArrivalSeries};
use crate::evolution::EvolutionSpec;
use crate::grid::{MomentumGrid, TimeGrid};
use crate::multiparticle::{pair_series, CmRelSetup, OrbitalPair, PairScenario};
use crate::states::{coherent_combo, gaussian_packet, CoherentLabel, GaussianSpec, HOBasis, RelativeState};
use crate::statistics::Statistics;

const BASIS_POINTS: usize = 1024;

#[derive(Debug, thiserror::Error)]
pub enum ScenarioError {
    #[error("{0}")]
    Schema(#[from] SchemaError),
    #[error("unknown preset \"{0}\" (available: fig1, fig2, fig3, fig4, fig5)")]
    UnknownPreset(String),
    #[error("variant {label}: {source}")]
    Variant {
        label: String,
        #[source]
        source: crate::Error,
    },
    #[error("variant {label}: non-finite density at t = {t}")]
    NonFinite { label: String, t: f64 },
    #[error("cannot write {path}: {source}")]
    Sink {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

/// Parses and fully validates a document: schema checks first, then every
/// variant's states are constructed so module preconditions are checked
/// before any time series is computed.
pub fn parse_config(text: &str) -> Result<ScenarioConfig, SchemaError> {
    let config = parse_schema(text)?;
    validate_physics(&config)?;
    Ok(config)
}

/// Physics-level validation of an already typed config.
pub fn validate_physics(config: &ScenarioConfig) -> Result<(), SchemaError> {
    match build_variants(config, config.numerics.n_points) {
        Ok(_) => Ok(()),
        Err(ScenarioError::Variant { label, source }) => Err(SchemaError {
            violations: vec![Violation {
                field: format!("variant {label}"),
                message: source.to_string(),
            }],
        }),
        Err(other) => Err(SchemaError {
            violations: vec![Violation {
                field: "<scenario>".into(),
                message: other.to_string(),
            }],
        }),
    }
}

#[derive(Debug, Clone)]
enum Job {
    Single {
        f0: crate::grid::WaveFunction1P,
        evo: EvolutionSpec,
    },
    Pair(PairScenario),
}

#[derive(Debug, Clone)]
struct Variant {
    label: String,
    statistics: Option<Statistics>,
    job: Job,
}

fn packet_spec(p: &PacketConfig, mass: f64) -> crate::Result<GaussianSpec> {
    GaussianSpec::new(p.x0, p.p0, p.delta_x, mass)
}

fn build_variants(config: &ScenarioConfig, n_points: usize) -> Result<Vec<Variant>, ScenarioError> {
    let labels = config.variant_labels();
    let wrap = |label: &str| {
        let label = label.to_string();
        move |source| ScenarioError::Variant { label, source }
    };
    let m = config.mass;
    let span = config.numerics.span_sigmas;
    match config.kind {
        ScenarioKind::Single => {
            let label = &labels[0];
            let spec = packet_spec(config.orbital.as_ref().expect("validated"), m).map_err(wrap(label))?;
            let grid =
                MomentumGrid::covering(&[(spec.p0, spec.sigma_p())], span, true, n_points).map_err(wrap(label))?;
            let f0 = gaussian_packet(&spec, grid).map_err(wrap(label))?;
            let evo = EvolutionSpec::free(m).map_err(wrap(label))?;
            Ok(vec![Variant {
                label: label.clone(),
                statistics: None,
                job: Job::Single { f0, evo },
            }])
        }
        ScenarioKind::PairOrbitals => {
            let a = packet_spec(config.orbital_a.as_ref().expect("validated"), m).map_err(wrap("orbital_a"))?;
            let b = packet_spec(config.orbital_b.as_ref().expect("validated"), m).map_err(wrap("orbital_b"))?;
            let grid = MomentumGrid::covering(&[(a.p0, a.sigma_p()), (b.p0, b.sigma_p())], span, true, n_points)
                .map_err(wrap("orbitals"))?;
            let fa = gaussian_packet(&a, grid).map_err(wrap("orbital_a"))?;
            let fb = gaussian_packet(&b, grid).map_err(wrap("orbital_b"))?;
            config
                .statistics
                .iter()
                .zip(&labels)
                .map(|(&s, label)| {
                    let pair = OrbitalPair::new(&fa, &fb, s).map_err(wrap(label))?;
                    let evo = EvolutionSpec::free(m).map_err(wrap(label))?;
                    Ok(Variant {
                        label: label.clone(),
                        statistics: Some(s),
                        job: Job::Pair(PairScenario::Orbitals { pair, evo }),
                    })
                })
                .collect()
        }
        ScenarioKind::PairCmRel => {
            let internal = config.internal.as_ref().expect("validated");
            let cm = packet_spec(config.center_of_mass.as_ref().expect("validated"), 2.0 * m)
                .map_err(wrap("center_of_mass"))?;
            let basis = Arc::new(
                HOBasis::auto(0.5 * m, internal.omega, internal.n_max, BASIS_POINTS).map_err(wrap("internal"))?,
            );
            let mut rels: Vec<(RelativeState, Statistics)> = Vec::new();
            match &internal.selector {
                InternalSelector::Levels(levels) => {
                    for &n in levels {
                        for &s in config.statistics.iter().filter(|s| level_allowed(n, **s)) {
                            let rel =
                                RelativeState::eigenstate(Arc::clone(&basis), n).map_err(wrap(&format!("n{n}-{s}")))?;
                            rels.push((rel, s));
                        }
                    }
                }
                InternalSelector::Coherent { re, im } => {
                    for &s in &config.statistics {
                        let rel = coherent_combo(Arc::clone(&basis), CoherentLabel::new(*re, *im), s)
                            .map_err(wrap(&format!("coherent-{s}")))?;
                        rels.push((rel, s));
                    }
                }
            }
            rels.into_iter()
                .zip(&labels)
                .map(|((rel, s), label)| {
                    let grid = CmRelSetup::auto_grid(&cm, &rel, n_points).map_err(wrap(label))?;
                    let setup = CmRelSetup::new(&cm, rel, m, s, grid).map_err(wrap(label))?;
                    Ok(Variant {
                        label: label.clone(),
                        statistics: Some(s),
                        job: Job::Pair(PairScenario::CmRel(setup)),
                    })
                })
                .collect()
        }
    }
}

fn compute(variant: &Variant, config: &ScenarioConfig, times: &TimeGrid) -> Result<ArrivalSeries, ScenarioError> {
    let (x, m) = (config.arrival_point, config.mass);
    let mut series = match &variant.job {
        Job::Single { f0, evo } => arrival_series_1p(f0, evo, x, m, times),
        Job::Pair(scenario) => pair_series(scenario, times, x, m),
    }
    .map_err(|source| ScenarioError::Variant {
        label: variant.label.clone(),
        source,
    })?;
    if let Some(bad) = series
        .points
        .iter()
        .find(|p| !(p.pi.is_finite() && p.pi_plus.is_finite() && p.pi_minus.is_finite() && p.flux.is_finite()))
    {
        return Err(ScenarioError::NonFinite {
            label: variant.label.clone(),
            t: bad.t,
        });
    }
    series.meta.scenario = format!("{}/{}", config.name, variant.label);
    Ok(series)
}

#[derive(Debug, Clone, PartialEq)]
pub struct FluxDiagnostics {
    pub integral: f64,
    /// max_t |j − Π| divided by the peak of Π.
    pub max_deviation: f64,
    pub min_flux: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceAudit {
    pub refined_points: usize,
    pub refined_integral: f64,
    pub relative_change: f64,
    pub ok: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AuditFlags {
    pub boundary_ratio: f64,
    pub window_ok: bool,
    pub convergence: Option<ConvergenceAudit>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryReport {
    pub label: String,
    pub statistics: Option<Statistics>,
    pub integral: f64,
    pub integral_plus: f64,
    pub integral_minus: f64,
    pub mean_arrival_time: f64,
    pub peak_prominence: f64,
    /// Sorted by time.
    pub peaks: Vec<Peak>,
    pub flux: Option<FluxDiagnostics>,
    pub audit: AuditFlags,
    pub runtime_seconds: f64,
}

impl SummaryReport {
    fn new(label: &str, statistics: Option<Statistics>, series: &ArrivalSeries, config: &ScenarioConfig) -> Self {
        let boundary_ratio = series.boundary_ratio();
        let peak = series.peak_value();
        let flux = config.output.flux.then(|| FluxDiagnostics {
            integral: series.flux_integral(),
            max_deviation: series.points.iter().map(|p| (p.flux - p.pi).abs()).fold(0.0, f64::max) / peak,
            min_flux: series.points.iter().map(|p| p.flux).fold(f64::INFINITY, f64::min),
        });
        Self {
            label: label.to_string(),
            statistics,
            integral: series.time_integral(),
            integral_plus: series.integral_plus(),
            integral_minus: series.integral_minus(),
            mean_arrival_time: series.mean_arrival_time(),
            peak_prominence: config.numerics.peak_prominence,
            peaks: find_peaks(&series.times(), &series.pi(), config.numerics.peak_prominence),
            flux,
            audit: AuditFlags {
                boundary_ratio,
                window_ok: boundary_ratio <= config.numerics.window_tolerance,
                convergence: None,
            },
            runtime_seconds: 0.0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ScenarioRun {
    pub series: Vec<ArrivalSeries>,
    pub reports: Vec<SummaryReport>,
}

impl ScenarioRun {
    pub fn report(&self, label: &str) -> Option<&SummaryReport> {
        self.reports.iter().find(|r| r.label == label)
    }

    pub fn series(&self, label: &str) -> Option<&ArrivalSeries> {
        self.reports
            .iter()
            .position(|r| r.label == label)
            .map(|i| &self.series[i])
    }

    /// True when a convergence audit ran and failed.
    pub fn convergence_failed(&self) -> bool {
        self.reports
            .iter()
            .any(|r| r.audit.convergence.as_ref().is_some_and(|c| !c.ok))
    }

    pub fn window_warnings(&self) -> Vec<&str> {
        self.reports
            .iter()
            .filter(|r| !r.audit.window_ok)
            .map(|r| r.label.as_str())
            .collect()
    }
}

fn map_variants<T: Send>(
    variants: &[Variant],
    f: impl Fn(&Variant) -> Result<T, ScenarioError> + Sync + Send,
) -> Result<Vec<T>, ScenarioError> {
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        variants.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        variants.iter().map(f).collect()
    }
}

/// Runs every variant; with `numerics.convergence_audit` each variant is
/// repeated at twice the momentum-grid density and the integrals compared.
pub fn run_scenario(config: &ScenarioConfig) -> Result<ScenarioRun, ScenarioError> {
    let t = &config.time;
    let times = TimeGrid::new(t.t_min, t.t_max, t.steps).map_err(|source| ScenarioError::Variant {
        label: "time".into(),
        source,
    })?;
    let variants = build_variants(config, config.numerics.n_points)?;
    let refined = if config.numerics.convergence_audit {
        Some(build_variants(config, 2 * config.numerics.n_points)?)
    } else {
        None
    };
    let results = map_variants(&variants, |v| {
        let start = Instant::now();
        let series = compute(v, config, &times)?;
        let mut report = SummaryReport::new(&v.label, v.statistics, &series, config);
        if let Some(refined) = &refined {
            let twin = refined.iter().find(|r| r.label == v.label).expect("same labels");
            let fine = compute(twin, config, &times)?;
            let refined_integral = fine.time_integral();
            let relative_change = ((refined_integral - report.integral) / report.integral).abs();
            report.audit.convergence = Some(ConvergenceAudit {
                refined_points: 2 * config.numerics.n_points,
                refined_integral,
                relative_change,
                ok: relative_change < config.numerics.convergence_tolerance,
            });
        }
        report.runtime_seconds = start.elapsed().as_secs_f64();
        if !report.audit.window_ok {
            log::warn!(
                "{}/{}: boundary density is {:.2e} of the peak; the window cuts off arrivals",
                config.name,
                v.label,
                report.audit.boundary_ratio
            );
        }
        Ok((series, report))
    })?;
    let (series, reports) = results.into_iter().unzip();
    Ok(ScenarioRun { series, reports })
}
