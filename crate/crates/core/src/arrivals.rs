//! Arrival densities at a detection point X.
//!
//! The crossing amplitudes are ⟨v_α|ψ(t)⟩ with the momentum kernel
//! √(αp / (2πħm)) Θ(αp) e^{ipX/ħ}; the density of arrivals is
//! Π = |a₊|² + |a₋|². The flux uses the same quadrature with the arithmetic
//! instead of the geometric mean of the momenta.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::evolution::EvolutionSpec;
use crate::grid::{MomentumGrid, TimeGrid, WaveFunction1P};
use crate::statistics::Statistics;

/// Side from which the detection point is crossed: `Plus` for arrivals from
/// the left (p > 0), `Minus` for arrivals from the right (p < 0).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Plus,
    Minus,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrossingAmplitudes {
    pub plus: Complex64,
    pub minus: Complex64,
}

/// Quadrature weights for crossing amplitudes and flux at a fixed X,
/// precomputed for one momentum grid.
#[derive(Debug, Clone)]
pub struct CrossingKernel {
    grid: MomentumGrid,
    x_arr: f64,
    mass: f64,
    plus: Vec<Complex64>,
    minus: Vec<Complex64>,
    /// w_k e^{ip_k X} / √(2π)
    fourier: Vec<Complex64>,
    /// p_k w_k e^{ip_k X} / √(2π)
    fourier_p: Vec<Complex64>,
}

impl CrossingKernel {
    pub fn new(grid: MomentumGrid, x_arr: f64, mass: f64) -> Result<Self> {
        if !(mass > 0.0) || !mass.is_finite() {
            return Err(Error::NonpositiveMass(mass));
        }
        let n = grid.len();
        let mut plus = vec![Complex64::new(0.0, 0.0); n];
        let mut minus = vec![Complex64::new(0.0, 0.0); n];
        let mut fourier = Vec::with_capacity(n);
        let mut fourier_p = Vec::with_capacity(n);
        let norm = (2.0 * PI).sqrt().recip();
        for k in 0..n {
            let p = grid.point(k);
            let w = grid.weight(k);
            let phase = Complex64::from_polar(1.0, p * x_arr);
            let sqrt_kernel = (p.abs() / (2.0 * PI * mass)).sqrt();
            if p > 0.0 {
                plus[k] = w * sqrt_kernel * phase;
            } else if p < 0.0 {
                minus[k] = w * sqrt_kernel * phase;
            }
            fourier.push(w * norm * phase);
            fourier_p.push(p * w * norm * phase);
        }
        if let Some(k0) = grid.zero_index() {
            let scale = (2.0 * PI * mass).sqrt().recip();
            let phase = |k: usize| Complex64::from_polar(scale, grid.point(k) * x_arr);
            let c = sqrt_endpoint_weights(grid.step());
            for (j, cj) in c.iter().enumerate() {
                if k0 + 2 < n {
                    plus[k0 + j] += cj * phase(k0 + j);
                }
                if k0 >= 2 {
                    minus[k0 - j] += cj * phase(k0 - j);
                }
            }
        }
        Ok(Self {
            grid,
            x_arr,
            mass,
            plus,
            minus,
            fourier,
            fourier_p,
        })
    }

    pub fn grid(&self) -> &MomentumGrid {
        &self.grid
    }

    pub fn x_arr(&self) -> f64 {
        self.x_arr
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub(crate) fn plus_weights(&self) -> &[Complex64] {
        &self.plus
    }

    pub(crate) fn minus_weights(&self) -> &[Complex64] {
        &self.minus
    }

    pub(crate) fn fourier_weights(&self) -> &[Complex64] {
        &self.fourier
    }

    pub(crate) fn fourier_p_weights(&self) -> &[Complex64] {
        &self.fourier_p
    }

    fn check(&self, f: &WaveFunction1P) -> Result<()> {
        if *f.grid() != self.grid {
            return Err(Error::GridMismatch);
        }
        Ok(())
    }

    pub fn amplitudes(&self, f: &WaveFunction1P) -> Result<CrossingAmplitudes> {
        self.check(f)?;
        Ok(CrossingAmplitudes {
            plus: dot(&self.plus, f.amplitudes()),
            minus: dot(&self.minus, f.amplitudes()),
        })
    }

    /// ψ(X) and ψ'(X)/i, i.e. F and G of the factorized flux.
    pub fn position_values(&self, f: &WaveFunction1P) -> Result<(Complex64, Complex64)> {
        self.check(f)?;
        Ok((dot(&self.fourier, f.amplitudes()), dot(&self.fourier_p, f.amplitudes())))
    }

    pub fn flux(&self, f: &WaveFunction1P) -> Result<f64> {
        let (value, momentum) = self.position_values(f)?;
        Ok((value.conj() * momentum).re / self.mass)
    }

    pub fn density(&self, f: &WaveFunction1P, t: f64) -> Result<ArrivalPoint> {
        let a = self.amplitudes(f)?;
        let flux = self.flux(f)?;
        Ok(ArrivalPoint::from_parts(t, a.plus.norm_sqr(), a.minus.norm_sqr(), flux))
    }
}

/// Corrections to the trapezoid rule for ∫₀ √p g(p) dp at the p = 0 end,
/// applied to g(0), g(h), g(2h). Removes the h^{3/2} and h^{5/2} error terms
/// of the square-root endpoint.
fn sqrt_endpoint_weights(h: f64) -> [f64; 3] {
    const ZETA_M1_2: f64 = -0.207_886_224_977_354_57;
    const ZETA_M3_2: f64 = -0.025_485_201_889_833_036;
    let c1 = -ZETA_M1_2 * h.powf(1.5);
    let c2 = -ZETA_M3_2 * h.powf(1.5);
    [c1 - 1.5 * c2, 2.0 * c2, -0.5 * c2]
}

#[inline]
pub(crate) fn dot(weights: &[Complex64], values: &[Complex64]) -> Complex64 {
    weights.iter().zip(values).map(|(w, v)| w * v).sum()
}

pub fn crossing_amplitude(f: &WaveFunction1P, x_arr: f64, mass: f64, direction: Direction) -> Result<Complex64> {
    let a = CrossingKernel::new(*f.grid(), x_arr, mass)?.amplitudes(f)?;
    Ok(match direction {
        Direction::Plus => a.plus,
        Direction::Minus => a.minus,
    })
}

/// Density of arrivals of an already evolved state; `t` is left at 0.
pub fn arrival_density_1p(f_t: &WaveFunction1P, x_arr: f64, mass: f64) -> Result<ArrivalPoint> {
    CrossingKernel::new(*f_t.grid(), x_arr, mass)?.density(f_t, 0.0)
}

/// Probability current j(X) = Re[conj(ψ(X)) (−iħ∂ψ/∂x)(X)] / m.
pub fn flux_1p(f_t: &WaveFunction1P, x_arr: f64, mass: f64) -> Result<f64> {
    CrossingKernel::new(*f_t.grid(), x_arr, mass)?.flux(f_t)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArrivalPoint {
    pub t: f64,
    pub pi: f64,
    pub pi_plus: f64,
    pub pi_minus: f64,
    pub flux: f64,
}

impl ArrivalPoint {
    pub fn from_parts(t: f64, pi_plus: f64, pi_minus: f64, flux: f64) -> Self {
        Self {
            t,
            pi: pi_plus + pi_minus,
            pi_plus,
            pi_minus,
            flux,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeriesMeta {
    pub scenario: String,
    pub x_arr: f64,
    pub mass: f64,
    pub statistics: Option<Statistics>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ArrivalSeries {
    pub times: TimeGrid,
    pub points: Vec<ArrivalPoint>,
    pub meta: SeriesMeta,
}

impl ArrivalSeries {
    pub fn new(times: TimeGrid, points: Vec<ArrivalPoint>, meta: SeriesMeta) -> Self {
        debug_assert_eq!(times.len(), points.len());
        debug_assert!(points.windows(2).all(|w| w[0].t < w[1].t));
        Self { times, points, meta }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn times(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.t).collect()
    }

    pub fn pi(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.pi).collect()
    }

    pub fn flux(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.flux).collect()
    }

    fn trapezoid(&self, value: impl Fn(&ArrivalPoint) -> f64) -> f64 {
        self.points
            .windows(2)
            .map(|w| 0.5 * (w[1].t - w[0].t) * (value(&w[0]) + value(&w[1])))
            .sum()
    }

    /// ∫Π dt over the window: the number of arrivals.
    pub fn time_integral(&self) -> f64 {
        self.trapezoid(|p| p.pi)
    }

    pub fn integral_plus(&self) -> f64 {
        self.trapezoid(|p| p.pi_plus)
    }

    pub fn integral_minus(&self) -> f64 {
        self.trapezoid(|p| p.pi_minus)
    }

    pub fn flux_integral(&self) -> f64 {
        self.trapezoid(|p| p.flux)
    }

    /// ∫tΠ dt / ∫Π dt.
    pub fn mean_arrival_time(&self) -> f64 {
        self.trapezoid(|p| p.t * p.pi) / self.time_integral()
    }

    pub fn peak_value(&self) -> f64 {
        self.points.iter().map(|p| p.pi).fold(0.0, f64::max)
    }

    /// Largest boundary density relative to the peak density.
    pub fn boundary_ratio(&self) -> f64 {
        let peak = self.peak_value();
        if peak == 0.0 {
            return 0.0;
        }
        let first = self.points.first().map_or(0.0, |p| p.pi);
        let last = self.points.last().map_or(0.0, |p| p.pi);
        first.max(last) / peak
    }

    /// Fails with `WindowTooSmall` when the window cuts off arrivals above
    /// `tolerance` times the peak density.
    pub fn check_window(&self, tolerance: f64) -> Result<()> {
        let ratio = self.boundary_ratio();
        if ratio > tolerance {
            return Err(Error::WindowTooSmall(ratio));
        }
        Ok(())
    }
}

/// Evaluates `f` at every time of the grid, in parallel when enabled.
pub(crate) fn map_times<T, F>(times: &TimeGrid, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(f64) -> Result<T> + Sync + Send,
{
    let ts = times.times();
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        ts.into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        ts.into_iter().map(f).collect()
    }
}

pub fn arrival_series_1p(
    f0: &WaveFunction1P,
    evo: &EvolutionSpec,
    x_arr: f64,
    mass: f64,
    times: &TimeGrid,
) -> Result<ArrivalSeries> {
    let probe = evo.apply(f0, times.t_min)?;
    let kernel = CrossingKernel::new(*probe.grid(), x_arr, mass)?;
    let points = map_times(times, |t| kernel.density(&evo.apply(f0, t)?, t))?;
    Ok(ArrivalSeries::new(
        *times,
        points,
        SeriesMeta {
            scenario: "single".into(),
            x_arr,
            mass,
            statistics: None,
        },
    ))
}
