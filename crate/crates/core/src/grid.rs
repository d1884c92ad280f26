//! Uniform momentum grids, trapezoid quadrature and one-particle
//! wavefunctions in momentum representation.
//!
//! Atomic units are used throughout (ħ = 1). The position-space wavefunction
//! is recovered as ψ(x) = (2π)^(-1/2) ∫dp e^{ipx} φ(p).

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Default number of points for one-dimensional momentum grids.
pub const DEFAULT_POINTS: usize = 1024;

/// Half-width, in momentum standard deviations, covered by automatically
/// sized grids.
pub const DEFAULT_SPAN_SIGMAS: f64 = 8.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentumGrid {
    p_min: f64,
    p_max: f64,
    n_points: usize,
    step: f64,
}

impl MomentumGrid {
    pub fn new(p_min: f64, p_max: f64, n_points: usize) -> Result<Self> {
        if !(p_min.is_finite() && p_max.is_finite()) || p_max <= p_min {
            return Err(Error::InvalidRange(format!(
                "p_max ({p_max}) must exceed p_min ({p_min})"
            )));
        }
        if n_points < 2 {
            return Err(Error::InvalidRange(format!(
                "need at least 2 grid points, got {n_points}"
            )));
        }
        let step = (p_max - p_min) / (n_points - 1) as f64;
        Ok(Self {
            p_min,
            p_max,
            n_points,
            step,
        })
    }

    /// Grid with the given spacing whose first point is `p_min`.
    pub fn with_step(p_min: f64, step: f64, n_points: usize) -> Result<Self> {
        if !(step > 0.0) || n_points < 2 {
            return Err(Error::InvalidRange(format!("step {step} with {n_points} points")));
        }
        let mut grid = Self::new(p_min, p_min + step * (n_points - 1) as f64, n_points)?;
        grid.step = step;
        Ok(grid)
    }

    /// Smallest grid of `n_points` covering every `[p0 - span·σ, p0 + span·σ]`
    /// window, optionally extended to contain p = 0.
    pub fn covering(packets: &[(f64, f64)], span_sigmas: f64, include_zero: bool, n_points: usize) -> Result<Self> {
        if packets.is_empty() {
            return Err(Error::InvalidRange("no packets to cover".into()));
        }
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for &(p0, sigma) in packets {
            lo = lo.min(p0 - span_sigmas * sigma);
            hi = hi.max(p0 + span_sigmas * sigma);
        }
        if include_zero {
            return Self::zero_aligned(lo, hi, n_points);
        }
        Self::new(lo, hi, n_points)
    }

    /// Grid of `n_points` covering `[lo, hi]` and 0, with p = 0 exactly on a node.
    pub fn zero_aligned(lo: f64, hi: f64, n_points: usize) -> Result<Self> {
        let (lo, hi) = (lo.min(0.0), hi.max(0.0));
        if n_points < 3 || !(hi > lo) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::InvalidRange(format!("[{lo}, {hi}] with {n_points} points")));
        }
        let step = (hi - lo) / (n_points - 2) as f64;
        let k0 = (-lo / step).ceil();
        Self::with_step(-(k0 * step), step, n_points)
    }

    /// Index of the node lying on p = 0, if there is one.
    pub fn zero_index(&self) -> Option<usize> {
        let k = (-self.p_min / self.step).round();
        if k < 0.0 || k >= self.n_points as f64 {
            return None;
        }
        let k = k as usize;
        (self.point(k).abs() <= 1e-9 * self.step).then_some(k)
    }

    /// Grid symmetric about zero.
    pub fn symmetric(half_width: f64, n_points: usize) -> Result<Self> {
        Self::new(-half_width, half_width, n_points)
    }

    pub fn p_min(&self) -> f64 {
        self.p_min
    }

    pub fn p_max(&self) -> f64 {
        self.p_max
    }

    pub fn len(&self) -> usize {
        self.n_points
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    #[inline]
    pub fn point(&self, k: usize) -> f64 {
        self.p_min + k as f64 * self.step
    }

    pub fn points(&self) -> impl ExactSizeIterator<Item = f64> + '_ {
        (0..self.n_points).map(move |k| self.point(k))
    }

    /// Composite trapezoid weight of point `k`.
    #[inline]
    pub fn weight(&self, k: usize) -> f64 {
        if k == 0 || k + 1 == self.n_points {
            0.5 * self.step
        } else {
            self.step
        }
    }

    pub fn weights(&self) -> Vec<f64> {
        (0..self.n_points).map(|k| self.weight(k)).collect()
    }

    /// Trapezoid rule applied to samples taken on this grid.
    pub fn integrate(&self, samples: &[f64]) -> f64 {
        debug_assert_eq!(samples.len(), self.n_points);
        samples.iter().enumerate().map(|(k, v)| self.weight(k) * v).sum()
    }

    pub fn is_symmetric(&self) -> bool {
        (self.p_min + self.p_max).abs() <= 1e-12 * self.p_max.abs().max(1.0)
    }

    /// Index `k` such that point `len - 1 - k` is `-point(k)`, if symmetric.
    pub fn mirror(&self, k: usize) -> usize {
        self.n_points - 1 - k
    }

    /// Lattice of all sums p_i + p_j of two points of this grid.
    pub fn sum_lattice(&self) -> Self {
        Self::with_step(2.0 * self.p_min, self.step, 2 * self.n_points - 1)
            .expect("sum lattice of a valid grid is valid")
    }

    /// Lattice of all half-differences (p_i - p_j)/2 of two points of this grid.
    pub fn difference_lattice(&self) -> Self {
        let half = 0.5 * self.step;
        Self::with_step(-half * (self.n_points - 1) as f64, half, 2 * self.n_points - 1)
            .expect("difference lattice of a valid grid is valid")
    }

    pub fn contains(&self, p: f64) -> bool {
        p >= self.p_min - 1e-12 * self.step && p <= self.p_max + 1e-12 * self.step
    }
}

/// Uniform sampling of the time axis: `n_steps` intervals, `n_steps + 1` samples.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    pub t_min: f64,
    pub t_max: f64,
    pub n_steps: usize,
}

impl TimeGrid {
    pub fn new(t_min: f64, t_max: f64, n_steps: usize) -> Result<Self> {
        if !(t_min.is_finite() && t_max.is_finite()) || t_max <= t_min {
            return Err(Error::InvalidRange(format!(
                "t_max ({t_max}) must exceed t_min ({t_min})"
            )));
        }
        if n_steps == 0 {
            return Err(Error::InvalidRange("time grid needs at least one step".into()));
        }
        Ok(Self { t_min, t_max, n_steps })
    }

    /// A grid holding the single instant `t`.
    pub fn single(t: f64) -> Self {
        Self {
            t_min: t,
            t_max: t,
            n_steps: 0,
        }
    }

    pub fn dt(&self) -> f64 {
        if self.n_steps == 0 {
            0.0
        } else {
            (self.t_max - self.t_min) / self.n_steps as f64
        }
    }

    pub fn len(&self) -> usize {
        self.n_steps + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn time(&self, k: usize) -> f64 {
        if k == self.n_steps {
            self.t_max
        } else {
            self.t_min + k as f64 * self.dt()
        }
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.len()).map(|k| self.time(k)).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WaveFunction1P {
    grid: MomentumGrid,
    amplitudes: Vec<Complex64>,
}

impl WaveFunction1P {
    pub fn new(grid: MomentumGrid, amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() != grid.len() {
            return Err(Error::InvalidRange(format!(
                "{} amplitudes for a grid of {} points",
                amplitudes.len(),
                grid.len()
            )));
        }
        Ok(Self { grid, amplitudes })
    }

    pub fn from_fn(grid: MomentumGrid, f: impl Fn(f64) -> Complex64) -> Self {
        let amplitudes = grid.points().map(f).collect();
        Self { grid, amplitudes }
    }

    pub fn zeros(grid: MomentumGrid) -> Self {
        Self {
            grid,
            amplitudes: vec![Complex64::new(0.0, 0.0); grid.len()],
        }
    }

    pub fn grid(&self) -> &MomentumGrid {
        &self.grid
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        Self {
            grid: self.grid,
            amplitudes: self.amplitudes.iter().map(|a| a * factor).collect(),
        }
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes
            .iter()
            .enumerate()
            .map(|(k, a)| self.grid.weight(k) * a.norm_sqr())
            .sum()
    }

    #[must_use = "returns a normalized copy"]
    pub fn normalize(&self) -> Result<Self> {
        let norm = self.norm();
        if norm < 1e-12 {
            return Err(Error::ZeroNorm(norm));
        }
        Ok(self.scaled(Complex64::new(1.0 / norm, 0.0)))
    }

    /// ⟨p̂⟩ over this state, divided by its squared norm.
    pub fn mean_momentum(&self) -> f64 {
        let first: f64 = self
            .amplitudes
            .iter()
            .enumerate()
            .map(|(k, a)| self.grid.weight(k) * self.grid.point(k) * a.norm_sqr())
            .sum();
        first / self.norm_sqr()
    }

    /// ⟨x̂⟩ with x̂ = i d/dp, using a fourth-order centred difference.
    pub fn mean_position(&self) -> f64 {
        let n = self.grid.len();
        let h = self.grid.step();
        let a = &self.amplitudes;
        let mut acc = Complex64::new(0.0, 0.0);
        for k in 2..n.saturating_sub(2) {
            let deriv = (a[k - 2] - 8.0 * a[k - 1] + 8.0 * a[k + 1] - a[k + 2]) / (12.0 * h);
            acc += self.grid.weight(k) * self.amplitudes[k].conj() * Complex64::i() * deriv;
        }
        acc.re / self.norm_sqr()
    }
}

impl WaveFunction1P {
    /// Cubic convolution (Catmull-Rom) interpolation at an arbitrary momentum.
    /// Returns `None` outside the grid.
    pub fn interpolate(&self, p: f64) -> Option<Complex64> {
        if !self.grid.contains(p) {
            return None;
        }
        let n = self.grid.len();
        let x = ((p - self.grid.p_min()) / self.grid.step()).clamp(0.0, (n - 1) as f64);
        let k = (x.floor() as usize).min(n - 2);
        let s = x - k as f64;
        let at = |i: isize| self.amplitudes[i.clamp(0, n as isize - 1) as usize];
        let k = k as isize;
        let (y0, y1, y2, y3) = (at(k - 1), at(k), at(k + 1), at(k + 2));
        let s2 = s * s;
        let s3 = s2 * s;
        Some(
            y0 * (-0.5 * s3 + s2 - 0.5 * s)
                + y1 * (1.5 * s3 - 2.5 * s2 + 1.0)
                + y2 * (-1.5 * s3 + 2.0 * s2 + 0.5 * s)
                + y3 * (0.5 * s3 - 0.5 * s2),
        )
    }
}

/// Trapezoid approximation of ∫dp conj(f(p)) g(p).
pub fn inner_product(f: &WaveFunction1P, g: &WaveFunction1P) -> Result<Complex64> {
    if f.grid != g.grid {
        return Err(Error::GridMismatch);
    }
    Ok(f.amplitudes
        .iter()
        .zip(&g.amplitudes)
        .enumerate()
        .map(|(k, (a, b))| f.grid.weight(k) * a.conj() * b)
        .sum())
}
