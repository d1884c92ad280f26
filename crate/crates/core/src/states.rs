//! State constructors: minimum-uncertainty Gaussian packets, harmonic
//! oscillator eigenfunctions in momentum representation, and coherent-state
//! parity combinations expanded in the oscillator eigenbasis.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{inner_product, MomentumGrid, WaveFunction1P};
use crate::statistics::Statistics;

/// Default truncation index of the oscillator basis.
pub const DEFAULT_N_MAX: usize = 64;

const TAIL_TOLERANCE: f64 = 1e-8;
const COHERENT_TAIL_TOLERANCE: f64 = 1e-10;

/// Minimum-uncertainty Gaussian packet at t = 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianSpec {
    pub x0: f64,
    pub p0: f64,
    /// Square root of the spatial variance.
    pub delta_x: f64,
    pub mass: f64,
}

impl GaussianSpec {
    pub fn new(x0: f64, p0: f64, delta_x: f64, mass: f64) -> Result<Self> {
        let spec = Self { x0, p0, delta_x, mass };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.delta_x > 0.0) || !self.delta_x.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "delta_x must be positive, got {}",
                self.delta_x
            )));
        }
        if !(self.mass > 0.0) || !self.mass.is_finite() {
            return Err(Error::NonpositiveMass(self.mass));
        }
        if !(self.x0.is_finite() && self.p0.is_finite()) {
            return Err(Error::InvalidParameter("non-finite packet centre".into()));
        }
        Ok(())
    }

    /// Momentum spread σ_p = ħ / (2 Δx).
    pub fn sigma_p(&self) -> f64 {
        0.5 / self.delta_x
    }

    /// Momentum amplitude at t = 0.
    #[inline]
    pub fn amplitude(&self, p: f64) -> Complex64 {
        let s = self.sigma_p();
        let modulus = (2.0 * PI * s * s).powf(-0.25) * (-(p - self.p0).powi(2) / (4.0 * s * s)).exp();
        Complex64::from_polar(modulus, -p * self.x0)
    }

    /// Probability mass of |φ|² lying outside the grid.
    pub fn tail_mass_outside(&self, grid: &MomentumGrid) -> f64 {
        let scale = std::f64::consts::SQRT_2 * self.sigma_p();
        let below = 0.5 * libm::erfc((self.p0 - grid.p_min()) / scale);
        let above = 0.5 * libm::erfc((grid.p_max() - self.p0) / scale);
        below + above
    }

    pub fn check_support(&self, grid: &MomentumGrid) -> Result<()> {
        let tail = self.tail_mass_outside(grid);
        if tail > TAIL_TOLERANCE {
            return Err(Error::TruncatedSupport {
                tail,
                p_min: grid.p_min(),
                p_max: grid.p_max(),
            });
        }
        Ok(())
    }
}

/// Samples the packet on `grid`. Truncated support is logged, not fatal;
/// use [`GaussianSpec::check_support`] for a hard check.
pub fn gaussian_packet(spec: &GaussianSpec, grid: MomentumGrid) -> Result<WaveFunction1P> {
    spec.validate()?;
    if let Err(e) = spec.check_support(&grid) {
        log::warn!("{e}");
    }
    Ok(WaveFunction1P::from_fn(grid, |p| spec.amplitude(p)))
}

/// Normalized Hermite functions ψ_0(ξ)..ψ_{n_max}(ξ), with
/// ψ_n(ξ) = (2ⁿ n! √π)^(-1/2) H_n(ξ) e^(-ξ²/2).
pub fn hermite_functions(xi: f64, n_max: usize, out: &mut Vec<f64>) {
    out.clear();
    out.reserve(n_max + 1);
    let h0 = PI.powf(-0.25) * (-0.5 * xi * xi).exp();
    out.push(h0);
    if n_max == 0 {
        return;
    }
    out.push(std::f64::consts::SQRT_2 * xi * h0);
    for n in 1..n_max {
        let nf = n as f64;
        let next = (2.0 / (nf + 1.0)).sqrt() * xi * out[n] - (nf / (nf + 1.0)).sqrt() * out[n - 1];
        out.push(next);
    }
}

/// (-i)^n
#[inline]
fn minus_i_pow(n: usize) -> Complex64 {
    match n % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, -1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, 1.0),
    }
}

/// Harmonic-oscillator eigenfunctions u_0..u_{n_max} in momentum
/// representation, tabulated on a symmetric grid.
#[derive(Debug, Clone)]
pub struct HOBasis {
    mu: f64,
    omega: f64,
    n_max: usize,
    grid: MomentumGrid,
    eigenfunctions: Vec<WaveFunction1P>,
}

impl HOBasis {
    pub fn new(mu: f64, omega: f64, n_max: usize, grid: MomentumGrid) -> Result<Self> {
        if !(mu > 0.0) || !mu.is_finite() {
            return Err(Error::NonpositiveMass(mu));
        }
        if !(omega > 0.0) || !omega.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "oscillator frequency must be positive, got {omega}"
            )));
        }
        if !grid.is_symmetric() {
            return Err(Error::InvalidRange(format!(
                "oscillator basis needs a grid symmetric about 0, got [{}, {}]",
                grid.p_min(),
                grid.p_max()
            )));
        }
        let b = (mu * omega).sqrt();
        let mut columns = vec![Vec::with_capacity(grid.len()); n_max + 1];
        let mut scratch = Vec::new();
        for p in grid.points() {
            hermite_functions(p / b, n_max, &mut scratch);
            for (n, h) in scratch.iter().enumerate() {
                columns[n].push(minus_i_pow(n) * (h / b.sqrt()));
            }
        }
        let eigenfunctions: Vec<_> = columns
            .into_iter()
            .map(|amps| WaveFunction1P::new(grid, amps).expect("column length matches grid"))
            .collect();
        let tail = (1.0 - eigenfunctions[n_max].norm_sqr()).max(0.0);
        if tail > TAIL_TOLERANCE {
            return Err(Error::GridTooSmall { n_max, tail });
        }
        Ok(Self {
            mu,
            omega,
            n_max,
            grid,
            eigenfunctions,
        })
    }

    /// Builds the basis on a symmetric grid wide enough for level `n_max`.
    pub fn auto(mu: f64, omega: f64, n_max: usize, n_points: usize) -> Result<Self> {
        if !(mu > 0.0 && omega > 0.0) {
            return Self::new(mu, omega, n_max, MomentumGrid::symmetric(1.0, 3)?);
        }
        let b = (mu * omega).sqrt();
        let half_width = b * Self::reach(n_max);
        Self::new(mu, omega, n_max, MomentumGrid::symmetric(half_width, n_points)?)
    }

    /// Half-width, in units of b, beyond which level `n` has negligible weight.
    pub fn reach(n: usize) -> f64 {
        ((2 * n + 1) as f64).sqrt() + 8.0
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn grid(&self) -> &MomentumGrid {
        &self.grid
    }

    /// Momentum scale b = √(μωħ).
    pub fn momentum_scale(&self) -> f64 {
        (self.mu * self.omega).sqrt()
    }

    /// Oscillation period 2π/ω.
    pub fn period(&self) -> f64 {
        2.0 * PI / self.omega
    }

    pub fn eigenfunction(&self, n: usize) -> &WaveFunction1P {
        &self.eigenfunctions[n]
    }

    pub fn eigenfunctions(&self) -> &[WaveFunction1P] {
        &self.eigenfunctions
    }

    /// All u_n(p), n = 0..=n_max, at an arbitrary momentum.
    pub fn evaluate(&self, p: f64, out: &mut Vec<Complex64>) {
        let b = self.momentum_scale();
        let mut scratch = Vec::new();
        hermite_functions(p / b, self.n_max, &mut scratch);
        out.clear();
        out.extend(scratch.iter().enumerate().map(|(n, h)| minus_i_pow(n) * (h / b.sqrt())));
    }

    /// Eigenfunctions sampled on another grid, for repeated rendering.
    pub fn table_on(&self, grid: MomentumGrid) -> RenderTable {
        let mut rows = vec![Vec::with_capacity(grid.len()); self.n_max + 1];
        let mut values = Vec::new();
        for p in grid.points() {
            self.evaluate(p, &mut values);
            for (n, v) in values.iter().enumerate() {
                rows[n].push(*v);
            }
        }
        RenderTable { grid, rows }
    }
}

/// Oscillator eigenfunctions sampled on a fixed grid.
#[derive(Debug, Clone)]
pub struct RenderTable {
    grid: MomentumGrid,
    rows: Vec<Vec<Complex64>>,
}

impl RenderTable {
    pub fn grid(&self) -> &MomentumGrid {
        &self.grid
    }

    /// Σ c_n u_n on the table grid.
    pub fn render(&self, coefficients: &[Complex64]) -> WaveFunction1P {
        let mut amps = vec![Complex64::new(0.0, 0.0); self.grid.len()];
        for (c, row) in coefficients.iter().zip(&self.rows) {
            if *c == Complex64::new(0.0, 0.0) {
                continue;
            }
            for (a, u) in amps.iter_mut().zip(row) {
                *a += c * u;
            }
        }
        WaveFunction1P::new(self.grid, amps).expect("row length matches grid")
    }
}

/// Internal state expanded in an oscillator eigenbasis.
#[derive(Debug, Clone)]
pub struct RelativeState {
    basis: Arc<HOBasis>,
    coefficients: Vec<Complex64>,
}

impl RelativeState {
    pub fn new(basis: Arc<HOBasis>, coefficients: Vec<Complex64>) -> Result<Self> {
        if coefficients.len() != basis.n_max + 1 {
            return Err(Error::InvalidRange(format!(
                "{} coefficients for a basis truncated at n_max = {}",
                coefficients.len(),
                basis.n_max
            )));
        }
        Ok(Self { basis, coefficients })
    }

    pub fn eigenstate(basis: Arc<HOBasis>, n: usize) -> Result<Self> {
        if n > basis.n_max {
            return Err(Error::InvalidRange(format!(
                "level {n} exceeds basis truncation {}",
                basis.n_max
            )));
        }
        let mut c = vec![Complex64::new(0.0, 0.0); basis.n_max + 1];
        c[n] = Complex64::new(1.0, 0.0);
        Self::new(basis, c)
    }

    pub fn basis(&self) -> &Arc<HOBasis> {
        &self.basis
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coefficients
    }

    pub fn norm_sqr(&self) -> f64 {
        self.coefficients.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn with_coefficients(&self, coefficients: Vec<Complex64>) -> Self {
        assert_eq!(coefficients.len(), self.coefficients.len());
        Self {
            basis: Arc::clone(&self.basis),
            coefficients,
        }
    }

    /// +1 if only even levels are populated, -1 if only odd, `None` if mixed.
    pub fn parity(&self) -> Option<i8> {
        let mass = |parity: usize| -> f64 {
            self.coefficients
                .iter()
                .enumerate()
                .filter(|(n, _)| n % 2 == parity)
                .map(|(_, c)| c.norm_sqr())
                .sum()
        };
        let (even, odd) = (mass(0), mass(1));
        let total = even + odd;
        if odd <= 1e-24 * total {
            Some(1)
        } else if even <= 1e-24 * total {
            Some(-1)
        } else {
            None
        }
    }

    /// Momentum wavefunction on the basis grid.
    pub fn render(&self) -> WaveFunction1P {
        let mut amps = vec![Complex64::new(0.0, 0.0); self.basis.grid.len()];
        for (c, u) in self.coefficients.iter().zip(&self.basis.eigenfunctions) {
            if *c == Complex64::new(0.0, 0.0) {
                continue;
            }
            for (a, v) in amps.iter_mut().zip(u.amplitudes()) {
                *a += c * v;
            }
        }
        WaveFunction1P::new(self.basis.grid, amps).expect("basis grid length")
    }

    /// Momentum wavefunction evaluated directly on an arbitrary grid.
    pub fn render_on(&self, grid: MomentumGrid) -> WaveFunction1P {
        self.basis.table_on(grid).render(&self.coefficients)
    }
}

/// Dimensionless coherent-state label.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoherentLabel {
    pub z: Complex64,
}

impl CoherentLabel {
    pub fn new(re: f64, im: f64) -> Self {
        Self {
            z: Complex64::new(re, im),
        }
    }

    pub fn conj(self) -> Self {
        Self { z: self.z.conj() }
    }
}

/// Fock coefficients e^(-|z|²/2) zⁿ/√(n!) for n = 0..=n_max.
pub fn coherent_coefficients(label: CoherentLabel, n_max: usize) -> Result<Vec<Complex64>> {
    let z = label.z;
    let mut c = Vec::with_capacity(n_max + 1);
    let mut current = Complex64::new((-0.5 * z.norm_sqr()).exp(), 0.0);
    c.push(current);
    for n in 1..=n_max {
        current = current * z / (n as f64).sqrt();
        c.push(current);
    }
    // Sum the neglected terms until they stop contributing.
    let mut tail = 0.0;
    let mut n = n_max;
    loop {
        n += 1;
        current = current * z / (n as f64).sqrt();
        let term = current.norm_sqr();
        tail += term;
        if (n as f64) > z.norm_sqr() && term <= 1e-6 * tail.max(1e-300) || term == 0.0 {
            break;
        }
    }
    if tail >= COHERENT_TAIL_TOLERANCE {
        return Err(Error::TruncationTooSevere { n_max, tail });
    }
    Ok(c)
}

/// (|z⟩ ± |z̄⟩) renormalized to unit norm. Distinguishable statistics give
/// the plain coherent state |z⟩.
pub fn coherent_combo(basis: Arc<HOBasis>, label: CoherentLabel, statistics: Statistics) -> Result<RelativeState> {
    let cz = coherent_coefficients(label, basis.n_max)?;
    let coefficients = match statistics.exchange_sign() {
        None => cz,
        Some(sign) => {
            let czbar = coherent_coefficients(label.conj(), basis.n_max)?;
            let combo: Vec<Complex64> = cz.iter().zip(&czbar).map(|(a, b)| a + sign * b).collect();
            let norm = combo.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
            if norm < 1e-10 {
                return Err(Error::DegenerateCombo(norm));
            }
            combo.into_iter().map(|c| c / norm).collect()
        }
    };
    RelativeState::new(basis, coefficients)
}

/// Result of expanding a grid wavefunction in the oscillator basis.
#[derive(Debug, Clone)]
pub struct Projection {
    pub state: RelativeState,
    /// ‖f‖² − Σ|c_n|².
    pub residual: f64,
}

pub fn project_onto_basis(f: &WaveFunction1P, basis: Arc<HOBasis>) -> Result<Projection> {
    if f.grid() != basis.grid() {
        return Err(Error::GridMismatch);
    }
    let coefficients = basis
        .eigenfunctions
        .iter()
        .map(|u| inner_product(u, f))
        .collect::<Result<Vec<_>>>()?;
    let captured: f64 = coefficients.iter().map(|c| c.norm_sqr()).sum();
    let residual = f.norm_sqr() - captured;
    if residual > 1e-6 {
        return Err(Error::PoorRepresentation(residual));
    }
    Ok(Projection {
        state: RelativeState::new(basis, coefficients)?,
        residual,
    })
}
