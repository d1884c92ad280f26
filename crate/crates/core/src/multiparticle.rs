//! Two-particle arrival densities.
//!
//! Two independent routes are provided. The orbital route uses the
//! cross-term formula for (anti)symmetrized orbital pairs, built from
//! one-particle crossing amplitudes only. The tensor route evaluates the
//! first-quantized expectation of Π̂⊗1 + 1⊗Π̂ on an explicit (p₁, p₂) grid;
//! it also handles centre-of-mass/relative factorized states that have no
//! orbital-pair form.

use std::sync::Arc;

use ndarray::Array2;
use num_complex::Complex64;

use crate::arrivals::{map_times, ArrivalPoint, ArrivalSeries, CrossingKernel, SeriesMeta};
use crate::error::{Error, Result};
use crate::evolution::{evolve_free, evolve_ho, EvolutionSpec};
use crate::grid::{inner_product, MomentumGrid, TimeGrid, WaveFunction1P};
use crate::states::{gaussian_packet, GaussianSpec, HOBasis, RelativeState, RenderTable};
use crate::statistics::Statistics;

const DEGENERACY_TOLERANCE: f64 = 1e-10;
const PARITY_TOLERANCE: f64 = 1e-6;

/// Two orbitals χ_a, χ_b combined with a given exchange statistics.
#[derive(Debug, Clone)]
pub struct OrbitalPair {
    chi_a: WaveFunction1P,
    chi_b: WaveFunction1P,
    statistics: Statistics,
    overlap_s: Complex64,
}

impl OrbitalPair {
    /// Normalizes both orbitals on their common grid.
    pub fn new(chi_a: &WaveFunction1P, chi_b: &WaveFunction1P, statistics: Statistics) -> Result<Self> {
        if chi_a.grid() != chi_b.grid() {
            return Err(Error::GridMismatch);
        }
        let chi_a = chi_a.normalize()?;
        let chi_b = chi_b.normalize()?;
        let overlap_s = inner_product(&chi_a, &chi_b)?;
        if statistics == Statistics::Fermion {
            let gap = 1.0 - overlap_s.norm_sqr();
            if gap <= DEGENERACY_TOLERANCE {
                return Err(Error::FermionicStateDegenerate(gap));
            }
        }
        Ok(Self {
            chi_a,
            chi_b,
            statistics,
            overlap_s,
        })
    }

    pub fn chi_a(&self) -> &WaveFunction1P {
        &self.chi_a
    }

    pub fn chi_b(&self) -> &WaveFunction1P {
        &self.chi_b
    }

    pub fn statistics(&self) -> Statistics {
        self.statistics
    }

    /// s = ⟨χ_a|χ_b⟩
    pub fn overlap(&self) -> Complex64 {
        self.overlap_s
    }

    pub fn with_statistics(&self, statistics: Statistics) -> Result<Self> {
        Self::new(&self.chi_a, &self.chi_b, statistics)
    }

    pub fn swapped(&self) -> Result<Self> {
        Self::new(&self.chi_b, &self.chi_a, self.statistics)
    }

    /// Combines one-particle matrix elements O_aa, O_bb, O_ab of a one-body
    /// operator into its expectation over the two-particle state.
    fn combine(&self, o_aa: f64, o_bb: f64, o_ab: Complex64) -> f64 {
        match self.statistics.exchange_sign() {
            None => o_aa + o_bb,
            Some(sign) => {
                let cross = 2.0 * (self.overlap_s.conj() * o_ab).re;
                (o_aa + o_bb + sign * cross) / (1.0 + sign * self.overlap_s.norm_sqr())
            }
        }
    }

    /// The explicitly (anti)symmetrized tensor-grid state.
    pub fn to_tensor(&self) -> TwoParticleWave {
        let grid = *self.chi_a.grid();
        let a = self.chi_a.amplitudes();
        let b = self.chi_b.amplitudes();
        let n = grid.len();
        let amplitudes = match self.statistics.exchange_sign() {
            None => Array2::from_shape_fn((n, n), |(i, j)| a[i] * b[j]),
            Some(sign) => {
                let norm = (2.0 * (1.0 + sign * self.overlap_s.norm_sqr())).sqrt().recip();
                Array2::from_shape_fn((n, n), |(i, j)| norm * (a[i] * b[j] + sign * a[j] * b[i]))
            }
        };
        TwoParticleWave {
            grid1: grid,
            grid2: grid,
            amplitudes,
            statistics: self.statistics,
        }
    }
}

fn orbital_point(kernel: &CrossingKernel, pair: &OrbitalPair, evo: &EvolutionSpec, t: f64) -> Result<ArrivalPoint> {
    let a = evo.apply(&pair.chi_a, t)?;
    let b = evo.apply(&pair.chi_b, t)?;
    let amp_a = kernel.amplitudes(&a)?;
    let amp_b = kernel.amplitudes(&b)?;
    let (fa, ga) = kernel.position_values(&a)?;
    let (fb, gb) = kernel.position_values(&b)?;

    let pi_plus = pair.combine(
        amp_a.plus.norm_sqr(),
        amp_b.plus.norm_sqr(),
        amp_a.plus.conj() * amp_b.plus,
    );
    let pi_minus = pair.combine(
        amp_a.minus.norm_sqr(),
        amp_b.minus.norm_sqr(),
        amp_a.minus.conj() * amp_b.minus,
    );
    let m = kernel.mass();
    let flux_elem =
        |f1: Complex64, g1: Complex64, f2: Complex64, g2: Complex64| (f1.conj() * g2 + g1.conj() * f2) / (2.0 * m);
    let flux = pair.combine(
        flux_elem(fa, ga, fa, ga).re,
        flux_elem(fb, gb, fb, gb).re,
        flux_elem(fa, ga, fb, gb),
    );
    Ok(ArrivalPoint::from_parts(t, pi_plus, pi_minus, flux))
}

/// Density of arrivals of an orbital pair at time `t` from the cross-term
/// formula [Π_aa + Π_bb ± 2 Re(s̄ Π_ab)] / (1 ± |s|²).
pub fn pair_density_orbitals(
    pair: &OrbitalPair,
    evo: &EvolutionSpec,
    t: f64,
    x_arr: f64,
    mass: f64,
) -> Result<ArrivalPoint> {
    let probe = evo.apply(&pair.chi_a, t)?;
    let kernel = CrossingKernel::new(*probe.grid(), x_arr, mass)?;
    orbital_point(&kernel, pair, evo, t)
}

/// Two-particle amplitudes ψ(p₁, p₂) on a tensor grid.
#[derive(Debug, Clone)]
pub struct TwoParticleWave {
    grid1: MomentumGrid,
    grid2: MomentumGrid,
    amplitudes: Array2<Complex64>,
    statistics: Statistics,
}

impl TwoParticleWave {
    pub fn new(
        grid1: MomentumGrid,
        grid2: MomentumGrid,
        amplitudes: Array2<Complex64>,
        statistics: Statistics,
    ) -> Result<Self> {
        if amplitudes.dim() != (grid1.len(), grid2.len()) {
            return Err(Error::InvalidRange(format!(
                "amplitude matrix {:?} does not match grids {}x{}",
                amplitudes.dim(),
                grid1.len(),
                grid2.len()
            )));
        }
        if statistics != Statistics::Distinguishable && grid1 != grid2 {
            return Err(Error::GridMismatch);
        }
        Ok(Self {
            grid1,
            grid2,
            amplitudes,
            statistics,
        })
    }

    pub fn grid1(&self) -> &MomentumGrid {
        &self.grid1
    }

    pub fn grid2(&self) -> &MomentumGrid {
        &self.grid2
    }

    pub fn amplitudes(&self) -> &Array2<Complex64> {
        &self.amplitudes
    }

    pub fn amplitudes_mut(&mut self) -> &mut Array2<Complex64> {
        &mut self.amplitudes
    }

    pub fn statistics(&self) -> Statistics {
        self.statistics
    }

    pub fn norm_sqr(&self) -> f64 {
        let mut acc = 0.0;
        for ((i, j), a) in self.amplitudes.indexed_iter() {
            acc += self.grid1.weight(i) * self.grid2.weight(j) * a.norm_sqr();
        }
        acc
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        Self {
            amplitudes: self.amplitudes.mapv(|a| a * factor),
            ..self.clone()
        }
    }
}

/// Largest violation of ψ(p₁,p₂) = ±ψ(p₂,p₁). For distinguishable particles
/// the distance to the closer of the two symmetry classes is reported.
pub fn exchange_symmetry_defect(psi: &TwoParticleWave) -> Result<f64> {
    if psi.grid1 != psi.grid2 {
        return Err(Error::GridMismatch);
    }
    let defect = |sign: f64| {
        let a = &psi.amplitudes;
        let mut worst: f64 = 0.0;
        for ((i, j), v) in a.indexed_iter() {
            worst = worst.max((v - sign * a[[j, i]]).norm());
        }
        worst
    };
    Ok(match psi.statistics.exchange_sign() {
        Some(sign) => defect(sign),
        None => defect(1.0).min(defect(-1.0)),
    })
}

/// Largest parity violation of φ relative to its maximum modulus, on a
/// symmetric grid.
fn parity_defect(phi: &WaveFunction1P, sign: f64) -> f64 {
    let g = phi.grid();
    let a = phi.amplitudes();
    let scale = a.iter().map(|v| v.norm()).fold(0.0, f64::max).max(1e-300);
    (0..g.len())
        .map(|k| (a[k] - sign * a[g.mirror(k)]).norm())
        .fold(0.0, f64::max)
        / scale
}

/// Builds ψ(p₁,p₂) = χ(p₁+p₂) φ((p₁−p₂)/2) on `out_grid` × `out_grid`.
///
/// When χ lives on `out_grid.sum_lattice()` and φ on
/// `out_grid.difference_lattice()` every combination point is a source grid
/// point and the assembly is exact. Otherwise both factors are interpolated
/// with cubic convolution.
pub fn assemble_cm_rel(
    chi_cm: &WaveFunction1P,
    phi_rel: &WaveFunction1P,
    out_grid: MomentumGrid,
    statistics: Statistics,
) -> Result<TwoParticleWave> {
    if let Some(sign) = statistics.exchange_sign() {
        if !phi_rel.grid().is_symmetric() {
            return Err(Error::InvalidRange(
                "relative wavefunction grid must be symmetric about 0".into(),
            ));
        }
        let defect = parity_defect(phi_rel, sign);
        if defect > PARITY_TOLERANCE {
            return Err(Error::ParityMismatch {
                statistics: statistics.name(),
                defect,
            });
        }
    }
    let n = out_grid.len();
    let exact = *chi_cm.grid() == out_grid.sum_lattice() && *phi_rel.grid() == out_grid.difference_lattice();
    let amplitudes = if exact {
        let chi = chi_cm.amplitudes();
        let phi = phi_rel.amplitudes();
        Array2::from_shape_fn((n, n), |(i, j)| chi[i + j] * phi[i + n - 1 - j])
    } else {
        let (lo, hi) = (out_grid.p_min(), out_grid.p_max());
        let (half_lo, half_hi) = (0.5 * (lo - hi), 0.5 * (hi - lo));
        if !chi_cm.grid().contains(2.0 * lo) || !chi_cm.grid().contains(2.0 * hi) {
            return Err(Error::CoverageError(format!(
                "centre-of-mass grid [{}, {}] misses P in [{}, {}]",
                chi_cm.grid().p_min(),
                chi_cm.grid().p_max(),
                2.0 * lo,
                2.0 * hi
            )));
        }
        if !phi_rel.grid().contains(half_lo) || !phi_rel.grid().contains(half_hi) {
            return Err(Error::CoverageError(format!(
                "relative grid [{}, {}] misses p in [{half_lo}, {half_hi}]",
                phi_rel.grid().p_min(),
                phi_rel.grid().p_max(),
            )));
        }
        let mut values = Array2::zeros((n, n));
        for ((i, j), v) in values.indexed_iter_mut() {
            let (p1, p2) = (out_grid.point(i), out_grid.point(j));
            let chi = chi_cm.interpolate(p1 + p2).unwrap_or_default();
            let phi = phi_rel.interpolate(0.5 * (p1 - p2)).unwrap_or_default();
            *v = chi * phi;
        }
        values
    };
    TwoParticleWave::new(out_grid, out_grid, amplitudes, statistics)
}

struct SideSums {
    plus: f64,
    minus: f64,
    flux: f64,
}

/// ⟨Ô⊗1⟩ for the crossing and flux operators: contract over p₁, then
/// integrate the squared slices over p₂.
fn first_particle_side(psi: &TwoParticleWave, kernel: &CrossingKernel) -> SideSums {
    let n2 = psi.grid2.len();
    let zero = Complex64::new(0.0, 0.0);
    let mut b_plus = vec![zero; n2];
    let mut b_minus = vec![zero; n2];
    let mut f = vec![zero; n2];
    let mut g = vec![zero; n2];
    let (kp, km) = (kernel.plus_weights(), kernel.minus_weights());
    let (kf, kg) = (kernel.fourier_weights(), kernel.fourier_p_weights());
    for (i, row) in psi.amplitudes.outer_iter().enumerate() {
        let row = row.as_slice().expect("standard layout");
        let (wp, wm, wf, wg) = (kp[i], km[i], kf[i], kg[i]);
        if wp != zero {
            for (acc, v) in b_plus.iter_mut().zip(row) {
                *acc += wp * v;
            }
        }
        if wm != zero {
            for (acc, v) in b_minus.iter_mut().zip(row) {
                *acc += wm * v;
            }
        }
        for ((af, ag), v) in f.iter_mut().zip(g.iter_mut()).zip(row) {
            *af += wf * v;
            *ag += wg * v;
        }
    }
    let mut sums = SideSums {
        plus: 0.0,
        minus: 0.0,
        flux: 0.0,
    };
    for j in 0..n2 {
        let w = psi.grid2.weight(j);
        sums.plus += w * b_plus[j].norm_sqr();
        sums.minus += w * b_minus[j].norm_sqr();
        sums.flux += w * (f[j].conj() * g[j]).re;
    }
    sums.flux /= kernel.mass();
    sums
}

/// ⟨1⊗Ô⟩: contract over p₂ for every p₁ row.
fn second_particle_side(psi: &TwoParticleWave, kernel: &CrossingKernel) -> SideSums {
    let (kp, km) = (kernel.plus_weights(), kernel.minus_weights());
    let (kf, kg) = (kernel.fourier_weights(), kernel.fourier_p_weights());
    let mut sums = SideSums {
        plus: 0.0,
        minus: 0.0,
        flux: 0.0,
    };
    for (i, row) in psi.amplitudes.outer_iter().enumerate() {
        let row = row.as_slice().expect("standard layout");
        let w = psi.grid1.weight(i);
        let bp: Complex64 = kp.iter().zip(row).map(|(k, v)| k * v).sum();
        let bm: Complex64 = km.iter().zip(row).map(|(k, v)| k * v).sum();
        let f: Complex64 = kf.iter().zip(row).map(|(k, v)| k * v).sum();
        let g: Complex64 = kg.iter().zip(row).map(|(k, v)| k * v).sum();
        sums.plus += w * bp.norm_sqr();
        sums.minus += w * bm.norm_sqr();
        sums.flux += w * (f.conj() * g).re;
    }
    sums.flux /= kernel.mass();
    sums
}

/// Kernels for both particle axes of a tensor grid at a fixed detection point.
#[derive(Debug, Clone)]
pub struct TensorKernels {
    first: CrossingKernel,
    second: CrossingKernel,
}

impl TensorKernels {
    pub fn new(grid1: MomentumGrid, grid2: MomentumGrid, x_arr: f64, mass: f64) -> Result<Self> {
        Ok(Self {
            first: CrossingKernel::new(grid1, x_arr, mass)?,
            second: CrossingKernel::new(grid2, x_arr, mass)?,
        })
    }

    pub fn density(&self, psi: &TwoParticleWave, t: f64) -> Result<ArrivalPoint> {
        if *self.first.grid() != psi.grid1 || *self.second.grid() != psi.grid2 {
            return Err(Error::GridMismatch);
        }
        let one = first_particle_side(psi, &self.first);
        let (plus, minus, flux) = match psi.statistics {
            // Exchange (anti)symmetry makes both sides equal.
            Statistics::Boson | Statistics::Fermion => (2.0 * one.plus, 2.0 * one.minus, 2.0 * one.flux),
            Statistics::Distinguishable => {
                let two = second_particle_side(psi, &self.second);
                (one.plus + two.plus, one.minus + two.minus, one.flux + two.flux)
            }
        };
        Ok(ArrivalPoint::from_parts(t, plus, minus, flux))
    }
}

/// First-quantized density of arrivals ⟨ψ|Π̂⊗1 + 1⊗Π̂|ψ⟩ of a tensor-grid
/// state that has already been evolved to the query time.
pub fn pair_density_tensor(psi: &TwoParticleWave, x_arr: f64, mass: f64) -> Result<ArrivalPoint> {
    TensorKernels::new(psi.grid1, psi.grid2, x_arr, mass)?.density(psi, 0.0)
}

/// One-particle reduced density matrix ρ(p, q) of particle 1 or 2.
pub fn reduced_density(psi: &TwoParticleWave, particle: usize) -> Array2<Complex64> {
    let a = &psi.amplitudes;
    match particle {
        1 => {
            let n = psi.grid1.len();
            Array2::from_shape_fn((n, n), |(p, q)| {
                (0..psi.grid2.len())
                    .map(|k| psi.grid2.weight(k) * a[[p, k]] * a[[q, k]].conj())
                    .sum()
            })
        }
        2 => {
            let n = psi.grid2.len();
            Array2::from_shape_fn((n, n), |(p, q)| {
                (0..psi.grid1.len())
                    .map(|k| psi.grid1.weight(k) * a[[k, p]] * a[[k, q]].conj())
                    .sum()
            })
        }
        _ => panic!("particle index must be 1 or 2"),
    }
}

/// Tr[Π̂ ρ] for a reduced density matrix on `kernel`'s grid.
pub fn trace_with_density(rho: &Array2<Complex64>, kernel: &CrossingKernel) -> f64 {
    let mut total = 0.0;
    for weights in [kernel.plus_weights(), kernel.minus_weights()] {
        let mut acc = Complex64::new(0.0, 0.0);
        for ((p, q), r) in rho.indexed_iter() {
            acc += weights[p] * r * weights[q].conj();
        }
        total += acc.re;
    }
    total
}

/// Centre-of-mass Gaussian times an oscillator relative state, ready to be
/// evaluated at any time on a fixed single-particle momentum grid.
#[derive(Debug, Clone)]
pub struct CmRelSetup {
    grid: MomentumGrid,
    chi0: WaveFunction1P,
    rel0: RelativeState,
    table: RenderTable,
    particle_mass: f64,
    statistics: Statistics,
}

impl CmRelSetup {
    /// `cm.mass` is the total mass 2m; the relative basis must carry μ = m/2.
    pub fn new(
        cm: &GaussianSpec,
        rel0: RelativeState,
        particle_mass: f64,
        statistics: Statistics,
        grid: MomentumGrid,
    ) -> Result<Self> {
        if !(particle_mass > 0.0) {
            return Err(Error::NonpositiveMass(particle_mass));
        }
        cm.validate()?;
        let rel_tol = 1e-12 * particle_mass;
        if (cm.mass - 2.0 * particle_mass).abs() > rel_tol {
            return Err(Error::InvalidParameter(format!(
                "centre-of-mass mass {} is not twice the particle mass {particle_mass}",
                cm.mass
            )));
        }
        if (rel0.basis().mu() - 0.5 * particle_mass).abs() > rel_tol {
            return Err(Error::InvalidParameter(format!(
                "relative basis reduced mass {} is not half the particle mass {particle_mass}",
                rel0.basis().mu()
            )));
        }
        if let Some(sign) = statistics.exchange_sign() {
            let wanted = if sign > 0.0 { 1 } else { -1 };
            if rel0.parity() != Some(wanted) {
                return Err(Error::ParityMismatch {
                    statistics: statistics.name(),
                    defect: f64::NAN,
                });
            }
        }
        let chi0 = gaussian_packet(cm, grid.sum_lattice())?;
        let table = rel0.basis().table_on(grid.difference_lattice());
        let norm_cm = chi0.norm_sqr();
        let norm_rel = table.render(rel0.coefficients()).norm_sqr() / rel0.norm_sqr();
        for (what, norm) in [("centre-of-mass", norm_cm), ("relative", norm_rel)] {
            if (norm - 1.0).abs() > 1e-6 {
                return Err(Error::CoverageError(format!(
                    "{what} state has norm² {norm} on the combination lattice"
                )));
            }
        }
        Ok(Self {
            grid,
            chi0,
            rel0,
            table,
            particle_mass,
            statistics,
        })
    }

    /// Single-particle grid covering P/2 ± p for the given centre-of-mass
    /// packet and relative state.
    pub fn auto_grid(cm: &GaussianSpec, rel0: &RelativeState, n_points: usize) -> Result<MomentumGrid> {
        let sigma = cm.sigma_p();
        let p_lo = cm.p0 - crate::grid::DEFAULT_SPAN_SIGMAS * sigma;
        let p_hi = cm.p0 + crate::grid::DEFAULT_SPAN_SIGMAS * sigma;
        let top = rel0
            .coefficients()
            .iter()
            .rposition(|c| c.norm_sqr() > 1e-16)
            .unwrap_or(0);
        let reach = rel0.basis().momentum_scale() * (((2 * top + 1) as f64).sqrt() + 6.0);
        MomentumGrid::zero_aligned(0.5 * p_lo - reach, 0.5 * p_hi + reach, n_points)
    }

    pub fn grid(&self) -> &MomentumGrid {
        &self.grid
    }

    pub fn statistics(&self) -> Statistics {
        self.statistics
    }

    pub fn particle_mass(&self) -> f64 {
        self.particle_mass
    }

    pub fn relative_state(&self) -> &RelativeState {
        &self.rel0
    }

    pub fn basis(&self) -> &Arc<HOBasis> {
        self.rel0.basis()
    }

    /// Relative wavefunction at time `t` on the difference lattice.
    pub fn relative_at(&self, t: f64) -> WaveFunction1P {
        self.table.render(evolve_ho(&self.rel0, t).coefficients())
    }

    /// Centre-of-mass wavefunction at time `t` on the sum lattice.
    pub fn cm_at(&self, t: f64) -> WaveFunction1P {
        evolve_free(&self.chi0, 2.0 * self.particle_mass, t)
    }

    pub fn state_at(&self, t: f64) -> Result<TwoParticleWave> {
        assemble_cm_rel(&self.cm_at(t), &self.relative_at(t), self.grid, self.statistics)
    }
}

/// A two-particle scenario that can be evaluated at any time.
#[derive(Debug, Clone)]
pub enum PairScenario {
    Orbitals { pair: OrbitalPair, evo: EvolutionSpec },
    CmRel(CmRelSetup),
}

impl PairScenario {
    pub fn statistics(&self) -> Statistics {
        match self {
            Self::Orbitals { pair, .. } => pair.statistics(),
            Self::CmRel(setup) => setup.statistics(),
        }
    }
}

pub fn pair_series(scenario: &PairScenario, times: &TimeGrid, x_arr: f64, mass: f64) -> Result<ArrivalSeries> {
    let (points, label) = match scenario {
        PairScenario::Orbitals { pair, evo } => {
            let probe = evo.apply(pair.chi_a(), times.t_min)?;
            let kernel = CrossingKernel::new(*probe.grid(), x_arr, mass)?;
            let points = map_times(times, |t| orbital_point(&kernel, pair, evo, t))?;
            (points, "pair-orbitals")
        }
        PairScenario::CmRel(setup) => {
            let kernels = TensorKernels::new(setup.grid, setup.grid, x_arr, mass)?;
            let points = map_times(times, |t| kernels.density(&setup.state_at(t)?, t))?;
            (points, "pair-cm-rel")
        }
    };
    Ok(ArrivalSeries::new(
        *times,
        points,
        SeriesMeta {
            scenario: label.into(),
            x_arr,
            mass,
            statistics: Some(scenario.statistics()),
        },
    ))
}
