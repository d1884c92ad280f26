//! Exact time evolution: free motion is a phase in momentum space, the
//! internal oscillator is a phase per eigenlevel.

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::WaveFunction1P;
use crate::states::{project_onto_basis, HOBasis, RelativeState};

#[derive(Debug, Clone)]
pub enum EvolutionSpec {
    Free { mass: f64 },
    Harmonic { basis: Arc<HOBasis> },
}

impl EvolutionSpec {
    pub fn free(mass: f64) -> Result<Self> {
        if !(mass > 0.0) || !mass.is_finite() {
            return Err(Error::NonpositiveMass(mass));
        }
        Ok(Self::Free { mass })
    }

    /// Evolves a one-particle wavefunction to time `t`. For the harmonic kind
    /// the state is expanded in the basis (on the basis grid) first.
    pub fn apply(&self, f: &WaveFunction1P, t: f64) -> Result<WaveFunction1P> {
        match self {
            Self::Free { mass } => Ok(evolve_free(f, *mass, t)),
            Self::Harmonic { basis } => {
                let projection = project_onto_basis(f, Arc::clone(basis))?;
                Ok(evolve_ho(&projection.state, t).render())
            }
        }
    }
}

/// Multiplies φ(p) by exp(−i p² t / (2 m ħ)).
pub fn evolve_free(f: &WaveFunction1P, mass: f64, t: f64) -> WaveFunction1P {
    let mut out = f.clone();
    if t == 0.0 {
        return out;
    }
    let grid = *f.grid();
    let rate = -t / (2.0 * mass);
    for (k, a) in out.amplitudes_mut().iter_mut().enumerate() {
        let p = grid.point(k);
        *a *= Complex64::from_polar(1.0, rate * p * p);
    }
    out
}

/// c_n → c_n exp(−i ω (n + ½) t).
pub fn evolve_ho(state: &RelativeState, t: f64) -> RelativeState {
    let omega = state.basis().omega();
    let coefficients = state
        .coefficients()
        .iter()
        .enumerate()
        .map(|(n, c)| c * Complex64::from_polar(1.0, -omega * (n as f64 + 0.5) * t))
        .collect();
    state.with_coefficients(coefficients)
}

/// Centre-of-mass part evolved freely with the total mass, relative part in
/// the oscillator.
pub fn evolve_pair_factorized(
    chi_cm: &WaveFunction1P,
    phi_rel: &RelativeState,
    total_mass: f64,
    t: f64,
) -> (WaveFunction1P, RelativeState) {
    (evolve_free(chi_cm, total_mass, t), evolve_ho(phi_rel, t))
}
