use num_complex::Complex64;

use super::hamiltonian::parity_sector;
use super::tridiagonal::lowest_eigenpairs;
use super::FockVector;
use crate::effective::{self, Branch};
use crate::error::{Error, Result};
use crate::params::RabiParams;

const MAX_AUTO_CUTOFF: usize = 4096;

/// Normalized, phase-fixed eigenvector together with its energy.
#[derive(Debug, Clone)]
pub struct Eigenstate {
    pub state: FockVector,
    pub energy: f64,
}

/// The `count` lowest eigenstates in ascending energy.
///
/// H conserves the parity `σz ⊗ (−1)^{a†a}`; in each sector the spin is fixed by the
/// photon number and H is tridiagonal in n, so both sectors are solved separately.
pub fn lowest_states(params: &RabiParams, cutoff: usize, count: usize) -> Result<Vec<Eigenstate>> {
    let mut found = sector_states(params, cutoff, -1.0, count)?;
    found.extend(sector_states(params, cutoff, 1.0, count)?);
    found.sort_by(|a, b| a.energy.total_cmp(&b.energy));
    found.truncate(count);
    Ok(found)
}

/// The `count` lowest eigenstates with parity `parity` (±1), ascending.
pub fn sector_states(params: &RabiParams, cutoff: usize, parity: f64, count: usize) -> Result<Vec<Eigenstate>> {
    if cutoff < 1 {
        return Err(Error::Domain("cutoff must be at least 1".into()));
    }
    let m = cutoff + 1;
    let (diag, off, index) = parity_sector(params, cutoff, parity.signum());
    lowest_eigenpairs(&diag, &off, count)
        .into_iter()
        .map(|(energy, v)| {
            if !(energy.is_finite() && v.iter().all(|x| x.is_finite())) {
                return Err(Error::Numeric(format!(
                    "tridiagonal eigensolver failed (cutoff {cutoff}, g = {}, eta = {})",
                    params.g(),
                    params.eta()
                )));
            }
            let mut amps = vec![Complex64::new(0.0, 0.0); 2 * m];
            for (n, x) in v.iter().enumerate() {
                amps[index[n]] = Complex64::new(*x, 0.0);
            }
            let mut state = FockVector::from_amplitudes(cutoff, amps)?;
            state.normalize()?;
            state.fix_phase();
            Ok(Eigenstate { state, energy })
        })
        .collect()
}

/// Lowest state within the parity sector of `reference`.
pub fn ground_state_like(params: &RabiParams, cutoff: usize, reference: &FockVector) -> Result<Eigenstate> {
    sector_states(params, cutoff, reference.parity().signum(), 1)?
        .pop()
        .ok_or_else(|| Error::Numeric("empty spectrum".into()))
}

pub fn ground_state(params: &RabiParams, cutoff: usize) -> Result<Eigenstate> {
    lowest_states(params, cutoff, 1)?
        .pop()
        .ok_or_else(|| Error::Numeric("empty spectrum".into()))
}

/// Symmetry-broken superradiant state `(ψ₀ ± ψ₁)/√2` with `sign⟨x⟩` set by `branch`.
pub fn symmetry_broken_state(params: &RabiParams, cutoff: usize, branch: Branch) -> Result<FockVector> {
    let g = params.g();
    if g <= 1.0 {
        return Err(Error::Phase { g, expected: "superradiant" });
    }
    let pair = lowest_states(params, cutoff, 2)?;
    let combine = |sign: f64| -> Result<FockVector> {
        let amps = pair[0]
            .state
            .amplitudes()
            .iter()
            .zip(pair[1].state.amplitudes())
            .map(|(a, b)| a + b * sign)
            .collect();
        let mut v = FockVector::from_amplitudes(cutoff, amps)?;
        v.normalize()?;
        v.fix_phase();
        Ok(v)
    };
    let plus = combine(1.0)?;
    let (mean, _) = plus.boson_moments();
    if mean.x * branch.sign() >= 0.0 {
        Ok(plus)
    } else {
        combine(-1.0)
    }
}

/// How the boson cutoff is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CutoffPolicy {
    Fixed(usize),
    /// Start from the effective-model photon number and double until both the
    /// photon number is stable under a 25 % cutoff increase and the tail mass is small.
    Auto { photon_rtol: f64, tail_tol: f64 },
}

impl Default for CutoffPolicy {
    fn default() -> Self {
        CutoffPolicy::Auto { photon_rtol: 1e-3, tail_tol: 1e-12 }
    }
}

impl CutoffPolicy {
    pub fn resolve(&self, params: &RabiParams) -> Result<usize> {
        match *self {
            CutoffPolicy::Fixed(n) if n >= 1 => Ok(n),
            CutoffPolicy::Fixed(_) => Err(Error::Domain("cutoff must be at least 1".into())),
            CutoffPolicy::Auto { photon_rtol, tail_tol } => auto_cutoff(params, photon_rtol, tail_tol),
        }
    }
}

/// Starting cutoff `⌈20 + 10⟨N⟩⟉`, inflated by `⌈8 α_s²⟩` above the transition.
fn initial_cutoff(params: &RabiParams) -> usize {
    let mut nbar = effective::predicted_photons(params);
    if !nbar.is_finite() {
        nbar = 50.0;
    }
    let mut start = (20.0 + 10.0 * nbar).ceil() as usize;
    if params.g() > 1.0 {
        if let Ok(s) = effective::superradiant_solution(params, Branch::Plus) {
            start += (8.0 * s.alpha_s * s.alpha_s).ceil() as usize;
        }
    }
    start.min(MAX_AUTO_CUTOFF)
}

pub fn auto_cutoff(params: &RabiParams, photon_rtol: f64, tail_tol: f64) -> Result<usize> {
    let mut cutoff = initial_cutoff(params);
    loop {
        let here = ground_state(params, cutoff)?.state;
        let larger = ground_state(params, (cutoff as f64 * 1.25).ceil() as usize)?.state;
        let (a, b) = (here.mean_photon(), larger.mean_photon());
        let stable = (a - b).abs() <= photon_rtol * b.max(1e-9);
        if stable && here.tail_mass() < tail_tol {
            return Ok(cutoff);
        }
        if cutoff >= MAX_AUTO_CUTOFF {
            return Err(Error::Cutoff(format!(
                "no converged cutoff up to {MAX_AUTO_CUTOFF} (g = {}, eta = {})",
                params.g(),
                params.eta()
            )));
        }
        cutoff = (2 * cutoff).min(MAX_AUTO_CUTOFF);
    }
}
