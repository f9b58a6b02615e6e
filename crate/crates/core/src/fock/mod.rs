//! Exact quantum Rabi model on a truncated spin ⊗ boson space.
//!
//! Basis ordering is spin-major: index `s·(N+1) + n` with `s = 0` for |↓⟩ and
//! `s = 1` for |↑⟩, `n ∈ 0..=N`.

mod dynamics;
mod ground;
mod hamiltonian;
mod metrology;
mod tridiagonal;

pub use dynamics::{integrate_sweep, SweepOutcome, SweepSample};
pub use ground::{
    auto_cutoff, ground_state, ground_state_like, lowest_states, sector_states, symmetry_broken_state, CutoffPolicy,
    Eigenstate,
};
pub use hamiltonian::{apply_hamiltonian, build_hamiltonian, parity_diagonal};
pub use metrology::{
    classical_fi, default_grid, homodyne_distribution, qfi_numeric, GridSpec, QuadratureDistribution,
};

use nalgebra::{Matrix2, Vector2};
use num_complex::Complex64;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spin {
    Down,
    Up,
}

impl Spin {
    fn offset(self, cutoff: usize) -> usize {
        match self {
            Spin::Down => 0,
            Spin::Up => cutoff + 1,
        }
    }
}

/// State vector over the truncated basis.
#[derive(Debug, Clone, PartialEq)]
pub struct FockVector {
    cutoff: usize,
    amps: Vec<Complex64>,
}

impl FockVector {
    pub fn zeros(cutoff: usize) -> Result<Self> {
        if cutoff < 1 {
            return Err(Error::Domain("cutoff must be at least 1".into()));
        }
        Ok(Self { cutoff, amps: vec![Complex64::new(0.0, 0.0); 2 * (cutoff + 1)] })
    }

    pub fn basis(cutoff: usize, spin: Spin, n: usize) -> Result<Self> {
        if n > cutoff {
            return Err(Error::Domain(format!("occupation {n} above cutoff {cutoff}")));
        }
        let mut v = Self::zeros(cutoff)?;
        v.amps[spin.offset(cutoff) + n] = Complex64::new(1.0, 0.0);
        Ok(v)
    }

    pub fn from_amplitudes(cutoff: usize, amps: Vec<Complex64>) -> Result<Self> {
        if cutoff < 1 {
            return Err(Error::Domain("cutoff must be at least 1".into()));
        }
        if amps.len() != 2 * (cutoff + 1) {
            return Err(Error::Domain(format!(
                "expected {} amplitudes for cutoff {cutoff}, got {}",
                2 * (cutoff + 1),
                amps.len()
            )));
        }
        Ok(Self { cutoff, amps })
    }

    /// Boson-only state with spin |↓⟩.
    pub fn from_boson_amplitudes(cutoff: usize, boson: &[Complex64]) -> Result<Self> {
        if boson.len() != cutoff + 1 {
            return Err(Error::Domain("boson amplitude count must be cutoff + 1".into()));
        }
        let mut v = Self::zeros(cutoff)?;
        v.amps[..=cutoff].copy_from_slice(boson);
        Ok(v)
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn amplitude(&self, spin: Spin, n: usize) -> Complex64 {
        self.amps[spin.offset(self.cutoff) + n]
    }

    pub fn block(&self, spin: Spin) -> &[Complex64] {
        let o = spin.offset(self.cutoff);
        &self.amps[o..o + self.cutoff + 1]
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn normalize(&mut self) -> Result<()> {
        let n = self.norm();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::Numeric("cannot normalize a null vector".into()));
        }
        self.amps.iter_mut().for_each(|c| *c /= n);
        Ok(())
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.cutoff != other.cutoff {
            return Err(Error::Domain(format!(
                "cutoff mismatch: {} vs {}",
                self.cutoff, other.cutoff
            )));
        }
        Ok(())
    }

    /// ⟨self|other⟩.
    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        self.check_same(other)?;
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum())
    }

    /// Multiply by a global phase so the largest-magnitude amplitude is real positive.
    pub fn fix_phase(&mut self) {
        let Some(big) = self
            .amps
            .iter()
            .copied()
            .max_by(|a, b| a.norm_sqr().total_cmp(&b.norm_sqr()))
        else {
            return;
        };
        if big.norm() == 0.0 {
            return;
        }
        let phase = big.conj() / big.norm();
        self.amps.iter_mut().for_each(|c| *c *= phase);
    }

    /// Probability mass with boson occupation `n ≥ cutoff − 2`.
    pub fn tail_mass(&self) -> f64 {
        let from = self.cutoff.saturating_sub(2);
        [Spin::Down, Spin::Up]
            .iter()
            .map(|&s| self.block(s)[from..].iter().map(|c| c.norm_sqr()).sum::<f64>())
            .sum()
    }

    pub fn mean_photon(&self) -> f64 {
        [Spin::Down, Spin::Up]
            .iter()
            .flat_map(|&s| self.block(s).iter().enumerate())
            .map(|(n, c)| n as f64 * c.norm_sqr())
            .sum()
    }

    /// Spin population ⟨↑|ρ|↑⟩.
    pub fn up_population(&self) -> f64 {
        self.block(Spin::Up).iter().map(|c| c.norm_sqr()).sum()
    }

    /// ⟨σz ⊗ (−1)^{a†a}⟩.
    pub fn parity(&self) -> f64 {
        parity_diagonal(self.cutoff)
            .iter()
            .zip(&self.amps)
            .map(|(p, c)| p * c.norm_sqr())
            .sum()
    }

    /// ⟨a^k⟩ for k = 1, 2 summed over both spin blocks.
    fn lowering_moment(&self, k: usize) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for s in [Spin::Down, Spin::Up] {
            let b = self.block(s);
            for n in 0..b.len().saturating_sub(k) {
                let coef = ((n + 1)..=(n + k)).map(|m| m as f64).product::<f64>().sqrt();
                acc += b[n].conj() * b[n + k] * coef;
            }
        }
        acc
    }

    /// Quadrature means and symmetrized covariance of the reduced boson state.
    pub fn boson_moments(&self) -> (Vector2<f64>, Matrix2<f64>) {
        let a1 = self.lowering_moment(1);
        let a2 = self.lowering_moment(2);
        let nb = self.mean_photon();
        let sq2 = std::f64::consts::SQRT_2;
        let mean = Vector2::new(sq2 * a1.re, sq2 * a1.im);
        let xx = a2.re + nb + 0.5;
        let pp = -a2.re + nb + 0.5;
        let xp = a2.im;
        let cov = Matrix2::new(
            xx - mean.x * mean.x,
            xp - mean.x * mean.y,
            xp - mean.x * mean.y,
            pp - mean.y * mean.y,
        );
        (mean, cov)
    }
}

/// |⟨a|b⟩|².
pub fn fidelity(a: &FockVector, b: &FockVector) -> Result<f64> {
    Ok(a.inner(b)?.norm_sqr())
}

/// `1 − |⟨a|b⟩|` evaluated without cancellation for normalized inputs.
pub(crate) fn overlap_deficit(a: &FockVector, b: &FockVector) -> Result<f64> {
    let ov = a.inner(b)?;
    if ov.norm() == 0.0 {
        return Ok(1.0);
    }
    let phase = ov.conj() / ov.norm();
    let dist2: f64 = a
        .amps
        .iter()
        .zip(&b.amps)
        .map(|(x, y)| (x - y * phase).norm_sqr())
        .sum();
    Ok(0.5 * dist2)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn self_fidelity_is_one() {
        let mut v = FockVector::zeros(5).unwrap();
        for (k, c) in v.amplitudes_mut().iter_mut().enumerate() {
            *c = Complex64::new(k as f64, 1.0 - k as f64 * 0.3);
        }
        v.normalize().unwrap();
        assert!((fidelity(&v, &v).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn orthogonal_basis_states() {
        let a = FockVector::basis(4, Spin::Down, 1).unwrap();
        let b = FockVector::basis(4, Spin::Up, 1).unwrap();
        assert_eq!(fidelity(&a, &b).unwrap(), 0.0);
    }

    #[test]
    fn cutoff_mismatch_is_an_error() {
        let a = FockVector::basis(4, Spin::Down, 1).unwrap();
        let b = FockVector::basis(5, Spin::Down, 1).unwrap();
        assert!(matches!(fidelity(&a, &b), Err(Error::Domain(_))));
    }

    #[test]
    fn zero_cutoff_rejected() {
        assert!(FockVector::zeros(0).is_err());
    }

    #[test]
    fn phase_fix_makes_largest_real_positive() {
        let mut v = FockVector::zeros(2).unwrap();
        v.amplitudes_mut()[1] = Complex64::new(0.0, -0.8);
        v.amplitudes_mut()[4] = Complex64::new(0.6, 0.0);
        v.fix_phase();
        let c = v.amplitudes()[1];
        assert!((c.re - 0.8).abs() < 1e-15 && c.im.abs() < 1e-15);
    }

    #[test]
    fn vacuum_moments() {
        let v = FockVector::basis(6, Spin::Down, 0).unwrap();
        let (m, c) = v.boson_moments();
        assert_eq!(m, Vector2::zeros());
        assert!((c - Matrix2::identity() * 0.5).abs().max() < 1e-15);
        assert_eq!(v.parity(), -1.0);
    }

    #[test]
    fn deficit_matches_fidelity() {
        let a = FockVector::basis(3, Spin::Down, 0).unwrap();
        let mut b = a.clone();
        b.amplitudes_mut()[1] = Complex64::new(0.0, 0.1);
        b.normalize().unwrap();
        let d = overlap_deficit(&a, &b).unwrap();
        let f = fidelity(&a, &b).unwrap();
        assert!((d - (1.0 - f.sqrt())).abs() < 1e-15);
    }
}
