use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::params::RabiParams;

/// Dense `ω₀ a†a + (Ω/2) σz + λ (a + a†) σx` in the spin-major basis.
pub fn build_hamiltonian(params: &RabiParams, cutoff: usize) -> Result<DMatrix<f64>> {
    if cutoff < 1 {
        return Err(Error::Domain("cutoff must be at least 1".into()));
    }
    let m = cutoff + 1;
    let mut h = DMatrix::zeros(2 * m, 2 * m);
    let half = 0.5 * params.omega();
    for n in 0..m {
        let boson = params.omega0() * n as f64;
        h[(n, n)] = boson - half;
        h[(m + n, m + n)] = boson + half;
    }
    let lam = params.lambda();
    for n in 0..cutoff {
        let c = lam * ((n + 1) as f64).sqrt();
        // |↓,n⟩ ↔ |↑,n+1⟩ and |↑,n⟩ ↔ |↓,n+1⟩
        h[(n, m + n + 1)] = c;
        h[(m + n + 1, n)] = c;
        h[(m + n, n + 1)] = c;
        h[(n + 1, m + n)] = c;
    }
    Ok(h)
}

/// `out = H ψ` without forming the matrix.
pub fn apply_hamiltonian(params: &RabiParams, cutoff: usize, psi: &[Complex64], out: &mut [Complex64]) {
    let m = cutoff + 1;
    debug_assert_eq!(psi.len(), 2 * m);
    debug_assert_eq!(out.len(), 2 * m);
    let (w0, half, lam) = (params.omega0(), 0.5 * params.omega(), params.lambda());
    let (down, up) = psi.split_at(m);
    let (out_down, out_up) = out.split_at_mut(m);
    for n in 0..m {
        let boson = w0 * n as f64;
        let mut d = down[n] * (boson - half);
        let mut u = up[n] * (boson + half);
        // (a + a†) on the opposite spin block
        if n > 0 {
            let s = lam * (n as f64).sqrt();
            d += up[n - 1] * s;
            u += down[n - 1] * s;
        }
        if n + 1 < m {
            let s = lam * ((n + 1) as f64).sqrt();
            d += up[n + 1] * s;
            u += down[n + 1] * s;
        }
        out_down[n] = d;
        out_up[n] = u;
    }
}

/// Tridiagonal block of H in the parity sector `parity = ±1`.
///
/// Returns the diagonal, the off-diagonal and, for each photon number n, the index of
/// the basis state `|s(n), n⟩` where the spin satisfies `σz (−1)^n = parity`.
pub(crate) fn parity_sector(params: &RabiParams, cutoff: usize, parity: f64) -> (Vec<f64>, Vec<f64>, Vec<usize>) {
    let m = cutoff + 1;
    let half = 0.5 * params.omega();
    let mut diag = Vec::with_capacity(m);
    let mut index = Vec::with_capacity(m);
    for n in 0..m {
        let sz = if n % 2 == 0 { parity } else { -parity };
        diag.push(params.omega0() * n as f64 + half * sz);
        index.push(if sz > 0.0 { m + n } else { n });
    }
    let off = (0..cutoff).map(|n| params.lambda() * ((n + 1) as f64).sqrt()).collect();
    (diag, off, index)
}

/// Diagonal of the parity operator `σz ⊗ (−1)^{a†a}`.
pub fn parity_diagonal(cutoff: usize) -> Vec<f64> {
    let m = cutoff + 1;
    (0..2 * m)
        .map(|i| {
            let (spin, n) = (i / m, i % m);
            let sz = if spin == 0 { -1.0 } else { 1.0 };
            if n % 2 == 0 {
                sz
            } else {
                -sz
            }
        })
        .collect()
}
