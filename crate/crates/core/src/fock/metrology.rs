use num_complex::Complex64;

use super::ground::{ground_state, ground_state_like};
use super::{overlap_deficit, FockVector, Spin};
use crate::effective::{self, Branch};
use crate::error::{Error, Result};
use crate::params::{Estimand, RabiParams};

/// QFI from the fidelity between ground states at `A ∓ δ/2`, `δ = delta·A`.
///
/// Returns `8 (1 − √F) / δ²`. The upper state is taken in the parity sector of the
/// lower one, so near-degenerate superradiant doublets do not swap.
pub fn qfi_fidelity_step(params: &RabiParams, which: Estimand, cutoff: usize, delta: f64) -> Result<f64> {
    if !(delta > 0.0) {
        return Err(Error::Domain(format!("relative step must be positive, got {delta}")));
    }
    let a = params.frequency(which);
    let h = delta * a;
    let lo = ground_state(&params.with_frequency(which, a - 0.5 * h)?, cutoff)?.state;
    let hi = ground_state_like(&params.with_frequency(which, a + 0.5 * h)?, cutoff, &lo)?.state;
    let deficit = overlap_deficit(&lo, &hi)?;
    let fid = (1.0 - deficit).powi(2);
    if fid < 0.5 {
        return Err(Error::StepTooLarge { fidelity: fid });
    }
    Ok(8.0 * deficit / (h * h))
}

/// Fidelity-susceptibility QFI with a step-halving consistency check.
///
/// Evaluates at `delta` and `delta/2`; if they disagree by more than 1 % the
/// step is halved again (at most six times). Returns the finer estimate.
pub fn qfi_numeric(params: &RabiParams, which: Estimand, cutoff: usize, delta: f64) -> Result<f64> {
    let mut step = delta;
    let mut coarse = qfi_fidelity_step(params, which, cutoff, step)?;
    for _ in 0..6 {
        let fine = qfi_fidelity_step(params, which, cutoff, 0.5 * step)?;
        let scale = coarse.abs().max(fine.abs());
        if (coarse - fine).abs() <= 0.01 * scale || scale < 1e-300 {
            return Ok(fine);
        }
        step *= 0.5;
        coarse = fine;
    }
    Err(Error::Numeric(format!(
        "QFI finite difference did not settle (last step {step:e}, value {coarse:e})"
    )))
}

/// Uniform quadrature grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

impl GridSpec {
    pub fn new(min: f64, max: f64, points: usize) -> Result<Self> {
        if !(max > min) || points < 3 {
            return Err(Error::Domain(format!("invalid grid [{min}, {max}] with {points} points")));
        }
        Ok(Self { min, max, points })
    }

    pub fn step(&self) -> f64 {
        (self.max - self.min) / (self.points - 1) as f64
    }

    pub fn values(&self) -> Vec<f64> {
        let h = self.step();
        (0..self.points).map(|k| self.min + h * k as f64).collect()
    }
}

/// `x ∈ [−12σ, 12σ]` with 4001 points, σ the widest predicted quadrature spread.
pub fn default_grid(params: &RabiParams) -> GridSpec {
    let sigma = effective::predicted_x_variance(params).sqrt();
    let mut half = 12.0 * sigma;
    if params.g() > 1.0 {
        if let Ok(s) = effective::superradiant_solution(params, Branch::Plus) {
            half += std::f64::consts::SQRT_2 * s.alpha_s;
        }
    }
    GridSpec { min: -half, max: half, points: 4001 }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureDistribution {
    pub grid: Vec<f64>,
    pub densities: Vec<f64>,
    pub angle: f64,
}

impl QuadratureDistribution {
    pub fn integral(&self) -> f64 {
        trapezoid(&self.grid, &self.densities)
    }

    pub fn moment(&self, k: i32) -> f64 {
        let f: Vec<f64> = self.grid.iter().zip(&self.densities).map(|(x, p)| x.powi(k) * p).collect();
        trapezoid(&self.grid, &f)
    }
}

fn trapezoid(x: &[f64], f: &[f64]) -> f64 {
    x.windows(2).zip(f.windows(2)).map(|(xs, fs)| 0.5 * (xs[1] - xs[0]) * (fs[0] + fs[1])).sum()
}

/// Fills `out[n] = ψ_n(x)`, the normalized oscillator eigenfunctions.
fn hermite_functions(x: f64, out: &mut [f64]) {
    if out.is_empty() {
        return;
    }
    out[0] = std::f64::consts::PI.powf(-0.25) * (-0.5 * x * x).exp();
    if out.len() > 1 {
        out[1] = std::f64::consts::SQRT_2 * x * out[0];
    }
    for n in 1..out.len() - 1 {
        let nf = n as f64;
        out[n + 1] = (2.0 / (nf + 1.0)).sqrt() * x * out[n] - (nf / (nf + 1.0)).sqrt() * out[n - 1];
    }
}

/// Density of `x_φ = (a e^{−iφ} + a† e^{iφ})/√2`, traced over the spin.
pub fn homodyne_distribution(state: &FockVector, angle: f64, grid: GridSpec) -> Result<QuadratureDistribution> {
    let m = state.cutoff() + 1;
    let rot: Vec<Complex64> = (0..m).map(|n| Complex64::from_polar(1.0, -(n as f64) * angle)).collect();
    let blocks: Vec<Vec<Complex64>> = [Spin::Down, Spin::Up]
        .iter()
        .map(|&s| state.block(s).iter().zip(&rot).map(|(c, r)| c * r).collect())
        .collect();
    let xs = grid.values();
    let mut herm = vec![0.0; m];
    let densities = xs
        .iter()
        .map(|&x| {
            hermite_functions(x, &mut herm);
            blocks
                .iter()
                .map(|b| b.iter().zip(&herm).map(|(c, h)| c * *h).sum::<Complex64>().norm_sqr())
                .sum()
        })
        .collect();
    let dist = QuadratureDistribution { grid: xs, densities, angle };
    let total = dist.integral();
    let norm2 = state.norm().powi(2);
    if (total - norm2).abs() > 1e-3 {
        return Err(Error::Numeric(format!(
            "quadrature grid too coarse or narrow: density integrates to {total}"
        )));
    }
    Ok(dist)
}

/// Homodyne Fisher information `∫ (∂_A p)² / p dx` from a central difference
/// over ground states at `A ∓ δ/2`.
///
/// Points with `p < 1e−12 · max p` are dropped from the integrand.
pub fn classical_fi(
    params: &RabiParams,
    which: Estimand,
    angle: f64,
    cutoff: usize,
    delta: f64,
    grid: GridSpec,
) -> Result<f64> {
    if !(delta > 0.0) {
        return Err(Error::Domain(format!("relative step must be positive, got {delta}")));
    }
    let a = params.frequency(which);
    let h = delta * a;
    let reference = ground_state(params, cutoff)?.state;
    let dist = |p: &RabiParams| -> Result<Vec<f64>> {
        let gs = ground_state_like(p, cutoff, &reference)?;
        Ok(homodyne_distribution(&gs.state, angle, grid)?.densities)
    };
    let centre = homodyne_distribution(&reference, angle, grid)?.densities;
    let lo = dist(&params.with_frequency(which, a - 0.5 * h)?)?;
    let hi = dist(&params.with_frequency(which, a + 0.5 * h)?)?;
    let floor = 1e-12 * centre.iter().copied().fold(0.0, f64::max);
    let integrand: Vec<f64> = centre
        .iter()
        .zip(lo.iter().zip(&hi))
        .map(|(&p, (&l, &u))| {
            if p < floor {
                0.0
            } else {
                let d = (u - l) / h;
                d * d / p
            }
        })
        .collect();
    Ok(trapezoid(&grid.values(), &integrand))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hermite_functions_are_orthonormal() {
        let grid = GridSpec::new(-15.0, 15.0, 6001).unwrap();
        let xs = grid.values();
        let mut rows = vec![vec![0.0; 8]; xs.len()];
        for (x, r) in xs.iter().zip(rows.iter_mut()) {
            hermite_functions(*x, r);
        }
        for a in 0..8 {
            for b in 0..8 {
                let f: Vec<f64> = rows.iter().map(|r| r[a] * r[b]).collect();
                let v = trapezoid(&xs, &f);
                assert!((v - if a == b { 1.0 } else { 0.0 }).abs() < 1e-10, "{a} {b} {v}");
            }
        }
    }

    #[test]
    fn decoupled_qfi_is_zero() {
        let p = RabiParams::new(1.0, 100.0, 0.0).unwrap();
        for which in Estimand::ALL {
            assert!(qfi_numeric(&p, which, 10, 1e-4).unwrap() < 1e-20);
        }
    }

    #[test]
    fn huge_step_is_rejected() {
        let p = RabiParams::new(1.0, 100.0, 0.999).unwrap();
        let r = qfi_fidelity_step(&p, Estimand::Omega0, 150, 0.5);
        assert!(matches!(r, Err(Error::StepTooLarge { .. })), "{r:?}");
    }

    #[test]
    fn narrow_grid_is_rejected() {
        let v = FockVector::basis(4, Spin::Down, 0).unwrap();
        let g = GridSpec::new(-0.5, 0.5, 101).unwrap();
        assert!(matches!(homodyne_distribution(&v, 0.0, g), Err(Error::Numeric(_))));
    }

    #[test]
    fn vacuum_is_standard_normal_at_any_angle() {
        let v = FockVector::basis(4, Spin::Down, 0).unwrap();
        let g = GridSpec::new(-10.0, 10.0, 2001).unwrap();
        for angle in [0.0, 0.4, std::f64::consts::FRAC_PI_4, 2.0] {
            let d = homodyne_distribution(&v, angle, g).unwrap();
            assert!((d.integral() - 1.0).abs() < 1e-9);
            assert!((d.moment(2) - 0.5).abs() < 1e-9);
            for (x, p) in d.grid.iter().zip(&d.densities) {
                let exact = (-x * x).exp() / std::f64::consts::PI.sqrt();
                assert!((p - exact).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn decoupled_fi_is_zero() {
        let p = RabiParams::new(1.0, 100.0, 0.0).unwrap();
        let g = default_grid(&p);
        let f = classical_fi(&p, Estimand::Omega, 0.3, 10, 1e-4, g).unwrap();
        assert_eq!(f, 0.0);
    }
}
