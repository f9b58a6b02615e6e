use num_complex::Complex64;

use super::ground::ground_state;
use super::hamiltonian::apply_hamiltonian;
use super::{fidelity, FockVector};
use crate::error::{Error, Result};
use crate::params::RabiParams;
use crate::sweep::SweepSchedule;

const RECORDS: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepSample {
    pub t: f64,
    pub g: f64,
    pub norm: f64,
    /// `1 − |⟨ψ_gs(g(t))|ψ(t)⟩|²`.
    pub ground_infidelity: f64,
}

#[derive(Debug, Clone)]
pub struct SweepOutcome {
    pub state: FockVector,
    pub final_infidelity: f64,
    pub samples: Vec<SweepSample>,
    pub steps: usize,
    pub max_norm_drift: f64,
}

/// Integrates `i ∂ψ/∂t = H(g(t)) ψ` from the `g = 0` ground state with classical RK4.
///
/// The state is never renormalized; norm drift above 1e−6 is reported as an error.
pub fn integrate_sweep(
    params: &RabiParams,
    schedule: &SweepSchedule,
    cutoff: usize,
    dt: f64,
) -> Result<SweepOutcome> {
    let fastest = params.omega().max(params.omega0());
    if !(dt > 0.0) || dt > 0.02 / fastest * (1.0 + 1e-12) {
        return Err(Error::StepSize(format!(
            "dt = {dt} must lie in (0, 0.02/max(Omega, omega0)] = (0, {}]",
            0.02 / fastest
        )));
    }
    if (schedule.omega0() - params.omega0()).abs() > 1e-12 * params.omega0() {
        return Err(Error::Domain("schedule and parameters use different omega0".into()));
    }
    let start = ground_state(&params.with_g(0.0)?, cutoff)?.state;
    let total = schedule.total_time();
    let steps = if total > 0.0 { (total / dt).ceil() as usize } else { 0 };
    let h = if steps > 0 { total / steps as f64 } else { 0.0 };

    let at = |g: f64| params.with_g(g);
    let record = |t: f64, psi: &FockVector| -> Result<SweepSample> {
        let g = schedule.g_at(t);
        let gs = ground_state(&at(g)?, cutoff)?.state;
        let norm = psi.norm();
        Ok(SweepSample { t, g, norm, ground_infidelity: 1.0 - fidelity(&gs, psi)? / (norm * norm) })
    };

    let dim = start.dim();
    let mut psi = start;
    let mut samples = vec![record(0.0, &psi)?];
    let every = (steps / RECORDS).max(1);
    let zero = Complex64::new(0.0, 0.0);
    let (mut k1, mut k2, mut k3, mut k4) = (vec![zero; dim], vec![zero; dim], vec![zero; dim], vec![zero; dim]);
    let mut tmp = vec![zero; dim];
    let mut max_drift: f64 = 0.0;
    let minus_i = Complex64::new(0.0, -1.0);

    let rhs = |g: f64, v: &[Complex64], out: &mut [Complex64]| -> Result<()> {
        apply_hamiltonian(&at(g)?, cutoff, v, out);
        out.iter_mut().for_each(|c| *c *= minus_i);
        Ok(())
    };

    for step in 0..steps {
        let t = step as f64 * h;
        let (g0, gm, g1) = (schedule.g_at(t), schedule.g_at(t + 0.5 * h), schedule.g_at(t + h));
        let y = psi.amplitudes().to_vec();
        rhs(g0, &y, &mut k1)?;
        for i in 0..dim {
            tmp[i] = y[i] + k1[i] * (0.5 * h);
        }
        rhs(gm, &tmp, &mut k2)?;
        for i in 0..dim {
            tmp[i] = y[i] + k2[i] * (0.5 * h);
        }
        rhs(gm, &tmp, &mut k3)?;
        for i in 0..dim {
            tmp[i] = y[i] + k3[i] * h;
        }
        rhs(g1, &tmp, &mut k4)?;
        let amps = psi.amplitudes_mut();
        for i in 0..dim {
            amps[i] = y[i] + (k1[i] + k2[i] * 2.0 + k3[i] * 2.0 + k4[i]) * (h / 6.0);
        }
        let drift = (psi.norm() - 1.0).abs();
        max_drift = max_drift.max(drift);
        if drift > 1e-6 {
            return Err(Error::StepSize(format!(
                "norm drift {drift:e} at t = {} exceeds 1e-6; reduce dt",
                t + h
            )));
        }
        if (step + 1) % every == 0 || step + 1 == steps {
            samples.push(record((step + 1) as f64 * h, &psi)?);
        }
    }
    let final_infidelity = samples.last().map(|s| s.ground_infidelity).unwrap_or(0.0);
    Ok(SweepOutcome { state: psi, final_infidelity, samples, steps, max_norm_drift: max_drift })
}
