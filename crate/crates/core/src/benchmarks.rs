//! Protocol comparisons: Ramsey baselines, scaling regressions and crossover times.

use serde::{Deserialize, Serialize};

use crate::dissipative;
use crate::effective;
use crate::error::{Error, Result};
use crate::gaussian::{homodyne_fi_gaussian, GaussianDerivative, GaussianState};
use crate::output::{Cell, Table};
use crate::params::{DissipationParams, Estimand, RabiParams, SweepParams};
use crate::sweep;

/// Distance from the critical point below which a fit window is rejected.
const WINDOW_GUARD: f64 = 1e-6;

/// Ramsey QFI: `T²` without decay, `T/Γ` with spin decay Γ.
pub fn ramsey_qfi(time: f64, gamma: f64) -> Result<f64> {
    if !(time >= 0.0) || !(gamma >= 0.0) {
        return Err(Error::Domain(format!("Ramsey needs T ≥ 0 and Γ ≥ 0, got T = {time}, Γ = {gamma}")));
    }
    Ok(if gamma == 0.0 { time * time } else { time / gamma })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProtocolKind {
    CriticalHamiltonian,
    CriticalDissipative,
    Ramsey,
    RamseyDissipative,
}

impl ProtocolKind {
    pub fn name(self) -> &'static str {
        match self {
            ProtocolKind::CriticalHamiltonian => "critical-hamiltonian",
            ProtocolKind::CriticalDissipative => "critical-dissipative",
            ProtocolKind::Ramsey => "ramsey",
            ProtocolKind::RamseyDissipative => "ramsey-dissipative",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimationReport {
    pub parameter: Estimand,
    pub protocol: ProtocolKind,
    pub g: f64,
    pub qfi: f64,
    pub fi_homodyne: f64,
    pub nbar: f64,
    pub time: f64,
    pub q_ratio: f64,
}

impl EstimationReport {
    fn check(self) -> Result<Self> {
        let ok = self.fi_homodyne <= self.qfi * (1.0 + 1e-3) + 1e-12
            && [self.qfi, self.fi_homodyne, self.nbar, self.time].iter().all(|v| *v >= 0.0);
        if ok {
            Ok(self)
        } else {
            Err(Error::Invariant(format!("inconsistent estimation report {self:?}")))
        }
    }
}

pub const REPORT_COLUMNS: [&str; 8] = ["protocol", "parameter", "g", "qfi", "fi_homodyne", "nbar", "time", "q_ratio"];

/// One row per report, sorted by (protocol, parameter, g).
pub fn reports_table(reports: &[EstimationReport]) -> Table {
    let mut sorted = reports.to_vec();
    sorted.sort_by(|a, b| {
        a.protocol
            .name()
            .cmp(b.protocol.name())
            .then(a.parameter.name().cmp(b.parameter.name()))
            .then(a.g.total_cmp(&b.g))
    });
    let mut t = Table::new(&REPORT_COLUMNS);
    for r in sorted {
        t.push::<Cell>(vec![
            r.protocol.name().into(),
            r.parameter.name().into(),
            r.g.into(),
            r.qfi.into(),
            r.fi_homodyne.into(),
            r.nbar.into(),
            r.time.into(),
            r.q_ratio.into(),
        ]);
    }
    t
}

/// `∂ξ/∂A` at fixed λ for the normal-phase squeezing `ξ = −¼ log(1 − g²)`.
fn squeezing_derivative(params: &RabiParams, which: Estimand) -> f64 {
    let g2 = params.g().powi(2);
    -0.25 * g2 / (params.frequency(which) * (1.0 - g2))
}

/// Sweep into the normal phase followed by homodyne detection at `angle`.
pub fn hamiltonian_report(
    params: &RabiParams,
    sweep_params: &SweepParams,
    which: Estimand,
    angle: f64,
) -> Result<EstimationReport> {
    let sol = effective::normal_solution(params)?;
    let state = GaussianState::squeezed_vacuum(sol.xi)?;
    let dxi = squeezing_derivative(params, which);
    let e = (2.0 * sol.xi).exp();
    let d = GaussianDerivative::of_cov(nalgebra::Matrix2::new(e * dxi, 0.0, 0.0, -dxi / e))?;
    let schedule = sweep::build_schedule(params, &SweepParams::new(sweep_params.gamma(), params.g())?)?;
    let qfi = sol.qfi(which);
    let a = params.frequency(which);
    EstimationReport {
        parameter: which,
        protocol: ProtocolKind::CriticalHamiltonian,
        g: params.g(),
        qfi,
        fi_homodyne: homodyne_fi_gaussian(&state, &d, angle)?,
        nbar: sol.nbar,
        time: schedule.total_time(),
        q_ratio: a * a * qfi,
    }
    .check()
}

/// Steady state of the open system read out by homodyne detection at `angle`.
pub fn dissipative_report(
    params: &RabiParams,
    diss: &DissipationParams,
    which: Estimand,
    angle: f64,
) -> Result<EstimationReport> {
    let state = dissipative::steady_state(params, diss)?;
    let d = GaussianDerivative::of_cov(dissipative::steady_state_derivative(params, diss, which)?)?;
    let qfi = dissipative::dissipative_qfi(params, diss, which)?;
    let a = params.frequency(which);
    EstimationReport {
        parameter: which,
        protocol: ProtocolKind::CriticalDissipative,
        g: params.g(),
        qfi,
        fi_homodyne: homodyne_fi_gaussian(&state, &d, angle)?,
        nbar: state.mean_photon(),
        time: dissipative::relaxation_time(params, diss)?,
        q_ratio: a * a * qfi,
    }
    .check()
}

/// Single-spin Ramsey estimate of Ω over duration `time`; the optimal measurement saturates.
pub fn ramsey_report(omega: f64, time: f64, gamma: f64) -> Result<EstimationReport> {
    let qfi = ramsey_qfi(time, gamma)?;
    EstimationReport {
        parameter: Estimand::Omega,
        protocol: if gamma > 0.0 { ProtocolKind::RamseyDissipative } else { ProtocolKind::Ramsey },
        g: 0.0,
        qfi,
        fi_homodyne: qfi,
        nbar: 0.0,
        time,
        q_ratio: omega * omega * qfi,
    }
    .check()
}

/// What the fitted QFI is regressed against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Abscissa {
    /// `T`.
    Time,
    /// `⟨N⟩ T`.
    PhotonsTime,
    /// `⟨N⟩² T²`.
    PhotonsSquaredTimeSquared,
}

impl Abscissa {
    fn value(self, nbar: f64, time: f64) -> f64 {
        match self {
            Abscissa::Time => time,
            Abscissa::PhotonsTime => nbar * time,
            Abscissa::PhotonsSquaredTimeSquared => (nbar * time).powi(2),
        }
    }
}

/// Photon number used on the abscissa.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhotonModel {
    /// `sinh²ξ` (Hamiltonian) or the steady-state occupation (dissipative).
    Exact,
    /// Near-critical `¼(1 − g²)^{−1/2}`; Hamiltonian protocol only.
    Asymptotic,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ProtocolSpec {
    /// Optimal sweep with adiabaticity γ, then ground-state readout.
    Hamiltonian { params: RabiParams, gamma: f64 },
    /// Steady state reached after the slowest relaxation time.
    Dissipative { params: RabiParams, diss: DissipationParams },
}

impl ProtocolSpec {
    pub fn critical_coupling(&self) -> f64 {
        match self {
            ProtocolSpec::Hamiltonian { .. } => 1.0,
            ProtocolSpec::Dissipative { params, diss } => diss.critical_coupling(params),
        }
    }

    /// `(⟨N⟩, T, I_A)` at coupling `g`.
    pub fn evaluate(&self, g: f64, which: Estimand, photons: PhotonModel) -> Result<(f64, f64, f64)> {
        match self {
            ProtocolSpec::Hamiltonian { params, gamma } => {
                let p = params.with_g(g)?;
                let sol = effective::normal_solution(&p)?;
                let s = 1.0 - g * g;
                let time = g / (gamma * p.omega0() * s.sqrt());
                let nbar = match photons {
                    PhotonModel::Exact => sol.nbar,
                    PhotonModel::Asymptotic => 0.25 / s.sqrt(),
                };
                Ok((nbar, time, sol.qfi(which)))
            }
            ProtocolSpec::Dissipative { params, diss } => {
                if photons == PhotonModel::Asymptotic {
                    return Err(Error::Domain("asymptotic photon model applies to the Hamiltonian protocol".into()));
                }
                let p = params.with_g(g)?;
                let nbar = dissipative::steady_state(&p, diss)?.mean_photon();
                let time = dissipative::relaxation_time(&p, diss)?;
                Ok((nbar, time, dissipative::dissipative_qfi(&p, diss, which)?))
            }
        }
    }
}

/// Log–log least-squares fit `log I = exponent · log x + log prefactor`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingFit {
    pub exponent: f64,
    pub exponent_stderr: f64,
    pub prefactor: f64,
    pub r_squared: f64,
    /// `(g_min, g_max)` in units of the critical coupling.
    pub window: (f64, f64),
    pub points: usize,
    pub abscissa: Abscissa,
}

/// Ordinary least squares on `(x, y)`; returns (slope, intercept, r², slope stderr).
pub fn linear_fit(x: &[f64], y: &[f64]) -> Result<(f64, f64, f64, f64)> {
    let n = x.len();
    if n != y.len() || n < 3 {
        return Err(Error::Domain("fit needs at least three paired points".into()));
    }
    let nf = n as f64;
    let mx = x.iter().sum::<f64>() / nf;
    let my = y.iter().sum::<f64>() / nf;
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    if !(sxx > 0.0) {
        return Err(Error::Domain("fit abscissae are degenerate".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = x.iter().zip(y).map(|(a, b)| (b - intercept - slope * a).powi(2)).sum();
    let r2 = if syy > 0.0 { (1.0 - sse / syy).clamp(0.0, 1.0) } else { 1.0 };
    let stderr = (sse / (nf - 2.0) / sxx).sqrt();
    Ok((slope, intercept, r2, stderr))
}

/// Couplings `g/g_crit` log-spaced in the distance `1 − g/g_crit` over the window.
pub fn window_samples(window: (f64, f64), n_points: usize) -> Result<Vec<f64>> {
    let (lo, hi) = window;
    if !(0.0 < lo && lo < hi && hi < 1.0) {
        return Err(Error::Window(format!("window ({lo}, {hi}) must satisfy 0 < g_min < g_max < 1")));
    }
    if 1.0 - hi < WINDOW_GUARD {
        return Err(Error::Window(format!("window end {hi} lies within {WINDOW_GUARD:e} of the critical point")));
    }
    if n_points < 8 {
        return Err(Error::Domain(format!("scaling fit needs at least 8 points, got {n_points}")));
    }
    let (a, b) = ((1.0 - lo).ln(), (1.0 - hi).ln());
    Ok((0..n_points)
        .map(|k| 1.0 - (a + (b - a) * k as f64 / (n_points - 1) as f64).exp())
        .collect())
}

/// Regresses `log I_A` on `log x(⟨N⟩, T)` across a near-critical window.
pub fn scaling_fit(
    protocol: &ProtocolSpec,
    which: Estimand,
    window: (f64, f64),
    n_points: usize,
    abscissa: Abscissa,
    photons: PhotonModel,
) -> Result<ScalingFit> {
    let gc = protocol.critical_coupling();
    let mut xs = Vec::with_capacity(n_points);
    let mut ys = Vec::with_capacity(n_points);
    for frac in window_samples(window, n_points)? {
        let (nbar, time, qfi) = protocol.evaluate(frac * gc, which, photons)?;
        let x = abscissa.value(nbar, time);
        if !(x > 0.0 && qfi > 0.0) {
            return Err(Error::Numeric(format!("non-positive fit point x = {x}, I = {qfi} at g/g_c = {frac}")));
        }
        xs.push(x.ln());
        ys.push(qfi.ln());
    }
    let (slope, intercept, r2, stderr) = linear_fit(&xs, &ys)?;
    Ok(ScalingFit {
        exponent: slope,
        exponent_stderr: stderr,
        prefactor: intercept.exp(),
        r_squared: r2,
        window,
        points: n_points,
        abscissa,
    })
}

/// Prefactor `γ⁴ω₀⁴/(8Ω²)` of `I_Ω ≃ c T⁴` for the Hamiltonian protocol.
pub fn hamiltonian_omega_prefactor(params: &RabiParams, gamma: f64) -> f64 {
    (gamma * params.omega0()).powi(4) / (8.0 * params.omega().powi(2))
}

/// Time from which the critical protocol's QFI exceeds the Ramsey baseline.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Crossover {
    At(f64),
    /// Critical protocol is ahead for every T > 0.
    Always,
    /// Open interval: no crossover at any finite T.
    Never,
}

/// Hamiltonian protocol `c T⁴` against Ramsey `T²` (Γ = 0) or `T/Γ`.
pub fn crossover_time(params: &RabiParams, sweep_params: &SweepParams, gamma: f64) -> Result<Crossover> {
    if !(gamma >= 0.0) {
        return Err(Error::Domain(format!("spin decay must be non-negative, got {gamma}")));
    }
    let c = hamiltonian_omega_prefactor(params, sweep_params.gamma());
    Ok(if gamma == 0.0 {
        Crossover::At((1.0 / c).sqrt())
    } else {
        Crossover::At((1.0 / (c * gamma)).cbrt())
    })
}

/// Dissipative `a T²` against the decaying-spin Ramsey baseline `T/Γ`.
pub fn dissipative_crossover_time(params: &RabiParams, diss: &DissipationParams) -> Result<Crossover> {
    let a = dissipative::qfi_asymptote_omega_prefactor(params, diss);
    let gam = diss.spin_decay();
    Ok(if gam == 0.0 {
        if a > 1.0 {
            Crossover::Always
        } else {
            Crossover::Never
        }
    } else if a > 0.0 {
        Crossover::At(1.0 / (a * gam))
    } else {
        Crossover::Never
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn ramsey_values() {
        assert_eq!(ramsey_qfi(0.0, 0.0).unwrap(), 0.0);
        assert_eq!(ramsey_qfi(10.0, 0.0).unwrap(), 100.0);
        assert_relative_eq!(ramsey_qfi(10.0, 0.1).unwrap(), 100.0, max_relative = 1e-14);
        assert!(ramsey_qfi(-1.0, 0.0).is_err());
    }

    #[test]
    fn crossover_examples() {
        let sw = SweepParams::new(0.999_999_999, 0.5).unwrap();
        let p = RabiParams::new(1.0, 1.0, 0.5).unwrap();
        match crossover_time(&p, &sw, 0.0).unwrap() {
            Crossover::At(t) => assert_relative_eq!(t, 2.0 * 2f64.sqrt(), max_relative = 1e-8),
            other => panic!("{other:?}"),
        }
        let p = RabiParams::new(1.0, 100.0, 0.5).unwrap();
        let sw = SweepParams::new(0.1, 0.5).unwrap();
        match crossover_time(&p, &sw, 0.0).unwrap() {
            Crossover::At(t) => assert_relative_eq!(t, 28_284.271_247_461_9, max_relative = 1e-12),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn dissipative_crossover_balances_curves() {
        let p = RabiParams::new(1.0, 100.0, 0.5).unwrap();
        let d = DissipationParams::new(0.5, 10.0).unwrap();
        let Crossover::At(t) = dissipative_crossover_time(&p, &d).unwrap() else { panic!() };
        let a = dissipative::qfi_asymptote_omega_prefactor(&p, &d);
        assert_relative_eq!(a * t * t, t / 10.0, max_relative = 1e-12);
    }

    #[test]
    fn window_guard() {
        assert!(matches!(window_samples((0.99, 1.0 - 1e-7), 10), Err(Error::Window(_))));
        assert!(window_samples((0.99, 0.9999), 4).is_err());
        let s = window_samples((0.99, 0.9999), 9).unwrap();
        assert_relative_eq!(s[0], 0.99, max_relative = 1e-14);
        assert_relative_eq!(s[8], 0.9999, max_relative = 1e-14);
        assert_relative_eq!(1.0 - s[4], 1e-3, max_relative = 1e-10);
    }

    #[test]
    fn linear_fit_recovers_line() {
        let x: Vec<f64> = (0..10).map(|k| k as f64).collect();
        let y: Vec<f64> = x.iter().map(|v| 3.0 * v - 2.0).collect();
        let (s, i, r2, e) = linear_fit(&x, &y).unwrap();
        assert_relative_eq!(s, 3.0, max_relative = 1e-14);
        assert_relative_eq!(i, -2.0, max_relative = 1e-13);
        assert_eq!(r2, 1.0);
        assert!(e < 1e-12);
    }

    #[test]
    fn hamiltonian_omega_fit_is_exact_quartic() {
        let params = RabiParams::new(1.0, 100.0, 0.5).unwrap();
        let spec = ProtocolSpec::Hamiltonian { params, gamma: 0.1 };
        let fit = scaling_fit(&spec, Estimand::Omega, (0.99, 0.9999), 12, Abscissa::Time, PhotonModel::Exact).unwrap();
        assert_relative_eq!(fit.exponent, 4.0, max_relative = 1e-9);
        assert_relative_eq!(fit.prefactor, hamiltonian_omega_prefactor(&params, 0.1), max_relative = 1e-7);
    }

    #[test]
    fn reports_respect_cramer_rao() {
        let p = RabiParams::new(1.0, 100.0, 0.8).unwrap();
        let sw = SweepParams::new(0.05, 0.8).unwrap();
        for which in Estimand::ALL {
            let r = hamiltonian_report(&p, &sw, which, 0.0).unwrap();
            assert_relative_eq!(r.fi_homodyne, r.qfi, max_relative = 1e-12);
            let r = hamiltonian_report(&p, &sw, which, 0.6).unwrap();
            assert!(r.fi_homodyne < r.qfi);
        }
        let d = DissipationParams::new(0.5, 5.0).unwrap();
        for which in Estimand::ALL {
            for angle in [0.0, 0.4, 1.3] {
                dissipative_report(&p, &d, which, angle).unwrap();
            }
        }
        let table = reports_table(&[ramsey_report(100.0, 10.0, 0.0).unwrap()]);
        assert_eq!(table.len(), 1);
    }

    #[test]
    fn dissipative_reports_are_monotone_in_time() {
        let d = DissipationParams::new(0.5, 0.0).unwrap();
        let params = RabiParams::new(1.0, 100.0, 0.5).unwrap();
        let spec = ProtocolSpec::Dissipative { params, diss: d };
        let gc = spec.critical_coupling();
        let mut last = (0.0, 0.0);
        for frac in window_samples((0.5, 0.999), 20).unwrap() {
            let (_, t, q) = spec.evaluate(frac * gc, Estimand::Omega, PhotonModel::Exact).unwrap();
            assert!(t >= last.0 && q > last.1);
            last = (t, q);
        }
    }
}
