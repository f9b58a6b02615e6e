//! Adiabatic schedule with speed `v(g) = γ ω₀ (1 − g²)^{3/2}`.
//!
//! The elapsed time `t(g) = ∫₀^g ds / v(s) = g / (γ ω₀ √(1 − g²))` inverts to
//! `g(t) = u / √(1 + u²)` with `u = γ ω₀ t`, so the schedule is exact at every
//! query time.

use crate::error::{Error, Result};
use crate::output::Table;
use crate::params::{RabiParams, SweepParams};

const EXPORT_POINTS: usize = 10_000;

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSchedule {
    gamma: f64,
    omega0: f64,
    g_target: f64,
    total_time: f64,
}

pub fn build_schedule(params: &RabiParams, sweep: &SweepParams) -> Result<SweepSchedule> {
    let g_target = sweep.g_target();
    if g_target >= 1.0 {
        return Err(Error::Domain(format!("sweep target g = {g_target} must be below 1")));
    }
    let omega0 = params.omega0();
    let gamma = sweep.gamma();
    Ok(SweepSchedule { gamma, omega0, g_target, total_time: elapsed(gamma, omega0, g_target) })
}

fn elapsed(gamma: f64, omega0: f64, g: f64) -> f64 {
    g / (gamma * omega0 * (1.0 - g * g).sqrt())
}

impl SweepSchedule {
    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn omega0(&self) -> f64 {
        self.omega0
    }

    pub fn g_target(&self) -> f64 {
        self.g_target
    }

    pub fn total_time(&self) -> f64 {
        self.total_time
    }

    /// dg/dt at coupling `g`.
    pub fn speed(&self, g: f64) -> f64 {
        self.gamma * self.omega0 * (1.0 - g * g).powf(1.5)
    }

    /// Time at which the sweep reaches `g ≤ g_target`.
    pub fn t_at(&self, g: f64) -> f64 {
        elapsed(self.gamma, self.omega0, g.clamp(0.0, self.g_target))
    }

    /// Coupling at time `t`, held at `g_target` after the sweep ends.
    pub fn g_at(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        if t >= self.total_time {
            return self.g_target;
        }
        let u = self.gamma * self.omega0 * t;
        (u / (1.0 + u * u).sqrt()).min(self.g_target)
    }

    /// Dense `(t, g, v)` samples, uniform in g, ending exactly at the target.
    pub fn samples(&self, points: usize) -> Vec<(f64, f64, f64)> {
        let points = points.max(2);
        (0..points)
            .map(|k| {
                let g = if k + 1 == points {
                    self.g_target
                } else {
                    self.g_target * k as f64 / (points - 1) as f64
                };
                (self.t_at(g), g, self.speed(g))
            })
            .collect()
    }

    pub fn table(&self) -> Table {
        let mut t = Table::new(&["t", "g", "v"]);
        for (time, g, v) in self.samples(EXPORT_POINTS) {
            t.push(vec![time, g, v]);
        }
        t
    }
}

/// `|α₂|² = v² g² / (32 ω₀² (1 − g²)³)` for an arbitrary local speed `v`.
pub fn excitation_probability_for_speed(speed: f64, omega0: f64, g: f64) -> f64 {
    let s = 1.0 - g * g;
    speed * speed * g * g / (32.0 * omega0 * omega0 * s * s * s)
}

/// Excitation probability under the optimal speed ansatz, which collapses to `γ² g² / 32`.
pub fn excitation_probability(sweep: &SweepParams, g: f64) -> Result<f64> {
    check_normal(g)?;
    let gam = sweep.gamma();
    Ok(gam * gam * g * g / 32.0)
}

/// Dynamical phase difference `R(g) = Θ₂ − Θ₀ = (1/γ) log((1 + g)/(1 − g))`.
pub fn phase_r(sweep: &SweepParams, g: f64) -> Result<f64> {
    check_normal(g)?;
    Ok(((1.0 + g) / (1.0 - g)).ln() / sweep.gamma())
}

/// `(d log f / dg) / (dR/dg)` with the near-critical form `f ~ (1 − g²)^{−1}`.
///
/// Evaluates to `γ g`, never above γ.
pub fn adiabaticity_ratio(sweep: &SweepParams, g: f64) -> Result<f64> {
    check_normal(g)?;
    let s = 1.0 - g * g;
    let dlogf = 2.0 * g / s;
    let dr = 2.0 / (sweep.gamma() * s);
    Ok(dlogf / dr)
}

/// `⟨2_s| ∂_g |0_s⟩ = (√2/4) g / (1 − g²)`; all other `n` vanish.
pub fn matrix_element_check(g: f64) -> Result<f64> {
    check_normal(g)?;
    Ok(std::f64::consts::SQRT_2 / 4.0 * g / (1.0 - g * g))
}

fn check_normal(g: f64) -> Result<()> {
    if (0.0..1.0).contains(&g) {
        Ok(())
    } else {
        Err(Error::Domain(format!("g = {g} must lie in [0, 1)")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn schedule(gamma: f64, g: f64) -> SweepSchedule {
        let p = RabiParams::new(1.0, 100.0, g).unwrap();
        build_schedule(&p, &SweepParams::new(gamma, g).unwrap()).unwrap()
    }

    #[test]
    fn total_time_value() {
        assert!((schedule(0.01, 0.8).total_time() - 133.333_333_333_333).abs() < 1e-9);
    }

    #[test]
    fn zero_target_has_zero_duration() {
        assert_eq!(schedule(0.1, 0.0).total_time(), 0.0);
        assert!(schedule(0.1, 1e-9).total_time() < 1e-6);
    }

    #[test]
    fn critical_scaling_of_total_time() {
        let gam = 0.05;
        for k in [4, 6, 8] {
            let g = 1.0 - 10f64.powi(-k);
            let t = schedule(gam, g).total_time();
            let r = t * (1.0 - g).sqrt() * gam * std::f64::consts::SQRT_2;
            assert!((r - 1.0).abs() < 1e-3, "{k} {r}");
        }
    }

    #[test]
    fn inverse_is_consistent() {
        let s = schedule(0.05, 0.95);
        for k in 0..=100 {
            let g = 0.95 * k as f64 / 100.0;
            let back = s.g_at(s.t_at(g));
            assert!((back - g).abs() < 1e-12);
        }
        assert!((s.g_at(s.total_time()) - 0.95).abs() < 1e-10);
        assert_eq!(s.g_at(-1.0), 0.0);
        assert_eq!(s.g_at(1e9), 0.95);
    }

    #[test]
    fn samples_are_strictly_increasing() {
        let s = schedule(0.05, 0.9);
        let rows = s.samples(500);
        assert!(rows.windows(2).all(|w| w[1].0 > w[0].0 && w[1].1 > w[0].1));
        assert!(rows.iter().all(|r| r.2 > 0.0));
        assert_eq!(rows.last().unwrap().1, 0.9);
    }

    #[test]
    fn excitation_collapses_to_gamma_squared() {
        let sw = SweepParams::new(0.1, 0.9).unwrap();
        assert!((excitation_probability(&sw, 0.9).unwrap() - 2.53125e-4).abs() < 1e-15);
        assert_eq!(excitation_probability(&sw, 0.0).unwrap(), 0.0);
        let s = schedule(0.1, 0.9);
        for g in [0.1, 0.5, 0.9, 0.99] {
            let general = excitation_probability_for_speed(s.speed(g), 1.0, g);
            let ratio = general * 32.0 / (0.01 * g * g);
            assert!((ratio - 1.0).abs() < 1e-10);
            assert!(general < 0.01 / 32.0);
        }
    }

    #[test]
    fn phase_values() {
        let sw = SweepParams::new(0.1, 0.9).unwrap();
        assert_eq!(phase_r(&sw, 0.0).unwrap(), 0.0);
        assert!((phase_r(&sw, 0.9).unwrap() - 29.444_389_791_664).abs() < 1e-9);
        assert!(phase_r(&sw, 1.0).is_err());
    }

    #[test]
    fn adiabaticity_ratio_bounded_by_gamma() {
        let sw = SweepParams::new(0.07, 0.9).unwrap();
        for k in 0..1000 {
            let g = k as f64 / 1000.0;
            assert!(adiabaticity_ratio(&sw, g).unwrap() <= 0.07);
        }
    }

    #[test]
    fn matrix_element_values() {
        assert_eq!(matrix_element_check(0.0).unwrap(), 0.0);
        assert!((matrix_element_check(0.5).unwrap() - 0.235_702_260_395_5).abs() < 1e-12);
    }

    #[test]
    fn rejects_critical_target() {
        let p = RabiParams::new(1.0, 100.0, 0.5).unwrap();
        let sw = SweepParams::new(0.1, 0.5).unwrap();
        assert!(build_schedule(&p, &sw).is_ok());
        assert!(SweepParams::new(0.1, 1.0).is_err());
    }
}
