//! Closed-form ground states of the low-frequency-ratio effective model.
//!
//! Normal phase (`g < 1`): squeezed vacuum `S(ξ)|0⟩ ⊗ |↓⟩` with
//! `ξ = −¼ log(1 − g²)` and gap `ε = ω₀ √(1 − g²)`.
//!
//! Superradiant phase (`g > 1`): displaced squeezed vacuum `D(±α)S(ξ)|0⟩`
//! with `α = √(Ω/ω₀) √(g⁴ − 1) / (2g)`, `ξ = −¼ log(1 − 1/g⁴)` and gap
//! `ε = ω₀ √(1 − 1/g⁴)`.
//!
//! All closed forms drop the `O(√η)` spin-fluctuation corrections.

use crate::error::{Error, Result};
use crate::params::{Estimand, RabiParams};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalPhaseSolution {
    pub xi: f64,
    pub gap: f64,
    pub nbar: f64,
    pub qfi_omega0: f64,
    pub qfi_omega: f64,
}

impl NormalPhaseSolution {
    pub fn qfi(&self, which: Estimand) -> f64 {
        match which {
            Estimand::Omega => self.qfi_omega,
            Estimand::Omega0 => self.qfi_omega0,
        }
    }
}

/// Squeezing of the normal-phase ground state.
pub fn normal_squeezing(g: f64) -> f64 {
    -0.25 * (1.0 - g * g).ln()
}

/// Full normal-phase QFI, `g⁴ / (8 A² (1 − g²)²)`, equal to `2 (∂_A ξ)²`.
pub fn normal_qfi(g: f64, a: f64) -> f64 {
    let s = 1.0 - g * g;
    g.powi(4) / (8.0 * a * a * s * s)
}

/// Leading near-critical QFI `1 / (32 A² (1 − g)²)`.
pub fn normal_qfi_leading(g: f64, a: f64) -> f64 {
    1.0 / (32.0 * a * a * (1.0 - g) * (1.0 - g))
}

pub fn normal_solution(params: &RabiParams) -> Result<NormalPhaseSolution> {
    let g = params.g();
    if g >= 1.0 {
        return Err(Error::Phase { g, expected: "normal" });
    }
    let xi = normal_squeezing(g);
    let sh = xi.sinh();
    Ok(NormalPhaseSolution {
        xi,
        gap: params.omega0() * (1.0 - g * g).sqrt(),
        nbar: sh * sh,
        qfi_omega0: normal_qfi(g, params.omega0()),
        qfi_omega: normal_qfi(g, params.omega()),
    })
}

/// Which of the two symmetry-broken superradiant ground states.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Plus,
    Minus,
}

impl Branch {
    pub fn sign(self) -> f64 {
        match self {
            Branch::Plus => 1.0,
            Branch::Minus => -1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuperradiantSolution {
    /// Signed displacement; `|alpha| = α_s`.
    pub alpha: f64,
    pub alpha_s: f64,
    pub theta: f64,
    pub xi_s: f64,
    pub gap_s: f64,
    pub nbar: f64,
    pub branch: Branch,
    pub qfi_omega0: f64,
    pub qfi_omega: f64,
}

impl SuperradiantSolution {
    pub fn qfi(&self, which: Estimand) -> f64 {
        match which {
            Estimand::Omega => self.qfi_omega,
            Estimand::Omega0 => self.qfi_omega0,
        }
    }
}

/// Squeezing contribution `1 / (2 A² (g⁴ − 1)²)` shared by both estimands.
pub fn superradiant_squeezing_qfi(g: f64, a: f64) -> f64 {
    let d = g.powi(4) - 1.0;
    1.0 / (2.0 * a * a * d * d)
}

/// Displacement contribution `4 e^{−2ξ} (∂_A α_s)²`.
///
/// For A = Ω this is `1 / (Ω ω₀ g⁴ √(g⁴ − 1))`. For A = ω₀ the displacement
/// `α_s² = λ²/ω₀² − Ω²/(16λ²)` varies much faster and the term becomes
/// `Ω g⁴ / (ω₀³ √(g⁴ − 1))`.
pub fn superradiant_displacement_qfi(params: &RabiParams, which: Estimand) -> f64 {
    let g = params.g();
    let g4 = g.powi(4);
    let root = (g4 - 1.0).sqrt();
    let (w0, w) = (params.omega0(), params.omega());
    match which {
        Estimand::Omega => 1.0 / (w * w0 * g4 * root),
        Estimand::Omega0 => w * g4 / (w0.powi(3) * root),
    }
}

pub fn superradiant_solution(params: &RabiParams, branch: Branch) -> Result<SuperradiantSolution> {
    let g = params.g();
    if g <= 1.0 {
        return Err(Error::Phase { g, expected: "superradiant" });
    }
    let g4 = g.powi(4);
    let (w0, w) = (params.omega0(), params.omega());
    let alpha_s = (w / w0).sqrt() * (g4 - 1.0).sqrt() / (2.0 * g);
    let theta = (2.0 * g * alpha_s * (w0 / w).sqrt()).atan();
    let xi_s = -0.25 * (1.0 - 1.0 / g4).ln();
    let sh = xi_s.sinh();
    let qfi = |which| {
        superradiant_squeezing_qfi(g, params.frequency(which))
            + superradiant_displacement_qfi(params, which)
    };
    Ok(SuperradiantSolution {
        alpha: branch.sign() * alpha_s,
        alpha_s,
        theta,
        xi_s,
        gap_s: w0 * (1.0 - 1.0 / g4).sqrt(),
        nbar: alpha_s * alpha_s + sh * sh,
        branch,
        qfi_omega0: qfi(Estimand::Omega0),
        qfi_omega: qfi(Estimand::Omega),
    })
}

/// Predicted mean photon number on either side of the transition.
pub fn predicted_photons(params: &RabiParams) -> f64 {
    let g = params.g();
    if g < 1.0 {
        let s = normal_squeezing(g).sinh();
        s * s
    } else if g > 1.0 {
        superradiant_solution(params, Branch::Plus).map(|s| s.nbar).unwrap_or(f64::INFINITY)
    } else {
        f64::INFINITY
    }
}

/// Quadrature variance of the predicted ground state along x (the stretched axis).
pub fn predicted_x_variance(params: &RabiParams) -> f64 {
    let g = params.g();
    let xi = if g < 1.0 {
        normal_squeezing(g)
    } else {
        -0.25 * (1.0 - 1.0 / g.powi(4)).ln()
    };
    0.5 * (2.0 * xi).exp()
}

/// Signal-to-noise ratio `Q_A = A² I_A` along a coupling grid.
///
/// Entries with `g = 1` exactly are skipped.
pub fn q_ratio_scan(omega0: f64, omega: f64, grid: &[f64], which: Estimand) -> Result<Vec<(f64, f64)>> {
    let mut rows = Vec::with_capacity(grid.len());
    for &g in grid {
        if g == 1.0 {
            continue;
        }
        let p = RabiParams::new(omega0, omega, g)?;
        let a = p.frequency(which);
        let qfi = if g < 1.0 {
            normal_solution(&p)?.qfi(which)
        } else {
            superradiant_solution(&p, Branch::Plus)?.qfi(which)
        };
        rows.push((g, a * a * qfi));
    }
    Ok(rows)
}
