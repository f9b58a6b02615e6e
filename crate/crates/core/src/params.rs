//! Physical parameter sets.
//!
//! Conventions used everywhere in the crate:
//!
//! * Hamiltonian `H = ω₀ a†a + (Ω/2) σz + λ (a + a†) σx`
//! * dimensionless coupling `g = 2λ / √(ω₀ Ω)`, critical at `g = 1` for `η → 0`
//! * frequency ratio `η = ω₀ / Ω`
//!
//! With these choices the normal-phase gap is `ω₀ √(1 − g²)` and the ground-state
//! squeezing is `ξ = −¼ log(1 − g²)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The frequency being estimated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Estimand {
    /// Spin frequency Ω.
    #[serde(rename = "Omega")]
    Omega,
    /// Boson frequency ω₀.
    #[serde(rename = "omega0")]
    Omega0,
}

impl Estimand {
    pub const ALL: [Estimand; 2] = [Estimand::Omega, Estimand::Omega0];

    pub fn name(self) -> &'static str {
        match self {
            Estimand::Omega => "Omega",
            Estimand::Omega0 => "omega0",
        }
    }
}

impl std::str::FromStr for Estimand {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "Omega" | "spin" => Ok(Estimand::Omega),
            "omega0" | "boson" => Ok(Estimand::Omega0),
            other => Err(Error::Domain(format!("unknown estimand '{other}'"))),
        }
    }
}

/// Closed system parameters (ω₀, Ω, λ).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RabiParams {
    omega0: f64,
    omega: f64,
    lambda: f64,
}

fn check_frequency(name: &str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("{name} must be positive and finite, got {value}")))
    }
}

impl RabiParams {
    /// Parameters from the raw coupling λ.
    pub fn from_lambda(omega0: f64, omega: f64, lambda: f64) -> Result<Self> {
        check_frequency("omega0", omega0)?;
        check_frequency("Omega", omega)?;
        if !(lambda.is_finite() && lambda >= 0.0) {
            return Err(Error::Domain(format!("lambda must be non-negative, got {lambda}")));
        }
        Ok(Self { omega0, omega, lambda })
    }

    /// Parameters from the dimensionless coupling `g`.
    pub fn new(omega0: f64, omega: f64, g: f64) -> Result<Self> {
        check_frequency("omega0", omega0)?;
        check_frequency("Omega", omega)?;
        if !(g.is_finite() && g >= 0.0) {
            return Err(Error::Domain(format!("g must be non-negative, got {g}")));
        }
        let lambda = 0.5 * g * (omega0 * omega).sqrt();
        Ok(Self { omega0, omega, lambda })
    }

    pub fn omega0(&self) -> f64 {
        self.omega0
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn g(&self) -> f64 {
        2.0 * self.lambda / (self.omega0 * self.omega).sqrt()
    }

    pub fn eta(&self) -> f64 {
        self.omega0 / self.omega
    }

    /// Value of the estimated frequency.
    pub fn frequency(&self, which: Estimand) -> f64 {
        match which {
            Estimand::Omega => self.omega,
            Estimand::Omega0 => self.omega0,
        }
    }

    /// Same λ and other frequency, with `which` replaced by `value`.
    pub fn with_frequency(&self, which: Estimand, value: f64) -> Result<Self> {
        match which {
            Estimand::Omega => Self::from_lambda(self.omega0, value, self.lambda),
            Estimand::Omega0 => Self::from_lambda(value, self.omega, self.lambda),
        }
    }

    /// Same frequencies, another coupling `g`.
    pub fn with_g(&self, g: f64) -> Result<Self> {
        Self::new(self.omega0, self.omega, g)
    }
}

/// Inverse of the `g` definition: λ = g √(ω₀Ω) / 2.
pub fn make_rabi_params(omega0: f64, omega: f64, g: f64) -> Result<RabiParams> {
    RabiParams::new(omega0, omega, g)
}

/// Photon loss κ and spin decay Γ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DissipationParams {
    kappa: f64,
    gamma: f64,
}

impl DissipationParams {
    pub fn new(kappa: f64, gamma: f64) -> Result<Self> {
        for (name, v) in [("kappa", kappa), ("Gamma", gamma)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::Domain(format!("{name} must be non-negative, got {v}")));
            }
        }
        Ok(Self { kappa, gamma })
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    /// Spin decay rate Γ.
    pub fn spin_decay(&self) -> f64 {
        self.gamma
    }

    /// X = Ω² / (Γ² + Ω²).
    pub fn x_factor(&self, rabi: &RabiParams) -> f64 {
        let w = rabi.omega();
        w * w / (self.gamma * self.gamma + w * w)
    }

    /// Y = ¼ ω₀ X g².
    pub fn y_factor(&self, rabi: &RabiParams) -> f64 {
        let g = rabi.g();
        0.25 * rabi.omega0() * self.x_factor(rabi) * g * g
    }

    /// Dissipative critical coupling g_c = √((1 + Γ²/Ω²)(1 + κ²/ω₀²)).
    pub fn critical_coupling(&self, rabi: &RabiParams) -> f64 {
        let s = self.gamma / rabi.omega();
        let k = self.kappa / rabi.omega0();
        ((1.0 + s * s) * (1.0 + k * k)).sqrt()
    }
}

/// Adiabatic sweep settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepParams {
    gamma: f64,
    g_target: f64,
}

impl SweepParams {
    pub fn new(gamma: f64, g_target: f64) -> Result<Self> {
        if !(gamma > 0.0 && gamma < 1.0) {
            return Err(Error::Domain(format!("gamma must lie in (0, 1), got {gamma}")));
        }
        if !(0.0..1.0).contains(&g_target) {
            return Err(Error::Domain(format!("g_target must lie in [0, 1), got {g_target}")));
        }
        Ok(Self { gamma, g_target })
    }

    /// Adiabaticity parameter γ.
    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn g_target(&self) -> f64 {
        self.g_target
    }
}

/// Flat JSON form of all parameters. Missing dissipation and sweep keys are zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParamSet {
    pub omega0: f64,
    #[serde(rename = "Omega")]
    pub omega: f64,
    pub g: f64,
    #[serde(default)]
    pub kappa: f64,
    #[serde(rename = "Gamma", default)]
    pub spin_decay: f64,
    #[serde(default)]
    pub gamma: f64,
}

impl ParamSet {
    pub fn rabi(&self) -> Result<RabiParams> {
        RabiParams::new(self.omega0, self.omega, self.g)
    }

    pub fn dissipation(&self) -> Result<DissipationParams> {
        DissipationParams::new(self.kappa, self.spin_decay)
    }

    /// Sweep settings towards `g` (the set's own coupling).
    pub fn sweep(&self) -> Result<SweepParams> {
        SweepParams::new(self.gamma, self.g)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Domain(format!("invalid parameter JSON: {e}")))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("parameter set is always serializable")
    }
}
