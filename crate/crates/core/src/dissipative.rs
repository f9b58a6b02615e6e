//! Covariance dynamics of the driven-dissipative normal phase.
//!
//! The flow is `∂σ/∂t = Bσ + σBᵀ − 2κ(σ − σ_L)` with
//! `B = [[0, ω₀], [ω₀(Xg² − 1), 0]]` and `σ_L = ½ I + diag(0, 2YΓ/(Ωκ))`,
//! written here as `Bσ + σBᵀ − 2κσ + Q` with `Q = 2κσ_L = diag(κ, κ + 4YΓ/Ω)` so that
//! κ = 0 needs no special case.
//!
//! With `μ = √(Xg² − 1)` (complex below `Xg² = 1`) the super-operator `σ ↦ Bσ + σBᵀ`
//! has eigenmatrices
//! `M₁ = [[1/μ, 0], [0, −μ]]` (λ = 0), `M± = [[1/μ, ±1], [±1, μ]]` (λ = ±2ω₀μ) on the
//! symmetric sector and the antisymmetric `M₀` (λ = 0), and each coefficient relaxes
//! at `λ̃ᵢ = 2κ − λᵢ`.

use nalgebra::{Matrix2, Matrix4, Vector2};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::gaussian::{qfi_gaussian, GaussianDerivative, GaussianState, QfiInput};
use crate::params::{DissipationParams, Estimand, RabiParams};

/// Below this `|Xg² − 1|` the eigenmatrix basis degenerates and the matrix exponential is used.
const DEGENERATE_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CovarianceFlow {
    omega0: f64,
    kappa: f64,
    /// `Xg²`.
    xg2: f64,
    drift: Matrix2<f64>,
    diffusion: Matrix2<f64>,
}

pub fn build_flow(params: &RabiParams, diss: &DissipationParams) -> CovarianceFlow {
    let omega0 = params.omega0();
    let kappa = diss.kappa();
    let g = params.g();
    let xg2 = diss.x_factor(params) * g * g;
    let y = diss.y_factor(params);
    let drift = Matrix2::new(0.0, omega0, 4.0 * y - omega0, 0.0);
    let diffusion = Matrix2::new(kappa, 0.0, 0.0, kappa + 4.0 * y * diss.spin_decay() / params.omega());
    CovarianceFlow { omega0, kappa, xg2, drift, diffusion }
}

impl CovarianceFlow {
    pub fn drift(&self) -> &Matrix2<f64> {
        &self.drift
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    /// `Xg²`.
    pub fn xg2(&self) -> f64 {
        self.xg2
    }

    /// `Q = 2κσ_L`.
    pub fn diffusion(&self) -> &Matrix2<f64> {
        &self.diffusion
    }

    /// Target matrix `σ_L = Q/(2κ)`.
    pub fn sigma_l(&self) -> Result<Matrix2<f64>> {
        if !(self.kappa > 0.0) {
            return Err(Error::NoSteadyState);
        }
        Ok(self.diffusion / (2.0 * self.kappa))
    }

    /// Right-hand side of the flow at `σ`.
    pub fn rhs(&self, sigma: &Matrix2<f64>) -> Matrix2<f64> {
        self.drift * sigma + sigma * self.drift.transpose() - sigma * (2.0 * self.kappa) + self.diffusion
    }

    /// Linear generator acting on column-major `vec(σ)`.
    pub fn generator(&self) -> Matrix4<f64> {
        let b = self.drift;
        let id = Matrix2::<f64>::identity();
        id.kronecker(&b) + b.kronecker(&id) - Matrix4::identity() * (2.0 * self.kappa)
    }

    pub fn spectrum(&self) -> FlowSpectrum {
        FlowSpectrum::new(self)
    }
}

/// Eigen-decomposition of the flow's symmetric sector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowSpectrum {
    /// `μ = √(Xg² − 1)`, imaginary below the crossover.
    pub mu: Complex64,
    pub omega0: f64,
    pub kappa: f64,
    /// `(λ₁, λ₊, λ₋, λ₀)` of `σ ↦ Bσ + σBᵀ`.
    pub lambda: [Complex64; 4],
    /// Decay rates `λ̃ᵢ = 2κ − λᵢ`, same order.
    pub rates: [Complex64; 4],
    /// Coefficients of `Q` in `(M₁, M₊, M₋)`.
    pub q_coefficients: [Complex64; 3],
}

impl FlowSpectrum {
    fn new(flow: &CovarianceFlow) -> Self {
        let mu = Complex64::new(flow.xg2 - 1.0, 0.0).sqrt();
        let l = mu * (2.0 * flow.omega0);
        let zero = Complex64::new(0.0, 0.0);
        let lambda = [zero, l, -l, zero];
        let two_k = Complex64::new(2.0 * flow.kappa, 0.0);
        let rates = lambda.map(|x| two_k - x);
        let mut s = Self { mu, omega0: flow.omega0, kappa: flow.kappa, lambda, rates, q_coefficients: [zero; 3] };
        s.q_coefficients = s.decompose(&flow.diffusion);
        s
    }

    /// `(M₁, M₊, M₋)`.
    pub fn eigenmatrices(&self) -> [[[Complex64; 2]; 2]; 3] {
        let mu = self.mu;
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        [[[one / mu, zero], [zero, -mu]], [[one / mu, one], [one, mu]], [[one / mu, -one], [-one, mu]]]
    }

    /// Coefficients `(c₁, c₊, c₋)` of a symmetric matrix; the `M₀` coefficient is zero.
    pub fn decompose(&self, m: &Matrix2<f64>) -> [Complex64; 3] {
        let (a, b, c) = (m[(0, 0)], m[(0, 1)], m[(1, 1)]);
        let mu = self.mu;
        let s = (mu * a + c / mu) * 0.5;
        let c1 = (mu * a - c / mu) * 0.5;
        [c1, (s + b) * 0.5, (s - b) * 0.5]
    }

    pub fn reconstruct(&self, c: &[Complex64; 3]) -> Matrix2<f64> {
        let ms = self.eigenmatrices();
        let mut out = [[Complex64::new(0.0, 0.0); 2]; 2];
        for (ci, m) in c.iter().zip(ms.iter()) {
            for i in 0..2 {
                for j in 0..2 {
                    out[i][j] += ci * m[i][j];
                }
            }
        }
        Matrix2::new(out[0][0].re, out[0][1].re, out[1][0].re, out[1][1].re)
    }

    /// Smallest real part among the symmetric-sector decay rates.
    pub fn slowest_rate(&self) -> f64 {
        self.rates[..3].iter().map(|r| r.re).fold(f64::INFINITY, f64::min)
    }

    /// Decay rates from the eigenvalues of the vectorized generator, sorted by real part.
    pub fn numerical_rates(flow: &CovarianceFlow) -> Vec<Complex64> {
        let mut r: Vec<Complex64> = flow.generator().complex_eigenvalues().iter().map(|e| -e).collect();
        r.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        r
    }
}

/// `(1 − e^{−zt})/z`, continuous at `z = 0`.
fn relax_weight(z: Complex64, t: f64) -> Complex64 {
    let zt = z * t;
    if zt.norm() < 1e-8 {
        Complex64::new(t, 0.0) * (Complex64::new(1.0, 0.0) - zt * 0.5)
    } else {
        (Complex64::new(1.0, 0.0) - (-zt).exp()) / z
    }
}

/// Exact covariance at time `t`; the mean stays at zero.
///
/// Uses the eigenmatrix expansion `cᵢ(t) = cᵢ(0) e^{−λ̃ᵢt} + qᵢ (1 − e^{−λ̃ᵢt})/λ̃ᵢ`,
/// switching to the matrix exponential of the augmented generator when `|Xg² − 1| < 1e−6`.
pub fn evolve_covariance(flow: &CovarianceFlow, sigma0: &GaussianState, t: f64) -> Result<GaussianState> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::Domain(format!("evolution time must be non-negative, got {t}")));
    }
    if sigma0.disp().norm() > 0.0 {
        return Err(Error::Domain("covariance flow is defined for zero-mean states".into()));
    }
    if t == 0.0 {
        return Ok(*sigma0);
    }
    let cov = if (flow.xg2 - 1.0).abs() < DEGENERATE_TOL {
        evolve_expm(flow, sigma0.cov(), t)?
    } else {
        let sp = flow.spectrum();
        let c0 = sp.decompose(sigma0.cov());
        let mut c = [Complex64::new(0.0, 0.0); 3];
        for i in 0..3 {
            let r = sp.rates[i];
            c[i] = c0[i] * (-r * t).exp() + sp.q_coefficients[i] * relax_weight(r, t);
        }
        sp.reconstruct(&c)
    };
    GaussianState::new(cov, Vector2::zeros())
}

/// `exp(t [[L, q], [0, 0]])` on `(σ_xx, σ_xy, σ_yy, 1)`.
fn evolve_expm(flow: &CovarianceFlow, sigma0: &Matrix2<f64>, t: f64) -> Result<Matrix2<f64>> {
    let b = flow.drift;
    let k2 = 2.0 * flow.kappa;
    let q = flow.diffusion;
    #[rustfmt::skip]
    let aug = Matrix4::new(
        2.0 * b[(0, 0)] - k2, 2.0 * b[(0, 1)], 0.0, q[(0, 0)],
        b[(1, 0)], b[(0, 0)] + b[(1, 1)] - k2, b[(0, 1)], q[(0, 1)],
        0.0, 2.0 * b[(1, 0)], 2.0 * b[(1, 1)] - k2, q[(1, 1)],
        0.0, 0.0, 0.0, 0.0,
    ) * t;
    let e = aug.exp();
    let v = e * nalgebra::Vector4::new(sigma0[(0, 0)], sigma0[(0, 1)], sigma0[(1, 1)], 1.0);
    if !v.iter().all(|x| x.is_finite()) {
        return Err(Error::Numeric("matrix exponential overflowed".into()));
    }
    Ok(Matrix2::new(v[0], v[1], v[1], v[2]))
}

fn check_stable(params: &RabiParams, diss: &DissipationParams) -> Result<f64> {
    if !(diss.kappa() > 0.0) {
        return Err(Error::NoSteadyState);
    }
    let g_c = diss.critical_coupling(params);
    if params.g() >= g_c {
        return Err(Error::Unstable { g: params.g(), g_c });
    }
    Ok(g_c)
}

/// Closed-form building blocks of the steady state.
#[derive(Debug, Clone, Copy)]
struct SteadyTerms {
    /// `u = g²`.
    u: f64,
    x: f64,
    /// `k = κ/ω₀`.
    k: f64,
    /// `r = ω₀Γ/(Ωκ)`.
    r: f64,
    /// `g_c²`.
    gc2: f64,
}

impl SteadyTerms {
    fn new(params: &RabiParams, diss: &DissipationParams) -> Self {
        let g = params.g();
        Self {
            u: g * g,
            x: diss.x_factor(params),
            k: diss.kappa() / params.omega0(),
            r: params.omega0() * diss.spin_decay() / (params.omega() * diss.kappa()),
            gc2: diss.critical_coupling(params).powi(2),
        }
    }

    fn prefactor(&self) -> f64 {
        self.u * (1.0 + self.r) / (4.0 * (self.gc2 - self.u))
    }

    fn cov(&self) -> Matrix2<f64> {
        let p = self.prefactor();
        let xu = self.x * self.u;
        let d = 0.5 * xu * self.r;
        Matrix2::new(0.5 + p, p * self.k, p * self.k, 0.5 + p * (xu - 1.0) + d)
    }
}

/// Stationary covariance
/// `σ = ½I + P [[1, κ/ω₀], [κ/ω₀, Xg² − 1]] + diag(0, 2YΓ/(Ωκ))`,
/// `P = g²(1 + ω₀Γ/(Ωκ)) / (4(g_c² − g²))`.
pub fn steady_state(params: &RabiParams, diss: &DissipationParams) -> Result<GaussianState> {
    check_stable(params, diss)?;
    GaussianState::new(SteadyTerms::new(params, diss).cov(), Vector2::zeros())
}

/// `1 / min Re λ̃ᵢ`.
pub fn relaxation_time(params: &RabiParams, diss: &DissipationParams) -> Result<f64> {
    check_stable(params, diss)?;
    let rate = build_flow(params, diss).spectrum().slowest_rate();
    if !(rate > 0.0) {
        return Err(Error::Numeric(format!("non-positive slowest decay rate {rate}")));
    }
    Ok(1.0 / rate)
}

/// `(1/2κ) · g_c/(g_c − g) · 1/(1 + ω₀²/κ²)`.
pub fn relaxation_time_asymptote(params: &RabiParams, diss: &DissipationParams) -> Result<f64> {
    let g_c = check_stable(params, diss)?;
    let k = diss.kappa();
    let w = params.omega0();
    Ok(g_c / (g_c - params.g()) / (2.0 * k * (1.0 + w * w / (k * k))))
}

/// Analytic `∂σ/∂A` of the steady state at fixed λ.
pub fn steady_state_derivative(params: &RabiParams, diss: &DissipationParams, which: Estimand) -> Result<Matrix2<f64>> {
    check_stable(params, diss)?;
    let s = SteadyTerms::new(params, diss);
    let a = params.frequency(which);
    let du = -s.u / a;
    let (dx, dk, dr, dgc2) = match which {
        Estimand::Omega => (
            2.0 * s.x * (1.0 - s.x) / a,
            0.0,
            -s.r / a,
            -2.0 * s.gc2 * (1.0 - s.x) / a,
        ),
        Estimand::Omega0 => (0.0, -s.k / a, s.r / a, -2.0 * s.k * s.k / (a * s.x)),
    };
    let gap = s.gc2 - s.u;
    let p = s.prefactor();
    let dp = (du * (1.0 + s.r) + s.u * dr) / (4.0 * gap) - p * (dgc2 - du) / gap;
    let xu = s.x * s.u;
    let dxu = dx * s.u + s.x * du;
    let dd = 0.5 * (dxu * s.r + xu * dr);
    let off = dk * p + s.k * dp;
    Ok(Matrix2::new(dp, off, off, dp * (xu - 1.0) + p * dxu + dd))
}

/// Central finite difference of the steady state in `A` with relative step `rel`.
pub fn steady_state_derivative_fd(
    params: &RabiParams,
    diss: &DissipationParams,
    which: Estimand,
    rel: f64,
) -> Result<Matrix2<f64>> {
    let a = params.frequency(which);
    let h = rel * a;
    let hi = steady_state(&params.with_frequency(which, a + 0.5 * h)?, diss)?;
    let lo = steady_state(&params.with_frequency(which, a - 0.5 * h)?, diss)?;
    Ok((hi.cov() - lo.cov()) / h)
}

/// Exact steady-state QFI from the Gaussian formula.
pub fn dissipative_qfi(params: &RabiParams, diss: &DissipationParams, which: Estimand) -> Result<f64> {
    let state = steady_state(params, diss)?;
    let dstate = GaussianDerivative::of_cov(steady_state_derivative(params, diss, which)?)?;
    qfi_gaussian(&QfiInput { state, dstate })
}

/// Near-critical asymptote
/// `I_ω₀ ≃ 2Ω/(Ωκ + ω₀Γ) · ((κ² − ω₀²)/(κ² + ω₀²))² ⟨N⟩ T`.
pub fn qfi_asymptote_omega0(params: &RabiParams, diss: &DissipationParams, nbar: f64, time: f64) -> f64 {
    let (w, k, big, gam) = (params.omega0(), diss.kappa(), params.omega(), diss.spin_decay());
    let c = (k * k - w * w) / (k * k + w * w);
    2.0 * big / (big * k + w * gam) * c * c * nbar * time
}

/// `a` in the near-critical asymptote `I_Ω ≃ a T²`,
/// `a = ((Γ² − Ω²)/(Γ² + Ω²))² (κ²/Ω²)(1 + ω₀²/κ²)²`.
pub fn qfi_asymptote_omega_prefactor(params: &RabiParams, diss: &DissipationParams) -> f64 {
    let (w, k, big, gam) = (params.omega0(), diss.kappa(), params.omega(), diss.spin_decay());
    let c = (gam * gam - big * big) / (gam * gam + big * big);
    let e = 1.0 + w * w / (k * k);
    c * c * (k * k / (big * big)) * e * e
}

pub fn qfi_asymptote_omega(params: &RabiParams, diss: &DissipationParams, time: f64) -> f64 {
    qfi_asymptote_omega_prefactor(params, diss) * time * time
}
