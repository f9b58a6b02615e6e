//! Single-mode Gaussian states in the `(x, p)` quadrature ordering with vacuum covariance ½·I.
//!
//! The symplectic form is `ω = [[0, 1], [−1, 0]]` and the purity parameter is `d = √det σ`
//! (`d = ½` for pure states).

use nalgebra::{Matrix2, Vector2};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::FockVector;

const SYMMETRY_TOL: f64 = 1e-12;
const UNCERTAINTY_TOL: f64 = 1e-12;
/// `det σ ≤ ¼ + PURE_TOL` selects the pure-state QFI branch.
pub const PURE_TOL: f64 = 1e-6;
const MONRAS_FLOOR: f64 = 1e-9;
const MAX_SQUEEZING: f64 = 20.0;

pub fn symplectic_form() -> Matrix2<f64> {
    Matrix2::new(0.0, 1.0, -1.0, 0.0)
}

fn rotation(angle: f64) -> Matrix2<f64> {
    let (s, c) = angle.sin_cos();
    Matrix2::new(c, -s, s, c)
}

fn check_symmetric(m: &Matrix2<f64>, what: &str) -> Result<()> {
    let scale = m.amax().max(1.0);
    if (m[(0, 1)] - m[(1, 0)]).abs() > SYMMETRY_TOL * scale || !m.iter().all(|v| v.is_finite()) {
        return Err(Error::Invariant(format!("{what} must be finite and symmetric, got {m:?}")));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianState {
    cov: Matrix2<f64>,
    disp: Vector2<f64>,
}

impl GaussianState {
    /// Validates symmetry and the uncertainty relation `det σ ≥ ¼`.
    pub fn new(cov: Matrix2<f64>, disp: Vector2<f64>) -> Result<Self> {
        check_symmetric(&cov, "covariance")?;
        if !disp.iter().all(|v| v.is_finite()) {
            return Err(Error::Invariant("displacement must be finite".into()));
        }
        let cov = 0.5 * (cov + cov.transpose());
        let det = cov.determinant();
        if cov[(0, 0)] <= 0.0 || det < 0.25 - UNCERTAINTY_TOL * cov.amax().powi(2).max(1.0) {
            return Err(Error::Invariant(format!("covariance violates the uncertainty relation (det = {det})")));
        }
        Ok(Self { cov, disp })
    }

    pub fn vacuum() -> Self {
        Self { cov: Matrix2::identity() * 0.5, disp: Vector2::zeros() }
    }

    pub fn thermal(nbar: f64) -> Result<Self> {
        if !(nbar >= 0.0 && nbar.is_finite()) {
            return Err(Error::Domain(format!("thermal occupation must be non-negative, got {nbar}")));
        }
        Ok(Self { cov: Matrix2::identity() * (nbar + 0.5), disp: Vector2::zeros() })
    }

    /// `S(ξ)|0⟩` for real ξ; positive ξ stretches x.
    pub fn squeezed_vacuum(xi: f64) -> Result<Self> {
        if !(xi.abs() < MAX_SQUEEZING) {
            return Err(Error::Domain(format!("|xi| must be below {MAX_SQUEEZING}, got {xi}")));
        }
        let e = (2.0 * xi).exp();
        Ok(Self { cov: Matrix2::new(0.5 * e, 0.0, 0.0, 0.5 / e), disp: Vector2::zeros() })
    }

    /// Coherent state `|α⟩`, i.e. mean `(√2 Re α, √2 Im α)`.
    pub fn coherent(alpha: Complex64) -> Self {
        Self::vacuum().displaced(alpha)
    }

    /// Applies `D(α)`.
    pub fn displaced(&self, alpha: Complex64) -> Self {
        let shift = Vector2::new(alpha.re, alpha.im) * std::f64::consts::SQRT_2;
        Self { cov: self.cov, disp: self.disp + shift }
    }

    /// Phase-space rotation by `angle` (the action of `e^{−i angle a†a}`).
    pub fn rotated(&self, angle: f64) -> Self {
        let r = rotation(angle);
        Self { cov: r * self.cov * r.transpose(), disp: r * self.disp }
    }

    pub fn cov(&self) -> &Matrix2<f64> {
        &self.cov
    }

    pub fn disp(&self) -> &Vector2<f64> {
        &self.disp
    }

    pub fn det(&self) -> f64 {
        self.cov.determinant()
    }

    /// `d = √det σ`.
    pub fn purity_parameter(&self) -> f64 {
        self.det().sqrt()
    }

    pub fn is_pure(&self, tol: f64) -> bool {
        self.det() <= 0.25 + tol
    }

    pub fn mean_photon(&self) -> f64 {
        mean_photon(self)
    }

    /// Variance of `x_φ = x cos φ + p sin φ`.
    pub fn quadrature_variance(&self, angle: f64) -> f64 {
        let u = Vector2::new(angle.cos(), angle.sin());
        (u.transpose() * self.cov * u)[(0, 0)]
    }

    pub fn quadrature_mean(&self, angle: f64) -> f64 {
        angle.cos() * self.disp.x + angle.sin() * self.disp.y
    }
}

/// `(tr σ − 1)/2 + ‖d‖²/2`.
pub fn mean_photon(state: &GaussianState) -> f64 {
    0.5 * (state.cov.trace() - 1.0) + 0.5 * state.disp.norm_squared()
}

/// Squared overlap `F(ρ₁, ρ₂) = (tr√(√ρ₁ ρ₂ √ρ₁))²` of two single-mode Gaussian states.
///
/// `F = 2 / (√(Δ + δ) − √δ) · exp(−½ Δdᵀ (σ₁+σ₂)⁻¹ Δd)` with `Δ = 4 det(σ₁+σ₂)` and
/// `δ = (4 det σ₁ − 1)(4 det σ₂ − 1)`.
pub fn fidelity(a: &GaussianState, b: &GaussianState) -> Result<f64> {
    let sum = a.cov + b.cov;
    let big = 4.0 * sum.determinant();
    let small = ((4.0 * a.det() - 1.0) * (4.0 * b.det() - 1.0)).max(0.0);
    let inv = sum
        .try_inverse()
        .ok_or_else(|| Error::Numeric("singular covariance sum in fidelity".into()))?;
    let dd = a.disp - b.disp;
    let gauss = (-0.5 * (dd.transpose() * inv * dd)[(0, 0)]).exp();
    let denom = (big + small).sqrt() - small.sqrt();
    Ok((2.0 / denom * gauss).min(1.0))
}

/// Parameter derivative of a Gaussian state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianDerivative {
    pub cov: Matrix2<f64>,
    pub disp: Vector2<f64>,
}

impl GaussianDerivative {
    pub fn new(cov: Matrix2<f64>, disp: Vector2<f64>) -> Result<Self> {
        check_symmetric(&cov, "covariance derivative")?;
        Ok(Self { cov: 0.5 * (cov + cov.transpose()), disp })
    }

    pub fn of_cov(cov: Matrix2<f64>) -> Result<Self> {
        Self::new(cov, Vector2::zeros())
    }

    pub fn zero() -> Self {
        Self { cov: Matrix2::zeros(), disp: Vector2::zeros() }
    }

    pub fn rotated(&self, angle: f64) -> Self {
        let r = rotation(angle);
        Self { cov: r * self.cov * r.transpose(), disp: r * self.disp }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QfiInput {
    pub state: GaussianState,
    pub dstate: GaussianDerivative,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QfiBranch {
    /// Pure branch when `det σ ≤ ¼ + PURE_TOL`, mixed otherwise.
    Auto,
    Pure,
    Mixed,
}

impl QfiBranch {
    pub fn select(state: &GaussianState) -> Self {
        if state.is_pure(PURE_TOL) {
            QfiBranch::Pure
        } else {
            QfiBranch::Mixed
        }
    }
}

pub fn qfi_gaussian(input: &QfiInput) -> Result<f64> {
    qfi_gaussian_branch(input, QfiBranch::Auto)
}

/// Zero-mean Gaussian QFI.
///
/// Mixed: `8/(16d⁴ − 1) · {d⁴ Tr[(σ⁻¹σ̇)²] − ¼ Tr[(σ̇ω)²]}`.
/// Pure: `¼ Tr[(σ⁻¹σ̇ₜ)²]` with `σ̇ₜ = σ̇ − ½ Tr(σ⁻¹σ̇) σ`, the purity-preserving part of
/// the derivative (the fidelity-susceptibility limit along pure states).
pub fn qfi_gaussian_branch(input: &QfiInput, branch: QfiBranch) -> Result<f64> {
    if input.dstate.disp.norm() > 0.0 {
        return Err(Error::Domain("Gaussian QFI requires a parameter-independent mean".into()));
    }
    let sigma = input.state.cov;
    let ds = input.dstate.cov;
    let inv = sigma
        .try_inverse()
        .ok_or_else(|| Error::Numeric("singular covariance".into()))?;
    let branch = match branch {
        QfiBranch::Auto => QfiBranch::select(&input.state),
        b => b,
    };
    let value = match branch {
        QfiBranch::Pure => {
            let m = inv * ds;
            let tangent = ds - sigma * (0.5 * m.trace());
            let mt = inv * tangent;
            0.25 * (mt * mt).trace()
        }
        _ => {
            let d4 = input.state.det().powi(2);
            let denom = 16.0 * d4 - 1.0;
            if denom < MONRAS_FLOOR {
                return Err(Error::PureBranch { denominator: denom });
            }
            let m = inv * ds;
            let w = ds * symplectic_form();
            8.0 / denom * (d4 * (m * m).trace() - 0.25 * (w * w).trace())
        }
    };
    Ok(value.max(0.0))
}

/// Bures finite difference `8(1 − √F(σ − h σ̇/2, σ + h σ̇/2))/h²`.
///
/// For pure inputs both endpoints are rescaled to `det = ¼`, matching the pure branch.
pub fn qfi_overlap_fd(input: &QfiInput, h: f64) -> Result<f64> {
    if !(h > 0.0) {
        return Err(Error::Domain(format!("step must be positive, got {h}")));
    }
    let pure = input.state.is_pure(PURE_TOL);
    let end = |s: f64| -> Result<GaussianState> {
        let mut cov = input.state.cov + input.dstate.cov * (0.5 * s * h);
        if pure {
            cov /= 2.0 * cov.determinant().sqrt();
        }
        GaussianState::new(cov, input.state.disp + input.dstate.disp * (0.5 * s * h))
    };
    let f = fidelity(&end(-1.0)?, &end(1.0)?)?;
    Ok(8.0 * (1.0 - f.sqrt()) / (h * h))
}

/// Homodyne Fisher information `(∂V_φ)²/(2V_φ²)` of the quadrature `x_φ`, `V_φ = uᵀσu`.
pub fn homodyne_fi_gaussian(state: &GaussianState, dstate: &GaussianDerivative, angle: f64) -> Result<f64> {
    if dstate.disp.norm() > 0.0 {
        return Err(Error::Domain("homodyne FI requires a parameter-independent mean".into()));
    }
    let u = Vector2::new(angle.cos(), angle.sin());
    let v = (u.transpose() * state.cov * u)[(0, 0)];
    if !(v > 0.0) {
        return Err(Error::Invariant(format!("non-positive quadrature variance {v}")));
    }
    let dv = (u.transpose() * dstate.cov * u)[(0, 0)];
    Ok(dv * dv / (2.0 * v * v))
}

/// Number-basis amplitudes of a pure Gaussian state `D(α) S |0⟩`, placed in the spin-down block.
///
/// The state is annihilated by `b = μ(a − α) − ν(a† − α*)` with real `μ = √(1 + n̄)` and
/// `μν = (σ_xx − σ_pp)/2 + i σ_xp`, so `c_{n+1} = [(μα − να*) c_n + ν √n c_{n−1}] / (μ √(n+1))`.
pub fn embed_in_fock(state: &GaussianState, cutoff: usize) -> Result<FockVector> {
    if (state.det() - 0.25).abs() > 1e-9 {
        return Err(Error::Domain(format!("embedding requires a pure state, det = {}", state.det())));
    }
    let c = state.cov;
    let nsq = (0.5 * (c.trace() - 1.0)).max(0.0);
    let mu = (1.0 + nsq).sqrt();
    let nu = Complex64::new(0.5 * (c[(0, 0)] - c[(1, 1)]), c[(0, 1)]) / mu;
    let alpha = Complex64::new(state.disp.x, state.disp.y) / std::f64::consts::SQRT_2;
    let lead = (-0.5 * alpha.norm_sqr() + alpha.conj() * alpha.conj() * nu / (2.0 * mu)).exp() / mu.sqrt();
    let drive = mu * alpha - nu * alpha.conj();
    let mut amps = vec![Complex64::new(0.0, 0.0); cutoff + 1];
    amps[0] = lead;
    for n in 0..cutoff {
        let prev = if n > 0 { amps[n - 1] * (n as f64).sqrt() } else { Complex64::new(0.0, 0.0) };
        amps[n + 1] = (drive * amps[n] + nu * prev) / (mu * ((n + 1) as f64).sqrt());
    }
    let norm2: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
    if 1.0 - norm2 > 1e-6 {
        return Err(Error::Cutoff(format!("cutoff {cutoff} keeps only {norm2} of the norm")));
    }
    FockVector::from_boson_amplitudes(cutoff, &amps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn squeeze_derivative(xi: f64) -> GaussianDerivative {
        let e = (2.0 * xi).exp();
        GaussianDerivative::of_cov(Matrix2::new(e, 0.0, 0.0, -1.0 / e)).unwrap()
    }

    #[test]
    fn squeezed_vacuum_values() {
        assert_eq!(GaussianState::squeezed_vacuum(0.0).unwrap(), GaussianState::vacuum());
        let s = GaussianState::squeezed_vacuum(0.41518).unwrap();
        assert_abs_diff_eq!(s.cov()[(0, 0)], 1.1471, epsilon = 1e-4);
        assert_abs_diff_eq!(s.det(), 0.25, epsilon = 1e-15);
        assert!(GaussianState::squeezed_vacuum(20.0).is_err());
    }

    #[test]
    fn photon_number_identity() {
        for k in 0..50 {
            let g: f64 = k as f64 / 50.0;
            let xi = -0.25 * (1.0 - g * g).ln();
            let s = 1.0 - g * g;
            let closed = (s.powf(-0.5) + s.sqrt() - 2.0) / 4.0;
            let n = GaussianState::squeezed_vacuum(xi).unwrap().mean_photon();
            assert_abs_diff_eq!(n, closed, epsilon = 1e-12);
            assert_abs_diff_eq!(n, xi.sinh().powi(2), epsilon = 1e-10);
        }
    }

    #[test]
    fn coherent_photon_number() {
        assert_eq!(GaussianState::vacuum().mean_photon(), 0.0);
        let c = GaussianState::coherent(Complex64::new(1.5, 0.0));
        assert_abs_diff_eq!(c.mean_photon(), 2.25, epsilon = 1e-14);
    }

    #[test]
    fn rejects_unphysical_covariance() {
        assert!(GaussianState::new(Matrix2::identity() * 0.4, Vector2::zeros()).is_err());
        assert!(GaussianState::new(Matrix2::new(1.0, 0.2, 0.1, 1.0), Vector2::zeros()).is_err());
    }

    #[test]
    fn thermal_qfi_oracle() {
        for n in [0.5, 1.0, 2.0] {
            let input = QfiInput {
                state: GaussianState::thermal(n).unwrap(),
                dstate: GaussianDerivative::of_cov(Matrix2::identity()).unwrap(),
            };
            assert_abs_diff_eq!(qfi_gaussian(&input).unwrap(), 1.0 / (n * (n + 1.0)), epsilon = 1e-12);
        }
    }

    #[test]
    fn squeezed_vacuum_qfi_is_two() {
        for xi in [0.0, 0.3, 1.2, -0.7] {
            let input = QfiInput { state: GaussianState::squeezed_vacuum(xi).unwrap(), dstate: squeeze_derivative(xi) };
            assert_eq!(QfiBranch::select(&input.state), QfiBranch::Pure);
            assert_abs_diff_eq!(qfi_gaussian(&input).unwrap(), 2.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn zero_derivative_gives_zero() {
        for state in [GaussianState::vacuum(), GaussianState::thermal(0.7).unwrap()] {
            let input = QfiInput { state, dstate: GaussianDerivative::zero() };
            assert_eq!(qfi_gaussian(&input).unwrap(), 0.0);
            assert_eq!(homodyne_fi_gaussian(&state, &GaussianDerivative::zero(), 0.3).unwrap(), 0.0);
        }
    }

    #[test]
    fn forced_mixed_branch_on_pure_state_is_rejected() {
        let input = QfiInput { state: GaussianState::vacuum(), dstate: squeeze_derivative(0.0) };
        assert!(matches!(qfi_gaussian_branch(&input, QfiBranch::Mixed), Err(Error::PureBranch { .. })));
    }

    #[test]
    fn squeezed_thermal_mixed_qfi() {
        let nu: f64 = 3.0;
        let xi = 0.4;
        let s = GaussianState::squeezed_vacuum(xi).unwrap();
        let state = GaussianState::new(s.cov() * nu, Vector2::zeros()).unwrap();
        let d = squeeze_derivative(xi);
        let dstate = GaussianDerivative::of_cov(d.cov * nu).unwrap();
        let q = qfi_gaussian(&QfiInput { state, dstate }).unwrap();
        assert_abs_diff_eq!(q, 4.0 * nu * nu / (nu * nu + 1.0), epsilon = 1e-12);
    }

    #[test]
    fn overlap_fd_matches_both_branches() {
        let mixed = QfiInput {
            state: GaussianState::thermal(1.0).unwrap(),
            dstate: GaussianDerivative::of_cov(Matrix2::identity()).unwrap(),
        };
        assert_abs_diff_eq!(qfi_overlap_fd(&mixed, 1e-4).unwrap(), 0.5, epsilon = 1e-5);
        let pure = QfiInput { state: GaussianState::squeezed_vacuum(0.5).unwrap(), dstate: squeeze_derivative(0.5) };
        assert_abs_diff_eq!(qfi_overlap_fd(&pure, 1e-4).unwrap(), 2.0, epsilon = 1e-5);
    }

    #[test]
    fn homodyne_saturates_at_zero_angle() {
        let xi = 0.8;
        let s = GaussianState::squeezed_vacuum(xi).unwrap();
        let d = squeeze_derivative(xi);
        assert_abs_diff_eq!(homodyne_fi_gaussian(&s, &d, 0.0).unwrap(), 2.0, epsilon = 1e-12);
        let diag = homodyne_fi_gaussian(&s, &d, std::f64::consts::FRAC_PI_4).unwrap();
        assert_abs_diff_eq!(diag / 2.0, (2.0 * xi).tanh().powi(2), epsilon = 1e-12);
    }

    #[test]
    fn squeezed_fidelity_is_sech() {
        let a = GaussianState::squeezed_vacuum(0.3).unwrap();
        let b = GaussianState::squeezed_vacuum(-0.5).unwrap();
        assert_abs_diff_eq!(fidelity(&a, &b).unwrap(), 1.0 / 0.8f64.cosh(), epsilon = 1e-12);
        let c1 = GaussianState::coherent(Complex64::new(0.3, 0.1));
        let c2 = GaussianState::coherent(Complex64::new(-0.2, 0.4));
        assert_abs_diff_eq!(fidelity(&c1, &c2).unwrap(), (-(0.25 + 0.09f64)).exp(), epsilon = 1e-12);
    }

    #[test]
    fn embedding_vacuum_and_parity() {
        let v = embed_in_fock(&GaussianState::vacuum(), 6).unwrap();
        assert_abs_diff_eq!(v.amplitudes()[0].re, 1.0, epsilon = 1e-15);
        assert!(v.amplitudes()[1..].iter().all(|a| a.norm() == 0.0));
        let s = embed_in_fock(&GaussianState::squeezed_vacuum(0.6).unwrap(), 120).unwrap();
        let block = s.block(crate::fock::Spin::Down);
        assert!(block.iter().skip(1).step_by(2).all(|a| a.norm() == 0.0));
        assert_abs_diff_eq!(s.mean_photon(), 0.6f64.sinh().powi(2), epsilon = 1e-7);
        assert!(embed_in_fock(&GaussianState::squeezed_vacuum(3.0).unwrap(), 10).is_err());
        assert!(embed_in_fock(&GaussianState::thermal(0.2).unwrap(), 10).is_err());
    }

    #[test]
    fn embedding_reproduces_moments() {
        let base = GaussianState::squeezed_vacuum(0.4).unwrap().rotated(0.7);
        let state = base.displaced(Complex64::new(0.8, -0.5));
        let v = embed_in_fock(&state, 150).unwrap();
        assert_abs_diff_eq!(v.norm(), 1.0, epsilon = 1e-8);
        let (mean, cov) = v.boson_moments();
        assert_abs_diff_eq!((mean - state.disp()).amax(), 0.0, epsilon = 1e-8);
        assert_abs_diff_eq!((cov - state.cov()).amax(), 0.0, epsilon = 1e-8);
    }

    fn random_state() -> impl Strategy<Value = (GaussianState, GaussianDerivative)> {
        (0.01f64..2.0, -1.5f64..1.5, 0.0f64..3.2, -2.0f64..2.0, -2.0f64..2.0, -2.0f64..2.0).prop_map(
            |(n, xi, phi, a, b, c)| {
                let sq = GaussianState::squeezed_vacuum(xi).unwrap().rotated(phi);
                let cov = sq.cov() * (2.0 * n + 1.0);
                let state = GaussianState::new(cov, Vector2::zeros()).unwrap();
                (state, GaussianDerivative::of_cov(Matrix2::new(a, b, b, c)).unwrap())
            },
        )
    }

    proptest! {
        #[test]
        fn squeezing_from_vacuum_is_pure(xi in -5.0f64..5.0, phi in -3.0f64..3.0) {
            let s = GaussianState::squeezed_vacuum(xi).unwrap().rotated(phi);
            prop_assert!((s.det() - 0.25).abs() < 1e-12 * s.cov().amax().powi(2).max(1.0));
        }

        #[test]
        fn qfi_bounds_homodyne((state, d) in random_state(), angle in 0.0f64..3.2) {
            let input = QfiInput { state, dstate: d };
            let q = qfi_gaussian(&input).unwrap();
            let f = homodyne_fi_gaussian(&state, &d, angle).unwrap();
            prop_assert!(q >= f - 1e-9 * q.max(1.0), "{} < {}", q, f);
        }

        #[test]
        fn qfi_is_rotation_invariant((state, d) in random_state(), angle in 0.0f64..6.3) {
            let q = qfi_gaussian(&QfiInput { state, dstate: d }).unwrap();
            let r = qfi_gaussian(&QfiInput { state: state.rotated(angle), dstate: d.rotated(angle) }).unwrap();
            prop_assert!((q - r).abs() <= 1e-9 * q.max(1.0));
        }
    }
}
