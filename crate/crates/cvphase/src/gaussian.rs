//! Gaussian-state core for the two-mode squeezed vacuum.
//!
//! Phase-space vectors use the dimensionless ordering
//! (√k q_k, π_k/√k, √k q_−k, π_−k/√k).

use crate::error::{Error, Result};
use nalgebra::{Matrix4, SymmetricEigen};
use num_complex::Complex64;
use std::f64::consts::PI;

/// Squeezing magnitude and angle of a mode pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SqueezingParams {
    pub r: f64,
    pub phi: f64,
}

impl SqueezingParams {
    /// Validates `r` and reduces `phi` to (−π, π].
    pub fn new(r: f64, phi: f64) -> Result<Self> {
        if !r.is_finite() || r < 0.0 {
            return Err(Error::Invalid(format!("squeezing r must be finite and >= 0, got {r}")));
        }
        if !phi.is_finite() {
            return Err(Error::Invalid(format!("squeezing angle must be finite, got {phi}")));
        }
        Ok(Self { r, phi: reduce_angle(phi) })
    }

    pub fn vacuum() -> Self {
        Self { r: 0.0, phi: 0.0 }
    }
}

/// Maps an angle to (−π, π].
pub fn reduce_angle(a: f64) -> f64 {
    let mut x = a % (2.0 * PI);
    if x <= -PI {
        x += 2.0 * PI;
    } else if x > PI {
        x -= 2.0 * PI;
    }
    x
}

/// The block-diagonal symplectic form J.
#[derive(Debug, Clone, Copy)]
pub struct SymplecticForm;

impl SymplecticForm {
    pub fn matrix() -> Matrix4<f64> {
        Matrix4::new(
            0.0, 1.0, 0.0, 0.0, //
            -1.0, 0.0, 0.0, 0.0, //
            0.0, 0.0, 0.0, 1.0, //
            0.0, 0.0, -1.0, 0.0,
        )
    }
}

/// Point of the 4-dimensional phase space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhasePoint(pub [f64; 4]);

impl PhasePoint {
    /// Dimensionless point from physical coordinates at wavenumber `k`.
    pub fn from_physical(k: f64, q_k: f64, pi_k: f64, q_mk: f64, pi_mk: f64) -> Self {
        let s = k.sqrt();
        Self([s * q_k, pi_k / s, s * q_mk, pi_mk / s])
    }

    fn vector(&self) -> nalgebra::Vector4<f64> {
        nalgebra::Vector4::from_column_slice(&self.0)
    }
}

/// Zero-mean Gaussian state described by its covariance matrix γ.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianState {
    pub covariance: Matrix4<f64>,
}

impl GaussianState {
    /// Checks symmetry and the uncertainty relation γ + iJ ⪰ 0.
    pub fn new(covariance: Matrix4<f64>) -> Result<Self> {
        let asym = (covariance - covariance.transpose()).abs().max();
        if asym > 1e-12 * covariance.abs().max().max(1.0) {
            return Err(Error::Invalid(format!("covariance not symmetric (max asymmetry {asym:e})")));
        }
        let s = Self { covariance };
        let lo = s.min_uncertainty_eigenvalue();
        if lo < -1e-10 * covariance.abs().max().max(1.0) {
            return Err(Error::Invalid(format!("γ + iJ has eigenvalue {lo:e} < 0")));
        }
        Ok(s)
    }

    pub fn vacuum() -> Self {
        Self { covariance: Matrix4::identity() }
    }

    pub fn determinant(&self) -> f64 {
        self.covariance.determinant()
    }

    /// Smallest eigenvalue of the Hermitian matrix γ + iJ, via its real
    /// 8×8 embedding [[A, −B], [B, A]].
    pub fn min_uncertainty_eigenvalue(&self) -> f64 {
        let a = self.covariance;
        let b = SymplecticForm::matrix();
        let mut m = nalgebra::DMatrix::<f64>::zeros(8, 8);
        for i in 0..4 {
            for j in 0..4 {
                m[(i, j)] = a[(i, j)];
                m[(i + 4, j + 4)] = a[(i, j)];
                m[(i, j + 4)] = -b[(i, j)];
                m[(i + 4, j)] = b[(i, j)];
            }
        }
        SymmetricEigen::new(m).eigenvalues.min()
    }
}

/// γ of the two-mode squeezed vacuum.
pub fn covariance_from_squeezing(p: SqueezingParams) -> GaussianState {
    let ch = (2.0 * p.r).cosh();
    let c = (2.0 * p.r).sinh() * (2.0 * p.phi).cos();
    let s = (2.0 * p.r).sinh() * (2.0 * p.phi).sin();
    GaussianState {
        covariance: Matrix4::new(
            ch, 0.0, c, s, //
            0.0, ch, s, -c, //
            c, s, ch, 0.0, //
            s, -c, 0.0, ch,
        ),
    }
}

/// χ(ξ) = exp(−ξᵀγξ/4).
pub fn characteristic_function(s: &GaussianState, xi: &PhasePoint) -> f64 {
    let v = xi.vector();
    (-(v.transpose() * s.covariance * v)[0] / 4.0).exp()
}

/// W(x) = exp(−xᵀγ⁻¹x)/(π²√det γ).
pub fn wigner_gaussian(s: &GaussianState, x: &PhasePoint) -> Result<f64> {
    let inv = s.covariance.try_inverse().ok_or(Error::Singular)?;
    let det = s.determinant();
    if det <= 0.0 {
        return Err(Error::Singular);
    }
    // condition number from the symmetric spectrum
    let eig = SymmetricEigen::new(s.covariance).eigenvalues;
    let (lo, hi) = (eig.min(), eig.max());
    if lo <= 0.0 || hi / lo > 1e12 {
        return Err(Error::Singular);
    }
    let v = x.vector();
    Ok((-(v.transpose() * inv * v)[0]).exp() / (PI * PI * det.sqrt()))
}

/// Closed-form two-mode squeezed Wigner function in physical variables.
///
/// The sin 2φ term couples q_k with π_−k and π_k with q_−k, which is
/// what γ⁻¹ produces.
pub fn wigner_tmss_explicit(p: SqueezingParams, k: f64, q_k: f64, pi_k: f64, q_mk: f64, pi_mk: f64) -> f64 {
    let ch = (2.0 * p.r).cosh();
    let sh = (2.0 * p.r).sinh();
    let (s2, c2) = (2.0 * p.phi).sin_cos();
    let expo = -(k * q_k * q_k + k * q_mk * q_mk + pi_k * pi_k / k + pi_mk * pi_mk / k) * ch
        + 2.0 * (q_k * pi_mk + pi_k * q_mk) * s2 * sh
        + 2.0 * (k * q_k * q_mk - pi_k * pi_mk / k) * c2 * sh;
    expo.exp() / (PI * PI)
}

/// ⟨R_i R_j⟩ = γ_ij/2 + iJ_ij/2.
pub fn second_moments(s: &GaussianState) -> Matrix4<Complex64> {
    let j = SymplecticForm::matrix();
    Matrix4::from_fn(|a, b| Complex64::new(s.covariance[(a, b)] / 2.0, j[(a, b)] / 2.0))
}

/// Position and momentum variances (1/(2R²), R²/2) of a one-mode squeezed
/// Gaussian with width parameter R.
pub fn onemode_dispersions(big_r: f64) -> Result<(f64, f64)> {
    if !(big_r > 0.0) {
        return Err(Error::Invalid(format!("R must be > 0, got {big_r}")));
    }
    Ok((1.0 / (2.0 * big_r * big_r), big_r * big_r / 2.0))
}

/// Per-mode position variance (1 + R⁴)/(4R²) of the two-mode squeezed state.
pub fn twomode_marginal_dispersion(big_r: f64) -> Result<f64> {
    if !(big_r > 0.0) {
        return Err(Error::Invalid(format!("R must be > 0, got {big_r}")));
    }
    Ok((1.0 + big_r.powi(4)) / (4.0 * big_r * big_r))
}

/// Squeezing in decibels, 20 r / ln 10.
pub fn squeezing_db(r: f64) -> Result<f64> {
    if !(r >= 0.0) {
        return Err(Error::Invalid(format!("r must be >= 0, got {r}")));
    }
    Ok(20.0 * r / std::f64::consts::LN_10)
}
