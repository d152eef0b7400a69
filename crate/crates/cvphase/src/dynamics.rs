//! Bogoliubov evolution on power-law backgrounds, squeezing extraction,
//! power spectra, and the inverted oscillator.

use crate::error::{Error, Result};
use crate::gaussian::{reduce_angle, SqueezingParams};
use crate::numerics::ode::{integrate_ode, DenseSolution, OdeProblem};
use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::PI;

/// Power-law background a ∝ (−η)^{1+β}, with z = z_norm·(−η)^{1+β}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BackgroundModel {
    pub beta: f64,
    pub eta_ini: f64,
    pub eta_end: f64,
    pub z_norm: f64,
}

impl BackgroundModel {
    pub fn new(beta: f64, eta_ini: f64, eta_end: f64) -> Result<Self> {
        Self::with_normalization(beta, eta_ini, eta_end, 1.0)
    }

    pub fn with_normalization(beta: f64, eta_ini: f64, eta_end: f64, z_norm: f64) -> Result<Self> {
        if !beta.is_finite() {
            return Err(Error::Invalid(format!("beta must be finite, got {beta}")));
        }
        if !(eta_ini < eta_end && eta_end < 0.0) {
            return Err(Error::Invalid(format!("need eta_ini < eta_end < 0, got {eta_ini}, {eta_end}")));
        }
        if !(z_norm > 0.0) {
            return Err(Error::Invalid(format!("z normalization must be > 0, got {z_norm}")));
        }
        Ok(Self { beta, eta_ini, eta_end, z_norm })
    }

    /// De Sitter (β = −2).
    pub fn de_sitter(eta_ini: f64, eta_end: f64) -> Result<Self> {
        Self::new(-2.0, eta_ini, eta_end)
    }

    pub fn z(&self, eta: f64) -> f64 {
        self.z_norm * (-eta).powf(1.0 + self.beta)
    }

    /// z'/z = (1+β)/η.
    pub fn z_prime_over_z(&self, eta: f64) -> f64 {
        (1.0 + self.beta) / eta
    }

    /// z''/z = (1+β)β/η².
    pub fn z_second_over_z(&self, eta: f64) -> f64 {
        (1.0 + self.beta) * self.beta / (eta * eta)
    }
}

/// Bogoliubov coefficients of a mode pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BogoliubovPair {
    pub u: Complex64,
    pub v: Complex64,
}

impl BogoliubovPair {
    pub fn new(u: Complex64, v: Complex64) -> Self {
        Self { u, v }
    }

    /// |u|² − |v|².
    pub fn wronskian(&self) -> f64 {
        self.u.norm_sqr() - self.v.norm_sqr()
    }
}

/// How the squeezing angle is read off the phases of u and v.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhaseConvention {
    /// u = e^{−iθ} cosh r, v = e^{i(θ+2φ)} sinh r, so that v/u* = e^{2iφ} tanh r.
    TwoMode,
    /// u = e^{−iθ} cosh r, v = −e^{i(θ+2φ)} sinh r.
    SqueezeOperator,
}

/// r = arcsinh|v| and φ from the phases of u and v, φ in (−π/2, π/2].
pub fn squeezing_from_bogoliubov(b: BogoliubovPair, convention: PhaseConvention) -> SqueezingParams {
    let r = b.v.norm().asinh();
    if b.v.norm() == 0.0 {
        return SqueezingParams { r, phi: 0.0 };
    }
    let shift = match convention {
        PhaseConvention::TwoMode => 0.0,
        PhaseConvention::SqueezeOperator => PI,
    };
    let two_phi = reduce_angle(b.u.arg() + b.v.arg() - shift);
    SqueezingParams { r, phi: two_phi / 2.0 }
}

/// Dense Bogoliubov solution for one wavenumber.
#[derive(Debug, Clone)]
pub struct BogoliubovTrajectory {
    pub k: f64,
    pub background: BackgroundModel,
    pub solution: DenseSolution,
}

impl BogoliubovTrajectory {
    pub fn at(&self, eta: f64) -> BogoliubovPair {
        let y = self.solution.sample(eta);
        BogoliubovPair::new(Complex64::new(y[0], y[1]), Complex64::new(y[2], y[3]))
    }

    pub fn end(&self) -> BogoliubovPair {
        let y = self.solution.y_end();
        BogoliubovPair::new(Complex64::new(y[0], y[1]), Complex64::new(y[2], y[3]))
    }

    /// Accepted step boundaries.
    pub fn mesh(&self) -> Vec<f64> {
        self.solution.mesh()
    }

    /// Largest ||u|² − |v|² − 1| over the accepted steps.
    pub fn wronskian_defect(&self) -> f64 {
        self.mesh().iter().map(|&t| (self.at(t).wronskian() - 1.0).abs()).fold(0.0, f64::max)
    }

    /// zζ_k = (u + v*)/√(2k).
    pub fn mode_function(&self, eta: f64) -> Complex64 {
        let b = self.at(eta);
        (b.u + b.v.conj()) / (2.0 * self.k).sqrt()
    }

    pub fn squeezing(&self, eta: f64) -> SqueezingParams {
        squeezing_from_bogoliubov(self.at(eta), PhaseConvention::TwoMode)
    }

    /// Worst relative residual of dr/dη = (z'/z) cos 2φ and
    /// dφ/dη = −k − (z'/z) coth 2r sin 2φ, with derivatives taken by
    /// five-point differences of the extracted trajectory, over `samples`
    /// times where r exceeds `r_min`.
    pub fn squeezing_residual(&self, samples: usize, r_min: f64) -> f64 {
        let (a, b) = (self.background.eta_ini, self.background.eta_end);
        let k = self.k;
        let mut worst: f64 = 0.0;
        for i in 1..samples {
            // log-spaced in −η
            let eta = -((-a).ln() + (i as f64 / samples as f64) * ((-b).ln() - (-a).ln())).exp();
            let g = self.background.z_prime_over_z(eta);
            let h = 1e-3 / (k + g.abs());
            if eta - 2.0 * h < a || eta + 2.0 * h > b {
                continue;
            }
            let p0 = self.squeezing(eta);
            if p0.r < r_min {
                continue;
            }
            let pts: Vec<SqueezingParams> = [-2.0, -1.0, 1.0, 2.0].iter().map(|s| self.squeezing(eta + s * h)).collect();
            let d5 = |f: &dyn Fn(&SqueezingParams) -> f64| {
                (f(&pts[0]) - 8.0 * f(&pts[1]) + 8.0 * f(&pts[2]) - f(&pts[3])) / (12.0 * h)
            };
            let dr = d5(&|p: &SqueezingParams| p.r);
            // unwrap φ relative to the centre, which lives modulo π
            let unwrap = |phi: f64| {
                let mut d = phi - p0.phi;
                d -= PI * (d / PI).round();
                p0.phi + d
            };
            let dphi = d5(&|p: &SqueezingParams| unwrap(p.phi));
            let (s2, c2) = (2.0 * p0.phi).sin_cos();
            let coth = 1.0 / (2.0 * p0.r).tanh();
            let rhs_r = g * c2;
            let rhs_phi = -k - g * coth * s2;
            let scale_r = g.abs().max(1e-300);
            let scale_phi = k + (g * coth).abs();
            worst = worst.max((dr - rhs_r).abs() / scale_r).max((dphi - rhs_phi).abs() / scale_phi);
        }
        worst
    }

    /// Worst relative residual of (zζ)'' + (k² − z''/z)(zζ) = 0 under
    /// second differences.
    pub fn mode_equation_residual(&self, samples: usize) -> f64 {
        let (a, b) = (self.background.eta_ini, self.background.eta_end);
        let k = self.k;
        let mut worst: f64 = 0.0;
        for i in 1..samples {
            let eta = -((-a).ln() + (i as f64 / samples as f64) * ((-b).ln() - (-a).ln())).exp();
            let w2 = k * k - self.background.z_second_over_z(eta);
            let h = 1e-2 / w2.abs().sqrt().max(1e-300);
            let h = h.min(0.01 * eta.abs());
            if eta - 2.0 * h < a || eta + 2.0 * h > b {
                continue;
            }
            let f = |t: f64| self.mode_function(t);
            let second = (-f(eta - 2.0 * h) + 16.0 * f(eta - h) - 30.0 * f(eta) + 16.0 * f(eta + h) - f(eta + 2.0 * h))
                / (12.0 * h * h);
            let term = f(eta) * w2;
            let scale = second.norm().max(term.norm()).max(1e-300);
            worst = worst.max((second + term).norm() / scale);
        }
        worst
    }
}

/// Integrates iu' = ku + i(z'/z)v*, iv' = kv + i(z'/z)u* from u = 1, v = 0
/// at η_ini to η_end.
pub fn evolve_bogoliubov(bg: &BackgroundModel, k: f64, tol: f64) -> Result<BogoliubovTrajectory> {
    if !(k > 0.0 && k.is_finite()) {
        return Err(Error::Invalid(format!("wavenumber must be > 0, got {k}")));
    }
    if !(tol > 0.0 && tol <= 1e-8) {
        return Err(Error::Invalid(format!("tolerance must be in (0, 1e-8], got {tol}")));
    }
    let bgc = *bg;
    let problem = OdeProblem::new(vec![1.0, 0.0, 0.0, 0.0], (bg.eta_ini, bg.eta_end), move |eta, y, dy| {
        let g = bgc.z_prime_over_z(eta);
        // u = y0 + i y1, v = y2 + i y3
        dy[0] = k * y[1] + g * y[2];
        dy[1] = -k * y[0] - g * y[3];
        dy[2] = k * y[3] + g * y[0];
        dy[3] = -k * y[2] - g * y[1];
    });
    // local tolerance tightened so the global Wronskian drift stays below 10·tol
    let local = (tol * 1e-3).max(2e-14);
    let solution = integrate_ode(&problem, local, local)?;
    Ok(BogoliubovTrajectory { k, background: *bg, solution })
}

/// Curvature-perturbation mode at the end of the run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeRecord {
    pub k: f64,
    /// |ζ_k|² at η_end.
    pub zeta_mod2: f64,
    pub squeeze: SqueezingParams,
}

/// Default tolerance of the mode-function runs.
pub const DEFAULT_TOLERANCE: f64 = 1e-10;

pub fn mode_function(bg: &BackgroundModel, k: f64) -> Result<ModeRecord> {
    let tr = evolve_bogoliubov(bg, k, DEFAULT_TOLERANCE)?;
    let zz = tr.mode_function(bg.eta_end);
    let z = bg.z(bg.eta_end);
    let zeta_mod2 = zz.norm_sqr() / (z * z);
    if !zeta_mod2.is_finite() {
        return Err(Error::NonFinite(bg.eta_end));
    }
    Ok(ModeRecord { k, zeta_mod2, squeeze: squeezing_from_bogoliubov(tr.end(), PhaseConvention::TwoMode) })
}

/// One point of P_ζ(k) = k³|ζ_k|²/(2π²).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumPoint {
    pub k: f64,
    pub p_zeta: f64,
    /// k|η_ini| > 10.
    pub sub_hubble_start: bool,
    /// k|η_end| < 0.1.
    pub super_hubble_end: bool,
}

pub fn power_spectrum(bg: &BackgroundModel, k_list: &[f64]) -> Result<Vec<SpectrumPoint>> {
    if k_list.len() < 2 {
        return Err(Error::Invalid("power spectrum needs at least two wavenumbers".into()));
    }
    let (lo, hi) = k_list.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &k| (a.min(k), b.max(k)));
    if !(hi / lo >= 10.0 - 1e-9) {
        return Err(Error::Invalid(format!("wavenumbers span {:.3} decades, need at least 1", (hi / lo).log10())));
    }
    k_list
        .par_iter()
        .map(|&k| {
            let m = mode_function(bg, k)?;
            Ok(SpectrumPoint {
                k,
                p_zeta: k.powi(3) * m.zeta_mod2 / (2.0 * PI * PI),
                sub_hubble_start: k * bg.eta_ini.abs() > 10.0,
                super_hubble_end: k * bg.eta_end.abs() < 0.1,
            })
        })
        .collect()
}

/// n_s from the least-squares slope of ln P against ln k: P ∝ k^{n_s − 1}.
pub fn spectral_index(points: &[SpectrumPoint]) -> Result<f64> {
    if points.len() < 2 {
        return Err(Error::Invalid("need at least two spectrum points".into()));
    }
    let xs: Vec<f64> = points.iter().map(|p| p.k.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.p_zeta.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return Err(Error::Invalid("all wavenumbers equal".into()));
    }
    Ok(1.0 + sxy / sxx)
}

/// Log-spaced wavenumbers, `per_decade` per decade, from k_min to k_max.
pub fn log_spaced(k_min: f64, k_max: f64, per_decade: usize) -> Vec<f64> {
    let decades = (k_max / k_min).log10();
    let n = ((decades * per_decade as f64).ceil() as usize).max(1);
    (0..=n).map(|i| k_min * 10f64.powf(decades * i as f64 / n as f64)).collect()
}

/// Inverted oscillator after time t: r = ωt, φ = −π/4.
pub fn inverted_oscillator_state(omega: f64, t: f64) -> Result<SqueezingParams> {
    if !(t >= 0.0) {
        return Err(Error::Invalid(format!("time must be >= 0, got {t}")));
    }
    if !omega.is_finite() {
        return Err(Error::Invalid(format!("omega must be finite, got {omega}")));
    }
    Ok(SqueezingParams { r: omega * t, phi: -PI / 4.0 })
}

/// Closed-form inverted-oscillator pair u = cosh ωt, v = i sinh ωt.
pub fn inverted_oscillator_pair(omega: f64, t: f64) -> BogoliubovPair {
    BogoliubovPair::new(Complex64::new((omega * t).cosh(), 0.0), Complex64::new(0.0, (omega * t).sinh()))
}

/// Ψ(q) = [π cosh 2r]^{−1/4} exp[−q²/(2cosh 2r) + (i/2)q² tanh 2r − (i/2)arctan(tanh r)].
pub fn onemode_wavefunction(r: f64, q: f64) -> Result<Complex64> {
    check_r(r)?;
    let ch = (2.0 * r).cosh();
    let amp = (PI * ch).powf(-0.25) * (-q * q / (2.0 * ch)).exp();
    let phase = 0.5 * q * q * (2.0 * r).tanh() - 0.5 * r.tanh().atan();
    Ok(Complex64::from_polar(amp, phase))
}

/// |C ∂_q S / ∂_q C| = sinh 2r.
pub fn wkb_quality(r: f64) -> Result<f64> {
    check_r(r)?;
    Ok((2.0 * r).sinh())
}

/// (1/π) e^{−q²/cosh 2r} e^{−cosh 2r (p − q tanh 2r)²}.
pub fn onemode_wigner(r: f64, q: f64, p: f64) -> Result<f64> {
    check_r(r)?;
    let ch = (2.0 * r).cosh();
    let d = p - q * (2.0 * r).tanh();
    Ok((-q * q / ch).exp() * (-ch * d * d).exp() / PI)
}

/// ε = 1/(4 cosh 2r).
pub fn delta_eps_width(r: f64) -> Result<f64> {
    check_r(r)?;
    Ok(1.0 / (4.0 * (2.0 * r).cosh()))
}

/// |C(q)|² δ_ε(p − q tanh 2r) with δ_ε(x) = e^{−x²/(4ε)}/(2√(πε)).
pub fn delta_eps_representation(r: f64, q: f64, p: f64) -> Result<f64> {
    let eps = delta_eps_width(r)?;
    let ch = (2.0 * r).cosh();
    let c2 = (PI * ch).powf(-0.5) * (-q * q / ch).exp();
    let x = p - q * (2.0 * r).tanh();
    Ok(c2 * (-x * x / (4.0 * eps)).exp() / (2.0 * (PI * eps).sqrt()))
}

fn check_r(r: f64) -> Result<()> {
    if !(r >= 0.0 && r.is_finite()) {
        return Err(Error::Invalid(format!("r must be finite and >= 0, got {r}")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::quadrature::integrate_real_line;

    // exact de Sitter solution fitted to the initial data: α f + β f*
    fn de_sitter_oracle(k: f64, eta_ini: f64) -> impl Fn(f64) -> Complex64 {
        let i = Complex64::i();
        let f = move |eta: f64| (-i * k * eta).exp() * (1.0 - i / (k * eta)) / (2.0 * k).sqrt();
        let df = move |eta: f64| {
            (-i * k * eta).exp() * (-i * k * (1.0 - i / (k * eta)) + i / (k * eta * eta)) / (2.0 * k).sqrt()
        };
        // initial zζ = 1/√(2k), (zζ)' = (−ik + z'/z)/√(2k) with z'/z = −1/η
        let y0 = Complex64::new(1.0 / (2.0 * k).sqrt(), 0.0);
        let dy0 = (-i * k - 1.0 / eta_ini) / (2.0 * k).sqrt();
        let (a, b, c, d) = (f(eta_ini), f(eta_ini).conj(), df(eta_ini), df(eta_ini).conj());
        let det = a * d - b * c;
        let alpha = (y0 * d - b * dy0) / det;
        let beta = (a * dy0 - c * y0) / det;
        move |eta| alpha * f(eta) + beta * f(eta).conj()
    }

    #[test]
    fn flat_space_is_free() {
        let bg = BackgroundModel::new(-1.0, -50.0, -0.1).unwrap();
        let tr = evolve_bogoliubov(&bg, 2.0, 1e-10).unwrap();
        for &eta in &[-40.0, -10.0, -0.1] {
            let b = tr.at(eta);
            let want = Complex64::from_polar(1.0, -2.0 * (eta + 50.0));
            assert!((b.u - want).norm() < 1e-7, "{eta}: {} vs {want}", b.u);
            assert_eq!(b.v.norm(), 0.0);
            assert_eq!(tr.squeezing(eta).r, 0.0);
        }
    }

    #[test]
    fn de_sitter_matches_exact_solution() {
        let k = 1.0;
        let bg = BackgroundModel::de_sitter(-100.0, -0.01).unwrap();
        let tr = evolve_bogoliubov(&bg, k, 1e-10).unwrap();
        let oracle = de_sitter_oracle(k, -100.0);
        for &eta in &[-90.0, -10.0, -1.0, -0.1, -0.01] {
            let got = tr.mode_function(eta);
            let want = oracle(eta);
            assert!((got - want).norm() < 1e-5 * want.norm(), "{eta}: {got} vs {want}");
        }
        assert!(tr.wronskian_defect() < 1e-9);
        let early = tr.at(-90.0).v.norm_sqr();
        let late = tr.at(-0.01).v.norm_sqr();
        assert!(early < 1e-3 && late > 100.0);
    }

    #[test]
    fn early_plane_wave_and_late_freeze() {
        let k = 1.0;
        // u = 1, v = 0 differs from the Bunch-Davies mode at O(1/(2kη_ini))
        let bg = BackgroundModel::de_sitter(-20000.0, -0.001).unwrap();
        let tr = evolve_bogoliubov(&bg, k, 1e-10).unwrap();
        for &eta in &[-15000.0, -10000.0] {
            assert!((tr.mode_function(eta).norm() * (2.0 * k).sqrt() - 1.0).abs() < 1e-4);
        }
        let zeta = |eta: f64| tr.mode_function(eta).norm() / bg.z(eta);
        assert!((zeta(-0.01) / zeta(-0.001) - 1.0).abs() < 1e-3);
    }

    #[test]
    fn wronskian_within_ten_tolerances() {
        for &(beta, k) in &[(-2.0, 3.0), (-2.02, 0.5), (-1.5, 1.0)] {
            let bg = BackgroundModel::new(beta, -200.0, -0.005).unwrap();
            let tol = 1e-8;
            let tr = evolve_bogoliubov(&bg, k, tol).unwrap();
            assert!(tr.wronskian_defect() < 10.0 * tol, "beta={beta}");
        }
    }

    #[test]
    fn squeezing_odes_hold() {
        let bg = BackgroundModel::de_sitter(-100.0, -0.01).unwrap();
        let tr = evolve_bogoliubov(&bg, 1.0, 1e-10).unwrap();
        let res = tr.squeezing_residual(200, 1e-3);
        assert!(res < 1e-4, "residual {res}");
    }

    #[test]
    fn mode_equation_holds() {
        let bg = BackgroundModel::new(-2.1, -100.0, -0.01).unwrap();
        let tr = evolve_bogoliubov(&bg, 1.0, 1e-10).unwrap();
        let res = tr.mode_equation_residual(200);
        assert!(res < 1e-4, "residual {res}");
    }

    #[test]
    fn extraction_examples() {
        let p = squeezing_from_bogoliubov(BogoliubovPair::new(Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)), PhaseConvention::TwoMode);
        assert_eq!(p.r, 0.0);
        let b = inverted_oscillator_pair(1.0, 1.0);
        let so = squeezing_from_bogoliubov(b, PhaseConvention::SqueezeOperator);
        assert!((so.r - 1.0).abs() < 1e-14 && (so.phi + PI / 4.0).abs() < 1e-14);
        let tm = squeezing_from_bogoliubov(b, PhaseConvention::TwoMode);
        assert!((tm.phi - PI / 4.0).abs() < 1e-14);
        for &r in &[0.1f64, 1.0, 4.0] {
            let b = BogoliubovPair::new(Complex64::from_polar(r.cosh(), -0.3), Complex64::from_polar(r.sinh(), 1.1));
            let p = squeezing_from_bogoliubov(b, PhaseConvention::TwoMode);
            assert!((p.r.sinh() - r.sinh()).abs() < 1e-12 * r.sinh());
            // θ = 0.3, θ + 2φ = 1.1
            assert!((p.phi - 0.4).abs() < 1e-12);
        }
    }

    #[test]
    fn extracted_state_reproduces_mode_moments() {
        // |zζ|² from (u, v) against the TMSS second moments of (r, φ)
        let bg = BackgroundModel::de_sitter(-100.0, -0.05).unwrap();
        let tr = evolve_bogoliubov(&bg, 1.0, 1e-10).unwrap();
        for &eta in &[-50.0, -2.0, -0.05] {
            let p = tr.squeezing(eta);
            let st = crate::gaussian::covariance_from_squeezing(p);
            let zeta = crate::weyl::zeta_classical(1, 1.0).unwrap();
            let zz = zeta.mul(&crate::weyl::PhasePolynomial::new(
                zeta.terms().map(|(c, e)| (c.conj(), e)),
            ).unwrap()).unwrap();
            let moment = crate::weyl::stochastic_average(&zz, &st).unwrap().re;
            // ⟨|zζ|²⟩ = |u + v*|²/(2k) with the k = 1 normalization
            let want = tr.mode_function(eta).norm_sqr();
            assert!((moment - want).abs() < 1e-8 * want.max(1.0), "{eta}: {moment} vs {want}");
        }
    }

    #[test]
    fn inverted_oscillator_examples() {
        assert_eq!(inverted_oscillator_state(1.0, 0.0).unwrap().r, 0.0);
        let s = inverted_oscillator_state(1.0, 2.0).unwrap();
        assert_eq!(s.r, 2.0);
        let b = squeezing_from_bogoliubov(inverted_oscillator_pair(1.0, 2.0), PhaseConvention::SqueezeOperator);
        assert!((b.r - s.r).abs() < 1e-14 && (b.phi - s.phi).abs() < 1e-14);
        assert!(inverted_oscillator_state(1.0, -1.0).is_err());
    }

    #[test]
    fn spectrum_examples() {
        let ks = log_spaced(1.0, 10f64.powf(1.5), 8);
        let bg = BackgroundModel::de_sitter(-1000.0, -0.01 / ks.last().unwrap()).unwrap();
        let pts = power_spectrum(&bg, &ks).unwrap();
        assert!(pts.iter().all(|p| p.sub_hubble_start && p.super_hubble_end));
        let ns = spectral_index(&pts).unwrap();
        assert!((ns - 1.0).abs() < 0.01, "n_s = {ns}");

        let red = BackgroundModel::new(-2.02, bg.eta_ini, bg.eta_end).unwrap();
        let ns = spectral_index(&power_spectrum(&red, &ks).unwrap()).unwrap();
        // P ∝ k^{2β+4}
        assert!(ns - 1.0 < 0.0 && (ns - 1.0 + 0.04).abs() < 0.01, "n_s = {ns}");

        let doubled = BackgroundModel::with_normalization(-2.0, -100.0, -0.01, 2.0).unwrap();
        let base = BackgroundModel::de_sitter(-100.0, -0.01).unwrap();
        let a = power_spectrum(&base, &[1.0, 10.0]).unwrap();
        let b = power_spectrum(&doubled, &[1.0, 10.0]).unwrap();
        assert!((b[0].p_zeta / a[0].p_zeta - 0.25).abs() < 1e-12);
        assert!(power_spectrum(&base, &[1.0, 2.0]).is_err());
    }

    #[test]
    fn onemode_examples() {
        let psi = onemode_wavefunction(0.0, 0.7).unwrap();
        assert!((psi - Complex64::new(PI.powf(-0.25) * (-0.245f64).exp(), 0.0)).norm() < 1e-15);
        for &r in &[0.0f64, 1.0, 3.0] {
            let n = integrate_real_line(|q| onemode_wavefunction(r, q).unwrap().norm_sqr(), 0.0, (2.0 * r).cosh().sqrt(), 1e-14).unwrap();
            assert!((n - 1.0).abs() < 1e-10);
            let p0 = onemode_wavefunction(r, 0.0).unwrap().norm_sqr();
            assert!((p0 - (PI * (2.0 * r).cosh()).powf(-0.5)).abs() < 1e-14);
        }
        assert_eq!(wkb_quality(0.0).unwrap(), 0.0);
        assert!((wkb_quality(1.0).unwrap() - 3.626860407847019).abs() < 1e-12);
        assert!((wkb_quality(5.0).unwrap() - 11013.23287).abs() < 1e-4);
        assert!((onemode_wigner(0.0, 0.0, 0.0).unwrap() - 1.0 / PI).abs() < 1e-16);
        assert_eq!(delta_eps_width(0.0).unwrap(), 0.25);
        assert!(delta_eps_width(10.0).unwrap() < 1e-8);
    }

    #[test]
    fn wigner_ridge_and_delta_form() {
        let r = 2.0f64;
        let t = (2.0 * r).tanh();
        for &q in &[-1.0, 0.5, 2.0] {
            let on = onemode_wigner(r, q, q * t).unwrap();
            assert!(on > onemode_wigner(r, q, q * t + 0.05).unwrap());
            assert!(on > onemode_wigner(r, q, q * t - 0.05).unwrap());
        }
        let mut s = 12345u64;
        let mut next = || {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (s >> 11) as f64 / (1u64 << 53) as f64 * 8.0 - 4.0
        };
        for _ in 0..100 {
            let (q, p) = (next(), next());
            let a = onemode_wigner(r, q, p).unwrap();
            let b = delta_eps_representation(r, q, p).unwrap();
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn wigner_matches_definition_quadrature() {
        let r = 1.0;
        let st = crate::fock::state_from_wavefunction(|q| onemode_wavefunction(r, q).unwrap(), 160, 30.0).unwrap();
        for &(q, p) in &[(0.0, 0.0), (0.8, 0.5), (-1.5, -1.0), (2.0, 2.4)] {
            let num = crate::fock::wigner_numeric(&st, q, p).unwrap();
            let exact = onemode_wigner(r, q, p).unwrap();
            assert!((num - exact).abs() < 1e-6, "({q},{p}): {num} vs {exact}");
        }
    }
}
