//! Wave-packet Wigner functions and sign-operator CHSH tests.
//!
//! Measurement times play the role of polarizer settings. Each state
//! family keeps its own time variable: Bell's letter uses τ = t1 + t2,
//! Johansen's construction uses τ = (t1 + t2)/2.

use std::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2};

use crate::error::{Error, Result};
use crate::numerics::optimize::{bisect, nelder_mead_max};
use crate::numerics::special::{airy_ai, erf};

fn positive(name: &str, x: f64) -> Result<()> {
    if !(x > 0.0 && x.is_finite()) {
        return Err(Error::Invalid(format!("{name} must be finite and > 0, got {x}")));
    }
    Ok(())
}

fn finite(name: &str, x: f64) -> Result<()> {
    if !x.is_finite() {
        return Err(Error::Invalid(format!("{name} must be finite, got {x}")));
    }
    Ok(())
}

/// Four measurement times (t1, t2, t1′, t2′).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeSettings {
    pub t1: f64,
    pub t2: f64,
    pub t1p: f64,
    pub t2p: f64,
}

impl TimeSettings {
    pub fn new(t1: f64, t2: f64, t1p: f64, t2p: f64) -> Result<Self> {
        for (n, v) in [("t1", t1), ("t2", t2), ("t1p", t1p), ("t2p", t2p)] {
            finite(n, v)?;
        }
        Ok(Self { t1, t2, t1p, t2p })
    }
}

/// E(t1,t2) + E(t1,t2′) + E(t1′,t2) − E(t1′,t2′).
pub fn chsh_combination<F: Fn(f64, f64) -> f64>(e: F, ts: &TimeSettings) -> f64 {
    e(ts.t1, ts.t2) + e(ts.t1, ts.t2p) + e(ts.t1p, ts.t2) - e(ts.t1p, ts.t2p)
}

// ---------------------------------------------------------------- cat

/// Superposition of two Gaussian packets centred at ∓q0 with common
/// momentum p0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CatParams {
    pub q0: f64,
    pub p0: f64,
    pub m: f64,
    pub omega: f64,
}

impl CatParams {
    pub fn new(q0: f64, p0: f64, m: f64, omega: f64) -> Result<Self> {
        finite("q0", q0)?;
        finite("p0", p0)?;
        positive("m", m)?;
        positive("omega", omega)?;
        let c = Self { q0, p0, m, omega };
        let n = c.normalization();
        if !n.is_finite() {
            return Err(Error::Invalid("cat superposition has zero norm".into()));
        }
        Ok(c)
    }

    /// N_CAT = [1 + e^{−mω q0²} cos(2 q0 p0)]^{−1/2}.
    pub fn normalization(&self) -> f64 {
        let mw = self.m * self.omega;
        (1.0 + (-mw * self.q0 * self.q0).exp() * (2.0 * self.q0 * self.p0).cos()).powf(-0.5)
    }
}

pub fn cat_wigner(c: &CatParams, q: f64, p: f64) -> f64 {
    let mw = c.m * c.omega;
    let n2 = c.normalization().powi(2);
    let dp = p - c.p0;
    let mom = (-dp * dp / mw).exp();
    let plus = (-mw * (q + c.q0).powi(2)).exp();
    let minus = (-mw * (q - c.q0).powi(2)).exp();
    let inter = 2.0 * (2.0 * p * c.q0).cos() * (-mw * q * q).exp();
    n2 / (2.0 * PI) * mom * (plus + minus + inter)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CatNegativity {
    pub min: f64,
    pub q: f64,
    pub p: f64,
}

/// Minimum of the cat Wigner function: 201×201 grid over ±(|q0| + 5σ)
/// and p0 ± 5σ_p, then simplex refinement from the best grid point.
pub fn cat_negativity(c: &CatParams) -> CatNegativity {
    let mw = c.m * c.omega;
    let sq = 1.0 / mw.sqrt();
    let sp = mw.sqrt();
    let qh = c.q0.abs() + 5.0 * sq;
    let n = 201;
    let mut best = CatNegativity { min: f64::INFINITY, q: 0.0, p: c.p0 };
    for i in 0..n {
        let q = -qh + 2.0 * qh * i as f64 / (n - 1) as f64;
        for j in 0..n {
            let p = c.p0 - 5.0 * sp + 10.0 * sp * j as f64 / (n - 1) as f64;
            let w = cat_wigner(c, q, p);
            if w < best.min {
                best = CatNegativity { min: w, q, p };
            }
        }
    }
    let step = 0.5 * (2.0 * qh / (n - 1) as f64).min(10.0 * sp / (n - 1) as f64);
    let res = nelder_mead_max(|x| -cat_wigner(c, x[0], x[1]), &[best.q, best.p], step, 1e-12, 1e-16, 2000);
    if -res.value < best.min {
        best = CatNegativity { min: -res.value, q: res.x[0], p: res.x[1] };
    }
    best
}

// ---------------------------------------------------------------- EPR

/// Gaussian regularization of the EPR state: width b in q1 + q2, width
/// ε in q1 − q2 + q0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EprParams {
    pub b: f64,
    pub eps: f64,
    pub q0: f64,
}

impl EprParams {
    pub fn new(b: f64, eps: f64, q0: f64) -> Result<Self> {
        positive("b", b)?;
        positive("eps", eps)?;
        finite("q0", q0)?;
        Ok(Self { b, eps, q0 })
    }

    /// Non-fatal remarks about the chosen widths.
    pub fn warnings(&self) -> Vec<String> {
        let mut w = Vec::new();
        if self.b <= self.eps {
            w.push(format!("b = {} <= eps = {}: the state is not EPR-like", self.b, self.eps));
        }
        w
    }

    /// Entries (A11, A12, A22) of the momentum quadratic form after the
    /// free shear.
    pub fn a_matrix(&self, t1: f64, t2: f64) -> [f64; 3] {
        let (b2, e2) = (self.b * self.b, self.eps * self.eps);
        let diag = b2 / 2.0 + e2 / 4.0;
        let k = 2.0 / b2 + 4.0 / e2;
        let off = b2 / 2.0 - e2 / 4.0 + (2.0 / b2 - 4.0 / e2) * t1 * t2;
        [diag + k * t1 * t1, off, diag + k * t2 * t2]
    }

    pub fn det_a(&self, t1: f64, t2: f64) -> f64 {
        let (b2, e2) = (self.b * self.b, self.eps * self.eps);
        let s = t1 + t2;
        let d = t1 - t2;
        (b2 * b2 * e2 * e2 + 64.0 * t1 * t1 * t2 * t2 + (4.0 * b2 * b2 + e2 * e2) * s * s + 4.0 * b2 * e2 * d * d)
            / (2.0 * b2 * e2)
    }
}

pub fn epr_wigner(e: &EprParams, q1: f64, q2: f64, p1: f64, p2: f64) -> f64 {
    let (b2, e2) = (e.b * e.b, e.eps * e.eps);
    let sp = p1 + p2;
    let dp = p1 - p2;
    let sq = q1 + q2;
    let dq = q1 - q2 + e.q0;
    (-b2 * sp * sp / 4.0 - sq * sq / b2 - e2 * dp * dp / 8.0 - 2.0 * dq * dq / e2).exp() / (PI * PI)
}

/// Two-time position distribution ρ(q1, q2, t1, t2).
pub fn epr_rho(e: &EprParams, q1: f64, q2: f64, t1: f64, t2: f64) -> f64 {
    let (b2, e2) = (e.b * e.b, e.eps * e.eps);
    let x = q1 + q2;
    let y = q1 - q2 + e.q0;
    let [a11, a12, a22] = e.a_matrix(t1, t2);
    let det = a11 * a22 - a12 * a12;
    let j1 = -2.0 * x * t1 / b2 - 4.0 * y * t1 / e2;
    let j2 = -2.0 * x * t2 / b2 + 4.0 * y * t2 / e2;
    let quad = (a22 * j1 * j1 - 2.0 * a12 * j1 * j2 + a11 * j2 * j2) / det;
    2.0 / (PI * det.sqrt()) * (-x * x / b2 - 2.0 * y * y / e2 + 0.5 * quad).exp()
}

/// ⟨sgn(q1 + q0/2) sgn(q2 − q0/2)⟩ at times t1, t2.
pub fn epr_correlator(e: &EprParams, t1: f64, t2: f64) -> Result<f64> {
    finite("t1", t1)?;
    finite("t2", t2)?;
    let det = e.det_a(t1, t2);
    if !(det > 0.0 && det.is_finite()) {
        return Err(Error::Singular);
    }
    let (b2, e2) = (e.b * e.b, e.eps * e.eps);
    let num = (2.0 * b2 - e2) * (1.0 - 8.0 * t1 * t2 / (b2 * e2));
    Ok(2.0 / PI * (num / (4.0 * det.sqrt())).atan())
}

pub fn epr_bell(e: &EprParams, ts: &TimeSettings) -> Result<f64> {
    let c = |a, b| epr_correlator(e, a, b);
    Ok(c(ts.t1, ts.t2)? + c(ts.t1, ts.t2p)? + c(ts.t1p, ts.t2)? - c(ts.t1p, ts.t2p)?)
}

// ---------------------------------------------------------------- Bell

/// State of Bell's letter with the normalization N² treated as a
/// number. Only a = 1 has a closed-form pipeline; other widths go
/// through [`normalized_bell_wigner`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BellStateParams {
    pub a: f64,
    pub q0: f64,
    pub n_bell_sq: f64,
}

impl BellStateParams {
    pub fn new(a: f64, q0: f64, n_bell_sq: f64) -> Result<Self> {
        positive("a", a)?;
        finite("q0", q0)?;
        positive("n_bell_sq", n_bell_sq)?;
        if a != 1.0 {
            return Err(Error::Invalid(format!(
                "the letter pipeline is defined for a = 1, got a = {a}"
            )));
        }
        Ok(Self { a, q0, n_bell_sq })
    }

    pub fn letter(q0: f64, n_bell_sq: f64) -> Result<Self> {
        Self::new(1.0, q0, n_bell_sq)
    }
}

/// Coefficient of δ(p1 + p2) in the letter's Wigner function.
pub fn bell_letter_wigner_reduced(bp: &BellStateParams, q1: f64, q2: f64, p1: f64, p2: f64) -> f64 {
    let v2 = (q1 - q2 + bp.q0).powi(2);
    let h2 = ((p1 - p2) / 2.0).powi(2);
    let poly = 11.0 / 4.0 - 5.0 * v2 + h2 + 2.0 * h2 * v2 + h2 * h2 + v2 * v2;
    bp.n_bell_sq / PI.sqrt() * (-v2).exp() * (-(p1 - p2).powi(2) / 4.0).exp() * poly
}

/// ρ(q1, q2, t1, t2) of the letter state, τ = t1 + t2.
pub fn bell_rho(bp: &BellStateParams, q1: f64, q2: f64, t1: f64, t2: f64) -> f64 {
    let tau2 = (t1 + t2).powi(2);
    let s = 1.0 + tau2;
    let v2 = (q1 - q2 + bp.q0).powi(2);
    bp.n_bell_sq * s.powf(-2.5) * (-v2 / s).exp() * (v2 * v2 + (2.0 * tau2 - 4.0) * v2 + tau2 * tau2 + 5.0 * tau2 + 4.0)
}

/// F(τ) = 1 − E = 10 N² (τ² + 2/5)/√(1 + τ²).
pub fn bell_f(bp: &BellStateParams, tau: f64) -> f64 {
    let t2 = tau * tau;
    10.0 * bp.n_bell_sq * (t2 + 0.4) / (1.0 + t2).sqrt()
}

pub fn bell_correlator(bp: &BellStateParams, t1: f64, t2: f64) -> f64 {
    1.0 - bell_f(bp, t1 + t2)
}

/// B at settings (−2x, x, 0, 3x).
pub fn bell_chsh(bp: &BellStateParams, x: f64) -> f64 {
    let ts = TimeSettings { t1: -2.0 * x, t2: x, t1p: 0.0, t2p: 3.0 * x };
    chsh_combination(|a, b| bell_correlator(bp, a, b), &ts)
}

/// (2 − B)/N² at settings (−2x, x, 0, 3x); independent of N².
pub fn bell_chsh_scaled(x: f64) -> f64 {
    let unit = BellStateParams { a: 1.0, q0: 0.0, n_bell_sq: 1.0 };
    3.0 * bell_f(&unit, x) - bell_f(&unit, 3.0 * x)
}

/// Root of 3F(x) − F(3x) on [0.5, 1.5].
pub fn bell_violation_threshold(bp: &BellStateParams) -> Result<f64> {
    bell_violation_threshold_in(bp, 0.5, 1.5)
}

pub fn bell_violation_threshold_in(bp: &BellStateParams, lo: f64, hi: f64) -> Result<f64> {
    bisect(|x| 3.0 * bell_f(bp, x) - bell_f(bp, 3.0 * x), lo, hi, 1e-14)
}

// ---------------------------------------------------------------- Johansen

/// Coherent state in (q1 − q2)/√2 times a squeezed state in q1 + q2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JohansenParams {
    pub q0: f64,
    pub p0: f64,
    pub s: f64,
    pub k: f64,
}

impl JohansenParams {
    pub fn new(q0: f64, p0: f64, s: f64, k: f64) -> Result<Self> {
        finite("q0", q0)?;
        finite("p0", p0)?;
        positive("s", s)?;
        positive("K", k)?;
        Ok(Self { q0, p0, s, k })
    }
}

pub fn johansen_wigner(j: &JohansenParams, q1: f64, q2: f64, p1: f64, p2: f64) -> f64 {
    let a = (q1 - q2) * FRAC_1_SQRT_2 - j.q0;
    let b = (p1 - p2) * FRAC_1_SQRT_2 - j.p0;
    let s2 = j.s * j.s;
    let sq = q1 + q2;
    let sp = p1 + p2;
    (-a * a - b * b - s2 * sq * sq / 2.0 - sp * sp / (2.0 * s2)).exp() / (PI * PI)
}

/// Coefficient of δ(p1 + p2) in the s → 0 form, on the slice p1 = p,
/// p2 = −p.
pub fn johansen_wigner_reduced(j: &JohansenParams, q1: f64, q2: f64, p: f64) -> f64 {
    let a = (q1 - q2) * FRAC_1_SQRT_2 - j.q0;
    let b = SQRT_2 * p - j.p0;
    j.k / PI * (-a * a - b * b).exp()
}

/// ρ(q1, q2, t1, t2) of the reduced form, τ = (t1 + t2)/2.
pub fn johansen_rho(j: &JohansenParams, q1: f64, q2: f64, t1: f64, t2: f64) -> f64 {
    let tau = 0.5 * (t1 + t2);
    let s = 1.0 + tau * tau;
    let m = j.q0 + j.p0 * tau;
    let d = (q1 - q2) * FRAC_1_SQRT_2 - m;
    j.k / (2.0 * PI).sqrt() / s.sqrt() * (-d * d / s).exp()
}

/// F_J(τ) = 2√2 K {√((1+τ²)/π) e^{−q0(τ)²/(1+τ²)} + q0(τ) erf[q0(τ)/√(1+τ²)]}.
pub fn johansen_f(j: &JohansenParams, tau: f64) -> f64 {
    let s = 1.0 + tau * tau;
    let m = j.q0 + j.p0 * tau;
    2.0 * SQRT_2 * j.k * ((s / PI).sqrt() * (-m * m / s).exp() + m * erf(m / s.sqrt()))
}

/// ⟨sgn q1 sgn q2⟩ at times t1, t2.
pub fn johansen_correlator(j: &JohansenParams, t1: f64, t2: f64) -> f64 {
    1.0 - johansen_f(j, 0.5 * (t1 + t2))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JohansenRow {
    pub x: f64,
    /// 3F(x) − F(3x), which assumes F even.
    pub naive_combo: f64,
    /// F(−x) + 2F(x) − F(3x).
    pub correct_combo: f64,
    pub two_minus_b_over_k: f64,
}

/// Both combinations plus (2 − B)/K with B evaluated at settings
/// (−4x, 2x, 0, 6x), i.e. τ = −x, x, x, 3x.
pub fn johansen_combinations(j: &JohansenParams, xs: &[f64]) -> Vec<JohansenRow> {
    xs.iter()
        .map(|&x| {
            let f = |t| johansen_f(j, t);
            let ts = TimeSettings { t1: -4.0 * x, t2: 2.0 * x, t1p: 0.0, t2p: 6.0 * x };
            let b = chsh_combination(|a, c| johansen_correlator(j, a, c), &ts);
            JohansenRow {
                x,
                naive_combo: (3.0 * f(x) - f(3.0 * x)) / j.k,
                correct_combo: (f(-x) + 2.0 * f(x) - f(3.0 * x)) / j.k,
                two_minus_b_over_k: (2.0 - b) / j.k,
            }
        })
        .collect()
}

// ---------------------------------------------------------------- normalized Bell

/// Wigner function of the normalizable Bell state
/// √(8/(11π a⁵ b)) [(q1−q2+q0)² − 2a²] e^{−(q1−q2+q0)²/(2a²)} e^{−(q1+q2)²/(2b²)}.
#[allow(clippy::too_many_arguments)]
pub fn normalized_bell_wigner(a: f64, b: f64, q0: f64, q1: f64, q2: f64, p1: f64, p2: f64) -> Result<f64> {
    positive("a", a)?;
    positive("b", b)?;
    let (a2, b2) = (a * a, b * b);
    let v2 = (q1 - q2 + q0).powi(2);
    let sp = p1 + p2;
    let dp2 = (p1 - p2).powi(2);
    let g = (-b2 * sp * sp / 4.0 - (q1 + q2).powi(2) / b2 - a2 * dp2 / 4.0 - v2 / a2).exp();
    let x = v2 / a2;
    let y = a2 * dp2 / 4.0;
    Ok(4.0 / (11.0 * PI * PI) * g * (11.0 / 4.0 + (x + y).powi(2) + y - 5.0 * x))
}

// ---------------------------------------------------------------- WKB

/// |C(q)|² δ_ε(p − ∂S/∂q) for the inverted-oscillator state, with
/// C, S the amplitude and phase of Ψ and ε = 1/(4 cosh 2r).
pub fn wkb_wigner_naive(r: f64, q: f64, p: f64) -> Result<f64> {
    let psi = crate::dynamics::onemode_wavefunction(r, q)?;
    let eps = crate::dynamics::delta_eps_width(r)?;
    let ds = q * (2.0 * r).tanh();
    let x = p - ds;
    Ok(psi.norm_sqr() * (-x * x / (4.0 * eps)).exp() / (2.0 * (PI * eps).sqrt()))
}

/// Phase-space measure factor 1/(2πħ) multiplying the Airy form.
pub const BERRY_SCALE: f64 = 1.0 / (2.0 * PI);

/// Chord geometry for H = (p² + q²)/2 at energy n + 1/2: the chord with
/// midpoint (q, p) has half-length h, and A is the circular segment cut
/// off by it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BerryChord {
    pub radius: f64,
    pub half_length: f64,
    pub area: f64,
    /// |{E(2), E(1)}| = |q2 p1 − p2 q1|.
    pub bracket: f64,
}

pub fn berry_chord(n: usize, q: f64, p: f64) -> Result<BerryChord> {
    if !(1..=30).contains(&n) {
        return Err(Error::Invalid(format!("n must be in 1..=30, got {n}")));
    }
    let big_r = (2.0 * n as f64 + 1.0).sqrt();
    let rho = q.hypot(p);
    if !(rho < big_r - 0.1) {
        return Err(Error::Domain(format!(
            "|(q, p)| = {rho} not inside the energy circle of radius {big_r} with margin 0.1"
        )));
    }
    if rho < 1e-6 {
        return Err(Error::Domain("chord undefined at the centre of the circle".into()));
    }
    let h = (big_r * big_r - rho * rho).sqrt();
    let area = big_r * big_r * (rho / big_r).acos() - rho * h;
    Ok(BerryChord { radius: big_r, half_length: h, area, bracket: 2.0 * h * rho })
}

/// Semiclassical Airy-form Wigner function of the n-th oscillator level.
pub fn berry_wigner_ho(n: usize, q: f64, p: f64) -> Result<f64> {
    let c = berry_chord(n, q, p)?;
    let z = 1.5 * c.area;
    let ai = airy_ai(-z.powf(2.0 / 3.0))?;
    Ok(BERRY_SCALE * 2.0 * SQRT_2 * z.powf(1.0 / 6.0) / c.bracket.sqrt() * ai)
}
