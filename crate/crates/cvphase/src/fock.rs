//! Truncated Fock-basis oracle: ladder matrices, two-mode squeezed vectors,
//! expectations, partial traces and Wigner functions from the definition.

use crate::error::{Error, Result};
use crate::gaussian::SqueezingParams;
use crate::numerics::quadrature::composite_nodes;
use crate::numerics::special::hermite_functions_into;
use nalgebra::DMatrix;
use num_complex::Complex64;
use std::f64::consts::PI;

/// Largest truncation the default rule will pick.
pub const MAX_TRUNCATION: usize = 600;

/// Tail criterion for the default truncation.
pub const TAIL_TOLERANCE: f64 = 1e-10;

/// Amplitudes in the number basis of one mode, or of two modes with index
/// n_k·(N+1) + n_−k.
#[derive(Debug, Clone, PartialEq)]
pub struct FockVector {
    pub amplitudes: Vec<Complex64>,
    pub truncation: usize,
    pub modes: usize,
    /// Probability weight discarded by the truncation, before renormalizing.
    pub tail_bound: f64,
}

impl FockVector {
    pub fn single(amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::Invalid("empty amplitude list".into()));
        }
        let n = amplitudes.len() - 1;
        let mut v = Self { amplitudes, truncation: n, modes: 1, tail_bound: 0.0 };
        v.normalize()?;
        Ok(v)
    }

    /// Number state |n⟩ in a space truncated at `truncation`.
    pub fn number_state(n: usize, truncation: usize) -> Self {
        let mut a = vec![Complex64::new(0.0, 0.0); truncation + 1];
        a[n] = Complex64::new(1.0, 0.0);
        Self { amplitudes: a, truncation, modes: 1, tail_bound: 0.0 }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    fn normalize(&mut self) -> Result<()> {
        let n = self.norm();
        if !(n > 0.0) {
            return Err(Error::Invalid("zero vector".into()));
        }
        for a in &mut self.amplitudes {
            *a /= n;
        }
        Ok(())
    }

    /// Amplitude of |n_k, n_−k⟩.
    pub fn two_mode(&self, nk: usize, nmk: usize) -> Complex64 {
        self.amplitudes[nk * (self.truncation + 1) + nmk]
    }
}

/// Dense operator on one mode ((N+1)²) or two modes ((N+1)⁴ entries).
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix {
    pub entries: DMatrix<Complex64>,
    pub hermitian: bool,
}

impl OperatorMatrix {
    pub fn new(entries: DMatrix<Complex64>, hermitian: bool) -> Result<Self> {
        if entries.nrows() != entries.ncols() {
            return Err(Error::Dimension(format!("{}x{} operator", entries.nrows(), entries.ncols())));
        }
        let m = Self { entries, hermitian };
        if hermitian && m.hermiticity_defect() > 1e-10 {
            return Err(Error::Invalid(format!("operator flagged Hermitian has defect {:e}", m.hermiticity_defect())));
        }
        Ok(m)
    }

    pub fn from_real(entries: DMatrix<f64>, hermitian: bool) -> Result<Self> {
        Self::new(entries.map(|x| Complex64::new(x, 0.0)), hermitian)
    }

    pub fn identity(dim: usize) -> Self {
        Self { entries: DMatrix::identity(dim, dim), hermitian: true }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    /// max |M − M†|.
    pub fn hermiticity_defect(&self) -> f64 {
        let d = &self.entries - self.entries.adjoint();
        d.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self { entries: &self.entries * &other.entries, hermitian: false }
    }

    /// Kronecker product, first factor acting on mode k.
    pub fn kron(&self, other: &Self) -> Self {
        Self { entries: self.entries.kronecker(&other.entries), hermitian: self.hermitian && other.hermitian }
    }
}

/// ĉ with ⟨n−1|ĉ|n⟩ = √n.
pub fn annihilation_matrix(n: usize) -> Result<OperatorMatrix> {
    if n < 1 {
        return Err(Error::Invalid("truncation N must be >= 1".into()));
    }
    let mut m = DMatrix::zeros(n + 1, n + 1);
    for k in 1..=n {
        m[(k - 1, k)] = Complex64::new((k as f64).sqrt(), 0.0);
    }
    Ok(OperatorMatrix { entries: m, hermitian: false })
}

/// q̂ = (ĉ + ĉ†)/√2 and π̂ = −i(ĉ − ĉ†)/√2.
pub fn position_momentum_matrices(n: usize) -> Result<(OperatorMatrix, OperatorMatrix)> {
    let c = annihilation_matrix(n)?.entries;
    let cd = c.adjoint();
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let q = (&c + &cd) * Complex64::new(s, 0.0);
    let p = (&c - &cd) * Complex64::new(0.0, -s);
    Ok((OperatorMatrix { entries: q, hermitian: true }, OperatorMatrix { entries: p, hermitian: true }))
}

/// ĉ†ĉ.
pub fn number_matrix(n: usize) -> OperatorMatrix {
    let mut m = DMatrix::zeros(n + 1, n + 1);
    for k in 0..=n {
        m[(k, k)] = Complex64::new(k as f64, 0.0);
    }
    OperatorMatrix { entries: m, hermitian: true }
}

/// Smallest N with tanh^{2(N+1)} r below `tol`.
pub fn required_truncation(r: f64, tol: f64) -> usize {
    let t2 = r.tanh().powi(2);
    if t2 == 0.0 {
        return 1;
    }
    if t2 >= 1.0 {
        return usize::MAX;
    }
    let n1 = (tol.ln() / t2.ln()).floor() as usize + 1;
    n1.saturating_sub(1).max(1)
}

/// Default truncation for squeezing `r` under the 1e-10 tail rule.
pub fn default_truncation(r: f64) -> Result<usize> {
    let n = required_truncation(r, TAIL_TOLERANCE);
    if n > MAX_TRUNCATION {
        return Err(Error::Truncation { needed: n, got: MAX_TRUNCATION });
    }
    Ok(n)
}

/// Amplitudes e^{2inφ} tanhⁿ r / cosh r of the two-mode squeezed state on
/// the diagonal |n, n⟩, for n = 0..=N, renormalized.
#[derive(Debug, Clone, PartialEq)]
pub struct TmssAmplitudes {
    pub coefficients: Vec<Complex64>,
    pub tail_bound: f64,
}

impl TmssAmplitudes {
    /// Truncates at `n` whatever the tail; the discarded weight is recorded.
    pub fn truncated(p: SqueezingParams, n: usize) -> Self {
        let t = p.r.tanh();
        let ch = p.r.cosh();
        let coefficients: Vec<Complex64> = (0..=n)
            .map(|k| Complex64::from_polar(t.powi(k as i32) / ch, 2.0 * k as f64 * p.phi))
            .collect();
        let tail_bound = t.powi(2 * (n as i32 + 1));
        let norm = coefficients.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        Self { coefficients: coefficients.into_iter().map(|c| c / norm).collect(), tail_bound }
    }

    pub fn truncation(&self) -> usize {
        self.coefficients.len() - 1
    }

    /// ⟨Ψ| A ⊗ B |Ψ⟩ for single-mode matrices of matching size.
    pub fn product_expectation(&self, a: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<Complex64> {
        let d = self.coefficients.len();
        if a.nrows() != d || b.nrows() != d || a.ncols() != d || b.ncols() != d {
            return Err(Error::Dimension(format!("state has {d} levels, operators {}x{} and {}x{}", a.nrows(), a.ncols(), b.nrows(), b.ncols())));
        }
        let c = &self.coefficients;
        let mut s = Complex64::new(0.0, 0.0);
        for n in 0..d {
            let mut row = Complex64::new(0.0, 0.0);
            for m in 0..d {
                let w = a[(n, m)] * b[(n, m)];
                if w != 0.0 {
                    row += c[m] * w;
                }
            }
            s += c[n].conj() * row;
        }
        Ok(s)
    }

    /// Embeds into the full two-mode vector.
    pub fn to_vector(&self) -> FockVector {
        let n = self.truncation();
        let d = n + 1;
        let mut a = vec![Complex64::new(0.0, 0.0); d * d];
        for (k, c) in self.coefficients.iter().enumerate() {
            a[k * d + k] = *c;
        }
        FockVector { amplitudes: a, truncation: n, modes: 2, tail_bound: self.tail_bound }
    }
}

/// Two-mode squeezed vector truncated at `n`, which must satisfy the
/// 1e-10 tail rule.
pub fn tmss_vector(p: SqueezingParams, n: usize) -> Result<FockVector> {
    let needed = required_truncation(p.r, TAIL_TOLERANCE);
    if n < needed {
        return Err(Error::Truncation { needed, got: n });
    }
    Ok(TmssAmplitudes::truncated(p, n).to_vector())
}

/// ⟨Ψ|Ô|Ψ⟩.
pub fn expectation(state: &FockVector, op: &OperatorMatrix) -> Result<Complex64> {
    let d = state.dim();
    if op.dim() != d {
        return Err(Error::Dimension(format!("state dimension {d}, operator dimension {}", op.dim())));
    }
    let mut s = Complex64::new(0.0, 0.0);
    for i in 0..d {
        let mut row = Complex64::new(0.0, 0.0);
        for j in 0..d {
            row += op.entries[(i, j)] * state.amplitudes[j];
        }
        s += state.amplitudes[i].conj() * row;
    }
    Ok(s)
}

/// ⟨Ψ| A ⊗ B |Ψ⟩ with single-mode A on mode k and B on mode −k, without
/// forming the Kronecker product.
pub fn expectation_product(state: &FockVector, a: &OperatorMatrix, b: &OperatorMatrix) -> Result<Complex64> {
    if state.modes != 2 {
        return Err(Error::Invalid("product expectation needs a two-mode state".into()));
    }
    let d = state.truncation + 1;
    if a.dim() != d || b.dim() != d {
        return Err(Error::Dimension(format!("mode dimension {d}, operators {} and {}", a.dim(), b.dim())));
    }
    let c = DMatrix::from_row_slice(d, d, &state.amplitudes);
    // (A C Bᵀ)_ij = Σ A_ik C_kl B_jl
    let acb = &a.entries * &c * b.entries.transpose();
    Ok(c.iter().zip(acb.iter()).map(|(x, y)| x.conj() * y).sum())
}

/// Occupation probabilities of mode k after tracing out mode −k.
pub fn partial_trace_mode(state: &FockVector) -> Result<Vec<f64>> {
    if state.modes != 2 {
        return Err(Error::Invalid("partial trace needs a two-mode state".into()));
    }
    let d = state.truncation + 1;
    Ok((0..d)
        .map(|n| (0..d).map(|m| state.amplitudes[n * d + m].norm_sqr()).sum())
        .collect())
}

/// Reduced density matrix of mode k.
pub fn reduced_density_matrix(state: &FockVector) -> Result<OperatorMatrix> {
    if state.modes != 2 {
        return Err(Error::Invalid("reduced density matrix needs a two-mode state".into()));
    }
    let d = state.truncation + 1;
    let c = DMatrix::from_row_slice(d, d, &state.amplitudes);
    Ok(OperatorMatrix { entries: &c * c.adjoint(), hermitian: true })
}

/// φ_n(q) = H_n(q) e^{−q²/2} / (π^{1/4} √(2ⁿ n!)), n ≤ 100.
pub fn hermite_wavefunction(n: usize, q: f64) -> Result<f64> {
    if n > 100 {
        return Err(Error::Range(format!("hermite_wavefunction order {n} exceeds 100")));
    }
    let mut buf = vec![0.0; n + 1];
    hermite_functions_into(q, &mut buf);
    Ok(buf[n])
}

/// Half-width of the region holding the Hermite functions up to order `n`.
pub fn position_extent(n: usize) -> f64 {
    ((2 * n + 1) as f64).sqrt() + 7.0
}

/// Projects a wavefunction onto |0⟩…|N⟩ by quadrature and renormalizes.
pub fn state_from_wavefunction<F: Fn(f64) -> Complex64>(psi: F, n: usize, half_width: f64) -> Result<FockVector> {
    let panels = (2.0 * half_width).ceil() as usize;
    let (xs, ws) = composite_nodes(-half_width, half_width, panels.max(1), 64);
    let mut amps = vec![Complex64::new(0.0, 0.0); n + 1];
    let mut phi = vec![0.0; n + 1];
    for (x, w) in xs.iter().zip(&ws) {
        hermite_functions_into(*x, &mut phi);
        let v = psi(*x) * *w;
        for k in 0..=n {
            amps[k] += v * phi[k];
        }
    }
    let raw: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
    let mut s = FockVector::single(amps)?;
    s.tail_bound = (1.0 - raw).max(0.0);
    Ok(s)
}

fn wigner_grid(n: usize, q: f64) -> (Vec<f64>, Vec<f64>) {
    // |q ± x/2| must cover the support of φ_0..φ_N
    let half = 2.0 * (position_extent(n) + q.abs());
    let panels = (half).ceil() as usize;
    composite_nodes(-half, half, panels, 64)
}

/// W(q, p) = (1/2π) ∫ dx ψ(q − x/2) ψ*(q + x/2) e^{ipx} of a single-mode
/// pure state.
pub fn wigner_numeric(state: &FockVector, q: f64, p: f64) -> Result<f64> {
    if state.modes != 1 {
        return Err(Error::Invalid("wigner_numeric needs a single-mode state".into()));
    }
    let n = state.truncation;
    let (xs, ws) = wigner_grid(n, q);
    let mut phi_m = vec![0.0; n + 1];
    let mut phi_p = vec![0.0; n + 1];
    let mut acc = Complex64::new(0.0, 0.0);
    for (x, w) in xs.iter().zip(&ws) {
        hermite_functions_into(q - x / 2.0, &mut phi_m);
        hermite_functions_into(q + x / 2.0, &mut phi_p);
        let mut a = Complex64::new(0.0, 0.0);
        let mut b = Complex64::new(0.0, 0.0);
        for k in 0..=n {
            a += state.amplitudes[k] * phi_m[k];
            b += state.amplitudes[k] * phi_p[k];
        }
        acc += a * b.conj() * Complex64::from_polar(*w, p * x);
    }
    Ok(acc.re / (2.0 * PI))
}

/// Wigner function of a single-mode density matrix ρ_mn.
pub fn wigner_numeric_density(rho: &OperatorMatrix, q: f64, p: f64) -> Result<f64> {
    let d = rho.dim();
    if d < 1 {
        return Err(Error::Dimension("empty density matrix".into()));
    }
    let n = d - 1;
    let (xs, ws) = wigner_grid(n, q);
    let mut phi_m = vec![0.0; d];
    let mut phi_p = vec![0.0; d];
    let mut acc = Complex64::new(0.0, 0.0);
    for (x, w) in xs.iter().zip(&ws) {
        hermite_functions_into(q - x / 2.0, &mut phi_m);
        hermite_functions_into(q + x / 2.0, &mut phi_p);
        let mut kernel = Complex64::new(0.0, 0.0);
        for i in 0..d {
            if phi_m[i] == 0.0 {
                continue;
            }
            let mut row = Complex64::new(0.0, 0.0);
            for j in 0..d {
                row += rho.entries[(i, j)] * phi_p[j];
            }
            kernel += row * phi_m[i];
        }
        acc += kernel * Complex64::from_polar(*w, p * x);
    }
    Ok(acc.re / (2.0 * PI))
}

/// φ_n(0) and φ_n'(0) for n = 0..=n_max.
pub fn hermite_values_at_origin(n_max: usize) -> (Vec<f64>, Vec<f64>) {
    let phi = crate::numerics::special::hermite_functions(n_max + 1, 0.0);
    let d = crate::numerics::special::hermite_function_derivatives(&phi, n_max);
    (phi[..=n_max].to_vec(), d)
}

/// ∫₀^∞ φ_m φ_n dq for m ≠ n, exact through the Wronskian
/// W = φ_m φ_n' − φ_n φ_m', whose derivative is 2(m − n) φ_m φ_n.
///
/// Returns an (n_max+1)² row-major table; diagonal entries are 1/2.
pub fn half_line_overlaps(n_max: usize) -> Vec<f64> {
    let (v, d) = hermite_values_at_origin(n_max);
    let dim = n_max + 1;
    let mut out = vec![0.0; dim * dim];
    for m in 0..dim {
        for n in 0..dim {
            out[m * dim + n] = if m == n {
                0.5
            } else {
                (v[m] * d[n] - v[n] * d[m]) / (2.0 * (n as f64 - m as f64))
            };
        }
    }
    out
}

/// Matrix of sign(q̂): 2∫₀^∞ φ_m φ_n between opposite parities, else 0.
pub fn sign_position_matrix(n: usize) -> OperatorMatrix {
    let h = half_line_overlaps(n);
    let d = n + 1;
    let m = DMatrix::from_fn(d, d, |i, j| {
        let v = if (i + j) % 2 == 1 { 2.0 * h[i * d + j] } else { 0.0 };
        Complex64::new(v, 0.0)
    });
    OperatorMatrix { entries: m, hermitian: true }
}
