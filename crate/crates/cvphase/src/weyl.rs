//! Weyl symbols of polynomial observables, Gaussian (stochastic) averages
//! and their quantum counterparts.
//!
//! Variables are ordered (q_k, π_k, q_−k, π_−k). Quantum averages and the
//! plain stochastic average use k = 1.

use crate::error::{Error, Result};
use crate::fock::{required_truncation, OperatorMatrix, TmssAmplitudes, MAX_TRUNCATION};
use crate::gaussian::{GaussianState, PhasePoint, SqueezingParams};
use crate::numerics::quadrature::composite_nodes;
use crate::numerics::special::hermite_functions_into;
use nalgebra::{DMatrix, Matrix4};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use std::collections::BTreeMap;

pub const MAX_DEGREE: u32 = 8;

/// Tail weight allowed when truncating the state for quantum averages.
pub const QUANTUM_TAIL: f64 = 1e-14;

type Exponents = [u32; 4];

/// Polynomial in (q_k, π_k, q_−k, π_−k) with complex coefficients.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PhasePolynomial {
    terms: BTreeMap<Exponents, Complex64>,
}

fn degree_of(e: &Exponents) -> u32 {
    e.iter().sum()
}

impl PhasePolynomial {
    /// Merges duplicate exponent tuples; rejects total degree above 8.
    pub fn new(terms: impl IntoIterator<Item = (Complex64, Exponents)>) -> Result<Self> {
        let mut p = Self::default();
        for (c, e) in terms {
            if degree_of(&e) > MAX_DEGREE {
                return Err(Error::Invalid(format!("monomial {e:?} exceeds degree {MAX_DEGREE}")));
            }
            *p.terms.entry(e).or_default() += c;
        }
        p.prune();
        Ok(p)
    }

    pub fn constant(c: Complex64) -> Self {
        Self::new([(c, [0; 4])]).unwrap()
    }

    pub fn one() -> Self {
        Self::constant(Complex64::new(1.0, 0.0))
    }

    /// The coordinate with index `i` (0..4).
    pub fn variable(i: usize) -> Self {
        let mut e = [0; 4];
        e[i] = 1;
        Self::new([(Complex64::new(1.0, 0.0), e)]).unwrap()
    }

    fn prune(&mut self) {
        self.terms.retain(|_, c| *c != Complex64::new(0.0, 0.0));
    }

    pub fn terms(&self) -> impl Iterator<Item = (Complex64, Exponents)> + '_ {
        self.terms.iter().map(|(e, c)| (*c, *e))
    }

    pub fn coefficient(&self, e: Exponents) -> Complex64 {
        self.terms.get(&e).copied().unwrap_or_default()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(degree_of).max().unwrap_or(0)
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            *out.terms.entry(*e).or_default() += c;
        }
        out.prune();
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let mut out = Self { terms: self.terms.iter().map(|(e, c)| (*e, c * s)).collect() };
        out.prune();
        out
    }

    /// Commutative product; errors if the degree bound is exceeded.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        let mut out = Self::default();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e = [ea[0] + eb[0], ea[1] + eb[1], ea[2] + eb[2], ea[3] + eb[3]];
                if degree_of(&e) > MAX_DEGREE {
                    return Err(Error::Invalid(format!("product exceeds degree {MAX_DEGREE}")));
                }
                *out.terms.entry(e).or_default() += ca * cb;
            }
        }
        out.prune();
        Ok(out)
    }

    pub fn pow(&self, n: u32) -> Result<Self> {
        let mut out = Self::one();
        for _ in 0..n {
            out = out.mul(self)?;
        }
        Ok(out)
    }

    /// ∂/∂x_i.
    pub fn derivative(&self, i: usize) -> Self {
        let mut out = Self::default();
        for (e, c) in &self.terms {
            if e[i] > 0 {
                let mut f = *e;
                f[i] -= 1;
                *out.terms.entry(f).or_default() += c * e[i] as f64;
            }
        }
        out.prune();
        out
    }

    pub fn evaluate(&self, x: &[f64; 4]) -> Complex64 {
        self.terms
            .iter()
            .map(|(e, c)| c * (0..4).map(|i| x[i].powi(e[i] as i32)).product::<f64>())
            .sum()
    }

    /// Largest |Im| over the coefficients.
    pub fn max_imaginary(&self) -> f64 {
        self.terms.values().map(|c| c.im.abs()).fold(0.0, f64::max)
    }

    /// Largest coefficient difference to `other`.
    pub fn distance(&self, other: &Self) -> f64 {
        self.sub(other).terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    // a ⋆ x_k for a coordinate x_k
    fn star_linear(&self, k: usize) -> Self {
        let j = crate::gaussian::SymplecticForm::matrix();
        let mut out = Self::default();
        for (e, c) in &self.terms {
            let mut f = *e;
            f[k] += 1;
            *out.terms.entry(f).or_default() += c;
        }
        for i in 0..4 {
            if j[(i, k)] != 0.0 {
                let d = self.derivative(i).scale(Complex64::new(0.0, 0.5 * j[(i, k)]));
                out = out.add(&d);
            }
        }
        out.prune();
        out
    }
}

/// One of the four canonical operators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Quadrature {
    Qk,
    Pk,
    Qmk,
    Pmk,
}

impl Quadrature {
    pub const ALL: [Quadrature; 4] = [Quadrature::Qk, Quadrature::Pk, Quadrature::Qmk, Quadrature::Pmk];

    pub fn index(self) -> usize {
        self as usize
    }

    /// Mode 0 for k, 1 for −k.
    pub fn mode(self) -> usize {
        self.index() / 2
    }

    pub fn is_position(self) -> bool {
        self.index() % 2 == 0
    }
}

/// Linear combination of ordered products of q̂_k, π̂_k, q̂_−k, π̂_−k.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct OrderedOperatorExpr {
    pub terms: Vec<(Complex64, Vec<Quadrature>)>,
}

impl OrderedOperatorExpr {
    pub fn new(terms: Vec<(Complex64, Vec<Quadrature>)>) -> Result<Self> {
        if let Some((_, f)) = terms.iter().find(|(_, f)| f.len() > MAX_DEGREE as usize) {
            return Err(Error::Invalid(format!("operator product of length {} exceeds {MAX_DEGREE}", f.len())));
        }
        Ok(Self { terms })
    }

    pub fn identity() -> Self {
        Self { terms: vec![(Complex64::new(1.0, 0.0), vec![])] }
    }

    pub fn monomial(factors: &[Quadrature]) -> Result<Self> {
        Self::new(vec![(Complex64::new(1.0, 0.0), factors.to_vec())])
    }

    pub fn degree(&self) -> usize {
        self.terms.iter().map(|(_, f)| f.len()).max().unwrap_or(0)
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        Self { terms }
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self { terms: self.terms.iter().map(|(c, f)| (c * s, f.clone())).collect() }
    }

    /// Operator product self·other.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for (ca, fa) in &self.terms {
            for (cb, fb) in &other.terms {
                let mut f = fa.clone();
                f.extend_from_slice(fb);
                terms.push((ca * cb, f));
            }
        }
        Self::new(terms)
    }

    /// Hermitian conjugate.
    pub fn adjoint(&self) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .map(|(c, f)| (c.conj(), f.iter().rev().copied().collect()))
                .collect(),
        }
    }
}

/// Weyl symbol of an ordered operator expression, built factor by factor
/// with a ⋆ x_k = a x_k + (i/2) Σ_j ∂_j a J_jk.
pub fn weyl_transform(expr: &OrderedOperatorExpr) -> Result<PhasePolynomial> {
    let mut total = PhasePolynomial::default();
    for (c, factors) in &expr.terms {
        if factors.len() > MAX_DEGREE as usize {
            return Err(Error::Invalid(format!("operator product of length {} exceeds {MAX_DEGREE}", factors.len())));
        }
        let mut sym = PhasePolynomial::constant(*c);
        for f in factors {
            sym = sym.star_linear(f.index());
        }
        total = total.add(&sym);
    }
    Ok(total)
}

/// (zζ̂_k)ⁿ = 2^{−n}[q̂_k + q̂_−k + (i/k)(π̂_k − π̂_−k)]ⁿ expanded in order.
pub fn zeta_composite(n: u32, k: f64) -> Result<OrderedOperatorExpr> {
    if !(1..=4).contains(&n) {
        return Err(Error::Range(format!("zeta power {n} outside 1..=4")));
    }
    if !(k > 0.0) {
        return Err(Error::Invalid(format!("wavenumber must be > 0, got {k}")));
    }
    let lin = OrderedOperatorExpr::new(vec![
        (Complex64::new(0.5, 0.0), vec![Quadrature::Qk]),
        (Complex64::new(0.5, 0.0), vec![Quadrature::Qmk]),
        (Complex64::new(0.0, 0.5 / k), vec![Quadrature::Pk]),
        (Complex64::new(0.0, -0.5 / k), vec![Quadrature::Pmk]),
    ])?;
    let mut out = lin.clone();
    for _ in 1..n {
        out = out.mul(&lin)?;
    }
    Ok(out)
}

/// The commutative counterpart 2^{−n}[q_k + q_−k + (i/k)(π_k − π_−k)]ⁿ.
pub fn zeta_classical(n: u32, k: f64) -> Result<PhasePolynomial> {
    let lin = PhasePolynomial::new([
        (Complex64::new(0.5, 0.0), [1, 0, 0, 0]),
        (Complex64::new(0.5, 0.0), [0, 0, 1, 0]),
        (Complex64::new(0.0, 0.5 / k), [0, 1, 0, 0]),
        (Complex64::new(0.0, -0.5 / k), [0, 0, 0, 1]),
    ])?;
    lin.pow(n)
}

// Σ over perfect pairings of Π cov[a][b]
fn hafnian(idx: &mut Vec<usize>, cov: &Matrix4<f64>) -> f64 {
    if idx.is_empty() {
        return 1.0;
    }
    let first = idx.remove(0);
    let mut total = 0.0;
    for j in 0..idx.len() {
        let c = cov[(first, idx[j])];
        if c != 0.0 {
            let partner = idx.remove(j);
            total += c * hafnian(idx, cov);
            idx.insert(j, partner);
        }
    }
    idx.insert(0, first);
    total
}

/// Gaussian moment ⟨x_0^{e0} x_1^{e1} x_2^{e2} x_3^{e3}⟩ under covariance γ/2.
pub fn gaussian_moment(e: Exponents, s: &GaussianState) -> f64 {
    if degree_of(&e) % 2 == 1 {
        return 0.0;
    }
    let cov = s.covariance / 2.0;
    let mut idx: Vec<usize> = (0..4).flat_map(|i| std::iter::repeat_n(i, e[i] as usize)).collect();
    hafnian(&mut idx, &cov)
}

/// ∫ O W over the Gaussian Wigner function, by pairwise contraction.
pub fn stochastic_average(poly: &PhasePolynomial, s: &GaussianState) -> Result<Complex64> {
    if poly.degree() > MAX_DEGREE {
        return Err(Error::Invalid(format!("degree {} exceeds {MAX_DEGREE}", poly.degree())));
    }
    Ok(poly.terms().map(|(c, e)| c * gaussian_moment(e, s)).sum())
}

/// Stochastic average of a polynomial in physical variables at wavenumber
/// `k`, for a state whose γ is given in the dimensionless variables.
pub fn stochastic_average_at(poly: &PhasePolynomial, s: &GaussianState, k: f64) -> Result<Complex64> {
    if !(k > 0.0) {
        return Err(Error::Invalid(format!("wavenumber must be > 0, got {k}")));
    }
    if poly.degree() > MAX_DEGREE {
        return Err(Error::Invalid(format!("degree {} exceeds {MAX_DEGREE}", poly.degree())));
    }
    Ok(poly
        .terms()
        .map(|(c, e)| {
            let power = (-(e[0] as i32) + e[1] as i32 - e[2] as i32 + e[3] as i32) as f64 / 2.0;
            c * k.powf(power) * gaussian_moment(e, s)
        })
        .sum())
}

// Two-mode amplitudes restricted to the band |n_k − n_−k| ≤ width.
struct BandVector {
    dim: usize,
    width: usize,
    data: Vec<Complex64>,
}

impl BandVector {
    fn from_tmss(t: &TmssAmplitudes, width: usize) -> Self {
        let dim = t.coefficients.len() + width;
        let mut v = Self { dim, width, data: vec![Complex64::default(); dim * (2 * width + 1)] };
        for (n, c) in t.coefficients.iter().enumerate() {
            *v.at_mut(n, n) = *c;
        }
        v
    }

    fn slot(&self, n: usize, m: usize) -> usize {
        n * (2 * self.width + 1) + (m + self.width - n)
    }

    fn at_mut(&mut self, n: usize, m: usize) -> &mut Complex64 {
        let i = self.slot(n, m);
        &mut self.data[i]
    }

    fn at(&self, n: usize, m: usize) -> Complex64 {
        self.data[self.slot(n, m)]
    }

    fn in_band(&self, n: usize, m: usize) -> bool {
        n < self.dim && m < self.dim && n.abs_diff(m) <= self.width
    }

    fn apply(&self, q: Quadrature) -> Self {
        let mut out = Self { dim: self.dim, width: self.width, data: vec![Complex64::default(); self.data.len()] };
        let s = std::f64::consts::FRAC_1_SQRT_2;
        // q̂ = (ĉ + ĉ†)/√2, π̂ = −i(ĉ − ĉ†)/√2
        let (lower, raise) = if q.is_position() {
            (Complex64::new(s, 0.0), Complex64::new(s, 0.0))
        } else {
            (Complex64::new(0.0, -s), Complex64::new(0.0, s))
        };
        for n in 0..self.dim {
            let lo = n.saturating_sub(self.width);
            let hi = (n + self.width).min(self.dim - 1);
            for m in lo..=hi {
                let a = self.at(n, m);
                if a == Complex64::default() {
                    continue;
                }
                let (occ, other) = if q.mode() == 0 { (n, m) } else { (m, n) };
                let pos = |o: usize| if q.mode() == 0 { (o, other) } else { (other, o) };
                if occ > 0 {
                    let (i, j) = pos(occ - 1);
                    if out.in_band(i, j) {
                        *out.at_mut(i, j) += lower * (occ as f64).sqrt() * a;
                    }
                }
                let (i, j) = pos(occ + 1);
                if out.in_band(i, j) {
                    *out.at_mut(i, j) += raise * ((occ + 1) as f64).sqrt() * a;
                }
            }
        }
        out
    }

    fn inner(&self, other: &Self) -> Complex64 {
        self.data.iter().zip(&other.data).map(|(a, b)| a.conj() * b).sum()
    }
}

/// ⟨Ψ|Ô|Ψ⟩ on the two-mode squeezed state (k = 1), through the Fock oracle
/// truncated so that the discarded weight is below 1e-14.
pub fn quantum_average(expr: &OrderedOperatorExpr, p: SqueezingParams) -> Result<Complex64> {
    let n = required_truncation(p.r, QUANTUM_TAIL);
    if n > MAX_TRUNCATION {
        return Err(Error::Truncation { needed: n, got: MAX_TRUNCATION });
    }
    quantum_average_truncated(expr, p, n)
}

/// As [`quantum_average`] with an explicit truncation `n`.
pub fn quantum_average_truncated(expr: &OrderedOperatorExpr, p: SqueezingParams, n: usize) -> Result<Complex64> {
    let deg = expr.degree();
    if deg > MAX_DEGREE as usize {
        return Err(Error::Invalid(format!("operator degree {deg} exceeds {MAX_DEGREE}")));
    }
    let state = TmssAmplitudes::truncated(p, n);
    // the band and padding hold every level reachable in `deg` steps
    let psi = BandVector::from_tmss(&state, deg.max(1));
    let mut total = Complex64::default();
    for (c, factors) in &expr.terms {
        let mut v = BandVector { dim: psi.dim, width: psi.width, data: psi.data.clone() };
        for f in factors.iter().rev() {
            v = v.apply(*f);
        }
        total += c * psi.inner(&v);
    }
    Ok(total)
}

/// Dense matrix of a single-mode (mode k only) expression at truncation `n`.
///
/// Products of truncated ladder matrices are exact on levels below n − degree.
pub fn single_mode_matrix(expr: &OrderedOperatorExpr, n: usize) -> Result<OperatorMatrix> {
    let (q, p) = crate::fock::position_momentum_matrices(n)?;
    let mut total = DMatrix::<Complex64>::zeros(n + 1, n + 1);
    for (c, factors) in &expr.terms {
        let mut m = DMatrix::<Complex64>::identity(n + 1, n + 1);
        for f in factors {
            m = match f {
                Quadrature::Qk => m * &q.entries,
                Quadrature::Pk => m * &p.entries,
                _ => return Err(Error::Invalid("single_mode_matrix takes mode-k factors only".into())),
            };
        }
        total += m * *c;
    }
    Ok(OperatorMatrix { entries: total, hermitian: false })
}

// C∞ step: 1 for t ≤ 0, 0 for t ≥ 1
fn smooth_step(t: f64) -> f64 {
    if t <= 0.0 {
        return 1.0;
    }
    if t >= 1.0 {
        return 0.0;
    }
    let a = (-1.0 / (1.0 - t)).exp();
    let b = (-1.0 / t).exp();
    a / (a + b)
}

/// ∫dx e^{−ipx}⟨q+x/2|Ô|q−x/2⟩ for a Fock-basis matrix.
///
/// A sharp cut at level N leaves an O(1) oscillating residue everywhere in
/// phase space, so the matrix is first rolled off smoothly between levels
/// N/10 and 9N/10. Polynomial operators then converge faster than any power
/// of N for q² + p² well inside N/5; discontinuous ones such as sign(q̂)
/// converge algebraically and need larger N.
pub fn weyl_symbol_numeric(op: &OperatorMatrix, q: f64, p: f64) -> Result<Complex64> {
    Ok(weyl_symbol_numeric_row(op, q, &[p])?[0])
}

/// [`weyl_symbol_numeric`] at fixed q for several p; the position kernel
/// is shared, so a row costs about as much as a single point.
pub fn weyl_symbol_numeric_row(op: &OperatorMatrix, q: f64, ps: &[f64]) -> Result<Vec<Complex64>> {
    let d = op.dim();
    if d < 2 {
        return Err(Error::Dimension("operator needs at least two levels".into()));
    }
    let n = d - 1;
    let (start, width) = (0.1 * n as f64, 0.8 * n as f64);
    let w: Vec<f64> = (0..d).map(|i| smooth_step((i as f64 - start) / width)).collect();
    let keep = w.iter().rposition(|x| *x > 0.0).unwrap_or(0) + 1;
    let o_re = DMatrix::from_fn(keep, keep, |i, j| op.entries[(i, j)].re * w[i] * w[j]);
    let o_im = DMatrix::from_fn(keep, keep, |i, j| op.entries[(i, j)].im * w[i] * w[j]);
    let half = 2.0 * (crate::fock::position_extent(keep) + q.abs());
    let panels = half.ceil() as usize;
    let (xs, ws) = composite_nodes(-half, half, panels, 64);
    let mut plus = DMatrix::<f64>::zeros(keep, xs.len());
    let mut minus = DMatrix::<f64>::zeros(keep, xs.len());
    let mut buf = vec![0.0; keep];
    for (c, x) in xs.iter().enumerate() {
        hermite_functions_into(q + x / 2.0, &mut buf);
        plus.column_mut(c).copy_from_slice(&buf);
        hermite_functions_into(q - x / 2.0, &mut buf);
        minus.column_mut(c).copy_from_slice(&buf);
    }
    // ⟨q+x/2|O|q−x/2⟩ for every node, real and imaginary parts separately
    let column_dots = |o: &DMatrix<f64>| -> Vec<f64> {
        if o.iter().all(|v| *v == 0.0) {
            return vec![0.0; xs.len()];
        }
        let om = o * &minus;
        om.component_mul(&plus).row_sum().iter().copied().collect()
    };
    let k_re = column_dots(&o_re);
    let k_im = column_dots(&o_im);
    Ok(ps
        .iter()
        .map(|p| {
            let mut acc = Complex64::default();
            for (c, (x, wt)) in xs.iter().zip(&ws).enumerate() {
                acc += Complex64::new(k_re[c], k_im[c]) * Complex64::from_polar(*wt, -p * x);
            }
            acc
        })
        .collect())
}

/// Random linear combination of up to `max_terms` ordered products of
/// degree ≤ `max_degree`, with coefficients uniform in the unit square.
pub fn random_expression<R: rand::Rng>(rng: &mut R, max_degree: usize, max_terms: usize) -> Result<OrderedOperatorExpr> {
    if max_terms == 0 || max_degree > MAX_DEGREE as usize {
        return Err(Error::Invalid(format!("need 1 <= terms and degree <= {MAX_DEGREE}")));
    }
    let terms = rng.random_range(1..=max_terms);
    let mut out = Vec::with_capacity(terms);
    for _ in 0..terms {
        let deg = rng.random_range(0..=max_degree);
        let factors = (0..deg).map(|_| Quadrature::ALL[rng.random_range(0..4)]).collect();
        let c = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        out.push((c, factors));
    }
    OrderedOperatorExpr::new(out)
}

/// Draws `count` points from the Gaussian with covariance γ/2.
pub fn sample_wigner(s: &GaussianState, count: usize, seed: u64) -> Result<Vec<PhasePoint>> {
    if count == 0 {
        return Err(Error::Invalid("sample count must be >= 1".into()));
    }
    let chol = (s.covariance / 2.0).cholesky().ok_or(Error::Singular)?;
    let l = chol.l();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..count)
        .map(|_| {
            let z = nalgebra::Vector4::from_fn(|_, _| StandardNormal.sample(&mut rng));
            let x: nalgebra::Vector4<f64> = l * z;
            PhasePoint([x[0], x[1], x[2], x[3]])
        })
        .collect())
}
