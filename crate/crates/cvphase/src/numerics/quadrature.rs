//! Gauss-Legendre quadrature: fixed rules, composite panels, adaptive
//! bisection and truncated infinite ranges.

use crate::error::{Error, Result};
use std::f64::consts::PI;
use std::sync::OnceLock;

/// Node count of the standard panel.
pub const PANEL: usize = 64;

/// Closed interval sampled by `n` quadrature nodes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid1D {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

impl Grid1D {
    pub fn new(lo: f64, hi: f64, n: usize) -> Result<Self> {
        if !(lo < hi) || n < 2 {
            return Err(Error::Invalid(format!("grid needs lo < hi and n >= 2, got [{lo}, {hi}], n={n}")));
        }
        Ok(Self { lo, hi, n })
    }

    /// Evenly spaced points including both ends.
    pub fn points(&self) -> Vec<f64> {
        let h = (self.hi - self.lo) / (self.n - 1) as f64;
        (0..self.n).map(|i| self.lo + h * i as f64).collect()
    }
}

/// Gauss-Legendre nodes and weights on [−1, 1].
#[derive(Debug, Clone)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussRule {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = (n + 1) / 2;
        for i in 0..m {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            dp = if d != 0.0 { d } else { dp };
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    /// Integral of `f` over [a, b] with this rule.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> Result<f64> {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut s = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            let t = mid + half * x;
            let v = f(t);
            if !v.is_finite() {
                return Err(Error::NonFinite(t));
            }
            s += w * v;
        }
        Ok(s * half)
    }

    /// Nodes and weights mapped to [a, b].
    pub fn mapped(&self, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let x = self.nodes.iter().map(|t| mid + half * t).collect();
        let w = self.weights.iter().map(|w| w * half).collect();
        (x, w)
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Shared 64-node rule.
pub fn gl64() -> &'static GaussRule {
    static RULE: OnceLock<GaussRule> = OnceLock::new();
    RULE.get_or_init(|| GaussRule::new(PANEL))
}

/// Integral over `grid` with `grid.n` nodes: a single rule up to 64 nodes,
/// otherwise equal 64-node panels.
pub fn gauss_legendre<F: FnMut(f64) -> f64>(grid: &Grid1D, mut f: F) -> Result<f64> {
    if grid.n <= PANEL {
        let rule = if grid.n == PANEL { gl64().clone() } else { GaussRule::new(grid.n) };
        return rule.integrate(grid.lo, grid.hi, f);
    }
    let panels = grid.n.div_ceil(PANEL);
    composite(grid.lo, grid.hi, panels, &mut f)
}

/// Equal-width composite 64-node rule.
pub fn composite<F: FnMut(f64) -> f64>(a: f64, b: f64, panels: usize, f: &mut F) -> Result<f64> {
    let rule = gl64();
    let h = (b - a) / panels as f64;
    let mut s = 0.0;
    for i in 0..panels {
        let lo = a + h * i as f64;
        s += rule.integrate(lo, lo + h, &mut *f)?;
    }
    Ok(s)
}

/// Nodes and weights of an equal-width composite rule with `per_panel`
/// nodes per panel.
pub fn composite_nodes(a: f64, b: f64, panels: usize, per_panel: usize) -> (Vec<f64>, Vec<f64>) {
    let rule = if per_panel == PANEL { gl64().clone() } else { GaussRule::new(per_panel) };
    let h = (b - a) / panels as f64;
    let mut xs = Vec::with_capacity(panels * per_panel);
    let mut ws = Vec::with_capacity(panels * per_panel);
    for i in 0..panels {
        let lo = a + h * i as f64;
        let (x, w) = rule.mapped(lo, lo + h);
        xs.extend(x);
        ws.extend(w);
    }
    (xs, ws)
}

/// Adaptive bisection with 64-node panels. Accepts a panel when the
/// one-panel and two-half-panel estimates agree to `max(abs_tol_local,
/// rel_tol·|I|)`.
pub fn integrate_adaptive<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let rule = gl64();
    let whole = rule.integrate(a, b, &mut f)?;
    adapt(&mut f, rule, a, b, whole, abs_tol, rel_tol, (b - a).abs(), 0)
}

#[allow(clippy::too_many_arguments)]
fn adapt<F: FnMut(f64) -> f64>(
    f: &mut F,
    rule: &GaussRule,
    a: f64,
    b: f64,
    whole: f64,
    abs_tol: f64,
    rel_tol: f64,
    span: f64,
    depth: usize,
) -> Result<f64> {
    let m = 0.5 * (a + b);
    let left = rule.integrate(a, m, &mut *f)?;
    let right = rule.integrate(m, b, &mut *f)?;
    let refined = left + right;
    let local_tol = (abs_tol * (b - a).abs() / span).max(rel_tol * refined.abs());
    if (refined - whole).abs() <= local_tol || (b - a).abs() < 1e-300 {
        return Ok(refined);
    }
    if depth >= 40 {
        return Err(Error::Quadrature(format!("no convergence on [{a}, {b}]")));
    }
    let l = adapt(f, rule, a, m, left, abs_tol, rel_tol, span, depth + 1)?;
    let r = adapt(f, rule, m, b, right, abs_tol, rel_tol, span, depth + 1)?;
    Ok(l + r)
}

/// Finds the distance from `start` in direction `dir` beyond which |f|
/// stays below 1e-16 of the largest value met on the way.
pub fn truncation_point<F: FnMut(f64) -> f64>(f: &mut F, start: f64, dir: f64, step: f64) -> f64 {
    let mut peak = f(start).abs();
    let mut quiet = 0;
    let mut x = start;
    for _ in 0..100_000 {
        x += dir * step;
        let v = f(x).abs();
        peak = peak.max(v);
        if v <= 1e-16 * peak || v < 1e-300 {
            quiet += 1;
            if quiet >= 3 {
                return x;
            }
        } else {
            quiet = 0;
        }
    }
    x
}

/// ∫_{−∞}^{∞} f, truncated where the integrand falls below 1e-16 of its
/// peak. `center` and `scale` locate the bulk of the integrand.
pub fn integrate_real_line<F: FnMut(f64) -> f64>(
    mut f: F,
    center: f64,
    scale: f64,
    tol: f64,
) -> Result<f64> {
    let hi = truncation_point(&mut f, center, 1.0, 0.5 * scale);
    let lo = truncation_point(&mut f, center, -1.0, 0.5 * scale);
    let l = integrate_adaptive(&mut f, lo, center, tol, tol)?;
    let r = integrate_adaptive(&mut f, center, hi, tol, tol)?;
    Ok(l + r)
}

/// ∫_a^{∞} f with the same truncation rule.
pub fn integrate_half_line<F: FnMut(f64) -> f64>(mut f: F, a: f64, scale: f64, tol: f64) -> Result<f64> {
    let hi = truncation_point(&mut f, a, 1.0, 0.5 * scale);
    integrate_adaptive(&mut f, a, hi, tol, tol)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        let g = Grid1D::new(0.0, 1.0, 64).unwrap();
        assert!((gauss_legendre(&g, |_| 1.0).unwrap() - 1.0).abs() < 1e-15);
        let g = Grid1D::new(-1.0, 1.0, 64).unwrap();
        assert!(gauss_legendre(&g, |x| x).unwrap().abs() < 1e-15);
        let half = integrate_half_line(|x| (-x * x).exp(), 0.0, 1.0, 1e-14).unwrap();
        assert!((half - PI.sqrt() / 2.0).abs() < 1e-13);
        assert!((half - 0.8862269255).abs() < 1e-10);
    }

    #[test]
    fn rejects_bad_grid() {
        assert!(Grid1D::new(1.0, 0.0, 10).is_err());
        assert!(Grid1D::new(0.0, 1.0, 1).is_err());
    }

    #[test]
    fn polynomial_exactness_on_one_panel() {
        let rule = gl64();
        for deg in [0usize, 1, 17, 63, 100, 127] {
            let got = rule.integrate(0.0, 1.0, |x| (deg as f64 + 1.0) * x.powi(deg as i32)).unwrap();
            assert!((got - 1.0).abs() < 1e-12, "degree {deg}: {got}");
        }
        let r5 = GaussRule::new(5);
        let got = r5.integrate(-1.0, 2.0, |x| x.powi(9)).unwrap();
        assert!((got - (2f64.powi(10) - 1.0) / 10.0).abs() < 1e-12);
    }

    #[test]
    fn weights_sum_to_two() {
        for n in [1, 2, 7, 32, 64, 100] {
            let s: f64 = GaussRule::new(n).weights.iter().sum();
            assert!((s - 2.0).abs() < 1e-13, "n={n}");
        }
    }

    #[test]
    fn composite_grid() {
        let g = Grid1D::new(0.0, 20.0, 640).unwrap();
        let got = gauss_legendre(&g, |x| x.sin()).unwrap();
        assert!((got - (1.0 - 20f64.cos())).abs() < 1e-13);
    }

    #[test]
    fn non_finite_is_reported() {
        let g = Grid1D::new(-1.0, 1.0, 8).unwrap();
        match gauss_legendre(&g, |x| if x > 0.5 { f64::NAN } else { 1.0 }) {
            Err(Error::NonFinite(x)) => assert!(x > 0.5),
            other => panic!("expected NonFinite, got {other:?}"),
        }
    }

    #[test]
    fn adaptive_handles_kink() {
        let got = integrate_adaptive(|x: f64| x.abs(), -1.0, 2.0, 1e-13, 1e-13).unwrap();
        assert!((got - 2.5).abs() < 1e-12);
    }

    #[test]
    fn real_line_gaussian() {
        let got = integrate_real_line(|x| (-(x - 3.0) * (x - 3.0) / 8.0).exp(), 3.0, 2.0, 1e-13).unwrap();
        assert!((got - (8.0 * PI).sqrt()).abs() < 1e-11);
    }
}
