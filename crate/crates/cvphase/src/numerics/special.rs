//! Special functions: Hermite polynomials and functions, erf, Airy Ai.

use crate::error::{Error, Result};
use std::f64::consts::PI;

/// Physicists' Hermite polynomial H_n(x) by the three-term recurrence.
pub fn hermite_polynomial(n: usize, x: f64) -> Result<f64> {
    if n > 200 {
        return Err(Error::Range(format!("hermite order {n} exceeds 200")));
    }
    let mut h0 = 1.0;
    if n == 0 {
        return Ok(h0);
    }
    let mut h1 = 2.0 * x;
    for k in 1..n {
        let h2 = 2.0 * x * h1 - 2.0 * k as f64 * h0;
        h0 = h1;
        h1 = h2;
    }
    if !h1.is_finite() {
        return Err(Error::Range(format!("H_{n}({x}) overflows")));
    }
    Ok(h1)
}

/// Normalized Hermite functions φ_0(x) … φ_{n_max}(x).
///
/// Uses the orthonormal recurrence with a running exponent so that large
/// orders far from the origin neither underflow nor overflow.
pub fn hermite_functions(n_max: usize, x: f64) -> Vec<f64> {
    let mut out = vec![0.0; n_max + 1];
    hermite_functions_into(x, &mut out);
    out
}

/// Fills `out[n] = φ_n(x)` for `n < out.len()`.
pub fn hermite_functions_into(x: f64, out: &mut [f64]) {
    if out.is_empty() {
        return;
    }
    const BIG: f64 = 1e150;
    // values are stored as mantissa * exp(log_scale)
    let mut log_scale = -0.5 * x * x;
    let mut prev = 0.0;
    let mut cur = PI.powf(-0.25);
    out[0] = cur * log_scale.exp();
    for n in 0..out.len() - 1 {
        let nf = n as f64;
        let next = (2.0 / (nf + 1.0)).sqrt() * x * cur - (nf / (nf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
        if cur.abs() > BIG {
            cur /= BIG;
            prev /= BIG;
            log_scale += BIG.ln();
        }
        out[n + 1] = if cur == 0.0 {
            0.0
        } else {
            cur.signum() * (cur.abs().ln() + log_scale).exp()
        };
    }
}

/// Derivatives φ_n'(x) from φ_n' = √(n/2) φ_{n−1} − √((n+1)/2) φ_{n+1}.
///
/// `phi` must hold at least `n_max + 2` values.
pub fn hermite_function_derivatives(phi: &[f64], n_max: usize) -> Vec<f64> {
    assert!(phi.len() >= n_max + 2, "need φ up to order n_max + 1");
    (0..=n_max)
        .map(|n| {
            let nf = n as f64;
            let lower = if n > 0 { (nf / 2.0).sqrt() * phi[n - 1] } else { 0.0 };
            lower - ((nf + 1.0) / 2.0).sqrt() * phi[n + 1]
        })
        .collect()
}

/// Error function.
pub fn erf(x: f64) -> f64 {
    libm::erf(x)
}

/// Complementary error function.
pub fn erfc(x: f64) -> f64 {
    libm::erfc(x)
}

const AI0: f64 = 0.355_028_053_887_817_24;
const AIP0: f64 = 0.258_819_403_792_806_8;

/// Airy function Ai(x) on [−30, 30].
pub fn airy_ai(x: f64) -> Result<f64> {
    if !(-30.0..=30.0).contains(&x) || x.is_nan() {
        return Err(Error::Range(format!("airy_ai argument {x} outside [-30, 30]")));
    }
    Ok(if x > 5.0 {
        airy_asymptotic_pos(x)
    } else if x < -7.0 {
        airy_asymptotic_neg(-x)
    } else {
        airy_maclaurin(x)
    })
}

fn airy_maclaurin(x: f64) -> f64 {
    let x3 = x * x * x;
    let mut f = 1.0;
    let mut g = x;
    let mut tf = 1.0;
    let mut tg = x;
    for k in 0..200 {
        let kf = k as f64;
        tf *= x3 / ((3.0 * kf + 2.0) * (3.0 * kf + 3.0));
        tg *= x3 / ((3.0 * kf + 3.0) * (3.0 * kf + 4.0));
        f += tf;
        g += tg;
        if tf.abs() < 1e-18 * f.abs().max(1.0) && tg.abs() < 1e-18 * g.abs().max(1.0) {
            break;
        }
    }
    AI0 * f - AIP0 * g
}

// u_k coefficients of the Airy asymptotic series
fn airy_u(k_max: usize) -> Vec<f64> {
    let mut u = vec![1.0; k_max + 1];
    for k in 1..=k_max {
        let kf = k as f64;
        u[k] = u[k - 1] * (6.0 * kf - 5.0) * (6.0 * kf - 3.0) * (6.0 * kf - 1.0)
            / ((2.0 * kf - 1.0) * 216.0 * kf);
    }
    u
}

fn airy_asymptotic_pos(x: f64) -> f64 {
    let zeta = 2.0 / 3.0 * x.powf(1.5);
    let u = airy_u(60);
    let mut sum = 0.0;
    let mut last = f64::INFINITY;
    let mut pw = 1.0;
    for (k, uk) in u.iter().enumerate() {
        let term = uk / pw * if k % 2 == 0 { 1.0 } else { -1.0 };
        if term.abs() > last {
            break;
        }
        sum += term;
        last = term.abs();
        pw *= zeta;
    }
    (-zeta).exp() / (2.0 * PI.sqrt() * x.powf(0.25)) * sum
}

fn airy_asymptotic_neg(x: f64) -> f64 {
    let zeta = 2.0 / 3.0 * x.powf(1.5);
    let u = airy_u(60);
    let mut even = 0.0;
    let mut odd = 0.0;
    let mut last = f64::INFINITY;
    let mut pw = 1.0;
    for (k, uk) in u.iter().enumerate() {
        let term = uk / pw;
        if term > last {
            break;
        }
        last = term;
        let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        if k % 2 == 0 {
            even += sign * term;
        } else {
            odd += sign * term;
        }
        pw *= zeta;
    }
    let phase = zeta + PI / 4.0;
    (phase.sin() * even - phase.cos() * odd) / (PI.sqrt() * x.powf(0.25))
}

#[cfg(test)]
mod tests {
    use super::*;

    // reference values from mpmath at 30 digits
    const AIRY_REF: &[(f64, f64)] = &[
        (-30.0, -0.087968188456842162833),
        (-25.5, -0.24407246181912132932),
        (-20.0, -0.17640612707798468959),
        (-12.3, -0.28747208025644158362),
        (-8.0, -0.052705050356386202622),
        (-7.5, 0.32177571638064787527),
        (-7.0, 0.18428083525050563728),
        (-6.9, 0.10168799773976482521),
        (-5.0, 0.35076100902411431979),
        (-3.3, -0.41718093737455014137),
        (-1.0, 0.5355608832923521188),
        (-0.2, 0.40628418744480141315),
        (0.0, 0.35502805388781723926),
        (0.7, 0.18916240039815008218),
        (2.0, 0.034924130423274379135),
        (4.9, 0.00013599211701506742767),
        (5.0, 0.00010834442813607441735),
        (5.1, 0.000086132427064788511554),
        (6.0, 9.9476943602528895702e-6),
        (8.0, 4.6922076160992316256e-8),
        (10.0, 1.1047532552898685934e-10),
        (15.0, 2.164962520737992299e-18),
        (30.0, 3.2082175915504955711e-49),
    ];

    #[test]
    fn airy_matches_reference() {
        for &(x, want) in AIRY_REF {
            let got = airy_ai(x).unwrap();
            assert!((got - want).abs() < 1e-10, "Ai({x}) = {got}, want {want}");
        }
    }

    #[test]
    fn airy_examples() {
        assert!((airy_ai(0.0).unwrap() - 0.3550280539).abs() < 1e-10);
        assert!((airy_ai(-1.0).unwrap() - 0.5355608832).abs() < 1e-10);
        let a10 = airy_ai(10.0).unwrap();
        assert!(a10 > 0.0 && a10 < 1e-9);
        assert!(airy_ai(30.5).is_err());
        assert!(airy_ai(-31.0).is_err());
    }

    #[test]
    fn airy_is_continuous_at_branch_switches() {
        for &x in &[5.0, -7.0] {
            let l = airy_ai(x - 1e-12).unwrap();
            let r = airy_ai(x + 1e-12).unwrap();
            assert!((l - r).abs() < 1e-10, "jump at {x}: {l} vs {r}");
        }
    }

    #[test]
    fn erf_reference() {
        let refs = [
            (0.1, 0.1124629160182848984),
            (0.5, 0.52049987781304653768),
            (1.0, 0.84270079294971486934),
            (1.5, 0.96610514647531072707),
            (2.5, 0.99959304798255504106),
            (3.7, 0.99999983284894209085),
            (5.5, 0.99999999999999264215),
        ];
        for (x, want) in refs {
            assert!((erf(x) - want).abs() < 1e-12);
            assert!((erf(-x) + want).abs() < 1e-12);
        }
        assert_eq!(erf(0.0), 0.0);
        assert!((erf(20.0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn hermite_examples() {
        assert_eq!(hermite_polynomial(0, 3.7).unwrap(), 1.0);
        assert_eq!(hermite_polynomial(1, 2.0).unwrap(), 4.0);
        assert_eq!(hermite_polynomial(2, 1.0).unwrap(), 2.0);
        assert!(hermite_polynomial(201, 1.0).is_err());
        assert!(hermite_polynomial(200, 1e200).is_err());
    }

    #[test]
    fn hermite_recurrence_residual() {
        for n in 1..100 {
            for &x in &[-10.0, -3.3, 0.0, 0.5, 7.1, 10.0] {
                let hm = hermite_polynomial(n - 1, x).unwrap();
                let h = hermite_polynomial(n, x).unwrap();
                let hp = hermite_polynomial(n + 1, x).unwrap();
                let res = hp - 2.0 * x * h + 2.0 * n as f64 * hm;
                let scale = hp.abs().max(2.0 * x.abs() * h.abs()).max(1.0);
                assert!(res.abs() <= 1e-9 * scale, "n={n}, x={x}");
            }
        }
    }

    #[test]
    fn hermite_functions_agree_with_polynomials() {
        let mut fact = 1.0f64;
        for n in 0..20usize {
            if n > 0 {
                fact *= n as f64;
            }
            for &x in &[-2.5, 0.0, 0.3, 1.7] {
                let direct = hermite_polynomial(n, x).unwrap() * (-x * x / 2.0).exp()
                    / (PI.powf(0.25) * (2f64.powi(n as i32) * fact).sqrt());
                let phi = hermite_functions(n, x)[n];
                assert!((phi - direct).abs() < 1e-12, "n={n}, x={x}");
            }
        }
    }

    #[test]
    fn hermite_functions_survive_large_orders() {
        // beyond 38 the Gaussian factor alone underflows
        let phi = hermite_functions(1500, 40.0);
        assert!(phi.iter().all(|v| v.is_finite()));
        assert!(phi[1500].abs() > 1e-6);
        assert_eq!(phi[0], 0.0);
    }
}
