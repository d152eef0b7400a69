//! Shannon entropy, Kullback-Leibler divergence, mutual information and the
//! discord of the two-mode squeezed state.

use crate::error::{Error, Result};
use std::f64::consts::LN_2;

const SUM_TOL: f64 = 1e-12;

fn check_distribution(p: &[f64]) -> Result<()> {
    if p.is_empty() {
        return Err(Error::Invalid("empty distribution".into()));
    }
    if let Some(x) = p.iter().find(|x| !(**x >= 0.0) || !x.is_finite()) {
        return Err(Error::Invalid(format!("probability {x} is negative or not finite")));
    }
    let s: f64 = p.iter().sum();
    if (s - 1.0).abs() > SUM_TOL {
        return Err(Error::Invalid(format!("probabilities sum to {s}")));
    }
    Ok(())
}

fn plogp(p: f64) -> f64 {
    if p == 0.0 {
        0.0
    } else {
        p * p.ln()
    }
}

/// −Σ p ln p in nats.
pub fn shannon_entropy(p: &[f64]) -> Result<f64> {
    check_distribution(p)?;
    Ok((-p.iter().map(|x| plogp(*x)).sum::<f64>()).max(0.0))
}

/// D(p‖q) = Σ p ln(p/q) in nats.
pub fn kl_divergence(p: &[f64], q: &[f64]) -> Result<f64> {
    check_distribution(p)?;
    check_distribution(q)?;
    if p.len() != q.len() {
        return Err(Error::Dimension(format!("{} vs {} outcomes", p.len(), q.len())));
    }
    let mut d = 0.0;
    for (a, b) in p.iter().zip(q) {
        if *a > 0.0 {
            if *b == 0.0 {
                return Err(Error::Invalid("q vanishes where p does not".into()));
            }
            d += a * (a / b).ln();
        }
    }
    Ok(d.max(0.0))
}

/// Joint distribution p(a_i, b_j), rows indexed by a.
#[derive(Debug, Clone, PartialEq)]
pub struct JointDistribution {
    rows: usize,
    cols: usize,
    probabilities: Vec<f64>,
}

impl JointDistribution {
    pub fn new(rows: usize, cols: usize, probabilities: Vec<f64>) -> Result<Self> {
        if rows * cols != probabilities.len() || rows == 0 || cols == 0 {
            return Err(Error::Dimension(format!("{rows}x{cols} joint with {} entries", probabilities.len())));
        }
        check_distribution(&probabilities)?;
        Ok(Self { rows, cols, probabilities })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        Self::new(rows.len(), cols, rows.concat())
    }

    /// Product of two marginals.
    pub fn product(pa: &[f64], pb: &[f64]) -> Result<Self> {
        check_distribution(pa)?;
        check_distribution(pb)?;
        let probs = pa.iter().flat_map(|a| pb.iter().map(move |b| a * b)).collect();
        Self::new(pa.len(), pb.len(), probs)
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.probabilities[i * self.cols + j]
    }

    pub fn marginal_a(&self) -> Vec<f64> {
        (0..self.rows).map(|i| (0..self.cols).map(|j| self.get(i, j)).sum()).collect()
    }

    pub fn marginal_b(&self) -> Vec<f64> {
        (0..self.cols).map(|j| (0..self.rows).map(|i| self.get(i, j)).sum()).collect()
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    /// S(b|a) = −Σ p(a,b) ln p(b|a).
    pub fn conditional_entropy_b_given_a(&self) -> f64 {
        let pa = self.marginal_a();
        let mut s = 0.0;
        for i in 0..self.rows {
            for j in 0..self.cols {
                let p = self.get(i, j);
                if p > 0.0 {
                    s -= p * (p / pa[i]).ln();
                }
            }
        }
        s
    }
}

/// S[p(a)] + S[p(b)] − S[p(a,b)] in nats.
pub fn mutual_information(j: &JointDistribution) -> Result<f64> {
    let sa = shannon_entropy(&normalize(j.marginal_a()))?;
    let sb = shannon_entropy(&normalize(j.marginal_b()))?;
    let sab = shannon_entropy(j.probabilities())?;
    Ok((sa + sb - sab).max(0.0))
}

/// D(p(a,b) ‖ p(a)p(b)).
pub fn mutual_information_kl(j: &JointDistribution) -> Result<f64> {
    let pa = j.marginal_a();
    let pb = j.marginal_b();
    let mut d = 0.0;
    for a in 0..pa.len() {
        for b in 0..pb.len() {
            let p = j.get(a, b);
            if p > 0.0 {
                d += p * (p / (pa[a] * pb[b])).ln();
            }
        }
    }
    Ok(d.max(0.0))
}

/// S[p(b)] − S(b|a).
pub fn mutual_information_conditional(j: &JointDistribution) -> Result<f64> {
    let sb = shannon_entropy(&normalize(j.marginal_b()))?;
    Ok((sb - j.conditional_entropy_b_given_a()).max(0.0))
}

// removes round-off in marginal sums
fn normalize(mut p: Vec<f64>) -> Vec<f64> {
    let s: f64 = p.iter().sum();
    for x in &mut p {
        *x /= s;
    }
    p
}

/// Discord of the two-mode squeezed state in nats.
pub fn discord_tmss_nats(r: f64) -> Result<f64> {
    if !(r >= 0.0 && r.is_finite()) {
        return Err(Error::Invalid(format!("r must be finite and >= 0, got {r}")));
    }
    if r == 0.0 {
        return Ok(0.0);
    }
    // c ln c − s ln s = ln s + c ln(1 + 1/s), stable for large r
    let s = r.sinh().powi(2);
    let c = r.cosh().powi(2);
    Ok(s.ln() + c * (1.0 / s).ln_1p())
}

/// cosh²r log₂ cosh²r − sinh²r log₂ sinh²r, in bits.
pub fn discord_tmss(r: f64) -> Result<f64> {
    Ok(discord_tmss_nats(r)? / LN_2)
}

/// Large-r behaviour 2r/ln 2 − 2 + 1/ln 2 of the discord, in bits.
pub fn discord_asymptote(r: f64) -> Result<f64> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::Invalid(format!("r must be finite and > 0, got {r}")));
    }
    Ok(2.0 * r / LN_2 - 2.0 + 1.0 / LN_2)
}

/// discord_tmss(r) − discord_asymptote(r) in bits, evaluated without the
/// cancellation of the direct difference.
pub fn discord_excess(r: f64) -> Result<f64> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::Invalid(format!("r must be finite and > 0, got {r}")));
    }
    // ln sinh²r = 2r − 2 ln 2 + 2 ln(1 − e^{−2r}); (s+1) ln(1+1/s) − 1 = Σ (−1)^{n+1} xⁿ/(n(n+1)), x = 1/s
    let x = 1.0 / r.sinh().powi(2);
    let tail = if x < 0.1 {
        let mut sum = 0.0;
        let mut xn = 1.0;
        for n in 1..40 {
            xn *= x;
            let term = xn / (n * (n + 1)) as f64;
            sum += if n % 2 == 1 { term } else { -term };
            if term < 1e-18 * sum.abs() {
                break;
            }
        }
        sum
    } else {
        (1.0 + 1.0 / x) * x.ln_1p() - 1.0
    };
    Ok((2.0 * (-(-2.0 * r).exp()).ln_1p() + tail) / LN_2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn entropy_examples() {
        assert_eq!(shannon_entropy(&[1.0, 0.0]).unwrap(), 0.0);
        assert!((shannon_entropy(&[0.5, 0.5]).unwrap() - LN_2).abs() < 1e-15);
        let p: f64 = 0.3;
        let want = -p * p.ln() - (1.0 - p) * (1.0 - p).ln();
        assert!((shannon_entropy(&[p, 1.0 - p]).unwrap() - want).abs() < 1e-15);
        assert!(shannon_entropy(&[0.5, 0.6]).is_err());
        assert!(shannon_entropy(&[-0.1, 1.1]).is_err());
    }

    #[test]
    fn kl_examples() {
        let p = [0.9, 0.1];
        let q = [0.5, 0.5];
        assert_eq!(kl_divergence(&p, &p).unwrap(), 0.0);
        let a = kl_divergence(&p, &q).unwrap();
        let b = kl_divergence(&q, &p).unwrap();
        assert!((a - b).abs() > 0.1);
        assert!((kl_divergence(&[1.0, 0.0], &q).unwrap() - LN_2).abs() < 1e-15);
        assert!(kl_divergence(&q, &[1.0, 0.0]).is_err());
    }

    #[test]
    fn mutual_information_examples() {
        let prod = JointDistribution::product(&[0.2, 0.8], &[0.5, 0.25, 0.25]).unwrap();
        assert!(mutual_information(&prod).unwrap() < 1e-12);
        let diag = JointDistribution::from_rows(&[vec![0.5, 0.0], vec![0.0, 0.5]]).unwrap();
        assert!((mutual_information(&diag).unwrap() - LN_2).abs() < 1e-15);
        let j = JointDistribution::from_rows(&[vec![0.1, 0.2, 0.05], vec![0.3, 0.15, 0.2]]).unwrap();
        let a = mutual_information(&j).unwrap();
        let b = mutual_information_kl(&j).unwrap();
        let c = mutual_information_conditional(&j).unwrap();
        assert!((a - b).abs() < 1e-12 && (a - c).abs() < 1e-12);
        assert!(JointDistribution::new(2, 2, vec![0.5, 0.5, 0.5, 0.5]).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]
        #[test]
        fn mutual_information_nonnegative(w in proptest::collection::vec(0.0f64..1.0, 12)) {
            let s: f64 = w.iter().sum();
            prop_assume!(s > 1e-6);
            let p: Vec<f64> = w.iter().map(|x| x / s).collect();
            let j = JointDistribution::new(3, 4, p).unwrap();
            let a = mutual_information(&j).unwrap();
            prop_assert!(a >= 0.0);
            prop_assert!((a - mutual_information_kl(&j).unwrap()).abs() < 1e-12);
            prop_assert!((a - mutual_information_conditional(&j).unwrap()).abs() < 1e-12);
            let pr = JointDistribution::product(&j.marginal_a(), &j.marginal_b());
            if let Ok(pr) = pr {
                prop_assert!(mutual_information(&pr).unwrap() < 1e-12);
            }
        }
    }

    #[test]
    fn discord_examples() {
        assert_eq!(discord_tmss(0.0).unwrap(), 0.0);
        // closed form evaluated with mpmath at 40 digits
        assert!((discord_tmss(1.0).unwrap() - 2.336909300545896851).abs() < 1e-13);
        let mut last = -1.0;
        for i in 0..=600 {
            let d = discord_tmss(i as f64 * 0.01).unwrap();
            assert!(d > last);
            last = d;
        }
        assert!(discord_tmss(-0.1).is_err());
    }

    #[test]
    fn discord_matches_direct_base_two() {
        for &r in &[0.1f64, 0.7, 2.0, 4.5] {
            let c = r.cosh().powi(2);
            let s = r.sinh().powi(2);
            let direct = c * c.log2() - s * s.log2();
            assert!((discord_tmss(r).unwrap() - direct).abs() < 1e-12 * direct.max(1.0));
        }
    }

    #[test]
    fn asymptote() {
        let gap = |r: f64| discord_tmss(r).unwrap() - discord_asymptote(r).unwrap();
        assert!(gap(5.0).abs() < 1e-3);
        assert!(gap(10.0).abs() < 1e-7);
        let slope = (discord_tmss(12.0).unwrap() - discord_tmss(11.0).unwrap()) / 1.0;
        assert!((slope - 2.0 / LN_2).abs() < 1e-4);
        for &r in &[1.0, 2.0, 3.5] {
            assert!((discord_excess(r).unwrap() - gap(r)).abs() < 1e-12);
        }
        let mut prev = f64::INFINITY;
        for i in 0..=90 {
            let r = 1.0 + 0.1 * i as f64;
            let g = discord_excess(r).unwrap();
            assert!(g > 0.0 && g < prev, "r={r}");
            assert!(g < 10.0 * (-2.0 * r).exp());
            prev = g;
        }
        assert!(discord_asymptote(0.0).is_err());
    }
}
