//! Dormand-Prince 5(4) integrator with continuous (dense) output.

use crate::error::{Error, Result};

type Rhs<'a> = Box<dyn Fn(f64, &[f64], &mut [f64]) + Send + Sync + 'a>;

/// Initial value problem y' = f(t, y), y(span.0) = y0.
pub struct OdeProblem<'a> {
    pub dimension: usize,
    pub rhs: Rhs<'a>,
    pub y0: Vec<f64>,
    pub span: (f64, f64),
}

impl<'a> OdeProblem<'a> {
    pub fn new<F>(y0: Vec<f64>, span: (f64, f64), rhs: F) -> Self
    where
        F: Fn(f64, &[f64], &mut [f64]) + Send + Sync + 'a,
    {
        Self { dimension: y0.len(), rhs: Box::new(rhs), y0, span }
    }
}

#[derive(Debug, Clone)]
struct Segment {
    t0: f64,
    h: f64,
    // dense-output coefficient vectors
    r: [Vec<f64>; 5],
}

/// Accepted steps of an integration, queryable at any t in the span.
#[derive(Debug, Clone)]
pub struct DenseSolution {
    segments: Vec<Segment>,
    t_start: f64,
    t_end: f64,
    y_start: Vec<f64>,
    y_end: Vec<f64>,
    pub rhs_evaluations: usize,
}

impl DenseSolution {
    pub fn t_start(&self) -> f64 {
        self.t_start
    }
    pub fn t_end(&self) -> f64 {
        self.t_end
    }
    pub fn y_end(&self) -> &[f64] {
        &self.y_end
    }
    pub fn steps(&self) -> usize {
        self.segments.len()
    }
    /// Accepted step boundaries, starting with the initial time.
    pub fn mesh(&self) -> Vec<f64> {
        let mut m = vec![self.t_start];
        m.extend(self.segments.iter().map(|s| s.t0 + s.h));
        m
    }

    /// Solution at `t`; clamps to the integration span.
    pub fn sample(&self, t: f64) -> Vec<f64> {
        if self.segments.is_empty() {
            return self.y_start.clone();
        }
        let forward = self.t_end >= self.t_start;
        let key = |s: &Segment| if forward { s.t0 } else { -s.t0 };
        let tk = if forward { t } else { -t };
        let idx = match self.segments.binary_search_by(|s| key(s).partial_cmp(&tk).unwrap()) {
            Ok(i) => i,
            Err(0) => 0,
            Err(i) => i - 1,
        };
        let s = &self.segments[idx];
        let theta = ((t - s.t0) / s.h).clamp(0.0, 1.0);
        let theta1 = 1.0 - theta;
        (0..self.y_start.len())
            .map(|i| {
                s.r[0][i]
                    + theta * (s.r[1][i] + theta1 * (s.r[2][i] + theta * (s.r[3][i] + theta1 * s.r[4][i])))
            })
            .collect()
    }
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

/// Integrates `p` with local error control `|err_i| ≤ abs_tol + rel_tol·|y_i|`
/// in the RMS norm.
pub fn integrate_ode(p: &OdeProblem, rel_tol: f64, abs_tol: f64) -> Result<DenseSolution> {
    for tol in [rel_tol, abs_tol] {
        if !(tol > 1e-14 && tol < 1e-2) {
            return Err(Error::Invalid(format!("tolerance {tol} outside (1e-14, 1e-2)")));
        }
    }
    if p.y0.len() != p.dimension {
        return Err(Error::Dimension(format!("initial value has {} entries, dimension is {}", p.y0.len(), p.dimension)));
    }
    let n = p.dimension;
    let (t0, t1) = p.span;
    let dir = if t1 >= t0 { 1.0 } else { -1.0 };
    let f = &p.rhs;
    let mut evals = 0usize;
    let mut sol = DenseSolution {
        segments: Vec::new(),
        t_start: t0,
        t_end: t1,
        y_start: p.y0.clone(),
        y_end: p.y0.clone(),
        rhs_evaluations: 0,
    };
    if t0 == t1 {
        return Ok(sol);
    }

    let mut y = p.y0.clone();
    let mut k1 = vec![0.0; n];
    let mut k2 = vec![0.0; n];
    let mut k3 = vec![0.0; n];
    let mut k4 = vec![0.0; n];
    let mut k5 = vec![0.0; n];
    let mut k6 = vec![0.0; n];
    let mut k7 = vec![0.0; n];
    let mut ytmp = vec![0.0; n];
    let mut ynew = vec![0.0; n];
    f(t0, &y, &mut k1);
    evals += 1;

    let scale = |y: &[f64], i: usize| abs_tol + rel_tol * y[i].abs();
    // starting step from the size of y and y'
    let d0 = rms((0..n).map(|i| y[i] / scale(&y, i)));
    let d1 = rms((0..n).map(|i| k1[i] / scale(&y, i)));
    let mut h = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    h = h.min((t1 - t0).abs());

    let mut t = t0;
    let mut fac_old: f64 = 1e-4;
    let mut last_rejected = false;
    loop {
        let remaining = (t1 - t) * dir;
        if remaining <= 0.0 {
            break;
        }
        if h >= remaining {
            h = remaining;
        }
        if h < 1e-14 * t.abs().max(1.0) {
            return Err(Error::StepUnderflow { t });
        }
        let hs = h * dir;
        for i in 0..n {
            ytmp[i] = y[i] + hs * A21 * k1[i];
        }
        f(t + C2 * hs, &ytmp, &mut k2);
        for i in 0..n {
            ytmp[i] = y[i] + hs * (A31 * k1[i] + A32 * k2[i]);
        }
        f(t + C3 * hs, &ytmp, &mut k3);
        for i in 0..n {
            ytmp[i] = y[i] + hs * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i]);
        }
        f(t + C4 * hs, &ytmp, &mut k4);
        for i in 0..n {
            ytmp[i] = y[i] + hs * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i]);
        }
        f(t + C5 * hs, &ytmp, &mut k5);
        for i in 0..n {
            ytmp[i] = y[i] + hs * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i] + A65 * k5[i]);
        }
        f(t + hs, &ytmp, &mut k6);
        for i in 0..n {
            ynew[i] = y[i] + hs * (A71 * k1[i] + A73 * k3[i] + A74 * k4[i] + A75 * k5[i] + A76 * k6[i]);
        }
        f(t + hs, &ynew, &mut k7);
        evals += 6;

        let err = rms((0..n).map(|i| {
            let e = hs * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            e / (abs_tol + rel_tol * y[i].abs().max(ynew[i].abs()))
        }));
        if !err.is_finite() {
            h *= 0.2;
            last_rejected = true;
            continue;
        }
        // Lund stabilisation as in Hairer's dopri5
        let fac11 = err.powf(0.2 - 0.04 * 0.75);
        let fac = (fac11 / fac_old.powf(0.04)) / 0.9;
        if err <= 1.0 {
            let r0 = y.clone();
            let r1: Vec<f64> = (0..n).map(|i| ynew[i] - y[i]).collect();
            let r2: Vec<f64> = (0..n).map(|i| hs * k1[i] - r1[i]).collect();
            let r3: Vec<f64> = (0..n).map(|i| r1[i] - hs * k7[i] - r2[i]).collect();
            let r4: Vec<f64> = (0..n)
                .map(|i| hs * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i] + D7 * k7[i]))
                .collect();
            sol.segments.push(Segment { t0: t, h: hs, r: [r0, r1, r2, r3, r4] });
            fac_old = err.max(1e-4);
            t += hs;
            if (t1 - t) * dir < 1e-15 * t.abs().max(1.0) {
                t = t1;
            }
            y.copy_from_slice(&ynew);
            k1.copy_from_slice(&k7);
            let mut hnew = h / fac.clamp(0.1, 5.0);
            if last_rejected {
                hnew = hnew.min(h);
            }
            last_rejected = false;
            h = hnew;
        } else {
            h /= (fac11 / 0.9).min(5.0);
            last_rejected = true;
        }
    }
    sol.y_end = y;
    sol.rhs_evaluations = evals;
    Ok(sol)
}

fn rms<I: Iterator<Item = f64>>(it: I) -> f64 {
    let mut s = 0.0;
    let mut n = 0;
    for v in it {
        s += v * v;
        n += 1;
    }
    (s / n.max(1) as f64).sqrt()
}
