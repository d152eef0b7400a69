use clap::{Args, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use super::output::{format_float, Output, Table};
use super::{lib_error, CliError, VERSION};
use crate::dynamics::{evolve_bogoliubov, log_spaced, onemode_wigner, power_spectrum as spectrum, spectral_index, BackgroundModel};
use crate::fock::{default_truncation, wigner_numeric, FockVector, MAX_TRUNCATION};
use crate::gaussian::{covariance_from_squeezing, wigner_gaussian, wigner_tmss_explicit, PhasePoint, SqueezingParams};
use crate::infotheory::{discord_asymptote, discord_tmss};
use crate::pseudospin::{bw_triple, gkmr_triple, larsson_ell_sweep_at, larsson_triple, maximize_bell, BellMaximum};
use crate::wavepacket_chsh as wp;
use crate::weyl::{quantum_average, random_expression, stochastic_average, weyl_transform};

fn params<P: Serialize>(p: &P) -> Map<String, Value> {
    match serde_json::to_value(p) {
        Ok(Value::Object(m)) => m,
        _ => Map::new(),
    }
}

fn need(ok: bool, key: &str, msg: &str) -> Result<(), CliError> {
    if ok {
        Ok(())
    } else {
        Err(CliError::Config(format!("parameter `{key}`: {msg}")))
    }
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![a];
    }
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}

/// Evaluates rows in parallel; output order follows the input.
fn par_rows<T: Sync, F>(items: &[T], f: F) -> Result<Vec<Vec<f64>>, crate::Error>
where
    F: Fn(&T) -> Result<Vec<f64>, crate::Error> + Sync + Send,
{
    items.par_iter().map(f).collect()
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiscordCurve {
    #[arg(long, default_value_t = 5.0)]
    pub r_max: f64,
    #[arg(long, default_value_t = 100)]
    pub points: usize,
}

pub fn discord_curve(p: &DiscordCurve, seed: Option<u64>) -> Result<Output, CliError> {
    need(p.r_max > 0.0 && p.r_max.is_finite(), "r_max", "must be finite and > 0")?;
    need(p.points >= 2, "points", "must be >= 2")?;
    let rs = linspace(0.0, p.r_max, p.points);
    let mut t = Table::new("discord-curve", params(p), seed, &[("r", "dimensionless"), ("discord_bits", "bits"), ("asymptote_bits", "bits")]);
    t.rows = par_rows(&rs, |&r| {
        let a = if r > 0.0 { discord_asymptote(r)? } else { f64::NAN };
        Ok(vec![r, discord_tmss(r)?, a])
    })
    .map_err(|e| lib_error("discord-curve", e))?;
    t.note("asymptote", "2r/ln2 - 2 + 1/ln2 (undefined at r = 0)");
    Ok(Output::Csv(t))
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SqueezeEvolve {
    /// Power-law index; −2 is de Sitter.
    #[arg(long, default_value_t = -2.0, allow_hyphen_values = true)]
    pub beta: f64,
    #[arg(long, default_value_t = -100.0, allow_hyphen_values = true)]
    pub eta_ini: f64,
    #[arg(long, default_value_t = -0.01, allow_hyphen_values = true)]
    pub eta_end: f64,
    #[arg(long, default_value_t = 1.0)]
    pub k: f64,
    #[arg(long, default_value_t = 200)]
    pub samples: usize,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
}

pub fn squeeze_evolve(p: &SqueezeEvolve, seed: Option<u64>) -> Result<Output, CliError> {
    need(p.samples >= 2, "samples", "must be >= 2")?;
    need(p.k > 0.0, "k", "must be > 0")?;
    need(p.tol > 0.0 && p.tol < 1e-2, "tol", "must be in (0, 1e-2)")?;
    let ctx = |e| lib_error("squeeze-evolve", e);
    let bg = BackgroundModel::new(p.beta, p.eta_ini, p.eta_end).map_err(ctx)?;
    let tr = evolve_bogoliubov(&bg, p.k, p.tol).map_err(ctx)?;
    let mut t = Table::new(
        "squeeze-evolve",
        params(p),
        seed,
        &[("eta", "conformal time"), ("r", "dimensionless"), ("phi", "rad"), ("wronskian", "|u|^2-|v|^2")],
    );
    let (a, b) = ((-p.eta_ini).ln(), (-p.eta_end).ln());
    for i in 0..p.samples {
        let eta = -(a + (b - a) * i as f64 / (p.samples - 1) as f64).exp();
        let s = tr.squeezing(eta);
        t.rows.push(vec![eta, s.r, s.phi, tr.at(eta).wronskian()]);
    }
    t.note("wronskian_defect", format_float(tr.wronskian_defect()));
    t.note("squeezing_ode_residual", format_float(tr.squeezing_residual(p.samples, 1e-3)));
    Ok(Output::Csv(t))
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PowerSpectrum {
    #[arg(long, default_value_t = -2.0, allow_hyphen_values = true)]
    pub beta: f64,
    #[arg(long, default_value_t = 1.0)]
    pub k_min: f64,
    #[arg(long, default_value_t = 31.622776601683793)]
    pub k_max: f64,
    #[arg(long, default_value_t = 8)]
    pub per_decade: usize,
    /// k_min |η_ini|.
    #[arg(long, default_value_t = 1000.0)]
    pub start_ratio: f64,
    /// k_max |η_end|.
    #[arg(long, default_value_t = 0.01)]
    pub end_ratio: f64,
}

pub fn power_spectrum(p: &PowerSpectrum, seed: Option<u64>) -> Result<Output, CliError> {
    need(p.k_min > 0.0 && p.k_max > p.k_min, "k_max", "need 0 < k_min < k_max")?;
    need(p.per_decade >= 1, "per_decade", "must be >= 1")?;
    need(p.start_ratio > 0.0 && p.end_ratio > 0.0, "start_ratio", "ratios must be > 0")?;
    let ctx = |e| lib_error("power-spectrum", e);
    let ks = log_spaced(p.k_min, p.k_max, p.per_decade);
    let bg = BackgroundModel::new(p.beta, -p.start_ratio / p.k_min, -p.end_ratio / p.k_max).map_err(ctx)?;
    let pts = spectrum(&bg, &ks).map_err(ctx)?;
    let ns = spectral_index(&pts).map_err(ctx)?;
    let mut t = Table::new(
        "power-spectrum",
        params(p),
        seed,
        &[("k", "comoving wavenumber"), ("p_zeta", "dimensionless"), ("sub_hubble_start", "flag"), ("super_hubble_end", "flag")],
    );
    for s in &pts {
        t.rows.push(vec![s.k, s.p_zeta, s.sub_hubble_start as u8 as f64, s.super_hubble_end as u8 as f64]);
    }
    t.note("eta_ini", format_float(bg.eta_ini));
    t.note("eta_end", format_float(bg.eta_end));
    t.note("n_s", format_float(ns));
    Ok(Output::Csv(t))
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WignerCat {
    #[arg(long, default_value_t = 6.0, allow_hyphen_values = true)]
    pub q0: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub p0: f64,
    #[arg(long, default_value_t = 1.0)]
    pub m: f64,
    #[arg(long, default_value_t = 1.0)]
    pub omega: f64,
    #[arg(long, default_value_t = 121)]
    pub points: usize,
}

pub fn wigner_cat(p: &WignerCat, seed: Option<u64>) -> Result<Output, CliError> {
    need(p.points >= 2, "points", "must be >= 2")?;
    let c = wp::CatParams::new(p.q0, p.p0, p.m, p.omega).map_err(|e| lib_error("wigner-cat", e))?;
    let sq = 1.0 / (p.m * p.omega).sqrt();
    let sp = (p.m * p.omega).sqrt();
    let qs = linspace(-(p.q0.abs() + 5.0 * sq), p.q0.abs() + 5.0 * sq, p.points);
    let ps = linspace(p.p0 - 5.0 * sp, p.p0 + 5.0 * sp, p.points);
    let grid: Vec<(f64, f64)> = qs.iter().flat_map(|q| ps.iter().map(move |pp| (*q, *pp))).collect();
    let mut t = Table::new("wigner-cat", params(p), seed, &[("q", "position"), ("p", "momentum"), ("w", "1/(position*momentum)")]);
    t.rows = grid.par_iter().map(|&(q, pp)| vec![q, pp, wp::cat_wigner(&c, q, pp)]).collect();
    let neg = wp::cat_negativity(&c);
    t.note("normalization", format_float(c.normalization()));
    t.note("min_w", format_float(neg.min));
    t.note("min_at", format!("{},{}", format_float(neg.q), format_float(neg.p)));
    Ok(Output::Csv(t))
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WignerTmss {
    #[arg(long, default_value_t = 1.0)]
    pub r: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub phi: f64,
    #[arg(long, default_value_t = 1.0)]
    pub k: f64,
    /// π_k on the slice.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub pi_k: f64,
    /// π_−k on the slice.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub pi_mk: f64,
    #[arg(long, default_value_t = 4.0)]
    pub half_width: f64,
    #[arg(long, default_value_t = 41)]
    pub points: usize,
}

pub fn wigner_tmss(p: &WignerTmss, seed: Option<u64>) -> Result<Output, CliError> {
    need(p.points >= 2, "points", "must be >= 2")?;
    need(p.k > 0.0, "k", "must be > 0")?;
    need(p.half_width > 0.0, "half_width", "must be > 0")?;
    let ctx = |e| lib_error("wigner-tmss", e);
    let sp = SqueezingParams::new(p.r, p.phi).map_err(ctx)?;
    let st = covariance_from_squeezing(sp);
    let xs = linspace(-p.half_width, p.half_width, p.points);
    let grid: Vec<(f64, f64)> = xs.iter().flat_map(|a| xs.iter().map(move |b| (*a, *b))).collect();
    let mut t = Table::new(
        "wigner-tmss",
        params(p),
        seed,
        &[("q_k", "position"), ("q_mk", "position"), ("w_gaussian", "dimensionless"), ("w_explicit", "dimensionless")],
    );
    t.rows = par_rows(&grid, |&(a, b)| {
        let g = wigner_gaussian(&st, &PhasePoint::from_physical(p.k, a, p.pi_k, b, p.pi_mk))?;
        Ok(vec![a, b, g, wigner_tmss_explicit(sp, p.k, a, p.pi_k, b, p.pi_mk)])
    })
    .map_err(ctx)?;
    t.note("det_gamma", format_float(st.determinant()));
    Ok(Output::Csv(t))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WkbMode {
    Squeezed,
    Berry,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WignerWkb {
    #[arg(long, value_enum, default_value_t = WkbMode::Squeezed)]
    pub mode: WkbMode,
    /// Squeezing of the one-mode state.
    #[arg(long, default_value_t = 1.0)]
    pub r: f64,
    /// Oscillator level for the Berry form.
    #[arg(long, default_value_t = 10)]
    pub n: usize,
    #[arg(long, default_value_t = 4.0)]
    pub half_width: f64,
    #[arg(long, default_value_t = 81)]
    pub points: usize,
}

pub fn wigner_wkb(p: &WignerWkb, seed: Option<u64>) -> Result<Output, CliError> {
    need(p.points >= 2, "points", "must be >= 2")?;
    need(p.half_width > 0.0, "half_width", "must be > 0")?;
    let ctx = |e| lib_error("wigner-wkb", e);
    let xs = linspace(-p.half_width, p.half_width, p.points);
    let grid: Vec<(f64, f64)> = xs.iter().flat_map(|a| xs.iter().map(move |b| (*a, *b))).collect();
    match p.mode {
        WkbMode::Squeezed => {
            let mut t = Table::new(
                "wigner-wkb",
                params(p),
                seed,
                &[("q", "position"), ("p", "momentum"), ("w_exact", "dimensionless"), ("w_delta_form", "dimensionless")],
            );
            t.rows = par_rows(&grid, |&(q, pp)| Ok(vec![q, pp, onemode_wigner(p.r, q, pp)?, wp::wkb_wigner_naive(p.r, q, pp)?])).map_err(ctx)?;
            t.note("delta_width", format_float(crate::dynamics::delta_eps_width(p.r).map_err(ctx)?));
            Ok(Output::Csv(t))
        }
        WkbMode::Berry => {
            need((1..=30).contains(&p.n), "n", "must be in 1..=30")?;
            let state = FockVector::number_state(p.n, p.n);
            let mut t = Table::new(
                "wigner-wkb",
                params(p),
                seed,
                &[("q", "position"), ("p", "momentum"), ("w_berry", "dimensionless"), ("w_fock", "dimensionless")],
            );
            t.rows = par_rows(&grid, |&(q, pp)| {
                let b = match wp::berry_wigner_ho(p.n, q, pp) {
                    Ok(v) => v,
                    Err(crate::Error::Domain(_)) => f64::NAN,
                    Err(e) => return Err(e),
                };
                Ok(vec![q, pp, b, wigner_numeric(&state, q, pp)?])
            })
            .map_err(ctx)?;
            t.note("w_berry", "NaN outside the allowed region and at the centre");
            Ok(Output::Csv(t))
        }
    }
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChshEpr {
    #[arg(long, default_value_t = 10.0)]
    pub b: f64,
    #[arg(long, default_value_t = 0.1)]
    pub eps: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub q0: f64,
    #[arg(long, default_value_t = 5.0)]
    pub t_max: f64,
    #[arg(long, default_value_t = 50)]
    pub points: usize,
}

pub fn chsh_epr(p: &ChshEpr, seed: Option<u64>) -> Result<Output, CliError> {
    need(p.points >= 2, "points", "must be >= 2")?;
    need(p.t_max > 0.0, "t_max", "must be > 0")?;
    let ctx = |e| lib_error("chsh-epr", e);
    let e = wp::EprParams::new(p.b, p.eps, p.q0).map_err(ctx)?;
    for w in e.warnings() {
        eprintln!("cvphase: warning: {w}");
    }
    let ts = linspace(0.0, p.t_max, p.points);
    let grid: Vec<(f64, f64)> = ts.iter().flat_map(|a| ts.iter().map(move |b| (*a, *b))).collect();
    let mut t = Table::new("chsh-epr", params(p), seed, &[("t2", "time"), ("t2p", "time"), ("b", "dimensionless")]);
    t.rows = par_rows(&grid, |&(t2, t2p)| Ok(vec![t2, t2p, wp::epr_bell(&e, &wp::TimeSettings::new(0.0, t2, 0.0, t2p)?)?])).map_err(ctx)?;
    let max = t.rows.iter().map(|r| r[2]).fold(f64::NEG_INFINITY, f64::max);
    t.note("settings", "B(0, t2, 0, t2p)");
    t.note("max_b", format_float(max));
    for w in e.warnings() {
        t.note("warning", w);
    }
    Ok(Output::Csv(t))
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChshBell {
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub x_min: f64,
    #[arg(long, default_value_t = 2.0, allow_hyphen_values = true)]
    pub x_max: f64,
    #[arg(long, default_value_t = 400)]
    pub points: usize,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub q0: f64,
    /// N² of the state.
    #[arg(long, default_value_t = 1.0)]
    pub n_bell_sq: f64,
}

pub fn chsh_bell(p: &ChshBell, seed: Option<u64>) -> Result<Output, CliError> {
    need(p.points >= 2, "points", "must be >= 2")?;
    need(p.x_max > p.x_min, "x_max", "must exceed x_min")?;
    let ctx = |e| lib_error("chsh-bell", e);
    let bp = wp::BellStateParams::letter(p.q0, p.n_bell_sq).map_err(ctx)?;
    let xs = linspace(p.x_min, p.x_max, p.points);
    let mut t = Table::new(
        "chsh-bell",
        params(p),
        seed,
        &[("x", "time"), ("two_minus_B_over_N2", "dimensionless"), ("threeF_minus_F3", "dimensionless")],
    );
    t.rows = xs.iter().map(|&x| vec![x, (2.0 - wp::bell_chsh(&bp, x)) / p.n_bell_sq, wp::bell_chsh_scaled(x)]).collect();
    let root = wp::bell_violation_threshold(&bp).map_err(ctx)?;
    t.note("settings", "(-2x, x, 0, 3x)");
    t.note("root", format_float(root));
    Ok(Output::Csv(t))
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChshJohansen {
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub q0: f64,
    #[arg(long, default_value_t = -1.0, allow_hyphen_values = true)]
    pub p0: f64,
    #[arg(long, default_value_t = 1.0)]
    pub s: f64,
    #[arg(long, default_value_t = 1.0)]
    pub k: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub x_min: f64,
    #[arg(long, default_value_t = 3.0, allow_hyphen_values = true)]
    pub x_max: f64,
    #[arg(long, default_value_t = 301)]
    pub points: usize,
}

pub fn chsh_johansen(p: &ChshJohansen, seed: Option<u64>) -> Result<Output, CliError> {
    need(p.points >= 2, "points", "must be >= 2")?;
    need(p.x_max > p.x_min, "x_max", "must exceed x_min")?;
    let j = wp::JohansenParams::new(p.q0, p.p0, p.s, p.k).map_err(|e| lib_error("chsh-johansen", e))?;
    let xs = linspace(p.x_min, p.x_max, p.points);
    let mut t = Table::new(
        "chsh-johansen",
        params(p),
        seed,
        &[("x", "time"), ("naive_combo", "1/K"), ("correct_combo", "1/K"), ("two_minus_B_over_K", "1/K")],
    );
    t.rows = wp::johansen_combinations(&j, &xs)
        .into_iter()
        .map(|r| vec![r.x, r.naive_combo, r.correct_combo, r.two_minus_b_over_k])
        .collect();
    t.note("naive_combo", "3F(x) - F(3x)");
    t.note("correct_combo", "F(-x) + 2F(x) - F(3x)");
    Ok(Output::Csv(t))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Bw,
    Gkmr,
    Larsson,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PseudospinBell {
    #[arg(long, value_enum, default_value_t = Family::Bw)]
    pub family: Family,
    #[arg(long, default_value_t = 2.0)]
    pub r: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub phi: f64,
    /// Fock cutoff; 0 picks the smallest one with tail below 1e-10.
    #[arg(long, default_value_t = 0)]
    pub truncation: usize,
    /// Fixed Larsson bin width; when absent the width is swept.
    #[arg(long)]
    pub ell: Option<f64>,
    #[arg(long, default_value_t = 0.5)]
    pub ell_min: f64,
    #[arg(long, default_value_t = 5.0)]
    pub ell_max: f64,
    #[arg(long, default_value_t = 19)]
    pub ell_points: usize,
}

fn maximum_json(m: &BellMaximum) -> Value {
    json!({
        "settings": m.settings,
        "value": m.value,
        "correlation_xz": m.tensor.0,
        "history": m.history,
    })
}

pub fn pseudospin_bell(p: &PseudospinBell, seed: Option<u64>) -> Result<Output, CliError> {
    let ctx = |e| lib_error("pseudospin-bell", e);
    let sp = SqueezingParams::new(p.r, p.phi).map_err(ctx)?;
    let n = if p.truncation == 0 { default_truncation(p.r).map_err(ctx)? } else { p.truncation };
    need(n <= MAX_TRUNCATION, "truncation", "exceeds the supported maximum")?;
    let mut body = json!({
        "tool": format!("cvphase {VERSION}"),
        "command": "pseudospin-bell",
        "parameters": params(p),
        "seed": seed,
        "truncation": n,
        "angles": "polar angles in the x-z plane, ordered (n, n', m, m')",
    });
    let result = match p.family {
        Family::Bw => maximum_json(&maximize_bell(sp, &bw_triple(n).map_err(ctx)?).map_err(ctx)?),
        Family::Gkmr => maximum_json(&maximize_bell(sp, &gkmr_triple(n).map_err(ctx)?).map_err(ctx)?),
        Family::Larsson => match p.ell {
            Some(ell) => {
                let mut v = maximum_json(&maximize_bell(sp, &larsson_triple(n, ell).map_err(ctx)?).map_err(ctx)?);
                v["ell"] = json!(ell);
                v
            }
            None => {
                need(p.ell_points >= 1, "ell_points", "must be >= 1")?;
                need(p.ell_max >= p.ell_min, "ell_max", "must be >= ell_min")?;
                let grid = linspace(p.ell_min, p.ell_max, p.ell_points);
                let sw = larsson_ell_sweep_at(sp, &grid, n).map_err(ctx)?;
                let mut v = maximum_json(&sw.best);
                v["ell"] = json!(sw.best_ell);
                v["ell_sweep"] = json!(sw.values);
                v
            }
        },
    };
    body["result"] = result;
    Ok(Output::Json(body))
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeylCheck {
    #[arg(long, default_value_t = 1.0)]
    pub r: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub phi: f64,
    #[arg(long, default_value_t = 50)]
    pub count: usize,
    #[arg(long, default_value_t = 4)]
    pub max_degree: usize,
    #[arg(long, default_value_t = 3)]
    pub max_terms: usize,
}

pub fn weyl_check(p: &WeylCheck, seed: Option<u64>) -> Result<Output, CliError> {
    need(p.count >= 1, "count", "must be >= 1")?;
    let ctx = |e| lib_error("weyl-check", e);
    let sp = SqueezingParams::new(p.r, p.phi).map_err(ctx)?;
    let seed = seed.unwrap_or(1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let exprs = (0..p.count).map(|_| random_expression(&mut rng, p.max_degree, p.max_terms)).collect::<Result<Vec<_>, _>>().map_err(ctx)?;
    let st = covariance_from_squeezing(sp);
    let idx: Vec<usize> = (0..exprs.len()).collect();
    let mut t = Table::new(
        "weyl-check",
        params(p),
        Some(seed),
        &[
            ("index", "count"),
            ("degree", "count"),
            ("quantum_re", "dimensionless"),
            ("quantum_im", "dimensionless"),
            ("stochastic_re", "dimensionless"),
            ("stochastic_im", "dimensionless"),
            ("rel_diff", "dimensionless"),
        ],
    );
    t.rows = par_rows(&idx, |&i| {
        let e = &exprs[i];
        let q = quantum_average(e, sp)?;
        let s = stochastic_average(&weyl_transform(e)?, &st)?;
        Ok(vec![i as f64, e.degree() as f64, q.re, q.im, s.re, s.im, (q - s).norm() / s.norm().max(1.0)])
    })
    .map_err(ctx)?;
    let worst = t.rows.iter().map(|r| r[6]).fold(0.0, f64::max);
    t.note("max_rel_diff", format_float(worst));
    Ok(Output::Csv(t))
}
