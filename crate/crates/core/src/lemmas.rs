//! Identity and inequality battery on `φ_c` and a seeded admissible ensemble,
//! grouped per lemma.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::admissible::{cone_check, perturbed_ensemble, EnsembleMember};
use crate::error::{Error, Result};
use crate::functionals::{ck_distances, energy_e, energy_f, h_norm_distance};
use crate::grid::{GridFunction, UniformGrid};
use crate::helmholtz::{resolvent_identity_residual, SmoothedField};
use crate::stability::{
    analyze_gh, count_local_maxima, cubic_inequality_value, modulation_point, quadratic_identity_residual,
    shape_margins, tail_bounds, Interval,
};
use crate::waves::{sample_peakon, sample_smooth_peakon, smooth_peakon};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LemmaConfig {
    pub grid: UniformGrid,
    pub c: f64,
    pub members: usize,
    pub eps_min: f64,
    pub eps_max: f64,
    pub seed: u64,
}

impl Default for LemmaConfig {
    fn default() -> Self {
        Self { grid: UniformGrid::default(), c: 1.0, members: 100, eps_min: 0.005, eps_max: 0.05, seed: 1 }
    }
}

impl LemmaConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.c > 0.0 && self.c.is_finite()) {
            return Err(Error::NonPositiveSpeed(self.c));
        }
        if !(0.0 < self.eps_min && self.eps_min <= self.eps_max && self.eps_max < 1.0) {
            return Err(Error::Config(format!(
                "eps range must satisfy 0 < eps_min <= eps_max < 1, got [{}, {}]",
                self.eps_min, self.eps_max
            )));
        }
        Ok(())
    }
}

/// One comparison: `value ≤ bound` for `Upper`, `value ≥ bound` for `Lower`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub bound: f64,
    pub kind: BoundKind,
    pub passed: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundKind {
    Upper,
    Lower,
}

impl Check {
    fn upper(name: &str, value: f64, bound: f64) -> Self {
        Self { name: name.into(), value, bound, kind: BoundKind::Upper, passed: value <= bound }
    }

    fn lower(name: &str, value: f64, bound: f64) -> Self {
        Self { name: name.into(), value, bound, kind: BoundKind::Lower, passed: value >= bound }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LemmaResult {
    pub lemma: String,
    pub passed: bool,
    pub checks: Vec<Check>,
}

impl LemmaResult {
    fn new(lemma: &str, checks: Vec<Check>) -> Self {
        Self { lemma: lemma.into(), passed: checks.iter().all(|c| c.passed), checks }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LemmaReport {
    pub config: LemmaConfig,
    pub ensemble_error: Option<String>,
    /// Worst value of each headline residual or margin over `φ_c` and the ensemble.
    pub summary: BTreeMap<String, f64>,
    pub lemmas: Vec<LemmaResult>,
    pub passed: bool,
}

impl LemmaReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn lemma(&self, name: &str) -> Option<&LemmaResult> {
        self.lemmas.iter().find(|l| l.lemma == name)
    }

    pub fn check(&self, lemma: &str, name: &str) -> Option<&Check> {
        self.lemma(lemma)?.checks.iter().find(|c| c.name == name)
    }
}

/// Per-sample quantities shared by several lemmas.
struct Sample {
    u: GridFunction,
    xi: f64,
    e: f64,
    f: f64,
    e_gap_rel: f64,
    f_gap_rel: f64,
    g_residual: f64,
    h_residual: f64,
    m: f64,
    max_h: f64,
    field: SmoothedField,
    analysis_error: bool,
}

fn analyze(u: GridFunction) -> Sample {
    let field = SmoothedField::from_u(&u);
    let e = energy_e(&u);
    let f = energy_f(&u);
    let point = modulation_point(&u);
    let (xi, gh) = match point {
        Ok(p) => (p.xi, analyze_gh(&u, p.xi).ok()),
        Err(_) => (0.0, None),
    };
    let nan = f64::NAN;
    let (g_residual, h_residual, m, max_h) = match &gh {
        Some(a) => (a.g_residual, a.h_residual, a.m, a.max_h),
        None => (nan, nan, nan, nan),
    };
    Sample {
        u,
        xi,
        e: e.primary,
        f: f.primary,
        e_gap_rel: e.relative_gap(),
        f_gap_rel: f.relative_gap(),
        g_residual,
        h_residual,
        m,
        max_h,
        field,
        analysis_error: gh.is_none(),
    }
}

/// NaN-aware maximum and minimum, so failed evaluations fail the check.
fn worst_max(values: impl Iterator<Item = f64>) -> f64 {
    values.fold(f64::NEG_INFINITY, |a, b| if b.is_nan() || a.is_nan() { f64::NAN } else { a.max(b) })
}

fn worst_min(values: impl Iterator<Item = f64>) -> f64 {
    values.fold(f64::INFINITY, |a, b| if b.is_nan() || a.is_nan() { f64::NAN } else { a.min(b) })
}

/// Discrete Gagliardo–Nirenberg bound `‖w‖∞² ≤ ‖w‖·‖D₊w‖`; returns
/// `‖w‖·‖D₊w‖ − ‖w‖∞²`.
fn gagliardo_nirenberg_margin(w: &GridFunction) -> f64 {
    let h = w.grid().spacing();
    let vals = w.values();
    let n = vals.len();
    let l2 = w.norms().l2;
    let d: f64 = (0..n).map(|j| ((vals[(j + 1) % n] - vals[j]) / h).powi(2)).sum::<f64>() * h;
    let inf = w.max_abs();
    l2 * d.sqrt() - inf * inf
}

fn sobolev_margin(sup: f64, h_dist: f64) -> f64 {
    h_dist / 2f64.sqrt() - sup
}

pub fn run_lemmas(cfg: &LemmaConfig) -> Result<LemmaReport> {
    cfg.validate()?;
    let grid = cfg.grid;
    let c = cfg.c;
    let c2 = c * c;
    let c3 = c2 * c;
    let phi = sample_peakon(&grid, c, 0.0);
    let peak = analyze(phi.clone());

    let (members, ensemble_error): (Vec<EnsembleMember>, Option<String>) =
        match perturbed_ensemble(grid, c, cfg.members, (cfg.eps_min, cfg.eps_max), cfg.seed) {
            Ok(m) => (m, None),
            Err(e) => (Vec::new(), Some(e.to_string())),
        };
    let ensemble: Vec<Sample> = members.iter().map(|m| analyze(m.data.u0.clone())).collect();
    let ens_ok = if ensemble_error.is_some() || ensemble.is_empty() { f64::NAN } else { 0.0 };
    let over = |f: &dyn Fn(&Sample) -> f64| worst_max(ensemble.iter().map(f)) + ens_ok;
    let under = |f: &dyn Fn(&Sample) -> f64| worst_min(ensemble.iter().map(f)) + ens_ok;

    let mut lemmas = Vec::new();

    lemmas.push(LemmaResult::new(
        "energies",
        vec![
            Check::upper("E(phi_c) relative error", (peak.e - c2 / 3.0).abs() / (c2 / 3.0), 1e-3),
            Check::upper("F(phi_c) relative error", (peak.f - 2.0 * c3 / 3.0).abs() / (2.0 * c3 / 3.0), 1e-3),
            Check::upper("E form gap (ensemble, relative)", over(&|s| s.e_gap_rel), 1e-3),
            Check::upper("F form gap (ensemble, relative)", over(&|s| s.f_gap_rel), 1e-3),
        ],
    ));

    let band = GridFunction::from_fn(grid, |x| {
        let l = grid.half_width();
        let k = std::f64::consts::PI / l;
        (3.0 * k * x).sin() + 0.5 * (7.0 * k * x).cos() + 0.2 * (k * x).cos()
    });
    lemmas.push(LemmaResult::new(
        "resolvent_identity",
        vec![
            Check::upper("resolvent residual on phi_c", resolvent_identity_residual(&phi), 1e-10),
            Check::upper("resolvent residual on band-limited data", resolvent_identity_residual(&band), 1e-10),
        ],
    ));

    let shifted = |a: f64, b: f64| -> Result<f64> { quadratic_identity_residual(&sample_peakon(&grid, c, a), c, b) };
    let mut pair_worst: f64 = 0.0;
    for k in 0..50 {
        let a = -2.0 + 0.083 * k as f64;
        let b = 1.5 - 0.061 * k as f64;
        pair_worst = pair_worst.max(shifted(a, b)?);
    }
    lemmas.push(LemmaResult::new(
        "quadratic_identity",
        vec![
            Check::upper("quadratic identity on phi_c / c^2", quadratic_identity_residual(&phi, c, 0.0)? / c2, 1e-3),
            Check::upper("quadratic identity on shifted pairs / c^2", pair_worst / c2, 1e-3),
            Check::upper(
                "quadratic identity on ensemble / c^2",
                over(&|s| {
                    let xi = s.xi + 0.5 * (s.e * 100.0).sin();
                    quadratic_identity_residual(&s.u, c, xi).unwrap_or(f64::NAN) / c2
                }),
                1e-3,
            ),
        ],
    ));

    let pp1 = |s: &Sample| -> [f64; 4] {
        let d = match ck_distances(&s.u, c, 0.0) {
            Ok(d) => d,
            Err(_) => return [f64::NAN; 4],
        };
        let hd = h_norm_distance(&s.u, &phi).unwrap_or(f64::NAN);
        let du = s.u.sub(&phi).expect("same grid");
        let rho2 = sample_smooth_peakon(&grid, c, 0.0, 2).expect("order 2");
        let dv2 = s.field.vxx.sub(&rho2).expect("same grid");
        [
            sobolev_margin(d.c0_v, hd),
            sobolev_margin(d.c1_v, hd),
            gagliardo_nirenberg_margin(&du),
            gagliardo_nirenberg_margin(&dv2),
        ]
    };
    let pp1_all: Vec<[f64; 4]> = ensemble.iter().map(pp1).collect();
    let pp1_min = |k: usize| worst_min(pp1_all.iter().map(|m| m[k])) + ens_ok;
    lemmas.push(LemmaResult::new(
        "distance_bounds",
        vec![
            Check::lower("C0 distance of v within H-distance/sqrt2 (margin)", pp1_min(0), -1e-6 * c),
            Check::lower("C1 distance of v within H-distance/sqrt2 (margin)", pp1_min(1), -1e-6 * c),
            Check::lower("C0 distance of u within Gagliardo-Nirenberg bound (margin)", pp1_min(2), -1e-9 * c2),
            Check::lower("C2 distance of v within Gagliardo-Nirenberg bound (margin)", pp1_min(3), -1e-9 * c2),
        ],
    ));

    let count = |s: &Sample| count_local_maxima(&s.field.v, Interval::theta(s.xi)) as f64;
    let cone = |s: &Sample| cone_check(&s.u).min_margin();
    let shape = |s: &Sample| shape_margins(&s.field, s.xi);
    let tails = |s: &Sample| tail_bounds(&s.u, s.xi, c).map(|t| t.v_margin.min(t.u_margin)).unwrap_or(f64::NAN);
    let peak_margin = cone_check(&phi).peak_margin;
    lemmas.push(LemmaResult::new(
        "unique_maximum",
        vec![
            Check::upper("local maxima on Theta for phi_c", count(&peak), 1.0),
            Check::lower("local maxima on Theta for phi_c (at least)", count(&peak), 1.0),
            Check::upper("max local maxima on Theta (ensemble)", over(&count), 1.0),
            Check::lower("min local maxima on Theta (ensemble)", under(&count), 1.0),
            Check::lower("cone margins for phi_c", cone(&peak), -1e-6 * c),
            Check::lower("cone margins (ensemble)", under(&cone), -1e-6 * c),
            Check::upper("u <= 6v margin at the crest of phi_c", peak_margin.value, 1e-4 * c),
            Check::lower("v_x sign on flanks (ensemble)", under(&|s| shape(s).flank_slope), -1e-6 * c),
            Check::lower("v_xx < 0 on V (ensemble)", under(&|s| shape(s).concavity), f64::MIN_POSITIVE),
            Check::lower("tail margins (ensemble)", under(&tails), f64::MIN_POSITIVE),
            Check::lower("tail margins for phi_c", tails(&peak), f64::MIN_POSITIVE),
        ],
    ));

    lemmas.push(LemmaResult::new(
        "g_identity",
        vec![
            Check::upper("g identity on phi_c / c^2", peak.g_residual / c2, 1e-3),
            Check::upper("sup |g| on phi_c / c", g_sup(&peak) / c, 1e-3),
            Check::upper("g identity on ensemble / c^2", over(&|s| s.g_residual) / c2, 1e-3),
        ],
    ));

    lemmas.push(LemmaResult::new(
        "h_identity",
        vec![
            Check::upper("h identity on phi_c / c^3", peak.h_residual / c3, 1e-3),
            Check::upper("sup |h - 3 phi_c| / c", h_deviation(&peak, &phi) / c, 1e-3),
            Check::upper("h identity on ensemble / c^3", over(&|s| s.h_residual) / c3, 1e-3),
        ],
    ));

    let h_margin = |s: &Sample| 18.0 * s.m - s.max_h;
    let cubic = |s: &Sample| cubic_inequality_value(s.e, s.f, s.m);
    let closed = cubic_inequality_value(c2 / 3.0, 2.0 * c3 / 3.0, c / 6.0);
    lemmas.push(LemmaResult::new(
        "cubic_bound",
        vec![
            Check::upper("|18M - max h| on phi_c / c", h_margin(&peak).abs() / c, 1e-3),
            Check::lower("18M - max h on ensemble / c", under(&h_margin) / c, -1e-3),
            Check::upper("cubic on ensemble / c^3", over(&cubic) / c3, 1e-3),
            Check::upper("cubic at peakon energies (closed form)", closed.abs(), 1e-12),
            Check::upper(
                "cubic identity vs factored form (closed form)",
                (0..100)
                    .map(|i| {
                        let m = c * (-0.5 + 0.013 * i as f64);
                        let d = m - c / 6.0;
                        (cubic_inequality_value(c2 / 3.0, 2.0 * c3 / 3.0, m) - d * d * (m + c / 3.0)).abs()
                    })
                    .fold(0.0, f64::max),
                1e-12 * c3.max(1.0),
            ),
        ],
    ));

    let analysis_failures = ensemble.iter().chain(std::iter::once(&peak)).filter(|s| s.analysis_error).count();
    let mut sanity = vec![Check::upper("samples without a critical point", analysis_failures as f64, 0.0)];
    sanity.push(Check::upper("rho_c(0) - c/6 (closed form)", (smooth_peakon(c, 0.0, 0.0, 0)? - c / 6.0).abs(), 1e-12));
    lemmas.push(LemmaResult::new("setup", sanity));

    let worst = |a: f64, b: f64| if a.is_nan() || b.is_nan() { f64::NAN } else { a.max(b) };
    let least = |a: f64, b: f64| if a.is_nan() || b.is_nan() { f64::NAN } else { a.min(b) };
    let mut summary = BTreeMap::new();
    let mut put = |k: &str, v: f64| {
        summary.insert(k.to_string(), v);
    };
    put("E_relative_error", (peak.e - c2 / 3.0).abs() / (c2 / 3.0));
    put("F_relative_error", (peak.f - 2.0 * c3 / 3.0).abs() / (2.0 * c3 / 3.0));
    put("resolvent_identity_residual", resolvent_identity_residual(&phi).max(resolvent_identity_residual(&band)));
    put(
        "quadratic_identity_residual",
        lemmas
            .iter()
            .find(|l| l.lemma == "quadratic_identity")
            .expect("present")
            .checks
            .iter()
            .map(|k| k.value * c2)
            .fold(0.0, worst),
    );
    put("g_identity_residual", worst(peak.g_residual, over(&|s| s.g_residual)));
    put("h_identity_residual", worst(peak.h_residual, over(&|s| s.h_residual)));
    put("g_sup_on_peakon", g_sup(&peak));
    put("h_minus_3phi_sup_on_peakon", h_deviation(&peak, &phi));
    put("cone_margin", least(cone(&peak), under(&cone)));
    put("h_sup_margin", least(h_margin(&peak), under(&h_margin)));
    put("cubic_value", worst(cubic(&peak), over(&cubic)));
    put("tail_margin", least(tails(&peak), under(&tails)));
    put("local_max_count_max", worst(count(&peak), over(&count)));
    put("local_max_count_min", least(count(&peak), under(&count)));

    let passed = ensemble_error.is_none() && lemmas.iter().all(|l| l.passed);
    Ok(LemmaReport { config: cfg.clone(), ensemble_error, summary, lemmas, passed })
}

fn g_sup(s: &Sample) -> f64 {
    if s.analysis_error {
        return f64::NAN;
    }
    let g = crate::stability::build_g(&s.field.v, &s.field.vx, &s.field.vxx, s.xi);
    g.max_abs()
}

fn h_deviation(s: &Sample, phi: &GridFunction) -> f64 {
    if s.analysis_error {
        return f64::NAN;
    }
    let h = crate::stability::build_h(&s.field.v, &s.field.vx, &s.field.vxx, s.xi);
    h.sub(&phi.scale(3.0)).map(|d| d.max_abs()).unwrap_or(f64::NAN)
}
