//! Stability sweep: perturbed peakons at `‖u₀ − φ_c‖_H = ε²`, evolved and
//! compared with an unperturbed run on the same monitor lattice.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::admissible::{make_perturbed_peakon, MeasureData, PerturbationRecipe};
use crate::dynamics::{evolve_observed, least_squares_slope, EvolutionConfig, EvolutionTrace};
use crate::error::{Error, Result};
use crate::functionals::{ck_distances, h_norm_distance, CkDistances};
use crate::grid::{GridFunction, UniformGrid};
use crate::helmholtz::SmoothedField;
use crate::stability::modulation_point;

/// Upper end of the small-ε regime assumed by the stability argument.
pub const DEFAULT_EPS0: f64 = 0.1;

/// Envelope exponents for `(c0_u, c0_v, c1_v, c2_v)`.
pub const CK_EXPONENTS: [f64; 4] = [0.125, 0.125, 0.25, 0.125];

pub const DELTA_SLOPE_MIN: f64 = 0.8;
pub const DISTANCE_SLOPE_MIN: f64 = 0.4;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub grid: UniformGrid,
    pub c: f64,
    pub eps: Vec<f64>,
    pub recipe: PerturbationRecipe,
    pub evolution: EvolutionConfig,
    pub eps0: f64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            grid: UniformGrid::default(),
            c: 1.0,
            eps: vec![0.02, 0.04, 0.08],
            recipe: PerturbationRecipe::ExtraAtom { offset: 1.0 },
            evolution: EvolutionConfig { t_end: 10.0, ..Default::default() },
            eps0: DEFAULT_EPS0,
        }
    }
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.c > 0.0 && self.c.is_finite()) {
            return Err(Error::NonPositiveSpeed(self.c));
        }
        if self.eps.len() < 3 {
            return Err(Error::Config("need ≥3 values for slope fit".into()));
        }
        if let Some(&e) = self.eps.iter().find(|e| !(**e > 0.0 && **e < 1.0)) {
            return Err(Error::InvalidEpsilon(e));
        }
        self.evolution.validate()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub eps: f64,
    pub target_distance: f64,
    pub achieved_distance: f64,
    pub amplitude: f64,
    pub in_hypothesis: bool,
    /// `sup_t |M_ε(t) − M_0(t)|`.
    pub sup_delta: f64,
    /// `sup_t ‖u_ε(t) − u_0(t)(· − (ξ_ε − ξ_0))‖_H`.
    pub sup_h_distance: f64,
    /// `sup_t (c/6 − M_ε)`, unreferenced.
    pub raw_sup_delta: f64,
    /// `sup_t ‖u_ε − φ_c(·−ξ_ε)‖_H`, unreferenced.
    pub raw_sup_h_distance: f64,
    /// Distances of the unmollified initial data to the closed-form profiles.
    pub ck_initial: CkDistances,
    /// Sup over time of the distances to the translated reference run.
    pub ck_dynamic: CkDistances,
    pub min_y: f64,
    pub steps: usize,
}

impl SweepPoint {
    pub const CSV_HEADER: &'static str = "eps,target_distance,achieved_distance,amplitude,in_hypothesis,sup_delta,sup_h_distance,raw_sup_delta,raw_sup_h_distance,c0_u_initial,c0_v_initial,c1_v_initial,c2_v_initial,c0_u,c0_v,c1_v,c2_v,min_y,steps";

    pub fn csv_row(&self) -> String {
        let f = |x: f64| format!("{x:.16e}");
        let mut cells = vec![
            f(self.eps),
            f(self.target_distance),
            f(self.achieved_distance),
            f(self.amplitude),
            self.in_hypothesis.to_string(),
            f(self.sup_delta),
            f(self.sup_h_distance),
            f(self.raw_sup_delta),
            f(self.raw_sup_h_distance),
        ];
        cells.extend(self.ck_initial.as_array().into_iter().map(f));
        cells.extend(self.ck_dynamic.as_array().into_iter().map(f));
        cells.push(f(self.min_y));
        cells.push(self.steps.to_string());
        cells.join(",")
    }
}

/// Fitted-constant envelope `d(ε) ≤ K ε^p`, `K` taken at the largest ε.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Envelope {
    pub name: String,
    pub exponent: f64,
    pub constant: f64,
    pub worst_ratio: f64,
    pub passed: bool,
}

pub fn fit_envelope(name: &str, eps: &[f64], values: &[f64], exponent: f64) -> Envelope {
    let top = eps.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).map(|(i, _)| i).unwrap_or(0);
    let constant = values[top] / eps[top].powf(exponent);
    let worst_ratio = eps.iter().zip(values).map(|(e, v)| v / (constant * e.powf(exponent))).fold(0.0, f64::max);
    Envelope { name: name.to_string(), exponent, constant, worst_ratio, passed: worst_ratio <= 1.0 + 1e-9 }
}

fn log_slope(eps: &[f64], values: &[f64]) -> f64 {
    let x: Vec<f64> = eps.iter().map(|e| e.ln()).collect();
    let y: Vec<f64> = values.iter().map(|v| v.max(1e-300).ln()).collect();
    least_squares_slope(&x, &y)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub config: SweepConfig,
    pub points: Vec<SweepPoint>,
    /// Sup-in-time distance of the mollified reference run to `φ_c(·−ξ)`.
    pub reference_h_distance: f64,
    pub reference_delta: f64,
    pub fit_uses_in_hypothesis_only: bool,
    pub delta_slope: f64,
    pub distance_slope: f64,
    pub raw_delta_slope: f64,
    pub raw_distance_slope: f64,
    pub envelopes_initial: Vec<Envelope>,
    pub envelopes_dynamic: Vec<Envelope>,
    pub out_of_hypothesis: Vec<f64>,
    pub slopes_passed: bool,
    pub envelopes_passed: bool,
    pub passed: bool,
}

impl SweepSummary {
    pub fn write_csv<W: std::io::Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "{}", SweepPoint::CSV_HEADER)?;
        for p in &self.points {
            writeln!(w, "{}", p.csv_row())?;
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

struct Reference {
    times: Vec<f64>,
    xi: Vec<f64>,
    m: Vec<f64>,
    u: Vec<GridFunction>,
    trace: EvolutionTrace,
}

fn run_reference(cfg: &SweepConfig) -> Result<Reference> {
    let y0 = MeasureData::peakon(cfg.grid, cfg.c, 0.0)?;
    let mut snaps = Vec::new();
    let trace = evolve_observed(&y0, cfg.c, &cfg.evolution, |s| {
        snaps.push(s.u.clone());
        Ok(())
    })?;
    Ok(Reference {
        times: trace.times.clone(),
        xi: trace.xi_series.clone(),
        m: trace.m_series.clone(),
        u: snaps,
        trace,
    })
}

fn sup_ck(acc: &mut CkDistances, diff: &GridFunction) {
    let field = SmoothedField::from_u(diff);
    acc.c0_u = acc.c0_u.max(diff.max_abs());
    acc.c0_v = acc.c0_v.max(field.v.max_abs());
    acc.c1_v = acc.c1_v.max(field.vx.max_abs());
    acc.c2_v = acc.c2_v.max(field.vxx.max_abs());
}

fn run_point(cfg: &SweepConfig, reference: &Reference, eps: f64) -> Result<SweepPoint> {
    let perturbed = make_perturbed_peakon(cfg.grid, cfg.c, eps, cfg.recipe)?;
    let ck_initial = ck_distances(&perturbed.u0, cfg.c, 0.0)?;
    let mut sup_delta: f64 = 0.0;
    let mut sup_dist: f64 = 0.0;
    let mut ck = CkDistances { c0_u: 0.0, c0_v: 0.0, c1_v: 0.0, c2_v: 0.0 };
    let trace = evolve_observed(&perturbed.y0, cfg.c, &cfg.evolution, |s| {
        if reference.times.get(s.index) != Some(&s.time) {
            return Err(Error::Config("monitor lattice differs from the reference run".into()));
        }
        let point = modulation_point(s.u)?;
        let shift = cfg.grid.displacement(point.xi, reference.xi[s.index]);
        let aligned = reference.u[s.index].translate(shift);
        sup_delta = sup_delta.max((point.m - reference.m[s.index]).abs());
        sup_dist = sup_dist.max(h_norm_distance(s.u, &aligned)?);
        sup_ck(&mut ck, &s.u.sub(&aligned)?);
        Ok(())
    })?;
    Ok(SweepPoint {
        eps,
        target_distance: eps * eps,
        achieved_distance: perturbed.distance,
        amplitude: perturbed.amplitude,
        in_hypothesis: eps < cfg.eps0,
        sup_delta,
        sup_h_distance: sup_dist,
        raw_sup_delta: EvolutionTrace::sup(&trace.delta_series),
        raw_sup_h_distance: EvolutionTrace::sup(&trace.h_distance_series),
        ck_initial,
        ck_dynamic: ck,
        min_y: EvolutionTrace::inf(&trace.min_y_series),
        steps: trace.steps,
    })
}

/// Runs the reference evolution, then every ε in parallel on the ambient
/// rayon pool.
pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepSummary> {
    cfg.validate()?;
    let reference = run_reference(cfg)?;
    let points: Vec<SweepPoint> =
        cfg.eps.par_iter().map(|&eps| run_point(cfg, &reference, eps)).collect::<Result<_>>()?;
    Ok(summarize(cfg.clone(), points, &reference.trace))
}

fn summarize(config: SweepConfig, points: Vec<SweepPoint>, reference: &EvolutionTrace) -> SweepSummary {
    let inside: Vec<&SweepPoint> = points.iter().filter(|p| p.in_hypothesis).collect();
    let use_inside = inside.len() >= 3;
    let fit: Vec<&SweepPoint> = if use_inside { inside } else { points.iter().collect() };
    let eps: Vec<f64> = fit.iter().map(|p| p.eps).collect();
    let col = |f: fn(&SweepPoint) -> f64| fit.iter().map(|p| f(p)).collect::<Vec<f64>>();

    let delta_slope = log_slope(&eps, &col(|p| p.sup_delta));
    let distance_slope = log_slope(&eps, &col(|p| p.sup_h_distance));
    let raw_delta_slope = log_slope(&eps, &col(|p| p.raw_sup_delta));
    let raw_distance_slope = log_slope(&eps, &col(|p| p.raw_sup_h_distance));

    let names = ["c0_u", "c0_v", "c1_v", "c2_v"];
    let envelopes = |get: fn(&SweepPoint) -> [f64; 4]| -> Vec<Envelope> {
        (0..4)
            .map(|k| {
                let values: Vec<f64> = fit.iter().map(|p| get(p)[k]).collect();
                fit_envelope(names[k], &eps, &values, CK_EXPONENTS[k])
            })
            .collect()
    };
    let envelopes_initial = envelopes(|p| p.ck_initial.as_array());
    let envelopes_dynamic = envelopes(|p| p.ck_dynamic.as_array());

    let slopes_passed = delta_slope >= DELTA_SLOPE_MIN && distance_slope >= DISTANCE_SLOPE_MIN;
    let envelopes_passed = envelopes_initial.iter().chain(&envelopes_dynamic).all(|e| e.passed);
    let out_of_hypothesis = points.iter().filter(|p| !p.in_hypothesis).map(|p| p.eps).collect();
    SweepSummary {
        config,
        points,
        reference_h_distance: EvolutionTrace::sup(&reference.h_distance_series),
        reference_delta: EvolutionTrace::sup(&reference.delta_series),
        fit_uses_in_hypothesis_only: use_inside,
        delta_slope,
        distance_slope,
        raw_delta_slope,
        raw_distance_slope,
        envelopes_initial,
        envelopes_dynamic,
        out_of_hypothesis,
        slopes_passed,
        envelopes_passed,
        passed: slopes_passed,
    }
}
