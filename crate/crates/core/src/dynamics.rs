//! Pseudo-spectral method of lines for `u_t + ½∂ₓ(u²) + (3/2)(1−∂²)⁻¹∂ₓ(u²) = 0`
//! with RK4 in time, and the conservation / modulation monitors.

use std::io::Write;
use std::path::Path;
use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::Fft;
use serde::{Deserialize, Serialize};

use crate::admissible::MeasureData;
use crate::error::{Error, Result};
use crate::functionals::{energy_e, energy_f, h_norm_distance};
use crate::grid::{GridFunction, UniformGrid};
use crate::spectral::{plans, wavenumbers};
use crate::stability::modulation_point;
use crate::waves::sample_peakon;

/// Order of the exponential spectral filter `exp(−α(|κ|/κ_max)^36)`.
pub const FILTER_ORDER: i32 = 36;

/// Steps between refreshes of the CFL time step.
const DT_REFRESH: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EvolutionConfig {
    pub t_end: f64,
    pub cfl: f64,
    /// `α` in `exp(−α(|κ|/κ_max)^36)`; zero disables the filter.
    pub filter_strength: f64,
    /// Monitor interval in units of `cfl·h`.
    pub monitor_stride: usize,
    /// Standard deviation of the atom mollifier in grid cells.
    pub mollifier_cells: f64,
    /// Abort once `max|u|` exceeds this multiple of its initial value.
    pub blow_up_factor: f64,
}

impl Default for EvolutionConfig {
    fn default() -> Self {
        Self {
            t_end: 5.0,
            cfl: 0.3,
            filter_strength: 36.0,
            monitor_stride: 20,
            mollifier_cells: 4.0,
            blow_up_factor: 1e3,
        }
    }
}

impl EvolutionConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return bad(format!("t_end must be positive, got {}", self.t_end));
        }
        if !(self.cfl > 0.0 && self.cfl <= 1.0) {
            return bad(format!("cfl must lie in (0, 1], got {}", self.cfl));
        }
        if !(self.filter_strength >= 0.0 && self.filter_strength.is_finite()) {
            return bad(format!("filter_strength must be nonnegative, got {}", self.filter_strength));
        }
        if self.monitor_stride == 0 {
            return bad("monitor_stride must be at least 1".into());
        }
        if !(self.mollifier_cells > 0.0 && self.mollifier_cells.is_finite()) {
            return bad(format!("mollifier_cells must be positive, got {}", self.mollifier_cells));
        }
        if !(self.blow_up_factor > 0.0) {
            return bad(format!("blow_up_factor must be positive, got {}", self.blow_up_factor));
        }
        Ok(())
    }
}

/// Monitored quantities at each recorded time.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct EvolutionTrace {
    pub c_ref: f64,
    pub times: Vec<f64>,
    #[serde(rename = "E_series")]
    pub e_series: Vec<f64>,
    #[serde(rename = "F_series")]
    pub f_series: Vec<f64>,
    pub xi_series: Vec<f64>,
    #[serde(rename = "M_series")]
    pub m_series: Vec<f64>,
    pub delta_series: Vec<f64>,
    pub h_distance_series: Vec<f64>,
    /// Minimum of `y` tested against the mollifier Gaussian.
    pub min_y_series: Vec<f64>,
    /// Minimum of the pointwise spectral `y`; diagnostic only.
    pub min_y_pointwise_series: Vec<f64>,
    /// Total variation of `uₓ`; diagnostic only.
    pub tv_ux_series: Vec<f64>,
    pub steps: usize,
}

impl EvolutionTrace {
    pub const CSV_HEADER: &'static str = "t,E,F,xi,M,delta,h_distance,min_y";

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "{}", Self::CSV_HEADER)?;
        for i in 0..self.len() {
            let row = [
                self.times[i],
                self.e_series[i],
                self.f_series[i],
                self.xi_series[i],
                self.m_series[i],
                self.delta_series[i],
                self.h_distance_series[i],
                self.min_y_series[i],
            ];
            let cells: Vec<String> = row.iter().map(|x| format!("{x:.16e}")).collect();
            writeln!(w, "{}", cells.join(","))?;
        }
        Ok(())
    }

    pub fn save_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let file = std::io::BufWriter::new(std::fs::File::create(path)?);
        self.write_csv(file)
    }

    /// `max |s(t) − s(0)| / |s(0)|`.
    pub fn max_relative_drift(series: &[f64]) -> f64 {
        match series.first() {
            Some(&s0) => series.iter().map(|s| (s - s0).abs()).fold(0.0, f64::max) / s0.abs().max(1e-300),
            None => 0.0,
        }
    }

    /// `ξ(t)` with periodic jumps removed.
    pub fn unwrapped_xi(&self, period: f64) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.xi_series.len());
        let mut offset = 0.0;
        for (i, &x) in self.xi_series.iter().enumerate() {
            if i > 0 {
                let prev = self.xi_series[i - 1];
                let jump = x - prev;
                offset -= period * (jump / period).round();
            }
            out.push(x + offset);
        }
        out
    }

    /// Least-squares slope of the unwrapped `ξ(t)`.
    pub fn xi_slope(&self, period: f64) -> f64 {
        least_squares_slope(&self.times, &self.unwrapped_xi(period))
    }

    pub fn sup(series: &[f64]) -> f64 {
        series.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn inf(series: &[f64]) -> f64 {
        series.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

pub fn least_squares_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

/// Scratch buffers reused across right-hand-side evaluations.
struct Workspace {
    spec: Vec<Complex64>,
    pad: Vec<Complex64>,
    scratch: Vec<Complex64>,
}

/// Spectral right-hand side and RK4 stepper on a fixed grid.
pub struct DpSolver {
    grid: UniformGrid,
    cfl: f64,
    nonlocal: Vec<Complex64>,
    filter: Vec<f64>,
    forward_n: Arc<dyn Fft<f64>>,
    inverse_n: Arc<dyn Fft<f64>>,
    forward_m: Arc<dyn Fft<f64>>,
    inverse_m: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for DpSolver {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("DpSolver").field("grid", &self.grid).field("cfl", &self.cfl).finish()
    }
}

impl DpSolver {
    pub fn new(grid: UniformGrid, cfl: f64, filter_strength: f64) -> Self {
        let n = grid.len();
        let h = grid.spacing();
        let kappa = wavenumbers(n, h);
        let kmax = std::f64::consts::PI / h;
        // Multiplier of −½∂ₓ − (3/2)(1−∂²)⁻¹∂ₓ on (u²)^.
        let nonlocal = kappa
            .iter()
            .enumerate()
            .map(|(j, &k)| {
                if j == n / 2 {
                    Complex64::new(0.0, 0.0)
                } else {
                    Complex64::new(0.0, -k * (0.5 + 1.5 / (1.0 + k * k)))
                }
            })
            .collect();
        let filter = kappa.iter().map(|&k| (-filter_strength * (k.abs() / kmax).powi(FILTER_ORDER)).exp()).collect();
        let m = 3 * n / 2;
        let (pn, pm) = (plans(n), plans(m));
        Self {
            grid,
            cfl,
            nonlocal,
            filter,
            forward_n: pn.forward,
            inverse_n: pn.inverse,
            forward_m: pm.forward,
            inverse_m: pm.inverse,
        }
    }

    pub fn for_config(grid: UniformGrid, cfg: &EvolutionConfig) -> Self {
        Self::new(grid, cfg.cfl, cfg.filter_strength)
    }

    pub fn grid(&self) -> &UniformGrid {
        &self.grid
    }

    fn workspace(&self) -> Workspace {
        let n = self.grid.len();
        let m = 3 * n / 2;
        let scratch_len = [&self.forward_n, &self.inverse_n, &self.forward_m, &self.inverse_m]
            .iter()
            .map(|p| p.get_inplace_scratch_len())
            .max()
            .unwrap_or(0);
        Workspace {
            spec: vec![Complex64::new(0.0, 0.0); n],
            pad: vec![Complex64::new(0.0, 0.0); m],
            scratch: vec![Complex64::new(0.0, 0.0); scratch_len],
        }
    }

    /// Dealiased `(u²)^` by 3/2 zero-padding, then the DP multiplier.
    fn rhs_into(&self, u: &[f64], out: &mut [f64], ws: &mut Workspace) {
        let n = u.len();
        let m = 3 * n / 2;
        let half = n / 2;
        for (z, &x) in ws.spec.iter_mut().zip(u) {
            *z = Complex64::new(x, 0.0);
        }
        self.forward_n.process_with_scratch(&mut ws.spec, &mut ws.scratch);
        ws.pad.iter_mut().for_each(|z| *z = Complex64::new(0.0, 0.0));
        ws.pad[..half].copy_from_slice(&ws.spec[..half]);
        ws.pad[m - half + 1..].copy_from_slice(&ws.spec[half + 1..]);
        self.inverse_m.process_with_scratch(&mut ws.pad, &mut ws.scratch);
        let to_physical = 1.0 / n as f64;
        for z in ws.pad.iter_mut() {
            let x = z.re * to_physical;
            *z = Complex64::new(x * x, 0.0);
        }
        self.forward_m.process_with_scratch(&mut ws.pad, &mut ws.scratch);
        let back = n as f64 / m as f64;
        ws.spec.iter_mut().for_each(|z| *z = Complex64::new(0.0, 0.0));
        for j in (0..half).chain(half + 1..n) {
            let src = if j < half { j } else { j + m - n };
            ws.spec[j] = ws.pad[src] * back * self.nonlocal[j];
        }
        self.inverse_n.process_with_scratch(&mut ws.spec, &mut ws.scratch);
        for (o, z) in out.iter_mut().zip(&ws.spec) {
            *o = z.re * to_physical;
        }
    }

    fn apply_filter(&self, u: &mut [f64], ws: &mut Workspace) {
        let n = u.len();
        for (z, &x) in ws.spec.iter_mut().zip(u.iter()) {
            *z = Complex64::new(x, 0.0);
        }
        self.forward_n.process_with_scratch(&mut ws.spec, &mut ws.scratch);
        for (z, &f) in ws.spec.iter_mut().zip(&self.filter) {
            *z *= f;
        }
        self.inverse_n.process_with_scratch(&mut ws.spec, &mut ws.scratch);
        for (o, z) in u.iter_mut().zip(&ws.spec) {
            *o = z.re / n as f64;
        }
    }

    pub fn rhs(&self, u: &GridFunction) -> Result<GridFunction> {
        if u.grid() != &self.grid {
            return Err(Error::GridMismatch);
        }
        let mut out = vec![0.0; u.len()];
        self.rhs_into(u.values(), &mut out, &mut self.workspace());
        GridFunction::new(self.grid, out)
    }

    /// `cfl·h / max|u|`.
    pub fn max_dt(&self, u: &GridFunction) -> f64 {
        let peak = u.max_abs();
        if peak > 0.0 {
            self.cfl * self.grid.spacing() / peak
        } else {
            f64::INFINITY
        }
    }

    fn rk4_in_place(&self, u: &mut [f64], dt: f64, ws: &mut Workspace, k: &mut [Vec<f64>; 5]) {
        let [k1, k2, k3, k4, tmp] = k;
        self.rhs_into(u, k1, ws);
        for j in 0..u.len() {
            tmp[j] = u[j] + 0.5 * dt * k1[j];
        }
        self.rhs_into(tmp, k2, ws);
        for j in 0..u.len() {
            tmp[j] = u[j] + 0.5 * dt * k2[j];
        }
        self.rhs_into(tmp, k3, ws);
        for j in 0..u.len() {
            tmp[j] = u[j] + dt * k3[j];
        }
        self.rhs_into(tmp, k4, ws);
        for j in 0..u.len() {
            u[j] += dt / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
        }
        self.apply_filter(u, ws);
    }

    /// One filtered RK4 step; rejects `dt > cfl·h/max|u|`.
    pub fn step_rk4(&self, u: &GridFunction, dt: f64) -> Result<GridFunction> {
        if u.grid() != &self.grid {
            return Err(Error::GridMismatch);
        }
        let max_dt = self.max_dt(u);
        if !(dt > 0.0 && dt <= max_dt) {
            return Err(Error::TimeStepTooLarge { dt, max_dt });
        }
        let n = u.len();
        let mut ws = self.workspace();
        let mut k = std::array::from_fn(|_| vec![0.0; n]);
        let mut vals = u.values().to_vec();
        self.rk4_in_place(&mut vals, dt, &mut ws, &mut k);
        GridFunction::new(self.grid, vals)
    }
}

/// `−½∂ₓ(u²) − (3/2)(1−∂²)⁻¹∂ₓ(u²)` with default solver settings.
pub fn dp_rhs(u: &GridFunction) -> GridFunction {
    let cfg = EvolutionConfig::default();
    DpSolver::for_config(*u.grid(), &cfg).rhs(u).expect("grid matches")
}

/// One RK4 step with the default CFL bound and filter.
pub fn step_rk4(u: &GridFunction, dt: f64) -> Result<GridFunction> {
    DpSolver::for_config(*u.grid(), &EvolutionConfig::default()).step_rk4(u, dt)
}

/// Minimum of `y = (1−∂²)u` after smoothing with a Gaussian of standard
/// deviation `width`, and the pointwise spectral minimum.
pub fn min_momentum(u: &GridFunction, width: f64) -> (f64, f64) {
    let weak = u.apply_multiplier(crate::spectral::Parity::Even, |k| {
        Complex64::new((1.0 + k * k) * (-0.5 * k * k * width * width).exp(), 0.0)
    });
    let raw = u.apply_multiplier(crate::spectral::Parity::Even, |k| Complex64::new(1.0 + k * k, 0.0));
    (weak.min(), raw.min())
}

fn total_variation_of_slope(u: &GridFunction) -> f64 {
    let ux = u.spectral_derivative(1).expect("order 1");
    let v = ux.values();
    let n = v.len();
    (0..n).map(|j| (v[(j + 1) % n] - v[j]).abs()).sum()
}

/// Snapshot handed to evolution observers at each monitor time.
pub struct Snapshot<'a> {
    pub index: usize,
    pub time: f64,
    pub u: &'a GridFunction,
}

/// Mollified initial data for `y0`: atoms become Gaussians of `w = cells·h`.
pub fn mollified_initial_data(y0: &MeasureData, cfg: &EvolutionConfig) -> Result<GridFunction> {
    y0.mollify(cfg.mollifier_cells * y0.grid().spacing())?.synthesize_u()
}

/// Evolves from `y0`, recording monitors against `φ_{c_ref}`.
pub fn evolve(y0: &MeasureData, c_ref: f64, cfg: &EvolutionConfig) -> Result<EvolutionTrace> {
    evolve_observed(y0, c_ref, cfg, |_| Ok(()))
}

/// As [`evolve`], calling `observer` at every monitor time.
pub fn evolve_observed(
    y0: &MeasureData,
    c_ref: f64,
    cfg: &EvolutionConfig,
    observer: impl FnMut(Snapshot<'_>) -> Result<()>,
) -> Result<EvolutionTrace> {
    cfg.validate()?;
    let u0 = mollified_initial_data(y0, cfg)?;
    evolve_from(u0, c_ref, cfg, observer)
}

/// Evolves grid data directly. Monitor times lie on the lattice
/// `k·stride·cfl·h`, independent of the solution, so runs on the same grid
/// share them.
pub fn evolve_from(
    u0: GridFunction,
    c_ref: f64,
    cfg: &EvolutionConfig,
    mut observer: impl FnMut(Snapshot<'_>) -> Result<()>,
) -> Result<EvolutionTrace> {
    cfg.validate()?;
    if !(c_ref > 0.0 && c_ref.is_finite()) {
        return Err(Error::NonPositiveSpeed(c_ref));
    }
    let grid = *u0.grid();
    let h = grid.spacing();
    let width = cfg.mollifier_cells * h;
    let solver = DpSolver::for_config(grid, cfg);
    let n = grid.len();
    let mut ws = solver.workspace();
    let mut k: [Vec<f64>; 5] = std::array::from_fn(|_| vec![0.0; n]);
    let limit = cfg.blow_up_factor * u0.max_abs();
    let interval = cfg.monitor_stride as f64 * cfg.cfl * h;
    let intervals = (cfg.t_end / interval - 1e-9).ceil().max(1.0) as usize;

    let mut trace = EvolutionTrace { c_ref, ..Default::default() };
    let mut u = u0;
    let record = |trace: &mut EvolutionTrace, t: f64, u: &GridFunction| -> Result<()> {
        let point = modulation_point(u)?;
        let (weak, raw) = min_momentum(u, width);
        trace.times.push(t);
        trace.e_series.push(energy_e(u).primary);
        trace.f_series.push(energy_f(u).primary);
        trace.xi_series.push(point.xi);
        trace.m_series.push(point.m);
        trace.delta_series.push(c_ref / 6.0 - point.m);
        trace.h_distance_series.push(h_norm_distance(u, &sample_peakon(&grid, c_ref, point.xi))?);
        trace.min_y_series.push(weak);
        trace.min_y_pointwise_series.push(raw);
        trace.tv_ux_series.push(total_variation_of_slope(u));
        Ok(())
    };
    record(&mut trace, 0.0, &u)?;
    observer(Snapshot { index: 0, time: 0.0, u: &u })?;

    let mut vals = u.values().to_vec();
    for i in 1..=intervals {
        let t_start = (i - 1) as f64 * interval;
        let t_stop = if i == intervals { cfg.t_end } else { i as f64 * interval };
        let mut t = t_start;
        let mut since_refresh = 0;
        let mut dt = 0.0;
        while t_stop - t > 1e-12 * interval {
            if since_refresh % DT_REFRESH == 0 {
                let peak = vals.iter().fold(0.0f64, |m, x| m.max(x.abs()));
                let dt_cfl = cfg.cfl * h / peak.max(1.0);
                let remaining = t_stop - t;
                dt = remaining / (remaining / dt_cfl).ceil();
            }
            solver.rk4_in_place(&mut vals, dt, &mut ws, &mut k);
            trace.steps += 1;
            since_refresh += 1;
            t += dt;
            let peak = vals.iter().fold(0.0f64, |m, x| if x.is_finite() { m.max(x.abs()) } else { f64::INFINITY });
            if !(peak <= limit) {
                return Err(Error::BlowUp { time: t, max_abs: peak, trace: Box::new(trace) });
            }
        }
        u = GridFunction::from_parts(grid, vals.clone());
        record(&mut trace, t_stop, &u)?;
        observer(Snapshot { index: i, time: t_stop, u: &u })?;
    }
    Ok(trace)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::admissible::Atom;

    fn mollified_peakon(grid: UniformGrid, c: f64) -> GridFunction {
        let y = MeasureData::peakon(grid, c, 0.0).unwrap();
        mollified_initial_data(&y, &EvolutionConfig::default()).unwrap()
    }

    #[test]
    fn rhs_of_trivial_states() {
        let g = UniformGrid::new(30.0, 256).unwrap();
        assert_eq!(dp_rhs(&GridFunction::zeros(g)).max_abs(), 0.0);
        assert!(dp_rhs(&GridFunction::constant(g, 0.8)).max_abs() < 1e-14);
    }

    #[test]
    fn rhs_is_travelling_wave_derivative() {
        let g = UniformGrid::new(30.0, 8192).unwrap();
        let c = 1.0;
        let u = mollified_peakon(g, c);
        let expected = u.spectral_derivative(1).unwrap().scale(-c);
        let err = dp_rhs(&u).sub(&expected).unwrap().max_abs();
        // The mollified profile is a travelling wave only up to O(w).
        assert!(err <= 0.1 * c * c, "{err}");
        let far = dp_rhs(&u)
            .sub(&expected)
            .unwrap()
            .values()
            .iter()
            .zip(g.points())
            .filter(|(_, x)| x.abs() > 1.0)
            .map(|(e, _)| e.abs())
            .fold(0.0, f64::max);
        assert!(far <= 1e-3 * c * c, "{far}");
    }

    #[test]
    fn step_checks_cfl() {
        let g = UniformGrid::new(30.0, 1024).unwrap();
        let u = mollified_peakon(g, 1.0);
        let err = step_rk4(&u, 1.0);
        assert!(matches!(err, Err(Error::TimeStepTooLarge { .. })), "{err:?}");
        assert_eq!(step_rk4(&GridFunction::zeros(g), 1e-3).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn one_step_matches_translation() {
        let g = UniformGrid::new(30.0, 8192).unwrap();
        let c = 1.0;
        let dt = 1e-3;
        let u = mollified_peakon(g, c);
        let stepped = step_rk4(&u, dt).unwrap();
        let err = stepped.sub(&u.translate(c * dt)).unwrap().max_abs();
        assert!(err <= 1e-4 * c, "{err}");
    }

    #[test]
    fn local_error_is_fifth_order() {
        let g = UniformGrid::new(30.0, 2048).unwrap();
        let u = mollified_peakon(g, 1.0);
        let solver = DpSolver::new(g, 0.3, 0.0);
        let reference = |dt: f64| {
            let mut w = u.clone();
            for _ in 0..32 {
                w = solver.step_rk4(&w, dt / 32.0).unwrap();
            }
            w
        };
        let err = |dt: f64| solver.step_rk4(&u, dt).unwrap().sub(&reference(dt)).unwrap().max_abs();
        let ratio = err(4e-3) / err(2e-3);
        assert!((24.0..=40.0).contains(&ratio), "{ratio}");
    }

    #[test]
    fn short_run_tracks_the_peakon() {
        let g = UniformGrid::new(30.0, 2048).unwrap();
        let y = MeasureData::peakon(g, 1.0, 0.0).unwrap();
        let cfg = EvolutionConfig { t_end: 1.0, ..Default::default() };
        let mut seen = Vec::new();
        let trace = evolve_observed(&y, 1.0, &cfg, |s| {
            seen.push(s.time);
            Ok(())
        })
        .unwrap();
        assert_eq!(seen, trace.times);
        assert!(trace.times.windows(2).all(|w| w[1] > w[0]));
        assert_eq!(*trace.times.last().unwrap(), 1.0);
        assert!((trace.xi_slope(g.period()) - 1.0).abs() < 0.02);
        assert!(EvolutionTrace::max_relative_drift(&trace.e_series) < 1e-3);
        assert!(EvolutionTrace::max_relative_drift(&trace.f_series) < 1e-3);
        let mut buf = Vec::new();
        trace.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("t,E,F,xi,M,delta,h_distance,min_y\n"));
        assert_eq!(text.lines().count(), trace.len() + 1);
    }

    #[test]
    fn zero_mass_is_rejected() {
        let g = UniformGrid::new(30.0, 256).unwrap();
        let y = MeasureData::new(g, vec![], None).unwrap();
        assert!(matches!(evolve(&y, 1.0, &EvolutionConfig::default()), Err(Error::TrivialMeasure)));
    }

    #[test]
    fn growth_beyond_the_limit_aborts_with_partial_trace() {
        let g = UniformGrid::new(30.0, 512).unwrap();
        let y = MeasureData::new(g, vec![Atom::new(0.0, 2.0)], None).unwrap();
        let cfg = EvolutionConfig { t_end: 1.0, blow_up_factor: 0.5, ..Default::default() };
        match evolve(&y, 1.0, &cfg) {
            Err(Error::BlowUp { trace, time, .. }) => {
                assert_eq!(trace.len(), 1);
                assert!(time > 0.0);
            }
            other => panic!("expected blow-up, got {:?}", other.map(|t| t.len())),
        }
        let bad = EvolutionConfig { cfl: 1.5, ..Default::default() };
        assert!(matches!(evolve(&y, 1.0, &bad), Err(Error::Config(_))));
    }

    #[test]
    fn slope_fit() {
        let x = [0.0, 1.0, 2.0, 3.0];
        let y = [1.0, 3.0, 5.0, 7.0];
        assert!((least_squares_slope(&x, &y) - 2.0).abs() < 1e-14);
    }
}
