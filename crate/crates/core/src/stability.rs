//! Modulation point, the quadratic and g/h identities, the cone-derived bounds
//! and the stability certificate of a single snapshot.

use serde::{Deserialize, Serialize};

use crate::admissible::{cone_check, CertificateReport};
use crate::error::{Error, Result};
use crate::functionals::{energy_e, energy_f, h_norm_distance};
use crate::grid::{GridFunction, UniformGrid};
use crate::helmholtz::SmoothedField;
use crate::waves::{sample_peakon, THETA_HALF_WIDTH, V_HALF_WIDTH};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    lo: f64,
    hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::InvalidInterval { lo, hi });
        }
        Ok(Self { lo, hi })
    }

    pub fn centered(z: f64, half_width: f64) -> Result<Self> {
        Self::new(z - half_width, z + half_width)
    }

    /// `Θ_z = [z − 6.7, z + 6.7]`.
    pub fn theta(z: f64) -> Self {
        Self { lo: z - THETA_HALF_WIDTH, hi: z + THETA_HALF_WIDTH }
    }

    /// `V_z = [z − ln√2, z + ln√2]`.
    pub fn concavity(z: f64) -> Self {
        Self { lo: z - V_HALF_WIDTH, hi: z + V_HALF_WIDTH }
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    /// Node indices inside the interval, in increasing `x` from `lo`,
    /// following the periodic grid. `None` if it wraps the whole period.
    fn nodes(&self, grid: &UniformGrid) -> Option<Vec<usize>> {
        if self.hi - self.lo >= grid.period() {
            return None;
        }
        let h = grid.spacing();
        let n = grid.len() as i64;
        let first = ((self.lo + grid.half_width()) / h).ceil() as i64;
        let last = ((self.hi + grid.half_width()) / h).floor() as i64;
        Some((first..=last).map(|k| k.rem_euclid(n) as usize).collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModulationPoint {
    pub xi: f64,
    #[serde(rename = "M")]
    pub m: f64,
    /// Sub-grid offset of `xi` from the argmax node.
    pub refinement: f64,
}

/// Grid argmax (smallest `x` on ties) refined by the parabola through the
/// peak node and its neighbours.
pub fn locate_max(v: &GridFunction) -> Result<ModulationPoint> {
    if v.max() == v.min() {
        return Err(Error::DegenerateProfile);
    }
    let grid = v.grid();
    let vals = v.values();
    let n = vals.len();
    let j = v.argmax();
    let (fm, f0, fp) = (vals[(j + n - 1) % n], vals[j], vals[(j + 1) % n]);
    let curvature = fm - 2.0 * f0 + fp;
    let (offset, m) = if curvature < 0.0 {
        let s = 0.5 * (fm - fp) / curvature;
        (s * grid.spacing(), f0 - 0.125 * (fm - fp) * (fm - fp) / curvature)
    } else {
        (0.0, f0)
    };
    Ok(ModulationPoint { xi: grid.wrap(grid.point(j) + offset), m, refinement: offset })
}

/// Newton iteration on `vₓ = 0` from the parabolic estimate, using cubic
/// interpolation of the spectral `vₓ` and `vₓₓ`.
pub fn refine_critical_point(field: &SmoothedField, start: ModulationPoint) -> ModulationPoint {
    let grid = field.v.grid();
    let h = grid.spacing();
    let node = start.xi - start.refinement;
    let mut x = start.xi;
    for _ in 0..20 {
        let slope = field.vx.interpolate(x);
        let curv = field.vxx.interpolate(x);
        if !(curv < 0.0) {
            break;
        }
        let step = (slope / curv).clamp(-h, h);
        let next = x - step;
        if grid.displacement(next, node).abs() > 1.5 * h {
            break;
        }
        x = grid.wrap(next);
        if step.abs() < 1e-15 * h.max(1.0) {
            break;
        }
    }
    ModulationPoint { xi: x, m: field.v.interpolate(x), refinement: grid.displacement(x, node) }
}

/// Modulation point of `u`: maximum of `v = (4−∂²)⁻¹u`, refined to a root of
/// `vₓ`.
pub fn modulation_point(u: &GridFunction) -> Result<ModulationPoint> {
    let field = SmoothedField::from_u(u);
    let start = locate_max(&field.v)?;
    Ok(refine_critical_point(&field, start))
}

fn median3(a: f64, b: f64, c: f64) -> f64 {
    a.max(b).min(a.min(b).max(c))
}

/// Strict local maxima of the 3-node median of `v` inside `window`; plateaus
/// left by the median count once.
pub fn count_local_maxima(v: &GridFunction, window: Interval) -> usize {
    let vals = v.values();
    let n = vals.len();
    let smoothed: Vec<f64> = (0..n).map(|j| median3(vals[(j + n - 1) % n], vals[j], vals[(j + 1) % n])).collect();
    let (seq, circular): (Vec<f64>, bool) = match window.nodes(v.grid()) {
        Some(idx) => (idx.into_iter().map(|j| smoothed[j]).collect(), false),
        None => (smoothed, true),
    };
    let mut runs: Vec<f64> = Vec::with_capacity(seq.len());
    for x in seq {
        if runs.last() != Some(&x) {
            runs.push(x);
        }
    }
    if circular && runs.len() > 1 && runs.first() == runs.last() {
        runs.pop();
    }
    let k = runs.len();
    if circular {
        (0..k).filter(|&i| k > 1 && runs[i] > runs[(i + k - 1) % k] && runs[i] > runs[(i + 1) % k]).count()
    } else {
        (1..k.saturating_sub(1)).filter(|&i| runs[i] > runs[i - 1] && runs[i] > runs[i + 1]).count()
    }
}

/// `|E(u) − E(φ_c) − ‖u − φ_c(·−ξ)‖²_H − 4c(v(ξ) − c/6)|` with `E(φ_c) = c²/3`.
pub fn quadratic_identity_residual(u: &GridFunction, c: f64, xi: f64) -> Result<f64> {
    let grid = u.grid();
    let v = SmoothedField::from_u(u).v;
    let v_xi = v.eval_at(grid.wrap(xi))?;
    let lhs = energy_e(u).primary - c * c / 3.0;
    let dist = h_norm_distance(u, &sample_peakon(grid, c, xi))?;
    let rhs = dist * dist + 4.0 * c * (v_xi - c / 6.0);
    Ok((lhs - rhs).abs())
}

fn piecewise(v: &GridFunction, xi: f64, left: impl Fn(usize) -> f64, right: impl Fn(usize) -> f64) -> GridFunction {
    let grid = v.grid();
    let switch = grid.nearest_index(grid.wrap(xi));
    let values = (0..grid.len())
        .map(|j| {
            if j == switch {
                0.5 * (left(j) + right(j))
            } else if grid.displacement(grid.point(j), xi) < 0.0 {
                left(j)
            } else {
                right(j)
            }
        })
        .collect();
    GridFunction::new(*grid, values).expect("finite branches")
}

/// `g = 2v + vₓₓ − 3vₓ` left of `ξ`, `2v + vₓₓ + 3vₓ` right of it; the node
/// nearest `ξ` takes the mean of both branches.
pub fn build_g(v: &GridFunction, vx: &GridFunction, vxx: &GridFunction, xi: f64) -> GridFunction {
    let (a, b, d) = (v.values(), vx.values(), vxx.values());
    piecewise(v, xi, |j| 2.0 * a[j] + d[j] - 3.0 * b[j], |j| 2.0 * a[j] + d[j] + 3.0 * b[j])
}

/// `h = −vₓₓ − 6vₓ + 16v` left of `ξ`, `−vₓₓ + 6vₓ + 16v` right of it.
pub fn build_h(v: &GridFunction, vx: &GridFunction, vxx: &GridFunction, xi: f64) -> GridFunction {
    let (a, b, d) = (v.values(), vx.values(), vxx.values());
    piecewise(v, xi, |j| -d[j] - 6.0 * b[j] + 16.0 * a[j], |j| -d[j] + 6.0 * b[j] + 16.0 * a[j])
}

/// The `g`, `h` pair at a critical point of `v` and both integral identities.
#[derive(Debug, Clone)]
pub struct GhAnalysis {
    pub g: GridFunction,
    pub h: GridFunction,
    /// `v(ξ)`
    pub m: f64,
    pub g_residual: f64,
    pub h_residual: f64,
    pub max_h: f64,
}

/// Builds `g`, `h` at `xi` and compares `∫g²` with `E − 12M²` and `∫hg²` with
/// `F − 144M³`. Requires `|vₓ(ξ)| ≤ 1e−6·6 max v`.
pub fn analyze_gh(u: &GridFunction, xi: f64) -> Result<GhAnalysis> {
    let grid = u.grid();
    let field = SmoothedField::from_u(u);
    let xi = grid.wrap(xi);
    let scale = 6.0 * field.v.max_abs();
    let slope = field.vx.interpolate(xi);
    let tolerance = 1e-6 * scale;
    if slope.abs() > tolerance {
        return Err(Error::NotCriticalPoint { slope: slope.abs(), tolerance });
    }
    let m = field.v.interpolate(xi);
    let g = build_g(&field.v, &field.vx, &field.vxx, xi);
    let h = build_h(&field.v, &field.vx, &field.vxx, xi);
    let g2 = g.mul(&g)?;
    let e = energy_e(u).primary;
    let f = energy_f(u).primary;
    let g_residual = (g2.integrate() - (e - 12.0 * m * m)).abs();
    let h_residual = (h.mul(&g2)?.integrate() - (f - 144.0 * m * m * m)).abs();
    let max_h = h.max();
    Ok(GhAnalysis { g, h, m, g_residual, h_residual, max_h })
}

pub fn identity_g_residual(u: &GridFunction, xi: f64) -> Result<f64> {
    Ok(analyze_gh(u, xi)?.g_residual)
}

pub fn identity_h_residual(u: &GridFunction, xi: f64) -> Result<f64> {
    Ok(analyze_gh(u, xi)?.h_residual)
}

/// `18M − max h`.
pub fn h_bound_margin(u: &GridFunction, xi: f64, c: f64) -> Result<f64> {
    if !(c > 0.0) {
        return Err(Error::NonPositiveSpeed(c));
    }
    let gh = analyze_gh(u, xi)?;
    Ok(18.0 * gh.m - gh.max_h)
}

/// `M³ − EM/4 + F/72`.
pub fn cubic_inequality_value(e: f64, f: f64, m: f64) -> f64 {
    m * m * m - e * m / 4.0 + f / 72.0
}

/// `(M − c/6)²(M + c/3)`, the cubic at `E = c²/3`, `F = 2c³/3`.
pub fn peakon_cubic(c: f64, m: f64) -> f64 {
    let d = m - c / 6.0;
    d * d * (m + c / 3.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailMargins {
    pub v_margin: f64,
    pub u_margin: f64,
}

/// `c/300` minus the sup of `v` and of `u` outside `Θ_ξ`.
pub fn tail_bounds(u: &GridFunction, xi: f64, c: f64) -> Result<TailMargins> {
    if !(c > 0.0) {
        return Err(Error::NonPositiveSpeed(c));
    }
    let grid = u.grid();
    let v = SmoothedField::from_u(u).v;
    let outside = |f: &GridFunction| {
        grid.points()
            .zip(f.values())
            .filter(|(x, _)| grid.displacement(*x, xi).abs() > THETA_HALF_WIDTH)
            .map(|(_, &y)| y)
            .fold(f64::NEG_INFINITY, f64::max)
    };
    Ok(TailMargins { v_margin: c / 300.0 - outside(&v), u_margin: c / 300.0 - outside(u) })
}

/// Sign structure of `v` around `ξ`: `vₓ ≥ 0` on `[ξ−6.7, ξ−ln√2]`,
/// `vₓ ≤ 0` on `[ξ+ln√2, ξ+6.7]`, `vₓₓ < 0` on `V_ξ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShapeMargins {
    pub flank_slope: f64,
    pub concavity: f64,
}

pub fn shape_margins(field: &SmoothedField, xi: f64) -> ShapeMargins {
    let grid = field.v.grid();
    let mut flank = f64::INFINITY;
    let mut concavity = f64::INFINITY;
    for (j, x) in grid.points().enumerate() {
        let d = grid.displacement(x, xi);
        let (vx, vxx) = (field.vx.values()[j], field.vxx.values()[j]);
        if (-THETA_HALF_WIDTH..=-V_HALF_WIDTH).contains(&d) {
            flank = flank.min(vx);
        } else if (V_HALF_WIDTH..=THETA_HALF_WIDTH).contains(&d) {
            flank = flank.min(-vx);
        }
        if d.abs() <= V_HALF_WIDTH {
            concavity = concavity.min(-vxx);
        }
    }
    ShapeMargins { flank_slope: flank, concavity }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub c: f64,
    #[serde(rename = "E")]
    pub e: f64,
    #[serde(rename = "F")]
    pub f: f64,
    pub xi: f64,
    #[serde(rename = "M")]
    pub m: f64,
    pub delta: f64,
    pub h_distance_to_peakon_at_xi: f64,
    pub quadratic_identity_residual: f64,
    pub g_identity_residual: f64,
    pub h_identity_residual: f64,
    pub h_sup_margin: f64,
    pub cubic_value: f64,
    pub local_max_count_on_theta: usize,
    pub tail_v_margin: f64,
    pub tail_u_margin: f64,
    pub cone: CertificateReport,
    pub shape: ShapeMargins,
    pub passed: bool,
    pub reasons: Vec<String>,
}

impl StabilityReport {
    pub const CSV_HEADER: &'static str = "c,E,F,xi,M,delta,h_distance,quadratic_residual,g_residual,h_residual,h_sup_margin,cubic_value,local_max_count,tail_v_margin,tail_u_margin,cone_slope_margin,cone_smooth_slope_margin,cone_peak_margin,flank_slope_margin,concavity_margin,passed";

    pub fn csv_row(&self) -> String {
        let nums = [
            self.c,
            self.e,
            self.f,
            self.xi,
            self.m,
            self.delta,
            self.h_distance_to_peakon_at_xi,
            self.quadratic_identity_residual,
            self.g_identity_residual,
            self.h_identity_residual,
            self.h_sup_margin,
            self.cubic_value,
        ];
        let tail = [
            self.tail_v_margin,
            self.tail_u_margin,
            self.cone.slope_margin.value,
            self.cone.smooth_slope_margin.value,
            self.cone.peak_margin.value,
            self.shape.flank_slope,
            self.shape.concavity,
        ];
        let fmt = |xs: &[f64]| xs.iter().map(|x| format!("{x:.16e}")).collect::<Vec<_>>().join(",");
        format!("{},{},{},{}", fmt(&nums), self.local_max_count_on_theta, fmt(&tail), self.passed)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

const MARGIN_TOL: f64 = 1e-3;

/// Full snapshot diagnosis against `φ_c`.
pub fn stability_certificate(u: &GridFunction, c: f64) -> Result<StabilityReport> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::NonPositiveSpeed(c));
    }
    let grid = u.grid();
    let field = SmoothedField::from_u(u);
    let point = refine_critical_point(&field, locate_max(&field.v)?);
    let xi = point.xi;
    let e = energy_e(u).primary;
    let f = energy_f(u).primary;
    let cone = cone_check(u);
    let shape = shape_margins(&field, xi);
    let tails = tail_bounds(u, xi, c)?;
    let count = count_local_maxima(&field.v, Interval::theta(xi));
    let quadratic = quadratic_identity_residual(u, c, xi)?;
    let h_distance = h_norm_distance(u, &sample_peakon(grid, c, xi))?;

    let mut reasons = Vec::new();
    let (g_res, h_res, h_margin) = match analyze_gh(u, xi) {
        Ok(gh) => (gh.g_residual, gh.h_residual, 18.0 * gh.m - gh.max_h),
        Err(err) => {
            reasons.push(err.to_string());
            (f64::NAN, f64::NAN, f64::NAN)
        }
    };
    let m = point.m;
    let cubic = cubic_inequality_value(e, f, m);

    if count != 1 {
        reasons.push(format!("{count} local maxima of v on Theta"));
    }
    let margins = [
        ("cone |u_x| <= u", cone.slope_margin.value),
        ("cone |v_x| <= 2v", cone.smooth_slope_margin.value),
        ("cone u <= 6v", cone.peak_margin.value),
        ("h <= 18M", h_margin),
        ("tail v <= c/300", tails.v_margin),
        ("tail u <= c/300", tails.u_margin),
        ("v_x sign on flanks", shape.flank_slope),
        ("v_xx < 0 on V", shape.concavity),
    ];
    for (name, value) in margins {
        if !(value >= -MARGIN_TOL * c) {
            reasons.push(format!("{name}: margin {value:e}"));
        }
    }
    let residuals = [
        ("quadratic identity", quadratic / (c * c)),
        ("g identity", g_res / (c * c)),
        ("h identity", h_res / (c * c * c)),
    ];
    for (name, value) in residuals {
        if !(value <= MARGIN_TOL) {
            reasons.push(format!("{name}: scaled residual {value:e}"));
        }
    }
    if !(cubic <= MARGIN_TOL * c * c * c) {
        reasons.push(format!("cubic inequality: value {cubic:e}"));
    }

    Ok(StabilityReport {
        c,
        e,
        f,
        xi,
        m,
        delta: c / 6.0 - m,
        h_distance_to_peakon_at_xi: h_distance,
        quadratic_identity_residual: quadratic,
        g_identity_residual: g_res,
        h_identity_residual: h_res,
        h_sup_margin: h_margin,
        cubic_value: cubic,
        local_max_count_on_theta: count,
        tail_v_margin: tails.v_margin,
        tail_u_margin: tails.u_margin,
        cone,
        shape,
        passed: reasons.is_empty(),
        reasons,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::admissible::{Atom, MeasureData};
    use crate::waves::{sample_smooth_peakon, smooth_peakon};

    fn grid() -> UniformGrid {
        UniformGrid::default()
    }

    #[test]
    fn interval_validation() {
        assert!(matches!(Interval::new(1.0, 1.0), Err(Error::InvalidInterval { .. })));
        let t = Interval::theta(0.5);
        assert_eq!((t.lo(), t.hi()), (0.5 - 6.7, 0.5 + 6.7));
        let w = Interval::centered(0.0, 2.0).unwrap();
        assert_eq!((w.lo(), w.hi()), (-2.0, 2.0));
    }

    #[test]
    fn locate_max_of_smooth_peakon() {
        let g = grid();
        let c = 1.5;
        let h = g.spacing();
        for (z, m_tol) in [(g.point(4300), 1e-8 * c), (2.0 + 0.3 * h, 0.05 * c * h * h * h)] {
            let v = sample_smooth_peakon(&g, c, z, 0).unwrap();
            let p = locate_max(&v).unwrap();
            assert!((p.m - c / 6.0).abs() <= m_tol, "{p:?}");
            assert!((p.xi - z).abs() <= h * h, "{p:?}");
            assert!(v.values().iter().all(|&x| p.m >= x - 1e-12));
        }
    }

    #[test]
    fn locate_max_half_cell() {
        let g = grid();
        let z = g.point(4000) + 0.5 * g.spacing();
        let v = sample_smooth_peakon(&g, 1.0, z, 0).unwrap();
        let p = locate_max(&v).unwrap();
        assert!((p.xi - z).abs() <= 1e-4 * g.spacing(), "{} vs {z}", p.xi);
    }

    #[test]
    fn locate_max_tie_break() {
        let g = UniformGrid::new(30.0, 1024).unwrap();
        let a = g.point(600) - g.point(512);
        let v = GridFunction::from_fn(g, |x| (-(x - a).powi(2)).exp() + (-(x + a).powi(2)).exp());
        let p = locate_max(&v).unwrap();
        assert!((p.xi + a).abs() < 1e-9, "{p:?}");
    }

    #[test]
    fn locate_max_rejects_constant() {
        let v = GridFunction::constant(grid(), 0.4);
        assert!(matches!(locate_max(&v), Err(Error::DegenerateProfile)));
    }

    #[test]
    fn local_maxima_counts() {
        let g = grid();
        let rho = sample_smooth_peakon(&g, 1.0, 1.0, 0).unwrap();
        assert_eq!(count_local_maxima(&rho, Interval::theta(1.0)), 1);
        let l = g.half_width();
        let wave = GridFunction::from_fn(g, |x| (4.0 * std::f64::consts::PI * x / l).cos());
        let full = Interval::new(-l, l).unwrap();
        assert_eq!(count_local_maxima(&wave, full), 4);
    }

    #[test]
    fn quadratic_identity_for_peakons() {
        let g = grid();
        let c = 1.0;
        let phi = sample_peakon(&g, c, 0.0);
        assert!(quadratic_identity_residual(&phi, c, 0.0).unwrap() <= 1e-3 * c * c);
        let (a, b) = (0.4, -0.9);
        let shifted = sample_peakon(&g, c, a);
        assert!(quadratic_identity_residual(&shifted, c, b).unwrap() <= 1e-3 * c * c);
        let d = h_norm_distance(&shifted, &sample_peakon(&g, c, b)).unwrap();
        let closed = 4.0 * c * (c / 6.0 - smooth_peakon(c, 0.0, b - a, 0).unwrap());
        assert!((d * d - closed).abs() <= 1e-3 * c * c, "{} vs {closed}", d * d);
    }

    #[test]
    fn g_and_h_of_peakon() {
        let g = grid();
        let c = 1.2;
        let u = sample_peakon(&g, c, 0.0);
        let p = modulation_point(&u).unwrap();
        let gh = analyze_gh(&u, p.xi).unwrap();
        assert!(gh.g.max_abs() <= 1e-3 * c);
        assert!(gh.h.sub(&u.scale(3.0)).unwrap().max_abs() <= 1e-3 * c);
        assert!(gh.g_residual <= 1e-3 * c * c);
        assert!(gh.h_residual <= 1e-3 * c * c * c);
        assert!((18.0 * gh.m - gh.max_h).abs() <= 1e-3 * c);
    }

    #[test]
    fn doubled_peakon_still_balances() {
        let g = grid();
        let u = sample_peakon(&g, 1.0, 0.0).scale(2.0);
        let p = modulation_point(&u).unwrap();
        assert!(identity_g_residual(&u, p.xi).unwrap() <= 1e-3);
    }

    #[test]
    fn constant_fields_give_constant_g_h() {
        let g = UniformGrid::new(30.0, 256).unwrap();
        let k = 0.7;
        let v = GridFunction::constant(g, k);
        let zero = GridFunction::zeros(g);
        let gg = build_g(&v, &zero, &zero, 0.3);
        let hh = build_h(&v, &zero, &zero, 0.3);
        assert!(gg.values().iter().all(|&x| (x - 2.0 * k).abs() < 1e-15));
        assert!(hh.values().iter().all(|&x| (x - 16.0 * k).abs() < 1e-14));
    }

    #[test]
    fn g_is_even_for_even_data() {
        let g = UniformGrid::new(30.0, 512).unwrap();
        let xi = g.point(256);
        let v = GridFunction::from_fn(g, |x| (-(x - xi).powi(2)).exp());
        let vx = v.spectral_derivative(1).unwrap();
        let vxx = v.spectral_derivative(2).unwrap();
        let gg = build_g(&v, &vx, &vxx, xi);
        for k in 1..200 {
            assert!((gg.values()[256 + k] - gg.values()[256 - k]).abs() < 1e-12);
        }
    }

    #[test]
    fn non_critical_point_is_rejected() {
        let u = sample_peakon(&grid(), 1.0, 0.0);
        assert!(matches!(identity_g_residual(&u, 0.5), Err(Error::NotCriticalPoint { .. })));
    }

    #[test]
    fn cubic_closed_forms() {
        let c: f64 = 1.7;
        let v = cubic_inequality_value(c * c / 3.0, 2.0 * c * c * c / 3.0, c / 6.0);
        assert!(v.abs() <= 1e-12);
        for i in 0..100 {
            let m = -0.5 + i as f64 * 0.013;
            let lhs = cubic_inequality_value(c * c / 3.0, 2.0 * c.powi(3) / 3.0, m);
            assert!((lhs - peakon_cubic(c, m)).abs() <= 1e-12);
        }
    }

    #[test]
    fn tails_of_peakon_and_far_atom() {
        let g = grid();
        let c = 1.0;
        let t = tail_bounds(&sample_peakon(&g, c, 0.0), 0.0, c).unwrap();
        let expected_v = c / 300.0 - smooth_peakon(c, 0.0, 6.7, 0).unwrap();
        assert!(t.v_margin > 0.0 && t.u_margin > 0.0);
        assert!((t.v_margin - expected_v).abs() < 2e-5 * c, "{t:?}");
        let y = MeasureData::new(g, vec![Atom::new(0.0, 2.0 * c), Atom::new(10.0, 0.1 * c)], None).unwrap();
        let t = tail_bounds(&y.synthesize_u().unwrap(), 0.0, c).unwrap();
        assert!(t.u_margin < 0.0);
    }

    #[test]
    fn certificate_of_peakon_passes() {
        let c = 1.0;
        let r = stability_certificate(&sample_peakon(&grid(), c, 0.0), c).unwrap();
        assert!(r.passed, "{:?}", r.reasons);
        assert!(r.delta <= 1e-6 * c);
        assert!(r.h_distance_to_peakon_at_xi <= 1e-3 * c);
        assert_eq!(r.csv_row().split(',').count(), StabilityReport::CSV_HEADER.split(',').count());
        assert!(r.to_json().unwrap().contains("\"local_max_count_on_theta\": 1"));
        assert!(matches!(
            stability_certificate(&sample_peakon(&grid(), c, 0.0), -1.0),
            Err(Error::NonPositiveSpeed(_))
        ));
    }

    #[test]
    fn certificate_flags_a_dip() {
        let g = grid();
        let c = 1.0;
        let u = sample_peakon(&g, c, 0.0)
            .sub(&GridFunction::from_fn(g, |x| 0.5 * (-((x - 2.0) / 0.3).powi(2)).exp()))
            .unwrap();
        let r = stability_certificate(&u, c).unwrap();
        assert!(!r.passed);
        assert!(r.reasons.iter().any(|s| s.starts_with("cone")), "{:?}", r.reasons);
    }
}
