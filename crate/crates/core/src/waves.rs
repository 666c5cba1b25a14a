//! Closed-form peakon `φ_c(x) = c e^{-|x|}` and smooth-peakon
//! `ρ_c = (4-∂²)⁻¹φ_c = (c/3)e^{-|x|} − (c/6)e^{-2|x|}`, plus the table of
//! profile landmarks used by the stability diagnostics.

use std::f64::consts::LN_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{GridFunction, UniformGrid};

/// Half width of the concentration window `Θ_z = [z − 6.7, z + 6.7]`.
pub const THETA_HALF_WIDTH: f64 = 6.7;

/// Half width of the concavity window `V_z = [z − ln√2, z + ln√2]`.
pub const V_HALF_WIDTH: f64 = 0.5 * LN_2;

/// `ln(20 / (20 − √399))`, the exact value that 6.7 approximates.
pub fn exact_theta() -> f64 {
    (20.0 / (20.0 - 399f64.sqrt())).ln()
}

/// `α ≃ β` in the sense `0.9β ≤ α ≤ 1.1β` (for β > 0).
pub fn approx_eq_band(alpha: f64, beta: f64) -> bool {
    let (lo, hi) = if beta >= 0.0 { (0.9 * beta, 1.1 * beta) } else { (1.1 * beta, 0.9 * beta) };
    alpha >= lo && alpha <= hi
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PeakonParams {
    c: f64,
    z: f64,
}

impl PeakonParams {
    pub fn new(c: f64, z: f64) -> Result<Self> {
        if c == 0.0 || !c.is_finite() {
            return Err(Error::ZeroSpeed);
        }
        Ok(Self { c, z })
    }

    /// Parameters for the stability experiments, which need `c > 0`.
    pub fn right_moving(c: f64, z: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::NonPositiveSpeed(c));
        }
        Ok(Self { c, z })
    }

    pub fn speed(&self) -> f64 {
        self.c
    }

    pub fn center(&self) -> f64 {
        self.z
    }
}

pub fn peakon(c: f64, z: f64, x: f64) -> f64 {
    c * (-(x - z).abs()).exp()
}

/// `φ_c'(x)`; undefined at the crest.
pub fn peakon_slope(c: f64, z: f64, x: f64) -> Option<f64> {
    let d = x - z;
    if d == 0.0 {
        None
    } else {
        Some(-d.signum() * c * (-d.abs()).exp())
    }
}

/// `ρ_c`, `ρ_c'` or `ρ_c''` at `x`. `ρ_c'(z)` is 0 by oddness.
pub fn smooth_peakon(c: f64, z: f64, x: f64, order: u32) -> Result<f64> {
    let d = x - z;
    let e1 = (-d.abs()).exp();
    let e2 = e1 * e1;
    match order {
        0 => Ok(c / 3.0 * e1 - c / 6.0 * e2),
        1 => Ok(if d == 0.0 { 0.0 } else { d.signum() * c / 3.0 * (e2 - e1) }),
        2 => Ok(c / 3.0 * e1 - 2.0 * c / 3.0 * e2),
        other => Err(Error::UnsupportedOrder(other)),
    }
}

/// `φ_c(· − z)` on the grid, centred periodically.
pub fn sample_peakon(grid: &UniformGrid, c: f64, z: f64) -> GridFunction {
    GridFunction::from_fn(*grid, |x| peakon(c, 0.0, grid.displacement(x, z)))
}

/// `ρ_c^{(order)}(· − z)` on the grid, centred periodically.
pub fn sample_smooth_peakon(grid: &UniformGrid, c: f64, z: f64, order: u32) -> Result<GridFunction> {
    if order > 2 {
        return Err(Error::UnsupportedOrder(order));
    }
    Ok(GridFunction::from_fn(*grid, |x| smooth_peakon(c, 0.0, grid.displacement(x, z), order).expect("order checked")))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Landmark {
    pub name: String,
    pub location: f64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LandmarkTable {
    pub entries: Vec<Landmark>,
}

impl LandmarkTable {
    pub fn get(&self, name: &str) -> Option<&Landmark> {
        self.entries.iter().find(|l| l.name == name)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Profile landmarks of `ρ_c` and the window constants, in closed form.
///
/// Edge entries are evaluated at `+6.7`, where `ρ_c'` is negative.
pub fn landmark_constants(c: f64) -> Result<LandmarkTable> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::NonPositiveSpeed(c));
    }
    let rho = |x: f64, k: u32| smooth_peakon(c, 0.0, x, k).expect("order in range");
    let ln4 = 2.0 * LN_2;
    let sqrt2 = 2f64.sqrt();
    let edge = THETA_HALF_WIDTH;
    let entry = |name: &str, location: f64, value: f64| Landmark { name: name.to_string(), location, value };
    Ok(LandmarkTable {
        entries: vec![
            entry("rho_max", 0.0, c / 6.0),
            entry("rho1_min", LN_2, -c / 12.0),
            entry("rho2_min", 0.0, -c / 3.0),
            entry("rho2_max_left", -ln4, c / 24.0),
            entry("rho2_max_right", ln4, c / 24.0),
            entry("rho2_zero_left", -LN_2, 0.0),
            entry("rho2_zero_right", LN_2, 0.0),
            entry("rho1_at_minus_v_edge", -V_HALF_WIDTH, (sqrt2 - 1.0) / 6.0 * c),
            entry("rho1_at_plus_v_edge", V_HALF_WIDTH, -(sqrt2 - 1.0) / 6.0 * c),
            entry("rho2_bound_on_V", V_HALF_WIDTH, (sqrt2 - 2.0) / 6.0 * c),
            entry("v_zone_edge", V_HALF_WIDTH, V_HALF_WIDTH),
            entry("theta_edge", edge, edge),
            entry("exact_theta", exact_theta(), exact_theta()),
            entry("rho_at_edge", edge, rho(edge, 0)),
            entry("rho1_at_edge", edge, rho(edge, 1)),
            entry("rho2_at_edge", edge, rho(edge, 2)),
            entry("phi_at_edge", edge, peakon(c, 0.0, edge)),
            entry("tail_bound", edge, c / 300.0),
        ],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const TIGHT: f64 = 1e-12;

    #[test]
    fn peakon_values() {
        assert_eq!(peakon(1.0, 0.0, 0.0), 1.0);
        assert!((peakon(2.0, 3.0, 3.0 + LN_2) - 1.0).abs() < TIGHT);
        let edge = peakon(1.0, 0.0, 6.7);
        assert!((edge - (-6.7f64).exp()).abs() < 1e-18);
        assert!(approx_eq_band(edge, 1.2e-3), "{edge}");
    }

    #[test]
    fn params_validation() {
        assert!(matches!(PeakonParams::new(0.0, 1.0), Err(Error::ZeroSpeed)));
        assert!(PeakonParams::new(-1.0, 0.0).is_ok());
        assert!(matches!(PeakonParams::right_moving(-1.0, 0.0), Err(Error::NonPositiveSpeed(_))));
        let p = PeakonParams::right_moving(2.0, 0.5).unwrap();
        assert_eq!((p.speed(), p.center()), (2.0, 0.5));
    }

    #[test]
    fn smooth_peakon_landmarks() {
        for &(c, z) in &[(1.0, 0.0), (2.0, -1.5), (0.3, 4.0)] {
            let r = |x: f64, k| smooth_peakon(c, z, z + x, k).unwrap();
            assert!((r(0.0, 0) - c / 6.0).abs() < TIGHT);
            assert!((r(LN_2, 1) + c / 12.0).abs() < TIGHT);
            assert!((r(0.0, 2) + c / 3.0).abs() < TIGHT);
            assert!((r(2.0 * LN_2, 2) - c / 24.0).abs() < TIGHT);
            assert!((r(-2.0 * LN_2, 2) - c / 24.0).abs() < TIGHT);
            assert!(r(LN_2, 2).abs() < TIGHT);
            assert!(r(-LN_2, 2).abs() < TIGHT);
            assert!((r(-V_HALF_WIDTH, 1) - (2f64.sqrt() - 1.0) / 6.0 * c).abs() < TIGHT);
            assert_eq!(r(0.0, 1), 0.0);
        }
        assert!(matches!(smooth_peakon(1.0, 0.0, 0.0, 3), Err(Error::UnsupportedOrder(3))));
    }

    #[test]
    fn landmark_table() {
        let t = landmark_constants(1.0).unwrap();
        let v = |n: &str| t.get(n).unwrap().value;
        assert!((v("exact_theta") - 6.6841).abs() < 1e-3);
        assert!((6.7 - v("exact_theta") - 0.016014).abs() < 1e-6);
        assert!(approx_eq_band(6.7, v("exact_theta")));
        let edge = v("rho_at_edge");
        assert!((edge - ((-6.7f64).exp() / 3.0 - (-13.4f64).exp() / 6.0)).abs() < 1e-18);
        assert!(approx_eq_band(edge, 1.0 / 2400.0), "{edge}");
        assert!(approx_eq_band(edge, 4.1e-4));
        assert!(approx_eq_band(-v("rho1_at_edge"), 4.1e-4));
        assert!(approx_eq_band(v("rho2_at_edge"), 4.1e-4));
        assert!(approx_eq_band(v("phi_at_edge"), 1.2e-3));
        assert!((v("rho2_bound_on_V") - (2f64.sqrt() - 2.0) / 6.0).abs() < TIGHT);
        assert!((v("rho2_bound_on_V") + 0.09763).abs() < 1e-5);
        // V_0 ⊂ Θ_0.
        assert!(v("v_zone_edge") < v("exact_theta"));
        assert!(matches!(landmark_constants(0.0), Err(Error::NonPositiveSpeed(_))));
        let json = t.to_json().unwrap();
        let back: Vec<Landmark> = serde_json::from_str(&json).unwrap();
        assert_eq!(back, t.entries);
    }

    #[test]
    fn second_derivative_bound_on_v() {
        let bound = (2f64.sqrt() - 2.0) / 6.0;
        let n = 10_000;
        let worst = (0..=n)
            .map(|i| -V_HALF_WIDTH + 2.0 * V_HALF_WIDTH * i as f64 / n as f64)
            .map(|x| smooth_peakon(1.0, 0.0, x, 2).unwrap())
            .fold(f64::NEG_INFINITY, f64::max);
        assert!(worst <= bound + TIGHT, "{worst}");
    }

    #[test]
    fn peakon_slope_magnitude_equals_value() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..1000 {
            let c = rng.gen_range(0.1..3.0);
            let z = rng.gen_range(-5.0..5.0);
            let x = rng.gen_range(-20.0..20.0);
            let slope = peakon_slope(c, z, x).unwrap();
            assert!((slope.abs() - peakon(c, z, x)).abs() < TIGHT);
        }
        assert_eq!(peakon_slope(1.0, 0.3, 0.3), None);
    }

    #[test]
    fn parity_of_smooth_peakon() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..1000 {
            let (c, z, d) = (rng.gen_range(0.1..3.0), rng.gen_range(-5.0..5.0), rng.gen_range(0.0..15.0));
            let r = |x, k| smooth_peakon(c, z, x, k).unwrap();
            assert!((r(z + d, 0) - r(z - d, 0)).abs() < TIGHT);
            assert!((r(z + d, 1) + r(z - d, 1)).abs() < TIGHT);
            assert!((r(z + d, 2) - r(z - d, 2)).abs() < TIGHT);
        }
    }

    #[test]
    fn slope_bounded_by_twice_value() {
        for i in 0..10_000 {
            let x = -25.0 + 50.0 * i as f64 / 9_999.0;
            let r0 = smooth_peakon(1.0, 0.0, x, 0).unwrap();
            let r1 = smooth_peakon(1.0, 0.0, x, 1).unwrap();
            assert!(r1.abs() <= 2.0 * r0 + 1e-15, "{x}");
        }
    }

    #[test]
    fn six_rho_touches_peakon_at_crest() {
        for c in [0.5, 1.0, 3.0] {
            assert!((6.0 * smooth_peakon(c, 1.0, 1.0, 0).unwrap() - peakon(c, 1.0, 1.0)).abs() < TIGHT);
        }
    }

    #[test]
    fn flank_slope_stays_positive() {
        for &c in &[1.0, 2.0] {
            let z = 0.7;
            let (lo, hi) = (z - THETA_HALF_WIDTH, z - V_HALF_WIDTH);
            let n = 20_000;
            let min = (0..=n)
                .map(|i| lo + (hi - lo) * i as f64 / n as f64)
                .map(|x| smooth_peakon(c, z, x, 1).unwrap())
                .fold(f64::INFINITY, f64::min);
            assert!(min >= 1e-4 * c, "{min}");
        }
    }
}
