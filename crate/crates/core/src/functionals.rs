//! Conserved functionals `E`, `F`, the energy norm `‖·‖_H = √E` and sup-norm
//! distances to the peakon and smooth-peakon profiles.

use serde::{Deserialize, Serialize};

use crate::admissible::MeasureData;
use crate::error::{Error, Result};
use crate::grid::GridFunction;
use crate::helmholtz::{inv_helmholtz, HelmholtzKind, SmoothedField};
use crate::waves::{sample_peakon, sample_smooth_peakon};

/// Two evaluations of the same functional.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FormPair {
    pub primary: f64,
    pub alternate: f64,
}

impl FormPair {
    pub fn gap(&self) -> f64 {
        (self.primary - self.alternate).abs()
    }

    pub fn relative_gap(&self) -> f64 {
        self.gap() / self.primary.abs().max(1e-30)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyPair {
    #[serde(rename = "E")]
    pub e: f64,
    #[serde(rename = "F")]
    pub f: f64,
    #[serde(rename = "E_alt")]
    pub e_alt: f64,
    #[serde(rename = "F_alt")]
    pub f_alt: f64,
    #[serde(rename = "E_gap")]
    pub e_gap: f64,
    #[serde(rename = "F_gap")]
    pub f_gap: f64,
}

impl EnergyPair {
    pub fn of(u: &GridFunction) -> Self {
        let field = SmoothedField::from_u(u);
        let e = e_forms(u, &field);
        let f = f_forms(u, &field);
        Self { e: e.primary, f: f.primary, e_alt: e.alternate, f_alt: f.alternate, e_gap: e.gap(), f_gap: f.gap() }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

fn e_forms(u: &GridFunction, field: &SmoothedField) -> FormPair {
    let primary = quadrature(field, |v, vx, vxx, _| 4.0 * v * v + 5.0 * vx * vx + vxx * vxx, u);
    // ∫yv with (1−∂²) moved onto v: ∫u(v − vxx) = ∫u² − 3∫uv.
    let alternate = quadrature(field, |v, _, vxx, u| u * (v - vxx), u);
    FormPair { primary, alternate }
}

fn f_forms(u: &GridFunction, field: &SmoothedField) -> FormPair {
    let primary = u.values().iter().map(|x| x * x * x).sum::<f64>() * u.grid().spacing();
    let alternate =
        quadrature(field, |v, _, w, _| -w * w * w + 12.0 * v * w * w - 48.0 * v * v * w + 64.0 * v * v * v, u);
    FormPair { primary, alternate }
}

fn quadrature(field: &SmoothedField, f: impl Fn(f64, f64, f64, f64) -> f64, u: &GridFunction) -> f64 {
    let v = field.v.values();
    let vx = field.vx.values();
    let vxx = field.vxx.values();
    let sum: f64 = (0..v.len()).map(|j| f(v[j], vx[j], vxx[j], u.values()[j])).sum();
    sum * u.grid().spacing()
}

/// `E(u) = ∫(4v² + 5vₓ² + vₓₓ²)` alongside `∫yv`.
pub fn energy_e(u: &GridFunction) -> FormPair {
    e_forms(u, &SmoothedField::from_u(u))
}

/// `F(u) = ∫u³` alongside its expression in `v`.
pub fn energy_f(u: &GridFunction) -> FormPair {
    f_forms(u, &SmoothedField::from_u(u))
}

/// `∫yv = Σ mᵢ v(xᵢ) + ∫ρ v` evaluated directly on the measure.
pub fn energy_e_measure(y: &MeasureData) -> Result<f64> {
    let u = y.synthesize_u()?;
    let v = inv_helmholtz(HelmholtzKind::Four, &u);
    let atoms: f64 = y.atoms().iter().map(|a| a.mass * v.interpolate(a.pos)).sum();
    let density = match y.density() {
        Some(rho) => rho.mul(&v)?.integrate(),
        None => 0.0,
    };
    Ok(atoms + density)
}

pub fn h_norm(u: &GridFunction) -> f64 {
    energy_e(u).primary.max(0.0).sqrt()
}

pub fn h_norm_distance(u: &GridFunction, w: &GridFunction) -> Result<f64> {
    Ok(h_norm(&u.sub(w)?))
}

/// `‖v‖_{H²} = (∫v² + vₓ² + vₓₓ²)^{1/2}`.
pub fn h2_norm(field: &SmoothedField) -> f64 {
    let sq = |x: f64| x * x;
    let sum = quadrature(field, |v, vx, vxx, _| sq(v) + sq(vx) + sq(vxx), &field.v);
    sum.sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CkDistances {
    pub c0_u: f64,
    pub c0_v: f64,
    pub c1_v: f64,
    pub c2_v: f64,
}

impl CkDistances {
    pub fn as_array(&self) -> [f64; 4] {
        [self.c0_u, self.c0_v, self.c1_v, self.c2_v]
    }
}

/// Sup-norm distances of `u` to `φ_c(·−z)` and of `∂ᵏv` to `ρ_c^{(k)}(·−z)`.
pub fn ck_distances(u: &GridFunction, c: f64, z: f64) -> Result<CkDistances> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::NonPositiveSpeed(c));
    }
    let grid = u.grid();
    let field = SmoothedField::from_u(u);
    let sup = |a: &GridFunction, b: &GridFunction| -> Result<f64> { Ok(a.sub(b)?.max_abs()) };
    Ok(CkDistances {
        c0_u: sup(u, &sample_peakon(grid, c, z))?,
        c0_v: sup(&field.v, &sample_smooth_peakon(grid, c, z, 0)?)?,
        c1_v: sup(&field.vx, &sample_smooth_peakon(grid, c, z, 1)?)?,
        c2_v: sup(&field.vxx, &sample_smooth_peakon(grid, c, z, 2)?)?,
    })
}
