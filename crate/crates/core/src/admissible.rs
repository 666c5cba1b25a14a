//! Positive-cone data: momentum measures `y = (1−∂²)u ≥ 0` built from atoms and
//! a nonnegative density, the cone certificate, and perturbed peakons.

use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::functionals::h_norm_distance;
use crate::grid::{GridFunction, UniformGrid};
use crate::helmholtz::{inv_helmholtz, HelmholtzKind, SmoothedField};
use crate::waves::sample_peakon;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub pos: f64,
    pub mass: f64,
}

impl Atom {
    pub fn new(pos: f64, mass: f64) -> Self {
        Self { pos, mass }
    }
}

/// Nonnegative atoms plus an optional nonnegative density on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasureData {
    grid: UniformGrid,
    atoms: Vec<Atom>,
    density: Option<GridFunction>,
}

#[derive(Debug, Serialize, Deserialize)]
struct MeasureFile {
    atoms: Vec<Atom>,
    density_csv: Option<PathBuf>,
}

impl MeasureData {
    pub fn new(grid: UniformGrid, atoms: Vec<Atom>, density: Option<GridFunction>) -> Result<Self> {
        for (index, a) in atoms.iter().enumerate() {
            if !a.pos.is_finite() || !a.mass.is_finite() || !grid.contains(a.pos) {
                return Err(Error::InvalidAtom { index });
            }
            if a.mass < 0.0 {
                return Err(Error::NegativeMass { index, mass: a.mass });
            }
        }
        if let Some(rho) = &density {
            if rho.grid() != &grid {
                return Err(Error::GridMismatch);
            }
            if let Some((index, &value)) = rho.values().iter().enumerate().find(|(_, &v)| v < 0.0) {
                return Err(Error::NegativeDensity { index, value });
            }
        }
        Ok(Self { grid, atoms, density })
    }

    /// The peakon momentum `2c·δ_z`.
    pub fn peakon(grid: UniformGrid, c: f64, z: f64) -> Result<Self> {
        Self::new(grid, vec![Atom::new(grid.wrap(z), 2.0 * c)], None)
    }

    pub fn grid(&self) -> &UniformGrid {
        &self.grid
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn density(&self) -> Option<&GridFunction> {
        self.density.as_ref()
    }

    pub fn total_mass(&self) -> f64 {
        let atoms: f64 = self.atoms.iter().map(|a| a.mass).sum();
        atoms + self.density.as_ref().map_or(0.0, GridFunction::integrate)
    }

    /// Sum of two measures on the same grid.
    pub fn combine(&self, other: &Self) -> Result<Self> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        let atoms = self.atoms.iter().chain(&other.atoms).copied().collect();
        let density = match (&self.density, &other.density) {
            (Some(a), Some(b)) => Some(a.add(b)?),
            (a, b) => a.clone().or_else(|| b.clone()),
        };
        Self::new(self.grid, atoms, density)
    }

    /// `u = (1−∂²)⁻¹y`: periodised closed-form kernels for the atoms and a
    /// spectral solve for the density.
    pub fn synthesize_u(&self) -> Result<GridFunction> {
        if !(self.total_mass() > 0.0) {
            return Err(Error::TrivialMeasure);
        }
        let l = self.grid.half_width();
        let kind = HelmholtzKind::One;
        let atoms = GridFunction::from_fn(self.grid, |x| {
            self.atoms.iter().map(|a| a.mass * kind.periodic_green(self.grid.displacement(x, a.pos), l)).sum()
        });
        match &self.density {
            Some(rho) => atoms.add(&inv_helmholtz(kind, rho)),
            None => Ok(atoms),
        }
    }

    /// Replaces every atom by a Gaussian of standard deviation `width` carrying
    /// the same mass.
    pub fn mollify(&self, width: f64) -> Result<Self> {
        if !(width > 0.0 && width.is_finite()) {
            return Err(Error::Config(format!("mollifier width must be positive, got {width}")));
        }
        let norm = 1.0 / (width * (2.0 * std::f64::consts::PI).sqrt());
        let smeared = GridFunction::from_fn(self.grid, |x| {
            self.atoms
                .iter()
                .map(|a| {
                    let d = self.grid.displacement(x, a.pos) / width;
                    a.mass * norm * (-0.5 * d * d).exp()
                })
                .sum()
        });
        let density = match &self.density {
            Some(rho) => rho.add(&smeared)?,
            None => smeared,
        };
        Self::new(self.grid, Vec::new(), Some(density))
    }

    pub fn from_json_str(json: &str, grid: UniformGrid, base_dir: &Path) -> Result<Self> {
        let file: MeasureFile = serde_json::from_str(json)?;
        let density = match file.density_csv {
            Some(path) => {
                let rho = GridFunction::load_csv(base_dir.join(path))?;
                if rho.grid() != &grid {
                    return Err(Error::GridMismatch);
                }
                Some(rho)
            }
            None => None,
        };
        Self::new(grid, file.atoms, density)
    }

    /// Reads `{atoms: [{pos, mass}], density_csv}`; a relative CSV path is
    /// resolved against the JSON file's directory.
    pub fn load_json(path: impl AsRef<Path>, grid: UniformGrid) -> Result<Self> {
        let path = path.as_ref();
        let json = std::fs::read_to_string(path)?;
        Self::from_json_str(&json, grid, path.parent().unwrap_or(Path::new(".")))
    }

    /// Writes the JSON descriptor and, if present, the density next to it as
    /// `<stem>_density.csv`.
    pub fn save_json(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let density_csv = match &self.density {
            Some(rho) => {
                let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("measure");
                let name = PathBuf::from(format!("{stem}_density.csv"));
                rho.save_csv(path.with_file_name(&name))?;
                Some(name)
            }
            None => None,
        };
        let file = MeasureFile { atoms: self.atoms.clone(), density_csv };
        std::fs::write(path, serde_json::to_string_pretty(&file)?)?;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Margin {
    pub value: f64,
    pub location: f64,
}

/// Minimum margins of `|uₓ| ≤ u`, `|vₓ| ≤ 2v` and `u ≤ 6v`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CertificateReport {
    pub slope_margin: Margin,
    pub smooth_slope_margin: Margin,
    pub peak_margin: Margin,
}

impl CertificateReport {
    pub fn min_margin(&self) -> f64 {
        self.slope_margin.value.min(self.smooth_slope_margin.value).min(self.peak_margin.value)
    }

    pub fn holds(&self, tol: f64) -> bool {
        self.min_margin() >= -tol
    }
}

fn min_with_location(grid: &UniformGrid, values: impl Iterator<Item = f64>) -> Margin {
    let (j, value) = values.enumerate().fold((0, f64::INFINITY), |best, (j, m)| if m < best.1 { (j, m) } else { best });
    Margin { value, location: grid.point(j) }
}

/// `u_j − |uₓ|_j`, with `|uₓ|/u` estimated by the steeper one-sided log
/// difference. Exponential flanks are reproduced exactly, so a kink costs no
/// O(h) defect; nonpositive samples fall back to plain differences.
fn slope_margins(u: &GridFunction) -> Vec<f64> {
    let vals = u.values();
    let n = vals.len();
    let h = u.grid().spacing();
    (0..n)
        .map(|j| {
            let (l, c, r) = (vals[(j + n - 1) % n], vals[j], vals[(j + 1) % n]);
            if c > 0.0 && l > 0.0 && r > 0.0 {
                let s = (r / c).ln().abs().max((c / l).ln().abs()) / h;
                c * (1.0 - s)
            } else {
                c - (r - c).abs().max((c - l).abs()) / h
            }
        })
        .collect()
}

pub fn cone_check(u: &GridFunction) -> CertificateReport {
    let grid = u.grid();
    let field = SmoothedField::from_u(u);
    let v = field.v.values();
    let vx = field.vx.values();
    let uv = u.values();
    CertificateReport {
        slope_margin: min_with_location(grid, slope_margins(u).into_iter()),
        smooth_slope_margin: min_with_location(grid, (0..v.len()).map(|j| 2.0 * v[j] - vx[j].abs())),
        peak_margin: min_with_location(grid, (0..v.len()).map(|j| 6.0 * v[j] - uv[j])),
    }
}

/// How `2c·δ₀` is perturbed; the amplitude is calibrated afterwards.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PerturbationRecipe {
    /// Extra atom of mass `a` at `offset`.
    ExtraAtom { offset: f64 },
    /// Gaussian density of total mass `a`.
    DensityBump { center: f64, width: f64 },
    /// Peak mass `2c(1 ± a)`.
    MassRescale { increase: bool },
}

impl PerturbationRecipe {
    fn measure(&self, grid: UniformGrid, c: f64, a: f64) -> Result<MeasureData> {
        let peak = Atom::new(0.0, 2.0 * c);
        match *self {
            PerturbationRecipe::ExtraAtom { offset } => {
                MeasureData::new(grid, vec![peak, Atom::new(grid.wrap(offset), a)], None)
            }
            PerturbationRecipe::DensityBump { center, width } => {
                let norm = a / (width * std::f64::consts::PI.sqrt());
                let rho = GridFunction::from_fn(grid, |x| {
                    let d = grid.displacement(x, center) / width;
                    norm * (-d * d).exp()
                });
                MeasureData::new(grid, vec![peak], Some(rho))
            }
            PerturbationRecipe::MassRescale { increase } => {
                let factor = if increase { 1.0 + a } else { 1.0 - a };
                MeasureData::new(grid, vec![Atom::new(0.0, 2.0 * c * factor)], None)
            }
        }
    }

    fn max_amplitude(&self, c: f64) -> f64 {
        match self {
            PerturbationRecipe::MassRescale { increase: false } => 1.0 - 1e-9,
            _ => 1e6 * c.max(1.0),
        }
    }
}

#[derive(Debug, Clone)]
pub struct PerturbedPeakon {
    pub y0: MeasureData,
    pub u0: GridFunction,
    pub distance: f64,
    pub amplitude: f64,
}

/// Perturbs `2c·δ₀` along `recipe` until `‖u₀ − φ_c‖_H = ε²` within 1%.
pub fn make_perturbed_peakon(
    grid: UniformGrid,
    c: f64,
    eps: f64,
    recipe: PerturbationRecipe,
) -> Result<PerturbedPeakon> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::NonPositiveSpeed(c));
    }
    if !(0.0..1.0).contains(&eps) {
        return Err(Error::InvalidEpsilon(eps));
    }
    let phi = sample_peakon(&grid, c, 0.0);
    let target = eps * eps;
    let build = |a: f64| -> Result<(MeasureData, GridFunction, f64)> {
        let y0 = recipe.measure(grid, c, a)?;
        let u0 = y0.synthesize_u()?;
        let d = h_norm_distance(&u0, &phi)?;
        Ok((y0, u0, d))
    };
    if eps == 0.0 {
        let y0 = MeasureData::peakon(grid, c, 0.0)?;
        return Ok(PerturbedPeakon { y0, u0: phi, distance: 0.0, amplitude: 0.0 });
    }

    let cap = recipe.max_amplitude(c);
    let (mut lo, mut hi) = (0.0, (target / c).min(cap));
    loop {
        let (_, _, d) = build(hi)?;
        if d >= target {
            break;
        }
        if hi >= cap {
            return Err(Error::UnreachableDistance { target, reachable: d });
        }
        lo = hi;
        hi = (2.0 * hi).min(cap);
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let (y0, u0, d) = build(mid)?;
        if (d - target).abs() <= 1e-3 * target {
            return Ok(PerturbedPeakon { y0, u0, distance: d, amplitude: mid });
        }
        if d < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let (y0, u0, d) = build(0.5 * (lo + hi))?;
    if (d - target).abs() > 1e-2 * target {
        return Err(Error::UnreachableDistance { target, reachable: d });
    }
    Ok(PerturbedPeakon { y0, u0, distance: d, amplitude: 0.5 * (lo + hi) })
}

#[derive(Debug, Clone)]
pub struct EnsembleMember {
    pub eps: f64,
    pub recipe: PerturbationRecipe,
    pub data: PerturbedPeakon,
}

/// Seeded draw of a random recipe with ε uniform in `[eps_lo, eps_hi]`.
/// Perturbations stay within `|x| ≤ 3` of the crest.
pub fn draw_recipe(rng: &mut impl Rng, eps_lo: f64, eps_hi: f64) -> (f64, PerturbationRecipe) {
    let eps = rng.gen_range(eps_lo..=eps_hi);
    let recipe = match rng.gen_range(0..3) {
        0 => PerturbationRecipe::ExtraAtom { offset: rng.gen_range(-3.0..3.0) },
        1 => PerturbationRecipe::DensityBump { center: rng.gen_range(-3.0..3.0), width: rng.gen_range(0.2..1.5) },
        _ => PerturbationRecipe::MassRescale { increase: rng.gen_bool(0.5) },
    };
    (eps, recipe)
}

/// `members` admissible perturbations of `φ_c` with `ε ∈ [eps_lo, eps_hi]`.
/// Member `i` draws from stream `i` of the seeded generator, so results do not
/// depend on thread scheduling.
pub fn perturbed_ensemble(
    grid: UniformGrid,
    c: f64,
    members: usize,
    eps_range: (f64, f64),
    seed: u64,
) -> Result<Vec<EnsembleMember>> {
    (0..members)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let (eps, recipe) = draw_recipe(&mut rng, eps_range.0, eps_range.1);
            let data = make_perturbed_peakon(grid, c, eps, recipe)?;
            Ok(EnsembleMember { eps, recipe, data })
        })
        .collect()
}
