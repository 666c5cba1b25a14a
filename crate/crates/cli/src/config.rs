use std::path::{Path, PathBuf};

use peakon_lab::admissible::PerturbationRecipe;
use peakon_lab::dynamics::EvolutionConfig;
use peakon_lab::lemmas::LemmaConfig;
use peakon_lab::sweep::{SweepConfig, DEFAULT_EPS0};
use peakon_lab::{Result, UniformGrid};
use serde::{Deserialize, Serialize};

use crate::Overrides;

/// Keys accepted in a `--config` file. Every key is optional; command-line
/// flags take precedence.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    grid_n: Option<usize>,
    half_width: Option<f64>,
    speed: Option<f64>,
    eps: Option<Vec<f64>>,
    t_end: Option<f64>,
    seed: Option<u64>,
    members: Option<usize>,
    eps_min: Option<f64>,
    eps_max: Option<f64>,
    eps0: Option<f64>,
    recipe: Option<PerturbationRecipe>,
    cfl: Option<f64>,
    filter_strength: Option<f64>,
    monitor_stride: Option<usize>,
    mollifier_cells: Option<f64>,
    blow_up_factor: Option<f64>,
    initial: Option<PathBuf>,
    snapshot_every: Option<usize>,
}

impl FileConfig {
    pub fn load(path: &Path) -> std::result::Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
        serde_json::from_str(&text).map_err(|e| format!("malformed config {}: {e}", path.display()))
    }
}

/// Fully resolved parameters; a copy is written next to every run's outputs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Resolved {
    pub command: String,
    pub grid_n: usize,
    pub half_width: f64,
    pub speed: f64,
    pub eps: Vec<f64>,
    pub t_end: f64,
    pub seed: u64,
    pub members: usize,
    pub eps_min: f64,
    pub eps_max: f64,
    pub eps0: f64,
    pub recipe: PerturbationRecipe,
    pub cfl: f64,
    pub filter_strength: f64,
    pub monitor_stride: usize,
    pub mollifier_cells: f64,
    pub blow_up_factor: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub initial: Option<PathBuf>,
    pub snapshot_every: usize,
}

impl Resolved {
    pub fn new(command: &str, file: FileConfig, cli: &Overrides) -> Self {
        let lemma = LemmaConfig::default();
        let evolution = EvolutionConfig::default();
        let (default_eps, default_t_end) = match command {
            "stability-sweep" => (SweepConfig::default().eps, SweepConfig::default().evolution.t_end),
            _ => (Vec::new(), evolution.t_end),
        };
        Self {
            command: command.to_string(),
            grid_n: cli.grid_n.or(file.grid_n).unwrap_or(peakon_lab::grid::DEFAULT_POINTS),
            half_width: cli.half_width.or(file.half_width).unwrap_or(peakon_lab::grid::DEFAULT_HALF_WIDTH),
            speed: cli.speed.or(file.speed).unwrap_or(1.0),
            eps: cli.eps.clone().or(file.eps).unwrap_or(default_eps),
            t_end: cli.t_end.or(file.t_end).unwrap_or(default_t_end),
            seed: cli.seed.or(file.seed).unwrap_or(lemma.seed),
            members: file.members.unwrap_or(lemma.members),
            eps_min: file.eps_min.unwrap_or(lemma.eps_min),
            eps_max: file.eps_max.unwrap_or(lemma.eps_max),
            eps0: file.eps0.unwrap_or(DEFAULT_EPS0),
            recipe: file.recipe.unwrap_or(PerturbationRecipe::ExtraAtom { offset: 1.0 }),
            cfl: file.cfl.unwrap_or(evolution.cfl),
            filter_strength: file.filter_strength.unwrap_or(evolution.filter_strength),
            monitor_stride: file.monitor_stride.unwrap_or(evolution.monitor_stride),
            mollifier_cells: file.mollifier_cells.unwrap_or(evolution.mollifier_cells),
            blow_up_factor: file.blow_up_factor.unwrap_or(evolution.blow_up_factor),
            initial: file.initial,
            snapshot_every: file.snapshot_every.unwrap_or(0),
        }
    }

    pub fn grid(&self) -> Result<UniformGrid> {
        UniformGrid::new(self.half_width, self.grid_n)
    }

    pub fn evolution(&self) -> EvolutionConfig {
        EvolutionConfig {
            t_end: self.t_end,
            cfl: self.cfl,
            filter_strength: self.filter_strength,
            monitor_stride: self.monitor_stride,
            mollifier_cells: self.mollifier_cells,
            blow_up_factor: self.blow_up_factor,
        }
    }

    pub fn lemma_config(&self) -> Result<LemmaConfig> {
        Ok(LemmaConfig {
            grid: self.grid()?,
            c: self.speed,
            members: self.members,
            eps_min: self.eps_min,
            eps_max: self.eps_max,
            seed: self.seed,
        })
    }

    pub fn sweep_config(&self) -> Result<SweepConfig> {
        Ok(SweepConfig {
            grid: self.grid()?,
            c: self.speed,
            eps: self.eps.clone(),
            recipe: self.recipe,
            evolution: self.evolution(),
            eps0: self.eps0,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }
}
