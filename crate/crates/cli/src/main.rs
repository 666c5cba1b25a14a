mod config;
mod svg;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use peakon_lab::admissible::{make_perturbed_peakon, MeasureData};
use peakon_lab::dynamics::{evolve_observed, EvolutionTrace};
use peakon_lab::lemmas::run_lemmas;
use peakon_lab::sweep::run_sweep;
use peakon_lab::waves::landmark_constants;
use peakon_lab::Error;
use serde::Serialize;

use config::{FileConfig, Resolved};

#[derive(Parser)]
#[command(name = "peakon-lab", version, about = "Peakon stability experiments for the Degasperis-Procesi equation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    overrides: Overrides,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Identity and inequality checks on the peakon and a seeded ensemble.
    VerifyLemmas,
    /// Evolve one initial datum and record the stability monitors.
    Simulate,
    /// Perturbation sweep with log-log slope fits.
    StabilitySweep,
    /// Dump the closed-form profile constants.
    Landmarks,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::VerifyLemmas => "verify-lemmas",
            Command::Simulate => "simulate",
            Command::StabilitySweep => "stability-sweep",
            Command::Landmarks => "landmarks",
        }
    }
}

#[derive(Args, Debug, Default)]
pub struct Overrides {
    /// Flat JSON file with run parameters; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Number of grid points (power of two).
    #[arg(long, global = true)]
    grid_n: Option<usize>,
    /// Domain is [-L, L).
    #[arg(long, global = true)]
    half_width: Option<f64>,
    /// Peakon speed c.
    #[arg(long, global = true, allow_negative_numbers = true)]
    speed: Option<f64>,
    /// Comma-separated perturbation sizes.
    #[arg(long, global = true, value_delimiter = ',')]
    eps: Option<Vec<f64>>,
    #[arg(long, global = true)]
    t_end: Option<f64>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true, default_value = "peakon-out")]
    out: PathBuf,
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
}

const EXIT_FAILED: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_ABORT: u8 = 3;

enum Failure {
    Config(String),
    Abort(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::BlowUp { .. }
            | Error::Io(_)
            | Error::NonFinite(_)
            | Error::NotCriticalPoint { .. }
            | Error::DegenerateProfile
            | Error::TimeStepTooLarge { .. } => Failure::Abort(e.to_string()),
            _ => Failure::Config(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Abort(e.to_string())
    }
}

type Outcome = Result<bool, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let file = match &cli.overrides.config {
        Some(path) => match FileConfig::load(path) {
            Ok(f) => f,
            Err(msg) => {
                eprintln!("error: {msg}");
                return ExitCode::from(EXIT_CONFIG);
            }
        },
        None => FileConfig::default(),
    };
    let resolved = Resolved::new(cli.command.name(), file, &cli.overrides);
    let out = cli.overrides.out.clone();

    let run = || -> Outcome {
        match cli.command {
            Command::VerifyLemmas => verify_lemmas(&resolved, &out),
            Command::Simulate => simulate(&resolved, &out),
            Command::StabilitySweep => stability_sweep(&resolved, &out),
            Command::Landmarks => landmarks(&resolved, &out),
        }
    };
    let outcome = match cli.overrides.jobs {
        Some(0) => Err(Failure::Config("--jobs must be at least 1".into())),
        Some(jobs) => match rayon::ThreadPoolBuilder::new().num_threads(jobs).build() {
            Ok(pool) => pool.install(run),
            Err(e) => Err(Failure::Abort(e.to_string())),
        },
        None => run(),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_FAILED),
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_CONFIG)
        }
        Err(Failure::Abort(msg)) => {
            eprintln!("aborted: {msg}");
            ExitCode::from(EXIT_ABORT)
        }
    }
}

fn prepare_output(cfg: &Resolved, out: &Path) -> Result<(), Failure> {
    fs::create_dir_all(out)?;
    fs::write(out.join("config.json"), cfg.to_json() + "\n")?;
    Ok(())
}

fn write_json(path: &Path, json: String) -> Result<(), Failure> {
    fs::write(path, json + "\n")?;
    Ok(())
}

fn status(passed: bool) -> &'static str {
    if passed {
        "PASS"
    } else {
        "FAIL"
    }
}

fn verify_lemmas(cfg: &Resolved, out: &Path) -> Outcome {
    let lemma_cfg = cfg.lemma_config()?;
    lemma_cfg.validate()?;
    prepare_output(cfg, out)?;
    let report = run_lemmas(&lemma_cfg)?;
    write_json(&out.join("lemmas_report.json"), report.to_json()?)?;
    if let Some(e) = &report.ensemble_error {
        println!("ensemble construction failed: {e}");
    }
    for lemma in &report.lemmas {
        println!("{} {}", status(lemma.passed), lemma.lemma);
        for check in lemma.checks.iter().filter(|c| !c.passed) {
            println!("    {}: {:e} (bound {:e})", check.name, check.value, check.bound);
        }
    }
    Ok(report.passed)
}

#[derive(Serialize)]
struct SimulationSummary {
    completed: bool,
    steps: usize,
    final_time: f64,
    xi_slope: f64,
    e_relative_drift: f64,
    f_relative_drift: f64,
    min_y: f64,
    min_y_pointwise: f64,
    max_tv_ux: f64,
    sup_delta: f64,
    sup_h_distance: f64,
    initial_h_distance: f64,
    passed: bool,
}

const DRIFT_TOL: f64 = 1e-3;

fn simulate(cfg: &Resolved, out: &Path) -> Outcome {
    let grid = cfg.grid()?;
    let evolution = cfg.evolution();
    evolution.validate()?;
    if !(cfg.speed > 0.0 && cfg.speed.is_finite()) {
        return Err(Error::NonPositiveSpeed(cfg.speed).into());
    }
    let y0 = match (&cfg.initial, cfg.eps.as_slice()) {
        (Some(path), _) => MeasureData::load_json(path, grid)?,
        (None, []) => MeasureData::peakon(grid, cfg.speed, 0.0)?,
        (None, [eps]) => make_perturbed_peakon(grid, cfg.speed, *eps, cfg.recipe)?.y0,
        (None, _) => return Err(Failure::Config("simulate takes at most one eps value".into())),
    };
    if y0.total_mass() <= 0.0 {
        return Err(Error::TrivialMeasure.into());
    }
    prepare_output(cfg, out)?;
    let snapshots = out.join("snapshots");
    if cfg.snapshot_every > 0 {
        fs::create_dir_all(&snapshots)?;
    }
    let every = cfg.snapshot_every;
    let result = evolve_observed(&y0, cfg.speed, &evolution, |snap| {
        if every > 0 && snap.index % every == 0 {
            snap.u.save_csv(snapshots.join(format!("u_{:06}.csv", snap.index)))?;
        }
        Ok(())
    });
    let (trace, abort) = match result {
        Ok(trace) => (trace, None),
        Err(e @ Error::BlowUp { .. }) => {
            let msg = e.to_string();
            let Error::BlowUp { trace, .. } = e else { unreachable!() };
            (*trace, Some(msg))
        }
        Err(e) => return Err(e.into()),
    };
    trace.save_csv(out.join("trace.csv"))?;
    fs::write(out.join("trace.svg"), trace_svg(&trace))?;
    let summary = summarize(&trace, grid.period(), abort.is_none());
    write_json(&out.join("summary.json"), serde_json::to_string_pretty(&summary).map_err(Error::from)?)?;
    println!(
        "t = {:.4}, steps = {}, xi slope = {:.6}, E drift = {:.3e}, F drift = {:.3e}, min y = {:.3e}",
        summary.final_time,
        summary.steps,
        summary.xi_slope,
        summary.e_relative_drift,
        summary.f_relative_drift,
        summary.min_y
    );
    match abort {
        Some(msg) => Err(Failure::Abort(msg)),
        None => Ok(summary.passed),
    }
}

fn summarize(trace: &EvolutionTrace, period: f64, completed: bool) -> SimulationSummary {
    let e_relative_drift = EvolutionTrace::max_relative_drift(&trace.e_series);
    let f_relative_drift = EvolutionTrace::max_relative_drift(&trace.f_series);
    SimulationSummary {
        completed,
        steps: trace.steps,
        final_time: trace.times.last().copied().unwrap_or(0.0),
        xi_slope: trace.xi_slope(period),
        e_relative_drift,
        f_relative_drift,
        min_y: EvolutionTrace::inf(&trace.min_y_series),
        min_y_pointwise: EvolutionTrace::inf(&trace.min_y_pointwise_series),
        max_tv_ux: EvolutionTrace::sup(&trace.tv_ux_series),
        sup_delta: EvolutionTrace::sup(&trace.delta_series),
        sup_h_distance: EvolutionTrace::sup(&trace.h_distance_series),
        initial_h_distance: trace.h_distance_series.first().copied().unwrap_or(f64::NAN),
        passed: completed && e_relative_drift <= DRIFT_TOL && f_relative_drift <= DRIFT_TOL,
    }
}

fn trace_svg(trace: &EvolutionTrace) -> String {
    let drift = |s: &[f64]| -> Vec<f64> {
        let s0 = s.first().copied().unwrap_or(0.0);
        s.iter().map(|v| (v - s0) / s0.abs().max(1e-300)).collect()
    };
    let panels = [
        svg::Panel {
            title: "relative drift of E and F",
            series: vec![
                svg::Series { label: "E", color: "#1f77b4", values: drift(&trace.e_series) },
                svg::Series { label: "F", color: "#d62728", values: drift(&trace.f_series) },
            ],
        },
        svg::Panel {
            title: "H-distance to the peakon at xi(t)",
            series: vec![svg::Series {
                label: "h_distance",
                color: "#2ca02c",
                values: trace.h_distance_series.clone(),
            }],
        },
    ];
    svg::render(&trace.times, &panels)
}

fn stability_sweep(cfg: &Resolved, out: &Path) -> Outcome {
    let sweep_cfg = cfg.sweep_config()?;
    sweep_cfg.validate()?;
    prepare_output(cfg, out)?;
    let summary = run_sweep(&sweep_cfg)?;
    let points = out.join("points");
    fs::create_dir_all(&points)?;
    for (k, p) in summary.points.iter().enumerate() {
        write_json(&points.join(format!("point_{k:02}.json")), serde_json::to_string_pretty(p).map_err(Error::from)?)?;
    }
    let mut csv = Vec::new();
    summary.write_csv(&mut csv)?;
    fs::write(out.join("sweep.csv"), csv)?;
    write_json(&out.join("sweep.json"), summary.to_json()?)?;
    for eps in &summary.out_of_hypothesis {
        eprintln!("warning: eps = {eps} exceeds eps0 = {}; point is outside the hypothesis range", sweep_cfg.eps0);
    }
    println!("{} delta slope = {:.4} (need >= 0.8)", status(summary.delta_slope >= 0.8), summary.delta_slope);
    println!("{} distance slope = {:.4} (need >= 0.4)", status(summary.distance_slope >= 0.4), summary.distance_slope);
    for env in summary.envelopes_initial.iter().chain(&summary.envelopes_dynamic) {
        println!(
            "{} envelope {} (exponent {}), worst ratio {:.4}",
            status(env.passed),
            env.name,
            env.exponent,
            env.worst_ratio
        );
    }
    Ok(summary.passed)
}

fn landmarks(cfg: &Resolved, out: &Path) -> Outcome {
    let table = landmark_constants(cfg.speed)?;
    prepare_output(cfg, out)?;
    let json = table.to_json()?;
    write_json(&out.join("landmarks.json"), json.clone())?;
    println!("{json}");
    Ok(true)
}
