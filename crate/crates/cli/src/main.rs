use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use sps_cli::config::{RawConfig, SweepSpec, KEYS};
use sps_cli::optimum::{find_optimal_detuning, Search};
use sps_cli::output::{format_value, write_csv};
use sps_cli::plot::{emit_plot, recipe_registry};
use sps_cli::sweep::{mode_registry, run_sweep, SweepError, SweepOutcome};
use sps_core::engine::engine_registry;
use sps_core::fom::Numerics;
use sps_core::phonons::{PhononBath, PhononParams};
use sps_core::quantum::propagate::propagator_registry;
use sps_core::quantum::Tolerances;
use sps_core::system::SystemParams;

const CONFIG_ERROR: u8 = 1;

#[derive(Parser)]
#[command(name = "sps", version, about = "Dressed-state single-photon source figures-of-merit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the sweep described by a key = value config file.
    Run {
        config: PathBuf,
        /// Worker threads (default: all logical cores).
        #[arg(long)]
        jobs: Option<usize>,
        #[arg(long)]
        engine: Option<String>,
        #[arg(long)]
        rtol: Option<f64>,
        #[arg(long)]
        atol: Option<f64>,
        #[arg(long)]
        tail_floor: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Further overrides as key=value.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
        /// Plot recipes rendered next to the CSV after the sweep.
        #[arg(long = "plot", value_name = "RECIPE")]
        plots: Vec<String>,
    },
    /// ⟨B⟩ and sideband-filtering efficiencies of the phonon presets.
    TableI {
        #[arg(long, default_value_t = 10.0)]
        purcell_factor: f64,
        #[arg(long, default_value_t = 4.0)]
        temperature: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Detuning that maximizes the dominant-sidepeak indistinguishability.
    Optimum {
        /// Stark shift in units of gamma_x.
        #[arg(long, allow_hyphen_values = true)]
        delta_ac: f64,
        /// Phonon preset: I, II, III, phonon-set-N or none.
        #[arg(long, default_value = "I")]
        phonons: String,
        #[arg(long, default_value = "secular")]
        engine: String,
        #[arg(long, default_value_t = 1.32)]
        gamma_x: f64,
        #[arg(long, default_value_t = Search::default().lo)]
        lo: f64,
        #[arg(long, default_value_t = Search::default().hi)]
        hi: f64,
        #[arg(long, default_value_t = Search::default().coarse_points)]
        points: usize,
    },
    /// Render plot recipes from a sweep CSV.
    Plot {
        csv: PathBuf,
        #[arg(required = true)]
        recipes: Vec<String>,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
    /// Registered modes, engines, propagators, recipes and config keys.
    List,
}

fn fail(msg: impl std::fmt::Display, code: u8) -> ExitCode {
    eprintln!("sps: {msg}");
    ExitCode::from(code)
}

/// Writes the CSV atomically to `out`, or to stdout.
fn emit(outcome: &SweepOutcome, out: Option<&Path>) -> std::io::Result<()> {
    let mut buf = Vec::new();
    write_csv(&mut buf, &outcome.metadata, &outcome.rows)?;
    match out {
        Some(path) => {
            let tmp = path.with_extension("csv.partial");
            std::fs::write(&tmp, &buf)?;
            std::fs::rename(&tmp, path)
        }
        None => std::io::stdout().write_all(&buf),
    }
}

fn sweep_and_emit(spec: &SweepSpec, jobs: Option<usize>) -> Result<SweepOutcome, ExitCode> {
    let outcome = run_sweep(spec, jobs).map_err(|e| match e {
        SweepError::Config(_) => fail(&e, CONFIG_ERROR),
        SweepError::Numerical(_) => fail(&e, 2),
    })?;
    emit(&outcome, spec.out.as_deref()).map_err(|e| fail(format!("writing output: {e}"), 2))?;
    if outcome.failures > 0 {
        eprintln!("sps: {} of {} points failed", outcome.failures, outcome.rows.len());
    }
    Ok(outcome)
}

#[allow(clippy::too_many_arguments)]
fn run(
    config: &Path,
    jobs: Option<usize>,
    engine: Option<String>,
    rtol: Option<f64>,
    atol: Option<f64>,
    tail_floor: Option<f64>,
    out: Option<PathBuf>,
    overrides: &[String],
    plots: &[String],
) -> ExitCode {
    let mut raw = match RawConfig::load(config) {
        Ok(r) => r,
        Err(e) => return fail(e, CONFIG_ERROR),
    };
    let flags = [
        ("engine", engine),
        ("rtol", rtol.map(|x| x.to_string())),
        ("atol", atol.map(|x| x.to_string())),
        ("tail_floor", tail_floor.map(|x| x.to_string())),
        ("out", out.map(|p| p.display().to_string())),
    ];
    for (k, v) in flags {
        if let Some(v) = v {
            raw.set(k, v).expect("flag keys are config keys");
        }
    }
    for pair in overrides {
        if let Err(e) = raw.set_pair(pair) {
            return fail(e, CONFIG_ERROR);
        }
    }
    let spec = match SweepSpec::from_raw(&raw) {
        Ok(s) => s,
        Err(e) => return fail(e, CONFIG_ERROR),
    };
    let recipes = recipe_registry();
    let mut chosen = Vec::new();
    for name in plots {
        match recipes.get(name) {
            Ok(r) => chosen.push(r),
            Err(e) => return fail(e, CONFIG_ERROR),
        }
    }
    if !chosen.is_empty() && spec.out.is_none() {
        return fail("--plot needs an output path", CONFIG_ERROR);
    }
    let outcome = match sweep_and_emit(&spec, jobs) {
        Ok(o) => o,
        Err(code) => return code,
    };
    if let Some(csv) = &spec.out {
        let dir = csv.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
        for recipe in chosen {
            match emit_plot(csv, recipe.as_ref(), dir) {
                Ok(p) => log::info!("wrote {}", p.display()),
                Err(e) => eprintln!("sps: plot `{}` skipped: {e}", recipe.name()),
            }
        }
    }
    ExitCode::from(outcome.exit_code() as u8)
}

fn table_i(purcell_factor: f64, temperature: f64, out: Option<PathBuf>) -> ExitCode {
    let mut raw = RawConfig::default();
    let mut pairs = vec![
        ("mode", "phonon-table".to_string()),
        ("purcell_factor", purcell_factor.to_string()),
        ("phonons", "phonon-set-1".into()),
        ("temperature", temperature.to_string()),
    ];
    if let Some(p) = out {
        pairs.push(("out", p.display().to_string()));
    }
    for (k, v) in pairs {
        raw.set(k, v).expect("known keys");
    }
    match SweepSpec::from_raw(&raw) {
        Ok(spec) => match sweep_and_emit(&spec, Some(1)) {
            Ok(o) => ExitCode::from(o.exit_code() as u8),
            Err(code) => code,
        },
        Err(e) => fail(e, CONFIG_ERROR),
    }
}

#[allow(clippy::too_many_arguments)]
fn optimum(delta_ac: f64, phonons: &str, engine: &str, gamma_x: f64, lo: f64, hi: f64, points: usize) -> ExitCode {
    let params = match PhononParams::from_name(phonons) {
        Ok(p) => p,
        Err(e) => return fail(e, CONFIG_ERROR),
    };
    let engine = match engine_registry().get(engine) {
        Ok(e) => e,
        Err(e) => return fail(e, CONFIG_ERROR),
    };
    let base = SystemParams { gamma_x, gamma_b: 2.0 * gamma_x, ..SystemParams::default() };
    let bath = match params.map(PhononBath::new).transpose() {
        Ok(b) => b,
        Err(e) => return fail(e, 2),
    };
    let search = Search { lo, hi, coarse_points: points, ..Search::default() };
    match find_optimal_detuning(delta_ac * gamma_x, &base, bath.as_ref(), engine.as_ref(), &Numerics::default(), search) {
        Ok(o) => {
            println!("delta_ac,delta_opt_over_delta_ac,delta_opt,I_max,interior,evaluations");
            println!(
                "{},{},{},{},{},{}",
                format_value(Some(delta_ac * gamma_x)),
                format_value(Some(o.ratio)),
                format_value(Some(o.delta)),
                format_value(Some(o.i_max)),
                o.interior,
                o.evaluations
            );
            if !o.interior {
                eprintln!("sps: no interior maximum in [{lo}, {hi}]; best value is on the boundary");
            }
            ExitCode::SUCCESS
        }
        Err(sps_core::Error::InvalidParameter { name, reason }) => fail(format!("`{name}`: {reason}"), CONFIG_ERROR),
        Err(e) => fail(e, 2),
    }
}

fn plot(csv: &Path, recipes: &[String], out_dir: &Path) -> ExitCode {
    let reg = recipe_registry();
    for name in recipes {
        let recipe = match reg.get(name) {
            Ok(r) => r,
            Err(e) => return fail(e, CONFIG_ERROR),
        };
        match emit_plot(csv, recipe.as_ref(), out_dir) {
            Ok(p) => println!("{}", p.display()),
            Err(e) => return fail(e, CONFIG_ERROR),
        }
    }
    ExitCode::SUCCESS
}

fn list() -> ExitCode {
    println!("modes: {}", mode_registry().names().join(", "));
    println!("engines: {}", engine_registry().names().join(", "));
    println!("propagators: {}", propagator_registry(Tolerances::default()).names().join(", "));
    println!("plot recipes: {}", recipe_registry().names().join(", "));
    println!("config keys:");
    for (k, d, help) in KEYS {
        let d = if d.is_empty() { String::new() } else { format!(" [default {d}]") };
        println!("  {k:<16} {help}{d}");
    }
    ExitCode::SUCCESS
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { CONFIG_ERROR } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match cli.command {
        Command::Run { config, jobs, engine, rtol, atol, tail_floor, out, overrides, plots } => {
            run(&config, jobs, engine, rtol, atol, tail_floor, out, &overrides, &plots)
        }
        Command::TableI { purcell_factor, temperature, out } => table_i(purcell_factor, temperature, out),
        Command::Optimum { delta_ac, phonons, engine, gamma_x, lo, hi, points } => {
            optimum(delta_ac, &phonons, &engine, gamma_x, lo, hi, points)
        }
        Command::Plot { csv, recipes, out_dir } => plot(&csv, &recipes, &out_dir),
        Command::List => list(),
    }
}
