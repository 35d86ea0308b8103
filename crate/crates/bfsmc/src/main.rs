//! Command-line entry point.
//!
//! Exit codes: 0 = all checks passed, 1 = usage/config error, 2 = a declared
//! check failed (e.g. invariance violated or an escape was falsified).

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use bfsmc::adversary::{escape_magnitude, escape_magnitude_sim, verify_escape};
use bfsmc::cli::presets::{reproduce, FigureId};
use bfsmc::cli::sweep::{run_sweep, SweepSpec};
use bfsmc::cli::{execute, load_config, resolve_out_dir, write_artifacts};
use bfsmc::model::EscapeDirection;
use bfsmc::tuning::{self, FormulaVariant};

#[derive(Parser)]
#[command(name = "bfsmc", version, about = "Sampled-data BFASMC simulation laboratory")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, Default, ValueEnum)]
enum VariantArg {
    #[default]
    Statement,
    Proof,
}

impl From<VariantArg> for FormulaVariant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::Statement => FormulaVariant::Statement,
            VariantArg::Proof => FormulaVariant::Proof,
        }
    }
}

#[derive(Clone, Copy, Default, ValueEnum)]
enum MagnitudeArg {
    /// Sufficient bound 2*epsilon/(g1*tau) + u0.
    #[default]
    Proof,
    /// Experiment-specific (epsilon - x0)/tau.
    Sim,
}

#[derive(Clone, Copy, Default, ValueEnum)]
enum DirectionArg {
    #[default]
    Negative,
    LastSampleSign,
}

#[derive(Clone, Copy, ValueEnum)]
enum FigureArg {
    Escape,
    Barrier,
    LinearVsBfa,
    Gains,
    Reaching,
}

impl From<FigureArg> for FigureId {
    fn from(f: FigureArg) -> Self {
        match f {
            FigureArg::Escape => FigureId::Escape,
            FigureArg::Barrier => FigureId::Barrier,
            FigureArg::LinearVsBfa => FigureId::LinearVsBfa,
            FigureArg::Gains => FigureId::Gains,
            FigureArg::Reaching => FigureId::Reaching,
        }
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a single experiment from a JSON config.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        /// Output directory (overrides the config and BFSMC_OUT).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve the (epsilon, tau, c1) tuning tasks for one parameter set.
    Tune {
        #[arg(long)]
        epsilon: f64,
        #[arg(long)]
        tau: f64,
        #[arg(long)]
        c1: f64,
        #[arg(long)]
        g2: f64,
        #[arg(long)]
        delta_bar: f64,
        #[arg(long, value_enum, default_value_t)]
        variant: VariantArg,
        /// Also write the solutions as a one-row CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Construct and verify a one-interval escape disturbance.
    Adversary {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t)]
        magnitude: MagnitudeArg,
        #[arg(long, value_enum, default_value_t)]
        direction: DirectionArg,
        /// Scale factor >= 1 on top of the computed magnitude.
        #[arg(long, default_value_t = 1.0)]
        rho: f64,
    },
    /// Run a parameter sweep and aggregate one report row per run.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads (defaults to the number of cores).
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Re-run one of the embedded reference experiments.
    Reproduce {
        #[arg(value_enum)]
        figure: FigureArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Outcome of a subcommand: did every declared check pass?
type CmdResult = Result<bool, String>;

fn cmd_simulate(config: &Path, out: Option<&Path>) -> CmdResult {
    let cfg = load_config(config).map_err(|e| e.to_string())?;
    let resolved = cfg.resolve().map_err(|e| e.to_string())?;
    let artifacts = execute(&resolved).map_err(|e| e.to_string())?;
    let dir = resolve_out_dir(out, &resolved.output);
    write_artifacts(&artifacts, &dir, &resolved.output.basename).map_err(|e| e.to_string())?;
    for line in &artifacts.check_lines {
        println!("check: {line}");
    }
    println!("wrote {}", dir.join(format!("{}.csv", resolved.output.basename)).display());
    Ok(artifacts.checks_passed)
}

#[allow(clippy::too_many_arguments)]
fn cmd_tune(
    epsilon: f64,
    tau: f64,
    c1: f64,
    g2: f64,
    delta_bar: f64,
    variant: FormulaVariant,
    csv: Option<&Path>,
) -> CmdResult {
    let result =
        tuning::solve(epsilon, tau, c1, g2, delta_bar, variant).map_err(|e| e.to_string())?;
    println!("variant={:?}", result.formula_variant);
    println!("tau_max={:.17e}", result.tau_max);
    println!("epsilon_min={:.17e}", result.epsilon_min);
    match result.c1_interval {
        Some((lo, hi)) => {
            println!("c1_min={lo:.17e}");
            println!("c1_max={hi:.17e}");
        }
        None => println!("c1_interval=empty"),
    }
    if let Some(path) = csv {
        let (lo, hi) = result
            .c1_interval
            .map_or((String::new(), String::new()), |(a, b)| (format!("{a:.16e}"), format!("{b:.16e}")));
        let text = format!(
            "epsilon,tau,c1,g2,delta_bar,variant,tau_max,epsilon_min,c1_min,c1_max\n\
             {epsilon:.16e},{tau:.16e},{c1:.16e},{g2:.16e},{delta_bar:.16e},{:?},{:.16e},{:.16e},{lo},{hi}\n",
            result.formula_variant, result.tau_max, result.epsilon_min
        );
        fs::write(path, text).map_err(|e| e.to_string())?;
    }
    Ok(true)
}

fn cmd_adversary(
    config: &Path,
    out: Option<&Path>,
    magnitude: MagnitudeArg,
    direction: DirectionArg,
    rho: f64,
) -> CmdResult {
    let cfg = load_config(config).map_err(|e| e.to_string())?;
    let ctrl = cfg.controller.to_spec();
    let epsilon = ctrl
        .epsilon()
        .ok_or_else(|| "adversary needs a barrier controller (bfa or bfsat)".to_string())?;
    let u0 = ctrl.eval(cfg.sim.x0).map_err(|e| e.to_string())?;
    let varpi = match magnitude {
        MagnitudeArg::Proof => escape_magnitude(epsilon, cfg.plant.g1, cfg.sim.tau, u0),
        MagnitudeArg::Sim => escape_magnitude_sim(epsilon, cfg.sim.x0, cfg.sim.tau),
    };
    let dir_rule = match direction {
        DirectionArg::Negative => EscapeDirection::Negative,
        DirectionArg::LastSampleSign => EscapeDirection::LastSampleSign,
    };
    let (cert, traj) =
        verify_escape(&cfg.plant, &ctrl, &cfg.sim, varpi, dir_rule, rho).map_err(|e| e.to_string())?;

    let dir = resolve_out_dir(out, &cfg.output);
    fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
    let base = &cfg.output.basename;
    let mut csv = io::BufWriter::new(
        fs::File::create(dir.join(format!("{base}.csv"))).map_err(|e| e.to_string())?,
    );
    traj.write_csv(&mut csv).map_err(|e| e.to_string())?;
    csv.flush().map_err(|e| e.to_string())?;
    fs::write(dir.join(format!("{base}_certificate.txt")), cert.kv()).map_err(|e| e.to_string())?;

    print!("{}", cert.kv());
    Ok(!cert.falsified)
}

fn cmd_sweep(config: &Path, out: Option<&Path>, jobs: Option<usize>) -> CmdResult {
    if let Some(n) = jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| e.to_string())?;
    }
    let text = fs::read_to_string(config).map_err(|e| e.to_string())?;
    let spec: SweepSpec = serde_json::from_str(&text).map_err(|e| e.to_string())?;
    let outcome = run_sweep(&spec).map_err(|e| e.to_string())?;
    let dir = resolve_out_dir(out, &spec.base.output);
    fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
    let path = dir.join(format!("{}_sweep.csv", spec.base.output.basename));
    fs::write(&path, &outcome.csv).map_err(|e| e.to_string())?;
    println!("{} rows -> {}", outcome.rows, path.display());
    println!(
        "guaranteed_regime: {}",
        if outcome.all_guaranteed_passed { "all pass" } else { "FAILURES" }
    );
    Ok(outcome.all_guaranteed_passed)
}

fn cmd_reproduce(figure: FigureId, out: Option<&Path>) -> CmdResult {
    let default_out = bfsmc::cli::OutputConfig::default();
    let dir = resolve_out_dir(out, &default_out);
    let outcome = reproduce(figure, &dir).map_err(|e| e.to_string())?;
    for line in &outcome.lines {
        println!("{line}");
    }
    Ok(outcome.passed)
}

fn main() -> ExitCode {
    // usage errors must exit 1 (code 2 is reserved for failed checks)
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match &cli.cmd {
        Cmd::Simulate { config, out } => cmd_simulate(config, out.as_deref()),
        Cmd::Tune { epsilon, tau, c1, g2, delta_bar, variant, csv } => cmd_tune(
            *epsilon,
            *tau,
            *c1,
            *g2,
            *delta_bar,
            (*variant).into(),
            csv.as_deref(),
        ),
        Cmd::Adversary { config, out, magnitude, direction, rho } => {
            cmd_adversary(config, out.as_deref(), *magnitude, *direction, *rho)
        }
        Cmd::Sweep { config, out, jobs } => cmd_sweep(config, out.as_deref(), *jobs),
        Cmd::Reproduce { figure, out } => cmd_reproduce((*figure).into(), out.as_deref()),
    };
    match result {
        Ok(true) => ExitCode::from(0),
        Ok(false) => ExitCode::from(2),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
