// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand};
use shortpulse::Trajectory;
use shortpulse_lab::{
    check_dir, compare, config, run_mms, run_single, run_sweep, write_sweep, MmsConfig,
};

#[derive(Parser)]
#[command(name = "shortpulse", version, about = "Vanishing dispersion-diffusion experiments for the short pulse equation")]
struct Cli {
    /// JSON configuration file
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory; must not already exist
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Maximum number of concurrent runs
    #[arg(long, global = true, default_value_t = default_jobs())]
    jobs: usize,
    /// Fail unless the command is free of random number generation
    #[arg(long, global = true)]
    seedless: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate a single configuration with either solver
    Run,
    /// Run the vanishing-regularization sweep and write the convergence report
    Sweep,
    /// Lp distance between two runs at a stored time
    Compare {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, num_args = 2, allow_negative_numbers = true, default_values_t = [-10.0, 10.0])]
        window: Vec<f64>,
        #[arg(long, default_value_t = 2.0)]
        p: f64,
        #[arg(long)]
        t: f64,
    },
    /// Invariant suite on a run or sweep directory
    Check { dir: PathBuf },
    /// Manufactured-solution order study
    Mms,
}

fn default_jobs() -> usize {
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}

/// No code path reachable from the command line draws random numbers; the
/// flag exists so scripted pipelines can make that assumption explicit.
const USES_RNG: bool = false;

fn required<'a>(path: &'a Option<PathBuf>, flag: &str) -> anyhow::Result<&'a Path> {
    path.as_deref().with_context(|| format!("--{flag} is required for this command"))
}

fn fresh_out(out: &Option<PathBuf>) -> anyhow::Result<&Path> {
    let out = required(out, "out")?;
    if out.exists() {
        bail!("output directory {} already exists", out.display());
    }
    Ok(out)
}

/// Writes into a staging directory that is renamed into place on success,
/// so a failing command leaves nothing behind.
fn staged(out: &Path, write: impl FnOnce(&Path) -> anyhow::Result<()>) -> anyhow::Result<()> {
    let name = out.file_name().context("output path has no final component")?;
    let parent = out.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    fs::create_dir_all(parent)?;
    let tmp = parent.join(format!(".{}.partial", name.to_string_lossy()));
    if tmp.exists() {
        fs::remove_dir_all(&tmp)?;
    }
    fs::create_dir(&tmp)?;
    match write(&tmp) {
        Ok(()) => Ok(fs::rename(&tmp, out)?),
        Err(e) => {
            let _ = fs::remove_dir_all(&tmp);
            Err(e)
        }
    }
}

fn execute(cli: &Cli) -> anyhow::Result<bool> {
    if cli.seedless && USES_RNG {
        bail!("--seedless: this build draws random numbers");
    }
    match &cli.command {
        Command::Run => {
            let cfg = config::load_run(required(&cli.config, "config")?)?;
            let out = fresh_out(&cli.out)?;
            let traj = run_single(&cfg)?;
            staged(out, |dir| {
                fs::write(dir.join("config.json"), serde_json::to_string_pretty(&cfg)? + "\n")?;
                traj.write_dir(dir)?;
                Ok(())
            })?;
            println!("{:?} at t = {}", traj.outcome, traj.final_time());
            Ok(traj.is_complete())
        }
        Command::Sweep => {
            let cfg = config::load_sweep(required(&cli.config, "config")?)?;
            let out = fresh_out(&cli.out)?;
            let (report, runs) = run_sweep(&cfg, cli.jobs)?;
            staged(out, |dir| Ok(write_sweep(dir, &cfg, &runs, &report)?))?;
            let v = &report.verdicts;
            println!("all runs completed: {}", v.all_runs_completed);
            println!("distances non-increasing: {}", v.distances_non_increasing);
            println!("final distance halved: {}", v.final_halved);
            println!("entropy violation non-increasing: {:?}", v.entropy_non_increasing);
            println!("P convergence: {}", v.p_convergence.holds());
            println!("reference converged: {:?}", v.reference_converged);
            Ok(v.all_runs_completed)
        }
        Command::Compare { a, b, window, p, t } => {
            let ta = Trajectory::<f64>::read_dir(a).with_context(|| format!("reading {}", a.display()))?;
            let tb = Trajectory::<f64>::read_dir(b).with_context(|| format!("reading {}", b.display()))?;
            let d = compare(&ta, &tb, [window[0], window[1]], *p, *t)?;
            println!("{d:.17e}");
            Ok(true)
        }
        Command::Check { dir } => {
            let report = check_dir(dir, cli.jobs)?;
            for item in &report.items {
                println!("{} {}: {}", if item.passed { "ok  " } else { "FAIL" }, item.name, item.detail);
            }
            Ok(report.passed())
        }
        Command::Mms => {
            let cfg: MmsConfig = match &cli.config {
                Some(path) => config::parse(&fs::read_to_string(path)?, &path.display().to_string())?,
                None => MmsConfig::default(),
            };
            cfg.validate()?;
            let out = fresh_out(&cli.out)?;
            let report = run_mms(&cfg)?;
            staged(out, |dir| {
                fs::write(dir.join("mms.json"), serde_json::to_string_pretty(&report)? + "\n")?;
                Ok(())
            })?;
            println!("errors {:?}", report.linf_errors);
            println!("fitted order {:.3}", report.fitted_order);
            Ok(report.order_ok && report.finest_ok)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
