//! Command-line front end: `run`, `sweep`, `rates`, `validate`.
//!
//! Any config key can be overridden either as `--set key=value` or directly
//! as `--key value` / `--key=value`, e.g. `--g_ueV 30 --phonons_enabled false`.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qd_entangle::params::{ConfigFile, PhysicalParams, CONFIG_KEYS};
use qd_entangle::phonon::PhononKernel;
use qd_entangle::runner::{
    default_rate_detunings, pulse_to_cavity_ratio, rate_curve_csv, rates_csv, run_id, run_single,
    run_sweep, sweep_csv, workers_from_env, Artifact, RunOptions, SweepAxis, SweepSpec,
};
use qd_entangle::Error;

#[derive(Parser)]
#[command(name = "qd-entangle", version, about = "Entangled photon pairs from a driven quantum-dot cavity")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Common {
    /// Key/value config file; omitted keys take defaults.
    #[arg(short, long)]
    config: Option<PathBuf>,
    /// Override a config key, `key=value`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Output root; each run lands in `<out>/<run-id>/`.
    #[arg(short, long, default_value = "out")]
    out: PathBuf,
}

#[derive(Subcommand)]
enum Cmd {
    /// Simulate one parameter point.
    Run {
        #[command(flatten)]
        common: Common,
        /// Comma-separated artifacts: concurrence,qber,tpdm,rates,stark,ettocf,trajectory
        #[arg(long, value_delimiter = ',', default_value = "concurrence,qber,tpdm")]
        outputs: Vec<String>,
    },
    /// Simulate along one axis; worker count from QD_ENTANGLE_WORKERS.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// g, temperature, delta_fss or T_p_prime
        #[arg(long)]
        axis: String,
        /// Comma-separated values in laboratory units (μeV, K, μeV, ps).
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<f64>,
        /// Overrides the worker count from the environment.
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Phonon rates and rate-versus-detuning curves, no dynamics.
    Rates {
        #[command(flatten)]
        common: Common,
    },
    /// Check the config and the polaron validity figure.
    Validate {
        #[command(flatten)]
        common: Common,
    },
}

/// Rewrites `--key value` and `--key=value` for config keys into `--set key=value`.
fn expand_key_flags(args: Vec<String>) -> Vec<String> {
    let mut out = Vec::with_capacity(args.len());
    let mut it = args.into_iter();
    while let Some(a) = it.next() {
        let Some(body) = a.strip_prefix("--") else {
            out.push(a);
            continue;
        };
        let (key, inline) = match body.split_once('=') {
            Some((k, v)) => (k.to_string(), Some(v.to_string())),
            None => (body.to_string(), None),
        };
        if !CONFIG_KEYS.contains(&key.as_str()) {
            out.push(a);
            continue;
        }
        let value = inline.or_else(|| it.next()).unwrap_or_default();
        out.push("--set".into());
        out.push(format!("{key}={value}"));
    }
    out
}

fn load(common: &Common) -> qd_entangle::Result<PhysicalParams> {
    let mut cfg = match &common.config {
        Some(path) => ConfigFile::parse(&std::fs::read_to_string(path)?)?,
        None => ConfigFile::default(),
    };
    for kv in &common.set {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| Error::Argument(format!("override `{kv}` is not key=value")))?;
        cfg.set(k.trim(), v.trim())?;
    }
    cfg.to_params()
}

fn write_files(dir: &Path, files: &[(&str, String)]) -> qd_entangle::Result<()> {
    std::fs::create_dir_all(dir)?;
    for (name, text) in files {
        std::fs::write(dir.join(name), text)?;
    }
    Ok(())
}

fn execute(cmd: Cmd) -> qd_entangle::Result<()> {
    let opts = RunOptions::default();
    match cmd {
        Cmd::Run { common, outputs } => {
            let p = load(&common)?;
            let outputs = outputs
                .iter()
                .map(|s| Artifact::parse(s))
                .collect::<qd_entangle::Result<Vec<_>>>()?;
            let (dir, sim) = run_single(&p, &outputs, &common.out, &opts)?;
            println!("{}  -> {}", sim.summary_line(), dir.display());
        }
        Cmd::Sweep {
            common,
            axis,
            values,
            workers,
        } => {
            let spec = SweepSpec {
                axis: SweepAxis::parse(&axis)?,
                values,
                base: load(&common)?,
                outputs: vec![Artifact::Concurrence, Artifact::Qber],
            };
            spec.validate()?;
            let workers = workers.unwrap_or_else(workers_from_env);
            log::info!("sweeping {} points on {workers} workers", spec.values.len());
            let rows = run_sweep(&spec, workers, &opts)?;
            let dir = common.out.join(format!("sweep-{}-{}", spec.axis.name(), run_id(&spec.base)));
            write_files(
                &dir,
                &[
                    ("sweep.csv", sweep_csv(spec.axis, &rows)),
                    ("config.echo", spec.base.to_config_string()),
                ],
            )?;
            let failed = rows.iter().filter(|r| r.error.is_some()).count();
            for r in &rows {
                println!(
                    "{} = {:<8} C = {:.4}  q = {:.4}  <B> = {:.4}{}",
                    spec.axis.name(),
                    r.axis_value,
                    r.concurrence,
                    r.qber,
                    r.b_avg,
                    r.error.as_deref().map(|e| format!("  error: {e}")).unwrap_or_default()
                );
            }
            println!("{} points, {failed} failed -> {}", rows.len(), dir.display());
        }
        Cmd::Rates { common } => {
            let p = load(&common)?;
            let kernel = PhononKernel::build(&p)?;
            let dir = common.out.join(run_id(&p));
            write_files(
                &dir,
                &[
                    ("rates.csv", rates_csv(&kernel, &p)?),
                    ("rate_curve.csv", rate_curve_csv(&p, &kernel, &default_rate_detunings())),
                    ("config.echo", p.to_config_string()),
                ],
            )?;
            println!(
                "<B> = {:.4}  pulse/cavity ratio at peak = {:.2}  -> {}",
                kernel.b_avg,
                pulse_to_cavity_ratio(&p),
                dir.display()
            );
        }
        Cmd::Validate { common } => {
            let p = load(&common)?;
            let kernel = PhononKernel::build(&p)?;
            let v = p.check_polaron_validity(kernel.b_avg)?;
            println!(
                "config ok  <B> = {:.4}  validity = {:.4} (threshold {}, {})",
                kernel.b_avg,
                v.value,
                v.threshold,
                if v.pass { "pass" } else { "FAIL" }
            );
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse_from(expand_key_flags(std::env::args().collect()));
    match execute(cli.cmd) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e.root() {
                Error::Config { .. } | Error::Validation { .. } | Error::Argument(_) => ExitCode::from(2),
                _ => ExitCode::FAILURE,
            }
        }
    }
}
