//! Thin command-line front end over the `tarest` library.
//!
//! Every subcommand reads one TOML config (`--config`), applies the optional
//! `--seed` / `--out` / `--jobs` overrides, runs one library entry point, and
//! writes its artifacts into the output directory. Errors leave as a single
//! JSON object on stderr (`{"error": …, "kind": …}`) with a nonzero exit
//! code, so scripted callers never have to parse prose.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use tarest::config::ExperimentConfig;
use tarest::estimators::{write_estimate_json, write_posterior_csv, EstimateRecord};
use tarest::harness::{emit, run_experiment};
use tarest::likelihood::{build_profile, write_profile_csv};
use tarest::limit::{limit_sample, write_limit_sample, LimitLaw, LimitSampleMeta};
use tarest::model::{check_conditions, invariant_density, GridSpec, Trajectory};
use tarest::streams::{substream, Domain};
use tarest::{Error, Result};

#[derive(Parser)]
#[command(
    name = "tarest",
    version,
    about = "Threshold autoregression: simulation, Bayes/ML estimation, limit law, Monte Carlo"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// TOML experiment configuration.
    #[arg(long, value_name = "FILE")]
    config: PathBuf,
    /// Override the config's master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory (overrides the config's `out_dir`; default ".").
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Worker threads for the replication sweep (0 = all cores).
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate one trajectory and write it as `trajectory.csv` (columns t,x).
    Simulate {
        #[command(flatten)]
        common: Common,
        /// Series length; defaults to the last entry of the config's n_list.
        #[arg(long)]
        n: Option<usize>,
    },
    /// Profile the log-likelihood of a simulated series over each threshold
    /// box and write `profile.csv` (columns interval_left, interval_right,
    /// log_likelihood; one file per box when there are several).
    Profile {
        #[command(flatten)]
        common: Common,
        /// Series length; defaults to the last entry of the config's n_list.
        #[arg(long)]
        n: Option<usize>,
    },
    /// Estimate the threshold(s) from a series supplied as a CSV file and
    /// write `result.json` plus the posterior density CSV.
    Estimate {
        #[command(flatten)]
        common: Common,
        /// CSV of observed values: one value per line, or `t,x` rows; a
        /// non-numeric first line is treated as a header.
        series: PathBuf,
    },
    /// Draw the limit-law sample and write `limit_sample.txt` (one value per
    /// line) plus `limit_meta.json`.
    Limit {
        #[command(flatten)]
        common: Common,
        /// Number of draws; defaults to the config's limit_draws.
        #[arg(long)]
        draws: Option<usize>,
    },
    /// Check the model's standing assumptions and print the report as JSON;
    /// exits nonzero when any check fails.
    Check {
        #[command(flatten)]
        common: Common,
    },
    /// Run the full Monte Carlo experiment and write `replications.csv`,
    /// `limit_sample.txt`, and `summary.json`.
    Mc {
        #[command(flatten)]
        common: Common,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse().command) {
        Ok(code) => code,
        Err(e) => {
            let payload = serde_json::json!({ "error": e.to_string(), "kind": e.kind() });
            eprintln!("{payload}");
            ExitCode::FAILURE
        }
    }
}

fn run(command: Command) -> Result<ExitCode> {
    match command {
        Command::Simulate { common, n } => simulate_cmd(&common, n),
        Command::Profile { common, n } => profile_cmd(&common, n),
        Command::Estimate { common, series } => estimate_cmd(&common, &series),
        Command::Limit { common, draws } => limit_cmd(&common, draws),
        Command::Check { common } => check_cmd(&common),
        Command::Mc { common } => mc_cmd(&common),
    }
}

/// Load the config and fold in the command-line overrides.
fn load(common: &Common) -> Result<ExperimentConfig> {
    let mut config = ExperimentConfig::load(&common.config)?;
    if let Some(seed) = common.seed {
        config.experiment.master_seed = seed;
    }
    if let Some(out) = &common.out {
        config.experiment.out_dir = Some(out.clone());
    }
    if let Some(jobs) = common.jobs {
        config.experiment.jobs = jobs;
    }
    config.validate()?;
    Ok(config)
}

fn out_dir(config: &ExperimentConfig) -> PathBuf {
    config
        .experiment
        .out_dir
        .clone()
        .unwrap_or_else(|| PathBuf::from("."))
}

fn io_err(context: String, source: std::io::Error) -> Error {
    Error::Io { context, source }
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)
                .map_err(|e| io_err(format!("creating {}", parent.display()), e))?;
        }
    }
    let file =
        File::create(path).map_err(|e| io_err(format!("creating {}", path.display()), e))?;
    Ok(BufWriter::new(file))
}

fn series_length(config: &ExperimentConfig, n: Option<usize>) -> Result<usize> {
    match n.or_else(|| config.experiment.n_list.last().copied()) {
        Some(n) if n > 0 => Ok(n),
        Some(_) => Err(Error::InvalidInput("series length must be positive".into())),
        None => Err(Error::InvalidInput(
            "no series length: pass --n or list at least one n in the config".into(),
        )),
    }
}

/// Simulate the trajectory the experiment runner would use for replication 0
/// at this `n` — same stream, same burn-in — so single runs are comparable
/// with the Monte Carlo sweep.
fn simulate_series(config: &ExperimentConfig, n: usize) -> Result<Trajectory> {
    let model = config.build_model()?;
    let theta = config.theta_true_vec()?;
    let exp = &config.experiment;
    let mut rng = substream(exp.master_seed, Domain::Replication, n as u64, 0);
    model.simulate(&theta, n, exp.burn_in, &mut rng)
}

fn simulate_cmd(common: &Common, n: Option<usize>) -> Result<ExitCode> {
    let config = load(common)?;
    let n = series_length(&config, n)?;
    let traj = simulate_series(&config, n)?;
    let path = out_dir(&config).join("trajectory.csv");
    let mut out = create(&path)?;
    let write = |out: &mut BufWriter<File>| -> std::io::Result<()> {
        writeln!(out, "t,x")?;
        for (t, x) in traj.values.iter().enumerate() {
            writeln!(out, "{t},{x}")?;
        }
        Ok(())
    };
    write(&mut out).map_err(|e| io_err(format!("writing {}", path.display()), e))?;
    println!("{}", path.display());
    Ok(ExitCode::SUCCESS)
}

fn profile_cmd(common: &Common, n: Option<usize>) -> Result<ExitCode> {
    let config = load(common)?;
    let n = series_length(&config, n)?;
    let model = config.build_model()?;
    let traj = simulate_series(&config, n)?;
    let dir = out_dir(&config);
    let boxes = model.boxes().len();
    for k in 0..boxes {
        let profile = build_profile(&model, &traj, k)?;
        let name = if boxes == 1 { "profile.csv".to_string() } else { format!("profile_{k}.csv") };
        let path = dir.join(name);
        write_profile_csv(&profile, create(&path)?)?;
        println!("{}", path.display());
    }
    Ok(ExitCode::SUCCESS)
}

/// Parse a series CSV: one value per line or `t,x` rows (last field wins); a
/// non-numeric first line is treated as a header and skipped.
fn read_series(path: &Path) -> Result<Vec<f64>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| io_err(format!("reading {}", path.display()), e))?;
    let mut values = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let field = line.rsplit(',').next().unwrap_or(line).trim();
        match field.parse::<f64>() {
            Ok(v) => values.push(v),
            Err(_) if i == 0 => continue,
            Err(_) => {
                return Err(Error::InvalidInput(format!(
                    "{} line {}: not a number: {field:?}",
                    path.display(),
                    i + 1
                )))
            }
        }
    }
    Ok(values)
}

fn estimate_cmd(common: &Common, series: &Path) -> Result<ExitCode> {
    let config = load(common)?;
    let model = config.build_model()?;
    let traj = Trajectory::from_values(read_series(series)?)?;
    let priors = config.build_priors(&model)?;
    let estimates = tarest::estimators::multi_threshold_estimate(&model, &traj, &priors)?;
    let dir = out_dir(&config);
    let theta_true = config.experiment.theta_true.as_ref().map(|t| t.as_vec());

    let result_path = dir.join("result.json");
    if estimates.len() == 1 {
        let est = &estimates[0];
        let ml = est.ml.as_ref().ok_or_else(|| {
            Error::Contract("no sample fell inside the threshold box; the likelihood is flat".into())
        })?;
        let record = EstimateRecord {
            bayes: est.bayes.theta,
            ml: ml.theta,
            ml_interval: ml.interval,
            n: traj.n(),
            seed: config.experiment.master_seed,
            theta_true: theta_true.as_ref().map(|t| t[0]),
        };
        write_estimate_json(&record, create(&result_path)?)?;
    } else {
        let rows: Vec<serde_json::Value> = estimates
            .iter()
            .map(|est| {
                serde_json::json!({
                    "box_index": est.box_index,
                    "bayes": est.bayes.theta,
                    "ml": est.ml.as_ref().map(|m| m.theta),
                    "ml_interval": est.ml.as_ref().map(|m| m.interval),
                })
            })
            .collect();
        let payload = serde_json::json!({
            "coordinates": rows,
            "n": traj.n(),
            "seed": config.experiment.master_seed,
            "theta_true": theta_true,
        });
        let mut out = create(&result_path)?;
        serde_json::to_writer_pretty(&mut out, &payload)
            .map_err(|e| Error::InvalidInput(format!("serializing estimates: {e}")))?;
        writeln!(out).map_err(|e| io_err("writing result.json".into(), e))?;
    }
    println!("{}", result_path.display());

    for (k, prior) in priors.iter().enumerate() {
        let profile = build_profile(&model, &traj, k)?;
        let posterior = tarest::estimators::posterior_density(&profile, prior)?;
        let name =
            if priors.len() == 1 { "posterior.csv".to_string() } else { format!("posterior_{k}.csv") };
        let path = dir.join(name);
        write_posterior_csv(&posterior, create(&path)?)?;
        println!("{}", path.display());
    }
    Ok(ExitCode::SUCCESS)
}

fn limit_cmd(common: &Common, draws: Option<usize>) -> Result<ExitCode> {
    let config = load(common)?;
    let model = config.build_model()?;
    let theta = config.theta_true_vec()?;
    if theta.len() != 1 {
        return Err(Error::Contract(
            "the limit sample is defined per threshold; configure a single-threshold model".into(),
        ));
    }
    let exp = &config.experiment;
    let draws = draws.unwrap_or(exp.limit_draws);
    let density = invariant_density(&model, &theta, &GridSpec::default(), 1e-8, 500)?;
    let law = LimitLaw::from_model(&model, &theta, &density, 0)?;
    let mut rng = substream(exp.master_seed, Domain::LimitDraw, 0, 0);
    let sample = limit_sample(&law, draws, exp.truncation_tol, &mut rng)?;

    let dir = out_dir(&config);
    let sample_path = dir.join("limit_sample.txt");
    write_limit_sample(&sample, create(&sample_path)?)?;
    println!("{}", sample_path.display());

    let meta = LimitSampleMeta {
        lambda: law.lambda(),
        delta0: law.delta0(),
        tol: exp.truncation_tol,
        draws,
        seed: exp.master_seed,
    };
    let meta_path = dir.join("limit_meta.json");
    let mut out = create(&meta_path)?;
    serde_json::to_writer_pretty(&mut out, &meta)
        .map_err(|e| Error::InvalidInput(format!("serializing limit metadata: {e}")))?;
    writeln!(out).map_err(|e| io_err("writing limit metadata".into(), e))?;
    println!("{}", meta_path.display());
    Ok(ExitCode::SUCCESS)
}

fn check_cmd(common: &Common) -> Result<ExitCode> {
    let config = load(common)?;
    let model = config.build_model()?;
    let report = check_conditions(&model)?;
    let json = serde_json::to_string_pretty(&report)
        .map_err(|e| Error::InvalidInput(format!("serializing condition report: {e}")))?;
    println!("{json}");
    if report.all_pass() {
        Ok(ExitCode::SUCCESS)
    } else {
        Err(Error::Contract(
            "model condition check failed; see the report on stdout".into(),
        ))
    }
}

fn mc_cmd(common: &Common) -> Result<ExitCode> {
    let config = load(common)?;
    let summary = run_experiment(&config)?;
    let dir = out_dir(&config);
    emit(&summary, &dir)?;
    for name in
        [tarest::harness::REPLICATIONS_FILE, tarest::harness::LIMIT_SAMPLE_FILE, tarest::harness::SUMMARY_FILE]
    {
        println!("{}", dir.join(name).display());
    }
    Ok(ExitCode::SUCCESS)
}

