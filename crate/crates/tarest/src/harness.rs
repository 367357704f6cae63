//! Monte Carlo verification harness: does the finite-`n` scaled estimation
//! error actually follow the simulated limit law?
//!
//! [`run_experiment`] wires the whole pipeline together. It solves the
//! stationary density once to read off the jump intensity, draws a reference
//! sample of the limit functional `ũ`, then for every sample size replays
//! many independent simulate → profile → estimate rounds and records the
//! scaled errors `n(θ̂ₙ − θ₀)`. The summary compares the two distributions
//! by the Kolmogorov–Smirnov distance and compares moments `p ∈ {1, 2}`.
//!
//! Every replication derives its random stream from
//! `(master_seed, n, replication)`, so the run is a pure function of the
//! config: replications can execute on any number of threads in any order
//! and still reproduce every output byte.

use crate::config::ExperimentConfig;
use crate::estimators::{bayes_estimate, ml_estimate, Prior};
use crate::likelihood::build_profile;
use crate::limit::{limit_sample, write_limit_sample, LimitLaw};
use crate::model::{check_conditions, invariant_density, GridSpec, TarModel};
use crate::streams::{substream, Domain};
use crate::{Error, Result};
use rayon::prelude::*;
use serde::Serialize;
use std::io::BufRead;
use std::path::Path;

/// File names [`emit`] writes into its output directory.
pub const REPLICATIONS_FILE: &str = "replications.csv";
pub const LIMIT_SAMPLE_FILE: &str = "limit_sample.txt";
pub const SUMMARY_FILE: &str = "summary.json";

/// Two-sample Kolmogorov–Smirnov statistic `sup_x |F_a(x) − F_b(x)|`.
///
/// One merge pass over the two sorted samples; ties within and across
/// samples are handled by advancing both ECDFs past each distinct value
/// before the supremum is probed.
pub fn ks_statistic(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::Contract(
            "the KS statistic needs two nonempty samples".into(),
        ));
    }
    if a.iter().chain(b).any(|x| !x.is_finite()) {
        return Err(Error::InvalidInput(
            "the KS statistic needs finite samples".into(),
        ));
    }
    let mut sa = a.to_vec();
    let mut sb = b.to_vec();
    sa.sort_by(f64::total_cmp);
    sb.sort_by(f64::total_cmp);
    let (na, nb) = (sa.len() as f64, sb.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut sup = 0.0f64;
    while i < sa.len() || j < sb.len() {
        let x = match (sa.get(i), sb.get(j)) {
            (Some(&x), Some(&y)) => x.min(y),
            (Some(&x), None) => x,
            (None, Some(&y)) => y,
            (None, None) => unreachable!(),
        };
        while i < sa.len() && sa[i] == x {
            i += 1;
        }
        while j < sb.len() && sb[j] == x {
            j += 1;
        }
        sup = sup.max((i as f64 / na - j as f64 / nb).abs());
    }
    Ok(sup)
}

/// Replication results for one sample size.
#[derive(Debug, Clone, PartialEq)]
pub struct PerN {
    pub n: usize,
    pub theta_bayes: Vec<f64>,
    pub theta_ml: Vec<f64>,
    /// `n(θ̃ₙ − θ₀)` per replication.
    pub scaled_err_bayes: Vec<f64>,
    /// `n(θ*ₙ − θ₀)` per replication.
    pub scaled_err_ml: Vec<f64>,
    /// KS distance between the scaled Bayes errors and the `ũ` sample.
    pub ks_bayes: f64,
}

/// One row of the moment-convergence table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentRow {
    pub n: usize,
    pub p: u32,
    /// Empirical `n^p E|θ̃ₙ − θ₀|^p` across replications.
    pub scaled_moment: f64,
    pub scaled_se: f64,
    /// Monte Carlo `E|ũ|^p` from the limit sample.
    pub limit_moment: f64,
    pub limit_se: f64,
    /// `scaled_moment / limit_moment` — moment convergence drives
    /// this to 1 as `n` grows.
    pub ratio: f64,
}

/// Everything a finished experiment produced.
#[derive(Debug, Clone, PartialEq)]
pub struct McSummary {
    pub theta_true: f64,
    /// Stationary density at the threshold — the limit jump intensity.
    pub lambda: f64,
    /// Regime gap at the threshold.
    pub delta0: f64,
    pub master_seed: u64,
    pub truncation_tol: f64,
    pub burn_in: usize,
    pub replications: usize,
    pub limit_draws: usize,
    pub per_n: Vec<PerN>,
    pub limit_sample: Vec<f64>,
    pub moments: Vec<MomentRow>,
}

fn mean_and_se(values: impl Iterator<Item = f64> + Clone, count: usize) -> (f64, f64) {
    let mean = values.clone().sum::<f64>() / count as f64;
    let var = values.map(|x| (x - mean) * (x - mean)).sum::<f64>() / count as f64;
    (mean, (var / count as f64).sqrt())
}

/// Run the full limit-theorem verification experiment described by `config`.
///
/// Stages: condition check (unless forced) → stationary density → limit law
/// and `ũ` sample → per-`n` replication sweep → KS and moment tables. Any
/// replication failure is reported with its `(n, replication)` coordinates.
pub fn run_experiment(config: &ExperimentConfig) -> Result<McSummary> {
    config.validate()?;
    let jobs = config.experiment.jobs;
    if jobs == 0 {
        return run_experiment_inner(config);
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::InvalidInput(format!("building a {jobs}-thread pool: {e}")))?;
    pool.install(|| run_experiment_inner(config))
}

fn run_experiment_inner(config: &ExperimentConfig) -> Result<McSummary> {
    let model = config.build_model()?;
    if model.threshold_count() != 1 {
        return Err(Error::Contract(
            "the experiment runner verifies the single-threshold limit law; estimate \
             multi-threshold models coordinate-wise via the estimators module"
                .into(),
        ));
    }
    let theta = config.theta_true_vec()?;
    let theta0 = theta[0];
    let exp = &config.experiment;

    if !exp.force {
        let report = check_conditions(&model)?;
        if !report.all_pass() {
            let failing: Vec<&str> = report
                .items
                .iter()
                .filter(|i| i.status == crate::model::Status::Fail)
                .map(|i| i.name.as_str())
                .collect();
            return Err(Error::Contract(format!(
                "model condition check failed ({}); set force = true to run anyway",
                failing.join(", ")
            )));
        }
    }

    let density = invariant_density(&model, &theta, &GridSpec::default(), 1e-8, 500)?;
    let law = LimitLaw::from_model(&model, &theta, &density, 0)?;
    let mut limit_rng = substream(exp.master_seed, Domain::LimitDraw, 0, 0);
    let u_sample = limit_sample(&law, exp.limit_draws, exp.truncation_tol, &mut limit_rng)?;

    let prior = config.build_priors(&model)?.pop().expect("one prior per box");

    let mut per_n = Vec::with_capacity(exp.n_list.len());
    for &n in &exp.n_list {
        let rows: Vec<Result<(f64, f64)>> = (0..exp.replications)
            .into_par_iter()
            .map(|rep| {
                replicate(&model, &prior, theta0, n, rep, exp.master_seed, exp.burn_in).map_err(
                    |e| Error::Replication {
                        n,
                        rep,
                        source: Box::new(e),
                    },
                )
            })
            .collect();
        let mut theta_bayes = Vec::with_capacity(exp.replications);
        let mut theta_ml = Vec::with_capacity(exp.replications);
        for row in rows {
            let (b, m) = row?;
            theta_bayes.push(b);
            theta_ml.push(m);
        }
        let scale = n as f64;
        let scaled_err_bayes: Vec<f64> = theta_bayes.iter().map(|t| scale * (t - theta0)).collect();
        let scaled_err_ml: Vec<f64> = theta_ml.iter().map(|t| scale * (t - theta0)).collect();
        let ks_bayes = ks_statistic(&scaled_err_bayes, &u_sample)?;
        per_n.push(PerN {
            n,
            theta_bayes,
            theta_ml,
            scaled_err_bayes,
            scaled_err_ml,
            ks_bayes,
        });
    }

    let mut moments = Vec::with_capacity(2 * per_n.len());
    for entry in &per_n {
        for p in [1u32, 2] {
            let (scaled_moment, scaled_se) = mean_and_se(
                entry.scaled_err_bayes.iter().map(move |x| x.abs().powi(p as i32)),
                entry.scaled_err_bayes.len(),
            );
            let (limit_moment, limit_se) = mean_and_se(
                u_sample.iter().map(move |x| x.abs().powi(p as i32)),
                u_sample.len(),
            );
            moments.push(MomentRow {
                n: entry.n,
                p,
                scaled_moment,
                scaled_se,
                limit_moment,
                limit_se,
                ratio: scaled_moment / limit_moment,
            });
        }
    }

    Ok(McSummary {
        theta_true: theta0,
        lambda: law.lambda(),
        delta0: law.delta0(),
        master_seed: exp.master_seed,
        truncation_tol: exp.truncation_tol,
        burn_in: exp.burn_in,
        replications: exp.replications,
        limit_draws: exp.limit_draws,
        per_n,
        limit_sample: u_sample,
        moments,
    })
}

/// One simulate → profile → estimate round on its own derived stream.
fn replicate(
    model: &TarModel,
    prior: &Prior,
    theta0: f64,
    n: usize,
    rep: usize,
    master_seed: u64,
    burn_in: usize,
) -> Result<(f64, f64)> {
    let mut rng = substream(master_seed, Domain::Replication, n as u64, rep as u64);
    let traj = model.simulate(&[theta0], n, burn_in, &mut rng)?;
    let profile = build_profile(model, &traj, 0)?;
    let bayes = bayes_estimate(&profile, prior)?;
    let ml = ml_estimate(&profile)?;
    Ok((bayes.theta, ml.theta))
}

#[derive(Serialize)]
struct SummaryFile<'a> {
    theta_true: f64,
    lambda: f64,
    delta0: f64,
    master_seed: u64,
    truncation_tol: f64,
    burn_in: usize,
    replications: usize,
    limit_draws: usize,
    ks: Vec<KsRow>,
    moments: &'a [MomentRow],
    versions: Versions,
}

#[derive(Serialize)]
struct KsRow {
    n: usize,
    ks_bayes: f64,
}

#[derive(Serialize)]
struct Versions {
    package: &'static str,
    version: &'static str,
    format: u32,
}

/// Write a summary into `dir` as three files: the per-replication table
/// (`replications.csv`), the limit sample (`limit_sample.txt`), and the
/// aggregate statistics (`summary.json`). Floats are written in shortest
/// round-trip form, so reloading reproduces every value bit-exactly.
pub fn emit(summary: &McSummary, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)
        .map_err(|e| Error::io(format!("creating output directory {}", dir.display()), e))?;

    let rep_path = dir.join(REPLICATIONS_FILE);
    let mut csv = String::from("n,rep,theta_bayes,theta_ml,scaled_err_bayes,scaled_err_ml\n");
    for entry in &summary.per_n {
        for rep in 0..entry.theta_bayes.len() {
            csv.push_str(&format!(
                "{},{},{},{},{},{}\n",
                entry.n,
                rep,
                entry.theta_bayes[rep],
                entry.theta_ml[rep],
                entry.scaled_err_bayes[rep],
                entry.scaled_err_ml[rep],
            ));
        }
    }
    std::fs::write(&rep_path, csv)
        .map_err(|e| Error::io(format!("writing {}", rep_path.display()), e))?;

    let limit_path = dir.join(LIMIT_SAMPLE_FILE);
    let file = std::fs::File::create(&limit_path)
        .map_err(|e| Error::io(format!("creating {}", limit_path.display()), e))?;
    write_limit_sample(&summary.limit_sample, std::io::BufWriter::new(file))?;

    let summary_path = dir.join(SUMMARY_FILE);
    let view = SummaryFile {
        theta_true: summary.theta_true,
        lambda: summary.lambda,
        delta0: summary.delta0,
        master_seed: summary.master_seed,
        truncation_tol: summary.truncation_tol,
        burn_in: summary.burn_in,
        replications: summary.replications,
        limit_draws: summary.limit_draws,
        ks: summary
            .per_n
            .iter()
            .map(|e| KsRow {
                n: e.n,
                ks_bayes: e.ks_bayes,
            })
            .collect(),
        moments: &summary.moments,
        versions: Versions {
            package: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            format: 1,
        },
    };
    let mut json = serde_json::to_string_pretty(&view)
        .map_err(|e| Error::InvalidInput(format!("serializing summary: {e}")))?;
    json.push('\n');
    std::fs::write(&summary_path, json)
        .map_err(|e| Error::io(format!("writing {}", summary_path.display()), e))?;
    Ok(())
}

/// One parsed row of `replications.csv`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReplicationRow {
    pub n: usize,
    pub rep: usize,
    pub theta_bayes: f64,
    pub theta_ml: f64,
    pub scaled_err_bayes: f64,
    pub scaled_err_ml: f64,
}

/// Read back a `replications.csv` written by [`emit`].
pub fn read_replications_csv<R: BufRead>(input: R) -> Result<Vec<ReplicationRow>> {
    let mut lines = input.lines().enumerate();
    let header = match lines.next() {
        Some((_, line)) => line.map_err(|e| Error::io("reading replications CSV", e))?,
        None => return Err(Error::InvalidInput("replications CSV is empty".into())),
    };
    let expected = "n,rep,theta_bayes,theta_ml,scaled_err_bayes,scaled_err_ml";
    if header.trim() != expected {
        return Err(Error::InvalidInput(format!(
            "replications CSV header {header:?} does not match {expected:?}"
        )));
    }
    let mut rows = Vec::new();
    for (idx, line) in lines {
        let line = line.map_err(|e| Error::io("reading replications CSV", e))?;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 6 {
            return Err(Error::InvalidInput(format!(
                "replications CSV line {}: expected 6 fields, got {}",
                idx + 1,
                fields.len()
            )));
        }
        let parse_f = |s: &str, name: &str| -> Result<f64> {
            s.trim().parse().map_err(|_| {
                Error::InvalidInput(format!(
                    "replications CSV line {}: bad {name}: {s:?}",
                    idx + 1
                ))
            })
        };
        let parse_u = |s: &str, name: &str| -> Result<usize> {
            s.trim().parse().map_err(|_| {
                Error::InvalidInput(format!(
                    "replications CSV line {}: bad {name}: {s:?}",
                    idx + 1
                ))
            })
        };
        rows.push(ReplicationRow {
            n: parse_u(fields[0], "n")?,
            rep: parse_u(fields[1], "rep")?,
            theta_bayes: parse_f(fields[2], "theta_bayes")?,
            theta_ml: parse_f(fields[3], "theta_ml")?,
            scaled_err_bayes: parse_f(fields[4], "scaled_err_bayes")?,
            scaled_err_ml: parse_f(fields[5], "scaled_err_ml")?,
        });
    }
    Ok(rows)
}
