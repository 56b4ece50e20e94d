use std::fmt::Write as _;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use sha2::{Digest, Sha256};

use super::config::{EstimatorConfig, ExperimentConfig, RegionConfig};
use crate::engine::BondParams;
use crate::environment::{write_environment_table, Environment, RadiusDistribution};
use crate::error::{Error, Result};
use crate::estimators::{
    estimate_coverage, estimate_theta_annealed, fit_decay_rate, scan_pc_curve, t_plus_survival,
    EstimateResult, TPlusSetup,
};
use crate::rng::{bond_seed, env_seed};

pub const CSV_HEADER: &str = "estimator,params,point,half_width,replicas,censored_fraction,wall_time";
pub const ESTIMATES_FILE: &str = "estimates.csv";
pub const MANIFEST_FILE: &str = "manifest.json";
/// Present in the output directory until the run completes.
pub const PARTIAL_MARKER: &str = "PARTIAL";

#[derive(Debug, Clone, Copy)]
pub struct RunOptions {
    /// Worker threads; results do not depend on this.
    pub threads: usize,
    /// Fill the `wall_time` column. Off by default because timings make
    /// otherwise identical outputs differ.
    pub wall_time: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            threads: 1,
            wall_time: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EstimateRow {
    pub estimator: String,
    /// Space-separated `key=value` pairs.
    pub params: String,
    pub result: EstimateResult,
    pub wall_time: Option<f64>,
}

impl EstimateRow {
    pub fn to_csv_line(&self) -> String {
        let r = &self.result;
        format!(
            "{},{},{},{},{},{},{}",
            self.estimator,
            self.params,
            r.point,
            r.half_width,
            r.replicas,
            r.censored_fraction,
            self.wall_time.map(|t| format!("{t:.6}")).unwrap_or_default()
        )
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub program: String,
    pub version: String,
    pub config_sha256: String,
    pub estimator: String,
    pub master_seed: u64,
    pub first_env_seed: u64,
    pub first_bond_seed: u64,
    pub threads: usize,
    pub rows: usize,
    pub wall_time_seconds: f64,
    pub complete: bool,
}

#[derive(Debug, Clone)]
pub struct RunSummary {
    pub rows: Vec<EstimateRow>,
    pub estimates_path: PathBuf,
    pub manifest_path: PathBuf,
}

/// SHA-256 of the canonical serialization of the config.
pub fn config_hash(cfg: &ExperimentConfig) -> String {
    let digest = Sha256::digest(cfg.to_toml().as_bytes());
    let mut out = String::with_capacity(64);
    for b in digest.iter() {
        let _ = write!(out, "{b:02x}");
    }
    out
}

fn params_of(pairs: &[(&str, String)]) -> String {
    pairs
        .iter()
        .map(|(k, v)| format!("{k}={v}"))
        .collect::<Vec<_>>()
        .join(" ")
}

/// Computes every estimate of the experiment, handing rows to `emit` as
/// soon as they are known.
pub fn execute<F>(cfg: &ExperimentConfig, wall_time: bool, mut emit: F) -> Result<()>
where
    F: FnMut(EstimateRow) -> Result<()>,
{
    cfg.validate()?;
    let spec = cfg.graph_spec()?;
    let model = cfg.region.region_model()?;
    let seed = cfg.master_seed;
    let mut clock = Instant::now();
    let mut row = |estimator: &str, params: String, result: EstimateResult| {
        let elapsed = clock.elapsed().as_secs_f64();
        clock = Instant::now();
        emit(EstimateRow {
            estimator: estimator.into(),
            params,
            result,
            wall_time: wall_time.then_some(elapsed),
        })
    };
    match &cfg.estimator {
        EstimatorConfig::Theta { p, q, replicas } => {
            for &qv in q {
                for &pv in p {
                    let params = BondParams::new(pv, qv)?;
                    // every grid point shares the master seed, so the grid is coupled
                    let est = estimate_theta_annealed(&spec, cfg.window, &model, params, *replicas, seed)?;
                    row("theta", params_of(&[("p", pv.to_string()), ("q", qv.to_string())]), est)?;
                }
            }
        }
        EstimatorConfig::Decay { p, radii, replicas } => {
            for &pv in p {
                let fit = fit_decay_rate(&spec, pv, cfg.window, radii, *replicas, seed)?;
                for (r, est) in &fit.estimates {
                    row("connect", params_of(&[("p", pv.to_string()), ("r", r.to_string())]), *est)?;
                }
                let rate = EstimateResult {
                    point: fit.rate,
                    half_width: 1.96 * fit.rate_se,
                    replicas: *replicas,
                    censored_fraction: 0.0,
                };
                let params = params_of(&[
                    ("p", pv.to_string()),
                    ("r_squared", fit.r_squared.to_string()),
                    ("truncated", fit.truncated.to_string()),
                ]);
                row("decay_rate", params, rate)?;
            }
        }
        EstimatorConfig::Coverage { environments } => {
            let (Some(m), Some(law)) = (cfg.region.model(), cfg.region.law()) else {
                return Err(Error::Config("coverage needs a random region".into()));
            };
            let dist = RadiusDistribution::new(law)?;
            let est = estimate_coverage(&dist, m, &spec, cfg.window, *environments, seed)?;
            row("coverage", params_of(&[("model", m.to_string())]), est)?;
        }
        EstimatorConfig::PcScan { q, replicas, tau } => {
            for entry in q {
                let choice = entry.choice()?;
                let scan = scan_pc_curve(&spec, cfg.window, &model, &[choice], *replicas, *tau, seed)?;
                let point = &scan.points[0];
                let used: u64 = point.evaluations.iter().map(|(_, e)| e.replicas).sum();
                let censored = point
                    .evaluations
                    .last()
                    .map_or(0.0, |(_, e)| e.censored_fraction);
                let est = EstimateResult {
                    point: point.p_c,
                    half_width: (point.upper - point.lower) / 2.0,
                    replicas: used,
                    censored_fraction: censored,
                };
                let params = params_of(&[
                    ("q", choice.to_string()),
                    ("tau", tau.to_string()),
                    ("unresolved", point.unresolved.to_string()),
                    ("non_monotone", point.non_monotone.to_string()),
                ]);
                row("pc_scan", params, est)?;
            }
        }
        EstimatorConfig::TPlus {
            p,
            q,
            decay_rate,
            l0,
            max_k,
            m_max,
            replicas,
        } => {
            let RegionConfig::Stack { law } = cfg.region else {
                return Err(Error::Config("t_plus needs the stack model".into()));
            };
            let dist = RadiusDistribution::new(law)?;
            let l0 = l0.unwrap_or_else(|| dist.min_support().div_ceil(2).max(1));
            let setup = TPlusSetup {
                spec: spec.clone(),
                window: cfg.window,
                dist,
                params: BondParams::new(*p, *q)?,
                decay_rate: *decay_rate,
                l0,
                max_k: *max_k,
                replicas: *replicas,
                master_seed: seed,
            };
            let curve = t_plus_survival(&setup, *m_max)?;
            let censored = curve.censored as f64 / curve.replicas as f64;
            let mut greenwood = 0.0;
            for (m, &s) in curve.survival.iter().enumerate() {
                let (n, d) = (curve.at_risk[m] as f64, curve.events[m] as f64);
                if n > d {
                    greenwood += d / (n * (n - d));
                }
                let est = EstimateResult {
                    point: s,
                    half_width: 1.96 * s * greenwood.sqrt(),
                    replicas: curve.at_risk[m],
                    censored_fraction: censored,
                };
                row("t_plus_survival", params_of(&[("l0", l0.to_string()), ("m", m.to_string())]), est)?;
            }
            let slope = EstimateResult {
                point: curve.slope,
                half_width: curve.slope_upper - curve.slope,
                replicas: curve.replicas,
                censored_fraction: censored,
            };
            let params = params_of(&[
                ("l0", l0.to_string()),
                ("level_floor", curve.level_floor.to_string()),
                ("no_index", curve.no_index.to_string()),
            ]);
            row("t_plus_slope", params, slope)?;
        }
    }
    Ok(())
}

fn thread_pool(threads: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| Error::Config(format!("cannot start {threads} threads: {e}")))
}

fn write_manifest(path: &Path, manifest: &Manifest) -> Result<()> {
    let text = serde_json::to_string_pretty(manifest).map_err(|e| Error::Io(e.to_string()))?;
    fs::write(path, text + "\n")?;
    Ok(())
}

/// Runs the experiment and writes `estimates.csv` and `manifest.json` into
/// the configured output directory. Rows are flushed as they complete; the
/// `PARTIAL` marker is removed only after the last one.
pub fn run(cfg: &ExperimentConfig, opts: &RunOptions) -> Result<RunSummary> {
    cfg.validate()?;
    let start = Instant::now();
    let dir = &cfg.output;
    fs::create_dir_all(dir)?;
    let marker = dir.join(PARTIAL_MARKER);
    fs::write(&marker, "run in progress or interrupted\n")?;
    let estimates_path = dir.join(ESTIMATES_FILE);
    let manifest_path = dir.join(MANIFEST_FILE);
    let mut manifest = Manifest {
        program: env!("CARGO_PKG_NAME").into(),
        version: env!("CARGO_PKG_VERSION").into(),
        config_sha256: config_hash(cfg),
        estimator: cfg.estimator.name().into(),
        master_seed: cfg.master_seed,
        first_env_seed: env_seed(cfg.master_seed, 0),
        first_bond_seed: bond_seed(cfg.master_seed, 0, 0),
        threads: opts.threads,
        rows: 0,
        wall_time_seconds: 0.0,
        complete: false,
    };
    write_manifest(&manifest_path, &manifest)?;

    let mut out = BufWriter::new(File::create(&estimates_path)?);
    writeln!(out, "{CSV_HEADER}")?;
    out.flush()?;
    let mut rows = Vec::new();
    let pool = thread_pool(opts.threads)?;
    let outcome = pool.install(|| {
        execute(cfg, opts.wall_time, |row| {
            writeln!(out, "{}", row.to_csv_line())?;
            out.flush()?;
            rows.push(row);
            Ok(())
        })
    });
    drop(out);
    manifest.rows = rows.len();
    manifest.wall_time_seconds = start.elapsed().as_secs_f64();
    manifest.complete = outcome.is_ok();
    write_manifest(&manifest_path, &manifest)?;
    outcome?;
    fs::remove_file(&marker)?;
    Ok(RunSummary {
        rows,
        estimates_path,
        manifest_path,
    })
}

/// Environment `index` of the experiment as a flat `index radius` table.
pub fn dump_environment(cfg: &ExperimentConfig, index: u64) -> Result<String> {
    let (Some(model), Some(law)) = (cfg.region.model(), cfg.region.law()) else {
        return Err(Error::InvalidField {
            field: "region".into(),
            msg: "the empty region has no environment".into(),
        });
    };
    let dist = RadiusDistribution::new(law)?;
    let env = Environment::sample_for_window(model, &dist, cfg.window, env_seed(cfg.master_seed, index));
    Ok(write_environment_table(&env))
}
