//! Executes planned experiments on a bounded thread pool and writes the
//! reports and a run manifest.

use std::path::{Path, PathBuf};
use std::time::Instant;

use ontolab::report::{Verdict, VerificationReport};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::Config;
use crate::experiments::{self, Plan};
use crate::CliError;

#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    /// Overrides the config's `output_dir`.
    pub output_dir: Option<PathBuf>,
    pub quiet: bool,
    /// Worker threads; all cores when `None`.
    pub jobs: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub id: String,
    pub kind: String,
    pub verdict: Verdict,
    pub cases: usize,
    pub report: PathBuf,
    pub table: PathBuf,
    pub wall_time_ms: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub version: String,
    /// SHA-256 of the canonical JSON of the effective configuration.
    pub config_hash: String,
    pub verdict: Verdict,
    pub experiments: Vec<ManifestEntry>,
    pub wall_time_ms: f64,
}

pub const DEFAULT_OUTPUT_DIR: &str = "ontolab-out";

pub fn config_hash(canonical: &str) -> String {
    Sha256::digest(canonical.as_bytes())
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

/// Plans every experiment (so configuration errors surface before any
/// work), runs them and writes `<id>.json`, `<id>.csv` and `manifest.json`.
pub fn run(
    config: &Config,
    opts: &RunOptions,
) -> Result<(RunManifest, Vec<VerificationReport>), CliError> {
    let start = Instant::now();
    let plans: Vec<Plan> = config
        .experiments
        .iter()
        .enumerate()
        .map(|(i, e)| experiments::plan(e, i, &config.base_dir))
        .collect::<Result<_, _>>()?;
    let mut ids: Vec<&str> = plans.iter().map(|p| p.id.as_str()).collect();
    ids.sort_unstable();
    if let Some(w) = ids.windows(2).find(|w| w[0] == w[1]) {
        return Err(CliError::Config(format!(
            "duplicate experiment id `{}`",
            w[0]
        )));
    }

    let out_dir = opts
        .output_dir
        .clone()
        .or_else(|| config.output_dir.as_ref().map(|d| config.base_dir.join(d)))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT_DIR));
    std::fs::create_dir_all(&out_dir)
        .map_err(|e| CliError::Io(format!("{}: {e}", out_dir.display())))?;

    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = opts.jobs {
        builder = builder.num_threads(n.max(1));
    }
    let pool = builder
        .build()
        .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
    let results: Vec<(String, String, VerificationReport)> = pool.install(|| {
        plans
            .into_par_iter()
            .map(|p| {
                let (id, kind) = (p.id.clone(), p.kind.as_str().to_string());
                let t = Instant::now();
                let mut report = p.run();
                report.wall_time_ms = t.elapsed().as_secs_f64() * 1e3;
                (id, kind, report)
            })
            .collect()
    });

    let mut entries = Vec::with_capacity(results.len());
    let mut reports = Vec::with_capacity(results.len());
    for (id, kind, report) in results {
        let json = out_dir.join(format!("{id}.json"));
        let csv = out_dir.join(format!("{id}.csv"));
        write(&json, &report.to_json())?;
        write(&csv, &report.to_csv())?;
        if !opts.quiet {
            println!(
                "{} {id} ({kind}): {} cases, {:.1} ms",
                if report.verdict.is_pass() {
                    "PASS"
                } else {
                    "FAIL"
                },
                report.cases.len(),
                report.wall_time_ms
            );
        }
        entries.push(ManifestEntry {
            id,
            kind,
            verdict: report.verdict,
            cases: report.cases.len(),
            report: json,
            table: csv,
            wall_time_ms: report.wall_time_ms,
        });
        reports.push(report);
    }
    let verdict = if entries.iter().all(|e| e.verdict.is_pass()) {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    let manifest = RunManifest {
        version: env!("CARGO_PKG_VERSION").to_string(),
        config_hash: config_hash(&config.canonical),
        verdict,
        experiments: entries,
        wall_time_ms: start.elapsed().as_secs_f64() * 1e3,
    };
    let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    write(&out_dir.join("manifest.json"), &text)?;
    Ok((manifest, reports))
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}
