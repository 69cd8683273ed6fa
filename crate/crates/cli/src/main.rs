use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use ontolab::report::VerificationReport;
use ontolab_cli::config::{self, apply_override, parse_literal, ExperimentKind};
use ontolab_cli::runner::{self, RunOptions};
use ontolab_cli::{emit_table, CliError, TableFormat};

/// Verification harness for ontological models of quantum theory.
#[derive(Parser)]
#[command(name = "ontolab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every experiment in a TOML config.
    Run {
        config: PathBuf,
        #[command(flatten)]
        run: RunFlags,
        /// `key.path=value`, applied to the parsed config before validation.
        #[arg(long = "override", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
    },
    /// Print a report's cases as a flat table.
    EmitTable {
        report: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    VerifyBorn(OneShot),
    GleasonFit(OneShot),
    SupportImplication(OneShot),
    OperatorId(OneShot),
    CoarseGrain(OneShot),
    Overlap(OneShot),
    KsColor(OneShot),
    Dilation(OneShot),
    Triviality(OneShot),
    Macroreal(OneShot),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Markdown,
}

#[derive(Args)]
struct RunFlags {
    #[arg(long)]
    output_dir: Option<PathBuf>,
    #[arg(long)]
    quiet: bool,
    #[arg(long)]
    jobs: Option<usize>,
}

/// A single experiment assembled from flags.
#[derive(Args)]
struct OneShot {
    /// bb, ks, toy, extended-bb, extended-dup or macrorealist.
    #[arg(long)]
    model: Option<String>,
    #[arg(long)]
    dim: Option<usize>,
    /// `random:N` or a file with one ket per line.
    #[arg(long)]
    states: Option<String>,
    /// `random:N`.
    #[arg(long)]
    measurements: Option<String>,
    /// `quadrature`, `quadrature:PxA` or `mc:N`.
    #[arg(long)]
    method: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    tolerance: Option<f64>,
    #[arg(long)]
    vector_set: Option<PathBuf>,
    #[arg(long)]
    expect: Option<String>,
    /// Any other experiment field, `key=value`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    sets: Vec<String>,
    #[command(flatten)]
    run: RunFlags,
}

fn split_pair(s: &str) -> Result<(String, String), CliError> {
    s.split_once('=')
        .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
        .ok_or_else(|| CliError::Config(format!("expected KEY=VALUE, got `{s}`")))
}

fn count(spec: &str) -> Option<usize> {
    spec.strip_prefix("random:").and_then(|n| n.parse().ok())
}

fn one_shot_config(kind: ExperimentKind, a: &OneShot) -> Result<config::Config, CliError> {
    let mut e = Map::new();
    e.insert("kind".into(), json!(kind.as_str()));
    if let Some(m) = &a.model {
        let mut model = json!({ "name": m });
        if let Some(d) = a.dim {
            model["dim"] = json!(d);
        }
        e.insert("model".into(), model);
    }
    if let Some(s) = &a.states {
        e.insert(
            "states".into(),
            match count(s) {
                Some(n) => json!({ "random": n }),
                None => json!({ "file": s }),
            },
        );
    }
    if let Some(s) = &a.measurements {
        let n = count(s).ok_or_else(|| {
            CliError::Config(format!("--measurements expects random:N, got `{s}`"))
        })?;
        e.insert("measurements".into(), json!({ "random": n }));
    }
    if let Some(m) = &a.method {
        let v = if let Some(n) = m.strip_prefix("mc:") {
            json!({ "monte_carlo": n.parse::<usize>().map_err(|_| CliError::Config(format!("bad method `{m}`")))? })
        } else if let Some(order) = m.strip_prefix("quadrature:") {
            let (p, q) = order
                .split_once('x')
                .and_then(|(p, q)| Some((p.parse::<usize>().ok()?, q.parse::<usize>().ok()?)))
                .ok_or_else(|| CliError::Config(format!("bad method `{m}`")))?;
            json!({ "quadrature": [p, q] })
        } else {
            json!(m)
        };
        e.insert("method".into(), v);
    }
    if let Some(t) = a.tolerance {
        e.insert("tolerance".into(), json!(t));
    }
    if let Some(p) = &a.vector_set {
        e.insert("vector_set".into(), json!(p));
    }
    if let Some(x) = &a.expect {
        e.insert("expect".into(), json!(x));
    }
    let mut root = json!({ "experiment": [Value::Object(e)] });
    if let Some(s) = a.seed {
        root["seed"] = json!(s);
    }
    for s in &a.sets {
        let (k, v) = split_pair(s)?;
        apply_override(&mut root, &format!("experiment.0.{k}"), parse_literal(&v))?;
    }
    config::from_value(root, std::env::current_dir().unwrap_or_default())
}

fn run_config(cfg: &config::Config, flags: &RunFlags) -> Result<bool, CliError> {
    let opts = RunOptions {
        output_dir: flags.output_dir.clone(),
        quiet: flags.quiet,
        jobs: flags.jobs,
    };
    let (manifest, _) = runner::run(cfg, &opts)?;
    Ok(manifest.verdict.is_pass())
}

fn dispatch(cli: Cli) -> Result<bool, CliError> {
    let one = |kind, a: &OneShot| run_config(&one_shot_config(kind, a)?, &a.run);
    match cli.command {
        Command::Run {
            config,
            run,
            overrides,
        } => {
            let pairs = overrides
                .iter()
                .map(|s| split_pair(s))
                .collect::<Result<Vec<_>, _>>()?;
            run_config(&config::load(&config, &pairs)?, &run)
        }
        Command::EmitTable { report, format } => {
            let text = std::fs::read_to_string(&report)
                .map_err(|e| CliError::Io(format!("{}: {e}", report.display())))?;
            let r: VerificationReport = serde_json::from_str(&text).map_err(|e| {
                CliError::Config(format!("{}: not a report: {e}", report.display()))
            })?;
            let format = match format {
                Format::Csv => TableFormat::Csv,
                Format::Markdown => TableFormat::Markdown,
            };
            print!("{}", emit_table(&r, format));
            Ok(true)
        }
        Command::VerifyBorn(a) => one(ExperimentKind::BornEquivalence, &a),
        Command::GleasonFit(a) => one(ExperimentKind::GleasonFit, &a),
        Command::SupportImplication(a) => one(ExperimentKind::SupportImplication, &a),
        Command::OperatorId(a) => one(ExperimentKind::OperatorId, &a),
        Command::CoarseGrain(a) => one(ExperimentKind::CoarseGrain, &a),
        Command::Overlap(a) => one(ExperimentKind::Overlap, &a),
        Command::KsColor(a) => one(ExperimentKind::KsColor, &a),
        Command::Dilation(a) => one(ExperimentKind::Dilation, &a),
        Command::Triviality(a) => one(ExperimentKind::Triviality, &a),
        Command::Macroreal(a) => one(ExperimentKind::Macroreal, &a),
    }
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("ontolab: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
