use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};

use fraclearn::experiment::{compare, render_curve_svg, simulate_counterfactual, Campaign};
use fraclearn::logs::{learning_curve, parse_transactions, simulate_student, write_transactions, StudentLog};
use fraclearn::tuning::{tune_with, SearchSpace, TuneOptions, DEFAULT_REPLICATIONS};
use fraclearn::{AgentConfig, Schema};

#[derive(Parser)]
#[command(name = "fraclearn", version, about = "Simulated learners in a fraction tutor")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print a problem sequence as a JSON array of problem ids.
    GenSeq {
        #[arg(long)]
        schema: Schema,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a simulated student and write its transaction log.
    Synth {
        /// Agent configuration (JSON).
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        schema: Schema,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "synthetic")]
        student: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fit an agent configuration to one student's log.
    Tune {
        #[arg(long)]
        log: PathBuf,
        #[arg(long)]
        student: String,
        #[arg(long, default_value_t = 20)]
        iters: usize,
        #[arg(long, default_value_t = 10)]
        first_k: usize,
        #[arg(long, default_value_t = DEFAULT_REPLICATIONS)]
        reps: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a counterfactual campaign and write curves, charts and a comparison.
    Simulate {
        /// Agent configuration (JSON). Ignored when --manifest is given.
        #[arg(long, required_unless_present = "manifest")]
        config: Option<PathBuf>,
        /// Comma-separated schemas.
        #[arg(long, value_delimiter = ',', default_value = "blocked-a,interleaved,faded")]
        schemas: Vec<Schema>,
        #[arg(long, default_value_t = 20)]
        reps: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Campaign manifest written by an earlier run.
        #[arg(long)]
        manifest: Option<PathBuf>,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Learning curve of one student's log.
    Curve {
        #[arg(long)]
        log: PathBuf,
        #[arg(long)]
        student: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn student_log(path: &Path, student: &str) -> Result<StudentLog> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let logs = parse_transactions(&text).with_context(|| format!("parsing {}", path.display()))?;
    match logs.into_iter().find(|l| l.student_id == student) {
        Some(log) => Ok(log),
        None => bail!("student {student:?} not found in {}", path.display()),
    }
}

fn simulate(campaign: &Campaign, out_dir: &Path) -> Result<()> {
    if campaign.replications == 0 {
        bail!("--reps must be at least 1");
    }
    fs::create_dir_all(out_dir).with_context(|| format!("creating {}", out_dir.display()))?;
    let write = |name: &str, text: &str| {
        let path = out_dir.join(name);
        fs::write(&path, text).with_context(|| format!("writing {}", path.display()))
    };
    write("manifest.json", &serde_json::to_string_pretty(campaign)?)?;
    let reports = simulate_counterfactual(campaign);
    for r in &reports {
        write(&format!("curve-{}.csv", r.schema), &r.curve.to_csv())?;
        write(&format!("curve-{}.svg", r.schema), &render_curve_svg(std::slice::from_ref(&r.curve), &[r.schema.name()]))?;
    }
    let curves: Vec<_> = reports.iter().map(|r| r.curve.clone()).collect();
    let labels: Vec<&str> = reports.iter().map(|r| r.schema.name()).collect();
    write("curves.svg", &render_curve_svg(&curves, &labels))?;
    write("reports.json", &serde_json::to_string_pretty(&reports)?)?;
    write("comparison.json", &serde_json::to_string_pretty(&compare(&reports))?)?;
    Ok(())
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::GenSeq { schema, seed, out } => emit(out.as_deref(), &format!("{}\n", schema.generate(seed).to_json())),
        Command::Synth { config, schema, seed, student, out } => {
            let config: AgentConfig = read_json(&config)?;
            let (_, tx) = simulate_student(&config, &schema.generate(seed), seed, &student);
            emit(out.as_deref(), &write_transactions(&tx)?)
        }
        Command::Tune { log, student, iters, first_k, reps, seed, out } => {
            let log = student_log(&log, &student)?;
            let opts = TuneOptions { replications: reps, ..TuneOptions::new(iters, first_k, seed) };
            let result = tune_with(&log, &SearchSpace::default(), &opts)?;
            emit(out.as_deref(), &format!("{}\n", serde_json::to_string_pretty(&result)?))
        }
        Command::Simulate { config, schemas, reps, seed, manifest, out_dir } => {
            let campaign = match (manifest, config) {
                (Some(m), _) => read_json(&m)?,
                (None, Some(c)) => Campaign { config: read_json(&c)?, schemas, replications: reps, seed },
                (None, None) => bail!("either --config or --manifest is required"),
            };
            simulate(&campaign, &out_dir)
        }
        Command::Curve { log, student, out } => {
            let log = student_log(&log, &student)?;
            emit(out.as_deref(), &learning_curve(&log.first_attempts).to_csv())
        }
    }
}
