//! Command-line interface. Exit codes: 0 success, 2 invalid input,
//! 3 no assessable frames, 4 I/O or raster decoding failure.

use std::io::Write;
use std::path::{Path, PathBuf};

use carcino_core::evaluation::DiceAveraging;
use carcino_core::synth::NoiseSpec;
use carcino_core::ScoringConstants;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::cohort::{evaluate_cohort, load_cohort, score_video, EvaluateOptions, EvaluationPlan};
use crate::config::{load_constants, load_spec, load_sweep, SpecFile};
use crate::error::{exit, Error, Result};
use crate::maskio::{load_manifest, read_json, to_json_bytes, write_bytes, FoldFile};
use crate::report::{
    render_assessment, render_cohort, render_sweep, render_sweep_csv, AssessmentReport, CohortReport,
    SweepReport, KIND_ASSESSMENT, KIND_COHORT, KIND_SWEEP,
};
use crate::simulate::{monte_carlo_sweep, write_cohort, SweepLevel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Debug, Parser)]
#[command(name = "carcino", version, about = "Fagotti score computation and evaluation")]
pub struct Cli {
    /// JSON file overriding scoring constants
    #[arg(long, global = true, visible_alias = "constants", value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Seed for splitting and simulation
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads (0 = one per core)
    #[arg(long, global = true, env = "CARCINO_JOBS", default_value_t = 0)]
    pub jobs: usize,
    /// Output format on stdout
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Score one video manifest
    Score {
        manifest: PathBuf,
        /// Also write the JSON assessment here
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Evaluate a cohort against its ground truth
    Evaluate(EvaluateArgs),
    /// Write a stratified fold assignment
    Split {
        index: PathBuf,
        #[arg(long, short, default_value_t = 4)]
        k: usize,
        /// Fold file to write; stdout if omitted
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Generate a synthetic cohort or run a noise sweep
    Simulate {
        spec: PathBuf,
        /// Sweep definition; runs in memory instead of writing a cohort
        #[arg(long, value_name = "FILE")]
        sweep: Option<PathBuf>,
        /// Cohort directory, or directory for sweep outputs
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Render a saved JSON report
    Report { report: PathBuf },
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    pub index: PathBuf,
    /// Fold assignment from `carcino split`; one run per fold
    #[arg(long, conflicts_with = "independent", required_unless_present = "independent")]
    pub folds: Option<PathBuf>,
    /// Evaluate each model on the whole cohort
    #[arg(long)]
    pub independent: bool,
    /// Cohort index holding one model's predictions (repeatable)
    #[arg(long = "model", requires = "independent", value_name = "INDEX")]
    pub models: Vec<PathBuf>,
    /// Use ground truth as the prediction
    #[arg(long)]
    pub oracle: bool,
    /// Pool Dice overlap counts over all frames instead of averaging per frame
    #[arg(long)]
    pub pooled_dice: bool,
    /// Directory for report.json and report.txt
    #[arg(long, short)]
    pub out: Option<PathBuf>,
}

pub fn main() -> i32 {
    let cli = Cli::parse();
    match run(&cli, &mut std::io::stdout().lock()) {
        Ok(()) => exit::OK,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

/// Runs `cli`, writing the primary output to `stdout`.
pub fn run(cli: &Cli, stdout: &mut dyn Write) -> Result<()> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.jobs)
        .build()
        .map_err(|e| Error::Validation(format!("cannot start {} worker(s): {e}", cli.jobs)))?;
    let text = pool.install(|| dispatch(cli))?;
    stdout
        .write_all(text.as_bytes())
        .map_err(|e| Error::io("<stdout>", e))
}

fn emit_doc<T: Serialize>(cli: &Cli, doc: &T, text: impl FnOnce() -> String) -> Result<String> {
    Ok(match cli.format.unwrap_or(Format::Json) {
        Format::Json => to_json_bytes(doc),
        Format::Text => text(),
    })
}

fn dispatch(cli: &Cli) -> Result<String> {
    let constants = load_constants(cli.config.as_deref())?;
    match &cli.command {
        Command::Score { manifest, out } => cmd_score(cli, &constants, manifest, out.as_deref()),
        Command::Evaluate(args) => cmd_evaluate(cli, &constants, args),
        Command::Split { index, k, out } => cmd_split(cli, index, *k, out.as_deref()),
        Command::Simulate { spec, sweep, out } => {
            cmd_simulate(cli, &constants, spec, sweep.as_deref(), out.as_deref())
        }
        Command::Report { report } => cmd_report(cli, report),
    }
}

fn cmd_score(
    cli: &Cli,
    constants: &ScoringConstants,
    manifest: &Path,
    out: Option<&Path>,
) -> Result<String> {
    let m = load_manifest(manifest)?;
    let doc = AssessmentReport::from(&score_video(&m, constants)?);
    if let Some(out) = out {
        write_bytes(out, to_json_bytes(&doc).as_bytes())?;
    }
    emit_doc(cli, &doc, || render_assessment(&doc))
}

fn cmd_evaluate(
    cli: &Cli,
    constants: &ScoringConstants,
    args: &EvaluateArgs,
) -> Result<String> {
    let cohort = load_cohort(&args.index)?;
    let plan = match &args.folds {
        Some(f) => EvaluationPlan::CrossValidation(read_json::<FoldFile>(f)?.into_assignment()?),
        None => EvaluationPlan::Independent(
            args.models
                .iter()
                .map(|m| load_cohort(m))
                .collect::<Result<Vec<_>>>()?,
        ),
    };
    let averaging = if args.pooled_dice {
        DiceAveraging::Pooled
    } else {
        DiceAveraging::PerFrame
    };
    let options = EvaluateOptions {
        averaging,
        oracle: args.oracle,
    };
    let evaluation = evaluate_cohort(&cohort, &plan, constants, options)?;
    let doc = CohortReport::new(&evaluation, constants, averaging);
    if let Some(dir) = &args.out {
        write_bytes(&dir.join("report.json"), to_json_bytes(&doc).as_bytes())?;
        write_bytes(&dir.join("report.txt"), render_cohort(&doc).as_bytes())?;
    }
    emit_doc(cli, &doc, || render_cohort(&doc))
}

fn cmd_split(cli: &Cli, index: &Path, k: usize, out: Option<&Path>) -> Result<String> {
    let cohort = load_cohort(index)?;
    let folds = cohort.split(k, cli.seed.unwrap_or(0))?;
    let doc = FoldFile::from(&folds);
    let bytes = to_json_bytes(&doc);
    match out {
        Some(out) => {
            write_bytes(out, bytes.as_bytes())?;
            Ok(String::new())
        }
        None => emit_doc(cli, &doc, || {
            let mut s = String::new();
            for (fold, size) in folds.fold_sizes().iter().enumerate() {
                s.push_str(&format!("fold {fold}: {size} videos\n"));
            }
            s
        }),
    }
}

fn cmd_simulate(
    cli: &Cli,
    constants: &ScoringConstants,
    spec_path: &Path,
    sweep: Option<&Path>,
    out: Option<&Path>,
) -> Result<String> {
    let mut spec = load_spec(spec_path)?;
    if let Some(seed) = cli.seed {
        spec.seed = seed;
    }
    match sweep {
        None => {
            let out = out.ok_or_else(|| Error::Validation("simulate: --out is required to write a cohort".into()))?;
            let written = write_cohort(&spec, out)?;
            emit_doc(cli, &written.oracle, || {
                format!(
                    "wrote {} videos to {}\nindex: {}\n",
                    written.oracle.videos.len(),
                    out.display(),
                    written.index_path.display()
                )
            })
        }
        Some(sweep) => {
            let sweep = load_sweep(sweep)?;
            let levels: Vec<SweepLevel> = sweep
                .levels
                .iter()
                .enumerate()
                .map(|(i, l)| SweepLevel {
                    label: if l.label.is_empty() { format!("level {i}") } else { l.label.clone() },
                    noise: NoiseSpec::from(l.noise),
                })
                .collect();
            let results = monte_carlo_sweep(&spec, &levels, sweep.replicates, constants, DiceAveraging::PerFrame)?;
            let doc = SweepReport::new(SpecFile::from(spec), constants, &results);
            if let Some(dir) = out {
                write_bytes(&dir.join("sweep.json"), to_json_bytes(&doc).as_bytes())?;
                write_bytes(&dir.join("sweep.csv"), render_sweep_csv(&doc).as_bytes())?;
                write_bytes(&dir.join("sweep.txt"), render_sweep(&doc).as_bytes())?;
            }
            emit_doc(cli, &doc, || render_sweep(&doc))
        }
    }
}

fn cmd_report(cli: &Cli, path: &Path) -> Result<String> {
    let value: serde_json::Value = read_json(path)?;
    let kind = value.get("kind").and_then(|k| k.as_str()).unwrap_or_default().to_string();
    let parse_err = |source| Error::Json {
        path: path.to_owned(),
        source,
    };
    let (json, text) = match kind.as_str() {
        KIND_COHORT => {
            let r: CohortReport = serde_json::from_value(value).map_err(parse_err)?;
            (to_json_bytes(&r), render_cohort(&r))
        }
        KIND_SWEEP => {
            let r: SweepReport = serde_json::from_value(value).map_err(parse_err)?;
            (to_json_bytes(&r), render_sweep(&r))
        }
        KIND_ASSESSMENT => {
            let r: AssessmentReport = serde_json::from_value(value).map_err(parse_err)?;
            (to_json_bytes(&r), render_assessment(&r))
        }
        other => {
            return Err(Error::Validation(format!(
                "{}: unknown report kind `{other}`",
                path.display()
            )))
        }
    };
    Ok(match cli.format.unwrap_or(Format::Text) {
        Format::Json => json,
        Format::Text => text,
    })
}
