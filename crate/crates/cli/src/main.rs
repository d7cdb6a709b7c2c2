use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use fejerqsp::completion::{complete_with_max_iter, CompletedQuadruple};
use fejerqsp::decompose::{assemble_matrix_poly, decompose, export_gates, GateList, QspSequence};
use fejerqsp::fejer::{DEFAULT_EPS_FEJER, DEFAULT_MAX_ITER};
use fejerqsp::pipeline::{run_pipeline_with_csv, PipelineOptions, PipelineOutput};
use fejerqsp::targets::{
    accessibility_csv, accessibility_map, build_erf, build_hamiltonian_sim, build_inverse, build_matrix_inversion,
    build_random, build_rect, build_sign, build_threshold, AccessibilityFamily, TargetPair,
};
use fejerqsp::verify::{default_verify_grid, epsilon_qsp_with_csv, Basis};
use fejerqsp::Error;

const PIPELINE_HEADER: &str = "family,n,iterations,residual,eps_qsp,seconds";
const BENCH_HEADER: &str = "family,param,n,iterations,residual,eps_qsp,completion_seconds";
const THREADS_ENV: &str = "QSP_THREADS";

/// Laurent-polynomial QSP pre-processing: targets, completion, decomposition, verification.
#[derive(Parser, Debug)]
#[command(name = "fejerqsp", version, about)]
struct Cli {
    #[command(flatten)]
    run: RunArgs,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct RunArgs {
    /// Coefficient residual at which the Wilson iteration stops
    #[arg(long, global = true, default_value_t = DEFAULT_EPS_FEJER)]
    eps_fejer: f64,

    #[arg(long, global = true, default_value_t = DEFAULT_MAX_ITER)]
    max_iter: usize,

    /// Verification grid size; default 8(2n+1)
    #[arg(long, global = true)]
    grid_points: Option<usize>,

    #[arg(long, global = true, value_enum, default_value_t = BasisArg::Plus)]
    basis: BasisArg,

    /// Worker threads (QSP_THREADS overrides); default all available
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build a target pair and write it as JSON
    Generate(GenerateArgs),
    /// Complete a target pair with C and D
    Complete {
        #[arg(long)]
        target: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Peel a completed quadruple into a projector sequence
    Decompose {
        #[arg(long)]
        completed: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Also write the gate list
        #[arg(long)]
        gates: Option<PathBuf>,
    },
    /// Measure eps_qsp of a sequence against its target
    Verify {
        #[arg(long)]
        sequence: PathBuf,
        #[arg(long)]
        target: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Per-point CSV
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// complete, decompose and verify in one go
    Pipeline {
        #[arg(long)]
        target: PathBuf,
        /// Receives completed.json, sequence.json and verification.json
        #[arg(long)]
        out_dir: PathBuf,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Sweep degrees or evolution times and write one summary row per instance
    Bench(BenchArgs),
    /// Coefficient-size map over (parameter, log10 1/eps)
    Accessibility(AccessibilityArgs),
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum BasisArg {
    Plus,
    Zero,
}

impl From<BasisArg> for Basis {
    fn from(b: BasisArg) -> Self {
        match b {
            BasisArg::Plus => Basis::Plus,
            BasisArg::Zero => Basis::Zero,
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum FamilyArg {
    Hs,
    Random,
    Threshold,
    Rect,
    Sign,
    Erf,
    Inverse,
    MatrixInversion,
}

#[derive(Args, Debug)]
struct GenerateArgs {
    #[arg(long, value_enum)]
    family: FamilyArg,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    tau: Option<f64>,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    t: Option<f64>,
    #[arg(long)]
    a: Option<f64>,
    #[arg(long)]
    kappa: Option<f64>,
    #[arg(long)]
    k: Option<f64>,
}

#[derive(Args, Debug)]
struct BenchArgs {
    #[arg(long, value_enum)]
    family: FamilyArg,
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    degrees: Vec<usize>,
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    taus: Vec<f64>,
    /// Approximation tolerance for hs targets
    #[arg(long, default_value_t = 1e-14)]
    eps: f64,
    /// CSV destination; stdout when absent
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum MapFamily {
    Rect,
    Threshold,
}

#[derive(Args, Debug)]
struct AccessibilityArgs {
    #[arg(long, value_enum)]
    family: MapFamily,
    /// Δ (threshold) or δ (rect) values; defaults to the standard grid
    #[arg(long, value_delimiter = ',')]
    params: Vec<f64>,
    /// log10(1/eps) values; default 1..=14 (threshold) or 1..=3 (rect)
    #[arg(long, value_delimiter = ',')]
    levels: Vec<u32>,
    #[arg(long)]
    out: PathBuf,
}

/// Settings recorded next to every output.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct RunConfig {
    eps_fejer: f64,
    max_iter: usize,
    grid_points: Option<usize>,
    basis: BasisArg,
    threads: usize,
    seed: u64,
}

impl RunConfig {
    fn options(&self) -> PipelineOptions {
        PipelineOptions {
            eps_fejer: self.eps_fejer,
            max_iter: self.max_iter,
            grid_points: self.grid_points,
            basis: self.basis.into(),
        }
    }
}

fn resolve_threads(flag: Option<usize>) -> Result<usize> {
    if let Ok(v) = std::env::var(THREADS_ENV) {
        return v.trim().parse().with_context(|| format!("{THREADS_ENV}={v} is not a thread count"));
    }
    Ok(flag.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get())))
}

fn run_config(args: &RunArgs) -> Result<RunConfig> {
    let threads = resolve_threads(args.threads)?;
    if !(args.eps_fejer > 0.0) || args.max_iter == 0 || threads == 0 || args.grid_points == Some(0) {
        bail!("eps-fejer, max-iter, threads and grid-points must be positive");
    }
    Ok(RunConfig {
        eps_fejer: args.eps_fejer,
        max_iter: args.max_iter,
        grid_points: args.grid_points,
        basis: args.basis,
        threads,
        seed: args.seed,
    })
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    serde_json::from_reader(BufReader::new(file)).with_context(|| format!("reading {}", path.display()))
}

/// Payload fields plus a `run_config` entry.
fn write_json<T: Serialize>(path: &Path, payload: &T, cfg: &RunConfig) -> Result<()> {
    let mut value = serde_json::to_value(payload)?;
    match value.as_object_mut() {
        Some(obj) => {
            obj.insert("run_config".into(), serde_json::to_value(cfg)?);
        }
        None => value = serde_json::json!({ "value": value, "run_config": cfg }),
    }
    let mut w = BufWriter::new(File::create(path).with_context(|| format!("creating {}", path.display()))?);
    serde_json::to_writer_pretty(&mut w, &value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn need<T>(v: Option<T>, flag: &str, family: &str) -> Result<T> {
    v.with_context(|| format!("--{flag} is required for family {family}"))
}

fn build_target(g: &GenerateArgs, seed: u64) -> std::result::Result<TargetPair, anyhow::Error> {
    let pair = match g.family {
        FamilyArg::Hs => build_hamiltonian_sim(need(g.tau, "tau", "hs")?, need(g.eps, "eps", "hs")?),
        FamilyArg::Random => build_random(need(g.n, "n", "random")?, seed),
        FamilyArg::Threshold => build_threshold(need(g.delta, "delta", "threshold")?, need(g.eps, "eps", "threshold")?)
            .and_then(|p| p.to_target_pair()),
        FamilyArg::Rect => build_rect(need(g.t, "t", "rect")?, need(g.delta, "delta", "rect")?, need(g.eps, "eps", "rect")?),
        FamilyArg::Sign => build_sign(need(g.a, "a", "sign")?, need(g.kappa, "kappa", "sign")?, need(g.eps, "eps", "sign")?),
        FamilyArg::Erf => build_erf(need(g.k, "k", "erf")?, need(g.eps, "eps", "erf")?),
        FamilyArg::Inverse => build_inverse(need(g.kappa, "kappa", "inverse")?, need(g.eps, "eps", "inverse")?),
        FamilyArg::MatrixInversion => {
            build_matrix_inversion(need(g.kappa, "kappa", "matrix-inversion")?, need(g.eps, "eps", "matrix-inversion")?)
        }
    };
    Ok(pair?)
}

fn cmd_generate(g: &GenerateArgs, cfg: &RunConfig) -> Result<()> {
    match build_target(g, cfg.seed) {
        Ok(pair) => write_json(&g.out, &pair, cfg),
        Err(e) => {
            if let Some(Error::CoefficientOverflow { cell }) = e.downcast_ref::<Error>() {
                eprintln!("{}", serde_json::json!({ "overflow": cell }));
            }
            Err(e.context(format!("generating {:?} target", g.family)))
        }
    }
}

fn cmd_complete(target: &Path, out: &Path, cfg: &RunConfig) -> Result<()> {
    let pair: TargetPair = read_json(target)?;
    let q = complete_with_max_iter(&pair, cfg.eps_fejer, cfg.max_iter).context("complete failed")?;
    write_json(out, &q, cfg)
}

fn cmd_decompose(completed: &Path, out: &Path, gates: Option<&Path>, cfg: &RunConfig) -> Result<()> {
    let q: CompletedQuadruple = read_json(completed)?;
    let seq = assemble_matrix_poly(&q).and_then(|f| decompose(&f)).context("decompose failed")?;
    write_json(out, &seq, cfg)?;
    if let Some(path) = gates {
        write_json(path, &GateList { gates: export_gates(&seq) }, cfg)?;
    }
    Ok(())
}

fn cmd_verify(sequence: &Path, target: &Path, out: &Path, csv: Option<&Path>, cfg: &RunConfig) -> Result<()> {
    let seq: QspSequence = read_json(sequence)?;
    let pair: TargetPair = read_json(target)?;
    let grid = cfg.grid_points.unwrap_or_else(|| default_verify_grid(seq.source_degree.max(pair.degree())));
    let report = epsilon_qsp_with_csv(&seq, &pair, grid, cfg.basis.into(), csv).context("verify failed")?;
    write_json(out, &report, cfg)
}

fn summary_row(family: &str, out: &PipelineOutput) -> String {
    let (n, iterations, residual, eps_qsp, seconds) = out.summary_fields();
    format!("{family},{n},{iterations},{residual:e},{eps_qsp:e},{seconds:.6}")
}

fn cmd_pipeline(target: &Path, out_dir: &Path, csv: Option<&Path>, cfg: &RunConfig) -> Result<()> {
    let pair: TargetPair = read_json(target)?;
    let family = pair.meta().family.name();
    fs::create_dir_all(out_dir).with_context(|| format!("creating {}", out_dir.display()))?;
    println!("{PIPELINE_HEADER}");
    match run_pipeline_with_csv(&pair, &cfg.options(), csv) {
        Ok(out) => {
            write_json(&out_dir.join("completed.json"), &out.quadruple, cfg)?;
            write_json(&out_dir.join("sequence.json"), &out.sequence, cfg)?;
            write_json(&out_dir.join("verification.json"), &out.verification, cfg)?;
            println!("{}", summary_row(family, &out));
            Ok(())
        }
        Err(f) => {
            println!("{family},{},,,failed:{},", pair.degree(), f.stage);
            Err(f.into())
        }
    }
}

fn cmd_bench(b: &BenchArgs, cfg: &RunConfig) -> Result<bool> {
    let jobs: Vec<(f64, std::result::Result<TargetPair, Error>)> = match b.family {
        FamilyArg::Random => {
            if b.degrees.is_empty() {
                bail!("--degrees must list at least one degree");
            }
            b.degrees.iter().map(|&n| (cfg.seed as f64, build_random(n, cfg.seed))).collect()
        }
        FamilyArg::Hs => {
            if b.taus.is_empty() {
                bail!("--taus must list at least one evolution time");
            }
            b.taus.iter().map(|&t| (t, build_hamiltonian_sim(t, b.eps))).collect()
        }
        other => bail!("bench supports the random and hs families, not {other:?}"),
    };
    let family = match b.family {
        FamilyArg::Random => "random",
        _ => "hs",
    };
    let opts = cfg.options();
    let rows: Vec<Option<String>> = jobs
        .into_par_iter()
        .map(|(param, pair)| {
            let out = pair.map_err(|e| e.to_string()).and_then(|p| run_pipeline_with_csv(&p, &opts, None).map_err(|e| e.to_string()));
            match out {
                Ok(o) => {
                    let (n, iterations, residual, eps_qsp, seconds) = o.summary_fields();
                    Some(format!("{family},{param},{n},{iterations},{residual:e},{eps_qsp:e},{seconds:.6}"))
                }
                Err(e) => {
                    eprintln!("{family} {param}: {e}");
                    None
                }
            }
        })
        .collect();
    let mut text = String::from(BENCH_HEADER);
    text.push('\n');
    for r in rows.iter().flatten() {
        text.push_str(r);
        text.push('\n');
    }
    match &b.out {
        Some(path) => write_text(path, &text)?,
        None => print!("{text}"),
    }
    Ok(rows.iter().all(Option::is_some))
}

fn cmd_accessibility(a: &AccessibilityArgs) -> Result<()> {
    let (family, params, levels) = match a.family {
        MapFamily::Threshold => (AccessibilityFamily::Threshold, vec![0.1, 0.05, 0.01, 0.005, 0.001], (1..=14).collect()),
        MapFamily::Rect => (AccessibilityFamily::Rect, vec![0.3, 0.4, 0.5], (1..=3).collect()),
    };
    let params = if a.params.is_empty() { params } else { a.params.clone() };
    let levels: Vec<u32> = if a.levels.is_empty() { levels } else { a.levels.clone() };
    let cells = accessibility_map(family, &params, &levels)?;
    write_text(&a.out, &accessibility_csv(family, &cells))
}

fn run(cli: Cli) -> Result<bool> {
    let cfg = run_config(&cli.run)?;
    rayon::ThreadPoolBuilder::new().num_threads(cfg.threads).build_global()?;
    match &cli.command {
        Command::Generate(g) => cmd_generate(g, &cfg)?,
        Command::Complete { target, out } => cmd_complete(target, out, &cfg)?,
        Command::Decompose { completed, out, gates } => cmd_decompose(completed, out, gates.as_deref(), &cfg)?,
        Command::Verify { sequence, target, out, csv } => cmd_verify(sequence, target, out, csv.as_deref(), &cfg)?,
        Command::Pipeline { target, out_dir, csv } => cmd_pipeline(target, out_dir, csv.as_deref(), &cfg)?,
        Command::Bench(b) => return cmd_bench(b, &cfg),
        Command::Accessibility(a) => cmd_accessibility(a)?,
    }
    Ok(true)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
