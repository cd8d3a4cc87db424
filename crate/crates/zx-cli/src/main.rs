//! `zx`: optimise, compare, evaluate, convert and draw circuits and diagrams.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use zx::circuit::{circuit_to_diagram, diagram_to_dot, diagram_to_tikz, emit_qasm, parse_qasm, stats, Circuit, ToffoliMode};
use zx::equiv::{amp, verify, AmpError, Verdict, VerifyOptions, MATRIX_CAP};
use zx::extract::{extract_circuit, verify_extraction, ExtractError};
use zx::rules::{simplify, trace_to_jsonl, RewriteStep, Strategy};
use zx::simplify::{full_reduce_view, to_graph_like};
use zx::Diagram;

#[derive(Parser)]
#[command(name = "zx", version, about = "ZX-calculus circuit rewriting")]
struct Cli {
    #[command(flatten)]
    opts: Global,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone)]
struct Global {
    /// basic, clifford_full, or a comma-separated rule list
    #[arg(long, global = true, default_value = "clifford_full")]
    strategy: String,
    /// hbox or gadgets
    #[arg(long, global = true, default_value = "hbox")]
    toffoli_mode: ToffoliMode,
    #[arg(long, global = true, default_value_t = 1e-9)]
    tol: f64,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Write the rewrite trace as JSON lines next to the output
    #[arg(long, global = true)]
    trace: bool,
    /// Worker threads for batches of files
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
}

#[derive(Subcommand)]
enum Cmd {
    /// Reduce and re-extract circuits
    Opt {
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        /// Output file (single input only; default stdout)
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Directory for batch outputs (default: next to each input)
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Decide whether two circuits are equal up to a global phase
    Verify { a: PathBuf, b: PathBuf },
    /// The amplitude <out|C|in> for bitstrings such as 010
    Amp { circuit: PathBuf, input: String, output: String },
    /// Convert between .qasm and .zx.json
    Convert { input: PathBuf, output: PathBuf },
    /// Draw a circuit or diagram as .dot or .tikz
    Render { input: PathBuf, output: PathBuf },
    /// Gate and diagram counts
    Stats {
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
    },
}

/// Failures, by exit code.
#[derive(Debug)]
enum Fail {
    Input(anyhow::Error),
    NotExtractable(String),
    Inconclusive(String),
}

impl Fail {
    fn code(&self) -> u8 {
        match self {
            Fail::Input(_) => 1,
            Fail::NotExtractable(_) => 2,
            Fail::Inconclusive(_) => 3,
        }
    }
}

impl std::fmt::Display for Fail {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Fail::Input(e) => write!(f, "{e:#}"),
            Fail::NotExtractable(m) => write!(f, "not extractable: {m}"),
            Fail::Inconclusive(m) => write!(f, "inconclusive: {m}"),
        }
    }
}

impl From<anyhow::Error> for Fail {
    fn from(e: anyhow::Error) -> Self {
        Fail::Input(e)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Format {
    Qasm,
    Json,
    Dot,
    Tikz,
}

fn format_of(path: &Path) -> Result<Format, Fail> {
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("");
    let f = if name.ends_with(".qasm") {
        Format::Qasm
    } else if name.ends_with(".json") {
        Format::Json
    } else if name.ends_with(".dot") || name.ends_with(".gv") {
        Format::Dot
    } else if name.ends_with(".tikz") || name.ends_with(".tex") {
        Format::Tikz
    } else {
        return Err(Fail::Input(anyhow!("{}: unrecognised extension (.qasm, .zx.json, .dot, .tikz)", path.display())));
    };
    Ok(f)
}

fn read(path: &Path) -> Result<String, Fail> {
    Ok(fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?)
}

fn write(path: &Path, text: &str) -> Result<(), Fail> {
    Ok(fs::write(path, text).with_context(|| format!("writing {}", path.display()))?)
}

fn load_circuit(path: &Path) -> Result<Circuit, Fail> {
    if format_of(path)? != Format::Qasm {
        return Err(Fail::Input(anyhow!("{}: expected a .qasm circuit", path.display())));
    }
    let c = parse_qasm(&read(path)?).map_err(|e| anyhow!("{}: {e}", path.display()))?;
    Ok(c)
}

fn load_diagram(path: &Path, mode: ToffoliMode) -> Result<Diagram, Fail> {
    match format_of(path)? {
        Format::Qasm => Ok(circuit_to_diagram(&load_circuit(path)?, mode)),
        Format::Json => Ok(zx::json::from_json(&read(path)?).map_err(|e| anyhow!("{}: {e}", path.display()))?),
        _ => Err(Fail::Input(anyhow!("{}: not an input format", path.display()))),
    }
}

fn strategy(g: &Global) -> Result<Strategy, Fail> {
    g.strategy.parse().map_err(|e: String| Fail::Input(anyhow!("--strategy: {e}")))
}

fn not_extractable(e: impl std::fmt::Display) -> Fail {
    Fail::NotExtractable(e.to_string())
}

/// Reduces a diagram and reads a circuit back off it.
fn reduce_and_extract(d: &Diagram, s: &Strategy) -> Result<(Circuit, Vec<RewriteStep>), Fail> {
    let (view, trace) = match s {
        Strategy::CliffordFull => full_reduce_view(d).map_err(not_extractable)?,
        other => {
            let mut d = d.clone();
            let mut trace = simplify(&mut d, other);
            let (view, more) = to_graph_like(&d).map_err(not_extractable)?;
            trace.extend(more);
            (view, trace)
        }
    };
    let c = extract_circuit(&view).map_err(|e| match e {
        ExtractError::OutOfRange(..) => Fail::Input(anyhow!("internal: {e}")),
        e => not_extractable(e),
    })?;
    Ok((c, trace))
}

fn with_suffix(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn stem(path: &Path) -> String {
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("out");
    name.strip_suffix(".qasm").unwrap_or(name).to_string()
}

fn opt_one(g: &Global, input: &Path, output: Option<&Path>) -> Result<(), Fail> {
    let c = load_circuit(input)?;
    let d = circuit_to_diagram(&c, g.toffoli_mode);
    let (e, trace) = reduce_and_extract(&d, &strategy(g)?)?;
    if c.qubits <= MATRIX_CAP {
        let rep = verify_extraction(&c, &e, g.tol).map_err(|e| anyhow!("check: {e}"))?;
        if !rep.passed(g.tol) {
            return Err(Fail::Input(anyhow!("internal: extracted circuit failed its check ({rep:?})")));
        }
    }
    eprintln!("{}: before {}", input.display(), stats(&c));
    eprintln!("{}: after  {}", input.display(), stats(&e));
    let text = emit_qasm(&e);
    match output {
        Some(o) => write(o, &text)?,
        None => print!("{text}"),
    }
    if g.trace {
        let at = with_suffix(output.unwrap_or(input), ".trace.jsonl");
        write(&at, &trace_to_jsonl(&trace))?;
        log::info!("trace of {} steps written to {}", trace.len(), at.display());
    }
    Ok(())
}

/// Runs `f` over `items` on `jobs` threads, reporting each failure, and
/// returns the largest exit code.
fn batch<T: Sync>(jobs: usize, items: &[T], f: impl Fn(&T) -> Result<(), Fail> + Sync) -> Result<u8, Fail> {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).build().map_err(|e| anyhow!("{e}"))?;
    let codes: Vec<u8> = pool.install(|| {
        items
            .par_iter()
            .map(|x| match f(x) {
                Ok(()) => 0,
                Err(e) => {
                    eprintln!("error: {e}");
                    e.code()
                }
            })
            .collect()
    });
    Ok(codes.into_iter().max().unwrap_or(0))
}

fn bits(s: &str) -> Result<Vec<bool>, Fail> {
    s.chars()
        .map(|c| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            _ => Err(Fail::Input(anyhow!("bitstring {s:?} may only contain 0 and 1"))),
        })
        .collect()
}

fn circuit_of_diagram(d: &Diagram) -> Result<Circuit, Fail> {
    Ok(reduce_and_extract(d, &Strategy::CliffordFull)?.0)
}

fn run(cli: Cli) -> Result<u8, Fail> {
    let g = &cli.opts;
    if g.tol.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater) {
        return Err(Fail::Input(anyhow!("--tol must be positive")));
    }
    match &cli.cmd {
        Cmd::Opt { inputs, output, out_dir } => {
            if inputs.len() == 1 && out_dir.is_none() {
                opt_one(g, &inputs[0], output.as_deref())?;
                return Ok(0);
            }
            if output.is_some() {
                return Err(Fail::Input(anyhow!("--output takes a single input; use --out-dir for batches")));
            }
            batch(g.jobs, inputs, |input| {
                let dir = out_dir.clone().unwrap_or_else(|| input.parent().unwrap_or(Path::new(".")).to_path_buf());
                let out = dir.join(format!("{}.opt.qasm", stem(input)));
                opt_one(g, input, Some(&out))
            })
        }
        Cmd::Verify { a, b } => {
            let (ca, cb) = (load_circuit(a)?, load_circuit(b)?);
            let opts = VerifyOptions { toffoli_mode: g.toffoli_mode, tol: g.tol, seed: g.seed };
            let rep = verify(&ca, &cb, &opts).map_err(|e| anyhow!("{e}"))?;
            println!("{}", rep.verdict);
            log::info!("{} vertices left after reduction", rep.residual_vertices);
            if let Some(l) = rep.lambda {
                log::info!("a = ({l}) b");
            }
            if rep.verdict == Verdict::Inconclusive {
                return Err(Fail::Inconclusive(format!("{} qubits is too wide for a numeric check", ca.qubits)));
            }
            Ok(0)
        }
        Cmd::Amp { circuit, input, output } => {
            let c = load_circuit(circuit)?;
            let a = amp(&c, &bits(input)?, &bits(output)?).map_err(|e| match e {
                AmpError::TooWide(_) => Fail::Inconclusive(e.to_string()),
                e => Fail::Input(anyhow!("{e}")),
            })?;
            println!("{:.12}{:+.12}i", a.re, a.im);
            Ok(0)
        }
        Cmd::Convert { input, output } => {
            let text = match (format_of(input)?, format_of(output)?) {
                (Format::Qasm, Format::Json) => zx::json::to_json(&load_diagram(input, g.toffoli_mode)?),
                (Format::Json, Format::Qasm) => emit_qasm(&circuit_of_diagram(&load_diagram(input, g.toffoli_mode)?)?),
                (Format::Qasm, Format::Qasm) => emit_qasm(&load_circuit(input)?),
                (Format::Json, Format::Json) => zx::json::to_json(&load_diagram(input, g.toffoli_mode)?),
                (_, Format::Dot | Format::Tikz) => return Err(Fail::Input(anyhow!("use `zx render` for drawings"))),
                (f, t) => return Err(Fail::Input(anyhow!("cannot convert {f:?} to {t:?}"))),
            };
            write(output, &text)?;
            Ok(0)
        }
        Cmd::Render { input, output } => {
            let d = load_diagram(input, g.toffoli_mode)?;
            let text = match format_of(output)? {
                Format::Dot => diagram_to_dot(&d),
                Format::Tikz => diagram_to_tikz(&d),
                _ => return Err(Fail::Input(anyhow!("{}: render writes .dot or .tikz", output.display()))),
            };
            write(output, &text)?;
            Ok(0)
        }
        Cmd::Stats { inputs } => batch(g.jobs, inputs, |input| {
            let mut line = format!("{}:", input.display());
            if format_of(input)? == Format::Qasm {
                let c = load_circuit(input)?;
                line += &format!(" qubits={} {}", c.qubits, stats(&c));
            }
            let d = load_diagram(input, g.toffoli_mode)?;
            line += &format!(
                " vertices={} edges={} hadamard_edges={} t_like={}",
                d.num_vertices(),
                d.num_edges(),
                d.num_hadamard_edges(),
                zx::zh::t_count(&d)
            );
            println!("{line}");
            Ok(())
        }),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("ZX_LOG", "warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
